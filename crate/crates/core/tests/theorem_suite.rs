//! Every statement checker against brute-force oracles on small families.
//! A failure here means either the checker or the oracle is wrong; both
//! compute from scratch.

use std::collections::BTreeSet;
use std::sync::Arc;

use gsubmod::action::GroupAction;
use gsubmod::bits::{self, ElementSet, PointSet};
use gsubmod::group::{affine_gl1, cyclic, dihedral, direct_product, symmetric, FiniteGroup};
use gsubmod::rational::{ratio, Rational};
use gsubmod::sampling::{self, Exhaustiveness};
use gsubmod::submodular::mu_ratio;
use gsubmod::theorems::{self, CheckReport, Witness};
use gsubmod::Caps;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn natural(g: Arc<FiniteGroup>) -> Arc<GroupAction> {
    Arc::new(GroupAction::natural(g).unwrap())
}

fn regular(g: Arc<FiniteGroup>) -> Arc<GroupAction> {
    Arc::new(GroupAction::left_translation(g).unwrap())
}

/// `|A·Y|` by applying every permutation image directly.
fn image(action: &GroupAction, a: &[usize], y: &[usize]) -> BTreeSet<usize> {
    a.iter().flat_map(|&g| y.iter().map(move |&x| action.act(g, x))).collect()
}

fn products(g: &FiniteGroup, a: &[usize], b: &[usize]) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for &x in a {
        for &y in b {
            let p: Vec<usize> = g.element(y).images().iter().map(|&i| g.element(x).apply(i)).collect();
            out.insert(g.elements().iter().position(|e| e.images() == p.as_slice()).unwrap());
        }
    }
    out
}

fn inverses(g: &FiniteGroup, a: &[usize]) -> Vec<usize> {
    a.iter().map(|&x| (0..g.order()).find(|&y| g.mul(x, y) == 0).unwrap()).collect()
}

fn random_members(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Vec<usize> {
    loop {
        let v: Vec<usize> = (0..n).filter(|_| rng.gen_bool(density)).collect();
        if !v.is_empty() {
            return v;
        }
    }
}

fn subgroup_coset_subset(rng: &mut ChaCha8Rng, g: &Arc<FiniteGroup>, y: &PointSet, action: &GroupAction) -> Vec<usize> {
    let h = action.set_stabilizer(y).elements();
    let t = rng.gen_range(0..g.order());
    let coset: Vec<usize> = h.iter().map(|&x| g.mul(t, x)).collect();
    let k = rng.gen_range(1..=coset.len());
    coset[..k].to_vec()
}

fn set(g: &FiniteGroup, v: &[usize]) -> ElementSet {
    g.set_of(v.iter().copied())
}

fn assert_sound(r: &CheckReport) {
    assert!(!r.violation(), "hypotheses hold but a conclusion fails: {r:#?}");
}

fn fact(n: u64) -> u64 {
    (1..=n).product()
}

#[test]
fn kneser_construction_matches_closed_forms() {
    let caps = Caps::default();
    for n in 2..=6usize {
        let action = natural(symmetric(n).unwrap());
        let g = action.group();
        for l in 1..n {
            for k in 1..=l {
                let ex = theorems::example_3_1(n, k, l, &caps).unwrap();
                let a0: Vec<usize> = (0..g.order()).filter(|&s| (0..k).all(|i| g.element(s).apply(i) < l)).collect();
                assert_eq!(bits::members(&ex.a0), a0);
                let y: Vec<usize> = (0..k).collect();
                let ay = image(&action, &a0, &y);
                assert_eq!(ay, (0..l).collect::<BTreeSet<_>>());
                let stab = (0..g.order())
                    .filter(|&s| ay.iter().map(|&x| g.element(s).apply(x)).collect::<BTreeSet<_>>() == ay)
                    .count();
                let (n64, k64, l64) = (n as u64, k as u64, l as u64);
                assert_eq!(a0.len() as u64, fact(l64) / fact(l64 - k64) * fact(n64 - k64), "|A0| at n={n} k={k} l={l}");
                assert_eq!(stab as u64, fact(l64) * fact(n64 - l64), "|G_A0Y| at n={n} k={k} l={l}");
                let r = theorems::kneser_check(&action, &ex.a0, &ex.y).unwrap();
                assert_eq!(r.conclusion_holds, k == l, "n={n} k={k} l={l}: {:?}", r.conclusions);
                assert_eq!(r.conclusion_holds, stab + ay.len() >= a0.len() + y.len());
            }
        }
    }
}

#[test]
fn ruzsa_never_fails() {
    let mut rng = sampling::rng(11, 0);
    for action in [natural(symmetric(4).unwrap()), natural(affine_gl1(5).unwrap())] {
        let g = Arc::clone(action.group());
        for _ in 0..1000 {
            let d = rng.gen_range(0.05..0.6);
            let (a, b) = (random_members(&mut rng, g.order(), d), random_members(&mut rng, g.order(), d));
            let y = random_members(&mut rng, action.domain_size(), 0.4);
            let r = theorems::check_ruzsa_triple(&action, &set(&g, &a), &set(&g, &b), &action.point_set(y.iter().copied()))
                .unwrap();
            let ab: Vec<usize> = products(&g, &a, &b).into_iter().collect();
            let naby = image(&action, &ab, &y).len() as u128;
            let nby = image(&action, &b, &y).len() as u128;
            let max_b = b.iter().map(|&x| image(&action, &products(&g, &a, &[x]).into_iter().collect::<Vec<_>>(), &y).len()).max().unwrap() as u128;
            assert!(naby * naby <= ab.len() as u128 * nby * max_b);
            assert!(r.hypotheses_hold && r.conclusion_holds, "{r:#?}");
        }
    }
}

#[test]
fn small_growth_and_freiman() {
    let mut rng = sampling::rng(12, 0);
    let grid = [ratio(1, 4), ratio(1, 2), ratio(2, 3), ratio(3, 4), ratio(1, 1)];
    let actions = [natural(symmetric(4).unwrap()), natural(dihedral(5).unwrap()), natural(affine_gl1(5).unwrap())];
    let (mut sg_held, mut fr_held) = (0, 0);
    for i in 0..500 {
        let action = &actions[i % actions.len()];
        let g = Arc::clone(action.group());
        let y = random_members(&mut rng, action.domain_size(), 0.5);
        let ys = action.point_set(y.iter().copied());
        let a = if rng.gen_bool(0.5) { subgroup_coset_subset(&mut rng, &g, &ys, action) } else { random_members(&mut rng, g.order(), 0.1) };
        let alpha = grid[rng.gen_range(0..grid.len())];
        let ny = y.len() as i64;
        let overlap = |e: usize| y.iter().filter(|&&x| ys.contains(action.act(e, x))).count() as i64;
        let in_sym = |e: usize| Rational::from_integer(overlap(e)) >= alpha * ny;

        let r = theorems::check_small_growth(action, &set(&g, &a), &ys, alpha).unwrap();
        let hyp = Rational::from_integer(image(action, &a, &y).len() as i64) <= (Rational::from_integer(2) - alpha) * ny;
        let quotient = products(&g, &inverses(&g, &a), &a);
        assert_eq!(r.hypotheses_hold, hyp);
        assert_eq!(r.conclusion_holds, quotient.iter().all(|&e| in_sym(e)));
        assert_sound(&r);
        sg_held += hyp as usize;

        let r = theorems::check_freiman(action, &set(&g, &a), &ys, alpha).unwrap();
        let inv = inverses(&g, &a);
        let hyp = Rational::from_integer(image(action, &inv, &y).len() as i64) * 2 <= (Rational::from_integer(3) - alpha) * ny;
        assert_eq!(r.hypotheses_hold, hyp);
        let aa: Vec<usize> = products(&g, &a, &inv).into_iter().collect();
        let square = products(&g, &aa, &aa);
        if hyp {
            assert!(aa.iter().all(|&e| in_sym(e)) && square.iter().all(|&e| in_sym(e)), "{r:#?}");
        }
        assert_sound(&r);
        fr_held += hyp as usize;
    }
    assert!(sg_held > 100 && fr_held > 100, "too few instances meet the hypotheses: {sg_held}, {fr_held}");
}

#[test]
fn freiman_remarks_on_translations() {
    let mut rng = sampling::rng(13, 0);
    for g in [cyclic(8).unwrap(), dihedral(4).unwrap(), direct_product(&cyclic(2).unwrap(), &cyclic(4).unwrap()).unwrap()] {
        let action = regular(Arc::clone(&g));
        for _ in 0..100 {
            let a = if rng.gen_bool(0.5) {
                let h = g.enumerate_subgroups(&Caps::default()).unwrap();
                let h = &h[rng.gen_range(0..h.len())];
                let t = rng.gen_range(0..g.order());
                h.elements().iter().map(|&x| g.mul(t, x)).collect()
            } else {
                random_members(&mut rng, g.order(), 0.3)
            };
            let r = theorems::check_freiman_remarks(&action, &set(&g, &a), &set(&g, &a)).unwrap();
            assert_sound(&r);
        }
    }
}

#[test]
fn murphy_subgroup_inside_stabilizer() {
    let mut rng = sampling::rng(14, 0);
    let mut held = 0;
    for action in [natural(symmetric(4).unwrap()), natural(dihedral(6).unwrap()), regular(cyclic(6).unwrap())] {
        let g = Arc::clone(action.group());
        for _ in 0..200 {
            let y = random_members(&mut rng, action.domain_size(), 0.5);
            let ys = action.point_set(y.iter().copied());
            let a = subgroup_coset_subset(&mut rng, &g, &ys, &action);
            let a = if rng.gen_bool(0.3) { random_members(&mut rng, g.order(), 0.2) } else { a };
            let r = theorems::check_murphy(&action, &set(&g, &a), &ys).unwrap();
            let hyp = image(&action, &a, &y).len() == y.len();
            assert_eq!(r.hypotheses_hold, hyp);
            if hyp {
                // Every a⁻¹b fixes Y setwise.
                for e in products(&g, &inverses(&g, &a), &a) {
                    assert_eq!(image(&action, &[e], &y), y.iter().copied().collect());
                }
                held += 1;
            }
            assert_sound(&r);
        }
    }
    assert!(held > 50);
}

/// `min_{A ≠ ∅} |A·Y| − λ|A|` by enumerating every subset of `G`.
fn cy_min(action: &GroupAction, y: &[usize], lambda: Rational) -> Rational {
    let order = action.group().order();
    let images: Vec<BTreeSet<usize>> = (0..order).map(|g| image(action, &[g], y)).collect();
    (1u64..1 << order)
        .map(|m| {
            let mut u = BTreeSet::new();
            for g in bits::mask_members(m) {
                u.extend(images[g].iter().copied());
            }
            Rational::from_integer(u.len() as i64) - lambda * bits::mask_len(m) as i64
        })
        .min()
        .unwrap()
}

#[test]
fn hamidoune_over_lambda_grid() {
    let caps = Caps::default();
    let steps = [ratio(0, 1), ratio(1, 4), ratio(1, 2), ratio(3, 4), ratio(1, 1)];
    for action in [natural(symmetric(3).unwrap()), natural(dihedral(4).unwrap()), regular(cyclic(6).unwrap()), natural(affine_gl1(3).unwrap())] {
        let g = action.group();
        let n = action.domain_size();
        for ym in 1u64..1 << n {
            let y = bits::mask_members(ym);
            let ys = action.point_set(y.iter().copied());
            let mu = mu_ratio(&action, &ys, &caps).unwrap().mu;
            for &t in &steps {
                let lambda = mu * t;
                let r = theorems::check_hamidoune(&action, &ys, lambda, Some(&g.full_set()), &caps, 5).unwrap();
                assert!(r.hypotheses_hold);
                assert_sound(&r);
                let Witness::Subgroup(h) = &r.witnesses["H"] else { panic!("H is a subgroup witness") };
                assert!(gsubmod::group::is_subgroup(g, &g.set_of(h.iter().copied())));
                let ch = Rational::from_integer(image(&action, h, &y).len() as i64) - lambda * h.len() as i64;
                assert_eq!(ch, cy_min(&action, &y, lambda), "H attains the minimum at lambda = {lambda}");
            }
        }
    }
}

#[test]
fn petridis_exhaustive_on_small_groups() {
    let caps = Caps::default();
    let mut rng = sampling::rng(15, 0);
    for action in [natural(symmetric(3).unwrap()), natural(dihedral(5).unwrap()), natural(dihedral(7).unwrap()), regular(cyclic(12).unwrap())] {
        let g = Arc::clone(action.group());
        assert!(g.order() <= 14);
        for _ in 0..12 {
            let a = random_members(&mut rng, g.order(), 0.4);
            let y = random_members(&mut rng, action.domain_size(), 0.4);
            let alpha = ratio(image(&action, &a, &y).len(), a.len());
            let r = theorems::find_petridis_witness(&action, &set(&g, &a), &action.point_set(y.iter().copied()), alpha, &caps, 3)
                .unwrap();
            assert_eq!(r.exhaustiveness, Exhaustiveness::Exhaustive);
            assert!(r.hypotheses_hold && r.conclusion_holds, "{r:#?}");
            let Witness::Elements(b) = &r.witnesses["B"] else { panic!("B is an element witness") };
            let best = (1u64..1 << a.len())
                .map(|m| {
                    let sub: Vec<usize> = bits::mask_members(m).into_iter().map(|i| a[i]).collect();
                    ratio(image(&action, &sub, &y).len(), sub.len())
                })
                .min()
                .unwrap();
            assert_eq!(ratio(image(&action, b, &y).len(), b.len()), best);
        }
    }
}

#[test]
fn taod_with_powers_on_abelian_groups() {
    let caps = Caps::default();
    let mut rng = sampling::rng(16, 0);
    let groups = [
        cyclic(5).unwrap(),
        cyclic(7).unwrap(),
        cyclic(8).unwrap(),
        direct_product(&cyclic(2).unwrap(), &cyclic(3).unwrap()).unwrap(),
        direct_product(&cyclic(2).unwrap(), &cyclic(4).unwrap()).unwrap(),
        direct_product(&cyclic(3).unwrap(), &cyclic(3).unwrap()).unwrap(),
    ];
    for g in groups {
        let action = regular(Arc::clone(&g));
        for _ in 0..20 {
            let a = random_members(&mut rng, g.order(), 0.3);
            let y = random_members(&mut rng, g.order(), 0.4);
            let alpha = ratio(image(&action, &a, &y).len(), y.len());
            let r = theorems::find_taod_witness(&action, &set(&g, &a), &action.point_set(y.iter().copied()), alpha, 4, &caps, 9)
                .unwrap();
            assert!(r.hypotheses_hold && r.conclusion_holds, "{r:#?}");
            let Witness::Points(z) = &r.witnesses["Z"] else { panic!("Z is a point witness") };
            // Power corollary recomputed directly.
            let mut power = a.clone();
            for k in 1..=4u32 {
                let bound = Rational::from_integer(z.len() as i64) * num_traits_pow(alpha, k);
                assert!(Rational::from_integer(image(&action, &power, z).len() as i64) <= bound);
                power = products(&g, &power, &a).into_iter().collect();
            }
        }
    }
    let s3 = natural(symmetric(3).unwrap());
    let one = s3.group().set_of([0]);
    assert!(theorems::find_taod_witness(&s3, &one, &s3.point_set([0]), ratio(1, 1), 2, &caps, 1).is_err());
}

fn num_traits_pow(r: Rational, k: u32) -> Rational {
    (0..k).fold(Rational::from_integer(1), |acc, _| acc * r)
}

/// Fragment sizes of `d_A(Y) = |A·Y| − λ|Y|` by enumeration.
fn fragment_sizes(action: &GroupAction, a: &[usize], lambda: Rational) -> (usize, usize) {
    let n = action.domain_size();
    let vals: Vec<(Rational, usize)> = (1u64..1 << n)
        .map(|m| {
            let y = bits::mask_members(m);
            (Rational::from_integer(image(action, a, &y).len() as i64) - lambda * y.len() as i64, y.len())
        })
        .collect();
    let min = vals.iter().map(|v| v.0).min().unwrap();
    let sizes: Vec<usize> = vals.iter().filter(|v| v.0 == min).map(|v| v.1).collect();
    (*sizes.iter().min().unwrap(), *sizes.iter().max().unwrap())
}

#[test]
fn fragment_bounds_both_regimes() {
    let caps = Caps::default();
    let mut rng = sampling::rng(17, 0);
    let (mut part1, mut part2) = (0, 0);
    for action in [natural(symmetric(4).unwrap()), regular(cyclic(8).unwrap()), regular(direct_product(&cyclic(2).unwrap(), &cyclic(3).unwrap()).unwrap())] {
        let g = Arc::clone(action.group());
        let nx = action.domain_size();
        for _ in 0..40 {
            let a = random_members(&mut rng, g.order().min(nx), 0.5);
            let na = a.len();
            // Regime one: λ|A| < 1.
            let l1 = ratio(1, 2 * na);
            let r = theorems::check_fragment_bounds(&action, &set(&g, &a), l1, None, &caps).unwrap();
            assert!(r.hypotheses_hold);
            assert_sound(&r);
            assert!(fragment_sizes(&action, &a, l1).1 <= na);
            part1 += 1;
            // Regime two, on free actions: the smallest admissible λ for μ = 1/2.
            if action.profile().free {
                let mu = ratio(1, 2);
                let lambda = Rational::from_integer((nx - na) as i64) / (Rational::from_integer(nx as i64) - mu * na as i64);
                let lambda = if lambda > Rational::from_integer(0) { lambda } else { ratio(1, 2) };
                let r = theorems::check_fragment_bounds(&action, &set(&g, &a), lambda, Some(mu), &caps).unwrap();
                assert_sound(&r);
                let hyp2 = r.hypotheses.iter().any(|c| c.name.starts_with("part 2") && c.holds);
                if hyp2 {
                    let smallest = fragment_sizes(&action, &a, lambda).0;
                    assert!(Rational::from_integer(smallest as i64) >= mu * na as i64, "{r:#?}");
                    part2 += 1;
                }
            }
        }
    }
    assert!(part1 > 0 && part2 > 20, "regime counts {part1}, {part2}");
}
