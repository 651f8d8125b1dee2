//! Subspace lattices over small prime fields, with subspaces recomputed as
//! explicit vector sets.

use std::collections::BTreeSet;
use std::sync::Arc;

use gsubmod::action::GroupAction;
use gsubmod::bits::{self, Mask};
use gsubmod::group::{cyclic, direct_product, symmetric, FiniteGroup};
use gsubmod::linear::{
    check_lattice_submodular, enumerate_subspaces, gaussian_binomial, minimize_on_lattice, DeltaA, FpMatrix, GammaW,
    LatticeFunction, Representation, Subspace,
};
use gsubmod::rational::{int, ratio, Rational};
use gsubmod::submodular::{check_invariance, check_submodular, GroundSymmetry, SetFunction};
use gsubmod::theorems::{self, Witness};
use gsubmod::Caps;

type Vector = Vec<u32>;

/// Every vector of the span, by closing `{0}` under adding multiples of the
/// generators.
fn span_set(p: u32, d: usize, gens: &[Vector]) -> BTreeSet<Vector> {
    let mut set = BTreeSet::from([vec![0; d]]);
    for g in gens {
        let next: BTreeSet<Vector> = set
            .iter()
            .flat_map(|v| (0..p).map(move |c| v.iter().zip(g).map(|(a, b)| (a + c * b) % p).collect()))
            .collect();
        set = next;
    }
    set
}

fn vectors(w: &Subspace) -> BTreeSet<Vector> {
    span_set(w.p(), w.ambient_dim(), w.basis())
}

fn dim_of(p: u32, set: &BTreeSet<Vector>) -> usize {
    let mut n = set.len();
    let mut d = 0;
    while n > 1 {
        assert_eq!(n % p as usize, 0);
        n /= p as usize;
        d += 1;
    }
    d
}

fn apply(m: &FpMatrix, v: &[u32]) -> Vector {
    let p = m.p();
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j) * v[j]).sum::<u32>() % p).collect()
}

/// `A·W` as a vector set: the span of every `ρ(a)w`.
fn act(rep: &Representation, a: &[usize], w: &BTreeSet<Vector>) -> BTreeSet<Vector> {
    let gens: Vec<Vector> = a.iter().flat_map(|&g| w.iter().map(move |v| apply(rep.image(g), v))).collect();
    span_set(rep.p(), rep.dim(), &gens)
}

#[test]
fn grassmann_identity_on_f2_4() {
    let caps = Caps::default();
    let all = enumerate_subspaces(2, 4, &caps).unwrap();
    assert_eq!(all.len(), 67);
    assert_eq!((0..=4).map(|k| gaussian_binomial(4, k, 2)).sum::<u64>(), 67);
    let sets: Vec<BTreeSet<Vector>> = all.iter().map(vectors).collect();
    assert_eq!(sets.iter().collect::<BTreeSet<_>>().len(), 67, "subspaces are distinct");
    for (i, u) in all.iter().enumerate() {
        for (j, w) in all.iter().enumerate() {
            let sum = u.sum(w).unwrap();
            let meet = u.intersection(w).unwrap();
            let union: Vec<Vector> = sets[i].union(&sets[j]).cloned().collect();
            assert_eq!(vectors(&sum), span_set(2, 4, &union));
            assert_eq!(vectors(&meet), sets[i].intersection(&sets[j]).cloned().collect());
            assert_eq!(sum.dim() + meet.dim(), u.dim() + w.dim());
            assert_eq!(u.is_subspace_of(w), sets[i].is_subset(&sets[j]));
        }
    }
}

fn swap_group_reps() -> Vec<Arc<Representation>> {
    let s3 = GroupAction::natural(symmetric(3).unwrap()).unwrap();
    vec![
        Arc::new(Representation::swap(2).unwrap()),
        Arc::new(Representation::swap(3).unwrap()),
        Arc::new(Representation::swap(5).unwrap()),
        Arc::new(Representation::cyclic_shift(3, 2).unwrap()),
        Arc::new(Representation::permutation_matrices(&s3, 3).unwrap()),
    ]
}

#[test]
fn gamma_w_submodular_and_invariant() {
    let caps = Caps::default();
    for rep in swap_group_reps() {
        let g = Arc::clone(rep.group());
        let subspaces = enumerate_subspaces(rep.p(), rep.dim(), &caps).unwrap();
        for w in &subspaces {
            let wset = vectors(w);
            for lambda in [int(0), ratio(1, 2), int(1), int(2)] {
                let f = GammaW::new(Arc::clone(&rep), w.clone(), lambda).unwrap();
                for m in 0..1u64 << g.order() {
                    let d = if m == 0 { 0 } else { dim_of(rep.p(), &act(&rep, &bits::mask_members(m), &wset)) };
                    assert_eq!(f.value(m), int(d as i64) - lambda * m.count_ones() as i64);
                }
                let v = check_submodular(&f, &caps, 0);
                assert!(v.holds && v.exhaustiveness.is_exhaustive(), "{v:?}");
                assert!(check_invariance(&f, GroundSymmetry::Translation(&g), &caps, 0).unwrap().holds);
            }
        }
    }
}

#[test]
fn gamma_w_on_the_swap_by_hand() {
    // W = <(1,0)> over F_3: the swap moves it to <(0,1)>.
    let rep = Arc::new(Representation::swap(3).unwrap());
    let w = Subspace::span(3, 2, &[vec![1, 0]]).unwrap();
    let f = GammaW::new(rep, w, ratio(1, 2)).unwrap();
    let values: Vec<Rational> = (0..4).map(|m: Mask| f.value(m)).collect();
    assert_eq!(values, vec![int(0), ratio(1, 2), ratio(1, 2), int(1)]);
}

fn normal_subsets(g: &FiniteGroup) -> Vec<Vec<usize>> {
    let mut classes: Vec<BTreeSet<usize>> = Vec::new();
    for x in 0..g.order() {
        if !classes.iter().any(|c| c.contains(&x)) {
            classes.push((0..g.order()).map(|h| g.mul(g.mul(h, x), g.inv(h))).collect());
        }
    }
    (1u64..1 << classes.len())
        .map(|m| bits::mask_members(m).into_iter().flat_map(|i| classes[i].iter().copied()).collect())
        .collect()
}

#[test]
fn lattice_atoms_meet_trivially() {
    let caps = Caps::default();
    let mut checked = 0;
    for rep in swap_group_reps() {
        let g = Arc::clone(rep.group());
        let all = enumerate_subspaces(rep.p(), rep.dim(), &caps).unwrap();
        let sets: Vec<BTreeSet<Vector>> = all.iter().map(vectors).collect();
        for a in normal_subsets(&g) {
            for lambda in [ratio(1, 3), ratio(1, 2), int(1), ratio(3, 2)] {
                let f = DeltaA::new(Arc::clone(&rep), g.set_of(a.iter().copied()), lambda).unwrap();
                let values: Vec<Rational> = sets
                    .iter()
                    .map(|s| int(dim_of(rep.p(), &act(&rep, &a, s)) as i64) - lambda * dim_of(rep.p(), s) as i64)
                    .collect();
                for (s, v) in all.iter().zip(&values) {
                    assert_eq!(f.value(s), *v);
                }
                assert!(check_lattice_submodular(&f, &all).unwrap().holds);
                let r = minimize_on_lattice(&f, &caps).unwrap();
                let min = values.iter().zip(&sets).filter(|(_, s)| s.len() > 1).map(|(v, _)| *v).min().unwrap();
                assert_eq!(r.min_value, min);
                assert!(r.atoms_pairwise_trivial());
                for (i, x) in r.atoms.iter().enumerate() {
                    for y in &r.atoms[i + 1..] {
                        let meet: Vec<_> = vectors(x).intersection(&vectors(y)).cloned().collect();
                        assert_eq!(meet.len(), 1, "atoms {x:?} and {y:?} share a nonzero vector");
                    }
                }
                checked += 1;
            }
        }
    }
    assert!(checked > 20);
}

/// Abelian groups acting on `F_3²`.
fn abelian_reps_f3() -> Vec<Arc<Representation>> {
    let m = |rows: &[Vec<u32>]| FpMatrix::from_rows(3, rows).unwrap();
    let c2 = cyclic(2).unwrap();
    let klein = direct_product(&c2, &c2).unwrap();
    vec![
        Arc::new(Representation::swap(3).unwrap()),
        Arc::new(Representation::from_generator_images(cyclic(3).unwrap(), 3, 2, vec![m(&[vec![1, 1], vec![0, 1]])]).unwrap()),
        Arc::new(
            Representation::from_generator_images(klein, 3, 2, vec![m(&[vec![0, 1], vec![1, 0]]), m(&[vec![2, 0], vec![0, 2]])])
                .unwrap(),
        ),
    ]
}

fn product(g: &FiniteGroup, a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| g.mul(x, y))).collect::<BTreeSet<_>>().into_iter().collect()
}

#[test]
fn linear_taod_witness_on_f3_squared() {
    let caps = Caps::default();
    let mut runs = 0;
    for rep in abelian_reps_f3() {
        let g = Arc::clone(rep.group());
        assert!(g.is_abelian());
        let all = enumerate_subspaces(3, 2, &caps).unwrap();
        for am in 1u64..1 << g.order() {
            let a = bits::mask_members(am);
            for w in all.iter().filter(|w| !w.is_zero()) {
                let wset = vectors(w);
                let alpha = ratio(dim_of(3, &act(&rep, &a, &wset)), w.dim());
                let r = theorems::find_taod_witness_linear(&rep, &g.set_of(a.iter().copied()), w, alpha, 3, &caps, 4).unwrap();
                assert!(r.hypotheses_hold && r.conclusion_holds, "{r:#?}");
                let Witness::Subspace(zb) = &r.witnesses["Z"] else { panic!("Z is a subspace witness") };
                let z = span_set(3, 2, zb);
                assert!(z.is_subset(&wset) && z.len() > 1);
                let best = all
                    .iter()
                    .filter(|s| !s.is_zero() && vectors(s).is_subset(&wset))
                    .map(|s| ratio(dim_of(3, &act(&rep, &a, &vectors(s))), s.dim()))
                    .min()
                    .unwrap();
                let dz = dim_of(3, &z);
                assert_eq!(ratio(dim_of(3, &act(&rep, &a, &z)), dz), best);
                let mut power = a.clone();
                let mut alpha_n = alpha;
                for _ in 1..=3 {
                    assert!(int(dim_of(3, &act(&rep, &power, &z)) as i64) <= alpha_n * dz as i64);
                    power = product(&g, &power, &a);
                    alpha_n *= alpha;
                }
                runs += 1;
            }
        }
    }
    assert!(runs > 30);
}

#[test]
fn linear_taod_refuses_non_abelian() {
    let s3 = GroupAction::natural(symmetric(3).unwrap()).unwrap();
    let rep = Representation::permutation_matrices(&s3, 3).unwrap();
    let w = Subspace::whole(3, 3).unwrap();
    let a = rep.group().full_set();
    assert!(theorems::find_taod_witness_linear(&rep, &a, &w, int(1), 2, &Caps::default(), 0).is_err());
}
