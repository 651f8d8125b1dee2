//! Statements proved through fragments and atoms of `c_Y` and `d_A`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::{argmin_ratio, lift, local_members, rat, sweep_subsets, CheckReport, StatementId, Witness};
use crate::action::GroupAction;
use crate::bits::{self, ElementSet, Mask, PointSet, UnionCounter};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::Subgroup;
use crate::rational::Rational;
use crate::submodular::{atom_identity, cy_identity_atom, minimize_nonempty, mu_ratio, CyFunction, DaFunction, SetFunction};

fn zero() -> Rational {
    Rational::from_integer(0)
}

/// `c_Y(S) = |S·Y| − λ|S|`.
fn cy(action: &GroupAction, s: &ElementSet, y: &PointSet, lambda: Rational) -> Rational {
    rat(action.act_size(s, y)) - lambda * rat(bits::size(s))
}

/// For `λ ∈ [0, μ]`: a subgroup `H ⊇ G_Y` with
/// `c_Y(A) ≥ c_Y(H) ≥ |Y| − λ|H|` for every nonempty `A`. With `a0`, also
/// checks `λ·max{|A| : A·Y = A₀·Y} + |Y| ≤ λ|H| + |A₀·Y|` for `λ > 0`.
///
/// `λ = 0` uses `H = G_Y`; otherwise `H` is the atom of `c_Y` through the
/// identity.
pub fn check_hamidoune(
    action: &Arc<GroupAction>,
    y: &PointSet,
    lambda: Rational,
    a0: Option<&ElementSet>,
    caps: &Caps,
    seed: u64,
) -> Result<CheckReport> {
    let group = action.group();
    let mut r = CheckReport::new(StatementId::Hamidoune, "sets");
    r.witness("Y", Witness::points(y));
    r.witness("lambda", Witness::number(lambda));
    let mu = mu_ratio(action, y, caps)?.mu;
    r.witness("mu", Witness::number(mu));
    if lambda < zero() || lambda > mu {
        return Err(Error::Domain(format!("lambda = {lambda} must lie in [0, mu] = [0, {mu}]")));
    }
    r.hypothesis("lambda in [0, mu]", true, format!("lambda = {lambda}, mu = {mu}"));
    let stab = action.set_stabilizer(y);
    let exhaustive = group.order() <= caps.minimize_exhaustive;
    let (h, min) = if exhaustive {
        let f = CyFunction::new(Arc::clone(action), y.clone(), lambda)?;
        if lambda == zero() {
            (stab.clone(), Some(minimize_nonempty(&f, caps)?))
        } else {
            let atom = atom_identity(&f, group, caps, seed)?;
            (atom.subgroup, Some(atom.result))
        }
    } else if lambda == zero() {
        (stab.clone(), None)
    } else {
        (cy_identity_atom(action, y, lambda, caps, seed)?.0, None)
    };
    r.witness("H", Witness::subgroup(&h));
    r.witness("G_Y", Witness::subgroup(&stab));
    let ch = cy(action, h.members(), y, lambda);
    r.witness("c_Y(H)", Witness::number(ch));
    r.conclusion("G_Y is inside H", stab.is_subgroup_of(&h), format!("|G_Y| = {}, |H| = {}", stab.order(), h.order()));
    let floor = rat(bits::size(y)) - lambda * rat(h.order());
    r.conclusion("c_Y(H) >= |Y| - lambda |H|", ch >= floor, format!("{ch} vs {floor}"));
    match min {
        Some(res) => {
            r.checked += (1u64 << group.order()) - 1;
            if res.min_value < ch {
                r.fail_with("A", Witness::Elements(bits::mask_members(res.atoms[0])));
            }
            r.conclusion(
                "c_Y(A) >= c_Y(H) for every nonempty A",
                res.min_value >= ch,
                format!("minimum of c_Y over all nonempty A is {}", res.min_value),
            );
        }
        None => {
            let subgroups: Vec<ElementSet> =
                group.enumerate_subgroups(caps)?.iter().map(|s| s.members().clone()).collect();
            let sweep = sweep_subsets(group.order(), 0, caps.sample_trials as u64 * 10, seed, 0, &subgroups, |a| {
                cy(action, a, y, lambda) >= ch
            });
            let failure = r.sweep(sweep);
            if let Some(a) = &failure {
                r.fail_with("A", Witness::elements(a));
            }
            r.conclusion(
                "c_Y(A) >= c_Y(H) for every nonempty A",
                failure.is_none(),
                "sampled subsets together with every subgroup",
            );
        }
    }
    if let Some(a0) = a0 {
        r.witness("A0", Witness::elements(a0));
        if lambda > zero() && bits::size(a0) > 0 {
            let t = action.act_set(a0, y);
            let m = group.set_of((0..group.order()).filter(|&g| action.act_element_on_set(g, y).is_subset(&t)));
            let mt = bits::size(&m);
            r.witness("M(A0.Y)", Witness::elements(&m));
            r.observe("M(A0.Y).Y = A0.Y", action.act_set(&m, y) == t, "the largest A with A.Y = A0.Y");
            let lhs = lambda * rat(mt) + rat(bits::size(y));
            let rhs = lambda * rat(h.order()) + rat(bits::size(&t));
            r.conclusion(
                "lambda max|A| + |Y| <= lambda |H| + |A0.Y|",
                lhs <= rhs,
                format!("{lhs} vs {rhs} with max|A| = {mt}"),
            );
        } else {
            r.observe("corollary applies", false, "needs lambda > 0 and a nonempty A0");
        }
    }
    Ok(r.finish())
}

/// For `|A·Y| ≤ α|A|`: the subset `B ⊆ A` minimizing `|B·Y|/|B|` satisfies
/// `|CB·Y| ≤ α|CB|` for every `C`.
pub fn find_petridis_witness(
    action: &GroupAction,
    a: &ElementSet,
    y: &PointSet,
    alpha: Rational,
    caps: &Caps,
    seed: u64,
) -> Result<CheckReport> {
    let group = action.group();
    let mut r = CheckReport::new(StatementId::Petridis, "sets");
    r.witness("A", Witness::elements(a));
    r.witness("Y", Witness::points(y));
    r.witness("alpha", Witness::number(alpha));
    let na = bits::size(a);
    r.hypothesis("A nonempty", na > 0, format!("|A| = {na}"));
    r.hypothesis("alpha >= 0", alpha >= zero(), format!("alpha = {alpha}"));
    let nay = action.act_size(a, y);
    r.hypothesis("|A.Y| <= alpha |A|", rat(nay) <= alpha * rat(na), format!("{nay} vs {}", alpha * rat(na)));
    if na == 0 {
        return Ok(r.finish());
    }
    let members = local_members(a);
    let order = group.order();
    let images = UnionCounter::new(members.iter().map(|&g| action.act_element_on_set(g, y)).collect());
    let (mask, q) = argmin_ratio(na, caps, |m| (images.count(m), bits::mask_len(m)))?;
    let b = lift(mask, &members, order);
    r.witness("B", Witness::elements(&b));
    r.witness("ratio(B)", Witness::number(q));
    r.conclusion("|B.Y|/|B| <= alpha", q <= alpha, format!("{q} vs {alpha}"));
    let sweep = sweep_subsets(order, caps.conclusion_exhaustive, caps.sample_trials as u64, seed, 1, &[], |c| {
        let cb = group.product_set(c, &b);
        rat(action.act_size(&cb, y)) <= alpha * rat(bits::size(&cb))
    });
    let failure = r.sweep(sweep);
    if let Some(c) = &failure {
        r.fail_with("C", Witness::elements(c));
    }
    r.conclusion("|CB.Y| <= alpha |CB| for every C", failure.is_none(), format!("{} subsets C", r.checked));
    Ok(r.finish())
}

/// Hypotheses and conclusions of the small-doubling statement for given
/// `μ` and a way to obtain the atom of `c_Y` at `λ = μ(1 − ε/2)`.
fn tao_doubling_with(
    action: &GroupAction,
    a: &ElementSet,
    y: &PointSet,
    eps: Rational,
    mu: Rational,
    atom: impl FnOnce(Rational) -> Result<Subgroup>,
) -> Result<CheckReport> {
    let mut r = CheckReport::new(StatementId::TaoDoubling, "sets");
    r.witness("A", Witness::elements(a));
    r.witness("Y", Witness::points(y));
    r.witness("epsilon", Witness::number(eps));
    r.witness("mu", Witness::number(mu));
    let (na, ny, nay) = (bits::size(a), bits::size(y), action.act_size(a, y));
    r.hypothesis("A and Y nonempty", na > 0 && ny > 0, format!("|A| = {na}, |Y| = {ny}"));
    r.hypothesis("|A| >= |Y|", na >= ny, format!("{na} vs {ny}"));
    r.hypothesis("mu > 0", mu > zero(), format!("mu = {mu}"));
    r.hypothesis("epsilon > 0", eps > zero(), format!("epsilon = {eps}"));
    let two = Rational::from_integer(2);
    let bound = (two - eps) * mu * rat(ny);
    r.hypothesis("|A.Y| <= (2 - epsilon) mu |Y|", rat(nay) <= bound, format!("{nay} vs {bound}"));
    if eps <= zero() || eps >= two || ny == 0 {
        return Ok(r.finish());
    }
    if r.hypotheses.iter().any(|c| !c.holds) {
        // The atom is the expensive part and says nothing without the hypotheses.
        r.observe("conclusions evaluated", false, "skipped because a hypothesis fails");
        return Ok(r.finish());
    }
    let lambda = mu * (Rational::from_integer(1) - eps / two);
    r.witness("lambda", Witness::number(lambda));
    let h = atom(lambda)?;
    let hy = action.act_set(h.members(), y);
    r.witness("H", Witness::subgroup(&h));
    r.witness("H.Y", Witness::points(&hy));
    let factor = two / eps - Rational::from_integer(1);
    r.conclusion("Y is inside H.Y", y.is_subset(&hy), format!("|H.Y| = {}", bits::size(&hy)));
    let hb = factor * rat(ny);
    r.conclusion("|H| <= (2/epsilon - 1)|Y|", rat(h.order()) <= hb, format!("{} vs {hb}", h.order()));
    let hyb = mu * factor * rat(ny);
    r.conclusion(
        "|H.Y| <= mu (2/epsilon - 1)|Y|",
        rat(bits::size(&hy)) <= hyb,
        format!("{} vs {hyb}", bits::size(&hy)),
    );
    r.conclusion(
        "H.Y is a union of H-orbits",
        action.act_set(h.members(), &hy) == hy,
        "H maps H.Y onto itself",
    );
    Ok(r.finish())
}

/// `|A| ≥ |Y|`, `μ > 0` and `|A·Y| ≤ (2−ε)μ|Y|` give a subgroup `H` with
/// `Y ⊆ H·Y`, `|H| ≤ (2/ε − 1)|Y|` and `|H·Y| ≤ μ(2/ε − 1)|Y|`.
pub fn check_tao_small_doubling(
    action: &Arc<GroupAction>,
    a: &ElementSet,
    y: &PointSet,
    eps: Rational,
    caps: &Caps,
    seed: u64,
) -> Result<CheckReport> {
    if bits::size(y) == 0 {
        let mut r = CheckReport::new(StatementId::TaoDoubling, "sets");
        r.hypothesis("A and Y nonempty", false, "Y is empty");
        return Ok(r.finish());
    }
    let mu = mu_ratio(action, y, caps)?.mu;
    tao_doubling_with(action, a, y, eps, mu, |lambda| Ok(cy_identity_atom(action, y, lambda, caps, seed)?.0))
}

/// Satisfiability statistics of the small-doubling hypotheses over every
/// pair of nonempty `A ⊆ G`, `Y ⊆ X` and every `ε` in a grid.
#[derive(Clone, Debug, Serialize)]
pub struct DoublingScan {
    pub instances: u64,
    pub hypotheses_hold: u64,
    pub violations: u64,
    /// How often each hypothesis failed.
    pub clause_failures: BTreeMap<String, u64>,
    /// Instances where every hypothesis held, up to ten.
    pub satisfied_examples: Vec<CheckReport>,
    pub first_violation: Option<CheckReport>,
}

pub fn tao_doubling_scan(action: &Arc<GroupAction>, eps_grid: &[Rational], caps: &Caps, seed: u64) -> Result<DoublingScan> {
    let group = action.group();
    let (order, n) = (group.order(), action.domain_size());
    let limit = caps.conclusion_exhaustive;
    if order > limit {
        return Err(Error::capacity("conclusion_exhaustive", limit, order));
    }
    if n > limit {
        return Err(Error::capacity("conclusion_exhaustive", limit, n));
    }
    let mut scan = DoublingScan {
        instances: 0,
        hypotheses_hold: 0,
        violations: 0,
        clause_failures: BTreeMap::new(),
        satisfied_examples: Vec::new(),
        first_violation: None,
    };
    let mut atoms: HashMap<(Mask, Rational), Subgroup> = HashMap::new();
    for ym in 1..=bits::ground_mask(n) {
        let y = bits::mask_to_set(ym, n);
        let mu = mu_ratio(action, &y, caps)?.mu;
        for &eps in eps_grid {
            for am in 1..=bits::ground_mask(order) {
                let a = bits::mask_to_set(am, order);
                let r = tao_doubling_with(action, &a, &y, eps, mu, |lambda| {
                    if let Some(h) = atoms.get(&(ym, lambda)) {
                        return Ok(h.clone());
                    }
                    let h = cy_identity_atom(action, &y, lambda, caps, seed)?.0;
                    atoms.insert((ym, lambda), h.clone());
                    Ok(h)
                })?;
                scan.instances += 1;
                for name in r.failed_hypotheses() {
                    *scan.clause_failures.entry(name.to_string()).or_default() += 1;
                }
                if r.hypotheses_hold {
                    scan.hypotheses_hold += 1;
                    if scan.satisfied_examples.len() < 10 {
                        scan.satisfied_examples.push(r.clone());
                    }
                }
                if r.violation() {
                    scan.violations += 1;
                    scan.first_violation.get_or_insert(r);
                }
            }
        }
    }
    Ok(scan)
}

/// For Abelian `G` and `|A·Y| ≤ α|Y|`: the subset `Z ⊆ Y` minimizing
/// `|A·Z|/|Z|` satisfies `|AC·Z| ≤ α|C·Z|` for every `C`, and
/// `|Aⁿ·Z| ≤ αⁿ|Z|` for `n = 1, …, power_max`.
pub fn find_taod_witness(
    action: &GroupAction,
    a: &ElementSet,
    y: &PointSet,
    alpha: Rational,
    power_max: usize,
    caps: &Caps,
    seed: u64,
) -> Result<CheckReport> {
    let group = action.group();
    if !group.is_abelian() {
        return Err(Error::Domain(format!(
            "{} is not Abelian; d_A is only translation invariant for Abelian groups",
            group.name()
        )));
    }
    let mut r = CheckReport::new(StatementId::Taod, "sets");
    r.witness("A", Witness::elements(a));
    r.witness("Y", Witness::points(y));
    r.witness("alpha", Witness::number(alpha));
    let (na, ny) = (bits::size(a), bits::size(y));
    r.hypothesis("A and Y nonempty", na > 0 && ny > 0, format!("|A| = {na}, |Y| = {ny}"));
    r.hypothesis("alpha >= 0", alpha >= zero(), format!("alpha = {alpha}"));
    let nay = action.act_size(a, y);
    r.hypothesis("|A.Y| <= alpha |Y|", rat(nay) <= alpha * rat(ny), format!("{nay} vs {}", alpha * rat(ny)));
    if na == 0 || ny == 0 {
        return Ok(r.finish());
    }
    let points = local_members(y);
    let n = action.domain_size();
    let orbits = UnionCounter::new(points.iter().map(|&z| action.act_set(a, &action.point_set([z]))).collect());
    let (mask, q) = argmin_ratio(ny, caps, |m| (orbits.count(m), bits::mask_len(m)))?;
    let z = lift(mask, &points, n);
    r.witness("Z", Witness::points(&z));
    r.witness("ratio(Z)", Witness::number(q));
    r.conclusion("|A.Z|/|Z| <= alpha", q <= alpha, format!("{q} vs {alpha}"));
    let sweep = sweep_subsets(group.order(), caps.conclusion_exhaustive, caps.sample_trials as u64, seed, 2, &[], |c| {
        let ac = group.product_set(a, c);
        rat(action.act_size(&ac, &z)) <= alpha * rat(action.act_size(c, &z))
    });
    let failure = r.sweep(sweep);
    if let Some(c) = &failure {
        r.fail_with("C", Witness::elements(c));
    }
    r.conclusion("|AC.Z| <= alpha |C.Z| for every C", failure.is_none(), format!("{} subsets C", r.checked));
    let mut power = a.clone();
    let mut alpha_n = alpha;
    let nz = rat(bits::size(&z));
    for k in 1..=power_max {
        let size = action.act_size(&power, &z);
        let ok = rat(size) <= alpha_n * nz;
        if !ok {
            r.fail_with("n", Witness::count(k));
        }
        r.conclusion(&format!("|A^{k}.Z| <= alpha^{k} |Z|"), ok, format!("{size} vs {}", alpha_n * nz));
        power = group.product_set(&power, a);
        alpha_n *= alpha;
    }
    Ok(r.finish())
}

/// Cardinality bounds on the fragments of `d_A`. Part one: `λ < 1/|A|` gives
/// `|Y| ≤ |A|`. Part two: for a free action with `|X| ≥ |A|`, `μ ≤ 1` and
/// `(|X| − |A|)/(|X| − μ|A|) ≤ λ ≤ 1` with `λ > 0`, every fragment has
/// `|Y| ≥ μ|A|`. The report applies when either part does.
pub fn check_fragment_bounds(
    action: &Arc<GroupAction>,
    a: &ElementSet,
    lambda: Rational,
    mu: Option<Rational>,
    caps: &Caps,
) -> Result<CheckReport> {
    let mut r = CheckReport::new(StatementId::FragmentBounds, "sets");
    r.witness("A", Witness::elements(a));
    r.witness("lambda", Witness::number(lambda));
    if let Some(m) = mu {
        r.witness("mu", Witness::number(m));
    }
    let f = DaFunction::new(Arc::clone(action), a.clone(), lambda)?;
    let na = bits::size(a);
    let nx = action.domain_size();
    let part1 = r.hypothesis("part 1: lambda < 1/|A|", lambda * rat(na) < Rational::from_integer(1), format!("lambda |A| = {}", lambda * rat(na)));
    let part2 = match mu {
        Some(m) => {
            let free = action.profile().free;
            let one = Rational::from_integer(1);
            let ok = free
                && nx >= na
                && m <= one
                && lambda > zero()
                && lambda <= one
                && lambda * (rat(nx) - m * rat(na)) >= rat(nx) - rat(na);
            r.hypothesis(
                "part 2: free, |X| >= |A|, mu <= 1, 0 < lambda <= 1, lambda (|X| - mu|A|) >= |X| - |A|",
                ok,
                format!("free = {free}, |X| = {nx}, |A| = {na}, mu = {m}, lambda = {lambda}"),
            )
        }
        None => r.hypothesis("part 2", false, "no mu supplied"),
    };
    let min = minimize_nonempty(&f, caps)?;
    r.witness("min", Witness::number(min.min_value));
    r.witness("fragment_count", Witness::count(min.fragment_count as usize));
    let target = f.scaled(min.atoms[0]);
    let total = bits::ground_mask(nx);
    let sizes = (1..=total)
        .into_par_iter()
        .filter(|&m| f.scaled(m) == target)
        .map(|m| (m.count_ones() as usize, m.count_ones() as usize))
        .reduce(|| (usize::MAX, 0), |x, y| (x.0.min(y.0), x.1.max(y.1)));
    r.checked = total;
    r.observe("fragment sizes", true, format!("from {} to {}", sizes.0, sizes.1));
    if part1 {
        let ok = sizes.1 <= na;
        if !ok {
            let bad = (1..=total).into_par_iter().find_first(|&m| f.scaled(m) == target && bits::mask_len(m) > na);
            r.fail_with("Y", Witness::Points(bits::mask_members(bad.expect("a large fragment exists"))));
        }
        r.conclusion("every fragment has |Y| <= |A|", ok, format!("largest fragment has {} points", sizes.1));
    }
    if part2 {
        let m = mu.expect("part 2 needs mu");
        let ok = rat(sizes.0) >= m * rat(na);
        if !ok {
            let bad = (1..=total)
                .into_par_iter()
                .find_first(|&s| f.scaled(s) == target && rat(bits::mask_len(s)) < m * rat(na));
            r.fail_with("Y", Witness::Points(bits::mask_members(bad.expect("a small fragment exists"))));
        }
        r.conclusion("every fragment has |Y| >= mu |A|", ok, format!("smallest fragment has {} points", sizes.0));
    }
    Ok(r.finish_any())
}
