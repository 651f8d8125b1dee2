//! Product-set growth statements: Kneser-type inequalities, stabilizer
//! containment under small growth, and the triple inequality.

use std::sync::Arc;

use super::{check_alpha_unit, nonempty, rat, subset_clause, CheckReport, StatementId, Witness};
use crate::action::{ActionKind, GroupAction};
use crate::bits::{self, ElementSet, PointSet};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::{is_subgroup, symmetric_with};
use crate::rational::Rational;

/// Evaluates `|G_{AY}| + |AY| ≥ |A| + |Y|` and the variant
/// `|AY| + |G_{AY}| ≥ |G_{AY}·Y| + |G_{AY}A|`. The first is the reported
/// conclusion; the variant is an observation.
pub fn kneser_check(action: &GroupAction, a: &ElementSet, y: &PointSet) -> Result<CheckReport> {
    let group = action.group();
    let mut r = CheckReport::new(StatementId::Kneser, "sets");
    r.witness("A", Witness::elements(a));
    r.witness("Y", Witness::points(y));
    nonempty(&mut r, &[("A", bits::size(a)), ("Y", bits::size(y))]);
    let ay = action.act_set(a, y);
    let stab = action.set_stabilizer(&ay);
    let (na, ny, nay, ns) = (bits::size(a), bits::size(y), bits::size(&ay), stab.order());
    r.witness("AY", Witness::points(&ay));
    r.witness("stabilizer_of_AY", Witness::subgroup(&stab));
    r.conclusion(
        "|G_AY| + |AY| >= |A| + |Y|",
        ns + nay >= na + ny,
        format!("{ns} + {nay} = {} vs {na} + {ny} = {}", ns + nay, na + ny),
    );
    let hy = action.act_set(stab.members(), y);
    let ha = group.product_set(stab.members(), a);
    let (nhy, nha) = (bits::size(&hy), bits::size(&ha));
    r.observe(
        "|AY| + |G_AY| >= |G_AY Y| + |G_AY A|",
        nay + ns >= nhy + nha,
        format!("{nay} + {ns} = {} vs {nhy} + {nha} = {}", nay + ns, nhy + nha),
    );
    r.observe(
        "stabilizer of AY is trivial",
        ns == 1,
        format!("|G_AY| = {ns}"),
    );
    Ok(r.finish())
}

/// The instance `Y = {0, …, k-1}`, `A₀ = {σ ∈ S_n : σ(Y) ⊆ {0, …, ℓ-1}}` for
/// the natural action of `S_n`.
#[derive(Clone, Debug)]
pub struct Example31 {
    pub action: Arc<GroupAction>,
    pub a0: ElementSet,
    pub y: PointSet,
}

pub fn example_3_1(n: usize, k: usize, l: usize, caps: &Caps) -> Result<Example31> {
    if !(1 <= k && k <= l && l < n) {
        return Err(Error::Domain(format!("need 1 <= k <= l < n, got n = {n}, k = {k}, l = {l}")));
    }
    let group = symmetric_with(n, caps)?;
    let action = Arc::new(GroupAction::natural_with(Arc::clone(&group), caps)?);
    let a0 = group.set_of((0..group.order()).filter(|&g| (0..k).all(|i| group.element(g).apply(i) < l)));
    let y = action.point_set(0..k);
    Ok(Example31 { action, a0, y })
}

/// `(|A₀|, |G_{A₀·Y}|) = (ℓ!/(ℓ-k)! · (n-k)!, ℓ! · (n-ℓ)!)`.
pub fn example_3_1_formulas(n: u64, k: u64, l: u64) -> (u64, u64) {
    let fact = |m: u64| (1..=m).product::<u64>();
    (fact(l) / fact(l - k) * fact(n - k), fact(l) * fact(n - l))
}

/// `|A·Y| = |Y|` implies `⟨A⁻¹A⟩ ⊆ G_Y`, so `Y` is a union of orbits of that
/// subgroup.
pub fn check_murphy(action: &GroupAction, a: &ElementSet, y: &PointSet) -> Result<CheckReport> {
    let group = action.group();
    let mut r = CheckReport::new(StatementId::Murphy, "sets");
    r.witness("A", Witness::elements(a));
    r.witness("Y", Witness::points(y));
    nonempty(&mut r, &[("A", bits::size(a)), ("Y", bits::size(y))]);
    let nay = action.act_size(a, y);
    let ny = bits::size(y);
    r.hypothesis("|A.Y| = |Y|", nay == ny, format!("|A.Y| = {nay}, |Y| = {ny}"));
    let h = group.generated_subgroup(&group.product_set(&group.inverse_set(a), a));
    let stab = action.set_stabilizer(y);
    r.witness("H", Witness::subgroup(&h));
    r.witness("G_Y", Witness::subgroup(&stab));
    let inside = h.is_subgroup_of(&stab);
    if !inside {
        let g = h.elements().into_iter().find(|&g| !stab.contains(g)).expect("H is not inside G_Y");
        r.fail_with("element", Witness::Elements(vec![g]));
    }
    r.conclusion("<A^-1 A> is a subgroup of G_Y", inside, format!("|H| = {}, |G_Y| = {}", h.order(), stab.order()));
    let hy = action.act_set(h.members(), y);
    r.conclusion("H.Y = Y", hy == *y, format!("|H.Y| = {}", bits::size(&hy)));
    let mut seen = action.point_set([]);
    let mut orbits = Vec::new();
    for p in y.ones() {
        if !seen.contains(p) {
            let orbit = action.act_set(h.members(), &action.point_set([p]));
            seen.union_with(&orbit);
            orbits.push(bits::members(&orbit));
        }
    }
    r.witness("H_orbits_of_Y", Witness::Partition(orbits));
    Ok(r.finish())
}

/// `|A·Y| ≤ (2-α)|Y|` implies `A⁻¹A ⊆ Sym_α(Y)`.
pub fn check_small_growth(action: &GroupAction, a: &ElementSet, y: &PointSet, alpha: Rational) -> Result<CheckReport> {
    let group = action.group();
    let mut r = CheckReport::new(StatementId::SmallGrowth, "sets");
    r.witness("A", Witness::elements(a));
    r.witness("Y", Witness::points(y));
    r.witness("alpha", Witness::number(alpha));
    let ok = nonempty(&mut r, &[("A", bits::size(a)), ("Y", bits::size(y))]);
    let ok = check_alpha_unit(&mut r, alpha) && ok;
    let (nay, ny) = (action.act_size(a, y), bits::size(y));
    let bound = (Rational::from_integer(2) - alpha) * rat(ny);
    r.hypothesis("|A.Y| <= (2 - alpha)|Y|", rat(nay) <= bound, format!("{nay} vs {bound}"));
    if ok {
        let sym = action.symmetry_set(y, alpha)?;
        let quotient = group.product_set(&group.inverse_set(a), a);
        r.witness("Sym_alpha(Y)", Witness::elements(&sym));
        r.witness("A^-1 A", Witness::elements(&quotient));
        subset_clause(&mut r, "A^-1 A is inside Sym_alpha(Y)", &quotient, &sym);
    }
    Ok(r.finish())
}

/// `|A⁻¹·Y| ≤ ((3-α)/2)|Y|` implies `AA⁻¹ ⊆ Sym_α(Y)` and
/// `(AA⁻¹)² ⊆ Sym_α(Y)`; for `α < 1` with `Sym_α(Y) ⊆ AA⁻¹`, `AA⁻¹` is a
/// subgroup.
pub fn check_freiman(action: &GroupAction, a: &ElementSet, y: &PointSet, alpha: Rational) -> Result<CheckReport> {
    let group = action.group();
    let mut r = CheckReport::new(StatementId::Freiman, "sets");
    r.witness("A", Witness::elements(a));
    r.witness("Y", Witness::points(y));
    r.witness("alpha", Witness::number(alpha));
    let ok = nonempty(&mut r, &[("A", bits::size(a)), ("Y", bits::size(y))]);
    let ok = check_alpha_unit(&mut r, alpha) && ok;
    let inv = group.inverse_set(a);
    let (n, ny) = (action.act_size(&inv, y), bits::size(y));
    let bound = (Rational::from_integer(3) - alpha) / Rational::from_integer(2) * rat(ny);
    r.hypothesis("|A^-1.Y| <= ((3 - alpha)/2)|Y|", rat(n) <= bound, format!("{n} vs {bound}"));
    if ok {
        let sym = action.symmetry_set(y, alpha)?;
        let aa = group.product_set(a, &inv);
        let square = group.product_set(&aa, &aa);
        r.witness("Sym_alpha(Y)", Witness::elements(&sym));
        r.witness("A A^-1", Witness::elements(&aa));
        subset_clause(&mut r, "A A^-1 is inside Sym_alpha(Y)", &aa, &sym);
        subset_clause(&mut r, "(A A^-1)^2 is inside Sym_alpha(Y)", &square, &sym);
        let applies = alpha < Rational::from_integer(1) && sym.is_subset(&aa);
        if applies {
            let sub = is_subgroup(group, &aa);
            r.conclusion("A A^-1 is a subgroup", sub, "Sym_alpha(Y) is inside A A^-1 and alpha < 1");
        } else {
            r.observe("subgroup corollary applies", false, "needs alpha < 1 and Sym_alpha(Y) inside A A^-1");
        }
    }
    Ok(r.finish())
}

/// Two consequences without a free parameter: `|A·Y| < (3/2)|Y|` implies
/// `(A⁻¹A)² ⊆ Γ_Y`; for left translation with `Y = A`,
/// `|A⁻¹A| < (3/2)|A|` implies that `Γ_A = AA⁻¹` is a subgroup. The report
/// applies when either hypothesis holds.
pub fn check_freiman_remarks(action: &GroupAction, a: &ElementSet, y: &PointSet) -> Result<CheckReport> {
    let group = action.group();
    let mut r = CheckReport::new(StatementId::Freiman, "remarks");
    r.witness("A", Witness::elements(a));
    r.witness("Y", Witness::points(y));
    if bits::size(a) == 0 || bits::size(y) == 0 {
        r.hypothesis("nonempty inputs", false, "A and Y must be nonempty");
        return Ok(r.finish());
    }
    let inv = group.inverse_set(a);
    let (nay, ny) = (action.act_size(a, y), bits::size(y));
    if r.hypothesis("|A.Y| < (3/2)|Y|", 2 * nay < 3 * ny, format!("{nay} vs {ny}")) {
        let q = group.product_set(&inv, a);
        let square = group.product_set(&q, &q);
        let gamma = action.weak_stabilizer(y)?;
        r.witness("Gamma_Y", Witness::elements(&gamma));
        subset_clause(&mut r, "(A^-1 A)^2 is inside Gamma_Y", &square, &gamma);
    }
    let translation = *action.kind() == ActionKind::LeftTranslation && a == y;
    if translation {
        let q = group.product_set(&inv, a);
        let (nq, na) = (bits::size(&q), bits::size(a));
        if r.hypothesis("left translation, Y = A, |A^-1 A| < (3/2)|A|", 2 * nq < 3 * na, format!("{nq} vs {na}")) {
            let aa = group.product_set(a, &inv);
            let gamma = action.weak_stabilizer(y)?;
            r.witness("A A^-1", Witness::elements(&aa));
            r.conclusion("Gamma_A = A A^-1", gamma == aa, format!("|Gamma_A| = {}", bits::size(&gamma)));
            r.conclusion("A A^-1 is a subgroup", is_subgroup(group, &aa), format!("|A A^-1| = {}", bits::size(&aa)));
        }
    }
    Ok(r.finish_any())
}

/// `|AB·Y|² ≤ |AB| · |B·Y| · max_b |Ab·Y|`, and `|AB·Y|² ≤ |AB|·|B·Y|·|A·Y|`
/// when `A` and `B` commute elementwise.
pub fn check_ruzsa_triple(action: &GroupAction, a: &ElementSet, b: &ElementSet, y: &PointSet) -> Result<CheckReport> {
    let group = action.group();
    let mut r = CheckReport::new(StatementId::Ruzsa, "sets");
    r.witness("A", Witness::elements(a));
    r.witness("B", Witness::elements(b));
    r.witness("Y", Witness::points(y));
    if !nonempty(&mut r, &[("A", bits::size(a)), ("B", bits::size(b)), ("Y", bits::size(y))]) {
        return Ok(r.finish());
    }
    let ab = group.product_set(a, b);
    let nab = bits::size(&ab) as u128;
    let naby = action.act_size(&ab, y) as u128;
    let nby = action.act_size(b, y) as u128;
    let max_b = b
        .ones()
        .map(|x| action.act_size(&group.right_translate(a, x), y))
        .max()
        .expect("B is nonempty") as u128;
    r.conclusion(
        "|AB.Y|^2 <= |AB| |B.Y| max_b |Ab.Y|",
        naby * naby <= nab * nby * max_b,
        format!("{} vs {nab} * {nby} * {max_b} = {}", naby * naby, nab * nby * max_b),
    );
    if group.sets_commute(a, b) {
        let nay = action.act_size(a, y) as u128;
        r.conclusion(
            "|AB.Y|^2 <= |AB| |B.Y| |A.Y| for commuting A, B",
            naby * naby <= nab * nby * nay,
            format!("{} vs {nab} * {nby} * {nay} = {}", naby * naby, nab * nby * nay),
        );
    }
    Ok(r.finish())
}
