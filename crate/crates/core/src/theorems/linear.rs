//! The same statements for a representation acting on subspaces, with
//! dimension in place of cardinality.

use std::sync::Arc;

use super::{
    argmin_ratio, check_alpha_unit, lift, local_members, nonempty, rat, subset_clause, sweep_subsets, CheckReport,
    StatementId, Witness,
};
use crate::bits::{self, ElementSet, Mask};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::Subgroup;
use crate::linear::{subspaces_of, GammaW, Representation, Subspace};
use crate::rational::Rational;
use crate::submodular::{atom_identity, minimize_nonempty};

fn zero() -> Rational {
    Rational::from_integer(0)
}

/// `dim(A·W)`, zero for empty `A`.
fn dim_of(rep: &Representation, a: &ElementSet, w: &Subspace) -> Result<usize> {
    if bits::size(a) == 0 {
        return Ok(0);
    }
    Ok(rep.act_subspace(a, w)?.dim())
}

fn dims(rep: &Representation, a: &ElementSet, w: &Subspace) -> Result<(usize, usize)> {
    Ok((dim_of(rep, a, w)?, w.dim()))
}

/// `dim(A·W) = dim W` implies `⟨A⁻¹A⟩ ⊆ G_W`.
pub fn check_murphy_linear(rep: &Representation, a: &ElementSet, w: &Subspace) -> Result<CheckReport> {
    let group = rep.group();
    let mut r = CheckReport::new(StatementId::Murphy, "linear");
    r.witness("A", Witness::elements(a));
    r.witness("W", Witness::subspace(w));
    nonempty(&mut r, &[("A", bits::size(a)), ("W", w.dim())]);
    let (daw, dw) = dims(rep, a, w)?;
    r.hypothesis("dim(A.W) = dim W", daw == dw, format!("{daw} vs {dw}"));
    let h = group.generated_subgroup(&group.product_set(&group.inverse_set(a), a));
    let stab = rep.stabilizer(w)?;
    r.witness("H", Witness::subgroup(&h));
    r.witness("G_W", Witness::subgroup(&stab));
    subset_clause(&mut r, "<A^-1 A> is a subgroup of G_W", h.members(), stab.members());
    Ok(r.finish())
}

/// `dim(A·W) ≤ (2-α) dim W` implies `A⁻¹A ⊆ Sym_α(W)`.
pub fn check_small_growth_linear(rep: &Representation, a: &ElementSet, w: &Subspace, alpha: Rational) -> Result<CheckReport> {
    let group = rep.group();
    let mut r = CheckReport::new(StatementId::SmallGrowth, "linear");
    r.witness("A", Witness::elements(a));
    r.witness("W", Witness::subspace(w));
    r.witness("alpha", Witness::number(alpha));
    let ok = nonempty(&mut r, &[("A", bits::size(a)), ("W", w.dim())]);
    let ok = check_alpha_unit(&mut r, alpha) && ok;
    let (daw, dw) = dims(rep, a, w)?;
    let bound = (Rational::from_integer(2) - alpha) * rat(dw);
    r.hypothesis("dim(A.W) <= (2 - alpha) dim W", rat(daw) <= bound, format!("{daw} vs {bound}"));
    if ok {
        let (sym, _) = rep.symmetry_sets(w, alpha)?;
        let q = group.product_set(&group.inverse_set(a), a);
        r.witness("Sym_alpha(W)", Witness::elements(&sym));
        subset_clause(&mut r, "A^-1 A is inside Sym_alpha(W)", &q, &sym);
    }
    Ok(r.finish())
}

/// `dim(A⁻¹·W) ≤ ((3-α)/2) dim W` implies `(AA⁻¹)² ⊆ Sym_α(W)`.
pub fn check_freiman_linear(rep: &Representation, a: &ElementSet, w: &Subspace, alpha: Rational) -> Result<CheckReport> {
    let group = rep.group();
    let mut r = CheckReport::new(StatementId::Freiman, "linear");
    r.witness("A", Witness::elements(a));
    r.witness("W", Witness::subspace(w));
    r.witness("alpha", Witness::number(alpha));
    let ok = nonempty(&mut r, &[("A", bits::size(a)), ("W", w.dim())]);
    let ok = check_alpha_unit(&mut r, alpha) && ok;
    let inv = group.inverse_set(a);
    let (d, dw) = dims(rep, &inv, w)?;
    let bound = (Rational::from_integer(3) - alpha) / Rational::from_integer(2) * rat(dw);
    r.hypothesis("dim(A^-1.W) <= ((3 - alpha)/2) dim W", rat(d) <= bound, format!("{d} vs {bound}"));
    if ok {
        let (sym, _) = rep.symmetry_sets(w, alpha)?;
        let aa = group.product_set(a, &inv);
        let square = group.product_set(&aa, &aa);
        r.witness("Sym_alpha(W)", Witness::elements(&sym));
        subset_clause(&mut r, "(A A^-1)^2 is inside Sym_alpha(W)", &square, &sym);
    }
    Ok(r.finish())
}

/// `min dim(A·W)/|A|` over nonempty `A`: over subgroups, cross-checked
/// against every subset when `|G| ≤ caps.mu_exhaustive`.
fn mu_linear(gamma: &GammaW, rep: &Representation, caps: &Caps) -> Result<Rational> {
    let group = rep.group();
    let by_subgroups = group
        .enumerate_subgroups(caps)?
        .iter()
        .map(|h| Rational::new(gamma.dim_image(bits::set_to_mask(h.members())) as i64, h.order() as i64))
        .min()
        .expect("the trivial subgroup exists");
    if group.order() <= caps.mu_exhaustive {
        let total = bits::ground_mask(group.order());
        let exhaustive = (1..=total)
            .map(|m: Mask| Rational::new(gamma.dim_image(m) as i64, m.count_ones() as i64))
            .min()
            .expect("G is nonempty");
        if exhaustive != by_subgroups {
            return Err(Error::Invariant(format!(
                "linear ratio constant: subgroups give {by_subgroups}, enumeration gives {exhaustive}"
            )));
        }
    }
    Ok(by_subgroups)
}

/// For `λ ∈ [0, μ]`, `μ = min dim(A·W)/|A|`: a subgroup `H ⊇ G_W` with
/// `dim(A·W) − λ|A| ≥ dim(H·W) − λ|H| ≥ dim W − λ|H|` for nonempty `A`.
pub fn check_hamidoune_linear(
    rep: &Arc<Representation>,
    w: &Subspace,
    lambda: Rational,
    caps: &Caps,
    seed: u64,
) -> Result<CheckReport> {
    let group = rep.group();
    let mut r = CheckReport::new(StatementId::Hamidoune, "linear");
    r.witness("W", Witness::subspace(w));
    r.witness("lambda", Witness::number(lambda));
    let gamma0 = GammaW::new(Arc::clone(rep), w.clone(), zero())?;
    let mu = mu_linear(&gamma0, rep, caps)?;
    r.witness("mu", Witness::number(mu));
    if !r.hypothesis("mu > 0", mu > zero(), format!("mu = {mu}")) {
        return Ok(r.finish());
    }
    if lambda < zero() || lambda > mu {
        return Err(Error::Domain(format!("lambda = {lambda} must lie in [0, mu] = [0, {mu}]")));
    }
    r.hypothesis("lambda in [0, mu]", true, format!("lambda = {lambda}, mu = {mu}"));
    let f = GammaW::new(Arc::clone(rep), w.clone(), lambda)?;
    let value = |m: Mask| rat(f.dim_image(m)) - lambda * rat(m.count_ones() as usize);
    let stab = rep.stabilizer(w)?;
    let exhaustive = group.order() <= caps.minimize_exhaustive;
    let (h, min): (Subgroup, Option<Rational>) = if lambda == zero() {
        let min = if exhaustive { Some(minimize_nonempty(&f, caps)?.min_value) } else { None };
        (stab.clone(), min)
    } else if exhaustive {
        let atom = atom_identity(&f, group, caps, seed)?;
        (atom.subgroup, Some(atom.result.min_value))
    } else {
        let mut best: Option<(Rational, Subgroup)> = None;
        for h in group.enumerate_subgroups(caps)? {
            let v = value(bits::set_to_mask(h.members()));
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, h));
            }
        }
        (best.expect("subgroups exist").1, None)
    };
    let hm = bits::set_to_mask(h.members());
    let gh = value(hm);
    r.witness("H", Witness::subgroup(&h));
    r.witness("G_W", Witness::subgroup(&stab));
    r.witness("H.W", Witness::subspace(&rep.act_subspace(h.members(), w)?));
    r.conclusion("G_W is inside H", stab.is_subgroup_of(&h), format!("|G_W| = {}, |H| = {}", stab.order(), h.order()));
    let floor = rat(w.dim()) - lambda * rat(h.order());
    r.conclusion("dim(H.W) - lambda|H| >= dim W - lambda|H|", gh >= floor, format!("{gh} vs {floor}"));
    match min {
        Some(m) => {
            r.checked = bits::ground_mask(group.order());
            if m < gh {
                let res = minimize_nonempty(&f, caps)?;
                r.fail_with("A", Witness::Elements(bits::mask_members(res.atoms[0])));
            }
            r.conclusion(
                "dim(A.W) - lambda|A| >= dim(H.W) - lambda|H| for every nonempty A",
                m >= gh,
                format!("minimum over all nonempty A is {m}"),
            );
        }
        None => {
            let subgroups: Vec<ElementSet> =
                group.enumerate_subgroups(caps)?.iter().map(|s| s.members().clone()).collect();
            let sweep = sweep_subsets(group.order(), 0, caps.sample_trials as u64 * 10, seed, 3, &subgroups, |a| {
                value(bits::set_to_mask(a)) >= gh
            });
            let failure = r.sweep(sweep);
            if let Some(a) = &failure {
                r.fail_with("A", Witness::elements(a));
            }
            r.conclusion(
                "dim(A.W) - lambda|A| >= dim(H.W) - lambda|H| for every nonempty A",
                failure.is_none(),
                "sampled subsets together with every subgroup",
            );
        }
    }
    Ok(r.finish())
}

/// For `dim(A·W) ≤ α|A|`: the subset `B ⊆ A` minimizing `dim(B·W)/|B|`
/// satisfies `dim(CB·W) ≤ α|CB|` for every `C`.
pub fn find_petridis_witness_linear(
    rep: &Representation,
    a: &ElementSet,
    w: &Subspace,
    alpha: Rational,
    caps: &Caps,
    seed: u64,
) -> Result<CheckReport> {
    let group = rep.group();
    let mut r = CheckReport::new(StatementId::Petridis, "linear");
    r.witness("A", Witness::elements(a));
    r.witness("W", Witness::subspace(w));
    r.witness("alpha", Witness::number(alpha));
    let na = bits::size(a);
    r.hypothesis("A nonempty", na > 0, format!("|A| = {na}"));
    r.hypothesis("alpha >= 0", alpha >= zero(), format!("alpha = {alpha}"));
    let daw = dim_of(rep, a, w)?;
    r.hypothesis("dim(A.W) <= alpha |A|", rat(daw) <= alpha * rat(na), format!("{daw} vs {}", alpha * rat(na)));
    if na == 0 {
        return Ok(r.finish());
    }
    let members = local_members(a);
    let order = group.order();
    let (mask, q) = argmin_ratio(na, caps, |m| {
        let c = lift(m, &members, order);
        (dim_of(rep, &c, w).expect("subspace matches the representation"), bits::mask_len(m))
    })?;
    let b = lift(mask, &members, order);
    r.witness("B", Witness::elements(&b));
    r.witness("ratio(B)", Witness::number(q));
    r.conclusion("dim(B.W)/|B| <= alpha", q <= alpha, format!("{q} vs {alpha}"));
    let sweep = sweep_subsets(order, caps.conclusion_exhaustive, caps.sample_trials as u64, seed, 4, &[], |c| {
        let cb = group.product_set(c, &b);
        rat(dim_of(rep, &cb, w).expect("subspace matches the representation")) <= alpha * rat(bits::size(&cb))
    });
    let failure = r.sweep(sweep);
    if let Some(c) = &failure {
        r.fail_with("C", Witness::elements(c));
    }
    r.conclusion("dim(CB.W) <= alpha |CB| for every C", failure.is_none(), format!("{} subsets C", r.checked));
    Ok(r.finish())
}

/// For Abelian `G` and `dim(A·W) ≤ α dim W`: the nonzero subspace `Z ⊆ W`
/// minimizing `dim(A·Z)/dim Z` satisfies `dim(AC·Z) ≤ α dim(C·Z)` for
/// every `C`, and `dim(Aⁿ·Z) ≤ αⁿ dim Z`.
pub fn find_taod_witness_linear(
    rep: &Representation,
    a: &ElementSet,
    w: &Subspace,
    alpha: Rational,
    power_max: usize,
    caps: &Caps,
    seed: u64,
) -> Result<CheckReport> {
    let group = rep.group();
    if !group.is_abelian() {
        return Err(Error::Domain(format!(
            "{} is not Abelian; delta_A is only translation invariant for Abelian groups",
            group.name()
        )));
    }
    let mut r = CheckReport::new(StatementId::Taod, "linear");
    r.witness("A", Witness::elements(a));
    r.witness("W", Witness::subspace(w));
    r.witness("alpha", Witness::number(alpha));
    let ok = nonempty(&mut r, &[("A", bits::size(a)), ("W", w.dim())]);
    r.hypothesis("alpha >= 0", alpha >= zero(), format!("alpha = {alpha}"));
    let (daw, dw) = dims(rep, a, w)?;
    r.hypothesis("dim(A.W) <= alpha dim W", rat(daw) <= alpha * rat(dw), format!("{daw} vs {}", alpha * rat(dw)));
    if !ok {
        return Ok(r.finish());
    }
    let subspaces = subspaces_of(w, caps)?;
    let mut best: Option<(Rational, &Subspace)> = None;
    for s in subspaces.iter().filter(|s| !s.is_zero()) {
        let q = Rational::new(dim_of(rep, a, s)? as i64, s.dim() as i64);
        if best.is_none_or(|(b, _)| q < b) {
            best = Some((q, s));
        }
    }
    let (q, z) = best.expect("W is nonzero");
    r.witness("Z", Witness::subspace(z));
    r.witness("ratio(Z)", Witness::number(q));
    r.conclusion("dim(A.Z)/dim Z <= alpha", q <= alpha, format!("{q} vs {alpha}"));
    let sweep = sweep_subsets(group.order(), caps.conclusion_exhaustive, caps.sample_trials as u64, seed, 5, &[], |c| {
        let ac = group.product_set(a, c);
        let lhs = dim_of(rep, &ac, z).expect("subspace matches the representation");
        let rhs = dim_of(rep, c, z).expect("subspace matches the representation");
        rat(lhs) <= alpha * rat(rhs)
    });
    let failure = r.sweep(sweep);
    if let Some(c) = &failure {
        r.fail_with("C", Witness::elements(c));
    }
    r.conclusion("dim(AC.Z) <= alpha dim(C.Z) for every C", failure.is_none(), format!("{} subsets C", r.checked));
    let mut power = a.clone();
    let mut alpha_n = alpha;
    let dz = rat(z.dim());
    for k in 1..=power_max {
        let d = dim_of(rep, &power, z)?;
        let ok = rat(d) <= alpha_n * dz;
        if !ok {
            r.fail_with("n", Witness::count(k));
        }
        r.conclusion(&format!("dim(A^{k}.Z) <= alpha^{k} dim Z"), ok, format!("{d} vs {}", alpha_n * dz));
        power = group.product_set(&power, a);
        alpha_n *= alpha;
    }
    Ok(r.finish())
}
