//! The ratio constant `μ = min |A·Y| / |A|` over nonempty `A ⊆ G`.
//!
//! Three independent routes are provided. Minimizing over subgroups is enough
//! because at `λ = μ` the atom through the identity of `c_Y` is a subgroup
//! attaining the minimum ratio. Dinkelbach iteration only needs an inner
//! minimizer of `c_Y`. Plain enumeration of all nonempty `A` is the reference
//! whenever `|G|` is small enough.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{atom_identity, CyFunction};
use crate::action::GroupAction;
use crate::bits::{self, ElementSet, Mask, PointSet, UnionCounter};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::Subgroup;
use crate::rational::{ratio, Rational};

/// How a minimum of `c_Y` was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerMinimizer {
    /// Over the sets `M(T) = {g : g·Y ⊆ T}` for `T ⊆ G·Y`.
    ImageSets,
    /// Over every nonempty subset of `G`.
    Exhaustive,
    /// Over the subgroups of `G`.
    Subgroups,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuRoute {
    pub route: String,
    #[serde(with = "crate::rational::as_string")]
    pub mu: Rational,
    pub witness: Vec<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct MuResult {
    #[serde(with = "crate::rational::as_string")]
    pub mu: Rational,
    /// Smallest subgroup attaining `μ`, ties broken by member list.
    #[serde(serialize_with = "subgroup_members")]
    pub witness: Subgroup,
    /// Whether the witness is a union of left `G_Y`-cosets.
    pub witness_is_stabilizer_coset_union: bool,
    pub routes: Vec<MuRoute>,
}

fn subgroup_members<S: serde::Serializer>(h: &Subgroup, s: S) -> std::result::Result<S::Ok, S::Error> {
    h.elements().serialize(s)
}

fn nonempty(y: &PointSet) -> Result<()> {
    if bits::size(y) == 0 {
        return Err(Error::Domain("the ratio constant needs a nonempty Y".into()));
    }
    Ok(())
}

/// `min |H·Y| / |H|` over all subgroups `H`.
pub fn mu_by_subgroups(action: &GroupAction, y: &PointSet, caps: &Caps) -> Result<(Rational, Subgroup)> {
    nonempty(y)?;
    let mut best: Option<(Rational, Subgroup)> = None;
    for h in action.group().enumerate_subgroups(caps)? {
        let r = ratio(action.act_size(h.members(), y), h.order());
        if best.as_ref().is_none_or(|(b, _)| r < *b) {
            best = Some((r, h));
        }
    }
    Ok(best.expect("the trivial subgroup is always listed"))
}

/// `min |A·Y| / |A|` over every nonempty `A ⊆ G`; ties go to the smallest
/// mask.
pub fn mu_by_enumeration(action: &GroupAction, y: &PointSet, caps: &Caps) -> Result<(Rational, ElementSet)> {
    nonempty(y)?;
    let order = action.group().order();
    if order > caps.mu_exhaustive {
        return Err(Error::capacity("mu_exhaustive", caps.mu_exhaustive, order));
    }
    let counter = UnionCounter::new((0..order).map(|g| action.act_element_on_set(g, y)).collect());
    let (mut num, mut den, mut arg) = (usize::MAX, 1usize, 0u64);
    for m in 1..=bits::ground_mask(order) {
        let c = counter.count(m);
        let k = m.count_ones() as usize;
        if c * den < num.saturating_mul(k) {
            (num, den, arg) = (c, k, m);
        }
    }
    Ok((ratio(num, den), bits::mask_to_set(arg, order)))
}

/// Minimizes `|A·Y| − λ|A|` over nonempty `A ⊆ G`.
struct CyMinimizer<'a> {
    action: &'a GroupAction,
    y: &'a PointSet,
    method: InnerMinimizer,
    /// For image-set search: distinct masks `g·Y` inside `G·Y` with the
    /// elements producing each.
    images: Vec<(Mask, Vec<usize>)>,
    orbit_points: usize,
    subgroups: Vec<Subgroup>,
}

impl<'a> CyMinimizer<'a> {
    fn new(action: &'a GroupAction, y: &'a PointSet, caps: &Caps) -> Result<Self> {
        let group = action.group();
        let gy = action.act_set(&group.full_set(), y);
        let points: Vec<usize> = gy.ones().collect();
        let mut me = CyMinimizer {
            action,
            y,
            method: InnerMinimizer::Subgroups,
            images: Vec::new(),
            orbit_points: points.len(),
            subgroups: Vec::new(),
        };
        if points.len() <= caps.image_enumeration.min(30) {
            let mut slot = vec![0usize; action.domain_size()];
            for (i, &p) in points.iter().enumerate() {
                slot[p] = i;
            }
            let mut images: Vec<(Mask, Vec<usize>)> = Vec::new();
            for g in 0..group.order() {
                let m = bits::mask_of(action.act_element_on_set(g, y).ones().map(|p| slot[p]));
                match images.iter_mut().find(|(im, _)| *im == m) {
                    Some((_, els)) => els.push(g),
                    None => images.push((m, vec![g])),
                }
            }
            me.images = images;
            me.method = InnerMinimizer::ImageSets;
        } else if group.order() <= caps.minimize_exhaustive {
            me.method = InnerMinimizer::Exhaustive;
        } else {
            me.subgroups = group.enumerate_subgroups(caps)?;
        }
        Ok(me)
    }

    /// Returns the minimum scaled by `λ`'s denominator and a minimizer.
    fn minimize(&self, lambda: Rational, caps: &Caps) -> Result<(Rational, ElementSet)> {
        let group = self.action.group();
        let (p, q) = (*lambda.numer(), *lambda.denom());
        match self.method {
            InnerMinimizer::ImageSets => {
                // The largest A with A·Y ⊆ T is M(T); it also has the least value.
                let mut best: Option<(i64, Mask)> = None;
                for t in 1..=bits::ground_mask(self.orbit_points) {
                    let (mut union, mut size) = (0u64, 0i64);
                    for (m, els) in &self.images {
                        if m & !t == 0 {
                            union |= m;
                            size += els.len() as i64;
                        }
                    }
                    if size == 0 || union != t {
                        continue;
                    }
                    let v = q * union.count_ones() as i64 - p * size;
                    if best.is_none_or(|(b, _)| v < b) {
                        best = Some((v, t));
                    }
                }
                let (v, t) = best.expect("G·Y itself is an image set");
                let members = self
                    .images
                    .iter()
                    .filter(|(m, _)| m & !t == 0)
                    .flat_map(|(_, els)| els.iter().copied());
                Ok((Rational::new(v, q), group.set_of(members)))
            }
            InnerMinimizer::Exhaustive => {
                let f = CyFunction::new(Arc::new(self.action.clone()), self.y.clone(), lambda)?;
                let r = super::minimize_nonempty(&f, caps)?;
                Ok((r.min_value, bits::mask_to_set(r.fragments[0], group.order())))
            }
            InnerMinimizer::Subgroups => {
                let mut best: Option<(Rational, &Subgroup)> = None;
                for h in &self.subgroups {
                    let v = Rational::from_integer(self.action.act_size(h.members(), self.y) as i64)
                        - lambda * Rational::from_integer(h.order() as i64);
                    if best.is_none_or(|(b, _)| v < b) {
                        best = Some((v, h));
                    }
                }
                let (v, h) = best.expect("subgroup list is nonempty");
                Ok((v, h.members().clone()))
            }
        }
    }
}

/// Dinkelbach iteration from `λ = |G·Y|/|G|`: replace `λ` by the ratio of a
/// minimizer of `c_Y` until the minimum reaches zero. Returns `μ`, a set
/// attaining it, the iteration count and the inner method used.
pub fn mu_by_dinkelbach(
    action: &GroupAction,
    y: &PointSet,
    caps: &Caps,
) -> Result<(Rational, ElementSet, usize, InnerMinimizer)> {
    nonempty(y)?;
    let group = action.group();
    let inner = CyMinimizer::new(action, y, caps)?;
    let mut witness = group.full_set();
    let mut lambda = ratio(action.act_size(&witness, y), group.order());
    let mut iterations = 0;
    loop {
        iterations += 1;
        let (v, a) = inner.minimize(lambda, caps)?;
        if v >= Rational::from_integer(0) {
            return Ok((lambda, witness, iterations, inner.method));
        }
        let next = ratio(action.act_size(&a, y), bits::size(&a));
        if next >= lambda {
            return Err(Error::Invariant(format!(
                "Dinkelbach step did not decrease: {lambda} -> {next}"
            )));
        }
        lambda = next;
        witness = a;
    }
}

/// `μ` by every feasible route, checked for exact agreement. Enumeration is
/// the reference when `|G| ≤ caps.mu_exhaustive`.
pub fn mu_ratio(action: &GroupAction, y: &PointSet, caps: &Caps) -> Result<MuResult> {
    nonempty(y)?;
    let (sub_mu, sub_h) = mu_by_subgroups(action, y, caps)?;
    let (dk_mu, dk_w, iterations, method) = mu_by_dinkelbach(action, y, caps)?;
    let mut routes = vec![
        MuRoute {
            route: "subgroups".into(),
            mu: sub_mu,
            witness: sub_h.elements(),
            detail: format!("minimum over {} subgroups", action.group().enumerate_subgroups(caps)?.len()),
        },
        MuRoute {
            route: "dinkelbach".into(),
            mu: dk_mu,
            witness: bits::members(&dk_w),
            detail: format!("{iterations} iterations, inner minimizer {method:?}"),
        },
    ];
    if action.group().order() <= caps.mu_exhaustive {
        let (ex_mu, ex_w) = mu_by_enumeration(action, y, caps)?;
        routes.push(MuRoute {
            route: "enumeration".into(),
            mu: ex_mu,
            witness: bits::members(&ex_w),
            detail: format!("all {} nonempty subsets", (1u64 << action.group().order()) - 1),
        });
    }
    let mu = routes.last().map(|r| r.mu).unwrap_or(sub_mu);
    if routes.iter().any(|r| r.mu != mu) {
        let listed: Vec<String> = routes.iter().map(|r| format!("{} = {}", r.route, r.mu)).collect();
        return Err(Error::Invariant(format!("ratio constant routes disagree: {}", listed.join(", "))));
    }
    let stab = action.set_stabilizer(y);
    let witness_is_stabilizer_coset_union = action
        .group()
        .product_set(sub_h.members(), stab.members())
        == *sub_h.members();
    Ok(MuResult { mu, witness: sub_h, witness_is_stabilizer_coset_union, routes })
}

/// The atom through the identity of `c_Y` at `λ`, with the minimum value.
///
/// Uses exhaustive minimization when `|G| ≤ caps.minimize_exhaustive`.
/// Otherwise it takes the smallest subgroup attaining the minimum of `c_Y`
/// over subgroups, which is the identity atom since that atom is a subgroup
/// and a fragment.
pub fn cy_identity_atom(
    action: &Arc<GroupAction>,
    y: &PointSet,
    lambda: Rational,
    caps: &Caps,
    seed: u64,
) -> Result<(Subgroup, Rational, InnerMinimizer)> {
    let group = action.group();
    if group.order() <= caps.minimize_exhaustive {
        let f = CyFunction::new(Arc::clone(action), y.clone(), lambda)?;
        let atom = atom_identity(&f, group, caps, seed)?;
        return Ok((atom.subgroup, atom.result.min_value, InnerMinimizer::Exhaustive));
    }
    let mut best: Option<(Rational, Subgroup)> = None;
    for h in group.enumerate_subgroups(caps)? {
        let v = Rational::from_integer(action.act_size(h.members(), y) as i64)
            - lambda * Rational::from_integer(h.order() as i64);
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, h));
        }
    }
    let (v, h) = best.expect("subgroup list is nonempty");
    Ok((h, v, InnerMinimizer::Subgroups))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic, dihedral, symmetric};

    fn natural(n: usize) -> GroupAction {
        GroupAction::natural(symmetric(n).unwrap()).unwrap()
    }

    #[test]
    fn symmetric_natural_values() {
        for k in 1..=3 {
            let a = natural(4);
            let y = a.point_set(0..k);
            let r = mu_ratio(&a, &y, &Caps::default()).unwrap();
            assert_eq!(r.mu, Rational::new(1, 6));
            assert!(r.witness_is_stabilizer_coset_union);
        }
        let a = natural(3);
        let r = mu_ratio(&a, &a.point_set([0]), &Caps::default()).unwrap();
        assert_eq!(r.mu, Rational::new(1, 2));
        assert_eq!(r.routes.len(), 3);
    }

    #[test]
    fn free_action_at_least_one() {
        let g = dihedral(5).unwrap();
        let a = GroupAction::left_translation(g).unwrap();
        let r = mu_ratio(&a, &a.point_set([0, 3]), &Caps::default()).unwrap();
        assert!(r.mu >= Rational::from_integer(1));
    }

    #[test]
    fn central_conjugation() {
        let g = dihedral(4).unwrap();
        let a = GroupAction::conjugation(g.clone()).unwrap();
        let center: Vec<usize> = (0..g.order()).filter(|&z| (0..g.order()).all(|h| g.mul(z, h) == g.mul(h, z))).collect();
        assert_eq!(center.len(), 2);
        let r = mu_ratio(&a, &a.point_set(center), &Caps::default()).unwrap();
        assert_eq!(r.mu, Rational::new(2, 8));
    }

    #[test]
    fn inner_minimizers_agree() {
        let a = GroupAction::natural(cyclic(6).unwrap()).unwrap();
        let y = a.point_set([0, 2]);
        let base = mu_by_dinkelbach(&a, &y, &Caps::default()).unwrap();
        assert_eq!(base.3, InnerMinimizer::ImageSets);
        let exhaustive = Caps { image_enumeration: 1, ..Caps::default() };
        let ex = mu_by_dinkelbach(&a, &y, &exhaustive).unwrap();
        assert_eq!(ex.3, InnerMinimizer::Exhaustive);
        let sub = Caps { image_enumeration: 1, minimize_exhaustive: 2, ..Caps::default() };
        let su = mu_by_dinkelbach(&a, &y, &sub).unwrap();
        assert_eq!(su.3, InnerMinimizer::Subgroups);
        assert_eq!(base.0, ex.0);
        assert_eq!(base.0, su.0);
        assert_eq!(base.0, mu_by_enumeration(&a, &y, &Caps::default()).unwrap().0);
    }

    #[test]
    fn empty_y_is_refused() {
        let a = natural(3);
        assert!(matches!(mu_ratio(&a, &a.point_set([]), &Caps::default()), Err(Error::Domain(_))));
    }
}
