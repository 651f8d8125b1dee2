//! Left actions of finite groups on finite sets.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bits::{self, ElementSet, PointSet};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Subgroup, IDENTITY};
use crate::rational::{ratio, Rational};

/// How an action was constructed; carried for labelling only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    Natural,
    LeftTranslation,
    Conjugation,
    Coset,
    Product,
    DisjointUnion,
    Trivial,
    Table,
}

/// A verified action `G × X → X` with `X = {0, …, domain_size-1}`.
#[derive(Clone)]
pub struct GroupAction {
    group: Arc<FiniteGroup>,
    domain_size: usize,
    table: Vec<u32>,
    kind: ActionKind,
}

impl fmt::Debug for GroupAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupAction")
            .field("group", &self.group.name())
            .field("domain_size", &self.domain_size)
            .field("kind", &self.kind)
            .finish()
    }
}

/// Serialized form `{group, domain_size, table}`; `table[g][x] = g·x`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ActionTable {
    pub group: String,
    pub domain_size: usize,
    pub table: Vec<Vec<usize>>,
}

impl GroupAction {
    /// Builds an action from `rows[g][x] = g·x` and verifies the action laws.
    pub fn from_rows(group: Arc<FiniteGroup>, domain_size: usize, rows: Vec<Vec<usize>>, caps: &Caps) -> Result<Self> {
        if rows.len() != group.order() {
            return Err(Error::Structural(format!(
                "action table has {} rows for a group of order {}",
                rows.len(),
                group.order()
            )));
        }
        Self::build(group, domain_size, ActionKind::Table, caps, |g, x| rows[g].get(x).copied())
    }

    fn build(
        group: Arc<FiniteGroup>,
        domain_size: usize,
        kind: ActionKind,
        caps: &Caps,
        f: impl Fn(usize, usize) -> Option<usize>,
    ) -> Result<Self> {
        if domain_size == 0 {
            return Err(Error::Domain("an action needs a nonempty set".into()));
        }
        let cells = group.order().saturating_mul(domain_size);
        if cells > caps.action_table {
            return Err(Error::capacity("action_table", caps.action_table, cells));
        }
        let mut table = Vec::with_capacity(cells);
        for g in 0..group.order() {
            for x in 0..domain_size {
                match f(g, x) {
                    Some(y) if y < domain_size => table.push(y as u32),
                    _ => {
                        return Err(Error::Structural(format!(
                            "image of point {x} under element {g} is missing or outside 0..{domain_size}"
                        )))
                    }
                }
            }
        }
        let action = GroupAction { group, domain_size, table, kind };
        action.verify()?;
        Ok(action)
    }

    /// Identity law, bijective rows, and compatibility with the group law.
    ///
    /// Compatibility is checked for all pairs when cheap; otherwise only
    /// against generators, which suffices because every element is a product
    /// of generators.
    fn verify(&self) -> Result<()> {
        let n = self.domain_size;
        let g_count = self.group.order();
        if (0..n).any(|x| self.act(IDENTITY, x) != x) {
            return Err(Error::Invariant("identity does not act trivially".into()));
        }
        for g in 0..g_count {
            let mut seen = vec![false; n];
            for x in 0..n {
                let y = self.act(g, x);
                if seen[y] {
                    return Err(Error::Invariant(format!("element {g} does not act bijectively")));
                }
                seen[y] = true;
            }
        }
        let right: Vec<usize> = if g_count * g_count * n <= 4_000_000 {
            (0..g_count).collect()
        } else {
            self.group
                .generators()
                .iter()
                .filter_map(|p| self.group.index_of(p))
                .collect()
        };
        for g in 0..g_count {
            for &h in &right {
                let gh = self.group.mul(g, h);
                if (0..n).any(|x| self.act(gh, x) != self.act(g, self.act(h, x))) {
                    return Err(Error::Invariant(format!(
                        "(gh)·x != g·(h·x) for g = {}, h = {}",
                        self.group.element(g),
                        self.group.element(h)
                    )));
                }
            }
        }
        Ok(())
    }

    /// The permutation action on `{0, …, degree-1}`.
    pub fn natural(group: Arc<FiniteGroup>) -> Result<Self> {
        Self::natural_with(group, &Caps::default())
    }

    pub fn natural_with(group: Arc<FiniteGroup>, caps: &Caps) -> Result<Self> {
        let n = group.degree();
        let g2 = Arc::clone(&group);
        Self::build(group, n, ActionKind::Natural, caps, move |g, x| Some(g2.element(g).apply(x)))
    }

    /// `g·x = gx` on the elements of `G`.
    pub fn left_translation(group: Arc<FiniteGroup>) -> Result<Self> {
        let n = group.order();
        let g2 = Arc::clone(&group);
        Self::build(group, n, ActionKind::LeftTranslation, &Caps::default(), move |g, x| Some(g2.mul(g, x)))
    }

    /// `g·x = gxg⁻¹` on the elements of `G`.
    pub fn conjugation(group: Arc<FiniteGroup>) -> Result<Self> {
        let n = group.order();
        let g2 = Arc::clone(&group);
        Self::build(group, n, ActionKind::Conjugation, &Caps::default(), move |g, x| {
            Some(g2.mul(g2.mul(g, x), g2.inv(g)))
        })
    }

    /// Action on the left cosets `G/H`, cosets numbered as in
    /// [`FiniteGroup::left_cosets`].
    pub fn coset_action(group: Arc<FiniteGroup>, h: &Subgroup) -> Result<Self> {
        let dec = group.left_cosets(h)?;
        let g2 = Arc::clone(&group);
        Self::build(group, dec.len(), ActionKind::Coset, &Caps::default(), move |g, c| {
            Some(dec.coset_of[g2.mul(g, dec.representatives[c])])
        })
    }

    /// Every element fixes every point.
    pub fn trivial(group: Arc<FiniteGroup>, domain_size: usize) -> Result<Self> {
        Self::build(group, domain_size, ActionKind::Trivial, &Caps::default(), |_, x| Some(x))
    }

    /// Diagonal action on `X × X'`; the pair `(x, x')` is point `x·|X'| + x'`.
    pub fn product(a: &GroupAction, b: &GroupAction) -> Result<Self> {
        same_group(a, b)?;
        let m = b.domain_size;
        Self::build(Arc::clone(&a.group), a.domain_size * m, ActionKind::Product, &Caps::default(), |g, p| {
            Some(a.act(g, p / m) * m + b.act(g, p % m))
        })
    }

    /// Action on `X ⊔ X'`, with the points of `X'` shifted by `|X|`.
    pub fn disjoint_union(a: &GroupAction, b: &GroupAction) -> Result<Self> {
        same_group(a, b)?;
        let m = a.domain_size;
        Self::build(Arc::clone(&a.group), m + b.domain_size, ActionKind::DisjointUnion, &Caps::default(), |g, p| {
            Some(if p < m { a.act(g, p) } else { m + b.act(g, p - m) })
        })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn kind(&self) -> &ActionKind {
        &self.kind
    }

    #[inline]
    pub fn act(&self, g: usize, x: usize) -> usize {
        self.table[g * self.domain_size + x] as usize
    }

    pub fn to_table(&self) -> ActionTable {
        ActionTable {
            group: self.group.name().to_string(),
            domain_size: self.domain_size,
            table: (0..self.group.order())
                .map(|g| (0..self.domain_size).map(|x| self.act(g, x)).collect())
                .collect(),
        }
    }

    pub fn point_set(&self, members: impl IntoIterator<Item = usize>) -> PointSet {
        bits::set_of(self.domain_size, members)
    }

    pub fn all_points(&self) -> PointSet {
        bits::full_set(self.domain_size)
    }

    /// `g·Y`.
    pub fn act_element_on_set(&self, g: usize, y: &PointSet) -> PointSet {
        self.point_set(y.ones().map(|x| self.act(g, x)))
    }

    /// `A·Y = {a·y : a ∈ A, y ∈ Y}`.
    pub fn act_set(&self, a: &ElementSet, y: &PointSet) -> PointSet {
        let ys: Vec<usize> = y.ones().collect();
        let mut out = PointSet::with_capacity(self.domain_size);
        for g in a.ones() {
            for &x in &ys {
                out.insert(self.act(g, x));
            }
        }
        out
    }

    /// `|A·Y|`.
    pub fn act_size(&self, a: &ElementSet, y: &PointSet) -> usize {
        bits::size(&self.act_set(a, y))
    }

    pub fn orbit(&self, x: usize) -> PointSet {
        self.point_set((0..self.group.order()).map(|g| self.act(g, x)))
    }

    /// Orbits listed by their least point.
    pub fn orbit_decomposition(&self) -> OrbitDecomposition {
        let mut orbit_of = vec![usize::MAX; self.domain_size];
        let mut representatives = Vec::new();
        let mut orbits = Vec::new();
        for x in 0..self.domain_size {
            if orbit_of[x] != usize::MAX {
                continue;
            }
            let o = self.orbit(x);
            for y in o.ones() {
                orbit_of[y] = orbits.len();
            }
            representatives.push(x);
            orbits.push(o);
        }
        OrbitDecomposition { representatives, orbit_of, orbits }
    }

    pub fn point_stabilizer(&self, x: usize) -> Subgroup {
        let members = self.group.set_of((0..self.group.order()).filter(|&g| self.act(g, x) == x));
        Subgroup::new(Arc::clone(&self.group), members).expect("point stabilizers are subgroups")
    }

    /// `G_Y = {g : g·Y = Y}`, by scanning `G`.
    pub fn set_stabilizer(&self, y: &PointSet) -> Subgroup {
        let members = self
            .group
            .set_of((0..self.group.order()).filter(|&g| y.ones().all(|x| y.contains(self.act(g, x)))));
        Subgroup::new(Arc::clone(&self.group), members).expect("set stabilizers of finite sets are subgroups")
    }

    fn overlap(&self, g: usize, y: &PointSet) -> usize {
        y.ones().filter(|&x| y.contains(self.act(g, x))).count()
    }

    /// `Sym_α(Y) = {g : |g·Y ∩ Y| ≥ α|Y|}`.
    pub fn symmetry_set(&self, y: &PointSet, alpha: Rational) -> Result<ElementSet> {
        let size = bits::size(y);
        if size == 0 {
            return Err(Error::Domain("symmetry set of the empty set".into()));
        }
        if alpha < Rational::from_integer(0) || alpha > Rational::from_integer(1) {
            return Err(Error::Domain(format!("alpha = {alpha} outside [0, 1]")));
        }
        let threshold = alpha * Rational::from_integer(size as i64);
        Ok(self
            .group
            .set_of((0..self.group.order()).filter(|&g| Rational::from_integer(self.overlap(g, y) as i64) >= threshold)))
    }

    /// `Γ_Y = {g : g·Y ∩ Y ≠ ∅}`.
    pub fn weak_stabilizer(&self, y: &PointSet) -> Result<ElementSet> {
        if bits::size(y) == 0 {
            return Err(Error::Domain("weak stabilizer of the empty set".into()));
        }
        Ok(self.group.set_of((0..self.group.order()).filter(|&g| self.overlap(g, y) > 0)))
    }

    /// Distinct values of `|g·Y ∩ Y| / |Y|` over `g ∈ G`, ascending.
    pub fn overlap_ratios(&self, y: &PointSet) -> Vec<Rational> {
        let size = bits::size(y).max(1);
        let mut out: Vec<Rational> = (0..self.group.order()).map(|g| ratio(self.overlap(g, y), size)).collect();
        out.sort();
        out.dedup();
        out
    }

    /// The sandwich `Σ|AB_i|/|G_{x_i}| ≤ |A·Y| ≤ Σ|AB_i|` obtained by lifting
    /// each orbit's share of `Y` into `G` along coset representatives.
    pub fn orbit_reduction_bounds(&self, a: &ElementSet, y: &PointSet) -> Result<OrbitBounds> {
        if bits::size(a) == 0 || bits::size(y) == 0 {
            return Err(Error::Domain("orbit reduction needs nonempty A and Y".into()));
        }
        let orbits = self.orbit_decomposition();
        let mut terms = Vec::new();
        let mut lower = Rational::from_integer(0);
        let mut upper = 0;
        let mut exact = 0;
        for (i, &xi) in orbits.representatives.iter().enumerate() {
            let yi: Vec<usize> = y.ones().filter(|&x| orbits.orbit_of[x] == i).collect();
            if yi.is_empty() {
                continue;
            }
            let stab = self.point_stabilizer(xi);
            let cosets = self.group.left_cosets(&stab)?;
            // g[i]: the coset representative sending x_i to each point of Y_i.
            let b = self.group.set_of(
                cosets
                    .representatives
                    .iter()
                    .copied()
                    .filter(|&g| yi.contains(&self.act(g, xi))),
            );
            let ab = self.group.product_set(a, &b);
            let ab_size = bits::size(&ab);
            let mut hit: Vec<usize> = ab.ones().map(|g| cosets.coset_of[g]).collect();
            hit.sort_unstable();
            hit.dedup();
            let stabilizer_order = stab.order();
            lower += ratio(ab_size, stabilizer_order);
            upper += ab_size;
            exact += hit.len();
            terms.push(OrbitTerm {
                representative: xi,
                y_share: yi.len(),
                b_size: bits::size(&b),
                ab_size,
                cosets_hit: hit.len(),
                stabilizer_order,
            });
        }
        let measured = self.act_size(a, y);
        if measured != exact {
            return Err(Error::Invariant(format!(
                "orbit decomposition gives |A·Y| = {exact}, direct evaluation gives {measured}"
            )));
        }
        Ok(OrbitBounds { lower, exact, upper, terms })
    }

    pub fn profile(&self) -> ActionProfile {
        let n = self.domain_size;
        let g_count = self.group.order();
        let faithful = (1..g_count).all(|g| (0..n).any(|x| self.act(g, x) != x));
        let free = (1..g_count).all(|g| (0..n).all(|x| self.act(g, x) != x));
        let transitive = bits::size(&self.orbit(0)) == n;
        ActionProfile { faithful, free, transitive }
    }
}

fn same_group(a: &GroupAction, b: &GroupAction) -> Result<()> {
    if Arc::ptr_eq(&a.group, &b.group) {
        Ok(())
    } else {
        Err(Error::Structural("actions belong to different groups".into()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitDecomposition {
    /// Least point of each orbit, ascending.
    pub representatives: Vec<usize>,
    pub orbit_of: Vec<usize>,
    pub orbits: Vec<PointSet>,
}

impl OrbitDecomposition {
    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionProfile {
    pub faithful: bool,
    pub free: bool,
    pub transitive: bool,
}

/// One orbit's contribution to [`OrbitBounds`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitTerm {
    pub representative: usize,
    /// `|Y ∩ O_i|`.
    pub y_share: usize,
    pub b_size: usize,
    /// `|AB_i|` in the group.
    pub ab_size: usize,
    /// Number of cosets of `G_{x_i}` met by `AB_i`, which is `|A·(Y ∩ O_i)|`.
    pub cosets_hit: usize,
    pub stabilizer_order: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitBounds {
    #[serde(with = "crate::rational::as_string")]
    pub lower: Rational,
    pub exact: usize,
    pub upper: usize,
    pub terms: Vec<OrbitTerm>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{affine_gl1, affine_map, cyclic, symmetric, Permutation};

    fn s(n: usize) -> GroupAction {
        GroupAction::natural(symmetric(n).unwrap()).unwrap()
    }

    fn el(a: &GroupAction, cycles: &str) -> usize {
        a.group().element_from_cycles(cycles).unwrap()
    }

    #[test]
    fn act_set_examples() {
        let s4 = s(4);
        let g = s4.group().clone();
        let y = s4.point_set([0]);
        assert_eq!(s4.act_set(&g.set_of([IDENTITY]), &y), y);
        let a = g.set_of([IDENTITY, el(&s4, "(0 1)")]);
        assert_eq!(s4.act_set(&a, &y), s4.point_set([0, 1]));
    }

    #[test]
    fn affine_line_example() {
        // Points 1, 2 with maps x ↦ x and x ↦ 5x + 3 over F_7.
        let g = affine_gl1(7).unwrap();
        let act = GroupAction::natural(g.clone()).unwrap();
        let a = g.set_of([IDENTITY, g.index_of(&affine_map(7, 5, 3).unwrap()).unwrap()]);
        let y = act.point_set([1, 2]);
        let ay = act.act_set(&a, &y);
        assert_eq!(bits::members(&ay), vec![1, 2, 6]);
        // x ↦ 2x + 4 cycles 1 → 6 → 2 → 1, so the stabilizer is not trivial.
        let stab = act.set_stabilizer(&ay);
        assert_eq!(stab.order(), 3);
        assert!(stab.contains(g.index_of(&affine_map(7, 2, 4).unwrap()).unwrap()));
    }

    #[test]
    fn orbits() {
        let g = FiniteGroup::from_generators(3, vec![Permutation::parse_cycles(3, "(0 1)").unwrap()]).unwrap();
        let act = GroupAction::natural(g).unwrap();
        let dec = act.orbit_decomposition();
        assert_eq!(dec.orbits.iter().map(bits::members).collect::<Vec<_>>(), vec![vec![0, 1], vec![2]]);
        assert_eq!(s(4).orbit_decomposition().len(), 1);
        let triv = GroupAction::trivial(symmetric(1).unwrap(), 5).unwrap();
        assert_eq!(triv.orbit_decomposition().len(), 5);
    }

    #[test]
    fn stabilizers() {
        let s3 = s(3);
        let y = s3.point_set([0, 1]);
        assert_eq!(s3.set_stabilizer(&y).elements(), vec![IDENTITY, el(&s3, "(0 1)")]);
        assert_eq!(s3.set_stabilizer(&s3.all_points()).order(), 6);
        assert_eq!(s(4).point_stabilizer(3).order(), 6);
    }

    #[test]
    fn symmetry_sets() {
        let s3 = s(3);
        let y = s3.point_set([0, 1]);
        assert_eq!(s3.symmetry_set(&y, Rational::from_integer(0)).unwrap(), s3.group().full_set());
        assert_eq!(
            s3.symmetry_set(&y, Rational::from_integer(1)).unwrap(),
            *s3.set_stabilizer(&y).members()
        );
        let half = s3.symmetry_set(&y, Rational::new(1, 2)).unwrap();
        let brute: Vec<usize> = (0..6).filter(|&g| bits::size(&(&s3.act_element_on_set(g, &y) & &y)) >= 1).collect();
        assert_eq!(bits::members(&half), brute);
        assert!(matches!(s3.symmetry_set(&s3.point_set([]), Rational::new(1, 2)), Err(Error::Domain(_))));
    }

    #[test]
    fn weak_stabilizers() {
        let c3 = cyclic(3).unwrap();
        let act = GroupAction::natural(c3).unwrap();
        assert_eq!(bits::members(&act.weak_stabilizer(&act.point_set([0])).unwrap()), vec![IDENTITY]);
        let s3 = s(3);
        assert_eq!(s3.weak_stabilizer(&s3.all_points()).unwrap(), s3.group().full_set());

        let g = symmetric(3).unwrap();
        let lt = GroupAction::left_translation(g.clone()).unwrap();
        let a = g.set_of([IDENTITY, 1, 3]);
        let gamma = lt.weak_stabilizer(&lt.point_set(a.ones())).unwrap();
        assert_eq!(gamma, g.product_set(&a, &g.inverse_set(&a)));
    }

    #[test]
    fn orbit_bounds_sandwich() {
        let s3 = s(3);
        let a = s3.group().set_of([IDENTITY, el(&s3, "(0 1)")]);
        let y = s3.point_set([0, 2]);
        let b = s3.orbit_reduction_bounds(&a, &y).unwrap();
        assert_eq!(b.exact, 3);
        assert!(b.lower <= Rational::from_integer(3) && 3 <= b.upper);

        let lt = GroupAction::left_translation(s3.group().clone()).unwrap();
        let y = lt.point_set([0, 2, 5]);
        let b = lt.orbit_reduction_bounds(&a, &y).unwrap();
        assert_eq!(b.exact, b.upper);
        assert_eq!(b.terms.len(), 1);
    }

    #[test]
    fn profiles() {
        let g = symmetric(3).unwrap();
        let lt = GroupAction::left_translation(g.clone()).unwrap().profile();
        assert_eq!(lt, ActionProfile { faithful: true, free: true, transitive: true });
        let nat = s(3).profile();
        assert_eq!(nat, ActionProfile { faithful: true, free: false, transitive: true });
        let triv = GroupAction::trivial(g, 2).unwrap().profile();
        assert!(!triv.faithful && !triv.transitive);
    }

    #[test]
    fn coset_and_conjugation_actions() {
        let g = symmetric(3).unwrap();
        let r = g.element_from_cycles("(0 1 2)").unwrap();
        let h = g.generated_subgroup(&g.set_of([r]));
        let ca = GroupAction::coset_action(g.clone(), &h).unwrap();
        assert_eq!(ca.domain_size(), 2);
        assert!(ca.profile().transitive);
        let conj = GroupAction::conjugation(g.clone()).unwrap();
        assert_eq!(conj.orbit_decomposition().len(), 3);
    }

    #[test]
    fn bad_tables_are_rejected() {
        let g = cyclic(2).unwrap();
        let caps = Caps::default();
        assert!(GroupAction::from_rows(g.clone(), 2, vec![vec![0, 1], vec![0, 0]], &caps).is_err());
        assert!(GroupAction::from_rows(g.clone(), 2, vec![vec![1, 0], vec![1, 0]], &caps).is_err());
        assert!(GroupAction::from_rows(g.clone(), 2, vec![vec![0, 1]], &caps).is_err());
        assert!(GroupAction::from_rows(g, 2, vec![vec![0, 1], vec![1, 0]], &caps).is_ok());
    }

    #[test]
    fn product_actions() {
        let g = symmetric(3).unwrap();
        let nat = GroupAction::natural(g).unwrap();
        let p = GroupAction::product(&nat, &nat).unwrap();
        assert_eq!(p.domain_size(), 9);
        assert_eq!(p.orbit_decomposition().len(), 2);
        let u = GroupAction::disjoint_union(&nat, &nat).unwrap();
        assert_eq!(u.orbit_decomposition().len(), 2);
    }
}
