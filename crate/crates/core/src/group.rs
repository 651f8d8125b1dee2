//! Finite permutation groups, enumerated in full.
//!
//! A group is built by breadth-first closure of its generators. Element `0`
//! is always the identity and element indices follow the closure order, so
//! the same generator list always yields the same indexing.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bits::{self, ElementSet};
use crate::caps::Caps;
use crate::error::{Error, Result};

/// A bijection of `{0, …, degree-1}`, stored as its image list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(images: Vec<usize>) -> Result<Self> {
        Permutation::new(images)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.images
    }
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::Structural(format!(
                    "image list {images:?} is not a bijection of 0..{n}"
                )));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(degree: usize) -> Self {
        Permutation { images: (0..degree).collect() }
    }

    /// Builds a permutation from disjoint cycles on 0-based points.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                if x >= degree {
                    return Err(Error::Structural(format!("point {x} outside degree {degree}")));
                }
                if touched[x] {
                    return Err(Error::Structural(format!("point {x} repeated in cycles")));
                }
                touched[x] = true;
                images[x] = cycle[(i + 1) % cycle.len()];
            }
        }
        Permutation::new(images)
    }

    /// Parses cycle notation on 0-based points, e.g. `"(0 1)(2 3 4)"`.
    /// The empty string and `"()"` denote the identity.
    pub fn parse_cycles(degree: usize, text: &str) -> Result<Self> {
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let open = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("expected `(` in `{text}`")))?;
            let close = open
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unclosed cycle in `{text}`")))?;
            let body = &open[..close];
            let cycle = body
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().map_err(|_| Error::Parse(format!("bad point `{s}` in `{text}`"))))
                .collect::<Result<Vec<_>>>()?;
            cycles.push(cycle);
            rest = open[close + 1..].trim_start();
        }
        let refs: Vec<&[usize]> = cycles.iter().map(|c| c.as_slice()).collect();
        Permutation::from_cycles(degree, &refs)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `self ∘ other`: the map `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::Structural(format!(
                "cannot compose permutations of degree {} and {}",
                self.degree(),
                other.degree()
            )));
        }
        Ok(self.compose_unchecked(other))
    }

    fn compose_unchecked(&self, other: &Permutation) -> Permutation {
        Permutation { images: other.images.iter().map(|&x| self.images[x]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.degree()];
        for (x, &y) in self.images.iter().enumerate() {
            inv[y] = x;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Nontrivial cycles in canonical order (each starting at its least point).
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let body: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            write!(f, "({})", body.join(" "))?;
        }
        Ok(())
    }
}

/// A finite group of permutations with indexed elements.
pub struct FiniteGroup {
    name: String,
    degree: usize,
    elements: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
    generators: Vec<Permutation>,
    /// BFS tree: element `v` was first reached as `parent · generators[gen]`.
    parent: Vec<Option<(usize, usize)>>,
    mul_table: Option<Vec<u32>>,
    inv_table: Vec<usize>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("name", &self.name)
            .field("degree", &self.degree)
            .field("order", &self.order())
            .finish()
    }
}

pub const IDENTITY: usize = 0;

impl FiniteGroup {
    /// Closure of `generators` under composition with the default caps.
    pub fn from_generators(degree: usize, generators: Vec<Permutation>) -> Result<Arc<Self>> {
        Self::closure(format!("<{} generators on {degree} points>", generators.len()), degree, generators, &Caps::default())
    }

    /// Breadth-first closure. Each dequeued element is multiplied on the right
    /// by every generator, in input order.
    pub fn closure(name: String, degree: usize, generators: Vec<Permutation>, caps: &Caps) -> Result<Arc<Self>> {
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::Structural(format!(
                    "generator {g} has degree {}, expected {degree}",
                    g.degree()
                )));
            }
        }
        let identity = Permutation::identity(degree);
        let mut elements = vec![identity.clone()];
        let mut index = HashMap::from([(identity, 0usize)]);
        let mut parent = vec![None];
        let mut queue = VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for (gi, g) in generators.iter().enumerate() {
                let v = elements[u].compose_unchecked(g);
                if index.contains_key(&v) {
                    continue;
                }
                if elements.len() >= caps.group_order {
                    return Err(Error::capacity("group_order", caps.group_order, elements.len() + 1));
                }
                index.insert(v.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(v);
                parent.push(Some((u, gi)));
            }
        }
        let n = elements.len();
        let inv_table: Vec<usize> = elements.iter().map(|p| index[&p.inverse()]).collect();
        let mul_table = (n <= caps.mul_table_order).then(|| {
            let mut t = vec![0u32; n * n];
            for a in 0..n {
                for b in 0..n {
                    t[a * n + b] = index[&elements[a].compose_unchecked(&elements[b])] as u32;
                }
            }
            t
        });
        Ok(Arc::new(FiniteGroup {
            name,
            degree,
            elements,
            index,
            generators,
            parent,
            mul_table,
            inv_table,
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Number of points the elements permute.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn element(&self, i: usize) -> &Permutation {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// `(parent, generator position)` through which element `i` was reached.
    pub fn bfs_parent(&self, i: usize) -> Option<(usize, usize)> {
        self.parent[i]
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Looks up an element given in 0-based cycle notation.
    pub fn element_from_cycles(&self, text: &str) -> Result<usize> {
        let p = Permutation::parse_cycles(self.degree, text)?;
        self.index_of(&p)
            .ok_or_else(|| Error::Domain(format!("{p} is not an element of {}", self.name)))
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.mul_table {
            Some(t) => t[a * self.order() + b] as usize,
            None => self.index[&self.elements[a].compose_unchecked(&self.elements[b])],
        }
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv_table[a]
    }

    pub fn has_mul_table(&self) -> bool {
        self.mul_table.is_some()
    }

    pub fn is_abelian(&self) -> bool {
        // Generators commuting pairwise suffices.
        let gens: Vec<usize> = self.generators.iter().map(|g| self.index[g]).collect();
        gens.iter().all(|&a| gens.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn empty_set(&self) -> ElementSet {
        ElementSet::with_capacity(self.order())
    }

    pub fn full_set(&self) -> ElementSet {
        bits::full_set(self.order())
    }

    pub fn set_of(&self, members: impl IntoIterator<Item = usize>) -> ElementSet {
        bits::set_of(self.order(), members)
    }

    /// `{a⁻¹ : a ∈ A}`.
    pub fn inverse_set(&self, a: &ElementSet) -> ElementSet {
        self.set_of(a.ones().map(|x| self.inv(x)))
    }

    /// `{ab : a ∈ A, b ∈ B}`.
    pub fn product_set(&self, a: &ElementSet, b: &ElementSet) -> ElementSet {
        let bs: Vec<usize> = b.ones().collect();
        let mut out = self.empty_set();
        for x in a.ones() {
            for &y in &bs {
                out.insert(self.mul(x, y));
            }
        }
        out
    }

    /// `{x·g : x ∈ A}`.
    pub fn right_translate(&self, a: &ElementSet, g: usize) -> ElementSet {
        self.set_of(a.ones().map(|x| self.mul(x, g)))
    }

    /// `{g·x : x ∈ A}`.
    pub fn left_translate(&self, g: usize, a: &ElementSet) -> ElementSet {
        self.set_of(a.ones().map(|x| self.mul(g, x)))
    }

    /// Whether every element of `a` commutes with every element of `b`.
    pub fn sets_commute(&self, a: &ElementSet, b: &ElementSet) -> bool {
        a.ones().all(|x| b.ones().all(|y| self.mul(x, y) == self.mul(y, x)))
    }

    /// Smallest subgroup containing `s`; the trivial subgroup when `s` is empty.
    pub fn generated_subgroup(self: &Arc<Self>, s: &ElementSet) -> Subgroup {
        let gens: Vec<usize> = s.ones().collect();
        Subgroup { group: Arc::clone(self), members: self.close(&gens) }
    }

    fn close(&self, gens: &[usize]) -> ElementSet {
        let mut members = self.set_of([IDENTITY]);
        let mut queue = VecDeque::from([IDENTITY]);
        while let Some(u) = queue.pop_front() {
            for &g in gens {
                let v = self.mul(u, g);
                if !members.contains(v) {
                    members.insert(v);
                    queue.push_back(v);
                }
            }
        }
        members
    }

    pub fn trivial_subgroup(self: &Arc<Self>) -> Subgroup {
        Subgroup { group: Arc::clone(self), members: self.set_of([IDENTITY]) }
    }

    pub fn whole(self: &Arc<Self>) -> Subgroup {
        Subgroup { group: Arc::clone(self), members: self.full_set() }
    }

    /// Every subgroup exactly once, by ascending order and then by
    /// lexicographic member list.
    pub fn enumerate_subgroups(self: &Arc<Self>, caps: &Caps) -> Result<Vec<Subgroup>> {
        if self.order() > caps.subgroup_enumeration {
            return Err(Error::capacity("subgroup_enumeration", caps.subgroup_enumeration, self.order()));
        }
        // Every subgroup K is reached from the trivial one by adjoining its
        // elements one at a time, each step staying inside K.
        let mut seen: HashSet<ElementSet> = HashSet::new();
        let mut found: Vec<(ElementSet, Vec<usize>)> = Vec::new();
        let trivial = self.set_of([IDENTITY]);
        seen.insert(trivial.clone());
        found.push((trivial, Vec::new()));
        let mut cursor = 0;
        while cursor < found.len() {
            let (members, gens) = found[cursor].clone();
            cursor += 1;
            for g in 0..self.order() {
                if members.contains(g) {
                    continue;
                }
                let mut next_gens = gens.clone();
                next_gens.push(g);
                let next = self.close(&next_gens);
                if seen.insert(next.clone()) {
                    found.push((next, next_gens));
                }
            }
        }
        let mut subgroups: Vec<Subgroup> = found
            .into_iter()
            .map(|(members, _)| Subgroup { group: Arc::clone(self), members })
            .collect();
        subgroups.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.members.ones().cmp(b.members.ones())));
        Ok(subgroups)
    }

    /// Partition into left cosets `gH`, each labelled by its least element.
    pub fn left_cosets(self: &Arc<Self>, h: &Subgroup) -> Result<CosetDecomposition> {
        if !Arc::ptr_eq(self, &h.group) {
            return Err(Error::Structural("subgroup belongs to a different group".into()));
        }
        Subgroup::new(Arc::clone(self), h.members.clone())?;
        let n = self.order();
        let mut coset_of = vec![usize::MAX; n];
        let mut representatives = Vec::new();
        for g in 0..n {
            if coset_of[g] != usize::MAX {
                continue;
            }
            let c = representatives.len();
            representatives.push(g);
            for x in h.members.ones() {
                coset_of[self.mul(g, x)] = c;
            }
        }
        Ok(CosetDecomposition { subgroup: h.clone(), representatives, coset_of })
    }
}

/// A subgroup of a [`FiniteGroup`], verified closed at construction.
#[derive(Clone)]
pub struct Subgroup {
    group: Arc<FiniteGroup>,
    members: ElementSet,
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup{:?}", self.elements())
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.group, &other.group) && self.members == other.members
    }
}

impl Eq for Subgroup {}

impl Subgroup {
    /// Checks identity, product closure and inverse closure exhaustively.
    pub fn new(group: Arc<FiniteGroup>, members: ElementSet) -> Result<Self> {
        if !is_subgroup(&group, &members) {
            return Err(Error::Invariant(format!(
                "{:?} is not a subgroup of {}",
                bits::members(&members),
                group.name()
            )));
        }
        Ok(Subgroup { group, members })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn order(&self) -> usize {
        bits::size(&self.members)
    }

    pub fn contains(&self, g: usize) -> bool {
        self.members.contains(g)
    }

    pub fn members(&self) -> &ElementSet {
        &self.members
    }

    pub fn elements(&self) -> Vec<usize> {
        self.members.ones().collect()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn index(&self) -> usize {
        self.group.order() / self.order()
    }
}

/// Whether `members` contains the identity and is closed under products and
/// inverses.
pub fn is_subgroup(group: &FiniteGroup, members: &ElementSet) -> bool {
    if !members.contains(IDENTITY) {
        return false;
    }
    let list: Vec<usize> = members.ones().collect();
    list.iter().all(|&a| members.contains(group.inv(a)))
        && list.iter().all(|&a| list.iter().all(|&b| members.contains(group.mul(a, b))))
}

/// Left cosets of a subgroup.
#[derive(Clone, Debug)]
pub struct CosetDecomposition {
    pub subgroup: Subgroup,
    /// Least element of each coset, ascending.
    pub representatives: Vec<usize>,
    /// Coset index of each group element.
    pub coset_of: Vec<usize>,
}

impl CosetDecomposition {
    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn cosets(&self) -> Vec<ElementSet> {
        let group = self.subgroup.group();
        self.representatives
            .iter()
            .map(|&g| group.left_translate(g, self.subgroup.members()))
            .collect()
    }

    /// Representative of the coset containing `g`.
    pub fn representative(&self, g: usize) -> usize {
        self.representatives[self.coset_of[g]]
    }
}

pub fn symmetric(n: usize) -> Result<Arc<FiniteGroup>> {
    symmetric_with(n, &Caps::default())
}

/// The symmetric group on `n` points, generated by `(0 1)` and `(0 1 … n-1)`.
pub fn symmetric_with(n: usize, caps: &Caps) -> Result<Arc<FiniteGroup>> {
    if n == 0 {
        return Err(Error::Domain("symmetric group needs at least one point".into()));
    }
    let mut gens = Vec::new();
    if n >= 2 {
        gens.push(Permutation::from_cycles(n, &[&[0, 1]])?);
    }
    if n >= 3 {
        let cycle: Vec<usize> = (0..n).collect();
        gens.push(Permutation::from_cycles(n, &[&cycle])?);
    }
    if gens.is_empty() {
        gens.push(Permutation::identity(n));
    }
    FiniteGroup::closure(format!("S{n}"), n, gens, caps)
}

/// The cyclic group of order `n` acting on `n` points by rotation.
pub fn cyclic(n: usize) -> Result<Arc<FiniteGroup>> {
    if n == 0 {
        return Err(Error::Domain("cyclic group needs n >= 1".into()));
    }
    let cycle: Vec<usize> = (0..n).collect();
    let gen = if n == 1 { Permutation::identity(1) } else { Permutation::from_cycles(n, &[&cycle])? };
    FiniteGroup::closure(format!("C{n}"), n, vec![gen], &Caps::default())
}

/// The dihedral group of order `2n` acting on the vertices of an `n`-gon.
pub fn dihedral(n: usize) -> Result<Arc<FiniteGroup>> {
    if n < 3 {
        return Err(Error::Domain(format!("dihedral group of an {n}-gon needs n >= 3")));
    }
    let rotation = Permutation::new((0..n).map(|i| (i + 1) % n).collect())?;
    let reflection = Permutation::new((0..n).map(|i| (n - i) % n).collect())?;
    FiniteGroup::closure(format!("D{n}"), n, vec![rotation, reflection], &Caps::default())
}

pub(crate) fn is_small_prime(p: usize) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// The permutation `x ↦ ax + b` of `F_p`.
pub fn affine_map(p: usize, a: usize, b: usize) -> Result<Permutation> {
    if !is_small_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    if a.is_multiple_of(p) {
        return Err(Error::Domain("affine map needs a nonzero slope".into()));
    }
    Permutation::new((0..p).map(|x| (a * x + b) % p).collect())
}

/// The affine group `{x ↦ ax + b}` of the line over `F_p`, as permutations of
/// the `p` field elements.
pub fn affine_gl1(p: usize) -> Result<Arc<FiniteGroup>> {
    if !is_small_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    let root = primitive_root(p);
    let gens = vec![affine_map(p, root, 0)?, affine_map(p, 1, 1)?];
    FiniteGroup::closure(format!("AGL1(F{p})"), p, gens, &Caps::default())
}

fn primitive_root(p: usize) -> usize {
    (1..p)
        .find(|&r| {
            let mut x = 1;
            (1..p).all(|k| {
                x = x * r % p;
                x != 1 || k == p - 1
            })
        })
        .unwrap_or(1)
}

/// `G × H` acting on the disjoint union of their point sets.
pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> Result<Arc<FiniteGroup>> {
    let (m, k) = (g.degree(), h.degree());
    let mut gens = Vec::new();
    for a in g.generators() {
        let mut images: Vec<usize> = a.images().to_vec();
        images.extend(m..m + k);
        gens.push(Permutation::new(images)?);
    }
    for b in h.generators() {
        let mut images: Vec<usize> = (0..m).collect();
        images.extend(b.images().iter().map(|&x| x + m));
        gens.push(Permutation::new(images)?);
    }
    if gens.is_empty() {
        gens.push(Permutation::identity(m + k));
    }
    FiniteGroup::closure(format!("{}x{}", g.name(), h.name()), m + k, gens, &Caps::default())
}
