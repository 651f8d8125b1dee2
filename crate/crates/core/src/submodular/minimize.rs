use std::sync::Arc;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::{check_invariance, check_submodular, GroundSymmetry, SetFunction};
use crate::bits::{self, Mask};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Subgroup};
use crate::rational::Rational;

fn masks_as_lists<S: Serializer>(masks: &[Mask], s: S) -> std::result::Result<S::Ok, S::Error> {
    let lists: Vec<Vec<usize>> = masks.iter().map(|&m| bits::mask_members(m)).collect();
    lists.serialize(s)
}

fn mask_as_list<S: Serializer>(mask: &Mask, s: S) -> std::result::Result<S::Ok, S::Error> {
    bits::mask_members(*mask).serialize(s)
}

/// Minimum of a set function over nonempty subsets, with its fragments
/// (minimizers) and atoms (minimizers of least cardinality).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimizationResult {
    pub ground_size: usize,
    #[serde(with = "crate::rational::as_string")]
    pub min_value: Rational,
    /// Exact number of fragments, even when the list is truncated.
    pub fragment_count: u64,
    /// Fragments in ascending mask order, at most `caps.fragment_list`.
    #[serde(serialize_with = "masks_as_lists")]
    pub fragments: Vec<Mask>,
    pub fragments_truncated: bool,
    /// Every atom, in ascending mask order.
    #[serde(serialize_with = "masks_as_lists")]
    pub atoms: Vec<Mask>,
    pub atom_size: usize,
}

impl MinimizationResult {
    /// Whether any two atoms are equal or disjoint.
    pub fn atoms_pairwise_disjoint(&self) -> bool {
        self.atoms
            .iter()
            .enumerate()
            .all(|(i, &a)| self.atoms[i + 1..].iter().all(|&b| a & b == 0))
    }

    /// Union of the atoms.
    pub fn atom_union(&self) -> Mask {
        self.atoms.iter().fold(0, |acc, &a| acc | a)
    }
}

struct Acc {
    min: i64,
    count: u64,
    list: Vec<Mask>,
    truncated: bool,
    atom_size: u32,
    atoms: Vec<Mask>,
}

impl Acc {
    fn empty() -> Self {
        Acc { min: i64::MAX, count: 0, list: Vec::new(), truncated: false, atom_size: u32::MAX, atoms: Vec::new() }
    }

    fn push(&mut self, m: Mask, v: i64, cap: usize) {
        if v > self.min {
            return;
        }
        if v < self.min {
            *self = Acc::empty();
            self.min = v;
        }
        self.count += 1;
        if self.list.len() < cap {
            self.list.push(m);
        } else {
            self.truncated = true;
        }
        let c = m.count_ones();
        if c < self.atom_size {
            self.atom_size = c;
            self.atoms.clear();
        }
        if c == self.atom_size {
            self.atoms.push(m);
        }
    }

    /// Merges a later chunk into an earlier one.
    fn merge(mut self, later: Acc, cap: usize) -> Acc {
        if later.min < self.min {
            return later;
        }
        if later.min > self.min {
            return self;
        }
        self.count += later.count;
        self.truncated |= later.truncated;
        for m in later.list {
            if self.list.len() < cap {
                self.list.push(m);
            } else {
                self.truncated = true;
            }
        }
        if later.atom_size < self.atom_size {
            self.atom_size = later.atom_size;
            self.atoms = later.atoms;
        } else if later.atom_size == self.atom_size {
            self.atoms.extend(later.atoms);
        }
        self
    }
}

const CHUNK_BITS: u32 = 16;

/// Minimizes `f` over all nonempty subsets by enumeration in ascending mask
/// order.
pub fn minimize_nonempty(f: &dyn SetFunction, caps: &Caps) -> Result<MinimizationResult> {
    let n = f.ground_size();
    if n == 0 {
        return Err(Error::Domain("the empty ground set has no nonempty subsets".into()));
    }
    if n > caps.minimize_exhaustive {
        return Err(Error::capacity("minimize_exhaustive", caps.minimize_exhaustive, n));
    }
    let full = bits::ground_mask(n);
    let cap = caps.fragment_list;
    let chunk = 1u64 << CHUNK_BITS.min(n as u32);
    let chunks = (full >> CHUNK_BITS.min(n as u32)) + 1;
    let partial: Vec<Acc> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Acc::empty();
            let start = (c * chunk).max(1);
            let end = ((c + 1) * chunk - 1).min(full);
            for m in start..=end {
                acc.push(m, f.scaled(m), cap);
            }
            acc
        })
        .collect();
    let acc = partial.into_iter().fold(Acc::empty(), |a, b| a.merge(b, cap));
    Ok(MinimizationResult {
        ground_size: n,
        min_value: Rational::new(acc.min, f.denominator()),
        fragment_count: acc.count,
        fragments: acc.list,
        fragments_truncated: acc.truncated,
        atoms: acc.atoms,
        atom_size: acc.atom_size as usize,
    })
}

/// The union of all atoms of a `G`-invariant function.
#[derive(Clone, Debug, Serialize)]
pub struct Core {
    #[serde(serialize_with = "mask_as_list")]
    pub points: Mask,
    pub result: MinimizationResult,
}

/// Computes the core after checking that `f` is invariant under `sym`.
pub fn core_set(f: &dyn SetFunction, sym: GroundSymmetry<'_>, caps: &Caps, seed: u64) -> Result<Core> {
    let inv = check_invariance(f, sym, caps, seed)?;
    if let Some(c) = inv.counterexample {
        return Err(Error::Domain(format!(
            "{} is not invariant: element {} moves {:?} to {:?} with values {} and {}",
            f.label(),
            c.element,
            c.set,
            c.image,
            c.value,
            c.image_value
        )));
    }
    let result = minimize_nonempty(f, caps)?;
    let points = result.atom_union();
    for g in 0..sym.group_order() {
        if sym.image(g, points) != points {
            return Err(Error::Invariant(format!("core {:?} is not stable under element {g}", bits::mask_members(points))));
        }
    }
    Ok(Core { points, result })
}

/// The atom through the identity of a `G`-invariant submodular function on
/// the subsets of `G`, with the left cosets it induces.
#[derive(Clone, Debug)]
pub struct AtomIdentity {
    pub subgroup: Subgroup,
    pub result: MinimizationResult,
    /// Left cosets of `subgroup`, in ascending mask order.
    pub cosets: Vec<Mask>,
}

/// Finds the atom containing the identity, verifies it is a subgroup and that
/// the atoms are exactly its left cosets.
pub fn atom_identity(f: &dyn SetFunction, group: &Arc<FiniteGroup>, caps: &Caps, seed: u64) -> Result<AtomIdentity> {
    if f.ground_size() != group.order() {
        return Err(Error::Structural(format!(
            "function has ground size {}, group has order {}",
            f.ground_size(),
            group.order()
        )));
    }
    let inv = check_invariance(f, GroundSymmetry::Translation(group), caps, seed)?;
    if let Some(c) = inv.counterexample {
        return Err(Error::Domain(format!(
            "{} is not invariant under translation by element {}: {:?}",
            f.label(),
            c.element,
            c.set
        )));
    }
    let sub = check_submodular(f, caps, seed);
    if let Some(c) = sub.counterexample {
        return Err(Error::Domain(format!(
            "{} is not submodular: A1 = {:?}, A2 = {:?}, s = {}",
            f.label(),
            c.a1,
            c.a2,
            c.s
        )));
    }
    let result = minimize_nonempty(f, caps)?;
    let h = result
        .atoms
        .iter()
        .copied()
        .find(|&a| a & 1 == 1)
        .ok_or_else(|| Error::Invariant("no atom contains the identity".into()))?;
    let subgroup = Subgroup::new(Arc::clone(group), bits::mask_to_set(h, group.order()))?;
    let mut cosets: Vec<Mask> = group
        .left_cosets(&subgroup)?
        .cosets()
        .iter()
        .map(bits::set_to_mask)
        .collect();
    cosets.sort_unstable();
    if cosets != result.atoms {
        return Err(Error::Invariant(format!(
            "atoms {:?} are not the left cosets of {:?}",
            result.atoms.iter().map(|&m| bits::mask_members(m)).collect::<Vec<_>>(),
            subgroup.elements()
        )));
    }
    Ok(AtomIdentity { subgroup, result, cosets })
}
