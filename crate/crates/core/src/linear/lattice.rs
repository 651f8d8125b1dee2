use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::{enumerate_subspaces, Representation, Subspace};
use crate::bits::{self, ElementSet};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// A function on the subspaces of `F_p^d`.
pub trait LatticeFunction: Send + Sync {
    fn p(&self) -> u32;
    fn ambient_dim(&self) -> usize;
    fn value(&self, w: &Subspace) -> Rational;
    fn label(&self) -> String;
}

/// `W ↦ dim W`.
pub struct DimFunction {
    pub p: u32,
    pub d: usize,
}

impl LatticeFunction for DimFunction {
    fn p(&self) -> u32 {
        self.p
    }
    fn ambient_dim(&self) -> usize {
        self.d
    }
    fn value(&self, w: &Subspace) -> Rational {
        Rational::from_integer(w.dim() as i64)
    }
    fn label(&self) -> String {
        "dim".into()
    }
}

/// `Y ↦ dim(A·Y) − λ dim Y` on the subspace lattice.
pub struct DeltaA {
    rep: Arc<Representation>,
    a: ElementSet,
    lambda: Rational,
}

impl DeltaA {
    pub fn new(rep: Arc<Representation>, a: ElementSet, lambda: Rational) -> Result<Self> {
        if bits::size(&a) == 0 {
            return Err(Error::Domain("delta_A needs a nonempty A".into()));
        }
        if lambda < Rational::from_integer(0) {
            return Err(Error::Domain(format!("lambda = {lambda} must be nonnegative")));
        }
        Ok(DeltaA { rep, a, lambda })
    }

    pub fn a(&self) -> &ElementSet {
        &self.a
    }

    pub fn representation(&self) -> &Arc<Representation> {
        &self.rep
    }
}

impl LatticeFunction for DeltaA {
    fn p(&self) -> u32 {
        self.rep.p()
    }
    fn ambient_dim(&self) -> usize {
        self.rep.dim()
    }
    fn value(&self, w: &Subspace) -> Rational {
        let image = self.rep.act_subspace(&self.a, w).expect("subspace checked against the representation");
        Rational::from_integer(image.dim() as i64) - self.lambda * Rational::from_integer(w.dim() as i64)
    }
    fn label(&self) -> String {
        format!("delta_A(lambda = {})", self.lambda)
    }
}

/// Minimum over nonzero subspaces with fragments and atoms (fragments of
/// least dimension).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeMinimizationResult {
    #[serde(with = "crate::rational::as_string")]
    pub min_value: Rational,
    pub fragment_count: u64,
    pub fragments: Vec<Subspace>,
    pub fragments_truncated: bool,
    pub atoms: Vec<Subspace>,
    pub atom_dim: usize,
}

impl LatticeMinimizationResult {
    /// Whether distinct atoms meet only in `{0}`.
    pub fn atoms_pairwise_trivial(&self) -> bool {
        self.atoms.iter().enumerate().all(|(i, a)| {
            self.atoms[i + 1..]
                .iter()
                .all(|b| a.intersection(b).map(|s| s.is_zero()).unwrap_or(false))
        })
    }
}

/// Minimizes over the nonzero members of `candidates`, kept in the given
/// order.
pub fn minimize_over(f: &dyn LatticeFunction, candidates: &[Subspace], caps: &Caps) -> Result<LatticeMinimizationResult> {
    let nonzero: Vec<&Subspace> = candidates.iter().filter(|s| !s.is_zero()).collect();
    if nonzero.is_empty() {
        return Err(Error::Domain("no nonzero subspace to minimize over".into()));
    }
    let values: Vec<Rational> = nonzero.par_iter().map(|s| f.value(s)).collect();
    let min = *values.iter().min().expect("nonempty");
    let frags: Vec<&Subspace> = nonzero
        .iter()
        .zip(&values)
        .filter(|(_, v)| **v == min)
        .map(|(s, _)| *s)
        .collect();
    let atom_dim = frags.iter().map(|s| s.dim()).min().expect("a minimizer exists");
    Ok(LatticeMinimizationResult {
        min_value: min,
        fragment_count: frags.len() as u64,
        fragments_truncated: frags.len() > caps.fragment_list,
        atoms: frags.iter().filter(|s| s.dim() == atom_dim).map(|s| (*s).clone()).collect(),
        fragments: frags.iter().take(caps.fragment_list).map(|s| (*s).clone()).collect(),
        atom_dim,
    })
}

/// Minimizes over all nonzero subspaces of `F_p^d`.
pub fn minimize_on_lattice(f: &dyn LatticeFunction, caps: &Caps) -> Result<LatticeMinimizationResult> {
    let all = enumerate_subspaces(f.p(), f.ambient_dim(), caps)?;
    minimize_over(f, &all, caps)
}

/// Every subspace of `y`, in canonical order.
pub fn subspaces_of(y: &Subspace, caps: &Caps) -> Result<Vec<Subspace>> {
    let coords = enumerate_subspaces(y.p(), y.dim(), caps)?;
    let p = y.p();
    let mut out = coords
        .iter()
        .map(|c| {
            let vectors: Vec<Vec<u32>> = c
                .basis()
                .iter()
                .map(|row| {
                    (0..y.ambient_dim())
                        .map(|j| row.iter().zip(y.basis()).fold(0, |acc, (&ci, b)| (acc + ci * b[j]) % p))
                        .collect()
                })
                .collect();
            Subspace::span(p, y.ambient_dim(), &vectors)
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort();
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeSubmodularVerdict {
    pub holds: bool,
    pub pairs_checked: u64,
    pub counterexample: Option<(Subspace, Subspace)>,
}

/// Checks `f(U ∩ W) + f(U + W) ≤ f(U) + f(W)` over all pairs from a list
/// closed under sum and intersection.
pub fn check_lattice_submodular(f: &dyn LatticeFunction, subspaces: &[Subspace]) -> Result<LatticeSubmodularVerdict> {
    let values: HashMap<&Subspace, Rational> = subspaces.par_iter().map(|s| (s, f.value(s))).collect();
    let lookup = |s: &Subspace| -> Result<Rational> {
        values
            .get(s)
            .copied()
            .ok_or_else(|| Error::Domain(format!("subspace list is not closed: missing {s:?}")))
    };
    let mut checked = 0;
    for (i, u) in subspaces.iter().enumerate() {
        for w in &subspaces[i..] {
            checked += 1;
            let lhs = lookup(&u.intersection(w)?)? + lookup(&u.sum(w)?)?;
            if lhs > values[u] + values[w] {
                return Ok(LatticeSubmodularVerdict {
                    holds: false,
                    pairs_checked: checked,
                    counterexample: Some((u.clone(), w.clone())),
                });
            }
        }
    }
    Ok(LatticeSubmodularVerdict { holds: true, pairs_checked: checked, counterexample: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dim_atoms_are_lines() {
        let f = DimFunction { p: 2, d: 3 };
        let r = minimize_on_lattice(&f, &Caps::default()).unwrap();
        assert_eq!(r.min_value, Rational::from_integer(1));
        assert_eq!(r.atoms.len(), 7);
        assert_eq!(r.atom_dim, 1);
        assert!(r.atoms_pairwise_trivial());
    }

    #[test]
    fn delta_on_swap() {
        let rep = Arc::new(Representation::swap(3).unwrap());
        let g = rep.group().clone();
        let f = DeltaA::new(rep.clone(), g.full_set(), Rational::new(1, 2)).unwrap();
        let r = minimize_on_lattice(&f, &Caps::default()).unwrap();
        assert!(r.atoms_pairwise_trivial());
        // Both invariant lines have value 1/2; moved lines have value 3/2.
        assert_eq!(r.min_value, Rational::new(1, 2));
        assert_eq!(r.atoms.len(), 2);
        let all = enumerate_subspaces(3, 2, &Caps::default()).unwrap();
        assert!(check_lattice_submodular(&f, &all).unwrap().holds);
        let id = DeltaA::new(rep, g.set_of([0]), Rational::from_integer(1)).unwrap();
        assert_eq!(id.value(&Subspace::whole(3, 2).unwrap()), Rational::from_integer(0));
    }

    #[test]
    fn subspaces_of_a_plane() {
        let y = Subspace::span(2, 3, &[vec![1, 0, 0], vec![0, 1, 1]]).unwrap();
        let subs = subspaces_of(&y, &Caps::default()).unwrap();
        assert_eq!(subs.len(), 5);
        assert!(subs.iter().all(|s| s.is_subspace_of(&y)));
    }
}
