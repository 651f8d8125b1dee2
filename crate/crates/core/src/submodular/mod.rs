//! Set functions on the subsets of a finite ground set, submodularity and
//! invariance checks, exact minimization, and the ratio constant.

mod families;
mod minimize;
mod mu;

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::GroupAction;
use crate::bits::{self, Mask, MaskIter};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::rational::Rational;
use crate::sampling::{self, Exhaustiveness};

pub use families::{Combination, CutFunction, CyFunction, DaFunction, FnSetFunction, Modular, ModularShift};
pub use minimize::{atom_identity, core_set, minimize_nonempty, AtomIdentity, Core, MinimizationResult};
pub use mu::{
    cy_identity_atom, mu_by_dinkelbach, mu_by_enumeration, mu_by_subgroups, mu_ratio, InnerMinimizer, MuResult, MuRoute,
};

/// Largest ground set a [`SetFunction`] may have; subsets are `u64` masks.
pub const MAX_GROUND: usize = 64;

/// A function on the subsets of `{0, …, ground_size-1}` with exact rational
/// values, all of them integer multiples of `1 / denominator()`.
pub trait SetFunction: Send + Sync {
    fn ground_size(&self) -> usize;

    /// Positive common denominator of all values.
    fn denominator(&self) -> i64;

    /// `value(mask) · denominator()`.
    fn scaled(&self, mask: Mask) -> i64;

    fn value(&self, mask: Mask) -> Rational {
        Rational::new(self.scaled(mask), self.denominator())
    }

    fn label(&self) -> String;
}

impl<T: SetFunction + ?Sized> SetFunction for Arc<T> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn denominator(&self) -> i64 {
        (**self).denominator()
    }
    fn scaled(&self, mask: Mask) -> i64 {
        (**self).scaled(mask)
    }
    fn value(&self, mask: Mask) -> Rational {
        (**self).value(mask)
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

impl fmt::Debug for dyn SetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetFunction({}, ground {})", self.label(), self.ground_size())
    }
}

pub type DynSetFunction = Arc<dyn SetFunction>;

pub(crate) fn check_ground(n: usize) -> Result<()> {
    if n > MAX_GROUND {
        return Err(Error::capacity("set_function_ground", MAX_GROUND, n));
    }
    Ok(())
}

/// A triple `A₁ ⊆ A₂`, `s ∉ A₂` with `f(A₁+s) − f(A₁) < f(A₂+s) − f(A₂)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmodularViolation {
    pub a1: Vec<usize>,
    pub a2: Vec<usize>,
    pub s: usize,
    #[serde(with = "crate::rational::as_string")]
    pub gain_small: Rational,
    #[serde(with = "crate::rational::as_string")]
    pub gain_large: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmodularVerdict {
    pub holds: bool,
    pub exhaustiveness: Exhaustiveness,
    /// Number of `(A₁, A₂, s)` triples examined.
    pub checked: u64,
    pub counterexample: Option<SubmodularViolation>,
}

fn violation(f: &dyn SetFunction, a1: Mask, a2: Mask, s: usize) -> SubmodularViolation {
    let bit = 1u64 << s;
    SubmodularViolation {
        a1: bits::mask_members(a1),
        a2: bits::mask_members(a2),
        s,
        gain_small: f.value(a1 | bit) - f.value(a1),
        gain_large: f.value(a2 | bit) - f.value(a2),
    }
}

/// Checks diminishing marginal gains over every `A₁ ⊆ A₂`, `s ∉ A₂` when the
/// ground set is within `caps.submodular_exhaustive`, otherwise over
/// `caps.sample_trials` random triples drawn from `seed`.
pub fn check_submodular(f: &dyn SetFunction, caps: &Caps, seed: u64) -> SubmodularVerdict {
    let n = f.ground_size();
    if n <= caps.submodular_exhaustive {
        let values: Vec<i64> = (0..1u64 << n).into_par_iter().map(|m| f.scaled(m)).collect();
        let full = bits::ground_mask(n);
        let found = (0..1u64 << n).into_par_iter().find_map_first(|a2| {
            for s in MaskIter(full & !a2) {
                let bit = 1u64 << s;
                let large = values[(a2 | bit) as usize] - values[a2 as usize];
                for a1 in bits::submasks(a2) {
                    if values[(a1 | bit) as usize] - values[a1 as usize] < large {
                        return Some((a1, a2, s));
                    }
                }
            }
            None
        });
        let checked = (0..=n as u32)
            .map(|k| binomial(n as u64, k as u64) * (1u64 << k) * (n as u64 - k as u64))
            .sum();
        return SubmodularVerdict {
            holds: found.is_none(),
            exhaustiveness: Exhaustiveness::Exhaustive,
            checked,
            counterexample: found.map(|(a1, a2, s)| violation(f, a1, a2, s)),
        };
    }
    let mut rng = sampling::rng(seed, 0x5b);
    let full = bits::ground_mask(n);
    let trials = caps.sample_trials as u64;
    for _ in 0..trials {
        let mut a2 = rng.gen::<u64>() & full;
        if a2 == full {
            a2 &= !(1u64 << rng.gen_range(0..n));
        }
        let free: Vec<usize> = MaskIter(full & !a2).collect();
        let s = free[rng.gen_range(0..free.len())];
        let a1 = a2 & rng.gen::<u64>();
        let bit = 1u64 << s;
        if f.scaled(a1 | bit) - f.scaled(a1) < f.scaled(a2 | bit) - f.scaled(a2) {
            return SubmodularVerdict {
                holds: false,
                exhaustiveness: Exhaustiveness::Sampled { trials, seed },
                checked: trials,
                counterexample: Some(violation(f, a1, a2, s)),
            };
        }
    }
    SubmodularVerdict {
        holds: true,
        exhaustiveness: Exhaustiveness::Sampled { trials, seed },
        checked: trials,
        counterexample: None,
    }
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// How `G` moves the ground set of a set function.
#[derive(Clone, Copy, Debug)]
pub enum GroundSymmetry<'a> {
    /// Ground set `X`, moved by the action.
    Points(&'a GroupAction),
    /// Ground set `G`, moved by left translation `A ↦ gA`.
    Translation(&'a FiniteGroup),
}

impl GroundSymmetry<'_> {
    pub fn group_order(&self) -> usize {
        match self {
            GroundSymmetry::Points(a) => a.group().order(),
            GroundSymmetry::Translation(g) => g.order(),
        }
    }

    pub fn ground_size(&self) -> usize {
        match self {
            GroundSymmetry::Points(a) => a.domain_size(),
            GroundSymmetry::Translation(g) => g.order(),
        }
    }

    /// `perm[i]` is the image of ground point `i` under element `g`.
    pub fn permutation(&self, g: usize) -> Vec<usize> {
        match self {
            GroundSymmetry::Points(a) => (0..a.domain_size()).map(|x| a.act(g, x)).collect(),
            GroundSymmetry::Translation(grp) => (0..grp.order()).map(|x| grp.mul(g, x)).collect(),
        }
    }

    pub fn image(&self, g: usize, mask: Mask) -> Mask {
        match self {
            GroundSymmetry::Points(a) => bits::mask_of(MaskIter(mask).map(|x| a.act(g, x))),
            GroundSymmetry::Translation(grp) => bits::mask_of(MaskIter(mask).map(|x| grp.mul(g, x))),
        }
    }
}

/// A pair `(g, S)` with `f(g·S) ≠ f(S)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvarianceViolation {
    pub element: usize,
    pub set: Vec<usize>,
    pub image: Vec<usize>,
    #[serde(with = "crate::rational::as_string")]
    pub value: Rational,
    #[serde(with = "crate::rational::as_string")]
    pub image_value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvarianceVerdict {
    pub holds: bool,
    pub exhaustiveness: Exhaustiveness,
    pub checked: u64,
    pub counterexample: Option<InvarianceViolation>,
}

/// Exhaustive budget for invariance: `|G| · 2^n` evaluations.
const INVARIANCE_EXHAUSTIVE: u64 = 1 << 22;

/// Checks `f(g·S) = f(S)` for every `g` and every subset `S` when
/// `|G|·2^n ≤ 2^22`, otherwise for every `g` against sampled subsets.
pub fn check_invariance(f: &dyn SetFunction, sym: GroundSymmetry<'_>, caps: &Caps, seed: u64) -> Result<InvarianceVerdict> {
    let n = f.ground_size();
    if sym.ground_size() != n {
        return Err(Error::Structural(format!(
            "function has ground size {n}, symmetry acts on {} points",
            sym.ground_size()
        )));
    }
    let order = sym.group_order();
    let exhaustive = n < 63 && (order as u64).saturating_mul(1u64 << n) <= INVARIANCE_EXHAUSTIVE;
    let full = bits::ground_mask(n);
    let masks: Vec<Mask> = if exhaustive {
        (0..=full).collect()
    } else {
        let mut rng = sampling::rng(seed, 0x1a);
        (0..caps.sample_trials).map(|_| rng.gen::<u64>() & full).collect()
    };
    let found = (0..order).into_par_iter().find_map_first(|g| {
        let perm = sym.permutation(g);
        masks.iter().find_map(|&m| {
            let img = bits::mask_of(MaskIter(m).map(|x| perm[x]));
            (f.scaled(img) != f.scaled(m)).then_some((g, m, img))
        })
    });
    let exhaustiveness = if exhaustive {
        Exhaustiveness::Exhaustive
    } else {
        Exhaustiveness::Sampled { trials: masks.len() as u64, seed }
    };
    Ok(InvarianceVerdict {
        holds: found.is_none(),
        exhaustiveness,
        checked: order as u64 * masks.len() as u64,
        counterexample: found.map(|(g, m, img)| InvarianceViolation {
            element: g,
            set: bits::mask_members(m),
            image: bits::mask_members(img),
            value: f.value(m),
            image_value: f.value(img),
        }),
    })
}

/// `λf + μg` for `λ, μ ≥ 0`.
pub fn combine(f: DynSetFunction, g: DynSetFunction, lambda: Rational, mu: Rational) -> Result<Combination> {
    Combination::new(f, g, lambda, mu)
}

/// `f − λu` for a modular `u`, which is verified on all subsets when the ground
/// set is small and on sampled subsets otherwise.
pub fn subtract_modular(f: DynSetFunction, u: DynSetFunction, lambda: Rational, caps: &Caps, seed: u64) -> Result<ModularShift> {
    ModularShift::new(f, u, lambda, caps, seed)
}
