//! Instance checkers for the structural statements about product sets under
//! group actions. Each checker evaluates hypotheses and conclusions on one
//! instance and records the witnesses the statement promises.

mod atoms;
mod growth;
mod linear;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{self, ElementSet, Mask, PointSet};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::Subgroup;
use crate::linear::Subspace;
use crate::rational::Rational;
use crate::sampling::{self, Exhaustiveness};

pub use atoms::{
    check_fragment_bounds, check_hamidoune, check_tao_small_doubling, find_petridis_witness, find_taod_witness,
    tao_doubling_scan, DoublingScan,
};
pub use growth::{
    check_freiman, check_freiman_remarks, check_murphy, check_ruzsa_triple, check_small_growth, example_3_1,
    example_3_1_formulas, kneser_check, Example31,
};
pub use linear::{
    check_freiman_linear, check_hamidoune_linear, check_murphy_linear, check_small_growth_linear,
    find_petridis_witness_linear, find_taod_witness_linear,
};

/// Default number of powers checked by the Abelian power bound.
pub const DEFAULT_POWER_MAX: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatementId {
    Kneser,
    Murphy,
    SmallGrowth,
    Freiman,
    Ruzsa,
    Hamidoune,
    Petridis,
    TaoDoubling,
    Taod,
    FragmentBounds,
}

impl StatementId {
    pub const ALL: [StatementId; 10] = [
        StatementId::Kneser,
        StatementId::Murphy,
        StatementId::SmallGrowth,
        StatementId::Freiman,
        StatementId::Ruzsa,
        StatementId::Hamidoune,
        StatementId::Petridis,
        StatementId::TaoDoubling,
        StatementId::Taod,
        StatementId::FragmentBounds,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StatementId::Kneser => "kneser",
            StatementId::Murphy => "murphy",
            StatementId::SmallGrowth => "small_growth",
            StatementId::Freiman => "freiman",
            StatementId::Ruzsa => "ruzsa",
            StatementId::Hamidoune => "hamidoune",
            StatementId::Petridis => "petridis",
            StatementId::TaoDoubling => "tao_doubling",
            StatementId::Taod => "taod",
            StatementId::FragmentBounds => "fragment_bounds",
        }
    }

    /// The Kneser inequality is known to fail for actions; everything else is
    /// a theorem.
    pub fn is_theorem(self) -> bool {
        self != StatementId::Kneser
    }
}

impl fmt::Display for StatementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StatementId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StatementId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Validation(format!("unknown statement id {s:?}")))
    }
}

/// A named object recorded in a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Witness {
    Elements(Vec<usize>),
    Points(Vec<usize>),
    Subgroup(Vec<usize>),
    Subspace(Vec<Vec<u32>>),
    Partition(Vec<Vec<usize>>),
    Number(String),
}

impl Witness {
    pub fn elements(a: &ElementSet) -> Self {
        Witness::Elements(bits::members(a))
    }

    pub fn points(y: &PointSet) -> Self {
        Witness::Points(bits::members(y))
    }

    pub fn subgroup(h: &Subgroup) -> Self {
        Witness::Subgroup(h.elements())
    }

    pub fn subspace(w: &Subspace) -> Self {
        Witness::Subspace(w.basis().to_vec())
    }

    pub fn number(r: Rational) -> Self {
        Witness::Number(r.to_string())
    }

    pub fn count(n: usize) -> Self {
        Witness::Number(n.to_string())
    }
}

/// One hypothesis or conclusion and whether it held.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Clause {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub statement_id: StatementId,
    pub setting: String,
    pub is_theorem: bool,
    pub hypotheses_hold: bool,
    /// Only meaningful when `hypotheses_hold`.
    pub conclusion_holds: bool,
    pub hypotheses: Vec<Clause>,
    pub conclusions: Vec<Clause>,
    /// Evaluated quantities that are neither hypotheses nor conclusions.
    pub observations: Vec<Clause>,
    pub witnesses: BTreeMap<String, Witness>,
    /// The instance that broke a universally quantified conclusion.
    pub counterexample: Option<BTreeMap<String, Witness>>,
    pub exhaustiveness: Exhaustiveness,
    /// Number of instances of the quantified conclusion that were evaluated.
    pub checked: u64,
}

impl CheckReport {
    fn new(statement_id: StatementId, setting: impl Into<String>) -> Self {
        CheckReport {
            statement_id,
            setting: setting.into(),
            is_theorem: statement_id.is_theorem(),
            hypotheses_hold: false,
            conclusion_holds: false,
            hypotheses: Vec::new(),
            conclusions: Vec::new(),
            observations: Vec::new(),
            witnesses: BTreeMap::new(),
            counterexample: None,
            exhaustiveness: Exhaustiveness::Exhaustive,
            checked: 0,
        }
    }

    /// A theorem whose hypotheses held and whose conclusion failed.
    pub fn violation(&self) -> bool {
        self.is_theorem && self.hypotheses_hold && !self.conclusion_holds
    }

    pub fn failed_hypotheses(&self) -> Vec<&str> {
        self.hypotheses.iter().filter(|c| !c.holds).map(|c| c.name.as_str()).collect()
    }

    pub fn failed_conclusions(&self) -> Vec<&str> {
        self.conclusions.iter().filter(|c| !c.holds).map(|c| c.name.as_str()).collect()
    }

    fn hypothesis(&mut self, name: &str, holds: bool, detail: impl Into<String>) -> bool {
        self.hypotheses.push(Clause { name: name.into(), holds, detail: detail.into() });
        holds
    }

    fn conclusion(&mut self, name: &str, holds: bool, detail: impl Into<String>) -> bool {
        self.conclusions.push(Clause { name: name.into(), holds, detail: detail.into() });
        holds
    }

    fn observe(&mut self, name: &str, holds: bool, detail: impl Into<String>) -> bool {
        self.observations.push(Clause { name: name.into(), holds, detail: detail.into() });
        holds
    }

    fn witness(&mut self, name: &str, w: Witness) {
        self.witnesses.insert(name.into(), w);
    }

    fn sweep(&mut self, sweep: Sweep) -> Option<ElementSet> {
        self.exhaustiveness = self.exhaustiveness.combine(sweep.exhaustiveness);
        self.checked += sweep.checked;
        sweep.failure
    }

    fn fail_with(&mut self, name: &str, w: Witness) {
        self.counterexample.get_or_insert_with(BTreeMap::new).insert(name.into(), w);
    }

    /// Sets the summary flags: every hypothesis must hold, and at least one
    /// conclusion must have been evaluated and all of them must hold.
    fn finish(mut self) -> Self {
        self.hypotheses_hold = self.hypotheses.iter().all(|c| c.holds);
        self.conclusion_holds = !self.conclusions.is_empty() && self.conclusions.iter().all(|c| c.holds);
        self
    }

    /// Like `finish`, but the report applies when any hypothesis holds. Used
    /// when several independent regimes are checked at once.
    fn finish_any(mut self) -> Self {
        self.hypotheses_hold = self.hypotheses.iter().any(|c| c.holds);
        self.conclusion_holds = !self.conclusions.is_empty() && self.conclusions.iter().all(|c| c.holds);
        self
    }
}

/// Outcome of evaluating a predicate over many subsets of `G`.
struct Sweep {
    exhaustiveness: Exhaustiveness,
    checked: u64,
    failure: Option<ElementSet>,
}

/// A random nonempty subset of `{0, …, n-1}` with uniformly drawn size.
pub fn random_subset<R: Rng>(rng: &mut R, n: usize) -> ElementSet {
    let k = rng.gen_range(1..=n);
    bits::set_of(n, index::sample(rng, n, k))
}

/// Evaluates `holds` on every nonempty subset of `G` when `|G| ≤ limit`,
/// otherwise on `trials` seeded random nonempty subsets plus `extra`. The
/// first failure in enumeration order is returned.
fn sweep_subsets(
    order: usize,
    limit: usize,
    trials: u64,
    seed: u64,
    stream: u64,
    extra: &[ElementSet],
    holds: impl Fn(&ElementSet) -> bool + Sync,
) -> Sweep {
    if order <= limit.min(63) {
        let total: Mask = (1 << order) - 1;
        let failure = (1..=total)
            .into_par_iter()
            .map(|m| bits::mask_to_set(m, order))
            .find_first(|s| !holds(s));
        return Sweep { exhaustiveness: Exhaustiveness::Exhaustive, checked: total, failure };
    }
    let mut rng = sampling::rng(seed, stream);
    let mut sets: Vec<ElementSet> = extra.to_vec();
    sets.extend((0..trials).map(|_| random_subset(&mut rng, order)));
    let failure = sets.par_iter().find_first(|s| !holds(s)).cloned();
    Sweep { exhaustiveness: Exhaustiveness::Sampled { trials: sets.len() as u64, seed }, checked: sets.len() as u64, failure }
}

/// The nonempty subset of `{0, …, n-1}` minimizing `num/den`, ties broken by
/// size and then lexicographically. `ratio` returns `(num, den)` with
/// `den > 0`.
fn argmin_ratio(n: usize, caps: &Caps, ratio: impl Fn(Mask) -> (usize, usize) + Sync) -> Result<(Mask, Rational)> {
    if n == 0 {
        return Err(Error::Domain("argmin over the subsets of an empty set".into()));
    }
    if n > caps.minimize_exhaustive {
        return Err(Error::capacity("minimize_exhaustive", caps.minimize_exhaustive, n));
    }
    let total: Mask = bits::ground_mask(n);
    // Fractions compare by cross-multiplication; no gcd in the hot loop.
    let best = (1..=total)
        .into_par_iter()
        .map(|m| {
            let (num, den) = ratio(m);
            (num as u64, den as u64, m)
        })
        .min_by(|a, b| {
            (a.0 as u128 * b.1 as u128)
                .cmp(&(b.0 as u128 * a.1 as u128))
                .then(a.2.count_ones().cmp(&b.2.count_ones()))
                .then(bits::lex_cmp(a.2, b.2))
        })
        .expect("at least one nonempty subset");
    Ok((best.2, Rational::new(best.0 as i64, best.1 as i64)))
}

/// Elements of `set` in ascending order, for mapping local masks back.
fn local_members(set: &ElementSet) -> Vec<usize> {
    bits::members(set)
}

fn lift(mask: Mask, members: &[usize], universe: usize) -> ElementSet {
    bits::set_of(universe, bits::MaskIter(mask).map(|i| members[i]))
}

fn rat(n: usize) -> Rational {
    Rational::from_integer(n as i64)
}

fn check_alpha_unit(report: &mut CheckReport, alpha: Rational) -> bool {
    report.hypothesis(
        "alpha in (0, 1]",
        alpha > Rational::from_integer(0) && alpha <= Rational::from_integer(1),
        format!("alpha = {alpha}"),
    )
}

fn nonempty(report: &mut CheckReport, named: &[(&str, usize)]) -> bool {
    let empty: Vec<&str> = named.iter().filter(|(_, n)| *n == 0).map(|(s, _)| *s).collect();
    report.hypothesis(
        "nonempty inputs",
        empty.is_empty(),
        if empty.is_empty() { "all inputs nonempty".to_string() } else { format!("empty: {}", empty.join(", ")) },
    )
}

fn subset_clause(r: &mut CheckReport, name: &str, s: &ElementSet, t: &ElementSet) -> bool {
    let outside = s.difference(t).next();
    if let Some(g) = outside {
        r.fail_with(name, Witness::Elements(vec![g]));
    }
    let detail = match outside {
        Some(g) => format!("element {g} is outside"),
        None => format!("{} elements inside {}", bits::size(s), bits::size(t)),
    };
    r.conclusion(name, outside.is_none(), detail)
}
