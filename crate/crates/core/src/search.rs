//! Seeded counterexample search over built-in group-action families.
//!
//! Instance `c` of a run is drawn from the stream `rng(seed, c)`, so any
//! instance can be regenerated from the seed and its cursor alone, and a
//! search can be resumed at `next_cursor`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use rand::seq::{index, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::action::GroupAction;
use crate::bits::{self, ElementSet, PointSet};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::group::{affine_gl1, cyclic, dihedral, direct_product, symmetric_with, Subgroup};
use crate::rational::{ratio, Rational};
use crate::sampling;
use crate::submodular::mu_ratio;
use crate::theorems::{self, random_subset, CheckReport, StatementId, DEFAULT_POWER_MAX};

/// Instances are evaluated in chunks of this many cursors.
const CHUNK: u64 = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `S_n` on `{0, …, n-1}`.
    Symmetric(usize),
    /// `C_n` acting on itself by translation.
    Cyclic(usize),
    /// `D_n` on the vertices of the `n`-gon.
    Dihedral(usize),
    /// `x ↦ ax + b` on `F_p`.
    Affine(usize),
    /// `C_m × C_n` acting on itself by translation.
    CyclicProduct(usize, usize),
}

impl Family {
    pub const NAMES: [&'static str; 5] = ["symmetric:N", "cyclic:N", "dihedral:N", "affine:P", "cyclic_product:M,N"];

    pub fn build(&self, caps: &Caps) -> Result<Arc<GroupAction>> {
        let action = match *self {
            Family::Symmetric(n) => GroupAction::natural_with(symmetric_with(n, caps)?, caps)?,
            Family::Cyclic(n) => GroupAction::left_translation(cyclic(n)?)?,
            Family::Dihedral(n) => GroupAction::natural_with(dihedral(n)?, caps)?,
            Family::Affine(p) => GroupAction::natural_with(affine_gl1(p)?, caps)?,
            Family::CyclicProduct(m, n) => GroupAction::left_translation(direct_product(&*cyclic(m)?, &*cyclic(n)?)?)?,
        };
        Ok(Arc::new(action))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Symmetric(n) => write!(f, "symmetric:{n}"),
            Family::Cyclic(n) => write!(f, "cyclic:{n}"),
            Family::Dihedral(n) => write!(f, "dihedral:{n}"),
            Family::Affine(p) => write!(f, "affine:{p}"),
            Family::CyclicProduct(m, n) => write!(f, "cyclic_product:{m},{n}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Validation(format!("unknown family `{s}`; expected one of {}", Family::NAMES.join(", ")))
        };
        let (name, args) = s.split_once(':').ok_or_else(bad)?;
        let nums = args
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        match (name.trim(), nums.as_slice()) {
            ("symmetric", [n]) => Ok(Family::Symmetric(*n)),
            ("cyclic", [n]) => Ok(Family::Cyclic(*n)),
            ("dihedral", [n]) => Ok(Family::Dihedral(*n)),
            ("affine", [p]) => Ok(Family::Affine(*p)),
            ("cyclic_product", [m, n]) => Ok(Family::CyclicProduct(*m, *n)),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Predicate {
    /// Hypotheses and conclusion of a statement checker.
    Statement(StatementId),
    /// `|AY| < |A| + |Y|` with trivial stabilizer of `AY`.
    KneserTrivialStabilizer,
}

impl Predicate {
    pub fn names() -> Vec<&'static str> {
        let mut v: Vec<&str> = StatementId::ALL.iter().map(|s| s.as_str()).collect();
        v.push("kneser_trivial_stabilizer");
        v
    }

    /// Whether a failure is a bug rather than a finding.
    pub fn is_theorem(&self) -> bool {
        match self {
            Predicate::Statement(s) => s.is_theorem(),
            Predicate::KneserTrivialStabilizer => false,
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Statement(s) => write!(f, "{s}"),
            Predicate::KneserTrivialStabilizer => f.write_str("kneser_trivial_stabilizer"),
        }
    }
}

impl FromStr for Predicate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().replace('-', "_");
        if norm == "kneser_trivial_stabilizer" {
            return Ok(Predicate::KneserTrivialStabilizer);
        }
        norm.parse::<StatementId>().map(Predicate::Statement).map_err(|_| {
            Error::Validation(format!("unknown predicate `{s}`; expected one of {}", Predicate::names().join(", ")))
        })
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub family: Family,
    pub predicate: Predicate,
    /// Number of instances to evaluate.
    pub budget: u64,
    pub seed: u64,
    /// First instance cursor.
    pub cursor: u64,
    /// Records kept in the report; counts are always complete.
    pub max_records: usize,
    /// Also record instances whose hypotheses hold and conclusion holds.
    pub record_satisfied: bool,
}

impl SearchConfig {
    pub fn new(family: Family, predicate: Predicate, budget: u64, seed: u64) -> Self {
        SearchConfig { family, predicate, budget, seed, cursor: 0, max_records: 100, record_satisfied: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// A theorem's hypotheses held and its conclusion failed.
    Violation,
    /// A non-theorem statement failed, or the searched pattern occurred.
    Hit,
    Satisfied,
}

#[derive(Clone, Debug, Serialize)]
pub struct Instance {
    pub a: Vec<usize>,
    pub a_cycles: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<usize>>,
    pub y: Vec<usize>,
    /// `α`, `λ` or `ε`, whichever the predicate takes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameter: Option<String>,
    /// How `A` was drawn.
    pub shape: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchRecord {
    pub cursor: u64,
    pub outcome: Outcome,
    pub instance: Instance,
    pub check: CheckReport,
    /// Structure of a Kneser failure in the symmetric family.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pattern: Option<Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub version: String,
    pub family: String,
    pub predicate: String,
    pub predicate_is_theorem: bool,
    pub group_order: usize,
    pub domain_size: usize,
    pub seed: u64,
    pub start_cursor: u64,
    pub next_cursor: u64,
    pub instances: u64,
    pub hypotheses_held: u64,
    pub hits: u64,
    pub violations: u64,
    /// Instances outside the predicate's domain, with the first reason.
    pub skipped: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_skip_reason: Option<String>,
    /// For Kneser-type predicates: instances with `|AY| < |A| + |Y|` and the
    /// smallest `|G_AY|` among them.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub small_sumsets: Option<Value>,
    pub records: Vec<SearchRecord>,
    pub records_truncated: bool,
}

struct Searcher {
    action: Arc<GroupAction>,
    hamidoune: Mutex<HashMap<(Vec<usize>, Rational), (Rational, CheckReport)>>,
    subgroups: Vec<Subgroup>,
    config: SearchConfig,
    caps: Caps,
}

struct Evaluated {
    cursor: u64,
    held: bool,
    outcome: Option<Outcome>,
    record: Option<SearchRecord>,
    /// `Some(|G_AY|)` when `|AY| < |A| + |Y|`.
    small_sumset_stabilizer: Option<usize>,
    skipped: Option<String>,
}

impl Searcher {
    fn draw_points(&self, rng: &mut ChaCha8Rng) -> PointSet {
        random_subset(rng, self.action.domain_size())
    }

    /// Draws `A` in one of several shapes. Uniform subsets rarely satisfy
    /// small-growth hypotheses, so most draws are structured.
    fn draw_elements(&self, rng: &mut ChaCha8Rng, y: &PointSet) -> (ElementSet, &'static str) {
        let group = self.action.group();
        let order = group.order();
        match rng.gen_range(0..4) {
            0 => (random_subset(rng, order), "uniform"),
            1 => {
                let k = rng.gen_range(1..=order.min(4));
                (group.set_of(index::sample(rng, order, k)), "small")
            }
            2 => {
                let h = self.subgroups.choose(rng).expect("trivial subgroup is always present");
                let g = rng.gen_range(0..order);
                let coset: Vec<usize> = h.elements().into_iter().map(|x| group.mul(g, x)).collect();
                let k = rng.gen_range(1..=coset.len());
                let picked = index::sample(rng, coset.len(), k).into_iter().map(|i| coset[i]);
                (group.set_of(picked), "coset_subset")
            }
            _ => {
                // Everything sending Y into a superset Z ⊇ Y.
                let mut z = y.clone();
                for x in 0..self.action.domain_size() {
                    if rng.gen_bool(0.3) {
                        z.insert(x);
                    }
                }
                let a = group.set_of((0..order).filter(|&g| bits::members(y).iter().all(|&x| z.contains(self.action.act(g, x)))));
                (a, "image_constrained")
            }
        }
    }

    fn instance(&self, a: &ElementSet, b: Option<&ElementSet>, y: &PointSet, parameter: Option<Rational>, shape: &'static str) -> Instance {
        let group = self.action.group();
        let a_members = bits::members(a);
        Instance {
            a_cycles: a_members.iter().map(|&g| group.element(g).to_string()).collect(),
            a: a_members,
            b: b.map(bits::members),
            y: bits::members(y),
            parameter: parameter.map(|p| p.to_string()),
            shape,
        }
    }

    fn kneser_pattern(&self, a: &ElementSet, y: &PointSet, ay: &PointSet) -> Option<Value> {
        let Family::Symmetric(n) = self.config.family else { return None };
        let group = self.action.group();
        let (k, l) = (bits::size(y), bits::size(ay));
        let full = (0..group.order())
            .filter(|&g| bits::members(y).iter().all(|&x| ay.contains(self.action.act(g, x))))
            .count();
        let (a_formula, stab_formula) = theorems::example_3_1_formulas(n as u64, k as u64, l as u64);
        let stab = self.action.set_stabilizer(ay).order();
        Some(json!({
            "k": k,
            "l": l,
            "a_is_all_maps_into_ay": full == bits::size(a),
            "a_matches_formula": bits::size(a) as u64 == a_formula,
            "stabilizer_matches_formula": stab as u64 == stab_formula,
        }))
    }

    fn evaluate(&self, cursor: u64) -> Result<Evaluated> {
        let mut rng = sampling::rng(self.config.seed, cursor);
        let action = &self.action;
        let (caps, seed) = (&self.caps, self.config.seed ^ cursor);
        let y = self.draw_points(&mut rng);
        let (a, shape) = self.draw_elements(&mut rng, &y);
        let mut b = None;
        let mut parameter = None;
        let ay = action.act_set(&a, &y);
        let small = bits::size(&ay) < bits::size(&a) + bits::size(&y);
        let stab_order = if small { Some(action.set_stabilizer(&ay).order()) } else { None };
        let pick = |rng: &mut ChaCha8Rng, grid: &[(usize, usize)]| {
            let (p, q) = grid[rng.gen_range(0..grid.len())];
            ratio(p, q)
        };
        let result = match self.config.predicate {
            Predicate::KneserTrivialStabilizer | Predicate::Statement(StatementId::Kneser) => {
                theorems::kneser_check(action, &a, &y)
            }
            Predicate::Statement(id) => match id {
                StatementId::Kneser => unreachable!(),
                StatementId::Murphy => theorems::check_murphy(action, &a, &y),
                StatementId::SmallGrowth => {
                    let al = pick(&mut rng, &[(1, 4), (1, 3), (1, 2), (2, 3), (3, 4), (1, 1)]);
                    parameter = Some(al);
                    theorems::check_small_growth(action, &a, &y, al)
                }
                StatementId::Freiman => {
                    let al = pick(&mut rng, &[(1, 4), (1, 3), (1, 2), (2, 3), (3, 4), (1, 1)]);
                    parameter = Some(al);
                    theorems::check_freiman(action, &a, &y, al)
                }
                StatementId::Ruzsa => {
                    let (bs, _) = self.draw_elements(&mut rng, &y);
                    let r = theorems::check_ruzsa_triple(action, &a, &bs, &y);
                    b = Some(bs);
                    r
                }
                StatementId::Hamidoune => {
                    // Depends on (Y, λ) only; both repeat often in small families.
                    let t = pick(&mut rng, &[(0, 1), (1, 4), (1, 2), (3, 4), (1, 1)]);
                    let key = (bits::members(&y), t);
                    let cached = self.hamidoune.lock().expect("cache lock").get(&key).cloned();
                    let (l, report) = match cached {
                        Some(hit) => hit,
                        None => {
                            let l = mu_ratio(action, &y, caps)?.mu * t;
                            let r = theorems::check_hamidoune(action, &y, l, None, caps, self.config.seed)?;
                            self.hamidoune.lock().expect("cache lock").insert(key, (l, r.clone()));
                            (l, r)
                        }
                    };
                    parameter = Some(l);
                    Ok(report)
                }
                StatementId::Petridis => {
                    let al = ratio(bits::size(&ay), bits::size(&a));
                    parameter = Some(al);
                    theorems::find_petridis_witness(action, &a, &y, al, caps, seed)
                }
                StatementId::TaoDoubling => {
                    let e = pick(&mut rng, &[(1, 4), (1, 2), (1, 1), (3, 2)]);
                    parameter = Some(e);
                    theorems::check_tao_small_doubling(action, &a, &y, e, caps, seed)
                }
                StatementId::Taod => {
                    let al = ratio(bits::size(&ay), bits::size(&y));
                    parameter = Some(al);
                    theorems::find_taod_witness(action, &a, &y, al, DEFAULT_POWER_MAX, caps, seed)
                }
                StatementId::FragmentBounds => {
                    let na = bits::size(&a);
                    let l = match rng.gen_range(0..4) {
                        0 => ratio(1, 2 * na),
                        1 => ratio(1, 2),
                        2 => ratio(3, 4),
                        _ => ratio(1, 1),
                    };
                    let mu = pick(&mut rng, &[(1, 2), (3, 4), (1, 1)]);
                    parameter = Some(l);
                    theorems::check_fragment_bounds(action, &a, l, Some(mu), caps)
                }
            },
        };
        let skip = |reason: String| Evaluated {
            cursor,
            held: false,
            outcome: None,
            record: None,
            small_sumset_stabilizer: stab_order,
            skipped: Some(reason),
        };
        let check = match result {
            Ok(c) => c,
            Err(Error::Domain(m)) => return Ok(skip(m)),
            Err(e) => return Err(e),
        };
        let outcome = match self.config.predicate {
            Predicate::KneserTrivialStabilizer => (small && stab_order == Some(1)).then_some(Outcome::Hit),
            Predicate::Statement(_) if check.violation() => Some(Outcome::Violation),
            Predicate::Statement(_) if !check.is_theorem && check.hypotheses_hold && !check.conclusion_holds => {
                Some(Outcome::Hit)
            }
            Predicate::Statement(_) if check.hypotheses_hold && check.conclusion_holds && self.config.record_satisfied => {
                Some(Outcome::Satisfied)
            }
            _ => None,
        };
        let held = check.hypotheses_hold;
        let record = outcome.map(|outcome| {
            let pattern = match (self.config.predicate, outcome) {
                (Predicate::Statement(StatementId::Kneser), Outcome::Hit) => self.kneser_pattern(&a, &y, &ay),
                _ => None,
            };
            SearchRecord { cursor, outcome, instance: self.instance(&a, b.as_ref(), &y, parameter, shape), check, pattern }
        });
        Ok(Evaluated { cursor, held, outcome, record, small_sumset_stabilizer: stab_order, skipped: None })
    }
}

/// Runs a search. Counts cover every instance; at most `max_records`
/// records are kept, in cursor order.
pub fn search(config: &SearchConfig, caps: &Caps) -> Result<SearchReport> {
    caps.validate()?;
    let action = config.family.build(caps)?;
    let group = action.group();
    if matches!(config.predicate, Predicate::Statement(StatementId::Taod)) && !group.is_abelian() {
        return Err(Error::Validation(format!("predicate taod needs an Abelian family, {} is not", config.family)));
    }
    let subgroups = match group.enumerate_subgroups(caps) {
        Ok(s) => s,
        Err(Error::Capacity { .. }) => vec![group.trivial_subgroup(), group.whole()],
        Err(e) => return Err(e),
    };
    let searcher = Searcher {
        action: Arc::clone(&action),
        hamidoune: Mutex::new(HashMap::new()),
        subgroups,
        config: config.clone(),
        caps: caps.clone(),
    };
    let end = config.cursor.checked_add(config.budget).ok_or_else(|| Error::Validation("cursor + budget overflows".into()))?;
    let mut report = SearchReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        family: config.family.to_string(),
        predicate: config.predicate.to_string(),
        predicate_is_theorem: config.predicate.is_theorem(),
        group_order: group.order(),
        domain_size: action.domain_size(),
        seed: config.seed,
        start_cursor: config.cursor,
        next_cursor: end,
        instances: 0,
        hypotheses_held: 0,
        hits: 0,
        violations: 0,
        skipped: 0,
        first_skip_reason: None,
        small_sumsets: None,
        records: Vec::new(),
        records_truncated: false,
    };
    let kneser_like = matches!(
        config.predicate,
        Predicate::KneserTrivialStabilizer | Predicate::Statement(StatementId::Kneser)
    );
    let (mut small_count, mut small_min_stab) = (0u64, None::<usize>);
    let mut start = config.cursor;
    while start < end {
        let stop = end.min(start + CHUNK);
        let chunk: Vec<Evaluated> =
            (start..stop).into_par_iter().map(|c| searcher.evaluate(c)).collect::<Result<Vec<_>>>()?;
        for ev in chunk {
            report.instances += 1;
            if let Some(s) = ev.small_sumset_stabilizer {
                small_count += 1;
                small_min_stab = Some(small_min_stab.map_or(s, |m| m.min(s)));
            }
            if let Some(reason) = ev.skipped {
                report.skipped += 1;
                report.first_skip_reason.get_or_insert(format!("cursor {}: {reason}", ev.cursor));
                continue;
            }
            report.hypotheses_held += ev.held as u64;
            match ev.outcome {
                Some(Outcome::Violation) => report.violations += 1,
                Some(Outcome::Hit) => report.hits += 1,
                _ => {}
            }
            if let Some(r) = ev.record {
                if report.records.len() < config.max_records {
                    report.records.push(r);
                } else {
                    report.records_truncated = true;
                }
            }
        }
        start = stop;
    }
    if kneser_like {
        report.small_sumsets = Some(json!({ "count": small_count, "min_stabilizer_order": small_min_stab }));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_families_and_predicates() {
        assert_eq!("cyclic_product:2,3".parse::<Family>().unwrap(), Family::CyclicProduct(2, 3));
        assert_eq!("symmetric:4".parse::<Family>().unwrap().to_string(), "symmetric:4");
        assert!(matches!("klein:4".parse::<Family>(), Err(Error::Validation(_))));
        assert_eq!("kneser-trivial-stabilizer".parse::<Predicate>().unwrap(), Predicate::KneserTrivialStabilizer);
        assert_eq!("ruzsa".parse::<Predicate>().unwrap(), Predicate::Statement(StatementId::Ruzsa));
        assert!(matches!("goldbach".parse::<Predicate>(), Err(Error::Validation(_))));
    }

    #[test]
    fn kneser_search_on_s4_finds_failures() {
        let cfg = SearchConfig::new(Family::Symmetric(4), "kneser".parse().unwrap(), 300, 7);
        let r = search(&cfg, &Caps::default()).unwrap();
        assert!(r.hits > 0);
        assert_eq!(r.violations, 0);
        assert!(r.records.iter().all(|x| x.outcome == Outcome::Hit && x.pattern.is_some()));
    }

    #[test]
    fn resumed_search_matches_single_run() {
        let mut cfg = SearchConfig::new(Family::Dihedral(4), "murphy".parse().unwrap(), 60, 3);
        cfg.record_satisfied = true;
        let whole = search(&cfg, &Caps::default()).unwrap();
        cfg.budget = 25;
        let first = search(&cfg, &Caps::default()).unwrap();
        cfg.cursor = first.next_cursor;
        cfg.budget = 35;
        let second = search(&cfg, &Caps::default()).unwrap();
        let cursors = |r: &SearchReport| r.records.iter().map(|x| x.cursor).collect::<Vec<_>>();
        let mut joined = cursors(&first);
        joined.extend(cursors(&second));
        assert_eq!(joined, cursors(&whole));
        assert_eq!(first.hypotheses_held + second.hypotheses_held, whole.hypotheses_held);
    }

    #[test]
    fn taod_rejects_non_abelian_family() {
        let cfg = SearchConfig::new(Family::Symmetric(3), "taod".parse().unwrap(), 5, 1);
        assert!(matches!(search(&cfg, &Caps::default()), Err(Error::Validation(_))));
    }
}
