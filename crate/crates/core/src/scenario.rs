//! Self-contained JSON experiment descriptions and their deterministic
//! execution.
//!
//! A scenario names a group by constructor, an action on it, optionally a
//! representation, a set of named inputs and a list of tasks. Running it
//! yields a [`Report`] whose content depends only on the scenario (timing
//! fields aside).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::action::GroupAction;
use crate::bits::{self, ElementSet, PointSet};
use crate::caps::{Caps, DEFAULT_SEED};
use crate::error::{Error, Result};
use crate::group::{affine_gl1, cyclic, dihedral, direct_product, symmetric_with, FiniteGroup, Permutation};
use crate::linear::{
    check_lattice_submodular, enumerate_subspaces, minimize_on_lattice, DeltaA, FpMatrix, GammaW, Representation,
    Subspace,
};
use crate::rational::{parse_rational, Rational};
use crate::submodular::{
    atom_identity, check_invariance, check_submodular, core_set, minimize_nonempty, mu_ratio, CutFunction, CyFunction,
    DaFunction, DynSetFunction, GroundSymmetry,
};
use crate::theorems::{self, CheckReport, DEFAULT_POWER_MAX};

/// A group given by constructor. In JSON either `{"symmetric": 4}` or the
/// text form `"symmetric(4)"`; products nest as `"product(cyclic(2), cyclic(3))"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields, try_from = "GroupSpecRepr")]
pub enum GroupSpec {
    Symmetric(usize),
    Cyclic(usize),
    Dihedral(usize),
    AffineGl1(usize),
    Product(Box<GroupSpec>, Box<GroupSpec>),
    /// Closure of permutations of `{0, …, degree-1}` in 0-based cycle notation.
    Generators { degree: usize, cycles: Vec<String> },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GroupSpecRepr {
    Text(String),
    Tagged(GroupSpecTagged),
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum GroupSpecTagged {
    Symmetric(usize),
    Cyclic(usize),
    Dihedral(usize),
    AffineGl1(usize),
    Product(GroupSpec, GroupSpec),
    Generators { degree: usize, cycles: Vec<String> },
}

impl TryFrom<GroupSpecRepr> for GroupSpec {
    type Error = Error;

    fn try_from(r: GroupSpecRepr) -> Result<Self> {
        Ok(match r {
            GroupSpecRepr::Text(t) => GroupSpec::parse(&t)?,
            GroupSpecRepr::Tagged(t) => match t {
                GroupSpecTagged::Symmetric(n) => GroupSpec::Symmetric(n),
                GroupSpecTagged::Cyclic(n) => GroupSpec::Cyclic(n),
                GroupSpecTagged::Dihedral(n) => GroupSpec::Dihedral(n),
                GroupSpecTagged::AffineGl1(p) => GroupSpec::AffineGl1(p),
                GroupSpecTagged::Product(g, h) => GroupSpec::Product(Box::new(g), Box::new(h)),
                GroupSpecTagged::Generators { degree, cycles } => GroupSpec::Generators { degree, cycles },
            },
        })
    }
}

impl GroupSpec {
    /// Parses the text form, e.g. `symmetric(3)` or `product(cyclic(2), cyclic(3))`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = TextParser { s: text.as_bytes(), i: 0 };
        let g = p.group()?;
        p.skip_ws();
        if p.i != p.s.len() {
            return Err(Error::Parse(format!("trailing input in group `{text}`")));
        }
        Ok(g)
    }

    pub fn build(&self, caps: &Caps) -> Result<Arc<FiniteGroup>> {
        match self {
            GroupSpec::Symmetric(n) => symmetric_with(*n, caps),
            GroupSpec::Cyclic(n) => cyclic(*n),
            GroupSpec::Dihedral(n) => dihedral(*n),
            GroupSpec::AffineGl1(p) => affine_gl1(*p),
            GroupSpec::Product(g, h) => direct_product(&*g.build(caps)?, &*h.build(caps)?),
            GroupSpec::Generators { degree, cycles } => {
                let gens = cycles
                    .iter()
                    .map(|c| Permutation::parse_cycles(*degree, c))
                    .collect::<Result<Vec<_>>>()?;
                FiniteGroup::closure(format!("<{}>", cycles.join(", ")), *degree, gens, caps)
            }
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Symmetric(n) => write!(f, "symmetric({n})"),
            GroupSpec::Cyclic(n) => write!(f, "cyclic({n})"),
            GroupSpec::Dihedral(n) => write!(f, "dihedral({n})"),
            GroupSpec::AffineGl1(p) => write!(f, "affine_gl1({p})"),
            GroupSpec::Product(g, h) => write!(f, "product({g}, {h})"),
            GroupSpec::Generators { degree, cycles } => write!(f, "generators({degree}; {})", cycles.join(" ")),
        }
    }
}

struct TextParser<'a> {
    s: &'a [u8],
    i: usize,
}

impl TextParser<'_> {
    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.s.get(self.i) == Some(&c) {
            self.i += 1;
            Ok(())
        } else {
            Err(Error::Parse(format!("expected `{}` at offset {} in group spec", c as char, self.i)))
        }
    }

    fn word(&mut self) -> String {
        self.skip_ws();
        let start = self.i;
        while self.i < self.s.len() && (self.s[self.i].is_ascii_alphanumeric() || self.s[self.i] == b'_') {
            self.i += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.i]).into_owned()
    }

    fn number(&mut self) -> Result<usize> {
        let w = self.word();
        w.parse().map_err(|_| Error::Parse(format!("expected an integer, found `{w}`")))
    }

    fn group(&mut self) -> Result<GroupSpec> {
        let name = self.word();
        self.expect(b'(')?;
        let g = match name.as_str() {
            "symmetric" => GroupSpec::Symmetric(self.number()?),
            "cyclic" => GroupSpec::Cyclic(self.number()?),
            "dihedral" => GroupSpec::Dihedral(self.number()?),
            "affine_gl1" => GroupSpec::AffineGl1(self.number()?),
            "product" => {
                let g = self.group()?;
                self.expect(b',')?;
                let h = self.group()?;
                GroupSpec::Product(Box::new(g), Box::new(h))
            }
            other => return Err(Error::Parse(format!("unknown group constructor `{other}`"))),
        };
        self.expect(b')')?;
        Ok(g)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ActionSpec {
    /// The permutation action on `{0, …, degree-1}`.
    #[default]
    Natural,
    LeftTranslation,
    Conjugation,
    /// Left multiplication on the left cosets of a named subgroup.
    Coset(String),
    Trivial(usize),
    /// `table[g][x] = g·x`, rows in element order.
    Table(Vec<Vec<usize>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RepresentationSpec {
    /// Permutation matrices of the scenario action over `F_p`.
    Permutation(u32),
    /// Matrices for the generators, in the group's generator order.
    GeneratorImages { p: u32, dim: usize, matrices: Vec<Vec<Vec<u32>>> },
}

/// A named input set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    /// Group elements in 0-based cycle notation; `"()"` is the identity.
    Elements(Vec<String>),
    /// Group elements by index in closure order.
    ElementIndices(Vec<usize>),
    /// The subgroup generated by the listed elements.
    Subgroup(Vec<String>),
    AllElements,
    /// Setwise stabilizer of a named point set.
    Stabilizer(String),
    /// `{σ : σ({0..k-1}) ⊆ {0..l-1}}`.
    ImageConstrained { k: usize, l: usize },
    Points(Vec<usize>),
    AllPoints,
    /// Span of the listed vectors in the representation space.
    Subspace(Vec<Vec<u32>>),
    WholeSpace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetKind {
    Elements,
    Points,
    Subspace,
}

impl fmt::Display for SetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SetKind::Elements => "element set",
            SetKind::Points => "point set",
            SetKind::Subspace => "subspace",
        })
    }
}

impl SetSpec {
    pub fn kind(&self) -> SetKind {
        match self {
            SetSpec::Elements(_)
            | SetSpec::ElementIndices(_)
            | SetSpec::Subgroup(_)
            | SetSpec::AllElements
            | SetSpec::Stabilizer(_)
            | SetSpec::ImageConstrained { .. } => SetKind::Elements,
            SetSpec::Points(_) | SetSpec::AllPoints => SetKind::Points,
            SetSpec::Subspace(_) | SetSpec::WholeSpace => SetKind::Subspace,
        }
    }
}

/// Defaults for task parameters, as `"p/q"` strings.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<String>,
}

/// A set function selected by family name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// `Y ↦ |{(g, y) : y ∈ Y, g·y ∉ Y}|` on the subsets of `X`.
    Cut,
    /// `A ↦ |A·Y| − λ|A|` on the subsets of `G`.
    #[serde(rename = "c_y")]
    Cy {
        y: String,
        #[serde(default)]
        lambda: Option<String>,
    },
    /// `Y ↦ |A·Y| − λ|Y|` on the subsets of `X`.
    #[serde(rename = "d_a")]
    Da {
        a: String,
        #[serde(default)]
        lambda: Option<String>,
    },
    /// `A ↦ dim(A·W) − λ|A|` on the subsets of `G`.
    GammaW {
        w: String,
        #[serde(default)]
        lambda: Option<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case", deny_unknown_fields)]
pub enum Task {
    Orbits,
    Subgroups,
    Stabilizer { y: String },
    Symmetry { y: String, #[serde(default)] alpha: Option<String> },
    OrbitBounds { a: String, y: String },
    Mu { y: String },
    Submodular { function: FunctionSpec },
    Invariance { function: FunctionSpec },
    Minimize { function: FunctionSpec },
    Core { function: FunctionSpec },
    AtomIdentity { function: FunctionSpec },
    /// Minimizes `W ↦ dim(A·W) − λ dim W` over the nonzero subspaces.
    LatticeMinimize { a: String, #[serde(default)] lambda: Option<String> },
    Kneser { a: String, y: String },
    Murphy { a: String, #[serde(default)] y: Option<String>, #[serde(default)] w: Option<String> },
    SmallGrowth {
        a: String,
        #[serde(default)]
        y: Option<String>,
        #[serde(default)]
        w: Option<String>,
        #[serde(default)]
        alpha: Option<String>,
    },
    Freiman {
        a: String,
        #[serde(default)]
        y: Option<String>,
        #[serde(default)]
        w: Option<String>,
        #[serde(default)]
        alpha: Option<String>,
    },
    FreimanRemarks { a: String, y: String },
    Ruzsa { a: String, b: String, y: String },
    Hamidoune {
        #[serde(default)]
        y: Option<String>,
        #[serde(default)]
        w: Option<String>,
        #[serde(default)]
        lambda: Option<String>,
        #[serde(default)]
        a0: Option<String>,
    },
    Petridis {
        a: String,
        #[serde(default)]
        y: Option<String>,
        #[serde(default)]
        w: Option<String>,
        #[serde(default)]
        alpha: Option<String>,
    },
    TaoDoubling { a: String, y: String, #[serde(default)] epsilon: Option<String> },
    Taod {
        a: String,
        #[serde(default)]
        y: Option<String>,
        #[serde(default)]
        w: Option<String>,
        #[serde(default)]
        alpha: Option<String>,
        #[serde(default)]
        powers: Option<usize>,
    },
    FragmentBounds {
        a: String,
        #[serde(default)]
        lambda: Option<String>,
        #[serde(default)]
        mu: Option<String>,
    },
    DoublingScan { epsilons: Vec<String> },
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Orbits => "orbits",
            Task::Subgroups => "subgroups",
            Task::Stabilizer { .. } => "stabilizer",
            Task::Symmetry { .. } => "symmetry",
            Task::OrbitBounds { .. } => "orbit_bounds",
            Task::Mu { .. } => "mu",
            Task::Submodular { .. } => "submodular",
            Task::Invariance { .. } => "invariance",
            Task::Minimize { .. } => "minimize",
            Task::Core { .. } => "core",
            Task::AtomIdentity { .. } => "atom_identity",
            Task::LatticeMinimize { .. } => "lattice_minimize",
            Task::Kneser { .. } => "kneser",
            Task::Murphy { .. } => "murphy",
            Task::SmallGrowth { .. } => "small_growth",
            Task::Freiman { .. } => "freiman",
            Task::FreimanRemarks { .. } => "freiman_remarks",
            Task::Ruzsa { .. } => "ruzsa",
            Task::Hamidoune { .. } => "hamidoune",
            Task::Petridis { .. } => "petridis",
            Task::TaoDoubling { .. } => "tao_doubling",
            Task::Taod { .. } => "taod",
            Task::FragmentBounds { .. } => "fragment_bounds",
            Task::DoublingScan { .. } => "doubling_scan",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub group: GroupSpec,
    #[serde(default)]
    pub action: ActionSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representation: Option<RepresentationSpec>,
    #[serde(default)]
    pub sets: BTreeMap<String, SetSpec>,
    #[serde(default)]
    pub params: Params,
    /// A single task; runs before `tasks`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<Task>,
    #[serde(default)]
    pub tasks: Vec<Task>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caps: Option<Caps>,
}

/// Parses and validates a scenario. Syntax errors carry line and column.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let scenario: Scenario = serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        match e.classify() {
            serde_json::error::Category::Data => Error::Validation(msg),
            _ => Error::Parse(msg),
        }
    })?;
    scenario.validate()?;
    Ok(scenario)
}

impl Scenario {
    pub fn all_tasks(&self) -> Vec<&Task> {
        self.task.iter().chain(self.tasks.iter()).collect()
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    /// Caps from the scenario (defaults when absent) with
    /// `GSUBMOD_CAP_*` overrides from `lookup` applied on top.
    pub fn effective_caps(&self, lookup: impl Fn(&str) -> Option<String>) -> Result<Caps> {
        let mut caps = self.caps.clone().unwrap_or_default();
        caps.apply_env(lookup)?;
        Ok(caps)
    }

    fn set_kind(&self, name: &str, want: SetKind, ctx: &str) -> Result<()> {
        match self.sets.get(name) {
            None => Err(Error::Validation(format!("{ctx}: unknown set `{name}`"))),
            Some(s) if s.kind() != want => Err(Error::Validation(format!(
                "{ctx}: set `{name}` is a {}, expected a {want}",
                s.kind()
            ))),
            Some(_) => Ok(()),
        }
    }

    fn rational(&self, value: &Option<String>, default: &Option<String>, what: &str, ctx: &str) -> Result<()> {
        match value.as_ref().or(default.as_ref()) {
            Some(v) => parse_rational(v).map(|_| ()).map_err(|e| Error::Validation(format!("{ctx}: {what}: {e}"))),
            None => Err(Error::Validation(format!("{ctx}: no value for {what} and no default in params"))),
        }
    }

    fn point_or_space(&self, y: &Option<String>, w: &Option<String>, ctx: &str) -> Result<()> {
        match (y, w) {
            (Some(y), None) => self.set_kind(y, SetKind::Points, ctx),
            (None, Some(w)) => {
                if self.representation.is_none() {
                    return Err(Error::Validation(format!("{ctx}: `w` needs a representation")));
                }
                self.set_kind(w, SetKind::Subspace, ctx)
            }
            _ => Err(Error::Validation(format!("{ctx}: give exactly one of `y` and `w`"))),
        }
    }

    fn function(&self, f: &FunctionSpec, ctx: &str) -> Result<()> {
        let p = &self.params;
        match f {
            FunctionSpec::Cut => Ok(()),
            FunctionSpec::Cy { y, lambda } => {
                self.set_kind(y, SetKind::Points, ctx)?;
                self.rational(lambda, &p.lambda, "lambda", ctx)
            }
            FunctionSpec::Da { a, lambda } => {
                self.set_kind(a, SetKind::Elements, ctx)?;
                self.rational(lambda, &p.lambda, "lambda", ctx)
            }
            FunctionSpec::GammaW { w, lambda } => {
                self.point_or_space(&None, &Some(w.clone()), ctx)?;
                self.rational(lambda, &p.lambda, "lambda", ctx)
            }
        }
    }

    /// Checks that every reference resolves, every rational parses and the
    /// caps are positive.
    pub fn validate(&self) -> Result<()> {
        if let Some(c) = &self.caps {
            c.validate()?;
        }
        for (field, v) in [
            ("lambda", &self.params.lambda),
            ("alpha", &self.params.alpha),
            ("epsilon", &self.params.epsilon),
            ("mu", &self.params.mu),
        ] {
            if let Some(v) = v {
                parse_rational(v).map_err(|e| Error::Validation(format!("params.{field}: {e}")))?;
            }
        }
        for (name, spec) in &self.sets {
            let ctx = format!("set `{name}`");
            match spec {
                SetSpec::Stabilizer(y) => self.set_kind(y, SetKind::Points, &ctx)?,
                SetSpec::Subspace(_) | SetSpec::WholeSpace if self.representation.is_none() => {
                    return Err(Error::Validation(format!("{ctx}: subspaces need a representation")));
                }
                SetSpec::ImageConstrained { k, l } if k > l => {
                    return Err(Error::Validation(format!("{ctx}: need k <= l, got k = {k}, l = {l}")));
                }
                _ => {}
            }
        }
        if let ActionSpec::Coset(h) = &self.action {
            if !matches!(self.sets.get(h), Some(SetSpec::Subgroup(_))) {
                return Err(Error::Validation(format!("action: coset subgroup `{h}` must name a `subgroup` set")));
            }
        }
        let tasks = self.all_tasks();
        if tasks.is_empty() {
            return Err(Error::Validation("scenario has no tasks".into()));
        }
        let p = &self.params;
        for (i, task) in tasks.iter().enumerate() {
            let ctx = format!("task {i} ({})", task.name());
            let ctx = ctx.as_str();
            match task {
                Task::Orbits | Task::Subgroups => {}
                Task::Stabilizer { y } | Task::Mu { y } => self.set_kind(y, SetKind::Points, ctx)?,
                Task::Symmetry { y, alpha } => {
                    self.set_kind(y, SetKind::Points, ctx)?;
                    self.rational(alpha, &p.alpha, "alpha", ctx)?;
                }
                Task::OrbitBounds { a, y } | Task::Kneser { a, y } | Task::FreimanRemarks { a, y } => {
                    self.set_kind(a, SetKind::Elements, ctx)?;
                    self.set_kind(y, SetKind::Points, ctx)?;
                }
                Task::Submodular { function }
                | Task::Invariance { function }
                | Task::Minimize { function }
                | Task::Core { function } => self.function(function, ctx)?,
                Task::AtomIdentity { function } => {
                    self.function(function, ctx)?;
                    if !matches!(function, FunctionSpec::Cy { .. } | FunctionSpec::GammaW { .. }) {
                        return Err(Error::Validation(format!("{ctx}: needs a function on the subsets of G (c_y or gamma_w)")));
                    }
                }
                Task::LatticeMinimize { a, lambda } => {
                    if self.representation.is_none() {
                        return Err(Error::Validation(format!("{ctx}: needs a representation")));
                    }
                    self.set_kind(a, SetKind::Elements, ctx)?;
                    self.rational(lambda, &p.lambda, "lambda", ctx)?;
                }
                Task::Murphy { a, y, w } => {
                    self.set_kind(a, SetKind::Elements, ctx)?;
                    self.point_or_space(y, w, ctx)?;
                }
                Task::SmallGrowth { a, y, w, alpha }
                | Task::Freiman { a, y, w, alpha }
                | Task::Petridis { a, y, w, alpha }
                | Task::Taod { a, y, w, alpha, .. } => {
                    self.set_kind(a, SetKind::Elements, ctx)?;
                    self.point_or_space(y, w, ctx)?;
                    self.rational(alpha, &p.alpha, "alpha", ctx)?;
                }
                Task::Ruzsa { a, b, y } => {
                    self.set_kind(a, SetKind::Elements, ctx)?;
                    self.set_kind(b, SetKind::Elements, ctx)?;
                    self.set_kind(y, SetKind::Points, ctx)?;
                }
                Task::Hamidoune { y, w, lambda, a0 } => {
                    self.point_or_space(y, w, ctx)?;
                    self.rational(lambda, &p.lambda, "lambda", ctx)?;
                    if let Some(a0) = a0 {
                        if w.is_some() {
                            return Err(Error::Validation(format!("{ctx}: `a0` applies to the set version only")));
                        }
                        self.set_kind(a0, SetKind::Elements, ctx)?;
                    }
                }
                Task::TaoDoubling { a, y, epsilon } => {
                    self.set_kind(a, SetKind::Elements, ctx)?;
                    self.set_kind(y, SetKind::Points, ctx)?;
                    self.rational(epsilon, &p.epsilon, "epsilon", ctx)?;
                }
                Task::FragmentBounds { a, lambda, mu } => {
                    self.set_kind(a, SetKind::Elements, ctx)?;
                    self.rational(lambda, &p.lambda, "lambda", ctx)?;
                    if let Some(m) = mu.as_ref().or(p.mu.as_ref()) {
                        parse_rational(m).map_err(|e| Error::Validation(format!("{ctx}: mu: {e}")))?;
                    }
                }
                Task::DoublingScan { epsilons } => {
                    for e in epsilons {
                        parse_rational(e).map_err(|err| Error::Validation(format!("{ctx}: epsilon: {err}")))?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// One executed task.
#[derive(Clone, Debug, Serialize)]
pub struct TaskOutcome {
    pub index: usize,
    pub task: String,
    /// A theorem-backed check failed on an instance satisfying its
    /// hypotheses.
    pub violation: bool,
    pub result: Value,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub version: String,
    pub scenario: Scenario,
    pub seed: u64,
    pub group: String,
    pub group_order: usize,
    pub domain_size: usize,
    pub tasks: Vec<TaskOutcome>,
    pub violations: usize,
}

impl Report {
    /// JSON without the timing fields, for byte-level comparison of runs.
    pub fn to_json_without_timing(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(tasks) = v.get_mut("tasks").and_then(Value::as_array_mut) {
            for t in tasks {
                if let Some(o) = t.as_object_mut() {
                    o.remove("elapsed_ms");
                }
            }
        }
        v
    }

    pub fn violating_tasks(&self) -> Vec<&TaskOutcome> {
        self.tasks.iter().filter(|t| t.violation).collect()
    }
}

#[derive(Clone)]
enum Resolved {
    Elements(ElementSet),
    Points(PointSet),
    Subspace(Subspace),
}

struct Context<'a> {
    scenario: &'a Scenario,
    caps: Caps,
    seed: u64,
    group: Arc<FiniteGroup>,
    action: Arc<GroupAction>,
    rep: Option<Arc<Representation>>,
    sets: BTreeMap<String, Resolved>,
}

fn elements_from_cycles(group: &FiniteGroup, cycles: &[String]) -> Result<ElementSet> {
    let idx = cycles
        .iter()
        .map(|c| group.element_from_cycles(c))
        .collect::<Result<Vec<_>>>()?;
    Ok(group.set_of(idx))
}

impl<'a> Context<'a> {
    fn build(scenario: &'a Scenario, caps: &Caps) -> Result<Self> {
        let caps = caps.clone();
        caps.validate()?;
        let group = scenario.group.build(&caps)?;
        let mut ctx = Context {
            scenario,
            caps,
            seed: scenario.seed(),
            group: Arc::clone(&group),
            action: Arc::new(GroupAction::trivial(Arc::clone(&group), 1)?),
            rep: None,
            sets: BTreeMap::new(),
        };
        // Element sets first: a coset action may refer to one.
        for (name, spec) in &scenario.sets {
            if spec.kind() == SetKind::Elements && !matches!(spec, SetSpec::Stabilizer(_)) {
                let s = ctx.element_set(spec)?;
                ctx.sets.insert(name.clone(), Resolved::Elements(s));
            }
        }
        ctx.action = Arc::new(ctx.build_action()?);
        for (name, spec) in &scenario.sets {
            if spec.kind() == SetKind::Points {
                let n = ctx.action.domain_size();
                let set = match spec {
                    SetSpec::Points(p) => {
                        if let Some(&bad) = p.iter().find(|&&x| x >= n) {
                            return Err(Error::Validation(format!("set `{name}`: point {bad} outside 0..{n}")));
                        }
                        ctx.action.point_set(p.iter().copied())
                    }
                    _ => ctx.action.all_points(),
                };
                ctx.sets.insert(name.clone(), Resolved::Points(set));
            }
        }
        for (name, spec) in &scenario.sets {
            if let SetSpec::Stabilizer(y) = spec {
                let y = ctx.points(y)?;
                let s = ctx.action.set_stabilizer(&y).members().clone();
                ctx.sets.insert(name.clone(), Resolved::Elements(s));
            }
        }
        ctx.rep = match &scenario.representation {
            None => None,
            Some(RepresentationSpec::Permutation(p)) => Some(Arc::new(Representation::permutation_matrices(&ctx.action, *p)?)),
            Some(RepresentationSpec::GeneratorImages { p, dim, matrices }) => {
                let ms = matrices.iter().map(|m| FpMatrix::from_rows(*p, m)).collect::<Result<Vec<_>>>()?;
                let rep = Representation::from_generator_images(Arc::clone(&ctx.group), *p, *dim, ms).map_err(as_input_error)?;
                Some(Arc::new(rep))
            }
        };
        for (name, spec) in &scenario.sets {
            let rep = ctx.rep.as_ref();
            let w = match (spec, rep) {
                (SetSpec::Subspace(v), Some(r)) => Subspace::span(r.p(), r.dim(), v)?,
                (SetSpec::WholeSpace, Some(r)) => Subspace::whole(r.p(), r.dim())?,
                _ => continue,
            };
            ctx.sets.insert(name.clone(), Resolved::Subspace(w));
        }
        Ok(ctx)
    }

    fn element_set(&self, spec: &SetSpec) -> Result<ElementSet> {
        let g = &self.group;
        Ok(match spec {
            SetSpec::Elements(c) => elements_from_cycles(g, c)?,
            SetSpec::ElementIndices(ix) => {
                if let Some(&bad) = ix.iter().find(|&&i| i >= g.order()) {
                    return Err(Error::Validation(format!("element index {bad} outside 0..{}", g.order())));
                }
                g.set_of(ix.iter().copied())
            }
            SetSpec::Subgroup(c) => g.generated_subgroup(&elements_from_cycles(g, c)?).members().clone(),
            SetSpec::AllElements => g.full_set(),
            SetSpec::ImageConstrained { k, l } => {
                if *l > g.degree() {
                    return Err(Error::Validation(format!("image_constrained: l = {l} exceeds degree {}", g.degree())));
                }
                g.set_of((0..g.order()).filter(|&e| (0..*k).all(|i| g.element(e).apply(i) < *l)))
            }
            _ => unreachable!("not an element set"),
        })
    }

    fn build_action(&self) -> Result<GroupAction> {
        let g = Arc::clone(&self.group);
        match &self.scenario.action {
            ActionSpec::Natural => GroupAction::natural_with(g, &self.caps),
            ActionSpec::LeftTranslation => GroupAction::left_translation(g),
            ActionSpec::Conjugation => GroupAction::conjugation(g),
            ActionSpec::Coset(h) => {
                let members = self.elements(h)?;
                let sub = crate::group::Subgroup::new(Arc::clone(&g), members)?;
                GroupAction::coset_action(g, &sub)
            }
            ActionSpec::Trivial(n) => GroupAction::trivial(g, *n),
            ActionSpec::Table(rows) => {
                let n = rows.first().map_or(0, Vec::len);
                GroupAction::from_rows(g, n, rows.clone(), &self.caps).map_err(as_input_error)
            }
        }
    }

    fn elements(&self, name: &str) -> Result<ElementSet> {
        match self.sets.get(name) {
            Some(Resolved::Elements(s)) => Ok(s.clone()),
            _ => Err(Error::Validation(format!("`{name}` is not a resolved element set"))),
        }
    }

    fn points(&self, name: &str) -> Result<PointSet> {
        match self.sets.get(name) {
            Some(Resolved::Points(s)) => Ok(s.clone()),
            _ => Err(Error::Validation(format!("`{name}` is not a resolved point set"))),
        }
    }

    fn subspace(&self, name: &str) -> Result<Subspace> {
        match self.sets.get(name) {
            Some(Resolved::Subspace(s)) => Ok(s.clone()),
            _ => Err(Error::Validation(format!("`{name}` is not a resolved subspace"))),
        }
    }

    fn rep(&self) -> Result<&Arc<Representation>> {
        self.rep.as_ref().ok_or_else(|| Error::Validation("no representation in scenario".into()))
    }

    fn param(&self, value: &Option<String>, default: &Option<String>) -> Result<Rational> {
        let text = value
            .as_ref()
            .or(default.as_ref())
            .ok_or_else(|| Error::Validation("missing parameter".into()))?;
        parse_rational(text)
    }

    fn lambda(&self, v: &Option<String>) -> Result<Rational> {
        self.param(v, &self.scenario.params.lambda)
    }

    fn alpha(&self, v: &Option<String>) -> Result<Rational> {
        self.param(v, &self.scenario.params.alpha)
    }

    fn function(&self, f: &FunctionSpec) -> Result<(DynSetFunction, bool)> {
        // The flag says whether G-invariance is a theorem for this family.
        Ok(match f {
            FunctionSpec::Cut => (Arc::new(CutFunction::new(Arc::clone(&self.action))?), true),
            FunctionSpec::Cy { y, lambda } => {
                (Arc::new(CyFunction::new(Arc::clone(&self.action), self.points(y)?, self.lambda(lambda)?)?), true)
            }
            FunctionSpec::Da { a, lambda } => (
                Arc::new(DaFunction::new(Arc::clone(&self.action), self.elements(a)?, self.lambda(lambda)?)?),
                self.group.is_abelian(),
            ),
            FunctionSpec::GammaW { w, lambda } => {
                (Arc::new(GammaW::new(Arc::clone(self.rep()?), self.subspace(w)?, self.lambda(lambda)?)?), true)
            }
        })
    }

    fn symmetry(&self, f: &FunctionSpec) -> GroundSymmetry<'_> {
        match f {
            FunctionSpec::Cut | FunctionSpec::Da { .. } => GroundSymmetry::Points(&self.action),
            FunctionSpec::Cy { .. } | FunctionSpec::GammaW { .. } => GroundSymmetry::Translation(&self.group),
        }
    }

    fn check(&self, r: CheckReport) -> Result<(Value, bool)> {
        let v = r.violation();
        Ok((serde_json::to_value(&r).expect("report serializes"), v))
    }

    fn run_task(&self, task: &Task) -> Result<(Value, bool)> {
        let (caps, seed) = (&self.caps, self.seed);
        let action = &self.action;
        let group = &self.group;
        match task {
            Task::Orbits => {
                let d = action.orbit_decomposition();
                let orbits: Vec<Vec<usize>> = d.orbits.iter().map(bits::members).collect();
                Ok((json!({ "orbits": orbits, "representatives": d.representatives, "profile": action.profile() }), false))
            }
            Task::Subgroups => {
                let subs = group.enumerate_subgroups(caps)?;
                let mut orders: BTreeMap<usize, usize> = BTreeMap::new();
                for s in &subs {
                    *orders.entry(s.order()).or_default() += 1;
                }
                Ok((json!({ "count": subs.len(), "by_order": orders }), false))
            }
            Task::Stabilizer { y } => {
                let s = action.set_stabilizer(&self.points(y)?);
                Ok((json!({ "order": s.order(), "elements": s.elements(), "cycles": cycle_strings(group, &s.elements()) }), false))
            }
            Task::Symmetry { y, alpha } => {
                let ys = self.points(y)?;
                let a = self.alpha(alpha)?;
                let sym = action.symmetry_set(&ys, a)?;
                let weak = action.weak_stabilizer(&ys)?;
                let ratios: Vec<String> = action.overlap_ratios(&ys).iter().map(|r| r.to_string()).collect();
                Ok((
                    json!({ "alpha": a.to_string(), "sym": bits::members(&sym), "weak_stabilizer": bits::members(&weak), "overlap_ratios": ratios }),
                    false,
                ))
            }
            Task::OrbitBounds { a, y } => {
                let b = action.orbit_reduction_bounds(&self.elements(a)?, &self.points(y)?)?;
                Ok((serde_json::to_value(b).expect("serializes"), false))
            }
            Task::Mu { y } => {
                let m = mu_ratio(action, &self.points(y)?, caps)?;
                Ok((serde_json::to_value(m).expect("serializes"), false))
            }
            Task::Submodular { function } => {
                let (f, _) = self.function(function)?;
                let v = check_submodular(f.as_ref(), caps, seed);
                let violation = !v.holds;
                Ok((json!({ "function": f.label(), "verdict": v }), violation))
            }
            Task::Invariance { function } => {
                let (f, theorem) = self.function(function)?;
                let v = check_invariance(f.as_ref(), self.symmetry(function), caps, seed)?;
                let violation = theorem && !v.holds;
                Ok((json!({ "function": f.label(), "invariance_is_theorem": theorem, "verdict": v }), violation))
            }
            Task::Minimize { function } => {
                let (f, _) = self.function(function)?;
                let m = minimize_nonempty(f.as_ref(), caps)?;
                let violation = !m.atoms_pairwise_disjoint();
                Ok((json!({ "function": f.label(), "atoms_pairwise_disjoint": !violation, "result": m }), violation))
            }
            Task::Core { function } => {
                let (f, _) = self.function(function)?;
                let c = core_set(f.as_ref(), self.symmetry(function), caps, seed)?;
                Ok((json!({ "function": f.label(), "core": c }), false))
            }
            Task::AtomIdentity { function } => {
                let (f, _) = self.function(function)?;
                let a = atom_identity(f.as_ref(), group, caps, seed)?;
                let cosets: Vec<Vec<usize>> = a.cosets.iter().map(|&m| bits::mask_members(m)).collect();
                Ok((
                    json!({ "function": f.label(), "subgroup": a.subgroup.elements(), "cosets": cosets, "result": a.result }),
                    false,
                ))
            }
            Task::LatticeMinimize { a, lambda } => {
                let rep = self.rep()?;
                let f = DeltaA::new(Arc::clone(rep), self.elements(a)?, self.lambda(lambda)?)?;
                let m = minimize_on_lattice(&f, caps)?;
                let all = enumerate_subspaces(rep.p(), rep.dim(), caps)?;
                let sub = check_lattice_submodular(&f, &all)?;
                let violation = !m.atoms_pairwise_trivial() || !sub.holds;
                let atoms: Vec<&[Vec<u32>]> = m.atoms.iter().map(|s| s.basis()).collect();
                Ok((
                    json!({
                        "min_value": m.min_value.to_string(),
                        "fragment_count": m.fragment_count,
                        "atom_dim": m.atom_dim,
                        "atoms": atoms,
                        "atoms_pairwise_trivial": m.atoms_pairwise_trivial(),
                        "lattice_submodular": sub.holds,
                        "pairs_checked": sub.pairs_checked,
                    }),
                    violation,
                ))
            }
            Task::Kneser { a, y } => self.check(theorems::kneser_check(action, &self.elements(a)?, &self.points(y)?)?),
            Task::Murphy { a, y, w } => {
                let a = self.elements(a)?;
                match (y, w) {
                    (Some(y), _) => self.check(theorems::check_murphy(action, &a, &self.points(y)?)?),
                    (None, Some(w)) => self.check(theorems::check_murphy_linear(self.rep()?, &a, &self.subspace(w)?)?),
                    _ => Err(Error::Validation("murphy needs y or w".into())),
                }
            }
            Task::SmallGrowth { a, y, w, alpha } => {
                let (a, al) = (self.elements(a)?, self.alpha(alpha)?);
                match (y, w) {
                    (Some(y), _) => self.check(theorems::check_small_growth(action, &a, &self.points(y)?, al)?),
                    (None, Some(w)) => {
                        self.check(theorems::check_small_growth_linear(self.rep()?, &a, &self.subspace(w)?, al)?)
                    }
                    _ => Err(Error::Validation("small_growth needs y or w".into())),
                }
            }
            Task::Freiman { a, y, w, alpha } => {
                let (a, al) = (self.elements(a)?, self.alpha(alpha)?);
                match (y, w) {
                    (Some(y), _) => self.check(theorems::check_freiman(action, &a, &self.points(y)?, al)?),
                    (None, Some(w)) => self.check(theorems::check_freiman_linear(self.rep()?, &a, &self.subspace(w)?, al)?),
                    _ => Err(Error::Validation("freiman needs y or w".into())),
                }
            }
            Task::FreimanRemarks { a, y } => {
                self.check(theorems::check_freiman_remarks(action, &self.elements(a)?, &self.points(y)?)?)
            }
            Task::Ruzsa { a, b, y } => {
                self.check(theorems::check_ruzsa_triple(action, &self.elements(a)?, &self.elements(b)?, &self.points(y)?)?)
            }
            Task::Hamidoune { y, w, lambda, a0 } => {
                let l = self.lambda(lambda)?;
                match (y, w) {
                    (Some(y), _) => {
                        let a0 = a0.as_ref().map(|n| self.elements(n)).transpose()?;
                        self.check(theorems::check_hamidoune(action, &self.points(y)?, l, a0.as_ref(), caps, seed)?)
                    }
                    (None, Some(w)) => self.check(theorems::check_hamidoune_linear(self.rep()?, &self.subspace(w)?, l, caps, seed)?),
                    _ => Err(Error::Validation("hamidoune needs y or w".into())),
                }
            }
            Task::Petridis { a, y, w, alpha } => {
                let (a, al) = (self.elements(a)?, self.alpha(alpha)?);
                match (y, w) {
                    (Some(y), _) => self.check(theorems::find_petridis_witness(action, &a, &self.points(y)?, al, caps, seed)?),
                    (None, Some(w)) => self.check(theorems::find_petridis_witness_linear(
                        self.rep()?,
                        &a,
                        &self.subspace(w)?,
                        al,
                        caps,
                        seed,
                    )?),
                    _ => Err(Error::Validation("petridis needs y or w".into())),
                }
            }
            Task::TaoDoubling { a, y, epsilon } => {
                let e = self.param(epsilon, &self.scenario.params.epsilon)?;
                self.check(theorems::check_tao_small_doubling(action, &self.elements(a)?, &self.points(y)?, e, caps, seed)?)
            }
            Task::Taod { a, y, w, alpha, powers } => {
                let (a, al) = (self.elements(a)?, self.alpha(alpha)?);
                let n = powers.unwrap_or(DEFAULT_POWER_MAX);
                match (y, w) {
                    (Some(y), _) => self.check(theorems::find_taod_witness(action, &a, &self.points(y)?, al, n, caps, seed)?),
                    (None, Some(w)) => self.check(theorems::find_taod_witness_linear(
                        self.rep()?,
                        &a,
                        &self.subspace(w)?,
                        al,
                        n,
                        caps,
                        seed,
                    )?),
                    _ => Err(Error::Validation("taod needs y or w".into())),
                }
            }
            Task::FragmentBounds { a, lambda, mu } => {
                let l = self.lambda(lambda)?;
                let m = match mu.as_ref().or(self.scenario.params.mu.as_ref()) {
                    Some(t) => Some(parse_rational(t)?),
                    None => None,
                };
                self.check(theorems::check_fragment_bounds(action, &self.elements(a)?, l, m, caps)?)
            }
            Task::DoublingScan { epsilons } => {
                let grid = epsilons.iter().map(|e| parse_rational(e)).collect::<Result<Vec<_>>>()?;
                let scan = theorems::tao_doubling_scan(action, &grid, caps, seed)?;
                let violation = scan.violations > 0;
                Ok((serde_json::to_value(scan).expect("serializes"), violation))
            }
        }
    }
}

fn cycle_strings(group: &FiniteGroup, elements: &[usize]) -> Vec<String> {
    elements.iter().map(|&e| group.element(e).to_string()).collect()
}

/// Runs every task in order under `caps`, which callers usually take from
/// [`Scenario::effective_caps`]. Errors abort the run and name the task.
/// A user-supplied table or matrix list that breaks the action or
/// homomorphism law is bad input, not a failed check.
fn as_input_error(e: Error) -> Error {
    match e {
        Error::Invariant(m) => Error::Validation(m),
        other => other,
    }
}

pub fn run(scenario: &Scenario, caps: &Caps) -> Result<Report> {
    scenario.validate()?;
    let ctx = Context::build(scenario, caps)?;
    let mut tasks = Vec::new();
    for (index, task) in scenario.all_tasks().into_iter().enumerate() {
        let start = Instant::now();
        let (result, violation) = ctx.run_task(task).map_err(|e| annotate(e, index, task.name()))?;
        tasks.push(TaskOutcome {
            index,
            task: task.name().to_string(),
            violation,
            result,
            elapsed_ms: start.elapsed().as_secs_f64() * 1000.0,
        });
    }
    let violations = tasks.iter().filter(|t| t.violation).count();
    Ok(Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        scenario: scenario.clone(),
        seed: ctx.seed,
        group: scenario.group.to_string(),
        group_order: ctx.group.order(),
        domain_size: ctx.action.domain_size(),
        tasks,
        violations,
    })
}

fn annotate(e: Error, index: usize, name: &str) -> Error {
    let prefix = format!("task {index} ({name}): ");
    match e {
        Error::Capacity { .. } => e,
        Error::Structural(m) => Error::Structural(prefix + &m),
        Error::Domain(m) => Error::Domain(prefix + &m),
        Error::Invariant(m) => Error::Invariant(prefix + &m),
        Error::Parse(m) => Error::Parse(prefix + &m),
        Error::Validation(m) => Error::Validation(prefix + &m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_scenario() {
        let s = parse_scenario(r#"{"group": "symmetric(3)", "action": "natural", "task": {"task": "orbits"}}"#).unwrap();
        assert_eq!(s.group, GroupSpec::Symmetric(3));
        let r = run(&s, &Caps::default()).unwrap();
        assert_eq!(r.tasks[0].result["orbits"], json!([[0, 1, 2]]));
    }

    #[test]
    fn group_text_forms() {
        assert_eq!(
            GroupSpec::parse("product(cyclic(2), cyclic(3))").unwrap(),
            GroupSpec::Product(Box::new(GroupSpec::Cyclic(2)), Box::new(GroupSpec::Cyclic(3)))
        );
        assert!(GroupSpec::parse("symmetric(3").is_err());
        assert!(GroupSpec::parse("free(2)").is_err());
        let s: Scenario = serde_json::from_str(r#"{"group": {"dihedral": 4}, "tasks": [{"task": "subgroups"}]}"#).unwrap();
        assert_eq!(s.group, GroupSpec::Dihedral(4));
    }

    #[test]
    fn validation_errors() {
        let decimal = r#"{"group": "symmetric(3)", "params": {"alpha": "1.5"}, "tasks": [{"task": "orbits"}]}"#;
        assert!(matches!(parse_scenario(decimal), Err(Error::Validation(_))));
        let ok = r#"{"group": "symmetric(3)", "params": {"alpha": "3/2"}, "tasks": [{"task": "orbits"}]}"#;
        assert!(parse_scenario(ok).is_ok());
        let dangling = r#"{"group": "symmetric(3)", "tasks": [{"task": "mu", "y": "Y"}]}"#;
        match parse_scenario(dangling) {
            Err(Error::Validation(m)) => assert!(m.contains("`Y`"), "{m}"),
            other => panic!("{other:?}"),
        }
        let unknown = r#"{"group": "symmetric(3)", "tasks": [{"task": "orbits"}], "colour": 1}"#;
        assert!(matches!(parse_scenario(unknown), Err(Error::Validation(_))));
        let syntax = "{\"group\": \"symmetric(3)\",\n \"tasks\": [}";
        match parse_scenario(syntax) {
            Err(Error::Parse(m)) => assert!(m.contains("line 2"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn mu_and_kneser_tasks() {
        let text = r#"{
            "group": "symmetric(4)",
            "sets": {"Y": {"points": [0]}, "A0": {"image_constrained": {"k": 1, "l": 2}}},
            "tasks": [{"task": "mu", "y": "Y"}, {"task": "kneser", "a": "A0", "y": "Y"}]
        }"#;
        let r = run(&parse_scenario(text).unwrap(), &Caps::default()).unwrap();
        assert_eq!(r.tasks[0].result["mu"], json!("1/6"));
        let detail = r.tasks[1].result["conclusions"][0]["detail"].as_str().unwrap();
        assert_eq!(detail, "4 + 2 = 6 vs 12 + 1 = 13");
        assert_eq!(r.violations, 0);
    }
}
