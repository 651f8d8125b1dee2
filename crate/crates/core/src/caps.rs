use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Size limits for every exhaustive computation.
///
/// Each limit can be overridden from the environment with a variable named
/// `GSUBMOD_CAP_<FIELD>` in upper case, e.g. `GSUBMOD_CAP_GROUP_ORDER=40320`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Caps {
    /// Largest group produced by closure from generators.
    pub group_order: usize,
    /// Largest group whose multiplication table is materialized.
    pub mul_table_order: usize,
    /// Largest group for which all subgroups are enumerated.
    pub subgroup_enumeration: usize,
    /// Largest ground set checked exhaustively for submodularity.
    pub submodular_exhaustive: usize,
    /// Largest ground set minimized by full enumeration.
    pub minimize_exhaustive: usize,
    /// Maximum number of fragments listed (the count stays exact).
    pub fragment_list: usize,
    /// Maximum number of subspaces in a lattice scan.
    pub subspace_count: usize,
    /// Largest group for which the ratio constant is cross-checked by
    /// enumerating every nonempty subset.
    pub mu_exhaustive: usize,
    /// Largest orbit union for which image sets are enumerated.
    pub image_enumeration: usize,
    /// Largest group over which checker conclusions are enumerated.
    pub conclusion_exhaustive: usize,
    /// Number of trials in sampled checks.
    pub sample_trials: usize,
    /// Largest |G|·|X| for a materialized action table.
    pub action_table: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            group_order: 20160,
            mul_table_order: 2048,
            subgroup_enumeration: 1000,
            submodular_exhaustive: 16,
            minimize_exhaustive: 24,
            fragment_list: 10_000,
            subspace_count: 100_000,
            mu_exhaustive: 20,
            image_enumeration: 20,
            conclusion_exhaustive: 14,
            sample_trials: 10_000,
            action_table: 10_000_000,
        }
    }
}

/// Seed used by sampled checks when none is supplied.
pub const DEFAULT_SEED: u64 = 0xD1CE;

impl Caps {
    /// Defaults with environment overrides applied.
    pub fn from_env() -> Result<Self> {
        let mut caps = Caps::default();
        caps.apply_env(|k| std::env::var(k).ok())?;
        Ok(caps)
    }

    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<()> {
        let fields: [(&str, &mut usize); 12] = [
            ("GROUP_ORDER", &mut self.group_order),
            ("MUL_TABLE_ORDER", &mut self.mul_table_order),
            ("SUBGROUP_ENUMERATION", &mut self.subgroup_enumeration),
            ("SUBMODULAR_EXHAUSTIVE", &mut self.submodular_exhaustive),
            ("MINIMIZE_EXHAUSTIVE", &mut self.minimize_exhaustive),
            ("FRAGMENT_LIST", &mut self.fragment_list),
            ("SUBSPACE_COUNT", &mut self.subspace_count),
            ("MU_EXHAUSTIVE", &mut self.mu_exhaustive),
            ("IMAGE_ENUMERATION", &mut self.image_enumeration),
            ("CONCLUSION_EXHAUSTIVE", &mut self.conclusion_exhaustive),
            ("SAMPLE_TRIALS", &mut self.sample_trials),
            ("ACTION_TABLE", &mut self.action_table),
        ];
        for (name, slot) in fields {
            let key = format!("GSUBMOD_CAP_{name}");
            if let Some(v) = lookup(&key) {
                *slot = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::Validation(format!("{key}=`{v}` is not a positive integer")))?;
            }
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.group_order,
            self.mul_table_order,
            self.subgroup_enumeration,
            self.submodular_exhaustive,
            self.minimize_exhaustive,
            self.fragment_list,
            self.subspace_count,
            self.mu_exhaustive,
            self.image_enumeration,
            self.conclusion_exhaustive,
            self.sample_trials,
            self.action_table,
        ];
        if all.contains(&0) {
            return Err(Error::Validation("caps must be positive".into()));
        }
        if self.minimize_exhaustive > 40 || self.submodular_exhaustive > 40 {
            return Err(Error::Validation(
                "exhaustive set-function caps above 40 points are not supported".into(),
            ));
        }
        Ok(())
    }
}
