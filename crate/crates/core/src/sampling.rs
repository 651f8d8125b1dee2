//! Seeded randomness and the exhaustive/sampled tag carried by verdicts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Whether a verdict covers every case or a seeded sample of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Exhaustiveness {
    Exhaustive,
    Sampled { trials: u64, seed: u64 },
}

impl Exhaustiveness {
    /// The weaker of two modes; sampled wins, keeping the first seed.
    pub fn combine(self, other: Exhaustiveness) -> Exhaustiveness {
        match (self, other) {
            (Exhaustiveness::Exhaustive, o) => o,
            (s @ Exhaustiveness::Sampled { .. }, Exhaustiveness::Exhaustive) => s,
            (Exhaustiveness::Sampled { trials, seed }, Exhaustiveness::Sampled { trials: t2, .. }) => {
                Exhaustiveness::Sampled { trials: trials + t2, seed }
            }
        }
    }

    pub fn is_exhaustive(&self) -> bool {
        matches!(self, Exhaustiveness::Exhaustive)
    }
}

/// Independent stream `stream` derived from `seed`.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}
