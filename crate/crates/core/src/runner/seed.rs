//! Stable seed derivation.
//!
//! Every stochastic component derives its seed from the run's global seed
//! through a fixed splitmix64 fold, so results survive refactors and are
//! independent of evaluation order and parallelism:
//!
//! * episode seed  = fold(global, [1, generation, genome id])
//! * trial seed    = fold(global, [2, trial index])  — shared across the
//!   policies being compared, pairing their spawn layouts per trial
//! * population RNG = fold(global, [3])

const EPISODE_STREAM: u64 = 1;
const TRIAL_STREAM: u64 = 2;
const POPULATION_STREAM: u64 = 3;

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Fold the parts into the global seed, one splitmix64 round per part.
pub fn derive_seed(global: u64, parts: &[u64]) -> u64 {
    let mut state = splitmix64(global);
    for &p in parts {
        state = splitmix64(state ^ splitmix64(p));
    }
    state
}

pub fn episode_seed(global: u64, generation: u64, genome_id: u64) -> u64 {
    derive_seed(global, &[EPISODE_STREAM, generation, genome_id])
}

pub fn trial_seed(global: u64, trial: u64) -> u64 {
    derive_seed(global, &[TRIAL_STREAM, trial])
}

pub fn population_seed(global: u64) -> u64 {
    derive_seed(global, &[POPULATION_STREAM])
}
