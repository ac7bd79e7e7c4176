//! Per-trial random streams.
//!
//! Each trial gets its own ChaCha8 generator keyed by a 128-bit seed derived
//! from `(master_seed, trial)` with SplitMix64. The pair is logged so any
//! single trial can be replayed without running the others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialSeed {
    pub lo: u64,
    pub hi: u64,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl TrialSeed {
    pub fn derive(master: u64, trial: u64) -> Self {
        let mut state = master ^ trial.wrapping_mul(0xD1B5_4A32_D192_ED03);
        let lo = splitmix64(&mut state);
        let hi = splitmix64(&mut state);
        TrialSeed { lo, hi }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.lo.to_le_bytes());
        key[8..16].copy_from_slice(&self.hi.to_le_bytes());
        ChaCha8Rng::from_seed(key)
    }
}
