//! Deterministic seed derivation for experiment fan-out.
//!
//! Every trial RNG is seeded by folding a label chain into the master seed
//! with SplitMix64 (Steele-Lea-Flood finalizer), so results are independent
//! of scheduling and stable across runs: `derive_seed(master, &[cell, trial])`.

/// SplitMix64 output function: one full avalanche round.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Fold `labels` into `master`: each step XORs the next label into the running
/// state and re-mixes. The empty chain returns the mixed master itself.
pub fn derive_seed(master: u64, labels: &[u64]) -> u64 {
    labels.iter().fold(splitmix64(master), |state, &label| splitmix64(state ^ label))
}
