//! Deterministic seed derivation for independent parallel runs.
//!
//! Every run and sweep cell gets its own generator seed derived from the batch
//! seed through a fixed mixer chain, so adding cells or reordering execution
//! never perturbs other results.

/// SplitMix64 finalizer (Stafford Mix13). Bijective on u64.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `parts` into `base`: `mix64(...mix64(mix64(base) ^ p0)... ^ pk)`.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mut state = mix64(base);
    for &part in parts {
        state = mix64(state ^ part);
    }
    state
}

/// Seed for run `run_index` within a batch.
pub fn run_seed(batch_seed: u64, run_index: u64) -> u64 {
    derive_seed(batch_seed, &[run_index])
}

/// Seed for a sweep cell, keyed on the cell's (N, μ, ε). The floats enter as
/// their IEEE 754 bit patterns.
pub fn cell_seed(batch_seed: u64, n_steps: usize, mu: f64, epsilon: f64) -> u64 {
    derive_seed(
        batch_seed,
        &[n_steps as u64, mu.to_bits(), epsilon.to_bits()],
    )
}
