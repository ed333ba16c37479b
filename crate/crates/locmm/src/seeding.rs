//! Seed derivation for reproducible, collision-free random streams.
//!
//! Every random stream in the crate is a ChaCha8 generator keyed by a
//! splitmix64 chain over a master seed and a list of context words. Streams
//! for distinct contexts (replicate index, packing center, entropy center
//! index, ...) never coincide, and results are bit-identical across runs
//! and thread schedules.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Absorb context words into a base seed.
pub fn mix(base: u64, parts: &[u64]) -> u64 {
    let mut state = base ^ 0x6c6f_636d_6d30_3031;
    let mut out = splitmix64(&mut state);
    for &p in parts {
        state ^= p.wrapping_mul(0x2545_f491_4f6c_dd1d);
        out ^= splitmix64(&mut state);
    }
    out
}

/// Hash the exact bit pattern of a point, so streams keyed by a packing
/// center are stable under float round-trips.
pub fn hash_point(x: &[f64]) -> u64 {
    let mut state = 0x8f0e_6aa1_d6f5_2c3d ^ (x.len() as u64);
    let mut out = splitmix64(&mut state);
    for v in x {
        state ^= v.to_bits();
        out ^= splitmix64(&mut state);
    }
    out
}

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn mix_is_stable_and_context_sensitive() {
        assert_eq!(mix(7, &[1, 2, 3]), mix(7, &[1, 2, 3]));
        assert_ne!(mix(7, &[1, 2, 3]), mix(7, &[1, 3, 2]));
        assert_ne!(mix(7, &[1]), mix(8, &[1]));
    }

    #[test]
    fn derived_streams_do_not_collide_on_index_grids() {
        // Audit the replicate-stream derivation over a full experiment grid.
        let mut seen = HashSet::new();
        for mu in 0..16u64 {
            for sig in 0..8u64 {
                for rep in 0..512u64 {
                    assert!(seen.insert(mix(42, &[1, mu, sig, rep])));
                }
            }
        }
    }

    #[test]
    fn point_hash_distinguishes_signed_zero() {
        assert_ne!(hash_point(&[0.0]), hash_point(&[-0.0]));
        assert_eq!(hash_point(&[1.5, 2.5]), hash_point(&[1.5, 2.5]));
    }
}
