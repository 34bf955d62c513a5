//! Named, counter-based random streams derived from one master seed.
//!
//! Every unit of parallel work (a sample, a run, a direction) gets its own
//! ChaCha stream keyed by `(master_seed, path)`, so results never depend on
//! how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a path of tags into a 64-bit key.
pub fn derive_key(master_seed: u64, path: &[u64]) -> u64 {
    let mut state = master_seed;
    let mut key = splitmix64(&mut state);
    for &tag in path {
        state ^= tag.wrapping_mul(0xD6E8_FEB8_6659_FD93) ^ key;
        key = splitmix64(&mut state);
    }
    key
}

/// Hashes a label (feeder name, method name) into a stream tag.
pub fn tag(label: &str) -> u64 {
    // FNV-1a
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

pub fn stream(master_seed: u64, path: &[u64]) -> StreamRng {
    let mut state = derive_key(master_seed, path);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}
