//! Counter-based random streams.
//!
//! Every stochastic decision draws from a ChaCha8 stream addressed by a
//! four-word key plus a stream number, so results depend only on the key and
//! never on which thread or in which order work items run.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domain tags keep streams for different purposes disjoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Trace = 0x7472_6163_6500_0001,
    Sample = 0x7361_6d70_6c65_0002,
    Augment = 0x6175_676d_656e_0003,
}

/// Stream keyed by `(seed, a, b, domain)`, positioned at stream `stream`.
pub fn counter_rng(seed: u64, domain: Domain, a: u64, b: u64, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    for (chunk, word) in key.chunks_exact_mut(8).zip([seed, a, b, domain as u64]) {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

/// Stream for one ray: keyed by (seed, tx, ray), stream = bounce index
/// (0 is the launch direction).
pub fn ray_rng(seed: u64, tx_index: u32, ray_index: u64, bounce: u32) -> ChaCha8Rng {
    counter_rng(seed, Domain::Trace, tx_index as u64, ray_index, bounce as u64)
}
