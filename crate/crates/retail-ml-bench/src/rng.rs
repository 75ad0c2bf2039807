//! Seedable, portable random number generation.
//!
//! Every random choice in this crate flows through [`Prng`], a ChaCha8 stream
//! cipher RNG. Its output is fixed by the ChaCha specification, so a given
//! seed produces the same byte stream on every platform. Distinct concerns
//! (tables, workloads, machines within one fit) derive independent streams by
//! XORing the user seed with a fixed 8-byte ASCII tag. Changing the generator
//! or any tag is a breaking change to all generated data.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Prng = ChaCha8Rng;

pub const TAG_CUSTOMERS: u64 = u64::from_le_bytes(*b"customer");
pub const TAG_PRODUCTS: u64 = u64::from_le_bytes(*b"products");
pub const TAG_SALES: u64 = u64::from_le_bytes(*b"saleline");
pub const TAG_REVIEWS: u64 = u64::from_le_bytes(*b"reviews_");
pub const TAG_WEBLOG: u64 = u64::from_le_bytes(*b"weblog__");
pub const TAG_WORDS: u64 = u64::from_le_bytes(*b"wordpool");

/// RNG stream for one table (or other tagged concern) under a user seed.
pub fn stream(seed: u64, tag: u64) -> Prng {
    Prng::seed_from_u64(seed ^ tag)
}

/// SplitMix64 finalizer; used as a stable stateless hash for split decisions.
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}
