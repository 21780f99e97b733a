//! Deterministic sub-seeding.
//!
//! Every run derives independent random streams from one master seed. The child
//! seed for a component is
//!
//! ```text
//! child = splitmix64(master ^ fnv1a64(component_name))
//! ```
//!
//! Both functions are fixed here, so the mapping is stable across platforms and
//! releases. Streams are ChaCha8, which is portable and reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Component names used by the harness.
pub mod component {
    pub const ENVIRONMENT: &str = "environment";
    pub const STRATEGY: &str = "strategy";
    pub const HOMEOSTAT: &str = "homeostat";
    pub const PROJECTION: &str = "projection";
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn child_seed(master: u64, component: &str) -> u64 {
    splitmix64(master ^ fnv1a64(component.as_bytes()))
}

pub fn stream(master: u64, component: &str) -> StreamRng {
    StreamRng::seed_from_u64(child_seed(master, component))
}
