//! Counter-based seeding and order-preserving parallel maps.
//!
//! Every Monte Carlo sample draws from its own ChaCha stream selected by
//! `(master_seed, purpose, index)`, so results never depend on how work is
//! scheduled across threads. Aggregation always runs over the collected
//! per-sample results in index order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Separates independent uses of one master seed (e.g. the uniform and the
/// Gauss arm of the same run).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Purpose(pub u16);

impl Purpose {
    pub const DEFAULT: Purpose = Purpose(0);
}

pub fn stream_rng(master_seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    assert!(index < 1 << 48, "sample index out of range");
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(((purpose.0 as u64) << 48) | index);
    rng
}

/// `(0..count).map(f)` evaluated on the current rayon pool, results in index
/// order.
pub fn par_map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..count).into_par_iter().map(f).collect()
}
