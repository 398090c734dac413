//! Execution strategy for data-parallel loops and deterministic RNG streams.
//!
//! Randomized batch work is split into fixed-size chunks. Chunk `i` draws from
//! stream `i` of a ChaCha8 generator keyed by the base seed, so results are
//! identical whether chunks run on the rayon pool or sequentially, and
//! independent of the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{KmError, Result};

/// The random generator used by every sampling routine.
pub type KmRng = ChaCha8Rng;

/// Identifier recorded in experiment metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.9, seed_from_u64, one stream per chunk)";

/// Trials per chunk; also the unit of work handed to a worker.
pub const CHUNK_SIZE: u64 = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    /// Run chunks on the rayon pool (falls back to sequential without the
    /// `parallel` feature).
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

pub fn rng_from_seed(seed: u64) -> KmRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` derived from `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> KmRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Applies `f(chunk_index, first_item, item_count)` to every chunk of
/// `0..total` and returns the results in chunk order.
pub fn map_chunks<T, F>(exec: Execution, total: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64, u64) -> T + Sync + Send,
{
    let chunks = total.div_ceil(CHUNK_SIZE);
    let run = |c: u64| {
        let first = c * CHUNK_SIZE;
        let count = CHUNK_SIZE.min(total - first);
        f(c, first, count)
    };
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..chunks).into_par_iter().map(run).collect();
    }
    let _ = exec;
    (0..chunks).map(run).collect()
}

/// Maps `f` over `items`, in parallel when enabled.
pub fn map_items<I, T, F>(exec: Execution, items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Caps the global worker pool. Only the first call has an effect.
pub fn configure_threads(threads: usize) -> Result<()> {
    if threads == 0 {
        return Err(KmError::InvalidArgument("thread count must be positive".into()));
    }
    #[cfg(feature = "parallel")]
    {
        // a second initialization is not an error for callers
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    Ok(())
}
