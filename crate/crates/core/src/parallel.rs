//! Deterministic parallel sample evaluation.
//!
//! Every sample owns an RNG stream derived from (master seed, sample index),
//! and results are collected in index order, so output never depends on the
//! number of workers or on scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering};

/// Independent RNG stream for one sample.
pub fn sample_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Outcome of one sample: its value, or the panic message if it panicked.
pub type SampleResult<T> = std::result::Result<T, String>;

/// Evaluates `f(0..n)` on `workers` threads (0 means all available cores).
/// A panicking sample is isolated and reported in place. `progress` is
/// called with (completed, n) after every sample, from worker threads.
pub fn parallel_map<T, F, P>(workers: usize, n: usize, f: F, progress: P) -> Vec<SampleResult<T>>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
    P: Fn(usize, usize) + Sync,
{
    let done = AtomicUsize::new(0);
    let run = |i: usize| {
        let r = catch_unwind(AssertUnwindSafe(|| f(i))).map_err(panic_message);
        progress(done.fetch_add(1, Ordering::Relaxed) + 1, n);
        r
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build();
    match pool {
        Ok(pool) => pool.install(|| (0..n).into_par_iter().map(run).collect()),
        Err(_) => (0..n).map(run).collect(),
    }
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "sample panicked".to_string()
    }
}
