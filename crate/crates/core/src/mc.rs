//! Seeded, worker-count independent Monte Carlo plumbing.
//!
//! Work is cut into fixed-size batches; batch `b` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` on stream `b`. Batch results are
//! collected in order and merged sequentially, so the output does not depend
//! on how rayon schedules the batches.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const DEFAULT_BATCH: u64 = 1 << 16;
pub const THREADS_ENV: &str = "TORUS_RECUR_THREADS";

pub fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

/// Runs `f(rng, batch_index, count)` over `ceil(samples / batch)` batches.
pub fn run_batches<T, F>(seed: u64, samples: u64, batch: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64, u64) -> T + Sync,
{
    let batch = batch.max(1);
    let nb = samples.div_ceil(batch);
    (0..nb)
        .into_par_iter()
        .map(|b| {
            let count = batch.min(samples - b * batch);
            let mut rng = batch_rng(seed, b);
            f(&mut rng, b, count)
        })
        .collect()
}

/// Running sums for a mean and its standard error.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, v: f64) {
        self.count += 1;
        self.sum += v;
        self.sum_sq += v * v;
    }

    pub fn merge(mut self, o: &Moments) -> Moments {
        self.count += o.count;
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
        self
    }

    pub fn merge_all<'a>(parts: impl IntoIterator<Item = &'a Moments>) -> Moments {
        parts.into_iter().fold(Moments::default(), |a, b| a.merge(b))
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            return f64::NAN;
        }
        self.sum / self.count as f64
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let m = self.sum / n;
        ((self.sum_sq / n - m * m) * n / (n - 1.0)).max(0.0)
    }

    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            return f64::NAN;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

/// Worker count from `TORUS_RECUR_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|n: &usize| *n > 0)
}

/// Sizes the global rayon pool from the environment; later calls are no-ops.
pub fn configure_threads() {
    if let Some(n) = threads_from_env() {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}
