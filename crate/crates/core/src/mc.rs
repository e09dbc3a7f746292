//! Deterministic parallel Monte Carlo plumbing.
//!
//! Every sample owns a ChaCha8 stream selected by `(seed, sample index)`, and
//! samples are grouped into fixed-size blocks. Blocks are evaluated in
//! parallel, summed sequentially inside, and combined by pairwise summation in
//! block order, so results do not depend on how many workers run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Environment variable that caps the number of worker threads.
pub const WORKERS_ENV: &str = "QFI_NOISE_WORKERS";

const BLOCK: usize = 256;

pub type SampleRng = ChaCha8Rng;

/// Independent random stream for one sample of a run.
pub fn sample_rng(seed: u64, index: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Worker count from `QFI_NOISE_WORKERS`, falling back to rayon's default.
pub fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(rayon::current_num_threads)
}

/// Runs `f` inside a pool honouring [`worker_count`].
pub fn with_workers<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .expect("failed to build worker pool");
    pool.install(f)
}

/// Element-wise accumulation used by the reduction.
pub trait Accumulate: Send {
    fn accumulate(&mut self, other: &Self);
}

impl Accumulate for f64 {
    fn accumulate(&mut self, other: &Self) {
        *self += *other;
    }
}

impl Accumulate for Vec<f64> {
    fn accumulate(&mut self, other: &Self) {
        for (a, b) in self.iter_mut().zip(other) {
            *a += *b;
        }
    }
}

fn pairwise<T: Accumulate + Clone>(mut parts: Vec<T>) -> Option<T> {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                a.accumulate(&b);
            }
            next.push(a);
        }
        parts = next;
    }
    parts.pop()
}

/// Sums `eval(index, rng)` over `0..samples` deterministically.
pub fn sum_samples<T, F>(samples: usize, seed: u64, eval: F) -> Option<T>
where
    T: Accumulate + Clone,
    F: Fn(usize, &mut SampleRng) -> T + Sync,
{
    let blocks = samples.div_ceil(BLOCK);
    let partial = with_workers(|| {
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                let start = b * BLOCK;
                let end = (start + BLOCK).min(samples);
                let mut acc: Option<T> = None;
                for i in start..end {
                    let mut rng = sample_rng(seed, i as u64);
                    let v = eval(i, &mut rng);
                    match acc.as_mut() {
                        Some(a) => a.accumulate(&v),
                        None => acc = Some(v),
                    }
                }
                acc.expect("non-empty block")
            })
            .collect::<Vec<_>>()
    });
    pairwise(partial)
}

/// Sample mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn from_moments(sum: f64, sum_sq: f64, n: usize) -> Self {
        let nf = n as f64;
        let mean = sum / nf;
        let var = if n > 1 {
            ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        Self {
            mean,
            std_error: (var / nf).sqrt(),
        }
    }

    /// `|mean - target| <= k * std_error`, with an absolute floor for zero-variance estimates.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_error + 1e-12 * target.abs().max(1.0)
    }
}

/// Mean and standard error of a scalar observable over `samples` draws.
pub fn estimate<F>(samples: usize, seed: u64, eval: F) -> Estimate
where
    F: Fn(usize, &mut SampleRng) -> f64 + Sync,
{
    let moments = sum_samples(samples, seed, |i, rng| {
        let x = eval(i, rng);
        vec![x, x * x]
    })
    .unwrap_or_else(|| vec![0.0, 0.0]);
    Estimate::from_moments(moments[0], moments[1], samples)
}

/// Per-component means and standard errors of a vector observable of length `len`.
pub fn estimate_vec<F>(samples: usize, seed: u64, len: usize, eval: F) -> Vec<Estimate>
where
    F: Fn(usize, &mut SampleRng) -> Vec<f64> + Sync,
{
    let moments = sum_samples(samples, seed, |i, rng| {
        let x = eval(i, rng);
        debug_assert_eq!(x.len(), len);
        let mut m = x.clone();
        m.extend(x.iter().map(|v| v * v));
        m
    })
    .unwrap_or_else(|| vec![0.0; 2 * len]);
    (0..len)
        .map(|k| Estimate::from_moments(moments[k], moments[len + k], samples))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = sample_rng(7, 3).random();
        let b: u64 = sample_rng(7, 3).random();
        let c: u64 = sample_rng(7, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn sum_is_independent_of_worker_count() {
        let eval = |_: usize, rng: &mut SampleRng| rng.random::<f64>();
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| sum_samples(1000, 11, eval));
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| sum_samples(1000, 11, eval));
        assert_eq!(one.unwrap().to_bits(), many.unwrap().to_bits());
    }

    #[test]
    fn estimate_of_constant_has_zero_error() {
        let e = estimate(300, 1, |_, _| 2.5);
        assert_eq!(e.mean, 2.5);
        assert_eq!(e.std_error, 0.0);
        assert!(e.within(2.5, 3.0));
    }

    #[test]
    fn uniform_mean() {
        let e = estimate(20_000, 5, |_, rng| rng.random::<f64>());
        assert!(e.within(0.5, 4.0), "{e:?}");
    }
}
