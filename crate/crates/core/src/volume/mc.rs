//! Box-sampling Monte Carlo with seed-derived per-batch streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;

/// Samples per batch. Batch `i` draws from a xoshiro generator keyed by stream `i` of the
/// seeded ChaCha8 generator, so the hit count does not depend on how batches are spread
/// over threads.
pub const BATCH: u64 = 1 << 16;

/// Count the hits of `inside` among the first `n` samples of the uniform distribution on
/// the box `[lo, hi]`.
pub fn count_hits<F>(lo: &[f64], hi: &[f64], n: u64, seed: u64, first_batch: u64, inside: &F) -> u64
where
    F: Fn(&[f64]) -> bool + Sync,
{
    let batches = n.div_ceil(BATCH);
    (0..batches)
        .into_par_iter()
        .map(|b| {
            let count = if b + 1 == batches { n - b * BATCH } else { BATCH };
            batch_hits(lo, hi, count, seed, first_batch + b, inside)
        })
        .sum()
}

fn batch_hits<F>(lo: &[f64], hi: &[f64], count: u64, seed: u64, stream: u64, inside: &F) -> u64
where
    F: Fn(&[f64]) -> bool + Sync,
{
    let mut key = ChaCha8Rng::seed_from_u64(seed);
    key.set_stream(stream);
    let mut rng = Xoshiro256PlusPlus::from_rng(&mut key);
    let dim = lo.len();
    let mut y = [0.0f64; 8];
    let mut span = [0.0f64; 8];
    for k in 0..dim {
        span[k] = hi[k] - lo[k];
    }
    let mut hits = 0;
    for _ in 0..count {
        for k in 0..dim {
            y[k] = lo[k] + span[k] * rng.random::<f64>();
        }
        hits += inside(&y[..dim]) as u64;
    }
    hits
}

/// Value and 95% half-width for `hits` of `n` samples in a box of volume `box_vol`.
/// With no hits (or all hits) the Wald width collapses, so the rule of three is used.
pub fn wald(hits: u64, n: u64, box_vol: f64) -> (f64, f64) {
    let p = hits as f64 / n as f64;
    let half = if hits == 0 || hits == n {
        3.0 / n as f64
    } else {
        1.96 * (p * (1.0 - p) / n as f64).sqrt()
    };
    (box_vol * p, box_vol * half)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_do_not_depend_on_thread_count() {
        let inside = |y: &[f64]| y[0] * y[0] + y[1] * y[1] <= 1.0;
        let lo = [-1.0, -1.0];
        let hi = [1.0, 1.0];
        let n = 3 * BATCH + 17;
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| count_hits(&lo, &hi, n, 7, 0, &inside));
        let b = four.install(|| count_hits(&lo, &hi, n, 7, 0, &inside));
        assert_eq!(a, b);
        let (v, e) = wald(a, n, 4.0);
        assert!((v - std::f64::consts::PI).abs() < 3.0 * e);
    }

    #[test]
    fn split_counts_add_up() {
        let inside = |y: &[f64]| y[0] < 0.3;
        let lo = [0.0];
        let hi = [1.0];
        let whole = count_hits(&lo, &hi, 4 * BATCH, 1, 0, &inside);
        let parts = count_hits(&lo, &hi, 2 * BATCH, 1, 0, &inside)
            + count_hits(&lo, &hi, 2 * BATCH, 1, 2, &inside);
        assert_eq!(whole, parts);
    }
}
