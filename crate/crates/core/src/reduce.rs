//! Deterministic parallel reductions.
//!
//! Work is split into fixed-size chunks and the partial sums are combined in
//! chunk order, so results do not depend on the thread count.

use std::ops::Range;

use rayon::prelude::*;

pub(crate) const CHUNK: usize = 256;

/// Sums `width`-long partial vectors produced by `fill` over chunks of `0..len`.
pub(crate) fn chunked_sum<F>(len: usize, width: usize, fill: F) -> Vec<f64>
where
    F: Fn(Range<usize>, &mut [f64]) + Sync,
{
    let chunks = len.div_ceil(CHUNK);
    let partials: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![0.0; width];
            fill(c * CHUNK..((c + 1) * CHUNK).min(len), &mut acc);
            acc
        })
        .collect();
    let mut total = vec![0.0; width];
    for p in partials {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independent_of_thread_count() {
        let xs: Vec<f64> = (0..10_000).map(|i| ((i as f64) * 0.37).sin()).collect();
        let run = || {
            chunked_sum(xs.len(), 2, |r, acc| {
                for x in &xs[r] {
                    acc[0] += x;
                    acc[1] += x * x;
                }
            })
        };
        let a = run();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(run);
        assert_eq!(a, b);
    }
}
