//! Wall-clock timing of [`recognize`] on seeded tree-like instances.

use std::time::Instant;

use crate::generalized::recognize;
use crate::oracle::random_tree_like_instance;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub leaves: usize,
    pub symbols: usize,
    /// Per-repeat seconds, in run order.
    pub samples: Vec<f64>,
    /// Repeats whose instance was recognized as tree-like.
    pub tree_like: usize,
}

impl BenchResult {
    pub fn median(&self) -> f64 {
        let mut s = self.samples.clone();
        s.sort_by(f64::total_cmp);
        match s.len() {
            0 => f64::NAN,
            n if n % 2 == 1 => s[n / 2],
            n => (s[n / 2 - 1] + s[n / 2]) / 2.0,
        }
    }
}

/// Times `repeat` runs; run `r` uses the instance from seed `seed + r`.
/// Instance generation is not timed.
pub fn bench_recognize(leaves: usize, symbols: usize, seed: u64, repeat: usize) -> BenchResult {
    let mut samples = Vec::with_capacity(repeat);
    let mut tree_like = 0;
    for r in 0..repeat {
        let (_, map) = random_tree_like_instance(seed.wrapping_add(r as u64), leaves, symbols);
        let start = Instant::now();
        let report = recognize(&map);
        samples.push(start.elapsed().as_secs_f64());
        tree_like += report.is_tree_like() as usize;
    }
    BenchResult {
        leaves,
        symbols,
        samples,
        tree_like,
    }
}
