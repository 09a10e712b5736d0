//! Fixtures shared by the benchmarks.

use dualrank_core::catalogue::resolve;
use dualrank_core::Chart;

/// Varieties timed by the per-variety benchmarks, smallest first.
pub const BENCH_SPECS: [&str; 4] = [
    "twisted_cubic",
    "torse:twisted_cubic,l=1",
    "join:conic,conic,N=5",
    "segre:2,3",
];

pub fn charts() -> Vec<Chart> {
    BENCH_SPECS.iter().map(|s| resolve(s).expect("bench spec resolves")).collect()
}
