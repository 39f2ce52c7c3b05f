//! Shared fixtures for the benchmark targets.

use rieszcap_core::{grid, weighted_line, MetricMeasureSpace};

/// Planar lattice used by the kernel and solver benchmarks.
pub fn bench_grid(side: usize) -> MetricMeasureSpace {
    grid(2, side, 1.0).expect("bench grid within caps")
}

/// Non-uniform line used by the profiler benchmark.
pub fn bench_line(n: usize) -> MetricMeasureSpace {
    weighted_line(n, 1.0).expect("bench line within caps")
}
