//! Reference space generators: lattices, Cantor dust, weighted lines and
//! the snowflake transform.

use crate::space::MetricMeasureSpace;
use crate::{Error, Result};

/// Largest point count any generator will produce.
pub const GENERATOR_SIZE_CAP: usize = 10_000;

/// Cubic lattice in `dim` dimensions with `side` points per axis and the
/// given spacing; each point carries the Lebesgue mass of its cell,
/// `spacing^dim`.
pub fn grid(dim: usize, side: usize, spacing: f64) -> Result<MetricMeasureSpace> {
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidArgument(format!(
            "grid dimension must be 1, 2 or 3, got {dim}"
        )));
    }
    if side < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid side must be at least 2, got {side}"
        )));
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "grid spacing must be positive, got {spacing}"
        )));
    }
    let n = side.pow(dim as u32);
    if n > GENERATOR_SIZE_CAP {
        return Err(Error::InvalidArgument(format!(
            "grid would have {n} points, cap is {GENERATOR_SIZE_CAP}"
        )));
    }
    let mut points = Vec::with_capacity(n);
    for idx in 0..n {
        let mut rem = idx;
        let mut coords = Vec::with_capacity(dim);
        for _ in 0..dim {
            coords.push((rem % side) as f64 * spacing);
            rem /= side;
        }
        points.push(coords);
    }
    let cell_mass = spacing.powi(dim as i32);
    MetricMeasureSpace::from_points(&points, vec![cell_mass; n], None)
}

/// Endpoints of the middle-thirds construction at the given depth:
/// `2^depth` points with uniform mass `2^{-depth}` (total mass 1).
pub fn cantor_dust(depth: usize) -> Result<MetricMeasureSpace> {
    if depth == 0 || depth > 10 {
        return Err(Error::InvalidArgument(format!(
            "cantor depth must lie in 1..=10, got {depth}"
        )));
    }
    let n = 1usize << depth;
    let mut points = Vec::with_capacity(n);
    for code in 0..n {
        let mut x = 0.0;
        let mut scale = 1.0 / 3.0;
        for bit in (0..depth).rev() {
            if code >> bit & 1 == 1 {
                x += 2.0 * scale;
            }
            scale /= 3.0;
        }
        points.push(vec![x]);
    }
    let mass = 2.0_f64.powi(-(depth as i32));
    MetricMeasureSpace::from_points(&points, vec![mass; n], None)
}

/// Points `k/n` on the unit interval with mass proportional to
/// `(k/n)^alpha / n`, normalized to total mass 1. The origin mass is
/// regularized to the alpha-average over its cell so that every mass stays
/// strictly positive; `alpha = 0` reduces to the uniform grid.
pub fn weighted_line(n: usize, alpha: f64) -> Result<MetricMeasureSpace> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "weighted line needs at least 2 points, got {n}"
        )));
    }
    if n > GENERATOR_SIZE_CAP {
        return Err(Error::InvalidArgument(format!(
            "weighted line size {n} exceeds cap {GENERATOR_SIZE_CAP}"
        )));
    }
    if !(alpha > -1.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "alpha must exceed -1, got {alpha}"
        )));
    }
    let nf = n as f64;
    let mut points = Vec::with_capacity(n);
    let mut mass = Vec::with_capacity(n);
    for k in 0..n {
        points.push(vec![k as f64 / nf]);
        let density = if k == 0 {
            // average of x^alpha over the origin cell [0, 1/n)
            (1.0 / nf).powf(alpha) / (alpha + 1.0)
        } else {
            (k as f64 / nf).powf(alpha)
        };
        mass.push(density / nf);
    }
    let total: f64 = mass.iter().sum();
    for m in &mut mass {
        *m /= total;
    }
    MetricMeasureSpace::from_points(&points, mass, None)
}

/// Snowflake transform: replaces the metric by `d^epsilon` for
/// `0 < epsilon < 1`, masses unchanged. Concavity of `t^epsilon` preserves
/// the triangle inequality, and ball memberships are invariant under the
/// matching radius transform `r -> r^epsilon`.
pub fn snowflake(space: &MetricMeasureSpace, epsilon: f64) -> Result<MetricMeasureSpace> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "snowflake exponent must lie in (0, 1), got {epsilon}"
        )));
    }
    let n = space.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { 0.0 } else { space.d(i, j).powf(epsilon) })
                .collect()
        })
        .collect();
    MetricMeasureSpace::from_rows(
        rows,
        space.masses().to_vec(),
        space.labels().map(|l| l.to_vec()),
    )
}
