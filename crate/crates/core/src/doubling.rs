//! Empirical doubling and reverse-doubling profiles of a finite space.
//!
//! The doubling constant is the supremum over centers and radii of
//! `mu(B(x,2r)) / mu(B(x,r))`. On a finite space that ratio is piecewise
//! constant in `r`, with jumps exactly where `r` or `2r` crosses a realized
//! distance, so the supremum is attained by evaluating one radius inside
//! each piece.

use crate::space::{MetricMeasureSpace, SortedRow};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// A (center, radius, ratio) record attaining a profiled extreme.
#[derive(Clone, Debug, Serialize)]
pub struct DoublingWitness {
    pub center: usize,
    pub radius: f64,
    pub ratio: f64,
}

/// Doubling constants of a space: the two-sided ball-mass comparison
/// exponents and their multiplicative constants.
#[derive(Clone, Debug, Serialize)]
pub struct DoublingProfile {
    /// Doubling constant `c_d`.
    pub doubling_constant: f64,
    /// Lower comparison exponent `Q = log2(c_d)`.
    pub dimension_exponent: f64,
    /// Lower comparison constant `c_d^{-2}`.
    pub lower_constant: f64,
    /// Fitted reverse-doubling exponent `s`.
    pub reverse_exponent: f64,
    /// Fitted reverse-doubling constant validating all enumerated pairs.
    pub reverse_constant: f64,
    /// Per-center maximal doubling ratios.
    pub witnesses: Vec<DoublingWitness>,
}

/// Knobs for the reverse-doubling fit.
#[derive(Clone, Debug)]
pub struct ProfileOptions {
    /// Largest admissible reverse constant; the fit maximizes `s` subject
    /// to some constant below this cap validating every pair.
    pub reverse_cap: f64,
    /// Grid step for the fitted exponent.
    pub reverse_grid_step: f64,
    /// Largest exponent considered.
    pub reverse_grid_max: f64,
    /// Point count up to which the pair enumeration is exhaustive.
    pub exhaustive_pair_cap: usize,
    /// Number of sampled pairs beyond the exhaustive cap.
    pub pair_samples: usize,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            reverse_cap: 1e4,
            reverse_grid_step: 0.01,
            reverse_grid_max: 8.0,
            exhaustive_pair_cap: 96,
            pair_samples: 2_000_000,
        }
    }
}

impl DoublingProfile {
    pub fn compute(space: &MetricMeasureSpace) -> Result<Self> {
        Self::compute_with(space, &ProfileOptions::default())
    }

    pub fn compute_with(space: &MetricMeasureSpace, opts: &ProfileOptions) -> Result<Self> {
        let n = space.len();
        if n < 2 {
            return Err(Error::InvalidArgument(
                "doubling profile requires at least two points".into(),
            ));
        }
        let rows: Vec<SortedRow> = (0..n).map(|c| SortedRow::new(space, c)).collect();

        let mut witnesses = Vec::with_capacity(n);
        let mut c_d = 1.0_f64;
        for center in 0..n {
            let ds = space.distinct_distances(center)?;
            // breakpoints of r -> mu(B(x,2r))/mu(B(x,r))
            let mut breaks: Vec<f64> = Vec::with_capacity(2 * ds.len());
            for &d in &ds {
                if d > 0.0 {
                    breaks.push(d);
                    breaks.push(0.5 * d);
                }
            }
            breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
            breaks.dedup();
            let mut best = DoublingWitness {
                center,
                radius: breaks.first().map_or(1.0, |&b| 0.5 * b),
                ratio: 1.0,
            };
            // pieces below the first breakpoint and beyond the last both
            // have ratio 1 (tiny balls are the singleton, huge balls the
            // whole space), so only interior pieces need a representative
            for k in 0..breaks.len().saturating_sub(1) {
                let r = 0.5 * (breaks[k] + breaks[k + 1]);
                let inner = rows[center].open_mass(r);
                if inner <= 0.0 {
                    continue;
                }
                let ratio = rows[center].open_mass(2.0 * r) / inner;
                if ratio > best.ratio {
                    best = DoublingWitness {
                        center,
                        radius: r,
                        ratio,
                    };
                }
            }
            if best.ratio > c_d {
                c_d = best.ratio;
            }
            witnesses.push(best);
        }

        let (reverse_exponent, reverse_constant) = fit_reverse(space, &rows, opts)?;

        Ok(DoublingProfile {
            doubling_constant: c_d,
            dimension_exponent: c_d.log2(),
            lower_constant: c_d.powi(-2),
            reverse_exponent,
            reverse_constant,
            witnesses,
        })
    }
}

/// Fits `(C, s)` with `mu(B(z,r))/mu(B(y,R)) <= C (r/R)^s` over enumerated
/// pairs of realized balls with `z` in `B(y,R)` and `0 < r <= R`.
///
/// The fit maximizes `s` on the grid subject to the implied constant
/// staying below the cap. Singleton scales (radii below the minimal
/// positive distance of the inner center) are excluded: ball masses on an
/// atomic space do not vanish as the radius shrinks, so those pairs carry
/// no scaling information.
fn fit_reverse(
    space: &MetricMeasureSpace,
    rows: &[SortedRow],
    opts: &ProfileOptions,
) -> Result<(f64, f64)> {
    let n = space.len();
    let ln_cap = opts.reverse_cap.ln();

    // per-center open radii realizing each ball above the singleton scale
    let mut radii: Vec<Vec<f64>> = Vec::with_capacity(n);
    for c in 0..n {
        let all = space.critical_radii(c)?;
        radii.push(all[1..].to_vec());
    }

    // both passes must see the same pair set, so the enumeration (and its
    // sampling seed) lives in one place
    let for_each_pair = |visit: &mut dyn FnMut(f64, f64, f64)| {
        if n <= opts.exhaustive_pair_cap {
            for y in 0..n {
                for &big_r in &radii[y] {
                    let outer = rows[y].open_mass(big_r);
                    for z in 0..n {
                        if space.d(y, z) >= big_r {
                            continue;
                        }
                        for &r in &radii[z] {
                            if r > big_r {
                                break;
                            }
                            visit(rows[z].open_mass(r), outer, r / big_r);
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x05ee_df17);
            for _ in 0..opts.pair_samples {
                let y = rng.gen_range(0..n);
                if radii[y].is_empty() {
                    continue;
                }
                let big_r = radii[y][rng.gen_range(0..radii[y].len())];
                let z = rng.gen_range(0..n);
                if space.d(y, z) >= big_r || radii[z].is_empty() {
                    continue;
                }
                let r = radii[z][rng.gen_range(0..radii[z].len())];
                if r > big_r {
                    continue;
                }
                visit(rows[z].open_mass(r), rows[y].open_mass(big_r), r / big_r);
            }
        }
    };

    // each pair with t < 1 caps the feasible exponent at
    // (ln cap - ln ratio) / (-ln t); pairs at t = 1 only constrain the
    // constant, which the second pass accounts for
    let mut s_bound = opts.reverse_grid_max;
    for_each_pair(&mut |inner_mass, outer_mass, t| {
        if t >= 1.0 {
            return;
        }
        let q = (inner_mass / outer_mass).ln();
        let bound = (ln_cap - q) / -t.ln();
        if bound < s_bound {
            s_bound = bound;
        }
    });

    let step = opts.reverse_grid_step;
    let s = ((s_bound / step).floor() * step).clamp(step, opts.reverse_grid_max);

    // implied constant at the chosen exponent
    let mut c_upper = 1.0_f64;
    for_each_pair(&mut |inner_mass, outer_mass, t| {
        let c = (inner_mass / outer_mass) / t.powf(s);
        if c > c_upper {
            c_upper = c;
        }
    });

    Ok((s, c_upper))
}
