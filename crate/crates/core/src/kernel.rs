//! Riesz kernel tables and potential evaluation.
//!
//! The kernel of the metric Riesz potential is `K(x,y) =
//! mu(B(x, d(x,y)))^{gamma-1}` with the open-ball mass in the base. The
//! table is generally not symmetric because ball masses depend on the
//! center. A comparison kernel with the distance in the numerator,
//! `d(x,y)^gamma / mu(B(x, d(x,y)))`, is available for cross-checks on
//! regular spaces.

use crate::space::{MetricMeasureSpace, SortedRow};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Order and integrability exponents of a capacity problem.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RieszParams {
    pub gamma: f64,
    pub p: f64,
    pub p_conj: f64,
}

impl RieszParams {
    pub fn new(gamma: f64, p: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "gamma must lie in (0, 1), got {gamma}"
            )));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "p must lie in (1, inf), got {p}"
            )));
        }
        Ok(RieszParams {
            gamma,
            p,
            p_conj: p / (p - 1.0),
        })
    }

    pub fn gamma_p(&self) -> f64 {
        self.gamma * self.p
    }

    /// Content and ball-bound estimates additionally require `gamma p < 1`.
    pub fn ensure_content_range(&self) -> Result<()> {
        if self.gamma_p() >= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "gamma * p must be < 1 for content estimates, got {}",
                self.gamma_p()
            )));
        }
        Ok(())
    }
}

/// Convention for the kernel diagonal, where the ball mass degenerates.
///
/// `Zero` drops the self term, matching an integral over the punctured
/// space; `SelfMass` treats the atom at the center as the smallest ball.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiagonalMode {
    Zero,
    SelfMass,
}

/// Which kernel formula fills the table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelForm {
    /// `mu(B(x,d(x,y)))^{gamma-1}`
    Riesz,
    /// `d(x,y)^gamma / mu(B(x,d(x,y)))`
    Tilde,
}

#[derive(Clone, Debug)]
pub struct RieszKernel {
    params: RieszParams,
    diagonal: DiagonalMode,
    form: KernelForm,
    n: usize,
    table: Vec<f64>,
    mass: Vec<f64>,
}

impl RieszKernel {
    /// Assembles the Riesz kernel table; `O(n^2 log n)` via per-row sorted
    /// distances with prefix-summed masses.
    pub fn assemble(
        space: &MetricMeasureSpace,
        params: RieszParams,
        diagonal: DiagonalMode,
    ) -> Self {
        let n = space.len();
        let mut table = vec![0.0; n * n];
        let exponent = params.gamma - 1.0;
        for x in 0..n {
            let sorted = SortedRow::new(space, x);
            let row = space.dist_row(x);
            for y in 0..n {
                if y == x {
                    table[x * n + y] = match diagonal {
                        DiagonalMode::Zero => 0.0,
                        DiagonalMode::SelfMass => space.mass(x).powf(exponent),
                    };
                } else {
                    // the open ball always contains the center, so the base
                    // is at least mass[x] > 0
                    table[x * n + y] = sorted.open_mass(row[y]).powf(exponent);
                }
            }
        }
        RieszKernel {
            params,
            diagonal,
            form: KernelForm::Riesz,
            n,
            table,
            mass: space.masses().to_vec(),
        }
    }

    /// Assembles the comparison kernel with exponent `gamma_exponent` on
    /// the distance; the diagonal vanishes in either mode because the
    /// numerator does.
    pub fn assemble_tilde(
        space: &MetricMeasureSpace,
        gamma_exponent: f64,
        params: RieszParams,
    ) -> Result<Self> {
        if !(gamma_exponent > 0.0 && gamma_exponent.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "tilde kernel exponent must be positive, got {gamma_exponent}"
            )));
        }
        let n = space.len();
        let mut table = vec![0.0; n * n];
        for x in 0..n {
            let sorted = SortedRow::new(space, x);
            let row = space.dist_row(x);
            for y in 0..n {
                if y != x {
                    table[x * n + y] = row[y].powf(gamma_exponent) / sorted.open_mass(row[y]);
                }
            }
        }
        Ok(RieszKernel {
            params,
            diagonal: DiagonalMode::Zero,
            form: KernelForm::Tilde,
            n,
            table,
            mass: space.masses().to_vec(),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn params(&self) -> RieszParams {
        self.params
    }

    pub fn diagonal(&self) -> DiagonalMode {
        self.diagonal
    }

    pub fn form(&self) -> KernelForm {
        self.form
    }

    pub fn k(&self, x: usize, y: usize) -> f64 {
        self.table[x * self.n + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.table[x * self.n..(x + 1) * self.n]
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Potential of a density: `(I f)(x) = sum_y K(x,y) f(y) mass(y)`.
    ///
    /// Signed entries are permitted (the operator is linear); entries must
    /// be finite.
    pub fn potential(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.check_len(f)?;
        if f.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "potential input must be finite".into(),
            ));
        }
        let weighted: Vec<f64> = f.iter().zip(&self.mass).map(|(v, m)| v * m).collect();
        Ok(self.apply_rows(&weighted))
    }

    /// Potential of a measure: `(I nu)(x) = sum_y K(x,y) nu(y)`.
    pub fn potential_of_measure(&self, nu: &[f64]) -> Result<Vec<f64>> {
        self.check_len(nu)?;
        check_measure(nu)?;
        Ok(self.apply_rows(nu))
    }

    /// Adjoint potential of a measure: `y -> sum_x K(x,y) nu(x)`; this is
    /// the form that appears inside the dual norm.
    pub fn adjoint_potential_of_measure(&self, nu: &[f64]) -> Result<Vec<f64>> {
        self.check_len(nu)?;
        check_measure(nu)?;
        let mut out = vec![0.0; self.n];
        for x in 0..self.n {
            let w = nu[x];
            if w == 0.0 {
                continue;
            }
            let row = self.row(x);
            for y in 0..self.n {
                out[y] += row[y] * w;
            }
        }
        Ok(out)
    }

    fn apply_rows(&self, weights: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for x in 0..self.n {
            let row = self.row(x);
            out[x] = row.iter().zip(weights).map(|(k, w)| k * w).sum();
        }
        out
    }
}

fn check_measure(nu: &[f64]) -> Result<()> {
    if nu.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidArgument(
            "measure entries must be nonnegative and finite".into(),
        ));
    }
    Ok(())
}
