//! Dense primal active-set solver for the p = 2 capacity program.
//!
//! For p = 2 the capacity program is the convex quadratic program
//!
//! ```text
//!     minimize    sum_y mass[y] f[y]^2
//!     subject to  sum_y K[x][y] mass[y] f[y] >= 1   for x in E
//!                 f >= 0
//! ```
//!
//! solved here by a textbook primal active-set method with the working-set
//! subproblems reduced to small symmetric positive definite systems (the
//! Hessian is diagonal). This solver is deliberately independent of the
//! first-order dual ascent and serves as its reference oracle on small
//! instances.

use crate::kernel::RieszKernel;
use crate::{Error, Result};
use nalgebra::{Cholesky, DMatrix, DVector};

/// Solver output: minimizer, optimal value and final working set.
#[derive(Clone, Debug)]
pub struct QpSolution {
    pub f: Vec<f64>,
    pub value: f64,
    pub active_constraints: Vec<usize>,
    pub iterations: usize,
}

/// Largest instance the dense oracle accepts.
pub const QP_SIZE_CAP: usize = 64;

const FEAS_TOL: f64 = 1e-11;
const MULT_TOL: f64 = 1e-11;

pub fn solve_qp_capacity(kernel: &RieszKernel, set: &[usize]) -> Result<QpSolution> {
    let n = kernel.len();
    if (kernel.params().p - 2.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(
            "the QP oracle handles p = 2 only".into(),
        ));
    }
    if n > QP_SIZE_CAP {
        return Err(Error::InvalidArgument(format!(
            "QP oracle limited to {QP_SIZE_CAP} points, space has {n}"
        )));
    }
    if set.is_empty() {
        return Err(Error::EmptyTargetSet);
    }
    let mut target: Vec<usize> = set.to_vec();
    target.sort_unstable();
    target.dedup();
    for &x in &target {
        if x >= n {
            return Err(Error::IndexOutOfRange { index: x, n });
        }
    }

    let mass = kernel.masses();
    let m_rows = target.len();
    // constraint rows: first the potential constraints, then the bounds
    // A[i] . f >= b[i]
    let total = m_rows + n;
    let row = |i: usize, y: usize| -> f64 {
        if i < m_rows {
            kernel.k(target[i], y) * mass[y]
        } else if i - m_rows == y {
            1.0
        } else {
            0.0
        }
    };
    let rhs = |i: usize| -> f64 { if i < m_rows { 1.0 } else { 0.0 } };

    // strictly feasible start: a uniform function scaled to clear every
    // potential constraint
    let mut min_rowsum = f64::INFINITY;
    for i in 0..m_rows {
        let s: f64 = (0..n).map(|y| row(i, y)).sum();
        if s <= 0.0 {
            return Err(Error::SolverFailure(format!(
                "no admissible function: kernel row {} has zero mass",
                target[i]
            )));
        }
        min_rowsum = min_rowsum.min(s);
    }
    let mut f = vec![(1.0 + 1e-9) / min_rowsum; n];
    let mut working: Vec<usize> = Vec::new();

    let constraint_value = |f: &[f64], i: usize| -> f64 {
        (0..n).map(|y| row(i, y) * f[y]).sum::<f64>() - rhs(i)
    };

    let max_iter = 40 * (total + 1);
    for iter in 0..max_iter {
        // equality-constrained minimizer on the working set:
        //   f* = (1/2) M^{-1} A_W^T lambda,  S lambda = b_W,
        //   S = (1/2) A_W M^{-1} A_W^T
        let w = working.len();
        let (f_star, lambda) = if w == 0 {
            (vec![0.0; n], DVector::zeros(0))
        } else {
            let mut s_mat = DMatrix::zeros(w, w);
            for a in 0..w {
                for b in a..w {
                    let mut acc = 0.0;
                    for y in 0..n {
                        acc += row(working[a], y) * row(working[b], y) / mass[y];
                    }
                    acc *= 0.5;
                    s_mat[(a, b)] = acc;
                    s_mat[(b, a)] = acc;
                }
            }
            // tiny ridge guards against duplicated constraint rows
            let ridge = 1e-13 * s_mat.trace().max(1.0) / w as f64;
            for a in 0..w {
                s_mat[(a, a)] += ridge;
            }
            let b_vec = DVector::from_fn(w, |a, _| rhs(working[a]));
            let chol = Cholesky::new(s_mat).ok_or_else(|| {
                Error::SolverFailure("working-set system not positive definite".into())
            })?;
            let lambda = chol.solve(&b_vec);
            let mut f_star = vec![0.0; n];
            for y in 0..n {
                let mut acc = 0.0;
                for a in 0..w {
                    acc += row(working[a], y) * lambda[a];
                }
                f_star[y] = 0.5 * acc / mass[y];
            }
            (f_star, lambda)
        };

        let step: Vec<f64> = f_star.iter().zip(&f).map(|(a, b)| a - b).collect();
        let step_norm: f64 = step.iter().map(|v| v * v).sum::<f64>().sqrt();

        if step_norm <= FEAS_TOL * (1.0 + f.iter().map(|v| v * v).sum::<f64>().sqrt()) {
            // at the working-set minimizer; check multipliers
            let mut drop_idx = None;
            let mut most_negative = -MULT_TOL;
            for a in 0..w {
                if lambda[a] < most_negative {
                    most_negative = lambda[a];
                    drop_idx = Some(a);
                }
            }
            match drop_idx {
                None => {
                    let value: f64 = f.iter().zip(mass).map(|(v, m)| v * v * m).sum();
                    return Ok(QpSolution {
                        f,
                        value,
                        active_constraints: working,
                        iterations: iter,
                    });
                }
                Some(a) => {
                    working.remove(a);
                    continue;
                }
            }
        }

        // ratio test against constraints outside the working set
        let mut alpha = 1.0_f64;
        let mut blocking = None;
        for i in 0..total {
            if working.contains(&i) {
                continue;
            }
            let a_dot_d: f64 = (0..n).map(|y| row(i, y) * step[y]).sum();
            if a_dot_d >= -1e-14 {
                continue;
            }
            let slack = constraint_value(&f, i);
            let limit = (-slack / a_dot_d).max(0.0);
            if limit < alpha {
                alpha = limit;
                blocking = Some(i);
            }
        }

        for (y, d) in step.iter().enumerate() {
            f[y] += alpha * d;
        }
        if let Some(i) = blocking {
            working.push(i);
        }
    }

    Err(Error::SolverFailure(
        "active-set iteration limit exceeded".into(),
    ))
}
