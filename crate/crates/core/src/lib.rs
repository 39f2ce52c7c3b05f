//! Riesz potentials, (gamma, p)-capacities and modified Hausdorff contents
//! on finite metric measure spaces.
//!
//! The crate models a finite point set with a metric table and positive
//! point masses, assembles the ball-mass Riesz kernel, solves the capacity
//! program with a certified primal-dual gap, computes Hausdorff-type
//! contents by weighted set cover, and verifies the capacity axioms and
//! comparison inequalities numerically.
//!
//! ```
//! use rieszcap_core::*;
//!
//! // two points at distance 1 with unit masses
//! let space = MetricMeasureSpace::from_rows(
//!     vec![vec![0.0, 1.0], vec![1.0, 0.0]],
//!     vec![1.0, 1.0],
//!     None,
//! )?;
//! let params = RieszParams::new(0.25, 2.0)?;
//! let kernel = RieszKernel::assemble(&space, params, DiagonalMode::Zero);
//!
//! // the capacity of one point is 1, certified by a matching dual measure
//! let result = solve_capacity(&kernel, &[0], SolveOptions::default())?;
//! assert!((result.primal_value - 1.0).abs() < 1e-6);
//! assert!(result.relative_gap() <= 1e-6);
//!
//! // the cheapest ball cover of the whole space weighs sqrt(2)
//! let cover = modified_content(&space, params, &[0, 1], f64::INFINITY,
//!                              CoverMode::Exact, &CoverOptions::default())?;
//! assert!((cover.total_weight - 2f64.sqrt()).abs() < 1e-12);
//! # Ok::<(), Error>(())
//! ```

#![forbid(unsafe_code)]

mod capacity;
mod checks;
mod content;
mod doubling;
mod error;
mod generators;
mod io;
mod kernel;
mod norms;
mod qp;
mod space;

pub use capacity::{
    ball_admissible, ball_bound_report, ball_capacity_bound, ball_capacity_constant,
    dual_lower_bound, solve_capacity, BallBoundRow, CapacityProblem, CapacityResult,
    InitStrategy, SolveOptions,
};
pub use checks::{
    check_axioms, check_ball_admissible, check_capacity_le_content, check_convergence,
    check_duality, check_weak_type, content_bound_from_admissible, run_suite,
    AdmissibleContentBound, CheckOptions, CheckReport, ContentBoundConstants, DyadicSelection,
    Suite, SuiteConfig,
};
pub use content::{
    classical_content, dimension_profile, five_r_cover, modified_content, CandidateBall,
    CoverMode, CoverOptions, CoverSolution, DimensionRow,
};
pub use doubling::{DoublingProfile, DoublingWitness, ProfileOptions};
pub use error::{Error, Result};
pub use generators::{cantor_dust, grid, snowflake, weighted_line, GENERATOR_SIZE_CAP};
pub use io::{load_space, save_space};
pub use kernel::{DiagonalMode, KernelForm, RieszKernel, RieszParams};
pub use norms::{
    capacitary_lorentz_norm, distinct_abs_values, lp_norm, lp_norm_with_mass, strict_superlevel,
    superlevel, weak_lp_norm, weak_lp_norm_with_mass,
};
pub use qp::{solve_qp_capacity, QpSolution, QP_SIZE_CAP};
pub use space::{MetricMeasureSpace, TRIANGLE_EXHAUSTIVE_CAP, TRIANGLE_SAMPLE_COUNT};
