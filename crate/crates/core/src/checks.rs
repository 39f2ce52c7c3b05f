//! Machine-checkable inequality harness binding spaces, kernels,
//! capacities and contents.
//!
//! Every check compares an over-estimating quantity on the left against a
//! certified or closed-form quantity on the right, so a failed report
//! falsifies the implementation rather than a heuristic. Reports are plain
//! records and reproducible given the same seed and tolerances.

use crate::capacity::{ball_admissible, ball_capacity_constant, solve_capacity, SolveOptions};
use crate::content::{modified_content, five_r_cover, CoverMode, CoverOptions};
use crate::doubling::DoublingProfile;
use crate::kernel::{DiagonalMode, RieszKernel, RieszParams};
use crate::norms::{distinct_abs_values, lp_norm, strict_superlevel};
use crate::space::MetricMeasureSpace;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashMap;

/// Outcome of one named inequality on one instance.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub check_name: String,
    pub instance_id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub constant_used: f64,
    pub passed: bool,
    /// `rhs (1 + tol) + tol - lhs`; nonnegative exactly when the check passes.
    pub slack: f64,
}

impl CheckReport {
    /// Pass rule: `lhs <= rhs (1 + tol) + tol`.
    pub fn evaluate(
        check_name: &str,
        instance_id: &str,
        lhs: f64,
        rhs: f64,
        constant_used: f64,
        tol: f64,
    ) -> Self {
        let allowance = rhs * (1.0 + tol) + tol;
        CheckReport {
            check_name: check_name.to_string(),
            instance_id: instance_id.to_string(),
            lhs,
            rhs,
            constant_used,
            passed: lhs <= allowance,
            slack: allowance - lhs,
        }
    }

    fn failed(check_name: &str, instance_id: &str, lhs: f64, rhs: f64, constant: f64) -> Self {
        CheckReport {
            check_name: check_name.to_string(),
            instance_id: instance_id.to_string(),
            lhs,
            rhs,
            constant_used: constant,
            passed: false,
            slack: f64::NEG_INFINITY,
        }
    }

    fn vacuous(check_name: &str, instance_id: &str) -> Self {
        CheckReport {
            check_name: check_name.to_string(),
            instance_id: format!("{instance_id}/vacuous"),
            lhs: 0.0,
            rhs: 0.0,
            constant_used: 1.0,
            passed: true,
            slack: 0.0,
        }
    }
}

/// Tolerances shared by the checks.
#[derive(Clone, Debug)]
pub struct CheckOptions {
    /// Relative-plus-absolute allowance in the pass rule.
    pub tolerance: f64,
    pub solve: SolveOptions,
    pub cover: CoverOptions,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            tolerance: 1e-6,
            solve: SolveOptions::default(),
            cover: CoverOptions::default(),
        }
    }
}

/// Capacity values memoized by target set; the empty set is 0 by
/// convention and never reaches the solver.
struct CapacityCache<'a> {
    kernel: &'a RieszKernel,
    opts: SolveOptions,
    memo: HashMap<Vec<usize>, (f64, f64, bool)>,
}

impl<'a> CapacityCache<'a> {
    fn new(kernel: &'a RieszKernel, opts: SolveOptions) -> Self {
        CapacityCache {
            kernel,
            opts,
            memo: HashMap::new(),
        }
    }

    /// Returns (primal upper bound, dual lower bound, converged).
    fn bounds(&mut self, set: &[usize]) -> Result<(f64, f64, bool)> {
        if set.is_empty() {
            return Ok((0.0, 0.0, true));
        }
        let mut key = set.to_vec();
        key.sort_unstable();
        key.dedup();
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let res = solve_capacity(self.kernel, &key, self.opts.clone())?;
        let v = (res.primal_value, res.dual_value, res.converged);
        self.memo.insert(key, v);
        Ok(v)
    }
}

fn set_id(set: &[usize]) -> String {
    if set.is_empty() {
        "{}".to_string()
    } else if set.len() <= 8 {
        let items: Vec<String> = set.iter().map(|x| x.to_string()).collect();
        format!("{{{}}}", items.join(","))
    } else {
        format!("{{#{}:{}..{}}}", set.len(), set[0], set[set.len() - 1])
    }
}

/// Capacity of a set against the profiled constant times its greedy
/// modified content. The greedy cover over-estimates the content, which
/// strengthens the test.
pub fn check_capacity_le_content(
    space: &MetricMeasureSpace,
    profile: &DoublingProfile,
    params: RieszParams,
    set: &[usize],
    opts: &CheckOptions,
    instance_id: &str,
) -> Result<CheckReport> {
    const NAME: &str = "thm42_capacity_le_content";
    if set.is_empty() {
        return Ok(CheckReport::vacuous(NAME, instance_id));
    }
    params.ensure_content_range()?;
    let kernel = RieszKernel::assemble(space, params, DiagonalMode::Zero);
    let res = solve_capacity(&kernel, set, opts.solve.clone())?;
    let cover = modified_content(
        space,
        params,
        set,
        f64::INFINITY,
        CoverMode::Greedy,
        &opts.cover,
    )?;
    let constant = ball_capacity_constant(profile, params);
    let mut report = CheckReport::evaluate(
        NAME,
        instance_id,
        res.primal_value,
        constant * cover.total_weight,
        constant,
        opts.tolerance,
    );
    report.passed &= res.converged;
    Ok(report)
}

/// Per-point dyadic ball selection for the constructive content bound.
#[derive(Clone, Debug, Serialize)]
pub struct DyadicSelection {
    pub point: usize,
    pub index: u32,
    pub radius: f64,
    pub ball_mass: f64,
    /// Shell-chain side `A * a_i` at the selected scale.
    pub lhs: f64,
    /// Series side `b_i` at the selected scale.
    pub rhs: f64,
}

/// Constants assembled by the constructive content bound, itemized for
/// audit.
#[derive(Clone, Debug, Serialize)]
pub struct ContentBoundConstants {
    /// `A = 2 c_d^{1-gamma}` from the shell chain.
    pub shell_factor: f64,
    /// `kappa = (gamma p - gamma~ p~)/p`.
    pub kappa: f64,
    /// `delta = s * kappa`.
    pub delta: f64,
    /// `1 - 2^{-delta}` normalizing the dyadic series.
    pub series_constant: f64,
    /// Reverse-doubling constant from the profile.
    pub reverse_constant: f64,
    /// `M = mu(B(x0, R))`.
    pub base_ball_mass: f64,
    /// `C2 = (A / c_delta)^p (C_upper M)^{kappa p}` in the per-ball bound.
    pub per_ball_constant: f64,
    /// `c_d^{3 (1 - gamma~ p~)}` paying for the 5-fold dilation.
    pub dilation_factor: f64,
    /// Final multiplier of `||f||_p^p`.
    pub total_constant: f64,
    pub center: usize,
    pub r0: f64,
    pub big_r: f64,
}

/// Result of the constructive capacity-to-content certificate.
#[derive(Clone, Debug, Serialize)]
pub struct AdmissibleContentBound {
    /// `total_constant * ||f||_p^p`, an upper bound for the modified
    /// content of the target set; absent when any point failed.
    pub bound: Option<f64>,
    /// Weight of the realized 5r cover, itself a valid content upper bound.
    pub cover_weight: Option<f64>,
    pub selections: Vec<DyadicSelection>,
    /// Points for which no dyadic scale satisfied the shell inequality.
    pub failures: Vec<usize>,
    /// Disjoint subfamily returned by the 5r covering step.
    pub cover: Vec<(usize, f64)>,
    pub constants: ContentBoundConstants,
    pub report: CheckReport,
}

/// Runs the constructive proof of the content upper bound: picks a base
/// ball capturing half of each potential, scans dyadic radii for a scale
/// where the shell inequality certifies `mu(B)^{1 - gamma~ p~} <= C2
/// int_B f^p`, extracts a disjoint 5r subfamily and assembles the final
/// constant. The per-scale inequality is verified directly, so a returned
/// bound is rigorous regardless of the quality of the reverse-doubling
/// fit; the fit only influences whether a scale is found.
pub fn content_bound_from_admissible(
    space: &MetricMeasureSpace,
    profile: &DoublingProfile,
    params: RieszParams,
    tilde_params: RieszParams,
    set: &[usize],
    f: &[f64],
    opts: &CheckOptions,
    instance_id: &str,
) -> Result<AdmissibleContentBound> {
    const NAME: &str = "thm43_content_le_bound";
    params.ensure_content_range()?;
    tilde_params.ensure_content_range()?;
    let gp = params.gamma_p();
    let tgp = tilde_params.gamma_p();
    if tgp >= gp {
        return Err(Error::InvalidArgument(format!(
            "need gamma~ p~ < gamma p, got {tgp} >= {gp}"
        )));
    }
    if set.is_empty() {
        return Err(Error::EmptyTargetSet);
    }
    if f.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "admissible function must be nonnegative and finite".into(),
        ));
    }
    let mut target = set.to_vec();
    target.sort_unstable();
    target.dedup();
    for &x in &target {
        space.check_index(x)?;
    }

    let kernel = RieszKernel::assemble(space, params, DiagonalMode::Zero);
    let pots = kernel.potential(f)?;
    for &x in &target {
        if pots[x] < 1.0 - opts.tolerance {
            return Err(Error::InvalidArgument(format!(
                "function is not admissible: potential at {x} is {}",
                pots[x]
            )));
        }
    }

    let mass = space.masses();
    let p = params.p;
    let gamma = params.gamma;
    let cd = profile.doubling_constant;
    let s = profile.reverse_exponent;
    let c_upper = profile.reverse_constant;

    // mass-weighted medoid of the target set
    let center = *target
        .iter()
        .min_by(|&&a, &&b| {
            let cost = |x: usize| -> f64 {
                target.iter().map(|&z| mass[z] * space.d(x, z)).sum()
            };
            cost(a).partial_cmp(&cost(b)).unwrap().then(a.cmp(&b))
        })
        .expect("target verified nonempty");

    // smallest realized radius whose ball contains the target set and
    // captures at least half of every target potential
    let radii = space.critical_radii(center)?;
    let mut r0 = *radii.last().expect("space has at least one ball");
    for &radius in &radii {
        if target.iter().any(|&z| space.d(center, z) >= radius) {
            continue;
        }
        let ok = target.iter().all(|&x| {
            let partial: f64 = (0..space.len())
                .filter(|&y| space.d(center, y) < radius)
                .map(|y| kernel.k(x, y) * f[y] * mass[y])
                .sum();
            partial >= 0.5 * pots[x]
        });
        if ok {
            r0 = radius;
            break;
        }
    }
    let big_r = 2.0 * r0;
    let base_ball_mass = space.ball_mass(center, big_r)?;

    let shell_factor = 2.0 * cd.powf(1.0 - gamma);
    let kappa = (gp - tgp) / p;
    let delta = s * kappa;
    let series_constant = 1.0 - 2.0_f64.powf(-delta);
    let series_side = series_constant * (c_upper * base_ball_mass).powf(-kappa);

    let mut selections = Vec::new();
    let mut failures = Vec::new();
    for &x in &target {
        let mut found = None;
        let mut radius = big_r;
        for index in 0..1024u32 {
            let members = space.ball_members(x, radius)?;
            let mu: f64 = members.iter().map(|&y| mass[y]).sum();
            let integral: f64 = members.iter().map(|&y| f[y].powf(p) * mass[y]).sum();
            let lhs =
                shell_factor * mu.powf(gamma - 1.0 + (p - 1.0) / p) * integral.powf(1.0 / p);
            let rhs = series_side * mu.powf(kappa);
            if lhs >= rhs {
                found = Some(DyadicSelection {
                    point: x,
                    index,
                    radius,
                    ball_mass: mu,
                    lhs,
                    rhs,
                });
                break;
            }
            if members.len() <= 1 {
                break; // further scales see the same singleton
            }
            radius *= 0.5;
        }
        match found {
            Some(sel) => selections.push(sel),
            None => failures.push(x),
        }
    }

    let per_ball_constant =
        (shell_factor / series_constant).powf(p) * (c_upper * base_ball_mass).powf(kappa * p);
    let dilation_factor = cd.powf(3.0 * (1.0 - tgp));
    let total_constant = dilation_factor * per_ball_constant;

    let constants = ContentBoundConstants {
        shell_factor,
        kappa,
        delta,
        series_constant,
        reverse_constant: c_upper,
        base_ball_mass,
        per_ball_constant,
        dilation_factor,
        total_constant,
        center,
        r0,
        big_r,
    };

    if !failures.is_empty() {
        let report = CheckReport::failed(NAME, instance_id, f64::INFINITY, 0.0, total_constant);
        return Ok(AdmissibleContentBound {
            bound: None,
            cover_weight: None,
            selections,
            failures,
            cover: Vec::new(),
            constants,
            report,
        });
    }

    let assignment: Vec<(usize, f64)> = selections
        .iter()
        .map(|sel| (sel.point, sel.radius))
        .collect();
    let cover = five_r_cover(space, &assignment)?;
    let cover_weight: f64 = cover
        .iter()
        .map(|&(c, r)| {
            space
                .ball_mass_unchecked(c, 5.0 * r)
                .powf(1.0 - tgp)
        })
        .sum();

    let norm_p = lp_norm(space, f, p)?.powf(p);
    let bound = total_constant * norm_p;

    let greedy = modified_content(
        space,
        tilde_params,
        &target,
        f64::INFINITY,
        CoverMode::Greedy,
        &opts.cover,
    )?;
    let report = CheckReport::evaluate(
        NAME,
        instance_id,
        greedy.total_weight,
        bound,
        total_constant,
        opts.tolerance,
    );

    Ok(AdmissibleContentBound {
        bound: Some(bound),
        cover_weight: Some(cover_weight),
        selections,
        failures,
        cover,
        constants,
        report,
    })
}

/// Capacitary weak-type estimate at each threshold: the certified capacity
/// of the superlevel set of the potential against `a^{-p} ||f||_p^p`.
pub fn check_weak_type(
    space: &MetricMeasureSpace,
    params: RieszParams,
    f: &[f64],
    thresholds: Option<&[f64]>,
    opts: &CheckOptions,
    instance_id: &str,
) -> Result<Vec<CheckReport>> {
    const NAME: &str = "lemma35_weak_type";
    if f.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "weak-type check requires nonnegative finite f".into(),
        ));
    }
    let kernel = RieszKernel::assemble(space, params, DiagonalMode::Zero);
    let pots = kernel.potential(f)?;
    let norm_p = lp_norm(space, f, params.p)?.powf(params.p);
    let own: Vec<f64>;
    let thresholds = match thresholds {
        Some(t) => t,
        None => {
            own = distinct_abs_values(&pots);
            &own
        }
    };
    let mut cache = CapacityCache::new(&kernel, opts.solve.clone());
    let mut reports = Vec::new();
    for &a in thresholds {
        if !(a > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "weak-type thresholds must be positive, got {a}"
            )));
        }
        let level = strict_superlevel(&pots, a);
        let id = format!("{instance_id}/a={a}");
        let (primal, _, converged) = cache.bounds(&level)?;
        let mut report = CheckReport::evaluate(
            NAME,
            &id,
            primal,
            a.powf(-params.p) * norm_p,
            a.powf(-params.p),
            opts.tolerance,
        );
        report.passed &= converged;
        reports.push(report);
    }
    Ok(reports)
}

/// Outer-measure axioms over a set family: empty set, monotonicity along
/// cumulative unions, finite subadditivity, increasing and decreasing
/// chain limits, and the liminf inequality for the periodic extension of
/// the family.
pub fn check_axioms(
    space: &MetricMeasureSpace,
    params: RieszParams,
    family: &[Vec<usize>],
    opts: &CheckOptions,
    instance_id: &str,
) -> Result<Vec<CheckReport>> {
    let kernel = RieszKernel::assemble(space, params, DiagonalMode::Zero);
    let mut cache = CapacityCache::new(&kernel, opts.solve.clone());
    let mut reports = Vec::new();
    let tol = opts.tolerance;

    reports.push(CheckReport::evaluate(
        "axiom_empty_set",
        &format!("{instance_id}/empty"),
        0.0,
        0.0,
        1.0,
        tol,
    ));

    if family.is_empty() {
        return Ok(reports);
    }

    let union_sorted = |a: &[usize], b: &[usize]| -> Vec<usize> {
        let mut u = a.to_vec();
        u.extend_from_slice(b);
        u.sort_unstable();
        u.dedup();
        u
    };
    let intersect_sorted = |a: &[usize], b: &[usize]| -> Vec<usize> {
        a.iter().filter(|x| b.contains(x)).copied().collect()
    };

    // increasing chain of cumulative unions
    let mut chain: Vec<Vec<usize>> = Vec::with_capacity(family.len());
    let mut acc: Vec<usize> = Vec::new();
    for set in family {
        acc = union_sorted(&acc, set);
        chain.push(acc.clone());
    }
    for w in chain.windows(2) {
        let (a, _, ca) = cache.bounds(&w[0])?;
        let (b, _, cb) = cache.bounds(&w[1])?;
        let id = format!(
            "{instance_id}/mono/{}<={}",
            set_id(&w[0]),
            set_id(&w[1])
        );
        let mut report =
            CheckReport::evaluate("axiom_monotone", &id, a, b, 1.0, 2.0 * tol);
        report.passed &= ca && cb;
        reports.push(report);
    }

    // subadditivity of the full union
    let union_all = chain.last().expect("family nonempty").clone();
    let (u, _, cu) = cache.bounds(&union_all)?;
    let mut sum = 0.0;
    let mut all_converged = cu;
    for set in family {
        let (v, _, c) = cache.bounds(set)?;
        sum += v;
        all_converged &= c;
    }
    let mut report = CheckReport::evaluate(
        "axiom_subadditive",
        &format!("{instance_id}/union{}", set_id(&union_all)),
        u,
        sum,
        family.len() as f64,
        family.len() as f64 * tol,
    );
    report.passed &= all_converged;
    reports.push(report);

    // pairwise subadditivity of the first two sets
    if family.len() >= 2 {
        let pair_union = union_sorted(&family[0], &family[1]);
        let (pu, _, c0) = cache.bounds(&pair_union)?;
        let (a, _, c1) = cache.bounds(&family[0])?;
        let (b, _, c2) = cache.bounds(&family[1])?;
        let mut report = CheckReport::evaluate(
            "axiom_subadditive_pair",
            &format!(
                "{instance_id}/{}+{}",
                set_id(&family[0]),
                set_id(&family[1])
            ),
            pu,
            a + b,
            2.0,
            2.0 * tol,
        );
        report.passed &= c0 && c1 && c2;
        reports.push(report);
    }

    // increasing-chain limit: the last cumulative union is the union
    let (last, _, cl) = cache.bounds(&union_all)?;
    let mut report = CheckReport::evaluate(
        "fatou_increasing_limit",
        &format!("{instance_id}/limit{}", set_id(&union_all)),
        last,
        u,
        1.0,
        tol,
    );
    report.passed &= cl;
    reports.push(report);

    // decreasing chain of cumulative intersections
    let mut dec: Vec<Vec<usize>> = Vec::new();
    let mut acc: Option<Vec<usize>> = None;
    for set in family {
        let mut sorted = set.clone();
        sorted.sort_unstable();
        sorted.dedup();
        acc = Some(match acc {
            None => sorted,
            Some(prev) => intersect_sorted(&prev, &sorted),
        });
        dec.push(acc.clone().expect("assigned above"));
    }
    for w in dec.windows(2) {
        let (a, _, ca) = cache.bounds(&w[1])?;
        let (b, _, cb) = cache.bounds(&w[0])?;
        let id = format!(
            "{instance_id}/dec/{}<={}",
            set_id(&w[1]),
            set_id(&w[0])
        );
        let mut report =
            CheckReport::evaluate("chain_decreasing", &id, a, b, 1.0, 2.0 * tol);
        report.passed &= ca && cb;
        reports.push(report);
    }

    // liminf of the periodically extended family is the full intersection
    let inter_all = dec.last().expect("family nonempty").clone();
    let (li, _, ci) = cache.bounds(&inter_all)?;
    let mut min_cap = f64::INFINITY;
    let mut conv = ci;
    for set in family {
        let (v, _, c) = cache.bounds(set)?;
        min_cap = min_cap.min(v);
        conv &= c;
    }
    let mut report = CheckReport::evaluate(
        "liminf_sets",
        &format!("{instance_id}/liminf{}", set_id(&inter_all)),
        li,
        min_cap,
        1.0,
        tol,
    );
    report.passed &= conv;
    reports.push(report);

    Ok(reports)
}

/// Convergence in capacity: for perturbations `e_i` of `f`, the capacity
/// of `{|I(f + e_i) - I(f)| > eps}` is bounded by `eps^{-p} ||e_i||_p^p`.
/// Potentials subtract exactly by linearity, so the difference potential
/// is the potential of the perturbation.
pub fn check_convergence(
    space: &MetricMeasureSpace,
    params: RieszParams,
    f: &[f64],
    perturbations: &[Vec<f64>],
    opts: &CheckOptions,
    instance_id: &str,
) -> Result<Vec<CheckReport>> {
    const NAME: &str = "thm39_convergence_in_capacity";
    if f.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "convergence check requires nonnegative finite f".into(),
        ));
    }
    let kernel = RieszKernel::assemble(space, params, DiagonalMode::Zero);
    let mut cache = CapacityCache::new(&kernel, opts.solve.clone());
    let mut reports = Vec::new();
    for (i, e) in perturbations.iter().enumerate() {
        let diff_pot = kernel.potential(e)?;
        let norm_p = lp_norm(space, e, params.p)?.powf(params.p);
        let values = distinct_abs_values(&diff_pot);
        // a handful of representative thresholds per perturbation
        let step = (values.len() / 6).max(1);
        let thresholds: Vec<f64> = values.iter().copied().step_by(step).collect();
        if thresholds.is_empty() {
            reports.push(CheckReport::vacuous(NAME, &format!("{instance_id}/e{i}")));
            continue;
        }
        for eps in thresholds {
            let level: Vec<usize> = (0..diff_pot.len())
                .filter(|&x| diff_pot[x].abs() > eps)
                .collect();
            let (primal, _, converged) = cache.bounds(&level)?;
            let id = format!("{instance_id}/e{i}/eps={eps}");
            let mut report = CheckReport::evaluate(
                NAME,
                &id,
                primal,
                eps.powf(-params.p) * norm_p,
                eps.powf(-params.p),
                opts.tolerance,
            );
            report.passed &= converged;
            reports.push(report);
        }
    }
    Ok(reports)
}

/// Duality certificate per set: the primal value must match the dual value
/// within the tolerance (the dual never exceeds the primal by weak
/// duality).
pub fn check_duality(
    space: &MetricMeasureSpace,
    params: RieszParams,
    family: &[Vec<usize>],
    opts: &CheckOptions,
    instance_id: &str,
) -> Result<Vec<CheckReport>> {
    const NAME: &str = "duality_gap";
    let kernel = RieszKernel::assemble(space, params, DiagonalMode::Zero);
    let mut reports = Vec::new();
    for set in family {
        let id = format!("{instance_id}/{}", set_id(set));
        if set.is_empty() {
            reports.push(CheckReport::vacuous(NAME, &id));
            continue;
        }
        let res = solve_capacity(&kernel, set, opts.solve.clone())?;
        let mut report = CheckReport::evaluate(
            NAME,
            &id,
            res.primal_value,
            res.dual_value,
            1.0,
            opts.tolerance,
        );
        report.passed &= res.converged;
        reports.push(report);
    }
    Ok(reports)
}

/// Feasibility of the explicit ball function: its potential, with the atom
/// at the center counted as the smallest ball, must reach 1 on the ball.
pub fn check_ball_admissible(
    space: &MetricMeasureSpace,
    profile: &DoublingProfile,
    params: RieszParams,
    center: usize,
    radius: f64,
    opts: &CheckOptions,
    instance_id: &str,
) -> Result<CheckReport> {
    const NAME: &str = "lemma41_admissible_feasible";
    let g = ball_admissible(space, profile, params, center, radius)?;
    let kernel = RieszKernel::assemble(space, params, DiagonalMode::SelfMass);
    let pots = kernel.potential(&g)?;
    let members = space.ball_members(center, radius)?;
    let min_pot = members
        .iter()
        .map(|&x| pots[x])
        .fold(f64::INFINITY, f64::min);
    Ok(CheckReport::evaluate(
        NAME,
        instance_id,
        1.0,
        min_pot,
        1.0,
        opts.tolerance,
    ))
}

/// Named check suites runnable on any space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Axioms,
    WeakType,
    Duality,
    Content,
}

impl Suite {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "all" => Ok(Suite::All),
            "axioms" => Ok(Suite::Axioms),
            "weaktype" => Ok(Suite::WeakType),
            "duality" => Ok(Suite::Duality),
            "content" => Ok(Suite::Content),
            other => Err(Error::InvalidArgument(format!(
                "unknown suite '{other}' (expected all|axioms|weaktype|duality|content)"
            ))),
        }
    }
}

/// Instance counts and parameters for a suite run.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub params: RieszParams,
    pub tilde_params: RieszParams,
    pub seed: u64,
    pub families: usize,
    pub sets_per_family: usize,
    pub functions: usize,
    pub duality_sets: usize,
    pub content_sets: usize,
    pub check: CheckOptions,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            params: RieszParams::new(0.3, 2.0).expect("valid defaults"),
            tilde_params: RieszParams::new(0.2, 2.0).expect("valid defaults"),
            seed: 42,
            families: 5,
            sets_per_family: 3,
            functions: 5,
            duality_sets: 8,
            content_sets: 5,
            check: CheckOptions::default(),
        }
    }
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let size = rng.gen_range(1..=n);
    let mut points: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        points.swap(i, j);
    }
    points.truncate(size);
    points.sort_unstable();
    points
}

/// Runs the requested suite on a space with seeded random instances;
/// reports come back sorted by (check name, instance id).
pub fn run_suite(
    space: &MetricMeasureSpace,
    suite: Suite,
    cfg: &SuiteConfig,
) -> Result<Vec<CheckReport>> {
    let n = space.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "check suites need at least two points".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut reports: Vec<CheckReport> = Vec::new();
    let profile = DoublingProfile::compute(space)?;

    if matches!(suite, Suite::All | Suite::Axioms) {
        for fam in 0..cfg.families {
            let family: Vec<Vec<usize>> = (0..cfg.sets_per_family)
                .map(|_| random_subset(&mut rng, n))
                .collect();
            reports.extend(check_axioms(
                space,
                cfg.params,
                &family,
                &cfg.check,
                &format!("axioms/f{fam:02}"),
            )?);
        }
    }

    if matches!(suite, Suite::All | Suite::WeakType) {
        for idx in 0..cfg.functions {
            let f: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0)).collect();
            reports.extend(check_weak_type(
                space,
                cfg.params,
                &f,
                None,
                &cfg.check,
                &format!("weaktype/f{idx:02}"),
            )?);
        }
    }

    if matches!(suite, Suite::All | Suite::Duality) {
        let family: Vec<Vec<usize>> = (0..cfg.duality_sets)
            .map(|_| random_subset(&mut rng, n))
            .collect();
        reports.extend(check_duality(
            space,
            cfg.params,
            &family,
            &cfg.check,
            "duality",
        )?);
    }

    if matches!(suite, Suite::All | Suite::Content) {
        cfg.params.ensure_content_range()?;
        let kernel = RieszKernel::assemble(space, cfg.params, DiagonalMode::Zero);
        for idx in 0..cfg.content_sets {
            let set = random_subset(&mut rng, n);
            reports.push(check_capacity_le_content(
                space,
                &profile,
                cfg.params,
                &set,
                &cfg.check,
                &format!("content/s{idx:02}/{}", set_id(&set)),
            )?);
        }
        // ball feasibility and the ball capacity bound on sampled balls
        for idx in 0..cfg.content_sets {
            let center = rng.gen_range(0..n);
            let radii = space.critical_radii(center)?;
            let radius = radii[rng.gen_range(0..radii.len())];
            reports.push(check_ball_admissible(
                space,
                &profile,
                cfg.params,
                center,
                radius,
                &cfg.check,
                &format!("content/ball{idx:02}/c{center}/r={radius}"),
            )?);
            let members = space.ball_members(center, radius)?;
            let res = solve_capacity(&kernel, &members, cfg.check.solve.clone())?;
            let bound = crate::capacity::ball_capacity_bound(
                &profile,
                cfg.params,
                space.ball_mass(center, radius)?,
            );
            let mut report = CheckReport::evaluate(
                "lemma41_ball_bound",
                &format!("content/ball{idx:02}/c{center}/r={radius}"),
                res.primal_value,
                bound,
                ball_capacity_constant(&profile, cfg.params),
                cfg.check.tolerance,
            );
            report.passed &= res.converged;
            reports.push(report);
        }
        // constructive bound fed by the capacitary distribution of a set
        let set = random_subset(&mut rng, n);
        let res = solve_capacity(&kernel, &set, cfg.check.solve.clone())?;
        let outcome = content_bound_from_admissible(
            space,
            &profile,
            cfg.params,
            cfg.tilde_params,
            &set,
            &res.primal_f,
            &cfg.check,
            &format!("content/cert/{}", set_id(&set)),
        )?;
        reports.push(outcome.report);
    }

    reports.sort_by(|a, b| {
        a.check_name
            .cmp(&b.check_name)
            .then_with(|| a.instance_id.cmp(&b.instance_id))
    });
    Ok(reports)
}
