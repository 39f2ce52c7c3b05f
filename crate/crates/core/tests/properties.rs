//! Property tests for the structural invariants: ball-mass monotonicity,
//! potential linearity, kernel comparability, norm orderings, cover and
//! covering-lemma guarantees, and the capacity axioms at solver tolerance.

use proptest::prelude::*;
use rieszcap_core::*;

fn space_strategy(max_n: usize) -> impl Strategy<Value = MetricMeasureSpace> {
    (2..=max_n)
        .prop_flat_map(|n| {
            let coords = proptest::collection::vec((0.0f64..1.0, 0.0f64..1.0), n);
            let masses = proptest::collection::vec(0.1f64..10.0, n);
            (coords, masses)
        })
        .prop_filter_map("distinct points", |(coords, masses)| {
            let pts: Vec<Vec<f64>> = coords.iter().map(|&(x, y)| vec![x, y]).collect();
            MetricMeasureSpace::from_points(&pts, masses, None).ok()
        })
}

fn params_strategy() -> impl Strategy<Value = RieszParams> {
    (0.1f64..0.45, 1.5f64..3.0)
        .prop_map(|(gamma, p)| RieszParams::new(gamma, p).expect("valid ranges"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ball_mass_is_monotone_with_sphere_jumps(space in space_strategy(8), radius in 0.0f64..2.0) {
        for c in 0..space.len() {
            let open = space.ball_mass(c, radius).unwrap();
            let sphere = space.sphere_mass(c, radius).unwrap();
            let closed = space.closed_ball_mass(c, radius).unwrap();
            prop_assert!((open + sphere - closed).abs() < 1e-12);
            let bigger = space.ball_mass(c, radius * 1.5 + 0.1).unwrap();
            prop_assert!(bigger >= open);
        }
    }

    #[test]
    fn relabeling_preserves_profile_scalars(space in space_strategy(7), seed in 0u64..1000) {
        let n = space.len();
        let mut perm: Vec<usize> = (0..n).collect();
        // Fisher-Yates from the seed
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % (i + 1);
            perm.swap(i, j);
        }
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| space.d(perm[i], perm[j])).collect())
            .collect();
        let masses: Vec<f64> = (0..n).map(|i| space.mass(perm[i])).collect();
        let shuffled = MetricMeasureSpace::from_rows(rows, masses, None).unwrap();
        let a = DoublingProfile::compute(&space).unwrap();
        let b = DoublingProfile::compute(&shuffled).unwrap();
        prop_assert!((a.doubling_constant - b.doubling_constant).abs() < 1e-9);
        prop_assert!((a.reverse_exponent - b.reverse_exponent).abs() < 1e-9);
        prop_assert!((a.reverse_constant - b.reverse_constant).abs() < 1e-9 * a.reverse_constant.max(1.0));
    }

    #[test]
    fn potential_is_linear_and_monotone(
        space in space_strategy(7),
        params in params_strategy(),
        scale_a in 0.1f64..3.0,
        scale_b in 0.1f64..3.0,
    ) {
        let n = space.len();
        let kernel = RieszKernel::assemble(&space, params, DiagonalMode::Zero);
        let f: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin().abs()).collect();
        let g: Vec<f64> = (0..n).map(|i| (i as f64 * 0.61).cos().abs() + 0.1).collect();
        let combined: Vec<f64> = f.iter().zip(&g).map(|(a, b)| scale_a * a + scale_b * b).collect();
        let lhs = kernel.potential(&combined).unwrap();
        let pf = kernel.potential(&f).unwrap();
        let pg = kernel.potential(&g).unwrap();
        for x in 0..n {
            let rhs = scale_a * pf[x] + scale_b * pg[x];
            prop_assert!((lhs[x] - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        }
        // monotone: f <= f + g pointwise
        let sum: Vec<f64> = f.iter().zip(&g).map(|(a, b)| a + b).collect();
        let psum = kernel.potential(&sum).unwrap();
        for x in 0..n {
            prop_assert!(pf[x] <= psum[x] + 1e-12);
        }
    }

    #[test]
    fn kernel_comparability_through_doubling(space in space_strategy(8)) {
        // mu(B(j,d)) <= c_d^2 mu(B(i,d)) for d = dist(i,j)
        let profile = DoublingProfile::compute(&space).unwrap();
        let cd2 = profile.doubling_constant.powi(2);
        for i in 0..space.len() {
            for j in 0..space.len() {
                if i == j { continue; }
                let d = space.d(i, j);
                let mi = space.ball_mass(i, d).unwrap();
                let mj = space.ball_mass(j, d).unwrap();
                prop_assert!(mj <= cd2 * mi * (1.0 + 1e-12),
                    "mu(B({j},{d})) = {mj} > c_d^2 mu(B({i},{d})) = {}", cd2 * mi);
            }
        }
    }

    #[test]
    fn weak_norm_below_strong_norm(space in space_strategy(8), p in 1.0f64..4.0) {
        let n = space.len();
        let f: Vec<f64> = (0..n).map(|i| ((i * 7 + 3) % 11) as f64 / 3.0).collect();
        let weak = weak_lp_norm(&space, &f, p).unwrap();
        let strong = lp_norm(&space, &f, p).unwrap();
        prop_assert!(weak <= strong * (1.0 + 1e-12));
    }

    #[test]
    fn lorentz_qp_with_measure_is_lp(space in space_strategy(6), p in 1.0f64..3.0) {
        let n = space.len();
        let f: Vec<f64> = (0..n).map(|i| (i as f64 * 0.83).sin().abs() * 2.0).collect();
        let masses = space.masses().to_vec();
        let lorentz = capacitary_lorentz_norm(
            |level: &[usize]| Ok(level.iter().map(|&i| masses[i]).sum()),
            &f,
            p,
            p,
        ).unwrap();
        let lp = lp_norm(&space, &f, p).unwrap();
        prop_assert!((lorentz - lp).abs() <= 1e-9 * lp.max(1.0));
    }

    #[test]
    fn weak_duality_certificates(space in space_strategy(7), params in params_strategy()) {
        let kernel = RieszKernel::assemble(&space, params, DiagonalMode::Zero);
        let res = solve_capacity(&kernel, &[0, 1], SolveOptions::default()).unwrap();
        prop_assert!(res.dual_value <= res.primal_value * (1.0 + 1e-9));
        prop_assert!(res.feasibility_slack >= -1e-9);
        // any admissible test measure stays below the primal value
        let mut nu = vec![0.0; space.len()];
        nu[0] = 1.0;
        let bound = dual_lower_bound(&kernel, &[0, 1], &nu).unwrap();
        prop_assert!(bound <= res.primal_value * (1.0 + 1e-6));
    }

    #[test]
    fn capacity_monotone_and_subadditive(space in space_strategy(6), params in params_strategy()) {
        let n = space.len();
        let kernel = RieszKernel::assemble(&space, params, DiagonalMode::Zero);
        let opts = SolveOptions::default();
        let half: Vec<usize> = (0..n / 2 + 1).collect();
        let all: Vec<usize> = (0..n).collect();
        let rest: Vec<usize> = (n / 2 + 1..n).collect();
        let c_half = solve_capacity(&kernel, &half, opts.clone()).unwrap().primal_value;
        let c_all = solve_capacity(&kernel, &all, opts.clone()).unwrap().primal_value;
        prop_assert!(c_half <= c_all + 2e-6 * c_all.max(1.0));
        if !rest.is_empty() {
            let c_rest = solve_capacity(&kernel, &rest, opts).unwrap().primal_value;
            prop_assert!(c_all <= c_half + c_rest + 2e-6 * (c_half + c_rest));
        }
    }

    #[test]
    fn greedy_within_harmonic_factor(space in space_strategy(8)) {
        let n = space.len();
        let params = RieszParams::new(0.25, 2.0).unwrap();
        let set: Vec<usize> = (0..n).collect();
        let opts = CoverOptions::default();
        let g = modified_content(&space, params, &set, f64::INFINITY, CoverMode::Greedy, &opts).unwrap();
        let e = modified_content(&space, params, &set, f64::INFINITY, CoverMode::Exact, &opts).unwrap();
        prop_assert!(g.total_weight >= e.total_weight - 1e-12);
        let harmonic: f64 = (1..=n).map(|k| 1.0 / k as f64).sum();
        prop_assert!(g.total_weight <= harmonic * e.total_weight * (1.0 + 1e-9),
            "greedy {} vs exact {} exceeds H_{n}", g.total_weight, e.total_weight);
    }

    #[test]
    fn content_monotone_up_to_recentering(space in space_strategy(7), params in params_strategy()) {
        // exact monotonicity can fail for center-restricted covers; two
        // doublings pay for recentering
        prop_assume!(params.gamma_p() < 1.0);
        let n = space.len();
        let profile = DoublingProfile::compute(&space).unwrap();
        let sub: Vec<usize> = (0..n / 2 + 1).collect();
        let sup: Vec<usize> = (0..n).collect();
        let opts = CoverOptions::default();
        let c_sub = modified_content(&space, params, &sub, f64::INFINITY, CoverMode::Exact, &opts).unwrap();
        let c_sup = modified_content(&space, params, &sup, f64::INFINITY, CoverMode::Exact, &opts).unwrap();
        let factor = profile.doubling_constant.powf(2.0 * (1.0 - params.gamma_p()));
        prop_assert!(c_sub.total_weight <= factor * c_sup.total_weight * (1.0 + 1e-9));
    }

    #[test]
    fn r_cap_monotone(space in space_strategy(7), cap in 0.2f64..1.5) {
        let params = RieszParams::new(0.25, 2.0).unwrap();
        let set: Vec<usize> = (0..space.len()).collect();
        let opts = CoverOptions::default();
        let capped = modified_content(&space, params, &set, cap, CoverMode::Exact, &opts).unwrap();
        let free = modified_content(&space, params, &set, f64::INFINITY, CoverMode::Exact, &opts).unwrap();
        prop_assert!(capped.total_weight >= free.total_weight - 1e-12);
    }

    #[test]
    fn five_r_cover_guarantees(space in space_strategy(8), r_seed in 1u64..500) {
        let n = space.len();
        let radii: Vec<(usize, f64)> = (0..n)
            .map(|i| {
                let r = 0.05 + 0.4 * ((i as u64 * r_seed) % 7) as f64 / 7.0;
                (i, r)
            })
            .collect();
        let selected = five_r_cover(&space, &radii).unwrap();
        // pairwise metric disjointness
        for (a, &(xa, ra)) in selected.iter().enumerate() {
            for &(xb, rb) in &selected[a + 1..] {
                prop_assert!(space.d(xa, xb) >= ra + rb - 1e-12);
            }
        }
        // five-fold dilations cover the inputs
        for &(x, _) in &radii {
            prop_assert!(selected.iter().any(|&(c, rc)| space.d(x, c) < 5.0 * rc));
        }
    }

    #[test]
    fn mass_scaling_homogeneity_via_qp(lambda in 0.2f64..5.0) {
        // capacity scales by lambda^{1 - gamma p} under mass -> lambda mass
        let params = RieszParams::new(0.25, 2.0).unwrap();
        let pts: Vec<Vec<f64>> = vec![vec![0.0], vec![1.0], vec![2.3], vec![3.1]];
        let base = MetricMeasureSpace::from_points(&pts, vec![1.0, 2.0, 0.5, 1.5], None).unwrap();
        let scaled_mass: Vec<f64> = base.masses().iter().map(|m| lambda * m).collect();
        let scaled = MetricMeasureSpace::from_points(&pts, scaled_mass, None).unwrap();
        let kb = RieszKernel::assemble(&base, params, DiagonalMode::Zero);
        let ks = RieszKernel::assemble(&scaled, params, DiagonalMode::Zero);
        let set = [0, 2];
        let cb = solve_qp_capacity(&kb, &set).unwrap().value;
        let cs = solve_qp_capacity(&ks, &set).unwrap().value;
        let expected = cb * lambda.powf(1.0 - params.gamma_p());
        prop_assert!((cs - expected).abs() <= 1e-7 * expected,
            "scaled capacity {cs} vs expected {expected}");
    }
}
