//! Mass-weighted Lebesgue, weak-type and capacitary Lorentz norms.

use crate::space::MetricMeasureSpace;
use crate::{Error, Result};

/// `(sum |f|^p mass)^{1/p}` for `p >= 1`.
pub fn lp_norm(space: &MetricMeasureSpace, f: &[f64], p: f64) -> Result<f64> {
    lp_norm_with_mass(space.masses(), f, p)
}

pub fn lp_norm_with_mass(mass: &[f64], f: &[f64], p: f64) -> Result<f64> {
    check_inputs(mass, f, p)?;
    let total: f64 = f
        .iter()
        .zip(mass)
        .map(|(v, m)| v.abs().powf(p) * m)
        .sum();
    Ok(total.powf(1.0 / p))
}

/// `sup_t t * mu({|f| > t})^{1/p}`.
///
/// The supremum over each constancy piece of the distribution function is
/// approached at its right endpoint, so it equals the maximum over distinct
/// values `v` of `v * mu({|f| >= v})^{1/p}`.
pub fn weak_lp_norm(space: &MetricMeasureSpace, f: &[f64], p: f64) -> Result<f64> {
    weak_lp_norm_with_mass(space.masses(), f, p)
}

pub fn weak_lp_norm_with_mass(mass: &[f64], f: &[f64], p: f64) -> Result<f64> {
    check_inputs(mass, f, p)?;
    let mut best = 0.0_f64;
    for v in distinct_abs_values(f) {
        let measure: f64 = f
            .iter()
            .zip(mass)
            .filter(|(x, _)| x.abs() >= v)
            .map(|(_, m)| m)
            .sum();
        best = best.max(v * measure.powf(1.0 / p));
    }
    Ok(best)
}

/// Capacitary Lorentz quasinorm with set function supplied by an oracle.
///
/// For finite `q` the threshold integral is exact: the superlevel set is
/// constant between consecutive values of `|f|`, so the integral is a
/// finite sum over those pieces. `q = inf` takes the supremum over
/// breakpoints instead. The oracle receives the index set of each
/// superlevel set; oracle failures propagate.
pub fn capacitary_lorentz_norm<F>(
    capacity_oracle: F,
    f: &[f64],
    p: f64,
    q: f64,
) -> Result<f64>
where
    F: FnMut(&[usize]) -> Result<f64>,
{
    let mut oracle = capacity_oracle;
    if !(p > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "lorentz norm requires p > 0, got {p}"
        )));
    }
    if !(q > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "lorentz norm requires q > 0 or q = inf, got {q}"
        )));
    }
    let values = distinct_abs_values(f);
    if values.is_empty() {
        return Ok(0.0);
    }
    if q.is_infinite() {
        let mut best = 0.0_f64;
        for &v in &values {
            let level: Vec<usize> = superlevel(f, v);
            let cap = oracle(&level)?;
            best = best.max(v * cap.powf(1.0 / p));
        }
        return Ok(best);
    }
    // sum over pieces [v_{j-1}, v_j) where {|f| > t} = {|f| >= v_j}
    let mut acc = 0.0_f64;
    let mut prev = 0.0_f64;
    for &v in &values {
        let level: Vec<usize> = superlevel(f, v);
        let cap = oracle(&level)?;
        acc += (v.powf(q) - prev.powf(q)) * cap.powf(q / p);
        prev = v;
    }
    Ok(acc.powf(1.0 / q))
}

/// Indices with `|f| >= threshold`.
pub fn superlevel(f: &[f64], threshold: f64) -> Vec<usize> {
    (0..f.len()).filter(|&i| f[i].abs() >= threshold).collect()
}

/// Indices with `|f| > threshold` (strict).
pub fn strict_superlevel(f: &[f64], threshold: f64) -> Vec<usize> {
    (0..f.len()).filter(|&i| f[i].abs() > threshold).collect()
}

/// Sorted distinct positive values of `|f|`.
pub fn distinct_abs_values(f: &[f64]) -> Vec<f64> {
    let mut vals: Vec<f64> = f.iter().map(|v| v.abs()).filter(|&v| v > 0.0).collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals.dedup();
    vals
}

fn check_inputs(mass: &[f64], f: &[f64], p: f64) -> Result<()> {
    if mass.len() != f.len() {
        return Err(Error::LengthMismatch {
            expected: mass.len(),
            got: f.len(),
        });
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "norm exponent must satisfy p >= 1, got {p}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn s2() -> MetricMeasureSpace {
        MetricMeasureSpace::from_rows(
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            vec![1.0, 1.0],
            None,
        )
        .unwrap()
    }

    fn s3() -> MetricMeasureSpace {
        MetricMeasureSpace::from_rows(
            vec![
                vec![0.0, 1.0, 1.0],
                vec![1.0, 0.0, 1.0],
                vec![1.0, 1.0, 0.0],
            ],
            vec![1.0; 3],
            None,
        )
        .unwrap()
    }

    #[test]
    fn single_breakpoint_norms() {
        let s = s2();
        let f = [2.0, 0.0];
        assert_relative_eq!(lp_norm(&s, &f, 2.0).unwrap(), 2.0);
        assert_relative_eq!(weak_lp_norm(&s, &f, 2.0).unwrap(), 2.0);
        assert_eq!(lp_norm(&s, &[0.0, 0.0], 2.0).unwrap(), 0.0);
        assert_eq!(weak_lp_norm(&s, &[0.0, 0.0], 2.0).unwrap(), 0.0);
    }

    #[test]
    fn cavalieri_cross_check() {
        // direct sum 14 equals the layer-cake integral 3 + 6 + 5
        let s = s3();
        let f = [1.0, 2.0, 3.0];
        let direct = lp_norm(&s, &f, 2.0).unwrap().powi(2);
        assert_relative_eq!(direct, 14.0);
        // mu({|f| > t}) is 3 on [0,1), 2 on [1,2), 1 on [2,3); integrate
        // 2 t mu({|f| > t}) piece by piece
        let mut integral = 0.0;
        integral += 3.0 * (1.0f64.powi(2) - 0.0);
        integral += 2.0 * (2.0f64.powi(2) - 1.0);
        integral += 1.0 * (3.0f64.powi(2) - 4.0);
        assert_relative_eq!(direct, integral);
    }

    #[test]
    fn weak_norm_never_exceeds_strong() {
        let s = s3();
        let f = [0.3, 1.7, 0.9];
        let weak = weak_lp_norm(&s, &f, 2.0).unwrap();
        let strong = lp_norm(&s, &f, 2.0).unwrap();
        assert!(weak <= strong + 1e-12);
    }

    #[test]
    fn lorentz_sup_form() {
        // capacity oracle: C({a}) = 1 on the singleton containing index 0
        let f = [2.0, 0.0];
        let norm = capacitary_lorentz_norm(
            |level: &[usize]| {
                assert_eq!(level, &[0]);
                Ok(1.0)
            },
            &f,
            2.0,
            f64::INFINITY,
        )
        .unwrap();
        assert_relative_eq!(norm, 2.0);

        let zero =
            capacitary_lorentz_norm(|_: &[usize]| Ok(1.0), &[0.0, 0.0], 2.0, f64::INFINITY)
                .unwrap();
        assert_eq!(zero, 0.0);
    }

    #[test]
    fn lorentz_with_measure_is_the_lp_norm() {
        // q = p with capacity replaced by the measure: Cavalieri again
        let s = s3();
        let f = [1.0, 2.0, 3.0];
        let p = 2.0;
        let masses = s.masses().to_vec();
        let norm = capacitary_lorentz_norm(
            |level: &[usize]| Ok(level.iter().map(|&i| masses[i]).sum()),
            &f,
            p,
            p,
        )
        .unwrap();
        assert_relative_eq!(norm, lp_norm(&s, &f, p).unwrap(), epsilon = 1e-12);
    }
}
