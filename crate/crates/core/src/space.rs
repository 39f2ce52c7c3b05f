//! Finite metric measure spaces with open-ball mass queries.
//!
//! A space is a finite point set with a symmetric distance table and
//! strictly positive point masses. Balls follow the open convention
//! `B(x,r) = {y : d(x,y) < r}`, so a ball of radius zero is empty and the
//! center always belongs to any ball of positive radius.

use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest point count for which the triangle inequality is verified over
/// all triples at construction; larger spaces are spot-checked on random
/// triples.
pub const TRIANGLE_EXHAUSTIVE_CAP: usize = 512;

/// Number of random triples sampled when the exhaustive cap is exceeded.
pub const TRIANGLE_SAMPLE_COUNT: usize = 100_000;

const TRIANGLE_REL_SLACK: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct MetricMeasureSpace {
    n: usize,
    dist: Vec<f64>,
    mass: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl MetricMeasureSpace {
    /// Builds a space from a full distance table given as rows.
    pub fn from_rows(
        rows: Vec<Vec<f64>>,
        mass: Vec<f64>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidSpace(format!(
                    "dist row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
        }
        let mut dist = vec![0.0; n * n];
        for (i, row) in rows.iter().enumerate() {
            for (j, &d) in row.iter().enumerate() {
                dist[i * n + j] = d;
            }
        }
        Self::from_flat(n, dist, mass, labels)
    }

    /// Builds a space with Euclidean distances between coordinate points.
    pub fn from_points(
        points: &[Vec<f64>],
        mass: Vec<f64>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        Self::from_points_snowflaked(points, 1.0, mass, labels)
    }

    /// Builds a space with snowflaked Euclidean distances `d(x,y)^epsilon`.
    pub fn from_points_snowflaked(
        points: &[Vec<f64>],
        epsilon: f64,
        mass: Vec<f64>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "snowflake exponent must lie in (0, 1], got {epsilon}"
            )));
        }
        let n = points.len();
        if n == 0 {
            return Err(Error::InvalidSpace("empty point list".into()));
        }
        let dim = points[0].len();
        for (i, pt) in points.iter().enumerate() {
            if pt.len() != dim {
                return Err(Error::InvalidSpace(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    pt.len()
                )));
            }
        }
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d2: f64 = points[i]
                    .iter()
                    .zip(&points[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                let mut d = d2.sqrt();
                if epsilon != 1.0 {
                    d = d.powf(epsilon);
                }
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        Self::from_flat(n, dist, mass, labels)
    }

    fn from_flat(
        n: usize,
        mut dist: Vec<f64>,
        mass: Vec<f64>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if mass.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: mass.len(),
            });
        }
        if let Some(ref l) = labels {
            if l.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: l.len(),
                });
            }
        }
        for (i, &m) in mass.iter().enumerate() {
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::InvalidSpace(format!(
                    "mass[{i}] must be strictly positive and finite, got {m}"
                )));
            }
        }
        for i in 0..n {
            let dii = dist[i * n + i];
            if dii != 0.0 {
                return Err(Error::InvalidSpace(format!(
                    "dist[{i}][{i}] must be 0, got {dii}"
                )));
            }
            for j in (i + 1)..n {
                let dij = dist[i * n + j];
                let dji = dist[j * n + i];
                if !dij.is_finite() || !dji.is_finite() {
                    return Err(Error::InvalidSpace(format!(
                        "dist[{i}][{j}] must be finite"
                    )));
                }
                if (dij - dji).abs() > TRIANGLE_REL_SLACK * dij.abs().max(1.0) {
                    return Err(Error::InvalidSpace(format!(
                        "dist[{i}][{j}] = {dij} differs from dist[{j}][{i}] = {dji}"
                    )));
                }
                if dij <= 0.0 {
                    return Err(Error::InvalidSpace(format!(
                        "dist[{i}][{j}] must be positive for distinct points, got {dij}"
                    )));
                }
                // mirror so the stored table is exactly symmetric
                dist[j * n + i] = dij;
            }
        }
        let space = MetricMeasureSpace {
            n,
            dist,
            mass,
            labels,
        };
        space.verify_triangle()?;
        Ok(space)
    }

    fn verify_triangle(&self) -> Result<()> {
        let n = self.n;
        let check = |i: usize, j: usize, k: usize| -> Result<()> {
            let dik = self.d(i, k);
            let bound = (self.d(i, j) + self.d(j, k)) * (1.0 + TRIANGLE_REL_SLACK);
            if dik > bound {
                return Err(Error::InvalidSpace(format!(
                    "triangle inequality fails: dist[{i}][{k}] = {dik} > dist[{i}][{j}] + dist[{j}][{k}]"
                )));
            }
            Ok(())
        };
        if n <= TRIANGLE_EXHAUSTIVE_CAP {
            for i in 0..n {
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    for k in 0..n {
                        check(i, j, k)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x7521_ab1e);
            for _ in 0..TRIANGLE_SAMPLE_COUNT {
                let i = rng.gen_range(0..n);
                let j = rng.gen_range(0..n);
                let k = rng.gen_range(0..n);
                check(i, j, k)?;
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn dist_row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn mass(&self, i: usize) -> f64 {
        self.mass[i]
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange {
                index: i,
                n: self.n,
            });
        }
        Ok(())
    }

    fn check_radius(&self, radius: f64) -> Result<()> {
        if radius.is_nan() || radius < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "radius must be nonnegative, got {radius}"
            )));
        }
        Ok(())
    }

    /// Mass of the open ball `{y : d(center, y) < radius}`.
    pub fn ball_mass(&self, center: usize, radius: f64) -> Result<f64> {
        self.check_index(center)?;
        self.check_radius(radius)?;
        Ok(self.ball_mass_unchecked(center, radius))
    }

    pub(crate) fn ball_mass_unchecked(&self, center: usize, radius: f64) -> f64 {
        let row = self.dist_row(center);
        row.iter()
            .zip(&self.mass)
            .filter(|(&d, _)| d < radius)
            .map(|(_, &m)| m)
            .sum()
    }

    /// Mass of the closed ball `{y : d(center, y) <= radius}`.
    pub fn closed_ball_mass(&self, center: usize, radius: f64) -> Result<f64> {
        self.check_index(center)?;
        self.check_radius(radius)?;
        let row = self.dist_row(center);
        Ok(row
            .iter()
            .zip(&self.mass)
            .filter(|(&d, _)| d <= radius)
            .map(|(_, &m)| m)
            .sum())
    }

    /// Mass of the sphere `{y : d(center, y) = radius}`.
    pub fn sphere_mass(&self, center: usize, radius: f64) -> Result<f64> {
        self.check_index(center)?;
        self.check_radius(radius)?;
        let row = self.dist_row(center);
        Ok(row
            .iter()
            .zip(&self.mass)
            .filter(|(&d, _)| d == radius)
            .map(|(_, &m)| m)
            .sum())
    }

    /// Indices of points in the open ball around `center`.
    pub fn ball_members(&self, center: usize, radius: f64) -> Result<Vec<usize>> {
        self.check_index(center)?;
        self.check_radius(radius)?;
        let row = self.dist_row(center);
        Ok((0..self.n).filter(|&j| row[j] < radius).collect())
    }

    /// Indices of points in the closed ball around `center`.
    pub fn closed_ball_members(&self, center: usize, radius: f64) -> Result<Vec<usize>> {
        self.check_index(center)?;
        self.check_radius(radius)?;
        let row = self.dist_row(center);
        Ok((0..self.n).filter(|&j| row[j] <= radius).collect())
    }

    /// Sorted distinct distances realized from `center`, starting at 0.
    pub fn distinct_distances(&self, center: usize) -> Result<Vec<f64>> {
        self.check_index(center)?;
        let mut ds: Vec<f64> = self.dist_row(center).to_vec();
        ds.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ds.dedup();
        Ok(ds)
    }

    /// One representative open radius per realized ball around `center`.
    ///
    /// The returned radii sit strictly between consecutive realized
    /// distances, so the open ball of radius `r[k]` equals the closed ball
    /// of the k-th realized distance. The list therefore enumerates every
    /// distinct ball around the center exactly once, smallest first (the
    /// first entry gives the singleton `{center}`).
    pub fn critical_radii(&self, center: usize) -> Result<Vec<f64>> {
        let ds = self.distinct_distances(center)?;
        let m = ds.len();
        let mut radii = Vec::with_capacity(m);
        for k in 0..m {
            let r = if k + 1 < m {
                0.5 * (ds[k] + ds[k + 1])
            } else if m >= 2 {
                ds[m - 1] + 0.5 * (ds[m - 1] - ds[m - 2])
            } else {
                // single point space: any positive radius captures it
                1.0
            };
            radii.push(r);
        }
        Ok(radii)
    }
}

/// Per-center cache of sorted distances and prefix-summed masses; answers
/// ball-mass queries in O(log n) after O(n log n) setup.
pub(crate) struct SortedRow {
    dists: Vec<f64>,
    prefix: Vec<f64>,
}

impl SortedRow {
    pub fn new(space: &MetricMeasureSpace, center: usize) -> Self {
        let n = space.len();
        let mut order: Vec<usize> = (0..n).collect();
        let row = space.dist_row(center);
        order.sort_by(|&a, &b| row[a].partial_cmp(&row[b]).unwrap());
        let mut dists = Vec::with_capacity(n);
        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for &j in &order {
            dists.push(row[j]);
            acc += space.mass(j);
            prefix.push(acc);
        }
        SortedRow { dists, prefix }
    }

    /// Mass of the open ball of the given radius.
    pub fn open_mass(&self, radius: f64) -> f64 {
        let k = self.dists.partition_point(|&d| d < radius);
        self.prefix[k]
    }
}
