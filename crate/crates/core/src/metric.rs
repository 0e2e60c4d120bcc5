//! Finite metric spaces: validation, extremes, balls, and doubling estimates.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::scalar::{le_ulps, Scalar};

/// A finite metric space `(E, d)` with a validated dense distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace<T> {
    ids: Vec<String>,
    dist: Vec<T>,
    n: usize,
    coords: Option<Vec<Vec<T>>>,
}

impl<T: Scalar> FiniteMetricSpace<T> {
    /// Validates `raw` as a metric and labels points `"0"`, `"1"`, ...
    pub fn validate(raw: &[Vec<T>]) -> Result<Self> {
        let ids = (0..raw.len()).map(|i| i.to_string()).collect();
        Self::with_ids(ids, raw)
    }

    pub fn with_ids(ids: Vec<String>, raw: &[Vec<T>]) -> Result<Self> {
        let n = raw.len();
        if ids.len() != n {
            return Err(Error::LabelCount { labels: ids.len(), points: n });
        }
        let mut seen = HashSet::with_capacity(n);
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateLabel(id.clone()));
            }
        }
        for (row, r) in raw.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { row, len: r.len(), expected: n });
            }
        }
        for i in 0..n {
            for j in 0..n {
                let d = raw[i][j];
                if !d.is_finite() {
                    return Err(Error::NonFinite { i, j });
                }
                if d < T::zero() {
                    return Err(Error::NegativeDistance { i, j });
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if raw[i][j] != raw[j][i] {
                    return Err(Error::AsymmetricMatrix { i, j });
                }
            }
        }
        for i in 0..n {
            if raw[i][i] != T::zero() {
                return Err(Error::NonZeroDiagonal { i });
            }
            for j in (i + 1)..n {
                if raw[i][j] == T::zero() {
                    return Err(Error::ZeroOffDiagonal { i, j });
                }
            }
        }
        // Rounded Euclidean distances of nearly collinear triples can miss
        // by an ulp or two; anything beyond that is a genuine violation.
        for i in 0..n {
            for j in 0..n {
                if j == i {
                    continue;
                }
                let dij = raw[i][j];
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    if !le_ulps(raw[i][k], dij + raw[j][k]) {
                        return Err(Error::TriangleViolation { i, j, k });
                    }
                }
            }
        }
        let dist = raw.iter().flat_map(|r| r.iter().copied()).collect();
        Ok(Self { ids, dist, n, coords: None })
    }

    /// Builds the Euclidean distance matrix of `coords` and validates it.
    pub fn from_coords(ids: Vec<String>, coords: Vec<Vec<T>>) -> Result<Self> {
        if let Some(dim) = coords.first().map(Vec::len) {
            if let Some(bad) = coords.iter().find(|c| c.len() != dim) {
                return Err(Error::DimensionMismatch { expected: dim, found: bad.len() });
            }
        }
        let raw: Vec<Vec<T>> = coords
            .iter()
            .map(|a| coords.iter().map(|b| crate::scalar::dist(a, b)).collect())
            .collect();
        let mut space = Self::with_ids(ids, &raw)?;
        space.coords = Some(coords);
        Ok(space)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> T {
        self.dist[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn coords(&self) -> Option<&[Vec<T>]> {
        self.coords.as_deref()
    }

    pub fn matrix(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// `(diameter, smallest positive distance)`.
    pub fn extremes(&self) -> Result<(T, T)> {
        if self.n < 2 {
            return Err(Error::TooFewPoints { needed: 2, found: self.n });
        }
        let mut diam = T::zero();
        let mut dmin = T::infinity();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let d = self.d(i, j);
                diam = diam.max(d);
                dmin = dmin.min(d);
            }
        }
        Ok((diam, dmin))
    }

    /// Indices of the closed ball `B(center, r)`, ascending.
    pub fn ball_members(&self, center: usize, r: T) -> Vec<usize> {
        self.row(center)
            .iter()
            .enumerate()
            .filter(|(_, &d)| d <= r)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Selects the `(center, radius)` probes of the doubling estimator.
#[derive(Debug, Clone, Default)]
pub enum ProbePolicy<T> {
    /// Every center against every critical radius: all pairwise distances
    /// and their halves. Cover sizes are piecewise constant in the radius
    /// and these are the left endpoints of the pieces, so the maximum is
    /// exact over all `r > 0` for the given center set.
    #[default]
    Exhaustive,
    /// Every center against the given radii.
    Radii(Vec<T>),
    /// Explicit probes.
    Pairs(Vec<(usize, T)>),
}

/// Doubling constant measured on a finite set of probes.
#[derive(Debug, Clone, PartialEq)]
pub struct DoublingEstimate<T> {
    pub c0: u64,
    pub n0: T,
    /// Probes `(center, radius, cover size)` attaining `c0`.
    pub witnesses: Vec<(usize, T, usize)>,
}

/// Greedy cover of `E ∩ B(center, 2r)` by radius-`r` balls centered in it.
///
/// Picks the uncovered member of smallest index each round.
pub fn greedy_cover_size<T: Scalar>(space: &FiniteMetricSpace<T>, center: usize, r: T) -> usize {
    let members = space.ball_members(center, r + r);
    let mut covered = vec![false; members.len()];
    let mut balls = 0;
    for a in 0..members.len() {
        if covered[a] {
            continue;
        }
        balls += 1;
        let row = space.row(members[a]);
        for (b, &p) in members.iter().enumerate().skip(a) {
            if !covered[b] && row[p] <= r {
                covered[b] = true;
            }
        }
    }
    balls
}

pub fn estimate_doubling_constant<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    policy: &ProbePolicy<T>,
) -> Result<DoublingEstimate<T>> {
    let n = space.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, found: n });
    }
    let probes: Vec<(usize, T)> = match policy {
        ProbePolicy::Exhaustive => {
            let mut radii = Vec::with_capacity(n * (n - 1));
            for i in 0..n {
                for j in (i + 1)..n {
                    let d = space.d(i, j);
                    radii.push(d);
                    radii.push(d / T::lit(2.0));
                }
            }
            radii.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
            radii.dedup();
            (0..n).flat_map(|c| radii.iter().map(move |&r| (c, r))).collect()
        }
        ProbePolicy::Radii(radii) => {
            (0..n).flat_map(|c| radii.iter().map(move |&r| (c, r))).collect()
        }
        ProbePolicy::Pairs(pairs) => pairs.clone(),
    };

    let mut c0 = 1usize;
    let mut witnesses = Vec::new();
    for (center, r) in probes {
        if center >= n {
            return Err(Error::IndexOutOfRange { index: center, len: n });
        }
        let size = greedy_cover_size(space, center, r);
        if size > c0 {
            c0 = size;
            witnesses.clear();
        }
        if size == c0 {
            witnesses.push((center, r, size));
        }
    }
    Ok(DoublingEstimate {
        c0: c0 as u64,
        n0: T::lit(c0 as f64).log2(),
        witnesses,
    })
}

/// Ball count `ceil(c0 * lambda^(log2 c0))` covering a `lambda r` ball by `r` balls.
pub fn covering_bound<T: Scalar>(c0: u64, lambda: T) -> Result<u64> {
    if c0 == 0 {
        return Err(Error::BadDoublingConstant);
    }
    if !(lambda >= T::one()) {
        return Err(Error::BadLambda(lambda.as_f64()));
    }
    let c = c0 as f64;
    let raw = c * lambda.as_f64().powf(c.log2());
    // powf/log2 leave ~1e-15 noise on exact integer results
    let nearest = raw.round();
    let value = if (raw - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        raw.ceil()
    };
    Ok(if value >= u64::MAX as f64 { u64::MAX } else { value as u64 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> FiniteMetricSpace<f64> {
        let raw: Vec<Vec<f64>> = points
            .iter()
            .map(|a| points.iter().map(|b| (a - b).abs()).collect())
            .collect();
        FiniteMetricSpace::validate(&raw).unwrap()
    }

    #[test]
    fn validates_smallest_metric() {
        let s = FiniteMetricSpace::validate(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.d(0, 1), 1.0);
    }

    #[test]
    fn rejects_asymmetric() {
        let err = FiniteMetricSpace::validate(&[vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::AsymmetricMatrix { i: 0, j: 1 }));
    }

    #[test]
    fn rejects_triangle_violation_with_witness() {
        let raw = vec![vec![0.0, 1.0, 3.0], vec![1.0, 0.0, 1.0], vec![3.0, 1.0, 0.0]];
        let err = FiniteMetricSpace::validate(&raw).unwrap_err();
        assert!(matches!(err, Error::TriangleViolation { i: 0, j: 1, k: 2 }), "{err}");
    }

    #[test]
    fn rejects_bad_entries() {
        let neg = vec![vec![0.0, -1.0], vec![-1.0, 0.0]];
        assert!(matches!(
            FiniteMetricSpace::validate(&neg),
            Err(Error::NegativeDistance { .. })
        ));
        let zero = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        assert!(matches!(
            FiniteMetricSpace::validate(&zero),
            Err(Error::ZeroOffDiagonal { i: 0, j: 1 })
        ));
        let ragged = vec![vec![0.0, 1.0], vec![1.0]];
        assert!(matches!(
            FiniteMetricSpace::validate(&ragged),
            Err(Error::NotSquare { row: 1, .. })
        ));
        let nan = vec![vec![0.0, f64::NAN], vec![f64::NAN, 0.0]];
        assert!(matches!(
            FiniteMetricSpace::validate(&nan),
            Err(Error::NonFinite { .. })
        ));
        let dup = FiniteMetricSpace::with_ids(
            vec!["a".into(), "a".into()],
            &[vec![0.0, 1.0], vec![1.0, 0.0]],
        );
        assert!(matches!(dup, Err(Error::DuplicateLabel(_))));
    }

    #[test]
    fn extremes_examples() {
        assert_eq!(line(&[0.0, 1.0, 3.0]).extremes().unwrap(), (3.0, 1.0));
        assert_eq!(line(&[0.0, 5.0]).extremes().unwrap(), (5.0, 5.0));
        let grid = FiniteMetricSpace::from_coords(
            (0..4).map(|i| i.to_string()).collect(),
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
        )
        .unwrap();
        let (diam, dmin) = grid.extremes().unwrap();
        assert!((diam - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(dmin, 1.0);
        assert!(matches!(line(&[0.0]).extremes(), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn ball_examples() {
        let s = line(&[0.0, 1.0, 3.0]);
        assert_eq!(s.ball_members(0, 1.0), vec![0, 1]);
        assert_eq!(s.ball_members(2, 0.0), vec![2]);
        assert_eq!(s.ball_members(1, 2.0), vec![0, 1, 2]);
    }

    #[test]
    fn single_pair_needs_two_balls() {
        let est = estimate_doubling_constant(&line(&[0.0, 1.0]), &ProbePolicy::Exhaustive).unwrap();
        assert_eq!(est.c0, 2);
        assert_eq!(est.n0, 1.0);
        // attained at r = 1/2, where B(x, 1) holds both points
        assert!(est.witnesses.iter().all(|&(_, r, s)| r == 0.5 && s == 2));
    }

    #[test]
    fn singleton_probes_cover_with_one_ball() {
        let s = line(&[0.0, 1.0, 3.0]);
        let est = estimate_doubling_constant(&s, &ProbePolicy::Radii(vec![0.1, 0.4])).unwrap();
        assert_eq!(est.c0, 1);
    }

    #[test]
    fn covering_bound_examples() {
        assert_eq!(covering_bound(4, 8.0).unwrap(), 256);
        assert_eq!(covering_bound(2, 1.0).unwrap(), 2);
        assert_eq!(covering_bound(16, 2.0).unwrap(), 256);
        assert!(matches!(covering_bound(4, 0.5), Err(Error::BadLambda(_))));
    }

    #[test]
    fn works_in_single_precision() {
        let raw: Vec<Vec<f32>> = vec![vec![0.0, 1.0, 3.0], vec![1.0, 0.0, 2.0], vec![3.0, 2.0, 0.0]];
        let s = FiniteMetricSpace::validate(&raw).unwrap();
        assert_eq!(s.extremes().unwrap(), (3.0f32, 1.0f32));
        let est = estimate_doubling_constant(&s, &ProbePolicy::Exhaustive).unwrap();
        assert!(est.c0 >= 2);
    }
}
