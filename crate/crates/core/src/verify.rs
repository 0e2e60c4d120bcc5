//! Exhaustive certification of a built embedding.
//!
//! Everything here re-evaluates the map from its stored vectors with its own
//! loops; nothing calls back into the builder's evaluation paths.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::embed::{AssignmentKey, Direction, EmbeddingMap};
use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::nets::NetLevel;
use crate::scalar::Scalar;

/// Relative slack on every inequality, absorbing summation round-off.
pub const SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    NetSeparation,
    Covering,
    ClassSeparation,
    PaletteSize,
    MissingVector,
    VectorNorm,
    Separation,
    LevelLipschitz,
    LevelSup,
    Tail,
    LowerBound,
    UpperBound,
    CoordinateMismatch,
}

/// One failed inequality: `value` should have been on the right side of `bound`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub check: Check,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<Direction>,
    pub points: Vec<usize>,
    pub value: f64,
    pub bound: f64,
}

impl Violation {
    fn new(check: Check, points: Vec<usize>, value: f64, bound: f64) -> Self {
        Self { check, k: None, xi: None, direction: None, points, value, bound }
    }

    fn at(mut self, k: i32, xi: Option<usize>, direction: Option<Direction>) -> Self {
        self.k = Some(k);
        self.xi = xi;
        self.direction = direction;
        self
    }
}

pub fn sort_violations(v: &mut [Violation]) {
    v.sort_by(|a, b| {
        (a.check, a.k, a.xi, a.direction, &a.points)
            .cmp(&(b.check, b.k, b.xi, b.direction, &b.points))
            .then(a.value.total_cmp(&b.value))
    });
}

fn le<T: Scalar>(value: T, bound: T) -> bool {
    value <= bound * (T::one() + T::lit(SLACK))
}

fn ge<T: Scalar>(value: T, bound: T) -> bool {
    value >= bound * (T::one() - T::lit(SLACK))
}

fn gap<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (&x, &y)| s + (x - y) * (x - y)).sqrt()
}

fn length<T: Scalar>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |s, &x| s + x * x).sqrt()
}

/// Direct evaluation of the map's streams from the formulas.
pub struct ReferenceEvaluator<'a, T> {
    map: &'a EmbeddingMap<T>,
    space: &'a FiniteMetricSpace<T>,
}

impl<'a, T: Scalar> ReferenceEvaluator<'a, T> {
    pub fn new(space: &'a FiniteMetricSpace<T>, map: &'a EmbeddingMap<T>) -> Result<Self> {
        if space.len() != map.space().len() {
            return Err(Error::DimensionMismatch { expected: map.space().len(), found: space.len() });
        }
        Ok(Self { map, space })
    }

    /// `max(0, 1 - dist(x, B(c, r)) / r)` with `dist(x, B) = max(0, d(x, c) - r)`.
    fn phi(&self, center: usize, r: T, x: usize) -> T {
        let to_ball = (self.space.d(center, x) - r).max(T::zero());
        (T::one() - to_ball / r).max(T::zero())
    }

    fn weight(&self, level: &NetLevel<T>) -> T {
        level.radius.powf(self.map.params().alpha)
    }

    fn zero(&self) -> Vec<T> {
        vec![T::zero(); self.map.m()]
    }

    fn accumulate(&self, acc: &mut [T], level: &NetLevel<T>, dir: Direction, j: usize, x: usize, w: T) {
        let phi = self.phi(level.net[j], level.radius, x);
        if phi == T::zero() {
            return;
        }
        if let Some(v) = self.map.vector(dir, level.k, j) {
            for (a, &vi) in acc.iter_mut().zip(v) {
                *a = *a + w * phi * vi;
            }
        }
    }

    /// Unweighted level function `f_k(x) = sum_{j in J_k(xi)} v_j phi_j(x)`.
    pub fn level_function(&self, xi: usize, dir: Direction, li: usize, x: usize) -> Vec<T> {
        let level = &self.map.levels()[li];
        let mut acc = self.zero();
        for &j in level.class(xi) {
            self.accumulate(&mut acc, level, dir, j, x, T::one());
        }
        acc
    }

    /// `F_k(x) = sum_{l <= k} r_l^alpha f_l(x)`.
    pub fn component(&self, xi: usize, dir: Direction, x: usize, k: i32) -> Result<Vec<T>> {
        let last = self.map.ladder().index(k).ok_or(Error::UnknownScale(k))?;
        let mut acc = self.zero();
        for level in &self.map.levels()[..=last] {
            let w = self.weight(level);
            for &j in level.class(xi) {
                self.accumulate(&mut acc, level, dir, j, x, w);
            }
        }
        Ok(acc)
    }

    /// `G_{k,j}(y) = F_{k-1}(y) + r_k^alpha sum_{i before j} v_i phi_i(y)`.
    pub fn partial_sum(&self, key: AssignmentKey, y: usize) -> Result<Vec<T>> {
        let li = self.map.ladder().index(key.k).ok_or(Error::UnknownScale(key.k))?;
        let mut acc = if li == 0 { self.zero() } else { self.component(key.xi, key.direction, y, key.k - 1)? };
        let level = &self.map.levels()[li];
        let w = self.weight(level);
        for &i in level.class(key.xi) {
            if key.direction.precedes(i, key.j) {
                self.accumulate(&mut acc, level, key.direction, i, y, w);
            }
        }
        Ok(acc)
    }

    /// `table[l][x] = F_{k0 + l}(x)` for one stream, built from level functions.
    fn table(&self, xi: usize, dir: Direction) -> Vec<Vec<Vec<T>>> {
        let n = self.space.len();
        let mut out: Vec<Vec<Vec<T>>> = Vec::with_capacity(self.map.levels().len());
        for (li, level) in self.map.levels().iter().enumerate() {
            let w = self.weight(level);
            let row = (0..n)
                .map(|x| {
                    let f = self.level_function(xi, dir, li, x);
                    match out.last() {
                        Some(prev) => prev[x].iter().zip(&f).map(|(&p, &fi)| p + w * fi).collect(),
                        None => f.iter().map(|&fi| w * fi).collect(),
                    }
                })
                .collect();
            out.push(row);
        }
        out
    }

    /// Full coordinates of every point in the map's component order.
    pub fn coordinates(&self) -> Vec<Vec<T>> {
        let n = self.space.len();
        let mut coords = vec![Vec::with_capacity(self.map.dimension()); n];
        if self.map.levels().is_empty() {
            return coords;
        }
        for xi in 1..=self.map.chi() {
            for dir in Direction::BOTH {
                let table = self.table(xi, dir);
                let last = table.last().expect("nonempty ladder");
                for (x, c) in coords.iter_mut().enumerate() {
                    c.extend_from_slice(&last[x]);
                }
            }
        }
        coords
    }
}

/// Separation, covering, class separation, and palette size at every level.
pub fn check_net_invariants<T: Scalar>(space: &FiniteMetricSpace<T>, levels: &[NetLevel<T>], c0: u64) -> Vec<Violation> {
    let mut out = Vec::new();
    let palette_cap = (c0 as f64).powi(5);
    for level in levels {
        let r = level.radius;
        let k = level.k;
        for (a, &p) in level.net.iter().enumerate() {
            for &q in &level.net[a + 1..] {
                let d = space.d(p, q);
                if d < r {
                    out.push(Violation::new(Check::NetSeparation, vec![p, q], d.as_f64(), r.as_f64()).at(k, None, None));
                }
            }
        }
        for x in 0..space.len() {
            let nearest = level.net.iter().map(|&p| space.d(p, x)).fold(T::infinity(), T::min);
            if nearest > r {
                out.push(Violation::new(Check::Covering, vec![x], nearest.as_f64(), r.as_f64()).at(k, None, None));
            }
        }
        let reach = T::lit(10.0) * r;
        for (xi0, class) in level.classes.iter().enumerate() {
            for (a, &i) in class.iter().enumerate() {
                for &j in &class[a + 1..] {
                    let (p, q) = (level.net[i], level.net[j]);
                    let d = space.d(p, q);
                    if !(d > reach) {
                        out.push(
                            Violation::new(Check::ClassSeparation, vec![p, q], d.as_f64(), reach.as_f64())
                                .at(k, Some(xi0 + 1), None),
                        );
                    }
                }
            }
        }
        let used = level.colors_used();
        if used as f64 > palette_cap {
            out.push(Violation::new(Check::PaletteSize, vec![], used as f64, palette_cap).at(k, None, None));
        }
    }
    sort_violations(&mut out);
    out
}

/// Re-derives every selection constraint and confirms the `3 tau^3 r_k^alpha` margin.
pub fn check_separation<T: Scalar>(space: &FiniteMetricSpace<T>, map: &EmbeddingMap<T>) -> Vec<Violation> {
    let Ok(reference) = ReferenceEvaluator::new(space, map) else {
        return vec![Violation::new(Check::MissingVector, vec![], space.len() as f64, map.space().len() as f64)];
    };
    let tau = map.params().tau;
    let mut out = Vec::new();
    for xi in 1..=map.chi() {
        for dir in Direction::BOTH {
            let table = reference.table(xi, dir);
            for (li, level) in map.levels().iter().enumerate() {
                let r = level.radius;
                let w = reference.weight(level);
                let margin = T::lit(3.0) * tau.powi(3) * w;
                let outer = T::lit(10.0) * r / (tau * tau);
                let class = level.class(xi);
                for &j in class {
                    let c = level.net[j];
                    if map.vector(dir, level.k, j).is_none() {
                        out.push(Violation::new(Check::MissingVector, vec![c], 0.0, 0.0).at(level.k, Some(xi), Some(dir)));
                        continue;
                    }
                    let near: Vec<usize> = (0..space.len()).filter(|&x| space.d(c, x) <= r).collect();
                    for y in 0..space.len() {
                        let dy = space.d(c, y);
                        if !(dy > r + r && dy <= outer) {
                            continue;
                        }
                        let mut g = if li == 0 { reference.zero() } else { table[li - 1][y].clone() };
                        for &i in class {
                            if dir.precedes(i, j) {
                                reference.accumulate(&mut g, level, dir, i, y, w);
                            }
                        }
                        for &x in &near {
                            let sep = gap(&table[li][x], &g);
                            if !ge(sep, margin) {
                                out.push(
                                    Violation::new(Check::Separation, vec![c, x, y], sep.as_f64(), margin.as_f64())
                                        .at(level.k, Some(xi), Some(dir)),
                                );
                            }
                        }
                    }
                }
            }
        }
    }
    sort_violations(&mut out);
    out
}

/// `|F_k(x) - F_k(y)| <= r_k^(alpha - 1) d(x, y)` for every pair, level, and stream.
pub fn check_lipschitz_levels<T: Scalar>(space: &FiniteMetricSpace<T>, map: &EmbeddingMap<T>) -> Vec<Violation> {
    let Ok(reference) = ReferenceEvaluator::new(space, map) else {
        return vec![Violation::new(Check::MissingVector, vec![], space.len() as f64, map.space().len() as f64)];
    };
    let alpha = map.params().alpha;
    let n = space.len();
    let mut out = Vec::new();
    for xi in 1..=map.chi() {
        for dir in Direction::BOTH {
            let table = reference.table(xi, dir);
            for (level, values) in map.levels().iter().zip(&table) {
                let lip = level.radius.powf(alpha - T::one());
                for x in 0..n {
                    for y in (x + 1)..n {
                        let lhs = gap(&values[x], &values[y]);
                        let rhs = lip * space.d(x, y);
                        if !le(lhs, rhs) {
                            out.push(
                                Violation::new(Check::LevelLipschitz, vec![x, y], lhs.as_f64(), rhs.as_f64())
                                    .at(level.k, Some(xi), Some(dir)),
                            );
                        }
                    }
                }
            }
        }
    }
    sort_violations(&mut out);
    out
}

/// Vector norms `|v| <= tau^2`, level sups `|f_k(x)| <= tau^2`, and tails
/// `|F(x) - F_k(x)| <= 2 tau^2 r_{k+1}^alpha`.
pub fn check_tail_and_sup<T: Scalar>(space: &FiniteMetricSpace<T>, map: &EmbeddingMap<T>) -> Vec<Violation> {
    let Ok(reference) = ReferenceEvaluator::new(space, map) else {
        return vec![Violation::new(Check::MissingVector, vec![], space.len() as f64, map.space().len() as f64)];
    };
    let tau = map.params().tau;
    let cap = tau * tau;
    let levels = map.levels();
    let mut out = Vec::new();
    for level in levels {
        for (j, &c) in level.net.iter().enumerate() {
            for dir in Direction::BOTH {
                if let Some(v) = map.vector(dir, level.k, j) {
                    let len = length(v);
                    if !le(len, cap) {
                        out.push(
                            Violation::new(Check::VectorNorm, vec![c], len.as_f64(), cap.as_f64())
                                .at(level.k, Some(level.color[j]), Some(dir)),
                        );
                    }
                }
            }
        }
    }
    for xi in 1..=map.chi() {
        for dir in Direction::BOTH {
            let table = reference.table(xi, dir);
            let Some(full) = table.last() else { continue };
            for x in 0..space.len() {
                for (li, level) in levels.iter().enumerate() {
                    let sup = length(&reference.level_function(xi, dir, li, x));
                    if !le(sup, cap) {
                        out.push(
                            Violation::new(Check::LevelSup, vec![x], sup.as_f64(), cap.as_f64())
                                .at(level.k, Some(xi), Some(dir)),
                        );
                    }
                    if li + 1 < levels.len() {
                        let tail = gap(&full[x], &table[li][x]);
                        let bound = T::lit(2.0) * cap * levels[li + 1].radius.powf(map.params().alpha);
                        if !le(tail, bound) {
                            out.push(
                                Violation::new(Check::Tail, vec![x], tail.as_f64(), bound.as_f64())
                                    .at(level.k, Some(xi), Some(dir)),
                            );
                        }
                    }
                }
            }
        }
    }
    sort_violations(&mut out);
    out
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct WorstPairs {
    pub lower: Option<[usize; 2]>,
    pub upper: Option<[usize; 2]>,
}

/// Extremes of `|F(x) - F(y)| / d(x, y)^alpha` against the certified constants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionReport {
    /// `None` when the space has no pairs.
    pub lower_ratio: Option<f64>,
    pub upper_ratio: Option<f64>,
    /// `tau^5 / 8`.
    pub lower_bound: f64,
    /// `5 N tau^(-2(1 - alpha))`.
    pub upper_bound: f64,
    pub worst_pairs: WorstPairs,
    /// Pair counts per proof scale `k` (`4 r_k <= d <= 4 r_{k-1}`).
    pub pair_scales: BTreeMap<i32, usize>,
    pub violations: Vec<Violation>,
}

impl DistortionReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn pairwise_distortion<T: Scalar>(space: &FiniteMetricSpace<T>, map: &EmbeddingMap<T>, alpha: T) -> Result<DistortionReport> {
    pairwise_distortion_directions(space, map, alpha, &Direction::BOTH)
}

/// Distortion of the map restricted to the components of `directions`.
/// Bounds are always those of the full map.
pub fn pairwise_distortion_directions<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    map: &EmbeddingMap<T>,
    alpha: T,
    directions: &[Direction],
) -> Result<DistortionReport> {
    let reference = ReferenceEvaluator::new(space, map)?;
    let coords = reference.coordinates();
    let m = map.m();
    if let Some(c) = coords.iter().find(|c| c.len() != map.dimension()) {
        return Err(Error::DimensionMismatch { expected: map.dimension(), found: c.len() });
    }
    // components alternate forward, reverse per color
    let keep: Vec<bool> = (0..2 * map.chi())
        .map(|s| directions.contains(&Direction::BOTH[s % 2]))
        .collect();
    let params = map.params();
    let lower_bound = params.lower_constant();
    let upper_bound = params.upper_constant();
    let mut report = DistortionReport {
        lower_ratio: None,
        upper_ratio: None,
        lower_bound: lower_bound.as_f64(),
        upper_bound: upper_bound.as_f64(),
        worst_pairs: WorstPairs::default(),
        pair_scales: BTreeMap::new(),
        violations: Vec::new(),
    };
    let mut lo = (T::infinity(), [0, 0]);
    let mut hi = (T::neg_infinity(), [0, 0]);
    for x in 0..space.len() {
        for y in (x + 1)..space.len() {
            let mut sq = T::zero();
            for (s, _) in keep.iter().enumerate().filter(|(_, &k)| k) {
                let range = s * m..(s + 1) * m;
                for (&a, &b) in coords[x][range.clone()].iter().zip(&coords[y][range]) {
                    sq = sq + (a - b) * (a - b);
                }
            }
            let d = space.d(x, y);
            let snow = d.powf(alpha);
            let ratio = sq.sqrt() / snow;
            if ratio < lo.0 {
                lo = (ratio, [x, y]);
            }
            if ratio > hi.0 {
                hi = (ratio, [x, y]);
            }
            if let Some(k) = map.ladder().pair_scale(d) {
                *report.pair_scales.entry(k).or_insert(0) += 1;
            }
            if !ge(ratio, lower_bound) {
                report
                    .violations
                    .push(Violation::new(Check::LowerBound, vec![x, y], ratio.as_f64(), lower_bound.as_f64()));
            }
            if !le(ratio, upper_bound) {
                report
                    .violations
                    .push(Violation::new(Check::UpperBound, vec![x, y], ratio.as_f64(), upper_bound.as_f64()));
            }
        }
    }
    if space.len() >= 2 {
        report.lower_ratio = Some(lo.0.as_f64());
        report.upper_ratio = Some(hi.0.as_f64());
        report.worst_pairs = WorstPairs { lower: Some(lo.1), upper: Some(hi.1) };
    }
    sort_violations(&mut report.violations);
    Ok(report)
}

/// Flags coordinates that differ from the reference evaluation by more than
/// the relative slack.
pub fn compare_coordinates<T: Scalar>(reference: &[Vec<T>], given: &[Vec<T>]) -> Vec<Violation> {
    let mut out = Vec::new();
    for (x, (a, b)) in reference.iter().zip(given).enumerate() {
        let scale = length(a).max(length(b));
        let diff = if a.len() == b.len() { gap(a, b) } else { T::infinity() };
        if !(diff <= T::lit(SLACK) * scale) {
            out.push(Violation::new(Check::CoordinateMismatch, vec![x], diff.as_f64(), (T::lit(SLACK) * scale).as_f64()));
        }
    }
    if reference.len() != given.len() {
        out.push(Violation::new(Check::CoordinateMismatch, vec![], given.len() as f64, reference.len() as f64));
    }
    out
}

/// Distortion report carrying the violations of every check.
pub fn verify_all<T: Scalar>(space: &FiniteMetricSpace<T>, map: &EmbeddingMap<T>, c0: u64) -> Result<DistortionReport> {
    let mut report = pairwise_distortion(space, map, map.params().alpha)?;
    report.violations.extend(check_net_invariants(space, map.levels(), c0));
    report.violations.extend(check_separation(space, map));
    report.violations.extend(check_lipschitz_levels(space, map));
    report.violations.extend(check_tail_and_sup(space, map));
    sort_violations(&mut report.violations);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::{build_embedding, validate_params};
    use crate::nets::{build_ladder, build_levels, greedy_color};

    fn line(points: &[f64]) -> FiniteMetricSpace<f64> {
        let raw: Vec<Vec<f64>> = points
            .iter()
            .map(|a| points.iter().map(|b| (a - b).abs()).collect())
            .collect();
        FiniteMetricSpace::validate(&raw).unwrap()
    }

    fn built(s: &FiniteMetricSpace<f64>) -> EmbeddingMap<f64> {
        let ladder = build_ladder(s, 0.02).unwrap();
        let levels = build_levels(s, &ladder);
        build_embedding(s, validate_params(0.8, 0.02, 3, 13).unwrap(), ladder, levels).unwrap()
    }

    #[test]
    fn valid_level_passes_net_checks() {
        let s = line(&[0.0, 1.0, 2.0, 3.0]);
        let level = greedy_color(&s, &[0, 2], 0, 2.0);
        assert!(check_net_invariants(&s, &[level], 2).is_empty());
    }

    #[test]
    fn duplicated_net_point_is_flagged() {
        let s = line(&[0.0, 1.0, 2.0, 3.0]);
        let mut level = greedy_color(&s, &[0, 2], 0, 2.0);
        level.net.push(2);
        level.color.push(3);
        level.classes.push(vec![2]);
        let v = check_net_invariants(&s, &[level], 2);
        assert!(v.iter().any(|v| v.check == Check::NetSeparation && v.value == 0.0));
    }

    #[test]
    fn uncovered_point_is_flagged() {
        let s = line(&[0.0, 1.0, 5.0]);
        let level = greedy_color(&s, &[0], 0, 2.0);
        let v = check_net_invariants(&s, &[level], 2);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].check, Check::Covering);
        assert_eq!(v[0].points, vec![2]);
    }

    #[test]
    fn single_pair_ratio_is_the_gap() {
        let s = line(&[0.0, 1.0]);
        let map = built(&s);
        let r = pairwise_distortion(&s, &map, 0.8).unwrap();
        let coords = map.coordinates().unwrap();
        let g = crate::scalar::dist(&coords[0], &coords[1]);
        assert_eq!(r.lower_ratio, r.upper_ratio);
        assert!((r.lower_ratio.unwrap() - g).abs() <= 1e-12 * g);
        assert!(r.lower_ratio.unwrap() > 0.0);
        assert!(r.pass(), "{:?}", r.violations);
    }

    #[test]
    fn full_line_run_is_clean() {
        let s = line(&[0.0, 1.0, 2.5, 7.0, 7.01, 30.0]);
        let map = built(&s);
        let report = verify_all(&s, &map, 3).unwrap();
        assert!(report.pass(), "{:?}", report.violations);
        assert!(report.pair_scales.values().sum::<usize>() == 15);
    }

    #[test]
    fn zeroed_vector_breaks_separation() {
        let s = line(&[0.0, 1.0, 2.5, 7.0, 7.01]);
        let map = built(&s);
        assert!(check_separation(&s, &map).is_empty());
        let mut injected = 0;
        for a in map.assignments() {
            // a vector other than the first candidate means the origin was forbidden
            if a.v.iter().all(|&c| c == 0.0) {
                continue;
            }
            let mut faulty = map.clone();
            faulty.set_vector(a.key, vec![0.0; faulty.m()]).unwrap();
            let found = check_separation(&s, &faulty);
            assert!(
                found.iter().any(|v| v.k == Some(a.key.k) && v.direction == Some(a.key.direction)),
                "{:?}",
                a.key
            );
            injected += 1;
        }
        assert!(injected > 0);
    }

    #[test]
    fn reference_agrees_with_builder() {
        let s = line(&[0.0, 1.0, 2.5, 7.0, 7.01, 30.0]);
        let map = built(&s);
        let reference = ReferenceEvaluator::new(&s, &map).unwrap();
        for level in map.levels() {
            for xi in 1..=map.chi() {
                for dir in Direction::BOTH {
                    for x in 0..s.len() {
                        let a = map.evaluate_component(xi, dir, x, Some(level.k)).unwrap();
                        let b = reference.component(xi, dir, x, level.k).unwrap();
                        assert!(gap(&a, &b) <= 1e-12 * length(&a).max(1e-300));
                    }
                }
            }
        }
        assert_eq!(reference.coordinates(), map.coordinates().unwrap());
    }
}
