//! Adaptive vector selection and evaluation of the product embedding.
//!
//! Every color `xi` owns two `m`-dimensional streams, one choosing vectors
//! in net order and one in reverse net order. Each stream is
//!
//! ```text
//! F(x) = sum_k r_k^alpha sum_{j in J_k(xi)} v_j phi_j(x)
//! ```
//!
//! and the vectors are picked scale by scale so that `F_k(x)` stays
//! `3 tau^3 r_k^alpha` away from the partial sum `G_{k,j}(y)` whenever `x`
//! is in `B_j` and `y` lies in the annulus `2 r_k < d(y, x_j) <= 10 r_k / tau^2`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::bump::bump_profile;
use super::candidates::{select_vector, CandidateLattice};
use super::params::Params;
use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::nets::{palette_size, NetLevel, ScaleLadder};
use crate::scalar::Scalar;

/// Scan order of a color class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Reverse,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Forward, Direction::Reverse];

    fn slot(self) -> usize {
        match self {
            Direction::Forward => 0,
            Direction::Reverse => 1,
        }
    }

    /// Whether net position `i` is scanned before `j`.
    pub fn precedes(self, i: usize, j: usize) -> bool {
        match self {
            Direction::Forward => i < j,
            Direction::Reverse => i > j,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Reverse => "reverse",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AssignmentKey {
    pub k: i32,
    pub xi: usize,
    /// Net position at scale `k`.
    pub j: usize,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorAssignment<T> {
    pub key: AssignmentKey,
    pub v: Vec<T>,
}

/// The embedding `F : E -> R^N`, complete or under construction.
#[derive(Debug, Clone)]
pub struct EmbeddingMap<T> {
    params: Params<T>,
    ladder: ScaleLadder<T>,
    levels: Vec<NetLevel<T>>,
    space: FiniteMetricSpace<T>,
    /// `vectors[direction][level][net position]`
    vectors: [Vec<Vec<Option<Vec<T>>>>; 2],
    /// `support[level][x]`: net positions whose bump is positive at `x`.
    support: Vec<Vec<Vec<(usize, T)>>>,
    /// `r_k^alpha` per level.
    weight: Vec<T>,
}

impl<T: Scalar> EmbeddingMap<T> {
    /// A map with no vectors chosen yet. `params.chi` is replaced by the
    /// palette the levels actually use.
    pub fn empty(
        space: &FiniteMetricSpace<T>,
        params: Params<T>,
        ladder: ScaleLadder<T>,
        levels: Vec<NetLevel<T>>,
    ) -> Result<Self> {
        if levels.len() != ladder.len() {
            return Err(Error::DimensionMismatch { expected: ladder.len(), found: levels.len() });
        }
        for (level, (k, r)) in levels.iter().zip(ladder.scales()) {
            if level.k != k || level.radius != r {
                return Err(Error::InvalidAssignment(format!("level {} does not match ladder scale {k}", level.k)));
            }
        }
        let params = params.with_chi(palette_size(&levels));
        let slots: Vec<Vec<Option<Vec<T>>>> = levels.iter().map(|l| vec![None; l.net.len()]).collect();
        let support = levels
            .iter()
            .map(|level| {
                (0..space.len())
                    .map(|x| {
                        level
                            .net
                            .iter()
                            .enumerate()
                            .filter_map(|(j, &c)| {
                                let phi = bump_profile(space.d(c, x), level.radius);
                                (phi > T::zero()).then_some((j, phi))
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let weight = ladder.radii().iter().map(|r| r.powf(params.alpha)).collect();
        Ok(Self {
            params,
            ladder,
            levels,
            space: space.clone(),
            vectors: [slots.clone(), slots],
            support,
            weight,
        })
    }

    pub fn params(&self) -> &Params<T> {
        &self.params
    }

    pub fn ladder(&self) -> &ScaleLadder<T> {
        &self.ladder
    }

    pub fn levels(&self) -> &[NetLevel<T>] {
        &self.levels
    }

    pub fn space(&self) -> &FiniteMetricSpace<T> {
        &self.space
    }

    pub fn chi(&self) -> usize {
        self.params.chi
    }

    pub fn m(&self) -> usize {
        self.params.m
    }

    /// `N = 2 chi m`.
    pub fn dimension(&self) -> usize {
        self.params.dimension()
    }

    fn locate(&self, key: AssignmentKey) -> Result<(usize, &NetLevel<T>)> {
        let li = self.ladder.index(key.k).ok_or(Error::UnknownScale(key.k))?;
        let level = &self.levels[li];
        match level.color.get(key.j) {
            None => Err(Error::IndexOutOfRange { index: key.j, len: level.net.len() }),
            Some(&c) if c != key.xi => Err(Error::InvalidAssignment(format!(
                "net index {} at scale {} has color {c}, not {}",
                key.j, key.k, key.xi
            ))),
            Some(_) => Ok((li, level)),
        }
    }

    pub fn vector(&self, direction: Direction, k: i32, j: usize) -> Option<&[T]> {
        let li = self.ladder.index(k)?;
        self.vectors[direction.slot()][li].get(j)?.as_deref()
    }

    /// Records (or overwrites) the vector for `key`.
    pub fn set_vector(&mut self, key: AssignmentKey, v: Vec<T>) -> Result<()> {
        if v.len() != self.params.m {
            return Err(Error::DimensionMismatch { expected: self.params.m, found: v.len() });
        }
        let (li, _) = self.locate(key)?;
        self.vectors[key.direction.slot()][li][key.j] = Some(v);
        Ok(())
    }

    /// All recorded vectors ordered by `(k, xi, j, direction)`.
    pub fn assignments(&self) -> Vec<VectorAssignment<T>> {
        let mut out = Vec::new();
        for (li, level) in self.levels.iter().enumerate() {
            for (xi0, class) in level.classes.iter().enumerate() {
                for &j in class {
                    for dir in Direction::BOTH {
                        if let Some(v) = &self.vectors[dir.slot()][li][j] {
                            let key = AssignmentKey { k: level.k, xi: xi0 + 1, j, direction: dir };
                            out.push(VectorAssignment { key, v: v.clone() });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn is_complete(&self) -> bool {
        self.vectors.iter().all(|d| d.iter().all(|l| l.iter().all(Option::is_some)))
    }

    /// Adds `weight * sum v_j phi_j(x)` over the class members of level `li`
    /// accepted by `take`.
    fn add_level(
        &self,
        acc: &mut [T],
        xi: usize,
        direction: Direction,
        li: usize,
        x: usize,
        take: impl Fn(usize) -> bool,
    ) -> Result<()> {
        let level = &self.levels[li];
        for &(j, phi) in &self.support[li][x] {
            if level.color[j] != xi || !take(j) {
                continue;
            }
            let v = self.vectors[direction.slot()][li][j]
                .as_ref()
                .ok_or(Error::OrderViolation { k: level.k, j, direction })?;
            let c = self.weight[li] * phi;
            for (a, &vi) in acc.iter_mut().zip(v) {
                *a = *a + c * vi;
            }
        }
        Ok(())
    }

    /// `F_k(x)` summed over the first `levels` scales.
    fn stream_value(&self, xi: usize, direction: Direction, x: usize, levels: usize) -> Result<Vec<T>> {
        let mut acc = vec![T::zero(); self.params.m];
        for li in 0..levels {
            self.add_level(&mut acc, xi, direction, li, x, |_| true)?;
        }
        Ok(acc)
    }

    /// Component `(xi, direction)` at `x` through scale `up_to` (all scales
    /// when `None`).
    pub fn evaluate_component(&self, xi: usize, direction: Direction, x: usize, up_to: Option<i32>) -> Result<Vec<T>> {
        self.check_point(x)?;
        let levels = match up_to {
            None => self.levels.len(),
            Some(k) => self.ladder.index(k).ok_or(Error::UnknownScale(k))? + 1,
        };
        self.stream_value(xi, direction, x, levels)
    }

    /// Partial sum `G_{k,j}(y)`: scales below `k` plus the members of `j`'s
    /// class scanned before `j` at scale `k`.
    pub fn partial_sum(&self, key: AssignmentKey, y: usize) -> Result<Vec<T>> {
        self.check_point(y)?;
        let (li, _) = self.locate(key)?;
        let mut acc = self.stream_value(key.xi, key.direction, y, li)?;
        self.add_level(&mut acc, key.xi, key.direction, li, y, |i| key.direction.precedes(i, key.j))?;
        Ok(acc)
    }

    /// `F(x)`: for each color in palette order, the forward then the reverse
    /// component.
    pub fn evaluate(&self, x: usize) -> Result<Vec<T>> {
        self.check_point(x)?;
        let mut out = Vec::with_capacity(self.dimension());
        for xi in 1..=self.params.chi {
            for dir in Direction::BOTH {
                out.extend(self.stream_value(xi, dir, x, self.levels.len())?);
            }
        }
        Ok(out)
    }

    /// `F(x)` for every point, in point order.
    pub fn coordinates(&self) -> Result<Vec<Vec<T>>> {
        (0..self.space.len()).map(|x| self.evaluate(x)).collect()
    }

    fn check_point(&self, x: usize) -> Result<()> {
        if x >= self.space.len() {
            return Err(Error::IndexOutOfRange { index: x, len: self.space.len() });
        }
        Ok(())
    }
}

/// The points of `B(x_j, r_k)` and of the annulus
/// `2 r_k < d(., x_j) <= 10 r_k / tau^2` around net position `j` of `level`.
pub fn target_sets<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    level: &NetLevel<T>,
    tau: T,
    j: usize,
) -> (Vec<usize>, Vec<usize>) {
    let r = level.radius;
    let inner = r + r;
    let outer = T::lit(10.0) * r / (tau * tau);
    let row = space.row(level.center(j));
    let near = (0..row.len()).filter(|&x| row[x] <= r).collect();
    let ring = (0..row.len()).filter(|&y| row[y] > inner && row[y] <= outer).collect();
    (near, ring)
}

/// Centers of the balls of radius `3 tau^3` the vector for `key` must avoid:
/// `(G_{k,j}(y) - F_{k-1}(x)) / r_k^alpha` over the target pairs.
pub fn forbidden_centers<T: Scalar>(map: &EmbeddingMap<T>, key: AssignmentKey) -> Result<Vec<Vec<T>>> {
    let (li, level) = map.locate(key)?;
    let (near, ring) = target_sets(&map.space, level, map.params.tau, key.j);
    if ring.is_empty() {
        return Ok(Vec::new());
    }
    let inv = T::one() / map.weight[li];
    let base: Vec<Vec<T>> = near
        .iter()
        .map(|&x| map.stream_value(key.xi, key.direction, x, li))
        .collect::<Result<_>>()?;
    let mut centers = Vec::with_capacity(near.len() * ring.len());
    for &y in &ring {
        let g = map.partial_sum(key, y)?;
        for f in &base {
            centers.push(g.iter().zip(f).map(|(&gi, &fi)| (gi - fi) * inv).collect());
        }
    }
    Ok(centers)
}

/// Chooses every vector, stream by stream and scale by scale.
pub fn build_embedding<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    params: Params<T>,
    ladder: ScaleLadder<T>,
    levels: Vec<NetLevel<T>>,
) -> Result<EmbeddingMap<T>> {
    let mut map = EmbeddingMap::empty(space, params, ladder, levels)?;
    let tau = map.params.tau;
    let radius = T::lit(3.0) * tau.powi(3);
    let mut lattice = CandidateLattice::new(tau, map.params.m);

    for direction in Direction::BOTH {
        for xi in 1..=map.params.chi {
            for li in 0..map.levels.len() {
                let k = map.levels[li].k;
                let mut order = map.levels[li].class(xi).to_vec();
                if direction == Direction::Reverse {
                    order.reverse();
                }
                for j in order {
                    let key = AssignmentKey { k, xi, j, direction };
                    let forbidden = forbidden_centers(&map, key)?;
                    let mut want = forbidden.len() + 1;
                    let v = loop {
                        let available = lattice.ensure(want);
                        match select_vector(&lattice.points()[..available.min(want)], &forbidden, radius) {
                            Ok(v) => break v.to_vec(),
                            Err(Error::Exhausted) if !lattice.is_complete() || available > want => {
                                want *= 2;
                            }
                            Err(Error::Exhausted) => {
                                return Err(Error::PackingExhausted {
                                    available,
                                    needed: forbidden.len() + 1,
                                    site: Some((k, xi, j)),
                                })
                            }
                            Err(e) => return Err(e),
                        }
                    };
                    map.set_vector(key, v)?;
                }
            }
        }
    }
    Ok(map)
}
