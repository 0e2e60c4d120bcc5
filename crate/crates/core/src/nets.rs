//! Scale ladder, maximal separated nets, and the greedy net coloring.

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::scalar::Scalar;

/// Working scales `r_k = tau^(2k)` for `k0 <= k <= kmax`.
///
/// `r_{k0}` is at least the diameter and `4 r_{kmax}` is at most the smallest
/// distance, so every pair of distinct points has a scale on the ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleLadder<T> {
    pub tau: T,
    pub k0: i32,
    pub kmax: i32,
    radii: Vec<T>,
}

impl<T: Scalar> ScaleLadder<T> {
    /// Ladder with no scales, for spaces with fewer than two points.
    pub fn empty(tau: T) -> Self {
        Self { tau, k0: 0, kmax: -1, radii: Vec::new() }
    }

    /// Rebuilds a ladder from stored radii (`radii[i]` is `r_{k0 + i}`).
    pub fn from_radii(tau: T, k0: i32, radii: Vec<T>) -> Self {
        let kmax = k0 + radii.len() as i32 - 1;
        Self { tau, k0, kmax, radii }
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn radius(&self, k: i32) -> Option<T> {
        self.index(k).map(|i| self.radii[i])
    }

    /// Position of scale `k` in [`Self::radii`].
    pub fn index(&self, k: i32) -> Option<usize> {
        if k < self.k0 || k > self.kmax {
            None
        } else {
            Some((k - self.k0) as usize)
        }
    }

    pub fn radii(&self) -> &[T] {
        &self.radii
    }

    pub fn scales(&self) -> impl Iterator<Item = (i32, T)> + '_ {
        self.radii.iter().enumerate().map(move |(i, &r)| (self.k0 + i as i32, r))
    }

    /// The scale `k` with `4 r_k <= d <= 4 r_{k-1}`: the first scale whose
    /// quadruple fits under `d`.
    pub fn pair_scale(&self, d: T) -> Option<i32> {
        let four = T::lit(4.0);
        self.scales().find(|&(_, r)| four * r <= d).map(|(k, _)| k)
    }
}

pub fn build_ladder<T: Scalar>(space: &FiniteMetricSpace<T>, tau: T) -> Result<ScaleLadder<T>> {
    if !(tau > T::zero() && tau < T::lit(0.5)) {
        return Err(Error::BadTau(tau.as_f64()));
    }
    let (diam, dmin) = space.extremes()?;
    let step = tau * tau;

    // largest k with step^k >= diam
    let mut k0 = (diam.ln() / step.ln()).floor().to_i32().unwrap_or(0);
    while step.powi(k0) < diam {
        k0 -= 1;
    }
    while step.powi(k0 + 1) >= diam {
        k0 += 1;
    }

    let four = T::lit(4.0);
    let mut radii = vec![step.powi(k0)];
    // successive products keep r_{k+1} = tau^2 r_k bit for bit
    while four * *radii.last().expect("nonempty") > dmin {
        let next = *radii.last().expect("nonempty") * step;
        radii.push(next);
    }
    Ok(ScaleLadder::from_radii(tau, k0, radii))
}

/// Greedy maximal `r`-separated subset, scanning points in index order.
pub fn maximal_net<T: Scalar>(space: &FiniteMetricSpace<T>, r: T) -> Vec<usize> {
    let mut net: Vec<usize> = Vec::new();
    for p in 0..space.len() {
        let row = space.row(p);
        if net.iter().all(|&q| row[q] >= r) {
            net.push(p);
        }
    }
    net
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborCount {
    pub max_count: usize,
    /// Number of net members within `10 r` of each point.
    pub per_point: Vec<usize>,
}

pub fn neighbor_count<T: Scalar>(space: &FiniteMetricSpace<T>, net: &[usize], r: T) -> NeighborCount {
    let reach = T::lit(10.0) * r;
    let per_point: Vec<usize> = (0..space.len())
        .map(|x| net.iter().filter(|&&j| space.d(j, x) <= reach).count())
        .collect();
    NeighborCount {
        max_count: per_point.iter().copied().max().unwrap_or(0),
        per_point,
    }
}

/// One scale of the construction: the net `{x_j}` and its coloring.
///
/// Net positions `j` index into `net`; colors are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct NetLevel<T> {
    pub k: i32,
    pub radius: T,
    pub net: Vec<usize>,
    pub color: Vec<usize>,
    /// `classes[xi - 1]` lists the net positions of color `xi`, in net order.
    pub classes: Vec<Vec<usize>>,
}

impl<T: Scalar> NetLevel<T> {
    pub fn colors_used(&self) -> usize {
        self.classes.len()
    }

    /// Net positions of color `xi`; empty for colors this level never uses.
    pub fn class(&self, xi: usize) -> &[usize] {
        xi.checked_sub(1)
            .and_then(|i| self.classes.get(i))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Point index of net position `j`.
    pub fn center(&self, j: usize) -> usize {
        self.net[j]
    }
}

/// Colors `net` so members within `10 r` of each other never share a color.
///
/// Each member takes the smallest color not used by an earlier member within
/// `10 r`.
pub fn greedy_color<T: Scalar>(space: &FiniteMetricSpace<T>, net: &[usize], k: i32, r: T) -> NetLevel<T> {
    let reach = T::lit(10.0) * r;
    let mut color = Vec::with_capacity(net.len());
    let mut taken = Vec::new();
    for (pos, &p) in net.iter().enumerate() {
        taken.clear();
        taken.resize(pos + 2, false);
        for (earlier, &q) in net[..pos].iter().enumerate() {
            if space.d(p, q) <= reach {
                let c: usize = color[earlier];
                if c < taken.len() {
                    taken[c] = true;
                }
            }
        }
        let c = (1..).find(|&c| !taken[c]).expect("a free color among pos + 1");
        color.push(c);
    }
    let chi = color.iter().copied().max().unwrap_or(0);
    let mut classes = vec![Vec::new(); chi];
    for (pos, &c) in color.iter().enumerate() {
        classes[c - 1].push(pos);
    }
    NetLevel { k, radius: r, net: net.to_vec(), color, classes }
}

/// Net and coloring at every scale of `ladder`.
pub fn build_levels<T: Scalar>(space: &FiniteMetricSpace<T>, ladder: &ScaleLadder<T>) -> Vec<NetLevel<T>> {
    ladder
        .scales()
        .map(|(k, r)| greedy_color(space, &maximal_net(space, r), k, r))
        .collect()
}

/// Realized palette size: the most colors any level uses.
pub fn palette_size<T: Scalar>(levels: &[NetLevel<T>]) -> usize {
    levels.iter().map(NetLevel::colors_used).max().unwrap_or(0)
}
