//! Deterministic candidate vectors: a cubic lattice packed into `B(0, tau^2)`.
//!
//! The lattice step is `7 tau^3`, so distinct candidates are at least that far
//! apart and a forbidden ball of radius `3 tau^3` can remove at most one of
//! them. Points are listed lexicographically with coordinates ordered
//! `0, 1, -1, 2, -2, ...`, which puts the origin first.

use crate::error::{Error, Result};
use crate::scalar::{norm, Scalar};

#[derive(Debug, Clone)]
pub struct CandidateLattice<T> {
    tau: T,
    m: usize,
    spacing: T,
    max_sq: u64,
    points: Vec<Vec<T>>,
    complete: bool,
}

impl<T: Scalar> CandidateLattice<T> {
    pub fn new(tau: T, m: usize) -> Self {
        let spacing = T::lit(7.0) * tau.powi(3);
        // (tau^2 / spacing)^2 = 1 / (49 tau^2), floored with a little headroom;
        // the final norm check below is authoritative
        let ratio = (tau * tau / spacing).as_f64();
        let max_sq = (ratio * ratio * (1.0 + 1e-9)).floor().min(u64::MAX as f64 / 4.0) as u64;
        Self { tau, m, spacing, max_sq, points: Vec::new(), complete: false }
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    /// Whether every lattice point of the ball has been listed.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn points(&self) -> &[Vec<T>] {
        &self.points
    }

    /// Lists at least `count` points if the ball holds that many; returns the
    /// number available.
    pub fn ensure(&mut self, count: usize) -> usize {
        if self.points.len() >= count || self.complete {
            return self.points.len();
        }
        let mut raw = Vec::with_capacity(count);
        let mut prefix = Vec::with_capacity(self.m);
        let finished = !self.walk(&mut prefix, 0, count, &mut raw);
        let radius = self.tau * self.tau;
        self.points = raw
            .into_iter()
            .map(|z: Vec<i64>| z.iter().map(|&c| T::lit(c as f64) * self.spacing).collect::<Vec<T>>())
            .filter(|v| norm(v) <= radius)
            .collect();
        self.complete = finished;
        self.points.len()
    }

    /// Depth-first walk in listing order; returns true once `limit` points
    /// were collected.
    fn walk(&self, prefix: &mut Vec<i64>, used_sq: u64, limit: usize, out: &mut Vec<Vec<i64>>) -> bool {
        if prefix.len() == self.m {
            out.push(prefix.clone());
            return out.len() >= limit;
        }
        let bound = isqrt(self.max_sq - used_sq) as i64;
        for t in 0..=(2 * bound) {
            let z = zigzag(t);
            prefix.push(z);
            let stop = self.walk(prefix, used_sq + (z * z) as u64, limit, out);
            prefix.pop();
            if stop {
                return true;
            }
        }
        false
    }
}

fn zigzag(t: i64) -> i64 {
    if t % 2 == 1 {
        (t + 1) / 2
    } else {
        -t / 2
    }
}

fn isqrt(v: u64) -> u64 {
    let mut r = (v as f64).sqrt() as u64;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r
}

/// The first `count` candidates for `(tau, m)`.
pub fn candidate_vectors<T: Scalar>(tau: T, m: usize, count: usize) -> Result<Vec<Vec<T>>> {
    let mut lattice = CandidateLattice::new(tau, m);
    let available = lattice.ensure(count);
    if available < count {
        return Err(Error::PackingExhausted { available, needed: count, site: None });
    }
    lattice.points.truncate(count);
    Ok(lattice.points)
}

/// First candidate at distance at least `radius` from every forbidden center.
pub fn select_vector<'a, T: Scalar>(candidates: &'a [Vec<T>], forbidden: &[Vec<T>], radius: T) -> Result<&'a [T]> {
    let radius_sq = radius * radius;
    candidates
        .iter()
        .find(|c| {
            forbidden.iter().all(|f| {
                c.iter().zip(f).fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b)) >= radius_sq
            })
        })
        .map(Vec::as_slice)
        .ok_or(Error::Exhausted)
}
