//! `max Σxᵢ³ / Σxᵢ²` subject to `Σxᵢ = 0`, `xᵢ ≤ s`.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sampling;

/// `s(n−2)/(n−1)`.
pub fn wcubic_closed_form(s: f64, n: usize) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidInput(format!("s must be positive, got {s}")));
    }
    if n < 2 {
        return Err(Error::InvalidInput("need n >= 2".into()));
    }
    let n = n as f64;
    Ok(s * (n - 2.0) / (n - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WcubicOracle {
    /// Best ratio overall.
    pub best: f64,
    /// Best ratio reached by projected ascent alone.
    pub ascent_best: f64,
    /// Best ratio among the structured KKT points.
    pub kkt_best: f64,
    pub evaluations: u64,
    /// False when the budget ran out before every start converged.
    pub converged: bool,
}

fn ratio(x: &[f64]) -> f64 {
    let (c, q) = x.iter().fold((0.0, 0.0), |(c, q), v| (c + v * v * v, q + v * v));
    if q == 0.0 {
        0.0
    } else {
        c / q
    }
}

/// Euclidean projection onto `{Σy = 0, y ≤ s}`: `yᵢ = min(xᵢ − τ, s)` with `τ` by bisection.
fn project(x: &[f64], s: f64) -> Vec<f64> {
    let sum = |t: f64| x.iter().map(|v| (v - t).min(s)).sum::<f64>();
    let (mut lo, mut hi) = (x.iter().cloned().fold(f64::INFINITY, f64::min) - s, x.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + s);
    // sum(lo) ≥ 0 ≥ sum(hi); the map τ ↦ sum(τ) is non-increasing
    while sum(lo) < 0.0 {
        lo -= (hi - lo).max(1.0);
    }
    while sum(hi) > 0.0 {
        hi += (hi - lo).max(1.0);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sum(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * (1.0 + lo.abs()) {
            break;
        }
    }
    let t = 0.5 * (lo + hi);
    let mut y: Vec<f64> = x.iter().map(|v| (v - t).min(s)).collect();
    // remove the residual sum from the unclipped coordinates
    let free: Vec<usize> = (0..y.len()).filter(|&i| y[i] < s).collect();
    if !free.is_empty() {
        let r = y.iter().sum::<f64>() / free.len() as f64;
        for i in free {
            y[i] -= r;
        }
    }
    y
}

fn gradient(x: &[f64]) -> Vec<f64> {
    let (c, q) = x.iter().fold((0.0, 0.0), |(c, q), v| (c + v * v * v, q + v * v));
    x.iter().map(|v| (3.0 * v * v * q - 2.0 * v * c) / (q * q)).collect()
}

/// Projected gradient ascent from one start; returns `(best ratio, evaluations, converged)`.
fn ascend(mut x: Vec<f64>, s: f64, budget: u64) -> (f64, u64, bool) {
    let mut f = ratio(&x);
    let mut evals = 1;
    let mut step = s.max(1e-3);
    while evals < budget {
        let g = gradient(&x);
        let mut improved = false;
        while step > 1e-14 * s && evals < budget {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a + step * b).collect();
            let y = project(&trial, s);
            let fy = ratio(&y);
            evals += 1;
            if fy > f + 1e-15 * f.abs().max(s) {
                x = y;
                f = fy;
                step *= 2.0;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            return (f, evals, true);
        }
    }
    (f, evals, false)
}

/// Multi-start projected ascent (64 starts, shared budget) plus the KKT points
/// with `q` coordinates at `s` and the rest equal to `−qs/(n−q)`.
pub fn wcubic_oracle(s: f64, n: usize, budget: u64, seed: u64) -> Result<WcubicOracle> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidInput(format!("s must be positive, got {s}")));
    }
    if !(2..=12).contains(&n) {
        return Err(Error::InvalidInput(format!("oracle supports 2 <= n <= 12, got {n}")));
    }
    const STARTS: u64 = 64;
    let per_start = (budget / STARTS).max(1);
    let runs: Vec<(f64, u64, bool)> = (0..STARTS)
        .into_par_iter()
        .map(|k| {
            let mut r = sampling::rng(seed, k);
            let raw: Vec<f64> = (0..n).map(|_| r.random_range(-2.0 * s..s)).collect();
            ascend(project(&raw, s), s, per_start)
        })
        .collect();
    let ascent_best = runs.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let evaluations = runs.iter().map(|r| r.1).sum::<u64>();
    let converged = runs.iter().all(|r| r.2);
    let kkt_best = (1..n)
        .map(|q| {
            let m = (n - q) as f64;
            let mut x = vec![s; q];
            x.extend(std::iter::repeat(-(q as f64) * s / m).take(n - q));
            ratio(&x)
        })
        .fold(if n == 2 { 0.0 } else { f64::NEG_INFINITY }, f64::max);
    Ok(WcubicOracle {
        best: ascent_best.max(kkt_best),
        ascent_best,
        kkt_best,
        evaluations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_is_feasible() {
        let y = project(&[3.0, -1.0, 0.5, 2.0], 1.0);
        assert!(y.iter().sum::<f64>().abs() < 1e-14);
        assert!(y.iter().all(|v| *v <= 1.0 + 1e-15));
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(wcubic_closed_form(1.0, 3).unwrap(), 0.5);
        assert_eq!(wcubic_closed_form(1.0, 2).unwrap(), 0.0);
        assert!((wcubic_closed_form(2.0, 10).unwrap() - 16.0 / 9.0).abs() < 1e-15);
        assert!(wcubic_closed_form(0.0, 3).is_err());
        assert!((ratio(&[1.0, -0.5, -0.5]) - 0.5).abs() < 1e-15);
    }
}
