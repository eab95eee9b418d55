//! Quadrature and interpolation primitives: Gauss-Legendre rules, an adaptive
//! panel integrator, trapezoid weights on irregular grids, and barycentric
//! Lagrange interpolation rows.

use crate::error::{Error, Result};
use std::sync::OnceLock;

/// Legendre polynomial P_m and its derivative at t.
fn legendre_pd(m: usize, t: f64) -> (f64, f64) {
    if m == 0 {
        return (1.0, 0.0);
    }
    let mut p0 = 1.0;
    let mut p1 = t;
    for k in 2..=m {
        let kf = k as f64;
        let pk = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = pk;
    }
    let d = if m == 1 {
        1.0
    } else {
        m as f64 * (t * p1 - p0) / (t * t - 1.0)
    };
    (p1, d)
}

/// Nodes (ascending) and weights of the m-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1, "gauss_legendre needs at least one node");
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        // Tricomi initial guess for the i-th largest root, then Newton.
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut d = 0.0;
        for _ in 0..60 {
            let (p, dp) = legendre_pd(m, t);
            d = dp;
            let step = p / dp;
            t -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_pd(m, t);
        if dp != 0.0 {
            d = dp;
        }
        let wi = 2.0 / ((1.0 - t * t) * d * d);
        x[i] = -t;
        x[m - 1 - i] = t;
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    if m % 2 == 1 {
        x[m / 2] = 0.0;
    }
    (x, w)
}

/// Gauss-Legendre rule mapped to [lo, hi].
pub fn gauss_legendre_on(m: usize, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(m);
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let nodes = x.iter().map(|&t| mid + half * t).collect();
    let weights = w.iter().map(|&wi| wi * half).collect();
    (nodes, weights)
}

fn gl_pair() -> &'static ((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>)) {
    static PAIR: OnceLock<((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>))> = OnceLock::new();
    PAIR.get_or_init(|| (gauss_legendre(20), gauss_legendre(40)))
}

fn panel_estimates<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let ((x20, w20), (x40, w40)) = gl_pair();
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut coarse = 0.0;
    for (t, w) in x20.iter().zip(w20) {
        coarse += w * f(mid + half * t);
    }
    let mut fine = 0.0;
    for (t, w) in x40.iter().zip(w40) {
        fine += w * f(mid + half * t);
    }
    (coarse * half, fine * half)
}

/// Adaptive panel integration of f over consecutive intervals of `points`.
///
/// Each panel is estimated with embedded 20/40-point Gauss rules and split
/// until the pairwise disagreement summed over panels is below `tol`. Supply
/// interior breakpoints in `points` to pre-split at known kinks or peaks.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, points: &[f64], tol: f64) -> Result<f64> {
    assert!(points.len() >= 2, "need at least one interval");
    let span: f64 = points[points.len() - 1] - points[0];
    assert!(span > 0.0, "breakpoints must be increasing");
    let tol = tol.max(1e-18);
    let mut total = 0.0;
    let mut err_total = 0.0;
    let mut budget = 4096usize;
    // Stack of (lo, hi, depth).
    let mut stack: Vec<(f64, f64, u32)> = points
        .windows(2)
        .rev()
        .map(|p| (p[0], p[1], 0))
        .collect();
    while let Some((lo, hi, depth)) = stack.pop() {
        if budget == 0 {
            return Err(Error::Numerical(format!(
                "adaptive quadrature panel budget exhausted; error estimate {:.3e}",
                err_total
            )));
        }
        budget -= 1;
        let (coarse, fine) = panel_estimates(f, lo, hi);
        let err = (fine - coarse).abs();
        if err <= tol * (hi - lo) / span || depth >= 24 {
            total += fine;
            err_total += err;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    if err_total > tol * 8.0 {
        return Err(Error::Numerical(format!(
            "adaptive quadrature did not meet tolerance {:.3e}; error estimate {:.3e}",
            tol, err_total
        )));
    }
    Ok(total)
}

/// Trapezoid weights for an ascending grid.
pub fn trapezoid_weights(grid: &[f64]) -> Vec<f64> {
    let m = grid.len();
    let mut w = vec![0.0; m];
    for i in 0..m.saturating_sub(1) {
        let h = grid[i + 1] - grid[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    w
}

/// Barycentric Lagrange interpolation on a fixed set of nodes.
pub struct Barycentric {
    pub nodes: Vec<f64>,
    lam: Vec<f64>,
}

impl Barycentric {
    pub fn new(nodes: &[f64]) -> Self {
        let m = nodes.len();
        let mut lam = vec![1.0; m];
        for i in 0..m {
            for j in 0..m {
                if j != i {
                    lam[i] /= nodes[i] - nodes[j];
                }
            }
        }
        let scale = lam.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        for l in &mut lam {
            *l /= scale;
        }
        Barycentric {
            nodes: nodes.to_vec(),
            lam,
        }
    }

    /// Weights row such that row . samples interpolates the samples at t.
    pub fn row(&self, t: f64) -> Vec<f64> {
        let m = self.nodes.len();
        let mut row = vec![0.0; m];
        for i in 0..m {
            let d = t - self.nodes[i];
            if d.abs() < 1e-14 {
                row.iter_mut().for_each(|r| *r = 0.0);
                row[i] = 1.0;
                return row;
            }
            row[i] = self.lam[i] / d;
        }
        let s: f64 = row.iter().sum();
        for r in &mut row {
            *r /= s;
        }
        row
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_matches_reference_tables() {
        // Classical 5-point rule.
        let (x, w) = gauss_legendre(5);
        let xref = [
            -0.906179845938664,
            -0.538469310105683,
            0.0,
            0.538469310105683,
            0.906179845938664,
        ];
        let wref = [
            0.236926885056189,
            0.478628670499366,
            0.568888888888889,
            0.478628670499366,
            0.236926885056189,
        ];
        for i in 0..5 {
            assert!((x[i] - xref[i]).abs() < 1e-14);
            assert!((w[i] - wref[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        for m in [2usize, 8, 20, 64] {
            let (x, w) = gauss_legendre(m);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            // Exact for degree 2m-1.
            let deg = 2 * m - 1;
            let val: f64 = x
                .iter()
                .zip(&w)
                .map(|(&t, &wi)| wi * t.powi(deg as i32))
                .sum();
            assert!(val.abs() < 1e-12, "odd power should integrate to zero");
            let val2: f64 = x
                .iter()
                .zip(&w)
                .map(|(&t, &wi)| wi * t.powi((deg - 1) as i32))
                .sum();
            let exact = 2.0 / deg as f64;
            assert!((val2 - exact).abs() < 1e-12 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn adaptive_integrates_smooth_and_kinked() {
        let f = |t: f64| t.sin();
        let v = adaptive(&f, &[0.0, std::f64::consts::PI], 1e-14).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
        let g = |t: f64| (t - 0.3).abs();
        let v = adaptive(&g, &[0.0, 0.3, 1.0], 1e-14).unwrap();
        let exact = 0.5 * (0.3f64.powi(2) + 0.7f64.powi(2));
        assert!((v - exact).abs() < 1e-14);
    }

    #[test]
    fn trapezoid_weights_integrate_linear_exactly() {
        let grid = [0.0, 0.1, 0.35, 0.5, 1.0];
        let w = trapezoid_weights(&grid);
        let val: f64 = grid.iter().zip(&w).map(|(&g, &wi)| wi * (2.0 * g + 1.0)).sum();
        assert!((val - 2.0).abs() < 1e-15);
    }

    #[test]
    fn barycentric_reproduces_polynomials() {
        let (nodes, _) = gauss_legendre(12);
        let bary = Barycentric::new(&nodes);
        let f = |t: f64| 3.0 * t.powi(5) - t.powi(2) + 0.25;
        let samples: Vec<f64> = nodes.iter().map(|&t| f(t)).collect();
        for &t in &[-0.97, -0.5, 0.013, 0.4, 0.99] {
            let row = bary.row(t);
            let v: f64 = row.iter().zip(&samples).map(|(r, s)| r * s).sum();
            assert!((v - f(t)).abs() < 1e-12);
        }
        // Exact hit returns the sample itself.
        let row = bary.row(nodes[3]);
        assert_eq!(row[3], 1.0);
        assert!(row.iter().enumerate().all(|(i, &r)| i == 3 || r == 0.0));
    }
}
