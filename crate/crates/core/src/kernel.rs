//! The Biot-Savart kernel for a single angular mode and its action on
//! radial vorticity profiles.
//!
//! For mode number n the stream-function kernel reduces to the radial form
//! K_n(rho) = rho^(n-1)/2 for rho < 1 and rho^(-n-1)/2 for rho > 1, with
//! K_n(1) = 1/2. The angular velocity induced by a mode-n vorticity profile
//! w(s) at radius r is i e^{in theta} times `apply_radial_velocity`, whose
//! radial factor is the integral of K_n(r/s) w(s) ds over the support.

use crate::error::{Error, Result};
use crate::quad;
use num_complex::Complex64;

/// K_n(rho) without argument validation; callers guarantee rho > 0.
pub(crate) fn kn_value(n: u32, rho: f64) -> f64 {
    if rho < 1.0 {
        0.5 * rho.powi(n as i32 - 1)
    } else if rho > 1.0 {
        0.5 * rho.powi(-(n as i32) - 1)
    } else {
        0.5
    }
}

/// Closed form of the mode-n kernel at radius ratio rho.
pub fn kn_closed(n: u32, rho: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("mode number must be at least 1".into()));
    }
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::Domain(format!(
            "radius ratio must be positive and finite, got {rho}"
        )));
    }
    Ok(kn_value(n, rho))
}

/// Independent evaluation of K_n(rho) by adaptive quadrature of its angular
/// integral representation.
///
/// The integrand peaks sharply near theta = 0 as rho approaches 1, so ratios
/// with |rho - 1| < 0.02 are rejected rather than integrated inaccurately.
pub fn kn_quadrature(n: u32, rho: f64, tol: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("mode number must be at least 1".into()));
    }
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::Domain(format!(
            "radius ratio must be positive and finite, got {rho}"
        )));
    }
    if (rho - 1.0).abs() < 0.02 {
        return Err(Error::Domain(format!(
            "quadrature representation is unreliable for rho near 1 (got {rho})"
        )));
    }
    let nf = n as f64;
    let f = move |theta: f64| {
        theta.sin() * (nf * theta).sin() / (1.0 + rho * rho - 2.0 * rho * theta.cos())
    };
    // The integrand is symmetric about theta = pi; integrate half and scale.
    let pi = std::f64::consts::PI;
    let splits = [0.0, 0.05, 0.25, 1.0, pi];
    let val = quad::adaptive(&f, &splits, tol)?;
    Ok(val / pi)
}

/// A mode-n radial profile sampled on an ascending positive grid.
#[derive(Debug, Clone)]
pub struct RadialField {
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub n: u32,
}

impl RadialField {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::Domain("mode number must be at least 1".into()));
        }
        if self.grid.len() != self.values.len() {
            return Err(Error::NodeMismatch {
                expected: self.grid.len(),
                got: self.values.len(),
            });
        }
        for w in self.grid.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Domain("grid must be strictly ascending".into()));
            }
        }
        if let Some(&g0) = self.grid.first() {
            if !(g0 > 0.0) {
                return Err(Error::Domain("grid must be strictly positive".into()));
            }
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("field values must be finite".into()));
        }
        Ok(())
    }
}

/// Trapezoid quadrature row for s -> K_n(r/s) against samples on `grid`.
///
/// K_n(r/s) has a derivative kink at s = r; any interval straddling it is
/// split there, with the sample value at the kink taken by linear
/// interpolation so the row stays a pure functional of the grid samples.
pub fn kn_row(grid: &[f64], r: f64, n: u32) -> Vec<f64> {
    let m = grid.len();
    let mut row = vec![0.0; m];
    if m < 2 {
        return row;
    }
    let k: Vec<f64> = grid.iter().map(|&s| kn_value(n, r / s)).collect();
    for i in 0..m - 1 {
        let (s0, s1) = (grid[i], grid[i + 1]);
        let h = s1 - s0;
        if s0 < r && r < s1 {
            let d1 = r - s0;
            let d2 = s1 - r;
            let t = d1 / h;
            let kr = 0.5;
            row[i] += 0.5 * d1 * k[i] + 0.5 * (d1 + d2) * kr * (1.0 - t);
            row[i + 1] += 0.5 * d2 * k[i + 1] + 0.5 * (d1 + d2) * kr * t;
        } else {
            row[i] += 0.5 * h * k[i];
            row[i + 1] += 0.5 * h * k[i + 1];
        }
    }
    row
}

/// Radial factor of the velocity induced by `field` at radius r.
///
/// Returns the integral of K_n(r/s) w_n(s) ds; the full angular velocity is
/// this value times i e^{in theta}. An empty field induces zero velocity.
pub fn apply_radial_velocity(field: &RadialField, r: f64) -> Result<Complex64> {
    field.validate()?;
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Domain(format!(
            "evaluation radius must be positive and finite, got {r}"
        )));
    }
    if field.grid.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let row = kn_row(&field.grid, r, field.n);
    Ok(row
        .iter()
        .zip(&field.values)
        .map(|(&w, &v)| w * v)
        .sum())
}
