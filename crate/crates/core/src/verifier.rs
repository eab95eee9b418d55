//! Certification of the smoothed vortex: pointwise residual of the
//! eigenvalue equation on fine collar grids, reconstruction of the unstable
//! eigenfunction as a radial field, and confirmation of the growth rate by
//! explicit time integration of the linearized equation.

use crate::error::{Error, Result};
use crate::kernel::{kn_row, kn_value, RadialField};
use crate::quad;
use crate::regularization::{
    eta_bar_at, zeta_at, MollifierProfile, RegularizedProfiles, RescaledSolution,
};
use crate::vortex::{matrix_a, EigenPair, VortexParams};
use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rayon::prelude::*;
use std::sync::OnceLock;

/// Pointwise residual of the smoothed eigenvalue equation on the collars.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub grid: Vec<f64>,
    pub residual: Vec<Complex64>,
    pub sup_norm: f64,
    pub l2_norm: f64,
    pub fine_m: usize,
}

fn gl200() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| quad::gauss_legendre(200))
}

fn interp_component(
    moll: &MollifierProfile,
    g: &Array1<Complex64>,
    comp: usize,
    t: f64,
) -> Complex64 {
    let m = moll.m;
    moll.interp_row(t)
        .iter()
        .enumerate()
        .map(|(l, &w)| g[comp * m + l] * w)
        .sum()
}

/// Evaluate (v/r - z^eps) h^eps(r) plus the kernel integral against
/// h^eps d_r w^eps at a single radius inside collar j.
fn residual_at(
    r: f64,
    alpha: f64,
    j: usize,
    sol: &RescaledSolution,
    profiles: &RegularizedProfiles,
    moll: &MollifierProfile,
) -> Complex64 {
    let p = &profiles.params;
    let eps = profiles.eps;
    let radii = p.radii();
    let cj = p.jumps();
    let nf = p.n as f64;
    let h_eps = sol.h[j] + eps * interp_component(moll, &sol.g, j, alpha);
    let mut res = (profiles.v_theta_over_r(r) - sol.z_eps) * h_eps;
    let (gx, gw) = gl200();
    for k in 0..2 {
        // Integrate over the zoomed collar k, splitting at the kernel kink.
        let beta_star = (r - radii[k]) / eps;
        let mut segments = vec![(-1.0, 1.0)];
        if beta_star > -1.0 && beta_star < 1.0 {
            segments = vec![(-1.0, beta_star), (beta_star, 1.0)];
        }
        let mut integral = Complex64::new(0.0, 0.0);
        for (lo, hi) in segments {
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            for (t, w) in gx.iter().zip(gw) {
                let beta = mid + half * t;
                let kv = kn_value(p.n, r / (radii[k] + eps * beta));
                let hk = sol.h[k] + eps * interp_component(moll, &sol.g, k, beta);
                let weight = eta_bar_at(beta) + eps * zeta_at(beta, radii[k], eps);
                integral += kv * hk * weight * (w * half);
            }
        }
        res += integral * (cj[k] / nf);
    }
    res
}

pub fn rayleigh_residual(
    sol: &RescaledSolution,
    profiles: &RegularizedProfiles,
    moll: &MollifierProfile,
    fine_m: usize,
) -> Result<ResidualReport> {
    if fine_m < 4 * sol.grid_m {
        return Err(Error::Domain(format!(
            "residual grid must refine the construction grid at least 4 times: {fine_m} < {}",
            4 * sol.grid_m
        )));
    }
    if moll.m != sol.grid_m {
        return Err(Error::NodeMismatch {
            expected: sol.grid_m,
            got: moll.m,
        });
    }
    if profiles.eps != sol.eps {
        return Err(Error::Domain(format!(
            "profiles built at eps {} but solution at eps {}",
            profiles.eps, sol.eps
        )));
    }
    let eps = profiles.eps;
    let radii = profiles.params.radii();
    let mut points: Vec<(usize, f64, f64)> = Vec::with_capacity(2 * fine_m);
    for (j, r_j) in radii.into_iter().enumerate() {
        for i in 0..fine_m {
            let alpha = -1.0 + 2.0 * i as f64 / (fine_m - 1) as f64;
            points.push((j, alpha, r_j + eps * alpha));
        }
    }
    let residual: Vec<Complex64> = points
        .par_iter()
        .map(|&(j, alpha, r)| residual_at(r, alpha, j, sol, profiles, moll))
        .collect();
    let grid: Vec<f64> = points.iter().map(|&(_, _, r)| r).collect();
    let sup_norm = residual.iter().fold(0.0f64, |acc, v| acc.max(v.norm()));
    // L2 norm in r dr, collar by collar.
    let mut l2 = 0.0;
    for j in 0..2 {
        let seg = &grid[j * fine_m..(j + 1) * fine_m];
        let w = quad::trapezoid_weights(seg);
        for i in 0..fine_m {
            l2 += w[i] * seg[i] * residual[j * fine_m + i].norm_sqr();
        }
    }
    Ok(ResidualReport {
        grid,
        residual,
        sup_norm,
        l2_norm: l2.sqrt(),
        fine_m,
    })
}

/// Residual of the unregularized jump problem evaluated at the two jump
/// radii, where the kernel integral collapses onto the jump masses.
pub fn piecewise_residual(p: &VortexParams, ep: &EigenPair) -> [Complex64; 2] {
    let a = matrix_a(p).full();
    std::array::from_fn(|j| a[j][0] * ep.h[0] + a[j][1] * ep.h[1] - ep.z * ep.h[j])
}

/// Sample the unstable eigenfunction w_n(r) = h^eps(r) d_r w^eps(r) on
/// uniform collar grids.
pub fn assemble_eigen_field(
    sol: &RescaledSolution,
    profiles: &RegularizedProfiles,
    moll: &MollifierProfile,
    points_per_collar: usize,
) -> Result<RadialField> {
    if moll.m != sol.grid_m {
        return Err(Error::NodeMismatch {
            expected: sol.grid_m,
            got: moll.m,
        });
    }
    if profiles.eps != sol.eps {
        return Err(Error::Domain(format!(
            "profiles built at eps {} but solution at eps {}",
            profiles.eps, sol.eps
        )));
    }
    if points_per_collar < 2 {
        return Err(Error::Domain("need at least 2 points per collar".into()));
    }
    let eps = profiles.eps;
    let mut grid = Vec::with_capacity(2 * points_per_collar);
    let mut values = Vec::with_capacity(2 * points_per_collar);
    for (j, r_j) in profiles.params.radii().into_iter().enumerate() {
        for i in 0..points_per_collar {
            let alpha = -1.0 + 2.0 * i as f64 / (points_per_collar - 1) as f64;
            let r = r_j + eps * alpha;
            let h_eps = sol.h[j] + eps * interp_component(moll, &sol.g, j, alpha);
            grid.push(r);
            values.push(h_eps * profiles.dw_bar(r));
        }
    }
    let field = RadialField {
        grid,
        values,
        n: profiles.params.n,
    };
    field.validate()?;
    Ok(field)
}

/// Dense discretization of the linearized operator on the given grid:
/// (L w)(r_i) = -i n (v/r)(r_i) w_i - i (d_r w^eps)(r_i) Int K_n(r_i/s) w(s) ds.
pub fn linearized_matrix(grid: &[f64], profiles: &RegularizedProfiles) -> Array2<Complex64> {
    let m = grid.len();
    let n = profiles.params.n;
    let nf = n as f64;
    let mut l = Array2::zeros((m, m));
    for i in 0..m {
        let r = grid[i];
        l[[i, i]] += Complex64::new(0.0, -nf * profiles.v_theta_over_r(r));
        let dw = profiles.dw_bar(r);
        if dw != 0.0 {
            let row = kn_row(grid, r, n);
            for (k, &w) in row.iter().enumerate() {
                l[[i, k]] += Complex64::new(0.0, -dw * w);
            }
        }
    }
    l
}

fn rk4_step(l: &Array2<Complex64>, w: &Array1<Complex64>, dt: f64) -> Array1<Complex64> {
    let k1 = l.dot(w);
    let k2 = l.dot(&(w + &(&k1 * (0.5 * dt))));
    let k3 = l.dot(&(w + &(&k2 * (0.5 * dt))));
    let k4 = l.dot(&(w + &(&k3 * dt)));
    w + &((&(&k1 + &k4) + &(&(&k2 + &k3) * 2.0)) * (dt / 6.0))
}

fn default_dt(grid: &[f64], profiles: &RegularizedProfiles) -> f64 {
    let nf = profiles.params.n as f64;
    let vor_max = grid
        .iter()
        .fold(0.0f64, |acc, &r| acc.max(profiles.v_theta_over_r(r).abs()));
    // The nonlocal part is bounded by sup|d_r w| times the kernel bound 1/2
    // times the support measure 4 eps.
    let dw_max = grid.iter().fold(0.0f64, |acc, &r| acc.max(profiles.dw_bar(r).abs()));
    0.1 / (nf * vor_max + dw_max * 2.0 * profiles.eps)
}

fn weighted_norm(w: &Array1<Complex64>, wq: &[f64]) -> f64 {
    w.iter()
        .zip(wq)
        .map(|(v, &q)| q * v.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Exponential growth extracted from a linearized evolution.
#[derive(Debug, Clone)]
pub struct GrowthFit {
    pub times: Vec<f64>,
    pub log_norms: Vec<f64>,
    pub fitted_rate: f64,
    pub expected_rate: f64,
    pub relative_error: f64,
    pub dt: f64,
    pub steps: usize,
}

/// Integrate the linearized equation from `field0` to t_final with classical
/// fourth-order Runge-Kutta steps and fit the exponential growth rate of the
/// L2 norm over the second half of the run.
pub fn evolve_linear(
    field0: &RadialField,
    profiles: &RegularizedProfiles,
    t_final: f64,
    dt: Option<f64>,
    expected_rate: f64,
) -> Result<GrowthFit> {
    field0.validate()?;
    if field0.n != profiles.params.n {
        return Err(Error::Domain(format!(
            "field mode {} does not match vortex mode {}",
            field0.n, profiles.params.n
        )));
    }
    if !(t_final > 0.0) {
        return Err(Error::Domain("t_final must be positive".into()));
    }
    if !(expected_rate > 0.0) {
        return Err(Error::Domain("expected growth rate must be positive".into()));
    }
    let grid = &field0.grid;
    let dt0 = match dt {
        Some(v) if v > 0.0 => v,
        Some(v) => return Err(Error::Domain(format!("dt must be positive, got {v}"))),
        None => default_dt(grid, profiles),
    };
    let steps = (t_final / dt0).ceil().max(1.0) as usize;
    let dt = t_final / steps as f64;

    let l = linearized_matrix(grid, profiles);
    let wq: Vec<f64> = quad::trapezoid_weights(grid)
        .iter()
        .zip(grid)
        .map(|(w, r)| w * r)
        .collect();
    let mut w: Array1<Complex64> = Array1::from_vec(field0.values.clone());
    let mut offset = 0.0f64;
    let norm0 = weighted_norm(&w, &wq);
    if norm0 == 0.0 {
        return Err(Error::DegenerateFit("initial field has zero norm".into()));
    }
    let mut times = vec![0.0];
    let mut log_norms = vec![norm0.ln()];
    for s in 1..=steps {
        w = rk4_step(&l, &w, dt);
        let mut norm = weighted_norm(&w, &wq);
        if !norm.is_finite() {
            return Err(Error::Numerical(
                "time integration produced a non-finite norm; reduce dt".into(),
            ));
        }
        if norm > 1e100 {
            // Rescale and carry the log offset.
            w = &w * (1.0 / norm);
            offset += norm.ln();
            norm = 1.0;
        }
        times.push(s as f64 * dt);
        log_norms.push(if norm > 0.0 {
            norm.ln() + offset
        } else {
            f64::NEG_INFINITY
        });
    }
    // Least-squares slope over the transient-free window.
    let window: Vec<(f64, f64)> = times
        .iter()
        .zip(&log_norms)
        .filter(|&(&t, &y)| t >= 0.5 * t_final && y.is_finite())
        .map(|(&t, &y)| (t, y))
        .collect();
    if window.len() < 8 {
        return Err(Error::DegenerateFit(format!(
            "only {} usable samples in the fit window",
            window.len()
        )));
    }
    let n = window.len() as f64;
    let tm = window.iter().map(|&(t, _)| t).sum::<f64>() / n;
    let ym = window.iter().map(|&(_, y)| y).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for &(t, y) in &window {
        num += (t - tm) * (y - ym);
        den += (t - tm) * (t - tm);
    }
    if den == 0.0 {
        return Err(Error::DegenerateFit("fit window has zero time spread".into()));
    }
    let fitted_rate = num / den;
    Ok(GrowthFit {
        times,
        log_norms,
        fitted_rate,
        expected_rate,
        relative_error: (fitted_rate - expected_rate).abs() / expected_rate.abs(),
        dt,
        steps,
    })
}

/// Integrate the linearized equation and return the final state; no
/// rescaling is applied, so the horizon must keep the norm in range.
pub fn evolve_state(
    field0: &RadialField,
    profiles: &RegularizedProfiles,
    t_final: f64,
    dt: Option<f64>,
) -> Result<RadialField> {
    field0.validate()?;
    if field0.n != profiles.params.n {
        return Err(Error::Domain(format!(
            "field mode {} does not match vortex mode {}",
            field0.n, profiles.params.n
        )));
    }
    if !(t_final > 0.0) {
        return Err(Error::Domain("t_final must be positive".into()));
    }
    let dt0 = match dt {
        Some(v) if v > 0.0 => v,
        Some(v) => return Err(Error::Domain(format!("dt must be positive, got {v}"))),
        None => default_dt(&field0.grid, profiles),
    };
    let steps = (t_final / dt0).ceil().max(1.0) as usize;
    let dt = t_final / steps as f64;
    let l = linearized_matrix(&field0.grid, profiles);
    let mut w: Array1<Complex64> = Array1::from_vec(field0.values.clone());
    for _ in 0..steps {
        w = rk4_step(&l, &w, dt);
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(
                "time integration produced non-finite values; reduce dt".into(),
            ));
        }
    }
    Ok(RadialField {
        grid: field0.grid.clone(),
        values: w.to_vec(),
        n: field0.n,
    })
}
