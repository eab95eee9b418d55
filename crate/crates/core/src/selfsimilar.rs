//! Spectral continuation in self-similar coordinates: graded radial grids
//! that resolve the collars and the outward-transport tails, dense assembly
//! of the scaled linearized operator, and nearest-match continuation of the
//! unstable eigenvalue in the scaling strength b.

use crate::error::{Error, Result};
use crate::kernel::kn_row;
use crate::quad;
use crate::regularization::RegularizedProfiles;
use ndarray::Array2;
use ndarray_linalg::EigVals;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Parameters of the self-similar frame: exponent a, scaling strength b,
/// and the integrability target p entering the admissibility check.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SelfSimilarParams {
    pub a: f64,
    pub b: f64,
    pub p: f64,
}

impl SelfSimilarParams {
    pub fn new(a: f64, b: f64, p: f64) -> Result<Self> {
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::Domain(format!("a must lie in (0, 1], got {a}")));
        }
        if !(b >= 0.0 && b.is_finite()) {
            return Err(Error::Domain(format!("b must be finite and >= 0, got {b}")));
        }
        if !(p > 2.0) {
            return Err(Error::Domain(format!("p must exceed 2, got {p}")));
        }
        if !(a * p < 2.0) {
            return Err(Error::Domain(format!(
                "inadmissible exponents: a*p = {} must be < 2",
                a * p
            )));
        }
        Ok(Self { a, b, p })
    }
}

/// Dense discretization of the scaled operator on a radial grid.
///
/// `entries` holds the raw collocation matrix; `weighted` conjugates it into
/// coordinates orthonormal for the radial measure R dR.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub grid: Vec<f64>,
    pub entries: Array2<Complex64>,
    pub a: f64,
    pub b: f64,
}

impl OperatorMatrix {
    pub fn weighted(&self) -> Array2<Complex64> {
        let w = quad::trapezoid_weights(&self.grid);
        let s: Vec<f64> = w
            .iter()
            .zip(&self.grid)
            .map(|(q, r)| (q * r).sqrt())
            .collect();
        let m = self.grid.len();
        let mut out = self.entries.clone();
        for i in 0..m {
            for j in 0..m {
                out[[i, j]] *= s[i] / s[j];
            }
        }
        out
    }
}

/// Graded grid on (0, r_max]: an algebraic core, oscillation-resolving tails
/// below each collar when b > 0, uniformly resolved collars, a logarithmic
/// span between them, and a uniform outer segment.
pub fn radial_grid(
    profiles: &RegularizedProfiles,
    lam_re: f64,
    a: f64,
    b: f64,
    r_max: f64,
    grid_m: usize,
) -> Result<Vec<f64>> {
    let p = &profiles.params;
    let eps = profiles.eps;
    if r_max < p.r2 + 2.0 * eps {
        return Err(Error::Domain(format!(
            "r_max {} must reach past the outer collar at {}",
            r_max,
            p.r2 + 2.0 * eps
        )));
    }
    let (r1l, r1r) = (p.r1 - eps, p.r1 + eps);
    let (r2l, r2r) = (p.r2 - eps, p.r2 + eps);
    let s = grid_m as f64 / 512.0;
    let ppw = 18.0 * s;
    let grade = 2.0;
    let ncore = 8usize.max((24.0 * s).round() as usize);
    let nmid = 8usize.max((20.0 * s).round() as usize);
    let nout = 8usize.max((16.0 * s).round() as usize);

    // Below each collar the branch eigenfunction oscillates like
    // R^{(lam - ab)/b}; resolve ppw points per local wavelength over the
    // window where the amplitude is above a fixed floor.
    let (t1, t2, w1, w2);
    if b > 0.0 {
        let growth = ((lam_re - a * b) / b).max(1.0);
        let kmax = (lam_re + p.n as f64 * p.c / 2.0) / b;
        let width = (1e5f64).ln() / growth;
        w1 = width.min((r1l / 0.05).ln());
        w2 = width.min((r2l / r1r).ln() - 0.01);
        let tail = |redge: f64, wid: f64| -> Vec<f64> {
            let npts = 8usize.max((kmax * wid / (2.0 * std::f64::consts::PI) * ppw).ceil() as usize);
            (1..=npts)
                .rev()
                .map(|q| redge * (-wid * (q as f64 / npts as f64).powf(grade)).exp())
                .collect()
        };
        t1 = tail(r1l, w1);
        t2 = tail(r2l, w2);
    } else {
        t1 = Vec::new();
        t2 = Vec::new();
        w1 = 0.0;
        w2 = 0.0;
    }
    let core_hi = r1l * (-w1).exp();
    let mid_hi = r2l * (-w2).exp();
    let used = t1.len() + t2.len() + ncore + nmid + nout;
    let ncol = (grid_m as isize - used as isize) / 2;
    if ncol < 16 {
        return Err(Error::Domain(format!(
            "grid too coarse for collars: {ncol} points each at grid_m = {grid_m}"
        )));
    }
    let ncol = ncol as usize;

    let mut g: Vec<f64> = Vec::with_capacity(grid_m + 8);
    for k in 1..ncore {
        g.push(0.02 + (core_hi - 0.02) * k as f64 / ncore as f64);
    }
    g.extend_from_slice(&t1);
    for k in 0..ncol {
        g.push(r1l + (r1r - r1l) * k as f64 / (ncol - 1) as f64);
    }
    let step = (mid_hi.ln() - r1r.ln() - 1e-9) / nmid as f64;
    for k in 1..nmid {
        g.push((r1r.ln() + 1e-9 + step * k as f64).exp());
    }
    g.extend_from_slice(&t2);
    for k in 1..ncol {
        g.push(r2l + (r2r - r2l) * k as f64 / (ncol - 1) as f64);
    }
    for k in 1..=nout {
        g.push(r2r + (r_max - r2r) * k as f64 / nout as f64);
    }
    g.sort_by(|x, y| x.total_cmp(y));
    g.dedup();
    g.retain(|&r| r > 0.0);
    Ok(g)
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::Domain("operator grid needs at least 2 nodes".into()));
    }
    for i in 0..grid.len() {
        if !(grid[i] > 0.0 && grid[i].is_finite()) {
            return Err(Error::Domain("operator grid must be positive and finite".into()));
        }
        if i > 0 && grid[i] <= grid[i - 1] {
            return Err(Error::Domain("operator grid must be strictly increasing".into()));
        }
    }
    Ok(())
}

/// Transport term b R d_R by first-order upwind differences. The scaling
/// field carries information inward from larger R, so the stencil looks
/// outward; past the last node the test functions vanish.
fn add_transport(l: &mut Array2<Complex64>, grid: &[f64], b: f64) {
    let m = grid.len();
    for i in 0..m {
        let h = if i + 1 < m {
            grid[i + 1] - grid[i]
        } else {
            grid[i] - grid[i - 1]
        };
        l[[i, i]] += Complex64::new(-b * grid[i] / h, 0.0);
        if i + 1 < m {
            l[[i, i + 1]] += Complex64::new(b * grid[i] / h, 0.0);
        }
    }
}

/// Assemble the scaled operator on an explicit grid:
/// ab W + b R d_R W - i n (v/R) W - i d_R w_eps Int K_n(R/S) W(S) dS.
pub fn assemble_lb_on_grid(
    params: &SelfSimilarParams,
    profiles: &RegularizedProfiles,
    grid: &[f64],
) -> Result<OperatorMatrix> {
    validate_grid(grid)?;
    let m = grid.len();
    let n = profiles.params.n;
    let nf = n as f64;
    let ab = params.a * params.b;
    let mut l: Array2<Complex64> = Array2::zeros((m, m));
    for i in 0..m {
        let r = grid[i];
        l[[i, i]] += Complex64::new(ab, -nf * profiles.v_theta_over_r(r));
        let dw = profiles.dw_bar(r);
        if dw != 0.0 {
            let row = kn_row(grid, r, n);
            for (k, &wk) in row.iter().enumerate() {
                l[[i, k]] += Complex64::new(0.0, -dw * wk);
            }
        }
    }
    if params.b > 0.0 {
        add_transport(&mut l, grid, params.b);
    }
    Ok(OperatorMatrix {
        grid: grid.to_vec(),
        entries: l,
        a: params.a,
        b: params.b,
    })
}

/// The ab and transport terms alone, for stability diagnostics.
pub fn assemble_transport_on_grid(
    params: &SelfSimilarParams,
    grid: &[f64],
) -> Result<OperatorMatrix> {
    validate_grid(grid)?;
    let m = grid.len();
    let ab = params.a * params.b;
    let mut l: Array2<Complex64> = Array2::zeros((m, m));
    for i in 0..m {
        l[[i, i]] = Complex64::new(ab, 0.0);
    }
    if params.b > 0.0 {
        add_transport(&mut l, grid, params.b);
    }
    Ok(OperatorMatrix {
        grid: grid.to_vec(),
        entries: l,
        a: params.a,
        b: params.b,
    })
}

/// Build the default graded grid and assemble the operator on it. `lam_re`
/// anchors the tail resolution to the real part of the tracked eigenvalue.
pub fn assemble_lb(
    params: &SelfSimilarParams,
    profiles: &RegularizedProfiles,
    lam_re: f64,
    grid_m: usize,
    r_max: f64,
) -> Result<OperatorMatrix> {
    let grid = radial_grid(profiles, lam_re, params.a, params.b, r_max, grid_m)?;
    assemble_lb_on_grid(params, profiles, &grid)
}

fn dense_eigenvalues(op: &OperatorMatrix) -> Result<Vec<Complex64>> {
    let eig = op
        .weighted()
        .eigvals()
        .map_err(|e| Error::Numerical(format!("eigenvalue solve failed: {e}")))?;
    Ok(eig.to_vec())
}

/// Eigenvalues of the weighted operator inside the disk around `center`,
/// sorted by distance to the center.
pub fn spectrum_near(op: &OperatorMatrix, center: Complex64, radius: f64) -> Result<Vec<Complex64>> {
    if radius <= 0.0 {
        return Ok(Vec::new());
    }
    let mut close: Vec<Complex64> = dense_eigenvalues(op)?
        .into_iter()
        .filter(|z| (z - center).norm() <= radius)
        .collect();
    close.sort_by(|x, y| (x - center).norm().total_cmp(&(y - center).norm()));
    Ok(close)
}

/// One accepted continuation step.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BranchPoint {
    pub b: f64,
    pub lambda: Complex64,
    pub re_gap: f64,
    pub satisfied: bool,
    pub disc_estimate: f64,
    pub radius: f64,
}

/// Where and how the branch stopped being trackable.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BranchLossEvent {
    pub b: f64,
    pub nearest: Complex64,
    pub distance: f64,
    pub radius: f64,
}

/// Continuation results; `points` holds every accepted step even when the
/// branch is eventually lost.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContinuationTable {
    pub points: Vec<BranchPoint>,
    pub loss: Option<BranchLossEvent>,
}

fn nearest(eigs: &[Complex64], target: Complex64) -> Result<Complex64> {
    eigs.iter()
        .copied()
        .min_by(|x, y| (x - target).norm().total_cmp(&(y - target).norm()))
        .ok_or_else(|| Error::Numerical("empty spectrum".into()))
}

fn branch_spectrum(
    params: &SelfSimilarParams,
    profiles: &RegularizedProfiles,
    lam_re: f64,
    grid_m: usize,
    r_max: f64,
) -> Result<Vec<Complex64>> {
    let op = assemble_lb(params, profiles, lam_re, grid_m, r_max)?;
    dense_eigenvalues(&op)
}

/// Track the eigenvalue branch from `lam0` through the listed b values by
/// nearest-match continuation. Each step is accepted only if the matched
/// eigenvalue lies within a radius set by the local discretization-error
/// estimate (full grid vs. half grid); otherwise the table records the loss
/// and keeps the accepted prefix.
pub fn continue_in_b(
    bs: &[f64],
    a: f64,
    p_exp: f64,
    profiles: &RegularizedProfiles,
    lam0: Complex64,
    grid_m: usize,
    r_max: f64,
) -> Result<ContinuationTable> {
    if bs.is_empty() {
        return Err(Error::Domain("continuation needs at least one b value".into()));
    }
    if bs[0] != 0.0 {
        return Err(Error::Domain(format!(
            "continuation must start at b = 0, got {}",
            bs[0]
        )));
    }
    for w in bs.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Domain("b values must be strictly increasing".into()));
        }
    }
    let params: Vec<SelfSimilarParams> = bs
        .iter()
        .map(|&b| SelfSimilarParams::new(a, b, p_exp))
        .collect::<Result<_>>()?;
    let lam_re = lam0.re;
    let spectra: Vec<(Vec<Complex64>, Vec<Complex64>)> = params
        .par_iter()
        .map(|prm| {
            let full = branch_spectrum(prm, profiles, lam_re, grid_m, r_max)?;
            let half = branch_spectrum(prm, profiles, lam_re, grid_m / 2, r_max)?;
            Ok((full, half))
        })
        .collect::<Result<_>>()?;

    let mut points = Vec::with_capacity(bs.len());
    let mut loss = None;
    let mut lam_prev = lam0;
    for (&b, (full, half)) in bs.iter().zip(&spectra) {
        let lam_m = nearest(full, lam_prev)?;
        let lam_h = nearest(half, lam_prev)?;
        let est = (lam_m - lam_h).norm();
        let radius = (10.0 * est).min(lam_prev.norm() / 2.0).max(1e-6);
        let dist = (lam_m - lam_prev).norm();
        if dist > radius {
            loss = Some(BranchLossEvent {
                b,
                nearest: lam_m,
                distance: dist,
                radius,
            });
            break;
        }
        points.push(BranchPoint {
            b,
            lambda: lam_m,
            re_gap: lam_m.re - 3.0 * b,
            satisfied: lam_m.re > 3.0 * b,
            disc_estimate: est,
            radius,
        });
        lam_prev = lam_m;
    }
    Ok(ContinuationTable { points, loss })
}
