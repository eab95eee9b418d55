//! Mollified vortex profiles and the fixed-point scheme that upgrades the
//! piecewise-constant instability to a smooth one.
//!
//! The jump at each radius r_j is smoothed over a collar of width eps using
//! the standard exponential bump. Zooming into a collar with r = r_j + eps
//! alpha turns the eigenvalue problem into a perturbation of the 2x2 jump
//! problem: find a correction pair (g, y) with g a profile pair on I=(-1,1)
//! and y a complex eigenvalue shift so that z^eps = z + eps y, h^eps =
//! h_j + eps g_j solves the smoothed problem. The correction solves
//! (A - z)g + (B - y)h + eps (B - y)g = 0, which is a contraction for small
//! eps and is iterated here to convergence.

use crate::error::{Error, Result};
use crate::kernel::kn_value;
use crate::quad::{self, Barycentric};
use crate::vortex::{EigenPair, VortexParams};
use ndarray::{Array1, Array2};
use num_complex::Complex64;
use std::sync::OnceLock;

fn raw_bump(a: f64) -> f64 {
    let s = 1.0 - a * a;
    if s <= 1e-12 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

fn bump_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| {
        quad::adaptive(&raw_bump, &[-1.0, 0.0, 1.0], 1e-15).expect("bump mass integral")
    })
}

/// The unit-mass mollifier eta(a) = N exp(-1/(1-a^2)) on (-1,1).
pub fn eta_at(a: f64) -> f64 {
    raw_bump(a) / bump_mass()
}

/// Derivative of the mollifier.
pub fn eta_prime_at(a: f64) -> f64 {
    let s = 1.0 - a * a;
    if s <= 1e-12 {
        0.0
    } else {
        eta_at(a) * (-2.0 * a / (s * s))
    }
}

/// eta_bar = eta + d/da (a eta) = 2 eta + a eta'.
pub fn eta_bar_at(a: f64) -> f64 {
    2.0 * eta_at(a) + a * eta_prime_at(a)
}

fn gl80() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| quad::gauss_legendre(80))
}

/// Primitive sigma(a) = integral of eta over (-1, a); clamps to {0, 1}
/// outside the bump support.
pub fn sigma_at(a: f64) -> f64 {
    if a <= -1.0 {
        return 0.0;
    }
    if a >= 1.0 {
        return 1.0;
    }
    let (x, w) = gl80();
    let mid = 0.5 * (a - 1.0);
    let half = 0.5 * (a + 1.0);
    let mut s = 0.0;
    for (t, wi) in x.iter().zip(w) {
        s += wi * eta_at(mid + half * t);
    }
    s * half
}

/// zeta_j(a) = -1/2 d/da (a^2 eta / (r_j + eps a)), the collar correction to
/// the vorticity gradient at jump radius r_j.
pub fn zeta_at(a: f64, r_j: f64, eps: f64) -> f64 {
    let r = r_j + eps * a;
    -0.5 * ((2.0 * a * eta_at(a) + a * a * eta_prime_at(a)) / r
        - eps * a * a * eta_at(a) / (r * r))
}

/// Mollifier data sampled on a Gauss-Legendre rule over I = (-1, 1).
///
/// The zeta profiles depend on the collar location and width, so they are
/// exposed through `zeta_samples` rather than stored.
pub struct MollifierProfile {
    pub m: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub eta: Vec<f64>,
    pub sigma: Vec<f64>,
    pub eta_bar: Vec<f64>,
    /// Quadrature weights against eta_bar, normalized so that a constant
    /// profile integrates to exactly 1 (the analytic value of its mass).
    pub eta_bar_weights: Vec<f64>,
    bary: Barycentric,
}

pub fn build_mollifier(m: usize) -> Result<MollifierProfile> {
    if m < 16 {
        return Err(Error::Domain(format!(
            "mollifier needs at least 16 nodes, got {m}"
        )));
    }
    let (nodes, weights) = quad::gauss_legendre(m);
    let eta: Vec<f64> = nodes.iter().map(|&a| eta_at(a)).collect();
    let sigma: Vec<f64> = nodes.iter().map(|&a| sigma_at(a)).collect();
    let eta_bar: Vec<f64> = nodes.iter().map(|&a| eta_bar_at(a)).collect();
    let raw: Vec<f64> = weights.iter().zip(&eta_bar).map(|(w, e)| w * e).collect();
    let mass: f64 = raw.iter().sum();
    let eta_bar_weights = raw.iter().map(|v| v / mass).collect();
    let bary = Barycentric::new(&nodes);
    Ok(MollifierProfile {
        m,
        nodes,
        weights,
        eta,
        sigma,
        eta_bar,
        eta_bar_weights,
        bary,
    })
}

impl MollifierProfile {
    /// Interpolation weights from the quadrature nodes to an arbitrary point.
    pub fn interp_row(&self, t: f64) -> Vec<f64> {
        self.bary.row(t)
    }

    pub fn zeta_samples(&self, r_j: f64, eps: f64) -> Vec<f64> {
        self.nodes.iter().map(|&a| zeta_at(a, r_j, eps)).collect()
    }
}

/// Smooth profiles of the mollified vortex at collar width eps.
///
/// Outside the two collars B_eps(r_j) every map agrees exactly with the
/// piecewise profiles; inside, closed forms in the zoomed variable
/// alpha = (r - r_j)/eps are used throughout.
#[derive(Debug, Clone, Copy)]
pub struct RegularizedProfiles {
    pub params: VortexParams,
    pub eps: f64,
}

/// Largest admissible collar width for the given jump radii.
pub fn eps_bound(p: &VortexParams) -> f64 {
    p.r1.min(p.r2 - p.r1) / 3.0
}

pub fn regularized_profiles(p: &VortexParams, eps: f64) -> Result<RegularizedProfiles> {
    let bound = eps_bound(p);
    if !(eps > 0.0 && eps < bound) {
        return Err(Error::Domain(format!(
            "eps must lie in (0, {bound}) = (0, (1/3) min(r1, r2 - r1)), got {eps}"
        )));
    }
    Ok(RegularizedProfiles { params: *p, eps })
}

impl RegularizedProfiles {
    /// Index of the collar containing r, if any.
    pub fn collar_of(&self, r: f64) -> Option<usize> {
        let radii = self.params.radii();
        (0..2).find(|&j| (r - radii[j]).abs() <= self.eps)
    }

    /// Velocity correction u_j(alpha) in the collar around r_j.
    pub fn u_j(&self, j: usize, alpha: f64) -> f64 {
        let r_j = self.params.radii()[j];
        let c_j = self.params.jumps()[j];
        0.5 * c_j * alpha * (2.0 * r_j + self.eps * alpha) * (sigma_at(alpha) - j as f64)
    }

    pub fn v_theta_over_r(&self, r: f64) -> f64 {
        match self.collar_of(r) {
            Some(j) => {
                let alpha = (r - self.params.radii()[j]) / self.eps;
                self.params.d_diag()[j] + self.eps * self.u_j(j, alpha) / (r * r)
            }
            None => {
                let p = &self.params;
                if r <= p.r1 {
                    0.5 * p.c
                } else if r <= p.r2 {
                    (p.r2 * p.r2 - r * r) / (2.0 * r * r)
                } else {
                    0.0
                }
            }
        }
    }

    pub fn v_theta(&self, r: f64) -> f64 {
        r * self.v_theta_over_r(r)
    }

    pub fn w_bar(&self, r: f64) -> f64 {
        match self.collar_of(r) {
            Some(j) => {
                let r_j = self.params.radii()[j];
                let c_j = self.params.jumps()[j];
                let alpha = (r - r_j) / self.eps;
                2.0 * self.params.d_diag()[j]
                    + c_j
                        * ((sigma_at(alpha) - j as f64)
                            + 0.5 * alpha * (2.0 * r_j + self.eps * alpha) * eta_at(alpha) / r)
            }
            None => {
                let p = &self.params;
                if r < p.r1 {
                    p.c
                } else if r < p.r2 {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Radial derivative of the smoothed vorticity; supported exactly in the
    /// collars, where eps d_r w = c_j (eta_bar + eps zeta_j)(alpha).
    pub fn dw_bar(&self, r: f64) -> f64 {
        match self.collar_of(r) {
            Some(j) => {
                let r_j = self.params.radii()[j];
                let c_j = self.params.jumps()[j];
                let alpha = (r - r_j) / self.eps;
                c_j * (eta_bar_at(alpha) + self.eps * zeta_at(alpha, r_j, self.eps)) / self.eps
            }
            None => 0.0,
        }
    }
}

/// How kernel integrals with both points in the same collar are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KinkRule {
    /// Split the beta panel at beta = alpha where the kernel has a kink and
    /// integrate each side with a mapped Gauss rule (the production rule).
    Split,
    /// Plain node quadrature ignoring the kink (for convergence studies).
    NodesOnly,
}

/// The zoomed operators at collar width eps, discretized on the mollifier's
/// nodes: dense matrices for A and B acting on stacked profile pairs
/// [g_1; g_2] of length 2M, plus the kernel samples behind them.
pub struct RescaledOperators {
    pub eps: f64,
    pub n: u32,
    pub m: usize,
    /// K_n(r_j/r_k).
    pub k0: [[f64; 2]; 2],
    /// u_j at the nodes.
    pub u: [Vec<f64>; 2],
    /// zeta_j at the nodes.
    pub zeta: [Vec<f64>; 2],
    /// K_n((r_j + eps a_i)/(r_k + eps a_l)) sampled at node pairs.
    pub keps: [[Array2<f64>; 2]; 2],
    /// J = (K^eps - K^0)/eps at node pairs.
    pub j_samples: [[Array2<f64>; 2]; 2],
    pub a_mat: Array2<Complex64>,
    pub b_mat: Array2<Complex64>,
}

pub fn rescaled_operators(
    p: &VortexParams,
    moll: &MollifierProfile,
    eps: f64,
) -> Result<RescaledOperators> {
    rescaled_operators_with(p, moll, eps, KinkRule::Split)
}

pub fn rescaled_operators_with(
    p: &VortexParams,
    moll: &MollifierProfile,
    eps: f64,
    rule: KinkRule,
) -> Result<RescaledOperators> {
    regularized_profiles(p, eps)?;
    let m = moll.m;
    let n = p.n;
    let nf = n as f64;
    let radii = p.radii();
    let cj = p.jumps();
    let dd = p.d_diag();

    let mut k0 = [[0.0; 2]; 2];
    for j in 0..2 {
        for k in 0..2 {
            k0[j][k] = kn_value(n, radii[j] / radii[k]);
        }
    }
    let u: [Vec<f64>; 2] = std::array::from_fn(|j| {
        moll.nodes
            .iter()
            .zip(&moll.sigma)
            .map(|(&a, &s)| 0.5 * cj[j] * a * (2.0 * radii[j] + eps * a) * (s - j as f64))
            .collect()
    });
    let zeta: [Vec<f64>; 2] =
        std::array::from_fn(|j| moll.zeta_samples(radii[j], eps));

    let keps: [[Array2<f64>; 2]; 2] = std::array::from_fn(|j| {
        std::array::from_fn(|k| {
            Array2::from_shape_fn((m, m), |(i, l)| {
                kn_value(n, (radii[j] + eps * moll.nodes[i]) / (radii[k] + eps * moll.nodes[l]))
            })
        })
    });
    let j_samples: [[Array2<f64>; 2]; 2] =
        std::array::from_fn(|j| std::array::from_fn(|k| (&keps[j][k] - k0[j][k]) / eps));

    let mut a_mat = Array2::zeros((2 * m, 2 * m));
    for j in 0..2 {
        for k in 0..2 {
            let factor = cj[k] * k0[j][k] / nf;
            for i in 0..m {
                for l in 0..m {
                    let mut v = factor * moll.eta_bar_weights[l];
                    if j == k && i == l {
                        v += dd[j];
                    }
                    a_mat[[j * m + i, k * m + l]] = Complex64::new(v, 0.0);
                }
            }
        }
    }

    let mut b_mat = Array2::zeros((2 * m, 2 * m));
    let (sub_x, sub_w) = quad::gauss_legendre(m);
    for j in 0..2 {
        for i in 0..m {
            let alpha = moll.nodes[i];
            let r = radii[j] + eps * alpha;
            b_mat[[j * m + i, j * m + i]] += Complex64::new(u[j][i] / (r * r), 0.0);
            for k in 0..2 {
                let factor = cj[k] / nf;
                if j == k && rule == KinkRule::Split {
                    // The kernel has a kink at beta = alpha: integrate each
                    // side with a mapped rule and pull the sample values back
                    // to the nodes by interpolation.
                    for (lo, hi) in [(-1.0, alpha), (alpha, 1.0)] {
                        let mid = 0.5 * (lo + hi);
                        let half = 0.5 * (hi - lo);
                        for (t, wq) in sub_x.iter().zip(&sub_w) {
                            let beta = mid + half * t;
                            let kv = kn_value(n, (radii[j] + eps * alpha) / (radii[k] + eps * beta));
                            let jv = (kv - k0[j][k]) / eps;
                            let val = factor
                                * (jv * eta_bar_at(beta) + kv * zeta_at(beta, radii[k], eps))
                                * wq
                                * half;
                            let row = moll.interp_row(beta);
                            for l in 0..m {
                                b_mat[[j * m + i, k * m + l]] += Complex64::new(val * row[l], 0.0);
                            }
                        }
                    }
                } else {
                    for l in 0..m {
                        let val = factor
                            * (j_samples[j][k][[i, l]] * moll.eta_bar[l]
                                + keps[j][k][[i, l]] * zeta[k][l])
                            * moll.weights[l];
                        b_mat[[j * m + i, k * m + l]] += Complex64::new(val, 0.0);
                    }
                }
            }
        }
    }

    Ok(RescaledOperators {
        eps,
        n,
        m,
        k0,
        u,
        zeta,
        keps,
        j_samples,
        a_mat,
        b_mat,
    })
}

fn check_pair_len(g: &Array1<Complex64>, m: usize) -> Result<()> {
    if g.len() != 2 * m {
        return Err(Error::NodeMismatch {
            expected: 2 * m,
            got: g.len(),
        });
    }
    Ok(())
}

/// Weighted masses of the two components against eta_bar.
fn eta_bar_masses(g: &Array1<Complex64>, moll: &MollifierProfile) -> [Complex64; 2] {
    let m = moll.m;
    std::array::from_fn(|k| {
        (0..m)
            .map(|l| g[k * m + l] * moll.eta_bar_weights[l])
            .sum()
    })
}

/// The zeroth-order operator: (Ag)_j = D_j g_j + (1/n) sum_k c_k K0_jk
/// times the eta_bar mass of g_k.
pub fn apply_a(
    g: &Array1<Complex64>,
    p: &VortexParams,
    moll: &MollifierProfile,
) -> Result<Array1<Complex64>> {
    check_pair_len(g, moll.m)?;
    let m = moll.m;
    let nf = p.n as f64;
    let radii = p.radii();
    let cj = p.jumps();
    let dd = p.d_diag();
    let masses = eta_bar_masses(g, moll);
    let mut out = Array1::zeros(2 * m);
    for j in 0..2 {
        let mut constant = Complex64::new(0.0, 0.0);
        for k in 0..2 {
            constant += masses[k] * (cj[k] * kn_value(p.n, radii[j] / radii[k]) / nf);
        }
        for i in 0..m {
            out[j * m + i] = g[j * m + i] * dd[j] + constant;
        }
    }
    Ok(out)
}

/// The constant-valued part of A: (Cg)_j = (1/n) sum_k c_k K0_jk <g_k, eta_bar>.
pub fn apply_c(
    g: &Array1<Complex64>,
    p: &VortexParams,
    moll: &MollifierProfile,
) -> Result<[Complex64; 2]> {
    check_pair_len(g, moll.m)?;
    let nf = p.n as f64;
    let radii = p.radii();
    let cj = p.jumps();
    let masses = eta_bar_masses(g, moll);
    Ok(std::array::from_fn(|j| {
        (0..2)
            .map(|k| masses[k] * (cj[k] * kn_value(p.n, radii[j] / radii[k]) / nf))
            .sum()
    }))
}

/// The first-order operator B, applied through its assembled matrix.
pub fn apply_b(
    g: &Array1<Complex64>,
    ops: &RescaledOperators,
    moll: &MollifierProfile,
) -> Result<Array1<Complex64>> {
    if moll.m != ops.m {
        return Err(Error::NodeMismatch {
            expected: ops.m,
            got: moll.m,
        });
    }
    check_pair_len(g, ops.m)?;
    Ok(ops.b_mat.dot(g))
}

/// Solve the linearized constant-vector equation: decompose Cf in the basis
/// {h, conj(h)}, take y as the h-coefficient, and absorb the conjugate
/// component into g = f + gamma conj(h).
pub fn solve_linearized(
    f: &Array1<Complex64>,
    p: &VortexParams,
    ep: &EigenPair,
    moll: &MollifierProfile,
) -> Result<(Array1<Complex64>, Complex64)> {
    check_pair_len(f, moll.m)?;
    if !(ep.z2 > 0.0) {
        return Err(Error::Domain(
            "eigenvector basis degenerate: Im z must be positive".into(),
        ));
    }
    let cf = apply_c(f, p, moll)?;
    let (h0, h1) = (ep.h[0], ep.h[1]);
    let det = h0 * h1.conj() - h0.conj() * h1;
    let y = (cf[0] * h1.conj() - h0.conj() * cf[1]) / det;
    let c_conj = (h0 * cf[1] - cf[0] * h1) / det;
    let gamma = c_conj / (Complex64::new(0.0, 2.0) * ep.z2);
    let m = moll.m;
    let mut g = f.clone();
    for j in 0..2 {
        let shift = gamma * ep.h[j].conj();
        for i in 0..m {
            g[j * m + i] += shift;
        }
    }
    Ok((g, y))
}

/// Whether the eps-feedback terms of the fixed-point map are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeedbackMode {
    Full,
    /// Zero the eps (y - B) g feedback, making the map constant; its image
    /// is the explicit leading-order correction.
    Zeroed,
}

/// Converged output of the fixed-point scheme.
#[derive(Debug, Clone)]
pub struct RescaledSolution {
    pub eps: f64,
    pub grid_m: usize,
    /// Correction profiles, stacked [g_1; g_2] on the mollifier nodes.
    pub g: Array1<Complex64>,
    pub y: Complex64,
    pub z: Complex64,
    pub h: [Complex64; 2],
    pub z_eps: Complex64,
    /// h^eps(r_j + eps a_i) = h_j + eps g_j(a_i), stacked like g.
    pub h_eps: Array1<Complex64>,
    pub iterations: usize,
    pub final_update_norm: f64,
    pub update_norms: Vec<f64>,
    /// Residual of the correction equation at the converged pair.
    pub defect_norm: f64,
}

fn pair_norm(g: &Array1<Complex64>, y: Complex64, weights: &[f64]) -> f64 {
    let m = weights.len();
    let mut s = y.norm_sqr();
    for j in 0..2 {
        for i in 0..m {
            s += weights[i] * g[j * m + i].norm_sqr();
        }
    }
    s.sqrt()
}

fn l2_norm(v: &Array1<Complex64>, weights: &[f64]) -> f64 {
    pair_norm(v, Complex64::new(0.0, 0.0), weights)
}

fn stacked_constant(h: [Complex64; 2], m: usize) -> Array1<Complex64> {
    Array1::from_iter(
        std::iter::repeat(h[0])
            .take(m)
            .chain(std::iter::repeat(h[1]).take(m)),
    )
}

/// One application of the fixed-point map to (g, y).
fn iterate_once(
    g: &Array1<Complex64>,
    y: Complex64,
    ops: &RescaledOperators,
    bh: &Array1<Complex64>,
    p: &VortexParams,
    ep: &EigenPair,
    moll: &MollifierProfile,
    mode: FeedbackMode,
) -> Result<(Array1<Complex64>, Complex64)> {
    let m = moll.m;
    let dd = p.d_diag();
    let mut rhs = -bh.clone();
    if mode == FeedbackMode::Full {
        let bg = ops.b_mat.dot(g);
        rhs = rhs + (g * y - bg) * ops.eps;
    }
    let mut f = Array1::zeros(2 * m);
    for j in 0..2 {
        let denom = Complex64::new(dd[j], 0.0) - ep.z;
        for i in 0..m {
            f[j * m + i] = rhs[j * m + i] / denom;
        }
    }
    solve_linearized(&f, p, ep, moll)
}

/// The explicit image of (0, 0) under the eps-feedback-free map: the
/// leading-order correction pair.
pub fn zero_feedback_solution(
    p: &VortexParams,
    ep: &EigenPair,
    moll: &MollifierProfile,
    eps: f64,
) -> Result<(Array1<Complex64>, Complex64)> {
    let ops = rescaled_operators(p, moll, eps)?;
    let bh = ops.b_mat.dot(&stacked_constant(ep.h, moll.m));
    let g0 = Array1::zeros(2 * moll.m);
    iterate_once(
        &g0,
        Complex64::new(0.0, 0.0),
        &ops,
        &bh,
        p,
        ep,
        moll,
        FeedbackMode::Zeroed,
    )
}

pub fn fixed_point(
    p: &VortexParams,
    ep: &EigenPair,
    moll: &MollifierProfile,
    eps: f64,
    tol: f64,
    max_iter: usize,
) -> Result<RescaledSolution> {
    fixed_point_with(p, ep, moll, eps, tol, max_iter, FeedbackMode::Full)
}

pub fn fixed_point_with(
    p: &VortexParams,
    ep: &EigenPair,
    moll: &MollifierProfile,
    eps: f64,
    tol: f64,
    max_iter: usize,
    mode: FeedbackMode,
) -> Result<RescaledSolution> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if max_iter == 0 {
        return Err(Error::Domain("max_iter must be positive".into()));
    }
    let ops = rescaled_operators(p, moll, eps)?;
    let m = moll.m;
    let hvec = stacked_constant(ep.h, m);
    let bh = ops.b_mat.dot(&hvec);

    let mut g: Array1<Complex64> = Array1::zeros(2 * m);
    let mut y = Complex64::new(0.0, 0.0);
    let mut update_norms: Vec<f64> = Vec::new();
    let mut ball = f64::INFINITY;
    let mut rises = 0usize;
    let mut converged = false;
    for _ in 0..max_iter {
        let (g_new, y_new) = iterate_once(&g, y, &ops, &bh, p, ep, moll, mode)?;
        let delta = pair_norm(&(&g_new - &g), y_new - y, &moll.weights);
        g = g_new;
        y = y_new;
        if update_norms.is_empty() {
            // A priori ball: the fixed point lies within a small multiple of
            // the first step's size for contracting eps.
            ball = 10.0 * delta.max(1e-300);
        } else if delta >= *update_norms.last().unwrap() {
            rises += 1;
        } else {
            rises = 0;
        }
        update_norms.push(delta);
        if pair_norm(&g, y, &moll.weights) > ball {
            return Err(Error::ContractionFailure {
                iterations: update_norms.len(),
                last_updates: update_norms,
            });
        }
        if rises >= 5 {
            return Err(Error::ContractionFailure {
                iterations: update_norms.len(),
                last_updates: update_norms,
            });
        }
        if delta <= tol {
            converged = true;
            break;
        }
    }
    if !converged {
        let tail = update_norms.iter().rev().take(6).cloned().collect();
        return Err(Error::ContractionFailure {
            iterations: update_norms.len(),
            last_updates: tail,
        });
    }

    let z_eps = ep.z + eps * y;
    if z_eps.im <= 0.0 {
        return Err(Error::InstabilityLost {
            eps,
            im_z: z_eps.im,
        });
    }
    let h_eps = &hvec + &(&g * Complex64::new(eps, 0.0));
    // Defect of the correction equation at the converged pair.
    let defect = {
        let ag = ops.a_mat.dot(&g);
        let bg = ops.b_mat.dot(&g);
        let e = &ag - &(&g * ep.z) + &bh - &(&hvec * y) + &((&bg - &(&g * y)) * eps);
        l2_norm(&e, &moll.weights)
    };
    Ok(RescaledSolution {
        eps,
        grid_m: m,
        g,
        y,
        z: ep.z,
        h: ep.h,
        z_eps,
        h_eps,
        iterations: update_norms.len(),
        final_update_norm: *update_norms.last().unwrap(),
        update_norms,
        defect_norm: defect,
    })
}

/// L2(I)^2 x C norm of a correction pair, shared by the scaling studies.
pub fn correction_norm(g: &Array1<Complex64>, y: Complex64, moll: &MollifierProfile) -> f64 {
    pair_norm(g, y, &moll.weights)
}
