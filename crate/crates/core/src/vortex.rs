//! The piecewise-constant two-jump vortex: parameters, radial profiles, the
//! 2x2 interaction matrix for a single angular mode, its characteristic
//! polynomial and discriminant, and the unstable eigenpair.
//!
//! The profile is w(r) = c on [0, r1), -1 on [r1, r2), 0 beyond, with
//! (1+c) xi = 1 and xi = (r1/r2)^2 so the vortex has zero mean. Mode-n
//! perturbations concentrated at the two jump radii reduce the stability
//! problem to a 2x2 matrix A = D + C; a complex eigenvalue z with Im z > 0
//! is an instability, with growth rate Re(-inz) = n Im z.

use crate::error::{Error, Result};
use crate::kernel::kn_value;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct VortexParams {
    pub n: u32,
    pub xi: f64,
    pub r1: f64,
    pub r2: f64,
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
}

impl VortexParams {
    /// Jump radii as an indexable pair.
    pub fn radii(&self) -> [f64; 2] {
        [self.r1, self.r2]
    }

    /// Jump coefficients (c1, c2).
    pub fn jumps(&self) -> [f64; 2] {
        [self.c1, self.c2]
    }

    /// Angular velocity over radius at the two jump radii: (c/2, 0).
    pub fn d_diag(&self) -> [f64; 2] {
        [0.5 * self.c, 0.0]
    }
}

/// The unregularized radial profiles.
#[derive(Debug, Clone, Copy)]
pub struct PiecewiseProfiles {
    pub params: VortexParams,
}

impl PiecewiseProfiles {
    pub fn w_bar(&self, r: f64) -> f64 {
        let p = &self.params;
        if r < p.r1 {
            p.c
        } else if r < p.r2 {
            -1.0
        } else {
            0.0
        }
    }

    pub fn v_theta(&self, r: f64) -> f64 {
        let p = &self.params;
        if r <= p.r1 {
            0.5 * p.c * r
        } else if r <= p.r2 {
            (p.r2 * p.r2 - r * r) / (2.0 * r)
        } else {
            0.0
        }
    }
}

pub fn build_vortex(n: u32, xi: f64, r2: f64) -> Result<(VortexParams, PiecewiseProfiles)> {
    if n < 2 {
        return Err(Error::Domain(
            "symmetry frequency must be at least 2".into(),
        ));
    }
    if !(xi > 0.0 && xi < 1.0) {
        return Err(Error::Domain(format!("xi must lie in (0,1), got {xi}")));
    }
    if !(r2.is_finite() && r2 > 0.0) {
        return Err(Error::Domain(format!(
            "outer radius must be positive, got {r2}"
        )));
    }
    let c = 1.0 / xi - 1.0;
    let params = VortexParams {
        n,
        xi,
        r1: r2 * xi.sqrt(),
        r2,
        c,
        c1: -(1.0 + c),
        c2: 1.0,
    };
    Ok((params, PiecewiseProfiles { params }))
}

/// The 2x2 mode-n interaction matrix, kept split into its diagonal transport
/// part D and nonlocal part C.
#[derive(Debug, Clone, Copy)]
pub struct MatrixA {
    pub d: [[f64; 2]; 2],
    pub c: [[f64; 2]; 2],
}

impl MatrixA {
    pub fn full(&self) -> [[f64; 2]; 2] {
        let mut a = [[0.0; 2]; 2];
        for j in 0..2 {
            for k in 0..2 {
                a[j][k] = self.d[j][k] + self.c[j][k];
            }
        }
        a
    }
}

pub fn matrix_a(p: &VortexParams) -> MatrixA {
    let r = p.radii();
    let cj = p.jumps();
    let dd = p.d_diag();
    let nf = p.n as f64;
    let mut c = [[0.0; 2]; 2];
    for j in 0..2 {
        for k in 0..2 {
            c[j][k] = cj[k] * kn_value(p.n, r[j] / r[k]) / nf;
        }
    }
    MatrixA {
        d: [[dd[0], 0.0], [0.0, dd[1]]],
        c,
    }
}

fn check_poly_domain(n: u32, xi: f64) -> Result<()> {
    if n < 1 {
        return Err(Error::Domain("mode number must be at least 1".into()));
    }
    if !(xi > 0.0 && xi < 1.0) {
        return Err(Error::Domain(format!("xi must lie in (0,1), got {xi}")));
    }
    Ok(())
}

/// Coefficients (b1, b0) of the characteristic polynomial z^2 + b1 z + b0
/// of the interaction matrix; independent of the overall radius scale.
pub fn char_poly(n: u32, xi: f64) -> Result<(f64, f64)> {
    check_poly_domain(n, xi)?;
    let nf = n as f64;
    let b1 = -((nf - 1.0) / nf) * (1.0 - xi) / (2.0 * xi);
    let b0 = (1.0 - xi) / (4.0 * nf * xi) - (1.0 - xi.powi(n as i32)) / (4.0 * nf * nf * xi);
    Ok((b1, b0))
}

/// The discriminant polynomial p_n(xi); the vortex is unstable iff it is
/// negative (the quadratic's discriminant equals p_n(xi)/xi^2).
pub fn discriminant_p(n: u32, xi: f64) -> Result<f64> {
    check_poly_domain(n, xi)?;
    let nf = n as f64;
    let q = (nf - 1.0) / nf;
    Ok(0.25 * q * q * (1.0 - xi) * (1.0 - xi) - xi * (1.0 - xi) / nf
        + xi * (1.0 - xi.powi(n as i32)) / (nf * nf))
}

/// A maximal interval of xi values with p_n < 0, plus a certified sample.
#[derive(Debug, Clone, Copy)]
pub struct UnstableWindow {
    pub lo: f64,
    pub hi: f64,
    pub xi_star: f64,
    pub min_p: f64,
}

/// Scan xi in (0,1) for the instability region of mode n, refining each sign
/// change by bisection to 1e-10 and returning the widest negative interval.
pub fn find_unstable_xi(n: u32) -> Result<UnstableWindow> {
    if n < 1 {
        return Err(Error::Domain("mode number must be at least 1".into()));
    }
    let grid = 2000usize;
    let p_at = |xi: f64| discriminant_p(n, xi).expect("xi inside (0,1)");
    let xs: Vec<f64> = (1..=grid).map(|k| k as f64 / (grid + 1) as f64).collect();
    let ps: Vec<f64> = xs.iter().map(|&x| p_at(x)).collect();
    let min_p = ps.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_p >= 0.0 {
        return Err(Error::InstabilityNotFound(format!(
            "p_{n} is nonnegative on the scan grid; minimum {min_p:.3e}"
        )));
    }
    let bisect = |mut lo: f64, mut hi: f64| {
        // Invariant: sign change between lo and hi.
        let plo = p_at(lo);
        while hi - lo > 1e-10 {
            let mid = 0.5 * (lo + hi);
            if (p_at(mid) < 0.0) == (plo < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    // Collect maximal runs of negative sign; refine their endpoints.
    let mut best: Option<(f64, f64)> = None;
    let mut i = 0;
    while i < xs.len() {
        if ps[i] < 0.0 {
            let start = i;
            while i + 1 < xs.len() && ps[i + 1] < 0.0 {
                i += 1;
            }
            let lo = if start == 0 {
                xs[0]
            } else {
                bisect(xs[start - 1], xs[start])
            };
            let hi = if i == xs.len() - 1 {
                // p_n(1) = 0 with a negative approach for n >= 2: the
                // negative region extends to the open endpoint.
                1.0
            } else {
                bisect(xs[i], xs[i + 1])
            };
            if best.map_or(true, |(l, h)| hi - lo > h - l) {
                best = Some((lo, hi));
            }
        }
        i += 1;
    }
    let (lo, hi) = best.expect("negative minimum implies a negative run");
    Ok(UnstableWindow {
        lo,
        hi,
        xi_star: 0.5 * (lo + hi),
        min_p,
    })
}

/// The unstable eigenvalue and eigenvector of the interaction matrix.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EigenPair {
    pub z: Complex64,
    pub h: [Complex64; 2],
    pub lambda: Complex64,
    pub z2: f64,
}

pub fn eigenpair(p: &VortexParams) -> Result<EigenPair> {
    let (b1, b0) = char_poly(p.n, p.xi)?;
    let disc = b1 * b1 - 4.0 * b0;
    if disc >= 0.0 {
        return Err(Error::InstabilityNotFound(format!(
            "real spectrum: discriminant {disc:.3e} >= 0 at n={}, xi={}",
            p.n, p.xi
        )));
    }
    let z = Complex64::new(-0.5 * b1, 0.5 * (-disc).sqrt());
    let a = matrix_a(p).full();
    // Row 1 of (A - z)h = 0 with h1 = 1; A12 = c2 K_n(r1/r2)/n > 0.
    let h2 = (z - a[0][0]) / a[0][1];
    let n = p.n as f64;
    Ok(EigenPair {
        z,
        h: [Complex64::new(1.0, 0.0), h2],
        lambda: Complex64::new(0.0, -n) * z,
        z2: z.im,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn reference_vortex() -> (VortexParams, PiecewiseProfiles) {
        build_vortex(2, 0.5, SQRT2).unwrap()
    }

    #[test]
    fn reference_parameters() {
        let (p, prof) = reference_vortex();
        assert_eq!(p.c, 1.0);
        assert!((p.r1 - 1.0).abs() < 1e-15);
        assert_eq!(p.c1, -2.0);
        assert_eq!(p.c2, 1.0);
        assert!(((1.0 + p.c) * p.xi - 1.0).abs() < 1e-15);
        assert!((prof.v_theta(p.r1) - 0.5).abs() < 1e-15);
        assert_eq!(prof.v_theta(p.r2), 0.0);
        assert_eq!(prof.w_bar(0.5), 1.0);
        assert_eq!(prof.w_bar(1.2), -1.0);
        assert_eq!(prof.w_bar(2.0), 0.0);
    }

    #[test]
    fn zero_mean_in_closed_form() {
        // Integral of w r dr is c r1^2/2 - (r2^2 - r1^2)/2.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let xi = rng.gen_range(0.05..0.95);
            let r2 = rng.gen_range(0.3..3.0);
            let n = rng.gen_range(2..9);
            let (p, _) = build_vortex(n, xi, r2).unwrap();
            let mean = p.c * p.r1 * p.r1 - (p.r2 * p.r2 - p.r1 * p.r1);
            assert!(mean.abs() < 1e-12 * p.r2 * p.r2 / p.xi);
        }
    }

    #[test]
    fn matrix_entries_at_reference() {
        let (p, _) = reference_vortex();
        let m = matrix_a(&p);
        let a = m.full();
        let e = 1.0 / (4.0 * SQRT2);
        assert!(a[0][0].abs() < 1e-15);
        assert!((a[0][1] - e).abs() < 1e-15);
        assert!((a[1][0] + e).abs() < 1e-15);
        assert!((a[1][1] - 0.25).abs() < 1e-15);
        let trace = a[0][0] + a[1][1];
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        assert!((trace - 0.25).abs() < 1e-15);
        assert!((det - 1.0 / 32.0).abs() < 1e-15);
        assert_eq!(m.d[1][1], 0.0);
        assert_eq!(m.d[0][1], 0.0);
        assert_eq!(m.d[1][0], 0.0);
    }

    #[test]
    fn char_poly_matches_matrix_determinant() {
        let (b1, b0) = char_poly(2, 0.5).unwrap();
        assert!((b1 + 0.25).abs() < 1e-15);
        assert!((b0 - 0.03125).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rng.gen_range(1..9);
            let xi = rng.gen_range(0.02..0.98);
            let r2 = rng.gen_range(0.5..2.0);
            // The polynomial is scale-free; any r2 must give the same answer.
            let c = 1.0 / xi - 1.0;
            let p = VortexParams {
                n,
                xi,
                r1: r2 * xi.sqrt(),
                r2,
                c,
                c1: -(1.0 + c),
                c2: 1.0,
            };
            let a = matrix_a(&p).full();
            let (b1, b0) = char_poly(n, xi).unwrap();
            let trace = a[0][0] + a[1][1];
            let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            assert!((b1 + trace).abs() < 1e-12, "n={n} xi={xi}");
            assert!((b0 - det).abs() < 1e-12, "n={n} xi={xi}");
        }
    }

    #[test]
    fn char_poly_vanishes_toward_unit_xi() {
        let (b1, b0) = char_poly(4, 1.0 - 1e-9).unwrap();
        assert!(b1.abs() < 1e-8);
        assert!(b0.abs() < 1e-8);
    }

    #[test]
    fn discriminant_reference_values() {
        let p = discriminant_p(2, 0.5).unwrap();
        assert!((p + 1.0 / 64.0).abs() < 1e-16);
        for &xi in &[0.1, 0.37, 0.5, 0.9] {
            assert_eq!(discriminant_p(1, xi).unwrap(), 0.0);
        }
        // Discriminant relation to the quadratic coefficients.
        for &(n, xi) in &[(2u32, 0.5), (3, 0.8), (5, 0.95)] {
            let (b1, b0) = char_poly(n, xi).unwrap();
            let p = discriminant_p(n, xi).unwrap();
            assert!((b1 * b1 - 4.0 * b0 - p / (xi * xi)).abs() < 1e-13);
        }
    }

    #[test]
    fn discriminant_curvature_at_unit_xi() {
        // One-sided second difference of p_n toward xi = 1, where p_n -> 0.
        for n in 2..=6u32 {
            let d = 1e-4;
            let p1 = discriminant_p(n, 1.0 - d).unwrap();
            let p2 = discriminant_p(n, 1.0 - 2.0 * d).unwrap();
            let second = (p2 - 2.0 * p1) / (d * d);
            let nf = n as f64;
            let expected = (1.0 - nf * nf) / (2.0 * nf * nf);
            assert!(
                (second - expected).abs() < 2e-3 * expected.abs(),
                "n={n}: {second} vs {expected}"
            );
            assert!(expected < 0.0);
        }
    }

    #[test]
    fn unstable_window_detection() {
        let w = find_unstable_xi(2).unwrap();
        assert!(w.lo < 0.5 && 0.5 < w.hi);
        assert!((w.lo - 0.25).abs() < 1e-9);
        assert!(w.hi > 0.999);
        assert!(discriminant_p(2, w.xi_star).unwrap() < 0.0);

        let w3 = find_unstable_xi(3).unwrap();
        assert!(w3.hi > 0.99);
        assert!(discriminant_p(3, w3.xi_star).unwrap() < 0.0);

        assert!(matches!(
            find_unstable_xi(1),
            Err(Error::InstabilityNotFound(_))
        ));
    }

    #[test]
    fn eigenpair_at_reference() {
        let (p, _) = reference_vortex();
        let ep = eigenpair(&p).unwrap();
        assert!((ep.z - Complex64::new(0.125, 0.125)).norm() < 1e-15);
        assert!((ep.lambda - Complex64::new(0.25, -0.25)).norm() < 1e-15);
        assert_eq!(ep.h[0], Complex64::new(1.0, 0.0));
        let want = Complex64::new(1.0, 1.0) / SQRT2;
        assert!((ep.h[1] - want).norm() < 1e-14);
        assert_eq!(ep.z2, 0.125);
    }

    #[test]
    fn eigenpair_residual_and_conjugate_root() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut seen = 0;
        while seen < 40 {
            let n = rng.gen_range(2..6);
            let xi = rng.gen_range(0.05..0.999);
            if discriminant_p(n, xi).unwrap() >= 0.0 {
                continue;
            }
            seen += 1;
            let (p, _) = build_vortex(n, xi, rng.gen_range(0.5..2.0)).unwrap();
            let ep = eigenpair(&p).unwrap();
            assert!(ep.z.im > 0.0);
            let a = matrix_a(&p).full();
            let norm_a = a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
            let mut res = 0.0f64;
            for j in 0..2 {
                let row = a[j][0] * ep.h[0] + a[j][1] * ep.h[1] - ep.z * ep.h[j];
                res = res.max(row.norm());
            }
            assert!(res <= 1e-12 * (1.0 + norm_a), "residual {res}");
            // The conjugate is the other root of the real quadratic.
            let (b1, b0) = char_poly(p.n, p.xi).unwrap();
            let zc = ep.z.conj();
            assert!((zc * zc + b1 * zc + b0).norm() < 1e-12);
        }
    }

    #[test]
    fn eigenpair_rejects_stable_parameters() {
        let (p, _) = build_vortex(2, 0.1, 1.0).unwrap();
        assert!(discriminant_p(2, 0.1).unwrap() > 0.0);
        assert!(matches!(
            eigenpair(&p),
            Err(Error::InstabilityNotFound(_))
        ));
    }
}
