//! End-to-end acceptance checks. Each test prints a single
//! "ACCEPTANCE <k> <name>: PASS|FAIL" line before asserting, so the
//! suite doubles as a release checklist.

use std::sync::LazyLock;
use std::time::Instant;

use ndarray::{Array1, Array2};
use ndarray_linalg::EigVals;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use unstable_vortex::kernel::{kn_closed, kn_quadrature};
use unstable_vortex::quad;
use unstable_vortex::regularization::{
    build_mollifier, correction_norm, fixed_point, regularized_profiles, rescaled_operators,
    MollifierProfile, RescaledSolution,
};
use unstable_vortex::selfsimilar::continue_in_b;
use unstable_vortex::verifier::{assemble_eigen_field, evolve_linear, rayleigh_residual};
use unstable_vortex::vortex::{
    build_vortex, char_poly, discriminant_p, eigenpair, matrix_a, EigenPair, VortexParams,
};

const SQRT2: f64 = std::f64::consts::SQRT_2;

struct Fixture {
    params: VortexParams,
    pair: EigenPair,
    moll: MollifierProfile,
    /// Converged corrections at eps = 0.02, 0.01, 0.005.
    sols: [RescaledSolution; 3],
}

static FIXTURE: LazyLock<Fixture> = LazyLock::new(|| {
    let (params, _) = build_vortex(2, 0.5, SQRT2).expect("reference vortex");
    let pair = eigenpair(&params).expect("reference eigenpair");
    let moll = build_mollifier(64).expect("mollifier");
    let sols = [0.02, 0.01, 0.005]
        .map(|eps| fixed_point(&params, &pair, &moll, eps, 1e-12, 60).expect("fixed point"));
    Fixture {
        params,
        pair,
        moll,
        sols,
    }
});

fn verdict(k: usize, name: &str, pass: bool, detail: String) {
    println!(
        "ACCEPTANCE {k} {name}: {}  [{detail}]",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "acceptance criterion {k} ({name}) failed: {detail}");
}

#[test]
fn criterion_1_discriminant_value() {
    let t0 = Instant::now();
    let val = discriminant_p(2, 0.5).unwrap();
    let target = -1.0 / 64.0;
    let err = (val - target).abs();
    verdict(
        1,
        "discriminant-value",
        err <= 1e-14,
        format!("p_2(0.5) = {val:.17}, |err| = {err:.2e}, {:?}", t0.elapsed()),
    );
}

#[test]
fn criterion_2_eigenvalue_two_ways() {
    let t0 = Instant::now();
    let (params, _) = build_vortex(2, 0.5, SQRT2).unwrap();
    let pair = eigenpair(&params).unwrap();
    let target = Complex64::new(0.125, 0.125);
    let err_quadratic = (pair.z - target).norm();

    let full = matrix_a(&params).full();
    let dense = Array2::from_shape_fn((2, 2), |(i, j)| full[i][j]);
    let eigs = dense.eigvals().unwrap();
    let err_dense = eigs
        .iter()
        .map(|z| (z - target).norm())
        .fold(f64::INFINITY, f64::min);

    verdict(
        2,
        "eigenvalue-two-ways",
        err_quadratic <= 1e-12 && err_dense <= 1e-12,
        format!(
            "quadratic err {err_quadratic:.2e}, dense err {err_dense:.2e}, {:?}",
            t0.elapsed()
        ),
    );
}

#[test]
fn criterion_3_kernel_oracle() {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    let (lo, hi) = (0.05f64, 20.0f64);
    for n in 1..=8u32 {
        for k in 0..200 {
            let rho = lo * (hi / lo).powf(k as f64 / 199.0);
            if rho > 0.95 && rho < 1.05 {
                continue;
            }
            let closed = kn_closed(n, rho).unwrap();
            let quad_val = kn_quadrature(n, rho, 1e-11).unwrap();
            worst = worst.max((closed - quad_val).abs());
        }
    }
    verdict(
        3,
        "kernel-oracle",
        worst <= 1e-8,
        format!("max |closed - quadrature| = {worst:.2e}, {:?}", t0.elapsed()),
    );
}

#[test]
fn criterion_4_fixed_point_regularization() {
    let t0 = Instant::now();
    let fx = &*FIXTURE;
    let sol = &fx.sols[1];

    let mut geometric = !sol.update_norms.is_empty();
    for w in sol.update_norms.windows(2) {
        if w[0] > 1e-11 && w[1] > 0.6 * w[0] {
            geometric = false;
        }
    }
    let unstable = sol.z_eps.im > 0.0;

    let profiles = regularized_profiles(&fx.params, 0.01).unwrap();
    let report = rayleigh_residual(sol, &profiles, &fx.moll, 256).unwrap();

    let moll128 = build_mollifier(128).unwrap();
    let sol128 = fixed_point(&fx.params, &fx.pair, &moll128, 0.01, 1e-12, 60).unwrap();
    let z_move = (sol128.z_eps - sol.z_eps).norm();

    verdict(
        4,
        "fixed-point-regularization",
        geometric && unstable && report.sup_norm <= 1e-6 && z_move < 1e-8,
        format!(
            "geometric {geometric}, Im z_eps = {:.3e}, residual sup {:.2e}, z move 64->128 {:.2e}, {:?}",
            sol.z_eps.im,
            report.sup_norm,
            z_move,
            t0.elapsed()
        ),
    );
}

#[test]
fn criterion_5_eps_scaling() {
    let t0 = Instant::now();
    let fx = &*FIXTURE;
    let diff = |a: &RescaledSolution, b: &RescaledSolution| {
        correction_norm(&(&a.g - &b.g), a.y - b.y, &fx.moll)
    };
    let d_coarse = diff(&fx.sols[0], &fx.sols[1]);
    let d_fine = diff(&fx.sols[1], &fx.sols[2]);
    let ratio = d_fine / d_coarse;
    verdict(
        5,
        "eps-scaling",
        (0.3..=0.7).contains(&ratio),
        format!(
            "|d(0.01,0.005)|/|d(0.02,0.01)| = {ratio:.4} (d = {d_fine:.3e}/{d_coarse:.3e}), {:?}",
            t0.elapsed()
        ),
    );
}

#[test]
fn criterion_6_linear_growth_law() {
    let t0 = Instant::now();
    let fx = &*FIXTURE;
    let sol = &fx.sols[1];
    let profiles = regularized_profiles(&fx.params, 0.01).unwrap();
    let field = assemble_eigen_field(sol, &profiles, &fx.moll, 256).unwrap();
    let expected = fx.params.n as f64 * sol.z_eps.im;
    let fit = evolve_linear(&field, &profiles, 20.0, None, expected).unwrap();
    verdict(
        6,
        "linear-growth-law",
        fit.relative_error <= 0.02,
        format!(
            "fitted {:.8} vs expected {:.8}, rel err {:.2e}, dt {:.5}, {} steps, {:?}",
            fit.fitted_rate,
            expected,
            fit.relative_error,
            fit.dt,
            fit.steps,
            t0.elapsed()
        ),
    );
}

#[test]
fn criterion_7_self_similar_continuation() {
    let t0 = Instant::now();
    let fx = &*FIXTURE;
    let sol = &fx.sols[1];
    let profiles = regularized_profiles(&fx.params, 0.01).unwrap();
    let lam0 = Complex64::new(0.0, -(fx.params.n as f64)) * sol.z_eps;
    let bs = [0.0, 0.0025, 0.005, 0.0075, 0.01];
    let table = continue_in_b(&bs, 0.5, 3.0, &profiles, lam0, 512, 2.0).unwrap();

    let complete = table.loss.is_none() && table.points.len() == bs.len();
    let mut gates = complete;
    let mut detail = String::new();
    for pt in &table.points {
        if pt.b == 0.0 {
            continue;
        }
        let drift = (pt.lambda - lam0).norm();
        if drift > 10.0 * pt.b || !pt.satisfied {
            gates = false;
        }
        detail.push_str(&format!(
            "b={}: |dlam|={:.4} (gate {:.3}), re_gap={:.4}; ",
            pt.b,
            drift,
            10.0 * pt.b,
            pt.re_gap
        ));
    }
    verdict(
        7,
        "self-similar-continuation",
        gates,
        format!("complete {complete}; {detail}{:?}", t0.elapsed()),
    );
}

fn linearity_defect(
    apply: &dyn Fn(&Array1<Complex64>) -> Array1<Complex64>,
    len: usize,
    pairs: usize,
    seed: u64,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        Array1::from_shape_fn(len, |_| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    };
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let u = draw(&mut rng);
        let v = draw(&mut rng);
        let a = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let b = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let combo = &(&u * a) + &(&v * b);
        let lhs = apply(&combo);
        let rhs = &(&apply(&u) * a) + &(&apply(&v) * b);
        let scale = lhs.iter().fold(1.0f64, |acc, z| acc.max(z.norm()));
        let defect = lhs
            .iter()
            .zip(rhs.iter())
            .fold(0.0f64, |acc, (x, y)| acc.max((x - y).norm()));
        worst = worst.max(defect / scale);
    }
    worst
}

#[test]
fn criterion_8_property_suites() {
    let t0 = Instant::now();
    let fx = &*FIXTURE;
    let mut all = true;
    let mut detail = String::new();

    // Linearity of the zoomed operators and the evolution matrix.
    {
        let moll = build_mollifier(32).unwrap();
        let ops = rescaled_operators(&fx.params, &moll, 0.01).unwrap();
        let defect_a = linearity_defect(
            &|g| unstable_vortex::regularization::apply_a(g, &fx.params, &moll).unwrap(),
            64,
            100,
            11,
        );
        let defect_b = linearity_defect(
            &|g| unstable_vortex::regularization::apply_b(g, &ops, &moll).unwrap(),
            64,
            100,
            12,
        );
        let profiles = regularized_profiles(&fx.params, 0.01).unwrap();
        let grid: Vec<f64> = (0..128)
            .map(|i| 0.05 + (1.6 - 0.05) * i as f64 / 127.0)
            .collect();
        let l = unstable_vortex::verifier::linearized_matrix(&grid, &profiles);
        let defect_l = linearity_defect(&|g| l.dot(g), 128, 100, 13);
        let ok = defect_a <= 1e-12 && defect_b <= 1e-12 && defect_l <= 1e-12;
        all &= ok;
        detail.push_str(&format!(
            "linearity A/B/L {defect_a:.1e}/{defect_b:.1e}/{defect_l:.1e}; "
        ));
    }

    // Zero mean of the vorticity: closed form and the smoothed profile.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut worst_closed = 0.0f64;
        for _ in 0..100 {
            let xi = rng.gen_range(0.05..0.95);
            let r2 = rng.gen_range(0.5..3.0);
            let (p, _) = build_vortex(rng.gen_range(2..6), xi, r2).unwrap();
            let mean = p.c * p.r1 * p.r1 - (p.r2 * p.r2 - p.r1 * p.r1);
            worst_closed = worst_closed.max(mean.abs() / (r2 * r2));
        }
        let mut worst_smooth = 0.0f64;
        for seed in 0..12 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let xi = rng.gen_range(0.2..0.8);
            let r2 = rng.gen_range(0.8..2.0);
            let (p, _) = build_vortex(2, xi, r2).unwrap();
            let eps = 0.3 * unstable_vortex::regularization::eps_bound(&p);
            let profiles = regularized_profiles(&p, eps).unwrap();
            let breaks = [
                0.0,
                p.r1 - eps,
                p.r1,
                p.r1 + eps,
                p.r2 - eps,
                p.r2,
                p.r2 + eps,
            ];
            let mass = quad::adaptive(&|r| profiles.w_bar(r) * r, &breaks, 1e-13).unwrap();
            worst_smooth = worst_smooth.max(mass.abs() / (r2 * r2));
        }
        let ok = worst_closed <= 1e-12 && worst_smooth <= 1e-10;
        all &= ok;
        detail.push_str(&format!(
            "zero-mean closed/smooth {worst_closed:.1e}/{worst_smooth:.1e}; "
        ));
    }

    // Conjugate-pair symmetry: quadratic roots and a dense spectrum.
    {
        let (b1, b0) = char_poly(fx.params.n, fx.params.xi).unwrap();
        let residual_at = |z: Complex64| (z * z + b1 * z + b0).norm();
        let quad_ok = residual_at(fx.pair.z) <= 1e-14 && residual_at(fx.pair.z.conj()) <= 1e-14;

        let moll = build_mollifier(32).unwrap();
        let ops = rescaled_operators(&fx.params, &moll, 0.01).unwrap();
        let system = &ops.a_mat + &(&ops.b_mat * Complex64::from(0.01));
        let spec = system.eigvals().unwrap().to_vec();
        let conj_spec = system.mapv(|v| v.conj()).eigvals().unwrap().to_vec();
        let scale = spec.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
        let mut worst_pair = 0.0f64;
        for z in &conj_spec {
            let gap = spec
                .iter()
                .map(|w| (w.conj() - z).norm())
                .fold(f64::INFINITY, f64::min);
            worst_pair = worst_pair.max(gap);
        }
        let ok = quad_ok && worst_pair <= 1e-8 * scale;
        all &= ok;
        detail.push_str(&format!("conjugate pairs {worst_pair:.1e}; "));
    }

    // Mollifier identities by adaptive quadrature.
    {
        let radii = fx.params.radii();
        let eta_bar_mass = quad::adaptive(
            &unstable_vortex::regularization::eta_bar_at,
            &[-1.0, 0.0, 1.0],
            1e-14,
        )
        .unwrap();
        let mut worst_zeta = 0.0f64;
        for &r_j in &radii {
            let m = quad::adaptive(
                &|a| unstable_vortex::regularization::zeta_at(a, r_j, 0.01),
                &[-1.0, 0.0, 1.0],
                1e-14,
            )
            .unwrap();
            worst_zeta = worst_zeta.max(m.abs());
        }
        let ok = (eta_bar_mass - 1.0).abs() <= 1e-12 && worst_zeta <= 1e-12;
        all &= ok;
        detail.push_str(&format!(
            "masses |1-int eta_bar| {:.1e}, zeta {worst_zeta:.1e}; ",
            (eta_bar_mass - 1.0).abs()
        ));
    }

    // Determinism: two fresh builds agree bit for bit.
    {
        let build_once = || {
            let (p, _) = build_vortex(2, 0.5, SQRT2).unwrap();
            let ep = eigenpair(&p).unwrap();
            let moll = build_mollifier(48).unwrap();
            let sol = fixed_point(&p, &ep, &moll, 0.01, 1e-12, 60).unwrap();
            let profiles = regularized_profiles(&p, 0.01).unwrap();
            let rep = rayleigh_residual(&sol, &profiles, &moll, 192).unwrap();
            let mut bits: Vec<u64> = vec![
                sol.z_eps.re.to_bits(),
                sol.z_eps.im.to_bits(),
                sol.y.re.to_bits(),
                sol.y.im.to_bits(),
                rep.sup_norm.to_bits(),
                rep.l2_norm.to_bits(),
            ];
            bits.extend(sol.g.iter().flat_map(|v| [v.re.to_bits(), v.im.to_bits()]));
            bits
        };
        let ok = build_once() == build_once();
        all &= ok;
        detail.push_str(&format!("determinism {ok}; "));
    }

    verdict(
        8,
        "property-suites",
        all,
        format!("{detail}{:?}", t0.elapsed()),
    );
}
