//! Command-line driver: scan for unstable windows, build smoothed unstable
//! vortices into bundles, re-verify their growth rate, and continue the
//! unstable eigenvalue of the self-similar operator in b.
//!
//! Exit codes: 0 success, 1 internal numerical failure, 2 no instability
//! (or certification below threshold), 3 contraction failure, 4 degenerate
//! growth fit, 5 branch loss, 64 usage error, 65 corrupt bundle.

mod bundle;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use unstable_vortex::regularization::{
    build_mollifier, fixed_point, regularized_profiles, MollifierProfile, RegularizedProfiles,
    RescaledSolution,
};
use unstable_vortex::selfsimilar::{continue_in_b, ContinuationTable};
use unstable_vortex::verifier::{assemble_eigen_field, evolve_linear, rayleigh_residual, GrowthFit};
use unstable_vortex::vortex::{
    build_vortex, discriminant_p, eigenpair, find_unstable_xi, UnstableWindow,
};
use unstable_vortex::Error as CoreError;

use config::FileConfig;

const EXIT_FAILED: u8 = 1;
const EXIT_NOT_FOUND: u8 = 2;
const EXIT_CONTRACTION: u8 = 3;
const EXIT_DEGENERATE: u8 = 4;
const EXIT_BRANCH_LOSS: u8 = 5;
const EXIT_USAGE: u8 = 64;
const EXIT_CORRUPT: u8 = 65;

const DEFAULT_BUNDLE: &str = "vortex_bundle.json";
const DEFAULT_B_LIST: [f64; 5] = [0.0, 0.0025, 0.005, 0.0075, 0.01];

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn exit_for(err: &CoreError) -> u8 {
    match err {
        CoreError::Domain(_) | CoreError::NodeMismatch { .. } => EXIT_USAGE,
        CoreError::InstabilityNotFound(_) | CoreError::InstabilityLost { .. } => EXIT_NOT_FOUND,
        CoreError::ContractionFailure { .. } => EXIT_CONTRACTION,
        CoreError::DegenerateFit(_) => EXIT_DEGENERATE,
        CoreError::BranchLoss { .. } => EXIT_BRANCH_LOSS,
        CoreError::Numerical(_) => EXIT_FAILED,
    }
}

fn map_core(err: CoreError) -> Failure {
    fail(exit_for(&err), err.to_string())
}

#[derive(Parser)]
#[command(
    name = "unstable-vortex",
    version,
    about = "Construct and certify unstable compactly supported vortices for forced 2D Euler"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate the instability discriminant over xi and report the unstable window.
    Scan(ScanArgs),
    /// Build a smoothed unstable vortex and write it as a bundle.
    Build(BuildArgs),
    /// Re-verify a bundle by evolving the linearized equation and fitting the growth rate.
    Verify(VerifyArgs),
    /// Continue the unstable eigenvalue of the self-similar operator in b.
    Selfsim(SelfsimArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct ScanArgs {
    /// Angular mode number (default 2).
    #[arg(long)]
    n: Option<u32>,
    /// Number of interior xi samples in the table (default 200).
    #[arg(long = "xi-grid")]
    xi_grid: Option<usize>,
    /// Output format (default text).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the table to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat key=value config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    /// Flat key=value config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Angular mode number (default 2).
    #[arg(long)]
    n: Option<u32>,
    /// Area ratio (r1/r2)^2 in (0,1) (default 0.5).
    #[arg(long)]
    xi: Option<f64>,
    /// Outer jump radius (default sqrt(2)).
    #[arg(long)]
    r2: Option<f64>,
    /// Collar half-width (default 0.01).
    #[arg(long)]
    eps: Option<f64>,
    /// Quadrature nodes per collar (default 64).
    #[arg(long = "grid-m")]
    grid_m: Option<usize>,
    /// Fixed-point stopping tolerance (default 1e-12).
    #[arg(long)]
    tol: Option<f64>,
    /// Fixed-point iteration cap (default 60).
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    /// Bundle output path (default vortex_bundle.json).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format for the summary (default text).
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Bundle to verify (default vortex_bundle.json).
    bundle: Option<PathBuf>,
    /// Flat key=value config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Evolution horizon (default 20).
    #[arg(long = "t-final")]
    t_final: Option<f64>,
    /// Time step; derived from the operator norms when omitted.
    #[arg(long)]
    dt: Option<f64>,
    /// Output format (default text).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Evolve the zero field instead of the eigenfunction.
    #[arg(long = "zero-field", hide = true)]
    zero_field: bool,
}

#[derive(Args)]
struct SelfsimArgs {
    /// Bundle providing the regularized vortex (default vortex_bundle.json).
    bundle: Option<PathBuf>,
    /// Flat key=value config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated b values, starting at 0, strictly increasing
    /// (default 0,0.0025,0.005,0.0075,0.01).
    #[arg(long = "b-list")]
    b_list: Option<String>,
    /// Self-similar decay exponent (default 0.5).
    #[arg(long)]
    a: Option<f64>,
    /// Integrability exponent the growth condition is checked against (default 3).
    #[arg(long)]
    p: Option<f64>,
    /// Outer truncation radius of the radial grid (default 2).
    #[arg(long)]
    rmax: Option<f64>,
    /// Radial grid budget (default 512).
    #[arg(long = "grid-m")]
    grid_m: Option<usize>,
    /// Output format (default text).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the table to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    if let Err(f) = setup_threads() {
        eprintln!("error: {}", f.message);
        return ExitCode::from(f.code);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(EXIT_USAGE)
                }
            };
        }
    };
    let outcome = match cli.cmd {
        Cmd::Scan(args) => run_scan(args),
        Cmd::Build(args) => run_build(args),
        Cmd::Verify(args) => run_verify(args),
        Cmd::Selfsim(args) => run_selfsim(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn setup_threads() -> Result<(), Failure> {
    if std::env::var_os("OPENBLAS_NUM_THREADS").is_none() {
        std::env::set_var("OPENBLAS_NUM_THREADS", "1");
    }
    if let Some(raw) = std::env::var_os("UNSTABLE_VORTEX_THREADS") {
        let text = raw.to_string_lossy();
        let k: usize = text
            .trim()
            .parse()
            .map_err(|_| fail(EXIT_USAGE, format!("UNSTABLE_VORTEX_THREADS = {text:?} is not a positive integer")))?;
        if k == 0 {
            return Err(fail(EXIT_USAGE, "UNSTABLE_VORTEX_THREADS must be at least 1"));
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    Ok(())
}

fn load_file_config(path: &Option<PathBuf>) -> Result<FileConfig, Failure> {
    match path {
        Some(p) => config::load(p).map_err(|m| fail(EXIT_USAGE, m)),
        None => Ok(FileConfig::default()),
    }
}

fn resolve_format(flag: Option<Format>, cfg: &FileConfig) -> Result<Format, Failure> {
    if let Some(f) = flag {
        return Ok(f);
    }
    match cfg.format.as_deref() {
        None => Ok(Format::Text),
        Some(s) => <Format as ValueEnum>::from_str(s, true).map_err(|_| {
            fail(EXIT_USAGE, format!("config format {s:?} is not one of text, json, csv"))
        }),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| fail(EXIT_FAILED, format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fmt_complex(z: Complex64) -> String {
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{:.12} {} {:.12}i", z.re, sign, z.im.abs())
}

fn to_json(value: &impl Serialize) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| fail(EXIT_FAILED, format!("cannot serialize output: {e}")))
}

#[derive(Serialize)]
struct WindowOut {
    lo: f64,
    hi: f64,
    xi_star: f64,
    min_p: f64,
}

impl From<&UnstableWindow> for WindowOut {
    fn from(w: &UnstableWindow) -> Self {
        WindowOut {
            lo: w.lo,
            hi: w.hi,
            xi_star: w.xi_star,
            min_p: w.min_p,
        }
    }
}

#[derive(Serialize)]
struct ScanRow {
    xi: f64,
    p: f64,
}

#[derive(Serialize)]
struct ScanOut {
    n: u32,
    rows: Vec<ScanRow>,
    window: Option<WindowOut>,
}

fn run_scan(args: ScanArgs) -> Result<u8, Failure> {
    let cfg = load_file_config(&args.config)?;
    let n = args.n.or(cfg.n).unwrap_or(2);
    let resolution = args.xi_grid.unwrap_or(200);
    if resolution < 1 {
        return Err(fail(EXIT_USAGE, "xi-grid must be at least 1"));
    }
    let format = resolve_format(args.format, &cfg)?;

    let mut rows = Vec::with_capacity(resolution);
    for k in 1..=resolution {
        let xi = k as f64 / (resolution + 1) as f64;
        let p = discriminant_p(n, xi).map_err(map_core)?;
        rows.push(ScanRow { xi, p });
    }
    let window = match find_unstable_xi(n) {
        Ok(w) => Some(w),
        Err(CoreError::InstabilityNotFound(_)) => None,
        Err(e) => return Err(map_core(e)),
    };

    let text = match format {
        Format::Text => {
            let mut s = format!("discriminant scan for mode n = {n}\n");
            s.push_str(&format!("{:>12}  {:>24}\n", "xi", "p_n(xi)"));
            for r in &rows {
                s.push_str(&format!("{:>12.8}  {:>24.16e}\n", r.xi, r.p));
            }
            match &window {
                Some(w) => s.push_str(&format!(
                    "unstable window: xi in ({:.10}, {:.10}), deepest p = {:.6e} at xi = {:.10}\n",
                    w.lo, w.hi, w.min_p, w.xi_star
                )),
                None => s.push_str("no unstable window for this mode\n"),
            }
            s
        }
        Format::Json => to_json(&ScanOut {
            n,
            rows,
            window: window.as_ref().map(WindowOut::from),
        })?,
        Format::Csv => {
            let mut s = String::from("xi,p\n");
            for r in &rows {
                s.push_str(&format!("{:.16e},{:.16e}\n", r.xi, r.p));
            }
            match &window {
                Some(w) => eprintln!(
                    "unstable window: xi in ({:.10}, {:.10}), deepest p = {:.6e} at xi = {:.10}",
                    w.lo, w.hi, w.min_p, w.xi_star
                ),
                None => eprintln!("no unstable window for this mode"),
            }
            s
        }
    };
    emit(&args.out, &text)?;
    Ok(if window.is_some() { 0 } else { EXIT_NOT_FOUND })
}

#[derive(Serialize)]
struct BuildOut {
    n: u32,
    xi: f64,
    r2: f64,
    eps: f64,
    grid_m: usize,
    z: Complex64,
    z_eps: Complex64,
    lambda: Complex64,
    lambda_eps: Complex64,
    iterations: usize,
    final_update_norm: f64,
    defect_norm: f64,
    residual_sup: f64,
    residual_l2: f64,
    fine_m: usize,
    bundle: String,
}

fn run_build(args: BuildArgs) -> Result<u8, Failure> {
    let cfg = load_file_config(&args.config)?;
    let n = args.n.or(cfg.n).unwrap_or(2);
    let xi = args.xi.or(cfg.xi).unwrap_or(0.5);
    let r2 = args.r2.or(cfg.r2).unwrap_or(std::f64::consts::SQRT_2);
    let eps = args.eps.or(cfg.eps).unwrap_or(0.01);
    let grid_m = args.grid_m.or(cfg.grid_m).unwrap_or(64);
    let tol = args.tol.or(cfg.tol).unwrap_or(1e-12);
    let max_iter = args.max_iter.or(cfg.max_iter).unwrap_or(60);
    let out = args
        .out
        .or(cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_BUNDLE));
    let format = resolve_format(args.format, &cfg)?;

    let (params, _) = build_vortex(n, xi, r2).map_err(map_core)?;
    let pair = eigenpair(&params).map_err(map_core)?;
    let profiles = regularized_profiles(&params, eps).map_err(map_core)?;
    let moll = build_mollifier(grid_m).map_err(map_core)?;
    let sol = fixed_point(&params, &pair, &moll, eps, tol, max_iter).map_err(map_core)?;
    let report = rayleigh_residual(&sol, &profiles, &moll, 4 * grid_m).map_err(map_core)?;

    let config_hash = bundle::sha256_hex([format!(
        "n={n}\nxi={xi:?}\nr2={r2:?}\neps={eps:?}\ngrid_m={grid_m}\ntol={tol:?}\nmax_iter={max_iter}\n"
    )]);
    let doc = bundle::from_solution(params, pair, &sol, &moll, &report, config_hash);
    bundle::save(&doc, &out).map_err(|m| fail(EXIT_FAILED, m))?;

    let minus_in = Complex64::new(0.0, -f64::from(n));
    let summary = BuildOut {
        n,
        xi,
        r2,
        eps,
        grid_m,
        z: pair.z,
        z_eps: sol.z_eps,
        lambda: pair.lambda,
        lambda_eps: minus_in * sol.z_eps,
        iterations: sol.iterations,
        final_update_norm: sol.final_update_norm,
        defect_norm: sol.defect_norm,
        residual_sup: report.sup_norm,
        residual_l2: report.l2_norm,
        fine_m: report.fine_m,
        bundle: out.display().to_string(),
    };
    let text = match format {
        Format::Text => {
            let mut s = format!(
                "vortex build: n = {n}, xi = {xi}, r2 = {r2:.12}, eps = {eps}, grid_m = {grid_m}\n"
            );
            s.push_str(&format!("z          = {}\n", fmt_complex(summary.z)));
            s.push_str(&format!("z_eps      = {}\n", fmt_complex(summary.z_eps)));
            s.push_str(&format!("lambda     = {}\n", fmt_complex(summary.lambda)));
            s.push_str(&format!("lambda_eps = {}\n", fmt_complex(summary.lambda_eps)));
            s.push_str(&format!(
                "fixed point: {} iterations, final update {:.3e}, defect {:.3e}\n",
                summary.iterations, summary.final_update_norm, summary.defect_norm
            ));
            s.push_str(&format!(
                "residual: sup {:.6e}, weighted l2 {:.6e}, fine grid {}\n",
                summary.residual_sup, summary.residual_l2, summary.fine_m
            ));
            s.push_str(&format!("bundle written to {}\n", summary.bundle));
            s
        }
        Format::Json => to_json(&summary)?,
        Format::Csv => {
            let mut s = String::from("key,value\n");
            s.push_str(&format!("z_re,{:.16e}\n", summary.z.re));
            s.push_str(&format!("z_im,{:.16e}\n", summary.z.im));
            s.push_str(&format!("z_eps_re,{:.16e}\n", summary.z_eps.re));
            s.push_str(&format!("z_eps_im,{:.16e}\n", summary.z_eps.im));
            s.push_str(&format!("lambda_eps_re,{:.16e}\n", summary.lambda_eps.re));
            s.push_str(&format!("lambda_eps_im,{:.16e}\n", summary.lambda_eps.im));
            s.push_str(&format!("iterations,{}\n", summary.iterations));
            s.push_str(&format!("residual_sup,{:.16e}\n", summary.residual_sup));
            s.push_str(&format!("residual_l2,{:.16e}\n", summary.residual_l2));
            s
        }
    };
    print!("{text}");
    Ok(0)
}

struct LoadedBundle {
    bundle: bundle::Bundle,
    sol: RescaledSolution,
    profiles: RegularizedProfiles,
    moll: MollifierProfile,
}

/// Load a bundle and prove it is the bundle we wrote: rebuild the quadrature
/// grid, check the data digest, then replay the residual computation and
/// demand the stored sup norm back to 1e-10.
fn open_bundle(path: &Path) -> Result<LoadedBundle, Failure> {
    let doc = bundle::load(path).map_err(|m| fail(EXIT_CORRUPT, m))?;
    let moll = build_mollifier(doc.grid_m)
        .map_err(|e| fail(EXIT_CORRUPT, format!("bundle grid is unusable: {e}")))?;
    let digest = bundle::node_digest(&moll.nodes, &doc.solution.g);
    if digest != doc.solution.digest {
        return Err(fail(
            EXIT_CORRUPT,
            format!(
                "bundle digest mismatch: stored {}, computed {digest}",
                doc.solution.digest
            ),
        ));
    }
    let profiles = regularized_profiles(&doc.params, doc.eps)
        .map_err(|e| fail(EXIT_CORRUPT, format!("bundle parameters are inconsistent: {e}")))?;
    let sol = bundle::reconstruct(&doc, &moll);
    let replay = rayleigh_residual(&sol, &profiles, &moll, doc.residual.fine_m)
        .map_err(|e| fail(EXIT_CORRUPT, format!("bundle residual replay failed: {e}")))?;
    let drift = (replay.sup_norm - doc.residual.sup_norm).abs();
    if drift > 1e-10 {
        return Err(fail(
            EXIT_CORRUPT,
            format!(
                "bundle residual mismatch: stored sup {:.16e}, replayed {:.16e}",
                doc.residual.sup_norm, replay.sup_norm
            ),
        ));
    }
    Ok(LoadedBundle {
        bundle: doc,
        sol,
        profiles,
        moll,
    })
}

#[derive(Serialize)]
struct VerifyOut {
    bundle: String,
    t_final: f64,
    dt: f64,
    steps: usize,
    fitted_rate: f64,
    expected_rate: f64,
    relative_error: f64,
    pass: bool,
}

fn run_verify(args: VerifyArgs) -> Result<u8, Failure> {
    let cfg = load_file_config(&args.config)?;
    let path = args
        .bundle
        .unwrap_or_else(|| PathBuf::from(DEFAULT_BUNDLE));
    let t_final = args.t_final.or(cfg.t_final).unwrap_or(20.0);
    let dt = args.dt.or(cfg.dt);
    let format = resolve_format(args.format, &cfg)?;

    let loaded = open_bundle(&path)?;
    let mut field =
        assemble_eigen_field(&loaded.sol, &loaded.profiles, &loaded.moll, 256).map_err(map_core)?;
    if args.zero_field {
        field.values.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
    }
    let expected = f64::from(loaded.bundle.params.n) * loaded.sol.z_eps.im;

    let fit: GrowthFit = match evolve_linear(&field, &loaded.profiles, t_final, dt, expected) {
        Ok(fit) => fit,
        Err(e @ CoreError::DegenerateFit(_)) => {
            eprintln!("warning: {e}");
            return Ok(EXIT_DEGENERATE);
        }
        Err(e) => return Err(map_core(e)),
    };
    let pass = fit.relative_error <= 0.05;
    let summary = VerifyOut {
        bundle: path.display().to_string(),
        t_final,
        dt: fit.dt,
        steps: fit.steps,
        fitted_rate: fit.fitted_rate,
        expected_rate: fit.expected_rate,
        relative_error: fit.relative_error,
        pass,
    };
    let text = match format {
        Format::Text => {
            let mut s = format!("growth verification for {}\n", summary.bundle);
            s.push_str(&format!("expected rate  = {:.12e}\n", summary.expected_rate));
            s.push_str(&format!("fitted rate    = {:.12e}\n", summary.fitted_rate));
            s.push_str(&format!(
                "relative error = {:.6e} (tolerance 5e-2)\n",
                summary.relative_error
            ));
            s.push_str(&format!(
                "dt = {:.6e}, steps = {}, horizon = {}\n",
                summary.dt, summary.steps, summary.t_final
            ));
            s.push_str(if pass { "PASS\n" } else { "FAIL\n" });
            s
        }
        Format::Json => to_json(&summary)?,
        Format::Csv => {
            let mut s =
                String::from("t_final,dt,steps,fitted_rate,expected_rate,relative_error,pass\n");
            s.push_str(&format!(
                "{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e},{}\n",
                summary.t_final,
                summary.dt,
                summary.steps,
                summary.fitted_rate,
                summary.expected_rate,
                summary.relative_error,
                summary.pass
            ));
            s
        }
    };
    print!("{text}");
    Ok(if pass { 0 } else { EXIT_NOT_FOUND })
}

#[derive(Serialize)]
struct SelfsimOut<'a> {
    a: f64,
    p: f64,
    rmax: f64,
    grid_m: usize,
    lambda0: Complex64,
    #[serde(flatten)]
    table: &'a ContinuationTable,
}

fn run_selfsim(args: SelfsimArgs) -> Result<u8, Failure> {
    let cfg = load_file_config(&args.config)?;
    let path = args
        .bundle
        .unwrap_or_else(|| PathBuf::from(DEFAULT_BUNDLE));
    let bs: Vec<f64> = match (&args.b_list, &cfg.b_list) {
        (Some(s), _) => config::parse_b_list(s).map_err(|m| fail(EXIT_USAGE, m))?,
        (None, Some(v)) => v.clone(),
        (None, None) => DEFAULT_B_LIST.to_vec(),
    };
    let a = args.a.or(cfg.a).unwrap_or(0.5);
    let p_exp = args.p.or(cfg.p).unwrap_or(3.0);
    let rmax = args.rmax.or(cfg.rmax).unwrap_or(2.0);
    let grid_m = args.grid_m.or(cfg.grid_m).unwrap_or(512);
    let format = resolve_format(args.format, &cfg)?;

    let loaded = open_bundle(&path)?;
    let n = loaded.bundle.params.n;
    let lam0 = Complex64::new(0.0, -f64::from(n)) * loaded.sol.z_eps;
    let table =
        continue_in_b(&bs, a, p_exp, &loaded.profiles, lam0, grid_m, rmax).map_err(map_core)?;

    let text = match format {
        Format::Text => {
            let mut s = format!(
                "self-similar continuation: a = {a}, p = {p_exp}, rmax = {rmax}, grid_m = {grid_m}\n"
            );
            s.push_str(&format!("lambda_0 = {}\n", fmt_complex(lam0)));
            s.push_str(&format!(
                "{:>10}  {:>22}  {:>22}  {:>12}  {:>12}  {:>12}  {:>9}\n",
                "b", "Re(lambda)", "Im(lambda)", "re_gap", "step_disc", "radius", "satisfied"
            ));
            for pt in &table.points {
                s.push_str(&format!(
                    "{:>10.6}  {:>22.14e}  {:>22.14e}  {:>12.4e}  {:>12.4e}  {:>12.4e}  {:>9}\n",
                    pt.b, pt.lambda.re, pt.lambda.im, pt.re_gap, pt.disc_estimate, pt.radius,
                    pt.satisfied
                ));
            }
            s
        }
        Format::Json => to_json(&SelfsimOut {
            a,
            p: p_exp,
            rmax,
            grid_m,
            lambda0: lam0,
            table: &table,
        })?,
        Format::Csv => {
            let mut s =
                String::from("b,lambda_re,lambda_im,re_gap,disc_estimate,radius,satisfied\n");
            for pt in &table.points {
                s.push_str(&format!(
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
                    pt.b, pt.lambda.re, pt.lambda.im, pt.re_gap, pt.disc_estimate, pt.radius,
                    pt.satisfied
                ));
            }
            s
        }
    };
    emit(&args.out, &text)?;

    if let Some(loss) = &table.loss {
        eprintln!(
            "branch lost at b = {}: nearest eigenvalue {} at distance {:.3e} exceeds radius {:.3e}",
            loss.b,
            fmt_complex(loss.nearest),
            loss.distance,
            loss.radius
        );
        return Ok(EXIT_BRANCH_LOSS);
    }
    let certified = table.points.iter().any(|pt| pt.b > 0.0 && pt.satisfied);
    Ok(if certified { 0 } else { EXIT_NOT_FOUND })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_errors_map_to_documented_codes() {
        assert_eq!(exit_for(&CoreError::Domain("x".into())), 64);
        assert_eq!(exit_for(&CoreError::NodeMismatch { expected: 1, got: 2 }), 64);
        assert_eq!(exit_for(&CoreError::InstabilityNotFound("x".into())), 2);
        assert_eq!(exit_for(&CoreError::InstabilityLost { eps: 0.1, im_z: -1.0 }), 2);
        assert_eq!(
            exit_for(&CoreError::ContractionFailure {
                iterations: 3,
                last_updates: vec![]
            }),
            3
        );
        assert_eq!(exit_for(&CoreError::DegenerateFit("x".into())), 4);
        assert_eq!(
            exit_for(&CoreError::BranchLoss {
                b: 0.1,
                nearest: Complex64::new(0.0, 0.0),
                distance: 1.0,
                radius: 0.1
            }),
            5
        );
        assert_eq!(exit_for(&CoreError::Numerical("x".into())), 1);
    }

    #[test]
    fn complex_formatting_reads_naturally() {
        assert_eq!(
            fmt_complex(Complex64::new(0.125, -0.25)),
            "0.125000000000 - 0.250000000000i"
        );
    }
}
