//! Vortex bundle: one JSON document holding the piecewise construction, the
//! converged correction, and the residual certificate. Loading re-derives
//! the mollifier grid, checks the data digest, and replays the residual
//! computation, so a bundle that loads cleanly is known to be self-consistent.

use ndarray::Array1;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

use unstable_vortex::regularization::{MollifierProfile, RescaledSolution};
use unstable_vortex::verifier::ResidualReport;
use unstable_vortex::vortex::{EigenPair, VortexParams};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
pub struct Bundle {
    pub schema_version: u32,
    pub params: VortexParams,
    pub eigen: EigenPair,
    pub eps: f64,
    pub grid_m: usize,
    pub solution: SolutionRecord,
    pub residual: ResidualRecord,
    pub provenance: Provenance,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub z_eps: Complex64,
    pub y: Complex64,
    pub iterations: usize,
    pub final_update_norm: f64,
    pub defect_norm: f64,
    /// Correction samples, stacked [g_1; g_2] on the mollifier nodes for
    /// grid_m, each as a (re, im) pair.
    pub g: Vec<[f64; 2]>,
    /// SHA-256 over the node coordinates and the g samples.
    pub digest: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ResidualRecord {
    pub sup_norm: f64,
    pub l2_norm: f64,
    pub fine_m: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub config_hash: String,
    pub created_unix: u64,
    pub created_utc: String,
}

pub fn sha256_hex(chunks: impl IntoIterator<Item = impl AsRef<[u8]>>) -> String {
    let mut hasher = Sha256::new();
    for chunk in chunks {
        hasher.update(chunk.as_ref());
    }
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// Digest binding the correction samples to the quadrature grid they live on.
pub fn node_digest(nodes: &[f64], g: &[[f64; 2]]) -> String {
    let node_bytes = nodes.iter().map(|v| v.to_le_bytes());
    let g_bytes = g.iter().flat_map(|p| [p[0].to_le_bytes(), p[1].to_le_bytes()]);
    sha256_hex(node_bytes.chain(g_bytes))
}

pub fn from_solution(
    params: VortexParams,
    eigen: EigenPair,
    sol: &RescaledSolution,
    moll: &MollifierProfile,
    report: &ResidualReport,
    config_hash: String,
) -> Bundle {
    let g: Vec<[f64; 2]> = sol.g.iter().map(|v| [v.re, v.im]).collect();
    let digest = node_digest(&moll.nodes, &g);
    let created_unix = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Bundle {
        schema_version: SCHEMA_VERSION,
        params,
        eigen,
        eps: sol.eps,
        grid_m: sol.grid_m,
        solution: SolutionRecord {
            z_eps: sol.z_eps,
            y: sol.y,
            iterations: sol.iterations,
            final_update_norm: sol.final_update_norm,
            defect_norm: sol.defect_norm,
            g,
            digest,
        },
        residual: ResidualRecord {
            sup_norm: report.sup_norm,
            l2_norm: report.l2_norm,
            fine_m: report.fine_m,
        },
        provenance: Provenance {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash,
            created_unix,
            created_utc: utc_string(created_unix),
        },
    }
}

/// Rebuild the in-memory solution from a loaded bundle. The update history
/// is not stored, so `update_norms` comes back empty.
pub fn reconstruct(bundle: &Bundle, moll: &MollifierProfile) -> RescaledSolution {
    let g: Array1<Complex64> = bundle
        .solution
        .g
        .iter()
        .map(|p| Complex64::new(p[0], p[1]))
        .collect();
    let h = bundle.eigen.h;
    let h_eps = Array1::from_shape_fn(2 * moll.m, |i| h[i / moll.m] + bundle.eps * g[i]);
    RescaledSolution {
        eps: bundle.eps,
        grid_m: bundle.grid_m,
        g,
        y: bundle.solution.y,
        z: bundle.eigen.z,
        h,
        z_eps: bundle.solution.z_eps,
        h_eps,
        iterations: bundle.solution.iterations,
        final_update_norm: bundle.solution.final_update_norm,
        update_norms: Vec::new(),
        defect_norm: bundle.solution.defect_norm,
    }
}

pub fn save(bundle: &Bundle, path: &Path) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(bundle)
        .map_err(|e| format!("cannot serialize bundle: {e}"))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

/// Parse a bundle and run the structural checks that need no numerics.
/// Digest and residual replay happen in the caller, which owns the grids.
pub fn load(path: &Path) -> Result<Bundle, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read bundle {}: {e}", path.display()))?;
    let bundle: Bundle =
        serde_json::from_str(&text).map_err(|e| format!("bundle does not parse: {e}"))?;
    if bundle.schema_version != SCHEMA_VERSION {
        return Err(format!(
            "unsupported bundle schema version {} (expected {})",
            bundle.schema_version, SCHEMA_VERSION
        ));
    }
    if bundle.solution.g.len() != 2 * bundle.grid_m {
        return Err(format!(
            "bundle holds {} correction samples but grid_m = {} needs {}",
            bundle.solution.g.len(),
            bundle.grid_m,
            2 * bundle.grid_m
        ));
    }
    if !(bundle.eps > 0.0) {
        return Err(format!("bundle eps = {} is not positive", bundle.eps));
    }
    Ok(bundle)
}

/// Civil UTC timestamp from Unix seconds (proleptic Gregorian).
fn utc_string(secs: u64) -> String {
    let days = (secs / 86_400) as i64;
    let rem = secs % 86_400;
    let (hh, mm, ss) = (rem / 3600, (rem % 3600) / 60, rem % 60);
    let z = days + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z.rem_euclid(146_097);
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let day = doy - (153 * mp + 2) / 5 + 1;
    let month = if mp < 10 { mp + 3 } else { mp - 9 };
    let year = yoe + era * 400 + i64::from(month <= 2);
    format!("{year:04}-{month:02}-{day:02}T{hh:02}:{mm:02}:{ss:02}Z")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn utc_string_matches_known_dates() {
        assert_eq!(utc_string(0), "1970-01-01T00:00:00Z");
        assert_eq!(utc_string(951_782_400), "2000-02-29T00:00:00Z");
        assert_eq!(utc_string(1_700_000_000), "2023-11-14T22:13:20Z");
    }

    #[test]
    fn json_floats_round_trip_bit_exactly() {
        // The digest check on load depends on this; serde_json only
        // guarantees it with the float_roundtrip feature.
        let vals: [f64; 6] = [0.1, -0.0, 1.0 / 3.0, 6.02e23, 5e-324, 0.12500384629042113];
        for v in vals {
            let s = serde_json::to_string(&v).unwrap();
            let back: f64 = serde_json::from_str(&s).unwrap();
            assert_eq!(v.to_bits(), back.to_bits(), "{v} -> {s} -> {back}");
        }
    }

    #[test]
    fn digest_changes_with_any_sample() {
        let nodes = [0.1, 0.2, 0.3];
        let g = vec![[1.0, 2.0], [3.0, 4.0]];
        let base = node_digest(&nodes, &g);
        let mut tampered = g.clone();
        tampered[1][0] += 1e-12;
        assert_ne!(base, node_digest(&nodes, &tampered));
        assert_eq!(base, node_digest(&nodes, &g));
    }
}
