//! Flat key=value run configuration. Flags always override file values;
//! unknown keys are rejected so typos fail loudly.

use std::path::{Path, PathBuf};

#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    pub n: Option<u32>,
    pub xi: Option<f64>,
    pub r2: Option<f64>,
    pub eps: Option<f64>,
    pub grid_m: Option<usize>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub b_list: Option<Vec<f64>>,
    pub a: Option<f64>,
    pub p: Option<f64>,
    pub rmax: Option<f64>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
}

pub fn parse_b_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<f64>()
                .map_err(|_| format!("b-list entry {tok:?} is not a number"))
        })
        .collect()
}

pub fn load(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut cfg = FileConfig::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value, got {raw:?}", lineno + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |what: &str| format!("config line {}: {what} for key {key:?}: {value:?}", lineno + 1);
        match key {
            "n" => cfg.n = Some(value.parse().map_err(|_| bad("invalid integer"))?),
            "xi" => cfg.xi = Some(value.parse().map_err(|_| bad("invalid number"))?),
            "r2" => cfg.r2 = Some(value.parse().map_err(|_| bad("invalid number"))?),
            "eps" => cfg.eps = Some(value.parse().map_err(|_| bad("invalid number"))?),
            "grid_m" => cfg.grid_m = Some(value.parse().map_err(|_| bad("invalid integer"))?),
            "tol" => cfg.tol = Some(value.parse().map_err(|_| bad("invalid number"))?),
            "max_iter" => cfg.max_iter = Some(value.parse().map_err(|_| bad("invalid integer"))?),
            "b_list" => cfg.b_list = Some(parse_b_list(value)?),
            "a" => cfg.a = Some(value.parse().map_err(|_| bad("invalid number"))?),
            "p" => cfg.p = Some(value.parse().map_err(|_| bad("invalid number"))?),
            "rmax" => cfg.rmax = Some(value.parse().map_err(|_| bad("invalid number"))?),
            "dt" => cfg.dt = Some(value.parse().map_err(|_| bad("invalid number"))?),
            "t_final" => cfg.t_final = Some(value.parse().map_err(|_| bad("invalid number"))?),
            "out" => cfg.out = Some(PathBuf::from(value)),
            "format" => cfg.format = Some(value.to_string()),
            _ => return Err(format!("config line {}: unknown key {key:?}", lineno + 1)),
        }
    }
    Ok(cfg)
}
