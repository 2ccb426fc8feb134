//! Flat key=value configuration files: one `key = value` pair per line,
//! `#` comments, no sections. Zero-dependency on purpose so a run is fully
//! reproducible from a file that can be read at a glance.

use std::collections::BTreeMap;
use std::path::Path;

use eit_core::num::{c64, C64};
use eit_core::phantom::{Phantom, PhantomKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Novikov,
    Bukhgeim,
}

/// Everything a pipeline run needs, with desk-scale defaults.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub n_radial: usize,
    pub n_angular: usize,
    pub ring_points: usize,
    pub n_modes: usize,
    pub lambda_radius: f64,
    pub lambda_n: usize,
    pub phantom: Phantom,
    pub route: Route,
    pub seed: u64,
    /// |lambda| of the CGO fields used for the potential extraction
    pub recon_lambda_mag: f64,
    pub recon_lambda_count: usize,
    pub bukhgeim_taus: Vec<f64>,
    pub bukhgeim_points: Vec<C64>,
    pub bukhgeim_stride: usize,
    /// boundary-solve condition threshold for the exceptional mask
    pub exceptional_cond: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            n_radial: 64,
            n_angular: 128,
            ring_points: 128,
            n_modes: 16,
            lambda_radius: 4.0,
            lambda_n: 16,
            phantom: Phantom::radial(0.42, 1.3),
            route: Route::Novikov,
            seed: 1,
            recon_lambda_mag: 1.2,
            recon_lambda_count: 4,
            bukhgeim_taus: vec![20.0, 40.0, 80.0],
            bukhgeim_points: vec![c64(0.2, 0.0), c64(0.12, -0.08), c64(0.3, 0.1)],
            bukhgeim_stride: 4,
            exceptional_cond: 1e8,
        }
    }
}

pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut map = BTreeMap::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(format!("line {}: expected key = value", ln + 1));
        };
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn get_f64(map: &BTreeMap<String, String>, key: &str, default: f64) -> Result<f64, String> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v.parse().map_err(|_| format!("{key}: bad float '{v}'")),
    }
}

fn get_usize(map: &BTreeMap<String, String>, key: &str, default: usize) -> Result<usize, String> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v.parse().map_err(|_| format!("{key}: bad integer '{v}'")),
    }
}

fn parse_complex(v: &str) -> Result<C64, String> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(format!("bad complex '{v}', expected re,im"));
    }
    let re = parts[0].parse().map_err(|_| format!("bad float '{}'", parts[0]))?;
    let im = parts[1].parse().map_err(|_| format!("bad float '{}'", parts[1]))?;
    Ok(c64(re, im))
}

impl PipelineConfig {
    pub fn from_text(text: &str) -> Result<Self, String> {
        let map = parse_kv(text)?;
        let mut cfg = PipelineConfig::default();
        cfg.n_radial = get_usize(&map, "grid.n_radial", cfg.n_radial)?;
        cfg.n_angular = get_usize(&map, "grid.n_angular", cfg.n_angular)?;
        cfg.ring_points = get_usize(&map, "ring.n_points", cfg.ring_points)?;
        cfg.n_modes = get_usize(&map, "dtn.n_modes", cfg.n_modes)?;
        cfg.lambda_radius = get_f64(&map, "lambda.radius", cfg.lambda_radius)?;
        cfg.lambda_n = get_usize(&map, "lambda.n", cfg.lambda_n)?;
        cfg.seed = get_usize(&map, "seed", cfg.seed as usize)? as u64;
        cfg.recon_lambda_mag = get_f64(&map, "recon.lambda_mag", cfg.recon_lambda_mag)?;
        cfg.recon_lambda_count = get_usize(&map, "recon.lambda_count", cfg.recon_lambda_count)?;
        cfg.bukhgeim_stride = get_usize(&map, "bukhgeim.stride", cfg.bukhgeim_stride)?;
        cfg.exceptional_cond = get_f64(&map, "cgo.exceptional_cond", cfg.exceptional_cond)?;
        if let Some(v) = map.get("route") {
            cfg.route = match v.as_str() {
                "novikov" => Route::Novikov,
                "bukhgeim" => Route::Bukhgeim,
                _ => return Err(format!("route: unknown '{v}'")),
            };
        }
        if let Some(v) = map.get("bukhgeim.taus") {
            cfg.bukhgeim_taus = v
                .split(',')
                .map(|s| s.trim().parse().map_err(|_| format!("bukhgeim.taus: bad '{s}'")))
                .collect::<Result<_, _>>()?;
        }
        if let Some(v) = map.get("bukhgeim.points") {
            cfg.bukhgeim_points =
                v.split(';').map(parse_complex).collect::<Result<Vec<_>, _>>()?;
        }
        let kind = map.get("phantom.kind").map(String::as_str).unwrap_or("radial_bump");
        let contrast = get_f64(&map, "phantom.contrast", 1.3)?;
        let radius = get_f64(&map, "phantom.radius", 0.42)?;
        let center = match map.get("phantom.center") {
            Some(v) => parse_complex(v)?,
            None => c64(0.0, 0.0),
        };
        cfg.phantom = match kind {
            "radial_bump" => Phantom::radial(radius, contrast),
            "offset_bump" => Phantom::offset(center, radius, contrast),
            "polynomial_bump" => Phantom::polynomial(center, radius, contrast),
            "two_bumps" => {
                let c2 = parse_complex(
                    map.get("phantom.center2").map(String::as_str).unwrap_or("0.3,0"),
                )?;
                let r2 = get_f64(&map, "phantom.radius2", radius)?;
                Phantom::two_bumps(center, radius, c2, r2, contrast)
            }
            _ => return Err(format!("phantom.kind: unknown '{kind}'")),
        };
        // validation before any solve
        if cfg.phantom.kind == PhantomKind::TwoBumps || true {
            cfg.phantom.validate(0.98).map_err(|e| format!("phantom invalid: {e:?}"))?;
        }
        if cfg.lambda_n % 2 != 0 {
            return Err("lambda.n must be even".into());
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::from_text(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let cfg = PipelineConfig::from_text("grid.n_radial = 32\nphantom.contrast = 1.5\n").unwrap();
        assert_eq!(cfg.n_radial, 32);
        assert_eq!(cfg.n_angular, 128);
        assert!((cfg.phantom.contrast - 1.5).abs() < 1e-15);
    }

    #[test]
    fn comments_and_bad_lines() {
        assert!(PipelineConfig::from_text("# only a comment\n").is_ok());
        assert!(PipelineConfig::from_text("grid.n_radial 32\n").is_err());
        assert!(PipelineConfig::from_text("route = sideways\n").is_err());
    }

    #[test]
    fn invalid_phantom_rejected_before_solves() {
        let err = PipelineConfig::from_text("phantom.contrast = -2\n");
        assert!(err.is_err());
        let err = PipelineConfig::from_text("phantom.radius = 0.99\n");
        assert!(err.is_err());
    }
}
