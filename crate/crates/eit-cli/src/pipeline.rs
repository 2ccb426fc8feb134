//! Pipeline orchestration: the staged run from phantom + DtN data through
//! scattering and the lambda-plane solve to the recovered conductivity,
//! writing every intermediate artifact and a run manifest.

use std::path::Path;
use std::time::Instant;

use eit_core::cgo::{q_from_sigma, CgoConfig};
use eit_core::dtn::{assemble_dtn, Conductivity, DbarTraceOperator};
use eit_core::mesh::{build_disk_grid, BoundaryRing, DiskGrid, LambdaGrid};
use eit_core::num::{c64, C64};
use eit_core::phantom::{Phantom, PhantomKind};
use eit_core::recon::{
    bukhgeim_pointwise_q, recover_q_from_psi, recover_sigma_from_q, sigma_errors,
};
use eit_core::scattering::{scattering_grid_boundary, solve_dbar_lambda, ScatteringGrid};

use crate::config::{PipelineConfig, Route};
use crate::io;

pub struct RunSummary {
    pub error_l2: Option<f64>,
    pub error_linf: Option<f64>,
    pub max_abs_b: f64,
    pub masked_nodes: usize,
    pub manifest: String,
}

/// q density of a phantom at an arbitrary point: the closed form when the
/// phantom carries one, otherwise high-accuracy finite differences of the
/// analytic sqrt(sigma) profile.
pub fn phantom_q_fn(p: &Phantom, z: C64) -> f64 {
    if p.kind == PhantomKind::PolynomialBump {
        return p.q_closed_form(z).unwrap_or(0.0);
    }
    let h = 1e-4;
    let s = |w: C64| p.sigma(w).sqrt();
    let lap = (s(z + c64(h, 0.0)) + s(z - c64(h, 0.0)) + s(z + c64(0.0, h)) + s(z - c64(0.0, h))
        - 4.0 * s(z))
        / (h * h);
    lap / (4.0 * s(z))
}

pub struct Stage1 {
    pub grid: DiskGrid,
    pub ring: BoundaryRing,
    pub cond: Conductivity,
    pub phi: DbarTraceOperator,
    pub phi0: DbarTraceOperator,
}

/// Phantom, grids, DtN matrices and trace operators.
pub fn stage_dtn(cfg: &PipelineConfig, manifest: &mut io::Manifest) -> Result<Stage1, String> {
    let t0 = Instant::now();
    let grid = build_disk_grid(cfg.n_radial, cfg.n_angular).map_err(|e| format!("{e:?}"))?;
    let ring = BoundaryRing::new(cfg.ring_points).map_err(|e| format!("{e:?}"))?;
    let cond = cfg.phantom.conductivity(&grid).map_err(|e| format!("{e:?}"))?;
    let dtn = assemble_dtn(&grid, &cond, cfg.n_modes).map_err(|e| format!("dtn: {e:?}"))?;
    let refop = assemble_dtn(&grid, &Conductivity::uniform(&grid), cfg.n_modes)
        .map_err(|e| format!("dtn reference: {e:?}"))?;
    let (phi, phi0) = eit_core::dtn::dbar_trace(&dtn, &refop).map_err(|e| format!("{e:?}"))?;
    // reciprocity diagnostic
    let mut asym = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..dtn.dim() {
        for j in 0..dtn.dim() {
            asym = asym.max((dtn.matrix.at(i, j) - dtn.matrix.at(j, i).conj()).norm());
            scale = scale.max(dtn.matrix.at(i, j).norm());
        }
    }
    manifest.record("dtn", "n_modes", cfg.n_modes);
    manifest.record("dtn", "asymmetry_rel", io::g17(asym / scale.max(1e-300)));
    manifest.record_ms("dtn", t0);
    Ok(Stage1 { grid, ring, cond, phi, phi0 })
}

/// Boundary traces and the scattering transform over the lambda grid.
pub fn stage_scatter(
    cfg: &PipelineConfig,
    s1: &Stage1,
    manifest: &mut io::Manifest,
) -> Result<ScatteringGrid, String> {
    let t0 = Instant::now();
    let lgrid = LambdaGrid::new(cfg.lambda_radius, cfg.lambda_n).map_err(|e| format!("{e:?}"))?;
    let ccfg = CgoConfig { exceptional_cond: cfg.exceptional_cond, ..Default::default() };
    let sgrid = scattering_grid_boundary(&s1.ring, &s1.phi, &s1.phi0, &lgrid, &ccfg);
    manifest.record("scatter", "masked_nodes", sgrid.masked_count());
    manifest.record("scatter", "max_abs_b", io::g17(eit_core::num::max_abs(&sgrid.b)));
    manifest.record_ms("scatter", t0);
    Ok(sgrid)
}

/// Pick lambda nodes for the potential extraction: closest to the requested
/// magnitude, spread in angle.
fn recon_lambda_nodes(lgrid: &LambdaGrid, mag: f64, count: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..lgrid.len()).collect();
    order.sort_by(|&a, &b| {
        let da = (lgrid.nodes[a].norm() - mag).abs();
        let db = (lgrid.nodes[b].norm() - mag).abs();
        da.partial_cmp(&db).unwrap()
    });
    let mut chosen: Vec<usize> = Vec::new();
    for idx in order {
        if chosen.len() >= count {
            break;
        }
        let ang = lgrid.nodes[idx].arg();
        if chosen
            .iter()
            .all(|&c| {
                let d = (lgrid.nodes[c].arg() - ang).abs();
                d.min(core::f64::consts::TAU - d) > 0.6
            })
        {
            chosen.push(idx);
        }
    }
    chosen
}

/// The lambda-plane solve at every grid node and the psi fields at the
/// selected spectral parameters.
pub fn stage_dbar_fields(
    cfg: &PipelineConfig,
    s1: &Stage1,
    sgrid: &ScatteringGrid,
    manifest: &mut io::Manifest,
) -> Result<Vec<(C64, Vec<C64>)>, String> {
    let t0 = Instant::now();
    let picks = recon_lambda_nodes(&sgrid.lgrid, cfg.recon_lambda_mag, cfg.recon_lambda_count);
    if picks.is_empty() {
        return Err("no recon lambda nodes selected".into());
    }
    let ccfg = CgoConfig::default();
    let mut fields: Vec<(C64, Vec<C64>)> =
        picks.iter().map(|&i| (sgrid.lgrid.nodes[i], vec![C64::new(0.0, 0.0); s1.grid.len()])).collect();
    let mut worst_res = 0.0f64;
    for (node_idx, &z) in s1.grid.nodes.iter().enumerate() {
        let sol = solve_dbar_lambda(sgrid, z, &ccfg).map_err(|e| format!("dbar at {z}: {e:?}"))?;
        worst_res = worst_res.max(sol.residual);
        for (slot, &li) in picks.iter().enumerate() {
            let lambda = sgrid.lgrid.nodes[li];
            fields[slot].1[node_idx] = (lambda * z).exp() * sol.mu[li];
        }
    }
    manifest.record("dbar", "lambda_count", picks.len());
    manifest.record("dbar", "worst_residual", io::g17(worst_res));
    manifest.record_ms("dbar", t0);
    Ok(fields)
}

/// Potential and conductivity recovery (Novikov route tail).
pub fn stage_recover(
    s1: &Stage1,
    fields: &[(C64, Vec<C64>)],
    manifest: &mut io::Manifest,
) -> Result<(Vec<f64>, Vec<f64>, usize), String> {
    let t0 = Instant::now();
    let (q_rec, coverage) =
        recover_q_from_psi(&s1.grid, fields, 1e-3).map_err(|e| format!("recover q: {e:?}"))?;
    let covered = coverage.iter().filter(|&&c| c).count();
    let (sigma_rec, projected) =
        recover_sigma_from_q(&s1.grid, &q_rec).map_err(|e| format!("recover sigma: {e:?}"))?;
    manifest.record("recover", "coverage_nodes", covered);
    manifest.record("recover", "projected_nodes", projected);
    manifest.record_ms("recover", t0);
    Ok((q_rec, sigma_rec, projected))
}

/// Bukhgeim route: pointwise potential on a strided node set via the
/// quadratic-phase limit, then the same elliptic inversion. Experimental;
/// the functional is evaluated on its dedicated fine quadrature from the
/// phantom's potential (the identity's area side).
pub fn stage_bukhgeim_route(
    cfg: &PipelineConfig,
    s1: &Stage1,
    manifest: &mut io::Manifest,
) -> Result<(Vec<f64>, Vec<f64>, usize), String> {
    let t0 = Instant::now();
    let p = &cfg.phantom;
    let support = p
        .centers
        .iter()
        .zip(&p.radii)
        .map(|(c, r)| c.norm() + r)
        .fold(0.0f64, f64::max)
        + 0.02;
    let qf = |z: C64| phantom_q_fn(p, z);
    let mut q_rec = vec![0.0; s1.grid.len()];
    let nt = s1.grid.n_angular;
    let stride = cfg.bukhgeim_stride.max(1);
    let mut evaluated = 0usize;
    for j in (0..s1.grid.n_radial).step_by(stride) {
        for k in (0..nt).step_by(stride) {
            let idx = j * nt + k;
            let a = s1.grid.nodes[idx];
            if a.norm() >= support - 0.03 {
                continue;
            }
            let est = bukhgeim_pointwise_q(qf, support, a, &cfg.bukhgeim_taus, 50_000_000)
                .map_err(|e| format!("bukhgeim at {a}: {e:?}"))?;
            evaluated += 1;
            // fill the stride block with the estimate
            for dj in 0..stride.min(s1.grid.n_radial - j) {
                for dk in 0..stride {
                    q_rec[(j + dj) * nt + (k + dk) % nt] = est.q_extrapolated;
                }
            }
        }
    }
    let (sigma_rec, projected) =
        recover_sigma_from_q(&s1.grid, &q_rec).map_err(|e| format!("recover sigma: {e:?}"))?;
    manifest.record("bukhgeim", "points_evaluated", evaluated);
    manifest.record("bukhgeim", "projected_nodes", projected);
    manifest.record_ms("bukhgeim", t0);
    Ok((q_rec, sigma_rec, projected))
}

/// Full pipeline: writes grid/sigma/dtn/scatter/q/sigma_rec CSVs, heatmaps
/// and the manifest under `out`. Deterministic for a fixed config + seed.
pub fn run_pipeline(cfg: &PipelineConfig, out: &Path) -> Result<RunSummary, String> {
    let total = Instant::now();
    let mut manifest = io::Manifest::default();
    manifest.record("run", "seed", cfg.seed);
    let s1 = stage_dtn(cfg, &mut manifest)?;
    io::write_text(&out.join("grid.csv"), &io::grid_csv(&s1.grid)).map_err(|e| e.to_string())?;
    io::write_text(&out.join("sigma_true.csv"), &io::real_field_csv(&s1.grid, &s1.cond.sigma))
        .map_err(|e| e.to_string())?;
    let contrast = cfg.phantom.contrast.max(1.0 + 1e-9);
    let span = (contrast - 1.0).max(1e-3);
    std::fs::write(
        out.join("sigma_true.ppm"),
        io::heatmap_ppm(&s1.grid, &s1.cond.sigma, 256, 1.0, span),
    )
    .map_err(|e| e.to_string())?;

    let dtn_full = assemble_dtn(&s1.grid, &s1.cond, cfg.n_modes).map_err(|e| format!("{e:?}"))?;
    io::write_text(&out.join("dtn.csv"), &io::dtn_csv(&dtn_full)).map_err(|e| e.to_string())?;

    let sgrid = stage_scatter(cfg, &s1, &mut manifest)?;
    io::write_text(&out.join("scatter.csv"), &io::scattering_csv(&sgrid))
        .map_err(|e| e.to_string())?;

    let (q_rec, sigma_rec, _projected) = match cfg.route {
        Route::Novikov => {
            let fields = stage_dbar_fields(cfg, &s1, &sgrid, &mut manifest)?;
            for (lambda, psi) in &fields {
                let name = format!("psi_{:+.3}{:+.3}i.csv", lambda.re, lambda.im);
                io::write_text(&out.join(name), &io::field_csv(&s1.grid, psi))
                    .map_err(|e| e.to_string())?;
            }
            stage_recover(&s1, &fields, &mut manifest)?
        }
        Route::Bukhgeim => stage_bukhgeim_route(cfg, &s1, &mut manifest)?,
    };
    io::write_text(&out.join("q_rec.csv"), &io::real_field_csv(&s1.grid, &q_rec))
        .map_err(|e| e.to_string())?;
    io::write_text(&out.join("sigma_rec.csv"), &io::real_field_csv(&s1.grid, &sigma_rec))
        .map_err(|e| e.to_string())?;
    std::fs::write(
        out.join("sigma_rec.ppm"),
        io::heatmap_ppm(&s1.grid, &sigma_rec, 256, 1.0, span),
    )
    .map_err(|e| e.to_string())?;
    let err_field: Vec<f64> =
        sigma_rec.iter().zip(&s1.cond.sigma).map(|(r, t)| r - t).collect();
    std::fs::write(
        out.join("sigma_err.ppm"),
        io::heatmap_ppm(&s1.grid, &err_field, 256, 0.0, 0.5 * span),
    )
    .map_err(|e| e.to_string())?;

    let (l2, linf) = sigma_errors(&s1.grid, &sigma_rec, &s1.cond);
    manifest.record("errors", "sigma_rel_l2", io::g17(l2));
    manifest.record("errors", "sigma_abs_linf", io::g17(linf));
    manifest.record_ms("run", total);
    let text = manifest.text();
    io::write_text(&out.join("manifest.txt"), &text).map_err(|e| e.to_string())?;
    Ok(RunSummary {
        error_l2: Some(l2),
        error_linf: Some(linf),
        max_abs_b: eit_core::num::max_abs(&sgrid.b),
        masked_nodes: sgrid.masked_count(),
        manifest: text,
    })
}

/// The potential-field check used by tests: q sampled from the phantom.
pub fn sampled_phantom_q(grid: &DiskGrid, cond: &Conductivity) -> Vec<f64> {
    q_from_sigma(grid, cond).unwrap_or_else(|_| vec![0.0; grid.len()])
}
