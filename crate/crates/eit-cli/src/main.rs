//! `eit` command line: forward solves, DtN assembly, CGO traces, scattering,
//! the lambda-plane solve, reconstruction (both routes), the quadratic-phase
//! pointwise recovery, and the algebraic-curve subcommands.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use eit_core::cgo::{q_from_sigma, solve_boundary_equation, solve_lippmann_schwinger, CgoConfig};
use eit_core::curve::{
    curve_points, delta_theta_asymptotic, find_critical_points, recovery_functionals,
    stationary_phase_integral, stationary_phase_model, vandermonde_recover_q, AlgebraicCurve,
    CurvePatch, DivisorTheta,
};
use eit_core::dtn::{assemble_dtn, solve_dirichlet, Conductivity};
use eit_core::mesh::{build_disk_grid, BoundaryRing, LambdaGrid};
use eit_core::num::{c64, C64};
use eit_core::poly::BivarPoly;
use eit_core::recon::bukhgeim_pointwise_q;
use eit_core::scattering::{scattering_interior, solve_dbar_lambda};

use eit_cli::config::{PipelineConfig, Route};
use eit_cli::{io, pipeline};

struct Args {
    command: String,
    sub: Option<String>,
    config: Option<PathBuf>,
    out: PathBuf,
    seed: Option<u64>,
    lambda: Option<C64>,
    form: String,
    route: Option<Route>,
    n_modes: Option<usize>,
    mode: isize,
    curve_file: PathBuf,
    kernel_cache: Option<PathBuf>,
    theta: C64,
    divisor_z1: C64,
    taus: Option<Vec<f64>>,
}

fn parse_complex(v: &str) -> Result<C64, String> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(format!("expected re,im, got '{v}'"));
    }
    Ok(c64(
        parts[0].parse().map_err(|_| format!("bad float '{}'", parts[0]))?,
        parts[1].parse().map_err(|_| format!("bad float '{}'", parts[1]))?,
    ))
}

fn parse_args() -> Result<Args, String> {
    let mut argv = std::env::args().skip(1);
    let command = argv.next().ok_or_else(usage)?;
    let mut args = Args {
        command: command.clone(),
        sub: None,
        config: None,
        out: PathBuf::from("out"),
        seed: None,
        lambda: None,
        form: "boundary".into(),
        route: None,
        n_modes: None,
        mode: 1,
        curve_file: PathBuf::from("curves/ellipse.curve"),
        kernel_cache: None,
        theta: c64(0.7, 0.3),
        divisor_z1: c64(2.5, 0.0),
        taus: None,
    };
    if command == "curve" {
        args.sub = Some(argv.next().ok_or("curve needs a subcommand: crit|phase|delta|recover")?);
    }
    while let Some(flag) = argv.next() {
        let mut val = || argv.next().ok_or(format!("{flag} needs a value"));
        match flag.as_str() {
            "--config" => args.config = Some(PathBuf::from(val()?)),
            "--out" => args.out = PathBuf::from(val()?),
            "--seed" => args.seed = Some(val()?.parse().map_err(|_| "bad --seed")?),
            "--lambda" => args.lambda = Some(parse_complex(&val()?)?),
            "--form" => args.form = val()?,
            "--route" => {
                args.route = Some(match val()?.as_str() {
                    "novikov" => Route::Novikov,
                    "bukhgeim" => Route::Bukhgeim,
                    other => return Err(format!("unknown route '{other}'")),
                })
            }
            "--n-modes" => args.n_modes = Some(val()?.parse().map_err(|_| "bad --n-modes")?),
            "--mode" => args.mode = val()?.parse().map_err(|_| "bad --mode")?,
            "--curve-file" => args.curve_file = PathBuf::from(val()?),
            "--kernel-cache" => args.kernel_cache = Some(PathBuf::from(val()?)),
            "--theta" => args.theta = parse_complex(&val()?)?,
            "--divisor" => args.divisor_z1 = parse_complex(&val()?)?,
            "--tau" => {
                args.taus = Some(
                    val()?
                        .split(',')
                        .map(|s| s.trim().parse().map_err(|_| "bad --tau"))
                        .collect::<Result<_, _>>()?,
                )
            }
            other => return Err(format!("unknown flag '{other}'")),
        }
    }
    Ok(args)
}

fn usage() -> String {
    "usage: eit <forward|dtn|cgo|scatter|dbar|reconstruct|bukhgeim|curve <crit|phase|delta|recover>|pipeline> \
     [--config PATH] [--out DIR] [--seed N] [--lambda re,im] [--form boundary|interior|both] \
     [--route novikov|bukhgeim] [--n-modes N] [--mode N] [--curve-file PATH] [--theta re,im] \
     [--divisor re,im] [--tau t1,t2,...] [--kernel-cache DIR]"
        .into()
}

fn load_config(args: &Args) -> Result<PipelineConfig, String> {
    let mut cfg = match &args.config {
        Some(p) => PipelineConfig::from_file(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(nm) = args.n_modes {
        cfg.n_modes = nm;
    }
    if let Some(r) = args.route {
        cfg.route = r;
    }
    Ok(cfg)
}

fn cmd_forward(args: &Args) -> Result<(), String> {
    let cfg = load_config(args)?;
    let grid = build_disk_grid(cfg.n_radial, cfg.n_angular).map_err(|e| format!("{e:?}"))?;
    let cond = cfg.phantom.conductivity(&grid).map_err(|e| format!("{e:?}"))?;
    let nm = cfg.n_modes.max(args.mode.unsigned_abs());
    let mut f = vec![C64::new(0.0, 0.0); 2 * nm + 1];
    f[(args.mode + nm as isize) as usize] = c64(1.0, 0.0);
    let sol = solve_dirichlet(&grid, &cond, &f).map_err(|e| format!("{e:?}"))?;
    io::write_text(&args.out.join("forward_u.csv"), &io::field_csv(&grid, &sol.u))
        .map_err(|e| e.to_string())?;
    println!("forward mode={} residual={:.3e}", args.mode, sol.residual);
    Ok(())
}

fn cmd_dtn(args: &Args) -> Result<(), String> {
    let cfg = load_config(args)?;
    let grid = build_disk_grid(cfg.n_radial, cfg.n_angular).map_err(|e| format!("{e:?}"))?;
    let cond = cfg.phantom.conductivity(&grid).map_err(|e| format!("{e:?}"))?;
    let dtn = assemble_dtn(&grid, &cond, cfg.n_modes).map_err(|e| format!("{e:?}"))?;
    let refop = assemble_dtn(&grid, &Conductivity::uniform(&grid), cfg.n_modes)
        .map_err(|e| format!("{e:?}"))?;
    io::write_text(&args.out.join("dtn.csv"), &io::dtn_csv(&dtn)).map_err(|e| e.to_string())?;
    io::write_text(&args.out.join("dtn_reference.csv"), &io::dtn_csv(&refop))
        .map_err(|e| e.to_string())?;
    println!("dtn written: {} modes", cfg.n_modes);
    Ok(())
}

fn cmd_cgo(args: &Args) -> Result<(), String> {
    let cfg = load_config(args)?;
    let lambda = args.lambda.ok_or("cgo needs --lambda re,im")?;
    let grid = build_disk_grid(cfg.n_radial, cfg.n_angular).map_err(|e| format!("{e:?}"))?;
    let ring = BoundaryRing::new(cfg.ring_points).map_err(|e| format!("{e:?}"))?;
    let cond = cfg.phantom.conductivity(&grid).map_err(|e| format!("{e:?}"))?;
    let dtn = assemble_dtn(&grid, &cond, cfg.n_modes).map_err(|e| format!("{e:?}"))?;
    let refop = assemble_dtn(&grid, &Conductivity::uniform(&grid), cfg.n_modes)
        .map_err(|e| format!("{e:?}"))?;
    let (phi, phi0) = eit_core::dtn::dbar_trace(&dtn, &refop).map_err(|e| format!("{e:?}"))?;
    if let Some(dir) = &args.kernel_cache {
        // kernel table cache, keyed by (lambda, resolution)
        let name = format!("g_{:+.6}_{:+.6}_n33.bin", lambda.re, lambda.im);
        let path = dir.join(name);
        let table = if path.exists() {
            let t = io::read_kernel_cache(&path).map_err(|e| e.to_string())?;
            if (t.lambda - lambda).norm() > 1e-12 {
                return Err("kernel cache: lambda mismatch".into());
            }
            println!("kernel cache hit: {}", path.display());
            t
        } else {
            let t = eit_core::faddeev::FaddeevGreenTable::from_closed_form(lambda, 33, 1.0 / 16.0);
            io::write_kernel_cache(&path, &t).map_err(|e| e.to_string())?;
            println!("kernel cache written: {}", path.display());
            t
        };
        let _ = table;
    }
    let ccfg = CgoConfig { exceptional_cond: cfg.exceptional_cond, ..Default::default() };
    let tr = solve_boundary_equation(&ring, &phi, &phi0, lambda, &ccfg)
        .map_err(|e| format!("{e:?}"))?;
    io::write_text(&args.out.join("psi_trace.csv"), &io::trace_csv(lambda, &tr.psi_b))
        .map_err(|e| e.to_string())?;
    let f = solve_lippmann_schwinger(&grid, &cond, lambda, &ccfg).map_err(|e| format!("{e:?}"))?;
    io::write_text(&args.out.join("mu_interior.csv"), &io::field_csv(&grid, &f.mu))
        .map_err(|e| e.to_string())?;
    println!(
        "cgo lambda={lambda}: trace residual {:.2e} cond {:.2e}, interior residual {:.2e}",
        tr.c_residual, tr.condition, f.residual
    );
    Ok(())
}

fn cmd_scatter(args: &Args) -> Result<(), String> {
    let cfg = load_config(args)?;
    let mut manifest = io::Manifest::default();
    let s1 = pipeline::stage_dtn(&cfg, &mut manifest)?;
    let lgrid = LambdaGrid::new(cfg.lambda_radius, cfg.lambda_n).map_err(|e| format!("{e:?}"))?;
    let ccfg = CgoConfig { exceptional_cond: cfg.exceptional_cond, ..Default::default() };
    if args.form == "boundary" || args.form == "both" {
        let sg = pipeline::stage_scatter(&cfg, &s1, &mut manifest)?;
        io::write_text(&args.out.join("scatter_boundary.csv"), &io::scattering_csv(&sg))
            .map_err(|e| e.to_string())?;
        println!("boundary form: {} masked of {}", sg.masked_count(), lgrid.len());
    }
    if args.form == "interior" || args.form == "both" {
        // interior solves are dense; subsample the grid by stride 4
        let q = q_from_sigma(&s1.grid, &s1.cond).map_err(|e| format!("{e:?}"))?;
        let mut rows = String::from("re_lambda,im_lambda,re_b,im_b\n");
        for (i, &lambda) in lgrid.nodes.iter().enumerate() {
            if i % 4 != 0 {
                continue;
            }
            let f = solve_lippmann_schwinger(&s1.grid, &s1.cond, lambda, &ccfg)
                .map_err(|e| format!("{e:?}"))?;
            let b = scattering_interior(&s1.grid, &q, &f, lambda).map_err(|e| format!("{e:?}"))?;
            rows += &format!(
                "{},{},{},{}\n",
                io::g17(lambda.re),
                io::g17(lambda.im),
                io::g17(b.re),
                io::g17(b.im)
            );
        }
        io::write_text(&args.out.join("scatter_interior.csv"), &rows).map_err(|e| e.to_string())?;
        println!("interior form written (stride 4)");
    }
    if !matches!(args.form.as_str(), "boundary" | "interior" | "both") {
        return Err(format!("--form must be boundary|interior|both, got '{}'", args.form));
    }
    Ok(())
}

fn cmd_dbar(args: &Args) -> Result<(), String> {
    let cfg = load_config(args)?;
    let mut manifest = io::Manifest::default();
    let s1 = pipeline::stage_dtn(&cfg, &mut manifest)?;
    let sgrid = pipeline::stage_scatter(&cfg, &s1, &mut manifest)?;
    let ccfg = CgoConfig::default();
    let targets = [c64(0.2, 0.1), c64(-0.3, 0.25), c64(0.0, -0.4)];
    let mut rows = String::from("re_z,im_z,re_lambda,im_lambda,re_mu,im_mu\n");
    for &z in &targets {
        let sol = solve_dbar_lambda(&sgrid, z, &ccfg).map_err(|e| format!("{e:?}"))?;
        let res = eit_core::scattering::dbar_equation_residual(&sgrid, &sol);
        println!("dbar z={z}: solve residual {:.2e}, fd dbar residual {:.3}", sol.residual, res);
        for (i, &l) in sgrid.lgrid.nodes.iter().enumerate() {
            rows += &format!(
                "{},{},{},{},{},{}\n",
                io::g17(z.re),
                io::g17(z.im),
                io::g17(l.re),
                io::g17(l.im),
                io::g17(sol.mu[i].re),
                io::g17(sol.mu[i].im)
            );
        }
    }
    io::write_text(&args.out.join("mu_lambda.csv"), &rows).map_err(|e| e.to_string())?;
    Ok(())
}

fn cmd_pipeline(args: &Args) -> Result<(), String> {
    let cfg = load_config(args)?;
    let summary = pipeline::run_pipeline(&cfg, &args.out)?;
    println!(
        "pipeline done: sigma rel l2 {:.4}, linf {:.4}, max|b| {:.3e}, masked {}",
        summary.error_l2.unwrap_or(f64::NAN),
        summary.error_linf.unwrap_or(f64::NAN),
        summary.max_abs_b,
        summary.masked_nodes
    );
    Ok(())
}

fn cmd_bukhgeim(args: &Args) -> Result<(), String> {
    let cfg = load_config(args)?;
    let taus = args.taus.clone().unwrap_or(cfg.bukhgeim_taus.clone());
    let p = cfg.phantom.clone();
    let support = p.centers.iter().zip(&p.radii).map(|(c, r)| c.norm() + r).fold(0.0, f64::max)
        + 0.02;
    let qf = move |z: C64| pipeline::phantom_q_fn(&p, z);
    let mut rows = String::from("re_a,im_a,q_true,q_extrapolated,observed_order\n");
    for &a in &cfg.bukhgeim_points {
        let est = bukhgeim_pointwise_q(&qf, support, a, &taus, 50_000_000)
            .map_err(|e| format!("{e:?}"))?;
        let truth = qf(a);
        println!(
            "a={a}: Q {:.4} vs true {:.4}, order {:?}",
            est.q_extrapolated, truth, est.observed_order
        );
        rows += &format!(
            "{},{},{},{},{}\n",
            io::g17(a.re),
            io::g17(a.im),
            io::g17(truth),
            io::g17(est.q_extrapolated),
            est.observed_order.map(io::g17).unwrap_or_else(|| "inconclusive".into())
        );
    }
    io::write_text(&args.out.join("bukhgeim_pointwise.csv"), &rows).map_err(|e| e.to_string())?;
    Ok(())
}

fn load_curve(path: &Path) -> Result<AlgebraicCurve, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let p: BivarPoly = io::parse_curve_file(&text)?;
    AlgebraicCurve::new(p, 2.0).map_err(|e| format!("{e:?}"))
}

fn cmd_curve(args: &Args) -> Result<(), String> {
    let curve = load_curve(&args.curve_file)?;
    let theta = args.theta;
    match args.sub.as_deref() {
        Some("crit") => {
            let pts = find_critical_points(&curve, theta).map_err(|e| format!("{e:?}"))?;
            let mut rows =
                String::from("re_w1,im_w1,re_w2,im_w2,abs_first_deriv,abs_second_order\n");
            for cp in &pts {
                rows += &format!(
                    "{},{},{},{},{},{}\n",
                    io::g17(cp.w.0.re),
                    io::g17(cp.w.0.im),
                    io::g17(cp.w.1.re),
                    io::g17(cp.w.1.im),
                    io::g17(cp.first_deriv.norm()),
                    io::g17(cp.second_order.norm())
                );
            }
            io::write_text(&args.out.join("critical_points.csv"), &rows)
                .map_err(|e| e.to_string())?;
            println!("{} critical points (N(N-1) = {})", pts.len(), curve.degree * (curve.degree - 1));
        }
        Some("phase") => {
            let pts = find_critical_points(&curve, theta).map_err(|e| format!("{e:?}"))?;
            let cp = &pts[0];
            let taus = args.taus.clone().unwrap_or(vec![50.0, 100.0, 200.0]);
            let center = cp.w;
            let q = move |z1: C64, z2: C64| {
                let d = ((z1 - center.0).norm_sqr() + (z2 - center.1).norm_sqr()) / 0.35;
                if d >= 1.0 {
                    0.0
                } else {
                    let t = 1.0 - d * d;
                    t * t * t
                }
            };
            let mut rows = String::from("tau,re_direct,im_direct,re_model,im_model,rel_err\n");
            for &tau in &taus {
                let n = ((1.2 / (core::f64::consts::PI / (7.0 * tau * 2.0))) as usize)
                    .next_power_of_two()
                    .clamp(64, 2048);
                let patch = CurvePatch::build(&curve, cp.w.1, cp.w.0, 0.6, n)
                    .map_err(|e| format!("{e:?}"))?;
                let direct = stationary_phase_integral(&curve, &patch, q, theta, tau, 0)
                    .map_err(|e| format!("{e:?}"))?;
                let model = stationary_phase_model(&pts, q, tau);
                let rel = (direct - model).norm() / direct.norm().max(1e-300);
                println!("tau={tau}: rel err {rel:.4}");
                rows += &format!(
                    "{},{},{},{},{},{}\n",
                    io::g17(tau),
                    io::g17(direct.re),
                    io::g17(direct.im),
                    io::g17(model.re),
                    io::g17(model.im),
                    io::g17(rel)
                );
            }
            io::write_text(&args.out.join("stationary_phase.csv"), &rows)
                .map_err(|e| e.to_string())?;
        }
        Some("delta") => {
            let pts = find_critical_points(&curve, theta).map_err(|e| format!("{e:?}"))?;
            let a1 = args.divisor_z1;
            let branches = curve_points(&curve, a1).map_err(|e| format!("{e:?}"))?;
            let a2 = branches
                .iter()
                .map(|p| p.0)
                .min_by(|x, y| x.im.abs().partial_cmp(&y.im.abs()).unwrap())
                .ok_or("no branch over the divisor point")?;
            let div = DivisorTheta::new(&curve, theta, vec![(a1, a2)])
                .map_err(|e| format!("{e:?}"))?;
            let form = BivarPoly::from_terms(&[(0, 0, c64(1.0, 0.0))]);
            let mut rows = String::from("re_lambda,im_lambda,abs_surrogate\n");
            for &r in &[6.0, 9.0, 12.0] {
                for k in 0..16 {
                    let lam = C64::from_polar(r, core::f64::consts::TAU * k as f64 / 16.0 + 0.05);
                    let d = delta_theta_asymptotic(&curve, &div, &[form.clone()], &pts, lam)
                        .map_err(|e| format!("{e:?}"))?;
                    rows += &format!(
                        "{},{},{}\n",
                        io::g17(lam.re),
                        io::g17(lam.im),
                        io::g17(d.surrogate.norm())
                    );
                }
            }
            io::write_text(&args.out.join("delta_annulus.csv"), &rows)
                .map_err(|e| e.to_string())?;
            println!("delta surrogate scan written (divisor at z1 = {a1})");
        }
        Some("recover") => {
            let pts = find_critical_points(&curve, theta).map_err(|e| format!("{e:?}"))?;
            // disjoint bumps at every critical point, graded amplitudes
            let centers: Vec<(C64, C64)> = pts.iter().map(|cp| cp.w).collect();
            let mut min_sep = f64::INFINITY;
            for i in 0..centers.len() {
                for j in 0..i {
                    let d = f64::sqrt(
                        (centers[i].0 - centers[j].0).norm_sqr()
                            + (centers[i].1 - centers[j].1).norm_sqr(),
                    );
                    min_sep = min_sep.min(d);
                }
            }
            let rho = (0.35f64).min(0.4 * min_sep);
            let q = |z1: C64, z2: C64| {
                let mut v = 0.0;
                for (m, c) in centers.iter().enumerate() {
                    let d = f64::sqrt((z1 - c.0).norm_sqr() + (z2 - c.1).norm_sqr()) / rho;
                    if d < 1.0 {
                        let t = 1.0 - d * d;
                        v += (1.0 + 0.35 * m as f64) * t * t * t;
                    }
                }
                v
            };
            let tau = args.taus.as_ref().map(|t| t[0]).unwrap_or(100.0);
            let mut patches = Vec::new();
            for c in &centers {
                let n = ((2.2 * rho / (core::f64::consts::PI / (8.0 * tau * 2.0))) as usize)
                    .next_power_of_two()
                    .clamp(64, 1024);
                patches.push(
                    CurvePatch::build(&curve, c.1, c.0, 1.1 * rho, n)
                        .map_err(|e| format!("{e:?}"))?,
                );
            }
            let prefs: Vec<&CurvePatch> = patches.iter().collect();
            let fs = recovery_functionals(&curve, &prefs, q, theta, tau, 1..=centers.len())
                .map_err(|e| format!("{e:?}"))?;
            let (qr, cond) = vandermonde_recover_q(&pts, &fs, tau).map_err(|e| format!("{e:?}"))?;
            let mut rows = String::from("re_w1,im_w1,q_true,re_q_rec,im_q_rec\n");
            for (cp, qv) in pts.iter().zip(&qr) {
                let truth = q(cp.w.0, cp.w.1);
                println!("w1={:.3}: Q {:.4} vs true {truth:.4}", cp.w.0, qv.re);
                rows += &format!(
                    "{},{},{},{},{}\n",
                    io::g17(cp.w.0.re),
                    io::g17(cp.w.0.im),
                    io::g17(truth),
                    io::g17(qv.re),
                    io::g17(qv.im)
                );
            }
            println!("system condition {cond:.2}");
            io::write_text(&args.out.join("curve_recover.csv"), &rows)
                .map_err(|e| e.to_string())?;
        }
        other => return Err(format!("unknown curve subcommand {other:?}")),
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match parse_args() {
        Ok(a) => a,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    let result = match args.command.as_str() {
        "forward" => cmd_forward(&args),
        "dtn" => cmd_dtn(&args),
        "cgo" => cmd_cgo(&args),
        "scatter" => cmd_scatter(&args),
        "dbar" => cmd_dbar(&args),
        "reconstruct" | "pipeline" => cmd_pipeline(&args),
        "bukhgeim" => cmd_bukhgeim(&args),
        "curve" => cmd_curve(&args),
        _ => Err(usage()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
