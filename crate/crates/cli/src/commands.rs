use std::path::{Path, PathBuf};
use std::time::Instant;

use manifold_regress::eval::{default_candidates, loocv_select, rate_check, run_mise};
use manifold_regress::sampling::{curve_point, equispaced, generate_dataset, replication_rng, sd_to_contraction};
use manifold_regress::{fit as fit_method, FitConfig, Hyper, Method, Point, SpaceKind, SpherePoint};
use serde::Serialize;

use crate::config::{self, MiseConfig, RateConfig, SimulateConfig};
use crate::fail::Failure;
use crate::io::{self, fmt_f64, RunManifest};
use crate::plot::{self, PlotInput};
use crate::{ExperimentArgs, FitArgs, PlotArgs, SimulateArgs};

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

/// `dir/name.csv` → `dir/name.<suffix>`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn sphere_trace(trace: &[(f64, Point)]) -> Result<Vec<(f64, SpherePoint)>, Failure> {
    trace
        .iter()
        .map(|(t, p)| {
            p.as_sphere()
                .cloned()
                .map(|s| (*t, s))
                .ok_or_else(|| Failure::usage("estimate is not on the sphere"))
        })
        .collect()
}

#[derive(Serialize)]
struct SimulateSummary {
    n: usize,
    contraction: f64,
    truth: String,
}

pub fn simulate(args: &SimulateArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let started_at = now();
    let mut cfg: SimulateConfig = config::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let spec = cfg.curve_spec()?;
    let a = sd_to_contraction(cfg.sd).map_err(Failure::numeric)?;
    let mut rng = replication_rng(cfg.seed, 0);
    let truth = spec.draw(&mut rng).map_err(Failure::numeric)?;
    let data = generate_dataset(&truth, cfg.n, a, (0.0, 1.0), &mut rng).map_err(Failure::numeric)?;
    io::write_dataset(&args.out, &data)?;

    let truth_path = args.truth.clone().unwrap_or_else(|| sibling(&args.out, "truth.csv"));
    let trace: Vec<(f64, SpherePoint)> =
        equispaced(manifold_regress::estimators::TRACE_SIZE, (0.0, 1.0)).into_iter().map(|t| (t, curve_point(&truth, t))).collect();
    io::write_trace(&truth_path, &trace)?;

    let manifest = RunManifest {
        version: VERSION,
        seed: cfg.seed,
        config: &cfg,
        started_at,
        elapsed_s: started.elapsed().as_secs_f64(),
        outputs: vec![display(&args.out), display(&truth_path)],
        results: SimulateSummary { n: data.len(), contraction: a, truth: format!("{truth:?}") },
    };
    io::write_manifest(&args.out, &manifest)
}

#[derive(Serialize)]
struct FitEcho {
    data: String,
    method: Method,
    h: Option<f64>,
    #[serde(rename = "N")]
    n_terms: Option<usize>,
    loocv: bool,
    lambda_max: Option<f64>,
    vmax: Option<f64>,
    reflect: bool,
    trace_size: usize,
}

#[derive(Serialize)]
struct FitSummary {
    method: Method,
    hyper: Hyper,
    selected_by: &'static str,
    h: Option<f64>,
    #[serde(rename = "N")]
    n_terms: Option<usize>,
    lambda_hat: Option<f64>,
}

pub fn fit(args: &FitArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let started_at = now();
    let method: Method = args.method.parse().map_err(|_| {
        Failure::usage(format!(
            "unknown method `{}` (expected one of lingeo, linfre, lincos, locgeo, locfre, trigeo, trifre)",
            args.method
        ))
    })?;
    if let Some(h) = args.h {
        if !(h > 0.0) {
            return Err(Failure::usage(format!("--h must be positive, got {h}")));
        }
    }
    if args.n_terms == Some(0) {
        return Err(Failure::usage("--N must be at least 1"));
    }
    let data = io::read_dataset(&args.data)?;
    let mut cfg = FitConfig { reflect: args.reflect, ..FitConfig::default() };
    cfg.opts = cfg.opts.with_seed(args.seed);
    cfg.lambda_max = Some(args.lambda_max.unwrap_or(4.0 * std::f64::consts::PI));
    if let Some(v) = args.vmax {
        if !(v > 0.0) {
            return Err(Failure::usage(format!("--vmax must be positive, got {v}")));
        }
        cfg.speed_bound = v;
    }
    if method == Method::LinCos && data.space != SpaceKind::Sphere(2) {
        return Err(Failure::usage("lincos needs data on S^2"));
    }

    let (hyper, selected_by) = if args.loocv && (method.uses_bandwidth() || method.uses_terms()) {
        let h = loocv_select(&data, method, &default_candidates(method), &cfg).map_err(Failure::numeric)?;
        (h, "loocv")
    } else if method.uses_bandwidth() {
        match args.h {
            Some(h) => (Hyper::Bandwidth(h), "fixed"),
            None => return Err(Failure::usage(format!("{method} needs --h or --loocv"))),
        }
    } else if method.uses_terms() {
        match args.n_terms {
            Some(n) => (Hyper::Terms(n), "fixed"),
            None => (Hyper::None, "default"),
        }
    } else {
        (Hyper::None, "none")
    };

    let estimate = fit_method(method, &data, hyper, &cfg).map_err(Failure::numeric)?;
    let trace = sphere_trace(&estimate.trace)?;
    io::write_trace(&args.out, &trace)?;

    let hyper = estimate.hyper;
    let summary = FitSummary {
        method,
        hyper,
        selected_by,
        h: matches!(hyper, Hyper::Bandwidth(_)).then(|| hyper.value()),
        n_terms: if let Hyper::Terms(n) = hyper { Some(n) } else { None },
        lambda_hat: matches!(hyper, Hyper::Speed(_)).then(|| hyper.value()),
    };
    let echo = FitEcho {
        data: display(&args.data),
        method,
        h: args.h,
        n_terms: args.n_terms,
        loocv: args.loocv,
        lambda_max: cfg.lambda_max,
        vmax: args.vmax,
        reflect: args.reflect,
        trace_size: cfg.trace_size,
    };
    let manifest = RunManifest {
        version: VERSION,
        seed: args.seed,
        config: echo,
        started_at,
        elapsed_s: started.elapsed().as_secs_f64(),
        outputs: vec![display(&args.out)],
        results: summary,
    };
    io::write_manifest(&args.out, &manifest)
}

const MISE_HEADER: [&str; 10] = ["setting", "curve", "speed", "n", "sd", "method", "mise", "se", "reps", "flag"];

#[derive(Serialize)]
struct MiseRow {
    setting: usize,
    method: Method,
    mise: f64,
    se: f64,
    reps: usize,
    hypers: Vec<Hyper>,
}

/// One row per setting and one `mise (se)` column per method.
fn wide_mise_table(cfg: &MiseConfig, results: &[MiseRow]) -> String {
    let mut header = vec!["n".to_string(), "sd".to_string(), "curve".to_string(), "speed".to_string()];
    header.extend(cfg.methods.iter().map(|m| m.to_string()));
    let rows: Vec<Vec<String>> = cfg
        .settings
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut row = vec![
                s.n.to_string(),
                s.sd.to_string(),
                format!("{:?}", s.curve).to_lowercase(),
                s.speed.map(|v| format!("{v:.5}")).unwrap_or_default(),
            ];
            row.extend(cfg.methods.iter().map(|m| {
                results
                    .iter()
                    .find(|r| r.setting == i + 1 && r.method == *m)
                    .map(|r| format!("{:.5} ({:.5})", r.mise, r.se))
                    .unwrap_or_default()
            }));
            row
        })
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut text = io::render_text_table(&header, &rows);
    text.push_str(&format!("MISE (standard error) over {} replications", cfg.reps));
    if cfg.reps == 1 {
        text.push_str("; se undefined for a single replication");
    }
    text.push('\n');
    text
}

pub fn mise(args: &ExperimentArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let started_at = now();
    let mut cfg: MiseConfig = config::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(reps) = args.reps {
        cfg.reps = reps;
    }
    let experiments = cfg.experiments()?;
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for (setting, exp) in &experiments {
        let res = run_mise(exp).map_err(Failure::numeric)?;
        let s = &cfg.settings[*setting];
        let flag = if exp.replications == 1 { "se_undefined" } else { "" };
        rows.push(vec![
            (setting + 1).to_string(),
            format!("{:?}", s.curve).to_lowercase(),
            s.speed.map(|v| v.to_string()).unwrap_or_default(),
            s.n.to_string(),
            s.sd.to_string(),
            exp.method.to_string(),
            format!("{:.5}", res.mise),
            format!("{:.5}", res.se),
            exp.replications.to_string(),
            flag.to_string(),
        ]);
        results.push(MiseRow {
            setting: setting + 1,
            method: exp.method,
            mise: res.mise,
            se: res.se,
            reps: exp.replications,
            hypers: res.hypers,
        });
    }
    io::write_table(&args.out, &MISE_HEADER, &rows)?;
    let text = wide_mise_table(&cfg, &results);
    let text_path = sibling(&args.out, "txt");
    io::write_text(&text_path, &text)?;
    print!("{text}");
    let manifest = RunManifest {
        version: VERSION,
        seed: cfg.seed,
        config: &cfg,
        started_at,
        elapsed_s: started.elapsed().as_secs_f64(),
        outputs: vec![display(&args.out), display(&text_path)],
        results,
    };
    io::write_manifest(&args.out, &manifest)
}

#[derive(Serialize)]
struct RateSummary {
    slope: f64,
    degenerate: bool,
    strictly_decreasing: bool,
    target_exponent: Option<f64>,
    ns: Vec<usize>,
    mises: Vec<f64>,
    ses: Vec<f64>,
}

pub fn rate(args: &ExperimentArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let started_at = now();
    let mut cfg: RateConfig = config::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(reps) = args.reps {
        cfg.reps = reps;
    }
    let check = cfg.rate_check()?;
    let res = rate_check(&check).map_err(Failure::numeric)?;
    let header = ["n", "mise", "se"];
    let rows: Vec<Vec<String>> = res
        .ns
        .iter()
        .zip(&res.mises)
        .zip(&res.ses)
        .map(|((n, m), s)| vec![n.to_string(), fmt_f64(*m), fmt_f64(*s)])
        .collect();
    io::write_table(&args.out, &header, &rows)?;
    let mut text = io::render_text_table(&header, &rows);
    text.push_str(&format!("slope {:.4}", res.slope));
    if let Some(target) = cfg.target_exponent {
        text.push_str(&format!(" (target {target:.4})"));
    }
    if res.degenerate {
        text.push_str(" [degenerate: noiseless setting]");
    }
    text.push('\n');
    let text_path = sibling(&args.out, "txt");
    io::write_text(&text_path, &text)?;
    print!("{text}");
    let manifest = RunManifest {
        version: VERSION,
        seed: cfg.seed,
        config: &cfg,
        started_at,
        elapsed_s: started.elapsed().as_secs_f64(),
        outputs: vec![display(&args.out), display(&text_path)],
        results: RateSummary {
            slope: res.slope,
            degenerate: res.degenerate,
            strictly_decreasing: res.strictly_decreasing(),
            target_exponent: cfg.target_exponent,
            ns: res.ns.clone(),
            mises: res.mises.clone(),
            ses: res.ses.clone(),
        },
    };
    io::write_manifest(&args.out, &manifest)
}

fn require_s2(dim: usize, path: &Path) -> Result<(), Failure> {
    if dim == 3 {
        Ok(())
    } else {
        Err(Failure::usage(format!("{}: plotting needs points on S^2, found dimension {}", path.display(), dim - 1)))
    }
}

pub fn plot(args: &PlotArgs) -> Result<(), Failure> {
    if args.data.is_none() && args.truth.is_none() && args.pred.is_empty() {
        return Err(Failure::usage("nothing to plot: give --data, --truth or --pred"));
    }
    let data = args.data.as_deref().map(io::read_dataset).transpose()?;
    if let (Some(d), Some(path)) = (&data, &args.data) {
        require_s2(d.space.ambient_dim(), path)?;
    }
    let truth = args.truth.as_deref().map(io::read_trace).transpose()?;
    if let (Some(t), Some(path)) = (&truth, &args.truth) {
        require_s2(t.first().map_or(3, |(_, p)| p.ambient_dim()), path)?;
    }
    let mut preds = Vec::new();
    for path in &args.pred {
        let trace = io::read_trace(path)?;
        require_s2(trace.first().map_or(3, |(_, p)| p.ambient_dim()), path)?;
        let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        preds.push((label, trace));
    }
    let svg = plot::render(&PlotInput { data: data.as_ref(), truth: truth.as_deref(), preds, gridlines: args.gridlines });
    io::write_text(&args.out, &svg)
}
