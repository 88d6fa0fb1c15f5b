use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use phasefront::fractal::{dimension_sweep, Thresholds};
use phasefront::landscape::{
    load, render, save, sweep, tradeoff_scan, write_atomic, zoom, Axis, LandscapeGrid, Region, Scale, SweepOptions,
    SweepSpec,
};
use phasefront::meanfield::{mean_field_point, trace_boundary, BoundarySearch, QuadratureRule, SolverOptions};
use phasefront::nets::{Activation, InputMode, TopologyConfig};
use phasefront::par::Executor;
use serde_json::{Map, Value};

use crate::args::*;
use crate::progress::reporter;

#[derive(Debug)]
pub enum CliError {
    /// Bad or conflicting arguments; exit code 1.
    Usage(String),
    /// Failure while running; exit code 2.
    Runtime(String),
}

impl From<phasefront::Error> for CliError {
    fn from(e: phasefront::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(msg.to_string())
}

/// Files written by a command, the first being the primary output.
pub type Outputs = Vec<PathBuf>;

/// Outcome of a command: its files and the effective parameters
/// (flags, config and defaults, with derived defaults filled in).
pub struct Ran {
    pub outputs: Outputs,
    pub parameters: Value,
}

fn with_params<T: serde::Serialize>(args: &T, run: impl FnOnce(&mut Value) -> CliResult<Outputs>) -> CliResult<Ran> {
    let mut parameters = serde_json::to_value(args).expect("arguments serialize");
    let outputs = run(&mut parameters)?;
    Ok(Ran { outputs, parameters })
}

pub fn run(command: &Command) -> CliResult<Ran> {
    match command {
        Command::Sweep(a) => with_params(a, |p| run_sweep(a, p)),
        Command::Zoom(a) => with_params(a, |p| run_zoom(a, p)),
        Command::Tradeoff(a) => with_params(a, |p| run_tradeoff(a, p)),
        Command::Meanfield(a) => with_params(a, |_| run_meanfield(a)),
        Command::Boundary(a) => with_params(a, |_| run_boundary(a)),
        Command::Fracdim(a) => with_params(a, |_| run_fracdim(a)),
        Command::Render(a) => with_params(a, |_| run_render(a)),
    }
}

/// Parameters echoed into data files: everything that determines the bytes,
/// without paths or resource limits.
pub fn echoed_parameters(params: &Value) -> Map<String, Value> {
    let mut map = params.as_object().cloned().unwrap_or_default();
    for key in ["out", "parent", "grid", "plot", "mem_budget"] {
        map.remove(key);
    }
    map
}

pub fn parse_bytes(text: &str) -> CliResult<usize> {
    let t = text.trim();
    let (digits, mult) = match t.char_indices().last() {
        Some((i, 'K' | 'k')) => (&t[..i], 1usize << 10),
        Some((i, 'M' | 'm')) => (&t[..i], 1 << 20),
        Some((i, 'G' | 'g')) => (&t[..i], 1 << 30),
        _ => (t, 1),
    };
    digits
        .trim()
        .parse::<usize>()
        .ok()
        .and_then(|n| n.checked_mul(mult))
        .ok_or_else(|| usage(format!("invalid memory budget `{text}` (expected bytes, optionally with K, M or G)")))
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> CliResult<Vec<T>> {
    text.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| usage(format!("invalid {what} `{}` in `{text}`", s.trim()))))
        .collect()
}

/// Network shape from the flags; a defaulted conv kernel is written back into
/// `params`.
fn topology(net: &NetworkArgs, params: &mut Value) -> CliResult<TopologyConfig> {
    if net.kernel.is_some() && net.topology != "conv" {
        return Err(usage(format!("--kernel only applies to --topology conv, not {}", net.topology)));
    }
    let activation: Activation = net.activation.parse().map_err(usage)?;
    let cfg =
        TopologyConfig::from_name(&net.topology, net.width, net.kernel).map_err(usage)?.with_activation(activation);
    if cfg.kind == phasefront::nets::TopologyKind::Conv {
        params["kernel"] = cfg.kernel_size.into();
    }
    Ok(cfg)
}

fn input_mode(perturb: &str) -> CliResult<InputMode> {
    if perturb.eq_ignore_ascii_case("off") {
        return Ok(InputMode::Independent);
    }
    let epsilon: f64 =
        perturb.parse().map_err(|_| usage(format!("--perturb expects a number or `off`, got `{perturb}`")))?;
    let mode = InputMode::Perturbed { epsilon };
    mode.validate().map_err(usage)?;
    Ok(mode)
}

fn sweep_options(mem_budget: &str, label: &'static str) -> CliResult<SweepOptions> {
    Ok(SweepOptions {
        executor: Executor::Parallel,
        mem_budget: parse_bytes(mem_budget)?,
        progress: Some(reporter(label)),
    })
}

fn save_with_params(mut grid: LandscapeGrid, params: Map<String, Value>, out: &Path) -> CliResult<()> {
    grid.metadata.extra.insert("parameters".into(), Value::Object(params));
    save(&grid, out)?;
    Ok(())
}

fn run_sweep(a: &SweepArgs, params: &mut Value) -> CliResult<Outputs> {
    let cfg = topology(&a.network, params)?;
    let spec =
        SweepSpec::new(cfg, a.network.seed).with_depth(a.depth, a.avg_last).with_input_mode(input_mode(&a.perturb)?);
    spec.validate().map_err(usage)?;
    let r = &a.region;
    let region = Region::new(
        Axis::new(r.sw_min, r.sw_max, a.res_sw.unwrap_or(a.res)),
        Axis::new(r.sb_min, r.sb_max, a.res_sb.unwrap_or(a.res)),
    )
    .map_err(usage)?;
    if !cfg.is_reference_structured() {
        log::warn!("structured variant outside the fdf/fdfd presets");
    }
    log::info!(
        "sweeping {} cells: {} N={} depth {} (kernel {})",
        region.cells(),
        cfg.name(),
        cfg.width,
        a.depth,
        cfg.kernel_size
    );
    let grid = sweep(&spec, &region, &sweep_options(&a.mem_budget, "sweep")?)?;
    save_with_params(grid, echoed_parameters(params), &a.out)?;
    Ok(vec![a.out.clone()])
}

fn run_zoom(a: &ZoomArgs, params: &mut Value) -> CliResult<Outputs> {
    let parent = load(&a.parent)?;
    let res_w = a.res.unwrap_or(parent.metadata.sigma_w.count);
    let res_b = a.res.unwrap_or(parent.metadata.sigma_b.count);
    if a.res.is_none() && res_w == res_b {
        params["res"] = res_w.into();
    }
    let region =
        Region::new(Axis::new(a.sw_min, a.sw_max, res_w), Axis::new(a.sb_min, a.sb_max, res_b)).map_err(usage)?;
    let grid = zoom(&parent, &region, &sweep_options(&a.mem_budget, "zoom")?)?;
    save_with_params(grid, echoed_parameters(params), &a.out)?;
    Ok(vec![a.out.clone()])
}

fn run_tradeoff(a: &TradeoffArgs, params: &mut Value) -> CliResult<Outputs> {
    let cfg = topology(&a.network, params)?;
    let sws: Vec<f64> = parse_list(&a.sw_list, "σ_w")?;
    let depths: Vec<usize> = parse_list(&a.depths, "depth")?;
    if !(a.epsilon > 0.0) {
        return Err(usage("--epsilon must be positive"));
    }
    let options = SweepOptions { progress: None, ..sweep_options(&a.mem_budget, "tradeoff")? };
    let rows = tradeoff_scan(&cfg, a.sb, &sws, &depths, a.network.seed, a.epsilon, &options)?;
    let mut csv = String::from("sigma_w,sigma_b,depth,l_independent,l_perturbed\n");
    for r in rows {
        let _ =
            writeln!(csv, "{},{},{},{},{}", num(r.sigma_w), num(a.sb), r.depth, num(r.independent), num(r.perturbed));
    }
    write_atomic(&a.out, csv.as_bytes())?;
    Ok(vec![a.out.clone()])
}

fn solver(a: &SolverArgs) -> CliResult<(Activation, QuadratureRule, SolverOptions)> {
    let activation: Activation = a.activation.parse().map_err(usage)?;
    let rule = QuadratureRule::gauss_hermite(a.order).map_err(usage)?;
    if !(a.solver_tol > 0.0) || a.max_iter == 0 {
        return Err(usage("--solver-tol and --max-iter must be positive"));
    }
    Ok((activation, rule, SolverOptions { tol: a.solver_tol, max_iter: a.max_iter }))
}

fn run_meanfield(a: &MeanfieldArgs) -> CliResult<Outputs> {
    let (activation, rule, opts) = solver(&a.solver)?;
    let r = &a.region;
    let region = Region::square((r.sw_min, r.sw_max), (r.sb_min, r.sb_max), a.res).map_err(usage)?;
    let points = region.points();
    let results = Executor::Parallel.map(points.len(), |i| {
        let (w, b) = points[i];
        mean_field_point(w, b, activation, &rule, opts)
    });
    let mut csv = String::from("sigma_w,sigma_b,nu,c12,divergence\n");
    let mut failures = 0;
    for ((w, b), res) in points.iter().zip(results) {
        match res {
            Ok(p) => {
                let _ = writeln!(csv, "{},{},{},{},{}", num(*w), num(*b), num(p.nu), num(p.c12), num(p.divergence));
            }
            Err(e) => {
                failures += 1;
                log::warn!("σ_w = {w}, σ_b = {b}: {e}");
                let _ = writeln!(csv, "{},{},,,", num(*w), num(*b));
            }
        }
    }
    if failures > 0 {
        log::warn!("{failures} of {} cells did not converge; their fields are empty", points.len());
    }
    write_atomic(&a.out, csv.as_bytes())?;
    Ok(vec![a.out.clone()])
}

/// Shortest round-trip text, in exponent form outside `[1e-4, 1e15)`.
fn num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) || !v.is_finite() {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn run_boundary(a: &BoundaryArgs) -> CliResult<Outputs> {
    let (activation, rule, solver) = solver(&a.solver)?;
    if a.sb_count == 0 || a.sb_min > a.sb_max {
        return Err(usage("σ_b rows need --sb-count ≥ 1 and --sb-min ≤ --sb-max"));
    }
    let sbs: Vec<f64> =
        if a.sb_count == 1 { vec![a.sb_min] } else { Axis::new(a.sb_min, a.sb_max, a.sb_count).values() };
    let search = BoundarySearch { sigma_w_min: a.sw_min, sigma_w_max: a.sw_max, tol: a.tol, activation, solver };
    let rows = trace_boundary(a.tau, &sbs, &search, &rule, Executor::Parallel).map_err(usage)?;
    let mut csv = String::from("sigma_b,sigma_w,warning\n");
    for r in rows {
        let sw = r.sigma_w.map(num).unwrap_or_default();
        let _ = writeln!(csv, "{},{sw},{}", num(r.sigma_b), csv_field(r.warning.as_deref().unwrap_or("")));
    }
    write_atomic(&a.out, csv.as_bytes())?;
    Ok(vec![a.out.clone()])
}

fn run_fracdim(a: &FracdimArgs) -> CliResult<Outputs> {
    let thresholds = match a.thresholds.trim().parse::<usize>() {
        Ok(0) => return Err(usage("--thresholds count must be positive")),
        Ok(n) => Thresholds::Quantiles(n),
        Err(_) => Thresholds::Explicit(parse_list(&a.thresholds, "threshold")?),
    };
    let grid = load(&a.grid)?;
    let scales = match (a.jmin, a.jmax) {
        (None, None) => None,
        (lo, hi) => {
            let (d_lo, d_hi) = phasefront::fractal::default_scales(grid.rows().max(grid.cols()));
            Some((lo.unwrap_or(d_lo), hi.unwrap_or(d_hi)))
        }
    };
    let report = dimension_sweep(&grid, &thresholds, scales, Executor::Parallel)?;
    log::info!("Δ̂_max = {:.4} at τ = {}", report.best.dimension, report.best.tau);
    let json = serde_json::to_vec_pretty(&report).expect("report serializes");
    write_atomic(&a.out, &json)?;
    let mut outputs = vec![a.out.clone()];
    if let Some(plot) = &a.plot {
        let mut csv = String::from("tau,j,ln_count\n");
        for rec in &report.records {
            for &(j, n) in &rec.box_counts {
                let _ = writeln!(csv, "{},{j},{}", num(rec.tau), num((n as f64).ln()));
            }
        }
        write_atomic(plot, csv.as_bytes())?;
        outputs.push(plot.clone());
    }
    Ok(outputs)
}

fn run_render(a: &RenderArgs) -> CliResult<Outputs> {
    let scale: Scale = a.scale.parse().map_err(usage)?;
    let grid = load(&a.grid)?;
    render(&grid, &a.out, scale)?;
    Ok(vec![a.out.clone()])
}
