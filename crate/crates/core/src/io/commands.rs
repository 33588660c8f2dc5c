//! One function per CLI command; each writes its artifacts and a manifest.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{InitialField, RunConfig};
use super::output::{read_field_values, Cell, FileEntry, OutputDir};
use crate::dispersion::{self, Rect, TIGHT_TOL};
use crate::error::{Error, Result};
use crate::grid::{GridField, GridSpec};
use crate::mode;
use crate::params::FluidParams;
use crate::simulator::{self, SimulationRun};
use crate::symbol::{self, Complex64};
use crate::witness;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Symbol,
    Curve,
    Max,
    Zeros,
    Profile,
    Witness,
    Simulate,
}

/// Stable process exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ConfigInvalid(_)
        | Error::InvalidParams(_)
        | Error::DegenerateInput(_)
        | Error::GridTooCoarse(_)
        | Error::BoxTooSmall { .. }
        | Error::EpsilonTooLarge { .. }
        | Error::ZeroFrequencyTouched(_) => 1,
        Error::StableConfiguration | Error::OutOfBand { .. } => 2,
        Error::NoConvergence(_)
        | Error::SingularSystem(_)
        | Error::DivisionBreakdown(_)
        | Error::OverflowGuard { .. } => 3,
        Error::ContourTooCoarse(_) | Error::ZeroOnBoundary { .. } => 4,
        Error::Io(_) => 5,
    }
}

#[derive(Serialize)]
struct Manifest<'a, S> {
    command: Command,
    config: &'a RunConfig,
    summary: S,
}

/// Run `cmd`, writing into `out`. `seed` overrides a white-noise seed.
pub fn run_command(cmd: Command, cfg: &RunConfig, out: &Path, seed: Option<u64>) -> Result<Vec<FileEntry>> {
    let mut cfg = cfg.clone().validated()?;
    if let (Some(s), InitialField::WhiteNoise { seed, .. }) = (seed, &mut cfg.simulate.initial) {
        *seed = s;
    }
    let mut dir = OutputDir::create(out)?;
    let summary = match cmd {
        Command::Symbol => run_symbol(&cfg, &mut dir)?,
        Command::Curve => run_curve(&cfg, &mut dir)?,
        Command::Max => run_max(&cfg, &mut dir)?,
        Command::Zeros => run_zeros(&cfg, &mut dir)?,
        Command::Profile => run_profile(&cfg, &mut dir)?,
        Command::Witness => run_witness(&mut cfg, &mut dir)?,
        Command::Simulate => run_simulate(&cfg, &mut dir)?,
    };
    dir.finish(&Manifest { command: cmd, config: &cfg, summary })
}

fn value<T: Serialize>(v: T) -> Result<serde_json::Value> {
    serde_json::to_value(v).map_err(|e| Error::Io(e.to_string()))
}

fn run_symbol(cfg: &RunConfig, dir: &mut OutputDir) -> Result<serde_json::Value> {
    let rows = cfg
        .symbol
        .points
        .iter()
        .map(|pt| {
            let lam = Complex64::new(pt.lambda_re, pt.lambda_im);
            let s = symbol::symbol_s(lam, pt.tau, &cfg.params)?;
            Ok(vec![Cell::F(pt.lambda_re), Cell::F(pt.lambda_im), Cell::F(pt.tau), Cell::F(s.re), Cell::F(s.im), Cell::F(s.norm())])
        })
        .collect::<Result<Vec<_>>>()?;
    dir.write_csv("symbol.csv", &["lambda_re", "lambda_im", "tau", "s_re", "s_im", "s_abs"], &rows)?;
    value(serde_json::json!({ "points": rows.len() }))
}

fn run_curve(cfg: &RunConfig, dir: &mut OutputDir) -> Result<serde_json::Value> {
    let c = dispersion::dispersion_curve(&cfg.params, cfg.curve.n_points, cfg.curve.tol)?;
    let rows: Vec<Vec<Cell>> = (0..c.taus.len())
        .map(|i| vec![Cell::F(c.taus[i]), Cell::F(c.lambdas[i]), Cell::F(c.residuals[i])])
        .collect();
    dir.write_csv("curve.csv", &["tau", "lambda", "residual"], &rows)?;
    let worst = c.residuals.iter().cloned().fold(0.0, f64::max);
    value(serde_json::json!({ "tau_star": c.tau_star, "max_residual": worst }))
}

#[derive(Serialize)]
struct MaxReport {
    tau_star: f64,
    tau_max: f64,
    lambda_inf: f64,
    bracket_width: f64,
    c_small: f64,
    c_star: f64,
}

fn run_max(cfg: &RunConfig, dir: &mut OutputDir) -> Result<serde_json::Value> {
    let p = &cfg.params;
    let g = dispersion::max_growth(p, cfg.max.tol)?;
    let (c_small, c_star) = dispersion::asymptotic_constants(p)?;
    let report = MaxReport {
        tau_star: dispersion::cutoff_wavenumber(p)?,
        tau_max: g.tau_max,
        lambda_inf: g.lambda_inf,
        bracket_width: g.bracket_width,
        c_small,
        c_star,
    };
    dir.write_json("max.json", &report)?;
    value(report)
}

#[derive(Serialize)]
struct ZeroEntry {
    tau: f64,
    count: usize,
    winding_residual: f64,
    region: Rect,
    /// Centre of the isolating box when exactly one zero was counted.
    root: Option<[f64; 2]>,
}

fn default_taus(p: &FluidParams) -> Result<Vec<f64>> {
    if p.is_heavy_on_top() {
        let ts = dispersion::cutoff_wavenumber(p)?;
        Ok([0.1, 0.25, 0.5, 0.75, 0.9, 1.25, 1.5, 2.0].iter().map(|f| f * ts).collect())
    } else {
        Ok(vec![0.1, 0.5, 1.0, 2.0, 5.0])
    }
}

fn run_zeros(cfg: &RunConfig, dir: &mut OutputDir) -> Result<serde_json::Value> {
    let p = &cfg.params;
    let taus = if cfg.zeros.taus.is_empty() { default_taus(p)? } else { cfg.zeros.taus.clone() };
    let entries = taus
        .par_iter()
        .map(|&tau| {
            let region = cfg.zeros.region.unwrap_or_else(|| dispersion::default_region(tau, p));
            let zc = dispersion::count_zeros_rhp(tau, p, &region)?;
            let root = if zc.count == 1 {
                let size = 1e-9 * region.width().max(region.height());
                let r = dispersion::localize_zero(tau, p, &region, size)?.center();
                Some([r.re, r.im])
            } else {
                None
            };
            Ok(ZeroEntry { tau, count: zc.count, winding_residual: zc.winding_residual, region, root })
        })
        .collect::<Result<Vec<_>>>()?;
    dir.write_json("zeros.json", &entries)?;
    value(serde_json::json!({ "taus": taus.len(), "total_zeros": entries.iter().map(|e| e.count).sum::<usize>() }))
}

fn run_profile(cfg: &RunConfig, dir: &mut OutputDir) -> Result<serde_json::Value> {
    let p = &cfg.params;
    let b = &cfg.profile;
    let lambda = match b.lambda {
        Some(l) => l,
        None => dispersion::growth_rate(b.tau, p, TIGHT_TOL)?,
    };
    let lam = Complex64::new(lambda, 0.0);
    let prof = mode::solve_mode(lam, b.tau, Complex64::new(b.h_amp, 0.0), p)?;
    let residual = mode::residual_check(&prof, p, 20);
    // three decay lengths of the slowest exponential on each side
    let decay = [crate::Phase::Lower, crate::Phase::Upper]
        .iter()
        .map(|&ph| 1.0 / mode::viscous_exponent(ph, lam, b.tau, p).re)
        .fold(1.0 / b.tau, f64::max);
    let extent = 3.0 * decay;
    let rows: Vec<Vec<Cell>> = (0..b.n_samples)
        .map(|i| {
            let y = -extent + 2.0 * extent * i as f64 / (b.n_samples - 1) as f64;
            let m = prof.eval(y, p);
            vec![Cell::F(y), Cell::F(m.v.re), Cell::F(m.v.im), Cell::F(m.w.re), Cell::F(m.w.im), Cell::F(m.pi.re), Cell::F(m.pi.im)]
        })
        .collect();
    dir.write_csv("profile.csv", &["y", "v_re", "v_im", "w_re", "w_im", "pi_re", "pi_im"], &rows)?;
    #[derive(Serialize)]
    struct Report {
        profile: mode::ModeProfile,
        residual: f64,
        normal_stress_defect: Complex64,
        y_extent: f64,
    }
    let report = Report { profile: prof, residual, normal_stress_defect: prof.normal_stress_defect(p), y_extent: extent };
    dir.write_json("profile.json", &report)?;
    value(serde_json::json!({ "lambda": lambda, "residual": residual }))
}

fn run_witness(cfg: &mut RunConfig, dir: &mut OutputDir) -> Result<serde_json::Value> {
    let p = cfg.params;
    let w = cfg.witness.clone();
    let tau0 = if w.grid.map_or(w.dim, |g| g.dim) == 1 { w.xi0[0].abs() } else { w.xi0[0].hypot(w.xi0[1]) };
    let eps: Vec<f64> = w.epsilons.iter().map(|f| f * tau0).collect();
    let eps_min = eps.iter().cloned().fold(f64::INFINITY, f64::min);
    let spec = match w.grid {
        Some(g) => g,
        None => witness::grid_for(w.dim, w.n, eps_min)?,
    };
    // record the grid actually used
    cfg.witness.grid = Some(spec);
    let on_curve = w.lambda0.is_none();
    let lambda0 = match w.lambda0 {
        Some(l) => l,
        None => dispersion::growth_rate(tau0, &p, TIGHT_TOL)?,
    };
    let samples = eps
        .iter()
        .map(|&e| witness::witness_ratio(w.xi0, e, lambda0, &p, w.norm_p, spec))
        .collect::<Result<Vec<_>>>()?;
    let n_over_p = spec.dim as f64 / w.norm_p;
    let rows: Vec<Vec<Cell>> = samples
        .iter()
        .map(|s| {
            let scaled = s.epsilon.powf(n_over_p) * s.h_norm;
            vec![Cell::F(s.epsilon), Cell::F(s.h_norm), Cell::F(s.g_norm), Cell::F(s.ratio), Cell::F(scaled)]
        })
        .collect();
    dir.write_csv("witness.csv", &["epsilon", "h_norm", "g_norm", "ratio", "scaled_h_norm"], &rows)?;
    let symbol_abs = symbol::symbol_s(Complex64::new(lambda0, 0.0), tau0, &p)?.norm();
    let slope = if samples.len() >= 2 { Some(witness::loglog_slope(&samples)) } else { None };
    let report = serde_json::json!({
        "tau0": tau0,
        "lambda0": lambda0,
        "on_curve": on_curve,
        "symbol_abs": symbol_abs,
        "slope": slope,
        "grid": spec,
    });
    dir.write_json("witness.json", &report)?;
    let window = witness::build_window(eps_min, spec)?;
    let h = witness::build_heps(w.xi0, eps_min, &window)?;
    dir.write_field("heps", &h, &serde_json::json!({ "xi0": w.xi0, "epsilon": eps_min }))?;
    Ok(report)
}

fn initial_field(cfg: &RunConfig) -> Result<GridField> {
    let spec: GridSpec = cfg.simulate.grid;
    match &cfg.simulate.initial {
        InitialField::PureMode { mode, amplitude } => simulator::pure_mode(spec, *mode, *amplitude),
        InitialField::WhiteNoise { seed, amplitude } => simulator::white_noise(spec, *seed, *amplitude),
        InitialField::File { path } => GridField::from_values(spec, read_field_values(path, spec.len())?),
    }
}

fn run_simulate(cfg: &RunConfig, dir: &mut OutputDir) -> Result<serde_json::Value> {
    let field0 = initial_field(cfg)?;
    let mut run = SimulationRun::new(field0, cfg.params, cfg.simulate.times.clone())?;
    let t = &run.table;
    let rows: Vec<Vec<Cell>> = (0..t.len())
        .map(|i| {
            let tag = serde_json::to_value(t.provenance[i]).ok().and_then(|v| v.as_str().map(String::from));
            vec![
                Cell::U(t.keys[i]),
                Cell::F(t.wavenumbers[i]),
                Cell::F(t.rates[i].re),
                Cell::F(t.rates[i].im),
                Cell::S(tag.unwrap_or_default()),
                Cell::U(t.multiplicity[i] as u64),
            ]
        })
        .collect();
    dir.write_csv("table.csv", &["key", "wavenumber", "rate_re", "rate_im", "provenance", "multiplicity"], &rows)?;

    let mut blow_up = None;
    let mut diag_rows = Vec::new();
    for (i, &time) in cfg.simulate.times.iter().enumerate() {
        let snap = match simulator::evolve(&run, time) {
            Ok(f) => f,
            Err(Error::OverflowGuard { blow_up_time }) => {
                blow_up = Some(blow_up_time);
                break;
            }
            Err(e) => return Err(e),
        };
        let d = simulator::diagnostics(&run, time)?;
        diag_rows.push(vec![
            Cell::F(time),
            Cell::F(d.peak_wavenumber),
            Cell::F(d.ratio_peak_wavenumber),
            Cell::F(d.l2_amplitude),
            Cell::F(d.max_height),
            Cell::F(d.efolds),
        ]);
        dir.write_field(&format!("snap_{i:03}"), &snap, &serde_json::json!({ "time": time }))?;
        run.snapshots.push(snap);
    }
    dir.write_csv(
        "diagnostics.csv",
        &["time", "peak_wavenumber", "ratio_peak_wavenumber", "l2_amplitude", "max_height", "efolds"],
        &diag_rows,
    )?;
    let counts: serde_json::Map<String, serde_json::Value> = run
        .table
        .provenance_counts()
        .into_iter()
        .map(|(tag, n)| {
            let key = serde_json::to_value(tag).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            (key, n.into())
        })
        .collect();
    let suspect = run.table.multiplicity.iter().filter(|&&m| m > 1).count();
    value(serde_json::json!({
        "grid": run.table.spec,
        "schedule": cfg.simulate.times,
        "snapshots": run.snapshots.len(),
        "provenance_counts": counts,
        "multiplicity_suspect": suspect,
        "blow_up_time": blow_up,
    }))
}
