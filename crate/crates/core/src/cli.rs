//! Batch front end: run configuration, dispatch, CSV/JSON emission and the run manifest.
//!
//! CSV columns (stable):
//! - `spectrum.csv`, `eigencurve.csv`, `scan.csv`: lambda, mu_sq, wronskian_residual, oscillation_count, b_coeff, method
//! - `measure.csv`: xi, omega, a_abs_sq, method, lambda, potential_kind
//! - `frames.csv`: t, r, psi, psi_t
//! - `diagnostics.csv`: t, energy, h0_distance, local_energy, mode_amplitude, s_norm_partial
//! - `harmonic.csv`: r, psi, psi_r, residual
//! - `eigenfunction.csv`: r, phi
//! - `mode.csv`: t, amplitude
//! - `verify.csv`: name, value, tolerance, passed

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::checks::run_suite;
use crate::error::{Error, Result};
use crate::evolve::{evolve, internal_mode_experiment, linf_energy_bound_check, Evolver, EvolverConfig, WaveState};
use crate::geometry::{bogomolnyi_decomposition, harmonic_residual, profile_energy, HarmonicFamily, Target};
use crate::numerics::{log_grid, loglog_slope};
use crate::operators::{assemble, OperatorKind};
use crate::profile::uniform_grid;
use crate::spectral::{
    gap_eigenvalue, matrix_oracle, resonance_scan, GapOutcome, Method, OracleConfig, ShootingConfig,
};
use crate::weyl::{free_sample, spectral_density, MeasureMethod};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Harmonic map profile, energy and Bogomolnyi split.
    Harmonic,
    /// Gap eigenvalue at one lambda, with the matrix oracle.
    Spectrum,
    /// Gap eigenvalue over a lambda range.
    Eigencurve,
    /// Locate the threshold-resonance transition in a lambda range.
    ResonanceScan,
    /// Spectral density omega(xi) on a log grid.
    Measure,
    /// Nonlinear evolution of a perturbed harmonic map.
    Evolve,
    /// Internal-mode oscillation frequency at large lambda.
    ModeExperiment,
    /// Run the invariant suite.
    #[default]
    Verify,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub command: Command,
    pub target: Target,
    pub lambda: Option<f64>,
    pub lambda_range: Option<[f64; 2]>,
    pub lambda_step: Option<f64>,
    pub r_max: Option<f64>,
    pub dr: Option<f64>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub tolerance: Option<f64>,
    pub epsilon: Option<f64>,
    pub xi_range: Option<[f64; 2]>,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Verify,
            target: Target::Sphere,
            lambda: None,
            lambda_range: None,
            lambda_step: None,
            r_max: None,
            dr: None,
            dt: None,
            t_end: None,
            tolerance: None,
            epsilon: None,
            xi_range: None,
            output_dir: PathBuf::from("out"),
            seed: 0,
        }
    }
}

fn parse_target(s: &str) -> std::result::Result<Target, String> {
    match s {
        "sphere" | "s2" => Ok(Target::Sphere),
        "hyperbolic-plane" | "hyperbolic" | "h2" => Ok(Target::HyperbolicPlane),
        _ => Err(format!("unknown target '{s}' (sphere | hyperbolic-plane)")),
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON run configuration (or a manifest.json from an earlier run); flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_parser = parse_target)]
    pub target: Option<Target>,
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    #[arg(long, global = true, num_args = 2, value_names = ["LO", "HI"])]
    pub lambda_range: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub lambda_step: Option<f64>,
    #[arg(long, global = true)]
    pub r_max: Option<f64>,
    #[arg(long, global = true)]
    pub dr: Option<f64>,
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    #[arg(long, global = true)]
    pub t_end: Option<f64>,
    /// Integrator tolerance for the spectral solvers.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    #[arg(long, global = true, num_args = 2, value_names = ["LO", "HI"])]
    pub xi_range: Option<Vec<f64>>,
    #[arg(long, short, global = true)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Parser)]
#[command(name = "gapwave", version, about = "Spectral gap and wave-map stability around equivariant harmonic maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub overrides: Overrides,
}

fn pair(v: &Option<Vec<f64>>) -> Option<[f64; 2]> {
    v.as_ref().map(|x| [x[0], x[1]])
}

/// Loads a configuration file; a manifest is accepted through its echoed config.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)?;
    let inner = match v.get("config") {
        Some(c) if v.get("schema_version").is_some() => c.clone(),
        _ => v,
    };
    serde_json::from_value(inner).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

impl Cli {
    /// The effective configuration: file (if any), then flags.
    pub fn resolve(&self) -> Result<RunConfig> {
        let o = &self.overrides;
        let mut c = match &o.config {
            Some(p) => load_config(p)?,
            None => RunConfig::default(),
        };
        c.command = self.command;
        if let Some(t) = o.target {
            c.target = t;
        }
        macro_rules! set {
            ($($f:ident),*) => { $( if o.$f.is_some() { c.$f = o.$f; } )* };
        }
        set!(lambda, lambda_step, r_max, dr, dt, t_end, tolerance, epsilon);
        if o.lambda_range.is_some() {
            c.lambda_range = pair(&o.lambda_range);
        }
        if o.xi_range.is_some() {
            c.xi_range = pair(&o.xi_range);
        }
        if let Some(d) = &o.output_dir {
            c.output_dir = d.clone();
        }
        if let Some(s) = o.seed {
            c.seed = s;
        }
        Ok(c)
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("r_max", self.r_max),
            ("dr", self.dr),
            ("dt", self.dt),
            ("t_end", self.t_end),
            ("lambda_step", self.lambda_step),
            ("tolerance", self.tolerance),
        ];
        for (name, v) in positive {
            if let Some(x) = v {
                if !(x > 0.0 && x.is_finite()) {
                    return Err(Error::Config(format!("{name} = {x} must be positive")));
                }
            }
        }
        if let Some(e) = self.epsilon {
            if !(e >= 0.0 && e.is_finite()) {
                return Err(Error::Config(format!("epsilon = {e} must be nonnegative")));
            }
        }
        if let Some(l) = self.lambda {
            self.target.check_lambda(l)?;
        }
        for (name, r) in [("lambda_range", self.lambda_range), ("xi_range", self.xi_range)] {
            if let Some([lo, hi]) = r {
                if !(lo < hi && lo >= 0.0 && hi.is_finite()) {
                    return Err(Error::Config(format!("{name} [{lo}, {hi}] must satisfy 0 <= lo < hi")));
                }
            }
        }
        if let Some([lo, hi]) = self.lambda_range {
            self.target.check_lambda(lo)?;
            if self.target == Target::HyperbolicPlane && hi >= 1.0 {
                return Err(Error::Domain(format!("lambda = {hi} is not admissible for HyperbolicPlane")));
            }
        }
        if let Some([lo, _]) = self.xi_range {
            if lo <= 0.0 {
                return Err(Error::Config("xi_range must start above 0".into()));
            }
        }
        Ok(())
    }

    fn shooting(&self) -> ShootingConfig {
        let mut s = ShootingConfig::default();
        if let Some(t) = self.tolerance {
            s.integrator_tolerance = t;
        }
        if let Some(r) = self.r_max {
            s.r_max = r;
        }
        s
    }

    fn lambda_or(&self, default: f64) -> f64 {
        self.lambda.unwrap_or(default)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub command: Command,
    pub config: RunConfig,
    pub threads: usize,
    pub seed: u64,
    pub wall_time_s: f64,
    pub status: String,
    pub error: Option<String>,
    pub summary: Map<String, Value>,
    pub files: Vec<String>,
}

/// What a command produced: summary statistics and the files written.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub summary: Map<String, Value>,
    pub files: Vec<String>,
}

impl Outcome {
    fn stat(&mut self, key: &str, v: impl Into<Value>) {
        self.summary.insert(key.into(), v.into());
    }
}

/// Sizes the global thread pool from GAPWAVE_THREADS, if set.
pub fn init_threads() {
    if let Some(n) = std::env::var("GAPWAVE_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn write_csv<T: Serialize>(dir: &Path, name: &str, rows: &[T], out: &mut Outcome) -> Result<()> {
    let mut w = csv::Writer::from_path(dir.join(name))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    out.files.push(name.into());
    Ok(())
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T, out: &mut Outcome) -> Result<()> {
    fs::write(dir.join(name), serde_json::to_string_pretty(value)?)?;
    out.files.push(name.into());
    Ok(())
}

#[derive(Debug, Serialize)]
struct SpectrumRow {
    lambda: f64,
    mu_sq: Option<f64>,
    wronskian_residual: Option<f64>,
    oscillation_count: usize,
    b_coeff: Option<f64>,
    method: Method,
}

impl SpectrumRow {
    fn from_outcome(lambda: f64, g: &GapOutcome) -> Self {
        match g {
            GapOutcome::Eigenvalue(e) => Self {
                lambda,
                mu_sq: Some(e.mu_sq),
                wronskian_residual: Some(e.wronskian_residual),
                oscillation_count: e.oscillation_count,
                b_coeff: None,
                method: e.method,
            },
            GapOutcome::NoEigenvalue { threshold, oscillation_count } => Self {
                lambda,
                mu_sq: None,
                wronskian_residual: None,
                oscillation_count: *oscillation_count,
                b_coeff: Some(threshold.b_coeff),
                method: Method::OscillationCount,
            },
        }
    }
}

#[derive(Debug, Serialize)]
struct MeasureRow {
    xi: f64,
    omega: f64,
    a_abs_sq: f64,
    method: MeasureMethod,
    lambda: f64,
    potential_kind: &'static str,
}

fn harmonic(c: &RunConfig, dir: &Path, out: &mut Outcome) -> Result<()> {
    let fam = HarmonicFamily::new(c.target, c.lambda_or(1.0))?;
    let grid = uniform_grid(c.dr.unwrap_or(0.01), c.r_max.unwrap_or(20.0));
    #[derive(Serialize)]
    struct Row {
        r: f64,
        psi: f64,
        psi_r: f64,
        residual: f64,
    }
    let rows: Vec<Row> = grid
        .iter()
        .map(|&r| Row { r, psi: fam.value(r), psi_r: fam.derivative(r), residual: harmonic_residual(&fam, r) })
        .collect();
    let max_res = rows.iter().map(|x| x.residual.abs()).fold(0.0, f64::max);
    let profile = fam.profile(&grid);
    let quad = profile_energy(fam.target, &profile, None);
    let b = bogomolnyi_decomposition(fam.target, &profile, None)?;
    write_csv(dir, "harmonic.csv", &rows, out)?;
    let report = json!({
        "family": fam,
        "quadrature_energy": quad,
        "max_ode_residual": max_res,
        "bogomolnyi": { "kinetic": b.kinetic, "quadratic_defect": b.quadratic_defect, "topological": b.topological },
    });
    write_json(dir, "harmonic.json", &report, out)?;
    out.stat("endpoint", fam.endpoint);
    out.stat("energy", fam.energy);
    out.stat("quadrature_energy", quad);
    out.stat("max_ode_residual", max_res);
    out.stat("quadratic_defect", b.quadratic_defect);
    out.stat("topological", b.topological);
    Ok(())
}

fn spectrum(c: &RunConfig, dir: &Path, out: &mut Outcome) -> Result<()> {
    let lambda = c.lambda.ok_or_else(|| Error::Config("spectrum needs --lambda".into()))?;
    let op = assemble(OperatorKind::for_target(c.target), lambda, 0.0)?;
    let g = gap_eigenvalue(&op, &c.shooting())?;
    let oracle = matrix_oracle(&op, &OracleConfig::for_lambda(lambda))?;
    let mut rows = vec![SpectrumRow::from_outcome(lambda, &g)];
    rows.extend(oracle.eigenvalues.iter().enumerate().map(|(k, &m)| SpectrumRow {
        lambda,
        mu_sq: Some(m),
        wronskian_residual: None,
        oscillation_count: k,
        b_coeff: None,
        method: Method::MatrixOracle,
    }));
    write_csv(dir, "spectrum.csv", &rows, out)?;
    out.stat("lambda", lambda);
    out.stat("oracle_count", oracle.eigenvalues.len());
    match &g {
        GapOutcome::Eigenvalue(e) => {
            #[derive(Serialize)]
            struct Row {
                r: f64,
                phi: f64,
            }
            let ef = &e.eigenfunction;
            let rows: Vec<Row> = ef.grid.iter().zip(&ef.values).map(|(&r, &phi)| Row { r, phi }).collect();
            write_csv(dir, "eigenfunction.csv", &rows, out)?;
            out.stat("mu_sq", e.mu_sq);
            out.stat("wronskian_residual", e.wronskian_residual);
            if let [m] = oracle.eigenvalues.as_slice() {
                out.stat("oracle_mu_sq", *m);
                out.stat("oracle_deviation", (m - e.mu_sq).abs());
            }
        }
        GapOutcome::NoEigenvalue { threshold, .. } => {
            out.stat("mu_sq", Value::Null);
            out.stat("b_coeff", threshold.b_coeff);
            out.stat("a_coeff", threshold.a_coeff);
        }
    }
    Ok(())
}

fn lambda_list(c: &RunConfig) -> Result<Vec<f64>> {
    let [lo, hi] = c.lambda_range.ok_or_else(|| Error::Config("eigencurve needs --lambda-range".into()))?;
    let step = c.lambda_step.unwrap_or((hi - lo) / 10.0);
    let n = ((hi - lo) / step).round().max(1.0) as usize;
    Ok((0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect())
}

fn eigencurve(c: &RunConfig, dir: &Path, out: &mut Outcome) -> Result<()> {
    let lambdas = lambda_list(c)?;
    let kind = OperatorKind::for_target(c.target);
    let cfg = c.shooting();
    let rows: Vec<SpectrumRow> = lambdas
        .par_iter()
        .map(|&l| Ok(SpectrumRow::from_outcome(l, &gap_eigenvalue(&assemble(kind, l, 0.0)?, &cfg)?)))
        .collect::<Result<_>>()?;
    write_csv(dir, "eigencurve.csv", &rows, out)?;
    let found: Vec<f64> = rows.iter().filter_map(|r| r.mu_sq).collect();
    out.stat("points", rows.len());
    out.stat("with_eigenvalue", found.len());
    if let (Some(first), Some(last)) = (found.first(), found.last()) {
        out.stat("mu_sq_first", *first);
        out.stat("mu_sq_last", *last);
    }
    Ok(())
}

fn scan(c: &RunConfig, dir: &Path, out: &mut Outcome) -> Result<()> {
    let [lo, hi] = c.lambda_range.unwrap_or([1.0, 4.0]);
    let s = resonance_scan(OperatorKind::for_target(c.target), lo, hi, &c.shooting())?;
    let rows: Vec<SpectrumRow> = s
        .points
        .iter()
        .map(|p| SpectrumRow {
            lambda: p.lambda,
            mu_sq: None,
            wronskian_residual: None,
            oscillation_count: p.oscillation_count,
            b_coeff: Some(p.b_coeff),
            method: Method::OscillationCount,
        })
        .collect();
    write_csv(dir, "scan.csv", &rows, out)?;
    out.stat("lambda_sup_estimate", s.lambda_sup_estimate);
    out.stat("bracket_lo", s.bracket.0);
    out.stat("bracket_hi", s.bracket.1);
    if let Some((a, b)) = s.oscillation_jump {
        out.stat("oscillation_jump_lo", a);
        out.stat("oscillation_jump_hi", b);
    }
    out.stat("discrepancy", s.discrepancy);
    Ok(())
}

fn measure(c: &RunConfig, dir: &Path, out: &mut Outcome) -> Result<()> {
    let (kind, label, default_lambda) = match c.target {
        Target::Sphere => (OperatorKind::Attractive, "V", 1.0),
        Target::HyperbolicPlane => (OperatorKind::Repulsive, "U", 0.7),
    };
    let lambda = c.lambda_or(default_lambda);
    let op = assemble(kind, lambda, 0.0)?;
    let cfg = ShootingConfig { r_max: c.r_max.unwrap_or(20.0), ..c.shooting() };
    let [lo, hi] = c.xi_range.unwrap_or([1e-3, 300.0]);
    let xs = log_grid(lo, hi, 16);
    let perturbed: Vec<MeasureRow> = xs
        .par_iter()
        .map(|&xi| {
            let s = spectral_density(&op, xi, &cfg)?;
            Ok(MeasureRow { xi, omega: s.omega, a_abs_sq: s.a_abs_sq, method: s.method, lambda, potential_kind: label })
        })
        .collect::<Result<_>>()?;
    let free: Vec<MeasureRow> = xs
        .iter()
        .map(|&xi| {
            let s = free_sample(xi)?;
            Ok(MeasureRow { xi, omega: s.omega, a_abs_sq: s.a_abs_sq, method: s.method, lambda: 0.0, potential_kind: "free" })
        })
        .collect::<Result<_>>()?;
    let slope = |sel: &dyn Fn(f64) -> bool, rows: &[MeasureRow]| {
        let (x, y): (Vec<f64>, Vec<f64>) = rows.iter().filter(|r| sel(r.xi)).map(|r| (r.xi, r.omega)).unzip();
        (x.len() >= 3).then(|| loglog_slope(&x, &y))
    };
    out.stat("lambda", lambda);
    if let Some(s) = slope(&|x| x <= 1e-2, &perturbed) {
        out.stat("slope_small_xi", s);
    }
    if let Some(s) = slope(&|x| x >= 30.0, &perturbed) {
        out.stat("slope_large_xi", s);
    }
    out.stat("omega_min", perturbed.iter().map(|r| r.omega).fold(f64::INFINITY, f64::min));
    let mut rows = perturbed;
    rows.extend(free);
    write_csv(dir, "measure.csv", &rows, out)?;
    Ok(())
}

fn evolver_config(c: &RunConfig, default_r_max: f64) -> EvolverConfig {
    EvolverConfig { r_max: c.r_max.unwrap_or(default_r_max), dr: c.dr.unwrap_or(0.02), ..Default::default() }
}

fn bump(r: f64) -> f64 {
    r * r / (1.0 + r * r) * (-(r - 2.0_f64).powi(2) / 0.5).exp()
}

fn run_evolve(c: &RunConfig, dir: &Path, out: &mut Outcome) -> Result<()> {
    let default_lambda = if c.target == Target::Sphere { 1.0 } else { 0.9 };
    let fam = HarmonicFamily::new(c.target, c.lambda_or(default_lambda))?;
    let ecfg = evolver_config(c, 60.0);
    ecfg.validate()?;
    let nodes = ecfg.nodes();
    let dt = c.dt.unwrap_or_else(|| ecfg.time_step());
    let eps = c.epsilon.unwrap_or(1e-2);
    let unit = WaveState::perturbed(fam, &nodes[1..], bump, |_| 0.0)?;
    let scale = eps / Evolver::new(&unit, dt, &ecfg, None)?.h0_distance();
    let init = WaveState::perturbed(fam, &nodes[1..], |r| scale * bump(r), |_| 0.0)?;
    let run = evolve(&init, c.t_end.unwrap_or(30.0), dt, &ecfg, None)?;

    #[derive(Serialize)]
    struct Frame {
        t: f64,
        r: f64,
        psi: f64,
        psi_t: f64,
    }
    let mut w = csv::Writer::from_path(dir.join("frames.csv"))?;
    for (s, _) in &run.frames {
        for i in 0..s.psi.len() {
            w.serialize(Frame { t: s.t, r: s.psi.grid[i], psi: s.psi.values[i], psi_t: s.psi_t.values[i] })?;
        }
    }
    w.flush()?;
    out.files.push("frames.csv".into());
    write_csv(dir, "diagnostics.csv", &run.series, out)?;

    let peak = run.series.iter().map(|d| d.local_energy).fold(0.0, f64::max);
    let last = run.last();
    let (sup, bound) = linf_energy_bound_check(&run.frames.last().unwrap().0)?;
    out.stat("lambda", fam.lambda);
    out.stat("dt", dt);
    out.stat("energy_initial", run.series[0].energy);
    out.stat("energy_final", last.energy);
    out.stat("relative_energy_drift", run.relative_energy_drift);
    out.stat("local_energy_peak", peak);
    out.stat("local_energy_final", last.local_energy);
    out.stat("s_norm", last.s_norm_partial);
    out.stat("h0_distance_final", last.h0_distance);
    out.stat("sup_psi", sup);
    out.stat("linf_bound", bound);
    Ok(())
}

fn mode_experiment(c: &RunConfig, dir: &Path, out: &mut Outcome) -> Result<()> {
    if c.target != Target::Sphere {
        return Err(Error::Config("the internal mode exists only for the sphere target".into()));
    }
    let lambda = c.lambda_or(30.0);
    let op = assemble(OperatorKind::Attractive, lambda, 0.0)?;
    let GapOutcome::Eigenvalue(eigen) = gap_eigenvalue(&op, &c.shooting())? else {
        return Err(Error::Precondition(format!("no gap eigenvalue at lambda = {lambda}")));
    };
    let ecfg = EvolverConfig { h_min: Some(0.002), ..evolver_config(c, 40.0) };
    let m = internal_mode_experiment(lambda, &eigen, c.epsilon.unwrap_or(1e-3), c.t_end.unwrap_or(100.0), &ecfg)?;
    #[derive(Serialize)]
    struct Row {
        t: f64,
        amplitude: f64,
    }
    let rows: Vec<Row> = m.amplitude_series.iter().map(|&(t, amplitude)| Row { t, amplitude }).collect();
    write_csv(dir, "mode.csv", &rows, out)?;
    out.stat("lambda", lambda);
    out.stat("mu_sq", eigen.mu_sq);
    out.stat("expected_frequency", m.expected_frequency);
    out.stat("measured_frequency", m.measured_frequency);
    out.stat("relative_error", m.measured_frequency / m.expected_frequency - 1.0);
    out.stat("snr", m.snr);
    out.stat("relative_energy_drift", m.relative_energy_drift);
    Ok(())
}

fn verify(c: &RunConfig, dir: &Path, out: &mut Outcome) -> Result<()> {
    let checks = run_suite(c.seed);
    write_csv(dir, "verify.csv", &checks, out)?;
    let failed: Vec<&str> = checks.iter().filter(|k| !k.passed).map(|k| k.name.as_str()).collect();
    out.stat("checks", checks.len());
    out.stat("failed", failed.len());
    for k in &checks {
        println!("{} {} (value {:e}, tolerance {:e})", if k.passed { "PASS" } else { "FAIL" }, k.name, k.value, k.tolerance);
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::Verification(failed.join("; ")))
    }
}

/// Runs the configured command in `output_dir`, returning its summary.
pub fn run(c: &RunConfig) -> Result<Outcome> {
    c.validate()?;
    let dir = &c.output_dir;
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut out = Outcome::default();
    match c.command {
        Command::Harmonic => harmonic(c, dir, &mut out),
        Command::Spectrum => spectrum(c, dir, &mut out),
        Command::Eigencurve => eigencurve(c, dir, &mut out),
        Command::ResonanceScan => scan(c, dir, &mut out),
        Command::Measure => measure(c, dir, &mut out),
        Command::Evolve => run_evolve(c, dir, &mut out),
        Command::ModeExperiment => mode_experiment(c, dir, &mut out),
        Command::Verify => verify(c, dir, &mut out),
    }
    .map(|_| out)
}

/// `run` plus manifest.json (written on failure too, whenever the directory is usable).
pub fn execute(c: &RunConfig) -> Result<Manifest> {
    let start = Instant::now();
    let result = run(c);
    let (status, error, out) = match &result {
        Ok(o) => ("ok", None, o.clone()),
        Err(e) => ("error", Some(e.to_string()), Outcome::default()),
    };
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        tool: "gapwave".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: c.command,
        config: c.clone(),
        threads: rayon::current_num_threads(),
        seed: c.seed,
        wall_time_s: start.elapsed().as_secs_f64(),
        status: status.into(),
        error,
        summary: out.summary,
        files: out.files,
    };
    if c.output_dir.is_dir() {
        fs::write(c.output_dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    }
    result.map(|_| manifest)
}

/// Exit status: 0 on success, 2 for invalid input, 3 for numerical failures.
pub fn exit_code(r: &Result<Manifest>) -> u8 {
    match r {
        Ok(_) => 0,
        Err(e) if e.is_numerical() => 3,
        Err(_) => 2,
    }
}
