//! Subcommand implementations. Each one produces a [`Table`] for CSV output,
//! and single-point commands also carry a structured JSON object.

use num_complex::Complex64;
use serde_json::Value;
use zpcqkd_core::analysis::{linspace, ordered_parallel_map};
use zpcqkd_core::channel::link_transmittance;
use zpcqkd_core::keyrate::plob_bound;
use zpcqkd_core::zpc::{self, variance_from_lambda};
use zpcqkd_core::{
    fock, grid_sweep, max_distance, max_tolerable_noise, optimize_t, original_protocol_rate, secret_key_rate, Axis,
    Error, ProtocolParams, SolverConfig, SweepParam, SweepRecord, TMode, ZpcParams,
};

use crate::config::{Command, OutputFormat, RunConfig, Settings};
use crate::error::{CliError, Result};
use crate::output::{Cell, Table};

pub const RATE_COLUMNS: &[&str] = &[
    "L_AB", "T", "P_d", "I_AB", "chi_BE", "K", "K_clamped", "lambda1", "lambda2", "lambda3", "X", "Y", "Z",
];
pub const SWEEP_DISTANCE_COLUMNS: &[&str] = &[
    "L_AB",
    "T_opt",
    "P_d",
    "I_AB",
    "chi_BE",
    "K",
    "K_clamped",
    "K_original",
    "K_original_clamped",
    "PLOB",
];
pub const OPTIMIZE_T_COLUMNS: &[&str] = &[
    "L_AB",
    "T_opt",
    "P_d",
    "I_AB",
    "chi_BE",
    "K",
    "K_clamped",
    "K_original",
    "iterations",
    "bracket_lo",
    "bracket_hi",
];
pub const MAX_NOISE_COLUMNS: &[&str] = &["L_AB", "eps_max", "T_opt", "eps_max_original"];
pub const MAX_DISTANCE_COLUMNS: &[&str] = &["K_target", "L_max", "L_max_original", "gain", "T_opt"];
pub const SURFACE_COLUMNS: &[&str] = &[
    "eta",
    "v_el",
    "T_opt",
    "P_d",
    "I_AB",
    "chi_BE",
    "K",
    "K_clamped",
    "K_original",
    "K_original_clamped",
];
pub const WIGNER_COLUMNS: &[&str] = &["T", "q", "W"];
pub const PD_SURFACE_COLUMNS: &[&str] = &["T", "lambda", "V_A", "P_d"];
pub const VERIFY_COLUMNS: &[&str] = &["check", "max_deviation", "tolerance", "passed"];

pub const DEFAULT_K_TARGET: f64 = 1e-4;
const DEFAULT_DISTANCE_POINTS: usize = 101;

/// Result of one subcommand before encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub table: Table,
    pub object: Option<Value>,
    /// Set when the command ran but its checks did not pass.
    pub failed: bool,
}

impl Report {
    fn table(table: Table) -> Self {
        Report {
            table,
            object: None,
            failed: false,
        }
    }

    fn with_object<T: serde::Serialize>(table: Table, object: &T) -> Result<Self> {
        let object = serde_json::to_value(object).map_err(|e| CliError::Config(format!("cannot encode JSON: {e}")))?;
        Ok(Report {
            table,
            object: Some(object),
            failed: false,
        })
    }

    /// Encodes the report; CSV always comes from the table.
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.table.to_csv(),
            OutputFormat::Json => {
                let value = self.object.clone().unwrap_or_else(|| self.table.to_json());
                let mut s = serde_json::to_string_pretty(&value).expect("JSON values always serialize");
                s.push('\n');
                s
            }
        }
    }
}

/// Runs the configured subcommand and returns the encoded artifact. A failed
/// `verify` still returns its report, flagged through [`Report::failed`].
pub fn execute(cfg: &RunConfig) -> Result<Report> {
    let s = &cfg.settings;
    let p = s.protocol_params()?;
    let solver = s.solver_config()?;
    let workers = s.workers()?;
    match cfg.command {
        Command::Rate => rate(&p),
        Command::SweepDistance => sweep_distance(s, &p, &solver, workers),
        Command::OptimizeT => optimize(&p, &solver),
        Command::MaxNoise => max_noise(s, &p, &solver, workers),
        Command::MaxDistance => max_dist(s, &p, &solver),
        Command::Surface => surface(s, &p, &solver, workers),
        Command::Wigner => wigner(s, &solver),
        Command::PdSurface => pd_surface(s, &solver),
        Command::Verify => verify(),
    }
}

fn axis(name: &'static str, start: f64, stop: f64, points: usize) -> Result<Vec<f64>> {
    if !start.is_finite() || !stop.is_finite() {
        return Err(CliError::Config(format!("{name} range must be finite")));
    }
    if points == 0 {
        return Err(CliError::Config(format!("{name} needs at least one point")));
    }
    if points > 1 && !(stop > start) {
        return Err(CliError::Config(format!("{name} range must have max > min")));
    }
    Ok(linspace(start, stop, points))
}

fn check_grid(points: usize, solver: &SolverConfig) -> Result<()> {
    if points > solver.max_grid_points {
        return Err(Error::GridTooLarge {
            points,
            cap: solver.max_grid_points,
        }
        .into());
    }
    Ok(())
}

/// PLOB bound over the whole fiber; infinite at zero length.
fn plob_at(l_ab: f64, kappa: f64) -> Result<f64> {
    let tau = link_transmittance(l_ab, kappa)?;
    if tau >= 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(plob_bound(tau)?)
}

fn rate(p: &ProtocolParams) -> Result<Report> {
    let b = secret_key_rate(p)?;
    let cm = b.cm_out;
    let mut table = Table::new(RATE_COLUMNS);
    table.push(vec![
        p.l_ab().into(),
        p.t.into(),
        b.p_d.into(),
        b.i_ab.into(),
        b.chi_be.into(),
        b.k.into(),
        b.k_clamped().into(),
        b.lambda1.into(),
        b.lambda2.into(),
        b.lambda3.into(),
        cm.x_aa.into(),
        cm.x_bb.into(),
        cm.x_ab.into(),
    ]);
    Report::with_object(table, &b)
}

fn sweep_distance(s: &Settings, p: &ProtocolParams, solver: &SolverConfig, workers: Option<usize>) -> Result<Report> {
    let l_min = s.l_min.unwrap_or(p.l_bc);
    let l_max = match s.l_max {
        Some(l) => l,
        None => {
            let target = s.k_target.unwrap_or(DEFAULT_K_TARGET);
            let reach = max_distance(p, target, TMode::Optimized, solver)?.value;
            (reach / 10.0).ceil().max(1.0) * 10.0
        }
    };
    let values = axis("l_ab", l_min, l_max, s.points.unwrap_or(DEFAULT_DISTANCE_POINTS))?;
    let axes = [Axis::new(SweepParam::LAB, values)];
    let zpc = grid_sweep(&axes, p, TMode::Optimized, solver, workers)?;
    let original = grid_sweep(&axes, &p.with_t(1.0), TMode::Fixed, solver, workers)?;

    let mut table = Table::new(SWEEP_DISTANCE_COLUMNS);
    for (z, o) in zpc.iter().zip(&original) {
        let l = z.inputs.l_ab();
        let mut row = optimized_cells(z);
        row.insert(0, l.into());
        row.push(o.breakdown.k.into());
        row.push(o.breakdown.k_clamped().into());
        row.push(plob_at(l, p.kappa)?.into());
        table.push(row);
    }
    Ok(Report::table(table))
}

/// T_opt, P_d, I_AB, chi_BE, K, K_clamped of an optimized sweep record.
fn optimized_cells(r: &SweepRecord) -> Vec<Cell> {
    let b = &r.breakdown;
    vec![
        r.t_opt.into(),
        b.p_d.into(),
        b.i_ab.into(),
        b.chi_be.into(),
        b.k.into(),
        b.k_clamped().into(),
    ]
}

fn optimize(p: &ProtocolParams, solver: &SolverConfig) -> Result<Report> {
    let opt = optimize_t(p, solver)?;
    let original = original_protocol_rate(p)?;
    let b = &opt.breakdown;
    let mut table = Table::new(OPTIMIZE_T_COLUMNS);
    table.push(vec![
        p.l_ab().into(),
        opt.t_opt.into(),
        b.p_d.into(),
        b.i_ab.into(),
        b.chi_be.into(),
        b.k.into(),
        b.k_clamped().into(),
        original.k.into(),
        opt.meta.iterations.into(),
        opt.meta.bracket[0].into(),
        opt.meta.bracket[1].into(),
    ]);
    Report::with_object(table, &opt)
}

/// Turns a solver failure at one sweep point into a missing cell.
fn solver_optional<T>(r: zpcqkd_core::Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_solver_error() => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn max_noise(s: &Settings, p: &ProtocolParams, solver: &SolverConfig, workers: Option<usize>) -> Result<Report> {
    let values = axis(
        "l_ab",
        s.l_min.unwrap_or(p.l_bc),
        s.l_max.unwrap_or(100.0),
        s.points.unwrap_or(51),
    )?;
    check_grid(values.len(), solver)?;
    let rows = ordered_parallel_map(values.len(), workers, |i| -> Result<Vec<Cell>> {
        let at = p.with_l_ab(values[i])?;
        let zpc = solver_optional(max_tolerable_noise(&at, TMode::Optimized, solver))?;
        let original = solver_optional(max_tolerable_noise(&at.with_t(1.0), TMode::Fixed, solver))?;
        Ok(vec![
            values[i].into(),
            zpc.map(|r| r.value).into(),
            zpc.and_then(|r| r.t_opt).into(),
            original.map(|r| r.value).into(),
        ])
    })?;
    let mut table = Table::new(MAX_NOISE_COLUMNS);
    for row in rows {
        table.push(row?);
    }
    Ok(Report::table(table))
}

#[derive(serde::Serialize)]
struct MaxDistanceReport {
    k_target: f64,
    zpc: zpcqkd_core::RootSolution,
    original: zpcqkd_core::RootSolution,
    gain: f64,
}

fn max_dist(s: &Settings, p: &ProtocolParams, solver: &SolverConfig) -> Result<Report> {
    let target = s.k_target.unwrap_or(DEFAULT_K_TARGET);
    let zpc = max_distance(p, target, TMode::Optimized, solver)?;
    let original = max_distance(&p.with_t(1.0), target, TMode::Fixed, solver)?;
    let gain = zpc.value - original.value;
    let mut table = Table::new(MAX_DISTANCE_COLUMNS);
    table.push(vec![
        target.into(),
        zpc.value.into(),
        original.value.into(),
        gain.into(),
        zpc.t_opt.into(),
    ]);
    Report::with_object(
        table,
        &MaxDistanceReport {
            k_target: target,
            zpc,
            original,
            gain,
        },
    )
}

fn surface(s: &Settings, p: &ProtocolParams, solver: &SolverConfig, workers: Option<usize>) -> Result<Report> {
    let axes = [
        Axis::new(
            SweepParam::Eta,
            axis(
                "eta",
                s.eta_min.unwrap_or(0.8),
                s.eta_max.unwrap_or(1.0),
                s.eta_points.unwrap_or(21),
            )?,
        ),
        Axis::new(
            SweepParam::VEl,
            axis(
                "v_el",
                s.vel_min.unwrap_or(0.0),
                s.vel_max.unwrap_or(0.1),
                s.vel_points.unwrap_or(21),
            )?,
        ),
    ];
    let zpc = grid_sweep(&axes, p, TMode::Optimized, solver, workers)?;
    let original = grid_sweep(&axes, &p.with_t(1.0), TMode::Fixed, solver, workers)?;
    let mut table = Table::new(SURFACE_COLUMNS);
    for (z, o) in zpc.iter().zip(&original) {
        let mut row = vec![z.inputs.eta.into(), z.inputs.v_el.into()];
        row.extend(optimized_cells(z));
        row.push(o.breakdown.k.into());
        row.push(o.breakdown.k_clamped().into());
        table.push(row);
    }
    Ok(Report::table(table))
}

fn wigner(s: &Settings, solver: &SolverConfig) -> Result<Report> {
    let ts = s
        .wigner_t
        .clone()
        .map(|l| l.0)
        .unwrap_or_else(|| vec![1.0, 0.9, 0.8, 0.7]);
    if ts.is_empty() {
        return Err(CliError::Config("wigner_t needs at least one transmittance".into()));
    }
    let qs = axis(
        "q",
        s.q_min.unwrap_or(-3.0),
        s.q_max.unwrap_or(3.0),
        s.q_points.unwrap_or(601),
    )?;
    check_grid(ts.len().saturating_mul(qs.len()), solver)?;
    let alpha = Complex64::new(s.alpha_re.unwrap_or(1.0), s.alpha_im.unwrap_or(0.0));
    let mut table = Table::new(WIGNER_COLUMNS);
    for &t in &ts {
        for &q in &qs {
            let w = zpc::coherent_wigner_section(alpha, t, q)?;
            table.push(vec![t.into(), q.into(), w.into()]);
        }
    }
    Ok(Report::table(table))
}

fn pd_surface(s: &Settings, solver: &SolverConfig) -> Result<Report> {
    let ts = axis(
        "t",
        s.t_min.unwrap_or(0.02),
        s.t_max.unwrap_or(1.0),
        s.t_points.unwrap_or(50),
    )?;
    let lambdas = axis(
        "lambda",
        s.lambda_min.unwrap_or(0.0),
        s.lambda_max.unwrap_or(0.98),
        s.lambda_points.unwrap_or(50),
    )?;
    check_grid(ts.len().saturating_mul(lambdas.len()), solver)?;
    let mut table = Table::new(PD_SURFACE_COLUMNS);
    for &t in &ts {
        for &lambda in &lambdas {
            let v_a = variance_from_lambda(lambda)?;
            let pd = zpc::success_probability(&ZpcParams::new(v_a, t)?);
            table.push(vec![t.into(), lambda.into(), v_a.into(), pd.into()]);
        }
    }
    Ok(Report::table(table))
}

fn verify() -> Result<Report> {
    let report = fock::verify()?;
    let mut table = Table::new(VERIFY_COLUMNS);
    for c in &report.checks {
        table.push(vec![
            c.name.as_str().into(),
            c.max_deviation.into(),
            c.tolerance.into(),
            c.passed.into(),
        ]);
    }
    let mut out = Report::with_object(table, &report)?;
    out.failed = !report.passed();
    Ok(out)
}
