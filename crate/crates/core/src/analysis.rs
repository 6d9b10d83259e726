//! Parameter studies over the key rate: optimal catalysis transmittance,
//! maximal distance at a target rate, maximal tolerable excess noise, and
//! Cartesian grid sweeps.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::ProtocolParams;
use crate::error::{Error, Result};
use crate::keyrate::{secret_key_rate, RateBreakdown};
use crate::zpc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Coarse grid size over `[t_min, t_max]` before golden-section refinement.
    pub t_grid_points: usize,
    pub t_min: f64,
    pub t_max: f64,
    /// Final bracket width on T.
    pub refine_tol: f64,
    /// Bracket width on distance, km.
    pub bisect_tol_distance: f64,
    /// Bracket width on excess noise, SNU.
    pub bisect_tol_noise: f64,
    /// Required |K − target| at a returned root, bits/pulse.
    pub residual_tol: f64,
    pub max_iter: usize,
    pub max_grid_points: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            t_grid_points: 199,
            t_min: 0.01,
            t_max: 1.0,
            refine_tol: 1e-5,
            bisect_tol_distance: 1e-4,
            bisect_tol_noise: 1e-6,
            residual_tol: 1e-7,
            max_iter: 200,
            max_grid_points: 10_000_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t_grid_points < 2 {
            return Err(Error::domain("t_grid_points", self.t_grid_points as f64, "need at least 2 points"));
        }
        if !(self.t_min > 0.0 && self.t_min < self.t_max && self.t_max <= 1.0) {
            return Err(Error::domain("t_min", self.t_min, "need 0 < t_min < t_max <= 1"));
        }
        for (name, v) in [
            ("refine_tol", self.refine_tol),
            ("bisect_tol_distance", self.bisect_tol_distance),
            ("bisect_tol_noise", self.bisect_tol_noise),
            ("residual_tol", self.residual_tol),
        ] {
            if !(v > 0.0) {
                return Err(Error::domain(name, v, "tolerance must be > 0"));
            }
        }
        if self.max_iter == 0 {
            return Err(Error::domain("max_iter", 0.0, "must be > 0"));
        }
        Ok(())
    }

    fn t_grid(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.t_grid_points;
        (0..n).map(move |i| {
            if i + 1 == n {
                self.t_max
            } else {
                self.t_min + (self.t_max - self.t_min) * i as f64 / (n - 1) as f64
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverMeta {
    pub iterations: usize,
    /// Final bracketing interval.
    pub bracket: [f64; 2],
    /// Bracket width for maximizers, |f| at the root for root finders.
    pub residual: f64,
}

/// How the catalysis transmittance is chosen for each rate evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TMode {
    /// Maximize K over T.
    Optimized,
    /// Use `ProtocolParams::t` as given.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TOptimum {
    pub t_opt: f64,
    pub breakdown: RateBreakdown,
    /// The maximum sits on an end of the search interval.
    pub at_boundary: bool,
    /// K(t_opt) > 0.
    pub positive_key: bool,
    pub meta: SolverMeta,
}

/// Maximizes K over T ∈ [t_min, t_max]: coarse grid, then golden-section
/// refinement in the cell pair around the best grid point. Ties prefer the
/// larger T.
pub fn optimize_t(p: &ProtocolParams, cfg: &SolverConfig) -> Result<TOptimum> {
    cfg.validate()?;
    p.validate()?;
    let grid: Vec<f64> = cfg.t_grid().collect();
    let eval = |t: f64| secret_key_rate(&p.with_t(t));

    let mut best = (0usize, eval(grid[0])?);
    for (i, &t) in grid.iter().enumerate().skip(1) {
        let r = eval(t)?;
        if r.k >= best.1.k {
            best = (i, r);
        }
    }
    let (idx, grid_best) = best;
    let lo = grid[idx.saturating_sub(1)];
    let hi = grid[(idx + 1).min(grid.len() - 1)];

    let (t_star, iterations, bracket) = golden_section_max(|t| eval(t).map(|r| r.k), lo, hi, cfg.refine_tol, cfg.max_iter)?;
    let refined = eval(t_star)?;
    let (t_opt, breakdown) = if refined.k > grid_best.k {
        (t_star, refined)
    } else {
        (grid[idx], grid_best)
    };
    Ok(TOptimum {
        t_opt,
        breakdown,
        at_boundary: t_opt == cfg.t_min || t_opt == cfg.t_max,
        positive_key: breakdown.k > 0.0,
        meta: SolverMeta {
            iterations,
            bracket,
            residual: bracket[1] - bracket[0],
        },
    })
}

fn golden_section_max<F>(mut f: F, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> Result<(f64, usize, [f64; 2])>
where
    F: FnMut(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    if b - a <= tol {
        return Ok((0.5 * (a + b), 0, [a, b]));
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut iterations = 0;
    while b - a > tol && iterations < max_iter {
        iterations += 1;
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    let x = if fc >= fd { c } else { d };
    Ok((x, iterations, [a, b]))
}

/// Key rate under the given T policy, with the optimizer result when one ran.
pub fn rate_with_mode(p: &ProtocolParams, mode: TMode, cfg: &SolverConfig) -> Result<(RateBreakdown, Option<TOptimum>)> {
    match mode {
        TMode::Fixed => Ok((secret_key_rate(p)?, None)),
        TMode::Optimized => {
            let opt = optimize_t(p, cfg)?;
            Ok((opt.breakdown, Some(opt)))
        }
    }
}

/// Bisection for the crossing of a decreasing function through zero, given
/// `f(lo) > 0 >= f(hi)`. Returns the lower bracket end, where `f >= 0`.
fn bisect_down<F>(mut f: F, mut lo: f64, mut hi: f64, f_lo: f64, tol: f64, residual_tol: f64, max_iter: usize) -> Result<(f64, SolverMeta)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut f_lo = f_lo;
    let mut iterations = 0;
    while (hi - lo > tol || f_lo.abs() > residual_tol) && iterations < max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let fm = f(mid)?;
        if fm > 0.0 {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    if hi - lo > tol {
        return Err(Error::SolverFailure(format!(
            "bisection did not reach width {tol:e} in {max_iter} iterations (bracket [{lo}, {hi}])"
        )));
    }
    Ok((
        lo,
        SolverMeta {
            iterations,
            bracket: [lo, hi],
            residual: f_lo.abs(),
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootSolution {
    /// Distance in km or excess noise in SNU, depending on the solver.
    pub value: f64,
    pub breakdown: RateBreakdown,
    pub t_opt: Option<f64>,
    pub meta: SolverMeta,
}

const MAX_DISTANCE_KM: f64 = 5000.0;
const MAX_NOISE_SNU: f64 = 100.0;

/// Largest total distance L_AB at which K ≥ `target_k`, with L_BC held fixed.
pub fn max_distance(p: &ProtocolParams, target_k: f64, mode: TMode, cfg: &SolverConfig) -> Result<RootSolution> {
    cfg.validate()?;
    if !target_k.is_finite() {
        return Err(Error::domain("target_K", target_k, "must be finite"));
    }
    let at = |l: f64| -> Result<RateBreakdown> { Ok(rate_with_mode(&p.with_l_ab(l)?, mode, cfg)?.0) };
    let f = |l: f64| at(l).map(|r| r.k - target_k);

    let mut lo = p.l_bc;
    let f0 = f(lo)?;
    if f0 <= 0.0 {
        return Err(Error::NoKeyAtZeroDistance {
            rate: f0 + target_k,
            target: target_k,
        });
    }
    let mut f_lo = f0;
    let mut step = 10.0;
    let mut hi = lo + step;
    loop {
        let fh = f(hi)?;
        if fh <= 0.0 {
            break;
        }
        lo = hi;
        f_lo = fh;
        step *= 2.0;
        hi = lo + step;
        if hi > MAX_DISTANCE_KM {
            return Err(Error::SolverFailure(format!(
                "key rate stays above {target_k:e} out to {MAX_DISTANCE_KM} km"
            )));
        }
    }
    let (root, meta) = bisect_down(f, lo, hi, f_lo, cfg.bisect_tol_distance, cfg.residual_tol, cfg.max_iter)?;
    let params = p.with_l_ab(root)?;
    let (breakdown, opt) = rate_with_mode(&params, mode, cfg)?;
    Ok(RootSolution {
        value: root,
        breakdown,
        t_opt: opt.map(|o| o.t_opt),
        meta,
    })
}

/// Largest common excess noise ε = ε_A = ε_B for which K ≥ 0.
pub fn max_tolerable_noise(p: &ProtocolParams, mode: TMode, cfg: &SolverConfig) -> Result<RootSolution> {
    cfg.validate()?;
    let f = |eps: f64| -> Result<f64> { Ok(rate_with_mode(&p.with_eps(eps), mode, cfg)?.0.k) };
    let f0 = f(0.0)?;
    if f0 <= 0.0 {
        return Err(Error::NoKeyAtZeroNoise { rate: f0 });
    }
    let (mut lo, mut f_lo) = (0.0, f0);
    let mut hi = 0.01;
    loop {
        let fh = f(hi)?;
        if fh <= 0.0 {
            break;
        }
        lo = hi;
        f_lo = fh;
        hi *= 2.0;
        if hi > MAX_NOISE_SNU {
            return Err(Error::SolverFailure(format!("key rate stays positive out to eps = {MAX_NOISE_SNU}")));
        }
    }
    let (root, meta) = bisect_down(f, lo, hi, f_lo, cfg.bisect_tol_noise, cfg.residual_tol, cfg.max_iter)?;
    let (breakdown, opt) = rate_with_mode(&p.with_eps(root), mode, cfg)?;
    Ok(RootSolution {
        value: root,
        breakdown,
        t_opt: opt.map(|o| o.t_opt),
        meta,
    })
}

/// Parameters a sweep axis can drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParam {
    VA,
    VB,
    /// Total distance; moves L_AC with L_BC fixed.
    LAB,
    LAC,
    LBC,
    /// ε_A = ε_B.
    Eps,
    EpsA,
    EpsB,
    Eta,
    VEl,
    Beta,
    Kappa,
    T,
    /// Source squeezing λ; sets V_A = (1 + λ²)/(1 − λ²).
    Lambda,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::VA => "V_A",
            SweepParam::VB => "V_B",
            SweepParam::LAB => "L_AB",
            SweepParam::LAC => "L_AC",
            SweepParam::LBC => "L_BC",
            SweepParam::Eps => "eps",
            SweepParam::EpsA => "eps_A",
            SweepParam::EpsB => "eps_B",
            SweepParam::Eta => "eta",
            SweepParam::VEl => "v_el",
            SweepParam::Beta => "beta",
            SweepParam::Kappa => "kappa",
            SweepParam::T => "T",
            SweepParam::Lambda => "lambda",
        }
    }

    pub fn apply(self, p: &mut ProtocolParams, value: f64) -> Result<()> {
        match self {
            SweepParam::VA => p.v_a = value,
            SweepParam::VB => p.v_b = value,
            SweepParam::LAB => p.set_l_ab(value)?,
            SweepParam::LAC => p.l_ac = value,
            SweepParam::LBC => p.l_bc = value,
            SweepParam::Eps => {
                p.eps_a = value;
                p.eps_b = value;
            }
            SweepParam::EpsA => p.eps_a = value,
            SweepParam::EpsB => p.eps_b = value,
            SweepParam::Eta => p.eta = value,
            SweepParam::VEl => p.v_el = value,
            SweepParam::Beta => p.beta = value,
            SweepParam::Kappa => p.kappa = value,
            SweepParam::T => p.t = value,
            SweepParam::Lambda => p.v_a = zpc::variance_from_lambda(value)?,
        }
        Ok(())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        Ok(match key.as_str() {
            "v_a" | "va" => SweepParam::VA,
            "v_b" | "vb" => SweepParam::VB,
            "l_ab" | "lab" => SweepParam::LAB,
            "l_ac" | "lac" => SweepParam::LAC,
            "l_bc" | "lbc" => SweepParam::LBC,
            "eps" => SweepParam::Eps,
            "eps_a" => SweepParam::EpsA,
            "eps_b" => SweepParam::EpsB,
            "eta" => SweepParam::Eta,
            "v_el" | "vel" => SweepParam::VEl,
            "beta" => SweepParam::Beta,
            "kappa" => SweepParam::Kappa,
            "t" => SweepParam::T,
            "lambda" => SweepParam::Lambda,
            _ => return Err(Error::UnknownParameter(s.to_string())),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(param: SweepParam, values: Vec<f64>) -> Self {
        Axis { param, values }
    }

    pub fn linspace(param: SweepParam, start: f64, stop: f64, points: usize) -> Self {
        Axis::new(param, linspace(start, stop, points))
    }
}

/// `points` evenly spaced values from `start` to `stop` inclusive; both ends
/// are exact.
pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        n => (0..n)
            .map(|i| {
                if i + 1 == n {
                    stop
                } else {
                    start + (stop - start) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub inputs: ProtocolParams,
    pub breakdown: RateBreakdown,
    pub t_opt: Option<f64>,
    pub solver_meta: Option<SolverMeta>,
}

/// Evaluates the key rate on the Cartesian product of `axes`, row-major
/// (the last axis varies fastest). Output order is the grid order for any
/// worker count; `workers = None` uses rayon's default pool.
pub fn grid_sweep(
    axes: &[Axis],
    base: &ProtocolParams,
    mode: TMode,
    cfg: &SolverConfig,
    workers: Option<usize>,
) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    if axes.is_empty() {
        return Err(Error::domain("axes", 0.0, "at least one sweep axis is required"));
    }
    let mut total: usize = 1;
    for axis in axes {
        if axis.values.is_empty() {
            return Err(Error::domain(axis.param.name(), 0.0, "sweep axis has no values"));
        }
        if let Some(v) = axis.values.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(axis.param.name(), *v, "sweep values must be finite"));
        }
        total = total.checked_mul(axis.values.len()).ok_or(Error::GridTooLarge {
            points: usize::MAX,
            cap: cfg.max_grid_points,
        })?;
    }
    if total > cfg.max_grid_points {
        return Err(Error::GridTooLarge {
            points: total,
            cap: cfg.max_grid_points,
        });
    }

    let point = |index: usize| -> Result<SweepRecord> {
        let mut p = *base;
        let mut rem = index;
        let mut coords = vec![0usize; axes.len()];
        for (k, axis) in axes.iter().enumerate().rev() {
            coords[k] = rem % axis.values.len();
            rem /= axis.values.len();
        }
        for (axis, &c) in axes.iter().zip(&coords) {
            axis.param.apply(&mut p, axis.values[c])?;
        }
        let (breakdown, opt) = rate_with_mode(&p, mode, cfg)?;
        Ok(SweepRecord {
            inputs: p,
            breakdown,
            t_opt: opt.map(|o| o.t_opt),
            solver_meta: opt.map(|o| o.meta),
        })
    };

    let results = ordered_parallel_map(total, workers, point)?;
    results.into_iter().collect()
}

/// Maps `f` over `0..count` on a pool of `workers` threads (rayon's global
/// pool when `None`) and returns results in index order.
pub fn ordered_parallel_map<T, F>(count: usize, workers: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    Ok(match workers {
        Some(0) => return Err(Error::domain("workers", 0.0, "worker count must be >= 1")),
        Some(1) => (0..count).map(f).collect(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::SolverFailure(format!("cannot start worker pool: {e}")))?;
            pool.install(|| (0..count).into_par_iter().map(f).collect())
        }
        None => (0..count).into_par_iter().map(f).collect(),
    })
}
