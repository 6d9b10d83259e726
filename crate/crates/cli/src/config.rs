//! Run configuration: a flat `key = value` file layered under command-line
//! flags. Keys are the long flag names, with `-` or `_` as separator.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use zpcqkd_core::{Detector, NoiseReferral, ProtocolParams, SolverConfig};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Key-rate breakdown at one parameter point (T as given).
    Rate,
    /// T-optimized and original key rate versus L_AB, with the PLOB bound.
    SweepDistance,
    /// Optimal catalysis transmittance at one parameter point.
    OptimizeT,
    /// Maximal tolerable excess noise versus L_AB.
    MaxNoise,
    /// Maximal L_AB at the target key rate, catalyzed and original.
    MaxDistance,
    /// Key rate over detector efficiency and electronic noise.
    Surface,
    /// Wigner sections of attenuated coherent states along p = 0.
    Wigner,
    /// Heralding probability over (T, lambda).
    PdSurface,
    /// Fock-space oracle cross-check of the catalysis formulas.
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Rate => "rate",
            Command::SweepDistance => "sweep-distance",
            Command::OptimizeT => "optimize-t",
            Command::MaxNoise => "max-noise",
            Command::MaxDistance => "max-distance",
            Command::Surface => "surface",
            Command::Wigner => "wigner",
            Command::PdSurface => "pd-surface",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(format!("unknown format `{s}` (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectorArg(pub Detector);

impl FromStr for DetectorArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "ideal" => Ok(DetectorArg(Detector::Ideal)),
            "imperfect" => Ok(DetectorArg(Detector::Imperfect)),
            _ => Err(format!("unknown detector `{s}` (expected ideal or imperfect)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReferralArg(pub NoiseReferral);

impl FromStr for ReferralArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "alice_link" | "t_a" => Ok(ReferralArg(NoiseReferral::AliceLink)),
            "equivalent" | "t_c" => Ok(ReferralArg(NoiseReferral::Equivalent)),
            _ => Err(format!("unknown noise referral `{s}` (expected alice-link or equivalent)")),
        }
    }
}

/// Comma-separated list of numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatList(pub Vec<f64>);

impl FromStr for FloatList {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(FloatList)
    }
}

impl fmt::Display for FloatList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

macro_rules! settings {
    ($( $(#[$meta:meta])* $field:ident : $ty:ty ),* $(,)?) => {
        /// Every configurable key. `None` means "not set at this layer".
        #[derive(Debug, Clone, Default, PartialEq, Args)]
        pub struct Settings {
            $(
                $(#[$meta])*
                #[arg(long, global = true)]
                pub $field: Option<$ty>,
            )*
        }

        impl Settings {
            /// Keys accepted in a config file.
            pub const KEYS: &'static [&'static str] = &[$(stringify!($field)),*];

            /// Fields set in `self` win over `base`.
            pub fn over(self, base: Settings) -> Settings {
                Settings { $( $field: self.$field.or(base.$field), )* }
            }

            fn set(&mut self, key: &str, value: &str) -> Result<bool> {
                $(
                    if key == stringify!($field) {
                        let parsed = value
                            .parse::<$ty>()
                            .map_err(|e| CliError::Config(format!("bad value `{value}` for `{key}`: {e}")))?;
                        self.$field = Some(parsed);
                        return Ok(true);
                    }
                )*
                Ok(false)
            }
        }
    };
}

settings! {
    /// EPR variance of Alice's source, SNU
    v_a: f64,
    /// EPR variance of Bob's source, SNU
    v_b: f64,
    /// Total distance Alice-Bob in km (moves L_AC, keeps L_BC)
    l_ab: f64,
    /// Alice-Charlie distance, km
    l_ac: f64,
    /// Bob-Charlie distance, km
    l_bc: f64,
    /// Common excess noise eps_A = eps_B, SNU
    eps: f64,
    eps_a: f64,
    eps_b: f64,
    /// Detector efficiency
    eta: f64,
    /// Electronic noise, SNU
    v_el: f64,
    /// Reconciliation efficiency
    beta: f64,
    /// Fiber loss, dB/km
    kappa: f64,
    /// Catalysis beam-splitter transmittance
    t: f64,
    /// Detector preset: ideal | imperfect
    detector: DetectorArg,
    /// Detection-noise referral in chi_tot: alice-link | equivalent
    noise_referral: ReferralArg,
    /// Target key rate for distance solvers, bits/pulse
    k_target: f64,
    /// Distance sweep start, km
    l_min: f64,
    /// Distance sweep end, km
    l_max: f64,
    /// Number of distance points
    points: usize,
    eta_min: f64,
    eta_max: f64,
    eta_points: usize,
    vel_min: f64,
    vel_max: f64,
    vel_points: usize,
    /// Coherent amplitude, real part
    alpha_re: f64,
    /// Coherent amplitude, imaginary part
    alpha_im: f64,
    /// Transmittances for the Wigner sections, comma-separated
    wigner_t: FloatList,
    q_min: f64,
    q_max: f64,
    q_points: usize,
    t_min: f64,
    t_max: f64,
    t_points: usize,
    lambda_min: f64,
    lambda_max: f64,
    lambda_points: usize,
    /// Coarse grid size of the T optimizer
    t_grid_points: usize,
    /// Worker threads for sweeps (default: QKD_THREADS, then logical cores)
    threads: usize,
    /// Output format: csv | json
    format: OutputFormat,
    /// Output file (default: stdout)
    output: PathBuf,
}

impl fmt::Display for DetectorArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            Detector::Ideal => "ideal",
            Detector::Imperfect => "imperfect",
        })
    }
}

impl Settings {
    /// Parses a flat config file. Blank lines and `#` comments are ignored;
    /// unknown or repeated keys are rejected.
    pub fn from_config_text(text: &str) -> Result<Settings> {
        let mut out = Settings::default();
        let mut seen = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let key = key.trim().to_ascii_lowercase().replace('-', "_");
            let value = value.trim();
            if seen.contains(&key) {
                return Err(CliError::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
            if !out.set(&key, value)? {
                return Err(CliError::Config(format!("line {}: unknown key `{key}`", lineno + 1)));
            }
            seen.push(key);
        }
        Ok(out)
    }

    /// Protocol parameters: defaults, then detector preset, then explicit keys.
    pub fn protocol_params(&self) -> Result<ProtocolParams> {
        let mut p = ProtocolParams::default();
        if let Some(d) = self.detector {
            p = p.with_detector(d.0);
        }
        if let Some(r) = self.noise_referral {
            p.noise_referral = r.0;
        }
        if self.l_ab.is_some() && self.l_ac.is_some() {
            return Err(CliError::Config("set at most one of `l_ab` and `l_ac`".into()));
        }
        if self.eps.is_some() && (self.eps_a.is_some() || self.eps_b.is_some()) {
            return Err(CliError::Config("`eps` cannot be combined with `eps_a`/`eps_b`".into()));
        }
        let assign = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        assign(&mut p.v_a, self.v_a);
        assign(&mut p.v_b, self.v_b);
        assign(&mut p.l_bc, self.l_bc);
        assign(&mut p.l_ac, self.l_ac);
        assign(&mut p.eps_a, self.eps.or(self.eps_a));
        assign(&mut p.eps_b, self.eps.or(self.eps_b));
        assign(&mut p.eta, self.eta);
        assign(&mut p.v_el, self.v_el);
        assign(&mut p.beta, self.beta);
        assign(&mut p.kappa, self.kappa);
        assign(&mut p.t, self.t);
        if let Some(l) = self.l_ab {
            p.set_l_ab(l)?;
        }
        p.validate()?;
        Ok(p)
    }

    pub fn solver_config(&self) -> Result<SolverConfig> {
        let mut cfg = SolverConfig::default();
        if let Some(n) = self.t_grid_points {
            cfg.t_grid_points = n;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Worker count: `threads`, else `QKD_THREADS`, else rayon's default.
    pub fn workers(&self) -> Result<Option<usize>> {
        let n = match self.threads {
            Some(n) => Some(n),
            None => match std::env::var("QKD_THREADS") {
                Ok(v) => Some(
                    v.trim()
                        .parse::<usize>()
                        .map_err(|e| CliError::Config(format!("bad QKD_THREADS `{v}`: {e}")))?,
                ),
                Err(_) => None,
            },
        };
        if n == Some(0) {
            return Err(CliError::Config("thread count must be >= 1".into()));
        }
        Ok(n)
    }
}

#[derive(Debug, Parser)]
#[command(name = "zpcqkd", version, about = "Key rate of zero-photon-catalysis CV-MDI-QKD")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Flat `key = value` config file; flags override its entries
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub settings: Settings,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub settings: Settings,
}

impl RunConfig {
    pub fn new(command: Command, settings: Settings) -> Self {
        RunConfig { command, settings }
    }

    pub fn from_cli(cli: Cli) -> Result<Self> {
        let file = match &cli.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                Settings::from_config_text(&text)?
            }
            None => Settings::default(),
        };
        Ok(RunConfig::new(cli.command, cli.settings.over(file)))
    }

    pub fn format(&self) -> OutputFormat {
        self.settings.format.unwrap_or(match self.command {
            Command::Rate | Command::OptimizeT | Command::MaxDistance | Command::Verify => OutputFormat::Json,
            _ => OutputFormat::Csv,
        })
    }
}
