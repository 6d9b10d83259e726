//! Reduction of the two-link relay topology (Alice–Charlie, Bob–Charlie) and
//! Charlie's detector to an equivalent one-way channel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Transmittance by which Charlie's detection noise is referred to the
/// channel input in χ_tot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseReferral {
    /// χ_tot = χ_line + 2χ_hom/T_A.
    #[default]
    AliceLink,
    /// χ_tot = χ_line + 2χ_hom/T_c.
    Equivalent,
}

/// Preset detector models for Charlie's homodyne detectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detector {
    Ideal,
    Imperfect,
}

impl Detector {
    /// `(eta, v_el)` for the preset.
    pub fn efficiency_and_noise(self) -> (f64, f64) {
        match self {
            Detector::Ideal => (1.0, 0.0),
            Detector::Imperfect => (0.975, 0.002),
        }
    }
}

/// Physical parameters of the protocol. Variances and noises are in SNU,
/// distances in km, `kappa` in dB/km.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolParams {
    pub v_a: f64,
    pub v_b: f64,
    pub l_ac: f64,
    pub l_bc: f64,
    pub eps_a: f64,
    pub eps_b: f64,
    pub eta: f64,
    pub v_el: f64,
    pub beta: f64,
    pub kappa: f64,
    /// Catalysis beam-splitter transmittance.
    pub t: f64,
    #[serde(default)]
    pub noise_referral: NoiseReferral,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        ProtocolParams {
            v_a: 40.0,
            v_b: 40.0,
            l_ac: 20.0,
            l_bc: 0.0,
            eps_a: 0.002,
            eps_b: 0.002,
            eta: 1.0,
            v_el: 0.0,
            beta: 0.95,
            kappa: 0.2,
            t: 1.0,
            noise_referral: NoiseReferral::AliceLink,
        }
    }
}

impl ProtocolParams {
    /// Total Alice–Bob distance L_AC + L_BC.
    pub fn l_ab(&self) -> f64 {
        self.l_ac + self.l_bc
    }

    /// Sets L_AC so that L_AC + L_BC equals `l_ab`.
    pub fn set_l_ab(&mut self, l_ab: f64) -> Result<()> {
        if !(l_ab >= self.l_bc) || !l_ab.is_finite() {
            return Err(Error::domain("L_AB", l_ab, "total distance must be finite and >= L_BC"));
        }
        self.l_ac = l_ab - self.l_bc;
        Ok(())
    }

    pub fn with_l_ab(mut self, l_ab: f64) -> Result<Self> {
        self.set_l_ab(l_ab)?;
        Ok(self)
    }

    /// Common excess noise ε_A = ε_B = `eps`.
    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps_a = eps;
        self.eps_b = eps;
        self
    }

    pub fn with_t(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn with_detector(mut self, detector: Detector) -> Self {
        let (eta, v_el) = detector.efficiency_and_noise();
        self.eta = eta;
        self.v_el = v_el;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("V_A", self.v_a),
            ("V_B", self.v_b),
            ("L_AC", self.l_ac),
            ("L_BC", self.l_bc),
            ("eps_A", self.eps_a),
            ("eps_B", self.eps_b),
            ("eta", self.eta),
            ("v_el", self.v_el),
            ("beta", self.beta),
            ("kappa", self.kappa),
            ("T", self.t),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::domain(name, v, "must be finite"));
            }
        }
        if self.v_a < 1.0 {
            return Err(Error::domain("V_A", self.v_a, "must be >= 1"));
        }
        if self.v_b <= 1.0 {
            return Err(Error::domain("V_B", self.v_b, "must be > 1 for the gain factor to exist"));
        }
        if self.l_ac < 0.0 {
            return Err(Error::domain("L_AC", self.l_ac, "distance must be >= 0"));
        }
        if self.l_bc < 0.0 {
            return Err(Error::domain("L_BC", self.l_bc, "distance must be >= 0"));
        }
        if self.eps_a < 0.0 {
            return Err(Error::domain("eps_A", self.eps_a, "excess noise must be >= 0"));
        }
        if self.eps_b < 0.0 {
            return Err(Error::domain("eps_B", self.eps_b, "excess noise must be >= 0"));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::domain("eta", self.eta, "detector efficiency must lie in (0, 1]"));
        }
        if self.v_el < 0.0 {
            return Err(Error::domain("v_el", self.v_el, "electronic noise must be >= 0"));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::domain("beta", self.beta, "reconciliation efficiency must lie in (0, 1]"));
        }
        if self.kappa <= 0.0 {
            return Err(Error::domain("kappa", self.kappa, "fiber loss must be > 0"));
        }
        crate::zpc::check_transmittance(self.t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalentChannel {
    pub t_a: f64,
    pub t_b: f64,
    pub g_sq: f64,
    pub t_c: f64,
    pub eps_th: f64,
    pub chi_hom: f64,
    pub chi_line: f64,
    pub chi_tot: f64,
}

/// T = 10^(−κL/10).
pub fn link_transmittance(l: f64, kappa: f64) -> Result<f64> {
    if !(l >= 0.0) || !l.is_finite() {
        return Err(Error::domain("L", l, "distance must be finite and >= 0"));
    }
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::domain("kappa", kappa, "fiber loss must be finite and > 0"));
    }
    Ok(10f64.powf(-kappa * l / 10.0))
}

/// Gain g² = 2(V_B − 1)/[T_B(V_B + 1)] that minimizes the equivalent excess noise.
pub fn optimal_gain_sq(v_b: f64, t_b: f64) -> f64 {
    2.0 * (v_b - 1.0) / (t_b * (v_b + 1.0))
}

/// Equivalent excess noise at an arbitrary gain g²:
///
/// ε_th = (√(2V_B − 2)/g − √(T_B V_B + T_B))²/T_A + T_B(χ_B − 1)/T_A + χ_A + 1
///
/// with χ_j = (1 − T_j)/T_j + ε_j.
pub fn excess_noise_at_gain(t_a: f64, t_b: f64, v_b: f64, eps_a: f64, eps_b: f64, g_sq: f64) -> f64 {
    let chi_a = (1.0 - t_a) / t_a + eps_a;
    let chi_b = (1.0 - t_b) / t_b + eps_b;
    let mismatch = (2.0 * v_b - 2.0).sqrt() / g_sq.sqrt() - (t_b * v_b + t_b).sqrt();
    mismatch * mismatch / t_a + t_b * (chi_b - 1.0) / t_a + chi_a + 1.0
}

/// Closed form of [`excess_noise_at_gain`] at the optimal gain:
/// ε_th = (T_B/T_A)(ε_B − 2) + ε_A + 2/T_A.
pub fn minimized_excess_noise(t_a: f64, t_b: f64, eps_a: f64, eps_b: f64) -> f64 {
    t_b / t_a * (eps_b - 2.0) + eps_a + 2.0 / t_a
}

/// χ_hom = (v_el + 1 − η)/η.
pub fn detection_noise(eta: f64, v_el: f64) -> f64 {
    (v_el + 1.0 - eta) / eta
}

pub fn derive_channel(p: &ProtocolParams) -> Result<EquivalentChannel> {
    p.validate()?;
    let t_a = link_transmittance(p.l_ac, p.kappa)?;
    let t_b = link_transmittance(p.l_bc, p.kappa)?;
    let g_sq = optimal_gain_sq(p.v_b, t_b);
    let t_c = g_sq * t_a / 2.0;
    let eps_th = minimized_excess_noise(t_a, t_b, p.eps_a, p.eps_b);
    let chi_hom = detection_noise(p.eta, p.v_el);
    let chi_line = (1.0 - t_c) / t_c + eps_th;
    let referral = match p.noise_referral {
        NoiseReferral::AliceLink => t_a,
        NoiseReferral::Equivalent => t_c,
    };
    let chi_tot = chi_line + 2.0 * chi_hom / referral;
    Ok(EquivalentChannel {
        t_a,
        t_b,
        g_sq,
        t_c,
        eps_th,
        chi_hom,
        chi_line,
        chi_tot,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    /// Both links carry loss; the one-mode reduction assumes they are
    /// independent Markovian channels.
    AsymmetricLinks,
    /// ε_th is dominated by the 2(1 − T_B)/T_A loss term rather than by the
    /// physical excess noises.
    LossDominatedExcessNoise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
}

/// Notes about where the one-mode collective-attack model is being stretched.
/// Empty in the extreme asymmetric configuration (L_BC = 0).
pub fn validate_one_mode_assumption(p: &ProtocolParams) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if p.l_bc > 0.0 {
        out.push(Diagnostic {
            kind: DiagnosticKind::AsymmetricLinks,
            message: format!(
                "L_BC = {} km > 0: security assumes two independent Markovian links reducible to a one-mode attack",
                p.l_bc
            ),
        });
    }
    let (Ok(t_a), Ok(t_b)) = (link_transmittance(p.l_ac, p.kappa), link_transmittance(p.l_bc, p.kappa)) else {
        return out;
    };
    if p.eps_b < 2.0 && t_b < 1.0 && t_a < 0.1 {
        let loss_term = 2.0 * (1.0 - t_b) / t_a;
        let eps_th = minimized_excess_noise(t_a, t_b, p.eps_a, p.eps_b);
        if loss_term > 0.5 * eps_th {
            out.push(Diagnostic {
                kind: DiagnosticKind::LossDominatedExcessNoise,
                message: format!(
                    "eps_th = {eps_th:.6} is dominated by 2(1-T_B)/T_A = {loss_term:.6} at T_A = {t_a:.3e}"
                ),
            });
        }
    }
    out
}
