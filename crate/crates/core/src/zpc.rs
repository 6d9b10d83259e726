//! Zero-photon catalysis: a beam splitter of transmittance T mixes the
//! signal with a vacuum ancilla and the ancilla is post-selected on no
//! click. The heralded map is the noiseless attenuator √T^{a†a}.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::TwoModeCovariance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZpcParams {
    v_a: f64,
    t: f64,
}

impl ZpcParams {
    pub fn new(v_a: f64, t: f64) -> Result<Self> {
        if !(v_a >= 1.0) || !v_a.is_finite() {
            return Err(Error::domain("V_A", v_a, "EPR variance must be finite and >= 1"));
        }
        check_transmittance(t)?;
        Ok(ZpcParams { v_a, t })
    }

    pub fn v_a(&self) -> f64 {
        self.v_a
    }

    pub fn transmittance(&self) -> f64 {
        self.t
    }

    pub fn reflectance(&self) -> f64 {
        1.0 - self.t
    }

    /// Two-mode squeezing amplitude λ = √((V_A − 1)/(V_A + 1)) = tanh r.
    pub fn lambda(&self) -> f64 {
        lambda_from_variance(self.v_a)
    }

    /// Squeezing amplitude of the catalyzed state, λ√T.
    pub fn effective_lambda(&self) -> f64 {
        self.lambda() * self.t.sqrt()
    }

    fn denominator(&self) -> f64 {
        1.0 + self.t + self.reflectance() * self.v_a
    }
}

pub(crate) fn check_transmittance(t: f64) -> Result<()> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::domain("T", t, "beam-splitter transmittance must lie in (0, 1]"));
    }
    Ok(())
}

pub fn lambda_from_variance(v_a: f64) -> f64 {
    ((v_a - 1.0) / (v_a + 1.0)).sqrt()
}

/// Inverse of [`lambda_from_variance`]: V_A = (1 + λ²)/(1 − λ²).
pub fn variance_from_lambda(lambda: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::domain("lambda", lambda, "squeezing amplitude must lie in [0, 1)"));
    }
    let l2 = lambda * lambda;
    Ok((1.0 + l2) / (1.0 - l2))
}

/// Heralding probability P_d = 2/(1 + T + R·V_A).
pub fn success_probability(p: &ZpcParams) -> f64 {
    2.0 / p.denominator()
}

/// Covariance of the heralded state: x = y = (2V_A − RV_A + R)/(1 + T + RV_A),
/// z = 2√(T(V_A² − 1))/(1 + T + RV_A).
pub fn catalyzed_covariance(p: &ZpcParams) -> TwoModeCovariance {
    let r = p.reflectance();
    let d = p.denominator();
    let x = (2.0 * p.v_a - r * p.v_a + r) / d;
    let z = 2.0 * (p.t * (p.v_a * p.v_a - 1.0)).sqrt() / d;
    // x ≥ 1 and z² = x² − 1 hold analytically for every valid parameter pair.
    TwoModeCovariance {
        x_aa: x,
        x_bb: x,
        x_ab: z,
    }
}

/// Wigner function of the coherent state |√T·α⟩ at phase-space point (q, p),
/// with vacuum quadrature variance 1/4 so that the peak height is 2/π.
pub fn coherent_wigner(alpha: Complex64, t: f64, q: f64, p: f64) -> Result<f64> {
    check_transmittance(t)?;
    if !q.is_finite() || !p.is_finite() {
        return Err(Error::domain("q", q, "phase-space point must be finite"));
    }
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::domain("alpha", alpha.norm(), "amplitude must be finite"));
    }
    let centre = alpha * t.sqrt();
    let dq = q - centre.re;
    let dp = p - centre.im;
    Ok(std::f64::consts::FRAC_2_PI * (-2.0 * (dq * dq + dp * dp)).exp())
}

/// Section of [`coherent_wigner`] along p = 0.
pub fn coherent_wigner_section(alpha: Complex64, t: f64, q: f64) -> Result<f64> {
    coherent_wigner(alpha, t, q, 0.0)
}
