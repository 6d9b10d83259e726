//! Asymptotic secret key rate for reverse reconciliation against one-mode
//! collective Gaussian attacks.

use serde::{Deserialize, Serialize};

use crate::channel::{derive_channel, link_transmittance, ProtocolParams};
use crate::error::{Error, Result};
use crate::gaussian::{self, TwoModeCovariance};
use crate::zpc::{self, ZpcParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBreakdown {
    pub p_d: f64,
    pub i_ab: f64,
    pub chi_be: f64,
    /// Bits per pulse. Negative values are kept so root finders see the sign
    /// change.
    pub k: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub cm_out: TwoModeCovariance,
}

impl RateBreakdown {
    /// K clipped at zero, for plotting.
    pub fn k_clamped(&self) -> f64 {
        self.k.max(0.0)
    }
}

/// Covariance shared by Alice's kept mode and Bob's displaced mode:
/// X = x, Y = T_c(x + χ_tot), Z = √T_c·z.
pub fn output_covariance(p: &ProtocolParams) -> Result<TwoModeCovariance> {
    p.validate()?;
    let source = zpc::catalyzed_covariance(&ZpcParams::new(p.v_a, p.t)?);
    through_channel(p, &source)
}

fn through_channel(p: &ProtocolParams, source: &TwoModeCovariance) -> Result<TwoModeCovariance> {
    let ch = derive_channel(p)?;
    let x = source.x_aa;
    TwoModeCovariance::new(x, ch.t_c * (x + ch.chi_tot), ch.t_c.sqrt() * source.x_ab)
}

fn rate_from_output(p: &ProtocolParams, p_d: f64, cm_out: TwoModeCovariance) -> Result<RateBreakdown> {
    let spectrum = gaussian::symplectic_spectrum(&cm_out)?;
    let i_ab = gaussian::mutual_information(&cm_out)?;
    let chi_be = gaussian::holevo_from_spectrum(&spectrum)?;
    Ok(RateBreakdown {
        p_d,
        i_ab,
        chi_be,
        k: p_d * (p.beta * i_ab - chi_be),
        lambda1: spectrum.lambda1,
        lambda2: spectrum.lambda2,
        lambda3: spectrum.lambda3,
        cm_out,
    })
}

/// K = P_d·(β·I(A:B) − χ(B:E)).
pub fn secret_key_rate(p: &ProtocolParams) -> Result<RateBreakdown> {
    let cm_out = output_covariance(p)?;
    let p_d = zpc::success_probability(&ZpcParams::new(p.v_a, p.t)?);
    rate_from_output(p, p_d, cm_out)
}

/// Rate of the protocol without catalysis: the bare EPR source of variance
/// V_A, heralded with certainty. `p.t` is ignored.
pub fn original_protocol_rate(p: &ProtocolParams) -> Result<RateBreakdown> {
    let p = p.with_t(1.0);
    p.validate()?;
    let source = TwoModeCovariance::epr(p.v_a)?;
    rate_from_output(&p, 1.0, through_channel(&p, &source)?)
}

/// Repeaterless secret-key capacity of a pure-loss channel, −log₂(1 − τ).
pub fn plob_bound(tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::domain("tau", tau, "transmittance must lie in (0, 1)"));
    }
    Ok(-(-tau).ln_1p() / std::f64::consts::LN_2)
}

/// [`plob_bound`] at the end-to-end fiber transmittance 10^(−κL/10).
pub fn plob_bound_at_distance(l_ab: f64, kappa: f64) -> Result<f64> {
    plob_bound(link_transmittance(l_ab, kappa)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Detector;
    use approx::assert_relative_eq;

    #[test]
    fn short_link_covariance_matches_hand_algebra() {
        let p = ProtocolParams {
            l_ac: 0.0,
            eps_a: 0.0,
            eps_b: 0.0,
            ..Default::default()
        };
        let cm = output_covariance(&p).unwrap();
        let t_c = 39.0 / 41.0;
        // χ_tot = (1 − T_c)/T_c at zero excess noise ⇒ Y = T_c·x + 1 − T_c
        assert_relative_eq!(cm.x_aa, 40.0, epsilon = 1e-12);
        assert_relative_eq!(cm.x_bb, t_c * 40.0 + 1.0 - t_c, max_relative = 1e-12);
        assert_relative_eq!(cm.x_ab, (t_c * 1599.0).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn vacuum_source_has_no_correlation() {
        let p = ProtocolParams {
            v_a: 1.0,
            t: 0.6,
            ..Default::default()
        };
        assert_eq!(output_covariance(&p).unwrap().x_ab, 0.0);
        let r = secret_key_rate(&p).unwrap();
        assert_eq!(r.i_ab, 0.0);
        assert!(r.k <= 0.0);
        assert_relative_eq!(r.k, -r.p_d * r.chi_be, epsilon = 1e-15);
    }

    #[test]
    fn unit_transmittance_is_original_protocol() {
        let p = ProtocolParams::default().with_detector(Detector::Imperfect);
        let a = secret_key_rate(&p).unwrap();
        let b = original_protocol_rate(&ProtocolParams { t: 0.3, ..p }).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.p_d, 1.0);
        assert_eq!(b.cm_out.x_aa, 40.0);
    }

    #[test]
    fn breakdown_is_self_consistent() {
        let p = ProtocolParams::default().with_t(0.8).with_l_ab(45.0).unwrap();
        let r = secret_key_rate(&p).unwrap();
        assert_eq!(r.k, r.p_d * (p.beta * r.i_ab - r.chi_be));
        assert!(r.chi_be >= 0.0 && r.i_ab >= 0.0);
        assert!(r.lambda1 >= r.lambda2);
    }

    #[test]
    fn plob_examples() {
        assert_relative_eq!(plob_bound(0.5).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(plob_bound_at_distance(50.0, 0.2).unwrap(), -(0.9f64).log2(), epsilon = 1e-14);
        assert_relative_eq!(plob_bound_at_distance(50.0, 0.2).unwrap(), 0.152, epsilon = 1e-3);
        let tau = 1e-9;
        assert_relative_eq!(plob_bound(tau).unwrap(), tau / std::f64::consts::LN_2, max_relative = 1e-8);
        assert!(plob_bound(1.0).is_err());
        assert!(plob_bound(0.0).is_err());
        assert!(plob_bound_at_distance(0.0, 0.2).is_err());
    }

    #[test]
    fn invalid_params_propagate() {
        let p = ProtocolParams {
            eta: 0.0,
            ..Default::default()
        };
        assert!(matches!(secret_key_rate(&p), Err(Error::Domain { param: "eta", .. })));
    }
}
