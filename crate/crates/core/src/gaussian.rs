//! Two-mode Gaussian covariance algebra: symplectic spectra, entropies,
//! mutual information and the Holevo bound under heterodyne detection.
//!
//! All matrices are in shot-noise units and in the block form
//!
//! ```text
//! | x_aa·I    x_ab·σz |
//! | x_ab·σz   x_bb·I  |
//! ```
//!
//! with quadrature ordering (q₁, p₁, q₂, p₂).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack below 1 tolerated on symplectic eigenvalues before a state is
/// considered non-physical.
pub const PHYSICAL_TOL: f64 = 1e-9;

/// Negative slack tolerated on the symplectic discriminant Δ² − 4ξ².
pub const DISCRIMINANT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoModeCovariance {
    /// Variance of mode A.
    pub x_aa: f64,
    /// Variance of mode B.
    pub x_bb: f64,
    /// Quadrature correlation between A and B.
    pub x_ab: f64,
}

impl TwoModeCovariance {
    /// Builds a covariance after checking the shot-noise and Cauchy–Schwarz
    /// constraints. Symplectic physicality is checked lazily by
    /// [`symplectic_eigenvalues`].
    pub fn new(x_aa: f64, x_bb: f64, x_ab: f64) -> Result<Self> {
        for (name, v) in [("x_aa", x_aa), ("x_bb", x_bb), ("x_ab", x_ab)] {
            if !v.is_finite() {
                return Err(Error::NonPhysicalCovariance(format!("{name} = {v} is not finite")));
            }
        }
        if x_aa < 1.0 - PHYSICAL_TOL || x_bb < 1.0 - PHYSICAL_TOL {
            return Err(Error::NonPhysicalCovariance(format!(
                "variances ({x_aa}, {x_bb}) below shot noise"
            )));
        }
        if x_ab * x_ab > x_aa * x_bb * (1.0 + 1e-12) {
            return Err(Error::NonPhysicalCovariance(format!(
                "correlation {x_ab} violates Cauchy-Schwarz for variances ({x_aa}, {x_bb})"
            )));
        }
        Ok(TwoModeCovariance { x_aa, x_bb, x_ab })
    }

    /// Two-mode squeezed vacuum of variance `v`.
    pub fn epr(v: f64) -> Result<Self> {
        if !(v >= 1.0) {
            return Err(Error::domain("V", v, "EPR variance must be >= 1"));
        }
        Self::new(v, v, (v * v - 1.0).sqrt())
    }

    /// Δ = X² + Y² − 2Z².
    pub fn delta(&self) -> f64 {
        self.x_aa * self.x_aa + self.x_bb * self.x_bb - 2.0 * self.x_ab * self.x_ab
    }

    /// ξ = XY − Z² (the determinant of the off-diagonal-free 2×2 reduction).
    pub fn xi(&self) -> f64 {
        self.x_aa * self.x_bb - self.x_ab * self.x_ab
    }

    /// Full 4×4 matrix in (q₁, p₁, q₂, p₂) ordering.
    pub fn to_dense(&self) -> [[f64; 4]; 4] {
        let (x, y, z) = (self.x_aa, self.x_bb, self.x_ab);
        [
            [x, 0.0, z, 0.0],
            [0.0, x, 0.0, -z],
            [z, 0.0, y, 0.0],
            [0.0, -z, 0.0, y],
        ]
    }
}

/// Symplectic eigenvalues of the joint state plus the conditional eigenvalue
/// of mode A after heterodyne detection of mode B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymplecticSpectrum {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
}

/// Returns `(λ₁, λ₂)` with `λ₁ ≥ λ₂`.
///
/// The discriminant Δ² − 4ξ² is evaluated in the factored form
/// (X − Y)²·((X + Y)² − 4Z²), which is exact for symmetric states and keeps
/// pure states on the degenerate boundary.
pub fn symplectic_eigenvalues(cm: &TwoModeCovariance) -> Result<(f64, f64)> {
    let (x, y, z) = (cm.x_aa, cm.x_bb, cm.x_ab);
    let delta = cm.delta();
    let xi = cm.xi();
    let mut disc = (x - y) * (x - y) * ((x + y) * (x + y) - 4.0 * z * z);
    if disc < 0.0 {
        if disc < -DISCRIMINANT_TOL {
            return Err(Error::NonPhysicalCovariance(format!(
                "symplectic discriminant {disc:e} is negative"
            )));
        }
        disc = 0.0;
    }
    let l1_sq = 0.5 * (delta + disc.sqrt());
    if !(l1_sq > 0.0) {
        return Err(Error::NonPhysicalCovariance(format!(
            "largest squared symplectic eigenvalue {l1_sq:e} is not positive"
        )));
    }
    let lambda1 = l1_sq.sqrt();
    // λ₁λ₂ = |ξ| avoids the cancellation in (Δ − √disc)/2.
    let lambda2 = xi.abs() / lambda1;
    if lambda2 < 1.0 - PHYSICAL_TOL {
        return Err(Error::NonPhysicalCovariance(format!(
            "symplectic eigenvalue {lambda2} below 1"
        )));
    }
    Ok((lambda1, lambda2))
}

/// λ₃ = X − Z²/(Y + 1): symplectic eigenvalue of A conditioned on a
/// heterodyne measurement of B.
pub fn conditional_eigenvalue(cm: &TwoModeCovariance) -> Result<f64> {
    let lambda3 = cm.x_aa - cm.x_ab * cm.x_ab / (cm.x_bb + 1.0);
    if lambda3 < 1.0 - PHYSICAL_TOL {
        return Err(Error::NonPhysicalCovariance(format!(
            "conditional eigenvalue {lambda3} below 1"
        )));
    }
    Ok(lambda3)
}

pub fn symplectic_spectrum(cm: &TwoModeCovariance) -> Result<SymplecticSpectrum> {
    let (lambda1, lambda2) = symplectic_eigenvalues(cm)?;
    let lambda3 = conditional_eigenvalue(cm)?;
    Ok(SymplecticSpectrum {
        lambda1,
        lambda2,
        lambda3,
    })
}

/// G(ς) = (ς+1)·log₂(ς+1) − ς·log₂ς, the entropy of a thermal state with
/// mean photon number ς. G(0) = 0.
pub fn von_neumann_g(varsigma: f64) -> Result<f64> {
    if !(varsigma >= 0.0) || !varsigma.is_finite() {
        return Err(Error::domain("varsigma", varsigma, "must be finite and >= 0"));
    }
    if varsigma == 0.0 {
        return Ok(0.0);
    }
    Ok((varsigma + 1.0) * (varsigma + 1.0).log2() - varsigma * varsigma.log2())
}

/// Entropy contribution of one symplectic eigenvalue, with values in
/// `[1 − PHYSICAL_TOL, 1)` clamped to exactly 1.
fn eigen_entropy(lambda: f64) -> Result<f64> {
    if lambda < 1.0 - PHYSICAL_TOL {
        return Err(Error::NonPhysicalCovariance(format!(
            "symplectic eigenvalue {lambda} below 1"
        )));
    }
    von_neumann_g((lambda.max(1.0) - 1.0) / 2.0)
}

/// Shannon information between the heterodyne outcomes of A and B, in bits.
pub fn mutual_information(cm: &TwoModeCovariance) -> Result<f64> {
    let joint = (cm.x_aa + 1.0) * (cm.x_bb + 1.0);
    let conditional = joint - cm.x_ab * cm.x_ab;
    if !(conditional > 0.0) {
        return Err(Error::NonPhysicalCovariance(format!(
            "conditional variance product {conditional:e} is not positive"
        )));
    }
    Ok((joint / conditional).log2())
}

/// χ(B:E) = G((λ₁−1)/2) + G((λ₂−1)/2) − G((λ₃−1)/2) for reverse
/// reconciliation with heterodyne detection at B.
pub fn holevo_bound(cm: &TwoModeCovariance) -> Result<f64> {
    let s = symplectic_spectrum(cm)?;
    holevo_from_spectrum(&s)
}

pub(crate) fn holevo_from_spectrum(s: &SymplecticSpectrum) -> Result<f64> {
    Ok(eigen_entropy(s.lambda1)? + eigen_entropy(s.lambda2)? - eigen_entropy(s.lambda3)?)
}
