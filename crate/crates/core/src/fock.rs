//! Brute-force truncated Fock-space model of zero-photon catalysis on a
//! two-mode squeezed vacuum, used as an independent cross-check of the
//! closed-form heralding probability and covariance.
//!
//! Two ZPC realizations are provided: the diagonal √T^{n} multiplier, and an
//! explicit beam-splitter unitary obtained by matrix exponentiation followed
//! by projection of the ancilla on vacuum.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::TwoModeCovariance;
use crate::zpc::{self, ZpcParams};

/// Default bound on the probability mass lost to truncation.
pub const DEFAULT_DEFECT_BUDGET: f64 = 1e-6;

/// Pure two-mode state ψ(n₁, n₂) with photon numbers up to `cutoff` in each
/// mode. Amplitudes carry total weight `1 − norm_defect`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedState {
    /// Row index n₁ (mode A₁), column index n₂ (mode A₂).
    pub amplitudes: DMatrix<Complex64>,
    pub cutoff: usize,
    pub norm_defect: f64,
}

impl TruncatedState {
    pub fn vacuum(cutoff: usize) -> Self {
        let mut amplitudes = DMatrix::zeros(cutoff + 1, cutoff + 1);
        amplitudes[(0, 0)] = Complex64::new(1.0, 0.0);
        TruncatedState {
            amplitudes,
            cutoff,
            norm_defect: 0.0,
        }
    }

    /// Σ|ψ|² over the retained photon numbers.
    pub fn retained_mass(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn amp(&self, n1: usize, n2: usize) -> Complex64 {
        if n1 > self.cutoff || n2 > self.cutoff {
            Complex64::new(0.0, 0.0)
        } else {
            self.amplitudes[(n1, n2)]
        }
    }

    /// Tr ρ² = Σᵢⱼ |ρᵢⱼ|² of the renormalized joint density matrix ρ = |ψ⟩⟨ψ|.
    pub fn purity(&self) -> f64 {
        let norm = self.retained_mass();
        let psi: Vec<Complex64> = self.amplitudes.iter().copied().collect();
        let mut total = 0.0;
        for a in &psi {
            for b in &psi {
                total += (a * b.conj()).norm_sqr();
            }
        }
        total / (norm * norm)
    }

    /// Tr ρ₁² of the reduced state of mode A₁.
    pub fn reduced_purity(&self) -> f64 {
        let norm = self.retained_mass();
        let rho1 = (&self.amplitudes * self.amplitudes.adjoint()) / Complex64::new(norm, 0.0);
        (&rho1 * &rho1).trace().re
    }
}

/// Two-mode squeezed vacuum √(1−λ²)·Σ λⁿ|n, n⟩ truncated at `cutoff`,
/// rejected when the discarded mass λ^{2(N+1)} exceeds the default budget.
pub fn build_epr(v_a: f64, cutoff: usize) -> Result<TruncatedState> {
    build_epr_with_budget(v_a, cutoff, DEFAULT_DEFECT_BUDGET)
}

pub fn build_epr_with_budget(v_a: f64, cutoff: usize, budget: f64) -> Result<TruncatedState> {
    if !(v_a >= 1.0) || !v_a.is_finite() {
        return Err(Error::domain("V_A", v_a, "EPR variance must be finite and >= 1"));
    }
    if cutoff == 0 {
        return Err(Error::domain("cutoff", 0.0, "cutoff must be >= 1"));
    }
    let lambda = zpc::lambda_from_variance(v_a);
    let l2 = lambda * lambda;
    let norm_defect = l2.powi(cutoff as i32 + 1);
    if norm_defect > budget {
        return Err(Error::CutoffTooSmall {
            cutoff,
            norm_defect,
            budget,
        });
    }
    let head = (1.0 - l2).sqrt();
    let mut amplitudes = DMatrix::zeros(cutoff + 1, cutoff + 1);
    let mut c = head;
    for n in 0..=cutoff {
        amplitudes[(n, n)] = Complex64::new(c, 0.0);
        c *= lambda;
    }
    Ok(TruncatedState {
        amplitudes,
        cutoff,
        norm_defect,
    })
}

/// Applies a single-mode operator (matrix in the Fock basis of A₂) and returns
/// the renormalized state with the unnormalized squared norm.
fn apply_to_mode2(state: &TruncatedState, op: &DMatrix<f64>, tail_factor: f64) -> (TruncatedState, f64) {
    let op_c = op.map(|v| Complex64::new(v, 0.0));
    // ψ'(n₁, m) = Σ_n op[m, n]·ψ(n₁, n)
    let out = &state.amplitudes * op_c.transpose();
    let kept: f64 = out.iter().map(|a| a.norm_sqr()).sum();
    // The discarded tail is contracted at least as strongly as the last
    // retained level; use that as the post-operation tail estimate.
    let tail = state.norm_defect * tail_factor;
    let scale = 1.0 / (kept + tail).sqrt();
    (
        TruncatedState {
            amplitudes: out * Complex64::new(scale, 0.0),
            cutoff: state.cutoff,
            norm_defect: tail / (kept + tail),
        },
        kept,
    )
}

/// ZPC as the diagonal operator √T^{a₂†a₂}.
pub fn apply_zpc(state: &TruncatedState, t: f64) -> Result<(TruncatedState, f64)> {
    zpc::check_transmittance(t)?;
    let n = state.cutoff + 1;
    let op = DMatrix::from_fn(n, n, |i, j| if i == j { t.sqrt().powi(i as i32) } else { 0.0 });
    Ok(apply_to_mode2(state, &op, t.powi(n as i32)))
}

/// ⟨m|_A ⟨0|_D U_BS |n⟩_A |0⟩_D for a beam splitter of transmittance `t`,
/// with U_BS = exp[θ(a†d − a d†)], cos θ = √t. The generator conserves total
/// photon number, so it is exponentiated exactly on each block
/// {|n − k⟩_A |k⟩_D : k = 0..n} for n ≤ `cutoff`.
pub fn beam_splitter_vacuum_projection(t: f64, cutoff: usize) -> Result<DMatrix<f64>> {
    zpc::check_transmittance(t)?;
    let theta = t.sqrt().acos();
    let mut out = DMatrix::<f64>::zeros(cutoff + 1, cutoff + 1);
    for n in 0..=cutoff {
        // basis index k ↔ |n − k, k⟩
        let mut gen = DMatrix::<f64>::zeros(n + 1, n + 1);
        for k in 0..=n {
            let na = n - k;
            // a†d |na, k⟩ = √(na+1)√k |na+1, k−1⟩
            if k > 0 {
                gen[(k - 1, k)] += theta * ((na + 1) as f64).sqrt() * (k as f64).sqrt();
            }
            // −a d† |na, k⟩ = −√na√(k+1) |na−1, k+1⟩
            if na > 0 {
                gen[(k + 1, k)] -= theta * (na as f64).sqrt() * ((k + 1) as f64).sqrt();
            }
        }
        let unitary = gen.exp();
        // ancilla enters and leaves in vacuum: the k = 0 → k = 0 element
        out[(n, n)] = unitary[(0, 0)];
    }
    Ok(out)
}

/// ZPC realized with explicit beam-splitter matrix elements.
pub fn apply_zpc_beam_splitter(state: &TruncatedState, t: f64) -> Result<(TruncatedState, f64)> {
    let op = beam_splitter_vacuum_projection(t, state.cutoff)?;
    let n = state.cutoff + 1;
    Ok(apply_to_mode2(state, &op, t.powi(n as i32)))
}

/// Full 4×4 quadrature covariance in (q₁, p₁, q₂, p₂) ordering, with
/// q = a + a†, p = −i(a − a†) so the vacuum has unit variance.
pub fn full_covariance(state: &TruncatedState) -> Result<[[f64; 4]; 4]> {
    if state.norm_defect > DEFAULT_DEFECT_BUDGET {
        return Err(Error::CutoffTooSmall {
            cutoff: state.cutoff,
            norm_defect: state.norm_defect,
            budget: DEFAULT_DEFECT_BUDGET,
        });
    }
    let n = state.cutoff;
    let norm = state.retained_mass();
    let sq = |k: usize| (k as f64).sqrt();
    let zero = Complex64::new(0.0, 0.0);
    let (mut n1, mut n2) = (0.0, 0.0);
    let (mut a1, mut a2) = (zero, zero);
    let (mut a1a1, mut a2a2) = (zero, zero);
    let (mut a1a2, mut a1d_a2) = (zero, zero);
    for i in 0..=n {
        for j in 0..=n {
            let psi = state.amp(i, j);
            let c = psi.conj();
            n1 += i as f64 * psi.norm_sqr();
            n2 += j as f64 * psi.norm_sqr();
            a1 += c * sq(i + 1) * state.amp(i + 1, j);
            a2 += c * sq(j + 1) * state.amp(i, j + 1);
            a1a1 += c * sq(i + 1) * sq(i + 2) * state.amp(i + 2, j);
            a2a2 += c * sq(j + 1) * sq(j + 2) * state.amp(i, j + 2);
            a1a2 += c * sq(i + 1) * sq(j + 1) * state.amp(i + 1, j + 1);
            if j > 0 {
                // ⟨ψ|a₁†a₂|ψ⟩ picks ψ(i, j) → ψ(i+1, j−1)
                a1d_a2 += state.amp(i + 1, j - 1).conj() * sq(i + 1) * sq(j) * psi;
            }
        }
    }
    let s = 1.0 / norm;
    let (n1, n2) = (n1 * s, n2 * s);
    let (a1, a2, a1a1, a2a2, a1a2, a1d_a2) = (a1 * s, a2 * s, a1a1 * s, a2a2 * s, a1a2 * s, a1d_a2 * s);

    let single = |nn: f64, a: Complex64, aa: Complex64| {
        let vq = 1.0 + 2.0 * nn + 2.0 * aa.re - 4.0 * a.re * a.re;
        let vp = 1.0 + 2.0 * nn - 2.0 * aa.re - 4.0 * a.im * a.im;
        let cqp = 2.0 * aa.im - 4.0 * a.re * a.im;
        (vq, vp, cqp)
    };
    let (q1q1, p1p1, q1p1) = single(n1, a1, a1a1);
    let (q2q2, p2p2, q2p2) = single(n2, a2, a2a2);
    let (m_q1, m_p1, m_q2, m_p2) = (2.0 * a1.re, 2.0 * a1.im, 2.0 * a2.re, 2.0 * a2.im);
    let q1q2 = 2.0 * (a1a2.re + a1d_a2.re) - m_q1 * m_q2;
    let p1p2 = 2.0 * (-a1a2.re + a1d_a2.re) - m_p1 * m_p2;
    let q1p2 = 2.0 * (a1a2.im + a1d_a2.im) - m_q1 * m_p2;
    let p1q2 = 2.0 * (a1a2.im - a1d_a2.im) - m_p1 * m_q2;
    Ok([
        [q1q1, q1p1, q1q2, q1p2],
        [q1p1, p1p1, p1q2, p1p2],
        [q1q2, p1q2, q2q2, q2p2],
        [q1p2, p1p2, q2p2, p2p2],
    ])
}

/// Second moments of the state in the (X, Y, Z) standard form. Fails if the
/// state is not of that form to within 1e-9.
pub fn covariance_of(state: &TruncatedState) -> Result<TwoModeCovariance> {
    let g = full_covariance(state)?;
    let (x, y, z) = (g[0][0], g[2][2], g[0][2]);
    let expected = TwoModeCovariance {
        x_aa: x,
        x_bb: y,
        x_ab: z,
    }
    .to_dense();
    let deviation = g
        .iter()
        .flatten()
        .zip(expected.iter().flatten())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if deviation > 1e-9 {
        return Err(Error::NotStandardForm(deviation));
    }
    TwoModeCovariance::new(x, y, z)
}

/// One line of the oracle verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<OracleCheck>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub const VERIFY_VARIANCES: [f64; 3] = [2.0, 3.0, 5.0];
pub const VERIFY_TRANSMITTANCES: [f64; 4] = [0.3, 0.5, 0.7, 0.9];

/// Runs the oracle against the closed forms on the (V_A, T) verification
/// grid: heralding probability and covariance at cutoff 80, purity of the
/// heralded state, and agreement of the two ZPC realizations at cutoff 20.
pub fn verify() -> Result<VerificationReport> {
    let mut pd_dev: f64 = 0.0;
    let mut cov_dev: f64 = 0.0;
    let mut purity_dev: f64 = 0.0;
    let mut epr_dev: f64 = 0.0;
    let mut bs_dev: f64 = 0.0;
    for &v_a in &VERIFY_VARIANCES {
        let epr = build_epr(v_a, 80)?;
        let cm0 = covariance_of(&epr)?;
        epr_dev = epr_dev
            .max((cm0.x_aa - v_a).abs())
            .max((cm0.x_bb - v_a).abs())
            .max((cm0.x_ab - (v_a * v_a - 1.0).sqrt()).abs());
        let small = build_epr_with_budget(v_a, 20, 1.0)?;
        for &t in &VERIFY_TRANSMITTANCES {
            let params = ZpcParams::new(v_a, t)?;
            let (out, prob) = apply_zpc(&epr, t)?;
            pd_dev = pd_dev.max((prob - zpc::success_probability(&params)).abs());
            let cm = covariance_of(&out)?;
            let closed = zpc::catalyzed_covariance(&params);
            cov_dev = cov_dev
                .max((cm.x_aa - closed.x_aa).abs())
                .max((cm.x_bb - closed.x_bb).abs())
                .max((cm.x_ab - closed.x_ab).abs());
            purity_dev = purity_dev.max((out.purity() - 1.0).abs());

            let (diag, p_diag) = apply_zpc(&small, t)?;
            let (bs, p_bs) = apply_zpc_beam_splitter(&small, t)?;
            let amp_dev = diag
                .amplitudes
                .iter()
                .zip(bs.amplitudes.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            bs_dev = bs_dev.max(amp_dev).max((p_diag - p_bs).abs());
        }
    }
    let check = |name: &str, dev: f64, tol: f64| OracleCheck {
        name: name.to_string(),
        max_deviation: dev,
        tolerance: tol,
        passed: dev <= tol,
    };
    Ok(VerificationReport {
        checks: vec![
            check("epr_moments_n80", epr_dev, 1e-8),
            check("success_probability_n80", pd_dev, 1e-8),
            check("catalyzed_covariance_n80", cov_dev, 1e-6),
            check("heralded_purity_n80", purity_dev, 1e-8),
            check("beam_splitter_vs_diagonal_n20", bs_dev, 1e-10),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn vacuum_epr_is_exact() {
        let s = build_epr(1.0, 5).unwrap();
        assert_eq!(s.norm_defect, 0.0);
        assert_eq!(s.amplitudes[(0, 0)].re, 1.0);
        assert_eq!(s.retained_mass(), 1.0);
        let cm = covariance_of(&s).unwrap();
        assert_eq!((cm.x_aa, cm.x_bb, cm.x_ab), (1.0, 1.0, 0.0));
        assert_eq!(TruncatedState::vacuum(5), s);
    }

    #[test]
    fn epr_norm_defect_is_geometric_tail() {
        let s = build_epr(5.0, 60).unwrap();
        let expected = (2.0f64 / 3.0).powi(61);
        assert_relative_eq!(s.norm_defect, expected, max_relative = 1e-12);
        assert!((s.norm_defect - 1.9e-11).abs() < 1e-12);
        assert!((s.retained_mass() + s.norm_defect - 1.0).abs() < 1e-12);
        let lambda = zpc::lambda_from_variance(5.0);
        for n in 0..60 {
            assert_relative_eq!(s.amplitudes[(n + 1, n + 1)].re / s.amplitudes[(n, n)].re, lambda, max_relative = 1e-12);
        }
    }

    #[test]
    fn cutoff_budget_is_enforced() {
        assert!(matches!(build_epr(40.0, 60), Err(Error::CutoffTooSmall { cutoff: 60, .. })));
        assert!(build_epr(0.5, 10).is_err());
        assert!(build_epr(2.0, 0).is_err());
    }

    #[test]
    fn unit_transmittance_is_identity() {
        let s = build_epr(3.0, 40).unwrap();
        let (out, p) = apply_zpc(&s, 1.0).unwrap();
        assert_relative_eq!(p, 1.0, epsilon = 1e-12);
        for (a, b) in out.amplitudes.iter().zip(s.amplitudes.iter()) {
            assert!((a - b).norm() < 1e-15);
        }
        let vac = TruncatedState::vacuum(10);
        let (out, p) = apply_zpc(&vac, 0.4).unwrap();
        assert_eq!(p, 1.0);
        assert_eq!(out, vac);
    }

    #[test]
    fn heralding_probability_matches_closed_form() {
        let s = build_epr(5.0, 60).unwrap();
        let (out, p) = apply_zpc(&s, 0.7).unwrap();
        assert!((p - 0.625).abs() < 1e-9);
        assert!((out.retained_mass() + out.norm_defect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn epr_moments() {
        let s = build_epr(5.0, 60).unwrap();
        let cm = covariance_of(&s).unwrap();
        assert!((cm.x_aa - 5.0).abs() < 1e-8);
        assert!((cm.x_bb - 5.0).abs() < 1e-8);
        assert!((cm.x_ab - 24f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn catalyzed_moments_match_closed_form() {
        let s = build_epr(5.0, 60).unwrap();
        let (out, _) = apply_zpc(&s, 0.7).unwrap();
        let cm = covariance_of(&out).unwrap();
        let closed = zpc::catalyzed_covariance(&ZpcParams::new(5.0, 0.7).unwrap());
        assert!((cm.x_aa - 2.75).abs() < 1e-7);
        assert!((cm.x_ab - closed.x_ab).abs() < 1e-7);
        assert!((cm.x_bb - closed.x_bb).abs() < 1e-7);
    }

    #[test]
    fn heralded_state_stays_pure_two_mode_squeezed() {
        let s = build_epr(3.0, 60).unwrap();
        let (out, _) = apply_zpc(&s, 0.5).unwrap();
        assert!((out.purity() - 1.0).abs() < 1e-8);
        // a pure two-mode Gaussian has reduced purity 1/x
        let x = zpc::catalyzed_covariance(&ZpcParams::new(3.0, 0.5).unwrap()).x_aa;
        assert_relative_eq!(out.reduced_purity(), 1.0 / x, max_relative = 1e-9);
    }

    #[test]
    fn beam_splitter_projection_is_noiseless_attenuator() {
        for t in [0.2, 0.5, 0.9, 1.0] {
            let op = beam_splitter_vacuum_projection(t, 12).unwrap();
            for m in 0..=12 {
                for n in 0..=12 {
                    let expected = if m == n { t.sqrt().powi(n as i32) } else { 0.0 };
                    assert!((op[(m, n)] - expected).abs() < 1e-12, "t={t} ({m},{n})");
                }
            }
        }
    }

    #[test]
    fn detects_non_standard_form() {
        // a single-mode displaced component breaks the (X, Y, Z) form
        let mut s = TruncatedState::vacuum(4);
        s.amplitudes[(0, 0)] = Complex64::new(0.8, 0.0);
        s.amplitudes[(1, 0)] = Complex64::new(0.6, 0.0);
        assert!(matches!(covariance_of(&s), Err(Error::NotStandardForm(_))));
    }

    #[test]
    fn verification_suite_passes() {
        let report = verify().unwrap();
        assert_eq!(report.checks.len(), 5);
        for c in &report.checks {
            assert!(c.passed, "{c:?}");
        }
    }
}
