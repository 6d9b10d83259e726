#![allow(dead_code)]

use nalgebra::{Complex, Matrix2, Matrix4};

type Complex64 = Complex<f64>;
use rand::Rng;
use zpcqkd_core::TwoModeCovariance;

/// Symplectic eigenvalues as the moduli of the eigenvalues of iΩΓ, sorted
/// descending. iΩΓ is similar to the Hermitian matrix iΓ^{1/2}ΩΓ^{1/2}, whose
/// spectrum is computed with a Hermitian eigensolver.
pub fn dense_symplectic_eigenvalues(cm: &TwoModeCovariance) -> (f64, f64) {
    let d = cm.to_dense();
    let gamma = Matrix4::from_fn(|i, j| d[i][j]);
    let omega = Matrix4::new(
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    );
    let eig = gamma.symmetric_eigen();
    let sqrt_gamma = eig.eigenvectors * Matrix4::from_diagonal(&eig.eigenvalues.map(f64::sqrt)) * eig.eigenvectors.transpose();
    let h = (sqrt_gamma * omega * sqrt_gamma).map(|v| Complex64::new(0.0, v));
    let mut moduli: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().map(|v| v.abs()).collect();
    moduli.sort_by(|a, b| b.partial_cmp(a).unwrap());
    // eigenvalues come in ±ν pairs
    (0.5 * (moduli[0] + moduli[1]), 0.5 * (moduli[2] + moduli[3]))
}

/// Conditional eigenvalue from the general heterodyne formula
/// Γ_A − σ(Γ_B + I)⁻¹σᵀ on full 2×2 blocks.
pub fn dense_conditional_eigenvalue(cm: &TwoModeCovariance) -> f64 {
    let d = cm.to_dense();
    let block = |r: usize, c: usize| Matrix2::new(d[r][c], d[r][c + 1], d[r + 1][c], d[r + 1][c + 1]);
    let (ga, gb, sigma) = (block(0, 0), block(2, 2), block(0, 2));
    let cond = ga - sigma * (gb + Matrix2::identity()).try_inverse().unwrap() * sigma.transpose();
    cond.determinant().sqrt()
}

pub fn g(s: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        (s + 1.0) * (s + 1.0).log2() - s * s.log2()
    }
}

/// A physical covariance: an EPR state of variance `v`, optionally with
/// extra noise on mode A, sent through a lossy noisy channel.
pub fn random_physical<R: Rng>(rng: &mut R) -> TwoModeCovariance {
    let v: f64 = 1.0 + rng.gen::<f64>().powi(2) * 200.0;
    let t: f64 = rng.gen_range(1e-3..=1.0);
    let eps: f64 = rng.gen::<f64>() * 0.5;
    let extra_a: f64 = if rng.gen_bool(0.3) { rng.gen::<f64>() * 5.0 } else { 0.0 };
    let chi = (1.0 - t) / t + eps;
    let x = v + extra_a;
    let y = t * (v + chi);
    let z = if rng.gen_bool(0.1) { 0.0 } else { (t * (v * v - 1.0)).sqrt() };
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    TwoModeCovariance::new(x, y, sign * z).unwrap()
}
