//! The interface boundary symbol `s(lambda, tau)` and its scaled pieces.
//!
//! All complex square roots go through [`sqrt_principal`]: the cut lies on
//! the negative real axis and points on the cut map to the upper imaginary
//! axis. Evaluation order is fixed (`omega` before `eta` before `s`), so a
//! [`SymbolEval`] recomputed from its inputs is bit-identical.
//!
//! The analytic continuation in `lambda` is only valid while the radicands
//! `rho_j lambda + mu_j tau^2` stay off the negative real axis, i.e. for
//! `Re lambda > -min_j(mu_j / rho_j) tau^2` when `lambda` is real.

pub use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{FluidParams, Phase};

/// Smallest denominator magnitude accepted before reporting a pole.
pub const DENOMINATOR_FLOOR: f64 = 1e-300;

/// Principal square root with `Re r >= 0`, and `Im r >= 0` whenever `Re r = 0`.
///
/// Unlike `Complex64::sqrt`, a negative real with a `-0.0` imaginary part
/// still maps to the upper half-plane.
pub fn sqrt_principal(z: Complex64) -> Complex64 {
    if z.re == 0.0 && z.im == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let r = z.re.hypot(z.im);
    if z.re >= 0.0 {
        let t = (0.5 * (r + z.re)).sqrt();
        Complex64::new(t, z.im / (2.0 * t))
    } else {
        let u = (0.5 * (r - z.re)).sqrt();
        let im = if z.im < 0.0 { -u } else { u };
        Complex64::new(z.im.abs() / (2.0 * u), im)
    }
}

/// `omega_j = sqrt(rho_j lambda + mu_j tau^2)`.
pub fn omega(phase: Phase, lambda: Complex64, tau: f64, p: &FluidParams) -> Complex64 {
    sqrt_principal(lambda * p.rho(phase) + p.mu(phase) * tau * tau)
}

/// `eta_1 = sqrt(mu_1) omega_1 + mu_2 tau`, `eta_2 = sqrt(mu_2) omega_2 + mu_1 tau`.
///
/// Note the crossed viscosity index in the second term.
pub fn eta(phase: Phase, lambda: Complex64, tau: f64, p: &FluidParams) -> Complex64 {
    let w = omega(phase, lambda, tau, p);
    eta_from_omega(phase, w, tau, p)
}

fn eta_from_omega(phase: Phase, w: Complex64, tau: f64, p: &FluidParams) -> Complex64 {
    match phase {
        Phase::Lower => w * p.mu1.sqrt() + p.mu2 * tau,
        Phase::Upper => w * p.mu2.sqrt() + p.mu1 * tau,
    }
}

/// One evaluation of the boundary symbol together with its intermediates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolEval {
    pub lambda: Complex64,
    pub tau: f64,
    pub value: Complex64,
    pub omega1: Complex64,
    pub omega2: Complex64,
    pub eta1: Complex64,
    pub eta2: Complex64,
}

/// Full evaluation of `s(lambda, tau)`.
///
/// For `tau = 0` the value is `lambda` (the limit `tau -> 0+` at fixed
/// `lambda`); intermediates are then evaluated at `tau = 0` as well.
pub fn evaluate(lambda: Complex64, tau: f64, p: &FluidParams) -> Result<SymbolEval> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::DegenerateInput(format!("tau must be finite and >= 0, got {tau}")));
    }
    let omega1 = omega(Phase::Lower, lambda, tau, p);
    let omega2 = omega(Phase::Upper, lambda, tau, p);
    let eta1 = eta_from_omega(Phase::Lower, omega1, tau, p);
    let eta2 = eta_from_omega(Phase::Upper, omega2, tau, p);
    let value = if tau == 0.0 {
        if lambda.re == 0.0 && lambda.im == 0.0 {
            return Err(Error::DegenerateInput("s(0, 0) is undefined".into()));
        }
        lambda
    } else {
        let numerator = p.sigma * tau * tau - p.jump() * p.gamma_a;
        let denominator = lambda * (p.rho_sum() / tau) + eta1 * eta2 * 4.0 / (eta1 + eta2);
        let mag = denominator.norm();
        if !(mag >= DENOMINATOR_FLOOR) {
            return Err(Error::DivisionBreakdown(mag));
        }
        lambda + numerator / denominator
    };
    Ok(SymbolEval { lambda, tau, value, omega1, omega2, eta1, eta2 })
}

/// The boundary symbol `s(lambda, tau)`.
pub fn symbol_s(lambda: Complex64, tau: f64, p: &FluidParams) -> Result<Complex64> {
    evaluate(lambda, tau, p).map(|e| e.value)
}

/// Pole-free form of the symbol for contour work:
/// `G = s * D * (eta_1 + eta_2) / tau`, where `D` is the denominator of `s`.
///
/// Expanded, `G = lambda ((rho_1 + rho_2) lambda (eta_1 + eta_2) / tau + 4 eta_1 eta_2) / tau
/// + (sigma tau^2 - [[rho]] gamma_a)(eta_1 + eta_2) / tau`. It is analytic wherever the
/// radicands avoid the cut, and (for `tau > 0`) vanishes exactly at the zeros of `s`:
/// `eta_1 = eta_2 = 0` is impossible on the principal branch.
pub fn symbol_numerator(lambda: Complex64, tau: f64, p: &FluidParams) -> Complex64 {
    let eta1 = eta(Phase::Lower, lambda, tau, p);
    let eta2 = eta(Phase::Upper, lambda, tau, p);
    let sum = eta1 + eta2;
    let numerator = p.sigma * tau * tau - p.jump() * p.gamma_a;
    (lambda * (lambda * sum * (p.rho_sum() / tau) + eta1 * eta2 * 4.0) + sum * numerator) / tau
}

/// `psi(tau) = sigma / ((rho_1 + rho_2) tau) - [[rho]] gamma_a / ((rho_1 + rho_2) tau^3)`.
pub fn psi(tau: f64, p: &FluidParams) -> Result<f64> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::DegenerateInput(format!("psi needs tau > 0, got {tau}")));
    }
    let rs = p.rho_sum();
    Ok(p.sigma / (rs * tau) - p.jump() * p.gamma_a / (rs * tau * tau * tau))
}

/// Scaled `eta_j(zeta)` with `omega_j(zeta) = sqrt(rho_j zeta + mu_j)`.
fn scaled_etas(zeta: Complex64, p: &FluidParams) -> (Complex64, Complex64) {
    let w1 = sqrt_principal(zeta * p.rho1 + p.mu1);
    let w2 = sqrt_principal(zeta * p.rho2 + p.mu2);
    (w1 * p.mu1.sqrt() + p.mu2, w2 * p.mu2.sqrt() + p.mu1)
}

/// `1/k(zeta) = zeta + 4/(rho_1 + rho_2) * eta_1 eta_2 / (eta_1 + eta_2)`.
pub fn inv_k_of_zeta(zeta: Complex64, p: &FluidParams) -> Complex64 {
    let (e1, e2) = scaled_etas(zeta, p);
    zeta + e1 * e2 / (e1 + e2) * (4.0 / p.rho_sum())
}

/// `k(zeta)`; real and positive for real `zeta >= 0`, with
/// `k(0) = (rho_1 + rho_2) / (2 (mu_1 + mu_2))`.
pub fn k_of_zeta(zeta: Complex64, p: &FluidParams) -> Result<Complex64> {
    let inv = inv_k_of_zeta(zeta, p);
    let mag = inv.norm();
    if !(mag >= DENOMINATOR_FLOOR) {
        return Err(Error::DivisionBreakdown(mag));
    }
    Ok(inv.inv())
}

/// Closed form of `k(0)`.
pub fn k_at_zero(p: &FluidParams) -> f64 {
    p.rho_sum() / (2.0 * (p.mu1 + p.mu2))
}

/// `Phi(zeta) = zeta / k(zeta)`.
pub fn phi(zeta: Complex64, p: &FluidParams) -> Result<Complex64> {
    let inv = inv_k_of_zeta(zeta, p);
    let mag = inv.norm();
    if !(mag >= DENOMINATOR_FLOOR) {
        return Err(Error::DivisionBreakdown(mag));
    }
    Ok(zeta * inv)
}

/// `Phi` and `Phi'` on the real half-line `zeta >= 0`, in real arithmetic.
pub fn phi_real(zeta: f64, p: &FluidParams) -> (f64, f64) {
    let (s1, s2) = (p.mu1.sqrt(), p.mu2.sqrt());
    let w1 = (p.rho1 * zeta + p.mu1).sqrt();
    let w2 = (p.rho2 * zeta + p.mu2).sqrt();
    let e1 = s1 * w1 + p.mu2;
    let e2 = s2 * w2 + p.mu1;
    let c = 4.0 / p.rho_sum();
    let sum = e1 + e2;
    let e = e1 * e2 / sum;
    let de1 = s1 * p.rho1 / (2.0 * w1);
    let de2 = s2 * p.rho2 / (2.0 * w2);
    let de = (de1 * e2 * e2 + de2 * e1 * e1) / (sum * sum);
    let inv_k = zeta + c * e;
    (zeta * inv_k, inv_k + zeta * (1.0 + c * de))
}
