//! Per-Fourier-mode two-phase Stokes transmission problem.
//!
//! For one tangential wavenumber `tau` the fields are `(v, w, pi)(y) e^{i tau x}`
//! where `v` is the velocity component along the wavevector; transverse
//! components decouple and are dropped. In each phase
//!
//! ```text
//! rho lambda v - mu (v'' - tau^2 v) + i tau pi = 0
//! rho lambda w - mu (w'' - tau^2 w) + pi'      = 0
//! i tau v + w'                                  = 0
//! ```
//!
//! so `pi` is harmonic and the decaying solutions are spanned by
//! `e^{tau y}, e^{m_1 y}` below the interface and `e^{-tau y}, e^{-m_2 y}`
//! above, with `m_j = omega_j / sqrt(mu_j)`. When `rho_j lambda` is small
//! against `mu_j tau^2` the two exponentials nearly coincide, so `w` is
//! expanded in `e^{tau y}` and the divided difference
//! `(e^{m_1 y} - e^{tau y}) / (m_1 - tau)` instead (mirrored above). The
//! unknowns are those two `w` amplitudes per phase and the pressure
//! amplitudes `P_j`; `v = i w' / tau` follows from incompressibility.

use nalgebra::{SMatrix, SVector};
use serde::Serialize;

use crate::dispersion::{self, KAPPA};
use crate::error::{Error, Result};
use crate::params::{FluidParams, Phase};
use crate::symbol::{sqrt_principal, Complex64};

/// Condition-number ceiling of the equilibrated 6x6 system.
pub const CONDITION_LIMIT: f64 = 1e12;

const I: Complex64 = Complex64::new(0.0, 1.0);

type Mat6 = SMatrix<Complex64, 6, 6>;
type Vec6 = SVector<Complex64, 6>;
type Mat7 = SMatrix<Complex64, 7, 7>;

/// Decaying solution of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeProfile {
    pub tau: f64,
    pub lambda: Complex64,
    /// `w` amplitudes of `e^{tau y}` and `(e^{m_1 y} - e^{tau y}) / (m_1 - tau)`
    /// for `y < 0`.
    pub coeffs_lower: [Complex64; 2],
    /// `w` amplitudes of `e^{-tau y}` and `(e^{-m_2 y} - e^{-tau y}) / (m_2 - tau)`
    /// for `y > 0`.
    pub coeffs_upper: [Complex64; 2],
    /// Pressure amplitudes `P_1` (of `e^{tau y}`) and `P_2` (of `e^{-tau y}`).
    pub pressure_coeffs: [Complex64; 2],
    pub h_amp: Complex64,
}

/// Field values of a mode at one height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeValues {
    pub v: Complex64,
    pub w: Complex64,
    pub pi: Complex64,
}

/// Viscous decay exponent `m_j = omega_j / sqrt(mu_j)`.
pub fn viscous_exponent(phase: Phase, lambda: Complex64, tau: f64, p: &FluidParams) -> Complex64 {
    sqrt_principal(lambda * p.rho(phase) + p.mu(phase) * tau * tau) / p.mu(phase).sqrt()
}

/// `m_j - tau`, written as `rho_j lambda / (mu_j (m_j + tau))` to avoid cancellation.
pub fn exponent_gap(phase: Phase, lambda: Complex64, tau: f64, p: &FluidParams) -> Complex64 {
    let m = viscous_exponent(phase, lambda, tau, p);
    lambda * p.rho(phase) / ((m + tau) * p.mu(phase))
}

/// `(e^z - 1) / z`, entire, with the series near the origin.
fn expm1_ratio(z: Complex64) -> Complex64 {
    if z.norm() >= 0.5 {
        return (z.exp() - 1.0) / z;
    }
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 2..40 {
        term = term * z / k as f64;
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

impl ModeProfile {
    /// Fields of the given phase's solution at `y`. The expressions are
    /// entire in `y`, so either phase can be evaluated across the interface.
    pub fn eval_phase(&self, phase: Phase, y: f64, p: &FluidParams) -> ModeValues {
        let tau = self.tau;
        let delta = exponent_gap(phase, self.lambda, tau, p);
        // s = +1 below, -1 above: the basis is e^{s tau y} and its divided difference
        let (s, [a, b], pc) = match phase {
            Phase::Lower => (1.0, self.coeffs_lower, self.pressure_coeffs[0]),
            Phase::Upper => (-1.0, self.coeffs_upper, self.pressure_coeffs[1]),
        };
        let ep = Complex64::new(s * tau * y, 0.0).exp();
        let dz = delta * (s * y);
        let dd = ep * expm1_ratio(dz) * (s * y);
        let em = ep * dz.exp();
        let w = a * ep + b * dd;
        let dw = (a * ep * tau + b * (em + dd * tau)) * s;
        ModeValues { w, v: I * dw / tau, pi: pc * ep }
    }

    /// Fields at `y`, taking the lower phase for `y < 0` and the upper otherwise.
    pub fn eval(&self, y: f64, p: &FluidParams) -> ModeValues {
        let phase = if y < 0.0 { Phase::Lower } else { Phase::Upper };
        self.eval_phase(phase, y, p)
    }

    /// Amplitudes of the plain exponentials `(e^{tau y}, e^{m_1 y})` below and
    /// `(e^{-tau y}, e^{-m_2 y})` above. They grow like `1 / (m_j - tau)`
    /// when the pair nearly coincides.
    pub fn exponential_coeffs(&self, p: &FluidParams) -> [[Complex64; 2]; 2] {
        let split = |phase: Phase, [a, b]: [Complex64; 2]| {
            let d = exponent_gap(phase, self.lambda, self.tau, p);
            [a - b / d, b / d]
        };
        [split(Phase::Lower, self.coeffs_lower), split(Phase::Upper, self.coeffs_upper)]
    }

    /// `-2 [[mu w'(0)]] + [[pi(0)]] - (-sigma tau^2 + [[rho]] gamma_a) h`,
    /// evaluated with exact derivatives.
    pub fn normal_stress_defect(&self, p: &FluidParams) -> Complex64 {
        let tau = self.tau;
        let [a1, b1] = self.coeffs_lower;
        let [a2, b2] = self.coeffs_upper;
        let dw1 = a1 * tau + b1;
        let dw2 = -(a2 * tau) - b2;
        let jump_mu_dw = dw2 * p.mu2 - dw1 * p.mu1;
        let jump_pi = self.pressure_coeffs[1] - self.pressure_coeffs[0];
        -(jump_mu_dw * 2.0) + jump_pi - self.h_amp * interface_forcing(tau, p)
    }
}

/// `-sigma tau^2 + [[rho]] gamma_a`, the Fourier symbol of `sigma Laplacian + [[rho]] gamma_a`.
pub fn interface_forcing(tau: f64, p: &FluidParams) -> f64 {
    -p.sigma * tau * tau + p.jump() * p.gamma_a
}

/// The 6x6 linear system for `(a_1, b_1, P_1, a_2, b_2, P_2)` in the
/// divided-difference basis.
///
/// Row order: `[[w]] = 0`, `[[v]] = 0` (divided by `-i`), tangential stress
/// (divided by `-i`), normal stress, then the two pressure closures
/// `rho_1 lambda a_1 - mu_1 (m_1 + tau) b_1 + tau P_1 = 0` and its mirror.
/// The unit factors make every entry real for real `lambda`, and no entry
/// involves `1 / (m_j - tau)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionSystem {
    pub matrix: [[Complex64; 6]; 6],
    pub rhs: [Complex64; 6],
}

fn rows(lambda: Complex64, tau: f64, p: &FluidParams) -> [[Complex64; 6]; 6] {
    let c = |x: f64| Complex64::new(x, 0.0);
    let z = c(0.0);
    let s1 = viscous_exponent(Phase::Lower, lambda, tau, p) + tau;
    let s2 = viscous_exponent(Phase::Upper, lambda, tau, p) + tau;
    let (mu1, mu2) = (p.mu1, p.mu2);
    [
        [c(-1.0), z, z, c(1.0), z, z],
        [c(1.0), c(1.0 / tau), z, c(1.0), c(1.0 / tau), z],
        [c(-2.0 * mu1 * tau), -s1 * (mu1 / tau), z, c(2.0 * mu2 * tau), s2 * (mu2 / tau), z],
        [c(2.0 * mu1 * tau), c(2.0 * mu1), c(-1.0), c(2.0 * mu2 * tau), c(2.0 * mu2), c(1.0)],
        [lambda * p.rho1, -s1 * mu1, c(tau), z, z, z],
        [z, z, z, lambda * p.rho2, -s2 * mu2, c(-tau)],
    ]
}

pub fn transmission_system(lambda: Complex64, tau: f64, h_amp: Complex64, p: &FluidParams) -> TransmissionSystem {
    let z = Complex64::new(0.0, 0.0);
    let mut rhs = [z; 6];
    rhs[3] = h_amp * interface_forcing(tau, p);
    TransmissionSystem { matrix: rows(lambda, tau, p), rhs }
}

fn check_mode_input(lambda: Complex64, tau: f64, p: &FluidParams) -> Result<()> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::DegenerateInput(format!("mode solve needs tau > 0, got {tau}")));
    }
    if lambda.re == 0.0 && lambda.im == 0.0 {
        return Err(Error::DegenerateInput("lambda = 0 makes the mode basis confluent".into()));
    }
    let edge = dispersion::branch_edge(tau, p);
    if !(lambda.re > edge) {
        return Err(Error::DegenerateInput(format!("Re lambda = {} is left of the branch edge {edge}", lambda.re)));
    }
    Ok(())
}

fn one_norm<const N: usize>(m: &SMatrix<Complex64, N, N>) -> f64 {
    m.column_iter().map(|col| col.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Solve for the decaying mode driven by an interface displacement `h_amp`.
pub fn solve_mode(lambda: Complex64, tau: f64, h_amp: Complex64, p: &FluidParams) -> Result<ModeProfile> {
    check_mode_input(lambda, tau, p)?;
    let sys = transmission_system(lambda, tau, h_amp, p);
    let mut a = Mat6::from_fn(|i, j| sys.matrix[i][j]);
    let mut b = Vec6::from_fn(|i, _| sys.rhs[i]);

    // row then column equilibration
    for i in 0..6 {
        let s = a.row(i).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if s == 0.0 {
            return Err(Error::SingularSystem(f64::INFINITY));
        }
        a.row_mut(i).scale_mut(1.0 / s);
        b[i] /= s;
    }
    let mut col_scale = [1.0; 6];
    for (j, cs) in col_scale.iter_mut().enumerate() {
        let s = a.column(j).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if s == 0.0 {
            return Err(Error::SingularSystem(f64::INFINITY));
        }
        *cs = 1.0 / s;
        a.column_mut(j).scale_mut(*cs);
    }

    let lu = a.lu();
    let inv = lu.try_inverse().ok_or(Error::SingularSystem(f64::INFINITY))?;
    let cond = one_norm(&a) * one_norm(&inv);
    if !(cond <= CONDITION_LIMIT) {
        return Err(Error::SingularSystem(cond));
    }
    let y = lu.solve(&b).ok_or(Error::SingularSystem(cond))?;
    let x: Vec<Complex64> = (0..6).map(|j| y[j] * col_scale[j]).collect();
    Ok(ModeProfile {
        tau,
        lambda,
        coeffs_lower: [x[0], x[1]],
        coeffs_upper: [x[3], x[4]],
        pressure_coeffs: [x[2], x[5]],
        h_amp,
    })
}

/// Determinant of the homogeneous 7x7 system obtained by adding the interface
/// amplitude as an unknown and the kinematic row `lambda h = w(0)`.
///
/// It equals the plain-exponential determinant divided by
/// `(m_1 - tau)(m_2 - tau)`, which changes neither zeros nor sign for real
/// `lambda` in the strip.
///
/// Vanishes (for `lambda != 0`) exactly where the mode problem admits a
/// nontrivial free solution; real for real `lambda` in the analytic strip.
pub fn free_mode_determinant(lambda: Complex64, tau: f64, p: &FluidParams) -> Complex64 {
    let base = rows(lambda, tau, p);
    let z = Complex64::new(0.0, 0.0);
    let forcing = Complex64::new(-interface_forcing(tau, p), 0.0);
    let m = Mat7::from_fn(|i, j| match (i, j) {
        (6, 0) => Complex64::new(1.0, 0.0),
        (6, 6) => -lambda,
        (6, _) => z,
        (3, 6) => forcing,
        (_, 6) => z,
        _ => base[i][j],
    });
    m.determinant()
}

/// Growth rate located as the sign change of the real 7x7 determinant,
/// bracketed by `growth_rate(tau) * [0.5, 1.5]` and refined by bisection
/// to relative width `tol`.
pub fn dispersion_from_profile(tau: f64, p: &FluidParams, tol: f64) -> Result<f64> {
    let guess = dispersion::growth_rate(tau, p, dispersion::TIGHT_TOL)?;
    if !(tol > 0.0) {
        return Err(Error::DegenerateInput(format!("tolerance must be > 0, got {tol}")));
    }
    let det = |l: f64| free_mode_determinant(Complex64::new(l, 0.0), tau, p).re;
    let (mut lo, mut hi) = (0.5 * guess, 1.5 * guess);
    let (flo, fhi) = (det(lo), det(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoConvergence(0));
    }
    let lo_sign = flo.signum();
    for it in 0..dispersion::MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol * mid {
            return Ok(mid);
        }
        let fm = det(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
        if it + 1 == dispersion::MAX_ITERATIONS {
            break;
        }
    }
    Err(Error::NoConvergence(dispersion::MAX_ITERATIONS))
}

/// Finite-difference step and Richardson-extrapolated derivatives.
struct Fd {
    h: f64,
}

impl Fd {
    fn d1<F: Fn(f64) -> Complex64>(&self, f: &F, y: f64) -> Complex64 {
        let c = |h: f64| (f(y + h) - f(y - h)) / (2.0 * h);
        let (a, b, c2) = (c(self.h), c(0.5 * self.h), c(0.25 * self.h));
        richardson(a, b, c2)
    }

    fn d2<F: Fn(f64) -> Complex64>(&self, f: &F, y: f64) -> Complex64 {
        let f0 = f(y);
        let c = |h: f64| (f(y + h) - f0 * 2.0 + f(y - h)) / (h * h);
        let (a, b, c2) = (c(self.h), c(0.5 * self.h), c(0.25 * self.h));
        richardson(a, b, c2)
    }
}

/// Two Richardson levels for even-order central differences at `h, h/2, h/4`.
fn richardson(dh: Complex64, dh2: Complex64, dh4: Complex64) -> Complex64 {
    let r1 = (dh2 * 4.0 - dh) / 3.0;
    let r2 = (dh4 * 4.0 - dh2) / 3.0;
    (r2 * 16.0 - r1) / 15.0
}

fn ratio(residual: Complex64, terms: &[Complex64]) -> f64 {
    let scale: f64 = terms.iter().map(|z| z.norm()).sum();
    if scale == 0.0 {
        0.0
    } else {
        residual.norm() / scale
    }
}

/// Sample heights for one phase: `n` points spread over three decay lengths.
fn sample_heights(profile: &ModeProfile, phase: Phase, n: usize, p: &FluidParams) -> Vec<f64> {
    let m = viscous_exponent(phase, profile.lambda, profile.tau, p);
    let slowest = profile.tau.min(m.re);
    let depth = 3.0 / slowest;
    let sign = if phase == Phase::Lower { -1.0 } else { 1.0 };
    (1..=n).map(|k| sign * depth * k as f64 / n as f64).collect()
}

/// Maximum relative residual of the mode equations and interface conditions,
/// checked with finite differences of the sampled fields.
///
/// Each residual is divided by the sum of magnitudes of its terms. The
/// difference step is `0.02` of the shortest decay length, with two levels of
/// Richardson extrapolation; a fixed tiny step would drown in cancellation.
pub fn residual_check(profile: &ModeProfile, p: &FluidParams, n_samples: usize) -> f64 {
    let tau = profile.tau;
    let lambda = profile.lambda;
    let m1 = viscous_exponent(Phase::Lower, lambda, tau, p);
    let m2 = viscous_exponent(Phase::Upper, lambda, tau, p);
    let fastest = tau.max(m1.norm()).max(m2.norm());
    let fd = Fd { h: 0.02 / fastest };
    let itau = I * tau;
    let mut worst: f64 = 0.0;

    for phase in [Phase::Lower, Phase::Upper] {
        let (rho, mu) = (p.rho(phase), p.mu(phase));
        let v = |y: f64| profile.eval_phase(phase, y, p).v;
        let w = |y: f64| profile.eval_phase(phase, y, p).w;
        let pi = |y: f64| profile.eval_phase(phase, y, p).pi;
        for y in sample_heights(profile, phase, n_samples, p) {
            let f = profile.eval_phase(phase, y, p);
            let (v2, w2) = (fd.d2(&v, y), fd.d2(&w, y));
            let (w1, pi1) = (fd.d1(&w, y), fd.d1(&pi, y));
            let mom_v = [lambda * rho * f.v, -(v2 * mu), f.v * (mu * tau * tau), itau * f.pi];
            let mom_w = [lambda * rho * f.w, -(w2 * mu), f.w * (mu * tau * tau), pi1];
            let div = [itau * f.v, w1];
            for terms in [&mom_v[..], &mom_w[..], &div[..]] {
                worst = worst.max(ratio(terms.iter().sum(), terms));
            }
        }
    }

    // interface conditions at y = 0, each phase differentiated on its own side
    let lower = |y: f64| profile.eval_phase(Phase::Lower, y, p);
    let upper = |y: f64| profile.eval_phase(Phase::Upper, y, p);
    let (f1, f2) = (lower(0.0), upper(0.0));
    let dv1 = fd.d1(&|y| lower(y).v, 0.0);
    let dv2 = fd.d1(&|y| upper(y).v, 0.0);
    let dw1 = fd.d1(&|y| lower(y).w, 0.0);
    let dw2 = fd.d1(&|y| upper(y).w, 0.0);
    let conditions: [Vec<Complex64>; 4] = [
        vec![f2.v, -f1.v],
        vec![f2.w, -f1.w],
        vec![-(dv2 * p.mu2), -(itau * f2.w * p.mu2), dv1 * p.mu1, itau * f1.w * p.mu1],
        vec![
            -(dw2 * (2.0 * p.mu2)),
            dw1 * (2.0 * p.mu1),
            f2.pi,
            -f1.pi,
            -(profile.h_amp * interface_forcing(tau, p)),
        ],
    ];
    for terms in &conditions {
        worst = worst.max(ratio(terms.iter().sum(), terms));
    }
    worst
}

/// Mode-wise pressure `pi_1 + pi_2` of the transmission problem for the
/// pressure.
///
/// `f_hat` is the amplitude of the forcing along the wavevector, so the
/// Riesz-projected part is `pi_1 = -i f_hat / tau` (its gradient `i tau pi_1`
/// returns `f_hat`). The harmonic part
/// `pi_2 = sign(y) e^{-tau |y|} g0_hat / (rho_1 + rho_2)` carries the jump
/// `[[rho pi_2]] = g0_hat` with continuous normal derivative; `sign(0) = 0`.
pub fn pressure_split(f_hat: Complex64, g0_hat: Complex64, tau: f64, y: f64, p: &FluidParams) -> Result<Complex64> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::DegenerateInput(format!("pressure split needs tau > 0, got {tau}")));
    }
    let riesz = -I * f_hat / tau;
    let sign = if y > 0.0 {
        1.0
    } else if y < 0.0 {
        -1.0
    } else {
        0.0
    };
    let harmonic = g0_hat * (sign * (-tau * y.abs()).exp() / p.rho_sum());
    Ok(riesz + harmonic)
}

/// Largest left shift of `lambda` that keeps the mode basis analytic.
pub fn analytic_floor(tau: f64, p: &FluidParams) -> f64 {
    KAPPA * dispersion::branch_edge(tau, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit() -> FluidParams {
        FluidParams::new(1.0, 3.0, 1.0, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn zero_forcing_gives_zero_profile() {
        let prof = solve_mode(c(2.0, 0.0), 1.0, c(0.0, 0.0), &unit()).unwrap();
        for z in prof.coeffs_lower.iter().chain(&prof.coeffs_upper).chain(&prof.pressure_coeffs) {
            assert_eq!(z.norm(), 0.0);
        }
        assert_eq!(residual_check(&prof, &unit(), 20), 0.0);
    }

    #[test]
    fn solve_is_linear_in_forcing() {
        let p = unit();
        let a = solve_mode(c(1.5, 0.3), 0.8, c(1.0, -0.5), &p).unwrap();
        let b = solve_mode(c(1.5, 0.3), 0.8, c(2.0, -1.0), &p).unwrap();
        let pairs = a.coeffs_lower.iter().chain(&a.coeffs_upper).chain(&a.pressure_coeffs).zip(
            b.coeffs_lower.iter().chain(&b.coeffs_upper).chain(&b.pressure_coeffs),
        );
        for (x, y) in pairs {
            assert!((*x * 2.0 - *y).norm() <= 1e-13 * y.norm().max(1e-300));
        }
    }

    #[test]
    fn profile_passes_fd_residual() {
        let p = unit();
        let prof = solve_mode(c(50.0, 0.0), 1.0, c(1.0, 0.0), &p).unwrap();
        let r = residual_check(&prof, &p, 20);
        assert!(r <= 1e-8, "{r}");
        let prof = solve_mode(c(0.3, -0.7), 0.4, c(1.0, 0.2), &p).unwrap();
        assert!(residual_check(&prof, &p, 20) <= 1e-8);
    }

    #[test]
    fn perturbed_profile_fails_residual() {
        let p = unit();
        let prof = solve_mode(c(2.0, 0.0), 1.0, c(1.0, 0.0), &p).unwrap();
        for k in 0..6 {
            let mut bad = prof;
            let slot = match k {
                0 => &mut bad.coeffs_lower[0],
                1 => &mut bad.coeffs_lower[1],
                2 => &mut bad.coeffs_upper[0],
                3 => &mut bad.coeffs_upper[1],
                4 => &mut bad.pressure_coeffs[0],
                _ => &mut bad.pressure_coeffs[1],
            };
            *slot *= 1.0 + 1e-3;
            assert!(residual_check(&bad, &p, 20) >= 1e-5, "coefficient {k}");
        }
    }

    #[test]
    fn normal_stress_balance_holds() {
        let p = FluidParams::new(0.9, 1.7, 0.3, 2.2, 0.6, 4.0).unwrap();
        let prof = solve_mode(c(0.8, 0.1), 1.3, c(0.4, 0.9), &p).unwrap();
        let scale = (prof.h_amp * interface_forcing(1.3, &p)).norm();
        assert!(prof.normal_stress_defect(&p).norm() <= 1e-10 * scale);
    }

    #[test]
    fn determinant_root_matches_growth_rate() {
        let p = unit();
        for tau in [0.2, 0.7, 1.2] {
            let g = dispersion::growth_rate(tau, &p, 1e-14).unwrap();
            let d = dispersion_from_profile(tau, &p, 1e-13).unwrap();
            assert!((d - g).abs() <= 1e-8 * g, "tau {tau}: {d} vs {g}");
        }
    }

    #[test]
    fn determinant_is_real_on_real_axis() {
        let p = unit();
        for l in [0.05, 0.4, 3.0] {
            let d = free_mode_determinant(c(l, 0.0), 0.9, &p);
            assert_eq!(d.im, 0.0);
        }
    }

    #[test]
    fn determinant_root_vanishes_at_cutoff() {
        let p = unit();
        let ts = dispersion::cutoff_wavenumber(&p).unwrap();
        let d = dispersion_from_profile((1.0 - 1e-6) * ts, &p, 1e-12).unwrap();
        assert!(d < 1e-6);
    }

    #[test]
    fn stable_determinant_keeps_sign() {
        let p = FluidParams::new(3.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(dispersion_from_profile(0.5, &p, 1e-12), Err(Error::StableConfiguration));
        for tau in [0.3, 1.0, 2.5] {
            let signs: Vec<f64> = (1..200)
                .map(|i| free_mode_determinant(c(0.01 * i as f64, 0.0), tau, &p).re.signum())
                .collect();
            assert!(signs.iter().all(|&s| s == signs[0]), "tau {tau}");
        }
    }

    #[test]
    fn pressure_split_examples() {
        let p = unit();
        let up = pressure_split(c(0.0, 0.0), c(1.0, 0.0), 1.0, 1e-300, &p).unwrap();
        let down = pressure_split(c(0.0, 0.0), c(1.0, 0.0), 1.0, -1e-300, &p).unwrap();
        let jump = up * p.rho2 - down * p.rho1;
        assert!((jump - c(1.0, 0.0)).norm() < 1e-15);
        let v = pressure_split(c(0.0, 0.0), c(1.0, 0.0), 1.0, 1.0, &p).unwrap();
        assert!((v.re - (-1f64).exp() / 4.0).abs() < 1e-16);
        let far = pressure_split(c(0.0, 0.0), c(1.0, 0.0), 2.0, 10.0, &p).unwrap();
        assert!((far.re - (-20f64).exp() / 4.0).abs() < 1e-20);
        // gradient of the Riesz part returns the forcing
        let pi1 = pressure_split(c(0.3, -0.2), c(0.0, 0.0), 1.7, 0.5, &p).unwrap();
        assert!((I * 1.7 * pi1 - c(0.3, -0.2)).norm() < 1e-15);
        assert!(pressure_split(c(0.0, 0.0), c(1.0, 0.0), 0.0, 1.0, &p).is_err());
    }

    #[test]
    fn near_confluent_mode_stays_accurate() {
        // m_j - tau ~ 1e-3 tau: the plain exponentials nearly coincide
        let p = FluidParams::new(0.39, 1.46, 1.26, 3.76, 0.83, 1.46).unwrap();
        for lam in [2e-3, 1e-5] {
            let prof = solve_mode(c(lam, 0.0), 1.358, c(1.0, 0.0), &p).unwrap();
            let r = residual_check(&prof, &p, 20);
            assert!(r <= 1e-9, "lambda {lam}: residual {r}");
        }
    }

    #[test]
    fn exponential_coeffs_reproduce_fields() {
        let p = unit();
        let prof = solve_mode(c(0.7, 0.2), 0.9, c(1.0, 0.0), &p).unwrap();
        let [[a1, b1], [a2, b2]] = prof.exponential_coeffs(&p);
        let m1 = viscous_exponent(Phase::Lower, prof.lambda, 0.9, &p);
        let m2 = viscous_exponent(Phase::Upper, prof.lambda, 0.9, &p);
        for y in [-2.0f64, -0.3] {
            let w = a1 * (0.9 * y).exp() + b1 * (m1 * y).exp();
            assert!((w - prof.eval(y, &p).w).norm() < 1e-13);
        }
        for y in [0.0f64, 0.4, 2.5] {
            let w = a2 * (-0.9 * y).exp() + b2 * (-m2 * y).exp();
            assert!((w - prof.eval(y, &p).w).norm() < 1e-13);
        }
    }

    #[test]
    fn rejects_inputs_on_the_cut() {
        let p = unit();
        assert!(solve_mode(c(0.0, 0.0), 1.0, c(1.0, 0.0), &p).is_err());
        assert!(solve_mode(c(-5.0, 0.0), 1.0, c(1.0, 0.0), &p).is_err());
        assert!(solve_mode(c(1.0, 0.0), 0.0, c(1.0, 0.0), &p).is_err());
    }
}
