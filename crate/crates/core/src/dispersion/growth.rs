use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::FluidParams;
use crate::symbol::{self, Complex64};

/// Iteration budget shared by bracket growth and the root polish.
pub const MAX_ITERATIONS: usize = 200;

/// Inner tolerance used when growth rates feed another search.
pub const TIGHT_TOL: f64 = 1e-14;

/// Points in the coarse scan of [`max_growth`].
pub const COARSE_POINTS: usize = 256;

/// `tau_* = sqrt(gamma_a [[rho]] / sigma)`, the edge of the unstable band.
pub fn cutoff_wavenumber(p: &FluidParams) -> Result<f64> {
    if !p.is_heavy_on_top() {
        return Err(Error::StableConfiguration);
    }
    Ok((p.gamma_a * (p.rho2 - p.rho1) / p.sigma).sqrt())
}

/// Solve `Phi(zeta) = target` for `target > 0` on the monotone branch `zeta > 0`.
///
/// Exponential bracket growth, then Newton steps safeguarded by bisection.
/// Returns `zeta` with `|Phi(zeta) - target| <= tol * target`, or the last
/// iterate once the bracket has collapsed to a few ulps.
pub fn solve_phi(target: f64, p: &FluidParams, tol: f64) -> Result<f64> {
    debug_assert!(target > 0.0);
    let mut iterations = 0;
    let mut lo = 0.0_f64;
    // Phi(z) >= z / k(0) and Phi(z) >= z^2, so this guess bounds the root from above.
    let mut hi = (target * symbol::k_at_zero(p)).min(target.sqrt()).max(f64::MIN_POSITIVE);
    while symbol::phi_real(hi, p).0 < target {
        lo = hi;
        hi *= 2.0;
        iterations += 1;
        if iterations >= MAX_ITERATIONS || !hi.is_finite() {
            return Err(Error::NoConvergence(iterations));
        }
    }

    let mut x = 0.5 * (lo + hi);
    loop {
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            return Err(Error::NoConvergence(iterations));
        }
        let (f, df) = symbol::phi_real(x, p);
        let r = f - target;
        if r.abs() <= tol * target {
            // one more Newton step buys the remaining digits for free
            let xn = x - r / df;
            if xn > lo && xn < hi {
                let rn = symbol::phi_real(xn, p).0 - target;
                if rn.abs() < r.abs() {
                    return Ok(xn);
                }
            }
            return Ok(x);
        }
        if r < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(x);
        }
        let newton = x - r / df;
        x = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
    }
}

/// Growth rate `lambda(tau) > 0` of the unstable mode with wavenumber `tau`.
pub fn growth_rate(tau: f64, p: &FluidParams, tol: f64) -> Result<f64> {
    let tau_star = cutoff_wavenumber(p)?;
    if !(tau > 0.0 && tau < tau_star) {
        return Err(Error::OutOfBand { tau, tau_star });
    }
    if !(tol > 0.0) {
        return Err(Error::DegenerateInput(format!("tolerance must be > 0, got {tol}")));
    }
    let target = -symbol::psi(tau, p)?;
    if !(target > 0.0) {
        // tau within rounding of tau_*
        return Err(Error::OutOfBand { tau, tau_star });
    }
    let zeta = solve_phi(target, p, tol)?;
    Ok(tau * tau * zeta)
}

/// `|s(lambda, tau)| / (tau^2 |psi(tau)| k(0))`: the symbol residual on the
/// natural scale of its two cancelling terms.
pub fn normalized_residual(lambda: f64, tau: f64, p: &FluidParams) -> Result<f64> {
    let s = symbol::symbol_s(Complex64::new(lambda, 0.0), tau, p)?;
    let scale = tau * tau * symbol::psi(tau, p)?.abs() * symbol::k_at_zero(p);
    Ok(s.norm() / scale)
}

/// Sampled growth-rate curve over the unstable band.
#[derive(Debug, Clone, Serialize)]
pub struct DispersionCurve {
    pub taus: Vec<f64>,
    pub lambdas: Vec<f64>,
    /// Normalized symbol residual per point, see [`normalized_residual`].
    pub residuals: Vec<f64>,
    pub tau_star: f64,
    pub tol: f64,
    pub params: FluidParams,
}

/// Chebyshev-Gauss nodes of `(0, tau_star)`, increasing, clustered at both edges.
pub fn band_nodes(tau_star: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let theta = std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
            0.5 * tau_star * (1.0 - theta.cos())
        })
        .collect()
}

pub fn dispersion_curve(p: &FluidParams, n_points: usize, tol: f64) -> Result<DispersionCurve> {
    let tau_star = cutoff_wavenumber(p)?;
    if n_points < 2 {
        return Err(Error::DegenerateInput(format!("n_points must be >= 2, got {n_points}")));
    }
    let taus = band_nodes(tau_star, n_points);
    let solved: Vec<(f64, f64)> = taus
        .par_iter()
        .map(|&tau| {
            let lambda = growth_rate(tau, p, tol)?;
            Ok((lambda, normalized_residual(lambda, tau, p)?))
        })
        .collect::<Result<_>>()?;
    let (lambdas, residuals) = solved.into_iter().unzip();
    Ok(DispersionCurve { taus, lambdas, residuals, tau_star, tol, params: *p })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthSummary {
    pub tau_max: f64,
    pub lambda_inf: f64,
    pub bracket_width: f64,
}

/// Location and value of the maximal growth rate over the unstable band.
///
/// A uniform coarse scan picks the best cell, then golden-section search
/// shrinks the bracket around it to `tol * tau_star`.
pub fn max_growth(p: &FluidParams, tol: f64) -> Result<GrowthSummary> {
    let tau_star = cutoff_wavenumber(p)?;
    if !(tol > 0.0) {
        return Err(Error::DegenerateInput(format!("tolerance must be > 0, got {tol}")));
    }
    let rate = |t: f64| growth_rate(t, p, TIGHT_TOL);
    let h = tau_star / (COARSE_POINTS + 1) as f64;
    let coarse: Vec<f64> = (1..=COARSE_POINTS)
        .into_par_iter()
        .map(|i| rate(i as f64 * h))
        .collect::<Result<_>>()?;
    let (imax, &cmax) = coarse
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("coarse grid is non-empty");
    let mut best = ((imax + 1) as f64 * h, cmax);

    let mut a = imax as f64 * h;
    let mut b = (imax + 2) as f64 * h;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let eval = |t: f64| if t > 0.0 && t < tau_star { rate(t) } else { Ok(0.0) };
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    let mut iterations = 0;
    while b - a > tol * tau_star {
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            return Err(Error::NoConvergence(iterations));
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(x2)?;
        }
    }
    for (t, f) in [(x1, f1), (x2, f2)] {
        if f > best.1 {
            best = (t, f);
        }
    }
    Ok(GrowthSummary { tau_max: best.0, lambda_inf: best.1, bracket_width: b - a })
}

/// `(c_small, c_star)` with `lambda ~ c_small sqrt(tau)` as `tau -> 0` and
/// `lambda ~ c_star (tau_* - tau)` as `tau -> tau_*`.
pub fn asymptotic_constants(p: &FluidParams) -> Result<(f64, f64)> {
    if !p.is_heavy_on_top() {
        return Err(Error::StableConfiguration);
    }
    let c_small = (p.jump() * p.gamma_a / p.rho_sum()).sqrt();
    let c_star = p.sigma / (p.mu1 + p.mu2);
    Ok((c_small, c_star))
}
