//! Approximate eigenfunctions built from a zero `(lambda_0, |xi_0|)` of the
//! boundary symbol.
//!
//! `h_eps` is a band-limited wave packet with spectrum `chi_hat((xi - xi_0) / eps)`;
//! applying the Fourier multiplier `s(lambda_0, |xi|)` gives `g_eps`, whose
//! norm relative to `h_eps` vanishes linearly in `eps` exactly when
//! `s(lambda_0, |xi_0|) = 0`. Everything lives on the periodic grid; the box
//! must be large compared with the packet width `1/eps`.

use std::collections::HashMap;

use serde::Serialize;

use crate::dispersion;
use crate::error::{Error, Result};
use crate::grid::{GridField, GridSpec};
use crate::params::FluidParams;
use crate::symbol::{self, Complex64};

/// Minimum number of lattice bins across the window's Fourier radius.
pub const MIN_BINS_PER_RADIUS: f64 = 8.0;

/// Minimum box side in units of `1/eps`.
pub const MIN_BOX_FACTOR: f64 = 20.0;

/// Coefficients below this fraction of the peak count as outside the support.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

/// Smooth bump `exp(-1/(1 - r^2))` on the unit ball, zero outside.
pub fn bump(r: f64) -> f64 {
    if r < 1.0 {
        (-1.0 / (1.0 - r * r)).exp()
    } else {
        0.0
    }
}

/// The window `chi_eps(x) = chi(eps x)` sampled on a grid.
#[derive(Debug, Clone)]
pub struct WindowFunction {
    pub epsilon: f64,
    pub grid: GridField,
    pub fourier_support_radius: f64,
    /// Factor turning `bump(|k| / eps)` into raw DFT coefficients with `chi(0) = 1`.
    pub spectral_scale: f64,
}

pub fn build_window(epsilon: f64, spec: GridSpec) -> Result<WindowFunction> {
    spec.validate()?;
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::DegenerateInput(format!("epsilon must be > 0, got {epsilon}")));
    }
    let required = MIN_BOX_FACTOR / epsilon;
    if spec.side < required {
        return Err(Error::BoxTooSmall { side: spec.side, required });
    }
    let bins = epsilon / spec.dk();
    if bins < MIN_BINS_PER_RADIUS {
        return Err(Error::GridTooCoarse(format!(
            "window radius spans {bins:.2} bins, need {MIN_BINS_PER_RADIUS}"
        )));
    }
    if epsilon >= spec.nyquist() {
        return Err(Error::GridTooCoarse(format!("window radius {epsilon} exceeds the Nyquist wavenumber")));
    }
    let raw: Vec<f64> = (0..spec.len()).map(|i| bump(spec.wavenumber(i) / epsilon)).collect();
    let total: f64 = raw.iter().sum();
    let spectral_scale = spec.len() as f64 / total;
    let spectrum = raw.iter().map(|&b| Complex64::new(b * spectral_scale, 0.0)).collect();
    let grid = GridField::from_spectrum(spec, spectrum)?;
    Ok(WindowFunction { epsilon, grid, fourier_support_radius: epsilon, spectral_scale })
}

/// The wave packet `h_eps` with spectrum `chi_hat_eps(xi - xi_0)`.
///
/// For `xi_0` on the lattice this is exactly `e^{i xi_0 . x} chi_eps(x)`.
pub fn build_heps(xi0: [f64; 2], epsilon: f64, window: &WindowFunction) -> Result<GridField> {
    let spec = *window.grid.spec();
    let xi0 = if spec.dim == 1 { [xi0[0], 0.0] } else { xi0 };
    let norm = xi0[0].hypot(xi0[1]);
    if epsilon > 0.5 * norm {
        return Err(Error::EpsilonTooLarge { epsilon, limit: 0.5 * norm });
    }
    if (epsilon - window.epsilon).abs() > 1e-12 * window.epsilon {
        return Err(Error::DegenerateInput(format!(
            "window built for eps = {}, asked for {epsilon}",
            window.epsilon
        )));
    }
    let reach = xi0[0].abs().max(xi0[1].abs()) + epsilon;
    if reach >= spec.nyquist() {
        return Err(Error::GridTooCoarse(format!("packet reaches {reach}, Nyquist is {}", spec.nyquist())));
    }
    let spectrum = (0..spec.len())
        .map(|i| {
            let k = spec.wavevector(i);
            let r = (k[0] - xi0[0]).hypot(k[1] - xi0[1]) / epsilon;
            Complex64::new(bump(r) * window.spectral_scale, 0.0)
        })
        .collect();
    Ok(GridField::from_spectrum(spec, spectrum)?.with_carrier(xi0))
}

/// Apply a radial Fourier multiplier `m(|xi|)` to the nonzero coefficients.
pub fn apply_radial_multiplier<F>(field: &GridField, m: F) -> Result<GridField>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let spec = *field.spec();
    let mut cache: HashMap<u64, Complex64> = HashMap::new();
    for (i, c) in field.spectrum().iter().enumerate() {
        if c.norm() != 0.0 {
            let key = spec.shell_key(i);
            if let std::collections::hash_map::Entry::Vacant(e) = cache.entry(key) {
                e.insert(m(spec.wavenumber_of_key(key))?);
            }
        }
    }
    field.map_spectrum(|i, c| if c.norm() == 0.0 { c } else { c * cache[&spec.shell_key(i)] })
}

/// `g = F^{-1}[s(lambda_0, |xi|) F h]`.
///
/// Rejected when the spectral support reaches below `|xi_0| / 4` (or touches
/// the zero mode, for fields without a carrier).
pub fn apply_symbol_multiplier(field: &GridField, lambda0: f64, p: &FluidParams) -> Result<GridField> {
    let spec = *field.spec();
    let floor = match field.carrier() {
        Some(xi0) => 0.25 * xi0[0].hypot(xi0[1]),
        None => 0.5 * spec.dk(),
    };
    let lowest = field
        .support(SUPPORT_THRESHOLD)
        .into_iter()
        .map(|i| spec.wavenumber(i))
        .fold(f64::INFINITY, f64::min);
    if lowest < floor {
        return Err(Error::ZeroFrequencyTouched(lowest));
    }
    let lambda0 = Complex64::new(lambda0, 0.0);
    apply_radial_multiplier(field, |tau| symbol::symbol_s(lambda0, tau, p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessSample {
    pub epsilon: f64,
    pub lambda0: f64,
    pub h_norm: f64,
    pub g_norm: f64,
    /// `||g_eps||_p / ||h_eps||_p`.
    pub ratio: f64,
}

/// Residual ratio for an arbitrary `lambda_0` (use [`witness_residual`] for
/// the on-curve value).
pub fn witness_ratio(
    xi0: [f64; 2],
    epsilon: f64,
    lambda0: f64,
    p: &FluidParams,
    norm_p: f64,
    spec: GridSpec,
) -> Result<WitnessSample> {
    if !(norm_p >= 1.0) {
        return Err(Error::DegenerateInput(format!("norm exponent must be >= 1, got {norm_p}")));
    }
    let window = build_window(epsilon, spec)?;
    let h = build_heps(xi0, epsilon, &window)?;
    let g = apply_symbol_multiplier(&h, lambda0, p)?;
    let (h_norm, g_norm) = (h.lp_norm(norm_p), g.lp_norm(norm_p));
    Ok(WitnessSample { epsilon, lambda0, h_norm, g_norm, ratio: g_norm / h_norm })
}

/// `||g_eps||_p / ||h_eps||_p` with `lambda_0 = growth_rate(|xi_0|)`.
pub fn witness_residual(xi0: [f64; 2], epsilon: f64, p: &FluidParams, norm_p: f64, spec: GridSpec) -> Result<f64> {
    let tau0 = if spec.dim == 1 { xi0[0].abs() } else { xi0[0].hypot(xi0[1]) };
    let lambda0 = dispersion::growth_rate(tau0, p, dispersion::TIGHT_TOL)?;
    witness_ratio(xi0, epsilon, lambda0, p, norm_p, spec).map(|s| s.ratio)
}

/// Grid that resolves every `eps >= eps_min` around `xi_0`: the smallest
/// window spans a little over [`MIN_BINS_PER_RADIUS`] bins.
pub fn grid_for(dim: usize, n: usize, eps_min: f64) -> Result<GridSpec> {
    let side = 2.0 * std::f64::consts::PI * (MIN_BINS_PER_RADIUS + 0.5) / eps_min;
    GridSpec::new(dim, n, side.max(MIN_BOX_FACTOR / eps_min))
}

/// Least-squares slope of `log ratio` against `log eps`.
pub fn loglog_slope(samples: &[WitnessSample]) -> f64 {
    let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.epsilon.ln(), s.ratio.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
