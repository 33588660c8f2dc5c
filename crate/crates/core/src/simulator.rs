//! Mode-by-mode linear evolution of an interface height field.
//!
//! Each Fourier coefficient of `h` is multiplied by `exp(Re lambda t)`
//! where `lambda` is the dominant zero of the symbol at that wavenumber.
//! This keeps only the leading exponential behaviour: the full linearized
//! flow also carries velocity memory which a scalar multiplier in `h`
//! cannot represent.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{self, KAPPA};
use crate::error::{Error, Result};
use crate::grid::{GridField, GridSpec};
use crate::params::FluidParams;
use crate::symbol::Complex64;

/// Modal amplitudes above this bound trip the overflow guard.
pub const AMPLITUDE_LIMIT: f64 = 1e300;

/// Fraction of the strict strip limit used as the search floor.
const FLOOR_FRACTION: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// The mean mode; held constant.
    ZeroMode,
    /// Positive real root inside the unstable band.
    UnstableRoot,
    /// Rightmost zero found in the analyticity strip.
    RightmostRoot,
    /// No zero in the strip; rate pinned to the strip edge.
    Clamped,
}

/// Dominant rate per distinct `|k|` of a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthTable {
    pub spec: GridSpec,
    /// Sorted distinct lattice keys `i^2 + j^2`.
    pub keys: Vec<u64>,
    pub wavenumbers: Vec<f64>,
    /// Full complex root; only the real part drives amplitudes.
    pub rates: Vec<Complex64>,
    pub provenance: Vec<Provenance>,
    /// Winding count of the isolating box (1 for band roots and clamps).
    pub multiplicity: Vec<usize>,
}

impl GrowthTable {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Real rate for lattice key `key`, if the key is in the table.
    pub fn rate_of_key(&self, key: u64) -> Option<f64> {
        self.keys.binary_search(&key).ok().map(|i| self.rates[i].re)
    }

    pub fn rate_at(&self, idx: usize) -> f64 {
        self.rate_of_key(self.spec.shell_key(idx)).unwrap_or(0.0)
    }

    /// Entries per provenance tag, in declaration order.
    pub fn provenance_counts(&self) -> Vec<(Provenance, usize)> {
        [Provenance::ZeroMode, Provenance::UnstableRoot, Provenance::RightmostRoot, Provenance::Clamped]
            .into_iter()
            .map(|tag| (tag, self.provenance.iter().filter(|&&t| t == tag).count()))
            .collect()
    }

    /// Wavenumber with the largest real rate.
    pub fn argmax(&self) -> f64 {
        let mut best = 0;
        for i in 1..self.len() {
            if self.rates[i].re > self.rates[best].re {
                best = i;
            }
        }
        self.wavenumbers[best]
    }
}

fn entry(tau: f64, p: &FluidParams, tau_star: Option<f64>) -> Result<(Complex64, Provenance, usize)> {
    let real = |x: f64| Complex64::new(x, 0.0);
    if tau == 0.0 {
        return Ok((real(0.0), Provenance::ZeroMode, 1));
    }
    if let Some(ts) = tau_star {
        if tau < ts {
            let lam = dispersion::growth_rate(tau, p, dispersion::TIGHT_TOL)?;
            return Ok((real(lam), Provenance::UnstableRoot, 1));
        }
        if tau == ts {
            // s(0, tau*) = 0 exactly; the zero sits on the imaginary axis
            return Ok((real(0.0), Provenance::RightmostRoot, 1));
        }
    }
    let edge = dispersion::branch_edge(tau, p);
    match dispersion::rightmost_root(tau, p, FLOOR_FRACTION * KAPPA * edge)? {
        Some(root) => {
            let lam = Complex64::new(root.lambda.re.min(0.0), root.lambda.im);
            Ok((lam, Provenance::RightmostRoot, root.multiplicity))
        }
        None => Ok((real(KAPPA * edge), Provenance::Clamped, 1)),
    }
}

/// Dominant rate for every distinct wavenumber of `spec`.
pub fn build_growth_table(p: &FluidParams, spec: GridSpec) -> Result<GrowthTable> {
    spec.validate()?;
    let mut keys: Vec<u64> = (0..spec.len()).map(|i| spec.shell_key(i)).collect();
    keys.sort_unstable();
    keys.dedup();
    let tau_star = if p.is_heavy_on_top() { Some(dispersion::cutoff_wavenumber(p)?) } else { None };
    let wavenumbers: Vec<f64> = keys.iter().map(|&k| spec.wavenumber_of_key(k)).collect();
    let entries = wavenumbers
        .par_iter()
        .map(|&tau| entry(tau, p, tau_star))
        .collect::<Result<Vec<_>>>()?;
    let mut rates = Vec::with_capacity(entries.len());
    let mut provenance = Vec::with_capacity(entries.len());
    let mut multiplicity = Vec::with_capacity(entries.len());
    for (r, t, m) in entries {
        rates.push(r);
        provenance.push(t);
        multiplicity.push(m);
    }
    Ok(GrowthTable { spec, keys, wavenumbers, rates, provenance, multiplicity })
}

/// Initial field, evolution schedule and emitted snapshots.
#[derive(Debug, Clone)]
pub struct SimulationRun {
    pub field0: GridField,
    pub times: Vec<f64>,
    pub params: FluidParams,
    pub table: GrowthTable,
    pub snapshots: Vec<GridField>,
}

impl SimulationRun {
    pub fn new(field0: GridField, params: FluidParams, times: Vec<f64>) -> Result<Self> {
        let table = build_growth_table(&params, *field0.spec())?;
        Self::with_table(field0, params, times, table)
    }

    /// Reuse a table already built for the same grid.
    pub fn with_table(field0: GridField, params: FluidParams, times: Vec<f64>, table: GrowthTable) -> Result<Self> {
        if table.spec != *field0.spec() {
            return Err(Error::DegenerateInput("growth table was built on a different grid".into()));
        }
        if let Some(t) = times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
            return Err(Error::DegenerateInput(format!("snapshot times must be finite and >= 0, got {t}")));
        }
        Ok(Self { field0, times, params, table, snapshots: Vec::new() })
    }

    /// Evolve to every scheduled time, stopping at the first overflow.
    pub fn run(&mut self) -> Result<()> {
        let mut snaps = Vec::with_capacity(self.times.len());
        for &t in &self.times {
            snaps.push(evolve(self, t)?);
        }
        self.snapshots = snaps;
        Ok(())
    }

    /// Same table, new initial field.
    pub fn restarted(&self, field0: GridField) -> Result<Self> {
        Self::with_table(field0, self.params, self.times.clone(), self.table.clone())
    }
}

/// `h(t)` from `h_hat(t, k) = exp(Re lambda(|k|) t) h_hat(0, k)`.
pub fn evolve(run: &SimulationRun, t: f64) -> Result<GridField> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::DegenerateInput(format!("evolution time must be finite and >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(run.field0.clone());
    }
    let spec = run.field0.spec();
    let rates: Vec<f64> = (0..spec.len()).map(|i| run.table.rate_at(i)).collect();
    let log_limit = AMPLITUDE_LIMIT.ln();
    let mut blow_up = f64::INFINITY;
    for (c, &r) in run.field0.spectrum().iter().zip(&rates) {
        let a = c.norm();
        if a > 0.0 && r > 0.0 && a.ln() + r * t > log_limit {
            blow_up = blow_up.min((log_limit - a.ln()) / r);
        }
    }
    if blow_up.is_finite() {
        return Err(Error::OverflowGuard { blow_up_time: blow_up });
    }
    run.field0.map_spectrum(|i, c| c * (rates[i] * t).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub time: f64,
    /// `|k|` of the largest coefficient of `h(t)` (mean mode excluded).
    pub peak_wavenumber: f64,
    /// `|k|` maximizing `|h_hat(t)| / |h_hat(0)|`.
    pub ratio_peak_wavenumber: f64,
    pub l2_amplitude: f64,
    pub max_height: f64,
    /// `ln(|h_hat(t)| / |h_hat(0)|)` at the peak coefficient.
    pub efolds: f64,
}

pub fn diagnostics(run: &SimulationRun, t: f64) -> Result<Diagnostics> {
    let field = evolve(run, t)?;
    let spec = field.spec();
    let c0 = run.field0.spectrum();
    let ct = field.spectrum();
    let mut peak: Option<usize> = None;
    let mut ratio_peak: Option<(usize, f64)> = None;
    for i in 0..spec.len() {
        if spec.shell_key(i) == 0 || c0[i].norm() == 0.0 {
            continue;
        }
        if peak.is_none_or(|j| ct[i].norm() > ct[j].norm()) {
            peak = Some(i);
        }
        let g = run.table.rate_at(i);
        if ratio_peak.is_none_or(|(_, best)| g > best) {
            ratio_peak = Some((i, g));
        }
    }
    let efolds = peak.map_or(0.0, |i| (ct[i].norm() / c0[i].norm()).ln());
    Ok(Diagnostics {
        time: t,
        peak_wavenumber: peak.map_or(0.0, |i| spec.wavenumber(i)),
        ratio_peak_wavenumber: ratio_peak.map_or(0.0, |(i, _)| spec.wavenumber(i)),
        l2_amplitude: field.spectral_l2_norm(),
        max_height: field.lp_norm(f64::INFINITY),
        efolds,
    })
}

/// Single Fourier mode `amplitude * exp(i k.x)` at lattice indices `mode`.
pub fn pure_mode(spec: GridSpec, mode: [i64; 2], amplitude: f64) -> Result<GridField> {
    spec.validate()?;
    let n = spec.n as i64;
    let half = n / 2;
    let in_range = |m: i64| m > -((n + 1) / 2) && m <= half && !(n % 2 == 0 && m == half);
    if !in_range(mode[0]) || (spec.dim == 1 && mode[1] != 0) || (spec.dim == 2 && !in_range(mode[1])) {
        return Err(Error::GridTooCoarse(format!("mode {mode:?} is not resolved by n = {}", spec.n)));
    }
    let wrap = |m: i64| m.rem_euclid(n) as usize;
    let idx = if spec.dim == 1 { wrap(mode[0]) } else { wrap(mode[1]) * spec.n + wrap(mode[0]) };
    let mut spectrum = vec![Complex64::new(0.0, 0.0); spec.len()];
    spectrum[idx] = Complex64::new(amplitude * spec.len() as f64, 0.0);
    GridField::from_spectrum(spec, spectrum)
}

/// Real white noise, uniform in `[-amplitude, amplitude)`, seeded.
pub fn white_noise(spec: GridSpec, seed: u64, amplitude: f64) -> Result<GridField> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..spec.len())
        .map(|_| Complex64::new(amplitude * rng.random_range(-1.0..1.0), 0.0))
        .collect();
    GridField::from_values(spec, values)
}
