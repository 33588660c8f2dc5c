//! Periodic sampled fields on `[−L/2, L/2)^d`, `d ∈ {1, 2}`.
//!
//! Samples and discrete Fourier coefficients are kept side by side. Index
//! `m` along an axis sits at `x = signed(m) * L / n` and carries wavenumber
//! `signed(m) * 2 pi / L`, where `signed` maps `0..n` to `-n/2..n/2` in FFT
//! order. Two-dimensional data is row-major with `x` as the fast axis.

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbol::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub n: usize,
    /// Box side `L`.
    pub side: f64,
}

impl GridSpec {
    pub fn new(dim: usize, n: usize, side: f64) -> Result<Self> {
        let spec = Self { dim, n, side };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dim == 1 || self.dim == 2) {
            return Err(Error::DegenerateInput(format!("grid dimension must be 1 or 2, got {}", self.dim)));
        }
        if self.n < 2 {
            return Err(Error::DegenerateInput(format!("grid needs n >= 2, got {}", self.n)));
        }
        if !(self.side > 0.0 && self.side.is_finite()) {
            return Err(Error::DegenerateInput(format!("grid side must be > 0, got {}", self.side)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.side / self.n as f64
    }

    pub fn dk(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.side
    }

    /// Largest wavenumber magnitude per axis.
    pub fn nyquist(&self) -> f64 {
        (self.n / 2) as f64 * self.dk()
    }

    pub fn signed(&self, m: usize) -> i64 {
        let n = self.n as i64;
        let m = m as i64;
        if m < (n + 1) / 2 {
            m
        } else {
            m - n
        }
    }

    /// Signed lattice indices of a flat index (`iy = 0` in one dimension).
    pub fn lattice(&self, idx: usize) -> (i64, i64) {
        if self.dim == 1 {
            (self.signed(idx), 0)
        } else {
            (self.signed(idx % self.n), self.signed(idx / self.n))
        }
    }

    pub fn wavevector(&self, idx: usize) -> [f64; 2] {
        let (i, j) = self.lattice(idx);
        let dk = self.dk();
        [i as f64 * dk, j as f64 * dk]
    }

    pub fn position(&self, idx: usize) -> [f64; 2] {
        let (i, j) = self.lattice(idx);
        let dx = self.dx();
        [i as f64 * dx, j as f64 * dx]
    }

    /// `i^2 + j^2` of the lattice indices; equal keys share `|k|` exactly.
    pub fn shell_key(&self, idx: usize) -> u64 {
        let (i, j) = self.lattice(idx);
        (i * i + j * j) as u64
    }

    pub fn wavenumber_of_key(&self, key: u64) -> f64 {
        self.dk() * (key as f64).sqrt()
    }

    pub fn wavenumber(&self, idx: usize) -> f64 {
        self.wavenumber_of_key(self.shell_key(idx))
    }
}

/// Uniformly sampled periodic complex field with its spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    spec: GridSpec,
    values: Vec<Complex64>,
    spectrum: Vec<Complex64>,
    /// Carrier wavevector of a modulated field, when known.
    carrier: Option<[f64; 2]>,
}

impl GridField {
    pub fn zeros(spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        let z = vec![Complex64::new(0.0, 0.0); spec.len()];
        Ok(Self { spec, values: z.clone(), spectrum: z, carrier: None })
    }

    pub fn from_values(spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        spec.validate()?;
        check_len(&spec, values.len())?;
        let mut spectrum = values.clone();
        transform(&spec, &mut spectrum, false);
        Ok(Self { spec, values, spectrum, carrier: None })
    }

    /// Build from raw (unnormalized forward DFT) coefficients.
    pub fn from_spectrum(spec: GridSpec, spectrum: Vec<Complex64>) -> Result<Self> {
        spec.validate()?;
        check_len(&spec, spectrum.len())?;
        let mut values = spectrum.clone();
        transform(&spec, &mut values, true);
        Ok(Self { spec, values, spectrum, carrier: None })
    }

    pub fn with_carrier(mut self, carrier: [f64; 2]) -> Self {
        self.carrier = Some(carrier);
        self
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    pub fn carrier(&self) -> Option<[f64; 2]> {
        self.carrier
    }

    /// Multiply every coefficient by `f(index, coefficient)`.
    pub fn map_spectrum<F>(&self, f: F) -> Result<GridField>
    where
        F: Fn(usize, Complex64) -> Complex64,
    {
        let spectrum = self.spectrum.iter().enumerate().map(|(i, &c)| f(i, c)).collect();
        let mut out = GridField::from_spectrum(self.spec, spectrum)?;
        out.carrier = self.carrier;
        Ok(out)
    }

    pub fn scaled(&self, a: Complex64) -> GridField {
        GridField {
            spec: self.spec,
            values: self.values.iter().map(|v| v * a).collect(),
            spectrum: self.spectrum.iter().map(|v| v * a).collect(),
            carrier: self.carrier,
        }
    }

    /// Discrete `L_p` norm `(sum |v|^p dx^d)^{1/p}`; `p = inf` gives the max.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        }
        let cell = self.spec.dx().powi(self.spec.dim as i32);
        let max = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return 0.0;
        }
        // scale by the max to keep |v|^p representable
        let sum: f64 = self.values.iter().map(|v| (v.norm() / max).powf(p)).sum();
        max * (sum * cell).powf(1.0 / p)
    }

    /// `L_2` norm computed from the coefficients (Parseval).
    pub fn spectral_l2_norm(&self) -> f64 {
        let cell = self.spec.dx().powi(self.spec.dim as i32);
        let sum: f64 = self.spectrum.iter().map(|c| c.norm_sqr()).sum();
        (sum * cell / self.spec.len() as f64).sqrt()
    }

    /// Indices whose coefficient exceeds `rel * max |coefficient|`.
    pub fn support(&self, rel: f64) -> Vec<usize> {
        let max = self.spectrum.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return Vec::new();
        }
        (0..self.spectrum.len()).filter(|&i| self.spectrum[i].norm() > rel * max).collect()
    }

    /// Largest distance from `center` of a coefficient above `rel * max`.
    pub fn support_radius(&self, center: [f64; 2], rel: f64) -> f64 {
        self.support(rel)
            .into_iter()
            .map(|i| {
                let k = self.spec.wavevector(i);
                (k[0] - center[0]).hypot(k[1] - center[1])
            })
            .fold(0.0, f64::max)
    }

    /// Rotate a square 2-D field by 90 degrees: `(x, y) -> (-y, x)`.
    pub fn rotated_quarter(&self) -> Result<GridField> {
        if self.spec.dim != 2 {
            return Err(Error::DegenerateInput("rotation needs a 2-D grid".into()));
        }
        let n = self.spec.n;
        let mut values = vec![Complex64::new(0.0, 0.0); self.values.len()];
        for iy in 0..n {
            for ix in 0..n {
                // sample at (x, y) moves to (-y, x)
                let tx = (n - iy) % n;
                let ty = ix;
                values[ty * n + tx] = self.values[iy * n + ix];
            }
        }
        GridField::from_values(self.spec, values)
    }
}

fn check_len(spec: &GridSpec, len: usize) -> Result<()> {
    if len != spec.len() {
        return Err(Error::DegenerateInput(format!("expected {} samples, got {len}", spec.len())));
    }
    Ok(())
}

/// In-place DFT along every axis; the inverse includes the `1/N` factor.
fn transform(spec: &GridSpec, data: &mut [Complex64], inverse: bool) {
    let n = spec.n;
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    // rows (x axis)
    fft.process(data);
    if spec.dim == 2 {
        let mut column = vec![Complex64::new(0.0, 0.0); n];
        for ix in 0..n {
            for iy in 0..n {
                column[iy] = data[iy * n + ix];
            }
            fft.process(&mut column);
            for iy in 0..n {
                data[iy * n + ix] = column[iy];
            }
        }
    }
    if inverse {
        let scale = 1.0 / spec.len() as f64;
        data.iter_mut().for_each(|v| *v *= scale);
    }
}
