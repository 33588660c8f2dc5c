//! JSON run configuration with strict keys and field-level validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dispersion::Rect;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::params::FluidParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: FluidParams,
    #[serde(default)]
    pub symbol: SymbolBlock,
    #[serde(default)]
    pub curve: CurveBlock,
    #[serde(default)]
    pub max: MaxBlock,
    #[serde(default)]
    pub zeros: ZerosBlock,
    #[serde(default)]
    pub profile: ProfileBlock,
    #[serde(default)]
    pub witness: WitnessBlock,
    #[serde(default)]
    pub simulate: SimulateBlock,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolPoint {
    pub lambda_re: f64,
    #[serde(default)]
    pub lambda_im: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolBlock {
    pub points: Vec<SymbolPoint>,
}

impl Default for SymbolBlock {
    fn default() -> Self {
        Self { points: vec![SymbolPoint { lambda_re: 1.0, lambda_im: 0.0, tau: 1.0 }] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CurveBlock {
    pub n_points: usize,
    pub tol: f64,
}

impl Default for CurveBlock {
    fn default() -> Self {
        Self { n_points: 512, tol: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MaxBlock {
    pub tol: f64,
}

impl Default for MaxBlock {
    fn default() -> Self {
        Self { tol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ZerosBlock {
    /// Wavenumbers to scan; empty means a default sweep across the band.
    pub taus: Vec<f64>,
    /// Counting region; the automatic one is used when absent.
    pub region: Option<Rect>,
}


#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProfileBlock {
    pub tau: f64,
    /// Spectral parameter; defaults to the growth rate at `tau`.
    pub lambda: Option<f64>,
    pub h_amp: f64,
    pub n_samples: usize,
}

impl Default for ProfileBlock {
    fn default() -> Self {
        Self { tau: 0.5, lambda: None, h_amp: 1.0, n_samples: 201 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WitnessBlock {
    pub xi0: [f64; 2],
    /// Window radii as fractions of `|xi0|`.
    pub epsilons: Vec<f64>,
    pub norm_p: f64,
    /// Grid; defaults to one sized for the smallest epsilon.
    pub grid: Option<GridSpec>,
    pub dim: usize,
    pub n: usize,
    /// Off-curve spectral parameter for a negative control run.
    pub lambda0: Option<f64>,
}

impl Default for WitnessBlock {
    fn default() -> Self {
        Self {
            xi0: [1.0, 0.0],
            epsilons: vec![0.2, 0.1, 0.05],
            norm_p: 2.0,
            grid: None,
            dim: 1,
            n: 4096,
            lambda0: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialField {
    PureMode { mode: [i64; 2], amplitude: f64 },
    WhiteNoise { seed: u64, amplitude: f64 },
    /// Little-endian f64 pairs (re, im) in grid order.
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateBlock {
    pub grid: GridSpec,
    pub initial: InitialField,
    pub times: Vec<f64>,
}

impl Default for SimulateBlock {
    fn default() -> Self {
        Self {
            grid: GridSpec { dim: 1, n: 256, side: 100.0 },
            initial: InitialField::WhiteNoise { seed: 0, amplitude: 1e-3 },
            times: vec![0.0, 1.0, 2.0, 5.0, 10.0],
        }
    }
}

fn positive(out: &mut Vec<String>, name: &str, v: f64) {
    if !(v > 0.0 && v.is_finite()) {
        out.push(format!("`{name}` must be finite and > 0 (got {v})"));
    }
}

fn grid_violations(out: &mut Vec<String>, name: &str, g: &GridSpec) {
    if let Err(e) = g.validate() {
        out.push(format!("`{name}`: {e}"));
    }
}

impl RunConfig {
    /// Every violated invariant, one message each.
    pub fn violations(&self) -> Vec<String> {
        let mut out: Vec<String> = self.params.violations().into_iter().map(|m| format!("params: {m}")).collect();
        for (i, pt) in self.symbol.points.iter().enumerate() {
            if !(pt.tau >= 0.0 && pt.tau.is_finite()) {
                out.push(format!("`symbol.points[{i}].tau` must be finite and >= 0 (got {})", pt.tau));
            }
            if !(pt.lambda_re.is_finite() && pt.lambda_im.is_finite()) {
                out.push(format!("`symbol.points[{i}].lambda` must be finite"));
            }
        }
        if self.curve.n_points < 2 {
            out.push(format!("`curve.n_points` must be >= 2 (got {})", self.curve.n_points));
        }
        positive(&mut out, "curve.tol", self.curve.tol);
        positive(&mut out, "max.tol", self.max.tol);
        for (i, &t) in self.zeros.taus.iter().enumerate() {
            positive(&mut out, &format!("zeros.taus[{i}]"), t);
        }
        if let Some(r) = &self.zeros.region {
            if let Err(e) = Rect::new(r.re_min, r.re_max, r.im_min, r.im_max) {
                out.push(format!("`zeros.region`: {e}"));
            }
        }
        positive(&mut out, "profile.tau", self.profile.tau);
        if let Some(l) = self.profile.lambda {
            if !(l.is_finite() && l != 0.0) {
                out.push(format!("`profile.lambda` must be finite and nonzero (got {l})"));
            }
        }
        positive(&mut out, "profile.h_amp", self.profile.h_amp);
        if self.profile.n_samples < 2 {
            out.push(format!("`profile.n_samples` must be >= 2 (got {})", self.profile.n_samples));
        }
        let w = &self.witness;
        if !(w.xi0[0].hypot(w.xi0[1]) > 0.0) {
            out.push("`witness.xi0` must be nonzero".into());
        }
        if w.epsilons.is_empty() {
            out.push("`witness.epsilons` must not be empty".into());
        }
        for (i, &e) in w.epsilons.iter().enumerate() {
            positive(&mut out, &format!("witness.epsilons[{i}]"), e);
        }
        if !(w.norm_p >= 1.0) {
            out.push(format!("`witness.norm_p` must be >= 1 (got {})", w.norm_p));
        }
        match &w.grid {
            Some(g) => grid_violations(&mut out, "witness.grid", g),
            None => grid_violations(&mut out, "witness.dim/n", &GridSpec { dim: w.dim, n: w.n, side: 1.0 }),
        }
        if let Some(l) = w.lambda0 {
            if !l.is_finite() {
                out.push(format!("`witness.lambda0` must be finite (got {l})"));
            }
        }
        let s = &self.simulate;
        grid_violations(&mut out, "simulate.grid", &s.grid);
        for (i, &t) in s.times.iter().enumerate() {
            if !(t >= 0.0 && t.is_finite()) {
                out.push(format!("`simulate.times[{i}]` must be finite and >= 0 (got {t})"));
            }
        }
        match &s.initial {
            InitialField::PureMode { amplitude, .. } | InitialField::WhiteNoise { amplitude, .. } => {
                if !amplitude.is_finite() {
                    out.push(format!("`simulate.initial.amplitude` must be finite (got {amplitude})"));
                }
            }
            InitialField::File { .. } => {}
        }
        out
    }

    pub fn validated(self) -> Result<Self> {
        let bad = self.violations();
        if bad.is_empty() {
            Ok(self)
        } else {
            Err(Error::ConfigInvalid(bad))
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::ConfigInvalid(vec![e.to_string()]))?;
        cfg.validated()
    }

    /// Relative `file` paths of the initial field resolve against `base`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::ConfigInvalid(vec![format!("cannot read {}: {e}", path.display())]))?;
        let mut cfg = Self::from_json(&text)?;
        if let InitialField::File { path: f } = &mut cfg.simulate.initial {
            if f.is_relative() {
                if let Some(dir) = path.parent() {
                    *f = dir.join(&*f);
                }
            }
        }
        Ok(cfg)
    }
}
