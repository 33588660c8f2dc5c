use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants of the two-fluid system.
///
/// Phase 1 occupies the lower half-space `y < 0`, phase 2 the upper one.
/// Any coherent unit system works; nothing here assumes SI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidParams {
    pub rho1: f64,
    pub rho2: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub sigma: f64,
    pub gamma_a: f64,
}

impl FluidParams {
    pub fn new(rho1: f64, rho2: f64, mu1: f64, mu2: f64, sigma: f64, gamma_a: f64) -> Result<Self> {
        let p = Self { rho1, rho2, mu1, mu2, sigma, gamma_a };
        let bad = p.violations();
        if bad.is_empty() {
            Ok(p)
        } else {
            Err(Error::InvalidParams(bad.join("; ")))
        }
    }

    /// Field-level positivity violations, one message per offending field.
    pub fn violations(&self) -> Vec<String> {
        self.fields()
            .into_iter()
            .filter(|(_, v)| !(v.is_finite() && *v > 0.0))
            .map(|(name, v)| format!("`{name}` must be finite and > 0 (got {v})"))
            .collect()
    }

    fn fields(&self) -> [(&'static str, f64); 6] {
        [
            ("rho1", self.rho1),
            ("rho2", self.rho2),
            ("mu1", self.mu1),
            ("mu2", self.mu2),
            ("sigma", self.sigma),
            ("gamma_a", self.gamma_a),
        ]
    }

    /// Density jump across the interface, upper minus lower.
    pub fn jump(&self) -> f64 {
        self.rho2 - self.rho1
    }

    pub fn rho_sum(&self) -> f64 {
        self.rho1 + self.rho2
    }

    pub fn is_heavy_on_top(&self) -> bool {
        self.rho2 > self.rho1
    }

    pub fn rho(&self, phase: Phase) -> f64 {
        match phase {
            Phase::Lower => self.rho1,
            Phase::Upper => self.rho2,
        }
    }

    pub fn mu(&self, phase: Phase) -> f64 {
        match phase {
            Phase::Lower => self.mu1,
            Phase::Upper => self.mu2,
        }
    }

    /// Smallest `mu_j / rho_j`; the radicands `rho_j lambda + mu_j tau^2`
    /// stay off the branch cut while `Re lambda > -min_kinematic_viscosity * tau^2`.
    pub fn min_kinematic_viscosity(&self) -> f64 {
        (self.mu1 / self.rho1).min(self.mu2 / self.rho2)
    }
}

/// Fluid phase: `Lower` is fluid 1 (`y < 0`), `Upper` is fluid 2 (`y > 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Lower,
    Upper,
}

impl Phase {
    pub fn from_index(j: usize) -> Option<Self> {
        match j {
            1 => Some(Phase::Lower),
            2 => Some(Phase::Upper),
            _ => None,
        }
    }
}
