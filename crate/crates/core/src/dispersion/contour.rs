//! Argument-principle zero counting for `s(., tau)` on rectangles.
//!
//! Counting works on the pole-free form [`symbol::symbol_numerator`], whose
//! zeros coincide with those of `s`. The winding number is obtained by
//! accumulating wrapped phase increments along the boundary and refining
//! any segment whose increment exceeds [`MAX_PHASE_STEP`]; no derivative of
//! the symbol is taken.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::FluidParams;
use crate::symbol::{self, Complex64};

use super::growth;

/// Analyticity-strip safety factor for leftward searches.
pub const KAPPA: f64 = 0.9;

/// Largest accepted phase change between neighbouring boundary samples.
pub const MAX_PHASE_STEP: f64 = PI / 8.0;

/// Boundary samples closer to a zero than this (relative to the largest
/// boundary modulus) are reported as [`Error::ZeroOnBoundary`].
pub const BOUNDARY_GUARD: f64 = 1e-10;

/// Maximum accepted distance of the phase total from a multiple of `2 pi`
/// (in turns).
pub const WINDING_TOLERANCE: f64 = 0.1;

const INITIAL_SEGMENTS: usize = 32;
const MAX_DEPTH: u32 = 40;
const REFINEMENT_PASSES: u32 = 4;

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let r = Self { re_min, re_max, im_min, im_max };
        let finite = [re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite());
        if !finite || !(re_max > re_min) || !(im_max > im_min) {
            return Err(Error::DegenerateInput(format!("empty or non-finite rectangle {r:?}")));
        }
        Ok(r)
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    /// Corners in counter-clockwise order starting bottom-left.
    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }

    fn split_re(&self, frac: f64) -> (Rect, Rect) {
        let x = self.re_min + frac * self.width();
        (Rect { re_max: x, ..*self }, Rect { re_min: x, ..*self })
    }

    fn split_im(&self, frac: f64) -> (Rect, Rect) {
        let y = self.im_min + frac * self.height();
        (Rect { im_max: y, ..*self }, Rect { im_min: y, ..*self })
    }
}

/// Result of a zero count on one rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroCount {
    pub region: Rect,
    pub count: usize,
    /// Distance of the accumulated phase from the nearest multiple of `2 pi`, in turns.
    pub winding_residual: f64,
}

#[derive(Debug, Clone, Copy)]
struct Winding {
    turns: f64,
    min_modulus: f64,
    max_modulus: f64,
}

fn accumulate_phase<F>(f: &F, rect: &Rect, max_step: f64) -> Result<Winding>
where
    F: Fn(Complex64) -> Complex64,
{
    let corners = rect.corners();
    let mut total = 0.0;
    let mut min_modulus = f64::INFINITY;
    let mut max_modulus: f64 = 0.0;
    let mut coarse = false;
    let mut stack: Vec<(Complex64, Complex64, Complex64, Complex64, u32)> = Vec::new();
    for edge in 0..4 {
        let a = corners[edge];
        let b = corners[(edge + 1) % 4];
        let step = (b - a) / INITIAL_SEGMENTS as f64;
        let mut z0 = a;
        let mut f0 = f(z0);
        for i in 1..=INITIAL_SEGMENTS {
            let z1 = if i == INITIAL_SEGMENTS { b } else { a + step * i as f64 };
            let f1 = f(z1);
            stack.push((z0, f0, z1, f1, 0));
            z0 = z1;
            f0 = f1;
        }
        while let Some((za, fa, zb, fb, depth)) = stack.pop() {
            let ma = fa.norm();
            min_modulus = min_modulus.min(ma);
            max_modulus = max_modulus.max(ma);
            if !ma.is_finite() {
                return Err(Error::DegenerateInput(format!("non-finite value on contour at {za}")));
            }
            let d = (fb / fa).arg();
            if d.abs() > max_step && depth < MAX_DEPTH {
                let zm = (za + zb) * 0.5;
                let fm = f(zm);
                stack.push((zm, fm, zb, fb, depth + 1));
                stack.push((za, fa, zm, fm, depth + 1));
            } else {
                if d.abs() > max_step {
                    coarse = true;
                }
                total += d;
            }
        }
    }
    if min_modulus < BOUNDARY_GUARD * max_modulus || min_modulus == 0.0 {
        return Err(Error::ZeroOnBoundary { min: min_modulus, scale: max_modulus });
    }
    let turns = total / (2.0 * PI);
    if coarse {
        return Err(Error::ContourTooCoarse((turns - turns.round()).abs().max(WINDING_TOLERANCE)));
    }
    Ok(Winding { turns, min_modulus, max_modulus })
}

/// Winding number of `f` around `rect`, refined until the phase total is
/// within [`WINDING_TOLERANCE`] of an integer and stable under halving the
/// allowed phase step.
pub fn winding_count<F>(f: F, rect: &Rect) -> Result<ZeroCount>
where
    F: Fn(Complex64) -> Complex64,
{
    let mut step = MAX_PHASE_STEP;
    let mut last: Option<i64> = None;
    let mut residual = f64::INFINITY;
    for _ in 0..REFINEMENT_PASSES {
        let w = accumulate_phase(&f, rect, step)?;
        debug_assert!(w.min_modulus <= w.max_modulus);
        let n = w.turns.round();
        residual = (w.turns - n).abs();
        if residual < WINDING_TOLERANCE {
            if last == Some(n as i64) {
                if n < 0.0 {
                    // poles are excluded for the pole-free form; a negative
                    // winding means the contour crossed a branch cut
                    return Err(Error::DegenerateInput(format!("negative winding {n} on {rect:?}")));
                }
                return Ok(ZeroCount { region: *rect, count: n as usize, winding_residual: residual });
            }
            last = Some(n as i64);
        }
        step *= 0.5;
    }
    Err(Error::ContourTooCoarse(residual))
}

/// Left edge of the analyticity strip for wavenumber `tau`: the radicands
/// reach the cut at `Re lambda = -min_j(mu_j / rho_j) tau^2`.
pub fn branch_edge(tau: f64, p: &FluidParams) -> f64 {
    -p.min_kinematic_viscosity() * tau * tau
}

/// Characteristic rate for wavenumber `tau`: the larger of the inviscid
/// gravity-capillary frequency and the viscous decay rate.
pub fn rate_scale(tau: f64, p: &FluidParams) -> f64 {
    let inviscid = ((p.jump().abs() * p.gamma_a * tau + p.sigma * tau.powi(3)) / p.rho_sum()).sqrt();
    let viscous = -branch_edge(tau, p);
    inviscid.max(viscous).max(f64::MIN_POSITIVE)
}

/// Default right-half-plane region `[delta_0, 10 L] x [-5 L, 5 L]`, where
/// `L = lambda_inf` for unstable configurations and [`rate_scale`] otherwise,
/// and `delta_0 = 1e-6 L`.
pub fn default_region(tau: f64, p: &FluidParams) -> Rect {
    let l = match growth::max_growth(p, 1e-8) {
        Ok(g) => g.lambda_inf,
        Err(_) => rate_scale(tau, p),
    };
    region_for_scale(l)
}

pub fn region_for_scale(l: f64) -> Rect {
    Rect { re_min: 1e-6 * l, re_max: 10.0 * l, im_min: -5.0 * l, im_max: 5.0 * l }
}

fn check_region(tau: f64, p: &FluidParams, region: &Rect) -> Result<()> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::DegenerateInput(format!("zero counting needs tau > 0, got {tau}")));
    }
    let edge = KAPPA * branch_edge(tau, p);
    if region.re_min <= edge {
        return Err(Error::DegenerateInput(format!(
            "region left edge {} crosses the analyticity limit {edge}",
            region.re_min
        )));
    }
    Ok(())
}

/// Number of zeros of `s(., tau)` inside `region`.
pub fn count_zeros_rhp(tau: f64, p: &FluidParams, region: &Rect) -> Result<ZeroCount> {
    check_region(tau, p, region)?;
    winding_count(|z| symbol::symbol_numerator(z, tau, p), region)
}

/// Off-centre split fractions; rotating through them keeps split lines
/// away from zeros lying on symmetry axes such as the real line.
const SPLITS: [f64; 4] = [0.5 + 0.0371, 0.5 - 0.0593, 0.5 + 0.0829, 0.5 - 0.1117];

/// Shrink `region` (which must contain exactly one zero) by repeated
/// quadrant subdivision until its larger side is at most `size`.
/// Returns the final rectangle.
pub fn localize_zero(tau: f64, p: &FluidParams, region: &Rect, size: f64) -> Result<Rect> {
    let start = count_zeros_rhp(tau, p, region)?;
    if start.count != 1 {
        return Err(Error::DegenerateInput(format!(
            "localization needs exactly one zero, found {}",
            start.count
        )));
    }
    let mut rect = *region;
    let mut level = 0usize;
    while rect.width().max(rect.height()) > size {
        let mut found = None;
        'fractions: for k in 0..SPLITS.len() {
            let fx = SPLITS[(level + k) % SPLITS.len()];
            let fy = SPLITS[(level + k + 1) % SPLITS.len()];
            let (left, right) = rect.split_re(fx);
            let quads = [left.split_im(fy), right.split_im(fy)];
            for q in quads.iter().flat_map(|(a, b)| [*a, *b]) {
                match count_zeros_rhp(tau, p, &q) {
                    Ok(c) if c.count >= 1 => {
                        found = Some(q);
                        break 'fractions;
                    }
                    Ok(_) => {}
                    Err(Error::ZeroOnBoundary { .. }) => continue 'fractions,
                    Err(e) => return Err(e),
                }
            }
        }
        rect = found.ok_or(Error::ContourTooCoarse(WINDING_TOLERANCE))?;
        level += 1;
        if level > 400 {
            return Err(Error::NoConvergence(level));
        }
    }
    Ok(rect)
}

/// A located root of `s(., tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootInfo {
    pub lambda: Complex64,
    /// Zeros counted in the final isolating rectangle; more than one flags
    /// a multiple root or an unresolved cluster.
    pub multiplicity: usize,
}

/// Newton polish on the pole-free form with a central-difference derivative.
fn polish(z0: Complex64, tau: f64, p: &FluidParams, window: &Rect) -> Complex64 {
    let g = |z: Complex64| symbol::symbol_numerator(z, tau, p);
    let mut z = z0;
    let mut gz = g(z);
    for _ in 0..30 {
        let h = 1e-6 * (z.norm() + window.width().max(window.height()));
        let dg = (g(z + h) - g(z - h)) / (2.0 * h);
        if dg.norm() == 0.0 || !dg.is_finite() {
            break;
        }
        let zn = z - gz / dg;
        let gn = g(zn);
        if !(gn.norm() < gz.norm()) {
            break;
        }
        let done = (zn - z).norm() <= 4.0 * f64::EPSILON * zn.norm();
        z = zn;
        gz = gn;
        if done {
            break;
        }
    }
    // Newton may wander to a different zero; keep it only if it stays close
    let slack = 4.0 * window.width().max(window.height()) + 1e-12 * z0.norm();
    if (z - z0).norm() <= slack {
        z
    } else {
        z0
    }
}

/// Rightmost zero of `s(., tau)` in the strip `Re lambda >= floor`.
///
/// The strip is truncated at `|lambda| <= R` where `R` is doubled until the
/// count is stable; the zero is then isolated by vertical bisection (which
/// keeps the rightmost part) and horizontal bisection (upper half first),
/// and polished by Newton. Returns `None` when the strip holds no zero.
pub fn rightmost_root(tau: f64, p: &FluidParams, floor: f64) -> Result<Option<RootInfo>> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::DegenerateInput(format!("rightmost_root needs tau > 0, got {tau}")));
    }
    let limit = KAPPA * branch_edge(tau, p);
    if !(floor < 0.0 && floor > limit) {
        return Err(Error::DegenerateInput(format!("floor {floor} must lie in ({limit}, 0)")));
    }
    let scale = rate_scale(tau, p);
    let mut radius = 4.0 * scale.max(-floor);
    let mut rect = Rect { re_min: floor, re_max: radius, im_min: -radius, im_max: radius };
    let mut count = count_zeros_rhp(tau, p, &rect)?.count;
    for _ in 0..8 {
        let wider = Rect { re_min: floor, re_max: 2.0 * radius, im_min: -2.0 * radius, im_max: 2.0 * radius };
        let c = count_zeros_rhp(tau, p, &wider)?.count;
        rect = wider;
        radius *= 2.0;
        if c == count {
            break;
        }
        count = c;
    }
    if count == 0 {
        return Ok(None);
    }

    let target = 1e-7 * radius;
    let mut level = 0usize;
    while rect.width() > target {
        rect = split_keep(tau, p, &rect, &mut count, level, Axis::Re)?;
        level += 1;
    }
    while rect.height() > target {
        rect = split_keep(tau, p, &rect, &mut count, level, Axis::Im)?;
        level += 1;
    }
    let lambda = polish(rect.center(), tau, p, &rect);
    Ok(Some(RootInfo { lambda, multiplicity: count }))
}

#[derive(Clone, Copy)]
enum Axis {
    Re,
    Im,
}

/// Split and keep the half with the larger coordinate when it holds a zero.
fn split_keep(tau: f64, p: &FluidParams, rect: &Rect, count: &mut usize, level: usize, axis: Axis) -> Result<Rect> {
    for k in 0..SPLITS.len() {
        let frac = SPLITS[(level + k) % SPLITS.len()];
        let (low, high) = match axis {
            Axis::Re => rect.split_re(frac),
            Axis::Im => rect.split_im(frac),
        };
        let upper = match count_zeros_rhp(tau, p, &high) {
            Ok(c) => c.count,
            Err(Error::ZeroOnBoundary { .. }) => continue,
            Err(e) => return Err(e),
        };
        if upper > 0 {
            *count = upper;
            return Ok(high);
        }
        match count_zeros_rhp(tau, p, &low) {
            Ok(c) if c.count > 0 => {
                *count = c.count;
                return Ok(low);
            }
            Ok(_) => continue,
            Err(Error::ZeroOnBoundary { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::ContourTooCoarse(WINDING_TOLERANCE))
}
