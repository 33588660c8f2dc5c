//! Growth rates, band edges and zero counts of the boundary symbol.

mod contour;
mod growth;

pub use contour::{
    branch_edge, count_zeros_rhp, default_region, localize_zero, rate_scale, region_for_scale,
    rightmost_root, winding_count, Rect, RootInfo, ZeroCount, BOUNDARY_GUARD, KAPPA, MAX_PHASE_STEP,
    WINDING_TOLERANCE,
};
pub use growth::{
    asymptotic_constants, band_nodes, cutoff_wavenumber, dispersion_curve, growth_rate, max_growth,
    normalized_residual, solve_phi, DispersionCurve, GrowthSummary, COARSE_POINTS, MAX_ITERATIONS, TIGHT_TOL,
};
