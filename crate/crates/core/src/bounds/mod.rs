//! Constants derived from `g` and the closed-form distortion bounds.

mod constants;
mod formulas;

pub use constants::{
    compute_constants, g_inverse, golden_section_max, mid_residual, out_residual, pl_constants, DerivedConstants,
    GOLDEN_ITERATIONS, GOLDEN_TOLERANCE, STATIONARITY_TOLERANCE,
};
pub use formulas::{
    borda_order, copeland_bound_finite, copeland_bound_limit, generic_det_lower, plurality_bound_finite,
    plurality_bound_limit, rd_lower_bound, rd_lower_bound_pl, rd_upper_bound, wu_bound_golden, wu_bound_limit,
    DEFAULT_EPSILON,
};
