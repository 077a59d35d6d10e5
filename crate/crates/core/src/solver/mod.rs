//! Linear and power-nonlinearity integral equations on grids, moving-plane
//! sweeps, and the half-space exponent cascade.

mod cascade;
mod operator;
mod power;
mod sweep;

pub use cascade::{
    cascade_iterate, cascade_m_min, halfspace_profile_lowerbound, liouville_cascade, log_log_slope,
    CascadeReport, LowerBound, Profile,
};
pub use operator::{dirichlet_solve, green_sphere_mean, GreenOperator};
pub use power::{nonlinear_power_solve, Init, PowerSolution, SolveOptions};
pub use sweep::{default_lambda_grid, moving_plane_sweep, SweepOptions, SweepReport};
