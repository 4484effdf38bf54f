//! Time integration of the homogeneous and the spatially periodic problems,
//! test scenarios, error norms and run reports.

mod fourier;
mod norms;
mod report;
mod run;
mod scenario;
mod spatial;
mod stepping;

pub use fourier::{
    advection_rhs, cfl_dt, fourier_degree_energy, fourier_forward, fourier_indicator, fourier_inverse, wavenumber,
    FourierCoeffs, FourierPlan,
};
pub use norms::{eval_on_grid, l2_error, l2_error_field, l2_error_fn, VelocityGrid, L2_NODES};
pub use report::{
    compare, read_adjustments, write_adjustments, ComparisonRow, ReportRow, RunReport, Snapshot,
};
pub use run::{
    conserved_totals, global_equilibrium, run, sample_initial, Equilibrium, RunFailure, RunOutput, SolverConfig,
    Switches,
};
pub use scenario::{
    bkw_coeffs, bkw_density, bkw_rate_of, bkw_s, calibrate_bkw, BkwParams, DensityWaveParams, Gaussian,
    HexaGaussianParams, Initial, MixedGaussianParams, QuadGaussianParams, Scenario, TaylorGreenParams,
    TimeVaryingParams, BKW_RATE,
};
pub use spatial::{Geometry, SpatialField};
pub use stepping::{collision_field, rk4_field, step_homogeneous, step_nonhomogeneous, transport_rhs};
