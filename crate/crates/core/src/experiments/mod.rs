//! Scenarios, sweeps and optimum searches.

pub mod presets;
pub mod scenario;
pub mod search;
pub mod sweep;

pub use presets::{preset, presets, Preset};
pub use scenario::{
    default_time_grid, Axis, CouplingSpec, Scenario, SweepSpec, TimeGrid, Topology,
};
pub use search::{
    find_optimal_drive, find_optimal_time, first_entropy_peak, signature_onset,
    timescale_comparison, DriveOptimum, DriveSearch, Evaluator, HermitianDrive, Locator,
    Objective, Optimum, TimescaleComparison, TimescaleOptions,
};
pub use sweep::{phase_sweep, run_scenario, PointStatus, SweepPoint, SweepResult};
