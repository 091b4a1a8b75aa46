//! Shared inputs for the solver benchmarks.

use haavail_core::metrics::{SweepFixed, DEFAULT_SWEEP_POINTS};
use haavail_core::montecarlo::SimConfig;
use haavail_core::ModelParams;

/// Baseline plus a few points spread across the parameter space.
pub fn parameter_sets() -> Vec<(&'static str, ModelParams)> {
    let base = ModelParams::baseline();
    vec![
        ("baseline", base),
        (
            "fast_repair",
            ModelParams {
                mu: 10.0,
                ..base
            },
        ),
        (
            "frequent_failures",
            ModelParams {
                lambda_active: 1e-2,
                lambda_standby: 2.5e-3,
                ..base
            },
        ),
        (
            "short_interval",
            ModelParams {
                diag_interval: 1e-3,
                ..base
            },
        ),
    ]
}

pub fn sweep_fixed() -> SweepFixed {
    SweepFixed::default()
}

pub fn sweep_points() -> usize {
    DEFAULT_SWEEP_POINTS
}

/// A short simulation that still visits every state at baseline.
pub fn short_simulation() -> SimConfig {
    SimConfig::new(ModelParams::baseline(), 1e6, 4, 42)
}
