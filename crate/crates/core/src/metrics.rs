//! Availability, downtime, the μ/λ downtime sweep and cross-solver validation.

use std::fmt;

use rayon::prelude::*;

use crate::ctmc::{build_generator, ctmc_steady_state_closed_form, ctmc_steady_state_numeric};
use crate::error::Result;
use crate::model::{ModelParams, Source, StateId, SteadyState, DEFAULT_DIAG_INTERVAL_HOURS};
use crate::montecarlo::{simulate, SimConfig, SimResult};
use crate::smp::{
    embedded_closed_form_ratios, smp_probs_from_embedded_ratios, smp_state_probabilities,
    smp_state_probabilities_closed_form,
};

/// Minutes in a 365-day year.
pub const MINUTES_PER_YEAR: f64 = 525_600.0;

/// Agreement required between a closed form and its numeric counterpart.
pub const CLOSED_NUMERIC_TOLERANCE: f64 = 1e-9;

/// Allowed deviation of an analytic steady state's sum from one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Ctmc,
    Smp,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Ctmc => "ctmc",
            ModelKind::Smp => "smp",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// Which representation of a model to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Method {
    #[default]
    Numeric,
    ClosedForm,
}

/// 1 − (π₂ + π₆).
pub fn availability(ss: &SteadyState) -> f64 {
    let down = ss.prob(StateId::UNCOVERED_ACTIVE) + ss.prob(StateId::BOTH_DOWN);
    (1.0 - down).clamp(0.0, 1.0)
}

pub fn downtime_minutes_per_year(a: f64) -> f64 {
    (1.0 - a) * MINUTES_PER_YEAR
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvailabilityReport {
    pub availability: f64,
    pub downtime_min_per_year: f64,
    pub state_probs: SteadyState,
    pub model: ModelKind,
    pub params: ModelParams,
}

impl AvailabilityReport {
    pub fn new(state_probs: SteadyState, model: ModelKind, params: ModelParams) -> Self {
        let a = availability(&state_probs);
        Self {
            availability: a,
            downtime_min_per_year: downtime_minutes_per_year(a),
            state_probs,
            model,
            params,
        }
    }
}

pub fn solve(model: ModelKind, method: Method, p: ModelParams) -> Result<AvailabilityReport> {
    let ss = match (model, method) {
        (ModelKind::Ctmc, Method::Numeric) => ctmc_steady_state_numeric(&build_generator(p)?)?,
        (ModelKind::Ctmc, Method::ClosedForm) => ctmc_steady_state_closed_form(p)?,
        (ModelKind::Smp, Method::Numeric) => smp_state_probabilities(p)?,
        (ModelKind::Smp, Method::ClosedForm) => smp_state_probabilities_closed_form(p)?,
    };
    Ok(AvailabilityReport::new(ss, model, p))
}

pub fn solve_ctmc(p: ModelParams) -> Result<AvailabilityReport> {
    solve(ModelKind::Ctmc, Method::Numeric, p)
}

pub fn solve_smp(p: ModelParams) -> Result<AvailabilityReport> {
    solve(ModelKind::Smp, Method::Numeric, p)
}

/// Parameters held fixed across a μ/λ sweep. λ_s is always λ/4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepFixed {
    pub c: f64,
    pub c_s: f64,
    pub mu: f64,
    pub beta: f64,
}

impl Default for SweepFixed {
    fn default() -> Self {
        Self {
            c: 0.9,
            c_s: 0.9,
            mu: 1.0,
            beta: 12.0,
        }
    }
}

impl SweepFixed {
    pub fn params_at(&self, ratio: f64, diag_interval: f64) -> ModelParams {
        let lambda = self.mu / ratio;
        ModelParams {
            lambda_active: lambda,
            lambda_standby: lambda / 4.0,
            mu: self.mu,
            beta: self.beta,
            c: self.c,
            c_s: self.c_s,
            diag_interval,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub ratio: f64,
    pub params: ModelParams,
    pub availability_ctmc: f64,
    pub availability_smp: f64,
    pub downtime_ctmc: f64,
    pub downtime_smp: f64,
    /// downtime_smp − downtime_ctmc, minutes per year.
    pub difference: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: Vec<f64>,
    pub rows: Vec<SweepRow>,
    pub diag_interval: f64,
}

pub const DEFAULT_SWEEP_POINTS: usize = 40;
pub const DEFAULT_SWEEP_MIN: f64 = 1e2;
pub const DEFAULT_SWEEP_MAX: f64 = 1e6;

/// `points` log-spaced values from `min` to `max` inclusive.
pub fn log_grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let (lo, hi) = (min.log10(), max.log10());
            let step = (hi - lo) / (points - 1) as f64;
            (0..points)
                .map(|i| {
                    if i == points - 1 {
                        max
                    } else {
                        10f64.powf(lo + step * i as f64)
                    }
                })
                .collect()
        }
    }
}

/// 40 log-spaced μ/λ ratios in [10², 10⁶].
pub fn default_ratio_grid() -> Vec<f64> {
    log_grid(DEFAULT_SWEEP_MIN, DEFAULT_SWEEP_MAX, DEFAULT_SWEEP_POINTS)
}

/// Solves both models at every μ/λ ratio and records their downtimes.
pub fn downtime_sweep(ratios: &[f64], fixed: SweepFixed, diag_interval: f64) -> Result<SweepResult> {
    if ratios.is_empty() {
        return Err(crate::ModelError::InvalidParam("ratio grid is empty".into()));
    }
    if ratios.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
        return Err(crate::ModelError::InvalidParam(
            "ratios must be positive and finite".into(),
        ));
    }
    if ratios.windows(2).any(|w| w[1] <= w[0]) {
        return Err(crate::ModelError::InvalidParam(
            "ratios must be strictly increasing".into(),
        ));
    }
    let rows = ratios
        .par_iter()
        .map(|&ratio| {
            let params = fixed.params_at(ratio, diag_interval);
            let ctmc = solve_ctmc(params)?;
            let smp = solve_smp(params)?;
            Ok(SweepRow {
                ratio,
                params,
                availability_ctmc: ctmc.availability,
                availability_smp: smp.availability,
                downtime_ctmc: ctmc.downtime_min_per_year,
                downtime_smp: smp.downtime_min_per_year,
                difference: smp.downtime_min_per_year - ctmc.downtime_min_per_year,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        axis: ratios.to_vec(),
        rows,
        diag_interval,
    })
}

pub fn default_sweep() -> Result<SweepResult> {
    downtime_sweep(
        &default_ratio_grid(),
        SweepFixed::default(),
        DEFAULT_DIAG_INTERVAL_HOURS,
    )
}

/// Settings for [`validate_all`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationOptions {
    pub horizon: f64,
    pub replications: u32,
    pub seed: u64,
    /// Relative perturbation applied to the v₂ coefficient of the
    /// semi-Markov closed form. Exists to exercise the failure path.
    pub closed_form_perturbation: Option<f64>,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            horizon: 1e7,
            replications: 10,
            seed: 42,
            closed_form_perturbation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub params: ModelParams,
    /// ctmc-numeric, ctmc-closed, smp-numeric, smp-closed, simulated.
    pub sources: Vec<SteadyState>,
    /// Max per-state relative difference for every pair of `sources`.
    pub pairwise: Vec<(Source, Source, f64)>,
    pub simulation: SimResult,
    pub availability_smp: f64,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &str, value: f64, tolerance: f64) -> Check {
    Check {
        name: name.to_string(),
        value,
        tolerance,
        passed: value <= tolerance,
    }
}

/// Solves with all five sources and compares them. Disagreements are
/// reported in the checks, not returned as errors.
pub fn validate_all(p: ModelParams, opts: &ValidationOptions) -> Result<ValidationReport> {
    let p = p.validate_for_smp()?;
    let ctmc_numeric = ctmc_steady_state_numeric(&build_generator(p)?)?;
    let ctmc_closed = ctmc_steady_state_closed_form(p)?;
    let smp_numeric = smp_state_probabilities(p)?;
    let mut ratios = embedded_closed_form_ratios(&p);
    if let Some(eps) = opts.closed_form_perturbation {
        ratios[1] *= 1.0 + eps;
    }
    let smp_closed = smp_probs_from_embedded_ratios(&p, ratios);

    let sim_cfg = SimConfig::new(p, opts.horizon, opts.replications, opts.seed);
    let simulation = simulate(&sim_cfg)?;
    let simulated = SteadyState::new(simulation.occupancy, Source::Simulated);

    let sources = vec![ctmc_numeric, ctmc_closed, smp_numeric, smp_closed, simulated];
    let mut pairwise = Vec::new();
    for (i, a) in sources.iter().enumerate() {
        for b in &sources[i + 1..] {
            pairwise.push((a.source(), b.source(), a.max_rel_diff(b)));
        }
    }

    let availability_smp = availability(&smp_numeric);
    let sim_gap = (simulation.availability.mean - availability_smp).abs();
    let worst_norm = sources[..4]
        .iter()
        .map(|s| (s.total() - 1.0).abs())
        .fold(0.0, f64::max);
    let checks = vec![
        check(
            "ctmc closed vs numeric (max rel diff)",
            ctmc_closed.max_rel_diff(&ctmc_numeric),
            CLOSED_NUMERIC_TOLERANCE,
        ),
        check(
            "smp closed vs numeric (max rel diff)",
            smp_closed.max_rel_diff(&smp_numeric),
            CLOSED_NUMERIC_TOLERANCE,
        ),
        check(
            "analytic normalization (max |sum - 1|)",
            worst_norm,
            NORMALIZATION_TOLERANCE,
        ),
        check(
            "simulated vs smp availability (|gap|, tol = 95% CI half-width)",
            sim_gap,
            simulation.availability.half_width,
        ),
    ];

    let mut notes = Vec::new();
    let unreachable = sources[..4].iter().all(|s| {
        s.prob(StateId::UNCOVERED_ACTIVE) == 0.0 && s.prob(StateId::LATENT_STANDBY) == 0.0
    });
    if unreachable {
        notes.push("states 2 and 5 are unreachable: pi2 = pi5 = 0 in every analytic solution".into());
    }

    Ok(ValidationReport {
        params: p,
        sources,
        pairwise,
        simulation,
        availability_smp,
        checks,
        notes,
    })
}
