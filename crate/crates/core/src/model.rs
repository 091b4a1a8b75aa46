//! Parameter set and state space of the two-unit active/standby cluster.
//!
//! The six states are:
//!
//! | state | meaning                                                        |
//! |-------|----------------------------------------------------------------|
//! | 1     | active and standby both working                                |
//! | 2     | active failure not covered by the protection switch (down)     |
//! | 3     | active failure covered, service restored on the standby        |
//! | 4     | standby failure detected immediately                           |
//! | 5     | standby failure latent, waiting for the next diagnostic        |
//! | 6     | both units failed (down)                                       |
//!
//! All rates are per hour and the diagnostic interval is in hours.

use std::fmt;

use crate::error::{ModelError, Result};

/// Number of states in the cluster model.
pub const NUM_STATES: usize = 6;

/// Default diagnostic interval: one week.
pub const DEFAULT_DIAG_INTERVAL_HOURS: f64 = 168.0;

/// The seven scalar parameters of the cluster model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Failure rate of the active unit.
    pub lambda_active: f64,
    /// Failure rate of the standby unit.
    pub lambda_standby: f64,
    /// Restoration rate of a failed unit.
    pub mu: f64,
    /// Reboot rate after an uncovered active failure.
    pub beta: f64,
    /// Coverage probability of the active unit.
    pub c: f64,
    /// Coverage probability of the standby unit.
    pub c_s: f64,
    /// Interval between diagnostics that detect latent standby faults.
    pub diag_interval: f64,
}

impl ModelParams {
    /// Reference operating point: λ = 0.001/h, λ_s = λ/4, μ = 1/h, β = 12/h,
    /// c = c_s = 0.9, weekly diagnostics.
    pub const fn baseline() -> Self {
        Self {
            lambda_active: 0.001,
            lambda_standby: 0.00025,
            mu: 1.0,
            beta: 12.0,
            c: 0.9,
            c_s: 0.9,
            diag_interval: DEFAULT_DIAG_INTERVAL_HOURS,
        }
    }

    /// Checks every domain invariant and returns the parameters unchanged.
    pub fn validate(self) -> Result<Self> {
        validate_params(self)
    }

    /// Validation plus the extra requirement of the semi-Markov solver,
    /// which divides by the active failure rate.
    pub fn validate_for_smp(self) -> Result<Self> {
        let p = validate_params(self)?;
        if p.lambda_active <= 0.0 {
            return Err(ModelError::InvalidParam(
                "lambda must be positive for the semi-Markov model".into(),
            ));
        }
        Ok(p)
    }

    /// Rate of the exponential that replaces the diagnostic wait in the CTMC
    /// approximation (mean T/2).
    pub fn diag_rate(&self) -> f64 {
        2.0 / self.diag_interval
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::baseline()
    }
}

/// Returns `p` unchanged when every invariant holds, otherwise an error
/// naming the first violated one.
pub fn validate_params(p: ModelParams) -> Result<ModelParams> {
    let rates = [
        ("lambda", p.lambda_active),
        ("lambda_s", p.lambda_standby),
        ("mu", p.mu),
        ("beta", p.beta),
    ];
    for (name, v) in rates {
        if !v.is_finite() {
            return Err(invalid(format!("{name} must be finite")));
        }
        if v < 0.0 {
            return Err(invalid(format!("{name} must be non-negative")));
        }
    }
    if p.mu <= 0.0 {
        return Err(invalid("mu must be positive"));
    }
    for (name, v) in [("c", p.c), ("c_s", p.c_s)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(invalid(format!("{name} out of [0,1]")));
        }
    }
    if !p.diag_interval.is_finite() {
        return Err(invalid("T must be finite"));
    }
    if p.diag_interval <= 0.0 {
        return Err(invalid("T must be positive"));
    }
    Ok(p)
}

fn invalid(msg: impl Into<String>) -> ModelError {
    ModelError::InvalidParam(msg.into())
}

/// One of the six model states, numbered 1 through 6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(u8);

impl StateId {
    pub const BOTH_UP: StateId = StateId(1);
    pub const UNCOVERED_ACTIVE: StateId = StateId(2);
    pub const COVERED_ACTIVE: StateId = StateId(3);
    pub const DETECTED_STANDBY: StateId = StateId(4);
    pub const LATENT_STANDBY: StateId = StateId(5);
    pub const BOTH_DOWN: StateId = StateId(6);

    pub const ALL: [StateId; NUM_STATES] = [
        Self::BOTH_UP,
        Self::UNCOVERED_ACTIVE,
        Self::COVERED_ACTIVE,
        Self::DETECTED_STANDBY,
        Self::LATENT_STANDBY,
        Self::BOTH_DOWN,
    ];

    pub fn new(number: u8) -> Option<Self> {
        (1..=NUM_STATES as u8).contains(&number).then_some(Self(number))
    }

    /// Zero-based index for vector and matrix access.
    pub fn index(self) -> usize {
        usize::from(self.0 - 1)
    }

    pub fn from_index(index: usize) -> Option<Self> {
        u8::try_from(index + 1).ok().and_then(Self::new)
    }

    pub fn number(self) -> u8 {
        self.0
    }

    pub fn is_down(self) -> bool {
        is_down(self)
    }

    pub fn describe(self) -> &'static str {
        match self.0 {
            1 => "active and standby working",
            2 => "uncovered active failure",
            3 => "covered active failure",
            4 => "standby failure detected",
            5 => "standby failure latent",
            _ => "both units failed",
        }
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(&self.0.to_string())
    }
}

/// The system is unavailable in states 2 and 6.
pub fn is_down(s: StateId) -> bool {
    matches!(s.0, 2 | 6)
}

/// Which solver produced a steady-state vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    CtmcNumeric,
    CtmcClosed,
    SmpNumeric,
    SmpClosed,
    Simulated,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::CtmcNumeric => "ctmc-numeric",
            Source::CtmcClosed => "ctmc-closed",
            Source::SmpNumeric => "smp-numeric",
            Source::SmpClosed => "smp-closed",
            Source::Simulated => "simulated",
        }
    }

    pub fn is_analytic(self) -> bool {
        !matches!(self, Source::Simulated)
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// Long-run probability of each state, tagged with the solver that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    probs: [f64; NUM_STATES],
    source: Source,
}

impl SteadyState {
    /// Builds a steady state from nonnegative weights, normalizing them to sum to one.
    pub(crate) fn from_weights(weights: [f64; NUM_STATES], source: Source) -> Self {
        let total: f64 = weights.iter().sum();
        let probs = weights.map(|w| (w / total).clamp(0.0, 1.0));
        Self { probs, source }
    }

    /// Wraps an already normalized vector.
    pub fn new(probs: [f64; NUM_STATES], source: Source) -> Self {
        Self { probs, source }
    }

    pub fn probs(&self) -> &[f64; NUM_STATES] {
        &self.probs
    }

    pub fn prob(&self, s: StateId) -> f64 {
        self.probs[s.index()]
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Largest per-state relative difference against `other`. States where
    /// both values are exactly zero count as agreeing.
    pub fn max_rel_diff(&self, other: &SteadyState) -> f64 {
        self.probs
            .iter()
            .zip(other.probs.iter())
            .map(|(&a, &b)| rel_diff(a, b))
            .fold(0.0, f64::max)
    }
}

/// |a − b| / max(|a|, |b|), zero when both are zero.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
