//! Discrete-event simulation of the cluster, used as an independent check on
//! the analytic solvers.
//!
//! Two diagnostic semantics are supported. [`SimMode::SmpSemantics`] draws
//! the wait for the next diagnostic from U(0, T) each time a latent fault
//! appears, which is exactly the semi-Markov model. [`SimMode::PeriodicClock`]
//! runs diagnostics at absolute times T, 2T, 3T, ..., the system the
//! semi-Markov model itself approximates.
//!
//! Random numbers come from ChaCha8 seeded with the configured seed; each
//! replication uses its own stream (the replication index), so replications
//! can run in parallel and still merge deterministically.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{ModelError, Result};
use crate::model::{ModelParams, StateId, NUM_STATES};

/// Name of the generator recorded in simulation metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.9), stream = replication index";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SimMode {
    SmpSemantics,
    PeriodicClock,
}

impl SimMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SimMode::SmpSemantics => "smp-semantics",
            SimMode::PeriodicClock => "periodic-clock",
        }
    }
}

impl fmt::Display for SimMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub params: ModelParams,
    /// Observed hours per replication, after the discarded first sojourn.
    pub horizon: f64,
    /// Optional cap on observed transitions per replication.
    pub max_transitions: Option<u64>,
    pub seed: u64,
    pub mode: SimMode,
    pub replications: u32,
}

impl SimConfig {
    pub fn new(params: ModelParams, horizon: f64, replications: u32, seed: u64) -> Self {
        Self {
            params,
            horizon,
            max_transitions: None,
            seed,
            mode: SimMode::SmpSemantics,
            replications,
        }
    }

    pub fn with_mode(self, mode: SimMode) -> Self {
        Self { mode, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(ModelError::InvalidSimConfig(
                "horizon must be positive and finite".into(),
            ));
        }
        if self.replications == 0 {
            return Err(ModelError::InvalidSimConfig(
                "replications must be at least 1".into(),
            ));
        }
        if self.max_transitions == Some(0) {
            return Err(ModelError::InvalidSimConfig(
                "transition budget must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Mean with a 95% Student-t confidence half-width across replications.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub half_width: f64,
}

impl Estimate {
    pub fn lower(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.half_width
    }

    pub fn contains(&self, value: f64) -> bool {
        (value - self.mean).abs() <= self.half_width
    }
}

/// Outcome of one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct Replication {
    pub occupancy: [f64; NUM_STATES],
    pub time_in_state: [f64; NUM_STATES],
    pub transitions: [[u64; NUM_STATES]; NUM_STATES],
    pub observed_time: f64,
}

impl Replication {
    pub fn availability(&self) -> f64 {
        1.0 - (self.occupancy[1] + self.occupancy[5])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    /// Mean per-replication time fraction in each state.
    pub occupancy: [f64; NUM_STATES],
    pub availability: Estimate,
    /// Observed jump counts, `transitions[from][to]`, summed over replications.
    pub transitions: [[u64; NUM_STATES]; NUM_STATES],
    pub replications: Vec<Replication>,
    pub mode: SimMode,
    pub seed: u64,
    pub horizon: f64,
}

impl SimResult {
    pub fn total_transitions(&self) -> u64 {
        self.transitions.iter().flatten().sum()
    }
}

/// One jump of the trajectory. `holding` is infinite when no edge out of
/// the state has positive rate; `next` is then the current state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub next: StateId,
    pub holding: f64,
}

/// Exp(rate) by inversion with u in (0, 1]. Rate zero never fires.
fn sample_exp<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    if rate <= 0.0 {
        return f64::INFINITY;
    }
    let u: f64 = 1.0 - rng.random::<f64>();
    -u.ln() / rate
}

fn race<R: Rng + ?Sized>(rng: &mut R, current: StateId, edges: [(StateId, f64); 2]) -> Step {
    let a = sample_exp(rng, edges[0].1);
    let b = sample_exp(rng, edges[1].1);
    match (a.is_finite(), b.is_finite()) {
        (false, false) => Step {
            next: current,
            holding: f64::INFINITY,
        },
        _ if a <= b => Step {
            next: edges[0].0,
            holding: a,
        },
        _ => Step {
            next: edges[1].0,
            holding: b,
        },
    }
}

/// Samples the next jump under semi-Markov semantics.
pub fn step<R: Rng + ?Sized>(p: &ModelParams, current: StateId, rng: &mut R) -> Step {
    step_with_diagnostic(p, current, rng, |rng| p.diag_interval * rng.random::<f64>())
}

/// Samples the next jump with diagnostics on an absolute clock, `now` being
/// the time the current state was entered.
pub fn step_periodic<R: Rng + ?Sized>(
    p: &ModelParams,
    current: StateId,
    now: f64,
    rng: &mut R,
) -> Step {
    let period = p.diag_interval;
    let next_tick = ((now / period).floor() + 1.0) * period;
    let wait = (next_tick - now).max(0.0);
    step_with_diagnostic(p, current, rng, |_| wait)
}

fn step_with_diagnostic<R, F>(p: &ModelParams, current: StateId, rng: &mut R, diag_wait: F) -> Step
where
    R: Rng + ?Sized,
    F: FnOnce(&mut R) -> f64,
{
    let l = p.lambda_active;
    let ls = p.lambda_standby;
    match current.number() {
        1 => {
            let active = sample_exp(rng, l);
            let standby = sample_exp(rng, ls);
            if !active.is_finite() && !standby.is_finite() {
                return Step {
                    next: current,
                    holding: f64::INFINITY,
                };
            }
            if active <= standby {
                let covered = rng.random::<f64>() < p.c;
                Step {
                    next: if covered {
                        StateId::COVERED_ACTIVE
                    } else {
                        StateId::UNCOVERED_ACTIVE
                    },
                    holding: active,
                }
            } else {
                let detected = rng.random::<f64>() < p.c_s;
                Step {
                    next: if detected {
                        StateId::DETECTED_STANDBY
                    } else {
                        StateId::LATENT_STANDBY
                    },
                    holding: standby,
                }
            }
        }
        2 => race(
            rng,
            current,
            [(StateId::COVERED_ACTIVE, p.beta), (StateId::BOTH_DOWN, ls)],
        ),
        3 => race(
            rng,
            current,
            [(StateId::BOTH_UP, p.mu), (StateId::BOTH_DOWN, ls)],
        ),
        4 => race(
            rng,
            current,
            [(StateId::BOTH_UP, p.mu), (StateId::BOTH_DOWN, l)],
        ),
        5 => {
            let failure = sample_exp(rng, l);
            let diagnostic = diag_wait(rng);
            if diagnostic < failure {
                Step {
                    next: StateId::DETECTED_STANDBY,
                    holding: diagnostic,
                }
            } else {
                Step {
                    next: StateId::BOTH_DOWN,
                    holding: failure,
                }
            }
        }
        _ => race(
            rng,
            current,
            [
                (StateId::COVERED_ACTIVE, p.mu),
                (StateId::DETECTED_STANDBY, p.mu),
            ],
        ),
    }
}

fn replication_rng(seed: u64, index: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(index));
    rng
}

fn run_replication(cfg: &SimConfig, index: u32) -> Replication {
    let p = &cfg.params;
    let mut rng = replication_rng(cfg.seed, index);
    let next_step = |state: StateId, now: f64, rng: &mut ChaCha8Rng| match cfg.mode {
        SimMode::SmpSemantics => step(p, state, rng),
        SimMode::PeriodicClock => step_periodic(p, state, now, rng),
    };

    // the first sojourn in state 1 is not recorded
    let mut state = StateId::BOTH_UP;
    let first = next_step(state, 0.0, &mut rng);
    let mut now = first.holding;
    let mut time_in_state = [0.0; NUM_STATES];
    let mut transitions = [[0u64; NUM_STATES]; NUM_STATES];
    if first.holding.is_finite() {
        state = first.next;
    } else {
        now = 0.0;
    }
    let start = now;
    let end = start + cfg.horizon;
    let budget = cfg.max_transitions.unwrap_or(u64::MAX);
    let mut jumps = 0u64;

    while now < end && jumps < budget {
        let s = next_step(state, now, &mut rng);
        let leave = now + s.holding;
        if leave >= end || !s.holding.is_finite() {
            time_in_state[state.index()] += end - now;
            break;
        }
        time_in_state[state.index()] += s.holding;
        transitions[state.index()][s.next.index()] += 1;
        jumps += 1;
        now = leave;
        state = s.next;
    }

    let observed_time: f64 = time_in_state.iter().sum();
    let occupancy = time_in_state.map(|t| t / observed_time);
    Replication {
        occupancy,
        time_in_state,
        transitions,
        observed_time,
    }
}

/// Two-sided 95% Student-t quantile with `df` degrees of freedom.
pub fn t_quantile_975(df: u32) -> f64 {
    StudentsT::new(0.0, 1.0, f64::from(df))
        .map(|t| t.inverse_cdf(0.975))
        .unwrap_or(f64::INFINITY)
}

/// Runs all replications and aggregates them in replication order.
pub fn simulate(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let reps: Vec<Replication> = (0..cfg.replications)
        .into_par_iter()
        .map(|i| run_replication(cfg, i))
        .collect();

    let n = reps.len() as f64;
    let mut occupancy = [0.0; NUM_STATES];
    let mut transitions = [[0u64; NUM_STATES]; NUM_STATES];
    for r in &reps {
        for i in 0..NUM_STATES {
            occupancy[i] += r.occupancy[i] / n;
            for j in 0..NUM_STATES {
                transitions[i][j] += r.transitions[i][j];
            }
        }
    }
    let total: f64 = occupancy.iter().sum();
    let occupancy = occupancy.map(|x| x / total);

    let mean = 1.0 - (occupancy[1] + occupancy[5]);
    let half_width = if reps.len() < 2 {
        f64::INFINITY
    } else {
        let var = reps
            .iter()
            .map(|r| (r.availability() - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        t_quantile_975(cfg.replications - 1) * (var / n).sqrt()
    };

    Ok(SimResult {
        occupancy,
        availability: Estimate { mean, half_width },
        transitions,
        replications: reps,
        mode: cfg.mode,
        seed: cfg.seed,
        horizon: cfg.horizon,
    })
}

/// [`simulate`] with diagnostics on the absolute clock T, 2T, 3T, ...
pub fn simulate_periodic(cfg: &SimConfig) -> Result<SimResult> {
    simulate(&cfg.with_mode(SimMode::PeriodicClock))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smp::exp_beats_uniform;

    fn baseline() -> ModelParams {
        ModelParams::baseline()
    }

    #[test]
    fn both_down_splits_evenly() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let to3 = (0..n)
            .filter(|_| step(&baseline(), StateId::BOTH_DOWN, &mut rng).next == StateId::COVERED_ACTIVE)
            .count();
        let freq = to3 as f64 / n as f64;
        assert!((freq - 0.5).abs() < 0.01, "{freq}");
    }

    #[test]
    fn latent_fault_race_frequency() {
        let p = ModelParams {
            lambda_active: 1.0,
            diag_interval: 1.0,
            ..baseline()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let to4 = (0..n)
            .filter(|_| step(&p, StateId::LATENT_STANDBY, &mut rng).next == StateId::DETECTED_STANDBY)
            .count();
        let freq = to4 as f64 / n as f64;
        assert!((freq - exp_beats_uniform(1.0, 1.0)).abs() < 0.005, "{freq}");
    }

    #[test]
    fn reboot_only_edge() {
        let p = ModelParams {
            lambda_standby: 0.0,
            ..baseline()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            assert_eq!(
                step(&p, StateId::UNCOVERED_ACTIVE, &mut rng).next,
                StateId::COVERED_ACTIVE
            );
        }
    }

    #[test]
    fn periodic_tick_waits_for_clock() {
        let p = ModelParams {
            lambda_active: 1e-12,
            diag_interval: 10.0,
            ..baseline()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = step_periodic(&p, StateId::LATENT_STANDBY, 23.0, &mut rng);
        assert_eq!(s.next, StateId::DETECTED_STANDBY);
        assert!((s.holding - 7.0).abs() < 1e-12);
        let s = step_periodic(&p, StateId::LATENT_STANDBY, 30.0, &mut rng);
        assert!((s.holding - 10.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = SimConfig::new(baseline(), 0.0, 1, 0);
        assert!(simulate(&cfg).is_err());
        cfg.horizon = 10.0;
        cfg.replications = 0;
        assert!(simulate(&cfg).is_err());
    }

    #[test]
    fn occupancy_is_normalized_and_deterministic() {
        let cfg = SimConfig::new(baseline(), 1e5, 4, 99);
        let a = simulate(&cfg).unwrap();
        let b = simulate(&cfg).unwrap();
        assert_eq!(a, b);
        assert!((a.occupancy.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        assert_eq!(
            a.availability.mean,
            1.0 - (a.occupancy[1] + a.occupancy[5])
        );
        for r in &a.replications {
            assert!((r.observed_time - 1e5).abs() < 1e-6);
        }
    }

    #[test]
    fn transition_budget_stops_early() {
        let mut cfg = SimConfig::new(baseline(), 1e9, 2, 1);
        cfg.max_transitions = Some(50);
        let r = simulate(&cfg).unwrap();
        assert_eq!(r.total_transitions(), 100);
        assert!(r.replications.iter().all(|x| x.observed_time < 1e9));
    }

    #[test]
    fn no_failures_means_always_up() {
        let p = ModelParams {
            lambda_active: 1e-9,
            lambda_standby: 2.5e-10,
            ..baseline()
        };
        let r = simulate(&SimConfig::new(p, 1e5, 3, 2)).unwrap();
        assert!(r.occupancy[0] >= 1.0 - 1e-3);
    }

    #[test]
    fn t_quantiles() {
        assert!((t_quantile_975(9) - 2.262_157_162_8).abs() < 1e-6);
        let big = t_quantile_975(30);
        assert!((big - 2.042_272_456).abs() < 1e-6, "{big}");
    }
}
