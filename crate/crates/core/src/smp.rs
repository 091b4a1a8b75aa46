//! Exact semi-Markov model.
//!
//! A latent standby fault (state 5) is found by a diagnostic whose next run
//! is uniformly distributed on [0, T], so the holding time in state 5 is the
//! minimum of an Exp(λ) active failure and a U(0, T) diagnostic. The process
//! is solved through its embedded jump chain and the mean holding time of
//! each state: π_i = v_i h_i / Σ_j v_j h_j.

use crate::error::Result;
use crate::model::{ModelParams, Source, StateId, SteadyState, NUM_STATES};
use crate::numerics::{stationary_of_stochastic, HoldingCdf, Matrix6};

/// Survival mass left beyond the default quadrature limit for exponential tails.
const TAIL_RATE_MULTIPLE: f64 = 40.0;

/// P(X > Y) for X ~ Exp(λ), Y ~ U(0, T): the diagnostic runs before the
/// active unit fails. Equals (1 − e^{−λT}) / (λT).
pub fn exp_beats_uniform(lambda: f64, t: f64) -> f64 {
    let x = lambda * t;
    if x == 0.0 {
        return 1.0;
    }
    -(-x).exp_m1() / x
}

/// 1 − [`exp_beats_uniform`], accurate when λT is small.
pub fn uniform_loses_race(lambda: f64, t: f64) -> f64 {
    let x = lambda * t;
    if x < 0.05 {
        // Σ_{k≥1} (−x)^{k+1} ... = x/2 − x²/6 + x³/24 − ...
        let mut term = x / 2.0;
        let mut sum: f64 = 0.0;
        let mut k = 2.0;
        while term.abs() > 1e-18 * sum.abs().max(f64::MIN_POSITIVE) {
            sum += term;
            term *= -x / (k + 1.0);
            k += 1.0;
        }
        sum
    } else {
        1.0 - exp_beats_uniform(lambda, t)
    }
}

/// Holding-time law of one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SojournKind {
    Exponential { rate: f64 },
    /// min(Exp(lambda), U(0, t)).
    UniformExpRace { lambda: f64, t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SojournDescriptor {
    pub state: StateId,
    pub kind: SojournKind,
}

impl SojournDescriptor {
    /// Analytic mean holding time.
    pub fn mean(&self) -> f64 {
        match self.kind {
            SojournKind::Exponential { rate } => 1.0 / rate,
            SojournKind::UniformExpRace { lambda, t } => uniform_loses_race(lambda, t) / lambda,
        }
    }

    /// Integration limit at which the remaining survival mass is negligible.
    pub fn default_upper(&self) -> f64 {
        match self.kind {
            SojournKind::Exponential { rate } => TAIL_RATE_MULTIPLE / rate,
            SojournKind::UniformExpRace { lambda, t } => t.min(TAIL_RATE_MULTIPLE / lambda),
        }
    }
}

impl HoldingCdf for SojournDescriptor {
    fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self.kind {
            SojournKind::Exponential { rate } => -(-rate * t).exp_m1(),
            SojournKind::UniformExpRace { lambda, t: horizon } => {
                if t >= horizon {
                    1.0
                } else {
                    1.0 - (1.0 - t / horizon) * (-lambda * t).exp()
                }
            }
        }
    }

    fn survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        match self.kind {
            SojournKind::Exponential { rate } => (-rate * t).exp(),
            SojournKind::UniformExpRace { lambda, t: horizon } => {
                if t >= horizon {
                    0.0
                } else {
                    (1.0 - t / horizon) * (-lambda * t).exp()
                }
            }
        }
    }
}

/// Holding-time laws of all six states.
pub fn sojourn_descriptors(p: &ModelParams) -> [SojournDescriptor; NUM_STATES] {
    let l = p.lambda_active;
    let ls = p.lambda_standby;
    let kinds = [
        SojournKind::Exponential { rate: l + ls },
        SojournKind::Exponential { rate: p.beta + ls },
        SojournKind::Exponential { rate: ls + p.mu },
        SojournKind::Exponential { rate: l + p.mu },
        SojournKind::UniformExpRace {
            lambda: l,
            t: p.diag_interval,
        },
        SojournKind::Exponential { rate: 2.0 * p.mu },
    ];
    std::array::from_fn(|i| SojournDescriptor {
        state: StateId::ALL[i],
        kind: kinds[i],
    })
}

/// Embedded jump chain plus holding-time laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddedChain {
    pub p: Matrix6,
    pub sojourns: [SojournDescriptor; NUM_STATES],
}

impl EmbeddedChain {
    /// Probability of jumping from `from` to `to` (1-based).
    pub fn prob(&self, from: u8, to: u8) -> f64 {
        self.p[(usize::from(from) - 1, usize::from(to) - 1)]
    }
}

pub fn embedded_matrix(p: ModelParams) -> Result<EmbeddedChain> {
    let p = p.validate_for_smp()?;
    let ModelParams {
        lambda_active: l,
        lambda_standby: ls,
        mu,
        beta,
        c,
        c_s,
        diag_interval: t,
    } = p;
    let s = l + ls;
    let diag_first = exp_beats_uniform(l, t);

    let mut m = Matrix6::zeros();
    let mut set = |from: usize, to: usize, v: f64| m[(from - 1, to - 1)] = v;
    set(1, 2, l * (1.0 - c) / s);
    set(1, 3, l * c / s);
    set(1, 4, ls * c_s / s);
    set(1, 5, ls * (1.0 - c_s) / s);
    set(2, 3, beta / (beta + ls));
    set(2, 6, ls / (beta + ls));
    set(3, 1, mu / (ls + mu));
    set(3, 6, ls / (ls + mu));
    set(4, 1, mu / (l + mu));
    set(4, 6, l / (l + mu));
    set(5, 4, diag_first);
    set(5, 6, uniform_loses_race(l, t));
    set(6, 3, 0.5);
    set(6, 4, 0.5);

    Ok(EmbeddedChain {
        p: m,
        sojourns: sojourn_descriptors(&p),
    })
}

/// Mean holding time h_i of every state.
pub fn mean_sojourn_times(p: ModelParams) -> Result<[f64; NUM_STATES]> {
    let p = p.validate_for_smp()?;
    Ok(sojourn_descriptors(&p).map(|d| d.mean()))
}

/// Stationary vector of the embedded chain, v = vP.
pub fn embedded_stationary(ec: &EmbeddedChain) -> Result<[f64; NUM_STATES]> {
    stationary_of_stochastic(&ec.p)
}

/// π_i = v_i h_i / Σ_j v_j h_j with v from the numeric embedded solve.
pub fn smp_state_probabilities(p: ModelParams) -> Result<SteadyState> {
    let ec = embedded_matrix(p)?;
    let v = embedded_stationary(&ec)?;
    let h = ec.sojourns.map(|d| d.mean());
    let weights: [f64; NUM_STATES] = std::array::from_fn(|i| v[i] * h[i]);
    Ok(SteadyState::from_weights(weights, Source::SmpNumeric))
}

/// Closed-form embedded-chain ratios v_i / v_1.
///
/// v2 and v5 are one-step successors of state 1 only. The balance of
/// states 3 and 4 differs by a constant (`k`), and the balance of state 1
/// pins v4. v6 collects the (all positive) inflows into state 6.
pub fn embedded_closed_form_ratios(p: &ModelParams) -> [f64; NUM_STATES] {
    let ModelParams {
        lambda_active: l,
        lambda_standby: ls,
        mu,
        beta,
        c,
        c_s,
        diag_interval: t,
    } = *p;
    let s = l + ls;
    let q = exp_beats_uniform(l, t);

    let v2 = l * (1.0 - c) / s;
    let v5 = ls * (1.0 - c_s) / s;
    let k = (ls * c_s + q * ls * (1.0 - c_s) - l * c - l * (1.0 - c) * beta / (beta + ls)) / s;
    let v4 = (l + mu) / (l + ls + 2.0 * mu) * ((ls + mu) / mu + k);
    let v3 = v4 - k;
    let v6 = ls / (beta + ls) * v2
        + ls / (ls + mu) * v3
        + l / (l + mu) * v4
        + uniform_loses_race(l, t) * v5;
    [1.0, v2, v3, v4, v5, v6]
}

/// Closed-form semi-Markov state probabilities: π1 = h1 / Σ (v_i/v_1) h_i,
/// then π_i = (v_i/v_1) h_i · π1 / h1.
pub fn smp_state_probabilities_closed_form(p: ModelParams) -> Result<SteadyState> {
    let p = p.validate_for_smp()?;
    Ok(smp_probs_from_embedded_ratios(&p, embedded_closed_form_ratios(&p)))
}

/// Combines embedded-chain ratios v_i / v_1 with the mean holding times.
pub fn smp_probs_from_embedded_ratios(p: &ModelParams, ratios: [f64; NUM_STATES]) -> SteadyState {
    let h = sojourn_descriptors(p).map(|d| d.mean());
    let denom: f64 = ratios.iter().zip(h.iter()).map(|(r, hi)| r * hi).sum();
    let pi1 = h[0] / denom;
    let probs: [f64; NUM_STATES] =
        std::array::from_fn(|i| (ratios[i] * h[i] * pi1 / h[0]).max(0.0));
    SteadyState::from_weights(probs, Source::SmpClosed)
}
