//! Continuous-time Markov chain approximation of the cluster.
//!
//! The wait until the next diagnostic (uniform on [0, T] in the exact model)
//! is replaced by an exponential with mean T/2, so every holding time is
//! exponential and the model is a plain CTMC.

use crate::error::Result;
use crate::model::{ModelParams, Source, SteadyState, NUM_STATES};
use crate::numerics::{stationary_of_generator, Matrix6};

/// Directed edges (1-based) with nonzero rate in the generator.
pub const EDGES: [(u8, u8); 14] = [
    (1, 2),
    (1, 3),
    (1, 4),
    (1, 5),
    (2, 3),
    (2, 6),
    (3, 1),
    (3, 6),
    (4, 1),
    (4, 6),
    (5, 4),
    (5, 6),
    (6, 3),
    (6, 4),
];

/// Infinitesimal generator of the approximate CTMC.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorMatrix {
    q: Matrix6,
    params: ModelParams,
}

impl GeneratorMatrix {
    pub fn q(&self) -> &Matrix6 {
        &self.q
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Rate from state `from` to state `to` (1-based state numbers).
    pub fn rate(&self, from: u8, to: u8) -> f64 {
        self.q[(usize::from(from) - 1, usize::from(to) - 1)]
    }

    /// ‖πQ‖∞ for a candidate distribution.
    pub fn balance_residual(&self, pi: &[f64; NUM_STATES]) -> f64 {
        self.q.vec_mul(pi).iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub fn build_generator(p: ModelParams) -> Result<GeneratorMatrix> {
    let p = p.validate()?;
    let ModelParams {
        lambda_active: l,
        lambda_standby: ls,
        mu,
        beta,
        c,
        c_s,
        ..
    } = p;
    let mut q = Matrix6::zeros();
    let mut set = |from: usize, to: usize, rate: f64| q[(from - 1, to - 1)] = rate;
    set(1, 2, l * (1.0 - c));
    set(1, 3, l * c);
    set(1, 4, ls * c_s);
    set(1, 5, ls * (1.0 - c_s));
    set(2, 3, beta);
    set(2, 6, ls);
    set(3, 1, mu);
    set(3, 6, ls);
    set(4, 1, mu);
    set(4, 6, l);
    set(5, 4, p.diag_rate());
    set(5, 6, l);
    set(6, 3, mu);
    set(6, 4, mu);
    for i in 0..NUM_STATES {
        let out: f64 = (0..NUM_STATES).filter(|&j| j != i).map(|j| q[(i, j)]).sum();
        q[(i, i)] = -out;
    }
    Ok(GeneratorMatrix { q, params: p })
}

/// Solves πQ = 0, Σπ = 1 by Gaussian elimination.
pub fn ctmc_steady_state_numeric(g: &GeneratorMatrix) -> Result<SteadyState> {
    let pi = stationary_of_generator(g.q())?;
    Ok(SteadyState::from_weights(pi, Source::CtmcNumeric))
}

/// Ratios P_i / P_1 of the closed-form CTMC solution.
///
/// States 2 and 5 each have a single entry and exit pattern, so their
/// ratios follow from their own balance equations. Eliminating P3 between
/// the balances of states 1, 3 and 4 gives P4; P3 and P6 then follow.
pub fn ctmc_closed_form_ratios(p: &ModelParams) -> [f64; NUM_STATES] {
    let ModelParams {
        lambda_active: l,
        lambda_standby: ls,
        mu,
        beta,
        c,
        c_s,
        ..
    } = *p;
    let d = p.diag_rate();

    let r2 = l * (1.0 - c) / (ls + beta);
    let r5 = ls * (1.0 - c_s) / (d + l);
    // net flow imbalance between states 4 and 3 per unit P1
    let k = ls * c_s + ls * (1.0 - c_s) * d / (d + l) - l * c - l * (1.0 - c) * beta / (ls + beta);
    let total_exit = l * (1.0 - c) + l * c + ls * c_s + ls * (1.0 - c_s);
    let denom = mu * (mu + l) / (mu + ls) + mu;
    let r4 = (total_exit + mu / (mu + ls) * k) / denom;
    let r3 = (mu + l) / (mu + ls) * r4 - k / (mu + ls);
    // state-6 balance: every inflow term is positive, so no cancellation for
    // the tiny both-failed probability
    let r6 = (ls * (r2 + r3) + l * (r4 + r5)) / (2.0 * mu);
    [1.0, r2, r3, r4, r5, r6]
}

/// Closed-form steady state: P1 from normalization of the ratios, then P2..P6.
pub fn ctmc_steady_state_closed_form(p: ModelParams) -> Result<SteadyState> {
    let p = p.validate()?;
    let ratios = ctmc_closed_form_ratios(&p);
    let p1 = 1.0 / ratios.iter().sum::<f64>();
    let probs = ratios.map(|r| (r * p1).max(0.0));
    Ok(SteadyState::from_weights(probs, Source::CtmcClosed))
}
