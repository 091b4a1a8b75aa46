//! Steady-state availability of a two-node active/standby cluster.
//!
//! Two models of the same six-state system are provided:
//!
//! * [`ctmc`]: the continuous-time Markov approximation, where the wait for
//!   the next standby diagnostic is exponential with mean T/2.
//! * [`smp`]: the exact semi-Markov model, where that wait is uniform on
//!   [0, T].
//!
//! Each model has a numeric solver and a closed-form solver. The
//! [`montecarlo`] simulator is an independent statistical check on both, and
//! [`metrics`] turns steady states into availability and downtime figures.
//!
//! ```
//! use haavail_core::{metrics, ModelParams};
//!
//! let report = metrics::solve_smp(ModelParams::baseline()).unwrap();
//! assert!(report.availability > 0.9999);
//! ```

pub mod ctmc;
pub mod error;
pub mod metrics;
pub mod model;
pub mod montecarlo;
pub mod numerics;
pub mod smp;

pub use error::{ModelError, Result};
pub use model::{is_down, validate_params, ModelParams, Source, StateId, SteadyState, NUM_STATES};
pub use numerics::{Matrix6, SquareMatrix};
