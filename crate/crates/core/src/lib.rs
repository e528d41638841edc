//! Monte Carlo bound on the maximum number of concurrent links (MNCL) in a
//! MIMO ad hoc network where every link must meet an SINR floor.
//!
//! The pieces, bottom up:
//!
//! - [`scenario`]: random node placement, path loss, Rayleigh fading, noise.
//! - [`mimo`]: effective channels for receive diversity, Alamouti STBC and
//!   transmit beamforming, plus the MMSE receiver.
//! - [`power`]: the QoS power-control mapping and the iterative
//!   feasibility test (IDF) for a set of pairs.
//! - [`selection`]: backtracking search for the largest feasible set, and an
//!   exhaustive reference search.
//! - [`harness`]: seeded Monte Carlo sweeps, averaging, curve fitting and
//!   CSV/JSON reports.
//! - [`cli`]: the `mncl` command line.
//!
//! ```no_run
//! use mncl::harness::{run_trials, ExperimentConfig};
//! use mncl::mimo::Scheme;
//!
//! let cfg = ExperimentConfig {
//!     schemes: vec![Scheme::Beamforming],
//!     pairs: vec![10],
//!     antennas: vec![4],
//!     trials: 100,
//!     ..ExperimentConfig::default()
//! };
//! let run = run_trials(&cfg).unwrap();
//! println!("C(10, 4) ~ {:.2}", run.aggregates[0].mean_nmax);
//! ```

// Range checks are written as `!(x > lo)` on purpose so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod mimo;
pub mod power;
pub mod scenario;
pub mod selection;
pub mod units;

pub use error::{Error, Result};
