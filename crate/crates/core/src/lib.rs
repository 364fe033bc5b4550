//! Closed-form evaluation of rational-shifted Mengoli series
//! `sum_{n>=1} 1/prod_i (n + q_i)`, with brute-force oracles and the
//! `w -> infinity` constructions that recover `zeta(2)` and `zeta(4)`.

pub mod digamma;
pub mod error;
pub mod hp;
pub mod limits;
pub mod multifactor;
pub mod oracle;
pub mod pairsum;
pub mod rational;
pub mod report;
pub mod sample;

pub use error::{Error, Result};
pub use hp::RealHP;
pub use limits::{richardson, zeta2_term, zeta4_term, LimitEstimate, ZetaTarget};
pub use multifactor::{multi_sum, zeta4_closed_form};
pub use pairsum::{pair_sum, EvalResult, Method};
pub use rational::{ProductSeriesSpec, Rational, ShiftDecomposition, DEFAULT_PRECISION_BITS};
