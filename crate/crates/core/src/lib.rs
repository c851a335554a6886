//! Linear search for an escaping target whose speed is unknown.
//!
//! A robot starts at the origin of a line; a target starts at distance `d`
//! on one side and flees at speed `v < 1`. With evasiveness `u = 1/(1 − v)`
//! the offline optimum catches it at time `u·d`. Zigzag strategies guess a
//! growing sequence of evasiveness values `u_i` and turn just far enough out
//! to catch each guess.
//!
//! * [`numerics`]: extended-precision [`Real`] and its log₂ companion.
//! * [`engine`]: round ledgers, catch times and competitive ratios.
//! * [`catalog`]: the known- and unknown-distance schedules and custom sequences.
//! * [`oracle`]: catch times by exact intersection of piecewise-linear paths.
//! * [`verify`]: numerical certification of the upper and lower bounds.
//! * [`experiment`]: sweeps and analytic/oracle comparisons.
//!
//! ```
//! use lsl::{catalog::algorithm1, numerics::Real};
//!
//! let p = 256;
//! let alg = algorithm1(&Real::one(p)).unwrap();
//! let cr = alg.competitive_ratio(&Real::from_u64(3, p), &Real::one(p), 24).unwrap();
//! assert_eq!(cr, Real::from_u64(9, p));
//! ```

pub mod catalog;
pub mod engine;
pub mod experiment;
pub mod numerics;
pub mod oracle;
pub mod verify;

pub use catalog::{algorithm1, algorithm2, custom_sequence, CatalogEntry};
pub use engine::{compute_rounds, RoundLedger, Side, Target, ZigzagSpec};
pub use numerics::{Log2Real, Real};
pub use oracle::{intersect, Trajectory};
