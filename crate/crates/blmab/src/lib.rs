//! Simulation toolkit for bandits whose arm pool balloons over time: at most
//! one new arm appears per round, and regret is charged against the best arm
//! that has *arrived*, not a fixed optimum.
//!
//! The centerpiece policy admits only the first `ceil(alpha * T)` arriving
//! arms and plays a horizon-aware index over them, with the exploration
//! fraction `alpha` derived from an assumed arrival tail of the best arm
//! (Lambert-W form for exponential tails, a power of `T` for power-law
//! tails). Baselines (all-arms MOSS, UCB1, Thompson sampling), Monte-Carlo
//! regret sweeps, regret-exponent fitting, arrival-bound audits, and
//! tail-parameter learning round out the toolkit; the `blmab` binary in the
//! companion CLI crate drives it all from config files.
//!
//! Everything random is reproducible: one master seed fans out through a
//! fixed mixing function ([`seeding::split_seed`]), so identical
//! configurations give bit-identical results at any thread count.

pub mod analysis;
pub mod arrivals;
pub mod engine;
pub mod error;
pub mod estimation;
pub mod lambertw;
pub mod policies;
pub mod seeding;

pub use error::{Error, Result};
