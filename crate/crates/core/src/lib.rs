//! Planning by stochastic variational inference over an information-seeking
//! decision model, with an occupancy-grid robot-exploration instantiation.
//!
//! The crate is `no_std` and needs only `alloc`:
//!
//! - [`prob`]: distributions, digamma, log-sum-exp, probabilistic logic and
//!   splittable random streams.
//! - [`svi`]: trace-based programs, ELBO estimation, score-function
//!   gradients and a clipped Adam optimizer.
//! - [`idiom`]: progress, information-gain, constraint and attention
//!   pseudo-probabilities, the planning program and [`idiom::make_plan`].
//! - [`explore`]: the planar exploration model (grid memory, lidar beam
//!   model, ray traversal).
//! - [`sim`]: floor-plan rasterization and the pseudo-SLAM episode loop.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod explore;
pub mod idiom;
pub mod prob;
pub mod sim;
pub mod svi;
