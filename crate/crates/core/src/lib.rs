//! Markov chain synthesis for probabilistic swarm guidance.
//!
//! A swarm of independent agents lives on a grid of bins. Each step every
//! agent samples its next bin from the column of a column-stochastic
//! matrix indexed by its current bin. This crate synthesizes those
//! matrices so that the swarm density converges to a desired distribution:
//!
//! - [`synthesis::dsmc_recurrent`] recomputes the recurrent block from the
//!   current density every step, using only neighbor information, and
//!   collapses to the identity once the target is reached;
//! - [`synthesis::metropolis_hastings`] is the time-invariant baseline;
//! - transient bins (zero desired density) drain along shortest paths.
//!
//! [`engine`] runs Monte Carlo or exact-density experiments and
//! [`analysis`] verifies the spectral contraction certificates.
//!
//! Numeric code is generic over [`Scalar`]; synthesis and propagation also
//! run on exact rationals ([`Exact`]).
//!
//! ```
//! # fn main() -> Result<(), swarm_guidance::Error> {
//! use swarm_guidance::graph::build_grid_topology;
//! use swarm_guidance::{ProbabilityVector, Synthesizer};
//!
//! let topology = build_grid_topology(2, 2, 1)?;
//! let desired = ProbabilityVector::new(vec![0.05, 0.05, 0.3, 0.6])?;
//! let synth = Synthesizer::new(topology, desired, Some(3.0))?;
//! let x = [0.65_f64, 0.35, 0.0, 0.0];
//! let m = synth.dsmc(&x)?;
//! let next = m.as_matrix().mul_vec(&x)?;
//! for (got, want) in next.iter().zip([0.25_f64, 0.15, 0.3, 0.3]) {
//!     assert!((got - want).abs() < 1e-12);
//! }
//! # Ok(())
//! # }
//! ```

pub mod analysis;
pub mod density;
pub mod engine;
mod error;
pub mod graph;
pub mod matrix;
mod scalar;
pub mod synthesis;

pub use error::{Error, Result};
pub use scalar::{sum, RealScalar, Scalar};

pub use density::{ErrorVector, ProbabilityVector};
pub use engine::{Mode, Scenario, SwarmState};
pub use graph::{LaplacianView, Partition, Topology};
pub use matrix::DenseMatrix;
pub use synthesis::{Algorithm, MarkovMatrix, SynthesisParams, Synthesizer};

/// Exact rational scalar.
pub type Exact = num_rational::Rational64;

pub type MarkovMatrix64 = MarkovMatrix<f64>;
pub type MarkovMatrix32 = MarkovMatrix<f32>;
pub type MarkovMatrixExact = MarkovMatrix<Exact>;
pub type ProbabilityVector64 = ProbabilityVector<f64>;
pub type ProbabilityVector32 = ProbabilityVector<f32>;
pub type ProbabilityVectorExact = ProbabilityVector<Exact>;
pub type Synthesizer64 = Synthesizer<f64>;
pub type LaplacianView64 = LaplacianView<f64>;
