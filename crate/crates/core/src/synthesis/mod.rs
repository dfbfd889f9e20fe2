//! Markov matrix synthesis.
//!
//! A full matrix is assembled from three blocks under the partition
//! ordering: transient-to-transient moves (`M1`), transient-to-recurrent
//! moves (`M2`) and the recurrent block (`M3`). The recurrent block comes
//! either from the state-dependent DSMC rule, recomputed from the current
//! density every step, or from a fixed Metropolis-Hastings chain.

mod dsmc;
mod metropolis;
mod transient;
mod validate;

pub use dsmc::{dsmc_column, dsmc_recurrent, NeighborReport};
pub use metropolis::{metropolis_hastings, metropolis_hastings_recurrent};
pub use transient::{assemble, transient_matrix, TransientBlocks};
pub use validate::{validate_markov, ValidationReport};

use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use crate::density::ProbabilityVector;
use crate::error::{Error, Result};
use crate::graph::{laplacian_of, partition_states, LaplacianView, Partition, Topology};
use crate::matrix::DenseMatrix;
use crate::scalar::{sum, Scalar};

/// Column-stochastic transition matrix: `entry(i, j)` is the probability of
/// moving from bin `j` to bin `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovMatrix<T>(DenseMatrix<T>);

impl<T: Scalar> MarkovMatrix<T> {
    /// Checks squareness, non-negativity and unit column sums.
    pub fn new(matrix: DenseMatrix<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidMatrix(format!("{}x{} matrix is not square", matrix.rows(), matrix.cols())));
        }
        for j in 0..matrix.cols() {
            let column = matrix.column(j);
            if let Some(i) = column.iter().position(|&v| v < T::zero()) {
                return Err(Error::InvalidMatrix(format!("negative entry at ({}, {})", i + 1, j + 1)));
            }
            let total = sum(column);
            if (total - T::one()).abs() > T::tolerance() {
                return Err(Error::InvalidMatrix(format!("column {} sums to {total}", j + 1)));
            }
        }
        Ok(Self(matrix))
    }

    pub fn identity(m: usize) -> Self {
        Self(DenseMatrix::identity(m))
    }

    pub(crate) fn from_trusted(matrix: DenseMatrix<T>) -> Self {
        Self(matrix)
    }

    pub fn bins(&self) -> usize {
        self.0.rows()
    }

    /// Transition law out of bin `j`.
    pub fn column(&self, j: usize) -> &[T] {
        self.0.column(j)
    }

    pub fn as_matrix(&self) -> &DenseMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> DenseMatrix<T> {
        self.0
    }

    /// Expected fraction of the mass `x` that changes bin in one step.
    pub fn expected_transition_fraction(&self, x: &[T]) -> T {
        x.iter().enumerate().fold(T::zero(), |acc, (j, &xj)| acc + xj * (T::one() - self.0[(j, j)]))
    }
}

impl<T> Index<(usize, usize)> for MarkovMatrix<T> {
    type Output = T;

    fn index(&self, idx: (usize, usize)) -> &T {
        &self.0[idx]
    }
}

/// Diffusion divisor for DSMC flows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisParams<T> {
    pub d_chsn: T,
}

impl<T: Scalar> SynthesisParams<T> {
    /// Rejects divisors that do not strictly exceed `max_degree`.
    pub fn new(d_chsn: T, max_degree: usize) -> Result<Self> {
        if d_chsn <= T::from_count(max_degree) {
            return Err(Error::InadmissibleDivisor { d_chsn: d_chsn.to_f64_lossy(), max_degree });
        }
        Ok(Self { d_chsn })
    }
}

/// Smallest integer divisor strictly above the maximum degree.
pub fn choose_d_chsn<T: Scalar>(recurrent_graph: &LaplacianView<T>) -> SynthesisParams<T> {
    SynthesisParams { d_chsn: T::from_count(recurrent_graph.max_degree + 1) }
}

/// Recurrent-block synthesis rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Dsmc,
    MetropolisHastings,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Dsmc => "dsmc",
            Algorithm::MetropolisHastings => "mh",
        }
    }

    /// Whether the matrix depends on the current density.
    pub fn is_state_dependent(self) -> bool {
        matches!(self, Algorithm::Dsmc)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dsmc" => Ok(Algorithm::Dsmc),
            "mh" | "metropolis-hastings" => Ok(Algorithm::MetropolisHastings),
            other => Err(Error::InvalidScenario(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// Precomputed state for synthesizing full matrices on one topology and
/// target: partition, recurrent subgraph, divisor and transient blocks.
#[derive(Debug, Clone)]
pub struct Synthesizer<T> {
    topology: Topology,
    desired: ProbabilityVector<T>,
    partition: Partition,
    recurrent_topology: Topology,
    recurrent_graph: LaplacianView<T>,
    params: SynthesisParams<T>,
    transient: TransientBlocks<T>,
}

impl<T: Scalar> Synthesizer<T> {
    /// `d_chsn = None` selects [`choose_d_chsn`].
    pub fn new(topology: Topology, desired: ProbabilityVector<T>, d_chsn: Option<T>) -> Result<Self> {
        let partition = partition_states(&topology, &desired)?;
        let recurrent_graph: LaplacianView<T> = laplacian_of(&topology, &partition.recurrent)?;
        let params = match d_chsn {
            Some(d) => SynthesisParams::new(d, recurrent_graph.max_degree)?,
            None => choose_d_chsn(&recurrent_graph),
        };
        let recurrent_topology = topology.induced(&partition.recurrent)?;
        let transient = transient_matrix(&partition, &topology)?;
        Ok(Self { topology, desired, partition, recurrent_topology, recurrent_graph, params, transient })
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn desired(&self) -> &ProbabilityVector<T> {
        &self.desired
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn params(&self) -> SynthesisParams<T> {
        self.params
    }

    pub fn recurrent_graph(&self) -> &LaplacianView<T> {
        &self.recurrent_graph
    }

    pub fn transient_blocks(&self) -> &TransientBlocks<T> {
        &self.transient
    }

    /// Full DSMC matrix for the current density `x` (length `m`).
    pub fn dsmc(&self, x: &[T]) -> Result<MarkovMatrix<T>> {
        if x.len() != self.topology.bins() {
            return Err(Error::LengthMismatch { expected: self.topology.bins(), found: x.len() });
        }
        let recurrent = &self.partition.recurrent;
        let current_r: Vec<T> = recurrent.iter().map(|&b| x[b]).collect();
        let desired_r = self.desired.restrict(recurrent);
        let m3 = dsmc_recurrent(&current_r, &desired_r, &self.recurrent_topology, self.params)?;
        assemble(&self.transient, m3.as_matrix(), &self.partition)
    }

    /// Full Metropolis-Hastings matrix; independent of the density.
    pub fn metropolis_hastings(&self) -> Result<MarkovMatrix<T>> {
        let desired_r = self.desired.restrict(&self.partition.recurrent);
        let m3 = metropolis_hastings_recurrent(&desired_r, &self.recurrent_topology)?;
        assemble(&self.transient, m3.as_matrix(), &self.partition)
    }

    pub fn synthesize(&self, algorithm: Algorithm, x: &[T]) -> Result<MarkovMatrix<T>> {
        match algorithm {
            Algorithm::Dsmc => self.dsmc(x),
            Algorithm::MetropolisHastings => self.metropolis_hastings(),
        }
    }
}
