use super::{assemble, transient_matrix, MarkovMatrix};
use crate::density::ProbabilityVector;
use crate::error::{Error, Result};
use crate::graph::{Partition, Topology};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

/// Metropolis-Hastings chain on the recurrent bins with `desired` as its
/// stationary distribution.
///
/// Proposal: uniform over the neighbors of the current bin. Acceptance of a
/// move `j → i`: `min(1, v[i]·deg(j) / (v[j]·deg(i)))`. Rejected mass stays
/// on the diagonal.
pub fn metropolis_hastings_recurrent<T: Scalar>(desired: &[T], adjacency: &Topology) -> Result<MarkovMatrix<T>> {
    let m = adjacency.bins();
    if desired.len() != m {
        return Err(Error::LengthMismatch { expected: m, found: desired.len() });
    }
    if let Some(i) = desired.iter().position(|&v| v <= T::zero()) {
        return Err(Error::NonPositiveDesired(i + 1));
    }
    let mut out = DenseMatrix::zeros(m, m);
    for j in 0..m {
        let deg_j = T::from_count(adjacency.degree(j));
        let mut moved = T::zero();
        for &i in adjacency.neighbors(j) {
            let deg_i = T::from_count(adjacency.degree(i));
            let acceptance = ((desired[i] * deg_j) / (desired[j] * deg_i)).min_of(T::one());
            let p = acceptance / deg_j;
            out[(i, j)] = p;
            moved = moved + p;
        }
        // full acceptance can round the remainder a hair below zero
        out[(j, j)] = (T::one() - moved).max_of(T::zero());
    }
    Ok(MarkovMatrix::from_trusted(out))
}

/// Full Metropolis-Hastings matrix; transient columns follow the
/// shortest-path rule.
pub fn metropolis_hastings<T: Scalar>(
    desired: &ProbabilityVector<T>,
    topology: &Topology,
    partition: &Partition,
) -> Result<MarkovMatrix<T>> {
    if desired.len() != topology.bins() {
        return Err(Error::LengthMismatch { expected: topology.bins(), found: desired.len() });
    }
    let recurrent_topology = topology.induced(&partition.recurrent)?;
    let desired_r = desired.restrict(&partition.recurrent);
    if let Some(pos) = desired_r.iter().position(|&v| v <= T::zero()) {
        return Err(Error::NonPositiveDesired(partition.recurrent[pos] + 1));
    }
    let m3 = metropolis_hastings_recurrent(&desired_r, &recurrent_topology)?;
    let blocks = transient_matrix(partition, topology)?;
    assemble(&blocks, m3.as_matrix(), partition)
}
