use super::{MarkovMatrix, SynthesisParams};
use crate::density::error_from_slices;
use crate::error::{Error, Result};
use crate::graph::Topology;
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

/// State-dependent recurrent block `M3`.
///
/// Pipeline, column by column over recurrent bins:
/// 1. error `e = desired − current`;
/// 2. flow demand `T[i,j] = max(0, (e[i] − e[j]) / d_chsn)` for adjacent `i ≠ j`;
/// 3. rate `R[i,j] = T[i,j] / current[j]`, or 0 for an empty bin;
/// 4. diagonal `R[j,j] = 1 − Σ_{i≠j} R[i,j]` when that sum is below one, else 0;
/// 5. every column divided by its sum.
///
/// `current` may carry less than unit mass while transient bins still hold
/// agents; only non-negativity is required.
pub fn dsmc_recurrent<T: Scalar>(
    current: &[T],
    desired: &[T],
    adjacency: &Topology,
    params: SynthesisParams<T>,
) -> Result<MarkovMatrix<T>> {
    let m = adjacency.bins();
    if current.len() != m {
        return Err(Error::LengthMismatch { expected: m, found: current.len() });
    }
    if desired.len() != m {
        return Err(Error::LengthMismatch { expected: m, found: desired.len() });
    }
    if let Some(i) = desired.iter().position(|&v| v <= T::zero()) {
        return Err(Error::NonPositiveDesired(i + 1));
    }
    if let Some(index) = current.iter().position(|&x| x < T::zero()) {
        return Err(Error::NegativeEntry { index });
    }
    let max_degree = (0..m).map(|i| adjacency.degree(i)).max().unwrap_or(0);
    SynthesisParams::new(params.d_chsn, max_degree)?;

    let e = error_from_slices(desired, current)?;
    let e = e.as_slice();

    let demand = DenseMatrix::from_fn(m, m, |i, j| {
        if i != j && adjacency.allows(j, i) {
            ((e[i] - e[j]) / params.d_chsn).max_of(T::zero())
        } else {
            T::zero()
        }
    });

    let mut rates =
        DenseMatrix::from_fn(m, m, |i, j| if current[j] > T::zero() { demand[(i, j)] / current[j] } else { T::zero() });

    for j in 0..m {
        let off_diagonal = (0..m).filter(|&i| i != j).fold(T::zero(), |acc, i| acc + rates[(i, j)]);
        rates[(j, j)] = if off_diagonal < T::one() { T::one() - off_diagonal } else { T::zero() };
    }

    for j in 0..m {
        let column = rates.column_mut(j);
        let total = column.iter().fold(T::zero(), |acc, &r| acc + r);
        for r in column.iter_mut() {
            *r = *r / total;
        }
    }
    Ok(MarkovMatrix::from_trusted(rates))
}

/// Density and desired value reported by a neighboring bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborReport<T> {
    pub bin: usize,
    pub density: T,
    pub desired: T,
}

/// One DSMC column computed from a bin's own data and its neighbors'
/// reports only.
///
/// Returns `(bin, probability)` pairs for the bin itself and every listed
/// neighbor, ascending by bin. Agreement with the matching column of
/// [`dsmc_recurrent`] is the decentralization contract.
pub fn dsmc_column<T: Scalar>(
    bin: usize,
    density: T,
    desired: T,
    neighbor_ids: &[usize],
    reports: &[NeighborReport<T>],
    params: SynthesisParams<T>,
) -> Result<Vec<(usize, T)>> {
    if desired <= T::zero() {
        return Err(Error::NonPositiveDesired(bin + 1));
    }
    if density < T::zero() {
        return Err(Error::NegativeEntry { index: bin });
    }
    SynthesisParams::new(params.d_chsn, neighbor_ids.len())?;

    let mut neighbors: Vec<NeighborReport<T>> = Vec::with_capacity(neighbor_ids.len());
    for &id in neighbor_ids {
        let report = reports.iter().find(|r| r.bin == id).ok_or(Error::MissingNeighbor(id + 1))?;
        if report.desired <= T::zero() {
            return Err(Error::NonPositiveDesired(id + 1));
        }
        neighbors.push(*report);
    }
    neighbors.sort_by_key(|r| r.bin);

    let own_error = desired - density;
    let mut column: Vec<(usize, T)> = neighbors
        .iter()
        .map(|r| {
            let flow = ((r.desired - r.density - own_error) / params.d_chsn).max_of(T::zero());
            let rate = if density > T::zero() { flow / density } else { T::zero() };
            (r.bin, rate)
        })
        .collect();

    let outgoing = column.iter().fold(T::zero(), |acc, &(_, r)| acc + r);
    let stay = if outgoing < T::one() { T::one() - outgoing } else { T::zero() };
    let at = column.partition_point(|&(b, _)| b < bin);
    column.insert(at, (bin, stay));

    let total = column.iter().fold(T::zero(), |acc, &(_, r)| acc + r);
    for entry in &mut column {
        entry.1 = entry.1 / total;
    }
    Ok(column)
}
