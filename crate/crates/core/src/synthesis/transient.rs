use super::MarkovMatrix;
use crate::error::{Error, Result};
use crate::graph::{Partition, Topology};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

/// Transient columns of the block form, indexed by partition order.
///
/// `m1[(a, b)]`: from the `b`-th to the `a`-th bin of
/// [`Partition::transient_order`]. `m2[(r, b)]`: from the `b`-th transient
/// bin to the `r`-th recurrent bin.
#[derive(Debug, Clone, PartialEq)]
pub struct TransientBlocks<T> {
    pub m1: DenseMatrix<T>,
    pub m2: DenseMatrix<T>,
}

impl<T: Scalar> TransientBlocks<T> {
    pub fn is_empty(&self) -> bool {
        self.m1.cols() == 0
    }
}

/// Shortest-path rule: a transient bin sends its agents uniformly to its
/// neighbors one layer closer to the recurrent set, and keeps none.
pub fn transient_matrix<T: Scalar>(partition: &Partition, topology: &Topology) -> Result<TransientBlocks<T>> {
    let m = topology.bins();
    if partition.bins() != m {
        return Err(Error::LengthMismatch { expected: m, found: partition.bins() });
    }
    let transient = partition.transient_order();
    let m_t = transient.len();
    let m_r = partition.recurrent_count();

    // Position of every bin inside its block.
    let mut slot = vec![usize::MAX; m];
    for (a, &b) in transient.iter().enumerate() {
        slot[b] = a;
    }
    for (r, &b) in partition.recurrent.iter().enumerate() {
        slot[b] = r;
    }

    let mut m1 = DenseMatrix::zeros(m_t, m_t);
    let mut m2 = DenseMatrix::zeros(m_r, m_t);
    for (depth, layer) in partition.layers.iter().enumerate() {
        let targets: &[usize] = if depth == 0 { &partition.recurrent } else { &partition.layers[depth - 1] };
        for &bin in layer {
            let next: Vec<usize> =
                topology.neighbors(bin).iter().copied().filter(|n| targets.binary_search(n).is_ok()).collect();
            if next.is_empty() {
                return Err(Error::DeadEndTransient(bin + 1));
            }
            let share = T::one() / T::from_count(next.len());
            let col = slot[bin];
            for n in next {
                if depth == 0 {
                    m2[(slot[n], col)] = share;
                } else {
                    m1[(slot[n], col)] = share;
                }
            }
        }
    }
    Ok(TransientBlocks { m1, m2 })
}

/// Places `[[M1, 0], [M2, M3]]` back into the original bin numbering.
pub fn assemble<T: Scalar>(
    blocks: &TransientBlocks<T>,
    m3: &DenseMatrix<T>,
    partition: &Partition,
) -> Result<MarkovMatrix<T>> {
    let m_t = partition.transient_count();
    let m_r = partition.recurrent_count();
    let dims_ok = blocks.m1.rows() == m_t
        && blocks.m1.cols() == m_t
        && blocks.m2.rows() == m_r
        && blocks.m2.cols() == m_t
        && m3.rows() == m_r
        && m3.cols() == m_r;
    if !dims_ok {
        return Err(Error::InvalidMatrix(format!(
            "block shapes M1 {}x{}, M2 {}x{}, M3 {}x{} do not match m_t={m_t}, m_r={m_r}",
            blocks.m1.rows(),
            blocks.m1.cols(),
            blocks.m2.rows(),
            blocks.m2.cols(),
            m3.rows(),
            m3.cols()
        )));
    }
    let order = &partition.ordering;
    let mut full = DenseMatrix::zeros(m_t + m_r, m_t + m_r);
    for b in 0..m_t {
        for a in 0..m_t {
            full[(order[a], order[b])] = blocks.m1[(a, b)];
        }
        for r in 0..m_r {
            full[(order[m_t + r], order[b])] = blocks.m2[(r, b)];
        }
    }
    for s in 0..m_r {
        for r in 0..m_r {
            full[(order[m_t + r], order[m_t + s])] = m3[(r, s)];
        }
    }
    Ok(MarkovMatrix::from_trusted(full))
}
