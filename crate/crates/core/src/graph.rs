//! Bin topology, connectivity, recurrent/transient partitioning and
//! Laplacians of the self-loop-free bin graph.
//!
//! All indices here are 0-based; conversion to the 1-based external
//! numbering happens at the I/O boundary.

use std::collections::VecDeque;

use crate::density::ProbabilityVector;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

/// Symmetric adjacency over `m` bins with every self-loop present.
///
/// `allows(i, j)` means an agent in bin `i` may move to bin `j` in one step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    bins: usize,
    adjacency: Vec<bool>,
    neighbors: Vec<Vec<usize>>,
}

impl Topology {
    /// Validates and wraps a full boolean adjacency table.
    pub fn new(adjacency: Vec<Vec<bool>>) -> Result<Self> {
        let m = adjacency.len();
        let mut flat = vec![false; m * m];
        for (i, row) in adjacency.iter().enumerate() {
            if row.len() != m {
                return Err(Error::LengthMismatch { expected: m, found: row.len() });
            }
            flat[i * m..(i + 1) * m].copy_from_slice(row);
        }
        for i in 0..m {
            if !flat[i * m + i] {
                return Err(Error::MissingSelfLoop(i + 1));
            }
            for j in 0..i {
                if flat[i * m + j] != flat[j * m + i] {
                    return Err(Error::AsymmetricAdjacency(j + 1, i + 1));
                }
            }
        }
        Ok(Self::from_flat(m, flat))
    }

    /// Builds a topology from undirected 0-based edges; self-loops are added.
    pub fn from_edges(bins: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut flat = vec![false; bins * bins];
        for i in 0..bins {
            flat[i * bins + i] = true;
        }
        for &(a, b) in edges {
            for bin in [a, b] {
                if bin >= bins {
                    return Err(Error::BinOutOfRange { bin: bin + 1, bins });
                }
            }
            flat[a * bins + b] = true;
            flat[b * bins + a] = true;
        }
        Ok(Self::from_flat(bins, flat))
    }

    fn from_flat(bins: usize, adjacency: Vec<bool>) -> Self {
        let neighbors = (0..bins).map(|i| (0..bins).filter(|&j| j != i && adjacency[i * bins + j]).collect()).collect();
        Self { bins, adjacency, neighbors }
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn allows(&self, from: usize, to: usize) -> bool {
        self.adjacency[from * self.bins + to]
    }

    /// Neighbors of `bin` in ascending order, excluding `bin` itself.
    pub fn neighbors(&self, bin: usize) -> &[usize] {
        &self.neighbors[bin]
    }

    /// Number of neighbors excluding the self-loop.
    pub fn degree(&self, bin: usize) -> usize {
        self.neighbors[bin].len()
    }

    /// Induced sub-topology; bin `k` of the result is `subset[k]`.
    pub fn induced(&self, subset: &[usize]) -> Result<Self> {
        self.check_subset(subset)?;
        let n = subset.len();
        let mut flat = vec![false; n * n];
        for (a, &i) in subset.iter().enumerate() {
            for (b, &j) in subset.iter().enumerate() {
                flat[a * n + b] = self.allows(i, j);
            }
        }
        Ok(Self::from_flat(n, flat))
    }

    fn check_subset(&self, subset: &[usize]) -> Result<()> {
        match subset.iter().find(|&&b| b >= self.bins) {
            Some(&bin) => Err(Error::BinOutOfRange { bin: bin + 1, bins: self.bins }),
            None => Ok(()),
        }
    }
}

/// Grid of `rows × cols` bins numbered row-major; two cells are adjacent
/// when their Manhattan distance is at most `hop`.
pub fn build_grid_topology(rows: usize, cols: usize, hop: usize) -> Result<Topology> {
    if rows == 0 || cols == 0 || hop == 0 {
        return Err(Error::InvalidGrid { rows, cols, hop });
    }
    let m = rows * cols;
    let mut flat = vec![false; m * m];
    for a in 0..m {
        let (ra, ca) = (a / cols, a % cols);
        let r_lo = ra.saturating_sub(hop);
        let r_hi = (ra + hop).min(rows - 1);
        for rb in r_lo..=r_hi {
            let budget = hop - ra.abs_diff(rb);
            let c_lo = ca.saturating_sub(budget);
            let c_hi = (ca + budget).min(cols - 1);
            for cb in c_lo..=c_hi {
                flat[a * m + rb * cols + cb] = true;
            }
        }
    }
    Ok(Topology::from_flat(m, flat))
}

/// Whether the subgraph induced on `subset` is connected.
pub fn is_strongly_connected(topology: &Topology, subset: &[usize]) -> Result<bool> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    topology.check_subset(subset)?;
    let mut member = vec![false; topology.bins()];
    for &b in subset {
        member[b] = true;
    }
    let mut seen = vec![false; topology.bins()];
    let mut queue = VecDeque::from([subset[0]]);
    seen[subset[0]] = true;
    let mut reached = 1;
    while let Some(b) = queue.pop_front() {
        for &n in topology.neighbors(b) {
            if member[n] && !seen[n] {
                seen[n] = true;
                reached += 1;
                queue.push_back(n);
            }
        }
    }
    let distinct = member.iter().filter(|&&m| m).count();
    Ok(reached == distinct)
}

/// Recurrent bins plus breadth-first transient layers around them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    /// Bins with positive desired density, ascending.
    pub recurrent: Vec<usize>,
    /// `layers[k]` holds the transient bins at graph distance `k + 1` from
    /// the recurrent set, ascending.
    pub layers: Vec<Vec<usize>>,
    /// Farthest layer first, then closer layers, then recurrent bins.
    pub ordering: Vec<usize>,
}

impl Partition {
    pub fn transient_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn recurrent_count(&self) -> usize {
        self.recurrent.len()
    }

    /// Transient bins in block order (the first `m_t` entries of `ordering`).
    pub fn transient_order(&self) -> &[usize] {
        &self.ordering[..self.transient_count()]
    }

    pub fn bins(&self) -> usize {
        self.ordering.len()
    }
}

/// Splits bins into the recurrent set (`desired > 0`) and BFS layers of
/// transient bins.
pub fn partition_states<T: Scalar>(topology: &Topology, desired: &ProbabilityVector<T>) -> Result<Partition> {
    let m = topology.bins();
    if desired.len() != m {
        return Err(Error::LengthMismatch { expected: m, found: desired.len() });
    }
    let recurrent: Vec<usize> = (0..m).filter(|&i| desired[i] > T::zero()).collect();
    if !is_strongly_connected(topology, &recurrent)? {
        return Err(Error::Disconnected);
    }

    let mut distance = vec![usize::MAX; m];
    for &r in &recurrent {
        distance[r] = 0;
    }
    let mut layers: Vec<Vec<usize>> = Vec::new();
    let mut frontier = recurrent.clone();
    while !frontier.is_empty() {
        let depth = layers.len() + 1;
        let mut next = Vec::new();
        for &b in &frontier {
            for &n in topology.neighbors(b) {
                if distance[n] == usize::MAX {
                    distance[n] = depth;
                    next.push(n);
                }
            }
        }
        next.sort_unstable();
        if !next.is_empty() {
            layers.push(next.clone());
        }
        frontier = next;
    }
    if let Some(lost) = distance.iter().position(|&d| d == usize::MAX) {
        return Err(Error::UnreachableBin(lost + 1));
    }

    let mut ordering: Vec<usize> = layers.iter().rev().flatten().copied().collect();
    ordering.extend_from_slice(&recurrent);
    Ok(Partition { recurrent, layers, ordering })
}

/// Degrees and Laplacian of the self-loop-free graph induced on a bin subset.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianView<T> {
    /// Original bin indices; row `k` of `laplacian` is bin `bins[k]`.
    pub bins: Vec<usize>,
    pub degree: Vec<usize>,
    pub max_degree: usize,
    pub laplacian: DenseMatrix<T>,
}

impl<T: Scalar> LaplacianView<T> {
    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }
}

/// `L = D − A` over the connected subgraph induced on `subset`.
pub fn laplacian_of<T: Scalar>(topology: &Topology, subset: &[usize]) -> Result<LaplacianView<T>> {
    if !is_strongly_connected(topology, subset)? {
        return Err(Error::Disconnected);
    }
    laplacian_of_subgraph(topology, subset)
}

/// Same as [`laplacian_of`] without the connectivity requirement, for
/// diagnostics that must report on disconnected graphs.
pub fn laplacian_of_subgraph<T: Scalar>(topology: &Topology, subset: &[usize]) -> Result<LaplacianView<T>> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let sub = topology.induced(subset)?;
    let n = sub.bins();
    let degree: Vec<usize> = (0..n).map(|i| sub.degree(i)).collect();
    let laplacian = DenseMatrix::from_fn(n, n, |i, j| {
        if i == j {
            T::from_count(degree[i])
        } else if sub.allows(i, j) {
            -T::one()
        } else {
            T::zero()
        }
    });
    Ok(LaplacianView {
        bins: subset.to_vec(),
        max_degree: degree.iter().copied().max().unwrap_or(0),
        degree,
        laplacian,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path4() -> Topology {
        Topology::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap()
    }

    #[test]
    fn one_by_two_grid_is_fully_adjacent() {
        let t = build_grid_topology(1, 2, 1).unwrap();
        assert!(t.allows(0, 0) && t.allows(0, 1) && t.allows(1, 0) && t.allows(1, 1));
    }

    #[test]
    fn two_by_two_grid_is_a_four_cycle() {
        let t = build_grid_topology(2, 2, 1).unwrap();
        for b in 0..4 {
            assert_eq!(t.degree(b), 2);
        }
        assert!(!t.allows(0, 3));
        assert!(!t.allows(1, 2));
    }

    #[test]
    fn twenty_grid_degrees() {
        let t = build_grid_topology(20, 20, 1).unwrap();
        assert_eq!(t.degree(0), 2);
        assert_eq!(t.degree(21), 4);
        assert_eq!(t.degree(19), 2);
        assert_eq!(t.degree(10), 3);
    }

    #[test]
    fn zero_sized_grid_rejected() {
        assert!(matches!(build_grid_topology(0, 3, 1), Err(Error::InvalidGrid { .. })));
        assert!(build_grid_topology(3, 0, 1).is_err());
        assert!(build_grid_topology(3, 3, 0).is_err());
    }

    #[test]
    fn asymmetric_or_loopless_adjacency_rejected() {
        let asym = vec![vec![true, true], vec![false, true]];
        assert_eq!(Topology::new(asym), Err(Error::AsymmetricAdjacency(1, 2)));
        let loopless = vec![vec![true, false], vec![false, false]];
        assert_eq!(Topology::new(loopless), Err(Error::MissingSelfLoop(2)));
    }

    #[test]
    fn connectivity() {
        let cycle = build_grid_topology(2, 2, 1).unwrap();
        assert!(is_strongly_connected(&cycle, &[0, 1, 2, 3]).unwrap());
        assert!(!is_strongly_connected(&path4(), &[0, 3]).unwrap());
        assert!(is_strongly_connected(&path4(), &[2]).unwrap());
        assert_eq!(is_strongly_connected(&path4(), &[]), Err(Error::EmptySubset));
    }

    #[test]
    fn partition_of_path() {
        let v = ProbabilityVector::new(vec![0.0, 0.0, 0.5, 0.5]).unwrap();
        let p = partition_states(&path4(), &v).unwrap();
        assert_eq!(p.recurrent, vec![2, 3]);
        assert_eq!(p.layers, vec![vec![1], vec![0]]);
        assert_eq!(p.ordering, vec![0, 1, 2, 3]);
        assert_eq!(p.transient_order(), &[0, 1]);
    }

    #[test]
    fn partition_all_recurrent() {
        let cycle = build_grid_topology(2, 2, 1).unwrap();
        let v = ProbabilityVector::new(vec![0.05, 0.05, 0.3, 0.6]).unwrap();
        let p = partition_states(&cycle, &v).unwrap();
        assert_eq!(p.recurrent, vec![0, 1, 2, 3]);
        assert!(p.layers.is_empty());
    }

    #[test]
    fn partition_rejects_disconnected_recurrent_set() {
        let v = ProbabilityVector::new(vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert_eq!(partition_states(&path4(), &v), Err(Error::Disconnected));
    }

    #[test]
    fn partition_rejects_unreachable_bin() {
        let t = Topology::from_edges(3, &[(0, 1)]).unwrap();
        let v = ProbabilityVector::new(vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(partition_states(&t, &v), Err(Error::UnreachableBin(3)));
    }

    #[test]
    fn laplacian_of_single_edge() {
        let t = Topology::from_edges(2, &[(0, 1)]).unwrap();
        let l: LaplacianView<f64> = laplacian_of(&t, &[0, 1]).unwrap();
        assert_eq!(l.laplacian.to_rows(), vec![vec![1.0, -1.0], vec![-1.0, 1.0]]);
        assert_eq!(l.max_degree, 1);
    }

    #[test]
    fn laplacian_of_cycle_and_grid() {
        let cycle = build_grid_topology(2, 2, 1).unwrap();
        let l: LaplacianView<f64> = laplacian_of(&cycle, &[0, 1, 2, 3]).unwrap();
        assert_eq!(l.degree, vec![2, 2, 2, 2]);
        assert_eq!(l.max_degree, 2);
        let grid = build_grid_topology(20, 20, 1).unwrap();
        let all: Vec<usize> = (0..400).collect();
        let l: LaplacianView<f64> = laplacian_of(&grid, &all).unwrap();
        assert_eq!(l.max_degree, 4);
    }

    #[test]
    fn laplacian_rejects_disconnected_subset() {
        assert_eq!(laplacian_of::<f64>(&path4(), &[0, 2]), Err(Error::Disconnected));
    }
}
