//! Random instances shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swarm_guidance::Topology;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Connected graph on `m` bins: a random spanning tree plus each other pair
/// with probability `extra`.
pub fn connected_graph(rng: &mut impl Rng, m: usize, extra: f64) -> Topology {
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for k in 1..m {
        edges.push((order[k], order[rng.gen_range(0..k)]));
    }
    for a in 0..m {
        for b in a + 1..m {
            if rng.gen_bool(extra) {
                edges.push((a, b));
            }
        }
    }
    Topology::from_edges(m, &edges).unwrap()
}

/// Positive weights normalized to one.
pub fn positive_distribution(rng: &mut impl Rng, m: usize) -> Vec<f64> {
    normalize((0..m).map(|_| rng.gen_range(0.05..1.0)).collect())
}

/// Probability vector with roughly a third of the bins empty.
pub fn sparse_distribution(rng: &mut impl Rng, m: usize) -> Vec<f64> {
    loop {
        let w: Vec<f64> = (0..m).map(|_| if rng.gen_bool(0.35) { 0.0 } else { rng.gen_range(0.0..1.0) }).collect();
        if w.iter().sum::<f64>() > 0.0 {
            return normalize(w);
        }
    }
}

pub fn normalize(w: Vec<f64>) -> Vec<f64> {
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Zero-sum vector with entries in roughly `[-1, 1]`.
pub fn zero_sum(rng: &mut impl Rng, m: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mean = raw.iter().sum::<f64>() / m as f64;
    raw.into_iter().map(|x| x - mean).collect()
}

pub fn max_degree(t: &Topology) -> usize {
    (0..t.bins()).map(|b| t.degree(b)).max().unwrap_or(0)
}

#[allow(clippy::needless_range_loop)]
/// All-pairs hop distances by Floyd-Warshall (`usize::MAX` if unreachable).
pub fn hop_distances(t: &Topology) -> Vec<Vec<usize>> {
    let m = t.bins();
    let inf = usize::MAX / 4;
    let mut d = vec![vec![inf; m]; m];
    for a in 0..m {
        d[a][a] = 0;
        for &b in t.neighbors(a) {
            d[a][b] = 1;
        }
    }
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d.into_iter().map(|row| row.into_iter().map(|x| if x >= inf { usize::MAX } else { x }).collect()).collect()
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
