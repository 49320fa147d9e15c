//! Seeded random instance generation for benchmarks and tests: connected
//! base graphs built from a random spanning tree plus uniform extra edges.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

use crate::error::{Error, Result};
use crate::graph::{Edge, WeightedGraph};
use crate::greedy::{CandidateOrigin, CandidateSet};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightDist {
    Unit,
    /// Log-normal with mu = 0 and the given sigma.
    LogNormal(f64),
}

impl WeightDist {
    fn sample<F: Real, R: Rng>(&self, rng: &mut R) -> F {
        match *self {
            WeightDist::Unit => F::one(),
            WeightDist::LogNormal(sigma) => {
                let d = LogNormal::new(0.0, sigma).expect("finite sigma");
                F::real(d.sample(rng))
            }
        }
    }
}

/// Decodes a Prüfer sequence of length n-2 into the edge list of a labeled
/// tree on n vertices.
fn prufer_to_tree(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &v in seq {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &v in seq {
        let u = (0..n).find(|&u| degree[u] == 1).expect("valid sequence");
        edges.push((u, v));
        degree[u] -= 1;
        degree[v] -= 1;
    }
    let rem: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    edges.push((rem[0], rem[1]));
    edges
}

/// Connected graph on n vertices with exactly m edges: a uniformly random
/// spanning tree (random Prüfer sequence) plus extra edges sampled uniformly
/// from the remaining non-edges. Deterministic in the seed.
pub fn random_connected_graph<F: Real>(
    n: usize,
    m: usize,
    dist: WeightDist,
    seed: u64,
) -> Result<WeightedGraph<F>> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 vertices, got {n}"
        )));
    }
    let max_m = n * (n - 1) / 2;
    if m < n - 1 || m > max_m {
        return Err(Error::InvalidInput(format!(
            "edge count {m} outside [{}, {max_m}] for n = {n}",
            n - 1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tree: Vec<(usize, usize)> = if n == 2 {
        vec![(0, 1)]
    } else {
        let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
        prufer_to_tree(&seq, n)
    };
    let mut present = vec![false; n * n];
    let mut pairs: Vec<(usize, usize)> = tree
        .iter()
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    for &(u, v) in &pairs {
        present[u * n + v] = true;
    }
    let mut rest: Vec<(usize, usize)> = Vec::with_capacity(max_m - (n - 1));
    for u in 0..n {
        for v in (u + 1)..n {
            if !present[u * n + v] {
                rest.push((u, v));
            }
        }
    }
    rest.shuffle(&mut rng);
    pairs.extend(rest.into_iter().take(m - (n - 1)));
    let edges = pairs
        .into_iter()
        .map(|(u, v)| Edge::new(u, v, dist.sample(&mut rng)))
        .collect::<Result<Vec<_>>>()?;
    WeightedGraph::new(n, edges)
}

/// Every non-edge of the graph as a unit-weight candidate set.
pub fn complement_candidates<F: Real>(g: &WeightedGraph<F>) -> Result<CandidateSet<F>> {
    let n = g.n();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if !g.contains_edge(u, v) {
                edges.push(Edge::new(u, v, F::one())?);
            }
        }
    }
    CandidateSet::new(edges, CandidateOrigin::Addition)
}

/// `count` unit-weight candidates sampled uniformly from the complement,
/// deterministic in the seed. Errors when the complement is too small.
pub fn random_candidates<F: Real>(
    g: &WeightedGraph<F>,
    count: usize,
    seed: u64,
) -> Result<CandidateSet<F>> {
    let full = complement_candidates(g)?;
    if count > full.len() {
        return Err(Error::InvalidInput(format!(
            "requested {count} candidates but the complement has only {}",
            full.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = full.edges().to_vec();
    edges.shuffle(&mut rng);
    edges.truncate(count);
    edges.sort_by_key(|e| (e.u, e.v));
    CandidateSet::new(edges, CandidateOrigin::Addition)
}
