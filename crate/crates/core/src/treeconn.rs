//! Tree-connectivity quantities: weighted spanning-tree counts, effective
//! resistances, single-edge add/delete deltas and expected tree counts under
//! random edge presence.

use crate::error::{Error, Result};
use crate::graph::{edge_vector, Edge, WeightedGraph};
use crate::linalg::{cholesky, CholeskyFactor};
use crate::scalar::Real;

/// Natural log of the weighted spanning-tree count.
///
/// For disconnected graphs the log-value is 0 by convention and
/// `is_connected` is false; callers must branch on the flag, never on the
/// value (a spanning tree also has log-count 0).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TreeConnectivity<F> {
    pub log_tree_count: F,
    pub is_connected: bool,
}

impl<F: Real> TreeConnectivity<F> {
    pub fn disconnected() -> Self {
        TreeConnectivity {
            log_tree_count: F::zero(),
            is_connected: false,
        }
    }

    pub fn value(&self) -> F {
        self.log_tree_count
    }

    /// Linear-domain tree count; overflows past log-value ~700 for f64, so
    /// prefer the log form for anything but small graphs.
    pub fn tree_count(&self) -> F {
        if self.is_connected {
            self.log_tree_count.exp()
        } else {
            F::zero()
        }
    }
}

/// Probability that a given edge of a graph is present.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeProbability<F> {
    pub edge_index: usize,
    pub p: F,
}

/// Weighted number of spanning trees, det of the reduced weighted Laplacian;
/// 0 for disconnected graphs.
pub fn tree_count<F: Real>(g: &WeightedGraph<F>) -> F {
    tree_connectivity(g).tree_count()
}

pub fn tree_connectivity<F: Real>(g: &WeightedGraph<F>) -> TreeConnectivity<F> {
    if !g.is_connected() {
        return TreeConnectivity::disconnected();
    }
    let red = g
        .reduced_laplacian(g.default_anchor())
        .expect("anchor in range");
    match cholesky(&red.matrix) {
        Ok(f) => TreeConnectivity {
            log_tree_count: f.logdet(),
            is_connected: true,
        },
        // Numerically singular despite a connected topology.
        Err(_) => TreeConnectivity::disconnected(),
    }
}

/// Effective resistance w * a^T L^-1 a computed from a factor of the reduced
/// Laplacian: solve L x = a forward and take w * ||x||^2.
pub fn effective_resistance<F: Real>(f: &CholeskyFactor<F>, a: &[F], w: F) -> Result<F> {
    let x = f.forward_solve(a)?;
    let delta: F = x.iter().map(|&v| v * v).sum();
    Ok(w * delta)
}

/// Log-gain form of edge addition: tau(G + e) = tau(G) + log(1 + w * delta).
///
/// `f` must factor the reduced Laplacian of `g` anchored at `g.default_anchor()`.
pub fn tau_after_add<F: Real>(
    g: &WeightedGraph<F>,
    f: &CholeskyFactor<F>,
    tau: F,
    e: &Edge<F>,
) -> Result<F> {
    if g.contains_edge(e.u, e.v) {
        return Err(Error::InvalidInput(format!(
            "edge {}-{} already present",
            e.u, e.v
        )));
    }
    let a = edge_vector(e, g.default_anchor(), g.n());
    let r = effective_resistance(f, &a, e.weight)?;
    Ok(tau + r.ln_1p())
}

/// Threshold on w * delta above which removal is treated as disconnecting.
const BRIDGE_TOL: f64 = 1e-9;

/// Log-gain form of edge removal: tau(G - e) = tau(G) + log(1 - w * delta).
/// A bridge (w * delta ~ 1) yields the disconnected result.
pub fn tau_after_remove<F: Real>(
    g: &WeightedGraph<F>,
    f: &CholeskyFactor<F>,
    tau: F,
    e: &Edge<F>,
) -> Result<TreeConnectivity<F>> {
    let idx = g
        .find_edge(e.u, e.v)
        .ok_or_else(|| Error::InvalidInput(format!("edge {}-{} not in graph", e.u, e.v)))?;
    let stored = g.edges()[idx];
    let a = edge_vector(&stored, g.default_anchor(), g.n());
    let r = effective_resistance(f, &a, stored.weight)?;
    if r >= F::one() - F::real(BRIDGE_TOL) {
        return Ok(TreeConnectivity::disconnected());
    }
    Ok(TreeConnectivity {
        log_tree_count: tau + (-r).ln_1p(),
        is_connected: true,
    })
}

/// Expected weighted tree count when edge i of `g0` is present independently
/// with probability p_i: equals the tree count of `g0` with each weight
/// scaled by its probability, O(n^3).
pub fn expected_tree_count<F: Real>(
    g0: &WeightedGraph<F>,
    probs: &[EdgeProbability<F>],
) -> Result<F> {
    let m = g0.edge_count();
    let mut seen = vec![false; m];
    let mut scaled: Vec<Edge<F>> = Vec::with_capacity(m);
    for ep in probs {
        if ep.edge_index >= m {
            return Err(Error::InvalidInput(format!(
                "probability refers to edge index {} but graph has {} edges",
                ep.edge_index, m
            )));
        }
        if seen[ep.edge_index] {
            return Err(Error::InvalidInput(format!(
                "duplicate probability for edge index {}",
                ep.edge_index
            )));
        }
        if ep.p < F::zero() || ep.p > F::one() {
            return Err(Error::InvalidInput(format!(
                "probability {} out of [0, 1]",
                ep.p
            )));
        }
        seen[ep.edge_index] = true;
        let e = g0.edges()[ep.edge_index];
        if ep.p > F::zero() {
            scaled.push(Edge::new(e.u, e.v, ep.p * e.weight)?);
        }
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(Error::InvalidInput(format!(
            "missing probability for edge index {missing}"
        )));
    }
    let g = WeightedGraph::new(g0.n(), scaled)?;
    Ok(tree_count(&g))
}
