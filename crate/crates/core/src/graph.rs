//! Graph representation, edge-list parsing, connectivity checks and reduced
//! Laplacian construction.

use crate::error::{Error, Result};
use crate::greedy::{CandidateOrigin, CandidateSet};
use crate::linalg::Matrix;
use crate::scalar::Real;

pub type VertexId = usize;

/// Undirected weighted edge, stored canonically with u < v.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge<F> {
    pub u: VertexId,
    pub v: VertexId,
    pub weight: F,
}

impl<F: Real> Edge<F> {
    pub fn new(u: VertexId, v: VertexId, weight: F) -> Result<Self> {
        if u == v {
            return Err(Error::InvalidInput(format!("self-loop at vertex {u}")));
        }
        if !(weight > F::zero()) {
            return Err(Error::NonPositiveWeight {
                w: weight.to_f64().unwrap_or(f64::NAN),
            });
        }
        let (u, v) = if u < v { (u, v) } else { (v, u) };
        Ok(Edge { u, v, weight })
    }

    pub fn key(&self) -> (VertexId, VertexId) {
        (self.u, self.v)
    }
}

/// Simple undirected graph with positive edge weights.
///
/// Parallel edges are merged at construction by summing weights; edges are
/// kept sorted by (u, v) so candidate indices are stable across runs.
#[derive(Clone, Debug)]
pub struct WeightedGraph<F> {
    n: usize,
    edges: Vec<Edge<F>>,
}

impl<F: Real> WeightedGraph<F> {
    pub fn new(n: usize, edges: Vec<Edge<F>>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "graph needs at least 2 vertices, got {n}"
            )));
        }
        let mut edges = edges;
        for e in &edges {
            if e.v >= n {
                return Err(Error::VertexOutOfRange { v: e.v, n });
            }
        }
        edges.sort_by_key(|e| e.key());
        let mut merged: Vec<Edge<F>> = Vec::with_capacity(edges.len());
        for e in edges {
            match merged.last_mut() {
                Some(last) if last.key() == e.key() => {
                    last.weight = last.weight + e.weight;
                }
                _ => merged.push(e),
            }
        }
        Ok(WeightedGraph { n, edges: merged })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge<F>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn find_edge(&self, u: VertexId, v: VertexId) -> Option<usize> {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edges.binary_search_by_key(&key, |e| e.key()).ok()
    }

    pub fn contains_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.find_edge(u, v).is_some()
    }

    pub fn with_edge_added(&self, e: Edge<F>) -> Result<Self> {
        if e.v >= self.n {
            return Err(Error::VertexOutOfRange { v: e.v, n: self.n });
        }
        let mut edges = self.edges.clone();
        edges.push(e);
        WeightedGraph::new(self.n, edges)
    }

    pub fn with_edge_removed(&self, u: VertexId, v: VertexId) -> Result<Self> {
        let idx = self
            .find_edge(u, v)
            .ok_or_else(|| Error::InvalidInput(format!("edge {u}-{v} not in graph")))?;
        let mut edges = self.edges.clone();
        edges.remove(idx);
        WeightedGraph::new(self.n, edges)
    }

    /// Connectivity by union-find; weights are irrelevant.
    pub fn is_connected(&self) -> bool {
        let mut dsu = Dsu::new(self.n);
        for e in &self.edges {
            dsu.union(e.u, e.v);
        }
        dsu.components() == 1
    }

    /// Full n x n weighted Laplacian.
    pub fn laplacian(&self) -> Matrix<F> {
        let mut m = Matrix::zeros(self.n, self.n);
        for e in &self.edges {
            m[(e.u, e.u)] = m[(e.u, e.u)] + e.weight;
            m[(e.v, e.v)] = m[(e.v, e.v)] + e.weight;
            m[(e.u, e.v)] = m[(e.u, e.v)] - e.weight;
            m[(e.v, e.u)] = m[(e.v, e.u)] - e.weight;
        }
        m
    }

    /// Reduced weighted Laplacian: the full Laplacian with the anchor's row
    /// and column deleted, assembled as a weighted sum of outer products.
    pub fn reduced_laplacian(&self, anchor: VertexId) -> Result<ReducedLaplacian<F>> {
        if anchor >= self.n {
            return Err(Error::VertexOutOfRange {
                v: anchor,
                n: self.n,
            });
        }
        let dim = self.n - 1;
        let mut m = Matrix::zeros(dim, dim);
        for e in &self.edges {
            let a = edge_vector(e, anchor, self.n);
            m.add_scaled_outer(&a, e.weight);
        }
        Ok(ReducedLaplacian { anchor, matrix: m })
    }

    /// Anchor used by every incremental algorithm in this crate.
    pub fn default_anchor(&self) -> VertexId {
        self.n - 1
    }
}

/// Reduced weighted Laplacian with its anchoring vertex.
#[derive(Clone, Debug)]
pub struct ReducedLaplacian<F> {
    pub anchor: VertexId,
    pub matrix: Matrix<F>,
}

/// Signed incidence column e_u - e_v with the anchor coordinate dropped.
pub fn edge_vector<F: Real>(e: &Edge<F>, anchor: VertexId, n: usize) -> Vec<F> {
    let mut a = vec![F::zero(); n - 1];
    let reduced = |x: VertexId| -> Option<usize> {
        if x == anchor {
            None
        } else if x < anchor {
            Some(x)
        } else {
            Some(x - 1)
        }
    };
    if let Some(i) = reduced(e.u) {
        a[i] = F::one();
    }
    if let Some(j) = reduced(e.v) {
        a[j] = -F::one();
    }
    a
}

/// Outcome of parsing an edge-list file, with merge/drop diagnostics.
#[derive(Clone, Debug)]
pub struct ParsedGraph<F> {
    pub graph: WeightedGraph<F>,
    pub loops_dropped: usize,
    pub parallel_merged: usize,
}

/// Parse the edge-list text format:
///
/// ```text
/// # comment
/// n 4
/// 0 1 2.5
/// 1 2          # weight defaults to 1.0
/// ```
///
/// Parallel entries are merged by summing weights; self-loops are dropped and
/// counted in the diagnostics.
pub fn parse_graph<F: Real>(text: &str) -> Result<ParsedGraph<F>> {
    let mut n: Option<usize> = None;
    let mut edges: Vec<Edge<F>> = Vec::new();
    let mut loops_dropped = 0usize;
    let mut raw_edges = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match n {
            None => {
                if toks.len() != 2 || toks[0] != "n" {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "expected header `n <count>`".into(),
                    });
                }
                let count: usize = toks[1].parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("invalid vertex count `{}`", toks[1]),
                })?;
                if count < 2 {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("vertex count must be at least 2, got {count}"),
                    });
                }
                n = Some(count);
            }
            Some(count) => {
                if toks.len() != 2 && toks.len() != 3 {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "expected `u v [w]`".into(),
                    });
                }
                let parse_v = |tok: &str| -> Result<usize> {
                    tok.parse().map_err(|_| Error::Parse {
                        line: line_no,
                        msg: format!("invalid vertex id `{tok}`"),
                    })
                };
                let u = parse_v(toks[0])?;
                let v = parse_v(toks[1])?;
                if u >= count || v >= count {
                    return Err(Error::VertexOutOfRange {
                        v: u.max(v),
                        n: count,
                    });
                }
                let w: f64 = if toks.len() == 3 {
                    toks[2].parse().map_err(|_| Error::Parse {
                        line: line_no,
                        msg: format!("invalid weight `{}`", toks[2]),
                    })?
                } else {
                    1.0
                };
                if !(w > 0.0) || !w.is_finite() {
                    return Err(Error::NonPositiveWeight { w });
                }
                if u == v {
                    loops_dropped += 1;
                    continue;
                }
                raw_edges += 1;
                edges.push(Edge::new(u, v, F::real(w))?);
            }
        }
    }
    let n = n.ok_or(Error::Parse {
        line: 0,
        msg: "missing `n <count>` header".into(),
    })?;
    let graph = WeightedGraph::new(n, edges)?;
    let parallel_merged = raw_edges - graph.edge_count();
    Ok(ParsedGraph {
        graph,
        loops_dropped,
        parallel_merged,
    })
}

/// Rewrite a k-edge deletion problem as a d-edge addition problem: remove all
/// removable edges from the base and select d = |removable| - k of them to put
/// back.
pub fn transform_minus_to_plus<F: Real>(
    base: &WeightedGraph<F>,
    m_minus: &CandidateSet<F>,
    k: usize,
) -> Result<(WeightedGraph<F>, CandidateSet<F>, usize)> {
    if k > m_minus.len() {
        return Err(Error::BudgetTooLarge {
            k,
            c: m_minus.len(),
        });
    }
    let mut stripped = base.clone();
    let mut removed: Vec<Edge<F>> = Vec::with_capacity(m_minus.len());
    for e in m_minus.edges() {
        let idx = stripped.find_edge(e.u, e.v).ok_or_else(|| {
            Error::InvalidInput(format!("removable edge {}-{} not in base graph", e.u, e.v))
        })?;
        // Keep the base graph's weight; the candidate list only names edges.
        removed.push(stripped.edges()[idx]);
        stripped = stripped.with_edge_removed(e.u, e.v)?;
    }
    let d = m_minus.len() - k;
    let cands = CandidateSet::new(removed, CandidateOrigin::DeletionTransformed)?;
    Ok((stripped, cands, d))
}

pub(crate) struct Dsu {
    parent: Vec<usize>,
    count: usize,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
            count: n,
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    /// Returns false if x and y were already in the same component.
    pub fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        self.parent[rx] = ry;
        self.count -= 1;
        true
    }

    pub fn components(&self) -> usize {
        self.count
    }
}
