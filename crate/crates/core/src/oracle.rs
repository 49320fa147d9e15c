//! Exponential-time ground truth for tests: spanning-tree enumeration,
//! exhaustive edge selection, and brute-force expectations. Size guards are
//! hard errors, never silent truncation.

use crate::error::{Error, Result};
use crate::graph::{Dsu, WeightedGraph};
use crate::greedy::{CandidateSet, PartitionMatroid};
use crate::linalg::{determinant, Matrix};
use crate::scalar::Real;
use crate::treeconn::{tree_connectivity, EdgeProbability};

/// All spanning trees of a graph as edge-index subsets with their weight
/// products.
#[derive(Clone, Debug)]
pub struct SpanningTreeList<F> {
    pub trees: Vec<Vec<usize>>,
    pub values: Vec<F>,
}

impl<F: Real> SpanningTreeList<F> {
    pub fn total_value(&self) -> F {
        self.values.iter().copied().sum()
    }

    /// Fraction of total tree value carried by trees containing the edge.
    pub fn containing_fraction(&self, edge_index: usize) -> F {
        let mut with = F::zero();
        for (t, &v) in self.trees.iter().zip(&self.values) {
            if t.contains(&edge_index) {
                with = with + v;
            }
        }
        with / self.total_value()
    }
}

fn spanning_subset<F: Real>(g: &WeightedGraph<F>, subset: &[usize]) -> bool {
    let mut dsu = Dsu::new(g.n());
    let mut merges = 0;
    for &i in subset {
        let e = &g.edges()[i];
        if dsu.union(e.u, e.v) {
            merges += 1;
        } else {
            return false;
        }
    }
    merges == g.n() - 1
}

/// Enumerates every spanning tree by filtering (n-1)-edge subsets through a
/// union-find acyclicity check.
pub fn enumerate_spanning_trees<F: Real>(g: &WeightedGraph<F>) -> Result<SpanningTreeList<F>> {
    let n = g.n();
    let m = g.edge_count();
    if n > 10 || m > 20 {
        return Err(Error::GuardExceeded(format!(
            "enumeration limited to n <= 10, m <= 20; got n = {n}, m = {m}"
        )));
    }
    let mut trees = Vec::new();
    let mut values = Vec::new();
    if n == 1 {
        trees.push(Vec::new());
        values.push(F::one());
        return Ok(SpanningTreeList { trees, values });
    }
    if m < n - 1 {
        return Ok(SpanningTreeList { trees, values });
    }
    let mut subset = Vec::with_capacity(n - 1);
    for_each_combination(m, n - 1, &mut subset, &mut |s| {
        if spanning_subset(g, s) {
            let v = s
                .iter()
                .map(|&i| g.edges()[i].weight)
                .fold(F::one(), |a, b| a * b);
            trees.push(s.to_vec());
            values.push(v);
        }
    });
    Ok(SpanningTreeList { trees, values })
}

/// Calls `f` on every k-combination of 0..m in lexicographic order.
fn for_each_combination<G: FnMut(&[usize])>(
    m: usize,
    k: usize,
    prefix: &mut Vec<usize>,
    f: &mut G,
) {
    if prefix.len() == k {
        f(prefix);
        return;
    }
    let start = prefix.last().map_or(0, |&i| i + 1);
    let need = k - prefix.len();
    for i in start..=m.saturating_sub(need) {
        prefix.push(i);
        for_each_combination(m, k, prefix, f);
        prefix.pop();
    }
}

fn binomial(c: usize, k: usize) -> u128 {
    if k > c {
        return 0;
    }
    let mut out: u128 = 1;
    for i in 0..k.min(c - k) {
        out = out * (c - i) as u128 / (i + 1) as u128;
    }
    out
}

fn check_combination_guard(c: usize, k: usize) -> Result<()> {
    if binomial(c, k) > 1_000_000 {
        Err(Error::GuardExceeded(format!(
            "exhaustive search limited to C(c, k) <= 1e6; got C({c}, {k})"
        )))
    } else {
        Ok(())
    }
}

fn subset_value<F: Real>(
    base: &WeightedGraph<F>,
    cands: &CandidateSet<F>,
    subset: &[usize],
) -> F {
    let mut g = base.clone();
    for &i in subset {
        g = g.with_edge_added(cands.edges()[i].clone()).expect("disjoint candidate");
    }
    tree_connectivity(&g).value()
}

/// True optimum of k-edge addition by evaluating every k-subset. Ties break
/// to the lexicographically smallest subset.
pub fn exhaustive_esp<F: Real>(
    base: &WeightedGraph<F>,
    cands: &CandidateSet<F>,
    k: usize,
) -> Result<(F, Vec<usize>)> {
    let c = cands.len();
    if k > c {
        return Err(Error::BudgetTooLarge { k, c });
    }
    cands.check_disjoint(base)?;
    check_combination_guard(c, k)?;
    if k == 0 {
        return Ok((tree_connectivity(base).value(), Vec::new()));
    }
    let mut best_val = F::neg_infinity();
    let mut best_set = Vec::new();
    let mut prefix = Vec::with_capacity(k);
    for_each_combination(c, k, &mut prefix, &mut |s| {
        let v = subset_value(base, cands, s);
        if v > best_val {
            best_val = v;
            best_set = s.to_vec();
        }
    });
    Ok((best_val, best_set))
}

/// True optimum under per-block budgets, over every feasible subset of size
/// up to the total budget.
pub fn exhaustive_matroid_esp<F: Real>(
    base: &WeightedGraph<F>,
    cands: &CandidateSet<F>,
    matroid: &PartitionMatroid,
) -> Result<(F, Vec<usize>)> {
    let c = cands.len();
    if c > 20 {
        return Err(Error::GuardExceeded(format!(
            "exhaustive matroid search limited to c <= 20; got {c}"
        )));
    }
    cands.check_disjoint(base)?;
    let mut best_val = tree_connectivity(base).value();
    let mut best_set = Vec::new();
    for mask in 0u32..(1u32 << c) {
        let subset: Vec<usize> = (0..c).filter(|&i| mask >> i & 1 == 1).collect();
        if !matroid.is_feasible(&subset, c) {
            continue;
        }
        let v = subset_value(base, cands, &subset);
        if v > best_val {
            best_val = v;
            best_set = subset;
        }
    }
    Ok((best_val, best_set))
}

/// Minimum subset size reaching a tree-connectivity gain of `delta`, with one
/// witness subset (lexicographically smallest at that size). Errors when even
/// the full candidate set falls short.
pub fn exhaustive_dual_esp<F: Real>(
    base: &WeightedGraph<F>,
    cands: &CandidateSet<F>,
    delta: F,
) -> Result<(usize, Vec<usize>)> {
    let c = cands.len();
    cands.check_disjoint(base)?;
    let tau_init = tree_connectivity(base).value();
    let target = tau_init + delta;
    let eps = F::real(1e-9) * F::one().max(target.abs());
    for k in 0..=c {
        check_combination_guard(c, k)?;
        let mut found: Option<Vec<usize>> = None;
        let mut prefix = Vec::with_capacity(k);
        for_each_combination(c, k, &mut prefix, &mut |s| {
            if found.is_none() && subset_value(base, cands, s) >= target - eps {
                found = Some(s.to_vec());
            }
        });
        if let Some(set) = found {
            return Ok((k, set));
        }
    }
    Err(Error::Infeasible(
        "no candidate subset reaches the target".to_string(),
    ))
}

/// Expectation of the weighted tree count over independent edge survival,
/// summed over all 2^m subgraphs.
pub fn expected_tree_count_bruteforce<F: Real>(
    g0: &WeightedGraph<F>,
    probs: &[EdgeProbability<F>],
) -> Result<F> {
    let m = g0.edge_count();
    if m > 20 {
        return Err(Error::GuardExceeded(format!(
            "brute-force expectation limited to m <= 20; got {m}"
        )));
    }
    if probs.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: probs.len(),
        });
    }
    let mut p = vec![F::zero(); m];
    for ep in probs {
        if ep.edge_index >= m {
            return Err(Error::InvalidInput(format!(
                "edge index {} out of range",
                ep.edge_index
            )));
        }
        if ep.p < F::zero() || ep.p > F::one() {
            return Err(Error::InvalidInput(format!(
                "probability {} outside [0, 1]",
                ep.p
            )));
        }
        p[ep.edge_index] = ep.p;
    }
    let mut total = F::zero();
    for mask in 0u32..(1u32 << m) {
        let mut prob = F::one();
        let mut subset = Vec::new();
        for i in 0..m {
            if mask >> i & 1 == 1 {
                prob = prob * p[i];
                subset.push(i);
            } else {
                prob = prob * (F::one() - p[i]);
            }
        }
        if prob == F::zero() || subset.len() < g0.n() - 1 {
            continue;
        }
        // Tree count of the surviving subgraph, via direct enumeration of its
        // spanning subsets of edges.
        let mut count = F::zero();
        let s = subset.len();
        let mut prefix = Vec::with_capacity(g0.n() - 1);
        for_each_combination(s, g0.n() - 1, &mut prefix, &mut |t| {
            let global: Vec<usize> = t.iter().map(|&j| subset[j]).collect();
            if spanning_subset(g0, &global) {
                count = count
                    + global
                        .iter()
                        .map(|&i| g0.edges()[i].weight)
                        .fold(F::one(), |a, b| a * b);
            }
        });
        total = total + prob * count;
    }
    Ok(total)
}

/// Exact check of the generalized determinant expectation: for independent
/// Bernoulli(p_i) indicators s_i, E[det(sum s_i y_i z_i^T)] equals
/// det(sum p_i y_i z_i^T). Returns (exhaustive lhs, closed-form rhs).
pub fn expected_det_bruteforce<F: Real>(
    pairs: &[(Vec<F>, Vec<F>)],
    probs: &[F],
) -> Result<(F, F)> {
    let m = pairs.len();
    if m > 12 {
        return Err(Error::GuardExceeded(format!(
            "determinant expectation limited to m <= 12; got {m}"
        )));
    }
    if probs.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: probs.len(),
        });
    }
    let n = pairs.first().map_or(0, |(y, _)| y.len());
    if n == 0 || n > 4 {
        return Err(Error::GuardExceeded(format!(
            "determinant expectation limited to 1 <= n <= 4; got {n}"
        )));
    }
    for (y, z) in pairs {
        if y.len() != n || z.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: y.len().min(z.len()),
            });
        }
    }
    for &p in probs {
        if p < F::zero() || p > F::one() {
            return Err(Error::InvalidInput(format!(
                "probability {p} outside [0, 1]"
            )));
        }
    }
    let accumulate = |scale: &dyn Fn(usize) -> F| -> Matrix<F> {
        let mut a = Matrix::zeros(n, n);
        for (i, (y, z)) in pairs.iter().enumerate() {
            let s = scale(i);
            if s == F::zero() {
                continue;
            }
            for r in 0..n {
                for c in 0..n {
                    a[(r, c)] = a[(r, c)] + s * y[r] * z[c];
                }
            }
        }
        a
    };
    let mut lhs = F::zero();
    for mask in 0u32..(1u32 << m) {
        let mut prob = F::one();
        for i in 0..m {
            prob = prob
                * if mask >> i & 1 == 1 {
                    probs[i]
                } else {
                    F::one() - probs[i]
                };
        }
        if prob == F::zero() {
            continue;
        }
        let a = accumulate(&|i| {
            if mask >> i & 1 == 1 {
                F::one()
            } else {
                F::zero()
            }
        });
        lhs = lhs + prob * determinant(&a);
    }
    let rhs = determinant(&accumulate(&|i| probs[i]));
    Ok((lhs, rhs))
}
