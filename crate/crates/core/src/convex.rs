//! Convex relaxations of the edge selection problems, solved by projected
//! gradient ascent with Armijo backtracking, plus deterministic and
//! randomized rounding of the fractional selectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{edge_vector, WeightedGraph};
use crate::greedy::{CandidateSet, PartitionMatroid};
use crate::linalg::{cholesky, Matrix};
use crate::scalar::Real;
use crate::treeconn::tree_connectivity;

/// Fractional selector over the candidate set, componentwise in [0, 1].
#[derive(Clone, Debug, Serialize)]
pub struct SelectorVector<F> {
    pub pi: Vec<F>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStatus {
    Converged,
    MaxItersReached,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelaxationSolution<F> {
    pub pi_star: Vec<F>,
    /// log det L(pi_star)
    pub objective: F,
    pub iterations: usize,
    /// Norm of the unit-step projected gradient at exit.
    pub stationarity: F,
    pub budget_residual: F,
    pub status: SolverStatus,
}

impl<F: Real> RelaxationSolution<F> {
    pub fn sum_pi(&self) -> F {
        self.pi_star.iter().copied().sum()
    }

    /// Conservative upper-bound envelope: the raw objective is only a valid
    /// bound on the relaxation optimum at a converged stationary point, so a
    /// truncated run widens it by stationarity * sqrt(c).
    pub fn bound_envelope(&self) -> F {
        match self.status {
            SolverStatus::Converged => self.objective,
            SolverStatus::MaxItersReached => {
                self.objective + self.stationarity * F::real(self.pi_star.len() as f64).sqrt()
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions<F> {
    pub tol: F,
    pub max_iters: usize,
}

impl<F: Real> Default for SolverOptions<F> {
    fn default() -> Self {
        SolverOptions {
            tol: F::real(1e-6),
            max_iters: 2000,
        }
    }
}

/// Reduced weighted Laplacian of base + candidates with candidate weights
/// scaled by the selector.
pub fn build_l_pi<F: Real>(
    base: &WeightedGraph<F>,
    cands: &CandidateSet<F>,
    pi: &[F],
) -> Result<Matrix<F>> {
    if pi.len() != cands.len() {
        return Err(Error::DimensionMismatch {
            expected: cands.len(),
            got: pi.len(),
        });
    }
    let anchor = base.default_anchor();
    let mut m = base.reduced_laplacian(anchor)?.matrix;
    for (e, &p) in cands.edges().iter().zip(pi) {
        if p == F::zero() {
            continue;
        }
        let a = edge_vector(e, anchor, base.n());
        m.add_scaled_outer(&a, p * e.weight);
    }
    Ok(m)
}

/// Objective log det L(pi) and its gradient: grad_j = w_j * delta_j(pi), the
/// candidate's effective resistance in the fractional graph. One
/// factorization plus c forward solves.
pub fn objective_gradient<F: Real>(
    base: &WeightedGraph<F>,
    cands: &CandidateSet<F>,
    pi: &[F],
) -> Result<(F, Vec<F>)> {
    let m = build_l_pi(base, cands, pi)?;
    let factor = cholesky(&m)?;
    let value = factor.logdet();
    let anchor = base.default_anchor();
    let mut grad = Vec::with_capacity(cands.len());
    for e in cands.edges() {
        let a = edge_vector(e, anchor, base.n());
        let x = factor.forward_solve(&a)?;
        let delta: F = x.iter().map(|&v| v * v).sum();
        grad.push(e.weight * delta);
    }
    Ok((value, grad))
}

fn objective_value<F: Real>(
    base: &WeightedGraph<F>,
    cands: &CandidateSet<F>,
    pi: &[F],
) -> Result<F> {
    let m = build_l_pi(base, cands, pi)?;
    Ok(cholesky(&m)?.logdet())
}

/// Euclidean projection onto { 0 <= x_i <= 1, sum x_i = budget } by bisection
/// on the shift in clip(y - t, 0, 1).
pub fn project_capped_simplex<F: Real>(y: &[F], budget: F) -> Result<Vec<F>> {
    let c = y.len();
    if budget < F::zero() || budget > F::real(c as f64) {
        return Err(Error::InvalidInput(format!(
            "budget {budget} outside [0, {c}]"
        )));
    }
    if c == 0 {
        return Ok(Vec::new());
    }
    let clip_sum = |t: F| -> F {
        y.iter()
            .map(|&v| (v - t).max(F::zero()).min(F::one()))
            .sum()
    };
    let mut lo = y
        .iter()
        .fold(F::infinity(), |a, &b| a.min(b))
        - F::one();
    let mut hi = y.iter().fold(F::neg_infinity(), |a, &b| a.max(b));
    if clip_sum(lo) <= budget {
        // Entire vector clips below budget only at the extreme; handle the
        // budget == c corner where every coordinate saturates at 1.
        return Ok(y
            .iter()
            .map(|&v| (v - lo).max(F::zero()).min(F::one()))
            .collect());
    }
    for _ in 0..200 {
        let mid = (lo + hi) / F::two();
        if clip_sum(mid) > budget {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= F::epsilon() * (F::one() + hi.abs()) {
            break;
        }
    }
    let t = (lo + hi) / F::two();
    Ok(y
        .iter()
        .map(|&v| (v - t).max(F::zero()).min(F::one()))
        .collect())
}

fn clip_box<F: Real>(y: &[F]) -> Vec<F> {
    y.iter()
        .map(|&v| v.max(F::zero()).min(F::one()))
        .collect()
}

/// Per-block projection for the matroid feasible set: clip to the box, then
/// any block exceeding its budget is projected onto the block's capped
/// simplex with the budget as an equality.
fn project_matroid<F: Real>(y: &[F], matroid: &PartitionMatroid) -> Vec<F> {
    let mut out = clip_box(y);
    for (block, &budget) in matroid.blocks().iter().zip(matroid.budgets()) {
        let sum: F = block.iter().map(|&i| out[i]).sum();
        if sum > F::real(budget as f64) {
            let sub: Vec<F> = block.iter().map(|&i| y[i]).collect();
            let proj = project_capped_simplex(&sub, F::real(budget as f64))
                .expect("block budget within range");
            for (&i, &v) in block.iter().zip(&proj) {
                out[i] = v;
            }
        }
    }
    out
}

const ARMIJO_C1: f64 = 1e-4;
const ARMIJO_SHRINK: f64 = 0.5;
const MIN_STEP: f64 = 1e-14;

struct PgaOutcome<F> {
    pi: Vec<F>,
    iterations: usize,
    stationarity: F,
    status: SolverStatus,
}

/// Projected gradient ascent with backtracking. `eval` returns (value,
/// gradient) of the concave objective; an Err from `eval` (singular Laplacian
/// at the feasible-set boundary) rejects the step during line search.
fn projected_gradient_ascent<F, E, P>(
    init: Vec<F>,
    eval: E,
    project: P,
    opts: &SolverOptions<F>,
) -> Result<PgaOutcome<F>>
where
    F: Real,
    E: Fn(&[F]) -> Result<(F, Vec<F>)>,
    P: Fn(&[F]) -> Vec<F>,
{
    let c1 = F::real(ARMIJO_C1);
    let mut pi = project(&init);
    let (mut f, mut g) = eval(&pi)?;
    let mut stationarity = F::infinity();
    for iter in 0..opts.max_iters {
        let trial: Vec<F> = pi.iter().zip(&g).map(|(&p, &d)| p + d).collect();
        let pg: Vec<F> = project(&trial)
            .iter()
            .zip(&pi)
            .map(|(&a, &b)| a - b)
            .collect();
        stationarity = pg.iter().map(|&v| v * v).sum::<F>().sqrt();
        if stationarity <= opts.tol {
            return Ok(PgaOutcome {
                pi,
                iterations: iter,
                stationarity,
                status: SolverStatus::Converged,
            });
        }
        let mut step = F::one();
        let mut accepted = None;
        while step > F::real(MIN_STEP) {
            let trial: Vec<F> = pi
                .iter()
                .zip(&g)
                .map(|(&p, &d)| p + step * d)
                .collect();
            let cand = project(&trial);
            let dir_dot: F = g
                .iter()
                .zip(cand.iter().zip(&pi))
                .map(|(&d, (&a, &b))| d * (a - b))
                .collect::<Vec<F>>()
                .into_iter()
                .sum();
            match eval(&cand) {
                Ok((fc, gc)) if fc >= f + c1 * dir_dot => {
                    accepted = Some((cand, fc, gc));
                    break;
                }
                _ => step = step * F::real(ARMIJO_SHRINK),
            }
        }
        match accepted {
            Some((cand, fc, gc)) => {
                pi = cand;
                f = fc;
                g = gc;
            }
            // Line search stalled: no ascent direction at float resolution.
            None => {
                let status = if stationarity <= opts.tol {
                    SolverStatus::Converged
                } else {
                    SolverStatus::MaxItersReached
                };
                return Ok(PgaOutcome {
                    pi,
                    iterations: iter,
                    stationarity,
                    status,
                });
            }
        }
    }
    Ok(PgaOutcome {
        pi,
        iterations: opts.max_iters,
        stationarity,
        status: SolverStatus::MaxItersReached,
    })
}

fn solve_budget<F: Real>(
    base: &WeightedGraph<F>,
    cands: &CandidateSet<F>,
    budget: F,
    opts: &SolverOptions<F>,
) -> Result<RelaxationSolution<F>> {
    let c = cands.len();
    if budget < F::zero() || budget > F::real(c as f64) {
        return Err(Error::InvalidInput(format!(
            "budget {budget} outside [0, {c}]"
        )));
    }
    let init = vec![budget / F::real(c.max(1) as f64); c];
    let out = projected_gradient_ascent(
        init,
        |pi| objective_gradient(base, cands, pi),
        |y| project_capped_simplex(y, budget).expect("budget validated"),
        opts,
    )?;
    let objective = objective_value(base, cands, &out.pi)?;
    let sum: F = out.pi.iter().copied().sum();
    Ok(RelaxationSolution {
        pi_star: out.pi,
        objective,
        iterations: out.iterations,
        stationarity: out.stationarity,
        budget_residual: (sum - budget).abs(),
        status: out.status,
    })
}

/// Budgeted relaxation: maximize log det L(pi) over the capped simplex
/// sum pi = k. The converged objective upper-bounds the combinatorial
/// optimum.
pub fn solve_relaxation<F: Real>(
    base: &WeightedGraph<F>,
    cands: &CandidateSet<F>,
    k: usize,
    opts: &SolverOptions<F>,
) -> Result<RelaxationSolution<F>> {
    if k > cands.len() {
        return Err(Error::BudgetTooLarge { k, c: cands.len() });
    }
    solve_budget(base, cands, F::real(k as f64), opts)
}

/// l1-penalized relaxation: maximize log det L(pi) - lambda * sum pi over
/// the box. Larger lambda gives (weakly) sparser selectors.
pub fn solve_penalized<F: Real>(
    base: &WeightedGraph<F>,
    cands: &CandidateSet<F>,
    lambda: F,
    opts: &SolverOptions<F>,
) -> Result<RelaxationSolution<F>> {
    if lambda < F::zero() {
        return Err(Error::InvalidInput(format!(
            "penalty must be non-negative, got {lambda}"
        )));
    }
    let c = cands.len();
    let init = vec![F::real(0.5); c];
    let out = projected_gradient_ascent(
        init,
        |pi| {
            let (v, mut g) = objective_gradient(base, cands, pi)?;
            let sum: F = pi.iter().copied().sum();
            for d in &mut g {
                *d = *d - lambda;
            }
            Ok((v - lambda * sum, g))
        },
        |y| clip_box(y),
        opts,
    )?;
    let objective = objective_value(base, cands, &out.pi)?;
    Ok(RelaxationSolution {
        pi_star: out.pi,
        objective,
        iterations: out.iterations,
        stationarity: out.stationarity,
        budget_residual: F::zero(),
        status: out.status,
    })
}

/// Partition-matroid relaxation: per-block inequality budgets. The converged
/// objective upper-bounds the matroid-constrained combinatorial optimum.
pub fn solve_relaxation_matroid<F: Real>(
    base: &WeightedGraph<F>,
    cands: &CandidateSet<F>,
    matroid: &PartitionMatroid,
    opts: &SolverOptions<F>,
) -> Result<RelaxationSolution<F>> {
    let c = cands.len();
    let init = vec![F::real(0.5); c];
    let out = projected_gradient_ascent(
        init,
        |pi| objective_gradient(base, cands, pi),
        |y| project_matroid(y, matroid),
        opts,
    )?;
    let objective = objective_value(base, cands, &out.pi)?;
    Ok(RelaxationSolution {
        pi_star: out.pi,
        objective,
        iterations: out.iterations,
        stationarity: out.stationarity,
        budget_residual: F::zero(),
        status: out.status,
    })
}

/// Bisection tolerance on the dual budget.
const DUAL_BISECT_TOL: f64 = 1e-6;

/// Minimum-budget relaxation: find the smallest budget b whose budgeted
/// relaxation reaches log det >= delta + tau_init, by bisection over b.
/// sum(pi_star) lower-bounds the integer dual optimum.
pub fn solve_dual_relaxation<F: Real>(
    base: &WeightedGraph<F>,
    cands: &CandidateSet<F>,
    delta: F,
    opts: &SolverOptions<F>,
) -> Result<RelaxationSolution<F>> {
    if !base.is_connected() {
        return Err(Error::Disconnected);
    }
    let tau_init = tree_connectivity(base).value();
    let target = tau_init + delta;
    let feas_tol = F::real(1e-9) * F::one().max(target.abs());
    if delta <= F::zero() {
        let c = cands.len();
        return Ok(RelaxationSolution {
            pi_star: vec![F::zero(); c],
            objective: tau_init,
            iterations: 0,
            stationarity: F::zero(),
            budget_residual: F::zero(),
            status: SolverStatus::Converged,
        });
    }
    // Feasibility at the full candidate set, evaluated exactly at pi = 1.
    let full = objective_value(base, cands, &vec![F::one(); cands.len()])?;
    if full < target - feas_tol {
        return Err(Error::Infeasible(format!(
            "even the full candidate set reaches only {full} < target {target}"
        )));
    }
    let mut lo = F::zero();
    let mut hi = F::real(cands.len() as f64);
    let tol = F::real(DUAL_BISECT_TOL);
    while hi - lo > tol {
        let mid = (lo + hi) / F::two();
        let sol = solve_budget(base, cands, mid, opts)?;
        if sol.objective >= target - feas_tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    solve_budget(base, cands, hi, opts)
}

/// Indices of the k largest selectors; ties break to the lowest index.
pub fn round_topk<F: Real>(pi_star: &[F], k: usize) -> Result<Vec<usize>> {
    if k > pi_star.len() {
        return Err(Error::BudgetTooLarge {
            k,
            c: pi_star.len(),
        });
    }
    let mut idx: Vec<usize> = (0..pi_star.len()).collect();
    idx.sort_by(|&a, &b| {
        pi_star[b]
            .partial_cmp(&pi_star[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut out: Vec<usize> = idx.into_iter().take(k).collect();
    out.sort_unstable();
    Ok(out)
}

/// Independent Bernoulli(pi_i) draws, seeded and reproducible.
pub fn round_randomized<F: Real>(pi_star: &[F], rng_seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    pi_star
        .iter()
        .enumerate()
        .filter_map(|(i, &p)| {
            let u: f64 = rng.gen();
            (u < p.to_f64().unwrap_or(0.0)).then_some(i)
        })
        .collect()
}

/// Randomized rounding repaired to exactly k edges: drop the lowest-selector
/// picks or add the highest-selector leftovers until |E| = k.
pub fn round_randomized_repair<F: Real>(pi_star: &[F], k: usize, rng_seed: u64) -> Vec<usize> {
    let mut selected = round_randomized(pi_star, rng_seed);
    let by_pi_asc = |a: &usize, b: &usize| {
        pi_star[*a]
            .partial_cmp(&pi_star[*b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(b.cmp(a))
    };
    while selected.len() > k {
        let worst = *selected.iter().min_by(|a, b| by_pi_asc(a, b)).unwrap();
        selected.retain(|&i| i != worst);
    }
    if selected.len() < k {
        let mut rest: Vec<usize> = (0..pi_star.len())
            .filter(|i| !selected.contains(i))
            .collect();
        rest.sort_by(|a, b| by_pi_asc(a, b).reverse());
        for i in rest {
            if selected.len() == k {
                break;
            }
            selected.push(i);
        }
    }
    selected.sort_unstable();
    selected
}

/// Deterministic rounding for the dual: take edges in decreasing selector
/// order until the accumulated tree-connectivity gain reaches delta.
pub fn round_dual<F: Real>(
    pi_star: &[F],
    base: &WeightedGraph<F>,
    cands: &CandidateSet<F>,
    delta: F,
) -> Result<Vec<usize>> {
    if pi_star.len() != cands.len() {
        return Err(Error::DimensionMismatch {
            expected: cands.len(),
            got: pi_star.len(),
        });
    }
    let order = round_topk(pi_star, pi_star.len()).and_then(|_| {
        let mut idx: Vec<usize> = (0..pi_star.len()).collect();
        idx.sort_by(|&a, &b| {
            pi_star[b]
                .partial_cmp(&pi_star[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        Ok(idx)
    })?;
    if !base.is_connected() {
        return Err(Error::Disconnected);
    }
    let eps = F::real(1e-9) * F::one().max(delta.abs());
    let anchor = base.default_anchor();
    let mut factor = cholesky(&base.reduced_laplacian(anchor)?.matrix)?;
    let mut gain = F::zero();
    let mut picked = Vec::new();
    if delta <= F::zero() {
        return Ok(picked);
    }
    for idx in order {
        let e = &cands.edges()[idx];
        let a = edge_vector(e, anchor, base.n());
        let r = crate::treeconn::effective_resistance(&factor, &a, e.weight)?;
        let mut sa = a;
        let s = e.weight.sqrt();
        for v in &mut sa {
            *v = *v * s;
        }
        factor = factor.update(&sa)?;
        gain = gain + r.ln_1p();
        picked.push(idx);
        if gain >= delta - eps {
            picked.sort_unstable();
            return Ok(picked);
        }
    }
    Err(Error::Infeasible(format!(
        "candidate list exhausted at gain {gain} < delta {delta}"
    )))
}
