//! End-to-end checks of the library's mathematical guarantees on randomized
//! instances, each printing a single pass line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use treeopt::certificate::{dual_bounds, esp_bounds, wolsey_gamma, zeta};
use treeopt::convex::{
    objective_gradient, project_capped_simplex, round_dual, round_randomized, round_topk,
    solve_dual_relaxation, solve_relaxation, SolverOptions, SolverStatus,
};
use treeopt::generate::{random_candidates, random_connected_graph, WeightDist};
use treeopt::graph::{Edge, WeightedGraph};
use treeopt::greedy::{greedy_dual_esp, greedy_esp, CandidateSet};
use treeopt::oracle::{
    enumerate_spanning_trees, exhaustive_dual_esp, exhaustive_esp, expected_det_bruteforce,
    expected_tree_count_bruteforce,
};
use treeopt::treeconn::{
    expected_tree_count, tau_after_add, tau_after_remove, tree_connectivity, tree_count,
    EdgeProbability,
};

fn complete_graph(n: usize) -> WeightedGraph<f64> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            edges.push(Edge::new(u, v, 1.0).unwrap());
        }
    }
    WeightedGraph::new(n, edges).unwrap()
}

fn small_weighted_graph(rng: &mut ChaCha8Rng, seed: u64) -> WeightedGraph<f64> {
    let n = rng.gen_range(3..=6usize);
    let max_m = (n * (n - 1) / 2).min(12);
    let m = rng.gen_range(n - 1..=max_m);
    random_connected_graph(n, m, WeightDist::LogNormal(0.5), seed).unwrap()
}

/// Base graph plus a disjoint unit-weight candidate set drawn from the
/// complement, sized for exhaustive search.
fn small_instance(seed: u64) -> Option<(WeightedGraph<f64>, CandidateSet<f64>, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let n = rng.gen_range(4..=6usize);
    let max_m = n * (n - 1) / 2;
    let m = rng.gen_range(n - 1..=max_m.saturating_sub(2).max(n - 1));
    let g = random_connected_graph(n, m, WeightDist::LogNormal(0.4), seed).unwrap();
    let free = max_m - m;
    if free == 0 {
        return None;
    }
    let c = rng.gen_range(1..=free.min(8));
    let cands = random_candidates(&g, c, seed.wrapping_add(77)).unwrap();
    let k = rng.gen_range(1..=c.min(4));
    Some((g, cands, k))
}

#[test]
fn complete_graph_tree_counts_match_closed_form() {
    for n in 2..=8usize {
        let expected = (n as f64).powi(n as i32 - 2);
        let got = tree_count(&complete_graph(n));
        let rel = ((got - expected) / expected).abs();
        assert!(rel <= 1e-9, "n = {n}: {got} vs {expected}");
    }
    println!("PASS complete-graph tree counts match the closed form for n = 2..8");
}

#[test]
fn determinant_tree_count_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    for trial in 0..200u64 {
        let g = small_weighted_graph(&mut rng, 2_000 + trial);
        let det = tree_count(&g);
        let listed = enumerate_spanning_trees(&g).unwrap().total_value();
        let rel = ((det - listed) / listed.max(1.0)).abs();
        assert!(rel <= 1e-9, "trial {trial}: {det} vs {listed}");
    }
    println!("PASS determinant tree counts match enumeration on 200 weighted graphs");
}

#[test]
fn incremental_add_remove_match_recomputation() {
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let mut checked = 0;
    for trial in 0..200u64 {
        let g = small_weighted_graph(&mut rng, 4_000 + trial);
        let tau = tree_connectivity(&g);
        let factor =
            treeopt::linalg::cholesky(&g.reduced_laplacian(g.default_anchor()).unwrap().matrix)
                .unwrap();
        let n = g.n();
        // addition: first missing pair, unit weight
        'add: for u in 0..n {
            for v in (u + 1)..n {
                if !g.contains_edge(u, v) {
                    let e = Edge::new(u, v, 1.0).unwrap();
                    let fast = tau_after_add(&g, &factor, tau.value(), &e).unwrap();
                    let slow = tree_connectivity(&g.with_edge_added(e).unwrap());
                    assert!((fast - slow.value()).abs() <= 1e-9, "trial {trial}");
                    break 'add;
                }
            }
        }
        // removal: every edge, including bridges
        for e in g.edges() {
            let fast = tau_after_remove(&g, &factor, tau.value(), e).unwrap();
            let slow = tree_connectivity(&g.with_edge_removed(e.u, e.v).unwrap());
            assert_eq!(fast.is_connected, slow.is_connected, "trial {trial}");
            if slow.is_connected {
                assert!(
                    (fast.value() - slow.value()).abs() <= 1e-9,
                    "trial {trial}: {} vs {}",
                    fast.value(),
                    slow.value()
                );
            }
            checked += 1;
        }
    }
    assert!(checked > 200);
    println!("PASS incremental add/remove agree with recomputation on 200 graphs");
}

#[test]
fn expectation_identities_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    for trial in 0..100u64 {
        let g = small_weighted_graph(&mut rng, 6_000 + trial);
        let probs: Vec<EdgeProbability<f64>> = (0..g.edge_count())
            .map(|i| EdgeProbability {
                edge_index: i,
                p: rng.gen_range(0.0..=1.0),
            })
            .collect();
        let closed = expected_tree_count(&g, &probs).unwrap();
        let brute = expected_tree_count_bruteforce(&g, &probs).unwrap();
        assert!(
            (closed - brute).abs() <= 1e-9 * brute.abs().max(1.0),
            "trial {trial}: {closed} vs {brute}"
        );
    }
    for trial in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(7_000 + trial);
        let m = rng.gen_range(1..=6usize);
        let n = rng.gen_range(1..=4usize);
        let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..m)
            .map(|_| {
                (
                    (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect(),
                    (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect(),
                )
            })
            .collect();
        let probs: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..=1.0)).collect();
        let (lhs, rhs) = expected_det_bruteforce(&pairs, &probs).unwrap();
        assert!(
            (lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0),
            "trial {trial}: {lhs} vs {rhs}"
        );
    }
    println!("PASS tree-count and determinant expectation identities hold on 200 instances");
}

#[test]
fn tree_count_supermodular_and_log_gain_submodular() {
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    let mut triples = 0;
    let mut seed = 8_000u64;
    while triples < 500 {
        seed += 1;
        let Some((base, cands, _)) = small_instance(seed) else {
            continue;
        };
        if cands.len() < 2 {
            continue;
        }
        // nested S subset T, extra edge e outside T
        let c = cands.len();
        let e_idx = rng.gen_range(0..c);
        let mut rest: Vec<usize> = (0..c).filter(|&i| i != e_idx).collect();
        let t_size = rng.gen_range(0..=rest.len());
        for i in 0..rest.len() {
            let j = rng.gen_range(i..rest.len());
            rest.swap(i, j);
        }
        let t_set: Vec<usize> = rest[..t_size].to_vec();
        let s_size = rng.gen_range(0..=t_size);
        let s_set: Vec<usize> = t_set[..s_size].to_vec();

        let with = |set: &[usize], extra: bool| -> WeightedGraph<f64> {
            let mut g = base.clone();
            for &i in set {
                g = g.with_edge_added(cands.edges()[i].clone()).unwrap();
            }
            if extra {
                g = g.with_edge_added(cands.edges()[e_idx].clone()).unwrap();
            }
            g
        };
        let t_s = tree_count(&with(&s_set, false));
        let t_se = tree_count(&with(&s_set, true));
        let t_t = tree_count(&with(&t_set, false));
        let t_te = tree_count(&with(&t_set, true));
        let scale = t_te.abs().max(1.0);
        // increasing marginal returns of the raw count
        assert!(
            t_te - t_t >= t_se - t_s - 1e-9 * scale,
            "supermodularity violated at seed {seed}"
        );
        // monotone, diminishing marginal returns of the log
        let tau_s = tree_connectivity(&with(&s_set, false)).value();
        let tau_t = tree_connectivity(&with(&t_set, false)).value();
        assert!(tau_t >= tau_s - 1e-9, "monotonicity violated at seed {seed}");
        let gain_s = tree_connectivity(&with(&s_set, true)).value() - tau_s;
        let gain_t = tree_connectivity(&with(&t_set, true)).value() - tau_t;
        assert!(
            gain_s >= gain_t - 1e-9,
            "submodularity violated at seed {seed}: {gain_s} < {gain_t}"
        );
        triples += 1;
    }
    println!("PASS supermodular count / submodular monotone log-gain on 500 nested triples");
}

#[test]
fn greedy_achieves_constant_factor_of_optimum() {
    let mut done = 0;
    let mut seed = 0u64;
    while done < 100 {
        seed += 1;
        let Some((base, cands, k)) = small_instance(seed) else {
            continue;
        };
        let sel = greedy_esp(&base, &cands, k).unwrap();
        let (opt, _) = exhaustive_esp(&base, &cands, k).unwrap();
        let phi_greedy = sel.tau_final - sel.tau_init;
        let phi_opt = opt - sel.tau_init;
        let factor = 1.0 - (-1.0f64).exp();
        assert!(
            phi_greedy >= factor * phi_opt - 1e-9,
            "seed {seed}: {phi_greedy} < {factor} * {phi_opt}"
        );
        assert!(
            factor * opt + (1.0 - factor) * sel.tau_init <= sel.tau_final + 1e-9,
            "seed {seed}: refined bound violated"
        );
        done += 1;
    }
    println!("PASS greedy gain within (1 - 1/e) of optimum on 100 brute-forced instances");
}

#[test]
fn certificates_bracket_the_optimum() {
    let opts = SolverOptions::default();
    let mut done = 0;
    let mut seed = 0u64;
    while done < 100 {
        seed += 1;
        let Some((base, cands, k)) = small_instance(seed) else {
            continue;
        };
        let sel = greedy_esp(&base, &cands, k).unwrap();
        let relax = solve_relaxation(&base, &cands, k, &opts).unwrap();
        assert_eq!(relax.status, SolverStatus::Converged, "seed {seed}");
        assert!(relax.stationarity <= 1e-6, "seed {seed}");
        let picked = round_topk(&relax.pi_star, k).unwrap();
        let mut rounded = base.clone();
        for &i in &picked {
            rounded = rounded.with_edge_added(cands.edges()[i].clone()).unwrap();
        }
        let tau_rounded = tree_connectivity(&rounded).value();
        let cert = esp_bounds(
            sel.tau_init,
            sel.tau_final,
            Some(tau_rounded),
            Some(relax.bound_envelope()),
        )
        .unwrap();
        let (opt, _) = exhaustive_esp(&base, &cands, k).unwrap();
        assert!(cert.lower <= opt + 1e-5, "seed {seed}: lower {} > {opt}", cert.lower);
        assert!(opt <= cert.upper + 1e-5, "seed {seed}: {opt} > upper {}", cert.upper);
        let z = zeta::<f64>();
        let analytic = z * sel.tau_final + (1.0 - z) * sel.tau_init;
        assert!(cert.upper <= analytic.max(relax.objective) + 1e-9, "seed {seed}");
        done += 1;
    }
    println!("PASS certificates bracket the exact optimum on 100 instances");
}

#[test]
fn solver_gradient_projection_and_stationarity() {
    // gradient vs central differences on random interior points
    let mut rng = ChaCha8Rng::seed_from_u64(1008);
    for trial in 0..20u64 {
        let Some((base, cands, _)) = small_instance(11_000 + trial) else {
            continue;
        };
        let pi: Vec<f64> = (0..cands.len()).map(|_| rng.gen_range(0.1..0.9)).collect();
        let (_, grad) = objective_gradient(&base, &cands, &pi).unwrap();
        let h = 1e-5;
        for j in 0..pi.len() {
            let mut hi = pi.clone();
            let mut lo = pi.clone();
            hi[j] += h;
            lo[j] -= h;
            let eval = |p: &[f64]| {
                let (v, _) = objective_gradient(&base, &cands, p).unwrap();
                v
            };
            let fd = (eval(&hi) - eval(&lo)) / (2.0 * h);
            assert!((grad[j] - fd).abs() <= 1e-6, "trial {trial} coord {j}");
        }
    }
    // projection feasibility and idempotence
    for trial in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(12_000 + trial);
        let c = rng.gen_range(1..=10usize);
        let y: Vec<f64> = (0..c).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let budget = rng.gen_range(0.0..=c as f64);
        let p = project_capped_simplex(&y, budget).unwrap();
        let sum: f64 = p.iter().sum();
        assert!((sum - budget).abs() <= 1e-10, "trial {trial}");
        assert!(p.iter().all(|&v| (-1e-10..=1.0 + 1e-10).contains(&v)));
        let pp = project_capped_simplex(&p, budget).unwrap();
        for (a, b) in p.iter().zip(&pp) {
            assert!((a - b).abs() <= 1e-10, "trial {trial}");
        }
    }
    // stationarity on the certificate instances
    let opts = SolverOptions::default();
    let mut done = 0;
    let mut seed = 0u64;
    while done < 100 {
        seed += 1;
        let Some((base, cands, k)) = small_instance(seed) else {
            continue;
        };
        let relax = solve_relaxation(&base, &cands, k, &opts).unwrap();
        assert!(relax.stationarity <= 1e-6, "seed {seed}: {}", relax.stationarity);
        done += 1;
    }
    println!("PASS gradient, projection, and stationarity checks");
}

#[test]
fn randomized_rounding_matches_relaxation_in_expectation() {
    let base = random_connected_graph::<f64>(8, 12, WeightDist::Unit, 42).unwrap();
    let cands = random_candidates(&base, 8, 43).unwrap();
    let k = 3usize;
    let relax = solve_relaxation(&base, &cands, k, &SolverOptions::default()).unwrap();
    let expected_count: f64 = relax.sum_pi();
    let expected_tw = relax.objective.exp();

    let trials = 10_000usize;
    let mut tw = Vec::with_capacity(trials);
    let mut counts = Vec::with_capacity(trials);
    let mut under = 0usize;
    let mut over = 0usize;
    for t in 0..trials {
        let picked = round_randomized(&relax.pi_star, t as u64);
        counts.push(picked.len() as f64);
        if (picked.len() as f64) < 0.5 * expected_count {
            under += 1;
        }
        if (picked.len() as f64) > 1.5 * expected_count {
            over += 1;
        }
        let mut g = base.clone();
        for &i in &picked {
            g = g.with_edge_added(cands.edges()[i].clone()).unwrap();
        }
        tw.push(tree_count(&g));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let se = |v: &[f64], m: f64| {
        (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
            / (v.len() as f64).sqrt()
    };
    let m_tw = mean(&tw);
    assert!(
        (m_tw - expected_tw).abs() <= 3.0 * se(&tw, m_tw),
        "tree-count mean {m_tw} vs {expected_tw}"
    );
    let m_ct = mean(&counts);
    assert!(
        (m_ct - expected_count).abs() <= 3.0 * se(&counts, m_ct).max(1e-12),
        "edge-count mean {m_ct} vs {expected_count}"
    );
    // tail frequencies against exp(-eps^2 k / 2) and exp(-delta^2 k / 3)
    let under_bound = (-0.25 * expected_count / 2.0).exp();
    let over_bound = (-0.25 * expected_count / 3.0).exp();
    assert!((under as f64 / trials as f64) <= under_bound);
    assert!((over as f64 / trials as f64) <= over_bound);
    println!("PASS randomized rounding matches the relaxation in expectation with bounded tails");
}

#[test]
fn dual_greedy_and_certificates_bracket_minimum_cardinality() {
    let opts = SolverOptions::default();
    let mut done = 0;
    let mut seed = 0u64;
    while done < 50 {
        seed += 1;
        let Some((base, cands, _)) = small_instance(seed.wrapping_mul(13).wrapping_add(3)) else {
            continue;
        };
        // target: a fraction of the full achievable gain
        let mut full = base.clone();
        for e in cands.edges() {
            full = full.with_edge_added(e.clone()).unwrap();
        }
        let tau_init = tree_connectivity(&base).value();
        let max_gain = tree_connectivity(&full).value() - tau_init;
        let frac = [0.35, 0.6, 0.85][done % 3];
        let delta = frac * max_gain;
        if delta <= 1e-6 {
            continue;
        }
        let dual = greedy_dual_esp(&base, &cands, delta).unwrap();
        let k_greedy = dual.selection.chosen.len();
        let (k_opt, _) = exhaustive_dual_esp(&base, &cands, delta).unwrap();
        let gamma = wolsey_gamma(dual.target_gain, dual.phi_pre_terminal).unwrap();
        assert!(
            k_greedy as f64 <= gamma * k_opt as f64 + 1e-9,
            "seed {seed}: {k_greedy} > {gamma} * {k_opt}"
        );
        let relax = solve_dual_relaxation(&base, &cands, delta, &opts).unwrap();
        let k_cvx = round_dual(&relax.pi_star, &base, &cands, delta).unwrap().len();
        let cert = dual_bounds(k_greedy, Some(k_cvx), Some(relax.sum_pi()), gamma).unwrap();
        assert!(
            cert.lower <= k_opt as f64 + 1e-9 && (k_opt as f64) <= cert.upper + 1e-9,
            "seed {seed}: [{}, {}] misses {k_opt}",
            cert.lower,
            cert.upper
        );
        done += 1;
    }
    println!("PASS dual greedy factor and cardinality certificates on 50 instances");
}
