//! Single-run subcommands: edge addition, edge deletion, dual target, and
//! the debugging oracle.

use std::path::{Path, PathBuf};
use std::time::Instant;

use treeopt::certificate::{dual_bounds, esp_bounds, wolsey_gamma, Certificate};
use treeopt::convex::{
    round_dual, round_randomized_repair, round_topk, solve_dual_relaxation, solve_penalized,
    solve_relaxation, RelaxationSolution,
};
use treeopt::error::Error;
use treeopt::generate::complement_candidates;
use treeopt::graph::{parse_graph, transform_minus_to_plus};
use treeopt::greedy::{
    greedy_delete, greedy_dual_esp_with_mode, greedy_esp, CandidateOrigin, DualStatus,
    DualTargetMode,
};
use treeopt::oracle::{enumerate_spanning_trees, exhaustive_dual_esp, exhaustive_esp};
use treeopt::treeconn::{tree_connectivity, tree_count};
use treeopt::{Candidates64, Edge64, Graph64, Result};

use crate::report::{write_report, EdgeOut, InstanceOut, MethodOut, RunReport, SolverOut, SCHEMA_VERSION};
use crate::{Method, SolverFlags};

pub fn load_graph(path: &Path) -> Result<Graph64> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let parsed = parse_graph(&text)?;
    if parsed.loops_dropped > 0 || parsed.parallel_merged > 0 {
        eprintln!(
            "note: {}: dropped {} self-loops, merged {} parallel edges",
            path.display(),
            parsed.loops_dropped,
            parsed.parallel_merged
        );
    }
    Ok(parsed.graph)
}

fn load_edge_set(path: &Path, n: usize, origin: CandidateOrigin) -> Result<Candidates64> {
    let g = load_graph(path)?;
    if g.n() != n {
        return Err(Error::InvalidInput(format!(
            "{}: vertex count {} does not match the base graph ({n})",
            path.display(),
            g.n()
        )));
    }
    Candidates64::new(g.edges().to_vec(), origin)
}

fn timed<T>(fixed_timing: bool, f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    let ms = if fixed_timing {
        0.0
    } else {
        start.elapsed().as_secs_f64() * 1e3
    };
    (out, ms)
}

fn solver_out(sol: &RelaxationSolution<f64>) -> SolverOut {
    SolverOut {
        status: sol.status,
        iterations: sol.iterations,
        stationarity: sol.stationarity,
        objective: sol.objective,
        sum_pi: sol.sum_pi(),
    }
}

fn graph_with(base: &Graph64, cands: &Candidates64, picked: &[usize]) -> Result<Graph64> {
    let mut g = base.clone();
    for &i in picked {
        g = g.with_edge_added(cands.edges()[i])?;
    }
    Ok(g)
}

fn method_out(
    name: &str,
    tau: f64,
    connected: bool,
    edges: Vec<EdgeOut>,
    gains: Option<Vec<f64>>,
    time_ms: f64,
) -> MethodOut {
    MethodOut {
        method: name.to_string(),
        tau,
        connected,
        k_selected: None,
        edges,
        gains,
        time_ms,
    }
}

pub struct SynthArgs {
    pub graph: PathBuf,
    pub candidates: Option<PathBuf>,
    pub complete_complement: bool,
    pub k: usize,
    pub method: Method,
    pub out: Option<PathBuf>,
    pub flags: SolverFlags,
}

pub fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let base = load_graph(&args.graph)?;
    let cands = match (&args.candidates, args.complete_complement) {
        (Some(path), false) => load_edge_set(path, base.n(), CandidateOrigin::Addition)?,
        (None, true) => complement_candidates(&base)?,
        _ => {
            return Err(Error::InvalidInput(
                "provide exactly one of --candidates or --complete-complement".to_string(),
            ))
        }
    };
    cands.check_disjoint(&base)?;
    let tau_init = tree_connectivity(&base).value();
    if !base.is_connected() {
        return Err(Error::Disconnected);
    }

    let mut methods = Vec::new();
    let mut tau_greedy = None;
    let mut tau_rounded = None;
    let mut tau_exact = None;
    let mut solver = None;
    let mut star = None;

    if args.method.runs_greedy() {
        let (sel, ms) = timed(args.flags.fixed_timing, || {
            greedy_esp(&base, &cands, args.k)
        });
        let sel = sel?;
        tau_greedy = Some(sel.tau_final);
        let edges = sel.chosen.iter().map(|&i| (&cands.edges()[i]).into()).collect();
        methods.push(method_out(
            "greedy",
            sel.tau_final,
            true,
            edges,
            Some(sel.gains.clone()),
            ms,
        ));
    }
    if args.method.runs_convex() {
        let opts = args.flags.solver_options();
        let (out, ms) = timed(args.flags.fixed_timing, || {
            let sol = match args.flags.lambda {
                Some(l) => solve_penalized(&base, &cands, l, &opts)?,
                None => solve_relaxation(&base, &cands, args.k, &opts)?,
            };
            let picked = if args.flags.repair {
                round_randomized_repair(&sol.pi_star, args.k, args.flags.seed)
            } else {
                round_topk(&sol.pi_star, args.k)?
            };
            let designed = graph_with(&base, &cands, &picked)?;
            Ok::<_, Error>((sol, picked, tree_connectivity(&designed)))
        });
        let (sol, picked, tau) = out?;
        // the penalized objective bounds a different program, not this one
        if args.flags.lambda.is_none() {
            star = Some(sol.bound_envelope());
        }
        if tau.is_connected {
            tau_rounded = Some(tau.value());
        }
        let edges = picked.iter().map(|&i| (&cands.edges()[i]).into()).collect();
        methods.push(method_out(
            "convex",
            tau.value(),
            tau.is_connected,
            edges,
            None,
            ms,
        ));
        solver = Some(solver_out(&sol));
    }
    if args.method.runs_exact() {
        let (out, ms) = timed(args.flags.fixed_timing, || {
            exhaustive_esp(&base, &cands, args.k)
        });
        let (opt, set) = out?;
        tau_exact = Some(opt);
        let edges = set.iter().map(|&i| (&cands.edges()[i]).into()).collect();
        methods.push(method_out("exact", opt, true, edges, None, ms));
    }

    let certificate = build_esp_certificate(tau_init, tau_greedy, tau_rounded, star, tau_exact)?;
    let report = RunReport {
        schema: SCHEMA_VERSION,
        command: "synth".to_string(),
        instance: InstanceOut {
            n: base.n(),
            base_edges: base.edge_count(),
            candidates: cands.len(),
            k: Some(args.k),
            delta: None,
        },
        tau_init,
        methods,
        certificate,
        solver,
        gamma: None,
    };
    write_report(&report, args.out.as_deref())
        .map_err(|e| Error::InvalidInput(format!("cannot write output: {e}")))
}

/// Assembles the tightest certificate the available methods support. The
/// analytic upper bound needs a greedy run; a rounded relaxation alone only
/// certifies [rounded value, relaxation optimum]; an exact run pins both
/// sides.
fn build_esp_certificate(
    tau_init: f64,
    tau_greedy: Option<f64>,
    tau_rounded: Option<f64>,
    star: Option<f64>,
    tau_exact: Option<f64>,
) -> Result<Option<Certificate<f64>>> {
    if let Some(opt) = tau_exact {
        return Ok(Some(esp_bounds(tau_init, opt, Some(opt), Some(opt))?));
    }
    match (tau_greedy, tau_rounded, star) {
        (Some(g), rounded, star) => Ok(Some(esp_bounds(tau_init, g, rounded, star)?)),
        (None, Some(r), Some(s)) => {
            let mut cert = esp_bounds(tau_init, r, None, Some(s))?;
            if cert.upper < s {
                // the greedy-ratio bound does not apply to a rounded design
                cert.upper = s;
                cert.additive_gap = s - cert.lower;
                cert.sources[1] = "upper:relaxation".to_string();
                cert.ratio_bound = cert.ratio_bound.map(|_| cert.upper / cert.lower);
            }
            Ok(Some(cert))
        }
        _ => Ok(None),
    }
}

pub struct SparsifyArgs {
    pub graph: PathBuf,
    pub removable: PathBuf,
    pub k: usize,
    pub method: Method,
    pub out: Option<PathBuf>,
    pub flags: SolverFlags,
}

pub fn cmd_sparsify(args: &SparsifyArgs) -> Result<()> {
    let base = load_graph(&args.graph)?;
    if !base.is_connected() {
        return Err(Error::Disconnected);
    }
    let removable = load_edge_set(&args.removable, base.n(), CandidateOrigin::DeletionTransformed)?;
    let tau_init = tree_connectivity(&base).value();

    let mut methods = Vec::new();
    let mut solver = None;
    let mut best_tau: Option<f64> = None;
    let mut star = None;

    if args.method.runs_greedy() {
        let (sel, ms) = timed(args.flags.fixed_timing, || {
            greedy_delete(&base, &removable, args.k)
        });
        let sel = sel?;
        best_tau = Some(sel.tau_final);
        let edges = sel
            .chosen
            .iter()
            .map(|&i| (&removable.edges()[i]).into())
            .collect();
        methods.push(method_out(
            "greedy",
            sel.tau_final,
            true,
            edges,
            Some(sel.gains.clone()),
            ms,
        ));
    }
    if args.method.runs_convex() || args.method.runs_exact() {
        let (stripped, kept_cands, d) = transform_minus_to_plus(&base, &removable, args.k)?;
        if args.method.runs_convex() {
            let opts = args.flags.solver_options();
            let (out, ms) = timed(args.flags.fixed_timing, || {
                let sol = solve_relaxation(&stripped, &kept_cands, d, &opts)?;
                let kept = round_topk(&sol.pi_star, d)?;
                let designed = graph_with(&stripped, &kept_cands, &kept)?;
                Ok::<_, Error>((sol, kept, tree_connectivity(&designed)))
            });
            let (sol, kept, tau) = out?;
            star = Some(sol.bound_envelope());
            let removed: Vec<EdgeOut> = (0..removable.len())
                .filter(|i| !kept.contains(i))
                .map(|i| (&removable.edges()[i]).into())
                .collect();
            if tau.is_connected {
                best_tau = Some(best_tau.map_or(tau.value(), |b| b.max(tau.value())));
            }
            methods.push(method_out(
                "convex",
                tau.value(),
                tau.is_connected,
                removed,
                None,
                ms,
            ));
            solver = Some(solver_out(&sol));
        }
        if args.method.runs_exact() {
            let (out, ms) = timed(args.flags.fixed_timing, || {
                exhaustive_esp(&stripped, &kept_cands, d)
            });
            let (opt, kept) = out?;
            let designed = graph_with(&stripped, &kept_cands, &kept)?;
            if !tree_connectivity(&designed).is_connected {
                return Err(Error::Infeasible(format!(
                    "removing {} edges disconnects the graph no matter the choice",
                    args.k
                )));
            }
            let removed: Vec<EdgeOut> = (0..removable.len())
                .filter(|i| !kept.contains(i))
                .map(|i| (&removable.edges()[i]).into())
                .collect();
            best_tau = Some(best_tau.map_or(opt, |b| b.max(opt)));
            methods.push(method_out("exact", opt, true, removed, None, ms));
        }
    }

    // the relaxation optimum upper-bounds every feasible pruned graph; the
    // greedy-ratio bound does not transfer through the deletion rewrite, so
    // only those two sides are certified
    let certificate = match (best_tau, star) {
        (Some(tau), Some(s)) => {
            let upper = s.max(tau);
            Some(Certificate {
                lower: tau,
                upper,
                design_value: tau,
                additive_gap: upper - tau,
                ratio_bound: (tau > 1e-12).then(|| upper / tau),
                sources: vec![
                    "lower:design".to_string(),
                    "upper:relaxation".to_string(),
                ],
            })
        }
        _ => None,
    };
    let report = RunReport {
        schema: SCHEMA_VERSION,
        command: "sparsify".to_string(),
        instance: InstanceOut {
            n: base.n(),
            base_edges: base.edge_count(),
            candidates: removable.len(),
            k: Some(args.k),
            delta: None,
        },
        tau_init,
        methods,
        certificate,
        solver,
        gamma: None,
    };
    write_report(&report, args.out.as_deref())
        .map_err(|e| Error::InvalidInput(format!("cannot write output: {e}")))
}

pub struct DualArgs {
    pub graph: PathBuf,
    pub candidates: PathBuf,
    pub delta: f64,
    pub absolute_delta: bool,
    pub method: Method,
    pub out: Option<PathBuf>,
    pub flags: SolverFlags,
}

pub fn cmd_dual(args: &DualArgs) -> Result<()> {
    let base = load_graph(&args.graph)?;
    if !base.is_connected() {
        return Err(Error::Disconnected);
    }
    let cands = load_edge_set(&args.candidates, base.n(), CandidateOrigin::Addition)?;
    cands.check_disjoint(&base)?;
    let tau_init = tree_connectivity(&base).value();
    let mode = if args.absolute_delta {
        DualTargetMode::AbsoluteLogDet
    } else {
        DualTargetMode::Gain
    };

    let mut methods = Vec::new();
    let mut solver = None;
    let mut k_greedy = None;
    let mut k_cvx = None;
    let mut sum_pi = None;
    let mut gamma = None;
    let mut delta_gain = args.delta;
    if args.absolute_delta {
        delta_gain = args.delta - tau_init;
    }

    if args.method.runs_greedy() {
        let (dual, ms) = timed(args.flags.fixed_timing, || {
            greedy_dual_esp_with_mode(&base, &cands, args.delta, mode)
        });
        let dual = dual?;
        if dual.status == DualStatus::Infeasible {
            return Err(Error::Infeasible(format!(
                "target gain {} is unreachable even with all {} candidates",
                dual.target_gain,
                cands.len()
            )));
        }
        k_greedy = Some(dual.selection.chosen.len());
        gamma = Some(if dual.selection.chosen.is_empty() {
            1.0
        } else {
            wolsey_gamma(dual.target_gain, dual.phi_pre_terminal)?
        });
        let edges = dual
            .selection
            .chosen
            .iter()
            .map(|&i| (&cands.edges()[i]).into())
            .collect();
        let mut m = method_out(
            "greedy",
            dual.selection.tau_final,
            true,
            edges,
            Some(dual.selection.gains.clone()),
            ms,
        );
        m.k_selected = Some(dual.selection.chosen.len());
        methods.push(m);
    }
    if args.method.runs_convex() {
        let opts = args.flags.solver_options();
        let (out, ms) = timed(args.flags.fixed_timing, || {
            let sol = solve_dual_relaxation(&base, &cands, delta_gain, &opts)?;
            let picked = round_dual(&sol.pi_star, &base, &cands, delta_gain)?;
            let designed = graph_with(&base, &cands, &picked)?;
            Ok::<_, Error>((sol, picked, tree_connectivity(&designed).value()))
        });
        let (sol, picked, tau) = out?;
        k_cvx = Some(picked.len());
        sum_pi = Some(sol.sum_pi());
        let edges = picked.iter().map(|&i| (&cands.edges()[i]).into()).collect();
        let mut m = method_out("convex", tau, true, edges, None, ms);
        m.k_selected = Some(picked.len());
        methods.push(m);
        solver = Some(solver_out(&sol));
    }
    if args.method.runs_exact() {
        let (out, ms) = timed(args.flags.fixed_timing, || {
            exhaustive_dual_esp(&base, &cands, delta_gain)
        });
        let (k_opt, set) = out?;
        let designed = graph_with(&base, &cands, &set)?;
        let edges = set.iter().map(|&i| (&cands.edges()[i]).into()).collect();
        let mut m = method_out(
            "exact",
            tree_connectivity(&designed).value(),
            true,
            edges,
            None,
            ms,
        );
        m.k_selected = Some(k_opt);
        methods.push(m);
    }

    let certificate = match k_greedy {
        Some(kg) => Some(dual_bounds(kg, k_cvx, sum_pi, gamma.unwrap_or(1.0))?),
        // without a greedy run only the relaxation sides are available
        None => match (k_cvx, sum_pi) {
            (Some(kc), s) => Some(dual_bounds(kc, Some(kc), s, f64::MAX)?),
            _ => None,
        },
    };
    let report = RunReport {
        schema: SCHEMA_VERSION,
        command: "dual".to_string(),
        instance: InstanceOut {
            n: base.n(),
            base_edges: base.edge_count(),
            candidates: cands.len(),
            k: None,
            delta: Some(args.delta),
        },
        tau_init,
        methods,
        certificate,
        solver,
        gamma,
    };
    write_report(&report, args.out.as_deref())
        .map_err(|e| Error::InvalidInput(format!("cannot write output: {e}")))
}

pub struct OracleArgs {
    pub graph: PathBuf,
    pub enumerate: bool,
}

pub fn cmd_oracle(args: &OracleArgs) -> Result<()> {
    let g = load_graph(&args.graph)?;
    let tau = tree_connectivity(&g);
    println!("n: {}", g.n());
    println!("edges: {}", g.edge_count());
    println!("connected: {}", tau.is_connected);
    println!("tree_count: {}", tree_count(&g));
    println!("log_tree_count: {}", tau.value());
    if args.enumerate {
        let list = enumerate_spanning_trees(&g)?;
        println!("spanning_trees: {}", list.trees.len());
        println!("total_value: {}", list.total_value());
        for (t, v) in list.trees.iter().zip(&list.values) {
            let pairs: Vec<String> = t
                .iter()
                .map(|&i| {
                    let e: &Edge64 = &g.edges()[i];
                    format!("{}-{}", e.u, e.v)
                })
                .collect();
            println!("  [{}] value {v}", pairs.join(" "));
        }
    }
    Ok(())
}
