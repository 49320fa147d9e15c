//! Benchmark sweeps over random instances, emitting one CSV row per
//! (n, m, k, trial, method).

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use treeopt::certificate::esp_bounds;
use treeopt::convex::{round_topk, solve_relaxation, SolverOptions};
use treeopt::error::Error;
use treeopt::generate::{complement_candidates, random_candidates, random_connected_graph, WeightDist};
use treeopt::greedy::greedy_esp;
use treeopt::oracle::exhaustive_esp;
use treeopt::treeconn::tree_connectivity;
use treeopt::{Candidates64, Graph64, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub n: usize,
    pub m: Vec<usize>,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    pub methods: Vec<String>,
    #[serde(default)]
    pub weights: Option<String>,
    /// Candidate pool size per instance; the full complement when absent.
    #[serde(default)]
    pub candidates: Option<usize>,
    /// Zeroes the time_ms column so reruns are byte-identical.
    #[serde(default)]
    pub fixed_timing: bool,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub max_iters: Option<usize>,
}

fn parse_weights(spec: Option<&str>) -> Result<WeightDist> {
    match spec {
        None | Some("unit") => Ok(WeightDist::Unit),
        Some(s) => match s.strip_prefix("lognormal:") {
            Some(sigma) => {
                let sigma: f64 = sigma.parse().map_err(|_| {
                    Error::InvalidInput(format!("bad weight spec {s:?}: sigma not a number"))
                })?;
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::InvalidInput(format!(
                        "bad weight spec {s:?}: sigma must be positive"
                    )));
                }
                Ok(WeightDist::LogNormal(sigma))
            }
            None => Err(Error::InvalidInput(format!(
                "unknown weight spec {s:?} (expected \"unit\" or \"lognormal:SIGMA\")"
            ))),
        },
    }
}

pub fn load_config(path: &Path) -> Result<BenchConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let cfg: BenchConfig = toml::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    if cfg.methods.is_empty() {
        return Err(Error::InvalidInput("methods must be nonempty".to_string()));
    }
    for m in &cfg.methods {
        if !matches!(m.as_str(), "greedy" | "convex" | "exact" | "random") {
            return Err(Error::InvalidInput(format!("unknown method {m:?}")));
        }
    }
    for &m in &cfg.m {
        if m < cfg.n - 1 {
            return Err(Error::InvalidInput(format!(
                "m = {m} below the n - 1 = {} needed for connectivity",
                cfg.n - 1
            )));
        }
    }
    parse_weights(cfg.weights.as_deref())?;
    Ok(cfg)
}

struct Row {
    n: usize,
    m: usize,
    k: usize,
    trial: usize,
    method: &'static str,
    tau: f64,
    lower: f64,
    upper: f64,
    time_ms: f64,
}

fn timed<T>(fixed: bool, f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    let ms = if fixed {
        0.0
    } else {
        start.elapsed().as_secs_f64() * 1e3
    };
    (out, ms)
}

fn instance(cfg: &BenchConfig, m: usize, trial: usize) -> Result<(Graph64, Candidates64)> {
    let dist = parse_weights(cfg.weights.as_deref())?;
    let seed = cfg.seed + trial as u64;
    let g = random_connected_graph(cfg.n, m, dist, seed)?;
    let cands = match cfg.candidates {
        Some(c) => random_candidates(&g, c, seed ^ 0x6361_6e64)?,
        None => complement_candidates(&g)?,
    };
    Ok((g, cands))
}

pub struct BenchArgs {
    pub config: PathBuf,
    pub out_csv: PathBuf,
}

pub fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let cfg = load_config(&args.config)?;
    let opts = SolverOptions {
        tol: cfg.tol.unwrap_or(1e-6),
        max_iters: cfg.max_iters.unwrap_or(2000),
    };
    let has = |name: &str| cfg.methods.iter().any(|m| m == name);

    let mut rows: Vec<Row> = Vec::new();
    for &m in &cfg.m {
        for trial in 0..cfg.trials {
            let (base, cands) = instance(&cfg, m, trial)?;
            if cfg.k > cands.len() {
                return Err(Error::BudgetTooLarge {
                    k: cfg.k,
                    c: cands.len(),
                });
            }
            let tau_init = tree_connectivity(&base).value();

            let mut greedy = None;
            let mut convex = None;
            let mut exact = None;
            let mut random = None;

            if has("greedy") {
                let (sel, ms) = timed(cfg.fixed_timing, || greedy_esp(&base, &cands, cfg.k));
                greedy = Some((sel?, ms));
            }
            if has("convex") {
                let (out, ms) = timed(cfg.fixed_timing, || {
                    let sol = solve_relaxation(&base, &cands, cfg.k, &opts)?;
                    let picked = round_topk(&sol.pi_star, cfg.k)?;
                    let mut g = base.clone();
                    for &i in &picked {
                        g = g.with_edge_added(cands.edges()[i])?;
                    }
                    Ok::<_, Error>((sol, tree_connectivity(&g).value()))
                });
                convex = Some((out?, ms));
            }
            if has("exact") {
                let (out, ms) = timed(cfg.fixed_timing, || exhaustive_esp(&base, &cands, cfg.k));
                exact = Some((out?.0, ms));
            }
            if has("random") {
                let (tau, ms) = timed(cfg.fixed_timing, || {
                    let mut rng =
                        ChaCha8Rng::seed_from_u64(cfg.seed + trial as u64 ^ 0x7261_6e64);
                    let mut idx: Vec<usize> = (0..cands.len()).collect();
                    idx.shuffle(&mut rng);
                    let mut g = base.clone();
                    for &i in &idx[..cfg.k] {
                        g = g.with_edge_added(cands.edges()[i])?;
                    }
                    Ok::<_, Error>(tree_connectivity(&g).value())
                });
                random = Some((tau?, ms));
            }

            let tau_greedy = greedy.as_ref().map(|(s, _)| s.tau_final);
            let rounded = convex.as_ref().map(|((_, t), _)| *t);
            let star = convex.as_ref().map(|((s, _), _)| s.bound_envelope());
            let cert = match tau_greedy {
                Some(g) => Some(esp_bounds(tau_init, g, rounded, star)?),
                None => None,
            };
            let lower = cert.as_ref().map_or(f64::NAN, |c| c.lower);
            let upper = cert.as_ref().map_or(f64::NAN, |c| c.upper);
            let mut push = |method: &'static str, tau: f64, time_ms: f64| {
                rows.push(Row {
                    n: cfg.n,
                    m,
                    k: cfg.k,
                    trial,
                    method,
                    tau,
                    lower,
                    upper,
                    time_ms,
                });
            };
            if let Some((sel, ms)) = &greedy {
                push("greedy", sel.tau_final, *ms);
            }
            if let Some(((_, tau), ms)) = &convex {
                push("convex", *tau, *ms);
            }
            if let Some((tau, ms)) = &exact {
                push("exact", *tau, *ms);
            }
            if let Some((tau, ms)) = &random {
                push("random", *tau, *ms);
            }
        }
    }

    let mut w = csv::Writer::from_path(&args.out_csv)
        .map_err(|e| Error::InvalidInput(format!("cannot open {}: {e}", args.out_csv.display())))?;
    w.write_record(["n", "m", "k", "trial", "method", "tau", "lower", "upper", "time_ms"])
        .and_then(|_| {
            for r in &rows {
                w.write_record([
                    r.n.to_string(),
                    r.m.to_string(),
                    r.k.to_string(),
                    r.trial.to_string(),
                    r.method.to_string(),
                    format!("{:.12}", r.tau),
                    format!("{:.12}", r.lower),
                    format!("{:.12}", r.upper),
                    format!("{:.3}", r.time_ms),
                ])?;
            }
            w.flush()?;
            Ok(())
        })
        .map_err(|e| Error::InvalidInput(format!("cannot write CSV: {e}")))?;
    Ok(())
}
