//! Stable JSON output schema shared by all single-run commands.

use serde::Serialize;
use treeopt::certificate::Certificate;
use treeopt::convex::SolverStatus;
use treeopt::Edge64;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
pub struct EdgeOut {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

impl From<&Edge64> for EdgeOut {
    fn from(e: &Edge64) -> Self {
        EdgeOut {
            u: e.u,
            v: e.v,
            weight: e.weight,
        }
    }
}

#[derive(Serialize)]
pub struct InstanceOut {
    pub n: usize,
    pub base_edges: usize,
    pub candidates: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

#[derive(Serialize)]
pub struct SolverOut {
    pub status: SolverStatus,
    pub iterations: usize,
    pub stationarity: f64,
    pub objective: f64,
    pub sum_pi: f64,
}

#[derive(Serialize)]
pub struct MethodOut {
    pub method: String,
    pub tau: f64,
    pub connected: bool,
    pub edges: Vec<EdgeOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gains: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_selected: Option<usize>,
    pub time_ms: f64,
}

#[derive(Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub command: String,
    pub instance: InstanceOut,
    pub tau_init: f64,
    pub methods: Vec<MethodOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

pub fn write_report(report: &RunReport, out: Option<&std::path::Path>) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(report).expect("serializable report");
    match out {
        Some(path) => std::fs::write(path, text + "\n"),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}
