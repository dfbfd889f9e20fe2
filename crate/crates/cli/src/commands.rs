use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use swarm_guidance::analysis::{contraction_certificate, SpectralReport};
use swarm_guidance::engine::{run_scenario, MetricsRow, RunOptions, ScenarioOutput, Simulation, Snapshot};
use swarm_guidance::graph::{build_grid_topology, is_strongly_connected, laplacian_of_subgraph};
use swarm_guidance::{Algorithm, DenseMatrix, Scenario, Topology};

use crate::scenario_file::{parse_scenario, render_scenario};

pub const METRICS_HEADER: &str = "step,total_variation,transitions,cumulative_transitions,num_agents";
pub const SNAPSHOT_HEADER: &str = "bin_index,count,desired,empirical";
pub const SUMMARY_HEADER: &str = "algorithm,step,total_variation,cumulative_transitions";
pub const DEFAULT_CHECKPOINTS: [usize; 3] = [0, 250, 750];

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_scenario(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn metrics_csv(rows: &[MetricsRow<f64>]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(METRICS_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.step, r.total_variation, r.transitions, r.cumulative_transitions, r.num_agents
        );
    }
    out
}

pub fn snapshot_csv(snapshot: &Snapshot<f64>) -> String {
    let mut out = String::from(SNAPSHOT_HEADER);
    out.push('\n');
    for (i, ((count, desired), empirical)) in
        snapshot.counts.iter().zip(&snapshot.desired).zip(&snapshot.empirical).enumerate()
    {
        let _ = writeln!(out, "{},{count},{desired},{empirical}", i + 1);
    }
    out
}

/// Row-major CSV, one matrix row per line, shortest round-trip decimals.
pub fn matrix_csv(matrix: &DenseMatrix<f64>) -> String {
    let mut out = String::new();
    for row in matrix.to_rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf> {
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn run_options(steps: usize, workers: Option<usize>) -> RunOptions {
    RunOptions { workers, snapshot_steps: vec![steps], audit_matrices: true }
}

/// Simulates `scenario` and writes `metrics.csv`, `final_snapshot.csv` and
/// `resolved_scenario.txt` into `out`.
pub fn run_to_dir(scenario: &Scenario, out: &Path, workers: Option<usize>) -> Result<ScenarioOutput<f64>> {
    prepare_dir(out)?;
    let output = run_scenario::<f64>(scenario, &run_options(scenario.steps, workers))?;
    write(out.join("metrics.csv"), &metrics_csv(&output.metrics))?;
    let last = output.snapshots.last().context("final snapshot missing")?;
    write(out.join("final_snapshot.csv"), &snapshot_csv(last))?;
    let resolved = Scenario { d_chsn: Some(output.d_chsn), ..scenario.clone() };
    write(out.join("resolved_scenario.txt"), &render_scenario(&resolved))?;
    Ok(output)
}

pub fn cmd_run(
    scenario_path: &Path,
    out: &Path,
    seed: Option<u64>,
    workers: Option<usize>,
) -> Result<ScenarioOutput<f64>> {
    let mut scenario = load_scenario(scenario_path)?;
    if let Some(seed) = seed {
        scenario.seed = seed;
    }
    run_to_dir(&scenario, out, workers)
}

/// Per-algorithm results of [`cmd_compare`].
#[derive(Debug)]
pub struct Comparison {
    pub runs: Vec<(Algorithm, ScenarioOutput<f64>)>,
    pub summary: String,
}

impl Comparison {
    pub fn output(&self, algorithm: Algorithm) -> Option<&ScenarioOutput<f64>> {
        self.runs.iter().find(|(a, _)| *a == algorithm).map(|(_, o)| o)
    }
}

pub fn metrics_file_name(algorithm: Algorithm) -> String {
    format!("metrics_{}.csv", algorithm.name())
}

/// Runs every algorithm on the same scenario and seed. Writes
/// `metrics_<alg>.csv` per algorithm and `summary.csv` at `checkpoints`
/// (those past the last step are skipped).
pub fn compare_to_dir(
    scenario: &Scenario,
    algorithms: &[Algorithm],
    out: &Path,
    checkpoints: &[usize],
    workers: Option<usize>,
) -> Result<Comparison> {
    if algorithms.is_empty() {
        bail!("no algorithms to compare");
    }
    prepare_dir(out)?;
    let results: Vec<Result<ScenarioOutput<f64>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = algorithms
            .iter()
            .map(|&algorithm| {
                let s = Scenario { algorithm, ..scenario.clone() };
                scope.spawn(move || -> Result<ScenarioOutput<f64>> {
                    Ok(run_scenario::<f64>(&s, &run_options(s.steps, workers))?)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("simulation thread panicked")).collect()
    });

    let mut runs = Vec::with_capacity(algorithms.len());
    let mut summary = String::from(SUMMARY_HEADER);
    summary.push('\n');
    for (&algorithm, result) in algorithms.iter().zip(results) {
        let output = result.with_context(|| format!("running {algorithm}"))?;
        write(out.join(metrics_file_name(algorithm)), &metrics_csv(&output.metrics))?;
        for &step in checkpoints.iter().filter(|&&s| s <= scenario.steps) {
            let row = &output.metrics[step];
            let _ = writeln!(summary, "{algorithm},{step},{},{}", row.total_variation, row.cumulative_transitions);
        }
        runs.push((algorithm, output));
    }
    write(out.join("summary.csv"), &summary)?;
    Ok(Comparison { runs, summary })
}

pub fn cmd_compare(scenario_path: &Path, algorithms: &[Algorithm], out: &Path) -> Result<Comparison> {
    let scenario = load_scenario(scenario_path)?;
    compare_to_dir(&scenario, algorithms, out, &DEFAULT_CHECKPOINTS, None)
}

/// Named topologies for `verify --fixture`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixture {
    /// Four bins on a cycle 1–2–4–3–1.
    Cycle4,
    /// Two adjacent bins.
    Edge2,
    /// Two bins with no edge.
    Disconnected2,
}

impl Fixture {
    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "cycle4" => Ok(Fixture::Cycle4),
            "edge2" => Ok(Fixture::Edge2),
            "disconnected2" => Ok(Fixture::Disconnected2),
            other => bail!("unknown fixture '{other}' (expected cycle4, edge2 or disconnected2)"),
        }
    }

    pub fn topology(self) -> Topology {
        let built = match self {
            Fixture::Cycle4 => Topology::from_edges(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]),
            Fixture::Edge2 => Topology::from_edges(2, &[(0, 1)]),
            Fixture::Disconnected2 => Topology::from_edges(2, &[]),
        };
        built.expect("fixture edges are valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyTarget {
    Grid { rows: usize, cols: usize, hop: usize },
    Fixture(Fixture),
}

#[derive(Debug, Clone)]
pub struct Verification {
    pub connected: bool,
    pub report: SpectralReport<f64>,
    pub reasons: Vec<String>,
}

impl Verification {
    pub fn ok(&self) -> bool {
        self.reasons.is_empty()
    }

    /// `key=value` lines, violations last as `violation=...`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "connected={}", self.connected);
        for (key, value) in self.report.key_values() {
            let _ = writeln!(out, "{key}={value}");
        }
        for reason in &self.reasons {
            let _ = writeln!(out, "violation={reason}");
        }
        out
    }
}

/// Spectral certificate for the whole graph with the default divisor
/// `max_degree + 1` unless `d_chsn` is given.
pub fn cmd_verify(target: VerifyTarget, d_chsn: Option<f64>) -> Result<Verification> {
    let topology = match target {
        VerifyTarget::Grid { rows, cols, hop } => build_grid_topology(rows, cols, hop)?,
        VerifyTarget::Fixture(f) => f.topology(),
    };
    let all: Vec<usize> = (0..topology.bins()).collect();
    let connected = is_strongly_connected(&topology, &all)?;
    let view = laplacian_of_subgraph::<f64>(&topology, &all)?;
    let d = d_chsn.unwrap_or(view.max_degree as f64 + 1.0);
    let report = contraction_certificate(&view, d)?;
    let mut reasons = Vec::new();
    if !connected {
        reasons.push("topology is disconnected".to_string());
    }
    reasons.extend(report.violations());
    Ok(Verification { connected, report, reasons })
}

/// The matrix applied on the move out of step `step`, after that step's
/// events.
pub fn matrix_at_step(scenario: &Scenario, step: usize) -> Result<DenseMatrix<f64>> {
    if step > scenario.steps {
        bail!("step {step} exceeds scenario steps {}", scenario.steps);
    }
    let mut sim = Simulation::<f64>::new(scenario)?;
    let mut events = scenario.events.iter().peekable();
    loop {
        let now = sim.step();
        while let Some(event) = events.next_if(|e| e.step == now) {
            sim.apply_event(event)?;
        }
        if now == step {
            return Ok(sim.current_matrix()?.into_matrix());
        }
        sim.advance()?;
    }
}

pub fn cmd_export_matrix(scenario_path: &Path, step: usize, out: &Path) -> Result<DenseMatrix<f64>> {
    let scenario = load_scenario(scenario_path)?;
    let matrix = matrix_at_step(&scenario, step)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        prepare_dir(parent)?;
    }
    write(out.to_path_buf(), &matrix_csv(&matrix))?;
    Ok(matrix)
}
