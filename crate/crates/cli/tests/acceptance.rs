//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any criterion fails.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swarm_guidance::analysis::{contraction_certificate, convergence_rate_bounds, linear_error_update};
use swarm_guidance::engine::{run_scenario, MatrixAudit, RunOptions, Simulation};
use swarm_guidance::graph::{laplacian_of, LaplacianView};
use swarm_guidance::synthesis::{dsmc_column, dsmc_recurrent, validate_markov, NeighborReport};
use swarm_guidance::{Algorithm, ErrorVector, Exact, Mode, Scenario, SynthesisParams, Topology};
use swarm_guidance_cli::commands::{compare_to_dir, metrics_file_name, run_to_dir, Comparison, DEFAULT_CHECKPOINTS};
use swarm_guidance_cli::load_scenario;

const TABLE_TOLERANCE: f64 = 1e-12;
const CONTRACTION_TOLERANCE: f64 = 1e-12;
const SANDWICH_TOLERANCE: f64 = 1e-9;
const EIGEN_TOLERANCE: f64 = 1e-9;
const ABSORPTION_TOLERANCE: f64 = 1e-12;
const LOCAL_COLUMN_TOLERANCE: f64 = 1e-12;
const VALIDITY_TOLERANCE: f64 = 1e-9;
/// `‖e‖² / ‖e(0)‖²` below which a trajectory has collapsed to rounding noise.
const ROUNDING_FLOOR: f64 = 1e-24;
const RANDOM_GRAPHS: usize = 100;
const VECTORS_PER_GRAPH: usize = 10;
const STEPS_PER_VECTOR: usize = 5;
const LOCAL_INSTANCES: usize = 200;
const ACCEPTANCE_SEED: u64 = 2024;

type Outcome = Result<String, String>;

fn scenario_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Collects every synthesized matrix's validation result.
#[derive(Default)]
struct ValidityLedger {
    matrices: usize,
    worst_deviation: f64,
    min_entry: f64,
    mask_violations: usize,
}

impl ValidityLedger {
    fn absorb(&mut self, audit: &MatrixAudit<f64>) {
        self.matrices += audit.matrices;
        self.worst_deviation = self.worst_deviation.max(audit.worst_column_deviation);
        self.min_entry = self.min_entry.min(audit.min_entry);
        self.mask_violations += audit.mask_violations;
    }

    fn record(&mut self, matrix: &swarm_guidance::DenseMatrix<f64>, topology: &Topology) {
        let r = validate_markov(matrix, topology);
        self.matrices += 1;
        self.worst_deviation = self.worst_deviation.max(r.max_column_deviation);
        self.min_entry = self.min_entry.min(r.min_entry);
        self.mask_violations += r.mask_violations.len() + usize::from(r.shape_mismatch);
    }
}

fn connected_graph(rng: &mut ChaCha8Rng, m: usize, extra: f64) -> Topology {
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    let mut edges: Vec<(usize, usize)> = (1..m).map(|k| (order[k], order[rng.gen_range(0..k)])).collect();
    for a in 0..m {
        for b in a + 1..m {
            if rng.gen_bool(extra) {
                edges.push((a, b));
            }
        }
    }
    Topology::from_edges(m, &edges).unwrap()
}

fn random_views() -> Vec<LaplacianView<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(ACCEPTANCE_SEED);
    (0..RANDOM_GRAPHS)
        .map(|_| {
            let m = rng.gen_range(2..=50);
            let extra = rng.gen_range(0.0..0.3);
            let t = connected_graph(&mut rng, m, extra);
            laplacian_of(&t, &(0..m).collect::<Vec<_>>()).unwrap()
        })
        .collect()
}

fn normalized(w: Vec<f64>) -> Vec<f64> {
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

fn table_one(ledger: &mut ValidityLedger) -> Outcome {
    let scenario = load_scenario(&scenario_path("cycle4.txt")).map_err(|e| e.to_string())?;
    let want = [0.25, 0.15, 0.3, 0.3];

    let mut sim = Simulation::<f64>::new(&scenario).map_err(|e| e.to_string())?;
    let matrix = sim.current_matrix().map_err(|e| e.to_string())?;
    ledger.record(matrix.as_matrix(), sim.synthesizer().topology());
    sim.advance_with(&matrix).map_err(|e| e.to_string())?;
    let x1 = sim.density().map_err(|e| e.to_string())?;
    let worst = x1.as_slice().iter().zip(want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);

    let mut exact = Simulation::<Exact>::new(&scenario).map_err(|e| e.to_string())?;
    exact.advance().map_err(|e| e.to_string())?;
    let exact_x1 = exact.density().map_err(|e| e.to_string())?;
    let exact_want = [Exact::new(1, 4), Exact::new(3, 20), Exact::new(3, 10), Exact::new(3, 10)];
    let exact_ok = exact_x1.as_slice() == exact_want;

    check(
        worst <= TABLE_TOLERANCE && exact_ok,
        format!("x(1) = {:?}, max error {worst:e}, exact rational match {exact_ok}", x1.as_slice()),
    )
}

fn linear_contraction() -> Outcome {
    let cycle = Topology::from_edges(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
    let view = laplacian_of::<f64>(&cycle, &[0, 1, 2, 3]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(ACCEPTANCE_SEED);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let raw: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mean = raw.iter().sum::<f64>() / 4.0;
        let mut e = ErrorVector(raw.into_iter().map(|x| x - mean).collect());
        for _ in 0..10 {
            let next = linear_error_update(&e, &view, 3.0).map_err(|err| err.to_string())?;
            worst = worst.max((next.norm_squared() - e.norm_squared() / 9.0).abs());
            e = next;
        }
    }
    check(worst <= CONTRACTION_TOLERANCE, format!("max |‖e'‖² − ‖e‖²/9| = {worst:e} over 500 steps"))
}

fn rate_sandwich(views: &[LaplacianView<f64>]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(ACCEPTANCE_SEED + 1);
    let mut steps = 0;
    let mut worst_gap = f64::NEG_INFINITY;
    for view in views {
        let d = view.max_degree as f64 + 1.0;
        let (lower, upper) = convergence_rate_bounds(view, d).map_err(|e| e.to_string())?;
        for _ in 0..VECTORS_PER_GRAPH {
            let raw: Vec<f64> = (0..view.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mean = raw.iter().sum::<f64>() / raw.len() as f64;
            let mut e = ErrorVector(raw.into_iter().map(|x| x - mean).collect());
            let start = e.norm_squared();
            for _ in 0..STEPS_PER_VECTOR {
                let before = e.norm_squared();
                // once e is annihilated only rounding residue is left (not zero-sum, no defined rate)
                if before <= ROUNDING_FLOOR * start {
                    break;
                }
                let next = linear_error_update(&e, view, d).map_err(|err| err.to_string())?;
                let rate = (before - next.norm_squared()) / before;
                worst_gap = worst_gap.max(lower - rate).max(rate - upper);
                steps += 1;
                e = next;
            }
        }
    }
    check(
        worst_gap <= SANDWICH_TOLERANCE,
        format!("{steps} steps on {} graphs, worst excursion outside bounds {worst_gap:e}", views.len()),
    )
}

fn spectral_certificates(views: &[LaplacianView<f64>]) -> Outcome {
    let mut worst_margin = f64::INFINITY;
    let mut worst_radius = 0.0f64;
    for view in views {
        let report = contraction_certificate(view, view.max_degree as f64 + 1.0).map_err(|e| e.to_string())?;
        let top = *report.laplacian_eigs.last().unwrap();
        worst_margin = worst_margin.min(2.0 * view.max_degree as f64 + EIGEN_TOLERANCE - top);
        worst_radius = worst_radius.max(report.zero_sum_radius);
    }
    check(
        worst_margin >= 0.0 && worst_radius < 1.0,
        format!(
            "min (2·maxDegree − λmax) = {:.6}, max zero-sum radius = {worst_radius:.6}",
            worst_margin - EIGEN_TOLERANCE
        ),
    )
}

struct LetterRuns {
    comparison: Comparison,
    dir: PathBuf,
}

fn letter_figures(runs: &LetterRuns) -> Outcome {
    let dsmc = &runs.comparison.output(Algorithm::Dsmc).ok_or("missing dsmc run")?.metrics;
    let mh = &runs.comparison.output(Algorithm::MetropolisHastings).ok_or("missing mh run")?.metrics;
    let (tv0, tv250, tv750) = (dsmc[0].total_variation, dsmc[250].total_variation, dsmc[750].total_variation);
    let mh250 = mh[250].total_variation;
    let a = tv250 < 0.5 * tv0;
    let b = tv250 < mh250;
    let c = tv750 < tv250 + 0.05;
    check(
        a && b && c,
        format!(
            "(a) {a}: TV250 {tv250:.4} < 0.5·TV0 {:.4}; (b) {b}: dsmc {tv250:.4} < mh {mh250:.4}; \
             (c) {c}: TV750 {tv750:.4} < TV250 + 0.05",
            0.5 * tv0
        ),
    )
}

fn transition_window(runs: &LetterRuns) -> Outcome {
    let window = |alg| -> Result<f64, String> {
        let m = &runs.comparison.output(alg).ok_or("missing run")?.metrics;
        Ok(m[250].cumulative_transitions - m[200].cumulative_transitions)
    };
    let (dsmc, mh) = (window(Algorithm::Dsmc)?, window(Algorithm::MetropolisHastings)?);
    check(
        dsmc < 0.1 * mh,
        format!("transitions over steps 200-250: dsmc {dsmc} vs mh {mh} ({:.2}%)", 100.0 * dsmc / mh),
    )
}

fn transient_absorption(ledger: &mut ValidityLedger) -> Outcome {
    let mut details = Vec::new();
    for (cols, desired_from) in [(10usize, 7usize), (16, 15), (6, 1)] {
        let mut desired = vec![0.0; cols];
        for w in &mut desired[desired_from..] {
            *w = 1.0;
        }
        let scenario = Scenario {
            rows: 1,
            cols,
            hop: 1,
            desired: vec![desired],
            initial: None,
            agents: 1000,
            steps: cols,
            algorithm: Algorithm::Dsmc,
            seed: 1,
            mode: Mode::Deterministic,
            events: vec![],
            d_chsn: None,
        };
        let mut sim = Simulation::<f64>::new(&scenario).map_err(|e| e.to_string())?;
        let layers = sim.synthesizer().partition().layers.len();
        let recurrent = sim.synthesizer().partition().recurrent.clone();
        let mass = |sim: &Simulation<f64>| -> f64 {
            let x = sim.density().unwrap();
            recurrent.iter().map(|&b| x[b]).sum()
        };
        for step in 1..=layers {
            let matrix = sim.current_matrix().map_err(|e| e.to_string())?;
            ledger.record(matrix.as_matrix(), sim.synthesizer().topology());
            sim.advance_with(&matrix).map_err(|e| e.to_string())?;
            if step < layers && mass(&sim) > 1.0 - ABSORPTION_TOLERANCE {
                return Err(format!("1x{cols}: absorbed early at step {step} of {layers}"));
            }
        }
        let gap = (mass(&sim) - 1.0).abs();
        if gap > ABSORPTION_TOLERANCE {
            return Err(format!("1x{cols}: recurrent mass off by {gap:e} after {layers} steps"));
        }
        details.push(format!("L={layers} gap {gap:e}"));
    }
    Ok(details.join(", "))
}

fn decentralization(ledger: &mut ValidityLedger) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(ACCEPTANCE_SEED + 2);
    let mut worst = 0.0f64;
    let mut columns = 0;
    for _ in 0..LOCAL_INSTANCES {
        let m = rng.gen_range(2..=40);
        let extra = rng.gen_range(0.0..0.3);
        let t = connected_graph(&mut rng, m, extra);
        let mut raw: Vec<f64> = (0..m).map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..1.0) }).collect();
        raw[rng.gen_range(0..m)] += 0.1;
        let x = normalized(raw);
        let v = normalized((0..m).map(|_| rng.gen_range(0.05..1.0)).collect());
        let max_degree = (0..m).map(|b| t.degree(b)).max().unwrap();
        let params = SynthesisParams::new(max_degree as f64 + 1.0, max_degree).map_err(|e| e.to_string())?;
        let global = dsmc_recurrent(&x, &v, &t, params).map_err(|e| e.to_string())?;
        ledger.record(global.as_matrix(), &t);
        for j in 0..m {
            let reports: Vec<NeighborReport<f64>> =
                t.neighbors(j).iter().map(|&i| NeighborReport { bin: i, density: x[i], desired: v[i] }).collect();
            let local = dsmc_column(j, x[j], v[j], t.neighbors(j), &reports, params).map_err(|e| e.to_string())?;
            let mut dense = vec![0.0; m];
            for (i, p) in local {
                dense[i] = p;
            }
            for (a, b) in dense.iter().zip(global.column(j)) {
                worst = worst.max((a - b).abs());
            }
            columns += 1;
        }
    }
    check(
        worst <= LOCAL_COLUMN_TOLERANCE,
        format!("{columns} columns on {LOCAL_INSTANCES} instances, max difference {worst:e}"),
    )
}

fn universal_validity(ledger: &ValidityLedger) -> Outcome {
    check(
        ledger.worst_deviation <= VALIDITY_TOLERANCE && ledger.min_entry >= 0.0 && ledger.mask_violations == 0,
        format!(
            "{} matrices: worst column deviation {:e}, min entry {}, mask violations {}",
            ledger.matrices, ledger.worst_deviation, ledger.min_entry, ledger.mask_violations
        ),
    )
}

fn determinism(runs: &LetterRuns) -> Outcome {
    let scenario = load_scenario(&scenario_path("e_letter.txt")).map_err(|e| e.to_string())?;
    let reference = fs::read(runs.dir.join(metrics_file_name(Algorithm::Dsmc))).map_err(|e| e.to_string())?;
    let mut identical = Vec::new();
    for workers in [1usize, 4] {
        let out = runs.dir.join(format!("repeat_{workers}"));
        run_to_dir(&scenario, &out, Some(workers)).map_err(|e| e.to_string())?;
        let bytes = fs::read(out.join("metrics.csv")).map_err(|e| e.to_string())?;
        identical.push(bytes == reference);
    }
    check(
        identical.iter().all(|&x| x),
        format!(
            "metrics.csv identical to the first run with 1 worker: {}, with 4 workers: {}",
            identical[0], identical[1]
        ),
    )
}

fn main() -> ExitCode {
    let mut ledger = ValidityLedger::default();
    let mut failures = 0;
    let mut report = |number: usize, name: &str, started: Instant, outcome: Outcome| {
        let elapsed = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {number:>2} {name} ({elapsed:.2}s): {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {number:>2} {name} ({elapsed:.2}s): {detail}");
            }
        }
    };

    let t = Instant::now();
    report(1, "table-one-exact", t, table_one(&mut ledger));
    let t = Instant::now();
    report(2, "linear-contraction", t, linear_contraction());
    let views = random_views();
    let t = Instant::now();
    report(3, "rate-sandwich", t, rate_sandwich(&views));
    let t = Instant::now();
    report(4, "spectral-certificates", t, spectral_certificates(&views));

    let t = Instant::now();
    let dir = tempfile::tempdir().expect("temporary directory");
    let letter = load_scenario(&scenario_path("e_letter.txt")).and_then(|s| {
        compare_to_dir(&s, &[Algorithm::Dsmc, Algorithm::MetropolisHastings], dir.path(), &DEFAULT_CHECKPOINTS, None)
    });
    let runs = match letter {
        Ok(comparison) => {
            for (_, output) in &comparison.runs {
                if let Some(audit) = &output.audit {
                    ledger.absorb(audit);
                }
            }
            Some(LetterRuns { comparison, dir: dir.path().to_path_buf() })
        }
        Err(e) => {
            report(5, "letter-convergence", t, Err(format!("{e:#}")));
            None
        }
    };
    if let Some(runs) = &runs {
        report(5, "letter-convergence", t, letter_figures(runs));
        let t = Instant::now();
        report(6, "transition-window", t, transition_window(runs));
    } else {
        report(6, "transition-window", Instant::now(), Err("criterion 5 runs unavailable".into()));
    }

    let t = Instant::now();
    report(7, "transient-absorption", t, transient_absorption(&mut ledger));
    let t = Instant::now();
    report(8, "decentralization", t, decentralization(&mut ledger));

    // deterministic cycle run through the engine as well, for the audit
    if let Ok(cycle) = load_scenario(&scenario_path("cycle4.txt")) {
        let options = RunOptions { audit_matrices: true, ..Default::default() };
        if let Ok(out) = run_scenario::<f64>(&cycle, &options) {
            ledger.absorb(out.audit.as_ref().expect("audit requested"));
        }
    }
    let t = Instant::now();
    report(9, "matrix-validity", t, universal_validity(&ledger));

    let t = Instant::now();
    match &runs {
        Some(runs) => report(10, "determinism", t, determinism(runs)),
        None => report(10, "determinism", t, Err("criterion 5 runs unavailable".into())),
    }

    if failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} criteria failed");
        ExitCode::FAILURE
    }
}
