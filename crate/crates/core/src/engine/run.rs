use std::time::{Duration, Instant};

use super::{apply_event, step_agents, Mode, Scenario, SwarmState};
use crate::density::{empirical_density, total_variation_slices, ProbabilityVector};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::synthesis::{validate_markov, Algorithm, MarkovMatrix, Synthesizer};

/// `x(k+1) = M x(k)`.
pub fn propagate_density<T: Scalar>(
    x: &ProbabilityVector<T>,
    matrix: &MarkovMatrix<T>,
) -> Result<ProbabilityVector<T>> {
    Ok(ProbabilityVector::from_trusted(matrix.as_matrix().mul_vec(x.as_slice())?))
}

/// Metrics recorded for the state at one step.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow<T> {
    pub step: usize,
    pub total_variation: T,
    /// Agents that changed bin on the move into this step. Expected value
    /// in deterministic mode.
    pub transitions: f64,
    pub cumulative_transitions: f64,
    pub num_agents: usize,
    pub wall_time: Duration,
}

/// Per-bin state at a requested step.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<T> {
    pub step: usize,
    /// Agents per bin (expected counts in deterministic mode).
    pub counts: Vec<f64>,
    pub desired: Vec<T>,
    pub empirical: Vec<T>,
}

/// Running summary of [`validate_markov`] over every synthesized matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixAudit<T> {
    pub matrices: usize,
    pub worst_column_deviation: T,
    pub min_entry: T,
    pub mask_violations: usize,
}

impl<T: Scalar> MatrixAudit<T> {
    fn new() -> Self {
        Self { matrices: 0, worst_column_deviation: T::zero(), min_entry: T::zero(), mask_violations: 0 }
    }

    pub fn all_valid(&self, tolerance: T) -> bool {
        self.worst_column_deviation <= tolerance && self.min_entry >= T::zero() && self.mask_violations == 0
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads for agent moves; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    /// Steps at which to capture a [`Snapshot`].
    pub snapshot_steps: Vec<usize>,
    /// Run [`validate_markov`] on every synthesized matrix.
    pub audit_matrices: bool,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutput<T> {
    pub metrics: Vec<MetricsRow<T>>,
    pub snapshots: Vec<Snapshot<T>>,
    pub d_chsn: T,
    pub audit: Option<MatrixAudit<T>>,
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
enum SwarmModel<T> {
    Agents(SwarmState),
    Density { x: ProbabilityVector<T>, agents: usize },
}

/// Step-by-step driver for a [`Scenario`].
///
/// Each call to [`Simulation::advance`] synthesizes a matrix from the
/// current state (once, upfront, for Metropolis-Hastings), moves the swarm
/// and increments the step counter.
#[derive(Debug, Clone)]
pub struct Simulation<T> {
    algorithm: Algorithm,
    synthesizer: Synthesizer<T>,
    fixed: Option<MarkovMatrix<T>>,
    model: SwarmModel<T>,
    step: usize,
}

impl<T: Scalar> Simulation<T> {
    pub fn new(scenario: &Scenario) -> Result<Self> {
        scenario.validate()?;
        let topology = scenario.topology()?;
        let desired = scenario.desired_distribution::<T>()?;
        let d_chsn = scenario.d_chsn.map(T::lit);
        let synthesizer = Synthesizer::new(topology, desired, d_chsn)?;
        let fixed = match scenario.algorithm {
            Algorithm::MetropolisHastings => Some(synthesizer.metropolis_hastings()?),
            Algorithm::Dsmc => None,
        };
        let initial = scenario.initial_distribution::<T>()?;
        let model = match scenario.mode {
            Mode::MonteCarlo => SwarmModel::Agents(SwarmState::sample(&initial, scenario.agents, scenario.seed)),
            Mode::Deterministic => SwarmModel::Density { x: initial, agents: scenario.agents },
        };
        Ok(Self { algorithm: scenario.algorithm, synthesizer, fixed, model, step: 0 })
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn synthesizer(&self) -> &Synthesizer<T> {
        &self.synthesizer
    }

    pub fn num_agents(&self) -> usize {
        match &self.model {
            SwarmModel::Agents(swarm) => swarm.len(),
            SwarmModel::Density { agents, .. } => *agents,
        }
    }

    /// Density the synthesis sees: empirical counts or the propagated vector.
    pub fn density(&self) -> Result<ProbabilityVector<T>> {
        match &self.model {
            SwarmModel::Agents(swarm) => empirical_density(swarm, self.synthesizer.topology().bins()),
            SwarmModel::Density { x, .. } => Ok(x.clone()),
        }
    }

    pub fn total_variation(&self) -> Result<T> {
        total_variation_slices(self.density()?.as_slice(), self.synthesizer.desired().as_slice())
    }

    /// Matrix that the next [`advance`](Self::advance) would apply.
    pub fn current_matrix(&self) -> Result<MarkovMatrix<T>> {
        match &self.fixed {
            Some(m) => Ok(m.clone()),
            None => self.synthesizer.synthesize(self.algorithm, self.density()?.as_slice()),
        }
    }

    pub fn apply_event(&mut self, event: &super::Event) -> Result<()> {
        match &mut self.model {
            SwarmModel::Agents(swarm) => *swarm = apply_event(swarm, event)?,
            SwarmModel::Density { agents, .. } => {
                event.validate()?;
                *agents = event.survivors(*agents);
            }
        }
        if self.num_agents() == 0 {
            return Err(Error::EmptySwarm);
        }
        Ok(())
    }

    /// Applies `matrix` and returns the (expected) number of transitions.
    pub fn advance_with(&mut self, matrix: &MarkovMatrix<T>) -> Result<f64> {
        let moved = match &mut self.model {
            SwarmModel::Agents(swarm) => {
                let next = step_agents(swarm, matrix, self.step)?;
                let moved = next.transitions_since(swarm) as f64;
                *swarm = next;
                moved
            }
            SwarmModel::Density { x, agents } => {
                let fraction = matrix.expected_transition_fraction(x.as_slice());
                *x = propagate_density(x, matrix)?;
                fraction.to_f64_lossy() * *agents as f64
            }
        };
        self.step += 1;
        Ok(moved)
    }

    pub fn advance(&mut self) -> Result<f64> {
        let matrix = self.current_matrix()?;
        self.advance_with(&matrix)
    }

    pub fn snapshot(&self) -> Result<Snapshot<T>> {
        let m = self.synthesizer.topology().bins();
        let empirical = self.density()?;
        let counts = match &self.model {
            SwarmModel::Agents(swarm) => swarm.counts(m)?.into_iter().map(|c| c as f64).collect(),
            SwarmModel::Density { x, agents } => {
                x.as_slice().iter().map(|p| p.to_f64_lossy() * *agents as f64).collect()
            }
        };
        Ok(Snapshot {
            step: self.step,
            counts,
            desired: self.synthesizer.desired().as_slice().to_vec(),
            empirical: empirical.into_inner(),
        })
    }
}

/// Runs `scenario` to completion.
///
/// Row `k` of the metrics describes the state after `k` moves; events
/// scheduled at step `k` take effect after row `k` is recorded. The output
/// depends only on the scenario, never on `options.workers`.
pub fn run_scenario<T: Scalar>(scenario: &Scenario, options: &RunOptions) -> Result<ScenarioOutput<T>> {
    match options.workers {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build()
                .map_err(|e| Error::InvalidScenario(format!("thread pool: {e}")))?;
            pool.install(|| run_inner(scenario, options))
        }
        None => run_inner(scenario, options),
    }
}

fn run_inner<T: Scalar>(scenario: &Scenario, options: &RunOptions) -> Result<ScenarioOutput<T>> {
    let mut sim = Simulation::<T>::new(scenario)?;
    let topology = sim.synthesizer().topology().clone();
    let mut audit = options.audit_matrices.then(MatrixAudit::<T>::new);
    let mut metrics = Vec::with_capacity(scenario.steps + 1);
    let mut snapshots = Vec::new();
    let mut cumulative = 0.0;
    let mut events = scenario.events.iter().peekable();

    let mut started = Instant::now();
    let mut moved = 0.0;
    for step in 0..=scenario.steps {
        cumulative += moved;
        metrics.push(MetricsRow {
            step,
            total_variation: sim.total_variation()?,
            transitions: moved,
            cumulative_transitions: cumulative,
            num_agents: sim.num_agents(),
            wall_time: started.elapsed(),
        });
        if options.snapshot_steps.contains(&step) {
            snapshots.push(sim.snapshot()?);
        }
        while let Some(event) = events.next_if(|e| e.step == step) {
            sim.apply_event(event)?;
        }
        if step == scenario.steps {
            break;
        }
        started = Instant::now();
        let matrix = sim.current_matrix()?;
        if let Some(audit) = audit.as_mut() {
            let report = validate_markov(matrix.as_matrix(), &topology);
            audit.matrices += 1;
            audit.worst_column_deviation = audit.worst_column_deviation.max_of(report.max_column_deviation);
            audit.min_entry = audit.min_entry.min_of(report.min_entry);
            audit.mask_violations += report.mask_violations.len();
        }
        moved = sim.advance_with(&matrix)?;
    }

    Ok(ScenarioOutput { metrics, snapshots, d_chsn: sim.synthesizer().params().d_chsn, audit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Event;
    use approx::assert_abs_diff_eq;

    fn cycle4(mode: Mode, steps: usize) -> Scenario {
        Scenario {
            rows: 2,
            cols: 2,
            hop: 1,
            desired: vec![vec![0.05, 0.05], vec![0.3, 0.6]],
            initial: Some(vec![vec![0.65, 0.35], vec![0.0, 0.0]]),
            agents: 1000,
            steps,
            algorithm: Algorithm::Dsmc,
            seed: 5,
            mode,
            events: vec![],
            d_chsn: None,
        }
    }

    #[test]
    fn propagate_identity() {
        let x = ProbabilityVector::new(vec![0.2, 0.8]).unwrap();
        assert_eq!(propagate_density(&x, &MarkovMatrix::identity(2)).unwrap(), x);
    }

    #[test]
    fn deterministic_cycle_trajectory() {
        let mut sim = Simulation::<f64>::new(&cycle4(Mode::Deterministic, 2)).unwrap();
        sim.advance().unwrap();
        let x1 = sim.density().unwrap();
        for (got, want) in x1.as_slice().iter().zip([0.25, 0.15, 0.3, 0.3]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        sim.advance().unwrap();
        let x2 = sim.density().unwrap();
        for (got, want) in x2.as_slice().iter().zip([0.15, 0.05, 0.8 / 3.0, 1.6 / 3.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn deterministic_cycle_metrics() {
        let out = run_scenario::<f64>(&cycle4(Mode::Deterministic, 2), &RunOptions::default()).unwrap();
        let tv: Vec<f64> = out.metrics.iter().map(|r| r.total_variation).collect();
        assert_eq!(out.metrics.len(), 3);
        for (got, want) in tv.iter().zip([0.9, 0.3, 0.1]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        assert_eq!(out.d_chsn, 3.0);
    }

    #[test]
    fn converged_start_stays_put() {
        let mut s = cycle4(Mode::Deterministic, 5);
        s.initial = Some(s.desired.clone());
        let out = run_scenario::<f64>(&s, &RunOptions::default()).unwrap();
        for row in &out.metrics {
            assert_abs_diff_eq!(row.total_variation, 0.0, epsilon = 1e-15);
            assert_eq!(row.transitions, 0.0);
        }
    }

    #[test]
    fn events_apply_after_their_row() {
        let mut s = cycle4(Mode::MonteCarlo, 4);
        s.events = vec![Event::remove_fraction(2, 0.5)];
        let out = run_scenario::<f64>(&s, &RunOptions { snapshot_steps: vec![4], ..Default::default() }).unwrap();
        let agents: Vec<usize> = out.metrics.iter().map(|r| r.num_agents).collect();
        assert_eq!(agents, vec![1000, 1000, 1000, 500, 500]);
        assert_eq!(out.snapshots.len(), 1);
        assert_eq!(out.snapshots[0].counts.iter().sum::<f64>(), 500.0);
    }

    #[test]
    fn metropolis_matrix_is_fixed() {
        let mut s = cycle4(Mode::MonteCarlo, 3);
        s.algorithm = Algorithm::MetropolisHastings;
        let mut sim = Simulation::<f64>::new(&s).unwrap();
        let first = sim.current_matrix().unwrap();
        sim.advance().unwrap();
        assert_eq!(sim.current_matrix().unwrap(), first);
    }
}
