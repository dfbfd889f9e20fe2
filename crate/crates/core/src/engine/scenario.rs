use std::fmt;
use std::str::FromStr;

use super::Event;
use crate::density::{from_weight_map, ProbabilityVector};
use crate::error::{Error, Result};
use crate::graph::{build_grid_topology, Topology};
use crate::scalar::Scalar;
use crate::synthesis::Algorithm;

/// How the swarm state is advanced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Individual agents sample their moves.
    MonteCarlo,
    /// The density vector is propagated exactly.
    Deterministic,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::MonteCarlo => "monte-carlo",
            Mode::Deterministic => "deterministic",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "monte-carlo" | "montecarlo" | "mc" => Ok(Mode::MonteCarlo),
            "deterministic" => Ok(Mode::Deterministic),
            other => Err(Error::InvalidScenario(format!("unknown mode '{other}'"))),
        }
    }
}

/// One experiment on a grid of bins.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub rows: usize,
    pub cols: usize,
    pub hop: usize,
    /// Desired density weights, `rows × cols`, normalized on use.
    pub desired: Vec<Vec<f64>>,
    /// Initial density weights; uniform over all bins when absent.
    pub initial: Option<Vec<Vec<f64>>>,
    pub agents: usize,
    pub steps: usize,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub mode: Mode,
    pub events: Vec<Event>,
    /// Overrides the default divisor (max degree + 1).
    pub d_chsn: Option<f64>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if self.rows == 0 || self.cols == 0 || self.hop == 0 {
            return bad(format!("grid {}x{} hop {} must be positive", self.rows, self.cols, self.hop));
        }
        if self.agents == 0 {
            return bad("agents must be positive".into());
        }
        check_grid("desired", &self.desired, self.rows, self.cols)?;
        if let Some(initial) = &self.initial {
            check_grid("initial", initial, self.rows, self.cols)?;
        }
        let mut last = 0;
        for event in &self.events {
            event.validate()?;
            if event.step > self.steps {
                return bad(format!("event step {} exceeds steps {}", event.step, self.steps));
            }
            if event.step < last {
                return bad("events must be sorted by step".into());
            }
            last = event.step;
        }
        if let Some(d) = self.d_chsn {
            if !(d.is_finite() && d > 0.0) {
                return bad(format!("d_chsn {d} must be positive"));
            }
        }
        Ok(())
    }

    pub fn topology(&self) -> Result<Topology> {
        build_grid_topology(self.rows, self.cols, self.hop)
    }

    pub fn desired_distribution<T: Scalar>(&self) -> Result<ProbabilityVector<T>> {
        from_weight_map(&convert(&self.desired))
    }

    pub fn initial_distribution<T: Scalar>(&self) -> Result<ProbabilityVector<T>> {
        match &self.initial {
            Some(weights) => from_weight_map(&convert(weights)),
            None => Ok(ProbabilityVector::uniform(self.rows * self.cols)),
        }
    }

    pub fn bins(&self) -> usize {
        self.rows * self.cols
    }
}

fn check_grid(name: &str, grid: &[Vec<f64>], rows: usize, cols: usize) -> Result<()> {
    if grid.len() != rows || grid.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidScenario(format!("{name} map must be {rows}x{cols}")));
    }
    if grid.iter().flatten().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::InvalidScenario(format!("{name} map has a negative or non-finite weight")));
    }
    Ok(())
}

fn convert<T: Scalar>(grid: &[Vec<f64>]) -> Vec<Vec<T>> {
    grid.iter().map(|row| row.iter().map(|&w| T::lit(w)).collect()).collect()
}
