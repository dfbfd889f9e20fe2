//! Line-oriented scenario files.
//!
//! ```text
//! # comment
//! rows=20
//! cols=20
//! hop=1
//! agents=5000
//! steps=750
//! algorithm=dsmc
//! seed=42
//! mode=monte-carlo
//! event=remove_fraction,250,0.3333
//! map:
//! ....##....
//! ```
//!
//! The desired density comes from a `map:` section (`.` = 0, `#` = 1,
//! `1`-`9` = that weight) or a `weights:` section of whitespace-separated
//! numbers. An optional `initial:` section of numbers sets the starting
//! density; it is uniform otherwise. `d_chsn=` overrides the default
//! divisor.

use std::collections::HashMap;
use std::fmt::Write as _;

use swarm_guidance::engine::{Event, EventKind};
use swarm_guidance::{Algorithm, Mode, Scenario};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

const REQUIRED: [&str; 8] = ["rows", "cols", "hop", "agents", "steps", "algorithm", "seed", "mode"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Map,
    Weights,
    Initial,
}

impl Section {
    fn from_header(header: &str) -> Option<Self> {
        match header {
            "map" => Some(Section::Map),
            "weights" => Some(Section::Weights),
            "initial" => Some(Section::Initial),
            _ => None,
        }
    }
}

/// Section kind, header line, and numbered content lines.
type SectionLines<'a> = (Section, usize, Vec<(usize, &'a str)>);

pub fn parse_scenario(text: &str) -> Result<Scenario, ParseError> {
    let mut keys: HashMap<&str, (usize, &str)> = HashMap::new();
    let mut events: Vec<(usize, Event)> = Vec::new();
    let mut sections: Vec<SectionLines> = Vec::new();
    let mut open: Option<usize> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') && open.is_none() {
            open = if line.is_empty() { None } else { open };
            continue;
        }
        if let Some((key, value)) = line.split_once('=') {
            open = None;
            let (key, value) = (key.trim(), value.trim());
            if key == "event" {
                events.push((line_no, parse_event(value, line_no)?));
            } else if keys.insert(key, (line_no, value)).is_some() {
                return Err(err(line_no, format!("duplicate key '{key}'")));
            }
            continue;
        }
        if let Some(header) = line.strip_suffix(':') {
            let section = Section::from_header(header.trim())
                .ok_or_else(|| err(line_no, format!("unknown section '{header}'")))?;
            if sections.iter().any(|(s, _, _)| *s == section) {
                return Err(err(line_no, format!("duplicate section '{header}'")));
            }
            sections.push((section, line_no, Vec::new()));
            open = Some(sections.len() - 1);
            continue;
        }
        match open {
            Some(i) => sections[i].2.push((line_no, line)),
            None => return Err(err(line_no, format!("unexpected line '{line}'"))),
        }
    }

    for key in REQUIRED {
        if !keys.contains_key(key) {
            return Err(err(text.lines().count().max(1), format!("missing key '{key}'")));
        }
    }
    let get = |key: &str| keys[key];
    let rows: usize = number(get("rows"))?;
    let cols: usize = number(get("cols"))?;
    let hop: usize = number(get("hop"))?;
    let agents: usize = number(get("agents"))?;
    let steps: usize = number(get("steps"))?;
    let seed: u64 = number(get("seed"))?;
    let (alg_line, alg) = get("algorithm");
    let algorithm: Algorithm = alg.parse().map_err(|_| err(alg_line, format!("unknown algorithm '{alg}'")))?;
    let (mode_line, mode) = get("mode");
    let mode: Mode = mode.parse().map_err(|_| err(mode_line, format!("unknown mode '{mode}'")))?;
    let d_chsn = match keys.get("d_chsn") {
        Some(&entry) => Some(number::<f64>(entry)?),
        None => None,
    };
    for (&key, &(line, _)) in &keys {
        if !REQUIRED.contains(&key) && key != "d_chsn" {
            return Err(err(line, format!("unknown key '{key}'")));
        }
    }
    if rows == 0 || cols == 0 {
        return Err(err(get("rows").0, "rows and cols must be positive"));
    }

    let mut desired = None;
    let mut initial = None;
    for (section, header_line, lines) in &sections {
        let grid = read_grid(*section, *header_line, lines, rows, cols)?;
        match section {
            Section::Map | Section::Weights => {
                if desired.is_some() {
                    return Err(err(*header_line, "desired density given twice (map and weights)"));
                }
                desired = Some(grid);
            }
            Section::Initial => initial = Some(grid),
        }
    }
    let desired = desired.ok_or_else(|| err(text.lines().count().max(1), "missing 'map:' or 'weights:' section"))?;

    for (line, event) in &events {
        if event.step > steps {
            return Err(err(*line, format!("event step {} exceeds steps {steps}", event.step)));
        }
    }
    if events.windows(2).any(|w| w[1].1.step < w[0].1.step) {
        return Err(err(events[0].0, "events must be sorted by step"));
    }

    let scenario = Scenario {
        rows,
        cols,
        hop,
        desired,
        initial,
        agents,
        steps,
        algorithm,
        seed,
        mode,
        events: events.into_iter().map(|(_, e)| e).collect(),
        d_chsn,
    };
    scenario.validate().map_err(|e| err(1, e.to_string()))?;
    Ok(scenario)
}

fn number<N: std::str::FromStr>((line, value): (usize, &str)) -> Result<N, ParseError> {
    value.parse().map_err(|_| err(line, format!("invalid number '{value}'")))
}

fn parse_event(value: &str, line: usize) -> Result<Event, ParseError> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    match parts.as_slice() {
        ["remove_fraction", step, fraction] => {
            let step: usize = number((line, step))?;
            let fraction: f64 = number((line, fraction))?;
            let event = Event::remove_fraction(step, fraction);
            event.validate().map_err(|e| err(line, e.to_string()))?;
            Ok(event)
        }
        _ => Err(err(line, format!("unrecognized event '{value}'"))),
    }
}

fn read_grid(
    section: Section,
    header_line: usize,
    lines: &[(usize, &str)],
    rows: usize,
    cols: usize,
) -> Result<Vec<Vec<f64>>, ParseError> {
    if lines.len() != rows {
        return Err(err(header_line, format!("section has {} rows, expected {rows}", lines.len())));
    }
    lines
        .iter()
        .enumerate()
        .map(|(r, &(line_no, line))| {
            let row: Vec<f64> = match section {
                Section::Map => line
                    .chars()
                    .map(|c| match c {
                        '.' => Ok(0.0),
                        '#' => Ok(1.0),
                        '1'..='9' => Ok(f64::from(c as u8 - b'0')),
                        other => Err(err(line_no, format!("map row {} has invalid character '{other}'", r + 1))),
                    })
                    .collect::<Result<_, _>>()?,
                Section::Weights | Section::Initial => line
                    .split_whitespace()
                    .map(|w| match w.parse::<f64>() {
                        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
                        _ => Err(err(line_no, format!("row {} has invalid weight '{w}'", r + 1))),
                    })
                    .collect::<Result<_, _>>()?,
            };
            if row.len() != cols {
                return Err(err(line_no, format!("row {} has {} entries, expected {cols}", r + 1, row.len())));
            }
            Ok(row)
        })
        .collect()
}

/// Inverse of [`parse_scenario`] up to formatting.
pub fn render_scenario(s: &Scenario) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "rows={}", s.rows);
    let _ = writeln!(out, "cols={}", s.cols);
    let _ = writeln!(out, "hop={}", s.hop);
    let _ = writeln!(out, "agents={}", s.agents);
    let _ = writeln!(out, "steps={}", s.steps);
    let _ = writeln!(out, "algorithm={}", s.algorithm);
    let _ = writeln!(out, "seed={}", s.seed);
    let _ = writeln!(out, "mode={}", s.mode);
    if let Some(d) = s.d_chsn {
        let _ = writeln!(out, "d_chsn={d}");
    }
    for event in &s.events {
        match event.kind {
            EventKind::RemoveFraction(f) => {
                let _ = writeln!(out, "event=remove_fraction,{},{f}", event.step);
            }
        }
    }
    let as_map = s.desired.iter().flatten().all(|&w| w == w.trunc() && (0.0..=9.0).contains(&w));
    if as_map {
        out.push_str("map:\n");
        for row in &s.desired {
            let line: String = row
                .iter()
                .map(|&w| match w as u8 {
                    0 => '.',
                    1 => '#',
                    d => char::from(b'0' + d),
                })
                .collect();
            out.push_str(&line);
            out.push('\n');
        }
    } else {
        out.push_str("weights:\n");
        write_numeric_rows(&mut out, &s.desired);
    }
    if let Some(initial) = &s.initial {
        out.push_str("initial:\n");
        write_numeric_rows(&mut out, initial);
    }
    out
}

fn write_numeric_rows(out: &mut String, grid: &[Vec<f64>]) {
    for row in grid {
        let line: Vec<String> = row.iter().map(|w| w.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
}
