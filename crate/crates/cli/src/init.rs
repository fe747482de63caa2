//! `--init` and `--at` arguments.
//!
//! Accepted forms:
//!
//! * `3`: a global state (1-based), i.e. a point mass;
//! * `0.4,0.6;0.5,0.5`: one distribution per node, `;`-separated;
//! * `0.2,0.2,0.3,0.3`: a joint distribution;
//! * a path to a file holding the same numbers, one vector per line (lines
//!   starting with `#` and a non-numeric header line are skipped).

use lds_core::algebra::ProbabilityVector;
use lds_core::evolution::FactorState;
use lds_core::model::state_decode;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    State(usize),
    Vectors(Vec<Vec<f64>>),
}

fn looks_inline(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_digit() || ".,;eE+- \t".contains(c))
}

fn parse_vectors<'a>(parts: impl Iterator<Item = &'a str>) -> Result<Vec<Vec<f64>>, String> {
    parts
        .map(|part| {
            part.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| format!("\"{}\" is not a number", x.trim()))
                })
                .collect()
        })
        .collect()
}

pub fn parse_init(arg: &str) -> Result<InitSpec, CliError> {
    let arg = arg.trim();
    if looks_inline(arg) {
        return parse_inline(arg);
    }
    let text = std::fs::read_to_string(arg).map_err(|e| {
        CliError::Usage(format!(
            "--init {arg}: not a vector and not a readable file ({e})"
        ))
    })?;
    let mut lines: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    if lines.first().is_some_and(|l| !looks_inline(l)) {
        lines.remove(0);
    }
    if lines.is_empty() {
        return Err(CliError::Usage(format!(
            "--init {arg}: file holds no vectors"
        )));
    }
    parse_inline(&lines.join(";"))
}

fn parse_inline(arg: &str) -> Result<InitSpec, CliError> {
    if let Ok(state) = arg.parse::<usize>() {
        return Ok(InitSpec::State(state));
    }
    parse_vectors(arg.split(';'))
        .map(InitSpec::Vectors)
        .map_err(|e| CliError::Usage(format!("--init: {e}")))
}

fn distribution(v: &[f64]) -> Result<ProbabilityVector, CliError> {
    ProbabilityVector::new(v.to_vec()).map_err(CliError::from)
}

impl InitSpec {
    /// Global state for a deterministic run.
    pub fn state(&self, k: usize) -> Result<usize, CliError> {
        match self {
            InitSpec::State(x) if (1..=k).contains(x) => Ok(*x),
            InitSpec::State(x) => Err(CliError::Usage(format!(
                "initial state {x} is outside 1..{k}"
            ))),
            InitSpec::Vectors(_) => Err(CliError::Usage(
                "deterministic runs start from a global state, e.g. --init 3".into(),
            )),
        }
    }

    /// Per-node distributions; a global state becomes point masses.
    pub fn factors(&self, alphabets: &[usize]) -> Result<FactorState, CliError> {
        match self {
            InitSpec::State(_) => {
                let k: usize = alphabets.iter().product();
                let x = self.state(k)?;
                let values = state_decode(x, alphabets)?;
                let factors = values
                    .iter()
                    .zip(alphabets)
                    .map(|(&v, &a)| ProbabilityVector::point_mass(a, v))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(FactorState::new(factors)?)
            }
            InitSpec::Vectors(vs) => {
                let dims: Vec<usize> = vs.iter().map(Vec::len).collect();
                if dims != alphabets {
                    return Err(CliError::Usage(format!(
                        "expected one distribution per node with sizes {alphabets:?}, got sizes {dims:?}"
                    )));
                }
                let factors = vs
                    .iter()
                    .map(|v| distribution(v))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(FactorState::new(factors)?)
            }
        }
    }

    /// A joint distribution; factors are multiplied out and a global state
    /// becomes a point mass.
    pub fn joint(&self, alphabets: &[usize]) -> Result<ProbabilityVector, CliError> {
        let k: usize = alphabets.iter().product();
        match self {
            InitSpec::State(_) => Ok(ProbabilityVector::point_mass(k, self.state(k)?)?),
            InitSpec::Vectors(vs) if vs.len() == 1 && vs[0].len() == k => distribution(&vs[0]),
            InitSpec::Vectors(_) => Ok(self.factors(alphabets)?.joint()?),
        }
    }
}
