//! JSON model files.
//!
//! ```json
//! {
//!   "version": "1",
//!   "nodes": [
//!     {"id": 1, "k": 2, "neighbors": [1, 2],
//!      "rule": {"type": "stochastic", "matrix": [[0.3, 0.5, 1, 0.2], [0.7, 0.5, 0, 0.8]], "lifted": true}},
//!     {"id": 2, "k": 2, "neighbors": [1],
//!      "rule": {"type": "deterministic", "table": [2, 1]}}
//!   ]
//! }
//! ```

use std::path::Path;

use lds_core::algebra::{validate_stochastic, DenseMatrix};
use lds_core::limits::{dimension_cap, STOCHASTIC_TOLERANCE};
use lds_core::model::{NetworkModel, NodeDescription, RuleDescription};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub version: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub allow_substochastic: bool,
    pub nodes: Vec<NodeEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeEntry {
    pub id: usize,
    pub k: usize,
    #[serde(default)]
    pub neighbors: Vec<usize>,
    pub rule: RuleEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum RuleEntry {
    Deterministic {
        table: Vec<usize>,
    },
    Stochastic {
        matrix: Vec<Vec<f64>>,
        #[serde(default)]
        lifted: bool,
    },
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text)
            .map_err(|e| CliError::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model files always serialize")
    }

    /// Every problem with the file, one message per violation. An empty list
    /// means [`ModelFile::build`] will succeed.
    pub fn violations(&self, allow_substochastic: bool) -> Vec<String> {
        let allow = allow_substochastic || self.allow_substochastic;
        let mut out = Vec::new();
        if self.version != FORMAT_VERSION {
            out.push(format!(
                "unsupported version \"{}\" (expected \"{FORMAT_VERSION}\")",
                self.version
            ));
        }
        if self.nodes.is_empty() {
            out.push("model has no nodes".into());
            return out;
        }
        let n = self.nodes.len();
        let mut ids: Vec<usize> = self.nodes.iter().map(|node| node.id).collect();
        ids.sort_unstable();
        if ids != (1..=n).collect::<Vec<_>>() {
            out.push(format!(
                "node ids must be 1..{n} with no gaps or repeats, found {ids:?}"
            ));
            return out;
        }
        let mut alphabets = vec![0; n];
        for node in &self.nodes {
            alphabets[node.id - 1] = node.k;
        }
        let state_count = alphabets
            .iter()
            .try_fold(1u128, |acc, &a| acc.checked_mul(a as u128))
            .unwrap_or(u128::MAX);

        let mut kinds = self
            .nodes
            .iter()
            .map(|node| matches!(node.rule, RuleEntry::Deterministic { .. }));
        let first = kinds.next().unwrap_or(true);
        if kinds.any(|d| d != first) {
            out.push("deterministic and stochastic rules cannot be mixed".into());
        }

        for node in self.sorted_nodes() {
            let id = node.id;
            if node.k == 0 {
                out.push(format!("node {id} has k = 0"));
                continue;
            }
            let mut neighbors_ok = true;
            for w in node.neighbors.windows(2) {
                if w[0] >= w[1] {
                    out.push(format!(
                        "node {id} neighbors must be strictly ascending ({} then {})",
                        w[0], w[1]
                    ));
                    neighbors_ok = false;
                }
            }
            for &j in &node.neighbors {
                if j == 0 || j > n {
                    out.push(format!("node {id} neighbor {j} is not a node"));
                    neighbors_ok = false;
                }
            }
            if !neighbors_ok {
                continue;
            }
            let arity: u128 = node
                .neighbors
                .iter()
                .map(|&j| alphabets[j - 1] as u128)
                .product();
            match &node.rule {
                RuleEntry::Deterministic { table } => {
                    if table.len() as u128 != arity {
                        out.push(format!(
                            "node {id} table has {} entries, expected {arity}",
                            table.len()
                        ));
                    }
                    for (c, &v) in table.iter().enumerate() {
                        if v == 0 || v > node.k {
                            out.push(format!(
                                "node {id} column {} value {v} is outside 1..{}",
                                c + 1,
                                node.k
                            ));
                        }
                    }
                }
                RuleEntry::Stochastic { matrix, lifted } => {
                    let cols = if *lifted { state_count } else { arity };
                    if matrix.len() != node.k {
                        out.push(format!(
                            "node {id} matrix has {} rows, expected k = {}",
                            matrix.len(),
                            node.k
                        ));
                        continue;
                    }
                    let mut shape_ok = true;
                    for (r, row) in matrix.iter().enumerate() {
                        if row.len() as u128 != cols {
                            out.push(format!(
                                "node {id} row {} has {} entries, expected {cols}",
                                r + 1,
                                row.len()
                            ));
                            shape_ok = false;
                        }
                        for (c, v) in row.iter().enumerate() {
                            if !v.is_finite() {
                                out.push(format!(
                                    "node {id} row {} column {} is not finite",
                                    r + 1,
                                    c + 1
                                ));
                                shape_ok = false;
                            }
                        }
                    }
                    if !shape_ok || cols == 0 || cols > dimension_cap() as u128 {
                        continue;
                    }
                    let dense = match DenseMatrix::from_rows(matrix) {
                        Ok(m) => m,
                        Err(e) => {
                            out.push(format!("node {id} {e}"));
                            continue;
                        }
                    };
                    for v in validate_stochastic(&dense, STOCHASTIC_TOLERANCE).violations {
                        let negative =
                            matches!(v, lds_core::algebra::StochasticViolation::Negative { .. });
                        if negative || !allow {
                            out.push(format!("node {id} {v}"));
                        }
                    }
                }
            }
        }
        if out.is_empty() {
            if let Err(e) = self.build(allow_substochastic) {
                out.push(e.to_string());
            }
        }
        out
    }

    fn sorted_nodes(&self) -> Vec<&NodeEntry> {
        let mut nodes: Vec<&NodeEntry> = self.nodes.iter().collect();
        nodes.sort_by_key(|node| node.id);
        nodes
    }

    pub fn descriptions(&self) -> Vec<NodeDescription> {
        self.sorted_nodes()
            .into_iter()
            .map(|node| NodeDescription {
                alphabet: node.k,
                neighbors: node.neighbors.clone(),
                rule: match &node.rule {
                    RuleEntry::Deterministic { table } => RuleDescription::Table(table.clone()),
                    RuleEntry::Stochastic { matrix, lifted } => RuleDescription::Matrix {
                        rows: matrix.clone(),
                        lifted: *lifted,
                    },
                },
            })
            .collect()
    }

    /// Builds the validated network. Stops at the first problem; use
    /// [`ModelFile::violations`] for a full list.
    pub fn build(&self, allow_substochastic: bool) -> Result<NetworkModel, CliError> {
        if self.version != FORMAT_VERSION {
            return Err(CliError::Invalid(vec![format!(
                "unsupported version \"{}\" (expected \"{FORMAT_VERSION}\")",
                self.version
            )]));
        }
        let n = self.nodes.len();
        let mut ids: Vec<usize> = self.nodes.iter().map(|node| node.id).collect();
        ids.sort_unstable();
        if n == 0 || ids != (1..=n).collect::<Vec<_>>() {
            return Err(CliError::Invalid(vec![format!(
                "node ids must be 1..{n} with no gaps or repeats"
            )]));
        }
        NetworkModel::from_rule_tables(
            &self.descriptions(),
            allow_substochastic || self.allow_substochastic,
        )
        .map_err(CliError::from)
    }
}
