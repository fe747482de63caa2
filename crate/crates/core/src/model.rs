//! Networks of logical nodes and their global transition matrices.
//!
//! A network has `n` nodes; node `i` takes values in `{1, …, k_i}` and
//! updates from the values of an ordered neighbour set `N_i`. The joint state
//! is `x = x_1 ⋉ x_2 ⋉ … ⋉ x_n`, which fixes a mixed-radix numbering of the
//! `k = ∏ k_i` global states with node 1 most significant.
//!
//! Local rules are lifted to functions of the whole state by composing with
//! the projection `Φ_{N_i}`, and the lifted rules are folded together with
//! the Khatri-Rao product into the global transition matrix.

use crate::algebra::{
    khatri_rao, khatri_rao_logical, projection_matrix, DenseMatrix, LogicalMatrix, StochasticMatrix,
};
use crate::error::{Error, Result};
use crate::limits::{check_dim, STOCHASTIC_TOLERANCE};

/// Global state number (1-based) of the node values `values`.
pub fn state_encode(values: &[usize], alphabets: &[usize]) -> Result<usize> {
    if values.len() != alphabets.len() {
        return Err(Error::shape(
            "state_encode",
            format!("{} values for {} nodes", values.len(), alphabets.len()),
        ));
    }
    let mut index = 0usize;
    for (&x, &k) in values.iter().zip(alphabets) {
        if x == 0 || x > k {
            return Err(Error::OutOfRange {
                value: x,
                min: 1,
                max: k,
            });
        }
        index = index
            .checked_mul(k)
            .and_then(|i| i.checked_add(x - 1))
            .ok_or_else(|| Error::Domain("state index overflows".into()))?;
    }
    Ok(index + 1)
}

/// Node values (1-based) of the global state number `index`.
pub fn state_decode(index: usize, alphabets: &[usize]) -> Result<Vec<usize>> {
    let k = check_dim("state space", alphabets)?;
    if index == 0 || index > k {
        return Err(Error::OutOfRange {
            value: index,
            min: 1,
            max: k,
        });
    }
    let mut rest = index - 1;
    let mut values = vec![0; alphabets.len()];
    for (v, &a) in values.iter_mut().zip(alphabets).rev() {
        *v = rest % a + 1;
        rest /= a;
    }
    Ok(values)
}

/// The update rule of a single node.
#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    /// Structure matrix `M_i`, `k_i × ∏_{j∈N_i} k_j`.
    Deterministic(LogicalMatrix),
    /// Transition matrix `Q_i`. With `lifted` set it is already `Q̂_i`,
    /// with one column per global state.
    Stochastic {
        matrix: StochasticMatrix,
        lifted: bool,
    },
}

impl Rule {
    pub fn is_deterministic(&self) -> bool {
        matches!(self, Rule::Deterministic(_))
    }

    fn shape(&self) -> (usize, usize) {
        match self {
            Rule::Deterministic(m) => (m.rows(), m.cols()),
            Rule::Stochastic { matrix, .. } => (matrix.rows(), matrix.cols()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub alphabet: usize,
    /// 1-based, strictly ascending node ids.
    pub neighbors: Vec<usize>,
    pub rule: Rule,
}

/// A lifted rule: `M̂_i = M_i Φ_{N_i}` or `Q̂_i = Q_i Φ_{N_i}`.
#[derive(Debug, Clone, PartialEq)]
pub enum LiftedMatrix {
    Logical(LogicalMatrix),
    Stochastic(StochasticMatrix),
}

/// The lifted rules of every node, all of one kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Lifted {
    Logical(Vec<LogicalMatrix>),
    Stochastic(Vec<StochasticMatrix>),
}

/// Lifts a local rule to act on the global state vector.
pub fn lift_local(rule: &Rule, neighbors: &[usize], alphabets: &[usize]) -> Result<LiftedMatrix> {
    let k = check_dim("state space", alphabets)?;
    if let Rule::Stochastic {
        matrix,
        lifted: true,
    } = rule
    {
        if matrix.cols() != k {
            return Err(Error::shape(
                "lift_local",
                format!(
                    "lifted matrix has {} columns, state space has {k}",
                    matrix.cols()
                ),
            ));
        }
        return Ok(LiftedMatrix::Stochastic(matrix.clone()));
    }

    let phi = projection_matrix(alphabets, neighbors)?;
    let (_, cols) = rule.shape();
    if cols != phi.rows() {
        return Err(Error::shape(
            "lift_local",
            format!(
                "rule has {cols} columns, neighbours have {} joint states",
                phi.rows()
            ),
        ));
    }
    match rule {
        Rule::Deterministic(m) => {
            let indices = phi.indices().iter().map(|&r| m.index(r - 1)).collect();
            Ok(LiftedMatrix::Logical(LogicalMatrix::new(
                m.rows(),
                indices,
            )?))
        }
        Rule::Stochastic { matrix, .. } => {
            let rows = matrix.rows();
            let mut data = vec![0.0; rows * k];
            for (c, &r) in phi.indices().iter().enumerate() {
                for i in 0..rows {
                    data[i * k + c] = matrix.get(i, r - 1);
                }
            }
            Ok(LiftedMatrix::Stochastic(StochasticMatrix::from_parts(
                DenseMatrix::from_parts(rows, k, data),
                matrix.tolerance(),
                matrix.is_substochastic(),
            )))
        }
    }
}

/// Description of one node in table/matrix form, as read from a model file.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeDescription {
    pub alphabet: usize,
    pub neighbors: Vec<usize>,
    pub rule: RuleDescription,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RuleDescription {
    /// Output value (1-based) for each neighbour state, in mixed-radix order.
    Table(Vec<usize>),
    /// Row-major transition matrix.
    Matrix { rows: Vec<Vec<f64>>, lifted: bool },
}

/// A validated logical network. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkModel {
    nodes: Vec<Node>,
    alphabets: Vec<usize>,
    state_count: usize,
}

impl NetworkModel {
    pub fn new(nodes: Vec<Node>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Domain("a network needs at least one node".into()));
        }
        let alphabets: Vec<usize> = nodes.iter().map(|n| n.alphabet).collect();
        if let Some(i) = alphabets.iter().position(|&k| k == 0) {
            return Err(Error::Domain(format!(
                "node {} has an empty alphabet",
                i + 1
            )));
        }
        let state_count = check_dim("state space", &alphabets)?;
        let deterministic = nodes[0].rule.is_deterministic();
        let n = nodes.len();
        for (i, node) in nodes.iter().enumerate() {
            let id = i + 1;
            if node.rule.is_deterministic() != deterministic {
                return Err(Error::Domain(format!(
                    "node {id}: deterministic and stochastic rules cannot be mixed"
                )));
            }
            if let Some(w) = node.neighbors.windows(2).find(|w| w[0] >= w[1]) {
                return Err(Error::Domain(format!(
                    "node {id}: neighbours must be strictly ascending ({} then {})",
                    w[0], w[1]
                )));
            }
            if let Some(&bad) = node.neighbors.iter().find(|&&j| j == 0 || j > n) {
                return Err(Error::Domain(format!(
                    "node {id}: neighbour {bad} is not a node"
                )));
            }
            let (rows, cols) = node.rule.shape();
            if rows != node.alphabet {
                return Err(Error::shape(
                    "NetworkModel::new",
                    format!(
                        "node {id}: rule has {rows} rows, alphabet size is {}",
                        node.alphabet
                    ),
                ));
            }
            let expected = match &node.rule {
                Rule::Stochastic { lifted: true, .. } => state_count,
                _ => node.neighbors.iter().map(|&j| alphabets[j - 1]).product(),
            };
            if cols != expected {
                return Err(Error::shape(
                    "NetworkModel::new",
                    format!("node {id}: rule has {cols} columns, expected {expected}"),
                ));
            }
        }
        Ok(NetworkModel {
            nodes,
            alphabets,
            state_count,
        })
    }

    /// Builds structure matrices and transition matrices from per-node
    /// tables. Matrices whose columns do not sum to one are rejected unless
    /// `allow_substochastic` is set.
    pub fn from_rule_tables(
        description: &[NodeDescription],
        allow_substochastic: bool,
    ) -> Result<Self> {
        let nodes = description
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let rule = match &d.rule {
                    RuleDescription::Table(table) => {
                        if table.is_empty() {
                            return Err(Error::Domain(format!("node {}: empty table", i + 1)));
                        }
                        Rule::Deterministic(
                            LogicalMatrix::new(d.alphabet, table.clone())
                                .map_err(|e| at_node(i, ":", e))?,
                        )
                    }
                    RuleDescription::Matrix { rows, lifted } => {
                        let dense = DenseMatrix::from_rows(rows).map_err(|e| at_node(i, ":", e))?;
                        let matrix = if allow_substochastic {
                            StochasticMatrix::admit_substochastic(dense, STOCHASTIC_TOLERANCE)
                        } else {
                            StochasticMatrix::new(dense)
                        }
                        .map_err(|e| at_node(i, "", e))?;
                        Rule::Stochastic {
                            matrix,
                            lifted: *lifted,
                        }
                    }
                };
                Ok(Node {
                    alphabet: d.alphabet,
                    neighbors: d.neighbors.clone(),
                    rule,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(nodes)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn alphabets(&self) -> &[usize] {
        &self.alphabets
    }

    /// `k = ∏ k_i`.
    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn is_deterministic(&self) -> bool {
        self.nodes[0].rule.is_deterministic()
    }

    /// True when some stochastic rule was admitted without summing to one.
    pub fn is_substochastic(&self) -> bool {
        self.nodes.iter().any(|n| match &n.rule {
            Rule::Stochastic { matrix, .. } => matrix.is_substochastic(),
            Rule::Deterministic(_) => false,
        })
    }

    pub fn lift(&self) -> Result<Lifted> {
        let lifted = self
            .nodes
            .iter()
            .map(|n| lift_local(&n.rule, &n.neighbors, &self.alphabets))
            .collect::<Result<Vec<_>>>()?;
        if self.is_deterministic() {
            Ok(Lifted::Logical(
                lifted
                    .into_iter()
                    .map(|l| match l {
                        LiftedMatrix::Logical(m) => m,
                        LiftedMatrix::Stochastic(_) => unreachable!("model kinds are uniform"),
                    })
                    .collect(),
            ))
        } else {
            Ok(Lifted::Stochastic(
                lifted
                    .into_iter()
                    .map(|l| match l {
                        LiftedMatrix::Stochastic(m) => m,
                        LiftedMatrix::Logical(_) => unreachable!("model kinds are uniform"),
                    })
                    .collect(),
            ))
        }
    }

    pub fn assemble(&self) -> Result<GlobalSystem> {
        assemble_global(self.lift()?)
    }
}

/// The global form `x(t+1) = M x(t)` or `p(t+1) = Q p(t)`, with the lifted
/// per-node matrices it was assembled from.
#[derive(Debug, Clone, PartialEq)]
pub enum GlobalSystem {
    Deterministic {
        alphabets: Vec<usize>,
        transition: LogicalMatrix,
        lifted: Vec<LogicalMatrix>,
    },
    Stochastic {
        alphabets: Vec<usize>,
        transition: StochasticMatrix,
        lifted: Vec<StochasticMatrix>,
    },
}

/// Folds the lifted matrices with the Khatri-Rao product:
/// `M = M̂_1 * M̂_2 * … * M̂_n` (resp. `Q`). Node alphabets are the row counts.
pub fn assemble_global(lifted: Lifted) -> Result<GlobalSystem> {
    match lifted {
        Lifted::Logical(ms) => {
            let alphabets: Vec<usize> = ms.iter().map(|m| m.rows()).collect();
            let k = check_lifted_shapes(&alphabets, ms.iter().map(|m| m.cols()))?;
            let mut acc = LogicalMatrix::ones_row(k)?;
            for m in &ms {
                acc = khatri_rao_logical(&acc, m)?;
            }
            Ok(GlobalSystem::Deterministic {
                alphabets,
                transition: acc,
                lifted: ms,
            })
        }
        Lifted::Stochastic(qs) => {
            let alphabets: Vec<usize> = qs.iter().map(|q| q.rows()).collect();
            let k = check_lifted_shapes(&alphabets, qs.iter().map(|q| q.cols()))?;
            let mut acc = DenseMatrix::ones_row(k)?;
            for q in &qs {
                acc = khatri_rao(&acc, q.matrix())?;
            }
            let tolerance = qs
                .iter()
                .map(StochasticMatrix::tolerance)
                .fold(STOCHASTIC_TOLERANCE, f64::max);
            let substochastic = qs.iter().any(StochasticMatrix::is_substochastic);
            Ok(GlobalSystem::Stochastic {
                alphabets,
                transition: StochasticMatrix::from_parts(acc, tolerance, substochastic),
                lifted: qs,
            })
        }
    }
}

fn check_lifted_shapes(alphabets: &[usize], cols: impl Iterator<Item = usize>) -> Result<usize> {
    if alphabets.is_empty() {
        return Err(Error::Domain("nothing to assemble".into()));
    }
    let k = check_dim("state space", alphabets)?;
    check_dim("global transition matrix", &[k, k])?;
    for (i, c) in cols.enumerate() {
        if c != k {
            return Err(Error::shape(
                "assemble_global",
                format!("lifted matrix {} has {c} columns, expected {k}", i + 1),
            ));
        }
    }
    Ok(k)
}

impl GlobalSystem {
    pub fn alphabets(&self) -> &[usize] {
        match self {
            GlobalSystem::Deterministic { alphabets, .. }
            | GlobalSystem::Stochastic { alphabets, .. } => alphabets,
        }
    }

    pub fn state_count(&self) -> usize {
        self.alphabets().iter().product()
    }

    pub fn node_count(&self) -> usize {
        self.alphabets().len()
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, GlobalSystem::Deterministic { .. })
    }

    /// Recovers the lifted matrix of node `i` (1-based) from the global
    /// transition matrix alone, as `Φ_i M` (resp. `Φ_i Q`).
    pub fn extract_subsystem(&self, i: usize) -> Result<LiftedMatrix> {
        let alphabets = self.alphabets();
        if i == 0 || i > alphabets.len() {
            return Err(Error::OutOfRange {
                value: i,
                min: 1,
                max: alphabets.len(),
            });
        }
        let ki = alphabets[i - 1];
        let stride: usize = alphabets[i..].iter().product();
        let digit = |row: usize| (row / stride) % ki;
        match self {
            GlobalSystem::Deterministic { transition, .. } => {
                let indices = transition
                    .indices()
                    .iter()
                    .map(|&r| digit(r - 1) + 1)
                    .collect();
                Ok(LiftedMatrix::Logical(LogicalMatrix::new(ki, indices)?))
            }
            GlobalSystem::Stochastic { transition, .. } => {
                let q = transition.matrix();
                let k = q.cols();
                let mut data = vec![0.0; ki * k];
                for g in 0..q.rows() {
                    let out = &mut data[digit(g) * k..(digit(g) + 1) * k];
                    for (o, v) in out.iter_mut().zip(q.row(g)) {
                        *o += v;
                    }
                }
                Ok(LiftedMatrix::Stochastic(StochasticMatrix::from_parts(
                    DenseMatrix::from_parts(ki, k, data),
                    transition.tolerance(),
                    transition.is_substochastic(),
                )))
            }
        }
    }
}

/// Prefixes an error with its node; cap errors pass through untouched so
/// callers can still tell them apart.
fn at_node(i: usize, sep: &str, e: Error) -> Error {
    if e.is_dimension_cap() {
        e
    } else {
        Error::Domain(format!("node {}{sep} {e}", i + 1))
    }
}
