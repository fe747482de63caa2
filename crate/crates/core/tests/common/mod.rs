#![allow(dead_code)]

use lds_core::algebra::{kron, stp, DenseMatrix, ProbabilityVector, StochasticMatrix};
use lds_core::evolution::FactorState;
use lds_core::model::{NetworkModel, NodeDescription, RuleDescription};
use rand::Rng;

pub fn stochastic(rows: &[&[f64]]) -> StochasticMatrix {
    StochasticMatrix::from_rows(rows).unwrap()
}

pub fn example1() -> Vec<StochasticMatrix> {
    vec![
        stochastic(&[&[0.3, 0.5, 1.0, 0.2], &[0.7, 0.5, 0.0, 0.8]]),
        stochastic(&[&[0.4, 0.2, 0.5, 0.7], &[0.6, 0.8, 0.5, 0.3]]),
    ]
}

pub fn example1_q() -> DenseMatrix {
    DenseMatrix::from_rows(&[
        [0.12, 0.10, 0.50, 0.14],
        [0.18, 0.40, 0.50, 0.06],
        [0.28, 0.10, 0.00, 0.56],
        [0.42, 0.40, 0.00, 0.24],
    ])
    .unwrap()
}

pub fn example1_initial() -> FactorState {
    FactorState::new(vec![pv(&[0.4, 0.6]), pv(&[0.5, 0.5])]).unwrap()
}

/// Node 1's matrix has a column summing to 0.6, so it is admitted as is.
pub fn example2() -> Vec<StochasticMatrix> {
    let q1 = DenseMatrix::from_rows(&[[0.3, 0.4, 0.4, 0.3], [0.7, 0.6, 0.6, 0.3]]).unwrap();
    vec![
        StochasticMatrix::admit_substochastic(q1, 1e-9).unwrap(),
        stochastic(&[&[0.2, 0.3, 0.3, 0.3], &[0.8, 0.7, 0.7, 0.7]]),
    ]
}

pub fn example3() -> Vec<StochasticMatrix> {
    vec![
        stochastic(&[&[0.3, 0.3, 0.3, 0.3], &[0.7, 0.7, 0.7, 0.7]]),
        stochastic(&[&[0.2, 0.6, 0.1, 0.4], &[0.8, 0.4, 0.9, 0.6]]),
    ]
}

pub fn pv(v: &[f64]) -> ProbabilityVector {
    ProbabilityVector::new(v.to_vec()).unwrap()
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Random column-stochastic matrix; about one entry in five is zero.
pub fn random_stochastic(rng: &mut impl Rng, rows: usize, cols: usize) -> StochasticMatrix {
    let mut data = vec![0.0; rows * cols];
    for c in 0..cols {
        let mut col: Vec<f64> = (0..rows)
            .map(|_| {
                if rng.random_bool(0.2) {
                    0.0
                } else {
                    rng.random::<f64>()
                }
            })
            .collect();
        if col.iter().all(|&v| v == 0.0) {
            col[rng.random_range(0..rows)] = 1.0;
        }
        let total: f64 = col.iter().sum();
        for r in 0..rows {
            data[r * cols + c] = col[r] / total;
        }
    }
    StochasticMatrix::new(DenseMatrix::new(rows, cols, data).unwrap()).unwrap()
}

/// `1ᵀ_cols ⊗ v` for a random distribution `v`.
pub fn random_constant_columns(rng: &mut impl Rng, rows: usize, cols: usize) -> StochasticMatrix {
    let v = random_simplex(rng, rows);
    let data = (0..rows)
        .flat_map(|r| std::iter::repeat(v.as_slice()[r]).take(cols))
        .collect();
    StochasticMatrix::new(DenseMatrix::new(rows, cols, data).unwrap()).unwrap()
}

pub fn random_lifted(rng: &mut impl Rng, alphabets: &[usize]) -> Vec<StochasticMatrix> {
    let k = alphabets.iter().product();
    alphabets
        .iter()
        .map(|&a| random_stochastic(rng, a, k))
        .collect()
}

/// Lifted matrices where all nodes but one (chosen at random) have identical
/// columns.
pub fn random_structured(rng: &mut impl Rng, alphabets: &[usize]) -> Vec<StochasticMatrix> {
    let k = alphabets.iter().product();
    let free = rng.random_range(0..alphabets.len());
    alphabets
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            if i == free {
                random_stochastic(rng, a, k)
            } else {
                random_constant_columns(rng, a, k)
            }
        })
        .collect()
}

pub fn random_simplex(rng: &mut impl Rng, k: usize) -> ProbabilityVector {
    let raw: Vec<f64> = (0..k)
        .map(|_| -rng.random::<f64>().max(1e-300).ln())
        .collect();
    let total: f64 = raw.iter().sum();
    ProbabilityVector::new(raw.into_iter().map(|v| v / total).collect()).unwrap()
}

pub fn random_factors(rng: &mut impl Rng, alphabets: &[usize]) -> FactorState {
    FactorState::new(alphabets.iter().map(|&a| random_simplex(rng, a)).collect()).unwrap()
}

pub fn random_alphabets(rng: &mut impl Rng, max_nodes: usize, max_alphabet: usize) -> Vec<usize> {
    let n = rng.random_range(1..=max_nodes);
    (0..n).map(|_| rng.random_range(1..=max_alphabet)).collect()
}

/// Random ascending neighbour set of size 0..=n.
pub fn random_neighbors(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    (1..=n).filter(|_| rng.random_bool(0.5)).collect()
}

/// A random network with local rules (not pre-lifted).
pub fn random_network(
    rng: &mut impl Rng,
    alphabets: &[usize],
    deterministic: bool,
) -> (Vec<NodeDescription>, NetworkModel) {
    let n = alphabets.len();
    let description: Vec<NodeDescription> = alphabets
        .iter()
        .map(|&a| {
            let neighbors = random_neighbors(rng, n);
            let cols: usize = neighbors.iter().map(|&j| alphabets[j - 1]).product();
            let rule = if deterministic {
                RuleDescription::Table((0..cols).map(|_| rng.random_range(1..=a)).collect())
            } else {
                let m = random_stochastic(rng, a, cols);
                RuleDescription::Matrix {
                    rows: (0..a).map(|r| m.matrix().row(r).to_vec()).collect(),
                    lifted: false,
                }
            };
            NodeDescription {
                alphabet: a,
                neighbors,
                rule,
            }
        })
        .collect();
    let model = NetworkModel::from_rule_tables(&description, false).unwrap();
    (description, model)
}

/// Digits of a 0-based mixed-radix index, first node most significant, as
/// 0-based values.
pub fn digits(mut index: usize, alphabets: &[usize]) -> Vec<usize> {
    let mut out = vec![0; alphabets.len()];
    for i in (0..alphabets.len()).rev() {
        out[i] = index % alphabets[i];
        index /= alphabets[i];
    }
    out
}

/// Next global state (0-based) by evaluating every node's truth table on its
/// neighbours' current values.
pub fn truth_table_step(
    description: &[NodeDescription],
    alphabets: &[usize],
    state: usize,
) -> usize {
    let x = digits(state, alphabets);
    let mut next = 0;
    for d in description {
        let RuleDescription::Table(table) = &d.rule else {
            panic!("truth tables only")
        };
        let mut column = 0;
        for &j in &d.neighbors {
            column = column * alphabets[j - 1] + x[j - 1];
        }
        next = next * d.alphabet + (table[column] - 1);
    }
    next
}

/// `H = ⋉_i (I_{k^{i−1}} ⊗ Q̂_i)` built densely (small cases only).
pub fn materialized_h(lifted: &[StochasticMatrix]) -> DenseMatrix {
    let k = lifted[0].cols();
    let mut h = lifted[0].matrix().clone();
    let mut eye = 1;
    for q in &lifted[1..] {
        eye *= k;
        let factor = kron(&DenseMatrix::identity(eye).unwrap(), q.matrix()).unwrap();
        h = stp(&h, &factor).unwrap();
    }
    h
}

/// `R_k^{n−1}` as an STP power (the identity when `n = 1`).
pub fn materialized_reduce_power(k: usize, n: usize) -> DenseMatrix {
    let r = lds_core::algebra::power_reduce_matrix(k)
        .unwrap()
        .to_dense();
    let mut acc = DenseMatrix::identity(k).unwrap();
    for _ in 1..n {
        acc = stp(&acc, &r).unwrap();
    }
    acc
}

pub fn kron_power(p: &[f64], n: usize) -> Vec<f64> {
    let mut acc = vec![1.0];
    for _ in 0..n {
        acc = acc
            .iter()
            .flat_map(|a| p.iter().map(move |b| a * b))
            .collect();
    }
    acc
}
