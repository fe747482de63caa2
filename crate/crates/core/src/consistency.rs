//! When do the independence and conditional-independence models agree?
//!
//! With `H = ⋉_{i=1}^n (I_{k^{i−1}} ⊗ Q̂_i)` the two one-step maps are
//!
//! * `H ⋉ R_k^{n−1} p = (Q̂_1 * … * Q̂_n) p`, the conditional model (linear in `p`);
//! * `H ⋉ pⁿ = (Q̂_1 p) ⋉ … ⋉ (Q̂_n p)`, the independence model (degree `n`),
//!
//! and the models coincide exactly when the two agree on the whole simplex.
//! `H` has `kⁿ` columns and is never built: both sides are evaluated through
//! the factored forms on the right.
//!
//! Three checkers are layered by cost and strength:
//!
//! * [`check_structural_sufficient`]: at least `n − 1` lifted matrices have
//!   identical columns. Sufficient, not necessary.
//! * [`check_consistency_exact`]: compares the symmetrized coefficient tensors
//!   of the two sides as homogeneous degree-`n` polynomials. Complete, but
//!   limited to `kⁿ ≤ 10⁶`.
//! * [`check_consistency_sampled`]: evaluates both sides on vertices, edge
//!   midpoints and uniform random simplex points. Always available; a pass is
//!   reported as "consistent at samples".

use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::algebra::{khatri_rao, linf, DenseMatrix, ProbabilityVector, StochasticMatrix};
use crate::error::{Error, Result};
use crate::limits::{check_dim, dimension_cap};
use crate::model::GlobalSystem;

/// Default cap on `kⁿ` for the exact checker.
pub const EXACT_CHECK_CAP: u128 = 1_000_000;

/// Default tolerance for the exact and sampled checkers.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-9;

/// Default tolerance for identical-column detection.
pub const STRUCTURAL_TOLERANCE: f64 = 1e-12;

/// Edge midpoints are added to the sample set up to this many states.
const MIDPOINT_LIMIT: usize = 32;

/// The operator `H`, held as its lifted factors.
#[derive(Debug)]
pub struct HOperator {
    lifted: Vec<StochasticMatrix>,
    alphabets: Vec<usize>,
    k: usize,
    reduced: OnceLock<DenseMatrix>,
}

impl HOperator {
    pub fn new(lifted: Vec<StochasticMatrix>) -> Result<Self> {
        if lifted.is_empty() {
            return Err(Error::Domain("H needs at least one lifted matrix".into()));
        }
        let alphabets: Vec<usize> = lifted.iter().map(StochasticMatrix::rows).collect();
        let k = check_dim("state space", &alphabets)?;
        if let Some(i) = lifted.iter().position(|q| q.cols() != k) {
            return Err(Error::shape(
                "HOperator::new",
                format!(
                    "lifted matrix {} has {} columns, expected {k}",
                    i + 1,
                    lifted[i].cols()
                ),
            ));
        }
        Ok(HOperator {
            lifted,
            alphabets,
            k,
            reduced: OnceLock::new(),
        })
    }

    pub fn from_system(system: &GlobalSystem) -> Result<Self> {
        match system {
            GlobalSystem::Stochastic { lifted, .. } => Self::new(lifted.clone()),
            GlobalSystem::Deterministic { .. } => Err(Error::Mode(
                "consistency is a property of stochastic models".into(),
            )),
        }
    }

    pub fn lifted(&self) -> &[StochasticMatrix] {
        &self.lifted
    }

    pub fn alphabets(&self) -> &[usize] {
        &self.alphabets
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.lifted.len()
    }

    /// True when some factor was admitted without summing to one.
    pub fn is_substochastic(&self) -> bool {
        self.lifted.iter().any(StochasticMatrix::is_substochastic)
    }

    /// `Q̂_1 * … * Q̂_n = H R_k^{n−1}`, built once if `k²` fits under the
    /// dimension cap.
    pub fn reduced_matrix(&self) -> Option<&DenseMatrix> {
        if let Some(m) = self.reduced.get() {
            return Some(m);
        }
        if (self.k as u128) * (self.k as u128) > dimension_cap() as u128 {
            return None;
        }
        let mut acc = DenseMatrix::ones_row(self.k).ok()?;
        for q in &self.lifted {
            acc = khatri_rao(&acc, q.matrix()).ok()?;
        }
        let _ = self.reduced.set(acc);
        self.reduced.get()
    }

    fn check_dim(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.k {
            return Err(Error::shape(
                "HOperator",
                format!(
                    "{}-vector applied to an operator on {} states",
                    p.len(),
                    self.k
                ),
            ));
        }
        Ok(())
    }

    /// `⋉_i (Q̂_i p) = H pⁿ`, skipping zero entries of `p`.
    pub fn apply_power(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(p)?;
        let support = support(p);
        let mut out = vec![1.0];
        for q in &self.lifted {
            let factor = sparse_apply(q.matrix(), &support);
            out = kron_vec(&out, &factor);
        }
        Ok(out)
    }

    /// `(Q̂_1 * … * Q̂_n) p = H R_k^{n−1} p`.
    pub fn apply_reduced(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(p)?;
        let support = support(p);
        if let Some(kr) = self.reduced_matrix() {
            return Ok(sparse_apply(kr, &support));
        }
        // k² too large to cache: accumulate the Kronecker columns directly.
        let mut out = vec![0.0; self.k];
        for &(c, w) in &support {
            let col = self.reduced_column(c);
            for (o, v) in out.iter_mut().zip(col) {
                *o += w * v;
            }
        }
        Ok(out)
    }

    /// `Col_c(Q̂_1 * … * Q̂_n) = ⋉_i Col_c(Q̂_i)` (zero-based `c`).
    fn reduced_column(&self, c: usize) -> Vec<f64> {
        self.lifted
            .iter()
            .fold(vec![1.0], |acc, q| kron_vec(&acc, &q.column(c)))
    }

    /// The `k × k` matrix `H ⋉ p^{n−1}`, whose column `r` is
    /// `(Q̂_1 p) ⋉ … ⋉ (Q̂_{n−1} p) ⋉ Col_r(Q̂_n)`.
    pub fn partial_power_matrix(&self, p: &[f64]) -> Result<DenseMatrix> {
        self.check_dim(p)?;
        if self.n() < 2 {
            return Err(Error::Domain("H ⋉ p^(n-1) needs at least two nodes".into()));
        }
        check_dim("H ⋉ p^(n-1)", &[self.k, self.k])?;
        let support = support(p);
        let (last, head) = self.lifted.split_last().expect("n >= 2");
        let prefix = head.iter().fold(vec![1.0], |acc, q| {
            kron_vec(&acc, &sparse_apply(q.matrix(), &support))
        });
        let kn = last.rows();
        let mut data = vec![0.0; self.k * self.k];
        for (a, &pa) in prefix.iter().enumerate() {
            for b in 0..kn {
                let row = &mut data[(a * kn + b) * self.k..(a * kn + b + 1) * self.k];
                for (o, v) in row.iter_mut().zip(last.matrix().row(b)) {
                    *o = pa * v;
                }
            }
        }
        Ok(DenseMatrix::from_parts(self.k, self.k, data))
    }
}

fn support(p: &[f64]) -> Vec<(usize, f64)> {
    p.iter()
        .copied()
        .enumerate()
        .filter(|&(_, w)| w != 0.0)
        .collect()
}

fn sparse_apply(m: &DenseMatrix, support: &[(usize, f64)]) -> Vec<f64> {
    (0..m.rows())
        .map(|r| {
            let row = m.row(r);
            support.iter().map(|&(c, w)| row[c] * w).sum()
        })
        .collect()
}

fn kron_vec(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// `H pⁿ`, the one-step joint of the independence model from `p`.
pub fn h_apply_power(h: &HOperator, p: &ProbabilityVector) -> Result<ProbabilityVector> {
    Ok(ProbabilityVector::from_parts(h.apply_power(p.as_slice())?))
}

/// `H R_k^{n−1} p`, the one-step joint of the conditional model from `p`.
pub fn h_apply_reduced(h: &HOperator, p: &ProbabilityVector) -> Result<ProbabilityVector> {
    Ok(ProbabilityVector::from_parts(
        h.apply_reduced(p.as_slice())?,
    ))
}

/// `‖H pⁿ − H R_k^{n−1} p‖∞`.
pub fn point_consistency(h: &HOperator, p: &ProbabilityVector) -> Result<f64> {
    Ok(linf(
        &h.apply_power(p.as_slice())?,
        &h.apply_reduced(p.as_slice())?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConsistencyStatus {
    Consistent,
    Inconsistent,
    /// No disagreement found on the evaluated points; not a proof.
    ConsistentAtSamples,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Structural,
    Exact,
    Sampled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyVerdict {
    pub status: ConsistencyStatus,
    pub method: Method,
    /// Worst point found; always present for inconsistent verdicts.
    pub witness: Option<ProbabilityVector>,
    /// `‖H pⁿ − H R_k^{n−1} p‖∞` at the witness (sampled and exact), or the
    /// largest coefficient mismatch when no witness was needed.
    pub residual: f64,
    /// Points (or coefficient groups, for the exact method) evaluated.
    pub samples: usize,
    pub tolerance: f64,
    /// Some lifted matrix was admitted without summing to one.
    pub non_stochastic_input: bool,
}

impl ConsistencyVerdict {
    /// True unless the verdict is `Inconsistent`.
    pub fn agrees(&self) -> bool {
        self.status != ConsistencyStatus::Inconsistent
    }
}

/// The `index`-th evaluation point: the `k` vertices first, then (for
/// `k ≤ 32`) all edge midpoints, then flat-Dirichlet draws, each from its own
/// `(seed, index)` stream.
fn sample_point(k: usize, index: usize, seed: u64) -> Vec<f64> {
    let mut p = vec![0.0; k];
    if index < k {
        p[index] = 1.0;
        return p;
    }
    let midpoints = if k <= MIDPOINT_LIMIT {
        k * (k - 1) / 2
    } else {
        0
    };
    let m = index - k;
    if m < midpoints {
        // unrank the pair (a, b), a < b
        let (mut a, mut rest) = (0, m);
        while rest >= k - 1 - a {
            rest -= k - 1 - a;
            a += 1;
        }
        p[a] = 0.5;
        p[a + 1 + rest] = 0.5;
        return p;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    for v in p.iter_mut() {
        *v = Exp1.sample(&mut rng);
    }
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= total);
    p
}

fn structured_point_count(k: usize) -> usize {
    k + if k <= MIDPOINT_LIMIT {
        k * (k - 1) / 2
    } else {
        0
    }
}

/// Evaluates `f` at `count` sample points in parallel and returns the
/// largest value with its index, ties going to the lowest index.
fn worst_point<F>(k: usize, count: usize, seed: u64, f: F) -> Result<(usize, f64)>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|i| f(&sample_point(k, i, seed)).map(|r| (i, r)))
        .try_reduce(
            || (usize::MAX, f64::NEG_INFINITY),
            |a, b| {
                Ok(if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                    b
                } else {
                    a
                })
            },
        )
}

/// Compares both sides at every vertex, every edge midpoint (`k ≤ 32`) and
/// `num_samples` uniform random points of the simplex.
pub fn check_consistency_sampled(
    h: &HOperator,
    num_samples: usize,
    tol: f64,
    seed: u64,
) -> Result<ConsistencyVerdict> {
    let k = h.k();
    let count = structured_point_count(k) + num_samples;
    let (index, residual) = worst_point(k, count, seed, |p| {
        Ok(linf(&h.apply_power(p)?, &h.apply_reduced(p)?))
    })?;
    let status = if h.n() == 1 {
        ConsistencyStatus::Consistent
    } else if residual <= tol {
        ConsistencyStatus::ConsistentAtSamples
    } else {
        ConsistencyStatus::Inconsistent
    };
    Ok(ConsistencyVerdict {
        status,
        method: Method::Sampled,
        witness: Some(ProbabilityVector::from_parts(sample_point(k, index, seed))),
        residual,
        samples: count,
        tolerance: tol,
        non_stochastic_input: h.is_substochastic(),
    })
}

/// Permanent by Ryser's formula.
fn permanent(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    match n {
        0 => return 1.0,
        1 => return a[0][0],
        2 => return a[0][0] * a[1][1] + a[0][1] * a[1][0],
        _ => {}
    }
    let mut total = 0.0;
    let mut row_sums = vec![0.0; n];
    for subset in 1u64..(1 << n) {
        for (i, s) in row_sums.iter_mut().enumerate() {
            *s = (0..n)
                .filter(|&l| subset >> l & 1 == 1)
                .map(|l| a[i][l])
                .sum();
        }
        let prod: f64 = row_sums.iter().product();
        if (n - subset.count_ones() as usize) % 2 == 0 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    total
}

/// Advances a nondecreasing tuple over `0..k`; false when exhausted.
fn next_multiset(r: &mut [usize], k: usize) -> bool {
    for i in (0..r.len()).rev() {
        if r[i] + 1 < k {
            let v = r[i] + 1;
            r[i..].iter_mut().for_each(|x| *x = v);
            return true;
        }
    }
    false
}

/// Decides consistency as a polynomial identity.
///
/// `H pⁿ` is homogeneous of degree `n` in `p`; `H R_k^{n−1} p` becomes so after
/// multiplying by `(1ᵀp)^{n−1}`, which is 1 on the simplex. Two homogeneous
/// polynomials agree on the simplex iff their symmetrized coefficient tensors
/// agree. For output state `j = (j_1 … j_n)` and multiset `r_1 ≤ … ≤ r_n`
/// those coefficients are
///
/// * `perm[Q̂_i(j_i, r_l)]_{i,l} / n!` for the power side, and
/// * `(1/n) Σ_l ∏_i Q̂_i(j_i, r_l)` for the linear side.
pub fn check_consistency_exact(h: &HOperator, tol: f64) -> Result<ConsistencyVerdict> {
    check_consistency_exact_capped(h, tol, EXACT_CHECK_CAP)
}

pub fn check_consistency_exact_capped(
    h: &HOperator,
    tol: f64,
    cap: u128,
) -> Result<ConsistencyVerdict> {
    let (k, n) = (h.k(), h.n());
    let size = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > cap {
        return Err(Error::ExactCap { size, cap });
    }
    let non_stochastic_input = h.is_substochastic();
    if n == 1 {
        return Ok(ConsistencyVerdict {
            status: ConsistencyStatus::Consistent,
            method: Method::Exact,
            witness: None,
            residual: 0.0,
            samples: 0,
            tolerance: tol,
            non_stochastic_input,
        });
    }

    let outputs: Vec<Vec<usize>> = (0..k)
        .map(|j| {
            let mut rest = j;
            let mut digits = vec![0; n];
            for (d, &a) in digits.iter_mut().zip(h.alphabets()).rev() {
                *d = rest % a;
                rest /= a;
            }
            digits
        })
        .collect();
    let n_factorial: f64 = (1..=n).map(|v| v as f64).product();

    let mut multisets = Vec::new();
    let mut r = vec![0usize; n];
    loop {
        multisets.push(r.clone());
        if !next_multiset(&mut r, k) {
            break;
        }
    }

    let mismatch = |r: &Vec<usize>| -> f64 {
        let mut worst = 0.0f64;
        let mut a = vec![vec![0.0; n]; n];
        for digits in &outputs {
            for (i, q) in h.lifted().iter().enumerate() {
                for (l, &c) in r.iter().enumerate() {
                    a[i][l] = q.get(digits[i], c);
                }
            }
            let power = permanent(&a) / n_factorial;
            let linear = (0..n)
                .map(|l| (0..n).map(|i| a[i][l]).product::<f64>())
                .sum::<f64>()
                / n as f64;
            worst = worst.max((power - linear).abs());
        }
        worst
    };

    let (worst_index, worst) = multisets
        .par_iter()
        .map(mismatch)
        .enumerate()
        .fold(
            || (usize::MAX, 0.0f64),
            |best, (i, d)| if d > best.1 { (i, d) } else { best },
        )
        .reduce(
            || (usize::MAX, 0.0f64),
            |a, b| {
                if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                    b
                } else {
                    a
                }
            },
        );

    if worst <= tol {
        return Ok(ConsistencyVerdict {
            status: ConsistencyStatus::Consistent,
            method: Method::Exact,
            witness: None,
            residual: worst,
            samples: multisets.len(),
            tolerance: tol,
            non_stochastic_input,
        });
    }

    // Locate a point where the sides visibly differ: the barycentre of the
    // offending multiset first, then the sampled point set.
    let mut centre = vec![0.0; k];
    for &c in &multisets[worst_index] {
        centre[c] += 1.0 / n as f64;
    }
    let mut witness = centre.clone();
    let mut residual = linf(&h.apply_power(&centre)?, &h.apply_reduced(&centre)?);
    let (i, r) = worst_point(k, structured_point_count(k) + 256, 0, |p| {
        Ok(linf(&h.apply_power(p)?, &h.apply_reduced(p)?))
    })?;
    if r > residual {
        residual = r;
        witness = sample_point(k, i, 0);
    }
    Ok(ConsistencyVerdict {
        status: ConsistencyStatus::Inconsistent,
        method: Method::Exact,
        witness: Some(ProbabilityVector::from_parts(witness)),
        residual,
        samples: multisets.len(),
        tolerance: tol,
        non_stochastic_input,
    })
}

/// Whether `H R_k^{n−1} = H ⋉ p^{n−1}` held at every sampled `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorollaryVerdict {
    pub holds: bool,
    /// Largest entrywise difference over all samples.
    pub residual: f64,
    pub witness: Option<ProbabilityVector>,
    pub samples: usize,
    pub tolerance: f64,
    pub non_stochastic_input: bool,
}

/// `max |H R_k^{n−1} − H ⋉ p^{n−1}|` entrywise at one point.
pub fn corollary_residual(h: &HOperator, p: &ProbabilityVector) -> Result<f64> {
    let reduced = h.reduced_matrix().ok_or_else(|| Error::DimensionCap {
        what: "Q̂_1 * … * Q̂_n",
        requested: (h.k() as u128) * (h.k() as u128),
        cap: dimension_cap(),
    })?;
    let partial = h.partial_power_matrix(p.as_slice())?;
    Ok(reduced.max_abs_diff(&partial).expect("both are k x k"))
}

/// Checks the matrix identity `H R_k^{n−1} = H ⋉ p^{n−1}` on the same point
/// set as [`check_consistency_sampled`]. Holding everywhere is sufficient for
/// consistency; failing says nothing either way.
pub fn check_corollary_matrix(
    h: &HOperator,
    num_samples: usize,
    tol: f64,
    seed: u64,
) -> Result<CorollaryVerdict> {
    if h.n() < 2 {
        return Err(Error::Domain(
            "the matrix condition needs at least two nodes".into(),
        ));
    }
    check_dim("H ⋉ p^(n-1)", &[h.k(), h.k()])?;
    let k = h.k();
    let count = structured_point_count(k) + num_samples;
    let (index, residual) = worst_point(k, count, seed, |p| {
        corollary_residual(h, &ProbabilityVector::from_parts(p.to_vec()))
    })?;
    Ok(CorollaryVerdict {
        holds: residual <= tol,
        residual,
        witness: Some(ProbabilityVector::from_parts(sample_point(k, index, seed))),
        samples: count,
        tolerance: tol,
        non_stochastic_input: h.is_substochastic(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructuralVerdict {
    /// At least `n − 1` lifted matrices have identical columns.
    pub sufficient: bool,
    /// 1-based ids of the nodes whose lifted matrix has identical columns.
    pub constant_column_nodes: Vec<usize>,
    pub tolerance: f64,
}

impl StructuralVerdict {
    pub fn to_verdict(&self, h: &HOperator) -> Option<ConsistencyVerdict> {
        self.sufficient.then(|| ConsistencyVerdict {
            status: ConsistencyStatus::Consistent,
            method: Method::Structural,
            witness: None,
            residual: 0.0,
            samples: 0,
            tolerance: self.tolerance,
            non_stochastic_input: h.is_substochastic(),
        })
    }
}

/// Sufficient condition: all but at most one `Q̂_i` equal `1ᵀ_k ⊗ v_i`.
pub fn check_structural_sufficient(lifted: &[StochasticMatrix], tol: f64) -> StructuralVerdict {
    let constant_column_nodes: Vec<usize> = lifted
        .iter()
        .enumerate()
        .filter(|(_, q)| q.has_identical_columns(tol))
        .map(|(i, _)| i + 1)
        .collect();
    StructuralVerdict {
        sufficient: constant_column_nodes.len() + 1 >= lifted.len(),
        constant_column_nodes,
        tolerance: tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> StochasticMatrix {
        StochasticMatrix::from_rows(rows).unwrap()
    }

    fn example1() -> HOperator {
        HOperator::new(vec![
            m(&[&[0.3, 0.5, 1.0, 0.2], &[0.7, 0.5, 0.0, 0.8]]),
            m(&[&[0.4, 0.2, 0.5, 0.7], &[0.6, 0.8, 0.5, 0.3]]),
        ])
        .unwrap()
    }

    fn example3() -> HOperator {
        HOperator::new(vec![
            m(&[&[0.3, 0.3, 0.3, 0.3], &[0.7, 0.7, 0.7, 0.7]]),
            m(&[&[0.2, 0.6, 0.1, 0.4], &[0.8, 0.4, 0.9, 0.6]]),
        ])
        .unwrap()
    }

    fn pv(v: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn both_applications_on_example1() {
        let h = example1();
        let p0 = pv(&[0.2, 0.2, 0.3, 0.3]);
        let power = h_apply_power(&h, &p0).unwrap();
        let reduced = h_apply_reduced(&h, &p0).unwrap();
        assert!(linf(power.as_slice(), &[0.2496, 0.2704, 0.2304, 0.2496]) < 1e-12);
        assert!(linf(reduced.as_slice(), &[0.236, 0.284, 0.244, 0.236]) < 1e-12);
        assert!((point_consistency(&h, &p0).unwrap() - 0.0136).abs() < 1e-12);
    }

    #[test]
    fn single_node_both_sides_are_plain_products() {
        let q = m(&[&[0.1, 0.7, 0.2], &[0.9, 0.3, 0.8]]);
        let h = HOperator::new(vec![q.clone()]).unwrap_err();
        // one node with two values cannot have three global states
        assert!(matches!(h, Error::Shape { .. }));

        let q = m(&[&[0.1, 0.7], &[0.9, 0.3]]);
        let h = HOperator::new(vec![q.clone()]).unwrap();
        let p = pv(&[0.25, 0.75]);
        let expected = q.apply(p.as_slice()).unwrap();
        assert_eq!(h.apply_power(p.as_slice()).unwrap(), expected);
        assert!(linf(&h.apply_reduced(p.as_slice()).unwrap(), &expected) < 1e-15);
        let v = check_consistency_sampled(&h, 10, 1e-9, 0).unwrap();
        assert_eq!(v.status, ConsistencyStatus::Consistent);
        assert!(check_structural_sufficient(h.lifted(), 1e-12).sufficient);
        assert!(check_corollary_matrix(&h, 10, 1e-9, 0).is_err());
    }

    #[test]
    fn vertices_agree() {
        let h = example1();
        for r in 1..=4 {
            let p = ProbabilityVector::point_mass(4, r).unwrap();
            assert!(point_consistency(&h, &p).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn sampled_checker_on_examples() {
        let v = check_consistency_sampled(&example3(), 1000, 1e-9, 1).unwrap();
        assert_eq!(v.status, ConsistencyStatus::ConsistentAtSamples);
        assert!(v.residual <= 1e-12);
        assert_eq!(v.samples, 4 + 6 + 1000);

        let v = check_consistency_sampled(&example1(), 200, 1e-9, 1).unwrap();
        assert_eq!(v.status, ConsistencyStatus::Inconsistent);
        assert!(v.residual >= 1e-3);
        let w = v.witness.unwrap();
        assert_eq!(point_consistency(&example1(), &w).unwrap(), v.residual);
    }

    #[test]
    fn exact_checker_on_examples() {
        assert_eq!(
            check_consistency_exact(&example3(), 1e-9).unwrap().status,
            ConsistencyStatus::Consistent
        );
        let v = check_consistency_exact(&example1(), 1e-9).unwrap();
        assert_eq!(v.status, ConsistencyStatus::Inconsistent);
        assert!(v.residual > 1e-9);
        let rank_one =
            HOperator::new(vec![m(&[&[0.5; 4], &[0.5; 4]]), m(&[&[0.1; 4], &[0.9; 4]])]).unwrap();
        assert!(check_consistency_exact(&rank_one, 1e-9).unwrap().agrees());
    }

    #[test]
    fn exact_checker_respects_cap() {
        let err = check_consistency_exact_capped(&example1(), 1e-9, 15).unwrap_err();
        assert!(matches!(err, Error::ExactCap { size: 16, cap: 15 }));
    }

    #[test]
    fn structural_checker_on_examples() {
        let v = check_structural_sufficient(example3().lifted(), 1e-12);
        assert!(v.sufficient);
        assert_eq!(v.constant_column_nodes, vec![1]);
        let v = check_structural_sufficient(example1().lifted(), 1e-12);
        assert!(!v.sufficient);
        assert!(v.constant_column_nodes.is_empty());
    }

    #[test]
    fn corollary_holds_for_constant_column_factor() {
        let v = check_corollary_matrix(&example3(), 100, 1e-12, 3).unwrap();
        assert!(v.holds, "residual {}", v.residual);
        let v = check_corollary_matrix(&example1(), 100, 1e-9, 3).unwrap();
        assert!(!v.holds);
    }

    #[test]
    fn permanent_matches_expansion() {
        let a = vec![
            vec![1.0, 2.0, 3.0],
            vec![4.0, 5.0, 6.0],
            vec![7.0, 8.0, 9.0],
        ];
        // sum over all 6 permutations of products
        let expected = 1.0 * 5.0 * 9.0
            + 1.0 * 6.0 * 8.0
            + 2.0 * 4.0 * 9.0
            + 2.0 * 6.0 * 7.0
            + 3.0 * 4.0 * 8.0
            + 3.0 * 5.0 * 7.0;
        assert!((permanent(&a) - expected).abs() < 1e-9);
    }

    #[test]
    fn multisets_are_enumerated_once() {
        let mut r = vec![0, 0, 0];
        let mut count = 1;
        while next_multiset(&mut r, 4) {
            assert!(r.windows(2).all(|w| w[0] <= w[1]));
            count += 1;
        }
        // C(4 + 3 - 1, 3)
        assert_eq!(count, 20);
    }

    #[test]
    fn sample_points_lie_on_the_simplex() {
        let k = 5;
        let mut midpoints = std::collections::HashSet::new();
        for i in 0..structured_point_count(k) + 20 {
            let p = sample_point(k, i, 9);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|&v| v >= 0.0));
            if (k..structured_point_count(k)).contains(&i) {
                let support: Vec<usize> = (0..k).filter(|&c| p[c] > 0.0).collect();
                assert_eq!(support.len(), 2);
                midpoints.insert(support);
            }
        }
        assert_eq!(midpoints.len(), 10);
        assert_eq!(sample_point(k, 30, 9), sample_point(k, 30, 9));
    }
}
