use std::fmt;

use crate::algebra::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::limits::{check_dim, HARD_DRIFT_LIMIT, STOCHASTIC_TOLERANCE};

/// One reason a matrix is not column-stochastic. Positions are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub enum StochasticViolation {
    Negative {
        row: usize,
        column: usize,
        value: f64,
    },
    ColumnSum {
        column: usize,
        sum: f64,
    },
}

impl fmt::Display for StochasticViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StochasticViolation::Negative { row, column, value } => {
                write!(f, "column {column} row {row} is negative ({value})")
            }
            StochasticViolation::ColumnSum { column, sum } => {
                write!(f, "column {column} sums to {}", tidy(*sum))
            }
        }
    }
}

impl From<StochasticViolation> for Error {
    fn from(v: StochasticViolation) -> Self {
        match v {
            StochasticViolation::Negative { row, column, value } => {
                Error::NegativeEntry { row, column, value }
            }
            StochasticViolation::ColumnSum { column, sum } => Error::ColumnSum { column, sum },
        }
    }
}

// Strips float noise such as 0.6000000000000001 from reported sums.
fn tidy(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

/// Verdict of [`validate_stochastic`]: accepted iff there are no violations.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StochasticReport {
    pub violations: Vec<StochasticViolation>,
}

impl StochasticReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_negative(&self) -> bool {
        self.violations
            .iter()
            .any(|v| matches!(v, StochasticViolation::Negative { .. }))
    }
}

/// Checks membership in the set of column-stochastic matrices: every entry
/// `≥ -eps` and every column sum within `eps` of 1. All offenders are listed.
pub fn validate_stochastic(m: &DenseMatrix, eps: f64) -> StochasticReport {
    let mut violations = Vec::new();
    for c in 0..m.cols() {
        let mut sum = 0.0;
        for r in 0..m.rows() {
            let v = m.get(r, c);
            if v < -eps {
                violations.push(StochasticViolation::Negative {
                    row: r + 1,
                    column: c + 1,
                    value: v,
                });
            }
            sum += v;
        }
        if (sum - 1.0).abs() > eps {
            violations.push(StochasticViolation::ColumnSum { column: c + 1, sum });
        }
    }
    StochasticReport { violations }
}

/// A dense column-stochastic matrix.
///
/// Entries in `(-ε, 0)` are clamped to zero on construction. A matrix admitted
/// through [`StochasticMatrix::admit_substochastic`] skips the column-sum
/// check and stays flagged so downstream verdicts can say so.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    matrix: DenseMatrix,
    tolerance: f64,
    substochastic: bool,
}

impl StochasticMatrix {
    pub fn new(matrix: DenseMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, STOCHASTIC_TOLERANCE)
    }

    pub fn with_tolerance(matrix: DenseMatrix, tolerance: f64) -> Result<Self> {
        let report = validate_stochastic(&matrix, tolerance);
        if let Some(v) = report.violations.into_iter().next() {
            return Err(v.into());
        }
        Ok(StochasticMatrix {
            matrix: clamp_negatives(matrix),
            tolerance,
            substochastic: false,
        })
    }

    /// Admits a nonnegative matrix whose columns need not sum to one.
    /// Negative entries are still rejected.
    pub fn admit_substochastic(matrix: DenseMatrix, tolerance: f64) -> Result<Self> {
        let report = validate_stochastic(&matrix, tolerance);
        if let Some(v) = report
            .violations
            .iter()
            .find(|v| matches!(v, StochasticViolation::Negative { .. }))
        {
            return Err(v.clone().into());
        }
        Ok(StochasticMatrix {
            matrix: clamp_negatives(matrix),
            tolerance,
            substochastic: !report.is_ok(),
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Self::new(DenseMatrix::from_rows(rows)?)
    }

    pub(crate) fn from_parts(matrix: DenseMatrix, tolerance: f64, substochastic: bool) -> Self {
        StochasticMatrix {
            matrix,
            tolerance,
            substochastic,
        }
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.matrix
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// True when admitted with columns that do not sum to one.
    pub fn is_substochastic(&self) -> bool {
        self.substochastic
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.matrix.get(row, col)
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        self.matrix.column(col)
    }

    pub fn apply(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.matrix.matvec(p)
    }

    /// True when all columns agree entrywise within `tol`, i.e. the matrix is
    /// `1ᵀ ⊗ v` for its first column `v`.
    pub fn has_identical_columns(&self, tol: f64) -> bool {
        let m = &self.matrix;
        (0..m.rows()).all(|r| {
            let first = m.get(r, 0);
            m.row(r).iter().all(|v| (v - first).abs() <= tol)
        })
    }
}

fn clamp_negatives(matrix: DenseMatrix) -> DenseMatrix {
    if matrix.as_slice().iter().all(|&v| v >= 0.0) {
        return matrix;
    }
    let (rows, cols) = matrix.shape();
    let data = matrix.as_slice().iter().map(|&v| v.max(0.0)).collect();
    DenseMatrix::from_parts(rows, cols, data)
}

/// A point of the probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    entries: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(entries, STOCHASTIC_TOLERANCE)
    }

    pub fn with_tolerance(mut entries: Vec<f64>, eps: f64) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::NotDistribution("empty vector".into()));
        }
        check_dim("probability vector", &[entries.len()])?;
        if let Some(i) = entries.iter().position(|v| !v.is_finite() || *v < -eps) {
            return Err(Error::NotDistribution(format!(
                "entry {} is {}",
                i + 1,
                entries[i]
            )));
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > eps {
            return Err(Error::NotDistribution(format!("entries sum to {sum}")));
        }
        for v in &mut entries {
            *v = v.max(0.0);
        }
        Ok(ProbabilityVector { entries })
    }

    /// `δ_k^r`, with 1-based `r`.
    pub fn point_mass(k: usize, r: usize) -> Result<Self> {
        if r == 0 || r > k {
            return Err(Error::OutOfRange {
                value: r,
                min: 1,
                max: k,
            });
        }
        check_dim("probability vector", &[k])?;
        let mut entries = vec![0.0; k];
        entries[r - 1] = 1.0;
        Ok(ProbabilityVector { entries })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::NotDistribution("empty vector".into()));
        }
        check_dim("probability vector", &[k])?;
        Ok(ProbabilityVector {
            entries: vec![1.0 / k as f64; k],
        })
    }

    /// Accepts the output of a stochastic step. Drift from the simplex up to
    /// the stochastic tolerance is rescaled away silently; larger drift is
    /// renormalized with the flag set and a warning logged; drift beyond the
    /// hard limit is an error.
    ///
    /// The silent rescale matters for the independence model, where a sum
    /// error in the factors is multiplied by about `n` every step.
    pub(crate) fn from_step(mut entries: Vec<f64>) -> Result<(Self, bool)> {
        let sum: f64 = entries.iter().sum();
        let most_negative = entries.iter().copied().fold(0.0, f64::min);
        let drift = (sum - 1.0).abs().max(-most_negative);
        if !drift.is_finite() || drift > HARD_DRIFT_LIMIT {
            return Err(Error::Drift {
                drift,
                limit: HARD_DRIFT_LIMIT,
            });
        }
        if drift <= STOCHASTIC_TOLERANCE {
            if sum != 1.0 && sum > 0.0 {
                entries.iter_mut().for_each(|v| *v /= sum);
            }
            return Ok((ProbabilityVector { entries }, false));
        }
        log::warn!("renormalizing distribution that drifted {drift:e} off the simplex");
        let clamped: Vec<f64> = entries.into_iter().map(|v| v.max(0.0)).collect();
        let total: f64 = clamped.iter().sum();
        let entries = clamped.into_iter().map(|v| v / total).collect();
        Ok((ProbabilityVector { entries }, true))
    }

    /// Wraps entries already known to lie on the simplex.
    pub(crate) fn from_parts(entries: Vec<f64>) -> Self {
        ProbabilityVector { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.entries
    }

    /// Kronecker product `self ⋉ other` (for column vectors the STP is the
    /// Kronecker product).
    pub fn kron(&self, other: &ProbabilityVector) -> Result<ProbabilityVector> {
        check_dim("probability vector", &[self.dim(), other.dim()])?;
        let entries = self
            .entries
            .iter()
            .flat_map(|a| other.entries.iter().map(move |b| a * b))
            .collect();
        Ok(ProbabilityVector { entries })
    }

    /// `⋉_i factors[i]`.
    pub fn kron_all(factors: &[ProbabilityVector]) -> Result<ProbabilityVector> {
        let dims: Vec<usize> = factors.iter().map(|f| f.dim()).collect();
        check_dim("probability vector", &dims)?;
        let mut out = ProbabilityVector { entries: vec![1.0] };
        for f in factors {
            out = out.kron(f)?;
        }
        Ok(out)
    }

    pub fn linf_distance(&self, other: &ProbabilityVector) -> f64 {
        linf(&self.entries, &other.entries)
    }

    pub fn l1_distance(&self, other: &ProbabilityVector) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }
}

pub(crate) fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1_q1() -> DenseMatrix {
        DenseMatrix::from_rows(&[[0.3, 0.5, 1.0, 0.2], [0.7, 0.5, 0.0, 0.8]]).unwrap()
    }

    #[test]
    fn accepts_example_matrix_and_identity() {
        assert!(validate_stochastic(&example1_q1(), 1e-9).is_ok());
        assert!(validate_stochastic(&DenseMatrix::identity(3).unwrap(), 1e-9).is_ok());
    }

    #[test]
    fn reports_column_that_does_not_sum_to_one() {
        let m = DenseMatrix::from_rows(&[[0.3, 0.4, 0.4, 0.3], [0.7, 0.6, 0.6, 0.3]]).unwrap();
        let report = validate_stochastic(&m, 1e-9);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].to_string(), "column 4 sums to 0.6");
        assert!(StochasticMatrix::new(m.clone()).is_err());
        let admitted = StochasticMatrix::admit_substochastic(m, 1e-9).unwrap();
        assert!(admitted.is_substochastic());
    }

    #[test]
    fn clamps_tiny_negatives_and_rejects_large_ones() {
        let m = DenseMatrix::from_rows(&[[1.0 + 1e-12, 0.5], [-1e-12, 0.5]]).unwrap();
        let s = StochasticMatrix::new(m).unwrap();
        assert_eq!(s.get(1, 0), 0.0);
        let bad = DenseMatrix::from_rows(&[[1.1, 0.5], [-0.1, 0.5]]).unwrap();
        assert!(matches!(
            StochasticMatrix::new(bad.clone()),
            Err(Error::NegativeEntry {
                row: 2,
                column: 1,
                ..
            })
        ));
        assert!(StochasticMatrix::admit_substochastic(bad, 1e-9).is_err());
    }

    #[test]
    fn probability_vector_validation() {
        assert!(ProbabilityVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityVector::new(vec![1.5, -0.5]).is_err());
        assert!(ProbabilityVector::new(vec![]).is_err());
        let p = ProbabilityVector::new(vec![0.4, 0.6]).unwrap();
        let q = ProbabilityVector::new(vec![0.5, 0.5]).unwrap();
        let pq = p.kron(&q).unwrap();
        assert_eq!(pq.as_slice(), &[0.2, 0.2, 0.3, 0.3]);
        assert!(ProbabilityVector::point_mass(3, 4).is_err());
    }

    #[test]
    fn step_outputs_are_flagged_only_past_tolerance() {
        let (p, flagged) = ProbabilityVector::from_step(vec![0.5, 0.5 + 1e-12]).unwrap();
        assert!(!flagged);
        assert!((p.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let (p, flagged) = ProbabilityVector::from_step(vec![0.5, 0.5 + 1e-8]).unwrap();
        assert!(flagged);
        assert!((p.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(ProbabilityVector::from_step(vec![0.5, 0.51]).is_err());
    }

    #[test]
    fn identical_column_detection() {
        let c = StochasticMatrix::from_rows(&[[0.3, 0.3, 0.3], [0.7, 0.7, 0.7]]).unwrap();
        assert!(c.has_identical_columns(1e-12));
        assert!(!StochasticMatrix::new(example1_q1())
            .unwrap()
            .has_identical_columns(1e-12));
    }
}
