//! Structured linear algebra for logical systems.
//!
//! The semi-tensor product (STP) `A ⋉ B = (A ⊗ I_{l/n})(B ⊗ I_{l/p})`, with
//! `l = lcm(n, p)`, multiplies matrices of any shapes and reduces to the
//! ordinary product when `n = p`. Logical matrices (one 1 per column) are
//! closed under STP, Kronecker and Khatri-Rao products, so those operations
//! also have index-arithmetic versions that never expand to dense form.

mod dense;
mod logical;
mod probability;

pub use dense::DenseMatrix;
pub use logical::LogicalMatrix;
pub use probability::{
    validate_stochastic, ProbabilityVector, StochasticMatrix, StochasticReport, StochasticViolation,
};

pub(crate) use probability::linf;

use crate::error::{Error, Result};
use crate::limits::check_dim;

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: usize, b: usize) -> Result<usize> {
    let l = (a / gcd(a, b)) as u128 * b as u128;
    usize::try_from(l).map_err(|_| Error::DimensionCap {
        what: "lcm",
        requested: l,
        cap: crate::limits::dimension_cap(),
    })
}

/// Left semi-tensor product `A ⋉ B`.
pub fn stp(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    let (m, n) = a.shape();
    let (p, q) = b.shape();
    let l = lcm(n, p)?;
    let (ea, eb) = (l / n, l / p);
    let rows = check_dim("stp", &[m, ea])?;
    let cols = check_dim("stp", &[q, eb])?;
    check_dim("stp", &[rows, cols])?;

    // (A ⊗ I_ea) has A[i,j] at (i·ea+u, j·ea+u); (B ⊗ I_eb) has B[g,h] at
    // (g·eb+w, h·eb+w). Summing over the shared index c = j·ea+u only pairs
    // entries with c = g·eb+w.
    let mut out = vec![0.0; rows * cols];
    for j in 0..n {
        for u in 0..ea {
            let c = j * ea + u;
            let (g, w) = (c / eb, c % eb);
            let b_row = b.row(g);
            for i in 0..m {
                let aij = a.get(i, j);
                if aij == 0.0 {
                    continue;
                }
                let out_row = &mut out[(i * ea + u) * cols..(i * ea + u + 1) * cols];
                for (h, bgh) in b_row.iter().enumerate() {
                    out_row[h * eb + w] += aij * bgh;
                }
            }
        }
    }
    Ok(DenseMatrix::from_parts(rows, cols, out))
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    let (m, n) = a.shape();
    let (p, q) = b.shape();
    let rows = check_dim("kron", &[m, p])?;
    let cols = check_dim("kron", &[n, q])?;
    check_dim("kron", &[rows, cols])?;
    let mut out = vec![0.0; rows * cols];
    for i in 0..m {
        for j in 0..n {
            let aij = a.get(i, j);
            if aij == 0.0 {
                continue;
            }
            for r in 0..p {
                let base = (i * p + r) * cols + j * q;
                for (o, v) in out[base..base + q].iter_mut().zip(b.row(r)) {
                    *o = aij * v;
                }
            }
        }
    }
    Ok(DenseMatrix::from_parts(rows, cols, out))
}

/// Swap matrix `W_[m,n]` with `Col_{(i−1)n+j} = δ_{mn}^{i+(j−1)m}`.
///
/// For unit vectors `x ∈ Δ_m`, `y ∈ Δ_n` it satisfies
/// `W_[m,n] ⋉ x ⋉ y = y ⋉ x`, equivalently `x ⋉ y = W_[n,m] ⋉ y ⋉ x`.
pub fn swap_matrix(m: usize, n: usize) -> Result<LogicalMatrix> {
    if m == 0 || n == 0 {
        return Err(Error::shape("swap_matrix", "dimensions must be positive"));
    }
    let size = check_dim("swap matrix", &[m, n])?;
    let mut indices = vec![0; size];
    for i in 0..m {
        for j in 0..n {
            indices[i * n + j] = i + j * m + 1;
        }
    }
    Ok(LogicalMatrix::from_parts(size, indices))
}

/// Power-reducing matrix `R_k = diag{δ_k^1, …, δ_k^k}`, so that
/// `x ⋉ x = R_k x` for every `x ∈ Δ_k`.
pub fn power_reduce_matrix(k: usize) -> Result<LogicalMatrix> {
    if k == 0 {
        return Err(Error::shape("power_reduce_matrix", "k must be positive"));
    }
    let rows = check_dim("power-reduced matrix", &[k, k])?;
    Ok(LogicalMatrix::from_parts(
        rows,
        (0..k).map(|i| i * k + i + 1).collect(),
    ))
}

/// Projection `Φ_U = ⊗_j γ_j` with `γ_j = I_{k_j}` for `j ∈ U` and `1ᵀ_{k_j}`
/// otherwise. Node ids in `subset` are 1-based; the output always lists the
/// kept nodes in ascending order.
pub fn projection_matrix(alphabets: &[usize], subset: &[usize]) -> Result<LogicalMatrix> {
    let n = alphabets.len();
    if n == 0 || alphabets.contains(&0) {
        return Err(Error::Domain(
            "alphabets must be nonempty and positive".into(),
        ));
    }
    let mut keep = vec![false; n];
    for &node in subset {
        if node == 0 || node > n {
            return Err(Error::Domain(format!("node {node} is not in 1..={n}")));
        }
        if std::mem::replace(&mut keep[node - 1], true) {
            return Err(Error::Domain(format!("node {node} listed twice")));
        }
    }
    let k = check_dim("projection", alphabets)?;
    let kept: Vec<usize> = alphabets
        .iter()
        .zip(&keep)
        .filter(|(_, &kp)| kp)
        .map(|(&a, _)| a)
        .collect();
    let rows = check_dim("projection", &kept)?;

    let mut digits = vec![0usize; n];
    let mut indices = Vec::with_capacity(k);
    for _ in 0..k {
        let mut row = 0;
        for j in 0..n {
            if keep[j] {
                row = row * alphabets[j] + digits[j];
            }
        }
        indices.push(row + 1);
        // advance the mixed-radix counter, node n least significant
        for j in (0..n).rev() {
            digits[j] += 1;
            if digits[j] < alphabets[j] {
                break;
            }
            digits[j] = 0;
        }
    }
    Ok(LogicalMatrix::from_parts(rows, indices))
}

/// Khatri-Rao product: column `j` of the result is `Col_j(A) ⊗ Col_j(B)`.
pub fn khatri_rao(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    let (p, n) = a.shape();
    let (q, nb) = b.shape();
    if n != nb {
        return Err(Error::shape(
            "khatri_rao",
            format!("{n} columns against {nb} columns"),
        ));
    }
    let rows = check_dim("khatri-rao", &[p, q])?;
    check_dim("khatri-rao", &[rows, n])?;
    let mut out = vec![0.0; rows * n];
    for i in 0..p {
        let a_row = a.row(i);
        for r in 0..q {
            let out_row = &mut out[(i * q + r) * n..(i * q + r + 1) * n];
            for ((o, x), y) in out_row.iter_mut().zip(a_row).zip(b.row(r)) {
                *o = x * y;
            }
        }
    }
    Ok(DenseMatrix::from_parts(rows, n, out))
}

/// Khatri-Rao product of logical matrices, by index arithmetic.
pub fn khatri_rao_logical(a: &LogicalMatrix, b: &LogicalMatrix) -> Result<LogicalMatrix> {
    if a.cols() != b.cols() {
        return Err(Error::shape(
            "khatri_rao_logical",
            format!("{} columns against {} columns", a.cols(), b.cols()),
        ));
    }
    let rows = check_dim("khatri-rao", &[a.rows(), b.rows()])?;
    let indices = a
        .indices()
        .iter()
        .zip(b.indices())
        .map(|(&x, &y)| (x - 1) * b.rows() + y)
        .collect();
    Ok(LogicalMatrix::from_parts(rows, indices))
}

/// Semi-tensor product of logical matrices by index arithmetic. Agrees with
/// [`stp`] on the dense expansions.
pub fn stp_logical(a: &LogicalMatrix, b: &LogicalMatrix) -> Result<LogicalMatrix> {
    let (n, p) = (a.cols(), b.rows());
    let l = lcm(n, p)?;
    let (ea, eb) = (l / n, l / p);
    let rows = check_dim("stp", &[a.rows(), ea])?;
    let cols = check_dim("stp", &[b.cols(), eb])?;
    let mut indices = Vec::with_capacity(cols);
    for &g in b.indices() {
        for w in 0..eb {
            // column of B ⊗ I_eb lands on row c of the shared dimension
            let c = (g - 1) * eb + w;
            let (j, u) = (c / ea, c % ea);
            indices.push((a.index(j) - 1) * ea + u + 1);
        }
    }
    Ok(LogicalMatrix::from_parts(rows, indices))
}
