//! Jordan structure: numerical block sizes from rank sequences and the
//! decomposition of a Kronecker product of two Jordan blocks.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::{Scalar, C64};
use crate::tolerance::{JORDAN_CLUSTER_TOL, RANK_TOL};

/// `J_λ(size)`: `λ` on the diagonal, ones on the superdiagonal.
pub fn jordan_block<S: Scalar>(lambda: S, size: usize) -> Matrix<S> {
    Matrix::from_fn(size, size, |i, j| {
        if i == j {
            lambda.clone()
        } else if j == i + 1 {
            S::one()
        } else {
            S::zero()
        }
    })
}

/// `J_λ(ℓ) ⊗ J_μ(m) ≅ ⊕_{w=1}^{min(ℓ,m)} J_{λμ}(ℓ+m−2w+1)` for `λ, μ ≠ 0`.
pub fn jordan_tensor_blocks(lambda: C64, l: usize, mu: C64, m: usize) -> Result<Vec<(C64, usize)>> {
    if lambda.norm() == 0.0 || mu.norm() == 0.0 {
        return Err(Error::Unsupported("Jordan blocks with eigenvalue zero".into()));
    }
    if l == 0 || m == 0 {
        return Err(Error::Domain("Jordan blocks have size >= 1".into()));
    }
    Ok((1..=l.min(m)).map(|w| (lambda * mu, l + m - 2 * w + 1)).collect())
}

/// Block sizes (descending) of a nilpotent-shifted matrix from the ranks
/// `r_j = rank(N^j)`, `j = 0..=a`.
pub fn sizes_from_ranks(ranks: &[usize]) -> Vec<usize> {
    // #blocks of size >= j is r_{j-1} - r_j
    let at_least: Vec<usize> = (1..ranks.len()).map(|j| ranks[j - 1] - ranks[j]).collect();
    let mut sizes = Vec::new();
    for j in 0..at_least.len() {
        let next = at_least.get(j + 1).copied().unwrap_or(0);
        for _ in 0..at_least[j].saturating_sub(next) {
            sizes.push(j + 1);
        }
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

fn numerical_rank(m: &DMatrix<C64>, tol: f64) -> usize {
    if m.nrows() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    sv.iter().filter(|&&s| s > tol).count()
}

/// An eigenvalue cluster with its algebraic multiplicity and Jordan sizes.
#[derive(Debug, Clone)]
pub struct EigenCluster {
    pub eigenvalue: C64,
    pub multiplicity: usize,
    pub block_sizes: Vec<usize>,
}

/// Groups Schur eigenvalues that agree to within `JORDAN_CLUSTER_TOL`
/// (relative) and reads off each group's Jordan sizes numerically.
pub fn jordan_structure(m: &DMatrix<C64>, eigs: &[C64]) -> Vec<EigenCluster> {
    let mut clusters: Vec<Vec<C64>> = Vec::new();
    for &l in eigs {
        let home = clusters.iter_mut().find(|c| {
            let mean = c.iter().sum::<C64>() / c.len() as f64;
            (mean - l).norm() <= JORDAN_CLUSTER_TOL * mean.norm().max(1.0)
        });
        match home {
            Some(c) => c.push(l),
            None => clusters.push(vec![l]),
        }
    }
    let n = m.nrows();
    clusters
        .into_iter()
        .map(|c| {
            let mean = c.iter().sum::<C64>() / c.len() as f64;
            let a = c.len();
            let shifted = m - DMatrix::from_diagonal_element(n, n, mean);
            let base = shifted.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
            let mut ranks = vec![n];
            let mut power = DMatrix::identity(n, n);
            for j in 1..=a {
                power = &power * &shifted;
                let tol = RANK_TOL * base.powi(j as i32) * n as f64;
                ranks.push(numerical_rank(&power, tol));
            }
            let mut sizes = sizes_from_ranks(&ranks);
            // Numerical noise can only hide nilpotency, never fake it; pad
            // with ones so sizes always sum to the multiplicity.
            let total: usize = sizes.iter().sum();
            if total < a {
                sizes.extend(std::iter::repeat_n(1, a - total));
            }
            EigenCluster { eigenvalue: mean, multiplicity: a, block_sizes: sizes }
        })
        .collect()
}

/// Exact Jordan sizes for eigenvalue `lambda` of a rational matrix.
pub fn exact_block_sizes(m: &Matrix<crate::Rational>, lambda: &crate::Rational) -> Vec<usize> {
    let n = m.nrows();
    let shifted = m - linalg::identity::<crate::Rational>(n) * lambda.clone();
    let mut ranks = vec![n];
    let mut power = linalg::identity::<crate::Rational>(n);
    loop {
        power = linalg::matmul(&power, &shifted);
        let r = linalg::rank(&power, 0.0);
        let done = r == *ranks.last().unwrap();
        ranks.push(r);
        if done {
            break;
        }
    }
    sizes_from_ranks(&ranks)
}
