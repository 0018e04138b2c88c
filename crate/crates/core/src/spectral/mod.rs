//! Dense complex linear algebra: Schur-based spectral data, the principal
//! logarithm, the matrix exponential, analytic matrix functions and the
//! exponential-solvability predicate.

mod jordan;
mod kernels;
mod schur_parlett;
mod solvability;

use nalgebra::DMatrix;

pub use jordan::{exact_block_sizes, jordan_block, jordan_structure, jordan_tensor_blocks, sizes_from_ranks, EigenCluster};
pub use kernels::Kernel;
pub use schur_parlett::{check_poles, matrix_function, matrix_function_tol, schur};
pub use solvability::{eig_unit_circle_obstruction, SolvabilityReport, UnitCircleWitness, Verdict};

use crate::error::{Error, Result};
use crate::scalar::C64;

pub type CMatrix = DMatrix<C64>;

/// Eigenvalues (with multiplicity), a Schur factorisation `M = Q T Q^*` and
/// the numerically determined Jordan block sizes per eigenvalue cluster.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub eigenvalues: Vec<C64>,
    pub q: CMatrix,
    pub t: CMatrix,
    pub clusters: Vec<EigenCluster>,
}

impl SpectralData {
    pub fn new(m: &CMatrix) -> Result<Self> {
        let (q, t) = schur(m)?;
        let eigenvalues: Vec<C64> = (0..t.nrows()).map(|i| t[(i, i)]).collect();
        let clusters = jordan_structure(m, &eigenvalues);
        Ok(SpectralData { eigenvalues, q, t, clusters })
    }

    pub fn reconstruct(&self) -> CMatrix {
        &self.q * &self.t * self.q.adjoint()
    }

    fn scale(&self) -> f64 {
        self.t.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0)
    }

    pub fn require_invertible(&self) -> Result<()> {
        let tol = 1e-12 * self.scale();
        match self.eigenvalues.iter().find(|l| l.norm() <= tol) {
            Some(l) => Err(Error::Domain(format!("matrix is singular (eigenvalue {l})"))),
            None => Ok(()),
        }
    }
}

/// The logarithm with eigenvalues `ln λ`, `−π < Im ≤ π`.
pub fn principal_log(a: &CMatrix) -> Result<CMatrix> {
    SpectralData::new(a)?.require_invertible()?;
    matrix_function(Kernel::Log, a)
}

/// `sum B^i / i!` by scaling and squaring a Taylor polynomial.
pub fn matrix_exp(b: &CMatrix) -> CMatrix {
    let n = b.nrows();
    let norm = (0..n)
        .map(|j| (0..n).map(|i| b[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = b / C64::new(2f64.powi(squarings), 0.0);
    let mut sum = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for j in 1..=24 {
        term = &term * &scaled / C64::new(j as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Real-entry convenience constructor.
pub fn real_matrix(rows: &[&[f64]]) -> CMatrix {
    CMatrix::from_fn(rows.len(), rows.first().map_or(0, |r| r.len()), |i, j| C64::new(rows[i][j], 0.0))
}
