use crate::derivation::GradedDerivation;
use crate::error::{Error, Result};
use crate::graded_aut::GradedAut;
use crate::graded_tensor::{degree_offset, total_dim};
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;

/// `Log Φ = −sum_{i>=1} (id − Φ)^i / i` for `Φ` with unipotent degree-one
/// part, where the series is a finite sum.
///
/// The sum is taken on the columns of the generators and of the degree-two
/// words. The generator columns define the derivation; the degree-two
/// columns must then agree with what the derivation does to products, which
/// certifies that the series really produced a derivation.
pub fn log_unipotent<S: Scalar>(phi: &GradedAut<S>) -> Result<GradedDerivation<S>> {
    let tol = S::default_tol();
    if !phi.is_unipotent(tol) {
        return Err(Error::Precondition(
            "degree-one part is not unipotent; use ln_aut for the extended logarithm".into(),
        ));
    }
    let (n, k) = (phi.n(), phi.k());
    let dim = total_dim(n, k);
    // Degree-2 words exist only for k >= 3.
    let probe = if k >= 3 { n + n * n } else { n };
    let nil = linalg::identity::<S>(dim) - phi.full_matrix();

    // (id − Φ) is nilpotent with index at most sum_p (p(n−1)+1) over degrees.
    let bound: usize = (1..k).map(|p| p * (n - 1) + 1).sum();
    let mut power = Matrix::from_fn(dim, probe, |r, c| if r == c + 1 { S::one() } else { S::zero() });
    let mut log = linalg::zeros::<S>(dim, probe);
    let mut vanished = false;
    for i in 1..=bound {
        power = linalg::matmul(&nil, &power);
        if linalg::is_zero(&power, 0.0) {
            vanished = true;
            break;
        }
        log -= &power * S::ratio(1, i as i64);
    }
    if S::EXACT && !vanished && !linalg::is_zero(&linalg::matmul(&nil, &power), 0.0) {
        return Err(Error::Verification("(id − Φ) is not nilpotent".into()));
    }

    let blocks: Vec<Matrix<S>> = (1..k)
        .map(|m| log.view((degree_offset(n, m), 0), (n.pow(m as u32), n)).into_owned())
        .collect();
    let d = GradedDerivation::new(blocks, n)?;

    if k >= 3 {
        let full = d.full_matrix();
        let cols = n * n;
        let series = log.view((0, n), (dim, cols));
        let leibniz = full.view((0, degree_offset(n, 2)), (dim, cols));
        let gap = linalg::max_abs(&(series - leibniz));
        let ok = if S::EXACT { gap == 0.0 } else { gap <= tol * (1.0 + linalg::max_abs(&log)) };
        if !ok {
            return Err(Error::Verification(format!("Maclaurin logarithm is not a derivation (defect {gap:e})")));
        }
    }
    Ok(d)
}
