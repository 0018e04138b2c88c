//! Block Schur–Parlett evaluation of `f(M)`.
//!
//! Eigenvalues are clustered, the complex Schur form is reordered so that
//! each cluster is contiguous, each diagonal block is evaluated by a Taylor
//! series about the cluster mean, and the off-diagonal blocks come from the
//! Parlett recurrence (a triangular Sylvester equation per block pair).

use nalgebra::{DMatrix, Schur};

use super::kernels::{Kernel, AXIS_SNAP};
use crate::error::{Error, Result};
use crate::scalar::C64;
use crate::tolerance::{KERNEL_POLE_TOL, PARLETT_CLUSTER_DELTA};

const MAX_TAYLOR_TERMS: usize = 400;

/// Complex Schur decomposition `M = Q T Q^*` with `T` upper triangular.
pub fn schur(m: &DMatrix<C64>) -> Result<(DMatrix<C64>, DMatrix<C64>)> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    if m.nrows() == 0 {
        return Ok((m.clone(), m.clone()));
    }
    let n = m.nrows();
    if (0..n).all(|j| (j + 1..n).all(|i| m[(i, j)] == C64::new(0.0, 0.0))) {
        return Ok((DMatrix::identity(n, n), m.clone()));
    }
    // Defective inputs (nilpotent ad-operators are typical) can stall the QR
    // iteration at machine precision; retry with looser deflation.
    let (q, mut t) = [f64::EPSILON, 1e-14, 1e-12]
        .iter()
        .find_map(|&eps| Schur::try_new(m.clone(), eps, 20_000))
        .ok_or_else(|| Error::Domain("Schur iteration did not converge".into()))?
        .unpack();
    for j in 0..t.ncols() {
        for i in j + 1..t.nrows() {
            t[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    Ok((q, t))
}

/// Givens pair `(c, s)` with `[c s; -conj(s) c] [f; g] = [r; 0]`.
fn givens(f: C64, g: C64) -> (f64, C64) {
    if g.norm() == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if f.norm() == 0.0 {
        return (0.0, g.conj() / g.norm());
    }
    let fa = f.norm();
    let d = fa.hypot(g.norm());
    (fa / d, (f / fa) * g.conj() / d)
}

/// `(x, y) <- (c x + s y, c y - conj(s) x)`
fn rotate(x: &mut C64, y: &mut C64, c: f64, s: C64) {
    let t = *x * c + s * *y;
    *y = *y * c - s.conj() * *x;
    *x = t;
}

/// Swaps diagonal entries `i` and `i+1` of the triangular `t`, updating `q`.
fn swap_adjacent(q: &mut DMatrix<C64>, t: &mut DMatrix<C64>, i: usize) {
    let n = t.nrows();
    let (t11, t22) = (t[(i, i)], t[(i + 1, i + 1)]);
    let (c, s) = givens(t[(i, i + 1)], t22 - t11);
    for j in i + 2..n {
        let (mut x, mut y) = (t[(i, j)], t[(i + 1, j)]);
        rotate(&mut x, &mut y, c, s);
        t[(i, j)] = x;
        t[(i + 1, j)] = y;
    }
    for r in 0..i {
        let (mut x, mut y) = (t[(r, i)], t[(r, i + 1)]);
        rotate(&mut x, &mut y, c, s.conj());
        t[(r, i)] = x;
        t[(r, i + 1)] = y;
    }
    t[(i, i)] = t22;
    t[(i + 1, i + 1)] = t11;
    for r in 0..q.nrows() {
        let (mut x, mut y) = (q[(r, i)], q[(r, i + 1)]);
        rotate(&mut x, &mut y, c, s.conj());
        q[(r, i)] = x;
        q[(r, i + 1)] = y;
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn axis_side(z: C64) -> i8 {
    if z.im > AXIS_SNAP * z.norm() {
        1
    } else if z.im < -AXIS_SNAP * z.norm() {
        -1
    } else {
        0
    }
}

/// Cluster label per eigenvalue, labels numbered by first appearance.
fn cluster(eigs: &[C64], kernel: Kernel) -> Vec<usize> {
    let n = eigs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if (eigs[i] - eigs[j]).norm() > PARLETT_CLUSTER_DELTA {
                continue;
            }
            // The principal log is discontinuous across the negative axis.
            if kernel == Kernel::Log
                && (eigs[i].re < 0.0 || eigs[j].re < 0.0)
                && axis_side(eigs[i]) != axis_side(eigs[j])
            {
                continue;
            }
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut labels = vec![usize::MAX; n];
    let mut next = 0;
    let mut root_label = std::collections::HashMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        labels[i] = *root_label.entry(r).or_insert_with(|| {
            next += 1;
            next - 1
        });
    }
    labels
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `f(T)` for an upper-triangular block whose eigenvalues all lie in one cluster.
fn taylor_block(kernel: Kernel, t: &DMatrix<C64>) -> DMatrix<C64> {
    let s = t.nrows();
    let sigma: C64 = (0..s).map(|i| t[(i, i)]).sum::<C64>() / s as f64;
    if s == 1 {
        return DMatrix::from_element(1, 1, kernel.eval(t[(0, 0)]));
    }
    let coeffs = kernel.taylor(sigma, MAX_TAYLOR_TERMS);
    let mut nmat = t.clone();
    for i in 0..s {
        nmat[(i, i)] -= sigma;
    }
    let mut f = DMatrix::from_diagonal_element(s, s, coeffs[0]);
    let mut power = DMatrix::identity(s, s);
    let mut quiet = 0;
    for c in coeffs.iter().skip(1) {
        power = &power * &nmat;
        let pn = max_abs(&power);
        if pn == 0.0 {
            break;
        }
        f += &power * *c;
        if pn * c.norm() <= f64::EPSILON * 1e-2 * max_abs(&f).max(1e-300) {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    f
}

/// Solves `A X − X B = C` for upper-triangular `A`, `B` with disjoint spectra.
fn triangular_sylvester(a: &DMatrix<C64>, b: &DMatrix<C64>, c: &DMatrix<C64>) -> DMatrix<C64> {
    let (p, q) = c.shape();
    let mut x = DMatrix::from_element(p, q, C64::new(0.0, 0.0));
    for col in 0..q {
        let mut rhs: Vec<C64> = (0..p).map(|i| c[(i, col)]).collect();
        for d in 0..col {
            let bdc = b[(d, col)];
            if bdc.norm() != 0.0 {
                for i in 0..p {
                    rhs[i] += x[(i, d)] * bdc;
                }
            }
        }
        let shift = b[(col, col)];
        for i in (0..p).rev() {
            let mut acc = rhs[i];
            for j in i + 1..p {
                acc -= a[(i, j)] * x[(j, col)];
            }
            x[(i, col)] = acc / (a[(i, i)] - shift);
        }
    }
    x
}

/// Refuses eigenvalues within `pole_tol` (relative to the pole's modulus,
/// absolute for the logarithm) of a singular point of the kernel.
pub fn check_poles(kernel: Kernel, eigs: &[C64], pole_tol: f64) -> Result<()> {
    for &l in eigs {
        if let Some(pole) = kernel.nearest_pole(l) {
            let distance = (l - pole).norm();
            let scale = if kernel == Kernel::Log { 1.0 } else { pole.norm() };
            if distance <= pole_tol * scale {
                return Err(Error::KernelSingular { eigenvalue: l, pole, distance });
            }
        }
    }
    Ok(())
}

/// `f(M)` by one Taylor series about `σ = tr M / n`, provided `M − σ` is
/// nilpotent (so `σ` is the only eigenvalue). This covers the defective
/// inputs on which the QR iteration stalls.
fn single_eigenvalue(kernel: Kernel, m: &DMatrix<C64>, pole_tol: f64) -> Option<Result<DMatrix<C64>>> {
    let n = m.nrows();
    let sigma = m.trace() / n as f64;
    let nil = m - DMatrix::from_diagonal_element(n, n, sigma);
    let scale = max_abs(&nil).max(1.0);
    let mut power = nil.clone();
    for _ in 1..n {
        power = &power * &nil;
    }
    if max_abs(&power) > 1e-12 * scale.powi(n as i32) {
        return None;
    }
    Some(check_poles(kernel, &[sigma], pole_tol).map(|_| taylor_block(kernel, m)))
}

/// `f(M)` for one of the supported kernels.
pub fn matrix_function(kernel: Kernel, m: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    matrix_function_tol(kernel, m, KERNEL_POLE_TOL)
}

/// [`matrix_function`] with an explicit pole-proximity threshold.
pub fn matrix_function_tol(kernel: Kernel, m: &DMatrix<C64>, pole_tol: f64) -> Result<DMatrix<C64>> {
    let (mut q, mut t) = match schur(m) {
        Ok(qt) => qt,
        Err(err) => return single_eigenvalue(kernel, m, pole_tol).ok_or(err)?,
    };
    let n = t.nrows();
    if n == 0 {
        return Ok(t);
    }
    let eigs: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    check_poles(kernel, &eigs, pole_tol)?;

    // Bubble the clusters into contiguous runs with adjacent swaps.
    let mut labels = cluster(&eigs, kernel);
    for pass in 0..n {
        let mut swapped = false;
        for i in 0..n - 1 - pass.min(n - 1) {
            if labels[i] > labels[i + 1] {
                swap_adjacent(&mut q, &mut t, i);
                labels.swap(i, i + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || labels[i] != labels[start] {
            blocks.push((start, i - start));
            start = i;
        }
    }

    let mut f = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for &(s, len) in &blocks {
        let tb = t.view((s, s), (len, len)).into_owned();
        f.view_mut((s, s), (len, len)).copy_from(&taylor_block(kernel, &tb));
    }
    for jb in 0..blocks.len() {
        let (sj, lj) = blocks[jb];
        for ib in (0..jb).rev() {
            let (si, li) = blocks[ib];
            let tii = t.view((si, si), (li, li)).into_owned();
            let tjj = t.view((sj, sj), (lj, lj)).into_owned();
            let tij = t.view((si, sj), (li, lj)).into_owned();
            let fii = f.view((si, si), (li, li)).into_owned();
            let fjj = f.view((sj, sj), (lj, lj)).into_owned();
            let mut rhs = &fii * &tij - &tij * &fjj;
            for &(sk, lk) in &blocks[ib + 1..jb] {
                let fik = f.view((si, sk), (li, lk)).into_owned();
                let tkj = t.view((sk, sj), (lk, lj)).into_owned();
                let tik = t.view((si, sk), (li, lk)).into_owned();
                let fkj = f.view((sk, sj), (lk, lj)).into_owned();
                rhs += &fik * &tkj - &tik * &fkj;
            }
            let x = triangular_sylvester(&tii, &tjj, &rhs);
            f.view_mut((si, sj), (li, lj)).copy_from(&x);
        }
    }
    Ok(&q * f * q.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn reordering_keeps_the_decomposition() {
        let m = DMatrix::from_row_slice(
            4,
            4,
            &[c(1.0, 0.0), c(2.0, 0.0), c(0.0, 1.0), c(0.5, 0.0),
              c(0.0, 0.0), c(3.0, 0.0), c(1.0, 0.0), c(0.0, 0.0),
              c(0.0, 0.0), c(0.0, 0.0), c(1.05, 0.0), c(2.0, 0.0),
              c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(3.02, 0.0)],
        );
        let (mut q, mut t) = schur(&m).unwrap();
        swap_adjacent(&mut q, &mut t, 1);
        swap_adjacent(&mut q, &mut t, 0);
        let back = &q * &t * q.adjoint();
        assert!(max_abs(&(back - &m)) < 1e-12);
        for j in 0..4 {
            for i in j + 1..4 {
                assert!(t[(i, j)].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn exp_of_jordan_block() {
        // exp([[a,1],[0,a]]) = e^a [[1,1],[0,1]]
        let a = 0.3;
        let m = DMatrix::from_row_slice(2, 2, &[c(a, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(a, 0.0)]);
        let f = matrix_function(Kernel::Exp, &m).unwrap();
        let e = a.exp();
        assert!((f[(0, 1)] - c(e, 0.0)).norm() < 1e-14);
        assert!((f[(0, 0)] - c(e, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn separated_clusters_use_parlett() {
        // f(T) for 2x2 upper triangular with distinct eigenvalues:
        // off-diagonal = t12 (f(a)-f(b))/(a-b)
        let (a, b) = (c(0.2, 0.0), c(2.0, 0.5));
        let m = DMatrix::from_row_slice(2, 2, &[a, c(1.5, 0.0), c(0.0, 0.0), b]);
        let f = matrix_function(Kernel::Phi1, &m).unwrap();
        let fa = Kernel::Phi1.eval(a);
        let fb = Kernel::Phi1.eval(b);
        assert!((f[(0, 1)] - c(1.5, 0.0) * (fa - fb) / (a - b)).norm() < 1e-13);
    }

    #[test]
    fn pole_detected() {
        let m = DMatrix::from_diagonal_element(1, 1, c(0.0, 2.0 * std::f64::consts::PI));
        assert!(matches!(matrix_function(Kernel::InvPhi1, &m), Err(Error::KernelSingular { .. })));
    }
}
