//! Dense linear algebra over any [`Scalar`]: elimination, inverses, null
//! spaces and Kronecker powers. Pivoting takes the first nonzero entry on the
//! exact backend and the largest entry otherwise.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Matrix<S> = DMatrix<S>;

pub fn identity<S: Scalar>(n: usize) -> Matrix<S> {
    Matrix::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
}

pub fn zeros<S: Scalar>(rows: usize, cols: usize) -> Matrix<S> {
    Matrix::from_element(rows, cols, S::zero())
}

pub fn max_abs<S: Scalar>(m: &Matrix<S>) -> f64 {
    m.iter().map(Scalar::magnitude).fold(0.0, f64::max)
}

pub fn is_zero<S: Scalar>(m: &Matrix<S>, tol: f64) -> bool {
    m.iter().all(|x| x.is_negligible(tol))
}

pub fn map<S: Scalar, T: Scalar>(m: &Matrix<S>, f: impl Fn(&S) -> T) -> Matrix<T> {
    Matrix::from_fn(m.nrows(), m.ncols(), |i, j| f(&m[(i, j)]))
}

pub fn to_complex<S: Scalar>(m: &Matrix<S>) -> Matrix<crate::C64> {
    map(m, Scalar::to_complex)
}

pub fn matmul<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Matrix<S> {
    assert_eq!(a.ncols(), b.nrows(), "matmul: inner dimensions differ");
    let mut out = zeros(a.nrows(), b.ncols());
    for j in 0..b.ncols() {
        for l in 0..a.ncols() {
            let blj = &b[(l, j)];
            if blj.is_zero() {
                continue;
            }
            for i in 0..a.nrows() {
                let ail = &a[(i, l)];
                if !ail.is_zero() {
                    out[(i, j)] += ail.clone() * blj.clone();
                }
            }
        }
    }
    out
}

pub fn kron<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Matrix<S> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = &a[(i, j)];
            if aij.is_zero() {
                continue;
            }
            for p in 0..br {
                for q in 0..bc {
                    let bpq = &b[(p, q)];
                    if !bpq.is_zero() {
                        out[(i * br + p, j * bc + q)] = aij.clone() * bpq.clone();
                    }
                }
            }
        }
    }
    out
}

/// `f_1 ⊗ f_2 ⊗ ... ⊗ f_l`; the first factor indexes most significantly.
pub fn kron_all<S: Scalar>(factors: &[&Matrix<S>]) -> Matrix<S> {
    let mut iter = factors.iter();
    let Some(first) = iter.next() else {
        return identity(1);
    };
    iter.fold((*first).clone(), |acc, f| kron(&acc, f))
}

pub fn kron_power<S: Scalar>(a: &Matrix<S>, p: usize) -> Matrix<S> {
    (0..p).fold(identity(1), |acc, _| kron(&acc, a))
}

/// `sum_r I^{⊗r} ⊗ a ⊗ I^{⊗(p-1-r)}`, the action of `a` as a derivation on
/// `H^{⊗p}` (for square `a`) or its raising analogue (for `a: H -> H^{⊗m}`).
pub fn kron_sum<S: Scalar>(a: &Matrix<S>, n: usize, p: usize) -> Matrix<S> {
    let rows = n.pow((p - 1) as u32) * a.nrows();
    let cols = n.pow((p - 1) as u32) * a.ncols();
    let mut out = zeros(rows, cols);
    for r in 0..p {
        let left: Matrix<S> = identity(n.pow(r as u32));
        let right: Matrix<S> = identity(n.pow((p - 1 - r) as u32));
        out += kron_all(&[&left, a, &right]);
    }
    out
}

fn pivot_row<S: Scalar>(m: &Matrix<S>, col: usize, from: usize, tol: f64) -> Option<usize> {
    if S::EXACT {
        (from..m.nrows()).find(|&r| !m[(r, col)].is_zero())
    } else {
        let (row, mag) = (from..m.nrows())
            .map(|r| (r, m[(r, col)].magnitude()))
            .fold((from, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        (mag > tol).then_some(row)
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<S: Scalar>(m: &mut Matrix<S>, tol: f64) -> Vec<usize> {
    let (rows, cols) = m.shape();
    let scale = max_abs(m).max(1.0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = pivot_row(m, c, r, tol * scale) else {
            continue;
        };
        m.swap_rows(r, p);
        let inv = S::one() / m[(r, c)].clone();
        for j in c..cols {
            let v = m[(r, j)].clone() * inv.clone();
            m[(r, j)] = v;
        }
        for i in 0..rows {
            if i == r || m[(i, c)].is_zero() {
                continue;
            }
            let f = m[(i, c)].clone();
            for j in c..cols {
                let delta = f.clone() * m[(r, j)].clone();
                if !delta.is_zero() {
                    m[(i, j)] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<S: Scalar>(m: &Matrix<S>, tol: f64) -> usize {
    let mut work = m.clone();
    rref(&mut work, tol).len()
}

/// Basis of the right null space, one column per free variable.
pub fn nullspace<S: Scalar>(m: &Matrix<S>, tol: f64) -> Vec<Vec<S>> {
    let mut work = m.clone();
    let pivots = rref(&mut work, tol);
    let cols = m.ncols();
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![S::zero(); cols];
            v[f] = S::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -work[(row, f)].clone();
            }
            v
        })
        .collect()
}

/// Solves `a x = b` for square invertible `a`.
pub fn solve<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Result<Matrix<S>> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n {
        return Err(Error::Dimension(format!(
            "solve: {}x{} system with {} right-hand rows",
            a.nrows(),
            a.ncols(),
            b.nrows()
        )));
    }
    let tol = if S::EXACT { 0.0 } else { f64::EPSILON * 16.0 };
    let mut aug = zeros::<S>(n, n + b.ncols());
    aug.view_mut((0, 0), (n, n)).copy_from(a);
    aug.view_mut((0, n), (n, b.ncols())).copy_from(b);
    let pivots = rref(&mut aug, tol);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return Err(Error::Singular(format!("{n}x{n} system has rank {}", pivots.len().min(n))));
    }
    Ok(aug.view((0, n), (n, b.ncols())).into_owned())
}

pub fn inverse<S: Scalar>(a: &Matrix<S>) -> Result<Matrix<S>> {
    solve(a, &identity(a.nrows()))
}

pub fn determinant<S: Scalar>(a: &Matrix<S>) -> S {
    let n = a.nrows();
    let mut m = a.clone();
    let mut det = S::one();
    for c in 0..n {
        let Some(p) = pivot_row(&m, c, c, 0.0) else {
            return S::zero();
        };
        if p != c {
            m.swap_rows(p, c);
            det = -det;
        }
        let piv = m[(c, c)].clone();
        det *= piv.clone();
        for i in c + 1..n {
            if m[(i, c)].is_zero() {
                continue;
            }
            let f = m[(i, c)].clone() / piv.clone();
            for j in c..n {
                let delta = f.clone() * m[(c, j)].clone();
                m[(i, j)] -= delta;
            }
        }
    }
    det
}

/// Column-major flattening (the layout nalgebra stores).
pub fn vec_of<S: Scalar>(m: &Matrix<S>) -> Matrix<S> {
    Matrix::from_column_slice(m.len(), 1, m.as_slice())
}

pub fn unvec<S: Scalar>(v: &Matrix<S>, rows: usize, cols: usize) -> Matrix<S> {
    Matrix::from_column_slice(rows, cols, v.as_slice())
}
