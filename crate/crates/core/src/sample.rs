//! Random test objects with small rational coefficients.

use num_traits::Zero;
use rand::Rng;

use crate::derivation::GradedDerivation;
use crate::free_lie::{lyndon_basis, LiePoly};
use crate::graded_aut::GradedAut;
use crate::linalg::{self, Matrix};
use crate::scalar::{Rational, Scalar};

/// `a/b` with `|a| <= 3`, `1 <= b <= 3`.
pub fn rational<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    Rational::new(rng.gen_range(-3i64..=3).into(), rng.gen_range(1i64..=3).into())
}

/// A homogeneous Lie polynomial of degree `m`.
pub fn lie_poly<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize, m: usize) -> LiePoly<Rational> {
    let basis = lyndon_basis(n, k);
    let terms = basis[m].iter().map(|w| (w.clone(), rational(rng)));
    LiePoly::from_terms(n, k, terms).expect("Lyndon words of the right degree")
}

fn lie_block<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize, m: usize) -> Matrix<Rational> {
    let mut b = linalg::zeros(n.pow(m as u32), n);
    for j in 0..n {
        let t = lie_poly(rng, n, k, m).to_tensor();
        for (r, c) in t.degree_vector(m).into_iter().enumerate() {
            b[(r, j)] = c;
        }
    }
    b
}

fn dense_block<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> Matrix<Rational> {
    Matrix::from_fn(n.pow(m as u32), n, |_, _| rational(rng))
}

/// IA and Hopf: every `u_m(X_j)` is a Lie element.
pub fn hopf_ia_aut<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> GradedAut<Rational> {
    let u = (2..k).map(|m| lie_block(rng, n, k, m)).collect();
    GradedAut::new(linalg::identity(n), u, k).expect("valid blocks")
}

/// IA with arbitrary (generally non-primitive) `u_m`.
pub fn ia_aut<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> GradedAut<Rational> {
    let u = (2..k).map(|m| dense_block(rng, n, m)).collect();
    GradedAut::new(linalg::identity(n), u, k).expect("valid blocks")
}

/// Small integer entries, nonzero determinant.
pub fn invertible_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix<Rational> {
    loop {
        let a = Matrix::from_fn(n, n, |_, _| Rational::from_i64(rng.gen_range(-2i64..=2)));
        if !linalg::determinant(&a).is_zero() {
            return a;
        }
    }
}

pub fn aut<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> GradedAut<Rational> {
    let a = invertible_matrix(rng, n);
    ia_aut(rng, n, k).compose(&GradedAut::splitting(&a, k).expect("invertible")).expect("same shape")
}

/// Unipotent base matrix (upper unitriangular) after a Hopf IA part.
pub fn unipotent_hopf_aut<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> GradedAut<Rational> {
    let a = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => Rational::from_i64(1),
        std::cmp::Ordering::Less => Rational::from_i64(rng.gen_range(-2i64..=2)),
        std::cmp::Ordering::Greater => Rational::from_i64(0),
    });
    hopf_ia_aut(rng, n, k).compose(&GradedAut::splitting(&a, k).expect("invertible")).expect("same shape")
}

pub fn ia_derivation<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> GradedDerivation<Rational> {
    let mut d = GradedDerivation::zero(n, k);
    for m in 2..k {
        d.set_block(m, dense_block(rng, n, m));
    }
    d
}

/// IA with Lie-valued blocks.
pub fn lie_ia_derivation<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> GradedDerivation<Rational> {
    let mut d = GradedDerivation::zero(n, k);
    for m in 2..k {
        d.set_block(m, lie_block(rng, n, k, m));
    }
    d
}

pub fn derivation<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> GradedDerivation<Rational> {
    let mut d = ia_derivation(rng, n, k);
    d.set_block(1, dense_block(rng, n, 1));
    d
}
