//! Free groups, Magnus expansions `θ: F → (T/T_k)^×` and the total Johnson
//! map `T^θ(φ)`, characterised by `T^θ(φ) ∘ θ = θ ∘ φ`.
//!
//! Free-group letters are signed and one-based: `2` is `x_2`, `−2` is
//! `x_2^{-1}`.

use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::free_lie;
use crate::graded_aut::{self, GradedAut};
use crate::graded_tensor::{TruncatedTensor, Word};
use crate::json::Wire;
use crate::linalg::{self, Matrix};
use crate::scalar::{Rational, Scalar};

/// A freely reduced word in `x_1, …, x_n` and their inverses.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FreeGroupWord(Vec<i32>);

impl FreeGroupWord {
    pub fn empty() -> Self {
        FreeGroupWord(Vec::new())
    }

    pub fn generator(i: usize) -> Self {
        FreeGroupWord(vec![i as i32])
    }

    /// Reduces eagerly; rejects the letter 0.
    pub fn new(letters: impl IntoIterator<Item = i32>) -> Result<Self> {
        let mut out: Vec<i32> = Vec::new();
        for l in letters {
            if l == 0 {
                return Err(Error::Domain("free-group letters are nonzero".into()));
            }
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Ok(FreeGroupWord(out))
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest generator index that occurs.
    pub fn rank(&self) -> usize {
        self.0.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn inverse(&self) -> Self {
        FreeGroupWord(self.0.iter().rev().map(|l| -l).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.0.iter().chain(&other.0).copied()).expect("letters already valid")
    }

    /// `a b a^{-1} b^{-1}`.
    pub fn commutator(a: &Self, b: &Self) -> Self {
        a.mul(b).mul(&a.inverse()).mul(&b.inverse())
    }

    /// Exponent sum of `x_i`.
    pub fn exponent_sum(&self, i: usize) -> i64 {
        self.0.iter().filter(|l| l.unsigned_abs() as usize == i).map(|l| l.signum() as i64).sum()
    }

    /// `[x_1, x_2] ⋯ [x_{2g−1}, x_{2g}]`.
    pub fn boundary(g: usize) -> Self {
        (0..g).fold(Self::empty(), |acc, i| {
            acc.mul(&Self::commutator(&Self::generator(2 * i + 1), &Self::generator(2 * i + 2)))
        })
    }
}

impl fmt::Display for FreeGroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&l| if l > 0 { format!("x{l}") } else { format!("x{}^-1", -l) })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// An endomorphism of the free group, given by the images of the generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeGroupEndo {
    images: Vec<FreeGroupWord>,
    matrix: Matrix<Rational>,
}

impl FreeGroupEndo {
    pub fn new(images: Vec<FreeGroupWord>) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return Err(Error::Domain("an endomorphism needs at least one generator".into()));
        }
        if let Some(w) = images.iter().find(|w| w.rank() > n) {
            return Err(Error::Domain(format!("image {w} uses a letter beyond x{n}")));
        }
        // Column j: exponent sums of φ(x_{j+1}), i.e. the action on H.
        let matrix = Matrix::from_fn(n, n, |i, j| Rational::from_i64(images[j].exponent_sum(i + 1)));
        Ok(FreeGroupEndo { images, matrix })
    }

    pub fn identity(n: usize) -> Self {
        Self::new((1..=n).map(FreeGroupWord::generator).collect()).expect("valid images")
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[FreeGroupWord] {
        &self.images
    }

    /// Induced map on the abelianisation `H`.
    pub fn induced_matrix(&self) -> &Matrix<Rational> {
        &self.matrix
    }

    /// `det = ±1`.
    pub fn is_invertible_on_h(&self) -> bool {
        let d = linalg::determinant(&self.matrix);
        d == Rational::from_i64(1) || d == Rational::from_i64(-1)
    }

    pub fn apply(&self, w: &FreeGroupWord) -> Result<FreeGroupWord> {
        if w.rank() > self.n() {
            return Err(Error::Dimension(format!("word {w} has letters beyond x{}", self.n())));
        }
        Ok(w.letters().iter().fold(FreeGroupWord::empty(), |acc, &l| {
            let img = &self.images[l.unsigned_abs() as usize - 1];
            acc.mul(&if l > 0 { img.clone() } else { img.inverse() })
        }))
    }

    /// `self ∘ other`: `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::Dimension("endomorphisms of different free groups".into()));
        }
        Self::new(other.images.iter().map(|w| self.apply(w)).collect::<Result<_>>()?)
    }

    pub fn to_json(&self) -> Value {
        json!({ "n": self.n(), "images": self.images.iter().map(|w| w.letters().to_vec()).collect::<Vec<_>>() })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let images = v
            .get("images")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("endomorphism needs an \"images\" array".into()))?;
        let words: Result<Vec<FreeGroupWord>> = images
            .iter()
            .map(|img| {
                let letters: Option<Vec<i32>> = img
                    .as_array()
                    .and_then(|a| a.iter().map(|l| l.as_i64().map(|x| x as i32)).collect());
                let letters = letters.ok_or_else(|| Error::Parse("image must be an array of integers".into()))?;
                FreeGroupWord::new(letters).map_err(|e| Error::Parse(e.to_string()))
            })
            .collect();
        let words = words?;
        if let Some(n) = v.get("n") {
            if n.as_u64() != Some(words.len() as u64) {
                return Err(Error::Parse(format!("\"n\" is {n} but {} images were given", words.len())));
            }
        }
        Self::new(words).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Genus-one fixtures, as automorphisms of `F = <x_1, x_2>`. The standard
/// twists along the two curves act by `t_a: x_2 ↦ x_2 x_1` and
/// `t_b: x_1 ↦ x_1 x_2^{-1}`; `anosov = t_a ∘ t_b^{-1}` has trace 3 on `H`.
pub fn genus_one_fixtures() -> Vec<(&'static str, FreeGroupEndo)> {
    let w = |l: &[i32]| FreeGroupWord::new(l.iter().copied()).expect("valid fixture");
    let t_a = FreeGroupEndo::new(vec![w(&[1]), w(&[2, 1])]).expect("valid fixture");
    let t_b = FreeGroupEndo::new(vec![w(&[1, -2]), w(&[2])]).expect("valid fixture");
    let t_b_inv = FreeGroupEndo::new(vec![w(&[1, 2]), w(&[2])]).expect("valid fixture");
    let anosov = t_a.compose(&t_b_inv).expect("same rank");
    vec![("t_a", t_a), ("t_b", t_b), ("t_b_inv", t_b_inv), ("anosov", anosov)]
}

/// A Magnus expansion, determined by the values `θ(x_i)` (constant term 1,
/// invertible degree-one part).
#[derive(Debug, Clone, PartialEq)]
pub struct MagnusExpansion<S> {
    images: Vec<TruncatedTensor<S>>,
    inverses: Vec<TruncatedTensor<S>>,
}

impl<S: Scalar> MagnusExpansion<S> {
    pub fn new(images: Vec<TruncatedTensor<S>>) -> Result<Self> {
        let n = images.len();
        let Some(first) = images.first() else {
            return Err(Error::Domain("an expansion needs at least one generator".into()));
        };
        let k = first.k();
        for t in &images {
            if (t.n(), t.k()) != (n, k) {
                return Err(Error::Dimension("expansion values live in different algebras".into()));
            }
            if t.constant_term() != S::one() {
                return Err(Error::Domain("expansion values must have constant term 1".into()));
            }
        }
        let out = MagnusExpansion { inverses: images.iter().map(|t| t.inverse()).collect::<Result<_>>()?, images };
        if linalg::inverse(&out.base_matrix()).is_err() {
            return Err(Error::Domain("base matrix of the expansion is singular".into()));
        }
        Ok(out)
    }

    /// `θ_exp(x_i) = exp(X_i)`.
    pub fn theta_exp(n: usize, k: usize) -> Result<Self> {
        Self::new((0..n).map(|i| TruncatedTensor::generator(n, k, i).exp()).collect::<Result<_>>()?)
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn k(&self) -> usize {
        self.images[0].k()
    }

    pub fn images(&self) -> &[TruncatedTensor<S>] {
        &self.images
    }

    /// `θ(x_i) = 1 + sum_j a_ij X_j` mod degree 2.
    pub fn base_matrix(&self) -> Matrix<S> {
        let n = self.n();
        Matrix::from_fn(n, n, |i, j| self.images[i].coeff(&Word::letter(j)))
    }

    pub fn evaluate(&self, w: &FreeGroupWord) -> Result<TruncatedTensor<S>> {
        if w.rank() > self.n() {
            return Err(Error::Dimension(format!("word {w} has letters beyond x{}", self.n())));
        }
        let mut acc = TruncatedTensor::one(self.n(), self.k());
        for &l in w.letters() {
            let i = l.unsigned_abs() as usize - 1;
            acc = acc.checked_mul(if l > 0 { &self.images[i] } else { &self.inverses[i] })?;
        }
        Ok(acc)
    }

    pub fn is_grouplike(&self, tol: f64) -> bool {
        self.images.iter().all(|t| t.is_grouplike(tol))
    }

    /// `θ(ζ) = exp(ω)` for the boundary word `ζ` of genus `n/2`.
    pub fn is_symplectic(&self, tol: f64) -> Result<bool> {
        if !self.n().is_multiple_of(2) {
            return Err(Error::Domain("symplectic expansions need an even number of generators".into()));
        }
        if !self.is_grouplike(tol) {
            return Err(Error::Precondition("symplectic check needs a group-like expansion".into()));
        }
        let zeta = self.evaluate(&FreeGroupWord::boundary(self.n() / 2))?;
        let target = free_lie::omega_for_rank::<S>(self.n(), self.k())?.to_tensor().exp()?;
        Ok(zeta.checked_sub(&target)?.is_negligible(tol))
    }

    /// `U · θ = U ∘ θ`.
    pub fn act(&self, u: &GradedAut<S>) -> Result<Self> {
        Self::new(self.images.iter().map(|t| u.apply(t)).collect::<Result<_>>()?)
    }

    pub fn to_json(&self) -> Value {
        json!({ "n": self.n(), "k": self.k(), "images": self.images.iter().map(Wire::to_json).collect::<Vec<_>>() })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let images = v
            .get("images")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("expansion needs an \"images\" array".into()))?;
        let images: Vec<TruncatedTensor<S>> = images.iter().map(TruncatedTensor::from_json).collect::<Result<_>>()?;
        Self::new(images).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// The unique Hopf automorphism `U` with `U · θ = θ'`.
pub fn transporter<S: Scalar>(theta: &MagnusExpansion<S>, theta_prime: &MagnusExpansion<S>) -> Result<GradedAut<S>> {
    let tol = S::default_tol();
    if !theta.is_grouplike(tol) || !theta_prime.is_grouplike(tol) {
        return Err(Error::Domain("transporter needs group-like expansions".into()));
    }
    graded_aut::solve_intertwiner(theta.images(), theta_prime.images())
}

/// `T^θ(φ)`, the automorphism with `T^θ(φ)(θ(x_i)) = θ(φ(x_i))`.
pub fn total_johnson<S: Scalar>(theta: &MagnusExpansion<S>, phi: &FreeGroupEndo) -> Result<GradedAut<S>> {
    if phi.n() != theta.n() {
        return Err(Error::Dimension("endomorphism and expansion have different ranks".into()));
    }
    if linalg::determinant(phi.induced_matrix()) == Rational::from_i64(0) {
        return Err(Error::Domain("endomorphism induces a singular map on H".into()));
    }
    let targets: Vec<TruncatedTensor<S>> = phi.images().iter().map(|w| theta.evaluate(w)).collect::<Result<_>>()?;
    let t = graded_aut::solve_intertwiner(theta.images(), &targets)?;
    let tol = S::default_tol();
    for (src, target) in theta.images().iter().zip(&targets) {
        let gap = t.apply(src)?.checked_sub(target)?.max_abs();
        if (S::EXACT && gap != 0.0) || gap > tol * (1.0 + target.max_abs()) {
            return Err(Error::Verification(format!("intertwining identity fails by {gap:e}")));
        }
    }
    Ok(t)
}
