//! The truncated free associative algebra `T/T_k` on `n` generators: sparse
//! elements keyed by words of length `< k`, the concatenation product, the
//! shuffle coproduct and the element-level exponential and logarithm.
//!
//! Letters are stored zero-based; JSON and `Display` use the one-based
//! `X_1, ..., X_n` naming.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A word `X_{i_1} ... X_{i_m}` in the generators; the empty word is the unit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(i: usize) -> Self {
        Word(vec![i as u8])
    }

    pub fn from_letters(letters: impl IntoIterator<Item = usize>) -> Self {
        Word(letters.into_iter().map(|l| l as u8).collect())
    }

    pub fn letters(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.0.iter().map(|&l| l as usize)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn at(&self, pos: usize) -> usize {
        self.0[pos] as usize
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn slice(&self, from: usize, to: usize) -> Word {
        Word(self.0[from..to].to_vec())
    }

    /// Position among the `n^m` words of the same length, first letter most
    /// significant.
    pub fn dense_index(&self, n: usize) -> usize {
        self.0.iter().fold(0, |acc, &l| acc * n + l as usize)
    }

    pub fn from_dense_index(mut idx: usize, len: usize, n: usize) -> Self {
        let mut v = vec![0u8; len];
        for slot in v.iter_mut().rev() {
            *slot = (idx % n) as u8;
            idx /= n;
        }
        Word(v)
    }

    /// All `n^m` words of length `m` in dense-index order.
    pub fn all_of_length(n: usize, m: usize) -> impl Iterator<Item = Word> {
        (0..n.pow(m as u32)).map(move |i| Word::from_dense_index(i, m, n))
    }

    pub fn check(&self, n: usize, k: usize) -> Result<()> {
        if self.len() >= k {
            return Err(Error::Domain(format!("word {self} has length >= k = {k}")));
        }
        if let Some(l) = self.letters().find(|&l| l >= n) {
            return Err(Error::Domain(format!("letter X{} out of range for n = {n}", l + 1)));
        }
        Ok(())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for l in &self.0 {
            write!(f, "X{}", l + 1)?;
        }
        Ok(())
    }
}

/// Dimension of `T/T_k` as a vector space.
pub fn total_dim(n: usize, k: usize) -> usize {
    (0..k).map(|m| n.pow(m as u32)).sum()
}

/// Offset of the degree-`m` block in the degree-major dense basis of `T/T_k`.
pub fn degree_offset(n: usize, m: usize) -> usize {
    (0..m).map(|p| n.pow(p as u32)).sum()
}

/// An element of `T/T_k`. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedTensor<S> {
    n: usize,
    k: usize,
    terms: BTreeMap<Word, S>,
}

impl<S: Scalar> TruncatedTensor<S> {
    pub fn zero(n: usize, k: usize) -> Self {
        assert!(n >= 1 && k >= 2, "T/T_k needs n >= 1 and k >= 2 (got n={n}, k={k})");
        TruncatedTensor { n, k, terms: BTreeMap::new() }
    }

    pub fn one(n: usize, k: usize) -> Self {
        Self::monomial(n, k, Word::empty(), S::one())
    }

    /// `X_{i+1}` (zero-based `i`).
    pub fn generator(n: usize, k: usize, i: usize) -> Self {
        Self::monomial(n, k, Word::letter(i), S::one())
    }

    pub fn monomial(n: usize, k: usize, word: Word, coeff: S) -> Self {
        let mut t = Self::zero(n, k);
        if word.len() < k {
            t.add_term(word, coeff);
        }
        t
    }

    pub fn from_terms(n: usize, k: usize, terms: impl IntoIterator<Item = (Word, S)>) -> Result<Self> {
        if n == 0 || k < 2 {
            return Err(Error::Domain(format!("need n >= 1 and k >= 2, got n={n}, k={k}")));
        }
        let mut t = Self::zero(n, k);
        for (w, c) in terms {
            w.check(n, k)?;
            t.add_term(w, c);
        }
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &S)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, w: &Word) -> S {
        self.terms.get(w).cloned().unwrap_or_else(S::zero)
    }

    pub fn constant_term(&self) -> S {
        self.coeff(&Word::empty())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c` to the coefficient of `w`; words of length `>= k` are dropped.
    pub fn add_term(&mut self, w: Word, c: S) {
        if c.is_zero() || w.len() >= self.k {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn is_negligible(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.is_negligible(tol))
    }

    pub fn lowest_degree(&self) -> Option<usize> {
        self.terms.keys().map(Word::len).min()
    }

    /// The homogeneous component of degree `m`.
    pub fn degree_part(&self, m: usize) -> Self {
        let mut t = Self::zero(self.n, self.k);
        t.terms = self
            .terms
            .iter()
            .filter(|(w, _)| w.len() == m)
            .map(|(w, c)| (w.clone(), c.clone()))
            .collect();
        t
    }

    /// Degree-`m` component as a dense `n^m` vector.
    pub fn degree_vector(&self, m: usize) -> Vec<S> {
        let mut v = vec![S::zero(); self.n.pow(m as u32)];
        for (w, c) in self.terms.iter().filter(|(w, _)| w.len() == m) {
            v[w.dense_index(self.n)] = c.clone();
        }
        v
    }

    pub fn add_degree_vector(&mut self, m: usize, v: &[S]) {
        for (i, c) in v.iter().enumerate() {
            if !c.is_zero() {
                self.add_term(Word::from_dense_index(i, m, self.n), c.clone());
            }
        }
    }

    /// Same element viewed in `T/T_{k'}`: extra degrees are dropped when
    /// `k' < k`.
    pub fn retruncate(&self, k: usize) -> Self {
        let mut t = Self::zero(self.n, k);
        for (w, c) in &self.terms {
            t.add_term(w.clone(), c.clone());
        }
        t
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> TruncatedTensor<T> {
        let mut t = TruncatedTensor::zero(self.n, self.k);
        for (w, c) in &self.terms {
            t.add_term(w.clone(), f(c));
        }
        t
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.k != other.k {
            return Err(Error::Dimension(format!(
                "(n,k) = ({},{}) vs ({},{})",
                self.n, self.k, other.n, other.k
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut t = self.clone();
        for (w, c) in &other.terms {
            t.add_term(w.clone(), c.clone());
        }
        Ok(t)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut t = self.clone();
        for (w, c) in &other.terms {
            t.add_term(w.clone(), -c.clone());
        }
        Ok(t)
    }

    /// Concatenation product; words of length `>= k` are discarded.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut t = Self::zero(self.n, self.k);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                if u.len() + v.len() < self.k {
                    t.add_term(u.concat(v), a.clone() * b.clone());
                }
            }
        }
        Ok(t)
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut t = Self::zero(self.n, self.k);
        if s.is_zero() {
            return t;
        }
        for (w, c) in &self.terms {
            t.add_term(w.clone(), c.clone() * s.clone());
        }
        t
    }

    /// `Δ(X_i) = 1 ⊗ X_i + X_i ⊗ 1`, extended multiplicatively. On a word this
    /// is the sum over all ways of splitting its letters into two
    /// order-preserving subwords.
    pub fn coproduct(&self) -> TensorSquare<S> {
        let mut sq = TensorSquare::zero(self.n, self.k);
        for (w, c) in &self.terms {
            let len = w.len();
            for mask in 0u64..(1u64 << len) {
                let mut left = Vec::with_capacity(len);
                let mut right = Vec::with_capacity(len);
                for pos in 0..len {
                    if mask & (1 << pos) != 0 {
                        left.push(w.at(pos));
                    } else {
                        right.push(w.at(pos));
                    }
                }
                sq.add_term(Word::from_letters(left), Word::from_letters(right), c.clone());
            }
        }
        sq
    }

    /// `‖Δ(a) − 1⊗a − a⊗1‖_∞ <= tol`.
    pub fn is_primitive(&self, tol: f64) -> bool {
        let mut d = self.coproduct();
        let one = Self::one(self.n, self.k);
        d.sub_assign(&TensorSquare::tensor(&one, self));
        d.sub_assign(&TensorSquare::tensor(self, &one));
        d.is_negligible(tol)
    }

    /// Group-like means `Δ(u) = u ⊗ u`.
    pub fn is_grouplike(&self, tol: f64) -> bool {
        let mut d = self.coproduct();
        d.sub_assign(&TensorSquare::tensor(self, self));
        d.is_negligible(tol)
    }

    /// `exp(a) = sum_{j<k} a^j / j!`; `a` must have zero constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::Domain("tensor_exp needs zero constant term".into()));
        }
        let mut sum = Self::one(self.n, self.k);
        let mut term = Self::one(self.n, self.k);
        for j in 1..self.k {
            term = term.checked_mul(self)?.scale(&S::ratio(1, j as i64));
            if term.is_zero() {
                break;
            }
            sum = sum.checked_add(&term)?;
        }
        Ok(sum)
    }

    /// `log(u) = sum_{j<k} (-1)^{j+1} (u-1)^j / j`; `u` must have constant term 1.
    pub fn log(&self) -> Result<Self> {
        if self.constant_term() != S::one() {
            return Err(Error::Domain("tensor_log needs constant term 1".into()));
        }
        let w = self.checked_sub(&Self::one(self.n, self.k))?;
        let mut sum = Self::zero(self.n, self.k);
        let mut power = Self::one(self.n, self.k);
        for j in 1..self.k {
            power = power.checked_mul(&w)?;
            if power.is_zero() {
                break;
            }
            let sign = if j % 2 == 1 { 1 } else { -1 };
            sum = sum.checked_add(&power.scale(&S::ratio(sign, j as i64)))?;
        }
        Ok(sum)
    }

    /// Multiplicative inverse of a unit (invertible constant term).
    pub fn inverse(&self) -> Result<Self> {
        let c = self.constant_term();
        if c.is_negligible(0.0) {
            return Err(Error::Domain("element with zero constant term is not invertible".into()));
        }
        let c_inv = S::one() / c;
        // u = c (1 - w)  =>  u^{-1} = c^{-1} sum_j w^j
        let w = Self::one(self.n, self.k).checked_sub(&self.scale(&c_inv))?;
        let mut sum = Self::one(self.n, self.k);
        let mut power = Self::one(self.n, self.k);
        for _ in 1..self.k {
            power = power.checked_mul(&w)?;
            if power.is_zero() {
                break;
            }
            sum = sum.checked_add(&power)?;
        }
        Ok(sum.scale(&c_inv))
    }

    /// The dense column vector of this element in the degree-major basis of
    /// `T/T_k`.
    pub fn to_dense(&self) -> DMatrix<S> {
        let mut v = DMatrix::from_element(total_dim(self.n, self.k), 1, S::zero());
        for (w, c) in &self.terms {
            v[(degree_offset(self.n, w.len()) + w.dense_index(self.n), 0)] = c.clone();
        }
        v
    }
}

impl<S: Scalar> fmt::Display for TruncatedTensor<S>
where
    S: fmt::Display,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({c}){w}")?;
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<S: Scalar> std::ops::$trait for &TruncatedTensor<S> {
            type Output = TruncatedTensor<S>;

            /// Panics on mismatched `(n, k)`; use the `checked_*` form to get an error.
            fn $method(self, rhs: Self) -> TruncatedTensor<S> {
                self.$checked(rhs).expect("mismatched (n, k)")
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl<S: Scalar> std::ops::Neg for &TruncatedTensor<S> {
    type Output = TruncatedTensor<S>;

    fn neg(self) -> TruncatedTensor<S> {
        self.scale(&-S::one())
    }
}

/// Element of `T/T_k ⊗ T/T_k` modulo total degree `>= k`, the quotient in
/// which the coproduct is an algebra map.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSquare<S> {
    n: usize,
    k: usize,
    terms: BTreeMap<(Word, Word), S>,
}

impl<S: Scalar> TensorSquare<S> {
    pub fn zero(n: usize, k: usize) -> Self {
        TensorSquare { n, k, terms: BTreeMap::new() }
    }

    pub fn tensor(a: &TruncatedTensor<S>, b: &TruncatedTensor<S>) -> Self {
        let mut sq = Self::zero(a.n, a.k);
        for (u, x) in &a.terms {
            for (v, y) in &b.terms {
                sq.add_term(u.clone(), v.clone(), x.clone() * y.clone());
            }
        }
        sq
    }

    pub fn add_term(&mut self, u: Word, v: Word, c: S) {
        if c.is_zero() || u.len() + v.len() >= self.k {
            return;
        }
        let key = (u, v);
        let e = self.terms.entry(key.clone()).or_insert_with(S::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn coeff(&self, u: &Word, v: &Word) -> S {
        self.terms.get(&(u.clone(), v.clone())).cloned().unwrap_or_else(S::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Word, Word), &S)> {
        self.terms.iter()
    }

    pub fn sub_assign(&mut self, other: &Self) {
        for ((u, v), c) in &other.terms {
            self.add_term(u.clone(), v.clone(), -c.clone());
        }
    }

    /// Componentwise product `(a⊗b)(c⊗d) = ac ⊗ bd`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n, self.k);
        for ((a, b), x) in &self.terms {
            for ((c, d), y) in &other.terms {
                if a.len() + b.len() + c.len() + d.len() < self.k {
                    out.add_term(a.concat(c), b.concat(d), x.clone() * y.clone());
                }
            }
        }
        out
    }

    pub fn is_negligible(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.is_negligible(tol))
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(Scalar::magnitude).fold(0.0, f64::max)
    }
}
