//! The free nilpotent Lie algebra `L/L_k` in the Lyndon basis.
//!
//! A Lyndon word `w` stands for its standard bracketing `P_w`: split `w = uv`
//! with `v` the longest proper Lyndon suffix and set `P_w = [P_u, P_v]`. As a
//! tensor, `P_w = w + (lexicographically larger words)`, so converting a
//! primitive tensor back into Lyndon coordinates is a triangular solve.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::graded_tensor::{TruncatedTensor, Word};
use crate::linalg::{self, Matrix};
use crate::scalar::{Rational, Scalar};

pub fn is_lyndon(w: &Word) -> bool {
    let n = w.len();
    if n == 0 {
        return false;
    }
    let letters: Vec<usize> = w.letters().collect();
    (1..n).all(|r| letters[..] < letters[r..].iter().chain(&letters[..r]).copied().collect::<Vec<_>>()[..])
}

/// Lyndon words of length `1..=max_len` over `n` letters in lexicographic
/// order (Duval's generation algorithm).
pub fn lyndon_words(n: usize, max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    if n == 0 || max_len == 0 {
        return out;
    }
    let mut w: Vec<usize> = vec![0];
    loop {
        out.push(Word::from_letters(w.iter().copied()));
        let m = w.len();
        while w.len() < max_len {
            let c = w[w.len() - m];
            w.push(c);
        }
        while w.last() == Some(&(n - 1)) {
            w.pop();
        }
        match w.last_mut() {
            Some(last) => *last += 1,
            None => break,
        }
    }
    out
}

/// The Lyndon basis of `L/L_k` grouped by degree; entry `m` holds degree `m`
/// (entry 0 is empty).
pub fn lyndon_basis(n: usize, k: usize) -> Vec<Vec<Word>> {
    let mut by_deg = vec![Vec::new(); k.max(1)];
    for w in lyndon_words(n, k.saturating_sub(1)) {
        let d = w.len();
        by_deg[d].push(w);
    }
    by_deg
}

fn mobius(mut m: usize) -> i64 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            m /= p;
            if m.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if m > 1 {
        result = -result;
    }
    result
}

/// `(1/m) sum_{d | m} mu(d) n^{m/d}`: the dimension of the degree-`m` part of
/// the free Lie algebra on `n` generators.
pub fn necklace_count(n: usize, m: usize) -> usize {
    if m == 0 {
        return 0;
    }
    let total: i64 = (1..=m)
        .filter(|d| m.is_multiple_of(*d))
        .map(|d| mobius(d) * (n as i64).pow((m / d) as u32))
        .sum();
    (total / m as i64) as usize
}

/// Standard factorization `w = uv`, `v` the longest proper Lyndon suffix.
pub fn standard_factorization(w: &Word) -> Option<(Word, Word)> {
    if w.len() < 2 {
        return None;
    }
    (1..w.len())
        .map(|split| (w.slice(0, split), w.slice(split, w.len())))
        .find(|(_, v)| is_lyndon(v))
}

/// Integer tensor expansion of `P_w`; cached across calls in `memo`.
fn bracket_expansion(w: &Word, memo: &mut HashMap<Word, BTreeMap<Word, i64>>) -> BTreeMap<Word, i64> {
    if let Some(e) = memo.get(w) {
        return e.clone();
    }
    let e = match standard_factorization(w) {
        None => BTreeMap::from([(w.clone(), 1)]),
        Some((u, v)) => {
            let pu = bracket_expansion(&u, memo);
            let pv = bracket_expansion(&v, memo);
            let mut e = BTreeMap::new();
            for (a, x) in &pu {
                for (b, y) in &pv {
                    *e.entry(a.concat(b)).or_insert(0) += x * y;
                    *e.entry(b.concat(a)).or_insert(0) -= x * y;
                }
            }
            e.retain(|_, c| *c != 0);
            e
        }
    };
    memo.insert(w.clone(), e.clone());
    e
}

/// `P_w` as a word → integer map.
pub fn lyndon_expansion(w: &Word) -> BTreeMap<Word, i64> {
    bracket_expansion(w, &mut HashMap::new())
}

/// Bracket notation such as `[X1,[X1,X2]]`.
pub fn bracket_string(w: &Word) -> String {
    match standard_factorization(w) {
        None => w.to_string(),
        Some((u, v)) => format!("[{},{}]", bracket_string(&u), bracket_string(&v)),
    }
}

/// An element of `L/L_k` in Lyndon coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LiePoly<S> {
    n: usize,
    k: usize,
    terms: BTreeMap<Word, S>,
}

impl<S: Scalar> LiePoly<S> {
    pub fn zero(n: usize, k: usize) -> Self {
        assert!(n >= 1 && k >= 2, "L/L_k needs n >= 1 and k >= 2");
        LiePoly { n, k, terms: BTreeMap::new() }
    }

    /// `x_{i+1}`.
    pub fn generator(n: usize, k: usize, i: usize) -> Self {
        let mut p = Self::zero(n, k);
        p.add_term(Word::letter(i), S::one());
        p
    }

    pub fn from_terms(n: usize, k: usize, terms: impl IntoIterator<Item = (Word, S)>) -> Result<Self> {
        if n == 0 || k < 2 {
            return Err(Error::Domain(format!("need n >= 1 and k >= 2, got n={n}, k={k}")));
        }
        let mut p = Self::zero(n, k);
        for (w, c) in terms {
            w.check(n, k)?;
            if !is_lyndon(&w) {
                return Err(Error::Domain(format!("{w} is not a Lyndon word")));
            }
            p.add_term(w, c);
        }
        Ok(p)
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

    pub fn coeff(&self, w: &Word) -> S {
        self.terms.get(w).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, w: Word, c: S) {
        if c.is_zero() || w.len() >= self.k {
            return;
        }
        let e = self.terms.entry(w.clone()).or_insert_with(S::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut p = Self::zero(self.n, self.k);
        for (w, c) in &self.terms {
            p.add_term(w.clone(), c.clone() * s.clone());
        }
        p
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if (self.n, self.k) != (other.n, other.k) {
            return Err(Error::Dimension(format!(
                "(n,k) = ({},{}) vs ({},{})",
                self.n, self.k, other.n, other.k
            )));
        }
        let mut p = self.clone();
        for (w, c) in &other.terms {
            p.add_term(w.clone(), c.clone());
        }
        Ok(p)
    }

    pub fn degree_part(&self, m: usize) -> Self {
        let mut p = Self::zero(self.n, self.k);
        for (w, c) in self.terms.iter().filter(|(w, _)| w.len() == m) {
            p.add_term(w.clone(), c.clone());
        }
        p
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    /// `[a, b]`, computed through the tensor embedding.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        let a = self.to_tensor();
        let b = other.to_tensor();
        let c = a.checked_mul(&b)?.checked_sub(&b.checked_mul(&a)?)?;
        tensor_to_lie(&c)
    }

    pub fn to_tensor(&self) -> TruncatedTensor<S> {
        lie_to_tensor(self)
    }
}

impl<S: Scalar> std::ops::Add for &LiePoly<S> {
    type Output = LiePoly<S>;

    fn add(self, rhs: Self) -> LiePoly<S> {
        self.checked_add(rhs).expect("mismatched (n, k)")
    }
}

pub fn lie_to_tensor<S: Scalar>(p: &LiePoly<S>) -> TruncatedTensor<S> {
    let mut memo = HashMap::new();
    let mut t = TruncatedTensor::zero(p.n, p.k);
    for (w, c) in &p.terms {
        for (word, m) in bracket_expansion(w, &mut memo) {
            t.add_term(word, c.clone() * S::from_i64(m));
        }
    }
    t
}

/// Lyndon coordinates of a primitive tensor. Fails with a domain error when
/// `t` is not in the image of [`lie_to_tensor`] (tolerance-bounded on float
/// backends).
pub fn tensor_to_lie<S: Scalar>(t: &TruncatedTensor<S>) -> Result<LiePoly<S>> {
    let tol = S::default_tol() * t.max_abs().max(1.0);
    let mut memo = HashMap::new();
    let mut rest: BTreeMap<Word, S> = t
        .terms()
        .filter(|(_, c)| !c.is_negligible(tol))
        .map(|(w, c)| (w.clone(), c.clone()))
        .collect();
    let mut out = LiePoly::zero(t.n(), t.k());
    // The smallest surviving word is always the leading term of some P_w.
    while let Some((w, c)) = rest.iter().next().map(|(w, c)| (w.clone(), c.clone())) {
        if w.is_empty() || !is_lyndon(&w) {
            return Err(Error::Domain(format!(
                "tensor is not a Lie element: leftover coefficient on {w}"
            )));
        }
        for (word, m) in bracket_expansion(&w, &mut memo) {
            let e = rest.entry(word.clone()).or_insert_with(S::zero);
            *e -= c.clone() * S::from_i64(m);
            if e.is_negligible(tol) {
                rest.remove(&word);
            }
        }
        out.add_term(w, c);
    }
    Ok(out)
}

/// `ω = sum_i [x_{2i-1}, x_{2i}]` on `n = 2g` generators.
pub fn omega<S: Scalar>(g: usize, k: usize) -> Result<LiePoly<S>> {
    if g == 0 {
        return Err(Error::Domain("omega needs g >= 1".into()));
    }
    if k < 3 {
        return Err(Error::Domain(format!("omega vanishes in L/L_{k}; need k >= 3")));
    }
    LiePoly::from_terms(2 * g, k, (0..g).map(|i| (Word::from_letters([2 * i, 2 * i + 1]), S::one())))
}

/// Same as [`omega`] but for any even `n`.
pub fn omega_for_rank<S: Scalar>(n: usize, k: usize) -> Result<LiePoly<S>> {
    if !n.is_multiple_of(2) {
        return Err(Error::Domain(format!("omega needs an even number of generators, got {n}")));
    }
    omega(n / 2, k)
}

/// `h_{g,1}(m)`: the kernel of `[ , ]: H ⊗ L_m → L_{m+1}` (degree-`m` Lie
/// elements, `H` the degree-one part).
#[derive(Debug, Clone)]
pub struct BracketingKernel {
    pub g: usize,
    pub degree: usize,
    /// Domain basis: `x_{i+1} ⊗ P_w`.
    pub domain: Vec<(usize, Word)>,
    /// Kernel basis vectors in domain coordinates.
    pub basis: Vec<Vec<Rational>>,
}

impl BracketingKernel {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The matrix of the bracket map in Lyndon coordinates.
    pub fn bracket_matrix(g: usize, degree: usize) -> (Vec<(usize, Word)>, Matrix<Rational>) {
        let n = 2 * g;
        let k = degree + 2;
        let basis = lyndon_basis(n, k);
        let target = &basis[degree + 1];
        let row_of: HashMap<&Word, usize> = target.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let domain: Vec<(usize, Word)> = (0..n)
            .flat_map(|i| basis[degree].iter().map(move |w| (i, w.clone())))
            .collect();
        let mut m = linalg::zeros::<Rational>(target.len(), domain.len());
        for (col, (i, w)) in domain.iter().enumerate() {
            let x = LiePoly::<Rational>::generator(n, k, *i);
            let p = LiePoly::from_terms(n, k, [(w.clone(), Rational::from_i64(1))]).expect("Lyndon word");
            let b = x.bracket(&p).expect("same (n, k)");
            for (word, c) in b.terms() {
                m[(row_of[word], col)] = c.clone();
            }
        }
        (domain, m)
    }

    /// Whether the element `sum_j x_{i_j} ⊗ f_j` (coordinates over `domain`)
    /// lies in the kernel.
    pub fn contains(&self, coords: &[Rational]) -> bool {
        let (_, m) = Self::bracket_matrix(self.g, self.degree);
        let v = Matrix::from_column_slice(coords.len(), 1, coords);
        linalg::is_zero(&linalg::matmul(&m, &v), 0.0)
    }
}

pub fn bracketing_kernel(g: usize, degree: usize) -> Result<BracketingKernel> {
    if g == 0 || degree == 0 {
        return Err(Error::Domain(format!("need g >= 1 and degree >= 1, got g={g}, degree={degree}")));
    }
    let (domain, m) = BracketingKernel::bracket_matrix(g, degree);
    let basis = linalg::nullspace(&m, 0.0);
    Ok(BracketingKernel { g, degree, domain, basis })
}
