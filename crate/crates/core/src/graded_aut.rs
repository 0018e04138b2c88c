//! Filtered automorphisms of `T/T_k` written as `((u, A)) = ũ ∘ 𝔰(A)`.
//!
//! `𝔰(A)` acts on degree-`j` words by `A^{⊗j}`; `ũ` is the IA automorphism
//! with `ũ(x) = x + sum_m u_m(x)` on degree-one `x`. So the generator images
//! are `Φ(X_j) = A e_j + sum_m u_m(A e_j)`.
//!
//! `u_m: H → H^{⊗m}` is stored as an `n^m × n` matrix: column `j` holds
//! `u_m(X_{j+1})`, rows are indexed by words of length `m` in lexicographic
//! order (first letter most significant).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::free_lie;
use crate::graded_tensor::{degree_offset, total_dim, TruncatedTensor, Word};
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;

/// All compositions of `m` into `parts` positive parts.
pub fn compositions(m: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if m == 0 { vec![vec![]] } else { vec![] };
    }
    if m < parts {
        return vec![];
    }
    let mut out = Vec::new();
    for first in 1..=m - parts + 1 {
        for mut rest in compositions(m - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradedAut<S> {
    n: usize,
    k: usize,
    a: Matrix<S>,
    /// `u[m - 2]` is `u_m`, `m = 2..k`.
    u: Vec<Matrix<S>>,
}

impl<S: Scalar> GradedAut<S> {
    pub fn identity(n: usize, k: usize) -> Self {
        Self::splitting_unchecked(linalg::identity(n), k)
    }

    fn splitting_unchecked(a: Matrix<S>, k: usize) -> Self {
        let n = a.nrows();
        let u = (2..k).map(|m| linalg::zeros(n.pow(m as u32), n)).collect();
        GradedAut { n, k, a, u }
    }

    pub fn new(a: Matrix<S>, u: Vec<Matrix<S>>, k: usize) -> Result<Self> {
        let n = a.nrows();
        if n == 0 || a.ncols() != n {
            return Err(Error::Dimension(format!("A must be square and nonempty, got {}x{}", n, a.ncols())));
        }
        if k < 2 {
            return Err(Error::Domain(format!("k must be >= 2, got {k}")));
        }
        if u.len() != k - 2 {
            return Err(Error::Dimension(format!("expected {} blocks u_2..u_{}, got {}", k - 2, k - 1, u.len())));
        }
        for (i, um) in u.iter().enumerate() {
            let m = i + 2;
            if um.shape() != (n.pow(m as u32), n) {
                return Err(Error::Dimension(format!(
                    "u_{m} must be {}x{n}, got {}x{}",
                    n.pow(m as u32),
                    um.nrows(),
                    um.ncols()
                )));
            }
        }
        linalg::inverse(&a).map_err(|_| Error::Singular("degree-one part A is not invertible".into()))?;
        Ok(GradedAut { n, k, a, u })
    }

    /// `𝔰(A)`.
    pub fn splitting(a: &Matrix<S>, k: usize) -> Result<Self> {
        let n = a.nrows();
        Self::new(a.clone(), (2..k).map(|m| linalg::zeros(n.pow(m as u32), n)).collect(), k)
    }

    /// The unique filtered algebra endomorphism with the given generator
    /// images; fails unless the degree-one parts form an invertible matrix.
    pub fn from_generator_images(images: &[TruncatedTensor<S>]) -> Result<Self> {
        let n = images.len();
        let Some(first) = images.first() else {
            return Err(Error::Dimension("no generator images".into()));
        };
        let k = first.k();
        for (j, img) in images.iter().enumerate() {
            if img.n() != n || img.k() != k {
                return Err(Error::Dimension(format!("image {} lives in the wrong algebra", j + 1)));
            }
            if !img.constant_term().is_zero() {
                return Err(Error::Domain(format!("image of X{} has a constant term", j + 1)));
            }
        }
        let blocks: Vec<Matrix<S>> = (1..k)
            .map(|m| {
                let mut g = linalg::zeros(n.pow(m as u32), n);
                for (j, img) in images.iter().enumerate() {
                    for (r, c) in img.degree_vector(m).into_iter().enumerate() {
                        g[(r, j)] = c;
                    }
                }
                g
            })
            .collect();
        Self::from_generator_blocks(blocks)
    }

    /// From `G_1 = A`, `G_m = u_m A`.
    pub fn from_generator_blocks(blocks: Vec<Matrix<S>>) -> Result<Self> {
        let a = blocks[0].clone();
        let a_inv = linalg::inverse(&a).map_err(|_| Error::Singular("degree-one part is not invertible".into()))?;
        let u = blocks[1..].iter().map(|g| linalg::matmul(g, &a_inv)).collect();
        Self::new(a, u, blocks.len() + 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Degree-one part `p_k(Φ)`.
    pub fn a(&self) -> &Matrix<S> {
        &self.a
    }

    /// `u_m` for `2 <= m < k`.
    pub fn u(&self, m: usize) -> &Matrix<S> {
        &self.u[m - 2]
    }

    pub fn u_blocks(&self) -> &[Matrix<S>] {
        &self.u
    }

    pub fn is_ia(&self) -> bool {
        self.a == linalg::identity(self.n)
    }

    /// `G_1 = A`, `G_m = u_m A` for `m = 2..k`: the degree-`m` parts of the
    /// generator images.
    pub fn generator_blocks(&self) -> Vec<Matrix<S>> {
        std::iter::once(self.a.clone())
            .chain(self.u.iter().map(|um| linalg::matmul(um, &self.a)))
            .collect()
    }

    pub fn generator_image(&self, j: usize) -> TruncatedTensor<S> {
        let mut t = TruncatedTensor::zero(self.n, self.k);
        for (i, g) in self.generator_blocks().iter().enumerate() {
            let col: Vec<S> = g.column(j).iter().cloned().collect();
            t.add_degree_vector(i + 1, &col);
        }
        t
    }

    pub fn generator_images(&self) -> Vec<TruncatedTensor<S>> {
        (0..self.n).map(|j| self.generator_image(j)).collect()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if (self.n, self.k) != (other.n, other.k) {
            return Err(Error::Dimension(format!(
                "(n,k) = ({},{}) vs ({},{})",
                self.n, self.k, other.n, other.k
            )));
        }
        Ok(())
    }

    /// Multiplicative extension of the generator rule.
    pub fn apply(&self, t: &TruncatedTensor<S>) -> Result<TruncatedTensor<S>> {
        if (t.n(), t.k()) != (self.n, self.k) {
            return Err(Error::Dimension(format!(
                "tensor in (n,k) = ({},{}), automorphism in ({},{})",
                t.n(),
                t.k(),
                self.n,
                self.k
            )));
        }
        let images = self.generator_images();
        let mut memo: HashMap<Word, TruncatedTensor<S>> = HashMap::new();
        memo.insert(Word::empty(), TruncatedTensor::one(self.n, self.k));
        let mut out = TruncatedTensor::zero(self.n, self.k);
        for (w, c) in t.terms() {
            let img = word_image(w, &images, &mut memo);
            out = out.checked_add(&img.scale(c))?;
        }
        Ok(out)
    }

    /// The linear block `T^p → T^q` (`q >= p >= 1`), an `n^q × n^p` matrix:
    /// `sum over compositions (c_1..c_p) of q` of `G_{c_1} ⊗ ... ⊗ G_{c_p}`.
    pub fn linear_block(&self, p: usize, q: usize) -> Matrix<S> {
        block_from_generators(&self.generator_blocks(), self.n, p, q)
    }

    /// The whole endomorphism of `T/T_k` in the degree-major word basis.
    pub fn full_matrix(&self) -> Matrix<S> {
        let dim = total_dim(self.n, self.k);
        let mut m = linalg::zeros(dim, dim);
        m[(0, 0)] = S::one();
        let g = self.generator_blocks();
        for p in 1..self.k {
            for q in p..self.k {
                let b = block_from_generators(&g, self.n, p, q);
                m.view_mut((degree_offset(self.n, q), degree_offset(self.n, p)), b.shape())
                    .copy_from(&b);
            }
        }
        m
    }

    /// `Φ ∘ Ψ` via the partition-sum formula: `C = AB` and
    /// `w_m = u_m + sum_{l>=2} sum_{(i_1..i_l) ⊨ m} (ũ_{i_1} ⊗ ... ⊗ ũ_{i_l}) Av_l`
    /// with `ũ_1 = 1`, `Av_l = A^{⊗l} v_l A^{-1}`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let a_inv = linalg::inverse(&self.a)?;
        let av: Vec<Matrix<S>> = (2..self.k)
            .map(|l| gl_action_with_inverse(&self.a, &a_inv, other.u(l), l))
            .collect();
        let w = (2..self.k)
            .map(|m| {
                let mut wm = self.u(m).clone();
                for l in 2..=m {
                    wm += self.u_tensor_sum(m, l, &av[l - 2]);
                }
                wm
            })
            .collect();
        Self::new(linalg::matmul(&self.a, &other.a), w, self.k)
    }

    /// `sum_{(i_1..i_l) ⊨ m} (ũ_{i_1} ⊗ ... ⊗ ũ_{i_l}) x` for `x: H → H^{⊗l}`.
    fn u_tensor_sum(&self, m: usize, l: usize, x: &Matrix<S>) -> Matrix<S> {
        let id: Matrix<S> = linalg::identity(self.n);
        let mut acc = linalg::zeros(self.n.pow(m as u32), x.ncols());
        for comp in compositions(m, l) {
            let factors: Vec<&Matrix<S>> = comp.iter().map(|&i| if i == 1 { &id } else { self.u(i) }).collect();
            acc += linalg::matmul(&linalg::kron_all(&factors), x);
        }
        acc
    }

    pub fn inverse(&self) -> Result<Self> {
        let a_inv = linalg::inverse(&self.a)?;
        // Solve w_m = 0 in the composition formula for Av_m, lowest degree first.
        let mut av: Vec<Matrix<S>> = Vec::new();
        for m in 2..self.k {
            let mut rhs = -self.u(m).clone();
            for l in 2..m {
                rhs -= self.u_tensor_sum(m, l, &av[l - 2]);
            }
            av.push(rhs);
        }
        let v = av
            .iter()
            .enumerate()
            .map(|(i, x)| gl_action_with_inverse(&a_inv, &self.a, x, i + 2))
            .collect();
        Self::new(a_inv, v, self.k)
    }

    /// `Φ = IΦ ∘ 𝔰(A)`; returns `(IΦ, A)`.
    pub fn ia_decompose(&self) -> (Self, Matrix<S>) {
        let ia = GradedAut { n: self.n, k: self.k, a: linalg::identity(self.n), u: self.u.clone() };
        (ia, self.a.clone())
    }

    /// `Φ Ψ Φ^{-1} Ψ^{-1}`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.compose(other)?.compose(&self.inverse()?)?.compose(&other.inverse()?)
    }

    /// Same automorphism on `T/T_{k'}`, `2 <= k' <= k`.
    pub fn project(&self, k: usize) -> Result<Self> {
        if k < 2 || k > self.k {
            return Err(Error::Domain(format!("cannot project level {} to level {k}", self.k)));
        }
        Self::new(self.a.clone(), self.u[..k - 2].to_vec(), k)
    }

    /// Hopf iff every generator image is primitive.
    pub fn is_hopf(&self, tol: f64) -> bool {
        self.generator_images().iter().all(|t| t.is_primitive(tol))
    }

    /// `Φ(ω) = ω` for `ω` on `n = 2g` generators.
    pub fn preserves_omega(&self, tol: f64) -> Result<bool> {
        if self.k < 3 {
            return Err(Error::Domain("omega vanishes below k = 3".into()));
        }
        if !self.is_hopf(tol) {
            return Err(Error::Precondition("preserves_omega needs a Hopf automorphism".into()));
        }
        let w = free_lie::omega_for_rank::<S>(self.n, self.k)?.to_tensor();
        let image = self.apply(&w)?;
        Ok(image.checked_sub(&w)?.is_negligible(tol))
    }

    /// Whether `A` is unipotent: `(A − I)^n = 0` (within `tol` on float
    /// backends, relative to `|A|`).
    pub fn is_unipotent(&self, tol: f64) -> bool {
        is_unipotent_matrix(&self.a, tol)
    }

    /// Max-abs difference of generator images.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .generator_blocks()
            .iter()
            .zip(other.generator_blocks())
            .map(|(x, y)| linalg::max_abs(&(x - y)))
            .fold(0.0, f64::max))
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> GradedAut<T> {
        GradedAut {
            n: self.n,
            k: self.k,
            a: linalg::map(&self.a, f),
            u: self.u.iter().map(|m| linalg::map(m, f)).collect(),
        }
    }
}

pub fn is_unipotent_matrix<S: Scalar>(a: &Matrix<S>, tol: f64) -> bool {
    let n = a.nrows();
    let nil = a - linalg::identity::<S>(n);
    let p = (0..n).fold(linalg::identity::<S>(n), |acc, _| linalg::matmul(&acc, &nil));
    let scale = linalg::max_abs(a).max(1.0).powi(n as i32);
    linalg::is_zero(&p, tol * scale)
}

fn word_image<S: Scalar>(
    w: &Word,
    images: &[TruncatedTensor<S>],
    memo: &mut HashMap<Word, TruncatedTensor<S>>,
) -> TruncatedTensor<S> {
    if let Some(t) = memo.get(w) {
        return t.clone();
    }
    let prefix = w.slice(0, w.len() - 1);
    let head = word_image(&prefix, images, memo);
    let t = head.checked_mul(&images[w.at(w.len() - 1)]).expect("same algebra");
    memo.insert(w.clone(), t.clone());
    t
}

/// `sum over compositions (c_1..c_p) of q` of `G_{c_1} ⊗ ... ⊗ G_{c_p}`.
pub fn block_from_generators<S: Scalar>(g: &[Matrix<S>], n: usize, p: usize, q: usize) -> Matrix<S> {
    let mut acc = linalg::zeros(n.pow(q as u32), n.pow(p as u32));
    for comp in compositions(q, p) {
        if comp.iter().any(|&c| c > g.len()) {
            continue;
        }
        let factors: Vec<&Matrix<S>> = comp.iter().map(|&c| &g[c - 1]).collect();
        acc += linalg::kron_all(&factors);
    }
    acc
}

fn gl_action_with_inverse<S: Scalar>(a: &Matrix<S>, a_inv: &Matrix<S>, f: &Matrix<S>, j: usize) -> Matrix<S> {
    linalg::matmul(&linalg::matmul(&linalg::kron_power(a, j), f), a_inv)
}

/// `(A f)(x) = A^{⊗j} f(A^{-1} x)` for `f: H → H^{⊗j}` given as `n^j × n`.
pub fn gl_action_on_hom<S: Scalar>(a: &Matrix<S>, f: &Matrix<S>) -> Result<Matrix<S>> {
    let n = a.nrows();
    let mut j = 0;
    while n.pow(j as u32) < f.nrows() {
        j += 1;
    }
    if n.pow(j as u32) != f.nrows() || f.ncols() != n {
        return Err(Error::Dimension(format!("{}x{} is not a map H -> H^(x)j for n = {n}", f.nrows(), f.ncols())));
    }
    let a_inv = linalg::inverse(a)?;
    Ok(gl_action_with_inverse(a, &a_inv, f, j))
}

/// The unique filtered automorphism `U` with `U(source_i) = target_i`, for
/// units with constant term 1 whose degree-one parts are invertible.
///
/// Degree by degree: with `t_i = source_i − 1`, `s_i = target_i − 1` and `T_p`,
/// `S_p` their degree-`p` coefficient matrices,
/// `G_m = (S_m − sum_{p>=2} Block_{m←p}(G) T_p) T_1^{-1}`.
pub fn solve_intertwiner<S: Scalar>(source: &[TruncatedTensor<S>], target: &[TruncatedTensor<S>]) -> Result<GradedAut<S>> {
    let n = source.len();
    if n == 0 || target.len() != n {
        return Err(Error::Dimension("source and target need the same positive length".into()));
    }
    let k = source[0].k();
    for x in source.iter().chain(target) {
        if (x.n(), x.k()) != (n, k) {
            return Err(Error::Dimension("images live in different algebras".into()));
        }
        if x.constant_term() != S::one() {
            return Err(Error::Domain("expansion values must have constant term 1".into()));
        }
    }
    let coeffs = |xs: &[TruncatedTensor<S>], m: usize| {
        let mut out = linalg::zeros(n.pow(m as u32), n);
        for (j, x) in xs.iter().enumerate() {
            for (r, c) in x.degree_vector(m).into_iter().enumerate() {
                out[(r, j)] = c;
            }
        }
        out
    };
    let t: Vec<Matrix<S>> = (1..k).map(|m| coeffs(source, m)).collect();
    let s: Vec<Matrix<S>> = (1..k).map(|m| coeffs(target, m)).collect();
    let t1_inv = linalg::inverse(&t[0]).map_err(|_| Error::Domain("source degree-one part is singular".into()))?;
    let mut g: Vec<Matrix<S>> = Vec::new();
    for m in 1..k {
        let mut rhs = s[m - 1].clone();
        for p in 2..=m {
            rhs -= linalg::matmul(&block_from_generators(&g, n, p, m), &t[p - 1]);
        }
        g.push(linalg::matmul(&rhs, &t1_inv));
    }
    GradedAut::from_generator_blocks(g)
}
