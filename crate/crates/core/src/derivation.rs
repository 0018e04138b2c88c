//! Derivations of `T/T_k`, stored by their generator images: `d_m: H → H^{⊗m}`
//! as an `n^m × n` matrix for `m = 1..k` (same layout as `GradedAut::u`).
//! `d_1` is the degree-preserving part; a derivation is IA when `d_1 = 0`.

use crate::error::{Error, Result};
use crate::free_lie::{self, LiePoly};
use crate::graded_aut::GradedAut;
use crate::graded_tensor::{degree_offset, total_dim, TruncatedTensor, Word};
use crate::linalg::{self, Matrix};
use crate::scalar::{Scalar, C64};
use crate::spectral;

#[derive(Debug, Clone, PartialEq)]
pub struct GradedDerivation<S> {
    n: usize,
    k: usize,
    /// `d[m - 1]` is `d_m`.
    d: Vec<Matrix<S>>,
}

impl<S: Scalar> GradedDerivation<S> {
    pub fn zero(n: usize, k: usize) -> Self {
        GradedDerivation { n, k, d: (1..k).map(|m| linalg::zeros(n.pow(m as u32), n)).collect() }
    }

    pub fn new(blocks: Vec<Matrix<S>>, n: usize) -> Result<Self> {
        if n == 0 || blocks.is_empty() {
            return Err(Error::Domain("derivation needs n >= 1 and k >= 2".into()));
        }
        for (i, b) in blocks.iter().enumerate() {
            let m = i + 1;
            if b.shape() != (n.pow(m as u32), n) {
                return Err(Error::Dimension(format!(
                    "d_{m} must be {}x{n}, got {}x{}",
                    n.pow(m as u32),
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        Ok(GradedDerivation { n, k: blocks.len() + 1, d: blocks })
    }

    /// `d_1 = B`, all higher blocks zero.
    pub fn linear(b: &Matrix<S>, k: usize) -> Result<Self> {
        let mut z = Self::zero(b.nrows(), k);
        if !b.is_square() {
            return Err(Error::Dimension("d_1 must be square".into()));
        }
        z.d[0] = b.clone();
        Ok(z)
    }

    /// The unique derivation with `D(X_j) = images[j]`.
    pub fn extend(images: &[TruncatedTensor<S>]) -> Result<Self> {
        let n = images.len();
        let Some(first) = images.first() else {
            return Err(Error::Dimension("no generator images".into()));
        };
        let k = first.k();
        for (j, img) in images.iter().enumerate() {
            if (img.n(), img.k()) != (n, k) {
                return Err(Error::Dimension(format!("image {} lives in the wrong algebra", j + 1)));
            }
            if !img.constant_term().is_zero() {
                return Err(Error::Domain(format!("image of X{} has a constant term", j + 1)));
            }
        }
        let blocks = (1..k)
            .map(|m| {
                let mut b = linalg::zeros(n.pow(m as u32), n);
                for (j, img) in images.iter().enumerate() {
                    for (r, c) in img.degree_vector(m).into_iter().enumerate() {
                        b[(r, j)] = c;
                    }
                }
                b
            })
            .collect();
        Self::new(blocks, n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `d_m` for `1 <= m < k`.
    pub fn d(&self, m: usize) -> &Matrix<S> {
        &self.d[m - 1]
    }

    pub fn blocks(&self) -> &[Matrix<S>] {
        &self.d
    }

    pub fn set_block(&mut self, m: usize, b: Matrix<S>) {
        assert_eq!(b.shape(), self.d[m - 1].shape(), "d_{m} has the wrong shape");
        self.d[m - 1] = b;
    }

    pub fn is_ia(&self) -> bool {
        linalg::is_zero(&self.d[0], 0.0)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.d.iter().all(|b| linalg::is_zero(b, tol))
    }

    pub fn generator_image(&self, j: usize) -> TruncatedTensor<S> {
        let mut t = TruncatedTensor::zero(self.n, self.k);
        for (i, b) in self.d.iter().enumerate() {
            let col: Vec<S> = b.column(j).iter().cloned().collect();
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

    /// Leibniz extension: `D(x_1...x_m) = sum_i x_1..D(x_i)..x_m`.
    pub fn apply(&self, t: &TruncatedTensor<S>) -> Result<TruncatedTensor<S>> {
        if (t.n(), t.k()) != (self.n, self.k) {
            return Err(Error::Dimension("tensor and derivation live in different algebras".into()));
        }
        let images = self.generator_images();
        let mut out = TruncatedTensor::zero(self.n, self.k);
        for (w, c) in t.terms() {
            for pos in 0..w.len() {
                let left = TruncatedTensor::monomial(self.n, self.k, w.slice(0, pos), c.clone());
                let right = TruncatedTensor::monomial(self.n, self.k, w.slice(pos + 1, w.len()), S::one());
                let term = left.checked_mul(&images[w.at(pos)])?.checked_mul(&right)?;
                out = out.checked_add(&term)?;
            }
        }
        Ok(out)
    }

    /// The block `T^p → T^q`: `sum_r I^{⊗r} ⊗ d_{q-p+1} ⊗ I^{⊗(p-1-r)}`.
    pub fn linear_block(&self, p: usize, q: usize) -> Matrix<S> {
        linalg::kron_sum(self.d(q - p + 1), self.n, p)
    }

    /// The endomorphism of `T/T_k` in the degree-major word basis.
    pub fn full_matrix(&self) -> Matrix<S> {
        let dim = total_dim(self.n, self.k);
        let mut m = linalg::zeros(dim, dim);
        for p in 1..self.k {
            for q in p..self.k {
                let b = self.linear_block(p, q);
                m.view_mut((degree_offset(self.n, q), degree_offset(self.n, p)), b.shape())
                    .copy_from(&b);
            }
        }
        m
    }

    pub fn scale(&self, s: &S) -> Self {
        GradedDerivation { n: self.n, k: self.k, d: self.d.iter().map(|b| b * s.clone()).collect() }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(GradedDerivation { n: self.n, k: self.k, d: self.d.iter().zip(&other.d).map(|(a, b)| a + b).collect() })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(GradedDerivation { n: self.n, k: self.k, d: self.d.iter().zip(&other.d).map(|(a, b)| a - b).collect() })
    }

    /// `[D, E] = D∘E − E∘D`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let images: Result<Vec<_>> = (0..self.n)
            .map(|j| {
                let de = self.apply(&other.generator_image(j))?;
                let ed = other.apply(&self.generator_image(j))?;
                de.checked_sub(&ed)
            })
            .collect();
        Self::extend(&images?)
    }

    pub fn max_abs(&self) -> f64 {
        self.d.iter().map(linalg::max_abs).fold(0.0, f64::max)
    }

    /// Max-abs difference of generator images.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.checked_sub(other)?.max_abs())
    }

    /// Nilpotency of `d_1` (exactly on the rational backend).
    pub fn is_nilpotent_linear_part(&self, tol: f64) -> bool {
        let n = self.n;
        let p = (0..n).fold(linalg::identity::<S>(n), |acc, _| linalg::matmul(&acc, &self.d[0]));
        linalg::is_zero(&p, tol * linalg::max_abs(&self.d[0]).max(1.0).powi(n as i32))
    }

    /// Restriction of the endomorphism to degrees `1..k` (the constant
    /// term is killed by every derivation).
    pub fn restricted_matrix(&self) -> Matrix<S> {
        let dim = total_dim(self.n, self.k) - 1;
        self.full_matrix().view((1, 1), (dim, dim)).into_owned()
    }

    fn blocks_from_columns(&self, cols: &Matrix<S>) -> Vec<Matrix<S>> {
        (1..self.k)
            .map(|m| {
                let off = degree_offset(self.n, m) - 1;
                cols.view((off, 0), (self.n.pow(m as u32), self.n)).into_owned()
            })
            .collect()
    }

    /// `sum_j D^j(X_i) / j!` for every generator, stopping at the first zero
    /// term; `None` if that does not happen within `max_terms`.
    fn exp_series(&self, max_terms: usize) -> Option<Vec<Matrix<S>>> {
        let f = self.restricted_matrix();
        let dim = f.nrows();
        let mut term = Matrix::from_fn(dim, self.n, |r, c| if r == c { S::one() } else { S::zero() });
        let mut sum = term.clone();
        for i in 1..=max_terms {
            term = linalg::matmul(&f, &term) * S::ratio(1, i as i64);
            if linalg::is_zero(&term, 0.0) {
                return Some(self.blocks_from_columns(&sum));
            }
            sum += &term;
        }
        None
    }

    /// `exp(D) = sum D^j/j!` as a filtered automorphism.
    ///
    /// IA derivations and, on the exact backend, derivations with nilpotent
    /// `d_1` use the terminating series on generators. Otherwise the map is
    /// restricted to degrees `1..k` (block lower-triangular) and exponentiated
    /// as a complex matrix; the generator columns give the automorphism.
    pub fn exp(&self) -> Result<GradedAut<S>> {
        if self.is_ia() || S::EXACT {
            // With d_1 nilpotent, D is nilpotent on each degree p with index
            // at most p(n-1)+1, which bounds the number of nonzero terms.
            let bound = (1..self.k).map(|p| p * (self.n - 1) + 1).sum::<usize>() + 1;
            return match self.exp_series(bound) {
                Some(blocks) => GradedAut::from_generator_blocks(blocks),
                None => Err(Error::Unsupported(
                    "exact exponential needs a nilpotent degree-one part; use the complex backend".into(),
                )),
            };
        }
        let e = spectral::matrix_exp(&linalg::to_complex(&self.restricted_matrix()));
        let mut cols = linalg::zeros::<S>(e.nrows(), self.n);
        for r in 0..e.nrows() {
            for c in 0..self.n {
                cols[(r, c)] = S::from_complex(e[(r, c)])
                    .ok_or_else(|| Error::Domain("exponential is not representable on this backend".into()))?;
            }
        }
        GradedAut::from_generator_blocks(self.blocks_from_columns(&cols))
    }

    /// Whether `D(ω) = 0` for `ω` on `n = 2g` generators.
    pub fn annihilates_omega(&self, tol: f64) -> Result<bool> {
        if self.k < 3 {
            return Err(Error::Domain("omega vanishes below k = 3".into()));
        }
        let w = free_lie::omega_for_rank::<S>(self.n, self.k)?.to_tensor();
        Ok(self.apply(&w)?.is_negligible(tol))
    }

    /// Whether every generator image is primitive (a Lie derivation).
    pub fn is_lie(&self, tol: f64) -> bool {
        self.generator_images().iter().all(|t| t.is_primitive(tol))
    }

    /// `ad(z)`: `x ↦ zx − xz`.
    pub fn inner(z: &LiePoly<S>) -> Result<Self> {
        let t = z.to_tensor();
        let images: Result<Vec<_>> = (0..z.n())
            .map(|j| {
                let x = TruncatedTensor::generator(z.n(), z.k(), j);
                t.checked_mul(&x)?.checked_sub(&x.checked_mul(&t)?)
            })
            .collect();
        Self::extend(&images?)
    }

    /// For `d_m` Lie-valued, the Poincaré dual `sum_i x_i ⊗ f_i ∈ H ⊗ L_m`
    /// under `H ≅ H^*`, `a ↦ ω(a, ·)`: pairs `(i, f_i)`.
    pub fn poincare_dual(&self, m: usize) -> Result<Vec<(usize, LiePoly<S>)>> {
        if !self.n.is_multiple_of(2) {
            return Err(Error::Domain("Poincaré duality needs an even number of generators".into()));
        }
        let image = |j: usize| -> Result<LiePoly<S>> {
            let col: Vec<S> = self.d(m).column(j).iter().cloned().collect();
            let mut t = TruncatedTensor::zero(self.n, m + 2);
            t.add_degree_vector(m, &col);
            free_lie::tensor_to_lie(&t)
        };
        let mut out = Vec::new();
        for i in 0..self.n / 2 {
            let (odd, even) = (2 * i, 2 * i + 1);
            out.push((odd, image(even)?));
            out.push((even, image(odd)?.scale(&-S::one())));
        }
        Ok(out)
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> GradedDerivation<T> {
        GradedDerivation { n: self.n, k: self.k, d: self.d.iter().map(|b| linalg::map(b, f)).collect() }
    }

    /// Checks `D(xy) = D(x)y + xD(y)` on all pairs of words with total length
    /// below `k`, for the linear map `f` claimed to be this derivation.
    pub fn leibniz_defect(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for a in 1..self.k {
            for b in 1..self.k - a {
                for u in Word::all_of_length(self.n, a) {
                    for v in Word::all_of_length(self.n, b) {
                        let tu = TruncatedTensor::monomial(self.n, self.k, u.clone(), S::one());
                        let tv = TruncatedTensor::monomial(self.n, self.k, v.clone(), S::one());
                        let lhs = self.apply(&tu.checked_mul(&tv)?)?;
                        let rhs = self.apply(&tu)?.checked_mul(&tv)?.checked_add(&tu.checked_mul(&self.apply(&tv)?)?)?;
                        worst = worst.max(lhs.checked_sub(&rhs)?.max_abs());
                    }
                }
            }
        }
        Ok(worst)
    }
}

/// `X − e^{−Y} X e^{Y}`, computed once by conjugating linear maps and once by
/// the bracket series `X − sum_{j>=0} [..[X,Y]..,Y]/j!`; the two must agree.
pub fn conjugation_defect<S: Scalar>(x: &GradedDerivation<S>, y: &GradedDerivation<S>) -> Result<GradedDerivation<S>> {
    x.check_compatible(y)?;
    if !y.is_ia() {
        return Err(Error::Unsupported("conjugation_defect needs an IA derivation Y".into()));
    }
    let e_pos = y.exp()?.full_matrix();
    let e_neg = y.scale(&-S::one()).exp()?.full_matrix();
    let conj = linalg::matmul(&linalg::matmul(&e_neg, &x.full_matrix()), &e_pos);
    let n = x.n;
    let blocks = (1..x.k)
        .map(|m| {
            let rows = n.pow(m as u32);
            let off = degree_offset(n, m);
            Matrix::from_fn(rows, n, |r, c| conj[(off + r, 1 + c)].clone())
        })
        .collect();
    let via_matrices = x.checked_sub(&GradedDerivation::new(blocks, n)?)?;

    let mut series = GradedDerivation::zero(n, x.k);
    let mut term = x.clone();
    for j in 0..x.k {
        if j > 0 {
            term = term.bracket(y)?.scale(&S::ratio(1, j as i64));
        }
        if term.is_zero(0.0) {
            break;
        }
        series = series.checked_add(&term)?;
    }
    let via_brackets = x.checked_sub(&series)?;
    let gap = via_matrices.distance(&via_brackets)?;
    let tol = S::default_tol() * (1.0 + x.max_abs()) * (1.0 + y.max_abs()).powi(x.k as i32);
    if (S::EXACT && via_matrices != via_brackets) || gap > tol {
        return Err(Error::Verification(format!("conjugation paths disagree by {gap:e}")));
    }
    Ok(via_brackets)
}

/// The principal-log derivation of a complex matrix: `d_1 = ln A`.
pub fn base_derivation(a: &Matrix<C64>, k: usize) -> Result<GradedDerivation<C64>> {
    GradedDerivation::linear(&spectral::principal_log(a)?, k)
}
