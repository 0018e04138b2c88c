//! `log(e^X e^Y)` for derivations, two ways: the formal series in two
//! non-commuting letters converted to brackets, and the closed form that holds
//! when terms with two or more `Y`s vanish.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};

use super::ln_aut::apply_kernel;
use crate::derivation::GradedDerivation;
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar, C64};
use crate::spectral::Kernel;
use crate::tolerance::KERNEL_POLE_TOL;

/// Letters: `0 = x`, `1 = y`.
type Series = BTreeMap<Vec<u8>, Rational>;
type SeriesCache = Mutex<HashMap<(usize, usize), Arc<Series>>>;

fn y_count(w: &[u8]) -> usize {
    w.iter().filter(|&&l| l == 1).count()
}

fn mul(a: &Series, b: &Series, order: usize, ymax: usize) -> Series {
    let mut out = Series::new();
    for (u, cu) in a {
        for (v, cv) in b {
            if u.len() + v.len() > order || y_count(u) + y_count(v) > ymax {
                continue;
            }
            let mut w = u.clone();
            w.extend_from_slice(v);
            let e = out.entry(w).or_insert_with(Rational::zero);
            *e += cu * cv;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn exp_letter(letter: u8, terms: usize) -> Series {
    let mut s = Series::new();
    let mut coeff = Rational::one();
    for j in 0..=terms {
        if j > 0 {
            coeff /= Rational::from_i64(j as i64);
        }
        s.insert(vec![letter; j], coeff.clone());
    }
    s
}

/// `log(e^x e^y)` up to word length `order`, keeping words with at most
/// `ymax` letters `y`.
fn formal_bch(order: usize, ymax: usize) -> Arc<Series> {
    static CACHE: OnceLock<SeriesCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(s) = cache.lock().expect("cache lock").get(&(order, ymax)) {
        return s.clone();
    }
    let mut p = mul(&exp_letter(0, order), &exp_letter(1, ymax.min(order)), order, ymax);
    p.remove(&Vec::new());
    let mut log = Series::new();
    let mut power = p.clone();
    for j in 1..=order {
        let c = Rational::new(if j % 2 == 1 { 1 } else { -1 }.into(), (j as i64).into());
        for (w, x) in &power {
            let e = log.entry(w.clone()).or_insert_with(Rational::zero);
            *e += x * &c;
        }
        power = mul(&power, &p, order, ymax);
    }
    log.retain(|_, c| !c.is_zero());
    let log = Arc::new(log);
    cache.lock().expect("cache lock").insert((order, ymax), log.clone());
    log
}

#[derive(Debug, Clone)]
pub struct BchResult<S> {
    pub derivation: GradedDerivation<S>,
    pub order: usize,
    /// The omitted terms vanish identically (both arguments IA and
    /// `order >= k − 2`), or the last included order is below tolerance.
    pub certified: bool,
    /// Size of the order-`order` contribution.
    pub tail_estimate: f64,
    pub warning: Option<String>,
}

/// `log(e^X e^Y)` in Dynkin form, so that `exp(result) = exp(X) ∘ exp(Y)`:
/// the degree-`m` part of the formal series `sum c_w w` equals
/// `(1/m) sum c_w [w]` with `[w]` the left-normed bracket.
///
/// `Y` must be IA; then brackets with `k − 1` or more `Y`s vanish.
pub fn bch_series<S: Scalar>(x: &GradedDerivation<S>, y: &GradedDerivation<S>, order: usize) -> Result<BchResult<S>> {
    if (x.n(), x.k()) != (y.n(), y.k()) {
        return Err(Error::Dimension("BCH arguments live in different algebras".into()));
    }
    if !y.is_ia() {
        return Err(Error::Precondition("bch_series needs an IA derivation Y".into()));
    }
    if order == 0 {
        return Err(Error::Domain("BCH order must be positive".into()));
    }
    let k = x.k();
    let series = formal_bch(order, k - 2);

    let letters = [x, y];
    let mut memo: HashMap<Vec<u8>, GradedDerivation<S>> = HashMap::new();
    let mut by_order: Vec<GradedDerivation<S>> = vec![GradedDerivation::zero(x.n(), k); order + 1];
    for (w, c) in series.iter() {
        let bracket = left_normed(w, &letters, &mut memo)?;
        let scaled = bracket.scale(&(S::from_rational(c) * S::ratio(1, w.len() as i64)));
        by_order[w.len()] = by_order[w.len()].checked_add(&scaled)?;
    }
    let mut total = GradedDerivation::zero(x.n(), k);
    for part in &by_order {
        total = total.checked_add(part)?;
    }

    let tail_estimate = by_order[order].max_abs();
    let vanishing = x.is_ia() && order + 2 >= k;
    let small = !S::EXACT && tail_estimate <= S::default_tol() * (1.0 + total.max_abs());
    let certified = vanishing || small;
    let warning = (!certified).then(|| {
        format!("order {order} does not certify the truncation (last order contributes {tail_estimate:e})")
    });
    Ok(BchResult { derivation: total, order, certified, tail_estimate, warning })
}

fn left_normed<S: Scalar>(
    w: &[u8],
    letters: &[&GradedDerivation<S>; 2],
    memo: &mut HashMap<Vec<u8>, GradedDerivation<S>>,
) -> Result<GradedDerivation<S>> {
    if w.len() == 1 {
        return Ok(letters[w[0] as usize].clone());
    }
    if let Some(d) = memo.get(w) {
        return Ok(d.clone());
    }
    let head = left_normed(&w[..w.len() - 1], letters, memo)?;
    let d = head.bracket(letters[w[w.len() - 1] as usize])?;
    memo.insert(w.to_vec(), d.clone());
    Ok(d)
}

/// `log(e^X e^Y) = X + (ad X / (1 − e^{−ad X}))(Y)` at `k = 3`, where
/// everything quadratic in `Y` vanishes. (With the factors the other way
/// round, `log(e^Y e^X)`, the kernel is `z / (e^z − 1)`.)
pub fn bch_single_y_kernel(x: &GradedDerivation<C64>, y: &GradedDerivation<C64>) -> Result<GradedDerivation<C64>> {
    if (x.n(), x.k()) != (y.n(), y.k()) {
        return Err(Error::Dimension("BCH arguments live in different algebras".into()));
    }
    if x.k() != 3 {
        return Err(Error::Precondition("the single-Y closed form needs k = 3".into()));
    }
    if !y.is_ia() {
        return Err(Error::Precondition("the single-Y closed form needs an IA derivation Y".into()));
    }
    let z = apply_kernel(Kernel::InvPhi1, x.d(1), 2, y.d(2), KERNEL_POLE_TOL)?;
    let mut out = x.clone();
    out.set_block(2, x.d(2) + z);
    Ok(out)
}
