use serde_json::{json, Value};

use crate::derivation::GradedDerivation;
use crate::error::{Error, Result};
use crate::graded_aut::GradedAut;
use crate::json::{self, Wire};
use crate::linalg::{self, Matrix};
use crate::scalar::C64;
use crate::spectral::{self, Kernel, UnitCircleWitness, Verdict};
use crate::tolerance::{DEFAULT_EXPONENT_BOUND, DEFAULT_TOL, KERNEL_POLE_TOL};

#[derive(Debug, Clone)]
pub struct LogOptions {
    /// Residual tolerance for the round trip.
    pub tol: f64,
    /// Relative distance from a kernel pole below which the solve refuses.
    pub pole_tol: f64,
    /// Proceed on an inconclusive solvability verdict.
    pub force: bool,
    /// Exponent bound of the solvability relation search.
    pub bound: u32,
    /// Initial guess for the higher blocks (its `d_1` is ignored).
    pub seed: Option<GradedDerivation<C64>>,
}

impl Default for LogOptions {
    fn default() -> Self {
        LogOptions { tol: DEFAULT_TOL, pole_tol: KERNEL_POLE_TOL, force: false, bound: DEFAULT_EXPONENT_BOUND, seed: None }
    }
}

/// One step of the degree-by-degree solve.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeTrace {
    pub degree: usize,
    /// Size of the degree-`m` residual before the correction.
    pub residual: f64,
    pub correction: f64,
}

#[derive(Debug, Clone)]
pub struct LogReport {
    /// SHA-256 of the input's canonical JSON.
    pub digest: String,
    pub verdict: Verdict,
    pub witness: Option<UnitCircleWitness>,
    pub forced: bool,
    pub derivation: GradedDerivation<C64>,
    /// `‖exp(D) − Φ‖_∞` over generator images, recomputed after the solve.
    pub residual: f64,
    pub tol: f64,
    /// Set only when the input is Hopf.
    pub hopf_preserved: Option<bool>,
    /// Set only when the input is Hopf and preserves `ω`.
    pub omega_annihilated: Option<bool>,
    pub trace: Vec<DegreeTrace>,
}

impl LogReport {
    pub fn verified(&self) -> bool {
        self.residual <= self.tol && self.hopf_preserved != Some(false) && self.omega_annihilated != Some(false)
    }

    pub fn to_json(&self) -> Value {
        let trace: Vec<Value> = self
            .trace
            .iter()
            .map(|t| json!({ "degree": t.degree, "residual": t.residual, "correction": t.correction }))
            .collect();
        json!({
            "input_digest": self.digest,
            "verdict": self.verdict.to_string(),
            "witness": self.witness.as_ref().map(|w| w.to_string()),
            "forced": self.forced,
            "derivation": self.derivation.to_json(),
            "residual": self.residual,
            "tol": self.tol,
            "verified": self.verified(),
            "hopf_preserved": self.hopf_preserved,
            "omega_annihilated": self.omega_annihilated,
            "trace": trace,
        })
    }
}

/// `ad X` on `Hom(H, H^{⊗m})` for `X` with linear part `l`:
/// `Z ↦ (l acting on H^{⊗m}) Z − Z l`, on column-major `vec Z`.
pub(crate) fn ad_linear(l: &Matrix<C64>, m: usize) -> Matrix<C64> {
    let n = l.nrows();
    let rows = n.pow(m as u32);
    let left = linalg::kron(&linalg::identity(n), &linalg::kron_sum(l, n, m));
    let right = linalg::kron(&l.transpose(), &linalg::identity(rows));
    left - right
}

/// Applies `kernel(ad X)` to a degree-`m` block.
pub(crate) fn apply_kernel(
    kernel: Kernel,
    l: &Matrix<C64>,
    m: usize,
    block: &Matrix<C64>,
    pole_tol: f64,
) -> Result<Matrix<C64>> {
    let f = spectral::matrix_function_tol(kernel, &ad_linear(l, m), pole_tol)?;
    Ok(linalg::unvec(&(f * linalg::vec_of(block)), block.nrows(), block.ncols()))
}

/// The logarithm `D` of `Φ` with `d_1 = ln A` (principal branch) and
/// `exp(D) = Φ`.
///
/// Starting from `X = ln A` (so `exp X = 𝔰(A)`), each degree `m = 2..k` takes
/// the lowest part `r_m` of `exp(D)^{-1} ∘ Φ` and adds `Z_m` with
/// `φ₁(ad X) Z_m = r_m`, `φ₁(z) = (1 − e^{−z})/z`. Since
/// `exp(D + Z_m) = exp(D) ∘ exp(φ₁(ad X) Z_m + higher)`, this clears degree
/// `m` without touching lower degrees.
pub fn ln_aut(phi: &GradedAut<C64>, opts: &LogOptions) -> Result<LogReport> {
    let (n, k) = (phi.n(), phi.k());
    let solv = spectral::eig_unit_circle_obstruction(phi.a(), opts.bound)?;
    match solv.verdict {
        Verdict::NotSolvable => {
            let witness = solv.witness.clone().expect("not_solvable verdicts carry a witness");
            return Err(Error::NotSolvable { witness });
        }
        Verdict::Inconclusive if !opts.force => return Err(Error::Inconclusive { bound: opts.bound }),
        _ => {}
    }

    let x1 = spectral::principal_log(phi.a())?;
    let mut d = match &opts.seed {
        Some(seed) => {
            if (seed.n(), seed.k()) != (n, k) {
                return Err(Error::Dimension("seed derivation has the wrong shape".into()));
            }
            let mut s = seed.clone();
            s.set_block(1, x1.clone());
            s
        }
        None => GradedDerivation::linear(&x1, k)?,
    };

    let mut trace = Vec::new();
    for m in 2..k {
        let rest = d.exp()?.inverse()?.compose(phi)?;
        let r = rest.u(m).clone();
        let z = apply_kernel(Kernel::InvPhi1, &x1, m, &r, opts.pole_tol)?;
        trace.push(DegreeTrace { degree: m, residual: linalg::max_abs(&r), correction: linalg::max_abs(&z) });
        let updated = d.d(m) + z;
        d.set_block(m, updated);
    }

    let residual = d.exp()?.distance(phi)?;
    let hopf_preserved = phi.is_hopf(opts.tol).then(|| d.is_lie(opts.tol));
    let omega_annihilated = if n % 2 == 0 && k >= 3 && hopf_preserved.is_some() && phi.preserves_omega(opts.tol)? {
        Some(d.annihilates_omega(opts.tol)?)
    } else {
        None
    };
    Ok(LogReport {
        digest: json::digest(&phi.to_json()),
        verdict: solv.verdict,
        witness: solv.witness,
        forced: solv.verdict == Verdict::Inconclusive,
        derivation: d,
        residual,
        tol: opts.tol,
        hopf_preserved,
        omega_annihilated,
        trace,
    })
}
