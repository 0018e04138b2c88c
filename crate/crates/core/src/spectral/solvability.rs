//! The exponential-solvability predicate: does the multiplicative group
//! generated by `Eig(A)` and its conjugates meet the unit circle only at 1?

use std::fmt;

use nalgebra::DMatrix;

use super::SpectralData;
use crate::error::Result;
use crate::scalar::C64;
use crate::tolerance::RELATION_TOL;

/// Tolerance on imaginary parts / unit moduli of eigenvalues.
const EIG_TOL: f64 = 1e-9;

/// Largest number of distinct real moduli the relation search enumerates.
const MAX_SEARCH_RANK: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Solvable,
    NotSolvable,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Solvable => "solvable",
            Verdict::NotSolvable => "not_solvable",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// A product `prod λ_i^{a_i}` of eigenvalues (or their conjugates) lying on
/// the unit circle but different from 1.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitCircleWitness {
    pub factors: Vec<(C64, i32)>,
    pub product: C64,
}

impl fmt::Display for UnitCircleWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(l, a)| format!("({:.6}{:+.6}i)^{a}", l.re, l.im))
            .collect();
        write!(f, "{} = {:.6}{:+.6}i on the unit circle", parts.join(" * "), self.product.re, self.product.im)
    }
}

#[derive(Debug, Clone)]
pub struct SolvabilityReport {
    pub verdict: Verdict,
    pub eigenvalues: Vec<C64>,
    pub witness: Option<UnitCircleWitness>,
    pub bound: u32,
}

fn witness(factors: Vec<(C64, i32)>) -> UnitCircleWitness {
    let product = factors.iter().fold(C64::new(1.0, 0.0), |acc, (l, a)| acc * l.powi(*a));
    UnitCircleWitness { factors, product }
}

/// Searches `a ∈ [−B, B]^r \ {0}` for `|sum a_i ln|λ_i|| <= tol`; returns the
/// first relation with odd total exponent on the negative eigenvalues, and
/// whether any relation was seen at all.
fn relation_search(vals: &[f64], bound: i32) -> (Option<Vec<i32>>, bool) {
    let r = vals.len();
    let logs: Vec<f64> = vals.iter().map(|v| v.abs().ln()).collect();
    let scale = logs.iter().fold(1.0f64, |m, l| m.max(l.abs())) * bound as f64;
    let mut a = vec![-bound; r];
    let mut any = false;
    loop {
        if a.iter().any(|&x| x != 0) {
            let s: f64 = a.iter().zip(&logs).map(|(&ai, l)| ai as f64 * l).sum();
            if s.abs() <= RELATION_TOL * scale {
                any = true;
                let odd: i32 = a.iter().zip(vals).filter(|(_, v)| **v < 0.0).map(|(ai, _)| ai).sum();
                if odd % 2 != 0 {
                    return (Some(a), true);
                }
            }
        }
        let mut i = 0;
        loop {
            if i == r {
                return (None, any);
            }
            a[i] += 1;
            if a[i] <= bound {
                break;
            }
            a[i] = -bound;
            i += 1;
        }
    }
}

/// Three-valued test of exponential solvability for invertible `A`.
pub fn eig_unit_circle_obstruction(a: &DMatrix<C64>, bound: u32) -> Result<SolvabilityReport> {
    let spec = SpectralData::new(a)?;
    spec.require_invertible()?;
    let eigs: Vec<C64> = spec
        .clusters
        .iter()
        .flat_map(|c| std::iter::repeat_n(c.eigenvalue, c.multiplicity))
        .collect();
    let report = |verdict, witness| Ok(SolvabilityReport { verdict, eigenvalues: eigs.clone(), witness, bound });

    for c in &spec.clusters {
        let l = c.eigenvalue;
        if l.im.abs() > EIG_TOL * l.norm().max(1.0) {
            return report(Verdict::NotSolvable, Some(witness(vec![(l, 1), (l.conj(), -1)])));
        }
    }
    let mut reals: Vec<f64> = Vec::new();
    for c in &spec.clusters {
        let x = c.eigenvalue.re;
        if (x + 1.0).abs() <= EIG_TOL {
            return report(Verdict::NotSolvable, Some(witness(vec![(C64::new(x, 0.0), 1)])));
        }
        if (x - 1.0).abs() <= EIG_TOL {
            continue;
        }
        if !reals.iter().any(|&y| (y - x).abs() <= EIG_TOL * x.abs().max(1.0)) {
            reals.push(x);
        }
    }
    if reals.iter().all(|&x| x > 0.0) {
        return report(Verdict::Solvable, None);
    }
    for (i, &x) in reals.iter().enumerate() {
        for &y in &reals[i + 1..] {
            if x * y < 0.0 && (x.abs() - y.abs()).abs() <= EIG_TOL * x.abs().max(1.0) {
                let w = witness(vec![(C64::new(x, 0.0), 1), (C64::new(y, 0.0), -1)]);
                return report(Verdict::NotSolvable, Some(w));
            }
        }
    }
    if reals.len() > MAX_SEARCH_RANK {
        return report(Verdict::Inconclusive, None);
    }
    match relation_search(&reals, bound as i32) {
        (Some(exps), _) => {
            let factors = reals
                .iter()
                .zip(exps)
                .filter(|(_, e)| *e != 0)
                .map(|(&x, e)| (C64::new(x, 0.0), e))
                .collect();
            report(Verdict::NotSolvable, Some(witness(factors)))
        }
        (None, false) => report(Verdict::Solvable, None),
        (None, true) => report(Verdict::Inconclusive, None),
    }
}
