//! Analytic kernels evaluated on matrices, with Taylor coefficients about an
//! arbitrary centre.

use std::f64::consts::PI;

use crate::scalar::C64;

/// Eigenvalues whose imaginary part is below this (relative) are treated as
/// lying on the real axis, so that `ln` of a negative number is `+iπ`.
pub(crate) const AXIS_SNAP: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    Exp,
    /// Principal branch, `−π < arg ≤ π`.
    Log,
    /// `(1 − e^{−z}) / z`
    Phi1,
    /// `z / (1 − e^{−z})`
    InvPhi1,
    /// `(e^z − 1) / z`
    ExpM1OverZ,
    /// `z / (e^z − 1)`
    BernoulliMinus,
}

fn factorial_series(len: usize, f: impl Fn(usize, f64) -> f64) -> Vec<f64> {
    // f(j, 1/j!)
    let mut inv_fact = 1.0;
    (0..len)
        .map(|j| {
            if j > 0 {
                inv_fact /= j as f64;
            }
            f(j, inv_fact)
        })
        .collect()
}

/// Re-expands `sum a_j z^j` about `sigma`.
fn taylor_shift(a: &[f64], sigma: C64, terms: usize) -> Vec<C64> {
    let mut c: Vec<C64> = a.iter().map(|&x| C64::new(x, 0.0)).collect();
    let d = c.len();
    for i in 0..terms.min(d) {
        for j in (i..d - 1).rev() {
            let next = c[j + 1];
            c[j] += sigma * next;
        }
    }
    c.truncate(terms);
    c
}

/// Coefficients of `g(h) / (sigma + h)`.
fn divide_by_shifted_z(g: &[C64], sigma: C64) -> Vec<C64> {
    let mut out = Vec::with_capacity(g.len());
    let mut prev = C64::new(0.0, 0.0);
    for &gj in g {
        prev = (gj - prev) / sigma;
        out.push(prev);
    }
    out
}

fn reciprocal(p: &[C64]) -> Vec<C64> {
    let mut r: Vec<C64> = Vec::with_capacity(p.len());
    for j in 0..p.len() {
        if j == 0 {
            r.push(p[0].inv());
            continue;
        }
        let s: C64 = (1..=j).map(|i| p[i] * r[j - i]).sum();
        r.push(-s / p[0]);
    }
    r
}

pub(crate) fn principal_ln(z: C64) -> C64 {
    if z.re < 0.0 && z.im.abs() <= AXIS_SNAP * z.norm() {
        C64::new(z.norm().ln(), PI)
    } else {
        z.ln()
    }
}

impl Kernel {
    /// Taylor coefficients `f^{(j)}(sigma)/j!` for `j < terms`.
    pub fn taylor(self, sigma: C64, terms: usize) -> Vec<C64> {
        match self {
            Kernel::Exp => {
                let e = sigma.exp();
                factorial_series(terms, |_, f| f).into_iter().map(|f| e * f).collect()
            }
            Kernel::Log => (0..terms)
                .map(|j| {
                    if j == 0 {
                        principal_ln(sigma)
                    } else {
                        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                        C64::new(sign / j as f64, 0.0) / sigma.powi(j as i32)
                    }
                })
                .collect(),
            Kernel::Phi1 | Kernel::ExpM1OverZ => {
                // (1 - e^{-z})/z = sum (-1)^j z^j/(j+1)!,  (e^z - 1)/z = sum z^j/(j+1)!
                let alternating = self == Kernel::Phi1;
                if sigma.norm() <= 1.0 {
                    let len = terms + 40;
                    let fact = factorial_series(len + 1, |_, f| f);
                    let a: Vec<f64> = (0..len)
                        .map(|j| {
                            let s = if alternating && j % 2 == 1 { -1.0 } else { 1.0 };
                            s * fact[j + 1]
                        })
                        .collect();
                    taylor_shift(&a, sigma, terms)
                } else {
                    // numerator g(h) = ±(1 - e^{∓(sigma+h)}) in powers of h
                    let fact = factorial_series(terms, |_, f| f);
                    let g: Vec<C64> = if alternating {
                        let e = (-sigma).exp();
                        (0..terms)
                            .map(|j| {
                                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                                let v = -e * s * fact[j];
                                if j == 0 {
                                    v + 1.0
                                } else {
                                    v
                                }
                            })
                            .collect()
                    } else {
                        let e = sigma.exp();
                        (0..terms)
                            .map(|j| {
                                let v = e * fact[j];
                                if j == 0 {
                                    v - 1.0
                                } else {
                                    v
                                }
                            })
                            .collect()
                    };
                    divide_by_shifted_z(&g, sigma)
                }
            }
            Kernel::InvPhi1 => reciprocal(&Kernel::Phi1.taylor(sigma, terms)),
            Kernel::BernoulliMinus => reciprocal(&Kernel::ExpM1OverZ.taylor(sigma, terms)),
        }
    }

    pub fn eval(self, z: C64) -> C64 {
        self.taylor(z, 1)[0]
    }

    /// The singular point of the kernel closest to `z`, if any.
    pub fn nearest_pole(self, z: C64) -> Option<C64> {
        match self {
            Kernel::Exp | Kernel::Phi1 | Kernel::ExpM1OverZ => None,
            Kernel::Log => Some(C64::new(0.0, 0.0)),
            Kernel::InvPhi1 | Kernel::BernoulliMinus => {
                let two_pi = 2.0 * PI;
                let j = (z.im / two_pi).round();
                let j = if j == 0.0 {
                    if z.im >= 0.0 {
                        1.0
                    } else {
                        -1.0
                    }
                } else {
                    j
                };
                Some(C64::new(0.0, j * two_pi))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn removable_singularities() {
        let z = C64::new(0.0, 0.0);
        assert!(close(Kernel::Phi1.eval(z), C64::new(1.0, 0.0), 1e-15));
        assert!(close(Kernel::InvPhi1.eval(z), C64::new(1.0, 0.0), 1e-15));
        assert!(close(Kernel::ExpM1OverZ.eval(z), C64::new(1.0, 0.0), 1e-15));
        assert!(close(Kernel::BernoulliMinus.eval(z), C64::new(1.0, 0.0), 1e-15));
    }

    #[test]
    fn closed_forms_on_both_evaluation_paths() {
        for &z in &[C64::new(0.3, -0.2), C64::new(2.5, 1.0), C64::new(-3.0, 0.5), C64::new(0.9, 0.0)] {
            let phi1 = (1.0 - (-z).exp()) / z;
            let em1 = (z.exp() - 1.0) / z;
            assert!(close(Kernel::Phi1.eval(z), phi1, 1e-13), "{z}");
            assert!(close(Kernel::ExpM1OverZ.eval(z), em1, 1e-13), "{z}");
            assert!(close(Kernel::InvPhi1.eval(z), 1.0 / phi1, 1e-13), "{z}");
            assert!(close(Kernel::BernoulliMinus.eval(z), 1.0 / em1, 1e-13), "{z}");
        }
    }

    #[test]
    fn bernoulli_expansions() {
        // z/(1-e^{-z}) = 1 + z/2 + z^2/12 - z^4/720 ...
        let c = Kernel::InvPhi1.taylor(C64::new(0.0, 0.0), 5);
        assert!(close(c[1], C64::new(0.5, 0.0), 1e-15));
        assert!(close(c[2], C64::new(1.0 / 12.0, 0.0), 1e-15));
        assert!(c[3].norm() < 1e-15);
        assert!(close(c[4], C64::new(-1.0 / 720.0, 0.0), 1e-14));
        let c = Kernel::BernoulliMinus.taylor(C64::new(0.0, 0.0), 3);
        assert!(close(c[1], C64::new(-0.5, 0.0), 1e-15));
    }

    #[test]
    fn taylor_coefficients_match_derivatives() {
        // d/dz of (1-e^{-z})/z at sigma, by central difference
        let s = C64::new(1.7, 0.4);
        let h = 1e-5;
        for k in [Kernel::Phi1, Kernel::InvPhi1, Kernel::Log, Kernel::Exp] {
            let d = (k.eval(s + h) - k.eval(s - h)) / (2.0 * h);
            assert!(close(k.taylor(s, 2)[1], d, 1e-8), "{k:?}");
        }
    }

    #[test]
    fn log_snaps_to_upper_branch() {
        let z = C64::new(-2.0, -1e-17);
        assert!(close(Kernel::Log.eval(z), C64::new(2f64.ln(), PI), 1e-15));
    }

    #[test]
    fn poles() {
        let p = Kernel::InvPhi1.nearest_pole(C64::new(0.1, 6.0)).unwrap();
        assert!(close(p, C64::new(0.0, 2.0 * PI), 1e-15));
        let p = Kernel::InvPhi1.nearest_pole(C64::new(0.0, -0.1)).unwrap();
        assert!(close(p, C64::new(0.0, -2.0 * PI), 1e-15));
        assert_eq!(Kernel::Exp.nearest_pole(C64::new(1.0, 0.0)), None);
    }
}
