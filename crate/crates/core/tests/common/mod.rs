//! Independent oracles shared by the integration suites.

#![allow(dead_code)]

use einstab::isotropy::InvariantSubspace;
use einstab::lie_core::ReductiveSpace;
use einstab::linalg::{self, Tensor3};
use nalgebra::DMatrix;

/// Scalar curvature of `<e^{tA} ., e^{tA} .>` from the bracket directly:
/// in an eigenbasis of `A` the moved bracket is `e^{t(λk - λi - λj)} μ`.
pub struct ExpPath {
    lambda: Vec<f64>,
    mu_sq: Vec<(usize, usize, usize, f64)>,
    kil_diag: Vec<f64>,
}

impl ExpPath {
    pub fn new(r: &ReductiveSpace, a: &DMatrix<f64>) -> Self {
        let d = r.p_dim();
        let off = (0..d)
            .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
            .fold(0.0f64, |m, (i, j)| m.max(a[(i, j)].abs()));
        let (lambda, mu, kil) = if off == 0.0 {
            ((0..d).map(|i| a[(i, i)]).collect(), r.mu_p().clone(), r.killing_p().clone())
        } else {
            let (vals, v) = linalg::eigh(a);
            (vals, rotate(r.mu_p(), &v), v.transpose() * r.killing_p() * &v)
        };
        let mut mu_sq = Vec::new();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let x = mu.get(i, j, k);
                    if x != 0.0 {
                        mu_sq.push((i, j, k, x * x));
                    }
                }
            }
        }
        Self {
            lambda,
            mu_sq,
            kil_diag: (0..d).map(|i| kil[(i, i)]).collect(),
        }
    }

    pub fn scal(&self, t: f64) -> f64 {
        let l = &self.lambda;
        let bracket: f64 = self
            .mu_sq
            .iter()
            .map(|&(i, j, k, s)| (2.0 * t * (l[k] - l[i] - l[j])).exp() * s)
            .sum();
        let kil: f64 = self
            .kil_diag
            .iter()
            .zip(l)
            .map(|(b, li)| b * (-2.0 * t * li).exp())
            .sum();
        -0.25 * bracket - 0.5 * kil
    }

    /// Fourth-order central difference of `scal` at `t = 0`.
    pub fn second_derivative(&self, h: f64) -> f64 {
        let f = |t: f64| self.scal(t);
        (-f(2.0 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2.0 * h)) / (12.0 * h * h)
    }
}

/// `μ'(i,j,k) = Σ μ(a,b,c) V_ai V_bj V_ck`, written out without the library
/// helper.
pub fn rotate(mu: &Tensor3, v: &DMatrix<f64>) -> Tensor3 {
    let d = mu.dim();
    let mut s1 = vec![0.0; d * d * d];
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                let x = mu.get(a, b, c);
                if x == 0.0 {
                    continue;
                }
                for k in 0..d {
                    s1[(a * d + b) * d + k] += x * v[(c, k)];
                }
            }
        }
    }
    let mut s2 = vec![0.0; d * d * d];
    for a in 0..d {
        for b in 0..d {
            for k in 0..d {
                let x = s1[(a * d + b) * d + k];
                if x == 0.0 {
                    continue;
                }
                for j in 0..d {
                    s2[(a * d + j) * d + k] += x * v[(b, j)];
                }
            }
        }
    }
    let mut out = Tensor3::zeros(d);
    for a in 0..d {
        for j in 0..d {
            for k in 0..d {
                let x = s2[(a * d + j) * d + k];
                if x == 0.0 {
                    continue;
                }
                for i in 0..d {
                    out.add(i, j, k, x * v[(a, i)]);
                }
            }
        }
    }
    out
}

/// `θ(A)λ(i,j,r) = Σ_m A_rm λ_ijm - A_mi λ_mjr - A_mj λ_imr`, dense loops.
pub fn theta_dense(a: &DMatrix<f64>, lam: &Tensor3) -> Tensor3 {
    let d = lam.dim();
    let mut out = Tensor3::zeros(d);
    for i in 0..d {
        for j in 0..d {
            for r in 0..d {
                let mut s = 0.0;
                for m in 0..d {
                    s += a[(r, m)] * lam.get(i, j, m) - a[(m, i)] * lam.get(m, j, r) - a[(m, j)] * lam.get(i, m, r);
                }
                out.set(i, j, r, s);
            }
        }
    }
    out
}

/// Random unit-norm element of an invariant subspace.
pub fn random_element(s: &InvariantSubspace, rng: &mut impl rand::Rng) -> DMatrix<f64> {
    let coeffs: Vec<f64> = (0..s.dim()).map(|_| linalg::gaussian(rng)).collect();
    let a = s.combine(&coeffs);
    let n = a.norm();
    a / n
}

pub fn frob(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Closed-form flag-family data recomputed from `n`, `k`: `(c/d, 2ρ, sorted
/// spectrum on W)`.
pub fn family_closed(family: &str, n: usize, k: usize) -> (f64, f64, Vec<f64>) {
    let (nf, kf) = (n as f64, k as f64);
    let c = match family {
        "su" => 1.0 / (2.0 * nf),
        "sp" => kf / (2.0 * (nf * kf + 1.0)),
        "so" => kf / (2.0 * (nf * kf - 2.0)),
        _ => unreachable!(),
    };
    let two_rho = 1.0 - c * (nf - 2.0);
    let mut spec = Vec::new();
    if n == 3 {
        spec.extend([3.0 * c; 2]);
    } else {
        spec.extend(std::iter::repeat_n(nf * c, n - 1));
        spec.extend(std::iter::repeat_n(2.0 * (nf - 1.0) * c, n * (n - 3) / 2));
    }
    spec.sort_by(f64::total_cmp);
    (c, two_rho, spec)
}
