//! Moment map, Ricci operator and scalar curvature in bracket coordinates.
//!
//! Norms of brackets count ordered pairs: `|λ|^2 = Σ_{i,j} |λ(X_i, X_j)|^2`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::isotropy::SymOperator;
use crate::lie_core::ReductiveSpace;
use crate::linalg::{self, SparseTensor, Tensor3};

/// Default relative Frobenius tolerance for the Einstein condition.
pub const EINSTEIN_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct CurvaturePack {
    pub moment: SymOperator,
    pub killing_op: SymOperator,
    pub ricci: SymOperator,
    pub scalar: f64,
    pub einstein_residual: f64,
    pub rho: f64,
}

impl CurvaturePack {
    pub fn is_einstein(&self, tol: f64) -> bool {
        self.einstein_residual < tol
    }

    pub fn require_einstein(&self, tol: f64) -> Result<()> {
        if self.is_einstein(tol) {
            Ok(())
        } else {
            Err(Error::NotEinstein {
                residual: self.einstein_residual,
                tol,
            })
        }
    }
}

/// `θ(A)λ = Aλ(·,·) - λ(A·,·) - λ(·,A·)`.
pub fn theta_action(a: &DMatrix<f64>, lam: &Tensor3) -> Tensor3 {
    theta_sparse(a, &lam.nonzeros(0.0), lam.dim())
}

/// `θ(A)λ` for `λ` given by its nonzero entries.
pub fn theta_sparse(a: &DMatrix<f64>, nz: &[(usize, usize, usize, f64)], d: usize) -> Tensor3 {
    // cols[m]: (r, A[r][m]); rows[m]: (x, A[m][x])
    let cols: Vec<Vec<(usize, f64)>> = (0..d)
        .map(|m| (0..d).filter(|&r| a[(r, m)] != 0.0).map(|r| (r, a[(r, m)])).collect())
        .collect();
    let rows: Vec<Vec<(usize, f64)>> = (0..d)
        .map(|m| (0..d).filter(|&x| a[(m, x)] != 0.0).map(|x| (x, a[(m, x)])).collect())
        .collect();
    let mut out = Tensor3::zeros(d);
    for &(i, j, k, v) in nz {
        for &(r, w) in &cols[k] {
            out.add(i, j, r, w * v);
        }
        for &(x, w) in &rows[i] {
            out.add(x, j, k, -w * v);
        }
        for &(x, w) in &rows[j] {
            out.add(i, x, k, -w * v);
        }
    }
    out
}

/// `θ(A)μ_p`, compressed.
pub fn theta_mu(r: &ReductiveSpace, a: &DMatrix<f64>) -> SparseTensor {
    theta_sparse(a, r.mu_nonzeros(), r.p_dim()).compress(0.0)
}

/// `M = -1/2 Σ (ad X_i)^t ad X_i + 1/4 Σ ad X_i (ad X_i)^t` for a bracket
/// given by its nonzero entries.
pub fn moment_from_nonzeros(nz: &[(usize, usize, usize, f64)], d: usize) -> DMatrix<f64> {
    // (ad_i^t ad_i)[j][l] = Σ_k μ[i][j][k] μ[i][l][k]; group by (i, k)
    // (ad_i ad_i^t)[j][l] = Σ_k μ[i][k][j] μ[i][k][l]; group by (i, k = 2nd slot)
    let mut by_ik: Vec<Vec<(usize, f64)>> = vec![Vec::new(); d * d];
    let mut by_ij: Vec<Vec<(usize, f64)>> = vec![Vec::new(); d * d];
    for &(i, j, k, v) in nz {
        by_ik[i * d + k].push((j, v));
        by_ij[i * d + j].push((k, v));
    }
    let mut m = DMatrix::zeros(d, d);
    for list in &by_ik {
        for &(j, v) in list {
            for &(l, w) in list {
                m[(j, l)] -= 0.5 * v * w;
            }
        }
    }
    for list in &by_ij {
        for &(j, v) in list {
            for &(l, w) in list {
                m[(j, l)] += 0.25 * v * w;
            }
        }
    }
    linalg::symmetric_part(&m)
}

pub fn moment_map(r: &ReductiveSpace) -> SymOperator {
    moment_from_nonzeros(r.mu_nonzeros(), r.p_dim())
}

/// Ricci operator, scalar curvature and Einstein residual at the model metric.
pub fn curvature_pack(r: &ReductiveSpace) -> Result<CurvaturePack> {
    let tr = r.algebra().max_trace_ad();
    if tr > 1e-10 * r.algebra().max_abs().max(1.0) {
        return Err(Error::NotUnimodular(tr));
    }
    let d = r.p_dim();
    let moment = moment_map(r);
    let killing_op = r.killing_p().clone();
    let ricci = &moment - &killing_op * 0.5;
    let scalar = -0.25 * r.mu_p().norm_sq() - 0.5 * killing_op.trace();
    let rho = if d == 0 { 0.0 } else { scalar / d as f64 };
    Ok(CurvaturePack {
        einstein_residual: einstein_residual(&ricci, rho),
        moment,
        killing_op,
        ricci,
        scalar,
        rho,
    })
}

/// `|Ric - ρ I|_F / max(1, |Ric|_F)`.
pub fn einstein_residual(ricci: &DMatrix<f64>, rho: f64) -> f64 {
    let d = ricci.nrows();
    let dev = ricci - DMatrix::identity(d, d) * rho;
    dev.norm() / ricci.norm().max(1.0)
}

/// The moved bracket `h·μ = h μ(h^{-1}·, h^{-1}·)` together with the Ricci
/// operator and scalar curvature of the metric it represents.
#[derive(Debug, Clone)]
pub struct MovedCurvature {
    pub bracket: Tensor3,
    pub ricci: SymOperator,
    pub scalar: f64,
}

pub fn moved_curvature(r: &ReductiveSpace, h: &DMatrix<f64>) -> Result<MovedCurvature> {
    let hinv = invert(h)?;
    let nu = move_bracket(r.mu_p(), h, &hinv);
    let d = r.p_dim();
    let moment = moment_from_nonzeros(&nu.nonzeros(0.0), d);
    let kil = &hinv * r.killing_p() * &hinv;
    let ricci = linalg::symmetric_part(&(moment - &kil * 0.5));
    let scalar = -0.25 * nu.norm_sq() - 0.5 * kil.trace();
    Ok(MovedCurvature {
        bracket: nu,
        ricci,
        scalar,
    })
}

fn invert(h: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let scale = linalg::max_abs(h);
    let inv = h.clone().try_inverse().ok_or(Error::SingularH)?;
    if !(scale > 0.0) || !inv.iter().all(|x| x.is_finite()) || linalg::max_abs(&inv) * scale > 1e14 {
        return Err(Error::SingularH);
    }
    Ok(inv)
}

/// `ν[i][j][k] = Σ h[k][c] μ[a][b][c] hinv[a][i] hinv[b][j]`.
pub fn move_bracket(mu: &Tensor3, h: &DMatrix<f64>, hinv: &DMatrix<f64>) -> Tensor3 {
    let d = mu.dim();
    let mut s1 = Tensor3::zeros(d);
    for (a, b, c, v) in mu.nonzeros(0.0) {
        for i in 0..d {
            let w = hinv[(a, i)];
            if w != 0.0 {
                s1.add(i, b, c, w * v);
            }
        }
    }
    let mut s2 = Tensor3::zeros(d);
    for (i, b, c, v) in s1.nonzeros(0.0) {
        for j in 0..d {
            let w = hinv[(b, j)];
            if w != 0.0 {
                s2.add(i, j, c, w * v);
            }
        }
    }
    let mut out = Tensor3::zeros(d);
    for (i, j, c, v) in s2.nonzeros(0.0) {
        for k in 0..d {
            let w = h[(k, c)];
            if w != 0.0 {
                out.add(i, j, k, w * v);
            }
        }
    }
    out
}

/// Derivative of `scal` at `h` in direction `A`: `-2 <Ric_{h·μ}, S(A h^{-1})>`.
pub fn scalar_first_variation(r: &ReductiveSpace, h: &DMatrix<f64>, a: &DMatrix<f64>) -> Result<f64> {
    let hinv = invert(h)?;
    let moved = moved_curvature(r, h)?;
    let s = linalg::symmetric_part(&(a * hinv));
    Ok(-2.0 * linalg::frob(&moved.ricci, &s))
}

/// `<(2ρ - L_p) A, A>` at an Einstein model.
pub fn scalar_second_variation(r: &ReductiveSpace, a: &DMatrix<f64>, einstein_tol: f64) -> Result<f64> {
    let pack = curvature_pack(r)?;
    pack.require_einstein(einstein_tol)?;
    let la = crate::lichnerowicz::lich_quadratic_form(r, &pack.moment, a);
    Ok(2.0 * pack.rho * (a * a).trace() - la)
}
