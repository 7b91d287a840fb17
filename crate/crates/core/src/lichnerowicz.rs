//! The operator `L_p` on invariant symmetric operators, assembled three ways,
//! and the Casimir operator on `sym(g)`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{moment_map, theta_mu, theta_sparse};
use crate::error::{Error, Result};
use crate::isotropy::{InvariantSubspace, IsotropyDecomposition, SubspaceLabel};
use crate::lie_core::{reductive_split, BilinearForm, ReductiveSpace, StructureTensor};
use crate::linalg::{self, Tensor3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    General,
    NaturallyReductive,
    StructuralConstants,
    Casimir,
}

/// Matrix of an operator on `sym(p)` in an orthonormal basis.
#[derive(Debug, Clone)]
pub struct LichnerowiczMatrix {
    pub basis: InvariantSubspace,
    pub matrix: DMatrix<f64>,
    pub method: Method,
}

impl LichnerowiczMatrix {
    pub fn asymmetry(&self) -> f64 {
        linalg::asymmetry(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigh(&self.matrix).0
    }
}

/// `<L_p A, A> = 1/2 |θ(A)μ_p|^2 + 2 tr(M A^2)`.
pub fn lich_quadratic_form(r: &ReductiveSpace, moment: &DMatrix<f64>, a: &DMatrix<f64>) -> f64 {
    0.5 * theta_mu(r, a).norm_sq() + 2.0 * (moment * a * a).trace()
}

/// Matrix of `L_p` by polarization of its quadratic form.
pub fn lich_general(r: &ReductiveSpace, s: &InvariantSubspace) -> LichnerowiczMatrix {
    let m = moment_map(r);
    let thetas: Vec<_> = s.basis.par_iter().map(|a| theta_mu(r, a)).collect();
    let n = s.dim();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let ab = &s.basis[i] * &s.basis[j];
            let v = 0.5 * thetas[i].dot(&thetas[j]) + 2.0 * (&m * ab).trace();
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    LichnerowiczMatrix {
        basis: s.clone(),
        matrix: out,
        method: Method::General,
    }
}

/// `L_p A = 1/2 S(Φ(θ(A)μ_p)) + A M + M A`, where `Φ` is the adjoint of
/// `B ↦ θ(B)μ_p` for the tensor inner product.
pub fn lich_apply(r: &ReductiveSpace, moment: &DMatrix<f64>, a: &DMatrix<f64>) -> DMatrix<f64> {
    let d = r.p_dim();
    let lam = theta_sparse(a, r.mu_nonzeros(), d);
    let phi = theta_adjoint(r, &lam);
    linalg::symmetric_part(&phi) * 0.5 + a * moment + moment * a
}

/// `Φ(λ)` with `<Φ(λ), B> = <λ, θ(B)μ_p>`.
fn theta_adjoint(r: &ReductiveSpace, lam: &Tensor3) -> DMatrix<f64> {
    let d = r.p_dim();
    let mut by_ij: Vec<Vec<(usize, f64)>> = vec![Vec::new(); d * d];
    let mut by_jk: Vec<Vec<(usize, f64)>> = vec![Vec::new(); d * d];
    let mut by_ik: Vec<Vec<(usize, f64)>> = vec![Vec::new(); d * d];
    for &(i, j, k, v) in r.mu_nonzeros() {
        by_ij[i * d + j].push((k, v));
        by_jk[j * d + k].push((i, v));
        by_ik[i * d + k].push((j, v));
    }
    let mut phi = DMatrix::zeros(d, d);
    for (a, b, c, w) in lam.nonzeros(0.0) {
        for &(s, v) in &by_ij[a * d + b] {
            phi[(c, s)] += w * v;
        }
        for &(r, v) in &by_jk[b * d + c] {
            phi[(r, a)] -= w * v;
        }
        for &(r, v) in &by_ik[a * d + c] {
            phi[(r, b)] -= w * v;
        }
    }
    phi
}

/// Sparse `ad_p X_i` as `(row, col, value)` lists.
fn sparse_ads(r: &ReductiveSpace) -> Vec<Vec<(usize, usize, f64)>> {
    let mut out = vec![Vec::new(); r.p_dim()];
    for &(i, j, k, v) in r.mu_nonzeros() {
        out[i].push((k, j, v));
    }
    out
}

/// Naturally reductive form: `L A = -1/2 Σ [ad X_i, [ad X_i, A]]`.
pub struct NrOperator {
    ads: Vec<Vec<(usize, usize, f64)>>,
    casimir: DMatrix<f64>,
}

impl NrOperator {
    pub fn new(r: &ReductiveSpace) -> Result<Self> {
        let res = r.nr_residual();
        if res > 1e-8 * r.algebra().max_abs().max(1.0) {
            return Err(Error::NotNaturallyReductive(res));
        }
        let d = r.p_dim();
        let ads = sparse_ads(r);
        let mut casimir = DMatrix::zeros(d, d);
        for ad in &ads {
            casimir += sparse_mul_dense(ad, &sparse_to_dense(ad, d));
        }
        Ok(Self { ads, casimir })
    }

    pub fn apply(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = -(&self.casimir * a + a * &self.casimir) * 0.5;
        for ad in &self.ads {
            // ad A ad
            let t = dense_mul_sparse(a, ad);
            out += sparse_mul_dense(ad, &t);
        }
        linalg::symmetric_part(&out)
    }
}

fn sparse_to_dense(s: &[(usize, usize, f64)], d: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(d, d);
    for &(r, c, v) in s {
        m[(r, c)] += v;
    }
    m
}

fn sparse_mul_dense(s: &[(usize, usize, f64)], b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(b.nrows(), b.ncols());
    for &(r, k, v) in s {
        for c in 0..b.ncols() {
            out[(r, c)] += v * b[(k, c)];
        }
    }
    out
}

fn dense_mul_sparse(a: &DMatrix<f64>, s: &[(usize, usize, f64)]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a.nrows(), a.ncols());
    for &(l, c, v) in s {
        let col = a.column(l) * v;
        let mut dst = out.column_mut(c);
        dst += col;
    }
    out
}

pub fn lich_naturally_reductive(r: &ReductiveSpace, s: &InvariantSubspace) -> Result<LichnerowiczMatrix> {
    let op = NrOperator::new(r)?;
    let images: Vec<DMatrix<f64>> = s.basis.par_iter().map(|a| op.apply(a)).collect();
    let n = s.dim();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = 0.5 * (linalg::frob(&images[i], &s.basis[j]) + linalg::frob(&images[j], &s.basis[i]));
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(LichnerowiczMatrix {
        basis: s.clone(),
        matrix: out,
        method: Method::NaturallyReductive,
    })
}

/// `[ijk] = Σ <[X_α, X_β]_p, X_γ>^2` over orthonormal bases of the summands.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralConstants {
    pub table: Tensor3,
}

impl StructuralConstants {
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.table.get(i, j, k)
    }

    pub fn r(&self) -> usize {
        self.table.dim()
    }

    /// Largest deviation from full permutation symmetry.
    pub fn permutation_residual(&self) -> f64 {
        let r = self.r();
        let mut worst: f64 = 0.0;
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let v = self.get(i, j, k);
                    for w in [self.get(j, i, k), self.get(i, k, j), self.get(k, j, i), self.get(j, k, i), self.get(k, i, j)] {
                        worst = worst.max((v - w).abs());
                    }
                }
            }
        }
        worst
    }
}

pub fn structural_constants(r: &ReductiveSpace, dec: &IsotropyDecomposition) -> StructuralConstants {
    let n = dec.r();
    let mut table = Tensor3::zeros(n);
    if let Some(labels) = dec.coordinate_labels() {
        for &(i, j, k, v) in r.mu_nonzeros() {
            table.add(labels[i], labels[j], labels[k], v * v);
        }
    } else {
        let d = r.p_dim();
        let mut u = DMatrix::zeros(d, d);
        let mut labels = Vec::with_capacity(d);
        let mut c = 0;
        for (s, block) in dec.summands.iter().enumerate() {
            u.view_mut((0, c), (d, block.ncols())).copy_from(block);
            c += block.ncols();
            labels.extend(std::iter::repeat_n(s, block.ncols()));
        }
        let rotated = r.mu_p().rotate(&u);
        for (i, j, k, v) in rotated.nonzeros(0.0) {
            table.add(labels[i], labels[j], labels[k], v * v);
        }
    }
    StructuralConstants { table }
}

/// `[L_p]` in the basis `{(1/sqrt d_k) I_{p_k}}` from the structural constants.
pub fn lich_multiplicity_free(sc: &StructuralConstants, dec: &IsotropyDecomposition) -> Result<LichnerowiczMatrix> {
    let basis = dec.adapted_basis()?;
    let r = dec.r();
    let d: Vec<f64> = dec.dims.iter().map(|&x| x as f64).collect();
    let mut m = DMatrix::zeros(r, r);
    for k in 0..r {
        let mut diag = 0.0;
        for j in (0..r).filter(|&j| j != k) {
            for i in 0..r {
                diag += sc.get(i, j, k);
            }
        }
        m[(k, k)] = diag / d[k];
        for j in (0..r).filter(|&j| j != k) {
            let s: f64 = (0..r).map(|i| sc.get(i, j, k)).sum();
            m[(j, k)] = -s / (d[j] * d[k]).sqrt();
        }
    }
    Ok(LichnerowiczMatrix {
        basis,
        matrix: linalg::symmetric_part(&m),
        method: Method::StructuralConstants,
    })
}

/// `Cas_τ = -Σ τ(X_i)^2` on `sym(g)`, `τ(X)A = [ad X, A]`, `{X_i}`
/// orthonormal for `-Kil`.
pub fn casimir_sym(l: &StructureTensor) -> Result<LichnerowiczMatrix> {
    let q = BilinearForm::neg_killing(l);
    let (vals, _) = linalg::eigh(&q.matrix);
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    match vals.first() {
        Some(&min) if min > 1e-10 * scale => {}
        Some(&min) => return Err(Error::KillingNotDefinite(-min)),
        None => return Err(Error::KillingNotDefinite(0.0)),
    }
    let r = reductive_split(l, &[], &q)?;
    let d = r.p_dim();
    let n = linalg::sym_dim(d);
    let ads = sparse_ads(&r);
    let units = unit_positions(d);

    // images[i][s] = sym coordinates of [ad X_i, E_s] as sparse (u, value)
    let images: Vec<Vec<Vec<(usize, f64)>>> = ads
        .par_iter()
        .map(|ad| units.iter().map(|&(a, b)| tau_image(ad, a, b, d)).collect())
        .collect();
    // inverse index per i: coordinate u -> (s, value)
    let inverse: Vec<Vec<Vec<(usize, f64)>>> = images
        .par_iter()
        .map(|img| {
            let mut inv = vec![Vec::new(); n];
            for (s, list) in img.iter().enumerate() {
                for &(u, v) in list {
                    inv[u].push((s, v));
                }
            }
            inv
        })
        .collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| {
            let mut row = vec![0.0; n];
            for (img, inv) in images.iter().zip(&inverse) {
                for &(u, v) in &img[s] {
                    for &(t, w) in &inv[u] {
                        row[t] += v * w;
                    }
                }
            }
            row
        })
        .collect();
    let mut m = DMatrix::zeros(n, n);
    for (s, row) in rows.iter().enumerate() {
        for (t, &v) in row.iter().enumerate() {
            m[(s, t)] = v;
        }
    }
    Ok(LichnerowiczMatrix {
        basis: InvariantSubspace {
            basis: linalg::sym_unit_basis(d),
            label: SubspaceLabel::Full,
        },
        matrix: linalg::symmetric_part(&m),
        method: Method::Casimir,
    })
}

fn unit_positions(d: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(linalg::sym_dim(d));
    for i in 0..d {
        for j in i..d {
            out.push((i, j));
        }
    }
    out
}

/// Sparse sym coordinates of `[ad, E]` for the unit element on `(a, b)`.
fn tau_image(ad: &[(usize, usize, f64)], a: usize, b: usize, d: usize) -> Vec<(usize, f64)> {
    let w = if a == b { 1.0 } else { std::f64::consts::FRAC_1_SQRT_2 };
    let mut entries: std::collections::BTreeMap<(usize, usize), f64> = Default::default();
    let mut put = |r: usize, c: usize, v: f64| {
        *entries.entry((r, c)).or_insert(0.0) += v;
    };
    let pairs: &[(usize, usize)] = if a == b { &[(a, a)] } else { &[(a, b), (b, a)] };
    for &(r, c, v) in ad {
        for &(x, y) in pairs {
            // ad E: column y gets ad[:, x]
            if c == x {
                put(r, y, v * w);
            }
            // E ad: row x gets ad[y, :]
            if r == y {
                put(x, c, -v * w);
            }
        }
    }
    let mut coords: std::collections::BTreeMap<usize, f64> = Default::default();
    for ((r, c), v) in entries {
        let (i, j) = if r <= c { (r, c) } else { (c, r) };
        let idx = sym_index(i, j, d);
        let scale = if i == j { 1.0 } else { 0.5 * std::f64::consts::SQRT_2 };
        *coords.entry(idx).or_insert(0.0) += scale * v;
    }
    coords.into_iter().filter(|(_, v)| *v != 0.0).collect()
}

/// Position of `(i, j)`, `i <= j`, in the upper-triangular row-major order.
fn sym_index(i: usize, j: usize, d: usize) -> usize {
    i * d - i * (i + 1) / 2 + j
}

/// Smallest eigenvalue above `rel_tol * max |λ|`.
pub fn first_positive_eigenvalue(vals: &[f64], rel_tol: f64) -> Option<f64> {
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    vals.iter().copied().filter(|&v| v > rel_tol * scale).reduce(f64::min)
}
