//! Lie algebras as explicit structure constants in a fixed basis.
//!
//! `c[i][j][k]` is the coefficient of `e_k` in `[e_i, e_j]`. Everything the
//! curvature code needs (Killing forms, `ad` matrices, projected brackets) is
//! derived from this one array.

mod classical;
mod reductive;

pub use classical::{build_classical, classical_basis, BasisElement, BasisLabel, ClassicalFamily};
pub use reductive::{jensen_deformed_space, jensen_form, reductive_split, ReductiveSpace};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Tensor3;

/// Entries below this fraction of the largest structure constant are treated
/// as roundoff and dropped when an algebra is (re)built.
const CLEAN_REL: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct StructureTensor {
    c: Tensor3,
    sparsity: Vec<(usize, usize, usize)>,
    /// `by_first[i]` lists `(j, k, c[i][j][k])` for the nonzero entries.
    by_first: Vec<Vec<(usize, usize, f64)>>,
}

impl PartialEq for StructureTensor {
    fn eq(&self, other: &Self) -> bool {
        self.c == other.c
    }
}

impl StructureTensor {
    /// Builds from a dense array, checking antisymmetry in the first two slots.
    pub fn from_dense(mut c: Tensor3) -> Result<Self> {
        let n = c.dim();
        let scale = c.max_abs();
        let mut asym: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    asym = asym.max((c.get(i, j, k) + c.get(j, i, k)).abs());
                }
            }
        }
        if asym > 1e-10 * scale.max(1.0) {
            return Err(Error::NotALieAlgebra {
                what: "antisymmetry",
                residual: asym,
            });
        }
        let cut = CLEAN_REL * scale;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = c.get(i, j, k);
                    if v.abs() <= cut {
                        c.set(i, j, k, 0.0);
                    } else if i < j {
                        // exact antisymmetry
                        c.set(j, i, k, -v);
                    }
                }
            }
        }
        Ok(Self::index(c))
    }

    fn index(c: Tensor3) -> Self {
        let n = c.dim();
        let mut sparsity = Vec::new();
        let mut by_first = vec![Vec::new(); n];
        for (i, j, k, v) in c.nonzeros(0.0) {
            sparsity.push((i, j, k));
            by_first[i].push((j, k, v));
        }
        Self {
            c,
            sparsity,
            by_first,
        }
    }

    /// Builds from a list of `(i, j, k, value)` entries. The antisymmetric
    /// partner `(j, i, k, -value)` is filled in; listing both is allowed as
    /// long as they agree.
    pub fn from_brackets(dim: usize, entries: &[(usize, usize, usize, f64)]) -> Result<Self> {
        let mut c = Tensor3::zeros(dim);
        let mut seen = vec![false; dim * dim * dim];
        for &(i, j, k, v) in entries {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::InvalidParameter(format!(
                    "bracket index ({i}, {j}, {k}) out of range for dim {dim}"
                )));
            }
            if i == j {
                if v != 0.0 {
                    return Err(Error::NotALieAlgebra {
                        what: "antisymmetry",
                        residual: v.abs(),
                    });
                }
                continue;
            }
            let a = (i * dim + j) * dim + k;
            let b = (j * dim + i) * dim + k;
            if seen[a] || seen[b] {
                let prev = c.get(i, j, k);
                if (prev - v).abs() > 1e-12 * prev.abs().max(1.0) {
                    return Err(Error::NotALieAlgebra {
                        what: "antisymmetry",
                        residual: (prev - v).abs(),
                    });
                }
            }
            seen[a] = true;
            seen[b] = true;
            c.set(i, j, k, v);
            c.set(j, i, k, -v);
        }
        Self::from_dense(c)
    }

    pub fn abelian(dim: usize) -> Self {
        Self::index(Tensor3::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.c.dim()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c.get(i, j, k)
    }

    pub fn dense(&self) -> &Tensor3 {
        &self.c
    }

    /// Nonzero `(i, j, k)` triples.
    pub fn sparsity_index(&self) -> &[(usize, usize, usize)] {
        &self.sparsity
    }

    /// Nonzero `(j, k, c[i][j][k])` for fixed `i`.
    pub fn row(&self, i: usize) -> &[(usize, usize, f64)] {
        &self.by_first[i]
    }

    pub fn max_abs(&self) -> f64 {
        self.c.max_abs()
    }

    /// `[u, v]` for coordinate vectors `u`, `v`.
    pub fn bracket(&self, u: &[f64], v: &[f64]) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        for (a, &ua) in u.iter().enumerate() {
            if ua == 0.0 {
                continue;
            }
            for &(b, k, w) in &self.by_first[a] {
                let vb = v[b];
                if vb != 0.0 {
                    out[k] += ua * vb * w;
                }
            }
        }
        out
    }

    /// Matrix of `ad e_i`; column `j` holds `[e_i, e_j]`.
    pub fn ad(&self, i: usize) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for &(j, k, v) in &self.by_first[i] {
            m[(k, j)] = v;
        }
        m
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for &(i, j, k) in &self.sparsity {
            r = r.max((self.get(i, j, k) + self.get(j, i, k)).abs());
        }
        r
    }

    /// Largest Jacobiator component over all basis triples.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim();
        let mut by_pair: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n * n];
        for &(i, j, k) in &self.sparsity {
            by_pair[i * n + j].push((k, self.get(i, j, k)));
        }
        let mut worst: f64 = 0.0;
        let mut acc = vec![0.0; n];
        let mut touched = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for l in (j + 1)..n {
                    // [[e_i, e_j], e_l] + cyclic
                    for (a, b, c) in [(i, j, l), (j, l, i), (l, i, j)] {
                        for &(m, v) in &by_pair[a * n + b] {
                            for &(k, w) in &by_pair[m * n + c] {
                                if acc[k] == 0.0 {
                                    touched.push(k);
                                }
                                acc[k] += v * w;
                            }
                        }
                    }
                    for &k in &touched {
                        worst = worst.max(acc[k].abs());
                        acc[k] = 0.0;
                    }
                    touched.clear();
                }
            }
        }
        worst
    }

    /// Checks antisymmetry and the Jacobi identity.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let scale = self.max_abs().max(1.0);
        let a = self.antisymmetry_residual();
        if a > tol * scale {
            return Err(Error::NotALieAlgebra {
                what: "antisymmetry",
                residual: a,
            });
        }
        let j = self.jacobi_residual();
        if j > tol * scale * scale {
            return Err(Error::NotALieAlgebra {
                what: "the Jacobi identity",
                residual: j,
            });
        }
        Ok(())
    }

    /// `max_X |tr ad X|` over basis vectors; zero iff unimodular.
    pub fn max_trace_ad(&self) -> f64 {
        (0..self.dim())
            .map(|i| {
                self.by_first[i]
                    .iter()
                    .filter(|(j, k, _)| j == k)
                    .map(|(_, _, v)| v)
                    .sum::<f64>()
                    .abs()
            })
            .fold(0.0, f64::max)
    }

    /// Residual of the projection of `[span idx, span idx]` off `span idx`.
    pub fn closure_residual(&self, indices: &[usize]) -> f64 {
        let mut inside = vec![false; self.dim()];
        for &i in indices {
            inside[i] = true;
        }
        let mut r: f64 = 0.0;
        for &i in indices {
            for &(j, k, v) in &self.by_first[i] {
                if inside[j] && !inside[k] {
                    r = r.max(v.abs());
                }
            }
        }
        r
    }

    /// Structure constants of the subalgebra spanned by `indices`, in that order.
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        let res = self.closure_residual(indices);
        if res > 1e-12 * self.max_abs().max(1.0) {
            return Err(Error::NotASubalgebra(res));
        }
        let m = indices.len();
        let mut pos = vec![usize::MAX; self.dim()];
        for (n, &i) in indices.iter().enumerate() {
            pos[i] = n;
        }
        let mut c = Tensor3::zeros(m);
        for (a, &i) in indices.iter().enumerate() {
            for &(j, k, v) in &self.by_first[i] {
                if pos[j] != usize::MAX && pos[k] != usize::MAX {
                    c.set(a, pos[j], pos[k], v);
                }
            }
        }
        Ok(Self::index(c))
    }

    /// `a ⊕ b` with the basis of `a` first.
    pub fn direct_sum(a: &Self, b: &Self) -> Self {
        let (na, nb) = (a.dim(), b.dim());
        let mut c = Tensor3::zeros(na + nb);
        for i in 0..na {
            for &(j, k, v) in a.row(i) {
                c.set(i, j, k, v);
            }
        }
        for i in 0..nb {
            for &(j, k, v) in b.row(i) {
                c.set(na + i, na + j, na + k, v);
            }
        }
        Self::index(c)
    }

    /// Structure constants in the basis whose vectors are the columns of
    /// `basis` (expressed in the current coordinates).
    pub fn change_basis(&self, basis: &DMatrix<f64>) -> Result<Self> {
        let n = self.dim();
        if basis.nrows() != n || basis.ncols() != n {
            return Err(Error::InvalidParameter("basis must be square".into()));
        }
        let inv = basis
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidParameter("basis matrix is singular".into()))?;
        let cols: Vec<Vec<f64>> = (0..n).map(|j| basis.column(j).iter().copied().collect()).collect();
        let mut c = Tensor3::zeros(n);
        for i in 0..n {
            for j in (i + 1)..n {
                let br = self.bracket(&cols[i], &cols[j]);
                for (m, &bm) in br.iter().enumerate() {
                    if bm == 0.0 {
                        continue;
                    }
                    for k in 0..n {
                        let w = inv[(k, m)];
                        if w != 0.0 {
                            c.add(i, j, k, w * bm);
                        }
                    }
                }
                for k in 0..n {
                    let v = c.get(i, j, k);
                    c.set(j, i, k, -v);
                }
            }
        }
        Self::from_dense(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormLabel {
    Killing,
    CustomQ,
}

/// Symmetric bilinear form on `g` in the algebra's basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearForm {
    pub matrix: DMatrix<f64>,
    pub label: FormLabel,
}

impl BilinearForm {
    pub fn custom(matrix: DMatrix<f64>) -> Self {
        Self {
            matrix,
            label: FormLabel::CustomQ,
        }
    }

    /// `-Kil_g`, the form behind the standard (Killing) metric.
    pub fn neg_killing(l: &StructureTensor) -> Self {
        let k = killing_form(l);
        Self {
            matrix: -k.matrix,
            label: FormLabel::Killing,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            matrix: &self.matrix * s,
            label: self.label,
        }
    }

    /// `max |Q([X,Y],Z) + Q(Y,[X,Z])|` over basis triples.
    pub fn ad_invariance_residual(&self, l: &StructureTensor) -> f64 {
        let n = l.dim();
        let q = &self.matrix;
        let mut worst: f64 = 0.0;
        for x in 0..n {
            // ad_x^t Q + Q ad_x, with ad_x[k][j] = c[x][j][k]
            let mut m = DMatrix::<f64>::zeros(n, n);
            for &(j, k, v) in l.row(x) {
                for z in 0..n {
                    m[(j, z)] += v * q[(k, z)];
                    m[(z, j)] += q[(z, k)] * v;
                }
            }
            worst = worst.max(crate::linalg::max_abs(&m));
        }
        worst
    }
}

/// Killing form `B[a][b] = tr(ad e_a ∘ ad e_b)`.
pub fn killing_form(l: &StructureTensor) -> BilinearForm {
    let n = l.dim();
    // c[b][j][i] grouped by (j, i)
    let mut by_tail: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n * n];
    for b in 0..n {
        for &(j, i, w) in l.row(b) {
            by_tail[j * n + i].push((b, w));
        }
    }
    let mut m = DMatrix::zeros(n, n);
    for a in 0..n {
        for &(i, j, v) in l.row(a) {
            for &(b, w) in &by_tail[j * n + i] {
                m[(a, b)] += v * w;
            }
        }
    }
    BilinearForm {
        matrix: crate::linalg::symmetric_part(&m),
        label: FormLabel::Killing,
    }
}
