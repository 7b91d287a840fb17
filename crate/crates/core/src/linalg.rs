//! Dense linear-algebra helpers shared by the geometric modules.
//!
//! Everything here works in a fixed orthonormal working basis, so symmetric
//! operators are plain symmetric matrices and the Frobenius product
//! `<A, B> = tr(A B^t)` is the inner product on `sym(p)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed used for every "generic element" draw unless `EINSTAB_SEED` is set.
pub const DEFAULT_SEED: u64 = 0x5eed_e1f5;

/// Seed from the `EINSTAB_SEED` environment variable, or the built-in default.
pub fn seed_from_env() -> u64 {
    std::env::var("EINSTAB_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rank-3 array `t[i][j][k]` stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    dim: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.idx(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let n = self.idx(i, j, k);
        self.data[n] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let n = self.idx(i, j, k);
        self.data[n] += v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn dot(&self, other: &Tensor3) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn scaled(&self, s: f64) -> Tensor3 {
        Tensor3 {
            dim: self.dim,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Tensor3) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Entries with `|t| > tol`, in index order.
    pub fn nonzeros(&self, tol: f64) -> Vec<(usize, usize, usize, f64)> {
        let d = self.dim;
        let mut out = Vec::new();
        for (n, &v) in self.data.iter().enumerate() {
            if v.abs() > tol {
                out.push((n / (d * d), (n / d) % d, n % d, v));
            }
        }
        out
    }

    /// Sparse view of the nonzero entries as `(flat index, value)`.
    pub fn compress(&self, tol: f64) -> SparseTensor {
        SparseTensor {
            entries: self
                .data
                .iter()
                .enumerate()
                .filter(|(_, v)| v.abs() > tol)
                .map(|(n, &v)| (n, v))
                .collect(),
        }
    }

    /// `t'[i][j][k] = sum u[a][i] u[b][j] u[c][k] t[a][b][c]`: components of the
    /// same tensor in the basis given by the columns of `u`.
    pub fn rotate(&self, u: &DMatrix<f64>) -> Tensor3 {
        let d = self.dim;
        // first index
        let mut s1 = vec![0.0; d * d * d];
        for (a, b, c, v) in self.nonzeros(0.0) {
            for i in 0..d {
                let w = u[(a, i)];
                if w != 0.0 {
                    s1[(i * d + b) * d + c] += w * v;
                }
            }
        }
        // second index
        let mut s2 = vec![0.0; d * d * d];
        for i in 0..d {
            for b in 0..d {
                let row = &s1[(i * d + b) * d..(i * d + b + 1) * d];
                if row.iter().all(|x| *x == 0.0) {
                    continue;
                }
                for j in 0..d {
                    let w = u[(b, j)];
                    if w == 0.0 {
                        continue;
                    }
                    let dst = &mut s2[(i * d + j) * d..(i * d + j + 1) * d];
                    for c in 0..d {
                        dst[c] += w * row[c];
                    }
                }
            }
        }
        // third index
        let mut out = Tensor3::zeros(d);
        for n in 0..d * d {
            let row = &s2[n * d..(n + 1) * d];
            for c in 0..d {
                let v = row[c];
                if v == 0.0 {
                    continue;
                }
                for k in 0..d {
                    out.data[n * d + k] += u[(c, k)] * v;
                }
            }
        }
        out
    }
}

/// Sorted `(flat index, value)` list; used for inner products of tensors that
/// are mostly zero.
#[derive(Debug, Clone, Default)]
pub struct SparseTensor {
    entries: Vec<(usize, f64)>,
}

impl SparseTensor {
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v * v).sum()
    }

    pub fn dot(&self, other: &SparseTensor) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }
}

/// Frobenius inner product `tr(A B^t)`.
pub fn frob(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn symmetric_part(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

pub fn asymmetry(a: &DMatrix<f64>) -> f64 {
    max_abs(&(a - a.transpose()))
}

/// Commutator `AB - BA`.
pub fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

/// Number of coordinates of `sym(d)`.
pub fn sym_dim(d: usize) -> usize {
    d * (d + 1) / 2
}

/// Orthonormal basis of `sym(d)`: `E_ii` and `(E_ij + E_ji)/sqrt 2`, ordered by
/// upper-triangular row-major position `(i, j)`, `i <= j`.
pub fn sym_unit_basis(d: usize) -> Vec<DMatrix<f64>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(sym_dim(d));
    for i in 0..d {
        for j in i..d {
            let mut m = DMatrix::zeros(d, d);
            if i == j {
                m[(i, i)] = 1.0;
            } else {
                m[(i, j)] = s;
                m[(j, i)] = s;
            }
            out.push(m);
        }
    }
    out
}

/// Coordinates of a symmetric matrix in [`sym_unit_basis`].
pub fn sym_coords(a: &DMatrix<f64>) -> DVector<f64> {
    let d = a.nrows();
    let r2 = std::f64::consts::SQRT_2;
    let mut v = Vec::with_capacity(sym_dim(d));
    for i in 0..d {
        for j in i..d {
            if i == j {
                v.push(a[(i, i)]);
            } else {
                v.push(r2 * 0.5 * (a[(i, j)] + a[(j, i)]));
            }
        }
    }
    DVector::from_vec(v)
}

/// Inverse of [`sym_coords`].
pub fn from_sym_coords(v: &[f64], d: usize) -> DMatrix<f64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = DMatrix::zeros(d, d);
    let mut n = 0;
    for i in 0..d {
        for j in i..d {
            if i == j {
                m[(i, i)] = v[n];
            } else {
                m[(i, j)] = s * v[n];
                m[(j, i)] = s * v[n];
            }
            n += 1;
        }
    }
    m
}

/// Symmetric eigendecomposition with eigenvalues sorted ascending and the
/// eigenvector columns permuted to match.
pub fn eigh(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(symmetric_part(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (vals, vecs)
}

/// Groups sorted values into runs whose consecutive gaps are `<= tol`.
pub fn cluster_sorted(vals: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=vals.len() {
        if i == vals.len() || vals[i] - vals[i - 1] > tol {
            if i > start {
                out.push(start..i);
            }
            start = i;
        }
    }
    out
}

/// Null space of a positive semidefinite Gram matrix `G = J^t J`.
///
/// Singular values of `J` are recovered as `sqrt(eig(G))`; directions with
/// `sigma <= rel_tol * sigma_max` are returned as orthonormal columns.
pub fn gram_null_space(gram: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let n = gram.nrows();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let (vals, vecs) = eigh(gram);
    let smax = vals.last().copied().unwrap_or(0.0).max(0.0).sqrt();
    let keep: Vec<usize> = (0..n)
        .filter(|&i| vals[i].max(0.0).sqrt() <= rel_tol * smax)
        .collect();
    select_columns(&vecs, &keep)
}

/// Orthonormal basis of the column range of `m`, dropping directions whose
/// singular value is below `rel_tol` times the largest one.
pub fn orthonormal_range(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    if m.ncols() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let (vals, vecs) = eigh(&(m * m.transpose()));
    let smax = vals.last().copied().unwrap_or(0.0).max(0.0).sqrt();
    if smax == 0.0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let keep: Vec<usize> = (0..vals.len())
        .rev()
        .filter(|&i| vals[i].max(0.0).sqrt() > rel_tol * smax)
        .collect();
    select_columns(&vecs, &keep)
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// orthonormal columns of `q` in `R^n`.
pub fn orthogonal_complement(q: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    let proj = DMatrix::identity(n, n) - q * q.transpose();
    let (vals, vecs) = eigh(&proj);
    let keep: Vec<usize> = (0..n).rev().filter(|&i| vals[i] > 0.5).collect();
    select_columns(&vecs, &keep)
}

pub fn select_columns(m: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(m.nrows(), cols.len());
    for (dst, &src) in cols.iter().enumerate() {
        out.set_column(dst, &m.column(src));
    }
    out
}

/// Inverse square root of a symmetric positive definite matrix. Returns the
/// smallest eigenvalue as the error value when the matrix is not positive.
pub fn inv_sqrt_spd(a: &DMatrix<f64>, rel_tol: f64) -> std::result::Result<DMatrix<f64>, f64> {
    let (vals, vecs) = eigh(a);
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    if let Some(&min) = vals.first() {
        if min <= rel_tol * scale {
            return Err(min);
        }
    }
    let d = DMatrix::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|v| 1.0 / v.sqrt()),
    ));
    Ok(&vecs * d * vecs.transpose())
}

/// `exp(A)` for symmetric `A` through its eigendecomposition.
pub fn expm_sym(a: &DMatrix<f64>) -> DMatrix<f64> {
    let (vals, vecs) = eigh(a);
    let d = DMatrix::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|v| v.exp()),
    ));
    &vecs * d * vecs.transpose()
}

/// Standard normal sample.
pub fn gaussian<R: rand::Rng>(rng: &mut R) -> f64 {
    rand_distr::Distribution::sample(&rand_distr::StandardNormal, rng)
}
