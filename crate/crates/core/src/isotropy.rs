//! Invariant symmetric operators on `p` and the isotropy decomposition.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie_core::ReductiveSpace;
use crate::linalg::{self, gaussian, sym_coords, sym_dim};

/// Symmetric operator on `p` in the working (orthonormal) basis.
pub type SymOperator = DMatrix<f64>;

/// Relative singular-value threshold for commutant kernels.
pub const KERNEL_REL_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubspaceLabel {
    SymK,
    Sym0K,
    TrivialVariations,
    W,
    /// Normalized summand projectors of a multiplicity-free decomposition.
    Adapted,
    /// All of `sym(p)`.
    Full,
}

/// Subspace of `sym(p)` with an orthonormal basis for `<A, B> = tr(A B^t)`.
#[derive(Debug, Clone)]
pub struct InvariantSubspace {
    pub basis: Vec<SymOperator>,
    pub label: SubspaceLabel,
}

impl InvariantSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `max |Gram - I|`.
    pub fn gram_residual(&self) -> f64 {
        let n = self.dim();
        let mut r: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let target = if i == j { 1.0 } else { 0.0 };
                r = r.max((linalg::frob(&self.basis[i], &self.basis[j]) - target).abs());
            }
        }
        r
    }

    /// Coordinates of the orthogonal projection of `a`.
    pub fn coords(&self, a: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.basis.iter().map(|b| linalg::frob(b, a)))
    }

    pub fn combine(&self, coeffs: &[f64]) -> SymOperator {
        let d = self.basis.first().map_or(0, |b| b.nrows());
        let mut out = DMatrix::zeros(d, d);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            out += b * *c;
        }
        out
    }

    pub fn project(&self, a: &DMatrix<f64>) -> SymOperator {
        self.combine(self.coords(a).as_slice())
    }

    /// Matrix whose columns are the `sym_coords` of the basis.
    pub fn coord_matrix(&self, d: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(sym_dim(d), self.dim());
        for (c, b) in self.basis.iter().enumerate() {
            m.set_column(c, &sym_coords(b));
        }
        m
    }

    fn from_coord_columns(m: &DMatrix<f64>, d: usize, label: SubspaceLabel) -> Self {
        let basis = (0..m.ncols())
            .map(|c| linalg::from_sym_coords(m.column(c).as_slice(), d))
            .collect();
        Self { basis, label }
    }
}

/// `max_a |[ad Z_a|_p, A]|` over the `k` basis.
pub fn commutator_residual(r: &ReductiveSpace, a: &DMatrix<f64>) -> f64 {
    r.adk()
        .iter()
        .map(|d| linalg::max_abs(&linalg::commutator(d, a)))
        .fold(0.0, f64::max)
}

/// `sym(p)^K`: symmetric operators commuting with every `ad Z|_p`, `Z ∈ k`.
pub fn invariant_sym_space(r: &ReductiveSpace) -> InvariantSubspace {
    invariant_sym_space_seeded(r, linalg::seed_from_env())
}

pub fn invariant_sym_space_seeded(r: &ReductiveSpace, seed: u64) -> InvariantSubspace {
    let d = r.p_dim();
    let adk = r.adk();
    if adk.is_empty() || adk.iter().all(|m| linalg::max_abs(m) == 0.0) {
        return InvariantSubspace {
            basis: linalg::sym_unit_basis(d),
            label: SubspaceLabel::SymK,
        };
    }
    // Any invariant A commutes with a generic D0 in ad(k), hence preserves the
    // eigenspaces of D0^t D0; solve block by block in that eigenbasis.
    let mut rng = linalg::rng(seed);
    let mut d0 = DMatrix::zeros(d, d);
    for m in adk {
        d0 += m * gaussian(&mut rng);
    }
    let (vals, u) = linalg::eigh(&(d0.transpose() * &d0));
    let scale = vals.last().copied().unwrap_or(0.0).abs().max(1e-300);
    let clusters = linalg::cluster_sorted(&vals, 1e-6 * scale);

    let rotated: Vec<DMatrix<f64>> = adk.iter().map(|m| u.transpose() * m * &u).collect();
    let offsets: Vec<usize> = clusters
        .iter()
        .scan(0, |acc, c| {
            let o = *acc;
            *acc += sym_dim(c.len());
            Some(o)
        })
        .collect();
    let unknowns: usize = clusters.iter().map(|c| sym_dim(c.len())).sum();
    let mut gram = DMatrix::zeros(unknowns, unknowns);

    for (j, cj) in clusters.iter().enumerate() {
        for (l, cl) in clusters.iter().enumerate().skip(j) {
            for m in &rotated {
                let x = m.view((cj.start, cl.start), (cj.len(), cl.len())).into_owned();
                if linalg::max_abs(&x) <= 1e-14 * scale.sqrt() {
                    continue;
                }
                // residual block X B_l - B_j X, linear in (B_j, B_l)
                let bj = linalg::sym_unit_basis(cj.len());
                let bl = linalg::sym_unit_basis(cl.len());
                let rows = cj.len() * cl.len();
                if j == l {
                    let mut jac = DMatrix::zeros(rows, bj.len());
                    for (c, e) in bj.iter().enumerate() {
                        let r = &x * e - e * &x;
                        jac.set_column(c, &DVector::from_column_slice(r.as_slice()));
                    }
                    let g = jac.transpose() * &jac;
                    let o = offsets[j];
                    let mut view = gram.view_mut((o, o), (bj.len(), bj.len()));
                    view += g;
                } else {
                    let mut jac = DMatrix::zeros(rows, bj.len() + bl.len());
                    for (c, e) in bj.iter().enumerate() {
                        let r = -(e * &x);
                        jac.set_column(c, &DVector::from_column_slice(r.as_slice()));
                    }
                    for (c, e) in bl.iter().enumerate() {
                        let r = &x * e;
                        jac.set_column(bj.len() + c, &DVector::from_column_slice(r.as_slice()));
                    }
                    let g = jac.transpose() * &jac;
                    let (oj, ol) = (offsets[j], offsets[l]);
                    let (nj, nl) = (bj.len(), bl.len());
                    let mut add = |r0: usize, c0: usize, gr: usize, gc: usize, nr: usize, nc: usize| {
                        let mut view = gram.view_mut((r0, c0), (nr, nc));
                        view += g.view((gr, gc), (nr, nc));
                    };
                    add(oj, oj, 0, 0, nj, nj);
                    add(oj, ol, 0, nj, nj, nl);
                    add(ol, oj, nj, 0, nl, nj);
                    add(ol, ol, nj, nj, nl, nl);
                }
            }
        }
    }

    let kernel = linalg::gram_null_space(&gram, KERNEL_REL_TOL);
    let mut basis = Vec::with_capacity(kernel.ncols());
    for c in 0..kernel.ncols() {
        let mut block = DMatrix::zeros(d, d);
        for (j, cj) in clusters.iter().enumerate() {
            let coords: Vec<f64> = (0..sym_dim(cj.len())).map(|t| kernel[(offsets[j] + t, c)]).collect();
            let b = linalg::from_sym_coords(&coords, cj.len());
            block.view_mut((cj.start, cj.start), (cj.len(), cj.len())).copy_from(&b);
        }
        let a = &u * block * u.transpose();
        basis.push(linalg::symmetric_part(&a));
    }
    InvariantSubspace {
        basis,
        label: SubspaceLabel::SymK,
    }
}

/// Isotropy summands `p = p_1 ⊕ ... ⊕ p_r`.
#[derive(Debug, Clone)]
pub struct IsotropyDecomposition {
    /// Orthonormal basis columns of each summand, in the working basis of `p`.
    pub summands: Vec<DMatrix<f64>>,
    pub dims: Vec<usize>,
    pub multiplicity_free: bool,
    /// `-Kil_g|_{p_k} = b_k <,>|_{p_k}`.
    pub b_constants: Vec<f64>,
    /// `dim sym(p)^K`.
    pub commutant_dim: usize,
    /// True when every summand is spanned by working-basis vectors.
    pub aligned: bool,
}

impl IsotropyDecomposition {
    pub fn r(&self) -> usize {
        self.summands.len()
    }

    pub fn projector(&self, k: usize) -> DMatrix<f64> {
        &self.summands[k] * self.summands[k].transpose()
    }

    /// For aligned decompositions, the summand index of each `p` coordinate.
    pub fn coordinate_labels(&self) -> Option<Vec<usize>> {
        if !self.aligned {
            return None;
        }
        let d: usize = self.dims.iter().sum();
        let mut out = vec![usize::MAX; d];
        for (k, s) in self.summands.iter().enumerate() {
            for c in 0..s.ncols() {
                let i = s.column(c).iamax();
                out[i] = k;
            }
        }
        Some(out)
    }

    /// `{(1/sqrt d_k) P_k}`, an orthonormal basis of `sym(p)^K` when the
    /// decomposition is multiplicity-free.
    pub fn adapted_basis(&self) -> Result<InvariantSubspace> {
        if !self.multiplicity_free {
            return Err(Error::NotMultiplicityFree);
        }
        let basis = (0..self.r())
            .map(|k| self.projector(k) / (self.dims[k] as f64).sqrt())
            .collect();
        Ok(InvariantSubspace {
            basis,
            label: SubspaceLabel::Adapted,
        })
    }

    /// `max_{k, a} |[ad Z_a|_p, P_k]|`.
    pub fn invariance_residual(&self, r: &ReductiveSpace) -> f64 {
        (0..self.r())
            .map(|k| commutator_residual(r, &self.projector(k)))
            .fold(0.0, f64::max)
    }
}

/// Joint eigenspaces of a generic invariant operator.
pub fn isotropy_decomposition(r: &ReductiveSpace) -> Result<IsotropyDecomposition> {
    let sym = invariant_sym_space(r);
    decompose_with(r, &sym, linalg::seed_from_env())
}

pub fn decompose_with(r: &ReductiveSpace, sym: &InvariantSubspace, seed: u64) -> Result<IsotropyDecomposition> {
    let d = r.p_dim();
    if d == 0 {
        return Ok(IsotropyDecomposition {
            summands: Vec::new(),
            dims: Vec::new(),
            multiplicity_free: true,
            b_constants: Vec::new(),
            commutant_dim: sym.dim(),
            aligned: true,
        });
    }
    let mut rng = linalg::rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut draw = || {
        let coeffs: Vec<f64> = (0..sym.dim()).map(|_| gaussian(&mut rng)).collect();
        let (vals, vecs) = linalg::eigh(&sym.combine(&coeffs));
        let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        let clusters = linalg::cluster_sorted(&vals, 1e-7 * scale);
        (clusters, vecs)
    };
    let (mut clusters, mut vecs) = draw();
    let (c2, _) = draw();
    if c2.len() != clusters.len() {
        let (c3, v3) = draw();
        let (c4, _) = draw();
        if c3.len() != c4.len() {
            return Err(Error::DecompositionUnstable {
                first: c3.len(),
                second: c4.len(),
            });
        }
        clusters = c3;
        vecs = v3;
    }

    let mut summands: Vec<DMatrix<f64>> = clusters
        .iter()
        .map(|c| vecs.columns(c.start, c.len()).into_owned())
        .collect();
    let mut aligned = true;
    for s in summands.iter_mut() {
        match snap_to_coordinates(s) {
            Some(snapped) => *s = snapped,
            None => aligned = false,
        }
    }
    summands.sort_by_key(first_support);

    let dims: Vec<usize> = summands.iter().map(|s| s.ncols()).collect();
    let neg_kil = -r.killing_p();
    let mut b_constants = Vec::with_capacity(summands.len());
    for (k, s) in summands.iter().enumerate() {
        let block = s.transpose() * &neg_kil * s;
        let b = block.trace() / s.ncols() as f64;
        let dev = linalg::max_abs(&(block - DMatrix::identity(s.ncols(), s.ncols()) * b));
        if dev > 1e-8 * b.abs().max(1.0) {
            return Err(Error::KillingNotScalar { summand: k, deviation: dev });
        }
        b_constants.push(b);
    }
    Ok(IsotropyDecomposition {
        multiplicity_free: sym.dim() == summands.len(),
        commutant_dim: sym.dim(),
        summands,
        dims,
        b_constants,
        aligned,
    })
}

/// Replaces an orthonormal basis by coordinate vectors when its projector is
/// a diagonal 0/1 matrix.
fn snap_to_coordinates(s: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let p = s * s.transpose();
    let n = p.nrows();
    let mut idx = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v = p[(i, j)];
            let target = if i == j && v > 0.5 { 1.0 } else { 0.0 };
            if (v - target).abs() > 1e-9 {
                return None;
            }
        }
        if p[(i, i)] > 0.5 {
            idx.push(i);
        }
    }
    let mut out = DMatrix::zeros(n, idx.len());
    for (c, &i) in idx.iter().enumerate() {
        out[(i, c)] = 1.0;
    }
    Some(out)
}

fn first_support(s: &DMatrix<f64>) -> usize {
    (0..s.nrows())
        .find(|&i| s.row(i).norm() > 1e-6)
        .unwrap_or(usize::MAX)
}

/// `p_0 = {X ∈ p : [k, X] = 0}` as orthonormal columns.
pub fn fixed_vectors(r: &ReductiveSpace) -> DMatrix<f64> {
    let d = r.p_dim();
    let mut g = DMatrix::zeros(d, d);
    for m in r.adk() {
        g += m.transpose() * m;
    }
    if r.adk().is_empty() {
        return DMatrix::identity(d, d);
    }
    linalg::gram_null_space(&g, KERNEL_REL_TOL)
}

/// Span of `S(ad_p X)` for `X ∈ p_0`: tangent directions along the
/// automorphism orbit.
pub fn trivial_variation_space(r: &ReductiveSpace) -> InvariantSubspace {
    let d = r.p_dim();
    let p0 = fixed_vectors(r);
    let mut cols = DMatrix::zeros(sym_dim(d), p0.ncols());
    for c in 0..p0.ncols() {
        let s = linalg::symmetric_part(&ad_of(r, p0.column(c).as_slice()));
        cols.set_column(c, &sym_coords(&s));
    }
    let range = if cols.ncols() == 0 || linalg::max_abs(&cols) < 1e-12 {
        DMatrix::zeros(sym_dim(d), 0)
    } else {
        linalg::orthonormal_range(&cols, KERNEL_REL_TOL)
    };
    InvariantSubspace::from_coord_columns(&range, d, SubspaceLabel::TrivialVariations)
}

/// `ad_p X` for a coordinate vector `x`.
pub fn ad_of(r: &ReductiveSpace, x: &[f64]) -> DMatrix<f64> {
    let d = r.p_dim();
    let mut m = DMatrix::zeros(d, d);
    for (i, &xi) in x.iter().enumerate() {
        if xi != 0.0 {
            m += &r.adp()[i] * xi;
        }
    }
    m
}

/// `W`: the orthogonal complement of `R I ⊕ trivial variations` in `sym`.
pub fn tt_space(r: &ReductiveSpace, sym: &InvariantSubspace, trivial: &InvariantSubspace) -> InvariantSubspace {
    let d = r.p_dim();
    let n = sym.dim();
    if d == 0 || n == 0 {
        return InvariantSubspace {
            basis: Vec::new(),
            label: SubspaceLabel::W,
        };
    }
    let mut span = DMatrix::zeros(n, 1 + trivial.dim());
    let id = DMatrix::identity(d, d) / (d as f64).sqrt();
    span.set_column(0, &sym.coords(&id));
    for (c, t) in trivial.basis.iter().enumerate() {
        span.set_column(1 + c, &sym.coords(t));
    }
    let q = linalg::orthonormal_range(&span, KERNEL_REL_TOL);
    let comp = linalg::orthogonal_complement(&q, n);
    let basis = (0..comp.ncols())
        .map(|c| linalg::symmetric_part(&sym.combine(comp.column(c).as_slice())))
        .collect();
    InvariantSubspace {
        basis,
        label: SubspaceLabel::W,
    }
}

/// `max_X |tr(A S(ad_p X))|` over an orthonormal basis of `p_0`.
pub fn divergence_pairing_check(r: &ReductiveSpace, a: &DMatrix<f64>) -> f64 {
    let p0 = fixed_vectors(r);
    (0..p0.ncols())
        .map(|c| {
            let s = linalg::symmetric_part(&ad_of(r, p0.column(c).as_slice()));
            (a * s).trace().abs()
        })
        .fold(0.0, f64::max)
}
