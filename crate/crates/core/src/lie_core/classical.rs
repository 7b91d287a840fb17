//! Compact classical Lie algebras in frozen matrix bases.
//!
//! Basis conventions (all orthogonal for `Re tr(X Y^*)`):
//!
//! * `su(n)`: for each `a < b` (lexicographic) the pair `E_ab - E_ba`,
//!   `i(E_ab + E_ba)`; then the diagonal Gell-Mann directions
//!   `i sqrt(2/(m(m+1))) diag(1,..,1,-m,0,..)`, `m = 1..n-1`.
//! * `so(n)`: `E_ab - E_ba` for `a < b`.
//! * `sp(n)`: `2n x 2n` complex matrices `[[A, B], [-conj B, conj A]]` with
//!   `A` anti-Hermitian and `B` symmetric. For each `a < b` the quadruple
//!   `A = E_ab - E_ba`, `A = i(E_ab + E_ba)`, `B = E_ab + E_ba`,
//!   `B = i(E_ab + E_ba)`; then for each `a` the triple `A = i E_aa`,
//!   `B = E_aa`, `B = i E_aa`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::StructureTensor;
use crate::error::{Error, Result};
use crate::linalg::Tensor3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassicalFamily {
    Su,
    So,
    Sp,
}

impl ClassicalFamily {
    pub fn name(self) -> &'static str {
        match self {
            Self::Su => "su",
            Self::So => "so",
            Self::Sp => "sp",
        }
    }

    pub fn min_n(self) -> usize {
        match self {
            Self::Su => 2,
            Self::So => 3,
            Self::Sp => 1,
        }
    }

    pub fn algebra_dim(self, n: usize) -> usize {
        match self {
            Self::Su => n * n - 1,
            Self::So => n * (n - 1) / 2,
            Self::Sp => n * (2 * n + 1),
        }
    }
}

impl std::str::FromStr for ClassicalFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "su" => Ok(Self::Su),
            "so" => Ok(Self::So),
            "sp" => Ok(Self::Sp),
            other => Err(Error::InvalidParameter(format!("unknown family '{other}'"))),
        }
    }
}

/// Which defining indices a basis element is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisLabel {
    /// Off-diagonal element built on the index pair `a < b`.
    Pair(usize, usize),
    /// Element supported on the single index `a` (sp diagonal triples).
    Diagonal(usize),
    /// Diagonal Cartan direction of `su(n)`.
    Cartan(usize),
}

/// A basis matrix stored as its nonzero entries.
#[derive(Debug, Clone)]
pub struct BasisElement {
    pub label: BasisLabel,
    pub entries: Vec<(usize, usize, Complex64)>,
}

impl BasisElement {
    fn new(label: BasisLabel, entries: Vec<(usize, usize, Complex64)>) -> Self {
        Self { label, entries }
    }

    fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|(_, _, z)| z.norm_sqr()).sum()
    }

    /// Dense matrix of size `m`.
    pub fn to_dense(&self, m: usize) -> Vec<Vec<Complex64>> {
        let mut out = vec![vec![Complex64::new(0.0, 0.0); m]; m];
        for &(r, c, z) in &self.entries {
            out[r][c] += z;
        }
        out
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The frozen basis of the defining representation, with its matrix size.
pub fn classical_basis(family: ClassicalFamily, n: usize) -> Result<(usize, Vec<BasisElement>)> {
    if n < family.min_n() {
        return Err(Error::OutOfRange {
            family: family.name(),
            n,
            min: family.min_n(),
        });
    }
    let mut out = Vec::with_capacity(family.algebra_dim(n));
    let size = match family {
        ClassicalFamily::Su => {
            for a in 0..n {
                for b in (a + 1)..n {
                    out.push(BasisElement::new(
                        BasisLabel::Pair(a, b),
                        vec![(a, b, c(1.0, 0.0)), (b, a, c(-1.0, 0.0))],
                    ));
                    out.push(BasisElement::new(
                        BasisLabel::Pair(a, b),
                        vec![(a, b, c(0.0, 1.0)), (b, a, c(0.0, 1.0))],
                    ));
                }
            }
            for m in 1..n {
                let s = (2.0 / (m * (m + 1)) as f64).sqrt();
                let mut e: Vec<_> = (0..m).map(|a| (a, a, c(0.0, s))).collect();
                e.push((m, m, c(0.0, -(m as f64) * s)));
                out.push(BasisElement::new(BasisLabel::Cartan(m), e));
            }
            n
        }
        ClassicalFamily::So => {
            for a in 0..n {
                for b in (a + 1)..n {
                    out.push(BasisElement::new(
                        BasisLabel::Pair(a, b),
                        vec![(a, b, c(1.0, 0.0)), (b, a, c(-1.0, 0.0))],
                    ));
                }
            }
            n
        }
        ClassicalFamily::Sp => {
            // A block embeds as diag(A, conj A); B block as [[0, B], [-conj B, 0]].
            let a_block = |entries: &[(usize, usize, Complex64)]| -> Vec<(usize, usize, Complex64)> {
                let mut v = Vec::new();
                for &(r, col, z) in entries {
                    v.push((r, col, z));
                    v.push((n + r, n + col, z.conj()));
                }
                v
            };
            let b_block = |entries: &[(usize, usize, Complex64)]| -> Vec<(usize, usize, Complex64)> {
                let mut v = Vec::new();
                for &(r, col, z) in entries {
                    v.push((r, n + col, z));
                    v.push((n + r, col, -z.conj()));
                }
                v
            };
            for a in 0..n {
                for b in (a + 1)..n {
                    let l = BasisLabel::Pair(a, b);
                    out.push(BasisElement::new(l, a_block(&[(a, b, c(1.0, 0.0)), (b, a, c(-1.0, 0.0))])));
                    out.push(BasisElement::new(l, a_block(&[(a, b, c(0.0, 1.0)), (b, a, c(0.0, 1.0))])));
                    out.push(BasisElement::new(l, b_block(&[(a, b, c(1.0, 0.0)), (b, a, c(1.0, 0.0))])));
                    out.push(BasisElement::new(l, b_block(&[(a, b, c(0.0, 1.0)), (b, a, c(0.0, 1.0))])));
                }
            }
            for a in 0..n {
                let l = BasisLabel::Diagonal(a);
                out.push(BasisElement::new(l, a_block(&[(a, a, c(0.0, 1.0))])));
                out.push(BasisElement::new(l, b_block(&[(a, a, c(1.0, 0.0))])));
                out.push(BasisElement::new(l, b_block(&[(a, a, c(0.0, 1.0))])));
            }
            2 * n
        }
    };
    debug_assert_eq!(out.len(), family.algebra_dim(n));
    Ok((size, out))
}

/// Structure constants of the compact real form in the frozen basis.
pub fn build_classical(family: ClassicalFamily, n: usize) -> Result<StructureTensor> {
    let (_, basis) = classical_basis(family, n)?;
    matrix_algebra(&basis)
}

/// Structure constants of the span of sparse matrices closed under the
/// commutator. The basis must be orthogonal for `Re tr(X Y^*)`.
fn matrix_algebra(basis: &[BasisElement]) -> Result<StructureTensor> {
    let dim = basis.len();
    let norms: Vec<f64> = basis.iter().map(BasisElement::norm_sq).collect();
    let mut at: BTreeMap<(usize, usize), Vec<(usize, Complex64)>> = BTreeMap::new();
    for (k, e) in basis.iter().enumerate() {
        for &(r, col, z) in &e.entries {
            at.entry((r, col)).or_default().push((k, z));
        }
    }
    let mut out = Tensor3::zeros(dim);
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        for j in (i + 1)..dim {
            let z = sparse_commutator(&basis[i].entries, &basis[j].entries);
            let mut coords: BTreeMap<usize, f64> = BTreeMap::new();
            for (&pos, &val) in &z {
                if let Some(list) = at.get(&pos) {
                    for &(k, x) in list {
                        *coords.entry(k).or_insert(0.0) += (val * x.conj()).re / norms[k];
                    }
                }
            }
            // reconstruction check: the commutator must lie in the span
            let mut rec: BTreeMap<(usize, usize), Complex64> = z.clone();
            for (&k, &v) in &coords {
                for &(r, col, x) in &basis[k].entries {
                    *rec.entry((r, col)).or_insert(c(0.0, 0.0)) -= x * v;
                }
            }
            worst = rec.values().fold(worst, |m, v| m.max(v.norm()));
            for (k, v) in coords {
                if v != 0.0 {
                    out.set(i, j, k, v);
                    out.set(j, i, k, -v);
                }
            }
        }
    }
    if worst > 1e-12 {
        return Err(Error::NotALieAlgebra {
            what: "closure of the matrix basis",
            residual: worst,
        });
    }
    StructureTensor::from_dense(out)
}

fn sparse_commutator(
    x: &[(usize, usize, Complex64)],
    y: &[(usize, usize, Complex64)],
) -> BTreeMap<(usize, usize), Complex64> {
    let mut out: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
    for &(r1, c1, a) in x {
        for &(r2, c2, b) in y {
            if c1 == r2 {
                *out.entry((r1, c2)).or_insert(c(0.0, 0.0)) += a * b;
            }
            if c2 == r1 {
                *out.entry((r2, c1)).or_insert(c(0.0, 0.0)) -= b * a;
            }
        }
    }
    out.retain(|_, v| v.norm() > 0.0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_core::killing_form;

    #[test]
    fn dimensions_and_ranges() {
        assert_eq!(build_classical(ClassicalFamily::Su, 2).unwrap().dim(), 3);
        assert_eq!(build_classical(ClassicalFamily::So, 3).unwrap().dim(), 3);
        assert_eq!(build_classical(ClassicalFamily::Sp, 2).unwrap().dim(), 10);
        assert!(matches!(build_classical(ClassicalFamily::Su, 1), Err(Error::OutOfRange { .. })));
        assert!(matches!(build_classical(ClassicalFamily::So, 2), Err(Error::OutOfRange { .. })));
        assert!(matches!(build_classical(ClassicalFamily::Sp, 0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn su2_is_the_pauli_algebra() {
        // basis: i*sigma_y-like, i*sigma_x, i*sigma_z
        let l = build_classical(ClassicalFamily::Su, 2).unwrap();
        assert!(l.jacobi_residual() < 1e-14);
        let mut nonzero = 0;
        for &(i, j, k) in l.sparsity_index() {
            assert!(i != j && j != k && i != k);
            assert!((l.get(i, j, k).abs() - 2.0).abs() < 1e-14);
            nonzero += 1;
        }
        assert_eq!(nonzero, 6);
    }

    #[test]
    fn so3_is_cyclic_unit_brackets() {
        let l = build_classical(ClassicalFamily::So, 3).unwrap();
        // [L01, L02] = -L12
        assert_eq!(l.get(0, 1, 2), -1.0);
        assert_eq!(l.get(1, 2, 0), -1.0);
        assert_eq!(l.get(2, 0, 1), -1.0);
        assert_eq!(l.sparsity_index().len(), 6);
    }

    /// Killing form of sp(2) against (2n+2) Re tr(XY) on the defining matrices.
    #[test]
    fn sp2_killing_is_six_times_trace_form() {
        let (m, basis) = classical_basis(ClassicalFamily::Sp, 2).unwrap();
        let l = build_classical(ClassicalFamily::Sp, 2).unwrap();
        let kil = killing_form(&l).matrix;
        for a in 0..basis.len() {
            for b in 0..basis.len() {
                let x = basis[a].to_dense(m);
                let y = basis[b].to_dense(m);
                let mut tr = Complex64::new(0.0, 0.0);
                for r in 0..m {
                    for s in 0..m {
                        tr += x[r][s] * y[s][r];
                    }
                }
                assert!(tr.im.abs() < 1e-14);
                assert!((kil[(a, b)] - 6.0 * tr.re).abs() < 1e-12, "({a},{b})");
            }
        }
    }

    #[test]
    fn jacobi_holds_for_all_small_algebras() {
        for (f, n) in [
            (ClassicalFamily::Su, 3),
            (ClassicalFamily::Su, 4),
            (ClassicalFamily::So, 5),
            (ClassicalFamily::So, 6),
            (ClassicalFamily::Sp, 1),
            (ClassicalFamily::Sp, 3),
        ] {
            let l = build_classical(f, n).unwrap();
            assert!(l.jacobi_residual() < 1e-12, "{f:?}({n})");
        }
    }
}
