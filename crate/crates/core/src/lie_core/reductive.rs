//! Reductive decompositions `g = k ⊕ p` with an orthonormal working basis on `p`.

use nalgebra::DMatrix;

use super::{killing_form, BilinearForm, FormLabel, StructureTensor};
use crate::error::{Error, Result};
use crate::linalg::{self, Tensor3};

/// A homogeneous space `G/K` in bracket coordinates.
///
/// The algebra is stored in a working basis whose first `k_dim` vectors span
/// `k` and whose remaining vectors are an orthonormal basis of `p`; so the
/// inner product on `p` is the identity matrix.
#[derive(Debug, Clone)]
pub struct ReductiveSpace {
    algebra: StructureTensor,
    k_dim: usize,
    basis: DMatrix<f64>,
    ip: DMatrix<f64>,
    mu_p: Tensor3,
    mu_nz: Vec<(usize, usize, usize, f64)>,
    adp: Vec<DMatrix<f64>>,
    adk: Vec<DMatrix<f64>>,
    killing_p: DMatrix<f64>,
}

impl ReductiveSpace {
    /// Builds the space from an algebra already expressed in a working basis
    /// (`k` first, then a `p` basis assumed orthonormal for the metric).
    /// `basis` records the working vectors in the caller's coordinates.
    pub fn from_working(algebra: StructureTensor, k_dim: usize, basis: DMatrix<f64>) -> Result<Self> {
        let n = algebra.dim();
        if k_dim > n {
            return Err(Error::InvalidParameter(format!("k has dimension {k_dim} > dim g = {n}")));
        }
        let p = n - k_dim;
        let scale = algebra.max_abs().max(1.0);

        let mut leak: f64 = 0.0;
        for a in 0..k_dim {
            for &(j, k, v) in algebra.row(a) {
                if j >= k_dim && k < k_dim {
                    leak = leak.max(v.abs());
                }
            }
        }
        if leak > 1e-10 * scale {
            return Err(Error::NotReductive(leak));
        }

        let mut mu_p = Tensor3::zeros(p);
        let mut mu_nz = Vec::new();
        let mut adp = vec![DMatrix::zeros(p, p); p];
        for i in 0..p {
            for &(j, k, v) in algebra.row(k_dim + i) {
                if j >= k_dim && k >= k_dim {
                    let (j, k) = (j - k_dim, k - k_dim);
                    mu_p.set(i, j, k, v);
                    mu_nz.push((i, j, k, v));
                    adp[i][(k, j)] = v;
                }
            }
        }
        let mut adk = vec![DMatrix::zeros(p, p); k_dim];
        let mut skew: f64 = 0.0;
        for (a, m) in adk.iter_mut().enumerate() {
            for &(j, k, v) in algebra.row(a) {
                if j >= k_dim && k >= k_dim {
                    m[(k - k_dim, j - k_dim)] = v;
                }
            }
            skew = skew.max(linalg::max_abs(&(&*m + m.transpose())));
        }
        if skew > 1e-8 * scale {
            return Err(Error::NotInvariantMetric(skew));
        }

        let kil = killing_form(&algebra).matrix;
        let killing_p = kil.view((k_dim, k_dim), (p, p)).into_owned();
        Ok(Self {
            algebra,
            k_dim,
            basis,
            ip: DMatrix::identity(p, p),
            mu_p,
            mu_nz,
            adp,
            adk,
            killing_p,
        })
    }

    /// General constructor: `k` is spanned by the columns of `k_basis`, `p` is
    /// the `Q`-orthogonal complement of `k` inside the span of `k_basis` and
    /// `p_seed`, orthonormalized for `Q`.
    pub fn split_with_basis(
        l: &StructureTensor,
        k_basis: &DMatrix<f64>,
        p_seed: &DMatrix<f64>,
        q: &BilinearForm,
    ) -> Result<Self> {
        let n = l.dim();
        let kd = k_basis.ncols();
        if k_basis.nrows() != n || p_seed.nrows() != n || kd + p_seed.ncols() != n {
            return Err(Error::InvalidParameter("k and p bases must together span g".into()));
        }
        if q.matrix.nrows() != n || q.matrix.ncols() != n {
            return Err(Error::InvalidParameter(format!("Q must be {n}x{n}")));
        }
        let qm = &q.matrix;

        // Q-orthogonal projection of the seed off k
        let p_raw = if kd == 0 {
            p_seed.clone()
        } else {
            let kqk = k_basis.transpose() * qm * k_basis;
            let inv = kqk
                .clone()
                .try_inverse()
                .ok_or(Error::DegenerateRestriction(0.0))?;
            p_seed - k_basis * (inv * (k_basis.transpose() * qm * p_seed))
        };
        let gram = p_raw.transpose() * qm * &p_raw;
        let p_basis = if gram.nrows() == 0 {
            p_raw
        } else {
            let inv_sqrt = linalg::inv_sqrt_spd(&gram, 1e-12).map_err(Error::DegenerateRestriction)?;
            clean(&(p_raw * inv_sqrt))
        };

        let mut basis = DMatrix::zeros(n, n);
        basis.view_mut((0, 0), (n, kd)).copy_from(k_basis);
        basis.view_mut((0, kd), (n, n - kd)).copy_from(&p_basis);
        if kd > 0 {
            // closure of k, checked in the new coordinates
            let probe = l.change_basis(&basis)?;
            let idx: Vec<usize> = (0..kd).collect();
            let res = probe.closure_residual(&idx);
            if res > 1e-10 * probe.max_abs().max(1.0) {
                return Err(Error::NotASubalgebra(res));
            }
            return Self::from_working(probe, kd, basis);
        }
        let working = l.change_basis(&basis)?;
        Self::from_working(working, 0, basis)
    }

    /// Product space `G1 × G2 / K1 × K2` with working basis `k1, k2, p1, p2`.
    pub fn product(a: &Self, b: &Self) -> Result<Self> {
        let sum = StructureTensor::direct_sum(&a.algebra, &b.algebra);
        let (na, nb) = (a.algebra.dim(), b.algebra.dim());
        let mut order: Vec<usize> = (0..a.k_dim).collect();
        order.extend(na..na + b.k_dim);
        order.extend(a.k_dim..na);
        order.extend(na + b.k_dim..na + nb);
        let working = sum.restrict(&order)?;
        let mut basis = DMatrix::zeros(na + nb, na + nb);
        let mut block = DMatrix::zeros(na + nb, na + nb);
        block.view_mut((0, 0), (na, na)).copy_from(&a.basis);
        block.view_mut((na, na), (nb, nb)).copy_from(&b.basis);
        for (dst, &src) in order.iter().enumerate() {
            basis.set_column(dst, &block.column(src));
        }
        Self::from_working(working, a.k_dim + b.k_dim, basis)
    }

    /// The same space with the metric multiplied by `s > 0`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::InvalidParameter(format!("metric scale {s} must be positive")));
        }
        let n = self.algebra.dim();
        let mut d = DMatrix::identity(n, n);
        for i in self.k_dim..n {
            d[(i, i)] = 1.0 / s.sqrt();
        }
        let working = self.algebra.change_basis(&d)?;
        Self::from_working(working, self.k_dim, &self.basis * d)
    }

    /// Working-basis algebra (`k` first, then `p`).
    pub fn algebra(&self) -> &StructureTensor {
        &self.algebra
    }

    pub fn k_dim(&self) -> usize {
        self.k_dim
    }

    pub fn p_dim(&self) -> usize {
        self.algebra.dim() - self.k_dim
    }

    pub fn k_indices(&self) -> std::ops::Range<usize> {
        0..self.k_dim
    }

    pub fn p_indices(&self) -> std::ops::Range<usize> {
        self.k_dim..self.algebra.dim()
    }

    /// Columns are the working vectors in the input coordinates of `g`.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn ip(&self) -> &DMatrix<f64> {
        &self.ip
    }

    /// `mu_p[i][j][k] = <[X_i, X_j]_p, X_k>`.
    pub fn mu_p(&self) -> &Tensor3 {
        &self.mu_p
    }

    /// Nonzero entries of `mu_p`.
    pub fn mu_nonzeros(&self) -> &[(usize, usize, usize, f64)] {
        &self.mu_nz
    }

    /// `ad_p X_i` on `p`, column `j` holding `[X_i, X_j]_p`.
    pub fn adp(&self) -> &[DMatrix<f64>] {
        &self.adp
    }

    /// `ad Z_a` restricted to `p` for the `k` basis vectors.
    pub fn adk(&self) -> &[DMatrix<f64>] {
        &self.adk
    }

    /// Killing form of `g` restricted to `p`, as a matrix in the working basis.
    pub fn killing_p(&self) -> &DMatrix<f64> {
        &self.killing_p
    }

    /// `max_i |ad_p X_i + (ad_p X_i)^t|`; zero iff naturally reductive.
    pub fn nr_residual(&self) -> f64 {
        self.adp
            .iter()
            .map(|m| linalg::max_abs(&(m + m.transpose())))
            .fold(0.0, f64::max)
    }

    /// Largest `k`-component of `[k, p]`.
    pub fn reductivity_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for a in 0..self.k_dim {
            for &(j, k, v) in self.algebra.row(a) {
                if j >= self.k_dim && k < self.k_dim {
                    r = r.max(v.abs());
                }
            }
        }
        r
    }
}

fn clean(m: &DMatrix<f64>) -> DMatrix<f64> {
    let cut = 1e-15 * linalg::max_abs(m);
    m.map(|x| if x.abs() <= cut { 0.0 } else { x })
}

/// `g = k ⊕ p` with `k` spanned by the coordinate vectors `k_indices` and `p`
/// their `Q`-orthogonal complement.
pub fn reductive_split(l: &StructureTensor, k_indices: &[usize], q: &BilinearForm) -> Result<ReductiveSpace> {
    let n = l.dim();
    let mut in_k = vec![false; n];
    for &i in k_indices {
        if i >= n {
            return Err(Error::InvalidParameter(format!("k index {i} out of range for dim {n}")));
        }
        if in_k[i] {
            return Err(Error::InvalidParameter(format!("k index {i} listed twice")));
        }
        in_k[i] = true;
    }
    let res = l.closure_residual(k_indices);
    if res > 1e-12 * l.max_abs().max(1.0) {
        return Err(Error::NotASubalgebra(res));
    }
    let k_basis = unit_columns(n, k_indices);
    let rest: Vec<usize> = (0..n).filter(|&i| !in_k[i]).collect();
    let p_seed = unit_columns(n, &rest);
    ReductiveSpace::split_with_basis(l, &k_basis, &p_seed, q)
}

fn unit_columns(n: usize, idx: &[usize]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, idx.len());
    for (c, &i) in idx.iter().enumerate() {
        m[(i, c)] = 1.0;
    }
    m
}

/// `Q_t` on `h ⊕ k`: `-Kil_h` on `h` and `t/(1-t) (-Kil_h|_k)` on the `k` copy.
pub fn jensen_form(h: &StructureTensor, k_indices: &[usize], t: f64) -> Result<BilinearForm> {
    check_t(t)?;
    let nh = h.dim();
    let nk = k_indices.len();
    let b = BilinearForm::neg_killing(h).matrix;
    let s = t / (1.0 - t);
    let mut q = DMatrix::zeros(nh + nk, nh + nk);
    q.view_mut((0, 0), (nh, nh)).copy_from(&b);
    for (x, &i) in k_indices.iter().enumerate() {
        for (y, &j) in k_indices.iter().enumerate() {
            q[(nh + x, nh + y)] = s * b[(i, j)];
        }
    }
    Ok(BilinearForm {
        matrix: q,
        label: FormLabel::CustomQ,
    })
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || t == 1.0 || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("Jensen parameter t = {t} must be positive and != 1")));
    }
    Ok(())
}

/// The Jensen metric `g_t` on `H` as the naturally reductive space
/// `(H × K)/ΔK` with `p_t = p_a ⊕ {(sZ, -Z)}`, `s = t/(1-t)`.
///
/// Working `p` basis: the `a` directions (in `h` coordinate order) followed by
/// the `k` directions.
pub fn jensen_deformed_space(h: &StructureTensor, k_indices: &[usize], t: f64) -> Result<ReductiveSpace> {
    check_t(t)?;
    let kalg = h.restrict(k_indices)?;
    let nh = h.dim();
    let nk = k_indices.len();
    let g = StructureTensor::direct_sum(h, &kalg);
    let q = jensen_form(h, k_indices, t)?;
    let s = t / (1.0 - t);

    let mut in_k = vec![false; nh];
    for &i in k_indices {
        in_k[i] = true;
    }
    let a_idx: Vec<usize> = (0..nh).filter(|&i| !in_k[i]).collect();
    let n = nh + nk;
    let mut k_basis = DMatrix::zeros(n, nk);
    let mut p_seed = DMatrix::zeros(n, a_idx.len() + nk);
    for (x, &i) in k_indices.iter().enumerate() {
        k_basis[(i, x)] = 1.0;
        k_basis[(nh + x, x)] = 1.0;
        p_seed[(i, a_idx.len() + x)] = s;
        p_seed[(nh + x, a_idx.len() + x)] = -1.0;
    }
    for (x, &i) in a_idx.iter().enumerate() {
        p_seed[(i, x)] = 1.0;
    }
    ReductiveSpace::split_with_basis(&g, &k_basis, &p_seed, &q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_core::{build_classical, ClassicalFamily};

    #[test]
    fn lie_group_case_keeps_everything_in_p() {
        let l = build_classical(ClassicalFamily::Su, 2).unwrap();
        let r = reductive_split(&l, &[], &BilinearForm::neg_killing(&l)).unwrap();
        assert_eq!(r.p_dim(), 3);
        assert_eq!(r.k_dim(), 0);
        // Killing metric: ad_p skew, -Kil restricted to p is the identity
        assert!(r.nr_residual() < 1e-14);
        assert!((-r.killing_p() - DMatrix::identity(3, 3)).amax() < 1e-14);
    }

    #[test]
    fn su3_torus_split_is_reductive() {
        let l = build_classical(ClassicalFamily::Su, 3).unwrap();
        // Cartan directions are the last two basis vectors
        let r = reductive_split(&l, &[6, 7], &BilinearForm::neg_killing(&l)).unwrap();
        assert_eq!(r.p_dim(), 6);
        assert!(r.reductivity_residual() < 1e-12);
        // oracle: brackets of torus with the root vectors, in input coordinates
        for &a in &[6usize, 7] {
            for i in 0..6 {
                let mut u = vec![0.0; 8];
                let mut v = vec![0.0; 8];
                u[a] = 1.0;
                v[i] = 1.0;
                let br = l.bracket(&u, &v);
                assert!(br[6].abs() < 1e-12 && br[7].abs() < 1e-12);
            }
        }
    }

    #[test]
    fn abelian_algebra_has_no_projected_bracket() {
        let l = StructureTensor::abelian(4);
        let r = reductive_split(&l, &[1], &BilinearForm::custom(DMatrix::identity(4, 4))).unwrap();
        assert!(r.mu_nonzeros().is_empty());
        assert_eq!(r.p_dim(), 3);
    }

    #[test]
    fn non_subalgebra_is_rejected() {
        let l = build_classical(ClassicalFamily::So, 4).unwrap();
        let err = reductive_split(&l, &[0, 1], &BilinearForm::neg_killing(&l)).unwrap_err();
        assert!(matches!(err, Error::NotASubalgebra(_)));
    }

    #[test]
    fn indefinite_q_on_p_is_rejected() {
        let l = build_classical(ClassicalFamily::Su, 2).unwrap();
        let q = BilinearForm::custom(DMatrix::from_diagonal(&nalgebra::dvector![1.0, -1.0, 1.0]));
        let err = reductive_split(&l, &[], &q).unwrap_err();
        assert!(matches!(err, Error::DegenerateRestriction(_)));
    }

    fn so6_blocks() -> (StructureTensor, Vec<usize>) {
        let h = build_classical(ClassicalFamily::So, 6).unwrap();
        // L_ab with a, b in {0,1,2} or both in {3,4,5}; lexicographic order
        let mut idx = Vec::new();
        let mut n = 0;
        for a in 0..6 {
            for b in (a + 1)..6 {
                if (a < 3) == (b < 3) {
                    idx.push(n);
                }
                n += 1;
            }
        }
        (h, idx)
    }

    #[test]
    fn jensen_space_is_naturally_reductive() {
        let (h, k) = so6_blocks();
        let r = jensen_deformed_space(&h, &k, 1.0 / 7.0).unwrap();
        assert_eq!(r.k_dim(), 6);
        assert_eq!(r.p_dim(), 15);
        assert!(r.nr_residual() < 1e-12);
    }

    #[test]
    fn jensen_form_matches_killing_on_a_and_is_positive_for_t_below_one() {
        let (h, k) = so6_blocks();
        let b = BilinearForm::neg_killing(&h).matrix;
        for t in [0.1, 0.5, 0.9] {
            let q = jensen_form(&h, &k, t).unwrap().matrix;
            let (vals, _) = linalg::eigh(&q);
            assert!(vals[0] > 0.0);
            let r = jensen_deformed_space(&h, &k, t).unwrap();
            // the a-directions of p are unit vectors of h rescaled by -Kil_h
            for x in 0..9 {
                let col = r.basis().column(6 + x);
                let v = col.rows(0, 15).into_owned();
                let norm = (v.transpose() * &b * &v)[(0, 0)];
                assert!((norm - 1.0).abs() < 1e-12);
                assert!(col.rows(15, 6).amax() == 0.0);
            }
        }
        let q = jensen_form(&h, &k, 2.0).unwrap().matrix;
        assert!(linalg::eigh(&q).0[0] < 0.0);
        assert!(jensen_deformed_space(&h, &k, 1.0).is_err());
        assert!(jensen_deformed_space(&h, &k, 0.0).is_err());
    }

    #[test]
    fn product_orders_k_before_p() {
        let l = build_classical(ClassicalFamily::Su, 3).unwrap();
        let r1 = reductive_split(&l, &[6, 7], &BilinearForm::neg_killing(&l)).unwrap();
        let s = build_classical(ClassicalFamily::Su, 2).unwrap();
        let r2 = reductive_split(&s, &[], &BilinearForm::neg_killing(&s)).unwrap();
        let p = ReductiveSpace::product(&r1, &r2).unwrap();
        assert_eq!(p.k_dim(), 2);
        assert_eq!(p.p_dim(), 9);
        assert!(p.reductivity_residual() < 1e-14);
    }

    #[test]
    fn scaling_the_metric_scales_the_bracket() {
        let l = build_classical(ClassicalFamily::Su, 2).unwrap();
        let r = reductive_split(&l, &[], &BilinearForm::neg_killing(&l)).unwrap();
        let r4 = r.scaled(4.0).unwrap();
        assert!((r4.mu_p().norm_sq() - r.mu_p().norm_sq() / 4.0).abs() < 1e-12);
    }
}
