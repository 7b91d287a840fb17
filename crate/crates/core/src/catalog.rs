//! Built-in spaces with closed-form answers: block-diagonal flag families,
//! Jensen deformations, Killing metrics on simple groups, and the Johnson
//! graph that governs the family spectra.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::curvature_pack;
use crate::error::{Error, Result};
use crate::lichnerowicz::{casimir_sym, structural_constants};
use crate::lie_core::{
    build_classical, classical_basis, jensen_deformed_space, reductive_split, BasisLabel, BilinearForm,
    ClassicalFamily, ReductiveSpace,
};
use crate::linalg;
use crate::stability::{
    analyze, classify_spectrum, AnalyzeOptions, Classification, CriticalPointType, StabilityReport, EIG_TOL,
};

/// `G/K` with `K` block diagonal: `SU(nk)/S(U(k)^n)`, `Sp(nk)/Sp(k)^n`,
/// `SO(nk)/S(O(k)^n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    SuBlock,
    SpBlock,
    SoBlock,
}

impl FamilyKind {
    pub fn classical(self) -> ClassicalFamily {
        match self {
            Self::SuBlock => ClassicalFamily::Su,
            Self::SpBlock => ClassicalFamily::Sp,
            Self::SoBlock => ClassicalFamily::So,
        }
    }

    pub fn min_k(self) -> usize {
        match self {
            Self::SoBlock => 3,
            _ => 1,
        }
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "su" => Ok(Self::SuBlock),
            "sp" => Ok(Self::SpBlock),
            "so" => Ok(Self::SoBlock),
            other => Err(Error::InvalidParameter(format!("unknown family '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: FamilyKind,
    pub n: usize,
    pub k: usize,
    /// Dimension of each summand `p_ij`.
    pub d: usize,
    pub c_over_d: f64,
    pub two_rho: f64,
    pub lambda_p: f64,
    pub lambda_p_max: f64,
    pub mult_lambda_p: usize,
    pub mult_lambda_p_max: usize,
}

impl FamilySpec {
    pub fn new(family: FamilyKind, n: usize, k: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::OutOfRange {
                family: family.classical().name(),
                n,
                min: 3,
            });
        }
        if k < family.min_k() {
            return Err(Error::InvalidParameter(format!(
                "{} block family needs k >= {}, got {k}",
                family.classical().name(),
                family.min_k()
            )));
        }
        let (nf, kf) = (n as f64, k as f64);
        let (d, c_over_d) = match family {
            FamilyKind::SuBlock => (2 * k * k, 1.0 / (2.0 * nf)),
            FamilyKind::SpBlock => (4 * k * k, kf / (2.0 * (nf * kf + 1.0))),
            FamilyKind::SoBlock => (k * k, kf / (2.0 * (nf * kf - 2.0))),
        };
        let two_rho = 1.0 - c_over_d * (nf - 2.0);
        let (lambda_p, lambda_p_max, mult_lambda_p, mult_lambda_p_max) = if n == 3 {
            (3.0 * c_over_d, 3.0 * c_over_d, 2, 2)
        } else {
            (nf * c_over_d, 2.0 * (nf - 1.0) * c_over_d, n - 1, n * (n - 3) / 2)
        };
        Ok(Self {
            family,
            n,
            k,
            d,
            c_over_d,
            two_rho,
            lambda_p,
            lambda_p_max,
            mult_lambda_p,
            mult_lambda_p_max,
        })
    }

    pub fn summand_count(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    /// Spectrum of `L_p` on `W`, ascending, with multiplicity.
    pub fn analytic_eigenvalues(&self) -> Vec<f64> {
        if self.n == 3 {
            return vec![self.lambda_p; 2];
        }
        let mut out = vec![self.lambda_p; self.mult_lambda_p];
        out.extend(std::iter::repeat_n(self.lambda_p_max, self.mult_lambda_p_max));
        out
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, k, nk) = (self.n, self.k, self.n * self.k);
        match self.family {
            FamilyKind::SuBlock if k == 1 => write!(f, "SU({nk})/T"),
            FamilyKind::SuBlock => write!(f, "SU({nk})/S(U({k})^{n})"),
            FamilyKind::SpBlock => write!(f, "Sp({nk})/Sp({k})^{n}"),
            FamilyKind::SoBlock => write!(f, "SO({nk})/S(O({k})^{n})"),
        }
    }
}

pub fn family_analytic(spec: &FamilySpec) -> StabilityReport {
    classify_spectrum(&spec.analytic_eigenvalues(), spec.two_rho / 2.0, EIG_TOL)
}

/// Indices of the block subalgebra `k` in the frozen classical basis.
pub fn family_k_indices(spec: &FamilySpec) -> Result<Vec<usize>> {
    let (_, basis) = classical_basis(spec.family.classical(), spec.n * spec.k)?;
    let k = spec.k;
    Ok(basis
        .iter()
        .enumerate()
        .filter(|(_, e)| match e.label {
            BasisLabel::Pair(a, b) => a / k == b / k,
            BasisLabel::Diagonal(_) | BasisLabel::Cartan(_) => true,
        })
        .map(|(i, _)| i)
        .collect())
}

/// The standard (`Q = -Kil`) metric on the family space.
pub fn family_space(spec: &FamilySpec) -> Result<ReductiveSpace> {
    let l = build_classical(spec.family.classical(), spec.n * spec.k)?;
    let k = family_k_indices(spec)?;
    reductive_split(&l, &k, &BilinearForm::neg_killing(&l))
}

/// Block pair `(a, b)` of each isotropy summand, in decomposition order.
pub fn family_summand_pairs(spec: &FamilySpec, r: &ReductiveSpace, summands: &[DMatrix<f64>]) -> Result<Vec<(usize, usize)>> {
    let (_, basis) = classical_basis(spec.family.classical(), spec.n * spec.k)?;
    let kd = r.k_dim();
    let k = spec.k;
    summands
        .iter()
        .map(|s| {
            let p_vec = s.column(0);
            let g_vec = r.basis().columns(kd, r.p_dim()) * p_vec;
            let idx = g_vec.iamax();
            match basis[idx].label {
                BasisLabel::Pair(a, b) if a / k != b / k => Ok((a / k, b / k)),
                _ => Err(Error::InvalidParameter("summand not attached to an off-diagonal block".into())),
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct FamilyNumeric {
    pub report: StabilityReport,
    /// Sorted eigenvalues of `L_p` on `W`.
    pub eigenvalues: Vec<f64>,
    pub b_constants: Vec<f64>,
    pub method_diffs: Vec<f64>,
    /// Max entry of `[L_p] - (c/d)(2(n-2) I - Adj)`.
    pub johnson_residual: f64,
}

/// Full numeric pipeline on the family space.
pub fn family_numeric(spec: &FamilySpec, opts: &AnalyzeOptions) -> Result<FamilyNumeric> {
    let r = family_space(spec)?;
    let a = analyze(&r, opts)?;
    for (i, &b) in a.decomposition.b_constants.iter().enumerate() {
        if (b - 1.0).abs() > 1e-8 {
            return Err(Error::NotStandard { summand: i, value: b });
        }
    }
    let pairs = family_summand_pairs(spec, &r, &a.decomposition.summands)?;
    let (adj, vertices) = johnson_adjacency(spec.n);
    let pos: Vec<usize> = pairs
        .iter()
        .map(|p| vertices.iter().position(|v| v == p).unwrap_or(usize::MAX))
        .collect();
    if pos.contains(&usize::MAX) || pos.len() != vertices.len() {
        return Err(Error::InvalidParameter("summands do not match the block pairs".into()));
    }
    let m = pos.len();
    let lp = &a.matrices[0].matrix;
    let mut johnson_residual: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            let diag = if i == j { 2.0 * (spec.n as f64 - 2.0) } else { 0.0 };
            let expect = spec.c_over_d * (diag - adj[(pos[i], pos[j])]);
            johnson_residual = johnson_residual.max((lp[(i, j)] - expect).abs());
        }
    }
    let (eigenvalues, _) = linalg::eigh(&a.l_on_w);
    Ok(FamilyNumeric {
        report: a.report,
        eigenvalues,
        b_constants: a.decomposition.b_constants,
        method_diffs: a.method_diffs.iter().map(|d| d.2).collect(),
        johnson_residual,
    })
}

/// `J(n, 2)`: vertices are pairs `a < b`, adjacent when they share one index.
pub fn johnson_adjacency(n: usize) -> (DMatrix<f64>, Vec<(usize, usize)>) {
    let mut vertices = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            vertices.push((a, b));
        }
    }
    let m = vertices.len();
    let adj = DMatrix::from_fn(m, m, |i, j| {
        let (x, y) = (vertices[i], vertices[j]);
        let shared = [x.0 == y.0, x.0 == y.1, x.1 == y.0, x.1 == y.1].iter().filter(|&&s| s).count();
        if i != j && shared == 1 {
            1.0
        } else {
            0.0
        }
    });
    (adj, vertices)
}

/// Closed-form adjacency spectrum of `J(n, 2)`, descending.
pub fn johnson_graph_spectrum(n: usize) -> Result<Vec<(f64, usize)>> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("Johnson graph J(n,2) needs n >= 3, got {n}")));
    }
    if n == 3 {
        return Ok(vec![(2.0, 1), (-1.0, 2)]);
    }
    let nf = n as f64;
    Ok(vec![(2.0 * (nf - 2.0), 1), (nf - 4.0, n - 1), (-2.0, n * (n - 3) / 2)])
}

/// Max deviation between the closed form and a dense diagonalization.
pub fn johnson_cross_check(n: usize) -> Result<f64> {
    let closed = johnson_graph_spectrum(n)?;
    let mut expected: Vec<f64> = closed
        .iter()
        .flat_map(|&(v, m)| std::iter::repeat_n(v, m))
        .collect();
    expected.sort_by(f64::total_cmp);
    let (vals, _) = linalg::eigh(&johnson_adjacency(n).0);
    Ok(vals
        .iter()
        .zip(&expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Subgroup pairs `H ⊃ K` with a shipped Jensen deformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JensenEmbedding {
    /// `SO(6) ⊃ SO(3) × SO(3)`
    So6,
    /// `SO(8) ⊃ SO(4) × SO(4)`
    So8,
    /// `Sp(2) ⊃ Sp(1) × Sp(1)`
    Sp2,
}

impl JensenEmbedding {
    pub const ALL: [Self; 3] = [Self::So6, Self::So8, Self::Sp2];

    pub fn id(self) -> &'static str {
        match self {
            Self::So6 => "so6",
            Self::So8 => "so8",
            Self::Sp2 => "sp2",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::So6 => "SO(6) > SO(3)xSO(3)",
            Self::So8 => "SO(8) > SO(4)xSO(4)",
            Self::Sp2 => "Sp(2) > Sp(1)xSp(1)",
        }
    }

    fn group(self) -> (ClassicalFamily, usize, usize) {
        match self {
            Self::So6 => (ClassicalFamily::So, 6, 3),
            Self::So8 => (ClassicalFamily::So, 8, 4),
            Self::Sp2 => (ClassicalFamily::Sp, 2, 1),
        }
    }

    /// `K = H_m × H_m ⊂ H_{2m}` as block-diagonal basis indices.
    pub fn k_indices(self) -> Result<Vec<usize>> {
        let (f, n, m) = self.group();
        let (_, basis) = classical_basis(f, n)?;
        Ok(basis
            .iter()
            .enumerate()
            .filter(|(_, e)| match e.label {
                BasisLabel::Pair(a, b) => a / m == b / m,
                BasisLabel::Diagonal(_) => true,
                BasisLabel::Cartan(_) => false,
            })
            .map(|(i, _)| i)
            .collect())
    }

    pub fn h_algebra(self) -> Result<crate::lie_core::StructureTensor> {
        let (f, n, _) = self.group();
        build_classical(f, n)
    }
}

impl FromStr for JensenEmbedding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "so6" => Ok(Self::So6),
            "so8" => Ok(Self::So8),
            "sp2" => Ok(Self::Sp2),
            other => Err(Error::InvalidParameter(format!("unknown Jensen embedding '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JensenSpec {
    pub embedding: JensenEmbedding,
    /// `dim a`, the complement of `k` in `h`.
    pub d: usize,
    pub k_dim: usize,
    /// Number of simple ideals of `k`.
    pub r: usize,
    /// `Kil_k = c Kil_h|_k` on every ideal.
    pub c: f64,
    pub t_e: f64,
    pub two_rho: f64,
    /// `(eigenvalue, multiplicity)` of `L_p` on `sym(p)^K`, the zero being `I`.
    pub spectrum: Vec<(f64, usize)>,
}

/// Closed-form data. `c` is computed from the embedding's Killing forms.
pub fn jensen_spec(embedding: JensenEmbedding) -> Result<JensenSpec> {
    let h = embedding.h_algebra()?;
    let k_idx = embedding.k_indices()?;
    let cs = killing_ratios(&h, &k_idx)?;
    let c = cs[0];
    let d = h.dim() - k_idx.len();
    let (df, kf) = (d as f64, k_idx.len() as f64);
    if c >= (df + 2.0 * kf) / (2.0 * df + 2.0 * kf) {
        return Err(Error::InvalidParameter(format!("c = {c} leaves no Einstein parameter t < 1")));
    }
    let t_e = df * c / ((df + 2.0 * kf) * (1.0 - c));
    let r = cs.len();
    let two_rho = c / (2.0 * t_e) + (1.0 - c) * t_e / 2.0;
    let low = t_e * (1.0 - c);
    let top = low * (1.0 + kf / df);
    let mut spectrum = vec![(0.0, 1)];
    if r > 1 {
        spectrum.push((low, r - 1));
    }
    spectrum.push((top, 1));
    Ok(JensenSpec {
        embedding,
        d,
        k_dim: k_idx.len(),
        r,
        c,
        t_e,
        two_rho,
        spectrum,
    })
}

/// Ratio `Kil_k(Z, Z) / Kil_h(Z, Z)` on each simple ideal of `k`.
///
/// Ideals are found as the isotropy summands of `K` acting on itself, i.e.
/// of `(K × K)/ΔK`.
fn killing_ratios(h: &crate::lie_core::StructureTensor, k_idx: &[usize]) -> Result<Vec<f64>> {
    let kalg = h.restrict(k_idx)?;
    let kil_h = crate::lie_core::killing_form(h).matrix;
    let kil_k = crate::lie_core::killing_form(&kalg).matrix;
    let m = kalg.dim();
    let doubled = crate::lie_core::StructureTensor::direct_sum(&kalg, &kalg);
    let mut diag = DMatrix::zeros(2 * m, m);
    let mut anti = DMatrix::zeros(2 * m, m);
    for i in 0..m {
        diag[(i, i)] = 1.0;
        diag[(m + i, i)] = 1.0;
        anti[(i, i)] = 1.0;
        anti[(m + i, i)] = -1.0;
    }
    let q = BilinearForm::neg_killing(&doubled);
    let self_space = ReductiveSpace::split_with_basis(&doubled, &diag, &anti, &q)?;
    let dec = crate::isotropy::isotropy_decomposition(&self_space)?;
    let mut out = Vec::new();
    for s in &dec.summands {
        let g = self_space.basis().columns(m, m) * s.column(0);
        let z = g.rows(0, m).into_owned();
        let num = (z.transpose() * &kil_k * &z)[(0, 0)];
        let mut den = 0.0;
        for (x, &i) in k_idx.iter().enumerate() {
            for (y, &j) in k_idx.iter().enumerate() {
                den += z[x] * kil_h[(i, j)] * z[y];
            }
        }
        out.push(num / den);
    }
    let spread = out.iter().fold(0.0f64, |m, c| m.max((c - out[0]).abs()));
    if out.is_empty() || spread > 1e-8 {
        return Err(Error::NonUniformC(out));
    }
    Ok(out)
}

pub fn jensen_analytic(spec: &JensenSpec) -> Result<StabilityReport> {
    if !(spec.t_e > 0.0 && spec.t_e < 1.0) {
        return Err(Error::NoEinsteinParameter);
    }
    let eigs: Vec<f64> = spec
        .spectrum
        .iter()
        .filter(|(v, _)| *v != 0.0)
        .flat_map(|&(v, m)| std::iter::repeat_n(v, m))
        .collect();
    Ok(classify_spectrum(&eigs, spec.two_rho / 2.0, EIG_TOL))
}

/// The Jensen space at `t`, or at the closed-form Einstein parameter.
pub fn jensen_deformed_space_for(embedding: JensenEmbedding, t: Option<f64>) -> Result<ReductiveSpace> {
    let t = match t {
        Some(t) => t,
        None => jensen_spec(embedding)?.t_e,
    };
    jensen_deformed_space(&embedding.h_algebra()?, &embedding.k_indices()?, t)
}

/// `avg Ric|_a - avg Ric|_k` for the Jensen metric at `t`.
fn jensen_ricci_gap(embedding: JensenEmbedding, t: f64) -> Result<f64> {
    let h = embedding.h_algebra()?;
    let k_idx = embedding.k_indices()?;
    let r = jensen_deformed_space(&h, &k_idx, t)?;
    let pack = curvature_pack(&r)?;
    let d = h.dim() - k_idx.len();
    let p = r.p_dim();
    let ric = &pack.ricci;
    let avg_a = (0..d).map(|i| ric[(i, i)]).sum::<f64>() / d as f64;
    let avg_k = (d..p).map(|i| ric[(i, i)]).sum::<f64>() / (p - d) as f64;
    Ok(avg_a - avg_k)
}

/// Einstein parameter `t ∈ (0, 1)` of the Jensen family, found by a sign scan
/// and bisection on the Ricci gap.
pub fn jensen_numeric_t(embedding: JensenEmbedding) -> Result<f64> {
    let grid: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
    let gaps: Vec<f64> = grid
        .iter()
        .map(|&t| jensen_ricci_gap(embedding, t))
        .collect::<Result<_>>()?;
    let i = (0..grid.len() - 1)
        .find(|&i| gaps[i] == 0.0 || gaps[i].signum() != gaps[i + 1].signum())
        .ok_or(Error::NoEinsteinParameter)?;
    let (mut lo, mut hi, mut flo) = (grid[i], grid[i + 1], gaps[i]);
    if flo == 0.0 {
        return Ok(lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = jensen_ricci_gap(embedding, mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone)]
pub struct JensenNumeric {
    pub t: f64,
    pub report: StabilityReport,
    /// Sorted eigenvalues of `L_p` on `sym(p)^K` (including the `I` direction).
    pub full_spectrum: Vec<f64>,
    /// Max deviation of `[jjj]`, `[jaa]` from their closed forms and of the
    /// remaining triples from zero.
    pub ijk_deviation: f64,
    pub c_values: Vec<f64>,
    pub method_diffs: Vec<f64>,
}

/// Pipeline on `(H × K)/ΔK` at `t` (the numeric Einstein parameter if `None`).
pub fn jensen_numeric(embedding: JensenEmbedding, t: Option<f64>, opts: &AnalyzeOptions) -> Result<JensenNumeric> {
    let t = match t {
        Some(t) => t,
        None => jensen_numeric_t(embedding)?,
    };
    let h = embedding.h_algebra()?;
    let k_idx = embedding.k_indices()?;
    let c_values = killing_ratios(&h, &k_idx)?;
    let c = c_values[0];
    let r = jensen_deformed_space(&h, &k_idx, t)?;
    let a = analyze(&r, opts)?;
    let dec = &a.decomposition;
    let nh = h.dim();
    let kd = r.k_dim();
    let p_vectors = r.basis().columns(kd, r.p_dim());
    // a-summand: no component along the k copy
    let a_index = dec
        .summands
        .iter()
        .position(|s| {
            let g = p_vectors * s;
            g.rows(nh, g.nrows() - nh).amax() < 1e-10
        })
        .ok_or_else(|| Error::InvalidParameter("no isotropy summand inside h".into()))?;
    let sc = match &a.structural_constants {
        Some(sc) => sc.clone(),
        None => structural_constants(&r, dec),
    };
    let rr = dec.r();
    let mut dev: f64 = 0.0;
    for i in 0..rr {
        for j in 0..rr {
            for l in 0..rr {
                let val = sc.get(i, j, l);
                let mut idx = [i, j, l];
                idx.sort_unstable();
                let n_a = idx.iter().filter(|&&x| x == a_index).count();
                let expect = if n_a == 0 && i == j && j == l {
                    (2.0 * t - 1.0).powi(2) / t * c * dec.dims[i] as f64
                } else if n_a == 2 {
                    let jj = *idx.iter().find(|&&x| x != a_index).unwrap_or(&a_index);
                    t * (1.0 - c) * dec.dims[jj] as f64
                } else if n_a == 0 || n_a == 1 {
                    0.0
                } else {
                    // [aaa] has no closed form here
                    continue;
                };
                dev = dev.max((val - expect).abs());
            }
        }
    }
    let full_spectrum = a.matrices[0].eigenvalues();
    Ok(JensenNumeric {
        t,
        report: a.report,
        full_spectrum,
        ijk_deviation: dev,
        c_values,
        method_diffs: a.method_diffs.iter().map(|d| d.2).collect(),
    })
}

/// Killing metric on a compact simple group, `L_p = ½ Cas` and `2ρ = ½`.
#[derive(Debug, Clone)]
pub struct KillingReport {
    pub family: ClassicalFamily,
    pub n: usize,
    /// First positive eigenvalue of the Casimir operator on `sym(g)`.
    pub lambda_tau: f64,
    pub report: StabilityReport,
}

pub fn killing_metric_report(family: ClassicalFamily, n: usize) -> Result<KillingReport> {
    let l = build_classical(family, n)?;
    let cas = casimir_sym(&l)?;
    let mut vals = cas.eigenvalues();
    vals.iter_mut().for_each(|v| *v *= 0.5);
    // drop the I direction, the only kernel vector for simple g
    let zero = (0..vals.len())
        .min_by(|&a, &b| vals[a].abs().total_cmp(&vals[b].abs()))
        .ok_or_else(|| Error::InvalidParameter("empty algebra".into()))?;
    vals.remove(zero);
    let lambda_tau = 2.0 * vals.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(KillingReport {
        family,
        n,
        lambda_tau,
        report: classify_spectrum(&vals, 0.25, EIG_TOL),
    })
}

/// Closed-form `λ_τ` for the classical simple algebras, using low-rank
/// isomorphisms where the family formula does not apply.
pub fn lambda_tau_closed(family: ClassicalFamily, n: usize) -> Option<f64> {
    let nf = n as f64;
    match (family, n) {
        (ClassicalFamily::Su, 2) | (ClassicalFamily::So, 3) | (ClassicalFamily::Sp, 1) => Some(3.0),
        (ClassicalFamily::Su, n) if n >= 3 => Some(1.0),
        (ClassicalFamily::So, 4) => None,
        (ClassicalFamily::So, 5) => lambda_tau_closed(ClassicalFamily::Sp, 2),
        (ClassicalFamily::So, 6) => Some(1.0),
        (ClassicalFamily::So, n) if n >= 7 => Some(nf / (nf - 2.0)),
        (ClassicalFamily::Sp, n) if n >= 2 => Some(nf / (nf + 1.0)),
        _ => None,
    }
}

/// Stability type of the Killing metric predicted by `λ_τ` against `1`.
pub fn killing_type_closed(family: ClassicalFamily, n: usize) -> Option<Classification> {
    let lt = lambda_tau_closed(family, n)?;
    Some(if (lt - 1.0).abs() < 1e-12 {
        Classification::GNeutrallyStable
    } else if lt > 1.0 {
        Classification::GStable
    } else {
        Classification::GUnstable
    })
}

pub fn algebra_name(family: ClassicalFamily, n: usize) -> String {
    format!("{}({n})", family.name())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub algebra: String,
    pub expected_lambda_tau: f64,
    pub computed_lambda_tau: f64,
    pub expected_type: Classification,
    pub computed_type: Classification,
    pub nullity: usize,
    pub coindex: usize,
    pub pass: bool,
}

/// Algebras of the Killing-metric table.
pub const TABLE1_ALGEBRAS: [(ClassicalFamily, usize); 9] = [
    (ClassicalFamily::Su, 2),
    (ClassicalFamily::Su, 3),
    (ClassicalFamily::Su, 4),
    (ClassicalFamily::Su, 5),
    (ClassicalFamily::So, 7),
    (ClassicalFamily::So, 8),
    (ClassicalFamily::So, 9),
    (ClassicalFamily::Sp, 2),
    (ClassicalFamily::Sp, 3),
];

pub fn table1_row(family: ClassicalFamily, n: usize) -> Result<Table1Row> {
    let expected_lambda_tau = lambda_tau_closed(family, n)
        .ok_or_else(|| Error::InvalidParameter(format!("{} is not simple", algebra_name(family, n))))?;
    let expected_type = killing_type_closed(family, n).unwrap_or(Classification::GStable);
    let k = killing_metric_report(family, n)?;
    let nullity_ok = match family {
        ClassicalFamily::Su if n >= 3 => k.report.nullity == n * n - 1,
        _ => true,
    };
    let pass = (k.lambda_tau - expected_lambda_tau).abs() <= 1e-6
        && k.report.classification == expected_type
        && nullity_ok;
    Ok(Table1Row {
        algebra: algebra_name(family, n),
        expected_lambda_tau,
        computed_lambda_tau: k.lambda_tau,
        expected_type,
        computed_type: k.report.classification,
        nullity: k.report.nullity,
        coindex: k.report.coindex,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table2Row {
    pub space: String,
    pub n: usize,
    pub k: usize,
    pub expected_critical_point: CriticalPointType,
    pub expected_coindex: usize,
    pub computed_critical_point: CriticalPointType,
    pub computed_coindex: usize,
    pub classification: Classification,
    /// Max deviation of the numeric spectrum on `W` from the closed form.
    pub spectrum_deviation: f64,
    pub pass: bool,
}

/// Instances of the flag-family table with `nk <= 12`, with their printed
/// critical-point type and coindex.
pub const TABLE2_ROWS: [(FamilyKind, usize, usize, CriticalPointType, usize); 13] = [
    (FamilyKind::SuBlock, 3, 1, CriticalPointType::LocalMin, 2),
    (FamilyKind::SuBlock, 3, 2, CriticalPointType::LocalMin, 2),
    (FamilyKind::SuBlock, 4, 1, CriticalPointType::Degenerate, 3),
    (FamilyKind::SuBlock, 4, 2, CriticalPointType::Degenerate, 3),
    (FamilyKind::SuBlock, 5, 1, CriticalPointType::Saddle, 4),
    (FamilyKind::SpBlock, 3, 1, CriticalPointType::LocalMin, 2),
    (FamilyKind::SpBlock, 3, 2, CriticalPointType::LocalMin, 2),
    (FamilyKind::SpBlock, 4, 1, CriticalPointType::LocalMin, 5),
    (FamilyKind::SpBlock, 5, 1, CriticalPointType::LocalMin, 9),
    (FamilyKind::SpBlock, 5, 2, CriticalPointType::Degenerate, 4),
    (FamilyKind::SpBlock, 6, 1, CriticalPointType::Degenerate, 5),
    (FamilyKind::SoBlock, 3, 3, CriticalPointType::LocalMin, 2),
    (FamilyKind::SoBlock, 4, 3, CriticalPointType::Saddle, 3),
];

pub fn table2_row(
    family: FamilyKind,
    n: usize,
    k: usize,
    expected: (CriticalPointType, usize),
    opts: &AnalyzeOptions,
) -> Result<Table2Row> {
    let spec = FamilySpec::new(family, n, k)?;
    let num = family_numeric(&spec, opts)?;
    let analytic = spec.analytic_eigenvalues();
    let spectrum_deviation = if analytic.len() == num.eigenvalues.len() {
        num.eigenvalues
            .iter()
            .zip(&analytic)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let pass = num.report.critical_point_type == expected.0
        && num.report.coindex == expected.1
        && spectrum_deviation <= 1e-8;
    Ok(Table2Row {
        space: spec.to_string(),
        n,
        k,
        expected_critical_point: expected.0,
        expected_coindex: expected.1,
        computed_critical_point: num.report.critical_point_type,
        computed_coindex: num.report.coindex,
        classification: num.report.classification,
        spectrum_deviation,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JensenRow {
    pub embedding: String,
    pub c: f64,
    pub expected_t_e: f64,
    pub computed_t_e: f64,
    pub expected_two_rho: f64,
    pub computed_two_rho: f64,
    pub expected_coindex: usize,
    pub computed_coindex: usize,
    pub spectrum_deviation: f64,
    pub ijk_deviation: f64,
    pub classification: Classification,
    pub critical_point: CriticalPointType,
    pub pass: bool,
}

pub fn jensen_row(embedding: JensenEmbedding, opts: &AnalyzeOptions) -> Result<JensenRow> {
    let spec = jensen_spec(embedding)?;
    let num = jensen_numeric(embedding, None, opts)?;
    let mut expected: Vec<f64> = spec
        .spectrum
        .iter()
        .flat_map(|&(v, m)| std::iter::repeat_n(v, m))
        .collect();
    expected.sort_by(f64::total_cmp);
    let spectrum_deviation = if expected.len() == num.full_spectrum.len() {
        num.full_spectrum
            .iter()
            .zip(&expected)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let pass = (num.t - spec.t_e).abs() <= 1e-8
        && (num.report.two_rho - spec.two_rho).abs() <= 1e-8
        && num.report.coindex == spec.r
        && spectrum_deviation <= 1e-8
        && num.ijk_deviation <= 1e-8
        && num.report.classification == Classification::GStronglyUnstable
        && num.report.critical_point_type == CriticalPointType::LocalMin;
    Ok(JensenRow {
        embedding: embedding.name().to_string(),
        c: spec.c,
        expected_t_e: spec.t_e,
        computed_t_e: num.t,
        expected_two_rho: spec.two_rho,
        computed_two_rho: num.report.two_rho,
        expected_coindex: spec.r,
        computed_coindex: num.report.coindex,
        spectrum_deviation,
        ijk_deviation: num.ijk_deviation,
        classification: num.report.classification,
        critical_point: num.report.critical_point_type,
        pass,
    })
}

fn in_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

pub fn table1(jobs: usize) -> Result<Vec<Table1Row>> {
    in_pool(jobs, || {
        TABLE1_ALGEBRAS
            .par_iter()
            .map(|&(f, n)| table1_row(f, n))
            .collect::<Result<Vec<_>>>()
    })?
}

pub fn table2(jobs: usize, opts: &AnalyzeOptions) -> Result<Vec<Table2Row>> {
    in_pool(jobs, || {
        TABLE2_ROWS
            .par_iter()
            .map(|&(f, n, k, t, c)| table2_row(f, n, k, (t, c), opts))
            .collect::<Result<Vec<_>>>()
    })?
}

pub fn jensen_table(jobs: usize, opts: &AnalyzeOptions) -> Result<Vec<JensenRow>> {
    in_pool(jobs, || {
        JensenEmbedding::ALL
            .par_iter()
            .map(|&e| jensen_row(e, opts))
            .collect::<Result<Vec<_>>>()
    })?
}

/// A named built-in space.
///
/// Ids: `killing:<su|so|sp>:<n>`, `family:<su|sp|so>:<n>:<k>`,
/// `jensen:<so6|so8|sp2>[:<t>]` (default `t` is the closed-form Einstein
/// parameter).
pub fn resolve(id: &str) -> Result<ReductiveSpace> {
    let parts: Vec<&str> = id.split(':').collect();
    let bad = || Error::InvalidParameter(format!("unknown catalog id '{id}'"));
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
    match parts.as_slice() {
        ["killing", f, n] => {
            let l = build_classical(f.parse()?, num(n)?)?;
            reductive_split(&l, &[], &BilinearForm::neg_killing(&l))
        }
        ["family", f, n, k] => family_space(&FamilySpec::new(f.parse()?, num(n)?, num(k)?)?),
        ["jensen", e] => jensen_deformed_space_for(e.parse()?, None),
        ["jensen", e, t] => jensen_deformed_space_for(e.parse()?, Some(t.parse::<f64>().map_err(|_| bad())?)),
        _ => Err(bad()),
    }
}

pub fn is_catalog_id(s: &str) -> bool {
    ["killing:", "family:", "jensen:"].iter().any(|p| s.starts_with(p))
}
