//! Spectrum of `L_p` on `W` against `2ρ`, and a projected gradient flow of
//! the scalar curvature.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::curvature::{curvature_pack, einstein_residual, moved_curvature, CurvaturePack, EINSTEIN_TOL};
use crate::error::{Error, Result};
use crate::isotropy::{
    decompose_with, invariant_sym_space, invariant_sym_space_seeded, trivial_variation_space, tt_space,
    InvariantSubspace, IsotropyDecomposition, SymOperator,
};
use crate::lichnerowicz::{
    lich_apply, lich_general, lich_multiplicity_free, lich_naturally_reductive, structural_constants,
    LichnerowiczMatrix, Method, StructuralConstants,
};
use crate::lie_core::ReductiveSpace;
use crate::linalg;

/// Default relative tolerance for eigenvalue clustering and ties with `2ρ`.
pub const EIG_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    #[serde(rename = "G-stable")]
    GStable,
    #[serde(rename = "G-unstable")]
    GUnstable,
    #[serde(rename = "G-neutrally stable")]
    GNeutrallyStable,
    #[serde(rename = "G-strongly unstable")]
    GStronglyUnstable,
    /// Unstable with a kernel: `λ_p < 2ρ = λ_p^max`-type ties.
    #[serde(rename = "G-degenerate")]
    GDegenerate,
}

impl Classification {
    pub fn label(self) -> &'static str {
        match self {
            Self::GStable => "G-stable",
            Self::GUnstable => "G-unstable",
            Self::GNeutrallyStable => "G-neutrally stable",
            Self::GStronglyUnstable => "G-strongly unstable",
            Self::GDegenerate => "G-degenerate",
        }
    }

    /// Whether the label implies `λ_p < 2ρ`.
    pub fn is_unstable(self) -> bool {
        matches!(self, Self::GUnstable | Self::GStronglyUnstable | Self::GDegenerate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalPointType {
    LocalMax,
    LocalMin,
    Saddle,
    Degenerate,
}

impl CriticalPointType {
    pub fn label(self) -> &'static str {
        match self {
            Self::LocalMax => "local max",
            Self::LocalMin => "local min",
            Self::Saddle => "saddle",
            Self::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub eigenvalue: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub rho: f64,
    pub two_rho: f64,
    pub dim_w: usize,
    pub spectrum_on_w: Vec<SpectrumEntry>,
    pub lambda_p: Option<f64>,
    pub lambda_p_max: Option<f64>,
    pub nullity: usize,
    pub coindex: usize,
    pub classification: Classification,
    pub critical_point_type: CriticalPointType,
}

impl StabilityReport {
    /// Number of eigenvalues above `2ρ` (with multiplicity).
    pub fn index_above(&self) -> usize {
        self.dim_w - self.coindex - self.nullity
    }
}

/// `C^t L C` where `C` holds the coordinates of `W` in the basis of `L`.
pub fn restrict_to_w(l: &LichnerowiczMatrix, w: &InvariantSubspace) -> Result<DMatrix<f64>> {
    let n = l.basis.dim();
    let m = w.dim();
    let mut c = DMatrix::zeros(n, m);
    let mut worst: f64 = 0.0;
    for (j, wj) in w.basis.iter().enumerate() {
        let coords = l.basis.coords(wj);
        let back = l.basis.combine(coords.as_slice());
        worst = worst.max(linalg::max_abs(&(back - wj)));
        c.set_column(j, &coords);
    }
    if worst > 1e-8 {
        return Err(Error::BasisMismatch(worst));
    }
    Ok(linalg::symmetric_part(&(c.transpose() * &l.matrix * c)))
}

/// Classifies the Einstein metric from the matrix of `L_p` on `W`.
pub fn classify(l_on_w: &DMatrix<f64>, rho: f64, tol: f64) -> StabilityReport {
    let (vals, _) = linalg::eigh(l_on_w);
    classify_spectrum(&vals, rho, tol)
}

/// Classification from eigenvalues (any order).
pub fn classify_spectrum(eigenvalues: &[f64], rho: f64, tol: f64) -> StabilityReport {
    let mut vals = eigenvalues.to_vec();
    vals.sort_by(f64::total_cmp);
    let two_rho = 2.0 * rho;
    let thr = tol * two_rho.abs().max(1.0);
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let spectrum_on_w = linalg::cluster_sorted(&vals, tol * scale)
        .into_iter()
        .map(|c| SpectrumEntry {
            eigenvalue: vals[c.clone()].iter().sum::<f64>() / c.len() as f64,
            multiplicity: c.len(),
        })
        .collect();
    let coindex = vals.iter().filter(|&&v| v < two_rho - thr).count();
    let nullity = vals.iter().filter(|&&v| (v - two_rho).abs() <= thr).count();
    let above = vals.len() - coindex - nullity;
    let (lambda_p, lambda_p_max) = (vals.first().copied(), vals.last().copied());

    let classification = match (lambda_p, lambda_p_max) {
        (None, _) | (_, None) => Classification::GStable,
        (Some(lp), Some(lmax)) => {
            if lp > two_rho + thr {
                Classification::GStable
            } else if (lp - two_rho).abs() <= thr {
                Classification::GNeutrallyStable
            } else if lmax < two_rho - thr {
                Classification::GStronglyUnstable
            } else if nullity > 0 {
                Classification::GDegenerate
            } else {
                Classification::GUnstable
            }
        }
    };
    let critical_point_type = if coindex == 0 && nullity == 0 {
        CriticalPointType::LocalMax
    } else if above == 0 && nullity == 0 {
        CriticalPointType::LocalMin
    } else if coindex > 0 && above > 0 {
        CriticalPointType::Saddle
    } else {
        CriticalPointType::Degenerate
    };
    StabilityReport {
        rho,
        two_rho,
        dim_w: vals.len(),
        spectrum_on_w,
        lambda_p,
        lambda_p_max,
        nullity,
        coindex,
        classification,
        critical_point_type,
    }
}

/// Destabilizing direction on a product of two Einstein spaces with the same
/// positive Einstein constant.
#[derive(Debug, Clone)]
pub struct ProductWitness {
    pub space: ReductiveSpace,
    /// `[n2 I_{p1}, -n1 I_{p2}]`, normalized.
    pub a: SymOperator,
    /// `|L_p A|_max`.
    pub lich_residual: f64,
    pub trace: f64,
    /// `<(2ρ - L_p) A, A>`.
    pub second_variation: f64,
}

pub fn product_instability_witness(r1: &ReductiveSpace, r2: &ReductiveSpace) -> Result<ProductWitness> {
    let c1 = curvature_pack(r1)?;
    let c2 = curvature_pack(r2)?;
    let same = (c1.rho - c2.rho).abs() <= 1e-8 * c1.rho.abs().max(c2.rho.abs()).max(1.0);
    if !c1.is_einstein(EINSTEIN_TOL) || !c2.is_einstein(EINSTEIN_TOL) || !same || c1.rho <= 0.0 {
        return Err(Error::NotEinsteinProduct {
            rho1: c1.rho,
            rho2: c2.rho,
        });
    }
    let space = ReductiveSpace::product(r1, r2)?;
    let (n1, n2) = (r1.p_dim(), r2.p_dim());
    let mut a = DMatrix::zeros(n1 + n2, n1 + n2);
    for i in 0..n1 {
        a[(i, i)] = n2 as f64;
    }
    for i in 0..n2 {
        a[(n1 + i, n1 + i)] = -(n1 as f64);
    }
    a /= a.norm();
    let pack = curvature_pack(&space)?;
    let la = lich_apply(&space, &pack.moment, &a);
    let second_variation = 2.0 * pack.rho * (&a * &a).trace() - linalg::frob(&la, &a);
    Ok(ProductWitness {
        lich_residual: linalg::max_abs(&la),
        trace: a.trace(),
        second_variation,
        a,
        space,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowDirection {
    Ascent,
    Descent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowPoint {
    pub step: usize,
    pub scalar: f64,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct FlowTrajectory {
    pub points: Vec<FlowPoint>,
    pub h_final: DMatrix<f64>,
    /// Steps where `scal` moved against the flow direction.
    pub monotonicity_violations: usize,
    /// `max |det h - 1|` after each projection.
    pub max_det_error: f64,
    /// `max_k |h_k - h_0|_F`.
    pub max_displacement: f64,
}

/// Explicit Euler for `±grad scal` on `sym_+(p)^K ∩ {det = 1}`.
///
/// The metric at `h` is `<h·, h·>`; the Frobenius gradient of `scal` in `h`
/// is `-(h^{-1} Ric + Ric h^{-1})`, projected onto `sym(p)^K` and onto the
/// tangent space of the unit-determinant slice.
pub fn gradient_flow(
    r: &ReductiveSpace,
    h0: &DMatrix<f64>,
    steps: usize,
    dt: f64,
    direction: FlowDirection,
) -> Result<FlowTrajectory> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!("dt = {dt} must be positive")));
    }
    let d = r.p_dim();
    if h0.nrows() != d || h0.ncols() != d {
        return Err(Error::InvalidParameter(format!("h0 must be {d}x{d}")));
    }
    if linalg::asymmetry(h0) > 1e-10 * linalg::max_abs(h0).max(1.0) {
        return Err(Error::InvalidParameter("h0 must be symmetric".into()));
    }
    let sym = invariant_sym_space(r);
    let mut h = unit_det(&linalg::symmetric_part(h0)).ok_or(Error::StepTooLarge { step: 0 })?;
    let start = h.clone();
    let sign = match direction {
        FlowDirection::Ascent => 1.0,
        FlowDirection::Descent => -1.0,
    };
    let mut points = Vec::with_capacity(steps + 1);
    let mut violations = 0;
    let mut max_det_error: f64 = 0.0;
    let mut max_displacement: f64 = 0.0;
    let mut record = |step: usize, h: &DMatrix<f64>| -> Result<(f64, DMatrix<f64>)> {
        let mc = moved_curvature(r, h)?;
        let rho = if d == 0 { 0.0 } else { mc.scalar / d as f64 };
        points.push(FlowPoint {
            step,
            scalar: mc.scalar,
            residual: einstein_residual(&mc.ricci, rho),
        });
        Ok((mc.scalar, mc.ricci))
    };
    let (mut scal, mut ric) = record(0, &h)?;
    for step in 1..=steps {
        let hinv = h.clone().try_inverse().ok_or(Error::SingularH)?;
        let grad = -(&hinv * &ric + &ric * &hinv);
        let mut g = sym.project(&grad);
        let n2 = linalg::frob(&hinv, &hinv);
        g -= &hinv * (linalg::frob(&hinv, &g) / n2);
        let next = linalg::symmetric_part(&(&h + g * (sign * dt)));
        h = unit_det(&next).ok_or(Error::StepTooLarge { step })?;
        max_det_error = max_det_error.max((h.determinant() - 1.0).abs());
        max_displacement = max_displacement.max((&h - &start).norm());
        let (s, rc) = record(step, &h)?;
        if sign * (s - scal) < -1e-13 * scal.abs().max(1.0) {
            violations += 1;
        }
        scal = s;
        ric = rc;
    }
    Ok(FlowTrajectory {
        points,
        h_final: h,
        monotonicity_violations: violations,
        max_det_error,
        max_displacement,
    })
}

/// `h / det(h)^{1/d}` if `h` is positive definite.
fn unit_det(h: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let d = h.nrows();
    if d == 0 {
        return Some(h.clone());
    }
    let chol = h.clone().cholesky()?;
    let log_det: f64 = 2.0 * chol.l_dirty().diagonal().iter().map(|x| x.ln()).sum::<f64>();
    Some(h * (-log_det / d as f64).exp())
}

/// Which assemblies of `L_p` to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodSelection {
    General,
    Nr,
    Sc,
    All,
}

#[derive(Debug, Clone, Copy)]
pub struct AnalyzeOptions {
    pub einstein_tol: f64,
    pub eig_tol: f64,
    pub methods: MethodSelection,
    pub seed: u64,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            einstein_tol: EINSTEIN_TOL,
            eig_tol: EIG_TOL,
            methods: MethodSelection::All,
            seed: linalg::seed_from_env(),
        }
    }
}

/// Everything computed on the way from a space to its stability report.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub curvature: CurvaturePack,
    pub decomposition: IsotropyDecomposition,
    /// Basis of `sym(p)^K` used for every matrix (summand projectors when
    /// multiplicity-free).
    pub sym: InvariantSubspace,
    pub trivial: InvariantSubspace,
    pub w: InvariantSubspace,
    pub matrices: Vec<LichnerowiczMatrix>,
    pub structural_constants: Option<StructuralConstants>,
    /// Pairwise max entry differences between the assembled matrices.
    pub method_diffs: Vec<(Method, Method, f64)>,
    pub l_on_w: DMatrix<f64>,
    pub report: StabilityReport,
}

/// Runs isotropy, curvature, Lichnerowicz and classification on `r`.
pub fn analyze(r: &ReductiveSpace, opts: &AnalyzeOptions) -> Result<Analysis> {
    let curvature = curvature_pack(r)?;
    curvature.require_einstein(opts.einstein_tol)?;
    let sym_k = invariant_sym_space_seeded(r, opts.seed);
    let decomposition = decompose_with(r, &sym_k, opts.seed)?;
    let sym = if decomposition.multiplicity_free {
        decomposition.adapted_basis()?
    } else {
        sym_k
    };
    let trivial = trivial_variation_space(r);
    let w = tt_space(r, &sym, &trivial);
    let nr_ok = r.nr_residual() <= 1e-8 * r.algebra().max_abs().max(1.0);

    let mut matrices = Vec::new();
    let want = |m: MethodSelection| opts.methods == m || opts.methods == MethodSelection::All;
    if want(MethodSelection::General) {
        matrices.push(lich_general(r, &sym));
    }
    if want(MethodSelection::Nr) {
        if nr_ok {
            matrices.push(lich_naturally_reductive(r, &sym)?);
        } else if opts.methods == MethodSelection::Nr {
            return Err(Error::NotNaturallyReductive(r.nr_residual()));
        }
    }
    let mut structural = None;
    if want(MethodSelection::Sc) {
        if nr_ok && decomposition.multiplicity_free {
            let sc = structural_constants(r, &decomposition);
            matrices.push(lich_multiplicity_free(&sc, &decomposition)?);
            structural = Some(sc);
        } else if opts.methods == MethodSelection::Sc {
            return Err(if nr_ok {
                Error::NotMultiplicityFree
            } else {
                Error::NotNaturallyReductive(r.nr_residual())
            });
        }
    }
    let mut method_diffs = Vec::new();
    for i in 0..matrices.len() {
        for j in (i + 1)..matrices.len() {
            let diff = linalg::max_abs(&(&matrices[i].matrix - &matrices[j].matrix));
            method_diffs.push((matrices[i].method, matrices[j].method, diff));
        }
    }
    let l_on_w = restrict_to_w(&matrices[0], &w)?;
    let report = classify(&l_on_w, curvature.rho, opts.eig_tol);
    Ok(Analysis {
        curvature,
        decomposition,
        sym,
        trivial,
        w,
        matrices,
        structural_constants: structural,
        method_diffs,
        l_on_w,
        report,
    })
}
