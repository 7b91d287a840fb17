//! Command-line front end: reads a space from JSON or the catalog, runs the
//! pipeline, and writes text, JSON or CSV.
//!
//! Input JSON:
//!
//! ```json
//! {"dim": 3, "brackets": [[0, 1, 2, 1.0], [1, 2, 0, 1.0], [2, 0, 1, 1.0]],
//!  "k_indices": [], "Q": "killing"}
//! ```
//!
//! `[i, j, k, v]` means `[e_i, e_j]` has `e_k` coefficient `v`; the
//! antisymmetric partner is implied. `Q` is `"killing"` (meaning `-Kil`), an
//! explicit `dim x dim` matrix, or absent (the identity).

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::catalog::{self, JensenRow, Table1Row, Table2Row};
use crate::curvature::{curvature_pack, CurvaturePack, EINSTEIN_TOL};
use crate::error::{Error, Result};
use crate::isotropy::{decompose_with, invariant_sym_space_seeded};
use crate::lie_core::{reductive_split, BilinearForm, ReductiveSpace, StructureTensor};
use crate::linalg;
use crate::stability::{
    analyze, gradient_flow, AnalyzeOptions, FlowDirection, MethodSelection, StabilityReport, EIG_TOL,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    General,
    Nr,
    Sc,
    All,
}

impl From<MethodArg> for MethodSelection {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::General => Self::General,
            MethodArg::Nr => Self::Nr,
            MethodArg::Sc => Self::Sc,
            MethodArg::All => Self::All,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableArg {
    Table1,
    Table2,
    Jensen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Ascent,
    Descent,
}

#[derive(Debug, Parser)]
#[command(name = "einstab", version, about = "Stability of invariant Einstein metrics on homogeneous spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// JSON space file or catalog id (`killing:su:3`, `family:sp:4:1`, `jensen:so6`)
    pub input: String,
    #[arg(long, default_value_t = EINSTEIN_TOL)]
    pub einstein_tol: f64,
    #[arg(long, default_value_t = EIG_TOL)]
    pub eig_tol: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Curvature, isotropy, all Lichnerowicz assemblies and the stability report
    Analyze {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
    },
    /// Moment map, Ricci operator, scalar curvature and Einstein residual
    Curvature {
        #[command(flatten)]
        common: Common,
    },
    /// Matrix of the Lichnerowicz Laplacian on sym(p)^K
    Lich {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
    },
    /// Spectrum on W against 2 rho and the resulting labels
    Stability {
        #[command(flatten)]
        common: Common,
    },
    /// Projected Euler flow of the scalar curvature, as CSV
    Flow {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 1e-2)]
        dt: f64,
        #[arg(long, value_enum, default_value_t = DirectionArg::Ascent)]
        direction: DirectionArg,
        /// Start at exp(eps A), A the lowest eigenvector of L_p on W
        #[arg(long, default_value_t = 0.0)]
        perturb: f64,
    },
    /// Isotropy summands, multiplicity-freeness and b constants
    Decompose {
        #[command(flatten)]
        common: Common,
    },
    /// Built-in comparison tables
    Catalog {
        #[arg(value_enum)]
        table: TableArg,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

/// Resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: String,
    pub method: MethodSelection,
    pub einstein_tol: f64,
    pub eig_tol: f64,
    pub output: OutputFormat,
    pub jobs: usize,
    pub seed: u64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.einstein_tol > 0.0) || !(self.eig_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if self.jobs == 0 {
            return Err(Error::InvalidParameter("jobs must be at least 1".into()));
        }
        Ok(())
    }

    fn options(&self) -> AnalyzeOptions {
        AnalyzeOptions {
            einstein_tol: self.einstein_tol,
            eig_tol: self.eig_tol,
            methods: self.method,
            seed: self.seed,
        }
    }
}

fn config(common: &Common, method: MethodArg) -> RunConfig {
    RunConfig {
        input: common.input.clone(),
        method: method.into(),
        einstein_tol: common.einstein_tol,
        eig_tol: common.eig_tol,
        output: common.format,
        jobs: 1,
        seed: linalg::seed_from_env(),
    }
}

/// Parsed input file.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceDefinition {
    pub dim: usize,
    pub brackets: Vec<(usize, usize, usize, f64)>,
    pub k_indices: Vec<usize>,
    pub q: QSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QSpec {
    Identity,
    Killing,
    Matrix(DMatrix<f64>),
}

fn schema_err(path: &str, msg: &str) -> Error {
    Error::Schema(format!("{path}: {msg}"))
}

fn as_index(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| schema_err(path, "expected a non-negative integer"))
}

fn as_number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| schema_err(path, "expected a number"))
}

impl SpaceDefinition {
    pub fn from_json(text: &str) -> Result<Self> {
        let root: Value = serde_json::from_str(text).map_err(|e| schema_err("", &e.to_string()))?;
        let obj = root.as_object().ok_or_else(|| schema_err("", "expected an object"))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "dim" | "brackets" | "k_indices" | "Q") {
                return Err(schema_err(&format!("/{key}"), "unknown field"));
            }
        }
        let dim = as_index(obj.get("dim").ok_or_else(|| schema_err("/dim", "missing"))?, "/dim")?;
        let mut brackets = Vec::new();
        let list = obj
            .get("brackets")
            .ok_or_else(|| schema_err("/brackets", "missing"))?
            .as_array()
            .ok_or_else(|| schema_err("/brackets", "expected an array"))?;
        for (n, e) in list.iter().enumerate() {
            let path = format!("/brackets/{n}");
            let t = e.as_array().filter(|a| a.len() == 4).ok_or_else(|| {
                schema_err(&path, "expected [i, j, k, value]")
            })?;
            let mut idx = [0usize; 3];
            for (m, slot) in idx.iter_mut().enumerate() {
                let p = format!("{path}/{m}");
                *slot = as_index(&t[m], &p)?;
                if *slot >= dim {
                    return Err(schema_err(&p, &format!("index {} out of range for dim {dim}", *slot)));
                }
            }
            brackets.push((idx[0], idx[1], idx[2], as_number(&t[3], &format!("{path}/3"))?));
        }
        let mut k_indices = Vec::new();
        if let Some(k) = obj.get("k_indices") {
            let arr = k.as_array().ok_or_else(|| schema_err("/k_indices", "expected an array"))?;
            for (n, v) in arr.iter().enumerate() {
                let p = format!("/k_indices/{n}");
                let i = as_index(v, &p)?;
                if i >= dim {
                    return Err(schema_err(&p, &format!("index {i} out of range for dim {dim}")));
                }
                k_indices.push(i);
            }
        }
        let q = match obj.get("Q") {
            None | Some(Value::Null) => QSpec::Identity,
            Some(Value::String(s)) if s == "killing" => QSpec::Killing,
            Some(Value::Array(rows)) => {
                if rows.len() != dim {
                    return Err(schema_err("/Q", &format!("expected {dim} rows")));
                }
                let mut m = DMatrix::zeros(dim, dim);
                for (i, row) in rows.iter().enumerate() {
                    let r = row
                        .as_array()
                        .filter(|r| r.len() == dim)
                        .ok_or_else(|| schema_err(&format!("/Q/{i}"), &format!("expected {dim} numbers")))?;
                    for (j, v) in r.iter().enumerate() {
                        m[(i, j)] = as_number(v, &format!("/Q/{i}/{j}"))?;
                    }
                }
                QSpec::Matrix(m)
            }
            Some(_) => return Err(schema_err("/Q", "expected \"killing\" or a matrix")),
        };
        Ok(Self {
            dim,
            brackets,
            k_indices,
            q,
        })
    }

    pub fn build(&self) -> Result<ReductiveSpace> {
        let l = StructureTensor::from_brackets(self.dim, &self.brackets)?;
        l.validate(1e-10)?;
        let q = match &self.q {
            QSpec::Identity => BilinearForm::custom(DMatrix::identity(self.dim, self.dim)),
            QSpec::Killing => BilinearForm::neg_killing(&l),
            QSpec::Matrix(m) => BilinearForm::custom(m.clone()),
        };
        reductive_split(&l, &self.k_indices, &q)
    }
}

/// A JSON file path or a catalog id.
pub fn load_space(input: &str) -> Result<ReductiveSpace> {
    if catalog::is_catalog_id(input) {
        return catalog::resolve(input);
    }
    let text = std::fs::read_to_string(PathBuf::from(input))?;
    SpaceDefinition::from_json(&text)?.build()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureOutput {
    pub scalar: f64,
    pub rho: f64,
    pub einstein_residual: f64,
    pub is_einstein: bool,
    pub ricci_eigenvalues: Vec<f64>,
    pub moment: Vec<Vec<f64>>,
}

impl CurvatureOutput {
    fn new(pack: &CurvaturePack, tol: f64) -> Self {
        Self {
            // `+ 0.0` turns -0 into 0 for flat spaces
            scalar: pack.scalar + 0.0,
            rho: pack.rho + 0.0,
            einstein_residual: pack.einstein_residual,
            is_einstein: pack.is_einstein(tol),
            ricci_eigenvalues: linalg::eigh(&pack.ricci).0,
            moment: rows(&pack.moment),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionOutput {
    pub p_dim: usize,
    pub k_dim: usize,
    pub dims: Vec<usize>,
    pub multiplicity_free: bool,
    pub b_constants: Vec<f64>,
    pub commutant_dim: usize,
    pub naturally_reductive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixOutput {
    pub method: String,
    pub basis: String,
    pub matrix: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodDiff {
    pub first: String,
    pub second: String,
    pub max_entry_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LichOutput {
    pub dim_sym_k: usize,
    pub dim_w: usize,
    pub matrices: Vec<MatrixOutput>,
    pub agreement: Vec<MethodDiff>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeOutput {
    pub curvature: CurvatureOutput,
    pub decomposition: DecompositionOutput,
    pub lichnerowicz: LichOutput,
    pub stability: StabilityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Payload {
    Analyze(AnalyzeOutput),
    Curvature(CurvatureOutput),
    Lich(LichOutput),
    Stability(StabilityReport),
    Decompose(DecompositionOutput),
    Table1 { rows: Vec<Table1Row> },
    Table2 { rows: Vec<Table2Row> },
    Jensen { rows: Vec<JensenRow> },
}

/// Versioned JSON envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub input: String,
    #[serde(flatten)]
    pub payload: Payload,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn method_name(m: crate::lichnerowicz::Method) -> String {
    use crate::lichnerowicz::Method;
    match m {
        Method::General => "general",
        Method::NaturallyReductive => "nr",
        Method::StructuralConstants => "sc",
        Method::Casimir => "casimir",
    }
    .to_string()
}

fn decomposition_output(r: &ReductiveSpace, cfg: &RunConfig) -> Result<DecompositionOutput> {
    let sym = invariant_sym_space_seeded(r, cfg.seed);
    let dec = decompose_with(r, &sym, cfg.seed)?;
    Ok(DecompositionOutput {
        p_dim: r.p_dim(),
        k_dim: r.k_dim(),
        dims: dec.dims,
        multiplicity_free: dec.multiplicity_free,
        b_constants: dec.b_constants,
        commutant_dim: dec.commutant_dim,
        naturally_reductive: r.nr_residual() <= 1e-8 * r.algebra().max_abs().max(1.0),
    })
}

fn analyze_output(r: &ReductiveSpace, cfg: &RunConfig) -> Result<AnalyzeOutput> {
    let a = analyze(r, &cfg.options())?;
    let matrices = a
        .matrices
        .iter()
        .map(|m| MatrixOutput {
            method: method_name(m.method),
            basis: format!("{:?}", m.basis.label).to_lowercase(),
            matrix: rows(&m.matrix),
            eigenvalues: m.eigenvalues(),
        })
        .collect();
    let agreement = a
        .method_diffs
        .iter()
        .map(|&(x, y, d)| MethodDiff {
            first: method_name(x),
            second: method_name(y),
            max_entry_diff: d,
        })
        .collect();
    Ok(AnalyzeOutput {
        curvature: CurvatureOutput::new(&a.curvature, cfg.einstein_tol),
        decomposition: DecompositionOutput {
            p_dim: r.p_dim(),
            k_dim: r.k_dim(),
            dims: a.decomposition.dims.clone(),
            multiplicity_free: a.decomposition.multiplicity_free,
            b_constants: a.decomposition.b_constants.clone(),
            commutant_dim: a.decomposition.commutant_dim,
            naturally_reductive: r.nr_residual() <= 1e-8 * r.algebra().max_abs().max(1.0),
        },
        lichnerowicz: LichOutput {
            dim_sym_k: a.sym.dim(),
            dim_w: a.w.dim(),
            matrices,
            agreement,
        },
        stability: a.report,
    })
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotEinstein { .. } => 2,
        _ => 1,
    }
}

/// Writes the curvature block, then fails with `NotEinstein` if needed.
fn require_einstein(r: &ReductiveSpace, cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let pack = curvature_pack(r)?;
    if !pack.is_einstein(cfg.einstein_tol) {
        let payload = Payload::Curvature(CurvatureOutput::new(&pack, cfg.einstein_tol));
        emit(cfg, payload, out)?;
        pack.require_einstein(cfg.einstein_tol)?;
    }
    Ok(())
}

fn emit(cfg: &RunConfig, payload: Payload, out: &mut dyn Write) -> Result<()> {
    let report = Report {
        schema: SCHEMA_VERSION,
        input: cfg.input.clone(),
        payload,
    };
    match cfg.output {
        OutputFormat::Json => writeln!(out, "{}", report.to_json()?)?,
        OutputFormat::Text | OutputFormat::Csv => write_text(&report, out)?,
    }
    Ok(())
}

fn write_stability_text(s: &StabilityReport, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "2rho            {:.12}", s.two_rho)?;
    writeln!(out, "dim W           {}", s.dim_w)?;
    for e in &s.spectrum_on_w {
        writeln!(out, "  eigenvalue    {:.12}  x{}", e.eigenvalue, e.multiplicity)?;
    }
    if let (Some(lp), Some(lm)) = (s.lambda_p, s.lambda_p_max) {
        writeln!(out, "lambda_p        {lp:.12}")?;
        writeln!(out, "lambda_p max    {lm:.12}")?;
    }
    writeln!(out, "coindex         {}", s.coindex)?;
    writeln!(out, "nullity         {}", s.nullity)?;
    writeln!(out, "classification  {}", s.classification.label())?;
    writeln!(out, "critical point  {}", s.critical_point_type.label())
}

fn write_curvature_text(c: &CurvatureOutput, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "scalar          {:.12}", c.scalar)?;
    writeln!(out, "rho             {:.12}", c.rho)?;
    writeln!(out, "residual        {:.3e}", c.einstein_residual)?;
    writeln!(out, "einstein        {}", c.is_einstein)
}

fn write_decomposition_text(d: &DecompositionOutput, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "dim k / dim p   {} / {}", d.k_dim, d.p_dim)?;
    writeln!(out, "summand dims    {:?}", d.dims)?;
    writeln!(out, "mult.-free      {}", d.multiplicity_free)?;
    writeln!(out, "b constants     {:?}", d.b_constants)?;
    writeln!(out, "dim sym(p)^K    {}", d.commutant_dim)?;
    writeln!(out, "nat. reductive  {}", d.naturally_reductive)
}

fn write_lich_text(l: &LichOutput, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "dim sym(p)^K    {}", l.dim_sym_k)?;
    writeln!(out, "dim W           {}", l.dim_w)?;
    for m in &l.matrices {
        writeln!(out, "[{}] eigenvalues {:?}", m.method, m.eigenvalues)?;
    }
    for d in &l.agreement {
        writeln!(out, "{} vs {}: max diff {:.3e}", d.first, d.second, d.max_entry_diff)?;
    }
    Ok(())
}

fn pass(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

fn write_text(report: &Report, out: &mut dyn Write) -> std::io::Result<()> {
    match &report.payload {
        Payload::Analyze(a) => {
            write_curvature_text(&a.curvature, out)?;
            write_decomposition_text(&a.decomposition, out)?;
            write_lich_text(&a.lichnerowicz, out)?;
            write_stability_text(&a.stability, out)
        }
        Payload::Curvature(c) => write_curvature_text(c, out),
        Payload::Lich(l) => write_lich_text(l, out),
        Payload::Stability(s) => write_stability_text(s, out),
        Payload::Decompose(d) => write_decomposition_text(d, out),
        Payload::Table1 { rows } => {
            writeln!(out, "{:<8} {:>12} {:>12} {:<20} {:<20} {:>7}", "algebra", "lambda_tau", "computed", "type", "computed type", "")?;
            for r in rows {
                writeln!(
                    out,
                    "{:<8} {:>12.9} {:>12.9} {:<20} {:<20} {:>7}",
                    r.algebra,
                    r.expected_lambda_tau,
                    r.computed_lambda_tau,
                    r.expected_type.label(),
                    r.computed_type.label(),
                    pass(r.pass)
                )?;
            }
            Ok(())
        }
        Payload::Table2 { rows } => {
            writeln!(out, "{:<18} {:<11} {:>3} {:<11} {:>3} {:>9} {:>5}", "space", "expected", "", "computed", "", "dev", "")?;
            for r in rows {
                writeln!(
                    out,
                    "{:<18} {:<11} {:>3} {:<11} {:>3} {:>9.1e} {:>5}",
                    r.space,
                    r.expected_critical_point.label(),
                    r.expected_coindex,
                    r.computed_critical_point.label(),
                    r.computed_coindex,
                    r.spectrum_deviation,
                    pass(r.pass)
                )?;
            }
            Ok(())
        }
        Payload::Jensen { rows } => {
            for r in rows {
                writeln!(
                    out,
                    "{:<20} c {:.6}  t_E {:.10} / {:.10}  2rho {:.10}  coindex {} / {}  {}  {}  {}",
                    r.embedding,
                    r.c,
                    r.expected_t_e,
                    r.computed_t_e,
                    r.computed_two_rho,
                    r.expected_coindex,
                    r.computed_coindex,
                    r.classification.label(),
                    r.critical_point.label(),
                    pass(r.pass)
                )?;
            }
            Ok(())
        }
    }
}

fn run_flow(
    cfg: &RunConfig,
    steps: usize,
    dt: f64,
    direction: DirectionArg,
    perturb: f64,
    out: &mut dyn Write,
) -> Result<()> {
    let r = load_space(&cfg.input)?;
    let d = r.p_dim();
    let mut h0 = DMatrix::identity(d, d);
    if perturb != 0.0 {
        require_einstein(&r, cfg, out)?;
        let a = analyze(&r, &cfg.options())?;
        if a.w.dim() > 0 {
            let (_, vecs) = linalg::eigh(&a.l_on_w);
            let coeffs: Vec<f64> = vecs.column(0).iter().copied().collect();
            let mut dir = DMatrix::zeros(d, d);
            for (c, b) in coeffs.iter().zip(&a.w.basis) {
                dir += b * *c;
            }
            h0 = linalg::expm_sym(&(dir * perturb));
        }
    }
    let direction = match direction {
        DirectionArg::Ascent => FlowDirection::Ascent,
        DirectionArg::Descent => FlowDirection::Descent,
    };
    let traj = gradient_flow(&r, &h0, steps, dt, direction)?;
    writeln!(out, "step,scalar,residual")?;
    for p in &traj.points {
        writeln!(out, "{},{:.15e},{:.15e}", p.step, p.scalar, p.residual)?;
    }
    Ok(())
}

fn run_command(cmd: &Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Analyze { common, method } => {
            let cfg = config(common, *method);
            cfg.validate()?;
            let r = load_space(&cfg.input)?;
            require_einstein(&r, &cfg, out)?;
            emit(&cfg, Payload::Analyze(analyze_output(&r, &cfg)?), out)
        }
        Command::Curvature { common } => {
            let cfg = config(common, MethodArg::All);
            cfg.validate()?;
            let r = load_space(&cfg.input)?;
            let pack = curvature_pack(&r)?;
            emit(&cfg, Payload::Curvature(CurvatureOutput::new(&pack, cfg.einstein_tol)), out)
        }
        Command::Lich { common, method } => {
            let cfg = config(common, *method);
            cfg.validate()?;
            let r = load_space(&cfg.input)?;
            require_einstein(&r, &cfg, out)?;
            emit(&cfg, Payload::Lich(analyze_output(&r, &cfg)?.lichnerowicz), out)
        }
        Command::Stability { common } => {
            let cfg = config(common, MethodArg::General);
            cfg.validate()?;
            let r = load_space(&cfg.input)?;
            require_einstein(&r, &cfg, out)?;
            emit(&cfg, Payload::Stability(analyze(&r, &cfg.options())?.report), out)
        }
        Command::Decompose { common } => {
            let cfg = config(common, MethodArg::All);
            cfg.validate()?;
            let r = load_space(&cfg.input)?;
            emit(&cfg, Payload::Decompose(decomposition_output(&r, &cfg)?), out)
        }
        Command::Flow {
            common,
            steps,
            dt,
            direction,
            perturb,
        } => {
            let cfg = config(common, MethodArg::General);
            cfg.validate()?;
            run_flow(&cfg, *steps, *dt, *direction, *perturb, out)
        }
        Command::Catalog { table, format, jobs } => {
            let cfg = RunConfig {
                input: format!("{table:?}").to_lowercase(),
                method: MethodSelection::All,
                einstein_tol: EINSTEIN_TOL,
                eig_tol: EIG_TOL,
                output: *format,
                jobs: *jobs,
                seed: linalg::seed_from_env(),
            };
            cfg.validate()?;
            let opts = cfg.options();
            let payload = match table {
                TableArg::Table1 => Payload::Table1 {
                    rows: catalog::table1(cfg.jobs)?,
                },
                TableArg::Table2 => Payload::Table2 {
                    rows: catalog::table2(cfg.jobs, &opts)?,
                },
                TableArg::Jensen => Payload::Jensen {
                    rows: catalog::jensen_table(cfg.jobs, &opts)?,
                },
            };
            emit(&cfg, payload, out)
        }
    }
}

/// Runs one invocation, writing the report to `out` and diagnostics to
/// `err`. Returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match run_command(&cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Entry point for the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(&cli, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_errors_carry_pointers() {
        let e = SpaceDefinition::from_json(r#"{"dim": 2, "brackets": [[0, 1, 5, 1.0]]}"#).unwrap_err();
        assert!(e.to_string().contains("/brackets/0/2"), "{e}");
        let e = SpaceDefinition::from_json(r#"{"dim": 2, "brackets": [], "Q": 3}"#).unwrap_err();
        assert!(e.to_string().contains("/Q"), "{e}");
        let e = SpaceDefinition::from_json(r#"{"brackets": []}"#).unwrap_err();
        assert!(e.to_string().contains("/dim"), "{e}");
    }

    #[test]
    fn su2_from_json() {
        let def = SpaceDefinition::from_json(
            r#"{"dim": 3, "brackets": [[0,1,2,1.0],[1,2,0,1.0],[2,0,1,1.0]], "Q": "killing"}"#,
        )
        .unwrap();
        let r = def.build().unwrap();
        let pack = curvature_pack(&r).unwrap();
        assert!((pack.rho - 0.25).abs() < 1e-12);
    }
}
