//! Defines a space from bracket data in JSON and runs the full analysis.
//! Defaults to `data/so4_so3.json`, the round 3-sphere SO(4)/SO(3).
//!
//!     cargo run --release --example custom_space -- examples/data/su2.json

use einstab::cli::SpaceDefinition;
use einstab::stability::{analyze, AnalyzeOptions};

fn main() -> einstab::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/so4_so3.json").into());
    let def = SpaceDefinition::from_json(&std::fs::read_to_string(&path)?)?;
    let r = def.build()?;
    println!("{path}: dim g = {}, dim k = {}, dim p = {}", def.dim, r.k_dim(), r.p_dim());

    let a = analyze(&r, &AnalyzeOptions::default())?;
    println!("scal = {:.12}, rho = {:.12}", a.curvature.scalar, a.curvature.rho);
    println!("summands {:?}, multiplicity-free {}", a.decomposition.dims, a.decomposition.multiplicity_free);
    println!("dim sym(p)^K = {}, dim W = {}", a.sym.dim(), a.w.dim());
    for (x, y, d) in &a.method_diffs {
        println!("{x:?} vs {y:?}: {d:.2e}");
    }
    let s = &a.report;
    println!(
        "2rho = {:.9}, spectrum {:?}: {} ({})",
        s.two_rho,
        s.spectrum_on_w.iter().map(|e| (e.eigenvalue, e.multiplicity)).collect::<Vec<_>>(),
        s.classification.label(),
        s.critical_point_type.label()
    );
    Ok(())
}
