//! Casimir spectrum on sym(g) for the Killing metric of a compact simple
//! group, and the stability label it implies (threshold 2ρ = 1/2).
//!
//!     cargo run --release --example killing_metrics -- so 7

use einstab::catalog::{killing_metric_report, lambda_tau_closed};
use einstab::lichnerowicz::casimir_sym;
use einstab::lie_core::{build_classical, ClassicalFamily};
use einstab::linalg::cluster_sorted;

fn main() -> einstab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let family: ClassicalFamily = args.first().map_or("su", String::as_str).parse()?;
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(3);

    let l = build_classical(family, n)?;
    let cas = casimir_sym(&l)?;
    let vals = cas.eigenvalues();
    println!("{}({n}): dim g = {}, dim sym(g) = {}", family.name(), l.dim(), vals.len());
    for c in cluster_sorted(&vals, 1e-8) {
        println!("  Cas eigenvalue {:>12.9}  x{}", vals[c.start], c.len());
    }

    let k = killing_metric_report(family, n)?;
    println!("lambda_tau = {:.9}", k.lambda_tau);
    if let Some(closed) = lambda_tau_closed(family, n) {
        println!("closed form {closed:.9}");
    }
    println!(
        "{} (nullity {}, coindex {}, {})",
        k.report.classification.label(),
        k.report.nullity,
        k.report.coindex,
        k.report.critical_point_type.label()
    );
    Ok(())
}
