//! Full pipeline on a block flag manifold, compared with the closed forms.
//!
//!     cargo run --release --example flag_family -- sp 4 1

use einstab::catalog::{family_analytic, family_numeric, family_space, FamilyKind, FamilySpec};
use einstab::isotropy::isotropy_decomposition;
use einstab::lichnerowicz::structural_constants;
use einstab::stability::AnalyzeOptions;

fn main() -> einstab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let family: FamilyKind = args.first().map_or("su", String::as_str).parse()?;
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let k: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(family.min_k());
    let spec = FamilySpec::new(family, n, k)?;
    println!("{spec}: {} summands of dimension {}, c/d = {:.9}", spec.summand_count(), spec.d, spec.c_over_d);

    let r = family_space(&spec)?;
    let dec = isotropy_decomposition(&r)?;
    let sc = structural_constants(&r, &dec);
    let mut first = (0, 0, 0);
    'search: for i in 0..dec.r() {
        for j in 0..dec.r() {
            for l in 0..dec.r() {
                if sc.get(i, j, l) > 1e-12 {
                    first = (i, j, l);
                    break 'search;
                }
            }
        }
    }
    let (i, j, l) = first;
    println!("first nonzero [ijk]: [{i}{j}{l}] = {:.9} (c = {:.9})", sc.get(i, j, l), spec.c_over_d * spec.d as f64);

    let num = family_numeric(&spec, &AnalyzeOptions::default())?;
    let ana = family_analytic(&spec);
    println!("2rho      numeric {:.12}  closed {:.12}", num.report.two_rho, ana.two_rho);
    println!("spectrum  numeric {:?}", num.eigenvalues);
    println!("          closed  {:?}", spec.analytic_eigenvalues());
    println!("Johnson identity residual {:.2e}", num.johnson_residual);
    println!("method agreement {:?}", num.method_diffs);
    println!(
        "{}, {}, coindex {}",
        num.report.classification.label(),
        num.report.critical_point_type.label(),
        num.report.coindex
    );
    Ok(())
}
