//! Jensen deformation of a Killing metric along a subgroup, realized as the
//! naturally reductive space (H × K)/ΔK. Scans the Ricci gap to locate the
//! second Einstein metric and checks it against the closed forms.
//!
//!     cargo run --release --example jensen -- so8

use einstab::catalog::{jensen_analytic, jensen_numeric, jensen_spec, JensenEmbedding};
use einstab::curvature::curvature_pack;
use einstab::lie_core::jensen_deformed_space;
use einstab::stability::AnalyzeOptions;

fn main() -> einstab::Result<()> {
    let arg = std::env::args().nth(1).unwrap_or_else(|| "so6".into());
    let emb: JensenEmbedding = arg.parse()?;
    let spec = jensen_spec(emb)?;
    println!(
        "{}: dim a = {}, dim k = {}, ideals r = {}, c = {:.9}",
        emb.name(),
        spec.d,
        spec.k_dim,
        spec.r,
        spec.c
    );

    let h = emb.h_algebra()?;
    let k = emb.k_indices()?;
    for t in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let pack = curvature_pack(&jensen_deformed_space(&h, &k, t)?)?;
        println!("  t = {t:.1}: scal = {:>10.6}, Einstein residual = {:.3e}", pack.scalar, pack.einstein_residual);
    }

    let num = jensen_numeric(emb, None, &AnalyzeOptions::default())?;
    let ana = jensen_analytic(&spec)?;
    println!("t_E       numeric {:.12}  closed {:.12}", num.t, spec.t_e);
    println!("2rho      numeric {:.12}  closed {:.12}", num.report.two_rho, spec.two_rho);
    println!("spectrum  numeric {:?}", num.full_spectrum);
    println!("          closed  {:?}", spec.spectrum);
    println!("[ijk] deviation from closed forms {:.2e}", num.ijk_deviation);
    println!(
        "{} / {}, coindex {} (closed: {}, {})",
        num.report.classification.label(),
        num.report.critical_point_type.label(),
        num.report.coindex,
        ana.classification.label(),
        ana.coindex
    );
    Ok(())
}
