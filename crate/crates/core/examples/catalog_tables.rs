//! Reproduces the three built-in comparison tables: Killing metrics on simple
//! groups, the flag families, and the Jensen deformations.

use einstab::catalog::{jensen_table, table1, table2};
use einstab::stability::AnalyzeOptions;

fn main() -> einstab::Result<()> {
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let opts = AnalyzeOptions::default();

    println!("Killing metrics");
    for r in table1(jobs)? {
        println!(
            "  {:<7} lambda_tau {:.9} (closed form {:.9})  {:<20} nullity {:>3}  {}",
            r.algebra,
            r.computed_lambda_tau,
            r.expected_lambda_tau,
            r.computed_type.label(),
            r.nullity,
            if r.pass { "ok" } else { "MISMATCH" }
        );
    }

    println!("Flag families");
    for r in table2(jobs, &opts)? {
        println!(
            "  {:<20} {:<10} coindex {:>2}  (expected {} {})  dev {:.1e}  {}",
            r.space,
            r.computed_critical_point.label(),
            r.computed_coindex,
            r.expected_critical_point.label(),
            r.expected_coindex,
            r.spectrum_deviation,
            if r.pass { "ok" } else { "MISMATCH" }
        );
    }

    println!("Jensen metrics");
    for r in jensen_table(jobs, &opts)? {
        println!(
            "  {:<20} c {:.6}  t_E {:.10} (closed {:.10})  2rho {:.8}  coindex {}  {}  {}",
            r.embedding,
            r.c,
            r.computed_t_e,
            r.expected_t_e,
            r.computed_two_rho,
            r.computed_coindex,
            r.classification.label(),
            if r.pass { "ok" } else { "MISMATCH" }
        );
    }
    Ok(())
}
