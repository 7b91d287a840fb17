//! Pushes an Einstein metric off its critical point along the lowest
//! eigenvector of L_p on W and follows the projected scalar-curvature flow.
//!
//!     cargo run --release --example gradient_flow -- family:su:3:1 0.05

use einstab::catalog::resolve;
use einstab::linalg::{eigh, expm_sym};
use einstab::stability::{analyze, gradient_flow, AnalyzeOptions, FlowDirection};
use nalgebra::DMatrix;

fn main() -> einstab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let id = args.first().map_or("family:su:3:1", String::as_str);
    let eps: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.05);
    let r = resolve(id)?;
    let a = analyze(&r, &AnalyzeOptions::default())?;
    println!("{id}: {}, 2rho = {:.9}", a.report.classification.label(), a.report.two_rho);

    let d = r.p_dim();
    let (vals, vecs) = eigh(&a.l_on_w);
    let mut dir = DMatrix::zeros(d, d);
    for (c, b) in vecs.column(0).iter().zip(&a.w.basis) {
        dir += b * *c;
    }
    let sign = if vals[0] < a.report.two_rho { "+" } else { "-" };
    println!("direction eigenvalue {:.9}: second variation {sign}", vals[0]);

    let traj = gradient_flow(&r, &expm_sym(&(dir * eps)), 40, 0.05, FlowDirection::Ascent)?;
    for p in traj.points.iter().step_by(5) {
        println!("  step {:>3}  scal {:.12}  residual {:.3e}", p.step, p.scalar, p.residual);
    }
    println!(
        "monotonicity violations {}, max |det h - 1| {:.1e}",
        traj.monotonicity_violations, traj.max_det_error
    );
    Ok(())
}
