//! Isotropy decomposition of a built-in space: summands, the commutant of
//! the isotropy action, and the Killing constants b_k.
//!
//!     cargo run --release --example decompose -- jensen:so8

use einstab::catalog::resolve;
use einstab::isotropy::{isotropy_decomposition, trivial_variation_space, tt_space};

fn main() -> einstab::Result<()> {
    let id = std::env::args().nth(1).unwrap_or_else(|| "family:so:4:3".into());
    let r = resolve(&id)?;
    let dec = isotropy_decomposition(&r)?;
    println!("{id}: dim k = {}, dim p = {}", r.k_dim(), r.p_dim());
    println!("summand dims {:?}", dec.dims);
    println!("multiplicity-free {}, dim sym(p)^K = {}", dec.multiplicity_free, dec.commutant_dim);
    println!("b constants {:?}", dec.b_constants);
    println!("invariance residual {:.2e}", dec.invariance_residual(&r));
    if dec.multiplicity_free {
        let w = tt_space(&r, &dec.adapted_basis()?, &trivial_variation_space(&r));
        println!("dim W = {}", w.dim());
    }
    Ok(())
}
