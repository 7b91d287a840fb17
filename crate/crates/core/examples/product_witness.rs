//! A product of two Einstein spaces with the same constant is never stable:
//! the trace-free block operator [n2 I, -n1 I] lies in the kernel of L_p.

use einstab::catalog::resolve;
use einstab::stability::product_instability_witness;

fn main() -> einstab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let a = resolve(args.first().map_or("killing:su:2", String::as_str))?;
    let b = resolve(args.get(1).map_or("killing:su:2", String::as_str))?;
    let w = product_instability_witness(&a, &b)?;
    println!("dim p = {} + {}", a.p_dim(), b.p_dim());
    println!("|L_p A|_max        {:.3e}", w.lich_residual);
    println!("tr A               {:.3e}", w.trace);
    println!("<(2rho - L_p)A, A> {:.12}", w.second_variation);
    Ok(())
}
