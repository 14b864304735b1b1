//! Maximal CHSH value against the decoherence factor, closed form next to
//! a numerical search.

use chsh_decoherence::optimizer::maximize_violation;
use chsh_decoherence::state::{horodecki_max_violation, make_rho};
use chsh_decoherence::DecoherenceFactor;

fn main() -> chsh_decoherence::Result<()> {
    println!("{:>6} {:>12} {:>12}", "|r|", "closed form", "search");
    for k in 0..=10 {
        let r = DecoherenceFactor::real(k as f64 / 10.0)?;
        let rho = make_rho(r);
        let exact = horodecki_max_violation(&rho);
        let found = maximize_violation(&rho, 8, 1)?.best_value;
        let mark = if exact > 2.0 + 1e-12 { "violates" } else { "" };
        println!("{:>6.2} {exact:>12.9} {found:>12.9}  {mark}", r.modulus());
    }
    Ok(())
}
