//! Each particle coupled to its own environment behaves like one
//! environment with factor `r1* r2`.

use chsh_decoherence::state::{horodecki_max_violation, make_rho, make_rho_two_env};
use chsh_decoherence::{Complex, DecoherenceFactor};

fn main() -> chsh_decoherence::Result<()> {
    let r1 = DecoherenceFactor::new(Complex::new(0.6, 0.3))?;
    let r2 = DecoherenceFactor::from_polar(0.8, -1.1)?;
    let joint = make_rho_two_env(r1, r2);
    let effective = DecoherenceFactor::effective(r1, r2);
    let single = make_rho(effective);

    println!("r1 = {r1}, r2 = {r2}, r1* r2 = {effective}");
    println!(
        "max |difference| of density matrices: {:e}",
        joint.matrix().max_abs_diff(single.matrix())
    );
    println!(
        "maximal CHSH value: {:.12}",
        horodecki_max_violation(&joint)
    );
    Ok(())
}
