//! Decoherence of a Bell pair by a random spin bath: `|r(t)|` and the
//! maximal CHSH value over time.

use chsh_decoherence::decoherence::{trajectory, uniform_grid, SpinBathSpec};
use chsh_decoherence::state::{horodecki_max_violation, make_rho};

fn main() -> chsh_decoherence::Result<()> {
    let bath = SpinBathSpec::random(20, 0.5, 1.5, 2024)?;
    let times = uniform_grid(4.0, 40)?;
    let traj = trajectory(&bath, &times)?;
    for (t, r) in traj.times.iter().zip(&traj.factors) {
        let max = horodecki_max_violation(&make_rho(*r));
        let bar = "#".repeat((r.modulus() * 40.0).round() as usize);
        println!("t={t:5.2} |r|={:.4} max<B>={max:.4} {bar}", r.modulus());
    }
    Ok(())
}
