//! Projected gradient search for the best measurement directions.

use chsh_decoherence::optimizer::maximize_violation;
use chsh_decoherence::state::{chsh_expectation, horodecki_max_violation, make_rho};
use chsh_decoherence::DecoherenceFactor;

fn main() -> chsh_decoherence::Result<()> {
    let r = DecoherenceFactor::from_polar(0.7, 2.0)?;
    let rho = make_rho(r);
    let result = maximize_violation(&rho, 20, 11)?;
    println!("r = {r}");
    println!(
        "search:      {:.12} ({} iterations, converged: {})",
        result.best_value, result.iterations, result.converged
    );
    println!("closed form: {:.12}", horodecki_max_violation(&rho));
    let cfg = result.best_config;
    for (name, v) in ["a", "a'", "b", "b'"].iter().zip(cfg.vectors()) {
        println!("{name:>2} = [{:+.6}, {:+.6}, {:+.6}]", v[0], v[1], v[2]);
    }
    println!("<B> at optimum: {:+.12}", chsh_expectation(&rho, &cfg));
    Ok(())
}
