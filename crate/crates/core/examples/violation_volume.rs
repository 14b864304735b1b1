//! Fraction of uniformly random measurement settings that violate the CHSH
//! inequality, with the analytic upper bound for comparison.

use chsh_decoherence::geometry::{analytic_bound_fraction, estimate_volume, ViolationSet};
use chsh_decoherence::DecoherenceFactor;

fn main() -> chsh_decoherence::Result<()> {
    let samples = 200_000;
    println!(
        "{:>5} {:>10} {:>10} {:>10} {:>8}",
        "|r|", "L", "E", "ci95(L)", "bound"
    );
    for m in [1.0, 0.8, 0.6, 0.4, 0.3, 0.2, 0.1, 0.0] {
        let r = DecoherenceFactor::real(m)?;
        let l = estimate_volume(r, samples, 42, ViolationSet::L)?;
        let e = estimate_volume(r, samples, 42, ViolationSet::E)?;
        println!(
            "{m:>5.2} {:>10.6} {:>10.6} {:>10.2e} {:>8.4}",
            l.violating_fraction,
            e.violating_fraction,
            l.ci95_halfwidth,
            analytic_bound_fraction(r)
        );
    }
    Ok(())
}
