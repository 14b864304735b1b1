//! Splits `<B>` for a random measurement into its coherence-independent part
//! `Z` and the part `P` that scales with `|r|`.

use chsh_decoherence::geometry::{in_e, in_l, satisfies_cap_conditions, zp_decompose};
use chsh_decoherence::sampling::StreamFactory;
use chsh_decoherence::state::{chsh_expectation, make_rho};
use chsh_decoherence::DecoherenceFactor;

fn main() -> chsh_decoherence::Result<()> {
    let r = DecoherenceFactor::from_polar(0.9, 0.4)?;
    let rho = make_rho(r);
    let streams = StreamFactory::new(3);
    for i in 0..5 {
        let cfg = streams.config(i);
        let zp = zp_decompose(&cfg, r);
        println!(
            "Z = {:+.6}  P = {:+.6}  Z+|r|P = {:+.6}  <B> = {:+.6}  L:{} E:{} caps:{}",
            zp.z_part,
            zp.p_part,
            zp.reconstruct(r),
            chsh_expectation(&rho, &cfg),
            in_l(&cfg, r),
            in_e(&cfg, r),
            satisfies_cap_conditions(&cfg, r),
        );
    }
    Ok(())
}
