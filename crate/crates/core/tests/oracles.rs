//! Brute-force reference computations behind the pinned values used
//! elsewhere in the test suite.

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use chsh_decoherence::decoherence::{trajectory, uniform_grid, SpinBathSpec};
use chsh_decoherence::geometry::{estimate_volume, ViolationSet};
use chsh_decoherence::DecoherenceFactor;

type M2 = [[C; 2]; 2];
type M4 = [[C; 4]; 4];

fn sigma(v: [f64; 3]) -> M2 {
    [
        [C::new(v[2], 0.0), C::new(v[0], -v[1])],
        [C::new(v[0], v[1]), C::new(-v[2], 0.0)],
    ]
}

fn kron(a: &M2, b: &M2) -> M4 {
    let mut out = [[C::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[i / 2][j / 2] * b[i % 2][j % 2];
        }
    }
    out
}

/// `⟨ψ|B|ψ⟩` for the singlet `(|↑↓⟩ − |↓↑⟩)/√2`.
fn singlet_expectation(a: [f64; 3], ap: [f64; 3], b: [f64; 3], bp: [f64; 3]) -> f64 {
    let plus = [b[0] + bp[0], b[1] + bp[1], b[2] + bp[2]];
    let minus = [b[0] - bp[0], b[1] - bp[1], b[2] - bp[2]];
    let t1 = kron(&sigma(a), &sigma(plus));
    let t2 = kron(&sigma(ap), &sigma(minus));
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [0.0, s, -s, 0.0];
    let mut acc = C::new(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            acc += psi[i] * (t1[i][j] + t2[i][j]) * psi[j];
        }
    }
    acc.re
}

/// Stream rule: ChaCha8 seeded from `seed_from_u64(seed)`, sample `i` on
/// stream `i`, twelve standard normals normalized in groups of three.
fn draw(base: &ChaCha8Rng, index: u64) -> [[f64; 3]; 4] {
    let mut rng = base.clone();
    rng.set_stream(index);
    std::array::from_fn(|_| loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-100 {
            break v.map(|x| x / n);
        }
    })
}

#[test]
fn pinned_full_coherence_hit_count() {
    let base = ChaCha8Rng::seed_from_u64(42);
    let hits = (0..1_000_000u64)
        .filter(|&i| {
            let [a, ap, b, bp] = draw(&base, i);
            singlet_expectation(a, ap, b, bp).abs() > 2.0
        })
        .count() as u64;
    assert_eq!(hits, 70_643);
    let est = estimate_volume(DecoherenceFactor::ONE, 1_000_000, 42, ViolationSet::L).unwrap();
    assert_eq!(est.hits, hits);
}

#[test]
fn twenty_spin_bath_stays_decohered() {
    let bath = SpinBathSpec::random(20, 0.5, 1.5, 2024).unwrap();
    let times = uniform_grid(500.0, 50_000).unwrap();
    let traj = trajectory(&bath, &times).unwrap();
    let tail_max = traj
        .times
        .iter()
        .zip(traj.moduli())
        .filter(|(t, _)| **t >= 20.0)
        .map(|(_, m)| m)
        .fold(0.0, f64::max);
    assert!(tail_max < 0.2, "tail max {tail_max}");
}
