//! Geometry of the violating set.
//!
//! For `ρ(r)` the CHSH expectation splits into a z-axis part and an in-plane
//! part, `⟨B⟩ = Z + |r| P`. Since `|P| ≤ 2√2`, every violating configuration
//! lies in `E(r) = {|Z| > 2 − 2√2|r|}`, and membership in `E(r)` forces one of
//! `a, a′` and one of `b, b′` into the polar caps `|z| > 1 − √2|r|`. Counting
//! those caps bounds the violating fraction of the configuration space by
//! `8|r|²`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, Vec3};
use crate::sampling::StreamFactory;
use crate::state::{
    chsh_expectation, chsh_expectation_via_t, correlation_matrix, make_rho, CorrelationMatrix,
    DecoherenceFactor, MeasurementConfig,
};
use crate::tolerances::Z95;

const TWO_SQRT_2: f64 = 2.0 * std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZPDecomposition {
    pub z_part: f64,
    pub p_part: f64,
}

impl ZPDecomposition {
    /// `Z + |r| P`
    pub fn reconstruct(&self, r: DecoherenceFactor) -> f64 {
        self.z_part + r.modulus() * self.p_part
    }
}

/// `Z = −a_z(b_z + b′_z) − a′_z(b_z − b′_z)`
pub fn z_part(cfg: &MeasurementConfig) -> f64 {
    let (a, ap, b, bp) = (cfg.a(), cfg.a_prime(), cfg.b(), cfg.b_prime());
    -a[2] * (b[2] + bp[2]) - ap[2] * (b[2] - bp[2])
}

/// In-plane rotation angle with `cos α = −Re r/|r|`, `sin α = −Im r/|r|`;
/// taken as 0 when `r = 0`.
pub fn rotation_angle(r: DecoherenceFactor) -> f64 {
    let v = r.value();
    if v.re == 0.0 && v.im == 0.0 {
        0.0
    } else {
        (-v.im).atan2(-v.re)
    }
}

fn rotate_in_plane(cos: f64, sin: f64, v: &Vec3) -> Vec3 {
    [cos * v[0] - sin * v[1], sin * v[0] + cos * v[1], 0.0]
}

fn in_plane(v: &Vec3) -> Vec3 {
    [v[0], v[1], 0.0]
}

pub fn zp_decompose(cfg: &MeasurementConfig, r: DecoherenceFactor) -> ZPDecomposition {
    let z = z_part(cfg);
    let modulus = r.modulus();
    if modulus == 0.0 {
        return ZPDecomposition {
            z_part: z,
            p_part: 0.0,
        };
    }
    let (cos, sin) = (-r.value().re / modulus, -r.value().im / modulus);
    let (a, ap) = (in_plane(cfg.a()), in_plane(cfg.a_prime()));
    let (b, bp) = (in_plane(cfg.b()), in_plane(cfg.b_prime()));
    let sum = rotate_in_plane(cos, sin, &[b[0] + bp[0], b[1] + bp[1], 0.0]);
    let diff = rotate_in_plane(cos, sin, &[b[0] - bp[0], b[1] - bp[1], 0.0]);
    ZPDecomposition {
        z_part: z,
        p_part: dot(&a, &sum) + dot(&ap, &diff),
    }
}

/// Strict CHSH violation `|⟨B⟩| > 2` for `ρ(r)`.
pub fn in_l(cfg: &MeasurementConfig, r: DecoherenceFactor) -> bool {
    chsh_expectation(&make_rho(r), cfg).abs() > 2.0
}

/// `|Z| > 2 − 2√2|r|`
pub fn in_e(cfg: &MeasurementConfig, r: DecoherenceFactor) -> bool {
    z_part(cfg).abs() > e_threshold(r)
}

fn e_threshold(r: DecoherenceFactor) -> f64 {
    2.0 - TWO_SQRT_2 * r.modulus()
}

/// One of `a, a′` and one of `b, b′` lies in the caps `|z| > 1 − √2|r|`.
pub fn satisfies_cap_conditions(cfg: &MeasurementConfig, r: DecoherenceFactor) -> bool {
    let k = 1.0 - std::f64::consts::SQRT_2 * r.modulus();
    let in_cap = |v: &Vec3| v[2].abs() > k;
    (in_cap(cfg.a()) || in_cap(cfg.a_prime())) && (in_cap(cfg.b()) || in_cap(cfg.b_prime()))
}

/// Area of `{|z| > 1 − δ}` on the unit sphere (both caps): `4πδ`.
pub fn cap_area(delta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            range: "[0, 1]",
        });
    }
    Ok(4.0 * std::f64::consts::PI * delta)
}

/// Upper bound on the violating fraction of the configuration space:
/// four cap-product sets of normalized measure `(√2|r|)²` each, i.e.
/// `min(1, 8|r|²)`.
pub fn analytic_bound_fraction(r: DecoherenceFactor) -> f64 {
    let m = r.modulus();
    if std::f64::consts::SQRT_2 * m >= 1.0 {
        return 1.0;
    }
    (8.0 * m * m).min(1.0)
}

/// Which set a Monte Carlo run counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ViolationSet {
    L,
    E,
}

impl fmt::Display for ViolationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationSet::L => "L",
            ViolationSet::E => "E",
        })
    }
}

impl FromStr for ViolationSet {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "L" | "l" => Ok(ViolationSet::L),
            "E" | "e" => Ok(ViolationSet::E),
            other => Err(format!("unknown set {other:?}, expected L or E")),
        }
    }
}

/// Membership test for one set at a fixed `r`, with the state-dependent
/// pieces computed once.
#[derive(Debug, Clone)]
pub struct SetMembership {
    set: ViolationSet,
    t: CorrelationMatrix,
    e_threshold: f64,
}

impl SetMembership {
    pub fn new(set: ViolationSet, r: DecoherenceFactor) -> Self {
        SetMembership {
            set,
            t: correlation_matrix(&make_rho(r)),
            e_threshold: e_threshold(r),
        }
    }

    pub fn contains(&self, cfg: &MeasurementConfig) -> bool {
        match self.set {
            ViolationSet::L => chsh_expectation_via_t(&self.t, cfg).abs() > 2.0,
            ViolationSet::E => z_part(cfg).abs() > self.e_threshold,
        }
    }
}

/// Half-width of the Wilson score interval for `hits` successes in `n` trials.
pub fn wilson_halfwidth(hits: u64, n: u64, z: f64) -> f64 {
    let n = n as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeEstimate {
    pub violating_fraction: f64,
    pub hits: u64,
    pub sample_count: u64,
    pub seed: u64,
    pub ci95_halfwidth: f64,
}

const CHUNK: u64 = 1 << 14;

/// Counts configurations drawn uniformly from the product of four spheres
/// that fall in `set`. Sample `i` uses stream `i` of the seeded generator.
pub fn estimate_volume(
    r: DecoherenceFactor,
    samples: u64,
    seed: u64,
    set: ViolationSet,
) -> Result<VolumeEstimate> {
    if samples == 0 {
        return Err(Error::ZeroSamples);
    }
    let membership = SetMembership::new(set, r);
    let streams = StreamFactory::new(seed);
    let chunks = samples.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let end = ((c + 1) * CHUNK).min(samples);
            (c * CHUNK..end)
                .filter(|&i| membership.contains(&streams.config(i)))
                .count() as u64
        })
        .sum();
    Ok(VolumeEstimate {
        violating_fraction: hits as f64 / samples as f64,
        hits,
        sample_count: samples,
        seed,
        ci95_halfwidth: wilson_halfwidth(hits, samples, Z95),
    })
}

/// Serialized form of a volume run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeRecord {
    pub r_re: f64,
    pub r_im: f64,
    pub set: ViolationSet,
    pub samples: u64,
    pub seed: u64,
    pub fraction: f64,
    pub ci95: f64,
    pub bound_fraction: f64,
}

impl VolumeRecord {
    pub fn new(r: DecoherenceFactor, set: ViolationSet, estimate: &VolumeEstimate) -> Self {
        VolumeRecord {
            r_re: r.value().re,
            r_im: r.value().im,
            set,
            samples: estimate.sample_count,
            seed: estimate.seed,
            fraction: estimate.violating_fraction,
            ci95: estimate.ci95_halfwidth,
            bound_fraction: analytic_bound_fraction(r),
        }
    }

    /// The estimate lies within three half-widths of the analytic bound.
    pub fn within_bound(&self) -> bool {
        self.fraction <= self.bound_fraction + 3.0 * self.ci95
    }
}

/// Samples configurations with `|a_z| ≤ k` and `|a′_z| ≤ k` by rejection and
/// checks `|Z| ≤ 2k` on each of `trials` accepted draws.
pub fn verify_z_lemma(k: f64, trials: u64, seed: u64) -> Result<bool> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::OutOfRange {
            name: "k",
            value: k,
            range: "(0, 1)",
        });
    }
    let streams = StreamFactory::new(seed);
    let ok = (0..trials).into_par_iter().all(|i| {
        let mut rng = streams.stream(i);
        let cfg = loop {
            let cfg = crate::sampling::random_config(&mut rng);
            if cfg.a()[2].abs() <= k && cfg.a_prime()[2].abs() <= k {
                break cfg;
            }
        };
        z_part(&cfg).abs() <= 2.0 * k + 1e-12
    });
    Ok(ok)
}
