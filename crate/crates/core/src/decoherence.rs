//! Decoherence factors from a spin-bath environment.
//!
//! The central spin couples to `N` independent environment spins through
//! `σz ⊗ σz^(k)` terms with strengths `g_k`, and self-Hamiltonians are
//! neglected. Environment spin `k` starts in `α_k|↑⟩ + β_k|↓⟩`, which gives
//!
//! ```text
//! r(t) = Π_k [cos(2 g_k t) + i (|α_k|² − |β_k|²) sin(2 g_k t)]
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Complex, ONE};
use crate::state::DecoherenceFactor;
use crate::tolerances;

/// Couplings and initial populations of the environment spins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinBathSpec {
    couplings: Vec<f64>,
    /// `(|α_k|², |β_k|²)` per spin.
    weights: Vec<[f64; 2]>,
}

impl SpinBathSpec {
    pub fn new(couplings: Vec<f64>, weights: Vec<[f64; 2]>) -> Result<Self> {
        let bath = SpinBathSpec { couplings, weights };
        bath.validate()?;
        Ok(bath)
    }

    /// Every spin starts in an equal superposition, so `r(t)` is real.
    pub fn equal_weights(couplings: Vec<f64>) -> Result<Self> {
        let n = couplings.len();
        Self::new(couplings, vec![[0.5, 0.5]; n])
    }

    /// Couplings uniform in `[g_min, g_max]`, populations `(w, 1 − w)` with
    /// `w` uniform in `[0, 1]`; deterministic in `seed`.
    pub fn random(n: usize, g_min: f64, g_max: f64, seed: u64) -> Result<Self> {
        if !(g_min.is_finite() && g_max.is_finite() && g_min <= g_max) {
            return Err(Error::InvalidBath(format!(
                "coupling interval [{g_min}, {g_max}] is empty or non-finite"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut couplings = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for _ in 0..n {
            couplings.push(g_min + (g_max - g_min) * rng.random::<f64>());
            let w: f64 = rng.random();
            weights.push([w, 1.0 - w]);
        }
        Self::new(couplings, weights)
    }

    /// Parses `{"couplings": [...], "weights": [[wa, wb], ...]}`.
    /// Diagnostics name the offending field.
    pub fn from_json(text: &str) -> Result<Self> {
        use serde_json::Value;
        let bad = |msg: String| Error::InvalidBath(msg);
        let value: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        let Value::Object(mut obj) = value else {
            return Err(bad("expected a JSON object".into()));
        };
        if let Some(key) = obj.keys().find(|k| *k != "couplings" && *k != "weights") {
            return Err(bad(format!("{key}: unknown field")));
        }
        let mut field = |name: &'static str| -> Result<Vec<Value>> {
            match obj.remove(name) {
                Some(Value::Array(items)) => Ok(items),
                Some(_) => Err(bad(format!("{name}: expected an array"))),
                None => Err(bad(format!("{name}: missing field"))),
            }
        };
        let couplings_raw = field("couplings")?;
        let weights_raw = field("weights")?;
        let couplings = couplings_raw
            .into_iter()
            .enumerate()
            .map(|(k, v)| {
                v.as_f64()
                    .ok_or_else(|| bad(format!("couplings[{k}]: expected a number")))
            })
            .collect::<Result<Vec<_>>>()?;
        let weights = weights_raw
            .into_iter()
            .enumerate()
            .map(|(k, v)| {
                serde_json::from_value::<[f64; 2]>(v)
                    .map_err(|_| bad(format!("weights[{k}]: expected a pair [wa, wb]")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(couplings, weights)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("bath serializes")
    }

    pub fn len(&self) -> usize {
        self.couplings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.couplings.is_empty()
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn weights(&self) -> &[[f64; 2]] {
        &self.weights
    }

    fn validate(&self) -> Result<()> {
        if self.couplings.is_empty() {
            return Err(Error::InvalidBath(
                "couplings: at least one spin required".into(),
            ));
        }
        if self.couplings.len() != self.weights.len() {
            return Err(Error::InvalidBath(format!(
                "weights: length {} does not match couplings length {}",
                self.weights.len(),
                self.couplings.len()
            )));
        }
        if let Some(k) = self.couplings.iter().position(|g| !g.is_finite()) {
            return Err(Error::InvalidBath(format!("couplings[{k}] is not finite")));
        }
        for (k, [wa, wb]) in self.weights.iter().enumerate() {
            let in_unit = |w: &f64| (0.0..=1.0).contains(w);
            if !in_unit(wa) || !in_unit(wb) {
                return Err(Error::InvalidBath(format!("weights[{k}] outside [0, 1]")));
            }
            if (wa + wb - 1.0).abs() > tolerances::BATH_WEIGHT {
                return Err(Error::InvalidBath(format!(
                    "weights[{k}] sums to {} instead of 1",
                    wa + wb
                )));
            }
        }
        Ok(())
    }
}

/// `r(t)` for the given bath.
pub fn decoherence_factor(bath: &SpinBathSpec, t: f64) -> Result<DecoherenceFactor> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            range: "[0, inf)",
        });
    }
    let value = bath
        .couplings
        .iter()
        .zip(&bath.weights)
        .fold(ONE, |acc, (g, [wa, wb])| {
            let (s, c) = (2.0 * g * t).sin_cos();
            acc * Complex::new(c, (wa - wb) * s)
        });
    DecoherenceFactor::new(value)
}

/// Sampled `r(t)` on an ascending time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub factors: Vec<DecoherenceFactor>,
}

impl Trajectory {
    pub fn moduli(&self) -> impl Iterator<Item = f64> + '_ {
        self.factors.iter().map(DecoherenceFactor::modulus)
    }
}

pub fn trajectory(bath: &SpinBathSpec, times: &[f64]) -> Result<Trajectory> {
    check_time_grid(times)?;
    let factors = times
        .par_iter()
        .map(|&t| decoherence_factor(bath, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        times: times.to_vec(),
        factors,
    })
}

/// Pointwise effective factor of two independent environments.
pub fn two_env_trajectory(
    bath1: &SpinBathSpec,
    bath2: &SpinBathSpec,
    times: &[f64],
) -> Result<Trajectory> {
    let first = trajectory(bath1, times)?;
    let second = trajectory(bath2, times)?;
    let factors = first
        .factors
        .iter()
        .zip(&second.factors)
        .map(|(r1, r2)| effective_factor(*r1, *r2))
        .collect();
    Ok(Trajectory {
        times: first.times,
        factors,
    })
}

/// `r1* · r2`
pub fn effective_factor(r1: DecoherenceFactor, r2: DecoherenceFactor) -> DecoherenceFactor {
    DecoherenceFactor::effective(r1, r2)
}

/// `steps + 1` evenly spaced points on `[0, t_max]`.
pub fn uniform_grid(t_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(t_max.is_finite() && t_max >= 0.0) {
        return Err(Error::OutOfRange {
            name: "t_max",
            value: t_max,
            range: "[0, inf)",
        });
    }
    if steps == 0 {
        return Ok(vec![0.0]);
    }
    Ok((0..=steps)
        .map(|k| t_max * k as f64 / steps as f64)
        .collect())
}

fn check_time_grid(times: &[f64]) -> Result<()> {
    for (k, t) in times.iter().enumerate() {
        if !(t.is_finite() && *t >= 0.0) {
            return Err(Error::BadTimeGrid(k));
        }
        if k > 0 && *t < times[k - 1] {
            return Err(Error::BadTimeGrid(k));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn factor_is_one_at_time_zero() {
        let bath = SpinBathSpec::random(7, 0.1, 3.0, 5).unwrap();
        assert_eq!(
            decoherence_factor(&bath, 0.0).unwrap(),
            DecoherenceFactor::ONE
        );
    }

    #[test]
    fn single_spin_vanishes_at_quarter_period() {
        let bath = SpinBathSpec::equal_weights(vec![1.0]).unwrap();
        let r = decoherence_factor(&bath, PI / 4.0).unwrap();
        assert!(r.modulus() < 1e-15);
    }

    #[test]
    fn two_identical_spins_give_squared_cosine() {
        let bath = SpinBathSpec::equal_weights(vec![1.0, 1.0]).unwrap();
        for t in [0.1, 0.7, 2.3, 11.0] {
            let r = decoherence_factor(&bath, t).unwrap().value();
            assert!((r.re - (2.0 * t).cos().powi(2)).abs() < 1e-14);
            assert_eq!(r.im, 0.0);
        }
    }

    #[test]
    fn single_spin_revives_after_one_period() {
        let g = 1.3;
        let bath = SpinBathSpec::new(vec![g], vec![[0.8, 0.2]]).unwrap();
        let times = uniform_grid(PI / g, 400).unwrap();
        let traj = trajectory(&bath, &times).unwrap();
        let last = traj.factors.last().unwrap();
        assert!((last.modulus() - 1.0).abs() < 1e-12);
        assert!(traj.moduli().all(|m| m <= 1.0 + 1e-12));
    }

    #[test]
    fn trajectory_of_single_time() {
        let bath = SpinBathSpec::equal_weights(vec![2.0]).unwrap();
        let traj = trajectory(&bath, &[0.0]).unwrap();
        assert_eq!(traj.factors, vec![DecoherenceFactor::ONE]);
    }

    #[test]
    fn unsorted_or_negative_times_rejected() {
        let bath = SpinBathSpec::equal_weights(vec![1.0]).unwrap();
        assert_eq!(
            trajectory(&bath, &[0.0, 2.0, 1.0]),
            Err(Error::BadTimeGrid(2))
        );
        assert_eq!(trajectory(&bath, &[-1.0]), Err(Error::BadTimeGrid(0)));
        assert!(decoherence_factor(&bath, -0.5).is_err());
    }

    #[test]
    fn effective_factor_examples() {
        let one = DecoherenceFactor::ONE;
        assert_eq!(effective_factor(one, one), one);
        let r = effective_factor(
            DecoherenceFactor::real(0.5).unwrap(),
            DecoherenceFactor::real(0.8).unwrap(),
        );
        assert!((r.value() - Complex::new(0.4, 0.0)).norm() < 1e-15);
        let phase = DecoherenceFactor::from_polar(1.0, PI / 3.0).unwrap();
        assert!((effective_factor(phase, phase).value() - ONE).norm() < 1e-15);
    }

    #[test]
    fn bath_json_round_trip_and_diagnostics() {
        let bath =
            SpinBathSpec::from_json(r#"{"weights": [[0.25, 0.75]], "couplings": [1.5]}"#).unwrap();
        assert_eq!(bath.couplings(), &[1.5]);
        assert_eq!(SpinBathSpec::from_json(&bath.to_json()).unwrap(), bath);

        let missing = SpinBathSpec::from_json(r#"{"weights": [[0.5, 0.5]]}"#).unwrap_err();
        assert!(missing.to_string().contains("couplings"), "{missing}");
        let mismatch = SpinBathSpec::from_json(r#"{"couplings": [1, 2], "weights": [[0.5, 0.5]]}"#)
            .unwrap_err();
        assert!(mismatch.to_string().contains("weights"), "{mismatch}");
        let bad_sum =
            SpinBathSpec::from_json(r#"{"couplings": [1], "weights": [[0.5, 0.6]]}"#).unwrap_err();
        assert!(bad_sum.to_string().contains("weights[0]"), "{bad_sum}");
        assert!(SpinBathSpec::from_json(r#"{"couplings": [], "weights": []}"#).is_err());
    }

    #[test]
    fn random_bath_is_seed_deterministic() {
        let a = SpinBathSpec::random(5, 0.5, 1.5, 9).unwrap();
        let b = SpinBathSpec::random(5, 0.5, 1.5, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.couplings().iter().all(|g| (0.5..=1.5).contains(g)));
    }
}
