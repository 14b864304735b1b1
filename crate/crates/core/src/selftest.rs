//! Reduced-sample invariant suite run by the `selftest` subcommand.

use rand::Rng;
use serde::Serialize;

use crate::decoherence::{decoherence_factor, SpinBathSpec};
use crate::geometry::{
    analytic_bound_fraction, estimate_volume, in_e, satisfies_cap_conditions, verify_z_lemma,
    zp_decompose, SetMembership, ViolationSet,
};
use crate::linalg::{
    add3, scale3, symmetric3_eigenvalues, tensor_product, trace_product, CMatrix2, CMatrix4,
    Complex, RMatrix3,
};
use crate::optimizer::{
    analytic_optimum_r1, euclidean_gradient, maximize_violation, project_tangent,
};
use crate::sampling::{orthogonal_unit_vector, random_config, unit_vector, StreamFactory};
use crate::state::{
    chsh_expectation, chsh_expectation_via_t, correlation_matrix, make_rho, make_rho_two_env,
    CorrelationMatrix, DecoherenceFactor, TwoQubitDensityMatrix,
};

const TWO_SQRT_2: f64 = 2.0 * std::f64::consts::SQRT_2;

/// Maps a state to its correlation matrix; swapped out to check that the
/// suite notices a broken implementation.
pub type CorrelationFn = fn(&TwoQubitDensityMatrix) -> CorrelationMatrix;

#[derive(Debug, Clone, Copy)]
pub struct SelfTestOptions {
    pub samples: u64,
    pub seed: u64,
    pub correlation: CorrelationFn,
}

impl SelfTestOptions {
    pub fn new(samples: u64, seed: u64) -> Self {
        SelfTestOptions {
            samples,
            seed,
            correlation: correlation_matrix,
        }
    }
}

impl Default for SelfTestOptions {
    fn default() -> Self {
        Self::new(10_000, 42)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfTestReport {
    pub seed: u64,
    pub samples: u64,
    pub checks: Vec<CheckResult>,
}

impl SelfTestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

type Outcome = std::result::Result<(), String>;

/// Uniform on the closed unit disk.
pub fn random_factor<R: Rng + ?Sized>(rng: &mut R) -> DecoherenceFactor {
    let modulus = rng.random::<f64>().sqrt();
    let phase = rng.random::<f64>() * std::f64::consts::TAU;
    DecoherenceFactor::from_polar(modulus.min(1.0), phase).expect("modulus in [0, 1]")
}

fn random_cmatrix2<R: Rng + ?Sized>(rng: &mut R) -> CMatrix2 {
    let mut m = CMatrix2::zeros();
    for z in m.0.iter_mut().flatten() {
        *z = Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    m
}

fn random_hermitian4<R: Rng + ?Sized>(rng: &mut R) -> CMatrix4 {
    let mut m = CMatrix4::zeros();
    for i in 0..4 {
        m.0[i][i] = Complex::new(rng.random_range(-1.0..1.0), 0.0);
        for j in (i + 1)..4 {
            let z = Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            m.0[i][j] = z;
            m.0[j][i] = z.conj();
        }
    }
    m
}

/// Runs every check and collects the outcomes.
pub fn run(opts: &SelfTestOptions) -> SelfTestReport {
    let n = opts.samples.max(1);
    let seed = opts.seed;
    let corr = opts.correlation;
    let streams = StreamFactory::new(seed);
    let mut checks = Vec::new();
    let mut record = |name: &'static str, outcome: Outcome| {
        checks.push(CheckResult {
            name,
            passed: outcome.is_ok(),
            detail: outcome.err().unwrap_or_default(),
        });
    };

    record("tensor_bilinearity", {
        let mut rng = streams.stream(0);
        (0..n).try_for_each(|i| {
            let (a, b) = (random_cmatrix2(&mut rng), random_cmatrix2(&mut rng));
            let alpha = Complex::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let lhs = tensor_product(&a.scale(alpha), &b);
            let rhs = tensor_product(&a, &b).scale(alpha);
            let d = lhs.max_abs_diff(&rhs);
            (d <= 1e-12)
                .then_some(())
                .ok_or(format!("sample {i}: deviation {d:e}"))
        })
    });

    record("trace_conjugate_symmetry", {
        let mut rng = streams.stream(1);
        (0..n).try_for_each(|i| {
            let (a, b) = (random_hermitian4(&mut rng), random_hermitian4(&mut rng));
            let lhs = trace_product(&a, &b);
            let rhs = trace_product(&b.dagger(), &a.dagger()).conj();
            let d = (lhs - rhs).norm();
            (d <= 1e-12)
                .then_some(())
                .ok_or(format!("sample {i}: deviation {d:e}"))
        })
    });

    record("gram_positive_semidefinite", {
        let mut rng = streams.stream(2);
        (0..n).try_for_each(|i| {
            let mut t = RMatrix3::zeros();
            for x in t.0.iter_mut().flatten() {
                *x = rng.random_range(-1.0..1.0);
            }
            let e = symmetric3_eigenvalues(&t.transpose().matmul(&t)).map_err(|e| e.to_string())?;
            (e[2] >= -1e-12)
                .then_some(())
                .ok_or(format!("sample {i}: eigenvalue {:e}", e[2]))
        })
    });

    record("correlation_closed_form", {
        let mut rng = streams.stream(3);
        (0..n).try_for_each(|i| {
            let r = random_factor(&mut rng);
            let (x, y) = (r.value().re, r.value().im);
            let expected = RMatrix3([[-x, y, 0.0], [-y, -x, 0.0], [0.0, 0.0, -1.0]]);
            let d = corr(&make_rho(r)).matrix().max_abs_diff(&expected);
            (d <= 1e-12)
                .then_some(())
                .ok_or(format!("sample {i}, r = {r}: deviation {d:e}"))
        })
    });

    record("trace_matches_correlation_form", {
        let mut rng = streams.stream(4);
        (0..n).try_for_each(|i| {
            let r = random_factor(&mut rng);
            let cfg = random_config(&mut rng);
            let rho = make_rho(r);
            let d =
                (chsh_expectation(&rho, &cfg) - chsh_expectation_via_t(&corr(&rho), &cfg)).abs();
            (d <= 1e-10)
                .then_some(())
                .ok_or(format!("sample {i}, r = {r}: deviation {d:e}"))
        })
    });

    record("gram_spectrum", {
        let mut rng = streams.stream(5);
        (0..n).try_for_each(|i| {
            let r = random_factor(&mut rng);
            let m2 = r.modulus().powi(2);
            let e =
                symmetric3_eigenvalues(&corr(&make_rho(r)).gram()).map_err(|e| e.to_string())?;
            let d = (e[0] - 1.0)
                .abs()
                .max((e[1] - m2).abs())
                .max((e[2] - m2).abs());
            (d <= 1e-10)
                .then_some(())
                .ok_or(format!("sample {i}, r = {r}: eigenvalues {e:?}"))
        })
    });

    record("horodecki_phase_invariance", {
        let mut rng = streams.stream(6);
        (0..n / 10).try_for_each(|i| {
            let modulus: f64 = rng.random();
            let values: Vec<f64> = (0..4)
                .map(|_| {
                    let r =
                        DecoherenceFactor::from_polar(modulus, rng.random::<f64>() * 6.3).unwrap();
                    2.0 * corr(&make_rho(r)).horodecki_m().sqrt()
                })
                .collect();
            let spread = values.iter().cloned().fold(f64::MIN, f64::max)
                - values.iter().cloned().fold(f64::MAX, f64::min);
            let closed = 2.0 * (1.0 + modulus * modulus).sqrt();
            let off = (values[0] - closed).abs();
            (spread <= 1e-12 && off <= 1e-10)
                .then_some(())
                .ok_or(format!(
                    "sample {i}: spread {spread:e}, closed-form deviation {off:e}"
                ))
        })
    });

    record("two_environment_equivalence", {
        let mut rng = streams.stream(7);
        (0..n).try_for_each(|i| {
            let (r1, r2) = (random_factor(&mut rng), random_factor(&mut rng));
            let eff = DecoherenceFactor::new(r1.value().conj() * r2.value()).unwrap();
            (make_rho_two_env(r1, r2) == make_rho(eff))
                .then_some(())
                .ok_or(format!("sample {i}: r1 = {r1}, r2 = {r2}"))
        })
    });

    record("density_matrix_valid", {
        let mut rng = streams.stream(8);
        (0..n).try_for_each(|i| {
            let r = random_factor(&mut rng);
            TwoQubitDensityMatrix::new(*make_rho(r).matrix())
                .map(|_| ())
                .map_err(|e| format!("sample {i}, r = {r}: {e}"))
        })
    });

    record("decoherence_factor_bounds", {
        let mut rng = streams.stream(9);
        (0..n).try_for_each(|i| {
            let spins = rng.random_range(1..=30);
            let bath =
                SpinBathSpec::random(spins, 0.0, 5.0, rng.random()).map_err(|e| e.to_string())?;
            let t = rng.random_range(0.0..100.0);
            let at_zero = decoherence_factor(&bath, 0.0).map_err(|e| e.to_string())?;
            let at_t = decoherence_factor(&bath, t).map_err(|e| e.to_string())?;
            (at_zero == DecoherenceFactor::ONE && at_t.modulus() <= 1.0)
                .then_some(())
                .ok_or(format!(
                    "sample {i}: r(0) = {at_zero}, |r({t})| = {}",
                    at_t.modulus()
                ))
        })
    });

    let mut zp_rng = streams.stream(10);
    let zp_samples: Vec<_> = (0..n)
        .map(|_| {
            let cfg = random_config(&mut zp_rng);
            // keep 0 < |r| < 1/√2 so the cap conditions are meaningful
            let r = DecoherenceFactor::from_polar(
                zp_rng.random::<f64>() * std::f64::consts::FRAC_1_SQRT_2,
                zp_rng.random::<f64>() * std::f64::consts::TAU,
            )
            .unwrap();
            (cfg, r)
        })
        .collect();

    record(
        "zp_reconstruction",
        zp_samples.iter().enumerate().try_for_each(|(i, (cfg, r))| {
            let rho = make_rho(*r);
            let zp = zp_decompose(cfg, *r);
            let via_t = chsh_expectation_via_t(&corr(&rho), cfg);
            let via_trace = chsh_expectation(&rho, cfg);
            let d = (zp.reconstruct(*r) - via_t)
                .abs()
                .max((zp.reconstruct(*r) - via_trace).abs());
            (d <= 1e-10)
                .then_some(())
                .ok_or(format!("sample {i}, r = {r}: deviation {d:e}"))
        }),
    );

    record(
        "p_bound",
        zp_samples.iter().enumerate().try_for_each(|(i, (cfg, r))| {
            let p = zp_decompose(cfg, *r).p_part;
            (p.abs() <= TWO_SQRT_2 + 1e-12)
                .then_some(())
                .ok_or(format!("sample {i}: |P| = {}", p.abs()))
        }),
    );

    record(
        "triangle_step",
        zp_samples.iter().enumerate().try_for_each(|(i, (cfg, r))| {
            let b = chsh_expectation(&make_rho(*r), cfg).abs();
            let z = zp_decompose(cfg, *r).z_part.abs();
            (b <= z + TWO_SQRT_2 * r.modulus() + 1e-12)
                .then_some(())
                .ok_or(format!("sample {i}: |B| = {b}, |Z| = {z}"))
        }),
    );

    record(
        "l_subset_e_with_caps",
        zp_samples.iter().enumerate().try_for_each(|(i, (cfg, r))| {
            let in_l = SetMembership::new(ViolationSet::L, *r).contains(cfg);
            let e = in_e(cfg, *r);
            if in_l && !e {
                return Err(format!("sample {i}: in L but not in E"));
            }
            if e && !satisfies_cap_conditions(cfg, *r) {
                return Err(format!("sample {i}: in E but outside the caps"));
            }
            Ok(())
        }),
    );

    record(
        "volume_bound",
        [0.05, 0.1, 0.2, 0.3].into_iter().try_for_each(|m| {
            let r = DecoherenceFactor::real(m).unwrap();
            let est = estimate_volume(r, n, seed, ViolationSet::L).map_err(|e| e.to_string())?;
            let bound = analytic_bound_fraction(r) + 3.0 * est.ci95_halfwidth;
            (est.violating_fraction <= bound)
                .then_some(())
                .ok_or(format!(
                    "r = {m}: fraction {} > {bound}",
                    est.violating_fraction
                ))
        }),
    );

    record("null_result_without_coherence", {
        estimate_volume(DecoherenceFactor::ZERO, n, seed, ViolationSet::L)
            .map_err(|e| e.to_string())
            .and_then(|est| {
                (est.hits == 0)
                    .then_some(())
                    .ok_or(format!("{} violating samples", est.hits))
            })
    });

    record("nonzero_volume_at_full_coherence", {
        estimate_volume(DecoherenceFactor::ONE, n, seed, ViolationSet::L)
            .map_err(|e| e.to_string())
            .and_then(|est| {
                (est.violating_fraction > 3.0 * est.ci95_halfwidth)
                    .then_some(())
                    .ok_or(format!(
                        "fraction {} not resolved from zero",
                        est.violating_fraction
                    ))
            })
    });

    record("volume_determinism", {
        let r = DecoherenceFactor::real(0.5).unwrap();
        let a = estimate_volume(r, n, seed, ViolationSet::L);
        let b = estimate_volume(r, n, seed, ViolationSet::L);
        (a == b)
            .then_some(())
            .ok_or("repeated estimates differ".to_string())
    });

    record("z_lemma", {
        match verify_z_lemma(0.5, n, seed) {
            Ok(true) => Ok(()),
            Ok(false) => Err("counterexample found".to_string()),
            Err(e) => Err(e.to_string()),
        }
    });

    record("gradient_finite_differences", {
        let mut rng = streams.stream(11);
        (0..(n / 10).max(1)).try_for_each(|i| {
            let rho = make_rho(random_factor(&mut rng));
            let cfg = random_config(&mut rng);
            let t = corr(&rho);
            let analytic = project_tangent(&cfg, &euclidean_gradient(&t, &cfg));
            let h = 1e-6;
            let x = cfg.to_array();
            let f = |y: &[f64; 12]| {
                let v: [[f64; 3]; 4] =
                    std::array::from_fn(|k| [y[3 * k], y[3 * k + 1], y[3 * k + 2]]);
                let m = t.matrix();
                crate::linalg::dot(&v[0], &m.apply(&add3(&v[2], &v[3])))
                    + crate::linalg::dot(&v[1], &m.apply(&crate::linalg::sub3(&v[2], &v[3])))
            };
            let mut fd = [0.0; 12];
            for k in 0..12 {
                let (mut up, mut down) = (x, x);
                up[k] += h;
                down[k] -= h;
                fd[k] = (f(&up) - f(&down)) / (2.0 * h);
            }
            let fd = project_tangent(&cfg, &fd);
            let diff: f64 = analytic
                .iter()
                .zip(&fd)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            let scale: f64 = fd.iter().map(|x| x * x).sum::<f64>().sqrt();
            (diff <= 1e-5 * scale)
                .then_some(())
                .ok_or(format!("sample {i}: relative error {:e}", diff / scale))
        })
    });

    record("optimizer_matches_closed_form", {
        [0.0, 0.5, 1.0].into_iter().try_for_each(|m| {
            let rho = make_rho(DecoherenceFactor::real(m).unwrap());
            let best = maximize_violation(&rho, 20, seed)
                .map_err(|e| e.to_string())?
                .best_value;
            let closed = 2.0 * (1.0 + m * m).sqrt();
            let horodecki = 2.0 * corr(&rho).horodecki_m().sqrt();
            ((best - closed).abs() < 1e-6 && best <= horodecki + 1e-8)
                .then_some(())
                .ok_or(format!("r = {m}: optimizer {best}, closed form {closed}"))
        })
    });

    record("violating_neighbourhood_at_full_coherence", {
        let mut rng = streams.stream(12);
        let rho = make_rho(DecoherenceFactor::ONE);
        (0..100).try_for_each(|i| {
            let a = unit_vector(&mut rng);
            let ap = orthogonal_unit_vector(&mut rng, &a);
            let cfg = analytic_optimum_r1(a, ap).map_err(|e| e.to_string())?;
            let angle: f64 = 0.05;
            let moved = cfg.vectors().map(|v| {
                let w = orthogonal_unit_vector(&mut rng, &v);
                add3(&scale3(angle.cos(), &v), &scale3(angle.sin(), &w))
            });
            let moved =
                crate::state::MeasurementConfig::normalized(moved).map_err(|e| e.to_string())?;
            let b = chsh_expectation(&rho, &moved).abs();
            (b > 2.0)
                .then_some(())
                .ok_or(format!("sample {i}: |B| = {b}"))
        })
    });

    SelfTestReport {
        seed,
        samples: n,
        checks,
    }
}

/// Correlation matrix with the sign of `t_xy` flipped.
pub fn corrupted_correlation(rho: &TwoQubitDensityMatrix) -> CorrelationMatrix {
    let mut t = *correlation_matrix(rho).matrix();
    t.0[0][1] = -t.0[0][1];
    CorrelationMatrix::new(t).expect("entries stay in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_build_passes() {
        let report = run(&SelfTestOptions::new(2_000, 42));
        let failed: Vec<_> = report.failed().collect();
        assert!(failed.is_empty(), "{failed:?}");
    }

    #[test]
    fn corrupted_correlation_is_caught() {
        let opts = SelfTestOptions {
            correlation: corrupted_correlation,
            ..SelfTestOptions::new(2_000, 42)
        };
        let report = run(&opts);
        assert!(!report.passed());
        assert!(report.failed().any(|c| c.name == "zp_reconstruction"));
    }

    #[test]
    fn reports_are_reproducible() {
        let opts = SelfTestOptions::new(500, 9);
        assert_eq!(run(&opts), run(&opts));
    }
}
