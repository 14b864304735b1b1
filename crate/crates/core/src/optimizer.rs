//! Multistart projected gradient ascent of the CHSH expectation over the
//! product of four unit spheres, and the closed-form maximizing family of the
//! singlet.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{add3, dot, norm, normalize, scale3, sub3, Vec3};
use crate::sampling::{random_config, StreamFactory};
use crate::state::{
    chsh_expectation, chsh_expectation_via_t, correlation_matrix, CorrelationMatrix,
    MeasurementConfig, TwoQubitDensityMatrix,
};
use crate::tolerances;

const INITIAL_STEP: f64 = 0.5;
const GRADIENT_TOL: f64 = 1e-9;
const MAX_ITERATIONS: usize = 10_000;
const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub best_value: f64,
    pub best_config: MeasurementConfig,
    pub restarts_used: usize,
    pub iterations: usize,
    pub converged: bool,
}

/// Gradient of `(a, T(b+b′)) + (a′, T(b−b′))` in R¹², ordered `[a, a′, b, b′]`.
pub fn euclidean_gradient(t: &CorrelationMatrix, cfg: &MeasurementConfig) -> [f64; 12] {
    let m = t.matrix();
    let parts = [
        m.apply(&add3(cfg.b(), cfg.b_prime())),
        m.apply(&sub3(cfg.b(), cfg.b_prime())),
        m.apply_transpose(&add3(cfg.a(), cfg.a_prime())),
        m.apply_transpose(&sub3(cfg.a(), cfg.a_prime())),
    ];
    flatten(parts)
}

/// Removes the radial component of each 3-block.
pub fn project_tangent(cfg: &MeasurementConfig, g: &[f64; 12]) -> [f64; 12] {
    let blocks = split(g);
    let points = cfg.vectors();
    let mut out = [[0.0; 3]; 4];
    for k in 0..4 {
        out[k] = sub3(&blocks[k], &scale3(dot(&blocks[k], &points[k]), &points[k]));
    }
    flatten(out)
}

/// Tangent-space gradient of `⟨B⟩_ρ` at `cfg`.
pub fn gradient(cfg: &MeasurementConfig, rho: &TwoQubitDensityMatrix) -> [f64; 12] {
    let t = correlation_matrix(rho);
    project_tangent(cfg, &euclidean_gradient(&t, cfg))
}

fn flatten(parts: [Vec3; 4]) -> [f64; 12] {
    let mut out = [0.0; 12];
    for (k, v) in parts.iter().enumerate() {
        out[3 * k..3 * k + 3].copy_from_slice(v);
    }
    out
}

fn split(g: &[f64; 12]) -> [Vec3; 4] {
    std::array::from_fn(|k| [g[3 * k], g[3 * k + 1], g[3 * k + 2]])
}

fn norm12(g: &[f64; 12]) -> f64 {
    g.iter().map(|x| x * x).sum::<f64>().sqrt()
}

struct Ascent {
    value: f64,
    config: MeasurementConfig,
    iterations: usize,
    converged: bool,
}

/// Maximizes `sign · ⟨B⟩` from `start`.
fn ascend(t: &CorrelationMatrix, start: MeasurementConfig, sign: f64) -> Ascent {
    let objective = |cfg: &MeasurementConfig| sign * chsh_expectation_via_t(t, cfg);
    let mut cfg = start;
    let mut value = objective(&cfg);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_ITERATIONS {
        let euclid = euclidean_gradient(t, &cfg).map(|x| sign * x);
        let g = project_tangent(&cfg, &euclid);
        let g_norm2 = g.iter().map(|x| x * x).sum::<f64>();
        if g_norm2.sqrt() < GRADIENT_TOL {
            converged = true;
            break;
        }
        iterations += 1;
        let points = cfg.vectors();
        let dirs = split(&g);
        let mut step = INITIAL_STEP;
        let mut accepted = None;
        while step >= MIN_STEP {
            let trial: [Vec3; 4] =
                std::array::from_fn(|k| normalize(&add3(&points[k], &scale3(step, &dirs[k]))));
            let trial = MeasurementConfig::normalized(trial).expect("retraction stays on spheres");
            let trial_value = objective(&trial);
            if trial_value >= value + ARMIJO * step * g_norm2 {
                accepted = Some((trial, trial_value));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((next, next_value)) => {
                cfg = next;
                value = next_value;
            }
            None => {
                // no ascent left at machine precision
                converged = true;
                break;
            }
        }
    }
    Ascent {
        value,
        config: cfg,
        iterations,
        converged,
    }
}

/// Maximizes `|⟨B⟩_ρ|` from `restarts` uniform random starts. Restart `i`
/// draws its start from stream `i` of the seeded generator and ascends both
/// `+⟨B⟩` and `−⟨B⟩`.
pub fn maximize_violation(
    rho: &TwoQubitDensityMatrix,
    restarts: usize,
    seed: u64,
) -> Result<OptimizationResult> {
    if restarts == 0 {
        return Err(Error::OutOfRange {
            name: "restarts",
            value: 0.0,
            range: "[1, inf)",
        });
    }
    let t = correlation_matrix(rho);
    let streams = StreamFactory::new(seed);
    let runs: Vec<Ascent> = (0..restarts)
        .into_par_iter()
        .flat_map_iter(|i| {
            let start = random_config(&mut streams.stream(i as u64));
            [ascend(&t, start, 1.0), ascend(&t, start, -1.0)]
        })
        .collect();
    let iterations = runs.iter().map(|r| r.iterations).sum();
    let best = runs
        .iter()
        .reduce(|best, run| if run.value > best.value { run } else { best })
        .expect("at least one restart");
    Ok(OptimizationResult {
        best_value: chsh_expectation(rho, &best.config).abs(),
        best_config: best.config,
        restarts_used: restarts,
        iterations,
        converged: best.converged,
    })
}

/// The singlet's maximizing family: `b = (a+a′)/√2`, `b′ = (a−a′)/√2` for
/// orthogonal unit `a, a′`.
pub fn analytic_optimum_r1(a: Vec3, a_prime: Vec3) -> Result<MeasurementConfig> {
    for (name, v) in [("a", a), ("a_prime", a_prime)] {
        let n = norm(&v);
        if (n - 1.0).abs() > tolerances::UNIT_NORM {
            return Err(Error::NotUnit { name, norm: n });
        }
    }
    let d = dot(&a, &a_prime);
    if d.abs() > tolerances::ORTHOGONAL {
        return Err(Error::NotOrthogonal(d));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let b = scale3(s, &add3(&a, &a_prime));
    let b_prime = scale3(s, &sub3(&a, &a_prime));
    MeasurementConfig::normalized([a, a_prime, b, b_prime])
}

/// Norm of the unprojected gradient, `|∇⟨B⟩|` in R¹².
pub fn euclidean_gradient_norm(t: &CorrelationMatrix, cfg: &MeasurementConfig) -> f64 {
    norm12(&euclidean_gradient(t, cfg))
}
