//! Two-qubit states under pointer-state decoherence, the CHSH operator and
//! the correlation-matrix description of CHSH expectations.
//!
//! Basis order is (↑↑, ↑↓, ↓↑, ↓↓) with particle 1 as the left tensor factor.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, add3, norm, sub3, symmetric3_eigenvalues, tensor_product, trace_product, CMatrix,
    CMatrix2, CMatrix4, Complex, RMatrix3, Vec3, I, ONE, ZERO,
};
use crate::tolerances;

/// The decoherence factor `r`: overlap of the two environment branches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceFactor(Complex);

impl DecoherenceFactor {
    pub const ONE: DecoherenceFactor = DecoherenceFactor(ONE);
    pub const ZERO: DecoherenceFactor = DecoherenceFactor(ZERO);

    /// Rejects non-finite values and `|r| > 1` (beyond a 1e-12 allowance).
    pub fn new(value: Complex) -> Result<Self> {
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::NonFinite("decoherence factor"));
        }
        let modulus = value.norm();
        if modulus > 1.0 + tolerances::FACTOR_MODULUS {
            return Err(Error::UnphysicalFactor {
                re: value.re,
                im: value.im,
                modulus,
            });
        }
        Ok(DecoherenceFactor(value))
    }

    pub fn real(re: f64) -> Result<Self> {
        Self::new(Complex::new(re, 0.0))
    }

    pub fn from_polar(modulus: f64, phase: f64) -> Result<Self> {
        Self::new(Complex::from_polar(modulus, phase))
    }

    pub fn value(&self) -> Complex {
        self.0
    }

    pub fn modulus(&self) -> f64 {
        self.0.norm()
    }

    pub fn conj(&self) -> Self {
        DecoherenceFactor(self.0.conj())
    }

    /// The factor that describes two independent environments, `r1* r2`.
    pub fn effective(r1: Self, r2: Self) -> Self {
        DecoherenceFactor(r1.0.conj() * r2.0)
    }
}

impl fmt::Display for DecoherenceFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i", self.0.re, self.0.im)
    }
}

/// Pauli matrices `[σx, σy, σz]` with σy = [[0, −i], [i, 0]].
pub fn pauli() -> [CMatrix2; 3] {
    [
        CMatrix([[ZERO, ONE], [ONE, ZERO]]),
        CMatrix([[ZERO, -I], [I, ZERO]]),
        CMatrix([[ONE, ZERO], [ZERO, -ONE]]),
    ]
}

/// `v · σ`
pub fn sigma_dot(v: &Vec3) -> CMatrix2 {
    let [x, y, z] = *v;
    CMatrix([
        [Complex::new(z, 0.0), Complex::new(x, -y)],
        [Complex::new(x, y), Complex::new(-z, 0.0)],
    ])
}

/// A validated two-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitDensityMatrix(CMatrix4);

impl TwoQubitDensityMatrix {
    /// Checks Hermiticity, unit trace and positivity (eigenvalues above the
    /// floor in [`tolerances::EIGEN_FLOOR`]).
    pub fn new(matrix: CMatrix4) -> Result<Self> {
        if !matrix.is_finite() {
            return Err(Error::NonFinite("density matrix"));
        }
        let defect = matrix.hermitian_defect();
        if defect > tolerances::HERMITIAN {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (defect {defect:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > tolerances::TRACE {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} != 1")));
        }
        if !shifted_cholesky_succeeds(&matrix, -tolerances::EIGEN_FLOOR) {
            return Err(Error::InvalidDensityMatrix(format!(
                "eigenvalue below {}",
                tolerances::EIGEN_FLOOR
            )));
        }
        Ok(TwoQubitDensityMatrix(matrix))
    }

    pub fn matrix(&self) -> &CMatrix4 {
        &self.0
    }

    /// `Tr ρ²`
    pub fn purity(&self) -> f64 {
        trace_product(&self.0, &self.0).re
    }
}

/// Cholesky factorization of `m + shift·I`; succeeds iff every eigenvalue of
/// `m` exceeds `-shift`.
fn shifted_cholesky_succeeds(m: &CMatrix4, shift: f64) -> bool {
    let mut l = [[ZERO; 4]; 4];
    for j in 0..4 {
        let mut diag = m.0[j][j].re + shift;
        for k in 0..j {
            diag -= l[j][k].norm_sqr();
        }
        if diag <= 0.0 || !diag.is_finite() {
            return false;
        }
        let d = diag.sqrt();
        l[j][j] = Complex::new(d, 0.0);
        for i in (j + 1)..4 {
            let mut s = m.0[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k].conj();
            }
            l[i][j] = s / d;
        }
    }
    true
}

/// Four measurement directions `(a, a′, b, b′)`, each a unit vector: a point
/// of the product of four unit spheres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementConfig {
    a: Vec3,
    a_prime: Vec3,
    b: Vec3,
    b_prime: Vec3,
}

impl MeasurementConfig {
    pub fn new(a: Vec3, a_prime: Vec3, b: Vec3, b_prime: Vec3) -> Result<Self> {
        for (name, v) in [
            ("a", a),
            ("a_prime", a_prime),
            ("b", b),
            ("b_prime", b_prime),
        ] {
            if !v.iter().all(|x| x.is_finite()) {
                return Err(Error::NonFinite(name));
            }
            let n = norm(&v);
            if (n - 1.0).abs() > tolerances::UNIT_NORM {
                return Err(Error::NotUnit { name, norm: n });
            }
        }
        Ok(MeasurementConfig {
            a,
            a_prime,
            b,
            b_prime,
        })
    }

    /// Normalizes each (nonzero) vector onto its sphere.
    pub fn normalized(vectors: [Vec3; 4]) -> Result<Self> {
        let [a, ap, b, bp] = vectors.map(|v| linalg::normalize(&v));
        Self::new(a, ap, b, bp)
    }

    /// All four directions equal to `v`.
    pub fn uniform(v: Vec3) -> Result<Self> {
        Self::new(v, v, v, v)
    }

    pub fn a(&self) -> &Vec3 {
        &self.a
    }

    pub fn a_prime(&self) -> &Vec3 {
        &self.a_prime
    }

    pub fn b(&self) -> &Vec3 {
        &self.b
    }

    pub fn b_prime(&self) -> &Vec3 {
        &self.b_prime
    }

    pub fn vectors(&self) -> [Vec3; 4] {
        [self.a, self.a_prime, self.b, self.b_prime]
    }

    /// Flattened as `[a, a′, b, b′]`, three components each.
    pub fn to_array(&self) -> [f64; 12] {
        let mut out = [0.0; 12];
        for (k, v) in self.vectors().iter().enumerate() {
            out[3 * k..3 * k + 3].copy_from_slice(v);
        }
        out
    }
}

/// The matrix `t_nm = Tr(ρ σn⊗σm)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationMatrix(RMatrix3);

impl CorrelationMatrix {
    pub fn new(t: RMatrix3) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::NonFinite("correlation matrix"));
        }
        if let Some(bad) = t.0.iter().flatten().find(|x| x.abs() > 1.0 + 1e-12) {
            return Err(Error::OutOfRange {
                name: "t_nm",
                value: *bad,
                range: "[-1, 1]",
            });
        }
        Ok(CorrelationMatrix(t))
    }

    pub fn matrix(&self) -> &RMatrix3 {
        &self.0
    }

    /// `U = Tᵀ T`
    pub fn gram(&self) -> RMatrix3 {
        self.0.transpose().matmul(&self.0)
    }

    /// Sum of the two largest eigenvalues of `Tᵀ T`.
    pub fn horodecki_m(&self) -> f64 {
        let e = symmetric3_eigenvalues(&self.gram()).expect("TᵀT is symmetric by construction");
        e[0] + e[1]
    }
}

/// `ρ(r) = ½ [[0,0,0,0], [0,1,−r*,0], [0,−r,1,0], [0,0,0,0]]`
pub fn make_rho(r: DecoherenceFactor) -> TwoQubitDensityMatrix {
    let half = Complex::new(0.5, 0.0);
    let mut m = CMatrix4::zeros();
    m.0[1][1] = half;
    m.0[2][2] = half;
    m.0[1][2] = -r.0.conj() * 0.5;
    m.0[2][1] = -r.0 * 0.5;
    TwoQubitDensityMatrix(m)
}

/// Both particles decohere in independent environments.
pub fn make_rho_two_env(r1: DecoherenceFactor, r2: DecoherenceFactor) -> TwoQubitDensityMatrix {
    make_rho(DecoherenceFactor::effective(r1, r2))
}

/// The singlet state, `ρ(1)`.
pub fn singlet() -> TwoQubitDensityMatrix {
    make_rho(DecoherenceFactor::ONE)
}

/// `B = a·σ ⊗ (b+b′)·σ + a′·σ ⊗ (b−b′)·σ`
pub fn make_bchsh(cfg: &MeasurementConfig) -> CMatrix4 {
    tensor_product(&sigma_dot(&cfg.a), &sigma_dot(&add3(&cfg.b, &cfg.b_prime)))
        + tensor_product(
            &sigma_dot(&cfg.a_prime),
            &sigma_dot(&sub3(&cfg.b, &cfg.b_prime)),
        )
}

/// `Tr(ρ B)` for the CHSH operator of `cfg`.
pub fn chsh_expectation(rho: &TwoQubitDensityMatrix, cfg: &MeasurementConfig) -> f64 {
    let value = trace_product(&rho.0, &make_bchsh(cfg));
    debug_assert!(
        value.im.abs() <= 1e-10,
        "imaginary CHSH expectation {value}"
    );
    value.re
}

/// `Tr(ρ σn⊗σm)` as a complex number, before the imaginary part is dropped.
pub fn pauli_expectation(rho: &TwoQubitDensityMatrix, n: usize, m: usize) -> Complex {
    let s = pauli();
    trace_product(&rho.0, &tensor_product(&s[n], &s[m]))
}

pub fn correlation_matrix(rho: &TwoQubitDensityMatrix) -> CorrelationMatrix {
    let mut t = RMatrix3::zeros();
    for n in 0..3 {
        for m in 0..3 {
            t.0[n][m] = pauli_expectation(rho, n, m).re;
        }
    }
    CorrelationMatrix(t)
}

/// `(a, T(b+b′)) + (a′, T(b−b′))`
pub fn chsh_expectation_via_t(t: &CorrelationMatrix, cfg: &MeasurementConfig) -> f64 {
    let m = &t.0;
    linalg::dot(&cfg.a, &m.apply(&add3(&cfg.b, &cfg.b_prime)))
        + linalg::dot(&cfg.a_prime, &m.apply(&sub3(&cfg.b, &cfg.b_prime)))
}

/// Maximum of `|⟨B⟩|` over all measurement directions, `2√M(ρ)`.
pub fn horodecki_max_violation(rho: &TwoQubitDensityMatrix) -> f64 {
    2.0 * correlation_matrix(rho).horodecki_m().sqrt()
}

/// Reduced state of one particle that started in `a|↑⟩ + b|↓⟩` and decohered
/// with factor `r`.
pub fn reduced_single_particle(a: Complex, b: Complex, r: DecoherenceFactor) -> Result<CMatrix2> {
    let total = a.norm_sqr() + b.norm_sqr();
    if !total.is_finite() {
        return Err(Error::NonFinite("amplitudes"));
    }
    if (total - 1.0).abs() > tolerances::AMPLITUDE_NORM {
        return Err(Error::NotNormalized(total));
    }
    Ok(CMatrix([
        [Complex::new(a.norm_sqr(), 0.0), a * b.conj() * r.0],
        [a.conj() * b * r.0.conj(), Complex::new(b.norm_sqr(), 0.0)],
    ]))
}
