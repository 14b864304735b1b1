//! Fixed-size dense linear algebra: complex 2x2 / 4x4 operators, real 3x3
//! matrices and a symmetric 3x3 eigensolver.

use std::f64::consts::PI;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

pub use num_complex::Complex64 as Complex;

use crate::error::{Error, Result};
use crate::tolerances;

/// A real 3-vector.
pub type Vec3 = [f64; 3];

pub const ZERO: Complex = Complex::new(0.0, 0.0);
pub const ONE: Complex = Complex::new(1.0, 0.0);
pub const I: Complex = Complex::new(0.0, 1.0);

pub fn dot(u: &Vec3, v: &Vec3) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

pub fn norm(v: &Vec3) -> f64 {
    dot(v, v).sqrt()
}

pub fn add3(u: &Vec3, v: &Vec3) -> Vec3 {
    [u[0] + v[0], u[1] + v[1], u[2] + v[2]]
}

pub fn sub3(u: &Vec3, v: &Vec3) -> Vec3 {
    [u[0] - v[0], u[1] - v[1], u[2] - v[2]]
}

pub fn scale3(s: f64, v: &Vec3) -> Vec3 {
    [s * v[0], s * v[1], s * v[2]]
}

pub fn normalize(v: &Vec3) -> Vec3 {
    scale3(1.0 / norm(v), v)
}

pub fn cross(u: &Vec3, v: &Vec3) -> Vec3 {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMatrix<const N: usize>(pub [[Complex; N]; N]);

pub type CMatrix2 = CMatrix<2>;
pub type CMatrix4 = CMatrix<4>;

impl<const N: usize> CMatrix<N> {
    pub fn zeros() -> Self {
        CMatrix([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_real_diagonal(diag: [f64; N]) -> Self {
        let mut m = Self::zeros();
        for (i, d) in diag.into_iter().enumerate() {
            m.0[i][i] = Complex::new(d, 0.0);
        }
        m
    }

    pub fn scale(&self, s: Complex) -> Self {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for x in row.iter_mut() {
                *x *= s;
            }
        }
        out
    }

    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                out.0[i][j] = self.0[j][i].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    /// Largest entry-wise modulus of `self - self†`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..N {
            for j in 0..N {
                worst = worst.max((self.0[i][j] - self.0[j][i].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= tolerances::HERMITIAN
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn apply(&self, v: &[Complex; N]) -> [Complex; N] {
        let mut out = [ZERO; N];
        for (i, row) in self.0.iter().enumerate() {
            out[i] = row.iter().zip(v).map(|(m, x)| m * x).sum();
        }
        out
    }

    /// Largest entry-wise modulus difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }
}

impl<const N: usize> Index<(usize, usize)> for CMatrix<N> {
    type Output = Complex;
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for CMatrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Add for CMatrix<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (x, y) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *x += y;
        }
        self
    }
}

impl<const N: usize> Sub for CMatrix<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (x, y) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *x -= y;
        }
        self
    }
}

impl<const N: usize> Neg for CMatrix<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-ONE)
    }
}

impl<const N: usize> Mul for CMatrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let lhs = self.0[i][k];
                for j in 0..N {
                    out.0[i][j] += lhs * rhs.0[k][j];
                }
            }
        }
        out
    }
}

/// Kronecker product `a ⊗ b`; `a` acts on particle 1, so the basis order is
/// (↑↑, ↑↓, ↓↑, ↓↓).
pub fn tensor_product(a: &CMatrix2, b: &CMatrix2) -> CMatrix4 {
    let mut out = CMatrix4::zeros();
    for i1 in 0..2 {
        for j1 in 0..2 {
            for i2 in 0..2 {
                for j2 in 0..2 {
                    out.0[2 * i1 + i2][2 * j1 + j2] = a.0[i1][j1] * b.0[i2][j2];
                }
            }
        }
    }
    out
}

/// `Tr(a · b)` without forming the product.
pub fn trace_product(a: &CMatrix4, b: &CMatrix4) -> Complex {
    let mut acc = ZERO;
    for i in 0..4 {
        for k in 0..4 {
            acc += a.0[i][k] * b.0[k][i];
        }
    }
    acc
}

/// Dense real 3x3 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RMatrix3(pub [[f64; 3]; 3]);

impl RMatrix3 {
    pub fn zeros() -> Self {
        RMatrix3([[0.0; 3]; 3])
    }

    pub fn identity() -> Self {
        Self::diagonal([1.0, 1.0, 1.0])
    }

    pub fn diagonal(d: [f64; 3]) -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            m.0[i][i] = d[i];
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = self.0[j][i];
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = (0..3).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        out
    }

    /// `self · v`
    pub fn apply(&self, v: &Vec3) -> Vec3 {
        [dot(&self.0[0], v), dot(&self.0[1], v), dot(&self.0[2], v)]
    }

    /// `selfᵀ · v`
    pub fn apply_transpose(&self, v: &Vec3) -> Vec3 {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[1][0] * v[1] + m[2][0] * v[2],
            m[0][1] * v[0] + m[1][1] * v[1] + m[2][1] * v[2],
            m[0][2] * v[0] + m[1][2] * v[1] + m[2][2] * v[2],
        ]
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    pub fn asymmetry(&self) -> f64 {
        let m = &self.0;
        (m[0][1] - m[1][0])
            .abs()
            .max((m[0][2] - m[2][0]).abs())
            .max((m[1][2] - m[2][1]).abs())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }
}

/// Eigenvalues of a real symmetric 3x3 matrix in descending order.
///
/// Closed-form trigonometric solution of the characteristic cubic; when the
/// normalized discriminant falls below [`tolerances::EIGEN_DEGENERATE`] the
/// roots are ill-conditioned and cyclic Jacobi rotations take over.
pub fn symmetric3_eigenvalues(m: &RMatrix3) -> Result<[f64; 3]> {
    if !m.is_finite() {
        return Err(Error::NonFinite("symmetric3_eigenvalues input"));
    }
    let asym = m.asymmetry();
    if asym > tolerances::SYMMETRIC {
        return Err(Error::NotSymmetric(asym));
    }
    // symmetrize so both routes see the same matrix
    let mut s = *m;
    for i in 0..3 {
        for j in (i + 1)..3 {
            let avg = 0.5 * (m.0[i][j] + m.0[j][i]);
            s.0[i][j] = avg;
            s.0[j][i] = avg;
        }
    }
    let a = &s.0;
    let off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    let mut eig = if off == 0.0 {
        [a[0][0], a[1][1], a[2][2]]
    } else {
        let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
        let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * off;
        let p = (p2 / 6.0).sqrt();
        let mut b = s;
        for i in 0..3 {
            b.0[i][i] -= q;
        }
        for x in b.0.iter_mut().flatten() {
            *x /= p;
        }
        let half_det = (b.determinant() / 2.0).clamp(-1.0, 1.0);
        let disc = 1.0 - half_det * half_det;
        if disc.abs() < tolerances::EIGEN_DEGENERATE {
            jacobi_eigenvalues(&s)
        } else {
            let phi = half_det.acos() / 3.0;
            let hi = q + 2.0 * p * phi.cos();
            let lo = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
            [hi, 3.0 * q - hi - lo, lo]
        }
    };
    eig.sort_by(|x, y| y.total_cmp(x));
    Ok(eig)
}

fn jacobi_eigenvalues(m: &RMatrix3) -> [f64; 3] {
    let mut a = m.0;
    for _sweep in 0..64 {
        let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
        if off == 0.0 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q] == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            // A <- Jᵀ A J with J the (p, q) rotation
            for k in 0..3 {
                let akp = a[k][p];
                let akq = a[k][q];
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let apk = a[p][k];
                let aqk = a[q][k];
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
        }
    }
    [a[0][0], a[1][1], a[2][2]]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sx() -> CMatrix2 {
        CMatrix([[ZERO, ONE], [ONE, ZERO]])
    }

    fn sz() -> CMatrix2 {
        CMatrix([[ONE, ZERO], [ZERO, -ONE]])
    }

    #[test]
    fn identity_tensor_identity() {
        let id = tensor_product(&CMatrix2::identity(), &CMatrix2::identity());
        assert_eq!(id, CMatrix4::identity());
    }

    #[test]
    fn sz_tensor_sz_is_diagonal() {
        let zz = tensor_product(&sz(), &sz());
        assert_eq!(zz, CMatrix4::from_real_diagonal([1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn sx_tensor_sx_swaps_up_down() {
        let xx = tensor_product(&sx(), &sx());
        let up_down = [ZERO, ONE, ZERO, ZERO];
        assert_eq!(xx.apply(&up_down), [ZERO, ZERO, ONE, ZERO]);
    }

    #[test]
    fn trace_of_identity_product() {
        let t = trace_product(&CMatrix4::identity(), &CMatrix4::identity());
        assert_eq!(t, Complex::new(4.0, 0.0));
    }

    #[test]
    fn trace_product_matches_full_product() {
        let a = tensor_product(&sx(), &sz()) + CMatrix4::identity().scale(I);
        let b = tensor_product(&sz(), &sx());
        let full = (a * b).trace();
        assert!((full - trace_product(&a, &b)).norm() < 1e-15);
    }

    #[test]
    fn eigenvalues_of_repeated_spectrum() {
        let e = symmetric3_eigenvalues(&RMatrix3::diagonal([0.09, 1.0, 0.09])).unwrap();
        assert_eq!(e, [1.0, 0.09, 0.09]);
        let e = symmetric3_eigenvalues(&RMatrix3::identity()).unwrap();
        assert_eq!(e, [1.0, 1.0, 1.0]);
        let e = symmetric3_eigenvalues(&RMatrix3::zeros()).unwrap();
        assert_eq!(e, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn eigenvalues_of_rotated_degenerate_matrix() {
        // R diag(1, 0.09, 0.09) Rᵀ with a rotation about (1,1,1)
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let k = normalize(&[1.0, 1.0, 1.0]);
        let mut r = RMatrix3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let kx = match (i, j) {
                    (0, 1) => -k[2],
                    (1, 0) => k[2],
                    (0, 2) => k[1],
                    (2, 0) => -k[1],
                    (1, 2) => -k[0],
                    (2, 1) => k[0],
                    _ => 0.0,
                };
                let id = if i == j { 1.0 } else { 0.0 };
                r.0[i][j] = c * id + s * kx + (1.0 - c) * k[i] * k[j];
            }
        }
        let m = r
            .matmul(&RMatrix3::diagonal([1.0, 0.09, 0.09]))
            .matmul(&r.transpose());
        let mut sym = m;
        for i in 0..3 {
            for j in 0..i {
                sym.0[i][j] = sym.0[j][i];
            }
        }
        let e = symmetric3_eigenvalues(&sym).unwrap();
        for (got, want) in e.iter().zip([1.0, 0.09, 0.09]) {
            assert!((got - want).abs() < 1e-12, "{e:?}");
        }
    }

    #[test]
    fn eigenvalues_of_generic_matrix_solve_characteristic_polynomial() {
        let m = RMatrix3([[2.0, -1.0, 0.5], [-1.0, 3.0, 0.25], [0.5, 0.25, -1.0]]);
        let e = symmetric3_eigenvalues(&m).unwrap();
        assert!(e[0] >= e[1] && e[1] >= e[2]);
        let trace: f64 = e.iter().sum();
        assert!((trace - 4.0).abs() < 1e-12);
        for lambda in e {
            let mut shifted = m;
            for i in 0..3 {
                shifted.0[i][i] -= lambda;
            }
            assert!(shifted.determinant().abs() < 1e-9 * m.norm().powi(3));
        }
    }

    #[test]
    fn non_symmetric_matrix_rejected() {
        let m = RMatrix3([[1.0, 2.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(matches!(
            symmetric3_eigenvalues(&m),
            Err(Error::NotSymmetric(_))
        ));
    }

    #[test]
    fn non_finite_matrix_rejected() {
        let m = RMatrix3::diagonal([1.0, f64::NAN, 0.0]);
        assert!(matches!(
            symmetric3_eigenvalues(&m),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn jacobi_agrees_with_closed_form() {
        let m = RMatrix3([[4.0, 1.0, -2.0], [1.0, 2.0, 0.0], [-2.0, 0.0, 3.0]]);
        let mut j = jacobi_eigenvalues(&m);
        j.sort_by(|x, y| y.total_cmp(x));
        let e = symmetric3_eigenvalues(&m).unwrap();
        for (x, y) in j.iter().zip(e) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
