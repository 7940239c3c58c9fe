//! Small fixed-size linear-algebra helpers shared across the crate.
//!
//! Basis conventions (documented once here, used everywhere):
//! two-level states are ordered (|1>, |0>), i.e. the excited state is the
//! first basis vector; three-level states are ordered (|0>, |1>, |2>).

use nalgebra::{Matrix2, Matrix3, SymmetricEigen};
use num_complex::Complex64 as C64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Identity.
pub fn sigma_0() -> Matrix2<C64> {
    Matrix2::identity()
}

/// Pauli x in the (|1>, |0>) ordering.
pub fn sigma_x() -> Matrix2<C64> {
    Matrix2::new(ZERO, ONE, ONE, ZERO)
}

/// Pauli y in the (|1>, |0>) ordering.
pub fn sigma_y() -> Matrix2<C64> {
    Matrix2::new(ZERO, -I, I, ZERO)
}

/// Pauli z in the (|1>, |0>) ordering; |1> sits at +z.
pub fn sigma_z() -> Matrix2<C64> {
    Matrix2::new(ONE, ZERO, ZERO, -ONE)
}

/// Lowering operator |0><1|.
pub fn sigma_minus() -> Matrix2<C64> {
    Matrix2::new(ZERO, ZERO, ONE, ZERO)
}

/// z-axis rotation exp(-i phi sigma_z / 2).
pub fn rot_z(phi: f64) -> Matrix2<C64> {
    Matrix2::new(C64::cis(-0.5 * phi), ZERO, ZERO, C64::cis(0.5 * phi))
}

/// Exact exponential exp(-i dt H) for the traceless Hermitian
/// H = (omega sigma_x - delta sigma_z) / 2.
#[inline]
pub fn expi_two_level(omega: f64, delta: f64, dt: f64) -> Matrix2<C64> {
    let r = omega.hypot(delta);
    if r == 0.0 {
        return Matrix2::identity();
    }
    let half = 0.5 * r * dt;
    let (s, c) = half.sin_cos();
    let sx = s * omega / r;
    let sz = s * delta / r;
    // cos I - i sin (omega sigma_x - delta sigma_z)/r
    Matrix2::new(
        C64::new(c, sz),
        C64::new(0.0, -sx),
        C64::new(0.0, -sx),
        C64::new(c, -sz),
    )
}

/// Exact exponential exp(-i dt H) of a 3x3 Hermitian matrix via its
/// eigendecomposition.
pub fn expi_hermitian3(h: &Matrix3<C64>, dt: f64) -> Matrix3<C64> {
    let eig = SymmetricEigen::new(*h);
    let mut out = Matrix3::zeros();
    for k in 0..3 {
        let phase = C64::cis(-eig.eigenvalues[k] * dt);
        let v = eig.eigenvectors.column(k);
        for r in 0..3 {
            for c in 0..3 {
                out[(r, c)] += phase * v[r] * v[c].conj();
            }
        }
    }
    out
}

/// Frobenius norm of the difference U^dag U - 1, a unitarity residual.
pub fn unitarity_residual2(u: &Matrix2<C64>) -> f64 {
    (u.adjoint() * u - Matrix2::identity()).norm()
}

pub fn unitarity_residual3(u: &Matrix3<C64>) -> f64 {
    (u.adjoint() * u - Matrix3::identity()).norm()
}
