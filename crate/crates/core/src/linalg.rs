//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Largest entry modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// `Tr(a^† b)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// `|psi><psi|`.
pub fn projector(psi: &CVector) -> CMatrix {
    psi * psi.adjoint()
}

/// Numerical rank from singular values above `rel_tol * sigma_max`.
pub fn rank(a: &CMatrix, rel_tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let sv = a.clone().singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// Eigenvalues of a Hermitian matrix, sorted in descending order.
pub fn hermitian_spectrum(a: &CMatrix) -> Vec<f64> {
    let herm = (a + a.adjoint()) * C64::new(0.5, 0.0);
    let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// Unit-modulus phase `exp(i * pi * turns2 / den)`.
pub fn phase_half_turns(turns2: i64, den: i64) -> C64 {
    // Reduce first so the float argument stays in [0, 2*pi).
    let r = turns2.rem_euclid(2 * den);
    C64::from_polar(1.0, std::f64::consts::PI * r as f64 / den as f64)
}
