//! Matrix exponentials for propagators `exp(-iHt)`.
//!
//! Hermitian generators go through an eigendecomposition. Everything else uses
//! nalgebra's Padé scaling-and-squaring exponential.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::hilbert::C64;

/// `exp(A)` for a general complex square matrix.
pub fn expm(a: &DMatrix<C64>) -> DMatrix<C64> {
    assert!(a.is_square(), "expm needs a square matrix");
    match a.nrows() {
        0 => DMatrix::zeros(0, 0),
        1 => DMatrix::from_element(1, 1, a[(0, 0)].exp()),
        _ => a.exp(),
    }
}

/// `exp(-i H t) psi` for Hermitian `H` through its eigenbasis.
pub fn hermitian_propagate(h: &DMatrix<C64>, t: f64, psi: &DVector<C64>) -> DVector<C64> {
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let mut coeff = v.adjoint() * psi;
    for (c, &lambda) in coeff.iter_mut().zip(eig.eigenvalues.iter()) {
        *c *= C64::from_polar(1.0, -lambda * t);
    }
    v * coeff
}

/// `exp(-i H t)` for any square `H`.
pub fn propagator(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    expm(&h.map(|z| z * C64::new(0.0, -t)))
}
