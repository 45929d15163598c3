//! Single-particle matrix of the coupled system and environment.
//!
//! Modes are interleaved: system site `j` is mode `2j`, environment site `j`
//! is mode `2j + 1`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::modes::ModeTransform;

/// Mode index of system site `j`.
pub fn sys(j: usize) -> usize {
    2 * j
}

/// Mode index of environment site `j`.
pub fn env(j: usize) -> usize {
    2 * j + 1
}

/// Hermitian generator `h` of `H = Σ h_ab a_a† a_b` together with its eigendecomposition.
#[derive(Debug, Clone)]
pub struct ModeHamiltonian {
    h: DMatrix<f64>,
    eig: SymmetricEigen<f64, nalgebra::Dyn>,
}

impl ModeHamiltonian {
    pub fn new(h: DMatrix<f64>) -> Self {
        let eig = h.clone().symmetric_eigen();
        Self { h, eig }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn eigenvalues(&self) -> &nalgebra::DVector<f64> {
        &self.eig.eigenvalues
    }

    /// Orthonormal eigenvectors as columns, ordered like [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eig.eigenvectors
    }

    /// `exp(i s h)`.
    pub fn exp_i(&self, s: f64) -> DMatrix<Complex64> {
        let v = self.eig.eigenvectors.map(Complex64::from);
        let d = self.eig.eigenvalues.map(|l| Complex64::from_polar(1.0, s * l));
        &v * DMatrix::from_diagonal(&d) * v.transpose()
    }

    /// Transfer matrix of the state evolution `|ψ⟩ ↦ e^{iHt}|ψ⟩`, i.e. `exp(-i t h)`.
    pub fn evolution(&self, t: f64) -> ModeTransform {
        ModeTransform(self.exp_i(-t))
    }
}

/// `ν Σ_j (c_j† c_{j+1} + h.c.) + (ε/2) Σ_j (d_j† c_j + h.c.) + ω Σ_j d_j† d_j`
/// with periodic boundary conditions on the system ring.
pub fn hamiltonian_mode_matrix(n: usize, nu: f64, epsilon: f64, omega: f64) -> ModeHamiltonian {
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        if n > 1 {
            let (a, b) = (sys(j), sys((j + 1) % n));
            h[(a, b)] += nu;
            h[(b, a)] += nu;
        }
        h[(sys(j), env(j))] += epsilon / 2.0;
        h[(env(j), sys(j))] += epsilon / 2.0;
        h[(env(j), env(j))] += omega;
    }
    ModeHamiltonian::new(h)
}
