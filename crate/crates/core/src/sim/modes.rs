//! Single-particle (Gaussian) simulation of particle-conserving circuits.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::circuit::{Circuit, Gate};
use crate::sim::{StabilizerTableau, StateVector};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Single-particle action `U c_j U† = Σ_ℓ T_jℓ c_ℓ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeTransform(pub DMatrix<Complex64>);

impl ModeTransform {
    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &ModeTransform) -> ModeTransform {
        // U2 U1 c U1† U2† = Σ T1_jm U2 c_m U2† = Σ (T1 T2)_jℓ c_ℓ
        ModeTransform(&self.0 * &next.0)
    }

    /// Largest `|T T† − 1|` entry.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.dim();
        max_abs(&(&self.0 * self.0.adjoint() - DMatrix::<Complex64>::identity(n, n)))
    }
}

/// Largest entry modulus.
pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// `DFT_N` with entries `e^{2πi jℓ/N}/√N`.
pub fn dft_matrix(n: usize) -> DMatrix<Complex64> {
    let norm = 1.0 / (n as f64).sqrt();
    DMatrix::from_fn(n, n, |j, l| Complex64::from_polar(norm, 2.0 * PI * ((j * l) % n) as f64 / n as f64))
}

/// Transfer matrix of a particle-conserving circuit, computed in the
/// single-excitation sector. The global phase of the circuit is dropped.
///
/// CX and CY gates do not conserve particle number on their own. A maximal
/// run of Clifford gates that contains them is accepted when the run as a
/// whole maps every `Z_i` to some `+Z_j` (checked on its stabilizer tableau);
/// the run then acts on the sector as a signed permutation.
pub fn extract_mode_transform(c: &Circuit) -> Result<ModeTransform> {
    let n = c.num_qubits();
    // column ℓ holds the amplitudes of U|ℓ⟩ relative to the vacuum phase
    let mut s = DMatrix::<Complex64>::zeros(n, n);
    match c.relabel() {
        Some(p) => (0..n).for_each(|i| s[(p[i], i)] = Complex64::new(1.0, 0.0)),
        None => s.fill_with_identity(),
    }
    let gates = c.gates();
    let mut k = 0;
    while k < gates.len() {
        let g = gates[k];
        match g {
            Gate::Barrier | Gate::Cz(..) => {}
            Gate::Z(q) => s.row_mut(q).scale_mut(-1.0),
            Gate::S(q) => s.row_mut(q).iter_mut().for_each(|a| *a *= I),
            Gate::Sdg(q) => s.row_mut(q).iter_mut().for_each(|a| *a *= -I),
            Gate::Rz(q, a) => {
                let p = Complex64::from_polar(1.0, a);
                s.row_mut(q).iter_mut().for_each(|x| *x *= p);
            }
            Gate::Swap(a, b) | Gate::Fswap(a, b) => s.swap_rows(a, b),
            Gate::Givens(a, b, t) => {
                let (cs, sn) = (t.cos(), I * t.sin());
                for col in 0..n {
                    let (x, y) = (s[(a, col)], s[(b, col)]);
                    s[(a, col)] = cs * x + sn * y;
                    s[(b, col)] = sn * x + cs * y;
                }
            }
            Gate::Cx(..) | Gate::Cy(..) | Gate::Cydg(..) | Gate::X(_) => {
                let end = k + gates[k..].iter().take_while(|g| is_fixed_clifford(g)).count();
                let block = Circuit::from_gates(n, gates[k..end].iter().copied())?;
                let (perm, phase) = sector_action(&block).ok_or_else(|| Error::NotParticleConserving(g.to_string()))?;
                let old = s.clone();
                for i in 0..n {
                    s.row_mut(perm[i]).copy_from(&(old.row(i) * phase[i]));
                }
                k = end;
                continue;
            }
        }
        k += 1;
    }
    Ok(ModeTransform(s.adjoint()))
}

fn is_fixed_clifford(g: &Gate) -> bool {
    matches!(
        g,
        Gate::Cx(..)
            | Gate::Cy(..)
            | Gate::Cydg(..)
            | Gate::Cz(..)
            | Gate::X(_)
            | Gate::Z(_)
            | Gate::S(_)
            | Gate::Sdg(_)
            | Gate::Swap(..)
            | Gate::Fswap(..)
            | Gate::Barrier
    )
}

/// `U|e_i⟩ = phase_i · e^{iφ₀} |e_{perm_i}⟩` for a Clifford block that
/// permutes the `Z_i` without signs; `None` otherwise.
fn sector_action(block: &Circuit) -> Option<(Vec<usize>, Vec<Complex64>)> {
    let n = block.num_qubits();
    let t = StabilizerTableau::of(block).ok()?;
    let mut perm = vec![0; n];
    let mut phase = vec![Complex64::new(1.0, 0.0); n];
    for i in 0..n {
        let (sign, z) = t.pauli_image(i, true);
        let mut it = z.char_indices().filter(|&(_, ch)| ch != 'I');
        match (it.next(), it.next()) {
            (Some((j, 'Z')), None) if !sign => perm[i] = j,
            _ => return None,
        }
        // U X_i U† |0⟩ = U |e_i⟩ up to the vacuum phase
        let (sign, x) = t.pauli_image(i, false);
        let mut p = if sign { Complex64::new(-1.0, 0.0) } else { Complex64::new(1.0, 0.0) };
        for (j, ch) in x.char_indices() {
            match ch {
                'X' if j == perm[i] => {}
                'Y' if j == perm[i] => p *= I,
                'I' | 'Z' => {}
                _ => return None,
            }
        }
        phase[i] = p;
    }
    Some((perm, phase))
}

/// Correlation matrix `C_ij = ⟨c_i† c_j⟩` of a Gaussian state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianState(pub DMatrix<Complex64>);

impl GaussianState {
    pub fn vacuum(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    /// Slater determinant with the listed modes filled.
    pub fn occupied(n: usize, modes: &[usize]) -> Self {
        let mut c = DMatrix::zeros(n, n);
        for &m in modes {
            c[(m, m)] = Complex64::new(1.0, 0.0);
        }
        Self(c)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn occupations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.0[(i, i)].re).collect()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }
}

/// Evolve `C` by the circuit whose transfer matrix is `T`: `C ↦ Tᵀ C T*`.
///
/// With `U c_j U† = Σ T_jℓ c_ℓ` the state picks up `U† c_j U = Σ (T†)_jℓ c_ℓ`,
/// hence the transposed form.
pub fn evolve_gaussian(state: &GaussianState, t: &ModeTransform) -> Result<GaussianState> {
    if state.dim() != t.dim() {
        return Err(Error::DimensionMismatch { expected: state.dim(), found: t.dim() });
    }
    Ok(GaussianState(t.0.transpose() * &state.0 * t.0.conjugate()))
}

/// Transfer matrix read off dense single-excitation amplitudes, relative to
/// the vacuum phase. Independent of [`extract_mode_transform`]; the circuit is
/// assumed to conserve particle number and must fit the dense cap.
pub fn dense_transfer_matrix(c: &Circuit) -> Result<ModeTransform> {
    let n = c.num_qubits();
    let mut vac = StateVector::zero(n)?;
    vac.apply_circuit(c)?;
    let phase = vac.amplitudes()[0];
    let mut s = DMatrix::zeros(n, n);
    for l in 0..n {
        let mut psi = StateVector::basis(n, 1 << l)?;
        psi.apply_circuit(c)?;
        for m in 0..n {
            s[(m, l)] = psi.amplitudes()[1 << m];
        }
    }
    Ok(ModeTransform(s.adjoint() * phase))
}
