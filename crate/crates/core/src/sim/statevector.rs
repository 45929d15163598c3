//! Dense statevector simulation.
//!
//! Qubit `q` is bit `q` of the basis index; a set bit is an occupied
//! Jordan-Wigner mode.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::circuit::{Circuit, Gate};
use crate::{Error, Result};

/// Largest register the dense simulator will allocate.
pub const MAX_QUBITS: usize = 20;

/// Registers at least this large are updated in parallel.
const PAR_THRESHOLD: usize = 14;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_cap(num_qubits)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    /// Wrap raw amplitudes. The length must be a power of two; the vector is not renormalised.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, found: amps.len() });
        }
        check_cap(n)?;
        Ok(Self { num_qubits: n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `⟨Z_q⟩`.
    pub fn expect_z(&self, q: usize) -> f64 {
        let bit = 1 << q;
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| if i & bit == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum()
    }

    /// Probabilities of every computational basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn apply_circuit(&mut self, c: &Circuit) -> Result<()> {
        if c.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, found: c.num_qubits() });
        }
        if let Some(p) = c.relabel() {
            self.permute_qubits(p)?;
        }
        for g in c.gates() {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    /// Move qubit `i` to position `perm[i]`. No fermionic signs.
    pub fn permute_qubits(&mut self, perm: &[usize]) -> Result<()> {
        crate::circuit::validate_permutation(perm, self.num_qubits)?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (idx, a) in self.amps.iter().enumerate() {
            let mut j = 0;
            for (i, &p) in perm.iter().enumerate() {
                if idx >> i & 1 == 1 {
                    j |= 1 << p;
                }
            }
            out[j] = *a;
        }
        self.amps = out;
        Ok(())
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        for q in g.qubits() {
            if q >= self.num_qubits {
                return Err(Error::QubitOutOfRange { index: q, num_qubits: self.num_qubits });
            }
        }
        match *g {
            Gate::Barrier => {}
            Gate::X(q) => self.one_qubit(q, [[0.0.into(), 1.0.into()], [1.0.into(), 0.0.into()]]),
            Gate::Z(q) => self.phase(q, (-1.0).into()),
            Gate::S(q) => self.phase(q, I),
            Gate::Sdg(q) => self.phase(q, -I),
            Gate::Rz(q, a) => {
                let lo = Complex64::from_polar(1.0, -a / 2.0);
                let hi = Complex64::from_polar(1.0, a / 2.0);
                self.one_qubit(q, [[lo, 0.0.into()], [0.0.into(), hi]]);
            }
            Gate::Cz(a, b) => self.two_qubit(a, b, |v| v[3] = -v[3]),
            Gate::Cx(c, t) => self.two_qubit(c, t, |v| v.swap(1, 3)),
            Gate::Cy(c, t) => self.two_qubit(c, t, |v| {
                // iY: |0⟩ → -|1⟩, |1⟩ → |0⟩ on the target
                let (x, y) = (v[1], v[3]);
                v[1] = y;
                v[3] = -x;
            }),
            Gate::Cydg(c, t) => self.two_qubit(c, t, |v| {
                let (x, y) = (v[1], v[3]);
                v[1] = -y;
                v[3] = x;
            }),
            Gate::Swap(a, b) => self.two_qubit(a, b, |v| v.swap(1, 2)),
            Gate::Fswap(a, b) => self.two_qubit(a, b, |v| {
                v.swap(1, 2);
                v[3] = -v[3];
            }),
            Gate::Givens(a, b, t) => {
                let (c, s) = (t.cos(), I * t.sin());
                self.two_qubit(a, b, |v| {
                    let (x, y) = (v[1], v[2]);
                    v[1] = c * x + s * y;
                    v[2] = s * x + c * y;
                });
            }
        }
        Ok(())
    }

    fn phase(&mut self, q: usize, p: Complex64) {
        let bit = 1usize << q;
        let f = |(i, a): (usize, &mut Complex64)| {
            if i & bit != 0 {
                *a *= p;
            }
        };
        if self.num_qubits >= PAR_THRESHOLD {
            self.amps.par_iter_mut().enumerate().for_each(f);
        } else {
            self.amps.iter_mut().enumerate().for_each(f);
        }
    }

    fn one_qubit(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let half = 1usize << q;
        let f = |chunk: &mut [Complex64]| {
            let (lo, hi) = chunk.split_at_mut(half);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (a, b) = (*x, *y);
                *x = m[0][0] * a + m[0][1] * b;
                *y = m[1][0] * a + m[1][1] * b;
            }
        };
        if self.num_qubits >= PAR_THRESHOLD {
            self.amps.par_chunks_mut(2 * half).for_each(f);
        } else {
            self.amps.chunks_mut(2 * half).for_each(f);
        }
    }

    /// Apply `f` to every 4-vector `[|00⟩, |01⟩, |10⟩, |11⟩]` where the low
    /// bit of the label is qubit `a` and the high bit is qubit `b`.
    fn two_qubit(&mut self, a: usize, b: usize, f: impl Fn(&mut [Complex64; 4]) + Sync) {
        let (lo, hi) = (a.min(b), a.max(b));
        let (lo_half, hi_half) = (1usize << lo, 1usize << hi);
        let a_is_lo = a < b;
        let body = |chunk: &mut [Complex64]| {
            let (h0, h1) = chunk.split_at_mut(hi_half);
            for (s0, s1) in h0.chunks_mut(2 * lo_half).zip(h1.chunks_mut(2 * lo_half)) {
                let (p00, p01) = s0.split_at_mut(lo_half);
                let (p10, p11) = s1.split_at_mut(lo_half);
                for i in 0..lo_half {
                    // p{hi}{lo}
                    let (x01, x10) = if a_is_lo { (p01[i], p10[i]) } else { (p10[i], p01[i]) };
                    let mut v = [p00[i], x01, x10, p11[i]];
                    f(&mut v);
                    p00[i] = v[0];
                    p11[i] = v[3];
                    if a_is_lo {
                        p01[i] = v[1];
                        p10[i] = v[2];
                    } else {
                        p10[i] = v[1];
                        p01[i] = v[2];
                    }
                }
            }
        };
        if self.num_qubits >= PAR_THRESHOLD {
            self.amps.par_chunks_mut(2 * hi_half).for_each(body);
        } else {
            self.amps.chunks_mut(2 * hi_half).for_each(body);
        }
    }

    /// Dense unitary of a circuit, column `j` is the image of basis state `j`.
    pub fn unitary(c: &Circuit) -> Result<DMatrix<Complex64>> {
        const UNITARY_CAP: usize = 12;
        if c.num_qubits() > UNITARY_CAP {
            return Err(Error::TooManyQubits { requested: c.num_qubits(), cap: UNITARY_CAP });
        }
        let dim = 1 << c.num_qubits();
        let mut u = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            let mut psi = StateVector::basis(c.num_qubits(), j)?;
            psi.apply_circuit(c)?;
            u.column_mut(j).copy_from_slice(&psi.amps);
        }
        Ok(u)
    }
}

fn check_cap(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits { requested: n, cap: MAX_QUBITS });
    }
    Ok(())
}

/// Whether `a = e^{iφ} b` for some φ, comparing entries to `tol`.
pub fn equal_up_to_phase(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, tol: f64) -> bool {
    if a.shape() != b.shape() {
        return false;
    }
    let Some((k, _)) = b.iter().enumerate().max_by(|x, y| x.1.norm().total_cmp(&y.1.norm())) else {
        return true;
    };
    if b[k].norm() < tol {
        return a.iter().all(|x| x.norm() < tol);
    }
    let phase = a[k] / b[k];
    let phase = phase / phase.norm();
    a.iter().zip(b.iter()).all(|(x, y)| (x - phase * y).norm() < tol)
}

/// Smallest `max_ij |a_ij - e^{iφ} b_ij|` over a phase fixed by the largest entry of `b`.
pub fn phase_distance(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let mut overlap = Complex64::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b.iter()) {
        overlap += y.conj() * x;
    }
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
    a.iter().zip(b.iter()).map(|(x, y)| (x - phase * y).norm()).fold(0.0, f64::max)
}
