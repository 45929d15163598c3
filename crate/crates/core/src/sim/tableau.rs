//! Stabilizer tableau of a Clifford unitary.
//!
//! Row `i` holds `U X_i U†` and row `n + i` holds `U Z_i U†`, each as a
//! Pauli string with a sign bit. Two Clifford unitaries are equal up to a
//! global phase exactly when their tableaux are equal.

use std::f64::consts::FRAC_PI_2;

use crate::circuit::{Circuit, Gate, ANGLE_TOLERANCE};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
struct Row {
    x: Vec<u64>,
    z: Vec<u64>,
    sign: bool,
}

impl Row {
    fn zero(words: usize) -> Self {
        Self { x: vec![0; words], z: vec![0; words], sign: false }
    }

    fn get(v: &[u64], q: usize) -> bool {
        v[q / 64] >> (q % 64) & 1 == 1
    }

    fn flip(v: &mut [u64], q: usize) {
        v[q / 64] ^= 1 << (q % 64);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerTableau {
    num_qubits: usize,
    rows: Vec<Row>,
}

impl StabilizerTableau {
    pub fn identity(num_qubits: usize) -> Self {
        let words = num_qubits.div_ceil(64).max(1);
        let mut rows = vec![Row::zero(words); 2 * num_qubits];
        for q in 0..num_qubits {
            Row::flip(&mut rows[q].x, q);
            Row::flip(&mut rows[num_qubits + q].z, q);
        }
        Self { num_qubits, rows }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Tableau of a Clifford circuit, including its leading relabelling.
    pub fn of(c: &Circuit) -> Result<Self> {
        let n = c.num_qubits();
        let mut t = Self::identity(n);
        if let Some(p) = c.relabel() {
            for i in 0..n {
                t.rows[i] = Row::zero(t.rows[i].x.len());
                Row::flip(&mut t.rows[i].x, p[i]);
                t.rows[n + i] = Row::zero(t.rows[i].x.len());
                Row::flip(&mut t.rows[n + i].z, p[i]);
            }
        }
        for g in c.gates() {
            t.apply(g)?;
        }
        Ok(t)
    }

    /// Conjugate every row by `g`, i.e. append `g` to the circuit.
    pub fn apply(&mut self, g: &Gate) -> Result<()> {
        for q in g.qubits() {
            if q >= self.num_qubits {
                return Err(Error::QubitOutOfRange { index: q, num_qubits: self.num_qubits });
            }
        }
        match *g {
            Gate::Barrier => {}
            Gate::X(q) => {
                self.h(q);
                self.s(q);
                self.s(q);
                self.h(q);
            }
            Gate::Z(q) => {
                self.s(q);
                self.s(q);
            }
            Gate::S(q) => self.s(q),
            Gate::Sdg(q) => {
                self.s(q);
                self.s(q);
                self.s(q);
            }
            Gate::Rz(q, a) => {
                for _ in 0..quarter_turns(a, g)? {
                    self.s(q);
                }
            }
            Gate::Cx(c, t) => self.cx(c, t),
            Gate::Cz(a, b) => self.cz(a, b),
            Gate::Cy(c, t) => {
                self.cx(c, t);
                self.cz(c, t);
            }
            Gate::Cydg(c, t) => {
                self.apply(&Gate::Z(c))?;
                self.cx(c, t);
                self.cz(c, t);
            }
            Gate::Swap(a, b) => self.swap(a, b),
            Gate::Fswap(a, b) => {
                self.swap(a, b);
                self.cz(a, b);
            }
            Gate::Givens(a, b, t) => {
                // Givens(π/2) = (S ⊗ S) · FSWAP
                for _ in 0..quarter_turns(t, g)? {
                    self.swap(a, b);
                    self.cz(a, b);
                    self.s(a);
                    self.s(b);
                }
            }
        }
        Ok(())
    }

    fn h(&mut self, q: usize) {
        for r in &mut self.rows {
            let (x, z) = (Row::get(&r.x, q), Row::get(&r.z, q));
            r.sign ^= x && z;
            if x != z {
                Row::flip(&mut r.x, q);
                Row::flip(&mut r.z, q);
            }
        }
    }

    fn s(&mut self, q: usize) {
        for r in &mut self.rows {
            let (x, z) = (Row::get(&r.x, q), Row::get(&r.z, q));
            r.sign ^= x && z;
            if x {
                Row::flip(&mut r.z, q);
            }
        }
    }

    fn cx(&mut self, c: usize, t: usize) {
        for r in &mut self.rows {
            let (xc, zc) = (Row::get(&r.x, c), Row::get(&r.z, c));
            let (xt, zt) = (Row::get(&r.x, t), Row::get(&r.z, t));
            r.sign ^= xc && zt && (xt == zc);
            if xc {
                Row::flip(&mut r.x, t);
            }
            if zt {
                Row::flip(&mut r.z, c);
            }
        }
    }

    fn cz(&mut self, a: usize, b: usize) {
        self.h(b);
        self.cx(a, b);
        self.h(b);
    }

    fn swap(&mut self, a: usize, b: usize) {
        for r in &mut self.rows {
            for v in [&mut r.x, &mut r.z] {
                if Row::get(v, a) != Row::get(v, b) {
                    Row::flip(v, a);
                    Row::flip(v, b);
                }
            }
        }
    }

    /// Image of `X_q` (`z = false`) or `Z_q` (`z = true`) as `(sign, "XIZY…")`.
    pub fn pauli_image(&self, q: usize, z: bool) -> (bool, String) {
        let r = &self.rows[if z { self.num_qubits + q } else { q }];
        let s = (0..self.num_qubits)
            .map(|k| match (Row::get(&r.x, k), Row::get(&r.z, k)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            })
            .collect();
        (r.sign, s)
    }
}

/// Multiples of π/2 in `angle`, reduced mod 4; errors if not a Clifford angle.
fn quarter_turns(angle: f64, g: &Gate) -> Result<usize> {
    let m = angle / FRAC_PI_2;
    let r = m.round();
    if (m - r).abs() * FRAC_PI_2 > ANGLE_TOLERANCE * 1e3 {
        return Err(Error::NotClifford(format!("{g}")));
    }
    Ok((r as i64).rem_euclid(4) as usize)
}

/// Whether every gate has a Clifford tableau.
pub fn is_clifford(c: &Circuit) -> bool {
    c.gates().iter().all(|g| match *g {
        Gate::Rz(_, a) | Gate::Givens(_, _, a) => quarter_turns(a, g).is_ok(),
        _ => true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_circuit_is_identity() {
        let t = StabilizerTableau::of(&Circuit::new(3)).unwrap();
        assert_eq!(t, StabilizerTableau::identity(3));
    }

    #[test]
    fn cx_twice_is_identity() {
        let c = Circuit::from_gates(2, [Gate::Cx(0, 1), Gate::Cx(0, 1)]).unwrap();
        assert_eq!(StabilizerTableau::of(&c).unwrap(), StabilizerTableau::identity(2));
    }

    #[test]
    fn known_images() {
        let c = Circuit::from_gates(2, [Gate::Cx(0, 1)]).unwrap();
        let t = StabilizerTableau::of(&c).unwrap();
        assert_eq!(t.pauli_image(0, false), (false, "XX".into()));
        assert_eq!(t.pauli_image(1, true), (false, "ZZ".into()));

        let c = Circuit::from_gates(1, [Gate::S(0)]).unwrap();
        let t = StabilizerTableau::of(&c).unwrap();
        assert_eq!(t.pauli_image(0, false), (false, "Y".into()));

        let c = Circuit::from_gates(1, [Gate::Sdg(0)]).unwrap();
        let t = StabilizerTableau::of(&c).unwrap();
        assert_eq!(t.pauli_image(0, false), (true, "Y".into()));
    }

    #[test]
    fn rejects_non_clifford_angles() {
        let c = Circuit::from_gates(2, [Gate::Givens(0, 1, 0.3)]).unwrap();
        assert!(matches!(StabilizerTableau::of(&c), Err(Error::NotClifford(_))));
        let c = Circuit::from_gates(1, [Gate::Rz(0, -FRAC_PI_2)]).unwrap();
        let s = Circuit::from_gates(1, [Gate::Sdg(0)]).unwrap();
        assert_eq!(StabilizerTableau::of(&c).unwrap(), StabilizerTableau::of(&s).unwrap());
    }

    #[test]
    fn wide_registers_span_words() {
        let c = Circuit::from_gates(130, [Gate::Cx(3, 129), Gate::Cz(64, 127)]).unwrap();
        let t = StabilizerTableau::of(&c).unwrap();
        assert_ne!(t, StabilizerTableau::identity(130));
        let back = c.then(&c.inverse()).unwrap();
        assert_eq!(StabilizerTableau::of(&back).unwrap(), StabilizerTableau::identity(130));
    }
}
