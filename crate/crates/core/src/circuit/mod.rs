//! Gate-level intermediate representation.
//!
//! Qubit `q` of a register is Jordan-Wigner mode `q`: a gate only has a
//! fermionic meaning when the caller arranges its operands accordingly.
//! Angles are plain radians; there are no symbolic parameters.

mod text;

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::{Error, Result};

pub use text::{parse_circuit, write_circuit};

/// Tolerance used when comparing gate angles.
pub const ANGLE_TOLERANCE: f64 = 1e-12;

/// A single gate.
///
/// `Givens(a, b, θ)` is `exp(i θ (X_a X_b + Y_a Y_b) / 2)`: on the
/// single-excitation pair `{|01⟩, |10⟩}` it acts as `[[cos θ, i sin θ], [i sin θ, cos θ]]`.
/// `Cy` is the controlled-`iY` gate, equal to `CZ · CX` (CX first); `Cydg` is its inverse.
/// `Rz(q, α)` is `exp(-i α Z / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    Cz(usize, usize),
    /// Control first, target second.
    Cx(usize, usize),
    Cy(usize, usize),
    Cydg(usize, usize),
    Swap(usize, usize),
    Fswap(usize, usize),
    X(usize),
    Z(usize),
    S(usize),
    Sdg(usize),
    Rz(usize, f64),
    Givens(usize, usize, f64),
    /// Full-width barrier: nothing commutes across it when layering.
    Barrier,
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::Cz(..) => "CZ",
            Gate::Cx(..) => "CX",
            Gate::Cy(..) => "CY",
            Gate::Cydg(..) => "CYDG",
            Gate::Swap(..) => "SWAP",
            Gate::Fswap(..) => "FSWAP",
            Gate::X(_) => "X",
            Gate::Z(_) => "Z",
            Gate::S(_) => "S",
            Gate::Sdg(_) => "SDG",
            Gate::Rz(..) => "RZ",
            Gate::Givens(..) => "GIVENS",
            Gate::Barrier => "BARRIER",
        }
    }

    /// Qubit operands in declaration order.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Cz(a, b)
            | Gate::Cx(a, b)
            | Gate::Cy(a, b)
            | Gate::Cydg(a, b)
            | Gate::Swap(a, b)
            | Gate::Fswap(a, b)
            | Gate::Givens(a, b, _) => vec![a, b],
            Gate::X(q) | Gate::Z(q) | Gate::S(q) | Gate::Sdg(q) | Gate::Rz(q, _) => vec![q],
            Gate::Barrier => Vec::new(),
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.qubits().len() == 2
    }

    /// Number of native entangling interactions the gate costs.
    ///
    /// CZ, CX and CY-type gates are one interaction. A Givens rotation is the
    /// product of commuting `XX` and `YY` rotations, i.e. two; FSWAP equals
    /// `Givens(π/2)` up to local phases and also costs two. SWAP costs three.
    pub fn two_qubit_cost(&self) -> usize {
        match self {
            Gate::Cz(..) | Gate::Cx(..) | Gate::Cy(..) | Gate::Cydg(..) => 1,
            Gate::Givens(..) | Gate::Fswap(..) => 2,
            Gate::Swap(..) => 3,
            _ => 0,
        }
    }

    /// Inverse gate.
    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Rz(q, a) => Gate::Rz(q, -a),
            Gate::Givens(a, b, t) => Gate::Givens(a, b, -t),
            Gate::S(q) => Gate::Sdg(q),
            Gate::Sdg(q) => Gate::S(q),
            Gate::Cy(a, b) => Gate::Cydg(a, b),
            Gate::Cydg(a, b) => Gate::Cy(a, b),
            g => g,
        }
    }

    /// Rename every qubit operand through `f`.
    pub fn map_qubits(&self, f: impl Fn(usize) -> usize) -> Gate {
        match *self {
            Gate::Cz(a, b) => Gate::Cz(f(a), f(b)),
            Gate::Cx(a, b) => Gate::Cx(f(a), f(b)),
            Gate::Cy(a, b) => Gate::Cy(f(a), f(b)),
            Gate::Cydg(a, b) => Gate::Cydg(f(a), f(b)),
            Gate::Swap(a, b) => Gate::Swap(f(a), f(b)),
            Gate::Fswap(a, b) => Gate::Fswap(f(a), f(b)),
            Gate::X(q) => Gate::X(f(q)),
            Gate::Z(q) => Gate::Z(f(q)),
            Gate::S(q) => Gate::S(f(q)),
            Gate::Sdg(q) => Gate::Sdg(f(q)),
            Gate::Rz(q, a) => Gate::Rz(f(q), a),
            Gate::Givens(a, b, t) => Gate::Givens(f(a), f(b), t),
            Gate::Barrier => Gate::Barrier,
        }
    }

    /// Equality with angles compared to within `tol`.
    pub fn approx_eq(&self, other: &Gate, tol: f64) -> bool {
        match (*self, *other) {
            (Gate::Rz(q, a), Gate::Rz(p, b)) => q == p && (a - b).abs() <= tol,
            (Gate::Givens(a, b, t), Gate::Givens(c, d, s)) => {
                a == c && b == d && (t - s).abs() <= tol
            }
            (x, y) => x == y,
        }
    }

    /// Whether the gate maps the single-excitation sector into itself and
    /// preserves the vacuum (up to phase).
    pub fn conserves_particles(&self) -> bool {
        !matches!(self, Gate::Cx(..) | Gate::Cy(..) | Gate::Cydg(..) | Gate::X(_))
    }

    fn validate(&self, num_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        for &q in &qs {
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange { index: q, num_qubits });
            }
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::RepeatedQubit { gate: self.name(), qubit: qs[0] });
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Rz(q, a) => write!(f, "RZ({q},{a:?})"),
            Gate::Givens(a, b, t) => write!(f, "GIVENS({a},{b},{t:?})"),
            Gate::Barrier => Ok(()),
            g => {
                let qs = g.qubits();
                let args: Vec<String> = qs.iter().map(|q| q.to_string()).collect();
                write!(f, "{}({})", g.name(), args.join(","))
            }
        }
    }
}

/// An ordered gate list over a fixed register.
///
/// A circuit may start with a software qubit relabelling: qubit `i` is moved
/// to position `relabel[i]` (no signs) before the first gate. Interleaves
/// that leave the SWAP part of a fermionic permutation to software record it
/// here, so the circuit still denotes the full unitary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    relabel: Option<Vec<usize>>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self { num_qubits, gates: Vec::new(), relabel: None }
    }

    pub fn from_gates(num_qubits: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut c = Self::new(num_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    /// Set the leading software relabelling. Identity permutations are dropped.
    pub fn with_relabel(mut self, perm: Vec<usize>) -> Result<Self> {
        validate_permutation(&perm, self.num_qubits)?;
        self.relabel = if perm.iter().enumerate().all(|(i, &p)| i == p) { None } else { Some(perm) };
        Ok(self)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn relabel(&self) -> Option<&[usize]> {
        self.relabel.as_deref()
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Gates with two distinct operands, weighted by [`Gate::two_qubit_cost`].
    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().map(Gate::two_qubit_cost).sum()
    }

    /// Number of two-qubit layers under greedy left-to-right layering.
    ///
    /// A gate of cost `w` occupies `w` consecutive layers on its qubits.
    /// Barriers synchronise every qubit to the deepest layer so far.
    pub fn two_qubit_depth(&self) -> usize {
        let mut level = vec![0usize; self.num_qubits];
        let mut depth = 0;
        for g in &self.gates {
            if let Gate::Barrier = g {
                level.iter_mut().for_each(|l| *l = depth);
                continue;
            }
            let w = g.two_qubit_cost();
            if w == 0 {
                continue;
            }
            let qs = g.qubits();
            let start = qs.iter().map(|&q| level[q]).max().unwrap_or(0);
            for &q in &qs {
                level[q] = start + w;
            }
            depth = depth.max(start + w);
        }
        depth
    }

    /// The inverse circuit: reversed order, each gate inverted.
    ///
    /// For `U = G · R` (relabel `R` first) the inverse is
    /// `R⁻¹ G† = (R⁻¹ G† R) R⁻¹`, so the gates are renamed through `R⁻¹`.
    pub fn inverse(&self) -> Circuit {
        let inv_perm = self.relabel.as_ref().map(|p| invert_permutation(p));
        let rename = |q: usize| inv_perm.as_ref().map_or(q, |p| p[q]);
        Circuit {
            num_qubits: self.num_qubits,
            gates: self.gates.iter().rev().map(|g| g.inverse().map_qubits(rename)).collect(),
            relabel: inv_perm,
        }
    }

    /// `other` applied after `self`.
    pub fn then(&self, other: &Circuit) -> Result<Circuit> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, found: other.num_qubits });
        }
        // G2 R2 G1 R1 = G2 (R2 G1 R2⁻¹) R2 R1
        let Some(r2) = other.relabel.as_ref() else {
            let mut out = self.clone();
            out.gates.extend_from_slice(&other.gates);
            return Ok(out);
        };
        let mut gates: Vec<Gate> = self.gates.iter().map(|g| g.map_qubits(|q| r2[q])).collect();
        gates.extend_from_slice(&other.gates);
        let relabel: Vec<usize> = match &self.relabel {
            Some(r1) => r1.iter().map(|&p| r2[p]).collect(),
            None => r2.clone(),
        };
        Circuit { num_qubits: self.num_qubits, gates, relabel: None }.with_relabel(relabel)
    }

    /// Equal gate lists (angles within [`ANGLE_TOLERANCE`]) and relabellings.
    pub fn approx_eq(&self, other: &Circuit) -> bool {
        self.num_qubits == other.num_qubits
            && self.relabel == other.relabel
            && self.gates.len() == other.gates.len()
            && self.gates.iter().zip(&other.gates).all(|(a, b)| a.approx_eq(b, ANGLE_TOLERANCE))
    }

    /// Rename all qubits through `map` into a register of `num_qubits`.
    /// The relabelling is conjugated accordingly.
    pub fn embed(&self, num_qubits: usize, map: &[usize]) -> Result<Circuit> {
        if map.len() != self.num_qubits {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, found: map.len() });
        }
        let mut out = Circuit::new(num_qubits);
        for g in &self.gates {
            out.push(g.map_qubits(|q| map[q]))?;
        }
        if let Some(r) = &self.relabel {
            let mut full: Vec<usize> = (0..num_qubits).collect();
            for (i, &p) in r.iter().enumerate() {
                full[map[i]] = map[p];
            }
            out = out.with_relabel(full)?;
        }
        Ok(out)
    }
}

pub(crate) fn validate_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidPermutation(format!("length {} for {} qubits", perm.len(), n)));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidPermutation(format!("{perm:?} is not a bijection")));
        }
        seen[p] = true;
    }
    Ok(())
}

pub(crate) fn invert_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}
