//! Interleave permutations and their circuits.
//!
//! The interleave sends mode `nq + ℓ` to position `ℓ·(N/n) + q`, so the
//! modes of each residue class `ℓ` mod `n` end up contiguous. As a fermionic
//! operation it is a relabelling of qubits followed by a CZ on every pair of
//! modes whose order it inverts, the CZ acting on the pair's new positions.

use serde::{Deserialize, Serialize};
use std::str::FromStr;

use crate::circuit::{parse_circuit, Circuit, Gate};
use crate::czopt::{decimate, CzGraph, DEFAULT_DEPTH_PENALTY};
use crate::{Error, Result};

const IMPORTED_9: &str = include_str!("../../data/interleave_3way_9.txt");
const IMPORTED_27: &str = include_str!("../../data/interleave_3way_27.txt");

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterleaveStrategy {
    /// Adjacent FSWAP network; reorders the qubits physically.
    LocalFswap,
    /// Prefix-parity CX ladders with the CZs in between; reordering in software.
    #[default]
    CxLadder,
    /// Greedy graph decimation of the inversion graph; reordering in software.
    GraphDecimated,
    /// Shipped listings for the 3-way interleave on 9 and 27 modes.
    #[serde(rename = "imported", alias = "imported-sequence")]
    ImportedSequence,
}

impl InterleaveStrategy {
    pub const ALL: [InterleaveStrategy; 4] = [
        InterleaveStrategy::LocalFswap,
        InterleaveStrategy::CxLadder,
        InterleaveStrategy::GraphDecimated,
        InterleaveStrategy::ImportedSequence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InterleaveStrategy::LocalFswap => "local-fswap",
            InterleaveStrategy::CxLadder => "cx-ladder",
            InterleaveStrategy::GraphDecimated => "graph-decimated",
            InterleaveStrategy::ImportedSequence => "imported",
        }
    }

    /// Whether the SWAP part of the permutation is left to a software relabelling.
    pub fn software_swaps(self) -> bool {
        self != InterleaveStrategy::LocalFswap
    }
}

impl FromStr for InterleaveStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "local-fswap" | "local" | "fswap" => Ok(Self::LocalFswap),
            "cx-ladder" | "ladder" => Ok(Self::CxLadder),
            "graph-decimated" | "decimated" | "graph" => Ok(Self::GraphDecimated),
            "imported" | "imported-sequence" => Ok(Self::ImportedSequence),
            other => Err(Error::InvalidConfig(format!(
                "unknown interleave strategy {other:?} (expected local-fswap, cx-ladder, graph-decimated or imported)"
            ))),
        }
    }
}

/// Interleave of `N` modes with radix `n`, or its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterleavePermutation {
    pub num_modes: usize,
    pub radix: usize,
    /// `true` for the de-interleave `σ⁻¹`.
    pub inverse: bool,
    forward: Vec<usize>,
}

/// `σ(nq + ℓ) = ℓ·(N/n) + q`.
pub fn interleave_permutation(num_modes: usize, radix: usize) -> Result<InterleavePermutation> {
    if radix == 0 || num_modes % radix != 0 {
        return Err(Error::NotDivisible { modes: num_modes, radix });
    }
    let m = num_modes / radix;
    let forward = (0..num_modes).map(|x| (x % radix) * m + x / radix).collect();
    Ok(InterleavePermutation { num_modes, radix, inverse: false, forward })
}

impl InterleavePermutation {
    /// New position of each mode.
    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    /// Modes listed by new position.
    pub fn order(&self) -> Vec<usize> {
        crate::circuit::invert_permutation(&self.forward)
    }

    pub fn inverted(&self) -> InterleavePermutation {
        InterleavePermutation {
            num_modes: self.num_modes,
            radix: self.radix,
            inverse: !self.inverse,
            forward: self.order(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Position of residue class `l`, index `q` on the side where the CZs act.
    fn pos(&self, l: usize, q: usize) -> usize {
        let m = self.num_modes / self.radix;
        if self.inverse {
            self.radix * q + l
        } else {
            l * m + q
        }
    }
}

/// CZ graph of the sign part: an edge `{σ(a), σ(b)}` for every inverted pair `a < b`.
pub fn interleave_cz_graph(p: &InterleavePermutation) -> CzGraph {
    let f = &p.forward;
    let n = f.len();
    let edges = (0..n).flat_map(|a| (a + 1..n).filter(move |&b| f[a] > f[b]).map(move |b| (f[a], f[b])));
    CzGraph::from_edges(n, edges).expect("permutation entries are in range")
}

/// Circuit implementing the fermionic mode permutation `c_m ↦ c_{σ(m)}`.
///
/// LocalFswap returns a plain FSWAP network. The other strategies return the
/// relabelling as the circuit's leading software permutation and gates that
/// realise only the CZ graph.
pub fn interleave_circuit(p: &InterleavePermutation, strategy: InterleaveStrategy) -> Result<Circuit> {
    let n = p.num_modes;
    if p.is_identity() {
        return Ok(Circuit::new(n));
    }
    let phase = match strategy {
        InterleaveStrategy::LocalFswap => return Ok(fswap_network(p.forward())),
        InterleaveStrategy::CxLadder => cx_ladder(p),
        InterleaveStrategy::GraphDecimated => decimate(&interleave_cz_graph(p), DEFAULT_DEPTH_PENALTY),
        InterleaveStrategy::ImportedSequence => imported(p)?,
    };
    phase.with_relabel(p.forward().to_vec())
}

/// Odd-even transposition sort of the modes by target position.
pub fn fswap_network(forward: &[usize]) -> Circuit {
    let n = forward.len();
    let mut key: Vec<usize> = forward.to_vec();
    let mut c = Circuit::new(n);
    // n alternating rounds sort any input
    for round in 0..n {
        for i in (round % 2..n.saturating_sub(1)).step_by(2) {
            if key[i] > key[i + 1] {
                key.swap(i, i + 1);
                c.push(Gate::Fswap(i, i + 1)).expect("adjacent qubits");
            }
        }
    }
    debug_assert!(key.windows(2).all(|w| w[0] < w[1]));
    c
}

/// For each class `l1 ≥ 1` a CX ladder accumulates prefix parities of the
/// class, every lower class picks up its phase through one CZ per member,
/// and the ladder is undone.
fn cx_ladder(p: &InterleavePermutation) -> Circuit {
    let (n, m) = (p.radix, p.num_modes / p.radix);
    let mut c = Circuit::new(p.num_modes);
    let mut push = |g| c.push(g).expect("in range");
    for l1 in 1..n {
        for q in 1..m.saturating_sub(1) {
            push(Gate::Cx(p.pos(l1, q - 1), p.pos(l1, q)));
        }
        for q2 in 1..m {
            for l2 in 0..l1 {
                push(Gate::Cz(p.pos(l1, q2 - 1), p.pos(l2, q2)));
            }
        }
        for q in (1..m.saturating_sub(1)).rev() {
            push(Gate::Cx(p.pos(l1, q - 1), p.pos(l1, q)));
        }
    }
    c
}

/// Shipped listing for `N ∈ {9, 27}`, `n = 3`.
pub fn imported_listing(num_modes: usize) -> Option<Circuit> {
    let src = match num_modes {
        9 => IMPORTED_9,
        27 => IMPORTED_27,
        _ => return None,
    };
    Some(parse_circuit(src).expect("shipped listing parses"))
}

fn imported(p: &InterleavePermutation) -> Result<Circuit> {
    let listing = match (p.radix, imported_listing(p.num_modes)) {
        (3, Some(c)) => c,
        _ => return Err(Error::NoImportedSequence { modes: p.num_modes, radix: p.radix }),
    };
    if !p.inverse {
        return Ok(listing);
    }
    // the de-interleave's graph is the interleave's graph with σ⁻¹ applied to the labels
    let back = p.forward();
    let mut c = Circuit::new(p.num_modes);
    for g in listing.gates() {
        c.push(g.map_qubits(|q| back[q]))?;
    }
    Ok(c)
}
