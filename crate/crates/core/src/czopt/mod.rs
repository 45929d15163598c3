//! Greedy graph decimation for CZ circuits.
//!
//! A graph `G` stands for `U_G = Π_{(i,j)∈E} CZ_ij`. Decimation applies
//! local rewrites until no edge is left and reads the circuit off the
//! rewrite sequence in reverse.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::sim::StabilizerTableau;
use crate::{Error, Result};

/// Default penalty for a step that opens a new layer.
pub const DEFAULT_DEPTH_PENALTY: f64 = 0.5;

/// Simple undirected graph over qubit indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CzGraph {
    num_qubits: usize,
    adj: Vec<Vec<u64>>,
}

fn words(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

fn has(bits: &[u64], k: usize) -> bool {
    bits[k / 64] >> (k % 64) & 1 == 1
}

fn count(bits: &[u64]) -> usize {
    bits.iter().map(|w| w.count_ones() as usize).sum()
}

impl CzGraph {
    pub fn new(num_qubits: usize) -> Self {
        Self { num_qubits, adj: vec![vec![0; words(num_qubits)]; num_qubits] }
    }

    pub fn from_edges(num_qubits: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::new(num_qubits);
        for (i, j) in edges {
            g.check_pair(i, j)?;
            if !g.has_edge(i, j) {
                g.toggle(i, j);
            }
        }
        Ok(g)
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        for q in [i, j] {
            if q >= self.num_qubits {
                return Err(Error::QubitOutOfRange { index: q, num_qubits: self.num_qubits });
            }
        }
        if i == j {
            return Err(Error::RepeatedQubit { gate: "CZ", qubit: i });
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        has(&self.adj[i], j)
    }

    /// Toggle `(i, j)`; self pairs are ignored.
    pub fn toggle(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.adj[i][j / 64] ^= 1 << (j % 64);
        self.adj[j][i / 64] ^= 1 << (i % 64);
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.num_qubits).filter(|&k| has(&self.adj[i], k)).collect()
    }

    pub fn degree(&self, i: usize) -> usize {
        count(&self.adj[i])
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(|r| count(r)).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.adj.iter().all(|r| r.iter().all(|&w| w == 0))
    }

    /// Edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.num_qubits)
            .flat_map(|i| (i + 1..self.num_qubits).filter(move |&j| has(&self.adj[i], j)).map(move |j| (i, j)))
            .collect()
    }

    /// One CZ per edge.
    pub fn to_circuit(&self) -> Circuit {
        Circuit::from_gates(self.num_qubits, self.edges().into_iter().map(|(i, j)| Gate::Cz(i, j)))
            .expect("edges are in range")
    }

    /// Parse `i j` pairs, one per line. `#` starts a comment.
    pub fn parse_edge_list(src: &str, num_qubits: Option<usize>) -> Result<Self> {
        let mut edges = Vec::new();
        for (idx, raw) in src.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let nums: Vec<usize> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse { line: idx + 1, message: format!("{e}") })?;
            let [i, j] = nums[..] else {
                return Err(Error::Parse { line: idx + 1, message: format!("expected two indices, got {line:?}") });
            };
            edges.push((i, j));
        }
        let n = num_qubits.unwrap_or_else(|| edges.iter().map(|&(i, j)| i.max(j) + 1).max().unwrap_or(0));
        Self::from_edges(n, edges)
    }
}

/// Rewrite rules, in tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    /// `U_G CZ_ij`.
    CzRemoval,
    /// `CX_ij U_G CX_ij`.
    CxConjugation,
    /// `CX_ij U_G CY_ij†`.
    CxCyWrap,
}

impl Rule {
    pub fn cost(self) -> usize {
        match self {
            Rule::CzRemoval => 1,
            Rule::CxConjugation | Rule::CxCyWrap => 2,
        }
    }
}

/// One rewrite; for the CX rules `i` is the control and `j` the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecimationStep {
    pub rule: Rule,
    pub qubits: (usize, usize),
    pub cost: usize,
}

impl DecimationStep {
    pub fn new(rule: Rule, i: usize, j: usize) -> Self {
        Self { rule, qubits: (i, j), cost: rule.cost() }
    }
}

/// Edges toggled by a step, as a bitset over partners of `i`.
fn toggled(g: &CzGraph, rule: Rule, i: usize, j: usize) -> Vec<u64> {
    let mut t = vec![0u64; words(g.num_qubits)];
    match rule {
        Rule::CzRemoval => t[j / 64] |= 1 << (j % 64),
        Rule::CxConjugation => t.copy_from_slice(&g.adj[j]),
        Rule::CxCyWrap => {
            t.copy_from_slice(&g.adj[j]);
            t[j / 64] ^= 1 << (j % 64);
        }
    }
    t[i / 64] &= !(1 << (i % 64));
    t
}

/// Graph after a step. The diagonal single-qubit phases that accompany the
/// CX rules are not part of the graph; [`decimate`] tracks them.
pub fn apply_rule(g: &CzGraph, step: DecimationStep) -> Result<CzGraph> {
    let (i, j) = step.qubits;
    g.check_pair(i, j)?;
    let mut out = g.clone();
    let t = toggled(g, step.rule, i, j);
    for k in 0..g.num_qubits {
        if has(&t, k) {
            out.toggle(i, k);
        }
    }
    Ok(out)
}

/// Phase polynomial `f(x) = Σ_E x_i x_j + Σ_i z_i x_i` over GF(2): the
/// diagonal operator `(-1)^{f(x)}`.
struct PhasePoly {
    g: CzGraph,
    z: Vec<bool>,
}

impl PhasePoly {
    /// Substitute `x_j ← x_j ⊕ x_i` (conjugation by `CX_ij`).
    fn substitute(&mut self, i: usize, j: usize) {
        let nj = toggled(&self.g, Rule::CxConjugation, i, j);
        if self.g.has_edge(i, j) {
            // x_i x_j ↦ x_i x_j ⊕ x_i
            self.z[i] ^= true;
        }
        for k in 0..self.g.num_qubits {
            if has(&nj, k) {
                self.g.toggle(i, k);
            }
        }
        self.z[i] ^= self.z[j];
    }

    fn apply(&mut self, step: DecimationStep) {
        let (i, j) = step.qubits;
        match step.rule {
            Rule::CzRemoval => self.g.toggle(i, j),
            Rule::CxConjugation => self.substitute(i, j),
            Rule::CxCyWrap => {
                // CY† = CZ_ij · CX_ij · Z_i, and Z_i commutes with both
                self.g.toggle(i, j);
                self.substitute(i, j);
                self.z[i] ^= true;
            }
        }
    }
}

fn edge_delta(g: &CzGraph, rule: Rule, i: usize, j: usize) -> isize {
    let t = toggled(g, rule, i, j);
    let size = count(&t) as isize;
    let overlap: isize = t.iter().zip(&g.adj[i]).map(|(a, b)| (a & b).count_ones() as isize).sum();
    size - 2 * overlap
}

/// Greedy decimation, returning the circuit and the steps taken.
///
/// At every step the edge-reducing move minimising `Δ|E| + C` (plus
/// `depth_penalty` if it cannot join the current layer) is applied; ties go
/// to the smallest `(rule, i, j)`. If the result would use more two-qubit
/// gates than `g` has edges, one CZ per edge is returned instead.
pub fn decimate_with_steps(g: &CzGraph, depth_penalty: f64) -> (Circuit, Vec<DecimationStep>) {
    let n = g.num_qubits;
    let mut poly = PhasePoly { g: g.clone(), z: vec![false; n] };
    let mut steps = Vec::new();
    let mut layer = vec![false; n];

    while !poly.g.is_empty() {
        let mut best: Option<(f64, DecimationStep)> = None;
        for rule in [Rule::CzRemoval, Rule::CxConjugation, Rule::CxCyWrap] {
            for i in 0..n {
                for j in 0..n {
                    if i == j || (rule == Rule::CzRemoval && (j < i || !poly.g.has_edge(i, j))) {
                        continue;
                    }
                    let delta = edge_delta(&poly.g, rule, i, j);
                    if delta >= 0 {
                        continue;
                    }
                    let new_layer = layer[i] || layer[j];
                    let score = delta as f64 + rule.cost() as f64 + if new_layer { depth_penalty } else { 0.0 };
                    if best.as_ref().is_none_or(|(s, _)| score < *s - 1e-12) {
                        best = Some((score, DecimationStep::new(rule, i, j)));
                    }
                }
            }
        }
        let (_, step) = best.expect("a CZ removal is always available while edges remain");
        let (i, j) = step.qubits;
        if layer[i] || layer[j] {
            layer.iter_mut().for_each(|l| *l = false);
        }
        layer[i] = true;
        layer[j] = true;
        poly.apply(step);
        steps.push(step);
    }

    // U_G = L_1⁻¹ ⋯ L_m⁻¹ · Z(z) · R_m⁻¹ ⋯ R_1⁻¹ in matrix order
    let mut c = Circuit::new(n);
    for s in &steps {
        let (i, j) = s.qubits;
        let g = match s.rule {
            Rule::CzRemoval => Gate::Cz(i, j),
            Rule::CxConjugation => Gate::Cx(i, j),
            Rule::CxCyWrap => Gate::Cy(i, j),
        };
        c.push(g).expect("valid qubits");
    }
    for (q, &z) in poly.z.iter().enumerate() {
        if z {
            c.push(Gate::Z(q)).expect("valid qubit");
        }
    }
    for s in steps.iter().rev() {
        if s.rule != Rule::CzRemoval {
            let (i, j) = s.qubits;
            c.push(Gate::Cx(i, j)).expect("valid qubits");
        }
    }

    if c.two_qubit_count() > g.num_edges() {
        let steps = g.edges().into_iter().map(|(i, j)| DecimationStep::new(Rule::CzRemoval, i, j)).collect();
        return (g.to_circuit(), steps);
    }
    (c, steps)
}

/// Greedy decimation; see [`decimate_with_steps`].
pub fn decimate(g: &CzGraph, depth_penalty: f64) -> Circuit {
    decimate_with_steps(g, depth_penalty).0
}

/// Whether `c` equals `U_G` up to a global phase, by stabilizer tableaux.
pub fn verify_equivalence(c: &Circuit, g: &CzGraph) -> Result<bool> {
    if c.num_qubits() != g.num_qubits() {
        return Err(Error::DimensionMismatch { expected: g.num_qubits(), found: c.num_qubits() });
    }
    Ok(StabilizerTableau::of(c)? == StabilizerTableau::of(&g.to_circuit())?)
}
