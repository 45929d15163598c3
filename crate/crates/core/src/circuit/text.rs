//! Line-oriented circuit text format.
//!
//! ```text
//! # comment
//! QUBITS(9)
//! CX(6,3)CZ(7,2)
//!
//! CZ(6,4) CZ(3,2)
//! RZ(0,0.39269908169872414)
//! ```
//!
//! Several gate tokens may share a line. A blank line is a barrier. `QUBITS`
//! and `RELABEL` are optional header directives; without `QUBITS` the register
//! is sized by the largest index seen. Angles come last and are written with
//! round-trip precision.

use super::{Circuit, Gate};
use crate::{Error, Result};

/// Render a circuit in the text format. Parsing the output gives back the same circuit.
pub fn write_circuit(c: &Circuit) -> String {
    let mut out = format!("QUBITS({})\n", c.num_qubits());
    if let Some(r) = c.relabel() {
        let args: Vec<String> = r.iter().map(|p| p.to_string()).collect();
        out.push_str(&format!("RELABEL({})\n", args.join(",")));
    }
    for g in c.gates() {
        if let Gate::Barrier = g {
            out.push('\n');
        } else {
            out.push_str(&g.to_string());
            out.push('\n');
        }
    }
    out
}

/// Parse the text format.
pub fn parse_circuit(src: &str) -> Result<Circuit> {
    let mut declared: Option<usize> = None;
    let mut relabel: Option<Vec<usize>> = None;
    let mut gates: Vec<Gate> = Vec::new();
    let mut pending_barrier = false;

    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            // comment-only lines do not separate layers
            if raw.trim().is_empty() && !gates.is_empty() {
                pending_barrier = true;
            }
            continue;
        }
        for (name, args) in tokens(line, line_no)? {
            let err = |message: String| Error::Parse { line: line_no, message };
            match name.as_str() {
                "QUBITS" => {
                    let [n] = ints::<1>(&args).map_err(err)?;
                    declared = Some(n);
                    continue;
                }
                "RELABEL" => {
                    let perm = args
                        .iter()
                        .map(|a| a.parse::<usize>().map_err(|e| err(format!("bad index {a:?}: {e}"))))
                        .collect::<Result<Vec<_>>>()?;
                    relabel = Some(perm);
                    continue;
                }
                _ => {}
            }
            if pending_barrier {
                gates.push(Gate::Barrier);
                pending_barrier = false;
            }
            gates.push(gate(&name, &args).map_err(err)?);
        }
    }

    let used = gates
        .iter()
        .flat_map(|g| g.qubits())
        .chain(relabel.iter().flat_map(|r| r.iter().copied()))
        .max()
        .map_or(0, |m| m + 1);
    let n = declared.unwrap_or(used).max(relabel.as_ref().map_or(0, |r| r.len()));
    let mut c = Circuit::from_gates(n, gates)?;
    if let Some(r) = relabel {
        c = c.with_relabel(r)?;
    }
    Ok(c)
}

fn tokens(line: &str, line_no: usize) -> Result<Vec<(String, Vec<String>)>> {
    let mut out = Vec::new();
    let mut rest = line;
    while !rest.trim_start().is_empty() {
        rest = rest.trim_start();
        let open = rest.find('(').ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("expected NAME(args) at {rest:?}"),
        })?;
        let close = rest[open..].find(')').map(|c| c + open).ok_or_else(|| Error::Parse {
            line: line_no,
            message: "unclosed parenthesis".into(),
        })?;
        let name = rest[..open].trim().to_ascii_uppercase();
        let args = rest[open + 1..close].split(',').map(|a| a.trim().to_string()).collect();
        out.push((name, args));
        rest = &rest[close + 1..];
    }
    Ok(out)
}

fn ints<const K: usize>(args: &[String]) -> std::result::Result<[usize; K], String> {
    if args.len() != K {
        return Err(format!("expected {K} index arguments, got {}", args.len()));
    }
    let mut out = [0; K];
    for (o, a) in out.iter_mut().zip(args) {
        *o = a.parse().map_err(|e| format!("bad index {a:?}: {e}"))?;
    }
    Ok(out)
}

fn angle(a: &str) -> std::result::Result<f64, String> {
    a.parse().map_err(|e| format!("bad angle {a:?}: {e}"))
}

fn gate(name: &str, args: &[String]) -> std::result::Result<Gate, String> {
    let g = match name {
        "CZ" => ints::<2>(args).map(|[a, b]| Gate::Cz(a, b))?,
        "CX" | "CNOT" => ints::<2>(args).map(|[a, b]| Gate::Cx(a, b))?,
        "CY" => ints::<2>(args).map(|[a, b]| Gate::Cy(a, b))?,
        "CYDG" => ints::<2>(args).map(|[a, b]| Gate::Cydg(a, b))?,
        "SWAP" => ints::<2>(args).map(|[a, b]| Gate::Swap(a, b))?,
        "FSWAP" => ints::<2>(args).map(|[a, b]| Gate::Fswap(a, b))?,
        "X" => ints::<1>(args).map(|[q]| Gate::X(q))?,
        "Z" => ints::<1>(args).map(|[q]| Gate::Z(q))?,
        "S" => ints::<1>(args).map(|[q]| Gate::S(q))?,
        "SDG" => ints::<1>(args).map(|[q]| Gate::Sdg(q))?,
        "RZ" | "GIVENS" => {
            let Some((last, qs)) = args.split_last() else {
                return Err(format!("{name} needs arguments"));
            };
            let theta = angle(last)?;
            if name == "RZ" {
                ints::<1>(qs).map(|[q]| Gate::Rz(q, theta))?
            } else {
                ints::<2>(qs).map(|[a, b]| Gate::Givens(a, b, theta))?
            }
        }
        other => return Err(format!("unknown gate {other:?}")),
    };
    Ok(g)
}
