//! Line-oriented circuit text format.
//!
//! ```text
//! # circuit fig2
//! t=0 PREP0 8
//! t=2 CPSTRING 8 body=Z4.Z5.Z6.Z7
//! t=9 CKX_CLASSICAL 10 12 13 14 1
//! ```
//!
//! One gate per line, qubits 1-indexed (data 1-7, ancillas 8-14), controls
//! first. A CPSTRING lists only its control; the body literal carries the
//! rest. Blank lines and `#` comments are ignored, except the optional
//! `# circuit <label>` header.

use std::fmt::Write;

use thiserror::Error;

use super::{Circuit, CircuitError, CircuitLabel, GateKind, GateOp};
use crate::pauli::PauliString;
use crate::REGISTER_QUBITS;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: unexpected token `{token}`: {reason}")]
    Token { line: usize, token: String, reason: String },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

pub fn export_text(c: &Circuit) -> String {
    let mut out = String::new();
    writeln!(out, "# circuit {}", c.label).unwrap();
    for g in c.gates() {
        write!(out, "t={} {}", g.timestep, g.kind).unwrap();
        let listed = if g.kind == GateKind::CPString {
            &g.qubits[..1]
        } else {
            &g.qubits[..]
        };
        for q in listed {
            write!(out, " {}", q + 1).unwrap();
        }
        if let Some(body) = g.body {
            write!(out, " body={body}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn import_text(text: &str) -> Result<Circuit, ParseError> {
    let mut label = CircuitLabel::Custom;
    let mut gates = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.trim();
        if let Some(comment) = content.strip_prefix('#') {
            if let Some(name) = comment.trim().strip_prefix("circuit ") {
                label = CircuitLabel::from_name(name.trim()).ok_or_else(|| ParseError::Token {
                    line,
                    token: name.trim().to_string(),
                    reason: "unknown circuit label".into(),
                })?;
            }
            continue;
        }
        if content.is_empty() {
            continue;
        }
        gates.push(parse_gate(line, content)?);
    }
    Ok(Circuit::from_gates(label, gates)?)
}

fn parse_gate(line: usize, content: &str) -> Result<GateOp, ParseError> {
    let err = |token: &str, reason: &str| ParseError::Token {
        line,
        token: token.to_string(),
        reason: reason.to_string(),
    };
    let mut tokens = content.split_whitespace();

    let step_tok = tokens.next().unwrap_or_default();
    let timestep = step_tok
        .strip_prefix("t=")
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| err(step_tok, "expected t=<step>"))?;

    let kind_tok = tokens.next().ok_or_else(|| err("", "missing gate kind"))?;
    let kind = GateKind::from_name(kind_tok).ok_or_else(|| err(kind_tok, "unknown gate kind"))?;

    let mut qubits = Vec::new();
    let mut body = None;
    for tok in tokens {
        if let Some(lit) = tok.strip_prefix("body=") {
            if body.is_some() {
                return Err(err(tok, "repeated body"));
            }
            let p = PauliString::parse(REGISTER_QUBITS, lit).map_err(|e| err(lit, &e.to_string()))?;
            body = Some(p);
            continue;
        }
        if body.is_some() {
            return Err(err(tok, "qubits must precede the body"));
        }
        let q: usize = tok.parse().map_err(|_| err(tok, "expected a qubit index"))?;
        if q == 0 || q > REGISTER_QUBITS {
            return Err(err(tok, "qubit outside 1..=14"));
        }
        qubits.push(q - 1);
    }

    match (kind, body) {
        (GateKind::CPString, Some(body)) => {
            if qubits.len() != 1 {
                return Err(err(content, "CPSTRING takes exactly one control"));
            }
            if body.support_mask() >> qubits[0] & 1 == 1 {
                return Err(err(content, "body overlaps the control"));
            }
            Ok(GateOp::cpstring(qubits[0], body).at(timestep))
        }
        (GateKind::CPString, None) => Err(err(content, "CPSTRING needs body=<pauli>")),
        (_, Some(_)) => Err(err(kind_tok, "only CPSTRING takes a body")),
        (kind, None) => Ok(GateOp {
            kind,
            qubits,
            body: None,
            timestep,
        }),
    }
}
