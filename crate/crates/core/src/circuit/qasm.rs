//! OpenQASM 2.0 subset: one quantum register, `cx`, `swap` and 1-qubit gates.

use std::fmt::Write;

use thiserror::Error;

use super::{Circuit, Gate};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message} (at `{token}`)")]
pub struct QasmError {
    pub line: usize,
    pub token: String,
    pub message: String,
}

pub(super) fn emit(c: &Circuit) -> String {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{}];", c.num_qubits());
    for g in c.gates() {
        let _ = match g {
            Gate::Single { name, qubit } => writeln!(out, "{name} q[{qubit}];"),
            Gate::Cnot { control, target } => writeln!(out, "cx q[{control}],q[{target}];"),
            Gate::Swap { a, b } => writeln!(out, "swap q[{a}],q[{b}];"),
        };
    }
    out
}

struct Statement {
    line: usize,
    text: String,
}

fn statements(text: &str) -> Result<Vec<Statement>, QasmError> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut start_line = 1;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split("//").next().unwrap_or("");
        for ch in line.chars() {
            if ch == ';' {
                out.push(Statement {
                    line: start_line,
                    text: current.trim().to_string(),
                });
                current.clear();
            } else {
                if current.trim().is_empty() && !ch.is_whitespace() {
                    start_line = idx + 1;
                }
                current.push(ch);
            }
        }
        current.push(' ');
    }
    if !current.trim().is_empty() {
        return Err(QasmError {
            line: start_line,
            token: current.trim().to_string(),
            message: "statement is missing its terminating `;`".into(),
        });
    }
    Ok(out)
}

pub(super) fn parse(text: &str) -> Result<Circuit, QasmError> {
    let mut register: Option<(String, usize)> = None;
    let mut gates = Vec::new();
    for st in statements(text)? {
        if st.text.is_empty() {
            continue;
        }
        let err = |token: &str, message: &str| QasmError {
            line: st.line,
            token: token.to_string(),
            message: message.to_string(),
        };
        let (head, rest) = split_head(&st.text);
        match head {
            "OPENQASM" => {
                if rest.trim() != "2.0" {
                    return Err(err(rest.trim(), "only OpenQASM 2.0 is supported"));
                }
            }
            "include" | "barrier" | "creg" => {}
            "qreg" => {
                if register.is_some() {
                    return Err(err(head, "only one quantum register is supported"));
                }
                let (name, size) = parse_operand(rest.trim())
                    .ok_or_else(|| err(rest.trim(), "expected `name[size]`"))?;
                register = Some((name.to_string(), size));
            }
            _ => {
                let Some((reg, size)) = &register else {
                    return Err(err(head, "gate before `qreg` declaration"));
                };
                let mut qubits = Vec::new();
                for operand in rest.split(',') {
                    let operand = operand.trim();
                    let (name, index) =
                        parse_operand(operand).ok_or_else(|| err(operand, "expected `q[i]`"))?;
                    if name != reg {
                        return Err(err(operand, "unknown register"));
                    }
                    if index >= *size {
                        return Err(err(operand, "qubit index out of range"));
                    }
                    qubits.push(index);
                }
                let gate = match (head, qubits.as_slice()) {
                    ("cx" | "CX", &[a, b]) => Gate::cnot(a, b),
                    ("swap", &[a, b]) => Gate::swap(a, b),
                    (_, &[q]) => Gate::single(head, q),
                    (_, &[_, _]) => return Err(err(head, "unsupported 2-qubit gate")),
                    _ => return Err(err(head, "gates must act on one or two qubits")),
                };
                if let Gate::Cnot { control: a, target: b } | Gate::Swap { a, b } = gate {
                    if a == b {
                        return Err(err(rest.trim(), "2-qubit gate repeats a qubit"));
                    }
                }
                gates.push(gate);
            }
        }
    }
    let (_, size) = register.ok_or(QasmError {
        line: 0,
        token: String::new(),
        message: "no `qreg` declaration".into(),
    })?;
    Ok(Circuit::new(size, gates).expect("operands validated during parsing"))
}

/// Splits `name(params) operands` into the gate head and operand text.
fn split_head(text: &str) -> (&str, &str) {
    let mut depth = 0usize;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            c if c.is_whitespace() && depth == 0 => return (&text[..i], &text[i..]),
            _ => {}
        }
    }
    (text, "")
}

fn parse_operand(text: &str) -> Option<(&str, usize)> {
    let (name, rest) = text.split_once('[')?;
    let index = rest.strip_suffix(']')?.trim().parse().ok()?;
    let name = name.trim();
    (!name.is_empty()).then_some((name, index))
}
