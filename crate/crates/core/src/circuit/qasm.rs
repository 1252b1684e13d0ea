//! OpenQASM 2.0 export and a small reader for the subset we emit.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;
use thiserror::Error;

use super::{Circuit, Control, Gate};

const RESERVED: &[&str] = &[
    "x", "h", "cx", "ccx", "swap", "cswap", "reset", "measure", "barrier", "gate", "opaque",
    "qreg", "creg", "include", "if", "U", "CX", "u1", "u2", "u3", "id", "y", "z", "s", "t",
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QasmError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing OPENQASM 2.0 header")]
    MissingHeader,
}

fn qreg_name(name: &str) -> String {
    if RESERVED.contains(&name) {
        format!("{name}_reg")
    } else {
        name.to_string()
    }
}

/// Number of ladder ancillas needed by the widest multi-controlled X.
pub fn ladder_ancillas(c: &Circuit) -> usize {
    c.gates()
        .iter()
        .map(|g| match g {
            Gate::Cx { controls, .. } => controls.len().saturating_sub(2),
            _ => 0,
        })
        .max()
        .unwrap_or(0)
}

struct Emitter<'a> {
    names: Vec<String>,
    anc: usize,
    out: &'a mut String,
}

impl Emitter<'_> {
    fn flip_negatives(&mut self, controls: &[Control]) {
        for c in controls.iter().filter(|c| !c.on_one) {
            let _ = writeln!(self.out, "x {};", self.names[c.qubit]);
        }
    }

    fn anc(&self, i: usize) -> String {
        debug_assert!(i < self.anc);
        format!("anc[{i}]")
    }

    fn cx(&mut self, controls: &[Control], target: usize) {
        let n = |c: &Control| self.names[c.qubit].as_str();
        let t = self.names[target].as_str();
        let lines = match controls {
            [] => vec![format!("x {t};")],
            [a] => vec![format!("cx {},{t};", n(a))],
            [a, b] => vec![format!("ccx {},{},{t};", n(a), n(b))],
            _ => {
                let k = controls.len();
                let mut ladder = vec![format!(
                    "ccx {},{},{};",
                    n(&controls[0]),
                    n(&controls[1]),
                    self.anc(0)
                )];
                for (i, c) in controls.iter().enumerate().take(k - 1).skip(2) {
                    ladder.push(format!(
                        "ccx {},{},{};",
                        n(c),
                        self.anc(i - 2),
                        self.anc(i - 1)
                    ));
                }
                let mut lines = ladder.clone();
                lines.push(format!(
                    "ccx {},{},{t};",
                    n(&controls[k - 1]),
                    self.anc(k - 3)
                ));
                lines.extend(ladder.into_iter().rev());
                lines
            }
        };
        self.flip_negatives(controls);
        for l in lines {
            let _ = writeln!(self.out, "{l}");
        }
        self.flip_negatives(controls);
    }
}

/// OpenQASM 2.0 text with one `qreg` per layout register plus `anc` for
/// multi-controlled X ladders. Negative controls are wrapped in `x` gates.
pub fn export_qasm(c: &Circuit) -> String {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let mut names = Vec::with_capacity(c.num_qubits());
    for r in c.layout().registers() {
        let name = qreg_name(&r.name);
        let _ = writeln!(out, "qreg {name}[{}];", r.len);
        names.extend((0..r.len).map(|i| format!("{name}[{i}]")));
    }
    let anc = ladder_ancillas(c);
    if anc > 0 {
        let _ = writeln!(out, "qreg anc[{anc}];");
    }
    let mut e = Emitter {
        names,
        anc,
        out: &mut out,
    };
    for g in c.gates() {
        match *g {
            Gate::H(q) => {
                let _ = writeln!(e.out, "h {};", e.names[q]);
            }
            Gate::Cx {
                ref controls,
                target,
            } => e.cx(controls, target),
            Gate::Swap(a, b) => {
                let _ = writeln!(e.out, "swap {},{};", e.names[a], e.names[b]);
            }
            Gate::CSwap { control, a, b } => {
                e.flip_negatives(&[control]);
                let _ = writeln!(
                    e.out,
                    "cswap {},{},{};",
                    e.names[control.qubit], e.names[a], e.names[b]
                );
                e.flip_negatives(&[control]);
            }
            Gate::Reset(q) => {
                let _ = writeln!(e.out, "reset {};", e.names[q]);
            }
        }
    }
    out
}

/// Number of QASM operations `export_qasm` emits for a circuit.
pub fn lowered_gate_count(c: &Circuit) -> usize {
    c.gates()
        .iter()
        .map(|g| {
            let neg = 2 * g.controls().iter().filter(|c| !c.on_one).count();
            neg + match g {
                Gate::Cx { controls, .. } if controls.len() > 2 => 2 * (controls.len() - 2) + 1,
                _ => 1,
            }
        })
        .sum()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct QasmSummary {
    pub qubits: usize,
    pub gates: usize,
    pub counts: BTreeMap<String, usize>,
}

fn arity(op: &str) -> Option<usize> {
    Some(match op {
        "x" | "h" | "reset" | "y" | "z" | "s" | "t" | "id" => 1,
        "cx" | "swap" | "CX" => 2,
        "ccx" | "cswap" => 3,
        _ => return None,
    })
}

/// Parses the gate subset used by [`export_qasm`], checking register bounds.
pub fn parse_qasm(text: &str) -> Result<QasmSummary, QasmError> {
    let mut regs: BTreeMap<String, usize> = BTreeMap::new();
    let mut summary = QasmSummary::default();
    let mut header = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |msg: String| QasmError::Syntax { line: line_no, msg };
        let line = raw.split("//").next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let stmt = line
            .strip_suffix(';')
            .ok_or_else(|| err(format!("missing semicolon: {line}")))?
            .trim();
        if !header {
            if stmt.split_whitespace().collect::<Vec<_>>() == ["OPENQASM", "2.0"] {
                header = true;
                continue;
            }
            return Err(QasmError::MissingHeader);
        }
        let (op, args) = stmt.split_once(char::is_whitespace).unwrap_or((stmt, ""));
        let args = args.trim();
        match op {
            "include" => continue,
            "qreg" => {
                let (name, len) =
                    parse_operand(args).ok_or_else(|| err(format!("bad qreg {args}")))?;
                if regs.insert(name.to_string(), len).is_some() {
                    return Err(err(format!("duplicate qreg {name}")));
                }
                summary.qubits += len;
            }
            _ => {
                let want = arity(op).ok_or_else(|| err(format!("unknown gate {op}")))?;
                let operands: Vec<_> = args.split(',').map(str::trim).collect();
                if operands.len() != want {
                    return Err(err(format!("{op} expects {want} operands")));
                }
                let mut seen = Vec::with_capacity(want);
                for o in operands {
                    let (name, idx) =
                        parse_operand(o).ok_or_else(|| err(format!("bad operand {o}")))?;
                    match regs.get(name) {
                        Some(&len) if idx < len => {}
                        _ => return Err(err(format!("operand {o} out of range"))),
                    }
                    if seen.contains(&(name, idx)) {
                        return Err(err(format!("repeated operand {o}")));
                    }
                    seen.push((name, idx));
                }
                summary.gates += 1;
                *summary.counts.entry(op.to_string()).or_insert(0) += 1;
            }
        }
    }
    if !header {
        return Err(QasmError::MissingHeader);
    }
    Ok(summary)
}

fn parse_operand(s: &str) -> Option<(&str, usize)> {
    let (name, rest) = s.split_once('[')?;
    let idx = rest.strip_suffix(']')?.trim().parse().ok()?;
    let name = name.trim();
    let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    valid.then_some((name, idx))
}
