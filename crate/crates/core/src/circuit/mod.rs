//! Gate-level circuit representation shared by the builders, simulators,
//! depth analysis and QASM export.
//!
//! Qubits are plain indices. Registers are contiguous little-endian ranges
//! (register-local bit 0 is the least significant bit) laid out in insertion
//! order. Gates are grouped into a tree of tagged spans; the top-level spans
//! partition the gate list.

mod builder;
pub mod depth;
mod gate;
pub mod qasm;

use std::ops::Range;

use serde::Serialize;
use thiserror::Error;

pub use builder::CircuitBuilder;
pub use gate::{Control, Controls, Gate, GateKind, MAX_CONTROLS};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("qubit {qubit} out of range for {num_qubits} qubits")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("qubit {0} used twice in one gate")]
    OperandOverlap(usize),
    #[error("{0} controls exceed the per-gate limit")]
    TooManyControls(usize),
    #[error("Hadamard on qubit {0} is not a basis permutation")]
    NotPermutation(usize),
    #[error("circuit contains a reset at gate {0} and cannot be mirrored")]
    NotInvertible(usize),
    #[error("span stack is unbalanced")]
    UnbalancedSpans,
    #[error("duplicate register name {0}")]
    DuplicateRegister(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RegisterRole {
    Color,
    Working,
    CoordX,
    CoordY,
    Value,
    Constant,
    Ancilla,
}

/// Handle to a contiguous qubit range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Reg {
    pub start: usize,
    pub len: usize,
}

impl Reg {
    pub fn new(start: usize, len: usize) -> Self {
        Self { start, len }
    }

    /// Qubit holding bit `i` (0 = least significant).
    #[inline]
    pub fn qubit(&self, i: usize) -> usize {
        debug_assert!(i < self.len);
        self.start + i
    }

    pub fn qubits(&self) -> Range<usize> {
        self.start..self.start + self.len
    }

    pub fn end(&self) -> usize {
        self.start + self.len
    }

    /// Little-endian value of the register in a basis state.
    pub fn read(&self, bits: &[bool]) -> u64 {
        self.qubits()
            .enumerate()
            .fold(0, |acc, (i, q)| acc | ((bits[q] as u64) << i))
    }

    pub fn write(&self, bits: &mut [bool], value: u64) {
        for (i, q) in self.qubits().enumerate() {
            bits[q] = (value >> i) & 1 == 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Register {
    pub name: String,
    pub role: RegisterRole,
    pub start: usize,
    pub len: usize,
}

impl Register {
    pub fn reg(&self) -> Reg {
        Reg::new(self.start, self.len)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RegisterLayout {
    registers: Vec<Register>,
}

impl RegisterLayout {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(
        &mut self,
        name: impl Into<String>,
        role: RegisterRole,
        len: usize,
    ) -> Result<Reg, CircuitError> {
        let name = name.into();
        if self.registers.iter().any(|r| r.name == name) {
            return Err(CircuitError::DuplicateRegister(name));
        }
        let start = self.total_qubits();
        self.registers.push(Register {
            name,
            role,
            start,
            len,
        });
        Ok(Reg::new(start, len))
    }

    pub fn get(&self, name: &str) -> Option<Reg> {
        self.registers
            .iter()
            .find(|r| r.name == name)
            .map(Register::reg)
    }

    /// First register with the given role.
    pub fn find_role(&self, role: RegisterRole) -> Option<Reg> {
        self.registers
            .iter()
            .find(|r| r.role == role)
            .map(Register::reg)
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn total_qubits(&self) -> usize {
        self.registers.last().map_or(0, |r| r.start + r.len)
    }

    pub fn coord_x(&self) -> Option<Reg> {
        self.find_role(RegisterRole::CoordX)
    }

    pub fn coord_y(&self) -> Option<Reg> {
        self.find_role(RegisterRole::CoordY)
    }

    /// Register owning `qubit`.
    pub fn register_of(&self, qubit: usize) -> Option<&Register> {
        self.registers
            .iter()
            .find(|r| (r.start..r.start + r.len).contains(&qubit))
    }

    /// Single color register plus `X`/`Y` coordinates, as used by a bare NEQR encoding.
    pub fn neqr(bit_depth: usize, coord_bits: usize) -> (Self, Reg) {
        let mut l = Self::new();
        let c = l.add("c", RegisterRole::Working, bit_depth).unwrap();
        l.add("x", RegisterRole::CoordX, coord_bits).unwrap();
        l.add("y", RegisterRole::CoordY, coord_bits).unwrap();
        (l, c)
    }
}

/// Labels for circuit spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ModuleTag {
    Neqr,
    Cs,
    Swap,
    Add,
    Sub,
    Set,
    Copy,
    Comp,
    Cswap,
    Swpr,
    Sort,
    Mf,
    Np,
    Pc,
    /// Gates appended without a module.
    Raw,
}

impl ModuleTag {
    pub fn name(&self) -> &'static str {
        match self {
            ModuleTag::Neqr => "NEQR",
            ModuleTag::Cs => "CS",
            ModuleTag::Swap => "SWAP",
            ModuleTag::Add => "ADD",
            ModuleTag::Sub => "SUB",
            ModuleTag::Set => "SET",
            ModuleTag::Copy => "COPY",
            ModuleTag::Comp => "COMP",
            ModuleTag::Cswap => "CSWAP",
            ModuleTag::Swpr => "SWPR",
            ModuleTag::Sort => "SORT",
            ModuleTag::Mf => "MF",
            ModuleTag::Np => "NP",
            ModuleTag::Pc => "PC",
            ModuleTag::Raw => "RAW",
        }
    }
}

/// A tagged, contiguous gate range with nested sub-spans.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Span {
    pub tag: ModuleTag,
    pub range: Range<usize>,
    pub children: Vec<Span>,
}

impl Span {
    fn shifted(&self, offset: usize) -> Span {
        Span {
            tag: self.tag,
            range: self.range.start + offset..self.range.end + offset,
            children: self.children.iter().map(|c| c.shifted(offset)).collect(),
        }
    }

    fn mirrored(&self, len: usize) -> Span {
        Span {
            tag: self.tag,
            range: len - self.range.end..len - self.range.start,
            children: self
                .children
                .iter()
                .rev()
                .map(|c| c.mirrored(len))
                .collect(),
        }
    }

    /// Visits this span and all descendants, depth first.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Span)) {
        f(self);
        for c in &self.children {
            c.walk(f);
        }
    }
}

/// An ordered gate list over a register layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    layout: RegisterLayout,
    gates: Vec<Gate>,
    spans: Vec<Span>,
    bit_depth: usize,
    coord_bits: usize,
}

impl Circuit {
    pub fn new(layout: RegisterLayout) -> Self {
        Self {
            layout,
            gates: Vec::new(),
            spans: Vec::new(),
            bit_depth: 0,
            coord_bits: 0,
        }
    }

    /// Records the color bit depth `q` and per-axis coordinate width `n`
    /// used by the closed-form depth model.
    pub fn with_params(mut self, bit_depth: usize, coord_bits: usize) -> Self {
        self.bit_depth = bit_depth;
        self.coord_bits = coord_bits;
        self
    }

    pub(crate) fn from_parts(
        layout: RegisterLayout,
        gates: Vec<Gate>,
        spans: Vec<Span>,
        bit_depth: usize,
        coord_bits: usize,
    ) -> Self {
        Self {
            layout,
            gates,
            spans,
            bit_depth,
            coord_bits,
        }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Top-level spans, which partition the gate list.
    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    pub fn num_qubits(&self) -> usize {
        self.layout.total_qubits()
    }

    pub fn bit_depth(&self) -> usize {
        self.bit_depth
    }

    pub fn coord_bits(&self) -> usize {
        self.coord_bits
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Appends a single gate under a trailing `RAW` span.
    pub fn append(&mut self, gate: Gate) -> Result<(), CircuitError> {
        gate.validate(self.num_qubits())?;
        let at = self.gates.len();
        self.gates.push(gate);
        match self.spans.last_mut() {
            Some(s) if s.tag == ModuleTag::Raw && s.range.end == at => s.range.end += 1,
            _ => self.spans.push(Span {
                tag: ModuleTag::Raw,
                range: at..at + 1,
                children: Vec::new(),
            }),
        }
        Ok(())
    }

    /// Appends every gate of `sub` inside a new span labelled `tag`.
    pub fn compose(&mut self, sub: &Circuit, tag: ModuleTag) -> Result<(), CircuitError> {
        let n = self.num_qubits();
        for g in &sub.gates {
            g.validate(n)?;
        }
        let offset = self.gates.len();
        self.gates.extend_from_slice(&sub.gates);
        self.spans.push(Span {
            tag,
            range: offset..self.gates.len(),
            children: sub.spans.iter().map(|s| s.shifted(offset)).collect(),
        });
        Ok(())
    }

    /// Appends `sub`'s top-level spans as they are.
    pub fn extend(&mut self, sub: &Circuit) -> Result<(), CircuitError> {
        let n = self.num_qubits();
        for g in &sub.gates {
            g.validate(n)?;
        }
        let offset = self.gates.len();
        self.gates.extend_from_slice(&sub.gates);
        self.spans
            .extend(sub.spans.iter().map(|s| s.shifted(offset)));
        Ok(())
    }

    /// Gates in reverse order. Every non-reset gate here is self-inverse,
    /// so the mirror is the inverse circuit.
    pub fn mirror(&self) -> Result<Circuit, CircuitError> {
        if let Some(i) = self.gates.iter().position(|g| matches!(g, Gate::Reset(_))) {
            return Err(CircuitError::NotInvertible(i));
        }
        let len = self.gates.len();
        Ok(Circuit {
            layout: self.layout.clone(),
            gates: self.gates.iter().rev().copied().collect(),
            spans: self.spans.iter().rev().map(|s| s.mirrored(len)).collect(),
            bit_depth: self.bit_depth,
            coord_bits: self.coord_bits,
        })
    }

    /// Gate ranges of every span labelled `tag`, in order.
    pub fn instances(&self, tag: ModuleTag) -> Vec<Range<usize>> {
        let mut out = Vec::new();
        for s in &self.spans {
            s.walk(&mut |s| {
                if s.tag == tag {
                    out.push(s.range.clone());
                }
            });
        }
        out
    }

    /// Sequence of top-level tags.
    pub fn top_tags(&self) -> Vec<ModuleTag> {
        self.spans.iter().map(|s| s.tag).collect()
    }

    /// Applies the circuit to one basis state.
    pub fn apply_to_bits(&self, bits: &mut [bool]) -> Result<(), CircuitError> {
        for g in &self.gates {
            g.apply_to_bits(bits)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout(n: usize) -> RegisterLayout {
        let mut l = RegisterLayout::new();
        l.add("a", RegisterRole::Value, n).unwrap();
        l
    }

    #[test]
    fn compose_empty() {
        let mut c = Circuit::new(layout(2));
        c.compose(&Circuit::new(layout(2)), ModuleTag::Np).unwrap();
        assert!(c.is_empty());
        assert_eq!(c.spans().len(), 1);
    }

    #[test]
    fn append_rejects_overlap() {
        let mut c = Circuit::new(layout(2));
        assert_eq!(
            c.append(Gate::cnot(0, 0)),
            Err(CircuitError::OperandOverlap(0))
        );
        assert!(matches!(
            c.append(Gate::x(2)),
            Err(CircuitError::QubitOutOfRange { .. })
        ));
        c.append(Gate::x(1)).unwrap();
        c.append(Gate::cnot(1, 0)).unwrap();
        assert_eq!(c.spans().len(), 1);
        assert_eq!(c.spans()[0].range, 0..2);
    }

    #[test]
    fn compose_concatenates_in_order() {
        let mk = |g: Gate| {
            let mut c = Circuit::new(layout(3));
            c.append(g).unwrap();
            c
        };
        let (np, pc, mf) = (
            mk(Gate::x(0)),
            mk(Gate::cnot(0, 1)),
            mk(Gate::toffoli(0, 1, 2)),
        );
        let mut c = Circuit::new(layout(3));
        c.compose(&np, ModuleTag::Np).unwrap();
        c.compose(&pc, ModuleTag::Pc).unwrap();
        c.compose(&mf, ModuleTag::Mf).unwrap();
        assert_eq!(
            c.gates(),
            &[Gate::x(0), Gate::cnot(0, 1), Gate::toffoli(0, 1, 2)]
        );
        assert_eq!(
            c.top_tags(),
            vec![ModuleTag::Np, ModuleTag::Pc, ModuleTag::Mf]
        );
        assert_eq!(c.instances(ModuleTag::Raw), vec![0..1, 1..2, 2..3]);
    }

    #[test]
    fn compose_checks_bounds() {
        let mut big = Circuit::new(layout(4));
        big.append(Gate::x(3)).unwrap();
        let mut small = Circuit::new(layout(2));
        assert!(small.compose(&big, ModuleTag::Np).is_err());
    }

    #[test]
    fn mirror_inverts() {
        let mut c = Circuit::new(layout(3));
        c.append(Gate::x(0)).unwrap();
        c.append(Gate::toffoli(0, 1, 2)).unwrap();
        c.append(Gate::cnot(2, 1)).unwrap();
        let mut both = c.clone();
        both.extend(&c.mirror().unwrap()).unwrap();
        for v in 0..8u64 {
            let mut bits = vec![false; 3];
            Reg::new(0, 3).write(&mut bits, v);
            both.apply_to_bits(&mut bits).unwrap();
            assert_eq!(Reg::new(0, 3).read(&bits), v);
        }
        c.append(Gate::reset(0)).unwrap();
        assert!(c.mirror().is_err());
    }

    #[test]
    fn duplicate_register_rejected() {
        let mut l = layout(1);
        assert!(l.add("a", RegisterRole::Value, 1).is_err());
    }
}
