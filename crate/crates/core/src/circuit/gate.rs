use std::fmt;
use std::ops::Deref;

use serde::Serialize;

use super::CircuitError;

/// Control limit per gate; enough for NEQR on 16x16 patches.
pub const MAX_CONTROLS: usize = 8;

/// A control qubit with polarity. `on_one == false` fires on `|0>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Control {
    pub qubit: usize,
    pub on_one: bool,
}

impl Control {
    pub fn pos(qubit: usize) -> Self {
        Self {
            qubit,
            on_one: true,
        }
    }

    pub fn neg(qubit: usize) -> Self {
        Self {
            qubit,
            on_one: false,
        }
    }

    /// Control that fires when the qubit equals `bit`.
    pub fn matching(qubit: usize, bit: bool) -> Self {
        Self { qubit, on_one: bit }
    }
}

/// Fixed-capacity control list so that [`Gate`] stays `Copy`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Controls {
    len: u8,
    items: [Control; MAX_CONTROLS],
}

impl Controls {
    pub fn new(controls: &[Control]) -> Result<Self, CircuitError> {
        if controls.len() > MAX_CONTROLS {
            return Err(CircuitError::TooManyControls(controls.len()));
        }
        let mut items = [Control::pos(0); MAX_CONTROLS];
        items[..controls.len()].copy_from_slice(controls);
        Ok(Self {
            len: controls.len() as u8,
            items,
        })
    }
}

impl Deref for Controls {
    type Target = [Control];

    fn deref(&self) -> &[Control] {
        &self.items[..self.len as usize]
    }
}

impl fmt::Debug for Controls {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum GateKind {
    X,
    H,
    Cnot,
    Toffoli,
    /// Multiply-controlled X with at least three controls.
    Mcx(usize),
    Swap,
    CSwap,
    Reset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    /// X on `target` when every control fires; no controls is a plain X.
    Cx {
        controls: Controls,
        target: usize,
    },
    Swap(usize, usize),
    CSwap {
        control: Control,
        a: usize,
        b: usize,
    },
    /// Forces the qubit to `|0>`.
    Reset(usize),
}

impl Gate {
    pub fn h(target: usize) -> Self {
        Gate::H(target)
    }

    pub fn x(target: usize) -> Self {
        Gate::Cx {
            controls: Controls::new(&[]).unwrap(),
            target,
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cx {
            controls: Controls::new(&[Control::pos(control)]).unwrap(),
            target,
        }
    }

    pub fn toffoli(c1: usize, c2: usize, target: usize) -> Self {
        Gate::Cx {
            controls: Controls::new(&[Control::pos(c1), Control::pos(c2)]).unwrap(),
            target,
        }
    }

    /// Controlled X with arbitrary polarities.
    pub fn cx(controls: &[Control], target: usize) -> Result<Self, CircuitError> {
        Ok(Gate::Cx {
            controls: Controls::new(controls)?,
            target,
        })
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Gate::Swap(a, b)
    }

    pub fn cswap(control: Control, a: usize, b: usize) -> Self {
        Gate::CSwap { control, a, b }
    }

    pub fn reset(target: usize) -> Self {
        Gate::Reset(target)
    }

    pub fn kind(&self) -> GateKind {
        match self {
            Gate::H(_) => GateKind::H,
            Gate::Cx { controls, .. } => match controls.len() {
                0 => GateKind::X,
                1 => GateKind::Cnot,
                2 => GateKind::Toffoli,
                k => GateKind::Mcx(k),
            },
            Gate::Swap(..) => GateKind::Swap,
            Gate::CSwap { .. } => GateKind::CSwap,
            Gate::Reset(_) => GateKind::Reset,
        }
    }

    /// Controls of the gate (empty for uncontrolled gates).
    pub fn controls(&self) -> &[Control] {
        match self {
            Gate::Cx { controls, .. } => controls,
            Gate::CSwap { control, .. } => std::slice::from_ref(control),
            _ => &[],
        }
    }

    pub fn has_negative_control(&self) -> bool {
        self.controls().iter().any(|c| !c.on_one)
    }

    /// Every qubit the gate touches, controls first.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        let targets: [Option<usize>; 2] = match *self {
            Gate::H(t) | Gate::Reset(t) | Gate::Cx { target: t, .. } => [Some(t), None],
            Gate::Swap(a, b) | Gate::CSwap { a, b, .. } => [Some(a), Some(b)],
        };
        self.controls()
            .iter()
            .map(|c| c.qubit)
            .chain(targets.into_iter().flatten())
    }

    /// Checks index bounds and operand distinctness.
    pub fn validate(&self, num_qubits: usize) -> Result<(), CircuitError> {
        let mut seen = [usize::MAX; MAX_CONTROLS + 2];
        for (i, q) in self.qubits().enumerate() {
            if q >= num_qubits {
                return Err(CircuitError::QubitOutOfRange {
                    qubit: q,
                    num_qubits,
                });
            }
            if seen[..i].contains(&q) {
                return Err(CircuitError::OperandOverlap(q));
            }
            seen[i] = q;
        }
        Ok(())
    }

    /// True for gates that permute computational basis states.
    pub fn is_permutation(&self) -> bool {
        !matches!(self, Gate::H(_) | Gate::Reset(_))
    }

    /// Image of a single basis state under the gate.
    pub fn apply_to_bits(&self, bits: &mut [bool]) -> Result<(), CircuitError> {
        let fires = |c: &Control| bits[c.qubit] == c.on_one;
        match *self {
            Gate::H(q) => return Err(CircuitError::NotPermutation(q)),
            Gate::Cx {
                ref controls,
                target,
            } => {
                if controls.iter().all(fires) {
                    bits[target] = !bits[target];
                }
            }
            Gate::Swap(a, b) => bits.swap(a, b),
            Gate::CSwap { control, a, b } => {
                if fires(&control) {
                    bits.swap(a, b);
                }
            }
            Gate::Reset(q) => bits[q] = false,
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ctl = |c: &Control| format!("{}{}", if c.on_one { "" } else { "!" }, c.qubit);
        match self {
            Gate::H(q) => write!(f, "h {q}"),
            Gate::Cx { controls, target } => {
                let cs: Vec<_> = controls.iter().map(ctl).collect();
                write!(f, "x [{}] -> {target}", cs.join(","))
            }
            Gate::Swap(a, b) => write!(f, "swap {a} {b}"),
            Gate::CSwap { control, a, b } => write!(f, "cswap [{}] {a} {b}", ctl(control)),
            Gate::Reset(q) => write!(f, "reset {q}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(v: &[u8]) -> Vec<bool> {
        v.iter().map(|&b| b == 1).collect()
    }

    #[test]
    fn kinds() {
        assert_eq!(Gate::x(0).kind(), GateKind::X);
        assert_eq!(Gate::cnot(0, 1).kind(), GateKind::Cnot);
        assert_eq!(Gate::toffoli(0, 1, 2).kind(), GateKind::Toffoli);
        let g = Gate::cx(&[Control::pos(0), Control::neg(1), Control::pos(2)], 3).unwrap();
        assert_eq!(g.kind(), GateKind::Mcx(3));
        assert!(g.has_negative_control());
        assert!(Gate::cx(&[Control::pos(0); 9], 10).is_err());
    }

    #[test]
    fn validation() {
        assert!(matches!(
            Gate::cnot(0, 0).validate(2),
            Err(CircuitError::OperandOverlap(0))
        ));
        assert!(matches!(
            Gate::toffoli(0, 1, 5).validate(3),
            Err(CircuitError::QubitOutOfRange { qubit: 5, .. })
        ));
        assert!(Gate::cswap(Control::pos(0), 1, 1).validate(2).is_err());
        assert!(Gate::swap(0, 1).validate(2).is_ok());
    }

    #[test]
    fn truth_tables() {
        let mut b = bits(&[1, 1, 0]);
        Gate::toffoli(0, 1, 2).apply_to_bits(&mut b).unwrap();
        assert_eq!(b, bits(&[1, 1, 1]));

        // control off, registers a = 5 (bits 1..4), b = 3 (bits 4..7)
        let mut b = bits(&[0, 1, 0, 1, 1, 1, 0]);
        let before = b.clone();
        for i in 0..3 {
            Gate::cswap(Control::pos(0), 1 + i, 4 + i)
                .apply_to_bits(&mut b)
                .unwrap();
        }
        assert_eq!(b, before);

        let mut b = bits(&[1, 0, 1, 0]);
        Gate::cx(&[Control::pos(0), Control::pos(1), Control::pos(2)], 3)
            .unwrap()
            .apply_to_bits(&mut b)
            .unwrap();
        assert!(!b[3]);

        let mut b = bits(&[0, 0]);
        Gate::cx(&[Control::neg(0)], 1)
            .unwrap()
            .apply_to_bits(&mut b)
            .unwrap();
        assert_eq!(b, bits(&[0, 1]));

        let mut b = bits(&[1]);
        Gate::reset(0).apply_to_bits(&mut b).unwrap();
        assert_eq!(b, bits(&[0]));
        assert!(Gate::h(0).apply_to_bits(&mut b).is_err());
    }
}
