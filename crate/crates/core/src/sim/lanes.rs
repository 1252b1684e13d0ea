use crate::circuit::{Circuit, Gate, Reg};

use super::SimError;

/// Bit-sliced basis states: each qubit is a row of `u64` words with one bit per lane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaneState {
    num_qubits: usize,
    lanes: usize,
    words: usize,
    data: Vec<u64>,
}

impl LaneState {
    /// All lanes start in `|0...0>`.
    pub fn new(num_qubits: usize, lanes: usize) -> Self {
        let words = lanes.div_ceil(64).max(1);
        Self {
            num_qubits,
            lanes,
            words,
            data: vec![0; num_qubits * words],
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn lanes(&self) -> usize {
        self.lanes
    }

    #[inline]
    fn row(&self, q: usize) -> &[u64] {
        &self.data[q * self.words..(q + 1) * self.words]
    }

    pub fn bit(&self, lane: usize, q: usize) -> bool {
        (self.row(q)[lane / 64] >> (lane % 64)) & 1 == 1
    }

    pub fn set_bit(&mut self, lane: usize, q: usize, v: bool) {
        let w = &mut self.data[q * self.words + lane / 64];
        let m = 1u64 << (lane % 64);
        if v {
            *w |= m;
        } else {
            *w &= !m;
        }
    }

    pub fn read(&self, lane: usize, reg: Reg) -> u64 {
        reg.qubits()
            .enumerate()
            .fold(0, |acc, (i, q)| acc | ((self.bit(lane, q) as u64) << i))
    }

    pub fn write(&mut self, lane: usize, reg: Reg, value: u64) {
        for (i, q) in reg.qubits().enumerate() {
            self.set_bit(lane, q, (value >> i) & 1 == 1);
        }
    }

    /// Full basis state of one lane.
    pub fn lane_bits(&self, lane: usize) -> Vec<bool> {
        (0..self.num_qubits).map(|q| self.bit(lane, q)).collect()
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<(), SimError> {
        let w = self.words;
        match *g {
            Gate::H(q) => return Err(SimError::UnexpectedHadamard(q)),
            Gate::Cx {
                ref controls,
                target,
            } => {
                for k in 0..w {
                    let mut m = !0u64;
                    for c in controls.iter() {
                        let v = self.data[c.qubit * w + k];
                        m &= if c.on_one { v } else { !v };
                    }
                    self.data[target * w + k] ^= m;
                }
            }
            Gate::Swap(a, b) => {
                for k in 0..w {
                    self.data.swap(a * w + k, b * w + k);
                }
            }
            Gate::CSwap { control, a, b } => {
                for k in 0..w {
                    let c = self.data[control.qubit * w + k];
                    let c = if control.on_one { c } else { !c };
                    let m = c & (self.data[a * w + k] ^ self.data[b * w + k]);
                    self.data[a * w + k] ^= m;
                    self.data[b * w + k] ^= m;
                }
            }
            Gate::Reset(q) => self.data[q * w..(q + 1) * w].fill(0),
        }
        Ok(())
    }

    /// Applies every gate of a permutation circuit.
    pub fn apply(&mut self, c: &Circuit) -> Result<(), SimError> {
        if c.num_qubits() > self.num_qubits {
            return Err(SimError::QubitCount {
                circuit: c.num_qubits(),
                state: self.num_qubits,
            });
        }
        for g in c.gates() {
            self.apply_gate(g)?;
        }
        Ok(())
    }
}

/// Evaluates a permutation circuit on many register assignments at once.
/// Each input lists `(register, value)` pairs; unlisted qubits start at 0.
pub fn run_truth_table(c: &Circuit, inputs: &[Vec<(Reg, u64)>]) -> Result<LaneState, SimError> {
    let mut s = LaneState::new(c.num_qubits(), inputs.len());
    for (lane, assign) in inputs.iter().enumerate() {
        for &(r, v) in assign {
            s.write(lane, r, v);
        }
    }
    s.apply(c)?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Control, RegisterLayout, RegisterRole};

    fn circuit(gates: &[Gate]) -> Circuit {
        let mut l = RegisterLayout::new();
        l.add("a", RegisterRole::Value, 4).unwrap();
        let mut c = Circuit::new(l);
        for g in gates {
            c.append(*g).unwrap();
        }
        c
    }

    #[test]
    fn agrees_with_scalar_evaluation() {
        let c = circuit(&[
            Gate::cx(&[Control::neg(0), Control::pos(1)], 2).unwrap(),
            Gate::cswap(Control::neg(3), 0, 1),
            Gate::swap(2, 3),
            Gate::toffoli(0, 3, 1),
            Gate::reset(2),
        ]);
        let reg = Reg::new(0, 4);
        let inputs: Vec<_> = (0..16).map(|v| vec![(reg, v)]).collect();
        let s = run_truth_table(&c, &inputs).unwrap();
        for v in 0..16u64 {
            let mut bits = vec![false; 4];
            reg.write(&mut bits, v);
            c.apply_to_bits(&mut bits).unwrap();
            assert_eq!(s.lane_bits(v as usize), bits);
        }
    }

    #[test]
    fn many_words() {
        let c = circuit(&[Gate::cnot(0, 1)]);
        let reg = Reg::new(0, 1);
        let inputs: Vec<_> = (0..200).map(|i| vec![(reg, (i % 3 == 0) as u64)]).collect();
        let s = run_truth_table(&c, &inputs).unwrap();
        for i in 0..200 {
            assert_eq!(s.bit(i, 1), i % 3 == 0);
        }
    }

    #[test]
    fn hadamard_rejected() {
        let c = circuit(&[Gate::h(0)]);
        assert!(run_truth_table(&c, &[vec![]]).is_err());
    }
}
