use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate, Reg};

use super::SimError;

pub const DEFAULT_QUBIT_CAP: usize = 20;

const ZERO_TOL: f64 = 1e-12;

/// Dense amplitude vector; qubit `i` is bit `i` of the basis index.
#[derive(Debug, Clone)]
pub struct Statevector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    pub fn new(num_qubits: usize, cap: usize) -> Result<Self, SimError> {
        if num_qubits > cap {
            return Err(SimError::QubitCap {
                qubits: num_qubits,
                cap,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Basis indices with nonzero amplitude, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.amps.len())
            .filter(|&i| self.amps[i].norm() > ZERO_TOL)
            .collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Value of `reg` in basis state `index`.
    pub fn register_value(index: usize, reg: Reg) -> u64 {
        ((index >> reg.start) as u64) & ((1u64 << reg.len) - 1)
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<(), SimError> {
        match *g {
            Gate::H(q) => {
                let m = 1 << q;
                for i in 0..self.amps.len() {
                    if i & m == 0 {
                        let (a, b) = (self.amps[i], self.amps[i | m]);
                        self.amps[i] = (a + b) * FRAC_1_SQRT_2;
                        self.amps[i | m] = (a - b) * FRAC_1_SQRT_2;
                    }
                }
            }
            Gate::Reset(q) => {
                // A reset of a bit that is determined within every branch keeps the
                // state pure: each amplitude moves to its bit-0 partner. Anything else
                // would need a mixed state and is reported.
                let m = 1 << q;
                for i in 0..self.amps.len() {
                    if i & m != 0 && self.amps[i].norm() > ZERO_TOL {
                        if self.amps[i ^ m].norm() > ZERO_TOL {
                            return Err(SimError::ResetInSuperposition(q));
                        }
                        self.amps[i ^ m] = self.amps[i];
                        self.amps[i] = Complex64::new(0.0, 0.0);
                    }
                }
            }
            _ => {
                let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
                for (i, a) in self.amps.iter().enumerate() {
                    if a.norm() > ZERO_TOL {
                        out[permute_index(g, i)] += a;
                    }
                }
                self.amps = out;
            }
        }
        Ok(())
    }
}

fn permute_index(g: &Gate, i: usize) -> usize {
    let bit = |q: usize| (i >> q) & 1 == 1;
    let fires = |c: &crate::circuit::Control| bit(c.qubit) == c.on_one;
    let swapped = |a: usize, b: usize| {
        if bit(a) != bit(b) {
            i ^ (1 << a) ^ (1 << b)
        } else {
            i
        }
    };
    match *g {
        Gate::Cx {
            ref controls,
            target,
        } if controls.iter().all(fires) => i ^ (1 << target),
        Gate::Swap(a, b) => swapped(a, b),
        Gate::CSwap { control, a, b } if fires(&control) => swapped(a, b),
        _ => i,
    }
}

pub fn run_statevector(c: &Circuit) -> Result<Statevector, SimError> {
    run_statevector_with_cap(c, DEFAULT_QUBIT_CAP)
}

pub fn run_statevector_with_cap(c: &Circuit, cap: usize) -> Result<Statevector, SimError> {
    let mut s = Statevector::new(c.num_qubits(), cap)?;
    for g in c.gates() {
        s.apply_gate(g)?;
    }
    Ok(s)
}
