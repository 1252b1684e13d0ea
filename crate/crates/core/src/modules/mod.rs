//! Builders for the QTV sub-circuits.
//!
//! Every builder comes in two flavours: a function that appends a tagged span
//! to a [`CircuitBuilder`] (used when assembling larger circuits) and a
//! `build_*` wrapper returning a standalone [`Circuit`] over a given layout.

mod arith;
mod compare;
mod neqr;
mod qtv;
mod shift;

use thiserror::Error;

use crate::circuit::{CircuitError, Reg};
use crate::image::ImageError;

pub use arith::{adder, build_adder, build_setter, build_subtractor, copy, setter, subtractor};
pub use compare::{
    build_comparator, build_median9, build_sort3, build_swapper, comparator, median9, sort3,
    swapper,
};
pub use neqr::{build_neqr, neqr};
pub use qtv::{
    build_neighborhood_prep, build_pvalues, build_qtv, build_qtv_with, neighborhood_prep, pvalues,
    QtvCircuit, QtvLayout, QtvTemplate,
};
pub use shift::{build_cycle_shift, cycle_shift, Axis, Direction};

#[derive(Debug, Error)]
pub enum ModuleError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error("patch must be {side}x{side}, got {width}x{height}")]
    PatchSize {
        side: usize,
        width: usize,
        height: usize,
    },
    #[error("pixel value {value} does not fit in {bits} bits")]
    ValueOutOfRange { value: u64, bits: usize },
    #[error("constant {constant} does not fit in {bits} bits")]
    ConstantOutOfRange { constant: u64, bits: usize },
    #[error("registers must have equal width, got {0} and {1}")]
    WidthMismatch(usize, usize),
    #[error("register has no qubits")]
    EmptyRegister,
    #[error("lambda must be positive and finite, got {0}")]
    Lambda(f64),
}

pub(crate) fn same_width(a: Reg, b: Reg) -> Result<usize, ModuleError> {
    if a.len != b.len {
        return Err(ModuleError::WidthMismatch(a.len, b.len));
    }
    if a.len == 0 {
        return Err(ModuleError::EmptyRegister);
    }
    Ok(a.len)
}

#[cfg(test)]
pub(crate) mod testutil {
    use crate::circuit::{Circuit, Reg};

    /// Runs a permutation circuit on one basis state given as register values.
    pub fn run(c: &Circuit, inputs: &[(Reg, u64)]) -> Vec<bool> {
        let mut bits = vec![false; c.num_qubits()];
        for &(r, v) in inputs {
            r.write(&mut bits, v);
        }
        c.apply_to_bits(&mut bits).unwrap();
        bits
    }
}
