use serde::Serialize;

use crate::circuit::{Circuit, CircuitBuilder, Control, Gate, ModuleTag, Reg, RegisterLayout};

use super::ModuleError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    Plus,
    Minus,
}

/// Modular increment (`Plus`) or decrement (`Minus`) of `reg`.
pub fn cycle_shift(b: &mut CircuitBuilder, reg: Reg, dir: Direction) -> Result<(), ModuleError> {
    if reg.len == 0 {
        return Err(ModuleError::EmptyRegister);
    }
    let mut gates = Vec::with_capacity(reg.len);
    for i in (1..reg.len).rev() {
        let controls: Vec<_> = (0..i).map(|j| Control::pos(reg.qubit(j))).collect();
        gates.push(Gate::cx(&controls, reg.qubit(i))?);
    }
    gates.push(Gate::x(reg.qubit(0)));
    if dir == Direction::Minus {
        gates.reverse();
    }
    b.scoped(ModuleTag::Cs, |b| {
        for g in gates {
            b.push(g)?;
        }
        Ok(())
    })
}

pub fn build_cycle_shift(
    layout: &RegisterLayout,
    axis: Axis,
    dir: Direction,
) -> Result<Circuit, ModuleError> {
    let reg = match axis {
        Axis::X => layout.coord_x(),
        Axis::Y => layout.coord_y(),
    }
    .ok_or(ModuleError::EmptyRegister)?;
    let mut b = CircuitBuilder::new(layout.clone(), 0, reg.len);
    cycle_shift(&mut b, reg, dir)?;
    Ok(b.finish()?)
}
