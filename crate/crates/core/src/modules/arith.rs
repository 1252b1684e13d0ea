use crate::circuit::{Circuit, CircuitBuilder, Control, Gate, ModuleTag, Reg, RegisterLayout};

use super::{same_width, ModuleError};

/// X gates on the set bits of `constant`.
pub fn setter(b: &mut CircuitBuilder, constant: u64, target: Reg) -> Result<(), ModuleError> {
    if target.len < 64 && constant >> target.len != 0 {
        return Err(ModuleError::ConstantOutOfRange {
            constant,
            bits: target.len,
        });
    }
    b.scoped(ModuleTag::Set, |b| {
        for i in 0..target.len {
            if (constant >> i) & 1 == 1 {
                b.push(Gate::x(target.qubit(i)))?;
            }
        }
        Ok(())
    })
}

/// Bitwise CNOT copy of `src` into a `|0>` register.
pub fn copy(b: &mut CircuitBuilder, src: Reg, dst: Reg) -> Result<(), ModuleError> {
    same_width(src, dst)?;
    b.scoped(ModuleTag::Copy, |b| {
        for i in 0..src.len {
            b.push(Gate::cnot(src.qubit(i), dst.qubit(i)))?;
        }
        Ok(())
    })
}

fn carry_stage(
    b: &mut CircuitBuilder,
    a: Reg,
    x: Reg,
    c: Reg,
    i: usize,
) -> Result<(), ModuleError> {
    b.push(Gate::toffoli(a.qubit(i), x.qubit(i), c.qubit(i + 1)))?;
    if i > 0 {
        b.push(Gate::toffoli(a.qubit(i), c.qubit(i), c.qubit(i + 1)))?;
        b.push(Gate::toffoli(x.qubit(i), c.qubit(i), c.qubit(i + 1)))?;
    }
    Ok(())
}

/// Saturating addition `out = min(a + x, 2^q - 1)` into a `|0>` register.
/// `a` and `x` are left unchanged.
///
/// A ripple chain writes the sum bits into `out` and the carries into a
/// `q + 1` qubit scratch register `c` (`c[i+1]` is the majority of `a[i]`,
/// `x[i]`, `c[i]`). A set final carry then forces every bit of `out` to one.
pub fn adder(b: &mut CircuitBuilder, a: Reg, x: Reg, out: Reg) -> Result<(), ModuleError> {
    let q = same_width(a, x)?;
    same_width(a, out)?;
    b.scoped(ModuleTag::Add, |b| {
        let c = b.acquire("carry", q + 1);
        for i in 0..q {
            b.push(Gate::cnot(a.qubit(i), out.qubit(i)))?;
            b.push(Gate::cnot(x.qubit(i), out.qubit(i)))?;
            if i > 0 {
                b.push(Gate::cnot(c.qubit(i), out.qubit(i)))?;
            }
            carry_stage(b, a, x, c, i)?;
        }
        let overflow = c.qubit(q);
        if b.reset_enabled() {
            for i in 1..q {
                b.push(Gate::reset(c.qubit(i)))?;
            }
            for i in 0..q {
                b.push(Gate::cx(
                    &[Control::pos(overflow), Control::neg(out.qubit(i))],
                    c.qubit(i),
                )?)?;
                b.push(Gate::cnot(c.qubit(i), out.qubit(i)))?;
            }
            for i in 0..=q {
                b.push(Gate::reset(c.qubit(i)))?;
            }
            b.release("carry", c);
        } else {
            for i in (0..q - 1).rev() {
                carry_stage(b, a, x, c, i)?;
            }
            // The fix-up bits record which sum bits were forced and stay dirty.
            let fix = b.acquire("satfix", q);
            for i in 0..q {
                b.push(Gate::cx(
                    &[Control::pos(overflow), Control::neg(out.qubit(i))],
                    fix.qubit(i),
                )?)?;
                b.push(Gate::cnot(fix.qubit(i), out.qubit(i)))?;
            }
            // Recomputing the chain toggles the overflow bit back to zero.
            for i in 0..q {
                carry_stage(b, a, x, c, i)?;
            }
            for i in (0..q - 1).rev() {
                carry_stage(b, a, x, c, i)?;
            }
            b.release("carry", c);
        }
        Ok(())
    })
}

/// Saturating subtraction `out = max(a - x, 0)` into a `|0>` register, as the
/// complement of `(not a) + x`.
pub fn subtractor(b: &mut CircuitBuilder, a: Reg, x: Reg, out: Reg) -> Result<(), ModuleError> {
    same_width(a, x)?;
    same_width(a, out)?;
    b.scoped(ModuleTag::Sub, |b| {
        for q in a.qubits() {
            b.push(Gate::x(q))?;
        }
        adder(b, a, x, out)?;
        for q in out.qubits().chain(a.qubits()) {
            b.push(Gate::x(q))?;
        }
        Ok(())
    })
}

fn standalone(
    layout: &RegisterLayout,
    q: usize,
    with_reset: bool,
    f: impl FnOnce(&mut CircuitBuilder) -> Result<(), ModuleError>,
) -> Result<Circuit, ModuleError> {
    let n = layout.coord_x().map_or(0, |r| r.len);
    let mut b = CircuitBuilder::new(layout.clone(), q, n).with_reset(with_reset);
    f(&mut b)?;
    Ok(b.finish()?)
}

pub fn build_setter(
    layout: &RegisterLayout,
    constant: u64,
    target: Reg,
) -> Result<Circuit, ModuleError> {
    standalone(layout, target.len, true, |b| setter(b, constant, target))
}

/// Standalone adder; scratch registers are appended to `layout`.
pub fn build_adder(
    layout: &RegisterLayout,
    a: Reg,
    x: Reg,
    out: Reg,
    with_reset: bool,
) -> Result<Circuit, ModuleError> {
    standalone(layout, a.len, with_reset, |b| adder(b, a, x, out))
}

pub fn build_subtractor(
    layout: &RegisterLayout,
    a: Reg,
    x: Reg,
    out: Reg,
    with_reset: bool,
) -> Result<Circuit, ModuleError> {
    standalone(layout, a.len, with_reset, |b| subtractor(b, a, x, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::RegisterRole;
    use crate::modules::testutil::run;

    fn three(q: usize) -> (RegisterLayout, Reg, Reg, Reg) {
        let mut l = RegisterLayout::new();
        let a = l.add("a", RegisterRole::Value, q).unwrap();
        let x = l.add("b", RegisterRole::Value, q).unwrap();
        let o = l.add("o", RegisterRole::Value, q).unwrap();
        (l, a, x, o)
    }

    #[test]
    fn setter_examples() {
        let mut l = RegisterLayout::new();
        let t = l.add("k", RegisterRole::Constant, 3).unwrap();
        assert!(build_setter(&l, 0, t).unwrap().is_empty());
        assert_eq!(build_setter(&l, 2, t).unwrap().gates(), &[Gate::x(1)]);
        assert_eq!(
            build_setter(&l, 5, t).unwrap().gates(),
            &[Gate::x(0), Gate::x(2)]
        );
        assert!(build_setter(&l, 8, t).is_err());
    }

    #[test]
    fn adder_examples() {
        let (l, a, x, o) = three(8);
        let c = build_adder(&l, a, x, o, true).unwrap();
        assert_eq!(o.read(&run(&c, &[(a, 100), (x, 50)])), 150);
        assert_eq!(o.read(&run(&c, &[(a, 200), (x, 100)])), 255);
    }

    #[test]
    fn subtractor_examples() {
        let (l, a, x, o) = three(8);
        let c = build_subtractor(&l, a, x, o, true).unwrap();
        assert_eq!(o.read(&run(&c, &[(a, 100), (x, 2)])), 98);
        assert_eq!(o.read(&run(&c, &[(a, 1), (x, 2)])), 0);
    }

    #[test]
    fn exhaustive_q3_both_cleanup_modes() {
        for with_reset in [true, false] {
            let (l, a, x, o) = three(3);
            let add = build_adder(&l, a, x, o, with_reset).unwrap();
            let sub = build_subtractor(&l, a, x, o, with_reset).unwrap();
            let carry = add.layout().get("carry_0").unwrap();
            for va in 0..8 {
                for vx in 0..8 {
                    let bits = run(&add, &[(a, va), (x, vx)]);
                    assert_eq!(o.read(&bits), (va + vx).min(7));
                    assert_eq!(
                        (a.read(&bits), x.read(&bits), carry.read(&bits)),
                        (va, vx, 0)
                    );
                    let bits = run(&sub, &[(a, va), (x, vx)]);
                    assert_eq!(o.read(&bits), va.saturating_sub(vx));
                    assert_eq!(
                        (a.read(&bits), x.read(&bits), carry.read(&bits)),
                        (va, vx, 0)
                    );
                }
            }
        }
    }

    #[test]
    fn pool_reuse_across_adders() {
        let mut l = RegisterLayout::new();
        let a = l.add("a", RegisterRole::Value, 4).unwrap();
        let x = l.add("b", RegisterRole::Value, 4).unwrap();
        let o1 = l.add("o1", RegisterRole::Value, 4).unwrap();
        let o2 = l.add("o2", RegisterRole::Value, 4).unwrap();
        let mut b = CircuitBuilder::new(l, 4, 0);
        adder(&mut b, a, x, o1).unwrap();
        subtractor(&mut b, a, x, o2).unwrap();
        let c = b.finish().unwrap();
        assert_eq!(c.num_qubits(), 16 + 5);
        let bits = run(&c, &[(a, 9), (x, 4)]);
        assert_eq!((o1.read(&bits), o2.read(&bits)), (13, 5));
    }
}
