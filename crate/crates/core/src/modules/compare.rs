use crate::circuit::{Circuit, CircuitBuilder, Control, Gate, ModuleTag, Reg, RegisterLayout};

use super::{same_width, ModuleError};

/// Sets `flag ^= (a > x)`, leaving `a` and `x` unchanged.
///
/// Bits are scanned from the most significant down. `eq[i]` holds "all bits
/// above and including `i` agree"; the flag picks up `a[i]` at the first
/// position where the prefix agreed and the bits differ. Scratch registers are
/// keyed by `lane` so that comparators in different lanes can run in parallel.
pub fn comparator(
    b: &mut CircuitBuilder,
    a: Reg,
    x: Reg,
    flag: usize,
    lane: usize,
) -> Result<(), ModuleError> {
    let q = same_width(a, x)?;
    b.scoped(ModuleTag::Comp, |b| {
        let key = format!("eq{lane}");
        let eq = b.acquire(&key, q);
        let m = q - 1;
        let mut fwd = vec![
            Gate::cnot(a.qubit(m), x.qubit(m)),
            Gate::toffoli(a.qubit(m), x.qubit(m), flag),
            Gate::cx(&[Control::neg(x.qubit(m))], eq.qubit(m))?,
            Gate::cnot(a.qubit(m), x.qubit(m)),
        ];
        for i in (0..m).rev() {
            fwd.extend([
                Gate::cnot(a.qubit(i), x.qubit(i)),
                Gate::cx(
                    &[Control::pos(eq.qubit(i + 1)), Control::neg(x.qubit(i))],
                    eq.qubit(i),
                )?,
                Gate::cnot(eq.qubit(i + 1), eq.qubit(i)),
                Gate::toffoli(eq.qubit(i), a.qubit(i), flag),
                Gate::cnot(eq.qubit(i + 1), eq.qubit(i)),
                Gate::cnot(a.qubit(i), x.qubit(i)),
            ]);
        }
        for &g in &fwd {
            b.push(g)?;
        }
        if b.reset_enabled() {
            for q in eq.qubits() {
                b.push(Gate::reset(q))?;
            }
        } else {
            for &g in fwd.iter().rev() {
                if !matches!(g, Gate::Cx { target, .. } if target == flag) {
                    b.push(g)?;
                }
            }
        }
        b.release(&key, eq);
        Ok(())
    })
}

/// Orders `(a, x)` ascending: `a <- min`, `x <- max`.
///
/// The comparison flag cannot be uncomputed after the swap (inputs `(7, 2)`
/// and `(2, 7)` both end as `(2, 7)` with different flags), so it is reset.
/// Without reset a fresh flag qubit is used per swapper and left dirty.
pub fn swapper(b: &mut CircuitBuilder, a: Reg, x: Reg, lane: usize) -> Result<(), ModuleError> {
    same_width(a, x)?;
    b.scoped(ModuleTag::Swpr, |b| {
        let key = format!("flag{lane}");
        let flag = b.acquire(&key, 1);
        comparator(b, a, x, flag.start, lane)?;
        b.scoped(ModuleTag::Cswap, |b| {
            for i in 0..a.len {
                b.push(Gate::cswap(
                    Control::pos(flag.start),
                    a.qubit(i),
                    x.qubit(i),
                ))?;
            }
            Ok::<_, ModuleError>(())
        })?;
        if b.reset_enabled() {
            b.push(Gate::reset(flag.start))?;
            b.release(&key, flag);
        }
        Ok(())
    })
}

/// Sorts three registers ascending with three swappers.
pub fn sort3(b: &mut CircuitBuilder, r: [Reg; 3], lane: usize) -> Result<(), ModuleError> {
    b.scoped(ModuleTag::Sort, |b| {
        swapper(b, r[0], r[1], lane)?;
        swapper(b, r[1], r[2], lane)?;
        swapper(b, r[0], r[1], lane)
    })
}

/// Median of nine registers viewed as a row-major 3x3 matrix; the result is
/// left in the centre register `regs[4]`. Columns are sorted, then rows,
/// then the anti-diagonal.
pub fn median9(b: &mut CircuitBuilder, regs: [Reg; 9]) -> Result<(), ModuleError> {
    let m = |r: usize, c: usize| regs[3 * r + c];
    b.scoped(ModuleTag::Mf, |b| {
        for c in 0..3 {
            sort3(b, [m(0, c), m(1, c), m(2, c)], c)?;
        }
        for r in 0..3 {
            sort3(b, [m(r, 0), m(r, 1), m(r, 2)], r)?;
        }
        sort3(b, [m(0, 2), m(1, 1), m(2, 0)], 0)
    })
}

fn standalone(
    layout: &RegisterLayout,
    q: usize,
    with_reset: bool,
    f: impl FnOnce(&mut CircuitBuilder) -> Result<(), ModuleError>,
) -> Result<Circuit, ModuleError> {
    let mut b = CircuitBuilder::new(layout.clone(), q, layout.coord_x().map_or(0, |r| r.len))
        .with_reset(with_reset);
    f(&mut b)?;
    Ok(b.finish()?)
}

pub fn build_comparator(
    layout: &RegisterLayout,
    a: Reg,
    x: Reg,
    flag: usize,
    with_reset: bool,
) -> Result<Circuit, ModuleError> {
    standalone(layout, a.len, with_reset, |b| comparator(b, a, x, flag, 0))
}

pub fn build_swapper(
    layout: &RegisterLayout,
    a: Reg,
    x: Reg,
    with_reset: bool,
) -> Result<Circuit, ModuleError> {
    standalone(layout, a.len, with_reset, |b| swapper(b, a, x, 0))
}

pub fn build_sort3(
    layout: &RegisterLayout,
    r: [Reg; 3],
    with_reset: bool,
) -> Result<Circuit, ModuleError> {
    standalone(layout, r[0].len, with_reset, |b| sort3(b, r, 0))
}

pub fn build_median9(
    layout: &RegisterLayout,
    regs: [Reg; 9],
    with_reset: bool,
) -> Result<Circuit, ModuleError> {
    standalone(layout, regs[0].len, with_reset, |b| median9(b, regs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::RegisterRole;
    use crate::modules::testutil::run;

    fn regs(q: usize, k: usize) -> (RegisterLayout, Vec<Reg>) {
        let mut l = RegisterLayout::new();
        let r = (0..k)
            .map(|i| l.add(format!("r{i}"), RegisterRole::Value, q).unwrap())
            .collect();
        (l, r)
    }

    #[test]
    fn comparator_examples_and_restore() {
        for with_reset in [true, false] {
            let (mut l, r) = regs(3, 2);
            let flag = l.add("e", RegisterRole::Ancilla, 1).unwrap();
            let c = build_comparator(&l, r[0], r[1], flag.start, with_reset).unwrap();
            let eq = c.layout().get("eq0_0").unwrap();
            for a in 0..8 {
                for x in 0..8 {
                    let bits = run(&c, &[(r[0], a), (r[1], x)]);
                    assert_eq!(flag.read(&bits), (a > x) as u64, "{a} > {x}");
                    assert_eq!(
                        (r[0].read(&bits), r[1].read(&bits), eq.read(&bits)),
                        (a, x, 0)
                    );
                }
            }
        }
    }

    #[test]
    fn swapper_examples() {
        let (l, r) = regs(3, 2);
        let c = build_swapper(&l, r[0], r[1], true).unwrap();
        let flag = c.layout().get("flag0_0").unwrap();
        for (a, x, lo, hi) in [(7, 2, 2, 7), (2, 7, 2, 7), (4, 4, 4, 4)] {
            let bits = run(&c, &[(r[0], a), (r[1], x)]);
            assert_eq!(
                (r[0].read(&bits), r[1].read(&bits), flag.read(&bits)),
                (lo, hi, 0)
            );
        }
    }

    #[test]
    fn sort3_all_permutations() {
        let (l, r) = regs(4, 3);
        let c = build_sort3(&l, [r[0], r[1], r[2]], true).unwrap();
        let perms = [
            [3, 1, 2],
            [1, 2, 3],
            [1, 3, 2],
            [2, 1, 3],
            [2, 3, 1],
            [3, 2, 1],
        ];
        for p in perms {
            let bits = run(&c, &[(r[0], p[0]), (r[1], p[1]), (r[2], p[2])]);
            assert_eq!(
                [r[0].read(&bits), r[1].read(&bits), r[2].read(&bits)],
                [1, 2, 3]
            );
        }
        let bits = run(&c, &[(r[0], 1), (r[1], 1), (r[2], 9)]);
        assert_eq!(
            [r[0].read(&bits), r[1].read(&bits), r[2].read(&bits)],
            [1, 1, 9]
        );
    }

    #[test]
    fn median9_examples() {
        let (l, r) = regs(4, 9);
        let rs: [Reg; 9] = r.clone().try_into().unwrap();
        let c = build_median9(&l, rs, true).unwrap();
        let vals = [9, 2, 7, 4, 1, 6, 3, 8, 5];
        let inputs: Vec<_> = rs.iter().copied().zip(vals).collect();
        assert_eq!(rs[4].read(&run(&c, &inputs)), 5);
        let same: Vec<_> = rs.iter().map(|&r| (r, 11)).collect();
        assert_eq!(rs[4].read(&run(&c, &same)), 11);
    }
}
