use crate::circuit::{Circuit, CircuitBuilder, Control, Gate, ModuleTag, Reg, RegisterLayout};
use crate::image::Image;

use super::ModuleError;

/// NEQR encoding of a `2^n x 2^n` image into `target`, XOR-ed onto its
/// current contents. Pixel `(x, y)` is addressed by `X = x` (column) and
/// `Y = y` (row). The Hadamard layer on the coordinates is emitted only
/// when `with_hadamard` is set.
pub fn neqr(
    b: &mut CircuitBuilder,
    img: &Image,
    x: Reg,
    y: Reg,
    target: Reg,
    with_hadamard: bool,
) -> Result<(), ModuleError> {
    let n = x.len;
    if y.len != n {
        return Err(ModuleError::WidthMismatch(x.len, y.len));
    }
    let side = 1usize << n;
    if img.width() != side || img.height() != side {
        return Err(ModuleError::PatchSize {
            side,
            width: img.width(),
            height: img.height(),
        });
    }
    if let Some(&v) = img
        .pixels()
        .iter()
        .find(|&&v| (v as u64) >> target.len != 0)
    {
        return Err(ModuleError::ValueOutOfRange {
            value: v as u64,
            bits: target.len,
        });
    }
    b.scoped(ModuleTag::Neqr, |b| {
        if with_hadamard {
            for q in x.qubits().chain(y.qubits()) {
                b.push(Gate::h(q))?;
            }
        }
        let mut controls = Vec::with_capacity(2 * n);
        for py in 0..side {
            for px in 0..side {
                let v = img.get(px, py);
                if v == 0 {
                    continue;
                }
                controls.clear();
                controls.extend((0..n).map(|i| Control::matching(x.qubit(i), (px >> i) & 1 == 1)));
                controls.extend((0..n).map(|i| Control::matching(y.qubit(i), (py >> i) & 1 == 1)));
                for bit in 0..target.len {
                    if (v >> bit) & 1 == 1 {
                        b.push(Gate::cx(&controls, target.qubit(bit))?)?;
                    }
                }
            }
        }
        Ok(())
    })
}

/// Standalone NEQR circuit over `layout`, which must hold coordinate registers.
pub fn build_neqr(
    img: &Image,
    layout: &RegisterLayout,
    target: Reg,
    with_hadamard: bool,
) -> Result<Circuit, ModuleError> {
    let x = layout.coord_x().unwrap_or(Reg::new(0, 0));
    let y = layout.coord_y().unwrap_or(Reg::new(0, 0));
    let mut b = CircuitBuilder::new(layout.clone(), target.len, x.len);
    neqr(&mut b, img, x, y, target, with_hadamard)?;
    Ok(b.finish()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{GateKind, RegisterRole};

    #[test]
    fn zero_patch_has_only_hadamards() {
        let (l, c) = RegisterLayout::neqr(8, 2);
        let img = Image::filled(4, 4, 8, 0).unwrap();
        let circ = build_neqr(&img, &l, c, true).unwrap();
        assert_eq!(circ.len(), 4);
        assert!(circ.gates().iter().all(|g| g.kind() == GateKind::H));
    }

    #[test]
    fn single_pixel_is_plain_x() {
        let mut l = RegisterLayout::new();
        let c = l.add("c", RegisterRole::Working, 3).unwrap();
        let img = Image::filled(1, 1, 3, 5).unwrap();
        let circ = build_neqr(&img, &l, c, false).unwrap();
        assert_eq!(circ.gates(), &[Gate::x(0), Gate::x(2)]);
    }

    #[test]
    fn gate_count_is_popcount() {
        let (l, c) = RegisterLayout::neqr(8, 2);
        let img = Image::from_fn(4, 4, 8, |x, y| (x * 37 + y * 91) as u8).unwrap();
        let circ = build_neqr(&img, &l, c, false).unwrap();
        let pop: u32 = img.pixels().iter().map(|v| v.count_ones()).sum();
        assert_eq!(circ.len(), pop as usize);
    }

    #[test]
    fn each_branch_reads_its_pixel() {
        let (l, c) = RegisterLayout::neqr(8, 2);
        let img = Image::from_fn(4, 4, 8, |x, y| (x * 60 + y * 3 + 1) as u8).unwrap();
        let circ = build_neqr(&img, &l, c, false).unwrap();
        let (x, y) = (l.coord_x().unwrap(), l.coord_y().unwrap());
        for py in 0..4 {
            for px in 0..4 {
                let mut bits = vec![false; l.total_qubits()];
                x.write(&mut bits, px as u64);
                y.write(&mut bits, py as u64);
                circ.apply_to_bits(&mut bits).unwrap();
                assert_eq!(c.read(&bits), img.get(px, py) as u64);
            }
        }
    }

    #[test]
    fn rejects_bad_patches() {
        let (l, c) = RegisterLayout::neqr(4, 2);
        let wide = Image::filled(8, 4, 8, 0).unwrap();
        assert!(matches!(
            build_neqr(&wide, &l, c, true),
            Err(ModuleError::PatchSize { .. })
        ));
        let bright = Image::filled(4, 4, 8, 200).unwrap();
        assert!(matches!(
            build_neqr(&bright, &l, c, true),
            Err(ModuleError::ValueOutOfRange { .. })
        ));
    }
}
