use serde::Serialize;

use crate::circuit::{Circuit, CircuitBuilder, Gate, ModuleTag, Reg, RegisterLayout, RegisterRole};
use crate::image::Image;
use crate::tv::rounded_offsets;

use super::{adder, copy, cycle_shift, median9, neqr, setter, subtractor, Direction, ModuleError};

/// Fixed registers of the QTV circuit, in layout order. Scratch registers
/// created by the arithmetic and comparison modules follow them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QtvLayout {
    pub ul: Reg,
    pub uu: Reg,
    pub ur: Reg,
    pub ud: Reg,
    pub f: Reg,
    pub w: Reg,
    pub x: Reg,
    pub y: Reg,
    pub p0: Reg,
    pub p1: Reg,
    pub p3: Reg,
    pub p4: Reg,
    pub k0: Reg,
    pub k1: Reg,
    pub k3: Reg,
    pub k4: Reg,
}

const NAMES: [&str; 16] = [
    "ul", "uu", "ur", "ud", "f", "w", "x", "y", "p0", "p1", "p3", "p4", "k0", "k1", "k3", "k4",
];

impl QtvLayout {
    pub fn new(q: usize, n: usize) -> (RegisterLayout, QtvLayout) {
        let mut l = RegisterLayout::new();
        for name in NAMES {
            let (role, len) = match name {
                "w" => (RegisterRole::Working, q),
                "x" => (RegisterRole::CoordX, n),
                "y" => (RegisterRole::CoordY, n),
                _ if name.starts_with('p') => (RegisterRole::Value, q),
                _ if name.starts_with('k') => (RegisterRole::Constant, q),
                _ => (RegisterRole::Color, q),
            };
            l.add(name, role, len).expect("fixed names are distinct");
        }
        let regs = Self::from_layout(&l).expect("all registers present");
        (l, regs)
    }

    pub fn from_layout(l: &RegisterLayout) -> Option<Self> {
        let r = |i: usize| l.get(NAMES[i]);
        Some(Self {
            ul: r(0)?,
            uu: r(1)?,
            ur: r(2)?,
            ud: r(3)?,
            f: r(4)?,
            w: r(5)?,
            x: r(6)?,
            y: r(7)?,
            p0: r(8)?,
            p1: r(9)?,
            p3: r(10)?,
            p4: r(11)?,
            k0: r(12)?,
            k1: r(13)?,
            k3: r(14)?,
            k4: r(15)?,
        })
    }

    pub fn bit_depth(&self) -> usize {
        self.w.len
    }

    pub fn coord_bits(&self) -> usize {
        self.x.len
    }

    /// Median filter operands as a row-major 3x3 matrix with `w` (holding
    /// `p2 = f`) in the centre.
    pub fn median_inputs(&self) -> [Reg; 9] {
        [
            self.ul, self.uu, self.ur, self.ud, self.w, self.p0, self.p1, self.p3, self.p4,
        ]
    }
}

fn swap_regs(b: &mut CircuitBuilder, a: Reg, c: Reg) -> Result<(), ModuleError> {
    b.scoped(ModuleTag::Swap, |b| {
        for i in 0..a.len {
            b.push(Gate::swap(a.qubit(i), c.qubit(i)))?;
        }
        Ok(())
    })
}

/// Loads the pixel and its four neighbours into `f`, `ud`, `ur`, `uu`, `ul`.
///
/// The image is NEQR-encoded into `w` at shifted coordinates and swapped out
/// each time, so `w` returns to `|0>`. `Y + 1` is the row below.
pub fn neighborhood_prep(
    b: &mut CircuitBuilder,
    patch: &Image,
    r: &QtvLayout,
) -> Result<(), ModuleError> {
    use Direction::{Minus, Plus};
    b.scoped(ModuleTag::Np, |b| {
        neqr(b, patch, r.x, r.y, r.w, true)?;
        swap_regs(b, r.w, r.f)?;
        let rounds = [
            (vec![(r.y, Plus)], r.ud),
            (vec![(r.y, Minus), (r.x, Plus)], r.ur),
            (vec![(r.y, Minus), (r.x, Minus)], r.uu),
            (vec![(r.y, Plus), (r.x, Minus)], r.ul),
        ];
        for (shifts, dst) in rounds {
            for (reg, dir) in shifts {
                cycle_shift(b, reg, dir)?;
            }
            neqr(b, patch, r.x, r.y, r.w, false)?;
            swap_regs(b, r.w, dst)?;
        }
        cycle_shift(b, r.x, Plus)
    })
}

/// Offsets `(round(1/lambda), round(2/lambda))` capped at `2^q - 1`. Under
/// saturating arithmetic an offset of `2^q - 1` already drives every p-value
/// to the bound, so the cap does not change the result.
fn offsets(lambda: f64, bit_depth: usize) -> Result<(u64, u64), ModuleError> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(ModuleError::Lambda(lambda));
    }
    let max = (1u64 << bit_depth) - 1;
    let (one, two) = rounded_offsets(lambda);
    Ok(((one as u64).min(max), (two as u64).min(max)))
}

/// Materialises `p0..p4`: `p0 = f + round(2/lambda)`, `p1 = f + round(1/lambda)`,
/// `w = f`, `p3 = f - round(1/lambda)`, `p4 = f - round(2/lambda)`, all saturating.
pub fn pvalues(b: &mut CircuitBuilder, r: &QtvLayout, lambda: f64) -> Result<(), ModuleError> {
    let (one, two) = offsets(lambda, r.bit_depth())?;
    b.scoped(ModuleTag::Pc, |b| {
        setter(b, two, r.k0)?;
        setter(b, one, r.k1)?;
        setter(b, one, r.k3)?;
        setter(b, two, r.k4)?;
        adder(b, r.f, r.k0, r.p0)?;
        adder(b, r.f, r.k1, r.p1)?;
        copy(b, r.f, r.w)?;
        subtractor(b, r.f, r.k3, r.p3)?;
        subtractor(b, r.f, r.k4, r.p4)
    })
}

/// A QTV circuit for one patch.
#[derive(Debug, Clone)]
pub struct QtvCircuit {
    pub circuit: Circuit,
    pub patch_n: usize,
    pub bit_depth: usize,
    pub lambda: f64,
    pub regs: QtvLayout,
    /// `(round(1/lambda), round(2/lambda))` capped at `2^q - 1`, as loaded by the setters.
    pub constants: (u64, u64),
}

impl QtvCircuit {
    /// Register holding the denoised value on every branch.
    pub fn output(&self) -> Reg {
        self.regs.w
    }
}

/// The patch-independent part of a QTV circuit (p-value computation and
/// median filter) built once for a given `(q, n, lambda)`.
#[derive(Debug, Clone)]
pub struct QtvTemplate {
    bit_depth: usize,
    coord_bits: usize,
    lambda: f64,
    constants: (u64, u64),
    with_reset: bool,
    regs: QtvLayout,
    tail: Circuit,
}

impl QtvTemplate {
    pub fn new(
        bit_depth: usize,
        coord_bits: usize,
        lambda: f64,
        with_reset: bool,
    ) -> Result<Self, ModuleError> {
        if coord_bits == 0 || bit_depth == 0 {
            return Err(ModuleError::EmptyRegister);
        }
        let constants = offsets(lambda, bit_depth)?;
        let (layout, regs) = QtvLayout::new(bit_depth, coord_bits);
        let mut b = CircuitBuilder::new(layout, bit_depth, coord_bits).with_reset(with_reset);
        pvalues(&mut b, &regs, lambda)?;
        median9(&mut b, regs.median_inputs())?;
        Ok(Self {
            bit_depth,
            coord_bits,
            lambda,
            constants,
            with_reset,
            regs,
            tail: b.finish()?,
        })
    }

    pub fn bit_depth(&self) -> usize {
        self.bit_depth
    }

    pub fn coord_bits(&self) -> usize {
        self.coord_bits
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn regs(&self) -> &QtvLayout {
        &self.regs
    }

    /// Full register layout including scratch.
    pub fn layout(&self) -> &RegisterLayout {
        self.tail.layout()
    }

    /// `PC` followed by `MF`.
    pub fn tail(&self) -> &Circuit {
        &self.tail
    }

    fn builder(&self) -> CircuitBuilder {
        CircuitBuilder::new(self.layout().clone(), self.bit_depth, self.coord_bits)
            .with_reset(self.with_reset)
    }

    /// Neighbourhood preparation for `patch` on the template's layout.
    pub fn neighborhood(&self, patch: &Image) -> Result<Circuit, ModuleError> {
        let mut b = self.builder();
        neighborhood_prep(&mut b, patch, &self.regs)?;
        Ok(b.finish()?)
    }

    /// `NP -> PC -> MF` for `patch`.
    pub fn build(&self, patch: &Image) -> Result<QtvCircuit, ModuleError> {
        let mut b = self.builder();
        neighborhood_prep(&mut b, patch, &self.regs)?;
        b.splice(&self.tail)?;
        Ok(QtvCircuit {
            circuit: b.finish()?,
            patch_n: self.coord_bits,
            bit_depth: self.bit_depth,
            lambda: self.lambda,
            regs: self.regs,
            constants: self.constants,
        })
    }
}

fn patch_bits(patch: &Image) -> Result<usize, ModuleError> {
    let side = patch.width();
    if side < 2 || !side.is_power_of_two() || patch.height() != side {
        return Err(ModuleError::PatchSize {
            side: side.max(2).next_power_of_two(),
            width: patch.width(),
            height: patch.height(),
        });
    }
    Ok(side.trailing_zeros() as usize)
}

/// QTV circuit for a `2^n x 2^n` patch (4x4 in the pipeline), with RESET cleanup.
pub fn build_qtv(patch: &Image, lambda: f64, bit_depth: usize) -> Result<QtvCircuit, ModuleError> {
    build_qtv_with(patch, lambda, bit_depth, true)
}

pub fn build_qtv_with(
    patch: &Image,
    lambda: f64,
    bit_depth: usize,
    with_reset: bool,
) -> Result<QtvCircuit, ModuleError> {
    let n = patch_bits(patch)?;
    QtvTemplate::new(bit_depth, n, lambda, with_reset)?.build(patch)
}

/// Standalone neighbourhood preparation over a layout made by [`QtvLayout::new`].
pub fn build_neighborhood_prep(
    patch: &Image,
    layout: &RegisterLayout,
) -> Result<Circuit, ModuleError> {
    let regs = QtvLayout::from_layout(layout).ok_or(ModuleError::EmptyRegister)?;
    let n = patch_bits(patch)?;
    if n != regs.coord_bits() {
        return Err(ModuleError::PatchSize {
            side: 1 << regs.coord_bits(),
            width: patch.width(),
            height: patch.height(),
        });
    }
    let mut b = CircuitBuilder::new(layout.clone(), regs.bit_depth(), n);
    neighborhood_prep(&mut b, patch, &regs)?;
    Ok(b.finish()?)
}

/// Standalone p-value computation; scratch registers are appended to `layout`.
pub fn build_pvalues(layout: &RegisterLayout, lambda: f64) -> Result<Circuit, ModuleError> {
    let regs = QtvLayout::from_layout(layout).ok_or(ModuleError::EmptyRegister)?;
    let mut b = CircuitBuilder::new(layout.clone(), regs.bit_depth(), regs.coord_bits());
    pvalues(&mut b, &regs, lambda)?;
    Ok(b.finish()?)
}
