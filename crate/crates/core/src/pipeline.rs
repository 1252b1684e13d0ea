//! Whole-image QTV denoising over overlapped 4x4 patches.
//!
//! The image is padded by one pixel of edge replication and cut into 4x4
//! windows with stride 2. Each window's central 2x2 block maps onto a disjoint
//! 2x2 block of the original image. Windows that overhang an odd-sized image
//! read clamped pixels and their out-of-image centres are discarded.

use rayon::prelude::*;
use thiserror::Error;

use crate::image::{pad, Image, ImageError, PaddedImage};
use crate::modules::{ModuleError, QtvTemplate};
use crate::sim::{run_branches, SimError};
use crate::tv::{change_ratio, ArithmeticMode, DenoiseOutcome, TvParams};

pub const PATCH_SIDE: usize = 4;
pub const STRIDE: usize = 2;
const PATCH_BITS: usize = 2;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("image {width}x{height} is too small; padded size must be at least 4x4")]
    TooSmall { width: usize, height: usize },
    #[error("expected {expected} patch results, got {got}")]
    MissingPatch { expected: usize, got: usize },
    #[error("the quantum path only supports integer arithmetic")]
    FloatMode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Patch {
    /// Top-left corner in padded coordinates.
    pub origin: (usize, usize),
    pub pixels: Image,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatchGrid {
    pub patches: Vec<Patch>,
    pub cols: usize,
    pub rows: usize,
    pub stride: usize,
    /// Size of the unpadded image.
    pub width: usize,
    pub height: usize,
}

/// Cuts a padded image into stride-2 4x4 windows, row by row.
pub fn extract_patches(padded: &PaddedImage) -> Result<PatchGrid, PipelineError> {
    let (w, h) = (padded.inner_width(), padded.inner_height());
    if w + 2 < PATCH_SIDE || h + 2 < PATCH_SIDE {
        return Err(PipelineError::TooSmall {
            width: w,
            height: h,
        });
    }
    let (cols, rows) = (w.div_ceil(STRIDE), h.div_ceil(STRIDE));
    let full = padded.full();
    let mut patches = Vec::with_capacity(cols * rows);
    for j in 0..rows {
        for i in 0..cols {
            let (ox, oy) = (STRIDE * i, STRIDE * j);
            let pixels = Image::from_fn(PATCH_SIDE, PATCH_SIDE, full.bit_depth(), |x, y| {
                full.get_clamped((ox + x) as isize, (oy + y) as isize)
            })?;
            patches.push(Patch {
                origin: (ox, oy),
                pixels,
            });
        }
    }
    Ok(PatchGrid {
        patches,
        cols,
        rows,
        stride: STRIDE,
        width: w,
        height: h,
    })
}

/// Writes each patch's central 2x2 result (row-major) back into an image of
/// the original size.
pub fn reassemble(
    grid: &PatchGrid,
    outputs: &[[u8; 4]],
    bit_depth: u8,
) -> Result<Image, PipelineError> {
    if outputs.len() != grid.patches.len() {
        return Err(PipelineError::MissingPatch {
            expected: grid.patches.len(),
            got: outputs.len(),
        });
    }
    let mut px = vec![0u8; grid.width * grid.height];
    for (p, out) in grid.patches.iter().zip(outputs) {
        for dy in 0..2 {
            for dx in 0..2 {
                let (x, y) = (p.origin.0 + dx, p.origin.1 + dy);
                if x < grid.width && y < grid.height {
                    px[y * grid.width + x] = out[2 * dy + dx];
                }
            }
        }
    }
    Ok(Image::new(grid.width, grid.height, bit_depth, px)?)
}

/// Central 2x2 block of a patch, row-major.
pub fn patch_center(p: &Patch) -> [u8; 4] {
    [
        p.pixels.get(1, 1),
        p.pixels.get(2, 1),
        p.pixels.get(1, 2),
        p.pixels.get(2, 2),
    ]
}

/// Runs the QTV circuit for one 4x4 patch and reads the four interior branches.
pub fn process_patch(template: &QtvTemplate, patch: &Image) -> Result<[u8; 4], PipelineError> {
    let np = template.neighborhood(patch)?;
    let mut state = run_branches(&np)?;
    state.apply(template.tail())?;
    let out = template.regs().w;
    let side = 1 << template.coord_bits();
    let mut res = [0u8; 4];
    for dy in 0..2 {
        for dx in 0..2 {
            // coordinates are restored by the circuit, so lane l still holds (l mod 4, l div 4)
            let lane = (1 + dy) * side + 1 + dx;
            res[2 * dy + dx] = state.value(lane, out) as u8;
        }
    }
    Ok(res)
}

/// One full QTV sweep over the image.
pub fn qtv_sweep(template: &QtvTemplate, img: &Image) -> Result<Image, PipelineError> {
    let grid = extract_patches(&pad(img))?;
    let outputs = grid
        .patches
        .par_iter()
        .map(|p| process_patch(template, &p.pixels))
        .collect::<Result<Vec<_>, _>>()?;
    reassemble(&grid, &outputs, img.bit_depth())
}

pub fn qtv_denoise(img: &Image, params: &TvParams) -> Result<DenoiseOutcome, PipelineError> {
    qtv_denoise_observed(img, params, |_, _, _| {})
}

/// Iterates [`qtv_sweep`] until the change ratio reaches epsilon, calling
/// `observe(iteration, iterate, ratio)` after each sweep.
pub fn qtv_denoise_observed(
    img: &Image,
    params: &TvParams,
    mut observe: impl FnMut(usize, &Image, f64),
) -> Result<DenoiseOutcome, PipelineError> {
    if params.mode() != ArithmeticMode::IntegerRounded {
        return Err(PipelineError::FloatMode);
    }
    if img.width() < 2 || img.height() < 2 {
        return Err(PipelineError::TooSmall {
            width: img.width(),
            height: img.height(),
        });
    }
    let template = QtvTemplate::new(img.bit_depth() as usize, PATCH_BITS, params.lambda(), true)?;
    let mut u = img.clone();
    let mut ratios = Vec::new();
    for it in 1..=params.max_iters() {
        let next = qtv_sweep(&template, &u)?;
        let ratio = change_ratio(u.pixels(), next.pixels());
        ratios.push(ratio);
        u = next;
        observe(it, &u, ratio);
        if ratio <= params.epsilon() {
            return Ok(DenoiseOutcome {
                image: u,
                iterations: it,
                ratios,
                converged: true,
            });
        }
    }
    Ok(DenoiseOutcome {
        image: u,
        iterations: params.max_iters(),
        ratios,
        converged: false,
    })
}

/// Root-mean-square difference.
pub fn rmse(a: &Image, b: &Image) -> Result<f64, ImageError> {
    a.same_shape(b)?;
    let sum: f64 = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&x, &y)| (x as f64 - y as f64).powi(2))
        .sum();
    Ok((sum / a.len() as f64).sqrt())
}
