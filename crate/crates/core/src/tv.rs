//! Anisotropic TV-L2 denoising by the per-pixel median formula.
//!
//! Each sweep replaces every pixel by the median of its four direct neighbours
//! and five "p-values" `f + W_i / (2 lambda)`, `W = (4, 2, 0, -2, -4)`, where
//! `f` is the pixel's value in the previous iterate. Sweeps are Jacobi style:
//! every update reads only the previous iterate.
//!
//! Two arithmetic modes are provided. `Float` works on intensities normalised
//! to `[0, 1]`, so `lambda` is expressed in normalised units. `IntegerRounded`
//! works on raw intensities, rounds the offsets `2/lambda`, `1/lambda` half away
//! from zero and saturates every p-value into `[0, 2^q - 1]`; this is the
//! arithmetic realised by the quantum circuit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::image::{clamp_pixel_f64, Image, ImageError};

pub const DEFAULT_EPSILON: f64 = 1e-3;
pub const DEFAULT_MAX_ITERS: usize = 50;

#[derive(Debug, Error)]
pub enum TvError {
    #[error("lambda must be positive and finite, got {0}")]
    Lambda(f64),
    #[error("epsilon must be positive, got {0}")]
    Epsilon(f64),
    #[error("max_iters must be at least 1")]
    MaxIters,
    #[error(transparent)]
    Image(#[from] ImageError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArithmeticMode {
    Float,
    IntegerRounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TvParams {
    lambda: f64,
    epsilon: f64,
    max_iters: usize,
    mode: ArithmeticMode,
}

impl TvParams {
    pub fn new(lambda: f64, mode: ArithmeticMode) -> Result<Self, TvError> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(TvError::Lambda(lambda));
        }
        Ok(Self {
            lambda,
            epsilon: DEFAULT_EPSILON,
            max_iters: DEFAULT_MAX_ITERS,
            mode,
        })
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self, TvError> {
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(TvError::Epsilon(epsilon));
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Result<Self, TvError> {
        if max_iters == 0 {
            return Err(TvError::MaxIters);
        }
        self.max_iters = max_iters;
        Ok(self)
    }

    pub fn with_lambda(self, lambda: f64) -> Result<Self, TvError> {
        let mut p = Self::new(lambda, self.mode)?;
        p.epsilon = self.epsilon;
        p.max_iters = self.max_iters;
        Ok(p)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn max_iters(&self) -> usize {
        self.max_iters
    }

    pub fn mode(&self) -> ArithmeticMode {
        self.mode
    }
}

/// The centre pixel `f` and its four direct neighbours.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighborhood<T> {
    pub left: T,
    pub right: T,
    pub up: T,
    pub down: T,
    pub center: T,
}

impl<T: Copy> Neighborhood<T> {
    pub fn neighbors(&self) -> [T; 4] {
        [self.left, self.right, self.up, self.down]
    }
}

impl Neighborhood<u8> {
    /// Neighbourhood of `(x, y)` with edge-replicated borders.
    pub fn of(img: &Image, x: usize, y: usize) -> Self {
        let (x, y) = (x as isize, y as isize);
        Self {
            left: img.get_clamped(x - 1, y),
            right: img.get_clamped(x + 1, y),
            up: img.get_clamped(x, y - 1),
            down: img.get_clamped(x, y + 1),
            center: img.get_clamped(x, y),
        }
    }
}

/// `(round(1/lambda), round(2/lambda))`, rounding half away from zero.
pub fn rounded_offsets(lambda: f64) -> (u32, u32) {
    let r = |v: f64| v.round().min(u32::MAX as f64) as u32;
    (r(1.0 / lambda), r(2.0 / lambda))
}

/// `[p0, ..., p4]` in float mode: `f + W_i / (2 lambda)`.
pub fn p_values_float(f: f64, lambda: f64) -> [f64; 5] {
    [4.0, 2.0, 0.0, -2.0, -4.0].map(|w| f + w / (2.0 * lambda))
}

/// `[p0, ..., p4]` in integer mode, saturated into `[0, max]`.
pub fn p_values_int(f: u8, lambda: f64, max: u8) -> [u8; 5] {
    let (one, two) = rounded_offsets(lambda);
    let f = f as i64;
    let sat = |v: i64| v.clamp(0, max as i64) as u8;
    [
        sat(f + two as i64),
        sat(f + one as i64),
        sat(f),
        sat(f - one as i64),
        sat(f - two as i64),
    ]
}

/// P-values in either mode. In integer mode `f` is rounded to an intensity first.
pub fn p_values(f: f64, lambda: f64, mode: ArithmeticMode, max: u8) -> [f64; 5] {
    match mode {
        ArithmeticMode::Float => p_values_float(f, lambda),
        ArithmeticMode::IntegerRounded => {
            p_values_int(clamp_pixel_f64(f, 8).min(max), lambda, max).map(f64::from)
        }
    }
}

/// Fifth smallest of nine values.
pub fn median9<T: PartialOrd + Copy>(mut v: [T; 9]) -> T {
    v.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    v[4]
}

pub fn median_update_int(nb: &Neighborhood<u8>, lambda: f64, max: u8) -> u8 {
    let p = p_values_int(nb.center, lambda, max);
    median9([
        nb.left, nb.right, nb.up, nb.down, p[0], p[1], p[2], p[3], p[4],
    ])
}

pub fn median_update_float(nb: &Neighborhood<f64>, lambda: f64) -> f64 {
    let p = p_values_float(nb.center, lambda);
    median9([
        nb.left, nb.right, nb.up, nb.down, p[0], p[1], p[2], p[3], p[4],
    ])
}

/// Relative change `||prev - curr||_2 / ||prev||_2`.
///
/// A zero `prev` yields `0` when `curr` is also zero and `+inf` otherwise.
pub fn change_ratio<T: Copy + Into<f64>>(prev: &[T], curr: &[T]) -> f64 {
    debug_assert_eq!(prev.len(), curr.len());
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for (&a, &b) in prev.iter().zip(curr) {
        let (a, b): (f64, f64) = (a.into(), b.into());
        num += (a - b) * (a - b);
        den += a * a;
    }
    if den == 0.0 {
        return if num == 0.0 { 0.0 } else { f64::INFINITY };
    }
    (num / den).sqrt()
}

/// Whether every ratio is finite and none exceeds the largest of the
/// `window` ratios before it.
pub fn ratio_trend_nonincreasing(ratios: &[f64], window: usize) -> bool {
    ratios.iter().all(|r| r.is_finite())
        && (window..ratios.len()).all(|i| {
            ratios[i]
                <= ratios[i - window..i]
                    .iter()
                    .cloned()
                    .fold(f64::MIN, f64::max)
        })
}

/// Stopping test between consecutive iterates.
pub fn converged(prev: &Image, curr: &Image, epsilon: f64) -> Result<bool, ImageError> {
    prev.same_shape(curr)?;
    Ok(change_ratio(prev.pixels(), curr.pixels()) <= epsilon)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenoiseOutcome {
    #[serde(skip)]
    pub image: Image,
    pub iterations: usize,
    /// Change ratio after each sweep.
    pub ratios: Vec<f64>,
    /// Whether the run stopped because the ratio reached epsilon.
    pub converged: bool,
}

/// One Jacobi sweep in integer mode.
pub fn sweep_int(img: &Image, lambda: f64) -> Image {
    let (w, h, max) = (img.width(), img.height(), img.max_value());
    let mut out = vec![0u8; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, px) in row.iter_mut().enumerate() {
            *px = median_update_int(&Neighborhood::of(img, x, y), lambda, max);
        }
    });
    Image::new(w, h, img.bit_depth(), out).expect("median stays in range")
}

fn sweep_float(u: &[f64], w: usize, h: usize, lambda: f64) -> Vec<f64> {
    let at = |x: isize, y: isize| {
        let x = x.clamp(0, w as isize - 1) as usize;
        let y = y.clamp(0, h as isize - 1) as usize;
        u[y * w + x]
    };
    let mut out = vec![0.0; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        let y = y as isize;
        for (x, px) in row.iter_mut().enumerate() {
            let x = x as isize;
            let nb = Neighborhood {
                left: at(x - 1, y),
                right: at(x + 1, y),
                up: at(x, y - 1),
                down: at(x, y + 1),
                center: at(x, y),
            };
            *px = median_update_float(&nb, lambda);
        }
    });
    out
}

pub fn tv_denoise(img: &Image, params: &TvParams) -> DenoiseOutcome {
    tv_denoise_observed(img, params, |_, _, _| {})
}

/// Like [`tv_denoise`], calling `observe(iteration, iterate, ratio)` after each sweep.
pub fn tv_denoise_observed(
    img: &Image,
    params: &TvParams,
    mut observe: impl FnMut(usize, &Image, f64),
) -> DenoiseOutcome {
    let mut ratios = Vec::new();
    match params.mode {
        ArithmeticMode::IntegerRounded => {
            let mut u = img.clone();
            for it in 1..=params.max_iters {
                let next = sweep_int(&u, params.lambda);
                let ratio = change_ratio(u.pixels(), next.pixels());
                ratios.push(ratio);
                u = next;
                observe(it, &u, ratio);
                if ratio <= params.epsilon {
                    return DenoiseOutcome {
                        image: u,
                        iterations: it,
                        ratios,
                        converged: true,
                    };
                }
            }
            DenoiseOutcome {
                image: u,
                iterations: params.max_iters,
                ratios,
                converged: false,
            }
        }
        ArithmeticMode::Float => {
            let (w, h, q) = (img.width(), img.height(), img.bit_depth());
            let scale = img.max_value() as f64;
            let to_image = |u: &[f64]| {
                Image::new(
                    w,
                    h,
                    q,
                    u.iter().map(|&v| clamp_pixel_f64(v * scale, q)).collect(),
                )
                .expect("clamped")
            };
            let mut u: Vec<f64> = img.pixels().iter().map(|&v| v as f64 / scale).collect();
            let mut converged = false;
            let mut iterations = params.max_iters;
            for it in 1..=params.max_iters {
                let next = sweep_float(&u, w, h, params.lambda);
                let ratio = change_ratio(&u, &next);
                ratios.push(ratio);
                u = next;
                observe(it, &to_image(&u), ratio);
                if ratio <= params.epsilon {
                    converged = true;
                    iterations = it;
                    break;
                }
            }
            DenoiseOutcome {
                image: to_image(&u),
                iterations,
                ratios,
                converged,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nb(l: u8, r: u8, u: u8, d: u8, f: u8) -> Neighborhood<u8> {
        Neighborhood {
            left: l,
            right: r,
            up: u,
            down: d,
            center: f,
        }
    }

    #[test]
    fn p_values_examples() {
        assert_eq!(p_values_int(100, 1.0, 255), [102, 101, 100, 99, 98]);
        assert_eq!(p_values_int(0, 1.0, 255), [2, 1, 0, 0, 0]);
        assert_eq!(
            p_values_float(100.0, 0.8),
            [102.5, 101.25, 100.0, 98.75, 97.5]
        );
        assert_eq!(
            p_values(100.0, 1.0, ArithmeticMode::IntegerRounded, 255),
            [102.0, 101.0, 100.0, 99.0, 98.0]
        );
    }

    #[test]
    fn half_rounds_away_from_zero() {
        // 2 / 4 = 0.5 -> 1, 1 / 4 = 0.25 -> 0
        assert_eq!(rounded_offsets(4.0), (0, 1));
        assert_eq!(rounded_offsets(2.0), (1, 1));
        assert_eq!(rounded_offsets(0.8), (1, 3));
    }

    #[test]
    fn median_examples() {
        assert_eq!(median_update_int(&nb(5, 5, 5, 5, 5), 1.0, 255), 5);
        // {0,0,0,0,255,255,255,254,253}: fifth smallest is 253
        assert_eq!(median_update_int(&nb(0, 0, 0, 0, 255), 1.0, 255), 253);
        assert_eq!(median_update_int(&nb(0, 0, 0, 0, 255), 0.005, 255), 0);
    }

    #[test]
    fn ratio_examples() {
        let a = Image::filled(4, 4, 8, 100).unwrap();
        let b = Image::filled(4, 4, 8, 101).unwrap();
        assert!(converged(&a, &a, 1e-9).unwrap());
        assert!((change_ratio(a.pixels(), b.pixels()) - 0.01).abs() < 1e-12);
        assert!(!converged(&a, &b, 0.005).unwrap());
        let z = Image::filled(4, 4, 8, 0).unwrap();
        assert!(converged(&z, &z, 1e-3).unwrap());
        assert!(!converged(&z, &a, 1e-3).unwrap());
        let small = Image::filled(2, 2, 8, 0).unwrap();
        assert!(converged(&a, &small, 1.0).is_err());
    }

    #[test]
    fn constant_image_is_fixed_point() {
        for mode in [ArithmeticMode::Float, ArithmeticMode::IntegerRounded] {
            for lambda in [0.3, 1.0, 5.0] {
                let img = Image::filled(9, 7, 8, 77).unwrap();
                let out = tv_denoise(&img, &TvParams::new(lambda, mode).unwrap());
                assert_eq!(out.image, img);
                assert_eq!(out.iterations, 1);
                assert!(out.converged);
            }
        }
    }

    #[test]
    fn max_iters_respected() {
        let img = Image::from_fn(16, 16, 8, |x, y| if (x + y) % 2 == 0 { 0 } else { 255 }).unwrap();
        let params = TvParams::new(1.0, ArithmeticMode::IntegerRounded)
            .unwrap()
            .with_max_iters(3)
            .unwrap();
        let out = tv_denoise(&img, &params);
        assert_eq!(out.iterations, 3);
        assert_eq!(out.ratios.len(), 3);
        assert!(!out.converged);
    }

    #[test]
    fn params_validation() {
        assert!(TvParams::new(0.0, ArithmeticMode::Float).is_err());
        assert!(TvParams::new(f64::NAN, ArithmeticMode::Float).is_err());
        let p = TvParams::new(1.0, ArithmeticMode::Float).unwrap();
        assert!(p.with_epsilon(0.0).is_err());
        assert!(p.with_max_iters(0).is_err());
        assert_eq!(p.epsilon(), DEFAULT_EPSILON);
        assert_eq!(p.max_iters(), DEFAULT_MAX_ITERS);
    }

    #[test]
    fn ratio_trend_window() {
        assert!(ratio_trend_nonincreasing(&[], 5));
        assert!(ratio_trend_nonincreasing(
            &[0.5, 0.2, 0.3, 0.1, 0.15, 0.05, 0.2],
            5
        ));
        assert!(!ratio_trend_nonincreasing(
            &[0.1, 0.1, 0.1, 0.1, 0.1, 0.2],
            5
        ));
        assert!(!ratio_trend_nonincreasing(&[0.1, f64::NAN], 5));
    }
}
