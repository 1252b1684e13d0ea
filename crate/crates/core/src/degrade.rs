//! Seeded noise models, error-rate accounting and the lambda sweep harness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::image::{clamp_pixel_f64, Image, ImageError};
use crate::pipeline::{qtv_denoise, rmse, PipelineError};
use crate::tv::{tv_denoise, ArithmeticMode, TvError, TvParams};

#[derive(Debug, Error)]
pub enum DegradeError {
    #[error("sigma must be positive and finite, got {0}")]
    Sigma(f64),
    #[error("error rate must lie in [0, 100], got {0}")]
    Rate(f64),
    #[error("lambda list is empty")]
    EmptySweep,
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Tv(#[from] TvError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NoiseKind {
    /// Gaussian noise, `sigma` in intensity units.
    Awgn { sigma: f64 },
    /// Salt and pepper, `rate` in percent.
    Spn { rate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    #[serde(flatten)]
    pub kind: NoiseKind,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn awgn(sigma: f64, seed: u64) -> Self {
        Self {
            kind: NoiseKind::Awgn { sigma },
            seed,
        }
    }

    pub fn spn(rate: f64, seed: u64) -> Self {
        Self {
            kind: NoiseKind::Spn { rate },
            seed,
        }
    }

    pub fn apply(&self, img: &Image) -> Result<Image, DegradeError> {
        match self.kind {
            NoiseKind::Awgn { sigma } => apply_awgn(img, sigma, self.seed),
            NoiseKind::Spn { rate } => apply_spn(img, rate, self.seed),
        }
    }
}

/// Adds `N(0, sigma^2)` per pixel, then rounds and clamps.
pub fn apply_awgn(img: &Image, sigma: f64, seed: u64) -> Result<Image, DegradeError> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(DegradeError::Sigma(sigma));
    }
    let normal = Normal::new(0.0, sigma).map_err(|_| DegradeError::Sigma(sigma))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = img.bit_depth();
    let px = img
        .pixels()
        .iter()
        .map(|&v| clamp_pixel_f64(v as f64 + normal.sample(&mut rng), q))
        .collect();
    Ok(Image::new(img.width(), img.height(), q, px)?)
}

/// Replaces each pixel with probability `rate / 100` by 0 or the maximum
/// value, each with probability one half.
pub fn apply_spn(img: &Image, rate: f64, seed: u64) -> Result<Image, DegradeError> {
    if !(0.0..=100.0).contains(&rate) {
        return Err(DegradeError::Rate(rate));
    }
    let p = rate / 100.0;
    let max = img.max_value();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let px = img
        .pixels()
        .iter()
        .map(|&v| {
            if rng.random_bool(p) {
                if rng.random_bool(0.5) {
                    max
                } else {
                    0
                }
            } else {
                v
            }
        })
        .collect();
    Ok(Image::new(img.width(), img.height(), img.bit_depth(), px)?)
}

/// Percentage of pixels that differ.
pub fn error_rate(clean: &Image, noisy: &Image) -> Result<f64, ImageError> {
    clean.same_shape(noisy)?;
    let diff = clean
        .pixels()
        .iter()
        .zip(noisy.pixels())
        .filter(|(a, b)| a != b)
        .count();
    Ok(100.0 * diff as f64 / clean.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Tv,
    Qtv,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepEntry {
    pub lambda: f64,
    pub rmse: f64,
    pub iterations: usize,
    pub converged: bool,
    pub ratios: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub solver: Solver,
    pub mode: ArithmeticMode,
    pub best: SweepEntry,
    pub table: Vec<SweepEntry>,
    #[serde(skip)]
    pub best_image: Image,
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("lambda,rmse,iterations,converged\n");
        for e in &self.table {
            s.push_str(&format!(
                "{},{:.4},{},{}\n",
                e.lambda, e.rmse, e.iterations, e.converged
            ));
        }
        s
    }
}

/// Denoises `noisy` once per lambda and keeps the one with the lowest RMSE
/// against `clean`. `base` supplies the mode, epsilon and iteration cap.
pub fn lambda_sweep(
    noisy: &Image,
    clean: &Image,
    solver: Solver,
    base: &TvParams,
    lambdas: &[f64],
) -> Result<SweepResult, DegradeError> {
    if lambdas.is_empty() {
        return Err(DegradeError::EmptySweep);
    }
    noisy.same_shape(clean)?;
    let runs = lambdas
        .par_iter()
        .map(|&lambda| {
            let params = base.with_lambda(lambda)?;
            let out = match solver {
                Solver::Tv => tv_denoise(noisy, &params),
                Solver::Qtv => qtv_denoise(noisy, &params)?,
            };
            let entry = SweepEntry {
                lambda,
                rmse: rmse(&out.image, clean)?,
                iterations: out.iterations,
                converged: out.converged,
                ratios: out.ratios,
            };
            Ok((entry, out.image))
        })
        .collect::<Result<Vec<_>, DegradeError>>()?;
    let best = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .0.rmse.total_cmp(&b.1 .0.rmse))
        .map(|(i, _)| i)
        .expect("nonempty");
    let best_image = runs[best].1.clone();
    let table: Vec<_> = runs.into_iter().map(|(e, _)| e).collect();
    Ok(SweepResult {
        solver,
        mode: base.mode(),
        best: table[best].clone(),
        table,
        best_image,
    })
}
