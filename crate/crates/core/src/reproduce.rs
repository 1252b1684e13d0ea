//! Reference RMSE tables and the harness that re-measures them.
//!
//! Each figure pairs one asset with one noise family at three levels. A run
//! corrupts the asset with seeded noise, sweeps lambda for float TV and for
//! QTV, and reports the best RMSE of each next to the reference values.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::assets::Asset;
use crate::degrade::{error_rate, lambda_sweep, DegradeError, NoiseSpec, Solver, SweepEntry};
use crate::image::Image;
use crate::pipeline::rmse;
use crate::tv::{ArithmeticMode, TvParams};

/// Lambdas for the integer solvers, in raw intensity units.
pub const INT_LAMBDAS: [f64; 16] = [
    0.025, 0.035, 0.05, 0.075, 0.1, 0.15, 0.2, 0.25, 0.33, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0,
];

/// Lambdas for float TV, in normalised units.
pub const FLOAT_LAMBDAS: [f64; 24] = [
    0.3, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0, 7.5, 10.0, 15.0, 20.0, 30.0, 50.0, 75.0, 100.0, 150.0,
    200.0, 300.0, 500.0, 750.0, 1000.0, 1500.0, 2000.0,
];

pub const DEFAULT_SEED: u64 = 2024;
pub const DEFAULT_TOLERANCE: f64 = 0.15;
pub const SCALED_SIDE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Figure {
    LenaAwgn,
    CameramanAwgn,
    QrAwgn,
    LenaSpn,
    CameramanSpn,
    QrSpn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseFamily {
    Awgn,
    Spn,
}

/// One reference row: noise level and the reported TV and QTV RMSE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceRow {
    pub level: f64,
    pub tv: f64,
    pub qtv: f64,
}

const fn row(level: f64, tv: f64, qtv: f64) -> ReferenceRow {
    ReferenceRow { level, tv, qtv }
}

impl Figure {
    pub const ALL: [Figure; 6] = [
        Figure::LenaAwgn,
        Figure::CameramanAwgn,
        Figure::QrAwgn,
        Figure::LenaSpn,
        Figure::CameramanSpn,
        Figure::QrSpn,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Figure::LenaAwgn => "lena-awgn",
            Figure::CameramanAwgn => "cameraman-awgn",
            Figure::QrAwgn => "qr-awgn",
            Figure::LenaSpn => "lena-spn",
            Figure::CameramanSpn => "cameraman-spn",
            Figure::QrSpn => "qr-spn",
        }
    }

    pub fn asset(&self) -> Asset {
        match self {
            Figure::LenaAwgn | Figure::LenaSpn => Asset::Portrait,
            Figure::CameramanAwgn | Figure::CameramanSpn => Asset::Cameraman,
            Figure::QrAwgn | Figure::QrSpn => Asset::QrCode,
        }
    }

    pub fn family(&self) -> NoiseFamily {
        match self {
            Figure::LenaAwgn | Figure::CameramanAwgn | Figure::QrAwgn => NoiseFamily::Awgn,
            _ => NoiseFamily::Spn,
        }
    }

    pub fn reference(&self) -> [ReferenceRow; 3] {
        match self {
            Figure::LenaAwgn => [
                row(5.0, 4.30, 7.21),
                row(10.0, 7.41, 8.80),
                row(15.0, 9.94, 10.49),
            ],
            Figure::CameramanAwgn => [
                row(5.0, 3.86, 5.99),
                row(10.0, 6.87, 8.14),
                row(15.0, 9.24, 10.98),
            ],
            Figure::QrAwgn => [
                row(5.0, 2.35, 2.38),
                row(10.0, 4.71, 4.71),
                row(15.0, 7.21, 7.22),
            ],
            Figure::LenaSpn => [
                row(5.0, 11.72, 11.95),
                row(10.0, 13.05, 13.28),
                row(30.0, 20.22, 20.71),
            ],
            Figure::CameramanSpn => [
                row(5.0, 15.67, 16.05),
                row(10.0, 16.91, 17.56),
                row(30.0, 25.23, 25.75),
            ],
            Figure::QrSpn => [
                row(5.0, 11.31, 11.46),
                row(10.0, 19.47, 19.50),
                row(30.0, 40.16, 40.25),
            ],
        }
    }

    pub fn noise(&self, level: f64, seed: u64) -> NoiseSpec {
        match self.family() {
            NoiseFamily::Awgn => NoiseSpec::awgn(level, seed),
            NoiseFamily::Spn => NoiseSpec::spn(level, seed),
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown figure {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReproConfig {
    pub seed: u64,
    /// Crop the asset centre to 64x64.
    pub scaled: bool,
    /// Restrict to these noise levels; all reference rows when `None`.
    pub levels: Option<Vec<f64>>,
    pub int_lambdas: Vec<f64>,
    pub float_lambdas: Vec<f64>,
    pub epsilon: f64,
    pub max_iters: usize,
    pub tolerance: f64,
}

impl Default for ReproConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            scaled: false,
            levels: None,
            int_lambdas: INT_LAMBDAS.to_vec(),
            float_lambdas: FLOAT_LAMBDAS.to_vec(),
            epsilon: crate::tv::DEFAULT_EPSILON,
            max_iters: crate::tv::DEFAULT_MAX_ITERS,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverResult {
    pub reference: f64,
    pub best: SweepEntry,
    pub relative_error: f64,
    pub within: bool,
}

impl SolverResult {
    fn new(reference: f64, best: SweepEntry, tolerance: f64) -> Self {
        let relative_error = (best.rmse - reference) / reference;
        Self {
            reference,
            relative_error,
            within: relative_error.abs() <= tolerance,
            best,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproRow {
    pub figure: Figure,
    pub asset: Asset,
    pub noise: NoiseSpec,
    pub width: usize,
    pub height: usize,
    pub noisy_rmse: f64,
    pub error_rate: f64,
    pub tv: SolverResult,
    pub qtv: SolverResult,
}

impl ReproRow {
    pub fn level(&self) -> f64 {
        match self.noise.kind {
            crate::degrade::NoiseKind::Awgn { sigma } => sigma,
            crate::degrade::NoiseKind::Spn { rate } => rate,
        }
    }
}

pub fn source_image(asset: Asset, scaled: bool) -> Image {
    let img = asset.load();
    if scaled {
        img.crop_center(SCALED_SIDE, SCALED_SIDE)
            .expect("asset is larger than the crop")
    } else {
        img
    }
}

/// Runs one reference row.
pub fn reproduce_row(
    fig: Figure,
    reference: ReferenceRow,
    cfg: &ReproConfig,
) -> Result<ReproRow, DegradeError> {
    let clean = source_image(fig.asset(), cfg.scaled);
    let noise = fig.noise(reference.level, cfg.seed);
    let noisy = noise.apply(&clean)?;
    let float = TvParams::new(1.0, ArithmeticMode::Float)?
        .with_epsilon(cfg.epsilon)?
        .with_max_iters(cfg.max_iters)?;
    let int = TvParams::new(1.0, ArithmeticMode::IntegerRounded)?
        .with_epsilon(cfg.epsilon)?
        .with_max_iters(cfg.max_iters)?;
    let tv = lambda_sweep(&noisy, &clean, Solver::Tv, &float, &cfg.float_lambdas)?;
    let qtv = lambda_sweep(&noisy, &clean, Solver::Qtv, &int, &cfg.int_lambdas)?;
    Ok(ReproRow {
        figure: fig,
        asset: fig.asset(),
        noise,
        width: clean.width(),
        height: clean.height(),
        noisy_rmse: rmse(&noisy, &clean)?,
        error_rate: error_rate(&clean, &noisy)?,
        tv: SolverResult::new(reference.tv, tv.best, cfg.tolerance),
        qtv: SolverResult::new(reference.qtv, qtv.best, cfg.tolerance),
    })
}

/// Runs every selected row of a figure.
pub fn reproduce(fig: Figure, cfg: &ReproConfig) -> Result<Vec<ReproRow>, DegradeError> {
    fig.reference()
        .into_iter()
        .filter(|r| cfg.levels.as_ref().is_none_or(|ls| ls.contains(&r.level)))
        .map(|r| reproduce_row(fig, r, cfg))
        .collect()
}

/// Plain-text table of reference and measured values.
pub fn format_table(rows: &[ReproRow]) -> String {
    let mut s = String::from(
        "figure          level  noisy   tv_ref  tv      tv_lambda  qtv_ref  qtv     qtv_lambda  iters(tv/qtv)\n",
    );
    for r in rows {
        s.push_str(&format!(
            "{:<15} {:>5} {:>6.2}  {:>6.2}  {:>6.2}  {:>9}  {:>7.2}  {:>6.2}  {:>10}  {}/{}\n",
            r.figure.name(),
            r.level(),
            r.noisy_rmse,
            r.tv.reference,
            r.tv.best.rmse,
            r.tv.best.lambda,
            r.qtv.reference,
            r.qtv.best.rmse,
            r.qtv.best.lambda,
            r.tv.best.iterations,
            r.qtv.best.iterations,
        ));
    }
    s
}

pub fn to_csv(rows: &[ReproRow]) -> String {
    let mut s = String::from(
        "figure,level,seed,noisy_rmse,error_rate,tv_ref,tv_rmse,tv_lambda,tv_iters,qtv_ref,qtv_rmse,qtv_lambda,qtv_iters\n",
    );
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{:.4},{:.4},{},{:.4},{},{},{},{:.4},{},{}\n",
            r.figure.name(),
            r.level(),
            r.noise.seed,
            r.noisy_rmse,
            r.error_rate,
            r.tv.reference,
            r.tv.best.rmse,
            r.tv.best.lambda,
            r.tv.best.iterations,
            r.qtv.reference,
            r.qtv.best.rmse,
            r.qtv.best.lambda,
            r.qtv.best.iterations,
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_names_round_trip() {
        for f in Figure::ALL {
            assert_eq!(f.name().parse::<Figure>().unwrap(), f);
        }
        assert!("lena".parse::<Figure>().is_err());
    }

    #[test]
    fn reference_values() {
        let qr = Figure::QrAwgn.reference()[1];
        assert_eq!((qr.level, qr.tv, qr.qtv), (10.0, 4.71, 4.71));
        let lena = Figure::LenaSpn.reference()[1];
        assert_eq!((lena.tv, lena.qtv), (13.05, 13.28));
        assert_eq!(Figure::CameramanAwgn.reference()[2].qtv, 10.98);
        assert_eq!(Figure::CameramanSpn.family(), NoiseFamily::Spn);
        assert_eq!(Figure::QrSpn.asset(), Asset::QrCode);
    }

    #[test]
    fn scaled_row_runs() {
        let cfg = ReproConfig {
            scaled: true,
            levels: Some(vec![10.0]),
            int_lambdas: vec![0.5, 1.0],
            float_lambdas: vec![50.0, 100.0],
            max_iters: 5,
            ..ReproConfig::default()
        };
        let rows = reproduce(Figure::QrAwgn, &cfg).unwrap();
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert_eq!((r.width, r.height), (64, 64));
        assert!(r.tv.best.rmse < r.noisy_rmse);
        assert!(r.qtv.best.rmse < r.noisy_rmse);
        assert!(format_table(&rows).contains("qr-awgn"));
        assert_eq!(to_csv(&rows).lines().count(), 2);
    }
}
