//! Support-function estimates from boundary data and hull recovery.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::cauchy::CauchyData;
use crate::geometry::{hausdorff_distance, hull_from_support, regularity_margin, support_function, Direction, Point2, Polygon, SupportSample};
use crate::probe::{geometric_grid, indicator_series, IndicatorSeries, FEM_TAU_CAP};
use crate::spectrum::line_fit;

/// Regression model for `log|I(τ, t)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FitModel {
    /// `log|I| = c + sτ`.
    Linear,
    /// `log|I| = c + sτ − m log τ` with the power `m` held fixed, which
    /// removes the leading `log τ / τ` bias of the linear model.
    LogCorrected { m: f64 },
}

/// Tunable parameters of the support estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub taus: Vec<f64>,
    /// Samples above this τ are never used.
    pub tau_cap: f64,
    pub t: f64,
    pub model: FitModel,
    pub min_r2: f64,
    pub min_samples: usize,
    /// Slope magnitude separating "grows"/"decays" from "indeterminate".
    pub rate_tol: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            taus: geometric_grid(3.0, 9.0, 24),
            tau_cap: FEM_TAU_CAP,
            t: 0.0,
            model: FitModel::LogCorrected { m: 1.0 },
            min_r2: 0.99,
            min_samples: 8,
            rate_tol: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateStatus {
    Ok,
    Indeterminate,
}

/// Support estimate in one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportEstimate {
    pub direction: Direction,
    pub h_hat: f64,
    /// Fitted exponential rate, `h_hat − t`.
    pub slope: f64,
    pub window: (f64, f64),
    pub r_squared: f64,
    pub samples_used: usize,
    pub status: EstimateStatus,
    /// Distance of the direction from non-regularity, when the truth is known.
    pub regular_margin: Option<f64>,
}

/// Slope `s` and `r²` of the chosen model over `(τ, log|I|)` pairs.
fn fit_rate(model: FitModel, taus: &[f64], logs: &[f64]) -> (f64, f64, f64) {
    match model {
        FitModel::Linear => line_fit(taus, logs),
        FitModel::LogCorrected { m } => {
            let y: Vec<f64> = taus.iter().zip(logs).map(|(t, l)| l + m * t.ln()).collect();
            line_fit(taus, &y)
        }
    }
}

/// Usable part of a series: trusted samples with positive modulus.
fn usable(series: &IndicatorSeries) -> (Vec<f64>, Vec<f64>) {
    series
        .samples
        .iter()
        .filter(|s| s.trusted() && s.abs() > 0.0)
        .map(|s| (s.tau, s.abs().ln()))
        .unzip()
}

/// Fits a series already computed at shift `t`.
pub fn estimate_from_series(series: &IndicatorSeries, cfg: &EstimatorConfig) -> Result<SupportEstimate> {
    let (taus, logs) = usable(series);
    if taus.is_empty() {
        return Err(Error::Signal(format!(
            "all samples below the noise floor at phi = {}",
            series.direction.angle()
        )));
    }
    let n = taus.len();
    let (window, slope, r2) = if n >= 2 {
        let (_, s, r2) = fit_rate(cfg.model, &taus, &logs);
        ((taus[0], taus[n - 1]), s, r2)
    } else {
        ((taus[0], taus[0]), f64::NAN, 0.0)
    };
    let ok = n >= cfg.min_samples.max(2) && r2 >= cfg.min_r2 && slope.is_finite();
    Ok(SupportEstimate {
        direction: series.direction,
        h_hat: series.t + slope,
        slope,
        window,
        r_squared: r2,
        samples_used: n,
        status: if ok { EstimateStatus::Ok } else { EstimateStatus::Indeterminate },
        regular_margin: None,
    })
}

/// `ĥ(ω) = t + slope of log|I(τ, t)|` over the usable window.
pub fn estimate_support(cd: &CauchyData, d: Direction, cfg: &EstimatorConfig) -> Result<SupportEstimate> {
    if cfg.taus.len() < cfg.min_samples {
        return Err(Error::Config(format!(
            "tau grid has {} points, need at least {}",
            cfg.taus.len(),
            cfg.min_samples
        )));
    }
    let series = indicator_series(cd, d, cfg.t, &cfg.taus)?.capped(cfg.tau_cap);
    estimate_from_series(&series, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Decays,
    Grows,
    Indeterminate,
}

/// Classifies `t` against the decay set `[h_D(ω), ∞)`.
///
/// The exponential rate is read off the usable samples with the configured
/// model, so it equals `ĥ(ω) − t`. A shift exactly at `h_D(ω)` decays only
/// like a power of τ and lands in the band `|rate| ≤ rate_tol`, which is
/// reported as indeterminate. Since the rate moves rigidly with `t`, the
/// decaying shifts always form a right half-line.
pub fn classify_side(cd: &CauchyData, d: Direction, t: f64, cfg: &EstimatorConfig) -> Result<Side> {
    let series = indicator_series(cd, d, t, &cfg.taus)?.capped(cfg.tau_cap);
    Ok(classify_series(&series, cfg))
}

pub fn classify_series(series: &IndicatorSeries, cfg: &EstimatorConfig) -> Side {
    let (taus, logs) = usable(series);
    if taus.len() < cfg.min_samples.max(2) {
        return Side::Indeterminate;
    }
    let (_, slope, _) = fit_rate(cfg.model, &taus, &logs);
    if slope > cfg.rate_tol {
        Side::Grows
    } else if slope < -cfg.rate_tol {
        Side::Decays
    } else {
        Side::Indeterminate
    }
}

/// Error metrics against a known inclusion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullMetrics {
    pub hausdorff: f64,
    /// `ĥ − h_D` per estimate, in sweep order; `null` for indeterminate directions.
    pub support_errors: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HullResult {
    pub hull: Polygon,
    pub estimates: Vec<SupportEstimate>,
    pub metrics: Option<HullMetrics>,
}

#[derive(Serialize, Deserialize)]
struct EstimateDoc {
    phi: f64,
    h_hat: f64,
    r2: f64,
    window: [f64; 2],
    status: EstimateStatus,
}

#[derive(Serialize, Deserialize)]
struct HullDoc {
    hull: Vec<Point2>,
    estimates: Vec<EstimateDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    metrics: Option<HullMetrics>,
}

impl HullResult {
    pub fn to_json(&self) -> String {
        let doc = HullDoc {
            hull: self.hull.vertices().to_vec(),
            estimates: self
                .estimates
                .iter()
                .map(|e| EstimateDoc {
                    phi: e.direction.angle(),
                    h_hat: e.h_hat,
                    r2: e.r_squared,
                    window: [e.window.0, e.window.1],
                    status: e.status,
                })
                .collect(),
            metrics: self.metrics.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("hull result serializes")
    }

    pub fn usable_count(&self) -> usize {
        self.estimates.iter().filter(|e| e.status == EstimateStatus::Ok).count()
    }
}

/// Sweeps `n_directions` uniform angles, estimates the support in each,
/// drops indeterminate directions and intersects the remaining half-planes.
pub fn reconstruct_hull(
    cd: &CauchyData,
    n_directions: usize,
    cfg: &EstimatorConfig,
    truth: Option<&Polygon>,
) -> Result<HullResult> {
    if n_directions < 8 {
        return Err(Error::Config(format!("need at least 8 directions, got {n_directions}")));
    }
    let dirs = Direction::uniform(n_directions);
    let estimates: Vec<SupportEstimate> = dirs
        .par_iter()
        .map(|&d| -> Result<SupportEstimate> {
            let mut e = match estimate_support(cd, d, cfg) {
                Ok(e) => e,
                Err(Error::Signal(_)) => SupportEstimate {
                    direction: d,
                    h_hat: f64::NAN,
                    slope: f64::NAN,
                    window: (f64::NAN, f64::NAN),
                    r_squared: 0.0,
                    samples_used: 0,
                    status: EstimateStatus::Indeterminate,
                    regular_margin: None,
                },
                Err(e) => return Err(e),
            };
            e.regular_margin = truth.map(|p| regularity_margin(p, d));
            Ok(e)
        })
        .collect::<Result<Vec<_>>>()?;
    let samples: Vec<SupportSample> = estimates
        .iter()
        .filter(|e| e.status == EstimateStatus::Ok)
        .map(|e| SupportSample {
            direction: e.direction,
            h: e.h_hat,
        })
        .collect();
    if samples.len() < 3 {
        return Err(Error::Coverage(format!(
            "only {} of {n_directions} directions gave a usable estimate",
            samples.len()
        )));
    }
    let hull = hull_from_support(&samples)?;
    let metrics = truth.map(|p| HullMetrics {
        hausdorff: hausdorff_distance(&hull, p),
        support_errors: estimates
            .iter()
            .map(|e| (e.status == EstimateStatus::Ok).then(|| e.h_hat - support_function(p, e.direction)))
            .collect(),
    });
    Ok(HullResult { hull, estimates, metrics })
}

/// Adds `N(0, (rel_level · max|u|)²)` to every voltage sample; the current is
/// left exact. Repeated corner nodes receive the same perturbation.
pub fn add_noise(cd: &CauchyData, rel_level: f64, seed: u64) -> Result<CauchyData> {
    if !(rel_level >= 0.0) || !rel_level.is_finite() {
        return Err(Error::Config(format!("noise level must be non-negative, got {rel_level}")));
    }
    if rel_level == 0.0 {
        return Ok(cd.clone());
    }
    let sigma = rel_level * cd.max_abs_u();
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::Config(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = cd.clone();
    let mut last = 0.0;
    for i in 0..out.len() {
        if i == 0 || out.boundary_nodes[i] != out.boundary_nodes[i - 1] {
            last = normal.sample(&mut rng);
        }
        out.u[i] += last;
    }
    let n = out.len();
    if n > 1 && out.boundary_nodes[n - 1] == out.boundary_nodes[0] {
        out.u[n - 1] = cd.u[n - 1] + (out.u[0] - cd.u[0]);
    }
    let prior = cd.noise_std.unwrap_or(0.0);
    out.noise_std = Some(prior.hypot(sigma));
    Ok(out)
}
