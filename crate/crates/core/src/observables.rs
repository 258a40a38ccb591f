//! Localization diagnostics: probability profile, inverse participation
//! ratio, survival probability, long-time averages and power-law fits.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpinorField;

/// Observables recorded after step `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesRecord {
    pub t: u64,
    pub ipr: f64,
    pub sp: f64,
    pub norm: f64,
}

/// Spin-summed site probabilities `Pₙ = |aₙ|² + |bₙ|²`.
pub fn probability_distribution(field: &SpinorField) -> Vec<f64> {
    field
        .a()
        .iter()
        .zip(field.b())
        .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
        .collect()
}

/// Inverse participation ratio `1 / Σₙ Pₙ²`, the effective number of occupied sites.
pub fn ipr(field: &SpinorField) -> Result<f64> {
    ipr_and_norm_in(field, 0..=field.len() - 1).map(|(ipr, _)| ipr)
}

/// IPR and norm summed over `sites` only. Callers guarantee every amplitude
/// outside `sites` is zero, so the result is identical to the full sum.
pub(crate) fn ipr_and_norm_in(field: &SpinorField, sites: RangeInclusive<usize>) -> Result<(f64, f64)> {
    let (a, b) = (&field.a()[sites.clone()], &field.b()[sites]);
    let (mut norm, mut squares) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let p = x.norm_sqr() + y.norm_sqr();
        norm += p;
        squares += p * p;
    }
    if squares == 0.0 {
        return Err(Error::DegenerateField);
    }
    Ok((1.0 / squares, norm))
}

/// Probability of finding the walker on its starting site.
pub fn survival_probability(field: &SpinorField) -> f64 {
    let o = field.origin();
    field.a()[o].norm_sqr() + field.b()[o].norm_sqr()
}

/// Which steps inside a window enter a long-time average.
///
/// A point source only returns to its origin on even steps: the lattice is
/// bipartite and every step moves each component by one site. Averaging the
/// survival probability over all steps therefore halves it by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    AllSteps,
    /// Only even `t`, the steps on which the origin sublattice is occupied.
    #[default]
    EvenSteps,
}

impl Sampling {
    pub fn includes(self, t: u64) -> bool {
        match self {
            Sampling::AllSteps => true,
            Sampling::EvenSteps => t.is_multiple_of(2),
        }
    }
}

/// Inclusive step interval `[t_start, t_end]` of a long-time average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AveragingWindow {
    pub t_start: u64,
    pub t_end: u64,
    #[serde(default)]
    pub sampling: Sampling,
}

impl AveragingWindow {
    pub fn new(t_start: u64, t_end: u64, sampling: Sampling) -> Result<Self> {
        if t_start >= t_end {
            return Err(Error::invalid(
                "window",
                format!("t_start {t_start} must be below t_end {t_end}"),
            ));
        }
        Ok(Self {
            t_start,
            t_end,
            sampling,
        })
    }

    pub fn contains(&self, t: u64) -> bool {
        (self.t_start..=self.t_end).contains(&t) && self.sampling.includes(t)
    }
}

/// A window given relative to the run length: `[round(start_frac · T), T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub start_frac: f64,
    #[serde(default)]
    pub sampling: Sampling,
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self {
            start_frac: 0.8,
            sampling: Sampling::EvenSteps,
        }
    }
}

impl WindowSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.start_frac) {
            return Err(Error::invalid(
                "window_start_frac",
                format!("{} is outside [0, 1)", self.start_frac),
            ));
        }
        Ok(())
    }

    pub fn resolve(&self, steps: usize) -> Result<AveragingWindow> {
        self.validate()?;
        let t_end = steps as u64;
        let t_start = (self.start_frac * steps as f64).round() as u64;
        AveragingWindow::new(t_start, t_end, self.sampling)
    }
}

/// Mean IPR and survival probability over a window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LongTimeAverages {
    pub ipr_bar: f64,
    pub sp_bar: f64,
    pub window: (u64, u64),
    /// Number of records averaged.
    pub samples: usize,
}

/// Streaming form of [`time_average`]; records may arrive one at a time.
#[derive(Debug, Clone)]
pub struct WindowAccumulator {
    window: AveragingWindow,
    ipr_sum: f64,
    sp_sum: f64,
    samples: usize,
}

impl WindowAccumulator {
    pub fn new(window: AveragingWindow) -> Self {
        Self {
            window,
            ipr_sum: 0.0,
            sp_sum: 0.0,
            samples: 0,
        }
    }

    pub fn wants(&self, t: u64) -> bool {
        self.window.contains(t)
    }

    pub fn push(&mut self, record: &TimeSeriesRecord) {
        if self.wants(record.t) {
            self.ipr_sum += record.ipr;
            self.sp_sum += record.sp;
            self.samples += 1;
        }
    }

    pub fn finish(&self) -> Result<LongTimeAverages> {
        if self.samples == 0 {
            return Err(Error::EmptyWindow {
                start: self.window.t_start,
                end: self.window.t_end,
            });
        }
        let n = self.samples as f64;
        Ok(LongTimeAverages {
            ipr_bar: self.ipr_sum / n,
            sp_bar: self.sp_sum / n,
            window: (self.window.t_start, self.window.t_end),
            samples: self.samples,
        })
    }
}

/// Arithmetic means of `ipr` and `sp` over the records that fall in `window`.
pub fn time_average(series: &[TimeSeriesRecord], window: &AveragingWindow) -> Result<LongTimeAverages> {
    let mut acc = WindowAccumulator::new(*window);
    series.iter().for_each(|r| acc.push(r));
    acc.finish()
}

/// Least-squares line through `(ln t, ln v)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    /// Slope in log-log coordinates.
    pub exponent: f64,
    /// Prefactor `A` of `v ≈ A tᵉ`; the intercept is `ln A`.
    pub amplitude: f64,
    /// RMS residual of the fit in log space.
    pub residual: f64,
    pub points: usize,
}

pub const MIN_FIT_POINTS: usize = 10;

/// Fits `v = A tᵉ` to the samples with `t ≥ t_min`.
pub fn fit_power_law(series: &[(f64, f64)], t_min: f64) -> Result<PowerLawFit> {
    let mut logs = Vec::with_capacity(series.len());
    for &(t, v) in series.iter().filter(|(t, _)| *t >= t_min) {
        if v.is_nan() || t.is_nan() || v <= 0.0 || t <= 0.0 {
            return Err(Error::NonPositive { t, value: v });
        }
        logs.push((t.ln(), v.ln()));
    }
    if logs.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            needed: MIN_FIT_POINTS,
            got: logs.len(),
        });
    }
    let n = logs.len() as f64;
    let x_mean = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let y_mean = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in &logs {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (y - y_mean);
    }
    if sxx == 0.0 {
        return Err(Error::invalid("series", "all sample times coincide"));
    }
    let exponent = sxy / sxx;
    let intercept = y_mean - exponent * x_mean;
    let residual = (logs
        .iter()
        .map(|(x, y)| (y - intercept - exponent * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(PowerLawFit {
        exponent,
        amplitude: intercept.exp(),
        residual,
        points: logs.len(),
    })
}
