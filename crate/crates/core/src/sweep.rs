//! χ–θ phase diagrams: a grid of independent walks reduced to long-time
//! averages, a normalized IPR and a dynamical regime per cell.
//!
//! Cells are farmed out to a dedicated rayon pool. Results are placed by cell
//! index, so the table is identical for any worker count.

use std::f64::consts::TAU;
use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{InitialState, WalkParams, DEFAULT_MARGIN};
use crate::observables::{AveragingWindow, LongTimeAverages, WindowAccumulator, WindowSpec};
use crate::walk::Walker;

/// Inclusive linear grid `min, …, max` with `count` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisRange {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count }
    }

    fn validate(&self, field: &'static str, lower: f64, upper: f64) -> Result<()> {
        if self.count < 2 {
            return Err(Error::invalid(field, format!("count {} must be at least 2", self.count)));
        }
        if self.min.is_nan() || self.max.is_nan() || self.min >= self.max {
            return Err(Error::invalid(field, format!("min {} must be below max {}", self.min, self.max)));
        }
        if self.min < lower || self.max > upper {
            return Err(Error::invalid(
                field,
                format!("[{}, {}] is outside [{lower}, {upper}]", self.min, self.max),
            ));
        }
        Ok(())
    }

    /// Grid points, computed from whichever end is nearer so that both
    /// endpoints are exact.
    pub fn points(&self) -> Vec<f64> {
        let last = self.count - 1;
        let span = self.max - self.min;
        (0..self.count)
            .map(|i| {
                if 2 * i <= last {
                    self.min + span * (i as f64 / last as f64)
                } else {
                    self.max - span * ((last - i) as f64 / last as f64)
                }
            })
            .collect()
    }

    /// Grid points with `pᵢ + p₍ₙ₋₁₋ᵢ₎ == min + max` exactly.
    ///
    /// When both endpoints lie on the lattice of multiples of 2⁻⁵⁰ (as `0`
    /// and `π` do) the lower half is snapped onto that lattice, which moves
    /// each point by at most 4.5e-16, and the upper half is its exact
    /// reflection. Otherwise this falls back to [`AxisRange::points`].
    pub fn mirrored_points(&self) -> Vec<f64> {
        let on_lattice = |x: f64| x.abs() < 8.0 && (x / MIRROR_QUANTUM).fract() == 0.0;
        if !(on_lattice(self.min) && on_lattice(self.max) && on_lattice(self.min + self.max)) {
            return self.points();
        }
        let mut pts = self.points();
        let last = self.count - 1;
        let centre = self.min + self.max;
        for i in 0..self.count {
            if 2 * i < last {
                pts[i] = (pts[i] / MIRROR_QUANTUM).round() * MIRROR_QUANTUM;
            } else if 2 * i > last {
                pts[i] = centre - pts[last - i];
            } else {
                pts[i] = centre / 2.0;
            }
        }
        pts
    }
}

/// Lattice spacing for [`AxisRange::mirrored_points`]; every multiple below 8
/// is an `f64`, so sums and differences of such points are exact.
const MIRROR_QUANTUM: f64 = 1.0 / (1u64 << 50) as f64;

/// Cut-offs of [`RegimeThresholds::classify`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeThresholds {
    /// `sp_bar` at or above which a cell is self-trapped.
    pub self_trapped_sp: f64,
    /// `ipr_norm` at or above which a cell is spreading.
    pub spreading_ipr: f64,
    /// Neighbour variability at or above which a cell is chaotic-like.
    pub chaotic_variability: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self {
            self_trapped_sp: 0.5,
            spreading_ipr: 0.5,
            chaotic_variability: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Delocalized, dispersion-dominated walk.
    Spreading,
    /// Localized packets travelling away from the origin.
    MobileSoliton,
    /// Outcome varies strongly between neighbouring χ or θ.
    ChaoticLike,
    /// Walker pinned to its start site.
    SelfTrapped,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Spreading => "spreading",
            Regime::MobileSoliton => "mobile_soliton",
            Regime::ChaoticLike => "chaotic_like",
            Regime::SelfTrapped => "self_trapped",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Regime::Spreading, Regime::MobileSoliton, Regime::ChaoticLike, Regime::SelfTrapped]
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::invalid("regime", format!("unknown regime `{s}`")))
    }
}

impl RegimeThresholds {
    /// The neighbour variability stands in for sensitivity to small parameter
    /// changes; it is a proxy, not a Lyapunov-type measure.
    pub fn classify(&self, ipr_norm: f64, sp_bar: f64, variability: f64) -> Regime {
        if sp_bar >= self.self_trapped_sp {
            Regime::SelfTrapped
        } else if ipr_norm >= self.spreading_ipr {
            Regime::Spreading
        } else if variability >= self.chaotic_variability {
            Regime::ChaoticLike
        } else {
            Regime::MobileSoliton
        }
    }
}

/// [`RegimeThresholds::classify`] with the default thresholds.
pub fn classify_regime(ipr_norm: f64, sp_bar: f64, variability: f64) -> Regime {
    RegimeThresholds::default().classify(ipr_norm, sp_bar, variability)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub theta: AxisRange,
    pub chi: AxisRange,
    pub steps: usize,
    pub initial: InitialState,
    #[serde(default = "default_margin")]
    pub margin: usize,
    #[serde(default)]
    pub window: WindowSpec,
    #[serde(default)]
    pub thresholds: RegimeThresholds,
}

fn default_margin() -> usize {
    DEFAULT_MARGIN
}

impl SweepSpec {
    /// A spec over `θ ∈ [0, π]`, `χ ∈ [0, 2]` with default window and thresholds.
    pub fn new(theta_count: usize, chi_count: usize, steps: usize, initial: InitialState) -> Self {
        Self {
            theta: AxisRange::new(0.0, std::f64::consts::PI, theta_count),
            chi: AxisRange::new(0.0, 2.0, chi_count),
            steps,
            initial,
            margin: DEFAULT_MARGIN,
            window: WindowSpec::default(),
            thresholds: RegimeThresholds::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.theta.validate("theta_range", 0.0, TAU)?;
        self.chi.validate("chi_range", 0.0, f64::INFINITY)?;
        if self.steps == 0 {
            return Err(Error::invalid("steps", "must be at least 1"));
        }
        self.window.resolve(self.steps)?;
        WalkParams::new(self.theta.min, self.chi.min, self.steps, self.initial)
            .with_margin(self.margin)
            .validate()
    }

    pub fn cell_count(&self) -> usize {
        self.theta.count * self.chi.count
    }

    /// `(θ, χ)` for every cell, row-major with θ outer and χ inner.
    ///
    /// The θ axis uses [`AxisRange::mirrored_points`], so a grid over `[0, π]`
    /// pairs every `θ` with an exact `π − θ`.
    pub fn coordinates(&self) -> Vec<(f64, f64)> {
        let chis = self.chi.points();
        self.theta
            .mirrored_points()
            .into_iter()
            .flat_map(|theta| chis.iter().map(move |&chi| (theta, chi)))
            .collect()
    }

    fn params(&self, theta: f64, chi: f64) -> WalkParams {
        WalkParams::new(theta, chi, self.steps, self.initial).with_margin(self.margin)
    }
}

/// Long-time averages of a single cell, before grid-wide normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellAverages {
    pub theta: f64,
    pub chi: f64,
    pub ipr_bar: f64,
    pub sp_bar: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub theta: f64,
    pub chi: f64,
    pub ipr_bar: f64,
    pub sp_bar: f64,
    /// `ipr_bar` over the grid-wide maximum.
    pub ipr_norm: f64,
    /// RMS difference of `sp_bar` against the adjacent cells.
    pub variability: f64,
    pub regime: Regime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub spec: SweepSpec,
    pub window: AveragingWindow,
    /// Row-major, θ outer and χ inner.
    pub cells: Vec<SweepCell>,
    /// Index of the cell holding the maximum `ipr_bar` (first one on ties).
    pub argmax: usize,
}

impl SweepTable {
    pub fn cell(&self, theta_index: usize, chi_index: usize) -> &SweepCell {
        &self.cells[theta_index * self.spec.chi.count + chi_index]
    }
}

/// Evolves one walk and averages its observables over `window`.
pub fn cell_averages(params: &WalkParams, window: &AveragingWindow) -> Result<LongTimeAverages> {
    let mut acc = WindowAccumulator::new(*window);
    let mut failure = None;
    let mut walker = Walker::new(params)?;
    for _ in 0..params.steps {
        walker.step()?;
        let view = walker.view();
        if acc.wants(view.t) {
            match view.record() {
                Ok(record) => acc.push(&record),
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }
    }
    match failure {
        Some(e) => Err(e),
        None => acc.finish(),
    }
}

/// Runs every cell of `spec` on `workers` threads.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<SweepTable> {
    run_sweep_with(spec, workers, cell_averages)
}

/// [`run_sweep`] with a custom per-cell evaluator.
pub fn run_sweep_with<F>(spec: &SweepSpec, workers: usize, evaluate: F) -> Result<SweepTable>
where
    F: Fn(&WalkParams, &AveragingWindow) -> Result<LongTimeAverages> + Sync,
{
    spec.validate()?;
    if workers == 0 {
        return Err(Error::invalid("workers", "must be at least 1"));
    }
    let window = spec.window.resolve(spec.steps)?;
    let coords = spec.coordinates();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?;

    let aborted = AtomicBool::new(false);
    let outcomes: Vec<Option<Result<CellAverages>>> = pool.install(|| {
        coords
            .par_iter()
            .map(|&(theta, chi)| {
                if aborted.load(Ordering::Relaxed) {
                    return None;
                }
                let outcome = evaluate(&spec.params(theta, chi), &window).map(|avg| CellAverages {
                    theta,
                    chi,
                    ipr_bar: avg.ipr_bar,
                    sp_bar: avg.sp_bar,
                });
                if outcome.is_err() {
                    aborted.store(true, Ordering::Relaxed);
                }
                Some(outcome)
            })
            .collect()
    });

    let mut averages = Vec::with_capacity(outcomes.len());
    let mut first_failure = None;
    for (outcome, &(theta, chi)) in outcomes.into_iter().zip(&coords) {
        match outcome {
            Some(Ok(cell)) => averages.push(cell),
            Some(Err(e)) if first_failure.is_none() => first_failure = Some((theta, chi, e)),
            _ => {}
        }
    }
    if let Some((theta, chi, source)) = first_failure {
        return Err(Error::Cell {
            theta,
            chi,
            source: Box::new(source),
            partial: averages,
        });
    }

    let (cells, argmax) = assemble(spec, &averages);
    Ok(SweepTable {
        spec: *spec,
        window,
        cells,
        argmax,
    })
}

/// Normalizes the IPR, measures neighbour variability and classifies each cell.
fn assemble(spec: &SweepSpec, averages: &[CellAverages]) -> (Vec<SweepCell>, usize) {
    let argmax = averages
        .iter()
        .enumerate()
        .fold(0, |best, (i, c)| if c.ipr_bar > averages[best].ipr_bar { i } else { best });
    let max_ipr = averages[argmax].ipr_bar;
    let (rows, cols) = (spec.theta.count, spec.chi.count);

    let cells = averages
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            let (r, k) = (idx / cols, idx % cols);
            let neighbours = [
                (r > 0).then(|| idx - cols),
                (r + 1 < rows).then(|| idx + cols),
                (k > 0).then(|| idx - 1),
                (k + 1 < cols).then(|| idx + 1),
            ];
            let (sum, n) = neighbours
                .into_iter()
                .flatten()
                .fold((0.0, 0usize), |(sum, n), j| {
                    (sum + (c.sp_bar - averages[j].sp_bar).powi(2), n + 1)
                });
            let variability = if n == 0 { 0.0 } else { (sum / n as f64).sqrt() };
            let ipr_norm = c.ipr_bar / max_ipr;
            SweepCell {
                theta: c.theta,
                chi: c.chi,
                ipr_bar: c.ipr_bar,
                sp_bar: c.sp_bar,
                ipr_norm,
                variability,
                regime: spec.thresholds.classify(ipr_norm, c.sp_bar, variability),
            }
        })
        .collect();
    (cells, argmax)
}
