//! Nonlinear discrete-time quantum walks on an open one-dimensional chain.
//!
//! The walker is a two-component spinor field. Each time step applies a
//! Kerr-like phase `exp(i 2πχ |ψ|²)` to every spinor component, then the
//! coin `[[cos θ, sin θ], [sin θ, -cos θ]]` and the spin-conditioned shift.
//! The three operators are fused into a single kernel ([`step`]).
//!
//! On top of the kernel the crate provides the localization observables
//! (inverse participation ratio, survival probability, long-time averages,
//! log-log power-law fits) and a deterministic parallel runner for χ–θ
//! phase diagrams ([`sweep`]).

pub mod error;
pub mod field;
pub mod observables;
pub mod oracle;
pub mod sweep;
pub mod walk;

pub use error::{Error, Result};
pub use field::{new_state, nonlinear_phase, InitialState, SpinorField, WalkParams, DEFAULT_MARGIN};
pub use observables::{
    fit_power_law, ipr, probability_distribution, survival_probability, time_average,
    AveragingWindow, LongTimeAverages, PowerLawFit, Sampling, TimeSeriesRecord, WindowAccumulator,
    WindowSpec,
};
pub use sweep::{
    classify_regime, run_sweep, AxisRange, Regime, RegimeThresholds, SweepCell, SweepSpec,
    SweepTable,
};
pub use walk::{evolve, step, StepView, Walker};

pub use num_complex::Complex64;
