//! Time stepping: the fused phase–coin–shift kernel and the evolution driver.
//!
//! One step maps the field at `t` to `t + 1` by
//!
//! ```text
//! a'ₙ = cos θ · K(aₙ₊₁) + sin θ · K(bₙ₊₁)
//! b'ₙ = sin θ · K(aₙ₋₁) − cos θ · K(bₙ₋₁),     K(z) = exp(i 2πχ |z|²) · z
//! ```
//!
//! with out-of-range neighbours read as zero.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::{ControlFlow, RangeInclusive};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{kerr, new_state, SpinorField, WalkParams};
use crate::observables::{self, TimeSeriesRecord};

/// Amplitude below which a component may touch the lattice edge.
pub const EDGE_TOLERANCE: f64 = 1e-14;

/// Components smaller than this are set to zero before each step.
///
/// The exponential tails ahead of the front otherwise decay into subnormal
/// numbers, which are two orders of magnitude slower to multiply.
pub const FLUSH_THRESHOLD: f64 = 1e-150;

fn flush(z: Complex64) -> Complex64 {
    if z.re.abs() < FLUSH_THRESHOLD && z.im.abs() < FLUSH_THRESHOLD {
        Complex64::new(0.0, 0.0)
    } else {
        z
    }
}

/// Coin angle and Kerr strength, resolved for the hot loop.
#[derive(Debug, Clone, Copy)]
struct Coin {
    cos: f64,
    sin: f64,
    chi: f64,
}

impl Coin {
    fn new(theta: f64, chi: f64) -> Self {
        let (cos, sin) = coin_coefficients(theta);
        Self { cos, sin, chi }
    }
}

/// `(cos θ, sin θ)`, evaluated so that `θ` and `π − θ` give exactly `(c, s)`
/// and `(−c, s)` whenever `π − θ` is representable.
///
/// `θ → π − θ` maps the coin to `−Z C Z`, and `Z` commutes with the shift and
/// the Kerr phase, so mirrored angles are an exact symmetry for initial states
/// invariant under `Z`. Keeping the coefficients bitwise mirrored preserves
/// that symmetry in floating point, including chaotic parameter regions where
/// a one-ulp difference in `cos θ` would otherwise grow to order one.
pub fn coin_coefficients(theta: f64) -> (f64, f64) {
    if theta > FRAC_PI_2 {
        // Exact for θ in [π/2, 2π].
        let mirror = PI - theta;
        (-mirror.cos(), mirror.sin())
    } else {
        (theta.cos(), theta.sin())
    }
}

/// A field being evolved, together with the interval that can carry amplitude.
///
/// Sites outside `support` are exactly zero, so each step only touches the
/// current light cone plus one site on either side.
#[derive(Debug, Clone)]
pub struct Walker {
    field: SpinorField,
    coin: Coin,
    t: u64,
    lo: usize,
    hi: usize,
    empty: bool,
    phased_a: Vec<Complex64>,
    phased_b: Vec<Complex64>,
}

impl Walker {
    /// Starts the walk described by `params` from its point-source initial state.
    pub fn new(params: &WalkParams) -> Result<Self> {
        let field = new_state(params)?;
        Ok(Self::from_field(field, params.theta, params.chi))
    }

    /// Wraps an arbitrary field; the support is found by scanning for nonzero amplitudes.
    pub fn from_field(field: SpinorField, theta: f64, chi: f64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let occupied = |n: &usize| field.a()[*n] != zero || field.b()[*n] != zero;
        let lo = (0..field.len()).find(occupied);
        let hi = (0..field.len()).rev().find(occupied);
        let len = field.len();
        let (lo, hi, empty) = match (lo, hi) {
            (Some(lo), Some(hi)) => (lo, hi, false),
            _ => (field.origin(), field.origin(), true),
        };
        Self {
            field,
            coin: Coin::new(theta, chi),
            t: 0,
            lo,
            hi,
            empty,
            phased_a: vec![zero; len],
            phased_b: vec![zero; len],
        }
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn field(&self) -> &SpinorField {
        &self.field
    }

    pub fn into_field(self) -> SpinorField {
        self.field
    }

    /// Sites that may carry nonzero amplitude.
    pub fn support(&self) -> RangeInclusive<usize> {
        self.lo..=self.hi
    }

    pub fn view(&self) -> StepView<'_> {
        StepView {
            t: self.t,
            field: &self.field,
            support: self.support(),
        }
    }

    /// Advances the field by one time step.
    ///
    /// Fails, leaving the walker untouched, if any amplitude above
    /// [`EDGE_TOLERANCE`] would be shifted past either end of the chain.
    pub fn step(&mut self) -> Result<()> {
        if self.empty {
            self.t += 1;
            return Ok(());
        }
        let Coin { cos, sin, chi } = self.coin;
        let (lo, hi) = (self.lo, self.hi);
        let last = self.field.len() - 1;

        {
            let (a, b) = (self.field.a(), self.field.b());
            let (pa, pb) = (&mut self.phased_a[lo..=hi], &mut self.phased_b[lo..=hi]);
            let pairs = pa.iter_mut().chain(pb.iter_mut()).zip(a[lo..=hi].iter().chain(&b[lo..=hi]));
            if chi == 0.0 {
                pairs.for_each(|(p, x)| *p = flush(*x));
            } else {
                // Half of the light cone is empty at any step (a point source
                // only occupies sites of one parity); K(0) = 0 needs no phase.
                let zero = Complex64::new(0.0, 0.0);
                for (p, x) in pairs {
                    let x = flush(*x);
                    *p = if x == zero { x } else { kerr(x, chi) };
                }
            }
        }

        let (pa, pb) = (&self.phased_a, &self.phased_b);
        if lo == 0 {
            let lost = cos * pa[0] + sin * pb[0];
            self.check_edge(lost, "left")?;
        }
        if hi == last {
            let lost = sin * pa[last] - cos * pb[last];
            self.check_edge(lost, "right")?;
        }

        let new_lo = lo.saturating_sub(1);
        let new_hi = (hi + 1).min(last);
        let zero = Complex64::new(0.0, 0.0);
        let (a, b) = self.field.components_mut();
        a[new_lo..=new_hi].fill(zero);
        b[new_lo..=new_hi].fill(zero);
        for n in lo..=hi {
            if n > 0 {
                a[n - 1] = cos * pa[n] + sin * pb[n];
            }
            if n < last {
                b[n + 1] = sin * pa[n] - cos * pb[n];
            }
        }

        self.lo = new_lo;
        self.hi = new_hi;
        self.t += 1;
        Ok(())
    }

    fn check_edge(&self, lost: Complex64, edge: &'static str) -> Result<()> {
        let magnitude = lost.norm();
        if magnitude > EDGE_TOLERANCE {
            return Err(Error::LightCone {
                t: self.t,
                edge,
                magnitude,
            });
        }
        Ok(())
    }
}

/// Read-only view of the field handed to evolution observers.
#[derive(Debug, Clone)]
pub struct StepView<'a> {
    /// Number of steps applied so far.
    pub t: u64,
    pub field: &'a SpinorField,
    /// Interval outside of which every amplitude is zero.
    pub support: RangeInclusive<usize>,
}

impl StepView<'_> {
    /// IPR, survival probability and norm at this step.
    pub fn record(&self) -> Result<TimeSeriesRecord> {
        let (ipr, norm) = observables::ipr_and_norm_in(self.field, self.support.clone())?;
        Ok(TimeSeriesRecord {
            t: self.t,
            ipr,
            sp: observables::survival_probability(self.field),
            norm,
        })
    }
}

/// Applies one time step of the nonlinear walk to `field`.
pub fn step(field: &SpinorField, params: &WalkParams) -> Result<SpinorField> {
    let mut walker = Walker::from_field(field.clone(), params.theta, params.chi);
    walker.step()?;
    Ok(walker.into_field())
}

/// Runs `params.steps` steps from the initial state, calling `observer`
/// after every step. Returning [`ControlFlow::Break`] stops the run early;
/// the field reached so far is returned.
pub fn evolve<F>(params: &WalkParams, mut observer: F) -> Result<SpinorField>
where
    F: FnMut(StepView<'_>) -> ControlFlow<()>,
{
    let mut walker = Walker::new(params)?;
    for _ in 0..params.steps {
        walker.step()?;
        if observer(walker.view()).is_break() {
            break;
        }
    }
    Ok(walker.into_field())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::InitialState;
    use crate::observables::{probability_distribution, survival_probability};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    #[test]
    fn hadamard_step_splits_point_source() {
        for chi in [0.0, 0.7, 1.9] {
            let params = WalkParams::new(FRAC_PI_4, chi, 4, InitialState::RightOnly);
            let field = new_state(&params).unwrap();
            let o = field.origin();
            let next = step(&field, &params).unwrap();
            assert!((next.a()[o - 1].norm_sqr() - 0.5).abs() < 1e-14);
            assert!((next.b()[o + 1].norm_sqr() - 0.5).abs() < 1e-14);
            assert_eq!(next.b()[o - 1].norm_sqr(), 0.0);
            assert_eq!(next.a()[o + 1].norm_sqr(), 0.0);
            assert_eq!(survival_probability(&next), 0.0);
        }
    }

    #[test]
    fn antidiagonal_coin_moves_right_component_to_left_spin() {
        let params = WalkParams::new(FRAC_PI_2, 0.0, 2, InitialState::RightOnly);
        let field = new_state(&params).unwrap();
        let o = field.origin();
        let next = step(&field, &params).unwrap();
        assert!((next.b()[o + 1] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(next.a()[o - 1].norm() < 1e-15);
    }

    #[test]
    fn light_cone_violation_is_reported() {
        let params = WalkParams::new(FRAC_PI_3, 0.5, 2, InitialState::SymmetricCircular).with_margin(0);
        let mut walker = Walker::new(&params).unwrap();
        walker.step().unwrap();
        walker.step().unwrap();
        let before = walker.field().clone();
        let err = walker.step().unwrap_err();
        assert!(matches!(err, Error::LightCone { t: 2, .. }), "{err}");
        assert_eq!(walker.field(), &before);
    }

    #[test]
    fn support_tracks_light_cone() {
        let params = WalkParams::new(FRAC_PI_3, 0.9, 25, InitialState::SymmetricCircular);
        let mut walker = Walker::new(&params).unwrap();
        let o = walker.field().origin();
        for t in 1..=25usize {
            walker.step().unwrap();
            assert_eq!(walker.support(), o - t..=o + t);
            let p = probability_distribution(walker.field());
            for (n, pn) in p.iter().enumerate() {
                if n + t < o || n > o + t {
                    assert_eq!(*pn, 0.0);
                }
            }
        }
    }

    #[test]
    fn early_termination_is_honoured() {
        let params = WalkParams::new(FRAC_PI_4, 0.3, 50, InitialState::SymmetricCircular);
        let mut seen = Vec::new();
        let out = evolve(&params, |view| {
            seen.push(view.t);
            if view.t == 7 {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })
        .unwrap();
        assert_eq!(seen, (1..=7).collect::<Vec<_>>());
        let mut walker = Walker::new(&params).unwrap();
        for _ in 0..7 {
            walker.step().unwrap();
        }
        assert_eq!(&out, walker.field());
    }

    #[test]
    fn coin_coefficients_are_accurate_and_mirrored() {
        for k in 0..=400 {
            let theta = 2.0 * PI * k as f64 / 400.0;
            let (c, s) = coin_coefficients(theta);
            assert!((c - theta.cos()).abs() < 1e-15, "{theta}");
            assert!((s - theta.sin()).abs() < 1e-15, "{theta}");
        }
        // Multiples of 2⁻¹⁰ below π have an exactly representable mirror.
        for k in [1u32, 100, 517, 1024, 1607] {
            let theta = f64::from(k) / 1024.0;
            let (c, s) = coin_coefficients(theta);
            assert_eq!(coin_coefficients(PI - theta), (-c, s));
        }
    }

    #[test]
    fn fused_kernel_matches_phase_then_linear_step() {
        let params = WalkParams::new(1.1, 0.45, 12, InitialState::SymmetricCircular);
        let mut field = new_state(&params).unwrap();
        let linear = WalkParams { chi: 0.0, ..params };
        for _ in 0..12 {
            let fused = step(&field, &params).unwrap();
            let split = step(&crate::field::nonlinear_phase(&field, params.chi), &linear).unwrap();
            for (x, y) in fused.a().iter().chain(fused.b()).zip(split.a().iter().chain(split.b())) {
                assert!((x - y).norm() < 1e-15);
            }
            field = fused;
        }
    }
}
