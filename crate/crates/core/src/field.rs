//! Walker state and run parameters.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Extra sites allocated beyond the light cone on each side.
pub const DEFAULT_MARGIN: usize = 2;

/// Shortest lattice the kernel accepts.
pub const MIN_SITES: usize = 3;

/// Tolerance of the normalization invariant.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// The two initial spinors used throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// `(|R⟩ + i|L⟩)/√2` at the origin.
    #[serde(alias = "symmetric")]
    SymmetricCircular,
    /// `|R⟩` at the origin.
    #[serde(alias = "right")]
    RightOnly,
}

impl InitialState {
    /// Spinor `(a, b)` placed on the origin site.
    pub fn spinor(self) -> (Complex64, Complex64) {
        match self {
            InitialState::SymmetricCircular => (
                Complex64::new(FRAC_1_SQRT_2, 0.0),
                Complex64::new(0.0, FRAC_1_SQRT_2),
            ),
            InitialState::RightOnly => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    /// Coin angle in radians, `0 ≤ θ ≤ 2π`.
    pub theta: f64,
    /// Kerr strength, `χ ≥ 0`.
    pub chi: f64,
    /// Number of time steps, at least one.
    pub steps: usize,
    pub initial: InitialState,
    /// Sites kept free beyond the light cone on each side.
    #[serde(default = "default_margin")]
    pub margin: usize,
}

fn default_margin() -> usize {
    DEFAULT_MARGIN
}

impl WalkParams {
    pub fn new(theta: f64, chi: f64, steps: usize, initial: InitialState) -> Self {
        Self {
            theta,
            chi,
            steps,
            initial,
            margin: DEFAULT_MARGIN,
        }
    }

    pub fn with_margin(mut self, margin: usize) -> Self {
        self.margin = margin;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.theta.is_finite() || !(0.0..=TAU).contains(&self.theta) {
            return Err(Error::invalid("theta", format!("{} is outside [0, 2π]", self.theta)));
        }
        if !self.chi.is_finite() || self.chi < 0.0 {
            return Err(Error::invalid("chi", format!("{} must be finite and non-negative", self.chi)));
        }
        if self.steps == 0 {
            return Err(Error::invalid("steps", "must be at least 1"));
        }
        self.lattice_size().map(|_| ())
    }

    /// `N = 2T + 2·margin + 1`, the smallest open chain the walk can never leave.
    pub fn lattice_size(&self) -> Result<usize> {
        let overflow = || Error::LatticeOverflow {
            steps: self.steps,
            margin: self.margin,
        };
        // Site indices are also stored as signed offsets, so stay within isize.
        let n = self
            .steps
            .checked_add(self.margin)
            .and_then(|half| half.checked_mul(2))
            .and_then(|n| n.checked_add(1))
            .filter(|&n| n <= isize::MAX as usize)
            .ok_or_else(overflow)?;
        Ok(n)
    }
}

/// Two-component amplitude field on an open chain of `N` sites.
///
/// `a[n]` is the `|R⟩` amplitude and `b[n]` the `|L⟩` amplitude at site `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    origin: usize,
}

impl SpinorField {
    /// Builds a field from raw components. Normalization is not enforced here,
    /// see [`SpinorField::is_normalized`].
    pub fn from_components(a: Vec<Complex64>, b: Vec<Complex64>, origin: usize) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::invalid(
                "b",
                format!("length {} differs from a's length {}", b.len(), a.len()),
            ));
        }
        if a.len() < MIN_SITES {
            return Err(Error::invalid("a", format!("need at least {MIN_SITES} sites, got {}", a.len())));
        }
        if origin >= a.len() {
            return Err(Error::invalid("origin", format!("{origin} is outside [0, {})", a.len())));
        }
        Ok(Self { a, b, origin })
    }

    /// A point excitation `spinor ⊗ |origin⟩` on `len` sites.
    pub fn point(len: usize, origin: usize, spinor: (Complex64, Complex64)) -> Result<Self> {
        let zero = Complex64::new(0.0, 0.0);
        let mut field = Self::from_components(vec![zero; len], vec![zero; len], origin)?;
        field.a[origin] = spinor.0;
        field.b[origin] = spinor.1;
        Ok(field)
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn a(&self) -> &[Complex64] {
        &self.a
    }

    pub fn b(&self) -> &[Complex64] {
        &self.b
    }

    pub(crate) fn components_mut(&mut self) -> (&mut [Complex64], &mut [Complex64]) {
        (&mut self.a, &mut self.b)
    }

    /// `Σₙ |aₙ|² + |bₙ|²`.
    pub fn norm(&self) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() < NORM_TOLERANCE
    }

    /// Multiplies every amplitude by `exp(iφ)`.
    pub fn with_global_phase(mut self, phi: f64) -> Self {
        let phase = Complex64::cis(phi);
        self.a.iter_mut().chain(self.b.iter_mut()).for_each(|z| *z *= phase);
        self
    }
}

/// Initial walker state for `params`: a centred point source on a lattice
/// wide enough that the light cone never reaches the edges.
pub fn new_state(params: &WalkParams) -> Result<SpinorField> {
    params.validate()?;
    let len = params.lattice_size()?;
    SpinorField::point(len, len / 2, params.initial.spinor())
}

/// Kerr phase factor `exp(i 2πχ |z|²) · z` for a single amplitude.
#[inline(always)]
pub(crate) fn kerr(z: Complex64, chi: f64) -> Complex64 {
    z * Complex64::cis(TAU * chi * z.norm_sqr())
}

/// Applies the intensity-dependent phase to every spinor component.
///
/// The stepping kernel fuses this map; it is exposed on its own for checks.
pub fn nonlinear_phase(field: &SpinorField, chi: f64) -> SpinorField {
    let mut out = field.clone();
    let (a, b) = out.components_mut();
    a.iter_mut().chain(b.iter_mut()).for_each(|z| *z = kerr(*z, chi));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI};

    #[test]
    fn symmetric_initial_state_layout() {
        let params = WalkParams::new(FRAC_PI_4, 0.0, 1, InitialState::SymmetricCircular).with_margin(1);
        let field = new_state(&params).unwrap();
        assert_eq!(field.len(), 5);
        assert_eq!(field.origin(), 2);
        assert_eq!(field.a()[2], Complex64::new(FRAC_1_SQRT_2, 0.0));
        assert_eq!(field.b()[2], Complex64::new(0.0, FRAC_1_SQRT_2));
        for n in [0, 1, 3, 4] {
            assert_eq!(field.a()[n], Complex64::new(0.0, 0.0));
            assert_eq!(field.b()[n], Complex64::new(0.0, 0.0));
        }
        assert!(field.is_normalized());
    }

    #[test]
    fn right_only_initial_state_layout() {
        let params = WalkParams::new(FRAC_PI_3, 0.6, 3, InitialState::RightOnly).with_margin(0);
        let field = new_state(&params).unwrap();
        assert_eq!(field.len(), 7);
        assert_eq!(field.origin(), 3);
        assert_eq!(field.a()[3], Complex64::new(1.0, 0.0));
        assert_eq!(field.b()[3], Complex64::new(0.0, 0.0));
        assert_eq!(field.norm(), 1.0);
    }

    #[test]
    fn parameter_validation() {
        let ok = WalkParams::new(PI, 1.0, 10, InitialState::RightOnly);
        assert!(ok.validate().is_ok());
        assert!(WalkParams { theta: -0.1, ..ok }.validate().is_err());
        assert!(WalkParams { theta: 7.0, ..ok }.validate().is_err());
        assert!(WalkParams { theta: f64::NAN, ..ok }.validate().is_err());
        assert!(WalkParams { chi: -1e-3, ..ok }.validate().is_err());
        assert!(WalkParams { chi: f64::INFINITY, ..ok }.validate().is_err());
        assert!(WalkParams { steps: 0, ..ok }.validate().is_err());
    }

    #[test]
    fn lattice_overflow_is_rejected() {
        let params = WalkParams::new(1.0, 0.0, usize::MAX / 2, InitialState::RightOnly);
        assert!(matches!(new_state(&params), Err(Error::LatticeOverflow { .. })));
        let params = WalkParams::new(1.0, 0.0, 1, InitialState::RightOnly).with_margin(usize::MAX);
        assert!(matches!(params.lattice_size(), Err(Error::LatticeOverflow { .. })));
    }

    #[test]
    fn field_construction_errors() {
        let z = Complex64::new(0.0, 0.0);
        assert!(SpinorField::from_components(vec![z; 4], vec![z; 5], 0).is_err());
        assert!(SpinorField::from_components(vec![z; 2], vec![z; 2], 0).is_err());
        assert!(SpinorField::from_components(vec![z; 4], vec![z; 4], 4).is_err());
    }

    #[test]
    fn zero_chi_phase_is_identity() {
        let params = WalkParams::new(FRAC_PI_4, 0.0, 3, InitialState::SymmetricCircular);
        let field = new_state(&params).unwrap();
        assert_eq!(nonlinear_phase(&field, 0.0), field);
    }

    #[test]
    fn half_probability_at_unit_chi_flips_sign() {
        let z = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let out = kerr(z, 1.0);
        assert!((out + z).norm() < 1e-15);
    }

    #[test]
    fn phase_at_origin_and_profile_unchanged() {
        let params = WalkParams::new(FRAC_PI_4, 0.3, 2, InitialState::SymmetricCircular);
        let field = new_state(&params).unwrap();
        let out = nonlinear_phase(&field, 0.3);
        let o = field.origin();
        // |z|² = 1/2, so the phase is 2π·0.3·0.5 = 0.3π.
        let expected = field.a()[o] * Complex64::cis(0.3 * PI);
        assert!((out.a()[o] - expected).norm() < 1e-15);
        let before: Vec<f64> = field.a().iter().chain(field.b()).map(|z| z.norm_sqr()).collect();
        let after: Vec<f64> = out.a().iter().chain(out.b()).map(|z| z.norm_sqr()).collect();
        for (p, q) in before.iter().zip(&after) {
            assert!((p - q).abs() < 1e-15);
        }
    }
}
