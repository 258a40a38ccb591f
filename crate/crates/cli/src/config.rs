//! Run configuration: a JSON document with one section per mode.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use kerrwalk::{AxisRange, InitialState, RegimeThresholds, SweepSpec, WalkParams, WindowSpec};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CliError, Result};

/// A real parameter kept together with the text it was written as.
///
/// Accepts plain decimals and multiples of π: `0.6`, `pi`, `pi/3`, `2pi/3`, `2*pi/3`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamText {
    text: String,
    value: f64,
}

impl ParamText {
    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

impl FromStr for ParamText {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let text = s.trim();
        let lower = text.to_ascii_lowercase().replace('π', "pi");
        let value = match lower.split_once("pi") {
            None => lower.parse::<f64>().map_err(|e| format!("`{text}`: {e}"))?,
            Some((coef, rest)) => {
                let coef = coef.trim().trim_end_matches('*').trim();
                let coef = match coef {
                    "" | "+" => 1.0,
                    "-" => -1.0,
                    c => c.parse::<f64>().map_err(|e| format!("`{text}`: {e}"))?,
                };
                let rest = rest.trim();
                let div = match rest.strip_prefix('/') {
                    Some(d) => d.trim().parse::<f64>().map_err(|e| format!("`{text}`: {e}"))?,
                    None if rest.is_empty() => 1.0,
                    None => return Err(format!("`{text}`: unexpected `{rest}` after pi")),
                };
                coef * PI / div
            }
        };
        if !value.is_finite() {
            return Err(format!("`{text}` is not a finite number"));
        }
        Ok(Self {
            text: text.to_string(),
            value,
        })
    }
}

impl fmt::Display for ParamText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl From<f64> for ParamText {
    fn from(value: f64) -> Self {
        Self {
            text: value.to_string(),
            value,
        }
    }
}

impl Serialize for ParamText {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for ParamText {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Number(v) => Ok(v.into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Walk,
    Sweep,
    Profile,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Walk => "walk",
            Mode::Sweep => "sweep",
            Mode::Profile => "profile",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Ndjson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub theta: ParamText,
    pub chi: ParamText,
    pub steps: usize,
    #[serde(default = "default_initial")]
    pub initial: InitialState,
    #[serde(default = "default_margin")]
    pub margin: usize,
    #[serde(default)]
    pub window: WindowSpec,
}

impl WalkConfig {
    pub fn params(&self) -> WalkParams {
        WalkParams::new(self.theta.value(), self.chi.value(), self.steps, self.initial).with_margin(self.margin)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeText {
    pub min: ParamText,
    pub max: ParamText,
    pub count: usize,
}

impl RangeText {
    fn axis(&self) -> AxisRange {
        AxisRange::new(self.min.value(), self.max.value(), self.count)
    }
}

impl FromStr for RangeText {
    type Err = String;

    /// `min,max,count`
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').collect();
        let [min, max, count] = parts[..] else {
            return Err(format!("`{s}`: expected `min,max,count`"));
        };
        Ok(Self {
            min: min.parse()?,
            max: max.parse()?,
            count: count.trim().parse().map_err(|e| format!("`{count}`: {e}"))?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub theta_range: RangeText,
    pub chi_range: RangeText,
    pub steps: usize,
    #[serde(default = "default_initial")]
    pub initial: InitialState,
    #[serde(default = "default_margin")]
    pub margin: usize,
    #[serde(default)]
    pub window: WindowSpec,
    #[serde(default)]
    pub thresholds: RegimeThresholds,
}

impl SweepConfig {
    pub fn spec(&self) -> SweepSpec {
        SweepSpec {
            theta: self.theta_range.axis(),
            chi: self.chi_range.axis(),
            steps: self.steps,
            initial: self.initial,
            margin: self.margin,
            window: self.window,
            thresholds: self.thresholds,
        }
    }
}

fn default_initial() -> InitialState {
    InitialState::SymmetricCircular
}

fn default_margin() -> usize {
    kerrwalk::DEFAULT_MARGIN
}

fn default_stride() -> u64 {
    1
}

/// Everything needed to reproduce one output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walk: Option<WalkConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    pub output_path: PathBuf,
    #[serde(default)]
    pub format: Format,
    /// Steps at which the profile is dumped (profile mode).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshot_times: Vec<u64>,
    /// Emit every k-th step (walk mode).
    #[serde(default = "default_stride")]
    pub record_stride: u64,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        serde_json::from_str(&text).map_err(|e| CliError::config("config", format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        match (self.mode, &self.walk, &self.sweep) {
            (Mode::Walk | Mode::Profile, Some(walk), None) => {
                walk.params().validate()?;
                walk.window.resolve(walk.steps)?;
            }
            (Mode::Sweep, None, Some(sweep)) => sweep.spec().validate()?,
            (Mode::Sweep, _, _) => {
                return Err(CliError::config("sweep", "sweep mode needs exactly the `sweep` section"))
            }
            _ => {
                return Err(CliError::config(
                    "walk",
                    format!("{} mode needs exactly the `walk` section", self.mode),
                ))
            }
        }
        if self.record_stride == 0 {
            return Err(CliError::config("record_stride", "must be at least 1"));
        }
        if self.mode == Mode::Profile {
            let steps = self.walk.as_ref().map_or(0, |w| w.steps) as u64;
            if self.snapshot_times.is_empty() {
                return Err(CliError::config("snapshot_times", "profile mode needs at least one snapshot"));
            }
            if let Some(t) = self.snapshot_times.iter().find(|&&t| t > steps) {
                return Err(CliError::config(
                    "snapshot_times",
                    format!("snapshot {t} is beyond the last step {steps}"),
                ));
            }
        }
        if self.output_path.as_os_str().is_empty() {
            return Err(CliError::config("output_path", "must not be empty"));
        }
        Ok(())
    }
}

/// Path of the metadata sidecar: same stem, `.meta.json`.
pub fn metadata_path(output: &Path) -> PathBuf {
    output.with_extension("meta.json")
}
