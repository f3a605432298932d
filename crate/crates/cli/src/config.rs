//! Run configuration: one structured TOML file plus command-line overrides.
//! Unknown keys are rejected so a typo cannot silently fall back to a
//! default.

use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub gain_sweep: GainSweepConfig,
    #[serde(default)]
    pub amplify: AmplifyConfig,
    #[serde(default)]
    pub distill: DistillConfig,
    #[serde(default)]
    pub attenuate: AttenuateConfig,
    #[serde(default)]
    pub diqkd: DiqkdConfig,
    #[serde(default)]
    pub check: CheckConfig,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Output file path; stdout when absent.
    pub path: Option<String>,
    /// "csv" or "json".
    pub format: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainSweepConfig {
    pub alpha_sq: Vec<f64>,
    pub gain_min: f64,
    pub gain_max: f64,
    pub gain_steps: usize,
    /// "lin" or "log".
    pub gain_spacing: String,
}

impl Default for GainSweepConfig {
    fn default() -> Self {
        Self {
            alpha_sq: vec![0.25, 0.5, 0.75, 0.95],
            gain_min: 1.0,
            gain_max: 100.0,
            gain_steps: 120,
            gain_spacing: "log".into(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplifyConfig {
    pub alpha_sq: f64,
    pub reflectivity: f64,
    /// "dd-aa" or "feed-forward".
    pub policy: String,
}

impl Default for AmplifyConfig {
    fn default() -> Self {
        Self {
            alpha_sq: 0.5,
            reflectivity: 0.5,
            policy: "dd-aa".into(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistillConfig {
    /// "curves", "optimal" or "summary".
    pub mode: String,
    pub transmissivities: Vec<f64>,
    pub gain_min: f64,
    pub gain_max: f64,
    pub gain_steps: usize,
    pub gain_spacing: String,
    /// Skips the (numerically heavier) relative-entropy column in curves
    /// mode.
    pub skip_ree: bool,
}

impl Default for DistillConfig {
    fn default() -> Self {
        Self {
            mode: "curves".into(),
            transmissivities: vec![0.25, 0.5, 0.75],
            gain_min: 1.0,
            gain_max: 20.0,
            gain_steps: 80,
            gain_spacing: "lin".into(),
            skip_ree: false,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttenuateConfig {
    /// "tradeoff" or "efficiency".
    pub mode: String,
    pub transmissivities: Vec<f64>,
    pub nu_min: f64,
    pub nu_steps: usize,
}

impl Default for AttenuateConfig {
    fn default() -> Self {
        Self {
            mode: "tradeoff".into(),
            transmissivities: vec![0.25, 0.5, 0.75],
            nu_min: 0.01,
            nu_steps: 40,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiqkdConfig {
    pub pair_prob: f64,
    pub source_truncation: u32,
    pub detector_efficiency: f64,
    pub dark_count_probs: Vec<f64>,
    pub loss_db_min: f64,
    pub loss_db_max: f64,
    pub loss_db_steps: usize,
    /// Number of log-spaced reflectivity points searched in addition to
    /// exactly zero.
    pub r_grid_points: usize,
    /// Weight of the inconclusive-ratio penalty in the eavesdropper bound.
    pub mu_weight: f64,
}

impl Default for DiqkdConfig {
    fn default() -> Self {
        Self {
            pair_prob: 2e-3,
            source_truncation: 2,
            detector_efficiency: 0.95 * 0.91,
            dark_count_probs: vec![1e-10, 1e-8],
            loss_db_min: 0.0,
            loss_db_max: 30.0,
            loss_db_steps: 16,
            r_grid_points: 50,
            mu_weight: 1.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            samples: 1000,
            seed: 7,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&str>) -> Result<(Self, String), CliError> {
        match path {
            None => Ok((Self::default(), String::new())),
            Some(p) => {
                let raw = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read config {p}: {e}")))?;
                let cfg: RunConfig = toml::from_str(&raw)
                    .map_err(|e| CliError::Config(format!("invalid config {p}: {e}")))?;
                Ok((cfg, raw))
            }
        }
    }
}

/// Builds a gain (or similar) grid from min/max/steps and a spacing keyword.
pub fn spaced_grid(min: f64, max: f64, steps: usize, spacing: &str) -> Result<Vec<f64>, CliError> {
    if steps == 0 {
        return Err(CliError::Config("grid needs at least one step".into()));
    }
    if !(min.is_finite() && max.is_finite()) || min > max {
        return Err(CliError::Config(format!(
            "invalid grid range [{min}, {max}]"
        )));
    }
    match spacing {
        "lin" => Ok(qamp::optimize::linspace(min, max, steps)),
        "log" => {
            if min <= 0.0 {
                return Err(CliError::Config(
                    "log spacing needs a positive minimum".into(),
                ));
            }
            Ok(qamp::optimize::logspace(min, max, steps))
        }
        other => Err(CliError::Config(format!(
            "unknown spacing {other:?} (expected \"lin\" or \"log\")"
        ))),
    }
}
