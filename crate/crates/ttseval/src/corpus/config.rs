//! Evaluation configuration: a flat TOML key/value file with documented
//! defaults. Unknown keys are hard errors.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::griffin_lim::{GriffinLimConfig, PhaseInit};
use crate::pitch::PitchParams;
use crate::spectral::SpectralParams;

use super::CorpusError;

/// The full key set with its default values, in the accepted syntax.
pub const CONFIG_DEFAULTS_TOML: &str = "\
# spectral analysis
n_fft = 1024
win_length = 1024
hop_length = 256
center = true

# mel features
n_mels = 80
f_min = 0.0
# f_max defaults to the Nyquist frequency of each utterance
cepstral_order = 24

# pitch extraction
f0_min = 70.0
f0_max = 400.0
voicing_threshold = 0.15

# griffin-lim vocoding
gl_iters = 60
gl_init = \"zero\"          # or \"seeded-random\"
gl_momentum = 0.0
seed = 0

# scheduling
metrics = [\"mcd\", \"f0_rmse\"]
stages = [\"feats\", \"vocode\", \"eval\", \"cer\", \"mos\"]
";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GlInit {
    Zero,
    SeededRandom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Mcd,
    F0Rmse,
    Cer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Feats,
    Vocode,
    Eval,
    Cer,
    Mos,
}

/// Pipeline configuration shared by every command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalConfig {
    pub spectral: SpectralParams,
    pub n_mels: usize,
    pub f_min: f64,
    /// Upper mel edge; `None` means the Nyquist frequency at run time.
    pub f_max: Option<f64>,
    pub cepstral_order: usize,
    pub pitch: PitchParams,
    pub gl_iters: usize,
    pub gl_init: GlInit,
    pub gl_momentum: f64,
    pub seed: u64,
    pub metrics: Vec<MetricKind>,
    pub stages: Vec<Stage>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            spectral: SpectralParams::default(),
            n_mels: 80,
            f_min: 0.0,
            f_max: None,
            cepstral_order: 24,
            pitch: PitchParams::default(),
            gl_iters: 60,
            gl_init: GlInit::Zero,
            gl_momentum: 0.0,
            seed: 0,
            metrics: vec![MetricKind::Mcd, MetricKind::F0Rmse],
            stages: vec![
                Stage::Feats,
                Stage::Vocode,
                Stage::Eval,
                Stage::Cer,
                Stage::Mos,
            ],
        }
    }
}

impl EvalConfig {
    pub fn metric_enabled(&self, kind: MetricKind) -> bool {
        self.metrics.contains(&kind)
    }

    /// Upper mel edge for a concrete sample rate.
    pub fn effective_f_max(&self, sample_rate_hz: u32) -> f64 {
        self.f_max.unwrap_or(sample_rate_hz as f64 / 2.0)
    }

    /// Griffin-Lim settings, optionally overriding the configured seed.
    pub fn gl_config(&self, seed_override: Option<u64>) -> GriffinLimConfig {
        let init_phase = match self.gl_init {
            GlInit::Zero => PhaseInit::Zero,
            GlInit::SeededRandom => PhaseInit::SeededRandom {
                seed: seed_override.unwrap_or(self.seed),
            },
        };
        GriffinLimConfig {
            n_iters: self.gl_iters,
            init_phase,
            momentum: self.gl_momentum,
        }
    }

    fn validate(&self) -> Result<(), CorpusError> {
        let invalid = |key: &str, reason: String| CorpusError::InvalidValue {
            key: key.to_string(),
            reason,
        };
        self.spectral
            .validate()
            .map_err(|e| invalid("n_fft/win_length/hop_length", e.to_string()))?;
        if self.n_mels < 2 {
            return Err(invalid("n_mels", format!("must be >= 2, got {}", self.n_mels)));
        }
        if self.cepstral_order + 1 > self.n_mels {
            return Err(invalid(
                "cepstral_order",
                format!(
                    "order {} needs {} mel bands, n_mels is {}",
                    self.cepstral_order,
                    self.cepstral_order + 1,
                    self.n_mels
                ),
            ));
        }
        if !(self.f_min >= 0.0 && self.f_min.is_finite()) {
            return Err(invalid("f_min", format!("must be >= 0, got {}", self.f_min)));
        }
        if let Some(f_max) = self.f_max {
            if !(f_max > self.f_min) {
                return Err(invalid(
                    "f_max",
                    format!("must exceed f_min {}, got {f_max}", self.f_min),
                ));
            }
        }
        if !(self.pitch.f0_min > 0.0 && self.pitch.f0_min < self.pitch.f0_max) {
            return Err(invalid(
                "f0_min/f0_max",
                format!("need 0 < f0_min < f0_max, got [{}, {}]", self.pitch.f0_min, self.pitch.f0_max),
            ));
        }
        if !(self.pitch.voicing_threshold > 0.0) {
            return Err(invalid(
                "voicing_threshold",
                format!("must be positive, got {}", self.pitch.voicing_threshold),
            ));
        }
        if !(0.0..1.0).contains(&self.gl_momentum) {
            return Err(invalid(
                "gl_momentum",
                format!("must be in [0, 1), got {}", self.gl_momentum),
            ));
        }
        if self.metrics.is_empty() {
            return Err(invalid("metrics", "at least one metric must be enabled".into()));
        }
        Ok(())
    }
}

fn expect_usize(key: &str, value: &toml::Value) -> Result<usize, CorpusError> {
    match value {
        toml::Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        other => Err(CorpusError::TypeError {
            key: key.to_string(),
            expected: "nonnegative integer",
            got: other.to_string(),
        }),
    }
}

fn expect_u64(key: &str, value: &toml::Value) -> Result<u64, CorpusError> {
    match value {
        toml::Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        other => Err(CorpusError::TypeError {
            key: key.to_string(),
            expected: "nonnegative integer",
            got: other.to_string(),
        }),
    }
}

fn expect_f64(key: &str, value: &toml::Value) -> Result<f64, CorpusError> {
    match value {
        toml::Value::Float(f) => Ok(*f),
        toml::Value::Integer(i) => Ok(*i as f64),
        other => Err(CorpusError::TypeError {
            key: key.to_string(),
            expected: "number",
            got: other.to_string(),
        }),
    }
}

fn expect_bool(key: &str, value: &toml::Value) -> Result<bool, CorpusError> {
    match value {
        toml::Value::Boolean(b) => Ok(*b),
        other => Err(CorpusError::TypeError {
            key: key.to_string(),
            expected: "boolean",
            got: other.to_string(),
        }),
    }
}

fn expect_string_list(key: &str, value: &toml::Value) -> Result<Vec<String>, CorpusError> {
    let items = match value {
        toml::Value::Array(items) => items,
        other => {
            return Err(CorpusError::TypeError {
                key: key.to_string(),
                expected: "list of strings",
                got: other.to_string(),
            })
        }
    };
    items
        .iter()
        .map(|item| match item {
            toml::Value::String(s) => Ok(s.clone()),
            other => Err(CorpusError::TypeError {
                key: key.to_string(),
                expected: "list of strings",
                got: other.to_string(),
            }),
        })
        .collect()
}

/// Parses a config document; unspecified keys keep their defaults.
pub fn parse_config(text: &str) -> Result<EvalConfig, CorpusError> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| CorpusError::Toml(e.to_string()))?;
    let mut cfg = EvalConfig::default();
    for (key, value) in &table {
        match key.as_str() {
            "n_fft" => cfg.spectral.n_fft = expect_usize(key, value)?,
            "win_length" => cfg.spectral.win_length = expect_usize(key, value)?,
            "hop_length" => cfg.spectral.hop_length = expect_usize(key, value)?,
            "center" => cfg.spectral.center = expect_bool(key, value)?,
            "n_mels" => cfg.n_mels = expect_usize(key, value)?,
            "f_min" => cfg.f_min = expect_f64(key, value)?,
            "f_max" => cfg.f_max = Some(expect_f64(key, value)?),
            "cepstral_order" => cfg.cepstral_order = expect_usize(key, value)?,
            "f0_min" => cfg.pitch.f0_min = expect_f64(key, value)?,
            "f0_max" => cfg.pitch.f0_max = expect_f64(key, value)?,
            "voicing_threshold" => cfg.pitch.voicing_threshold = expect_f64(key, value)?,
            "gl_iters" => cfg.gl_iters = expect_usize(key, value)?,
            "gl_init" => {
                let s = match value {
                    toml::Value::String(s) => s.as_str(),
                    other => {
                        return Err(CorpusError::TypeError {
                            key: key.clone(),
                            expected: "\"zero\" or \"seeded-random\"",
                            got: other.to_string(),
                        })
                    }
                };
                cfg.gl_init = match s {
                    "zero" => GlInit::Zero,
                    "seeded-random" => GlInit::SeededRandom,
                    other => {
                        return Err(CorpusError::InvalidValue {
                            key: key.clone(),
                            reason: format!(
                                "unknown phase init {other:?}, expected \"zero\" or \"seeded-random\""
                            ),
                        })
                    }
                };
            }
            "gl_momentum" => cfg.gl_momentum = expect_f64(key, value)?,
            "seed" => cfg.seed = expect_u64(key, value)?,
            "metrics" => {
                cfg.metrics = expect_string_list(key, value)?
                    .iter()
                    .map(|name| match name.as_str() {
                        "mcd" => Ok(MetricKind::Mcd),
                        "f0_rmse" => Ok(MetricKind::F0Rmse),
                        "cer" => Ok(MetricKind::Cer),
                        other => Err(CorpusError::InvalidValue {
                            key: key.clone(),
                            reason: format!("unknown metric {other:?}"),
                        }),
                    })
                    .collect::<Result<_, _>>()?;
            }
            "stages" => {
                cfg.stages = expect_string_list(key, value)?
                    .iter()
                    .map(|name| match name.as_str() {
                        "feats" => Ok(Stage::Feats),
                        "vocode" => Ok(Stage::Vocode),
                        "eval" => Ok(Stage::Eval),
                        "cer" => Ok(Stage::Cer),
                        "mos" => Ok(Stage::Mos),
                        other => Err(CorpusError::InvalidValue {
                            key: key.clone(),
                            reason: format!("unknown stage {other:?}"),
                        }),
                    })
                    .collect::<Result<_, _>>()?;
            }
            _ => return Err(CorpusError::UnknownKey { key: key.clone() }),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Loads and parses a config file.
pub fn load_config(path: &Path) -> Result<EvalConfig, CorpusError> {
    let text = fs::read_to_string(path)?;
    parse_config(&text)
}
