//! Run configuration: command-line flags over `GALIMP_SEED` over a TOML file
//! (or a manifest) over built-in defaults.

use std::path::{Path, PathBuf};

use galimp::{BayesConfig, ClassificationThresholds};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SEED_ENV: &str = "GALIMP_SEED";

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Dot,
    Csv,
}

/// Every setting of a run, fully resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub symbolic: Option<PathBuf>,
    pub context: Option<PathBuf>,
    pub attribute_order: Option<Vec<String>>,
    pub observations: Option<PathBuf>,
    pub tables: Option<PathBuf>,
    pub population: Option<usize>,
    pub skip_stats: bool,
    pub h_tend: f64,
    pub h_quasi: f64,
    pub h_floor: f64,
    pub delta: f64,
    pub prior_weights: [f64; 4],
    pub samples: usize,
    pub seed: u64,
    pub merge_equivalences: bool,
    pub out_dir: Option<PathBuf>,
    pub emit: Vec<Format>,
}

/// A partial configuration. Unset fields fall through to the next layer.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigLayer {
    pub symbolic: Option<PathBuf>,
    pub context: Option<PathBuf>,
    pub attribute_order: Option<Vec<String>>,
    pub observations: Option<PathBuf>,
    pub tables: Option<PathBuf>,
    pub population: Option<usize>,
    pub skip_stats: Option<bool>,
    pub h_tend: Option<f64>,
    pub h_quasi: Option<f64>,
    pub h_floor: Option<f64>,
    pub delta: Option<f64>,
    pub prior_weights: Option<[f64; 4]>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub merge_equivalences: Option<bool>,
    pub out_dir: Option<PathBuf>,
    pub emit: Option<Vec<Format>>,
}

macro_rules! overlay {
    ($hi:ident, $lo:ident; $($f:ident),*) => {
        ConfigLayer { $($f: $hi.$f.or($lo.$f)),* }
    };
}

impl ConfigLayer {
    /// `self` wins wherever it is set.
    pub fn over(self, lower: ConfigLayer) -> ConfigLayer {
        overlay!(self, lower; symbolic, context, attribute_order, observations, tables, population,
            skip_stats, h_tend, h_quasi, h_floor, delta, prior_weights, samples, seed,
            merge_equivalences, out_dir, emit)
    }

    pub fn from_env() -> Result<ConfigLayer, CliError> {
        let seed = match std::env::var(SEED_ENV) {
            Ok(v) => Some(v.trim().parse().map_err(|_| {
                CliError::Usage(format!("{SEED_ENV} must be an unsigned integer, got `{v}`"))
            })?),
            Err(std::env::VarError::NotPresent) => None,
            Err(e) => return Err(CliError::Usage(format!("{SEED_ENV}: {e}"))),
        };
        Ok(ConfigLayer {
            seed,
            ..ConfigLayer::default()
        })
    }

    /// Reads a TOML file; relative paths in it are taken from the file's directory.
    pub fn from_toml_file(path: &Path) -> Result<ConfigLayer, CliError> {
        let text = crate::read_text(path)?;
        let mut layer: ConfigLayer = toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut layer.symbolic,
            &mut layer.context,
            &mut layer.observations,
            &mut layer.tables,
            &mut layer.out_dir,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(layer)
    }

    pub fn resolve(self) -> PipelineConfig {
        let th = ClassificationThresholds::default();
        let bayes = BayesConfig::default();
        let mut emit = self
            .emit
            .unwrap_or_else(|| vec![Format::Json, Format::Dot, Format::Csv]);
        emit.sort();
        emit.dedup();
        PipelineConfig {
            symbolic: self.symbolic,
            context: self.context,
            attribute_order: self.attribute_order,
            observations: self.observations,
            tables: self.tables,
            population: self.population,
            skip_stats: self.skip_stats.unwrap_or(false),
            h_tend: self.h_tend.unwrap_or(th.h_tend),
            h_quasi: self.h_quasi.unwrap_or(th.h_quasi),
            h_floor: self.h_floor.unwrap_or(bayes.h_floor),
            delta: self.delta.unwrap_or(bayes.delta),
            prior_weights: self.prior_weights.unwrap_or(bayes.prior_weights),
            samples: self.samples.unwrap_or(bayes.samples),
            seed: self.seed.unwrap_or(bayes.seed),
            merge_equivalences: self.merge_equivalences.unwrap_or(false),
            out_dir: self.out_dir,
            emit,
        }
    }
}

impl From<PipelineConfig> for ConfigLayer {
    fn from(c: PipelineConfig) -> Self {
        ConfigLayer {
            symbolic: c.symbolic,
            context: c.context,
            attribute_order: c.attribute_order,
            observations: c.observations,
            tables: c.tables,
            population: c.population,
            skip_stats: Some(c.skip_stats),
            h_tend: Some(c.h_tend),
            h_quasi: Some(c.h_quasi),
            h_floor: Some(c.h_floor),
            delta: Some(c.delta),
            prior_weights: Some(c.prior_weights),
            samples: Some(c.samples),
            seed: Some(c.seed),
            merge_equivalences: Some(c.merge_equivalences),
            out_dir: c.out_dir,
            emit: Some(c.emit),
        }
    }
}

impl PipelineConfig {
    pub fn thresholds(&self) -> Result<ClassificationThresholds, CliError> {
        Ok(ClassificationThresholds::new(self.h_tend, self.h_quasi)?)
    }

    pub fn bayes(&self) -> Result<BayesConfig, CliError> {
        let cfg = BayesConfig {
            delta: self.delta,
            prior_weights: self.prior_weights,
            samples: self.samples,
            seed: self.seed,
            h_floor: self.h_floor,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn out_dir(&self) -> Result<&Path, CliError> {
        self.out_dir
            .as_deref()
            .ok_or_else(|| CliError::Usage("no output directory: pass --out-dir".into()))
    }
}

pub fn parse_prior(s: &str) -> Result<[f64; 4], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b, c, d] = parts.as_slice() else {
        return Err(format!("expected four comma-separated weights, got `{s}`"));
    };
    let mut out = [0.0; 4];
    for (slot, p) in out.iter_mut().zip([a, b, c, d]) {
        *slot = p.parse().map_err(|_| format!("`{p}` is not a number"))?;
    }
    Ok(out)
}
