//! Declarative run configuration: a TOML document merged with
//! command-line overrides into resolved settings. Unknown keys are
//! rejected so typos fail loudly instead of silently using defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use macrovar::dsge::{DsgeParams, ExogenousPeriod};
use macrovar::timeseries::TransformKind;
use macrovar::var::{CovarianceDivisor, LagCriterion};
use serde::Deserialize;
use thiserror::Error;

use crate::dataset::VARIABLES;

pub const DEFAULT_DATASET: &str = "data/emerging_panel.csv";
pub const DEFAULT_OUT_DIR: &str = "out";
pub const DEFAULT_LAGS: usize = 1;
pub const DEFAULT_HORIZON: usize = 10;
pub const DEFAULT_REPLICATIONS: usize = 1000;
pub const DEFAULT_LEVEL: f64 = 0.95;
pub const DEFAULT_MAX_LAGS: usize = 3;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub dataset: Option<String>,
    pub out_dir: Option<String>,
    pub country: Option<String>,
    pub variables: Option<Vec<String>>,
    pub lags: Option<usize>,
    pub horizon: Option<usize>,
    pub covariance_divisor: Option<String>,
    pub transforms: Option<BTreeMap<String, String>>,
    pub bootstrap: Option<BootstrapSection>,
    pub lag_selection: Option<LagSelectionSection>,
    pub dsge: Option<DsgeSection>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapSection {
    pub replications: Option<usize>,
    pub level: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LagSelectionSection {
    pub max_lags: Option<usize>,
    pub criterion: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DsgeSection {
    pub discount: Option<f64>,
    pub risk_aversion: Option<f64>,
    pub labor_disutility: Option<f64>,
    pub labor_curvature: Option<f64>,
    pub capital_share: Option<f64>,
    pub natural_rate: Option<f64>,
    pub taylor_pi: Option<f64>,
    pub taylor_y: Option<f64>,
    pub inflation_target: Option<f64>,
    pub potential_output: Option<f64>,
    pub initial_capital: Option<f64>,
    pub horizon: Option<usize>,
    pub baseline_technology: Option<f64>,
    pub baseline_inflation: Option<f64>,
    pub baseline_labor: Option<f64>,
    pub savings_share: Option<f64>,
    pub events: Option<Vec<DsgeEvent>>,
}

/// Point override of the exogenous path at one period; unset fields
/// keep their baseline values.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DsgeEvent {
    pub period: usize,
    pub technology: Option<f64>,
    pub inflation: Option<f64>,
    pub labor: Option<f64>,
    pub savings_share: Option<f64>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub data: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub country: Option<String>,
    pub vars: Option<Vec<String>>,
    pub lags: Option<usize>,
    pub horizon: Option<usize>,
    pub reps: Option<usize>,
    pub level: Option<f64>,
    pub seed: Option<u64>,
}

pub fn load_file(path: &Path) -> Result<FileConfig, ConfigError> {
    let raw = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    toml::from_str(&raw).map_err(|e| ConfigError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Everything a VAR-family run needs, fully defaulted and validated.
#[derive(Debug, Clone)]
pub struct VarRunSettings {
    pub dataset: PathBuf,
    pub out_dir: PathBuf,
    pub country: String,
    /// Ordered: position fixes the shock ordering.
    pub variables: Vec<String>,
    /// Complete profile for the run's variables, defaults filled in.
    pub transforms: BTreeMap<String, TransformKind>,
    pub lags: usize,
    pub horizon: usize,
    pub divisor: CovarianceDivisor,
    pub replications: usize,
    pub level: f64,
    pub seed: Option<u64>,
    pub max_lags: usize,
    pub criterion: LagCriterion,
}

/// The documented default profile: output levels enter in logs, rates
/// and prices stay in levels.
pub fn default_transform(variable: &str) -> TransformKind {
    if variable == "gdp" {
        TransformKind::Log
    } else {
        TransformKind::Level
    }
}

pub fn resolve_var_run(
    file: &FileConfig,
    overrides: &Overrides,
) -> Result<VarRunSettings, ConfigError> {
    let dataset = overrides
        .data
        .clone()
        .or_else(|| file.dataset.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_DATASET));
    let out_dir = overrides
        .out_dir
        .clone()
        .or_else(|| file.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    let country = overrides
        .country
        .clone()
        .or_else(|| file.country.clone())
        .ok_or_else(|| ConfigError::Invalid("country is required (set country in the config or pass --country)".into()))?;
    let variables = overrides
        .vars
        .clone()
        .or_else(|| file.variables.clone())
        .unwrap_or_else(|| VARIABLES.iter().map(|v| v.to_string()).collect());
    if variables.is_empty() {
        return Err(ConfigError::Invalid("variables must be nonempty".into()));
    }
    for (i, v) in variables.iter().enumerate() {
        if variables[..i].contains(v) {
            return Err(ConfigError::Invalid(format!("variable {v} listed twice")));
        }
        if !VARIABLES.contains(&v.as_str()) {
            return Err(ConfigError::Invalid(format!(
                "unknown variable {v}; the dataset carries {VARIABLES:?}"
            )));
        }
    }

    let mut transforms = BTreeMap::new();
    if let Some(section) = &file.transforms {
        for (var, name) in section {
            if !VARIABLES.contains(&var.as_str()) {
                return Err(ConfigError::Invalid(format!(
                    "transform listed for unknown variable {var}"
                )));
            }
            let kind = TransformKind::parse(name).ok_or_else(|| {
                ConfigError::Invalid(format!(
                    "unknown transform {name:?} for {var}; expected level, log, diff, log_diff, or standardize"
                ))
            })?;
            transforms.insert(var.clone(), kind);
        }
    }
    for v in &variables {
        transforms
            .entry(v.clone())
            .or_insert_with(|| default_transform(v));
    }
    // keep only the run's variables so metadata reflects what applied
    transforms.retain(|k, _| variables.contains(k));

    let lags = overrides.lags.or(file.lags).unwrap_or(DEFAULT_LAGS);
    if lags == 0 {
        return Err(ConfigError::Invalid("lags must be at least 1".into()));
    }
    let horizon = overrides
        .horizon
        .or(file.horizon)
        .unwrap_or(DEFAULT_HORIZON);

    let divisor = match &file.covariance_divisor {
        None => CovarianceDivisor::DegreesOfFreedom,
        Some(name) => CovarianceDivisor::parse(name).ok_or_else(|| {
            ConfigError::Invalid(format!(
                "unknown covariance_divisor {name:?}; expected degrees_of_freedom or sample_size"
            ))
        })?,
    };

    let boot = file.bootstrap.clone().unwrap_or_default();
    let replications = overrides
        .reps
        .or(boot.replications)
        .unwrap_or(DEFAULT_REPLICATIONS);
    let level = overrides.level.or(boot.level).unwrap_or(DEFAULT_LEVEL);
    if !(level > 0.0 && level < 1.0) {
        return Err(ConfigError::Invalid(format!(
            "confidence level must lie strictly between 0 and 1, got {level}"
        )));
    }
    if replications < 100 {
        return Err(ConfigError::Invalid(format!(
            "bootstrap needs at least 100 replications, got {replications}"
        )));
    }
    let seed = overrides.seed.or(boot.seed);

    let selection = file.lag_selection.clone().unwrap_or_default();
    let max_lags = overrides
        .lags
        .or(selection.max_lags)
        .unwrap_or(DEFAULT_MAX_LAGS);
    let criterion = match &selection.criterion {
        None => LagCriterion::Bic,
        Some(name) => LagCriterion::parse(name).ok_or_else(|| {
            ConfigError::Invalid(format!(
                "unknown lag selection criterion {name:?}; expected aic or bic"
            ))
        })?,
    };

    Ok(VarRunSettings {
        dataset,
        out_dir,
        country,
        variables,
        transforms,
        lags,
        horizon,
        divisor,
        replications,
        level,
        seed,
        max_lags,
        criterion,
    })
}

/// Resolved inputs of a `simulate` run.
#[derive(Debug, Clone)]
pub struct DsgeSettings {
    pub out_dir: PathBuf,
    pub params: DsgeParams,
    pub initial_capital: f64,
    pub path: Vec<ExogenousPeriod>,
}

pub fn resolve_dsge_run(
    file: &FileConfig,
    overrides: &Overrides,
) -> Result<DsgeSettings, ConfigError> {
    let section = file.dsge.clone().unwrap_or_default();
    let out_dir = overrides
        .out_dir
        .clone()
        .or_else(|| file.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));

    let params = DsgeParams::new(
        section.discount.unwrap_or(0.96),
        section.risk_aversion.unwrap_or(2.0),
        section.labor_disutility.unwrap_or(1.0),
        section.labor_curvature.unwrap_or(1.0),
        section.capital_share.unwrap_or(0.33),
        section.natural_rate.unwrap_or(0.02),
        section.taylor_pi.unwrap_or(1.5),
        section.taylor_y.unwrap_or(0.5),
        section.inflation_target.unwrap_or(0.02),
        section.potential_output.unwrap_or(1.0),
    )
    .map_err(|e| ConfigError::Invalid(e.to_string()))?;

    let horizon = overrides.horizon.or(section.horizon).unwrap_or(200);
    if horizon == 0 {
        return Err(ConfigError::Invalid("dsge horizon must be at least 1".into()));
    }
    let baseline = ExogenousPeriod {
        technology: section.baseline_technology.unwrap_or(1.0),
        inflation: section
            .baseline_inflation
            .unwrap_or(params.inflation_target),
        labor: section.baseline_labor.unwrap_or(1.0),
        savings_share: section.savings_share.unwrap_or(0.2),
    };
    let mut path = vec![baseline; horizon];
    for event in section.events.unwrap_or_default() {
        if event.period >= horizon {
            return Err(ConfigError::Invalid(format!(
                "event period {} is beyond the horizon {horizon}",
                event.period
            )));
        }
        let slot = &mut path[event.period];
        if let Some(v) = event.technology {
            slot.technology = v;
        }
        if let Some(v) = event.inflation {
            slot.inflation = v;
        }
        if let Some(v) = event.labor {
            slot.labor = v;
        }
        if let Some(v) = event.savings_share {
            slot.savings_share = v;
        }
    }

    Ok(DsgeSettings {
        out_dir,
        params,
        initial_capital: section.initial_capital.unwrap_or(1.0),
        path,
    })
}

/// Settings of a `report` run: just the file locations.
#[derive(Debug, Clone)]
pub struct ReportSettings {
    pub dataset: PathBuf,
    pub out_dir: PathBuf,
}

pub fn resolve_report_run(file: &FileConfig, overrides: &Overrides) -> ReportSettings {
    ReportSettings {
        dataset: overrides
            .data
            .clone()
            .or_else(|| file.dataset.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_DATASET)),
        out_dir: overrides
            .out_dir
            .clone()
            .or_else(|| file.out_dir.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)),
    }
}
