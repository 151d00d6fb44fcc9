//! The six run pipelines behind the subcommands. Each loads its inputs,
//! drives the library, and writes CSV/SVG artifacts plus a meta.json
//! that records every reproducibility-relevant decision.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use macrovar::dsge;
use macrovar::timeseries::{Sample, TimeSeriesPanel};
use macrovar::var::{
    self, estimate_var_with_divisor, select_lag_detailed, IrfResult, VarEstimate, VarSpec,
};
use serde::Serialize;

use crate::config::{DsgeSettings, ReportSettings, VarRunSettings};
use crate::dataset::{load_dataset, Dataset, INFLATION_COLUMN_NOTE, VARIABLES};
use crate::error::CliError;
use crate::svg::irf_chart;

/// Files written by a run, in write order, for the process to report.
pub struct RunOutput {
    pub files: Vec<PathBuf>,
}

#[derive(Serialize)]
struct BootstrapMeta {
    replications: usize,
    level: f64,
    seed: u64,
}

#[derive(Serialize)]
struct StabilityMeta {
    spectral_radius: f64,
    is_stable: bool,
}

#[derive(Serialize)]
struct LagSelectionMeta {
    max_lags: usize,
    criterion: String,
    chosen: usize,
}

#[derive(Serialize)]
struct DsgeMeta {
    discount: f64,
    risk_aversion: f64,
    labor_disutility: f64,
    labor_curvature: f64,
    capital_share: f64,
    natural_rate: f64,
    taylor_pi: f64,
    taylor_y: f64,
    inflation_target: f64,
    potential_output: f64,
    initial_capital: f64,
    horizon: usize,
    tail_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    tail_bound_note: Option<String>,
}

/// Reproducibility record accompanying every artifact set. Field order
/// is the serialization order, so equal runs give byte-equal files.
#[derive(Serialize)]
struct RunMeta {
    command: String,
    version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    dataset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    country: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    variables: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ordering_note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    transforms: Option<BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lags: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    horizon: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    covariance_divisor: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sample_years: Option<(i32, i32)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bootstrap: Option<BootstrapMeta>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stability: Option<StabilityMeta>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lag_selection: Option<LagSelectionMeta>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dsge: Option<DsgeMeta>,
    data_notes: Vec<String>,
}

impl RunMeta {
    fn new(command: &str) -> RunMeta {
        RunMeta {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            dataset: None,
            country: None,
            variables: None,
            ordering_note: None,
            transforms: None,
            lags: None,
            horizon: None,
            covariance_divisor: None,
            sample_years: None,
            bootstrap: None,
            stability: None,
            lag_selection: None,
            dsge: None,
            data_notes: vec![INFLATION_COLUMN_NOTE.to_string()],
        }
    }

    fn for_var_run(command: &str, settings: &VarRunSettings, sample: &Sample) -> RunMeta {
        let mut meta = RunMeta::new(command);
        meta.dataset = Some(settings.dataset.display().to_string());
        meta.country = Some(settings.country.clone());
        meta.variables = Some(settings.variables.clone());
        meta.ordering_note = Some(
            "variable order is the shock ordering: earlier variables do not respond \
             contemporaneously to later variables' shocks"
                .to_string(),
        );
        meta.transforms = Some(
            settings
                .transforms
                .iter()
                .map(|(k, v)| (k.clone(), v.name().to_string()))
                .collect(),
        );
        meta.lags = Some(settings.lags);
        meta.covariance_divisor = Some(settings.divisor.name().to_string());
        meta.sample_years = Some((sample.years[0], *sample.years.last().expect("nonempty")));
        meta
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::from(e).at_stage("creating output directory"))?;
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| CliError::from(e).at_stage("writing output"))?;
    Ok(path)
}

fn write_meta(dir: &Path, meta: &RunMeta) -> Result<PathBuf, CliError> {
    let body = serde_json::to_string_pretty(meta)
        .map_err(|e| CliError::Data(format!("serializing metadata: {e}")))?;
    write_file(dir, "meta.json", &format!("{body}\n"))
}

/// Loads the dataset, applies the configured transform profile to the
/// run's country, and extracts the complete-case sample in the
/// configured variable order.
fn prepare_sample(settings: &VarRunSettings) -> Result<(Sample, VarSpec), CliError> {
    let dataset =
        load_dataset(&settings.dataset).map_err(|e| CliError::from(e).at_stage("loading dataset"))?;
    let mut panel: TimeSeriesPanel = dataset
        .panel(&settings.country)
        .map_err(|e| CliError::from(e).at_stage("selecting country"))?
        .clone();
    for variable in &settings.variables {
        let kind = settings.transforms[variable];
        panel = panel
            .apply_transform(variable, kind)
            .map_err(|e| CliError::from(e).at_stage("applying transforms"))?;
    }
    let sample = panel
        .complete_cases(&settings.variables)
        .map_err(|e| CliError::from(e).at_stage("extracting complete cases"))?;
    let spec = VarSpec::new(settings.variables.clone(), settings.lags)
        .map_err(|e| CliError::from(e).at_stage("building specification"))?;
    Ok((sample, spec))
}

fn estimate(settings: &VarRunSettings) -> Result<(Sample, VarSpec, VarEstimate), CliError> {
    let (sample, spec) = prepare_sample(settings)?;
    let est = estimate_var_with_divisor(&sample, &spec, settings.divisor)
        .map_err(|e| CliError::from(e).at_stage("estimation"))?;
    Ok((sample, spec, est))
}

fn float(v: f64) -> String {
    v.to_string()
}

fn estimate_csv(est: &VarEstimate) -> String {
    let names = &est.spec.variable_names;
    let mut out = String::from("kind,equation,term,value\n");
    for (i, eq) in names.iter().enumerate() {
        if est.spec.include_intercept {
            let _ = writeln!(out, "coefficient,{eq},intercept,{}", float(est.intercept[i]));
        }
        for (lag, a) in est.lag_matrices.iter().enumerate() {
            for (j, var) in names.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "coefficient,{eq},{var}.lag{},{}",
                    lag + 1,
                    float(a[(i, j)])
                );
            }
        }
    }
    for (i, row_var) in names.iter().enumerate() {
        for (j, col_var) in names.iter().enumerate() {
            let _ = writeln!(
                out,
                "covariance,{row_var},{col_var},{}",
                float(est.sigma[(i, j)])
            );
        }
    }
    out
}

fn irf_csv(irf: &IrfResult) -> String {
    let names = &irf.ordering;
    let mut out = String::from("horizon,response_variable,shock_variable,point,lower,upper\n");
    for (h, theta) in irf.point.iter().enumerate() {
        for (i, response) in names.iter().enumerate() {
            for (j, shock) in names.iter().enumerate() {
                let (lower, upper) = match &irf.bands {
                    Some(b) => (float(b.lower[h][(i, j)]), float(b.upper[h][(i, j)])),
                    None => (String::new(), String::new()),
                };
                let _ = writeln!(
                    out,
                    "{h},{response},{shock},{},{lower},{upper}",
                    float(theta[(i, j)])
                );
            }
        }
    }
    out
}

pub fn run_estimate(settings: &VarRunSettings) -> Result<RunOutput, CliError> {
    let (sample, _spec, est) = estimate(settings)?;
    let stab = var::stability(&est).map_err(|e| CliError::from(e).at_stage("stability"))?;
    let mut meta = RunMeta::for_var_run("estimate", settings, &sample);
    meta.stability = Some(StabilityMeta {
        spectral_radius: stab.radius,
        is_stable: stab.is_stable,
    });
    let mut files = Vec::new();
    files.push(write_file(&settings.out_dir, "estimate.csv", &estimate_csv(&est))?);
    files.push(write_meta(&settings.out_dir, &meta)?);
    Ok(RunOutput { files })
}

pub fn run_irf(settings: &VarRunSettings) -> Result<RunOutput, CliError> {
    let seed = settings.seed.ok_or_else(|| {
        CliError::Config(
            "bootstrap seed is required for irf runs (set [bootstrap] seed or pass --seed)"
                .to_string(),
        )
    })?;
    let (sample, spec, est) = estimate(settings)?;
    let stab = var::stability(&est).map_err(|e| CliError::from(e).at_stage("stability"))?;
    let irf = bootstrap_bands_with_divisor(settings, &sample, &spec, seed)?;

    let mut meta = RunMeta::for_var_run("irf", settings, &sample);
    meta.horizon = Some(settings.horizon);
    meta.bootstrap = Some(BootstrapMeta {
        replications: settings.replications,
        level: settings.level,
        seed,
    });
    meta.stability = Some(StabilityMeta {
        spectral_radius: stab.radius,
        is_stable: stab.is_stable,
    });

    let title = format!(
        "{}: orthogonalized impulse responses (lags {}, {}% bands)",
        settings.country,
        settings.lags,
        float(settings.level * 100.0)
    );
    let description = format!(
        "ordering={}; transforms={}; divisor={}; seed={seed}; replications={}; level={}",
        settings.variables.join(">"),
        settings
            .transforms
            .iter()
            .map(|(k, v)| format!("{k}:{}", v.name()))
            .collect::<Vec<_>>()
            .join(","),
        settings.divisor.name(),
        settings.replications,
        float(settings.level),
    );

    let mut files = Vec::new();
    files.push(write_file(&settings.out_dir, "irf.csv", &irf_csv(&irf))?);
    files.push(write_file(
        &settings.out_dir,
        "irf.svg",
        &irf_chart(&irf, &title, &description),
    )?);
    files.push(write_file(&settings.out_dir, "estimate.csv", &estimate_csv(&est))?);
    files.push(write_meta(&settings.out_dir, &meta)?);
    Ok(RunOutput { files })
}

fn bootstrap_bands_with_divisor(
    settings: &VarRunSettings,
    sample: &Sample,
    spec: &VarSpec,
    seed: u64,
) -> Result<IrfResult, CliError> {
    var::bootstrap_bands_with_options(
        sample,
        spec,
        settings.horizon,
        settings.replications,
        settings.level,
        seed,
        var::BootstrapOptions {
            divisor: settings.divisor,
            parallel: true,
        },
    )
    .map_err(|e| CliError::from(e).at_stage("bootstrap"))
}

pub fn run_stability(settings: &VarRunSettings) -> Result<RunOutput, CliError> {
    let (sample, _spec, est) = estimate(settings)?;
    let stab = var::stability(&est).map_err(|e| CliError::from(e).at_stage("stability"))?;
    let mut meta = RunMeta::for_var_run("stability", settings, &sample);
    meta.stability = Some(StabilityMeta {
        spectral_radius: stab.radius,
        is_stable: stab.is_stable,
    });
    let body = format!(
        "country,lags,spectral_radius,is_stable\n{},{},{},{}\n",
        settings.country,
        settings.lags,
        float(stab.radius),
        stab.is_stable
    );
    let mut files = Vec::new();
    files.push(write_file(&settings.out_dir, "stability.csv", &body)?);
    files.push(write_meta(&settings.out_dir, &meta)?);
    Ok(RunOutput { files })
}

pub fn run_lagselect(settings: &VarRunSettings) -> Result<RunOutput, CliError> {
    let (sample, spec) = prepare_sample(settings)?;
    let (chosen, scores) = select_lag_detailed(&sample, &spec, settings.max_lags, settings.criterion)
        .map_err(|e| CliError::from(e).at_stage("lag selection"))?;
    let mut body = String::from("lag,criterion,value,chosen\n");
    for score in &scores {
        let _ = writeln!(
            body,
            "{},{},{},{}",
            score.lag,
            settings.criterion.name(),
            float(score.criterion_value),
            score.lag == chosen
        );
    }
    let mut meta = RunMeta::for_var_run("lagselect", settings, &sample);
    meta.lags = None; // the candidate sweep, not a fitted order
    meta.lag_selection = Some(LagSelectionMeta {
        max_lags: settings.max_lags,
        criterion: settings.criterion.name().to_string(),
        chosen,
    });
    let mut files = Vec::new();
    files.push(write_file(&settings.out_dir, "lag_selection.csv", &body)?);
    files.push(write_meta(&settings.out_dir, &meta)?);
    Ok(RunOutput { files })
}

pub fn run_report(settings: &ReportSettings) -> Result<RunOutput, CliError> {
    let dataset =
        load_dataset(&settings.dataset).map_err(|e| CliError::from(e).at_stage("loading dataset"))?;
    let body = panel_summary_csv(&dataset)?;
    let mut meta = RunMeta::new("report");
    meta.dataset = Some(settings.dataset.display().to_string());
    meta.variables = Some(
        ["gdp_growth"]
            .iter()
            .map(|s| s.to_string())
            .chain(VARIABLES.iter().skip(1).map(|s| s.to_string()))
            .collect(),
    );
    let mut files = Vec::new();
    files.push(write_file(&settings.out_dir, "panel_summary.csv", &body)?);
    files.push(write_meta(&settings.out_dir, &meta)?);
    Ok(RunOutput { files })
}

/// Long-format comparison table: growth is the log difference of the
/// output level, so the first year of each country is blank.
fn panel_summary_csv(dataset: &Dataset) -> Result<String, CliError> {
    let mut out = String::from("country,year,gdp_growth,interest_rate,inflation,exchange_rate_usd\n");
    for (country, panel) in dataset.panels() {
        let years = panel.years();
        for (idx, &year) in years.iter().enumerate() {
            let gdp = panel.value(year, "gdp").expect("loader admits complete panels");
            let growth = if idx == 0 {
                String::new()
            } else {
                let prev = panel
                    .value(years[idx - 1], "gdp")
                    .expect("loader admits complete panels");
                if gdp <= 0.0 || prev <= 0.0 {
                    return Err(CliError::Data(format!(
                        "{country} {year}: cannot compute log growth from nonpositive output"
                    )));
                }
                float((gdp / prev).ln())
            };
            let _ = writeln!(
                out,
                "{country},{year},{growth},{},{},{}",
                float(panel.value(year, "interest_rate").expect("complete")),
                float(panel.value(year, "inflation").expect("complete")),
                float(panel.value(year, "exchange_rate_usd").expect("complete")),
            );
        }
    }
    Ok(out)
}

pub fn run_simulate(settings: &DsgeSettings) -> Result<RunOutput, CliError> {
    let initial = dsge::EconomyState {
        capital: settings.initial_capital,
        technology: 1.0,
        ..dsge::EconomyState::default()
    };
    let result = dsge::simulate(&initial, &settings.path, &settings.params)
        .map_err(|e| CliError::from(e).at_stage("simulation"))?;

    let mut body = String::from("period,output,policy_rate,consumption\n");
    for (t, outcome) in result.periods.iter().enumerate() {
        let _ = writeln!(
            body,
            "{t},{},{},{}",
            float(outcome.output),
            float(outcome.policy_rate),
            float(outcome.consumption)
        );
    }
    let _ = writeln!(body, "# total_utility={}", float(result.total_utility));
    let _ = writeln!(body, "# tail_bound={}", float(result.tail_bound));

    let p = &settings.params;
    let mut meta = RunMeta::new("simulate");
    meta.dsge = Some(DsgeMeta {
        discount: p.discount,
        risk_aversion: p.risk_aversion,
        labor_disutility: p.labor_disutility,
        labor_curvature: p.labor_curvature,
        capital_share: p.capital_share,
        natural_rate: p.natural_rate,
        taylor_pi: p.taylor_pi,
        taylor_y: p.taylor_y,
        inflation_target: p.inflation_target,
        potential_output: p.potential_output,
        initial_capital: settings.initial_capital,
        horizon: settings.path.len(),
        tail_bound: result.tail_bound,
        tail_bound_note: (result.tail_bound > 0.01).then(|| {
            format!(
                "truncation tail bound {} is loose; extend the horizon for a tighter utility total",
                float(result.tail_bound)
            )
        }),
    });
    let mut files = Vec::new();
    files.push(write_file(&settings.out_dir, "dsge_paths.csv", &body)?);
    files.push(write_meta(&settings.out_dir, &meta)?);
    Ok(RunOutput { files })
}
