//! Annual country panels and the deterministic column transforms applied
//! before estimation.
//!
//! A panel is immutable: every operation returns a new value, so panels
//! can be shared across threads freely. Missing entries exist only where
//! a difference transform consumed the first observation; input data with
//! gaps is rejected upstream.

use thiserror::Error;

use crate::numerics::Matrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PanelError {
    #[error("column {name} has {got} values but there are {expected} years")]
    LengthMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("years must be strictly increasing: {0} follows {1}")]
    YearOrder(i32, i32),
    #[error("variable {0} appears more than once")]
    DuplicateVariable(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("{variable} year {year}: {value} is not strictly positive, log-family transform undefined")]
    NonPositiveValue {
        variable: String,
        year: i32,
        value: f64,
    },
    #[error("{0} has zero variance, cannot standardize")]
    ZeroVariance(String),
    #[error("no rows are complete for the requested variables")]
    EmptyResult,
    #[error("panel must contain at least one year and one variable")]
    Empty,
    #[error("{variable} year {year}: value is not finite")]
    NonFinite { variable: String, year: i32 },
}

/// A transform request. `Standardize` fits its location and scale from
/// the data when applied; see [`AppliedTransform`] for the fitted record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    Level,
    Log,
    Diff,
    LogDiff,
    Standardize,
}

impl TransformKind {
    pub fn name(self) -> &'static str {
        match self {
            TransformKind::Level => "level",
            TransformKind::Log => "log",
            TransformKind::Diff => "diff",
            TransformKind::LogDiff => "log_diff",
            TransformKind::Standardize => "standardize",
        }
    }

    /// Parses the configuration spelling of a transform.
    pub fn parse(s: &str) -> Option<TransformKind> {
        match s {
            "level" => Some(TransformKind::Level),
            "log" => Some(TransformKind::Log),
            "diff" => Some(TransformKind::Diff),
            "log_diff" => Some(TransformKind::LogDiff),
            "standardize" => Some(TransformKind::Standardize),
            _ => None,
        }
    }
}

/// A transform that has been applied to a column, with any parameters
/// fitted at application time. The record is enough to undo or replay
/// the transform exactly.
#[derive(Debug, Clone, PartialEq)]
pub enum AppliedTransform {
    Level,
    Log,
    Diff,
    LogDiff,
    Standardize { mean: f64, stddev: f64 },
}

impl AppliedTransform {
    pub fn describe(&self) -> String {
        match self {
            AppliedTransform::Level => "level".into(),
            AppliedTransform::Log => "log".into(),
            AppliedTransform::Diff => "diff".into(),
            AppliedTransform::LogDiff => "log_diff".into(),
            AppliedTransform::Standardize { mean, stddev } => {
                format!("standardize(mean={mean}, stddev={stddev})")
            }
        }
    }
}

/// Annual observations for one country: a strictly increasing year axis
/// and one column per variable. Entries are `None` only where a diff
/// transform dropped the first observation.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesPanel {
    country: String,
    years: Vec<i32>,
    variables: Vec<String>,
    columns: Vec<Vec<Option<f64>>>,
    chains: Vec<Vec<AppliedTransform>>,
}

impl TimeSeriesPanel {
    /// Builds a panel from named columns. Values are stored exactly as
    /// given, no rescaling.
    pub fn build(
        country: &str,
        years: &[i32],
        columns: &[(String, Vec<f64>)],
    ) -> Result<Self, PanelError> {
        if years.is_empty() || columns.is_empty() {
            return Err(PanelError::Empty);
        }
        for w in years.windows(2) {
            if w[1] <= w[0] {
                return Err(PanelError::YearOrder(w[1], w[0]));
            }
        }
        let mut names: Vec<&str> = Vec::with_capacity(columns.len());
        for (name, values) in columns {
            if names.contains(&name.as_str()) {
                return Err(PanelError::DuplicateVariable(name.clone()));
            }
            names.push(name);
            if values.len() != years.len() {
                return Err(PanelError::LengthMismatch {
                    name: name.clone(),
                    expected: years.len(),
                    got: values.len(),
                });
            }
            for (i, v) in values.iter().enumerate() {
                if !v.is_finite() {
                    return Err(PanelError::NonFinite {
                        variable: name.clone(),
                        year: years[i],
                    });
                }
            }
        }
        Ok(TimeSeriesPanel {
            country: country.to_string(),
            years: years.to_vec(),
            variables: columns.iter().map(|(n, _)| n.clone()).collect(),
            columns: columns
                .iter()
                .map(|(_, v)| v.iter().map(|x| Some(*x)).collect())
                .collect(),
            chains: vec![Vec::new(); columns.len()],
        })
    }

    pub fn country(&self) -> &str {
        &self.country
    }

    pub fn years(&self) -> &[i32] {
        &self.years
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn value(&self, year: i32, variable: &str) -> Option<f64> {
        let col = self.variables.iter().position(|v| v == variable)?;
        let row = self.years.iter().position(|&y| y == year)?;
        self.columns[col][row]
    }

    pub fn column(&self, variable: &str) -> Result<&[Option<f64>], PanelError> {
        let col = self
            .variables
            .iter()
            .position(|v| v == variable)
            .ok_or_else(|| PanelError::UnknownVariable(variable.to_string()))?;
        Ok(&self.columns[col])
    }

    /// The transforms applied to a column so far, in application order.
    pub fn chain(&self, variable: &str) -> Result<&[AppliedTransform], PanelError> {
        let col = self
            .variables
            .iter()
            .position(|v| v == variable)
            .ok_or_else(|| PanelError::UnknownVariable(variable.to_string()))?;
        Ok(&self.chains[col])
    }

    /// Applies one transform to one column, leaving every other column
    /// bitwise untouched. Diff-family transforms mark the first present
    /// observation of the column as missing.
    pub fn apply_transform(
        &self,
        variable: &str,
        kind: TransformKind,
    ) -> Result<TimeSeriesPanel, PanelError> {
        let col = self
            .variables
            .iter()
            .position(|v| v == variable)
            .ok_or_else(|| PanelError::UnknownVariable(variable.to_string()))?;

        let source = &self.columns[col];
        let (new_col, applied) = match kind {
            TransformKind::Level => (source.clone(), AppliedTransform::Level),
            TransformKind::Log => {
                let mut out = Vec::with_capacity(source.len());
                for (i, v) in source.iter().enumerate() {
                    match v {
                        None => out.push(None),
                        Some(x) if *x > 0.0 => out.push(Some(x.ln())),
                        Some(x) => {
                            return Err(PanelError::NonPositiveValue {
                                variable: variable.to_string(),
                                year: self.years[i],
                                value: *x,
                            })
                        }
                    }
                }
                (out, AppliedTransform::Log)
            }
            TransformKind::Diff => (diff_column(source), AppliedTransform::Diff),
            TransformKind::LogDiff => {
                let mut logged = Vec::with_capacity(source.len());
                for (i, v) in source.iter().enumerate() {
                    match v {
                        None => logged.push(None),
                        Some(x) if *x > 0.0 => logged.push(Some(x.ln())),
                        Some(x) => {
                            return Err(PanelError::NonPositiveValue {
                                variable: variable.to_string(),
                                year: self.years[i],
                                value: *x,
                            })
                        }
                    }
                }
                (diff_column(&logged), AppliedTransform::LogDiff)
            }
            TransformKind::Standardize => {
                let present: Vec<f64> = source.iter().flatten().copied().collect();
                let n = present.len() as f64;
                if present.is_empty() {
                    return Err(PanelError::ZeroVariance(variable.to_string()));
                }
                let mean = present.iter().sum::<f64>() / n;
                let var = present.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
                let stddev = var.sqrt();
                if stddev == 0.0 {
                    return Err(PanelError::ZeroVariance(variable.to_string()));
                }
                (
                    source
                        .iter()
                        .map(|v| v.map(|x| (x - mean) / stddev))
                        .collect(),
                    AppliedTransform::Standardize { mean, stddev },
                )
            }
        };

        let mut out = self.clone();
        out.columns[col] = new_col;
        out.chains[col].push(applied);
        Ok(out)
    }

    /// Rows where every requested variable is present, columns in the
    /// requested order. The returned column order fixes the shock
    /// ordering used downstream.
    pub fn complete_cases(&self, variables: &[String]) -> Result<Sample, PanelError> {
        let mut cols = Vec::with_capacity(variables.len());
        for name in variables {
            let idx = self
                .variables
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| PanelError::UnknownVariable(name.clone()))?;
            if cols.contains(&idx) {
                return Err(PanelError::DuplicateVariable(name.clone()));
            }
            cols.push(idx);
        }
        let mut years = Vec::new();
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (r, &year) in self.years.iter().enumerate() {
            let row: Option<Vec<f64>> = cols.iter().map(|&c| self.columns[c][r]).collect();
            if let Some(row) = row {
                years.push(year);
                rows.push(row);
            }
        }
        if rows.is_empty() {
            return Err(PanelError::EmptyResult);
        }
        let matrix = Matrix::from_rows(&rows).expect("complete rows share the requested width");
        Ok(Sample {
            years,
            variables: variables.to_vec(),
            matrix,
        })
    }
}

/// First difference; the first present value becomes missing.
fn diff_column(source: &[Option<f64>]) -> Vec<Option<f64>> {
    let mut out = Vec::with_capacity(source.len());
    let mut prev: Option<f64> = None;
    for v in source {
        match (prev, v) {
            (_, None) => out.push(None),
            (None, Some(_)) => out.push(None),
            (Some(p), Some(x)) => out.push(Some(x - p)),
        }
        if v.is_some() {
            prev = *v;
        }
    }
    out
}

/// Estimation-ready data: complete rows only, in year order.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub years: Vec<i32>,
    pub variables: Vec<String>,
    pub matrix: Matrix,
}
