//! Reads and writes the annual panel CSV: one row per (country, year),
//! four observable columns, values parsed as plain 64-bit decimals with
//! no rescaling.

use std::collections::BTreeSet;
use std::io;
use std::path::Path;

use macrovar::timeseries::{PanelError, TimeSeriesPanel};
use thiserror::Error;

/// Column order of the interchange schema.
pub const SCHEMA: [&str; 6] = [
    "country",
    "year",
    "gdp",
    "interest_rate",
    "inflation",
    "exchange_rate_usd",
];

/// The observable variable names, in schema order.
pub const VARIABLES: [&str; 4] = ["gdp", "interest_rate", "inflation", "exchange_rate_usd"];

/// Carried in run metadata: the inflation column's source table is
/// mislabeled upstream, and the loader renames rather than guesses.
pub const INFLATION_COLUMN_NOTE: &str = "inflation column transcribed from a source table titled \
     'interest rate'; values are treated as inflation";

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("expected header {expected:?}, found {found:?}")]
    Schema {
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("record {record}: {message}")]
    Parse { record: usize, message: String },
    #[error("record {record}: column {column} is empty")]
    MissingCell { record: usize, column: String },
    #[error("unknown country {0}")]
    UnknownCountry(String),
    #[error(transparent)]
    Panel(#[from] PanelError),
}

/// Per-country panels in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    panels: Vec<(String, TimeSeriesPanel)>,
}

impl Dataset {
    pub fn countries(&self) -> Vec<&str> {
        self.panels.iter().map(|(c, _)| c.as_str()).collect()
    }

    pub fn panel(&self, country: &str) -> Result<&TimeSeriesPanel, DatasetError> {
        self.panels
            .iter()
            .find(|(c, _)| c == country)
            .map(|(_, p)| p)
            .ok_or_else(|| DatasetError::UnknownCountry(country.to_string()))
    }

    pub fn panels(&self) -> impl Iterator<Item = (&str, &TimeSeriesPanel)> {
        self.panels.iter().map(|(c, p)| (c.as_str(), p))
    }
}

pub fn load_dataset(path: &Path) -> Result<Dataset, DatasetError> {
    let raw = std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_dataset(&raw)
}

pub fn parse_dataset(raw: &str) -> Result<Dataset, DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(raw.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| DatasetError::Parse {
            record: 0,
            message: e.to_string(),
        })?
        .iter()
        .map(str::to_string)
        .collect();
    if headers != SCHEMA {
        return Err(DatasetError::Schema {
            expected: SCHEMA.iter().map(|s| s.to_string()).collect(),
            found: headers,
        });
    }

    struct Block {
        years: Vec<i32>,
        columns: Vec<Vec<f64>>,
    }
    let mut order: Vec<String> = Vec::new();
    let mut blocks: Vec<Block> = Vec::new();

    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2; // header is record 1
        let record = record.map_err(|e| DatasetError::Parse {
            record: line,
            message: e.to_string(),
        })?;
        if record.len() != SCHEMA.len() {
            return Err(DatasetError::Parse {
                record: line,
                message: format!("expected {} fields, found {}", SCHEMA.len(), record.len()),
            });
        }
        let cell = |i: usize| -> Result<&str, DatasetError> {
            let v = record.get(i).unwrap_or("");
            if v.is_empty() {
                Err(DatasetError::MissingCell {
                    record: line,
                    column: SCHEMA[i].to_string(),
                })
            } else {
                Ok(v)
            }
        };
        let country = cell(0)?.to_string();
        let year: i32 = cell(1)?.parse().map_err(|_| DatasetError::Parse {
            record: line,
            message: format!("year {:?} is not an integer", record.get(1).unwrap_or("")),
        })?;
        let mut values = [0.0_f64; 4];
        for (v, value) in values.iter_mut().enumerate() {
            let text = cell(v + 2)?;
            *value = text.parse().map_err(|_| DatasetError::Parse {
                record: line,
                message: format!("{} value {text:?} is not a number", SCHEMA[v + 2]),
            })?;
        }
        let slot = match order.iter().position(|c| c == &country) {
            Some(i) => i,
            None => {
                order.push(country.clone());
                blocks.push(Block {
                    years: Vec::new(),
                    columns: vec![Vec::new(); 4],
                });
                order.len() - 1
            }
        };
        blocks[slot].years.push(year);
        for (v, value) in values.iter().enumerate() {
            blocks[slot].columns[v].push(*value);
        }
    }

    let mut panels = Vec::with_capacity(order.len());
    for (country, block) in order.into_iter().zip(blocks) {
        let columns: Vec<(String, Vec<f64>)> = VARIABLES
            .iter()
            .zip(block.columns)
            .map(|(name, col)| (name.to_string(), col))
            .collect();
        let panel = TimeSeriesPanel::build(&country, &block.years, &columns)?;
        panels.push((country, panel));
    }
    Ok(Dataset { panels })
}

/// Serializes a dataset back to the interchange schema. Values print in
/// the shortest form that re-parses to the same 64-bit float, so a
/// load/write/load cycle is lossless.
pub fn write_dataset(dataset: &Dataset) -> String {
    let mut out = String::new();
    out.push_str(&SCHEMA.join(","));
    out.push('\n');
    for (country, panel) in dataset.panels() {
        for &year in panel.years() {
            out.push_str(country);
            out.push(',');
            out.push_str(&year.to_string());
            for var in VARIABLES {
                out.push(',');
                let value = panel
                    .value(year, var)
                    .expect("loader admits only complete panels");
                out.push_str(&value.to_string());
            }
            out.push('\n');
        }
    }
    out
}

/// Countries present in a dataset, deduplicated, preserving file order.
pub fn distinct_countries(dataset: &Dataset) -> Vec<String> {
    let mut seen = BTreeSet::new();
    dataset
        .countries()
        .into_iter()
        .filter(|c| seen.insert(c.to_string()))
        .map(str::to_string)
        .collect()
}
