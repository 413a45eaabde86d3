//! File formats: criteria configs (JSON), decision matrices and preference
//! index matrices (CSV), and atomic report output.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Alternative, Criterion, DecisionMatrix, Direction, Interval, PreferenceFunction};
use crate::objectives::PortfolioSpec;
use crate::promethee::{Flow, FlowTable, PreferenceIndexMatrix};
use crate::screening::{Condition, ConditionSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum ConditionConfig {
    Interval { lo: f64, hi: f64 },
    AtLeast { min: f64 },
    AtMost { max: f64 },
}

impl ConditionConfig {
    pub fn to_condition(self) -> Result<Condition> {
        match self {
            ConditionConfig::Interval { lo, hi } => Ok(Condition::Within(Interval::new(lo, hi)?)),
            ConditionConfig::AtLeast { min } if min.is_finite() => Ok(Condition::AtLeast(min)),
            ConditionConfig::AtMost { max } if max.is_finite() => Ok(Condition::AtMost(max)),
            other => Err(Error::InvalidCondition(format!("non-finite bound in {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriterionConfig {
    pub id: String,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub category: Option<String>,
    pub direction: Direction,
    /// Omitted weights default to 1, i.e. equal importance.
    #[serde(default)]
    pub weight: Option<f64>,
    #[serde(default)]
    pub preference: Option<PreferenceFunction>,
    #[serde(default)]
    pub condition: Option<ConditionConfig>,
    /// Annotation only; values are compared in the matrix's units.
    #[serde(default)]
    pub unit: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriteriaConfig {
    pub criteria: Vec<CriterionConfig>,
}

impl CriteriaConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let config: CriteriaConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: source.to_string(),
            line: e.line() as u64,
            column: e.column().to_string(),
            message: e.to_string(),
        })?;
        config.validate().map_err(|e| Error::file(source, e))?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        if self.criteria.is_empty() {
            return Err(Error::InvalidMatrix("config lists no criteria".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for c in &self.criteria {
            if !seen.insert(c.id.as_str()) {
                return Err(Error::InvalidMatrix(format!("duplicate criterion id `{}`", c.id)));
            }
            if let Some(w) = c.weight {
                if !(w.is_finite() && w >= 0.0) {
                    return Err(Error::InvalidMatrix(format!("criterion `{}` has invalid weight {w}", c.id)));
                }
            }
            if let Some(p) = &c.preference {
                p.validate()
                    .map_err(|e| Error::InvalidMatrix(format!("criterion `{}`: {e}", c.id)))?;
            }
            if let Some(cond) = c.condition {
                cond.to_condition()
                    .map_err(|e| Error::InvalidMatrix(format!("criterion `{}`: {e}", c.id)))?;
            }
        }
        Ok(())
    }

    pub fn ids(&self) -> Vec<&str> {
        self.criteria.iter().map(|c| c.id.as_str()).collect()
    }

    /// Criteria in config order. `default_preference` fills in entries that
    /// do not name a preference function.
    pub fn to_criteria(&self, default_preference: PreferenceFunction) -> Result<Vec<Criterion>> {
        self.criteria
            .iter()
            .map(|c| {
                let mut criterion = Criterion::new(c.id.clone(), c.direction)
                    .with_weight(c.weight.unwrap_or(1.0))
                    .with_preference(c.preference.unwrap_or(default_preference));
                if let Some(name) = &c.name {
                    criterion = criterion.with_name(name.clone());
                }
                if let Some(ConditionConfig::Interval { lo, hi }) = c.condition {
                    criterion = criterion.with_feasible_interval(Interval::new(lo, hi)?);
                }
                Ok(criterion)
            })
            .collect()
    }

    pub fn conditions(&self) -> Result<ConditionSet> {
        let mut set = ConditionSet::new();
        for c in &self.criteria {
            if let Some(cond) = c.condition {
                set.insert(c.id.clone(), cond.to_condition()?);
            }
        }
        Ok(set)
    }
}

fn parse_error(path: &str, line: u64, column: impl ToString, message: impl ToString) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        column: column.to_string(),
        message: message.to_string(),
    }
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes())
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Loads a matrix whose first column names the alternative and whose other
/// columns are criterion ids, in any order. Values are stored in the
/// config's criterion order.
pub fn load_matrix(path: impl AsRef<Path>, config: &CriteriaConfig) -> Result<DecisionMatrix> {
    load_matrix_with(path, config, PreferenceFunction::Usual)
}

/// As [`load_matrix`], with `default_preference` for criteria whose config
/// names none.
pub fn load_matrix_with(
    path: impl AsRef<Path>,
    config: &CriteriaConfig,
    default_preference: PreferenceFunction,
) -> Result<DecisionMatrix> {
    let path = path.as_ref();
    let criteria = config.to_criteria(default_preference)?;
    parse_matrix(&read_file(path)?, &path.display().to_string(), criteria)
}

pub fn parse_matrix(text: &str, source: &str, criteria: Vec<Criterion>) -> Result<DecisionMatrix> {
    let mut reader = csv_reader(text);
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| parse_error(source, 1, "-", e))?,
        None => return Err(Error::file(source, "empty file")),
    };
    let columns: Vec<&str> = header.iter().skip(1).collect();

    // column position in the file for each criterion, in criterion order
    let mut positions = Vec::with_capacity(criteria.len());
    for c in &criteria {
        let hits: Vec<usize> = columns
            .iter()
            .enumerate()
            .filter(|(_, h)| **h == c.id)
            .map(|(i, _)| i + 1)
            .collect();
        match hits.as_slice() {
            [one] => positions.push(*one),
            [] => return Err(parse_error(source, 1, &c.id, "missing column for criterion")),
            _ => return Err(parse_error(source, 1, &c.id, "duplicate column")),
        }
    }
    if let Some(extra) = columns.iter().find(|h| !criteria.iter().any(|c| c.id == **h)) {
        return Err(parse_error(source, 1, extra, "column does not match any configured criterion"));
    }

    let mut alternatives = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for record in records {
        let record = record.map_err(|e| parse_error(source, 0, "-", e))?;
        let line = record_line(&record);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != header.len() {
            return Err(parse_error(
                source,
                line,
                "-",
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        let name = &record[0];
        if name.is_empty() {
            return Err(parse_error(source, line, &header[0], "missing alternative name"));
        }
        if !seen.insert(name.to_string()) {
            return Err(parse_error(source, line, &header[0], format!("duplicate alternative `{name}`")));
        }
        let values = criteria
            .iter()
            .zip(&positions)
            .map(|(c, &pos)| {
                let cell = &record[pos];
                if cell.is_empty() {
                    return Err(parse_error(source, line, &c.id, format!("missing value for `{name}`")));
                }
                cell.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| {
                        parse_error(source, line, &c.id, format!("`{cell}` is not a number (row `{name}`)"))
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        alternatives.push(Alternative::new(name, values));
    }
    if alternatives.is_empty() {
        return Err(Error::file(source, "no alternatives"));
    }
    DecisionMatrix::new(criteria, alternatives).map_err(|e| Error::file(source, e))
}

/// CSV in the shape `load_matrix` reads. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_matrix(matrix: &DecisionMatrix) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
    let mut header = vec!["alternative".to_string()];
    header.extend(matrix.criteria().iter().map(|c| c.id.clone()));
    w.write_record(&header).expect("in-memory write");
    for a in matrix.alternatives() {
        let mut row = vec![a.id.clone()];
        row.extend(a.values.iter().map(|v| v.to_string()));
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// Square grid with a label row and column. Blank or `-` diagonal cells read
/// as 0.
pub fn load_pi_matrix(path: impl AsRef<Path>) -> Result<PreferenceIndexMatrix> {
    let path = path.as_ref();
    parse_pi_matrix(&read_file(path)?, &path.display().to_string())
}

pub fn parse_pi_matrix(text: &str, source: &str) -> Result<PreferenceIndexMatrix> {
    let mut reader = csv_reader(text);
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| parse_error(source, 1, "-", e))?,
        None => return Err(Error::file(source, "empty file")),
    };
    let labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    if let Some(i) = labels.iter().position(String::is_empty) {
        return Err(parse_error(source, 1, i + 2, "missing column label"));
    }
    let n = labels.len();
    let mut rows: Vec<Option<Vec<f64>>> = vec![None; n];
    let mut count = 0;
    for record in records {
        let record = record.map_err(|e| parse_error(source, 0, "-", e))?;
        let line = record_line(&record);
        if record.iter().all(str::is_empty) {
            continue;
        }
        count += 1;
        if record.len() != n + 1 {
            return Err(parse_error(
                source,
                line,
                "-",
                format!("expected {} fields, found {}", n + 1, record.len()),
            ));
        }
        let label = &record[0];
        if label.is_empty() {
            return Err(parse_error(source, line, &header[0], "missing row label"));
        }
        let i = labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| parse_error(source, line, &header[0], format!("row `{label}` has no matching column")))?;
        if rows[i].is_some() {
            return Err(parse_error(source, line, &header[0], format!("duplicate row `{label}`")));
        }
        let mut values = Vec::with_capacity(n);
        for (j, cell) in record.iter().skip(1).enumerate() {
            let v = if i == j && (cell.is_empty() || cell == "-") {
                0.0
            } else {
                let v: f64 = cell.parse().map_err(|_| {
                    parse_error(source, line, &labels[j], format!("`{cell}` is not a number (row `{label}`)"))
                })?;
                if i != j && !(0.0..=1.0).contains(&v) {
                    return Err(parse_error(
                        source,
                        line,
                        &labels[j],
                        format!("{v} is outside [0, 1] (row `{label}`)"),
                    ));
                }
                v
            };
            values.push(v);
        }
        rows[i] = Some(values);
    }
    if count != n {
        return Err(Error::file(source, format!("matrix is not square: {n} columns, {count} rows")));
    }
    let values = rows
        .into_iter()
        .zip(&labels)
        .map(|(r, l)| r.ok_or_else(|| Error::file(source, format!("missing row `{l}`"))))
        .collect::<Result<Vec<_>>>()?;
    PreferenceIndexMatrix::new(labels, values).map_err(|e| Error::file(source, e))
}

pub fn write_pi_matrix(pi: &PreferenceIndexMatrix) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
    let mut header = vec!["pi".to_string()];
    header.extend(pi.ids().iter().cloned());
    w.write_record(&header).expect("in-memory write");
    for (i, id) in pi.ids().iter().enumerate() {
        let mut row = vec![id.clone()];
        row.extend((0..pi.len()).map(|j| if i == j { "-".to_string() } else { pi.get(i, j).to_string() }));
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// A portfolio spec in JSON, validated after parsing.
pub fn load_portfolio(path: impl AsRef<Path>) -> Result<PortfolioSpec> {
    let path = path.as_ref();
    parse_portfolio(&read_file(path)?, &path.display().to_string())
}

pub fn parse_portfolio(text: &str, source: &str) -> Result<PortfolioSpec> {
    let spec: PortfolioSpec = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: source.to_string(),
        line: e.line() as u64,
        column: e.column().to_string(),
        message: e.to_string(),
    })?;
    spec.validate().map_err(|e| Error::file(source, e))?;
    Ok(spec)
}

/// Reads `alternative,phi_plus,phi_minus,phi_net` columns by header; other
/// columns are ignored.
pub fn load_flow_table(path: impl AsRef<Path>) -> Result<FlowTable> {
    let path = path.as_ref();
    parse_flow_table(&read_file(path)?, &path.display().to_string())
}

pub fn parse_flow_table(text: &str, source: &str) -> Result<FlowTable> {
    const COLUMNS: [&str; 4] = ["alternative", "phi_plus", "phi_minus", "phi_net"];
    let mut reader = csv_reader(text);
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| parse_error(source, 1, "-", e))?,
        None => return Err(Error::file(source, "empty file")),
    };
    let mut idx = [0usize; 4];
    for (slot, name) in idx.iter_mut().zip(COLUMNS) {
        *slot = header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| parse_error(source, 1, name, "missing column"))?;
    }
    let mut rows: Vec<Flow> = Vec::new();
    for record in records {
        let record = record.map_err(|e| parse_error(source, 0, "-", e))?;
        let line = record_line(&record);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let cell = |k: usize| record.get(idx[k]).unwrap_or("");
        let id = cell(0).to_string();
        if id.is_empty() {
            return Err(parse_error(source, line, "alternative", "missing value"));
        }
        if rows.iter().any(|f| f.id == id) {
            return Err(parse_error(source, line, "alternative", format!("duplicate alternative `{id}`")));
        }
        let mut v = [0.0; 3];
        for (k, slot) in v.iter_mut().enumerate() {
            let text = cell(k + 1);
            *slot = text.parse().ok().filter(|x: &f64| x.is_finite()).ok_or_else(|| {
                parse_error(source, line, COLUMNS[k + 1], format!("`{text}` is not a number (row `{id}`)"))
            })?;
        }
        rows.push(Flow {
            id,
            phi_plus: v[0],
            phi_minus: v[1],
            phi_net: v[2],
        });
    }
    if rows.is_empty() {
        return Err(Error::file(source, "no alternatives"));
    }
    FlowTable::new(rows).map_err(|e| Error::file(source, e))
}

/// Writes through a temporary file in the destination directory, then
/// renames it into place.
pub fn write_atomic(path: impl AsRef<Path>, contents: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.flush().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}
