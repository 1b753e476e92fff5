//! CSV ingestion, a synthetic overlapped-class generator, and dataset summaries.

use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{imbalance_ratio, Dataset, Label};
use crate::error::{AseError, Result};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColumnRef {
    Name(String),
    Index(usize),
}

impl ColumnRef {
    /// Numeric strings are taken as zero-based indices.
    pub fn parse(s: &str) -> Self {
        s.parse()
            .map_or_else(|_| ColumnRef::Name(s.to_string()), ColumnRef::Index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    fn apply(self, a: f64, b: f64) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
        }
    }
}

/// How a label cell maps to the positive class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PositiveRule {
    /// Cell equals this literal (after trimming).
    Equals(String),
    /// Cell parses as a number satisfying `cell <op> value`.
    Compare { op: CmpOp, value: f64 },
}

impl PositiveRule {
    fn is_positive(&self, cell: &str) -> std::result::Result<bool, String> {
        match self {
            PositiveRule::Equals(lit) => Ok(cell == lit),
            PositiveRule::Compare { op, value } => cell
                .parse::<f64>()
                .map(|v| op.apply(v, *value))
                .map_err(|_| format!("label {cell:?} is not numeric")),
        }
    }
}

/// Parses predicates like `quality >= 7` into the label column and its rule.
pub fn parse_predicate(s: &str) -> Result<(ColumnRef, PositiveRule)> {
    const OPS: [(&str, CmpOp); 7] = [
        (">=", CmpOp::Ge),
        ("<=", CmpOp::Le),
        ("==", CmpOp::Eq),
        ("!=", CmpOp::Ne),
        (">", CmpOp::Gt),
        ("<", CmpOp::Lt),
        ("=", CmpOp::Eq),
    ];
    for (tok, op) in OPS {
        if let Some((col, val)) = s.split_once(tok) {
            let (col, val) = (col.trim(), val.trim());
            let value: f64 = val
                .parse()
                .map_err(|_| AseError::invalid(format!("predicate value {val:?} is not numeric")))?;
            if col.is_empty() {
                break;
            }
            return Ok((ColumnRef::parse(col), PositiveRule::Compare { op, value }));
        }
    }
    Err(AseError::invalid(format!(
        "cannot parse predicate {s:?}; expected e.g. \"quality >= 7\""
    )))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvSchema {
    pub label_column: ColumnRef,
    pub positive: PositiveRule,
    pub has_header: bool,
    pub delimiter: u8,
}

impl CsvSchema {
    /// Header row, `label` column, positives written as `1`.
    pub fn labelled() -> Self {
        CsvSchema {
            label_column: ColumnRef::Name("label".into()),
            positive: PositiveRule::Equals("1".into()),
            has_header: true,
            delimiter: b',',
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| AseError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, schema).map_err(|e| match e {
        AseError::Csv {
            line, column, message, ..
        } => AseError::Csv {
            path: path.to_path_buf(),
            line,
            column,
            message,
        },
        other => other,
    })
}

/// Parses CSV from any reader. Errors carry the 1-based line and the column.
pub fn read_csv(reader: impl Read, schema: &CsvSchema) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(schema.has_header)
        .delimiter(schema.delimiter)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let err = |line: u64, column: &str, message: String| AseError::Csv {
        path: Default::default(),
        line,
        column: column.to_string(),
        message,
    };

    let headers: Option<Vec<String>> = if schema.has_header {
        let h = rdr.headers().map_err(|e| err(1, "-", e.to_string()))?;
        Some(h.iter().map(|s| s.trim_matches('"').to_string()).collect())
    } else {
        None
    };

    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut width: Option<usize> = None;
    let mut label_idx = 0;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            err(line, "-", e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let w = match width {
            Some(w) => w,
            None => {
                let w = rec.len();
                label_idx = match &schema.label_column {
                    ColumnRef::Index(i) if *i < w => *i,
                    ColumnRef::Index(i) => return Err(err(line, &i.to_string(), format!("label column {i} missing"))),
                    ColumnRef::Name(name) => headers
                        .as_ref()
                        .and_then(|h| h.iter().position(|c| c == name))
                        .ok_or_else(|| err(1, name, format!("label column {name:?} not found")))?,
                };
                width = Some(w);
                w
            }
        };
        if w < 2 {
            return Err(err(line, "-", "need a label column and at least one feature".into()));
        }
        let col_name = |c: usize| {
            headers
                .as_ref()
                .and_then(|h| h.get(c).cloned())
                .unwrap_or_else(|| c.to_string())
        };
        for (c, cell) in rec.iter().enumerate() {
            if c == label_idx {
                let positive = schema
                    .positive
                    .is_positive(cell)
                    .map_err(|m| err(line, &col_name(c), m))?;
                labels.push(Label::from_bool(positive));
                continue;
            }
            let v: f64 = cell
                .parse()
                .map_err(|_| err(line, &col_name(c), format!("cannot parse {cell:?} as a number")))?;
            if !v.is_finite() {
                return Err(err(line, &col_name(c), format!("non-finite value {cell:?}")));
            }
            values.push(v);
        }
    }
    let Some(w) = width else {
        return Err(AseError::EmptyDataset);
    };
    Dataset::from_flat(w - 1, values, labels)
}

/// Writes `f0..f{d-1},label` with shortest round-trip float formatting.
pub fn write_csv(ds: &Dataset, mut out: impl Write) -> std::io::Result<()> {
    let mut header: Vec<String> = (0..ds.dim()).map(|j| format!("f{j}")).collect();
    header.push("label".into());
    writeln!(out, "{}", header.join(","))?;
    for i in 0..ds.len() {
        let mut line = String::new();
        for v in ds.row(i) {
            line.push_str(&format!("{v:?},"));
        }
        line.push_str(if ds.label(i).is_positive() { "1" } else { "0" });
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn write_csv_file(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| AseError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut w = std::io::BufWriter::new(file);
    write_csv(ds, &mut w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

/// Two unit-variance Gaussian classes, the positive one shifted along the first axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub negatives: usize,
    pub positives: usize,
    pub dim: usize,
    /// Distance between class means, in standard deviations.
    pub separation: f64,
    pub seed: u64,
}

/// Negatives first, then positives.
pub fn generate_synth(spec: &SynthSpec) -> Result<Dataset> {
    if spec.negatives < 2 || spec.positives < 2 {
        return Err(AseError::invalid("synthetic classes need at least 2 samples each"));
    }
    if spec.dim == 0 {
        return Err(AseError::invalid("synthetic data needs dim >= 1"));
    }
    if !(spec.separation >= 0.0 && spec.separation.is_finite()) {
        return Err(AseError::invalid("separation must be a finite non-negative number"));
    }
    let mut rng = seed::rng(spec.seed);
    let total = spec.negatives + spec.positives;
    let mut values = Vec::with_capacity(total * spec.dim);
    let mut labels = Vec::with_capacity(total);
    for i in 0..total {
        let positive = i >= spec.negatives;
        for j in 0..spec.dim {
            let z: f64 = StandardNormal.sample(&mut rng);
            values.push(if positive && j == 0 { z + spec.separation } else { z });
        }
        labels.push(Label::from_bool(positive));
    }
    Dataset::from_flat(spec.dim, values, labels)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub instances: usize,
    pub features: usize,
    /// `None` when there are no positives.
    pub imbalance_ratio: Option<f64>,
    pub positives: usize,
    pub negatives: usize,
}

pub fn summarize(ds: &Dataset) -> DatasetSummary {
    DatasetSummary {
        instances: ds.len(),
        features: ds.dim(),
        imbalance_ratio: imbalance_ratio(ds).ok(),
        positives: ds.positive_count(),
        negatives: ds.negative_count(),
    }
}

impl fmt::Display for DatasetSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ir = self
            .imbalance_ratio
            .map_or_else(|| "undefined".to_string(), |r| format!("{r:.2}"));
        writeln!(f, "{:<12}{:>12}", "instances", self.instances)?;
        writeln!(f, "{:<12}{:>12}", "features", self.features)?;
        writeln!(f, "{:<12}{:>12}", "positives", self.positives)?;
        writeln!(f, "{:<12}{:>12}", "negatives", self.negatives)?;
        write!(f, "{:<12}{:>12}", "IR", ir)
    }
}
