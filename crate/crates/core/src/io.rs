//! Input parsers and output serializers.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::ser::{Serialize, Serializer};
use serde::Serialize as DeriveSerialize;

use crate::error::{Error, Result};
use crate::fca::FormalContext;
use crate::metric::{MetricKind, PointCloud};
use crate::profile::ObsDiamProfile;
use crate::report::{format_fraction, ChavezId, DimensionReport};

/// Where a run's data comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputSpec {
    PointsCsv(PathBuf),
    ContextCxt(PathBuf),
    ContextCsv(PathBuf),
    BuiltinScale { kind: ScaleKind, n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleKind {
    Nominal,
    Contranominal,
}

impl ScaleKind {
    pub fn name(self) -> &'static str {
        match self {
            ScaleKind::Nominal => "nominal",
            ScaleKind::Contranominal => "contranominal",
        }
    }
}

/// Everything that determines a run's output.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: InputSpec,
    pub metric: MetricKind,
    pub normalize: bool,
    pub chavez: bool,
    pub chavez_include_diagonal: bool,
    pub levy: bool,
    pub concept_cap: u64,
    pub seed: Option<u64>,
    pub profile_out: Option<PathBuf>,
    pub report_out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(input: InputSpec) -> Self {
        Self {
            input,
            metric: MetricKind::Euclidean,
            normalize: true,
            chavez: false,
            chavez_include_diagonal: true,
            levy: false,
            concept_cap: crate::fca::DEFAULT_CONCEPT_CAP,
            seed: None,
            profile_out: None,
            report_out: None,
        }
    }
}

fn split_lines(text: &str) -> impl Iterator<Item = &str> {
    text.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l))
}

/// Comma-separated points, one per row, with an optional header row.
pub fn parse_point_csv(bytes: &[u8]) -> Result<PointCloud> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(1, |p| p.line() as usize);
            Error::parse(line, e.to_string())
        })?;
        let line = record.position().map_or(1, |p| p.line() as usize);
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let row = match parsed {
            Ok(row) => row,
            Err(_) if idx == 0 => continue,
            Err(_) => {
                let bad = record.iter().find(|c| c.parse::<f64>().is_err()).unwrap_or("");
                return Err(Error::parse(line, format!("non-numeric cell '{bad}'")));
            }
        };
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::parse(line, "non-finite coordinate"));
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::parse(line, format!("row has {} cells, expected {w}", row.len())))
            }
            _ => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::parse(1, "no data rows"));
    }
    PointCloud::new(rows).map_err(|e| Error::parse(1, e.to_string()))
}

struct LineCursor<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> LineCursor<'a> {
    /// Next line and its 1-based number.
    fn take(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let line = self
            .lines
            .get(self.pos)
            .copied()
            .ok_or_else(|| Error::parse(self.pos + 1, format!("unexpected end of file, expected {what}")))?;
        self.pos += 1;
        Ok((self.pos, line))
    }

    fn blank(&mut self, what: &str) -> Result<()> {
        let (n, line) = self.take(what)?;
        if line.trim().is_empty() {
            Ok(())
        } else {
            Err(Error::parse(n, format!("expected {what}")))
        }
    }

    fn count(&mut self, what: &str) -> Result<usize> {
        let (n, line) = self.take(what)?;
        match line.trim().parse::<usize>() {
            Ok(0) => Err(Error::parse(n, format!("{what} must be positive"))),
            Ok(v) => Ok(v),
            Err(_) => Err(Error::parse(n, format!("expected {what}, found '{line}'"))),
        }
    }
}

/// Burmeister `.cxt` context.
pub fn parse_cxt(bytes: &[u8]) -> Result<FormalContext> {
    let text = String::from_utf8_lossy(bytes);
    let mut cur = LineCursor {
        lines: split_lines(&text).collect(),
        pos: 0,
    };

    let (n, magic) = cur.take("'B'")?;
    if magic.trim_end() != "B" {
        return Err(Error::parse(n, "expected 'B'"));
    }
    let (_, second) = cur.take("blank line")?;
    if !second.trim().is_empty() {
        cur.blank("blank line after context name")?;
    }
    let g = cur.count("object count")?;
    let m = cur.count("attribute count")?;
    cur.blank("blank line after counts")?;
    let names_start = cur.pos + 1;
    let objects = (0..g)
        .map(|_| cur.take("object name").map(|(_, l)| l.to_string()))
        .collect::<Result<Vec<_>>>()?;
    let attributes = (0..m)
        .map(|_| cur.take("attribute name").map(|(_, l)| l.to_string()))
        .collect::<Result<Vec<_>>>()?;
    let mut incidence = Vec::with_capacity(g);
    for _ in 0..g {
        let (n, row) = cur.take("incidence row")?;
        let cells: Vec<char> = row.trim_end().chars().collect();
        if cells.len() != m {
            return Err(Error::parse(n, format!("row has {} cells, expected {m}", cells.len())));
        }
        let bits = cells
            .iter()
            .enumerate()
            .map(|(col, &c)| match c {
                'X' => Ok(true),
                '.' => Ok(false),
                other => Err(Error::parse(n, format!("illegal character '{other}' in column {}", col + 1))),
            })
            .collect::<Result<Vec<bool>>>()?;
        incidence.push(bits);
    }
    for (i, rest) in cur.lines.iter().enumerate().skip(cur.pos) {
        if !rest.trim().is_empty() {
            return Err(Error::parse(i + 1, format!("more rows than the {g} declared objects")));
        }
    }
    FormalContext::new(objects, attributes, &incidence).map_err(|e| Error::parse(names_start, e.to_string()))
}

/// CSV context: header of attribute names (first cell ignored), then one row
/// per object with cells in `{0, 1, X, x, .}`.
pub fn parse_csv_context(bytes: &[u8]) -> Result<FormalContext> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut records = reader.records();
    let to_err = |e: csv::Error| {
        let line = e.position().map_or(1, |p| p.line() as usize);
        Error::parse(line, e.to_string())
    };
    let header = records
        .next()
        .ok_or_else(|| Error::parse(1, "missing header row"))?
        .map_err(to_err)?;
    let attributes: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    if attributes.is_empty() {
        return Err(Error::parse(1, "header names no attributes"));
    }
    let mut objects = Vec::new();
    let mut incidence = Vec::new();
    for record in records {
        let record = record.map_err(to_err)?;
        let line = record.position().map_or(1, |p| p.line() as usize);
        if record.len() != attributes.len() + 1 {
            return Err(Error::parse(
                line,
                format!("row has {} cells, expected {}", record.len(), attributes.len() + 1),
            ));
        }
        objects.push(record[0].to_string());
        let row = record
            .iter()
            .skip(1)
            .map(|cell| match cell {
                "1" | "X" | "x" => Ok(true),
                "0" | "." => Ok(false),
                other => Err(Error::parse(line, format!("illegal cell '{other}'"))),
            })
            .collect::<Result<Vec<bool>>>()?;
        incidence.push(row);
    }
    if objects.is_empty() {
        return Err(Error::parse(2, "context has no objects"));
    }
    FormalContext::new(objects, attributes, &incidence).map_err(|e| Error::parse(1, e.to_string()))
}

/// Burmeister serialization, the inverse of [`parse_cxt`].
pub fn emit_cxt(ctx: &FormalContext) -> String {
    let mut out = format!("B\n\n{}\n{}\n\n", ctx.n_objects(), ctx.n_attributes());
    for name in ctx.objects().iter().chain(ctx.attributes()) {
        out.push_str(name);
        out.push('\n');
    }
    for row in ctx.incidence() {
        out.extend(row.iter().map(|&x| if x { 'X' } else { '.' }));
        out.push('\n');
    }
    out
}

/// Profile as `alpha,obsdiam` rows, one per constant piece plus a closing
/// `1,0` row. Numbers use the shortest decimal that parses back to the same
/// `f64`.
pub fn emit_profile_csv(p: &ObsDiamProfile<f64>) -> String {
    let mut out = String::from("alpha,obsdiam\n");
    for (alpha, value) in p.steps() {
        let _ = writeln!(out, "{alpha},{value}");
    }
    out.push_str("1,0\n");
    out
}

pub fn parse_profile_csv(bytes: &[u8]) -> Result<ObsDiamProfile<f64>> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::parse(1, e.to_string()))?;
    let mut lines = split_lines(text).enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, "alpha,obsdiam")) => {}
        Some((i, _)) => return Err(Error::parse(i + 1, "expected header 'alpha,obsdiam'")),
        None => return Err(Error::parse(1, "empty profile")),
    }
    let mut breakpoints = Vec::new();
    let mut values = Vec::new();
    let mut last_line = 1;
    for (i, line) in lines {
        last_line = i + 1;
        let (a, v) = line
            .split_once(',')
            .ok_or_else(|| Error::parse(i + 1, "expected two cells"))?;
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::parse(i + 1, format!("non-numeric cell '{s}'")))
        };
        breakpoints.push(num(a)?);
        values.push(num(v)?);
    }
    if values.pop() != Some(0.0) || breakpoints.last() != Some(&1.0) {
        return Err(Error::parse(last_line, "profile must end with the row '1,0'"));
    }
    ObsDiamProfile::new(breakpoints, values).map_err(|e| Error::parse(last_line, e.to_string()))
}

/// Finite number or the string `"inf"`.
struct MaybeInf(f64);

impl Serialize for MaybeInf {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl Serialize for ChavezId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ChavezId::Finite(v) => s.serialize_f64(*v),
            ChavezId::Undefined => s.serialize_str("undefined"),
        }
    }
}

#[derive(DeriveSerialize)]
struct ExactJson {
    delta: String,
    intrinsic_dimension: String,
}

#[derive(DeriveSerialize)]
struct InputJson {
    kind: &'static str,
    source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    metric: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    normalized: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    concept_cap: Option<u64>,
}

#[derive(DeriveSerialize)]
struct ReportJson {
    delta: f64,
    intrinsic_dimension: MaybeInf,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact_fraction: Option<ExactJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    chavez_id: Option<ChavezId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    levy_defect: Option<f64>,
    n_points: usize,
    n_features: usize,
    input: InputJson,
    tool_version: &'static str,
    seed: Option<u64>,
}

fn input_json(config: &RunConfig) -> InputJson {
    let path = |p: &PathBuf| p.display().to_string();
    let (kind, source) = match &config.input {
        InputSpec::PointsCsv(p) => ("points_csv", path(p)),
        InputSpec::ContextCxt(p) => ("context_cxt", path(p)),
        InputSpec::ContextCsv(p) => ("context_csv", path(p)),
        InputSpec::BuiltinScale { kind, n } => ("builtin_scale", format!("{}:{n}", kind.name())),
    };
    let points = matches!(config.input, InputSpec::PointsCsv(_));
    InputJson {
        kind,
        source,
        metric: points.then(|| config.metric.to_string()),
        normalized: points.then_some(config.normalize),
        concept_cap: (!points).then_some(config.concept_cap),
    }
}

/// Report as pretty-printed JSON with a fixed key order and trailing newline.
pub fn emit_report_json(report: &DimensionReport, config: &RunConfig) -> String {
    let json = ReportJson {
        delta: report.delta,
        intrinsic_dimension: MaybeInf(report.dimension),
        exact_fraction: report.exact.as_ref().map(|e| ExactJson {
            delta: format_fraction(&e.delta),
            intrinsic_dimension: e.dimension.as_ref().map_or_else(|| "inf".to_string(), format_fraction),
        }),
        chavez_id: report.chavez_id,
        levy_defect: report.levy_defect,
        n_points: report.n_points,
        n_features: report.n_features,
        input: input_json(config),
        tool_version: env!("CARGO_PKG_VERSION"),
        seed: config.seed,
    };
    let mut out = serde_json::to_string_pretty(&json).expect("report serializes");
    out.push('\n');
    out
}
