//! Convergence tables: observed orders, CSV and markdown output.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::Norm;

/// Placeholder for absent orders and failed cells.
pub const MISSING: &str = "--";

/// `ln(e[i-1] / e[i]) / ln(tau[i-1] / tau[i])` for consecutive rows.
pub fn observed_order(errors: &[f64], steps: &[f64]) -> Result<Vec<f64>> {
    if errors.len() != steps.len() {
        return Err(Error::InvalidArgument(format!(
            "{} errors for {} step sizes",
            errors.len(),
            steps.len()
        )));
    }
    if errors.len() < 2 {
        return Err(Error::InvalidArgument("need at least two rows for an order".into()));
    }
    if let Some(bad) = errors.iter().chain(steps).find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "errors and step sizes must be positive and finite, got {bad}"
        )));
    }
    Ok(errors
        .windows(2)
        .zip(steps.windows(2))
        .map(|(e, t)| (e[0] / e[1]).ln() / (t[0] / t[1]).ln())
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub step_size: f64,
    /// One entry per norm of the table; `None` when the cell failed.
    pub errors: Vec<Option<f64>>,
    pub orders: Vec<Option<f64>>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    /// Short scheme name, e.g. `strang-mod`.
    pub scheme: String,
    /// Human-readable heading, e.g. `Strang (modified)`.
    pub label: String,
    pub norms: Vec<Norm>,
    pub rows: Vec<Row>,
    pub metadata: Vec<(String, String)>,
}

impl ResultTable {
    /// Builds a table from per-row results (errors per norm, or a failure
    /// message) and fills in the orders.
    pub fn from_cells(
        scheme: &str,
        label: &str,
        norms: &[Norm],
        steps: &[f64],
        cells: Vec<std::result::Result<Vec<f64>, String>>,
    ) -> ResultTable {
        let mut rows: Vec<Row> = steps
            .iter()
            .zip(cells)
            .map(|(&step_size, cell)| match cell {
                Ok(errors) => Row {
                    step_size,
                    errors: errors.into_iter().map(Some).collect(),
                    orders: vec![None; norms.len()],
                    failure: None,
                },
                Err(message) => Row {
                    step_size,
                    errors: vec![None; norms.len()],
                    orders: vec![None; norms.len()],
                    failure: Some(message),
                },
            })
            .collect();
        fill_orders(&mut rows, norms.len());
        ResultTable {
            scheme: scheme.to_string(),
            label: label.to_string(),
            norms: norms.to_vec(),
            rows,
            metadata: Vec::new(),
        }
    }

    pub fn steps(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.step_size).collect()
    }

    /// Errors in one norm; `None` entries for failed cells.
    pub fn errors(&self, norm: Norm) -> Vec<Option<f64>> {
        match self.norm_index(norm) {
            Some(j) => self.rows.iter().map(|r| r.errors[j]).collect(),
            None => Vec::new(),
        }
    }

    pub fn orders(&self, norm: Norm) -> Vec<Option<f64>> {
        match self.norm_index(norm) {
            Some(j) => self.rows.iter().map(|r| r.orders[j]).collect(),
            None => Vec::new(),
        }
    }

    pub fn has_failures(&self) -> bool {
        self.rows.iter().any(|r| r.failure.is_some())
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    fn norm_index(&self, norm: Norm) -> Option<usize> {
        self.norms.iter().position(|&n| n == norm)
    }
}

fn fill_orders(rows: &mut [Row], n_norms: usize) {
    for i in 1..rows.len() {
        for j in 0..n_norms {
            let (prev, cur) = (rows[i - 1].errors[j], rows[i].errors[j]);
            rows[i].orders[j] = match (prev, cur) {
                (Some(a), Some(b)) => observed_order(&[a, b], &[rows[i - 1].step_size, rows[i].step_size])
                    .ok()
                    .map(|o| o[0]),
                _ => None,
            };
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    Csv,
    #[default]
    Markdown,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Format> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "markdown" | "md" => Ok(Format::Markdown),
            other => Err(Error::InvalidArgument(format!("unknown format `{other}`"))),
        }
    }
}

/// Scientific notation with four significant digits and a two-digit
/// exponent, e.g. `1.250e-03`.
pub fn format_sci(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.3e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// Fixed notation with four significant digits, e.g. `0.8974`, `6.340`.
pub fn format_sig4(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.3}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (3 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn opt(v: Option<f64>, f: fn(f64) -> String) -> String {
    v.map_or_else(|| MISSING.to_string(), f)
}

fn full(x: f64) -> String {
    x.to_string()
}

fn csv_header(norms: &[Norm], with_scheme: bool) -> Vec<String> {
    let mut header = Vec::new();
    if with_scheme {
        header.push("scheme".to_string());
    }
    header.push("step_size".to_string());
    for n in norms {
        header.push(format!("error_{}", n.tag()));
        header.push(format!("order_{}", n.tag()));
    }
    header
}

fn csv_record(row: &Row, scheme: Option<&str>) -> Vec<String> {
    let mut rec = Vec::new();
    if let Some(s) = scheme {
        rec.push(s.to_string());
    }
    rec.push(full(row.step_size));
    for (e, o) in row.errors.iter().zip(&row.orders) {
        rec.push(opt(*e, full));
        rec.push(opt(*o, full));
    }
    rec
}

fn write_csv(header: Vec<String>, records: Vec<Vec<String>>) -> String {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(&header).expect("in-memory write");
    for rec in records {
        writer.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

/// One table: `step_size,error_<norm>,order_<norm>,...` in CSV, or the
/// two-column-per-scheme layout in markdown.
pub fn emit_table(table: &ResultTable, format: Format) -> String {
    match format {
        Format::Csv => write_csv(
            csv_header(&table.norms, false),
            table.rows.iter().map(|r| csv_record(r, None)).collect(),
        ),
        Format::Markdown => emit(std::slice::from_ref(table), &table.norms, Format::Markdown),
    }
}

/// Several schemes over the same step sizes. CSV gets a leading `scheme`
/// column; markdown places schemes side by side, one block per norm.
pub fn emit(tables: &[ResultTable], norms: &[Norm], format: Format) -> String {
    match format {
        Format::Csv => write_csv(
            csv_header(norms, true),
            tables
                .iter()
                .flat_map(|t| t.rows.iter().map(|r| csv_record(r, Some(&t.scheme))))
                .collect(),
        ),
        Format::Markdown => emit_markdown(tables, norms),
    }
}

fn emit_markdown(tables: &[ResultTable], norms: &[Norm]) -> String {
    let mut out = String::new();
    for (k, &norm) in norms.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "{} error", norm.label());
        out.push('\n');
        let mut header = String::from("| step size |");
        let mut rule = String::from("|---:|");
        for t in tables {
            let _ = write!(header, " {} | order |", t.label);
            rule.push_str("---:|---:|");
        }
        let _ = writeln!(out, "{header}\n{rule}");
        let n_rows = tables.iter().map(|t| t.rows.len()).max().unwrap_or(0);
        for i in 0..n_rows {
            let step = tables.iter().find_map(|t| t.rows.get(i)).map(|r| r.step_size);
            let _ = write!(out, "| {} |", opt(step, format_sci));
            for t in tables {
                let j = t.norm_index(norm);
                let row = t.rows.get(i);
                let e = row.zip(j).and_then(|(r, j)| r.errors[j]);
                let o = row.zip(j).and_then(|(r, j)| r.orders[j]);
                let _ = write!(out, " {} | {} |", opt(e, format_sci), opt(o, format_sig4));
            }
            out.push('\n');
        }
    }
    out
}

fn parse_cell(s: &str) -> Result<Option<f64>> {
    if s == MISSING {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| Error::Csv(format!("not a number: `{s}`")))
}

/// Reads back the output of [`emit`] in CSV form. Metadata and failure
/// messages are not part of the CSV and come back empty.
pub fn parse_csv(text: &str) -> Result<Vec<ResultTable>> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let with_scheme = header.first().map(String::as_str) == Some("scheme");
    let offset = usize::from(with_scheme);
    if header.get(offset).map(String::as_str) != Some("step_size") || (header.len() - offset) % 2 != 1 {
        return Err(Error::Csv(format!("unexpected header {header:?}")));
    }
    let norms = header[offset + 1..]
        .chunks(2)
        .map(|pair| {
            let tag = pair[0]
                .strip_prefix("error_")
                .ok_or_else(|| Error::Csv(format!("unexpected column `{}`", pair[0])))?;
            tag.parse::<Norm>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut tables: Vec<ResultTable> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let scheme = if with_scheme { &record[0] } else { "" };
        let step_size = parse_cell(&record[offset])?
            .ok_or_else(|| Error::Csv("missing step size".into()))?;
        let mut errors = Vec::new();
        let mut orders = Vec::new();
        for j in 0..norms.len() {
            errors.push(parse_cell(&record[offset + 1 + 2 * j])?);
            orders.push(parse_cell(&record[offset + 2 + 2 * j])?);
        }
        let failure = errors.iter().all(Option::is_none).then(|| "failed".to_string());
        let row = Row {
            step_size,
            errors,
            orders,
            failure,
        };
        match tables.last_mut() {
            Some(t) if t.scheme == scheme => t.rows.push(row),
            _ => tables.push(ResultTable {
                scheme: scheme.to_string(),
                label: scheme
                    .parse::<crate::splitting::Scheme>()
                    .map_or_else(|_| scheme.to_string(), |s| s.label().to_string()),
                norms: norms.clone(),
                rows: vec![row],
                metadata: Vec::new(),
            }),
        }
    }
    Ok(tables)
}
