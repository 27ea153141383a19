use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geometry::{Exponent, MultiIndex, Parallelepiped, StepVector};

use super::config::OutputFormat;
use super::HarnessError;

pub const CSV_HEADER: [&str; 10] = [
    "experiment",
    "function_id",
    "d",
    "r",
    "p",
    "box",
    "t",
    "quantity",
    "value",
    "runtime_ms",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantity {
    #[serde(rename = "E_r")]
    BestError,
    #[serde(rename = "omega")]
    Modulus,
    #[serde(rename = "Omega")]
    TotalModulus,
    #[serde(rename = "w")]
    MeanModulus,
    #[serde(rename = "W")]
    TotalMeanModulus,
    #[serde(rename = "K_lower")]
    KLower,
    #[serde(rename = "K_upper")]
    KUpper,
    #[serde(rename = "taylor_err")]
    TaylorError,
    #[serde(rename = "taylor_bound")]
    TaylorBound,
    #[serde(rename = "ratio")]
    Ratio,
    #[serde(rename = "margin")]
    Margin,
    #[serde(rename = "error")]
    Error,
}

impl Quantity {
    /// Quantities that are norms or moduli and must be non-negative.
    pub fn is_norm_like(self) -> bool {
        !matches!(self, Quantity::Margin | Quantity::Error)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variants serialize");
        write!(f, "{}", s.as_str().unwrap_or_default())
    }
}

/// One output line. `value` is `None` for not-applicable ratios and errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub function_id: String,
    pub d: usize,
    pub r: String,
    pub p: String,
    #[serde(rename = "box")]
    pub box_desc: String,
    pub t: String,
    pub quantity: Quantity,
    pub value: Option<f64>,
    pub runtime_ms: u64,
}

/// Shared coordinates of the rows produced by one task.
#[derive(Debug, Clone)]
pub struct RowContext {
    pub function_id: String,
    pub d: usize,
    pub r: String,
    pub p: String,
    pub box_desc: String,
}

impl RowContext {
    pub fn new(function_id: &str, r: &MultiIndex, p: Exponent, q: &Parallelepiped) -> Self {
        RowContext {
            function_id: function_id.to_string(),
            d: q.dim(),
            r: r.to_string(),
            p: p.to_string(),
            box_desc: q.to_string(),
        }
    }

    pub fn row(&self, experiment: &str, t: &StepVector, quantity: Quantity, value: Option<f64>) -> ResultRow {
        ResultRow {
            experiment: experiment.to_string(),
            function_id: self.function_id.clone(),
            d: self.d,
            r: self.r.clone(),
            p: self.p.clone(),
            box_desc: self.box_desc.clone(),
            t: t.to_string(),
            quantity,
            value,
            runtime_ms: 0,
        }
    }

    pub fn error(&self, experiment: &str, t: &StepVector, message: &str) -> ResultRow {
        self.row(&format!("{experiment}.error: {message}"), t, Quantity::Error, None)
    }
}

/// `num / den`, or `None` when the denominator is negligible against `scale`.
pub fn ratio(num: f64, den: f64, scale: f64) -> Option<f64> {
    if den > 0.0 && den > 1e-9 * scale {
        Some(num / den)
    } else {
        None
    }
}

pub fn to_csv(rows: &[ResultRow]) -> Result<String, HarnessError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(HarnessError::Csv)?;
    for row in rows {
        w.serialize(row).map_err(HarnessError::Csv)?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn to_json(rows: &[ResultRow]) -> Result<String, HarnessError> {
    let mut s = serde_json::to_string_pretty(rows).map_err(HarnessError::Json)?;
    s.push('\n');
    Ok(s)
}

pub fn render(rows: &[ResultRow], format: OutputFormat) -> Result<String, HarnessError> {
    match format {
        OutputFormat::Csv => to_csv(rows),
        OutputFormat::Json => to_json(rows),
    }
}

pub fn from_csv(text: &str) -> Result<Vec<ResultRow>, HarnessError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r
        .headers()
        .map_err(HarnessError::Csv)?
        .iter()
        .map(str::to_string)
        .collect();
    if header != CSV_HEADER {
        return Err(HarnessError::Config(format!("unexpected CSV header {header:?}")));
    }
    r.deserialize().collect::<Result<_, _>>().map_err(HarnessError::Csv)
}

pub fn from_json(text: &str) -> Result<Vec<ResultRow>, HarnessError> {
    serde_json::from_str(text).map_err(HarnessError::Json)
}

/// Writes rows to `path`, or to stdout when `path` is `None`.
pub fn emit(rows: &[ResultRow], format: OutputFormat, path: Option<&Path>) -> Result<(), HarnessError> {
    let text = render(rows, format)?;
    match path {
        Some(path) => fs::write(path, text).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| HarnessError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<ResultRow> {
        let q = Parallelepiped::unit(2);
        let ctx = RowContext::new("exp_d2", &MultiIndex::new(vec![2, 3]), Exponent::INFINITY, &q);
        let t = StepVector::new(vec![0.5, 0.25]);
        vec![
            ctx.row("whitney", &t, Quantity::BestError, Some(0.125)),
            ctx.row("whitney.E_over_Omega", &t, Quantity::Ratio, None),
            ctx.error("whitney", &t, "solver failed, sorry"),
        ]
    }

    #[test]
    fn empty_rows_give_header_only() {
        assert_eq!(to_csv(&[]).unwrap(), "experiment,function_id,d,r,p,box,t,quantity,value,runtime_ms\n");
        assert_eq!(to_json(&[]).unwrap(), "[]\n");
    }

    #[test]
    fn one_row_csv() {
        let rows = sample();
        let text = to_csv(&rows[..1]).unwrap();
        assert_eq!(
            text,
            "experiment,function_id,d,r,p,box,t,quantity,value,runtime_ms\n\
             whitney,exp_d2,2,2x3,inf,0:1x0:1,0.5x0.25,E_r,0.125,0\n"
        );
        assert_eq!(text, to_csv(&rows[..1]).unwrap());
    }

    #[test]
    fn csv_and_json_round_trip() {
        let rows = sample();
        assert_eq!(from_csv(&to_csv(&rows).unwrap()).unwrap(), rows);
        assert_eq!(from_json(&to_json(&rows).unwrap()).unwrap(), rows);
        let csv = to_csv(&rows).unwrap();
        assert!(csv.contains("whitney.E_over_Omega,exp_d2,2,2x3,inf,0:1x0:1,0.5x0.25,ratio,,0"));
        assert!(to_json(&rows).unwrap().contains("\"value\": null"));
    }

    #[test]
    fn quantity_names() {
        assert_eq!(Quantity::BestError.to_string(), "E_r");
        assert_eq!(Quantity::TotalMeanModulus.to_string(), "W");
        assert_eq!(Quantity::KUpper.to_string(), "K_upper");
        assert!(!Quantity::Margin.is_norm_like());
    }

    #[test]
    fn ratio_guards_small_denominators() {
        assert_eq!(ratio(1.0, 0.0, 1.0), None);
        assert_eq!(ratio(1.0, 1e-12, 1.0), None);
        assert_eq!(ratio(1.0, 4.0, 1.0), Some(0.25));
    }
}
