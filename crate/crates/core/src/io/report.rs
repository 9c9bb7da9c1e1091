use std::str::FromStr;

use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};
use crate::index::{format_decimal, EvalReport, Rational};
use crate::sampler::WindowGeometry;

/// Column order shared by the JSON object and the CSV header.
pub const REPORT_COLUMNS: [&str; 15] = [
    "pr", "epr", "rpp", "rmm", "rpm", "t", "k", "alpha", "beta", "w_h", "w_v", "d_h", "d_v",
    "pr_num", "epr_num",
];

/// Fractional digits used for rendered indices.
const DIGITS: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

/// Parameters that produced a report; absent for exhaustive evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunMeta {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub geometry: Option<WindowGeometry>,
}

fn fixed(value: Rational) -> Value {
    let text = format_decimal(value, DIGITS);
    Value::Number(Number::from_str(&text).expect("formatted decimal is valid JSON"))
}

fn float(value: Option<f64>) -> Value {
    value
        .and_then(Number::from_f64)
        .map_or(Value::Null, Value::Number)
}

fn fields(report: &EvalReport, meta: &RunMeta) -> Vec<Value> {
    let g = meta.geometry;
    let dim = |f: fn(&WindowGeometry) -> usize| g.as_ref().map_or(Value::Null, |g| f(g).into());
    vec![
        fixed(report.pr()),
        fixed(report.epr()),
        fixed(report.rpp()),
        fixed(report.rmm()),
        fixed(report.rpm()),
        report.t.into(),
        report.k.into(),
        float(meta.alpha),
        float(meta.beta),
        dim(|g| g.w_h),
        dim(|g| g.w_v),
        dim(|g| g.d_h),
        dim(|g| g.d_v),
        report.pr_numerator.into(),
        report.epr_numerator.into(),
    ]
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Renders one report. JSON is a single object; CSV is a header plus one row.
pub fn write_report(report: &EvalReport, meta: &RunMeta, fmt: ReportFormat) -> Result<Vec<u8>> {
    match fmt {
        ReportFormat::Json => {
            let object: Map<String, Value> = REPORT_COLUMNS
                .iter()
                .map(|k| k.to_string())
                .zip(fields(report, meta))
                .collect();
            let mut out = serde_json::to_vec_pretty(&Value::Object(object))
                .map_err(|e| Error::Format(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        ReportFormat::Csv => write_reports_csv(std::iter::once((report, meta))),
    }
}

/// Header plus one row per report.
pub fn write_reports_csv<'a>(
    rows: impl IntoIterator<Item = (&'a EvalReport, &'a RunMeta)>,
) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Format(e.to_string());
    w.write_record(REPORT_COLUMNS).map_err(csv_err)?;
    for (report, meta) in rows {
        w.write_record(fields(report, meta).iter().map(csv_cell))
            .map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Format(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_report() -> EvalReport {
        EvalReport {
            t: 10,
            k: 3,
            pr_numerator: 30,
            epr_numerator: 30,
            rpp_numerator: 18,
            rmm_numerator: 12,
            rpm_numerator: 0,
        }
    }

    fn meta() -> RunMeta {
        RunMeta {
            alpha: Some(0.55),
            beta: Some(0.055),
            geometry: Some(WindowGeometry::new(77, 50, 8, 5).unwrap()),
        }
    }

    #[test]
    fn json_renders_fixed_decimals_in_column_order() {
        let out = write_report(&identity_report(), &meta(), ReportFormat::Json).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("\"epr\": 1.000000"), "{text}");
        assert!(text.contains("\"rpm\": 0.000000"), "{text}");
        assert!(text.contains("\"rpp\": 0.600000"), "{text}");
        let positions: Vec<_> = REPORT_COLUMNS
            .iter()
            .map(|k| text.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn json_parse_back_keeps_numerators() {
        let report = EvalReport {
            t: 6_503_211,
            k: 3,
            pr_numerator: 12_800_001,
            epr_numerator: 2 * 12_800_001 - 3 * 6_503_211,
            rpp_numerator: 5,
            rmm_numerator: 0,
            rpm_numerator: 2 * 12_800_001 - 3 * 6_503_211 - 5,
        };
        let out = write_report(&report, &meta(), ReportFormat::Json).unwrap();
        let v: Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(v["pr_num"].as_i64(), Some(report.pr_numerator));
        assert_eq!(v["epr_num"].as_i64(), Some(report.epr_numerator));
        assert_eq!(v["t"].as_u64(), Some(report.t));
        assert_eq!(v["w_h"].as_u64(), Some(77));
    }

    #[test]
    fn missing_meta_is_null() {
        let out = write_report(&identity_report(), &RunMeta::default(), ReportFormat::Json).unwrap();
        let v: Value = serde_json::from_slice(&out).unwrap();
        assert!(v["alpha"].is_null());
        assert!(v["d_v"].is_null());
    }

    #[test]
    fn csv_has_header_and_one_row_per_report() {
        let r = identity_report();
        let m = meta();
        let out = write_reports_csv([(&r, &m), (&r, &m), (&r, &m)]).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], REPORT_COLUMNS.join(","));
        assert_eq!(
            lines[1],
            "1.000000,1.000000,0.600000,0.400000,0.000000,10,3,0.55,0.055,77,50,8,5,30,30"
        );
    }
}
