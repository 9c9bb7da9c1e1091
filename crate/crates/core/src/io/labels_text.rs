use std::fmt::Write as _;

use super::{numbered_lines, utf8};
use crate::error::{Error, Result};
use crate::label_map::{Label, LabelMap};

pub(super) const MAGIC: &str = "SEGLABELS";

fn dimension(token: Option<&str>, what: &str, line: usize) -> Result<usize> {
    let token = token.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    let value: i64 = token
        .parse()
        .map_err(|_| Error::parse(line, format!("{what} {token:?} is not an integer")))?;
    if value <= 0 {
        return Err(Error::Dimension(format!("{what} must be positive, got {value}")));
    }
    Ok(value as usize)
}

pub(super) fn parse(bytes: &[u8]) -> Result<LabelMap> {
    let text = utf8(bytes)?;
    let mut lines = numbered_lines(text);
    let (line_no, header) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
    let mut fields = header.split_whitespace();
    if fields.next() != Some(MAGIC) {
        return Err(Error::parse(line_no, format!("expected `{MAGIC} <width> <height>`")));
    }
    let width = dimension(fields.next(), "width", line_no)?;
    let height = dimension(fields.next(), "height", line_no)?;
    if fields.next().is_some() {
        return Err(Error::parse(line_no, "trailing fields after height"));
    }

    let mut labels = Vec::with_capacity(width.saturating_mul(height));
    let mut rows = 0;
    let mut last_line = line_no;
    for (line_no, line) in lines {
        last_line = line_no;
        if rows == height {
            if line.trim().is_empty() {
                continue;
            }
            return Err(Error::parse(line_no, format!("more than {height} rows")));
        }
        let before = labels.len();
        for token in line.split_whitespace() {
            let label: Label = token
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad label {token:?}")))?;
            labels.push(label);
        }
        let got = labels.len() - before;
        if got != width {
            return Err(Error::parse(
                line_no,
                format!("row {rows} has {got} labels, expected {width}"),
            ));
        }
        rows += 1;
    }
    if rows < height {
        return Err(Error::parse(
            last_line,
            format!("input ends after {rows} of {height} rows"),
        ));
    }
    LabelMap::new(width, height, labels)
}

pub fn write_labels_text(map: &LabelMap) -> Vec<u8> {
    let mut out = String::with_capacity(16 + map.pixel_count() * 4);
    let _ = writeln!(out, "{MAGIC} {} {}", map.width(), map.height());
    for row in map.rows() {
        for (i, label) in row.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{label}");
        }
        out.push('\n');
    }
    out.into_bytes()
}
