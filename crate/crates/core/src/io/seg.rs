use super::{numbered_lines, utf8};
use crate::error::{Error, Result};
use crate::label_map::{Label, LabelMap};

/// A parsed `.seg` file. Header keys other than the required ones are kept
/// verbatim and otherwise ignored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegFile {
    pub header: Vec<(String, String)>,
    pub segments: usize,
    pub map: LabelMap,
}

pub(super) fn looks_like_seg(bytes: &[u8]) -> bool {
    let Ok(text) = std::str::from_utf8(bytes) else {
        return false;
    };
    for (_, line) in numbered_lines(text) {
        match line.split_whitespace().next() {
            Some("data") => return false,
            Some("segments") => return true,
            _ => {}
        }
    }
    false
}

fn header_int(header: &[(String, String)], key: &str, line_of: &[usize]) -> Result<usize> {
    let (idx, (_, value)) = header
        .iter()
        .enumerate()
        .find(|(_, (k, _))| k == key)
        .ok_or_else(|| Error::parse(line_of.last().copied().unwrap_or(1), format!("header has no `{key}`")))?;
    let value: i64 = value
        .parse()
        .map_err(|_| Error::parse(line_of[idx], format!("`{key}` value {value:?} is not an integer")))?;
    if value <= 0 {
        return Err(Error::Dimension(format!("`{key}` must be positive, got {value}")));
    }
    Ok(value as usize)
}

pub fn parse_seg(bytes: &[u8]) -> Result<SegFile> {
    let text = utf8(bytes)?;
    let mut lines = numbered_lines(text);

    let mut header = Vec::new();
    let mut header_lines = Vec::new();
    let mut data_line = None;
    for (line_no, line) in lines.by_ref() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line == "data" {
            data_line = Some(line_no);
            break;
        }
        let (key, value) = line
            .split_once(char::is_whitespace)
            .map(|(k, v)| (k, v.trim()))
            .unwrap_or((line, ""));
        header.push((key.to_string(), value.to_string()));
        header_lines.push(line_no);
    }
    let data_line = data_line.ok_or_else(|| {
        Error::parse(
            header_lines.last().map_or(1, |l| l + 1),
            "header is not terminated by a `data` line",
        )
    })?;
    header_lines.push(data_line);
    let width = header_int(&header, "width", &header_lines)?;
    let height = header_int(&header, "height", &header_lines)?;
    let segments = header_int(&header, "segments", &header_lines)?;

    const UNSET: Label = Label::MAX;
    let mut labels = vec![UNSET; width * height];
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 4 {
            return Err(Error::parse(
                line_no,
                format!("expected `s r c1 c2`, got {} fields", fields.len()),
            ));
        }
        let mut v = [0usize; 4];
        for (slot, field) in v.iter_mut().zip(&fields) {
            *slot = field
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad integer {field:?}")))?;
        }
        let [s, r, c1, c2] = v;
        if s >= segments {
            return Err(Error::parse(
                line_no,
                format!("segment {s} is not below the declared count {segments}"),
            ));
        }
        if r >= height || c1 > c2 || c2 >= width {
            return Err(Error::parse(
                line_no,
                format!("run row {r}, columns {c1}..={c2} lies outside {width}x{height}"),
            ));
        }
        let row = &mut labels[r * width..(r + 1) * width];
        if let Some(off) = row[c1..=c2].iter().position(|&l| l != UNSET) {
            return Err(Error::Coverage(format!(
                "line {line_no}: pixel ({r}, {}) is covered twice",
                c1 + off
            )));
        }
        row[c1..=c2].fill(s as Label);
    }
    if let Some(idx) = labels.iter().position(|&l| l == UNSET) {
        return Err(Error::Coverage(format!(
            "pixel ({}, {}) is not covered by any run",
            idx / width,
            idx % width
        )));
    }
    Ok(SegFile {
        header,
        segments,
        map: LabelMap::new(width, height, labels)?,
    })
}
