//! Segmentation file formats and report writers.
//!
//! Three label-map encodings are understood:
//!
//! * `labels-text`: a `SEGLABELS <width> <height>` line followed by `height`
//!   rows of `width` whitespace-separated decimal labels;
//! * `pgm`: binary (`P5`) or ASCII (`P2`) graymaps, gray value = label;
//! * `bsds-seg`: the human-segmentation database's `key value` header ending
//!   in `data`, then `s r c1 c2` run lines (segment `s` on row `r`, columns
//!   `c1..=c2`, all 0-based).

mod labels_text;
mod pgm;
mod report;
mod seg;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::label_map::LabelMap;

pub use labels_text::write_labels_text;
pub use pgm::write_pgm;
pub use report::{write_report, write_reports_csv, ReportFormat, RunMeta, REPORT_COLUMNS};
pub use seg::{parse_seg, SegFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormatTag {
    LabelsText,
    Pgm,
    BsdsSeg,
    Auto,
}

impl FormatTag {
    pub fn name(&self) -> &'static str {
        match self {
            FormatTag::LabelsText => "labels",
            FormatTag::Pgm => "pgm",
            FormatTag::BsdsSeg => "seg",
            FormatTag::Auto => "auto",
        }
    }
}

impl fmt::Display for FormatTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FormatTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "labels" | "labels-text" => Ok(FormatTag::LabelsText),
            "pgm" => Ok(FormatTag::Pgm),
            "seg" | "bsds-seg" => Ok(FormatTag::BsdsSeg),
            "auto" => Ok(FormatTag::Auto),
            other => Err(Error::Format(format!("unknown format name {other:?}"))),
        }
    }
}

/// Identifies the encoding from the leading bytes.
pub fn detect_format(bytes: &[u8]) -> Result<FormatTag> {
    if bytes.is_empty() {
        return Err(Error::Format("input is empty".into()));
    }
    if bytes.starts_with(b"P5") || bytes.starts_with(b"P2") {
        return Ok(FormatTag::Pgm);
    }
    if bytes.starts_with(labels_text::MAGIC.as_bytes()) {
        return Ok(FormatTag::LabelsText);
    }
    if seg::looks_like_seg(bytes) {
        return Ok(FormatTag::BsdsSeg);
    }
    Err(Error::Format(
        "expected a PGM magic, a SEGLABELS line, or a .seg header".into(),
    ))
}

pub fn load_label_map(bytes: &[u8], fmt: FormatTag) -> Result<LabelMap> {
    if bytes.is_empty() {
        return Err(Error::Format("input is empty".into()));
    }
    let fmt = match fmt {
        FormatTag::Auto => detect_format(bytes)?,
        concrete => concrete,
    };
    match fmt {
        FormatTag::LabelsText => labels_text::parse(bytes),
        FormatTag::Pgm => pgm::parse(bytes),
        FormatTag::BsdsSeg => seg::parse_seg(bytes).map(|f| f.map),
        FormatTag::Auto => unreachable!("auto resolved above"),
    }
}

/// Reads and parses a file, tagging any failure with its path.
pub fn load_label_map_file(path: impl AsRef<Path>, fmt: FormatTag) -> Result<LabelMap> {
    let path = path.as_ref();
    std::fs::read(path)
        .map_err(Error::from)
        .and_then(|bytes| load_label_map(&bytes, fmt))
        .map_err(|e| e.in_file(path))
}

/// Serialises a map; only `labels-text` and `pgm` can be written.
pub fn write_label_map(map: &LabelMap, fmt: FormatTag) -> Result<Vec<u8>> {
    match fmt {
        FormatTag::LabelsText => Ok(write_labels_text(map)),
        FormatTag::Pgm => write_pgm(map),
        other => Err(Error::Format(format!("cannot write label maps as {other}"))),
    }
}

/// Splits input into lines, accepting LF or CRLF endings. Line numbers start at 1.
pub(crate) fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .enumerate()
        .map(|(i, l)| (i + 1, l))
}

pub(crate) fn utf8(bytes: &[u8]) -> Result<&str> {
    std::str::from_utf8(bytes).map_err(|e| {
        let line = 1 + bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count();
        Error::parse(line, "input is not valid UTF-8 text")
    })
}
