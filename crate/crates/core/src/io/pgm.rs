use crate::error::{Error, Result};
use crate::label_map::{Label, LabelMap};

/// Byte cursor over a netpbm header that tracks the current line.
struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self {
            bytes,
            pos: 0,
            line: 1,
        }
    }

    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            match b {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b'\n' => {
                    self.line += 1;
                    self.pos += 1;
                }
                b' ' | b'\t' | b'\r' | b'\x0b' | b'\x0c' => self.pos += 1,
                _ => break,
            }
        }
    }

    fn token(&mut self, what: &str) -> Result<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::parse(self.line, format!("missing {what}")));
        }
        Ok(&self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<u64> {
        let line = self.line;
        let tok = self.token(what)?;
        std::str::from_utf8(tok)
            .ok()
            .filter(|s| s.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|s| s.parse::<u64>().ok())
            .ok_or_else(|| {
                Error::parse(
                    line,
                    format!("{what} {:?} is not a non-negative integer", String::from_utf8_lossy(tok)),
                )
            })
    }
}

pub(super) fn parse(bytes: &[u8]) -> Result<LabelMap> {
    let binary = match bytes.get(..2) {
        Some(b"P5") => true,
        Some(b"P2") => false,
        _ => return Err(Error::parse(1, "expected PGM magic P5 or P2")),
    };
    let mut cur = Cursor::new(bytes);
    cur.pos = 2;
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    if width == 0 || height == 0 {
        return Err(Error::Dimension(format!(
            "PGM must be at least 1x1, got {width}x{height}"
        )));
    }
    let maxval_line = cur.line;
    let maxval = cur.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::parse(
            maxval_line,
            format!("maxval must be in 1..=65535, got {maxval}"),
        ));
    }
    let n = (width as usize)
        .checked_mul(height as usize)
        .ok_or_else(|| Error::Dimension(format!("{width}x{height} is too large")))?;

    let mut labels: Vec<Label> = Vec::with_capacity(n);
    if binary {
        // Exactly one whitespace byte separates maxval from the raster.
        if !cur.bytes.get(cur.pos).is_some_and(u8::is_ascii_whitespace) {
            return Err(Error::parse(cur.line, "missing whitespace after maxval"));
        }
        let data = &bytes[cur.pos + 1..];
        let depth = if maxval > 255 { 2 } else { 1 };
        if data.len() < n * depth {
            return Err(Error::parse(
                cur.line,
                format!(
                    "raster truncated: {} of {} bytes present",
                    data.len(),
                    n * depth
                ),
            ));
        }
        if depth == 1 {
            labels.extend(data[..n].iter().map(|&b| Label::from(b)));
        } else {
            labels.extend(
                data[..2 * n]
                    .chunks_exact(2)
                    .map(|c| Label::from(u16::from_be_bytes([c[0], c[1]]))),
            );
        }
    } else {
        for _ in 0..n {
            let line = cur.line;
            let v = cur.number("pixel value")?;
            if v > maxval {
                return Err(Error::parse(
                    line,
                    format!("pixel value {v} exceeds maxval {maxval}"),
                ));
            }
            labels.push(v as Label);
        }
    }
    if let Some(v) = labels.iter().find(|&&v| u64::from(v) > maxval) {
        return Err(Error::parse(
            cur.line,
            format!("pixel value {v} exceeds maxval {maxval}"),
        ));
    }
    LabelMap::new(width as usize, height as usize, labels)
}

/// Binary `P5`, one byte per pixel when every label fits, two otherwise.
pub fn write_pgm(map: &LabelMap) -> Result<Vec<u8>> {
    let max = map.labels().iter().copied().max().unwrap_or(0);
    if max > 65535 {
        return Err(Error::Domain(format!(
            "label {max} does not fit a 16-bit PGM"
        )));
    }
    let maxval = max.max(1);
    let mut out = format!("P5\n{} {}\n{maxval}\n", map.width(), map.height()).into_bytes();
    if maxval > 255 {
        for &l in map.labels() {
            out.extend_from_slice(&(l as u16).to_be_bytes());
        }
    } else {
        out.extend(map.labels().iter().map(|&l| l as u8));
    }
    Ok(out)
}
