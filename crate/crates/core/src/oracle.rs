//! Brute-force references over every unordered pixel-pair.
//!
//! Written for obviousness: two nested loops over the pixels and a direct call
//! into the per-pair kernel.

use crate::error::{Error, Result};
use crate::index::{evaluate_iter, EvalReport};
use crate::label_map::{GroundTruthSet, LabelMap};
use crate::sampler::PixelPair;

/// Largest pixel count the oracle accepts without an explicit override.
pub const MAX_ORACLE_PIXELS: usize = 10_000;

fn check_size(width: usize, height: usize, allow_large: bool) -> Result<usize> {
    let n = width
        .checked_mul(height)
        .ok_or_else(|| Error::Dimension(format!("{width}x{height} overflows the pixel count")))?;
    if n < 2 {
        return Err(Error::Degenerate(format!(
            "a {width}x{height} image has no pixel-pairs"
        )));
    }
    if n > MAX_ORACLE_PIXELS && !allow_large {
        return Err(Error::Resource(format!(
            "exhaustive evaluation of {n} pixels visits {} pairs; pass the large-input override to proceed",
            n as u128 * (n as u128 - 1) / 2
        )));
    }
    Ok(n)
}

/// Every unordered pair `(a, b)` with `a` before `b` in row-major order.
pub fn exhaustive_pairs(
    width: usize,
    height: usize,
    allow_large: bool,
) -> Result<impl Iterator<Item = PixelPair>> {
    let n = check_size(width, height, allow_large)?;
    let at = move |idx: usize| (idx / width, idx % width);
    Ok((0..n).flat_map(move |a| (a + 1..n).map(move |b| PixelPair::new(at(a), at(b)))))
}

pub fn exhaustive_eval(
    test: &LabelMap,
    gts: &GroundTruthSet,
    allow_large: bool,
) -> Result<EvalReport> {
    gts.check_matches(test)?;
    let pairs = exhaustive_pairs(test.width(), test.height(), allow_large)?;
    evaluate_iter(test, gts, pairs)
}
