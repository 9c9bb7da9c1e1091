//! Circumscribed rectangles of regions and the granularity they imply.
//!
//! A region is every pixel that carries one label value, whether or not those
//! pixels are connected.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::label_map::{GroundTruthSet, Label, LabelMap};

/// Tight bounding rectangle of one label value (inclusive bounds).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegionBox {
    pub label: Label,
    pub min_row: usize,
    pub max_row: usize,
    pub min_col: usize,
    pub max_col: usize,
}

impl RegionBox {
    fn seed(label: Label, row: usize, col: usize) -> Self {
        Self {
            label,
            min_row: row,
            max_row: row,
            min_col: col,
            max_col: col,
        }
    }

    fn include(&mut self, row: usize, col: usize) {
        self.min_row = self.min_row.min(row);
        self.max_row = self.max_row.max(row);
        self.min_col = self.min_col.min(col);
        self.max_col = self.max_col.max(col);
    }

    pub fn width(&self) -> usize {
        self.max_col - self.min_col + 1
    }

    pub fn height(&self) -> usize {
        self.max_row - self.min_row + 1
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        (self.min_row..=self.max_row).contains(&row) && (self.min_col..=self.max_col).contains(&col)
    }
}

/// One box per distinct label, ordered by label value.
pub fn region_boxes(map: &LabelMap) -> Vec<RegionBox> {
    let mut boxes: BTreeMap<Label, RegionBox> = BTreeMap::new();
    for (row, labels) in map.rows().enumerate() {
        for (col, &label) in labels.iter().enumerate() {
            boxes
                .entry(label)
                .and_modify(|b| b.include(row, col))
                .or_insert_with(|| RegionBox::seed(label, row, col));
        }
    }
    boxes.into_values().collect()
}

pub fn region_count(map: &LabelMap) -> usize {
    let mut labels = map.labels().to_vec();
    labels.sort_unstable();
    labels.dedup();
    labels.len()
}

/// Mean circumscribed-rectangle width (`h_m`) and height (`v_m`), pooled over
/// every region of every reference.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Granularity {
    pub h_m: f64,
    pub v_m: f64,
    /// Regions pooled into the means; zero when the means were pinned by hand.
    pub region_total: usize,
}

impl Granularity {
    /// Means supplied directly instead of measured from references.
    pub fn pinned(h_m: f64, v_m: f64) -> Result<Self> {
        for (name, v) in [("h_m", h_m), ("v_m", v_m)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            h_m,
            v_m,
            region_total: 0,
        })
    }
}

pub fn granularity(gts: &GroundTruthSet) -> Result<Granularity> {
    granularity_of(gts.members())
}

/// Same as [`granularity`] over a plain slice of maps.
pub fn granularity_of(members: &[LabelMap]) -> Result<Granularity> {
    if members.is_empty() {
        return Err(Error::Degenerate("no ground-truth maps to pool".into()));
    }
    let (mut widths, mut heights, mut n) = (0u64, 0u64, 0usize);
    for b in members.iter().flat_map(region_boxes) {
        widths += b.width() as u64;
        heights += b.height() as u64;
        n += 1;
    }
    Ok(Granularity {
        h_m: widths as f64 / n as f64,
        v_m: heights as f64 / n as f64,
        region_total: n,
    })
}
