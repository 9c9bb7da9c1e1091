//! Label maps and ground-truth sets.

use crate::error::{Error, Result};

/// Region label carried by one pixel.
pub type Label = u32;

/// A rectangular grid of region labels, stored row-major.
///
/// Labels are opaque: they need not be contiguous or start at zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<Label>,
}

impl LabelMap {
    pub fn new(width: usize, height: usize, labels: Vec<Label>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Dimension(format!(
                "label map must be at least 1x1, got {width}x{height}"
            )));
        }
        let expected = width.checked_mul(height).ok_or_else(|| {
            Error::Dimension(format!("{width}x{height} overflows the pixel count"))
        })?;
        if labels.len() != expected {
            return Err(Error::Dimension(format!(
                "{width}x{height} map needs {expected} labels, got {}",
                labels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            labels,
        })
    }

    /// A map with every pixel set to `label`.
    pub fn uniform(width: usize, height: usize, label: Label) -> Result<Self> {
        Self::new(width, height, vec![label; width * height])
    }

    /// Builds a map by evaluating `f(row, col)` for every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> Label,
    ) -> Result<Self> {
        let mut labels = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                labels.push(f(row, col));
            }
        }
        Self::new(width, height, labels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Rows of the map, top to bottom.
    pub fn rows(&self) -> impl Iterator<Item = &[Label]> {
        self.labels.chunks_exact(self.width)
    }

    pub fn get(&self, row: usize, col: usize) -> Option<Label> {
        (row < self.height && col < self.width).then(|| self.labels[row * self.width + col])
    }

    #[inline]
    pub(crate) fn at(&self, row: usize, col: usize) -> Label {
        self.labels[row * self.width + col]
    }

    pub fn same_shape(&self, other: &LabelMap) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Applies `f` to every label, keeping the geometry.
    pub fn map_labels(&self, f: impl Fn(Label) -> Label) -> LabelMap {
        LabelMap {
            width: self.width,
            height: self.height,
            labels: self.labels.iter().map(|&l| f(l)).collect(),
        }
    }
}

/// An ordered, non-empty list of reference segmentations sharing one shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundTruthSet {
    members: Vec<LabelMap>,
}

impl GroundTruthSet {
    pub fn new(members: Vec<LabelMap>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::Degenerate("ground-truth set is empty".into()))?;
        if let Some((idx, bad)) = members
            .iter()
            .enumerate()
            .find(|(_, m)| !m.same_shape(first))
        {
            return Err(Error::Dimension(format!(
                "ground truth #{idx} is {}x{}, expected {}x{}",
                bad.width(),
                bad.height(),
                first.width(),
                first.height()
            )));
        }
        Ok(Self { members })
    }

    pub fn single(map: LabelMap) -> Self {
        Self { members: vec![map] }
    }

    pub fn members(&self) -> &[LabelMap] {
        &self.members
    }

    /// Number of members, `K`.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn width(&self) -> usize {
        self.members[0].width()
    }

    pub fn height(&self) -> usize {
        self.members[0].height()
    }

    /// Fails unless `test` has the same shape as every member.
    pub fn check_matches(&self, test: &LabelMap) -> Result<()> {
        if test.same_shape(&self.members[0]) {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "test map is {}x{}, ground truth is {}x{}",
                test.width(),
                test.height(),
                self.width(),
                self.height()
            )))
        }
    }
}
