//! Adjustable moving-window pixel-pair sampling.
//!
//! A window of `w_v` rows by `w_h` columns carries a grid with spacings
//! `d_v`, `d_h`. Its anchor `P` visits a stride-2 lattice twice:
//!
//! * left-to-right, `P` on even rows and columns, `Q` on grid points to the
//!   right of and below `P` (row and column of `P` included);
//! * right-to-left, `P` on odd rows and columns, `Q` on grid points strictly
//!   below and strictly left of `P`.
//!
//! `P = Q` is skipped, as is any `Q` that falls outside the image. The two
//! passes cover disjoint offset directions, so no unordered pair repeats.

use crate::error::{Error, Result};
use crate::stats::Granularity;

/// Proportional constants for window size (`alpha`) and grid spacing (`beta`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AwpsParams {
    alpha: f64,
    beta: f64,
}

impl AwpsParams {
    pub const DEFAULT_ALPHA: f64 = 0.55;
    pub const DEFAULT_BETA: f64 = 0.055;

    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::Parameter(format!("beta must be positive, got {beta}")));
        }
        if beta >= alpha {
            return Err(Error::Parameter(format!(
                "beta must be smaller than alpha (alpha = {alpha}, beta = {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

impl Default for AwpsParams {
    fn default() -> Self {
        Self {
            alpha: Self::DEFAULT_ALPHA,
            beta: Self::DEFAULT_BETA,
        }
    }
}

/// Integer window extents and grid spacings, in pixels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WindowGeometry {
    pub w_h: usize,
    pub w_v: usize,
    pub d_h: usize,
    pub d_v: usize,
}

/// Products this close to an integer are taken as that integer, so that e.g.
/// `0.55 * 100.0` spans 55 pixels rather than 56.
const SNAP: f64 = 1e-9;

fn round_half_up(x: f64) -> usize {
    (x + 0.5 + SNAP).floor().max(1.0) as usize
}

/// Pixels `I, I+1, …` that satisfy `i < I + x` for a real extent `x`.
fn pixel_extent(x: f64) -> usize {
    (x - SNAP).ceil().max(1.0) as usize
}

impl WindowGeometry {
    pub fn new(w_h: usize, w_v: usize, d_h: usize, d_v: usize) -> Result<Self> {
        if d_h == 0 || d_v == 0 || d_h > w_h || d_v > w_v {
            return Err(Error::Parameter(format!(
                "need 1 <= d <= w on both axes, got w = {w_h}x{w_v}, d = {d_h}x{d_v}"
            )));
        }
        Ok(Self { w_h, w_v, d_h, d_v })
    }

    /// The window keeps its real extent `alpha·mean`: a grid offset `o` is
    /// inside when `o < alpha·mean`, which for integer offsets is the same as
    /// `o < ceil(alpha·mean)`. Spacings must step whole pixels and are rounded
    /// half-up. Everything is at least 1, and `d ≤ w`.
    pub fn from_means(params: AwpsParams, h_m: f64, v_m: f64) -> Self {
        let w_h = pixel_extent(params.alpha * h_m);
        let w_v = pixel_extent(params.alpha * v_m);
        Self {
            w_h,
            w_v,
            d_h: round_half_up(params.beta * h_m).min(w_h),
            d_v: round_half_up(params.beta * v_m).min(w_v),
        }
    }

    /// True when an axis has collapsed to the anchor line alone (`d = w`).
    pub fn is_collapsed(&self) -> bool {
        self.d_h == self.w_h || self.d_v == self.w_v
    }
}

pub fn window_geometry(params: AwpsParams, g: &Granularity) -> WindowGeometry {
    WindowGeometry::from_means(params, g.h_m, g.v_m)
}

/// Two distinct pixels, each given as `(row, col)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PixelPair {
    pub p_row: u32,
    pub p_col: u32,
    pub q_row: u32,
    pub q_col: u32,
}

impl PixelPair {
    pub fn new(p: (usize, usize), q: (usize, usize)) -> Self {
        Self {
            p_row: p.0 as u32,
            p_col: p.1 as u32,
            q_row: q.0 as u32,
            q_col: q.1 as u32,
        }
    }

    pub fn p(&self) -> (usize, usize) {
        (self.p_row as usize, self.p_col as usize)
    }

    pub fn q(&self) -> (usize, usize) {
        (self.q_row as usize, self.q_col as usize)
    }

    #[inline]
    pub fn coords(&self) -> (usize, usize, usize, usize) {
        (
            self.p_row as usize,
            self.p_col as usize,
            self.q_row as usize,
            self.q_col as usize,
        )
    }

    /// The same unordered pair with its row-major smaller pixel first.
    pub fn canonical(self) -> Self {
        if (self.q_row, self.q_col) < (self.p_row, self.p_col) {
            Self {
                p_row: self.q_row,
                p_col: self.q_col,
                q_row: self.p_row,
                q_col: self.p_col,
            }
        } else {
            self
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pass {
    LeftToRight,
    RightToLeft,
}

/// One anchor row of one pass; the unit of parallel work.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Segment {
    pub pass: Pass,
    pub anchor_row: usize,
}

/// Deterministic pair stream for one image size and window geometry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AwpsSampler {
    geometry: WindowGeometry,
    width: usize,
    height: usize,
}

impl AwpsSampler {
    /// Fails when the geometry admits no pair at all on this image.
    pub fn new(geometry: WindowGeometry, width: usize, height: usize) -> Result<Self> {
        WindowGeometry::new(geometry.w_h, geometry.w_v, geometry.d_h, geometry.d_v)?;
        if width == 0 || height == 0 {
            return Err(Error::Dimension(format!(
                "image must be at least 1x1, got {width}x{height}"
            )));
        }
        if u32::try_from(width.max(height)).is_err() {
            return Err(Error::Dimension(format!("{width}x{height} image is too large")));
        }
        let sampler = Self {
            geometry,
            width,
            height,
        };
        if sampler.pairs().next().is_none() {
            return Err(Error::Degenerate(format!(
                "window {}x{} with spacing {}x{} yields no pixel-pairs on a {width}x{height} image",
                geometry.w_h, geometry.w_v, geometry.d_h, geometry.d_v
            )));
        }
        Ok(sampler)
    }

    pub fn geometry(&self) -> WindowGeometry {
        self.geometry
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Anchor rows in stream order: all even rows of the first pass, then all
    /// odd rows of the second.
    pub fn segments(&self) -> impl Iterator<Item = Segment> {
        let forward = (0..self.height).step_by(2).map(|anchor_row| Segment {
            pass: Pass::LeftToRight,
            anchor_row,
        });
        let backward = (1..self.height).step_by(2).map(|anchor_row| Segment {
            pass: Pass::RightToLeft,
            anchor_row,
        });
        forward.chain(backward)
    }

    /// Pairs anchored on one row, in nested-loop order (anchor column, then
    /// grid row, then grid column).
    pub fn segment_pairs(&self, segment: Segment) -> Box<dyn Iterator<Item = PixelPair> + '_> {
        let WindowGeometry { w_h, w_v, d_h, d_v } = self.geometry;
        let (width, height) = (self.width, self.height);
        let row0 = segment.anchor_row;
        let row_end = (row0 + w_v).min(height);
        match segment.pass {
            Pass::LeftToRight => Box::new((0..width).step_by(2).flat_map(move |col0| {
                let col_end = (col0 + w_h).min(width);
                (row0..row_end).step_by(d_v).flat_map(move |row| {
                    (col0..col_end)
                        .step_by(d_h)
                        .filter(move |&col| row != row0 || col != col0)
                        .map(move |col| PixelPair::new((row0, col0), (row, col)))
                })
            })),
            Pass::RightToLeft => Box::new((1..width).step_by(2).flat_map(move |col0| {
                // Offsets n·d_h with 1 <= n, n·d_h < w_h and n·d_h <= col0.
                let steps = ((w_h - 1) / d_h).min(col0 / d_h);
                (row0 + d_v..row_end).step_by(d_v).flat_map(move |row| {
                    (1..=steps).map(move |n| PixelPair::new((row0, col0), (row, col0 - n * d_h)))
                })
            })),
        }
    }

    pub fn pairs(&self) -> impl Iterator<Item = PixelPair> + '_ {
        self.segments().flat_map(move |s| self.segment_pairs(s))
    }

    pub fn count(&self) -> u64 {
        self.pairs().count() as u64
    }
}

/// Materialises the full stream for `geometry` on a `width`×`height` image.
pub fn sample_pairs(geometry: WindowGeometry, width: usize, height: usize) -> Result<Vec<PixelPair>> {
    Ok(AwpsSampler::new(geometry, width, height)?.pairs().collect())
}

/// Approximate stream length ignoring clipping at the image border:
/// `¼·((α/β + 1)² + (α/β)²)·width·height`.
pub fn estimate_pair_count(alpha: f64, beta: f64, width: usize, height: usize) -> Result<f64> {
    let params = AwpsParams::new(alpha, beta)?;
    estimate_for_ratio(params.alpha / params.beta, width, height)
}

/// [`estimate_pair_count`] expressed through the ratio `α/β` alone.
pub fn estimate_for_ratio(ratio: f64, width: usize, height: usize) -> Result<f64> {
    if !(ratio.is_finite() && ratio >= 1.0) {
        return Err(Error::Parameter(format!("alpha/beta must be at least 1, got {ratio}")));
    }
    if width == 0 || height == 0 {
        return Err(Error::Dimension(format!(
            "image must be at least 1x1, got {width}x{height}"
        )));
    }
    Ok(0.25 * ((ratio + 1.0).powi(2) + ratio.powi(2)) * (width * height) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn geom(w_h: usize, w_v: usize, d_h: usize, d_v: usize) -> WindowGeometry {
        WindowGeometry::new(w_h, w_v, d_h, d_v).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(matches!(AwpsParams::new(1.0, 1.0), Err(Error::Parameter(_))));
        assert!(matches!(AwpsParams::new(0.5, 0.6), Err(Error::Parameter(_))));
        assert!(AwpsParams::new(-0.5, 0.1).is_err());
        assert!(AwpsParams::new(0.5, 0.0).is_err());
        assert_eq!(AwpsParams::default(), AwpsParams::new(0.55, 0.055).unwrap());
    }

    #[test]
    fn geometry_from_horses_means() {
        let params = AwpsParams::new(0.55, 0.055).unwrap();
        assert_eq!(WindowGeometry::from_means(params, 140.9, 91.22), geom(78, 51, 8, 5));
    }

    #[test]
    fn integer_extent_matches_the_real_bound() {
        for x in [0.3, 1.0, 5.5, 49.6, 50.171, 77.495, 130.0] {
            let w = pixel_extent(x);
            let inside = (0..200).filter(|&o| (o as f64) < x).count().max(1);
            assert_eq!(w, inside, "{x}");
        }
        // Products that are integers up to rounding error stay integers.
        assert_eq!(pixel_extent(0.55 * 100.0), 55);
        assert_eq!(pixel_extent(0.3 * 130.0), 39);
        assert_eq!(round_half_up(0.055 * 100.0), 6);
    }

    #[test]
    fn geometry_from_exact_products() {
        let params = AwpsParams::new(0.5, 0.1).unwrap();
        let g = Granularity::pinned(10.0, 10.0).unwrap();
        assert_eq!(window_geometry(params, &g), geom(5, 5, 1, 1));
    }

    #[test]
    fn geometry_clamps_to_one_and_to_window() {
        let params = AwpsParams::new(0.2, 0.01).unwrap();
        let g = WindowGeometry::from_means(params, 3.0, 2.0);
        assert_eq!(g, geom(1, 1, 1, 1));
        assert!(g.is_collapsed());
        assert!(WindowGeometry::new(2, 2, 3, 1).is_err());
        assert!(WindowGeometry::new(2, 2, 0, 1).is_err());
    }

    #[test]
    fn smallest_image_has_one_pair() {
        let pairs = sample_pairs(geom(2, 1, 1, 1), 2, 1).unwrap();
        assert_eq!(pairs, vec![PixelPair::new((0, 0), (0, 1))]);
    }

    #[test]
    fn single_pixel_is_degenerate() {
        assert!(matches!(
            sample_pairs(geom(4, 4, 1, 1), 1, 1),
            Err(Error::Degenerate(_))
        ));
        // The window never reaches past its own anchor.
        assert!(matches!(
            sample_pairs(geom(1, 1, 1, 1), 8, 8),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn stream_is_unique_and_in_bounds() {
        let sampler = AwpsSampler::new(geom(5, 4, 2, 1), 13, 9).unwrap();
        let mut seen = HashSet::new();
        for p in sampler.pairs() {
            assert_ne!(p.p(), p.q());
            assert!(p.q_row < 9 && p.q_col < 13);
            assert!(seen.insert(p.canonical()), "duplicate {p:?}");
        }
        assert!(!seen.is_empty());
    }

    #[test]
    fn interior_anchor_covers_all_directions() {
        let sampler = AwpsSampler::new(geom(4, 4, 2, 2), 16, 16).unwrap();
        let forward: Vec<_> = sampler
            .pairs()
            .filter(|p| p.p() == (6, 6))
            .map(|p| (p.q_row as i64 - 6, p.q_col as i64 - 6))
            .collect();
        assert_eq!(forward, vec![(0, 2), (2, 0), (2, 2)]);
        let backward: Vec<_> = sampler
            .pairs()
            .filter(|p| p.p() == (7, 7))
            .map(|p| (p.q_row as i64 - 7, p.q_col as i64 - 7))
            .collect();
        assert_eq!(backward, vec![(2, -2)]);
    }

    #[test]
    fn segments_concatenate_to_serial_order() {
        let sampler = AwpsSampler::new(geom(6, 5, 2, 2), 17, 11).unwrap();
        let serial: Vec<_> = sampler.pairs().collect();
        let mut joined = Vec::new();
        for s in sampler.segments() {
            joined.extend(sampler.segment_pairs(s));
        }
        assert_eq!(serial, joined);
    }

    #[test]
    fn estimate_values() {
        let e = estimate_pair_count(1.0, 0.1, 481, 321).unwrap();
        assert!((e - 8_530_655.25).abs() < 1e-6);
        let doubled = estimate_pair_count(2.0, 0.2, 481, 321).unwrap();
        assert!((e - doubled).abs() < 1e-6);
        assert!(estimate_pair_count(0.1, 0.2, 2, 2).is_err());
    }

    #[test]
    fn estimate_at_ratio_one() {
        assert_eq!(estimate_for_ratio(1.0, 2, 2).unwrap(), 5.0);
        assert!(estimate_for_ratio(0.5, 2, 2).is_err());
        assert!(estimate_for_ratio(2.0, 0, 2).is_err());
    }
}
