//! Rand, Extended Rand, PR and EPR indices.
//!
//! Every index is accumulated as an integer numerator and divided once at the
//! end, so a result never depends on the order in which pairs are visited or
//! on how the pair stream was split between workers.

use std::collections::HashMap;
use std::ops::{Add, AddAssign};

use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::label_map::{GroundTruthSet, LabelMap};
use crate::sampler::PixelPair;

/// Exact rational used for every reported index.
pub type Rational = Ratio<i128>;

/// A partition of `N_R ≥ 2` abstract points; `assignment[i]` is the cluster of point `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clustering {
    assignment: Vec<u64>,
}

impl Clustering {
    pub fn new(assignment: Vec<u64>) -> Result<Self> {
        if assignment.len() < 2 {
            return Err(Error::Degenerate(format!(
                "a clustering needs at least 2 points, got {}",
                assignment.len()
            )));
        }
        Ok(Self { assignment })
    }

    /// Views every pixel of a label map as a point.
    pub fn from_label_map(map: &LabelMap) -> Result<Self> {
        Self::new(map.labels().iter().map(|&l| u64::from(l)).collect())
    }

    pub fn assignment(&self) -> &[u64] {
        &self.assignment
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn cluster_count(&self) -> usize {
        let mut ids = self.assignment.clone();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    }
}

fn choose2(n: u64) -> i128 {
    let n = i128::from(n);
    n * (n - 1) / 2
}

/// Pair counts derived from the contingency table of two clusterings.
struct PairCounts {
    total: i128,
    together_in_a: i128,
    together_in_b: i128,
    together_in_both: i128,
}

fn pair_counts(a: &Clustering, b: &Clustering) -> Result<PairCounts> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "clusterings cover {} and {} points",
            a.len(),
            b.len()
        )));
    }
    let mut rows: HashMap<u64, u64> = HashMap::new();
    let mut cols: HashMap<u64, u64> = HashMap::new();
    let mut cells: HashMap<(u64, u64), u64> = HashMap::new();
    for (&x, &y) in a.assignment.iter().zip(&b.assignment) {
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
        *cells.entry((x, y)).or_default() += 1;
    }
    Ok(PairCounts {
        total: choose2(a.len() as u64),
        together_in_a: rows.values().map(|&n| choose2(n)).sum(),
        together_in_b: cols.values().map(|&n| choose2(n)).sum(),
        together_in_both: cells.values().map(|&n| choose2(n)).sum(),
    })
}

/// Fraction of point-pairs that are together in both or separated in both clusterings.
pub fn rand_index(a: &Clustering, b: &Clustering) -> Result<Rational> {
    let c = pair_counts(a, b)?;
    let separated_in_both = c.total - c.together_in_a - c.together_in_b + c.together_in_both;
    Ok(Rational::new(
        c.together_in_both + separated_in_both,
        c.total,
    ))
}

/// Similar pairs score +1, dissimilar (together in exactly one clustering) score −1.
pub fn extended_rand_index(a: &Clustering, b: &Clustering) -> Result<Rational> {
    let c = pair_counts(a, b)?;
    // Mixed pairs: together in a but not b, plus together in b but not a.
    let dissimilar = c.together_in_a + c.together_in_b - 2 * c.together_in_both;
    let similar = c.total - dissimilar;
    Ok(Rational::new(similar - dissimilar, c.total))
}

/// How a single pixel-pair is judged by the test map and the `K` references.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairContribution {
    /// Test labels at the two pixels are equal.
    pub same_in_test: bool,
    /// Number of references in which the two pixels share a label.
    pub agreeing: u32,
    pub k: u32,
}

impl PairContribution {
    /// Test pair function: +1 when the test labels agree, −1 otherwise.
    pub fn test_sign(&self) -> i64 {
        if self.same_in_test {
            1
        } else {
            -1
        }
    }

    /// Reference pair function scaled by `K`: `2a − K`.
    pub fn ground_truth_scaled(&self) -> i64 {
        2 * i64::from(self.agreeing) - i64::from(self.k)
    }

    /// PR summand scaled by `K`: `c·a + (1 − c)(K − a)`.
    pub fn pr_term(&self) -> i64 {
        if self.same_in_test {
            i64::from(self.agreeing)
        } else {
            i64::from(self.k - self.agreeing)
        }
    }

    /// EPR summand scaled by `K`.
    pub fn epr_term(&self) -> i64 {
        self.test_sign() * self.ground_truth_scaled()
    }
}

#[inline]
fn contribution_unchecked(test: &LabelMap, gts: &GroundTruthSet, p: PixelPair) -> PairContribution {
    let (pr, pc, qr, qc) = p.coords();
    let agreeing = gts
        .members()
        .iter()
        .filter(|g| g.at(pr, pc) == g.at(qr, qc))
        .count() as u32;
    PairContribution {
        same_in_test: test.at(pr, pc) == test.at(qr, qc),
        agreeing,
        k: gts.len() as u32,
    }
}

fn check_pair(test: &LabelMap, p: PixelPair) -> Result<()> {
    let (w, h) = (test.width(), test.height());
    for (row, col) in [p.p(), p.q()] {
        if row >= h || col >= w {
            return Err(Error::OutOfBounds {
                row,
                col,
                width: w,
                height: h,
            });
        }
    }
    Ok(())
}

pub fn pair_contribution(
    test: &LabelMap,
    gts: &GroundTruthSet,
    p: PixelPair,
) -> Result<PairContribution> {
    gts.check_matches(test)?;
    check_pair(test, p)?;
    Ok(contribution_unchecked(test, gts, p))
}

/// Running integer sums over a set of pairs. Merging is plain addition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PairTally {
    pub pairs: u64,
    pub pr: i64,
    pub epr: i64,
    pub rpp: i64,
    pub rmm: i64,
    pub rpm: i64,
}

impl PairTally {
    #[inline]
    pub fn push(&mut self, c: PairContribution) {
        let tf = c.test_sign();
        let gf = c.ground_truth_scaled();
        let term = tf * gf;
        self.pairs += 1;
        self.pr += c.pr_term();
        self.epr += term;
        if tf > 0 && gf > 0 {
            self.rpp += term;
        } else if tf < 0 && gf < 0 {
            self.rmm += term;
        } else {
            // Opposite signs, and ties with 2a − K = 0.
            self.rpm += term;
        }
    }

    pub fn into_report(self, k: usize) -> Result<EvalReport> {
        if self.pairs == 0 {
            return Err(Error::Degenerate("no pixel-pairs to evaluate".into()));
        }
        Ok(EvalReport {
            t: self.pairs,
            k: k as u32,
            pr_numerator: self.pr,
            epr_numerator: self.epr,
            rpp_numerator: self.rpp,
            rmm_numerator: self.rmm,
            rpm_numerator: self.rpm,
        })
    }
}

impl Add for PairTally {
    type Output = PairTally;

    fn add(mut self, rhs: PairTally) -> PairTally {
        self += rhs;
        self
    }
}

impl AddAssign for PairTally {
    fn add_assign(&mut self, rhs: PairTally) {
        self.pairs += rhs.pairs;
        self.pr += rhs.pr;
        self.epr += rhs.epr;
        self.rpp += rhs.rpp;
        self.rmm += rhs.rmm;
        self.rpm += rhs.rpm;
    }
}

/// Exact outcome of evaluating a pair set. Every index equals its numerator over `t·k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalReport {
    pub t: u64,
    pub k: u32,
    pub pr_numerator: i64,
    pub epr_numerator: i64,
    pub rpp_numerator: i64,
    pub rmm_numerator: i64,
    pub rpm_numerator: i64,
}

impl EvalReport {
    pub fn denominator(&self) -> i128 {
        i128::from(self.t) * i128::from(self.k)
    }

    fn ratio(&self, num: i64) -> Rational {
        Rational::new(i128::from(num), self.denominator())
    }

    pub fn pr(&self) -> Rational {
        self.ratio(self.pr_numerator)
    }

    pub fn epr(&self) -> Rational {
        self.ratio(self.epr_numerator)
    }

    pub fn rpp(&self) -> Rational {
        self.ratio(self.rpp_numerator)
    }

    pub fn rmm(&self) -> Rational {
        self.ratio(self.rmm_numerator)
    }

    pub fn rpm(&self) -> Rational {
        self.ratio(self.rpm_numerator)
    }
}

/// Accumulates any pair stream; coordinates are validated as they arrive.
pub fn evaluate_iter(
    test: &LabelMap,
    gts: &GroundTruthSet,
    pairs: impl IntoIterator<Item = PixelPair>,
) -> Result<EvalReport> {
    gts.check_matches(test)?;
    let mut tally = PairTally::default();
    for p in pairs {
        check_pair(test, p)?;
        tally.push(contribution_unchecked(test, gts, p));
    }
    tally.into_report(gts.len())
}

pub fn evaluate_pairs(
    test: &LabelMap,
    gts: &GroundTruthSet,
    pairs: &[PixelPair],
) -> Result<EvalReport> {
    evaluate_iter(test, gts, pairs.iter().copied())
}

/// Parallel map-reduce over fixed-size chunks; identical result to [`evaluate_pairs`].
pub fn evaluate_pairs_parallel(
    test: &LabelMap,
    gts: &GroundTruthSet,
    pairs: &[PixelPair],
) -> Result<EvalReport> {
    const CHUNK: usize = 1 << 14;
    gts.check_matches(test)?;
    let tally = pairs
        .par_chunks(CHUNK)
        .map(|chunk| -> Result<PairTally> {
            let mut tally = PairTally::default();
            for &p in chunk {
                check_pair(test, p)?;
                tally.push(contribution_unchecked(test, gts, p));
            }
            Ok(tally)
        })
        .try_reduce(PairTally::default, |a, b| Ok(a + b))?;
    tally.into_report(gts.len())
}

/// Tally for pairs already known to be in-bounds for `test`.
pub(crate) fn tally_trusted(
    test: &LabelMap,
    gts: &GroundTruthSet,
    pairs: impl Iterator<Item = PixelPair>,
) -> PairTally {
    let mut tally = PairTally::default();
    for p in pairs {
        tally.push(contribution_unchecked(test, gts, p));
    }
    tally
}

/// Maps a PR value onto the EPR scale: `2·pr − 1`.
pub fn epr_from_pr(pr: Rational) -> Result<Rational> {
    if pr < Rational::from_integer(0) || pr > Rational::from_integer(1) {
        return Err(Error::Domain(format!("PR must lie in [0, 1], got {pr}")));
    }
    Ok(pr * 2 - 1)
}

/// Renders a rational with `digits` fractional digits, rounding half away from zero.
pub fn format_decimal(value: Rational, digits: u32) -> String {
    let scale = 10i128.pow(digits);
    let (num, den) = (*value.numer(), *value.denom());
    let negative = num < 0;
    let scaled = num.abs() * scale;
    let mut q = scaled / den;
    if (scaled % den) * 2 >= den {
        q += 1;
    }
    let int_part = q / scale;
    let frac_part = q % scale;
    let sign = if negative && q != 0 { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!(
            "{sign}{int_part}.{frac_part:0width$}",
            width = digits as usize
        )
    }
}

/// Parses a plain decimal literal such as `0.6252` into an exact rational.
pub fn parse_decimal(text: &str) -> Result<Rational> {
    let bad = || Error::Domain(format!("not a decimal number: {text:?}"));
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    if !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let num: i128 = digits.parse().map_err(|_| bad())?;
    let den = 10i128
        .checked_pow(frac_part.len() as u32)
        .ok_or_else(bad)?;
    let value = Rational::new(num, den);
    Ok(if negative { -value } else { value })
}

pub fn to_f64(value: Rational) -> f64 {
    *value.numer() as f64 / *value.denom() as f64
}
