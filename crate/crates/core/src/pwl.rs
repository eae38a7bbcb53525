//! Continuous piecewise-linear functions on `[0, 1]`, extended with
//! period 1.
//!
//! A [`PwlFunction`] stores values at breakpoints; slopes are derived, so
//! continuity is structural. Pieces may carry [`SegmentTag`]s recording the
//! slope sign and the construction step that created them.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SlopeSign {
    Positive,
    Negative,
}

/// Per-piece construction metadata. For negative pieces `index` is the
/// step at which the segment first appeared; for positive pieces it is the
/// step that produced the current piece.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SegmentTag {
    pub sign: SlopeSign,
    pub index: usize,
}

impl SegmentTag {
    pub fn positive(index: usize) -> Self {
        SegmentTag {
            sign: SlopeSign::Positive,
            index,
        }
    }

    pub fn negative(index: usize) -> Self {
        SegmentTag {
            sign: SlopeSign::Negative,
            index,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPwl")]
pub struct PwlFunction {
    breakpoints: Vec<Rational>,
    values: Vec<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tags: Option<Vec<SegmentTag>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPwl {
    breakpoints: Vec<Rational>,
    values: Vec<Rational>,
    #[serde(default)]
    tags: Option<Vec<SegmentTag>>,
}

impl TryFrom<RawPwl> for PwlFunction {
    type Error = Error;

    fn try_from(raw: RawPwl) -> Result<Self> {
        let f = PwlFunction::new(raw.breakpoints, raw.values)?;
        match raw.tags {
            Some(tags) => f.with_tags(tags),
            None => Ok(f),
        }
    }
}

/// One linear piece `[left, right]` with its slope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub left: Rational,
    pub right: Rational,
    pub slope: Rational,
}

impl PwlFunction {
    /// Validates: at least two breakpoints, strictly increasing, starting at
    /// 0 and ending at 1, one value per breakpoint, equal end values.
    pub fn new(breakpoints: Vec<Rational>, values: Vec<Rational>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidFunction(
                "need at least two breakpoints".into(),
            ));
        }
        if breakpoints.len() != values.len() {
            return Err(Error::InvalidFunction(format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if !breakpoints[0].is_zero() {
            return Err(Error::InvalidFunction(format!(
                "first breakpoint is {}, expected 0",
                breakpoints[0]
            )));
        }
        let last = breakpoints.len() - 1;
        if breakpoints[last] != Rational::one() {
            return Err(Error::InvalidFunction(format!(
                "last breakpoint is {}, expected 1",
                breakpoints[last]
            )));
        }
        if let Some(k) = breakpoints.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidFunction(format!(
                "breakpoints not strictly increasing at index {}: {} >= {}",
                k,
                breakpoints[k],
                breakpoints[k + 1]
            )));
        }
        if values[0] != values[last] {
            return Err(Error::InvalidFunction(format!(
                "values at 0 and 1 differ ({} vs {})",
                values[0], values[last]
            )));
        }
        Ok(PwlFunction {
            breakpoints,
            values,
            tags: None,
        })
    }

    pub fn from_points(points: &[(Rational, Rational)]) -> Result<Self> {
        let (b, v) = points.iter().cloned().unzip();
        PwlFunction::new(b, v)
    }

    pub fn zero() -> Self {
        PwlFunction {
            breakpoints: vec![Rational::zero(), Rational::one()],
            values: vec![Rational::zero(), Rational::zero()],
            tags: None,
        }
    }

    pub fn with_tags(mut self, tags: Vec<SegmentTag>) -> Result<Self> {
        if tags.len() != self.num_pieces() {
            return Err(Error::InvalidFunction(format!(
                "{} tags for {} pieces",
                tags.len(),
                self.num_pieces()
            )));
        }
        for (k, tag) in tags.iter().enumerate() {
            let slope = self.slope(k);
            let ok = match tag.sign {
                SlopeSign::Positive => slope.is_positive(),
                SlopeSign::Negative => slope.is_negative(),
            };
            if !ok {
                return Err(Error::InvalidFunction(format!(
                    "tag {:?} on piece {} contradicts its slope {}",
                    tag.sign, k, slope
                )));
            }
        }
        self.tags = Some(tags);
        Ok(self)
    }

    pub fn without_tags(mut self) -> Self {
        self.tags = None;
        self
    }

    pub(crate) fn from_parts_unchecked(
        breakpoints: Vec<Rational>,
        values: Vec<Rational>,
        tags: Option<Vec<SegmentTag>>,
    ) -> Self {
        debug_assert!(breakpoints.windows(2).all(|w| w[0] < w[1]));
        debug_assert_eq!(breakpoints.len(), values.len());
        PwlFunction {
            breakpoints,
            values,
            tags,
        }
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn tags(&self) -> Option<&[SegmentTag]> {
        self.tags.as_deref()
    }

    pub fn num_pieces(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn slope(&self, k: usize) -> Rational {
        (&self.values[k + 1] - &self.values[k]) / (&self.breakpoints[k + 1] - &self.breakpoints[k])
    }

    /// Evaluates the period-1 extension at `x`.
    pub fn eval(&self, x: &Rational) -> Rational {
        let x = x.mod_one();
        self.eval_in_unit(&x)
    }

    /// Evaluation for `x` already known to lie in `[0, 1]`.
    pub(crate) fn eval_in_unit(&self, x: &Rational) -> Rational {
        // index of the first breakpoint strictly greater than x
        let k = self.breakpoints.partition_point(|b| b <= x);
        debug_assert!(k >= 1);
        let lo = k - 1;
        if &self.breakpoints[lo] == x || lo == self.breakpoints.len() - 1 {
            return self.values[lo].clone();
        }
        let (b0, b1) = (&self.breakpoints[lo], &self.breakpoints[lo + 1]);
        let (v0, v1) = (&self.values[lo], &self.values[lo + 1]);
        v0 + (v1 - v0) * (x - b0) / (b1 - b0)
    }

    /// Index of the piece containing `x` in `[0, 1)`; a breakpoint belongs
    /// to the piece on its right.
    pub fn piece_index(&self, x: &Rational) -> usize {
        let x = x.mod_one();
        self.breakpoints.partition_point(|b| b <= &x) - 1
    }

    pub fn pieces(&self) -> Vec<Piece> {
        (0..self.num_pieces())
            .map(|k| Piece {
                left: self.breakpoints[k].clone(),
                right: self.breakpoints[k + 1].clone(),
                slope: self.slope(k),
            })
            .collect()
    }

    /// Sorted set of distinct slope values.
    pub fn distinct_slopes(&self) -> Vec<Rational> {
        let set: BTreeSet<Rational> = (0..self.num_pieces()).map(|k| self.slope(k)).collect();
        set.into_iter().collect()
    }

    /// Merges adjacent pieces with equal slope. Tags of merged pieces are
    /// taken from the leftmost piece of each run.
    pub fn normalize(&self) -> PwlFunction {
        let n = self.num_pieces();
        let mut bps = vec![self.breakpoints[0].clone()];
        let mut vals = vec![self.values[0].clone()];
        let mut tags = self.tags.as_ref().map(|_| Vec::new());
        let mut prev_slope: Option<Rational> = None;
        for k in 0..n {
            let s = self.slope(k);
            if prev_slope.as_ref() == Some(&s) {
                *bps.last_mut().unwrap() = self.breakpoints[k + 1].clone();
                *vals.last_mut().unwrap() = self.values[k + 1].clone();
            } else {
                bps.push(self.breakpoints[k + 1].clone());
                vals.push(self.values[k + 1].clone());
                if let (Some(out), Some(src)) = (tags.as_mut(), self.tags.as_ref()) {
                    out.push(src[k]);
                }
                prev_slope = Some(s);
            }
        }
        PwlFunction::from_parts_unchecked(bps, vals, tags)
    }

    /// Smallest and largest breakpoint value. For a continuous PWL
    /// function these are the global extrema.
    pub fn value_range(&self) -> (Rational, Rational) {
        let min = self.values.iter().min().unwrap().clone();
        let max = self.values.iter().max().unwrap().clone();
        (min, max)
    }
}

impl fmt::Debug for PwlFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PwlFunction[")?;
        for (k, (b, v)) in self.breakpoints.iter().zip(&self.values).enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({b}, {v})")?;
        }
        f.write_str("]")
    }
}

/// Evaluates `f` at `x`. Free-function form of [`PwlFunction::eval`].
pub fn eval(f: &PwlFunction, x: &Rational) -> Rational {
    f.eval(x)
}

/// Slope of every piece, in order; adjacent equal slopes are not merged.
pub fn slopes(f: &PwlFunction) -> Vec<Piece> {
    f.pieces()
}

pub fn distinct_slopes(f: &PwlFunction) -> Vec<Rational> {
    f.distinct_slopes()
}

/// Sorted union of the breakpoints of `f` and `g`.
pub fn merged_breakpoints(f: &PwlFunction, g: &PwlFunction) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::with_capacity(f.breakpoints.len() + g.breakpoints.len());
    let (a, b) = (&f.breakpoints, &g.breakpoints);
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = if j == b.len() || (i < a.len() && a[i] <= b[j]) {
            i += 1;
            &a[i - 1]
        } else {
            j += 1;
            &b[j - 1]
        };
        if out.last() != Some(next) {
            out.push(next.clone());
        }
    }
    out
}

/// Pointwise sum on the union of the breakpoint sets.
pub fn add(f: &PwlFunction, g: &PwlFunction) -> PwlFunction {
    let bps = merged_breakpoints(f, g);
    let vals = bps
        .iter()
        .map(|x| f.eval_in_unit(x) + g.eval_in_unit(x))
        .collect();
    PwlFunction::from_parts_unchecked(bps, vals, None)
}

/// `sup |f - g|` over `[0, 1]`, attained at a breakpoint of either function.
pub fn sup_diff_at_breakpoints(f: &PwlFunction, g: &PwlFunction) -> Rational {
    merged_breakpoints(f, g)
        .iter()
        .map(|x| (f.eval_in_unit(x) - g.eval_in_unit(x)).abs())
        .max()
        .unwrap_or_else(Rational::zero)
}

/// Lazy handle for `x -> a * f(b * x)`.
///
/// The result has period `1/|b|`, so it is kept as a handle rather than
/// re-expressed on `[0, 1]`.
#[derive(Clone, Debug)]
pub struct Scaled<'a> {
    base: &'a PwlFunction,
    outer: Rational,
    inner: Rational,
}

/// Builds the scaling `x -> a * f(b * x)`; requires `a > 0` and `b != 0`.
pub fn scale<'a>(f: &'a PwlFunction, a: Rational, b: Rational) -> Result<Scaled<'a>> {
    if !a.is_positive() {
        return Err(Error::OutOfDomain {
            name: "a",
            value: a,
            domain: "]0, +inf[",
        });
    }
    if b.is_zero() {
        return Err(Error::OutOfDomain {
            name: "b",
            value: b,
            domain: "R \\ {0}",
        });
    }
    Ok(Scaled {
        base: f,
        outer: a,
        inner: b,
    })
}

impl<'a> Scaled<'a> {
    pub fn eval(&self, x: &Rational) -> Rational {
        &self.outer * self.base.eval(&(&self.inner * x))
    }

    pub fn outer(&self) -> &Rational {
        &self.outer
    }

    pub fn inner(&self) -> &Rational {
        &self.inner
    }

    /// Composes another scaling on top: `a2 * h(b2 * x)`.
    pub fn rescale(&self, a2: Rational, b2: Rational) -> Result<Scaled<'a>> {
        let composed = scale(self.base, &self.outer * &a2, &self.inner * &b2)?;
        Ok(composed)
    }

    /// Breakpoints of the handle inside the closed interval `[lo, hi]`,
    /// sorted: all `x` with `b * x` congruent to a breakpoint of the base.
    pub fn breakpoints_in(&self, lo: &Rational, hi: &Rational) -> Vec<Rational> {
        let (u0, u1) = if self.inner.is_positive() {
            (&self.inner * lo, &self.inner * hi)
        } else {
            (&self.inner * hi, &self.inner * lo)
        };
        let mut out = BTreeSet::new();
        let base_bps = &self.base.breakpoints[..self.base.breakpoints.len() - 1];
        let mut shift = u0.floor();
        while shift <= u1 {
            for b in base_bps {
                let u = b + &shift;
                if u >= u0 && u <= u1 {
                    out.insert(u / &self.inner);
                }
            }
            shift = shift + Rational::one();
        }
        out.into_iter().collect()
    }
}
