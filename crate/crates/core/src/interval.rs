//! Real intervals with optional infinite endpoints.

use core::fmt;

/// An interval of the real line. Infinite endpoints are always open.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Self {
        Interval { lo, hi, lo_closed: lo_closed && lo.is_finite(), hi_closed: hi_closed && hi.is_finite() }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, true, true)
    }

    /// `[lo, hi)`
    pub fn half_open(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, true, false)
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, false, false)
    }

    pub fn real_line() -> Self {
        Self::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn empty() -> Self {
        Self::open(0.0, 0.0)
    }

    pub fn is_empty(&self) -> bool {
        !(self.lo < self.hi || (self.lo == self.hi && self.lo_closed && self.hi_closed))
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn length(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.hi - self.lo
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        let above = if self.lo_closed { t >= self.lo } else { t > self.lo };
        let below = if self.hi_closed { t <= self.hi } else { t < self.hi };
        above && below
    }

    /// Whether `t` lies strictly inside.
    pub fn interior_contains(&self, t: f64) -> bool {
        t > self.lo && t < self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_closed) = if self.lo > other.lo {
            (self.lo, self.lo_closed)
        } else if other.lo > self.lo {
            (other.lo, other.lo_closed)
        } else {
            (self.lo, self.lo_closed && other.lo_closed)
        };
        let (hi, hi_closed) = if self.hi < other.hi {
            (self.hi, self.hi_closed)
        } else if other.hi < self.hi {
            (other.hi, other.hi_closed)
        } else {
            (self.hi, self.hi_closed && other.hi_closed)
        };
        Interval::new(lo, hi, lo_closed, hi_closed)
    }

    /// The interval `self - h = {t - h : t ∈ self}`.
    pub fn shift(&self, h: f64) -> Interval {
        Interval::new(self.lo - h, self.hi - h, self.lo_closed, self.hi_closed)
    }

    /// A representative interior point, finite even for unbounded intervals.
    pub fn sample_point(&self) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => 0.5 * (self.lo + self.hi),
            (true, false) => self.lo + 1.0 + self.lo.abs(),
            (false, true) => self.hi - 1.0 - self.hi.abs(),
            (false, false) => 0.0,
        }
    }

    /// `n` probe points strictly inside the interval. Unbounded sides are
    /// reached through `t = a ± w·u/(1-u)` with `w` set by `scale`.
    pub fn probe_points(&self, n: usize, scale: f64) -> alloc::vec::Vec<f64> {
        let w = scale.max(1.0);
        (0..n)
            .map(|i| {
                let u = (i as f64 + 0.5) / n as f64;
                match (self.lo.is_finite(), self.hi.is_finite()) {
                    (true, true) => self.lo + u * (self.hi - self.lo),
                    (true, false) => self.lo + w * u / (1.0 - u),
                    (false, true) => self.hi - w * (1.0 - u) / u,
                    (false, false) => {
                        let v = 2.0 * u - 1.0;
                        w * v / (1.0 - v * v)
                    }
                }
            })
            .collect()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("∅");
        }
        write!(f, "{}{}, {}{}", if self.lo_closed { '[' } else { '(' }, self.lo, self.hi, if self.hi_closed { ']' } else { ')' })
    }
}

/// Splits the line at `breakpoints` into half-open segments, labels each by
/// `label(sample point)`, drops segments labelled `None` and merges runs of
/// adjacent segments carrying equal labels.
pub(crate) fn segment_line<L, F>(breakpoints: &[f64], mut label: F) -> alloc::vec::Vec<(Interval, L)>
where
    L: PartialEq,
    F: FnMut(f64) -> Option<L>,
{
    let mut pts: alloc::vec::Vec<f64> = breakpoints.iter().copied().filter(|b| b.is_finite()).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    let mut edges = alloc::vec::Vec::with_capacity(pts.len() + 2);
    edges.push(f64::NEG_INFINITY);
    edges.extend_from_slice(&pts);
    edges.push(f64::INFINITY);

    let mut out: alloc::vec::Vec<(Interval, L)> = alloc::vec::Vec::new();
    let mut pending: Option<(Interval, L)> = None;
    for w in edges.windows(2) {
        let seg = Interval::half_open(w[0], w[1]);
        match label(seg.sample_point()) {
            Some(l) => match pending.take() {
                Some((iv, pl)) if pl == l && iv.hi == seg.lo => {
                    pending = Some((Interval::new(iv.lo, seg.hi, iv.lo_closed, seg.hi_closed), pl));
                }
                Some(prev) => {
                    out.push(prev);
                    pending = Some((seg, l));
                }
                None => pending = Some((seg, l)),
            },
            None => {
                if let Some(prev) = pending.take() {
                    out.push(prev);
                }
            }
        }
    }
    if let Some(prev) = pending {
        out.push(prev);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intersection_and_emptiness() {
        let a = Interval::closed(0.0, 1.0);
        let b = Interval::closed(-0.5, 0.5);
        assert_eq!(a.intersect(&b.shift(-0.0)), Interval::closed(0.0, 0.5));
        assert!(Interval::half_open(1.0, 1.0).is_empty());
        assert!(!Interval::closed(1.0, 1.0).is_empty());
        assert!(a.intersect(&Interval::closed(2.0, 3.0)).is_empty());
        assert!(!Interval::new(f64::NEG_INFINITY, 0.0, true, true).lo_closed);
    }

    #[test]
    fn segmentation_merges_equal_labels() {
        let segs = segment_line(&[0.0, 1.0, 2.0], |t| Some(t < 1.0));
        assert_eq!(segs.len(), 2);
        assert_eq!(segs[0].0.hi, 1.0);
        assert!(segs[1].0.lo_closed);
    }
}
