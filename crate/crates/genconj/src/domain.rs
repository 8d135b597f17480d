//! Axis-aligned box domains with open/closed faces.
//!
//! Effective domains of kernels, couplings and test functions are all boxes
//! (possibly unbounded). Open faces matter near boundaries like `y > 0` for
//! the entropic coupling.

/// One axis of a box domain. Infinite bounds are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, lo_open: false, hi_open: false }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, lo_open: true, hi_open: true }
    }

    pub fn reals() -> Self {
        Interval::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    /// `[0, +inf)`
    pub fn nonneg() -> Self {
        Interval { lo: 0.0, hi: f64::INFINITY, lo_open: false, hi_open: true }
    }

    /// `(0, +inf)`
    pub fn positive() -> Self {
        Interval { lo: 0.0, hi: f64::INFINITY, lo_open: true, hi_open: true }
    }

    pub fn contains(&self, t: f64) -> bool {
        let lo_ok = if self.lo_open { t > self.lo } else { t >= self.lo };
        let hi_ok = if self.hi_open { t < self.hi } else { t <= self.hi };
        lo_ok && hi_ok
    }

    pub fn interior_contains(&self, t: f64) -> bool {
        t > self.lo && t < self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lo, lo_open) = if self.lo > other.lo {
            (self.lo, self.lo_open)
        } else if other.lo > self.lo {
            (other.lo, other.lo_open)
        } else {
            (self.lo, self.lo_open || other.lo_open)
        };
        let (hi, hi_open) = if self.hi < other.hi {
            (self.hi, self.hi_open)
        } else if other.hi < self.hi {
            (other.hi, other.hi_open)
        } else {
            (self.hi, self.hi_open || other.hi_open)
        };
        if lo > hi || (lo == hi && (lo_open || hi_open)) {
            None
        } else {
            Some(Interval { lo, hi, lo_open, hi_open })
        }
    }

    /// Finite closed range usable for sampling, pulling open/infinite faces
    /// inward by `margin` relative to the finite width.
    pub fn sampling_range(&self, fallback: f64) -> (f64, f64) {
        let mut lo = if self.lo.is_finite() { self.lo } else { -fallback };
        let mut hi = if self.hi.is_finite() { self.hi } else { fallback };
        let w = (hi - lo).max(1e-6);
        if self.lo_open && self.lo.is_finite() {
            lo += 1e-9 * w;
        }
        if self.hi_open && self.hi.is_finite() {
            hi -= 1e-9 * w;
        }
        (lo, hi)
    }
}

/// Cartesian product of intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    pub axes: Vec<Interval>,
}

impl BoxDomain {
    pub fn new(axes: Vec<Interval>) -> Self {
        BoxDomain { axes }
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        BoxDomain { axes: vec![Interval::closed(lo, hi); dim] }
    }

    pub fn reals(dim: usize) -> Self {
        BoxDomain { axes: vec![Interval::reals(); dim] }
    }

    pub fn nonneg(dim: usize) -> Self {
        BoxDomain { axes: vec![Interval::nonneg(); dim] }
    }

    pub fn positive(dim: usize) -> Self {
        BoxDomain { axes: vec![Interval::positive(); dim] }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().zip(&self.axes).all(|(t, a)| a.contains(*t))
    }

    pub fn interior_contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().zip(&self.axes).all(|(t, a)| a.interior_contains(*t))
    }

    pub fn intersect(&self, other: &BoxDomain) -> Option<BoxDomain> {
        if self.dim() != other.dim() {
            return None;
        }
        let axes: Option<Vec<_>> =
            self.axes.iter().zip(&other.axes).map(|(a, b)| a.intersect(b)).collect();
        axes.map(BoxDomain::new)
    }

    /// Finite closed sampling box; infinite faces replaced by `+-fallback`.
    pub fn sampling_bounds(&self, fallback: f64) -> (Vec<f64>, Vec<f64>) {
        let mut lo = Vec::with_capacity(self.dim());
        let mut hi = Vec::with_capacity(self.dim());
        for a in &self.axes {
            let (l, h) = a.sampling_range(fallback);
            lo.push(l);
            hi.push(h);
        }
        (lo, hi)
    }

    /// Project a point onto the finite sampling box.
    pub fn clamp(&self, x: &mut [f64], fallback: f64) {
        let (lo, hi) = self.sampling_bounds(fallback);
        for i in 0..x.len() {
            x[i] = x[i].clamp(lo[i], hi[i]);
        }
    }
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|t| t * t).sum::<f64>().sqrt()
}

pub fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_open_closed_membership() {
        let i = Interval::positive();
        assert!(!i.contains(0.0));
        assert!(i.contains(1e-12));
        let j = Interval::nonneg();
        assert!(j.contains(0.0));
        assert!(!j.interior_contains(0.0));
    }

    #[test]
    fn intersect_empty_and_open_flags() {
        let a = Interval::closed(0.0, 1.0);
        let b = Interval::closed(2.0, 3.0);
        assert!(a.intersect(&b).is_none());
        let c = Interval::open(0.0, 2.0).intersect(&Interval::closed(0.0, 1.0)).unwrap();
        assert!(c.lo_open);
        assert!(!c.hi_open);
    }

    #[test]
    fn box_intersection() {
        let a = BoxDomain::cube(2, -1.0, 1.0);
        let b = BoxDomain::nonneg(2);
        let c = a.intersect(&b).unwrap();
        assert!(c.contains(&[0.0, 1.0]));
        assert!(!c.contains(&[-0.1, 0.5]));
    }
}
