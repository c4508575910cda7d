use alloc::vec::Vec;

/// Closed interval with possibly infinite endpoints, or the empty set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntervalRegion {
    Empty,
    Interval { lo: f64, hi: f64 },
}

impl IntervalRegion {
    /// `[lo, hi]`, or [`IntervalRegion::Empty`] when `lo > hi`.
    pub fn from_endpoints(lo: f64, hi: f64) -> Self {
        if lo > hi {
            Self::Empty
        } else {
            Self::Interval { lo, hi }
        }
    }

    pub fn everything() -> Self {
        Self::Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn contains(&self, y: f64) -> bool {
        match *self {
            Self::Empty => false,
            Self::Interval { lo, hi } => lo <= y && y <= hi,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Self::Empty)
    }

    pub fn is_unbounded(&self) -> bool {
        match *self {
            Self::Empty => false,
            Self::Interval { lo, hi } => lo.is_infinite() || hi.is_infinite(),
        }
    }

    pub fn endpoints(&self) -> Option<(f64, f64)> {
        match *self {
            Self::Empty => None,
            Self::Interval { lo, hi } => Some((lo, hi)),
        }
    }

    pub fn width(&self) -> f64 {
        self.endpoints().map_or(0.0, |(lo, hi)| hi - lo)
    }

    /// True when `self ⊆ other`.
    pub fn is_subset_of(&self, other: &IntervalRegion) -> bool {
        match (*self, *other) {
            (Self::Empty, _) => true,
            (_, Self::Empty) => false,
            (Self::Interval { lo: a, hi: b }, Self::Interval { lo: c, hi: d }) => c <= a && b <= d,
        }
    }
}

/// Full-conformal acceptance evaluated on a finite grid of candidate labels.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRegion {
    pub grid: Vec<f64>,
    pub accepted: Vec<bool>,
}

impl GridRegion {
    pub fn step(&self) -> f64 {
        (self.grid[self.grid.len() - 1] - self.grid[0]) / (self.grid.len() - 1) as f64
    }

    /// Membership of the nearest grid point. Labels more than half a step
    /// outside the grid are never covered.
    pub fn contains_nearest(&self, y: f64) -> bool {
        let half = self.step() / 2.0;
        let first = self.grid[0];
        let last = self.grid[self.grid.len() - 1];
        if !(y >= first - half && y <= last + half) {
            return false;
        }
        let idx = self.grid.partition_point(|g| *g < y);
        let nearest = if idx == 0 {
            0
        } else if idx == self.grid.len() {
            idx - 1
        } else if (y - self.grid[idx - 1]) <= (self.grid[idx] - y) {
            idx - 1
        } else {
            idx
        };
        self.accepted[nearest]
    }

    pub fn accepted_count(&self) -> usize {
        self.accepted.iter().filter(|a| **a).count()
    }

    /// Smallest and largest accepted grid label.
    pub fn hull(&self) -> Option<(f64, f64)> {
        let first = self.accepted.iter().position(|a| *a)?;
        let last = self.accepted.iter().rposition(|a| *a)?;
        Some((self.grid[first], self.grid[last]))
    }
}

/// One connected piece of an [`ExactRegion`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Segment {
    pub fn contains(&self, y: f64) -> bool {
        let above = if self.lo_closed { y >= self.lo } else { y > self.lo };
        let below = if self.hi_closed { y <= self.hi } else { y < self.hi };
        above && below
    }
}

/// Finite union of disjoint intervals, in increasing order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExactRegion {
    pub segments: Vec<Segment>,
}

impl ExactRegion {
    pub fn contains(&self, y: f64) -> bool {
        let idx = self.segments.partition_point(|s| s.hi < y);
        self.segments[idx..]
            .iter()
            .take(2)
            .any(|s| s.contains(y))
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn hull(&self) -> Option<(f64, f64)> {
        Some((self.segments.first()?.lo, self.segments.last()?.hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn interval_basics() {
        let r = IntervalRegion::from_endpoints(-1.0, 1.0);
        assert!(r.contains(1.0) && r.contains(-1.0) && !r.contains(1.0001));
        assert!(IntervalRegion::from_endpoints(2.0, 1.0).is_empty());
        assert!(IntervalRegion::everything().contains(1e300));
        assert!(r.is_subset_of(&IntervalRegion::everything()));
        assert!(IntervalRegion::Empty.is_subset_of(&r));
        assert!(!r.is_subset_of(&IntervalRegion::Empty));
    }

    #[test]
    fn grid_nearest_membership() {
        let g = GridRegion {
            grid: vec![0.0, 1.0, 2.0],
            accepted: vec![false, true, false],
        };
        assert!(g.contains_nearest(1.2));
        assert!(!g.contains_nearest(1.6));
        assert!(!g.contains_nearest(-0.4));
        assert!(!g.contains_nearest(5.0));
        assert_eq!(g.hull(), Some((1.0, 1.0)));
    }

    #[test]
    fn exact_region_membership() {
        let r = ExactRegion {
            segments: vec![
                Segment { lo: -2.0, hi: -1.0, lo_closed: true, hi_closed: false },
                Segment { lo: 0.0, hi: 0.0, lo_closed: true, hi_closed: true },
                Segment { lo: 1.0, hi: 3.0, lo_closed: false, hi_closed: true },
            ],
        };
        assert!(r.contains(-2.0) && !r.contains(-1.0) && r.contains(0.0));
        assert!(!r.contains(1.0) && r.contains(3.0) && !r.contains(0.5));
    }
}
