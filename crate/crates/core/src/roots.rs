//! Exact counting of real roots of quadratics on open intervals.
//!
//! Roots are never materialized as floats. A rational root is reported
//! exactly; an irrational root (necessarily a conjugate pair of an
//! irreducible quadratic) is reported by its monic minimal polynomial, which
//! of the two conjugates it is, and an isolating rational interval.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::scalar::{fmt_scalar, frac, int, midpoint, rational_sqrt, Scalar};

/// An open interval with optional (infinite) endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenInterval {
    pub lo: Option<Scalar>,
    pub hi: Option<Scalar>,
}

impl OpenInterval {
    pub fn new(lo: Scalar, hi: Scalar) -> Self {
        Self { lo: Some(lo), hi: Some(hi) }
    }

    pub fn all() -> Self {
        Self { lo: None, hi: None }
    }

    /// `(-eps, eps)`.
    pub fn symmetric(eps: &Scalar) -> Self {
        Self::new(-eps.clone(), eps.clone())
    }

    pub fn contains(&self, t: &Scalar) -> bool {
        self.lo.as_ref().is_none_or(|lo| lo < t) && self.hi.as_ref().is_none_or(|hi| t < hi)
    }

    pub fn is_empty(&self) -> bool {
        matches!((&self.lo, &self.hi), (Some(lo), Some(hi)) if lo >= hi)
    }

    /// Some rational strictly inside the interval.
    pub fn interior_point(&self) -> Scalar {
        match (&self.lo, &self.hi) {
            (Some(lo), Some(hi)) => midpoint(lo, hi),
            (Some(lo), None) => lo + int(1),
            (None, Some(hi)) => hi - int(1),
            (None, None) => Scalar::zero(),
        }
    }

    /// `count` distinct rationals strictly inside, evenly spread.
    pub fn interior_points(&self, count: usize) -> Vec<Scalar> {
        let (lo, hi) = match (&self.lo, &self.hi) {
            (Some(lo), Some(hi)) => (lo.clone(), hi.clone()),
            (Some(lo), None) => (lo.clone(), lo + int(2)),
            (None, Some(hi)) => (hi - int(2), hi.clone()),
            (None, None) => (int(-1), int(1)),
        };
        let width = &hi - &lo;
        (1..=count).map(|k| &lo + &width * frac(k as i64, count as i64 + 1)).collect()
    }
}

impl fmt::Display for OpenInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = self.lo.as_ref().map_or("-inf".to_string(), fmt_scalar);
        let hi = self.hi.as_ref().map_or("inf".to_string(), fmt_scalar);
        write!(f, "({lo}, {hi})")
    }
}

/// A real root of a quadratic.
#[derive(Clone, Debug)]
pub enum Root {
    Exact(Scalar),
    /// A root of the irreducible monic `t² + b·t + c`; `larger` selects the
    /// conjugate. `(lo, hi)` is a rational interval that contains this root
    /// and no other root of the polynomial.
    Irrational { b: Scalar, c: Scalar, larger: bool, lo: Scalar, hi: Scalar },
}

impl PartialEq for Root {
    // Two irreducible quadratics share a root only if they are equal, so the
    // minimal polynomial plus the conjugate choice identify the number.
    fn eq(&self, other: &Root) -> bool {
        match (self, other) {
            (Root::Exact(a), Root::Exact(b)) => a == b,
            (
                Root::Irrational { b: b1, c: c1, larger: l1, .. },
                Root::Irrational { b: b2, c: c2, larger: l2, .. },
            ) => b1 == b2 && c1 == c2 && l1 == l2,
            _ => false,
        }
    }
}

impl Eq for Root {}

impl Root {
    pub fn as_exact(&self) -> Option<&Scalar> {
        match self {
            Root::Exact(t) => Some(t),
            Root::Irrational { .. } => None,
        }
    }

    /// A rational interval `(lo, hi)` known to contain the root; exact roots
    /// give a degenerate interval.
    pub fn enclosure(&self) -> (Scalar, Scalar) {
        match self {
            Root::Exact(t) => (t.clone(), t.clone()),
            Root::Irrational { lo, hi, .. } => (lo.clone(), hi.clone()),
        }
    }

    /// Bisects an isolating interval until its width is at most `width`.
    pub fn refined(&self, width: &Scalar) -> Root {
        let Root::Irrational { b, c, larger, lo, hi } = self else {
            return self.clone();
        };
        let (lo, hi) = bisect(b, c, *larger, lo.clone(), hi.clone(), width);
        Root::Irrational { b: b.clone(), c: c.clone(), larger: *larger, lo, hi }
    }

    pub fn approx(&self) -> f64 {
        match self {
            Root::Exact(t) => crate::scalar::to_f64(t),
            Root::Irrational { b, c, larger, .. } => {
                let (b, c) = (crate::scalar::to_f64(b), crate::scalar::to_f64(c));
                let s = (b * b - 4.0 * c).sqrt();
                if *larger {
                    (-b + s) / 2.0
                } else {
                    (-b - s) / 2.0
                }
            }
        }
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Root::Exact(t) => write!(f, "{}", fmt_scalar(t)),
            Root::Irrational { b, c, larger, lo, hi } => write!(
                f,
                "{} root of t^2 + ({})t + ({}) in ({}, {})",
                if *larger { "larger" } else { "smaller" },
                fmt_scalar(b),
                fmt_scalar(c),
                fmt_scalar(lo),
                fmt_scalar(hi)
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootReport {
    Roots(Vec<Root>),
    /// The polynomial is identically zero: every parameter is a root.
    IdenticallyZero,
}

impl RootReport {
    pub fn count(&self) -> Option<usize> {
        match self {
            RootReport::Roots(r) => Some(r.len()),
            RootReport::IdenticallyZero => None,
        }
    }
}

fn eval_monic(b: &Scalar, c: &Scalar, t: &Scalar) -> Scalar {
    t * t + b * t + c
}

fn bisect(b: &Scalar, c: &Scalar, larger: bool, mut lo: Scalar, mut hi: Scalar, width: &Scalar) -> (Scalar, Scalar) {
    while &(&hi - &lo) > width {
        let mid = midpoint(&lo, &hi);
        let v = eval_monic(b, c, &mid);
        // the monic quadratic decreases through the smaller root and
        // increases through the larger one
        let left_of_root = if larger { v.is_negative() } else { v.is_positive() };
        if left_of_root {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Distinct real roots of `c2·t² + c1·t + c0` inside `interval`.
pub fn quadratic_roots_in_interval(c2: &Scalar, c1: &Scalar, c0: &Scalar, interval: &OpenInterval) -> RootReport {
    if c2.is_zero() {
        if c1.is_zero() {
            return if c0.is_zero() { RootReport::IdenticallyZero } else { RootReport::Roots(vec![]) };
        }
        let t = -c0 / c1;
        let roots = if interval.contains(&t) { vec![Root::Exact(t)] } else { vec![] };
        return RootReport::Roots(roots);
    }
    let b = c1 / c2;
    let c = c0 / c2;
    let disc = &b * &b - int(4) * &c;
    if disc.is_negative() {
        return RootReport::Roots(vec![]);
    }
    let vertex = -&b / int(2);
    if let Some(s) = rational_sqrt(&disc) {
        let half = s / int(2);
        let mut roots = vec![&vertex - &half];
        if !half.is_zero() {
            roots.push(&vertex + &half);
        }
        return RootReport::Roots(roots.into_iter().filter(|t| interval.contains(t)).map(Root::Exact).collect());
    }

    // Irrational conjugate pair r- < vertex < r+. Neither can coincide with a
    // rational endpoint, so strict comparisons are decided by signs of g.
    let g = |t: &Scalar| eval_monic(&b, &c, t);
    let outside = |t: &Scalar| g(t).is_positive();
    let small_gt_lo = interval.lo.as_ref().is_none_or(|lo| lo < &vertex && outside(lo));
    let small_lt_hi = interval.hi.as_ref().is_none_or(|hi| !(hi < &vertex && outside(hi)));
    let large_gt_lo = interval.lo.as_ref().is_none_or(|lo| !(lo > &vertex && outside(lo)));
    let large_lt_hi = interval.hi.as_ref().is_none_or(|hi| hi > &vertex && outside(hi));

    let bound = int(1) + num_traits::abs(b.clone()).max(num_traits::abs(c.clone()));
    let half = frac(1, 2);
    let mut roots = Vec::new();
    if small_gt_lo && small_lt_hi {
        let lo = interval.lo.clone().map_or(-bound.clone(), |lo| lo.max(-bound.clone()));
        let hi = interval.hi.clone().map_or(vertex.clone(), |hi| hi.min(vertex.clone()));
        let (lo, hi) = bisect(&b, &c, false, lo, hi, &half);
        roots.push(Root::Irrational { b: b.clone(), c: c.clone(), larger: false, lo, hi });
    }
    if large_gt_lo && large_lt_hi {
        let lo = interval.lo.clone().map_or(vertex.clone(), |lo| lo.max(vertex.clone()));
        let hi = interval.hi.clone().map_or(bound.clone(), |hi| hi.min(bound.clone()));
        let (lo, hi) = bisect(&b, &c, true, lo, hi, &half);
        roots.push(Root::Irrational { b: b.clone(), c: c.clone(), larger: true, lo, hi });
    }
    RootReport::Roots(roots)
}
