//! Symbolic clouds and exact line sections.
//!
//! A [`Cloud`] is a closed description built from finite point sets and
//! spheres by unions, cylinder extensions and invertible affine images, with
//! an optional list of removed points. Everything is decided exactly:
//! membership, the number of points on a line, and whether the description is
//! a cloud around a given point (finite on every line through it).
//!
//! Line sections are computed on a [`RationalLine`], a line traced by
//! `t ↦ (p + t·q) / (α + β·t)`. Ordinary lines are the case `α = 1, β = 0`;
//! the fractional form is what lines parallel to an axis become after the
//! window map of the [`schmerl`](crate::schmerl) module, so both share one
//! engine. Parameters are never rescaled on the way down: affine preimages and
//! coordinate projections keep `t` intact.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geom::{AffineMap, Line, Point};
use crate::linalg::vector_rank;
use crate::roots::{quadratic_roots_in_interval, OpenInterval, Root, RootReport};
use crate::scalar::{fmt_scalar, int, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Body {
    Finite(Vec<Point>),
    Sphere { center: Point, radius_sq: Scalar },
    Union(Vec<Cloud>),
    /// `{(x, y) : x ∈ base}`; the offset only fixes the declared center.
    Cylinder { base: Box<Cloud>, offset: Point },
    AffineImage { map: AffineMap, inverse: AffineMap, base: Box<Cloud> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cloud {
    center: Point,
    body: Body,
    punctures: Vec<Point>,
}

/// Result of intersecting a cloud with a line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LineIntersection {
    /// Distinct parameters of the intersection points.
    Finite(Vec<Root>),
    /// Infinitely many points, with a description of why.
    Infinite(String),
}

impl LineIntersection {
    pub fn count(&self) -> Option<usize> {
        match self {
            LineIntersection::Finite(w) => Some(w.len()),
            LineIntersection::Infinite(_) => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, LineIntersection::Finite(_))
    }

    pub fn witnesses(&self) -> &[Root] {
        match self {
            LineIntersection::Finite(w) => w,
            LineIntersection::Infinite(_) => &[],
        }
    }
}

impl fmt::Display for LineIntersection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LineIntersection::Finite(w) => {
                let parts: Vec<String> = w.iter().map(Root::to_string).collect();
                write!(f, "finite({}) [{}]", w.len(), parts.join("; "))
            }
            LineIntersection::Infinite(why) => write!(f, "infinite: {why}"),
        }
    }
}

/// Outcome of [`Cloud::is_cloud_around`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CloudDecision {
    pub is_cloud: bool,
    /// A line through the queried point meeting the cloud infinitely often.
    pub witness: Option<Line>,
}

/// A line traced by `t ↦ (num0 + t·num1) / (den0 + t·den1)`.
///
/// Callers pick a parameter domain on which the denominator does not vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalLine {
    num0: Point,
    num1: Point,
    den0: Scalar,
    den1: Scalar,
}

impl RationalLine {
    pub fn new(num0: Point, num1: Point, den0: Scalar, den1: Scalar) -> Result<Self> {
        num1.check_dim(num0.dim())?;
        Ok(Self { num0, num1, den0, den1 })
    }

    pub fn from_line(line: &Line) -> Self {
        Self { num0: line.base().clone(), num1: line.dir().clone(), den0: Scalar::one(), den1: Scalar::zero() }
    }

    pub fn dim(&self) -> usize {
        self.num0.dim()
    }

    pub fn denominator(&self, t: &Scalar) -> Scalar {
        &self.den0 + &self.den1 * t
    }

    /// True when the denominator is nonzero throughout `domain`.
    pub fn defined_on(&self, domain: &OpenInterval) -> bool {
        if self.den1.is_zero() {
            return !self.den0.is_zero();
        }
        let pole = -&self.den0 / &self.den1;
        !domain.contains(&pole) && !self.denominator(&domain.interior_point()).is_zero()
    }

    pub fn eval(&self, t: &Scalar) -> Point {
        let w = self.denominator(t);
        (&self.num0 + &self.num1.scale(t)).scale(&w.recip())
    }

    /// The traced point does not depend on `t`.
    pub fn is_constant(&self) -> bool {
        let a: Vec<Scalar> = self.num0.coords().iter().chain([&self.den0]).cloned().collect();
        let b: Vec<Scalar> = self.num1.coords().iter().chain([&self.den1]).cloned().collect();
        vector_rank(&[a, b]) < 2
    }

    fn head(&self, k: usize) -> Self {
        Self { num0: self.num0.head(k), num1: self.num1.head(k), den0: self.den0.clone(), den1: self.den1.clone() }
    }

    /// Image under an affine map (used with inverses to pull lines back).
    fn mapped(&self, f: &AffineMap) -> Self {
        let b = f.translation_part();
        let num0 = &f.apply_linear(&self.num0).expect("dimension checked") + &b.scale(&self.den0);
        let num1 = &f.apply_linear(&self.num1).expect("dimension checked") + &b.scale(&self.den1);
        Self { num0, num1, den0: self.den0.clone(), den1: self.den1.clone() }
    }

    /// The unique parameter at which the line passes through `p`, for a
    /// non-constant line.
    pub fn parameter_of(&self, p: &Point) -> Option<Scalar> {
        // num0 + t·num1 = (den0 + t·den1)·p  ⇔  t·(num1 − den1·p) = den0·p − num0
        let lhs = &self.num1 - &p.scale(&self.den1);
        let rhs = &p.scale(&self.den0) - &self.num0;
        let k = (0..lhs.dim()).find(|&k| !lhs[k].is_zero())?;
        let t = &rhs[k] / &lhs[k];
        (lhs.scale(&t) == rhs).then_some(t)
    }
}

fn describe(p: &Point) -> String {
    p.to_string()
}

impl Cloud {
    pub fn finite(center: Point, points: Vec<Point>) -> Result<Self> {
        for p in &points {
            p.check_dim(center.dim())?;
        }
        let mut unique: Vec<Point> = Vec::with_capacity(points.len());
        for p in points {
            if !unique.contains(&p) {
                unique.push(p);
            }
        }
        Ok(Self { center, body: Body::Finite(unique), punctures: vec![] })
    }

    /// A sphere, declared to be centered at its own center. A zero radius is
    /// the one-point set.
    pub fn sphere(center: Point, radius_sq: Scalar) -> Result<Self> {
        if radius_sq.is_negative() {
            return Err(Error::NegativeRadius);
        }
        Ok(Self { center: center.clone(), body: Body::Sphere { center, radius_sq }, punctures: vec![] })
    }

    pub fn union(center: Point, parts: Vec<Cloud>) -> Result<Self> {
        for part in &parts {
            part.center.check_dim(center.dim())?;
        }
        Ok(Self { center, body: Body::Union(parts), punctures: vec![] })
    }

    /// The raw cylinder `{(x, y) : x ∈ base}` centered at
    /// `(base.center, offset)`. No cloud condition is checked; see [`extend`].
    pub fn cylinder(base: Cloud, offset: Point) -> Result<Self> {
        if offset.dim() == 0 || base.dim() == 0 {
            return Err(Error::BadDimensions { from: base.dim(), to: base.dim() + offset.dim() });
        }
        let center = base.center.concat(&offset);
        Ok(Self { center, body: Body::Cylinder { base: Box::new(base), offset }, punctures: vec![] })
    }

    pub fn affine_image(map: AffineMap, base: Cloud) -> Result<Self> {
        base.center.check_dim(map.in_dim())?;
        let inverse = map.invert()?;
        let center = map.apply(&base.center)?;
        Ok(Self { center, body: Body::AffineImage { map, inverse, base: Box::new(base) }, punctures: vec![] })
    }

    /// Same body, different declared center.
    pub fn with_center(mut self, center: Point) -> Result<Self> {
        center.check_dim(self.dim())?;
        self.center = center;
        Ok(self)
    }

    pub fn punctured(mut self, p: Point) -> Result<Self> {
        p.check_dim(self.dim())?;
        if !self.punctures.contains(&p) {
            self.punctures.push(p);
        }
        Ok(self)
    }

    pub fn unpunctured(mut self, p: &Point) -> Self {
        self.punctures.retain(|q| q != p);
        self
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn punctures(&self) -> &[Point] {
        &self.punctures
    }

    pub fn kind(&self) -> &'static str {
        match self.body {
            Body::Finite(_) => "finite",
            Body::Sphere { .. } => "sphere",
            Body::Union(_) => "union",
            Body::Cylinder { .. } => "extend",
            Body::AffineImage { .. } => "affine_image",
        }
    }

    pub fn contains(&self, x: &Point) -> Result<bool> {
        x.check_dim(self.dim())?;
        Ok(self.contains_unchecked(x))
    }

    fn contains_unchecked(&self, x: &Point) -> bool {
        if self.punctures.contains(x) {
            return false;
        }
        match &self.body {
            Body::Finite(points) => points.contains(x),
            Body::Sphere { center, radius_sq } => (x - center).norm_sq() == *radius_sq,
            Body::Union(parts) => parts.iter().any(|c| c.contains_unchecked(x)),
            Body::Cylinder { base, .. } => base.contains_unchecked(&x.head(base.dim())),
            Body::AffineImage { inverse, base, .. } => {
                base.contains_unchecked(&inverse.apply(x).expect("dimension checked"))
            }
        }
    }

    /// Exact intersection with a line.
    pub fn intersect_line(&self, line: &Line) -> Result<LineIntersection> {
        line.base().check_dim(self.dim())?;
        Ok(self.section(&RationalLine::from_line(line), &OpenInterval::all()))
    }

    /// Parameters `t ∈ domain` with `path(t)` in the cloud. The path's
    /// denominator must not vanish on `domain`.
    pub fn intersect_path(&self, path: &RationalLine, domain: &OpenInterval) -> Result<LineIntersection> {
        path.num0.check_dim(self.dim())?;
        if !path.defined_on(domain) {
            return Err(Error::AtInfinity);
        }
        Ok(self.section(path, domain))
    }

    fn section(&self, path: &RationalLine, domain: &OpenInterval) -> LineIntersection {
        if domain.is_empty() {
            return LineIntersection::Finite(vec![]);
        }
        if path.is_constant() {
            let x = path.eval(&domain.interior_point());
            return if self.contains_unchecked(&x) {
                LineIntersection::Infinite(format!("the {} cloud contains the whole fiber at {}", self.kind(), describe(&x)))
            } else {
                LineIntersection::Finite(vec![])
            };
        }
        let raw = match &self.body {
            Body::Finite(points) => LineIntersection::Finite(
                points
                    .iter()
                    .filter_map(|p| path.parameter_of(p))
                    .filter(|t| domain.contains(t))
                    .map(Root::Exact)
                    .collect(),
            ),
            Body::Sphere { center, radius_sq } => sphere_section(center, radius_sq, path, domain),
            Body::Union(parts) => {
                let mut merged: Vec<Root> = Vec::new();
                for part in parts {
                    match part.section(path, domain) {
                        LineIntersection::Infinite(why) => return LineIntersection::Infinite(why),
                        LineIntersection::Finite(roots) => {
                            for r in roots {
                                if !merged.contains(&r) {
                                    merged.push(r);
                                }
                            }
                        }
                    }
                }
                LineIntersection::Finite(merged)
            }
            Body::Cylinder { base, .. } => base.section(&path.head(base.dim()), domain),
            Body::AffineImage { inverse, base, .. } => base.section(&path.mapped(inverse), domain),
        };
        match raw {
            LineIntersection::Finite(roots) if !self.punctures.is_empty() => LineIntersection::Finite(
                roots
                    .into_iter()
                    .filter(|r| r.as_exact().is_none_or(|t| !self.punctures.contains(&path.eval(t))))
                    .collect(),
            ),
            other => other,
        }
    }

    /// Decides whether every line through `a` meets the cloud in finitely many
    /// points. Finite sets and spheres are clouds around every point; the only
    /// source of infinite sections is a cylinder fiber lying in the cloud.
    pub fn is_cloud_around(&self, a: &Point) -> Result<CloudDecision> {
        a.check_dim(self.dim())?;
        let witness = self.infinite_line_through(a);
        Ok(CloudDecision { is_cloud: witness.is_none(), witness })
    }

    fn infinite_line_through(&self, a: &Point) -> Option<Line> {
        match &self.body {
            Body::Finite(_) | Body::Sphere { .. } => None,
            Body::Union(parts) => parts.iter().find_map(|c| c.infinite_line_through(a)),
            Body::Cylinder { base, .. } => {
                let k = base.dim();
                let head = a.head(k);
                if base.contains_unchecked(&head) {
                    let fiber = Point::basis(self.dim(), k);
                    return Some(Line::new(a.clone(), fiber).expect("basis vector is nonzero"));
                }
                base.infinite_line_through(&head).map(|l| {
                    let dir = l.dir().concat(&Point::zero(self.dim() - k));
                    Line::new(a.clone(), dir).expect("lifted direction is nonzero")
                })
            }
            Body::AffineImage { map, inverse, base } => {
                let pre = inverse.apply(a).expect("dimension checked");
                base.infinite_line_through(&pre).map(|l| map.map_line(&l).expect("invertible map"))
            }
        }
    }

    /// `(spheres, finite points)` for clouds built only from finite sets,
    /// spheres, unions and affine images; `None` if a cylinder occurs.
    /// A non-degenerate line section then has at most `2·spheres + points`
    /// elements.
    pub fn section_bound(&self) -> Option<(usize, usize)> {
        match &self.body {
            Body::Finite(points) => Some((0, points.len())),
            Body::Sphere { .. } => Some((1, 0)),
            Body::Union(parts) => parts.iter().try_fold((0, 0), |(s, f), c| {
                let (s2, f2) = c.section_bound()?;
                Some((s + s2, f + f2))
            }),
            Body::Cylinder { .. } => None,
            Body::AffineImage { base, .. } => base.section_bound(),
        }
    }
}

fn sphere_section(center: &Point, radius_sq: &Scalar, path: &RationalLine, domain: &OpenInterval) -> LineIntersection {
    // |num0 + t·num1 − (den0 + t·den1)·c|² = r²·(den0 + t·den1)²
    let u = &path.num0 - &center.scale(&path.den0);
    let v = &path.num1 - &center.scale(&path.den1);
    let c2 = v.norm_sq() - radius_sq * &path.den1 * &path.den1;
    let c1 = int(2) * (u.dot(&v) - radius_sq * &path.den0 * &path.den1);
    let c0 = u.norm_sq() - radius_sq * &path.den0 * &path.den0;
    match quadratic_roots_in_interval(&c2, &c1, &c0, domain) {
        RootReport::Roots(roots) => LineIntersection::Finite(roots),
        RootReport::IdenticallyZero => LineIntersection::Infinite(format!(
            "line lies on the sphere centered at {} with squared radius {}",
            center,
            fmt_scalar(radius_sq)
        )),
    }
}

/// Options for [`extend`].
#[derive(Clone, Copy, Debug)]
pub struct ExtendOptions {
    /// Remove the center from the base when it lies in it, instead of failing.
    pub auto_puncture: bool,
}

impl Default for ExtendOptions {
    fn default() -> Self {
        Self { auto_puncture: true }
    }
}

/// Lifts a cloud of ℝᴷ around its center `a` to the cylinder
/// `{(x, y) ∈ ℝᴺ : x ∈ C}`, a cloud around `(a, offset)`.
pub fn extend(cloud: &Cloud, target_dim: usize, offset: &Point, options: ExtendOptions) -> Result<Cloud> {
    let k = cloud.dim();
    if k < 2 || k >= target_dim {
        return Err(Error::BadDimensions { from: k, to: target_dim });
    }
    offset.check_dim(target_dim - k)?;
    let decision = cloud.is_cloud_around(cloud.center())?;
    if !decision.is_cloud {
        let why = decision.witness.map_or_else(String::new, |l| format!("infinite section on {l}"));
        return Err(Error::NotACloud(why));
    }
    let mut base = cloud.clone();
    if base.contains_unchecked(cloud.center()) {
        if !options.auto_puncture {
            return Err(Error::CenterInCloud);
        }
        base = base.punctured(cloud.center().clone())?;
    }
    Cloud::cylinder(base, offset.clone())
}

/// Extends every cloud of a planar family to ℝᴺ with zero offset.
pub fn extend_family(clouds: &[Cloud], target_dim: usize) -> Result<Vec<Cloud>> {
    clouds
        .iter()
        .map(|c| extend(c, target_dim, &Point::zero(target_dim.saturating_sub(c.dim())), ExtendOptions::default()))
        .collect()
}
