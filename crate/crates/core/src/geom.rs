//! Points, canonical lines and affine maps over the rationals.

use std::fmt;
use std::ops::{Add, Index, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{vector_rank, Matrix};
use crate::scalar::{fmt_scalar, int, Scalar};

/// A point (or vector) of ℚᵈ.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point(Vec<Scalar>);

impl Point {
    pub fn new(coords: Vec<Scalar>) -> Self {
        Point(coords)
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Point(coords.iter().map(|&v| int(v)).collect())
    }

    pub fn zero(dim: usize) -> Self {
        Point(vec![Scalar::zero(); dim])
    }

    /// The standard basis vector `e_{axis+1}` (zero-based `axis`).
    pub fn basis(dim: usize, axis: usize) -> Self {
        let mut p = Self::zero(dim);
        p.0[axis] = Scalar::one();
        p
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Scalar> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &Point) -> Scalar {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> Scalar {
        self.dot(self)
    }

    pub fn scale(&self, s: &Scalar) -> Point {
        Point(self.0.iter().map(|v| v * s).collect())
    }

    /// Max-norm ‖x‖∞.
    pub fn max_norm(&self) -> Scalar {
        self.0.iter().map(|v| num_traits::abs(v.clone())).max().unwrap_or_else(Scalar::zero)
    }

    /// The first `k` coordinates.
    pub fn head(&self, k: usize) -> Point {
        Point(self.0[..k].to_vec())
    }

    /// Coordinates from index `k` on.
    pub fn tail(&self, k: usize) -> Point {
        Point(self.0[k..].to_vec())
    }

    pub fn concat(&self, other: &Point) -> Point {
        Point(self.0.iter().chain(&other.0).cloned().collect())
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: dim, found: self.dim() })
        }
    }
}

impl Index<usize> for Point {
    type Output = Scalar;

    fn index(&self, i: usize) -> &Scalar {
        &self.0[i]
    }
}

impl Add for &Point {
    type Output = Point;

    fn add(self, rhs: &Point) -> Point {
        debug_assert_eq!(self.dim(), rhs.dim());
        Point(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Point {
    type Output = Point;

    fn sub(self, rhs: &Point) -> Point {
        debug_assert_eq!(self.dim(), rhs.dim());
        Point(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Point {
    type Output = Point;

    fn neg(self) -> Point {
        Point(self.0.iter().map(|v| -v).collect())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(fmt_scalar).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Scales `v` so its first nonzero coordinate is 1.
pub(crate) fn normalize_leading(v: &[Scalar]) -> Option<Vec<Scalar>> {
    let lead = v.iter().find(|c| !c.is_zero())?;
    let inv = lead.recip();
    Some(v.iter().map(|c| c * &inv).collect())
}

/// A line in ℚᵈ in canonical form.
///
/// The direction has leading coordinate 1 and the base point is the foot of
/// the perpendicular from the origin, so two `Line`s are equal exactly when
/// they are the same point set.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Line {
    base: Point,
    dir: Point,
}

impl Line {
    pub fn new(point: Point, dir: Point) -> Result<Line> {
        point.check_dim(dir.dim())?;
        let dir = Point(normalize_leading(dir.coords()).ok_or(Error::ZeroDirection)?);
        let t = point.dot(&dir) / dir.norm_sq();
        let base = &point - &dir.scale(&t);
        Ok(Line { base, dir })
    }

    pub fn dim(&self) -> usize {
        self.dir.dim()
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn dir(&self) -> &Point {
        &self.dir
    }

    pub fn point_at(&self, t: &Scalar) -> Point {
        &self.base + &self.dir.scale(t)
    }

    /// Parameter of `p` on this line, if `p` lies on it.
    pub fn parameter_of(&self, p: &Point) -> Option<Scalar> {
        if p.dim() != self.dim() {
            return None;
        }
        let t = (p - &self.base).dot(&self.dir) / self.dir.norm_sq();
        (self.point_at(&t) == *p).then_some(t)
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.parameter_of(p).is_some()
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + t{}", self.base, self.dir)
    }
}

/// The canonical line through two distinct points.
pub fn line_through(p: &Point, q: &Point) -> Result<Line> {
    q.check_dim(p.dim())?;
    if p == q {
        return Err(Error::CoincidentPoints);
    }
    Line::new(p.clone(), q - p)
}

/// True when all the points lie on one line (or fewer than three distinct
/// points are given). Decided by the rank of the difference vectors.
pub fn collinear(points: &[Point]) -> bool {
    let Some(first) = points.first() else {
        return true;
    };
    let diffs: Vec<Vec<Scalar>> = points[1..].iter().map(|p| (p - first).into_coords()).collect();
    vector_rank(&diffs) <= 1
}

/// `x ↦ matrix·x + translation`, with the matrix rank cached.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AffineMap {
    matrix: Matrix,
    translation: Point,
    rank: usize,
}

impl AffineMap {
    pub fn new(matrix: Matrix, translation: Point) -> Result<Self> {
        translation.check_dim(matrix.rows())?;
        let rank = matrix.rank();
        Ok(Self { matrix, translation, rank })
    }

    pub fn linear(matrix: Matrix) -> Self {
        let out = matrix.rows();
        Self::new(matrix, Point::zero(out)).expect("zero translation has matching dimension")
    }

    pub fn identity(dim: usize) -> Self {
        Self::linear(Matrix::identity(dim))
    }

    pub fn translation(v: Point) -> Self {
        let d = v.dim();
        Self { matrix: Matrix::identity(d), translation: v, rank: d }
    }

    pub fn in_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn translation_part(&self) -> &Point {
        &self.translation
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_invertible(&self) -> bool {
        self.in_dim() == self.out_dim() && self.rank == self.in_dim()
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        Ok(&self.apply_linear(x)? + &self.translation)
    }

    /// The linear part applied to a vector (ignores the translation).
    pub fn apply_linear(&self, v: &Point) -> Result<Point> {
        Ok(Point(self.matrix.mul_vec(v.coords())?))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineMap) -> Result<AffineMap> {
        let matrix = self.matrix.mul(&inner.matrix)?;
        let translation = self.apply(&inner.translation)?;
        AffineMap::new(matrix, translation)
    }

    pub fn invert(&self) -> Result<AffineMap> {
        if !self.is_invertible() {
            return Err(Error::NotInvertible);
        }
        let inv = self.matrix.inverse()?;
        let translation = -&Point(inv.mul_vec(self.translation.coords())?);
        AffineMap::new(inv, translation)
    }

    /// Image of a line; fails when the map collapses the line to a point.
    pub fn map_line(&self, line: &Line) -> Result<Line> {
        let base = self.apply(line.base())?;
        let dir = self.apply_linear(line.dir())?;
        Line::new(base, dir)
    }
}

impl fmt::Display for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x -> {}x + {}", self.matrix, self.translation)
    }
}

/// An invertible linear map sending `vs[k]` to `e_{k+1}`.
///
/// The basis `vs` is completed with standard basis vectors in index order,
/// skipping any that would make the set dependent.
pub fn extend_to_basis(vs: &[Point], dim: usize) -> Result<AffineMap> {
    for v in vs {
        v.check_dim(dim)?;
    }
    if vs.len() > dim {
        return Err(Error::DependentInput);
    }
    let mut cols: Vec<Vec<Scalar>> = vs.iter().map(|v| v.coords().to_vec()).collect();
    if vector_rank(&cols) < cols.len() {
        return Err(Error::DependentInput);
    }
    for axis in 0..dim {
        if cols.len() == dim {
            break;
        }
        cols.push(Point::basis(dim, axis).into_coords());
        if vector_rank(&cols) < cols.len() {
            cols.pop();
        }
    }
    let basis = Matrix::from_columns(&cols, dim)?;
    Ok(AffineMap::linear(basis.inverse()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::frac;

    fn p(c: &[i64]) -> Point {
        Point::from_ints(c)
    }

    #[test]
    fn axis_line() {
        let l = line_through(&p(&[0, 0]), &p(&[2, 0])).unwrap();
        assert_eq!(l.base(), &p(&[0, 0]));
        assert_eq!(l.dir(), &p(&[1, 0]));
    }

    #[test]
    fn diagonal_line_scaled() {
        let l = line_through(&p(&[0, 0]), &p(&[2, 4])).unwrap();
        assert_eq!(l.base(), &p(&[0, 0]));
        assert_eq!(l.dir(), &p(&[1, 2]));
    }

    #[test]
    fn perpendicular_foot_base() {
        let a = p(&[1, 1]);
        let b = p(&[3, 2]);
        let l = line_through(&a, &b).unwrap();
        assert_eq!(l.dir(), &Point::new(vec![int(1), frac(1, 2)]));
        // both inputs satisfy base + t·dir
        assert!(l.contains(&a) && l.contains(&b));
        assert!(l.base().dot(l.dir()).is_zero());
        assert_eq!(l.base(), &Point::new(vec![frac(-1, 5), frac(2, 5)]));
    }

    #[test]
    fn line_errors() {
        assert_eq!(line_through(&p(&[1, 1]), &p(&[1, 1])), Err(Error::CoincidentPoints));
        assert!(matches!(line_through(&p(&[1, 1]), &p(&[1, 1, 1])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn affine_examples() {
        assert_eq!(AffineMap::identity(2).apply(&p(&[3, 4])).unwrap(), p(&[3, 4]));
        let t1 = AffineMap::translation(-&p(&[1, 2]));
        assert_eq!(t1.apply(&p(&[1, 2])).unwrap(), p(&[0, 0]));
        let shear = shear3(2);
        assert_eq!(shear.apply(&p(&[0, 0, 1])).unwrap(), p(&[2, 0, 1]));
        assert!(matches!(shear.apply(&p(&[1, 2])), Err(Error::DimensionMismatch { .. })));
    }

    fn shear3(lambda: i64) -> AffineMap {
        let m = Matrix::from_rows(vec![
            vec![int(1), int(0), int(lambda)],
            vec![int(0), int(1), int(0)],
            vec![int(0), int(0), int(1)],
        ])
        .unwrap();
        AffineMap::linear(m)
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(AffineMap::identity(3).invert().unwrap(), AffineMap::identity(3));
        let v = p(&[1, -2, 5]);
        assert_eq!(AffineMap::translation(v.clone()).invert().unwrap(), AffineMap::translation(-&v));
        let s = shear3(2);
        let round = s.invert().unwrap().compose(&s).unwrap();
        assert_eq!(round.apply(&p(&[5, 6, 7])).unwrap(), p(&[5, 6, 7]));
        let flat = AffineMap::linear(Matrix::zeros(2, 2));
        assert_eq!(flat.invert(), Err(Error::NotInvertible));
    }

    #[test]
    fn compose_order() {
        let f = AffineMap::translation(p(&[1, 0]));
        let g = AffineMap::linear(Matrix::from_rows(vec![vec![int(2), int(0)], vec![int(0), int(2)]]).unwrap());
        // f(g(x)) = 2x + (1,0)
        assert_eq!(f.compose(&g).unwrap().apply(&p(&[1, 1])).unwrap(), p(&[3, 2]));
        assert_eq!(g.compose(&f).unwrap().apply(&p(&[1, 1])).unwrap(), p(&[4, 2]));
    }

    #[test]
    fn basis_extension_examples() {
        let e = extend_to_basis(&[p(&[1, 0, 0]), p(&[0, 1, 0])], 3).unwrap();
        assert_eq!(e.apply(&p(&[1, 0, 0])).unwrap(), p(&[1, 0, 0]));
        assert_eq!(e.apply(&p(&[0, 1, 0])).unwrap(), p(&[0, 1, 0]));

        let m = extend_to_basis(&[p(&[1, 1]), p(&[0, 1])], 2).unwrap();
        assert_eq!(m.apply(&p(&[1, 1])).unwrap(), p(&[1, 0]));
        assert_eq!(m.apply(&p(&[0, 1])).unwrap(), p(&[0, 1]));

        let s = extend_to_basis(&[p(&[2, 0, 0])], 3).unwrap();
        assert_eq!(s.apply(&p(&[2, 0, 0])).unwrap(), p(&[1, 0, 0]));
        assert_eq!(s.rank(), 3);
        assert!(s.is_invertible());
    }

    #[test]
    fn basis_extension_rejects_dependent() {
        assert_eq!(extend_to_basis(&[p(&[1, 2]), p(&[2, 4])], 2), Err(Error::DependentInput));
        assert_eq!(extend_to_basis(&[p(&[0, 0])], 2), Err(Error::DependentInput));
    }

    #[test]
    fn collinearity() {
        assert!(collinear(&[p(&[0, 0, 0]), p(&[1, 0, 0]), p(&[2, 0, 0]), p(&[3, 0, 0])]));
        assert!(!collinear(&[p(&[0, 0]), p(&[1, 0]), p(&[0, 1])]));
    }
}
