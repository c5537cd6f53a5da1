//! Projective space `P_m` in exact homogeneous coordinates.
//!
//! Points are stored canonically (first nonzero coordinate equal to 1) so
//! projective equality is structural equality. The affine chart is the image
//! of `E : x ↦ [x, 1]`; its complement, the points with last coordinate 0, is
//! the hyperplane at infinity.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::geom::{normalize_leading, Line, Point};
use crate::linalg::{vector_rank, Matrix};
use crate::scalar::{fmt_scalar, Scalar};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectivePoint(Vec<Scalar>);

impl ProjectivePoint {
    /// The class `[v]` of a nonzero vector `v ∈ ℚ^{m+1}`.
    pub fn new(homog: Vec<Scalar>) -> Result<Self> {
        if homog.is_empty() {
            return Err(Error::ZeroVector);
        }
        normalize_leading(&homog).map(ProjectivePoint).ok_or(Error::ZeroVector)
    }

    /// `m`, the dimension of the projective space.
    pub fn m(&self) -> usize {
        self.0.len() - 1
    }

    pub fn homog(&self) -> &[Scalar] {
        &self.0
    }

    pub fn is_at_infinity(&self) -> bool {
        self.0.last().is_some_and(Zero::is_zero)
    }

    fn check_m(&self, m: usize) -> Result<()> {
        if self.m() == m {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: m, found: self.m() })
        }
    }
}

impl fmt::Debug for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(fmt_scalar).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// `E(x) = [x, 1]`.
pub fn embed(x: &Point) -> ProjectivePoint {
    let mut v = x.coords().to_vec();
    v.push(Scalar::one());
    ProjectivePoint::new(v).expect("last coordinate is 1")
}

/// `E⁻¹`: divide by the last coordinate.
pub fn unembed(p: &ProjectivePoint) -> Result<Point> {
    let (last, head) = p.0.split_last().expect("nonempty");
    if last.is_zero() {
        return Err(Error::AtInfinity);
    }
    let inv = last.recip();
    Ok(Point::new(head.iter().map(|v| v * &inv).collect()))
}

/// `[dir, 0]`, the point completing `E(line)` to a projective line. Parallel
/// lines share it.
pub fn point_at_infinity(line: &Line) -> ProjectivePoint {
    let mut v = line.dir().coords().to_vec();
    v.push(Scalar::zero());
    ProjectivePoint::new(v).expect("direction is nonzero")
}

/// `∞_i`, the point at infinity of the `i`-th coordinate axis (zero-based).
pub fn axis_infinity(m: usize, axis: usize) -> ProjectivePoint {
    let mut v = vec![Scalar::zero(); m + 1];
    v[axis] = Scalar::one();
    ProjectivePoint(v)
}

/// Three points are collinear iff their representatives span rank ≤ 2.
pub fn proj_collinear(p: &ProjectivePoint, q: &ProjectivePoint, r: &ProjectivePoint) -> Result<bool> {
    q.check_m(p.m())?;
    r.check_m(p.m())?;
    Ok(vector_rank(&[p.0.clone(), q.0.clone(), r.0.clone()]) <= 2)
}

/// A projective line, stored as its lexicographically smallest spanning pair
/// among the supplied generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectiveLine {
    a: ProjectivePoint,
    b: ProjectivePoint,
}

impl ProjectiveLine {
    pub fn through(p: &ProjectivePoint, q: &ProjectivePoint) -> Result<Self> {
        q.check_m(p.m())?;
        if p == q {
            return Err(Error::CoincidentPoints);
        }
        let (a, b) = if p <= q { (p.clone(), q.clone()) } else { (q.clone(), p.clone()) };
        Ok(Self { a, b })
    }

    pub fn generators(&self) -> (&ProjectivePoint, &ProjectivePoint) {
        (&self.a, &self.b)
    }

    pub fn contains(&self, r: &ProjectivePoint) -> Result<bool> {
        proj_collinear(&self.a, &self.b, r)
    }
}

/// An invertible `(m+1)×(m+1)` matrix acting by `[x] ↦ [Mx]`, canonically
/// scaled so its first nonzero entry is 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProjectiveMap {
    matrix: Matrix,
}

impl ProjectiveMap {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if matrix.rows() != matrix.cols() || matrix.rows() < 2 {
            return Err(Error::NotInvertible);
        }
        if matrix.determinant()?.is_zero() {
            return Err(Error::NotInvertible);
        }
        let lead = (0..matrix.rows())
            .flat_map(|i| matrix.row(i).iter())
            .find(|v| !v.is_zero())
            .expect("invertible matrix has a nonzero entry")
            .recip();
        Ok(Self { matrix: matrix.scale(&lead) })
    }

    pub fn identity(m: usize) -> Self {
        Self { matrix: Matrix::identity(m + 1) }
    }

    pub fn m(&self) -> usize {
        self.matrix.rows() - 1
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply(&self, p: &ProjectivePoint) -> Result<ProjectivePoint> {
        p.check_m(self.m())?;
        ProjectivePoint::new(self.matrix.mul_vec(&p.0)?)
    }

    pub fn inverse(&self) -> ProjectiveMap {
        ProjectiveMap::new(self.matrix.inverse().expect("invertible by construction")).expect("inverse is invertible")
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &ProjectiveMap) -> Result<ProjectiveMap> {
        ProjectiveMap::new(self.matrix.mul(&inner.matrix)?)
    }
}

impl fmt::Debug for ProjectiveMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProjectiveMap{}", self.matrix)
    }
}

/// `proj_apply(M, p)`.
pub fn proj_apply(map: &ProjectiveMap, p: &ProjectivePoint) -> Result<ProjectivePoint> {
    map.apply(p)
}

/// The collineation with `M·xs[i] = ys[i]` for `m+1` independent vectors on
/// each side, `M = Y·X⁻¹`.
pub fn build_proj_collineation(xs: &[Vec<Scalar>], ys: &[Vec<Scalar>]) -> Result<ProjectiveMap> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: ys.len() });
    }
    let x = Matrix::from_columns(xs, n)?;
    let y = Matrix::from_columns(ys, n)?;
    if x.rank() < n || y.rank() < n {
        return Err(Error::DependentInput);
    }
    ProjectiveMap::new(y.mul(&x.inverse()?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::line_through;
    use crate::scalar::{frac, int};

    fn pp(c: &[i64]) -> ProjectivePoint {
        ProjectivePoint::new(c.iter().map(|&v| int(v)).collect()).unwrap()
    }

    fn p(c: &[i64]) -> Point {
        Point::from_ints(c)
    }

    #[test]
    fn embed_examples() {
        let e = embed(&p(&[3, 4]));
        assert_eq!(e.homog(), &[int(1), frac(4, 3), frac(1, 3)]);
        assert_eq!(embed(&p(&[0, 0])), pp(&[0, 0, 1]));
        assert_eq!(unembed(&e).unwrap(), p(&[3, 4]));
    }

    #[test]
    fn unembed_examples() {
        assert_eq!(unembed(&pp(&[3, 4, 1])).unwrap(), p(&[3, 4]));
        assert_eq!(unembed(&pp(&[2, 2, 2])).unwrap(), p(&[1, 1]));
        assert_eq!(unembed(&pp(&[1, 2, 0])), Err(Error::AtInfinity));
    }

    #[test]
    fn zero_vector_rejected() {
        assert_eq!(ProjectivePoint::new(vec![int(0), int(0)]), Err(Error::ZeroVector));
    }

    #[test]
    fn infinity_of_lines() {
        let l = Line::new(p(&[0, 0]), p(&[1, 2])).unwrap();
        let inf = point_at_infinity(&l);
        assert_eq!(inf, pp(&[1, 2, 0]));
        assert!(proj_collinear(&pp(&[0, 0, 1]), &pp(&[1, 2, 1]), &inf).unwrap());
        let parallel = Line::new(p(&[5, 5]), p(&[1, 2])).unwrap();
        assert_eq!(point_at_infinity(&parallel), inf);
        let axis = Line::new(p(&[0, 0, 0]), p(&[0, 1, 0])).unwrap();
        assert_eq!(point_at_infinity(&axis), axis_infinity(3, 1));
    }

    #[test]
    fn embedded_line_meets_its_infinity() {
        let a = p(&[1, -2, 3]);
        let b = p(&[0, 5, 1]);
        let l = line_through(&a, &b).unwrap();
        assert!(proj_collinear(&embed(&a), &embed(&b), &point_at_infinity(&l)).unwrap());
        let line = ProjectiveLine::through(&embed(&a), &embed(&b)).unwrap();
        assert!(line.contains(&point_at_infinity(&l)).unwrap());
        assert!(!line.contains(&embed(&p(&[0, 0, 0]))).unwrap());
    }

    #[test]
    fn collinearity_examples() {
        assert!(proj_collinear(&pp(&[1, 0, 0]), &pp(&[0, 1, 0]), &pp(&[1, 1, 0])).unwrap());
        assert!(!proj_collinear(&pp(&[1, 0, 0]), &pp(&[0, 1, 0]), &pp(&[0, 0, 1])).unwrap());
        assert!(proj_collinear(&pp(&[1, 0, 0]), &pp(&[0, 1, 0]), &pp(&[1, 0, 0, 0])).is_err());
    }

    #[test]
    fn collineation_examples() {
        let basis: Vec<Vec<Scalar>> = (0..3).map(|i| axis_infinity(2, i).homog().to_vec()).collect();
        assert_eq!(build_proj_collineation(&basis, &basis).unwrap(), ProjectiveMap::identity(2));

        let swapped = vec![basis[1].clone(), basis[0].clone(), basis[2].clone()];
        let perm = build_proj_collineation(&basis, &swapped).unwrap();
        let expected = Matrix::from_rows(vec![
            vec![int(0), int(1), int(0)],
            vec![int(1), int(0), int(0)],
            vec![int(0), int(0), int(1)],
        ])
        .unwrap();
        assert_eq!(perm.matrix(), &expected);

        let dependent = vec![basis[0].clone(), basis[0].clone(), basis[2].clone()];
        assert_eq!(build_proj_collineation(&dependent, &basis), Err(Error::DependentInput));
    }

    #[test]
    fn frame_to_infinity() {
        // (e_i, 1) ↦ (e_i, 0), (0, 1) ↦ (0, 1) in P_2: M(x, s) = (x, s − Σx)
        let xs = vec![vec![int(1), int(0), int(1)], vec![int(0), int(1), int(1)], vec![int(0), int(0), int(1)]];
        let ys = vec![vec![int(1), int(0), int(0)], vec![int(0), int(1), int(0)], vec![int(0), int(0), int(1)]];
        let m = build_proj_collineation(&xs, &ys).unwrap();
        let expected = Matrix::from_rows(vec![
            vec![int(1), int(0), int(0)],
            vec![int(0), int(1), int(0)],
            vec![int(-1), int(-1), int(1)],
        ])
        .unwrap();
        assert_eq!(m.matrix(), &expected);
        assert_eq!(m.apply(&embed(&p(&[1, 0]))).unwrap(), axis_infinity(2, 0));
        assert_eq!(m.apply(&embed(&p(&[0, 0]))).unwrap(), embed(&p(&[0, 0])));
    }

    #[test]
    fn map_scaling_is_canonical() {
        let m = ProjectiveMap::new(Matrix::identity(3).scale(&int(5))).unwrap();
        assert_eq!(m, ProjectiveMap::identity(2));
        assert!(ProjectiveMap::new(Matrix::zeros(3, 3)).is_err());
    }
}
