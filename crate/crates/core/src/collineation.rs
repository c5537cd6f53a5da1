//! Moving points of ℝᴺ so that their projections onto the first two
//! coordinates are distinct and noncollinear, and lifting planar covers.
//!
//! The collineation is `T = T₃ ∘ T₂ ∘ T₁` where `T₁` translates `a₁` to the
//! origin, `T₂` is a linear bijection sending `b₂ ↦ e₁` and `b₃ ↦ e₂`, and `T₃`
//! is the shear `e_k ↦ e_k + λ_k·e₁` (`k ≥ 3`). The shear parameters are taken
//! from the moment curve `(t, t², …, t^{N−2})`, `t = 1, 2, …`, and the first
//! `t` avoiding every bad hyperplane wins.

use num_traits::Zero;

use crate::clouds::{extend, Cloud, ExtendOptions};
use crate::error::{Error, Result};
use crate::geom::{collinear, extend_to_basis, AffineMap, Point};
use crate::linalg::{vector_rank, Matrix};
use crate::scalar::{int, Scalar};

/// The first two coordinates of `x`.
pub fn project2(x: &Point) -> Result<Point> {
    if x.dim() < 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: x.dim() });
    }
    Ok(x.head(2))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictionCertificate {
    /// `T₃ ∘ T₂ ∘ T₁`, an invertible affine map of ℝᴺ.
    pub map: AffineMap,
    /// `(λ₃, …, λ_N)`.
    pub lambda: Vec<Scalar>,
    /// `reorder[k]` is the input index whose image is `projected[k]`.
    pub reorder: Vec<usize>,
    /// `project2(map(points[reorder[k]]))`.
    pub projected: Vec<Point>,
}

/// One pair whose projections coincide for the shears on a hyperplane:
/// the pair is merged exactly when `constant + Σ coeffs[k]·λ_{k+3} = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaConstraint {
    /// Indices into the reordered point list.
    pub pair: (usize, usize),
    pub constant: Scalar,
    pub coeffs: Vec<Scalar>,
}

impl LambdaConstraint {
    pub fn is_violated_by(&self, lambda: &[Scalar]) -> bool {
        let v: Scalar = &self.constant + self.coeffs.iter().zip(lambda).map(|(c, l)| c * l).sum::<Scalar>();
        v.is_zero()
    }
}

/// Hyperplane constraints for normalized points `c_i` (`c₁ = 0`, `c₂ = e₁`,
/// `c₃ = e₂`). Only pairs with equal second coordinate can collide.
pub fn lambda_constraints(normalized: &[Point]) -> Vec<LambdaConstraint> {
    let mut out = Vec::new();
    for i in 0..normalized.len() {
        for j in i + 1..normalized.len() {
            let (ci, cj) = (&normalized[i], &normalized[j]);
            if ci[1] != cj[1] {
                continue;
            }
            let coeffs: Vec<Scalar> = (2..ci.dim()).map(|k| &ci[k] - &cj[k]).collect();
            // equal tails: distinct points then differ in the first coordinate for every λ
            if coeffs.iter().all(Zero::is_zero) {
                continue;
            }
            out.push(LambdaConstraint { pair: (i, j), constant: &ci[0] - &cj[0], coeffs });
        }
    }
    out
}

/// The shear `x ↦ (x₁ + Σ_{k≥3} λ_k·x_k, x₂, …, x_N)`.
pub fn shear_map(lambda: &[Scalar], dim: usize) -> AffineMap {
    let mut m = Matrix::identity(dim);
    for (k, l) in lambda.iter().enumerate() {
        m.set(0, k + 2, l.clone());
    }
    AffineMap::linear(m)
}

fn moment_point(t: i64, len: usize) -> Vec<Scalar> {
    let mut out = Vec::with_capacity(len);
    let mut acc = int(1);
    for _ in 0..len {
        acc *= int(t);
        out.push(acc.clone());
    }
    out
}

fn validate(points: &[Point]) -> Result<usize> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: points.len() });
    }
    let dim = points[0].dim();
    if dim < 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: dim });
    }
    for (j, p) in points.iter().enumerate() {
        p.check_dim(dim)?;
        if points[..j].contains(p) {
            return Err(Error::DuplicateInput(j));
        }
    }
    if collinear(points) {
        return Err(Error::CollinearInput);
    }
    Ok(dim)
}

/// Builds the collineation for distinct, noncollinear `points` (at least 3).
pub fn build_restriction_collineation(points: &[Point]) -> Result<RestrictionCertificate> {
    let dim = validate(points)?;
    if dim == 2 {
        return Ok(RestrictionCertificate {
            map: AffineMap::identity(2),
            lambda: vec![],
            reorder: (0..points.len()).collect(),
            projected: points.to_vec(),
        });
    }

    let t1 = AffineMap::translation(-&points[0]);
    let b: Vec<Point> = points.iter().map(|p| p - &points[0]).collect();
    let third = (2..b.len())
        .find(|&i| vector_rank(&[b[1].coords().to_vec(), b[i].coords().to_vec()]) == 2)
        .ok_or(Error::CollinearInput)?;
    let mut reorder = vec![0, 1, third];
    reorder.extend((2..points.len()).filter(|&i| i != third));

    let t2 = extend_to_basis(&[b[1].clone(), b[third].clone()], dim)?;
    let normalized: Vec<Point> =
        reorder.iter().map(|&i| t2.apply(&b[i])).collect::<Result<_>>()?;
    let constraints = lambda_constraints(&normalized);

    // Each constraint is a nonzero polynomial of degree ≤ N−2 in t, so at most
    // |constraints|·(N−2) values of t are bad.
    let lambda = (1i64..)
        .map(|t| moment_point(t, dim - 2))
        .find(|l| constraints.iter().all(|c| !c.is_violated_by(l)))
        .expect("only finitely many t are excluded");

    let map = shear_map(&lambda, dim).compose(&t2)?.compose(&t1)?;
    let projected = reorder
        .iter()
        .map(|&i| project2(&map.apply(&points[i])?))
        .collect::<Result<_>>()?;
    Ok(RestrictionCertificate { map, lambda, reorder, projected })
}

/// Clouds of ℝᴺ built from a planar family.
#[derive(Clone, Debug)]
pub struct LiftedCover {
    pub certificate: RestrictionCertificate,
    /// Cylinder extensions `C_k` centered at `T(a_{reorder[k]})`.
    pub extended: Vec<Cloud>,
    /// `D_k = T⁻¹(C_k)`, a cloud around `a_{reorder[k]}`.
    pub clouds: Vec<Cloud>,
}

/// Lifts planar clouds to clouds of ℝᴺ centered at the given points.
///
/// `planar[k]` must be declared centered at `certificate.projected[k]`, i.e.
/// it pairs with `points[certificate.reorder[k]]`.
pub fn lift_cover(planar: &[Cloud], points: &[Point]) -> Result<LiftedCover> {
    let certificate = build_restriction_collineation(points)?;
    if planar.len() != points.len() {
        return Err(Error::DimensionMismatch { expected: points.len(), found: planar.len() });
    }
    let dim = points[0].dim();
    let inverse = certificate.map.invert()?;
    let mut extended = Vec::with_capacity(planar.len());
    let mut clouds = Vec::with_capacity(planar.len());
    for (k, cloud) in planar.iter().enumerate() {
        cloud.center().check_dim(2)?;
        if cloud.center() != &certificate.projected[k] {
            return Err(Error::CenterMismatch {
                index: k,
                expected: certificate.projected[k].to_string(),
                found: cloud.center().to_string(),
            });
        }
        if dim == 2 {
            if !cloud.is_cloud_around(cloud.center())?.is_cloud {
                return Err(Error::NotACloud(format!("planar cloud {k}")));
            }
            extended.push(cloud.clone());
            clouds.push(cloud.clone());
            continue;
        }
        let image = certificate.map.apply(&points[certificate.reorder[k]])?;
        let c = extend(cloud, dim, &image.tail(2), ExtendOptions::default())?;
        clouds.push(Cloud::affine_image(inverse.clone(), c.clone())?);
        extended.push(c);
    }
    Ok(LiftedCover { certificate, extended, clouds })
}
