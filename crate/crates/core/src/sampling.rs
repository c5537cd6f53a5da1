//! Deterministic samplers over the rationals.
//!
//! All randomness goes through [`seeded_rng`], so a seed fixes every sampled
//! point, line and map. Random rationals have bounded numerators and
//! denominators to keep exact arithmetic cheap.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clouds::{Body, Cloud};
use crate::error::{Error, Result};
use crate::geom::{collinear, AffineMap, Line, Point};
use crate::linalg::Matrix;
use crate::scalar::{frac, int, rational_sqrt, Scalar};

pub type SampleRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n/d` with `|n| ≤ max_abs·d` and `1 ≤ d ≤ max_den`.
pub fn random_scalar(rng: &mut SampleRng, max_abs: i64, max_den: i64) -> Scalar {
    let d = rng.random_range(1..=max_den);
    let n = rng.random_range(-max_abs * d..=max_abs * d);
    frac(n, d)
}

pub fn random_point(rng: &mut SampleRng, dim: usize, max_abs: i64, max_den: i64) -> Point {
    Point::new((0..dim).map(|_| random_scalar(rng, max_abs, max_den)).collect())
}

pub fn random_nonzero_point(rng: &mut SampleRng, dim: usize, max_abs: i64, max_den: i64) -> Point {
    loop {
        let p = random_point(rng, dim, max_abs, max_den);
        if !p.is_zero() {
            return p;
        }
    }
}

/// A random line through `a`. With probability `axis_bias` the direction
/// has some zeroed coordinates, so degenerate sub-cases are exercised too.
pub fn random_line_through(rng: &mut SampleRng, a: &Point, axis_bias: f64) -> Line {
    loop {
        let mut dir = random_point(rng, a.dim(), 3, 4).into_coords();
        if rng.random_bool(axis_bias) {
            for c in dir.iter_mut() {
                if rng.random_bool(0.5) {
                    *c = Scalar::zero();
                }
            }
        }
        if let Ok(line) = Line::new(a.clone(), Point::new(dir)) {
            return line;
        }
    }
}

pub fn random_invertible_map(rng: &mut SampleRng, dim: usize) -> AffineMap {
    loop {
        let rows = (0..dim).map(|_| (0..dim).map(|_| random_scalar(rng, 3, 3)).collect()).collect();
        let m = Matrix::from_rows(rows).expect("square rows");
        if m.rank() == dim {
            let t = random_point(rng, dim, 5, 3);
            return AffineMap::new(m, t).expect("matching dimensions");
        }
    }
}

/// A rational strictly inside `(-eps, eps)`.
pub fn random_window_scalar(rng: &mut SampleRng, eps: &Scalar) -> Scalar {
    let d = rng.random_range(2..=64i64);
    let k = rng.random_range(-(d - 1)..=(d - 1));
    eps * frac(k, d)
}

pub fn random_window_point(rng: &mut SampleRng, dim: usize, eps: &Scalar) -> Point {
    Point::new((0..dim).map(|_| random_window_scalar(rng, eps)).collect())
}

/// `n` distinct points of ℚᴺ, not all on one line.
pub fn random_noncollinear_points(rng: &mut SampleRng, dim: usize, n: usize) -> Vec<Point> {
    loop {
        let mut pts: Vec<Point> = Vec::with_capacity(n);
        while pts.len() < n {
            // small coordinates make coincidences (and collinear triples) common
            let p = random_point(rng, dim, 2, 2);
            if !pts.contains(&p) {
                pts.push(p);
            }
        }
        if !collinear(&pts) {
            return pts;
        }
    }
}

fn grid_values(count: usize) -> Vec<Scalar> {
    let s = count.max(1) as i64;
    (0..s).map(|k| frac(2 * (2 * k + 1 - s), s)).collect()
}

/// Exact points on a cloud's body, minus punctures, on a `primary × secondary`
/// parameter grid. Spheres are sampled by inverse stereographic projection,
/// which is rational only when the radius is; other spheres are rejected.
pub fn points_on_cloud(cloud: &Cloud, primary: usize, secondary: usize) -> Result<Vec<Point>> {
    let mut out: Vec<Point> = Vec::new();
    for p in raw_points(cloud, primary, secondary)? {
        if !cloud.punctures().contains(&p) && !out.contains(&p) {
            out.push(p);
        }
    }
    Ok(out)
}

fn raw_points(cloud: &Cloud, primary: usize, secondary: usize) -> Result<Vec<Point>> {
    Ok(match cloud.body() {
        Body::Finite(points) => points.clone(),
        Body::Sphere { center, radius_sq } => {
            let r = rational_sqrt(radius_sq)
                .ok_or_else(|| Error::UnsupportedSampling(format!("sphere with irrational radius around {center}")))?;
            if r.is_zero() {
                vec![center.clone()]
            } else {
                sphere_points(center, &r, primary, secondary)
            }
        }
        Body::Union(parts) => {
            let mut all = Vec::new();
            for part in parts {
                all.extend(points_on_cloud(part, primary, secondary)?);
            }
            all
        }
        Body::Cylinder { base, offset } => {
            let heights = grid_values(secondary);
            let mut all = Vec::new();
            for x in points_on_cloud(base, primary, secondary)? {
                for h in &heights {
                    let y = Point::new(offset.coords().iter().map(|o| o + h).collect());
                    all.push(x.concat(&y));
                }
            }
            all
        }
        Body::AffineImage { map, base, .. } => {
            points_on_cloud(base, primary, secondary)?.iter().map(|x| map.apply(x)).collect::<Result<_>>()?
        }
    })
}

fn sphere_points(center: &Point, r: &Scalar, primary: usize, secondary: usize) -> Vec<Point> {
    let d = center.dim();
    let us = grid_values(primary);
    let params: Vec<Vec<Scalar>> = if d <= 2 {
        us.iter().map(|u| vec![u.clone()]).collect()
    } else {
        let vs = grid_values(secondary);
        us.iter()
            .flat_map(|u| vs.iter().map(move |v| {
                let mut w = vec![u.clone(), v.clone()];
                w.resize(d - 1, Scalar::zero());
                w
            }))
            .collect()
    };
    params
        .into_iter()
        .map(|u| {
            let u = Point::new(u);
            let q = u.norm_sq();
            let denom = (&q + int(1)).recip();
            let mut coords: Vec<Scalar> = u.coords().iter().map(|c| c * int(2) * &denom).collect();
            coords.push((&q - int(1)) * &denom);
            &Point::new(coords).scale(r) + center
        })
        .collect()
}
