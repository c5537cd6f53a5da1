#![allow(dead_code)]

use cloudcover::scalar::{frac, int};
use cloudcover::{Cloud, Point, Scalar};
use proptest::prelude::*;

pub fn p(c: &[i64]) -> Point {
    Point::from_ints(c)
}

pub fn scalar() -> impl Strategy<Value = Scalar> {
    (-12i64..=12, 1i64..=5).prop_map(|(n, d)| frac(n, d))
}

pub fn nonzero_scalar() -> impl Strategy<Value = Scalar> {
    scalar().prop_filter("nonzero", |s| *s != int(0))
}

pub fn point(dim: usize) -> impl Strategy<Value = Point> {
    proptest::collection::vec(scalar(), dim).prop_map(Point::new)
}

pub fn nonzero_point(dim: usize) -> impl Strategy<Value = Point> {
    point(dim).prop_filter("nonzero", |p| !p.is_zero())
}

/// A union of one or two spheres and a few points of ℝᵈ, declared around `center`.
pub fn sphere_union(dim: usize, center: Point) -> impl Strategy<Value = Cloud> {
    let sphere = (point(dim), (0i64..=9, 1i64..=4)).prop_map(|(c, (n, d))| Cloud::sphere(c, frac(n, d)).unwrap());
    (
        proptest::collection::vec(sphere, 1..=2),
        proptest::collection::vec(point(dim), 0..=3),
    )
        .prop_map(move |(mut parts, pts)| {
            let f = Cloud::finite(center.clone(), pts).unwrap();
            parts.push(f);
            Cloud::union(center.clone(), parts).unwrap()
        })
}
