mod common;

use cloudcover::kuratowski::{
    schmerl_to_decomposition, sierpinski_decomposition, verify_decomposition, EnumeratedSet, FiniteEnumeration,
    DEFAULT_BUDGET,
};
use cloudcover::schmerl::{AxisLine, SchmerlInstance};
use cloudcover::scalar::int;
use cloudcover::{Cloud, Point};
use common::*;
use proptest::prelude::*;

fn sizes(r: &cloudcover::kuratowski::DecompositionReport) -> Vec<Vec<usize>> {
    r.axes
        .iter()
        .map(|a| {
            let mut s: Vec<usize> = a.lines.iter().map(|l| l.size).collect();
            s.sort_unstable();
            s
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trichotomy_and_section_formula(m in 1usize..=9) {
        let x = FiniteEnumeration::naturals(m);
        let r = verify_decomposition(&sierpinski_decomposition(x.clone(), 0), &x, m, DEFAULT_BUDGET).unwrap();
        prop_assert!(r.covers());
        prop_assert_eq!(r.overlaps, 0);
        for j in 0..m {
            prop_assert_eq!(r.section(0, &[j]), Some((j + 1).min(m)));
            prop_assert_eq!(r.section(1, &[j]), Some(j));
        }
    }

    #[test]
    fn permutation_keeps_section_multiset(perm in Just((0..8usize).collect::<Vec<_>>()).prop_shuffle(), n in 0usize..=1) {
        let labels: Vec<String> = (0..8).map(|k| format!("x{k}")).collect();
        let x = FiniteEnumeration::new("x", labels).unwrap();
        let y = x.permuted(&perm).unwrap();
        for (k, &src) in perm.iter().enumerate() {
            prop_assert_eq!(y.index_of(&x.element(src).unwrap()), Some(k));
        }
        let m = 8;
        let base = verify_decomposition(&sierpinski_decomposition(x.clone(), n), &x, m, DEFAULT_BUDGET).unwrap();
        // rule rebuilt on the relabeled enumeration
        let relabeled = verify_decomposition(&sierpinski_decomposition(y.clone(), n), &y, m, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(sizes(&base), sizes(&relabeled));
        // original rule, swept in the permuted order: the same lines, relabeled
        let swept = verify_decomposition(&sierpinski_decomposition(x.clone(), n), &y, m, DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(sizes(&base), sizes(&swept));
        prop_assert!(swept.covers());
    }
}

#[test]
fn padded_grid_625() {
    let x = FiniteEnumeration::naturals(5);
    let r = verify_decomposition(&sierpinski_decomposition(x.clone(), 2), &x, 5, DEFAULT_BUDGET).unwrap();
    assert_eq!(r.tuples, 625);
    assert!(r.covers());
    for line in &r.axes[0].lines {
        assert_eq!(line.size, line.fixed[0] + 1);
    }
    for line in &r.axes[1].lines {
        assert_eq!(line.size, line.fixed[0]);
    }
    assert!(r.axes[2..].iter().all(|a| a.max == 0));
}

fn circles(centers: &[Point], radii_sq: &[cloudcover::Scalar]) -> Vec<Cloud> {
    centers.iter().zip(radii_sq).map(|(c, r)| Cloud::sphere(c.clone(), r.clone()).unwrap()).collect()
}

#[test]
fn window_decomposition_matches_geometry() {
    let centers = [p(&[1, 0]), p(&[0, 1]), p(&[1, 1])];
    let inst = SchmerlInstance::build(&circles(&centers, &[int(1), int(1), int(1)])).unwrap();
    let (d, x) = schmerl_to_decomposition(&inst);
    let m = 6;
    let r = verify_decomposition(&d, &x, m, DEFAULT_BUDGET).unwrap();
    assert_eq!(r.tuples, 216);
    // these circles miss most window images
    assert!(r.uncovered_count > 0);
    assert!(!r.uncovered.is_empty());
    for axis in &r.axes {
        let bound = inst.section_bound(axis.axis).unwrap();
        for line in &axis.lines {
            let fixed = line.fixed.iter().map(|&k| x.element(k).unwrap()).collect();
            let exact = inst.axis_line_intersection(axis.axis, &AxisLine::new(axis.axis, fixed).unwrap()).unwrap();
            let exact_roots = exact.witnesses().iter().filter(|w| w.as_exact().is_some()).count();
            assert!(line.size <= exact_roots && exact_roots <= bound);
        }
    }
}

#[test]
fn sphere_through_image_covers_tuple() {
    let centers = [p(&[1, 0]), p(&[0, 1]), p(&[1, 1])];
    let probe = SchmerlInstance::build(&circles(&centers, &[int(1), int(1), int(1)])).unwrap();
    let (_, x) = schmerl_to_decomposition(&probe);
    let tuple = vec![x.element(1).unwrap(), x.element(4).unwrap(), x.element(2).unwrap()];
    let image = probe.phi(&Point::new(tuple.clone())).unwrap();
    let r2 = (&image - &centers[0]).norm_sq();
    let inst = SchmerlInstance::build(&circles(&centers, &[r2, int(1), int(1)])).unwrap();
    assert_eq!(inst.epsilon(), probe.epsilon());
    let (d, x) = schmerl_to_decomposition(&inst);
    let r = verify_decomposition(&d, &x, 5, DEFAULT_BUDGET).unwrap();
    assert!(!r.uncovered.contains(&vec![1, 4, 2]));
    assert!(cloudcover::kuratowski::Decomposition::contains(&d, 0, &tuple).unwrap());
}
