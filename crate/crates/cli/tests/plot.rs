use cloudcover::scalar::{int, parse_scalar};
use cloudcover::{extend, Cloud, ExtendOptions, Point};
use cloudcover_cli::plot::{plot_csv, plot_points, PlotError, PlotSpec};

fn rows(cloud: &Cloud, spec: PlotSpec) -> Vec<Point> {
    let text = plot_csv(cloud, spec).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let d = cloud.dim();
    assert_eq!(header.len(), 2 * d);
    lines
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            let exact: Vec<_> = cells[d..].iter().map(|c| parse_scalar(c).unwrap()).collect();
            for (f, e) in cells[..d].iter().zip(&exact) {
                let f: f64 = f.parse().unwrap();
                assert!((f - cloudcover::scalar::to_f64(e)).abs() < 1e-12);
            }
            Point::new(exact)
        })
        .collect()
}

#[test]
fn unit_circle_rows_are_members() {
    let c = Cloud::sphere(Point::from_ints(&[0, 0]), int(1)).unwrap();
    let pts = rows(&c, PlotSpec { primary: 8, secondary: 1 });
    assert_eq!(pts.len(), 8);
    assert!(pts.iter().all(|p| c.contains(p).unwrap()));
}

#[test]
fn cylinder_grid() {
    let c = Cloud::sphere(Point::from_ints(&[1, 2]), int(9)).unwrap();
    let cyl = extend(&c, 3, &Point::from_ints(&[0]), ExtendOptions::default()).unwrap();
    let pts = rows(&cyl, PlotSpec { primary: 4, secondary: 4 });
    assert_eq!(pts.len(), 16);
    assert!(pts.iter().all(|p| cyl.contains(p).unwrap()));
}

#[test]
fn punctures_are_dropped() {
    let c = Cloud::sphere(Point::from_ints(&[0, 0]), int(1)).unwrap();
    let all = plot_points(&c, PlotSpec { primary: 8, secondary: 1 }).unwrap();
    let punctured = c.clone().punctured(all[0].clone()).unwrap();
    let pts = rows(&punctured, PlotSpec { primary: 8, secondary: 1 });
    assert_eq!(pts.len(), 7);
    assert!(!pts.contains(&all[0]));
}

#[test]
fn other_dimensions_rejected() {
    let c = Cloud::sphere(Point::zero(5), int(1)).unwrap();
    assert!(matches!(plot_points(&c, PlotSpec::default()), Err(PlotError::UnsupportedDim(5))));
    let line = Cloud::sphere(Point::zero(1), int(1)).unwrap();
    assert!(matches!(plot_csv(&line, PlotSpec::default()), Err(PlotError::UnsupportedDim(1))));
}

#[test]
fn irrational_radius_reports_sampling_error() {
    let c = Cloud::sphere(Point::zero(2), int(2)).unwrap();
    assert!(matches!(plot_points(&c, PlotSpec::default()), Err(PlotError::Sampling(_))));
}
