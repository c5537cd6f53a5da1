//! Task execution. Each task turns into a list of named checks plus
//! structured outputs; library errors become failing checks.

use cloudcover::check::Check;
use cloudcover::clouds::Body;
use cloudcover::collineation::{build_restriction_collineation, lift_cover};
use cloudcover::kuratowski::{
    schmerl_to_decomposition, sierpinski_decomposition, verify_decomposition, DecompositionReport, EnumeratedSet,
    FiniteEnumeration, DEFAULT_BUDGET,
};
use cloudcover::projective::{
    axis_infinity, build_proj_collineation, embed, proj_apply, unembed, ProjectiveMap, ProjectivePoint,
};
use cloudcover::sampling::{points_on_cloud, random_line_through, random_point, random_scalar, seeded_rng};
use cloudcover::scalar::{fmt_scalar, int};
use cloudcover::schmerl::{schmerl_collineation, verify_instance, AxisLine, SchmerlInstance};
use cloudcover::{extend, AffineMap, Cloud, ExtendOptions, Line, LineIntersection, Matrix, OpenInterval, Point};
use cloudcover::{RationalLine, Scalar};
use serde_json::{json, Value};

use crate::scene::{DecomposeSource, Task};

pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_SEED: u64 = 0;

/// Seed and sample count for one run. Command-line values, when given,
/// replace the ones written in the scene.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
}

impl Overrides {
    fn pick(&self, samples: Option<usize>, seed: Option<u64>) -> (usize, u64) {
        (
            self.samples.or(samples).unwrap_or(DEFAULT_SAMPLES),
            self.seed.or(seed).unwrap_or(DEFAULT_SEED),
        )
    }
}

#[derive(Clone, Debug)]
pub struct TaskOutcome {
    pub checks: Vec<Check>,
    pub outputs: Value,
}

impl TaskOutcome {
    pub fn passed(&self) -> bool {
        cloudcover::check::all_passed(&self.checks)
    }

    fn failed(name: &str, e: impl std::fmt::Display, outputs: Value) -> Self {
        Self { checks: vec![Check::fail(name, "task could not run", e.to_string())], outputs }
    }
}

pub fn json_scalar(s: &Scalar) -> Value {
    Value::String(fmt_scalar(s))
}

pub fn json_point(p: &Point) -> Value {
    Value::Array(p.coords().iter().map(json_scalar).collect())
}

pub fn json_matrix(m: &Matrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| Value::Array(r.iter().map(json_scalar).collect())).collect())
}

fn json_map(m: &AffineMap) -> Value {
    json!({ "matrix": json_matrix(m.matrix()), "translation": json_point(m.translation_part()) })
}

fn json_points(ps: &[Point]) -> Value {
    Value::Array(ps.iter().map(json_point).collect())
}

/// A structured, exact description of a cloud.
pub fn describe_cloud(c: &Cloud) -> Value {
    let mut v = match c.body() {
        Body::Finite(points) => json!({ "points": json_points(points) }),
        Body::Sphere { center, radius_sq } => json!({ "sphere_center": json_point(center), "radius_sq": json_scalar(radius_sq) }),
        Body::Union(parts) => json!({ "parts": parts.iter().map(describe_cloud).collect::<Vec<_>>() }),
        Body::Cylinder { base, offset } => json!({ "base": describe_cloud(base), "offset": json_point(offset) }),
        Body::AffineImage { map, base, .. } => json!({ "map": json_map(map), "base": describe_cloud(base) }),
    };
    let obj = v.as_object_mut().expect("object literal");
    obj.insert("kind".into(), json!(c.kind()));
    obj.insert("dimension".into(), json!(c.dim()));
    obj.insert("center".into(), json_point(c.center()));
    if !c.punctures().is_empty() {
        obj.insert("punctures".into(), json_points(c.punctures()));
    }
    v
}

pub fn run_task(task: &Task, overrides: Overrides) -> TaskOutcome {
    match task {
        Task::Extend { cloud, target_dim, offset, samples, seed } => {
            let (samples, seed) = overrides.pick(*samples, *seed);
            run_extend(cloud, *target_dim, offset, samples, seed)
        }
        Task::Collineate { points, clouds, circles, samples, seed } => {
            let (samples, seed) = overrides.pick(*samples, *seed);
            run_collineate(points, clouds.as_deref(), circles.as_deref(), samples, seed)
        }
        Task::Projective { from, to, n, samples, seed } => {
            let (samples, seed) = overrides.pick(*samples, *seed);
            run_projective(from.as_deref(), to.as_deref(), *n, samples, seed)
        }
        Task::Schmerl { clouds, epsilon, samples, seed } => {
            let (samples, seed) = overrides.pick(*samples, *seed);
            run_schmerl(clouds, epsilon.as_ref(), samples, seed)
        }
        Task::Decompose { source, prefix, budget } => run_decompose(source, *prefix, budget.unwrap_or(DEFAULT_BUDGET)),
    }
}

fn run_extend(cloud: &Cloud, target_dim: usize, offset: &Point, samples: usize, seed: u64) -> TaskOutcome {
    let ext = match extend(cloud, target_dim, offset, ExtendOptions::default()) {
        Ok(e) => e,
        Err(e) => return TaskOutcome::failed("extend", e, json!({})),
    };
    let Body::Cylinder { base, .. } = ext.body() else { unreachable!("extend builds cylinders") };
    let k = cloud.dim();
    let center = ext.center().clone();
    let mut checks = vec![Check::pass(
        "extend",
        format!("{} cloud of R^{k} extended to R^{target_dim} around {center}", cloud.kind()),
    )];
    let decision = ext.is_cloud_around(&center).expect("dimensions match");
    checks.push(Check::from_witness(
        "cloud_around_center",
        "every line through the new center meets the extension finitely often",
        decision.witness.map(|l| format!("infinite section on {l}")),
    ));

    let mut rng = seeded_rng(seed);
    let (mut vertical, mut max_count, mut mismatch) = (0, 0, None);
    for j in 0..samples {
        let line = if j % 5 == 0 {
            let tail = random_point(&mut rng, target_dim - k, 3, 3);
            let mut dir = Point::zero(k).concat(&tail).into_coords();
            dir[k] = int(1);
            Line::new(center.clone(), Point::new(dir)).expect("nonzero direction")
        } else {
            random_line_through(&mut rng, &center, 0.25)
        };
        let got = ext.intersect_line(&line).expect("dimensions match");
        let v = line.dir().head(k);
        let want = if v.is_zero() {
            vertical += 1;
            LineIntersection::Finite(vec![])
        } else {
            let projected = RationalLine::new(line.base().head(k), v, int(1), int(0)).expect("dimensions match");
            base.intersect_path(&projected, &OpenInterval::all()).expect("lines have no poles")
        };
        max_count = max_count.max(got.count().unwrap_or(usize::MAX));
        if got != want && mismatch.is_none() {
            mismatch = Some(format!("line {line}: extension gives {got}, projected line gives {want}"));
        }
    }
    checks.push(Check::from_witness(
        "line_identity",
        format!("{samples} lines through the center ({vertical} with zero planar part): sections equal those of the projected lines"),
        mismatch,
    ));
    TaskOutcome {
        checks,
        outputs: json!({
            "cloud": describe_cloud(&ext),
            "lines": samples,
            "vertical_lines": vertical,
            "max_section": max_count,
            "seed": seed,
        }),
    }
}

fn run_collineate(points: &[Point], clouds: Option<&[Cloud]>, circles: Option<&[Scalar]>, samples: usize, seed: u64) -> TaskOutcome {
    let cert = match build_restriction_collineation(points) {
        Ok(c) => c,
        Err(e) => return TaskOutcome::failed("certificate", e, json!({})),
    };
    let dim = points[0].dim();
    let mut checks = Vec::new();
    let mut sorted = cert.projected.clone();
    sorted.sort();
    sorted.dedup();
    checks.push(Check::from_witness(
        "projections_distinct",
        format!("{} projected points, pairwise distinct", cert.projected.len()),
        (sorted.len() != cert.projected.len()).then(|| format!("projections {:?}", cert.projected)),
    ));
    let normal = [Point::from_ints(&[0, 0]), Point::from_ints(&[1, 0]), Point::from_ints(&[0, 1])];
    if dim == 2 {
        checks.push(Check::pass("normal_form", "planar input: the identity map"));
    } else {
        checks.push(Check::from_witness(
            "normal_form",
            "first three projections are (0, 0), (1, 0), (0, 1)",
            (cert.projected[..3] != normal).then(|| format!("got {:?}", &cert.projected[..3])),
        ));
    }
    checks.push(Check::from_witness(
        "map_invertible",
        format!("T has rank {}", cert.map.rank()),
        (!cert.map.is_invertible()).then(|| "singular map".to_string()),
    ));
    let again = build_restriction_collineation(points).expect("succeeded once");
    checks.push(Check::from_witness(
        "deterministic",
        "rebuilding from the same points gives the same map",
        (again != cert).then(|| "maps differ".to_string()),
    ));
    let mut outputs = json!({
        "map": json_map(&cert.map),
        "lambda": cert.lambda.iter().map(json_scalar).collect::<Vec<_>>(),
        "reorder": cert.reorder,
        "projected": json_points(&cert.projected),
    });

    let planar: Option<Vec<Cloud>> = match (clouds, circles) {
        (Some(cs), _) => Some(cert.reorder.iter().map(|&i| cs[i].clone()).collect()),
        (None, Some(rs)) => {
            let made: Result<Vec<Cloud>, _> = cert
                .reorder
                .iter()
                .zip(&cert.projected)
                .map(|(&i, c)| Cloud::sphere(c.clone(), rs[i].clone()))
                .collect();
            match made {
                Ok(m) => Some(m),
                Err(e) => {
                    checks.push(Check::fail("lift", "circles around the projected points", e.to_string()));
                    None
                }
            }
        }
        (None, None) => None,
    };
    if let Some(planar) = planar {
        lift_checks(&cert, points, &planar, samples, seed, &mut checks, &mut outputs);
    }
    TaskOutcome { checks, outputs }
}

fn lift_checks(
    cert: &cloudcover::collineation::RestrictionCertificate,
    points: &[Point],
    planar: &[Cloud],
    samples: usize,
    seed: u64,
    checks: &mut Vec<Check>,
    outputs: &mut Value,
) {
    let lifted = match lift_cover(planar, points) {
        Ok(l) => l,
        Err(e) => {
            checks.push(Check::fail("lift", "planar clouds must be centered at the projected points", e.to_string()));
            return;
        }
    };
    let inverse = cert.map.invert().expect("certificate maps are invertible");
    let bad_center = lifted.clouds.iter().enumerate().find(|(k, d)| {
        let a = &points[cert.reorder[*k]];
        d.center() != a || &inverse.apply(lifted.extended[*k].center()).expect("dimension") != a
    });
    checks.push(Check::from_witness(
        "lift_centers",
        "each lifted cloud is centered exactly at its input point",
        bad_center.map(|(k, d)| format!("cloud {k} centered at {}", d.center())),
    ));
    let not_cloud = lifted.clouds.iter().position(|d| !d.is_cloud_around(d.center()).expect("dimension").is_cloud);
    checks.push(Check::from_witness(
        "lifted_clouds",
        "each lifted set is a cloud around its center",
        not_cloud.map(|k| format!("cloud {k}")),
    ));

    let dim = points[0].dim();
    let mut rng = seeded_rng(seed);
    let per_cloud = samples.div_ceil(planar.len().max(1)).max(1);
    let (mut tested, mut lost, mut skipped) = (0, None, Vec::new());
    for (k, c) in planar.iter().enumerate() {
        let on = match points_on_cloud(c, per_cloud, 1) {
            Ok(on) => on,
            Err(_) => {
                skipped.push(k);
                continue;
            }
        };
        for u in on {
            let heights = Point::new((0..dim - 2).map(|_| random_scalar(&mut rng, 6, 5)).collect());
            let x = inverse.apply(&u.concat(&heights)).expect("dimension");
            tested += 1;
            if lost.is_none() && !lifted.clouds.iter().any(|d| d.contains(&x).expect("dimension")) {
                lost = Some(format!("{x} projects into planar cloud {k} but no lifted cloud contains it"));
            }
        }
    }
    let note = if skipped.is_empty() { String::new() } else { format!("; clouds {skipped:?} have no rational sampler") };
    checks.push(Check::from_witness(
        "cover_transport",
        format!("{tested} points with covered planar projections stay covered{note}"),
        lost,
    ));
    let obj = outputs.as_object_mut().expect("object");
    obj.insert("lifted_centers".into(), Value::Array(lifted.clouds.iter().map(|d| json_point(d.center())).collect()));
    obj.insert("extension_centers".into(), Value::Array(lifted.extended.iter().map(|d| json_point(d.center())).collect()));
}

fn random_homogeneous(rng: &mut cloudcover::sampling::SampleRng, len: usize) -> Vec<Scalar> {
    loop {
        let v = random_point(rng, len, 4, 3);
        if !v.is_zero() {
            return v.into_coords();
        }
    }
}

fn run_projective(from: Option<&[Vec<Scalar>]>, to: Option<&[Vec<Scalar>]>, n: Option<usize>, samples: usize, seed: u64) -> TaskOutcome {
    let mut checks = Vec::new();
    let mut outputs = serde_json::Map::new();
    let mut dims = Vec::new();
    if let (Some(xs), Some(ys)) = (from, to) {
        match build_proj_collineation(xs, ys) {
            Ok(map) => {
                let bad = xs.iter().zip(ys).position(|(x, y)| {
                    let px = ProjectivePoint::new(x.clone()).expect("independent");
                    proj_apply(&map, &px).ok() != ProjectivePoint::new(y.clone()).ok()
                });
                checks.push(Check::from_witness(
                    "frame_postcondition",
                    format!("S([x_i]) = [y_i] for all {} frame vectors", xs.len()),
                    bad.map(|i| format!("vector {i}")),
                ));
                outputs.insert("matrix".into(), json_matrix(map.matrix()));
            }
            Err(e) => checks.push(Check::fail("frame_postcondition", "collineation through the given frames", e.to_string())),
        }
        dims.push(xs.len().saturating_sub(1));
    }
    if let Some(n) = n {
        let k = n + 2;
        let s = schmerl_collineation(k);
        let origin = embed(&Point::zero(k));
        checks.push(Check::from_witness(
            "s_fixes_origin",
            format!("S(E(0)) = E(0) in P_{k}"),
            (proj_apply(&s, &origin).ok() != Some(origin.clone())).then(|| "origin moved".to_string()),
        ));
        let bad = (0..k).find(|&i| proj_apply(&s, &embed(&Point::basis(k, i))).ok() != Some(axis_infinity(k, i)));
        checks.push(Check::from_witness(
            "s_sends_basis_to_infinity",
            format!("S(E(e_i)) = inf_i for i = 1..{k}"),
            bad.map(|i| format!("axis {}", i + 1)),
        ));
        outputs.insert("schmerl_matrix".into(), json_matrix(s.matrix()));
        dims.push(k);
    }
    let mut rng = seeded_rng(seed);
    let (mut round_bad, mut scale_bad) = (None, None);
    for &m in &dims {
        let maps = [ProjectiveMap::identity(m)];
        for _ in 0..samples {
            let x = random_point(&mut rng, m, 5, 4);
            if round_bad.is_none() && unembed(&embed(&x)).ok().as_ref() != Some(&x) {
                round_bad = Some(format!("{x}"));
            }
            let v = random_homogeneous(&mut rng, m + 1);
            let c = loop {
                let c = random_scalar(&mut rng, 5, 4);
                if c != int(0) {
                    break c;
                }
            };
            let w: Vec<Scalar> = v.iter().map(|e| e * &c).collect();
            let (pv, pw) = (ProjectivePoint::new(v).expect("nonzero"), ProjectivePoint::new(w).expect("nonzero"));
            if scale_bad.is_none() && (pv != pw || proj_apply(&maps[0], &pv).ok() != Some(pv.clone())) {
                scale_bad = Some(format!("{pv} vs {pw}"));
            }
        }
    }
    checks.push(Check::from_witness("embedding_round_trip", format!("E^-1(E(x)) = x on {samples} points per dimension"), round_bad));
    checks.push(Check::from_witness("scaling_invariance", format!("[v] = [c v] on {samples} vectors per dimension"), scale_bad));
    outputs.insert("seed".into(), json!(seed));
    TaskOutcome { checks, outputs: Value::Object(outputs) }
}

fn build_instance(clouds: &[Cloud], epsilon: Option<&Scalar>) -> cloudcover::Result<SchmerlInstance> {
    match epsilon {
        Some(e) => SchmerlInstance::build_with_epsilon(clouds, e.clone()),
        None => SchmerlInstance::build(clouds),
    }
}

fn instance_outputs(inst: &SchmerlInstance) -> Value {
    let c = inst.certificate();
    let opt = |s: &Option<Scalar>| s.as_ref().map_or(Value::Null, json_scalar);
    json!({
        "n": inst.n(),
        "dimension": inst.dim(),
        "epsilon": json_scalar(inst.epsilon()),
        "shift": json_point(inst.shift()),
        "centers": json_points(inst.centers()),
        "t_matrix": json_matrix(inst.t_map().matrix()),
        "s_matrix": json_matrix(inst.s_map().matrix()),
        "certificate": {
            "condition1_bound": json_scalar(&c.condition1_bound),
            "condition1_margin": json_scalar(&c.condition1_margin),
            "condition1_holds": c.condition1_holds,
            "max_row_sum": json_scalar(&c.max_row_sum),
            "min_center_norm": json_scalar(&c.min_center_norm),
            "image_radius": opt(&c.image_radius),
            "condition2_lhs": opt(&c.condition2_lhs),
            "condition2_bound": json_scalar(&c.condition2_bound),
            "condition2_holds": c.condition2_holds,
        },
    })
}

fn run_schmerl(clouds: &[Cloud], epsilon: Option<&Scalar>, samples: usize, seed: u64) -> TaskOutcome {
    let inst = match build_instance(clouds, epsilon) {
        Ok(i) => i,
        Err(e) => return TaskOutcome::failed("instance", e, json!({})),
    };
    let report = verify_instance(&inst, samples, seed);
    let mut outputs = instance_outputs(&inst);
    let axes: Vec<Value> = report
        .axes
        .iter()
        .map(|a| {
            json!({
                "axis": a.axis + 1,
                "lines": a.lines,
                "max_section": a.max_count,
                "bound": a.bound,
                "infinite": a.infinite,
                "over_bound": a.over_bound,
                "parallel_pass": a.parallel_pass,
            })
        })
        .collect();
    let obj = outputs.as_object_mut().expect("object");
    obj.insert("axes".into(), Value::Array(axes));
    obj.insert("samples".into(), json!(samples));
    obj.insert("seed".into(), json!(seed));
    TaskOutcome { checks: report.checks, outputs }
}

fn decomposition_outputs<E>(r: &DecompositionReport, elements: &[E], show: impl Fn(&E) -> String) -> Value {
    json!({
        "set": r.label,
        "arity": r.arity,
        "prefix": r.prefix,
        "elements": elements.iter().map(&show).collect::<Vec<_>>(),
        "tuples": r.tuples,
        "uncovered_count": r.uncovered_count,
        "uncovered": r.uncovered,
        "overlaps": r.overlaps,
        "sections": r.axes.iter().map(|a| json!({
            "axis": a.axis + 1,
            "max": a.max,
            "argmax": a.argmax,
            "lines": a.lines.iter().map(|l| json!({ "fixed": l.fixed, "size": l.size })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "growth": r.growth.iter().map(|g| json!({
            "axis": g.axis + 1,
            "anchor_grows": g.anchor_grows(),
            "rows": g.rows.iter().map(|row| json!({
                "prefix": row.prefix,
                "max_section": row.max_section,
                "anchor_section": row.anchor_section,
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

fn run_decompose(source: &DecomposeSource, prefix: usize, budget: u128) -> TaskOutcome {
    match source {
        DecomposeSource::Sierpinski { n } => {
            let x = FiniteEnumeration::naturals(prefix);
            let d = sierpinski_decomposition(x.clone(), *n);
            let r = match verify_decomposition(&d, &x, prefix, budget) {
                Ok(r) => r,
                Err(e) => return TaskOutcome::failed("sweep", e, json!({})),
            };
            let mut checks = r.checks();
            checks.push(Check::from_witness(
                "exclusive",
                "no tuple lies in two sets",
                (r.overlaps > 0).then(|| format!("{} tuples in two sets", r.overlaps)),
            ));
            let bad = r.axes.iter().find_map(|a| {
                a.lines.iter().find_map(|l| {
                    let want = match a.axis {
                        0 => (l.fixed[0] + 1).min(prefix),
                        1 => l.fixed[0],
                        _ => 0,
                    };
                    (l.size != want).then(|| format!("axis {} line {:?}: {} != {want}", a.axis + 1, l.fixed, l.size))
                })
            });
            checks.push(Check::from_witness(
                "section_formula",
                "axis-1 sections at q2 = elem(j) have min(j+1, m) points, axis-2 sections at q1 = elem(j) have j",
                bad,
            ));
            TaskOutcome { checks, outputs: decomposition_outputs(&r, x.elements(), |e| e.to_string()) }
        }
        DecomposeSource::Window { clouds, epsilon } => {
            let inst = match build_instance(clouds, epsilon.as_ref()) {
                Ok(i) => i,
                Err(e) => return TaskOutcome::failed("instance", e, json!({})),
            };
            let (d, x) = schmerl_to_decomposition(&inst);
            let r = match verify_decomposition(&d, &x, prefix, budget) {
                Ok(r) => r,
                Err(e) => return TaskOutcome::failed("sweep", e, json!({})),
            };
            let elements: Vec<Scalar> = (0..prefix).map(|k| x.element(k).expect("infinite enumeration")).collect();
            let mut checks = r.checks();
            let bad = r.axes.iter().find_map(|a| {
                let bound = inst.section_bound(a.axis);
                a.lines.iter().find_map(|l| {
                    let fixed = l.fixed.iter().map(|&k| elements[k].clone()).collect();
                    let line = AxisLine::new(a.axis, fixed).expect("axis in range");
                    let exact = match inst.axis_line_intersection(a.axis, &line) {
                        Ok(LineIntersection::Finite(w)) => w.iter().filter(|r| r.as_exact().is_some()).count(),
                        Ok(LineIntersection::Infinite(why)) => return Some(why),
                        Err(e) => return Some(e.to_string()),
                    };
                    let over = l.size > exact || bound.is_some_and(|b| exact > b);
                    over.then(|| format!("axis {} line {:?}: prefix {} / exact {exact}", a.axis + 1, l.fixed, l.size))
                })
            });
            checks.push(Check::from_witness(
                "sections_within_bound",
                "prefix sections agree with exact sections and stay within 2k + f",
                bad,
            ));
            let mut outputs = decomposition_outputs(&r, &elements, fmt_scalar);
            outputs.as_object_mut().expect("object").insert("instance".into(), instance_outputs(&inst));
            TaskOutcome { checks, outputs }
        }
    }
}
