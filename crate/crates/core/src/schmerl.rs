//! The window transform sending clouds around `p_i` to sets that are finite on
//! lines parallel to the `i`-th coordinate axis.
//!
//! Given `n + 2` clouds `C_i ⊂ ℝᴺ` around nonzero centers `p_i`:
//!
//! - `T : ℝ^{n+2} → ℝᴺ` is the linear map with `T(e_i) = p_i`;
//! - `S` is the projective collineation `(x, s) ↦ (x, s − Σx_j)`, which fixes
//!   `E(0)` and sends `E(e_i)` to the point at infinity `∞_i` of the `i`-th axis;
//! - on the window `X = (−ε, ε)`, `q ∈ D_i ⟺ Φ(q) ∈ C_i` where
//!   `Φ(q) = T(E⁻¹(S⁻¹(E(q)))) = T(q / (1 + Σq_j))`.
//!
//! Two closed-form certificates replace the open-set argument for the choice
//! of `ε`. Condition 1 (`S⁻¹(E(X^{n+2}))` stays in the affine chart) holds with
//! margin `1 − (n+2)ε > 0`. Condition 2 (`T` injective on every line through some
//! `e_i` and a window image `x′`) follows from
//! `maxAbsRowSum(T) · ε/(1 − (n+2)ε) < min_i ‖p_i‖∞`, which forces
//! `T(e_i − x′) = p_i − T(x′) ≠ 0`.
//!
//! `D_i` is never materialized. Membership goes through Φ, and sections along
//! axis lines have the fractional-linear form handled by
//! [`Cloud::intersect_path`].

use num_traits::{One, Signed, Zero};

use crate::check::Check;
use crate::clouds::{Cloud, LineIntersection, RationalLine};
use crate::error::{Error, Result};
use crate::geom::{collinear, AffineMap, Point};
use crate::linalg::Matrix;
use crate::projective::{axis_infinity, embed, proj_collinear, unembed, ProjectiveMap};
use crate::roots::OpenInterval;
use crate::sampling::{random_window_point, random_window_scalar, seeded_rng};
use crate::scalar::{fmt_scalar, frac, int, Scalar};

/// The rational inequalities behind a window choice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowCertificate {
    pub epsilon: Scalar,
    /// `1/(n+2)`; condition 1 needs `ε` strictly below it.
    pub condition1_bound: Scalar,
    /// `1 − (n+2)ε`, a lower bound for `1 + Σq_j` on the window.
    pub condition1_margin: Scalar,
    pub condition1_holds: bool,
    /// `maxAbsRowSum(T)`, the ∞-operator norm of `T`.
    pub max_row_sum: Scalar,
    /// `min_i ‖p_i‖∞`.
    pub min_center_norm: Scalar,
    /// `ε/(1 − (n+2)ε)`, bounding `‖x′‖∞` for window images; absent when the
    /// margin is not positive.
    pub image_radius: Option<Scalar>,
    /// `maxAbsRowSum(T) · image_radius`.
    pub condition2_lhs: Option<Scalar>,
    /// `min‖p‖∞ / (maxAbsRowSum + (n+2)·min‖p‖∞)`, the supremum of admissible ε.
    pub condition2_bound: Scalar,
    pub condition2_holds: bool,
}

impl WindowCertificate {
    fn compute(epsilon: &Scalar, arity: usize, max_row_sum: &Scalar, min_center_norm: &Scalar) -> Self {
        let k = int(arity as i64);
        let condition1_bound = k.recip();
        let condition1_margin = Scalar::one() - &k * epsilon;
        let condition1_holds = condition1_margin.is_positive();
        let image_radius = condition1_holds.then(|| epsilon / &condition1_margin);
        let condition2_lhs = image_radius.as_ref().map(|r| max_row_sum * r);
        let condition2_holds = condition2_lhs.as_ref().is_some_and(|lhs| lhs < min_center_norm);
        let condition2_bound = min_center_norm / (max_row_sum + &k * min_center_norm);
        Self {
            epsilon: epsilon.clone(),
            condition1_bound,
            condition1_margin,
            condition1_holds,
            max_row_sum: max_row_sum.clone(),
            min_center_norm: min_center_norm.clone(),
            image_radius,
            condition2_lhs,
            condition2_bound,
            condition2_holds,
        }
    }

    pub fn holds(&self) -> bool {
        self.condition1_holds && self.condition2_holds
    }
}

/// A line `{anchor + t·e_axis : t ∈ (−ε, ε)}` of the window cube (zero-based
/// axis; `anchor[axis] = 0`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxisLine {
    axis: usize,
    anchor: Point,
}

impl AxisLine {
    /// `fixed` lists the other `n + 1` coordinates in order.
    pub fn new(axis: usize, fixed: Vec<Scalar>) -> Result<Self> {
        if axis > fixed.len() {
            return Err(Error::BadAxis { axis, arity: fixed.len() + 1 });
        }
        let mut coords = fixed;
        coords.insert(axis, Scalar::zero());
        Ok(Self { axis, anchor: Point::new(coords) })
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn anchor(&self) -> &Point {
        &self.anchor
    }

    pub fn point_at(&self, t: &Scalar) -> Point {
        let mut c = self.anchor.coords().to_vec();
        c[self.axis] = t.clone();
        Point::new(c)
    }
}

#[derive(Clone, Debug)]
pub struct SchmerlInstance {
    n: usize,
    dim: usize,
    /// Clouds after the shift, centered at `centers`.
    clouds: Vec<Cloud>,
    centers: Vec<Point>,
    shift: Point,
    t_map: AffineMap,
    s_map: ProjectiveMap,
    s_inverse: ProjectiveMap,
    epsilon: Scalar,
    certificate: WindowCertificate,
}

/// The closed-form `S` on `P_{arity}`: identity with last row `(−1, …, −1, 1)`.
pub fn schmerl_collineation(arity: usize) -> ProjectiveMap {
    let mut m = Matrix::identity(arity + 1);
    for j in 0..arity {
        m.set(arity, j, int(-1));
    }
    ProjectiveMap::new(m).expect("unit lower triangular")
}

impl SchmerlInstance {
    /// Builds an instance with the default certified window: half the
    /// condition-2 supremum (which is always below the condition-1 bound).
    pub fn build(clouds: &[Cloud]) -> Result<Self> {
        let mut inst = Self::assemble(clouds, Scalar::one())?;
        let bound = inst.certificate.condition2_bound.clone().min(inst.certificate.condition1_bound.clone());
        inst.set_epsilon(bound / int(2));
        if !inst.certificate.holds() {
            return Err(Error::CertificationFailed(format!(
                "no admissible window for min center norm {}",
                fmt_scalar(&inst.certificate.min_center_norm)
            )));
        }
        Ok(inst)
    }

    /// Builds an instance with a caller-chosen `ε`, certified or not; the
    /// certificate records which conditions hold.
    pub fn build_with_epsilon(clouds: &[Cloud], epsilon: Scalar) -> Result<Self> {
        if !epsilon.is_positive() {
            return Err(Error::CertificationFailed("epsilon must be positive".into()));
        }
        Self::assemble(clouds, epsilon)
    }

    fn assemble(clouds: &[Cloud], epsilon: Scalar) -> Result<Self> {
        if clouds.len() < 3 {
            return Err(Error::TooFewPoints { needed: 3, got: clouds.len() });
        }
        let dim = clouds[0].dim();
        if dim < 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: dim });
        }
        for (i, c) in clouds.iter().enumerate() {
            c.center().check_dim(dim)?;
            let d = c.is_cloud_around(c.center())?;
            if !d.is_cloud {
                let line = d.witness.map(|l| l.to_string()).unwrap_or_default();
                return Err(Error::NotACloud(format!("cloud {i}: infinite section on {line}")));
            }
        }
        let arity = clouds.len();

        // translate along e₁ until no center sits at the origin
        let shift = (0i64..)
            .map(|k| Point::basis(dim, 0).scale(&int(k)))
            .find(|v| clouds.iter().all(|c| !(c.center() + v).is_zero()))
            .expect("finitely many clouds");
        let (clouds, centers): (Vec<Cloud>, Vec<Point>) = if shift.is_zero() {
            (clouds.to_vec(), clouds.iter().map(|c| c.center().clone()).collect())
        } else {
            let tr = AffineMap::translation(shift.clone());
            let moved = clouds.iter().map(|c| Cloud::affine_image(tr.clone(), c.clone())).collect::<Result<Vec<_>>>()?;
            let centers = moved.iter().map(|c| c.center().clone()).collect();
            (moved, centers)
        };

        let cols: Vec<Vec<Scalar>> = centers.iter().map(|p| p.coords().to_vec()).collect();
        let t_map = AffineMap::linear(Matrix::from_columns(&cols, dim)?);
        let s_map = schmerl_collineation(arity);
        let s_inverse = s_map.inverse();

        let m = t_map.matrix();
        let max_row_sum = (0..m.rows())
            .map(|i| m.row(i).iter().map(|v| num_traits::abs(v.clone())).sum::<Scalar>())
            .max()
            .unwrap_or_else(Scalar::zero);
        let min_center_norm = centers.iter().map(Point::max_norm).min().expect("nonempty");
        let certificate = WindowCertificate::compute(&epsilon, arity, &max_row_sum, &min_center_norm);
        Ok(Self {
            n: arity - 2,
            dim,
            clouds,
            centers,
            shift,
            t_map,
            s_map,
            s_inverse,
            epsilon,
            certificate,
        })
    }

    fn set_epsilon(&mut self, epsilon: Scalar) {
        self.certificate = WindowCertificate::compute(
            &epsilon,
            self.arity(),
            &self.certificate.max_row_sum,
            &self.certificate.min_center_norm,
        );
        self.epsilon = epsilon;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `n + 2`, the number of clouds and the dimension of the window cube.
    pub fn arity(&self) -> usize {
        self.n + 2
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn clouds(&self) -> &[Cloud] {
        &self.clouds
    }

    pub fn centers(&self) -> &[Point] {
        &self.centers
    }

    pub fn shift(&self) -> &Point {
        &self.shift
    }

    pub fn t_map(&self) -> &AffineMap {
        &self.t_map
    }

    pub fn s_map(&self) -> &ProjectiveMap {
        &self.s_map
    }

    pub fn s_inverse(&self) -> &ProjectiveMap {
        &self.s_inverse
    }

    pub fn epsilon(&self) -> &Scalar {
        &self.epsilon
    }

    pub fn certificate(&self) -> &WindowCertificate {
        &self.certificate
    }

    pub fn window(&self) -> OpenInterval {
        OpenInterval::symmetric(&self.epsilon)
    }

    fn in_window(&self, s: &Scalar) -> bool {
        self.window().contains(s)
    }

    fn check_window(&self, q: &Point) -> Result<()> {
        q.check_dim(self.arity())?;
        if q.coords().iter().all(|c| self.in_window(c)) {
            Ok(())
        } else {
            Err(Error::OutOfWindow { epsilon: fmt_scalar(&self.epsilon) })
        }
    }

    /// `x′ = E⁻¹(S⁻¹(E(q))) = q / (1 + Σq_j)`.
    pub fn window_image(&self, q: &Point) -> Result<Point> {
        self.check_window(q)?;
        let denom: Scalar = Scalar::one() + q.coords().iter().sum::<Scalar>();
        if denom.is_zero() {
            return Err(Error::AtInfinity);
        }
        Ok(q.scale(&denom.recip()))
    }

    /// Φ in closed form.
    pub fn phi(&self, q: &Point) -> Result<Point> {
        self.t_map.apply(&self.window_image(q)?)
    }

    /// Φ evaluated step by step through projective space.
    pub fn phi_stepwise(&self, q: &Point) -> Result<Point> {
        self.check_window(q)?;
        let lifted = self.s_inverse.apply(&embed(q))?;
        self.t_map.apply(&unembed(&lifted)?)
    }

    /// `q ∈ D_i` (zero-based `i`).
    pub fn d_membership(&self, i: usize, q: &Point) -> Result<bool> {
        let cloud = self.cloud(i)?;
        cloud.contains(&self.phi(q)?)
    }

    fn cloud(&self, i: usize) -> Result<&Cloud> {
        self.clouds.get(i).ok_or(Error::BadAxis { axis: i, arity: self.arity() })
    }

    fn check_line(&self, line: &AxisLine) -> Result<()> {
        if line.axis >= self.arity() {
            return Err(Error::BadAxis { axis: line.axis, arity: self.arity() });
        }
        self.check_window(&line.anchor)
    }

    /// `Φ ∘ ℓ` as `t ↦ (T·anchor + t·p_axis) / (1 + Σanchor + t)`.
    pub fn image_path(&self, line: &AxisLine) -> Result<RationalLine> {
        self.check_line(line)?;
        let s: Scalar = line.anchor.coords().iter().sum();
        RationalLine::new(
            self.t_map.apply(&line.anchor)?,
            self.centers[line.axis].clone(),
            Scalar::one() + s,
            Scalar::one(),
        )
    }

    /// `D_i ∩ ℓ`, counted over real parameters in the window.
    pub fn axis_line_intersection(&self, i: usize, line: &AxisLine) -> Result<LineIntersection> {
        let cloud = self.cloud(i)?;
        cloud.intersect_path(&self.image_path(line)?, &self.window())
    }

    /// Whether `S⁻¹(E(ℓ))` passes through `E(e_i)` and `Φ ∘ ℓ` runs along a
    /// line through `p_i`.
    pub fn parallel_to_point_check(&self, i: usize, line: &AxisLine) -> Result<bool> {
        self.check_line(line)?;
        self.cloud(i)?;
        let half = &self.epsilon / int(2);
        let (t0, t1) = (-half.clone(), half);
        let (q0, q1) = (line.point_at(&t0), line.point_at(&t1));
        let r0 = self.s_inverse.apply(&embed(&q0))?;
        let r1 = self.s_inverse.apply(&embed(&q1))?;
        let target = embed(&Point::basis(self.arity(), i));
        if !proj_collinear(&r0, &r1, &target)? {
            return Ok(false);
        }
        let (f0, f1) = (self.phi(&q0)?, self.phi(&q1)?);
        Ok(f0 != f1 && collinear(&[f0, f1, self.centers[i].clone()]))
    }

    pub fn section_bound(&self, i: usize) -> Option<usize> {
        self.clouds.get(i)?.section_bound().map(|(s, f)| 2 * s + f)
    }
}

/// Aggregate statistics for one axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxisStats {
    pub axis: usize,
    pub lines: usize,
    pub max_count: usize,
    pub bound: Option<usize>,
    pub infinite: usize,
    pub over_bound: usize,
    pub parallel_pass: usize,
}

#[derive(Clone, Debug)]
pub struct SchmerlReport {
    pub samples: usize,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub axes: Vec<AxisStats>,
}

impl SchmerlReport {
    pub fn all_passed(&self) -> bool {
        crate::check::all_passed(&self.checks)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn random_axis_line(inst: &SchmerlInstance, rng: &mut crate::sampling::SampleRng, axis: usize) -> AxisLine {
    let fixed = (0..inst.arity() - 1).map(|_| random_window_scalar(rng, inst.epsilon())).collect();
    AxisLine::new(axis, fixed).expect("axis in range")
}

/// Runs every proof obligation of the window transform on seeded samples.
/// `samples` window points are drawn for the pointwise checks and `samples`
/// lines per axis for the section checks. Failures become report entries.
pub fn verify_instance(inst: &SchmerlInstance, samples: usize, seed: u64) -> SchmerlReport {
    let mut rng = seeded_rng(seed);
    let arity = inst.arity();
    let eps = inst.epsilon().clone();
    let cert = inst.certificate();
    let mut checks = Vec::new();

    let origin = embed(&Point::zero(arity));
    let fixes = inst.s_map().apply(&origin).ok() == Some(origin.clone());
    checks.push(Check::from_witness(
        "s_fixes_origin",
        "S(E(0)) = E(0)",
        (!fixes).then(|| format!("S(E(0)) = {:?}", inst.s_map().apply(&origin))),
    ));
    let bad_axis = (0..arity).find(|&i| {
        inst.s_map().apply(&embed(&Point::basis(arity, i))).ok() != Some(axis_infinity(arity, i))
    });
    checks.push(Check::from_witness(
        "s_sends_basis_to_infinity",
        "S(E(e_i)) = inf_i for every axis",
        bad_axis.map(|i| format!("axis {}", i + 1)),
    ));

    let cond1_detail = format!(
        "1 - (n+2)eps = {} with eps = {}, bound 1/(n+2) = {}",
        fmt_scalar(&cert.condition1_margin),
        fmt_scalar(&eps),
        fmt_scalar(&cert.condition1_bound)
    );
    checks.push(Check::from_witness("condition1_certificate", cond1_detail, condition1_witness(inst)));

    let cond2_detail = match &cert.condition2_lhs {
        Some(lhs) => format!(
            "maxAbsRowSum(T) * eps/(1-(n+2)eps) = {} < min |p_i|_inf = {}",
            fmt_scalar(lhs),
            fmt_scalar(&cert.min_center_norm)
        ),
        None => "no finite bound on window images".to_string(),
    };
    checks.push(Check::from_witness(
        "condition2_certificate",
        cond2_detail,
        (!cert.condition2_holds).then(|| format!("eps = {} exceeds {}", fmt_scalar(&eps), fmt_scalar(&cert.condition2_bound))),
    ));

    let points: Vec<Point> = (0..samples).map(|_| random_window_point(&mut rng, arity, &eps)).collect();

    let mut chart_fail = None;
    let mut inject_fail = None;
    let mut phi_fail = None;
    for q in &points {
        let sum: Scalar = Scalar::one() + q.coords().iter().sum::<Scalar>();
        let lifted = inst.s_inverse().apply(&embed(q)).expect("dimension matches");
        if chart_fail.is_none() && (!sum.is_positive() || lifted.is_at_infinity()) {
            chart_fail = Some(format!("q = {q}, 1 + sum q = {}", fmt_scalar(&sum)));
        }
        let Ok(image) = inst.window_image(q) else { continue };
        if inject_fail.is_none() {
            for i in 0..arity {
                let v = &Point::basis(arity, i) - &image;
                if inst.t_map().apply(&v).expect("dimension matches").is_zero() {
                    inject_fail = Some(format!("T(e_{} - x') = 0 at x' = {image}", i + 1));
                    break;
                }
            }
        }
        if phi_fail.is_none() && inst.phi(q).ok() != inst.phi_stepwise(q).ok() {
            phi_fail = Some(format!("q = {q}"));
        }
    }
    checks.push(Check::from_witness(
        "condition1_samples",
        format!("S^-1(E(q)) in the affine chart for {} window points", points.len()),
        chart_fail,
    ));
    checks.push(Check::from_witness(
        "condition2_samples",
        format!("T(e_i - x') != 0 for {} window images and every axis", points.len()),
        inject_fail,
    ));
    checks.push(Check::from_witness(
        "phi_closed_form_matches_stepwise",
        format!("{} window points", points.len()),
        phi_fail,
    ));

    let mut axes = Vec::with_capacity(arity);
    for i in 0..arity {
        let bound = inst.section_bound(i);
        let mut stats =
            AxisStats { axis: i, lines: samples, max_count: 0, bound, infinite: 0, over_bound: 0, parallel_pass: 0 };
        let mut section_fail = None;
        let mut parallel_fail = None;
        for _ in 0..samples {
            let line = random_axis_line(inst, &mut rng, i);
            match inst.axis_line_intersection(i, &line) {
                Ok(LineIntersection::Finite(w)) => {
                    stats.max_count = stats.max_count.max(w.len());
                    if bound.is_some_and(|b| w.len() > b) {
                        stats.over_bound += 1;
                        section_fail.get_or_insert_with(|| format!("{} points on line anchored at {}", w.len(), line.anchor));
                    }
                }
                Ok(LineIntersection::Infinite(why)) => {
                    stats.infinite += 1;
                    section_fail.get_or_insert_with(|| format!("line anchored at {}: {why}", line.anchor));
                }
                Err(e) => {
                    stats.infinite += 1;
                    section_fail.get_or_insert_with(|| format!("line anchored at {}: {e}", line.anchor));
                }
            }
            match inst.parallel_to_point_check(i, &line) {
                Ok(true) => stats.parallel_pass += 1,
                Ok(false) => {
                    parallel_fail.get_or_insert_with(|| format!("line anchored at {}", line.anchor));
                }
                Err(e) => {
                    parallel_fail.get_or_insert_with(|| format!("line anchored at {}: {e}", line.anchor));
                }
            }
        }
        let bound_text = bound.map_or("finite".to_string(), |b| format!("<= {b}"));
        checks.push(Check::from_witness(
            format!("kuratowski_axis_{}", i + 1),
            format!("{samples} axis-{} lines, max |D_{} cap l| = {}, required {bound_text}", i + 1, i + 1, stats.max_count),
            section_fail,
        ));
        checks.push(Check::from_witness(
            format!("parallel_to_point_axis_{}", i + 1),
            format!("{}/{samples} lines map to lines through E(e_{})", stats.parallel_pass, i + 1),
            parallel_fail,
        ));
        axes.push(stats);
    }

    // the check must also reject: a line along axis 2 is not sent through E(e_1)
    let probe = AxisLine::new(1, vec![Scalar::zero(); arity - 1]).expect("arity >= 3");
    let rejects = matches!(inst.parallel_to_point_check(0, &probe), Ok(false));
    checks.push(Check::from_witness(
        "parallel_check_discriminates",
        "an axis-2 line through the origin is not sent to a line through E(e_1)",
        (!rejects).then(|| "mismatched axis accepted".to_string()),
    ));

    SchmerlReport { samples, seed, checks, axes }
}

/// A window point showing that condition 1 fails, if it does.
fn condition1_witness(inst: &SchmerlInstance) -> Option<String> {
    let cert = inst.certificate();
    if cert.condition1_holds {
        return None;
    }
    let k = int(inst.arity() as i64);
    if cert.condition1_margin.is_zero() {
        // at eps = 1/(n+2) the sum 1 + Σq has infimum 0 over the window
        let delta = inst.epsilon() * frac(1, 1024);
        let q = Point::new(vec![-inst.epsilon() + &delta; inst.arity()]);
        let sum = Scalar::one() + q.coords().iter().sum::<Scalar>();
        return Some(format!(
            "boundary: q = {q} lies in the window with 1 + sum q = {}; q_j -> -eps drives sum q -> -1 and S^-1(E(q)) to infinity",
            fmt_scalar(&sum)
        ));
    }
    let q = Point::new(vec![-k.recip(); inst.arity()]);
    Some(format!("q = {q} lies in the window and S^-1(E(q)) is at infinity"))
}
