//! Scene files: a line-oriented description of points, clouds and tasks.
//!
//! ```text
//! # a circle in the plane, extended to R^3
//! version 1
//! dimension 3
//! point o = (0, 0)
//! cloud circle sphere center=o radius_sq=1
//! task extend cloud=circle target_dim=3 offset=(0) samples=50
//! ```
//!
//! Values are exact rationals (`-3/2`, `7`), point literals `(1, 2/3)`, names,
//! booleans and bracketed lists `[a, (1, 0), b]`. Names must be declared before
//! use and are shared between points and clouds. `dimension` is the ambient
//! dimension of the scene; no point or cloud may exceed it.

use std::collections::BTreeMap;
use std::fmt;

use cloudcover::scalar::{fmt_scalar, parse_scalar};
use cloudcover::{extend, AffineMap, Cloud, ExtendOptions, Matrix, Point, Scalar};
use num_traits::{Signed, ToPrimitive};

pub const SCENE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Scalar(Scalar),
    Tuple(Vec<Scalar>),
    List(Vec<Value>),
    Name(String),
    Bool(bool),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Scalar(s) => write!(f, "{}", fmt_scalar(s)),
            Value::Tuple(cs) => write!(f, "({})", cs.iter().map(fmt_scalar).collect::<Vec<_>>().join(", ")),
            Value::List(vs) => write!(f, "[{}]", vs.iter().map(Value::to_string).collect::<Vec<_>>().join(", ")),
            Value::Name(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

pub type Params = Vec<(String, Value)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CloudKind {
    Finite,
    Sphere,
    Union,
    Extend,
    AffineImage,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TaskKind {
    Extend,
    Collineate,
    Projective,
    Schmerl,
    Decompose,
}

macro_rules! keyword_enum {
    ($ty:ident { $($variant:ident => $text:literal),* $(,)? }) => {
        impl $ty {
            pub const ALL: &'static [$ty] = &[$($ty::$variant),*];

            pub fn as_str(self) -> &'static str {
                match self { $($ty::$variant => $text),* }
            }

            pub fn parse(s: &str) -> Option<Self> {
                match s { $($text => Some($ty::$variant),)* _ => None }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

keyword_enum!(CloudKind { Finite => "finite", Sphere => "sphere", Union => "union", Extend => "extend", AffineImage => "affine_image" });
keyword_enum!(TaskKind { Extend => "extend", Collineate => "collineate", Projective => "projective", Schmerl => "schmerl", Decompose => "decompose" });

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CloudDecl {
    pub name: String,
    pub kind: CloudKind,
    pub params: Params,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskDecl {
    pub kind: TaskKind,
    pub params: Params,
}

impl fmt::Display for TaskDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "task {}{}", self.kind, fmt_params(&self.params))
    }
}

fn fmt_params(params: &Params) -> String {
    params.iter().map(|(k, v)| format!(" {k}={v}")).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scene {
    pub version: u32,
    pub dimension: usize,
    pub points: Vec<(String, Point)>,
    pub clouds: Vec<CloudDecl>,
    pub tasks: Vec<TaskDecl>,
}

impl fmt::Display for Scene {
    /// Canonical text: header, then points, clouds and tasks in order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "version {}", self.version)?;
        writeln!(f, "dimension {}", self.dimension)?;
        for (name, p) in &self.points {
            writeln!(f, "point {name} = {}", Value::Tuple(p.coords().to_vec()))?;
        }
        for c in &self.clouds {
            writeln!(f, "cloud {} {}{}", c.name, c.kind, fmt_params(&c.params))?;
        }
        for t in &self.tasks {
            writeln!(f, "{t}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax(String),
    UnknownName(String),
    BadRational(String),
    DimensionMismatch(String),
    /// Well-formed but rejected by the geometry (negative radius, singular
    /// matrix, a base that is not a cloud, …).
    Invalid(String),
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            ErrorKind::UnknownName(n) => write!(f, "unknown name `{n}`"),
            ErrorKind::BadRational(t) => write!(f, "bad rational `{t}` (expected p/q or an integer)"),
            ErrorKind::DimensionMismatch(m) => write!(f, "dimension mismatch: {m}"),
            ErrorKind::Invalid(m) => write!(f, "invalid: {m}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SceneError {
    pub line: usize,
    pub column: usize,
    pub kind: ErrorKind,
}

impl fmt::Display for SceneError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.kind)
    }
}

impl std::error::Error for SceneError {}

fn syntax(m: impl Into<String>) -> ErrorKind {
    ErrorKind::Syntax(m.into())
}

// ---------------------------------------------------------------- tokens ---

#[derive(Clone, Debug)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

/// Splits on whitespace outside brackets; `#` at depth 0 starts a comment.
fn tokenize(line: &str) -> Result<Vec<Token<'_>>, (usize, ErrorKind)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start: Option<usize> = None;
    for (i, ch) in line.char_indices() {
        match ch {
            '#' if depth == 0 => {
                if let Some(s) = start.take() {
                    out.push(Token { text: &line[s..i], column: s + 1 });
                }
                return Ok(out);
            }
            c if c.is_whitespace() && depth == 0 => {
                if let Some(s) = start.take() {
                    out.push(Token { text: &line[s..i], column: s + 1 });
                }
            }
            c => {
                start.get_or_insert(i);
                match c {
                    '(' | '[' => depth += 1,
                    ')' | ']' => {
                        depth -= 1;
                        if depth < 0 {
                            return Err((i + 1, syntax(format!("unbalanced `{c}`"))));
                        }
                    }
                    _ => {}
                }
            }
        }
    }
    if depth != 0 {
        return Err((line.len() + 1, syntax("unclosed bracket")));
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], column: s + 1 });
    }
    Ok(out)
}

/// Top-level comma split of the inside of a bracket pair, with byte offsets.
fn split_items(inner: &str) -> Result<Vec<(usize, &str)>, (usize, ErrorKind)> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    for (i, ch) in inner.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push((start, &inner[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push((start, &inner[start..]));
    let trimmed: Vec<(usize, &str)> = out
        .into_iter()
        .map(|(off, s)| (off + (s.len() - s.trim_start().len()), s.trim()))
        .collect();
    if trimmed.len() == 1 && trimmed[0].1.is_empty() {
        return Ok(vec![]);
    }
    if let Some((off, _)) = trimmed.iter().find(|(_, s)| s.is_empty()) {
        return Err((*off, syntax("empty list item")));
    }
    Ok(trimmed)
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses a value; errors carry a byte offset into `text`.
fn parse_value(text: &str) -> Result<Value, (usize, ErrorKind)> {
    let shift = |off: usize| move |(o, k): (usize, ErrorKind)| (o + off, k);
    if let Some(inner) = text.strip_prefix('(') {
        let inner = inner.strip_suffix(')').ok_or((0, syntax("missing `)`")))?;
        let items = split_items(inner).map_err(shift(1))?;
        if items.is_empty() {
            return Err((0, syntax("empty point")));
        }
        let coords = items
            .into_iter()
            .map(|(off, s)| parse_scalar(s).ok_or((off + 1, ErrorKind::BadRational(s.to_string()))))
            .collect::<Result<_, _>>()?;
        return Ok(Value::Tuple(coords));
    }
    if let Some(inner) = text.strip_prefix('[') {
        let inner = inner.strip_suffix(']').ok_or((0, syntax("missing `]`")))?;
        let items = split_items(inner).map_err(shift(1))?;
        let values = items
            .into_iter()
            .map(|(off, s)| parse_value(s).map_err(shift(off + 1)))
            .collect::<Result<_, _>>()?;
        return Ok(Value::List(values));
    }
    match text {
        "true" => return Ok(Value::Bool(true)),
        "false" => return Ok(Value::Bool(false)),
        _ => {}
    }
    if text.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+' || c == '.') {
        return parse_scalar(text).map(Value::Scalar).ok_or((0, ErrorKind::BadRational(text.to_string())));
    }
    if is_identifier(text) {
        return Ok(Value::Name(text.to_string()));
    }
    Err((0, syntax(format!("unexpected `{text}`"))))
}

// ------------------------------------------------------------- resolving ---

/// Points and clouds of a scene, built.
#[derive(Clone, Debug, Default)]
pub struct Env {
    pub dimension: usize,
    pub points: BTreeMap<String, Point>,
    pub clouds: BTreeMap<String, Cloud>,
}

/// An error tied to one parameter (or the whole declaration when `key` is
/// `None`); the parser turns the key into a column.
#[derive(Debug)]
struct ParamError {
    key: Option<String>,
    kind: ErrorKind,
}

type PResult<T> = Result<T, ParamError>;

fn at(key: &str, kind: ErrorKind) -> ParamError {
    ParamError { key: Some(key.to_string()), kind }
}

struct Args<'a> {
    params: &'a Params,
}

impl<'a> Args<'a> {
    fn new(params: &'a Params, allowed: &[&str], what: &str) -> PResult<Self> {
        for (i, (k, _)) in params.iter().enumerate() {
            if !allowed.contains(&k.as_str()) {
                return Err(at(k, syntax(format!("unknown key `{k}` for {what} (expected one of {})", allowed.join(", ")))));
            }
            if params[..i].iter().any(|(j, _)| j == k) {
                return Err(at(k, syntax(format!("duplicate key `{k}`"))));
            }
        }
        Ok(Self { params })
    }

    fn get(&self, key: &str) -> Option<&'a Value> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    fn require(&self, key: &str) -> PResult<&'a Value> {
        self.get(key).ok_or(ParamError { key: None, kind: syntax(format!("missing required key `{key}`")) })
    }
}

impl Env {
    fn point(&self, key: &str, v: &Value) -> PResult<Point> {
        let p = match v {
            Value::Tuple(cs) => Point::new(cs.clone()),
            Value::Name(n) => {
                self.points.get(n).cloned().ok_or_else(|| at(key, ErrorKind::UnknownName(n.clone())))?
            }
            other => return Err(at(key, syntax(format!("`{key}` expects a point, got `{other}`")))),
        };
        if p.dim() > self.dimension {
            return Err(at(key, ErrorKind::DimensionMismatch(format!("point {p} exceeds scene dimension {}", self.dimension))));
        }
        Ok(p)
    }

    fn point_of_dim(&self, key: &str, v: &Value, dim: usize) -> PResult<Point> {
        let p = self.point(key, v)?;
        if p.dim() != dim {
            return Err(at(key, ErrorKind::DimensionMismatch(format!("expected a point of R^{dim}, got {p}"))));
        }
        Ok(p)
    }

    fn cloud(&self, key: &str, v: &Value) -> PResult<Cloud> {
        match v {
            Value::Name(n) => {
                self.clouds.get(n).cloned().ok_or_else(|| at(key, ErrorKind::UnknownName(n.clone())))
            }
            other => Err(at(key, syntax(format!("`{key}` expects a cloud name, got `{other}`")))),
        }
    }

    fn list<'v>(&self, key: &str, v: &'v Value) -> PResult<&'v [Value]> {
        match v {
            Value::List(items) => Ok(items),
            other => Err(at(key, syntax(format!("`{key}` expects a list, got `{other}`")))),
        }
    }

    fn points(&self, key: &str, v: &Value) -> PResult<Vec<Point>> {
        self.list(key, v)?.iter().map(|item| self.point(key, item)).collect()
    }

    fn clouds(&self, key: &str, v: &Value) -> PResult<Vec<Cloud>> {
        self.list(key, v)?.iter().map(|item| self.cloud(key, item)).collect()
    }

    fn has_name(&self, n: &str) -> bool {
        self.points.contains_key(n) || self.clouds.contains_key(n)
    }
}

fn scalar(key: &str, v: &Value) -> PResult<Scalar> {
    match v {
        Value::Scalar(s) => Ok(s.clone()),
        other => Err(at(key, syntax(format!("`{key}` expects a rational, got `{other}`")))),
    }
}

fn scalars(key: &str, v: &Value) -> PResult<Vec<Scalar>> {
    match v {
        Value::List(items) => items.iter().map(|i| scalar(key, i)).collect(),
        other => Err(at(key, syntax(format!("`{key}` expects a list of rationals, got `{other}`")))),
    }
}

fn count(key: &str, v: &Value) -> PResult<usize> {
    let s = scalar(key, v)?;
    if !s.is_integer() || s.is_negative() {
        return Err(at(key, syntax(format!("`{key}` expects a nonnegative integer, got {}", fmt_scalar(&s)))));
    }
    s.to_integer().to_usize().ok_or_else(|| at(key, syntax(format!("`{key}` is too large"))))
}

fn seed(key: &str, v: &Value) -> PResult<u64> {
    let s = scalar(key, v)?;
    if !s.is_integer() || s.is_negative() {
        return Err(at(key, syntax(format!("`{key}` expects a nonnegative integer"))));
    }
    s.to_integer().to_u64().ok_or_else(|| at(key, syntax(format!("`{key}` is too large"))))
}

fn boolean(key: &str, v: &Value) -> PResult<bool> {
    match v {
        Value::Bool(b) => Ok(*b),
        other => Err(at(key, syntax(format!("`{key}` expects true or false, got `{other}`")))),
    }
}

fn homogeneous(key: &str, v: &Value) -> PResult<Vec<Vec<Scalar>>> {
    match v {
        Value::List(items) => items
            .iter()
            .map(|i| match i {
                Value::Tuple(cs) => Ok(cs.clone()),
                other => Err(at(key, syntax(format!("`{key}` expects coordinate tuples, got `{other}`")))),
            })
            .collect(),
        other => Err(at(key, syntax(format!("`{key}` expects a list of tuples, got `{other}`")))),
    }
}

fn invalid(key: Option<&str>, e: cloudcover::Error) -> ParamError {
    let kind = match e {
        cloudcover::Error::DimensionMismatch { .. } | cloudcover::Error::BadDimensions { .. } => {
            ErrorKind::DimensionMismatch(e.to_string())
        }
        other => ErrorKind::Invalid(other.to_string()),
    };
    ParamError { key: key.map(str::to_string), kind }
}

fn build_cloud(env: &Env, kind: CloudKind, params: &Params) -> PResult<Cloud> {
    let what = format!("{kind} clouds");
    let cloud = match kind {
        CloudKind::Finite => {
            let a = Args::new(params, &["center", "points", "puncture"], &what)?;
            let center = env.point("center", a.require("center")?)?;
            let pts = match a.get("points") {
                Some(v) => env.points("points", v)?,
                None => vec![],
            };
            if let Some(bad) = pts.iter().find(|p| p.dim() != center.dim()) {
                return Err(at("points", ErrorKind::DimensionMismatch(format!("{bad} is not in R^{}", center.dim()))));
            }
            Cloud::finite(center, pts).map_err(|e| invalid(Some("points"), e))?
        }
        CloudKind::Sphere => {
            let a = Args::new(params, &["center", "radius_sq", "puncture"], &what)?;
            let center = env.point("center", a.require("center")?)?;
            let r2 = scalar("radius_sq", a.require("radius_sq")?)?;
            Cloud::sphere(center, r2).map_err(|e| invalid(Some("radius_sq"), e))?
        }
        CloudKind::Union => {
            let a = Args::new(params, &["center", "parts", "puncture"], &what)?;
            let center = env.point("center", a.require("center")?)?;
            let parts = env.clouds("parts", a.require("parts")?)?;
            if let Some(bad) = parts.iter().find(|c| c.dim() != center.dim()) {
                return Err(at("parts", ErrorKind::DimensionMismatch(format!("part of dimension {} in a union in R^{}", bad.dim(), center.dim()))));
            }
            Cloud::union(center, parts).map_err(|e| invalid(Some("parts"), e))?
        }
        CloudKind::Extend => {
            let a = Args::new(params, &["base", "target_dim", "offset", "auto_puncture", "checked", "puncture"], &what)?;
            let base = env.cloud("base", a.require("base")?)?;
            let target = match a.get("target_dim") {
                Some(v) => count("target_dim", v)?,
                None => env.dimension,
            };
            if target > env.dimension || target <= base.dim() {
                return Err(at(
                    "target_dim",
                    ErrorKind::DimensionMismatch(format!(
                        "cannot extend from R^{} to R^{target} in a scene of dimension {}",
                        base.dim(),
                        env.dimension
                    )),
                ));
            }
            let offset = match a.get("offset") {
                Some(v) => env.point_of_dim("offset", v, target - base.dim())?,
                None => Point::zero(target - base.dim()),
            };
            let auto = a.get("auto_puncture").map(|v| boolean("auto_puncture", v)).transpose()?.unwrap_or(true);
            let checked = a.get("checked").map(|v| boolean("checked", v)).transpose()?.unwrap_or(true);
            if checked {
                extend(&base, target, &offset, ExtendOptions { auto_puncture: auto }).map_err(|e| invalid(Some("base"), e))?
            } else {
                Cloud::cylinder(base, offset).map_err(|e| invalid(Some("base"), e))?
            }
        }
        CloudKind::AffineImage => {
            let a = Args::new(params, &["base", "matrix", "translation", "puncture"], &what)?;
            let base = env.cloud("base", a.require("base")?)?;
            let rows = homogeneous("matrix", a.require("matrix")?)?;
            let m = Matrix::from_rows(rows).map_err(|e| invalid(Some("matrix"), e))?;
            if m.rows() != base.dim() || m.cols() != base.dim() {
                return Err(at(
                    "matrix",
                    ErrorKind::DimensionMismatch(format!("{}x{} matrix for a cloud in R^{}", m.rows(), m.cols(), base.dim())),
                ));
            }
            let t = match a.get("translation") {
                Some(v) => env.point_of_dim("translation", v, base.dim())?,
                None => Point::zero(base.dim()),
            };
            let map = AffineMap::new(m, t).map_err(|e| invalid(Some("matrix"), e))?;
            Cloud::affine_image(map, base).map_err(|e| invalid(Some("matrix"), e))?
        }
    };
    let mut cloud = cloud;
    if let Some(v) = params.iter().find(|(k, _)| k == "puncture").map(|(_, v)| v) {
        for p in env.points("puncture", v)? {
            cloud = cloud.punctured(p).map_err(|e| invalid(Some("puncture"), e))?;
        }
    }
    Ok(cloud)
}

/// A task with every reference resolved.
#[derive(Clone, Debug)]
pub enum Task {
    Extend { cloud: Cloud, target_dim: usize, offset: Point, samples: Option<usize>, seed: Option<u64> },
    Collineate { points: Vec<Point>, clouds: Option<Vec<Cloud>>, circles: Option<Vec<Scalar>>, samples: Option<usize>, seed: Option<u64> },
    Projective { from: Option<Vec<Vec<Scalar>>>, to: Option<Vec<Vec<Scalar>>>, n: Option<usize>, samples: Option<usize>, seed: Option<u64> },
    Schmerl { clouds: Vec<Cloud>, epsilon: Option<Scalar>, samples: Option<usize>, seed: Option<u64> },
    Decompose { source: DecomposeSource, prefix: usize, budget: Option<u128> },
}

#[derive(Clone, Debug)]
pub enum DecomposeSource {
    /// The index-comparison rule over `{0, …, prefix−1}`, padded to `n + 2` sets.
    Sierpinski { n: usize },
    /// Window sets of a window-transform instance over window rationals.
    Window { clouds: Vec<Cloud>, epsilon: Option<Scalar> },
}

fn sample_args(a: &Args) -> PResult<(Option<usize>, Option<u64>)> {
    Ok((a.get("samples").map(|v| count("samples", v)).transpose()?, a.get("seed").map(|v| seed("seed", v)).transpose()?))
}

fn build_task(env: &Env, kind: TaskKind, params: &Params) -> PResult<Task> {
    let what = format!("{kind} tasks");
    Ok(match kind {
        TaskKind::Extend => {
            let a = Args::new(params, &["cloud", "target_dim", "offset", "samples", "seed"], &what)?;
            let cloud = env.cloud("cloud", a.require("cloud")?)?;
            let target_dim = match a.get("target_dim") {
                Some(v) => count("target_dim", v)?,
                None => env.dimension,
            };
            if target_dim > env.dimension || target_dim <= cloud.dim() {
                return Err(at("target_dim", ErrorKind::DimensionMismatch(format!("cannot extend from R^{} to R^{target_dim}", cloud.dim()))));
            }
            let offset = match a.get("offset") {
                Some(v) => env.point_of_dim("offset", v, target_dim - cloud.dim())?,
                None => Point::zero(target_dim - cloud.dim()),
            };
            let (samples, seed) = sample_args(&a)?;
            Task::Extend { cloud, target_dim, offset, samples, seed }
        }
        TaskKind::Collineate => {
            let a = Args::new(params, &["points", "clouds", "circles", "samples", "seed"], &what)?;
            let points = env.points("points", a.require("points")?)?;
            if let Some(first) = points.first() {
                if let Some(bad) = points.iter().find(|p| p.dim() != first.dim()) {
                    return Err(at("points", ErrorKind::DimensionMismatch(format!("{bad} is not in R^{}", first.dim()))));
                }
            }
            let clouds = a.get("clouds").map(|v| env.clouds("clouds", v)).transpose()?;
            let circles = a.get("circles").map(|v| scalars("circles", v)).transpose()?;
            if clouds.is_some() && circles.is_some() {
                return Err(at("circles", syntax("give either `clouds` or `circles`, not both")));
            }
            for (key, len) in [("clouds", clouds.as_ref().map(Vec::len)), ("circles", circles.as_ref().map(Vec::len))] {
                if len.is_some_and(|l| l != points.len()) {
                    return Err(at(key, ErrorKind::DimensionMismatch(format!("{} entries for {} points", len.unwrap(), points.len()))));
                }
            }
            if let Some(bad) = clouds.iter().flatten().find(|c| c.dim() != 2) {
                return Err(at("clouds", ErrorKind::DimensionMismatch(format!("planar clouds expected, got one in R^{}", bad.dim()))));
            }
            let (samples, seed) = sample_args(&a)?;
            Task::Collineate { points, clouds, circles, samples, seed }
        }
        TaskKind::Projective => {
            let a = Args::new(params, &["from", "to", "n", "samples", "seed"], &what)?;
            let from = a.get("from").map(|v| homogeneous("from", v)).transpose()?;
            let to = a.get("to").map(|v| homogeneous("to", v)).transpose()?;
            let n = a.get("n").map(|v| count("n", v)).transpose()?;
            if from.is_some() != to.is_some() {
                return Err(ParamError { key: None, kind: syntax("`from` and `to` go together") });
            }
            if from.is_none() && n.is_none() {
                return Err(ParamError { key: None, kind: syntax("projective tasks need `from`/`to` or `n`") });
            }
            if let (Some(f), Some(t)) = (&from, &to) {
                let m = f.first().map_or(0, Vec::len);
                if f.len() != m || t.len() != m || f.iter().chain(t).any(|v| v.len() != m) {
                    return Err(at("to", ErrorKind::DimensionMismatch(format!("frames need {m} vectors of length {m}"))));
                }
            }
            let (samples, seed) = sample_args(&a)?;
            Task::Projective { from, to, n, samples, seed }
        }
        TaskKind::Schmerl => {
            let a = Args::new(params, &["clouds", "epsilon", "samples", "seed"], &what)?;
            let clouds = env.clouds("clouds", a.require("clouds")?)?;
            check_same_dim(&clouds)?;
            let epsilon = a.get("epsilon").map(|v| scalar("epsilon", v)).transpose()?;
            let (samples, seed) = sample_args(&a)?;
            Task::Schmerl { clouds, epsilon, samples, seed }
        }
        TaskKind::Decompose => {
            let a = Args::new(params, &["prefix", "n", "clouds", "epsilon", "budget"], &what)?;
            let prefix = count("prefix", a.require("prefix")?)?;
            let budget = a.get("budget").map(|v| count("budget", v).map(|b| b as u128)).transpose()?;
            let source = match a.get("clouds") {
                Some(v) => {
                    if a.get("n").is_some() {
                        return Err(at("n", syntax("`n` is implied by the number of clouds")));
                    }
                    let clouds = env.clouds("clouds", v)?;
                    check_same_dim(&clouds)?;
                    DecomposeSource::Window { clouds, epsilon: a.get("epsilon").map(|v| scalar("epsilon", v)).transpose()? }
                }
                None => {
                    if a.get("epsilon").is_some() {
                        return Err(at("epsilon", syntax("`epsilon` needs `clouds`")));
                    }
                    DecomposeSource::Sierpinski { n: a.get("n").map(|v| count("n", v)).transpose()?.unwrap_or(0) }
                }
            };
            Task::Decompose { source, prefix, budget }
        }
    })
}

fn check_same_dim(clouds: &[Cloud]) -> PResult<()> {
    if let Some(first) = clouds.first() {
        if clouds.iter().any(|c| c.dim() != first.dim()) {
            return Err(at("clouds", ErrorKind::DimensionMismatch("clouds of different dimensions".into())));
        }
    }
    Ok(())
}

/// Where each declaration and each of its parameters sits in the source.
struct Located {
    line: usize,
    column: usize,
    keys: Vec<usize>,
}

impl Located {
    fn error(&self, params: &Params, e: ParamError) -> SceneError {
        let column = e
            .key
            .and_then(|k| params.iter().position(|(p, _)| *p == k))
            .map_or(self.column, |i| self.keys[i]);
        SceneError { line: self.line, column, kind: e.kind }
    }
}

/// A scene together with its built points, clouds and tasks.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub env: Env,
    pub tasks: Vec<Task>,
}

fn resolve_located(
    scene: &Scene,
    point_locs: &[Located],
    cloud_locs: &[Located],
    task_locs: &[Located],
    errors: &mut Vec<SceneError>,
) -> Resolved {
    let mut env = Env { dimension: scene.dimension, ..Env::default() };
    for ((name, p), loc) in scene.points.iter().zip(point_locs) {
        if env.has_name(name) {
            errors.push(SceneError { line: loc.line, column: loc.column, kind: syntax(format!("duplicate name `{name}`")) });
        } else if p.dim() > scene.dimension || p.dim() == 0 {
            errors.push(SceneError {
                line: loc.line,
                column: loc.column,
                kind: ErrorKind::DimensionMismatch(format!("point {p} in a scene of dimension {}", scene.dimension)),
            });
        } else {
            env.points.insert(name.clone(), p.clone());
        }
    }
    for (decl, loc) in scene.clouds.iter().zip(cloud_locs) {
        if env.has_name(&decl.name) {
            errors.push(SceneError { line: loc.line, column: loc.column, kind: syntax(format!("duplicate name `{}`", decl.name)) });
            continue;
        }
        match build_cloud(&env, decl.kind, &decl.params) {
            Ok(c) => {
                env.clouds.insert(decl.name.clone(), c);
            }
            Err(e) => errors.push(loc.error(&decl.params, e)),
        }
    }
    let mut tasks = Vec::new();
    for (decl, loc) in scene.tasks.iter().zip(task_locs) {
        match build_task(&env, decl.kind, &decl.params) {
            Ok(t) => tasks.push(t),
            Err(e) => errors.push(loc.error(&decl.params, e)),
        }
    }
    Resolved { env, tasks }
}

impl Scene {
    /// Builds every cloud and task. Locations refer to the canonical printed
    /// form, which is how a parsed scene is laid out after [`Scene::to_string`].
    pub fn resolve(&self) -> Result<Resolved, Vec<SceneError>> {
        let mut line = 2;
        let mut next = |n: usize| {
            line += 1;
            Located { line, column: 1, keys: vec![1; n] }
        };
        let points: Vec<Located> = self.points.iter().map(|_| next(0)).collect();
        let clouds: Vec<Located> = self.clouds.iter().map(|c| next(c.params.len())).collect();
        let tasks: Vec<Located> = self.tasks.iter().map(|t| next(t.params.len())).collect();
        let mut errors = Vec::new();
        let r = resolve_located(self, &points, &clouds, &tasks, &mut errors);
        if errors.is_empty() {
            Ok(r)
        } else {
            Err(errors)
        }
    }
}

fn parse_params<'a>(tokens: &[Token<'a>], line: usize, errors: &mut Vec<SceneError>) -> Option<(Params, Vec<usize>)> {
    let mut params = Vec::new();
    let mut cols = Vec::new();
    let mut ok = true;
    for tok in tokens {
        let Some((k, v)) = tok.text.split_once('=') else {
            errors.push(SceneError { line, column: tok.column, kind: syntax(format!("expected key=value, got `{}`", tok.text)) });
            ok = false;
            continue;
        };
        if !is_identifier(k) {
            errors.push(SceneError { line, column: tok.column, kind: syntax(format!("bad key `{k}`")) });
            ok = false;
            continue;
        }
        match parse_value(v) {
            Ok(value) => {
                params.push((k.to_string(), value));
                cols.push(tok.column);
            }
            Err((off, kind)) => {
                errors.push(SceneError { line, column: tok.column + k.len() + 1 + off, kind });
                ok = false;
            }
        }
    }
    ok.then_some((params, cols))
}

/// Parses and validates a scene, reporting every error found.
pub fn parse_scene(text: &str) -> Result<Scene, Vec<SceneError>> {
    parse_resolved(text).map(|(s, _)| s)
}

/// [`parse_scene`], also returning the built objects.
pub fn parse_resolved(text: &str) -> Result<(Scene, Resolved), Vec<SceneError>> {
    let mut errors = Vec::new();
    let mut version: Option<u32> = None;
    let mut dimension: Option<usize> = None;
    let mut scene = Scene { version: SCENE_VERSION, dimension: 0, points: vec![], clouds: vec![], tasks: vec![] };
    let (mut point_locs, mut cloud_locs, mut task_locs) = (vec![], vec![], vec![]);

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let tokens = match tokenize(raw) {
            Ok(t) => t,
            Err((column, kind)) => {
                errors.push(SceneError { line, column, kind });
                continue;
            }
        };
        let Some(head) = tokens.first() else { continue };
        let err = |column: usize, kind: ErrorKind| SceneError { line, column, kind };
        let header_needed = version.is_none() || dimension.is_none();
        match head.text {
            "version" | "dimension" => {
                let [_, value] = tokens.as_slice() else {
                    errors.push(err(head.column, syntax(format!("`{}` takes one integer", head.text))));
                    continue;
                };
                let Some(n) = value.text.parse::<usize>().ok() else {
                    errors.push(err(value.column, syntax(format!("expected an integer, got `{}`", value.text))));
                    continue;
                };
                let slot_taken = if head.text == "version" { version.is_some() } else { dimension.is_some() };
                if slot_taken {
                    errors.push(err(head.column, syntax(format!("repeated `{}`", head.text))));
                } else if head.text == "version" {
                    if n != SCENE_VERSION as usize {
                        errors.push(err(value.column, syntax(format!("unsupported version {n} (this reader handles {SCENE_VERSION})"))));
                    }
                    version = Some(n as u32);
                } else {
                    if n < 2 {
                        errors.push(err(value.column, ErrorKind::DimensionMismatch("scene dimension must be at least 2".into())));
                    }
                    dimension = Some(n);
                }
            }
            _ if header_needed => {
                errors.push(err(head.column, syntax("`version` and `dimension` must come first")));
                break;
            }
            "point" => {
                let [_, name, eq, value] = tokens.as_slice() else {
                    errors.push(err(head.column, syntax("expected `point NAME = (x, y, ...)`")));
                    continue;
                };
                if !is_identifier(name.text) {
                    errors.push(err(name.column, syntax(format!("bad name `{}`", name.text))));
                    continue;
                }
                if eq.text != "=" {
                    errors.push(err(eq.column, syntax("expected `=`")));
                    continue;
                }
                match parse_value(value.text) {
                    Ok(Value::Tuple(cs)) => {
                        scene.points.push((name.text.to_string(), Point::new(cs)));
                        point_locs.push(Located { line, column: name.column, keys: vec![] });
                    }
                    Ok(other) => errors.push(err(value.column, syntax(format!("expected a point literal, got `{other}`")))),
                    Err((off, kind)) => errors.push(err(value.column + off, kind)),
                }
            }
            "cloud" => {
                if tokens.len() < 3 {
                    errors.push(err(head.column, syntax("expected `cloud NAME KIND key=value ...`")));
                    continue;
                }
                let (name, kind) = (&tokens[1], &tokens[2]);
                if !is_identifier(name.text) {
                    errors.push(err(name.column, syntax(format!("bad name `{}`", name.text))));
                    continue;
                }
                let Some(kind_v) = CloudKind::parse(kind.text) else {
                    let expected: Vec<&str> = CloudKind::ALL.iter().map(|k| k.as_str()).collect();
                    errors.push(err(kind.column, syntax(format!("unknown cloud kind `{}` (expected {})", kind.text, expected.join(", ")))));
                    continue;
                };
                if let Some((params, keys)) = parse_params(&tokens[3..], line, &mut errors) {
                    scene.clouds.push(CloudDecl { name: name.text.to_string(), kind: kind_v, params });
                    cloud_locs.push(Located { line, column: name.column, keys });
                }
            }
            "task" => {
                let Some(kind) = tokens.get(1) else {
                    errors.push(err(head.column, syntax("expected `task KIND key=value ...`")));
                    continue;
                };
                let Some(kind_v) = TaskKind::parse(kind.text) else {
                    let expected: Vec<&str> = TaskKind::ALL.iter().map(|k| k.as_str()).collect();
                    errors.push(err(kind.column, syntax(format!("unknown task `{}` (expected {})", kind.text, expected.join(", ")))));
                    continue;
                };
                if let Some((params, keys)) = parse_params(&tokens[2..], line, &mut errors) {
                    scene.tasks.push(TaskDecl { kind: kind_v, params });
                    task_locs.push(Located { line, column: kind.column, keys });
                }
            }
            other => errors.push(err(head.column, syntax(format!("unknown statement `{other}`")))),
        }
    }
    match (version, dimension) {
        (Some(v), Some(d)) => {
            scene.version = v;
            scene.dimension = d;
        }
        _ if errors.is_empty() => {
            errors.push(SceneError { line: 1, column: 1, kind: syntax("missing `version` or `dimension` header") });
        }
        _ => {}
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    let resolved = resolve_located(&scene, &point_locs, &cloud_locs, &task_locs, &mut errors);
    if errors.is_empty() {
        Ok((scene, resolved))
    } else {
        Err(errors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cloudcover::scalar::frac;

    const MINIMAL: &str = "version 1\ndimension 3\npoint o = (0, 0)\ncloud c sphere center=o radius_sq=1\ntask extend cloud=c target_dim=3\n";

    #[test]
    fn minimal_scene_parses() {
        let s = parse_scene(MINIMAL).unwrap();
        assert_eq!(s.dimension, 3);
        assert_eq!(s.clouds.len(), 1);
        assert_eq!(s.tasks[0].kind, TaskKind::Extend);
        assert_eq!(s.to_string(), MINIMAL);
    }

    #[test]
    fn exact_radius() {
        let s = parse_scene("version 1\ndimension 2\ncloud c sphere center=(0, 0) radius_sq=1/3\n").unwrap();
        assert_eq!(s.clouds[0].params[1].1, Value::Scalar(frac(1, 3)));
    }

    #[test]
    fn unknown_name_located() {
        let e = parse_scene("version 1\ndimension 2\ncloud c sphere center=p9 radius_sq=1\n").unwrap_err();
        assert_eq!(e, vec![SceneError { line: 3, column: 16, kind: ErrorKind::UnknownName("p9".into()) }]);
    }

    #[test]
    fn bad_rationals_located() {
        let e = parse_scene("version 1\ndimension 2\npoint a = (1, 0.5)\ncloud c sphere center=(0,0) radius_sq=1/0\n").unwrap_err();
        assert_eq!(e[0], SceneError { line: 3, column: 15, kind: ErrorKind::BadRational("0.5".into()) });
        assert_eq!(e[1], SceneError { line: 4, column: 39, kind: ErrorKind::BadRational("1/0".into()) });
    }

    #[test]
    fn dimension_errors() {
        let e = parse_scene("version 1\ndimension 2\npoint a = (1, 2, 3)\n").unwrap_err();
        assert!(matches!(e[0].kind, ErrorKind::DimensionMismatch(_)));
        let e = parse_scene("version 1\ndimension 3\ncloud a sphere center=(0,0) radius_sq=1\ncloud b sphere center=(0,0,0) radius_sq=1\ncloud u union center=(0,0) parts=[a, b]\n")
            .unwrap_err();
        assert_eq!((e[0].line, e[0].column), (5, 28));
        assert!(matches!(e[0].kind, ErrorKind::DimensionMismatch(_)));
    }

    #[test]
    fn syntax_errors() {
        let e = parse_scene("dimension 2\nversion 1\n").unwrap();
        assert_eq!(e.version, 1);
        let e = parse_scene("version 1\ndimension 2\ncloud a blob\n").unwrap_err();
        assert_eq!((e[0].line, e[0].column), (3, 9));
        let e = parse_scene("version 1\ndimension 2\ncloud a sphere center=(0,0 radius_sq=1\n").unwrap_err();
        assert!(matches!(e[0].kind, ErrorKind::Syntax(_)));
        let e = parse_scene("version 1\ndimension 2\ncloud a sphere center=(0,0) radius=1\n").unwrap_err();
        assert_eq!(e[0].column, 29);
        let e = parse_scene("point a = (1, 2)\n").unwrap_err();
        assert_eq!(e[0].line, 1);
    }

    #[test]
    fn comments_and_lists() {
        let text = "# header\nversion 1 # trailing\ndimension 2\npoint a = ( 1 , -2/4 )\ncloud f finite center=a points=[ (0, 0), a ]\n";
        let s = parse_scene(text).unwrap();
        assert_eq!(s.points[0].1, Point::new(vec![frac(1, 1), frac(-1, 2)]));
        let again = parse_scene(&s.to_string()).unwrap();
        assert_eq!(again, s);
    }

    #[test]
    fn noncloud_extension_rejected() {
        let text = "version 1\ndimension 3\ncloud e sphere center=(0,0) radius_sq=1\ncloud x extend base=e offset=(0)\ncloud y extend base=x target_dim=3\n";
        let e = parse_scene(text).unwrap_err();
        assert_eq!(e[0].line, 5);
        let text = "version 1\ndimension 3\ncloud c sphere center=(0,0) radius_sq=0\ncloud x extend base=c auto_puncture=false\n";
        let e = parse_scene(text).unwrap_err();
        assert!(matches!(e[0].kind, ErrorKind::Invalid(_)));
    }
}
