//! Kuratowski-style decompositions of `X^{n+2}` for enumerated countable `X`,
//! and an exhaustive verifier of the finite-line condition on finite prefixes.
//!
//! The constructor here is the standard index-comparison rule (often credited
//! to Sierpiński): `D₁ = {idx q₁ ≤ idx q₂}`, `D₂ = {idx q₂ < idx q₁}`, and the
//! remaining sets empty. Only the construction direction is implemented. For
//! `n ≥ 1` the empty padding stands in for the transfinite induction, which has
//! no content over a countable enumeration.
//!
//! A prefix cannot decide whether a section of an infinite set is finite, so
//! the verifier reports growth tables rather than verdicts on that question.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::check::Check;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::scalar::Scalar;
use crate::schmerl::SchmerlInstance;

/// Default bound on the number of tuples an exhaustive sweep may visit.
pub const DEFAULT_BUDGET: u128 = 1_000_000;

/// How many uncovered tuples a report lists verbatim.
const WITNESS_CAP: usize = 64;

/// A countable set with a fixed enumeration `elem(0), elem(1), …`.
pub trait EnumeratedSet {
    type Elem: Clone + PartialEq + Debug;

    fn label(&self) -> String;

    /// `idx`, or `None` for elements outside the set.
    fn index_of(&self, e: &Self::Elem) -> Option<usize>;

    /// `elem`, or `None` past the end of a finite enumeration.
    fn element(&self, k: usize) -> Option<Self::Elem>;

    fn len_hint(&self) -> Option<usize> {
        None
    }
}

/// Sets `D₁, …, D_arity` of tuples over `E`, addressed zero-based.
pub trait Decomposition<E> {
    fn arity(&self) -> usize;

    fn contains(&self, i: usize, tuple: &[E]) -> Result<bool>;
}

/// A finite list of distinct elements, enumerated in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteEnumeration<E> {
    label: String,
    elements: Vec<E>,
}

impl<E: Clone + PartialEq + Debug> FiniteEnumeration<E> {
    pub fn new(label: impl Into<String>, elements: Vec<E>) -> Result<Self> {
        for (j, e) in elements.iter().enumerate() {
            if elements[..j].contains(e) {
                return Err(Error::DuplicateInput(j));
            }
        }
        Ok(Self { label: label.into(), elements })
    }

    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    /// The same elements listed as `elements[perm[0]], elements[perm[1]], …`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.elements.len()];
        if perm.len() != seen.len() {
            return Err(Error::DimensionMismatch { expected: seen.len(), found: perm.len() });
        }
        for &k in perm {
            if k >= seen.len() || std::mem::replace(&mut seen[k], true) {
                return Err(Error::DuplicateInput(k));
            }
        }
        let elements = perm.iter().map(|&k| self.elements[k].clone()).collect();
        Ok(Self { label: format!("{} (permuted)", self.label), elements })
    }
}

impl FiniteEnumeration<usize> {
    /// `{0, 1, …, m−1}` in natural order.
    pub fn naturals(m: usize) -> Self {
        Self { label: format!("0..{m}"), elements: (0..m).collect() }
    }
}

impl<E: Clone + PartialEq + Debug> EnumeratedSet for FiniteEnumeration<E> {
    type Elem = E;

    fn label(&self) -> String {
        self.label.clone()
    }

    fn index_of(&self, e: &E) -> Option<usize> {
        self.elements.iter().position(|x| x == e)
    }

    fn element(&self, k: usize) -> Option<E> {
        self.elements.get(k).cloned()
    }

    fn len_hint(&self) -> Option<usize> {
        Some(self.elements.len())
    }
}

/// All rationals in `(−ε, ε)`, ordered by denominator and then by numerator.
/// For `ε = 1/10` this starts `0, −1/11, 1/11, −1/12, 1/12, …`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowRationals {
    epsilon: Scalar,
}

impl WindowRationals {
    pub fn new(epsilon: Scalar) -> Result<Self> {
        if !epsilon.is_positive() {
            return Err(Error::OutOfWindow { epsilon: crate::scalar::fmt_scalar(&epsilon) });
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> &Scalar {
        &self.epsilon
    }

    /// Reduced numerators `k` with `|k/d| < ε`, ascending.
    fn numerators(&self, d: &BigInt) -> Vec<BigInt> {
        // |k| < ε·d, i.e. |k| ≤ ceil(ε·d) − 1
        let limit = (&self.epsilon * Scalar::from_integer(d.clone())).ceil().to_integer() - BigInt::from(1);
        let mut out = Vec::new();
        let mut k = -limit.clone();
        while k <= limit {
            if k.gcd(d) == BigInt::from(1) || (k.is_zero() && *d == BigInt::from(1)) {
                out.push(k.clone());
            }
            k += 1;
        }
        out
    }

    fn walk<T>(&self, mut visit: impl FnMut(usize, Scalar) -> Option<T>, stop_den: Option<&BigInt>) -> Option<T> {
        let mut index = 0;
        let mut d = BigInt::from(1);
        loop {
            if stop_den.is_some_and(|s| &d > s) {
                return None;
            }
            for k in self.numerators(&d) {
                if let Some(t) = visit(index, Scalar::new(k, d.clone())) {
                    return Some(t);
                }
                index += 1;
            }
            d += 1;
        }
    }
}

impl EnumeratedSet for WindowRationals {
    type Elem = Scalar;

    fn label(&self) -> String {
        format!("rationals in (-{0}, {0})", crate::scalar::fmt_scalar(&self.epsilon))
    }

    fn index_of(&self, e: &Scalar) -> Option<usize> {
        if e.abs() >= self.epsilon {
            return None;
        }
        self.walk(|i, q| (q == *e).then_some(i), Some(e.denom()))
    }

    fn element(&self, k: usize) -> Option<Scalar> {
        self.walk(|i, q| (i == k).then_some(q), None)
    }
}

/// The index-comparison decomposition over `X`, padded to arity `n + 2`.
#[derive(Clone, Debug)]
pub struct SierpinskiDecomposition<S> {
    set: S,
    n: usize,
}

pub fn sierpinski_decomposition<S: EnumeratedSet>(set: S, n: usize) -> SierpinskiDecomposition<S> {
    SierpinskiDecomposition { set, n }
}

impl<S: EnumeratedSet> SierpinskiDecomposition<S> {
    pub fn set(&self) -> &S {
        &self.set
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn idx(&self, e: &S::Elem) -> Result<usize> {
        self.set.index_of(e).ok_or_else(|| Error::NotACloud(format!("{e:?} is not in {}", self.set.label())))
    }
}

impl<S: EnumeratedSet> Decomposition<S::Elem> for SierpinskiDecomposition<S> {
    fn arity(&self) -> usize {
        self.n + 2
    }

    fn contains(&self, i: usize, tuple: &[S::Elem]) -> Result<bool> {
        if tuple.len() != self.arity() {
            return Err(Error::DimensionMismatch { expected: self.arity(), found: tuple.len() });
        }
        match i {
            0 => Ok(self.idx(&tuple[0])? <= self.idx(&tuple[1])?),
            1 => Ok(self.idx(&tuple[1])? < self.idx(&tuple[0])?),
            i if i < self.arity() => Ok(false),
            _ => Err(Error::BadAxis { axis: i, arity: self.arity() }),
        }
    }
}

/// Any membership predicate as a decomposition.
pub struct FnDecomposition<F> {
    arity: usize,
    f: F,
}

impl<F> FnDecomposition<F> {
    pub fn new(arity: usize, f: F) -> Self {
        Self { arity, f }
    }
}

impl<E, F: Fn(usize, &[E]) -> bool> Decomposition<E> for FnDecomposition<F> {
    fn arity(&self) -> usize {
        self.arity
    }

    fn contains(&self, i: usize, tuple: &[E]) -> Result<bool> {
        Ok((self.f)(i, tuple))
    }
}

/// The window sets `D_i` of a window-transform instance, queried through Φ.
pub struct SchmerlDecomposition<'a> {
    inst: &'a SchmerlInstance,
}

pub fn schmerl_to_decomposition(inst: &SchmerlInstance) -> (SchmerlDecomposition<'_>, WindowRationals) {
    let set = WindowRationals::new(inst.epsilon().clone()).expect("instances have positive epsilon");
    (SchmerlDecomposition { inst }, set)
}

impl Decomposition<Scalar> for SchmerlDecomposition<'_> {
    fn arity(&self) -> usize {
        self.inst.arity()
    }

    fn contains(&self, i: usize, tuple: &[Scalar]) -> Result<bool> {
        self.inst.d_membership(i, &Point::new(tuple.to_vec()))
    }
}

/// Section size of one axis-parallel line in the prefix grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineSection {
    /// Indices of the fixed coordinates, in order, the free axis omitted.
    pub fixed: Vec<usize>,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxisSections {
    pub axis: usize,
    pub lines: Vec<LineSection>,
    pub max: usize,
    /// The first line attaining `max`.
    pub argmax: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthRow {
    pub prefix: usize,
    /// Largest section over all lines inside the `prefix`-grid.
    pub max_section: usize,
    /// Section of the line whose fixed coordinates are all `elem(0)`.
    pub anchor_section: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxisGrowth {
    pub axis: usize,
    pub rows: Vec<GrowthRow>,
}

impl AxisGrowth {
    /// Whether the anchor section grows with every prefix. Descriptive only:
    /// no finite prefix settles finiteness of the full section.
    pub fn anchor_grows(&self) -> bool {
        self.rows.len() > 1 && self.rows.windows(2).all(|w| w[1].anchor_section > w[0].anchor_section)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionReport {
    pub label: String,
    pub arity: usize,
    pub prefix: usize,
    pub tuples: usize,
    pub uncovered_count: usize,
    /// The first few uncovered tuples, as index tuples.
    pub uncovered: Vec<Vec<usize>>,
    /// Tuples lying in more than one set.
    pub overlaps: usize,
    pub axes: Vec<AxisSections>,
    pub growth: Vec<AxisGrowth>,
}

impl DecompositionReport {
    pub fn covers(&self) -> bool {
        self.uncovered_count == 0
    }

    pub fn section(&self, axis: usize, fixed: &[usize]) -> Option<usize> {
        self.axes.get(axis)?.lines.iter().find(|l| l.fixed == fixed).map(|l| l.size)
    }

    pub fn checks(&self) -> Vec<Check> {
        let cover = Check::from_witness(
            "cover",
            format!("{} tuples over a {}-element prefix", self.tuples, self.prefix),
            (!self.covers()).then(|| match self.uncovered.first() {
                Some(t) => format!("{} uncovered, first {t:?}", self.uncovered_count),
                None => format!("{} uncovered", self.uncovered_count),
            }),
        );
        let mut out = vec![cover];
        for a in &self.axes {
            out.push(Check::pass(
                format!("sections_axis_{}", a.axis + 1),
                format!("{} lines, max section {} at fixed {:?}", a.lines.len(), a.max, a.argmax),
            ));
        }
        out
    }
}

fn tuple_count(m: usize, arity: usize) -> u128 {
    (m as u128).checked_pow(arity as u32).unwrap_or(u128::MAX)
}

/// Digits of `t` in base `m`, most significant first.
fn digits(mut t: usize, m: usize, arity: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = t % m;
        t /= m;
    }
    out
}

fn without(v: &[usize], axis: usize) -> Vec<usize> {
    let mut w = v.to_vec();
    w.remove(axis);
    w
}

/// Exhaustive check of `d` over `{elem(0), …, elem(m−1)}^{arity}`.
pub fn verify_decomposition<S, D>(d: &D, set: &S, m: usize, budget: u128) -> Result<DecompositionReport>
where
    S: EnumeratedSet,
    D: Decomposition<S::Elem> + ?Sized,
{
    if m == 0 {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let arity = d.arity();
    let needed = tuple_count(m, arity);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let elems: Vec<S::Elem> = (0..m)
        .map(|k| set.element(k).ok_or(Error::TooFewPoints { needed: m, got: k }))
        .collect::<Result<_>>()?;
    let total = needed as usize;

    // member[i][t] for tuple index t
    let mut member = vec![vec![false; total]; arity];
    let mut uncovered = Vec::new();
    let mut uncovered_count = 0;
    let mut overlaps = 0;
    for t in 0..total {
        let idx = digits(t, m, arity);
        let tuple: Vec<S::Elem> = idx.iter().map(|&k| elems[k].clone()).collect();
        let mut hits = 0;
        for (i, row) in member.iter_mut().enumerate() {
            row[t] = d.contains(i, &tuple)?;
            hits += usize::from(row[t]);
        }
        if hits == 0 {
            uncovered_count += 1;
            if uncovered.len() < WITNESS_CAP {
                uncovered.push(idx);
            }
        }
        overlaps += usize::from(hits > 1);
    }

    let stride = |axis: usize| m.pow((arity - 1 - axis) as u32);
    let mut axes = Vec::with_capacity(arity);
    let mut growth = Vec::with_capacity(arity);
    for (axis, row) in member.iter().enumerate() {
        let step = stride(axis);
        let mut lines = Vec::new();
        for t in 0..total {
            let idx = digits(t, m, arity);
            if idx[axis] != 0 {
                continue;
            }
            let size = (0..m).filter(|&x| row[t + x * step]).count();
            lines.push(LineSection { fixed: without(&idx, axis), size });
        }
        let best = lines.iter().max_by_key(|l| (l.size, std::cmp::Reverse(l.fixed.clone()))).expect("m >= 1");
        let (max, argmax) = (best.size, best.fixed.clone());

        let rows = (1..=m)
            .map(|k| {
                let section = |t: usize| (0..k).filter(|&x| row[t + x * step]).count();
                let max_section = (0..total)
                    .filter(|&t| {
                        let idx = digits(t, m, arity);
                        idx[axis] == 0 && idx.iter().all(|&c| c < k)
                    })
                    .map(section)
                    .max()
                    .unwrap_or(0);
                GrowthRow { prefix: k, max_section, anchor_section: section(0) }
            })
            .collect();
        axes.push(AxisSections { axis, lines, max, argmax });
        growth.push(AxisGrowth { axis, rows });
    }

    Ok(DecompositionReport {
        label: set.label(),
        arity,
        prefix: m,
        tuples: total,
        uncovered_count,
        uncovered,
        overlaps,
        axes,
        growth,
    })
}
