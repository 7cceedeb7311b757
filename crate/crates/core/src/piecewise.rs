//! Exact algebra on piecewise functions of one real variable.
//!
//! A [`PiecewiseFn`] is an ordered list of contiguous segments, each carrying a
//! constant, linear or rational-linear expression. Functions need not be
//! continuous. At a shared breakpoint the left segment owns the point, so the
//! first segment is closed on both ends and every later segment is `(lo, hi]`.
//!
//! Addition, subtraction, pointwise max/min and scaling are computed exactly on
//! constant and linear segments by refining both operands onto the union of
//! their breakpoints. Rational segments can be scaled, shifted by a constant and
//! minimized by sampling; anything else is rejected.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Breakpoints closer than this are merged, and segments narrower than this
/// are folded into a neighbour.
pub const BREAKPOINT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::InvalidInterval(lo, hi));
        }
        Ok(Interval { lo, hi })
    }

    /// Like [`Interval::new`] but additionally rejects infinite endpoints.
    pub fn bounded(lo: f64, hi: f64) -> Result<Self> {
        let iv = Interval::new(lo, hi)?;
        iv.ensure_bounded()?;
        Ok(iv)
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn ensure_bounded(&self) -> Result<()> {
        if self.is_bounded() {
            Ok(())
        } else {
            Err(Error::Unbounded(self.lo, self.hi))
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Smallest interval containing both `self` and `x`.
    pub fn hull_with(&self, x: f64) -> Interval {
        Interval {
            lo: self.lo.min(x),
            hi: self.hi.max(x),
        }
    }

    /// `lo + t * width` for `t` in `[0, 1]`.
    pub fn lerp(&self, t: f64) -> f64 {
        self.lo + t * (self.hi - self.lo)
    }
}

/// An affine form `slope * x + intercept`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LinearForm {
    pub slope: f64,
    pub intercept: f64,
}

impl LinearForm {
    pub const ZERO: LinearForm = LinearForm {
        slope: 0.0,
        intercept: 0.0,
    };

    pub fn new(slope: f64, intercept: f64) -> Self {
        LinearForm { slope, intercept }
    }

    pub fn constant(c: f64) -> Self {
        LinearForm::new(0.0, c)
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }

    pub fn add(&self, other: &LinearForm) -> LinearForm {
        LinearForm::new(self.slope + other.slope, self.intercept + other.intercept)
    }

    pub fn sub(&self, other: &LinearForm) -> LinearForm {
        LinearForm::new(self.slope - other.slope, self.intercept - other.intercept)
    }

    pub fn scale(&self, s: f64) -> LinearForm {
        LinearForm::new(self.slope * s, self.intercept * s)
    }

    /// The root of the form when it is non-constant.
    pub fn root(&self) -> Option<f64> {
        if self.slope == 0.0 {
            None
        } else {
            Some(-self.intercept / self.slope)
        }
    }

    /// Roots strictly inside `iv` (away from its endpoints by more than the
    /// breakpoint tolerance).
    pub fn interior_root(&self, iv: Interval) -> Option<f64> {
        self.root()
            .filter(|&r| r > iv.lo + BREAKPOINT_TOL && r < iv.hi - BREAKPOINT_TOL)
    }

    pub fn to_segment(&self) -> SegmentKind {
        SegmentKind::linear(self.slope, self.intercept)
    }
}

/// Expression carried by one segment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SegmentKind {
    Constant(f64),
    /// `a * x + b`; never has `a == 0` when built through [`SegmentKind::linear`].
    Linear { a: f64, b: f64 },
    /// `(a1 * x + b1) / (a2 * x + b2)`.
    Rational { a1: f64, b1: f64, a2: f64, b2: f64 },
}

impl SegmentKind {
    pub fn linear(a: f64, b: f64) -> Self {
        if a == 0.0 {
            SegmentKind::Constant(b)
        } else {
            SegmentKind::Linear { a, b }
        }
    }

    /// Builds a rational-linear kind, degrading to linear when the denominator
    /// is constant and to a constant when numerator and denominator are
    /// proportional.
    pub fn rational(a1: f64, b1: f64, a2: f64, b2: f64) -> Self {
        if a2 == 0.0 {
            return SegmentKind::linear(a1 / b2, b1 / b2);
        }
        let cross = a1 * b2 - a2 * b1;
        let scale = (a1 * b2).abs() + (a2 * b1).abs();
        if cross.abs() <= 1e-12 * scale || (a1 == 0.0 && b1 == 0.0) {
            return SegmentKind::Constant(a1 / a2);
        }
        SegmentKind::Rational { a1, b1, a2, b2 }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            SegmentKind::Constant(c) => c,
            SegmentKind::Linear { a, b } => a * x + b,
            SegmentKind::Rational { a1, b1, a2, b2 } => (a1 * x + b1) / (a2 * x + b2),
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, SegmentKind::Rational { .. })
    }

    /// The affine form of a constant or linear kind.
    pub fn as_linear(&self) -> Option<LinearForm> {
        match *self {
            SegmentKind::Constant(c) => Some(LinearForm::constant(c)),
            SegmentKind::Linear { a, b } => Some(LinearForm::new(a, b)),
            SegmentKind::Rational { .. } => None,
        }
    }

    /// Multiplies the expression by `s`; rational kinds scale their numerator.
    pub fn scale(&self, s: f64) -> Self {
        match *self {
            SegmentKind::Constant(c) => SegmentKind::Constant(c * s),
            SegmentKind::Linear { a, b } => SegmentKind::linear(a * s, b * s),
            SegmentKind::Rational { a1, b1, a2, b2 } => {
                SegmentKind::rational(a1 * s, b1 * s, a2, b2)
            }
        }
    }

    /// Adds the constant `c`.
    pub fn offset(&self, c: f64) -> Self {
        match *self {
            SegmentKind::Constant(v) => SegmentKind::Constant(v + c),
            SegmentKind::Linear { a, b } => SegmentKind::linear(a, b + c),
            SegmentKind::Rational { a1, b1, a2, b2 } => {
                SegmentKind::rational(a1 + c * a2, b1 + c * b2, a2, b2)
            }
        }
    }

    /// Exact sum. A rational kind can only be combined with a constant.
    pub fn add(&self, other: &SegmentKind) -> Result<Self> {
        match (self, other) {
            (SegmentKind::Constant(c), k) | (k, SegmentKind::Constant(c)) => Ok(k.offset(*c)),
            (SegmentKind::Linear { a, b }, SegmentKind::Linear { a: a2, b: b2 }) => {
                Ok(SegmentKind::linear(a + a2, b + b2))
            }
            _ => Err(Error::RationalOperand("add")),
        }
    }

    fn tag(&self) -> &'static str {
        match self {
            SegmentKind::Constant(_) => "const",
            SegmentKind::Linear { .. } => "lin",
            SegmentKind::Rational { .. } => "rat",
        }
    }

    fn coefficients(&self) -> Vec<f64> {
        match *self {
            SegmentKind::Constant(c) => vec![c],
            SegmentKind::Linear { a, b } => vec![a, b],
            SegmentKind::Rational { a1, b1, a2, b2 } => vec![a1, b1, a2, b2],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub kind: SegmentKind,
}

impl Segment {
    pub fn new(lo: f64, hi: f64, kind: SegmentKind) -> Self {
        Segment { lo, hi, kind }
    }

    pub fn interval(&self) -> Interval {
        Interval {
            lo: self.lo,
            hi: self.hi,
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// A function of one variable made of contiguous segments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "PiecewiseDump", try_from = "PiecewiseDump")]
pub struct PiecewiseFn {
    segments: Vec<Segment>,
}

impl PiecewiseFn {
    /// Validates and normalizes a list of segments: they must be sorted and
    /// contiguous. Segments narrower than [`BREAKPOINT_TOL`] are folded into
    /// their neighbour and equal adjacent kinds are merged.
    pub fn from_segments(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::EmptyFunction);
        }
        for s in &segments {
            if s.lo.is_nan() || s.hi.is_nan() || s.lo > s.hi {
                return Err(Error::InvalidInterval(s.lo, s.hi));
            }
        }
        for w in segments.windows(2) {
            if (w[0].hi - w[1].lo).abs() > BREAKPOINT_TOL * (1.0 + w[0].hi.abs()) {
                return Err(Error::InvalidArgument(format!(
                    "segments are not contiguous at {} / {}",
                    w[0].hi, w[1].lo
                )));
            }
        }
        Ok(PiecewiseFn {
            segments: normalize(segments),
        })
    }

    pub fn constant(domain: Interval, c: f64) -> Self {
        PiecewiseFn {
            segments: vec![Segment::new(domain.lo, domain.hi, SegmentKind::Constant(c))],
        }
    }

    pub fn zero(domain: Interval) -> Self {
        PiecewiseFn::constant(domain, 0.0)
    }

    pub fn linear(domain: Interval, a: f64, b: f64) -> Self {
        PiecewiseFn {
            segments: vec![Segment::new(domain.lo, domain.hi, SegmentKind::linear(a, b))],
        }
    }

    pub fn single(domain: Interval, kind: SegmentKind) -> Self {
        PiecewiseFn {
            segments: vec![Segment::new(domain.lo, domain.hi, kind)],
        }
    }

    pub fn domain(&self) -> Interval {
        Interval {
            lo: self.segments[0].lo,
            hi: self.segments[self.segments.len() - 1].hi,
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn has_rational(&self) -> bool {
        self.segments.iter().any(|s| s.kind.is_rational())
    }

    /// Interior breakpoints, in increasing order.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.segments[..self.segments.len() - 1]
            .iter()
            .map(|s| s.hi)
            .collect()
    }

    /// Index of the segment owning `x` (left segment wins at breakpoints).
    pub fn segment_index(&self, x: f64) -> Result<usize> {
        let dom = self.domain();
        if !(dom.contains(x)) {
            return Err(Error::OutsideDomain {
                point: x,
                lo: dom.lo,
                hi: dom.hi,
            });
        }
        Ok(self.segments.partition_point(|s| s.hi < x).min(self.segments.len() - 1))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let i = self.segment_index(x)?;
        Ok(self.segments[i].kind.eval(x))
    }

    pub fn add(&self, other: &PiecewiseFn) -> Result<PiecewiseFn> {
        self.combine(other, |lo, hi, f, g| {
            if f.is_rational() || g.is_rational() {
                return Err(Error::RationalOperand("add"));
            }
            Ok(vec![Segment::new(lo, hi, f.add(&g)?)])
        })
    }

    pub fn sub(&self, other: &PiecewiseFn) -> Result<PiecewiseFn> {
        self.add(&other.scale(-1.0))
    }

    pub fn pointwise_max(&self, other: &PiecewiseFn) -> Result<PiecewiseFn> {
        self.combine(other, |lo, hi, f, g| {
            extremum_cell(lo, hi, f, g, true)
        })
    }

    pub fn pointwise_min(&self, other: &PiecewiseFn) -> Result<PiecewiseFn> {
        self.combine(other, |lo, hi, f, g| {
            extremum_cell(lo, hi, f, g, false)
        })
    }

    pub fn scale(&self, s: f64) -> PiecewiseFn {
        let segs = self
            .segments
            .iter()
            .map(|seg| Segment::new(seg.lo, seg.hi, seg.kind.scale(s)))
            .collect();
        PiecewiseFn {
            segments: normalize(segs),
        }
    }

    pub fn offset(&self, c: f64) -> PiecewiseFn {
        let segs = self
            .segments
            .iter()
            .map(|seg| Segment::new(seg.lo, seg.hi, seg.kind.offset(c)))
            .collect();
        PiecewiseFn {
            segments: normalize(segs),
        }
    }

    /// Minimizes the function over its (bounded) domain.
    ///
    /// Constant segments contribute their midpoint, linear segments their
    /// lower end, and rational segments `grid_n` evenly spaced samples
    /// including both ends. Endpoints shared with a neighbouring segment are
    /// nudged slightly inward, so the returned point lies strictly inside a
    /// segment: there it carries the returned value, and solvers evaluated at
    /// it see the same solution the segment describes. Ties keep the
    /// smallest point.
    pub fn argmin(&self, grid_n: usize) -> Result<(f64, f64)> {
        let dom = self.domain();
        dom.ensure_bounded()?;
        if grid_n < 2 {
            return Err(Error::InvalidArgument("grid_n must be at least 2".into()));
        }
        let mut best: Option<(f64, f64)> = None;
        let mut consider = |x: f64, v: f64| match best {
            Some((_, bv)) if !(v < bv) => {}
            _ => best = Some((x, v)),
        };
        for (idx, seg) in self.segments.iter().enumerate() {
            let last = idx + 1 == self.segments.len();
            let open_left = |x: f64| {
                if idx == 0 {
                    x
                } else {
                    let delta = (1e-9 * (1.0 + seg.lo.abs())).min(0.5 * seg.width());
                    seg.lo + delta
                }
            };
            let inner_right = |x: f64| {
                if last {
                    x
                } else {
                    let delta = (1e-9 * (1.0 + seg.hi.abs())).min(0.5 * seg.width());
                    seg.hi - delta
                }
            };
            match seg.kind {
                SegmentKind::Constant(c) => consider(0.5 * (seg.lo + seg.hi), c),
                SegmentKind::Linear { a, b } => {
                    let x = if a > 0.0 { open_left(seg.lo) } else { inner_right(seg.hi) };
                    consider(x, a * x + b);
                }
                SegmentKind::Rational { .. } => {
                    let step = seg.width() / (grid_n - 1) as f64;
                    for j in 0..grid_n {
                        let x = if j == 0 {
                            open_left(seg.lo)
                        } else if j == grid_n - 1 {
                            inner_right(seg.hi)
                        } else {
                            seg.lo + step * j as f64
                        };
                        let v = seg.kind.eval(x);
                        if v.is_finite() {
                            consider(x, v);
                        }
                    }
                }
            }
        }
        best.ok_or(Error::EmptyFunction)
    }

    /// Refines both operands onto the union of their breakpoints and applies
    /// `cell` to every elementary interval.
    fn combine<F>(&self, other: &PiecewiseFn, mut cell: F) -> Result<PiecewiseFn>
    where
        F: FnMut(f64, f64, SegmentKind, SegmentKind) -> Result<Vec<Segment>>,
    {
        let (df, dg) = (self.domain(), other.domain());
        let tol = BREAKPOINT_TOL * (1.0 + df.lo.abs().max(df.hi.abs()));
        if (df.lo - dg.lo).abs() > tol || (df.hi - dg.hi).abs() > tol {
            return Err(Error::DomainMismatch(df.lo, df.hi, dg.lo, dg.hi));
        }
        let cells = refine(&self.segments, &other.segments);
        let mut out = Vec::with_capacity(cells.len());
        for (lo, hi, kf, kg) in cells {
            out.extend(cell(lo, hi, kf, kg)?);
        }
        Ok(PiecewiseFn {
            segments: normalize(out),
        })
    }
}

/// Sums a list of piecewise functions by pairwise reduction.
pub fn sum_all(fns: &[PiecewiseFn]) -> Result<PiecewiseFn> {
    match fns.len() {
        0 => Err(Error::EmptyFunction),
        1 => Ok(fns[0].clone()),
        n => {
            let (left, right) = fns.split_at(n / 2);
            sum_all(left)?.add(&sum_all(right)?)
        }
    }
}

fn extremum_cell(lo: f64, hi: f64, f: SegmentKind, g: SegmentKind, upper: bool) -> Result<Vec<Segment>> {
    let op = if upper { "pointwise_max" } else { "pointwise_min" };
    let (lf, lg) = match (f.as_linear(), g.as_linear()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::RationalOperand(op)),
    };
    let pick = |x: f64| {
        let (vf, vg) = (lf.eval(x), lg.eval(x));
        let keep_f = if upper { vf >= vg } else { vf <= vg };
        if keep_f {
            f
        } else {
            g
        }
    };
    let diff = lf.sub(&lg);
    match diff.interior_root(Interval { lo, hi }) {
        Some(r) => Ok(vec![
            Segment::new(lo, r, pick(0.5 * (lo + r))),
            Segment::new(r, hi, pick(0.5 * (r + hi))),
        ]),
        None => Ok(vec![Segment::new(lo, hi, pick(0.5 * (lo + hi)))]),
    }
}

/// Elementary cells of the union of both breakpoint sets, with the kind each
/// operand carries on the cell.
fn refine(f: &[Segment], g: &[Segment]) -> Vec<(f64, f64, SegmentKind, SegmentKind)> {
    let mut points: Vec<f64> = Vec::with_capacity(f.len() + g.len() + 2);
    points.push(f[0].lo);
    points.extend(f.iter().map(|s| s.hi));
    points.extend(g[..g.len() - 1].iter().map(|s| s.hi));
    points.sort_by(|a, b| a.total_cmp(b));
    let hi_end = f[f.len() - 1].hi;
    let mut cuts: Vec<f64> = Vec::with_capacity(points.len());
    for p in points {
        match cuts.last() {
            Some(&last) if p - last <= BREAKPOINT_TOL * (1.0 + last.abs()) => {}
            _ => cuts.push(p),
        }
    }
    // the domain end is authoritative even if a near-duplicate preceded it
    if let Some(last) = cuts.last_mut() {
        *last = hi_end;
    }
    if cuts.len() == 1 {
        cuts.push(hi_end);
    }

    let (mut i, mut j) = (0usize, 0usize);
    let mut out = Vec::with_capacity(cuts.len());
    for w in cuts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        while i + 1 < f.len() && f[i].hi < mid {
            i += 1;
        }
        while j + 1 < g.len() && g[j].hi < mid {
            j += 1;
        }
        out.push((w[0], w[1], f[i].kind, g[j].kind));
    }
    out
}

/// Folds narrow segments into neighbours and merges equal adjacent kinds.
fn normalize(segments: Vec<Segment>) -> Vec<Segment> {
    let (first_lo, first_kind) = (segments[0].lo, segments[0].kind);
    let last_hi = segments[segments.len() - 1].hi;
    let mut out: Vec<Segment> = Vec::with_capacity(segments.len());
    let mut leading_lo: Option<f64> = None;
    for mut seg in segments {
        let narrow = seg.width() <= BREAKPOINT_TOL * (1.0 + seg.lo.abs());
        match out.last_mut() {
            Some(last) if narrow || last.kind == seg.kind => last.hi = seg.hi,
            Some(_) => out.push(seg),
            None if narrow => {
                leading_lo.get_or_insert(seg.lo);
            }
            None => {
                if let Some(lo) = leading_lo {
                    seg.lo = lo;
                }
                out.push(seg);
            }
        }
    }
    if out.is_empty() {
        out.push(Segment::new(first_lo, last_hi, first_kind));
    }
    out
}

/// Lower envelope of a family of lines over `dom`: the partition of `dom` into
/// maximal intervals on which one line is minimal, tagged with that line's
/// index. Identical lines resolve to the smallest index. Sections narrower
/// than [`BREAKPOINT_TOL`] are absorbed by a neighbour.
pub fn lower_envelope(lines: &[LinearForm], dom: Interval) -> Vec<(Interval, usize)> {
    assert!(!lines.is_empty(), "lower_envelope of an empty family");
    let mut order: Vec<usize> = (0..lines.len()).collect();
    // slopes descending: that is the order in which lines become minimal as x grows
    order.sort_by(|&i, &j| {
        lines[j]
            .slope
            .total_cmp(&lines[i].slope)
            .then(lines[i].intercept.total_cmp(&lines[j].intercept))
            .then(i.cmp(&j))
    });
    // among equal slopes keep the lowest intercept; near-identical intercepts
    // resolve to the smallest index
    let mut dedup: Vec<usize> = Vec::with_capacity(order.len());
    let mut k = 0;
    while k < order.len() {
        let first = order[k];
        let mut best = first;
        let mut e = k + 1;
        while e < order.len() && lines[order[e]].slope == lines[first].slope {
            let cand = order[e];
            let (bi, ci) = (lines[first].intercept, lines[cand].intercept);
            if (ci - bi).abs() <= 1e-12 * (1.0 + bi.abs()) && cand < best {
                best = cand;
            }
            e += 1;
        }
        dedup.push(best);
        k = e;
    }

    let cross = |p: usize, q: usize| -> f64 {
        // p has the larger slope; q is lower to the right of the crossing
        (lines[q].intercept - lines[p].intercept) / (lines[p].slope - lines[q].slope)
    };
    let mut hull: Vec<usize> = Vec::with_capacity(dedup.len());
    for &l in &dedup {
        while hull.len() >= 2 {
            let (p, q) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            if cross(p, l) <= cross(p, q) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(l);
    }

    let mut out: Vec<(Interval, usize)> = Vec::new();
    let mut start = dom.lo;
    for (h, &line) in hull.iter().enumerate() {
        let end = if h + 1 < hull.len() {
            cross(line, hull[h + 1])
        } else {
            f64::INFINITY
        };
        if end <= start {
            continue;
        }
        let end = end.min(dom.hi);
        let narrow = end - start <= BREAKPOINT_TOL * (1.0 + start.abs());
        if !narrow {
            out.push((Interval { lo: start, hi: end }, line));
            start = end;
        }
        if end >= dom.hi {
            break;
        }
    }
    match out.last_mut() {
        Some(last) => last.0.hi = dom.hi,
        None => {
            // domain narrower than the tolerance: pick the line minimal at its midpoint
            let mid = dom.midpoint();
            let best = (0..lines.len())
                .min_by(|&i, &j| lines[i].eval(mid).total_cmp(&lines[j].eval(mid)).then(i.cmp(&j)))
                .unwrap();
            out.push((dom, best));
        }
    }
    // merge consecutive sections won by the same line (possible after absorbing slivers)
    let mut merged: Vec<(Interval, usize)> = Vec::with_capacity(out.len());
    for (iv, idx) in out {
        match merged.last_mut() {
            Some(last) if last.1 == idx => last.0.hi = iv.hi,
            _ => merged.push((iv, idx)),
        }
    }
    merged
}

/// Upper envelope; see [`lower_envelope`].
pub fn upper_envelope(lines: &[LinearForm], dom: Interval) -> Vec<(Interval, usize)> {
    let negated: Vec<LinearForm> = lines.iter().map(|l| l.scale(-1.0)).collect();
    lower_envelope(&negated, dom)
}

#[derive(Serialize, Deserialize)]
struct DumpSegment {
    lo: f64,
    hi: f64,
    kind: String,
    coef: Vec<f64>,
}

/// JSON shape used for debug dumps of loss functions.
#[derive(Serialize, Deserialize)]
struct PiecewiseDump {
    domain: [f64; 2],
    segments: Vec<DumpSegment>,
}

impl From<PiecewiseFn> for PiecewiseDump {
    fn from(f: PiecewiseFn) -> Self {
        let dom = f.domain();
        PiecewiseDump {
            domain: [dom.lo, dom.hi],
            segments: f
                .segments
                .iter()
                .map(|s| DumpSegment {
                    lo: s.lo,
                    hi: s.hi,
                    kind: s.kind.tag().to_string(),
                    coef: s.kind.coefficients(),
                })
                .collect(),
        }
    }
}

impl TryFrom<PiecewiseDump> for PiecewiseFn {
    type Error = Error;

    fn try_from(d: PiecewiseDump) -> Result<Self> {
        let segs = d
            .segments
            .into_iter()
            .map(|s| {
                let kind = match (s.kind.as_str(), s.coef.as_slice()) {
                    ("const", [c]) => SegmentKind::Constant(*c),
                    ("lin", [a, b]) => SegmentKind::linear(*a, *b),
                    ("rat", [a1, b1, a2, b2]) => SegmentKind::rational(*a1, *b1, *a2, *b2),
                    (k, c) => {
                        return Err(Error::InvalidArgument(format!(
                            "segment kind `{k}` with {} coefficients",
                            c.len()
                        )))
                    }
                };
                Ok(Segment::new(s.lo, s.hi, kind))
            })
            .collect::<Result<Vec<_>>>()?;
        let f = PiecewiseFn::from_segments(segs)?;
        let dom = f.domain();
        if dom.lo != d.domain[0] || dom.hi != d.domain[1] {
            return Err(Error::InvalidArgument("domain does not match segments".into()));
        }
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn pw(parts: &[(f64, f64, SegmentKind)]) -> PiecewiseFn {
        PiecewiseFn::from_segments(parts.iter().map(|&(lo, hi, k)| Segment::new(lo, hi, k)).collect())
            .unwrap()
    }

    #[test]
    fn eval_basic_kinds() {
        assert_eq!(PiecewiseFn::zero(iv(-1.0, 1.0)).eval(0.5).unwrap(), 0.0);
        assert_eq!(PiecewiseFn::linear(iv(0.0, 3.0), 2.0, 1.0).eval(1.0).unwrap(), 3.0);
        let r = PiecewiseFn::single(iv(0.0, 2.0), SegmentKind::rational(1.0, 0.0, 1.0, 1.0));
        assert_eq!(r.eval(1.0).unwrap(), 0.5);
    }

    #[test]
    fn eval_uses_left_segment_at_breakpoints() {
        let f = pw(&[
            (0.0, 1.0, SegmentKind::Constant(2.0)),
            (1.0, 3.0, SegmentKind::Constant(1.0)),
        ]);
        assert_eq!(f.eval(1.0).unwrap(), 2.0);
        assert_eq!(f.eval(0.0).unwrap(), 2.0);
        assert_eq!(f.eval(3.0).unwrap(), 1.0);
    }

    #[test]
    fn eval_outside_domain_errors() {
        let f = PiecewiseFn::zero(iv(0.0, 1.0));
        assert!(matches!(f.eval(1.5), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn add_identity_and_cancellation() {
        let f = PiecewiseFn::constant(iv(0.0, 1.0), 3.0);
        let g = PiecewiseFn::zero(iv(0.0, 1.0));
        assert_eq!(f.add(&g).unwrap(), f);

        let f = PiecewiseFn::linear(iv(-5.0, 5.0), 1.0, 0.0);
        let g = PiecewiseFn::linear(iv(-5.0, 5.0), -1.0, 0.0);
        assert_eq!(f.add(&g).unwrap(), PiecewiseFn::zero(iv(-5.0, 5.0)));
    }

    #[test]
    fn add_refines_breakpoints() {
        let f = PiecewiseFn::linear(iv(0.0, 2.0), 1.0, 0.0);
        let g = pw(&[
            (0.0, 1.0, SegmentKind::Constant(1.0)),
            (1.0, 2.0, SegmentKind::Constant(2.0)),
        ]);
        let h = f.add(&g).unwrap();
        assert_eq!(
            h.segments(),
            &[
                Segment::new(0.0, 1.0, SegmentKind::linear(1.0, 1.0)),
                Segment::new(1.0, 2.0, SegmentKind::linear(1.0, 2.0)),
            ]
        );
    }

    #[test]
    fn add_rejects_mismatched_domains_and_rationals() {
        let f = PiecewiseFn::zero(iv(0.0, 1.0));
        let g = PiecewiseFn::zero(iv(0.0, 2.0));
        assert!(matches!(f.add(&g), Err(Error::DomainMismatch(..))));
        let r = PiecewiseFn::single(iv(0.0, 1.0), SegmentKind::rational(1.0, 0.0, 1.0, 1.0));
        assert!(matches!(f.add(&r), Err(Error::RationalOperand(_))));
    }

    #[test]
    fn max_splits_at_crossing() {
        let f = PiecewiseFn::linear(iv(0.0, 2.0), 1.0, 0.0);
        let g = PiecewiseFn::linear(iv(0.0, 2.0), -1.0, 2.0);
        let h = f.pointwise_max(&g).unwrap();
        assert_eq!(
            h.segments(),
            &[
                Segment::new(0.0, 1.0, SegmentKind::linear(-1.0, 2.0)),
                Segment::new(1.0, 2.0, SegmentKind::linear(1.0, 0.0)),
            ]
        );
        let m = f.pointwise_min(&g).unwrap();
        assert_eq!(
            m.segments(),
            &[
                Segment::new(0.0, 1.0, SegmentKind::linear(1.0, 0.0)),
                Segment::new(1.0, 2.0, SegmentKind::linear(-1.0, 2.0)),
            ]
        );
    }

    #[test]
    fn max_min_of_dominated_constants() {
        let f = PiecewiseFn::constant(iv(0.0, 1.0), 5.0);
        let g = PiecewiseFn::constant(iv(0.0, 1.0), 3.0);
        assert_eq!(f.pointwise_max(&g).unwrap(), f);
        assert_eq!(f.pointwise_min(&g).unwrap(), g);
    }

    #[test]
    fn scale_cases() {
        let f = PiecewiseFn::linear(iv(0.0, 1.0), 2.0, 1.0);
        assert_eq!(f.scale(0.0), PiecewiseFn::zero(iv(0.0, 1.0)));
        let c = PiecewiseFn::constant(iv(0.0, 1.0), 4.0);
        assert_eq!(c.scale(-1.0), PiecewiseFn::constant(iv(0.0, 1.0), -4.0));
        let r = PiecewiseFn::single(iv(0.0, 2.0), SegmentKind::rational(1.0, 0.0, 1.0, 1.0));
        assert_eq!(r.scale(2.0).eval(1.0).unwrap(), 1.0);
        assert_eq!(f.scale(1.0), f);
    }

    #[test]
    fn argmin_constant_midpoint_and_linear_endpoint() {
        let f = pw(&[
            (0.0, 1.0, SegmentKind::Constant(2.0)),
            (1.0, 3.0, SegmentKind::Constant(1.0)),
        ]);
        assert_eq!(f.argmin(1000).unwrap(), (2.0, 1.0));
        let g = PiecewiseFn::linear(iv(0.0, 4.0), 1.0, 0.0);
        assert_eq!(g.argmin(1000).unwrap(), (0.0, 0.0));
        let h = PiecewiseFn::linear(iv(0.0, 4.0), -1.0, 0.0);
        assert_eq!(h.argmin(1000).unwrap(), (4.0, -4.0));
    }

    #[test]
    fn argmin_rejects_unbounded_and_tiny_grids() {
        let f = PiecewiseFn::zero(Interval::new(0.0, f64::INFINITY).unwrap());
        assert!(matches!(f.argmin(10), Err(Error::Unbounded(..))));
        let g = PiecewiseFn::zero(iv(0.0, 1.0));
        assert!(g.argmin(1).is_err());
    }

    #[test]
    fn argmin_prefers_smallest_point_on_ties() {
        let f = pw(&[
            (0.0, 2.0, SegmentKind::Constant(1.0)),
            (2.0, 3.0, SegmentKind::Constant(5.0)),
            (3.0, 5.0, SegmentKind::Constant(1.0)),
        ]);
        assert_eq!(f.argmin(10).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn argmin_nudges_into_open_left_end() {
        let f = pw(&[
            (0.0, 1.0, SegmentKind::Constant(3.0)),
            (1.0, 2.0, SegmentKind::linear(1.0, 0.0)),
        ]);
        let (x, v) = f.argmin(10).unwrap();
        assert!(x > 1.0 && x < 1.0 + 1e-8);
        assert_eq!(f.eval(x).unwrap(), v);
    }

    #[test]
    fn rational_degenerates() {
        assert_eq!(SegmentKind::rational(2.0, 0.0, 1.0, 0.0), SegmentKind::Constant(2.0));
        assert_eq!(SegmentKind::rational(1.0, 1.0, 0.0, 2.0), SegmentKind::linear(0.5, 0.5));
        assert!(SegmentKind::rational(1.0, 0.0, 1.0, 1.0).is_rational());
    }

    #[test]
    fn rational_offset_is_exact() {
        let k = SegmentKind::rational(1.0, 0.0, 1.0, 1.0);
        let shifted = k.offset(3.0);
        for x in [0.1, 0.7, 1.9] {
            assert!((shifted.eval(x) - (k.eval(x) + 3.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn narrow_segments_are_folded() {
        let f = PiecewiseFn::from_segments(vec![
            Segment::new(0.0, 1.0, SegmentKind::Constant(1.0)),
            Segment::new(1.0, 1.0 + 1e-14, SegmentKind::Constant(7.0)),
            Segment::new(1.0 + 1e-14, 2.0, SegmentKind::Constant(2.0)),
        ])
        .unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.domain(), iv(0.0, 2.0));
        let g = PiecewiseFn::from_segments(vec![
            Segment::new(0.0, 1e-14, SegmentKind::Constant(7.0)),
            Segment::new(1e-14, 2.0, SegmentKind::Constant(2.0)),
        ])
        .unwrap();
        assert_eq!(g.segments(), &[Segment::new(0.0, 2.0, SegmentKind::Constant(2.0))]);
    }

    #[test]
    fn non_contiguous_segments_rejected() {
        let r = PiecewiseFn::from_segments(vec![
            Segment::new(0.0, 1.0, SegmentKind::Constant(1.0)),
            Segment::new(1.5, 2.0, SegmentKind::Constant(2.0)),
        ]);
        assert!(r.is_err());
        assert!(matches!(PiecewiseFn::from_segments(vec![]), Err(Error::EmptyFunction)));
    }

    #[test]
    fn lower_envelope_of_crossing_lines() {
        let lines = [LinearForm::new(1.0, 0.0), LinearForm::new(-1.0, 2.0), LinearForm::constant(5.0)];
        let env = lower_envelope(&lines, iv(0.0, 2.0));
        assert_eq!(env, vec![(iv(0.0, 1.0), 0), (iv(1.0, 2.0), 1)]);
        let up = upper_envelope(&lines, iv(0.0, 2.0));
        assert_eq!(up, vec![(iv(0.0, 2.0), 2)]);
    }

    #[test]
    fn lower_envelope_identical_lines_take_smallest_index() {
        let lines = [LinearForm::new(1.0, 1.0), LinearForm::new(0.0, 9.0), LinearForm::new(1.0, 1.0)];
        let env = lower_envelope(&lines, iv(-1.0, 1.0));
        assert_eq!(env, vec![(iv(-1.0, 1.0), 0)]);
        let lines = [LinearForm::new(1.0, 1.0), LinearForm::new(1.0, 1.0)];
        assert_eq!(lower_envelope(&lines[1..], iv(0.0, 1.0)), vec![(iv(0.0, 1.0), 0)]);
    }

    #[test]
    fn dump_round_trip() {
        let f = pw(&[
            (0.0, 1.0, SegmentKind::Constant(2.0)),
            (1.0, 2.0, SegmentKind::linear(1.0, 1.0)),
            (2.0, 3.0, SegmentKind::rational(1.0, 0.0, 1.0, 1.0)),
        ]);
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.starts_with(r#"{"domain":[0.0,3.0],"segments":[{"lo":0.0,"hi":1.0,"kind":"const","coef":[2.0]}"#));
        let back: PiecewiseFn = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
