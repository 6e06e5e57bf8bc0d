//! Proper lower-semicontinuous functions on the real line, represented as
//! ordered closed-form pieces with exact value, limiting-subdifferential and
//! level-band queries.
//!
//! Domain ownership is deterministic: every breakpoint belongs to the piece
//! on its left (the first piece also owns its left endpoint), so `eval` never
//! has to break ties. Lower semicontinuity is enforced by the constructor.

use serde::{Deserialize, Serialize};

/// Closed vocabulary of piece formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PieceForm {
    /// `slope * x + intercept`
    Affine { slope: f64, intercept: f64 },
    /// `coeff * |x - center|^exponent` with `coeff > 0`, `exponent > 0`
    Power {
        coeff: f64,
        exponent: f64,
        center: f64,
    },
    /// `a*x^2 + b*x + c`
    Quadratic { a: f64, b: f64, c: f64 },
    /// `base + amplitude * (1 - exp(-rate * |x - center|))`
    ExpSaturating {
        center: f64,
        amplitude: f64,
        rate: f64,
        base: f64,
    },
    /// `+∞` (explicit indicator extension)
    Indicator,
}

impl PieceForm {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            PieceForm::Affine { slope, intercept } => slope * x + intercept,
            PieceForm::Power {
                coeff,
                exponent,
                center,
            } => coeff * (x - center).abs().powf(exponent),
            PieceForm::Quadratic { a, b, c } => (a * x + b) * x + c,
            PieceForm::ExpSaturating {
                center,
                amplitude,
                rate,
                base,
            } => base + amplitude * (1.0 - (-rate * (x - center).abs()).exp()),
            PieceForm::Indicator => f64::INFINITY,
        }
    }

    /// Derivative of the formula at `x`; for `Power` and `ExpSaturating`
    /// this is the one-sided derivative away from the center (`±∞` for
    /// `Power` with exponent < 1 at the center).
    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            PieceForm::Affine { slope, .. } => slope,
            PieceForm::Power {
                coeff,
                exponent,
                center,
            } => {
                let d = x - center;
                if d == 0.0 {
                    if exponent > 1.0 {
                        0.0
                    } else if exponent == 1.0 {
                        coeff
                    } else {
                        f64::INFINITY
                    }
                } else {
                    coeff * exponent * d.abs().powf(exponent - 1.0) * d.signum()
                }
            }
            PieceForm::Quadratic { a, b, .. } => 2.0 * a * x + b,
            PieceForm::ExpSaturating {
                center,
                amplitude,
                rate,
                ..
            } => {
                let d = x - center;
                let m = amplitude * rate * (-rate * d.abs()).exp();
                if d < 0.0 {
                    -m
                } else {
                    m
                }
            }
            PieceForm::Indicator => f64::NAN,
        }
    }

    /// One-sided derivative at `x`; the side only matters at the center of
    /// `Power` and `ExpSaturating` formulas, where the two limits differ.
    pub fn derivative_sided(&self, x: f64, from_left: bool) -> f64 {
        match *self {
            PieceForm::Power {
                coeff,
                exponent,
                center,
            } if x == center => {
                let mag = if exponent > 1.0 {
                    0.0
                } else if exponent == 1.0 {
                    coeff
                } else {
                    f64::INFINITY
                };
                if from_left {
                    -mag
                } else {
                    mag
                }
            }
            PieceForm::ExpSaturating {
                center,
                amplitude,
                rate,
                ..
            } if x == center => {
                let mag = amplitude * rate;
                if from_left {
                    -mag
                } else {
                    mag
                }
            }
            _ => self.derivative(x),
        }
    }

    /// Interior point (if any) where the formula is not smooth, used to split
    /// pieces into monotone segments.
    pub fn kink(&self) -> Option<f64> {
        match *self {
            PieceForm::Power { center, .. } => Some(center),
            PieceForm::ExpSaturating { center, .. } => Some(center),
            PieceForm::Quadratic { a, b, .. } => {
                if a != 0.0 {
                    Some(-b / (2.0 * a))
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    fn params_finite(&self) -> bool {
        match *self {
            PieceForm::Affine { slope, intercept } => slope.is_finite() && intercept.is_finite(),
            PieceForm::Power {
                coeff,
                exponent,
                center,
            } => coeff.is_finite() && coeff > 0.0 && exponent.is_finite() && exponent > 0.0 && center.is_finite(),
            PieceForm::Quadratic { a, b, c } => a.is_finite() && b.is_finite() && c.is_finite(),
            PieceForm::ExpSaturating {
                center,
                amplitude,
                rate,
                base,
            } => {
                center.is_finite()
                    && amplitude.is_finite()
                    && amplitude > 0.0
                    && rate.is_finite()
                    && rate > 0.0
                    && base.is_finite()
            }
            PieceForm::Indicator => true,
        }
    }
}

/// One piece of a piecewise function. Bounds may be infinite; `None` in the
/// serialized domain stands for an unbounded side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub form: PieceForm,
}

impl Piece {
    pub fn new(lo: f64, hi: f64, form: PieceForm) -> Self {
        Piece { lo, hi, form }
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum FunctionError {
    #[error("piece list is empty")]
    Empty,
    #[error("piece {index} has an invalid domain [{lo}, {hi}]")]
    BadDomain { index: usize, lo: f64, hi: f64 },
    #[error("piece {index} has invalid formula parameters")]
    BadParams { index: usize },
    #[error("pieces {left} and {right} do not share a boundary")]
    NotContiguous { left: usize, right: usize },
    #[error("not lower semicontinuous at x = {x}: f(x) = {value} exceeds the limit {limit}")]
    NotLsc { x: f64, value: f64, limit: f64 },
    #[error("x = {0} lies outside the effective domain")]
    OutsideDomain(f64),
    #[error("no derivative descriptor available at x = {0}")]
    NotRepresentable(f64),
    #[error("level band requires lo < hi, got [{lo}, {hi}]")]
    BadBand { lo: f64, hi: f64 },
    #[error("invalid function description: {0}")]
    Parse(String),
}

/// A proper lsc function on an interval of the real line.
#[derive(Debug, Clone, PartialEq)]
pub struct Piecewise1D {
    pieces: Vec<Piece>,
}

#[derive(Serialize, Deserialize)]
struct PieceWire {
    domain: [Option<f64>; 2],
    form: PieceForm,
}

#[derive(Serialize, Deserialize)]
struct PiecewiseWire {
    pieces: Vec<PieceWire>,
}

impl Piecewise1D {
    pub fn new(pieces: Vec<Piece>) -> Result<Self, FunctionError> {
        if pieces.is_empty() {
            return Err(FunctionError::Empty);
        }
        for (i, p) in pieces.iter().enumerate() {
            let lo_ok = p.lo.is_finite() || p.lo == f64::NEG_INFINITY;
            let hi_ok = p.hi.is_finite() || p.hi == f64::INFINITY;
            if !lo_ok || !hi_ok || p.lo > p.hi || (p.lo == p.hi && !p.lo.is_finite()) {
                return Err(FunctionError::BadDomain {
                    index: i,
                    lo: p.lo,
                    hi: p.hi,
                });
            }
            if !p.form.params_finite() {
                return Err(FunctionError::BadParams { index: i });
            }
        }
        for i in 1..pieces.len() {
            if pieces[i - 1].hi != pieces[i].lo {
                return Err(FunctionError::NotContiguous {
                    left: i - 1,
                    right: i,
                });
            }
        }
        let f = Piecewise1D { pieces };
        f.check_lsc()?;
        Ok(f)
    }

    fn check_lsc(&self) -> Result<(), FunctionError> {
        for i in 0..self.pieces.len() {
            let p = self.pieces[i];
            if matches!(p.form, PieceForm::Indicator) {
                continue;
            }
            // at the shared boundary the owner is the left piece; the value
            // there must not exceed the limit from the right piece
            if p.hi.is_finite() {
                let v = p.form.value(p.hi);
                if !v.is_finite() {
                    return Err(FunctionError::BadParams { index: i });
                }
                if let Some(q) = self.pieces.get(i + 1) {
                    let lim = q.form.value(p.hi);
                    if v > lim + 1e-12 * (1.0 + lim.abs()) {
                        return Err(FunctionError::NotLsc {
                            x: p.hi,
                            value: v,
                            limit: lim,
                        });
                    }
                }
            }
            // a point piece must also sit below the limit from its left
            if p.lo == p.hi {
                if i > 0 {
                    let lim = self.pieces[i - 1].form.value(p.lo);
                    let v = p.form.value(p.lo);
                    if v > lim + 1e-12 * (1.0 + lim.abs()) {
                        return Err(FunctionError::NotLsc {
                            x: p.lo,
                            value: v,
                            limit: lim,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Domain covered by the pieces (indicator pieces included).
    pub fn domain(&self) -> (f64, f64) {
        (self.pieces[0].lo, self.pieces[self.pieces.len() - 1].hi)
    }

    /// Index of the piece owning `x`, or `None` outside the covered domain.
    /// Point pieces own their point; otherwise the left piece owns its closed
    /// right end and the first piece owns its left end.
    fn owner(&self, x: f64) -> Option<usize> {
        let (lo, hi) = self.domain();
        if x < lo || x > hi || x.is_nan() {
            return None;
        }
        for (i, p) in self.pieces.iter().enumerate() {
            if p.lo == p.hi && x == p.lo {
                return Some(i);
            }
        }
        for (i, p) in self.pieces.iter().enumerate() {
            if p.lo < p.hi && ((x > p.lo && x <= p.hi) || (i == 0 && x == p.lo)) {
                return Some(i);
            }
        }
        None
    }

    /// f(x), `+∞` outside the effective domain.
    pub fn eval(&self, x: f64) -> f64 {
        match self.owner(x) {
            Some(i) => self.pieces[i].form.value(x),
            None => f64::INFINITY,
        }
    }

    /// One-sided limits `(value, slope)` approaching `x` from below.
    fn left_limit(&self, x: f64) -> (f64, f64) {
        let mut best: Option<&Piece> = None;
        for p in &self.pieces {
            if p.lo < x && x <= p.hi {
                best = Some(p);
                break;
            }
        }
        match best {
            Some(p) if !matches!(p.form, PieceForm::Indicator) => {
                (p.form.value(x), p.form.derivative_sided(x, true))
            }
            _ => (f64::INFINITY, f64::NAN),
        }
    }

    /// One-sided limits `(value, slope)` approaching `x` from above.
    fn right_limit(&self, x: f64) -> (f64, f64) {
        let mut best: Option<&Piece> = None;
        for p in &self.pieces {
            if p.lo <= x && x < p.hi {
                best = Some(p);
                break;
            }
        }
        match best {
            Some(p) if !matches!(p.form, PieceForm::Indicator) => {
                (p.form.value(x), p.form.derivative_sided(x, false))
            }
            _ => (f64::INFINITY, f64::NAN),
        }
    }

    /// Exact limiting subdifferential ∂f(x).
    pub fn limiting_subdiff(&self, x: f64) -> Result<SubdiffSet, FunctionError> {
        let v = self.eval(x);
        if !v.is_finite() {
            return Err(FunctionError::OutsideDomain(x));
        }
        if matches!(self.pieces[self.owner(x).unwrap()].form, PieceForm::Indicator) {
            return Err(FunctionError::NotRepresentable(x));
        }
        let near = 1e-12 * (1.0 + v.abs());
        let (lval, lslope) = self.left_limit(x);
        let (rval, rslope) = self.right_limit(x);
        let touches_left = (lval - v).abs() <= near;
        let touches_right = (rval - v).abs() <= near;

        // Fréchet interval: constrained below by the left slope when the
        // function is continuous from the left, above by the right slope when
        // continuous from the right; a jump on a side removes its constraint.
        let lo_bound = if touches_left { lslope } else { f64::NEG_INFINITY };
        let hi_bound = if touches_right { rslope } else { f64::INFINITY };

        let mut set = SubdiffSet::empty();
        if lo_bound <= hi_bound {
            set.push(lo_bound, hi_bound);
        }
        // limits of gradients along f-convergent interior sequences
        if touches_left && lslope.is_finite() {
            set.push(lslope, lslope);
        }
        if touches_right && rslope.is_finite() {
            set.push(rslope, rslope);
        }
        if set.intervals.is_empty() && lo_bound > hi_bound && !lslope.is_finite() && !rslope.is_finite() {
            return Err(FunctionError::NotRepresentable(x));
        }
        Ok(set.normalized())
    }

    /// dist(0, ∂f(x)); `0` exactly at stationary points, `+∞` when ∂f(x) = ∅.
    pub fn dist_zero_subdiff(&self, x: f64) -> Result<f64, FunctionError> {
        Ok(self.limiting_subdiff(x)?.dist_to_zero())
    }

    /// The set `{x : lo < f(x) - base < hi}` as an exact union of intervals.
    pub fn level_band(&self, base: f64, lo: f64, hi: f64) -> Result<BandSet, FunctionError> {
        if !(lo < hi) {
            return Err(FunctionError::BadBand { lo, hi });
        }
        self.band(base, lo, false, hi)
    }

    /// `{x : lo ≤/< f(x) - base < hi}`; `lo_closed` selects the lower bound.
    pub(crate) fn band(
        &self,
        base: f64,
        lo: f64,
        lo_closed: bool,
        hi: f64,
    ) -> Result<BandSet, FunctionError> {
        let vlo = base + lo;
        let vhi = base + hi;
        let mut parts: Vec<Interval> = Vec::new();
        for seg in self.monotone_segments() {
            if let Some(iv) = seg.preimage_window(self, vlo, lo_closed, vhi) {
                if iv.lo < iv.hi || (iv.lo == iv.hi && !iv.lo_open && !iv.hi_open) {
                    parts.push(iv);
                }
            }
        }
        Ok(BandSet::from_parts(parts))
    }

    /// Monotone segments of the owned domain, splitting pieces at interior
    /// kinks and quadratic vertices.
    pub(crate) fn monotone_segments(&self) -> Vec<Segment> {
        let mut out = Vec::new();
        for (idx, p) in self.pieces.iter().enumerate() {
            if matches!(p.form, PieceForm::Indicator) {
                continue;
            }
            if p.lo == p.hi {
                out.push(Segment {
                    piece: idx,
                    x_lo: p.lo,
                    x_hi: p.hi,
                    lo_attained: true,
                    hi_attained: true,
                });
                continue;
            }
            let lo_attained = idx == 0 && p.lo.is_finite();
            // the right end is surrendered to a following point piece
            let next_is_point = self
                .pieces
                .get(idx + 1)
                .is_some_and(|q| q.lo == q.hi);
            let hi_attained = p.hi.is_finite() && !next_is_point;
            let mut cuts = vec![p.lo, p.hi];
            if let Some(k) = p.form.kink() {
                if k > p.lo && k < p.hi {
                    cuts.insert(1, k);
                }
            }
            for w in cuts.windows(2) {
                let (a, b) = (w[0], w[1]);
                out.push(Segment {
                    piece: idx,
                    x_lo: a,
                    x_hi: b,
                    lo_attained: a == p.lo && lo_attained,
                    hi_attained: if b == p.hi { hi_attained } else { true },
                });
            }
        }
        out
    }

    /// Breakpoints whose subdifferential differs from the neighboring slopes:
    /// all piece boundaries and interior kinks, with the domain edges.
    pub(crate) fn corner_points(&self) -> Vec<f64> {
        let mut xs = Vec::new();
        for p in &self.pieces {
            if p.lo.is_finite() {
                xs.push(p.lo);
            }
            if p.hi.is_finite() {
                xs.push(p.hi);
            }
            if let Some(k) = p.form.kink() {
                if k > p.lo && k < p.hi {
                    xs.push(k);
                }
            }
        }
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs.dedup();
        xs
    }

    pub fn to_json(&self) -> String {
        let wire = PiecewiseWire {
            pieces: self
                .pieces
                .iter()
                .map(|p| PieceWire {
                    domain: [
                        p.lo.is_finite().then_some(p.lo),
                        p.hi.is_finite().then_some(p.hi),
                    ],
                    form: p.form,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&wire).expect("piecewise functions always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, FunctionError> {
        let wire: PiecewiseWire =
            serde_json::from_str(text).map_err(|e| FunctionError::Parse(e.to_string()))?;
        let pieces = wire
            .pieces
            .into_iter()
            .map(|p| Piece {
                lo: p.domain[0].unwrap_or(f64::NEG_INFINITY),
                hi: p.domain[1].unwrap_or(f64::INFINITY),
                form: p.form,
            })
            .collect();
        Self::new(pieces)
    }
}

/// A maximal interval on which the function is smooth and monotone.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Segment {
    pub piece: usize,
    pub x_lo: f64,
    pub x_hi: f64,
    /// whether the segment's x-endpoints belong to its owned set
    pub lo_attained: bool,
    pub hi_attained: bool,
}

impl Segment {
    pub fn form(&self, f: &Piecewise1D) -> PieceForm {
        f.pieces[self.piece].form
    }

    /// Values at the two x-endpoints (limits when unbounded).
    pub fn value_endpoints(&self, f: &Piecewise1D) -> (f64, f64) {
        let form = self.form(f);
        let va = if self.x_lo.is_finite() {
            form.value(self.x_lo)
        } else {
            limit_at_infinity(form, false)
        };
        let vb = if self.x_hi.is_finite() {
            form.value(self.x_hi)
        } else {
            limit_at_infinity(form, true)
        };
        (va, vb)
    }

    /// Direction of f on the segment: -1 decreasing, 0 constant, 1 increasing.
    pub fn direction(&self, f: &Piecewise1D) -> i8 {
        let (va, vb) = self.value_endpoints(f);
        if va < vb {
            1
        } else if va > vb {
            -1
        } else {
            0
        }
    }

    /// x with f(x) = v inside the segment (v within the value range).
    pub fn invert(&self, f: &Piecewise1D, v: f64) -> f64 {
        let form = self.form(f);
        let side_hint = 0.5 * (self.x_lo.max(-1e300) + self.x_hi.min(1e300));
        match form {
            PieceForm::Affine { slope, intercept } => (v - intercept) / slope,
            PieceForm::Power {
                coeff,
                exponent,
                center,
            } => {
                let r = (v / coeff).max(0.0).powf(1.0 / exponent);
                if side_hint >= center {
                    center + r
                } else {
                    center - r
                }
            }
            PieceForm::Quadratic { a, b, c } => {
                if a == 0.0 {
                    (v - c) / b
                } else {
                    let disc = (b * b - 4.0 * a * (c - v)).max(0.0).sqrt();
                    let x1 = (-b + disc) / (2.0 * a);
                    let x2 = (-b - disc) / (2.0 * a);
                    if (x1 - side_hint).abs() <= (x2 - side_hint).abs() {
                        x1
                    } else {
                        x2
                    }
                }
            }
            PieceForm::ExpSaturating {
                center,
                amplitude,
                rate,
                base,
            } => {
                let t = (1.0 - (v - base) / amplitude).max(1e-300);
                let r = -t.ln() / rate;
                if side_hint >= center {
                    center + r
                } else {
                    center - r
                }
            }
            PieceForm::Indicator => f64::NAN,
        }
    }

    /// Preimage of the value window `[vlo, vhi)` (or `(vlo, vhi)`) inside the
    /// segment's owned x-set, as an interval with openness flags.
    fn preimage_window(
        &self,
        f: &Piecewise1D,
        vlo: f64,
        lo_closed: bool,
        vhi: f64,
    ) -> Option<Interval> {
        let (va, vb) = self.value_endpoints(f);
        let dir = self.direction(f);
        if dir == 0 {
            // constant segment: inside the window or not
            let inside = if lo_closed { va >= vlo } else { va > vlo } && va < vhi;
            if !inside {
                return None;
            }
            return Some(Interval {
                lo: self.x_lo,
                hi: self.x_hi,
                lo_open: !self.lo_attained,
                hi_open: !self.hi_attained,
            });
        }
        // normalize to increasing value orientation
        let (v_small, v_big) = if dir > 0 { (va, vb) } else { (vb, va) };
        if v_small >= vhi || v_big < vlo || (v_big == vlo && !lo_closed) {
            return None;
        }
        // clip in value space, then invert the endpoints
        let (clip_lo, clip_lo_open) = if v_small > vlo || (v_small == vlo && lo_closed) {
            (v_small, false)
        } else {
            (vlo, !lo_closed)
        };
        let (clip_hi, clip_hi_open) = if v_big < vhi { (v_big, false) } else { (vhi, true) };
        if clip_hi < clip_lo || (clip_hi == clip_lo && (clip_lo_open || clip_hi_open)) {
            return None;
        }
        let x_at = |v: f64, at_small_end: bool| -> (f64, bool) {
            // map a clipped value back to x with its openness
            let (seg_end, seg_end_attained) = if (dir > 0) == at_small_end {
                (self.x_lo, self.lo_attained)
            } else {
                (self.x_hi, self.hi_attained)
            };
            let from_clip = if at_small_end { v != v_small } else { v != v_big };
            if from_clip {
                (self.invert(f, v), false)
            } else {
                (seg_end, !seg_end_attained)
            }
        };
        let (x_small, x_small_open) = {
            let (x, mut open) = x_at(clip_lo, true);
            if clip_lo_open {
                open = true;
            }
            (x, open)
        };
        let (x_big, x_big_open) = {
            let (x, mut open) = x_at(clip_hi, false);
            if clip_hi_open {
                open = true;
            }
            (x, open)
        };
        let (mut xl, mut xh, mut lo_open, mut hi_open) = if dir > 0 {
            (x_small, x_big, x_small_open, x_big_open)
        } else {
            (x_big, x_small, x_big_open, x_small_open)
        };
        // openness from value clipping maps to the matching x side
        if xl > xh {
            std::mem::swap(&mut xl, &mut xh);
            std::mem::swap(&mut lo_open, &mut hi_open);
        }
        Some(Interval {
            lo: xl,
            hi: xh,
            lo_open,
            hi_open,
        })
    }
}

fn limit_at_infinity(form: PieceForm, plus: bool) -> f64 {
    match form {
        PieceForm::Affine { slope, .. } => {
            if slope == 0.0 {
                form.value(0.0)
            } else if (slope > 0.0) == plus {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }
        }
        PieceForm::Power { .. } => f64::INFINITY,
        PieceForm::Quadratic { a, b, .. } => {
            if a > 0.0 {
                f64::INFINITY
            } else if a < 0.0 {
                f64::NEG_INFINITY
            } else if b == 0.0 {
                form.value(0.0)
            } else if (b > 0.0) == plus {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }
        }
        PieceForm::ExpSaturating {
            amplitude, base, ..
        } => base + amplitude,
        PieceForm::Indicator => f64::INFINITY,
    }
}

/// A finite union of disjoint closed intervals of subgradients; endpoints
/// may be infinite (rays at domain boundaries and jump points).
#[derive(Debug, Clone, PartialEq)]
pub struct SubdiffSet {
    intervals: Vec<(f64, f64)>,
}

impl SubdiffSet {
    pub fn empty() -> Self {
        SubdiffSet {
            intervals: Vec::new(),
        }
    }

    fn push(&mut self, lo: f64, hi: f64) {
        self.intervals.push((lo, hi));
    }

    fn normalized(mut self) -> Self {
        self.intervals
            .sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (lo, hi) in self.intervals.drain(..) {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        SubdiffSet { intervals: merged }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, v: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo <= v && v <= hi)
    }

    /// Distance from 0 to the set; `+∞` for the empty set.
    pub fn dist_to_zero(&self) -> f64 {
        self.dist_to(0.0)
    }

    pub fn dist_to(&self, v: f64) -> f64 {
        let mut best = f64::INFINITY;
        for &(lo, hi) in &self.intervals {
            let d = if v < lo {
                lo - v
            } else if v > hi {
                v - hi
            } else {
                0.0
            };
            best = best.min(d);
        }
        best
    }

    /// Endpoints `(min, max)`; only meaningful for nonempty sets.
    pub fn hull(&self) -> (f64, f64) {
        (
            self.intervals.first().map_or(f64::NAN, |i| i.0),
            self.intervals.last().map_or(f64::NAN, |i| i.1),
        )
    }
}

/// An interval of the real line with endpoint openness flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        (x > self.lo || (x == self.lo && !self.lo_open))
            && (x < self.hi || (x == self.hi && !self.hi_open))
    }

    pub fn is_unbounded(&self) -> bool {
        !self.lo.is_finite() || !self.hi.is_finite()
    }
}

/// A finite union of intervals, as returned by `level_band`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSet {
    pub intervals: Vec<Interval>,
    /// set when any component is unbounded
    pub unbounded: bool,
}

impl BandSet {
    fn from_parts(mut parts: Vec<Interval>) -> Self {
        parts.sort_by(|a, b| {
            a.lo.partial_cmp(&b.lo)
                .unwrap()
                .then(a.hi.partial_cmp(&b.hi).unwrap())
        });
        let mut merged: Vec<Interval> = Vec::new();
        for iv in parts {
            match merged.last_mut() {
                Some(last)
                    if iv.lo < last.hi
                        || (iv.lo == last.hi && (!last.hi_open || !iv.lo_open)) =>
                {
                    if iv.hi > last.hi || (iv.hi == last.hi && !iv.hi_open) {
                        last.hi = iv.hi;
                        last.hi_open = iv.hi_open;
                    }
                }
                _ => merged.push(iv),
            }
        }
        let unbounded = merged.iter().any(|iv| iv.is_unbounded());
        BandSet {
            intervals: merged,
            unbounded,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x))
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn three_slope() -> Piecewise1D {
        catalog::three_slope_step()
    }

    fn nonsmooth(rho: f64) -> Piecewise1D {
        catalog::nonsmooth_modulus(rho).unwrap()
    }

    #[test]
    fn eval_three_slope() {
        let f = three_slope();
        assert!((f.eval(0.2) - 0.1).abs() < 1e-15);
        assert_eq!(f.eval(-3.0), 0.0);
        assert!((f.eval(0.3) - (1.5 * (0.3 - 0.25) + 0.125)).abs() < 1e-15);
        assert!((f.eval(0.7) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn eval_nonsmooth_modulus() {
        let f = nonsmooth(1.0);
        assert_eq!(f.eval(0.0), 0.0);
        assert!((f.eval(0.5) - 0.125).abs() < 1e-15);
        assert!((f.eval(2.0) - 2.5).abs() < 1e-15);
        assert!((f.eval(-2.0) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn subdiff_at_convex_kink() {
        // kink of the three-slope function at x = 1/4: [1/2, 3/2]
        let f = three_slope();
        let s = f.limiting_subdiff(0.25).unwrap();
        assert_eq!(s.intervals(), &[(0.5, 1.5)]);
        // oracle: one-sided difference quotients from the adjacent pieces
        let dl = (f.eval(0.25) - f.eval(0.25 - 1e-7)) / 1e-7;
        let dr = (f.eval(0.25 + 1e-7) - f.eval(0.25)) / 1e-7;
        assert!((dl - 0.5).abs() < 1e-6 && (dr - 1.5).abs() < 1e-6);
    }

    #[test]
    fn subdiff_at_concave_kink_splits() {
        // at x = 1/2 the slope drops from 3/2 to 1: two isolated subgradients
        let f = three_slope();
        let s = f.limiting_subdiff(0.5).unwrap();
        assert_eq!(s.intervals(), &[(1.0, 1.0), (1.5, 1.5)]);
        assert!((f.dist_zero_subdiff(0.5).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn subdiff_smooth_minimum() {
        let f = nonsmooth(1.0);
        let s = f.limiting_subdiff(0.0).unwrap();
        assert_eq!(s.intervals(), &[(0.0, 0.0)]);
        assert_eq!(f.dist_zero_subdiff(0.0).unwrap(), 0.0);
    }

    #[test]
    fn dist_values() {
        let f = nonsmooth(1.0);
        assert!((f.dist_zero_subdiff(2.0).unwrap() - 2.0).abs() < 1e-15);
        let g = three_slope();
        assert!((g.dist_zero_subdiff(0.3).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn dist_matches_finite_differences_inside_smooth_pieces() {
        let f = nonsmooth(1.0);
        for &x in &[-1.7, -0.6, 0.3, 0.8, 1.9] {
            let d = f.dist_zero_subdiff(x).unwrap();
            let fd = ((f.eval(x + 5e-7) - f.eval(x - 5e-7)) / 1e-6).abs();
            assert!((d - fd).abs() < 1e-6, "x={x}: {d} vs {fd}");
        }
    }

    #[test]
    fn harmonic_series_eval_and_subdiff() {
        let f = catalog::harmonic_piecewise(50).unwrap();
        // partial-sum oracle for r_2 = sum_{k>=2} 1/(k^2 (k+1))
        let mut r2 = 0.0;
        for k in (2..2_000_000u64).rev() {
            let kf = k as f64;
            r2 += 1.0 / (kf * kf * (kf + 1.0));
        }
        assert!((f.eval(0.5) - r2).abs() < 1e-9, "{} vs {}", f.eval(0.5), r2);
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        assert!((f.eval(0.5) - (pi2 / 6.0 - 1.5)).abs() < 1e-12);
        let s = f.limiting_subdiff(0.5).unwrap();
        assert_eq!(s.intervals().len(), 1);
        let (lo, hi) = s.intervals()[0];
        assert!((lo - 0.5).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn convex_subdiff_endpoints_monotone() {
        let f = nonsmooth(1.0);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..200 {
            let x = -2.0 + 4.0 * i as f64 / 199.0;
            let s = f.limiting_subdiff(x).unwrap();
            let (lo, hi) = s.hull();
            assert!(lo >= prev - 1e-12);
            prev = hi.max(prev);
        }
    }

    #[test]
    fn level_band_exact() {
        let f = nonsmooth(1.0);
        let band = f.level_band(0.0, 0.0, 0.5).unwrap();
        // (-1, 1) \ {0}
        assert_eq!(band.intervals.len(), 2);
        assert!(band.contains(-0.5) && band.contains(0.5));
        assert!(!band.contains(0.0) && !band.contains(1.0) && !band.contains(-1.0));

        let g = three_slope();
        let b2 = g.level_band(0.0, 0.0, 0.125).unwrap();
        assert_eq!(b2.intervals.len(), 1);
        assert!(b2.contains(0.1) && !b2.contains(0.25) && !b2.contains(0.0));
        assert!((b2.intervals[0].hi - 0.25).abs() < 1e-15);
    }

    #[test]
    fn level_band_grid_membership() {
        let f = three_slope();
        let band = f.level_band(0.0, 0.03, 0.4).unwrap();
        for i in 0..10_000 {
            let x = -1.0 + 3.0 * i as f64 / 9_999.0;
            let v = f.eval(x);
            let inside = v - 0.0 > 0.03 && v - 0.0 < 0.4;
            assert_eq!(band.contains(x), inside, "x = {x}");
        }
    }

    #[test]
    fn empty_band() {
        // shifting the base below every value empties the band
        let f = three_slope();
        let b = f.level_band(-5.0, 0.0, 0.5).unwrap();
        assert!(b.is_empty());
    }

    #[test]
    fn lsc_violation_rejected() {
        // jump up from the left: f = 0 on (-inf, 0], then 1 beyond; the owner
        // value at the boundary must not exceed the limit from the right —
        // here it does not, so this one is fine
        let ok = Piecewise1D::new(vec![
            Piece::new(f64::NEG_INFINITY, 0.0, PieceForm::Affine { slope: 0.0, intercept: 0.0 }),
            Piece::new(0.0, f64::INFINITY, PieceForm::Affine { slope: 0.0, intercept: 1.0 }),
        ]);
        assert!(ok.is_ok());
        // owner value above the right limit breaks lower semicontinuity
        let bad = Piecewise1D::new(vec![
            Piece::new(f64::NEG_INFINITY, 0.0, PieceForm::Affine { slope: 0.0, intercept: 1.0 }),
            Piece::new(0.0, f64::INFINITY, PieceForm::Affine { slope: 0.0, intercept: 0.0 }),
        ]);
        assert!(matches!(bad, Err(FunctionError::NotLsc { .. })));
    }

    #[test]
    fn boundary_subdifferential_is_a_ray() {
        // f = x on [0, 1]: at 0 the subdifferential is (-inf, 1]
        let f = Piecewise1D::new(vec![Piece::new(
            0.0,
            1.0,
            PieceForm::Affine { slope: 1.0, intercept: 0.0 },
        )])
        .unwrap();
        let s = f.limiting_subdiff(0.0).unwrap();
        assert_eq!(s.intervals(), &[(f64::NEG_INFINITY, 1.0)]);
        assert_eq!(s.dist_to_zero(), 0.0);
        let t = f.limiting_subdiff(1.0).unwrap();
        assert_eq!(t.intervals(), &[(1.0, f64::INFINITY)]);
        assert_eq!(t.dist_to_zero(), 1.0);
        assert_eq!(f.eval(2.0), f64::INFINITY);
        assert!(f.limiting_subdiff(2.0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = nonsmooth(1.0);
        let text = f.to_json();
        let g = Piecewise1D::from_json(&text).unwrap();
        for i in 0..100 {
            let x = -3.0 + 6.0 * i as f64 / 99.0;
            assert_eq!(f.eval(x), g.eval(x));
        }
    }

    #[test]
    fn malformed_json_rejected() {
        assert!(Piecewise1D::from_json("{").is_err());
        assert!(Piecewise1D::from_json("{\"pieces\": []}").is_err());
        let gap = r#"{"pieces":[
            {"domain":[0.0,1.0],"form":{"affine":{"slope":1.0,"intercept":0.0}}},
            {"domain":[2.0,3.0],"form":{"affine":{"slope":1.0,"intercept":0.0}}}]}"#;
        assert!(matches!(
            Piecewise1D::from_json(gap),
            Err(FunctionError::NotContiguous { .. })
        ));
    }
}
