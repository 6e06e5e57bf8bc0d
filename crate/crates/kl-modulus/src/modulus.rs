//! The generalized concave KL property and its exact modulus.
//!
//! For one-dimensional piecewise functions the supremum function
//! `h(s) = sup { 1/dist(0, ∂f(x)) : x ∈ U ∩ [0 < f−f(x̄) < η], f(x)−f(x̄) ≥ s }`
//! decomposes into finitely many closed-form branches, one per monotone
//! segment and corner of `f`. The exact modulus `φ̃(t) = ∫₀ᵗ h` is then an
//! exact piecewise integral rather than a quadrature, which is what makes the
//! tight golden-value comparisons in the test suite possible.

use std::fmt;
use std::sync::Arc;

use crate::analytic::{upper_envelope, Cell, PiecewiseAnalytic, Term, WindowedTerm};
use crate::numerics::{self, NumericsError};
use crate::piecewise::{FunctionError, Interval, PieceForm, Piecewise1D};

#[derive(Debug, Clone, thiserror::Error)]
pub enum ModulusError {
    #[error("h is unbounded on the requested band (active for s <= {s_hi})")]
    HInfinite { s_hi: f64 },
    #[error("integral of h diverges near 0")]
    DivergentIntegral,
    #[error("anchor x = {0} is not in dom ∂f")]
    AnchorOutsideDomain(f64),
    #[error("neighborhood does not contain the anchor")]
    AnchorOutsideNeighborhood,
    #[error("eta must be positive")]
    BadEta,
    #[error("s = {0} lies outside (0, eta)")]
    BadS(f64),
    #[error("function is not convex on the interval (witnessed at x = {0})")]
    NotConvex(f64),
    #[error("function is not C1 away from the anchor (corner at x = {0})")]
    NotC1(f64),
    #[error("anchor is not a stationary point (dist(0, ∂f) = {0})")]
    NotStationary(f64),
    #[error("function is not constant on the anchor set: value {value} vs mu = {mu}")]
    NonConstantOnSet { value: f64, mu: f64 },
    #[error("supplied balls do not cover the set")]
    NoCover,
    #[error("empty certificate list")]
    NoCertificates,
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Anchor of a KL context: a single point or a finite set with common value.
#[derive(Debug, Clone, PartialEq)]
pub enum Anchor {
    Point(f64),
    Set(Vec<Vec<f64>>),
}

/// Neighborhood descriptor: an interval of the line, or the ε-enlargement of
/// the anchor set.
#[derive(Debug, Clone, PartialEq)]
pub enum Neighborhood {
    Interval(Interval),
    Enlargement(f64),
}

/// The data against which KL inequalities and moduli are defined.
#[derive(Debug, Clone, PartialEq)]
pub struct KlContext {
    pub anchor: Anchor,
    pub neighborhood: Neighborhood,
    pub eta: f64,
    pub base: f64,
}

impl KlContext {
    /// Pointwise context at `xbar` with interval neighborhood `u`.
    pub fn pointwise(
        f: &Piecewise1D,
        xbar: f64,
        u: Interval,
        eta: f64,
    ) -> Result<Self, ModulusError> {
        if !(eta > 0.0) {
            return Err(ModulusError::BadEta);
        }
        let base = f.eval(xbar);
        if !base.is_finite() || f.limiting_subdiff(xbar)?.is_empty() {
            return Err(ModulusError::AnchorOutsideDomain(xbar));
        }
        if !u.contains(xbar) {
            return Err(ModulusError::AnchorOutsideNeighborhood);
        }
        Ok(KlContext {
            anchor: Anchor::Point(xbar),
            neighborhood: Neighborhood::Interval(u),
            eta,
            base,
        })
    }

    /// Pointwise context with `U = ℝ`.
    pub fn global(f: &Piecewise1D, xbar: f64, eta: f64) -> Result<Self, ModulusError> {
        Self::pointwise(f, xbar, Interval::full_line(), eta)
    }

    pub fn interval_u(&self) -> Interval {
        match self.neighborhood {
            Neighborhood::Interval(iv) => iv,
            Neighborhood::Enlargement(_) => Interval::full_line(),
        }
    }
}

impl Interval {
    pub fn full_line() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            lo_open: true,
            hi_open: true,
        }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Interval {
            lo,
            hi,
            lo_open: true,
            hi_open: true,
        }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Interval {
            lo,
            hi,
            lo_open: false,
            hi_open: false,
        }
    }

    pub fn ball(center: f64, radius: f64) -> Self {
        Interval::open(center - radius, center + radius)
    }
}

/// Where a desingularizing function came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ExactModulus,
    Bdlm,
    BdlmConvex,
    Growth,
    NonstationaryPower,
    User,
    Combined,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Provenance::ExactModulus => "exact-modulus",
            Provenance::Bdlm => "bdlm",
            Provenance::BdlmConvex => "bdlm-convex",
            Provenance::Growth => "growth",
            Provenance::NonstationaryPower => "nonstationary",
            Provenance::User => "user",
            Provenance::Combined => "combined",
        };
        f.write_str(s)
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum PhiForm {
    /// `φ(t) = ∫₀ᵗ h` for a decreasing piecewise-analytic `h`
    DecreasingIntegral {
        h: PiecewiseAnalytic,
        /// cumulative integral at each cell's right edge
        cum: Vec<f64>,
    },
    /// `c · t^{1-θ}`
    PowerForm { c: f64, theta: f64 },
    /// direct formulas (golden catalog entries, quadrature-backed rivals)
    Closure {
        eval: ScalarFn,
        left_deriv: Option<ScalarFn>,
    },
    Sum(Vec<Desingularizer>),
}

impl fmt::Debug for PhiForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiForm::DecreasingIntegral { h, .. } => {
                write!(f, "DecreasingIntegral({} cells)", h.cells().len())
            }
            PhiForm::PowerForm { c, theta } => write!(f, "PowerForm(c={c}, theta={theta})"),
            PhiForm::Closure { .. } => write!(f, "Closure"),
            PhiForm::Sum(parts) => write!(f, "Sum({} parts)", parts.len()),
        }
    }
}

/// A concave strictly increasing reparameterization `φ` on `[0, η)` with
/// `φ(0) = 0`, evaluable together with its left derivative.
#[derive(Debug, Clone)]
pub struct Desingularizer {
    eta: f64,
    provenance: Provenance,
    concave: bool,
    form: PhiForm,
}

impl Desingularizer {
    pub fn from_decreasing_integral(
        h: PiecewiseAnalytic,
        eta: f64,
        provenance: Provenance,
    ) -> Result<Self, ModulusError> {
        // cum[i] holds ∫ from the domain start to cells[i].hi; an unbounded
        // final cell keeps the running value at its left edge and is
        // integrated on demand
        let mut cum = Vec::with_capacity(h.cells().len());
        let mut acc = 0.0;
        for cell in h.cells() {
            let probe_hi = if cell.hi.is_finite() {
                cell.hi
            } else {
                cell.lo + 1.0
            };
            let part = cell
                .term
                .integrate(cell.lo, probe_hi)
                .map_err(|_| ModulusError::DivergentIntegral)?;
            if cell.hi.is_finite() {
                acc += part;
            }
            cum.push(acc);
        }
        let concave = h.is_decreasing(1e-9);
        Ok(Desingularizer {
            eta,
            provenance,
            concave,
            form: PhiForm::DecreasingIntegral { h, cum },
        })
    }

    pub fn power_form(c: f64, theta: f64, eta: f64, provenance: Provenance) -> Self {
        Desingularizer {
            eta,
            provenance,
            concave: (0.0..1.0).contains(&theta) && c > 0.0,
            form: PhiForm::PowerForm { c, theta },
        }
    }

    pub fn from_formulas(
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        left_deriv: Option<ScalarFn>,
        eta: f64,
        provenance: Provenance,
    ) -> Self {
        let eval: ScalarFn = Arc::new(eval);
        // consecutive-triple midpoint scan; cheap enough for
        // quadrature-backed formulas
        let grid = concavity_grid(eta);
        let vals: Vec<f64> = grid.iter().map(|&t| eval(t)).collect();
        let concave = vals
            .windows(3)
            .all(|w| w[1] >= 0.5 * (w[0] + w[2]) - 1e-7 * (1.0 + w[1].abs()));
        Desingularizer {
            eta,
            provenance,
            concave,
            form: PhiForm::Closure { eval, left_deriv },
        }
    }

    pub fn sum(parts: Vec<Desingularizer>, provenance: Provenance) -> Self {
        let eta = parts.iter().map(|p| p.eta).fold(f64::INFINITY, f64::min);
        let concave = parts.iter().all(|p| p.concave);
        Desingularizer {
            eta,
            provenance,
            concave,
            form: PhiForm::Sum(parts),
        }
    }

    /// A trivial `φ ≡ 0` (empty-band convention).
    pub fn zero(provenance: Provenance) -> Self {
        Desingularizer {
            eta: f64::INFINITY,
            provenance,
            concave: true,
            form: PhiForm::Closure {
                eval: Arc::new(|_| 0.0),
                left_deriv: Some(Arc::new(|_| 0.0)),
            },
        }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn is_concave(&self) -> bool {
        self.concave
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match &self.form {
            PhiForm::DecreasingIntegral { h, cum } => {
                let cells = h.cells();
                let mut before = 0.0;
                for (i, cell) in cells.iter().enumerate() {
                    if t <= cell.hi || i == cells.len() - 1 {
                        let upto = t.min(cell.hi);
                        return before
                            + cell
                                .term
                                .integrate(cell.lo, upto)
                                .unwrap_or(f64::INFINITY);
                    }
                    before = cum[i];
                }
                before
            }
            PhiForm::PowerForm { c, theta } => c * t.powf(1.0 - theta),
            PhiForm::Closure { eval, .. } => eval(t),
            PhiForm::Sum(parts) => parts.iter().map(|p| p.eval(t)).sum(),
        }
    }

    /// Left derivative `φ′₋(t)`; closed form where available, one-sided
    /// difference quotient at resolution `tol` otherwise.
    pub fn left_deriv(&self, t: f64, tol: f64) -> Result<f64, NumericsError> {
        if !(t > 0.0) {
            return Err(NumericsError::AtOrigin(t));
        }
        match &self.form {
            PhiForm::DecreasingIntegral { h, .. } => Ok(h.eval(t)),
            PhiForm::PowerForm { c, theta } => Ok(c * (1.0 - theta) * t.powf(-theta)),
            PhiForm::Closure { eval, left_deriv } => match left_deriv {
                Some(d) => Ok(d(t)),
                None => numerics::left_quotient(|x| eval(x), t, tol),
            },
            PhiForm::Sum(parts) => {
                let mut acc = 0.0;
                for p in parts {
                    acc += p.left_deriv(t, tol)?;
                }
                Ok(acc)
            }
        }
    }

    /// The integrand cells when this function is an exact decreasing
    /// integral (used by reports).
    pub fn integrand_cells(&self) -> Option<&PiecewiseAnalytic> {
        match &self.form {
            PhiForm::DecreasingIntegral { h, .. } => Some(h),
            _ => None,
        }
    }
}

/// Left derivative of a desingularizing function (closed-form branch when
/// available, concavity-safe difference quotient otherwise).
pub fn left_derivative(
    phi: &Desingularizer,
    t: f64,
    tol: f64,
) -> Result<f64, NumericsError> {
    phi.left_deriv(t, tol)
}

fn concavity_grid(eta: f64) -> Vec<f64> {
    let hi = if eta.is_finite() { eta * (1.0 - 1e-9) } else { 10.0 };
    let mut grid: Vec<f64> = Vec::with_capacity(64);
    for i in 1..=64 {
        grid.push(hi * i as f64 / 64.0);
    }
    grid
}

/// A finite closed-form branch of the supremum function, active on the
/// window `(s_lo, s_hi]` (or `(s_lo, s_hi)` when the right edge value is not
/// attained by any admissible point).
#[derive(Debug, Clone)]
struct FiniteBranch {
    s_lo: f64,
    s_hi: f64,
    hi_incl: bool,
    term: Term,
}

/// A window of `s` on which `h(s) = +∞`.
#[derive(Debug, Clone, Copy)]
struct InfiniteBranch {
    s_hi: f64,
    hi_incl: bool,
}

#[derive(Debug, Clone, Default)]
struct SupBranches {
    finite: Vec<FiniteBranch>,
    infinite: Vec<InfiniteBranch>,
}

/// The reciprocal-slope of a piece formula expressed as a closed form in the
/// band coordinate `s = f(x) − base`.
pub(crate) fn q_term_for(form: &PieceForm, base: f64) -> Option<Term> {
    match *form {
        PieceForm::Affine { slope, .. } => {
            if slope == 0.0 {
                None
            } else {
                Some(Term::Const(1.0 / slope.abs()))
            }
        }
        PieceForm::Power {
            coeff, exponent, ..
        } => Some(Term::Power {
            c: coeff.powf(-1.0 / exponent) / exponent,
            shift: base,
            expo: (1.0 - exponent) / exponent,
        }),
        PieceForm::Quadratic { a, b, c } => {
            if a == 0.0 {
                if b == 0.0 {
                    None
                } else {
                    Some(Term::Const(1.0 / b.abs()))
                }
            } else if a > 0.0 {
                Some(Term::Power {
                    c: 1.0 / (4.0 * a).sqrt(),
                    shift: base - c + b * b / (4.0 * a),
                    expo: -0.5,
                })
            } else {
                Some(Term::PowerNeg {
                    c: 1.0 / (-4.0 * a).sqrt(),
                    cap: (b * b - 4.0 * a * c) / (-4.0 * a) - base,
                    expo: -0.5,
                })
            }
        }
        PieceForm::ExpSaturating {
            amplitude,
            rate,
            base: piece_base,
            ..
        } => Some(Term::PowerNeg {
            c: 1.0 / rate,
            cap: amplitude + piece_base - base,
            expo: -1.0,
        }),
        PieceForm::Indicator => None,
    }
}

/// Builds the exact branch decomposition of the supremum function for a
/// pointwise context on the line.
fn build_branches(f: &Piecewise1D, ctx: &KlContext) -> SupBranches {
    let u = ctx.interval_u();
    let base = ctx.base;
    let eta = ctx.eta;
    let mut out = SupBranches::default();

    for seg in f.monotone_segments() {
        // clip to the neighborhood
        let (xs, lo_att) = if seg.x_lo >= u.lo {
            (
                seg.x_lo,
                seg.lo_attained && (seg.x_lo > u.lo || !u.lo_open),
            )
        } else {
            (u.lo, !u.lo_open)
        };
        let (xh, hi_att) = if seg.x_hi <= u.hi {
            (
                seg.x_hi,
                seg.hi_attained && (seg.x_hi < u.hi || !u.hi_open),
            )
        } else {
            (u.hi, !u.hi_open)
        };
        if xs > xh || (xs == xh && (!lo_att || !hi_att)) {
            continue;
        }
        let form = seg.form(f);
        if xs == xh {
            // degenerate clip: a single admissible point
            let v = form.value(xs);
            let s_at = v - base;
            if s_at > 0.0 && s_at < eta {
                let d = f.dist_zero_subdiff(xs).unwrap_or(f64::INFINITY);
                if d == 0.0 {
                    out.infinite.push(InfiniteBranch {
                        s_hi: s_at,
                        hi_incl: true,
                    });
                } else if d.is_finite() {
                    out.finite.push(FiniteBranch {
                        s_lo: 0.0,
                        s_hi: s_at,
                        hi_incl: true,
                        term: Term::Const(1.0 / d),
                    });
                }
            }
            continue;
        }
        let clipped = crate::piecewise::Segment {
            piece: seg.piece,
            x_lo: xs,
            x_hi: xh,
            lo_attained: lo_att,
            hi_attained: hi_att,
        };
        let (va, vb) = clipped.value_endpoints(f);
        let dir = if va < vb {
            1
        } else if va > vb {
            -1
        } else {
            0
        };
        if dir == 0 {
            // flat segment: stationary interior points at a single level
            let s_at = va - base;
            if s_at > 0.0 && s_at < eta {
                out.infinite.push(InfiniteBranch {
                    s_hi: s_at,
                    hi_incl: true,
                });
            }
            continue;
        }
        let (v_small, small_att, v_big, big_att) = if dir > 0 {
            (va, lo_att, vb, hi_att)
        } else {
            (vb, hi_att, va, lo_att)
        };
        let _ = small_att;
        if v_small - base >= eta || v_big - base <= 0.0 {
            continue; // segment entirely outside the band
        }
        let term = match q_term_for(&form, base) {
            Some(t) => t,
            None => {
                // slope identically zero on a non-flat segment cannot happen
                continue;
            }
        };
        let s_big = v_big - base;
        match term.monotonicity() {
            0 => {
                let s_hi = s_big.min(eta);
                out.finite.push(FiniteBranch {
                    s_lo: 0.0,
                    s_hi,
                    hi_incl: if s_big <= eta { big_att } else { true },
                    term,
                });
            }
            m if m < 0 => {
                // supremum at the moving lower boundary of the value window
                let s_small = (v_small - base).max(0.0);
                if s_small > 0.0 {
                    out.finite.push(FiniteBranch {
                        s_lo: 0.0,
                        s_hi: s_small,
                        hi_incl: true,
                        term: Term::Const(term.eval(s_small)),
                    });
                }
                out.finite.push(FiniteBranch {
                    s_lo: s_small,
                    s_hi: s_big.min(eta),
                    hi_incl: if s_big <= eta { big_att } else { true },
                    term,
                });
            }
            _ => {
                // supremum at the upper value end (band-capped)
                let s_up = s_big.min(eta);
                let q_up = term.eval(s_up);
                let s_hi = s_big.min(eta);
                let hi_incl = if s_big <= eta { big_att } else { true };
                if q_up.is_finite() {
                    out.finite.push(FiniteBranch {
                        s_lo: 0.0,
                        s_hi,
                        hi_incl,
                        term: Term::Const(q_up),
                    });
                } else {
                    out.infinite.push(InfiniteBranch { s_hi, hi_incl });
                }
            }
        }
    }

    // corner contributions evaluated through the full subdifferential
    for xc in f.corner_points() {
        if !u.contains(xc) {
            continue;
        }
        let v = f.eval(xc);
        if !v.is_finite() {
            continue;
        }
        let s_at = v - base;
        if s_at <= 0.0 || s_at >= eta {
            continue;
        }
        match f.dist_zero_subdiff(xc) {
            Ok(d) if d == 0.0 => out.infinite.push(InfiniteBranch {
                s_hi: s_at,
                hi_incl: true,
            }),
            Ok(d) if d.is_finite() => out.finite.push(FiniteBranch {
                s_lo: 0.0,
                s_hi: s_at,
                hi_incl: true,
                term: Term::Const(1.0 / d),
            }),
            _ => {}
        }
    }

    out
}

/// Result of a pointwise supremum query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HEval {
    Sup(f64),
    /// the constraint set is empty at this `s`
    Empty,
}

impl HEval {
    pub fn value_or(&self, empty: f64) -> f64 {
        match self {
            HEval::Sup(v) => *v,
            HEval::Empty => empty,
        }
    }
}

/// Exact value of the supremum function `h(s)` for a pointwise context.
pub fn h_of_s(f: &Piecewise1D, ctx: &KlContext, s: f64) -> Result<HEval, ModulusError> {
    if !(s > 0.0 && s < ctx.eta) {
        return Err(ModulusError::BadS(s));
    }
    let branches = build_branches(f, ctx);
    for b in &branches.infinite {
        if s < b.s_hi || (s == b.s_hi && b.hi_incl) {
            return Err(ModulusError::HInfinite { s_hi: b.s_hi });
        }
    }
    let mut best = f64::NEG_INFINITY;
    let mut any = false;
    for b in &branches.finite {
        if s > b.s_lo && (s < b.s_hi || (s == b.s_hi && b.hi_incl)) {
            any = true;
            best = best.max(b.term.eval(s));
        }
    }
    if any {
        Ok(HEval::Sup(best))
    } else {
        Ok(HEval::Empty)
    }
}

/// How a modulus was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModulusMethod {
    /// exact piecewise branch decomposition
    ClosedForm,
    /// branch-inverse route for convex C1 functions (quadrature-backed)
    ConvexInverse,
    /// deterministic grid table (setwise / oracle fallback)
    GridTable { points: usize },
}

enum HRepr {
    Cells(PiecewiseAnalytic),
    Sampler(ScalarFn),
    Zero,
}

impl fmt::Debug for HRepr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HRepr::Cells(c) => write!(f, "Cells({})", c.cells().len()),
            HRepr::Sampler(_) => write!(f, "Sampler"),
            HRepr::Zero => write!(f, "Zero"),
        }
    }
}

/// The exact modulus of the generalized concave KL property for a context.
#[derive(Debug)]
pub struct ExactModulus {
    pub context: KlContext,
    pub trivial: bool,
    pub method: ModulusMethod,
    h: HRepr,
    phi: Desingularizer,
}

impl ExactModulus {
    pub fn desingularizer(&self) -> &Desingularizer {
        &self.phi
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.phi.eval(t)
    }

    pub fn left_deriv(&self, t: f64) -> f64 {
        self.phi.left_deriv(t, 1e-8).unwrap_or(0.0)
    }

    /// Sampler view of the integrand (0 on the empty region).
    pub fn h_at(&self, s: f64) -> f64 {
        match &self.h {
            HRepr::Cells(c) => c.eval(s),
            HRepr::Sampler(f) => f(s),
            HRepr::Zero => 0.0,
        }
    }

    pub fn h_cells(&self) -> Option<&PiecewiseAnalytic> {
        match &self.h {
            HRepr::Cells(c) => Some(c),
            _ => None,
        }
    }

    /// Rows `(t, φ̃(t), φ̃′₋(t))` over the supplied grid.
    pub fn sample(&self, ts: &[f64]) -> Vec<(f64, f64, f64)> {
        ts.iter()
            .map(|&t| {
                let v = self.eval(t);
                let d = if t > 0.0 { self.left_deriv(t) } else { f64::NAN };
                (t, v, d)
            })
            .collect()
    }
}

/// Exact modulus for a pointwise context via the closed-form branch path.
pub fn exact_modulus(f: &Piecewise1D, ctx: &KlContext) -> Result<ExactModulus, ModulusError> {
    let branches = build_branches(f, ctx);
    let eta = ctx.eta;
    for b in &branches.infinite {
        if b.s_hi > 0.0 {
            return Err(ModulusError::HInfinite { s_hi: b.s_hi });
        }
    }
    if branches.finite.is_empty() {
        return Ok(ExactModulus {
            context: ctx.clone(),
            trivial: true,
            method: ModulusMethod::ClosedForm,
            h: HRepr::Zero,
            phi: Desingularizer::zero(Provenance::ExactModulus),
        });
    }
    let max_edge = branches
        .finite
        .iter()
        .map(|b| b.s_hi)
        .filter(|v| v.is_finite())
        .fold(1.0f64, f64::max);
    let horizon = if eta.is_finite() {
        eta
    } else {
        (4.0 * max_edge).max(1e6)
    };
    let windows: Vec<WindowedTerm> = branches
        .finite
        .iter()
        .map(|b| WindowedTerm {
            s_lo: b.s_lo,
            s_hi: b.s_hi.min(horizon),
            term: b.term,
        })
        .collect();
    let mut h = upper_envelope(&windows, 0.0, horizon);
    if !eta.is_finite() {
        // extend the final regime to the open upper end
        let mut cells = h.cells().to_vec();
        if let Some(last) = cells.last_mut() {
            last.hi = f64::INFINITY;
        }
        h = PiecewiseAnalytic::new(cells).expect("extended cells stay contiguous");
    }
    debug_assert!(h.is_decreasing(1e-7), "supremum function must decrease");
    let phi = Desingularizer::from_decreasing_integral(h.clone(), eta, Provenance::ExactModulus)?;
    Ok(ExactModulus {
        context: ctx.clone(),
        trivial: false,
        method: ModulusMethod::ClosedForm,
        h: HRepr::Cells(h),
        phi,
    })
}

/// Largest `eta` for which the supremum function stays finite on `(0, eta)`
/// for nested neighborhoods `u` (infinite when every eta works).
pub fn probe_eta(f: &Piecewise1D, xbar: f64, u: Interval) -> Result<f64, ModulusError> {
    let finite = |eta: f64| -> Result<bool, ModulusError> {
        let ctx = KlContext::pointwise(f, xbar, u, eta)?;
        let branches = build_branches(f, &ctx);
        Ok(branches.infinite.iter().all(|b| b.s_hi <= 0.0))
    };
    if finite(1e12)? {
        return Ok(f64::INFINITY);
    }
    if !finite(1e-12)? {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (1e-12f64, 1e12f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if finite(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Exact modulus of a convex, piecewise-C1 function via the branch-inverse
/// formula: `φ̃(t) = ∫₀ᵗ max{(−f₁⁻¹)′(s), (f₂⁻¹)′(s)} ds`, with the branch
/// inverses computed numerically by bisection. This is an independent route
/// from `exact_modulus` and is cross-validated against it in the tests.
pub fn exact_modulus_convex_c1(
    f: &Piecewise1D,
    xbar: f64,
    a: f64,
    b: f64,
) -> Result<ExactModulus, ModulusError> {
    let base = f.eval(xbar);
    if !base.is_finite() {
        return Err(ModulusError::AnchorOutsideDomain(xbar));
    }
    let d0 = f.dist_zero_subdiff(xbar)?;
    if d0 > 1e-12 {
        return Err(ModulusError::NotStationary(d0));
    }
    // convexity = nonnegative second differences on a probe grid
    let (dlo, dhi) = f.domain();
    let lo = a.max(dlo).max(xbar - 1e6);
    let hi = b.min(dhi).min(xbar + 1e6);
    let grid = numerics::linspace(lo, hi, 257);
    for w in grid.windows(3) {
        let (l, m, r) = (f.eval(w[0]), f.eval(w[1]), f.eval(w[2]));
        if l.is_finite() && m.is_finite() && r.is_finite() && m > 0.5 * (l + r) + 1e-9 {
            return Err(ModulusError::NotConvex(w[1]));
        }
    }
    // C1 away from the anchor: corners inside (a, b) must have equal side
    // slopes; convex corners with distinct slopes break the assumption
    for xc in f.corner_points() {
        if xc <= a || xc >= b || (xc - xbar).abs() < 1e-12 {
            continue;
        }
        if !f.eval(xc).is_finite() {
            continue;
        }
        let sd = f.limiting_subdiff(xc)?;
        let (slo, shi) = sd.hull();
        if shi.is_finite() && slo.is_finite() {
            if shi - slo > 1e-9 {
                return Err(ModulusError::NotC1(xc));
            }
            if slo - shi > 1e-9 {
                return Err(ModulusError::NotConvex(xc));
            }
        }
    }

    let f_at = |x: f64| {
        if x == f64::NEG_INFINITY || x == f64::INFINITY {
            f64::INFINITY
        } else {
            f.eval(x)
        }
    };
    let eta = (f_at(a) - base).min(f_at(b) - base);
    if !(eta > 0.0) {
        // both branches flat: empty band
        return Ok(ExactModulus {
            context: KlContext {
                anchor: Anchor::Point(xbar),
                neighborhood: Neighborhood::Interval(Interval::open(a, b)),
                eta: f64::INFINITY,
                base,
            },
            trivial: true,
            method: ModulusMethod::ConvexInverse,
            h: HRepr::Zero,
            phi: Desingularizer::zero(Provenance::ExactModulus),
        });
    }

    let f_owned = f.clone();
    let branch_rate = move |s: f64, left: bool| -> f64 {
        // (−f1⁻¹)′(s) resp. (f2⁻¹)′(s) = 1/|f′| at the branch point of level
        // base + s; zero when the branch never reaches that level
        let target = base + s;
        let (mut near, mut far) = if left { (xbar, a) } else { (xbar, b) };
        if !far.is_finite() {
            // expand a finite bracket
            let mut step = 1.0;
            let dir = if left { -1.0 } else { 1.0 };
            far = xbar + dir;
            for _ in 0..200 {
                if f_owned.eval(far).is_finite() && f_owned.eval(far) >= target {
                    break;
                }
                if !f_owned.eval(far).is_finite() {
                    break;
                }
                step *= 2.0;
                far = xbar + dir * step;
            }
        }
        let v_far = f_owned.eval(far);
        let v_far = if v_far.is_finite() {
            v_far
        } else {
            // clip back into the domain
            let (d_lo, d_hi) = f_owned.domain();
            far = if left { d_lo.max(a) } else { d_hi.min(b) };
            f_owned.eval(far)
        };
        if v_far - base < s {
            return 0.0; // flat or too-short branch: inverse does not exist
        }
        if near == far {
            return 0.0;
        }
        if near > far {
            std::mem::swap(&mut near, &mut far);
        }
        // residual tolerance scales with the level gap so the reciprocal
        // slope keeps uniform relative accuracy down to tiny bands
        let x = match numerics::invert_monotone(
            |x| f_owned.eval(x),
            near,
            far,
            target,
            (1e-13 * s.abs()).max(1e-300),
        ) {
            Ok(x) => x,
            Err(_) => return 0.0,
        };
        match f_owned.dist_zero_subdiff(x) {
            Ok(d) if d > 0.0 => 1.0 / d,
            _ => f64::INFINITY,
        }
    };
    let integrand = Arc::new(move |s: f64| branch_rate(s, true).max(branch_rate(s, false)));
    let integrand_for_phi = integrand.clone();
    let integrand_for_deriv = integrand.clone();
    // one improper integral to the smallest node, then cumulative Simpson
    // panels along a geometric grid; evaluation adds one local panel
    let n_nodes = 1024usize;
    let eta_cap = if eta.is_finite() { eta } else { 64.0 };
    let t_min = eta_cap * 1e-9;
    let ratio = (eta_cap / t_min).powf(1.0 / (n_nodes as f64 - 1.0));
    let mut nodes = Vec::with_capacity(n_nodes);
    let mut cum = Vec::with_capacity(n_nodes);
    let head = numerics::integrate_decreasing(|s| integrand_for_phi(s), t_min, 3e-8)
        .map(|r| r.value)
        .unwrap_or(f64::NAN);
    nodes.push(t_min);
    cum.push(head);
    for j in 1..n_nodes {
        let a = nodes[j - 1];
        let b = (a * ratio).min(eta_cap);
        let m = 0.5 * (a + b);
        let panel = (b - a)
            * (integrand_for_phi(a) + 4.0 * integrand_for_phi(m) + integrand_for_phi(b))
            / 6.0;
        cum.push(cum[j - 1] + panel);
        nodes.push(b);
    }
    let integrand_tail = integrand.clone();
    let eval = move |t: f64| -> f64 {
        if t <= nodes[0] {
            return numerics::integrate_decreasing(|s| integrand_tail(s), t, 3e-8)
                .map(|r| r.value)
                .unwrap_or(f64::NAN);
        }
        let t = t.min(*nodes.last().unwrap());
        let j = match nodes.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(j) => return cum[j],
            Err(j) => j - 1,
        };
        let a = nodes[j];
        let m = 0.5 * (a + t);
        cum[j]
            + (t - a) * (integrand_tail(a) + 4.0 * integrand_tail(m) + integrand_tail(t)) / 6.0
    };
    let phi = Desingularizer::from_formulas(
        eval,
        Some(Arc::new(move |t: f64| integrand_for_deriv(t))),
        eta,
        Provenance::ExactModulus,
    );
    Ok(ExactModulus {
        context: KlContext {
            anchor: Anchor::Point(xbar),
            neighborhood: Neighborhood::Interval(Interval::open(a, b)),
            eta,
            base,
        },
        trivial: false,
        method: ModulusMethod::ConvexInverse,
        h: HRepr::Sampler(integrand),
        phi,
    })
}

/// Value and subgradient-distance oracle for setwise moduli in any dimension.
pub trait KlOracle: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn dist_zero_subdiff(&self, x: &[f64]) -> f64;
}

impl KlOracle for Piecewise1D {
    fn dim(&self) -> usize {
        1
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x[0])
    }
    fn dist_zero_subdiff(&self, x: &[f64]) -> f64 {
        Piecewise1D::dist_zero_subdiff(self, x[0]).unwrap_or(f64::INFINITY)
    }
}

fn dist_to_set(x: &[f64], omega: &[Vec<f64>]) -> f64 {
    omega
        .iter()
        .map(|p| {
            x.iter()
                .zip(p.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Exact modulus of the setwise generalized concave KL property over the
/// ε-enlargement of a finite set `Ω` with common value, computed from a
/// deterministic grid table. The table under-approximates the true supremum
/// function, so the resulting modulus never exceeds the true one.
pub fn setwise_modulus(
    oracle: &dyn KlOracle,
    omega: &[Vec<f64>],
    eps: f64,
    eta: f64,
    grid_per_dim: usize,
) -> Result<ExactModulus, ModulusError> {
    if omega.is_empty() {
        return Err(ModulusError::NoCertificates);
    }
    if !(eta > 0.0) || !(eps > 0.0) {
        return Err(ModulusError::BadEta);
    }
    let mu = oracle.value(&omega[0]);
    for p in omega {
        let v = oracle.value(p);
        if (v - mu).abs() > 1e-9 * (1.0 + mu.abs()) {
            return Err(ModulusError::NonConstantOnSet { value: v, mu });
        }
    }
    let dim = oracle.dim();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in omega {
        for d in 0..dim {
            lo[d] = lo[d].min(p[d] - eps);
            hi[d] = hi[d].max(p[d] + eps);
        }
    }
    // odd grid counts make sure set points themselves are sampled
    let n = grid_per_dim | 1;
    let mut samples: Vec<(f64, f64)> = Vec::new();
    let total: usize = n.pow(dim as u32);
    let mut x = vec![0.0; dim];
    for idx in 0..total {
        let mut rem = idx;
        for d in 0..dim {
            let j = rem % n;
            rem /= n;
            x[d] = lo[d] + (hi[d] - lo[d]) * j as f64 / (n - 1) as f64;
        }
        if dist_to_set(&x, omega) >= eps {
            continue;
        }
        let gap = oracle.value(&x) - mu;
        if gap <= 0.0 || gap >= eta {
            continue;
        }
        let d0 = oracle.dist_zero_subdiff(&x);
        if d0 == 0.0 {
            return Err(ModulusError::HInfinite { s_hi: gap });
        }
        if d0.is_finite() {
            samples.push((gap, 1.0 / d0));
        }
    }
    let ctx = KlContext {
        anchor: Anchor::Set(omega.to_vec()),
        neighborhood: Neighborhood::Enlargement(eps),
        eta,
        base: mu,
    };
    if samples.is_empty() {
        return Ok(ExactModulus {
            context: ctx,
            trivial: true,
            method: ModulusMethod::GridTable { points: 0 },
            h: HRepr::Zero,
            phi: Desingularizer::zero(Provenance::ExactModulus),
        });
    }
    // prefix maxima over gaps sorted descending give the step table for h
    samples.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let count = samples.len();
    let mut cells: Vec<Cell> = Vec::new();
    let mut running = 0.0f64;
    let mut upper = eta;
    for (gap, q) in samples {
        if gap < upper {
            if running > 0.0 {
                cells.push(Cell {
                    lo: gap,
                    hi: upper,
                    term: Term::Const(running),
                });
            } else {
                cells.push(Cell {
                    lo: gap,
                    hi: upper,
                    term: Term::Const(0.0),
                });
            }
            upper = gap;
        }
        running = running.max(q);
    }
    cells.push(Cell {
        lo: 0.0,
        hi: upper,
        term: Term::Const(running),
    });
    cells.reverse();
    let h = PiecewiseAnalytic::new(cells)
        .expect("grid table cells are contiguous")
        .simplify();
    let phi = Desingularizer::from_decreasing_integral(h.clone(), eta, Provenance::ExactModulus)?;
    Ok(ExactModulus {
        context: ctx,
        trivial: false,
        method: ModulusMethod::GridTable { points: count },
        h: HRepr::Cells(h),
        phi,
    })
}

/// One violation of the generalized concave KL inequality.
#[derive(Debug, Clone)]
pub struct GklViolation {
    pub point: Vec<f64>,
    pub lhs: f64,
    pub gap: f64,
}

/// Outcome of checking `φ′₋(f(x) − base) · dist(0, ∂f(x)) ≥ 1` on a grid.
#[derive(Debug, Clone)]
pub struct GklReport {
    pub checked: usize,
    pub violations: Vec<GklViolation>,
    pub min_lhs: f64,
}

impl GklReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.checked > 0
    }
}

/// Verifies the generalized concave KL inequality for a 1D context over the
/// grid points that fall inside `U ∩ [0 < f − base < eta]`.
pub fn verify_gkl(
    f: &Piecewise1D,
    ctx: &KlContext,
    phi: &Desingularizer,
    grid: &[f64],
    tol: f64,
) -> GklReport {
    let u = ctx.interval_u();
    let mut report = GklReport {
        checked: 0,
        violations: Vec::new(),
        min_lhs: f64::INFINITY,
    };
    for &x in grid {
        if !u.contains(x) {
            continue;
        }
        let gap = f.eval(x) - ctx.base;
        if !(gap > 0.0 && gap < ctx.eta) {
            continue;
        }
        let d = match f.dist_zero_subdiff(x) {
            Ok(d) => d,
            Err(_) => continue,
        };
        let rate = phi.left_deriv(gap, 1e-9).unwrap_or(0.0);
        let lhs = rate * d;
        report.checked += 1;
        report.min_lhs = report.min_lhs.min(lhs);
        if lhs < 1.0 - tol {
            report.violations.push(GklViolation {
                point: vec![x],
                lhs,
                gap,
            });
        }
    }
    report
}

/// Setwise variant of `verify_gkl` over points of `Ω_ε ∩ [0 < f − mu < eta]`.
pub fn verify_gkl_oracle(
    oracle: &dyn KlOracle,
    omega: &[Vec<f64>],
    eps: f64,
    eta: f64,
    mu: f64,
    phi: &Desingularizer,
    points: &[Vec<f64>],
    tol: f64,
) -> GklReport {
    let mut report = GklReport {
        checked: 0,
        violations: Vec::new(),
        min_lhs: f64::INFINITY,
    };
    for x in points {
        if dist_to_set(x, omega) >= eps {
            continue;
        }
        let gap = oracle.value(x) - mu;
        if !(gap > 0.0 && gap < eta) {
            continue;
        }
        let d = oracle.dist_zero_subdiff(x);
        if !d.is_finite() {
            continue;
        }
        let rate = phi.left_deriv(gap, 1e-9).unwrap_or(0.0);
        let lhs = rate * d;
        report.checked += 1;
        report.min_lhs = report.min_lhs.min(lhs);
        if lhs < 1.0 - tol {
            report.violations.push(GklViolation {
                point: x.clone(),
                lhs,
                gap,
            });
        }
    }
    report
}

/// A pointwise KL certificate used to assemble setwise ones.
#[derive(Debug, Clone)]
pub struct KlCertificate {
    pub center: Vec<f64>,
    pub radius: f64,
    pub eta: f64,
    pub phi: Desingularizer,
}

/// Assembles a setwise certificate from pointwise ones: the desingularizing
/// functions are summed, `eta` is the minimum, and `eps` is a constructive
/// Lebesgue number of the supplied cover of `omega`.
pub fn uniformize(
    omega: &[Vec<f64>],
    certs: &[KlCertificate],
) -> Result<(f64, f64, Desingularizer), ModulusError> {
    if certs.is_empty() {
        return Err(ModulusError::NoCertificates);
    }
    let mut eps = f64::INFINITY;
    for w in omega {
        let slack = certs
            .iter()
            .map(|c| c.radius - dist_to_set(w, std::slice::from_ref(&c.center)))
            .fold(f64::NEG_INFINITY, f64::max);
        if slack <= 0.0 {
            return Err(ModulusError::NoCover);
        }
        eps = eps.min(slack);
    }
    let eta = certs.iter().map(|c| c.eta).fold(f64::INFINITY, f64::min);
    let phi = if certs.len() == 1 {
        certs[0].phi.clone()
    } else {
        Desingularizer::sum(
            certs.iter().map(|c| c.phi.clone()).collect(),
            Provenance::Combined,
        )
    };
    Ok((eps, eta, phi))
}
