//! Piecewise closed-form scalar functions with exact antiderivatives.
//!
//! The supremum function `h` of an exact modulus, the level-set integrand `u`
//! of the integrability construction, and every majorant built from them are
//! pointwise maxima of a small closed vocabulary of terms. Keeping that
//! structure explicit lets the rest of the crate integrate, differentiate and
//! compare these functions without quadrature error.

/// A single closed-form term in the variable `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Term {
    /// `c`
    Const(f64),
    /// `a + b*s`
    Affine { a: f64, b: f64 },
    /// `c * (s + shift)^expo`, finite for `s + shift > 0`
    Power { c: f64, shift: f64, expo: f64 },
    /// `c * (cap - s)^expo`, finite for `s < cap`
    PowerNeg { c: f64, cap: f64, expo: f64 },
}

impl Term {
    pub fn eval(&self, s: f64) -> f64 {
        match *self {
            Term::Const(c) => c,
            Term::Affine { a, b } => a + b * s,
            Term::Power { c, shift, expo } => {
                let base = s + shift;
                if base <= 0.0 {
                    if expo < 0.0 {
                        f64::INFINITY
                    } else if expo == 0.0 {
                        c
                    } else {
                        0.0
                    }
                } else {
                    c * base.powf(expo)
                }
            }
            Term::PowerNeg { c, cap, expo } => {
                let base = cap - s;
                if base <= 0.0 {
                    if expo < 0.0 {
                        f64::INFINITY
                    } else if expo == 0.0 {
                        c
                    } else {
                        0.0
                    }
                } else {
                    c * base.powf(expo)
                }
            }
        }
    }

    /// Antiderivative evaluated at `s`. Only valid away from the term's
    /// singular point; `integrate` handles the improper endpoints.
    fn antiderivative(&self, s: f64) -> f64 {
        match *self {
            Term::Const(c) => c * s,
            Term::Affine { a, b } => a * s + 0.5 * b * s * s,
            Term::Power { c, shift, expo } => {
                let base = (s + shift).max(0.0);
                if expo == -1.0 {
                    c * base.ln()
                } else {
                    c * base.powf(expo + 1.0) / (expo + 1.0)
                }
            }
            Term::PowerNeg { c, cap, expo } => {
                let base = (cap - s).max(0.0);
                if expo == -1.0 {
                    -c * base.ln()
                } else {
                    -c * base.powf(expo + 1.0) / (expo + 1.0)
                }
            }
        }
    }

    /// Exact integral over `(a, b]`, improper endpoints allowed.
    pub fn integrate(&self, a: f64, b: f64) -> Result<f64, AnalyticError> {
        if b <= a {
            return Ok(0.0);
        }
        match *self {
            Term::Power { shift, expo, c } => {
                // singular point at s = -shift, only reachable at the left end
                if a + shift < 1e-300 && expo <= -1.0 && c != 0.0 {
                    return Err(AnalyticError::DivergentIntegral { at: a });
                }
            }
            Term::PowerNeg { cap, expo, c } => {
                if cap - b < 1e-300 && expo <= -1.0 && c != 0.0 {
                    return Err(AnalyticError::DivergentIntegral { at: b });
                }
            }
            _ => {}
        }
        Ok(self.antiderivative(b) - self.antiderivative(a))
    }

    /// Sign of the derivative on an interval where the term is finite:
    /// -1 decreasing, 0 constant, +1 increasing.
    pub fn monotonicity(&self) -> i8 {
        match *self {
            Term::Const(_) => 0,
            Term::Affine { b, .. } => {
                if b > 0.0 {
                    1
                } else if b < 0.0 {
                    -1
                } else {
                    0
                }
            }
            Term::Power { c, expo, .. } => {
                if c == 0.0 || expo == 0.0 {
                    0
                } else if (c > 0.0) == (expo > 0.0) {
                    1
                } else {
                    -1
                }
            }
            Term::PowerNeg { c, expo, .. } => {
                if c == 0.0 || expo == 0.0 {
                    0
                } else if (c > 0.0) == (expo > 0.0) {
                    -1
                } else {
                    1
                }
            }
        }
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum AnalyticError {
    #[error("integral diverges near s = {at}")]
    DivergentIntegral { at: f64 },
    #[error("cells must be contiguous and ascending")]
    BadCells,
}

/// One cell of a piecewise function; the formula applies on `(lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub lo: f64,
    pub hi: f64,
    pub term: Term,
}

/// A scalar function given by contiguous closed-form cells on `(lo, hi]`.
///
/// The left cell owns shared boundaries, so `eval` at a breakpoint returns
/// the left branch and coincides with the left limit everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseAnalytic {
    cells: Vec<Cell>,
}

impl PiecewiseAnalytic {
    pub fn new(cells: Vec<Cell>) -> Result<Self, AnalyticError> {
        if cells.is_empty() {
            return Err(AnalyticError::BadCells);
        }
        for w in cells.windows(2) {
            if w[0].hi != w[1].lo {
                return Err(AnalyticError::BadCells);
            }
        }
        if cells.iter().any(|c| !(c.lo < c.hi)) {
            return Err(AnalyticError::BadCells);
        }
        Ok(Self { cells })
    }

    pub fn constant(lo: f64, hi: f64, v: f64) -> Self {
        Self {
            cells: vec![Cell {
                lo,
                hi,
                term: Term::Const(v),
            }],
        }
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.cells[0].lo, self.cells[self.cells.len() - 1].hi)
    }

    fn cell_index(&self, s: f64) -> usize {
        // first cell whose hi >= s; clamped to the ends
        match self
            .cells
            .binary_search_by(|c| c.hi.partial_cmp(&s).unwrap())
        {
            Ok(i) => i,
            Err(i) => i.min(self.cells.len() - 1),
        }
    }

    /// Value at `s` under the `(lo, hi]` ownership rule (equals the left
    /// limit at every interior point of the domain).
    pub fn eval(&self, s: f64) -> f64 {
        self.cells[self.cell_index(s)].term.eval(s)
    }

    /// Exact integral over `(a, b]` within the domain.
    pub fn integrate(&self, a: f64, b: f64) -> Result<f64, AnalyticError> {
        if b <= a {
            return Ok(0.0);
        }
        let mut total = 0.0;
        for cell in &self.cells {
            let lo = cell.lo.max(a);
            let hi = cell.hi.min(b);
            if hi > lo {
                total += cell.term.integrate(lo, hi)?;
            }
        }
        Ok(total)
    }

    /// Merge adjacent cells carrying the same term.
    pub fn simplify(mut self) -> Self {
        let mut out: Vec<Cell> = Vec::with_capacity(self.cells.len());
        for cell in self.cells.drain(..) {
            match out.last_mut() {
                Some(prev) if prev.term == cell.term => prev.hi = cell.hi,
                _ => out.push(cell),
            }
        }
        Self { cells: out }
    }

    /// True if the function is nonincreasing (checked per-term analytically
    /// plus continuity of suprema across cell boundaries via evaluation).
    pub fn is_decreasing(&self, tol: f64) -> bool {
        for cell in &self.cells {
            if cell.term.monotonicity() > 0 {
                let probe = cell.lo + (cell.hi - cell.lo) * 1e-6;
                if cell.term.eval(cell.hi) > cell.term.eval(probe) + tol {
                    return false;
                }
            }
        }
        for w in self.cells.windows(2) {
            let left = w[0].term.eval(w[0].hi);
            let right = w[1].term.eval((w[0].hi + w[1].hi * 1e-12) / (1.0 + 1e-12));
            // compare the left value against the limit from the right
            let right_lim = w[1].term.eval(w[0].hi);
            let _ = right;
            if right_lim > left + tol {
                return false;
            }
        }
        true
    }

    /// The smallest nonincreasing function dominating `self`:
    /// `s ↦ sup { self(r) : r ≥ s }`, computed exactly cell by cell.
    pub fn decreasing_envelope(&self) -> Self {
        let mut out: Vec<Cell> = Vec::new();
        let mut running_sup = f64::NEG_INFINITY;
        for cell in self.cells.iter().rev() {
            match cell.term.monotonicity() {
                0 => {
                    let v = cell.term.eval(cell.hi);
                    running_sup = running_sup.max(v);
                    out.push(Cell {
                        lo: cell.lo,
                        hi: cell.hi,
                        term: Term::Const(running_sup),
                    });
                }
                1 => {
                    // increasing: sup to the right inside the cell is the cell's
                    // right value, so the envelope is flat here
                    running_sup = running_sup.max(cell.term.eval(cell.hi));
                    out.push(Cell {
                        lo: cell.lo,
                        hi: cell.hi,
                        term: Term::Const(running_sup),
                    });
                }
                _ => {
                    // decreasing: envelope follows the term until it dips below
                    // the running sup, then flattens
                    let v_hi = cell.term.eval(cell.hi);
                    if v_hi >= running_sup {
                        out.push(cell.clone());
                    } else {
                        let v_lo = cell.term.eval(cell.lo + (cell.hi - cell.lo) * 1e-15);
                        if v_lo <= running_sup {
                            out.push(Cell {
                                lo: cell.lo,
                                hi: cell.hi,
                                term: Term::Const(running_sup),
                            });
                        } else {
                            let x = bisect_on(
                                |s| cell.term.eval(s) - running_sup,
                                cell.lo,
                                cell.hi,
                            );
                            out.push(Cell {
                                lo: x,
                                hi: cell.hi,
                                term: Term::Const(running_sup),
                            });
                            out.push(Cell {
                                lo: cell.lo,
                                hi: x,
                                term: cell.term,
                            });
                        }
                    }
                    running_sup = running_sup.max(cell.term.eval(cell.lo + (cell.hi - cell.lo) * 1e-15));
                }
            }
        }
        out.reverse();
        Self { cells: out }.simplify()
    }

    /// Pointwise maximum with a set of descending lines anchored at
    /// `(x0, y0)` with slope `-rate` (used for ramp majorants).
    pub fn max_with_lines(&self, lines: &[(f64, f64, f64)]) -> Self {
        if lines.is_empty() {
            return self.clone();
        }
        let mut branches: Vec<WindowedTerm> = Vec::new();
        let (dlo, dhi) = self.domain();
        for cell in &self.cells {
            branches.push(WindowedTerm {
                s_lo: cell.lo,
                s_hi: cell.hi,
                term: cell.term,
            });
        }
        for &(x0, y0, rate) in lines {
            // active until the line exits below zero or the domain ends
            branches.push(WindowedTerm {
                s_lo: x0,
                s_hi: dhi,
                term: Term::Affine {
                    a: y0 + rate * x0,
                    b: -rate,
                },
            });
        }
        upper_envelope(&branches, dlo, dhi)
    }
}

/// A closed-form term active on the window `(s_lo, s_hi]`.
#[derive(Debug, Clone)]
pub struct WindowedTerm {
    pub s_lo: f64,
    pub s_hi: f64,
    pub term: Term,
}

/// Analytic crossing points of a term pair, for the combinations with a
/// closed form; the probe-based resolver refines the rest.
fn pair_cuts(t1: &Term, t2: &Term, lo: f64, hi: f64, out: &mut Vec<f64>) {
    let mut push = |s: f64| {
        if s.is_finite() && s > lo && s < hi {
            out.push(s);
        }
    };
    let affine_of = |t: &Term| -> Option<(f64, f64)> {
        match *t {
            Term::Const(c) => Some((c, 0.0)),
            Term::Affine { a, b } => Some((a, b)),
            _ => None,
        }
    };
    if let (Some((a1, b1)), Some((a2, b2))) = (affine_of(t1), affine_of(t2)) {
        if b1 != b2 {
            push((a2 - a1) / (b1 - b2));
        }
        return;
    }
    match (*t1, *t2) {
        (Term::Const(v), Term::Power { c, shift, expo })
        | (Term::Power { c, shift, expo }, Term::Const(v)) => {
            if v > 0.0 && c > 0.0 && expo != 0.0 {
                push((v / c).powf(1.0 / expo) - shift);
            }
        }
        (Term::Const(v), Term::PowerNeg { c, cap, expo })
        | (Term::PowerNeg { c, cap, expo }, Term::Const(v)) => {
            if v > 0.0 && c > 0.0 && expo != 0.0 {
                push(cap - (v / c).powf(1.0 / expo));
            }
        }
        (
            Term::Power {
                c: c1,
                shift: sh1,
                expo: e1,
            },
            Term::Power {
                c: c2,
                shift: sh2,
                expo: e2,
            },
        ) if sh1 == sh2 && e1 != e2 && c1 > 0.0 && c2 > 0.0 => {
            push((c1 / c2).powf(1.0 / (e2 - e1)) - sh1);
        }
        _ => {}
    }
}

/// Exact pointwise maximum of windowed terms over `(lo, hi]`.
/// Regions covered by no window evaluate to 0.
pub fn upper_envelope(branches: &[WindowedTerm], lo: f64, hi: f64) -> PiecewiseAnalytic {
    let mut cuts: Vec<f64> = vec![lo, hi];
    for b in branches {
        for &p in &[b.s_lo, b.s_hi] {
            if p > lo && p < hi {
                cuts.push(p);
            }
        }
    }
    for (i, b1) in branches.iter().enumerate() {
        for b2 in branches.iter().skip(i + 1) {
            let olo = b1.s_lo.max(b2.s_lo).max(lo);
            let ohi = b1.s_hi.min(b2.s_hi).min(hi);
            if olo < ohi {
                pair_cuts(&b1.term, &b2.term, olo, ohi, &mut cuts);
            }
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();

    let mut cells: Vec<Cell> = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let active: Vec<&WindowedTerm> = branches
            .iter()
            .filter(|t| t.s_lo <= a && b <= t.s_hi)
            .collect();
        if active.is_empty() {
            cells.push(Cell {
                lo: a,
                hi: b,
                term: Term::Const(0.0),
            });
        } else {
            resolve_max(&active, a, b, &mut cells, 0);
        }
    }
    PiecewiseAnalytic::new(cells)
        .expect("envelope cells are contiguous by construction")
        .simplify()
}

fn argmax_at(terms: &[&WindowedTerm], s: f64) -> usize {
    let mut best = 0usize;
    let mut best_v = terms[0].term.eval(s);
    for (i, t) in terms.iter().enumerate().skip(1) {
        let v = t.term.eval(s);
        if v > best_v + 1e-15 * (1.0 + best_v.abs()) {
            best = i;
            best_v = v;
        }
    }
    best
}

fn resolve_max(terms: &[&WindowedTerm], lo: f64, hi: f64, out: &mut Vec<Cell>, depth: u32) {
    const PROBES: usize = 16;
    let probe = |j: usize| lo + (hi - lo) * (j as f64 + 1.0) / (PROBES as f64 + 1.0);
    let mut winners = [0usize; PROBES];
    for (j, w) in winners.iter_mut().enumerate() {
        *w = argmax_at(terms, probe(j));
    }
    let first = winners[0];
    if depth >= 48 || winners.iter().all(|&w| w == first) {
        out.push(Cell {
            lo,
            hi,
            term: terms[first].term,
        });
        return;
    }
    // isolate the first winner change and split there
    let j = (1..PROBES).find(|&j| winners[j] != first).unwrap();
    let (ia, ib) = (first, winners[j]);
    let f = |s: f64| terms[ia].term.eval(s) - terms[ib].term.eval(s);
    let cut = bisect_on(f, probe(j - 1), probe(j));
    if cut <= lo || cut >= hi {
        let mid = 0.5 * (lo + hi);
        resolve_max(terms, lo, mid, out, depth + 1);
        resolve_max(terms, mid, hi, out, depth + 1);
        return;
    }
    resolve_max(terms, lo, cut, out, depth + 1);
    resolve_max(terms, cut, hi, out, depth + 1);
}

/// Bisection for a sign change of `f` on `[a, b]`; returns the midpoint of
/// the final bracket (or `b` when no sign change is present).
pub fn bisect_on(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (mut a, mut b) = (a, b);
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    if fa.signum() == fb.signum() {
        return b;
    }
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_integral_matches_closed_form() {
        // ∫_0^t s^{-1/2}/√2 ds = √(2t)
        let t = Term::Power {
            c: 1.0 / 2.0_f64.sqrt(),
            shift: 0.0,
            expo: -0.5,
        };
        let v = t.integrate(0.0, 0.5).unwrap();
        assert!((v - 1.0).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn divergent_at_origin_detected() {
        let t = Term::Power {
            c: 1.0,
            shift: 0.0,
            expo: -1.0,
        };
        assert!(t.integrate(0.0, 1.0).is_err());
        assert!(t.integrate(0.5, 1.0).is_ok());
    }

    #[test]
    fn envelope_of_steps() {
        // max of 2 on (0,1/8] and 1 on (0,∞): h of the three-slope example
        let branches = vec![
            WindowedTerm {
                s_lo: 0.0,
                s_hi: 0.125,
                term: Term::Const(2.0),
            },
            WindowedTerm {
                s_lo: 0.0,
                s_hi: 10.0,
                term: Term::Const(1.0),
            },
        ];
        let h = upper_envelope(&branches, 0.0, 10.0);
        assert_eq!(h.eval(0.1), 2.0);
        assert_eq!(h.eval(0.125), 2.0);
        assert_eq!(h.eval(0.2), 1.0);
        let phi_quarter = h.integrate(0.0, 0.25).unwrap();
        assert!((phi_quarter - 0.375).abs() < 1e-15);
    }

    #[test]
    fn envelope_of_sqrt_and_const() {
        // max(1/√(2s), 1/2) → crossing at s = 2
        let branches = vec![
            WindowedTerm {
                s_lo: 0.0,
                s_hi: 8.0,
                term: Term::Power {
                    c: 1.0 / 2.0_f64.sqrt(),
                    shift: 0.0,
                    expo: -0.5,
                },
            },
            WindowedTerm {
                s_lo: 0.0,
                s_hi: 8.0,
                term: Term::Const(0.5),
            },
        ];
        let h = upper_envelope(&branches, 0.0, 8.0);
        assert!((h.eval(1.0) - 1.0 / 2.0_f64.sqrt()).abs() < 1e-12);
        assert!((h.eval(4.0) - 0.5).abs() < 1e-12);
        // the crossing is located to high precision
        assert!((h.eval(1.999_999) - 1.0 / (2.0 * 1.999_999_f64).sqrt()).abs() < 1e-9);
        assert_eq!(h.eval(2.000_001), 0.5);
    }

    #[test]
    fn decreasing_envelope_of_nonmonotone_steps() {
        // u of the three-slope example: 2, 2/3, 1 → envelope 2, 1
        let u = PiecewiseAnalytic::new(vec![
            Cell {
                lo: 0.0,
                hi: 0.125,
                term: Term::Const(2.0),
            },
            Cell {
                lo: 0.125,
                hi: 0.5,
                term: Term::Const(2.0 / 3.0),
            },
            Cell {
                lo: 0.5,
                hi: 4.0,
                term: Term::Const(1.0),
            },
        ])
        .unwrap();
        let env = u.decreasing_envelope();
        assert_eq!(env.eval(0.1), 2.0);
        assert_eq!(env.eval(0.3), 1.0);
        assert_eq!(env.eval(3.0), 1.0);
        assert!(env.is_decreasing(1e-12));
    }
}
