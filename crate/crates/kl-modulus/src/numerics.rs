//! Shared numerical kernels: improper integration of decreasing integrands,
//! monotone inversion, deterministic grid suprema, one-sided difference
//! quotients and concavity/monotonicity testing.

use crate::piecewise::Interval;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum NumericsError {
    #[error("integral diverges (partial sums exceeded {bound})")]
    DivergentIntegral { bound: f64 },
    #[error("integrand is not decreasing near s = {s}")]
    NotMonotone { s: f64 },
    #[error("target {y} outside the attained range [{min}, {max}]")]
    OutOfRange { y: f64, min: f64, max: f64 },
    #[error("supremum over an empty domain")]
    EmptyDomain,
    #[error("left derivative requested at t = {0} <= 0")]
    AtOrigin(f64),
}

/// Outcome of an improper integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub converged: bool,
    pub singular_endpoint_handled: bool,
}

/// Result of `integrate_decreasing` together with the rigorous Riemann
/// brackets accumulated over the accepted panels.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BracketedQuadrature {
    pub result: QuadratureResult,
    // rigorous Riemann bounds, exercised by the bracket-invariant tests
    #[allow(dead_code)]
    pub lower: f64,
    #[allow(dead_code)]
    pub upper: f64,
}

/// Integral of a positive decreasing `h` over `(0, t]`, treated as the limit
/// of `∫_u^t h` as `u → 0⁺`.
///
/// Geometric subdivision toward the origin makes the panels bracket the
/// improper tail; adaptive Simpson handles each panel, which also localizes
/// interior jumps of step-shaped integrands. Divergence is declared once the
/// rigorous lower sum exceeds `1/tol`.
pub fn integrate_decreasing(
    h: impl Fn(f64) -> f64,
    t: f64,
    tol: f64,
) -> Result<QuadratureResult, NumericsError> {
    integrate_decreasing_bracketed(h, t, tol).map(|b| b.result)
}

pub(crate) fn integrate_decreasing_bracketed(
    h: impl Fn(f64) -> f64,
    t: f64,
    tol: f64,
) -> Result<BracketedQuadrature, NumericsError> {
    if !(t > 0.0) {
        return Ok(BracketedQuadrature {
            result: QuadratureResult {
                value: 0.0,
                error_estimate: 0.0,
                converged: true,
                singular_endpoint_handled: false,
            },
            lower: 0.0,
            upper: 0.0,
        });
    }
    let divergence_bound = 1.0 / tol;
    let mono_slack = 1e-9;

    let mut value = 0.0;
    let mut err = 0.0;
    let mut lower = 0.0;
    let mut upper = 0.0;

    let h_t = h(t);
    let mut level_hi = t;
    let mut h_hi = h_t;
    let mut prev_level_upper = f64::INFINITY;
    let mut ratio = 0.5f64;
    let mut tail_est;
    let mut converged = false;
    let mut max_h_seen = h_t;
    // geometric error budgets keep the accumulated estimate below tol/2
    let mut level_budget = 0.1 * tol;

    for _level in 0..1100 {
        let level_lo = 0.5 * level_hi;
        let h_lo = h(level_lo);
        if !h_lo.is_finite() && h_lo > 0.0 {
            return Err(NumericsError::DivergentIntegral {
                bound: divergence_bound,
            });
        }
        if h_lo < h_hi - mono_slack * (1.0 + h_hi.abs()) {
            return Err(NumericsError::NotMonotone { s: level_lo });
        }
        max_h_seen = max_h_seen.max(h_lo);
        let budget = level_budget.max(1e-4 * tol);
        let (v, e, lo_sum, up_sum) =
            adaptive_panel(&h, level_lo, h_lo, level_hi, h_hi, budget, mono_slack)?;
        level_budget *= 0.8;
        value += v;
        err += e;
        lower += lo_sum;
        upper += up_sum;
        if lower > divergence_bound {
            return Err(NumericsError::DivergentIntegral {
                bound: divergence_bound,
            });
        }

        // geometric tail estimate from the decay of the level upper sums
        let level_upper = level_lo * h_lo;
        if prev_level_upper.is_finite() && prev_level_upper > 0.0 {
            ratio = (level_upper / prev_level_upper).clamp(0.05, 0.97);
        }
        tail_est = level_upper * ratio / (1.0 - ratio);
        prev_level_upper = level_upper;
        if tail_est < tol * 0.4 || level_upper == 0.0 {
            err += tail_est.max(0.0);
            upper += tail_est.max(0.0);
            converged = err <= tol;
            break;
        }
        level_hi = level_lo;
        h_hi = h_lo;
    }

    Ok(BracketedQuadrature {
        result: QuadratureResult {
            value,
            error_estimate: err,
            converged,
            singular_endpoint_handled: max_h_seen > 10.0 * (h_t.abs() + 1e-300),
        },
        lower,
        upper,
    })
}

/// Adaptive Simpson on one panel of a decreasing integrand, returning
/// `(value, error_estimate, lower_riemann, upper_riemann)`.
#[allow(clippy::too_many_arguments)]
fn adaptive_panel(
    h: &impl Fn(f64) -> f64,
    a: f64,
    ha: f64,
    b: f64,
    hb: f64,
    tol: f64,
    mono_slack: f64,
) -> Result<(f64, f64, f64, f64), NumericsError> {
    struct Frame {
        a: f64,
        ha: f64,
        b: f64,
        hb: f64,
        tol: f64,
        depth: u32,
    }
    let mut out = (0.0, 0.0, 0.0, 0.0);
    let mut leaves = 0usize;
    let mut stack = vec![Frame {
        a,
        ha,
        b,
        hb,
        tol,
        depth: 0,
    }];
    while let Some(f) = stack.pop() {
        let m = 0.5 * (f.a + f.b);
        let hm = h(m);
        if hm > f.ha + mono_slack * (1.0 + f.ha.abs()) || f.hb > hm + mono_slack * (1.0 + hm.abs())
        {
            return Err(NumericsError::NotMonotone { s: m });
        }
        let w = f.b - f.a;
        let s1 = w * (f.ha + 4.0 * hm + f.hb) / 6.0;
        let m1 = 0.5 * (f.a + m);
        let m2 = 0.5 * (m + f.b);
        let hm1 = h(m1);
        let hm2 = h(m2);
        let s2 = w * (f.ha + 4.0 * hm1 + 2.0 * hm + 4.0 * hm2 + f.hb) / 12.0;
        let delta = (s2 - s1).abs();
        leaves += 1;
        // the relative floor stops refinement once fp noise dominates
        if delta <= 15.0 * f.tol
            || delta <= 1e-12 * s2.abs()
            || f.depth >= 48
            || leaves > 4_000
            || w <= f64::EPSILON * (f.b.abs() + 1.0)
        {
            let v = s2 + (s2 - s1) / 15.0;
            // clamp into the rigorous panel bracket (tiny monotonicity slack
            // can invert the bounds)
            let lo = (w * f.hb).min(w * f.ha);
            let hi = (w * f.ha).max(w * f.hb);
            out.0 += v.clamp(lo, hi);
            out.1 += delta / 15.0;
            out.2 += lo;
            out.3 += hi;
        } else {
            stack.push(Frame {
                a: f.a,
                ha: f.ha,
                b: m,
                hb: hm,
                tol: 0.5 * f.tol,
                depth: f.depth + 1,
            });
            stack.push(Frame {
                a: m,
                ha: hm,
                b: f.b,
                hb: f.hb,
                tol: 0.5 * f.tol,
                depth: f.depth + 1,
            });
        }
    }
    Ok(out)
}

/// Solve `g(x) = y` for strictly monotone `g` on `[a, b]` by bisection.
pub fn invert_monotone(
    g: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    y: f64,
    tol: f64,
) -> Result<f64, NumericsError> {
    let ga = g(a);
    let gb = g(b);
    let (min, max) = (ga.min(gb), ga.max(gb));
    if y < min - tol || y > max + tol {
        return Err(NumericsError::OutOfRange { y, min, max });
    }
    let increasing = gb >= ga;
    let (mut lo, mut hi) = (a, b);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        let gm = g(m);
        if (gm - y).abs() <= tol || (hi - lo).abs() <= f64::EPSILON * m.abs() {
            return Ok(m);
        }
        if (gm < y) == increasing {
            lo = m;
        } else {
            hi = m;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Result of a grid supremum; `truncated` records that an unbounded side of
/// the domain was clipped to the truncation radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSupResult {
    pub value: f64,
    pub argmax: f64,
    pub truncated: bool,
}

pub const DEFAULT_TRUNCATION_RADIUS: f64 = 1e3;

/// Deterministic supremum of `q` over an `n`-point grid per interval.
///
/// Grid nodes respect endpoint openness (open ends are never sampled), and
/// are nested under a 3x refinement of `n`, so refining never lowers the
/// result.
pub fn grid_sup(
    q: impl Fn(f64) -> f64,
    domain: &[Interval],
    n: usize,
    truncation_radius: f64,
) -> Result<GridSupResult, NumericsError> {
    assert!(n >= 2, "grid_sup needs n >= 2");
    let mut best = f64::NEG_INFINITY;
    let mut arg = f64::NAN;
    let mut truncated = false;
    let mut sampled = false;
    for iv in domain {
        let mut lo = iv.lo;
        let mut hi = iv.hi;
        if !lo.is_finite() {
            lo = -truncation_radius;
            truncated = true;
        }
        if !hi.is_finite() {
            hi = truncation_radius;
            truncated = true;
        }
        if hi < lo {
            continue;
        }
        if hi == lo {
            if !iv.lo_open && !iv.hi_open {
                let v = q(lo);
                sampled = true;
                if v > best {
                    best = v;
                    arg = lo;
                }
            }
            continue;
        }
        sampled = true;
        let nodes = |j: usize| -> f64 {
            let nf = n as f64;
            match (iv.lo_open, iv.hi_open) {
                (false, false) => lo + (hi - lo) * j as f64 / (nf - 1.0),
                (true, false) => lo + (hi - lo) * (j as f64 + 1.0) / nf,
                (false, true) => lo + (hi - lo) * j as f64 / nf,
                (true, true) => lo + (hi - lo) * (j as f64 + 0.5) / nf,
            }
        };
        for j in 0..n {
            let x = nodes(j);
            let v = q(x);
            if v > best {
                best = v;
                arg = x;
            }
        }
    }
    if !sampled {
        return Err(NumericsError::EmptyDomain);
    }
    Ok(GridSupResult {
        value: best,
        argmax: arg,
        truncated,
    })
}

/// One-sided difference quotient `(φ(t) − φ(t−step)) / step`; for concave φ
/// this upper-bounds the left derivative at `t`.
pub fn left_quotient(
    phi: impl Fn(f64) -> f64,
    t: f64,
    step: f64,
) -> Result<f64, NumericsError> {
    if !(t > 0.0) {
        return Err(NumericsError::AtOrigin(t));
    }
    let s = step.min(0.5 * t);
    Ok((phi(t) - phi(t - s)) / s)
}

/// Report of a midpoint-concavity and strict-monotonicity scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcavityReport {
    pub concave: bool,
    pub strictly_increasing: bool,
    /// witnessed triple `(a, b, deficit)` of the first concavity violation
    pub concavity_violation: Option<(f64, f64, f64)>,
    pub monotonicity_violation: Option<(f64, f64)>,
}

impl ConcavityReport {
    pub fn passed(&self) -> bool {
        self.concave && self.strictly_increasing
    }
}

/// Checks midpoint concavity `φ((a+b)/2) ≥ (φ(a)+φ(b))/2 − tol` over all
/// grid pairs, and strict monotonicity over consecutive grid points.
pub fn concavity_check(
    phi: impl Fn(f64) -> f64,
    grid: &[f64],
    tol: f64,
) -> ConcavityReport {
    let vals: Vec<f64> = grid.iter().map(|&t| phi(t)).collect();
    let mut report = ConcavityReport {
        concave: true,
        strictly_increasing: true,
        concavity_violation: None,
        monotonicity_violation: None,
    };
    for i in 0..grid.len() {
        for j in (i + 1)..grid.len() {
            let mid = 0.5 * (grid[i] + grid[j]);
            let vm = phi(mid);
            let chord = 0.5 * (vals[i] + vals[j]);
            if vm < chord - tol {
                report.concave = false;
                if report.concavity_violation.is_none() {
                    report.concavity_violation = Some((grid[i], grid[j], chord - vm));
                }
            }
        }
    }
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        if phi(b) <= phi(a) - tol {
            report.strictly_increasing = false;
            if report.monotonicity_violation.is_none() {
                report.monotonicity_violation = Some((a, b));
            }
            break;
        }
    }
    report
}

/// Uniform grid of `n` points on `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n as f64 - 1.0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_sqrt_integral() {
        // ∫_0^{1/2} 1/√(2s) ds = 1
        let r = integrate_decreasing(|s| 1.0 / (2.0 * s).sqrt(), 0.5, 1e-9).unwrap();
        assert!(r.converged);
        assert!((r.value - 1.0).abs() < 1e-9, "value {}", r.value);
        assert!(r.singular_endpoint_handled);
    }

    #[test]
    fn zero_integrand() {
        let r = integrate_decreasing(|_| 0.0, 3.0, 1e-9).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.converged);
    }

    #[test]
    fn step_integrand_exact_area() {
        // 2 on (0, 1/8], 1 beyond: ∫_0^{1/4} = 3/8; oracle: Riemann sum
        let h = |s: f64| if s <= 0.125 { 2.0 } else { 1.0 };
        let n = 1_000_000;
        let mut riemann = 0.0;
        for i in 0..n {
            let s = 0.25 * (i as f64 + 0.5) / n as f64;
            riemann += h(s) * 0.25 / n as f64;
        }
        assert!((riemann - 0.375).abs() < 1e-6);
        let r = integrate_decreasing(h, 0.25, 1e-10).unwrap();
        assert!((r.value - 0.375).abs() < 1e-10, "value {}", r.value);
        assert!(r.converged);
    }

    #[test]
    fn divergent_integrand_detected() {
        let err = integrate_decreasing(|s| 1.0 / s, 1.0, 1e-6);
        assert!(matches!(err, Err(NumericsError::DivergentIntegral { .. })));
    }

    #[test]
    fn non_monotone_detected() {
        let err = integrate_decreasing(|s| s, 1.0, 1e-6);
        assert!(matches!(err, Err(NumericsError::NotMonotone { .. })));
    }

    #[test]
    fn value_stays_within_brackets() {
        for tol in [1e-3, 1e-5, 1e-7, 1e-9] {
            let b =
                integrate_decreasing_bracketed(|s| 1.0 / (2.0 * s).sqrt(), 0.5, tol).unwrap();
            assert!(b.lower <= b.result.value + 1e-12);
            assert!(b.result.value <= b.upper + 1e-12);
        }
    }

    #[test]
    fn invert_quadratic() {
        let x = invert_monotone(|x| 0.5 * x * x, 0.0, 1.0, 0.125, 1e-12).unwrap();
        assert!((x - 0.5).abs() < 1e-9);
    }

    #[test]
    fn invert_identity() {
        let x = invert_monotone(|x| x, -2.0, 2.0, 0.7, 1e-14).unwrap();
        assert!((x - 0.7).abs() < 1e-12);
    }

    #[test]
    fn invert_out_of_range() {
        assert!(matches!(
            invert_monotone(|x| x, 0.0, 1.0, 2.0, 1e-9),
            Err(NumericsError::OutOfRange { .. })
        ));
    }

    #[test]
    fn grid_sup_monotone_slope() {
        // e^{|x|} on [1, 5]: supremum at the included right endpoint
        let iv = Interval {
            lo: 1.0,
            hi: 5.0,
            lo_open: false,
            hi_open: false,
        };
        let r = grid_sup(|x| x.abs().exp(), &[iv], 101, 1e3).unwrap();
        assert!((r.value - 5f64.exp()).abs() < 1e-9);
        assert_eq!(r.argmax, 5.0);
    }

    #[test]
    fn grid_sup_constant() {
        let iv = Interval {
            lo: -1.0,
            hi: 1.0,
            lo_open: true,
            hi_open: true,
        };
        let r = grid_sup(|_| 4.25, &[iv], 11, 1e3).unwrap();
        assert_eq!(r.value, 4.25);
    }

    #[test]
    fn grid_sup_respects_open_endpoints() {
        // q blows up only at the excluded endpoint
        let iv = Interval {
            lo: 0.0,
            hi: 1.0,
            lo_open: true,
            hi_open: false,
        };
        let r = grid_sup(|x| if x == 0.0 { 1e18 } else { 1.0 / (1.0 + x) }, &[iv], 64, 1e3)
            .unwrap();
        assert!(r.value < 2.0);
    }

    #[test]
    fn grid_sup_nested_refinement_monotone() {
        let iv = Interval {
            lo: 0.0,
            hi: 2.0,
            lo_open: true,
            hi_open: false,
        };
        let q = |x: f64| (2.0 - x) * x;
        let mut n = 4;
        let mut prev = f64::NEG_INFINITY;
        for _ in 0..5 {
            let r = grid_sup(q, &[iv], n, 1e3).unwrap();
            assert!(r.value >= prev - 1e-15);
            prev = r.value;
            n *= 3;
        }
    }

    #[test]
    fn grid_sup_empty_domain() {
        assert!(matches!(
            grid_sup(|_| 0.0, &[], 8, 1e3),
            Err(NumericsError::EmptyDomain)
        ));
    }

    #[test]
    fn concavity_check_sqrt_passes_square_fails() {
        let grid = linspace(1e-3, 1.0, 64);
        let ok = concavity_check(|t| t.sqrt(), &grid, 1e-12);
        assert!(ok.passed());
        let bad = concavity_check(|t| t * t, &grid, 1e-12);
        assert!(!bad.concave);
        assert!(bad.concavity_violation.is_some());
    }

    #[test]
    fn left_quotient_upper_bounds_left_derivative() {
        // φ = √(2t): φ′₋(1/8) = 2
        let phi = |t: f64| (2.0 * t).sqrt();
        let q = left_quotient(phi, 0.125, 1e-6).unwrap();
        assert!(q >= 2.0 - 1e-12);
        assert!((q - 2.0) < 1e-4);
    }
}
