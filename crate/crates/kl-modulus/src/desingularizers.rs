//! Rival desingularizing-function constructions: the level-set integrability
//! route (with explicit continuous decreasing majorants), its convex variant
//! with an affine extension, the growth-condition integral, and the automatic
//! certificate at non-stationary points. A comparison report pits any two
//! desingularizers against each other on a grid.

use std::sync::Arc;

use crate::analytic::{upper_envelope, Cell, PiecewiseAnalytic, Term, WindowedTerm};
use crate::modulus::{q_term_for, Desingularizer, Provenance};
use crate::numerics::{self, NumericsError};
use crate::piecewise::{FunctionError, Piecewise1D};

#[derive(Debug, Clone, thiserror::Error)]
pub enum DesingError {
    #[error("level set [f = {r}] does not meet the ball")]
    EmptyLevelSet { r: f64 },
    #[error("level-set infimum vanishes at r = {r}")]
    UInfinite { r: f64 },
    #[error("level-set integrand is not integrable on (0, r0)")]
    UNotIntegrable,
    #[error("function is not convex (witnessed at x = {0})")]
    NotConvex(f64),
    #[error("function must satisfy inf f = 0 (observed minimum {min})")]
    NotNormalized { min: f64 },
    #[error("anchor is a stationary point")]
    StationaryPoint,
    #[error("no radius keeps the subgradient distance bounded away from zero")]
    NoValidRadius,
    #[error("growth integral diverges")]
    DivergentIntegral,
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// How a continuous decreasing majorant is produced from the level-set
/// integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MajorantPolicy {
    /// bridge every downward jump with a descending line of slope `−n`
    InfimalRamp(f64),
    /// keep the minimal decreasing envelope itself (discontinuous at jumps)
    StepHold,
}

/// The level-set integrand `u` on `(0, r0]` together with its exact cell
/// skeleton (the pointwise values may exceed the skeleton at corner levels,
/// where the full subdifferential shrinks the distance).
#[derive(Debug, Clone)]
pub struct BdlmIntegrand {
    pub r0: f64,
    pub eps: f64,
    pub skeleton: PiecewiseAnalytic,
    /// levels carrying flat segments, where the infimum vanishes
    pub flat_levels: Vec<f64>,
}

fn ball(center: f64, eps: f64) -> (f64, f64) {
    if eps.is_finite() {
        (center - eps, center + eps)
    } else {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
}

/// Pointwise level-set integrand `u(r) = 1 / inf{dist(0, ∂f(x)) : x ∈
/// B(x̄, ε) ∩ [f = r]}`, exact on the piecewise class.
pub fn bdlm_u(
    f: &Piecewise1D,
    xbar: f64,
    eps: f64,
    r0: f64,
    r: f64,
) -> Result<f64, DesingError> {
    assert!(r > 0.0 && r <= r0, "level must satisfy 0 < r <= r0");
    let (blo, bhi) = ball(xbar, eps);
    let tol = 1e-12 * (1.0 + r.abs());
    let mut best = f64::INFINITY;
    let mut found = false;
    for seg in f.monotone_segments() {
        let xs = seg.x_lo.max(blo);
        let xh = seg.x_hi.min(bhi);
        if xs > xh {
            continue;
        }
        let clipped = crate::piecewise::Segment {
            x_lo: xs,
            x_hi: xh,
            ..seg
        };
        let (va, vb) = clipped.value_endpoints(f);
        if va == vb {
            if (va - r).abs() <= tol {
                return Err(DesingError::UInfinite { r });
            }
            continue;
        }
        let (v_small, v_big) = (va.min(vb), va.max(vb));
        if r < v_small - tol || r > v_big + tol {
            continue;
        }
        let x_r = clipped.invert(f, r).clamp(xs.min(xh), xh.max(xs));
        found = true;
        let d = f
            .limiting_subdiff(x_r)
            .map(|s| s.dist_to_zero())
            .unwrap_or(f64::INFINITY);
        best = best.min(d);
    }
    for xc in f.corner_points() {
        if xc < blo || xc > bhi {
            continue;
        }
        let v = f.eval(xc);
        if v.is_finite() && (v - r).abs() <= tol {
            found = true;
            best = best.min(f.dist_zero_subdiff(xc)?);
        }
    }
    if !found {
        return Err(DesingError::EmptyLevelSet { r });
    }
    if best == 0.0 {
        return Err(DesingError::UInfinite { r });
    }
    Ok(1.0 / best)
}

/// Exact cell skeleton of the level-set integrand on `(0, r0]`.
pub fn bdlm_integrand(
    f: &Piecewise1D,
    xbar: f64,
    eps: f64,
    r0: f64,
) -> Result<BdlmIntegrand, DesingError> {
    let (blo, bhi) = ball(xbar, eps);
    let mut windows: Vec<WindowedTerm> = Vec::new();
    let mut flat_levels = Vec::new();
    for seg in f.monotone_segments() {
        let xs = seg.x_lo.max(blo);
        let xh = seg.x_hi.min(bhi);
        if xs >= xh {
            continue;
        }
        let clipped = crate::piecewise::Segment {
            x_lo: xs,
            x_hi: xh,
            ..seg
        };
        let (va, vb) = clipped.value_endpoints(f);
        if va == vb {
            if va > 0.0 && va <= r0 {
                flat_levels.push(va);
            }
            continue;
        }
        let (v_small, v_big) = (va.min(vb), va.max(vb));
        if v_small >= r0 || v_big <= 0.0 {
            continue;
        }
        // q as a function of the level (absolute values, base 0)
        if let Some(term) = q_term_for(&seg.form(f), 0.0) {
            windows.push(WindowedTerm {
                s_lo: v_small.max(0.0),
                s_hi: v_big.min(r0),
                term,
            });
        }
    }
    let skeleton = upper_envelope(&windows, 0.0, r0);
    Ok(BdlmIntegrand {
        r0,
        eps,
        skeleton,
        flat_levels,
    })
}

/// Continuous decreasing majorant of the integrand under a policy, as cells.
fn majorant_cells(u: &BdlmIntegrand, policy: MajorantPolicy) -> PiecewiseAnalytic {
    let env = u.skeleton.decreasing_envelope();
    match policy {
        MajorantPolicy::StepHold => env,
        MajorantPolicy::InfimalRamp(n) => {
            let mut lines: Vec<(f64, f64, f64)> = Vec::new();
            let cells = env.cells();
            for w in cells.windows(2) {
                let left_val = w[0].term.eval(w[0].hi);
                let right_lim = w[1].term.eval(w[0].hi);
                if left_val > right_lim + 1e-12 * (1.0 + left_val.abs()) {
                    lines.push((w[0].hi, left_val, n));
                }
            }
            env.max_with_lines(&lines)
        }
    }
}

/// Desingularizing function from the level-set integrability route:
/// `φ(t) = ∫₀ᵗ ū` for a continuous decreasing majorant `ū ≥ u` on `(0, r0)`.
pub fn bdlm_phi(
    f: &Piecewise1D,
    xbar: f64,
    eps: f64,
    r0: f64,
    policy: MajorantPolicy,
) -> Result<Desingularizer, DesingError> {
    let u = bdlm_integrand(f, xbar, eps, r0)?;
    if let Some(&r) = u.flat_levels.first() {
        return Err(DesingError::UInfinite { r });
    }
    let majorant = majorant_cells(&u, policy);
    majorant
        .integrate(0.0, r0)
        .map_err(|_| DesingError::UNotIntegrable)?;
    Desingularizer::from_decreasing_integral(majorant, r0, Provenance::Bdlm)
        .map_err(|_| DesingError::UNotIntegrable)
}

/// Majorant construction applied to an already-sampled integrand table
/// (used for objectives only available through value/distance oracles).
pub fn bdlm_phi_from_table(
    table: &PiecewiseAnalytic,
    r0: f64,
    policy: MajorantPolicy,
) -> Result<Desingularizer, DesingError> {
    let u = BdlmIntegrand {
        r0,
        eps: f64::INFINITY,
        skeleton: table.clone(),
        flat_levels: Vec::new(),
    };
    let majorant = majorant_cells(&u, policy);
    majorant
        .integrate(0.0, r0)
        .map_err(|_| DesingError::UNotIntegrable)?;
    Desingularizer::from_decreasing_integral(majorant, r0, Provenance::Bdlm)
        .map_err(|_| DesingError::UNotIntegrable)
}

/// Convex variant: integrate a continuous decreasing majorant up to `rbar`
/// and extend affinely with slope `ū(rbar)`, yielding a concave
/// desingularizing function on all of `[0, ∞)`. `rbar` defaults to `0.9·r0`;
/// passing `rbar = r0` reproduces the limiting construction.
pub fn bdlm_phi_convex(
    f: &Piecewise1D,
    r0: f64,
    rbar: Option<f64>,
    policy: MajorantPolicy,
) -> Result<Desingularizer, DesingError> {
    if let Some(x) = convexity_witness(f) {
        return Err(DesingError::NotConvex(x));
    }
    let min_val = f
        .monotone_segments()
        .iter()
        .map(|seg| {
            let (va, vb) = seg.value_endpoints(f);
            va.min(vb)
        })
        .fold(f64::INFINITY, f64::min);
    if min_val.abs() > 1e-9 {
        return Err(DesingError::NotNormalized { min: min_val });
    }
    let rbar = rbar.unwrap_or(0.9 * r0);
    assert!(rbar > 0.0 && rbar <= r0, "rbar must lie in (0, r0]");
    let u = bdlm_integrand(f, f64::NAN, f64::INFINITY, r0)?;
    if let Some(&r) = u.flat_levels.first() {
        return Err(DesingError::UInfinite { r });
    }
    let majorant = majorant_cells(&u, policy);
    let slope_at_rbar = majorant.eval(rbar);
    let mut cells: Vec<Cell> = Vec::new();
    for cell in majorant.cells() {
        if cell.lo >= rbar {
            break;
        }
        cells.push(Cell {
            lo: cell.lo,
            hi: cell.hi.min(rbar),
            term: cell.term,
        });
    }
    cells.push(Cell {
        lo: rbar,
        hi: f64::INFINITY,
        term: Term::Const(slope_at_rbar),
    });
    let extended = PiecewiseAnalytic::new(cells).expect("extension cells stay contiguous");
    Desingularizer::from_decreasing_integral(extended, f64::INFINITY, Provenance::BdlmConvex)
        .map_err(|_| DesingError::UNotIntegrable)
}

/// First witness of a convexity failure, or `None` when the function looks
/// convex (corner subdifferentials ordered, chords above midpoints).
pub fn convexity_witness(f: &Piecewise1D) -> Option<f64> {
    for xc in f.corner_points() {
        if !f.eval(xc).is_finite() {
            continue;
        }
        if let Ok(sd) = f.limiting_subdiff(xc) {
            // a convex kink is a single interval; split sets betray a
            // concave corner
            if sd.intervals().len() > 1 {
                return Some(xc);
            }
        }
    }
    let (dlo, dhi) = f.domain();
    let lo = dlo.max(-1e4);
    let hi = dhi.min(1e4);
    let grid = numerics::linspace(lo, hi, 513);
    for w in grid.windows(3) {
        let (l, m, r) = (f.eval(w[0]), f.eval(w[1]), f.eval(w[2]));
        if l.is_finite() && m.is_finite() && r.is_finite() && m > 0.5 * (l + r) + 1e-9 {
            return Some(w[1]);
        }
    }
    None
}

/// A growth modulus `m`: continuous, strictly increasing, `m(0) = 0`, with
/// `∫₀^ρ m⁻¹(s)/s ds < ∞`.
#[derive(Clone)]
pub struct GrowthModulus {
    pub m: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub rho: f64,
}

impl std::fmt::Debug for GrowthModulus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GrowthModulus(rho={})", self.rho)
    }
}

impl GrowthModulus {
    pub fn new(m: impl Fn(f64) -> f64 + Send + Sync + 'static, rho: f64) -> Self {
        GrowthModulus {
            m: Arc::new(m),
            rho,
        }
    }

    /// `m⁻¹(s)` by bisection over an expanding bracket.
    pub fn inverse(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let mut hi = 1.0;
        for _ in 0..200 {
            if (self.m)(hi) >= s {
                break;
            }
            hi *= 2.0;
        }
        numerics::invert_monotone(|t| (self.m)(t), 0.0, hi, s, 1e-12 * s).unwrap_or(0.0)
    }
}

/// Value of the growth-condition desingularizer `φ(t) = ∫₀ᵗ m⁻¹(s)/s ds`.
pub fn growth_phi(gm: &GrowthModulus, t: f64) -> Result<f64, DesingError> {
    assert!(t > 0.0 && t < gm.rho || gm.rho.is_infinite(), "t outside (0, rho)");
    let integrand = |s: f64| gm.inverse(s) / s;
    let r = numerics::integrate_decreasing(integrand, t, 1e-9).map_err(|e| match e {
        NumericsError::DivergentIntegral { .. } => DesingError::DivergentIntegral,
        other => DesingError::Numerics(other),
    })?;
    Ok(r.value)
}

/// The growth desingularizer as an evaluable object (quadrature-backed, with
/// the exact integrand as its left derivative).
pub fn growth_desingularizer(gm: &GrowthModulus) -> Desingularizer {
    let g1 = gm.clone();
    let g2 = gm.clone();
    Desingularizer::from_formulas(
        move |t| growth_phi(&g1, t).unwrap_or(f64::NAN),
        Some(Arc::new(move |t: f64| g2.inverse(t) / t)),
        gm.rho,
        Provenance::Growth,
    )
}

/// Pointwise order report between two desingularizing functions on a grid.
#[derive(Debug, Clone)]
pub struct CompareReport {
    pub a_below: usize,
    pub equal: usize,
    pub a_above: usize,
    /// first grid point where the strict order flips, with both values
    pub first_crossing: Option<(f64, f64, f64)>,
    pub max_a_minus_b: f64,
    pub tol: f64,
}

impl CompareReport {
    /// `a ≤ b + tol` everywhere on the grid.
    pub fn a_dominated(&self) -> bool {
        self.a_above == 0
    }
}

pub fn compare(
    phi_a: &Desingularizer,
    phi_b: &Desingularizer,
    grid: &[f64],
    tol: f64,
) -> CompareReport {
    let mut report = CompareReport {
        a_below: 0,
        equal: 0,
        a_above: 0,
        first_crossing: None,
        max_a_minus_b: f64::NEG_INFINITY,
        tol,
    };
    let mut last_sign = 0i8;
    for &t in grid {
        let a = phi_a.eval(t);
        let b = phi_b.eval(t);
        let d = a - b;
        report.max_a_minus_b = report.max_a_minus_b.max(d);
        let sign = if d > tol {
            1
        } else if d < -tol {
            -1
        } else {
            0
        };
        match sign {
            1 => report.a_above += 1,
            -1 => report.a_below += 1,
            _ => report.equal += 1,
        }
        if sign != 0 {
            if last_sign != 0 && sign != last_sign && report.first_crossing.is_none() {
                report.first_crossing = Some((t, a, b));
            }
            last_sign = sign;
        }
    }
    report
}

/// Certificate produced at a non-stationary point: the KL inequality holds
/// on `B(x̄, ε)` with `φ(t) = c·t^{1−θ}`, `θ = 0`, `c = 2/dist(0, ∂f(x̄))`.
#[derive(Debug, Clone)]
pub struct NonstationaryCert {
    pub c: f64,
    pub theta: f64,
    pub eps: f64,
    pub phi: Desingularizer,
}

pub fn nonstationary_certificate(
    f: &Piecewise1D,
    xbar: f64,
) -> Result<NonstationaryCert, DesingError> {
    let d0 = f.dist_zero_subdiff(xbar)?;
    if d0 <= 1e-12 {
        return Err(DesingError::StationaryPoint);
    }
    let mut eps = 0.5;
    for _ in 0..40 {
        let lo = xbar - eps;
        let hi = xbar + eps;
        let mut ok = true;
        let mut probes = numerics::linspace(lo, hi, 2001);
        for xc in f.corner_points() {
            if xc > lo && xc < hi {
                probes.push(xc);
            }
        }
        for x in probes {
            if !f.eval(x).is_finite() {
                continue;
            }
            match f.dist_zero_subdiff(x) {
                Ok(d) if d >= 0.5 * d0 - 1e-12 => {}
                Ok(_) => {
                    ok = false;
                    break;
                }
                Err(_) => continue,
            }
        }
        if ok {
            let c = 2.0 / d0;
            let phi = Desingularizer::power_form(c, 0.0, eps, Provenance::NonstationaryPower);
            return Ok(NonstationaryCert {
                c,
                theta: 0.0,
                eps,
                phi,
            });
        }
        eps *= 0.5;
    }
    Err(DesingError::NoValidRadius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::modulus::{exact_modulus, verify_gkl, KlContext};

    #[test]
    fn u_values_three_slope() {
        let f = catalog::three_slope_step();
        assert!((bdlm_u(&f, 0.0, f64::INFINITY, 10.0, 0.05).unwrap() - 2.0).abs() < 1e-12);
        assert!((bdlm_u(&f, 0.0, f64::INFINITY, 10.0, 0.125).unwrap() - 2.0).abs() < 1e-12);
        assert!(
            (bdlm_u(&f, 0.0, f64::INFINITY, 10.0, 0.2).unwrap() - 2.0 / 3.0).abs() < 1e-12
        );
        assert!((bdlm_u(&f, 0.0, f64::INFINITY, 10.0, 0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!((bdlm_u(&f, 0.0, f64::INFINITY, 10.0, 0.7).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn u_values_quadratic_with_tails() {
        let f = catalog::nonsmooth_modulus(1.0).unwrap();
        let u = bdlm_u(&f, 0.0, f64::INFINITY, 2.0, 0.125).unwrap();
        assert!((u - 2.0).abs() < 1e-9, "u(1/8) = {u}");
        let u2 = bdlm_u(&f, 0.0, f64::INFINITY, 2.0, 1.0).unwrap();
        assert!((u2 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn u_values_harmonic() {
        let f = catalog::harmonic_piecewise(50).unwrap();
        let r = catalog::harmonic_levels(52);
        // on (r_3, r_2] the level set sits on the slope-1/2 pieces
        let mid = 0.5 * (r[3] + r[2]);
        assert!((bdlm_u(&f, 0.0, f64::INFINITY, r[1], mid).unwrap() - 2.0).abs() < 1e-9);
        assert!((bdlm_u(&f, 0.0, f64::INFINITY, r[1], r[2]).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn u_empty_level_set() {
        let f = catalog::three_slope_step();
        // values near 0 only exist on the band; a ball far away misses them
        assert!(matches!(
            bdlm_u(&f, -5.0, 1.0, 10.0, 0.2),
            Err(DesingError::EmptyLevelSet { .. })
        ));
    }

    #[test]
    fn continuous_integrand_integrates_to_sqrt() {
        // quadratic core: u = 1/√(2r) on (0, 1/2], majorant equals u
        let f = catalog::nonsmooth_modulus(1.0).unwrap();
        let phi = bdlm_phi(&f, 0.0, f64::INFINITY, 0.5, MajorantPolicy::StepHold).unwrap();
        for i in 1..=20 {
            let t = 0.5 * i as f64 / 20.0;
            assert!((phi.eval(t) - (2.0 * t).sqrt()).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn ramp_majorants_dominate_and_decrease_with_n() {
        let f = catalog::three_slope_step();
        let ctx = KlContext::global(&f, 0.0, f64::INFINITY).unwrap();
        let exact = exact_modulus(&f, &ctx).unwrap();
        let grid: Vec<f64> = (1..=400).map(|i| 2.0 * i as f64 / 400.0).collect();
        let mut prev: Option<Desingularizer> = None;
        for n in [2.0, 4.0, 8.0, 64.0] {
            let phi = bdlm_phi(&f, 0.0, f64::INFINITY, 4.0, MajorantPolicy::InfimalRamp(n))
                .unwrap();
            let rep = compare(exact.desingularizer(), &phi, &grid, 1e-12);
            assert!(rep.a_dominated(), "exact must stay below the rival");
            // strict gap beyond the jump, witnessed at t = 1/4
            assert!(phi.eval(0.25) > exact.eval(0.25) + 1e-9, "n={n}");
            if let Some(p) = &prev {
                for &t in &grid {
                    assert!(
                        phi.eval(t) <= p.eval(t) + 1e-12,
                        "ramps must shrink with n at t={t}"
                    );
                }
            }
            prev = Some(phi);
        }
    }

    #[test]
    fn convex_two_branch_construction() {
        let f = catalog::nonsmooth_modulus(1.0).unwrap();
        // limiting case rbar = r0 = 1/2
        let phi = bdlm_phi_convex(&f, 0.5, Some(0.5), MajorantPolicy::StepHold).unwrap();
        assert!((phi.eval(1.0) - 1.5).abs() < 1e-12, "phi1(1) = {}", phi.eval(1.0));
        assert_eq!(phi.eval(0.0), 0.0);
        assert!(phi.is_concave());
        let grid = numerics::linspace(1e-3, 1.5, 200);
        let rep = numerics::concavity_check(|t| phi.eval(t), &grid, 1e-9);
        assert!(rep.passed());
        // default rbar
        let phi_def = bdlm_phi_convex(&f, 0.5, None, MajorantPolicy::StepHold).unwrap();
        let rbar = 0.45f64;
        let expect = (2.0 * rbar).sqrt() + (1.0 - rbar) / (2.0 * rbar).sqrt();
        assert!((phi_def.eval(1.0) - expect).abs() < 1e-9);
        // the exact modulus stays below both
        let ctx = KlContext::global(&f, 0.0, f64::INFINITY).unwrap();
        let exact = exact_modulus(&f, &ctx).unwrap();
        assert!(exact.eval(1.0) <= phi.eval(1.0) + 1e-12);
        assert!((exact.eval(1.0) - 1.25).abs() < 1e-12);
    }

    #[test]
    fn convex_construction_rejects_nonconvex() {
        let f = catalog::three_slope_step();
        assert!(matches!(
            bdlm_phi_convex(&f, 0.5, None, MajorantPolicy::StepHold),
            Err(DesingError::NotConvex(_))
        ));
    }

    #[test]
    fn growth_values_for_two_regime_modulus() {
        let gm = GrowthModulus::new(
            |t| {
                if t <= 1.0 {
                    0.5 * t * t
                } else {
                    2.0 * t - 1.5
                }
            },
            f64::INFINITY,
        );
        let v = growth_phi(&gm, 0.5).unwrap();
        assert!((v - 2.0).abs() < 1e-6, "phi2(1/2) = {v}");
        let v1 = growth_phi(&gm, 1.0).unwrap();
        let expect = 0.5 + 1.75 + 0.75 * 2.0f64.ln();
        assert!((v1 - expect).abs() < 1e-6, "phi2(1) = {v1} vs {expect}");
        // identity growth modulus gives the identity desingularizer
        let id = GrowthModulus::new(|t| t, f64::INFINITY);
        let w = growth_phi(&id, 0.7).unwrap();
        assert!((w - 0.7).abs() < 1e-9);
    }

    #[test]
    fn growth_certificate_verifies() {
        let f = catalog::nonsmooth_modulus(1.0).unwrap();
        let ctx = KlContext::global(&f, 0.0, f64::INFINITY).unwrap();
        let gm = GrowthModulus::new(
            |t| {
                if t <= 1.0 {
                    0.5 * t * t
                } else {
                    2.0 * t - 1.5
                }
            },
            f64::INFINITY,
        );
        let phi2 = growth_desingularizer(&gm);
        let grid = numerics::linspace(-3.0, 3.0, 2001);
        let rep = verify_gkl(&f, &ctx, &phi2, &grid, 1e-7);
        assert!(rep.passed(), "min lhs {}", rep.min_lhs);
    }

    #[test]
    fn compare_reports_order() {
        let a = Desingularizer::power_form(1.0, 0.5, f64::INFINITY, Provenance::User);
        let b = Desingularizer::power_form(2.0, 0.5, f64::INFINITY, Provenance::User);
        let grid = numerics::linspace(0.01, 1.0, 50);
        let rep = compare(&a, &b, &grid, 1e-12);
        assert_eq!(rep.a_below, 50);
        assert!(rep.a_dominated());
        let self_rep = compare(&a, &a, &grid, 1e-12);
        assert_eq!(self_rep.equal, 50);
    }

    #[test]
    fn nonstationary_certificates() {
        let f = catalog::abs_value();
        let cert = nonstationary_certificate(&f, 1.0).unwrap();
        assert!((cert.c - 2.0).abs() < 1e-12);
        assert_eq!(cert.theta, 0.0);
        assert!(cert.eps < 1.0);

        let aff = catalog::affine_slope_two();
        let cert2 = nonstationary_certificate(&aff, 3.0).unwrap();
        assert!((cert2.c - 1.0).abs() < 1e-12);

        let ex = catalog::nonsmooth_modulus(1.0).unwrap();
        let cert3 = nonstationary_certificate(&ex, 2.0).unwrap();
        assert!((cert3.c - 1.0).abs() < 1e-12);
        assert!((cert3.eps - 0.5).abs() < 1e-12);
        // the produced certificate satisfies the KL inequality on its ball
        let ctx = KlContext::pointwise(
            &ex,
            2.0,
            crate::piecewise::Interval::ball(2.0, cert3.eps),
            cert3.eps,
        )
        .unwrap();
        let grid = numerics::linspace(1.4, 2.6, 2001);
        let rep = verify_gkl(&ex, &ctx, &cert3.phi, &grid, 1e-9);
        assert!(rep.passed());

        assert!(matches!(
            nonstationary_certificate(&ex, 0.0),
            Err(DesingError::StationaryPoint)
        ));
    }
}
