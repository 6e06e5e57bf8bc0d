//! Difference-of-convex decomposition of `h(x) = sin(1/x)·exp(−1/x²)`.
//!
//! Splitting the second derivative into positive and negative parts and
//! integrating twice produces strictly increasing convex C² functions `f, g`
//! on the half line with `g − f = h`, so the set `{x > 0 : f(x) = g(x)}`
//! accumulates at the origin: the functions intersect at every `1/(nπ)`.
//!
//! Both cumulative integrals are built from a single dyadic sweep so that
//! their difference keeps full relative accuracy even where the amplitude of
//! `h` is far below 1.

use crate::numerics;

#[derive(Debug, Clone, thiserror::Error)]
pub enum DcError {
    #[error("quadrature budget exceeded: zeros below delta = {delta} are not resolvable")]
    QuadratureBudget { delta: f64 },
    #[error("depth must be at least 1")]
    BadDepth,
}

/// `sin(1/x)·exp(−1/x²)`, extended by 0 at the origin.
pub fn oscillation(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let u = 1.0 / x;
    let damp = (-u * u).exp();
    if damp == 0.0 {
        return 0.0;
    }
    u.sin() * damp
}

/// First derivative of the oscillation (used as a finite-difference oracle
/// target in the tests).
pub fn oscillation_prime(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let u = 1.0 / x;
    let damp = (-u * u).exp();
    if damp == 0.0 {
        return 0.0;
    }
    -u * u * damp * (u.cos() - 2.0 * u * u.sin())
}

/// Second derivative of the oscillation.
pub fn oscillation_second(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let u = 1.0 / x;
    let u2 = u * u;
    if u2 > 700.0 {
        return 0.0;
    }
    let damp = (-u2).exp();
    u2 * damp * ((2.0 * u - 4.0 * u2 * u) * u.cos() + (4.0 * u2 * u2 - 7.0 * u2) * u.sin())
}

/// The constructed pair `(f, g)` with `g − f = h` on `[0, x_max]`.
#[derive(Debug, Clone)]
pub struct DcOscillation {
    step: f64,
    /// cumulative ∫ h″₋ and ∫ h″₊ at the dyadic nodes
    f1: Vec<f64>,
    g1: Vec<f64>,
    /// cumulative second integrals at the nodes
    f2: Vec<f64>,
    g2: Vec<f64>,
    /// below this point every integrand underflows to zero
    pub delta: f64,
    pub depth: usize,
}

impl DcOscillation {
    /// Builds the pair; `depth` is the largest index `n` whose intersection
    /// point `1/(nπ)` must be resolvable above the underflow region.
    pub fn build(depth: usize) -> Result<Self, DcError> {
        if depth == 0 {
            return Err(DcError::BadDepth);
        }
        // exp(−1/x²) underflows for 1/x² > 745
        let delta = 1.0 / 745.0f64.sqrt();
        if 1.0 / (depth as f64 * std::f64::consts::PI) <= delta {
            return Err(DcError::QuadratureBudget { delta });
        }
        let step = 1.25 / 16384.0;
        let n = 16384usize;
        let mut f1 = Vec::with_capacity(n + 1);
        let mut g1 = Vec::with_capacity(n + 1);
        let mut f2 = Vec::with_capacity(n + 1);
        let mut g2 = Vec::with_capacity(n + 1);
        f1.push(0.0);
        g1.push(0.0);
        f2.push(0.0);
        g2.push(0.0);
        let neg = |x: f64| (-oscillation_second(x)).max(0.0);
        let pos = |x: f64| oscillation_second(x).max(0.0);
        for j in 0..n {
            let a = j as f64 * step;
            // composite Simpson over one interval for the first integrals
            f1.push(f1[j] + simpson5(neg, a, step));
            g1.push(g1[j] + simpson5(pos, a, step));
            // second integrals: ∫ moving first integral = slab + local double
            f2.push(f2[j] + f1[j] * step + double_integral(neg, a, step));
            g2.push(g2[j] + g1[j] * step + double_integral(pos, a, step));
        }
        Ok(DcOscillation {
            step,
            f1,
            g1,
            f2,
            g2,
            delta,
            depth,
        })
    }

    fn eval_two(&self, x: f64, table1: &[f64], table2: &[f64], w: impl Fn(f64) -> f64) -> f64 {
        let x = x.clamp(0.0, (table1.len() - 1) as f64 * self.step);
        let j = ((x / self.step) as usize).min(table1.len() - 2);
        let a = j as f64 * self.step;
        let dx = x - a;
        table2[j] + table1[j] * dx + double_integral(w, a, dx)
    }

    /// `f(x) = ∫₀ˣ∫₀ᵗ max(−h″, 0)`
    pub fn f(&self, x: f64) -> f64 {
        self.eval_two(x, &self.f1, &self.f2, |t| (-oscillation_second(t)).max(0.0))
    }

    /// `g(x) = ∫₀ˣ∫₀ᵗ max(h″, 0)`
    pub fn g(&self, x: f64) -> f64 {
        self.eval_two(x, &self.g1, &self.g2, |t| oscillation_second(t).max(0.0))
    }

    /// Largest deviation of `g − f` from the oscillation over a sample grid
    /// on `[lo, 1]`.
    pub fn residual_sup(&self, lo: f64, samples: usize) -> f64 {
        let grid = numerics::linspace(lo, 1.0, samples);
        grid.iter()
            .map(|&x| (self.g(x) - self.f(x) - oscillation(x)).abs())
            .fold(0.0, f64::max)
    }

    /// Locates the intersection points of `f` and `g` near `1/(nπ)` for
    /// `n = 1..=depth` by bisection on `g − f`.
    pub fn zeros(&self) -> Vec<f64> {
        let pi = std::f64::consts::PI;
        (1..=self.depth)
            .map(|n| {
                let nf = n as f64;
                let lo = 1.0 / ((nf + 0.5) * pi);
                let hi = 1.0 / ((nf - 0.5) * pi);
                crate::analytic::bisect_on(|x| self.g(x) - self.f(x), lo, hi)
            })
            .collect()
    }
}

/// 5-node composite Simpson of `w` over `[a, a + len]`.
fn simpson5(w: impl Fn(f64) -> f64, a: f64, len: f64) -> f64 {
    if len <= 0.0 {
        return 0.0;
    }
    let h = len / 4.0;
    let s = w(a) + 4.0 * w(a + h) + 2.0 * w(a + 2.0 * h) + 4.0 * w(a + 3.0 * h) + w(a + 4.0 * h);
    s * len / 12.0
}

/// `∫₀^len ∫₀^t w(a+s) ds dt = ∫₀^len (len − s)·w(a+s) ds` via Simpson.
fn double_integral(w: impl Fn(f64) -> f64, a: f64, len: f64) -> f64 {
    if len <= 0.0 {
        return 0.0;
    }
    let h = len / 4.0;
    let v = |s: f64| (len - s) * w(a + s);
    let s = v(0.0) + 4.0 * v(h) + 2.0 * v(2.0 * h) + 4.0 * v(3.0 * h) + v(4.0 * h);
    s * len / 12.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_derivative_matches_finite_differences() {
        for &x in &[0.2, 0.3183, 0.5, 0.8, 1.0] {
            let d = 1e-5;
            let fd = (oscillation(x + d) - 2.0 * oscillation(x) + oscillation(x - d)) / (d * d);
            let cf = oscillation_second(x);
            assert!(
                (fd - cf).abs() < 1e-3 * (1.0 + cf.abs()),
                "x={x}: fd {fd} vs closed {cf}"
            );
            let fd1 = (oscillation(x + d) - oscillation(x - d)) / (2.0 * d);
            let cf1 = oscillation_prime(x);
            assert!((fd1 - cf1).abs() < 1e-6 * (1.0 + cf1.abs()));
        }
    }

    #[test]
    fn difference_reproduces_oscillation() {
        let dc = DcOscillation::build(6).unwrap();
        assert!(dc.residual_sup(0.05, 256) < 1e-6);
        // anchors at the origin
        assert_eq!(dc.f(0.0), 0.0);
        assert_eq!(dc.g(0.0), 0.0);
        // spot value at x = 2/π
        let x = 2.0 / std::f64::consts::PI;
        let expected = (-std::f64::consts::PI * std::f64::consts::PI / 4.0).exp();
        assert!((dc.g(x) - dc.f(x) - expected).abs() < 1e-6);
        assert!((expected - 0.0848).abs() < 1e-3);
    }

    #[test]
    fn both_parts_convex_and_increasing() {
        let dc = DcOscillation::build(6).unwrap();
        let grid = numerics::linspace(0.05, 1.0, 257);
        for w in grid.windows(3) {
            let (a, m, b) = (w[0], w[1], w[2]);
            assert!(dc.f(m) <= 0.5 * (dc.f(a) + dc.f(b)) + 1e-9);
            assert!(dc.g(m) <= 0.5 * (dc.g(a) + dc.g(b)) + 1e-9);
        }
        for w in grid.windows(2) {
            assert!(dc.f(w[1]) > dc.f(w[0]));
            assert!(dc.g(w[1]) > dc.g(w[0]));
        }
    }

    #[test]
    fn zeros_land_on_reciprocal_multiples_of_pi() {
        let dc = DcOscillation::build(6).unwrap();
        let zeros = dc.zeros();
        let pi = std::f64::consts::PI;
        for (i, z) in zeros.iter().enumerate() {
            let expected = 1.0 / ((i + 1) as f64 * pi);
            assert!(
                (z - expected).abs() < 1e-6,
                "zero {} at {z}, expected {expected}",
                i + 1
            );
        }
    }

    #[test]
    fn budget_error_below_underflow_region() {
        assert!(matches!(
            DcOscillation::build(12),
            Err(DcError::QuadratureBudget { .. })
        ));
    }
}
