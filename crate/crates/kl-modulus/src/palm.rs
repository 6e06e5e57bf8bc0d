//! Proximal alternating linearized minimization for structured objectives
//! `Ψ(x, y) = f(x) + g(y) + F(x, y)`, with a per-iteration ledger that checks
//! the sufficient-decrease and subgradient-residual inequalities and
//! evaluates the trajectory-length bound
//! `Σ‖z_{k+1} − z_k‖ ≤ A + C·φ(Ψ(z_{l+1}) − Ψ(z*))`, `C = 2(2M + 3ρ₂)/ρ₁`.

use std::fmt;
use std::sync::Arc;

use crate::modulus::{Desingularizer, KlOracle};

type ValFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type ProxFn = Arc<dyn Fn(&[f64], f64) -> Vec<f64> + Send + Sync>;
type CoupleFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;
type CoupleGradFn = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;
type LipFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type DistFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum PalmError {
    #[error("configuration invalid: {0}")]
    Config(String),
    #[error("proximal oracle failed at iteration {k}: {reason}")]
    ProxFailure { k: usize, reason: String },
    #[error("sufficient decrease violated at iteration {k} (slack {slack}); check L1/L2")]
    DescentViolation { k: usize, slack: f64 },
    #[error("trace never entered the KL band (eps, eta)")]
    BandNotEntered,
    #[error("tail iterates have not settled (value spread {spread})")]
    NotSettled { spread: f64 },
    #[error("objective appears unbounded below on the probe box")]
    Unbounded,
}

/// How the bounded-set Lipschitz constant of ∇F is obtained.
#[derive(Clone)]
pub enum MEstimator {
    /// exact constant supplied with the problem
    Analytic(f64),
    /// sampled gradient differences on the inflated trace box, then doubled
    SampledBox { safety: f64 },
}

impl fmt::Debug for MEstimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MEstimator::Analytic(v) => write!(f, "Analytic({v})"),
            MEstimator::SampledBox { safety } => write!(f, "SampledBox(safety={safety})"),
        }
    }
}

/// A structured PALM problem with proximal and gradient oracles.
///
/// Proximal oracles follow `Prox_λ^f(v) = argmin_u f(u) + (λ/2)‖v − u‖²` and
/// must be single-valued with a deterministic tie rule.
#[derive(Clone)]
pub struct PalmProblem {
    pub name: String,
    pub dims: (usize, usize),
    pub f_val: ValFn,
    pub f_prox: ProxFn,
    pub g_val: ValFn,
    pub g_prox: ProxFn,
    pub coupling: CoupleFn,
    pub grad_x: CoupleGradFn,
    pub grad_y: CoupleGradFn,
    /// block Lipschitz moduli L1(y), L2(x)
    pub l1: LipFn,
    pub l2: LipFn,
    /// bounds (λ⁻, λ⁺) on the moduli observed along runs
    pub lambda1: (f64, f64),
    pub lambda2: (f64, f64),
    pub m_estimator: MEstimator,
    /// exact dist(0, ∂Ψ(x, y)) when the structure permits it
    pub dist_subdiff: Option<DistFn>,
}

impl fmt::Debug for PalmProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PalmProblem({}, dims {:?})", self.name, self.dims)
    }
}

impl PalmProblem {
    pub fn objective(&self, x: &[f64], y: &[f64]) -> f64 {
        (self.f_val)(x) + (self.g_val)(y) + (self.coupling)(x, y)
    }

    /// Coarse lower-boundedness probe for the blanket assumptions.
    fn probe_bounded(&self, z0: &ZPoint) -> Result<(), PalmError> {
        let span = 8.0;
        for i in 0..5 {
            for j in 0..5 {
                let sx = -span + span * i as f64 / 2.0;
                let sy = -span + span * j as f64 / 2.0;
                let x: Vec<f64> = z0.x.iter().map(|v| v + sx).collect();
                let y: Vec<f64> = z0.y.iter().map(|v| v + sy).collect();
                let psi = self.objective(&x, &y);
                if psi < -1e15 || !psi.is_finite() && psi < 0.0 {
                    return Err(PalmError::Unbounded);
                }
            }
        }
        Ok(())
    }
}

/// One iterate `z = (x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl ZPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        ZPoint { x, y }
    }

    pub fn dist(&self, other: &ZPoint) -> f64 {
        let mut acc = 0.0;
        for (a, b) in self.x.iter().zip(other.x.iter()) {
            acc += (a - b) * (a - b);
        }
        for (a, b) in self.y.iter().zip(other.y.iter()) {
            acc += (a - b) * (a - b);
        }
        acc.sqrt()
    }

    pub fn flat(&self) -> Vec<f64> {
        let mut v = self.x.clone();
        v.extend_from_slice(&self.y);
        v
    }
}

/// Declared KL band used to record the entry index `l`.
#[derive(Debug, Clone)]
pub struct KlBand {
    pub omega: Vec<Vec<f64>>,
    pub eps: f64,
    pub eta: f64,
}

/// Run configuration; `gamma1, gamma2 > 1` strictly.
#[derive(Debug, Clone)]
pub struct PalmConfig {
    pub gamma1: f64,
    pub gamma2: f64,
    pub z0: ZPoint,
    pub max_iters: usize,
    pub stop_tol: f64,
    pub seed: u64,
    pub band: Option<KlBand>,
}

impl PalmConfig {
    pub fn new(gamma1: f64, gamma2: f64, z0: ZPoint) -> Self {
        PalmConfig {
            gamma1,
            gamma2,
            z0,
            max_iters: 200,
            stop_tol: 0.0,
            seed: 0,
            band: None,
        }
    }

    fn validate(&self, problem: &PalmProblem) -> Result<(), PalmError> {
        if !(self.gamma1 > 1.0) || !(self.gamma2 > 1.0) {
            return Err(PalmError::Config(
                "gamma1 and gamma2 must be strictly greater than 1".into(),
            ));
        }
        if self.z0.x.len() != problem.dims.0 || self.z0.y.len() != problem.dims.1 {
            return Err(PalmError::Config("initial point has wrong dimensions".into()));
        }
        Ok(())
    }
}

/// Entry indices into the KL band: `l1` for the value gap, `l2` for the
/// distance condition, and their maximum as used by the length bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandEntry {
    pub l1: usize,
    pub l2: usize,
    pub l: usize,
}

/// Full iterate and ledger history of a PALM run.
#[derive(Debug, Clone)]
pub struct PalmTrace {
    pub iterates: Vec<ZPoint>,
    pub values: Vec<f64>,
    /// step moduli per iteration: c_k = γ₁L1(y_k), d_k = γ₂L2(x_{k+1})
    pub c_ks: Vec<f64>,
    pub d_ks: Vec<f64>,
    /// ‖z_{k+1} − z_k‖ per iteration
    pub step_norms: Vec<f64>,
    /// ‖A_x^k‖ + ‖A_y^k‖ for k = 1..len-1
    pub residual_norms: Vec<f64>,
    /// Ψ(z_k) − Ψ(z_{k+1}) − (ρ₁/2)‖z_{k+1} − z_k‖² per iteration
    pub decrease_slacks: Vec<f64>,
    pub rho1: f64,
    pub rho2: f64,
    pub limit_estimate: ZPoint,
    pub psi_star: f64,
    pub band_entry: Option<BandEntry>,
}

impl PalmTrace {
    pub fn len(&self) -> usize {
        self.iterates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterates.is_empty()
    }

    /// Empirical `Σ_{k=1}^{K-1} ‖z_{k+1} − z_k‖` (the sum the length bound
    /// controls starts at k = 1).
    pub fn total_length_from_one(&self) -> f64 {
        self.step_norms.iter().skip(1).sum()
    }
}

/// One PALM iteration: the x-block with `c_k = γ₁L1(y_k)` first, then the
/// y-block with `d_k = γ₂L2(x_{k+1})` at the fresh x.
pub fn palm_step(
    problem: &PalmProblem,
    gamma1: f64,
    gamma2: f64,
    z: &ZPoint,
    k: usize,
) -> Result<(ZPoint, f64, f64), PalmError> {
    let c_k = gamma1 * (problem.l1)(&z.y);
    if !(c_k > 0.0) || !c_k.is_finite() {
        return Err(PalmError::ProxFailure {
            k,
            reason: format!("nonpositive x-block modulus c_k = {c_k}"),
        });
    }
    let gx = (problem.grad_x)(&z.x, &z.y);
    let v: Vec<f64> = z.x.iter().zip(gx.iter()).map(|(xi, gi)| xi - gi / c_k).collect();
    let x_next = (problem.f_prox)(&v, c_k);
    if x_next.len() != problem.dims.0 || x_next.iter().any(|t| !t.is_finite()) {
        return Err(PalmError::ProxFailure {
            k,
            reason: "x-block proximal oracle returned an invalid point".into(),
        });
    }
    let d_k = gamma2 * (problem.l2)(&x_next);
    if !(d_k > 0.0) || !d_k.is_finite() {
        return Err(PalmError::ProxFailure {
            k,
            reason: format!("nonpositive y-block modulus d_k = {d_k}"),
        });
    }
    let gy = (problem.grad_y)(&x_next, &z.y);
    let w: Vec<f64> = z.y.iter().zip(gy.iter()).map(|(yi, gi)| yi - gi / d_k).collect();
    let y_next = (problem.g_prox)(&w, d_k);
    if y_next.len() != problem.dims.1 || y_next.iter().any(|t| !t.is_finite()) {
        return Err(PalmError::ProxFailure {
            k,
            reason: "y-block proximal oracle returned an invalid point".into(),
        });
    }
    Ok((ZPoint::new(x_next, y_next), c_k, d_k))
}

/// Runs PALM from `config.z0`, recording values, step norms, residuals and
/// decrease slacks. Aborts with `DescentViolation` if the sufficient-decrease
/// inequality fails beyond tolerance.
pub fn run(problem: &PalmProblem, config: &PalmConfig) -> Result<PalmTrace, PalmError> {
    config.validate(problem)?;
    problem.probe_bounded(&config.z0)?;
    let rho1 = ((config.gamma1 - 1.0) * problem.lambda1.0)
        .min((config.gamma2 - 1.0) * problem.lambda2.0);
    let rho2 = (config.gamma1 * problem.lambda1.1).max(config.gamma2 * problem.lambda2.1);

    let mut iterates = vec![config.z0.clone()];
    let mut values = vec![problem.objective(&config.z0.x, &config.z0.y)];
    let mut c_ks = Vec::new();
    let mut d_ks = Vec::new();
    let mut step_norms = Vec::new();
    let mut decrease_slacks = Vec::new();

    for k in 0..config.max_iters {
        let z = iterates.last().unwrap().clone();
        let (z_next, c_k, d_k) = palm_step(problem, config.gamma1, config.gamma2, &z, k)?;
        let psi_next = problem.objective(&z_next.x, &z_next.y);
        let step = z_next.dist(&z);
        let slack = values[k] - psi_next - 0.5 * rho1 * step * step;
        if slack < -1e-9 * (1.0 + values[k].abs()) {
            return Err(PalmError::DescentViolation { k, slack });
        }
        c_ks.push(c_k);
        d_ks.push(d_k);
        step_norms.push(step);
        decrease_slacks.push(slack);
        iterates.push(z_next);
        values.push(psi_next);
        if step <= config.stop_tol {
            break;
        }
    }

    let limit_estimate = iterates.last().unwrap().clone();
    let psi_star = *values.last().unwrap();
    let mut residual_norms = Vec::new();
    for k in 1..iterates.len() {
        let (ax, ay) = residual_vectors(problem, &iterates, &c_ks, &d_ks, k);
        residual_norms.push(norm(&ax) + norm(&ay));
    }
    let band_entry = config
        .band
        .as_ref()
        .and_then(|band| band_entry_indices(&iterates, &values, psi_star, band));
    Ok(PalmTrace {
        iterates,
        values,
        c_ks,
        d_ks,
        step_norms,
        residual_norms,
        decrease_slacks,
        rho1,
        rho2,
        limit_estimate,
        psi_star,
        band_entry,
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|t| t * t).sum::<f64>().sqrt()
}

fn dist_to_omega(z: &ZPoint, omega: &[Vec<f64>]) -> f64 {
    let flat = z.flat();
    omega
        .iter()
        .map(|p| {
            flat.iter()
                .zip(p.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// First indices after which the trajectory stays inside the declared band:
/// `l1` for `Ψ(z_k) − Ψ* < η` (values are nonincreasing), `l2` for
/// `dist(z_k, Ω) < ε` from that index onward.
fn band_entry_indices(
    iterates: &[ZPoint],
    values: &[f64],
    psi_star: f64,
    band: &KlBand,
) -> Option<BandEntry> {
    let l1 = values.iter().position(|&v| v - psi_star < band.eta)?;
    let mut l2 = None;
    for k in (0..iterates.len()).rev() {
        if dist_to_omega(&iterates[k], &band.omega) >= band.eps {
            l2 = Some(k + 1);
            break;
        }
        l2 = Some(k);
    }
    let l2 = l2?;
    if l2 >= iterates.len() {
        return None;
    }
    Some(BandEntry {
        l1,
        l2,
        l: l1.max(l2),
    })
}

fn residual_vectors(
    problem: &PalmProblem,
    iterates: &[ZPoint],
    c_ks: &[f64],
    d_ks: &[f64],
    k: usize,
) -> (Vec<f64>, Vec<f64>) {
    let prev = &iterates[k - 1];
    let cur = &iterates[k];
    let c = c_ks[k - 1];
    let d = d_ks[k - 1];
    let gx_cur = (problem.grad_x)(&cur.x, &cur.y);
    let gx_prev = (problem.grad_x)(&prev.x, &prev.y);
    let ax: Vec<f64> = (0..cur.x.len())
        .map(|i| c * (prev.x[i] - cur.x[i]) + gx_cur[i] - gx_prev[i])
        .collect();
    let gy_cur = (problem.grad_y)(&cur.x, &cur.y);
    let gy_prev = (problem.grad_y)(&cur.x, &prev.y);
    let ay: Vec<f64> = (0..cur.y.len())
        .map(|i| d * (prev.y[i] - cur.y[i]) + gy_cur[i] - gy_prev[i])
        .collect();
    (ax, ay)
}

/// The subgradient witness `(A_x^k, A_y^k)` at iteration `k ≥ 1`, its norm
/// sum, and the residual bound `(2M + 3ρ₂)‖z_k − z_{k−1}‖`.
#[derive(Debug, Clone)]
pub struct ResidualWitness {
    pub ax: Vec<f64>,
    pub ay: Vec<f64>,
    pub norm_sum: f64,
    pub bound: f64,
}

pub fn residual(
    problem: &PalmProblem,
    trace: &PalmTrace,
    m: f64,
    k: usize,
) -> Result<ResidualWitness, PalmError> {
    if k == 0 || k >= trace.iterates.len() {
        return Err(PalmError::Config(format!(
            "residual index k = {k} outside 1..{}",
            trace.iterates.len()
        )));
    }
    let (ax, ay) = residual_vectors(problem, &trace.iterates, &trace.c_ks, &trace.d_ks, k);
    let norm_sum = norm(&ax) + norm(&ay);
    let bound = (2.0 * m + 3.0 * trace.rho2) * trace.step_norms[k - 1];
    Ok(ResidualWitness {
        ax,
        ay,
        norm_sum,
        bound,
    })
}

/// Report of the sufficient-decrease scan.
#[derive(Debug, Clone)]
pub struct DecreaseReport {
    pub min_slack: f64,
    pub pass: bool,
    /// square-summability proxy: the last half of Σ‖Δz‖² is no larger than
    /// the first half
    pub tail_decay: bool,
}

pub fn sufficient_decrease_check(trace: &PalmTrace, tol: f64) -> DecreaseReport {
    let min_slack = trace
        .decrease_slacks
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let sq: Vec<f64> = trace.step_norms.iter().map(|s| s * s).collect();
    let half = sq.len() / 2;
    let first: f64 = sq[..half].iter().sum();
    let last: f64 = sq[half..].iter().sum();
    DecreaseReport {
        min_slack,
        pass: trace.decrease_slacks.iter().all(|&s| s >= -tol),
        tail_decay: last <= first + tol || sq.len() < 4,
    }
}

/// Estimates the bounded-set Lipschitz constant of ∇F.
pub fn estimate_m(problem: &PalmProblem, trace: &PalmTrace) -> f64 {
    match problem.m_estimator {
        MEstimator::Analytic(v) => v,
        MEstimator::SampledBox { safety } => {
            let flats: Vec<Vec<f64>> = trace.iterates.iter().map(|z| z.flat()).collect();
            let dim = flats[0].len();
            let mut lo = vec![f64::INFINITY; dim];
            let mut hi = vec![f64::NEG_INFINITY; dim];
            for p in &flats {
                for d in 0..dim {
                    lo[d] = lo[d].min(p[d]);
                    hi[d] = hi[d].max(p[d]);
                }
            }
            for d in 0..dim {
                let pad = 0.1 * (hi[d] - lo[d]).max(1.0);
                lo[d] -= pad;
                hi[d] += pad;
            }
            let (n, m_dim) = problem.dims;
            let samples = 4usize;
            let mut points: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
            let total = samples.pow(dim as u32);
            for idx in 0..total.min(4096) {
                let mut rem = idx;
                let mut p = vec![0.0; dim];
                for d in 0..dim {
                    let j = rem % samples;
                    rem /= samples;
                    p[d] = lo[d] + (hi[d] - lo[d]) * j as f64 / (samples - 1) as f64;
                }
                points.push((p[..n].to_vec(), p[n..n + m_dim].to_vec()));
            }
            let grad = |x: &[f64], y: &[f64]| -> Vec<f64> {
                let mut g = (problem.grad_x)(x, y);
                g.extend((problem.grad_y)(x, y));
                g
            };
            let mut best = 0.0f64;
            for i in 0..points.len() {
                for j in (i + 1)..points.len() {
                    let gi = grad(&points[i].0, &points[i].1);
                    let gj = grad(&points[j].0, &points[j].1);
                    let dg: f64 = gi
                        .iter()
                        .zip(gj.iter())
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    let dz: f64 = points[i]
                        .0
                        .iter()
                        .chain(points[i].1.iter())
                        .zip(points[j].0.iter().chain(points[j].1.iter()))
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    if dz > 1e-12 {
                        best = best.max(dg / dz);
                    }
                }
            }
            best * safety
        }
    }
}

/// Clusters the last `tail` iterates and returns representative points with
/// the common limiting value.
pub fn limit_set_estimate(
    trace: &PalmTrace,
    tail: usize,
) -> Result<(Vec<ZPoint>, f64), PalmError> {
    let len = trace.iterates.len();
    let tail = tail.min(len);
    let pts = &trace.iterates[len - tail..];
    let vals = &trace.values[len - tail..];
    let spread = vals.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
        - vals.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if spread > 1e-6 * (1.0 + trace.psi_star.abs()) {
        return Err(PalmError::NotSettled { spread });
    }
    let max_step = trace.step_norms[trace.step_norms.len().saturating_sub(tail)..]
        .iter()
        .fold(0.0f64, |a, &b| a.max(b));
    let thresh = 10.0 * max_step + 1e-9;
    let mut reps: Vec<ZPoint> = Vec::new();
    for p in pts {
        if !reps.iter().any(|r| r.dist(p) <= thresh) {
            reps.push(p.clone());
        }
    }
    Ok((reps, trace.psi_star))
}

/// The constants and evaluated bounds of the finite-length certificate.
#[derive(Debug, Clone)]
pub struct BoundLedger {
    pub rho1: f64,
    pub rho2: f64,
    pub m: f64,
    pub c: f64,
    /// A = ‖z_{l+1} − z_l‖ + Σ_{k=1}^{l} ‖z_{k+1} − z_k‖
    pub a: f64,
    pub l: usize,
    pub l1: usize,
    pub l2: usize,
    /// finite-termination regime: Ψ(z_l) already equals Ψ(z*)
    pub case1: bool,
    /// evaluation point Ψ(z_{l+1}) − Ψ(z*)
    pub t_eval: f64,
    /// per-desingularizer `(name, φ(t_eval), A + C·φ(t_eval))`
    pub bounds: Vec<(String, f64, f64)>,
    pub empirical_total: f64,
    pub partial_sum_checked: usize,
    pub partial_sum_violations: usize,
}

impl BoundLedger {
    pub fn bound_for(&self, name: &str) -> Option<f64> {
        self.bounds
            .iter()
            .find(|(n, _, _)| n == name)
            .map(|&(_, _, b)| b)
    }
}

/// Evaluates the trajectory-length certificate for each desingularizer with
/// one shared set of constants, and sweeps the partial-sum inequality
/// `Σ_{k=p}^{p+q}‖z_{k+1} − z_k‖ ≤ C·φ(Ψ(z_p) − Ψ*) + ‖z_p − z_{p−1}‖`
/// over all admissible `p` (using the first-listed desingularizer).
pub fn length_bound(
    trace: &PalmTrace,
    m: f64,
    moduli: &[(String, Desingularizer)],
    case_tol: f64,
) -> Result<BoundLedger, PalmError> {
    let entry = trace.band_entry.ok_or(PalmError::BandNotEntered)?;
    let l = entry.l;
    if l + 1 >= trace.iterates.len() {
        return Err(PalmError::BandNotEntered);
    }
    let c = 2.0 * (2.0 * m + 3.0 * trace.rho2) / trace.rho1;
    let mut a = trace.step_norms[l];
    for k in 1..=l {
        a += trace.step_norms.get(k).copied().unwrap_or(0.0);
    }
    let t_eval = (trace.values[l + 1] - trace.psi_star).max(0.0);
    let case1 = trace.values[l] - trace.psi_star <= case_tol;
    let empirical_total = trace.total_length_from_one();
    let bounds: Vec<(String, f64, f64)> = moduli
        .iter()
        .map(|(name, phi)| {
            let phi_t = phi.eval(t_eval);
            let bound = if case1 { a } else { a + c * phi_t };
            (name.clone(), phi_t, bound)
        })
        .collect();

    let mut checked = 0usize;
    let mut violations = 0usize;
    if let Some((_, phi)) = moduli.first() {
        let last = trace.step_norms.len();
        for p in (l + 1)..last {
            let gap_p = (trace.values[p] - trace.psi_star).max(0.0);
            let rhs = c * phi.eval(gap_p) + trace.step_norms[p - 1];
            let lhs: f64 = trace.step_norms[p..].iter().sum();
            checked += 1;
            if lhs > rhs + 1e-9 * (1.0 + rhs.abs()) {
                violations += 1;
            }
        }
    }

    Ok(BoundLedger {
        rho1: trace.rho1,
        rho2: trace.rho2,
        m,
        c,
        a,
        l,
        l1: entry.l1,
        l2: entry.l2,
        case1,
        t_eval,
        bounds,
        empirical_total,
        partial_sum_checked: checked,
        partial_sum_violations: violations,
    })
}

/// Value/subgradient oracle for Ψ, used by the setwise modulus machinery.
pub struct PalmObjective<'a>(pub &'a PalmProblem);

impl KlOracle for PalmObjective<'_> {
    fn dim(&self) -> usize {
        self.0.dims.0 + self.0.dims.1
    }
    fn value(&self, z: &[f64]) -> f64 {
        let (n, _) = self.0.dims;
        self.0.objective(&z[..n], &z[n..])
    }
    fn dist_zero_subdiff(&self, z: &[f64]) -> f64 {
        let (n, _) = self.0.dims;
        match &self.0.dist_subdiff {
            Some(d) => d(&z[..n], &z[n..]),
            None => f64::INFINITY,
        }
    }
}
