//! Classical outer loops.
//!
//! Both optimizers take a cost callback `f(params, eval_index)`; the
//! evaluation index feeds the sampling stream so runs are reproducible
//! from the root seed alone.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::cost::CostEvaluation;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GdConfig {
    pub epsilon_fd: f64,
    pub eta: f64,
    pub max_iters: usize,
    pub tol_param: f64,
    pub tol_cost: f64,
}

impl Default for GdConfig {
    fn default() -> Self {
        Self { epsilon_fd: 0.05, eta: 0.3, max_iters: 30, tol_param: 0.01, tol_cost: 0.005 }
    }
}

impl GdConfig {
    /// Settings for the one-angle H2 landscape (curvature ≈ 3 Ha/rad²).
    pub fn h2() -> Self {
        Self { epsilon_fd: 0.01, ..Self::default() }
    }

    /// Settings for the factoring landscape, whose curvature is a few
    /// hundred cost units per rad², so the step must be small.
    pub fn vqf() -> Self {
        Self { epsilon_fd: 0.05, eta: 1e-3, max_iters: 60, tol_param: 0.01, tol_cost: 0.5 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.epsilon_fd > 0.0 && self.eta > 0.0 && self.tol_param > 0.0 && self.tol_cost > 0.0 && self.max_iters > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument("gradient-descent settings must be positive".into()))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GpConfig {
    pub m_k: f64,
    pub sigma_k: f64,
    pub z_lcb: f64,
    pub jitter: f64,
    pub max_iters: usize,
    pub tol_param: f64,
    pub tol_cost: f64,
    pub lower: f64,
    pub upper: f64,
    pub grid_points: usize,
}

impl Default for GpConfig {
    fn default() -> Self {
        Self {
            m_k: 0.6,
            sigma_k: 0.65,
            z_lcb: 1.959964,
            jitter: 1e-8,
            max_iters: 13,
            tol_param: 0.005,
            tol_cost: 5e-4,
            lower: -FRAC_PI_4,
            upper: FRAC_PI_2,
            grid_points: 1024,
        }
    }
}

impl GpConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.m_k > 0.0 && self.sigma_k > 0.0) {
            return Err(Error::InvalidArgument("kernel amplitude and length scale must be positive".into()));
        }
        if !(self.lower < self.upper) || self.grid_points < 512 || self.max_iters == 0 {
            return Err(Error::InvalidArgument("need lower < upper, at least 512 grid points and one iteration".into()));
        }
        if !(self.jitter >= 0.0 && self.tol_param > 0.0 && self.tol_cost > 0.0) {
            return Err(Error::InvalidArgument("jitter and tolerances must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub params: Vec<f64>,
    pub cost: f64,
    pub std_err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestPoint {
    pub params: Vec<f64>,
    pub cost: f64,
}

/// Optimizer history. `trajectory` holds the accepted iterates; the
/// finite-difference probes only count towards `evaluations`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptRun {
    pub trajectory: Vec<TracePoint>,
    pub best: BestPoint,
    pub converged: bool,
    pub iterations: usize,
    pub evaluations: u64,
    /// Wall-clock of each cost evaluation, kept out of deterministic output.
    #[serde(skip)]
    pub eval_wall_ms: Vec<f64>,
    #[serde(skip)]
    pub eval_log: Vec<EvalLogEntry>,
}

/// One line of the evaluation trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalLogEntry {
    pub eval_index: u64,
    pub params: Vec<f64>,
    pub value: f64,
    pub std_err: f64,
    pub group_records: Vec<crate::cost::GroupRecord>,
}

struct Recorder<F> {
    f: F,
    next_index: u64,
    wall: Vec<f64>,
    log: Vec<EvalLogEntry>,
}

impl<F: FnMut(&[f64], u64) -> Result<CostEvaluation>> Recorder<F> {
    fn call(&mut self, x: &[f64]) -> Result<CostEvaluation> {
        let start = Instant::now();
        let idx = self.next_index;
        self.next_index += 1;
        let e = (self.f)(x, idx)?;
        self.wall.push(start.elapsed().as_secs_f64() * 1e3);
        self.log.push(EvalLogEntry {
            eval_index: idx,
            params: x.to_vec(),
            value: e.value,
            std_err: e.std_err,
            group_records: e.records.clone(),
        });
        if !e.value.is_finite() {
            return Err(Error::Numerical(format!("non-finite cost at {x:?}")));
        }
        Ok(e)
    }
}

fn finish<F>(trajectory: Vec<TracePoint>, converged: bool, rec: Recorder<F>) -> OptRun {
    let best = trajectory
        .iter()
        .min_by(|a, b| a.cost.total_cmp(&b.cost))
        .map(|t| BestPoint { params: t.params.clone(), cost: t.cost })
        .unwrap_or(BestPoint { params: vec![], cost: f64::NAN });
    OptRun {
        iterations: trajectory.len(),
        trajectory,
        best,
        converged,
        evaluations: rec.next_index,
        eval_wall_ms: rec.wall,
        eval_log: rec.log,
    }
}

/// Forward-difference gradient descent `θ ← θ - η ∇C`.
pub fn gradient_descent<F>(cost_fn: F, init: &[f64], cfg: &GdConfig) -> Result<OptRun>
where
    F: FnMut(&[f64], u64) -> Result<CostEvaluation>,
{
    cfg.validate()?;
    if init.is_empty() || init.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("initial parameters must be finite and non-empty".into()));
    }
    let mut rec = Recorder { f: cost_fn, next_index: 0, wall: vec![], log: vec![] };
    let mut theta = init.to_vec();
    let mut trajectory: Vec<TracePoint> = Vec::new();
    let mut prev: Option<(Vec<f64>, f64)> = None;
    let mut converged = false;

    for _ in 0..cfg.max_iters {
        let base = match rec.call(&theta) {
            Ok(e) => e,
            Err(e) => return Err(abort(e, &trajectory)),
        };
        trajectory.push(TracePoint { params: theta.clone(), cost: base.value, std_err: base.std_err });
        if let Some((p, c)) = &prev {
            let dp = p.iter().zip(&theta).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if dp < cfg.tol_param && (c - base.value).abs() < cfg.tol_cost {
                converged = true;
                break;
            }
        }
        let mut grad = vec![0.0; theta.len()];
        for i in 0..theta.len() {
            let mut probe = theta.clone();
            probe[i] += cfg.epsilon_fd;
            let e = match rec.call(&probe) {
                Ok(e) => e,
                Err(e) => return Err(abort(e, &trajectory)),
            };
            grad[i] = (e.value - base.value) / cfg.epsilon_fd;
        }
        prev = Some((theta.clone(), base.value));
        for (t, g) in theta.iter_mut().zip(&grad) {
            *t -= cfg.eta * g;
        }
    }
    Ok(finish(trajectory, converged, rec))
}

fn abort(e: Error, trajectory: &[TracePoint]) -> Error {
    let tail: Vec<String> = trajectory
        .iter()
        .rev()
        .take(3)
        .map(|t| format!("{:?} -> {}", t.params, t.cost))
        .collect();
    Error::Numerical(format!("{e}; last iterates: [{}]", tail.join("; ")))
}

/// Gaussian-process posterior over one parameter with a constant prior mean.
pub struct GaussianProcess {
    xs: Vec<f64>,
    prior_mean: f64,
    m_k: f64,
    sigma_k: f64,
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
    weights: DVector<f64>,
}

impl GaussianProcess {
    /// Conditions on `(x, y)` observations with per-sample noise variances.
    pub fn fit(xs: &[f64], ys: &[f64], noise_var: &[f64], prior_mean: f64, cfg: &GpConfig) -> Result<Self> {
        let n = xs.len();
        if n == 0 || ys.len() != n || noise_var.len() != n {
            return Err(Error::InvalidArgument("GP needs matching, non-empty samples".into()));
        }
        let k = DMatrix::from_fn(n, n, |i, j| {
            let base = kernel(xs[i], xs[j], cfg.m_k, cfg.sigma_k);
            if i == j {
                base + noise_var[i] + cfg.jitter
            } else {
                base
            }
        });
        let chol = k
            .cholesky()
            .ok_or_else(|| Error::Numerical("kernel matrix is singular despite jitter".into()))?;
        let resid = DVector::from_iterator(n, ys.iter().map(|y| y - prior_mean));
        let weights = chol.solve(&resid);
        Ok(Self { xs: xs.to_vec(), prior_mean, m_k: cfg.m_k, sigma_k: cfg.sigma_k, chol, weights })
    }

    /// Posterior mean and variance at `x`.
    pub fn predict(&self, x: f64) -> (f64, f64) {
        let kx = DVector::from_iterator(self.xs.len(), self.xs.iter().map(|&xi| kernel(x, xi, self.m_k, self.sigma_k)));
        let mean = self.prior_mean + kx.dot(&self.weights);
        let v = self.chol.solve(&kx);
        let var = (self.m_k * self.m_k - kx.dot(&v)).max(0.0);
        (mean, var)
    }
}

/// Squared-exponential kernel `M² exp(-(a-b)²/(2σ²))`.
pub fn kernel(a: f64, b: f64, m_k: f64, sigma_k: f64) -> f64 {
    m_k * m_k * (-(a - b) * (a - b) / (2.0 * sigma_k * sigma_k)).exp()
}

/// One-parameter Bayesian optimization with a lower-confidence-bound
/// acquisition minimized over a uniform grid.
pub fn bayesian_optimize<F>(cost_fn: F, init: f64, cfg: &GpConfig) -> Result<OptRun>
where
    F: FnMut(&[f64], u64) -> Result<CostEvaluation>,
{
    cfg.validate()?;
    if !(cfg.lower..=cfg.upper).contains(&init) {
        return Err(Error::InvalidArgument(format!("initial point {init} outside [{}, {}]", cfg.lower, cfg.upper)));
    }
    let mut rec = Recorder { f: cost_fn, next_index: 0, wall: vec![], log: vec![] };
    let grid: Vec<f64> = (0..cfg.grid_points)
        .map(|j| cfg.lower + (cfg.upper - cfg.lower) * j as f64 / (cfg.grid_points - 1) as f64)
        .collect();

    let first = rec.call(&[init]).map_err(|e| abort(e, &[]))?;
    let prior_mean = first.value;
    let mut xs = vec![init];
    let mut ys = vec![first.value];
    let mut noise = vec![first.std_err * first.std_err];
    let mut trajectory = vec![TracePoint { params: vec![init], cost: first.value, std_err: first.std_err }];
    let mut converged = false;

    while trajectory.len() < cfg.max_iters {
        let gp = GaussianProcess::fit(&xs, &ys, &noise, prior_mean, cfg).map_err(|e| abort(e, &trajectory))?;
        let mut next = grid[0];
        let mut best_lcb = f64::INFINITY;
        for &x in &grid {
            let (m, v) = gp.predict(x);
            let lcb = m - cfg.z_lcb * v.sqrt();
            if lcb < best_lcb {
                best_lcb = lcb;
                next = x;
            }
        }
        let e = rec.call(&[next]).map_err(|e| abort(e, &trajectory))?;
        let (px, py) = (*xs.last().expect("non-empty"), *ys.last().expect("non-empty"));
        xs.push(next);
        ys.push(e.value);
        noise.push(e.std_err * e.std_err);
        trajectory.push(TracePoint { params: vec![next], cost: e.value, std_err: e.std_err });
        if (next - px).abs() < cfg.tol_param && (e.value - py).abs() < cfg.tol_cost {
            converged = true;
            break;
        }
    }
    Ok(finish(trajectory, converged, rec))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(v: f64) -> CostEvaluation {
        CostEvaluation { value: v, std_err: 0.0, records: vec![], n_settings_used: 0 }
    }

    #[test]
    fn quadratic_descent() {
        let cfg = GdConfig { epsilon_fd: 1e-4, eta: 0.4, max_iters: 200, tol_param: 1e-6, tol_cost: 1e-9 };
        let run = gradient_descent(|x, _| Ok(exact((x[0] - 0.3).powi(2))), &[0.0], &cfg).unwrap();
        assert!((run.best.params[0] - 0.3).abs() < 1e-3);
        assert!(run.converged);
    }

    #[test]
    fn descent_aborts_on_nan() {
        let err = gradient_descent(|x, _| Ok(exact(if x[0] > 0.5 { f64::NAN } else { -x[0] })), &[0.0], &GdConfig::default());
        assert!(matches!(err, Err(Error::Numerical(_))));
    }

    #[test]
    fn gp_interpolates_noiseless_sample() {
        let cfg = GpConfig::default();
        let gp = GaussianProcess::fit(&[0.3], &[1.7], &[0.0], 0.0, &cfg).unwrap();
        let (m, v) = gp.predict(0.3);
        assert!((m - 1.7).abs() < 1e-6);
        assert!(v < 1e-8);
    }

    #[test]
    fn best_is_trajectory_minimum() {
        let run = bayesian_optimize(|x, _| Ok(exact((x[0] - 0.2).powi(2))), 0.0, &GpConfig::default()).unwrap();
        let min = run.trajectory.iter().map(|t| t.cost).fold(f64::INFINITY, f64::min);
        assert_eq!(run.best.cost, min);
        assert!((run.best.params[0] - 0.2).abs() < 0.01);
    }

    #[test]
    fn config_checks() {
        assert!(GpConfig { grid_points: 100, ..GpConfig::default() }.validate().is_err());
        assert!(GdConfig { eta: 0.0, ..GdConfig::default() }.validate().is_err());
        assert!(bayesian_optimize(|_, _| Ok(exact(0.0)), 3.0, &GpConfig::default()).is_err());
    }
}
