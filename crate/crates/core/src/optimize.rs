//! Numerical design of the no-switching randomized policy.
//!
//! Minimizes the NSRP EWSAoI over `{mu_i >= mu_min, sum mu = 1}` with
//! projected gradient descent: central-difference gradients, Barzilai-Borwein
//! trial steps and Armijo backtracking, from several starting points.

use crate::closed_form::{self, nsrp_ewsaoi_unchecked};
use crate::error::{Error, Result};
use crate::model::{validate_params, SourceParams};

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerSettings {
    /// Relative objective improvement below which a start is considered converged.
    pub tol: f64,
    pub max_iter: usize,
    /// Probability floor.
    pub mu_min: f64,
    /// Number of starting points used (at most 3).
    pub n_starts: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self { tol: 1e-13, max_iter: 20_000, mu_min: 1e-6, n_starts: 3 }
    }
}

impl OptimizerSettings {
    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Config("tol must be positive".into()));
        }
        if !(self.mu_min > 0.0 && self.mu_min * (n as f64) < 1.0) {
            return Err(Error::Config(format!("mu_min = {} must lie in (0, 1/N)", self.mu_min)));
        }
        if self.n_starts < 1 || self.max_iter < 1 {
            return Err(Error::Config("n_starts and max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// Outcome of a single start.
#[derive(Debug, Clone, PartialEq)]
pub struct StartOutcome {
    pub name: &'static str,
    pub mu: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Accepted objective values, starting with the initial point.
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeReport {
    pub mu: Vec<f64>,
    pub objective: f64,
    pub starts: Vec<StartOutcome>,
    /// All converged starts reached objectives within `1e-6` relative.
    pub starts_agree: bool,
}

/// Euclidean projection onto `{x_i >= floor, sum x = 1}`.
pub fn project_simplex(v: &[f64], floor: f64) -> Result<Vec<f64>> {
    let n = v.len();
    let mass = 1.0 - floor * n as f64;
    if n == 0 || !(mass > 0.0) || floor < 0.0 {
        return Err(Error::Domain(format!("floor {floor} leaves no feasible point for {n} entries")));
    }
    // Project v - floor onto the simplex of total `mass` (sort-based threshold).
    let mut sorted: Vec<f64> = v.iter().map(|x| x - floor).collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &s) in sorted.iter().enumerate() {
        cum += s;
        let t = (cum - mass) / (k + 1) as f64;
        if s - t > 0.0 {
            theta = t;
        }
    }
    Ok(v.iter().map(|x| (x - floor - theta).max(0.0) + floor).collect())
}

/// Central-difference gradient with per-coordinate step `h max(1, |x_i|)`.
pub fn numeric_gradient<F>(f: F, x: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let mut probe = x.to_vec();
    let mut grad = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let step = h * x[i].abs().max(1.0);
        probe[i] = x[i] + step;
        let up = f(&probe)?;
        probe[i] = x[i] - step;
        let down = f(&probe)?;
        probe[i] = x[i];
        let g = (up - down) / (2.0 * step);
        if !g.is_finite() {
            return Err(Error::Domain(format!("non-finite derivative along coordinate {i}")));
        }
        grad.push(g);
    }
    Ok(grad)
}

fn objective(params: &[SourceParams], mu: &[f64]) -> Result<f64> {
    let value = nsrp_ewsaoi_unchecked(params, mu, true);
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Domain("objective is not finite at this point".into()))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn descend(
    params: &[SourceParams],
    name: &'static str,
    start: &[f64],
    settings: &OptimizerSettings,
) -> Result<StartOutcome> {
    let floor = settings.mu_min;
    let h = (1e-6f64).min(0.5 * floor);
    let grad_at = |x: &[f64]| numeric_gradient(|m| objective(params, m), x, h);

    let mut x = project_simplex(start, floor)?;
    let mut fx = objective(params, &x)?;
    let mut g = grad_at(&x)?;
    let mut trace = vec![fx];
    let mut step = 1.0 / g.iter().map(|v| v.abs()).fold(1e-12, f64::max);
    let mut quiet = 0;

    for iter in 1..=settings.max_iter {
        let mut t = step;
        let mut accepted = None;
        for _ in 0..80 {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - t * gi).collect();
            let y = project_simplex(&trial, floor)?;
            let d: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
            let decrease = dot(&g, &d);
            if d.iter().all(|v| v.abs() < 1e-16) {
                break;
            }
            if let Ok(fy) = objective(params, &y) {
                if fy <= fx + 1e-4 * decrease {
                    accepted = Some((y, fy, d));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((y, fy, d)) = accepted else {
            // No descent direction left at working precision.
            return Ok(StartOutcome { name, mu: x, objective: fx, iterations: iter, converged: true, trace });
        };
        let g_new = grad_at(&y)?;
        let improvement = (fx - fy) / fx.abs();
        let dg: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let curvature = dot(&d, &dg);
        step = if curvature > 0.0 { dot(&d, &d) / curvature } else { 2.0 * t };
        x = y;
        fx = fy;
        g = g_new;
        trace.push(fx);

        // Stationarity: unit projected-gradient step barely moves the iterate.
        let pg = project_simplex(&x.iter().zip(&g).map(|(a, b)| a - b).collect::<Vec<_>>(), floor)?;
        let pg_norm = pg.iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        quiet = if improvement < settings.tol { quiet + 1 } else { 0 };
        if pg_norm <= 1e-8 || quiet >= 3 {
            return Ok(StartOutcome { name, mu: x, objective: fx, iterations: iter, converged: true, trace });
        }
    }
    Ok(StartOutcome { name, mu: x, objective: fx, iterations: settings.max_iter, converged: false, trace })
}

fn starting_points(params: &[SourceParams]) -> Result<Vec<(&'static str, Vec<f64>)>> {
    let n = params.len();
    let q = closed_form::q_lb(params)?;
    let raw: Vec<f64> = q.iter().zip(params).map(|(q, s)| q / s.p).collect();
    let total: f64 = raw.iter().sum();
    Ok(vec![
        ("uniform", vec![1.0 / n as f64; n]),
        ("optimal_srp", closed_form::optimal_srp(params)?),
        ("lower_bound_throughput", raw.into_iter().map(|r| r / total).collect()),
    ])
}

/// Runs every start and returns the best converged one together with
/// per-start diagnostics.
pub fn optimize_nsrp_report(params: &[SourceParams], settings: &OptimizerSettings) -> Result<OptimizeReport> {
    validate_params(params)?;
    settings.validate(params.len())?;
    if params.len() == 1 {
        let objective = objective(params, &[1.0])?;
        let only = StartOutcome {
            name: "uniform",
            mu: vec![1.0],
            objective,
            iterations: 0,
            converged: true,
            trace: vec![objective],
        };
        return Ok(OptimizeReport { mu: vec![1.0], objective, starts: vec![only], starts_agree: true });
    }
    let mut starts = Vec::new();
    for (name, x0) in starting_points(params)?.into_iter().take(settings.n_starts) {
        starts.push(descend(params, name, &x0, settings)?);
    }
    let best = starts
        .iter()
        .filter(|s| s.converged)
        .min_by(|a, b| a.objective.total_cmp(&b.objective))
        .cloned();
    let Some(best) = best else {
        let fallback = starts.iter().min_by(|a, b| a.objective.total_cmp(&b.objective)).unwrap();
        return Err(Error::NotConverged { best: fallback.mu.clone(), objective: fallback.objective });
    };
    let starts_agree = starts
        .iter()
        .filter(|s| s.converged)
        .all(|s| (s.objective - best.objective).abs() <= 1e-6 * best.objective.abs());
    if !starts_agree {
        log::warn!(
            "NSRP starts disagree: {:?}",
            starts.iter().map(|s| (s.name, s.objective)).collect::<Vec<_>>()
        );
    }
    Ok(OptimizeReport { mu: best.mu, objective: best.objective, starts, starts_agree })
}

/// Scheduling probabilities minimizing the NSRP EWSAoI.
pub fn optimize_nsrp(params: &[SourceParams], settings: &OptimizerSettings) -> Result<Vec<f64>> {
    optimize_nsrp_report(params, settings).map(|r| r.mu)
}
