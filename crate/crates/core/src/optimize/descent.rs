//! Projected gradient descent with Barzilai-Borwein steps and Armijo
//! backtracking. The feasible set is convex (box bounds intersected with an
//! affine mass constraint), so the segment between the current point and the
//! projected trial point stays feasible and accepted steps never increase
//! the objective.

use crate::error::{Error, Result};

/// One row of an iteration trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub energy: f64,
    pub residual: f64,
    pub mass_error: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone)]
pub struct DescentOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub tau_init: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    pub armijo_c: f64,
    /// record every k-th iterate in the trace (0 = no trace)
    pub trace_every: usize,
    /// diagonal curvature estimates; the search direction becomes -g/D,
    /// which evens out the interior/exterior stiffness gap of nonlocal
    /// energies with free exterior unknowns
    pub precond: Option<Vec<f64>>,
    /// absolute energy-comparison slack: convolution-based energies carry
    /// cancellation roundoff well above eps*|E|, and the line search must
    /// not reject steps on comparison noise
    pub noise_floor: f64,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions {
            tol: 1e-9,
            max_iter: 200_000,
            tau_init: 1.0,
            tau_min: 1e-12,
            tau_max: 1e8,
            armijo_c: 1e-4,
            trace_every: 0,
            precond: None,
            noise_floor: 1e-11,
        }
    }
}

pub struct DescentOutcome {
    pub u: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub energy: f64,
    pub trace: Vec<TraceRow>,
    pub converged: bool,
}

/// Minimizes `energy` over the convex set implied by `project`, using the
/// gradient oracle `grad`. `residual` maps (u, grad) to the stationarity
/// measure that drives the stopping test; `diag` reports (mass error,
/// lambda-like scalar) for tracing only.
#[allow(clippy::too_many_arguments)]
pub fn projected_bb_descent(
    energy: &dyn Fn(&[f64]) -> f64,
    grad: &dyn Fn(&[f64]) -> Vec<f64>,
    project: &dyn Fn(&mut Vec<f64>),
    residual: &dyn Fn(&[f64], &[f64]) -> f64,
    diag: &dyn Fn(&[f64], &[f64]) -> (f64, f64),
    u0: Vec<f64>,
    opts: &DescentOptions,
) -> Result<DescentOutcome> {
    let mut u = u0;
    project(&mut u);
    let mut e = energy(&u);
    let mut g = grad(&u);
    let mut tau = opts.tau_init;
    let mut trace = Vec::new();
    let mut res = residual(&u, &g);
    // consecutive do-nothing steps: the energy landscape is flat at f64
    // resolution, further progress is noise
    let mut stalled = 0usize;

    for it in 0..opts.max_iter {
        if opts.trace_every > 0 && it % opts.trace_every == 0 {
            let (me, la) = diag(&u, &g);
            trace.push(TraceRow { iter: it, energy: e, residual: res, mass_error: me, lambda: la });
        }
        if res < opts.tol {
            return Ok(DescentOutcome { u, iterations: it, residual: res, energy: e, trace, converged: true });
        }
        // projected trial point and feasible descent direction
        let mut trial: Vec<f64> = match &opts.precond {
            Some(d) => u
                .iter()
                .zip(g.iter().zip(d.iter()))
                .map(|(x, (gi, di))| x - tau * gi / di)
                .collect(),
            None => u.iter().zip(g.iter()).map(|(x, gi)| x - tau * gi).collect(),
        };
        project(&mut trial);
        let d: Vec<f64> = trial.iter().zip(u.iter()).map(|(t, x)| t - x).collect();
        let gd: f64 = g.iter().zip(d.iter()).map(|(a, b)| a * b).sum();
        if gd >= 0.0 {
            // not a descent direction: shrink the step and retry
            tau = (tau * 0.1).max(opts.tau_min);
            if tau <= opts.tau_min {
                return Ok(DescentOutcome { u, iterations: it, residual: res, energy: e, trace, converged: res < opts.tol });
            }
            continue;
        }
        let mut lambda = 1.0;
        let mut accepted = false;
        let mut e_new = e;
        let mut u_new = u.clone();
        // noise-aware sufficient decrease: below the evaluation noise of
        // the energy, trust the gradient model instead of the comparison
        let eta = opts.noise_floor * (1.0 + e.abs());
        for _ in 0..40 {
            for (un, (x, di)) in u_new.iter_mut().zip(u.iter().zip(d.iter())) {
                *un = x + lambda * di;
            }
            e_new = energy(&u_new);
            if e_new <= e + opts.armijo_c * lambda * gd + eta {
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            // comparison noise dominates: stop here with the current state
            return Ok(DescentOutcome {
                u,
                iterations: it,
                residual: res,
                energy: e,
                trace,
                converged: res < opts.tol,
            });
        }
        let g_new = grad(&u_new);
        // BB1 step from the accepted displacement (in the preconditioned
        // metric when a diagonal is supplied)
        let mut sy = 0.0;
        let mut ss = 0.0;
        let mut smax = 0.0f64;
        for k in 0..u.len() {
            let sk = u_new[k] - u[k];
            let yk = g_new[k] - g[k];
            let dk = opts.precond.as_ref().map_or(1.0, |d| d[k]);
            sy += sk * yk;
            ss += sk * sk * dk;
            smax = smax.max(sk.abs());
        }
        if e_new == e && smax < 1e-14 {
            stalled += 1;
            if stalled >= 8 {
                return Ok(DescentOutcome {
                    u,
                    iterations: it,
                    residual: res,
                    energy: e,
                    trace,
                    converged: res < opts.tol,
                });
            }
        } else {
            stalled = 0;
        }
        tau = if sy > 1e-300 { (ss / sy).clamp(opts.tau_min, opts.tau_max) } else { 1.0 };
        u = u_new;
        g = g_new;
        e = e_new;
        res = residual(&u, &g);
    }
    Ok(DescentOutcome {
        u,
        iterations: opts.max_iter,
        residual: res,
        energy: e,
        trace,
        converged: res < opts.tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn quadratic_with_box_projection() {
        // min |u - a|^2 s.t. u in [-1, 1]^n
        let a = [3.0, -0.5, -7.0, 0.2];
        let energy = |u: &[f64]| -> f64 {
            u.iter().zip(a.iter()).map(|(x, ai)| (x - ai) * (x - ai)).sum()
        };
        let grad = |u: &[f64]| -> Vec<f64> {
            u.iter().zip(a.iter()).map(|(x, ai)| 2.0 * (x - ai)).collect()
        };
        let project = |u: &mut Vec<f64>| {
            for x in u.iter_mut() {
                *x = x.clamp(-1.0, 1.0);
            }
        };
        let residual = |u: &[f64], g: &[f64]| -> f64 {
            let mut r: f64 = 0.0;
            for k in 0..u.len() {
                let t = (u[k] - g[k]).clamp(-1.0, 1.0);
                r = r.max((t - u[k]).abs());
            }
            r
        };
        let out = projected_bb_descent(
            &energy,
            &grad,
            &project,
            &residual,
            &|_, _| (0.0, 0.0),
            vec![0.0; 4],
            &DescentOptions { tol: 1e-12, ..Default::default() },
        )
        .unwrap();
        assert!(out.converged);
        let expect = [1.0, -0.5, -1.0, 0.2];
        for k in 0..4 {
            assert_relative_eq!(out.u[k], expect[k], epsilon = 1e-9);
        }
    }

    #[test]
    fn energy_is_monotone_along_trace() {
        let energy = |u: &[f64]| -> f64 {
            u.iter().enumerate().map(|(i, x)| (i as f64 + 1.0) * x * x).sum::<f64>()
                + (u[0] * u[1]).powi(2)
        };
        let grad = |u: &[f64]| -> Vec<f64> {
            let mut g: Vec<f64> = u
                .iter()
                .enumerate()
                .map(|(i, x)| 2.0 * (i as f64 + 1.0) * x)
                .collect();
            g[0] += 2.0 * u[0] * u[1] * u[1];
            g[1] += 2.0 * u[1] * u[0] * u[0];
            g
        };
        let out = projected_bb_descent(
            &energy,
            &grad,
            &|_u| {},
            &|_, g| g.iter().fold(0.0f64, |m, v| m.max(v.abs())),
            &|_, _| (0.0, 0.0),
            vec![2.0, -3.0, 1.5],
            &DescentOptions { tol: 1e-10, trace_every: 1, ..Default::default() },
        )
        .unwrap();
        assert!(out.converged);
        for w in out.trace.windows(2) {
            assert!(w[1].energy <= w[0].energy + 1e-12);
        }
    }
}
