//! Minimization engines: set optimization for Massari functionals, field
//! optimization for the perturbed Allen-Cahn energy with Dirichlet exterior
//! data, mass-constrained minimization with Lagrange multiplier extraction,
//! and almost-minimality verification.

pub mod descent;

use crate::domain::{
    measure, symmetric_difference_measure, FarField, Grid, MassConstraint, RegionSpec, ScalarField,
};
use crate::energy::{
    c_ns, kappa_eps, massari_classical, massari_fractional, potential_w, EnergyBreakdown,
    ForcingSpec, PerimeterKind, ScalingRegime,
};
use crate::error::{invalid, Error, Result};
use crate::kernels::{frac_perimeter, KernelParams, NonlocalStencil};
use descent::{projected_bb_descent, DescentOptions, TraceRow};

/// One-parameter families of candidate sets for the Massari set problem.
/// Members must coincide with the prescribed exterior datum outside Omega;
/// the families below guarantee that by construction when the parameter
/// range stays inside Omega's closure.
#[derive(Debug, Clone, PartialEq)]
pub enum SetFamily {
    /// E_t = (t, +inf), t in [lo, hi]
    HalfLineRight { lo: f64, hi: f64 },
    /// E_t = (-inf, t), t in [lo, hi]
    HalfLineLeft { lo: f64, hi: f64 },
    /// E_t = (t, b) with the right endpoint fixed
    IntervalLeft { b: f64, lo: f64, hi: f64 },
    /// E_t = (-t, t), t in [lo, hi], lo > 0
    SymmetricInterval { lo: f64, hi: f64 },
}

impl SetFamily {
    pub fn range(&self) -> (f64, f64) {
        match self {
            SetFamily::HalfLineRight { lo, hi }
            | SetFamily::HalfLineLeft { lo, hi }
            | SetFamily::IntervalLeft { lo, hi, .. }
            | SetFamily::SymmetricInterval { lo, hi } => (*lo, *hi),
        }
    }

    pub fn member(&self, t: f64) -> RegionSpec {
        match self {
            SetFamily::HalfLineRight { .. } => RegionSpec::half_line_right(t),
            SetFamily::HalfLineLeft { .. } => RegionSpec::half_line_left(t),
            SetFamily::IntervalLeft { b, .. } => RegionSpec::interval(t.min(b - 1e-12), *b),
            SetFamily::SymmetricInterval { .. } => RegionSpec::interval(-t, t),
        }
    }
}

/// Result of a parametric set minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct SetMinimizeResult {
    pub param: f64,
    pub set: RegionSpec,
    pub energy: f64,
    pub evaluations: usize,
}

/// Minimizes the Massari functional over a parametric family by a coarse
/// exhaustive scan followed by golden-section refinement. Ties break toward
/// the smaller parameter.
pub fn minimize_massari_set(
    omega: &RegionSpec,
    kind: PerimeterKind,
    forcing_h: f64,
    family: &SetFamily,
    window: &Grid,
) -> Result<SetMinimizeResult> {
    let (lo, hi) = family.range();
    if !(lo < hi) {
        return invalid("empty family parameter range");
    }
    let mut evals = 0usize;
    let mut value = |t: f64| -> Result<f64> {
        evals += 1;
        let e = family.member(t);
        match kind {
            PerimeterKind::Fractional(s) => massari_fractional(&e, omega, s, forcing_h, window),
            PerimeterKind::Classical => massari_classical(&e, omega, forcing_h, window),
        }
    };
    let ncoarse = 101;
    let mut best_i = 0usize;
    let mut best_v = f64::INFINITY;
    let mut vals = Vec::with_capacity(ncoarse);
    for i in 0..ncoarse {
        let t = lo + (hi - lo) * i as f64 / (ncoarse - 1) as f64;
        let v = value(t)?;
        vals.push(v);
        if v < best_v - 1e-14 {
            best_v = v;
            best_i = i;
        }
    }
    let step = (hi - lo) / (ncoarse - 1) as f64;
    let mut a = lo + step * best_i.saturating_sub(1) as f64;
    let mut b = (lo + step * (best_i + 1) as f64).min(hi);
    // golden-section refinement on the bracketing interval
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = value(x1)?;
    let mut f2 = value(x2)?;
    for _ in 0..80 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = value(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = value(x2)?;
        }
        if b - a < 1e-12 {
            break;
        }
    }
    // candidates: refined point and the coarse boundary points (ties toward
    // smaller parameter)
    let tr = 0.5 * (a + b);
    let fr = value(tr)?;
    let (mut t_best, mut v_best) = (tr, fr);
    for (i, v) in vals.iter().enumerate() {
        let t = lo + step * i as f64;
        if *v < v_best - 1e-12 || (*v <= v_best + 1e-12 && t < t_best) {
            t_best = t;
            v_best = *v;
        }
    }
    Ok(SetMinimizeResult { param: t_best, set: family.member(t_best), energy: v_best, evaluations: evals })
}

/// Converged field optimization result.
#[derive(Debug, Clone)]
pub struct FieldMinimizeResult {
    pub field: ScalarField,
    pub iterations: usize,
    pub stationarity_residual: f64,
    pub converged: bool,
    pub energy: EnergyBreakdown,
    pub lambda_eps: Option<f64>,
    pub mu_eps: Option<f64>,
    pub mass_error: f64,
    pub trace: Vec<TraceRow>,
}

/// Solver tolerances shared by the field optimizers.
#[derive(Debug, Clone, Copy)]
pub struct FieldSolveOptions {
    /// stationarity target in Euler-Lagrange units
    pub tol: f64,
    pub max_iter: usize,
    pub trace_every: usize,
}

impl Default for FieldSolveOptions {
    fn default() -> Self {
        FieldSolveOptions { tol: 5e-7, max_iter: 50_000, trace_every: 0 }
    }
}

/// Minimizes E_eps(u, Omega) among fields that coincide with the exterior
/// datum outside Omega, by projected (box-clipped) BB gradient descent on
/// the interior nodes.
pub fn minimize_e_eps_dirichlet(
    omega: &RegionSpec,
    s: f64,
    eps: f64,
    forcing: &ForcingSpec,
    exterior_data: &ScalarField,
    bound_m: f64,
    init: &ScalarField,
    opts: &FieldSolveOptions,
) -> Result<FieldMinimizeResult> {
    let grid = exterior_data.grid.clone();
    if init.grid != grid {
        return invalid("init and exterior data must share a grid");
    }
    if exterior_data.sup_over(&omega.complement()) > bound_m + 1e-12 {
        return invalid("exterior data exceeds the bound M");
    }
    let st = NonlocalStencil::new(&grid, s)?;
    let mask = grid.mask(omega);
    let interior: Vec<usize> = (0..grid.num_nodes()).filter(|&k| mask[k]).collect();
    if interior.is_empty() {
        return invalid("grid does not cover omega");
    }
    let kap = kappa_eps(s, eps)?;
    let cm = grid.cell_measure();
    let eps2s = eps.powf(2.0 * s);
    let far = exterior_data.far;
    let c_f = c_ns(s, grid.dim);
    // fixed forcing density per interior node
    let mut h_eps = vec![0.0; interior.len()];
    for (j, &k) in interior.iter().enumerate() {
        let p = grid.node(k);
        h_eps[j] = forcing.h_eps(&p[..grid.dim], s, eps)?;
    }
    let embed = |x: &[f64]| -> Vec<f64> {
        let mut full = exterior_data.values.clone();
        for (j, &k) in interior.iter().enumerate() {
            full[k] = x[j];
        }
        full
    };
    let energy = |x: &[f64]| -> f64 {
        let full = embed(x);
        let k_en = st.gagliardo(Some(&mask), &full, &far);
        let mut pot = 0.0;
        let mut frc = 0.0;
        for (j, &kk) in interior.iter().enumerate() {
            pot += potential_w(full[kk]).0 * cm;
            frc += h_eps[j] * full[kk] * cm;
        }
        kap * (eps2s * k_en + pot) + c_f * frc
    };
    let grad = |x: &[f64]| -> Vec<f64> {
        let full = embed(x);
        let g_full = st.gagliardo_grad(Some(&mask), &full, &far);
        interior
            .iter()
            .enumerate()
            .map(|(j, &k)| {
                kap * (eps2s * g_full[k] + potential_w(full[k]).1 * cm) + c_f * h_eps[j] * cm
            })
            .collect()
    };
    let project = |x: &mut Vec<f64>| {
        for v in x.iter_mut() {
            *v = v.clamp(-bound_m, bound_m);
        }
    };
    // residual in EL units, projected-gradient form
    let el_scale = kap * cm;
    let residual = move |x: &[f64], g: &[f64]| -> f64 {
        let mut r: f64 = 0.0;
        for (xj, gj) in x.iter().zip(g.iter()) {
            let el = gj / el_scale;
            let moved = (xj - el).clamp(-bound_m, bound_m) - xj;
            r = r.max(moved.abs());
        }
        r
    };
    let x0: Vec<f64> = interior.iter().map(|&k| init.values[k]).collect();
    let diag_full = st.diag_pair_curvature(Some(&mask));
    let precond: Vec<f64> = interior
        .iter()
        .map(|&k| kap * (eps2s * diag_full[k] + 2.0 * cm))
        .collect();
    let dopts = DescentOptions {
        tol: opts.tol,
        max_iter: opts.max_iter,
        trace_every: opts.trace_every,
        precond: Some(precond),
        ..Default::default()
    };
    let out = projected_bb_descent(&energy, &grad, &project, &residual, &|_, _| (0.0, 0.0), x0, &dopts)?;
    let full = embed(&out.u);
    let field = ScalarField::new(grid.clone(), full, far, bound_m)?;
    let bd = crate::energy::total_e_eps(&field, omega, s, eps, forcing, bound_m)?;
    Ok(FieldMinimizeResult {
        field,
        iterations: out.iterations,
        stationarity_residual: out.residual,
        converged: out.converged,
        energy: bd,
        lambda_eps: None,
        mu_eps: None,
        mass_error: 0.0,
        trace: out.trace,
    })
}

/// Joint clip + mass-shift projection onto the convex feasible set
/// { |u| <= M } ∩ { cell-sum mass over Omega = m }; alternates to a joint
/// fixed point (both sets convex).
pub fn project_mass_box(u: &mut [f64], omega_cells: &[usize], m: f64, bound_m: f64, cm: f64) {
    let n_omega = omega_cells.len() as f64;
    for _ in 0..100 {
        let mut clip_moved = 0.0f64;
        for v in u.iter_mut() {
            let c = v.clamp(-bound_m, bound_m);
            clip_moved = clip_moved.max((c - *v).abs());
            *v = c;
        }
        let mass: f64 = omega_cells.iter().map(|&k| u[k] * cm).sum();
        let c = (m - mass) / (n_omega * cm);
        for &k in omega_cells {
            u[k] += c;
        }
        if clip_moved < 1e-15 && c.abs() < 1e-15 {
            break;
        }
    }
}

/// Mass-constrained minimization of F_eps over the whole box (interior and
/// exterior nodes are unknowns; no Dirichlet data is prescribed). Far-field
/// beyond the box is the self-consistent constant m/|Omega|.
pub fn minimize_f_eps_mass(
    omega: &RegionSpec,
    s: f64,
    eps: f64,
    constraint: &MassConstraint,
    bound_m: f64,
    grid: &Grid,
    init: &ScalarField,
    opts: &FieldSolveOptions,
) -> Result<FieldMinimizeResult> {
    let st = NonlocalStencil::new(grid, s)?;
    minimize_f_eps_mass_with(&st, omega, s, eps, constraint, bound_m, grid, init, opts)
}

/// Same, reusing a prebuilt stencil (sweeps share it).
#[allow(clippy::too_many_arguments)]
pub fn minimize_f_eps_mass_with(
    st: &NonlocalStencil,
    omega: &RegionSpec,
    s: f64,
    eps: f64,
    constraint: &MassConstraint,
    bound_m: f64,
    grid: &Grid,
    init: &ScalarField,
    opts: &FieldSolveOptions,
) -> Result<FieldMinimizeResult> {
    let omega_measure = measure(omega, Some(grid))?;
    if constraint.m.abs() >= omega_measure {
        return invalid(format!(
            "|m| = {} must be strictly below |Omega| = {omega_measure}",
            constraint.m.abs()
        ));
    }
    let mask = grid.mask(omega);
    let omega_cells: Vec<usize> = (0..grid.num_nodes()).filter(|&k| mask[k]).collect();
    let cm = grid.cell_measure();
    let kap = kappa_eps(s, eps)?;
    let eps2s = eps.powf(2.0 * s);
    let far = FarField::constant(grid.dim, constraint.m / omega_measure);
    let m = constraint.m;
    let energy = |u: &[f64]| -> f64 {
        let k_en = st.gagliardo(Some(&mask), u, &far);
        let pot: f64 = omega_cells.iter().map(|&k| potential_w(u[k]).0 * cm).sum();
        kap * (eps2s * k_en + pot)
    };
    let grad = |u: &[f64]| -> Vec<f64> {
        let mut g = st.gagliardo_grad(Some(&mask), u, &far);
        for gk in g.iter_mut() {
            *gk *= kap * eps2s;
        }
        for &k in &omega_cells {
            g[k] += kap * potential_w(u[k]).1 * cm;
        }
        g
    };
    let project = |u: &mut Vec<f64>| {
        project_mass_box(u, &omega_cells, m, bound_m, cm);
    };
    // degrees against Omega drive the exterior (Neumann) residual scale
    let mv: Vec<f64> = mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    let deg_m = st.pair_conv(&mv);
    let el_scale = kap * cm;
    let mask_ref = &mask;
    let deg_ref = &deg_m;
    let residual = move |_u: &[f64], g: &[f64]| -> f64 {
        // interior: sup |el_i - mean(el)|; exterior: Neumann fixed-point gap
        let mut sum = 0.0;
        let mut cnt = 0usize;
        for (k, gi) in g.iter().enumerate() {
            if mask_ref[k] {
                sum += gi / el_scale;
                cnt += 1;
            }
        }
        let mean = sum / cnt as f64;
        let mut r: f64 = 0.0;
        for (k, gi) in g.iter().enumerate() {
            if mask_ref[k] {
                r = r.max((gi / el_scale - mean).abs());
            } else {
                let neu = gi / (kap * eps2s * 2.0 * deg_ref[k]);
                r = r.max(neu.abs());
            }
        }
        r
    };
    let diag = move |u: &[f64], g: &[f64]| -> (f64, f64) {
        let mass: f64 = u
            .iter()
            .zip(mask_ref.iter())
            .filter(|(_, &b)| b)
            .map(|(v, _)| v * cm)
            .sum();
        let mut sum = 0.0;
        let mut cnt = 0usize;
        for (k, gi) in g.iter().enumerate() {
            if mask_ref[k] {
                sum += gi / el_scale;
                cnt += 1;
            }
        }
        (mass - m, -(sum / cnt as f64) / kap)
    };
    // diagonal curvature: evens out the stiff interior against the soft
    // far-exterior unknowns
    let precond: Vec<f64> = st
        .diag_pair_curvature(Some(&mask))
        .into_iter()
        .enumerate()
        .map(|(k, d)| kap * eps2s * d + if mask[k] { kap * 2.0 * cm } else { 0.0 })
        .collect();
    let dopts = DescentOptions {
        tol: opts.tol,
        max_iter: opts.max_iter,
        trace_every: opts.trace_every,
        precond: Some(precond),
        ..Default::default()
    };
    let out = projected_bb_descent(&energy, &grad, &project, &residual, &diag, init.values.clone(), &dopts)?;
    let field = ScalarField::new(grid.clone(), out.u, far, bound_m)?;
    let (lambda, mu) = extract_multiplier_with(st, &field, omega, s, eps)?;
    let bd = crate::energy::allen_cahn_f_eps(&field, omega, s, eps, bound_m)?;
    let mass_err = field.integral_over(omega) - m;
    Ok(FieldMinimizeResult {
        field,
        iterations: out.iterations,
        stationarity_residual: out.residual,
        converged: out.converged,
        energy: bd,
        lambda_eps: Some(lambda),
        mu_eps: Some(mu),
        mass_error: mass_err,
        trace: out.trace,
    })
}

/// The three canonical initializations of the nonconvex mass problem.
pub fn canonical_inits(
    grid: &Grid,
    omega: &RegionSpec,
    m: f64,
    bound_m: f64,
) -> Result<Vec<(String, ScalarField)>> {
    let omega_measure = measure(omega, Some(grid))?;
    let far = FarField::constant(grid.dim, m / omega_measure);
    let minus = ScalarField::new(grid.clone(), vec![-1.0; grid.num_nodes()], far, bound_m)?;
    let plus = ScalarField::new(grid.clone(), vec![1.0; grid.num_nodes()], far, bound_m)?;
    // signed indicator matching the mass: right-aligned slab inside Omega
    let e = indicator_set_with_mass(omega, m)?;
    let mask = grid.mask(omega);
    let vals: Vec<f64> = (0..grid.num_nodes())
        .map(|k| {
            if mask[k] {
                let p = grid.node(k);
                if e.contains(&p[..grid.dim]) {
                    1.0
                } else {
                    -1.0
                }
            } else {
                m / omega_measure
            }
        })
        .collect();
    let ind = ScalarField::new(grid.clone(), vals, far, bound_m)?;
    Ok(vec![
        ("minus_one".into(), minus),
        ("plus_one".into(), plus),
        ("indicator".into(), ind),
    ])
}

/// A signed-indicator set E with |Omega ∩ E| = (m + |Omega|)/2 (1D: a
/// right-aligned subinterval; 2D: a right slab of the bounding box).
pub fn indicator_set_with_mass(omega: &RegionSpec, m: f64) -> Result<RegionSpec> {
    let (lo, hi) = omega
        .bounding_box()
        .ok_or_else(|| Error::Invalid("omega must be bounded".into()))?;
    if omega.dim() == 1 {
        let len = hi[0] - lo[0];
        let target = 0.5 * (m + len);
        Ok(RegionSpec::half_line_right(hi[0] - target))
    } else {
        let area = measure(omega, None)?;
        let width = hi[0] - lo[0];
        let target = 0.5 * (m + area);
        // slab fraction assuming omega is close to its bounding box
        let frac = (target / area).clamp(0.0, 1.0);
        Ok(RegionSpec::half_plane([-1.0, 0.0], -(hi[0] - frac * width)))
    }
}

/// Multi-start wrapper: runs the three canonical initializations and keeps
/// the lowest-energy converged run (best-found, not certified global).
pub fn minimize_f_eps_mass_multistart(
    omega: &RegionSpec,
    s: f64,
    eps: f64,
    constraint: &MassConstraint,
    bound_m: f64,
    grid: &Grid,
    opts: &FieldSolveOptions,
) -> Result<FieldMinimizeResult> {
    let st = NonlocalStencil::new(grid, s)?;
    let mut best: Option<FieldMinimizeResult> = None;
    for (_name, init) in canonical_inits(grid, omega, constraint.m, bound_m)? {
        let run = minimize_f_eps_mass_with(&st, omega, s, eps, constraint, bound_m, grid, &init, opts);
        if let Ok(r) = run {
            // prefer converged runs; among equals keep the lowest energy
            let replace = match &best {
                None => true,
                Some(b) => {
                    (r.converged && !b.converged)
                        || (r.converged == b.converged && r.energy.total < b.energy.total)
                }
            };
            if replace {
                best = Some(r);
            }
        }
    }
    best.ok_or_else(|| Error::NoConvergence("every initialization failed".into()))
}

/// Lagrange multiplier extraction from a stationary mass-constrained field:
/// lambda = -mean over Omega of (eps^{2s} (-Delta)^s u + W'(u)); mu = kappa lambda.
pub fn extract_multiplier(
    u: &ScalarField,
    omega: &RegionSpec,
    s: f64,
    eps: f64,
) -> Result<(f64, f64)> {
    let st = NonlocalStencil::new(&u.grid, s)?;
    extract_multiplier_with(&st, u, omega, s, eps)
}

pub fn extract_multiplier_with(
    st: &NonlocalStencil,
    u: &ScalarField,
    omega: &RegionSpec,
    s: f64,
    eps: f64,
) -> Result<(f64, f64)> {
    if u.sup_over(omega) >= u.bound_m - 1e-9 {
        return invalid("box constraints active in Omega: multiplier identity invalid");
    }
    let mask = u.grid.mask(omega);
    let fl = st.frac_laplacian(u);
    let eps2s = eps.powf(2.0 * s);
    let mut sum = 0.0;
    let mut cnt = 0usize;
    for k in 0..u.grid.num_nodes() {
        if mask[k] {
            sum += eps2s * fl[k] + potential_w(u.values[k]).1;
            cnt += 1;
        }
    }
    let lambda = -sum / cnt as f64;
    Ok((lambda, kappa_eps(s, eps)? * lambda))
}

/// Pointwise Euler-Lagrange residual of the mass-constrained problem over
/// interior nodes: eps^{2s} (-Delta)^s u + W'(u) + lambda.
pub fn euler_lagrange_residual(
    u: &ScalarField,
    omega: &RegionSpec,
    s: f64,
    eps: f64,
    lambda: f64,
) -> Result<f64> {
    let st = NonlocalStencil::new(&u.grid, s)?;
    let fl = st.frac_laplacian(u);
    let mask = u.grid.mask(omega);
    let eps2s = eps.powf(2.0 * s);
    let mut r: f64 = 0.0;
    for k in 0..u.grid.num_nodes() {
        if mask[k] {
            r = r.max((eps2s * fl[k] + potential_w(u.values[k]).1 + lambda).abs());
        }
    }
    Ok(r)
}

/// One competitor row of a Lambda-minimality check.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaMinimalityRow {
    pub per_e: f64,
    pub per_f: f64,
    pub sym_diff: f64,
    /// Per_s(F) + Lambda |EΔF| - Per_s(E); negative means violation
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaMinimalityReport {
    pub rows: Vec<LambdaMinimalityRow>,
    pub violations: usize,
    pub worst_margin: f64,
}

/// Checks Per_s(E,Ω) <= Per_s(F,Ω) + Lambda |EΔF| against each competitor.
pub fn check_lambda_minimality(
    e: &RegionSpec,
    omega: &RegionSpec,
    s: f64,
    lambda: f64,
    competitors: &[RegionSpec],
    window: &Grid,
    tol: f64,
) -> Result<LambdaMinimalityReport> {
    let params = KernelParams::new(s, omega.dim())?;
    let per_e = frac_perimeter(e, omega, &params, window)?;
    let mut rows = Vec::with_capacity(competitors.len());
    let mut violations = 0usize;
    let mut worst = f64::INFINITY;
    for f in competitors {
        let sym = symmetric_difference_measure(e, f)?;
        // the competitor must differ only inside Omega
        let diff_outside = {
            let ie = e.as_intervals()?;
            let iff = f.as_intervals()?;
            let oc = omega.complement().as_intervals()?;
            let eo = crate::domain::intersect_intervals(&ie, &oc);
            let fo = crate::domain::intersect_intervals(&iff, &oc);
            let eof = RegionSpec { body: crate::domain::Body::Intervals(eo), complement: false };
            let foo = RegionSpec { body: crate::domain::Body::Intervals(fo), complement: false };
            symmetric_difference_measure(&eof, &foo)?
        };
        if diff_outside > 1e-12 {
            return invalid(format!("competitor differs outside Omega on measure {diff_outside}"));
        }
        let per_f = frac_perimeter(f, omega, &params, window)?;
        let margin = per_f + lambda * sym - per_e;
        if margin < -tol {
            violations += 1;
        }
        worst = worst.min(margin);
        rows.push(LambdaMinimalityRow { per_e, per_f, sym_diff: sym, margin });
    }
    Ok(LambdaMinimalityReport { rows, violations, worst_margin: worst })
}

/// Regime tag re-export for result consumers.
pub fn regime_of(s: f64) -> ScalingRegime {
    ScalingRegime::of(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::build_grid;
    use approx::assert_relative_eq;

    fn window() -> Grid {
        build_grid(&RegionSpec::interval(-1.0, 1.0), 0.02, 4.0).unwrap()
    }

    #[test]
    fn classical_massari_prefers_full_set_under_negative_forcing() {
        let omega = RegionSpec::interval(-1.0, 1.0);
        let w = window();
        let fam = SetFamily::HalfLineRight { lo: -1.0, hi: 0.999 };
        let r = minimize_massari_set(&omega, PerimeterKind::Classical, -0.75, &fam, &w).unwrap();
        assert_relative_eq!(r.param, -1.0, epsilon = 1e-9);
        assert_relative_eq!(r.energy, -1.5, epsilon = 1e-9);
    }

    #[test]
    fn classical_massari_expels_interface_without_forcing() {
        let omega = RegionSpec::interval(-1.0, 1.0);
        let w = window();
        let fam = SetFamily::HalfLineRight { lo: -1.0, hi: 0.999 };
        let r = minimize_massari_set(&omega, PerimeterKind::Classical, 0.0, &fam, &w).unwrap();
        // zero perimeter in Omega: boundary pushed to the edge
        assert_relative_eq!(r.energy, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn fractional_halfline_objective_is_flat_in_t() {
        // Per_s((t,inf),(-1,1)) is constant in t by the closed-form identity;
        // the scan must confirm flatness rather than select an interior point
        let omega = RegionSpec::interval(-1.0, 1.0);
        let w = window();
        let s = 0.25;
        let mut vals = Vec::new();
        for t in [-0.9, -0.3, 0.0, 0.4, 0.9] {
            let e = RegionSpec::half_line_right(t);
            vals.push(massari_fractional(&e, &omega, s, 0.0, &w).unwrap());
        }
        let g2 = crate::kernels::g_antideriv(2.0, s);
        for v in &vals {
            assert_relative_eq!(*v, g2, max_relative = 1e-12);
        }
    }

    #[test]
    fn mass_projection_is_idempotent() {
        let omega = RegionSpec::interval(-1.0, 1.0);
        let g = window();
        let mask = g.mask(&omega);
        let cells: Vec<usize> = (0..g.num_nodes()).filter(|&k| mask[k]).collect();
        let mut u: Vec<f64> = (0..g.num_nodes()).map(|k| (k as f64 * 0.01).sin() * 3.0).collect();
        project_mass_box(&mut u, &cells, 0.3, 2.0, g.cell_measure());
        let snapshot = u.clone();
        project_mass_box(&mut u, &cells, 0.3, 2.0, g.cell_measure());
        let max_move = u
            .iter()
            .zip(snapshot.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(max_move <= 1e-14, "projection moved {max_move}");
        let mass: f64 = cells.iter().map(|&k| u[k] * g.cell_measure()).sum();
        assert_relative_eq!(mass, 0.3, epsilon = 1e-12);
    }

    #[test]
    fn dirichlet_plus_one_is_a_fixed_point() {
        let omega = RegionSpec::interval(-1.0, 1.0);
        let g = window();
        let ext = ScalarField::constant(&g, 1.0, 2.0);
        let r = minimize_e_eps_dirichlet(
            &omega,
            0.25,
            0.1,
            &ForcingSpec::none(),
            &ext,
            2.0,
            &ext,
            &FieldSolveOptions::default(),
        )
        .unwrap();
        assert!(r.iterations == 0, "took {} iterations", r.iterations);
        assert!(r.energy.total.abs() < 1e-12);
    }

    #[test]
    fn lambda_minimality_identity_competitor() {
        let omega = RegionSpec::interval(-1.0, 1.0);
        let w = window();
        let e = RegionSpec::interval(-0.25, 0.25);
        let rep =
            check_lambda_minimality(&e, &omega, 0.25, 0.0, &[e.clone()], &w, 1e-10).unwrap();
        assert_eq!(rep.violations, 0);
        assert!(rep.rows[0].margin.abs() < 1e-12);
    }

    #[test]
    fn lambda_minimality_detects_displaced_interface() {
        // E k= half line displaced from the perimeter minimizer of the
        // asymmetric window; with Lambda = 0 some competitor must win
        let omega = RegionSpec::interval(-1.0, 1.0);
        let w = window();
        let e = RegionSpec::intervals(vec![(-0.3, 0.0), (0.3, 0.9)]).unwrap();
        // competitor: heal the middle gap (differs only inside Omega)
        let f = RegionSpec::intervals(vec![(-0.3, 0.9)]).unwrap();
        let rep = check_lambda_minimality(&e, &omega, 0.25, 0.0, &[f], &w, 1e-10).unwrap();
        assert_eq!(rep.violations, 1);
        assert!(rep.worst_margin < 0.0);
    }

    #[test]
    fn competitor_outside_omega_rejected() {
        let omega = RegionSpec::interval(-1.0, 1.0);
        let w = window();
        let e = RegionSpec::interval(-0.25, 0.25);
        let f = RegionSpec::interval(-0.25, 1.5);
        assert!(check_lambda_minimality(&e, &omega, 0.25, 0.0, &[f], &w, 1e-10).is_err());
    }
}
