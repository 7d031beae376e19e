//! First variation of the Gagliardo energy along flows of compactly
//! supported vector fields: the nonlocal hybrid mean curvature of a couple
//! (set inside Omega, function outside) and its constancy diagnostic.
//!
//! phi_t(u) is interpreted as the pushforward u o phi_{-t}: the field is
//! transported with the flow, so flows supported away from the jump set of
//! u leave the energy unchanged to first order.

use crate::domain::{signed_distance_point, Grid, RegionSpec, ScalarField};
use crate::error::{invalid, Result};
use crate::kernels::NonlocalStencil;

/// One smooth compactly supported bump: X(x) = amp * dir * psi(|x-c|/rho)
/// with psi(q) = (1-q^2)^2 on [0,1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: [f64; 2],
    pub radius: f64,
    pub amplitude: f64,
    pub direction: [f64; 2],
}

fn psi(q2: f64) -> f64 {
    // psi as a function of q^2 keeps everything smooth at the origin
    let w = 1.0 - q2;
    if w > 0.0 {
        w * w
    } else {
        0.0
    }
}

fn dpsi_dq2(q2: f64) -> f64 {
    let w = 1.0 - q2;
    if w > 0.0 {
        -2.0 * w
    } else {
        0.0
    }
}

impl Bump {
    fn eval(&self, x: &[f64], dim: usize, out: &mut [f64; 2]) {
        let mut r2 = 0.0;
        for a in 0..dim {
            r2 += (x[a] - self.center[a]) * (x[a] - self.center[a]);
        }
        let v = self.amplitude * psi(r2 / (self.radius * self.radius));
        for a in 0..dim {
            out[a] += v * self.direction[a];
        }
    }

    fn divergence(&self, x: &[f64], dim: usize) -> f64 {
        let rho2 = self.radius * self.radius;
        let mut r2 = 0.0;
        let mut proj = 0.0;
        for a in 0..dim {
            let d = x[a] - self.center[a];
            r2 += d * d;
            proj += self.direction[a] * d;
        }
        // div X = amp * psi'(q2) * 2 (dir . (x-c)) / rho^2
        self.amplitude * dpsi_dq2(r2 / rho2) * 2.0 * proj / rho2
    }

    /// Lipschitz bound of the bump (sup |grad X|).
    fn lipschitz(&self, dim: usize) -> f64 {
        let dirn: f64 = self.direction[..dim].iter().map(|d| d * d).sum::<f64>().sqrt();
        // sup |psi'(q) / rho| over the profile; max of 4q(1-q^2) is at
        // q = 1/sqrt(3)
        let max_dpsi = 8.0 / (3.0 * 3f64.sqrt());
        self.amplitude.abs() * dirn * max_dpsi / self.radius
    }
}

/// Compactly supported C^1 vector field: a superposition of bumps, with
/// closed-form divergence. Superpositions keep the first-variation linear
/// structure testable.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFieldSpec {
    pub bumps: Vec<Bump>,
}

impl VectorFieldSpec {
    pub fn bump_1d(center: f64, radius: f64, amplitude: f64) -> Self {
        VectorFieldSpec {
            bumps: vec![Bump {
                center: [center, 0.0],
                radius,
                amplitude,
                direction: [1.0, 0.0],
            }],
        }
    }

    pub fn superpose(a: &VectorFieldSpec, alpha: f64, b: &VectorFieldSpec, beta: f64) -> Self {
        let mut bumps = Vec::with_capacity(a.bumps.len() + b.bumps.len());
        for bp in &a.bumps {
            bumps.push(Bump { amplitude: alpha * bp.amplitude, ..*bp });
        }
        for bp in &b.bumps {
            bumps.push(Bump { amplitude: beta * bp.amplitude, ..*bp });
        }
        VectorFieldSpec { bumps }
    }

    pub fn eval(&self, x: &[f64], dim: usize) -> [f64; 2] {
        let mut out = [0.0; 2];
        for b in &self.bumps {
            b.eval(x, dim, &mut out);
        }
        out
    }

    pub fn divergence(&self, x: &[f64], dim: usize) -> f64 {
        self.bumps.iter().map(|b| b.divergence(x, dim)).sum()
    }

    pub fn lipschitz(&self, dim: usize) -> f64 {
        self.bumps.iter().map(|b| b.lipschitz(dim)).sum()
    }

    /// Checks that every bump support stays strictly inside Omega.
    pub fn supported_in(&self, omega: &RegionSpec) -> bool {
        self.bumps.iter().all(|b| {
            let d = signed_distance_point(omega, &b.center[..omega.dim()]);
            d > b.radius
        })
    }
}

/// Transports the field along the flow of X for time t: returns u o phi_{-t}
/// sampled at grid nodes (pushforward). Nodes outside the support of X are
/// untouched bitwise, and (X, t) -> (-X, -t) is an exact symmetry of the
/// integrator.
pub fn flow_pushforward(u: &ScalarField, x_field: &VectorFieldSpec, t: f64) -> Result<ScalarField> {
    let grid = &u.grid;
    let dim = grid.dim;
    let lip = x_field.lipschitz(dim);
    if t.abs() * lip >= 0.5 {
        return invalid(format!(
            "flow time too large: |t| Lip(X) = {} >= 0.5",
            t.abs() * lip
        ));
    }
    let nsub = 8usize;
    let dt = -t / nsub as f64;
    let mut vals = u.values.clone();
    for k in 0..grid.num_nodes() {
        let p = grid.node(k);
        let x0 = x_field.eval(&p[..dim], dim);
        if x0[0] == 0.0 && x0[1] == 0.0 {
            continue; // outside the flow support
        }
        // RK4 backward trace
        let mut y = p;
        for _ in 0..nsub {
            let k1 = x_field.eval(&y[..dim], dim);
            let y2 = [y[0] + 0.5 * dt * k1[0], y[1] + 0.5 * dt * k1[1]];
            let k2 = x_field.eval(&y2[..dim], dim);
            let y3 = [y[0] + 0.5 * dt * k2[0], y[1] + 0.5 * dt * k2[1]];
            let k3 = x_field.eval(&y3[..dim], dim);
            let y4 = [y[0] + dt * k3[0], y[1] + dt * k3[1]];
            let k4 = x_field.eval(&y4[..dim], dim);
            y[0] += dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
            if dim == 2 {
                y[1] += dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
            }
        }
        vals[k] = interpolate(u, &y);
    }
    ScalarField::new(grid.clone(), vals, u.far, u.bound_m)
}

/// Linear (1D) / bilinear (2D) interpolation of nodal values, clamped to
/// the outermost cell centers.
fn interpolate(u: &ScalarField, p: &[f64; 2]) -> f64 {
    let g = &u.grid;
    let f = |axis: usize| -> (usize, f64) {
        let x = (p[axis] - g.lo[axis]) / g.h - 0.5;
        let xc = x.clamp(0.0, (g.n[axis] - 1) as f64);
        let i = (xc.floor() as usize).min(g.n[axis] - 2);
        (i, xc - i as f64)
    };
    if g.dim == 1 {
        let (i, fr) = f(0);
        u.values[i] * (1.0 - fr) + u.values[i + 1] * fr
    } else {
        let (i, fx) = f(0);
        let (j, fy) = f(1);
        let v00 = u.values[g.index(i, j)];
        let v10 = u.values[g.index(i + 1, j)];
        let v01 = u.values[g.index(i, j + 1)];
        let v11 = u.values[g.index(i + 1, j + 1)];
        v00 * (1.0 - fx) * (1.0 - fy)
            + v10 * fx * (1.0 - fy)
            + v01 * (1.0 - fx) * fy
            + v11 * fx * fy
    }
}

/// Forward flow map of a single point under X for time t (RK4, fixed
/// substeps, shared with the pushforward so symmetries match bitwise).
fn flow_point(x_field: &VectorFieldSpec, p: [f64; 2], dim: usize, t: f64) -> [f64; 2] {
    let nsub = 8usize;
    let dt = t / nsub as f64;
    let mut y = p;
    for _ in 0..nsub {
        let k1 = x_field.eval(&y[..dim], dim);
        let y2 = [y[0] + 0.5 * dt * k1[0], y[1] + 0.5 * dt * k1[1]];
        let k2 = x_field.eval(&y2[..dim], dim);
        let y3 = [y[0] + 0.5 * dt * k2[0], y[1] + 0.5 * dt * k2[1]];
        let k3 = x_field.eval(&y3[..dim], dim);
        let y4 = [y[0] + dt * k3[0], y[1] + dt * k3[1]];
        let k4 = x_field.eval(&y4[..dim], dim);
        y[0] += dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        if dim == 2 {
            y[1] += dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        }
    }
    y
}

/// 1D signed-indicator couple: interface points (cell edges between sign
/// flips inside Omega) plus the sign of the leftmost Omega cell. None when
/// the field is not a signed indicator in Omega.
fn couple_interfaces_1d(u: &ScalarField, mask: &[bool]) -> Option<(Vec<f64>, f64)> {
    if u.grid.dim != 1 {
        return None;
    }
    let g = &u.grid;
    let mut interfaces = Vec::new();
    let mut first_sign = None;
    let mut prev: Option<(usize, f64)> = None;
    for k in 0..g.num_nodes() {
        if !mask[k] {
            continue;
        }
        let v = u.values[k];
        if (v.abs() - 1.0).abs() > 1e-9 {
            return None;
        }
        if first_sign.is_none() {
            first_sign = Some(v);
        }
        if let Some((pk, pv)) = prev {
            if pv * v < 0.0 && k == pk + 1 {
                interfaces.push(g.lo[0] + k as f64 * g.h);
            }
        }
        prev = Some((k, v));
    }
    first_sign.map(|s0| (interfaces, s0))
}

/// Exact K of a transported 1D couple: the interior signed indicator is
/// carried parametrically (interval closed forms, smooth in the transported
/// endpoints), the exterior stays gridded.
fn k_of_transported_couple_1d(
    u: &ScalarField,
    omega: &RegionSpec,
    s: f64,
    x_field: &VectorFieldSpec,
    t: f64,
    interfaces: &[f64],
    first_sign: f64,
    mask: &[bool],
) -> Result<f64> {
    use crate::domain::Interval;
    use crate::kernels::interval_pair;
    let g = &u.grid;
    let io = omega.as_intervals()?;
    if io.len() != 1 {
        return invalid("parametric couple path needs an interval Omega");
    }
    let (olo, ohi) = (io[0].lo, io[0].hi);
    // transported interface points
    let mut pts: Vec<f64> = interfaces
        .iter()
        .map(|&a| flow_point(x_field, [a, 0.0], 1, t)[0])
        .collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // alternate signs starting from the leftmost cell's sign
    let mut plus: Vec<Interval> = Vec::new();
    let mut minus: Vec<Interval> = Vec::new();
    let mut sign = first_sign;
    let mut lo = olo;
    for &p in pts.iter().chain(std::iter::once(&ohi)) {
        let iv = Interval::new(lo, p);
        if iv.len() > 0.0 {
            if sign > 0.0 {
                plus.push(iv);
            } else {
                minus.push(iv);
            }
        }
        sign = -sign;
        lo = p;
    }
    // interior-interior: |u(x)-u(y)|^2 = 4 on opposite phases
    let mut k_total = 0.0;
    for a in &plus {
        for b in &minus {
            k_total += 4.0 * interval_pair(a.lo, a.hi, b.lo, b.hi, s);
        }
    }
    // interior against gridded exterior cells
    let h = g.h;
    for kk in 0..g.num_nodes() {
        if mask[kk] {
            continue;
        }
        let ca = g.lo[0] + kk as f64 * h;
        let gval = u.values[kk];
        let wp = (1.0 - gval) * (1.0 - gval);
        let wm = (1.0 + gval) * (1.0 + gval);
        if wp > 0.0 {
            for a in &plus {
                k_total += wp * interval_pair(a.lo, a.hi, ca, ca + h, s);
            }
        }
        if wm > 0.0 {
            for b in &minus {
                k_total += wm * interval_pair(b.lo, b.hi, ca, ca + h, s);
            }
        }
    }
    // beyond-box tails against the declared far field
    let crate::domain::FarField::OneD { left, right } = u.far else {
        return invalid("1D couple needs a 1D far field");
    };
    for (far, lo_side) in [(left, true), (right, false)] {
        let wp = (1.0 - far) * (1.0 - far);
        let wm = (1.0 + far) * (1.0 + far);
        let pair = |iv: &Interval| -> (f64, f64) {
            if lo_side {
                (
                    interval_pair(f64::NEG_INFINITY, g.lo[0], iv.lo, iv.hi, s),
                    0.0,
                )
            } else {
                (
                    interval_pair(iv.lo, iv.hi, g.hi[0], f64::INFINITY, s),
                    0.0,
                )
            }
        };
        for a in &plus {
            k_total += wp * pair(a).0;
        }
        for b in &minus {
            k_total += wm * pair(b).0;
        }
    }
    Ok(k_total)
}

/// Nonlocal hybrid mean curvature paired with X: the derivative at t = 0 of
/// K(phi_t(u), Omega), estimated by two-level central differences with
/// Richardson extrapolation. Returns (value, error estimate).
///
/// For 1D signed-indicator couples the transported energy is evaluated in
/// closed form in the transported interface points (the pushforward of a
/// signed indicator is exactly the indicator of the transported set), which
/// removes the sub-cell quantization noise of nodal resampling.
pub fn hybrid_mean_curvature(
    u: &ScalarField,
    omega: &RegionSpec,
    s: f64,
    x_field: &VectorFieldSpec,
) -> Result<(f64, f64)> {
    let st = NonlocalStencil::new(&u.grid, s)?;
    hybrid_mean_curvature_with(&st, u, omega, s, x_field)
}

pub fn hybrid_mean_curvature_with(
    st: &NonlocalStencil,
    u: &ScalarField,
    omega: &RegionSpec,
    s: f64,
    x_field: &VectorFieldSpec,
) -> Result<(f64, f64)> {
    if !(s > 0.0 && s < 0.5) {
        return invalid("hybrid mean curvature is defined for s in (0, 1/2)");
    }
    if !x_field.supported_in(omega) {
        return invalid("vector field support must be strictly inside Omega");
    }
    let (t2, t1) = (1e-2, 5e-3);
    if u.grid.h > t1 / 4.0 {
        return invalid(format!(
            "interface under-resolved for the difference levels: h = {} > {}",
            u.grid.h,
            t1 / 4.0
        ));
    }
    let mask = u.grid.mask(omega);
    let parametric = couple_interfaces_1d(u, &mask)
        .filter(|_| matches!(omega.body, crate::domain::Body::Intervals(ref v) if v.len() == 1));
    let keval = |t: f64| -> Result<f64> {
        if let Some((ifs, s0)) = &parametric {
            k_of_transported_couple_1d(u, omega, s, x_field, t, ifs, *s0, &mask)
        } else {
            let pushed = flow_pushforward(u, x_field, t)?;
            Ok(st.gagliardo(Some(&mask), &pushed.values, &pushed.far))
        }
    };
    let d2 = (keval(t2)? - keval(-t2)?) / (2.0 * t2);
    let d1 = (keval(t1)? - keval(-t1)?) / (2.0 * t1);
    let richardson = (4.0 * d1 - d2) / 3.0;
    Ok((richardson, (richardson - d1).abs()))
}

/// Per-field row of the constancy diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureRatio {
    pub delta_k: f64,
    pub delta_k_error: f64,
    pub denominator: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstancyReport {
    pub ratios: Vec<CurvatureRatio>,
    /// indices of fields excluded for near-zero denominators
    pub excluded: Vec<usize>,
    pub mean_ratio: f64,
    /// (max - min) / |mean| over the included ratios
    pub relative_spread: f64,
    pub constant_within_tolerance: bool,
    /// set when no usable ratio remains (all numerators ~ 0 or excluded)
    pub degenerate: bool,
}

/// The constancy tolerance of the diagnostic verdict.
pub const CONSTANCY_TOLERANCE: f64 = 0.10;

/// Evaluates delta K / int_{E cap Omega} div X across a field library and
/// reports whether the ratios agree within tolerance. The field must equal
/// a signed indicator inside Omega.
pub fn constancy_diagnostic(
    u: &ScalarField,
    omega: &RegionSpec,
    s: f64,
    fields: &[VectorFieldSpec],
) -> Result<ConstancyReport> {
    let st = NonlocalStencil::new(&u.grid, s)?;
    let mask = u.grid.mask(omega);
    // verify the signed-indicator premise inside Omega
    for k in 0..u.grid.num_nodes() {
        if mask[k] && (u.values[k].abs() - 1.0).abs() > 1e-9 {
            return invalid("field must equal a signed indicator inside Omega");
        }
    }
    let mut ratios = Vec::new();
    let mut excluded = Vec::new();
    let mut included = Vec::new();
    for (i, xf) in fields.iter().enumerate() {
        let (dk, dk_err) = hybrid_mean_curvature_with(&st, u, omega, s, xf)?;
        let den = divergence_integral_over_positive_phase(u, omega, xf);
        if den.abs() < 1e-8 {
            excluded.push(i);
            ratios.push(CurvatureRatio { delta_k: dk, delta_k_error: dk_err, denominator: den, ratio: f64::NAN });
            continue;
        }
        let r = dk / den;
        ratios.push(CurvatureRatio { delta_k: dk, delta_k_error: dk_err, denominator: den, ratio: r });
        included.push(r);
    }
    if included.is_empty() {
        return Ok(ConstancyReport {
            ratios,
            excluded,
            mean_ratio: 0.0,
            relative_spread: f64::NAN,
            constant_within_tolerance: false,
            degenerate: true,
        });
    }
    let mean = included.iter().sum::<f64>() / included.len() as f64;
    let lo = included.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = included.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    // near-zero means (symmetric configurations) are degenerate rather than
    // failed: spread has no scale to compare against
    let numerators_vanish = ratios
        .iter()
        .all(|r| r.delta_k.abs() <= 10.0 * r.delta_k_error.max(1e-12));
    let spread = (hi - lo) / mean.abs().max(1e-300);
    Ok(ConstancyReport {
        ratios,
        excluded,
        mean_ratio: mean,
        relative_spread: spread,
        constant_within_tolerance: spread <= CONSTANCY_TOLERANCE,
        degenerate: numerators_vanish,
    })
}

/// int over {u > 0} cap Omega of div X. 1D uses the exact antiderivative
/// (X itself) evaluated at the sign-change edges; 2D uses the closed-form
/// divergence summed over cells.
pub fn divergence_integral_over_positive_phase(
    u: &ScalarField,
    omega: &RegionSpec,
    x_field: &VectorFieldSpec,
) -> f64 {
    let g = &u.grid;
    let mask = g.mask(omega);
    if g.dim == 1 {
        // walk cells of Omega; accumulate X(right edge) - X(left edge) over
        // maximal positive runs (edges between cells of opposite sign)
        let mut total = 0.0;
        let mut in_pos = false;
        let mut entry = 0.0;
        for k in 0..g.num_nodes() {
            let inside = mask[k] && u.values[k] > 0.0;
            let xl = g.lo[0] + k as f64 * g.h;
            if inside && !in_pos {
                in_pos = true;
                entry = xl;
            } else if !inside && in_pos {
                in_pos = false;
                total += x_field.eval(&[xl], 1)[0] - x_field.eval(&[entry], 1)[0];
            }
        }
        if in_pos {
            let xr = g.hi[0];
            total += x_field.eval(&[xr], 1)[0] - x_field.eval(&[entry], 1)[0];
        }
        total
    } else {
        let cm = g.cell_measure();
        (0..g.num_nodes())
            .filter(|&k| mask[k] && u.values[k] > 0.0)
            .map(|k| {
                let p = g.node(k);
                x_field.divergence(&p[..2], 2) * cm
            })
            .sum::<f64>()
    }
}
