//! Singular-kernel quadrature: nonlocal interactions, the s-perimeter, the
//! classical perimeter and the Gagliardo energy K(u, Omega).
//!
//! 1D interval interactions are exact (closed-form double antiderivatives).
//! 2D uses precomputed cell-pair moment tables with exact handling of
//! touching cells, plus analytic beyond-box tails.

mod closed_form;
mod table;
pub mod stencil;

pub use closed_form::{cell_point_weight, g_antideriv, interval_pair};
pub use stencil::NonlocalStencil;

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre_pair(n: usize) -> (Vec<f64>, Vec<f64>) {
    table::gauss_legendre(n)
}

use rayon::prelude::*;

use crate::domain::{intersect_intervals, intervals_total_len, Body, Grid, Interval, RegionSpec, ScalarField};
use crate::error::{invalid, Error, Result};
use crate::util::neville_at_zero;

/// Kernel |x-y|^{-n-2s} with the paper's normalization conventions
/// (fractional Laplacian prefactor 2, no dimensional constant).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub s: f64,
    pub dim: usize,
}

impl KernelParams {
    pub fn new(s: f64, dim: usize) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return invalid(format!("s = {s} outside (0,1)"));
        }
        if dim != 1 && dim != 2 {
            return invalid("dimension must be 1 or 2");
        }
        Ok(KernelParams { s, dim })
    }

    /// The three-term s-perimeter is finite only for s in (0, 1/2).
    pub fn require_perimeter_range(&self) -> Result<()> {
        if self.s >= 0.5 {
            return Err(Error::Divergent(format!(
                "s = {} >= 1/2: the three-term s-perimeter is infinite for nontrivial sets",
                self.s
            )));
        }
        Ok(())
    }
}

fn check_disjoint_1d(a: &[Interval], b: &[Interval]) -> Result<()> {
    let overlap = intervals_total_len(&intersect_intervals(a, b));
    if overlap > 0.0 {
        return invalid(format!("sets overlap on measure {overlap}"));
    }
    Ok(())
}

/// How much of the beyond-box exterior a region covers; drives the analytic
/// tail terms of 2D quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
enum BeyondCoverage {
    Empty,
    Full,
    Partial,
}

fn beyond_coverage_2d(region: &RegionSpec, grid: &Grid) -> BeyondCoverage {
    let body_in_box = |r: &RegionSpec| -> bool {
        match r.bounding_box() {
            Some((lo, hi)) => {
                lo[0] >= grid.lo[0] && lo[1] >= grid.lo[1] && hi[0] <= grid.hi[0] && hi[1] <= grid.hi[1]
            }
            None => false,
        }
    };
    match (&region.body, region.complement) {
        (Body::HalfPlane { .. }, _) => BeyondCoverage::Partial,
        (_, false) => {
            if body_in_box(region) {
                BeyondCoverage::Empty
            } else {
                BeyondCoverage::Partial
            }
        }
        (_, true) => {
            if body_in_box(&region.complement()) {
                BeyondCoverage::Full
            } else {
                BeyondCoverage::Partial
            }
        }
    }
}

/// Nonlocal interaction L(A,B) of two essentially disjoint sets.
///
/// 1D: exact closed form on interval unions, window ignored.
/// 2D: cell-pair moment sums over the window, with the analytic tail added
/// when the unbounded factor covers the whole box complement.
pub fn interaction(
    a: &RegionSpec,
    b: &RegionSpec,
    params: &KernelParams,
    window: &Grid,
) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    if params.dim == 1 {
        let ia = a.as_intervals()?;
        let ib = b.as_intervals()?;
        return interaction_intervals(&ia, &ib, params.s);
    }
    interaction_2d(a, b, params, window)
}

pub(crate) fn interaction_intervals(ia: &[Interval], ib: &[Interval], s: f64) -> Result<f64> {
    check_disjoint_1d(ia, ib)?;
    let mut total = 0.0;
    for p in ia {
        for q in ib {
            if p.len() == 0.0 || q.len() == 0.0 {
                continue; // measure-zero factors contribute nothing
            }
            let v = interval_pair(p.lo, p.hi, q.lo, q.hi, s);
            if v.is_infinite() {
                return Err(Error::Divergent(format!(
                    "L(({},{}),({},{})) diverges at s = {s}",
                    p.lo, p.hi, q.lo, q.hi
                )));
            }
            total += v;
        }
    }
    Ok(total)
}

fn interaction_2d(a: &RegionSpec, b: &RegionSpec, params: &KernelParams, grid: &Grid) -> Result<f64> {
    if grid.dim != 2 {
        return invalid("2D interaction needs a 2D window grid");
    }
    let st = NonlocalStencil::new(grid, params.s)?;
    let mask_a = grid.mask(a);
    let mask_b = grid.mask(b);
    if mask_a.iter().zip(mask_b.iter()).any(|(&x, &y)| x && y) {
        return invalid("sets overlap on a positive-measure cell set");
    }
    let cells_a: Vec<usize> = (0..grid.num_nodes()).filter(|&k| mask_a[k]).collect();
    let cells_b: Vec<usize> = (0..grid.num_nodes()).filter(|&k| mask_b[k]).collect();
    let (nx, _ny) = (grid.n[0], grid.n[1]);
    let tx = 2 * nx - 1;
    let w2 = st.table_2d();
    let pair_sum: f64 = cells_a
        .par_iter()
        .map(|&ka| {
            let (ia, ja) = (ka % nx, ka / nx);
            let mut acc = 0.0;
            let mut comp = 0.0;
            for &kb in &cells_b {
                let (ib, jb) = (kb % nx, kb / nx);
                let row = (jb as i64 - ja as i64 + (grid.n[1] as i64 - 1)) as usize * tx;
                let col = (ib as i64 - ia as i64 + (nx as i64 - 1)) as usize;
                crate::domain::kahan_add(&mut acc, &mut comp, w2[row + col]);
            }
            acc + comp
        })
        .sum();
    // analytic tails for the unbounded factor
    let cov_a = beyond_coverage_2d(a, grid);
    let cov_b = beyond_coverage_2d(b, grid);
    let mut tail = 0.0;
    match (cov_a, cov_b) {
        (BeyondCoverage::Empty, BeyondCoverage::Empty) => {}
        (BeyondCoverage::Empty, BeyondCoverage::Full) => {
            tail = cells_a.iter().map(|&k| st.tail_weight_2d(k)).sum();
        }
        (BeyondCoverage::Full, BeyondCoverage::Empty) => {
            tail = cells_b.iter().map(|&k| st.tail_weight_2d(k)).sum();
        }
        _ => {
            return invalid(
                "2D interaction supports at most one unbounded factor, and it must cover the \
                 whole box complement (enlarge the window or use a bounded/complement region)",
            );
        }
    }
    Ok(pair_sum + tail)
}

/// Fractional s-perimeter
/// Per_s(E, Omega) = L(E∩Ω, E^c∩Ω) + L(E∩Ω, E^c∩Ω^c) + L(E∩Ω^c, E^c∩Ω).
pub fn frac_perimeter(
    e: &RegionSpec,
    omega: &RegionSpec,
    params: &KernelParams,
    window: &Grid,
) -> Result<f64> {
    params.require_perimeter_range()?;
    if params.dim == 1 {
        let ie = e.as_intervals()?;
        let iec = e.complement().as_intervals()?;
        let io = omega.as_intervals()?;
        let ioc = omega.complement().as_intervals()?;
        let e_in = intersect_intervals(&ie, &io);
        let ec_in = intersect_intervals(&iec, &io);
        let e_out = intersect_intervals(&ie, &ioc);
        let ec_out = intersect_intervals(&iec, &ioc);
        let t1 = interaction_intervals(&e_in, &ec_in, params.s)?;
        let t2 = interaction_intervals(&e_in, &ec_out, params.s)?;
        let t3 = interaction_intervals(&e_out, &ec_in, params.s)?;
        return Ok(t1 + t2 + t3);
    }
    // 2D: build the four sector masks once and reuse the table
    let grid = window;
    let st = NonlocalStencil::new(grid, params.s)?;
    let me = grid.mask(e);
    let mo = grid.mask(omega);
    let sector = |in_e: bool, in_o: bool| -> Vec<usize> {
        (0..grid.num_nodes())
            .filter(|&k| (me[k] == in_e) && (mo[k] == in_o))
            .collect()
    };
    let e_in = sector(true, true);
    let ec_in = sector(false, true);
    let e_out = sector(true, false);
    let ec_out = sector(false, false);
    let pair_block = |aa: &[usize], bb: &[usize]| -> f64 {
        let (nx, ny) = (grid.n[0], grid.n[1]);
        let tx = 2 * nx - 1;
        let w2 = st.table_2d();
        aa.par_iter()
            .map(|&ka| {
                let (ia, ja) = (ka % nx, ka / nx);
                let mut acc = 0.0;
                let mut comp = 0.0;
                for &kb in bb {
                    let (ib, jb) = (kb % nx, kb / nx);
                    let row = (jb as i64 - ja as i64 + (ny as i64 - 1)) as usize * tx;
                    let col = (ib as i64 - ia as i64 + (nx as i64 - 1)) as usize;
                    crate::domain::kahan_add(&mut acc, &mut comp, w2[row + col]);
                }
                acc + comp
            })
            .sum()
    };
    let t1 = pair_block(&e_in, &ec_in);
    let mut t2 = pair_block(&e_in, &ec_out);
    let mut t3 = pair_block(&e_out, &ec_in);
    // beyond-box parts of E^c ∩ Ω^c and E ∩ Ω^c (Ω is always inside the box);
    // exactly one of them is active for bounded-body sets
    let cov_e = beyond_coverage_2d(e, grid);
    let cov_ec = beyond_coverage_2d(&e.complement(), grid);
    if cov_e == BeyondCoverage::Partial || cov_ec == BeyondCoverage::Partial {
        return invalid("2D fractional perimeter needs E or E^c bounded inside the window");
    }
    if cov_ec == BeyondCoverage::Full {
        t2 += e_in.iter().map(|&k| st.tail_weight_2d(k)).sum::<f64>();
    }
    if cov_e == BeyondCoverage::Full {
        t3 += ec_in.iter().map(|&k| st.tail_weight_2d(k)).sum::<f64>();
    }
    Ok(t1 + t2 + t3)
}

/// Classical (variational) perimeter of a parametric set relative to Omega:
/// jump count in 1D, boundary length of ∂E ∩ Ω in 2D.
pub fn classical_perimeter(e: &RegionSpec, omega: &RegionSpec) -> Result<f64> {
    if e.dim() != omega.dim() {
        return Err(Error::DimensionMismatch { expected: omega.dim(), got: e.dim() });
    }
    if e.dim() == 1 {
        let ie = e.as_intervals()?;
        let mut count = 0usize;
        for iv in &ie {
            for endpoint in [iv.lo, iv.hi] {
                if endpoint.is_finite() && omega.contains(&[endpoint]) {
                    count += 1;
                }
            }
        }
        return Ok(count as f64);
    }
    boundary_length_2d(e, omega)
}

fn boundary_length_2d(e: &RegionSpec, omega: &RegionSpec) -> Result<f64> {
    // exact clipping of ∂E against Ω for the supported parametric shapes
    let body = if e.complement { &e.body } else { &e.body };
    match body {
        Body::Rectangle { x0, y0, x1, y1 } => {
            let segs = [
                ([*x0, *y0], [*x1, *y0]),
                ([*x1, *y0], [*x1, *y1]),
                ([*x1, *y1], [*x0, *y1]),
                ([*x0, *y1], [*x0, *y0]),
            ];
            Ok(segs.iter().map(|(a, b)| segment_length_inside(*a, *b, omega)).sum())
        }
        Body::Polygon(pts) => {
            let n = pts.len();
            let mut total = 0.0;
            for i in 0..n {
                total += segment_length_inside(pts[i], pts[(i + 1) % n], omega);
            }
            Ok(total)
        }
        Body::Disk { cx, cy, r } => Ok(circle_length_inside(*cx, *cy, *r, omega)),
        Body::HalfPlane { normal, offset } => {
            // boundary line clipped to Omega's bounding box, then refined
            let Some((lo, hi)) = omega.bounding_box() else {
                return invalid("omega must be bounded");
            };
            let nn = (normal[0] * normal[0] + normal[1] * normal[1]).sqrt();
            let nrm = [normal[0] / nn, normal[1] / nn];
            let t = [-nrm[1], nrm[0]];
            let p0 = [nrm[0] * offset / nn, nrm[1] * offset / nn];
            let diag = ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2)).sqrt();
            let c = [(lo[0] + hi[0]) * 0.5, (lo[1] + hi[1]) * 0.5];
            let proj = (c[0] - p0[0]) * t[0] + (c[1] - p0[1]) * t[1];
            let a = [p0[0] + (proj - diag) * t[0], p0[1] + (proj - diag) * t[1]];
            let b = [p0[0] + (proj + diag) * t[0], p0[1] + (proj + diag) * t[1]];
            Ok(segment_length_inside(a, b, omega))
        }
        Body::Intervals(_) => unreachable!(),
    }
}

fn segment_length_inside(a: [f64; 2], b: [f64; 2], omega: &RegionSpec) -> f64 {
    // collect parameter breakpoints where the segment may cross ∂Ω, then
    // classify sub-segments by midpoint; exact for rectangles and disks
    let mut ts = vec![0.0, 1.0];
    let dx = b[0] - a[0];
    let dy = b[1] - a[1];
    match (&omega.body, omega.complement) {
        (Body::Rectangle { x0, y0, x1, y1 }, _) => {
            for (p, d, lo, hi) in [(a[0], dx, x0, x1), (a[1], dy, y0, y1)] {
                if d.abs() > 1e-300 {
                    for edge in [lo, hi] {
                        let t = (edge - p) / d;
                        if (0.0..=1.0).contains(&t) {
                            ts.push(t);
                        }
                    }
                }
            }
        }
        (Body::Disk { cx, cy, r }, _) => {
            let fx = a[0] - cx;
            let fy = a[1] - cy;
            let qa = dx * dx + dy * dy;
            let qb = 2.0 * (fx * dx + fy * dy);
            let qc = fx * fx + fy * fy - r * r;
            let disc = qb * qb - 4.0 * qa * qc;
            if disc > 0.0 && qa > 0.0 {
                let sq = disc.sqrt();
                for t in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
                    if (0.0..=1.0).contains(&t) {
                        ts.push(t);
                    }
                }
            }
        }
        _ => {
            // generic fallback: dense parameter subdivision
            for i in 1..512 {
                ts.push(i as f64 / 512.0);
            }
        }
    }
    ts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let len = (dx * dx + dy * dy).sqrt();
    let mut total = 0.0;
    for w in ts.windows(2) {
        let tm = 0.5 * (w[0] + w[1]);
        let p = [a[0] + tm * dx, a[1] + tm * dy];
        if omega.contains(&p) {
            total += (w[1] - w[0]) * len;
        }
    }
    total
}

fn circle_length_inside(cx: f64, cy: f64, r: f64, omega: &RegionSpec) -> f64 {
    let mut angles = vec![0.0, 2.0 * std::f64::consts::PI];
    match (&omega.body, omega.complement) {
        (Body::Rectangle { x0, y0, x1, y1 }, _) => {
            for x in [x0, x1] {
                let c = (x - cx) / r;
                if c.abs() <= 1.0 {
                    let t = c.acos();
                    angles.push(t);
                    angles.push(2.0 * std::f64::consts::PI - t);
                }
            }
            for y in [y0, y1] {
                let sn = (y - cy) / r;
                if sn.abs() <= 1.0 {
                    let t = sn.asin();
                    angles.push(t.rem_euclid(2.0 * std::f64::consts::PI));
                    angles.push((std::f64::consts::PI - t).rem_euclid(2.0 * std::f64::consts::PI));
                }
            }
        }
        (Body::Disk { cx: ox, cy: oy, r: or }, _) => {
            let d2 = (cx - ox).powi(2) + (cy - oy).powi(2);
            let d = d2.sqrt();
            if d > 1e-300 {
                let c = (d2 + r * r - or * or) / (2.0 * d * r);
                if c.abs() <= 1.0 {
                    let base = (oy - cy).atan2(ox - cx);
                    let t = c.acos();
                    angles.push((base + t).rem_euclid(2.0 * std::f64::consts::PI));
                    angles.push((base - t).rem_euclid(2.0 * std::f64::consts::PI));
                }
            }
        }
        _ => {
            for i in 1..1024 {
                angles.push(2.0 * std::f64::consts::PI * i as f64 / 1024.0);
            }
        }
    }
    angles.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let mut total = 0.0;
    for w in angles.windows(2) {
        let tm = 0.5 * (w[0] + w[1]);
        let p = [cx + r * tm.cos(), cy + r * tm.sin()];
        if omega.contains(&p) {
            total += (w[1] - w[0]) * r;
        }
    }
    total
}

/// Gagliardo energy K(u, Omega) = 1/2 u(Ω,Ω) + u(Ω,Ω^c) of a gridded field,
/// with the beyond-box exterior integrated analytically against the declared
/// far-field constants.
pub fn gagliardo_k(u: &ScalarField, omega: &RegionSpec, s: f64) -> Result<f64> {
    if omega.dim() != u.grid.dim {
        return Err(Error::DimensionMismatch { expected: u.grid.dim, got: omega.dim() });
    }
    let st = NonlocalStencil::new(&u.grid, s)?;
    let mask = u.grid.mask(omega);
    if !mask.iter().any(|&b| b) {
        return invalid("grid does not cover omega");
    }
    Ok(st.gagliardo(Some(&mask), &u.values, &u.far))
}

/// Row of a perimeter rescaling sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct PerimeterLimitRow {
    pub s: f64,
    pub rescaled: f64,
}

/// (1-2s) Per_s sweep with a Richardson-extrapolated limit in sigma = 1-2s.
#[derive(Debug, Clone, PartialEq)]
pub struct PerimeterLimitTable {
    pub rows: Vec<PerimeterLimitRow>,
    pub limit: f64,
}

pub fn rescaled_perimeter_limit(
    e: &RegionSpec,
    omega: &RegionSpec,
    s_values: &[f64],
    window: &Grid,
) -> Result<PerimeterLimitTable> {
    if s_values.is_empty() {
        return invalid("empty s list");
    }
    let mut rows = Vec::with_capacity(s_values.len());
    for &s in s_values {
        let params = KernelParams::new(s, omega.dim())?;
        let p = frac_perimeter(e, omega, &params, window)?;
        rows.push(PerimeterLimitRow { s, rescaled: (1.0 - 2.0 * s) * p });
    }
    let sig: Vec<f64> = rows.iter().map(|r| 1.0 - 2.0 * r.s).collect();
    let val: Vec<f64> = rows.iter().map(|r| r.rescaled).collect();
    let limit = neville_at_zero(&sig, &val);
    Ok(PerimeterLimitTable { rows, limit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::build_grid;
    use approx::assert_relative_eq;

    fn window_1d() -> Grid {
        build_grid(&RegionSpec::interval(-1.0, 1.0), 0.05, 4.0).unwrap()
    }

    #[test]
    fn interaction_unit_example() {
        let a = RegionSpec::interval(-1.0, 0.0);
        let b = RegionSpec::interval(0.0, 1.0);
        let p = KernelParams::new(0.25, 1).unwrap();
        let v = interaction(&a, &b, &p, &window_1d()).unwrap();
        assert_relative_eq!(v, 8.0 - 4.0 * 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn interaction_translation_invariance_and_symmetry() {
        let p = KernelParams::new(0.3, 1).unwrap();
        let w = window_1d();
        let a = RegionSpec::intervals(vec![(-2.0, -0.5), (0.2, 0.4)]).unwrap();
        let b = RegionSpec::intervals(vec![(0.5, 1.5)]).unwrap();
        let v0 = interaction(&a, &b, &p, &w).unwrap();
        let v1 = interaction(&b, &a, &p, &w).unwrap();
        assert_relative_eq!(v0, v1, epsilon = 1e-13);
        let c = 3.7;
        let at = RegionSpec::intervals(vec![(-2.0 + c, -0.5 + c), (0.2 + c, 0.4 + c)]).unwrap();
        let bt = RegionSpec::intervals(vec![(0.5 + c, 1.5 + c)]).unwrap();
        let v2 = interaction(&at, &bt, &p, &w).unwrap();
        assert_relative_eq!(v0, v2, max_relative = 1e-12);
    }

    #[test]
    fn interaction_rejects_overlap_and_divergence() {
        let p = KernelParams::new(0.25, 1).unwrap();
        let w = window_1d();
        let a = RegionSpec::interval(-1.0, 0.5);
        let b = RegionSpec::interval(0.0, 1.0);
        assert!(interaction(&a, &b, &p, &w).is_err());
        // touching half-lines at s >= 1/2 diverge
        let p2 = KernelParams::new(0.75, 1).unwrap();
        let hl = RegionSpec::half_line_left(0.0);
        let hr = RegionSpec::half_line_right(0.0);
        assert!(interaction(&hl, &hr, &p2, &w).is_err());
    }

    #[test]
    fn zero_measure_factor_gives_zero() {
        let p = KernelParams::new(0.25, 1).unwrap();
        let a = RegionSpec::interval(-1.0, 0.0);
        let b = RegionSpec::empty(1);
        assert_relative_eq!(interaction(&a, &b, &p, &window_1d()).unwrap(), 0.0);
    }

    #[test]
    fn perimeter_empty_and_complement_symmetry() {
        let omega = RegionSpec::interval(-1.0, 1.0);
        let p = KernelParams::new(0.25, 1).unwrap();
        let w = window_1d();
        assert_relative_eq!(
            frac_perimeter(&RegionSpec::empty(1), &omega, &p, &w).unwrap(),
            0.0
        );
        let e = RegionSpec::intervals(vec![(-0.4, 0.3)]).unwrap();
        let pe = frac_perimeter(&e, &omega, &p, &w).unwrap();
        let pc = frac_perimeter(&e.complement(), &omega, &p, &w).unwrap();
        assert_relative_eq!(pe, pc, max_relative = 1e-12);
    }

    #[test]
    fn perimeter_scaling_law() {
        // Per_s(lambda E, lambda Omega) = lambda^{n-2s} Per_s(E, Omega)
        let s = 0.25;
        let p = KernelParams::new(s, 1).unwrap();
        let w = window_1d();
        let e = RegionSpec::half_line_right(0.0);
        let omega = RegionSpec::interval(-1.0, 1.0);
        let p1 = frac_perimeter(&e, &omega, &p, &w).unwrap();
        let lam = 2.0f64;
        let omega2 = RegionSpec::interval(-2.0, 2.0);
        let w2 = build_grid(&omega2, 0.05, 8.0).unwrap();
        let p2 = frac_perimeter(&e, &omega2, &p, &w2).unwrap();
        assert_relative_eq!(p2, lam.powf(1.0 - 2.0 * s) * p1, max_relative = 1e-12);
    }

    #[test]
    fn perimeter_rejects_s_above_half() {
        let omega = RegionSpec::interval(-1.0, 1.0);
        let e = RegionSpec::half_line_right(0.0);
        let p = KernelParams::new(0.6, 1).unwrap();
        assert!(frac_perimeter(&e, &omega, &p, &window_1d()).is_err());
    }

    #[test]
    fn perimeter_monotone_in_omega() {
        let p = KernelParams::new(0.25, 1).unwrap();
        let w = window_1d();
        let e = RegionSpec::intervals(vec![(-0.3, 0.4)]).unwrap();
        let big = RegionSpec::interval(-1.0, 1.0);
        let small = RegionSpec::interval(-0.6, 0.6);
        let pb = frac_perimeter(&e, &big, &p, &w).unwrap();
        let ps = frac_perimeter(&e, &small, &p, &w).unwrap();
        assert!(ps <= pb + 1e-12, "{ps} vs {pb}");
    }

    #[test]
    fn classical_perimeter_examples() {
        let omega = RegionSpec::interval(-1.0, 1.0);
        let e1 = RegionSpec::half_line_right(0.0);
        assert_relative_eq!(classical_perimeter(&e1, &omega).unwrap(), 1.0);
        let e2 = RegionSpec::interval(-0.5, 0.5);
        assert_relative_eq!(classical_perimeter(&e2, &omega).unwrap(), 2.0);
        let disk_omega = RegionSpec::rectangle(-2.0, -2.0, 2.0, 2.0).unwrap();
        let e3 = RegionSpec::disk(0.0, 0.0, 0.8).unwrap();
        assert_relative_eq!(
            classical_perimeter(&e3, &disk_omega).unwrap(),
            2.0 * std::f64::consts::PI * 0.8,
            epsilon = 1e-12
        );
        // boundary jump outside omega is not counted
        let e4 = RegionSpec::half_line_right(1.5);
        assert_relative_eq!(classical_perimeter(&e4, &omega).unwrap(), 0.0);
    }

    #[test]
    fn classical_perimeter_disk_partially_inside() {
        // disk of radius 1 centered at origin, omega the right half plane
        // rectangle: exactly half the circle lies inside
        let omega = RegionSpec::rectangle(0.0, -3.0, 3.0, 3.0).unwrap();
        let e = RegionSpec::disk(0.0, 0.0, 1.0).unwrap();
        assert_relative_eq!(
            classical_perimeter(&e, &omega).unwrap(),
            std::f64::consts::PI,
            epsilon = 1e-9
        );
    }

    #[test]
    fn gagliardo_of_constant_is_zero_and_shift_invariant() {
        let omega = RegionSpec::interval(-1.0, 1.0);
        let g = build_grid(&omega, 0.02, 4.0).unwrap();
        let u = ScalarField::constant(&g, 0.3, 2.0);
        assert!(gagliardo_k(&u, &omega, 0.25).unwrap().abs() < 1e-12);
        // K(u + c) = K(u)
        let mut vals: Vec<f64> = (0..g.num_nodes()).map(|k| (g.node(k)[0]).tanh()).collect();
        let far = crate::domain::FarField::OneD { left: -1.0, right: 1.0 };
        let u1 = ScalarField::new(g.clone(), vals.clone(), far, 2.0).unwrap();
        let k1 = gagliardo_k(&u1, &omega, 0.25).unwrap();
        for v in vals.iter_mut() {
            *v += 0.37;
        }
        let far2 = crate::domain::FarField::OneD { left: -1.0 + 0.37, right: 1.0 + 0.37 };
        let u2 = ScalarField::new(g.clone(), vals, far2, 2.0).unwrap();
        let k2 = gagliardo_k(&u2, &omega, 0.25).unwrap();
        assert_relative_eq!(k1, k2, max_relative = 1e-11);
    }

    #[test]
    fn signed_indicator_k_is_four_perimeters() {
        let omega = RegionSpec::interval(-1.0, 1.0);
        let g = build_grid(&omega, 0.005, 4.0).unwrap();
        let p = KernelParams::new(0.25, 1).unwrap();
        for e in [
            RegionSpec::half_line_right(0.0),
            RegionSpec::interval(-0.5, 0.5),
            RegionSpec::intervals(vec![(-0.75, -0.25), (0.25, 0.5)]).unwrap(),
        ] {
            let u = crate::domain::indicator(&e, &g).unwrap();
            let k = gagliardo_k(&u, &omega, 0.25).unwrap();
            let per = frac_perimeter(&e, &omega, &p, &g).unwrap();
            assert_relative_eq!(k, 4.0 * per, max_relative = 5e-3);
        }
    }

    #[test]
    fn rescaled_limit_single_jump() {
        let omega = RegionSpec::interval(-1.0, 1.0);
        let w = window_1d();
        let e = RegionSpec::half_line_right(0.0);
        let t = rescaled_perimeter_limit(&e, &omega, &[0.30, 0.40, 0.45, 0.49], &w).unwrap();
        assert!((t.limit - 1.0).abs() < 0.05, "limit {}", t.limit);
        let empty = rescaled_perimeter_limit(&RegionSpec::empty(1), &omega, &[0.3, 0.4], &w).unwrap();
        assert!(empty.limit.abs() < 1e-12);
        let e2 = RegionSpec::interval(-0.5, 0.5);
        let t2 = rescaled_perimeter_limit(&e2, &omega, &[0.30, 0.40, 0.45, 0.49], &w).unwrap();
        assert!((t2.limit - 2.0).abs() < 0.1, "limit {}", t2.limit);
    }

    #[test]
    fn interaction_2d_symmetric_and_close_to_1d_product_structure() {
        // two 2D rectangles far apart: midpoint-style table should be close
        // to the separable midpoint estimate
        let omega = RegionSpec::rectangle(-1.0, -1.0, 1.0, 1.0).unwrap();
        let g = build_grid(&omega, 0.1, 6.0).unwrap();
        let p = KernelParams::new(0.25, 2).unwrap();
        let a = RegionSpec::rectangle(-0.95, -0.45, -0.55, 0.45).unwrap();
        let b = RegionSpec::rectangle(0.55, -0.45, 0.95, 0.45).unwrap();
        let vab = interaction(&a, &b, &p, &g).unwrap();
        let vba = interaction(&b, &a, &p, &g).unwrap();
        assert_relative_eq!(vab, vba, max_relative = 1e-10);
        assert!(vab > 0.0);
    }

    #[test]
    fn frac_perimeter_2d_complement_symmetry() {
        let omega = RegionSpec::rectangle(-1.0, -1.0, 1.0, 1.0).unwrap();
        let g = build_grid(&omega, 0.1, 6.0).unwrap();
        let p = KernelParams::new(0.25, 2).unwrap();
        let e = RegionSpec::disk(0.1, -0.1, 0.5).unwrap();
        let pe = frac_perimeter(&e, &omega, &p, &g).unwrap();
        let pc = frac_perimeter(&e.complement(), &omega, &p, &g).unwrap();
        assert_relative_eq!(pe, pc, max_relative = 1e-9);
        assert!(pe > 0.0);
    }
}
