//! Geometric substrate: parametric regions, uniform cell-centered grids,
//! nodal scalar fields with declared far-field behavior.
//!
//! Grids are cell-centered so that no node ever sits exactly on the boundary
//! of a region whose endpoints are grid-edge aligned; membership tests at
//! nodes are then unambiguous.

use crate::error::{invalid, Error, Result};

/// Half-open treatment never matters here: all point-set queries are at cell
/// centers, and region parameters are declared up to Lebesgue-null sets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn len(&self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }

    pub fn is_unbounded(&self) -> bool {
        self.lo.is_infinite() || self.hi.is_infinite()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo < hi {
            Some(Interval { lo, hi })
        } else {
            None
        }
    }
}

/// Parametric body of a region. 1D regions are sorted disjoint interval
/// unions (endpoints may be infinite); 2D regions are rectangles, disks,
/// simple polygons or half-planes.
#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    /// Sorted, pairwise disjoint intervals.
    Intervals(Vec<Interval>),
    /// Axis-aligned rectangle (x0,y0)-(x1,y1).
    Rectangle { x0: f64, y0: f64, x1: f64, y1: f64 },
    Disk { cx: f64, cy: f64, r: f64 },
    /// Simple polygon, counter-clockwise vertex list.
    Polygon(Vec<[f64; 2]>),
    /// Points x with normal . x < offset.
    HalfPlane { normal: [f64; 2], offset: f64 },
}

/// Parametric description of a measurable set in R^n, n in {1,2}.
/// `complement` flips membership, which is how unbounded complements of
/// bounded shapes are expressed in 2D.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionSpec {
    pub body: Body,
    pub complement: bool,
}

impl RegionSpec {
    pub fn intervals(ivs: Vec<(f64, f64)>) -> Result<Self> {
        let mut v: Vec<Interval> = Vec::with_capacity(ivs.len());
        for (lo, hi) in ivs {
            if !(lo < hi) {
                return invalid(format!("interval ({lo},{hi}) is empty or reversed"));
            }
            v.push(Interval::new(lo, hi));
        }
        v.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
        for w in v.windows(2) {
            if w[0].hi > w[1].lo {
                return invalid("interval union members must be pairwise disjoint");
            }
        }
        Ok(RegionSpec { body: Body::Intervals(v), complement: false })
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        RegionSpec::intervals(vec![(lo, hi)]).expect("nonempty interval")
    }

    /// Half line (a, +inf).
    pub fn half_line_right(a: f64) -> Self {
        RegionSpec::interval(a, f64::INFINITY)
    }

    /// Half line (-inf, a).
    pub fn half_line_left(a: f64) -> Self {
        RegionSpec::interval(f64::NEG_INFINITY, a)
    }

    pub fn empty(dim: usize) -> Self {
        match dim {
            1 => RegionSpec { body: Body::Intervals(vec![]), complement: false },
            _ => RegionSpec {
                body: Body::Rectangle { x0: 0.0, y0: 0.0, x1: 0.0, y1: 0.0 },
                complement: false,
            },
        }
    }

    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        if !(x0 < x1 && y0 < y1) {
            return invalid("rectangle corners must satisfy x0<x1, y0<y1");
        }
        Ok(RegionSpec { body: Body::Rectangle { x0, y0, x1, y1 }, complement: false })
    }

    pub fn disk(cx: f64, cy: f64, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return invalid("disk radius must be positive");
        }
        Ok(RegionSpec { body: Body::Disk { cx, cy, r }, complement: false })
    }

    pub fn polygon(pts: Vec<[f64; 2]>) -> Result<Self> {
        if pts.len() < 3 {
            return invalid("polygon needs at least 3 vertices");
        }
        Ok(RegionSpec { body: Body::Polygon(pts), complement: false })
    }

    pub fn half_plane(normal: [f64; 2], offset: f64) -> Self {
        RegionSpec { body: Body::HalfPlane { normal, offset }, complement: false }
    }

    pub fn dim(&self) -> usize {
        match self.body {
            Body::Intervals(_) => 1,
            _ => 2,
        }
    }

    pub fn complement(&self) -> Self {
        RegionSpec { body: self.body.clone(), complement: !self.complement }
    }

    /// Deterministic membership test (up to a null set of boundary points).
    pub fn contains(&self, p: &[f64]) -> bool {
        let inside = match &self.body {
            Body::Intervals(v) => v.iter().any(|iv| iv.contains(p[0])),
            Body::Rectangle { x0, y0, x1, y1 } => {
                *x0 < p[0] && p[0] < *x1 && *y0 < p[1] && p[1] < *y1
            }
            Body::Disk { cx, cy, r } => {
                let dx = p[0] - cx;
                let dy = p[1] - cy;
                dx * dx + dy * dy < r * r
            }
            Body::Polygon(pts) => point_in_polygon(p[0], p[1], pts),
            Body::HalfPlane { normal, offset } => normal[0] * p[0] + normal[1] * p[1] < *offset,
        };
        inside != self.complement
    }

    /// Membership "at infinity" along +x (1D: separate left/right queries).
    pub fn contains_at_infinity(&self, positive: bool) -> bool {
        let inside = match &self.body {
            Body::Intervals(v) => {
                if positive {
                    v.last().is_some_and(|iv| iv.hi.is_infinite())
                } else {
                    v.first().is_some_and(|iv| iv.lo.is_infinite())
                }
            }
            Body::Rectangle { .. } | Body::Disk { .. } | Body::Polygon(_) => false,
            Body::HalfPlane { normal, .. } => {
                let s = if positive { normal[0] } else { -normal[0] };
                s < 0.0
            }
        };
        inside != self.complement
    }

    /// Bounding box of the non-complemented body, None when unbounded.
    pub fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        if self.complement {
            return None;
        }
        match &self.body {
            Body::Intervals(v) => {
                let lo = v.first()?.lo;
                let hi = v.last()?.hi;
                if lo.is_infinite() || hi.is_infinite() {
                    None
                } else {
                    Some((vec![lo], vec![hi]))
                }
            }
            Body::Rectangle { x0, y0, x1, y1 } => Some((vec![*x0, *y0], vec![*x1, *y1])),
            Body::Disk { cx, cy, r } => Some((vec![cx - r, cy - r], vec![cx + r, cy + r])),
            Body::Polygon(pts) => {
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for p in pts {
                    for a in 0..2 {
                        lo[a] = lo[a].min(p[a]);
                        hi[a] = hi[a].max(p[a]);
                    }
                }
                Some((lo.to_vec(), hi.to_vec()))
            }
            Body::HalfPlane { .. } => None,
        }
    }

    pub fn diameter(&self) -> Option<f64> {
        if self.complement {
            return None;
        }
        match &self.body {
            Body::Intervals(v) => {
                let lo = v.first()?.lo;
                let hi = v.last()?.hi;
                if lo.is_infinite() || hi.is_infinite() {
                    None
                } else {
                    Some(hi - lo)
                }
            }
            Body::Rectangle { x0, y0, x1, y1 } => {
                Some(((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt())
            }
            Body::Disk { r, .. } => Some(2.0 * r),
            Body::Polygon(pts) => {
                let mut d2: f64 = 0.0;
                for (i, p) in pts.iter().enumerate() {
                    for q in pts.iter().skip(i + 1) {
                        d2 = d2.max((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2));
                    }
                }
                Some(d2.sqrt())
            }
            Body::HalfPlane { .. } => None,
        }
    }

    /// Interval-union view, complement resolved. Errors on 2D bodies.
    pub fn as_intervals(&self) -> Result<Vec<Interval>> {
        let Body::Intervals(v) = &self.body else {
            return invalid("not a 1D interval-union region");
        };
        if !self.complement {
            return Ok(v.clone());
        }
        Ok(complement_intervals(v))
    }
}

fn complement_intervals(v: &[Interval]) -> Vec<Interval> {
    let mut out = Vec::with_capacity(v.len() + 1);
    let mut cursor = f64::NEG_INFINITY;
    for iv in v {
        if iv.lo > cursor {
            out.push(Interval::new(cursor, iv.lo));
        }
        cursor = iv.hi;
    }
    if cursor < f64::INFINITY {
        out.push(Interval::new(cursor, f64::INFINITY));
    }
    out
}

/// Intersection of two sorted interval unions.
pub fn intersect_intervals(a: &[Interval], b: &[Interval]) -> Vec<Interval> {
    let mut out = Vec::new();
    for ia in a {
        for ib in b {
            if let Some(iv) = ia.intersect(ib) {
                out.push(iv);
            }
        }
    }
    out.sort_by(|p, q| p.lo.partial_cmp(&q.lo).unwrap());
    out
}

pub fn intervals_total_len(v: &[Interval]) -> f64 {
    v.iter().map(|iv| iv.len()).sum()
}

fn point_in_polygon(x: f64, y: f64, pts: &[[f64; 2]]) -> bool {
    // Ray casting; boundary points land on either side, which is fine a.e.
    let mut inside = false;
    let n = pts.len();
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = (pts[i][0], pts[i][1]);
        let (xj, yj) = (pts[j][0], pts[j][1]);
        if (yi > y) != (yj > y) {
            let xcross = xi + (y - yi) / (yj - yi) * (xj - xi);
            if x < xcross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Uniform cell-centered grid over a box containing Omega. Node i sits at
/// `lo + (i + 1/2) h` per axis, so box edges are cell edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub dim: usize,
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    pub n: [usize; 2],
    pub h: f64,
}

impl Grid {
    pub fn num_nodes(&self) -> usize {
        self.n[0] * if self.dim == 2 { self.n[1] } else { 1 }
    }

    pub fn cell_measure(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    /// Cell-center coordinate of flat index `k` (row-major, x fastest).
    pub fn node(&self, k: usize) -> [f64; 2] {
        let i = k % self.n[0];
        let j = k / self.n[0];
        [
            self.lo[0] + (i as f64 + 0.5) * self.h,
            if self.dim == 2 { self.lo[1] + (j as f64 + 0.5) * self.h } else { 0.0 },
        ]
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n[0] + i
    }

    /// Multi-index of flat index.
    pub fn multi_index(&self, k: usize) -> (usize, usize) {
        (k % self.n[0], k / self.n[0])
    }

    /// Nodes whose cell center lies in the region.
    pub fn mask(&self, region: &RegionSpec) -> Vec<bool> {
        (0..self.num_nodes())
            .map(|k| {
                let p = self.node(k);
                region.contains(&p[..self.dim])
            })
            .collect()
    }
}

/// Builds the computational grid: the box is the Omega bounding-box center
/// dilated to half-width R per axis, snapped to a whole number of cells.
pub fn build_grid(omega: &RegionSpec, h: f64, r: f64) -> Result<Grid> {
    if !(h > 0.0) {
        return invalid("grid spacing h must be positive");
    }
    let Some((blo, bhi)) = omega.bounding_box() else {
        return invalid("Omega must be bounded");
    };
    let diam = omega.diameter().unwrap();
    if r < 2.0 * diam {
        return invalid(format!("truncation radius R = {r} must be >= 2 diam(Omega) = {}", 2.0 * diam));
    }
    let dim = omega.dim();
    let cells_half = (r / h).round().max(1.0);
    let n_axis = 2.0 * cells_half;
    if n_axis > 1e7 {
        return invalid("grid too large");
    }
    let mut lo = [0.0f64; 2];
    let mut hi = [0.0f64; 2];
    let mut n = [1usize; 2];
    for a in 0..dim {
        let c = 0.5 * (blo[a] + bhi[a]);
        lo[a] = c - cells_half * h;
        hi[a] = c + cells_half * h;
        n[a] = n_axis as usize;
    }
    Ok(Grid { dim, lo, hi, n, h })
}

/// Far-field values beyond the computational box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FarField {
    /// Separate constants for the left and right exterior components in 1D.
    OneD { left: f64, right: f64 },
    /// Single constant in 2D.
    TwoD(f64),
}

impl FarField {
    pub fn constant(dim: usize, v: f64) -> Self {
        match dim {
            1 => FarField::OneD { left: v, right: v },
            _ => FarField::TwoD(v),
        }
    }
}

/// Nodal values on a grid plus the declared far-field constants, carrying
/// the admissibility bound M of the ambient function class.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub far: FarField,
    pub bound_m: f64,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>, far: FarField, bound_m: f64) -> Result<Self> {
        if values.len() != grid.num_nodes() {
            return Err(Error::DimensionMismatch { expected: grid.num_nodes(), got: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return invalid("field values must be finite");
        }
        Ok(ScalarField { grid, values, far, bound_m })
    }

    pub fn constant(grid: &Grid, v: f64, bound_m: f64) -> Self {
        let far = FarField::constant(grid.dim, v);
        ScalarField {
            grid: grid.clone(),
            values: vec![v; grid.num_nodes()],
            far,
            bound_m,
        }
    }

    /// Checks the X_M admissibility bound over the cells of `omega`.
    pub fn admissible_in(&self, omega: &RegionSpec) -> bool {
        let mask = self.grid.mask(omega);
        self.values
            .iter()
            .zip(mask.iter())
            .all(|(v, &inside)| !inside || v.abs() <= self.bound_m + 1e-12)
    }

    /// Cell-sum integral over the cells of `region`.
    pub fn integral_over(&self, region: &RegionSpec) -> f64 {
        let mask = self.grid.mask(region);
        let cm = self.grid.cell_measure();
        let mut acc = 0.0;
        let mut comp = 0.0;
        for (v, &inside) in self.values.iter().zip(mask.iter()) {
            if inside {
                kahan_add(&mut acc, &mut comp, v * cm);
            }
        }
        acc + comp
    }

    /// sup |values| over cells of `region`.
    pub fn sup_over(&self, region: &RegionSpec) -> f64 {
        let mask = self.grid.mask(region);
        self.values
            .iter()
            .zip(mask.iter())
            .filter(|(_, &m)| m)
            .map(|(v, _)| v.abs())
            .fold(0.0, f64::max)
    }

    /// L1 distance to another field over cells of `region`.
    pub fn l1_distance_over(&self, other: &ScalarField, region: &RegionSpec) -> f64 {
        let mask = self.grid.mask(region);
        let cm = self.grid.cell_measure();
        self.values
            .iter()
            .zip(other.values.iter())
            .zip(mask.iter())
            .filter(|(_, &m)| m)
            .map(|((a, b), _)| (a - b).abs() * cm)
            .sum()
    }
}

#[inline]
pub(crate) fn kahan_add(sum: &mut f64, comp: &mut f64, term: f64) {
    // Neumaier variant: robust when |term| > |sum|.
    let t = *sum + term;
    if sum.abs() >= term.abs() {
        *comp += (*sum - t) + term;
    } else {
        *comp += (term - t) + *sum;
    }
    *sum = t;
}

/// Compensated sum of a slice in index order.
pub(crate) fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut acc = 0.0;
    let mut comp = 0.0;
    for v in values {
        kahan_add(&mut acc, &mut comp, v);
    }
    acc + comp
}

/// Mass constraint int_Omega u = m with a feasibility tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassConstraint {
    pub m: f64,
    pub tolerance: f64,
}

impl MassConstraint {
    pub fn new(m: f64, omega_measure: f64, tolerance: f64) -> Result<Self> {
        if m.abs() > omega_measure {
            return invalid(format!("|m| = {} exceeds |Omega| = {omega_measure}", m.abs()));
        }
        if !(tolerance > 0.0) {
            return invalid("mass tolerance must be positive");
        }
        Ok(MassConstraint { m, tolerance })
    }
}

/// Signed indicator field chi_E - chi_{E^c} sampled at cell centers, with the
/// far field read off the unbounded components of E / E^c.
pub fn indicator(set: &RegionSpec, grid: &Grid) -> Result<ScalarField> {
    if set.dim() != grid.dim {
        return Err(Error::DimensionMismatch { expected: grid.dim, got: set.dim() });
    }
    let values: Vec<f64> = (0..grid.num_nodes())
        .map(|k| {
            let p = grid.node(k);
            if set.contains(&p[..grid.dim]) {
                1.0
            } else {
                -1.0
            }
        })
        .collect();
    let sgn = |b: bool| if b { 1.0 } else { -1.0 };
    let far = match grid.dim {
        1 => FarField::OneD {
            left: sgn(set.contains_at_infinity(false)),
            right: sgn(set.contains_at_infinity(true)),
        },
        _ => FarField::TwoD(sgn(set.contains_at_infinity(true))),
    };
    ScalarField::new(grid.clone(), values, far, 1.0)
}

/// Exact signed distance to the parametric boundary: positive inside E,
/// negative outside.
pub fn signed_distance(set: &RegionSpec, grid: &Grid) -> Result<ScalarField> {
    if set.dim() != grid.dim {
        return Err(Error::DimensionMismatch { expected: grid.dim, got: set.dim() });
    }
    let values: Vec<f64> = (0..grid.num_nodes())
        .map(|k| {
            let p = grid.node(k);
            signed_distance_point(set, &p[..grid.dim])
        })
        .collect();
    if values.iter().any(|v| !v.is_finite()) {
        return invalid("set has empty boundary (signed distance undefined)");
    }
    let far = match grid.dim {
        1 => FarField::OneD {
            left: if set.contains_at_infinity(false) { 1.0 } else { -1.0 },
            right: if set.contains_at_infinity(true) { 1.0 } else { -1.0 },
        },
        _ => FarField::TwoD(if set.contains_at_infinity(true) { 1.0 } else { -1.0 }),
    };
    ScalarField::new(grid.clone(), values, far, f64::MAX)
}

/// Signed distance at a single point.
pub fn signed_distance_point(set: &RegionSpec, p: &[f64]) -> f64 {
    let d = boundary_distance(set, p);
    if set.contains(p) {
        d
    } else {
        -d
    }
}

fn boundary_distance(set: &RegionSpec, p: &[f64]) -> f64 {
    // Complement shares the boundary.
    match &set.body {
        Body::Intervals(v) => {
            let mut d = f64::INFINITY;
            for iv in v {
                if iv.lo.is_finite() {
                    d = d.min((p[0] - iv.lo).abs());
                }
                if iv.hi.is_finite() {
                    d = d.min((p[0] - iv.hi).abs());
                }
            }
            d
        }
        Body::Rectangle { x0, y0, x1, y1 } => {
            // Exact SDF magnitude for an axis-aligned box.
            let cx = 0.5 * (x0 + x1);
            let cy = 0.5 * (y0 + y1);
            let hx = 0.5 * (x1 - x0);
            let hy = 0.5 * (y1 - y0);
            let qx = (p[0] - cx).abs() - hx;
            let qy = (p[1] - cy).abs() - hy;
            let outside = (qx.max(0.0).powi(2) + qy.max(0.0).powi(2)).sqrt();
            let inside = qx.max(qy).min(0.0);
            (outside + inside).abs()
        }
        Body::Disk { cx, cy, r } => {
            let dx = p[0] - cx;
            let dy = p[1] - cy;
            ((dx * dx + dy * dy).sqrt() - r).abs()
        }
        Body::Polygon(pts) => {
            let mut d = f64::INFINITY;
            let n = pts.len();
            for i in 0..n {
                let a = pts[i];
                let b = pts[(i + 1) % n];
                d = d.min(point_segment_distance(p[0], p[1], a, b));
            }
            d
        }
        Body::HalfPlane { normal, offset } => {
            let nn = (normal[0] * normal[0] + normal[1] * normal[1]).sqrt();
            (normal[0] * p[0] + normal[1] * p[1] - offset).abs() / nn
        }
    }
}

fn point_segment_distance(x: f64, y: f64, a: [f64; 2], b: [f64; 2]) -> f64 {
    let abx = b[0] - a[0];
    let aby = b[1] - a[1];
    let apx = x - a[0];
    let apy = y - a[1];
    let len2 = abx * abx + aby * aby;
    let t = if len2 > 0.0 { ((apx * abx + apy * aby) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let dx = apx - t * abx;
    let dy = apy - t * aby;
    (dx * dx + dy * dy).sqrt()
}

/// Exact Lebesgue measure of a parametric region, optionally clipped to a
/// grid box. Unbounded requests without a window are an error.
pub fn measure(region: &RegionSpec, window: Option<&Grid>) -> Result<f64> {
    match (&region.body, region.complement) {
        (Body::Intervals(_), _) => {
            let ivs = region.as_intervals()?;
            let ivs = match window {
                Some(g) => intersect_intervals(&ivs, &[Interval::new(g.lo[0], g.hi[0])]),
                None => ivs,
            };
            if ivs.iter().any(|iv| iv.is_unbounded()) {
                return invalid("measure of unbounded region needs a window");
            }
            Ok(intervals_total_len(&ivs))
        }
        (Body::Rectangle { x0, y0, x1, y1 }, false) => {
            if window.is_none() {
                return Ok((x1 - x0) * (y1 - y0));
            }
            gridded_measure(region, window)
        }
        (Body::Disk { r, .. }, false) => {
            if window.is_none() {
                return Ok(std::f64::consts::PI * r * r);
            }
            gridded_measure(region, window)
        }
        (Body::Polygon(pts), false) => {
            if window.is_none() {
                return Ok(polygon_area(pts));
            }
            gridded_measure(region, window)
        }
        _ => {
            if window.is_none() {
                return invalid("measure of unbounded region needs a window");
            }
            gridded_measure(region, window)
        }
    }
}

fn gridded_measure(region: &RegionSpec, window: Option<&Grid>) -> Result<f64> {
    let g = window.unwrap();
    let mask = g.mask(region);
    let cnt = mask.iter().filter(|&&b| b).count();
    Ok(cnt as f64 * g.cell_measure())
}

fn polygon_area(pts: &[[f64; 2]]) -> f64 {
    let n = pts.len();
    let mut a = 0.0;
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        a += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * a.abs()
}

/// Exact measure of the symmetric difference of two 1D interval unions.
pub fn symmetric_difference_measure(a: &RegionSpec, b: &RegionSpec) -> Result<f64> {
    let ia = a.as_intervals()?;
    let ib = b.as_intervals()?;
    let ca = complement_intervals(&ia);
    let cb = complement_intervals(&ib);
    let a_minus_b = intersect_intervals(&ia, &cb);
    let b_minus_a = intersect_intervals(&ib, &ca);
    if a_minus_b.iter().chain(b_minus_a.iter()).any(|iv| iv.is_unbounded()) {
        return invalid("symmetric difference is unbounded");
    }
    Ok(intervals_total_len(&a_minus_b) + intervals_total_len(&b_minus_a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_cell_counts_match_examples() {
        let omega = RegionSpec::interval(-1.0, 1.0);
        let g = build_grid(&omega, 0.01, 4.0).unwrap();
        assert_eq!(g.n[0], 800);
        assert_relative_eq!(g.lo[0], -4.0);
        assert_relative_eq!(g.hi[0], 4.0);

        let disk = RegionSpec::disk(0.0, 0.0, 1.0).unwrap();
        let g2 = build_grid(&disk, 0.05, 4.0).unwrap();
        assert_eq!(g2.n, [160, 160]);
        assert_eq!(g2.num_nodes(), 160 * 160);
    }

    #[test]
    fn grid_rejects_bad_input() {
        let omega = RegionSpec::interval(-1.0, 1.0);
        assert!(build_grid(&omega, 0.0, 4.0).is_err());
        assert!(build_grid(&omega, 0.01, 1.0).is_err());
    }

    #[test]
    fn nodes_are_cell_centers_off_boundary() {
        let omega = RegionSpec::interval(-1.0, 1.0);
        let g = build_grid(&omega, 0.01, 4.0).unwrap();
        assert_relative_eq!(g.node(0)[0], -3.995);
        // no node at an omega endpoint
        for k in 0..g.num_nodes() {
            assert!((g.node(k)[0] - 1.0).abs() > 1e-9);
            assert!((g.node(k)[0] + 1.0).abs() > 1e-9);
        }
    }

    #[test]
    fn indicator_half_line() {
        let omega = RegionSpec::interval(-1.0, 1.0);
        let g = build_grid(&omega, 0.01, 4.0).unwrap();
        let e = RegionSpec::half_line_right(0.0);
        let u = indicator(&e, &g).unwrap();
        for k in 0..g.num_nodes() {
            let x = g.node(k)[0];
            assert_eq!(u.values[k], if x > 0.0 { 1.0 } else { -1.0 });
        }
        assert_eq!(u.far, FarField::OneD { left: -1.0, right: 1.0 });
    }

    #[test]
    fn indicator_empty_and_disk() {
        let omega = RegionSpec::interval(-1.0, 1.0);
        let g = build_grid(&omega, 0.01, 4.0).unwrap();
        let u = indicator(&RegionSpec::empty(1), &g).unwrap();
        assert!(u.values.iter().all(|&v| v == -1.0));

        let disk_omega = RegionSpec::disk(0.0, 0.0, 1.0).unwrap();
        let g2 = build_grid(&disk_omega, 0.05, 4.0).unwrap();
        let e = RegionSpec::disk(0.0, 0.0, 0.5).unwrap();
        let u2 = indicator(&e, &g2).unwrap();
        for k in 0..g2.num_nodes() {
            let p = g2.node(k);
            let inside = p[0] * p[0] + p[1] * p[1] < 0.25;
            assert_eq!(u2.values[k] > 0.0, inside);
        }
    }

    #[test]
    fn indicator_complement_negates() {
        let omega = RegionSpec::interval(-1.0, 1.0);
        let g = build_grid(&omega, 0.02, 4.0).unwrap();
        let e = RegionSpec::intervals(vec![(-0.5, 0.0), (0.3, 0.8)]).unwrap();
        let u = indicator(&e, &g).unwrap();
        let uc = indicator(&e.complement(), &g).unwrap();
        for k in 0..g.num_nodes() {
            assert_eq!(u.values[k], -uc.values[k]);
        }
    }

    #[test]
    fn signed_distance_examples() {
        let e = RegionSpec::half_line_right(0.0);
        assert_relative_eq!(signed_distance_point(&e, &[0.3]), 0.3);
        assert_relative_eq!(signed_distance_point(&e, &[-0.2]), -0.2);
        let disk = RegionSpec::disk(0.0, 0.0, 1.0).unwrap();
        assert_relative_eq!(signed_distance_point(&disk, &[2.0, 0.0]), -1.0);
    }

    #[test]
    fn signed_distance_discrete_lipschitz() {
        let omega = RegionSpec::interval(-1.0, 1.0);
        let g = build_grid(&omega, 0.01, 4.0).unwrap();
        let e = RegionSpec::intervals(vec![(-0.7, -0.1), (0.4, 1.3)]).unwrap();
        let d = signed_distance(&e, &g).unwrap();
        for k in 1..g.num_nodes() {
            assert!((d.values[k] - d.values[k - 1]).abs() <= g.h + 1e-12);
        }
        // sign changes exactly at parametric boundary points
        for k in 1..g.num_nodes() {
            if d.values[k] * d.values[k - 1] < 0.0 {
                let xl = g.node(k - 1)[0];
                let xr = g.node(k)[0];
                let crossed = [-0.7, -0.1, 0.4, 1.3]
                    .iter()
                    .any(|&b| xl < b && b < xr);
                assert!(crossed, "sign change without boundary in ({xl},{xr})");
            }
        }
    }

    #[test]
    fn measures() {
        assert_relative_eq!(measure(&RegionSpec::interval(-1.0, 1.0), None).unwrap(), 2.0);
        let a = RegionSpec::interval(0.0, 1.0);
        let b = RegionSpec::interval(0.25, 1.0);
        assert_relative_eq!(symmetric_difference_measure(&a, &b).unwrap(), 0.25);
        let disk = RegionSpec::disk(0.3, -0.2, 1.0).unwrap();
        assert_relative_eq!(measure(&disk, None).unwrap(), std::f64::consts::PI, epsilon = 1e-12);
        assert!(measure(&RegionSpec::half_line_right(0.0), None).is_err());
    }

    #[test]
    fn symmetric_difference_additivity() {
        // |EΔF| = |E\F| + |F\E| exactly for interval unions
        let e = RegionSpec::intervals(vec![(-1.0, 0.2), (0.5, 0.9)]).unwrap();
        let f = RegionSpec::intervals(vec![(-0.8, 0.3)]).unwrap();
        let d = symmetric_difference_measure(&e, &f).unwrap();
        // by hand: E\F = (-1,-0.8) + (0.5,0.9), F\E = (0.2,0.3)
        assert_relative_eq!(d, 0.2 + 0.4 + 0.1, epsilon = 1e-14);
    }

    #[test]
    fn field_admissibility_and_integrals() {
        let omega = RegionSpec::interval(-1.0, 1.0);
        let g = build_grid(&omega, 0.01, 4.0).unwrap();
        let u = ScalarField::constant(&g, 1.0, 2.0);
        assert!(u.admissible_in(&omega));
        assert_relative_eq!(u.integral_over(&omega), 2.0, epsilon = 1e-12);
    }
}
