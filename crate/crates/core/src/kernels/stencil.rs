//! Discrete nonlocal energy machinery on a grid.
//!
//! One symmetric family of cell-pair moments drives everything: the Gagliardo
//! energy K(u, Omega), its exact gradient, and the discrete fractional
//! Laplacian (which *is* the gradient of the all-pairs energy divided by the
//! cell measure, so integration by parts holds to machine precision).
//!
//! For s < 1/2 all pair moments are the exact piecewise-constant cell-pair
//! integrals (touching cells converge). For s >= 1/2 touching moments
//! diverge, so same-cell and edge-adjacent pairs switch to a gradient model:
//! |u(x)-u(y)|^2 ~ (difference quotient)^2 |x-y|^2, whose moments are finite
//! for every s in (0,1). The model is exact on locally linear fields.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::domain::{kahan_sum, FarField, Grid, ScalarField};
use crate::error::{invalid, Result};
use crate::kernels::closed_form::{g_antideriv, interval_pair, p_pair_moment, p_same_cell};
use crate::kernels::table::{
    beyond_box_tail_2d, grad_moment_2d, pair_moment_2d, AngularCdf,
};

/// Symmetric circulant-embedded convolution used for 1D pair sums.
struct Convolver {
    n: usize,
    len: usize,
    kernel_hat: Vec<Complex<f64>>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl Convolver {
    fn new(w: &[f64]) -> Self {
        let n = w.len();
        let len = (2 * n).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(len);
        let ifft = planner.plan_fft_inverse(len);
        let mut c = vec![Complex::new(0.0, 0.0); len];
        for (k, &wk) in w.iter().enumerate() {
            c[k] = Complex::new(wk, 0.0);
            if k > 0 {
                c[len - k] = Complex::new(wk, 0.0);
            }
        }
        fft.process(&mut c);
        Convolver { n, len, kernel_hat: c, fft, ifft }
    }

    /// y_i = sum_j w(|i-j|) x_j.
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut buf = vec![Complex::new(0.0, 0.0); self.len];
        for (b, &v) in buf.iter_mut().zip(x.iter()) {
            b.re = v;
        }
        self.fft.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(self.kernel_hat.iter()) {
            *b *= k;
        }
        self.ifft.process(&mut buf);
        let scale = 1.0 / self.len as f64;
        buf[..self.n].iter().map(|c| c.re * scale).collect()
    }
}

/// Precomputed cell-pair moments, tails and near-diagonal model coefficients
/// for one (grid, s) pair.
pub struct NonlocalStencil {
    pub grid: Grid,
    pub s: f64,
    gradient_model: bool,
    // 1D
    w1: Vec<f64>,
    conv: Option<Convolver>,
    tail_left: Vec<f64>,
    tail_right: Vec<f64>,
    c_same_1d: f64,
    // 2D
    w2: Vec<f64>,
    m_same_2d: [f64; 2],
    tail2: Vec<f64>,
}

impl NonlocalStencil {
    pub fn new(grid: &Grid, s: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return invalid(format!("s = {s} outside (0,1)"));
        }
        let gradient_model = s >= 0.5;
        let h = grid.h;
        let mut st = NonlocalStencil {
            grid: grid.clone(),
            s,
            gradient_model,
            w1: Vec::new(),
            conv: None,
            tail_left: Vec::new(),
            tail_right: Vec::new(),
            c_same_1d: 0.0,
            w2: Vec::new(),
            m_same_2d: [0.0; 2],
            tail2: Vec::new(),
        };
        if grid.dim == 1 {
            let n = grid.n[0];
            let mut w1 = vec![0.0; n];
            for (d, w) in w1.iter_mut().enumerate().skip(1) {
                *w = if d == 1 && gradient_model {
                    p_pair_moment(h, 1, s) / (h * h)
                } else {
                    // closed-form cell-pair interaction at offset d
                    let g = |r: f64| g_antideriv(r, s);
                    2.0 * g(d as f64 * h) - g((d - 1) as f64 * h) - g((d + 1) as f64 * h)
                };
            }
            st.c_same_1d = if gradient_model { p_same_cell(h, s) } else { 0.0 };
            let (lo, hi) = (grid.lo[0], grid.hi[0]);
            let mut tl = vec![0.0; n];
            let mut tr = vec![0.0; n];
            for k in 0..n {
                let a = lo + k as f64 * h;
                let b = a + h;
                if gradient_model {
                    // edge cells use a one-cell standoff plus the gradient
                    // model against a virtual far-field cell
                    tl[k] = if k == 0 {
                        p_pair_moment(h, 1, s) / (h * h)
                            + interval_pair(f64::NEG_INFINITY, lo - h, a, b, s)
                    } else {
                        interval_pair(f64::NEG_INFINITY, lo, a, b, s)
                    };
                    tr[k] = if k == n - 1 {
                        p_pair_moment(h, 1, s) / (h * h)
                            + interval_pair(a, b, hi + h, f64::INFINITY, s)
                    } else {
                        interval_pair(a, b, hi, f64::INFINITY, s)
                    };
                } else {
                    tl[k] = interval_pair(f64::NEG_INFINITY, lo, a, b, s);
                    tr[k] = interval_pair(a, b, hi, f64::INFINITY, s);
                }
            }
            st.tail_left = tl;
            st.tail_right = tr;
            st.conv = if n >= 128 { Some(Convolver::new(&w1)) } else { None };
            st.w1 = w1;
        } else {
            let (nx, ny) = (grid.n[0], grid.n[1]);
            let (tx, ty) = (2 * nx - 1, 2 * ny - 1);
            let mut w2 = vec![0.0; tx * ty];
            let entries: Vec<(usize, f64)> = {
                use rayon::prelude::*;
                (0..tx * ty)
                    .into_par_iter()
                    .map(|idx| {
                        let di = (idx % tx) as i64 - (nx as i64 - 1);
                        let dj = (idx / tx) as i64 - (ny as i64 - 1);
                        if di == 0 && dj == 0 {
                            return (idx, 0.0);
                        }
                        let axis_touching = di.abs() + dj.abs() == 1;
                        let v = if axis_touching && gradient_model {
                            let (m11, m22) = grad_moment_2d(h, s, di, dj);
                            (if di != 0 { m11 } else { m22 }) / (h * h)
                        } else {
                            pair_moment_2d(h, s, di, dj)
                        };
                        (idx, v)
                    })
                    .collect()
            };
            for (idx, v) in entries {
                w2[idx] = v;
            }
            if gradient_model {
                let (m11, m22) = grad_moment_2d(h, s, 0, 0);
                st.m_same_2d = [m11, m22];
            }
            let cdf = AngularCdf::new(s);
            let mut tail2 = vec![0.0; grid.num_nodes()];
            for (k, t) in tail2.iter_mut().enumerate() {
                let p = grid.node(k);
                *t = h * h * beyond_box_tail_2d([p[0], p[1]], grid.lo, grid.hi, s, &cdf);
            }
            st.w2 = w2;
            st.tail2 = tail2;
        }
        Ok(st)
    }

    pub fn pair_weight_1d(&self, d: usize) -> f64 {
        self.w1[d]
    }

    /// Centered (2nx-1) x (2ny-1) table of 2D cell-pair moments.
    pub fn table_2d(&self) -> &[f64] {
        &self.w2
    }

    /// Beyond-box tail weight of a 2D cell.
    pub fn tail_weight_2d(&self, k: usize) -> f64 {
        self.tail2[k]
    }

    /// sum_j w(|i-j|) x_j for all i (1D via FFT, 2D direct).
    pub fn pair_conv(&self, x: &[f64]) -> Vec<f64> {
        if self.grid.dim == 1 {
            if let Some(c) = &self.conv {
                return c.apply(x);
            }
            let n = self.grid.n[0];
            (0..n)
                .map(|i| {
                    kahan_sum((0..n).map(|j| self.w1[i.abs_diff(j)] * x[j]))
                })
                .collect()
        } else {
            use rayon::prelude::*;
            let (nx, ny) = (self.grid.n[0], self.grid.n[1]);
            let tx = 2 * nx - 1;
            (0..nx * ny)
                .into_par_iter()
                .map(|k| {
                    let (i, j) = (k % nx, k / nx);
                    let mut acc = 0.0;
                    let mut comp = 0.0;
                    for jj in 0..ny {
                        let row = (jj as i64 - j as i64 + ny as i64 - 1) as usize * tx;
                        let base = jj * nx;
                        for ii in 0..nx {
                            let w = self.w2[row + (ii as i64 - i as i64 + nx as i64 - 1) as usize];
                            crate::domain::kahan_add(&mut acc, &mut comp, w * x[base + ii]);
                        }
                    }
                    acc + comp
                })
                .collect()
        }
    }

    fn tail_terms(&self, k: usize, u: f64, far: &FarField) -> (f64, f64) {
        // (energy, gradient) contribution of the beyond-box tail at node k
        match (self.grid.dim, far) {
            (1, FarField::OneD { left, right }) => {
                let dl = u - left;
                let dr = u - right;
                (
                    self.tail_left[k] * dl * dl + self.tail_right[k] * dr * dr,
                    2.0 * (self.tail_left[k] * dl + self.tail_right[k] * dr),
                )
            }
            (2, FarField::TwoD(v)) => {
                let d = u - v;
                (self.tail2[k] * d * d, 2.0 * self.tail2[k] * d)
            }
            _ => (0.0, 0.0),
        }
    }

    /// Same-cell gradient-model energy attributed to cell k (s >= 1/2 only).
    fn same_cell_energy(&self, u: &[f64], k: usize) -> f64 {
        if !self.gradient_model {
            return 0.0;
        }
        let h = self.grid.h;
        if self.grid.dim == 1 {
            let n = self.grid.n[0];
            let slope = if k == 0 {
                (u[1] - u[0]) / h
            } else if k == n - 1 {
                (u[n - 1] - u[n - 2]) / h
            } else {
                (u[k + 1] - u[k - 1]) / (2.0 * h)
            };
            0.5 * self.c_same_1d * slope * slope
        } else {
            let (nx, ny) = (self.grid.n[0], self.grid.n[1]);
            let (i, j) = (k % nx, k / nx);
            let gx = if i == 0 {
                (u[k + 1] - u[k]) / h
            } else if i == nx - 1 {
                (u[k] - u[k - 1]) / h
            } else {
                (u[k + 1] - u[k - 1]) / (2.0 * h)
            };
            let gy = if j == 0 {
                (u[k + nx] - u[k]) / h
            } else if j == ny - 1 {
                (u[k] - u[k - nx]) / h
            } else {
                (u[k + nx] - u[k - nx]) / (2.0 * h)
            };
            0.5 * (self.m_same_2d[0] * gx * gx + self.m_same_2d[1] * gy * gy)
        }
    }

    fn add_same_cell_grad(&self, u: &[f64], mask: Option<&[bool]>, out: &mut [f64]) {
        if !self.gradient_model {
            return;
        }
        let h = self.grid.h;
        let in_mask = |k: usize| mask.map_or(true, |m| m[k]);
        if self.grid.dim == 1 {
            let n = self.grid.n[0];
            for c in 0..n {
                if !in_mask(c) {
                    continue;
                }
                if c == 0 {
                    let g = self.c_same_1d * (u[1] - u[0]) / (h * h);
                    out[1] += g;
                    out[0] -= g;
                } else if c == n - 1 {
                    let g = self.c_same_1d * (u[n - 1] - u[n - 2]) / (h * h);
                    out[n - 1] += g;
                    out[n - 2] -= g;
                } else {
                    let g = 0.5 * self.c_same_1d * (u[c + 1] - u[c - 1]) / (2.0 * h * h);
                    out[c + 1] += g;
                    out[c - 1] -= g;
                }
            }
        } else {
            let (nx, ny) = (self.grid.n[0], self.grid.n[1]);
            for c in 0..nx * ny {
                if !in_mask(c) {
                    continue;
                }
                let (i, j) = (c % nx, c / nx);
                // x direction
                if i == 0 {
                    let g = self.m_same_2d[0] * (u[c + 1] - u[c]) / (h * h);
                    out[c + 1] += g;
                    out[c] -= g;
                } else if i == nx - 1 {
                    let g = self.m_same_2d[0] * (u[c] - u[c - 1]) / (h * h);
                    out[c] += g;
                    out[c - 1] -= g;
                } else {
                    let g = 0.5 * self.m_same_2d[0] * (u[c + 1] - u[c - 1]) / (2.0 * h * h);
                    out[c + 1] += g;
                    out[c - 1] -= g;
                }
                // y direction
                if j == 0 {
                    let g = self.m_same_2d[1] * (u[c + nx] - u[c]) / (h * h);
                    out[c + nx] += g;
                    out[c] -= g;
                } else if j == ny - 1 {
                    let g = self.m_same_2d[1] * (u[c] - u[c - nx]) / (h * h);
                    out[c] += g;
                    out[c - nx] -= g;
                } else {
                    let g = 0.5 * self.m_same_2d[1] * (u[c + nx] - u[c - nx]) / (2.0 * h * h);
                    out[c + nx] += g;
                    out[c - nx] -= g;
                }
            }
        }
    }

    /// Discrete K(u, mask-region): sum over unordered cell pairs with at least
    /// one endpoint in the mask, plus same-cell and beyond-box tail terms of
    /// masked cells. `mask = None` means the whole box.
    pub fn gagliardo(&self, mask: Option<&[bool]>, u: &[f64], far: &FarField) -> f64 {
        let n = self.grid.num_nodes();
        let conv_u = self.pair_conv(u);
        let u2: Vec<f64> = u.iter().map(|v| v * v).collect();
        let conv_u2 = self.pair_conv(&u2);
        let ones = vec![1.0; n];
        let deg = self.pair_conv(&ones);
        let (deg_m, conv_um, conv_u2m);
        let (deg_m_ref, conv_um_ref, conv_u2m_ref) = if let Some(m) = mask {
            let mv: Vec<f64> = m.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
            let um: Vec<f64> = u.iter().zip(m.iter()).map(|(v, &b)| if b { *v } else { 0.0 }).collect();
            let u2m: Vec<f64> = u2.iter().zip(m.iter()).map(|(v, &b)| if b { *v } else { 0.0 }).collect();
            deg_m = self.pair_conv(&mv);
            conv_um = self.pair_conv(&um);
            conv_u2m = self.pair_conv(&u2m);
            (&deg_m, &conv_um, &conv_u2m)
        } else {
            (&deg, &conv_u, &conv_u2)
        };
        let in_mask = |k: usize| mask.map_or(true, |m| m[k]);
        let terms = (0..n).map(|k| {
            let q = if in_mask(k) {
                let pair = u[k] * u[k] * deg[k] - 2.0 * u[k] * conv_u[k] + conv_u2[k];
                let (te, _) = self.tail_terms(k, u[k], far);
                pair + 2.0 * (te + self.same_cell_energy(u, k))
            } else {
                u[k] * u[k] * deg_m_ref[k] - 2.0 * u[k] * conv_um_ref[k] + conv_u2m_ref[k]
            };
            0.5 * q
        });
        kahan_sum(terms)
    }

    /// Exact gradient of `gagliardo` with respect to nodal values.
    pub fn gagliardo_grad(&self, mask: Option<&[bool]>, u: &[f64], far: &FarField) -> Vec<f64> {
        let n = self.grid.num_nodes();
        let conv_u = self.pair_conv(u);
        let ones = vec![1.0; n];
        let deg = self.pair_conv(&ones);
        let (deg_m, conv_um);
        let (deg_m_ref, conv_um_ref) = if let Some(m) = mask {
            let mv: Vec<f64> = m.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
            let um: Vec<f64> = u.iter().zip(m.iter()).map(|(v, &b)| if b { *v } else { 0.0 }).collect();
            deg_m = self.pair_conv(&mv);
            conv_um = self.pair_conv(&um);
            (&deg_m, &conv_um)
        } else {
            (&deg, &conv_u)
        };
        let in_mask = |k: usize| mask.map_or(true, |m| m[k]);
        let mut out: Vec<f64> = (0..n)
            .map(|k| {
                if in_mask(k) {
                    let (_, tg) = self.tail_terms(k, u[k], far);
                    2.0 * (u[k] * deg[k] - conv_u[k]) + tg
                } else {
                    2.0 * (u[k] * deg_m_ref[k] - conv_um_ref[k])
                }
            })
            .collect();
        self.add_same_cell_grad(u, mask, &mut out);
        out
    }

    /// Diagonal curvature of the pair+tail energy (second derivative with
    /// respect to each nodal value); used as a preconditioner scale.
    pub fn diag_pair_curvature(&self, mask: Option<&[bool]>) -> Vec<f64> {
        let n = self.grid.num_nodes();
        let ones = vec![1.0; n];
        let deg = self.pair_conv(&ones);
        let deg_m = mask.map(|m| {
            let mv: Vec<f64> = m.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
            self.pair_conv(&mv)
        });
        (0..n)
            .map(|k| {
                let in_mask = mask.map_or(true, |m| m[k]);
                if in_mask {
                    let tails = if self.grid.dim == 1 {
                        self.tail_left[k] + self.tail_right[k]
                    } else {
                        self.tail2[k]
                    };
                    2.0 * (deg[k] + tails)
                } else {
                    2.0 * deg_m.as_ref().unwrap()[k].max(1e-300)
                }
            })
            .collect()
    }

    /// Discrete fractional Laplacian with the prefactor-2 convention:
    /// the gradient of the all-pairs energy divided by the cell measure.
    pub fn frac_laplacian(&self, field: &ScalarField) -> Vec<f64> {
        let cm = self.grid.cell_measure();
        self.gagliardo_grad(None, &field.values, &field.far)
            .into_iter()
            .map(|g| g / cm)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_grid, indicator, RegionSpec};
    use approx::assert_relative_eq;

    fn grid_1d(h: f64, r: f64) -> Grid {
        build_grid(&RegionSpec::interval(-1.0, 1.0), h, r).unwrap()
    }

    #[test]
    fn fft_conv_matches_direct() {
        let g = grid_1d(0.02, 4.0); // 400 cells, FFT path
        let st = NonlocalStencil::new(&g, 0.25).unwrap();
        let x: Vec<f64> = (0..g.num_nodes()).map(|k| ((k * 37) % 11) as f64 - 5.0).collect();
        let fft = st.pair_conv(&x);
        let n = g.num_nodes();
        for i in (0..n).step_by(53) {
            let direct: f64 = (0..n).map(|j| st.w1[i.abs_diff(j)] * x[j]).sum();
            assert_relative_eq!(fft[i], direct, max_relative = 1e-10, epsilon = 1e-12);
        }
    }

    #[test]
    fn constant_field_has_zero_energy_and_laplacian() {
        let g = grid_1d(0.05, 4.0);
        for s in [0.25, 0.5, 0.75] {
            let st = NonlocalStencil::new(&g, s).unwrap();
            let u = ScalarField::constant(&g, 0.7, 2.0);
            let omega = RegionSpec::interval(-1.0, 1.0);
            let mask = g.mask(&omega);
            let e = st.gagliardo(Some(&mask), &u.values, &u.far);
            assert!(e.abs() < 1e-12, "s={s}: K(const) = {e}");
            let fl = st.frac_laplacian(&u);
            assert!(fl.iter().all(|v| v.abs() < 1e-9), "s={s}");
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let g = grid_1d(0.25, 4.0); // small grid, direct path
        let omega = RegionSpec::interval(-1.0, 1.0);
        let mask = g.mask(&omega);
        for s in [0.3, 0.75] {
            let st = NonlocalStencil::new(&g, s).unwrap();
            let n = g.num_nodes();
            let mut u: Vec<f64> = (0..n).map(|k| (k as f64 * 0.7).sin()).collect();
            let far = FarField::OneD { left: -1.0, right: 1.0 };
            let grad = st.gagliardo_grad(Some(&mask), &u, &far);
            let e0 = st.gagliardo(Some(&mask), &u, &far);
            let du = 1e-6;
            for k in (0..n).step_by(5) {
                let old = u[k];
                u[k] = old + du;
                let ep = st.gagliardo(Some(&mask), &u, &far);
                u[k] = old - du;
                let em = st.gagliardo(Some(&mask), &u, &far);
                u[k] = old;
                let fd = (ep - em) / (2.0 * du);
                assert_relative_eq!(grad[k], fd, max_relative = 1e-5, epsilon = 1e-7);
                let _ = e0;
            }
        }
    }

    #[test]
    fn discrete_integration_by_parts() {
        // sum_x op(u)(x) v(x) h equals the symmetric bilinear form for
        // compactly supported v
        let g = grid_1d(0.1, 4.0);
        let st = NonlocalStencil::new(&g, 0.25).unwrap();
        let n = g.num_nodes();
        let u: Vec<f64> = (0..n).map(|k| (g.node(k)[0]).tanh()).collect();
        let far = FarField::OneD { left: -1.0, right: 1.0 };
        let uf = ScalarField::new(g.clone(), u.clone(), far, 2.0).unwrap();
        let fl = st.frac_laplacian(&uf);
        // v compactly supported in the box interior, zero far field
        let v: Vec<f64> = (0..n)
            .map(|k| {
                let x = g.node(k)[0];
                if x.abs() < 2.0 {
                    (1.0 - (x / 2.0) * (x / 2.0)).powi(2)
                } else {
                    0.0
                }
            })
            .collect();
        let lhs: f64 = (0..n).map(|k| fl[k] * v[k] * g.h).sum();
        // bilinear form: sum over unordered pairs 2 w (u_i-u_j)(v_i-v_j)
        // plus tail terms (v has zero far field)
        let mut rhs = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                rhs += 2.0 * st.w1[j - i] * (u[i] - u[j]) * (v[i] - v[j]);
            }
            rhs += 2.0 * st.tail_left[i] * (u[i] + 1.0) * v[i]
                + 2.0 * st.tail_right[i] * (u[i] - 1.0) * v[i];
        }
        assert_relative_eq!(lhs, rhs, max_relative = 1e-8, epsilon = 1e-10);
    }

    #[test]
    fn frac_laplacian_linearity() {
        let g = grid_1d(0.1, 4.0);
        let st = NonlocalStencil::new(&g, 0.35).unwrap();
        let n = g.num_nodes();
        let u: Vec<f64> = (0..n).map(|k| (g.node(k)[0] * 1.3).sin()).collect();
        let v: Vec<f64> = (0..n).map(|k| (g.node(k)[0] * 0.7).cos()).collect();
        let (alpha, beta) = (1.7, -0.4);
        let far0 = FarField::OneD { left: 0.0, right: 0.0 };
        let mk = |vals: Vec<f64>| ScalarField::new(g.clone(), vals, far0, f64::MAX).unwrap();
        let fu = st.frac_laplacian(&mk(u.clone()));
        let fv = st.frac_laplacian(&mk(v.clone()));
        let w: Vec<f64> = u.iter().zip(v.iter()).map(|(a, b)| alpha * a + beta * b).collect();
        let fw = st.frac_laplacian(&mk(w));
        for k in 0..n {
            assert_relative_eq!(fw[k], alpha * fu[k] + beta * fv[k], epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn indicator_laplacian_closed_form_tail() {
        // signed indicator of (0,inf): at x = 1, s = 1/4 the operator value is 8
        let omega = RegionSpec::interval(-1.0, 1.0);
        let g = build_grid(&omega, 0.005, 4.0).unwrap();
        let st = NonlocalStencil::new(&g, 0.25).unwrap();
        let e = RegionSpec::half_line_right(0.0);
        let u = indicator(&e, &g).unwrap();
        let fl = st.frac_laplacian(&u);
        let k = (0..g.num_nodes())
            .min_by(|&a, &b| {
                (g.node(a)[0] - 1.0)
                    .abs()
                    .partial_cmp(&(g.node(b)[0] - 1.0).abs())
                    .unwrap()
            })
            .unwrap();
        // nearest cell center sits h/2 away from x = 1, so allow O(h) slack
        assert_relative_eq!(fl[k], 8.0, max_relative = 3e-3);
    }

    #[test]
    fn odd_field_odd_laplacian() {
        let omega = RegionSpec::interval(-1.0, 1.0);
        let g = build_grid(&omega, 0.01, 4.0).unwrap();
        let st = NonlocalStencil::new(&g, 0.25).unwrap();
        let n = g.num_nodes();
        let vals: Vec<f64> = (0..n).map(|k| g.node(k)[0].tanh()).collect();
        let far = FarField::OneD { left: -1.0, right: 1.0 };
        let u = ScalarField::new(g.clone(), vals, far, 2.0).unwrap();
        let fl = st.frac_laplacian(&u);
        for k in 0..n / 2 {
            assert_relative_eq!(fl[k], -fl[n - 1 - k], epsilon = 1e-9);
        }
    }
}
