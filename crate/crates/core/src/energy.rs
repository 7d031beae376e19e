//! The energy zoo: the double-well potential, scaling constants, Massari
//! functionals (classical and fractional), and the rescaled Allen-Cahn
//! energies with forcing and multiplier terms.

use crate::domain::{measure, Grid, RegionSpec, ScalarField};
use crate::error::{invalid, Result};
use crate::kernels::{classical_perimeter, frac_perimeter, gagliardo_k, KernelParams};

/// Model double-well potential W(t) = (1/4)(1-t^2)^2, wells at +-1.
/// Evaluation returns (W, W', W'').
pub fn potential_w(t: f64) -> (f64, f64, f64) {
    let q = 1.0 - t * t;
    (0.25 * q * q, -t * q, 3.0 * t * t - 1.0)
}

/// Volume of the unit ball in R^{n-1}; omega_0 = 1 by convention.
pub fn unit_ball_volume_nm1(n: usize) -> f64 {
    match n {
        1 => 1.0,
        2 => 2.0,
        _ => panic!("dimension must be 1 or 2"),
    }
}

/// The energy rescale factor kappa_eps separating the scaling regimes.
pub fn kappa_eps(s: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return invalid(format!("eps = {eps} outside (0,1)"));
    }
    if !(s > 0.0 && s < 1.0) {
        return invalid(format!("s = {s} outside (0,1)"));
    }
    Ok(if s < 0.5 {
        eps.powf(-2.0 * s)
    } else if s == 0.5 {
        1.0 / (eps * eps.ln()).abs()
    } else {
        1.0 / eps
    })
}

/// Forcing normalization constant c_{n,s}.
pub fn c_ns(s: f64, n: usize) -> f64 {
    if s < 0.5 {
        1.0 / (2.0 * (1.0 - 2.0 * s))
    } else {
        1.0 / (2.0 * unit_ball_volume_nm1(n))
    }
}

/// Scaling regime of the rescaled Allen-Cahn energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingRegime {
    SubHalf,
    Half,
    SuperHalf,
}

impl ScalingRegime {
    pub fn of(s: f64) -> Self {
        if s < 0.5 {
            ScalingRegime::SubHalf
        } else if s == 0.5 {
            ScalingRegime::Half
        } else {
            ScalingRegime::SuperHalf
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ScalingRegime::SubHalf => "sub-half",
            ScalingRegime::Half => "half",
            ScalingRegime::SuperHalf => "super-half",
        }
    }
}

/// Oscillatory microscopic forcing g, evaluated pointwise.
#[derive(Debug, Clone, PartialEq)]
pub enum ForcingProfile {
    Constant(f64),
    /// g(x) = amp * cos(2 pi x . dir / period) + mean
    Cosine { amp: f64, period: f64, mean: f64 },
}

impl ForcingProfile {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            ForcingProfile::Constant(c) => *c,
            ForcingProfile::Cosine { amp, period, mean } => {
                mean + amp * (2.0 * std::f64::consts::PI * x[0] / period).cos()
            }
        }
    }
}

/// Forcing specification: either the macroscopic limit H directly (the
/// microscopic g is then implicitly eps-dependent), or a fixed bounded g
/// whose rescaled H_eps(x) = 2 kappa_eps g(x/eps) is *assumed* to converge
/// to H in L1; that assumption is checked numerically along sweeps.
#[derive(Debug, Clone, PartialEq)]
pub enum ForcingSpec {
    /// H_eps == H for every eps.
    MacroscopicConstant(f64),
    /// H_eps(x) = 2 kappa_eps g(x/eps).
    Microscopic { g: ForcingProfile, limit_h: f64 },
}

impl ForcingSpec {
    pub fn none() -> Self {
        ForcingSpec::MacroscopicConstant(0.0)
    }

    /// Pointwise H_eps.
    pub fn h_eps(&self, x: &[f64], s: f64, eps: f64) -> Result<f64> {
        Ok(match self {
            ForcingSpec::MacroscopicConstant(h) => *h,
            ForcingSpec::Microscopic { g, .. } => {
                let scaled: Vec<f64> = x.iter().map(|v| v / eps).collect();
                2.0 * kappa_eps(s, eps)? * g.eval(&scaled)
            }
        })
    }

    pub fn limit_h(&self) -> f64 {
        match self {
            ForcingSpec::MacroscopicConstant(h) => *h,
            ForcingSpec::Microscopic { limit_h, .. } => *limit_h,
        }
    }

    /// L1(Omega) distance between H_eps and the limit H on a grid; the
    /// paper's convergence hypothesis, reported along sweeps.
    pub fn l1_defect(&self, omega: &RegionSpec, grid: &Grid, s: f64, eps: f64) -> Result<f64> {
        let mask = grid.mask(omega);
        let h = self.limit_h();
        let cm = grid.cell_measure();
        let mut acc = 0.0;
        for k in 0..grid.num_nodes() {
            if mask[k] {
                let p = grid.node(k);
                acc += (self.h_eps(&p[..grid.dim], s, eps)? - h).abs() * cm;
            }
        }
        Ok(acc)
    }
}

/// Itemized energy report. The items are the additive pieces of the
/// requested total (already carrying their kappa_eps rescale), so
/// total = gagliardo + potential + forcing + multiplier_term always holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub gagliardo: f64,
    pub potential: f64,
    pub forcing: f64,
    pub multiplier_term: f64,
    pub regime: ScalingRegime,
    pub total: f64,
}

impl EnergyBreakdown {
    fn close(mut self) -> Self {
        self.total = self.gagliardo + self.potential + self.forcing + self.multiplier_term;
        self
    }
}

/// Fractional Massari functional Per_s(E,Ω) + (1-2s)^{-1} int_{Ω∩E} H.
pub fn massari_fractional(
    e: &RegionSpec,
    omega: &RegionSpec,
    s: f64,
    forcing_h: f64,
    window: &Grid,
) -> Result<f64> {
    let params = KernelParams::new(s, omega.dim())?;
    params.require_perimeter_range()?;
    let per = frac_perimeter(e, omega, &params, window)?;
    let vol = intersection_measure(e, omega, window)?;
    Ok(per + forcing_h * vol / (1.0 - 2.0 * s))
}

/// Classical Massari functional Per(E,Ω) + omega_{n-1}^{-1} int_{Ω∩E} H.
pub fn massari_classical(
    e: &RegionSpec,
    omega: &RegionSpec,
    forcing_h: f64,
    window: &Grid,
) -> Result<f64> {
    let per = classical_perimeter(e, omega)?;
    let vol = intersection_measure(e, omega, window)?;
    Ok(per + forcing_h * vol / unit_ball_volume_nm1(omega.dim()))
}

/// Which perimeter the alternative formulation uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PerimeterKind {
    Fractional(f64),
    Classical,
}

/// Alternative Massari formulation on signed indicators:
/// Per + c int_Ω (chi_E - chi_{E^c}) H with c = 1/(2(1-2s)) resp. 1/(2 w_{n-1}).
pub fn script_p(
    e: &RegionSpec,
    omega: &RegionSpec,
    kind: PerimeterKind,
    forcing_h: f64,
    window: &Grid,
) -> Result<f64> {
    let vol_in = intersection_measure(e, omega, window)?;
    let vol_omega = measure(omega, Some(window))
        .or_else(|_| measure(omega, None))?;
    let signed = 2.0 * vol_in - vol_omega; // int_Ω (chi_E - chi_{E^c})
    match kind {
        PerimeterKind::Fractional(s) => {
            let params = KernelParams::new(s, omega.dim())?;
            params.require_perimeter_range()?;
            let per = frac_perimeter(e, omega, &params, window)?;
            Ok(per + forcing_h * signed / (2.0 * (1.0 - 2.0 * s)))
        }
        PerimeterKind::Classical => {
            let per = classical_perimeter(e, omega)?;
            Ok(per + forcing_h * signed / (2.0 * unit_ball_volume_nm1(omega.dim())))
        }
    }
}

fn intersection_measure(e: &RegionSpec, omega: &RegionSpec, window: &Grid) -> Result<f64> {
    if e.dim() == 1 {
        let ie = e.as_intervals()?;
        let io = omega.as_intervals()?;
        let inter = crate::domain::intersect_intervals(&ie, &io);
        Ok(crate::domain::intervals_total_len(&inter))
    } else {
        // cell counting within the window (omega is bounded and inside)
        let me = window.mask(e);
        let mo = window.mask(omega);
        let cnt = me.iter().zip(mo.iter()).filter(|(&a, &b)| a && b).count();
        Ok(cnt as f64 * window.cell_measure())
    }
}

/// Rescaled fractional Allen-Cahn energy
/// F_eps = kappa_eps (eps^{2s} K(u,Ω) + int_Ω W(u)).
pub fn allen_cahn_f_eps(
    u: &ScalarField,
    omega: &RegionSpec,
    s: f64,
    eps: f64,
    bound_m: f64,
) -> Result<EnergyBreakdown> {
    if !u.admissible_in(omega) {
        return invalid(format!("field violates the X_M bound M = {bound_m} on Omega"));
    }
    let kap = kappa_eps(s, eps)?;
    let k = gagliardo_k(u, omega, s)?;
    let mask = u.grid.mask(omega);
    let cm = u.grid.cell_measure();
    let pot: f64 = u
        .values
        .iter()
        .zip(mask.iter())
        .filter(|(_, &m)| m)
        .map(|(v, _)| potential_w(*v).0 * cm)
        .sum();
    Ok(EnergyBreakdown {
        gagliardo: kap * eps.powf(2.0 * s) * k,
        potential: kap * pot,
        forcing: 0.0,
        multiplier_term: 0.0,
        regime: ScalingRegime::of(s),
        total: 0.0,
    }
    .close())
}

/// Total perturbed energy E_eps = F_eps + c_{n,s} int_Ω H_eps u.
pub fn total_e_eps(
    u: &ScalarField,
    omega: &RegionSpec,
    s: f64,
    eps: f64,
    forcing: &ForcingSpec,
    bound_m: f64,
) -> Result<EnergyBreakdown> {
    let mut bd = allen_cahn_f_eps(u, omega, s, eps, bound_m)?;
    let mask = u.grid.mask(omega);
    let cm = u.grid.cell_measure();
    let c = c_ns(s, u.grid.dim);
    let mut acc = 0.0;
    for k in 0..u.grid.num_nodes() {
        if mask[k] {
            let p = u.grid.node(k);
            acc += forcing.h_eps(&p[..u.grid.dim], s, eps)? * u.values[k] * cm;
        }
    }
    bd.forcing = c * acc;
    Ok(bd.close())
}

/// Multiplier-perturbed energy G_eps = F_eps + mu_eps int_Ω u.
pub fn total_g_eps(
    u: &ScalarField,
    omega: &RegionSpec,
    s: f64,
    eps: f64,
    mu_eps: f64,
    bound_m: f64,
) -> Result<EnergyBreakdown> {
    let mut bd = allen_cahn_f_eps(u, omega, s, eps, bound_m)?;
    bd.multiplier_term = mu_eps * u.integral_over(omega);
    Ok(bd.close())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_grid, indicator};
    use approx::assert_relative_eq;

    #[test]
    fn potential_wells() {
        assert_eq!(potential_w(1.0), (0.0, 0.0, 2.0));
        assert_eq!(potential_w(-1.0), (0.0, 0.0, 2.0));
        let (w, dw, ddw) = potential_w(0.0);
        assert_relative_eq!(w, 0.25);
        assert_relative_eq!(dw, 0.0);
        assert_relative_eq!(ddw, -1.0);
    }

    #[test]
    fn kappa_branches() {
        assert_relative_eq!(kappa_eps(0.25, 0.1).unwrap(), 10f64.powf(0.5), epsilon = 1e-12);
        assert_relative_eq!(
            kappa_eps(0.5, 0.1).unwrap(),
            1.0 / (0.1 * 10f64.ln()),
            epsilon = 1e-12
        );
        assert_relative_eq!(kappa_eps(0.75, 0.1).unwrap(), 10.0, epsilon = 1e-12);
        assert!(kappa_eps(0.25, 1.0).is_err());
        assert!(kappa_eps(0.25, -0.1).is_err());
    }

    #[test]
    fn c_ns_values() {
        assert_relative_eq!(c_ns(0.25, 1), 1.0);
        assert_relative_eq!(c_ns(0.75, 2), 0.25);
        assert_relative_eq!(c_ns(0.75, 1), 0.5);
    }

    #[test]
    fn massari_examples() {
        let omega = RegionSpec::interval(-1.0, 1.0);
        let w = build_grid(&omega, 0.05, 4.0).unwrap();
        let e = RegionSpec::half_line_right(0.0);
        let s = 0.25;
        let params = KernelParams::new(s, 1).unwrap();
        let per = frac_perimeter(&e, &omega, &params, &w).unwrap();
        // H == 0 reduces to the perimeter
        assert_relative_eq!(massari_fractional(&e, &omega, s, 0.0, &w).unwrap(), per);
        // empty set gives zero
        assert_relative_eq!(
            massari_fractional(&RegionSpec::empty(1), &omega, s, 0.0, &w).unwrap(),
            0.0
        );
        // H == 1: prefactor 1/(1-2s) = 2 on |Ω∩E| = 1
        assert_relative_eq!(
            massari_fractional(&e, &omega, s, 1.0, &w).unwrap(),
            per + 2.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn massari_classical_examples() {
        let omega = RegionSpec::interval(-1.0, 1.0);
        let w = build_grid(&omega, 0.05, 4.0).unwrap();
        let hval = 0.6;
        for t in [-0.5, 0.0, 0.7] {
            let e = RegionSpec::half_line_right(t);
            assert_relative_eq!(
                massari_classical(&e, &omega, hval, &w).unwrap(),
                1.0 + hval * (1.0 - t),
                epsilon = 1e-12
            );
        }
        // boundary outside Omega: no jump counted
        let e = RegionSpec::half_line_right(-1.5);
        assert_relative_eq!(
            massari_classical(&e, &omega, hval, &w).unwrap(),
            hval * 2.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn script_p_identity_and_symmetry() {
        // script_P - massari = -(1/(2(1-2s))) int_Ω H, independent of E
        let omega = RegionSpec::interval(-1.0, 1.0);
        let w = build_grid(&omega, 0.05, 4.0).unwrap();
        let s = 0.25;
        let hval = -0.75;
        let expected = -hval * 2.0 / (2.0 * (1.0 - 2.0 * s));
        for e in [
            RegionSpec::half_line_right(0.2),
            RegionSpec::interval(-0.4, 0.1),
            RegionSpec::empty(1),
        ] {
            let sp = script_p(&e, &omega, PerimeterKind::Fractional(s), hval, &w).unwrap();
            let mf = massari_fractional(&e, &omega, s, hval, &w).unwrap();
            assert_relative_eq!(sp - mf, expected, epsilon = 1e-10);
        }
        // script_P_s^H(E) = script_P_s^{-H}(E^c)
        let e = RegionSpec::interval(-0.3, 0.4);
        let a = script_p(&e, &omega, PerimeterKind::Fractional(s), hval, &w).unwrap();
        let b = script_p(&e.complement(), &omega, PerimeterKind::Fractional(s), -hval, &w).unwrap();
        assert_relative_eq!(a, b, epsilon = 1e-10);
    }

    #[test]
    fn f_eps_constants_and_indicator() {
        let omega = RegionSpec::interval(-1.0, 1.0);
        let g = build_grid(&omega, 0.01, 4.0).unwrap();
        let u1 = ScalarField::constant(&g, 1.0, 2.0);
        let bd = allen_cahn_f_eps(&u1, &omega, 0.25, 0.1, 2.0).unwrap();
        assert!(bd.total.abs() < 1e-12);
        let u0 = ScalarField::constant(&g, 0.0, 2.0);
        let bd0 = allen_cahn_f_eps(&u0, &omega, 0.25, 0.1, 2.0).unwrap();
        let kap = kappa_eps(0.25, 0.1).unwrap();
        assert_relative_eq!(bd0.total, kap * 2.0 / 4.0, max_relative = 1e-12);
        // signed indicator at s < 1/2: gagliardo item equals K(u,Ω) exactly
        let e = RegionSpec::half_line_right(0.0);
        let u = indicator(&e, &g).unwrap();
        let bd2 = allen_cahn_f_eps(&u, &omega, 0.25, 0.1, 2.0).unwrap();
        let k = gagliardo_k(&u, &omega, 0.25).unwrap();
        assert_relative_eq!(bd2.gagliardo, k, max_relative = 1e-13);
        assert_eq!(bd2.regime, ScalingRegime::SubHalf);
    }

    #[test]
    fn e_eps_and_g_eps_itemization() {
        let omega = RegionSpec::interval(-1.0, 1.0);
        let g = build_grid(&omega, 0.02, 4.0).unwrap();
        let u = ScalarField::constant(&g, 1.0, 2.0);
        let s = 0.25;
        let eps = 0.1;
        let hconst = 0.8;
        let forcing = ForcingSpec::MacroscopicConstant(hconst);
        let bd = total_e_eps(&u, &omega, s, eps, &forcing, 2.0).unwrap();
        assert_relative_eq!(bd.forcing, c_ns(s, 1) * hconst * 2.0, max_relative = 1e-12);
        assert_relative_eq!(bd.total, bd.gagliardo + bd.potential + bd.forcing, epsilon = 1e-14);
        // sign flip of u changes only the forcing term, by -2 c int H u
        let mu = ScalarField::constant(&g, -1.0, 2.0);
        let bdm = total_e_eps(&mu, &omega, s, eps, &forcing, 2.0).unwrap();
        assert_relative_eq!(bdm.total - bd.total, -2.0 * bd.forcing, epsilon = 1e-12);
        // multiplier term
        let bg = total_g_eps(&u, &omega, s, eps, 0.3, 2.0).unwrap();
        assert_relative_eq!(bg.multiplier_term, 0.6, max_relative = 1e-12);
        let z = ScalarField::constant(&g, 0.0, 2.0);
        let bz = total_g_eps(&z, &omega, s, eps, 0.3, 2.0).unwrap();
        assert_relative_eq!(bz.multiplier_term, 0.0);
    }
}
