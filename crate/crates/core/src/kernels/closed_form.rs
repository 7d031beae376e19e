//! Closed-form 1D kernel integrals.
//!
//! Everything reduces to second antiderivatives evaluated at interval-endpoint
//! differences: with G'' = -r^{-1-2s},
//!     L((a1,a2),(b1,b2)) = G(b1-a1) - G(b1-a2) - G(b2-a1) + G(b2-a2)
//! for a2 <= b1, and the infinite-endpoint limits drop the vanishing pairs.
//! The same combination with P'' = -r^{1-2s} gives the first-order (gradient
//! model) moments used near the diagonal when s >= 1/2.

/// Second antiderivative for the kernel r^{-1-2s}:
/// G(r) = r^{1-2s} / (2s(1-2s)), with the logarithmic form at s = 1/2.
/// G(0) is 0 for s < 1/2 and -inf otherwise (touching integrals diverge).
pub fn g_antideriv(r: f64, s: f64) -> f64 {
    debug_assert!(r >= 0.0);
    if s == 0.5 {
        return r.ln(); // ln(0) = -inf encodes the divergence
    }
    let e = 1.0 - 2.0 * s;
    if r == 0.0 {
        return if e > 0.0 { 0.0 } else { f64::NEG_INFINITY };
    }
    r.powf(e) / (2.0 * s * e)
}

/// Second antiderivative for the exponent r^{1-2s} (finite for all s in (0,1)):
/// P(r) = -r^{3-2s} / ((2-2s)(3-2s)).
pub fn p_antideriv(r: f64, s: f64) -> f64 {
    debug_assert!(r >= 0.0);
    -r.powf(3.0 - 2.0 * s) / ((2.0 - 2.0 * s) * (3.0 - 2.0 * s))
}

/// Interaction of two disjoint finite-or-infinite intervals,
/// integral over (a1,a2) x (b1,b2) of |x-y|^{-1-2s}.
/// Divergent combinations come back as +inf.
pub fn interval_pair(mut a1: f64, mut a2: f64, mut b1: f64, mut b2: f64, s: f64) -> f64 {
    // order so that A is on the left
    if b1 < a1 {
        std::mem::swap(&mut a1, &mut b1);
        std::mem::swap(&mut a2, &mut b2);
    }
    debug_assert!(a2 <= b1 + 1e-15 * b1.abs().max(1.0), "intervals overlap");
    let g = |r: f64| g_antideriv(r.max(0.0), s);
    match (a1.is_infinite(), b2.is_infinite()) {
        (false, false) => g(b1 - a1) - g(b1 - a2) - g(b2 - a1) + g(b2 - a2),
        (true, false) => g(b2 - a2) - g(b1 - a2),
        (false, true) => g(b1 - a1) - g(b1 - a2),
        (true, true) => {
            // both half-lines: finite only when the kernel tails decay fast enough
            if s > 0.5 {
                -g(b1 - a2)
            } else {
                f64::INFINITY
            }
        }
    }
}

/// Pair moment between touching/nearby 1D cells for the gradient model:
/// integral over (0,h) x (dh, (d+1)h) of |x-y|^{1-2s}.
pub fn p_pair_moment(h: f64, d: usize, s: f64) -> f64 {
    let p = |r: f64| p_antideriv(r.max(0.0), s);
    let d = d as f64;
    2.0 * p(d * h) - p((d - 1.0).max(0.0) * h) - p((d + 1.0) * h)
}

/// Same-cell moment, integral over (0,h)^2 of |x-y|^{1-2s}.
pub fn p_same_cell(h: f64, s: f64) -> f64 {
    2.0 * h.powf(3.0 - 2.0 * s) / ((2.0 - 2.0 * s) * (3.0 - 2.0 * s))
}

/// Exact single integral of the kernel over a cell, evaluated at an outside
/// point x: integral over (a,b) of |x-y|^{-1-2s} dy, x not in [a,b].
pub fn cell_point_weight(x: f64, a: f64, b: f64, s: f64) -> f64 {
    // antiderivative of (x-y)^{-1-2s} in y is (x-y)^{-2s}/(2s) for y < x
    let inv2s = 1.0 / (2.0 * s);
    if x >= b {
        ((x - b).powf(-2.0 * s) - (x - a).powf(-2.0 * s)) * inv2s
    } else {
        debug_assert!(x <= a);
        ((a - x).powf(-2.0 * s) - (b - x).powf(-2.0 * s)) * inv2s
    }
}
