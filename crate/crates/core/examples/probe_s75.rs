// scratch: s = 0.75 mass sweep (interface regime) + profile quality
use fracperim::domain::{build_grid, MassConstraint, RegionSpec};
use fracperim::operator::{estimate_cstar, solve_profile_with_tol};
use fracperim::optimize::{minimize_f_eps_mass_multistart, FieldSolveOptions};

fn main() {
    let t0 = std::time::Instant::now();
    let prof = solve_profile_with_tol(0.75, 20.0, 0.02, 1e-8).unwrap();
    println!("profile s=0.75: {} pts in {:.1}s, decay_c={:.4}, u0(0)={:.2e}, u0(1)={:.4}, u0(5)={:.4}",
        prof.t.len(), t0.elapsed().as_secs_f64(), prof.decay_c, prof.eval(0.0), prof.eval(1.0), prof.eval(5.0));
    // monotonicity check
    let mono = prof.values.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    println!("monotone: {mono}");

    let t1 = std::time::Instant::now();
    let cs = estimate_cstar(0.75, &prof, 0.0025).unwrap();
    println!("cstar rows: {:?}", cs.rows.iter().map(|r| (r.eps, (r.f_eps * 1e4).round() / 1e4)).collect::<Vec<_>>());
    println!("cstar = {:.5}  [{:.1}s]", cs.c_star, t1.elapsed().as_secs_f64());

    // mass sweep at s=0.75, m=0, h=0.005
    let omega = RegionSpec::interval(-1.0, 1.0);
    let grid = build_grid(&omega, 0.005, 4.0).unwrap();
    let constraint = MassConstraint::new(0.0, 2.0, 1e-10).unwrap();
    let opts = FieldSolveOptions { tol: 5e-7, max_iter: 50_000, trace_every: 0 };
    for eps in [0.1, 0.05, 0.025, 0.0125] {
        let t2 = std::time::Instant::now();
        match minimize_f_eps_mass_multistart(&omega, 0.75, eps, &constraint, 2.0, &grid, &opts) {
            Ok(r) => {
                // interface? look at sign structure
                let neg = r.field.values.iter().filter(|&&v| v < -0.5).count();
                let pos = r.field.values.iter().filter(|&&v| v > 0.5).count();
                println!("eps={eps:<7} it={:<6} conv={} F={:.6} lambda={:+.3e} mu={:+.3e} (pos {pos} neg {neg}) [{:.1}s]",
                    r.iterations, r.converged, r.energy.total, r.lambda_eps.unwrap(), r.mu_eps.unwrap(), t2.elapsed().as_secs_f64());
            }
            Err(e) => println!("eps={eps}: ERROR {e}"),
        }
    }
}
