// scratch diagnostic: where does the mass-constrained descent really land?
use fracperim::domain::{build_grid, MassConstraint, RegionSpec};
use fracperim::optimize::{canonical_inits, minimize_f_eps_mass, FieldSolveOptions};

fn main() {
    let omega = RegionSpec::interval(-1.0, 1.0);
    let grid = build_grid(&omega, 0.01, 4.0).unwrap();
    let s = 0.25;
    let m = 0.3;
    let constraint = MassConstraint::new(m, 2.0, 1e-10).unwrap();
    let opts = FieldSolveOptions { tol: 5e-7, max_iter: 50_000, trace_every: 4000 };
    let inits = canonical_inits(&grid, &omega, m, 2.0).unwrap();
    for (name, init) in &inits {
        let t0 = std::time::Instant::now();
        match minimize_f_eps_mass(&omega, s, 0.1, &constraint, 2.0, &grid, init, &opts) {
            Ok(r) => {
                for row in &r.trace {
                    println!(
                        "  it={:<7} E={:.9} res={:.3e} lambda={:+.5e}",
                        row.iter, row.energy, row.residual, row.lambda
                    );
                }
                let probe: Vec<f64> = [-0.9f64, -0.5, -0.15, 0.0, 0.5, 0.9]
                    .iter()
                    .map(|&x| {
                        let k = (0..grid.num_nodes())
                            .min_by(|&a, &b| {
                                (grid.node(a)[0] - x)
                                    .abs()
                                    .partial_cmp(&(grid.node(b)[0] - x).abs())
                                    .unwrap()
                            })
                            .unwrap();
                        r.field.values[k]
                    })
                    .collect();
                println!(
                    "[{name}] it={} conv={} res={:.3e} E={:.9} lambda={:+.5e} u={:?} t={:.1}s",
                    r.iterations,
                    r.converged,
                    r.stationarity_residual,
                    r.energy.total,
                    r.lambda_eps.unwrap(),
                    probe.iter().map(|v| (v * 1000.0).round() / 1000.0).collect::<Vec<_>>(),
                    t0.elapsed().as_secs_f64()
                );
            }
            Err(e) => println!("[{name}] ERROR: {e}"),
        }
    }
}
