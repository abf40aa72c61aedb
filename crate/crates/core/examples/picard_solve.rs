//! Fixed point of the Green's operator by stabilized Picard iteration.
//!
//! `cargo run --release --example picard_solve -- 5.5` picks another exponent.

use zeromass::checks::{check_solution, CheckTolerances};
use zeromass::green::{expdecay_init, fixed_point_solve, FixedPointOptions};
use zeromass::Parameters;

fn main() -> zeromass::Result<()> {
    let p: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4.0);
    let q = Parameters::new(3, 1.0, 1.0, p)?;
    let r = fixed_point_solve(&q, &expdecay_init()?, FixedPointOptions::default())?;
    println!("p = {p}: {:?} after {} iterations, |Tv - v| = {:.2e}", r.status, r.iterations, r.residual_sup);
    println!("v(t_min) = {:.10}", r.profile.values[0]);
    let report = check_solution(&q, &r.profile, &CheckTolerances::default())?;
    for o in &report.outcomes {
        println!("  {:<18} {:<5} {}", format!("{:?}", o.check), o.passed, o.detail);
    }
    Ok(())
}
