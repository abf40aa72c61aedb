//! Inside the band `2_α < p ≤ 2_α*` (N = 3, α = 1, p = 3.2) neither solver
//! produces a profile that passes every solution check.

use zeromass::checks::{check_solution, CheckTolerances};
use zeromass::green::{expdecay_init, fixed_point_solve, FixedPointOptions};
use zeromass::shooting::{scan_for_bracket, ShootingOptions};
use zeromass::Parameters;

fn main() -> zeromass::Result<()> {
    let q = Parameters::new(3, 1.0, 1.0, 3.2)?;
    let scan = scan_for_bracket(&q, 1e-3, 1e3, 25, &ShootingOptions::default())?;
    let classes: Vec<String> = scan.samples.iter().map(|(v0, c)| format!("{v0:.0e}:{c:?}")).collect();
    println!("shooting: {}", classes.join(" "));
    println!("bracket: {:?}", scan.bracket);

    let r = fixed_point_solve(&q, &expdecay_init()?, FixedPointOptions::default())?;
    println!("Picard: {:?}, |Tv - v| = {:.2e}", r.status, r.residual_sup);
    let rep = check_solution(&q, &r.profile, &CheckTolerances::default())?;
    println!("failed checks: {:?}", rep.failed);
    Ok(())
}
