//! Shooting from the origin: classify trajectories, find a bracket, bisect,
//! and compare the candidate with the Picard fixed point.

use zeromass::green::{apply_operator, expdecay_init, fixed_point_solve, FixedPointOptions};
use zeromass::shooting::{find_ground_state, integrate_v, scan_for_bracket, ShootingOptions};
use zeromass::Parameters;

fn main() -> zeromass::Result<()> {
    let q = Parameters::new(3, 1.0, 1.0, 4.0)?;
    let opts = ShootingOptions::default();
    for v0 in [0.1, 2.0, 3.0, 50.0] {
        let tr = integrate_v(&q, v0, &opts)?;
        println!("v0 = {v0:>5}: {:?} (event at {:?})", tr.classification, tr.event_t);
    }

    let scan = scan_for_bracket(&q, 1e-3, 1e3, 13, &opts)?;
    let bracket = scan.bracket.expect("p = 4 has a bracket");
    println!("bracket {bracket:?}");
    let gs = find_ground_state(&q, bracket, &opts)?.expect("bisection gives a candidate");
    println!("v0* = {:.12} after {} steps, trajectories agree up to t = {:.2}", gs.v0, gs.bisection_steps, gs.separation_t);

    let tv = apply_operator(&q, &gs.profile)?;
    println!("|Tv - v| on [0.01, 10]: {:.2e}", gs.profile.sup_distance(&tv, 0.01, 10.0)?);
    let picard = fixed_point_solve(&q, &expdecay_init()?, FixedPointOptions::default())?;
    println!("shooting vs Picard on [0.05, 10]: {:.2e}", gs.profile.sup_distance(&picard.profile, 0.05, 10.0)?);
    Ok(())
}
