//! The identity from testing with `r^{β−1}φ`: on a solution, and the
//! obstruction on an iterate inside the nonexistence band.

use zeromass::green::{expdecay_init, fixed_point_solve, FixedPointOptions};
use zeromass::pohozaev::{identity_residual, obstruction};
use zeromass::scaling::phi_from_v;
use zeromass::Parameters;

fn main() -> zeromass::Result<()> {
    let q = Parameters::new(3, 1.0, 1.0, 4.0)?;
    let sol = fixed_point_solve(&q, &expdecay_init()?, FixedPointOptions::default())?;
    let phi = phi_from_v(&q, &sol.profile)?;
    let rep = identity_residual(&q, &phi, 0.1, 10.0)?;
    println!("p = 4 on [0.1, 10]: lhs {:.8} rhs {:.8} normalized residual {:.1e}", rep.lhs, rep.rhs, rep.normalized);

    let q = Parameters::new(3, 1.0, 1.0, 3.2)?;
    let it = fixed_point_solve(&q, &expdecay_init()?, FixedPointOptions::default())?;
    println!("p = 3.2 Picard: {:?}, v(t_min) = {:.3e}", it.status, it.profile.values[0]);
    let phi = phi_from_v(&q, &it.profile)?;
    println!("gamma1 = {:.5}, gamma2 = {:.5}", q.gamma1(), q.gamma2());
    for a in [1e-2, 1e-4] {
        let ob = obstruction(&q, &phi, a)?;
        println!(
            "a = {a:e}: lhs tail {:.4e}, F(a) {:.4e}, margin {:.4e}, b-limit gate {}",
            ob.lhs_tail, ob.f_a, ob.contradiction_margin, ob.boundary_limit.monotone
        );
    }
    Ok(())
}
