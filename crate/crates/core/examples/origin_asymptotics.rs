//! Predicted and measured behavior at the origin, and the envelope constants.

use zeromass::asymptotics::{envelope_limit, predicted_origin_behavior, verify};
use zeromass::green::{expdecay_init, fixed_point_solve, FixedPointOptions};
use zeromass::Parameters;

fn main() -> zeromass::Result<()> {
    for (p, window) in [(4.0, (1e-5, 1e-4)), (5.0, (1e-6, 1e-4)), (5.5, (1e-4, 1e-3))] {
        let q = Parameters::new(3, 1.0, 1.0, p)?;
        let b = predicted_origin_behavior(&q)?;
        let lim = envelope_limit(&q, window.0, window.1, 9)?;
        println!(
            "p = {p}: {:?}, t-exponent {}, envelope limit {:.6} (predicted {:.6}, unextrapolated {:.6})",
            b.case, b.t_exponent, lim.measured, lim.predicted, lim.raw_at_t_hi
        );
    }

    // measured exponents of actual fixed points
    for p in [4.0, 5.5] {
        let q = Parameters::new(3, 1.0, 1.0, p)?;
        let sol = fixed_point_solve(&q, &expdecay_init()?, FixedPointOptions::default())?;
        let rep = verify(&q, &sol.profile)?;
        let m = rep.measured.as_ref().expect("positive profile");
        println!("p = {p}: measured {:?} exponent {:.4}, predicted {:.4}, pass {}", m.case, m.exponent, rep.predicted.t_exponent, rep.pass);
    }
    Ok(())
}
