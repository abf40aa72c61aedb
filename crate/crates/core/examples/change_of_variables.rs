//! Constants of the Bessel form, the map `r = c t^m`, and membership of a
//! trial profile in the energy space.

use zeromass::profile::default_grid;
use zeromass::scaling::{derive_constants, membership_report, r_of_t, t_of_r};
use zeromass::{Parameters, VProfile};

fn main() -> zeromass::Result<()> {
    let q = Parameters::new(3, 1.0, 1.0, 4.0)?;
    println!("{}", serde_json::to_string_pretty(&derive_constants(&q))?);
    for r in [1e-3, 1.0, 25.0] {
        let t = t_of_r(&q, r)?;
        println!("r = {r:e} -> t = {t:e} -> r = {:e}", r_of_t(&q, t)?);
    }

    let trial = VProfile::from_fn(default_grid(), |t| (-t).exp(), |t| -(-t).exp())?;
    let m = membership_report(&q, &trial)?;
    println!("e^-t: in H {}, in L^p {}", m.in_h(), m.in_lp_r);
    println!("{}", serde_json::to_string_pretty(&m.norms)?);

    // t^-ν sits exactly on the edge of the weighted L² space
    let edge = VProfile::from_fn(default_grid(), |t| 1.0 / t, |t| -1.0 / (t * t))?;
    println!("1/t: in H {}", membership_report(&q, &edge)?.in_h());
    Ok(())
}
