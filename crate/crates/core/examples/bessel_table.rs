//! I_ν and K_ν on a small table, with the Wronskian check
//! `t(I_ν K_{ν+1} + K_ν I_{ν+1}) = 1`.

use zeromass::bessel::{eval_i, eval_k, evaluate};

fn main() -> zeromass::Result<()> {
    println!("{:>5} {:>8} {:>14} {:>14} {:>10} {:>9}", "nu", "t", "I", "K", "wronsk-1", "regime");
    for nu in [0.3, 1.0, 1.5, 4.0] {
        for t in [0.01, 1.0, 10.0, 50.0] {
            let e = evaluate(nu, t)?;
            let w = t * (eval_i(nu, t)? * eval_k(nu + 1.0, t)? + eval_k(nu, t)? * eval_i(nu + 1.0, t)?) - 1.0;
            println!("{nu:>5} {t:>8} {:>14.6e} {:>14.6e} {w:>10.1e} {:?}", e.i_value, e.k_value, e.regime);
        }
    }
    Ok(())
}
