//! The command-line subcommands driven in-process.

use clap::Parser;
use zeromass::cli::{run, Cli};

fn main() -> zeromass::Result<()> {
    let dir = std::env::temp_dir();
    let params = dir.join("zeromass_p4.json");
    std::fs::write(&params, r#"{"N": 3, "A": 1, "alpha": 1, "p": 4}"#)?;
    let profile = dir.join("zeromass_p4.csv");
    let (pa, pr) = (params.to_str().unwrap(), profile.to_str().unwrap());
    let calls: Vec<Vec<&str>> = vec![
        vec!["bessel-eval", "--nu", "1", "--t", "0.5", "2"],
        vec!["solve", "--params", pa, "--out", pr],
        vec!["verify-asymptotics", "--params", pa, "--profile", pr],
        vec!["pohozaev-check", "--params", pa, "--profile", pr, "--a", "0.1", "--b", "10"],
        vec!["region-map", "--N", "3", "--alpha", "1", "--p", "3.2"],
    ];
    for args in calls {
        println!("$ zeromass {}", args.join(" "));
        let cli = Cli::parse_from(std::iter::once("zeromass").chain(args));
        run(cli)?;
    }
    Ok(())
}
