//! The `(α, p)` map for N = 3 as CSV, JSON sidecar and SVG.
//!
//! Writes into the directory given as the first argument (default: temp dir).

use std::path::PathBuf;

use zeromass::exact::int;
use zeromass::region::{render_svg, save_csv, scan_grid, sidecar, Axis, Class, ScanSpec};

fn main() -> zeromass::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let spec = ScanSpec::new(3, Axis::centers(&int(0), &int(4), 50)?, Axis::centers(&int(2), &int(8), 50)?);
    let map = scan_grid(&spec)?;
    for c in Class::ALL {
        println!("{c:?}: {}", map.count(c));
    }
    let side = sidecar(&map, "(0,4)/50", "(2,8)/50", &spec);
    save_csv(&map, dir.join("region_map.csv"), &side)?;
    std::fs::write(dir.join("region_map.svg"), render_svg(&map)?)?;
    println!("wrote {}", dir.join("region_map.{csv,json,svg}").display());
    Ok(())
}
