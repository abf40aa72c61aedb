use std::time::Duration;

use clap::Parser;
use proptest::prelude::*;
use zeromass::cli::{run, Cli};
use zeromass::exact::{int, ratio};
use zeromass::region::{
    classify, classify_exact, curve_ordering_holds, scan_grid, Axis, Class, EvidenceStatus, ScanSpec, Source,
};

proptest! {
    #[test]
    fn classification_is_total_and_deterministic(dim in 3u32..9, a in 1i64..1600, pn in 201i64..2000) {
        let (alpha, p) = (ratio(a, 100), ratio(pn, 100));
        let first = classify_exact(dim, &alpha, &p).unwrap();
        prop_assert_eq!(&first, &classify_exact(dim, &alpha, &p).unwrap());
        if first.class == Class::Open {
            prop_assert!(first.source.is_none() || first.source == Some(Source::Boundary));
        } else {
            prop_assert!(first.source.is_some());
        }
    }

    #[test]
    fn curve_ordering(dim in 3u32..9, a in 1i64..1600) {
        let alpha = ratio(a, 100);
        prop_assert!(curve_ordering_holds(dim, &alpha));
    }

    #[test]
    fn float_and_exact_inputs_agree(a in 1i64..400, pn in 201i64..900) {
        let exact = classify_exact(3, &ratio(a, 100), &ratio(pn, 100)).unwrap();
        let float = classify(3, a as f64 / 100.0, pn as f64 / 100.0).unwrap();
        prop_assert_eq!(exact, float);
    }
}

#[test]
fn open_regions_are_exactly_the_unresolved_ones() {
    // 2 < α < N with 2_α* ≤ p < 2_α, and N ≤ α < 2N−2 with p ≥ 2_α*
    let n = 5u32;
    // α = 3: 2* = 10/3, 2_α* = 22/5, 2_α = 5
    assert_eq!(classify(n, 3.0, 3.2).unwrap().class, Class::Nonexistence);
    assert_eq!(classify(n, 3.0, 4.0).unwrap().class, Class::ExistenceRadial);
    assert_eq!(classify(n, 3.0, 4.5).unwrap().class, Class::Open);
    let edge = classify_exact(n, &int(3), &ratio(22, 5)).unwrap();
    assert_eq!((edge.class, edge.source), (Class::Open, Some(Source::Boundary)));
    assert_eq!(classify(n, 3.0, 5.0).unwrap().class, Class::Nonexistence);
    assert_eq!(classify(n, 6.0, 40.0).unwrap().class, Class::Open);
    assert_eq!(classify(n, 6.0, 5.0).unwrap().class, Class::ExistenceRadial);
    assert_eq!(classify(n, 9.0, 3.5).unwrap().class, Class::ExistenceRadial);
    assert_eq!(classify(n, 9.0, 3.0).unwrap().class, Class::Nonexistence);
}

#[test]
fn numerics_never_change_the_class() {
    let alpha = Axis(vec![ratio(1, 2), int(1), ratio(5, 2)]);
    let p = Axis(vec![ratio(16, 5), int(4), int(7)]);
    let plain = scan_grid(&ScanSpec::new(3, alpha.clone(), p.clone())).unwrap();
    let mut spec = ScanSpec::new(3, alpha, p);
    spec.with_numerics = true;
    let with = scan_grid(&spec).unwrap();
    assert_eq!(plain.cells, with.cells);
    let ev = with.evidence.unwrap();
    // α = 1, p = 4 has a verified candidate, α = 1, p = 3.2 has none
    assert_eq!(ev[1][1].status, EvidenceStatus::Agree);
    assert!(ev[1][1].verified);
    assert_eq!(ev[1][0].status, EvidenceStatus::Agree);
    assert!(!ev[1][0].verified);
    assert_eq!(ev[2][0].status, EvidenceStatus::Skipped);
}

#[test]
fn timed_out_cells_are_marked() {
    let mut spec = ScanSpec::new(3, Axis(vec![int(1)]), Axis(vec![int(4)]));
    spec.with_numerics = true;
    spec.cell_timeout = Duration::from_nanos(1);
    let map = scan_grid(&spec).unwrap();
    assert_eq!(map.timed_out(), 1);
    assert_eq!(map.cells[0][0].class, Class::ExistenceRadial);
}

#[test]
fn strict_exit_status() {
    let dir = std::env::temp_dir().join(format!("zeromass-strict-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("m.csv");
    let args = ["zeromass", "region-map", "--N", "3", "--alpha", "1", "--p", "4", "--with-numerics", "--cell-timeout", "1e-9", "--strict", "--out"];
    let cli = Cli::parse_from(args.iter().copied().chain([out.to_str().unwrap()]));
    assert_eq!(run(cli).unwrap(), 2);
    assert!(out.exists() && dir.join("m.json").exists());

    let args = ["zeromass", "region-map", "--N", "3", "--alpha", "0:2:0.5", "--p", "2:4:1"];
    assert_eq!(run(Cli::parse_from(args)).unwrap(), 0);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn config_file_mirrors_flags() {
    let dir = std::env::temp_dir().join(format!("zeromass-config-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (cfg, out, svg) = (dir.join("c.json"), dir.join("map.csv"), dir.join("map.svg"));
    let body = serde_json::json!({"N": 3, "alpha": "0:4:0.5", "p": "2:8:1", "out": out, "svg": svg});
    std::fs::write(&cfg, body.to_string()).unwrap();
    assert_eq!(run(Cli::parse_from(["zeromass", "region-map", "--config", cfg.to_str().unwrap()])).unwrap(), 0);
    let csv = std::fs::read_to_string(&out).unwrap();
    // α = 0 and p = 2 are dropped: 8 α values, 6 p values
    assert_eq!(csv.lines().count(), 1 + 8 * 6);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("</svg>"));
    std::fs::remove_dir_all(dir).unwrap();
}
