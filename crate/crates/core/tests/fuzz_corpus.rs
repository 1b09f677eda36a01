//! Replays the checked-in fuzz seeds through the same invariants as the
//! fuzz targets, so the corpus stays exercised on stable toolchains.

use std::path::PathBuf;

use rayprod_core::cdf::GammaLaguerreModel;
use rayprod_core::interface::{parse_dims, parse_grid, parse_rate, MAX_GRID_POINTS};
use rayprod_core::montecarlo::{decode_samples, encode_samples};

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            (
                path.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&path).unwrap(),
            )
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn parse_dims_seeds() {
    let mut accepted = 0;
    for (_, data) in seeds("parse_dims") {
        let Ok(text) = std::str::from_utf8(&data) else {
            continue;
        };
        if let Ok(config) = parse_dims(text) {
            assert!(config.dims().iter().all(|&k| k >= 1));
            assert_eq!(parse_dims(&config.to_string()).unwrap(), config);
            accepted += 1;
        }
    }
    assert!(accepted >= 3);
}

#[test]
fn parse_grid_seeds() {
    let mut accepted = 0;
    for (_, data) in seeds("parse_grid") {
        let Ok(text) = std::str::from_utf8(&data) else {
            continue;
        };
        if let Ok(grid) = parse_grid(text) {
            assert!(!grid.is_empty() && grid.len() <= MAX_GRID_POINTS);
            assert!(grid.iter().all(|v| v.is_finite()));
            accepted += 1;
        }
        if let Ok((s, t)) = parse_rate(text) {
            assert!(s >= 1 && s <= t);
        }
    }
    assert!(accepted >= 3);
}

#[test]
fn model_json_seeds() {
    let mut accepted = 0;
    for (name, data) in seeds("model_json") {
        let Ok(text) = std::str::from_utf8(&data) else {
            continue;
        };
        let Ok(model) = GammaLaguerreModel::from_json(text) else {
            continue;
        };
        for x in [0.0, model.mean(), model.mean() + 3.0 * model.std_dev()] {
            let v = model.cdf(x).unwrap();
            assert!((0.0..=1.0).contains(&v.regularized), "{name} at {x}");
        }
        let again = GammaLaguerreModel::from_json(&model.to_json()).unwrap();
        assert_eq!(again.to_file(), model.to_file());
        accepted += 1;
    }
    assert_eq!(accepted, 4);
}

#[test]
fn sample_file_seeds() {
    let mut accepted = 0;
    for (_, data) in seeds("sample_file") {
        if let Ok((seed, values)) = decode_samples(&data) {
            assert!(values.iter().all(|v| v.is_finite() && *v >= 0.0));
            assert_eq!(encode_samples(seed, &values), data);
            accepted += 1;
        }
    }
    assert!(accepted >= 1);
}
