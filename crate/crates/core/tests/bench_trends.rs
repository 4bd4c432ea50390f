//! Wall-time trends of the benchmark harness. Timings are medians, so these
//! are robust to ordinary scheduling noise but assume an otherwise idle machine.

use boxbf_core::bench::{run_bench, BenchConfig, Method};
use boxbf_core::synth::synthetic_image;

const SIZE: usize = 192;

fn spread(v: &[f64]) -> f64 {
    v.iter().cloned().fold(0.0, f64::max) / v.iter().cloned().fold(f64::INFINITY, f64::min)
}

// One test function so the measurements never overlap with each other.
#[test]
fn wall_time_trends() {
    brute_grows_with_radius_and_fast_does_not();
    fast_time_does_not_depend_on_sigma_r();
}

fn brute_grows_with_radius_and_fast_does_not() {
    let img = synthetic_image(SIZE, SIZE, 21).unwrap();
    let cfg = BenchConfig {
        methods: vec![Method::Brute, Method::Fast],
        runs: 3,
        ..BenchConfig::default()
    };
    let rows = run_bench(&img, &cfg).unwrap();
    let times = |m: Method| {
        rows.iter()
            .filter(|r| r.method == m)
            .map(|r| r.wall_ms)
            .collect::<Vec<_>>()
    };
    let brute = times(Method::Brute);
    assert!(brute.windows(2).all(|w| w[1] > w[0]), "brute {brute:?}");
    let fast = times(Method::Fast);
    assert!(spread(&fast) <= 1.5, "fast {fast:?}");
}

fn fast_time_does_not_depend_on_sigma_r() {
    let img = synthetic_image(SIZE, SIZE, 22).unwrap();
    let cfg = BenchConfig {
        radii: vec![6],
        sigma_r: vec![15.0, 25.0, 35.0, 45.0],
        methods: vec![Method::Fast],
        runs: 3,
        ..BenchConfig::default()
    };
    let rows = run_bench(&img, &cfg).unwrap();
    let fast: Vec<f64> = rows.iter().map(|r| r.wall_ms).collect();
    assert!(spread(&fast) <= 1.2, "fast {fast:?}");
    // quality stays high across the sweep
    assert!(rows.iter().all(|r| r.psnr_vs_oracle > 35.0), "{rows:?}");
}
