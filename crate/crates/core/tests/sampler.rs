use ntnlink::cli::RunConfig;
use ntnlink::e2e::e2e_cdf;
use ntnlink::fso::Detection;
use ntnlink::montecarlo::{grid_distance, RngStream};
use ntnlink::rf::{db_to_linear, Shadowing};

/// Sampled end-to-end SNR against the analytic CDF on a log grid.
fn ecdf_gap(preset: Shadowing, det: Detection, q: f64, db: f64, weak_rf: bool) -> (f64, f64) {
    let mut c = RunConfig::default();
    c.rf.preset = preset.code().into();
    c.relay.detection = det;
    c.pointing.jitter_ratio = q;
    if weak_rf {
        c.rf.budget.gamma_u_db = Some(-20.0);
    }
    c.normalize();
    let s = c.scenario().unwrap();
    let gb = db_to_linear(db);
    let cfg = s.e2e.with_gamma_bar_h(gb);
    let sampler = s.sampler.with_gamma_bar_h(gb);
    let n = 40_000;
    let mut stream = RngStream::new(23, db as u64);
    let mut draws: Vec<f64> = (0..n).map(|_| sampler.sample_e2e_snr(stream.rng())).collect();
    let mut sorted = draws.clone();
    sorted.sort_by(f64::total_cmp);
    // deciles of the sample, so every grid point sits where the CDF moves
    let grid: Vec<f64> = (1..10).map(|k| sorted[k * n / 10]).collect();
    let gap = grid_distance(&mut draws, &grid, |g| e2e_cdf(g, &s.link, &cfg).unwrap());
    // two-sided DKW bound, alpha = 1e-3
    let bound = ((2.0f64 / 1e-3).ln() / (2.0 * n as f64)).sqrt();
    (gap, bound)
}

#[test]
fn heterodyne_heavy_shadowing() {
    let (gap, bound) = ecdf_gap(Shadowing::Heavy, Detection::Heterodyne, 1.0, 30.0, false);
    assert!(gap < bound, "{gap} vs {bound}");
}

#[test]
fn imdd_elliptical_jitter() {
    let (gap, bound) = ecdf_gap(Shadowing::Average, Detection::IntensityModulation, 0.6, 45.0, false);
    assert!(gap < bound, "{gap} vs {bound}");
}

#[test]
fn relay_limited_link() {
    let (gap, bound) = ecdf_gap(Shadowing::Light, Detection::Heterodyne, 0.8, 40.0, true);
    assert!(gap < bound, "{gap} vs {bound}");
}
