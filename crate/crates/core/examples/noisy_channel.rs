// How much of a long gesture script survives a noisy recogniser.

use caddy::channel::{corrupt, debounce_all, event_error_rate, render_script, DebounceConfig, NoiseModel};
use caddy::scenario::{noise_benchmark, ScenarioStep};

pub fn run_example() -> anyhow::Result<Vec<(f64, f64, f64)>> {
    let truth: Vec<_> = noise_benchmark(2_000, 11)
        .into_iter()
        .filter_map(|s| match s {
            ScenarioStep::Gesture(t) => Some(t),
            _ => None,
        })
        .collect();
    let cfg = DebounceConfig::default();
    let frames = render_script(&truth, cfg.frames_per_gesture(), cfg.gap_frames());
    let mut rows = Vec::new();
    println!("{:>6} {:>8} {:>10}", "p", "dropout", "event err");
    for p in [0.0, 0.05, 0.1, 0.2] {
        for dropout in [0.0, 0.02] {
            let noisy = corrupt(&frames, &NoiseModel::symmetric(p, dropout, 5)?)?;
            let err = event_error_rate(&truth, &debounce_all(&noisy, &cfg));
            println!("{p:>6.2} {dropout:>8.2} {err:>10.4}");
            rows.push((p, dropout, err));
        }
    }
    Ok(rows)
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example().map(drop)
}
