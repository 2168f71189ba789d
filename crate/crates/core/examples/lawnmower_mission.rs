// Plan and fly a 10 m x 12 m mosaic followed by a 1 m descent.

use caddy::sim::{SimConfig, SimEvent};
use caddy::{NumberLiteral, ParsedCommand, Simulator};

pub fn run_example() -> anyhow::Result<Vec<f64>> {
    let n = |v| NumberLiteral::new(v).expect("in range");
    let mission = [
        ParsedCommand::Mosaic { x_m: n(10), y_m: n(12) },
        ParsedCommand::GoDown { d_m: n(1) },
    ];
    let mut sim = Simulator::new(SimConfig::default());
    sim.load_mission(&mission)?;
    let mut lanes = Vec::new();
    let mut ticks = 0u64;
    loop {
        ticks += 1;
        let events = sim.tick(sim.config().dt_s);
        for e in &events {
            if let SimEvent::WaypointReached { index, pose: s } = e {
                println!("t={:>6.1}s waypoint {index:>2} at ({:>5.2}, {:>5.2}, {:.2})", ticks as f64 * 0.1, s.x_m, s.y_m, s.z_m);
                if !lanes.contains(&s.x_m) {
                    lanes.push(s.x_m);
                }
            }
        }
        if events.contains(&SimEvent::MissionComplete) {
            break;
        }
    }
    println!("lanes at x = {lanes:?}; {:.1} m travelled, final depth {:.2} m", sim.odometer_m(), sim.state().z_m);
    Ok(lanes)
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example().map(drop)
}
