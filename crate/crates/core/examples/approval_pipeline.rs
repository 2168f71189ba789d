// Drive the pipeline state machine by hand: nothing reaches the vehicle
// until the supervisor approves.

use caddy::pipeline::Effect;
use caddy::{GestureToken as T, PipelineInput, PipelinePhase, PipelineState};

pub fn run_example() -> anyhow::Result<PipelinePhase> {
    let mut p = PipelineState::new();
    let mut now = 0;
    let mut show = |p: &mut PipelineState, input: PipelineInput| {
        now += 1;
        let label = format!("{input:?}");
        for fx in p.step(now, input) {
            match fx {
                Effect::Feedback { kind, detail } => {
                    println!("{label:<40} {:<18} {kind:?}: {detail}", p.phase().as_str())
                }
                other => println!("{label:<40} {:<18} -> {other:?}", p.phase().as_str()),
            }
        }
    };
    for t in [T::StartComm, T::GoDown, T::Digit2, T::StartComm, T::Photo, T::EndComm] {
        show(&mut p, PipelineInput::GestureEvent { token: t });
    }
    // gestures are ignored while waiting for the tablet
    show(&mut p, PipelineInput::GestureEvent { token: T::Mosaic });
    show(&mut p, PipelineInput::Approve);
    show(&mut p, PipelineInput::SimDone { command_index: 0 });
    show(&mut p, PipelineInput::SimDone { command_index: 1 });
    show(&mut p, PipelineInput::SimMissionComplete);
    Ok(p.phase())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example().map(drop)
}
