//! Tick-based point-mass AUV simulator.
//!
//! Commands are expanded into motion [`Primitive`]s when a mission is
//! loaded. Each tick moves the vehicle in a straight line toward the active
//! target at cruise speed; a target counts as reached once the vehicle is
//! within `arrival_tol_m` of it at the start of a tick, at which point the
//! vehicle is snapped onto the target.

use std::collections::VecDeque;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::{ParsedCommand, Place};

const ARRIVAL_SLACK_M: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Position {
    pub x_m: f64,
    pub y_m: f64,
    pub z_m: f64,
}

impl Position {
    pub const fn new(x_m: f64, y_m: f64, z_m: f64) -> Self {
        Self { x_m, y_m, z_m }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub speed_mps: f64,
    pub dt_s: f64,
    pub arrival_tol_m: f64,
    pub lane_spacing_m: f64,
    pub seafloor_depth_m: f64,
    pub boat_pose: Position,
    pub equipment_pose: Position,
    /// Where the vehicle is when the session starts.
    pub start_pose: Position,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            speed_mps: 0.5,
            dt_s: 0.1,
            arrival_tol_m: 0.05,
            lane_spacing_m: 2.0,
            seafloor_depth_m: 20.0,
            boat_pose: Position::new(0.0, 0.0, 0.0),
            equipment_pose: Position::new(15.0, 10.0, 8.0),
            start_pose: Position::new(0.0, 0.0, 2.0),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("speed_mps", self.speed_mps),
            ("dt_s", self.dt_s),
            ("lane_spacing_m", self.lane_spacing_m),
            ("seafloor_depth_m", self.seafloor_depth_m),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("sim.{name} must be a positive number"));
            }
        }
        if !(self.arrival_tol_m.is_finite() && self.arrival_tol_m >= 0.0) {
            return Err("sim.arrival_tol_m must be non-negative".into());
        }
        for (name, p) in [
            ("boat_pose", self.boat_pose),
            ("equipment_pose", self.equipment_pose),
            ("start_pose", self.start_pose),
        ] {
            if ![p.x_m, p.y_m, p.z_m].iter().all(|v| v.is_finite()) {
                return Err(format!("sim.{name} must be finite"));
            }
            if p.z_m < 0.0 || p.z_m > self.seafloor_depth_m {
                return Err(format!("sim.{name} depth must lie between surface and seafloor"));
            }
        }
        Ok(())
    }

    pub fn step_m(&self, dt_s: f64) -> f64 {
        self.speed_mps * dt_s
    }
}

/// Vehicle state in a local east/north/down frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuvState {
    pub x_m: f64,
    pub y_m: f64,
    /// Depth, positive down, never negative.
    pub z_m: f64,
    /// Compass heading in [0, 2π), 0 = north, clockwise.
    pub heading_rad: f64,
    pub speed_mps: f64,
}

impl AuvState {
    pub fn at(p: Position, speed_mps: f64) -> Self {
        Self {
            x_m: p.x_m,
            y_m: p.y_m,
            z_m: p.z_m.max(0.0),
            heading_rad: 0.0,
            speed_mps,
        }
    }

    pub fn position(&self) -> Position {
        Position::new(self.x_m, self.y_m, self.z_m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Primitive {
    GotoWaypoint { x_m: f64, y_m: f64, z_m: f64 },
    ChangeDepth { delta_m: f64 },
    TakePhoto,
    Surface,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SimEvent {
    WaypointReached { index: usize, pose: AuvState },
    PhotoTaken { pose: AuvState },
    CommandDone { command_index: usize },
    MissionComplete,
    Surfaced,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SimError {
    #[error("infeasible: {0}")]
    Infeasible(String),
}

#[derive(Clone, Debug, PartialEq, Error)]
#[error("command {command_index}: {error}")]
pub struct MissionRejected {
    pub command_index: usize,
    pub error: SimError,
}

/// Serpentine coverage of an `x_len` × `y_len` rectangle anchored at
/// `origin`. Lanes run along y and are spaced `spacing` apart across x.
pub fn lawnmower(origin: Position, x_len: f64, y_len: f64, spacing: f64) -> Vec<Primitive> {
    let lanes = (x_len / spacing).floor() as usize + 1;
    let mut out = Vec::with_capacity(2 * lanes);
    for lane in 0..lanes {
        let x_m = origin.x_m + lane as f64 * spacing;
        let (first, second) = if lane % 2 == 0 {
            (origin.y_m, origin.y_m + y_len)
        } else {
            (origin.y_m + y_len, origin.y_m)
        };
        for y_m in [first, second] {
            out.push(Primitive::GotoWaypoint {
                x_m,
                y_m,
                z_m: origin.z_m,
            });
        }
    }
    out
}

fn depth_change(state: &AuvState, delta_m: f64, cfg: &SimConfig) -> Result<Primitive, SimError> {
    let target = state.z_m + delta_m;
    if target < 0.0 {
        return Err(SimError::Infeasible(format!(
            "would rise {:.2} m above the surface",
            -target
        )));
    }
    if target > cfg.seafloor_depth_m {
        return Err(SimError::Infeasible(format!(
            "would descend {:.2} m below the seafloor",
            target - cfg.seafloor_depth_m
        )));
    }
    Ok(Primitive::ChangeDepth { delta_m })
}

/// Expands one validated command into motion primitives, planned from
/// `state`.
pub fn command_to_primitives(
    cmd: &ParsedCommand,
    state: &AuvState,
    cfg: &SimConfig,
) -> Result<Vec<Primitive>, SimError> {
    let waypoint = |p: Position| Primitive::GotoWaypoint {
        x_m: p.x_m,
        y_m: p.y_m,
        z_m: p.z_m,
    };
    let place_pose = |place: Place| match place {
        Place::Boat => cfg.boat_pose,
        Place::Here => state.position(),
    };
    Ok(match cmd {
        ParsedCommand::GoDown { d_m } => vec![depth_change(state, d_m.meters(), cfg)?],
        ParsedCommand::GoUp { d_m } => vec![depth_change(state, -d_m.meters(), cfg)?],
        ParsedCommand::Photo { altitude_m: None } => vec![Primitive::TakePhoto],
        ParsedCommand::Photo {
            altitude_m: Some(alt),
        } => {
            let target = cfg.seafloor_depth_m - alt.meters();
            if target < 0.0 {
                return Err(SimError::Infeasible(format!(
                    "altitude {alt} m exceeds water depth {} m",
                    cfg.seafloor_depth_m
                )));
            }
            vec![
                depth_change(state, target - state.z_m, cfg)?,
                Primitive::TakePhoto,
            ]
        }
        ParsedCommand::GoTo { place: Place::Here } => Vec::new(),
        ParsedCommand::GoTo { place: Place::Boat } => vec![waypoint(cfg.boat_pose)],
        ParsedCommand::Carry { place, .. } => {
            vec![waypoint(cfg.equipment_pose), waypoint(place_pose(*place))]
        }
        ParsedCommand::Mosaic { x_m, y_m } => lawnmower(
            state.position(),
            x_m.meters(),
            y_m.meters(),
            cfg.lane_spacing_m,
        ),
    })
}

/// State the vehicle ends up in after executing `prims` exactly.
fn predict(mut state: AuvState, prims: &[Primitive]) -> AuvState {
    for p in prims {
        match *p {
            Primitive::GotoWaypoint { x_m, y_m, z_m } => {
                state.x_m = x_m;
                state.y_m = y_m;
                state.z_m = z_m;
            }
            Primitive::ChangeDepth { delta_m } => state.z_m = (state.z_m + delta_m).max(0.0),
            Primitive::Surface => state.z_m = 0.0,
            Primitive::TakePhoto => {}
        }
    }
    state
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum PlanItem {
    Do(Primitive),
    CommandDone(usize),
    MissionComplete,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Target {
    Waypoint(Position),
    Depth(Position),
    Surface(Position),
}

impl Target {
    fn position(self) -> Position {
        match self {
            Target::Waypoint(p) | Target::Depth(p) | Target::Surface(p) => p,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Simulator {
    cfg: SimConfig,
    auv: AuvState,
    plan: VecDeque<PlanItem>,
    active: Option<Target>,
    waypoints_reached: usize,
    odometer_m: f64,
}

impl Simulator {
    pub fn new(cfg: SimConfig) -> Self {
        let auv = AuvState::at(cfg.start_pose, cfg.speed_mps);
        Self::with_state(cfg, auv)
    }

    pub fn with_state(cfg: SimConfig, mut auv: AuvState) -> Self {
        auv.z_m = auv.z_m.max(0.0);
        auv.speed_mps = cfg.speed_mps;
        Self {
            cfg,
            auv,
            plan: VecDeque::new(),
            active: None,
            waypoints_reached: 0,
            odometer_m: 0.0,
        }
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn state(&self) -> AuvState {
        self.auv
    }

    /// Total distance travelled since construction.
    pub fn odometer_m(&self) -> f64 {
        self.odometer_m
    }

    pub fn is_idle(&self) -> bool {
        self.active.is_none() && self.plan.is_empty()
    }

    /// Plans the whole mission up front, chaining predicted end states, and
    /// replaces whatever was running. Nothing changes if any command is
    /// infeasible.
    pub fn load_mission(&mut self, commands: &[ParsedCommand]) -> Result<(), MissionRejected> {
        let mut predicted = self.auv;
        let mut plan = VecDeque::new();
        for (command_index, cmd) in commands.iter().enumerate() {
            let prims = command_to_primitives(cmd, &predicted, &self.cfg).map_err(|error| {
                MissionRejected {
                    command_index,
                    error,
                }
            })?;
            predicted = predict(predicted, &prims);
            plan.extend(prims.into_iter().map(PlanItem::Do));
            plan.push_back(PlanItem::CommandDone(command_index));
        }
        plan.push_back(PlanItem::MissionComplete);
        self.plan = plan;
        self.active = None;
        self.waypoints_reached = 0;
        Ok(())
    }

    /// Drops every pending primitive; the vehicle holds position.
    pub fn abort(&mut self) -> Vec<SimEvent> {
        self.plan.clear();
        self.active = None;
        Vec::new()
    }

    /// Replaces the plan with a straight ascent to the surface. Calling it
    /// again while already surfacing changes nothing.
    pub fn emergency_surface(&mut self) -> Vec<SimEvent> {
        let surfacing = matches!(self.active, Some(Target::Surface(_))) && self.plan.is_empty()
            || self.active.is_none() && self.plan == [PlanItem::Do(Primitive::Surface)];
        if !surfacing {
            self.plan.clear();
            self.plan.push_back(PlanItem::Do(Primitive::Surface));
            self.active = None;
        }
        Vec::new()
    }

    fn distance_to(&self, p: Position) -> f64 {
        let dx = p.x_m - self.auv.x_m;
        let dy = p.y_m - self.auv.y_m;
        let dz = p.z_m - self.auv.z_m;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    fn activate(&self, prim: Primitive) -> Option<Target> {
        let here = self.auv.position();
        match prim {
            Primitive::GotoWaypoint { x_m, y_m, z_m } => {
                Some(Target::Waypoint(Position::new(x_m, y_m, z_m.max(0.0))))
            }
            Primitive::ChangeDepth { delta_m } => Some(Target::Depth(Position {
                z_m: (here.z_m + delta_m).max(0.0),
                ..here
            })),
            Primitive::Surface => Some(Target::Surface(Position { z_m: 0.0, ..here })),
            Primitive::TakePhoto => None,
        }
    }

    fn move_toward(&mut self, p: Position, step: f64) {
        let dx = p.x_m - self.auv.x_m;
        let dy = p.y_m - self.auv.y_m;
        let dz = p.z_m - self.auv.z_m;
        let dist = (dx * dx + dy * dy + dz * dz).sqrt();
        if dist == 0.0 {
            return;
        }
        if dist <= step {
            self.place_at(p);
            return;
        }
        let f = step / dist;
        self.set_heading(dx, dy);
        self.auv.x_m += dx * f;
        self.auv.y_m += dy * f;
        self.auv.z_m = (self.auv.z_m + dz * f).max(0.0);
        self.odometer_m += step;
    }

    fn place_at(&mut self, p: Position) {
        let dx = p.x_m - self.auv.x_m;
        let dy = p.y_m - self.auv.y_m;
        self.odometer_m += self.distance_to(p);
        self.set_heading(dx, dy);
        self.auv.x_m = p.x_m;
        self.auv.y_m = p.y_m;
        self.auv.z_m = p.z_m.max(0.0);
    }

    fn set_heading(&mut self, dx: f64, dy: f64) {
        if dx.hypot(dy) > 1e-12 {
            let h = dx.atan2(dy).rem_euclid(TAU);
            self.auv.heading_rad = if h < TAU { h } else { 0.0 };
        }
    }

    /// Advances the simulation by `dt_s` seconds. Non-positive or
    /// non-finite `dt_s` is a no-op.
    pub fn tick(&mut self, dt_s: f64) -> Vec<SimEvent> {
        let mut events = Vec::new();
        if !(dt_s.is_finite() && dt_s > 0.0) {
            return events;
        }
        let step = self.cfg.step_m(dt_s);
        let tol = self.cfg.arrival_tol_m + ARRIVAL_SLACK_M;
        loop {
            let target = match self.active {
                Some(t) => t,
                None => match self.plan.pop_front() {
                    None => break,
                    Some(PlanItem::CommandDone(command_index)) => {
                        events.push(SimEvent::CommandDone { command_index });
                        continue;
                    }
                    Some(PlanItem::MissionComplete) => {
                        events.push(SimEvent::MissionComplete);
                        continue;
                    }
                    Some(PlanItem::Do(prim)) => match self.activate(prim) {
                        Some(t) => {
                            self.active = Some(t);
                            t
                        }
                        None => {
                            events.push(SimEvent::PhotoTaken { pose: self.auv });
                            continue;
                        }
                    },
                },
            };
            let p = target.position();
            if self.distance_to(p) <= tol {
                self.place_at(p);
                self.active = None;
                match target {
                    Target::Waypoint(_) => {
                        events.push(SimEvent::WaypointReached {
                            index: self.waypoints_reached,
                            pose: self.auv,
                        });
                        self.waypoints_reached += 1;
                    }
                    Target::Surface(_) => events.push(SimEvent::Surfaced),
                    Target::Depth(_) => {}
                }
                continue;
            }
            self.move_toward(p, step);
            break;
        }
        events
    }
}
