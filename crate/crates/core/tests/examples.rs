//! Every shipped example runs and produces what it claims.

macro_rules! example {
    ($name:ident) => {
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));
        }
    };
}

example!(token_parsing);
example!(approval_pipeline);
example!(lawnmower_mission);
example!(noisy_channel);
example!(ncm_forest);
example!(bridge_inspection);
example!(tablet_server);

#[test]
fn token_parsing_runs() {
    let v = token_parsing::run_example().unwrap();
    assert_eq!(v.len(), 3);
    assert!(v[0].starts_with("ok") && v[1].starts_with("error") && v[2].starts_with("ok"));
}

#[test]
fn approval_pipeline_runs() {
    assert_eq!(approval_pipeline::run_example().unwrap(), caddy::PipelinePhase::Idle);
}

#[test]
fn lawnmower_mission_runs() {
    assert_eq!(lawnmower_mission::run_example().unwrap(), vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
}

#[test]
fn noisy_channel_runs() {
    let rows = noisy_channel::run_example().unwrap();
    assert_eq!(rows[0].2, 0.0);
}

#[test]
fn ncm_forest_runs() {
    assert!(ncm_forest::run_example().unwrap() >= 0.99);
}

#[test]
fn bridge_inspection_runs() {
    let r = bridge_inspection::run_example().unwrap();
    assert_eq!(r.missions_completed, 1);
    assert_eq!(r.commands_validated, 5);
}

#[test]
fn tablet_server_runs() {
    let seen = tablet_server::run_example().unwrap();
    assert!(seen.iter().any(|d| d.starts_with("approve mission")));
    assert_eq!(seen.last().unwrap(), "mission complete");
}
