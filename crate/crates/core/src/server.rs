//! Live mode: one session loop, any number of tablets over WebSocket.
//!
//! `GET /ws` upgrades to a WebSocket. The server first sends a `hello` frame
//! with the alphabet, then a snapshot of the current state, then every
//! feedback message as it happens. Static assets are served from `/`.

use std::net::{Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::time::Duration;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::{Html, IntoResponse};
use axum::routing::get;
use axum::Router;
use futures::{SinkExt, StreamExt};
use thiserror::Error;
use tokio::sync::{broadcast, mpsc, oneshot};
use tokio::task::JoinHandle;
use tower_http::services::ServeDir;

use crate::config::Config;
use crate::session::Session;
use crate::wire::{decode_action, encode_message, FeedbackMessage, Hello, TabletAction, WireError};

/// Ticks between `state` telemetry frames while a mission runs.
pub const TELEMETRY_EVERY: u64 = 10;

const PLACEHOLDER: &str = "<!doctype html><title>caddy</title>\
<p>caddy session server. Connect a tablet to <code>/ws</code>.</p>";

#[derive(Debug, Error)]
pub enum ServerError {
    #[error("BIND_FAILURE: {0}")]
    BindFailure(std::io::Error),
    #[error("BAD_CONFIG: {0}")]
    BadConfig(String),
    #[error("server failed: {0}")]
    Io(#[from] std::io::Error),
}

enum Inbound {
    Action(TabletAction),
    Malformed(WireError),
    Snapshot(oneshot::Sender<FeedbackMessage>),
}

#[derive(Clone)]
struct AppState {
    inbound: mpsc::Sender<Inbound>,
    outbound: broadcast::Sender<FeedbackMessage>,
}

pub struct ServerHandle {
    addr: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    task: JoinHandle<Result<(), ServerError>>,
}

impl ServerHandle {
    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    pub async fn shutdown(mut self) -> Result<(), ServerError> {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        self.task.await.map_err(|e| ServerError::Io(std::io::Error::other(e)))?
    }

    /// Runs until the server stops on its own.
    pub async fn wait(self) -> Result<(), ServerError> {
        let _keep = self.shutdown;
        self.task.await.map_err(|e| ServerError::Io(std::io::Error::other(e)))?
    }
}

/// Binds `127.0.0.1:<cfg.server.port>` (0 picks a free port) and starts
/// serving in the background.
pub async fn start(cfg: Config, assets: Option<PathBuf>) -> Result<ServerHandle, ServerError> {
    cfg.validate().map_err(|e| ServerError::BadConfig(e.to_string()))?;
    if let Some(dir) = &assets {
        if !dir.is_dir() {
            return Err(ServerError::BadConfig(format!(
                "assets directory {} does not exist",
                dir.display()
            )));
        }
    }
    let listener = tokio::net::TcpListener::bind((Ipv4Addr::LOCALHOST, cfg.server.port))
        .await
        .map_err(ServerError::BindFailure)?;
    let addr = listener.local_addr().map_err(ServerError::BindFailure)?;

    let (in_tx, in_rx) = mpsc::channel(256);
    let (out_tx, _) = broadcast::channel(1024);
    let (stop_tx, stop_rx) = oneshot::channel::<()>();
    let (loop_stop_tx, loop_stop_rx) = oneshot::channel::<()>();

    tokio::spawn(session_loop(cfg, in_rx, out_tx.clone(), loop_stop_rx));

    let state = AppState {
        inbound: in_tx,
        outbound: out_tx,
    };
    let router = Router::new().route("/ws", get(ws_handler));
    let router = match assets {
        Some(dir) => router.fallback_service(ServeDir::new(dir)),
        None => router.route("/", get(|| async { Html(PLACEHOLDER) })),
    };
    let router = router.with_state(state);

    let task = tokio::spawn(async move {
        axum::serve(listener, router)
            .with_graceful_shutdown(async move {
                let _ = stop_rx.await;
                let _ = loop_stop_tx.send(());
            })
            .await?;
        Ok(())
    });
    Ok(ServerHandle {
        addr,
        shutdown: Some(stop_tx),
        task,
    })
}

/// Starts the server and serves until it fails.
pub async fn run_session(cfg: Config, assets: Option<PathBuf>) -> Result<(), ServerError> {
    let handle = start(cfg, assets).await?;
    eprintln!("listening on ws://{}/ws", handle.local_addr());
    handle.wait().await
}

async fn session_loop(
    cfg: Config,
    mut inbound: mpsc::Receiver<Inbound>,
    outbound: broadcast::Sender<FeedbackMessage>,
    mut stop: oneshot::Receiver<()>,
) {
    let dt = Duration::from_secs_f64(cfg.sim.dt_s);
    let mut session = Session::new(cfg).with_telemetry(TELEMETRY_EVERY);
    let mut ticker = tokio::time::interval(dt);
    ticker.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Delay);
    loop {
        tokio::select! {
            _ = &mut stop => break,
            _ = ticker.tick() => session.tick(),
            msg = inbound.recv() => match msg {
                Some(Inbound::Action(a)) => session.submit(a),
                Some(Inbound::Malformed(e)) => session.reject_input(&e),
                Some(Inbound::Snapshot(reply)) => {
                    let _ = reply.send(session.snapshot());
                }
                None => break,
            },
        }
        for msg in session.drain_outbox() {
            // no subscribers is fine
            let _ = outbound.send(msg);
        }
    }
}

async fn ws_handler(ws: WebSocketUpgrade, State(state): State<AppState>) -> impl IntoResponse {
    ws.on_upgrade(move |socket| client(socket, state))
}

async fn client(socket: WebSocket, state: AppState) {
    let (mut sink, mut stream) = socket.split();
    // subscribe before asking for the snapshot so nothing falls in between
    let mut updates = state.outbound.subscribe();
    let (tx, rx) = oneshot::channel();
    if state.inbound.send(Inbound::Snapshot(tx)).await.is_err() {
        return;
    }
    let Ok(snapshot) = rx.await else { return };
    let hello = serde_json::to_string(&Hello::new()).expect("hello is serializable");
    if sink.send(Message::Text(hello.into())).await.is_err()
        || sink
            .send(Message::Text(encode_message(&snapshot).into()))
            .await
            .is_err()
    {
        return;
    }
    let mut last_seq = snapshot.seq;
    loop {
        tokio::select! {
            frame = stream.next() => {
                let text = match frame {
                    Some(Ok(Message::Text(t))) => t.to_string(),
                    Some(Ok(Message::Binary(b))) => String::from_utf8_lossy(&b).into_owned(),
                    Some(Ok(Message::Close(_))) | None | Some(Err(_)) => break,
                    Some(Ok(_)) => continue,
                };
                let inbound = match decode_action(&text) {
                    Ok(a) => Inbound::Action(a),
                    Err(e) => Inbound::Malformed(e),
                };
                if state.inbound.send(inbound).await.is_err() {
                    break;
                }
            }
            update = updates.recv() => match update {
                Ok(msg) => {
                    if msg.seq <= last_seq {
                        continue;
                    }
                    last_seq = msg.seq;
                    if sink.send(Message::Text(encode_message(&msg).into())).await.is_err() {
                        break;
                    }
                }
                Err(broadcast::error::RecvError::Lagged(_)) => continue,
                Err(broadcast::error::RecvError::Closed) => break,
            },
        }
    }
}
