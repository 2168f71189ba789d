// Start the live server on a free port and play tablet against it.

use futures::{SinkExt, StreamExt};
use tokio_tungstenite::{connect_async, tungstenite::Message};

use caddy::wire::{decode_message, encode_action};
use caddy::{Config, GestureToken as T, TabletAction};

pub fn run_example() -> anyhow::Result<Vec<String>> {
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async {
        let mut cfg = Config::default();
        cfg.server.port = 0;
        let server = caddy::server::start(cfg, None).await?;
        let url = format!("ws://{}/ws", server.local_addr());
        let (mut ws, _) = connect_async(url.as_str()).await?;

        let hello = ws.next().await.expect("hello")?;
        println!("<- {}", hello.to_text()?);
        let mut actions: Vec<_> = [T::StartComm, T::GoDown, T::Digit1, T::EndComm]
            .into_iter()
            .map(|token| TabletAction::Gesture { token })
            .collect();
        actions.push(TabletAction::Approve);
        for a in &actions {
            ws.send(Message::text(encode_action(a))).await?;
        }
        let mut seen = Vec::new();
        while let Some(frame) = ws.next().await {
            let msg = decode_message(frame?.to_text()?)?;
            println!("<- #{} {} {}", msg.seq, msg.phase, msg.detail);
            seen.push(msg.detail.clone());
            if msg.detail == "mission complete" {
                break;
            }
        }
        ws.close(None).await?;
        server.shutdown().await?;
        Ok(seen)
    })
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example().map(drop)
}
