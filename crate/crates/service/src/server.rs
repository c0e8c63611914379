//! WebSocket front end. A single loop owns the [`SessionEngine`]; each
//! connection gets a task that forwards its text frames to the loop and
//! relays the loop's messages back.

use std::future::Future;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::time::Duration;

use futures_util::{SinkExt, StreamExt};
use hpa_sim_core::trace_io::save_trace;
use hpa_sim_core::{Config, Trace};
use tokio::net::{TcpListener, TcpStream};
use tokio::sync::{mpsc, oneshot};
use tokio::task::JoinHandle;
use tokio::time::{Instant, Interval, MissedTickBehavior};
use tokio_tungstenite::tungstenite::Message;

use crate::engine::SessionEngine;
use crate::protocol::{parse_client_message, EndReason, ProtocolError, ServerMessage};

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("port {port} unavailable: {source}")]
    PortUnavailable { port: u16, source: std::io::Error },
    #[error("speed must be positive and finite, got {0}")]
    InvalidSpeed(f64),
    #[error(transparent)]
    Core(#[from] hpa_sim_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
pub struct ServeOptions {
    pub config: Config,
    /// Where the trace is written when the session ends.
    pub out: Option<PathBuf>,
    /// Wall-clock speed-up; 1.0 runs in real time.
    pub speed: f64,
}

impl ServeOptions {
    pub fn new(config: Config) -> Self {
        ServeOptions {
            config,
            out: None,
            speed: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SessionSummary {
    pub reason: EndReason,
    pub trace: Trace,
    /// Set when the trace was written to [`ServeOptions::out`].
    pub saved_to: Option<PathBuf>,
}

enum Event {
    Join {
        id: u64,
        egress: mpsc::UnboundedSender<ServerMessage>,
        accepted: oneshot::Sender<bool>,
    },
    Text {
        id: u64,
        text: String,
    },
    Binary {
        id: u64,
    },
    Leave {
        id: u64,
    },
}

struct Client {
    id: u64,
    egress: mpsc::UnboundedSender<ServerMessage>,
}

pub struct SessionService {
    listener: TcpListener,
    engine: SessionEngine,
    opts: ServeOptions,
}

impl SessionService {
    /// Binds `addr` and validates the session config. Port 0 picks a free port.
    pub async fn bind(addr: SocketAddr, opts: ServeOptions) -> Result<Self, ServiceError> {
        if !(opts.speed.is_finite() && opts.speed > 0.0) {
            return Err(ServiceError::InvalidSpeed(opts.speed));
        }
        let engine = SessionEngine::new(opts.config.clone())?;
        let listener = TcpListener::bind(addr)
            .await
            .map_err(|source| ServiceError::PortUnavailable {
                port: addr.port(),
                source,
            })?;
        Ok(SessionService { listener, engine, opts })
    }

    pub fn local_addr(&self) -> std::io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Runs one session to its end.
    pub async fn run(self) -> Result<SessionSummary, ServiceError> {
        self.run_until(std::future::pending()).await
    }

    /// Runs one session, ending it early when `shutdown` resolves. The trace
    /// is persisted however the session ends.
    pub async fn run_until(self, shutdown: impl Future<Output = ()>) -> Result<SessionSummary, ServiceError> {
        let SessionService {
            listener,
            mut engine,
            opts,
        } = self;
        let period = Duration::from_secs_f64(1.0 / (f64::from(opts.config.tick_hz) * opts.speed));
        let (events_tx, mut events) = mpsc::unbounded_channel();
        let mut clock: Option<Interval> = None;
        let mut client: Option<Client> = None;
        let mut tasks: Vec<(u64, JoinHandle<()>)> = Vec::new();
        let mut next_id = 0u64;
        tokio::pin!(shutdown);

        while engine.ended().is_none() {
            tokio::select! {
                _ = &mut shutdown => engine.end(EndReason::Shutdown),
                conn = listener.accept() => match conn {
                    Ok((stream, peer)) => {
                        log::debug!("connection {next_id} from {peer}");
                        tasks.push((next_id, tokio::spawn(connection(stream, next_id, events_tx.clone()))));
                        next_id += 1;
                    }
                    Err(e) => log::warn!("accept failed: {e}"),
                },
                Some(event) = events.recv() => match event {
                    Event::Join { id, egress, accepted } => {
                        if client.is_some() {
                            let _ = accepted.send(false);
                            continue;
                        }
                        if accepted.send(true).is_err() {
                            continue;
                        }
                        let _ = egress.send(ServerMessage::hello(engine.config()));
                        client = Some(Client { id, egress });
                        if clock.is_none() {
                            let mut iv = tokio::time::interval_at(Instant::now(), period);
                            iv.set_missed_tick_behavior(MissedTickBehavior::Burst);
                            clock = Some(iv);
                        }
                    }
                    Event::Text { id, text } if is_client(&client, id) => match parse_client_message(&text) {
                        Ok(msg) => engine.apply_client_message(msg),
                        Err(e) => abort(&mut engine, &client, e),
                    },
                    Event::Binary { id } if is_client(&client, id) => abort(&mut engine, &client, ProtocolError::Binary),
                    Event::Leave { id } if is_client(&client, id) => {
                        log::info!("caretaker disconnected; session continues");
                        client = None;
                    }
                    _ => {}
                },
                _ = next_tick(&mut clock) => {
                    for msg in engine.tick() {
                        if let Some(c) = &client {
                            let _ = c.egress.send(msg);
                        }
                    }
                }
            }
        }

        let reason = engine.ended().expect("loop exits once the session has ended");
        let trace = engine.trace();
        let active = client.map(|c| {
            let _ = c.egress.send(ServerMessage::SessionEnd {
                reason,
                records: trace.records.len(),
            });
            c.id
        });
        let saved_to = match &opts.out {
            Some(path) if !trace.records.is_empty() => {
                save_trace(&trace, path)?;
                Some(path.clone())
            }
            Some(_) => {
                log::warn!("session ended before the first tick; no trace written");
                None
            }
            None => None,
        };
        for (id, task) in tasks {
            if Some(id) == active {
                let _ = tokio::time::timeout(Duration::from_secs(2), task).await;
            } else {
                task.abort();
            }
        }
        Ok(SessionSummary {
            reason,
            trace,
            saved_to,
        })
    }
}

fn is_client(client: &Option<Client>, id: u64) -> bool {
    client.as_ref().is_some_and(|c| c.id == id)
}

fn abort(engine: &mut SessionEngine, client: &Option<Client>, err: ProtocolError) {
    log::warn!("aborting session: {err}");
    if let Some(c) = client {
        let _ = c.egress.send(ServerMessage::Error {
            message: err.to_string(),
        });
    }
    engine.end(EndReason::Aborted);
}

async fn next_tick(clock: &mut Option<Interval>) {
    match clock {
        Some(iv) => {
            iv.tick().await;
        }
        None => std::future::pending().await,
    }
}

async fn connection(stream: TcpStream, id: u64, events: mpsc::UnboundedSender<Event>) {
    let ws = match tokio_tungstenite::accept_async(stream).await {
        Ok(ws) => ws,
        Err(e) => {
            log::debug!("handshake with connection {id} failed: {e}");
            return;
        }
    };
    let (mut sink, mut source) = ws.split();
    let (egress, mut outgoing) = mpsc::unbounded_channel();
    let (accepted_tx, accepted_rx) = oneshot::channel();
    if events
        .send(Event::Join {
            id,
            egress,
            accepted: accepted_tx,
        })
        .is_err()
    {
        return;
    }
    if !accepted_rx.await.unwrap_or(false) {
        let _ = sink.send(Message::text(ServerMessage::occupied().to_json())).await;
        let _ = sink.close().await;
        return;
    }
    loop {
        tokio::select! {
            out = outgoing.recv() => match out {
                Some(msg) => {
                    if sink.send(Message::text(msg.to_json())).await.is_err() {
                        break;
                    }
                }
                None => {
                    let _ = sink.close().await;
                    break;
                }
            },
            incoming = source.next() => {
                let event = match incoming {
                    Some(Ok(Message::Text(text))) => Event::Text { id, text: text.to_string() },
                    Some(Ok(Message::Binary(_))) => Event::Binary { id },
                    Some(Ok(Message::Close(_))) | Some(Err(_)) | None => break,
                    Some(Ok(_)) => continue,
                };
                if events.send(event).is_err() {
                    break;
                }
            }
        }
    }
    let _ = events.send(Event::Leave { id });
}
