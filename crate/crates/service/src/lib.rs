//! HTTP/JSON front end for the box bilateral filter.
//!
//! | method | path                        | body                     |
//! |--------|-----------------------------|--------------------------|
//! | GET    | `/healthz`                  |                          |
//! | POST   | `/v1/filter`                | `FilterRequest`          |
//! | POST   | `/v1/bench`                 | `BenchRequest`           |
//! | POST   | `/v1/approx-report`         | `ApproxReportRequest`    |
//! | POST   | `/v1/sessions`              | `PrecomputeRequest`      |
//! | GET    | `/v1/sessions/{id}`         |                          |
//! | DELETE | `/v1/sessions/{id}`         |                          |
//! | POST   | `/v1/sessions/{id}/filter`  | `SessionFilterRequest`   |
//!
//! Errors come back as `{"error": "..."}` with a 4xx or 5xx status.

mod codec;
mod error;
mod handlers;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::DefaultBodyLimit;
use axum::routing::{get, post};
use axum::Router;
use boxbf_core::filter::PrecomputeCache;
use parking_lot::Mutex;
use tokio::net::{TcpListener, ToSocketAddrs};
use tokio::sync::oneshot;
use tokio::task::JoinHandle;
use uuid::Uuid;

pub use codec::{decode_image, encode_image};
pub use error::{ApiError, ApiResult};
pub use handlers::DEFAULT_BENCH_SIZE;

/// Request bodies carry whole images, so the default 2 MB limit is raised.
pub const MAX_BODY_BYTES: usize = 256 * 1024 * 1024;

/// Precompute caches keyed by session id.
#[derive(Default)]
pub struct AppState {
    sessions: Mutex<HashMap<Uuid, Arc<PrecomputeCache>>>,
}

impl AppState {
    pub fn session_count(&self) -> usize {
        self.sessions.lock().len()
    }
}

pub fn router() -> Router {
    router_with_state(Arc::new(AppState::default()))
}

pub fn router_with_state(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/healthz", get(handlers::health))
        .route("/v1/filter", post(handlers::filter))
        .route("/v1/bench", post(handlers::bench))
        .route("/v1/approx-report", post(handlers::approx))
        .route("/v1/sessions", post(handlers::create_session))
        .route(
            "/v1/sessions/{id}",
            get(handlers::get_session).delete(handlers::delete_session),
        )
        .route("/v1/sessions/{id}/filter", post(handlers::session_filter))
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES))
        .with_state(state)
}

/// Serves until the process is interrupted.
pub async fn serve(addr: impl ToSocketAddrs) -> std::io::Result<()> {
    let listener = TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router())
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

/// A server running on a background task.
pub struct ServerHandle {
    addr: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    task: JoinHandle<std::io::Result<()>>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }

    /// Stops accepting connections and waits for in-flight requests.
    pub async fn shutdown(mut self) -> std::io::Result<()> {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        match (&mut self.task).await {
            Ok(r) => r,
            Err(e) => Err(std::io::Error::other(e)),
        }
    }
}

/// Binds `addr` (use port 0 for an ephemeral port) and serves in the
/// background.
pub async fn spawn(addr: impl ToSocketAddrs) -> std::io::Result<ServerHandle> {
    let listener = TcpListener::bind(addr).await?;
    let addr = listener.local_addr()?;
    let (tx, rx) = oneshot::channel();
    let task = tokio::spawn(async move {
        axum::serve(listener, router())
            .with_graceful_shutdown(async {
                let _ = rx.await;
            })
            .await
    });
    Ok(ServerHandle {
        addr,
        shutdown: Some(tx),
        task,
    })
}

/// Spawns on `127.0.0.1` with an ephemeral port.
pub async fn spawn_local() -> std::io::Result<ServerHandle> {
    spawn("127.0.0.1:0").await
}
