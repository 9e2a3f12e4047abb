//! Serves the JSON API on a local port with the bundled catalog.
//!
//! cargo run --example serve -- [port]
//! curl localhost:8080/api/diagrams

use region_select::catalog::Catalog;
use region_select::service::{serve, AppState};

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let port: u16 = std::env::args().nth(1).map_or(8080, |p| p.parse().expect("port number"));
    let state = AppState::new(Catalog::builtin(), None).expect("no persisted sessions");
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    println!("listening on http://{}", listener.local_addr()?);
    serve(listener, state).await
}
