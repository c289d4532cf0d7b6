//! HTTP surface: `POST /events/<class>` ingests one JSON event and steps
//! the engine; `GET /diagnostics/<class>?since=<t>` polls emitted records.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Duration;

use serde_json::json;
use tiny_http::{Header, Method, Response, Server};

use crate::service::{DdssService, WireEvent};
use crate::DdssError;

pub struct ServeHandle {
    pub port: u16,
    stop: Arc<AtomicBool>,
    thread: Option<JoinHandle<()>>,
}

impl ServeHandle {
    pub fn stop(mut self) {
        self.stop.store(true, Ordering::SeqCst);
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

impl Drop for ServeHandle {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

fn json_response(status: u32, body: serde_json::Value) -> Response<std::io::Cursor<Vec<u8>>> {
    let header = Header::from_bytes("Content-Type", "application/json").expect("static header");
    Response::from_string(body.to_string()).with_status_code(status).with_header(header)
}

fn handle(service: &Mutex<DdssService>, mut request: tiny_http::Request) {
    let url = request.url().to_string();
    let method = request.method().clone();
    let (path, query) = match url.split_once('?') {
        Some((p, q)) => (p.to_string(), q.to_string()),
        None => (url.clone(), String::new()),
    };

    let response = if method == Method::Post && path.starts_with("/events/") {
        let class = path.trim_start_matches("/events/").to_string();
        let mut body = String::new();
        let _ = request.as_reader().read_to_string(&mut body);
        match serde_json::from_str::<WireEvent>(&body) {
            Ok(mut wire) => {
                wire.class = class;
                let mut svc = service.lock().expect("service lock");
                match svc.ingest_event(&wire).and_then(|rec| {
                    let emitted = svc.step_engine()?;
                    Ok((rec, emitted))
                }) {
                    Ok((rec, emitted)) => json_response(
                        200,
                        json!({ "id": rec.id, "emitted": emitted }),
                    ),
                    Err(e @ (DdssError::UnknownEventClass(_)
                    | DdssError::UnknownDataSource(_)
                    | DdssError::NonMonotoneTimestamp { .. })) => {
                        json_response(400, json!({ "error": e.to_string() }))
                    }
                    Err(e) => json_response(500, json!({ "error": e.to_string() })),
                }
            }
            Err(e) => json_response(400, json!({ "error": format!("bad event body: {e}") })),
        }
    } else if method == Method::Get && path.starts_with("/diagnostics/") {
        let class = path.trim_start_matches("/diagnostics/").to_string();
        let since = query
            .split('&')
            .find_map(|kv| kv.strip_prefix("since="))
            .and_then(|v| v.parse::<u64>().ok())
            .unwrap_or(0);
        let svc = service.lock().expect("service lock");
        let records = svc.poll(&class, since);
        json_response(200, serde_json::to_value(records).expect("records serialize"))
    } else {
        json_response(404, json!({ "error": format!("no route {method} {path}") }))
    };

    let _ = request.respond(response);
}

/// Serve on 127.0.0.1:`port` (0 picks a free port) until the handle stops.
pub fn serve(service: Arc<Mutex<DdssService>>, port: u16) -> Result<ServeHandle, DdssError> {
    let server = Server::http(("127.0.0.1", port))
        .map_err(|e| DdssError::Bundle(format!("bind failed: {e}")))?;
    let actual_port = match server.server_addr() {
        tiny_http::ListenAddr::IP(addr) => addr.port(),
        _ => port,
    };
    let stop = Arc::new(AtomicBool::new(false));
    let stop2 = stop.clone();
    let thread = std::thread::spawn(move || {
        while !stop2.load(Ordering::SeqCst) {
            match server.recv_timeout(Duration::from_millis(50)) {
                Ok(Some(request)) => handle(&service, request),
                Ok(None) => {}
                Err(_) => break,
            }
        }
    });
    Ok(ServeHandle { port: actual_port, stop, thread: Some(thread) })
}
