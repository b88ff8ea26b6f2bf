//! A local chat-completions endpoint with canned behavior.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use serde_json::{json, Value as Json};

#[derive(Debug, Clone)]
pub enum Reply {
    /// Answers with this assistant message content.
    Content(String),
    /// Waits this long before answering.
    Stall(Duration),
    Status(u16),
}

pub struct Stub {
    pub base_url: String,
    requests: Arc<Mutex<Vec<Json>>>,
}

impl Stub {
    pub fn spawn(reply: Reply) -> Stub {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind stub");
        let base_url = format!("http://{}", listener.local_addr().unwrap());
        let requests = Arc::new(Mutex::new(Vec::new()));
        let seen = Arc::clone(&requests);
        thread::spawn(move || {
            for stream in listener.incoming().flatten() {
                let reply = reply.clone();
                let seen = Arc::clone(&seen);
                thread::spawn(move || serve(stream, &reply, &seen));
            }
        });
        Stub { base_url, requests }
    }

    pub fn requests(&self) -> Vec<Json> {
        self.requests.lock().unwrap().clone()
    }
}

fn serve(stream: TcpStream, reply: &Reply, seen: &Mutex<Vec<Json>>) {
    let mut reader = BufReader::new(stream.try_clone().expect("clone stream"));
    let mut length = 0usize;
    let mut line = String::new();
    loop {
        line.clear();
        if reader.read_line(&mut line).unwrap_or(0) == 0 {
            return;
        }
        let header = line.trim_end();
        if header.is_empty() {
            break;
        }
        if let Some((k, v)) = header.split_once(':') {
            if k.eq_ignore_ascii_case("content-length") {
                length = v.trim().parse().unwrap_or(0);
            }
        }
    }
    let mut body = vec![0; length];
    if reader.read_exact(&mut body).is_err() {
        return;
    }
    seen.lock().unwrap().push(serde_json::from_slice(&body).unwrap_or(Json::Null));

    let (status, payload) = match reply {
        Reply::Content(text) => (200, json!({"choices": [{"index": 0, "message": {"role": "assistant", "content": text}}]})),
        Reply::Stall(wait) => {
            thread::sleep(*wait);
            (200, json!({"choices": [{"message": {"role": "assistant", "content": "MATCH (m:Material) RETURN m.name"}}]}))
        }
        Reply::Status(code) => (*code, json!({"error": "stub failure"})),
    };
    let body = payload.to_string();
    let mut stream = stream;
    let _ = write!(
        stream,
        "HTTP/1.1 {status} Stub\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    );
    let _ = stream.flush();
}

/// The system message of a recorded request.
pub fn system_message(request: &Json) -> &str {
    request.pointer("/messages/0/content").and_then(Json::as_str).unwrap_or_default()
}

pub fn user_message(request: &Json) -> &str {
    request.pointer("/messages/1/content").and_then(Json::as_str).unwrap_or_default()
}
