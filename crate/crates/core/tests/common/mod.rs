#![allow(dead_code)]

pub mod contract;
pub mod oracle;

use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::thread::JoinHandle;

use emoaug::lexicon::{Lexicons, DEFAULT_TAU};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/fixtures")
}

pub fn lexicons() -> Lexicons {
    let d = fixtures();
    Lexicons::build(
        &d.join("nrc_emotion_lexicon.txt"),
        &d.join("se_words.txt"),
        &d.join("sentiwordnet.txt"),
        DEFAULT_TAU,
    )
    .expect("fixture lexicons build")
    .0
}

/// A recorded HTTP exchange: the request as seen by the server and the
/// canned response it sent back.
#[derive(Debug, Clone)]
pub struct Exchange {
    pub method: String,
    pub url: String,
    pub headers: Vec<(String, String)>,
    pub body: String,
}

pub struct Reply {
    pub status: u16,
    pub headers: Vec<(&'static str, String)>,
    pub body: String,
}

impl Reply {
    pub fn json(status: u16, body: impl Into<String>) -> Self {
        Reply {
            status,
            headers: vec![("Content-Type", "application/json".into())],
            body: body.into(),
        }
    }
}

/// Serves `replies` in order, one per request, then stops. Returns the base
/// URL, a receiver of recorded requests and the server thread.
pub fn replay_server(replies: Vec<Reply>) -> (String, mpsc::Receiver<Exchange>, JoinHandle<()>) {
    let server = tiny_http::Server::http("127.0.0.1:0").expect("bind");
    let url = format!("http://{}", server.server_addr().to_ip().expect("ip address"));
    let (tx, rx) = mpsc::channel();
    let handle = std::thread::spawn(move || {
        for reply in replies {
            let Ok(mut req) = server.recv() else { return };
            let mut body = String::new();
            let _ = req.as_reader().read_to_string(&mut body);
            let _ = tx.send(Exchange {
                method: req.method().to_string(),
                url: req.url().to_string(),
                headers: req
                    .headers()
                    .iter()
                    .map(|h| (h.field.to_string(), h.value.to_string()))
                    .collect(),
                body,
            });
            let mut resp = tiny_http::Response::from_string(reply.body).with_status_code(reply.status);
            for (k, v) in reply.headers {
                resp.add_header(tiny_http::Header::from_bytes(k.as_bytes(), v.as_bytes()).expect("header"));
            }
            let _ = req.respond(resp);
        }
    });
    (url, rx, handle)
}
