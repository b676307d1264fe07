//! Out-of-process embedding backend.
//!
//! The child process reads one JSON request per line on stdin,
//! `{"id": "...", "text": "..."}`, and answers each with one line on stdout,
//! `{"id": "...", "vector": [...]}`. Every vector must share the dimension
//! of the first one.

use std::cell::RefCell;
use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};

use idiomforge_core::sts::{Embedder, SentenceEmbedding};
use serde::{Deserialize, Serialize};

use crate::error::{ForgeError, Result};

#[derive(Serialize)]
struct Request<'a> {
    id: &'a str,
    text: &'a str,
}

#[derive(Deserialize)]
struct Response {
    id: String,
    vector: Vec<f64>,
}

struct Channel {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
    next_id: u64,
    dimension: Option<usize>,
    cache: HashMap<String, SentenceEmbedding>,
}

pub struct ProcessEmbedder {
    channel: RefCell<Channel>,
}

impl ProcessEmbedder {
    /// Spawns `command` through `sh -c`.
    pub fn spawn(command: &str) -> Result<Self> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| ForgeError::Config(format!("cannot start backend `{command}`: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(ProcessEmbedder {
            channel: RefCell::new(Channel {
                child,
                stdin,
                stdout,
                next_id: 0,
                dimension: None,
                cache: HashMap::new(),
            }),
        })
    }

    fn request(&self, text: &str) -> Result<SentenceEmbedding> {
        let mut ch = self.channel.borrow_mut();
        if let Some(hit) = ch.cache.get(text) {
            return Ok(hit.clone());
        }
        let id = ch.next_id.to_string();
        ch.next_id += 1;
        let line = serde_json::to_string(&Request { id: &id, text }).map_err(|e| ForgeError::Input(e.to_string()))?;
        let broken = |e: std::io::Error| ForgeError::Input(format!("backend pipe: {e}"));
        writeln!(ch.stdin, "{line}").map_err(broken)?;
        ch.stdin.flush().map_err(broken)?;
        let mut reply = String::new();
        if ch.stdout.read_line(&mut reply).map_err(broken)? == 0 {
            return Err(ForgeError::Input("backend closed its output".into()));
        }
        let response: Response =
            serde_json::from_str(&reply).map_err(|e| ForgeError::Input(format!("backend response: {e}")))?;
        if response.id != id {
            return Err(ForgeError::Input(format!("backend answered id {} to request {id}", response.id)));
        }
        let dim = response.vector.len();
        match ch.dimension {
            None => ch.dimension = Some(dim),
            Some(d) if d != dim => return Err(idiomforge_core::Error::DimensionMismatch(d, dim).into()),
            Some(_) => {}
        }
        let embedding = SentenceEmbedding::new(response.vector)?;
        ch.cache.insert(text.to_string(), embedding.clone());
        Ok(embedding)
    }
}

impl Embedder for ProcessEmbedder {
    fn embed(&self, text: &str) -> idiomforge_core::Result<SentenceEmbedding> {
        self.request(text).map_err(|e| match e {
            ForgeError::Core(core) => core,
            other => idiomforge_core::Error::Backend(other.to_string()),
        })
    }
}

impl Drop for ProcessEmbedder {
    fn drop(&mut self) {
        let ch = self.channel.get_mut();
        let _ = ch.child.kill();
        let _ = ch.child.wait();
    }
}
