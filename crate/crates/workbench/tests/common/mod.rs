#![allow(dead_code)]

use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Stdio};
use std::time::Duration;

use serde_json::Value;

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_evalbench")
}

pub fn bundle_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../bundles/cloud-services")
}

/// The service binary running on an ephemeral port.
pub struct Service {
    child: Child,
    pub base: String,
}

impl Service {
    pub fn start(store: &Path) -> Service {
        let mut child = Command::new(bin())
            .args(["serve", "--addr", "127.0.0.1:0", "--store"])
            .arg(store)
            .arg("--bundle")
            .arg(bundle_dir())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .expect("service starts");
        let stdout = child.stdout.take().expect("piped stdout");
        let mut line = String::new();
        BufReader::new(stdout).read_line(&mut line).expect("service announces its address");
        let addr = line.trim().strip_prefix("listening on ").unwrap_or_else(|| panic!("unexpected banner {line:?}")).to_string();
        Service { child, base: format!("http://{addr}") }
    }

    /// SIGKILL, no chance to flush or clean up.
    pub fn kill(mut self) {
        self.child.kill().expect("kill service");
        self.child.wait().expect("reap service");
    }

    fn agent() -> ureq::Agent {
        ureq::AgentBuilder::new().timeout(Duration::from_secs(60)).build()
    }

    fn finish(result: Result<ureq::Response, ureq::Error>) -> (u16, Value) {
        let response = match result {
            Ok(r) => r,
            Err(ureq::Error::Status(_, r)) => r,
            Err(e) => panic!("transport error: {e}"),
        };
        let status = response.status();
        let text = response.into_string().expect("response body");
        let body = serde_json::from_str(&text).unwrap_or(Value::String(text));
        (status, body)
    }

    pub fn get(&self, path: &str) -> (u16, Value) {
        Self::finish(Self::agent().get(&format!("{}{path}", self.base)).call())
    }

    pub fn post(&self, path: &str, body: &Value) -> (u16, Value) {
        Self::finish(Self::agent().post(&format!("{}{path}", self.base)).send_json(body.clone()))
    }

    pub fn post_with_id(&self, path: &str, body: &Value, request_id: &str) -> (u16, Value) {
        Self::finish(Self::agent().post(&format!("{}{path}", self.base)).set("x-request-id", request_id).send_json(body.clone()))
    }
}

impl Drop for Service {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
