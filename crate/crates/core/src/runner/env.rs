use std::collections::BTreeMap;
use std::fs;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

/// Marker for fields the host would not reveal.
pub const UNAVAILABLE: &str = "unavailable";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSnapshot {
    pub captured_at: DateTime<Utc>,
    pub host: String,
    pub os: String,
    pub hardware: BTreeMap<String, String>,
    #[serde(default)]
    pub adapters: BTreeMap<String, String>,
}

fn read_trimmed(path: &str) -> Option<String> {
    fs::read_to_string(path).ok().map(|s| s.trim().to_string()).filter(|s| !s.is_empty())
}

pub(crate) fn host_name() -> String {
    read_trimmed("/proc/sys/kernel/hostname")
        .or_else(|| read_trimmed("/etc/hostname"))
        .or_else(|| std::env::var("HOSTNAME").ok().filter(|s| !s.is_empty()))
        .or_else(|| std::env::var("COMPUTERNAME").ok().filter(|s| !s.is_empty()))
        .unwrap_or_else(|| "unknown-host".to_string())
}

fn os_description() -> String {
    let pretty = read_trimmed("/etc/os-release").and_then(|text| {
        text.lines()
            .find_map(|l| l.strip_prefix("PRETTY_NAME="))
            .map(|v| v.trim_matches('"').to_string())
    });
    let kernel = read_trimmed("/proc/sys/kernel/osrelease");
    let mut parts = vec![format!("{} {}", std::env::consts::OS, std::env::consts::ARCH)];
    parts.extend(pretty);
    parts.extend(kernel.map(|k| format!("kernel {k}")));
    parts.join("; ")
}

fn hardware() -> BTreeMap<String, String> {
    let mut hw = BTreeMap::new();
    let cpuinfo = read_trimmed("/proc/cpuinfo");
    let model = cpuinfo.as_deref().and_then(|t| {
        t.lines()
            .find(|l| l.starts_with("model name"))
            .and_then(|l| l.split_once(':'))
            .map(|(_, v)| v.trim().to_string())
    });
    hw.insert("cpu_model".into(), model.unwrap_or_else(|| UNAVAILABLE.into()));
    hw.insert(
        "logical_cpus".into(),
        std::thread::available_parallelism().map(|n| n.to_string()).unwrap_or_else(|_| UNAVAILABLE.into()),
    );
    let mem = read_trimmed("/proc/meminfo").and_then(|t| {
        t.lines().find(|l| l.starts_with("MemTotal:")).map(|l| l["MemTotal:".len()..].trim().to_string())
    });
    hw.insert("memory_total".into(), mem.unwrap_or_else(|| UNAVAILABLE.into()));
    hw
}

/// Snapshot of the current host. Never fails: unknown fields hold
/// [`UNAVAILABLE`].
pub fn capture_environment() -> EnvironmentSnapshot {
    EnvironmentSnapshot {
        captured_at: Utc::now(),
        host: host_name(),
        os: os_description(),
        hardware: hardware(),
        adapters: BTreeMap::new(),
    }
}
