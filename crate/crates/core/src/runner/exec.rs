use std::io::Read;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use chrono::Utc;
use wait_timeout::ChildExt;

use super::env::host_name;
use super::{
    capture_environment, parse_output, AdapterDef, Execution, Measurement, RunRecord, RunStatus, RunnerError,
};
use crate::digest::sha256_hex;
use crate::doe::{RunPlan, RunSpec};

/// Default share of the plan that may fail before execution stops.
pub const DEFAULT_FAILURE_BUDGET: f64 = 0.2;

const STDERR_EXCERPT: usize = 400;

#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionOptions {
    /// Capture a full environment snapshot for the campaign.
    pub capture_environment: bool,
    /// Tolerated failures are `max(1, floor(budget * runs))`; one more aborts.
    pub failure_budget: f64,
}

impl Default for ExecutionOptions {
    fn default() -> Self {
        ExecutionOptions { capture_environment: true, failure_budget: DEFAULT_FAILURE_BUDGET }
    }
}

impl ExecutionOptions {
    pub fn allowed_failures(&self, runs: usize) -> usize {
        ((self.failure_budget.max(0.0) * runs as f64).floor() as usize).max(1)
    }
}

/// Captured process output of one run, handed to the observer for archiving.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub stdout: String,
    pub stderr: String,
}

/// Executes `plan` with `adapter`, strictly sequentially in plan order.
pub fn execute_plan(plan: &RunPlan, adapter: &AdapterDef, options: &ExecutionOptions) -> Result<Execution, RunnerError> {
    execute_plan_with(plan, adapter, options, |_, _| {})
}

/// Like [`execute_plan`], calling `observe` after every completed run.
pub fn execute_plan_with<F>(
    plan: &RunPlan,
    adapter: &AdapterDef,
    options: &ExecutionOptions,
    mut observe: F,
) -> Result<Execution, RunnerError>
where
    F: FnMut(&RunRecord, &RunOutput),
{
    if plan.is_empty() {
        return Err(RunnerError::EmptyPlan);
    }
    adapter.check_against(plan)?;

    let environment = options.capture_environment.then(|| {
        let mut env = capture_environment();
        let version = adapter
            .version_command
            .as_deref()
            .and_then(|cmd| Command::new("sh").arg("-c").arg(cmd).output().ok())
            .and_then(|o| String::from_utf8_lossy(&o.stdout).lines().next().map(|l| l.trim().to_string()))
            .filter(|v| !v.is_empty())
            .unwrap_or_else(|| "unspecified".into());
        env.adapters.insert(adapter.name.clone(), version);
        env
    });
    let host = host_name();
    let allowed = options.allowed_failures(plan.len());
    let mut execution = Execution { plan: plan.clone(), adapter: adapter.name.clone(), environment, records: Vec::with_capacity(plan.len()) };
    let mut failed = 0;

    for spec in &plan.runs {
        let (record, output) = run_one(spec, adapter, &host, execution.records.last());
        if record.status != RunStatus::Ok {
            failed += 1;
        }
        observe(&record, &output);
        execution.records.push(record);
        if failed > allowed {
            return Err(RunnerError::BudgetExceeded { failed, allowed, total: plan.len(), partial: Box::new(execution) });
        }
    }
    Ok(execution)
}

fn run_one(spec: &RunSpec, adapter: &AdapterDef, host: &str, previous: Option<&RunRecord>) -> (RunRecord, RunOutput) {
    let command = adapter.render(spec);
    let mut started_at = Utc::now();
    if let Some(prev) = previous {
        started_at = started_at.max(prev.finished_at);
    }
    let timeout = Duration::from_secs_f64(adapter.timeout_secs);
    let clock = Instant::now();
    let outcome = spawn_and_wait(&command, timeout);
    let finished_at = (started_at + chrono::Duration::from_std(clock.elapsed()).unwrap_or_default()).max(Utc::now());

    let mut record = RunRecord {
        run: spec.run,
        combination: spec.combination.clone(),
        replicate: spec.replicate,
        block: spec.block.clone(),
        started_at,
        finished_at,
        host: host.to_string(),
        exit_code: None,
        raw_output_digest: String::new(),
        measurements: Default::default(),
        status: RunStatus::Ok,
        failure: None,
    };
    let output = match outcome {
        Err(e) => {
            record.status = RunStatus::Failed;
            record.failure = Some(format!("could not start `{command}`: {e}"));
            RunOutput { stdout: String::new(), stderr: String::new() }
        }
        Ok(Finished { status, stdout, stderr }) => {
            record.raw_output_digest = sha256_hex(stdout.as_bytes());
            match status {
                None => {
                    record.status = RunStatus::Timeout;
                    record.failure = Some(format!("timed out after {}s", adapter.timeout_secs));
                }
                Some(code) if code != 0 => {
                    record.exit_code = Some(code);
                    record.status = RunStatus::Failed;
                    record.failure = Some(format!("exit code {code}; stderr: {}", excerpt(&stderr)));
                }
                Some(code) => {
                    record.exit_code = Some(code);
                    let extraction = parse_output(&stdout, &adapter.rules);
                    record.measurements = extraction.values.into_iter().collect::<std::collections::BTreeMap<String, Measurement>>();
                    let missing: Vec<String> = extraction
                        .errors
                        .iter()
                        .map(|e| format!("{}: {}", e.metric, e.reason))
                        .collect();
                    if !missing.is_empty() {
                        record.status = RunStatus::Failed;
                        record.failure = Some(format!("extraction failed ({})", missing.join("; ")));
                    }
                }
            }
            RunOutput { stdout, stderr }
        }
    };
    (record, output)
}

fn excerpt(text: &str) -> String {
    let t = text.trim();
    match t.char_indices().nth(STDERR_EXCERPT) {
        Some((i, _)) => format!("{}…", &t[..i]),
        None => t.to_string(),
    }
}

struct Finished {
    /// `None` on timeout.
    status: Option<i32>,
    stdout: String,
    stderr: String,
}

fn spawn_and_wait(command: &str, timeout: Duration) -> std::io::Result<Finished> {
    let mut cmd = Command::new("sh");
    cmd.arg("-c").arg(command).stdin(Stdio::null()).stdout(Stdio::piped()).stderr(Stdio::piped());
    #[cfg(unix)]
    {
        use std::os::unix::process::CommandExt;
        cmd.process_group(0);
    }
    let mut child = cmd.spawn()?;
    let mut out_pipe = child.stdout.take().expect("piped stdout");
    let mut err_pipe = child.stderr.take().expect("piped stderr");
    let out_reader = std::thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = out_pipe.read_to_end(&mut buf);
        buf
    });
    let err_reader = std::thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = err_pipe.read_to_end(&mut buf);
        buf
    });
    let status = match child.wait_timeout(timeout)? {
        Some(status) => Some(exit_code(status)),
        None => {
            kill_tree(&mut child);
            let _ = child.wait();
            None
        }
    };
    let stdout = String::from_utf8_lossy(&out_reader.join().unwrap_or_default()).into_owned();
    let stderr = String::from_utf8_lossy(&err_reader.join().unwrap_or_default()).into_owned();
    Ok(Finished { status, stdout, stderr })
}

fn exit_code(status: std::process::ExitStatus) -> i32 {
    #[cfg(unix)]
    {
        use std::os::unix::process::ExitStatusExt;
        if let Some(sig) = status.signal() {
            return 128 + sig;
        }
    }
    status.code().unwrap_or(-1)
}

fn kill_tree(child: &mut std::process::Child) {
    #[cfg(unix)]
    {
        // the child leads its own process group; take the whole group down so
        // grandchildren release the output pipes
        let pgid = child.id() as libc::pid_t;
        unsafe {
            libc::kill(-pgid, libc::SIGKILL);
        }
    }
    let _ = child.kill();
}
