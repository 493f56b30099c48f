//! Directory-per-project persistence.
//!
//! ```text
//! <root>/<project-id>/journal.jsonl   one JournalEntry per line, append-only
//! <root>/<project-id>/snapshot.json   derived; rewritten after every change
//! <root>/<project-id>/raw/<sha256>.txt  archived benchmark output
//! <root>/requests/<sha256(request id)>  project id created by a request
//! ```
//!
//! The journal is the source of truth. A final line without its newline is
//! the trace of an interrupted write and is dropped on replay.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use thiserror::Error;

use super::{EngineError, ImplementationPayload, JournalEntry, Project, StepId, StepPayload};
use crate::artefact::KnowledgeBundle;
use crate::digest::sha256_hex;
use crate::runner::{execute_plan_with, AdapterDef, ExecutionOptions, RunnerError};

pub const JOURNAL_FILE: &str = "journal.jsonl";
pub const SNAPSHOT_FILE: &str = "snapshot.json";
const RAW_DIR: &str = "raw";
const REQUESTS_DIR: &str = "requests";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path} line {line}: {reason}")]
    Corrupt { path: String, line: usize, reason: String },
    #[error("unknown project `{0}`")]
    NotFound(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Runner(#[from] RunnerError),
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.display().to_string(), source }
}

/// File-backed project store with per-project write serialisation.
#[derive(Debug)]
pub struct ProjectStore {
    root: PathBuf,
    locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

impl ProjectStore {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(io(&root))?;
        Ok(ProjectStore { root, locks: Mutex::new(HashMap::new()) })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn project_dir(&self, id: &str) -> PathBuf {
        self.root.join(id)
    }

    fn journal_path(&self, id: &str) -> PathBuf {
        self.project_dir(id).join(JOURNAL_FILE)
    }

    pub fn exists(&self, id: &str) -> bool {
        !id.is_empty() && !id.contains(['/', '\\', '.']) && self.journal_path(id).is_file()
    }

    /// Ids of all stored projects, sorted.
    pub fn list(&self) -> Result<Vec<String>, StoreError> {
        let mut ids: Vec<String> = fs::read_dir(&self.root)
            .map_err(io(&self.root))?
            .filter_map(|e| e.ok())
            .filter_map(|e| e.file_name().into_string().ok())
            .filter(|id| self.exists(id))
            .collect();
        ids.sort();
        Ok(ids)
    }

    /// Lock serialising mutations of one project.
    pub fn lock(&self, id: &str) -> Arc<Mutex<()>> {
        self.locks.lock().expect("lock table poisoned").entry(id.to_string()).or_default().clone()
    }

    fn request_marker(&self, request_id: &str) -> PathBuf {
        self.root.join(REQUESTS_DIR).join(sha256_hex(request_id))
    }

    /// Creates and persists a new project. Retrying with the same request id
    /// returns the project created the first time.
    pub fn create(
        &self,
        bundle: &KnowledgeBundle,
        problem: &str,
        seed: u64,
        operator: &str,
        request_id: Option<String>,
    ) -> Result<Project, StoreError> {
        let _guard = request_id.as_ref().map(|r| self.lock(&format!("request:{r}")));
        let _held = _guard.as_ref().map(|g| g.lock().expect("lock poisoned"));
        if let Some(id) = request_id.as_deref().and_then(|r| self.recall_request(r)) {
            return self.load(&id);
        }
        let (project, entry) = Project::create(bundle, problem, seed, operator, request_id.clone())?;
        let dir = self.project_dir(&project.id);
        fs::create_dir_all(dir.join(RAW_DIR)).map_err(io(&dir))?;
        self.append(&project.id, std::slice::from_ref(&entry))?;
        self.write_snapshot(&project)?;
        if let Some(r) = &request_id {
            self.remember_request(r, &project.id)?;
        }
        Ok(project)
    }

    /// Project created under `request_id`, if that request was seen before.
    pub fn recall_request(&self, request_id: &str) -> Option<String> {
        fs::read_to_string(self.request_marker(request_id)).ok().map(|id| id.trim().to_string())
    }

    /// Records that `request_id` created `project_id`.
    pub fn remember_request(&self, request_id: &str, project_id: &str) -> Result<(), StoreError> {
        let marker = self.request_marker(request_id);
        let parent = marker.parent().expect("marker has a parent");
        fs::create_dir_all(parent).map_err(io(parent))?;
        fs::write(&marker, project_id).map_err(io(&marker))
    }

    /// Persists a project built elsewhere from its complete journal.
    pub fn insert(&self, entries: &[JournalEntry]) -> Result<Project, StoreError> {
        let project = Project::replay(entries).map_err(|reason| StoreError::Corrupt { path: "<import>".into(), line: 1, reason })?;
        let dir = self.project_dir(&project.id);
        fs::create_dir_all(dir.join(RAW_DIR)).map_err(io(&dir))?;
        self.append(&project.id, entries)?;
        self.write_snapshot(&project)?;
        Ok(project)
    }

    /// Reads the journal, dropping an interrupted final line.
    pub fn read_journal(&self, id: &str) -> Result<Vec<JournalEntry>, StoreError> {
        if !self.exists(id) {
            return Err(StoreError::NotFound(id.to_string()));
        }
        let path = self.journal_path(id);
        let text = fs::read_to_string(&path).map_err(io(&path))?;
        let complete = text.ends_with('\n');
        let lines: Vec<&str> = text.lines().collect();
        let mut entries = Vec::with_capacity(lines.len());
        for (i, line) in lines.iter().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<JournalEntry>(line) {
                Ok(e) => entries.push(e),
                Err(_) if i + 1 == lines.len() && !complete => break,
                Err(e) => return Err(StoreError::Corrupt { path: path.display().to_string(), line: i + 1, reason: e.to_string() }),
            }
        }
        Ok(entries)
    }

    /// Rebuilds a project from its journal.
    pub fn load(&self, id: &str) -> Result<Project, StoreError> {
        let entries = self.read_journal(id)?;
        Project::replay(&entries).map_err(|reason| StoreError::Corrupt { path: self.journal_path(id).display().to_string(), line: 1, reason })
    }

    /// The last written snapshot, which may lag the journal after a crash.
    pub fn snapshot(&self, id: &str) -> Result<Project, StoreError> {
        let path = self.project_dir(id).join(SNAPSHOT_FILE);
        let text = fs::read_to_string(&path).map_err(io(&path))?;
        serde_json::from_str(&text).map_err(|e| StoreError::Corrupt { path: path.display().to_string(), line: e.line(), reason: e.to_string() })
    }

    fn append(&self, id: &str, entries: &[JournalEntry]) -> Result<(), StoreError> {
        if entries.is_empty() {
            return Ok(());
        }
        let path = self.journal_path(id);
        let mut file = OpenOptions::new().create(true).read(true).append(true).open(&path).map_err(io(&path))?;
        drop_partial_tail(&mut file).map_err(io(&path))?;
        let mut buf = String::new();
        for e in entries {
            buf.push_str(&serde_json::to_string(e).expect("journal entries serialise"));
            buf.push('\n');
        }
        file.write_all(buf.as_bytes()).map_err(io(&path))?;
        file.sync_data().map_err(io(&path))
    }

    fn write_snapshot(&self, project: &Project) -> Result<(), StoreError> {
        let dir = self.project_dir(&project.id);
        let tmp = dir.join(format!("{SNAPSHOT_FILE}.tmp"));
        let text = serde_json::to_string_pretty(project).expect("projects serialise");
        fs::write(&tmp, text).map_err(io(&tmp))?;
        fs::rename(&tmp, dir.join(SNAPSHOT_FILE)).map_err(io(&dir))
    }

    /// Loads `id`, lets `change` mutate it under the project lock, then
    /// journals whatever entries it produced.
    pub fn update<F>(&self, id: &str, change: F) -> Result<Project, StoreError>
    where
        F: FnOnce(&mut Project) -> Result<Vec<JournalEntry>, EngineError>,
    {
        let lock = self.lock(id);
        let _held = lock.lock().expect("lock poisoned");
        let mut project = self.load(id)?;
        let entries = change(&mut project)?;
        self.append(id, &entries)?;
        if !entries.is_empty() {
            self.write_snapshot(&project)?;
        }
        Ok(project)
    }

    pub fn submit(
        &self,
        bundle: &KnowledgeBundle,
        id: &str,
        step: StepId,
        iteration: Option<u32>,
        payload: StepPayload,
        operator: &str,
        request_id: Option<String>,
    ) -> Result<Project, StoreError> {
        self.update(id, |p| {
            let it = iteration.unwrap_or_else(|| p.expected_iteration(step));
            p.submit(bundle, step, it, payload, operator, request_id)
        })
    }

    pub fn begin_iteration(&self, id: &str, operator: &str, request_id: Option<String>) -> Result<Project, StoreError> {
        self.update(id, |p| p.begin_iteration(operator, request_id))
    }

    /// Archives raw benchmark output and returns its digest.
    pub fn store_raw(&self, id: &str, text: &str) -> Result<String, StoreError> {
        let digest = sha256_hex(text);
        let dir = self.project_dir(id).join(RAW_DIR);
        fs::create_dir_all(&dir).map_err(io(&dir))?;
        let path = dir.join(format!("{digest}.txt"));
        if !path.exists() {
            fs::write(&path, text).map_err(io(&path))?;
        }
        Ok(digest)
    }

    pub fn raw_output(&self, id: &str, digest: &str) -> Option<String> {
        if !digest.chars().all(|c| c.is_ascii_hexdigit()) {
            return None;
        }
        fs::read_to_string(self.project_dir(id).join(RAW_DIR).join(format!("{digest}.txt"))).ok()
    }

    /// Executes the current iteration's design with `adapter`, journaling
    /// each run as it completes, then submits the implementation step.
    ///
    /// On a failure-budget abort the partial runs stay in the journal and the
    /// step remains open.
    pub fn run_campaign(
        &self,
        bundle: &KnowledgeBundle,
        id: &str,
        adapter: &AdapterDef,
        options: &ExecutionOptions,
        operator: &str,
        request_id: Option<String>,
    ) -> Result<Project, StoreError> {
        let lock = self.lock(id);
        let _held = lock.lock().expect("lock poisoned");
        let mut project = self.load(id)?;
        if request_id.as_ref().is_some_and(|r| project.requests.contains(r)) {
            return Ok(project);
        }
        let iteration = project.iteration;
        project.check_gate(StepId::ExperimentalImplementation, iteration)?;
        let design = project.design(iteration).expect("gated").clone();
        let plan = crate::doe::full_factorial(&design).map_err(|e| EngineError::Contract {
            step: StepId::ExperimentalDesign,
            reason: e.to_string(),
        })?;
        adapter.check_against(&plan)?;

        let start = project.start_campaign(plan.len())?;
        self.append(id, &[start])?;
        self.write_snapshot(&project)?;

        let mut failure: Option<StoreError> = None;
        let result = execute_plan_with(&plan, adapter, options, |record, output| {
            if failure.is_some() {
                return;
            }
            let outcome = self
                .store_raw(id, &output.stdout)
                .and_then(|_| project.complete_run(record.clone()).map_err(StoreError::from))
                .and_then(|entry| self.append(id, &[entry]));
            if let Err(e) = outcome {
                failure = Some(e);
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        let execution = match result {
            Ok(execution) => execution,
            Err(e) => {
                let entries = project.note(Some(StepId::ExperimentalImplementation), "aborted", &e.to_string(), Vec::new(), None)?;
                self.append(id, &entries)?;
                self.write_snapshot(&project)?;
                return Err(e.into());
            }
        };
        let payload = StepPayload::ExperimentalImplementation(Box::new(ImplementationPayload { adapter: adapter.clone(), execution }));
        let entries = project.submit(bundle, StepId::ExperimentalImplementation, iteration, payload, operator, request_id)?;
        self.append(id, &entries)?;
        self.write_snapshot(&project)?;
        Ok(project)
    }
}

/// Truncates bytes after the last newline left by an interrupted write.
fn drop_partial_tail(file: &mut File) -> std::io::Result<()> {
    let len = file.metadata()?.len();
    if len == 0 {
        return Ok(());
    }
    let mut last = [0u8];
    file.seek(SeekFrom::Start(len - 1))?;
    file.read_exact(&mut last)?;
    if last[0] == b'\n' {
        return Ok(());
    }
    let mut content = Vec::new();
    file.seek(SeekFrom::Start(0))?;
    file.read_to_end(&mut content)?;
    let keep = content.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
    file.set_len(keep as u64)
}
