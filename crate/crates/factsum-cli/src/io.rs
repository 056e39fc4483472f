//! Corpus reading and artifact writing.
//!
//! Corpora are JSON Lines: one record object per line, blank lines ignored.
//! A line whose object has a `_meta` key is a header written by a previous
//! run and is skipped on read. Every artifact this tool writes starts with
//! such a header carrying the tool name, version, command, and the resolved
//! configuration (minus `--jobs`, which never affects output bytes).
//!
//! Artifacts are written to a sibling `*.tmp` file and renamed into place on
//! success, so an aborted run never leaves a partial artifact behind.

use std::collections::HashSet;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};

use factsum::dataset::CorpusRecord;
use serde_json::Value;

use crate::errors::CliError;

/// Set once stdout's reader has gone away; later writes become no-ops.
static STDOUT_GONE: AtomicBool = AtomicBool::new(false);

/// Writes `text` to stdout. A broken pipe — the reader closed early, as when
/// output is piped into `head` — is not an error: the first one silences all
/// further stdout output and the run finishes normally. Any other stdout
/// write failure is fatal.
pub fn emit(text: &str) {
    if STDOUT_GONE.load(Ordering::Relaxed) {
        return;
    }
    let mut out = io::stdout().lock();
    let result = out.write_all(text.as_bytes()).and_then(|()| out.flush());
    if let Err(err) = result {
        if err.kind() == io::ErrorKind::BrokenPipe {
            STDOUT_GONE.store(true, Ordering::Relaxed);
            return;
        }
        eprintln!("factsum: cannot write to stdout: {err}");
        std::process::exit(1);
    }
}

/// [`emit`] plus a trailing newline.
pub fn emit_line(text: &str) {
    emit(text);
    emit("\n");
}

/// A parsed record plus the raw line it came from, so untouched records can
/// be passed through byte-identically.
#[derive(Debug, Clone)]
pub struct LoadedRecord {
    pub line_no: usize,
    pub raw: String,
    pub record: CorpusRecord,
}

/// Parsed corpus plus diagnostics for lines that were skipped (lenient mode).
pub struct ReadOutcome {
    pub records: Vec<LoadedRecord>,
    pub skipped: Vec<String>,
}

fn is_meta_line(line: &str) -> bool {
    serde_json::from_str::<Value>(line)
        .ok()
        .and_then(|v| v.as_object().map(|o| o.contains_key("_meta")))
        .unwrap_or(false)
}

/// Reads a JSONL corpus. In strict mode the first malformed record (bad
/// JSON, empty id, duplicate id) aborts with a data error; otherwise each
/// problem becomes a diagnostic and the line is skipped.
pub fn read_corpus(path: &Path, strict: bool) -> Result<ReadOutcome, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::Usage(format!("cannot open input {}: {e}", path.display())))?;
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    let mut seen_ids: HashSet<String> = HashSet::new();

    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| {
            CliError::Other(anyhow::anyhow!("failed reading {}: {e}", path.display()))
        })?;
        if line.trim().is_empty() || is_meta_line(line.trim()) {
            continue;
        }
        let problem = match serde_json::from_str::<CorpusRecord>(&line) {
            Ok(record) if record.id.is_empty() => Some("record has an empty id".to_string()),
            Ok(record) if !seen_ids.insert(record.id.clone()) => {
                Some(format!("duplicate record id {:?}", record.id))
            }
            Ok(record) => {
                records.push(LoadedRecord {
                    line_no,
                    raw: line,
                    record,
                });
                None
            }
            Err(e) => Some(format!("malformed record: {e}")),
        };
        if let Some(msg) = problem {
            let diagnostic = format!("{}:{line_no}: {msg}", path.display());
            if strict {
                return Err(CliError::Data(diagnostic));
            }
            skipped.push(diagnostic);
        }
    }
    Ok(ReadOutcome { records, skipped })
}

/// The `_meta` header line for an artifact.
pub fn meta_line(command: &str, config: Value) -> String {
    serde_json::to_string(&serde_json::json!({
        "_meta": {
            "tool": "factsum",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "config": config,
        }
    }))
    .expect("meta serializes")
}

/// Line-oriented artifact writer with write-then-rename semantics.
pub struct ArtifactWriter {
    tmp_path: PathBuf,
    final_path: PathBuf,
    /// `None` once finished; present means the temp file is still live.
    writer: Option<BufWriter<File>>,
}

impl ArtifactWriter {
    /// Opens the sibling temp file. The final path's parent directory must
    /// already exist (validated with the rest of the configuration).
    pub fn create(path: &Path) -> Result<Self, CliError> {
        let mut name = path
            .file_name()
            .ok_or_else(|| CliError::Usage(format!("{} is not a file path", path.display())))?
            .to_os_string();
        name.push(".tmp");
        let tmp_path = path.with_file_name(name);
        let file = File::create(&tmp_path).map_err(|e| {
            CliError::Usage(format!("cannot create output {}: {e}", path.display()))
        })?;
        Ok(Self {
            tmp_path,
            final_path: path.to_path_buf(),
            writer: Some(BufWriter::new(file)),
        })
    }

    pub fn write_line(&mut self, line: &str) -> Result<(), CliError> {
        let writer = self.writer.as_mut().expect("writer is open until finish");
        writer
            .write_all(line.as_bytes())
            .and_then(|_| writer.write_all(b"\n"))
            .map_err(|e| CliError::Other(anyhow::anyhow!("write failed: {e}")))
    }

    /// Flushes and renames the temp file over the final path.
    pub fn finish(mut self) -> Result<(), CliError> {
        let mut writer = self.writer.take().expect("writer is open until finish");
        writer
            .flush()
            .map_err(|e| CliError::Other(anyhow::anyhow!("flush failed: {e}")))?;
        drop(writer);
        std::fs::rename(&self.tmp_path, &self.final_path).map_err(|e| {
            CliError::Other(anyhow::anyhow!(
                "cannot move artifact into place at {}: {e}",
                self.final_path.display()
            ))
        })
    }
}

impl Drop for ArtifactWriter {
    fn drop(&mut self) {
        // Best effort: never leave the temp file behind on an abort.
        if self.writer.take().is_some() {
            let _ = std::fs::remove_file(&self.tmp_path);
        }
    }
}

/// Validates an output path before any processing: parent directory must
/// exist so failures happen before work starts, not after.
pub fn validate_output_path(path: &Path) -> Result<(), CliError> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(parent) = parent {
        if !parent.is_dir() {
            return Err(CliError::Usage(format!(
                "output directory {} does not exist",
                parent.display()
            )));
        }
    }
    Ok(())
}

/// The audit-sidecar path for a filter output: `out.jsonl` →
/// `out.audit.jsonl` (appends when the output has no extension).
pub fn audit_path(output: &Path) -> PathBuf {
    match output.extension().and_then(|e| e.to_str()) {
        Some(ext) => output.with_extension(format!("audit.{ext}")),
        None => output.with_extension("audit.jsonl"),
    }
}
