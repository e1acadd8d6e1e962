//! Errors, input loading, output sinks and the run manifest.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use ftswilcox::io::load_sample_csv;
use ftswilcox::FunctionalSample;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input { path: PathBuf, message: String },
    Core(ftswilcox::Error),
    Output { path: Option<PathBuf>, message: String },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Input { .. } => "input",
            CliError::Core(e) => match e {
                ftswilcox::Error::Validation(_) => "validation",
                ftswilcox::Error::Parameter(_) => "parameter",
                ftswilcox::Error::GridMismatch(_) => "grid_mismatch",
                ftswilcox::Error::Parse { .. } => "parse",
                ftswilcox::Error::Unsupported(_) => "unsupported",
                ftswilcox::Error::Io(_) => "io",
            },
            CliError::Output { .. } => "io",
        }
    }

    /// 2 for anything the caller can fix, 1 for failures of the run itself.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(ftswilcox::Error::Io(_)) | CliError::Output { .. } => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Input { path, message } => write!(f, "{}: {message}", path.display()),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Output { path: Some(p), message } => write!(f, "{}: {message}", p.display()),
            CliError::Output { path: None, message } => write!(f, "stdout: {message}"),
        }
    }
}

impl From<ftswilcox::Error> for CliError {
    fn from(e: ftswilcox::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn require_seed(seed: Option<u64>, what: &str) -> CliResult<u64> {
    seed.ok_or_else(|| CliError::Usage(format!("--seed is required for {what}")))
}

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Everything needed to repeat a run: command, parameters, seed, and the
/// digests of what went in and came out.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub version: String,
}

/// Collects inputs and outputs of one run and writes the manifest next to the
/// first file output.
pub struct Run {
    command: String,
    parameters: serde_json::Value,
    seed: Option<u64>,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
}

impl Run {
    pub fn new(command: &str, parameters: serde_json::Value, seed: Option<u64>) -> Self {
        Run {
            command: command.to_string(),
            parameters,
            seed,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn read_bytes(&mut self, path: &Path) -> CliResult<Vec<u8>> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Input {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        self.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(bytes)
    }

    pub fn load_sample(&mut self, path: &Path) -> CliResult<FunctionalSample> {
        let bytes = self.read_bytes(path)?;
        Ok(load_sample_csv(bytes.as_slice())?)
    }

    /// Renders with `render` and writes to `path`, or to stdout when absent.
    pub fn emit(
        &mut self,
        path: Option<&Path>,
        render: impl FnOnce(&mut Vec<u8>) -> ftswilcox::Result<()>,
    ) -> CliResult<()> {
        let mut bytes = Vec::new();
        render(&mut bytes)?;
        match path {
            Some(p) => {
                std::fs::write(p, &bytes).map_err(|e| CliError::Output {
                    path: Some(p.to_path_buf()),
                    message: e.to_string(),
                })?;
                self.outputs.push(FileDigest {
                    path: p.display().to_string(),
                    sha256: sha256_hex(&bytes),
                });
            }
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(&bytes)
                    .and_then(|_| out.flush())
                    .map_err(|e| CliError::Output {
                        path: None,
                        message: e.to_string(),
                    })?;
            }
        }
        Ok(())
    }

    pub fn emit_json<T: Serialize>(&mut self, path: Option<&Path>, value: &T) -> CliResult<()> {
        self.emit(path, |buf| {
            serde_json::to_writer_pretty(&mut *buf, value)
                .map_err(|e| ftswilcox::Error::Io(std::io::Error::other(e)))?;
            buf.push(b'\n');
            Ok(())
        })
    }

    /// Writes `<first output>.manifest.json`; runs that only wrote to stdout
    /// have nowhere to put one.
    pub fn finish(self) -> CliResult<()> {
        let Some(first) = self.outputs.first() else {
            return Ok(());
        };
        let path = PathBuf::from(format!("{}.manifest.json", first.path));
        let manifest = RunManifest {
            command: self.command,
            parameters: self.parameters,
            seed: self.seed,
            inputs: self.inputs,
            outputs: self.outputs,
            version: env!("CARGO_PKG_VERSION").to_string(),
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| CliError::Output {
            path: Some(path),
            message: e.to_string(),
        })
    }
}
