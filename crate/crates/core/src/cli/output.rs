use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
    pub bytes: u64,
}

pub fn digest_file(path: &Path) -> Result<InputDigest, CliError> {
    let mut file = std::fs::File::open(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 1 << 16];
    let mut bytes = 0u64;
    loop {
        let n = file.read(&mut buf).map_err(crate::DiiError::from)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
        bytes += n as u64;
    }
    let sha256 = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
    Ok(InputDigest {
        path: path.to_path_buf(),
        sha256,
        bytes,
    })
}

/// Run record written to `<out>/manifest.json`: once before any result
/// file, and again when the run ends. Timings live only here, so result
/// files stay byte-stable across runs.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub argv: Vec<String>,
    pub config: serde_json::Value,
    pub inputs: Vec<InputDigest>,
    pub seed: u64,
    pub status: String,
    pub timings_s: BTreeMap<String, f64>,
    pub outputs: Vec<String>,
}

/// Output directory plus its manifest.
pub struct RunDir {
    dir: PathBuf,
    manifest: Manifest,
    phase_start: Instant,
}

impl RunDir {
    pub fn create(
        dir: &Path,
        command: &str,
        config: &impl Serialize,
        inputs: Vec<InputDigest>,
        seed: u64,
    ) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(crate::DiiError::from)?;
        let run = Self {
            dir: dir.to_path_buf(),
            manifest: Manifest {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                command: command.to_string(),
                argv: std::env::args().collect(),
                config: serde_json::to_value(config).map_err(crate::DiiError::from)?,
                inputs,
                seed,
                status: "running".into(),
                timings_s: BTreeMap::new(),
                outputs: Vec::new(),
            },
            phase_start: Instant::now(),
        };
        run.write_manifest()?;
        Ok(run)
    }

    fn write_manifest(&self) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(&self.manifest).map_err(crate::DiiError::from)?;
        text.push('\n');
        std::fs::write(self.dir.join("manifest.json"), text).map_err(crate::DiiError::from)?;
        Ok(())
    }

    /// Records the time since the previous phase ended.
    pub fn phase_done(&mut self, name: &str) {
        let now = Instant::now();
        self.manifest
            .timings_s
            .insert(name.to_string(), (now - self.phase_start).as_secs_f64());
        self.phase_start = now;
    }

    /// Writes one result file through `write` and lists it in the manifest.
    pub fn write<F>(&mut self, name: &str, write: F) -> Result<(), CliError>
    where
        F: FnOnce(std::io::BufWriter<std::fs::File>) -> crate::Result<()>,
    {
        let file = std::fs::File::create(self.dir.join(name)).map_err(crate::DiiError::from)?;
        write(std::io::BufWriter::new(file))?;
        self.manifest.outputs.push(name.to_string());
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        self.write(name, |mut out| {
            serde_json::to_writer_pretty(&mut out, value)?;
            std::io::Write::write_all(&mut out, b"\n")?;
            Ok(())
        })
    }

    pub fn finish(mut self, status: &str) -> Result<(), CliError> {
        self.manifest.status = status.to_string();
        self.write_manifest()
    }
}
