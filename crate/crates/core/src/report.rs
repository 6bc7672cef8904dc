//! Deterministic CSV artifacts and JSON run manifests.

use std::fs::File;
use std::io::{BufWriter, Write as _};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::Error;

/// Write an RFC 4180 CSV (CRLF line endings, header row) with every numeric
/// cell rendered as `{:.12e}` so files are byte-identical across runs.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<(), Error> {
    let mut out = BufWriter::new(File::create(path)?);
    write!(out, "{}\r\n", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.12e}")).collect();
        write!(out, "{}\r\n", cells.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// SHA-256 of a file's contents, hex-encoded.
pub fn sha256_hex(path: &Path) -> Result<String, Error> {
    let bytes = std::fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}

#[derive(Debug, Serialize)]
pub struct Artifact {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// JSON manifest describing one CLI invocation and its output files.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub artifacts: Vec<Artifact>,
}

impl Manifest {
    pub fn new(command: &str, parameters: serde_json::Value) -> Self {
        Self { command: command.to_string(), parameters, artifacts: Vec::new() }
    }

    pub fn add_artifact(&mut self, path: &Path) -> Result<(), Error> {
        let meta = std::fs::metadata(path)?;
        self.artifacts.push(Artifact {
            path: path.display().to_string(),
            sha256: sha256_hex(path)?,
            bytes: meta.len(),
        });
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<(), Error> {
        let mut out = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut out, self)?;
        out.write_all(b"\n")?;
        out.flush()?;
        Ok(())
    }
}

/// `dir/stem.csv` and `dir/stem.manifest.json` path pair.
pub fn artifact_paths(dir: &Path, stem: &str) -> (PathBuf, PathBuf) {
    (dir.join(format!("{stem}.csv")), dir.join(format!("{stem}.manifest.json")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_is_rfc4180_and_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.csv");
        let p2 = dir.path().join("b.csv");
        let rows = vec![vec![1.0, -2.5e-9], vec![std::f64::consts::PI, 0.0]];
        write_csv(&p1, &["x", "y"], &rows).unwrap();
        write_csv(&p2, &["x", "y"], &rows).unwrap();
        let b1 = std::fs::read(&p1).unwrap();
        assert_eq!(b1, std::fs::read(&p2).unwrap());
        let text = String::from_utf8(b1).unwrap();
        assert!(text.starts_with("x,y\r\n"));
        assert!(text.ends_with("\r\n"));
        assert!(text.contains("1.000000000000e0,-2.500000000000e-9"));
    }

    #[test]
    fn manifest_hashes_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("data.csv");
        write_csv(&csv, &["v"], &[vec![1.0]]).unwrap();
        let mut m = Manifest::new("test", serde_json::json!({"n": 1}));
        m.add_artifact(&csv).unwrap();
        let mpath = dir.path().join("data.manifest.json");
        m.write(&mpath).unwrap();
        let parsed: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&mpath).unwrap()).unwrap();
        let sha = parsed["artifacts"][0]["sha256"].as_str().unwrap();
        assert_eq!(sha.len(), 64);
        assert_eq!(sha, sha256_hex(&csv).unwrap());
        assert_eq!(parsed["artifacts"][0]["bytes"].as_u64().unwrap(), 21);
    }
}
