//! CSV tables with a versioned schema line and JSON provenance sidecars.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// Rows plus the extra data that goes into the sidecar.
#[derive(Clone, Debug)]
pub struct Output<R> {
    /// Schema name and version, e.g. `spinprep.measure/1`.
    pub schema: &'static str,
    pub rows: Vec<R>,
    pub results: serde_json::Value,
}

/// Renders rows as CSV preceded by `# <schema>`.
pub fn render_csv<R: Serialize>(out: &Output<R>) -> Result<Vec<u8>> {
    let mut buf = format!("# {}\n", out.schema).into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for row in &out.rows {
            w.serialize(row).map_err(|e| CliError::config(format!("cannot encode row: {e}")))?;
        }
        w.flush().map_err(|source| CliError::Write { path: PathBuf::from("<buffer>"), source })?;
    }
    Ok(buf)
}

#[derive(Serialize)]
struct Sidecar<'a, C: Serialize> {
    tool: &'static str,
    version: &'static str,
    core_version: &'static str,
    command: &'a str,
    schema: &'static str,
    config: &'a C,
    config_hash: String,
    seed: Option<u64>,
    rows: usize,
    results: &'a serde_json::Value,
}

/// Hex SHA-256 of the config's canonical JSON encoding.
pub fn config_hash<C: Serialize>(config: &C) -> Result<String> {
    let bytes = serde_json::to_vec(config).map_err(|e| CliError::config(format!("cannot encode config: {e}")))?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

pub fn render_sidecar<R, C: Serialize>(
    command: &str,
    config: &C,
    seed: Option<u64>,
    out: &Output<R>,
) -> Result<Vec<u8>> {
    let sidecar = Sidecar {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        core_version: spinprep_core::VERSION,
        command,
        schema: out.schema,
        config,
        config_hash: config_hash(config)?,
        seed,
        rows: out.rows.len(),
        results: &out.results,
    };
    let mut bytes =
        serde_json::to_vec_pretty(&sidecar).map_err(|e| CliError::config(format!("cannot encode sidecar: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Sidecar location for a CSV written to `csv`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
fn stage(path: &Path, bytes: &[u8]) -> Result<tempfile::NamedTempFile> {
    let err = |source| CliError::Write { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(bytes).map_err(err)?;
    tmp.as_file().sync_all().map_err(err)?;
    Ok(tmp)
}

/// Writes the CSV and its sidecar, or the CSV alone to stdout when `path` is
/// `None`. Both files are staged before either is renamed into place.
pub fn emit<R: Serialize, C: Serialize>(
    command: &str,
    config: &C,
    seed: Option<u64>,
    out: &Output<R>,
    path: Option<&Path>,
) -> Result<()> {
    let csv = render_csv(out)?;
    let Some(path) = path else {
        let mut stdout = std::io::stdout().lock();
        return stdout
            .write_all(&csv)
            .and_then(|()| stdout.flush())
            .map_err(|source| CliError::Write { path: PathBuf::from("<stdout>"), source });
    };
    let json = render_sidecar(command, config, seed, out)?;
    let side = sidecar_path(path);
    let csv_tmp = stage(path, &csv)?;
    let json_tmp = stage(&side, &json)?;
    json_tmp.persist(&side).map_err(|e| CliError::Write { path: side.clone(), source: e.error })?;
    csv_tmp.persist(path).map_err(|e| CliError::Write { path: path.to_path_buf(), source: e.error })?;
    Ok(())
}
