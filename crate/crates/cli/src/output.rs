use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::CliError;

pub fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

/// Writes `dir/name` through a temporary sibling and a rename, so readers never
/// see a partial file.
pub fn write_atomic<F>(dir: &Path, name: &str, body: F) -> Result<PathBuf, CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp.{}", std::process::id()));
    let result = (|| {
        let mut w = BufWriter::new(File::create(&tmp)?);
        body(&mut w)?;
        w.flush()?;
        w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
        fs::rename(&tmp, &target)
    })();
    if let Err(source) = result {
        let _ = fs::remove_file(&tmp);
        return Err(CliError::Io { path: target, source });
    }
    Ok(target)
}

/// `manifest.txt`: what ran, with which settings, how long it took.
pub struct Manifest {
    lines: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        let mut m = Manifest { lines: Vec::new() };
        m.set("command", command);
        m.set("version", env!("CARGO_PKG_VERSION"));
        m
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    pub fn write(mut self, dir: &Path, elapsed: Duration, files: &[PathBuf]) -> Result<(), CliError> {
        self.set("wall_time_seconds", format!("{:.3}", elapsed.as_secs_f64()));
        let names: Vec<String> =
            files.iter().filter_map(|p| p.file_name()).map(|n| n.to_string_lossy().into_owned()).collect();
        self.set("outputs", names.join(","));
        write_atomic(dir, "manifest.txt", |w| {
            for (k, v) in &self.lines {
                writeln!(w, "{k}={v}")?;
            }
            Ok(())
        })?;
        Ok(())
    }
}
