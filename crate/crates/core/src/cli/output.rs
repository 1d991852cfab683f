use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::render;
use super::report::RunReport;
use super::OutputFormat;
use crate::{Error, Result};

/// Writes `bytes` to a sibling temp file, syncs it, then renames it into
/// place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidParameter(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    result.map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

/// Emits the requested formats under `dir` and returns the paths written.
pub fn write_outputs(report: &RunReport, dir: &Path, formats: &[OutputFormat]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut put = |name: &str, bytes: &[u8]| -> Result<()> {
        let p = dir.join(name);
        write_atomic(&p, bytes)?;
        written.push(p);
        Ok(())
    };
    if formats.contains(&OutputFormat::Json) {
        put("report.json", report.to_json().as_bytes())?;
    }
    if formats.contains(&OutputFormat::Csv) {
        put("curves.csv", &render::curves_csv(report)?)?;
        if !report.breakdowns.is_empty() {
            put("breakdown.csv", &render::breakdown_csv(report)?)?;
        }
        if !report.deltas.is_empty() {
            put("deltas.csv", &render::deltas_csv(report)?)?;
        }
        if !report.histograms.is_empty() {
            put("histograms.csv", &render::histograms_csv(report)?)?;
        }
    }
    if formats.contains(&OutputFormat::Svg) {
        let svg = if report.histograms.is_empty() {
            render::curves_svg(report)
        } else {
            render::histograms_svg(report)
        };
        put("chart.svg", svg.as_bytes())?;
    }
    Ok(written)
}
