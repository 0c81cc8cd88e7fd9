use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

/// 17 significant digits; round-trips every `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// `5` → `"5"`, `2.5` → `"2.5"`; used in file names.
pub fn time_tag(t: f64) -> String {
    format!("{t}")
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.into(),
        source,
    })
}

pub fn suffixed(name: &str, suffix: &str) -> String {
    match name.rsplit_once('.') {
        Some((stem, ext)) => format!("{stem}{suffix}.{ext}"),
        None => format!("{name}{suffix}"),
    }
}

/// Writes a header and rows of pre-formatted fields.
pub fn write_csv<I, R>(path: PathBuf, header: &[&str], rows: I) -> Result<PathBuf>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let wrap = |source| CliError::Csv {
        path: path.clone(),
        source,
    };
    let mut w = csv::Writer::from_path(&path).map_err(wrap)?;
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>()).map_err(wrap)?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -9.115e-7, 1e300] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn names() {
        assert_eq!(time_tag(5.0), "5");
        assert_eq!(time_tag(2.5), "2.5");
        assert_eq!(suffixed("edge.csv", "_classical"), "edge_classical.csv");
    }
}
