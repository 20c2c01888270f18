//! Atomic file output and the fixed numeric format shared by every file:
//! scientific notation with 17 significant digits, so every double
//! round-trips losslessly and repeated runs are byte-identical.

use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::{CliError, Result};

/// One double, formatted losslessly (17 significant digits).
pub fn fmt_f(value: f64) -> String {
    format!("{value:.16e}")
}

/// Writes `content` to `dir/name` atomically: the bytes land in a
/// temporary file in the same directory first and are renamed over the
/// target, so a crash never leaves a half-written file.
pub fn write_atomic(dir: &Path, name: &str, content: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let target = dir.join(name);
    let io_err = |source| CliError::Io {
        path: target.clone(),
        source,
    };
    let temp = NamedTempFile::new_in(dir).map_err(io_err)?;
    std::fs::write(temp.path(), content).map_err(io_err)?;
    temp.persist(&target)
        .map_err(|persist| io_err(persist.error))?;
    Ok(target)
}

/// Builds a CSV from a header and row-producing closure over `0..rows`.
pub fn csv_table(header: &str, rows: usize, mut row: impl FnMut(usize) -> String) -> String {
    let mut out = String::with_capacity(rows * 64 + header.len() + 1);
    out.push_str(header);
    out.push('\n');
    for i in 0..rows {
        out.push_str(&row(i));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_round_trips_exactly() {
        for value in [
            0.0,
            1.0,
            100.0,
            -3.25,
            0.1,
            1.0 / 255.0,
            123456.789,
            f64::MIN_POSITIVE,
            1.7976931348623157e308,
        ] {
            let text = fmt_f(value);
            let back: f64 = text.parse().unwrap();
            assert_eq!(back.to_bits(), value.to_bits(), "{text}");
        }
    }

    #[test]
    fn tables_have_header_and_one_line_per_row() {
        let table = csv_table("a,b", 3, |i| format!("{i},{}", i * 2));
        assert_eq!(table, "a,b\n0,0\n1,2\n2,4\n");
    }

    #[test]
    fn atomic_writes_replace_existing_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_atomic(dir.path(), "out.csv", "first\n").unwrap();
        write_atomic(dir.path(), "out.csv", "second\n").unwrap();
        assert_eq!(std::fs::read_to_string(path).unwrap(), "second\n");
    }
}
