use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use subordination::simulate::PathSample;

use crate::error::CliError;

/// 17 significant digits; parses back to the same double.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.flush().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// `out` for a single result, `stem-k.ext` for the k-th of several.
pub fn numbered(out: &Path, k: usize, total: usize) -> PathBuf {
    if total == 1 {
        return out.to_path_buf();
    }
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}-{k}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{k}"),
    };
    out.with_file_name(name)
}

pub fn path_csv(p: &PathSample) -> String {
    let mut s = String::from("t,value\n");
    for (t, v) in p.grid.times().iter().zip(&p.values) {
        writeln!(s, "{},{}", num(*t), num(*v)).expect("write to string");
    }
    s
}

pub fn series_csv(header: &str, rows: &[Vec<f64>]) -> String {
    let mut s = format!("{header}\n");
    for r in rows {
        let line: Vec<String> = r.iter().map(|x| num(*x)).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

/// Reads a `t,value` file back.
pub fn read_path_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("t,value") {
        return Err(CliError::Spec(format!("{}: expected header t,value", path.display())));
    }
    let (mut t, mut v) = (Vec::new(), Vec::new());
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = || CliError::Spec(format!("{}:{}: expected two numbers", path.display(), i + 2));
        let (a, b) = line.split_once(',').ok_or_else(bad)?;
        t.push(a.trim().parse::<f64>().map_err(|_| bad())?);
        v.push(b.trim().parse::<f64>().map_err(|_| bad())?);
    }
    Ok((t, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 123456.789, std::f64::consts::PI] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn numbered_names() {
        assert_eq!(numbered(Path::new("a/p.csv"), 2, 3), PathBuf::from("a/p-2.csv"));
        assert_eq!(numbered(Path::new("p.csv"), 0, 1), PathBuf::from("p.csv"));
    }
}
