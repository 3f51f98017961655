//! File emission: fixed-format numbers, CSV/`.dat` tables and atomic writes.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use floquet_pt::analysis::SweepRecord;
use serde::Serialize;

/// 17 significant digits in scientific notation, enough to round-trip an f64.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

pub const SWEEP_HEADER: [&str; 7] = ["x", "y", "pi", "label", "n", "re_e_plus", "im_e_plus"];

pub fn sweep_row(r: &SweepRecord) -> [String; 7] {
    let (label, n) = match r.label {
        Some(l) => (l.variant.as_str().to_string(), l.n.to_string()),
        None => ("Invalid".to_string(), String::new()),
    };
    [
        fmt_num(r.x),
        fmt_num(r.y),
        fmt_num(r.pi_value),
        label,
        n,
        fmt_num(r.re_quasi),
        fmt_num(r.im_quasi),
    ]
}

/// A table rendered as comma-separated text with a header row.
pub fn csv<R, I>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: AsRef<[String]>,
{
    table(header, rows, ",", "")
}

/// The same table, space-delimited, header behind a `#` for gnuplot.
pub fn dat<R, I>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: AsRef<[String]>,
{
    table(header, rows, " ", "# ")
}

fn table<R, I>(header: &[&str], rows: I, sep: &str, comment: &str) -> String
where
    I: IntoIterator<Item = R>,
    R: AsRef<[String]>,
{
    let mut out = String::new();
    out.push_str(comment);
    out.push_str(&header.join(sep));
    out.push('\n');
    for row in rows {
        out.push_str(&row.as_ref().join(sep));
        out.push('\n');
    }
    out
}

/// Writes `contents` to `dir/name` through a temporary file in the same
/// directory and a rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, &target)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map(|_| target)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> io::Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    write_atomic(dir, name, text.as_bytes())
}
