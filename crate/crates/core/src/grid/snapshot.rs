//! Plain-text field snapshot container.
//!
//! ```text
//! anomdiss-field 1
//! n 4
//! time 5.0000000000000000e-1
//! kappa 1.0000000000000000e-2
//! v(0,0) v(1,0) v(2,0) v(3,0)
//! v(0,1) ...
//! ...
//! ```
//!
//! One line per grid row `j` (constant `y = j/N`), `N` whitespace-separated
//! values `v(i, j)` in increasing `i`. Numbers are written with 17
//! significant digits so a read-back is bit-exact. Lines starting with `#`
//! may follow the first line and are ignored by the reader.

use std::io::{BufRead, Write};

use super::{PeriodicGrid, ScalarField};
use crate::error::{Error, Result};

pub const MAGIC: &str = "anomdiss-field";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub kappa: f64,
    pub field: ScalarField,
}

/// Formats `v` with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_snapshot<W: Write>(w: W, snap: &Snapshot) -> Result<()> {
    write_snapshot_annotated(w, snap, &[])
}

/// Like [`write_snapshot`], with `comments` written as `# ...` lines after
/// the format line.
pub fn write_snapshot_annotated<W: Write>(mut w: W, snap: &Snapshot, comments: &[String]) -> Result<()> {
    let n = snap.field.grid().n();
    writeln!(w, "{MAGIC} {VERSION}")?;
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    writeln!(w, "n {n}")?;
    writeln!(w, "time {}", fmt17(snap.time))?;
    writeln!(w, "kappa {}", fmt17(snap.kappa))?;
    let mut line = String::new();
    for row in snap.field.values().chunks(n) {
        line.clear();
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&fmt17(*v));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

fn header_value<'a>(line: Option<&'a str>, key: &str) -> Result<&'a str> {
    let line = line.ok_or_else(|| Error::Schema(format!("missing `{key}` header line")))?;
    let mut parts = line.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some(k), Some(v), None) if k == key => Ok(v),
        _ => Err(Error::Schema(format!("expected `{key} <value>`, found `{line}`"))),
    }
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Schema(format!("cannot parse {what} from `{s}`")))
}

pub fn read_snapshot<R: BufRead>(r: R) -> Result<Snapshot> {
    let text: Vec<String> = r.lines().collect::<std::io::Result<_>>()?;
    let mut lines = text.iter().map(String::as_str).filter(|l| !l.starts_with('#'));
    let version = header_value(lines.next(), MAGIC)?;
    if parse_num::<u32>(version, "version")? != VERSION {
        return Err(Error::Schema(format!("unsupported snapshot version {version}")));
    }
    let n: usize = parse_num(header_value(lines.next(), "n")?, "n")?;
    let grid = PeriodicGrid::new(n).map_err(|e| Error::Schema(e.to_string()))?;
    let time: f64 = parse_num(header_value(lines.next(), "time")?, "time")?;
    let kappa: f64 = parse_num(header_value(lines.next(), "kappa")?, "kappa")?;
    let mut values = Vec::with_capacity(grid.len());
    for j in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| Error::Schema(format!("snapshot truncated at row {j}")))?;
        let before = values.len();
        for tok in line.split_whitespace() {
            values.push(parse_num::<f64>(tok, "value")?);
        }
        if values.len() - before != n {
            return Err(Error::Schema(format!(
                "row {j} has {} values, expected {n}",
                values.len() - before
            )));
        }
    }
    if lines.any(|l| !l.trim().is_empty()) {
        return Err(Error::Schema("trailing data after last row".into()));
    }
    let field = ScalarField::from_values(grid, values)?;
    Ok(Snapshot { time, kappa, field })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_file_layout() {
        let grid = PeriodicGrid::new(4).unwrap();
        let field = ScalarField::from_fn(grid, |x, y| x + 10.0 * y);
        let snap = Snapshot {
            time: 0.5,
            kappa: 0.01,
            field,
        };
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &snap).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let golden = "\
anomdiss-field 1
n 4
time 5.0000000000000000e-1
kappa 1.0000000000000000e-2
0.0000000000000000e0 2.5000000000000000e-1 5.0000000000000000e-1 7.5000000000000000e-1
2.5000000000000000e0 2.7500000000000000e0 3.0000000000000000e0 3.2500000000000000e0
5.0000000000000000e0 5.2500000000000000e0 5.5000000000000000e0 5.7500000000000000e0
7.5000000000000000e0 7.7500000000000000e0 8.0000000000000000e0 8.2500000000000000e0
";
        assert_eq!(text, golden);
        let back = read_snapshot(text.as_bytes()).unwrap();
        assert_eq!(back, snap);
    }

    #[test]
    fn comment_lines_are_skipped() {
        let grid = PeriodicGrid::new(4).unwrap();
        let snap = Snapshot {
            time: 0.25,
            kappa: 0.0,
            field: ScalarField::from_fn(grid, |x, y| x - y),
        };
        let mut buf = Vec::new();
        write_snapshot_annotated(&mut buf, &snap, &["anomdiss 0.1.0".into(), "config: {}".into()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("anomdiss-field 1\n# anomdiss 0.1.0\n# config: {}\nn 4\n"));
        assert_eq!(read_snapshot(text.as_bytes()).unwrap(), snap);
    }

    #[test]
    fn read_back_is_bit_exact() {
        let grid = PeriodicGrid::new(8).unwrap();
        let field = ScalarField::from_fn(grid, |x, y| (x * 7.3).sin() / (1.1 + y).sqrt() * 1e-7);
        let snap = Snapshot {
            time: 1.0 / 3.0,
            kappa: 1.25e-3,
            field,
        };
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &snap).unwrap();
        let back = read_snapshot(buf.as_slice()).unwrap();
        assert_eq!(back.field.values(), snap.field.values());
        assert_eq!(back.time.to_bits(), snap.time.to_bits());
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(read_snapshot("nonsense 1\n".as_bytes()).is_err());
        assert!(read_snapshot("anomdiss-field 1\nn 4\ntime 0\nkappa 0\n1 2 3 4\n".as_bytes()).is_err());
        let short_row = "anomdiss-field 1\nn 4\ntime 0\nkappa 0\n1 2 3\n1 2 3 4\n1 2 3 4\n1 2 3 4\n";
        assert!(read_snapshot(short_row.as_bytes()).is_err());
        assert!(read_snapshot("anomdiss-field 2\n".as_bytes()).is_err());
    }
}
