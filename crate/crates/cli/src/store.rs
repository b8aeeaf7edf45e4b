//! On-disk trajectory layout written by `run` and read back by `pair`.
//!
//! ```text
//! run-N<N>-k<idx>/
//!   run.json        version, kappa, N, initial range, full config
//!   ledger.txt      t dissipation rate energy mean   (every sub-step)
//!   snapshots.txt   index t min max file             (one row per snapshot)
//!   snap_<index>.txt
//! ```

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anomdiss_core::analysis::{header, row, VERSION};
use anomdiss_core::grid::snapshot::{fmt17, read_snapshot, write_snapshot_annotated};
use anomdiss_core::solver::{Extrema, LedgerPoint};
use anomdiss_core::{Error, PeriodicGrid, Result, RunConfig, Trajectory};
use serde::{Deserialize, Serialize};

pub const META_FILE: &str = "run.json";
pub const LEDGER_FILE: &str = "ledger.txt";
pub const INDEX_FILE: &str = "snapshots.txt";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunMeta {
    pub version: String,
    pub kappa: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub initial_min: f64,
    pub initial_max: f64,
    pub config: RunConfig,
}

pub fn run_dir_name(n: usize, kappa_index: usize) -> String {
    format!("run-N{n}-k{kappa_index:02}")
}

fn snapshot_file(index: usize) -> String {
    format!("snap_{index:05}.txt")
}

fn schema(path: &Path, what: impl std::fmt::Display) -> Error {
    Error::Schema(format!("{}: {what}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Writes the full trajectory into `dir`, which is created if needed.
pub fn write_trajectory(dir: &Path, cfg: &RunConfig, traj: &Trajectory) -> Result<()> {
    fs::create_dir_all(dir)?;
    let cfg_json = cfg.to_json();
    let meta = RunMeta {
        version: VERSION.to_string(),
        kappa: traj.kappa,
        n: traj.grid.n(),
        initial_min: traj.initial_range.0,
        initial_max: traj.initial_range.1,
        config: cfg.clone(),
    };
    let mut w = create(&dir.join(META_FILE))?;
    serde_json::to_writer_pretty(&mut w, &meta).map_err(|e| Error::Schema(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;

    let cols = |names: &[&str]| names.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let mut ledger = String::new();
    header(
        &mut ledger,
        "ledger",
        &cfg_json,
        &cols(&["t", "dissipation", "rate", "energy", "mean"]),
    );
    for p in &traj.ledger {
        row(&mut ledger, [p.t, p.dissipation, p.rate, p.energy, p.mean].map(fmt17));
    }
    fs::write(dir.join(LEDGER_FILE), ledger)?;

    if traj.extrema.len() != traj.snapshots.len() {
        return Err(Error::Schema("extrema and snapshots differ in length".into()));
    }
    let mut index = String::new();
    header(
        &mut index,
        "snapshots",
        &cfg_json,
        &cols(&["index", "t", "min", "max", "file"]),
    );
    let comments = [format!("anomdiss {VERSION} snapshot"), format!("config: {cfg_json}")];
    for (i, (snap, ext)) in traj.snapshots.iter().zip(&traj.extrema).enumerate() {
        let name = snapshot_file(i);
        row(
            &mut index,
            [
                i.to_string(),
                fmt17(snap.time),
                fmt17(ext.min),
                fmt17(ext.max),
                name.clone(),
            ],
        );
        let mut w = create(&dir.join(&name))?;
        write_snapshot_annotated(&mut w, snap, &comments)?;
        w.flush()?;
    }
    fs::write(dir.join(INDEX_FILE), index)?;
    Ok(())
}

/// Directories under `root` holding a stored trajectory, sorted by name.
/// `root` itself counts if it holds one.
pub fn find_runs(root: &Path) -> Result<Vec<PathBuf>> {
    if !root.is_dir() {
        return Err(Error::Schema(format!("{} is not a directory", root.display())));
    }
    if root.join(META_FILE).is_file() {
        return Ok(vec![root.to_path_buf()]);
    }
    let mut dirs: Vec<PathBuf> = fs::read_dir(root)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join(META_FILE).is_file())
        .collect();
    dirs.sort();
    if dirs.is_empty() {
        return Err(Error::Schema(format!(
            "no stored trajectories under {}",
            root.display()
        )));
    }
    Ok(dirs)
}

/// Data rows of a table file, split on whitespace; `#` lines are skipped.
fn table_rows(path: &Path, width: usize) -> Result<Vec<Vec<String>>> {
    let file = File::open(path).map_err(|e| schema(path, e))?;
    let mut rows = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cells: Vec<String> = line.split_whitespace().map(str::to_string).collect();
        if cells.len() != width {
            return Err(schema(path, format!("expected {width} columns, found {}", cells.len())));
        }
        rows.push(cells);
    }
    Ok(rows)
}

fn num(path: &Path, cell: &str) -> Result<f64> {
    cell.parse().map_err(|_| schema(path, format!("bad number `{cell}`")))
}

pub fn read_meta(dir: &Path) -> Result<RunMeta> {
    let path = dir.join(META_FILE);
    let text = fs::read_to_string(&path).map_err(|e| schema(&path, e))?;
    serde_json::from_str(&text).map_err(|e| schema(&path, e))
}

/// Reads a trajectory written by [`write_trajectory`].
pub fn read_trajectory(dir: &Path) -> Result<(RunMeta, Trajectory)> {
    let meta = read_meta(dir)?;
    let grid = PeriodicGrid::new(meta.n)?;

    let path = dir.join(LEDGER_FILE);
    let ledger = table_rows(&path, 5)?
        .iter()
        .map(|c| {
            Ok(LedgerPoint {
                t: num(&path, &c[0])?,
                dissipation: num(&path, &c[1])?,
                rate: num(&path, &c[2])?,
                energy: num(&path, &c[3])?,
                mean: num(&path, &c[4])?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if ledger.is_empty() {
        return Err(schema(&path, "empty ledger"));
    }

    let path = dir.join(INDEX_FILE);
    let mut snapshots = Vec::new();
    let mut extrema = Vec::new();
    for (i, c) in table_rows(&path, 5)?.iter().enumerate() {
        if c[0] != i.to_string() {
            return Err(schema(&path, format!("row {i} has index {}", c[0])));
        }
        let t = num(&path, &c[1])?;
        let file = dir.join(&c[4]);
        let reader = BufReader::new(File::open(&file).map_err(|e| schema(&file, e))?);
        let snap = read_snapshot(reader).map_err(|e| schema(&file, e))?;
        if snap.field.grid().n() != meta.n {
            return Err(Error::GridMismatch {
                expected: meta.n,
                found: snap.field.grid().n(),
            });
        }
        if snap.time != t || snap.kappa != meta.kappa {
            return Err(schema(&file, "time or kappa disagrees with the index and run.json"));
        }
        extrema.push(Extrema {
            t,
            min: num(&path, &c[2])?,
            max: num(&path, &c[3])?,
        });
        snapshots.push(snap);
    }
    if snapshots.is_empty() {
        return Err(schema(&path, "no snapshots"));
    }
    let traj = Trajectory {
        kappa: meta.kappa,
        grid,
        snapshots,
        ledger,
        extrema,
        initial_range: (meta.initial_min, meta.initial_max),
    };
    Ok((meta, traj))
}

#[cfg(test)]
mod tests {
    use super::*;
    use anomdiss_core::analysis::run_one;
    use anomdiss_core::SweepConfig;

    fn small_config() -> RunConfig {
        RunConfig::from_toml_str(
            "[velocity]\nn_stages = 2\n[solver]\nkappa = 0.005\nN = 64\nsubsteps_per_stage = 64\nsnapshots_per_stage = 3\n",
        )
        .unwrap()
    }

    #[test]
    fn trajectory_round_trips_exactly() {
        let cfg = small_config();
        let mut sweep = SweepConfig::from_run_config(&cfg).unwrap();
        sweep.tolerances.energy_relative = f64::INFINITY;
        let (traj, _) = run_one(&sweep, 0.005, 64).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let run = dir.path().join(run_dir_name(64, 0));
        write_trajectory(&run, &cfg, &traj).unwrap();
        let (meta, back) = read_trajectory(&run).unwrap();
        assert_eq!(back, traj);
        assert_eq!(meta.config, cfg);
        assert_eq!(meta.version, VERSION);
        assert_eq!(find_runs(dir.path()).unwrap(), vec![run.clone()]);
        assert_eq!(find_runs(&run).unwrap(), vec![run]);
    }

    #[test]
    fn every_file_carries_the_header() {
        let cfg = small_config();
        let mut sweep = SweepConfig::from_run_config(&cfg).unwrap();
        sweep.tolerances.energy_relative = f64::INFINITY;
        let (traj, _) = run_one(&sweep, 0.005, 64).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_trajectory(dir.path(), &cfg, &traj).unwrap();
        let json = cfg.to_json();
        for name in [LEDGER_FILE, INDEX_FILE, "snap_00000.txt"] {
            let text = fs::read_to_string(dir.path().join(name)).unwrap();
            assert!(text.contains(&format!("# anomdiss {VERSION}")), "{name}");
            assert!(text.contains(&format!("# config: {json}")), "{name}");
        }
    }

    #[test]
    fn schema_problems_are_reported() {
        let cfg = small_config();
        let mut sweep = SweepConfig::from_run_config(&cfg).unwrap();
        sweep.tolerances.energy_relative = f64::INFINITY;
        let (traj, _) = run_one(&sweep, 0.005, 64).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_trajectory(dir.path(), &cfg, &traj).unwrap();

        let index = dir.path().join(INDEX_FILE);
        let original = fs::read_to_string(&index).unwrap();
        fs::write(&index, original.replace("snap_00001.txt", "")).unwrap();
        assert!(matches!(read_trajectory(dir.path()), Err(Error::Schema(_))));
        fs::write(&index, &original).unwrap();

        fs::remove_file(dir.path().join("snap_00002.txt")).unwrap();
        assert!(matches!(read_trajectory(dir.path()), Err(Error::Schema(_))));

        let empty = tempfile::tempdir().unwrap();
        assert!(matches!(find_runs(empty.path()), Err(Error::Schema(_))));
        assert!(matches!(
            find_runs(&empty.path().join("missing")),
            Err(Error::Schema(_))
        ));
    }
}
