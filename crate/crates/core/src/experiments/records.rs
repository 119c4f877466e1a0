use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::fit::{amplitude, Quantity};
use super::scenarios::ScenarioConfig;
use crate::error::{Error, Result};
use crate::measures::CorrelationRecord;

pub const RECORD_HEADER: [&str; 7] =
    ["t", "negativity", "purity", "hs_participation", "effective_hs_rank", "energy1", "energy2"];

fn sci(x: f64) -> String {
    format!("{x:.11e}")
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        other => Error::InvalidSpec(format!("{}: malformed CSV: {other:?}", path.display())),
    }
}

/// Writes `path` through a temporary file in the same directory, so that a
/// failure never leaves a partial file behind.
pub fn write_atomic(
    path: &Path,
    body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| Error::io(&dir, e))?;
    body(tmp.as_file_mut()).map_err(|e| Error::io(path, e))?;
    tmp.as_file_mut().flush().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn write_rows(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    write_atomic(path, |w| {
        let mut csv =
            csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        csv.write_record(header)?;
        for row in rows {
            csv.write_record(&row)?;
        }
        csv.flush()
    })
}

/// CSV with one row per record and 12 significant digits.
pub fn write_records(records: &[CorrelationRecord], path: &Path) -> Result<()> {
    let rows = records.iter().map(|r| {
        vec![
            sci(r.t),
            sci(r.negativity),
            sci(r.purity),
            sci(r.hs_participation),
            r.effective_hs_rank.to_string(),
            sci(r.energy1),
            sci(r.energy2),
        ]
    });
    write_rows(path, &RECORD_HEADER, rows)
}

pub fn read_records(path: &Path) -> Result<Vec<CorrelationRecord>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let header = rdr.headers().map_err(|e| csv_err(path, e))?;
    if header.iter().ne(RECORD_HEADER.iter().copied()) {
        return Err(Error::InvalidSpec(format!(
            "{}: unexpected header {:?}",
            path.display(),
            header
        )));
    }
    rdr.deserialize().map(|r| r.map_err(|e| csv_err(path, e))).collect()
}

/// Path of the JSON file describing the run stored in `csv_path`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Json { path: path.into(), source: e })?;
    write_atomic(path, |w| {
        w.write_all(text.as_bytes())?;
        w.write_all(b"\n")
    })
}

pub fn read_config(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let cfg: ScenarioConfig =
        serde_json::from_str(&text).map_err(|e| Error::Json { path: path.into(), source: e })?;
    cfg.validate()?;
    Ok(cfg)
}

/// Writes the CSV and a sidecar holding `cfg` restricted to this `k`.
pub fn write_run(
    records: &[CorrelationRecord],
    cfg: &ScenarioConfig,
    k: u32,
    csv_path: &Path,
) -> Result<()> {
    let mut single = cfg.clone();
    single.k_list = vec![k];
    write_records(records, csv_path)?;
    write_json(&single, &sidecar_path(csv_path))
}

/// `<scenario>_k<k>.csv`.
pub fn run_file_name(cfg: &ScenarioConfig, k: u32) -> String {
    format!("{}_k{k}.csv", cfg.name)
}

/// Per-k digest of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub k: u32,
    pub t_negativity_max: f64,
    pub negativity_max: f64,
    pub negativity_interior: bool,
    pub t_hs_participation_max: f64,
    pub hs_participation_max: f64,
    pub hs_participation_interior: bool,
    pub final_purity: f64,
}

pub fn summarize(runs: &[(u32, Vec<CorrelationRecord>)]) -> Result<Vec<SummaryRow>> {
    runs.iter()
        .map(|(k, recs)| {
            let n = amplitude(*k, Quantity::Negativity, recs)?;
            let h = amplitude(*k, Quantity::HsParticipation, recs)?;
            Ok(SummaryRow {
                k: *k,
                t_negativity_max: n.t,
                negativity_max: n.value,
                negativity_interior: n.interior,
                t_hs_participation_max: h.t,
                hs_participation_max: h.value,
                hs_participation_interior: h.interior,
                final_purity: recs.last().map_or(f64::NAN, |r| r.purity),
            })
        })
        .collect()
}

pub fn write_summary(rows: &[SummaryRow], path: &Path) -> Result<()> {
    let header = [
        "k",
        "t_negativity_max",
        "negativity_max",
        "negativity_interior",
        "t_hs_participation_max",
        "hs_participation_max",
        "hs_participation_interior",
        "final_purity",
    ];
    let rows = rows.iter().map(|r| {
        vec![
            r.k.to_string(),
            sci(r.t_negativity_max),
            sci(r.negativity_max),
            r.negativity_interior.to_string(),
            sci(r.t_hs_participation_max),
            sci(r.hs_participation_max),
            r.hs_participation_interior.to_string(),
            sci(r.final_purity),
        ]
    });
    write_rows(path, &header, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::scenarios::{builtin, run_scenario, ScenarioName};

    fn sample(i: usize) -> CorrelationRecord {
        let x = i as f64;
        CorrelationRecord {
            t: 0.1 * x,
            negativity: 1.0 / (1.0 + x) + 1e-13,
            purity: 1.0 - 1e-3 * x,
            hs_participation: 1.0 + x * std::f64::consts::PI,
            effective_hs_rank: i + 1,
            energy1: 12.345678901234 * x,
            energy2: -3.0e-17 * x,
        }
    }

    #[test]
    fn empty_file_has_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("empty.csv");
        write_records(&[], &p).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), RECORD_HEADER.join(",") + "\n");
        assert!(read_records(&p).unwrap().is_empty());
    }

    #[test]
    fn round_trip_keeps_twelve_digits() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/r.csv");
        let recs: Vec<_> = (0..20).map(sample).collect();
        write_records(&recs, &p).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert!(!text.contains('\r'));
        let back = read_records(&p).unwrap();
        assert_eq!(back.len(), recs.len());
        let close = |a: f64, b: f64| {
            (a - b).abs() <= 5e-12 * a.abs().max(b.abs()) || (a - b).abs() < 1e-300
        };
        for (a, b) in recs.iter().zip(&back) {
            assert!(
                close(a.t, b.t) && close(a.negativity, b.negativity) && close(a.purity, b.purity)
            );
            assert!(close(a.hs_participation, b.hs_participation) && close(a.energy1, b.energy1));
            assert!(close(a.energy2, b.energy2));
            assert_eq!(a.effective_hs_rank, b.effective_hs_rank);
        }
        // only the target file is left in the directory
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn wrong_header_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.csv");
        fs::write(&p, "a,b\n1,2\n").unwrap();
        assert!(read_records(&p).is_err());
        assert!(matches!(read_records(&dir.path().join("missing.csv")), Err(Error::Io { .. })));
    }

    #[test]
    fn sidecar_reruns_identically() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = builtin(ScenarioName::BG1);
        cfg.set("samples", "40").unwrap();
        cfg.set("t_end", "10").unwrap();
        let p = dir.path().join(run_file_name(&cfg, 4));
        write_run(&run_scenario(&cfg, 4).unwrap(), &cfg, 4, &p).unwrap();
        let again = read_config(&sidecar_path(&p)).unwrap();
        assert_eq!(again.k_list, vec![4]);
        let q = dir.path().join("again.csv");
        write_records(&run_scenario(&again, 4).unwrap(), &q).unwrap();
        assert_eq!(fs::read(&p).unwrap(), fs::read(&q).unwrap());
    }

    #[test]
    fn summary_file() {
        let dir = tempfile::tempdir().unwrap();
        let runs = vec![(3, (0..10).map(sample).collect::<Vec<_>>())];
        let rows = summarize(&runs).unwrap();
        assert_eq!(rows[0].k, 3);
        assert!(!rows[0].negativity_interior);
        let p = dir.path().join("summary.csv");
        write_summary(&rows, &p).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap().lines().count(), 2);
    }
}
