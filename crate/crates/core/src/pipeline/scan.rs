use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::RunConfig;
use super::run::{run_single, PesRecord, StageTimes};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    #[serde(rename = "R")]
    pub r: f64,
    pub error: String,
}

/// Scan result. Apart from `timing` the serialized form depends only on the
/// configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub schema_version: u32,
    pub config: RunConfig,
    pub records: Vec<PesRecord>,
    pub failures: Vec<PointFailure>,
    pub timing: Vec<StageTimes>,
}

#[derive(Serialize, Deserialize)]
struct CachedPoint {
    schema_version: u32,
    record: PesRecord,
    timing: StageTimes,
}

impl ScanReport {
    pub fn is_partial(&self) -> bool {
        !self.failures.is_empty()
    }

    /// 0 when every point succeeded, 2 when some did, 1 when none did.
    pub fn exit_code(&self) -> i32 {
        match (self.records.is_empty(), self.failures.is_empty()) {
            (_, true) => 0,
            (false, false) => 2,
            (true, false) => 1,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.records {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Content hash of a resolved single-point configuration.
pub fn point_hash(cfg: &RunConfig) -> Result<String> {
    let mut h = Sha256::new();
    h.update(SCHEMA_VERSION.to_le_bytes());
    h.update(serde_json::to_vec(cfg)?);
    Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

fn run_point(cfg: &RunConfig, r: f64, cache: Option<&Path>) -> std::result::Result<(PesRecord, StageTimes), PointFailure> {
    let fail = |e: Error| PointFailure { r, error: e.to_string() };
    let point = cfg.at(r);
    let file = match cache {
        Some(dir) => Some(dir.join(format!("{}.json", point_hash(&point).map_err(fail)?))),
        None => None,
    };
    if let Some(f) = &file {
        if let Ok(text) = fs::read_to_string(f) {
            match serde_json::from_str::<CachedPoint>(&text) {
                Ok(c) if c.schema_version == SCHEMA_VERSION => return Ok((c.record, c.timing)),
                _ => log::warn!("ignoring unreadable cache entry {}", f.display()),
            }
        }
    }
    let out = run_single(&point).map_err(fail)?;
    let mut record = out.record;
    let mut timing = out.timing;
    record.r = Some(r);
    timing.r = Some(r);
    if let Some(f) = &file {
        let c = CachedPoint { schema_version: SCHEMA_VERSION, record: record.clone(), timing: timing.clone() };
        let text = serde_json::to_string_pretty(&c).map_err(|e| fail(e.into()))?;
        fs::write(f, text).map_err(|e| fail(e.into()))?;
    }
    Ok((record, timing))
}

/// Runs every scan point independently. With `out`, finished points are cached
/// under `out/points` and reused, and `pes.csv` and `pes.json` are written.
pub fn run_scan(cfg: &RunConfig, out: Option<&Path>) -> Result<ScanReport> {
    cfg.validate()?;
    let scan = cfg.scan.ok_or_else(|| Error::Invalid("no scan range given".into()))?;
    let grid = scan.points()?;
    let cache = match out {
        Some(dir) => {
            let p = dir.join("points");
            fs::create_dir_all(&p)?;
            Some(p)
        }
        None => None,
    };
    let results: Vec<_> = grid.par_iter().map(|&r| run_point(cfg, r, cache.as_deref())).collect();
    let mut records = Vec::new();
    let mut timing = Vec::new();
    let mut failures = Vec::new();
    for res in results {
        match res {
            Ok((rec, t)) => {
                records.push(rec);
                timing.push(t);
            }
            Err(f) => {
                log::error!("point R = {} failed: {}", f.r, f.error);
                failures.push(f);
            }
        }
    }
    let report = ScanReport { schema_version: SCHEMA_VERSION, config: cfg.clone(), records, failures, timing };
    if let Some(dir) = out {
        report.write_csv(fs::File::create(dir.join("pes.csv"))?)?;
        fs::write(dir.join("pes.json"), report.to_json()?)?;
    }
    Ok(report)
}
