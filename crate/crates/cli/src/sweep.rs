//! Parameter grids: one evaluated run per `(supp, conf)` cell, plus a summary
//! naming the best cell per metric.

use std::cmp::Ordering;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use anyhow::{Context as _, Result};
use armad_core::{Detector, Error, Threshold};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::output::Batch;
use crate::pipeline::{self, detect, labels, load, report, to_json, Loaded, RunReport};

/// Support (percent) and optional confidence (percent), written `SxC` or `S`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub supp: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conf: Option<f64>,
}

impl FromStr for Cell {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad number {t:?} in grid cell {s:?}"))
        };
        match s.split_once(['x', 'X']) {
            Some((a, b)) => Ok(Cell {
                supp: num(a)?,
                conf: Some(num(b)?),
            }),
            None => Ok(Cell {
                supp: num(s)?,
                conf: None,
            }),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.conf {
            Some(c) => write!(f, "{}x{}", self.supp, c),
            None => write!(f, "{}", self.supp),
        }
    }
}

/// Parses `0.05x100,5x100`; empty entries are skipped.
pub fn parse_grid(s: &str) -> Result<Vec<Cell>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(Cell::from_str)
        .collect()
}

/// Cartesian product, supports outermost.
pub fn product(supps: &[f64], confs: &[f64]) -> Vec<Cell> {
    if confs.is_empty() {
        return supps
            .iter()
            .map(|&s| Cell {
                supp: s,
                conf: None,
            })
            .collect();
    }
    supps
        .iter()
        .flat_map(|&s| {
            confs.iter().map(move |&c| Cell {
                supp: s,
                conf: Some(c),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub index: usize,
    pub cell: Cell,
    pub file: PathBuf,
    pub report: RunReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub detector: Detector,
    pub cells: Vec<CellReport>,
    pub best_ndcg: CellReport,
    pub best_auc: CellReport,
}

/// Higher metric wins; ties go to the smaller support, then the smaller
/// confidence, then the earlier cell.
fn better(a: &CellReport, b: &CellReport, metric: fn(&RunReport) -> f64) -> Ordering {
    metric(&b.report)
        .total_cmp(&metric(&a.report))
        .then(a.cell.supp.total_cmp(&b.cell.supp))
        .then(
            a.cell
                .conf
                .unwrap_or(0.0)
                .total_cmp(&b.cell.conf.unwrap_or(0.0)),
        )
        .then(a.index.cmp(&b.index))
}

pub fn best(cells: &[CellReport], metric: fn(&RunReport) -> f64) -> Option<&CellReport> {
    cells.iter().min_by(|a, b| better(a, b, metric))
}

pub struct SweepOutcome {
    pub summary: Summary,
    pub manifest: serde_json::Value,
}

pub fn sweep(
    base: &RunConfig,
    grid: &[Cell],
    out_dir: &Path,
    manifest: Option<&Path>,
) -> Result<SweepOutcome> {
    if grid.is_empty() {
        return Err(Error::Config("empty grid".into()).into());
    }
    if base.detector == Detector::Avf {
        return Err(Error::Config("avf has no thresholds to sweep".into()).into());
    }
    let labels_path = base
        .labels_path
        .as_deref()
        .ok_or_else(|| Error::Config("sweep needs --labels".into()))?;
    let configs: Vec<RunConfig> = grid
        .iter()
        .map(|cell| {
            let cfg = base.with_cell(Threshold::Percent(cell.supp), cell.conf);
            cfg.validate()
                .map(|_| cfg)
                .with_context(|| format!("grid cell {cell}"))
        })
        .collect::<Result<_>>()?;

    let started_at_unix = pipeline::unix_now();
    let clock = Instant::now();
    let Loaded { context: c, info } = load(base)?;
    let (label_set, label_info) = labels(labels_path, &c)?;

    let reports: Vec<RunReport> = configs
        .par_iter()
        .map(|cfg| {
            let det = detect(&c, cfg)?;
            report(cfg, &det.ranking, &label_set)
        })
        .collect::<Result<_>>()?;

    let width = grid.len().saturating_sub(1).to_string().len().max(3);
    let cells: Vec<CellReport> = grid
        .iter()
        .zip(reports)
        .enumerate()
        .map(|(index, (&cell, report))| CellReport {
            index,
            cell,
            file: format!("cell-{index:0width$}.json").into(),
            report,
        })
        .collect();
    let pick =
        |metric: fn(&RunReport) -> f64| best(&cells, metric).expect("non-empty grid").clone();
    let summary = Summary {
        detector: base.detector,
        best_ndcg: pick(|r| r.ndcg),
        best_auc: pick(|r| r.auc),
        cells,
    };

    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut batch = Batch::default();
    for cr in &summary.cells {
        batch.add(out_dir.join(&cr.file), to_json(&cr.report)?);
    }
    batch.add(out_dir.join("summary.json"), to_json(&summary)?);
    let mut outputs: Vec<PathBuf> = batch.paths().map(Path::to_path_buf).collect();
    outputs.extend(manifest.map(Path::to_path_buf));
    let record = serde_json::json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": "sweep",
        "config": base,
        "grid": grid,
        "context": info,
        "labels": label_info,
        "best_ndcg": summary.best_ndcg.cell,
        "best_auc": summary.best_auc.cell,
        "outputs": outputs,
        "started_at_unix": started_at_unix,
        "wall_clock_secs": clock.elapsed().as_secs_f64(),
    });
    if let Some(p) = manifest {
        batch.add(p, to_json(&record)?);
    }
    batch.commit()?;
    Ok(SweepOutcome {
        summary,
        manifest: record,
    })
}
