//! Load, detect, evaluate and write: one `run`.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context as _, Result};
use armad_core::baselines::{avf, fpof, od};
use armad_core::eval::evaluate;
use armad_core::ingest::{join_contexts, load_context, load_labels};
use armad_core::rules::get_freq_rules;
use armad_core::scorer::{explain, vf_arm, vr_arm};
use armad_core::{
    ArmConfig, Context, Detector, Error, EvalReport, LabelSet, Ranking, RuleSet, Threshold,
};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::output::Batch;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceInfo {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
    pub path: PathBuf,
    pub objects: usize,
    pub items: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContextInfo {
    pub objects: usize,
    pub items: usize,
    pub pairs: usize,
    pub sources: Vec<SourceInfo>,
}

pub struct Loaded {
    pub context: Context,
    pub info: ContextInfo,
}

pub fn load(cfg: &RunConfig) -> Result<Loaded> {
    let mut parts = Vec::with_capacity(cfg.contexts.len());
    let mut sources = Vec::with_capacity(cfg.contexts.len());
    for src in &cfg.contexts {
        let c = load_context(&src.path)
            .with_context(|| format!("loading context {}", src.path.display()))?;
        sources.push(SourceInfo {
            tag: src.tag.clone(),
            path: src.path.clone(),
            objects: c.m(),
            items: c.n(),
        });
        parts.push(c);
    }
    let context = if cfg.join {
        let tagged: Vec<(&str, &Context)> = cfg
            .contexts
            .iter()
            .zip(&parts)
            .map(|(s, c)| (s.tag.as_deref().unwrap_or_default(), c))
            .collect();
        join_contexts(&tagged)?
    } else {
        parts.pop().expect("validated: one context")
    };
    let info = ContextInfo {
        objects: context.m(),
        items: context.n(),
        pairs: context.objects().iter().map(|o| o.len()).sum(),
        sources,
    };
    Ok(Loaded { context, info })
}

pub struct Detection {
    /// Rules the ranking was scored with (VR/VF-ARM) or derived from (OD).
    pub rules: Option<RuleSet>,
    /// Covers every object.
    pub ranking: Ranking,
    /// Objects matched by at least one rule, for rule-based detectors.
    pub flagged: Option<usize>,
}

pub fn detect(c: &Context, cfg: &RunConfig) -> Result<Detection> {
    let max_len = cfg.max_len();
    let support = || {
        cfg.support()
            .expect("validated: detector threshold present")
    };
    let conf = || {
        cfg.thresholds
            .min_conf
            .expect("validated: min_conf present")
    };
    let arm = || ArmConfig {
        support: support(),
        min_conf: conf(),
        max_len,
        aggregation: cfg.aggregation,
        interest: cfg.interest_mode,
    };
    let (rules, ranking) = match cfg.detector {
        Detector::VrArm => {
            let (r, k) = vr_arm(c, &arm())?;
            (Some(r), k)
        }
        Detector::VfArm => {
            let (r, k) = vf_arm(c, &arm())?;
            (Some(r), k)
        }
        Detector::Fpof => (None, fpof(c, support(), max_len)?),
        Detector::Avf => (None, avf(c)?),
        Detector::Od => {
            let ranking = od(c, support(), conf(), max_len)?;
            let rules = cfg
                .outputs
                .rules_csv
                .is_some()
                .then(|| get_freq_rules(c, support(), conf(), max_len))
                .transpose()?;
            (rules, ranking)
        }
    };
    let flagged = cfg.detector.is_rule_based().then(|| ranking.len());
    Ok(Detection {
        rules,
        ranking: ranking.complete(c),
        flagged,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelInfo {
    pub path: PathBuf,
    pub attacks: usize,
    /// Labeled tids that name no object of the context.
    pub unknown: Vec<String>,
}

/// Labels restricted to objects present in `c`.
pub fn labels(path: &Path, c: &Context) -> Result<(LabelSet, LabelInfo)> {
    let all = load_labels(path).with_context(|| format!("loading labels {}", path.display()))?;
    let (known, unknown): (Vec<String>, Vec<String>) =
        all.into_iter().partition(|t| c.tid_by_name(t).is_some());
    if known.is_empty() {
        return Err(Error::UndefinedMetric(format!(
            "no labeled attack in {} names an object of the context",
            path.display()
        ))
        .into());
    }
    let info = LabelInfo {
        path: path.to_owned(),
        attacks: known.len(),
        unknown,
    };
    Ok((LabelSet::new(known, c.m()), info))
}

/// Evaluation of one configuration, as written to `--report`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub detector: Detector,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support: Option<Threshold>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_conf: Option<f64>,
    pub max_len: usize,
    pub ndcg: f64,
    pub auc: f64,
    pub n: usize,
    pub attacks: usize,
    /// 1-based ranks of the labeled attacks, ascending.
    pub attack_positions: Vec<usize>,
}

pub fn report(cfg: &RunConfig, ranking: &Ranking, labels: &LabelSet) -> Result<RunReport> {
    let EvalReport {
        ndcg,
        auc,
        n,
        attack_positions,
    } = evaluate(ranking, labels)?;
    Ok(RunReport {
        detector: cfg.detector,
        support: cfg.support(),
        min_conf: cfg.thresholds.min_conf,
        max_len: cfg.max_len(),
        ndcg,
        auc,
        n,
        attacks: labels.attack_tids.len(),
        attack_positions,
    })
}

impl RunReport {
    pub fn eval(&self) -> EvalReport {
        EvalReport {
            ndcg: self.ndcg,
            auc: self.auc,
            n: self.n,
            attack_positions: self.attack_positions.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Metrics {
    pub ndcg: f64,
    pub auc: f64,
}

/// Run record: config echo, context dimensions, timing and what was written.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    pub context: ContextInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rules: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flagged_objects: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<LabelInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Metrics>,
    pub notes: Vec<String>,
    pub outputs: Vec<PathBuf>,
    pub started_at_unix: f64,
    pub wall_clock_secs: f64,
}

pub fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub struct RunOutcome {
    pub manifest: Manifest,
    /// Explanation text for stdout when no `explain_out` is set.
    pub explanations: Option<String>,
}

pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let started_at_unix = unix_now();
    let clock = Instant::now();

    let Loaded { context: c, info } = load(cfg)?;
    let labels = cfg
        .labels_path
        .as_deref()
        .map(|p| labels(p, &c))
        .transpose()?;
    let det = detect(&c, cfg)?;
    let report = labels
        .as_ref()
        .map(|(set, _)| report(cfg, &det.ranking, set))
        .transpose()?;

    let o = &cfg.outputs;
    let mut batch = Batch::default();
    if let Some(p) = &o.ranking_csv {
        let mut buf = Vec::new();
        det.ranking.write_csv(&mut buf)?;
        batch.add(p, buf);
    }
    if let Some(p) = &o.rules_csv {
        let mut buf = Vec::new();
        det.rules
            .as_ref()
            .expect("validated: rules available")
            .write_csv(&c, &mut buf)?;
        batch.add(p, buf);
    }
    if let (Some(p), Some(r)) = (&o.report_json, &report) {
        batch.add(p, to_json(r)?);
    }
    if let (Some(p), Some(r)) = (&o.band_svg, &report) {
        batch.add(p, armad_core::band::band_svg(&r.eval()));
    }
    let explanations = match (&det.rules, o.explain_top_k) {
        (Some(rules), k) if k > 0 => Some(
            det.ranking
                .entries
                .iter()
                .take(k)
                .map(|e| explain(e, rules, &c))
                .collect::<String>(),
        ),
        _ => None,
    };
    let explanations = match (&o.explain_out, explanations) {
        (Some(p), Some(text)) => {
            batch.add(p, text);
            None
        }
        (_, text) => text,
    };

    let mut outputs: Vec<PathBuf> = batch.paths().map(Path::to_path_buf).collect();
    if let Some(p) = &o.manifest {
        outputs.push(p.clone());
    }
    let mut manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: "run".into(),
        config: cfg.clone(),
        context: info,
        rules: det.rules.as_ref().map(RuleSet::len),
        flagged_objects: det.flagged,
        labels: labels.map(|(_, info)| info),
        metrics: report.as_ref().map(|r| Metrics {
            ndcg: r.ndcg,
            auc: r.auc,
        }),
        notes: det.ranking.notes.clone(),
        outputs,
        started_at_unix,
        wall_clock_secs: 0.0,
    };
    manifest.wall_clock_secs = clock.elapsed().as_secs_f64();
    if let Some(p) = &o.manifest {
        batch.add(p, to_json(&manifest)?);
    }
    batch.commit()?;
    Ok(RunOutcome {
        manifest,
        explanations,
    })
}
