//! Run configuration, as parsed from flags or a JSON file.

use std::collections::HashSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use armad_core::baselines::FPOF_DEFAULT_MAX_LEN;
use armad_core::miner::DEFAULT_MAX_LEN;
use armad_core::{Aggregation, Detector, Error, InterestMode, SupportThresholds, Threshold};
use serde::{Deserialize, Serialize};

/// One input context, optionally tagged for joining (`TAG=PATH`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextSource {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
    pub path: PathBuf,
}

impl FromStr for ContextSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once('=') {
            Some((tag, path)) if !tag.is_empty() && !path.is_empty() => Ok(Self {
                tag: Some(tag.to_owned()),
                path: path.into(),
            }),
            Some(_) => Err(format!("expected TAG=PATH, got {s:?}")),
            None if s.is_empty() => Err("empty context path".into()),
            None => Ok(Self {
                tag: None,
                path: s.into(),
            }),
        }
    }
}

impl fmt::Display for ContextSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.tag {
            Some(t) => write!(f, "{t}={}", self.path.display()),
            None => write!(f, "{}", self.path.display()),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ranking_csv: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rules_csv: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report_json: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub band_svg: Option<PathBuf>,
    pub explain_top_k: usize,
    /// Explanations go to stdout when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explain_out: Option<PathBuf>,
    /// The manifest goes to stderr when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<PathBuf>,
}

impl Outputs {
    /// Every file path this run may write.
    pub fn paths(&self) -> Vec<&PathBuf> {
        [
            &self.ranking_csv,
            &self.rules_csv,
            &self.report_json,
            &self.band_svg,
            &self.explain_out,
            &self.manifest,
        ]
        .into_iter()
        .flatten()
        .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub contexts: Vec<ContextSource>,
    #[serde(default)]
    pub join: bool,
    pub detector: Detector,
    #[serde(default)]
    pub thresholds: SupportThresholds,
    /// Defaults per detector when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_len: Option<usize>,
    #[serde(default)]
    pub aggregation: Aggregation,
    #[serde(default)]
    pub interest_mode: InterestMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels_path: Option<PathBuf>,
    #[serde(default)]
    pub outputs: Outputs,
}

impl RunConfig {
    pub fn max_len(&self) -> usize {
        self.max_len.unwrap_or(match self.detector {
            Detector::Fpof => FPOF_DEFAULT_MAX_LEN,
            _ => DEFAULT_MAX_LEN,
        })
    }

    /// The support threshold the detector mines with, if it uses one.
    pub fn support(&self) -> Option<Threshold> {
        match self.detector {
            Detector::VrArm => self.thresholds.max_supp,
            Detector::VfArm | Detector::Fpof | Detector::Od => self.thresholds.min_supp,
            Detector::Avf => None,
        }
    }

    /// Replaces the detector's support threshold and confidence.
    pub fn with_cell(&self, supp: Threshold, conf: Option<f64>) -> Self {
        let mut out = self.clone();
        match self.detector {
            Detector::VrArm => out.thresholds.max_supp = Some(supp),
            _ => out.thresholds.min_supp = Some(supp),
        }
        out.thresholds.min_conf = conf;
        out
    }

    pub fn validate(&self) -> Result<(), Error> {
        let cfg = |m: String| Err(Error::Config(m));
        if self.contexts.is_empty() {
            return cfg("at least one context is required".into());
        }
        if self.contexts.len() > 1 && !self.join {
            return cfg("several contexts given; pass --join to combine them".into());
        }
        if self.join {
            let mut seen = HashSet::new();
            for c in &self.contexts {
                match &c.tag {
                    None => return cfg(format!("--join needs TAG=PATH, got {c}")),
                    Some(t) if !seen.insert(t) => {
                        return cfg(format!("duplicate context tag {t:?}"))
                    }
                    Some(_) => {}
                }
            }
        }

        let t = &self.thresholds;
        t.validate()?;
        let (need_min, need_max, need_conf) = match self.detector {
            Detector::VrArm => (false, true, true),
            Detector::VfArm | Detector::Od => (true, false, true),
            Detector::Fpof => (true, false, false),
            Detector::Avf => (false, false, false),
        };
        let d = self.detector;
        for (name, needed, present) in [
            ("min_supp", need_min, t.min_supp.is_some()),
            ("max_supp", need_max, t.max_supp.is_some()),
            ("min_conf", need_conf, t.min_conf.is_some()),
        ] {
            if needed && !present {
                return cfg(format!("{d} requires {name}"));
            }
            if !needed && present {
                return cfg(format!("{d} does not use {name}"));
            }
        }

        let max_len = self.max_len();
        let floor = if d.is_rule_based() || d == Detector::Od {
            2
        } else {
            1
        };
        if d != Detector::Avf && max_len < floor {
            return cfg(format!("max_len must be at least {floor} for {d}"));
        }
        if !d.is_rule_based() && self.aggregation != Aggregation::default() {
            return cfg(format!("{d} has no rule aggregation"));
        }
        if !d.is_rule_based() && self.interest_mode != InterestMode::default() {
            return cfg(format!("{d} has no interest mode"));
        }

        let o = &self.outputs;
        if o.rules_csv.is_some() && !(d.is_rule_based() || d == Detector::Od) {
            return cfg(format!("{d} produces no rules to write"));
        }
        if o.explain_top_k > 0 && !d.is_rule_based() {
            return cfg(format!("explanations need a rule-based detector, not {d}"));
        }
        if o.explain_out.is_some() && o.explain_top_k == 0 {
            return cfg("--explain-out needs --explain-top-k".into());
        }
        if self.labels_path.is_none() {
            if o.report_json.is_some() {
                return cfg("--report needs --labels".into());
            }
            if o.band_svg.is_some() {
                return cfg("--band needs --labels".into());
            }
        }
        let mut seen = HashSet::new();
        for p in o.paths() {
            if !seen.insert(p) {
                return cfg(format!("output path {} used twice", p.display()));
            }
        }
        Ok(())
    }
}
