//! Batch sweeps over the tree catalog with an append-only JSONL result store.
//!
//! Every per-tree task is pure. Tasks fan out over a dedicated rayon pool and
//! are collected in catalog order, so for a fixed configuration the record set
//! is identical across runs apart from `runtime_ms`.

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::apportion::{apportionment_report, DEFAULT_TOLERANCE};
use crate::catalog::catalog;
use crate::certificate::{
    certificate_magnitude_check, check_certificate_equivalence, check_transposition_invariance, composition_chain,
};
use crate::decomposition::{decompose_directed_knn, decompose_k2n1, decompose_knxnx, Decomposition};
use crate::error::{Error, Result};
use crate::group::sigma_from_labeled_tree;
use crate::labeling::{find_beta_with, Labeling, SearchOptions};
use crate::tree::{CanonicalCode, FunctionalTree};

pub const TOOLCHAIN_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Beta,
    Knn,
    K2n1,
    Knxnx,
    Magnitude,
    Equivalence,
    Transposition,
    Composition,
    Apportion,
    Group,
}

impl CheckKind {
    pub const ALL: [CheckKind; 10] = [
        CheckKind::Beta,
        CheckKind::Knn,
        CheckKind::K2n1,
        CheckKind::Knxnx,
        CheckKind::Magnitude,
        CheckKind::Equivalence,
        CheckKind::Transposition,
        CheckKind::Composition,
        CheckKind::Apportion,
        CheckKind::Group,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Beta => "beta",
            CheckKind::Knn => "knn",
            CheckKind::K2n1 => "k2n1",
            CheckKind::Knxnx => "knxnx",
            CheckKind::Magnitude => "magnitude",
            CheckKind::Equivalence => "equivalence",
            CheckKind::Transposition => "transposition",
            CheckKind::Composition => "composition",
            CheckKind::Apportion => "apportion",
            CheckKind::Group => "group",
        }
    }

    pub fn parse(s: &str) -> Result<CheckKind> {
        CheckKind::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::MalformedInput(format!("unknown check {s:?}")))
    }

    fn uses_x(self) -> bool {
        matches!(self, CheckKind::K2n1 | CheckKind::Knxnx)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub checks: Vec<CheckKind>,
    pub n_min: usize,
    pub n_max: usize,
    #[serde(default = "default_x")]
    pub x_min: usize,
    #[serde(default = "default_x")]
    pub x_max: usize,
    /// Worker threads; 1 keeps everything on a single thread.
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// JSONL file the records are appended to.
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Seed for the labeling search; `None` runs the deterministic search only.
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_x() -> usize {
    1
}

fn default_workers() -> usize {
    1
}

impl CampaignConfig {
    pub fn new(checks: Vec<CheckKind>, n_min: usize, n_max: usize) -> Self {
        CampaignConfig {
            checks,
            n_min,
            n_max,
            x_min: 1,
            x_max: 1,
            workers: 1,
            output: None,
            seed: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub pass: bool,
    /// Set when the check does not apply to this tree or exceeds a size cap.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    /// Numerical residual; 0 for exact checks.
    pub residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub runtime_ms: f64,
}

impl CheckOutcome {
    fn failed(&self) -> bool {
        !self.pass && self.skipped.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignRecord {
    pub tree_code: CanonicalCode,
    pub n: usize,
    pub tree: Vec<usize>,
    pub labeling: Option<Vec<usize>>,
    pub checks: BTreeMap<String, CheckOutcome>,
    pub toolchain_version: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub trees: usize,
    pub checks_run: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub failing_tree_codes: Vec<CanonicalCode>,
}

impl CampaignSummary {
    pub fn pass(&self) -> bool {
        self.failed == 0
    }
}

/// What one check produced, before timing is attached.
enum Verdict {
    Done {
        pass: bool,
        residual: f64,
        detail: Option<String>,
    },
    Skipped(String),
}

impl Verdict {
    fn exact(pass: bool) -> Verdict {
        Verdict::Done {
            pass,
            residual: 0.0,
            detail: None,
        }
    }
}

fn from_error(e: Error) -> Verdict {
    match e {
        Error::ResourceLimit { .. } | Error::PreconditionViolated(_) => Verdict::Skipped(e.to_string()),
        other => Verdict::Done {
            pass: false,
            residual: 0.0,
            detail: Some(other.to_string()),
        },
    }
}

fn timed(f: impl FnOnce() -> Result<Verdict>) -> CheckOutcome {
    let start = Instant::now();
    let verdict = f().unwrap_or_else(from_error);
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    match verdict {
        Verdict::Done { pass, residual, detail } => CheckOutcome {
            pass,
            skipped: None,
            residual,
            detail,
            runtime_ms,
        },
        Verdict::Skipped(reason) => CheckOutcome {
            pass: false,
            skipped: Some(reason),
            residual: 0.0,
            detail: None,
            runtime_ms,
        },
    }
}

fn decomposition_verdict(d: Result<Decomposition>) -> Result<Verdict> {
    d.map(|_| Verdict::exact(true))
}

fn run_check(kind: CheckKind, x: usize, t: &FunctionalTree, lab: &Result<Labeling, String>) -> Result<Verdict> {
    let need = || -> Result<&Labeling> {
        lab.as_ref()
            .map_err(|e| Error::VerificationFailed(format!("no labeling: {e}")))
    };
    match kind {
        CheckKind::Beta => Ok(match lab {
            Ok(_) => Verdict::exact(true),
            Err(e) => Verdict::Done {
                pass: false,
                residual: 0.0,
                detail: Some(e.clone()),
            },
        }),
        CheckKind::Knn => decomposition_verdict(decompose_directed_knn(t, need()?)),
        CheckKind::K2n1 => decomposition_verdict(decompose_k2n1(t, need()?, x)),
        CheckKind::Knxnx => decomposition_verdict(decompose_knxnx(t, need()?, x)),
        CheckKind::Magnitude => {
            let r = certificate_magnitude_check(t)?;
            Ok(Verdict::Done {
                pass: r.pass,
                residual: 0.0,
                detail: Some(r.expected),
            })
        }
        CheckKind::Equivalence => Ok(Verdict::exact(check_certificate_equivalence(t)?.pass)),
        CheckKind::Transposition => Ok(Verdict::exact(check_transposition_invariance(t)?.pass)),
        CheckKind::Composition => {
            let c = composition_chain(t)?;
            Ok(Verdict::exact(c.implication_holds && c.ends_constant))
        }
        CheckKind::Apportion => {
            let r = apportionment_report(t, need()?, DEFAULT_TOLERANCE)?;
            Ok(Verdict::Done {
                pass: r.pass,
                residual: r.kappa_max_error.max(r.unitary_residual).max(r.allones.max_deviation),
                detail: None,
            })
        }
        CheckKind::Group => {
            let lab = need()?;
            let sigma = sigma_from_labeled_tree(t, lab)?;
            let d = decompose_directed_knn(t, lab)?;
            let n = t.n();
            let r = lab.h.root();
            Ok(Verdict::exact(
                (0..n).all(|j| sigma.column_edges(j) == d.copies[(j + n - r) % n]),
            ))
        }
    }
}

fn check_key(kind: CheckKind, x: usize) -> String {
    if kind.uses_x() {
        format!("{}[x={x}]", kind.name())
    } else {
        kind.name().to_string()
    }
}

fn tree_record(config: &CampaignConfig, t: &FunctionalTree, code: CanonicalCode) -> CampaignRecord {
    let opts = SearchOptions {
        seed: config.seed,
        ..SearchOptions::default()
    };
    let lab = find_beta_with(t, &opts).map_err(|e| e.to_string());
    let mut checks = BTreeMap::new();
    for &kind in &config.checks {
        let xs = if kind.uses_x() {
            config.x_min..=config.x_max
        } else {
            1..=1
        };
        for x in xs {
            checks.insert(check_key(kind, x), timed(|| run_check(kind, x, t, &lab)));
        }
    }
    CampaignRecord {
        tree_code: code,
        n: t.n(),
        tree: t.parent_map().to_vec(),
        labeling: lab.ok().map(|l| l.sigma.into_vec()),
        checks,
        toolchain_version: TOOLCHAIN_VERSION.to_string(),
    }
}

pub fn summarize(records: &[CampaignRecord]) -> CampaignSummary {
    let mut s = CampaignSummary {
        trees: records.len(),
        ..CampaignSummary::default()
    };
    for r in records {
        for outcome in r.checks.values() {
            if outcome.skipped.is_some() {
                s.skipped += 1;
                continue;
            }
            s.checks_run += 1;
            if outcome.pass {
                s.passed += 1;
            } else {
                s.failed += 1;
            }
        }
        if r.checks.values().any(CheckOutcome::failed) {
            s.failing_tree_codes.push(r.tree_code.clone());
        }
    }
    s
}

/// Runs every configured check on every catalog tree in range, without
/// touching the output file.
pub fn campaign_records(config: &CampaignConfig) -> Result<Vec<CampaignRecord>> {
    if config.checks.is_empty() {
        return Ok(Vec::new());
    }
    if config.n_min == 0 || config.n_min > config.n_max {
        return Err(Error::MalformedInput(format!(
            "empty or invalid n range {}..={}",
            config.n_min, config.n_max
        )));
    }
    if config.x_min == 0 || config.x_min > config.x_max {
        return Err(Error::MalformedInput(format!(
            "empty or invalid x range {}..={}",
            config.x_min, config.x_max
        )));
    }
    let mut trees = Vec::new();
    for n in config.n_min..=config.n_max {
        trees.extend(catalog(n)?.into_iter().map(|e| (e.tree, e.canonical_code)));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .map_err(|e| Error::MalformedInput(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| {
        trees
            .into_par_iter()
            .map(|(t, code)| tree_record(config, &t, code))
            .collect()
    }))
}

/// Appends one JSON line per record.
pub fn append_records(path: &PathBuf, records: &[CampaignRecord]) -> Result<()> {
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records(path: &PathBuf) -> Result<Vec<CampaignRecord>> {
    std::fs::read_to_string(path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Ok(serde_json::from_str(l)?))
        .collect()
}

/// Runs the campaign, appends its records to `config.output` when set, and
/// returns the summary, or [`Error::PartialFailure`] if any check failed.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignSummary> {
    let records = campaign_records(config)?;
    if let Some(path) = &config.output {
        append_records(path, &records)?;
    }
    let summary = summarize(&records);
    if summary.pass() {
        Ok(summary)
    } else {
        Err(Error::PartialFailure(Box::new(summary)))
    }
}
