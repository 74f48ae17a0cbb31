//! Feed a workload into a structure, record metrics, and verify traces.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::amortized::AmortizedMis;
use crate::deamortized::{DeamState, RoundStats};
use crate::error::{Error, Result};
use crate::geometry::{FatObject, ShapeClass};
use crate::oracle::{exact_mis, Instance, EXACT_MIS_MAX};
use crate::update::{Update, UpdateSet};
use crate::workload::{generate, Workload};

/// Which dynamic structure a run drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StructureKind {
    Amortized,
    Deamortized,
}

impl FromStr for StructureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "amortized" => Ok(StructureKind::Amortized),
            "deamortized" => Ok(StructureKind::Deamortized),
            _ => Err(Error::InvalidWorkload(format!(
                "unknown structure {s:?} (expected amortized or deamortized)"
            ))),
        }
    }
}

impl std::fmt::Display for StructureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StructureKind::Amortized => write!(f, "amortized"),
            StructureKind::Deamortized => write!(f, "deamortized"),
        }
    }
}

/// Metrics for one applied update.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct UpdateRecord {
    pub index: u64,
    pub work_units: u64,
    pub delta_len: usize,
    pub i_len: usize,
    pub s_len: usize,
    /// Exact optimum, attached while the live set stays within the oracle cap.
    pub opt: Option<usize>,
    /// `i_len / opt` where the oracle ran and the optimum is nonzero.
    pub ratio: Option<f64>,
}

/// Run-level digest of the per-update records.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub max_delta: usize,
    /// Log-log slope of median work units against live size, when the run
    /// spans enough distinct sizes to fit one.
    pub fitted_work_exponent: Option<f64>,
    pub min_ratio: Option<f64>,
}

/// Everything a run produced: configuration, per-update and per-round
/// records, and the summary.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub structure: StructureKind,
    pub workload: Workload,
    pub eps: f64,
    pub updates: Vec<UpdateRecord>,
    /// Completed-round reports; empty for the amortized structure.
    pub rounds: Vec<RoundStats>,
    pub summary: RunSummary,
}

impl RunReport {
    /// One CSV row per update, preceded by a header row.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "index,work_units,delta_len,i_len,s_len,opt,ratio")?;
        for r in &self.updates {
            let opt = r.opt.map_or(String::new(), |v| v.to_string());
            let ratio = r.ratio.map_or(String::new(), |v| format!("{v:.6}"));
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.index, r.work_units, r.delta_len, r.i_len, r.s_len, opt, ratio
            )?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum TraceLine {
    Header {
        structure: StructureKind,
        shape_class: ShapeClass,
        eps: f64,
        /// Update-set cap for the deamortized structure, absent otherwise.
        #[serde(skip_serializing_if = "Option::is_none")]
        delta_cap: Option<usize>,
    },
    Update {
        index: u64,
        update: Update,
        delta: UpdateSet,
        i_len: usize,
        s_len: usize,
        work_units: u64,
    },
}

enum Structure {
    Amortized(Box<AmortizedMis>),
    Deamortized(Box<DeamState>),
}

impl Structure {
    fn update(&mut self, u: &Update) -> Result<UpdateSet> {
        match self {
            Structure::Amortized(s) => s.update(u),
            Structure::Deamortized(s) => s.update(u),
        }
    }

    fn independent_set(&self) -> Vec<FatObject> {
        match self {
            Structure::Amortized(s) => s.independent_set(),
            Structure::Deamortized(s) => s.independent_set(),
        }
    }

    fn len(&self) -> usize {
        match self {
            Structure::Amortized(s) => s.len(),
            Structure::Deamortized(s) => s.len(),
        }
    }

    fn work_units_of_last(&self, before: u64) -> u64 {
        match self {
            Structure::Amortized(s) => s.work_counter() - before,
            Structure::Deamortized(s) => s.last_disqs_units() + s.last_mix_units(),
        }
    }

    fn work_counter(&self) -> u64 {
        match self {
            Structure::Amortized(s) => s.work_counter(),
            Structure::Deamortized(_) => 0,
        }
    }
}

/// Generate the workload, feed it through the chosen structure, and collect
/// metrics. The exact oracle runs while the live set has at most
/// `oracle_cap` objects (clamped to the solver limit); pass 0 to disable it.
/// A JSONL trace of every update and returned set goes to `trace` if given.
pub fn run(
    kind: StructureKind,
    w: &Workload,
    eps: f64,
    oracle_cap: usize,
    mut trace: Option<&mut dyn Write>,
) -> Result<RunReport> {
    let updates = generate(w)?;
    let mut structure = match kind {
        StructureKind::Amortized => {
            Structure::Amortized(Box::new(AmortizedMis::new(w.shape_class, eps)?))
        }
        StructureKind::Deamortized => {
            Structure::Deamortized(Box::new(DeamState::new(w.shape_class, eps)?))
        }
    };
    let delta_cap = match &structure {
        Structure::Amortized(_) => None,
        Structure::Deamortized(s) => Some(s.params().phi.floor() as usize + 1),
    };
    if let Some(out) = trace.as_deref_mut() {
        let header = TraceLine::Header {
            structure: kind,
            shape_class: w.shape_class,
            eps,
            delta_cap,
        };
        writeln!(out, "{}", serde_json::to_string(&header)?)?;
    }

    let cap = oracle_cap.min(EXACT_MIS_MAX);
    let mut oracle_live = cap > 0;
    let mut live: BTreeMap<u64, FatObject> = BTreeMap::new();
    let mut view: BTreeMap<u64, FatObject> = BTreeMap::new();
    let mut records = Vec::with_capacity(updates.len());

    for (i, u) in updates.iter().enumerate() {
        let index = i as u64 + 1;
        match u {
            Update::Insert { object } => {
                live.insert(object.id(), *object);
            }
            Update::Delete { id } => {
                live.remove(id);
            }
        }
        let before = structure.work_counter();
        let delta = structure.update(u)?;
        let work_units = structure.work_units_of_last(before);

        apply_delta(&mut view, &delta, i)?;
        let i_len = view.len();
        let s_len = structure.len();
        if s_len != live.len() {
            return Err(violation(i, "live size diverged from the update fold"));
        }

        oracle_live = oracle_live && live.len() <= cap;
        let mut opt = None;
        let mut ratio = None;
        if oracle_live {
            let inst = Instance::new(w.shape_class, live.values().copied().collect())?;
            let (best, _) = exact_mis(&inst)?;
            opt = Some(best);
            if best > 0 {
                ratio = Some(i_len as f64 / best as f64);
            }
        }

        if let Some(out) = trace.as_deref_mut() {
            let line = TraceLine::Update {
                index,
                update: *u,
                delta: delta.clone(),
                i_len,
                s_len,
                work_units,
            };
            writeln!(out, "{}", serde_json::to_string(&line)?)?;
        }
        records.push(UpdateRecord {
            index,
            work_units,
            delta_len: delta.len(),
            i_len,
            s_len,
            opt,
            ratio,
        });
    }

    check_end_state(&structure.independent_set(), &live, updates.len())?;
    let summary = RunSummary {
        max_delta: records.iter().map(|r| r.delta_len).max().unwrap_or(0),
        fitted_work_exponent: fit_work_exponent(&records),
        min_ratio: records
            .iter()
            .filter_map(|r| r.ratio)
            .min_by(f64::total_cmp),
    };
    let rounds = match &structure {
        Structure::Amortized(_) => Vec::new(),
        Structure::Deamortized(s) => s.round_stats().to_vec(),
    };
    Ok(RunReport {
        structure: kind,
        workload: *w,
        eps,
        updates: records,
        rounds,
        summary,
    })
}

fn violation(index: usize, message: &str) -> Error {
    Error::TraceViolation {
        line: index + 1,
        message: message.into(),
    }
}

fn apply_delta(view: &mut BTreeMap<u64, FatObject>, delta: &UpdateSet, index: usize) -> Result<()> {
    for id in &delta.removed {
        if view.remove(id).is_none() {
            return Err(violation(index, &format!("removed {id} was not displayed")));
        }
    }
    for o in &delta.added {
        if view.insert(o.id(), *o).is_some() {
            return Err(violation(index, &format!("added {} twice", o.id())));
        }
    }
    Ok(())
}

fn check_end_state(
    shown: &[FatObject],
    live: &BTreeMap<u64, FatObject>,
    len: usize,
) -> Result<()> {
    for (i, a) in shown.iter().enumerate() {
        if !live.contains_key(&a.id()) {
            return Err(violation(len, "displayed object is not live"));
        }
        for b in &shown[i + 1..] {
            if a.intersects_unchecked(b) {
                return Err(violation(
                    len,
                    &format!("displayed objects {} and {} intersect", a.id(), b.id()),
                ));
            }
        }
    }
    Ok(())
}

/// Least-squares slope of log median work against log live size, over runs
/// that visit enough distinct sizes. Informational only.
fn fit_work_exponent(records: &[UpdateRecord]) -> Option<f64> {
    let mut by_size: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    for r in records {
        if r.s_len >= 2 && r.work_units > 0 {
            by_size.entry(r.s_len).or_default().push(r.work_units);
        }
    }
    if by_size.len() < 8 {
        return None;
    }
    let points: Vec<(f64, f64)> = by_size
        .into_iter()
        .map(|(n, mut works)| {
            works.sort_unstable();
            let median = works[works.len() / 2];
            ((n as f64).ln(), (median as f64).ln())
        })
        .collect();
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

/// Digest of a verified trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceSummary {
    pub updates: usize,
    pub final_i_len: usize,
    pub final_s_len: usize,
    pub max_delta: usize,
}

/// Replay a trace written by [`run`] and re-check every invariant: the
/// update stream folds to the recorded live sizes, the deltas fold to the
/// recorded displayed sizes, the displayed set stays independent and inside
/// the live set, and no delta exceeds the header's cap.
pub fn verify_trace<R: BufRead>(reader: R) -> Result<TraceSummary> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::TraceViolation {
            line: 1,
            message: "empty trace".into(),
        })??;
    let TraceLine::Header {
        shape_class,
        delta_cap,
        ..
    } = serde_json::from_str(&header)?
    else {
        return Err(Error::TraceViolation {
            line: 1,
            message: "first line is not a header".into(),
        });
    };

    let mut live: BTreeMap<u64, FatObject> = BTreeMap::new();
    let mut view: BTreeMap<u64, FatObject> = BTreeMap::new();
    let mut updates = 0usize;
    let mut max_delta = 0usize;
    for (lineno, line) in lines.enumerate() {
        let lineno = lineno + 2;
        let fail = |message: String| Error::TraceViolation {
            line: lineno,
            message,
        };
        let TraceLine::Update {
            index,
            update,
            delta,
            i_len,
            s_len,
            work_units: _,
        } = serde_json::from_str(&line?)?
        else {
            return Err(fail("unexpected second header".into()));
        };
        updates += 1;
        if index != updates as u64 {
            return Err(fail(format!("index {index} out of order")));
        }
        match &update {
            Update::Insert { object } => {
                if !shape_class.accepts(object) {
                    return Err(fail(format!("object {} off the shape class", object.id())));
                }
                if live.insert(object.id(), *object).is_some() {
                    return Err(fail(format!("duplicate insert of {}", object.id())));
                }
            }
            Update::Delete { id } => {
                if live.remove(id).is_none() {
                    return Err(fail(format!("delete of unknown id {id}")));
                }
            }
        }
        if live.len() != s_len {
            return Err(fail(format!(
                "recorded live size {s_len}, fold says {}",
                live.len()
            )));
        }
        if let Some(cap) = delta_cap {
            if delta.len() > cap {
                return Err(fail(format!("delta of {} exceeds cap {cap}", delta.len())));
            }
        }
        max_delta = max_delta.max(delta.len());
        for id in &delta.removed {
            if view.remove(id).is_none() {
                return Err(fail(format!("removed {id} was not displayed")));
            }
        }
        for o in &delta.added {
            for shown in view.values() {
                if o.intersects_unchecked(shown) {
                    return Err(fail(format!(
                        "added {} intersects displayed {}",
                        o.id(),
                        shown.id()
                    )));
                }
            }
            if view.insert(o.id(), *o).is_some() {
                return Err(fail(format!("added {} twice", o.id())));
            }
        }
        if view.len() != i_len {
            return Err(fail(format!(
                "recorded displayed size {i_len}, fold says {}",
                view.len()
            )));
        }
        for id in view.keys() {
            if !live.contains_key(id) {
                return Err(fail(format!("displayed {id} is not live")));
            }
        }
    }
    Ok(TraceSummary {
        updates,
        final_i_len: view.len(),
        final_s_len: live.len(),
        max_delta,
    })
}
