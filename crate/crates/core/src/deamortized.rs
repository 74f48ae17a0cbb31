//! Worst-case maintenance of an approximate maximum independent set.
//!
//! Updates are grouped into rounds. Each round drains the previous round's
//! archived updates into a background [`Disqs`] and takes one fresh query
//! snapshot, while a [`MixState`] slowly morphs the displayed set from the
//! snapshot taken three rounds ago to the one taken two rounds ago. Every
//! update performs a bounded number of work units and returns an update set
//! of at most `phi + 1` objects, so no single update ever pays for a full
//! recomputation.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::Serialize;

use crate::disqs::Disqs;
use crate::error::{Error, Result};
use crate::geometry::{FatObject, OrderKey, ShapeClass};
use crate::mixer::{MixOp, MixState};
use crate::update::{Update, UpdateSet};

/// Rates derived from `eps` that size rounds and budgets.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BudgetParams {
    pub eps: f64,
    pub beta: f64,
    pub g: f64,
    pub h: f64,
    pub phi: f64,
}

/// Derive the round-drift rates and the per-update step cap from `eps`.
///
/// `g` bounds how fast the optimum may shrink across a round and `h` how
/// fast it may grow; `phi` caps the mix steps applied per update.
pub fn budget_params(eps: f64, beta: f64) -> Result<BudgetParams> {
    if !(eps > 0.0 && eps <= 0.25) {
        return Err(Error::InvalidEpsilon {
            value: eps,
            range: "(0, 1/4]",
        });
    }
    let root = (1.0 - 4.0 * eps).sqrt();
    let g = (1.0 + root) / 2.0;
    let h = (3.0 - root) / 2.0;
    let phi = 16.0 * h * h / (eps * beta * g * g * g);
    debug_assert!((0.5..=1.0).contains(&g));
    debug_assert!((1.0..=1.5).contains(&h));
    Ok(BudgetParams {
        eps,
        beta,
        g,
        h,
        phi,
    })
}

/// Scale factors translating the analytic time budgets into deterministic
/// work units. Measured once on reference churn runs and frozen.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WorkCalibration {
    pub disqs_unit_scale: f64,
    pub mix_unit_scale: f64,
}

impl Default for WorkCalibration {
    fn default() -> Self {
        WorkCalibration {
            disqs_unit_scale: 4.0,
            mix_unit_scale: 4.0,
        }
    }
}

/// One completed round: its length, snapshot size, spent work and slack.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RoundStats {
    pub round: u64,
    pub round_len: usize,
    /// Size of the snapshot produced during this round.
    pub i_hat_len: usize,
    pub disqs_units: u64,
    pub mix_units: u64,
    pub max_delta: usize,
    /// Updates left in the round when the catch-up query finished.
    pub disqs_slack: usize,
    /// Updates left in the round when the mix emitted its last step.
    pub mix_slack: usize,
    /// Index of the last update of this round (1-based over the run).
    pub end_update: u64,
}

/// Independent-set structure with worst-case bounded work per update.
pub struct DeamState {
    class: ShapeClass,
    params: BudgetParams,
    cal: WorkCalibration,
    disqs: Disqs,
    queue: VecDeque<Update>,
    drainable: usize,
    s_map: BTreeMap<OrderKey, FatObject>,
    s_ids: HashMap<u64, OrderKey>,
    i_map: BTreeMap<OrderKey, FatObject>,
    i_ids: HashMap<u64, OrderKey>,
    prev3: Vec<FatObject>,
    prev2: Vec<FatObject>,
    fresh: Option<Vec<FatObject>>,
    mix: MixState,
    round: u64,
    round_len: usize,
    pos: usize,
    update_count: u64,
    round_disqs_units: u64,
    round_mix_units: u64,
    round_max_delta: usize,
    disqs_done_pos: Option<usize>,
    mix_done_pos: Option<usize>,
    last_disqs_units: u64,
    last_mix_units: u64,
    stats: Vec<RoundStats>,
}

impl DeamState {
    /// Empty structure over `class` with the frozen default calibration.
    pub fn new(class: ShapeClass, eps: f64) -> Result<Self> {
        Self::with_calibration(class, eps, WorkCalibration::default())
    }

    pub fn with_calibration(class: ShapeClass, eps: f64, cal: WorkCalibration) -> Result<Self> {
        class.validate()?;
        let params = budget_params(eps, class.beta())?;
        Ok(DeamState {
            class,
            params,
            cal,
            disqs: Disqs::new(class)?,
            queue: VecDeque::new(),
            drainable: 0,
            s_map: BTreeMap::new(),
            s_ids: HashMap::new(),
            i_map: BTreeMap::new(),
            i_ids: HashMap::new(),
            prev3: Vec::new(),
            prev2: Vec::new(),
            fresh: None,
            mix: MixState::new(&[], &[]),
            round: 1,
            round_len: 1,
            pos: 0,
            update_count: 0,
            round_disqs_units: 0,
            round_mix_units: 0,
            round_max_delta: 0,
            disqs_done_pos: None,
            mix_done_pos: None,
            last_disqs_units: 0,
            last_mix_units: 0,
            stats: Vec::new(),
        })
    }

    pub fn shape_class(&self) -> ShapeClass {
        self.class
    }

    pub fn params(&self) -> &BudgetParams {
        &self.params
    }

    /// Number of live objects.
    pub fn len(&self) -> usize {
        self.s_map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s_map.is_empty()
    }

    /// The displayed independent set, ascending in object order.
    pub fn independent_set(&self) -> Vec<FatObject> {
        self.i_map.values().copied().collect()
    }

    pub fn independent_set_len(&self) -> usize {
        self.i_map.len()
    }

    /// Whether `id` is live.
    pub fn contains(&self, id: u64) -> bool {
        self.s_ids.contains_key(&id)
    }

    /// Completed-round reports, oldest first.
    pub fn round_stats(&self) -> &[RoundStats] {
        &self.stats
    }

    /// Work units the last update spent on the background structure.
    pub fn last_disqs_units(&self) -> u64 {
        self.last_disqs_units
    }

    /// Work units the last update spent advancing the mix.
    pub fn last_mix_units(&self) -> u64 {
        self.last_mix_units
    }

    pub fn current_round(&self) -> u64 {
        self.round
    }

    /// Apply one update; the returned set is the exact change to the
    /// displayed independent set and never exceeds `phi + 1` objects.
    pub fn update(&mut self, u: &Update) -> Result<UpdateSet> {
        // Events fold to the net change so an object that leaves and
        // re-enters the displayed set within one update cancels out.
        let mut events: HashMap<u64, (i64, FatObject)> = HashMap::new();

        match u {
            Update::Insert { object } => {
                self.class.check(object)?;
                if self.s_ids.contains_key(&object.id()) {
                    return Err(Error::DuplicateId(object.id()));
                }
                let key = object.order_key();
                self.s_ids.insert(object.id(), key);
                self.s_map.insert(key, *object);
            }
            Update::Delete { id } => {
                let Some(key) = self.s_ids.remove(id) else {
                    return Err(Error::UnknownId(*id));
                };
                self.s_map.remove(&key);
                if let Some(gone) = self.i_ids.remove(id) {
                    let obj = self.i_map.remove(&gone).expect("ids mirror the map");
                    events.insert(*id, (-1, obj));
                }
            }
        }
        self.queue.push_back(*u);
        self.update_count += 1;

        self.run_disqs_budget()?;
        self.run_mix_budget(&mut events)?;

        let mut delta = UpdateSet::default();
        for (id, (net, obj)) in events {
            if net > 0 {
                delta.added.push(obj);
            } else if net < 0 {
                delta.removed.push(id);
            }
        }
        let phi_cap = self.params.phi.floor() as usize + 1;
        assert!(
            delta.len() <= phi_cap,
            "update set of {} exceeds the cap of {}",
            delta.len(),
            phi_cap
        );
        self.round_max_delta = self.round_max_delta.max(delta.len());

        self.pos += 1;
        if self.pos == self.round_len {
            self.finish_round()?;
        }
        Ok(delta)
    }

    fn disqs_budget(&self) -> u64 {
        let p = &self.params;
        let d = self.class.dimension() as f64;
        let n = self.s_map.len() as f64;
        let f_units = (n + 1.0).powf(1.0 - 1.0 / (2.0 * d)) + 8.0 * (n + 2.0).log2() + 8.0;
        let rate = 1.0 + 2.0 * p.h / (p.beta * p.eps);
        (self.cal.disqs_unit_scale * rate * f_units).ceil() as u64
    }

    fn mix_budget(&self) -> u64 {
        let gamma = ((self.prev3.len() + self.prev2.len() + 2) as f64).log2().ceil();
        (self.cal.mix_unit_scale * self.params.phi * gamma).ceil() as u64
    }

    fn run_disqs_budget(&mut self) -> Result<()> {
        let budget = self.disqs_budget();
        let start = self.disqs.work_counter();
        while self.disqs.work_counter() - start < budget {
            if self.drainable > 0 {
                let u = self.queue.pop_front().expect("drainable updates queued");
                self.drainable -= 1;
                self.disqs.update(&u)?;
            } else if self.fresh.is_none() {
                self.fresh = Some(self.disqs.query());
                self.disqs_done_pos.get_or_insert(self.pos);
            } else {
                break;
            }
        }
        let spent = self.disqs.work_counter() - start;
        self.last_disqs_units = spent;
        self.round_disqs_units += spent;
        Ok(())
    }

    fn run_mix_budget(&mut self, events: &mut HashMap<u64, (i64, FatObject)>) -> Result<()> {
        let budget = self.mix_budget();
        let cap = self.params.phi.floor() as usize;
        let start = self.mix.work_counter();
        let mut advances = 0;
        while !self.mix.done() && advances < cap && self.mix.work_counter() - start < budget {
            let step = self.mix.advance()?;
            advances += 1;
            let id = step.object.id();
            match step.op {
                MixOp::Remove => {
                    if let Some(key) = self.i_ids.remove(&id) {
                        let obj = self.i_map.remove(&key).expect("ids mirror the map");
                        events.entry(id).or_insert((0, obj)).0 -= 1;
                    }
                }
                MixOp::Add => {
                    // Additions of objects deleted since the snapshot was
                    // taken are dropped; I must stay inside the live set.
                    if self.s_ids.contains_key(&id) && !self.i_ids.contains_key(&id) {
                        let key = step.object.order_key();
                        self.i_ids.insert(id, key);
                        self.i_map.insert(key, step.object);
                        events.entry(id).or_insert((0, step.object)).0 += 1;
                    }
                }
            }
        }
        if self.mix.done() {
            self.mix_done_pos.get_or_insert(self.pos);
        }
        let spent = self.mix.work_counter() - start;
        self.last_mix_units = spent;
        self.round_mix_units += spent;
        Ok(())
    }

    fn finish_round(&mut self) -> Result<()> {
        if !self.mix.done() {
            return Err(Error::Feasibility {
                round: self.round,
                message: format!(
                    "mix finished {} of {} steps at round end",
                    self.mix.emitted(),
                    self.mix.planned()
                ),
            });
        }
        let Some(fresh) = self.fresh.take() else {
            return Err(Error::Feasibility {
                round: self.round,
                message: "catch-up query missing at round end".into(),
            });
        };

        self.stats.push(RoundStats {
            round: self.round,
            round_len: self.round_len,
            i_hat_len: fresh.len(),
            disqs_units: self.round_disqs_units,
            mix_units: self.round_mix_units,
            max_delta: self.round_max_delta,
            disqs_slack: self.round_len - 1 - self.disqs_done_pos.unwrap_or(self.round_len - 1),
            mix_slack: self.round_len - 1 - self.mix_done_pos.unwrap_or(self.round_len - 1),
            end_update: self.update_count,
        });

        self.prev3 = std::mem::replace(&mut self.prev2, fresh);
        self.mix = MixState::new(&self.prev3, &self.prev2);
        self.round += 1;
        self.round_len = ((self.params.eps * self.prev2.len() as f64).floor() as usize).max(1);
        self.pos = 0;
        self.drainable = self.queue.len();
        self.round_disqs_units = 0;
        self.round_mix_units = 0;
        self.round_max_delta = 0;
        self.disqs_done_pos = None;
        self.mix_done_pos = None;
        Ok(())
    }
}
