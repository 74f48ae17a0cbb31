//! Amortized maintenance of an approximate maximum independent set.
//!
//! The structure forwards every update to a [`Disqs`] and keeps the displayed
//! set `I` frozen between full recomputations. A counter triggers the next
//! recomputation after `max(1, ceil(|I| * eps'))` updates, where `I` is the
//! set produced by the previous recomputation and `eps' = eps / (2 - eps)`.
//! Deletions of displayed objects are reported immediately; every other
//! update changes nothing until the counter fires, at which point the whole
//! difference against the fresh greedy answer is reported at once.
//!
//! Between recomputations at most an `eps'` fraction of `I` can decay, which
//! keeps the displayed set within `(1 - eps) * beta` of the optimum while
//! spending only `O(1/eps)` amortized queries worth of work per update.

use std::collections::{BTreeMap, HashMap};

use crate::disqs::Disqs;
use crate::error::{Error, Result};
use crate::geometry::{FatObject, OrderKey, ShapeClass};
use crate::update::{Update, UpdateSet};

pub struct AmortizedMis {
    disqs: Disqs,
    contents: BTreeMap<OrderKey, FatObject>,
    ids: HashMap<u64, OrderKey>,
    displayed: BTreeMap<OrderKey, FatObject>,
    displayed_at_rebuild: usize,
    since_rebuild: usize,
    eps: f64,
    eps_prime: f64,
}

/// The decay budget between recomputations: chosen so that
/// `(1 - eps') / (1 + eps') = 1 - eps`.
pub fn eps_prime_of(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidEpsilon {
            value: eps,
            range: "(0, 1)",
        });
    }
    Ok(eps / (2.0 - eps))
}

impl AmortizedMis {
    pub fn new(class: ShapeClass, eps: f64) -> Result<Self> {
        let eps_prime = eps_prime_of(eps)?;
        Ok(AmortizedMis {
            disqs: Disqs::new(class)?,
            contents: BTreeMap::new(),
            ids: HashMap::new(),
            displayed: BTreeMap::new(),
            displayed_at_rebuild: 0,
            since_rebuild: 0,
            eps,
            eps_prime,
        })
    }

    pub fn shape_class(&self) -> ShapeClass {
        self.disqs.shape_class()
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn eps_prime(&self) -> f64 {
        self.eps_prime
    }

    /// Number of stored objects.
    pub fn len(&self) -> usize {
        self.contents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contents.is_empty()
    }

    /// The displayed independent set, ascending in object order.
    pub fn independent_set(&self) -> Vec<FatObject> {
        self.displayed.values().copied().collect()
    }

    pub fn independent_set_len(&self) -> usize {
        self.displayed.len()
    }

    pub fn work_counter(&self) -> u64 {
        self.disqs.work_counter()
    }

    /// Apply one update and return the change to the displayed set.
    pub fn update(&mut self, u: &Update) -> Result<UpdateSet> {
        self.disqs.update(u)?;
        let mut deleted_key: Option<OrderKey> = None;
        match u {
            Update::Insert { object } => {
                let key = object.order_key();
                self.contents.insert(key, *object);
                self.ids.insert(object.id(), key);
            }
            Update::Delete { id } => {
                let key = self.ids.remove(id).expect("disqs accepted the delete");
                self.contents.remove(&key);
                deleted_key = Some(key);
            }
        }
        self.since_rebuild += 1;

        let threshold = (self.displayed_at_rebuild as f64 * self.eps_prime).ceil() as usize;
        if self.since_rebuild == threshold.max(1) {
            // The diff runs against the displayed set as the caller still
            // sees it; a deleted displayed object falls out here because it
            // is no longer stored and cannot reappear in the fresh query.
            let fresh = self.disqs.query();
            let delta = diff_ordered(&self.displayed, &fresh);
            self.displayed = fresh.into_iter().map(|o| (o.order_key(), o)).collect();
            self.displayed_at_rebuild = self.displayed.len();
            self.since_rebuild = 0;
            Ok(delta)
        } else if let Some(gone) = deleted_key.and_then(|k| self.displayed.remove(&k)) {
            Ok(UpdateSet {
                added: Vec::new(),
                removed: vec![gone.id()],
            })
        } else {
            Ok(UpdateSet::default())
        }
    }
}

/// Symmetric difference between the old displayed map and a fresh query
/// result (already ascending in object order).
fn diff_ordered(old: &BTreeMap<OrderKey, FatObject>, fresh: &[FatObject]) -> UpdateSet {
    let mut delta = UpdateSet::default();
    let mut old_iter = old.iter().peekable();
    let mut fresh_iter = fresh.iter().peekable();
    loop {
        match (old_iter.peek(), fresh_iter.peek()) {
            (Some((ok, oo)), Some(fo)) => {
                let fk = fo.order_key();
                match (*ok).cmp(&fk) {
                    std::cmp::Ordering::Less => {
                        delta.removed.push(oo.id());
                        old_iter.next();
                    }
                    std::cmp::Ordering::Greater => {
                        delta.added.push(**fo);
                        fresh_iter.next();
                    }
                    std::cmp::Ordering::Equal => {
                        old_iter.next();
                        fresh_iter.next();
                    }
                }
            }
            (Some((_, oo)), None) => {
                delta.removed.push(oo.id());
                old_iter.next();
            }
            (None, Some(fo)) => {
                delta.added.push(**fo);
                fresh_iter.next();
            }
            (None, None) => break,
        }
    }
    delta
}
