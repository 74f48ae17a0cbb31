//! Greedy independent-set queries over a dynamic object set.
//!
//! Updates pass straight through to the underlying [`Arqs`]. A query runs the
//! greedy loop: unmark everything, then repeatedly take the smallest unmarked
//! object and mark its neighborhood. The result equals the offline greedy
//! scan in object order element for element, and therefore carries its
//! `beta = 1/f` approximation guarantee. Marks are scratch state: queries do
//! not change the stored contents.

use crate::arqs::Arqs;
use crate::error::Result;
use crate::geometry::{FatObject, ShapeClass};
use crate::update::Update;

pub struct Disqs {
    arqs: Arqs,
}

impl Disqs {
    pub fn new(class: ShapeClass) -> Result<Self> {
        Ok(Disqs {
            arqs: Arqs::new(class)?,
        })
    }

    pub fn shape_class(&self) -> ShapeClass {
        self.arqs.shape_class()
    }

    /// Approximation factor of [`query`](Self::query) relative to the optimum.
    pub fn beta(&self) -> f64 {
        self.arqs.shape_class().beta()
    }

    pub fn len(&self) -> usize {
        self.arqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arqs.is_empty()
    }

    pub fn get(&self, id: u64) -> Option<&FatObject> {
        self.arqs.get(id)
    }

    pub fn work_counter(&self) -> u64 {
        self.arqs.work_counter()
    }

    pub fn update(&mut self, u: &Update) -> Result<()> {
        match u {
            Update::Insert { object } => self.arqs.insert(*object),
            Update::Delete { id } => self.arqs.delete(*id),
        }
    }

    /// Greedy independent set of the current contents, ascending in object
    /// order.
    pub fn query(&mut self) -> Vec<FatObject> {
        let mut chosen = Vec::new();
        self.arqs.unmark_all();
        while let Some(next) = self.arqs.smallest_unmarked() {
            self.arqs
                .mark_intersecting(&next)
                .expect("stored objects match the structure's shape class");
            chosen.push(next);
        }
        chosen
    }
}
