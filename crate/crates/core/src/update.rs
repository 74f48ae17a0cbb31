//! Update and update-set types shared by the dynamic structures.

use serde::{Deserialize, Serialize};

use crate::geometry::FatObject;

/// One step of a dynamic object sequence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Update {
    Insert { object: FatObject },
    Delete { id: u64 },
}

impl Update {
    pub fn insert(object: FatObject) -> Self {
        Update::Insert { object }
    }

    pub fn delete(id: u64) -> Self {
        Update::Delete { id }
    }
}

/// Net change to the displayed independent set after one update, presented as
/// a symmetric difference: applying the additions and removals to the
/// caller's copy of the previous set reproduces the new one. An id never
/// appears on both sides.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct UpdateSet {
    pub added: Vec<FatObject>,
    pub removed: Vec<u64>,
}

impl UpdateSet {
    pub fn len(&self) -> usize {
        self.added.len() + self.removed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty()
    }
}
