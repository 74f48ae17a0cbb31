//! Shared helpers for integration tests: a flat-list reference for the
//! marking structure and seeded instance generators.

#![allow(dead_code)]

use geomis::error::{Error, Result};
use geomis::geometry::{object_order, FatObject, ShapeClass};
use rand::rngs::StdRng;
use rand::Rng;

/// Obviously-correct reference for `Arqs`: a vector of (object, marked)
/// pairs scanned linearly by every operation.
pub struct FlatModel {
    class: ShapeClass,
    entries: Vec<(FatObject, bool)>,
}

impl FlatModel {
    pub fn new(class: ShapeClass) -> Self {
        FlatModel {
            class,
            entries: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn insert(&mut self, o: FatObject) -> Result<()> {
        if !self.class.accepts(&o) {
            return Err(Error::ShapeClassMismatch {
                id: o.id(),
                class: self.class.to_string(),
            });
        }
        if self.entries.iter().any(|(e, _)| e.id() == o.id()) {
            return Err(Error::DuplicateId(o.id()));
        }
        self.entries.push((o, false));
        Ok(())
    }

    pub fn delete(&mut self, id: u64) -> Result<()> {
        let at = self
            .entries
            .iter()
            .position(|(e, _)| e.id() == id)
            .ok_or(Error::UnknownId(id))?;
        self.entries.remove(at);
        Ok(())
    }

    pub fn unmark_all(&mut self) {
        for e in &mut self.entries {
            e.1 = false;
        }
    }

    pub fn mark_intersecting(&mut self, q: &FatObject) {
        for (o, marked) in &mut self.entries {
            if o.intersects_unchecked(q) {
                *marked = true;
            }
        }
    }

    pub fn smallest_unmarked(&self) -> Option<FatObject> {
        self.entries
            .iter()
            .filter(|(_, marked)| !marked)
            .map(|(o, _)| o)
            .min_by(|a, b| object_order(a, b))
            .copied()
    }
}

/// Random object of the class with center in the unit box and size
/// log-uniform in [1e-3, 1e-1].
pub fn random_object(rng: &mut StdRng, class: ShapeClass, id: u64) -> FatObject {
    let d = class.dimension();
    let size = 10f64.powf(rng.random_range(-3.0..=-1.0));
    let mut center = [0.0; 4];
    for c in center.iter_mut().take(d) {
        *c = rng.random_range(0.0..1.0);
    }
    match class {
        ShapeClass::Squares | ShapeClass::Hypercubes(_) => {
            let lo: Vec<f64> = center[..d].iter().map(|c| c - size / 2.0).collect();
            let hi: Vec<f64> = center[..d].iter().map(|c| c + size / 2.0).collect();
            FatObject::rect(id, &lo, &hi).unwrap()
        }
        ShapeClass::Disks => FatObject::ball(id, &center[..d], size / 2.0).unwrap(),
    }
}

/// Random internally disjoint set built by greedy rejection, ids starting at
/// `first_id`. May return fewer than `target` objects if space runs out.
pub fn random_disjoint_set(
    rng: &mut StdRng,
    class: ShapeClass,
    target: usize,
    first_id: u64,
) -> Vec<FatObject> {
    let mut out: Vec<FatObject> = Vec::new();
    let mut attempts = 0;
    while out.len() < target && attempts < 50 * target {
        attempts += 1;
        let candidate = random_object(rng, class, first_id + out.len() as u64);
        if out.iter().all(|o| !o.intersects_unchecked(&candidate)) {
            out.push(candidate);
        }
    }
    out
}

/// Assert that a set of objects is pairwise disjoint.
pub fn assert_independent(objects: &[FatObject]) {
    for (i, a) in objects.iter().enumerate() {
        for b in &objects[i + 1..] {
            assert!(
                !a.intersects_unchecked(b),
                "objects {} and {} intersect",
                a.id(),
                b.id()
            );
        }
    }
}
