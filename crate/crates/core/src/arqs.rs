//! Dynamic tree over lifted objects answering "mark everything intersecting
//! x" and "smallest unmarked object" queries.
//!
//! Each object is lifted to a point in `2d` dimensions (box corners
//! concatenated; balls contribute their bounding box) and stored in a kd-tree
//! with one object per node:
//!
//! - rect intersection becomes one orthogonal range predicate in lift space,
//!   so a range traversal visits exactly the intersecting candidates;
//! - marks propagate lazily through `MarkAll`/`UnmarkAll` markers pushed to
//!   children whenever a node is touched, which makes `unmark_all` O(1);
//! - every node carries the object-order minimum of its unmarked live
//!   descendants, so the smallest unmarked object is read off the root.
//!
//! Balance is kept by partial rebuilding: an insert rebuilds the deepest
//! subtree on its path whose child outweighs the `ALPHA` fraction, a delete
//! tombstones its node and rebuilds any subtree on the path that becomes more
//! than half tombstones. Disks get the same traversal over bounding boxes
//! plus an exact disk-disk test per candidate node.
//!
//! `work_counter` counts node visits (including rebuild collection and
//! construction) and is deterministic for a given operation sequence.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{FatObject, OrderKey, Shape, ShapeClass, MAX_DIM};

const ALPHA: f64 = 0.7;
const MAX_LIFT: usize = 2 * MAX_DIM;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pending {
    MarkAll,
    UnmarkAll,
}

#[derive(Clone, Copy)]
struct MinEntry {
    key: OrderKey,
    object: FatObject,
}

fn smaller(a: Option<MinEntry>, b: Option<MinEntry>) -> Option<MinEntry> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if x.key <= y.key { x } else { y }),
        (x, None) => x,
        (None, y) => y,
    }
}

struct Node {
    object: FatObject,
    key: [f64; MAX_LIFT],
    axis: u8,
    deleted: bool,
    marked: bool,
    pending: Option<Pending>,
    /// Nodes in this subtree, tombstones included.
    count: usize,
    tombstones: usize,
    /// Bounds of all subtree keys, tombstones included.
    bbox_lo: [f64; MAX_LIFT],
    bbox_hi: [f64; MAX_LIFT],
    /// Object-order minima over live subtree objects. `min_unmarked` already
    /// accounts for this node's own pending marker.
    min_any: Option<MinEntry>,
    min_unmarked: Option<MinEntry>,
    left: Option<Box<Node>>,
    right: Option<Box<Node>>,
}

struct Item {
    object: FatObject,
    key: [f64; MAX_LIFT],
    marked: bool,
}

/// Lift to the kd-tree key: box corners concatenated, balls by bounding box.
fn lift(object: &FatObject, d: usize) -> [f64; MAX_LIFT] {
    let mut key = [0.0; MAX_LIFT];
    match object.shape() {
        Shape::Rect { lo, hi } => {
            key[..d].copy_from_slice(lo.coords());
            key[d..2 * d].copy_from_slice(hi.coords());
        }
        Shape::Ball { center, radius } => {
            for k in 0..d {
                key[k] = center.coords()[k] - radius;
                key[d + k] = center.coords()[k] + radius;
            }
        }
    }
    key
}

/// Strict total order on (key, id) pairs, primary-sorted by the coordinate at
/// `axis` and falling through the remaining axes cyclically. Distinct stored
/// nodes never compare equal, so descents are unambiguous even with
/// duplicate coordinates.
fn node_cmp(
    a_key: &[f64; MAX_LIFT],
    a_id: u64,
    b_key: &[f64; MAX_LIFT],
    b_id: u64,
    axis: usize,
    dims: usize,
) -> Ordering {
    for i in 0..dims {
        let k = (axis + i) % dims;
        let ord = a_key[k].total_cmp(&b_key[k]);
        if ord != Ordering::Equal {
            return ord;
        }
    }
    a_id.cmp(&b_id)
}

fn apply_pending(node: &mut Node, p: Pending) {
    node.pending = Some(p);
    node.min_unmarked = match p {
        Pending::MarkAll => None,
        Pending::UnmarkAll => node.min_any,
    };
}

fn pushdown(node: &mut Node) {
    if let Some(p) = node.pending.take() {
        node.marked = p == Pending::MarkAll;
        if let Some(c) = node.left.as_deref_mut() {
            apply_pending(c, p);
        }
        if let Some(c) = node.right.as_deref_mut() {
            apply_pending(c, p);
        }
    }
}

/// Recompute aggregates from children. The node's own pending marker must
/// already be pushed down.
fn pull_up(node: &mut Node) {
    debug_assert!(node.pending.is_none());
    let own = (!node.deleted).then(|| MinEntry {
        key: node.object.order_key(),
        object: node.object,
    });
    let mut count = 1;
    let mut tombstones = usize::from(node.deleted);
    let mut bbox_lo = node.key;
    let mut bbox_hi = node.key;
    let mut min_any = own;
    let mut min_unmarked = if node.marked { None } else { own };
    for child in [node.left.as_deref(), node.right.as_deref()]
        .into_iter()
        .flatten()
    {
        count += child.count;
        tombstones += child.tombstones;
        for k in 0..MAX_LIFT {
            bbox_lo[k] = bbox_lo[k].min(child.bbox_lo[k]);
            bbox_hi[k] = bbox_hi[k].max(child.bbox_hi[k]);
        }
        min_any = smaller(min_any, child.min_any);
        min_unmarked = smaller(min_unmarked, child.min_unmarked);
    }
    node.count = count;
    node.tombstones = tombstones;
    node.bbox_lo = bbox_lo;
    node.bbox_hi = bbox_hi;
    node.min_any = min_any;
    node.min_unmarked = min_unmarked;
}

fn new_leaf(object: FatObject, key: [f64; MAX_LIFT], axis: usize) -> Box<Node> {
    let entry = MinEntry {
        key: object.order_key(),
        object,
    };
    Box::new(Node {
        object,
        key,
        axis: axis as u8,
        deleted: false,
        marked: false,
        pending: None,
        count: 1,
        tombstones: 0,
        bbox_lo: key,
        bbox_hi: key,
        min_any: Some(entry),
        min_unmarked: Some(entry),
        left: None,
        right: None,
    })
}

fn unbalanced(node: &Node) -> bool {
    let limit = ALPHA * node.count as f64;
    [node.left.as_deref(), node.right.as_deref()]
        .into_iter()
        .flatten()
        .any(|c| c.count as f64 > limit)
}

fn collect(node: Box<Node>, out: &mut Vec<Item>, work: &mut u64) {
    *work += 1;
    let mut node = node;
    pushdown(&mut node);
    let Node {
        object,
        key,
        deleted,
        marked,
        left,
        right,
        ..
    } = *node;
    if !deleted {
        out.push(Item {
            object,
            key,
            marked,
        });
    }
    if let Some(l) = left {
        collect(l, out, work);
    }
    if let Some(r) = right {
        collect(r, out, work);
    }
}

fn build(items: &mut [Item], axis: usize, dims: usize, work: &mut u64) -> Option<Box<Node>> {
    if items.is_empty() {
        return None;
    }
    *work += 1;
    let mid = items.len() / 2;
    items.select_nth_unstable_by(mid, |a, b| {
        node_cmp(&a.key, a.object.id(), &b.key, b.object.id(), axis, dims)
    });
    let (left_items, rest) = items.split_at_mut(mid);
    let (mid_item, right_items) = rest.split_first_mut().unwrap();
    let child_axis = (axis + 1) % dims;
    let mut node = new_leaf(mid_item.object, mid_item.key, axis);
    node.marked = mid_item.marked;
    node.left = build(left_items, child_axis, dims, work);
    node.right = build(right_items, child_axis, dims, work);
    pull_up(&mut node);
    Some(node)
}

fn rebuild_slot(slot: &mut Option<Box<Node>>, dims: usize, work: &mut u64) {
    let Some(old) = slot.take() else { return };
    let axis = old.axis as usize;
    let mut items = Vec::with_capacity(old.count - old.tombstones);
    collect(old, &mut items, work);
    *slot = build(&mut items, axis, dims, work);
}

fn insert_rec(
    slot: &mut Option<Box<Node>>,
    object: FatObject,
    key: [f64; MAX_LIFT],
    axis: usize,
    dims: usize,
    work: &mut u64,
) -> bool {
    let Some(node) = slot else {
        *work += 1;
        *slot = Some(new_leaf(object, key, axis));
        return false;
    };
    *work += 1;
    pushdown(node);
    match node_cmp(
        &key,
        object.id(),
        &node.key,
        node.object.id(),
        node.axis as usize,
        dims,
    ) {
        Ordering::Equal => {
            // Same key and id: revive the tombstone left by an earlier delete.
            debug_assert!(node.deleted);
            node.deleted = false;
            node.marked = false;
            node.object = object;
            pull_up(node);
            false
        }
        ord => {
            let child_axis = (node.axis as usize + 1) % dims;
            let child = if ord == Ordering::Less {
                &mut node.left
            } else {
                &mut node.right
            };
            let rebuilt = insert_rec(child, object, key, child_axis, dims, work);
            pull_up(node);
            if !rebuilt && unbalanced(node) {
                rebuild_slot(slot, dims, work);
                return true;
            }
            rebuilt
        }
    }
}

fn delete_rec(
    slot: &mut Option<Box<Node>>,
    key: &[f64; MAX_LIFT],
    id: u64,
    dims: usize,
    work: &mut u64,
) {
    {
        let node = slot
            .as_deref_mut()
            .expect("delete target tracked in the id map must be in the tree");
        *work += 1;
        pushdown(node);
        match node_cmp(key, id, &node.key, node.object.id(), node.axis as usize, dims) {
            Ordering::Equal => {
                debug_assert!(!node.deleted);
                node.deleted = true;
                node.marked = false;
                pull_up(node);
            }
            ord => {
                let child = if ord == Ordering::Less {
                    &mut node.left
                } else {
                    &mut node.right
                };
                delete_rec(child, key, id, dims, work);
                pull_up(node);
            }
        }
    }
    let node = slot.as_deref().unwrap();
    if node.tombstones * 2 > node.count {
        rebuild_slot(slot, dims, work);
    }
}

/// Orthogonal query region in lift space; only the first `dims` axes are
/// constrained, the rest stay at plus/minus infinity.
struct Region {
    lo: [f64; MAX_LIFT],
    hi: [f64; MAX_LIFT],
    dims: usize,
}

impl Region {
    /// Stored object intersects `q` (or has an intersecting bounding box, for
    /// balls) exactly when its lift point lands in this region: low corners
    /// capped by the query's high corner and vice versa.
    fn intersecting(q: &FatObject, d: usize) -> Region {
        let (qlo, qhi) = bbox_of(q, d);
        let mut lo = [f64::NEG_INFINITY; MAX_LIFT];
        let mut hi = [f64::INFINITY; MAX_LIFT];
        hi[..d].copy_from_slice(&qhi[..d]);
        lo[d..2 * d].copy_from_slice(&qlo[..d]);
        Region { lo, hi, dims: 2 * d }
    }

    fn disjoint_from(&self, bbox_lo: &[f64; MAX_LIFT], bbox_hi: &[f64; MAX_LIFT]) -> bool {
        (0..self.dims).any(|k| bbox_lo[k] > self.hi[k] || bbox_hi[k] < self.lo[k])
    }

    fn covers(&self, bbox_lo: &[f64; MAX_LIFT], bbox_hi: &[f64; MAX_LIFT]) -> bool {
        (0..self.dims).all(|k| self.lo[k] <= bbox_lo[k] && bbox_hi[k] <= self.hi[k])
    }
}

fn bbox_of(o: &FatObject, d: usize) -> ([f64; MAX_DIM], [f64; MAX_DIM]) {
    let mut lo = [0.0; MAX_DIM];
    let mut hi = [0.0; MAX_DIM];
    match o.shape() {
        Shape::Rect { lo: l, hi: h } => {
            lo[..d].copy_from_slice(l.coords());
            hi[..d].copy_from_slice(h.coords());
        }
        Shape::Ball { center, radius } => {
            for k in 0..d {
                lo[k] = center.coords()[k] - radius;
                hi[k] = center.coords()[k] + radius;
            }
        }
    }
    (lo, hi)
}

fn mark_rec(
    slot: &mut Option<Box<Node>>,
    q: &FatObject,
    region: &Region,
    exact_only: bool,
    work: &mut u64,
) {
    let Some(node) = slot.as_deref_mut() else {
        return;
    };
    *work += 1;
    if region.disjoint_from(&node.bbox_lo, &node.bbox_hi) {
        return;
    }
    if !exact_only && region.covers(&node.bbox_lo, &node.bbox_hi) {
        apply_pending(node, Pending::MarkAll);
        return;
    }
    pushdown(node);
    if !node.deleted && node.object.intersects_unchecked(q) {
        node.marked = true;
    }
    mark_rec(&mut node.left, q, region, exact_only, work);
    mark_rec(&mut node.right, q, region, exact_only, work);
    pull_up(node);
}

/// Dynamic marking structure over one shape class.
pub struct Arqs {
    class: ShapeClass,
    dims: usize,
    root: Option<Box<Node>>,
    objects: HashMap<u64, FatObject>,
    work: u64,
}

impl Arqs {
    pub fn new(class: ShapeClass) -> Result<Self> {
        class.validate()?;
        Ok(Arqs {
            class,
            dims: 2 * class.dimension(),
            root: None,
            objects: HashMap::new(),
            work: 0,
        })
    }

    pub fn shape_class(&self) -> ShapeClass {
        self.class
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn get(&self, id: u64) -> Option<&FatObject> {
        self.objects.get(&id)
    }

    /// Node visits performed so far, rebuilds included. Deterministic for a
    /// given operation sequence.
    pub fn work_counter(&self) -> u64 {
        self.work
    }

    pub fn insert(&mut self, object: FatObject) -> Result<()> {
        self.class.check(&object)?;
        if self.objects.contains_key(&object.id()) {
            return Err(Error::DuplicateId(object.id()));
        }
        let key = lift(&object, self.class.dimension());
        insert_rec(&mut self.root, object, key, 0, self.dims, &mut self.work);
        self.objects.insert(object.id(), object);
        Ok(())
    }

    pub fn delete(&mut self, id: u64) -> Result<()> {
        let object = self.objects.remove(&id).ok_or(Error::UnknownId(id))?;
        let key = lift(&object, self.class.dimension());
        delete_rec(&mut self.root, &key, id, self.dims, &mut self.work);
        Ok(())
    }

    /// Clear every mark. Constant time: one marker at the root.
    pub fn unmark_all(&mut self) {
        if let Some(root) = self.root.as_deref_mut() {
            self.work += 1;
            apply_pending(root, Pending::UnmarkAll);
        }
    }

    /// Mark every stored object intersecting `q`. For box classes the range
    /// predicate is exact and fully covered subtrees take a single marker;
    /// disks additionally pass an exact disk-disk test per candidate node.
    pub fn mark_intersecting(&mut self, q: &FatObject) -> Result<()> {
        self.class.check(q)?;
        let region = Region::intersecting(q, self.class.dimension());
        let exact_only = matches!(self.class, ShapeClass::Disks);
        mark_rec(&mut self.root, q, &region, exact_only, &mut self.work);
        Ok(())
    }

    /// The object-order minimum among unmarked stored objects.
    pub fn smallest_unmarked(&mut self) -> Option<FatObject> {
        self.work += 1;
        self.root
            .as_deref()
            .and_then(|r| r.min_unmarked)
            .map(|e| e.object)
    }

    pub fn height(&self) -> usize {
        fn rec(node: Option<&Node>) -> usize {
            node.map_or(0, |n| 1 + rec(n.left.as_deref()).max(rec(n.right.as_deref())))
        }
        rec(self.root.as_deref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn square(id: u64, x: f64, y: f64, side: f64) -> FatObject {
        FatObject::rect(id, &[x, y], &[x + side, y + side]).unwrap()
    }

    fn random_square(rng: &mut StdRng, id: u64) -> FatObject {
        let x: f64 = rng.random_range(0.0..1.0);
        let y: f64 = rng.random_range(0.0..1.0);
        let side: f64 = rng.random_range(0.001..0.1);
        square(id, x, y, side)
    }

    #[test]
    fn insert_delete_round_trip() {
        let mut t = Arqs::new(ShapeClass::Squares).unwrap();
        assert!(t.is_empty());
        t.insert(square(1, 0.0, 0.0, 1.0)).unwrap();
        t.insert(square(2, 2.0, 0.0, 1.0)).unwrap();
        assert_eq!(t.len(), 2);
        assert!(matches!(
            t.insert(square(1, 5.0, 5.0, 1.0)),
            Err(Error::DuplicateId(1))
        ));
        t.delete(1).unwrap();
        assert_eq!(t.len(), 1);
        assert!(matches!(t.delete(1), Err(Error::UnknownId(1))));
        t.delete(2).unwrap();
        assert!(t.is_empty());
        assert!(t.smallest_unmarked().is_none());
    }

    #[test]
    fn reinsert_after_delete_revives_cleanly() {
        let mut t = Arqs::new(ShapeClass::Squares).unwrap();
        let s = square(7, 0.25, 0.25, 0.5);
        t.insert(s).unwrap();
        t.mark_intersecting(&s).unwrap();
        assert!(t.smallest_unmarked().is_none());
        t.delete(7).unwrap();
        t.insert(s).unwrap();
        assert_eq!(t.len(), 1);
        // The revived object starts unmarked.
        assert_eq!(t.smallest_unmarked().map(|o| o.id()), Some(7));
    }

    #[test]
    fn greedy_loop_primitives() {
        let mut t = Arqs::new(ShapeClass::Squares).unwrap();
        let small = square(1, 0.0, 0.0, 1.0);
        let overlapping = square(2, 0.5, 0.5, 2.0);
        let far = square(3, 10.0, 10.0, 3.0);
        for o in [small, overlapping, far] {
            t.insert(o).unwrap();
        }
        t.unmark_all();
        assert_eq!(t.smallest_unmarked().map(|o| o.id()), Some(1));
        t.mark_intersecting(&small).unwrap();
        assert_eq!(t.smallest_unmarked().map(|o| o.id()), Some(3));
        t.mark_intersecting(&far).unwrap();
        assert!(t.smallest_unmarked().is_none());
        t.unmark_all();
        assert_eq!(t.smallest_unmarked().map(|o| o.id()), Some(1));
    }

    #[test]
    fn disk_marking_requires_actual_intersection() {
        let mut t = Arqs::new(ShapeClass::Disks).unwrap();
        let center = FatObject::ball(1, &[0.0, 0.0], 1.0).unwrap();
        // Bounding boxes overlap at the corner, disks stay apart.
        let corner = FatObject::ball(2, &[1.9, 1.9], 1.0).unwrap();
        let touching = FatObject::ball(3, &[2.0, 0.0], 1.0).unwrap();
        for o in [center, corner, touching] {
            t.insert(o).unwrap();
        }
        t.unmark_all();
        t.mark_intersecting(&center).unwrap();
        assert_eq!(t.smallest_unmarked().map(|o| o.id()), Some(2));
    }

    #[test]
    fn height_stays_logarithmic_under_random_inserts() {
        let mut rng = StdRng::seed_from_u64(42);
        let mut t = Arqs::new(ShapeClass::Squares).unwrap();
        let n = 100u64;
        for id in 0..n {
            t.insert(random_square(&mut rng, id)).unwrap();
        }
        let bound = ((n as f64).ln() / (1.0 / ALPHA).ln()).ceil() as usize + 2;
        assert!(
            t.height() <= bound,
            "height {} exceeds balance bound {}",
            t.height(),
            bound
        );
    }

    #[test]
    fn tombstones_are_purged() {
        let mut rng = StdRng::seed_from_u64(7);
        let mut t = Arqs::new(ShapeClass::Squares).unwrap();
        for id in 0..64 {
            t.insert(random_square(&mut rng, id)).unwrap();
        }
        for id in 0..64 {
            t.delete(id).unwrap();
        }
        assert!(t.is_empty());
        assert!(t.root.is_none());
    }

    #[test]
    fn work_counter_is_deterministic() {
        let run = || {
            let mut rng = StdRng::seed_from_u64(3);
            let mut t = Arqs::new(ShapeClass::Squares).unwrap();
            for id in 0..200 {
                t.insert(random_square(&mut rng, id)).unwrap();
            }
            for id in (0..200).step_by(3) {
                t.delete(id).unwrap();
            }
            t.unmark_all();
            let probe = square(999, 0.4, 0.4, 0.2);
            t.mark_intersecting(&probe).unwrap();
            let _ = t.smallest_unmarked();
            t.work_counter()
        };
        let a = run();
        assert!(a > 0);
        assert_eq!(a, run());
    }

    #[test]
    fn rejects_foreign_shapes() {
        let mut t = Arqs::new(ShapeClass::Squares).unwrap();
        let disk = FatObject::ball(1, &[0.0, 0.0], 1.0).unwrap();
        assert!(t.insert(disk).is_err());
        let cube3 = FatObject::rect(2, &[0.0; 3], &[1.0; 3]).unwrap();
        assert!(t.insert(cube3).is_err());
        t.insert(square(3, 0.0, 0.0, 1.0)).unwrap();
        assert!(t.mark_intersecting(&disk).is_err());
    }

    #[test]
    fn four_dimensional_hypercubes_work() {
        let mut t = Arqs::new(ShapeClass::Hypercubes(4)).unwrap();
        let a = FatObject::rect(1, &[0.0; 4], &[1.0; 4]).unwrap();
        let b = FatObject::rect(2, &[0.5; 4], &[1.5; 4]).unwrap();
        let c = FatObject::rect(3, &[3.0; 4], &[4.0; 4]).unwrap();
        for o in [a, b, c] {
            t.insert(o).unwrap();
        }
        t.unmark_all();
        t.mark_intersecting(&a).unwrap();
        assert_eq!(t.smallest_unmarked().map(|o| o.id()), Some(3));
    }
}
