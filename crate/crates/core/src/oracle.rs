//! Reference solvers: an exact maximum-independent-set solver for small
//! instances, the greedy scan in object order, and exact optimum
//! trajectories along update sequences. These are the ground truth the
//! dynamic structures are audited against; none of them are fast.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::geometry::{object_order, FatObject, ShapeClass};
use crate::update::Update;

/// Largest instance [`exact_mis`] accepts. Branch and bound beyond this is
/// not reliably fast enough for test suites.
pub const EXACT_MIS_MAX: usize = 40;

/// A static set of objects from one shape class.
#[derive(Clone, Debug)]
pub struct Instance {
    shape_class: ShapeClass,
    objects: Vec<FatObject>,
}

impl Instance {
    pub fn new(shape_class: ShapeClass, objects: Vec<FatObject>) -> Result<Self> {
        shape_class.validate()?;
        for o in &objects {
            shape_class.check(o)?;
        }
        let mut seen = BTreeSet::new();
        for o in &objects {
            if !seen.insert(o.id()) {
                return Err(Error::DuplicateId(o.id()));
            }
        }
        Ok(Instance {
            shape_class,
            objects,
        })
    }

    pub fn shape_class(&self) -> ShapeClass {
        self.shape_class
    }

    pub fn dimension(&self) -> usize {
        self.shape_class.dimension()
    }

    pub fn objects(&self) -> &[FatObject] {
        &self.objects
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }
}

/// Exact maximum independent set size plus one witness, by branch and bound
/// on the intersection graph. Branches on a maximum-degree vertex and prunes
/// with a greedy clique-cover upper bound. Errors on instances larger than
/// [`EXACT_MIS_MAX`].
pub fn exact_mis(instance: &Instance) -> Result<(usize, BTreeSet<u64>)> {
    let n = instance.len();
    if n > EXACT_MIS_MAX {
        return Err(Error::TooLargeForExact {
            len: n,
            max: EXACT_MIS_MAX,
        });
    }
    if n == 0 {
        return Ok((0, BTreeSet::new()));
    }

    let objects = instance.objects();
    let mut adj = vec![0u64; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if objects[i].intersects_unchecked(&objects[j]) {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
    }

    let all: u64 = if n == 64 { !0 } else { (1 << n) - 1 };
    let mut best = Best { size: 0, set: 0 };
    branch(all, 0, 0, &adj, &mut best);

    let ids = (0..n)
        .filter(|i| best.set & (1 << i) != 0)
        .map(|i| objects[i].id())
        .collect();
    Ok((best.size, ids))
}

struct Best {
    size: usize,
    set: u64,
}

fn branch(mut avail: u64, mut cur_size: usize, mut cur_set: u64, adj: &[u64], best: &mut Best) {
    // Take isolated vertices outright; they are in some maximum solution.
    loop {
        let mut progress = false;
        let mut rest = avail;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if adj[v] & avail == 0 {
                avail &= !(1 << v);
                cur_set |= 1 << v;
                cur_size += 1;
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }

    if avail == 0 {
        if cur_size > best.size {
            *best = Best {
                size: cur_size,
                set: cur_set,
            };
        }
        return;
    }
    if cur_size + clique_cover_bound(avail, adj) <= best.size {
        return;
    }

    let mut v = usize::MAX;
    let mut max_deg = 0;
    let mut rest = avail;
    while rest != 0 {
        let u = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let deg = (adj[u] & avail).count_ones();
        if v == usize::MAX || deg > max_deg {
            v = u;
            max_deg = deg;
        }
    }

    branch(
        avail & !(adj[v] | (1 << v)),
        cur_size + 1,
        cur_set | (1 << v),
        adj,
        best,
    );
    branch(avail & !(1 << v), cur_size, cur_set, adj, best);
}

/// Number of cliques in a greedy clique partition of the available vertices;
/// an upper bound on the independent set inside them.
fn clique_cover_bound(avail: u64, adj: &[u64]) -> usize {
    let mut cliques: Vec<(u64, u64)> = Vec::new(); // (members, common neighborhood)
    let mut rest = avail;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let bit = 1u64 << v;
        match cliques.iter_mut().find(|(_, common)| common & bit != 0) {
            Some((members, common)) => {
                *members |= bit;
                *common &= adj[v];
            }
            None => cliques.push((bit, adj[v])),
        }
    }
    cliques.len()
}

/// Greedy independent set: scan objects in object order, keep each object
/// disjoint from everything kept so far. Returns kept ids in scan order.
/// This is the `1/f`-approximation every dynamic structure reproduces.
pub fn offline_greedy(instance: &Instance) -> Vec<u64> {
    let mut sorted: Vec<&FatObject> = instance.objects().iter().collect();
    sorted.sort_by(|a, b| object_order(a, b));
    let mut chosen: Vec<&FatObject> = Vec::new();
    for o in sorted {
        if chosen.iter().all(|c| !c.intersects_unchecked(o)) {
            chosen.push(o);
        }
    }
    chosen.iter().map(|o| o.id()).collect()
}

/// Exact optimum after every prefix of an update sequence. Errors if any
/// prefix exceeds [`EXACT_MIS_MAX`] objects or is malformed (duplicate
/// insert, delete of an absent id).
pub fn opt_trajectory(shape_class: ShapeClass, updates: &[Update]) -> Result<Vec<usize>> {
    let mut live: Vec<FatObject> = Vec::new();
    let mut traj = Vec::with_capacity(updates.len());
    for u in updates {
        match u {
            Update::Insert { object } => {
                if live.iter().any(|o| o.id() == object.id()) {
                    return Err(Error::DuplicateId(object.id()));
                }
                live.push(*object);
            }
            Update::Delete { id } => {
                let at = live
                    .iter()
                    .position(|o| o.id() == *id)
                    .ok_or(Error::UnknownId(*id))?;
                live.remove(at);
            }
        }
        let instance = Instance::new(shape_class, live.clone())?;
        traj.push(exact_mis(&instance)?.0);
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(id: u64, x: f64, y: f64, side: f64) -> FatObject {
        FatObject::rect(id, &[x, y], &[x + side, y + side]).unwrap()
    }

    fn squares_instance(objects: Vec<FatObject>) -> Instance {
        Instance::new(ShapeClass::Squares, objects).unwrap()
    }

    /// 3x3 grid of 2x2 squares at spacing 1.5: all king-move neighbors
    /// overlap, so the optimum is the four corners.
    fn overlapping_grid() -> Instance {
        let mut objects = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                objects.push(square((3 * i + j) as u64, 1.5 * i as f64, 1.5 * j as f64, 2.0));
            }
        }
        squares_instance(objects)
    }

    #[test]
    fn exact_mis_on_disjoint_squares_takes_all() {
        let objects = (0..5).map(|i| square(i, 3.0 * i as f64, 0.0, 1.0)).collect();
        let inst = squares_instance(objects);
        let (size, ids) = exact_mis(&inst).unwrap();
        assert_eq!(size, 5);
        assert_eq!(ids.len(), 5);
    }

    #[test]
    fn exact_mis_on_overlapping_grid() {
        let (size, ids) = exact_mis(&overlapping_grid()).unwrap();
        assert_eq!(size, 4);
        for &a in &ids {
            for &b in &ids {
                if a != b {
                    let oa = overlapping_grid().objects()[a as usize];
                    let ob = overlapping_grid().objects()[b as usize];
                    assert!(!oa.intersects_unchecked(&ob));
                }
            }
        }
    }

    #[test]
    fn exact_mis_rejects_large_instances() {
        let objects = (0..41).map(|i| square(i, 3.0 * i as f64, 0.0, 1.0)).collect();
        let inst = squares_instance(objects);
        assert!(matches!(
            exact_mis(&inst),
            Err(Error::TooLargeForExact { len: 41, max: 40 })
        ));
    }

    #[test]
    fn exact_mis_handles_empty_and_full_bitmask_sizes() {
        assert_eq!(exact_mis(&squares_instance(Vec::new())).unwrap().0, 0);
        // All 40 objects pairwise intersecting: one survivor.
        let objects = (0..40).map(|i| square(i, 0.001 * i as f64, 0.0, 1.0)).collect();
        assert_eq!(exact_mis(&squares_instance(objects)).unwrap().0, 1);
    }

    #[test]
    fn greedy_prefers_small_objects() {
        // One big square covering two small disjoint ones: greedy keeps the
        // small pair, which is also optimal here.
        let big = square(1, 0.0, 0.0, 4.0);
        let small_a = square(2, 0.5, 0.5, 1.0);
        let small_b = square(3, 2.5, 2.5, 1.0);
        let inst = squares_instance(vec![big, small_a, small_b]);
        assert_eq!(offline_greedy(&inst), vec![2, 3]);
    }

    #[test]
    fn greedy_output_is_independent_and_maximal() {
        let inst = overlapping_grid();
        let kept = offline_greedy(&inst);
        let by_id = |id: u64| *inst.objects().iter().find(|o| o.id() == id).unwrap();
        for &a in &kept {
            for &b in &kept {
                if a != b {
                    assert!(!by_id(a).intersects_unchecked(&by_id(b)));
                }
            }
        }
        // Maximality: everything not kept intersects something kept.
        for o in inst.objects() {
            if !kept.contains(&o.id()) {
                assert!(kept.iter().any(|&k| by_id(k).intersects_unchecked(o)));
            }
        }
    }

    #[test]
    fn greedy_meets_ceil_opt_over_f_on_grid() {
        let inst = overlapping_grid();
        let (opt, _) = exact_mis(&inst).unwrap();
        let greedy = offline_greedy(&inst).len();
        let f = inst.shape_class().fatness() as usize;
        assert!(greedy >= opt.div_ceil(f));
    }

    #[test]
    fn trajectory_steps_by_at_most_one() {
        let updates = vec![
            Update::insert(square(1, 0.0, 0.0, 1.0)),
            Update::insert(square(2, 3.0, 0.0, 1.0)),
            Update::insert(square(3, 0.5, 0.5, 1.0)),
            Update::delete(1),
            Update::delete(3),
        ];
        let traj = opt_trajectory(ShapeClass::Squares, &updates).unwrap();
        assert_eq!(traj, vec![1, 2, 2, 2, 1]);
        for w in traj.windows(2) {
            let diff = w[1] as i64 - w[0] as i64;
            assert!((-1..=1).contains(&diff));
        }
    }

    /// Interval example forcing a two-element change in any approximate
    /// maintenance scheme: [1,4], then [2,3], then delete [1,4].
    #[test]
    fn trajectory_on_nested_intervals() {
        let wide = FatObject::rect(1, &[1.0, 0.0], &[4.0, 1.0]).unwrap();
        let narrow = FatObject::rect(2, &[2.0, 0.0], &[3.0, 1.0]).unwrap();
        let updates = vec![
            Update::insert(wide),
            Update::insert(narrow),
            Update::delete(1),
        ];
        let traj = opt_trajectory(ShapeClass::Squares, &updates).unwrap();
        assert_eq!(traj, vec![1, 1, 1]);
    }

    #[test]
    fn trajectory_rejects_malformed_sequences() {
        let s = square(1, 0.0, 0.0, 1.0);
        assert!(matches!(
            opt_trajectory(ShapeClass::Squares, &[Update::insert(s), Update::insert(s)]),
            Err(Error::DuplicateId(1))
        ));
        assert!(matches!(
            opt_trajectory(ShapeClass::Squares, &[Update::delete(9)]),
            Err(Error::UnknownId(9))
        ));
    }

    #[test]
    fn instance_rejects_class_mismatches() {
        let disk = FatObject::ball(1, &[0.0, 0.0], 1.0).unwrap();
        assert!(Instance::new(ShapeClass::Squares, vec![disk]).is_err());
        let cube3 = FatObject::rect(1, &[0.0; 3], &[1.0; 3]).unwrap();
        assert!(Instance::new(ShapeClass::Squares, vec![cube3]).is_err());
        assert!(Instance::new(ShapeClass::Hypercubes(3), vec![cube3]).is_ok());
    }
}
