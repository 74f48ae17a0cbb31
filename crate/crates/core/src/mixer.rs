//! Separator-driven incremental transformation between independent sets.
//!
//! [`find_separator`] picks a hypercube that splits two overlaid independent
//! sets so that neither side keeps too large a fraction of the first set and
//! few objects cross the boundary. [`MixState`] walks the induced recursion
//! lazily and emits exactly one add or remove per [`advance`](MixState::advance),
//! keeping the live set independent after every step.

use std::collections::HashSet;
use std::io::Write;

use crate::error::{Error, Result};
use crate::geometry::{CubeRelation, EnclosingCube, FatObject, Point};

/// Partition of two independent sets relative to a separator cube.
#[derive(Clone, Debug)]
pub struct SeparatorResult {
    pub cube: EnclosingCube,
    pub s1_in: Vec<u64>,
    pub s1_out: Vec<u64>,
    pub s1_on: Vec<u64>,
    pub s2_in: Vec<u64>,
    pub s2_out: Vec<u64>,
    pub s2_on: Vec<u64>,
}

/// Direction of a single mix step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MixOp {
    Add,
    Remove,
}

/// One emitted transition: apply `op` to `object`.
#[derive(Clone, Copy, Debug)]
pub struct MixStep {
    pub op: MixOp,
    pub object: FatObject,
}

/// Find a separator cube for `s1` overlaid with `s2`.
///
/// Inside and outside each retain at most a `(4^d - 1) / 4^d` fraction of
/// `s1`, and few objects cross the cube. `s2` may be empty; `s1` must not be.
pub fn find_separator(s1: &[FatObject], s2: &[FatObject]) -> Result<SeparatorResult> {
    let mut work = 0u64;
    find_separator_counted(s1, s2, &mut work)
}

pub(crate) fn find_separator_counted(
    s1: &[FatObject],
    s2: &[FatObject],
    work: &mut u64,
) -> Result<SeparatorResult> {
    let Some(first) = s1.first() else {
        return Err(Error::EmptySeparatorInput);
    };
    let d = first.dimension();
    let n1 = s1.len();

    let mut pts: Vec<[f64; 4]> = s1
        .iter()
        .map(|o| {
            let mut c = [0.0; 4];
            let cube = o.enclosing_cube();
            c[..d].copy_from_slice(cube.center.coords());
            c
        })
        .collect();
    *work += n1 as u64;

    // Shrink a box dimension by dimension: take three order statistics at
    // fixed fractions of the original |s1| and keep the thinner of the two
    // adjacent closed intervals.
    let mut lo = [0.0f64; 4];
    let mut hi = [0.0f64; 4];
    for k in 0..d {
        let len = pts.len();
        let frac = 4usize.pow(k as u32 + 1);
        let i3 = ((3 * n1) / frac).min(len - 1);
        let i2 = ((2 * n1) / frac).min(i3);
        let i1 = (n1 / frac).min(i2);
        let cmp = move |p: &[f64; 4], q: &[f64; 4]| p[k].total_cmp(&q[k]);
        pts.select_nth_unstable_by(i3, cmp);
        let z3 = pts[i3][k];
        pts[..=i3].select_nth_unstable_by(i2, cmp);
        let z2 = pts[i2][k];
        pts[..=i2].select_nth_unstable_by(i1, cmp);
        let z1 = pts[i1][k];
        let (a, b) = if z2 - z1 <= z3 - z2 {
            (z1, z2)
        } else {
            (z2, z3)
        };
        lo[k] = a;
        hi[k] = b;
        pts.retain(|p| p[k] >= a && p[k] <= b);
        debug_assert!(!pts.is_empty());
        *work += 2 * len as u64;
    }

    // Minimal cube around the box and the concentric double span the annulus
    // searched for the least-crossed candidate shell.
    let mut center = [0.0f64; 4];
    let mut r = 0.0f64;
    for k in 0..d {
        center[k] = 0.5 * (lo[k] + hi[k]);
        r = r.max(hi[k] - lo[k]);
    }
    let c = Point::new(&center[..d])?;

    let n_total = s1.len() + s2.len();
    let root = nth_root(n_total as f64, d);
    let m = ((0.5 * root.ceil()).floor() as usize).max(1);
    let y = r / root;

    // Small objects fit between adjacent shells, so each can cross at most
    // one; assign it by rounding its center distance and load-count shells.
    let mut loads = vec![0usize; m + 1];
    if y > 0.0 {
        for o in s1.iter().chain(s2) {
            let cube = o.enclosing_cube();
            if cube.size < y {
                let dist1: f64 = (0..d)
                    .map(|k| (cube.center.coords()[k] - center[k]).abs())
                    .sum();
                let t = ((dist1 - 0.5 * r) / y).round();
                if t >= 1.0 && t <= m as f64 {
                    loads[t as usize] += 1;
                }
            }
        }
    }
    *work += n_total as u64;
    let best = (1..=m).min_by_key(|&i| loads[i]).unwrap_or(1);
    let sep = EnclosingCube::new(c, r + 2.0 * best as f64 * y);

    let mut res = SeparatorResult {
        cube: sep,
        s1_in: Vec::new(),
        s1_out: Vec::new(),
        s1_on: Vec::new(),
        s2_in: Vec::new(),
        s2_out: Vec::new(),
        s2_on: Vec::new(),
    };
    for o in s1 {
        match o.classify_vs_cube(&sep) {
            CubeRelation::Inside => res.s1_in.push(o.id()),
            CubeRelation::Outside => res.s1_out.push(o.id()),
            CubeRelation::Crossing => res.s1_on.push(o.id()),
        }
    }
    for o in s2 {
        match o.classify_vs_cube(&sep) {
            CubeRelation::Inside => res.s2_in.push(o.id()),
            CubeRelation::Outside => res.s2_out.push(o.id()),
            CubeRelation::Crossing => res.s2_on.push(o.id()),
        }
    }
    *work += n_total as u64;
    Ok(res)
}

fn nth_root(x: f64, d: usize) -> f64 {
    let r = x.powf(1.0 / d as f64);
    let snapped = r.round();
    if (snapped.powi(d as i32) - x).abs() < 1e-9 * x.max(1.0) {
        snapped
    } else {
        r
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Phase {
    RemoveCross,
    RecurseA,
    RecurseB,
    AddCross,
}

struct Frame {
    s1: Vec<FatObject>,
    s2: Vec<FatObject>,
    expanded: bool,
    phase: Phase,
    cursor: usize,
    removals: Vec<FatObject>,
    additions: Vec<FatObject>,
    child_a: Option<(Vec<FatObject>, Vec<FatObject>)>,
    child_b: Option<(Vec<FatObject>, Vec<FatObject>)>,
}

impl Frame {
    fn pending(s1: Vec<FatObject>, s2: Vec<FatObject>) -> Self {
        Frame {
            s1,
            s2,
            expanded: false,
            phase: Phase::RemoveCross,
            cursor: 0,
            removals: Vec::new(),
            additions: Vec::new(),
            child_a: None,
            child_b: None,
        }
    }
}

/// Incremental schedule turning independent set `A` into independent set `B`
/// one object at a time: `|A| + |B|` steps in total, each removing an object
/// of `A` or adding an object of `B`.
pub struct MixState {
    stack: Vec<Frame>,
    current: HashSet<u64>,
    planned: usize,
    emitted: usize,
    work: u64,
}

impl MixState {
    /// Schedule from `a` to `b`. Does no separator work until the first
    /// [`advance`](Self::advance) touches a frame.
    pub fn new(a: &[FatObject], b: &[FatObject]) -> Self {
        MixState {
            current: a.iter().map(|o| o.id()).collect(),
            planned: a.len() + b.len(),
            stack: vec![Frame::pending(a.to_vec(), b.to_vec())],
            emitted: 0,
            work: 0,
        }
    }

    /// Total number of steps this schedule will emit.
    pub fn planned(&self) -> usize {
        self.planned
    }

    /// Steps emitted so far.
    pub fn emitted(&self) -> usize {
        self.emitted
    }

    /// Whether every step has been emitted.
    pub fn done(&self) -> bool {
        self.emitted == self.planned
    }

    /// Size of the live intermediate set.
    pub fn current_len(&self) -> usize {
        self.current.len()
    }

    /// Deterministic object-touch count across separator and bookkeeping
    /// work so far.
    pub fn work_counter(&self) -> u64 {
        self.work
    }

    /// Emit the next single add or remove.
    pub fn advance(&mut self) -> Result<MixStep> {
        loop {
            if self.stack.is_empty() {
                return Err(Error::MixExhausted);
            }
            if !self.stack.last().expect("nonempty").expanded {
                self.expand_top()?;
            }
            let top = self.stack.last_mut().expect("nonempty");
            match top.phase {
                Phase::RemoveCross => {
                    if let Some(o) = top.removals.get(top.cursor).copied() {
                        top.cursor += 1;
                        return Ok(self.emit(MixOp::Remove, o));
                    }
                    top.phase = Phase::RecurseA;
                    if let Some((s1, s2)) = top.child_a.take() {
                        self.stack.push(Frame::pending(s1, s2));
                    }
                }
                Phase::RecurseA => {
                    top.phase = Phase::RecurseB;
                    if let Some((s1, s2)) = top.child_b.take() {
                        self.stack.push(Frame::pending(s1, s2));
                    }
                }
                Phase::RecurseB => {
                    top.phase = Phase::AddCross;
                    top.cursor = 0;
                }
                Phase::AddCross => {
                    if let Some(o) = top.additions.get(top.cursor).copied() {
                        top.cursor += 1;
                        return Ok(self.emit(MixOp::Add, o));
                    }
                    self.stack.pop();
                }
            }
        }
    }

    /// Drain the rest of the schedule, writing one JSON line
    /// `{"step", "op", "id", "current"}` per advance.
    pub fn drain_schedule_jsonl<W: Write>(&mut self, mut out: W) -> Result<()> {
        while !self.done() {
            let step = self.emitted;
            let s = self.advance()?;
            let line = serde_json::json!({
                "step": step,
                "op": match s.op { MixOp::Add => "add", MixOp::Remove => "remove" },
                "id": s.object.id(),
                "current": self.current.len(),
            });
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    fn emit(&mut self, op: MixOp, object: FatObject) -> MixStep {
        match op {
            MixOp::Remove => {
                let was_present = self.current.remove(&object.id());
                debug_assert!(was_present);
            }
            MixOp::Add => {
                let was_absent = self.current.insert(object.id());
                debug_assert!(was_absent);
            }
        }
        self.emitted += 1;
        self.work += 1;
        MixStep { op, object }
    }

    fn expand_top(&mut self) -> Result<()> {
        let mut frame = self.stack.pop().expect("caller checked");
        let out = self.expand_frame(&mut frame);
        self.stack.push(frame);
        out
    }

    fn expand_frame(&mut self, f: &mut Frame) -> Result<()> {
        let total = f.s1.len() + f.s2.len();
        let d = f
            .s1
            .first()
            .or(f.s2.first())
            .map(|o| o.dimension())
            .unwrap_or(1);
        let small = total < 4usize.pow(d as u32);
        if small {
            // Only small frames are cheap enough to validate pairwise.
            validate_disjoint(&f.s1)?;
            validate_disjoint(&f.s2)?;
            self.work += (total * total) as u64;
        }
        if small || f.s1.is_empty() || f.s2.is_empty() {
            f.removals = std::mem::take(&mut f.s1);
            f.additions = std::mem::take(&mut f.s2);
            f.expanded = true;
            return Ok(());
        }

        let sep = find_separator_counted(&f.s1, &f.s2, &mut self.work)?;
        let in1: HashSet<u64> = sep.s1_in.iter().copied().collect();
        let on1: HashSet<u64> = sep.s1_on.iter().copied().collect();
        let in2: HashSet<u64> = sep.s2_in.iter().copied().collect();
        let on2: HashSet<u64> = sep.s2_on.iter().copied().collect();

        let mut s1_in = Vec::new();
        let mut s1_out = Vec::new();
        for o in f.s1.drain(..) {
            if on1.contains(&o.id()) {
                f.removals.push(o);
            } else if in1.contains(&o.id()) {
                s1_in.push(o);
            } else {
                s1_out.push(o);
            }
        }
        let mut s2_in = Vec::new();
        let mut s2_out = Vec::new();
        for o in f.s2.drain(..) {
            if on2.contains(&o.id()) {
                f.additions.push(o);
            } else if in2.contains(&o.id()) {
                s2_in.push(o);
            } else {
                s2_out.push(o);
            }
        }
        self.work += total as u64;

        // Mix first the side that leaves the larger intermediate union.
        let a_inside = sep.s1_in.len() + sep.s2_out.len() <= sep.s1_out.len() + sep.s2_in.len();
        let (a, b) = if a_inside {
            ((s1_in, s2_in), (s1_out, s2_out))
        } else {
            ((s1_out, s2_out), (s1_in, s2_in))
        };
        f.child_a = Some(a);
        f.child_b = Some(b);
        f.expanded = true;
        Ok(())
    }
}

fn validate_disjoint(objs: &[FatObject]) -> Result<()> {
    for (i, a) in objs.iter().enumerate() {
        for b in &objs[i + 1..] {
            if a.intersects_unchecked(b) {
                return Err(Error::MixNotDisjoint(a.id(), b.id()));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn sq(id: u64, x: f64, y: f64, s: f64) -> FatObject {
        FatObject::rect(id, &[x, y], &[x + s, y + s]).unwrap()
    }

    fn random_disjoint(rng: &mut StdRng, target: usize, first_id: u64) -> Vec<FatObject> {
        let mut out: Vec<FatObject> = Vec::new();
        let mut attempts = 0;
        while out.len() < target && attempts < 50 * target {
            attempts += 1;
            let size = 10f64.powf(rng.random_range(-3.0..-1.0));
            let x = rng.random_range(0.0..1.0 - size);
            let y = rng.random_range(0.0..1.0 - size);
            let cand = sq(first_id + out.len() as u64, x, y, size);
            if out.iter().all(|o| !o.intersects_unchecked(&cand)) {
                out.push(cand);
            }
        }
        out
    }

    fn hashtag(n: usize) -> (Vec<FatObject>, Vec<FatObject>) {
        let delta = 1.0 / (8.0 * n as f64);
        let horizontals = (0..n)
            .map(|i| {
                let y = (i as f64 + 0.5) / n as f64;
                FatObject::rect(i as u64, &[0.0, y - delta], &[1.0, y + delta]).unwrap()
            })
            .collect();
        let verticals = (0..n)
            .map(|j| {
                let x = (j as f64 + 0.5) / n as f64;
                FatObject::rect(1000 + j as u64, &[x - delta, 0.0], &[x + delta, 1.0]).unwrap()
            })
            .collect();
        (horizontals, verticals)
    }

    fn drain(state: &mut MixState) -> Vec<MixStep> {
        let mut steps = Vec::new();
        while !state.done() {
            steps.push(state.advance().unwrap());
        }
        steps
    }

    #[test]
    fn separator_requires_a_first_set() {
        let err = find_separator(&[], &[sq(0, 0.0, 0.0, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::EmptySeparatorInput));

        let res = find_separator(&[sq(0, 0.0, 0.0, 1.0)], &[]).unwrap();
        let parts = res.s1_in.len() + res.s1_out.len() + res.s1_on.len();
        assert_eq!(parts, 1);
    }

    #[test]
    fn separator_balances_a_sparse_grid() {
        let grid: Vec<FatObject> = (0..16)
            .map(|i| sq(i, 10.0 * (i % 4) as f64, 10.0 * (i / 4) as f64, 1.0))
            .collect();
        let res = find_separator(&grid, &[]).unwrap();
        let (i, o, x) = (res.s1_in.len(), res.s1_out.len(), res.s1_on.len());
        assert_eq!(i + o + x, 16);
        assert!(i <= 15, "inside kept {i} of 16");
        assert!(o <= 15, "outside kept {o} of 16");
    }

    #[test]
    fn separator_partition_matches_classification() {
        let mut rng = StdRng::seed_from_u64(23);
        let s1 = random_disjoint(&mut rng, 150, 0);
        let s2 = random_disjoint(&mut rng, 150, 10_000);
        let res = find_separator(&s1, &s2).unwrap();

        let n1 = s1.len();
        let n = (n1 + s2.len()) as f64;
        assert!(res.s1_in.len() as f64 <= 15.0 / 16.0 * n1 as f64);
        assert!(res.s1_out.len() as f64 <= 15.0 / 16.0 * n1 as f64);
        assert!((res.s1_on.len() + res.s2_on.len()) as f64 <= 130.0 * n.sqrt());

        for (objs, ins, outs, ons) in [
            (&s1, &res.s1_in, &res.s1_out, &res.s1_on),
            (&s2, &res.s2_in, &res.s2_out, &res.s2_on),
        ] {
            let ins: HashSet<u64> = ins.iter().copied().collect();
            let outs: HashSet<u64> = outs.iter().copied().collect();
            let ons: HashSet<u64> = ons.iter().copied().collect();
            assert_eq!(ins.len() + outs.len() + ons.len(), objs.len());
            for o in objs.iter() {
                let expect = match o.classify_vs_cube(&res.cube) {
                    CubeRelation::Inside => ins.contains(&o.id()),
                    CubeRelation::Outside => outs.contains(&o.id()),
                    CubeRelation::Crossing => ons.contains(&o.id()),
                };
                assert!(expect, "object {} in wrong bucket", o.id());
            }
        }
    }

    #[test]
    fn mix_base_cases() {
        let a = sq(1, 0.0, 0.0, 1.0);
        let b = sq(2, 0.5, 0.5, 1.0);

        let mut m = MixState::new(&[], &[b]);
        let s = m.advance().unwrap();
        assert!(matches!(s.op, MixOp::Add));
        assert!(m.done());

        let mut m = MixState::new(&[a], &[]);
        let s = m.advance().unwrap();
        assert!(matches!(s.op, MixOp::Remove));
        assert!(m.done());

        // a intersects b, so the only legal order is remove then add.
        let mut m = MixState::new(&[a], &[b]);
        let steps = drain(&mut m);
        assert!(matches!(steps[0].op, MixOp::Remove));
        assert_eq!(steps[0].object.id(), 1);
        assert!(matches!(steps[1].op, MixOp::Add));
        assert_eq!(steps[1].object.id(), 2);
        assert!(matches!(m.advance().unwrap_err(), Error::MixExhausted));
    }

    #[test]
    fn small_frames_drop_then_add_in_input_order() {
        let a = vec![sq(1, 0.0, 0.0, 1.0), sq(2, 5.0, 0.0, 1.0)];
        let b = vec![sq(3, 10.0, 0.0, 1.0), sq(4, 15.0, 0.0, 1.0)];
        let mut m = MixState::new(&a, &b);
        let ops: Vec<(bool, u64)> = drain(&mut m)
            .iter()
            .map(|s| (matches!(s.op, MixOp::Add), s.object.id()))
            .collect();
        assert_eq!(
            ops,
            vec![(false, 1), (false, 2), (true, 3), (true, 4)]
        );
    }

    #[test]
    fn lazy_validation_rejects_overlapping_input() {
        let a = vec![sq(1, 0.0, 0.0, 2.0), sq(2, 1.0, 1.0, 2.0)];
        let b = vec![sq(3, 10.0, 10.0, 1.0)];
        let mut m = MixState::new(&a, &b);
        assert!(matches!(
            m.advance().unwrap_err(),
            Error::MixNotDisjoint(1, 2)
        ));
    }

    #[test]
    fn mix_reaches_the_other_endpoint() {
        let mut rng = StdRng::seed_from_u64(7);
        let a = random_disjoint(&mut rng, 60, 0);
        let b = random_disjoint(&mut rng, 60, 10_000);
        let mut m = MixState::new(&a, &b);
        assert_eq!(m.planned(), a.len() + b.len());

        let mut live: Vec<FatObject> = a.clone();
        let mut min_size = live.len();
        while !m.done() {
            let s = m.advance().unwrap();
            match s.op {
                MixOp::Remove => {
                    let before = live.len();
                    live.retain(|o| o.id() != s.object.id());
                    assert_eq!(live.len() + 1, before);
                }
                MixOp::Add => {
                    for o in &live {
                        assert!(
                            !o.intersects_unchecked(&s.object),
                            "added {} against live {}",
                            s.object.id(),
                            o.id()
                        );
                    }
                    live.push(s.object);
                }
            }
            min_size = min_size.min(live.len());
            assert_eq!(live.len(), m.current_len());
        }

        let got: HashSet<u64> = live.iter().map(|o| o.id()).collect();
        let want: HashSet<u64> = b.iter().map(|o| o.id()).collect();
        assert_eq!(got, want);

        let gamma = (a.len() as f64).ln() / (16f64 / 15.0).ln()
            * ((a.len() + b.len()) as f64).sqrt();
        assert!(min_size as f64 >= a.len().min(b.len()) as f64 - gamma);
    }

    #[test]
    fn mix_handles_objects_shared_by_both_endpoints() {
        let mut rng = StdRng::seed_from_u64(40);
        let a = random_disjoint(&mut rng, 30, 0);
        let mut m = MixState::new(&a, &a);
        assert_eq!(m.planned(), 60);
        let steps = drain(&mut m);
        assert_eq!(steps.len(), 60);
        let final_ids: HashSet<u64> = a.iter().map(|o| o.id()).collect();
        let mut cur: HashSet<u64> = final_ids.clone();
        for s in &steps {
            match s.op {
                MixOp::Remove => assert!(cur.remove(&s.object.id())),
                MixOp::Add => assert!(cur.insert(s.object.id())),
            }
        }
        assert_eq!(cur, final_ids);
    }

    #[test]
    fn hashtag_mix_passes_through_the_empty_set() {
        let (h, v) = hashtag(10);
        for a in &h {
            for b in &v {
                assert!(a.intersects_unchecked(b));
            }
        }
        let mut m = MixState::new(&h, &v);
        let mut min_size = m.current_len();
        while !m.done() {
            m.advance().unwrap();
            min_size = min_size.min(m.current_len());
        }
        assert_eq!(min_size, 0);
        assert_eq!(m.current_len(), v.len());
    }

    #[test]
    fn intermediate_plateau_after_first_side() {
        let mut rng = StdRng::seed_from_u64(99);
        let a = random_disjoint(&mut rng, 100, 0);
        let b = random_disjoint(&mut rng, 100, 10_000);
        let sep = find_separator(&a, &b).unwrap();
        let a_inside = sep.s1_in.len() + sep.s2_out.len() <= sep.s1_out.len() + sep.s2_in.len();
        let side = if a_inside {
            sep.s1_in.len() + sep.s2_in.len()
        } else {
            sep.s1_out.len() + sep.s2_out.len()
        };
        let boundary = sep.s1_on.len() + side;

        let mut m = MixState::new(&a, &b);
        let mut at_boundary = m.current_len();
        while !m.done() {
            m.advance().unwrap();
            if m.emitted() == boundary {
                at_boundary = m.current_len();
            }
        }
        let floor =
            a.len().min(b.len()) as i64 - (sep.s1_on.len() + sep.s2_on.len()) as i64;
        assert!(at_boundary as i64 >= floor);
    }

    #[test]
    fn work_counter_is_deterministic() {
        let mut rng = StdRng::seed_from_u64(3);
        let a = random_disjoint(&mut rng, 80, 0);
        let b = random_disjoint(&mut rng, 80, 10_000);

        let mut first = MixState::new(&a, &b);
        assert_eq!(first.work_counter(), 0);
        drain(&mut first);
        assert!(first.work_counter() > 0);

        let mut second = MixState::new(&a, &b);
        let mut last = 0;
        while !second.done() {
            second.advance().unwrap();
            assert!(second.work_counter() >= last);
            last = second.work_counter();
        }
        assert_eq!(first.work_counter(), second.work_counter());
    }

    #[test]
    fn schedule_dump_is_one_line_per_step() {
        let (h, v) = hashtag(4);
        let mut m = MixState::new(&h, &v);
        let mut buf = Vec::new();
        m.drain_schedule_jsonl(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 8);
        let first: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
        assert_eq!(first["step"], 0);
        assert_eq!(first["op"], "remove");
    }

    #[test]
    fn drained_work_grows_near_linearly() {
        let grid = |n_side: usize, first_id: u64, offset: f64| -> Vec<FatObject> {
            (0..n_side * n_side)
                .map(|i| {
                    let x = 3.0 * (i % n_side) as f64 + offset;
                    let y = 3.0 * (i / n_side) as f64 + offset;
                    sq(first_id + i as u64, x, y, 1.0)
                })
                .collect()
        };
        let work_for = |n_side: usize| -> u64 {
            let a = grid(n_side, 0, 0.0);
            let b = grid(n_side, 100_000, 1.2);
            let mut m = MixState::new(&a, &b);
            drain(&mut m);
            m.work_counter()
        };
        let small = work_for(16) as f64; // 512 objects in play
        let large = work_for(45) as f64; // 4050 objects in play
        let n_small = 2.0 * 16.0f64 * 16.0;
        let n_large = 2.0 * 45.0f64 * 45.0;
        let model = (n_large * n_large.log2()) / (n_small * n_small.log2());
        assert!(
            large / small <= 4.0 * model,
            "work ratio {} exceeds n log n model {}",
            large / small,
            model
        );
    }
}
