//! Reproducible update-sequence generators for benchmarks and the CLI.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{FatObject, ShapeClass};
use crate::update::Update;

/// Shape of an update stream.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pattern {
    /// Pure insertions, one object per step.
    InsertOnly,
    /// Insert or delete a live object with the given delete probability,
    /// holding the population near the target size.
    Churn(f64),
    /// The canonical grid of thin crossing rectangles: insert one
    /// orientation, insert the other, delete the first.
    AdversarialHashtag,
    /// Ramp the population up to the target, shed three quarters, repeat.
    GrowShrink,
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "insert" => Ok(Pattern::InsertOnly),
            "hashtag" => Ok(Pattern::AdversarialHashtag),
            "growshrink" => Ok(Pattern::GrowShrink),
            _ => match s.strip_prefix("churn:") {
                Some(p) => {
                    let p: f64 = p
                        .parse()
                        .map_err(|_| Error::InvalidWorkload(format!("bad churn rate in {s:?}")))?;
                    if !(0.0..1.0).contains(&p) {
                        return Err(Error::InvalidWorkload(format!(
                            "churn rate {p} outside [0, 1)"
                        )));
                    }
                    Ok(Pattern::Churn(p))
                }
                None => Err(Error::InvalidWorkload(format!(
                    "unknown pattern {s:?} (expected insert, churn:P, hashtag, or growshrink)"
                ))),
            },
        }
    }
}

/// A seeded, fully reproducible update sequence description.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Workload {
    pub seed: u64,
    pub shape_class: ShapeClass,
    /// Population size the stream holds the live set near.
    pub n_target: usize,
    /// Number of updates to emit (the hashtag pattern fixes its own length).
    pub length: usize,
    pub pattern: Pattern,
}

impl Workload {
    pub fn dimension(&self) -> usize {
        self.shape_class.dimension()
    }

    pub fn validate(&self) -> Result<()> {
        self.shape_class.validate()?;
        if self.n_target == 0 {
            return Err(Error::InvalidWorkload("n_target must be positive".into()));
        }
        match self.pattern {
            Pattern::Churn(p) if !(0.0..1.0).contains(&p) => Err(Error::InvalidWorkload(
                format!("churn rate {p} outside [0, 1)"),
            )),
            Pattern::AdversarialHashtag if self.dimension() != 2 => Err(Error::InvalidWorkload(
                "the hashtag grid needs a planar shape class".into(),
            )),
            Pattern::AdversarialHashtag if self.shape_class == ShapeClass::Disks => Err(
                Error::InvalidWorkload("the hashtag grid needs rectangular shapes".into()),
            ),
            _ if self.length == 0 && self.pattern != Pattern::AdversarialHashtag => {
                Err(Error::InvalidWorkload("length must be positive".into()))
            }
            _ => Ok(()),
        }
    }
}

/// The `n`-by-`n` grid of thin rectangles: every horizontal crosses every
/// vertical, while each orientation is internally disjoint.
pub fn hashtag_grid(n: usize) -> (Vec<FatObject>, Vec<FatObject>) {
    let delta = 1.0 / (8.0 * n as f64);
    let horizontals = (0..n)
        .map(|i| {
            let y = (i as f64 + 0.5) / n as f64;
            FatObject::rect(i as u64, &[0.0, y - delta], &[1.0, y + delta])
                .expect("grid rectangle is valid")
        })
        .collect();
    let verticals = (0..n)
        .map(|j| {
            let x = (j as f64 + 0.5) / n as f64;
            FatObject::rect((n + j) as u64, &[x - delta, 0.0], &[x + delta, 1.0])
                .expect("grid rectangle is valid")
        })
        .collect();
    (horizontals, verticals)
}

/// Generate the update sequence for `w`. The same workload always yields the
/// identical sequence.
pub fn generate(w: &Workload) -> Result<Vec<Update>> {
    w.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(w.seed);
    let d = w.dimension();
    let mut live: Vec<u64> = Vec::new();
    let mut next_id = 0u64;
    let mut out = Vec::new();

    let insert = |rng: &mut ChaCha8Rng, live: &mut Vec<u64>, next_id: &mut u64| {
        let o = random_object(rng, w.shape_class, d, *next_id);
        live.push(*next_id);
        *next_id += 1;
        Update::insert(o)
    };
    let delete_random = |rng: &mut ChaCha8Rng, live: &mut Vec<u64>| {
        let at = rng.random_range(0..live.len());
        Update::delete(live.swap_remove(at))
    };

    match w.pattern {
        Pattern::InsertOnly => {
            for _ in 0..w.length {
                out.push(insert(&mut rng, &mut live, &mut next_id));
            }
        }
        Pattern::Churn(p) => {
            for _ in 0..w.length {
                let full = live.len() >= w.n_target;
                if !live.is_empty() && (full || rng.random_bool(p)) {
                    out.push(delete_random(&mut rng, &mut live));
                } else {
                    out.push(insert(&mut rng, &mut live, &mut next_id));
                }
            }
        }
        Pattern::AdversarialHashtag => {
            let (horizontals, verticals) = hashtag_grid(w.n_target);
            out.extend(horizontals.iter().copied().map(Update::insert));
            out.extend(verticals.iter().copied().map(Update::insert));
            out.extend(horizontals.iter().map(|o| Update::delete(o.id())));
        }
        Pattern::GrowShrink => {
            let low = w.n_target / 4;
            let mut growing = true;
            for _ in 0..w.length {
                if growing && live.len() >= w.n_target {
                    growing = false;
                } else if !growing && live.len() <= low {
                    growing = true;
                }
                if growing {
                    out.push(insert(&mut rng, &mut live, &mut next_id));
                } else {
                    out.push(delete_random(&mut rng, &mut live));
                }
            }
        }
    }
    Ok(out)
}

fn random_object(rng: &mut ChaCha8Rng, class: ShapeClass, d: usize, id: u64) -> FatObject {
    let size = 10f64.powf(rng.random_range(-3.0..-1.0));
    match class {
        ShapeClass::Squares | ShapeClass::Hypercubes(_) => {
            let mut lo = [0.0; 4];
            let mut hi = [0.0; 4];
            for k in 0..d {
                lo[k] = rng.random_range(0.0..1.0 - size);
                hi[k] = lo[k] + size;
            }
            FatObject::rect(id, &lo[..d], &hi[..d]).expect("generated box is valid")
        }
        ShapeClass::Disks => {
            let r = size / 2.0;
            let x = rng.random_range(r..1.0 - r);
            let y = rng.random_range(r..1.0 - r);
            FatObject::ball(id, &[x, y], r).expect("generated disk is valid")
        }
    }
}
