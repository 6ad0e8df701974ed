//! Ground-truth engines: exhaustive enumeration over all `k!` permutations
//! in exact arithmetic, and Monte-Carlo estimators with standard errors.
//!
//! Every closed form in [`crate::analytic`] has an enumeration route here
//! that recomputes it from the definition; the test suites assert exact
//! rational equality between the two. Enumeration walks permutations in
//! lexicographic order and may be partitioned by rank range across worker
//! threads; tallies merge by exact addition, so results are independent of
//! scheduling.

mod stats;

pub use stats::{ks_two_sample_test, ks_uniform_test, mc_stats, KsResult, McStats};

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::analytic::FieldLaw;
use crate::checkerboard::split_axis;
use crate::copula::{GridPoint, Mesh, Rect};
use crate::error::{Error, Result};
use crate::permutation::{factorial_u64, LexPermutations};
use crate::rational::{rat_u, Rat};

/// Enumeration behavior knobs.
#[derive(Debug, Clone)]
pub struct EnumOpts {
    /// Permit `k = 9` (362880 permutations) past the default cap of 8.
    pub force: bool,
    /// Worker threads; tallies are merged in rank order, so any value gives
    /// identical results.
    pub threads: usize,
}

impl Default for EnumOpts {
    fn default() -> Self {
        EnumOpts {
            force: false,
            threads: 1,
        }
    }
}

/// Default exhaustive-enumeration cap.
pub const MAX_ENUM_K: u32 = 8;
/// Cap when `force` is set.
pub const FORCED_ENUM_K: u32 = 9;

fn check_capacity(k: u32, opts: &EnumOpts) -> Result<()> {
    Mesh::new(k)?;
    let max = if opts.force {
        FORCED_ENUM_K
    } else {
        MAX_ENUM_K
    };
    if k > max {
        return Err(Error::CapacityExceeded {
            k,
            max,
            hint: if opts.force {
                "exhaustive enumeration is capped"
            } else {
                "pass force to allow k = 9"
            },
        });
    }
    Ok(())
}

/// Partitions the lexicographic rank space into contiguous ranges, runs
/// `work` on each (in parallel when `threads > 1`), and returns the partial
/// results in rank order.
fn fold_perm_ranges<T, F>(k: u32, threads: usize, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync,
{
    let total = factorial_u64(k);
    let threads = threads.clamp(1, 64).min(total as usize);
    if threads == 1 {
        return vec![work(0, total)];
    }
    let chunk = total.div_ceil(threads as u64);
    std::thread::scope(|scope| {
        let work = &work;
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let start = (t as u64) * chunk;
                let end = (start + chunk).min(total);
                scope.spawn(move || work(start, end))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("enumeration worker panicked"))
            .collect()
    })
}

/// `|{m < rows : images[m] < cols}|`: the permutation-matrix mass in the
/// top-left block.
fn prefix_count(images: &[u32], rows: u32, cols: u32) -> u32 {
    images[..rows as usize]
        .iter()
        .filter(|&&x| x < cols)
        .count() as u32
}

/// Exact law of the permutation-field value at a mesh point, by tallying
/// all `k!` permutations. Must equal the closed-form pmf exactly.
pub fn enumerate_pmf(k: u32, point: GridPoint) -> Result<FieldLaw> {
    enumerate_pmf_with(k, point, &EnumOpts::default())
}

pub fn enumerate_pmf_with(k: u32, point: GridPoint, opts: &EnumOpts) -> Result<FieldLaw> {
    check_capacity(k, opts)?;
    let mesh = Mesh::new(k)?;
    if !mesh.contains(point) {
        return Err(Error::PointOutOfRange {
            k,
            i: point.i,
            j: point.j,
        });
    }
    let slots = point.i.min(point.j) as usize + 1;
    let partials = fold_perm_ranges(k, opts.threads, |start, end| {
        let mut tally = vec![0u64; slots];
        let mut perms = LexPermutations::from_rank_range(k, start, end);
        while let Some(images) = perms.next() {
            tally[prefix_count(images, point.i, point.j) as usize] += 1;
        }
        tally
    });
    let mut tally = vec![0u64; slots];
    for part in partials {
        for (acc, x) in tally.iter_mut().zip(part) {
            *acc += x;
        }
    }
    law_from_tally(k, &tally)
}

fn law_from_tally(k: u32, tally: &[u64]) -> Result<FieldLaw> {
    let total = factorial_u64(k);
    let atoms = tally
        .iter()
        .enumerate()
        .filter(|(_, &count)| count > 0)
        .map(|(level, &count)| {
            (
                Rat::new((level as u64).into(), k.into()),
                Rat::new(count.into(), total.into()),
            )
        })
        .collect();
    FieldLaw::from_atoms(atoms)
}

/// A point at which the field is read during joint enumeration: either a
/// mesh node of the grid itself, or an arbitrary rational point evaluated
/// through the checkerboard extension.
#[derive(Debug, Clone)]
pub enum EvalPoint {
    Grid(GridPoint),
    Checkerboard { u: Rat, v: Rat },
}

enum Prepared {
    Grid {
        i: u32,
        j: u32,
    },
    // bilinear corner weights with the 1/k folded in
    Blend {
        i: u32,
        j: u32,
        weights: Box<[Rat; 4]>,
    },
}

impl Prepared {
    fn new(k: u32, point: &EvalPoint) -> Result<Self> {
        match point {
            EvalPoint::Grid(p) => {
                if !Mesh::new(k)?.contains(*p) {
                    return Err(Error::PointOutOfRange { k, i: p.i, j: p.j });
                }
                Ok(Prepared::Grid { i: p.i, j: p.j })
            }
            EvalPoint::Checkerboard { u, v } => {
                let (i, t) = split_axis(k, u)?;
                let (j, s) = split_axis(k, v)?;
                let one = Rat::one();
                let k_rat = rat_u(k as u64);
                let weights = Box::new([
                    (&one - &t) * (&one - &s) / &k_rat,
                    &t * (&one - &s) / &k_rat,
                    (&one - &t) * &s / &k_rat,
                    &t * &s / &k_rat,
                ]);
                Ok(Prepared::Blend { i, j, weights })
            }
        }
    }

    fn eval(&self, k: u32, images: &[u32]) -> Rat {
        match self {
            Prepared::Grid { i, j } => Rat::new(prefix_count(images, *i, *j).into(), k.into()),
            Prepared::Blend { i, j, weights } => {
                let mut acc = Rat::zero();
                let corners = [(*i, *j), (i + 1, *j), (*i, j + 1), (i + 1, j + 1)];
                for (w, (ci, cj)) in weights.iter().zip(corners) {
                    if w.is_zero() {
                        continue;
                    }
                    let count = prefix_count(images, ci.min(k), cj.min(k));
                    acc += w * Rat::from_integer(count.into());
                }
                acc
            }
        }
    }
}

/// Exact joint law of the field values at up to six points.
#[derive(Debug, Clone, PartialEq)]
pub struct JointLaw {
    arity: usize,
    support: Vec<(Vec<Rat>, Rat)>,
}

impl JointLaw {
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// The support, sorted by value tuple, with exact probabilities.
    pub fn support(&self) -> &[(Vec<Rat>, Rat)] {
        &self.support
    }

    /// Marginal law of one component.
    pub fn marginal(&self, idx: usize) -> Result<FieldLaw> {
        if idx >= self.arity {
            return Err(Error::InvalidParameter {
                name: "component index",
                requirement: "within arity",
                value: idx.to_string(),
            });
        }
        FieldLaw::from_atoms(
            self.support
                .iter()
                .map(|(values, p)| (values[idx].clone(), p.clone()))
                .collect(),
        )
    }

    pub fn mean(&self, idx: usize) -> Rat {
        self.support
            .iter()
            .map(|(values, p)| &values[idx] * p)
            .sum()
    }

    /// Exact covariance between two components.
    pub fn covariance(&self, a: usize, b: usize) -> Rat {
        let mean_a = self.mean(a);
        let mean_b = self.mean(b);
        let cross: Rat = self
            .support
            .iter()
            .map(|(values, p)| &values[a] * &values[b] * p)
            .sum();
        cross - mean_a * mean_b
    }

    /// Total probability of the outcomes satisfying a predicate.
    pub fn prob_where<F: Fn(&[Rat]) -> bool>(&self, pred: F) -> Rat {
        self.support
            .iter()
            .filter(|(values, _)| pred(values))
            .map(|(_, p)| p.clone())
            .sum()
    }

    /// Conditional probability of `pred` given `cond`.
    pub fn conditional_prob<F, G>(&self, pred: F, cond: G) -> Rat
    where
        F: Fn(&[Rat]) -> bool,
        G: Fn(&[Rat]) -> bool,
    {
        let joint = self.prob_where(|v| pred(v) && cond(v));
        let base = self.prob_where(cond);
        if base.is_zero() {
            Rat::zero()
        } else {
            joint / base
        }
    }
}

/// Exact joint law of the field read at several points (grid or
/// checkerboard), by exhaustive enumeration.
pub fn enumerate_joint(k: u32, points: &[EvalPoint]) -> Result<JointLaw> {
    enumerate_joint_with(k, points, &EnumOpts::default())
}

pub fn enumerate_joint_with(k: u32, points: &[EvalPoint], opts: &EnumOpts) -> Result<JointLaw> {
    check_capacity(k, opts)?;
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    if points.len() > 6 {
        return Err(Error::InvalidParameter {
            name: "points",
            requirement: "at most 6 per joint law",
            value: points.len().to_string(),
        });
    }
    let prepared: Vec<Prepared> = points
        .iter()
        .map(|p| Prepared::new(k, p))
        .collect::<Result<_>>()?;
    let prepared = &prepared;
    let partials = fold_perm_ranges(k, opts.threads, move |start, end| {
        let mut tally: BTreeMap<Vec<Rat>, u64> = BTreeMap::new();
        let mut perms = LexPermutations::from_rank_range(k, start, end);
        while let Some(images) = perms.next() {
            let values: Vec<Rat> = prepared.iter().map(|p| p.eval(k, images)).collect();
            *tally.entry(values).or_insert(0) += 1;
        }
        tally
    });
    let mut merged: BTreeMap<Vec<Rat>, u64> = BTreeMap::new();
    for part in partials {
        for (values, count) in part {
            *merged.entry(values).or_insert(0) += count;
        }
    }
    let total = factorial_u64(k);
    let support: Vec<(Vec<Rat>, Rat)> = merged
        .into_iter()
        .map(|(values, count)| (values, Rat::new(count.into(), total.into())))
        .collect();
    Ok(JointLaw {
        arity: points.len(),
        support,
    })
}

/// Exact law of the copula mass of a mesh-aligned rectangle under a uniform
/// random permutation. By translation invariance this depends only on the
/// rectangle's dimensions, which the oracle suite verifies placement by
/// placement.
pub fn enumerate_volume_law(k: u32, rect: &Rect) -> Result<FieldLaw> {
    enumerate_volume_law_with(k, rect, &EnumOpts::default())
}

pub fn enumerate_volume_law_with(k: u32, rect: &Rect, opts: &EnumOpts) -> Result<FieldLaw> {
    check_capacity(k, opts)?;
    let mesh = Mesh::new(k)?;
    let to_index = |r: &Rat| -> Result<u32> {
        mesh.index_of(r).ok_or_else(|| Error::OffMeshRect {
            k,
            x: r.to_string(),
            y: r.to_string(),
        })
    };
    let x0 = to_index(&rect.x)?;
    let y0 = to_index(&rect.y)?;
    let x1 = to_index(&(&rect.x + &rect.width))?;
    let y1 = to_index(&(&rect.y + &rect.height))?;
    let (rows, cols) = (x1 - x0, y1 - y0);
    let slots = rows.min(cols) as usize + 1;
    let partials = fold_perm_ranges(k, opts.threads, |start, end| {
        let mut tally = vec![0u64; slots];
        let mut perms = LexPermutations::from_rank_range(k, start, end);
        while let Some(images) = perms.next() {
            let mass = images[x0 as usize..x1 as usize]
                .iter()
                .filter(|&&col| col >= y0 && col < y1)
                .count();
            tally[mass] += 1;
        }
        tally
    });
    let mut tally = vec![0u64; slots];
    for part in partials {
        for (acc, x) in tally.iter_mut().zip(part) {
            *acc += x;
        }
    }
    law_from_tally(k, &tally)
}
