//! Closed forms for the permutation field: the value of a uniformly random
//! permutation copula, on the mesh and under checkerboard extension.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::checkerboard::split_axis;
use crate::copula::{GridPoint, Mesh};
use crate::error::{Error, Result};
use crate::rational::{from_f64_exact, rat_u, to_f64, Rat};

use super::counts::{factorial_table, support_range, value_count_with};
use super::law::FieldLaw;

/// Which neighbor of `(i, j)` a covariance refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `(i, j)` with `(i+1, j)`.
    Right,
    /// `(i, j)` with `(i, j+1)`.
    Up,
    /// `(i, j)` with `(i+1, j+1)`.
    Diagonal,
    /// `(i+1, j)` with `(i, j+1)`.
    Antidiagonal,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::Right,
        Direction::Up,
        Direction::Diagonal,
        Direction::Antidiagonal,
    ];
}

/// Exact law of the field value at a mesh point: atoms `level/k` weighted by
/// the permutation counts over `k!`.
///
/// The probabilities along the support sum to exactly one; this is the
/// hypergeometric law scaled onto the mesh.
pub fn pmf(k: u32, point: GridPoint) -> Result<FieldLaw> {
    let mesh = Mesh::new(k)?;
    if !mesh.contains(point) {
        return Err(Error::PointOutOfRange {
            k,
            i: point.i,
            j: point.j,
        });
    }
    let table = factorial_table(k);
    let total = table[k as usize].clone();
    let (lo, hi) = support_range(k, point.i, point.j);
    let mut atoms = Vec::with_capacity((hi - lo + 1) as usize);
    for level in lo..=hi {
        let count = value_count_with(&table, k, point.i, point.j, level);
        atoms.push((
            Rat::new(level.into(), k.into()),
            Rat::new(count, total.clone()),
        ));
    }
    FieldLaw::from_atoms(atoms)
}

/// `E = uv` at the mesh point `(i/k, j/k)`.
pub fn mean(k: u32, point: GridPoint) -> Result<Rat> {
    let mesh = Mesh::new(k)?;
    if !mesh.contains(point) {
        return Err(Error::PointOutOfRange {
            k,
            i: point.i,
            j: point.j,
        });
    }
    Ok(mesh.node(point.i) * mesh.node(point.j))
}

/// `V = uv(1-u)(1-v) / (k-1)` at the mesh point `(i/k, j/k)`.
pub fn variance(k: u32, point: GridPoint) -> Result<Rat> {
    let mesh = Mesh::new(k)?;
    if !mesh.contains(point) {
        return Err(Error::PointOutOfRange {
            k,
            i: point.i,
            j: point.j,
        });
    }
    let (i, j) = (BigInt::from(point.i), BigInt::from(point.j));
    let kk = BigInt::from(k);
    let num = &i * &j * (&kk - &i) * (&kk - &j);
    let den = kk.pow(4) * (k - 1);
    Ok(Rat::new(num, den))
}

/// Mean at rational coordinates, which must lie on the mesh.
pub fn mean_at(k: u32, u: &Rat, v: &Rat) -> Result<Rat> {
    mean(k, mesh_point(k, u, v)?)
}

/// Variance at rational coordinates, which must lie on the mesh.
pub fn variance_at(k: u32, u: &Rat, v: &Rat) -> Result<Rat> {
    variance(k, mesh_point(k, u, v)?)
}

fn mesh_point(k: u32, u: &Rat, v: &Rat) -> Result<GridPoint> {
    let mesh = Mesh::new(k)?;
    match (mesh.index_of(u), mesh.index_of(v)) {
        (Some(i), Some(j)) => Ok(GridPoint { i, j }),
        _ => Err(Error::NotAMeshPoint {
            k,
            u: u.to_string(),
            v: v.to_string(),
        }),
    }
}

fn cell_out_of_range(k: u32, i: u32, j: u32) -> Error {
    Error::InvalidParameter {
        name: "cell index",
        requirement: "at most k-1 in both coordinates",
        value: format!("(i, j) = ({i}, {j}) for k = {k}"),
    }
}

/// Exact covariance of the field values at `(i, j)` and its neighbor.
///
/// All four closed forms share the denominator `k^4 (k-1)`:
/// right `ij(k-i-1)(k-j)`, up `ij(k-i)(k-j-1)`, and both diagonals
/// `ij(k-i-1)(k-j-1)`.
pub fn cov_adjacent(k: u32, i: u32, j: u32, direction: Direction) -> Result<Rat> {
    Mesh::new(k)?;
    if i >= k || j >= k {
        return Err(cell_out_of_range(k, i, j));
    }
    let (i, j, kk) = (BigInt::from(i), BigInt::from(j), BigInt::from(k));
    let num = match direction {
        Direction::Right => &i * &j * (&kk - &i - 1) * (&kk - &j),
        Direction::Up => &i * &j * (&kk - &i) * (&kk - &j - 1),
        Direction::Diagonal | Direction::Antidiagonal => &i * &j * (&kk - &i - 1) * (&kk - &j - 1),
    };
    let den = kk.pow(4) * (k - 1);
    Ok(Rat::new(num, den))
}

/// Conditional distribution of the three neighbors above/right of `(i, j)`,
/// given that the value there is `level/k`. The five cases are, in order,
/// the joint neighbor outcomes
/// `(level+1, level+1, level+2)`, `(level+1, level, level+1)`,
/// `(level, level+1, level+1)`, `(level, level, level)`, and
/// `(level, level, level+1)` for
/// `(C(i+1,j), C(i,j+1), C(i+1,j+1))`, all divided by `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalTable {
    probs: [Rat; 5],
}

impl ConditionalTable {
    pub fn probs(&self) -> &[Rat; 5] {
        &self.probs
    }

    pub fn p1(&self) -> &Rat {
        &self.probs[0]
    }
    pub fn p2(&self) -> &Rat {
        &self.probs[1]
    }
    pub fn p3(&self) -> &Rat {
        &self.probs[2]
    }
    pub fn p4(&self) -> &Rat {
        &self.probs[3]
    }
    pub fn p5(&self) -> &Rat {
        &self.probs[4]
    }
}

/// The five conditional probabilities for the cell above-right of `(i, j)`,
/// given field value `level/k` there. Requires `i, j <= k-1` and `level` in
/// the support of [`pmf`].
pub fn conditional_table(k: u32, i: u32, j: u32, level: i64) -> Result<ConditionalTable> {
    Mesh::new(k)?;
    if i >= k || j >= k {
        return Err(cell_out_of_range(k, i, j));
    }
    let (lo, hi) = support_range(k, i, j);
    if level < lo || level > hi {
        return Err(Error::LevelOutOfSupport { k, i, j, level });
    }
    let (ik, jk, kk, l) = (i as i64, j as i64, k as i64, level);
    let den = (kk - ik) * (kk - jk);
    let rest = kk + l - ik - jk; // permutation mass outside both prefixes
    let q = |num: i64| Rat::new(num.into(), den.into());
    Ok(ConditionalTable {
        probs: [
            q((ik - l) * (jk - l)),
            q((jk - l) * rest),
            q((ik - l) * rest),
            q(rest * (rest - 1)),
            q(rest),
        ],
    })
}

/// Exact law of the checkerboard-extended field at any rational `(u, v)` in
/// the unit square.
///
/// Conditional on the mesh value `level/k` at the cell's lower-left corner,
/// the extension takes one of five values
/// `(level + t + s)/k, (level + t)/k, (level + s)/k, level/k, (level + ts)/k`
/// with the [`conditional_table`] probabilities; atoms that coincide as
/// rationals (for instance when `t = s` or `t + s = 1`) are merged exactly.
pub fn extended_pmf(k: u32, u: &Rat, v: &Rat) -> Result<FieldLaw> {
    Mesh::new(k)?;
    let (i, t) = split_axis(k, u)?;
    let (j, s) = split_axis(k, v)?;
    if t.is_zero() && s.is_zero() {
        return pmf(k, GridPoint { i, j });
    }
    // On the closing boundary the extension is the deterministic marginal.
    if i == k {
        return Ok(FieldLaw::degenerate(v.clone()));
    }
    if j == k {
        return Ok(FieldLaw::degenerate(u.clone()));
    }
    let base = pmf(k, GridPoint { i, j })?;
    let k_rat = rat_u(k as u64);
    let ts = &t * &s;
    let mut atoms = Vec::with_capacity(base.len() * 5);
    for (value, prob) in base.atoms() {
        let level = (value * &k_rat).to_integer();
        let level_i64 = i64::try_from(level).expect("level fits i64");
        let table = conditional_table(k, i, j, level_i64)?;
        let level_rat = Rat::from_integer(level_i64.into());
        let offsets = [&t + &s, t.clone(), s.clone(), Rat::zero(), ts.clone()];
        for (offset, p) in offsets.into_iter().zip(table.probs()) {
            atoms.push(((&level_rat + offset) / &k_rat, prob * p));
        }
    }
    FieldLaw::from_atoms(atoms)
}

/// Float-input convenience path: the inputs are converted exactly (every
/// double is a dyadic rational), and output atoms closer than `1e-12` are
/// merged.
pub fn extended_pmf_f64(k: u32, u: f64, v: f64) -> Result<Vec<(f64, f64)>> {
    let law = extended_pmf(k, &from_f64_exact(u)?, &from_f64_exact(v)?)?;
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(law.len());
    for (value, prob) in law.to_f64_atoms() {
        match merged.last_mut() {
            Some((last_v, last_p)) if (value - *last_v).abs() <= 1e-12 => *last_p += prob,
            _ => merged.push((value, prob)),
        }
    }
    Ok(merged)
}

/// `E = uv` anywhere in the unit square.
pub fn extended_mean(k: u32, u: &Rat, v: &Rat) -> Result<Rat> {
    Mesh::new(k)?;
    let one = Rat::one();
    if u < &Rat::zero() || v < &Rat::zero() || u > &one || v > &one {
        return Err(Error::OutsideUnitSquare {
            u: u.to_string(),
            v: v.to_string(),
        });
    }
    Ok(u * v)
}

/// `V = (u(1-u) - t(1-t)/k) (v(1-v) - s(1-s)/k) / (k-1)` with `t, s` the
/// cell-local offsets of `(u, v)`. Reduces to [`variance`] on mesh points.
pub fn extended_variance(k: u32, u: &Rat, v: &Rat) -> Result<Rat> {
    Mesh::new(k)?;
    let (_, t) = split_axis(k, u)?;
    let (_, s) = split_axis(k, v)?;
    let one = Rat::one();
    let k_rat = rat_u(k as u64);
    let ufac = u * (&one - u) - &t * (&one - &t) / &k_rat;
    let vfac = v * (&one - v) - &s * (&one - &s) / &k_rat;
    Ok(ufac * vfac / Rat::from_integer(BigInt::from(k as u64 - 1)))
}

/// Places the extended-field value at a double-precision point, for
/// Monte-Carlo verification paths.
pub fn extended_mean_f64(k: u32, u: f64, v: f64) -> Result<f64> {
    Ok(to_f64(&extended_mean(
        k,
        &from_f64_exact(u)?,
        &from_f64_exact(v)?,
    )?))
}

pub fn extended_variance_f64(k: u32, u: f64, v: f64) -> Result<f64> {
    Ok(to_f64(&extended_variance(
        k,
        &from_f64_exact(u)?,
        &from_f64_exact(v)?,
    )?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn pmf_central_point_k4() {
        let law = pmf(4, GridPoint::new(2, 2)).unwrap();
        assert_eq!(
            law.atoms(),
            &[
                (rat(0, 1), rat(1, 6)),
                (rat(1, 4), rat(2, 3)),
                (rat(1, 2), rat(1, 6))
            ]
        );
    }

    #[test]
    fn pmf_on_boundary_is_degenerate() {
        for j in 0..=5u32 {
            let law = pmf(5, GridPoint::new(0, j)).unwrap();
            assert_eq!(law.atoms(), &[(rat(0, 1), rat(1, 1))]);
        }
    }

    #[test]
    fn pmf_k3_matches_direct_tally() {
        let law = pmf(3, GridPoint::new(1, 1)).unwrap();
        assert_eq!(
            law.atoms(),
            &[(rat(0, 1), rat(2, 3)), (rat(1, 3), rat(1, 3))]
        );
    }

    #[test]
    fn pmf_equals_hypergeometric_form() {
        // prob(level) = C(i, level) C(k-i, j-level) / C(k, j)
        let binom = |n: i64, r: i64| -> Rat {
            if r < 0 || r > n {
                return Rat::zero();
            }
            let mut acc = Rat::one();
            for x in 0..r {
                acc = acc * Rat::from_integer((n - x).into()) / Rat::from_integer((r - x).into());
            }
            acc
        };
        for k in 2..=7u32 {
            for i in 0..=k {
                for j in 0..=k {
                    let law = pmf(k, GridPoint::new(i, j)).unwrap();
                    for (value, prob) in law.atoms() {
                        let level = (value * rat_u(k as u64)).to_integer();
                        let l = i64::try_from(level).unwrap();
                        let expect = binom(i as i64, l) * binom(k as i64 - i as i64, j as i64 - l)
                            / binom(k as i64, j as i64);
                        assert_eq!(*prob, expect, "k={k} i={i} j={j} l={l}");
                    }
                }
            }
        }
    }

    #[test]
    fn pmf_rejects_out_of_range_point() {
        assert!(matches!(
            pmf(4, GridPoint::new(5, 0)),
            Err(Error::PointOutOfRange { .. })
        ));
    }

    #[test]
    fn moments_match_known_values() {
        assert_eq!(mean(4, GridPoint::new(2, 2)).unwrap(), rat(1, 4));
        assert_eq!(variance(4, GridPoint::new(2, 2)).unwrap(), rat(1, 48));
        // k=10, u=2/5, v=1/2
        assert_eq!(mean(10, GridPoint::new(4, 5)).unwrap(), rat(1, 5));
        assert_eq!(variance(10, GridPoint::new(4, 5)).unwrap(), rat(1, 150));
        // grounded edge
        assert_eq!(mean(7, GridPoint::new(0, 3)).unwrap(), rat(0, 1));
        assert_eq!(variance(7, GridPoint::new(0, 3)).unwrap(), rat(0, 1));
    }

    #[test]
    fn moments_match_pmf_moments() {
        for k in 2..=7u32 {
            for i in 0..=k {
                for j in 0..=k {
                    let law = pmf(k, GridPoint::new(i, j)).unwrap();
                    assert_eq!(law.mean(), mean(k, GridPoint::new(i, j)).unwrap());
                    assert_eq!(law.variance(), variance(k, GridPoint::new(i, j)).unwrap());
                }
            }
        }
    }

    #[test]
    fn rational_entry_points_require_mesh_points() {
        assert_eq!(mean_at(4, &rat(1, 2), &rat(1, 2)).unwrap(), rat(1, 4));
        assert!(matches!(
            variance_at(4, &rat(1, 3), &rat(1, 2)),
            Err(Error::NotAMeshPoint { .. })
        ));
    }

    #[test]
    fn covariances_at_k3_center() {
        assert_eq!(cov_adjacent(3, 1, 1, Direction::Right).unwrap(), rat(1, 81));
        assert_eq!(
            cov_adjacent(3, 1, 1, Direction::Diagonal).unwrap(),
            rat(1, 162)
        );
        assert_eq!(
            cov_adjacent(3, 1, 1, Direction::Antidiagonal).unwrap(),
            rat(1, 162)
        );
        for dir in Direction::ALL {
            assert_eq!(cov_adjacent(5, 0, 3, dir).unwrap(), rat(0, 1));
        }
        assert!(cov_adjacent(3, 3, 1, Direction::Right).is_err());
    }

    #[test]
    fn conditional_table_known_rows() {
        let t = conditional_table(2, 0, 0, 0).unwrap();
        assert_eq!(
            t.probs(),
            &[rat(0, 1), rat(0, 1), rat(0, 1), rat(1, 2), rat(1, 2)]
        );
        let t = conditional_table(4, 1, 1, 0).unwrap();
        assert_eq!(
            t.probs(),
            &[rat(1, 9), rat(2, 9), rat(2, 9), rat(2, 9), rat(2, 9)]
        );
        // i - level = 0 kills the first case
        let t = conditional_table(4, 2, 2, 2).unwrap();
        assert_eq!(*t.p1(), rat(0, 1));
    }

    #[test]
    fn conditional_table_rows_always_sum_to_one() {
        for k in 2..=6u32 {
            for i in 0..k {
                for j in 0..k {
                    let (lo, hi) = support_range(k, i, j);
                    for level in lo..=hi {
                        let t = conditional_table(k, i, j, level).unwrap();
                        let total: Rat = t.probs().iter().cloned().sum();
                        assert!(total.is_one(), "k={k} i={i} j={j} l={level}");
                        // marginal consistency of the row sums
                        let rest = rat(k as i64 + level - i as i64 - j as i64, k as i64 - i as i64);
                        assert_eq!(t.p3() + t.p4() + t.p5(), rest);
                        assert_eq!(t.p1() + t.p2(), rat(j as i64 - level, k as i64 - i as i64));
                    }
                }
            }
        }
    }

    #[test]
    fn conditional_table_rejects_out_of_support_level() {
        assert!(matches!(
            conditional_table(4, 1, 1, 2),
            Err(Error::LevelOutOfSupport { .. })
        ));
    }

    #[test]
    fn extended_pmf_agrees_with_pmf_on_mesh() {
        for k in [2u32, 3, 5] {
            for i in 0..=k {
                for j in 0..=k {
                    let law = extended_pmf(k, &rat(i as i64, k as i64), &rat(j as i64, k as i64))
                        .unwrap();
                    assert_eq!(law, pmf(k, GridPoint::new(i, j)).unwrap());
                }
            }
        }
    }

    #[test]
    fn extended_pmf_two_permutations_quarter_point() {
        let law = extended_pmf(2, &rat(1, 4), &rat(1, 4)).unwrap();
        assert_eq!(
            law.atoms(),
            &[(rat(0, 1), rat(1, 2)), (rat(1, 8), rat(1, 2))]
        );
    }

    #[test]
    fn extended_pmf_boundary_is_marginal() {
        let law = extended_pmf(3, &rat(1, 1), &rat(1, 4)).unwrap();
        assert_eq!(law.atoms(), &[(rat(1, 4), rat(1, 1))]);
    }

    #[test]
    fn extended_moments_known_values() {
        assert_eq!(
            extended_mean(2, &rat(1, 4), &rat(1, 4)).unwrap(),
            rat(1, 16)
        );
        assert_eq!(
            extended_variance(2, &rat(1, 4), &rat(1, 4)).unwrap(),
            rat(1, 256)
        );
        // k=5 at (1/2, 1/2): t = s = 1/2 inside cell (2, 2)
        assert_eq!(
            extended_variance(5, &rat(1, 2), &rat(1, 2)).unwrap(),
            rat(1, 100)
        );
        // mesh point reduces to the grid variance
        assert_eq!(
            extended_variance(4, &rat(1, 2), &rat(1, 2)).unwrap(),
            variance(4, GridPoint::new(2, 2)).unwrap()
        );
    }

    #[test]
    fn extended_pmf_moments_match_closed_forms() {
        for k in 2..=5u32 {
            for (un, ud, vn, vd) in [(1i64, 7i64, 3i64, 7i64), (2, 9, 5, 9), (1, 3, 1, 2)] {
                let u = rat(un, ud);
                let v = rat(vn, vd);
                let law = extended_pmf(k, &u, &v).unwrap();
                assert_eq!(law.mean(), extended_mean(k, &u, &v).unwrap(), "mean k={k}");
                assert_eq!(
                    law.variance(),
                    extended_variance(k, &u, &v).unwrap(),
                    "variance k={k} u={u} v={v}"
                );
            }
        }
    }

    #[test]
    fn extended_pmf_f64_merges_nearby_atoms() {
        let atoms = extended_pmf_f64(2, 0.25, 0.25).unwrap();
        assert_eq!(atoms.len(), 2);
        assert!((atoms[0].0 - 0.0).abs() < 1e-15 && (atoms[0].1 - 0.5).abs() < 1e-15);
        assert!((atoms[1].0 - 0.125).abs() < 1e-15 && (atoms[1].1 - 0.5).abs() < 1e-15);
    }
}
