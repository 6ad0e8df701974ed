//! Bistochastic matrices and their bijection with discrete copulas, plus
//! Birkhoff-von Neumann decomposition into permutation matrices.
//!
//! A discrete copula corresponds to the `k x k` matrix of scaled cell
//! masses `b[i][j] = k * V_C(cell (i, j))`; rows and columns then sum to
//! exactly one, and the correspondence is invertible by prefix summation.

use num_traits::{One, Signed, Zero};

use crate::copula::{DiscreteCopula, Mesh};
use crate::error::{Error, Result};
use crate::permutation::Permutation;
use crate::rational::{rat_u, to_f64, Rat};

/// Exact doubly stochastic matrix: nonnegative rational entries with every
/// row and column summing to exactly one.
#[derive(Debug, Clone, PartialEq)]
pub struct BistochasticMatrix {
    k: u32,
    /// Row-major `k * k` entries.
    entries: Vec<Rat>,
}

impl BistochasticMatrix {
    /// Validates shape, nonnegativity, and exact row/column sums.
    pub fn from_entries(k: u32, rows: Vec<Vec<Rat>>) -> Result<Self> {
        Mesh::new(k)?;
        let n = k as usize;
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch {
                rows: rows.len(),
                cols: rows.first().map_or(0, |r| r.len()),
                expected: n,
            });
        }
        let entries: Vec<Rat> = rows.into_iter().flatten().collect();
        let m = BistochasticMatrix { k, entries };
        m.check_sums()?;
        Ok(m)
    }

    fn check_sums(&self) -> Result<()> {
        let n = self.k as usize;
        let one = Rat::one();
        for r in 0..n {
            if self.entries[r * n..(r + 1) * n]
                .iter()
                .any(Signed::is_negative)
            {
                return Err(Error::NotBistochastic {
                    axis: "row",
                    index: r,
                    sum: "negative entry".into(),
                });
            }
            let sum: Rat = self.entries[r * n..(r + 1) * n].iter().cloned().sum();
            if sum != one {
                return Err(Error::NotBistochastic {
                    axis: "row",
                    index: r,
                    sum: sum.to_string(),
                });
            }
        }
        for c in 0..n {
            let sum: Rat = (0..n).map(|r| self.entries[r * n + c].clone()).sum();
            if sum != one {
                return Err(Error::NotBistochastic {
                    axis: "column",
                    index: c,
                    sum: sum.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Mass matrix of a validated discrete copula: `b[i][j] = k * V_C(cell)`.
    pub fn from_copula(c: &DiscreteCopula) -> Result<Self> {
        let report = c.validate();
        if !report.is_ok() {
            return Err(Error::InvalidCopula {
                summary: report.summary(),
            });
        }
        let k = c.k();
        let k_rat = rat_u(k as u64);
        let mut entries = Vec::with_capacity((k * k) as usize);
        for i in 0..k {
            for j in 0..k {
                entries.push(c.cell_volume(i, j).unwrap() * &k_rat);
            }
        }
        Ok(BistochasticMatrix { k, entries })
    }

    /// The permutation matrix of `p`.
    pub fn permutation_matrix(p: &Permutation) -> Self {
        let k = p.len();
        let n = k as usize;
        let mut entries = vec![Rat::zero(); n * n];
        for m in 0..k {
            entries[m as usize * n + p.image(m) as usize] = Rat::one();
        }
        BistochasticMatrix { k, entries }
    }

    /// Exact convex combination of permutation matrices. Weights must be
    /// nonnegative and sum to one.
    pub fn convex_mixture(terms: &[(Rat, Permutation)]) -> Result<Self> {
        let k = match terms.first() {
            Some((_, p)) => p.len(),
            None => return Err(Error::EmptyInput),
        };
        let n = k as usize;
        let mut entries = vec![Rat::zero(); n * n];
        let mut total = Rat::zero();
        for (w, p) in terms {
            if p.len() != k {
                return Err(Error::InvalidParameter {
                    name: "mixture",
                    requirement: "uniform permutation size",
                    value: format!("{} vs {}", p.len(), k),
                });
            }
            if w.is_negative() {
                return Err(Error::InvalidParameter {
                    name: "weight",
                    requirement: "nonnegative",
                    value: w.to_string(),
                });
            }
            total += w;
            for m in 0..k {
                entries[m as usize * n + p.image(m) as usize] += w;
            }
        }
        if !total.is_one() {
            return Err(Error::InvalidParameter {
                name: "weights",
                requirement: "summing to exactly 1",
                value: total.to_string(),
            });
        }
        Ok(BistochasticMatrix { k, entries })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn entry(&self, r: u32, c: u32) -> &Rat {
        &self.entries[r as usize * self.k as usize + c as usize]
    }

    pub fn rows(&self) -> Vec<Vec<Rat>> {
        self.entries
            .chunks(self.k as usize)
            .map(|c| c.to_vec())
            .collect()
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.entries
            .chunks(self.k as usize)
            .map(|row| row.iter().map(to_f64).collect())
            .collect()
    }

    /// The inverse direction of the bijection: copula values are scaled
    /// prefix sums, `C(i/k, j/k) = (1/k) * sum of the leading i x j block`.
    pub fn to_copula(&self) -> DiscreteCopula {
        let k = self.k;
        let n = k as usize + 1;
        let mesh = Mesh::new(k).unwrap();
        let mut values = vec![Rat::zero(); n * n];
        for i in 1..=k as usize {
            for j in 1..=k as usize {
                let cell = &self.entries[(i - 1) * k as usize + (j - 1)] / rat_u(k as u64);
                let val = values[(i - 1) * n + j].clone() + &values[i * n + (j - 1)]
                    - &values[(i - 1) * n + (j - 1)]
                    + cell;
                values[i * n + j] = val;
            }
        }
        DiscreteCopula::from_flat_unchecked(mesh, values)
    }
}

/// One peeled term of a Birkhoff decomposition.
pub type WeightedPermutation<W> = (W, Permutation);

/// Exact Birkhoff-von Neumann decomposition: peels permutation matrices off
/// the strictly positive support until nothing remains. Weights are exact
/// and sum to exactly one; the weighted sum of permutation matrices
/// reconstructs the input exactly.
///
/// Each peel uses the lexicographically smallest perfect matching on the
/// support, so the decomposition is deterministic. The number of terms is at
/// most `positive entries - k + 1`.
pub fn birkhoff_decompose_exact(m: &BistochasticMatrix) -> Result<Vec<WeightedPermutation<Rat>>> {
    let k = m.k as usize;
    let mut work = m.entries.clone();
    let mut terms = Vec::new();
    loop {
        let support: Vec<Vec<bool>> = (0..k)
            .map(|r| (0..k).map(|c| !work[r * k + c].is_zero()).collect())
            .collect();
        if support.iter().all(|row| row.iter().all(|&x| !x)) {
            break;
        }
        let matching = lex_min_matching(&support).ok_or_else(|| Error::NoPerfectMatching {
            residual: row_sums_exact(&work, k),
        })?;
        let weight = matching
            .iter()
            .enumerate()
            .map(|(r, &c)| work[r * k + c].clone())
            .min()
            .expect("nonempty matching");
        for (r, &c) in matching.iter().enumerate() {
            work[r * k + c] -= &weight;
        }
        let perm = Permutation::new(matching.iter().map(|&c| c as u32).collect())?;
        terms.push((weight, perm));
    }
    Ok(terms)
}

/// Double-precision Birkhoff decomposition. The input must be bistochastic
/// within `tol`; entries at or below `tol` are treated as zero after each
/// peel. Weights sum to one within accumulated rounding error and the
/// weighted sum of permutation matrices reconstructs the input within a few
/// ulps per peel.
pub fn birkhoff_decompose(entries: &[Vec<f64>], tol: f64) -> Result<Vec<WeightedPermutation<f64>>> {
    let k = entries.len();
    if k < 2 || entries.iter().any(|r| r.len() != k) {
        return Err(Error::ShapeMismatch {
            rows: k,
            cols: entries.first().map_or(0, |r| r.len()),
            expected: k.max(2),
        });
    }
    if tol < 0.0 || tol.is_nan() {
        return Err(Error::InvalidParameter {
            name: "tol",
            requirement: "nonnegative",
            value: tol.to_string(),
        });
    }
    for (r, row) in entries.iter().enumerate() {
        if row.iter().any(|&x| x < -tol || !x.is_finite()) {
            return Err(Error::NotBistochastic {
                axis: "row",
                index: r,
                sum: "negative or non-finite entry".into(),
            });
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > tol.max(1e-9) {
            return Err(Error::NotBistochastic {
                axis: "row",
                index: r,
                sum: sum.to_string(),
            });
        }
    }
    for c in 0..k {
        let sum: f64 = entries.iter().map(|r| r[c]).sum();
        if (sum - 1.0).abs() > tol.max(1e-9) {
            return Err(Error::NotBistochastic {
                axis: "column",
                index: c,
                sum: sum.to_string(),
            });
        }
    }

    let mut work: Vec<f64> = entries.iter().flatten().copied().collect();
    for x in &mut work {
        if *x <= tol {
            *x = 0.0;
        }
    }
    let mut terms: Vec<WeightedPermutation<f64>> = Vec::new();
    loop {
        let support: Vec<Vec<bool>> = (0..k)
            .map(|r| (0..k).map(|c| work[r * k + c] > 0.0).collect())
            .collect();
        if support.iter().all(|row| row.iter().all(|&x| !x)) {
            break;
        }
        let matching = lex_min_matching(&support).ok_or_else(|| Error::NoPerfectMatching {
            residual: row_sums_f64(&work, k),
        })?;
        let weight = matching
            .iter()
            .enumerate()
            .map(|(r, &c)| work[r * k + c])
            .fold(f64::INFINITY, f64::min);
        for (r, &c) in matching.iter().enumerate() {
            let cell = &mut work[r * k + c];
            *cell -= weight;
            if *cell <= tol {
                *cell = 0.0;
            }
        }
        let perm = Permutation::new(matching.iter().map(|&c| c as u32).collect())?;
        terms.push((weight, perm));
    }
    Ok(terms)
}

fn row_sums_exact(work: &[Rat], k: usize) -> Vec<String> {
    (0..k)
        .map(|r| {
            work[r * k..(r + 1) * k]
                .iter()
                .cloned()
                .sum::<Rat>()
                .to_string()
        })
        .collect()
}

fn row_sums_f64(work: &[f64], k: usize) -> Vec<String> {
    (0..k)
        .map(|r| work[r * k..(r + 1) * k].iter().sum::<f64>().to_string())
        .collect()
}

/// Lexicographically smallest perfect matching on a boolean support: row 0
/// takes the smallest feasible column, then row 1, and so on. Feasibility of
/// the remaining rows is checked with augmenting paths.
fn lex_min_matching(support: &[Vec<bool>]) -> Option<Vec<usize>> {
    let k = support.len();
    let mut taken = vec![false; k];
    let mut assignment = Vec::with_capacity(k);
    for row in 0..k {
        let mut chosen = None;
        for col in 0..k {
            if taken[col] || !support[row][col] {
                continue;
            }
            taken[col] = true;
            if rest_matchable(support, row + 1, &taken) {
                chosen = Some(col);
                break;
            }
            taken[col] = false;
        }
        assignment.push(chosen?);
    }
    Some(assignment)
}

/// Whether rows `from..k` admit a perfect matching into the columns not yet
/// taken (Kuhn's augmenting-path algorithm).
fn rest_matchable(support: &[Vec<bool>], from: usize, taken: &[bool]) -> bool {
    let k = support.len();
    let mut owner: Vec<Option<usize>> = vec![None; k];
    for row in from..k {
        let mut visited = vec![false; k];
        if !augment(support, row, taken, &mut visited, &mut owner) {
            return false;
        }
    }
    true
}

fn augment(
    support: &[Vec<bool>],
    row: usize,
    taken: &[bool],
    visited: &mut [bool],
    owner: &mut [Option<usize>],
) -> bool {
    for col in 0..support.len() {
        if taken[col] || visited[col] || !support[row][col] {
            continue;
        }
        visited[col] = true;
        let free = match owner[col] {
            None => true,
            Some(prev) => augment(support, prev, taken, visited, owner),
        };
        if free {
            owner[col] = Some(row);
            return true;
        }
    }
    false
}
