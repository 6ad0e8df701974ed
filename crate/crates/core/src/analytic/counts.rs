//! Exact permutation counting for the value law of the permutation field.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// `n!` as a big integer.
pub fn factorial(n: u32) -> BigInt {
    let mut acc = BigInt::one();
    for m in 2..=n as u64 {
        acc *= m;
    }
    acc
}

/// Table of `0! ..= n!`.
pub(crate) fn factorial_table(n: u32) -> Vec<BigInt> {
    let mut table = Vec::with_capacity(n as usize + 1);
    table.push(BigInt::one());
    for m in 1..=n as u64 {
        let next = table.last().unwrap() * m;
        table.push(next);
    }
    table
}

/// Number of permutations of `{1..k}` whose copula takes value `level/k` at
/// the grid point `(i/k, j/k)` — equivalently, permutation matrices with
/// exactly `level` ones in the top-left `i x j` block.
///
/// Returns zero for any `level` outside `max{0, i+j-k} ..= min{i, j}`;
/// a reciprocal factorial at a negative argument vanishes, and that
/// convention is realized here as an explicit support test rather than a
/// Gamma-function evaluation.
pub fn value_count(k: u32, i: u32, j: u32, level: i64) -> Result<BigInt> {
    if k < 2 {
        return Err(Error::MeshTooSmall { k });
    }
    if i > k || j > k {
        return Err(Error::PointOutOfRange { k, i, j });
    }
    let table = factorial_table(k);
    Ok(value_count_with(&table, k, i, j, level))
}

/// Support of the value law at `(i, j)`: `max{0, i+j-k} ..= min{i, j}`.
pub(crate) fn support_range(k: u32, i: u32, j: u32) -> (i64, i64) {
    let lo = 0i64.max(i as i64 + j as i64 - k as i64);
    let hi = (i as i64).min(j as i64);
    (lo, hi)
}

/// Same as [`value_count`] with a precomputed factorial table covering `0..=k`.
pub(crate) fn value_count_with(table: &[BigInt], k: u32, i: u32, j: u32, level: i64) -> BigInt {
    let (lo, hi) = support_range(k, i, j);
    if level < lo || level > hi {
        return BigInt::zero();
    }
    let l = level as usize;
    let (i, j, k) = (i as usize, j as usize, k as usize);
    let numerator = &table[i] * &table[j] * &table[k - i] * &table[k - j];
    let denominator = &table[i - l] * &table[j - l] * &table[k + l - i - j] * &table[l];
    numerator / denominator
}
