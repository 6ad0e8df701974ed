//! Permutations of `{1..k}` and the discrete copulas they induce.
//!
//! A permutation copula places mass `1/k` in cell `(m, pi(m))` for each `m`;
//! its grid values are the partial counts `|{m <= i : pi(m) <= j}| / k`.
//! Enumeration code iterates permutations in lexicographic order via an
//! explicit successor step, with rank/unrank for deterministic range
//! partitioning across worker threads.

use crate::copula::{DiscreteCopula, Mesh};
use crate::error::{Error, Result};
use crate::rational::Rat;

/// A bijection on `{1..k}`, stored as zero-based images: entry `m` is
/// `pi(m+1) - 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation(Vec<u32>);

impl Permutation {
    /// Builds from zero-based images, checking bijectivity. Length is the
    /// mesh resolution, so it must be at least 2.
    pub fn new(images: Vec<u32>) -> Result<Self> {
        let k = images.len();
        if k < 2 {
            return Err(Error::MeshTooSmall { k: k as u32 });
        }
        let mut seen = vec![false; k];
        for &x in &images {
            if (x as usize) >= k || seen[x as usize] {
                return Err(Error::InvalidParameter {
                    name: "permutation",
                    requirement: "a bijection of {0..k-1}",
                    value: format!("{images:?}"),
                });
            }
            seen[x as usize] = true;
        }
        Ok(Permutation(images))
    }

    /// Builds from one-based images `pi(1), ..., pi(k)`.
    pub fn from_one_based(images: &[u32]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::InvalidParameter {
                name: "permutation",
                requirement: "one-based images >= 1",
                value: format!("{images:?}"),
            });
        }
        Self::new(images.iter().map(|&x| x - 1).collect())
    }

    pub fn identity(k: u32) -> Self {
        assert!(k >= 2, "permutation length must be at least 2");
        Permutation((0..k).collect())
    }

    /// The order-reversing permutation `m -> k + 1 - m`.
    pub fn reversal(k: u32) -> Self {
        assert!(k >= 2, "permutation length must be at least 2");
        Permutation((0..k).rev().collect())
    }

    pub fn len(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Zero-based image of zero-based index `m`.
    pub fn image(&self, m: u32) -> u32 {
        self.0[m as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<u32> {
        self.0.iter().map(|&x| x + 1).collect()
    }

    /// The induced discrete copula: `C(i/k, j/k) = |{m <= i : pi(m) <= j}| / k`.
    pub fn to_copula(&self) -> DiscreteCopula {
        copula_from_images(&self.0)
    }
}

/// Grid of a permutation copula from raw zero-based images.
///
/// Row `i` is row `i-1` plus the indicator prefix of `pi(i)`, so the whole
/// table costs O(k^2).
pub(crate) fn copula_from_images(images: &[u32]) -> DiscreteCopula {
    let k = images.len() as u32;
    let mesh = Mesh::new(k).expect("permutation length >= 2");
    let n = k as usize + 1;
    let mut counts = vec![0u32; n * n];
    for i in 1..=k as usize {
        let hit = images[i - 1] as usize; // zero-based column of the new mass
        for j in 0..n {
            counts[i * n + j] = counts[(i - 1) * n + j] + u32::from(j > hit);
        }
    }
    let den = num_bigint::BigInt::from(k);
    let values = counts
        .into_iter()
        .map(|c| Rat::new(num_bigint::BigInt::from(c), den.clone()))
        .collect();
    DiscreteCopula::from_flat_unchecked(mesh, values)
}

/// `k!` as a `u64`; `k <= 20` keeps it in range, far above the enumeration cap.
pub fn factorial_u64(k: u32) -> u64 {
    assert!(k <= 20, "factorial_u64 overflows past k = 20");
    (1..=k as u64).product()
}

/// Iterator over permutations of `{0..k-1}` in lexicographic order,
/// optionally restricted to a rank range for parallel partitioning.
///
/// Not a `std::iter::Iterator`: it lends its internal buffer, so each call
/// to [`Self::next`] invalidates the previous slice.
pub struct LexPermutations {
    current: Vec<u32>,
    remaining: u64,
    started: bool,
}

impl LexPermutations {
    pub fn new(k: u32) -> Self {
        Self::from_rank_range(k, 0, factorial_u64(k))
    }

    /// Permutations with lexicographic ranks in `[start, end)`.
    pub fn from_rank_range(k: u32, start: u64, end: u64) -> Self {
        let end = end.min(factorial_u64(k));
        let remaining = end.saturating_sub(start);
        let current = if remaining > 0 {
            unrank(k, start)
        } else {
            Vec::new()
        };
        LexPermutations {
            current,
            remaining,
            started: false,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> Option<&[u32]> {
        if self.remaining == 0 {
            return None;
        }
        if self.started {
            if !next_lex(&mut self.current) {
                self.remaining = 0;
                return None;
            }
        } else {
            self.started = true;
        }
        self.remaining -= 1;
        Some(&self.current)
    }
}

/// Lexicographic successor in place. Returns false when the input was the
/// last permutation.
pub fn next_lex(perm: &mut [u32]) -> bool {
    if perm.len() < 2 {
        return false;
    }
    let mut i = perm.len() - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let pivot = i - 1;
    let mut j = perm.len() - 1;
    while perm[j] <= perm[pivot] {
        j -= 1;
    }
    perm.swap(pivot, j);
    perm[i..].reverse();
    true
}

/// Permutation of `{0..k-1}` with the given lexicographic rank.
pub fn unrank(k: u32, mut rank: u64) -> Vec<u32> {
    let mut available: Vec<u32> = (0..k).collect();
    let mut out = Vec::with_capacity(k as usize);
    for pos in (0..k).rev() {
        let f = factorial_u64(pos);
        let idx = (rank / f) as usize;
        rank %= f;
        out.push(available.remove(idx));
    }
    out
}
