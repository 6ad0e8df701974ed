//! Deterministic seeded sampling.
//!
//! All randomness flows through [`SeededRng`], a ChaCha12 stream cipher
//! generator fixed permanently for reproducibility: a given `(seed, stream)`
//! pair yields the same sequence on every platform for a fixed version of
//! this crate. Parallel consumers take independent streams of the same seed
//! rather than sharing state.

use num_traits::ToPrimitive;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Exp1, Gamma};

use crate::analytic::AggregatedDirichlet;
use crate::copula::{DiscreteCopula, GridF64, GridPoint, Mesh};
use crate::error::{Error, Result};
use crate::permutation::{factorial_u64, LexPermutations, Permutation};
use crate::rational::Rat;

/// Deterministic random stream identified by a 64-bit seed and a stream
/// index. Stream 0 is the default; distinct streams of one seed are
/// independent, which is the parallelism contract.
pub struct SeededRng {
    seed: u64,
    stream: u64,
    inner: ChaCha12Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha12Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        SeededRng {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
}

/// A point on the probability simplex in double precision.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletWeights(Vec<f64>);

impl DirichletWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyInput);
        }
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|w| *w < 0.0 || !w.is_finite()) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "weights",
                requirement: "nonnegative, summing to 1 within 1e-12",
                value: format!("sum = {sum}"),
            });
        }
        Ok(DirichletWeights(weights))
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// Uniform random permutation of `{1..k}` by Fisher-Yates.
pub fn sample_permutation(rng: &mut SeededRng, k: u32) -> Result<Permutation> {
    Mesh::new(k)?;
    let mut images: Vec<u32> = (0..k).collect();
    for i in (1..k as usize).rev() {
        let j = rng.random_range(0..=i);
        images.swap(i, j);
    }
    Permutation::new(images)
}

/// One realization of the permutation field: the copula of a uniformly
/// random permutation.
pub fn sample_perm_copula(rng: &mut SeededRng, k: u32) -> Result<DiscreteCopula> {
    Ok(sample_permutation(rng, k)?.to_copula())
}

/// Uniform point on the `(m-1)`-simplex, via normalized standard
/// exponentials (branch-free, stable at large `m`).
pub fn sample_uniform_simplex(rng: &mut SeededRng, m: usize) -> Result<DirichletWeights> {
    if m == 0 {
        return Err(Error::InvalidParameter {
            name: "simplex dimension",
            requirement: "at least 1",
            value: "0".into(),
        });
    }
    if m == 1 {
        return Ok(DirichletWeights(vec![1.0]));
    }
    let mut weights: Vec<f64> = (0..m).map(|_| Exp1.sample(rng)).collect();
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }
    Ok(DirichletWeights(weights))
}

/// Dirichlet draw with arbitrary positive shape parameters: independent
/// Gamma variates normalized. Integer shapes far above 2^53 are taken at
/// double precision; the resulting distributional error is negligible next
/// to Monte-Carlo error.
pub fn sample_dirichlet(rng: &mut SeededRng, params: &[f64]) -> Result<DirichletWeights> {
    if params.is_empty() {
        return Err(Error::EmptyInput);
    }
    if params.iter().any(|&a| a <= 0.0 || !a.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "dirichlet parameter",
            requirement: "positive and finite",
            value: format!("{params:?}"),
        });
    }
    if params.len() == 1 {
        return Ok(DirichletWeights(vec![1.0]));
    }
    let mut weights = Vec::with_capacity(params.len());
    for &shape in params {
        let gamma = Gamma::new(shape, 1.0).map_err(|e| Error::InvalidParameter {
            name: "gamma shape",
            requirement: "accepted by the sampler",
            value: e.to_string(),
        })?;
        weights.push(gamma.sample(rng));
    }
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }
    Ok(DirichletWeights(weights))
}

/// Largest `k` for which full mixture-grid realizations are drawn; `8!`
/// permutations per realization is the tractability edge.
pub const MIXTURE_GRID_MAX_K: u32 = 8;

/// One realization of the mixture field on the whole mesh: uniform simplex
/// weights over all `k!` permutations, accumulated grid-wise in double
/// precision while streaming permutations in lexicographic order. Capped at
/// `k <= 8`; use [`sample_mixture_value`] pointwise beyond that.
pub fn sample_mixture_grid(rng: &mut SeededRng, k: u32) -> Result<GridF64> {
    Mesh::new(k)?;
    if k > MIXTURE_GRID_MAX_K {
        return Err(Error::CapacityExceeded {
            k,
            max: MIXTURE_GRID_MAX_K,
            hint: "use the point-wise mixture sampler for larger k",
        });
    }
    let m = factorial_u64(k) as usize;
    let weights = sample_uniform_simplex(rng, m)?;
    let mut acc = GridF64::zeros(k);
    let mut row_counts = vec![0u32; k as usize + 1];
    let mut perms = LexPermutations::new(k);
    let mut idx = 0usize;
    while let Some(images) = perms.next() {
        let w = weights.weights()[idx] / k as f64;
        idx += 1;
        row_counts.fill(0);
        for i in 1..=k {
            let hit = images[i as usize - 1];
            for j in (hit + 1)..=k {
                row_counts[j as usize] += 1;
            }
            for j in 1..=k {
                *acc.value_mut(i, j) += w * row_counts[j as usize] as f64;
            }
        }
    }
    Ok(acc)
}

/// One draw of the mixture-field value at a single mesh point, for any
/// `k >= 2`: the aggregated Dirichlet weights are sampled directly, so the
/// cost is the size of the value support, not `k!`.
pub fn sample_mixture_value(rng: &mut SeededRng, k: u32, point: GridPoint) -> Result<f64> {
    let agg = AggregatedDirichlet::new(k, point)?;
    let offset = agg.offset().to_f64().unwrap_or(0.0);
    if agg.is_degenerate() {
        return Ok(offset);
    }
    let gamma = sample_dirichlet(rng, &agg.shapes_f64())?;
    let stat: f64 = gamma
        .weights()
        .iter()
        .enumerate()
        .map(|(l, g)| l as f64 * g)
        .sum();
    Ok(offset + stat / k as f64)
}

/// I.i.d. draws from the checkerboard density of a validated copula: a cell
/// is chosen with probability equal to its mass, then the point is uniform
/// within the cell. Both marginals are uniform on `[0, 1]`.
pub fn sample_pairs(
    rng: &mut SeededRng,
    copula: &DiscreteCopula,
    n: usize,
) -> Result<Vec<(f64, f64)>> {
    let report = copula.validate();
    if !report.is_ok() {
        return Err(Error::InvalidCopula {
            summary: report.summary(),
        });
    }
    let k = copula.k();
    let mut cumulative = Vec::with_capacity((k * k) as usize);
    let mut acc = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            acc += copula.cell_volume(i, j).unwrap().to_f64().unwrap_or(0.0);
            cumulative.push(acc);
        }
    }
    let mut pairs = Vec::with_capacity(n);
    for _ in 0..n {
        let r: f64 = rng.random();
        let cell = cumulative
            .partition_point(|&c| c <= r)
            .min((k * k - 1) as usize);
        let (i, j) = (cell as u32 / k, cell as u32 % k);
        let du: f64 = rng.random();
        let dv: f64 = rng.random();
        pairs.push(((i as f64 + du) / k as f64, (j as f64 + dv) / k as f64));
    }
    Ok(pairs)
}

/// Rank-based empirical checkerboard copula of a sample, aggregated onto the
/// mesh of resolution `k`.
///
/// The two coordinate rank sequences pair up into a permutation of the
/// sample, whose checkerboard copula at resolution `n` is evaluated exactly
/// at the mesh nodes. The result is grounded, has uniform marginals, and is
/// 2-increasing by construction, and depends only on the multiset of input
/// pairs (ties are resolved by the other coordinate, exact duplicates pair
/// diagonally).
pub fn empirical_copula(pairs: &[(f64, f64)], k: u32) -> Result<DiscreteCopula> {
    let mesh = Mesh::new(k)?;
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    for &(u, v) in pairs {
        if !(0.0..=1.0).contains(&u) || !(0.0..=1.0).contains(&v) {
            return Err(Error::OutsideUnitSquare {
                u: u.to_string(),
                v: v.to_string(),
            });
        }
    }
    let n = pairs.len();
    // Canonical order by (u, v); position in it is the u-rank.
    let mut canon: Vec<usize> = (0..n).collect();
    canon.sort_by(|&a, &b| pairs[a].partial_cmp(&pairs[b]).unwrap());
    // v-rank of each canonical position, sorting the same points by (v, u).
    let mut by_v: Vec<usize> = (0..n).collect();
    by_v.sort_by(|&a, &b| {
        let pa = pairs[canon[a]];
        let pb = pairs[canon[b]];
        (pa.1, pa.0).partial_cmp(&(pb.1, pb.0)).unwrap()
    });
    let mut rank_perm = vec![0usize; n];
    for (v_rank, &p) in by_v.iter().enumerate() {
        rank_perm[p] = v_rank;
    }

    // The mesh nodes need the rank-copula prefix counts
    // count(a, b) = |{p < a : rank_perm[p] < b}| at at most 2(k+1) thresholds
    // per axis; one sweep over the sample fills them all.
    let thresholds = |axis_scale: u64| -> Vec<(usize, Rat)> {
        (0..=k)
            .map(|idx| {
                let scaled = Rat::new((idx as u64 * axis_scale).into(), (k as u64).into());
                let floor = scaled.floor().to_integer().to_usize().unwrap();
                let frac = &scaled - Rat::from_integer(floor.into());
                (floor, frac)
            })
            .collect()
    };
    let u_cells = thresholds(n as u64);
    let v_cells = thresholds(n as u64);

    let mut a_set: Vec<usize> = Vec::new();
    for (a, t) in &u_cells {
        a_set.push(*a);
        if !num_traits::Zero::is_zero(t) {
            a_set.push(a + 1);
        }
    }
    a_set.sort_unstable();
    a_set.dedup();
    let mut b_list: Vec<usize> = Vec::new();
    for (b, s) in &v_cells {
        b_list.push(*b);
        if !num_traits::Zero::is_zero(s) {
            b_list.push(b + 1);
        }
    }
    b_list.sort_unstable();
    b_list.dedup();

    let mut snapshots: std::collections::BTreeMap<usize, Vec<u64>> = Default::default();
    let mut counts = vec![0u64; b_list.len()];
    let mut next_a = 0usize;
    for (p, &s) in rank_perm.iter().enumerate() {
        if next_a < a_set.len() && a_set[next_a] == p {
            snapshots.insert(p, counts.clone());
            next_a += 1;
        }
        for (bi, &b) in b_list.iter().enumerate() {
            if s < b {
                counts[bi] += 1;
            }
        }
    }
    if next_a < a_set.len() && a_set[next_a] == n {
        snapshots.insert(n, counts.clone());
    }
    let count_at = |a: usize, b: usize| -> Rat {
        let bi = b_list.binary_search(&b).unwrap();
        Rat::new(snapshots[&a][bi].into(), (n as u64).into())
    };

    // Bilinear blend of the rank copula at each mesh node, exactly.
    let one = Rat::from_integer(1.into());
    let mut rows = Vec::with_capacity(mesh.nodes());
    for (a, t) in &u_cells {
        let mut row = Vec::with_capacity(mesh.nodes());
        for (b, s) in &v_cells {
            let mut val = (&one - t) * (&one - s) * count_at(*a, *b);
            if !num_traits::Zero::is_zero(t) {
                val += t * (&one - s) * count_at(a + 1, *b);
            }
            if !num_traits::Zero::is_zero(s) {
                val += (&one - t) * s * count_at(*a, b + 1);
            }
            if !num_traits::Zero::is_zero(t) && !num_traits::Zero::is_zero(s) {
                val += t * s * count_at(a + 1, b + 1);
            }
            row.push(val);
        }
        rows.push(row);
    }
    DiscreteCopula::from_values(k, rows)
}
