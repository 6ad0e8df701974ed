//! Acceptance suite: every library-level acceptance criterion, one test per
//! criterion, each printing a pass line with its runtime. The command-line
//! determinism criterion lives in the CLI crate's own acceptance test.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use copula_forge::analytic::{
    factorial, mixture_field, perm_field, value_count, AggregatedDirichlet, Direction,
};
use copula_forge::bistochastic::birkhoff_decompose;
use copula_forge::checkerboard;
use copula_forge::copula::{GridF64, GridPoint, Mesh, Rect};
use copula_forge::oracle::{self, enumerate_joint, enumerate_pmf, enumerate_volume_law, EvalPoint};
use copula_forge::permutation::Permutation;
use copula_forge::rational::{rat, to_f64, Rat};
use copula_forge::sampling::{
    empirical_copula, sample_mixture_grid, sample_mixture_value, sample_pairs, sample_permutation,
    sample_uniform_simplex, SeededRng,
};

fn report(criterion: u32, name: &str, started: Instant) {
    println!(
        "[acceptance] criterion {criterion} ({name}): PASS in {:.2?}",
        started.elapsed()
    );
}

/// Criterion 1: the value counts at every grid point sum to exactly k!,
/// k in 2..=12.
#[test]
fn criterion_01_count_identity() {
    let t0 = Instant::now();
    for k in 2..=12u32 {
        let total = factorial(k);
        for i in 0..=k {
            for j in 0..=k {
                let lo = 0i64.max(i as i64 + j as i64 - k as i64);
                let hi = (i as i64).min(j as i64);
                let sum: BigInt = (lo..=hi).map(|l| value_count(k, i, j, l).unwrap()).sum();
                assert_eq!(sum, total, "k={k} i={i} j={j}");
            }
        }
    }
    report(1, "count identity", t0);
}

/// Criterion 2: the closed-form value law equals exhaustive enumeration by
/// rational equality at every mesh point, k in 2..=7, single-threaded.
#[test]
fn criterion_02_pmf_exactness() {
    let t0 = Instant::now();
    for k in 2..=7u32 {
        for i in 0..=k {
            for j in 0..=k {
                let point = GridPoint::new(i, j);
                assert_eq!(
                    perm_field::pmf(k, point).unwrap(),
                    enumerate_pmf(k, point).unwrap(),
                    "k={k} point={point}"
                );
            }
        }
    }
    report(2, "pmf exactness", t0);
}

/// Golden closed-form CDF of the mixture-field value at the k=4 center.
fn golden_cdf_k4_center(w: &Rat) -> Rat {
    let half = rat(1, 2);
    let quarter = rat(1, 4);
    if w.is_negative() {
        return Rat::zero();
    }
    if *w >= half {
        return Rat::one();
    }
    let w2 = w * w;
    let w3 = &w2 * w;
    if *w < quarter {
        let poly = rat(-72352, 1) * &w3 + rat(62744, 1) * &w2 + rat(-18216, 1) * w + rat(1771, 1);
        (rat(4, 1) * w).pow(20) * poly / rat(16, 1)
    } else {
        let poly = rat(72352, 1) * &w3 + rat(-45784, 1) * &w2 + rat(9736, 1) * w + rat(-695, 1);
        Rat::one() - (rat(2, 1) - rat(4, 1) * w).pow(20) * poly / rat(16, 1)
    }
}

/// Criterion 3: the k=4 center example. Counts (4, 16, 4); Monte-Carlo CDF
/// matches the golden piecewise polynomial within 3 standard errors at five
/// interior points; exact 0 below the support and exact 1 from 1/2 on.
#[test]
fn criterion_03_k4_center_example() {
    let t0 = Instant::now();
    assert_eq!(value_count(4, 2, 2, 0).unwrap(), BigInt::from(4));
    assert_eq!(value_count(4, 2, 2, 1).unwrap(), BigInt::from(16));
    assert_eq!(value_count(4, 2, 2, 2).unwrap(), BigInt::from(4));

    // the golden polynomial itself pins the midpoint exactly
    assert_eq!(golden_cdf_k4_center(&rat(1, 4)), rat(1, 2));

    let point = GridPoint::new(2, 2);
    let n = mixture_field::DEFAULT_CDF_SAMPLES;
    let mut rng = SeededRng::new(30_001);
    let exact_low = mixture_field::cdf(4, point, -0.25, n, &mut rng).unwrap();
    assert_eq!((exact_low.estimate, exact_low.samples), (0.0, 0));
    let exact_high = mixture_field::cdf(4, point, 0.5, n, &mut rng).unwrap();
    assert_eq!((exact_high.estimate, exact_high.samples), (1.0, 0));

    for (idx, w) in [rat(1, 10), rat(1, 5), rat(1, 4), rat(3, 10), rat(2, 5)]
        .iter()
        .enumerate()
    {
        let truth = to_f64(&golden_cdf_k4_center(w));
        let mut rng = SeededRng::with_stream(30_001, idx as u64 + 1);
        let est = mixture_field::cdf(4, point, to_f64(w), n, &mut rng).unwrap();
        let se_true = (truth * (1.0 - truth) / n as f64).sqrt();
        assert!(
            (est.estimate - truth).abs() <= 3.0 * se_true,
            "w={w}: estimate {} vs golden {truth} (3 SE = {})",
            est.estimate,
            3.0 * se_true
        );
    }
    report(3, "k=4 center example", t0);
}

/// Criterion 4: moment formulas. Enumerated means and variances equal the
/// closed forms exactly for k in 2..=6; the mixture variance equals the
/// independent Dirichlet-moment route exactly, and is 1/1200 at the k=4
/// center.
#[test]
fn criterion_04_moment_formulas() {
    let t0 = Instant::now();
    for k in 2..=6u32 {
        for i in 0..=k {
            for j in 0..=k {
                let point = GridPoint::new(i, j);
                let law = enumerate_pmf(k, point).unwrap();
                assert_eq!(
                    law.mean(),
                    perm_field::mean(k, point).unwrap(),
                    "mean k={k} {point}"
                );
                assert_eq!(
                    law.variance(),
                    perm_field::variance(k, point).unwrap(),
                    "variance k={k} {point}"
                );
                let agg = AggregatedDirichlet::new(k, point).unwrap();
                assert_eq!(
                    agg.value_variance(),
                    mixture_field::variance(k, point).unwrap(),
                    "mixture variance k={k} {point}"
                );
            }
        }
    }
    assert_eq!(
        mixture_field::variance(4, GridPoint::new(2, 2)).unwrap(),
        rat(1, 1200)
    );
    report(4, "moment formulas", t0);
}

/// The 5x5 off-mesh lattice with denominator 7 used by the extension
/// criteria; never on a mesh of resolution 2..=6.
fn off_mesh_lattice() -> Vec<(Rat, Rat)> {
    let mut points = Vec::with_capacity(25);
    for a in 1..=5i64 {
        for b in 1..=5i64 {
            points.push((rat(a, 7), rat(b, 7)));
        }
    }
    points
}

/// Criterion 5: extension formulas. Exact enumeration of checkerboard
/// moments on 25 rational off-mesh points equals the closed forms by
/// rational equality for k in 2..=5.
#[test]
fn criterion_05_extension_formulas() {
    let t0 = Instant::now();
    for k in 2..=5u32 {
        for (u, v) in off_mesh_lattice() {
            let law = enumerate_joint(
                k,
                &[EvalPoint::Checkerboard {
                    u: u.clone(),
                    v: v.clone(),
                }],
            )
            .unwrap()
            .marginal(0)
            .unwrap();
            assert_eq!(
                law.mean(),
                perm_field::extended_mean(k, &u, &v).unwrap(),
                "mean k={k} ({u}, {v})"
            );
            assert_eq!(
                law.variance(),
                perm_field::extended_variance(k, &u, &v).unwrap(),
                "variance k={k} ({u}, {v})"
            );
            assert_eq!(
                law,
                perm_field::extended_pmf(k, &u, &v).unwrap(),
                "law k={k} ({u}, {v})"
            );
        }
    }
    report(5, "extension formulas", t0);
}

/// Criterion 6: conditional tables and adjacent covariances equal
/// enumeration-derived exact values for all valid cells, levels, and
/// directions, k in 3..=6.
#[test]
fn criterion_06_conditional_tables_and_covariances() {
    let t0 = Instant::now();
    for k in 3..=6u32 {
        for i in 0..k {
            for j in 0..k {
                for dir in Direction::ALL {
                    let (a, b) = match dir {
                        Direction::Right => (GridPoint::new(i, j), GridPoint::new(i + 1, j)),
                        Direction::Up => (GridPoint::new(i, j), GridPoint::new(i, j + 1)),
                        Direction::Diagonal => (GridPoint::new(i, j), GridPoint::new(i + 1, j + 1)),
                        Direction::Antidiagonal => {
                            (GridPoint::new(i + 1, j), GridPoint::new(i, j + 1))
                        }
                    };
                    let joint =
                        enumerate_joint(k, &[EvalPoint::Grid(a), EvalPoint::Grid(b)]).unwrap();
                    assert_eq!(
                        joint.covariance(0, 1),
                        perm_field::cov_adjacent(k, i, j, dir).unwrap(),
                        "cov k={k} ({i}, {j}) {dir:?}"
                    );
                }

                let joint = enumerate_joint(
                    k,
                    &[
                        EvalPoint::Grid(GridPoint::new(i, j)),
                        EvalPoint::Grid(GridPoint::new(i + 1, j)),
                        EvalPoint::Grid(GridPoint::new(i, j + 1)),
                        EvalPoint::Grid(GridPoint::new(i + 1, j + 1)),
                    ],
                )
                .unwrap();
                for (value, _) in perm_field::pmf(k, GridPoint::new(i, j)).unwrap().atoms() {
                    let level = (value * rat(k as i64, 1)).to_integer().to_i64().unwrap();
                    let table = perm_field::conditional_table(k, i, j, level).unwrap();
                    let patterns: [(i64, i64, i64); 5] = [
                        (level + 1, level + 1, level + 2),
                        (level + 1, level, level + 1),
                        (level, level + 1, level + 1),
                        (level, level, level),
                        (level, level, level + 1),
                    ];
                    let given = rat(level, k as i64);
                    for (pattern, expected) in patterns.iter().zip(table.probs()) {
                        let (r, u, d) = (
                            rat(pattern.0, k as i64),
                            rat(pattern.1, k as i64),
                            rat(pattern.2, k as i64),
                        );
                        let observed = joint.conditional_prob(
                            |vals| vals[1] == r && vals[2] == u && vals[3] == d,
                            |vals| vals[0] == given,
                        );
                        assert_eq!(
                            observed, *expected,
                            "conditional k={k} ({i}, {j}) level {level} pattern {pattern:?}"
                        );
                    }
                }
            }
        }
    }
    report(6, "conditional tables and covariances", t0);
}

/// Criterion 7: translation invariance. The rectangle-mass law is identical
/// for every placement of every dimension pair, k in 2..=6, exactly.
#[test]
fn criterion_07_translation_invariance() {
    let t0 = Instant::now();
    for k in 2..=6u32 {
        let mesh = Mesh::new(k).unwrap();
        for width in 0..=k {
            for height in 0..=k {
                let reference = perm_field::pmf(k, GridPoint::new(width, height)).unwrap();
                for x0 in 0..=(k - width) {
                    for y0 in 0..=(k - height) {
                        let rect =
                            Rect::from_indices(mesh, x0, y0, x0 + width, y0 + height).unwrap();
                        assert_eq!(
                            enumerate_volume_law(k, &rect).unwrap(),
                            reference,
                            "k={k} dims {width}x{height} at ({x0}, {y0})"
                        );
                    }
                }
            }
        }
    }
    report(7, "translation invariance", t0);
}

/// Double-precision copula grid of a permutation, built from prefix counts.
fn perm_grid_f64(images: &[u32]) -> GridF64 {
    let k = images.len() as u32;
    let n = k as usize + 1;
    let mut values = vec![0.0f64; n * n];
    for i in 1..=k as usize {
        let hit = images[i - 1] as usize;
        for j in 0..n {
            values[i * n + j] = values[(i - 1) * n + j] + f64::from(j > hit) / k as f64;
        }
    }
    GridF64::from_values(k, values).unwrap()
}

/// Criterion 8: sampler fidelity at a million samples and fixed seeds, at
/// five mesh points (grid fields) and five off-mesh points (extended
/// fields), within 3 standard errors; plus the grid-vs-point KS test.
#[test]
fn criterion_08_sampler_fidelity() {
    let t0 = Instant::now();
    let k = 4u32;
    let n = 1_000_000u64;
    let seed = 80_001u64;
    let mesh_points = [
        GridPoint::new(1, 1),
        GridPoint::new(1, 2),
        GridPoint::new(2, 2),
        GridPoint::new(3, 1),
        GridPoint::new(2, 3),
    ];
    let off_points = [(1, 1), (1, 5), (3, 3), (5, 7), (7, 3)].map(|(a, b)| (rat(a, 8), rat(b, 8)));

    let mut stream = 0u64;
    let mut next_rng = || {
        stream += 1;
        SeededRng::with_stream(seed, stream)
    };
    let check = |claim: &str, analytic: f64, estimate: f64, se: f64| {
        assert!(
            (estimate - analytic).abs() <= 3.0 * se,
            "{claim}: {estimate} vs {analytic} (3 SE = {})",
            3.0 * se
        );
    };

    // permutation-field sampler
    for point in mesh_points {
        let mut rng = next_rng();
        let stats = oracle::mc_stats(n, || {
            let p = sample_permutation(&mut rng, k).unwrap();
            p.images()[..point.i as usize]
                .iter()
                .filter(|&&x| x < point.j)
                .count() as f64
                / k as f64
        })
        .unwrap();
        let mean = to_f64(&perm_field::mean(k, point).unwrap());
        let var = to_f64(&perm_field::variance(k, point).unwrap());
        check(
            &format!("perm mean at {point}"),
            mean,
            stats.mean,
            stats.se_mean,
        );
        check(
            &format!("perm variance at {point}"),
            var,
            stats.variance,
            stats.se_variance,
        );
    }

    // extended permutation field at off-mesh points
    for (u, v) in &off_points {
        let mut rng = next_rng();
        let (uf, vf) = (to_f64(u), to_f64(v));
        let stats = oracle::mc_stats(n, || {
            let p = sample_permutation(&mut rng, k).unwrap();
            checkerboard::eval_f64(&perm_grid_f64(p.images()), uf, vf).unwrap()
        })
        .unwrap();
        let mean = to_f64(&perm_field::extended_mean(k, u, v).unwrap());
        let var = to_f64(&perm_field::extended_variance(k, u, v).unwrap());
        check(
            &format!("extended perm mean at ({u}, {v})"),
            mean,
            stats.mean,
            stats.se_mean,
        );
        check(
            &format!("extended perm variance at ({u}, {v})"),
            var,
            stats.variance,
            stats.se_variance,
        );
    }

    // mixture-field samplers: full grid and point-wise
    for point in mesh_points {
        let mut rng = next_rng();
        let stats = oracle::mc_stats(n, || {
            sample_mixture_grid(&mut rng, k)
                .unwrap()
                .value(point.i, point.j)
        })
        .unwrap();
        let mean = to_f64(&mixture_field::mean(k, point).unwrap());
        let var = to_f64(&mixture_field::variance(k, point).unwrap());
        check(
            &format!("mixture grid mean at {point}"),
            mean,
            stats.mean,
            stats.se_mean,
        );
        check(
            &format!("mixture grid variance at {point}"),
            var,
            stats.variance,
            stats.se_variance,
        );

        let mut rng = next_rng();
        let stats =
            oracle::mc_stats(n, || sample_mixture_value(&mut rng, k, point).unwrap()).unwrap();
        check(
            &format!("mixture value mean at {point}"),
            mean,
            stats.mean,
            stats.se_mean,
        );
        check(
            &format!("mixture value variance at {point}"),
            var,
            stats.variance,
            stats.se_variance,
        );
    }

    // extended mixture field at off-mesh points
    for (u, v) in &off_points {
        let mut rng = next_rng();
        let (uf, vf) = (to_f64(u), to_f64(v));
        let stats = oracle::mc_stats(n, || {
            let g = sample_mixture_grid(&mut rng, k).unwrap();
            checkerboard::eval_f64(&g, uf, vf).unwrap()
        })
        .unwrap();
        let mean = to_f64(&mixture_field::extended_mean(k, u, v).unwrap());
        let var = to_f64(&mixture_field::extended_variance(k, u, v).unwrap());
        check(
            &format!("extended mixture mean at ({u}, {v})"),
            mean,
            stats.mean,
            stats.se_mean,
        );
        check(
            &format!("extended mixture variance at ({u}, {v})"),
            var,
            stats.variance,
            stats.se_variance,
        );
    }

    // aggregation property end to end: grid vs point sampler in law
    let ks_n = 100_000usize;
    let center = GridPoint::new(2, 2);
    let mut rng_grid = next_rng();
    let mut rng_point = next_rng();
    let mut grid_values: Vec<f64> = (0..ks_n)
        .map(|_| sample_mixture_grid(&mut rng_grid, k).unwrap().value(2, 2))
        .collect();
    let mut point_values: Vec<f64> = (0..ks_n)
        .map(|_| sample_mixture_value(&mut rng_point, k, center).unwrap())
        .collect();
    let ks = oracle::ks_two_sample_test(&mut grid_values, &mut point_values, 0.01).unwrap();
    assert!(!ks.rejected, "KS grid vs point: {ks:?}");

    report(8, "sampler fidelity", t0);
}

/// Criterion 9: pair-generation round trip. A million pairs from a fixed
/// permutation copula at k=10 reproduce its grid within 0.005 in sup-norm,
/// and both marginals pass a KS uniformity test at the 1% level.
#[test]
fn criterion_09_pair_round_trip() {
    let t0 = Instant::now();
    let k = 10u32;
    let source = Permutation::from_one_based(&[3, 7, 2, 10, 5, 9, 1, 4, 6, 8])
        .unwrap()
        .to_copula();
    let mut rng = SeededRng::new(90_001);
    let n = 1_000_000usize;
    let pairs = sample_pairs(&mut rng, &source, n).unwrap();

    let mut us: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut vs: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    assert!(
        !oracle::ks_uniform_test(&mut us, 0.01).unwrap().rejected,
        "u marginal"
    );
    assert!(
        !oracle::ks_uniform_test(&mut vs, 0.01).unwrap().rejected,
        "v marginal"
    );

    let empirical = empirical_copula(&pairs, k).unwrap();
    assert!(empirical.validate().is_ok());
    let mut worst = 0.0f64;
    for i in 0..=k {
        for j in 0..=k {
            let delta = (to_f64(empirical.value(i, j)) - to_f64(source.value(i, j))).abs();
            worst = worst.max(delta);
        }
    }
    assert!(worst <= 0.005, "sup-norm {worst}");
    report(9, "pair round trip", t0);
}

/// Criterion 10: Birkhoff round trip. Fifty random mixtures across
/// k in 3..=8 decompose into at most (k-1)^2 + 1 terms whose weights sum to
/// one within 1e-12 and reconstruct the matrix within 1e-12 in sup-norm.
#[test]
fn criterion_10_birkhoff_round_trip() {
    let t0 = Instant::now();
    let mut rng = SeededRng::new(100_001);
    for trial in 0..50u32 {
        let k = 3 + trial % 6; // 3..=8
        let terms = 2 + trial as usize % (k as usize - 2).max(1); // 2..=k-1
        let weights = sample_uniform_simplex(&mut rng, terms).unwrap();
        let mut entries = vec![vec![0.0f64; k as usize]; k as usize];
        for &w in weights.weights() {
            let p = sample_permutation(&mut rng, k).unwrap();
            for m in 0..k {
                entries[m as usize][p.image(m) as usize] += w;
            }
        }

        let decomposition = birkhoff_decompose(&entries, 1e-12).unwrap();
        let bound = ((k - 1) * (k - 1) + 1) as usize;
        assert!(
            decomposition.len() <= bound,
            "trial {trial}: {} terms exceeds {bound}",
            decomposition.len()
        );
        let weight_sum: f64 = decomposition.iter().map(|(w, _)| w).sum();
        assert!(
            (weight_sum - 1.0).abs() <= 1e-12,
            "trial {trial}: weights sum {weight_sum}"
        );
        assert!(
            decomposition.iter().all(|(w, _)| *w > 0.0),
            "trial {trial}: weight signs"
        );

        let mut rebuilt = vec![vec![0.0f64; k as usize]; k as usize];
        for (w, p) in &decomposition {
            for m in 0..k {
                rebuilt[m as usize][p.image(m) as usize] += w;
            }
        }
        let mut worst = 0.0f64;
        for r in 0..k as usize {
            for c in 0..k as usize {
                worst = worst.max((rebuilt[r][c] - entries[r][c]).abs());
            }
        }
        assert!(
            worst <= 1e-12,
            "trial {trial}: reconstruction sup-norm {worst}"
        );
    }
    report(10, "birkhoff round trip", t0);
}
