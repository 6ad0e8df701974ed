//! The `verify` command: re-derives closed forms by exhaustive enumeration
//! or Monte Carlo and reports agreement as machine-readable JSON.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, ValueEnum};
use serde::Serialize;

use copula_forge::analytic::{mixture_field, perm_field, AggregatedDirichlet, Direction, FieldLaw};
use copula_forge::checkerboard;
use copula_forge::copula::{GridPoint, Mesh, Rect};
use copula_forge::formats;
use copula_forge::oracle::{
    self, enumerate_joint_with, enumerate_pmf_with, enumerate_volume_law_with, EnumOpts, EvalPoint,
};
use copula_forge::rational::{rat, to_f64, Rat};
use copula_forge::sampling::{
    sample_mixture_grid, sample_mixture_value, sample_permutation, SeededRng,
};
use copula_forge::Error;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Value laws at every mesh point, exact equality.
    Pmf,
    /// Means and variances, both fields, exact equality.
    Moments,
    /// Adjacent covariances, exact equality.
    Cov,
    /// Conditional neighbor tables, exact equality.
    Cond,
    /// Checkerboard-extended laws and moments at off-mesh points.
    Hat,
    /// Translation invariance of rectangle-mass laws.
    Volume,
    /// Sampler fidelity: moments within 3 standard errors, plus a
    /// grid-vs-point KS test.
    Mc,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long)]
    k: u32,
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Monte-Carlo sample count (mc suite).
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// Allow k = 9 in enumeration suites.
    #[arg(long)]
    force: bool,
    /// Worker threads for enumeration; falls back to COPULA_FORGE_THREADS.
    #[arg(long)]
    threads: Option<usize>,
    /// Report file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Check {
    claim: String,
    analytic: String,
    oracle: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    equal: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    se: Option<f64>,
    pass: bool,
}

impl Check {
    fn exact(claim: String, analytic: String, oracle: String) -> Self {
        let pass = analytic == oracle;
        Check {
            claim,
            analytic,
            oracle,
            equal: Some(pass),
            delta: None,
            se: None,
            pass,
        }
    }

    fn exact_laws(claim: String, analytic: &FieldLaw, oracle: &FieldLaw) -> Self {
        Self::exact(
            claim,
            formats::law_to_json(analytic),
            formats::law_to_json(oracle),
        )
    }

    fn exact_rats(claim: String, analytic: &Rat, oracle: &Rat) -> Self {
        Self::exact(claim, analytic.to_string(), oracle.to_string())
    }

    fn statistical(claim: String, analytic: f64, estimate: f64, se: f64) -> Self {
        let delta = (estimate - analytic).abs();
        Check {
            claim,
            analytic: analytic.to_string(),
            oracle: estimate.to_string(),
            equal: None,
            delta: Some(delta),
            se: Some(se),
            pass: delta <= 3.0 * se,
        }
    }
}

#[derive(Serialize)]
struct Report {
    suite: &'static str,
    k: u32,
    seed: u64,
    samples: u64,
    threads: usize,
    pass: bool,
    checks: Vec<Check>,
}

fn resolve_threads(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("COPULA_FORGE_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(1)
    .max(1)
}

pub fn run(args: VerifyArgs) -> Result<ExitCode, Error> {
    let threads = resolve_threads(args.threads);
    let opts = EnumOpts {
        force: args.force,
        threads,
    };
    let (suite_name, checks) = match args.suite {
        Suite::Pmf => ("pmf", suite_pmf(args.k, &opts)?),
        Suite::Moments => ("moments", suite_moments(args.k, &opts)?),
        Suite::Cov => ("cov", suite_cov(args.k, &opts)?),
        Suite::Cond => ("cond", suite_cond(args.k, &opts)?),
        Suite::Hat => ("hat", suite_hat(args.k, &opts)?),
        Suite::Volume => ("volume", suite_volume(args.k, &opts)?),
        Suite::Mc => ("mc", suite_mc(args.k, args.seed, args.samples)?),
    };
    let pass = checks.iter().all(|c| c.pass);
    let report = Report {
        suite: suite_name,
        k: args.k,
        seed: args.seed,
        samples: args.samples,
        threads,
        pass,
        checks,
    };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    match &args.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn suite_pmf(k: u32, opts: &EnumOpts) -> Result<Vec<Check>, Error> {
    let mut checks = Vec::new();
    for i in 0..=k {
        for j in 0..=k {
            let point = GridPoint::new(i, j);
            let analytic = perm_field::pmf(k, point)?;
            let oracle = enumerate_pmf_with(k, point, opts)?;
            checks.push(Check::exact_laws(
                format!("law at ({i}, {j})"),
                &analytic,
                &oracle,
            ));
        }
    }
    Ok(checks)
}

fn suite_moments(k: u32, opts: &EnumOpts) -> Result<Vec<Check>, Error> {
    let mut checks = Vec::new();
    for i in 0..=k {
        for j in 0..=k {
            let point = GridPoint::new(i, j);
            let law = enumerate_pmf_with(k, point, opts)?;
            checks.push(Check::exact_rats(
                format!("mean at ({i}, {j})"),
                &perm_field::mean(k, point)?,
                &law.mean(),
            ));
            checks.push(Check::exact_rats(
                format!("variance at ({i}, {j})"),
                &perm_field::variance(k, point)?,
                &law.variance(),
            ));
            // The mixture-field variance against the independent
            // Dirichlet-moment route.
            let agg = AggregatedDirichlet::new(k, point)?;
            checks.push(Check::exact_rats(
                format!("mixture variance at ({i}, {j})"),
                &mixture_field::variance(k, point)?,
                &agg.value_variance(),
            ));
            checks.push(Check::exact_rats(
                format!("mixture mean at ({i}, {j})"),
                &mixture_field::mean(k, point)?,
                &agg.mean_value(),
            ));
        }
    }
    Ok(checks)
}

fn suite_cov(k: u32, opts: &EnumOpts) -> Result<Vec<Check>, Error> {
    let mut checks = Vec::new();
    for i in 0..k {
        for j in 0..k {
            for dir in Direction::ALL {
                let (a, b) = match dir {
                    Direction::Right => (GridPoint::new(i, j), GridPoint::new(i + 1, j)),
                    Direction::Up => (GridPoint::new(i, j), GridPoint::new(i, j + 1)),
                    Direction::Diagonal => (GridPoint::new(i, j), GridPoint::new(i + 1, j + 1)),
                    Direction::Antidiagonal => (GridPoint::new(i + 1, j), GridPoint::new(i, j + 1)),
                };
                let joint =
                    enumerate_joint_with(k, &[EvalPoint::Grid(a), EvalPoint::Grid(b)], opts)?;
                checks.push(Check::exact_rats(
                    format!("cov {dir:?} at ({i}, {j})"),
                    &perm_field::cov_adjacent(k, i, j, dir)?,
                    &joint.covariance(0, 1),
                ));
            }
        }
    }
    Ok(checks)
}

fn suite_cond(k: u32, opts: &EnumOpts) -> Result<Vec<Check>, Error> {
    let mut checks = Vec::new();
    let k_rat = |n: i64| rat(n, k as i64);
    for i in 0..k {
        for j in 0..k {
            let joint = enumerate_joint_with(
                k,
                &[
                    EvalPoint::Grid(GridPoint::new(i, j)),
                    EvalPoint::Grid(GridPoint::new(i + 1, j)),
                    EvalPoint::Grid(GridPoint::new(i, j + 1)),
                    EvalPoint::Grid(GridPoint::new(i + 1, j + 1)),
                ],
                opts,
            )?;
            let base = perm_field::pmf(k, GridPoint::new(i, j))?;
            for (value, _) in base.atoms() {
                let level = to_level(value, k);
                let table = perm_field::conditional_table(k, i, j, level)?;
                // neighbor value patterns for the five cases
                let patterns: [(i64, i64, i64); 5] = [
                    (level + 1, level + 1, level + 2),
                    (level + 1, level, level + 1),
                    (level, level + 1, level + 1),
                    (level, level, level),
                    (level, level, level + 1),
                ];
                for (case, (pattern, expected)) in patterns.iter().zip(table.probs()).enumerate() {
                    let (r, u, d) = (k_rat(pattern.0), k_rat(pattern.1), k_rat(pattern.2));
                    let given = k_rat(level);
                    let observed = joint.conditional_prob(
                        |v| v[1] == r && v[2] == u && v[3] == d,
                        |v| v[0] == given,
                    );
                    checks.push(Check::exact_rats(
                        format!("case {} at ({i}, {j}) level {level}", case + 1),
                        expected,
                        &observed,
                    ));
                }
            }
        }
    }
    Ok(checks)
}

/// 25 rational off-mesh points: a 5x5 lattice with denominator 7, never on
/// any mesh of resolution 2..=6.
fn hat_lattice() -> Vec<(Rat, Rat)> {
    let mut points = Vec::with_capacity(25);
    for a in 1..=5i64 {
        for b in 1..=5i64 {
            points.push((rat(a, 7), rat(b, 7)));
        }
    }
    points
}

fn suite_hat(k: u32, opts: &EnumOpts) -> Result<Vec<Check>, Error> {
    let mut checks = Vec::new();
    for (u, v) in hat_lattice() {
        let joint = enumerate_joint_with(
            k,
            &[EvalPoint::Checkerboard {
                u: u.clone(),
                v: v.clone(),
            }],
            opts,
        )?;
        let law = joint.marginal(0)?;
        let analytic = perm_field::extended_pmf(k, &u, &v)?;
        checks.push(Check::exact_laws(
            format!("extended law at ({u}, {v})"),
            &analytic,
            &law,
        ));
        checks.push(Check::exact_rats(
            format!("extended mean at ({u}, {v})"),
            &perm_field::extended_mean(k, &u, &v)?,
            &law.mean(),
        ));
        checks.push(Check::exact_rats(
            format!("extended variance at ({u}, {v})"),
            &perm_field::extended_variance(k, &u, &v)?,
            &law.variance(),
        ));
    }
    Ok(checks)
}

fn suite_volume(k: u32, opts: &EnumOpts) -> Result<Vec<Check>, Error> {
    let mesh = Mesh::new(k)?;
    let mut checks = Vec::new();
    for width in 0..=k {
        for height in 0..=k {
            let reference = perm_field::pmf(k, GridPoint::new(width, height))?;
            for x0 in 0..=(k - width) {
                for y0 in 0..=(k - height) {
                    let rect = Rect::from_indices(mesh, x0, y0, x0 + width, y0 + height)?;
                    let law = enumerate_volume_law_with(k, &rect, opts)?;
                    checks.push(Check::exact_laws(
                        format!("{width}x{height} mass law at ({x0}, {y0})"),
                        &reference,
                        &law,
                    ));
                }
            }
        }
    }
    Ok(checks)
}

fn prefix_value(images: &[u32], i: u32, j: u32) -> f64 {
    let count = images[..i as usize].iter().filter(|&&x| x < j).count();
    count as f64 / images.len() as f64
}

fn suite_mc(k: u32, seed: u64, samples: u64) -> Result<Vec<Check>, Error> {
    Mesh::new(k)?;
    let mut checks = Vec::new();
    let center = GridPoint::new(k / 2, k / 2);
    let off = GridPoint::new(1, k - 1);
    let mut stream = 0u64;
    let mut next_rng = || {
        stream += 1;
        SeededRng::with_stream(seed, stream)
    };

    // permutation-field sampler at two mesh points
    for point in [center, off] {
        let mut rng = next_rng();
        let stats = oracle::mc_stats(samples, || {
            let p = sample_permutation(&mut rng, k).unwrap();
            prefix_value(p.images(), point.i, point.j)
        })?;
        let mean = to_f64(&perm_field::mean(k, point)?);
        let var = to_f64(&perm_field::variance(k, point)?);
        checks.push(Check::statistical(
            format!("perm sampler mean at {point}"),
            mean,
            stats.mean,
            stats.se_mean,
        ));
        checks.push(Check::statistical(
            format!("perm sampler variance at {point}"),
            var,
            stats.variance,
            stats.se_variance,
        ));
    }

    // extended permutation field at an off-mesh point
    let (u, v) = ((2 * k - 1) as f64 / (2 * k) as f64, 1.0 / (2 * k) as f64);
    {
        let mut rng = next_rng();
        let stats = oracle::mc_stats(samples, || {
            let g = sample_permutation(&mut rng, k)
                .unwrap()
                .to_copula()
                .to_f64();
            checkerboard::eval_f64(&g, u, v).unwrap()
        })?;
        checks.push(Check::statistical(
            format!("extended perm sampler mean at ({u}, {v})"),
            perm_field::extended_mean_f64(k, u, v)?,
            stats.mean,
            stats.se_mean,
        ));
        checks.push(Check::statistical(
            format!("extended perm sampler variance at ({u}, {v})"),
            perm_field::extended_variance_f64(k, u, v)?,
            stats.variance,
            stats.se_variance,
        ));
    }

    // mixture-field samplers; the grid sampler is capped at k <= 8
    {
        let mut rng = next_rng();
        let stats = oracle::mc_stats(samples, || {
            sample_mixture_value(&mut rng, k, center).unwrap()
        })?;
        checks.push(Check::statistical(
            format!("mixture value sampler mean at {center}"),
            to_f64(&mixture_field::mean(k, center)?),
            stats.mean,
            stats.se_mean,
        ));
        checks.push(Check::statistical(
            format!("mixture value sampler variance at {center}"),
            to_f64(&mixture_field::variance(k, center)?),
            stats.variance,
            stats.se_variance,
        ));
    }
    if k <= copula_forge::sampling::MIXTURE_GRID_MAX_K {
        let mut rng = next_rng();
        let stats = oracle::mc_stats(samples, || {
            sample_mixture_grid(&mut rng, k)
                .unwrap()
                .value(center.i, center.j)
        })?;
        checks.push(Check::statistical(
            format!("mixture grid sampler mean at {center}"),
            to_f64(&mixture_field::mean(k, center)?),
            stats.mean,
            stats.se_mean,
        ));
        checks.push(Check::statistical(
            format!("mixture grid sampler variance at {center}"),
            to_f64(&mixture_field::variance(k, center)?),
            stats.variance,
            stats.se_variance,
        ));

        // extended mixture field at the off-mesh point
        let mut rng = next_rng();
        let stats = oracle::mc_stats(samples, || {
            let g = sample_mixture_grid(&mut rng, k).unwrap();
            checkerboard::eval_f64(&g, u, v).unwrap()
        })?;
        let u_rat = copula_forge::rational::from_f64_exact(u)?;
        let v_rat = copula_forge::rational::from_f64_exact(v)?;
        checks.push(Check::statistical(
            format!("extended mixture sampler mean at ({u}, {v})"),
            to_f64(&mixture_field::extended_mean(k, &u_rat, &v_rat)?),
            stats.mean,
            stats.se_mean,
        ));
        checks.push(Check::statistical(
            format!("extended mixture sampler variance at ({u}, {v})"),
            to_f64(&mixture_field::extended_variance(k, &u_rat, &v_rat)?),
            stats.variance,
            stats.se_variance,
        ));

        // the aggregation property end to end: grid and point samplers
        // agree in distribution
        let ks_n = samples.min(100_000) as usize;
        let mut rng_a = next_rng();
        let mut rng_b = next_rng();
        let mut grid_values: Vec<f64> = (0..ks_n)
            .map(|_| {
                sample_mixture_grid(&mut rng_a, k)
                    .unwrap()
                    .value(center.i, center.j)
            })
            .collect();
        let mut point_values: Vec<f64> = (0..ks_n)
            .map(|_| sample_mixture_value(&mut rng_b, k, center).unwrap())
            .collect();
        let ks = oracle::ks_two_sample_test(&mut grid_values, &mut point_values, 0.01)?;
        checks.push(Check {
            claim: format!("KS grid vs point sampler at {center} (n = {ks_n}, alpha = 0.01)"),
            analytic: format!("critical {:.6}", ks.critical),
            oracle: format!("statistic {:.6}", ks.statistic),
            equal: None,
            delta: Some(ks.statistic),
            se: Some(ks.critical / 3.0),
            pass: !ks.rejected,
        });
    }
    Ok(checks)
}

fn to_level(value: &Rat, k: u32) -> i64 {
    let scaled = value * rat(k as i64, 1);
    i64::try_from(scaled.to_integer()).expect("level fits i64")
}
