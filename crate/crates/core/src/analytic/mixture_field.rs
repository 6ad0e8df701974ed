//! Closed forms for the mixture field: the value of a Dirichlet-uniform
//! convex combination of all permutation copulas.
//!
//! Every second moment of the mixture field is the permutation-field
//! counterpart divided by `k! + 1`; the divisor is carried as an exact big
//! integer. The distribution itself is served through the aggregation of the
//! uniform simplex weights onto the value levels, which turns the `k!`-point
//! simplex into a small Dirichlet whose parameters are the permutation
//! counts.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::copula::{GridPoint, Mesh};
use crate::error::{Error, Result};
use crate::rational::{rat_u, to_f64, Rat};
use crate::sampling::{sample_dirichlet, SeededRng};

use super::counts::{factorial, factorial_table, support_range, value_count_with};
use super::perm_field::{self, Direction};

fn mixture_divisor(k: u32) -> Rat {
    Rat::from_integer(factorial(k) + BigInt::one())
}

/// `E = uv`, identical to the permutation field.
pub fn mean(k: u32, point: GridPoint) -> Result<Rat> {
    perm_field::mean(k, point)
}

/// `V = uv(1-u)(1-v) / ((k!+1)(k-1))`.
pub fn variance(k: u32, point: GridPoint) -> Result<Rat> {
    Ok(perm_field::variance(k, point)? / mixture_divisor(k))
}

pub fn mean_at(k: u32, u: &Rat, v: &Rat) -> Result<Rat> {
    perm_field::mean_at(k, u, v)
}

pub fn variance_at(k: u32, u: &Rat, v: &Rat) -> Result<Rat> {
    Ok(perm_field::variance_at(k, u, v)? / mixture_divisor(k))
}

/// Neighbor covariance: the permutation-field covariance over `k! + 1`.
pub fn cov_adjacent(k: u32, i: u32, j: u32, direction: Direction) -> Result<Rat> {
    Ok(perm_field::cov_adjacent(k, i, j, direction)? / mixture_divisor(k))
}

/// `E = uv` for the checkerboard-extended mixture field.
pub fn extended_mean(k: u32, u: &Rat, v: &Rat) -> Result<Rat> {
    perm_field::extended_mean(k, u, v)
}

/// Extended-field variance: the permutation counterpart over `k! + 1`.
pub fn extended_variance(k: u32, u: &Rat, v: &Rat) -> Result<Rat> {
    Ok(perm_field::extended_variance(k, u, v)? / mixture_divisor(k))
}

/// The aggregated Dirichlet description of the mixture-field value at a mesh
/// point: summing the uniform simplex weights over each value level yields
/// `Dir(n_0, ..., n_m)` with `n_l` the permutation counts, so the value is
/// `offset + sum(l * gamma_l) / k` with `offset = max{0, u + v - 1}`.
#[derive(Debug, Clone)]
pub struct AggregatedDirichlet {
    k: u32,
    point: GridPoint,
    params: Vec<BigInt>,
    offset: Rat,
}

impl AggregatedDirichlet {
    pub fn new(k: u32, point: GridPoint) -> Result<Self> {
        let mesh = Mesh::new(k)?;
        if !mesh.contains(point) {
            return Err(Error::PointOutOfRange {
                k,
                i: point.i,
                j: point.j,
            });
        }
        let table = factorial_table(k);
        let (lo, hi) = support_range(k, point.i, point.j);
        let params: Vec<BigInt> = (lo..=hi)
            .map(|l| value_count_with(&table, k, point.i, point.j, l))
            .collect();
        debug_assert_eq!(params.iter().sum::<BigInt>(), table[k as usize]);
        let offset = Rat::new(lo.into(), k.into());
        Ok(AggregatedDirichlet {
            k,
            point,
            params,
            offset,
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn point(&self) -> GridPoint {
        self.point
    }

    /// The exact Dirichlet parameters, summing to `k!`.
    pub fn params(&self) -> &[BigInt] {
        &self.params
    }

    /// Lower edge of the value support, `max{0, u + v - 1}`.
    pub fn offset(&self) -> &Rat {
        &self.offset
    }

    /// Upper edge of the value support, `min{u, v}`.
    pub fn upper(&self) -> Rat {
        Rat::new(self.point.i.min(self.point.j).into(), self.k.into())
    }

    /// True when the value is deterministic (single-atom support).
    pub fn is_degenerate(&self) -> bool {
        self.params.len() == 1
    }

    /// Parameters as double-precision Gamma shapes. Counts above 2^53 lose
    /// precision here; the sampling error this introduces is far below the
    /// Monte-Carlo error at any reachable sample size.
    pub fn shapes_f64(&self) -> Vec<f64> {
        self.params
            .iter()
            .map(|p| p.to_f64().unwrap_or(f64::MAX))
            .collect()
    }

    /// Exact mean of the value, via the Dirichlet mean vector. Equals `uv`.
    pub fn mean_value(&self) -> Rat {
        let total = Rat::from_integer(self.params.iter().sum::<BigInt>());
        let k_rat = rat_u(self.k as u64);
        let mut acc = self.offset.clone();
        for (idx, p) in self.params.iter().enumerate() {
            acc += Rat::from_integer(BigInt::from(idx)) / &k_rat * Rat::from_integer(p.clone())
                / &total;
        }
        acc
    }

    /// Exact variance of the value, by expanding the quadratic form over the
    /// Dirichlet covariance matrix. This is an independent route to the
    /// mixture-field variance and must equal [`variance`] exactly.
    pub fn value_variance(&self) -> Rat {
        let a0 = self.params.iter().sum::<BigInt>();
        let a0_rat = Rat::from_integer(a0.clone());
        let scale = &a0_rat * &a0_rat * Rat::from_integer(&a0 + BigInt::one());
        let k_rat = rat_u(self.k as u64);
        let mut acc = Rat::zero();
        for (i, ai) in self.params.iter().enumerate() {
            let ci = Rat::from_integer(BigInt::from(i)) / &k_rat;
            for (j, aj) in self.params.iter().enumerate() {
                let cj = Rat::from_integer(BigInt::from(j)) / &k_rat;
                let cov = if i == j {
                    Rat::from_integer(ai * (&a0 - ai)) / &scale
                } else {
                    -Rat::from_integer(ai * aj) / &scale
                };
                acc += &ci * cj * cov;
            }
        }
        acc
    }
}

/// A Monte-Carlo CDF estimate with its binomial standard error. Exact
/// endpoint cases carry `samples = 0` and zero standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl CdfEstimate {
    fn exact(value: f64) -> Self {
        CdfEstimate {
            estimate: value,
            std_error: 0.0,
            samples: 0,
        }
    }
}

/// Default Monte-Carlo sample count for [`cdf`]: about half a millisecond
/// of sampling per evaluation and a standard error near 5e-4.
pub const DEFAULT_CDF_SAMPLES: u64 = 1_000_000;

/// Monte-Carlo estimate of `P[value <= w]` for the mixture field at a mesh
/// point, by sampling the aggregated Dirichlet weights and testing the
/// linear statistic. Outside the support the result is an exact 0/1 step
/// and no samples are drawn.
pub fn cdf(
    k: u32,
    point: GridPoint,
    w: f64,
    n_samples: u64,
    rng: &mut SeededRng,
) -> Result<CdfEstimate> {
    let agg = AggregatedDirichlet::new(k, point)?;
    let lower = to_f64(agg.offset());
    let upper = to_f64(&agg.upper());
    if w < lower {
        return Ok(CdfEstimate::exact(0.0));
    }
    if w >= upper || agg.is_degenerate() {
        return Ok(CdfEstimate::exact(1.0));
    }
    if n_samples == 0 {
        return Err(Error::InvalidParameter {
            name: "n_samples",
            requirement: "at least 1",
            value: "0".into(),
        });
    }
    let shapes = agg.shapes_f64();
    // P[value <= w] = P[sum(l * gamma_l) <= k*w - max{0, i+j-k}]
    let lo_level = 0i64.max(point.i as i64 + point.j as i64 - k as i64) as f64;
    let threshold = k as f64 * w - lo_level;
    let mut hits = 0u64;
    for _ in 0..n_samples {
        let gamma = sample_dirichlet(rng, &shapes)?;
        let stat: f64 = gamma
            .weights()
            .iter()
            .enumerate()
            .map(|(l, g)| l as f64 * g)
            .sum();
        if stat <= threshold {
            hits += 1;
        }
    }
    let p = hits as f64 / n_samples as f64;
    let se = (p * (1.0 - p) / n_samples as f64).sqrt();
    Ok(CdfEstimate {
        estimate: p,
        std_error: se,
        samples: n_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn variance_is_perm_variance_over_divisor() {
        // k=4 central point: 1/48 over 25.
        assert_eq!(variance(4, GridPoint::new(2, 2)).unwrap(), rat(1, 1200));
        assert_eq!(mean(4, GridPoint::new(2, 2)).unwrap(), rat(1, 4));
        // marginal constraint pins the boundary
        assert_eq!(variance(5, GridPoint::new(5, 3)).unwrap(), rat(0, 1));
    }

    #[test]
    fn extended_variance_two_permutations() {
        assert_eq!(
            extended_variance(2, &rat(1, 4), &rat(1, 4)).unwrap(),
            rat(1, 768)
        );
    }

    #[test]
    fn second_moments_scale_by_factorial_plus_one() {
        use crate::analytic::factorial;
        use num_traits::One;
        for k in 2..=5u32 {
            let divisor = Rat::from_integer(factorial(k) + BigInt::one());
            for i in 0..=k {
                for j in 0..=k {
                    let point = GridPoint::new(i, j);
                    assert_eq!(
                        variance(k, point).unwrap() * &divisor,
                        super::super::perm_field::variance(k, point).unwrap()
                    );
                }
            }
            for i in 0..k {
                for j in 0..k {
                    for dir in Direction::ALL {
                        assert_eq!(
                            cov_adjacent(k, i, j, dir).unwrap() * &divisor,
                            super::super::perm_field::cov_adjacent(k, i, j, dir).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn aggregated_params_for_k4_center() {
        let agg = AggregatedDirichlet::new(4, GridPoint::new(2, 2)).unwrap();
        let expect: Vec<BigInt> = [4, 16, 4].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(agg.params(), expect.as_slice());
        assert_eq!(*agg.offset(), rat(0, 1));
        assert_eq!(agg.upper(), rat(1, 2));
    }

    #[test]
    fn aggregated_offset_above_antidiagonal() {
        let agg = AggregatedDirichlet::new(4, GridPoint::new(3, 3)).unwrap();
        assert_eq!(*agg.offset(), rat(1, 2)); // max{0, 3/4 + 3/4 - 1}
    }

    #[test]
    fn dirichlet_route_matches_closed_form_exactly() {
        for k in 2..=6u32 {
            for i in 0..=k {
                for j in 0..=k {
                    let point = GridPoint::new(i, j);
                    let agg = AggregatedDirichlet::new(k, point).unwrap();
                    assert_eq!(
                        agg.mean_value(),
                        mean(k, point).unwrap(),
                        "mean k={k} {point}"
                    );
                    assert_eq!(
                        agg.value_variance(),
                        variance(k, point).unwrap(),
                        "variance k={k} {point}"
                    );
                }
            }
        }
    }

    #[test]
    fn cdf_exact_steps() {
        let mut rng = SeededRng::new(1);
        let at = |w: f64, rng: &mut SeededRng| cdf(4, GridPoint::new(2, 2), w, 10, rng).unwrap();
        assert_eq!(at(-0.001, &mut rng), CdfEstimate::exact(0.0));
        assert_eq!(at(0.5, &mut rng), CdfEstimate::exact(1.0));
        assert_eq!(at(0.9, &mut rng), CdfEstimate::exact(1.0));
        // boundary point: deterministic value, exact step without sampling
        let step = cdf(4, GridPoint::new(4, 1), 0.25, 10, &mut rng).unwrap();
        assert_eq!(step, CdfEstimate::exact(1.0));
        let step = cdf(4, GridPoint::new(4, 1), 0.2, 10, &mut rng).unwrap();
        assert_eq!(step, CdfEstimate::exact(0.0));
    }

    #[test]
    fn cdf_midpoint_is_near_half() {
        let mut rng = SeededRng::new(42);
        let est = cdf(4, GridPoint::new(2, 2), 0.25, 200_000, &mut rng).unwrap();
        assert!(est.samples == 200_000);
        assert!((est.estimate - 0.5).abs() <= 3.0 * est.std_error, "{est:?}");
    }

    #[test]
    fn cdf_rejects_zero_samples_inside_support() {
        let mut rng = SeededRng::new(3);
        assert!(cdf(4, GridPoint::new(2, 2), 0.25, 0, &mut rng).is_err());
    }
}
