//! Piecewise-bilinear (checkerboard) extension of a discrete copula to the
//! whole unit square.
//!
//! Two evaluation paths are provided: an exact rational path used by oracle
//! equality tests, and a double-precision path for sampling and export
//! throughput.

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::copula::{DiscreteCopula, GridF64};
use crate::error::{Error, Result};
use crate::rational::{rat_u, to_f64, Rat};

/// Cell-local coordinates of a point: `u = i/k + t/k` with `i = floor(uk)`
/// and `t` in `[0, 1)`; at `u = 1` the convention is `i = k`, `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalCoords {
    pub i: u32,
    pub j: u32,
    pub t: Rat,
    pub s: Rat,
}

/// Splits one axis coordinate into `(floor(x * k), frac(x * k))`.
pub(crate) fn split_axis(k: u32, x: &Rat) -> Result<(u32, Rat)> {
    if x.is_negative() || *x > Rat::one() {
        return Err(Error::OutsideUnitSquare {
            u: x.to_string(),
            v: x.to_string(),
        });
    }
    let scaled = x * rat_u(k as u64);
    let i = scaled
        .floor()
        .to_integer()
        .to_u32()
        .expect("floor(x * k) lies in 0..=k");
    let frac = &scaled - Rat::from_integer(i.into());
    Ok((i, frac))
}

/// Local coordinates of `(u, v)` on the mesh of resolution `k`.
pub fn local_coords(k: u32, u: &Rat, v: &Rat) -> Result<LocalCoords> {
    let unit = Rat::one();
    if u.is_negative() || v.is_negative() || *u > unit || *v > unit {
        return Err(Error::OutsideUnitSquare {
            u: u.to_string(),
            v: v.to_string(),
        });
    }
    let (i, t) = split_axis(k, u)?;
    let (j, s) = split_axis(k, v)?;
    Ok(LocalCoords { i, j, t, s })
}

/// Exact checkerboard evaluation: bilinear blend of the four grid values
/// around `(u, v)`. Agrees with the grid exactly on mesh points.
pub fn eval(c: &DiscreteCopula, u: &Rat, v: &Rat) -> Result<Rat> {
    let LocalCoords { i, j, t, s } = local_coords(c.k(), u, v)?;
    let one = Rat::one();
    let mut acc = (&one - &t) * (&one - &s) * c.value(i, j);
    if !t.is_zero() {
        acc += &t * (&one - &s) * c.value(i + 1, j);
    }
    if !s.is_zero() {
        acc += (&one - &t) * &s * c.value(i, j + 1);
    }
    if !t.is_zero() && !s.is_zero() {
        acc += &t * &s * c.value(i + 1, j + 1);
    }
    Ok(acc)
}

/// Double-precision checkerboard evaluation on a float grid.
pub fn eval_f64(g: &GridF64, u: f64, v: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) || !(0.0..=1.0).contains(&v) {
        return Err(Error::OutsideUnitSquare {
            u: u.to_string(),
            v: v.to_string(),
        });
    }
    let k = g.k();
    let (i, t) = split_axis_f64(k, u);
    let (j, s) = split_axis_f64(k, v);
    let mut acc = (1.0 - t) * (1.0 - s) * g.value(i, j);
    if t > 0.0 {
        acc += t * (1.0 - s) * g.value(i + 1, j);
    }
    if s > 0.0 {
        acc += (1.0 - t) * s * g.value(i, j + 1);
    }
    if t > 0.0 && s > 0.0 {
        acc += t * s * g.value(i + 1, j + 1);
    }
    Ok(acc)
}

fn split_axis_f64(k: u32, x: f64) -> (u32, f64) {
    let scaled = x * k as f64;
    let idx = (scaled.floor() as u32).min(k);
    (idx, scaled - idx as f64)
}

/// Checkerboard density at `(u, v)`: `k^2` times the mass of the containing
/// cell. Cells are half-open `[i/k, (i+1)/k)`, so a point exactly on an
/// interior edge resolves to the larger-index cell; the last cell closes
/// at 1.
pub fn density(c: &DiscreteCopula, u: f64, v: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) || !(0.0..=1.0).contains(&v) {
        return Err(Error::OutsideUnitSquare {
            u: u.to_string(),
            v: v.to_string(),
        });
    }
    let k = c.k();
    let i = ((u * k as f64).floor() as u32).min(k - 1);
    let j = ((v * k as f64).floor() as u32).min(k - 1);
    Ok(to_f64(&density_cell(c, i, j)?))
}

/// Exact density on the interior of cell `(i, j)`: `k^2 * V_C(cell)`.
pub fn density_cell(c: &DiscreteCopula, i: u32, j: u32) -> Result<Rat> {
    let k = c.k() as u64;
    Ok(c.cell_volume(i, j)? * rat_u(k * k))
}
