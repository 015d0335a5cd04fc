//! Lebesgue, Sobolev and localized norms by grid quadrature.

use super::field::ComplexField;
use crate::error::{Error, Result};

fn check_exponent(r: f64) -> Result<()> {
    if r.is_nan() || r < 1.0 {
        return Err(Error::Domain(format!("L^r exponent must be >= 1, got {r}")));
    }
    Ok(())
}

/// `(Σ|u|^r Πh)^{1/r}`, or `max|u|` for `r = ∞`.
pub fn lp_norm(field: &ComplexField, r: f64) -> Result<f64> {
    check_exponent(r)?;
    field.require_physical("lp_norm")?;
    let values = field.values();
    if r.is_infinite() {
        return Ok(values.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let sum: f64 = if r == 2.0 {
        values.iter().map(|v| v.norm_sqr()).sum()
    } else {
        values.iter().map(|v| v.norm_sqr().powf(0.5 * r)).sum()
    };
    let integral = sum * field.grid().cell_volume();
    Ok(if r == 2.0 {
        integral.sqrt()
    } else {
        integral.powf(1.0 / r)
    })
}

/// `∫|u|^r` by grid quadrature (the `r`-th power of [`lp_norm`] without the root).
pub fn lp_integral(field: &ComplexField, r: f64) -> Result<f64> {
    check_exponent(r)?;
    if r.is_infinite() {
        return Err(Error::Domain("lp_integral needs a finite exponent".into()));
    }
    field.require_physical("lp_integral")?;
    let sum: f64 = field
        .values()
        .iter()
        .map(|v| v.norm_sqr().powf(0.5 * r))
        .sum();
    Ok(sum * field.grid().cell_volume())
}

/// Spectral quadrature of `(1+|k|²)^s |û|²` (inhomogeneous) or `|k|^{2s}|û|²`
/// (homogeneous), square-rooted. In the homogeneous case the zero mode is
/// excluded unless `s = 0`.
pub fn sobolev_norm(field: &ComplexField, s: f64, homogeneous: bool) -> f64 {
    let spec = field.to_spectral();
    let ksq = field.grid().k_squared();
    let sum: f64 = spec
        .values()
        .iter()
        .zip(ksq)
        .map(|(c, &k2)| {
            let weight = if s == 0.0 {
                1.0
            } else if homogeneous {
                if k2 == 0.0 {
                    0.0
                } else if s == 1.0 {
                    k2
                } else {
                    k2.powf(s)
                }
            } else if s == 1.0 {
                1.0 + k2
            } else {
                (1.0 + k2).powf(s)
            };
            weight * c.norm_sqr()
        })
        .sum();
    (sum * field.grid().spectral_weight()).sqrt()
}

/// `‖u‖_r + Σ_d ‖∂_d u‖_r`.
pub fn w1p_norm(field: &ComplexField, r: f64) -> Result<f64> {
    check_exponent(r)?;
    let phys = field.to_physical();
    let mut total = lp_norm(&phys, r)?;
    for d in phys.spectral_gradient() {
        total += lp_norm(&d, r)?;
    }
    Ok(total)
}

/// Odd cell count closest to `edge / h`, clamped to `1..=n-1`.
pub(crate) fn odd_cell_count(edge: f64, h: f64, n: usize) -> usize {
    let cells = edge / h;
    let odd = 2.0 * ((cells - 1.0) / 2.0).round() + 1.0;
    let max_odd = if n % 2 == 0 { n - 1 } else { n };
    (odd.max(1.0) as usize).min(max_odd)
}

/// Periodic centered box-filter sums of `density` with the given odd window
/// width per axis, applied separably.
pub(crate) fn box_filter(
    density: &[f64],
    points: &[usize],
    widths: &[usize],
) -> Vec<f64> {
    let mut current = density.to_vec();
    let mut next = vec![0.0; density.len()];
    let mut line = Vec::new();
    for (axis, (&n, &w)) in points.iter().zip(widths).enumerate() {
        let stride: usize = points[axis + 1..].iter().product();
        let half = (w / 2) as isize;
        let block = n * stride;
        line.resize(n, 0.0);
        for base in (0..current.len()).step_by(block) {
            for s in 0..stride {
                for (i, l) in line.iter_mut().enumerate() {
                    *l = current[base + i * stride + s];
                }
                // Running window sum, recomputed once then slid.
                let mut acc: f64 = (-half..=half)
                    .map(|o| line[o.rem_euclid(n as isize) as usize])
                    .sum();
                for i in 0..n {
                    next[base + i * stride + s] = acc;
                    let leave = (i as isize - half).rem_euclid(n as isize) as usize;
                    let enter = (i as isize + half + 1).rem_euclid(n as isize) as usize;
                    acc += line[enter] - line[leave];
                }
            }
        }
        std::mem::swap(&mut current, &mut next);
    }
    current
}

/// Largest L² mass over grid-centered cubes of side `edge`, square-rooted.
///
/// The cube width is rounded to the nearest odd number of cells on each axis.
pub fn localized_l2_sup(field: &ComplexField, edge: f64) -> Result<f64> {
    let grid = field.grid();
    let min_len = grid.lengths().iter().cloned().fold(f64::INFINITY, f64::min);
    if !(edge > 0.0) || edge > min_len {
        return Err(Error::Domain(format!(
            "cube edge {edge} must be positive and at most the smallest box length {min_len}"
        )));
    }
    let density = field.to_physical().density()?;
    let widths: Vec<usize> = grid
        .spacing()
        .iter()
        .zip(grid.points())
        .map(|(&h, &n)| odd_cell_count(edge, h, n))
        .collect();
    let sums = box_filter(&density, grid.points(), &widths);
    let max = sums.iter().cloned().fold(0.0, f64::max);
    Ok((max * grid.cell_volume()).sqrt())
}

/// `(∫‖u(t)‖_r^q dt)^{1/q}` by the trapezoidal rule over the samples, or
/// `max_t ‖u(t)‖_r` for `q = ∞`.
pub fn mixed_spacetime_norm(samples: &[(f64, ComplexField)], q: f64, r: f64) -> Result<f64> {
    check_exponent(r)?;
    if q.is_nan() || q < 1.0 {
        return Err(Error::Domain(format!("time exponent must be >= 1, got {q}")));
    }
    if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::Usage("samples must be strictly increasing in time".into()));
    }
    let norms = samples
        .iter()
        .map(|(_, u)| lp_norm(&u.to_physical(), r))
        .collect::<Result<Vec<f64>>>()?;
    if q.is_infinite() {
        if norms.is_empty() {
            return Err(Error::Empty("no samples".into()));
        }
        return Ok(norms.into_iter().fold(0.0, f64::max));
    }
    if samples.len() < 2 {
        return Err(Error::Usage(
            "a finite time exponent needs at least two samples".into(),
        ));
    }
    let integral: f64 = samples
        .windows(2)
        .zip(norms.windows(2))
        .map(|(s, n)| 0.5 * (s[1].0 - s[0].0) * (n[0].powf(q) + n[1].powf(q)))
        .sum();
    Ok(integral.powf(1.0 / q))
}
