//! Frequency indicator: share of the highest degrees in the expansion.
//!
//! `F = sqrt(sum_{N - Nb < |k| <= N} f_k^2 / sum_{|k| <= N} f_k^2)` with
//! `Nb = max(floor(N / 3), 2)`; for a field the sums also run over all
//! collocation points.

use crate::error::{invalid, Error, Result};
use crate::hermite::{CoeffField, CoeffVector, IndexSet};

/// Number of top degrees monitored at order `n`.
pub fn tail_width(n: u32) -> u32 {
    (n / 3).max(2)
}

/// Sum of squared coefficients per total degree, over all points.
pub fn degree_energy(field: &CoeffField) -> Vec<f64> {
    let order = field.spec().order;
    let mut e = vec![0.0; order as usize + 1];
    let start: Vec<usize> = (0..=order + 1).map(IndexSet::degree_start).collect();
    for j in 0..field.points() {
        let c = field.point(j);
        for d in 0..=order as usize {
            e[d] += c[start[d]..start[d + 1]].iter().map(|x| x * x).sum::<f64>();
        }
    }
    e
}

/// Indicator of the expansion truncated at `order` given per-degree sums.
pub fn indicator_from_energy(energy: &[f64], order: u32) -> Result<f64> {
    if order as usize >= energy.len() {
        return invalid(format!("order {order} exceeds the available degrees"));
    }
    let total: f64 = energy[..=order as usize].iter().sum();
    if !(total > 0.0) {
        return Err(Error::Numeric("indicator undefined for an all-zero expansion".into()));
    }
    let lo = (order + 1).saturating_sub(tail_width(order)) as usize;
    let tail: f64 = energy[lo..=order as usize].iter().sum();
    Ok((tail / total).sqrt())
}

/// Indicator of a field (a single point gives the homogeneous indicator).
pub fn indicator(field: &CoeffField) -> Result<f64> {
    indicator_from_energy(&degree_energy(field), field.spec().order)
}

/// Indicator of one coefficient vector.
pub fn indicator_hom(coeffs: &CoeffVector) -> Result<f64> {
    indicator(&CoeffField::from_coeffs(coeffs))
}
