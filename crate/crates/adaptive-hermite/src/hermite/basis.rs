//! Scaled Hermite functions and coefficient vectors.
//!
//! The 1D basis function of degree `k` with scaling `beta` is
//!
//! ```text
//! H_k(v)  = sqrt(beta) (2 pi)^(-1/4) He_k(beta v) / sqrt(k!)
//! HH_k(v) = H_k(v) exp(-beta^2 v^2 / 2)
//! ```
//!
//! with `He_k` the probabilists' Hermite polynomial, so that
//! `int HH_k H_l dv = delta_kl`. Both families obey the three-term recurrence
//! `P_{k+1} = (beta v P_k - sqrt(k) P_{k-1}) / sqrt(k + 1)`.
//! The 3D functions are tensor products, shifted by the centre `zeta`.

use super::multi_index::{term_count, IndexSet, MultiIndex};
use crate::error::{invalid, Error, Result};
use serde::{Deserialize, Serialize};

/// `(2 pi)^(-1/4)`.
pub(crate) const INV_FOURTH_ROOT_2PI: f64 = 0.631_618_777_746_065_9;

/// Truncation order, scaling factor and centre of an expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub order: u32,
    pub beta: f64,
    pub zeta: [f64; 3],
}

impl BasisSpec {
    pub fn new(order: u32, beta: f64, zeta: [f64; 3]) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return invalid(format!("scaling factor must be positive and finite, got {beta}"));
        }
        if zeta.iter().any(|z| !z.is_finite()) {
            return invalid("centre must be finite");
        }
        Ok(BasisSpec { order, beta, zeta })
    }

    pub fn term_count(&self) -> usize {
        term_count(self.order)
    }

    pub fn with_order(&self, order: u32) -> Self {
        BasisSpec { order, ..*self }
    }

    pub fn with_beta(&self, beta: f64) -> Self {
        BasisSpec { beta, ..*self }
    }
}

/// Coefficients of one distribution in a given basis, in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffVector {
    spec: BasisSpec,
    data: Vec<f64>,
}

impl CoeffVector {
    pub fn zeros(spec: BasisSpec) -> Self {
        CoeffVector { spec, data: vec![0.0; spec.term_count()] }
    }

    pub fn from_vec(spec: BasisSpec, data: Vec<f64>) -> Result<Self> {
        if data.len() != spec.term_count() {
            return invalid(format!(
                "coefficient length {} does not match order {} ({} terms)",
                data.len(),
                spec.order,
                spec.term_count()
            ));
        }
        Ok(CoeffVector { spec, data })
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Coefficient of multi-index `k`, zero if `k` is above the order.
    pub fn get(&self, k: MultiIndex) -> f64 {
        IndexSet::new(self.spec.order)
            .position(k)
            .map_or(0.0, |r| self.data[r])
    }

    /// Changes the order by truncating or zero-padding the coefficient list.
    pub fn resized(&self, order: u32) -> Self {
        let mut data = self.data.clone();
        data.resize(term_count(order), 0.0);
        CoeffVector { spec: self.spec.with_order(order), data }
    }
}

/// Writes the weighted basis values `HH_0 .. HH_n` at `v` into `out`.
pub fn eval_basis_1d_into(beta: f64, v: f64, out: &mut [f64]) {
    let x = beta * v;
    fill_recurrence(x, beta.sqrt() * INV_FOURTH_ROOT_2PI * (-0.5 * x * x).exp(), out);
}

/// Weighted basis values `HH_0 .. HH_n` at `v`.
pub fn eval_basis_1d(n: u32, beta: f64, v: f64) -> Vec<f64> {
    let mut out = vec![0.0; n as usize + 1];
    eval_basis_1d_into(beta, v, &mut out);
    out
}

/// Writes the polynomial parts `H_0 .. H_n` at `v` into `out` without checks.
pub(crate) fn eval_poly_1d_into(beta: f64, v: f64, out: &mut [f64]) {
    fill_recurrence(beta * v, beta.sqrt() * INV_FOURTH_ROOT_2PI, out);
}

/// Polynomial parts `H_0 .. H_n` at `v`.
///
/// Fails with [`Error::Overflow`] instead of returning non-finite values,
/// which happens only for `|beta v|` far outside the range where the
/// expansion is meaningful.
pub fn eval_poly_1d(n: u32, beta: f64, v: f64) -> Result<Vec<f64>> {
    let mut out = vec![0.0; n as usize + 1];
    eval_poly_1d_into(beta, v, &mut out);
    if let Some(k) = out.iter().position(|x| !x.is_finite()) {
        return Err(Error::Overflow(format!(
            "Hermite polynomial of degree {k} at beta*v = {}",
            beta * v
        )));
    }
    Ok(out)
}

fn fill_recurrence(x: f64, first: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = first;
    if out.len() > 1 {
        out[1] = x * first;
    }
    for k in 1..out.len().saturating_sub(1) {
        let kf = k as f64;
        out[k + 1] = (x * out[k] - kf.sqrt() * out[k - 1]) / (kf + 1.0).sqrt();
    }
}

/// Evaluates the expansion at velocity `v`.
pub fn eval_f(coeffs: &CoeffVector, v: [f64; 3]) -> f64 {
    let spec = coeffs.spec();
    let n = spec.order as usize;
    let mut tab = [vec![0.0; n + 1], vec![0.0; n + 1], vec![0.0; n + 1]];
    for d in 0..3 {
        eval_basis_1d_into(spec.beta, v[d] - spec.zeta[d], &mut tab[d]);
    }
    let set = IndexSet::new(spec.order);
    set.indices()
        .iter()
        .zip(coeffs.as_slice())
        .map(|(k, c)| c * tab[0][k[0] as usize] * tab[1][k[1] as usize] * tab[2][k[2] as usize])
        .sum()
}

/// Largest eigenvalue magnitude of the symmetric tridiagonal matrix with zero
/// diagonal and off-diagonal entries `sqrt(k + 1) / beta`, `k = 0 .. n - 1`.
///
/// This is the fastest signal speed of the truncated advection operator along
/// one axis; the centre component must be added by the caller. It equals the
/// largest root of `He_{n+1}` divided by `beta`.
pub fn advection_speed(n: u32, beta: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let rule = super::quadrature::gauss_hermite(n as usize + 1)
        .expect("Gauss-Hermite rule of moderate size");
    let xmax = rule.nodes.last().copied().unwrap_or(0.0);
    // nodes are for the weight exp(-x^2); He roots are sqrt(2) times larger
    xmax * std::f64::consts::SQRT_2 / beta
}
