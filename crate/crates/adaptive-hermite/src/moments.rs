//! Macroscopic quantities, velocity moments and Maxwellian coefficients.
//!
//! Every 1D monomial moment of a Hermite function is a finite closed form,
//!
//! ```text
//! int w^p HH_k(w) dw = sqrt(beta) (2 pi)^(-1/4) beta^(-p-1) / sqrt(k!)
//!                      * sqrt(2 pi) p! / (j! 2^j),      p - k = 2 j >= 0,
//! ```
//!
//! and zero otherwise, so moments of an expansion are exact linear
//! combinations of a handful of coefficients.

use crate::error::{invalid, Error, Result};
use crate::hermite::{degree, BasisSpec, CoeffVector, IndexSet, MultiIndex, INV_FOURTH_ROOT_2PI};
use serde::{Deserialize, Serialize};

/// Density, velocity, temperature, deviatoric stress and heat flux.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacroState {
    pub rho: f64,
    pub u: [f64; 3],
    pub theta: f64,
    pub sigma: [[f64; 3]; 3],
    pub q: [f64; 3],
}

/// `int w^p HH_k(w) dw` for the basis with scaling `beta`.
pub fn monomial_moment_1d(p: u32, k: u32, beta: f64) -> f64 {
    if k > p || (p - k) % 2 == 1 {
        return 0.0;
    }
    let j = (p - k) / 2;
    let mut ratio = 1.0; // p! / (j! 2^j sqrt(k!))
    for m in (k + 1)..=p {
        ratio *= m as f64;
    }
    for m in 1..=j {
        ratio /= 2.0 * m as f64;
    }
    for m in 1..=k {
        ratio *= (m as f64).sqrt();
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    beta.sqrt() * INV_FOURTH_ROOT_2PI * beta.powi(-(p as i32) - 1) * two_pi.sqrt() * ratio
}

/// `int (v - c)^p HH_k(v - zeta) dv` for `p = 0 ..= pmax`, `k = 0 ..= pmax`,
/// indexed `[p][k]`.
fn shifted_table(pmax: u32, beta: f64, offset: f64) -> Vec<Vec<f64>> {
    // (v - c)^p = sum_r C(p, r) w^r (zeta - c)^(p - r),  w = v - zeta
    let n = pmax as usize + 1;
    let base: Vec<Vec<f64>> = (0..n)
        .map(|r| (0..n).map(|k| monomial_moment_1d(r as u32, k as u32, beta)).collect())
        .collect();
    let mut out = vec![vec![0.0; n]; n];
    for p in 0..n {
        let mut binom = 1.0;
        for r in 0..=p {
            let pw = offset.powi((p - r) as i32);
            for k in 0..n {
                out[p][k] += binom * pw * base[r][k];
            }
            binom = binom * (p - r) as f64 / (r + 1) as f64;
        }
    }
    out
}

/// Linear functional `f -> int prod_d (v_d - c_d)^{a_d} f dv` as a sparse list
/// of `(rank, weight)` pairs over the coefficients of `spec`.
pub fn moment_weights(spec: &BasisSpec, a: MultiIndex, center: [f64; 3]) -> Vec<(usize, f64)> {
    let pmax = a.iter().copied().max().unwrap_or(0);
    let tabs: Vec<_> = (0..3)
        .map(|d| shifted_table(pmax, spec.beta, spec.zeta[d] - center[d]))
        .collect();
    let set = IndexSet::new(spec.order.min(degree(a)));
    set.indices()
        .iter()
        .enumerate()
        .filter(|(_, k)| (0..3).all(|d| k[d] <= a[d]))
        .map(|(r, k)| {
            let w: f64 = (0..3).map(|d| tabs[d][a[d] as usize][k[d] as usize]).product();
            (r, w)
        })
        .filter(|(_, w)| *w != 0.0)
        .collect()
}

/// Moment of arbitrary degree about `center`.
pub fn moment_about(coeffs: &CoeffVector, a: MultiIndex, center: [f64; 3]) -> f64 {
    let c = coeffs.as_slice();
    moment_weights(coeffs.spec(), a, center).iter().map(|&(r, w)| w * c[r]).sum()
}

/// `int v^a f dv` for `|a| <= 3`.
pub fn raw_moment(coeffs: &CoeffVector, a: MultiIndex) -> Result<f64> {
    if degree(a) > 3 {
        return invalid(format!("raw moments are supported up to degree 3, got {a:?}"));
    }
    Ok(moment_about(coeffs, a, [0.0; 3]))
}

/// Density, velocity and temperature only.
pub fn density_velocity_temperature(coeffs: &CoeffVector) -> Result<(f64, [f64; 3], f64)> {
    let spec = coeffs.spec();
    let c = coeffs.as_slice();
    let f0 = c[0];
    if f0 == 0.0 || !f0.is_finite() {
        return Err(Error::Numeric(format!("degenerate density coefficient {f0}")));
    }
    let beta = spec.beta;
    let rho = (2.0 * std::f64::consts::PI).powf(0.75) * f0 / beta.powf(1.5);
    let get = |k: MultiIndex| coeffs.get(k);
    let mut u = [0.0; 3];
    let mut theta = 0.0;
    for i in 0..3 {
        let mut e = [0u32; 3];
        e[i] = 1;
        let du = get(e) / (beta * f0);
        u[i] = spec.zeta[i] + du;
        e[i] = 2;
        theta += (std::f64::consts::SQRT_2 * get(e) / f0 + 1.0) / (beta * beta) - du * du;
    }
    let _ = c;
    Ok((rho, u, theta / 3.0))
}

/// All macroscopic quantities of an expansion.
pub fn macro_from_coeffs(coeffs: &CoeffVector) -> Result<MacroState> {
    let (rho, u, theta) = density_velocity_temperature(coeffs)?;
    let m = |a: MultiIndex| moment_about(coeffs, a, u);
    let mut sigma = [[0.0; 3]; 3];
    let mut q = [0.0; 3];
    let mut trace = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let mut a = [0u32; 3];
            a[i] += 1;
            a[j] += 1;
            sigma[i][j] = m(a);
        }
        trace += sigma[i][i];
    }
    for (i, row) in sigma.iter_mut().enumerate() {
        row[i] -= trace / 3.0;
    }
    for i in 0..3 {
        for d in 0..3 {
            let mut a = [0u32; 3];
            a[i] += 1;
            a[d] += 2;
            q[i] += 0.5 * m(a);
        }
    }
    Ok(MacroState { rho, u, theta, sigma, q })
}

/// 1D coefficients `int N(u, theta)(v) H_k(v - zeta) dv`, `k = 0 ..= n`, of a
/// unit-mass Gaussian.
///
/// With `a = beta (u - zeta)` and `s = beta^2 theta` the normalised
/// expectations `n_k = E[He_k(X)] / sqrt(k!)`, `X ~ N(a, s)`, satisfy
/// `n_{k+1} = (a n_k + sqrt(k) (s - 1) n_{k-1}) / sqrt(k + 1)`.
pub fn gaussian_coeffs_1d(n: u32, beta: f64, offset: f64, theta: f64) -> Vec<f64> {
    let a = beta * offset;
    let s1 = beta * beta * theta - 1.0;
    let mut out = vec![0.0; n as usize + 1];
    out[0] = 1.0;
    if n >= 1 {
        out[1] = a;
    }
    for k in 1..n as usize {
        let kf = k as f64;
        out[k + 1] = (a * out[k] + kf.sqrt() * s1 * out[k - 1]) / (kf + 1.0).sqrt();
    }
    let c = beta.sqrt() * INV_FOURTH_ROOT_2PI;
    out.iter_mut().for_each(|x| *x *= c);
    out
}

/// Hermite coefficients of the Maxwellian with density `rho`, velocity `u`
/// and temperature `theta` in the basis `spec`.
pub fn maxwellian_coeffs(rho: f64, u: [f64; 3], theta: f64, spec: &BasisSpec) -> Result<CoeffVector> {
    if !(rho > 0.0 && rho.is_finite()) || !(theta > 0.0 && theta.is_finite()) {
        return invalid(format!("Maxwellian needs positive density and temperature (rho = {rho}, theta = {theta})"));
    }
    let ratio = spec.beta * spec.beta * theta;
    if ratio >= 2.0 {
        log::warn!(
            "beta^2 theta = {ratio:.3} >= 2: the Hermite expansion of this Maxwellian does not converge"
        );
    }
    let mut out = CoeffVector::zeros(*spec);
    add_maxwellian(rho, u, theta, out.as_mut_slice(), spec);
    Ok(out)
}

/// Adds the Maxwellian coefficients to `out` without validation or warnings.
pub(crate) fn add_maxwellian(rho: f64, u: [f64; 3], theta: f64, out: &mut [f64], spec: &BasisSpec) {
    add_maxwellian_range(rho, u, theta, out, spec, 0);
}

/// Like [`add_maxwellian`] but only for ranks `start ..`.
pub(crate) fn add_maxwellian_range(
    rho: f64,
    u: [f64; 3],
    theta: f64,
    out: &mut [f64],
    spec: &BasisSpec,
    start: usize,
) {
    let tabs: Vec<Vec<f64>> = (0..3)
        .map(|d| gaussian_coeffs_1d(spec.order, spec.beta, u[d] - spec.zeta[d], theta))
        .collect();
    let set = IndexSet::new(spec.order);
    for (o, k) in out.iter_mut().zip(set.indices()).skip(start) {
        *o += rho * tabs[0][k[0] as usize] * tabs[1][k[1] as usize] * tabs[2][k[2] as usize];
    }
}
