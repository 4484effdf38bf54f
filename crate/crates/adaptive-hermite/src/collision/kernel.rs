//! Collision kernels and their angular quadrature.
//!
//! All supported kernels factor as `B(g, chi) = C g^s b(cos chi)`. The
//! angular part enters the weak form only through integrals of the form
//! `int b(mu) (1 - mu) R(mu) dmu` with polynomial `R`, so every kernel is
//! reduced to a Gauss rule for the finite measure `(1 - mu) b(mu) dmu`. For
//! inverse power law molecules this measure is defined through the impact
//! parameter, `int b(mu) R(mu) dmu = int_0^inf W0 R(cos chi(W0)) dW0`, where
//! `chi(W0)` is the classical deflection angle in reduced units.

use crate::error::{invalid, Result};
use crate::hermite::quadrature::{gauss_from_legendre_moments, integrate, integrate_vec, GaussRule};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Supported collision kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KernelSpec {
    /// `B = strength / (4 pi)`.
    IsotropicMaxwell { strength: f64 },
    /// Variable hard spheres, `B = strength g^exponent / (4 pi)`.
    Vhs { exponent: f64, strength: f64 },
    /// Inverse power law potential with exponent `eta > 3`.
    InversePower { eta: f64, strength: f64 },
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::IsotropicMaxwell { strength } => check_strength(strength),
            KernelSpec::Vhs { exponent, strength } => {
                if !(exponent > -3.0 && exponent.is_finite()) {
                    return invalid(format!("VHS exponent must exceed -3, got {exponent}"));
                }
                check_strength(strength)
            }
            KernelSpec::InversePower { eta, strength } => {
                if !(eta > 3.0 && eta.is_finite()) {
                    return invalid(format!("inverse power exponent must exceed 3, got {eta}"));
                }
                check_strength(strength)
            }
        }
    }

    pub fn strength(&self) -> f64 {
        match *self {
            KernelSpec::IsotropicMaxwell { strength }
            | KernelSpec::Vhs { strength, .. }
            | KernelSpec::InversePower { strength, .. } => strength,
        }
    }

    pub fn with_strength(&self, strength: f64) -> Self {
        match *self {
            KernelSpec::IsotropicMaxwell { .. } => KernelSpec::IsotropicMaxwell { strength },
            KernelSpec::Vhs { exponent, .. } => KernelSpec::Vhs { exponent, strength },
            KernelSpec::InversePower { eta, .. } => KernelSpec::InversePower { eta, strength },
        }
    }

    /// Power `s` of the relative speed in the kernel.
    pub fn speed_exponent(&self) -> f64 {
        match *self {
            KernelSpec::IsotropicMaxwell { .. } => 0.0,
            KernelSpec::Vhs { exponent, .. } => exponent,
            KernelSpec::InversePower { eta, .. } => (eta - 5.0) / (eta - 1.0),
        }
    }

    /// Exponent `e` in `A(beta) = beta^e A(1)` for the collision tensor.
    pub fn scaling_exponent(&self) -> f64 {
        -1.5 - self.speed_exponent()
    }

    pub fn is_maxwell_molecule(&self) -> bool {
        self.speed_exponent() == 0.0
    }

    /// Legendre moments `int P_l(mu) (1 - mu) b(mu) dmu`, `l = 0 .. count`.
    pub fn angular_moments(&self, count: usize) -> Result<Vec<f64>> {
        self.validate()?;
        let mut m = vec![0.0; count];
        match *self {
            KernelSpec::IsotropicMaxwell { .. } | KernelSpec::Vhs { .. } => {
                let b = 1.0 / (4.0 * PI);
                if count > 0 {
                    m[0] = 2.0 * b;
                }
                if count > 1 {
                    m[1] = -2.0 / 3.0 * b;
                }
            }
            KernelSpec::InversePower { eta, .. } => {
                // W0 = t / (1 - t) maps the impact parameter onto (0, 1)
                let mut failure = None;
                let r = integrate_vec(
                    |t, out| {
                        let w0 = t / (1.0 - t);
                        let jac = 1.0 / ((1.0 - t) * (1.0 - t));
                        let chi = match deflection_angle(eta, w0) {
                            Ok(c) => c,
                            Err(e) => {
                                failure.get_or_insert(e);
                                0.0
                            }
                        };
                        let mu = chi.cos();
                        let one_minus = 2.0 * (0.5 * chi).sin().powi(2);
                        legendre_into(mu, out);
                        for x in out.iter_mut() {
                            *x *= w0 * one_minus * jac;
                        }
                    },
                    count,
                    0.0,
                    1.0,
                    1e-15,
                    1e-12,
                    4000,
                )?;
                if let Some(e) = failure {
                    return Err(e);
                }
                m = r.value;
            }
        }
        Ok(m)
    }

    /// Gauss rule with `n` nodes for the measure `(1 - mu) b(mu) dmu` on
    /// `[-1, 1]`.
    pub fn angular_rule(&self, n: usize) -> Result<GaussRule> {
        let m = self.angular_moments(2 * n)?;
        gauss_from_legendre_moments(&m, n)
    }
}

fn check_strength(s: f64) -> Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        invalid(format!("kernel strength must be positive, got {s}"))
    }
}

fn legendre_into(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = x;
    }
    for l in 1..out.len().saturating_sub(1) {
        let lf = l as f64;
        out[l + 1] = ((2.0 * lf + 1.0) * x * out[l] - lf * out[l - 1]) / (lf + 1.0);
    }
}

/// Deflection angle `chi` of an inverse power law collision with exponent
/// `eta` and reduced impact parameter `w0`.
///
/// `chi = pi - 2 int_0^{W1} [1 - W^2 - 2/(eta-1) (W/w0)^(eta-1)]^(-1/2) dW`
/// with `W1` the positive root of the bracket. With `W = W1 (1 - u^2)` the
/// endpoint singularity disappears and subtracting the free-flight value
/// `pi/2` analytically keeps small angles accurate.
pub fn deflection_angle(eta: f64, w0: f64) -> Result<f64> {
    if !(eta > 3.0) {
        return invalid(format!("inverse power exponent must exceed 3, got {eta}"));
    }
    if !(w0 > 0.0) || !w0.is_finite() {
        return invalid(format!("impact parameter must be positive, got {w0}"));
    }
    let p = eta - 1.0;
    let a = 2.0 / p;
    let w1 = turning_point(p, a, w0);
    let c = a * (w1 / w0).powf(p);
    let (val, _) = integrate(
        |u| {
            let u2 = u * u;
            // (1 - (1 - u^2)^p) / u^2
            let h = if u2 == 0.0 { p } else { -(p * (-u2).ln_1p()).exp_m1() / u2 };
            let big_a = 2.0 - u2;
            let e = c * h / (w1 * w1);
            let sa = big_a.sqrt();
            let sb = (big_a + e).sqrt();
            2.0 * e / (sa * sb * (sa + sb))
        },
        0.0,
        1.0,
        1e-16,
        1e-13,
    )?;
    Ok(2.0 * val)
}

/// Root of `1 - W^2 - a (W/w0)^p` on `(0, 1)`.
fn turning_point(p: f64, a: f64, w0: f64) -> f64 {
    let f = |w: f64| 1.0 - w * w - a * (w / w0).powf(p);
    let df = |w: f64| -2.0 * w - a * p * (w / w0).powf(p) / w;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut w = (w0 * a.powf(-1.0 / p)).min(0.5);
    for _ in 0..200 {
        let fw = f(w);
        if fw > 0.0 {
            lo = w;
        } else {
            hi = w;
        }
        let mut next = w - fw / df(w);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - w).abs() <= 1e-16 * w.max(1e-300) || hi - lo <= 1e-16 * hi {
            return next;
        }
        w = next;
    }
    w
}

/// Value of the kernel `B(g, chi)`.
pub fn kernel_eval(kernel: &KernelSpec, g: f64, chi: f64) -> Result<f64> {
    kernel.validate()?;
    if !(0.0..=PI).contains(&chi) || !(g >= 0.0) {
        return invalid(format!("need g >= 0 and chi in [0, pi], got g = {g}, chi = {chi}"));
    }
    let s = kernel.speed_exponent();
    let c = kernel.strength() * g.powf(s);
    match *kernel {
        KernelSpec::IsotropicMaxwell { .. } | KernelSpec::Vhs { .. } => Ok(c / (4.0 * PI)),
        KernelSpec::InversePower { eta, .. } => {
            // invert chi(W0) by bisection on log W0; chi decreases with W0
            let w0_of = |target: f64| -> Result<f64> {
                let (mut lo, mut hi) = (-20.0f64, 20.0f64);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if deflection_angle(eta, mid.exp())? > target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Ok((0.5 * (lo + hi)).exp())
            };
            let w0 = w0_of(chi)?;
            let h = 1e-5 * chi.min(PI - chi).max(1e-8);
            let dw = (w0_of(chi + h)? - w0_of(chi - h)?) / (2.0 * h);
            Ok(c * w0 * dw.abs() / chi.sin())
        }
    }
}
