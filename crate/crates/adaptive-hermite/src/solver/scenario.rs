//! Initial conditions, Knudsen numbers and kernels of the test problems.

use super::spatial::Geometry;
use crate::collision::{collide, CollisionTensor, KernelSpec};
use crate::error::{invalid, Error, Result};
use crate::hermite::{BasisSpec, CoeffVector, IndexSet};
use crate::moments::{add_maxwellian, gaussian_coeffs_1d, moment_weights};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// One Maxwellian component of a mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian {
    pub rho: f64,
    pub u: [f64; 3],
    pub theta: f64,
}

/// Decay rate of the BKW solution for the standard Maxwell-molecule
/// normalisation, `pi * 0.6543 / 3`.
pub const BKW_RATE: f64 = PI * 0.6543 / 3.0;

/// `S(t) = 1 - 0.4 exp(-rate t)`.
pub fn bkw_s(rate: f64, t: f64) -> f64 {
    1.0 - 0.4 * (-rate * t).exp()
}

/// BKW density `(2 pi S)^(-3/2) exp(-|v|^2 / 2S) (A |v|^2 + B)` with
/// `A = (1 - S) / (2 S^2)` and `B = (5S - 3) / (2S)`.
pub fn bkw_density(s: f64, v: [f64; 3]) -> f64 {
    let v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    let a = (1.0 - s) / (2.0 * s * s);
    let b = (5.0 * s - 3.0) / (2.0 * s);
    (2.0 * PI * s).powf(-1.5) * (-v2 / (2.0 * s)).exp() * (a * v2 + b)
}

/// Hermite coefficients of the BKW density with parameter `s`.
///
/// Per axis, with `w = v - zeta` and `c_k` the coefficients of the unit
/// Gaussian of variance `s`, `w H_k = (sqrt(k+1) H_{k+1} + sqrt(k) H_{k-1}) /
/// beta` gives the coefficients of `w c` and `w^2 c`; then
/// `v^2 = w^2 + 2 zeta w + zeta^2`.
pub fn bkw_coeffs(s: f64, spec: &BasisSpec) -> Result<CoeffVector> {
    if !(s > 0.0 && s <= 1.0) {
        return invalid(format!("BKW parameter S must lie in (0, 1], got {s}"));
    }
    let n = spec.order as usize;
    let shift = |c: &[f64], k: usize| -> f64 {
        let up = if k + 1 < c.len() { (k as f64 + 1.0).sqrt() * c[k + 1] } else { 0.0 };
        let down = if k > 0 { (k as f64).sqrt() * c[k - 1] } else { 0.0 };
        (up + down) / spec.beta
    };
    let mut base = Vec::with_capacity(3);
    let mut square = Vec::with_capacity(3);
    for d in 0..3 {
        let c = gaussian_coeffs_1d(spec.order + 2, spec.beta, -spec.zeta[d], s);
        let w1: Vec<f64> = (0..=n + 1).map(|k| shift(&c, k)).collect();
        let w2: Vec<f64> = (0..=n).map(|k| shift(&w1, k)).collect();
        let z = spec.zeta[d];
        let v2: Vec<f64> = (0..=n).map(|k| w2[k] + 2.0 * z * w1[k] + z * z * c[k]).collect();
        base.push(c[..=n].to_vec());
        square.push(v2);
    }
    let a = (1.0 - s) / (2.0 * s * s);
    let b = (5.0 * s - 3.0) / (2.0 * s);
    let set = IndexSet::new(spec.order);
    let data = set
        .indices()
        .iter()
        .map(|k| {
            let c = |d: usize| base[d][k[d] as usize];
            let q = |d: usize| square[d][k[d] as usize];
            a * (q(0) * c(1) * c(2) + c(0) * q(1) * c(2) + c(0) * c(1) * q(2)) + b * c(0) * c(1) * c(2)
        })
        .collect();
    CoeffVector::from_vec(*spec, data)
}

/// Decay rate of `S` produced by a Maxwell-molecule tensor, from the initial
/// growth of the fourth moment: with `m4 = int |v|^4 f = 15 (1 - (1-S)^2)`,
/// `dm4/dt = 30 rate (1 - S)^2`.
pub fn bkw_rate_of(tensor: &CollisionTensor) -> Result<f64> {
    if !tensor.kernel().is_maxwell_molecule() {
        return invalid("the BKW solution exists only for Maxwell molecules");
    }
    if tensor.n0() < 4 {
        return invalid("the BKW rate needs a tensor of order at least 4");
    }
    let s0: f64 = 0.6;
    let spec = BasisSpec::new(tensor.n0(), 1.0 / s0.sqrt(), [0.0; 3])?;
    let q = collide(tensor, &bkw_coeffs(s0, &spec)?, 0.0)?;
    let mut rate = 0.0;
    let terms: [([u32; 3], f64); 6] = [
        ([4, 0, 0], 1.0),
        ([0, 4, 0], 1.0),
        ([0, 0, 4], 1.0),
        ([2, 2, 0], 2.0),
        ([2, 0, 2], 2.0),
        ([0, 2, 2], 2.0),
    ];
    for (a, c) in terms {
        for (r, w) in moment_weights(&spec, a, [0.0; 3]) {
            rate += c * w * q.as_slice()[r];
        }
    }
    Ok(rate / (30.0 * (1.0 - s0).powi(2)))
}

/// Rescales a Maxwell-molecule tensor so that it reproduces the BKW decay
/// `rate`.
pub fn calibrate_bkw(tensor: &CollisionTensor, rate: f64) -> Result<CollisionTensor> {
    let own = bkw_rate_of(tensor)?;
    if !(own > 0.0) {
        return Err(Error::Numeric(format!("tensor gives a non-positive BKW rate {own}")));
    }
    let out = tensor.with_strength_factor(rate / own)?;
    log::info!("BKW calibration: kernel strength {:.12}", out.kernel().strength());
    Ok(out)
}

/// Parameters of the BKW problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BkwParams {
    /// Decay rate of `S(t)`; the kernel is rescaled to reproduce it.
    pub rate: f64,
    pub epsilon: f64,
}

impl Default for BkwParams {
    fn default() -> Self {
        BkwParams { rate: BKW_RATE, epsilon: 1.0 }
    }
}

/// Four Maxwellians of equal density and temperature moving along `±x` and
/// `±y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadGaussianParams {
    pub rho: f64,
    pub theta: f64,
    pub speed: f64,
    pub epsilon: f64,
}

impl Default for QuadGaussianParams {
    fn default() -> Self {
        QuadGaussianParams { rho: 0.25, theta: 1.0 / 3.0, speed: 2f64.sqrt(), epsilon: 1.0 }
    }
}

/// Asymmetric two-Maxwellian mixture controlled by `kappa` and `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MixedGaussianParams {
    pub kappa: f64,
    pub mu: f64,
    pub epsilon: f64,
}

impl Default for MixedGaussianParams {
    fn default() -> Self {
        MixedGaussianParams { kappa: 0.05, mu: 4.0, epsilon: 1.0 }
    }
}

/// `rho(x) = 1 + amplitude sin(2 pi x / length)` at unit temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensityWaveParams {
    pub amplitude: f64,
    pub length: f64,
    pub epsilon: f64,
}

impl Default for DensityWaveParams {
    fn default() -> Self {
        DensityWaveParams { amplitude: 0.3, length: 2.0, epsilon: 5.0 }
    }
}

/// Two counter-streaming Maxwellians with
/// `rho = (1 + a sin(2 pi x / L)) / 2`, `theta = (1 - a sin(2 pi x / L)) / 2`
/// under the Knudsen number
/// `5.05 + 2.5 (tanh(10 (0.25 - t)) + tanh(10 (t - 1.75)))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeVaryingParams {
    pub amplitude: f64,
    pub speed: f64,
    pub length: f64,
}

impl Default for TimeVaryingParams {
    fn default() -> Self {
        TimeVaryingParams { amplitude: 0.1, speed: 1.5f64.sqrt(), length: 2.0 }
    }
}

/// Taylor-Green vortex on `[0, L]^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaylorGreenParams {
    pub u0: f64,
    pub theta0: f64,
    pub length: f64,
    pub epsilon: f64,
}

impl Default for TaylorGreenParams {
    fn default() -> Self {
        TaylorGreenParams { u0: 1.2, theta0: 1.0, length: 1.0, epsilon: 0.05 }
    }
}

/// Six Maxwellians moving along the coordinate axes with a density
/// perturbation on `[0, L]^3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HexaGaussianParams {
    pub amplitude: f64,
    pub theta: f64,
    pub speed: f64,
    pub length: f64,
    pub epsilon: f64,
}

impl Default for HexaGaussianParams {
    fn default() -> Self {
        HexaGaussianParams { amplitude: 0.3, theta: 0.5, speed: 1.5f64.sqrt(), length: 2.0, epsilon: 1.0 }
    }
}

/// A test problem with its parameters, selected by `name` in JSON.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Scenario {
    Bkw(BkwParams),
    QuadGaussian(QuadGaussianParams),
    MixedGaussian(MixedGaussianParams),
    #[serde(rename = "density_wave_1d")]
    DensityWave1d(DensityWaveParams),
    #[serde(rename = "time_varying_regime_1d")]
    TimeVaryingRegime1d(TimeVaryingParams),
    #[serde(rename = "taylor_green_2d")]
    TaylorGreen2d(TaylorGreenParams),
    #[serde(rename = "hexa_gaussian_3d")]
    HexaGaussian3d(HexaGaussianParams),
}

/// Initial data at one point: a Gaussian mixture or the BKW density.
#[derive(Debug, Clone, PartialEq)]
pub enum Initial {
    Mixture(Vec<Gaussian>),
    Bkw { s: f64 },
}

impl Initial {
    /// Coefficients in the basis `spec`, added to `out`.
    pub fn add_coeffs(&self, spec: &BasisSpec, out: &mut [f64]) -> Result<()> {
        match self {
            Initial::Mixture(parts) => {
                for g in parts {
                    if !(g.rho > 0.0 && g.theta > 0.0 && g.rho.is_finite() && g.theta.is_finite()) {
                        return invalid(format!(
                            "mixture component needs positive density and temperature (rho = {}, theta = {})",
                            g.rho, g.theta
                        ));
                    }
                    add_maxwellian(g.rho, g.u, g.theta, out, spec);
                }
            }
            Initial::Bkw { s } => {
                let c = bkw_coeffs(*s, spec)?;
                for (o, x) in out.iter_mut().zip(c.as_slice()) {
                    *o += x;
                }
            }
        }
        Ok(())
    }

    /// Pointwise value at velocity `v`.
    pub fn density(&self, v: [f64; 3]) -> f64 {
        match self {
            Initial::Mixture(parts) => parts
                .iter()
                .map(|g| {
                    let d2: f64 = (0..3).map(|d| (v[d] - g.u[d]).powi(2)).sum();
                    g.rho * (2.0 * PI * g.theta).powf(-1.5) * (-d2 / (2.0 * g.theta)).exp()
                })
                .sum(),
            Initial::Bkw { s } => bkw_density(*s, v),
        }
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return invalid(format!("scenario parameter {name} must be positive, got {x}"));
    }
    Ok(())
}

impl Scenario {
    /// Scenario with default parameters by name.
    pub fn by_name(name: &str) -> Result<Self> {
        Ok(match name {
            "bkw" => Scenario::Bkw(Default::default()),
            "quad_gaussian" => Scenario::QuadGaussian(Default::default()),
            "mixed_gaussian" => Scenario::MixedGaussian(Default::default()),
            "density_wave_1d" => Scenario::DensityWave1d(Default::default()),
            "time_varying_regime_1d" => Scenario::TimeVaryingRegime1d(Default::default()),
            "taylor_green_2d" => Scenario::TaylorGreen2d(Default::default()),
            "hexa_gaussian_3d" => Scenario::HexaGaussian3d(Default::default()),
            _ => return invalid(format!("unknown scenario {name:?}")),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Bkw(_) => "bkw",
            Scenario::QuadGaussian(_) => "quad_gaussian",
            Scenario::MixedGaussian(_) => "mixed_gaussian",
            Scenario::DensityWave1d(_) => "density_wave_1d",
            Scenario::TimeVaryingRegime1d(_) => "time_varying_regime_1d",
            Scenario::TaylorGreen2d(_) => "taylor_green_2d",
            Scenario::HexaGaussian3d(_) => "hexa_gaussian_3d",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Scenario::Bkw(p) => {
                check_positive("rate", p.rate)?;
                check_positive("epsilon", p.epsilon)
            }
            Scenario::QuadGaussian(p) => {
                check_positive("rho", p.rho)?;
                check_positive("theta", p.theta)?;
                check_positive("epsilon", p.epsilon)
            }
            Scenario::MixedGaussian(p) => {
                check_positive("kappa", p.kappa)?;
                check_positive("mu", p.mu)?;
                check_positive("epsilon", p.epsilon)?;
                if p.kappa >= 1.0 {
                    return invalid("kappa must be below 1");
                }
                Ok(())
            }
            Scenario::DensityWave1d(p) => {
                check_positive("length", p.length)?;
                check_positive("epsilon", p.epsilon)?;
                if p.amplitude.abs() >= 1.0 {
                    return invalid("density amplitude must be below 1");
                }
                Ok(())
            }
            Scenario::TimeVaryingRegime1d(p) => {
                check_positive("length", p.length)?;
                if p.amplitude.abs() >= 1.0 {
                    return invalid("amplitude must be below 1");
                }
                Ok(())
            }
            Scenario::TaylorGreen2d(p) => {
                check_positive("length", p.length)?;
                check_positive("theta0", p.theta0)?;
                check_positive("epsilon", p.epsilon)?;
                if p.theta0 - p.u0 * p.u0 / 2.0 <= 0.0 {
                    return invalid("theta0 - u0^2 / 2 must be positive");
                }
                Ok(())
            }
            Scenario::HexaGaussian3d(p) => {
                check_positive("theta", p.theta)?;
                check_positive("length", p.length)?;
                check_positive("epsilon", p.epsilon)?;
                // the perturbation profile stays below 1.75 in magnitude
                if p.amplitude.abs() * 1.75 >= 1.0 {
                    return invalid("density amplitude too large for a positive density");
                }
                Ok(())
            }
        }
    }

    /// Default collision kernel.
    pub fn kernel(&self) -> KernelSpec {
        match self {
            Scenario::Bkw(_) => KernelSpec::IsotropicMaxwell { strength: 1.0 },
            Scenario::QuadGaussian(_) | Scenario::MixedGaussian(_) => {
                KernelSpec::InversePower { eta: 5.0, strength: 1.0 }
            }
            _ => KernelSpec::InversePower { eta: 10.0, strength: 1.0 },
        }
    }

    /// Knudsen number at time `t`.
    pub fn epsilon(&self, t: f64) -> f64 {
        match *self {
            Scenario::Bkw(p) => p.epsilon,
            Scenario::QuadGaussian(p) => p.epsilon,
            Scenario::MixedGaussian(p) => p.epsilon,
            Scenario::DensityWave1d(p) => p.epsilon,
            Scenario::TimeVaryingRegime1d(_) => {
                5.05 + 2.5 * ((10.0 * (0.25 - t)).tanh() + (10.0 * (t - 1.75)).tanh())
            }
            Scenario::TaylorGreen2d(p) => p.epsilon,
            Scenario::HexaGaussian3d(p) => p.epsilon,
        }
    }

    /// Spatial dimension, zero for homogeneous problems.
    pub fn dim(&self) -> usize {
        match self {
            Scenario::Bkw(_) | Scenario::QuadGaussian(_) | Scenario::MixedGaussian(_) => 0,
            Scenario::DensityWave1d(_) | Scenario::TimeVaryingRegime1d(_) => 1,
            Scenario::TaylorGreen2d(_) => 2,
            Scenario::HexaGaussian3d(_) => 3,
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.dim() == 0
    }

    /// Grid with `m` points per axis, `None` for homogeneous problems.
    pub fn geometry(&self, m: usize) -> Result<Option<Geometry>> {
        let l = match *self {
            Scenario::DensityWave1d(p) => p.length,
            Scenario::TimeVaryingRegime1d(p) => p.length,
            Scenario::TaylorGreen2d(p) => p.length,
            Scenario::HexaGaussian3d(p) => p.length,
            _ => return Ok(None),
        };
        Geometry::new(self.dim(), m, [l; 3]).map(Some)
    }

    /// Initial data at position `x` (ignored for homogeneous problems).
    pub fn initial(&self, x: [f64; 3]) -> Initial {
        match *self {
            Scenario::Bkw(p) => Initial::Bkw { s: bkw_s(p.rate, 0.0) },
            Scenario::QuadGaussian(p) => {
                let c = p.speed;
                let us = [[c, 0.0, 0.0], [-c, 0.0, 0.0], [0.0, c, 0.0], [0.0, -c, 0.0]];
                Initial::Mixture(us.iter().map(|&u| Gaussian { rho: p.rho, u, theta: p.theta }).collect())
            }
            Scenario::MixedGaussian(p) => {
                let (k, mu) = (p.kappa, p.mu);
                let c = (5.0f64 / 3.0).sqrt();
                Initial::Mixture(vec![
                    Gaussian { rho: 1.0 - k, u: [c * mu, 0.0, 0.0], theta: 1.0 },
                    Gaussian {
                        rho: k * 4.0 * mu * mu / (mu * mu + 3.0),
                        u: [c * (mu * mu + 3.0) / (4.0 * mu), 0.0, 0.0],
                        theta: (5.0 * mu * mu - 1.0) * (mu * mu + 3.0) / (16.0 * mu * mu),
                    },
                ])
            }
            Scenario::DensityWave1d(p) => {
                let rho = 1.0 + p.amplitude * (2.0 * PI * x[0] / p.length).sin();
                Initial::Mixture(vec![Gaussian { rho, u: [0.0; 3], theta: 1.0 }])
            }
            Scenario::TimeVaryingRegime1d(p) => {
                let s = p.amplitude * (2.0 * PI * x[0] / p.length).sin();
                let (rho, theta) = ((1.0 + s) / 2.0, (1.0 - s) / 2.0);
                Initial::Mixture(vec![
                    Gaussian { rho, u: [p.speed, 0.0, 0.0], theta },
                    Gaussian { rho, u: [-p.speed, 0.0, 0.0], theta },
                ])
            }
            Scenario::TaylorGreen2d(p) => {
                let w = 2.0 * PI / p.length;
                let (cx, sx) = ((w * x[0]).cos(), (w * x[0]).sin());
                let (cy, sy) = ((w * x[1]).cos(), (w * x[1]).sin());
                let theta = p.theta0 - p.u0 * p.u0 * ((2.0 * w * x[0]).cos() + (2.0 * w * x[1]).cos()) / 4.0;
                Initial::Mixture(vec![Gaussian {
                    rho: 1.0,
                    u: [-p.u0 * cx * sy, p.u0 * sx * cy, 0.0],
                    theta,
                }])
            }
            Scenario::HexaGaussian3d(p) => {
                let w = 2.0 * PI / p.length;
                let (a, b, c) = (w * x[0], w * x[1], w * x[2]);
                let lambda = (a.sin() - 0.5 * (2.0 * a).sin() + 0.125 * (3.0 * a).sin())
                    * (b.sin() - 0.5 * (2.0 * b).sin())
                    * c.sin();
                let rho = (1.0 + p.amplitude * lambda) / 6.0;
                let mut parts = Vec::with_capacity(6);
                for d in 0..3 {
                    for sign in [1.0, -1.0] {
                        let mut u = [0.0; 3];
                        u[d] = sign * p.speed;
                        parts.push(Gaussian { rho, u, theta: p.theta });
                    }
                }
                Initial::Mixture(parts)
            }
        }
    }

    /// Exact solution at time `t`, where one is known.
    pub fn exact(&self, t: f64) -> Option<Initial> {
        match *self {
            Scenario::Bkw(p) => Some(Initial::Bkw { s: bkw_s(p.rate, t / p.epsilon) }),
            _ => None,
        }
    }

    /// Whether the kernel must be rescaled to the scenario's decay rate.
    pub fn calibration_rate(&self) -> Option<f64> {
        match *self {
            Scenario::Bkw(p) => Some(p.rate),
            _ => None,
        }
    }
}
