//! Spatial Fourier transforms, the advection term and the CFL time step.
//!
//! Fourier coefficients are normalised as
//! `g_{k,l} = M^{-D} sum_j f_{k,j} exp(-2 pi i l . x_j / L)`, so the
//! collocation values are recovered by the plain inverse sum.

use super::spatial::{Geometry, SpatialField};
use crate::adaptivity::indicator_from_energy;
use crate::error::Result;
use crate::hermite::{advection_speed, BasisSpec, CoeffField, IndexSet};
use crate::par;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// FFT plans for one grid.
#[derive(Clone)]
pub struct FourierPlan {
    geometry: Geometry,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FourierPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierPlan").field("geometry", &self.geometry).finish()
    }
}

/// Fourier coefficients of every Hermite coefficient, stored `[k][l]`.
#[derive(Debug, Clone)]
pub struct FourierCoeffs {
    pub spec: BasisSpec,
    pub geometry: Geometry,
    pub modes: Vec<Complex64>,
}

impl FourierCoeffs {
    /// Modes of the Hermite coefficient with rank `r`.
    pub fn coeff(&self, r: usize) -> &[Complex64] {
        let p = self.geometry.points();
        &self.modes[r * p..(r + 1) * p]
    }
}

/// Signed wavenumber of FFT index `i`; `None` for the Nyquist index.
pub fn wavenumber(i: usize, m: usize) -> Option<i64> {
    if 2 * i < m {
        Some(i as i64)
    } else if 2 * i == m {
        None
    } else {
        Some(i as i64 - m as i64)
    }
}

impl FourierPlan {
    pub fn new(geometry: Geometry) -> Self {
        let mut planner = FftPlanner::new();
        FourierPlan {
            geometry,
            forward: planner.plan_fft_forward(geometry.m),
            inverse: planner.plan_fft_inverse(geometry.m),
        }
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    /// Transforms a `D`-dimensional array in place along every axis.
    fn transform(&self, buf: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let m = self.geometry.m;
        let p = buf.len();
        let mut line = vec![Complex64::new(0.0, 0.0); m];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        for axis in 0..self.geometry.dim {
            let stride = m.pow(axis as u32);
            for base in 0..p {
                // visit each line once, from its first element
                if (base / stride) % m != 0 {
                    continue;
                }
                for (i, v) in line.iter_mut().enumerate() {
                    *v = buf[base + i * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, v) in line.iter().enumerate() {
                    buf[base + i * stride] = *v;
                }
            }
        }
    }

    /// Normalised forward transform of real collocation values.
    pub fn forward_values(&self, values: &[f64]) -> Vec<Complex64> {
        let scale = 1.0 / values.len() as f64;
        let mut buf: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x * scale, 0.0)).collect();
        self.transform(&mut buf, &self.forward);
        buf
    }

    /// Inverse transform; returns the real part.
    pub fn inverse_values(&self, mut modes: Vec<Complex64>) -> Vec<f64> {
        self.transform(&mut modes, &self.inverse);
        modes.iter().map(|z| z.re).collect()
    }

    /// Per-point factor `i 2 pi l_d / L_d` of the derivative along `axis`,
    /// zero at the Nyquist index.
    fn derivative_symbol(&self, axis: usize) -> Vec<Complex64> {
        let g = &self.geometry;
        (0..g.points())
            .map(|j| {
                let i = g.axis_indices(j)[axis];
                match wavenumber(i, g.m) {
                    Some(l) => Complex64::new(0.0, 2.0 * PI * l as f64 / g.lengths[axis]),
                    None => Complex64::new(0.0, 0.0),
                }
            })
            .collect()
    }
}

/// Gathers the values of Hermite coefficient `r` over all points.
fn gather(field: &CoeffField, r: usize) -> Vec<f64> {
    (0..field.points()).map(|j| field.point(j)[r]).collect()
}

/// Fourier coefficients of all Hermite coefficients of `field`.
pub fn fourier_forward(field: &SpatialField, plan: &FourierPlan) -> FourierCoeffs {
    let f = &field.field;
    let tc = f.stride();
    let per_k = par::map_range(tc, |r| plan.forward_values(&gather(f, r)));
    FourierCoeffs { spec: *f.spec(), geometry: field.geometry, modes: per_k.concat() }
}

/// Collocation values from Fourier coefficients.
pub fn fourier_inverse(coeffs: &FourierCoeffs, plan: &FourierPlan) -> SpatialField {
    let p = coeffs.geometry.points();
    let tc = coeffs.spec.term_count();
    let per_k = par::map_range(tc, |r| plan.inverse_values(coeffs.coeff(r).to_vec()));
    let mut out = SpatialField::zeros(coeffs.geometry, coeffs.spec);
    scatter(&per_k, &mut out.field, p);
    out
}

fn scatter(per_k: &[Vec<f64>], out: &mut CoeffField, p: usize) {
    for j in 0..p {
        let dst = out.point_mut(j);
        for (r, v) in per_k.iter().enumerate() {
            dst[r] = v[j];
        }
    }
}

/// Per-degree energy `M^D sum_l |g_{k,l}|^2`, equal to the collocation sum
/// by Parseval's identity.
pub fn fourier_degree_energy(coeffs: &FourierCoeffs) -> Vec<f64> {
    let order = coeffs.spec.order;
    let p = coeffs.geometry.points() as f64;
    let mut e = vec![0.0; order as usize + 1];
    let set = IndexSet::new(order);
    for (r, k) in set.indices().iter().enumerate() {
        let d = (k[0] + k[1] + k[2]) as usize;
        e[d] += p * coeffs.coeff(r).iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    e
}

/// Frequency indicator evaluated on the Fourier side.
pub fn fourier_indicator(coeffs: &FourierCoeffs) -> Result<f64> {
    indicator_from_energy(&fourier_degree_energy(coeffs), coeffs.spec.order)
}

/// Collocation values of `sum_d d/dx_d` of the velocity moment
/// `v_d f`, i.e. the advection term of the kinetic equation.
///
/// In Hermite coefficients `(v_d f)_k = sqrt(k_d)/beta f_{k-e_d} + zeta_d f_k
/// + sqrt(k_d+1)/beta f_{k+e_d}`, with coefficients beyond the order taken as
/// zero. The derivative is exact on the Fourier side.
pub fn advection_rhs(field: &SpatialField, plan: &FourierPlan) -> CoeffField {
    let spec = *field.spec();
    let g = fourier_forward(field, plan);
    let p = field.geometry.points();
    let dim = field.geometry.dim;
    let set = IndexSet::new(spec.order);
    let symbols: Vec<Vec<Complex64>> = (0..dim).map(|d| plan.derivative_symbol(d)).collect();
    let inv_beta = 1.0 / spec.beta;
    let per_k = par::map_range(set.len(), |r| {
        let k = set.get(r);
        let mut acc = vec![Complex64::new(0.0, 0.0); p];
        let mut flux = vec![Complex64::new(0.0, 0.0); p];
        for d in 0..dim {
            let own = g.coeff(r);
            for (x, y) in flux.iter_mut().zip(own) {
                *x = y * spec.zeta[d];
            }
            if let Some(lo) = set.lowered(r, d) {
                let c = (k[d] as f64).sqrt() * inv_beta;
                for (x, y) in flux.iter_mut().zip(g.coeff(lo)) {
                    *x += y * c;
                }
            }
            if let Some(hi) = set.raised(r, d) {
                let c = (k[d] as f64 + 1.0).sqrt() * inv_beta;
                for (x, y) in flux.iter_mut().zip(g.coeff(hi)) {
                    *x += y * c;
                }
            }
            for ((a, x), s) in acc.iter_mut().zip(&flux).zip(&symbols[d]) {
                *a += x * s;
            }
        }
        plan.inverse_values(acc)
    });
    let mut out = CoeffField::zeros(spec, p);
    scatter(&per_k, &mut out, p);
    out
}

/// Time step from the CFL number:
/// `dt = cfl / sum_d ((|zeta_d| + v_max) / dx_d)`, capped at `dt_max`.
pub fn cfl_dt(spec: &BasisSpec, geometry: &Geometry, cfl: f64, dt_max: f64) -> f64 {
    let vmax = advection_speed(spec.order, spec.beta);
    let rate: f64 = (0..geometry.dim)
        .map(|d| (spec.zeta[d].abs() + vmax) / geometry.spacing(d))
        .sum();
    if rate > 0.0 {
        (cfl / rate).min(dt_max)
    } else {
        dt_max
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adaptivity::indicator;
    use crate::hermite::rank;
    use rand::{Rng, SeedableRng};

    fn random_field(geometry: Geometry, order: u32, seed: u64) -> SpatialField {
        let spec = BasisSpec::new(order, 1.1, [0.0; 3]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut f = SpatialField::zeros(geometry, spec);
        f.field.data_mut().iter_mut().for_each(|x| *x = rng.random_range(-1.0..1.0));
        f
    }

    #[test]
    fn round_trip() {
        for dim in 1..=3 {
            let g = Geometry::new(dim, 6, [1.0, 2.0, 0.5]).unwrap();
            let f = random_field(g, 3, dim as u64);
            let plan = FourierPlan::new(g);
            let back = fourier_inverse(&fourier_forward(&f, &plan), &plan);
            for (a, b) in f.field.data().iter().zip(back.field.data()) {
                assert!((a - b).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn constant_has_only_mean_mode() {
        let g = Geometry::new(2, 8, [1.0, 1.0, 0.0]).unwrap();
        let spec = BasisSpec::new(1, 1.0, [0.0; 3]).unwrap();
        let f = SpatialField::from_fn(g, spec, |_, out| {
            out.iter_mut().for_each(|x| *x = 2.5);
            Ok(())
        })
        .unwrap();
        let plan = FourierPlan::new(g);
        let c = fourier_forward(&f, &plan);
        for r in 0..spec.term_count() {
            let m = c.coeff(r);
            assert!((m[0].re - 2.5).abs() < 1e-14);
            assert!(m[1..].iter().all(|z| z.norm() < 1e-14));
        }
    }

    #[test]
    fn single_mode() {
        let g = Geometry::new(1, 8, [2.0, 0.0, 0.0]).unwrap();
        let spec = BasisSpec::new(0, 1.0, [0.0; 3]).unwrap();
        let f = SpatialField::from_fn(g, spec, |x, out| {
            out[0] = (PI * x[0]).cos();
            Ok(())
        })
        .unwrap();
        let c = fourier_forward(&f, &FourierPlan::new(g));
        let nonzero: Vec<usize> = (0..8).filter(|&i| c.coeff(0)[i].norm() > 1e-14).collect();
        // cos gives l = +1 and l = -1, each with weight 1/2
        assert_eq!(nonzero, vec![1, 7]);
        assert!((c.coeff(0)[1].re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn parseval() {
        let g = Geometry::new(2, 8, [1.0, 1.0, 0.0]).unwrap();
        let f = random_field(g, 4, 9);
        let plan = FourierPlan::new(g);
        let a = indicator(&f.field).unwrap();
        let b = fourier_indicator(&fourier_forward(&f, &plan)).unwrap();
        assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn advection_of_single_mode() {
        let g = Geometry::new(1, 16, [2.0, 0.0, 0.0]).unwrap();
        let beta = 1.3;
        let spec = BasisSpec::new(3, beta, [0.0; 3]).unwrap();
        let w = 2.0 * PI / 2.0;
        let f = SpatialField::from_fn(g, spec, |x, out| {
            out[0] = (w * x[0]).sin();
            Ok(())
        })
        .unwrap();
        let h = advection_rhs(&f, &FourierPlan::new(g));
        for j in 0..16 {
            let x = g.position(j)[0];
            let p = h.point(j);
            for (r, v) in p.iter().enumerate() {
                let want = if r == rank([1, 0, 0]) { w * (w * x).cos() / beta } else { 0.0 };
                assert!((v - want).abs() < 1e-13, "rank {r}: {v} vs {want}");
            }
        }
    }

    #[test]
    fn advection_of_constant_vanishes() {
        let g = Geometry::new(3, 4, [1.0; 3]).unwrap();
        let spec = BasisSpec::new(4, 0.8, [0.3, -0.1, 0.2]).unwrap();
        let f = SpatialField::from_fn(g, spec, |_, out| {
            for (r, x) in out.iter_mut().enumerate() {
                *x = 1.0 / (1.0 + r as f64);
            }
            Ok(())
        })
        .unwrap();
        let h = advection_rhs(&f, &FourierPlan::new(g));
        assert!(h.data().iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn cfl_step() {
        let spec = BasisSpec::new(6, 1.0, [0.0; 3]).unwrap();
        let g16 = Geometry::new(1, 16, [2.0; 3]).unwrap();
        let g32 = Geometry::new(1, 32, [2.0; 3]).unwrap();
        let a = cfl_dt(&spec, &g16, 0.5, 1.0);
        let b = cfl_dt(&spec, &g32, 0.5, 1.0);
        assert!((a / b - 2.0).abs() < 1e-14);
        let zero = BasisSpec::new(0, 1.0, [0.0; 3]).unwrap();
        assert_eq!(cfl_dt(&zero, &g16, 0.5, 0.25), 0.25);
        let mut last = f64::INFINITY;
        for n in 1..=20 {
            let dt = cfl_dt(&spec.with_order(n), &g16, 0.5, 1.0);
            assert!(dt < last);
            last = dt;
        }
    }
}
