//! Offline assembly of the collision tensor.
//!
//! The weak form used is
//!
//! ```text
//! A_k^{ij} = int int HH_i(v_*) HH_j(v) int B(|g|, omega) [H_k(v') - H_k(v)] domega dv dv_*
//! ```
//!
//! symmetrised in `(i, j)`. In centre-of-mass variables `V = (v + v_*)/2`,
//! `g = v - v_*` the Gaussian weights separate into `exp(-beta^2 |V|^2)` and
//! `exp(-beta^2 |g|^2 / 4)`, and the remaining integrand is a polynomial of
//! degree at most `3 N0` times `|g|^s`. Each integration is then done by a
//! rule that is exact for that polynomial degree:
//!
//! * `V`: tensor Gauss-Hermite per axis,
//! * `|g|`: generalised Gauss-Laguerre in `t = beta^2 |g|^2 / 4`, absorbing `|g|^s`,
//! * direction of `g`: Gauss-Legendre in the polar cosine times a uniform
//!   azimuthal rule (antipodally symmetric),
//! * `omega`: Gauss rule for `(1 - mu) b(mu) dmu` in the polar cosine about
//!   `g`, times a uniform azimuthal rule.
//!
//! For fixed `g` and `omega` the `V` integral factorises over the three axes,
//! so only 1D tables have to be formed before the triple product is
//! accumulated. Entries that vanish by parity are never computed.

use super::kernel::KernelSpec;
use crate::error::{invalid, Result};
use crate::hermite::quadrature::{gauss_hermite, gauss_laguerre, gauss_legendre};
use crate::hermite::{eval_poly_1d_into, term_count, IndexSet};
use crate::par;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Node counts of the velocity, relative-speed and relative-direction rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadOrders {
    /// Gauss-Hermite nodes per axis for the centre-of-mass velocity.
    pub velocity: u32,
    /// Gauss-Laguerre nodes for the relative speed.
    pub radial: u32,
    /// Gauss-Legendre nodes in the polar cosine of the relative velocity;
    /// the azimuthal rule uses twice as many points.
    pub sphere: u32,
}

impl QuadOrders {
    /// Smallest orders that integrate the weak form exactly for order `n0`.
    pub fn exact_for(n0: u32) -> Self {
        let full = 3 * n0;
        QuadOrders {
            velocity: (full + 2) / 2,
            radial: (full / 2 + 2) / 2,
            sphere: (full + 2) / 2,
        }
    }

    /// Rejects orders too low for exact integration.
    pub fn check(&self, n0: u32) -> Result<()> {
        let need = Self::exact_for(n0);
        if self.velocity < need.velocity || self.radial < need.radial || self.sphere < need.sphere {
            return invalid(format!(
                "quadrature orders {self:?} are below the exact minimum {need:?} for N0 = {n0}"
            ));
        }
        Ok(())
    }
}

/// Node counts of the scattering-angle rule: polar cosine and azimuth.
pub fn angular_orders(n0: u32) -> (usize, usize) {
    ((n0 as usize + 1) / 2 + 1, n0 as usize + 2)
}

/// Triples `(k, i, j)` whose parity allows a non-zero entry, with their
/// offsets into the 1D tables and the dense tensor.
struct TripleList {
    axis: [Vec<u32>; 3],
    dense: Vec<usize>,
}

impl TripleList {
    fn new(n0: u32) -> Self {
        let set = IndexSet::new(n0);
        let m = n0 as usize + 1;
        let t = set.len();
        let mut axis: [Vec<u32>; 3] = Default::default();
        let mut dense = Vec::new();
        for (rk, k) in set.indices().iter().enumerate() {
            for (ri, i) in set.indices().iter().enumerate() {
                for (rj, j) in set.indices().iter().enumerate() {
                    if (0..3).all(|d| (k[d] + i[d] + j[d]) % 2 == 0) {
                        for d in 0..3 {
                            let off = (k[d] as usize * m + i[d] as usize) * m + j[d] as usize;
                            axis[d].push(off as u32);
                        }
                        dense.push((rk * t + ri) * t + rj);
                    }
                }
            }
        }
        TripleList { axis, dense }
    }

    fn len(&self) -> usize {
        self.dense.len()
    }
}

struct Rules {
    v_nodes: Vec<f64>,
    v_weights: Vec<f64>,
    // relative velocity vectors and weights
    g: Vec<([f64; 3], f64)>,
    // scattering directions in the frame (g-hat, e1, e2): (cos, sin cos, sin sin, weight)
    omega: Vec<([f64; 3], f64)>,
    omega_total: f64,
}

fn build_rules(kernel: &KernelSpec, n0: u32, beta: f64, orders: QuadOrders) -> Result<Rules> {
    let s = kernel.speed_exponent();
    let gh = gauss_hermite(orders.velocity as usize)?;
    let v_nodes = gh.nodes.iter().map(|x| x / beta).collect();
    let v_weights = gh.weights.iter().map(|w| w / beta).collect();

    let lag = gauss_laguerre(orders.radial as usize, 0.5 * (1.0 + s))?;
    let radial_scale = 2f64.powf(2.0 + s) * beta.powf(-3.0 - s);
    let polar = gauss_legendre(orders.sphere as usize)?;
    let n_az = 2 * orders.sphere as usize;
    let mut g = Vec::new();
    for (&t, &wt) in lag.nodes.iter().zip(&lag.weights) {
        let r = 2.0 * t.sqrt() / beta;
        for (&z, &wz) in polar.nodes.iter().zip(&polar.weights) {
            let st = (1.0 - z * z).max(0.0).sqrt();
            for b in 0..n_az {
                let phi = 2.0 * PI * b as f64 / n_az as f64;
                let dir = [st * phi.cos(), st * phi.sin(), z];
                let w = wt * radial_scale * wz * 2.0 * PI / n_az as f64;
                g.push(([r * dir[0], r * dir[1], r * dir[2]], w));
            }
        }
    }

    let (n_mu, n_phi) = angular_orders(n0);
    let ang = kernel.angular_rule(n_mu)?;
    let mut omega = Vec::new();
    let mut omega_total = 0.0;
    for (&mu, &w) in ang.nodes.iter().zip(&ang.weights) {
        let wm = w / (1.0 - mu) * 2.0 * PI / n_phi as f64;
        let sm = (1.0 - mu * mu).max(0.0).sqrt();
        for b in 0..n_phi {
            let phi = 2.0 * PI * b as f64 / n_phi as f64;
            omega.push(([mu, sm * phi.cos(), sm * phi.sin()], wm));
            omega_total += wm;
        }
    }
    Ok(Rules { v_nodes, v_weights, g, omega, omega_total })
}

/// Orthonormal frame `(e1, e2)` perpendicular to the unit vector `n`.
fn frame(n: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let a = if n[0].abs() <= n[1].abs() && n[0].abs() <= n[2].abs() {
        [1.0, 0.0, 0.0]
    } else if n[1].abs() <= n[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let cross = |x: [f64; 3], y: [f64; 3]| {
        [x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]]
    };
    let e1 = cross(n, a);
    let len = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    let e1 = [e1[0] / len, e1[1] / len, e1[2] / len];
    (e1, cross(n, e1))
}

/// Dense entries `[k][i][j]` of the tensor for scaling `beta`, centre zero.
pub fn assemble_entries(kernel: &KernelSpec, n0: u32, beta: f64, orders: QuadOrders) -> Result<Vec<f64>> {
    kernel.validate()?;
    orders.check(n0)?;
    if !(beta > 0.0 && beta.is_finite()) {
        return invalid(format!("assembly scaling must be positive, got {beta}"));
    }
    let rules = build_rules(kernel, n0, beta, orders)?;
    let triples = TripleList::new(n0);
    let m = n0 as usize + 1;
    let nv = rules.v_nodes.len();
    let strength = kernel.strength();

    // a fixed number of blocks keeps the summation order independent of the
    // thread count
    let n_blocks = rules.g.len().min(16);
    let partials = par::map_range(n_blocks, |b| {
        let lo = b * rules.g.len() / n_blocks;
        let hi = (b + 1) * rules.g.len() / n_blocks;
        let mut acc = vec![0.0; triples.len()];
        let mut sum = vec![0.0; triples.len()];
        let mut hi_tab = vec![0.0; nv * m];
        let mut hj_tab = vec![0.0; nv * m];
        let mut hk_tab = vec![0.0; nv * m];
        let mut pair = vec![vec![0.0; nv * m * m]; 3];
        let mut loss = vec![vec![0.0; m * m * m]; 3];
        let mut gain = vec![vec![0.0; m * m * m]; 3];
        for &(g, wg) in &rules.g[lo..hi] {
            let r = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
            let ghat = [g[0] / r, g[1] / r, g[2] / r];
            let (e1, e2) = frame(ghat);
            for d in 0..3 {
                for x in 0..nv {
                    let vx = rules.v_nodes[x];
                    eval_poly_1d_into(beta, vx - 0.5 * g[d], &mut hi_tab[x * m..(x + 1) * m]);
                    eval_poly_1d_into(beta, vx + 0.5 * g[d], &mut hj_tab[x * m..(x + 1) * m]);
                    let w = rules.v_weights[x];
                    for i in 0..m {
                        for j in 0..m {
                            pair[d][(x * m + i) * m + j] = w * hi_tab[x * m + i] * hj_tab[x * m + j];
                        }
                    }
                }
                contract(&pair[d], &hj_tab, nv, m, &mut loss[d]);
            }
            let (l0, l1, l2) = (&loss[0], &loss[1], &loss[2]);
            let (a0, a1, a2) = (&triples.axis[0], &triples.axis[1], &triples.axis[2]);
            for t in 0..triples.len() {
                sum[t] = -rules.omega_total
                    * l0[a0[t] as usize]
                    * l1[a1[t] as usize]
                    * l2[a2[t] as usize];
            }
            for &(om, wo) in &rules.omega {
                let shift = [
                    0.5 * r * (om[0] * ghat[0] + om[1] * e1[0] + om[2] * e2[0]),
                    0.5 * r * (om[0] * ghat[1] + om[1] * e1[1] + om[2] * e2[1]),
                    0.5 * r * (om[0] * ghat[2] + om[1] * e1[2] + om[2] * e2[2]),
                ];
                for d in 0..3 {
                    for x in 0..nv {
                        let vx = rules.v_nodes[x];
                        eval_poly_1d_into(beta, vx + shift[d], &mut hk_tab[x * m..(x + 1) * m]);
                    }
                    contract(&pair[d], &hk_tab, nv, m, &mut gain[d]);
                }
                let (g0, g1, g2) = (&gain[0], &gain[1], &gain[2]);
                for t in 0..triples.len() {
                    sum[t] += wo * g0[a0[t] as usize] * g1[a1[t] as usize] * g2[a2[t] as usize];
                }
            }
            let w = strength * wg;
            for t in 0..triples.len() {
                acc[t] += w * sum[t];
            }
        }
        acc
    });

    let tc = term_count(n0);
    let mut dense = vec![0.0; tc * tc * tc];
    for part in &partials {
        for (t, &pos) in triples.dense.iter().enumerate() {
            dense[pos] += part[t];
        }
    }
    for k in 0..tc {
        for i in 0..tc {
            for j in (i + 1)..tc {
                let a = (k * tc + i) * tc + j;
                let b = (k * tc + j) * tc + i;
                let s = 0.5 * (dense[a] + dense[b]);
                dense[a] = s;
                dense[b] = s;
            }
        }
    }
    Ok(dense)
}

/// `out[k][i][j] = sum_x h[x][k] pair[x][i][j]`.
fn contract(pair: &[f64], h: &[f64], nv: usize, m: usize, out: &mut [f64]) {
    out.iter_mut().for_each(|x| *x = 0.0);
    let mm = m * m;
    for x in 0..nv {
        let p = &pair[x * mm..(x + 1) * mm];
        for k in 0..m {
            let hk = h[x * m + k];
            let o = &mut out[k * mm..(k + 1) * mm];
            for (a, b) in o.iter_mut().zip(p) {
                *a += hk * b;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_orders() {
        assert_eq!(QuadOrders::exact_for(4), QuadOrders { velocity: 7, radial: 4, sphere: 7 });
        assert_eq!(QuadOrders::exact_for(6), QuadOrders { velocity: 10, radial: 5, sphere: 10 });
        assert!(QuadOrders { velocity: 6, radial: 4, sphere: 7 }.check(4).is_err());
        assert_eq!(angular_orders(4), (3, 6));
    }

    #[test]
    fn frame_is_orthonormal() {
        for n in [[0.0, 0.0, 1.0], [0.6, 0.8, 0.0], [1.0 / 3f64.sqrt(); 3]] {
            let (a, b) = frame(n);
            let dot = |x: [f64; 3], y: [f64; 3]| x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
            assert!(dot(a, n).abs() < 1e-15 && dot(b, n).abs() < 1e-15 && dot(a, b).abs() < 1e-15);
            assert!((dot(a, a) - 1.0).abs() < 1e-15 && (dot(b, b) - 1.0).abs() < 1e-15);
        }
    }
}
