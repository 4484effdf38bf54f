//! L2 distances in velocity (and physical) space by tensor Gauss-Hermite
//! quadrature.

use super::spatial::SpatialField;
use crate::error::{invalid, Result};
use crate::hermite::{eval_basis_1d_into, quadrature::gauss_hermite, BasisSpec, CoeffVector, IndexSet};
use crate::par;

/// Nodes per velocity axis.
pub const L2_NODES: usize = 64;

/// Tensor grid of velocities with weights for plain (unweighted) integrals.
#[derive(Debug, Clone)]
pub struct VelocityGrid {
    pub nodes: [Vec<f64>; 3],
    pub weights: [Vec<f64>; 3],
}

impl VelocityGrid {
    /// Gauss-Hermite grid for integrands decaying like `exp(-alpha^2 |v - centre|^2)`.
    pub fn new(alpha: f64, centre: [f64; 3]) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return invalid(format!("grid scale must be positive, got {alpha}"));
        }
        let rule = gauss_hermite(L2_NODES)?;
        let s = std::f64::consts::SQRT_2 / alpha;
        let w: Vec<f64> = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * (x * x).exp() * s).collect();
        let nodes = centre.map(|c| rule.nodes.iter().map(|x| c + s * x).collect::<Vec<_>>());
        Ok(VelocityGrid { nodes, weights: [w.clone(), w.clone(), w] })
    }

    pub fn len(&self) -> usize {
        self.nodes[0].len() * self.nodes[1].len() * self.nodes[2].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn velocity(&self, i: [usize; 3]) -> [f64; 3] {
        [self.nodes[0][i[0]], self.nodes[1][i[1]], self.nodes[2][i[2]]]
    }

    /// Weight of grid point `(i0, i1, i2)`, flattened with axis 2 fastest.
    pub fn weight(&self, flat: usize) -> f64 {
        let n1 = self.nodes[1].len();
        let n2 = self.nodes[2].len();
        let (i0, r) = (flat / (n1 * n2), flat % (n1 * n2));
        self.weights[0][i0] * self.weights[1][r / n2] * self.weights[2][r % n2]
    }
}

/// Values of the expansion on the grid, flattened with axis 2 fastest.
/// The three axis contractions are done one after another.
pub fn eval_on_grid(coeffs: &[f64], spec: &BasisSpec, grid: &VelocityGrid) -> Vec<f64> {
    let n = spec.order as usize + 1;
    let mut dense = vec![0.0; n * n * n];
    for (k, c) in IndexSet::new(spec.order).indices().iter().zip(coeffs) {
        dense[(k[0] as usize * n + k[1] as usize) * n + k[2] as usize] = *c;
    }
    let tabs: Vec<Vec<f64>> = (0..3)
        .map(|d| {
            let mut t = vec![0.0; grid.nodes[d].len() * n];
            for (i, v) in grid.nodes[d].iter().enumerate() {
                eval_basis_1d_into(spec.beta, v - spec.zeta[d], &mut t[i * n..(i + 1) * n]);
            }
            t
        })
        .collect();
    let (m0, m1, m2) = (grid.nodes[0].len(), grid.nodes[1].len(), grid.nodes[2].len());
    // t1[k0][k1][i2]
    let mut t1 = vec![0.0; n * n * m2];
    for k01 in 0..n * n {
        let src = &dense[k01 * n..(k01 + 1) * n];
        for i2 in 0..m2 {
            let row = &tabs[2][i2 * n..(i2 + 1) * n];
            t1[k01 * m2 + i2] = src.iter().zip(row).map(|(a, b)| a * b).sum();
        }
    }
    // t2[k0][i1][i2]
    let mut t2 = vec![0.0; n * m1 * m2];
    for k0 in 0..n {
        for i1 in 0..m1 {
            let dst = &mut t2[(k0 * m1 + i1) * m2..(k0 * m1 + i1 + 1) * m2];
            for k1 in 0..n {
                let w = tabs[1][i1 * n + k1];
                if w == 0.0 {
                    continue;
                }
                let src = &t1[(k0 * n + k1) * m2..(k0 * n + k1 + 1) * m2];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += w * s;
                }
            }
        }
    }
    let mut out = vec![0.0; m0 * m1 * m2];
    for i0 in 0..m0 {
        let dst = &mut out[i0 * m1 * m2..(i0 + 1) * m1 * m2];
        for k0 in 0..n {
            let w = tabs[0][i0 * n + k0];
            let src = &t2[k0 * m1 * m2..(k0 + 1) * m1 * m2];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += w * s;
            }
        }
    }
    out
}

fn squared_distance(a: &[f64], b: &[f64], grid: &VelocityGrid) -> f64 {
    a.iter().zip(b).enumerate().map(|(i, (x, y))| grid.weight(i) * (x - y) * (x - y)).sum()
}

/// `||f_a - f_b||_2` over velocity space.
pub fn l2_error(a: &CoeffVector, b: &CoeffVector) -> Result<f64> {
    let (sa, sb) = (a.spec(), b.spec());
    let grid = VelocityGrid::new(sa.beta.min(sb.beta), sa.zeta)?;
    let fa = eval_on_grid(a.as_slice(), sa, &grid);
    let fb = eval_on_grid(b.as_slice(), sb, &grid);
    Ok(squared_distance(&fa, &fb, &grid).sqrt())
}

/// `||f_a - f||_2` for a function `f`; `beta_hint` is the Gaussian decay
/// scale of `f` (the grid uses the smaller of it and the basis scaling).
pub fn l2_error_fn<F>(a: &CoeffVector, f: F, beta_hint: f64) -> Result<f64>
where
    F: Fn([f64; 3]) -> f64,
{
    let sa = a.spec();
    let grid = VelocityGrid::new(sa.beta.min(beta_hint), sa.zeta)?;
    let fa = eval_on_grid(a.as_slice(), sa, &grid);
    let (m1, m2) = (grid.nodes[1].len(), grid.nodes[2].len());
    let fb: Vec<f64> = (0..fa.len())
        .map(|i| grid.velocity([i / (m1 * m2), (i / m2) % m1, i % m2]))
        .map(f)
        .collect();
    Ok(squared_distance(&fa, &fb, &grid).sqrt())
}

/// `sqrt(sum_j |cell| ||f_a(x_j) - f_b(x_j)||^2)` for fields on the same
/// grid.
pub fn l2_error_field(a: &SpatialField, b: &SpatialField) -> Result<f64> {
    if a.geometry != b.geometry {
        return invalid("fields live on different grids");
    }
    let (sa, sb) = (*a.spec(), *b.spec());
    let grid = VelocityGrid::new(sa.beta.min(sb.beta), sa.zeta)?;
    let per_point = par::map_range(a.geometry.points(), |j| {
        let fa = eval_on_grid(a.field.point(j), &sa, &grid);
        let fb = eval_on_grid(b.field.point(j), &sb, &grid);
        squared_distance(&fa, &fb, &grid)
    });
    let total: f64 = per_point.iter().sum();
    Ok((total * a.geometry.cell_volume()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::eval_f;
    use crate::moments::maxwellian_coeffs;
    use crate::projection::project_scale;
    use std::f64::consts::PI;

    #[test]
    fn grid_matches_pointwise_evaluation() {
        let spec = BasisSpec::new(4, 0.9, [0.2, 0.0, -0.1]).unwrap();
        let c = maxwellian_coeffs(1.0, [0.3, 0.1, 0.0], 1.1, &spec).unwrap();
        let grid = VelocityGrid::new(0.9, spec.zeta).unwrap();
        let vals = eval_on_grid(c.as_slice(), &spec, &grid);
        for idx in [[0, 0, 0], [31, 32, 30], [10, 50, 63]] {
            let flat = (idx[0] * 64 + idx[1]) * 64 + idx[2];
            let want = eval_f(&c, grid.velocity(idx));
            assert!((vals[flat] - want).abs() <= 1e-14 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn zero_for_equal_inputs() {
        let spec = BasisSpec::new(5, 1.2, [0.0; 3]).unwrap();
        let c = maxwellian_coeffs(1.0, [0.1, 0.0, 0.0], 0.8, &spec).unwrap();
        assert_eq!(l2_error(&c, &c).unwrap(), 0.0);
    }

    #[test]
    fn density_offset_against_closed_form() {
        let theta: f64 = 0.9;
        let spec = BasisSpec::new(8, 1.0 / theta.sqrt(), [0.0; 3]).unwrap();
        let delta = 1e-3;
        let a = maxwellian_coeffs(1.0, [0.0; 3], theta, &spec).unwrap();
        let b = maxwellian_coeffs(1.0 + delta, [0.0; 3], theta, &spec).unwrap();
        let norm = (4.0 * PI * theta).powf(-0.75);
        assert!((l2_error(&a, &b).unwrap() - delta * norm).abs() < 1e-10);
    }

    #[test]
    fn invariant_under_reprojection_of_low_degrees() {
        let spec = BasisSpec::new(8, 1.0, [0.0; 3]).unwrap();
        let mut a = CoeffVector::zeros(spec);
        // degrees <= N - 2 only
        let set = IndexSet::new(6);
        for (r, _) in set.indices().iter().enumerate() {
            a.as_mut_slice()[r] = 0.1 / (1.0 + r as f64);
        }
        let b = maxwellian_coeffs(1.0, [0.0; 3], 1.0, &spec).unwrap();
        let before = l2_error(&a, &b).unwrap();
        let a2 = project_scale(&project_scale(&a, 1.05).unwrap(), 1.0).unwrap();
        assert!((l2_error(&a2, &b).unwrap() - before).abs() < 1e-10);
    }
}
