//! Periodic collocation grids and coefficient fields on them.

use crate::error::{invalid, Result};
use crate::hermite::{BasisSpec, CoeffField};
use serde::{Deserialize, Serialize};

/// Equispaced periodic grid with `m` points per axis on `[0, L_d)`,
/// `d < dim`. Point `j` has axis indices `i_d = (j / m^d) % m`, so axis 0
/// varies fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub dim: usize,
    pub m: usize,
    pub lengths: [f64; 3],
}

impl Geometry {
    pub fn new(dim: usize, m: usize, lengths: [f64; 3]) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return invalid(format!("spatial dimension must be 1, 2 or 3, got {dim}"));
        }
        if m < 2 || m % 2 == 1 {
            return invalid(format!("points per axis must be even and at least 2, got {m}"));
        }
        if lengths[..dim].iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return invalid("domain lengths must be positive");
        }
        Ok(Geometry { dim, m, lengths })
    }

    pub fn points(&self) -> usize {
        self.m.pow(self.dim as u32)
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.m as f64
    }

    /// Volume of one cell.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|d| self.spacing(d)).product()
    }

    pub fn axis_indices(&self, j: usize) -> [usize; 3] {
        let mut idx = [0; 3];
        let mut r = j;
        for slot in idx.iter_mut().take(self.dim) {
            *slot = r % self.m;
            r /= self.m;
        }
        idx
    }

    /// Position of point `j`; unused axes are zero.
    pub fn position(&self, j: usize) -> [f64; 3] {
        let idx = self.axis_indices(j);
        let mut x = [0.0; 3];
        for d in 0..self.dim {
            x[d] = idx[d] as f64 * self.spacing(d);
        }
        x
    }
}

/// Hermite coefficients at every collocation point of a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialField {
    pub geometry: Geometry,
    pub field: CoeffField,
}

impl SpatialField {
    pub fn new(geometry: Geometry, field: CoeffField) -> Result<Self> {
        if field.points() != geometry.points() {
            return invalid(format!(
                "field has {} points, grid has {}",
                field.points(),
                geometry.points()
            ));
        }
        Ok(SpatialField { geometry, field })
    }

    pub fn zeros(geometry: Geometry, spec: BasisSpec) -> Self {
        SpatialField { geometry, field: CoeffField::zeros(spec, geometry.points()) }
    }

    /// Fills every point from `f(position, out)`.
    pub fn from_fn<F>(geometry: Geometry, spec: BasisSpec, f: F) -> Result<Self>
    where
        F: Fn([f64; 3], &mut [f64]) -> Result<()>,
    {
        let mut out = Self::zeros(geometry, spec);
        for j in 0..geometry.points() {
            f(geometry.position(j), out.field.point_mut(j))?;
        }
        Ok(out)
    }

    pub fn spec(&self) -> &BasisSpec {
        self.field.spec()
    }

    pub fn is_finite(&self) -> bool {
        self.field.data().iter().all(|x| x.is_finite())
    }
}
