//! Coefficient vectors at many collocation points sharing one basis.

use super::basis::{BasisSpec, CoeffVector};
use super::multi_index::term_count;
use crate::error::{invalid, Result};

/// `points` coefficient vectors stored point-major (each point contiguous).
/// A homogeneous problem is a field with a single point.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffField {
    spec: BasisSpec,
    points: usize,
    data: Vec<f64>,
}

impl CoeffField {
    pub fn zeros(spec: BasisSpec, points: usize) -> Self {
        CoeffField { spec, points, data: vec![0.0; points * spec.term_count()] }
    }

    pub fn from_vec(spec: BasisSpec, points: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != points * spec.term_count() {
            return invalid(format!(
                "field data length {} does not match {points} points of {} terms",
                data.len(),
                spec.term_count()
            ));
        }
        Ok(CoeffField { spec, points, data })
    }

    pub fn from_coeffs(c: &CoeffVector) -> Self {
        CoeffField { spec: *c.spec(), points: 1, data: c.as_slice().to_vec() }
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn stride(&self) -> usize {
        self.spec.term_count()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn point(&self, j: usize) -> &[f64] {
        let s = self.stride();
        &self.data[j * s..(j + 1) * s]
    }

    pub fn point_mut(&mut self, j: usize) -> &mut [f64] {
        let s = self.stride();
        &mut self.data[j * s..(j + 1) * s]
    }

    /// Coefficient vector of point `j`.
    pub fn coeffs(&self, j: usize) -> CoeffVector {
        CoeffVector::from_vec(self.spec, self.point(j).to_vec()).expect("consistent stride")
    }

    /// Changes the order at every point by truncation or zero padding.
    pub fn resize_order(&mut self, order: u32) {
        if order == self.spec.order {
            return;
        }
        let old = self.stride();
        let new = term_count(order);
        let keep = old.min(new);
        let mut data = vec![0.0; self.points * new];
        for j in 0..self.points {
            data[j * new..j * new + keep].copy_from_slice(&self.data[j * old..j * old + keep]);
        }
        self.data = data;
        self.spec.order = order;
    }

    /// Replaces the basis description without touching coefficients.
    pub(crate) fn set_spec(&mut self, spec: BasisSpec) {
        assert_eq!(spec.term_count(), self.stride());
        self.spec = spec;
    }
}
