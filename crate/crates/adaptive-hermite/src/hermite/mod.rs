//! Scaled Hermite basis, multi-index bookkeeping and quadrature rules.

mod basis;
mod field;
mod multi_index;
pub mod quadrature;

pub use basis::{
    advection_speed, eval_basis_1d, eval_basis_1d_into, eval_f, eval_poly_1d, BasisSpec,
    CoeffVector,
};
pub(crate) use basis::{eval_poly_1d_into, INV_FOURTH_ROOT_2PI};
pub use field::CoeffField;
pub use multi_index::{degree, rank, term_count, unrank, IndexSet, MultiIndex};
