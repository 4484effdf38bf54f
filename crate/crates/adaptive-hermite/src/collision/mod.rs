//! Collision kernels, tensor assembly and evaluation of the collision term.

mod assembly;
pub mod cache;
mod kernel;
mod tensor;

pub use assembly::{angular_orders, assemble_entries, QuadOrders};
pub use kernel::{deflection_angle, kernel_eval, KernelSpec};
pub use tensor::{
    assemble_tensor, collide, collide_into, power_iteration, scale_factor, CollisionTensor,
};
