//! Explicit time steps: classical RK4 for the homogeneous system and the
//! three-stage SSP Runge-Kutta scheme (Shu-Osher form) for the transport
//! problem.

use super::fourier::{advection_rhs, FourierPlan};
use super::spatial::SpatialField;
use crate::collision::{collide_into, CollisionTensor};
use crate::error::{invalid, Error, Result};
use crate::hermite::{CoeffField, CoeffVector};
use crate::par;
use std::sync::Mutex;

/// Collision term at every point of `field`, written to `out`.
pub fn collision_field(tensor: &CollisionTensor, field: &CoeffField, nu: f64, out: &mut [f64]) -> Result<()> {
    let stride = field.stride();
    if out.len() != field.data().len() {
        return invalid("output buffer does not match the field");
    }
    let spec = *field.spec();
    let failure = Mutex::new(None);
    par::for_each_chunk(out, stride, |j, o| {
        if let Err(e) = collide_into(tensor, &spec, field.point(j), nu, o) {
            failure.lock().unwrap().get_or_insert(e);
        }
    });
    match failure.into_inner().unwrap() {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn check_finite(data: &[f64], what: &str, dt: f64) -> Result<()> {
    if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
        let max = data.iter().filter(|x| x.is_finite()).fold(0.0f64, |m, x| m.max(x.abs()));
        return Err(Error::Numeric(format!(
            "{what} step with dt = {dt:.3e} became unstable: non-finite value at offset {pos}, \
             largest finite magnitude {max:.3e}"
        )));
    }
    Ok(())
}

fn check_step(eps: f64, dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return invalid(format!("time step must be positive, got {dt}"));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return invalid(format!("Knudsen number must be positive, got {eps}"));
    }
    Ok(())
}

/// One classical RK4 step of `df/dt = Q(f) / eps` at every point of `field`.
pub fn rk4_field(field: &CoeffField, tensor: &CollisionTensor, nu: f64, eps: f64, dt: f64) -> Result<CoeffField> {
    check_step(eps, dt)?;
    let n = field.data().len();
    let f0 = field.data();
    let mut stage = field.clone();
    let mut k = vec![0.0; n];
    let mut acc = f0.to_vec();
    let weights = [1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0];
    let shifts = [0.5, 0.5, 1.0];
    for s in 0..4 {
        collision_field(tensor, &stage, nu, &mut k)?;
        let w = weights[s] * dt / eps;
        for (a, q) in acc.iter_mut().zip(&k) {
            *a += w * q;
        }
        if s < 3 {
            let c = shifts[s] * dt / eps;
            for ((x, base), q) in stage.data_mut().iter_mut().zip(f0).zip(&k) {
                *x = base + c * q;
            }
        }
    }
    check_finite(&acc, "RK4", dt)?;
    CoeffField::from_vec(*field.spec(), field.points(), acc)
}

/// One classical RK4 step of the homogeneous system.
pub fn step_homogeneous(
    coeffs: &CoeffVector,
    tensor: &CollisionTensor,
    nu: f64,
    eps: f64,
    dt: f64,
) -> Result<CoeffVector> {
    let out = rk4_field(&CoeffField::from_coeffs(coeffs), tensor, nu, eps, dt)?;
    CoeffVector::from_vec(*coeffs.spec(), out.data().to_vec())
}

/// Right-hand side `-h + Q / eps` of the semi-discrete transport problem.
/// `eps = inf` switches collisions off.
pub fn transport_rhs(
    field: &SpatialField,
    plan: &FourierPlan,
    tensor: &CollisionTensor,
    nu: f64,
    eps: f64,
    out: &mut [f64],
) -> Result<()> {
    let h = advection_rhs(field, plan);
    if eps.is_infinite() {
        for (o, x) in out.iter_mut().zip(h.data()) {
            *o = -x;
        }
        return Ok(());
    }
    collision_field(tensor, &field.field, nu, out)?;
    let inv = 1.0 / eps;
    for (o, x) in out.iter_mut().zip(h.data()) {
        *o = *o * inv - x;
    }
    Ok(())
}

/// One SSP-RK3 step from time `t`:
///
/// ```text
/// f1 = f + dt L(f, t)
/// f2 = 3/4 f + 1/4 (f1 + dt L(f1, t + dt))
/// f3 = 1/3 f + 2/3 (f2 + dt L(f2, t + dt/2))
/// ```
pub fn step_nonhomogeneous<E>(
    field: &SpatialField,
    plan: &FourierPlan,
    tensor: &CollisionTensor,
    nu: f64,
    eps: E,
    t: f64,
    dt: f64,
) -> Result<SpatialField>
where
    E: Fn(f64) -> f64,
{
    let (e0, e1, e2) = (eps(t), eps(t + dt), eps(t + 0.5 * dt));
    for e in [e0, e1, e2] {
        if !(e > 0.0) {
            return invalid(format!("Knudsen number must be positive, got {e}"));
        }
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return invalid(format!("time step must be positive, got {dt}"));
    }
    let n = field.field.data().len();
    let f0 = field.field.data();
    let mut l = vec![0.0; n];

    transport_rhs(field, plan, tensor, nu, e0, &mut l)?;
    let mut stage = field.clone();
    for ((x, a), b) in stage.field.data_mut().iter_mut().zip(f0).zip(&l) {
        *x = a + dt * b;
    }

    transport_rhs(&stage, plan, tensor, nu, e1, &mut l)?;
    for ((x, a), b) in stage.field.data_mut().iter_mut().zip(f0).zip(&l) {
        *x = 0.75 * a + 0.25 * (*x + dt * b);
    }

    transport_rhs(&stage, plan, tensor, nu, e2, &mut l)?;
    for ((x, a), b) in stage.field.data_mut().iter_mut().zip(f0).zip(&l) {
        *x = a / 3.0 + 2.0 / 3.0 * (*x + dt * b);
    }
    check_finite(stage.field.data(), "SSP-RK3", dt)?;
    Ok(stage)
}
