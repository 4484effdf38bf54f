//! Order (p) and scaling adaptation driven by the frequency indicator.

mod indicator;
mod params;

pub use indicator::{degree_energy, indicator, indicator_from_energy, indicator_hom, tail_width};
pub use params::{AdaptiveParams, AdaptiveState, Adjustment, AdjustmentKind, ScalingMesh};

use crate::error::Result;
use crate::hermite::CoeffField;
use crate::par;
use crate::projection::project_field;

/// Adjusts the expansion order of `field` from its indicator.
///
/// The order grows by `delta_n` (zero padding) while the indicator exceeds
/// the upper threshold and `n_max` allows it. Otherwise it shrinks by
/// `delta_n` while the indicator stays below the lower threshold, the
/// truncated expansion also passes the test, and the order stays at or above
/// `n_min`. Returns whether the order changed.
pub fn p_adapt(
    field: &mut CoeffField,
    state: &mut AdaptiveState,
    params: &AdaptiveParams,
    time: f64,
) -> Result<bool> {
    let start_order = field.spec().order;
    let f_h = (params.etah_p * state.f_ref_p).max(params.f_h0);
    let f_l = (params.etal_p * state.f_ref_p).max(params.f_l0);
    let mut energy = degree_energy(field);
    let mut current = indicator_from_energy(&energy, start_order)?;
    let before = current;
    let mut flag = false;

    while current > f_h {
        flag = true;
        let n = field.spec().order;
        if n + params.delta_n > params.n_max {
            log::debug!("t = {time}: order {n} at its maximum, indicator {current:.3e} above {f_h:.3e}");
            break;
        }
        field.resize_order(n + params.delta_n);
        energy.resize(field.spec().order as usize + 1, 0.0);
        current = indicator_from_energy(&energy, field.spec().order)?;
        log::debug!("t = {time}: order {n} -> {} (indicator {current:.3e})", n + params.delta_n);
    }

    while !flag && current < f_l && field.spec().order >= params.n_min + params.delta_n {
        let trial = field.spec().order - params.delta_n;
        let trial_value = indicator_from_energy(&energy, trial)?;
        if trial_value < f_l {
            log::debug!("t = {time}: order {} -> {trial} (indicator {trial_value:.3e})", field.spec().order);
            field.resize_order(trial);
            energy.truncate(trial as usize + 1);
            current = trial_value;
        } else {
            // the trial does not change until the next step, so stop here
            break;
        }
    }

    let end_order = field.spec().order;
    let modified = end_order != start_order;
    if flag || (modified && current >= params.eta0_p * state.f_ref_p) {
        state.f_ref_p = current;
    }
    if modified {
        state.log.push(Adjustment {
            time,
            kind: AdjustmentKind::Order,
            old: start_order as f64,
            new: end_order as f64,
            indicator_before: before,
            indicator_after: current,
        });
    }
    Ok(modified)
}

/// Moves the scaling factor along the mesh while the indicator is outside
/// its dead band, choosing at each move the neighbour with the smaller
/// indicator. `m` is the mesh exponent of the current scaling factor and is
/// updated in place. Returns whether the scaling changed.
pub fn scale_adapt(
    field: &mut CoeffField,
    m: &mut i32,
    state: &mut AdaptiveState,
    params: &AdaptiveParams,
    mesh: &ScalingMesh,
    time: f64,
) -> Result<bool> {
    let start = *m;
    let mut current = indicator(field)?;
    let before = current;
    let mut moves = 0usize;
    while (current > params.etah_s * state.f_ref_s || current < params.etal_s * state.f_ref_s)
        && moves <= mesh.len()
    {
        let de = project_field(field, mesh.beta(*m + 1))?;
        let inc = project_field(field, mesh.beta(*m - 1))?;
        let f_de = indicator(&de)?;
        let f_in = indicator(&inc)?;
        // a move needs a strict improvement; equal candidates prefer the
        // smaller scaling factor
        if f_de < current && f_de <= f_in && mesh.contains(*m + 1) {
            *field = de;
            *m += 1;
            current = f_de;
        } else if f_in < current && f_in <= f_de && mesh.contains(*m - 1) {
            *field = inc;
            *m -= 1;
            current = f_in;
        } else {
            break;
        }
        moves += 1;
    }
    let changed = *m != start;
    if changed {
        state.f_ref_s = current;
        log::debug!(
            "t = {time}: scaling {} -> {} (indicator {before:.3e} -> {current:.3e})",
            mesh.beta(start),
            mesh.beta(*m)
        );
        state.log.push(Adjustment {
            time,
            kind: AdjustmentKind::Scale,
            old: mesh.beta(start),
            new: mesh.beta(*m),
            indicator_before: before,
            indicator_after: current,
        });
    }
    Ok(changed)
}

/// Chooses the initial scaling factor as the mesh point whose expansion has
/// the smallest indicator; ties go to the larger scaling factor.
///
/// `sample` returns the expansion of the initial data for a given scaling
/// factor. Returns the mesh exponent, the expansion and its indicator.
pub fn init_beta<S>(sample: S, mesh: &ScalingMesh) -> Result<(i32, CoeffField, f64)>
where
    S: Fn(f64) -> Result<CoeffField> + Sync + Send,
{
    let values = par::map_range(mesh.len(), |i| {
        let m = mesh.first() + i as i32;
        sample(mesh.beta(m)).and_then(|f| indicator(&f))
    });
    let mut best: Option<(i32, f64)> = None;
    for (i, v) in values.into_iter().enumerate() {
        let v = v?;
        let m = mesh.first() + i as i32;
        if best.is_none_or(|(_, b)| v < b) {
            best = Some((m, v));
        }
    }
    let (m, value) = best.expect("mesh is never empty");
    let field = sample(mesh.beta(m))?;
    Ok((m, field, value))
}
