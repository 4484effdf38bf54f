//! The adaptive time loop: initial scaling, evolution, scaling adaptation and
//! order adaptation after every full step.

use super::fourier::{cfl_dt, FourierPlan};
use super::norms::l2_error_fn;
use super::report::{ReportRow, RunReport};
use super::scenario::{calibrate_bkw, Initial, Scenario};
use super::spatial::{Geometry, SpatialField};
use super::stepping::{rk4_field, step_nonhomogeneous};
use crate::adaptivity::{
    indicator, init_beta, p_adapt, scale_adapt, AdaptiveParams, AdaptiveState, Adjustment,
};
use crate::collision::{CollisionTensor, KernelSpec};
use crate::error::{invalid, Error, Result};
use crate::hermite::{BasisSpec, CoeffField, CoeffVector};
use crate::moments::{density_velocity_temperature, macro_from_coeffs, MacroState};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Which adaptations run after each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Switches {
    None,
    Scale,
    P,
    ScaleP,
}

impl Switches {
    pub fn scale(self) -> bool {
        matches!(self, Switches::Scale | Switches::ScaleP)
    }

    pub fn order(self) -> bool {
        matches!(self, Switches::P | Switches::ScaleP)
    }
}

/// Discretisation and time-stepping settings of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Initial expansion order `N`.
    pub order: u32,
    /// Order of the quadratic collision block.
    pub n0: u32,
    /// Collocation points per spatial axis.
    pub m: usize,
    pub cfl: f64,
    /// Fixed time step of homogeneous runs.
    pub dt: f64,
    /// Upper bound on the CFL time step.
    pub dt_max: f64,
    pub t_end: f64,
    pub switches: Switches,
    pub adaptive: AdaptiveParams,
    /// Scaling factor used when scaling adaptation is off; defaults to
    /// `1 / sqrt(theta)` of the global equilibrium.
    pub beta: Option<f64>,
    /// Steps between report rows (the final time is always reported).
    pub report_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            order: 4,
            n0: 4,
            m: 16,
            cfl: 0.5,
            dt: 0.01,
            dt_max: 0.1,
            t_end: 1.0,
            switches: Switches::ScaleP,
            adaptive: AdaptiveParams::default(),
            beta: None,
            report_every: 1,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        self.adaptive.validate()?;
        if self.n0 > 8 {
            return invalid(format!("N0 = {} exceeds the supported maximum 8", self.n0));
        }
        if self.order < 2 {
            return invalid("the expansion order must be at least 2");
        }
        if self.switches.order() && !(self.adaptive.n_min..=self.adaptive.n_max).contains(&self.order) {
            return invalid("initial order must lie in [n_min, n_max] when order adaptation is on");
        }
        if self.m < 2 || self.m % 2 == 1 {
            return invalid(format!("points per axis must be even, got {}", self.m));
        }
        for (name, x) in [("cfl", self.cfl), ("dt", self.dt), ("dt_max", self.dt_max), ("t_end", self.t_end)] {
            if !(x > 0.0 && x.is_finite()) {
                return invalid(format!("{name} must be positive, got {x}"));
            }
        }
        if let Some(b) = self.beta {
            if !(b > 0.0 && b.is_finite()) {
                return invalid(format!("beta must be positive, got {b}"));
            }
        }
        if self.report_every == 0 {
            return invalid("report_every must be at least 1");
        }
        Ok(())
    }
}

/// Result of a run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub scenario: Scenario,
    /// Kernel actually used (after any calibration).
    pub kernel: KernelSpec,
    pub report: RunReport,
    pub adjustments: Vec<Adjustment>,
    pub geometry: Option<Geometry>,
    pub field: CoeffField,
    pub time: f64,
}

/// A failed run with everything computed up to the failure.
#[derive(Debug)]
pub struct RunFailure {
    pub error: Error,
    pub partial: Box<RunOutput>,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "run failed at t = {}: {}", self.partial.time, self.error)
    }
}

impl std::error::Error for RunFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// Domain-averaged density, velocity and temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub rho: f64,
    pub u: [f64; 3],
    pub theta: f64,
}

/// Mass, momentum and energy summed over all points (times the cell volume
/// for spatial fields).
pub fn conserved_totals(field: &CoeffField, geometry: Option<&Geometry>) -> Result<[f64; 5]> {
    let mut tot = [0.0; 5];
    for j in 0..field.points() {
        let (rho, u, theta) = density_velocity_temperature(&field.coeffs(j))?;
        tot[0] += rho;
        for d in 0..3 {
            tot[1 + d] += rho * u[d];
        }
        tot[4] += 0.5 * rho * (3.0 * theta + u.iter().map(|x| x * x).sum::<f64>());
    }
    let vol = geometry.map_or(1.0, |g| g.cell_volume());
    Ok(tot.map(|x| x * vol))
}

/// Equilibrium state with the same totals as `field`.
pub fn global_equilibrium(field: &CoeffField) -> Result<Equilibrium> {
    let t = conserved_totals(field, None)?;
    let rho = t[0] / field.points() as f64;
    let mut u = [t[1] / t[0], t[2] / t[0], t[3] / t[0]];
    // exact zeros keep symmetric problems symmetric
    for x in u.iter_mut() {
        if x.abs() < 1e-12 {
            *x = 0.0;
        }
    }
    let theta = (2.0 * t[4] / t[0] - u.iter().map(|x| x * x).sum::<f64>()) / 3.0;
    if !(rho > 0.0 && theta > 0.0) {
        return Err(Error::Numeric(format!("non-physical global state rho = {rho}, theta = {theta}")));
    }
    Ok(Equilibrium { rho, u, theta })
}

/// Expansion of the scenario's initial data at every point.
pub fn sample_initial(scenario: &Scenario, spec: BasisSpec, geometry: Option<&Geometry>) -> Result<CoeffField> {
    let points = geometry.map_or(1, |g| g.points());
    let mut f = CoeffField::zeros(spec, points);
    for j in 0..points {
        let x = geometry.map_or([0.0; 3], |g| g.position(j));
        scenario.initial(x).add_coeffs(&spec, f.point_mut(j))?;
    }
    Ok(f)
}

/// Gaussian decay scale of an exact solution, for the error quadrature.
fn decay_scale(exact: &Initial) -> f64 {
    match exact {
        Initial::Bkw { s } => 1.0 / s.sqrt(),
        Initial::Mixture(parts) => {
            let tmax = parts.iter().fold(0.0f64, |m, g| m.max(g.theta));
            1.0 / tmax.sqrt()
        }
    }
}

fn macro_errors(num: &MacroState, exact: &MacroState) -> [f64; 5] {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let du: Vec<f64> = (0..3).map(|d| num.u[d] - exact.u[d]).collect();
    let ds: Vec<f64> = (0..9).map(|i| num.sigma[i / 3][i % 3] - exact.sigma[i / 3][i % 3]).collect();
    let dq: Vec<f64> = (0..3).map(|d| num.q[d] - exact.q[d]).collect();
    [(num.rho - exact.rho).abs(), norm(&du), (num.theta - exact.theta).abs(), norm(&ds), norm(&dq)]
}

struct Loop<'a> {
    scenario: &'a Scenario,
    config: &'a SolverConfig,
    tensor: CollisionTensor,
    geometry: Option<Geometry>,
    plan: Option<FourierPlan>,
    equilibrium: Equilibrium,
    nu_cache: HashMap<u64, f64>,
    field: CoeffField,
    time: f64,
    report: RunReport,
    state: AdaptiveState,
}

impl Loop<'_> {
    fn nu(&mut self) -> Result<f64> {
        let spec = *self.field.spec();
        if spec.order <= self.tensor.n0() {
            return Ok(0.0);
        }
        let key = spec.beta.to_bits();
        if let Some(nu) = self.nu_cache.get(&key) {
            return Ok(*nu);
        }
        let e = self.equilibrium;
        let nu = self.tensor.relaxation_rate(spec.beta, spec.zeta, e.rho, e.u, e.theta)?;
        log::debug!("relaxation rate at beta = {:.6}: {nu:.6e}", spec.beta);
        self.nu_cache.insert(key, nu);
        Ok(nu)
    }

    fn step(&mut self, dt: f64) -> Result<()> {
        let nu = self.nu()?;
        let t = self.time;
        self.field = match (&self.geometry, &self.plan) {
            (Some(g), Some(plan)) => {
                let sf = SpatialField::new(*g, self.field.clone())?;
                let scenario = self.scenario;
                step_nonhomogeneous(&sf, plan, &self.tensor, nu, |s| scenario.epsilon(s), t, dt)?.field
            }
            _ => rk4_field(&self.field, &self.tensor, nu, self.scenario.epsilon(t), dt)?,
        };
        Ok(())
    }

    fn record(&mut self, dt: f64) -> Result<()> {
        let spec = *self.field.spec();
        let ind = indicator(&self.field)?;
        let mut row = ReportRow {
            t: self.time,
            dt,
            beta: spec.beta,
            order: spec.order,
            indicator: ind,
            l2_error: f64::NAN,
            rho_err: f64::NAN,
            u_err: f64::NAN,
            theta_err: f64::NAN,
            sigma_err: f64::NAN,
            q_err: f64::NAN,
        };
        if self.geometry.is_none() {
            if let Some(exact) = self.scenario.exact(self.time) {
                let num = self.field.coeffs(0);
                row.l2_error = l2_error_fn(&num, |v| exact.density(v), decay_scale(&exact))?;
                let low = spec.with_order(3);
                let mut c = CoeffVector::zeros(low);
                exact.add_coeffs(&low, c.as_mut_slice())?;
                let e = macro_errors(&macro_from_coeffs(&num)?, &macro_from_coeffs(&c)?);
                row.rho_err = e[0];
                row.u_err = e[1];
                row.theta_err = e[2];
                row.sigma_err = e[3];
                row.q_err = e[4];
            }
        }
        self.report.rows.push(row);
        Ok(())
    }
}

/// Runs `scenario` to `config.t_end` with the tensor `tensor` (assembled at
/// scaling 1 for the kernel to use).
///
/// Initial scaling: with scaling adaptation the mesh point with the smallest
/// indicator, otherwise `config.beta` or `1 / sqrt(theta)`. The centre is the
/// global mean velocity. Homogeneous problems use RK4 with the fixed step
/// `config.dt`; spatial problems use SSP-RK3 with the CFL step, recomputed
/// every step. After each step the scaling and then the order are adapted
/// as selected by `config.switches`.
pub fn run(scenario: &Scenario, tensor: &CollisionTensor, config: &SolverConfig) -> std::result::Result<RunOutput, RunFailure> {
    let fail_early = |error: Error| RunFailure {
        error,
        partial: Box::new(RunOutput {
            scenario: *scenario,
            kernel: *tensor.kernel(),
            report: RunReport::default(),
            adjustments: Vec::new(),
            geometry: None,
            field: CoeffField::zeros(BasisSpec { order: 0, beta: 1.0, zeta: [0.0; 3] }, 0),
            time: 0.0,
        }),
    };
    let mut lp = setup(scenario, tensor, config).map_err(fail_early)?;
    let result = evolve(&mut lp);
    let output = RunOutput {
        scenario: *scenario,
        kernel: *lp.tensor.kernel(),
        report: std::mem::take(&mut lp.report),
        adjustments: std::mem::take(&mut lp.state.log),
        geometry: lp.geometry,
        field: lp.field,
        time: lp.time,
    };
    match result {
        Ok(()) => Ok(output),
        Err(error) => Err(RunFailure { error, partial: Box::new(output) }),
    }
}

fn setup<'a>(scenario: &'a Scenario, tensor: &CollisionTensor, config: &'a SolverConfig) -> Result<Loop<'a>> {
    config.validate()?;
    scenario.validate()?;
    if tensor.n0() != config.n0 {
        return invalid(format!("tensor has N0 = {}, configuration asks for {}", tensor.n0(), config.n0));
    }
    let tensor = match scenario.calibration_rate() {
        Some(rate) => calibrate_bkw(tensor, rate)?,
        None => tensor.clone(),
    };
    let geometry = scenario.geometry(config.m)?;
    let mesh = config.adaptive.mesh()?;

    // moments need only degrees <= 2, which are exact at any scaling
    let probe = sample_initial(scenario, BasisSpec::new(2, 1.0, [0.0; 3])?, geometry.as_ref())?;
    let equilibrium = global_equilibrium(&probe)?;
    let zeta = equilibrium.u;
    let base = BasisSpec::new(config.order, 1.0, zeta)?;

    let (field, ind) = if config.switches.scale() {
        let (m, field, ind) = init_beta(|b| sample_initial(scenario, base.with_beta(b), geometry.as_ref()), &mesh)?;
        log::info!("initial scaling factor {:.6} (mesh index {m})", mesh.beta(m));
        (field, ind)
    } else {
        let beta = config.beta.unwrap_or(1.0 / equilibrium.theta.sqrt());
        let field = sample_initial(scenario, base.with_beta(beta), geometry.as_ref())?;
        let ind = indicator(&field)?;
        (field, ind)
    };
    let plan = geometry.map(FourierPlan::new);
    let mut lp = Loop {
        scenario,
        config,
        tensor,
        geometry,
        plan,
        equilibrium,
        nu_cache: HashMap::new(),
        field,
        time: 0.0,
        report: RunReport::default(),
        state: AdaptiveState::new(ind),
    };
    lp.record(0.0)?;
    Ok(lp)
}

fn evolve(lp: &mut Loop<'_>) -> Result<()> {
    let config = lp.config;
    let mesh = config.adaptive.mesh()?;
    let mut m = mesh.nearest(lp.field.spec().beta);
    let t_end = config.t_end;
    let mut steps = 0usize;
    while lp.time < t_end * (1.0 - 1e-12) {
        let mut dt = match &lp.geometry {
            Some(g) => cfl_dt(lp.field.spec(), g, config.cfl, config.dt_max),
            None => config.dt,
        };
        if lp.time + dt > t_end {
            dt = t_end - lp.time;
        }
        lp.step(dt)?;
        steps += 1;
        // land exactly on multiples of a fixed step
        lp.time = if lp.geometry.is_none() && dt == config.dt { steps as f64 * dt } else { lp.time + dt };
        if lp.time > t_end {
            lp.time = t_end;
        }
        if config.switches.scale() {
            scale_adapt(&mut lp.field, &mut m, &mut lp.state, &config.adaptive, &mesh, lp.time)?;
        }
        if config.switches.order() {
            p_adapt(&mut lp.field, &mut lp.state, &config.adaptive, lp.time)?;
        }
        let last = lp.time >= t_end * (1.0 - 1e-12);
        if steps % config.report_every == 0 || last {
            lp.record(dt)?;
        }
    }
    Ok(())
}
