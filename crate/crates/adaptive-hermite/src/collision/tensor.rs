//! The assembled collision tensor and the combined quadratic/relaxation
//! collision operator.

use super::assembly::{assemble_entries, QuadOrders};
use super::kernel::KernelSpec;
use crate::error::{invalid, Error, Result};
use crate::hermite::{term_count, BasisSpec, CoeffVector};
use crate::moments::{add_maxwellian_range, density_velocity_temperature, maxwellian_coeffs};

/// Relative magnitude below which assembled entries are treated as zero in
/// the sparse evaluation.
const SPARSE_CUTOFF: f64 = 1e-14;

/// Galerkin collision tensor for multi-indices of degree at most `n0`.
#[derive(Debug, Clone)]
pub struct CollisionTensor {
    kernel: KernelSpec,
    n0: u32,
    beta: f64,
    orders: QuadOrders,
    nu: f64,
    entries: Vec<f64>,
    sparse: Sparse,
}

/// Per output index `k`: pairs `i <= j` with the combined weight
/// `A_k^{ij} + A_k^{ji}` (or `A_k^{ii}`), sorted by `j`.
#[derive(Debug, Clone)]
struct Sparse {
    start: Vec<usize>,
    i: Vec<u32>,
    j: Vec<u32>,
    w: Vec<f64>,
}

impl Sparse {
    fn build(n0: u32, entries: &[f64]) -> Self {
        let tc = term_count(n0);
        let max = entries.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let cut = SPARSE_CUTOFF * max;
        let mut s = Sparse { start: vec![0], i: vec![], j: vec![], w: vec![] };
        for k in 0..tc {
            for j in 0..tc {
                for i in 0..=j {
                    let a = entries[(k * tc + i) * tc + j];
                    let w = if i == j { a } else { a + entries[(k * tc + j) * tc + i] };
                    if w.abs() > cut {
                        s.i.push(i as u32);
                        s.j.push(j as u32);
                        s.w.push(w);
                    }
                }
            }
            s.start.push(s.w.len());
        }
        s
    }
}

impl CollisionTensor {
    /// Wraps dense entries `[k][i][j]` assembled at scaling `beta`.
    pub fn from_entries(
        kernel: KernelSpec,
        n0: u32,
        beta: f64,
        orders: QuadOrders,
        nu: f64,
        entries: Vec<f64>,
    ) -> Result<Self> {
        let tc = term_count(n0);
        if entries.len() != tc * tc * tc {
            return invalid(format!(
                "tensor for N0 = {n0} needs {} entries, got {}",
                tc * tc * tc,
                entries.len()
            ));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numeric("tensor contains non-finite entries".into()));
        }
        let sparse = Sparse::build(n0, &entries);
        Ok(CollisionTensor { kernel, n0, beta, orders, nu, entries, sparse })
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn n0(&self) -> u32 {
        self.n0
    }

    /// Scaling factor the entries were assembled for.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn orders(&self) -> QuadOrders {
        self.orders
    }

    /// Spectral radius of the linearised operator at the reference
    /// equilibrium (unit density, zero velocity, unit temperature).
    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn term_count(&self) -> usize {
        term_count(self.n0)
    }

    /// Entry `A_k^{ij}` by rank.
    pub fn entry(&self, k: usize, i: usize, j: usize) -> f64 {
        let tc = self.term_count();
        self.entries[(k * tc + i) * tc + j]
    }

    /// The same tensor for a kernel `factor` times stronger.
    pub fn with_strength_factor(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return invalid(format!("strength factor must be positive, got {factor}"));
        }
        let kernel = self.kernel.with_strength(self.kernel.strength() * factor);
        let entries = self.entries.iter().map(|x| x * factor).collect();
        Self::from_entries(kernel, self.n0, self.beta, self.orders, self.nu * factor, entries)
    }

    /// Factor converting the stored tensor to scaling `beta`.
    pub fn scale_factor(&self, beta: f64) -> f64 {
        scale_factor(&self.kernel, beta / self.beta)
    }

    /// `out[k] = sum_{i,j} A_k^{ij} f_i f_j` for all `k` of degree at most
    /// `order`, using only coefficients of degree at most `order`.
    pub fn quadratic(&self, f: &[f64], order: u32, out: &mut [f64]) {
        let n = term_count(order.min(self.n0));
        let s = &self.sparse;
        for (k, o) in out.iter_mut().enumerate().take(n) {
            let mut acc = 0.0;
            for p in s.start[k]..s.start[k + 1] {
                let j = s.j[p] as usize;
                if j >= n {
                    break;
                }
                acc += s.w[p] * f[s.i[p] as usize] * f[j];
            }
            *o = acc;
        }
    }

    /// Dense linearised operator `L_{k,m} = sum_j (A_k^{mj} + A_k^{jm}) M_j`
    /// around the Maxwellian with the given parameters, expressed in the
    /// assembly basis (centre zero).
    pub fn linearized(&self, rho: f64, u: [f64; 3], theta: f64) -> Result<Vec<f64>> {
        let spec = BasisSpec::new(self.n0, self.beta, [0.0; 3])?;
        let m = maxwellian_coeffs(rho, u, theta, &spec)?;
        let tc = self.term_count();
        let mut l = vec![0.0; tc * tc];
        for k in 0..tc {
            for a in 0..tc {
                let mut acc = 0.0;
                for (j, mj) in m.as_slice().iter().enumerate() {
                    acc += (self.entry(k, a, j) + self.entry(k, j, a)) * mj;
                }
                l[k * tc + a] = acc;
            }
        }
        Ok(l)
    }

    /// Spectral radius of the linearised operator around the Maxwellian
    /// `(rho, u, theta)` in the assembly basis, by power iteration.
    pub fn spectral_radius(&self, rho: f64, u: [f64; 3], theta: f64) -> Result<f64> {
        let l = self.linearized(rho, u, theta)?;
        power_iteration(&l, self.term_count(), 1e-8, 10_000)
    }

    /// Relaxation rate for a basis with scaling `beta` and centre `zeta`
    /// around the global equilibrium `(rho, u, theta)`.
    ///
    /// Rescaling velocities maps the problem onto the assembly basis with
    /// velocity `beta (u - zeta) / beta_a` and temperature
    /// `(beta / beta_a)^2 theta`, multiplied by `(beta / beta_a)^(-s)`.
    pub fn relaxation_rate(&self, beta: f64, zeta: [f64; 3], rho: f64, u: [f64; 3], theta: f64) -> Result<f64> {
        let r = beta / self.beta;
        let off = [r * (u[0] - zeta[0]), r * (u[1] - zeta[1]), r * (u[2] - zeta[2])];
        let rad = self.spectral_radius(rho, off, r * r * theta)?;
        Ok(r.powf(-self.kernel.speed_exponent()) * rad)
    }
}

/// Factor `beta^(-3/2 - s)` relating the tensor at scaling `beta` to the one
/// at scaling 1.
pub fn scale_factor(kernel: &KernelSpec, beta: f64) -> f64 {
    beta.powf(kernel.scaling_exponent())
}

/// Largest eigenvalue magnitude of a dense `n x n` matrix by power
/// iteration.
pub fn power_iteration(a: &[f64], n: usize, tol: f64, max_iter: usize) -> Result<f64> {
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    // break symmetry of the start vector so it is not orthogonal to the
    // dominant eigenvector by construction
    for (i, xi) in x.iter_mut().enumerate() {
        *xi *= 1.0 + 0.01 * ((i * 7919) % 101) as f64 / 101.0;
    }
    let mut y = vec![0.0; n];
    let mut lambda = 0.0;
    for it in 0..max_iter {
        for r in 0..n {
            y[r] = a[r * n..(r + 1) * n].iter().zip(&x).map(|(p, q)| p * q).sum();
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let xnorm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let est = norm / xnorm;
        if !est.is_finite() {
            return Err(Error::Numeric("power iteration produced non-finite values".into()));
        }
        if est == 0.0 {
            return Ok(0.0);
        }
        if it > 0 && (est - lambda).abs() <= tol * est {
            return Ok(est);
        }
        lambda = est;
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
    }
    Err(Error::Numeric(format!(
        "power iteration did not converge in {max_iter} iterations (last estimate {lambda:.6e})"
    )))
}

/// Assembles the tensor at scaling 1 and computes its reference relaxation
/// rate.
pub fn assemble_tensor(kernel: &KernelSpec, n0: u32, orders: QuadOrders) -> Result<CollisionTensor> {
    let entries = assemble_entries(kernel, n0, 1.0, orders)?;
    let mut t = CollisionTensor::from_entries(*kernel, n0, 1.0, orders, 0.0, entries)?;
    t.nu = t.spectral_radius(1.0, [0.0; 3], 1.0)?;
    log::info!("assembled collision tensor: N0 = {n0}, nu = {:.6e}", t.nu);
    Ok(t)
}

/// Evaluates the collision term for one coefficient vector.
///
/// Degrees up to `min(N, N0)` use the quadratic form scaled to the basis;
/// degrees above `N0` relax towards the local Maxwellian at rate `nu`.
pub fn collide_into(
    tensor: &CollisionTensor,
    spec: &BasisSpec,
    f: &[f64],
    nu: f64,
    out: &mut [f64],
) -> Result<()> {
    let tc = spec.term_count();
    if f.len() != tc || out.len() != tc {
        return invalid("coefficient and output lengths must match the basis");
    }
    let low = spec.order.min(tensor.n0());
    let nlow = term_count(low);
    tensor.quadratic(f, low, &mut out[..nlow]);
    let factor = tensor.scale_factor(spec.beta);
    out[..nlow].iter_mut().for_each(|x| *x *= factor);
    if spec.order > tensor.n0() {
        let cv = CoeffVector::from_vec(*spec, f.to_vec())?;
        let (rho, u, theta) = density_velocity_temperature(&cv)?;
        if !(rho > 0.0 && theta > 0.0) {
            return Err(Error::Numeric(format!(
                "non-physical local state in relaxation term: rho = {rho}, theta = {theta}"
            )));
        }
        out[nlow..].iter_mut().for_each(|x| *x = 0.0);
        add_maxwellian_range(rho, u, theta, out, spec, nlow);
        for r in nlow..tc {
            out[r] = nu * (out[r] - f[r]);
        }
    }
    Ok(())
}

/// Collision term of one coefficient vector.
pub fn collide(tensor: &CollisionTensor, coeffs: &CoeffVector, nu: f64) -> Result<CoeffVector> {
    let mut out = CoeffVector::zeros(*coeffs.spec());
    collide_into(tensor, coeffs.spec(), coeffs.as_slice(), nu, out.as_mut_slice())?;
    Ok(out)
}
