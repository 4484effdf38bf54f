//! Gaussian quadrature rules and an adaptive Gauss-Kronrod integrator.
//!
//! Gauss rules are built from three-term recurrence coefficients with the
//! Golub-Welsch eigenvalue method. Nodes are then polished with a Newton step
//! on the recurrence and the weights are recomputed as Christoffel numbers,
//! which keeps tiny tail weights accurate in the relative sense.

use crate::error::{invalid, Error, Result};
use nalgebra::DMatrix;

/// Nodes and weights of a quadrature rule, nodes ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Gauss rule for the measure with recurrence coefficients `alpha[k]`,
/// `beta[k]` (`beta[0]` is the total mass). Both slices need `n` entries.
pub fn gauss_from_recurrence(alpha: &[f64], beta: &[f64]) -> Result<GaussRule> {
    let n = alpha.len();
    if n == 0 || beta.len() < n {
        return invalid("recurrence needs n alpha and n beta coefficients");
    }
    if beta.iter().take(n).any(|b| !(b.is_finite() && *b > 0.0)) {
        return Err(Error::Numeric(
            "recurrence coefficients are not positive; the moment data is not a positive measure"
                .into(),
        ));
    }
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        jac[(k, k)] = alpha[k];
        if k + 1 < n {
            let off = beta[k + 1].sqrt();
            jac[(k, k + 1)] = off;
            jac[(k + 1, k)] = off;
        }
    }
    let mut nodes: Vec<f64> = jac.symmetric_eigen().eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);

    let mut p = vec![0.0; n + 1];
    let mut dp = vec![0.0; n + 1];
    for x in nodes.iter_mut() {
        for _ in 0..2 {
            orthonormal_values(alpha, beta, *x, &mut p, &mut dp);
            let step = p[n] / dp[n];
            if step.is_finite() && step.abs() < 1e-6 * (1.0 + x.abs()) {
                *x -= step;
            }
        }
    }
    let weights = nodes
        .iter()
        .map(|&x| {
            orthonormal_values(alpha, beta, x, &mut p, &mut dp);
            1.0 / p[..n].iter().map(|v| v * v).sum::<f64>()
        })
        .collect();
    Ok(GaussRule { nodes, weights })
}

/// Orthonormal polynomials `p_0 .. p_{n-1}` and an unnormalised multiple of
/// `p_n`, with derivatives.
fn orthonormal_values(alpha: &[f64], beta: &[f64], x: f64, p: &mut [f64], dp: &mut [f64]) {
    let n = alpha.len();
    p[0] = 1.0 / beta[0].sqrt();
    dp[0] = 0.0;
    for k in 0..n {
        let prev = if k == 0 { 0.0 } else { beta[k].sqrt() * p[k - 1] };
        let dprev = if k == 0 { 0.0 } else { beta[k].sqrt() * dp[k - 1] };
        let scale = if k + 1 < n { beta[k + 1].sqrt() } else { 1.0 };
        p[k + 1] = ((x - alpha[k]) * p[k] - prev) / scale;
        dp[k + 1] = (p[k] + (x - alpha[k]) * dp[k] - dprev) / scale;
    }
}

/// Gauss-Hermite rule for the weight `exp(-x^2)` on the real line.
pub fn gauss_hermite(n: usize) -> Result<GaussRule> {
    if n == 0 {
        return invalid("Gauss-Hermite rule needs at least one node");
    }
    let alpha = vec![0.0; n];
    let beta: Vec<f64> = (0..n)
        .map(|k| if k == 0 { std::f64::consts::PI.sqrt() } else { k as f64 / 2.0 })
        .collect();
    let mut rule = gauss_from_recurrence(&alpha, &beta)?;
    symmetrize(&mut rule);
    Ok(rule)
}

/// Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Result<GaussRule> {
    if n == 0 {
        return invalid("Gauss-Legendre rule needs at least one node");
    }
    let alpha = vec![0.0; n];
    let beta: Vec<f64> = (0..n)
        .map(|k| {
            let k = k as f64;
            if k == 0.0 {
                2.0
            } else {
                k * k / (4.0 * k * k - 1.0)
            }
        })
        .collect();
    let mut rule = gauss_from_recurrence(&alpha, &beta)?;
    symmetrize(&mut rule);
    Ok(rule)
}

/// Generalised Gauss-Laguerre rule for the weight `t^a exp(-t)` on `[0, inf)`.
pub fn gauss_laguerre(n: usize, a: f64) -> Result<GaussRule> {
    if n == 0 || !(a > -1.0) {
        return invalid(format!("Gauss-Laguerre rule needs n >= 1 and a > -1 (n = {n}, a = {a})"));
    }
    let alpha: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + a + 1.0).collect();
    let beta: Vec<f64> = (0..n)
        .map(|k| {
            let k = k as f64;
            if k == 0.0 {
                libm::tgamma(a + 1.0)
            } else {
                k * (k + a)
            }
        })
        .collect();
    gauss_from_recurrence(&alpha, &beta)
}

/// Gauss rule for a positive measure on `[-1, 1]` given its Legendre moments
/// `m[l] = int P_l dlambda`, `l = 0 .. 2n - 1`, via the modified Chebyshev
/// algorithm.
pub fn gauss_from_legendre_moments(m: &[f64], n: usize) -> Result<GaussRule> {
    if n == 0 || m.len() < 2 * n {
        return invalid(format!("need {} Legendre moments for {n} nodes", 2 * n));
    }
    // moments against monic Legendre polynomials
    let mut scale = 1.0;
    let mono: Vec<f64> = (0..2 * n)
        .map(|k| {
            let v = m[k] * scale;
            scale *= (k as f64 + 1.0) / (2.0 * k as f64 + 1.0);
            v
        })
        .collect();
    let b = |l: usize| {
        let l = l as f64;
        l * l / (4.0 * l * l - 1.0)
    };
    let len = 2 * n;
    let mut alpha = vec![0.0; n];
    let mut beta = vec![0.0; n];
    let mut prev = vec![0.0; len];
    let mut cur = mono.clone();
    alpha[0] = mono[1] / mono[0];
    beta[0] = mono[0];
    for k in 1..n {
        let mut next = vec![0.0; len];
        for l in k..(len - k) {
            next[l] = cur[l + 1] - alpha[k - 1] * cur[l] - beta[k - 1] * prev[l]
                + if l >= 1 { b(l) * cur[l - 1] } else { 0.0 };
        }
        alpha[k] = next[k + 1] / next[k] - cur[k] / cur[k - 1];
        beta[k] = next[k] / cur[k - 1];
        prev = cur;
        cur = next;
    }
    gauss_from_recurrence(&alpha, &beta)
}

/// Enforces exact antisymmetry of nodes for symmetric weights.
fn symmetrize(rule: &mut GaussRule) {
    let n = rule.len();
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        let w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.nodes[i] = -x;
        rule.nodes[j] = x;
        rule.weights[i] = w;
        rule.weights[j] = w;
    }
    if n % 2 == 1 {
        rule.nodes[n / 2] = 0.0;
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Integral {
    pub value: Vec<f64>,
    pub error: f64,
    pub evaluations: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: f64,
}

fn gk15<F: FnMut(f64, &mut [f64])>(f: &mut F, a: f64, b: f64, dim: usize, buf: &mut [f64]) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = vec![0.0; dim];
    let mut gauss = vec![0.0; dim];
    for i in 0..8 {
        let pts: &[f64] = if i == 7 { &[0.0] } else { &[-1.0, 1.0] };
        for s in pts {
            f(c + s * h * XGK[i], buf);
            for d in 0..dim {
                kron[d] += WGK[i] * buf[d];
                if i % 2 == 1 {
                    gauss[d] += WG[i / 2] * buf[d];
                }
            }
        }
    }
    let mut error = 0.0f64;
    for d in 0..dim {
        kron[d] *= h;
        gauss[d] *= h;
        error = error.max((kron[d] - gauss[d]).abs());
    }
    Segment { a, b, value: kron, error }
}

/// Globally adaptive Gauss-Kronrod (7/15) integration of a vector-valued
/// integrand over `[a, b]`. The error is measured in the max norm over
/// components and the target is `max(abs_tol, rel_tol * max|I|)`.
pub fn integrate_vec<F>(
    mut f: F,
    dim: usize,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> Result<Integral>
where
    F: FnMut(f64, &mut [f64]),
{
    let mut buf = vec![0.0; dim];
    let mut segs = vec![gk15(&mut f, a, b, dim, &mut buf)];
    let mut evaluations = 15;
    loop {
        let mut total = vec![0.0; dim];
        let mut err = 0.0;
        for s in &segs {
            for d in 0..dim {
                total[d] += s.value[d];
            }
            err += s.error;
        }
        if !err.is_finite() || total.iter().any(|x| !x.is_finite()) {
            return Err(Error::Quadrature(format!(
                "integrand over [{a}, {b}] produced non-finite values after {evaluations} evaluations"
            )));
        }
        let scale = total.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if err <= abs_tol.max(rel_tol * scale) {
            return Ok(Integral { value: total, error: err, evaluations });
        }
        if segs.len() >= max_segments {
            return Err(Error::Quadrature(format!(
                "adaptive integration over [{a}, {b}] reached {max_segments} segments with error \
                 estimate {err:.3e} (target {:.3e}) after {evaluations} evaluations",
                abs_tol.max(rel_tol * scale)
            )));
        }
        let worst = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap();
        let s = segs.swap_remove(worst);
        let m = 0.5 * (s.a + s.b);
        segs.push(gk15(&mut f, s.a, m, dim, &mut buf));
        segs.push(gk15(&mut f, m, s.b, dim, &mut buf));
        evaluations += 30;
    }
}

/// Scalar version of [`integrate_vec`].
pub fn integrate<F>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let r = integrate_vec(|x, out| out[0] = f(x), 1, a, b, abs_tol, rel_tol, 2000)?;
    Ok((r.value[0], r.error))
}
