//! The trace operator, the reproducing-formula evaluator, the expanded
//! Bergman projection S with its cell variants, the adjoint family R, and
//! the extension operator that realizes traces.

use crate::error::{Error, Result};
use crate::halfspace::{whitney_cell_containing, HPoint, WeightSpec, WhitneyCell};
use crate::kernels::HalfspaceKernelParams;
use crate::quad::rules::gauss_legendre_on;
use crate::quad::{
    integrate_halfspace, integrate_product_halfspace, HalfspaceQuadSpec, QuadResult,
};
use crate::testfns::TestFunction;

/// Operator output: value, refinement error estimate, and any recorded
/// precondition flags (a violated hypothesis flags the result, it does
/// not suppress it).
#[derive(Debug, Clone)]
pub struct OpResult {
    pub value: f64,
    pub error_estimate: f64,
    pub flags: Vec<String>,
}

impl OpResult {
    fn from_quad(q: QuadResult, flags: Vec<String>) -> Self {
        Self { value: q.value, error_estimate: q.error_estimate, flags }
    }
}

/// Exponent vectors (a_1..a_m), (b_1..b_m) of the expanded projection and
/// its adjoint family.
#[derive(Debug, Clone, PartialEq)]
pub struct VecExponents {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl VecExponents {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::ShapeMismatch(
                "exponent vectors must be nonempty and of equal length".into(),
            ));
        }
        Ok(Self { a, b })
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }
}

/// Tr f(z) = f(z, ..., z).
pub fn trace_eval<F: Fn(&[HPoint]) -> f64>(base: F, m: usize, z: &HPoint) -> f64 {
    let pts = vec![*z; m];
    base(&pts)
}

/// Reproducing-formula hypothesis for A^p_alpha with kernel order k.
pub fn reproducing_hypothesis_ok(p: f64, alpha: f64, n: usize, k: u32) -> bool {
    if p >= 1.0 {
        (k as f64) > (alpha + 1.0) / p - 1.0
    } else {
        (k as f64) >= (alpha + n as f64 + 1.0) / p - (n as f64 + 1.0)
    }
}

/// Evaluates int_H f(w) Q_k(z, w) s^k dw. When (p, alpha, k) violate the
/// reproducing hypothesis the result is still computed but flagged.
pub fn reproduce(
    f: &TestFunction,
    k: u32,
    p: f64,
    alpha: f64,
    z: &HPoint,
    spec: &HalfspaceQuadSpec,
) -> Result<OpResult> {
    let n = z.dim();
    let params = HalfspaceKernelParams::new(n, k)?;
    let mut flags = Vec::new();
    if !reproducing_hypothesis_ok(p, alpha, n, k) {
        flags.push(format!(
            "reproducing hypothesis violated: k = {k} for (p, alpha) = ({p}, {alpha})"
        ));
    }
    let q = integrate_halfspace(
        |w| f.eval_h(w).unwrap_or(f64::NAN) * params.eval(z, w),
        n,
        &WeightSpec::new(k as f64),
        spec,
    )?;
    Ok(OpResult::from_quad(q, flags))
}

/// Expanded Bergman projection
/// (S_{a,b} f)(z_1..z_m) = prod t_j^{a_j} int_H f(w) s^{-n-1+sum b_j}
///                          / prod |z_j - conj(w)|^{a_j+b_j} dw.
pub fn s_expanded<F: Fn(&HPoint) -> f64>(
    e: &VecExponents,
    f: F,
    zs: &[HPoint],
    spec: &HalfspaceQuadSpec,
) -> Result<QuadResult> {
    if zs.len() != e.m() {
        return Err(Error::ShapeMismatch(format!(
            "{} evaluation points for m = {}",
            zs.len(),
            e.m()
        )));
    }
    let n = zs[0].dim();
    let lambda = -(n as f64 + 1.0) + e.b.iter().sum::<f64>();
    let mut prefactor = 1.0;
    for (z, &a) in zs.iter().zip(&e.a) {
        prefactor *= z.t().powf(a);
    }
    let exps: Vec<f64> = e.a.iter().zip(&e.b).map(|(a, b)| a + b).collect();
    let q = integrate_halfspace(
        |w| {
            let mut kernel = 1.0;
            for (z, &ab) in zs.iter().zip(&exps) {
                kernel /= z.dist_reflected(w).powf(ab);
            }
            f(w) * kernel
        },
        n,
        &WeightSpec::new(lambda),
        spec,
    )?;
    Ok(QuadResult { value: prefactor * q.value, error_estimate: prefactor.abs() * q.error_estimate })
}

/// Single-cell operator S^k_{a,b} f(z) = t^a int_{cell} s^b f(w)
/// / |z - conj(w)|^{n+1+a+b} dw, by tensor panels over the cell.
pub fn s_cell<F: Fn(&HPoint) -> f64>(
    a: f64,
    b: f64,
    cell: &WhitneyCell,
    f: F,
    z: &HPoint,
    order: usize,
) -> Result<f64> {
    if !(a > 0.0) || !(b > -1.0) {
        return Err(Error::Parameter(format!("need a > 0 and b > -1, got ({a}, {b})")));
    }
    let n = cell.n;
    if z.dim() != n {
        return Err(Error::ShapeMismatch("dimension mismatch".into()));
    }
    let bx = cell.cube().to_box();
    let power = n as f64 + 1.0 + a + b;
    // two panels per axis, Gauss-Legendre of the given order on each
    let mut axes: Vec<Vec<(f64, f64)>> = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mid = (bx.x_lo[i] + bx.x_hi[i]) / 2.0;
        let mut pts = Vec::new();
        for (lo, hi) in [(bx.x_lo[i], mid), (mid, bx.x_hi[i])] {
            let rule = gauss_legendre_on(order, lo, hi);
            pts.extend(rule.nodes.iter().copied().zip(rule.weights.iter().copied()));
        }
        axes.push(pts);
    }
    {
        let mid = (bx.t_lo + bx.t_hi) / 2.0;
        let mut pts = Vec::new();
        for (lo, hi) in [(bx.t_lo, mid), (mid, bx.t_hi)] {
            let rule = gauss_legendre_on(order, lo, hi);
            pts.extend(rule.nodes.iter().copied().zip(rule.weights.iter().copied()));
        }
        axes.push(pts);
    }
    let mut idx = vec![0usize; n + 1];
    let mut acc = 0.0;
    'outer: loop {
        let mut x = [0.0f64; 3];
        let mut weight = 1.0;
        for i in 0..n {
            let (v, w) = axes[i][idx[i]];
            x[i] = v;
            weight *= w;
        }
        let (t, wt) = axes[n][idx[n]];
        weight *= wt;
        let w = HPoint::new(&x[..n], t)?;
        let v = f(&w);
        if !v.is_finite() {
            let mut coords = w.x().to_vec();
            coords.push(w.t());
            return Err(Error::Evaluation { value: v, node: coords });
        }
        acc += weight * t.powf(b) * v / z.dist_reflected(&w).powf(power);
        let mut ax = n + 1;
        loop {
            if ax == 0 {
                break 'outer;
            }
            ax -= 1;
            idx[ax] += 1;
            if idx[ax] < axes[ax].len() {
                break;
            }
            idx[ax] = 0;
        }
    }
    Ok(z.t().powf(a) * acc)
}

/// S-tilde: dispatches to the cell containing z.
pub fn s_tilde<F: Fn(&HPoint) -> f64>(
    a: f64,
    b: f64,
    f: F,
    z: &HPoint,
    order: usize,
) -> Result<f64> {
    let cell = whitney_cell_containing(z)?;
    s_cell(a, b, &cell, f, z, order)
}

/// Adjoint family (R_{a,b} g)(w) = s^{-m(n+1)+sum b_j}
/// int...int g(z_1..z_m) prod t_j^{a_j} / |z_j - conj(w)|^{a_j+b_j} dz.
pub fn r_expanded<G: Fn(&[HPoint]) -> f64>(
    e: &VecExponents,
    g: G,
    w: &HPoint,
    spec: &HalfspaceQuadSpec,
) -> Result<QuadResult> {
    let n = w.dim();
    let m = e.m();
    let prefactor = w
        .t()
        .powf(-(m as f64) * (n as f64 + 1.0) + e.b.iter().sum::<f64>());
    let weights: Vec<WeightSpec> = e.a.iter().map(|&a| WeightSpec::new(a)).collect();
    let exps: Vec<f64> = e.a.iter().zip(&e.b).map(|(a, b)| a + b).collect();
    let q = integrate_product_halfspace(
        |zs| {
            let mut kernel = 1.0;
            for (z, &ab) in zs.iter().zip(&exps) {
                kernel /= z.dist_reflected(w).powf(ab);
            }
            g(zs) * kernel
        },
        n,
        &weights,
        spec,
    )?;
    Ok(QuadResult { value: prefactor * q.value, error_estimate: prefactor.abs() * q.error_estimate })
}

/// (R_k g)(w) = int...int g(z_1..z_m) prod Q_k(z_j, w) dm_k(z_1)...dm_k(z_m).
pub fn r_k<G: Fn(&[HPoint]) -> f64>(
    k: u32,
    m: usize,
    g: G,
    w: &HPoint,
    spec: &HalfspaceQuadSpec,
) -> Result<QuadResult> {
    let n = w.dim();
    let params = HalfspaceKernelParams::new(n, k)?;
    let weights = vec![WeightSpec::new(k as f64); m];
    integrate_product_halfspace(
        |zs| {
            let mut kernel = 1.0;
            for z in zs {
                kernel *= params.eval(z, w);
            }
            g(zs) * kernel
        },
        n,
        &weights,
        spec,
    )
}

/// Extension operator from the trace construction:
/// f(z_1..z_m) = int_H Q_k((z_1+...+z_m)/m, w) g(w) s^k dw.
/// The kernel-order condition p(n+k+1) > (m-1)(n+1) + m s_j + p n + 1 is
/// recorded as a flag when violated.
pub fn extend(
    g: &TestFunction,
    k: u32,
    p: f64,
    s_exponents: &[f64],
    zs: &[HPoint],
    spec: &HalfspaceQuadSpec,
) -> Result<OpResult> {
    if zs.is_empty() {
        return Err(Error::ShapeMismatch("need at least one evaluation point".into()));
    }
    let n = zs[0].dim();
    let m = zs.len();
    let mut flags = Vec::new();
    for &sj in s_exponents {
        let lhs = p * (n as f64 + k as f64 + 1.0);
        let rhs = (m as f64 - 1.0) * (n as f64 + 1.0) + m as f64 * sj + p * n as f64 + 1.0;
        if !(lhs > rhs) {
            flags.push(format!(
                "extension order too small: p(n+k+1) = {lhs} vs required > {rhs}"
            ));
        }
    }
    // averaged evaluation point
    let mut x = vec![0.0; n];
    let mut t = 0.0;
    for z in zs {
        for (i, v) in z.x().iter().enumerate() {
            x[i] += v / m as f64;
        }
        t += z.t() / m as f64;
    }
    let avg = HPoint::new(&x, t)?;
    let params = HalfspaceKernelParams::new(n, k)?;
    let q = integrate_halfspace(
        |w| g.eval_h(w).unwrap_or(f64::NAN) * params.eval(&avg, w),
        n,
        &WeightSpec::new(k as f64),
        spec,
    )?;
    Ok(OpResult::from_quad(q, flags))
}

/// Both sides of the elementary sum inequality
/// ( sum_k prod_i x_{i,k}^p )^{1/p} <= prod_i ( sum_k x_{i,k}^{q_i} )^{1/q_i},
/// for nonnegative sequences and 0 < q_i <= p.
pub fn elementary_sum_sides(xs: &[Vec<f64>], p: f64, qs: &[f64]) -> Result<(f64, f64)> {
    let m = xs.len();
    if m == 0 || qs.len() != m {
        return Err(Error::ShapeMismatch("need one exponent per sequence".into()));
    }
    let len = xs[0].len();
    if xs.iter().any(|x| x.len() != len) {
        return Err(Error::ShapeMismatch("sequences must share a length".into()));
    }
    if qs.iter().any(|&q| !(q > 0.0) || q > p) {
        return Err(Error::Parameter("need 0 < q_i <= p".into()));
    }
    let mut lhs_sum = 0.0;
    for k in 0..len {
        let mut term = 1.0;
        for x in xs {
            term *= x[k].powf(p);
        }
        lhs_sum += term;
    }
    let lhs = lhs_sum.powf(1.0 / p);
    let mut rhs = 1.0;
    for (x, &q) in xs.iter().zip(qs) {
        rhs *= x.iter().map(|v| v.powf(q)).sum::<f64>().powf(1.0 / q);
    }
    Ok((lhs, rhs))
}
