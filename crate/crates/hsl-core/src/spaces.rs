//! The (quasi)norms of the laboratory, computed by quadrature: weighted
//! Bergman norms on the half-space and its products, the radial means
//! M_p(f, r), mixed norms, Triebel-Lizorkin norms, derivative norms, and
//! the growth functional behind H^s_beta.

use crate::error::{Error, Result};
use crate::halfspace::{HPoint, WeightSpec};
use crate::quad::rules::gauss_jacobi_unit;
use crate::quad::{
    integrate_halfspace, integrate_product_halfspace, integrate_sphere, HalfspaceQuadSpec,
    QuadResult, SphereQuadSpec,
};
use crate::testfns::{GradientRequest, TestFunction};

/// Parameters of the mixed norm ||f||_{p,q,alpha}; `p` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedNormParams {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub n: usize,
}

impl MixedNormParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) {
            return Err(Error::Parameter(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.p > 0.0) || !(self.q > 0.0) || !self.q.is_finite() {
            return Err(Error::Parameter("need p > 0 and finite q > 0".into()));
        }
        Ok(())
    }
}

fn rooted(integral: QuadResult, p: f64) -> QuadResult {
    if integral.value <= 0.0 {
        return QuadResult { value: 0.0, error_estimate: integral.error_estimate };
    }
    let value = integral.value.powf(1.0 / p);
    let error_estimate = if integral.value > 0.0 {
        value / integral.value * integral.error_estimate / p
    } else {
        integral.error_estimate
    };
    QuadResult { value, error_estimate }
}

/// ||f||_{A^p_lambda} = ( int_H |f|^p t^lambda dx dt )^{1/p}.
pub fn norm_bergman_h<F: Fn(&HPoint) -> f64>(
    f: F,
    n: usize,
    p: f64,
    lambda: f64,
    spec: &HalfspaceQuadSpec,
) -> Result<QuadResult> {
    if !(lambda > -1.0) {
        return Err(Error::Parameter(format!("need lambda > -1, got {lambda}")));
    }
    if !(p > 0.0) {
        return Err(Error::Parameter("need p > 0".into()));
    }
    let integral = integrate_halfspace(|z| f(z).abs().powf(p), n, &WeightSpec::new(lambda), spec)?;
    Ok(rooted(integral, p))
}

/// Product-space norm over H^m against dm_{alpha_1} x ... x dm_{alpha_m}.
pub fn norm_product_h<F: Fn(&[HPoint]) -> f64>(
    f: F,
    n: usize,
    p: f64,
    alphas: &[f64],
    spec: &HalfspaceQuadSpec,
) -> Result<QuadResult> {
    if alphas.iter().any(|a| !(*a > -1.0)) {
        return Err(Error::Parameter("every weight exponent must exceed -1".into()));
    }
    if !(p > 0.0) {
        return Err(Error::Parameter("need p > 0".into()));
    }
    let weights: Vec<WeightSpec> = alphas.iter().map(|&a| WeightSpec::new(a)).collect();
    let integral =
        integrate_product_halfspace(|zs| f(zs).abs().powf(p), n, &weights, spec)?;
    Ok(rooted(integral, p))
}

/// Radial mean M_p(f, r) = ( int_S |f(r x')|^p dx' )^{1/p}; p = infinity
/// takes the maximum over the rule nodes.
pub fn mp_radial<F: Fn(&[f64]) -> f64>(
    f: F,
    p: f64,
    r: f64,
    sphere_spec: &SphereQuadSpec,
) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("radius {r} outside [0,1)")));
    }
    if p.is_infinite() {
        let rule = sphere_spec.rule()?;
        let mut best = f64::NEG_INFINITY;
        for node in &rule.nodes {
            let x: Vec<f64> = node.point.iter().map(|c| c * r).collect();
            best = best.max(f(&x).abs());
        }
        return Ok(best);
    }
    if !(p > 0.0) {
        return Err(Error::Parameter("need p > 0".into()));
    }
    let v = integrate_sphere(
        |xp| {
            let x: Vec<f64> = xp.iter().map(|c| c * r).collect();
            f(&x).abs().powf(p)
        },
        sphere_spec,
    )?;
    Ok(v.max(0.0).powf(1.0 / p))
}

fn radial_mixed_value<F: Fn(&[f64]) -> f64>(
    f: &F,
    params: &MixedNormParams,
    radial_points: usize,
    sphere_spec: &SphereQuadSpec,
) -> Result<f64> {
    let gamma = params.alpha * params.q - 1.0;
    let rule = gauss_jacobi_unit(radial_points, gamma)?;
    let mut acc = 0.0;
    for (r, w) in rule.nodes.iter().zip(&rule.weights) {
        let mp = mp_radial(|x| f(x), params.p, *r, sphere_spec)?;
        if !mp.is_finite() {
            return Err(Error::Evaluation { value: mp, node: vec![*r] });
        }
        acc += w * (1.0 + r).powf(gamma) * r.powi(params.n as i32 - 1) * mp.powf(params.q);
    }
    Ok(acc.max(0.0).powf(1.0 / params.q))
}

/// Mixed norm ||f||_{p,q,alpha} =
/// ( int_0^1 M_p(f,r)^q (1-r^2)^{alpha q - 1} r^{n-1} dr )^{1/q},
/// with the (1-r)^{alpha q - 1} endpoint factor absorbed by Gauss-Jacobi
/// nodes. The error estimate compares two radial resolutions; growth that
/// doubles between them is reported as divergence.
pub fn norm_mixed<F: Fn(&[f64]) -> f64>(
    f: F,
    params: &MixedNormParams,
    radial_points: usize,
    sphere_spec: &SphereQuadSpec,
) -> Result<QuadResult> {
    params.validate()?;
    let coarse = radial_mixed_value(&f, params, radial_points, sphere_spec)?;
    let fine = radial_mixed_value(&f, params, 2 * radial_points + 1, sphere_spec)?;
    if fine.abs() > 2.0 * coarse.abs() && fine.abs() > 1e-8 {
        return Err(Error::Divergence { values: vec![coarse, fine] });
    }
    Ok(QuadResult { value: fine, error_estimate: (fine - coarse).abs() })
}

fn triebel_value<F: Fn(&[f64]) -> f64>(
    f: &F,
    p: f64,
    q: f64,
    alpha: f64,
    sphere_spec: &SphereQuadSpec,
    radial_points: usize,
) -> Result<f64> {
    let gamma = alpha * p - 1.0;
    let radial = gauss_jacobi_unit(radial_points, gamma)?;
    let outer = integrate_sphere(
        |xp| {
            let mut inner = 0.0;
            for (r, w) in radial.nodes.iter().zip(&radial.weights) {
                let x: Vec<f64> = xp.iter().map(|c| c * r).collect();
                inner += w * f(&x).abs().powf(p);
            }
            inner.max(0.0).powf(q / p)
        },
        sphere_spec,
    )?;
    Ok(outer.max(0.0).powf(1.0 / q))
}

/// Triebel-Lizorkin norm ||f||_{F^{p,q}_alpha} =
/// ( int_S ( int_0^1 |f(rx')|^p (1-r)^{alpha p - 1} dr )^{q/p} dx' )^{1/q}.
pub fn norm_triebel<F: Fn(&[f64]) -> f64>(
    f: F,
    p: f64,
    q: f64,
    alpha: f64,
    sphere_spec: &SphereQuadSpec,
    radial_points: usize,
) -> Result<QuadResult> {
    if !(alpha > 0.0) || !(p > 0.0) || !(q > 0.0) {
        return Err(Error::Parameter("need alpha, p, q > 0".into()));
    }
    let coarse = triebel_value(&f, p, q, alpha, sphere_spec, radial_points)?;
    let fine = triebel_value(&f, p, q, alpha, sphere_spec, 2 * radial_points + 1)?;
    if fine.abs() > 2.0 * coarse.abs() && fine.abs() > 1e-8 {
        return Err(Error::Divergence { values: vec![coarse, fine] });
    }
    Ok(QuadResult { value: fine, error_estimate: (fine - coarse).abs() })
}

/// Derivative norm ||f||_{D_N B^{p,q}_alpha} = |f(0)| + || |grad^N f| ||_{p,q,alpha}.
pub fn norm_dn(
    f: &TestFunction,
    order: usize,
    params: &MixedNormParams,
    mode: crate::testfns::GradMode,
    radial_points: usize,
    sphere_spec: &SphereQuadSpec,
) -> Result<QuadResult> {
    params.validate()?;
    let zero = vec![0.0; params.n];
    let at_zero = f.eval_ball(&zero)?.abs();
    let req = GradientRequest { order, mode };
    let grad = norm_mixed(
        |x| f.grad_norm(&req, x).unwrap_or(f64::NAN),
        params,
        radial_points,
        sphere_spec,
    )?;
    Ok(QuadResult { value: at_zero + grad.value, error_estimate: grad.error_estimate })
}

/// Growth functional sup_rho (1-rho)^beta M_s(f, rho) over a radial grid;
/// the quantity that is finite exactly on H^s_beta.
pub fn hs_beta_functional<F: Fn(&[f64]) -> f64>(
    f: F,
    s: f64,
    beta: f64,
    rho_grid: &[f64],
    sphere_spec: &SphereQuadSpec,
) -> Result<f64> {
    if rho_grid.is_empty() {
        return Err(Error::Parameter("empty rho grid".into()));
    }
    let mut best = f64::NEG_INFINITY;
    for &rho in rho_grid {
        let m = mp_radial(|x| f(x), s, rho, sphere_spec)?;
        best = best.max((1.0 - rho).powf(beta) * m);
    }
    Ok(best)
}
