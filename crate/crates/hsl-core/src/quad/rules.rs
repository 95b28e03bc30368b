//! One-dimensional Gauss rules via Golub-Welsch and the product sphere
//! rules built from them.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::special::beta;

/// Nodes and weights of a 1-d rule on a reference interval.
#[derive(Debug, Clone)]
pub struct Rule1d {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn golub_welsch(diag: &[f64], offdiag: &[f64], moment0: f64) -> Rule1d {
    let n = diag.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i];
        if i + 1 < n {
            m[(i, i + 1)] = offdiag[i];
            m[(i + 1, i)] = offdiag[i];
        }
    }
    let eig = m.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let node = eig.eigenvalues[j];
            let first = eig.eigenvectors[(0, j)];
            (node, moment0 * first * first)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Rule1d {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree 2n-1.
pub fn gauss_legendre(n: usize) -> Rule1d {
    assert!(n >= 1, "rule order must be at least 1");
    if n == 1 {
        return Rule1d { nodes: vec![0.0], weights: vec![2.0] };
    }
    let diag = vec![0.0; n];
    let offdiag: Vec<f64> = (1..n)
        .map(|j| {
            let j = j as f64;
            j / (4.0 * j * j - 1.0).sqrt()
        })
        .collect();
    golub_welsch(&diag, &offdiag, 2.0)
}

/// Gauss-Jacobi rule on [-1, 1] for the weight (1-x)^alpha (1+x)^beta.
pub fn gauss_jacobi(n: usize, alpha: f64, beta_exp: f64) -> Result<Rule1d> {
    if n < 1 {
        return Err(Error::Parameter("rule order must be at least 1".into()));
    }
    if !(alpha > -1.0) || !(beta_exp > -1.0) {
        return Err(Error::Parameter(format!(
            "Jacobi exponents must exceed -1, got ({alpha}, {beta_exp})"
        )));
    }
    let ab = alpha + beta_exp;
    let moment0 = (2.0f64).powf(ab + 1.0) * beta(alpha + 1.0, beta_exp + 1.0);
    if n == 1 {
        let node = (beta_exp - alpha) / (ab + 2.0);
        return Ok(Rule1d { nodes: vec![node], weights: vec![moment0] });
    }
    let mut diag = Vec::with_capacity(n);
    let mut offdiag = Vec::with_capacity(n - 1);
    diag.push((beta_exp - alpha) / (ab + 2.0));
    for j in 1..n {
        let j = j as f64;
        let denom = 2.0 * j + ab;
        diag.push((beta_exp * beta_exp - alpha * alpha) / (denom * (denom + 2.0)));
        let num = 4.0 * j * (j + alpha) * (j + beta_exp) * (j + ab);
        let den = denom * denom * (denom + 1.0) * (denom - 1.0);
        offdiag.push((num / den).sqrt());
    }
    Ok(golub_welsch(&diag, &offdiag, moment0))
}

/// Gauss-Jacobi rule transplanted to [0, 1] for the weight (1-r)^gamma:
/// sum w_i f(r_i) approximates the integral of (1-r)^gamma f(r) dr.
pub fn gauss_jacobi_unit(n: usize, gamma: f64) -> Result<Rule1d> {
    let base = gauss_jacobi(n, gamma, 0.0)?;
    let scale = (0.5f64).powf(gamma + 1.0);
    Ok(Rule1d {
        nodes: base.nodes.iter().map(|x| (x + 1.0) / 2.0).collect(),
        weights: base.weights.iter().map(|w| w * scale).collect(),
    })
}

/// Gauss-Legendre rule scaled to [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Rule1d {
    let base = gauss_legendre(n);
    let mid = (a + b) / 2.0;
    let half = (b - a) / 2.0;
    Rule1d {
        nodes: base.nodes.iter().map(|x| mid + half * x).collect(),
        weights: base.weights.iter().map(|w| w * half).collect(),
    }
}

/// Quadrature node on a sphere: unit vector plus weight.
#[derive(Debug, Clone)]
pub struct SphereNode {
    pub point: Vec<f64>,
    pub weight: f64,
}

/// Product rule for the unnormalized surface measure on S^{n-1}, n = 2, 3.
///
/// n = 2: trapezoid rule on the circle (exact for trigonometric
/// polynomials of degree below half the point count). n = 3: Gauss-Legendre
/// in the polar cosine tensored with the azimuthal trapezoid rule.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub n: usize,
    pub nodes: Vec<SphereNode>,
}

impl SphereRule {
    pub fn new(n: usize, azimuthal: usize, polar: usize) -> Result<Self> {
        match n {
            2 => {
                if azimuthal < 4 {
                    return Err(Error::Parameter("need at least 4 azimuthal points".into()));
                }
                let w = 2.0 * std::f64::consts::PI / azimuthal as f64;
                let nodes = (0..azimuthal)
                    .map(|i| {
                        let th = 2.0 * std::f64::consts::PI * i as f64 / azimuthal as f64;
                        SphereNode { point: vec![th.cos(), th.sin()], weight: w }
                    })
                    .collect();
                Ok(Self { n, nodes })
            }
            3 => {
                if azimuthal < 4 || polar < 2 {
                    return Err(Error::Parameter(
                        "need at least 4 azimuthal and 2 polar points".into(),
                    ));
                }
                let polar_rule = gauss_legendre(polar);
                let wphi = 2.0 * std::f64::consts::PI / azimuthal as f64;
                let mut nodes = Vec::with_capacity(azimuthal * polar);
                for (mu, wmu) in polar_rule.nodes.iter().zip(&polar_rule.weights) {
                    let sin_th = (1.0 - mu * mu).max(0.0).sqrt();
                    for i in 0..azimuthal {
                        let phi = 2.0 * std::f64::consts::PI * i as f64 / azimuthal as f64;
                        nodes.push(SphereNode {
                            point: vec![sin_th * phi.cos(), sin_th * phi.sin(), *mu],
                            weight: wmu * wphi,
                        });
                    }
                }
                Ok(Self { n, nodes })
            }
            _ => Err(Error::Domain(format!("sphere dimension {n} not supported"))),
        }
    }

    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|s| s.weight).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn legendre_integrates_polynomials() {
        let rule = gauss_legendre(5);
        // x^8 on [-1,1] = 2/9 (degree 8 < 2*5-1 = 9)
        let val: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| w * x.powi(8))
            .sum();
        assert!((val - 2.0 / 9.0).abs() < 1e-13);
    }

    #[test]
    fn jacobi_moments() {
        // integral of (1-r)^{0.5} r^2 dr on [0,1] = B(3, 1.5) = 16/105
        let rule = gauss_jacobi_unit(8, 0.5).unwrap();
        let val: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(r, w)| w * r * r)
            .sum();
        let exact = beta(3.0, 1.5);
        assert!((val - exact).abs() < 1e-13, "got {val}, want {exact}");
    }

    #[test]
    fn jacobi_rejects_bad_exponent() {
        assert!(gauss_jacobi(4, -1.0, 0.0).is_err());
    }

    #[test]
    fn sphere_rule_total_weight() {
        let r2 = SphereRule::new(2, 16, 0).unwrap();
        assert!((r2.total_weight() - 2.0 * PI).abs() < 1e-12);
        let r3 = SphereRule::new(3, 16, 8).unwrap();
        assert!((r3.total_weight() - 4.0 * PI).abs() < 1e-12);
        assert!((r3.total_weight() - crate::special::sphere_area(3)).abs() < 1e-12);
    }
}
