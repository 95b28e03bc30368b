//! Closed-form evaluation of the Poisson and Bergman kernels on the upper
//! half-space and on the unit ball.
//!
//! Half-space Bergman kernels are generated symbolically: repeated
//! t-differentiation of u (|v|^2 + u^2)^{-(n+1)/2} stays inside the family
//! sum_j c_j u^{a_j} (|v|^2 + u^2)^{-b_j}, so the coefficient table is
//! computed once per (n, k) and evaluation is exact up to rounding.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::halfspace::HPoint;
use crate::special::{chebyshev_t, gamma, gamma_ratio, legendre_p, sphere_area};

/// Normalization c_n = Gamma((n+1)/2) / pi^{(n+1)/2}, which makes the
/// Poisson kernel integrate to one over R^n.
pub fn poisson_normalization(n: usize) -> f64 {
    let half = (n as f64 + 1.0) / 2.0;
    gamma(half) / PI.powf(half)
}

/// Half-space Poisson kernel P(x, t) = c_n t (|x|^2 + t^2)^{-(n+1)/2}.
pub fn poisson_h(x: &[f64], t: f64, n: usize) -> Result<f64> {
    if x.len() != n || n == 0 || n > 3 {
        return Err(Error::Domain(format!(
            "dimension mismatch: |x| = {}, n = {n}",
            x.len()
        )));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("height must be positive, got {t}")));
    }
    let d2: f64 = x.iter().map(|v| v * v).sum::<f64>() + t * t;
    Ok(poisson_normalization(n) * t * d2.powf(-(n as f64 + 1.0) / 2.0))
}

/// A finite sum  sum_j c_j u^{a_j} (d2 + u^2)^{-(b0 + s_j)}  closed under
/// d/du; `b0` is the base exponent, shifts `s_j` are nonnegative integers.
#[derive(Debug, Clone)]
pub struct DtSeries {
    b0: f64,
    terms: Vec<(f64, u32, u32)>, // (coefficient, u-power, shift)
}

impl DtSeries {
    /// Starts from  u^{upow} (d2 + u^2)^{-b0}.
    pub fn new(b0: f64, upow: u32) -> Self {
        Self { b0, terms: vec![(1.0, upow, 0)] }
    }

    /// Differentiates the sum with respect to u.
    pub fn differentiate(&self) -> Self {
        let mut out: std::collections::BTreeMap<(u32, u32), f64> = Default::default();
        for &(c, a, s) in &self.terms {
            if a > 0 {
                *out.entry((a - 1, s)).or_insert(0.0) += c * a as f64;
            }
            let b = self.b0 + s as f64;
            *out.entry((a + 1, s + 1)).or_insert(0.0) += -2.0 * b * c;
        }
        Self {
            b0: self.b0,
            terms: out
                .into_iter()
                .filter(|&(_, c)| c != 0.0)
                .map(|((a, s), c)| (c, a, s))
                .collect(),
        }
    }

    pub fn differentiate_n(&self, n: u32) -> Self {
        let mut cur = self.clone();
        for _ in 0..n {
            cur = cur.differentiate();
        }
        cur
    }

    /// Evaluates at horizontal squared distance `d2` and height sum `u`.
    pub fn eval(&self, d2: f64, u: f64) -> f64 {
        let rho = d2 + u * u;
        self.terms
            .iter()
            .map(|&(c, a, s)| c * u.powi(a as i32) * rho.powf(-(self.b0 + s as f64)))
            .sum()
    }

    /// d/d(d2) of the sum, as a new series evaluated the same way. Each
    /// term maps to -(b0+s) u^a rho^{-(b0+s+1)}.
    pub fn differentiate_d2(&self) -> Self {
        Self {
            b0: self.b0,
            terms: self
                .terms
                .iter()
                .map(|&(c, a, s)| (-(self.b0 + s as f64) * c, a, s + 1))
                .collect(),
        }
    }
}

/// Parameters of the half-space Bergman kernel Q_k.
#[derive(Debug, Clone)]
pub struct HalfspaceKernelParams {
    pub n: usize,
    pub k: u32,
    series: DtSeries,
    scale: f64,
}

impl HalfspaceKernelParams {
    pub fn new(n: usize, k: u32) -> Result<Self> {
        if n == 0 || n > 3 {
            return Err(Error::Domain(format!("dimension {n} not supported")));
        }
        // Q_k(z,w) = ((-2)^{k+1}/k!) d^{k+1}/du^{k+1} [ c_n u (|v|^2+u^2)^{-(n+1)/2} ]
        let series = DtSeries::new((n as f64 + 1.0) / 2.0, 1).differentiate_n(k + 1);
        let mut fact = 1.0;
        for j in 2..=k {
            fact *= j as f64;
        }
        let scale = poisson_normalization(n) * (-2.0f64).powi(k as i32 + 1) / fact;
        Ok(Self { n, k, series, scale })
    }

    pub fn eval(&self, z: &HPoint, w: &HPoint) -> f64 {
        let mut d2 = 0.0;
        for (a, b) in z.x().iter().zip(w.x()) {
            d2 += (a - b) * (a - b);
        }
        self.scale * self.series.eval(d2, z.t() + w.t())
    }
}

/// Q_k(z, w) on the half-space.
pub fn bergman_h(params: &HalfspaceKernelParams, z: &HPoint, w: &HPoint) -> f64 {
    params.eval(z, w)
}

/// |Q_k(z,w)| |z - conj(w)|^{k+n+1}; bounded uniformly in (z, w).
pub fn kernel_bound_ratio(params: &HalfspaceKernelParams, z: &HPoint, w: &HPoint) -> f64 {
    let q = params.eval(z, w).abs();
    q * z.dist_reflected(w).powi(params.k as i32 + params.n as i32 + 1)
}

/// Ball Poisson kernel P(x, y') = (1/(n omega_n)) (1 - |x|^2) / |x - y'|^n.
pub fn poisson_ball(x: &[f64], yp: &[f64], n: usize) -> Result<f64> {
    if x.len() != n || yp.len() != n || n < 2 || n > 3 {
        return Err(Error::Domain("ball dimension must be 2 or 3".into()));
    }
    let r2: f64 = x.iter().map(|v| v * v).sum();
    if r2 >= 1.0 {
        return Err(Error::Domain(format!("|x| = {} not inside the ball", r2.sqrt())));
    }
    let d2: f64 = x.iter().zip(yp).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((1.0 - r2) / (sphere_area(n) * d2.powf(n as f64 / 2.0)))
}

/// Zonal harmonic Z^{(k)}_{x'}(y') = sum_j Y_j^{(k)}(x') Y_j^{(k)}(y'),
/// expressed through its closed form in the inner product x'.y'.
pub fn zonal(n: usize, k: usize, cos_angle: f64) -> Result<f64> {
    match n {
        2 => Ok(if k == 0 {
            1.0 / (2.0 * PI)
        } else {
            chebyshev_t(k, cos_angle.clamp(-1.0, 1.0)) / PI
        }),
        3 => Ok((2.0 * k as f64 + 1.0) / (4.0 * PI) * legendre_p(k, cos_angle.clamp(-1.0, 1.0))),
        _ => Err(Error::Domain(format!("sphere dimension {n} not supported"))),
    }
}

/// Parameters of the ball Bergman kernel Q_m truncated at degree K.
#[derive(Debug, Clone)]
pub struct BallKernelParams {
    pub n: usize,
    pub m: f64,
    pub truncation_degree: usize,
}

impl BallKernelParams {
    pub fn new(n: usize, m: f64, truncation_degree: usize) -> Result<Self> {
        if n < 2 || n > 3 {
            return Err(Error::Domain("ball dimension must be 2 or 3".into()));
        }
        if !(m > -1.0) {
            return Err(Error::Parameter(format!("Bergman weight must exceed -1, got {m}")));
        }
        Ok(Self { n, m, truncation_degree })
    }

    /// Coefficient 2 Gamma(m+1+k+n/2) / (Gamma(m+1) Gamma(k+n/2)).
    pub fn coefficient(&self, k: usize) -> f64 {
        let half_n = self.n as f64 / 2.0;
        2.0 * gamma_ratio(self.m + 1.0 + k as f64 + half_n, k as f64 + half_n) / gamma(self.m + 1.0)
    }
}

/// Truncated-series value plus a geometric tail bound.
#[derive(Debug, Clone, Copy)]
pub struct KernelValue {
    pub value: f64,
    pub tail_bound: f64,
}

/// Ball Bergman kernel Q_m(x, y) through degree K, with a tail bound from
/// the geometric ratio r*rho. Fails when r*rho is too close to one for the
/// truncation to mean anything.
pub fn bergman_ball(params: &BallKernelParams, x: &[f64], y: &[f64]) -> Result<KernelValue> {
    let n = params.n;
    let r: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let rho: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r >= 1.0 || rho >= 1.0 {
        return Err(Error::Domain("kernel arguments must be inside the ball".into()));
    }
    let q = r * rho;
    if q > 0.995 {
        return Err(Error::Truncation(format!(
            "r*rho = {q} too close to 1 for a degree-{} truncation",
            params.truncation_degree
        )));
    }
    let cos_angle = if r > 0.0 && rho > 0.0 {
        x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / (r * rho)
    } else {
        1.0
    };
    let mut value = 0.0;
    let mut last_mag = 0.0;
    for k in 0..=params.truncation_degree {
        let zk = zonal(n, k, cos_angle)?;
        let term = params.coefficient(k) * q.powi(k as i32) * zk;
        value += term;
        // |Z_k| <= Z_k(1); track the envelope for the tail bound
        last_mag = params.coefficient(k) * q.powi(k as i32) * zonal(n, k, 1.0)?;
    }
    // envelope terms grow polynomially in k against the geometric decay;
    // bound the tail by a geometric series with a margin on the ratio
    let ratio = (q * 1.25).min(0.999);
    let tail_bound = last_mag * ratio / (1.0 - ratio);
    Ok(KernelValue { value, tail_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn poisson_at_origin() {
        // x = 0: P = c_n t^{-n}
        for n in 1..=3usize {
            let t = 0.7;
            let x = vec![0.0; n];
            let v = poisson_h(&x, t, n).unwrap();
            let expect = poisson_normalization(n) * t.powi(-(n as i32));
            assert!((v - expect).abs() < 1e-14 * expect.abs());
        }
    }

    #[test]
    fn poisson_homogeneity() {
        // P(x, t) = t^{-n} P(x/t, 1)
        let cases = [(vec![0.4], 1.7), (vec![-2.0], 0.3)];
        for (x, t) in cases {
            let lhs = poisson_h(&x, t, 1).unwrap();
            let xs: Vec<f64> = x.iter().map(|v| v / t).collect();
            let rhs = poisson_h(&xs, 1.0, 1).unwrap() / t;
            assert!((lhs - rhs).abs() < 1e-14 * lhs.abs());
        }
    }

    #[test]
    fn poisson_rejects_nonpositive_height() {
        assert!(poisson_h(&[0.0], 0.0, 1).is_err());
    }

    #[test]
    fn bergman_q0_hand_value() {
        // k = 0, n = 1, x = y, t = s = 1/2: Q_0 = 2 c_1 = 2/pi
        let params = HalfspaceKernelParams::new(1, 0).unwrap();
        let z = HPoint::new1(0.3, 0.5);
        let w = HPoint::new1(0.3, 0.5);
        let v = bergman_h(&params, &z, &w);
        assert!((v - 2.0 / PI).abs() < 1e-14);
    }

    #[test]
    fn bergman_symmetric_through_difference_and_sum() {
        let params = HalfspaceKernelParams::new(2, 0).unwrap();
        let a = bergman_h(
            &params,
            &HPoint::new2(0.1, -0.4, 0.8),
            &HPoint::new2(1.0, 0.2, 0.5),
        );
        let b = bergman_h(
            &params,
            &HPoint::new2(1.0, 0.2, 0.8),
            &HPoint::new2(0.1, -0.4, 0.5),
        );
        assert!((a - b).abs() < 1e-14 * a.abs().max(1.0));
    }

    #[test]
    fn bound_ratio_nonnegative_and_finite() {
        for k in 0..=3u32 {
            for n in 1..=3usize {
                let params = HalfspaceKernelParams::new(n, k).unwrap();
                let z = HPoint::new(&vec![0.3; n], 1.2).unwrap();
                let w = HPoint::new(&vec![-0.2; n], 0.4).unwrap();
                let r = kernel_bound_ratio(&params, &z, &w);
                assert!(r.is_finite() && r >= 0.0);
            }
        }
    }

    #[test]
    fn ball_poisson_center_value() {
        let v = poisson_ball(&[0.0, 0.0, 0.0], &[0.0, 0.0, 1.0], 3).unwrap();
        assert!((v - 1.0 / (4.0 * PI)).abs() < 1e-14);
        assert!(poisson_ball(&[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0], 3).is_err());
    }

    #[test]
    fn ball_bergman_center_value() {
        // x = y = 0: only the k = 0 term, 2 Gamma(m+1+n/2)/(Gamma(m+1)Gamma(n/2)) / (n omega_n)
        let params = BallKernelParams::new(3, 0.0, 10).unwrap();
        let v = bergman_ball(&params, &[0.0; 3], &[0.0; 3]).unwrap();
        let expect = 3.0 / (4.0 * PI); // 2 Gamma(5/2)/Gamma(3/2) = 3
        assert!((v.value - expect).abs() < 1e-13, "{} vs {expect}", v.value);
    }

    #[test]
    fn ball_bergman_symmetry() {
        let params = BallKernelParams::new(3, 1.5, 24).unwrap();
        let x = [0.2, -0.3, 0.4];
        let y = [-0.1, 0.5, 0.2];
        let a = bergman_ball(&params, &x, &y).unwrap().value;
        let b = bergman_ball(&params, &y, &x).unwrap().value;
        assert!((a - b).abs() < 1e-12 * a.abs());
    }

    #[test]
    fn ball_bergman_truncation_failure() {
        let params = BallKernelParams::new(3, 0.0, 24).unwrap();
        let x = [0.999, 0.0, 0.0];
        let y = [0.999, 0.0, 0.0];
        assert!(matches!(
            bergman_ball(&params, &x, &y),
            Err(Error::Truncation(_))
        ));
    }
}
