//! Monomial polynomials in up to three variables, with exact
//! differentiation, plus generators for solid harmonics r^k Y_j^{(k)} as
//! homogeneous harmonic polynomials.
//!
//! Solid harmonics in R^3 are assembled from the classical identity
//! r^k P_k^m(z/r) e^{im phi} sin^m(theta) r^m = (x+iy)^m * r^{k-m} g(z/r)
//! with g the m-th derivative of the Legendre polynomial, which is a
//! polynomial in z and r^2. Coefficients stay well conditioned for the
//! moderate degrees used here (the constructor refuses degrees above 16).

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Highest degree for which the monomial representation is accepted.
pub const MAX_POLY_DEGREE: usize = 16;

/// Polynomial as a map from exponent triples to coefficients; unused
/// variables simply never appear in the exponents.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    terms: BTreeMap<[u8; 3], f64>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut p = Self::default();
        if c != 0.0 {
            p.terms.insert([0, 0, 0], c);
        }
        p
    }

    pub fn monomial(exps: [u8; 3], c: f64) -> Self {
        let mut p = Self::default();
        if c != 0.0 {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn add_term(&mut self, exps: [u8; 3], c: f64) {
        let e = self.terms.entry(exps).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.terms.remove(&exps);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (&e, &c) in &other.terms {
            out.add_term(e, c);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Poly {
        let mut out = Poly::default();
        for (&e, &c) in &self.terms {
            if s * c != 0.0 {
                out.terms.insert(e, s * c);
            }
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (&ea, &ca) in &self.terms {
            for (&eb, &cb) in &other.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: usize) -> Poly {
        let mut out = Poly::constant(1.0);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn derivative(&self, axis: usize) -> Poly {
        let mut out = Poly::default();
        for (&e, &c) in &self.terms {
            if e[axis] > 0 {
                let mut d = e;
                d[axis] -= 1;
                out.add_term(d, c * e[axis] as f64);
            }
        }
        out
    }

    pub fn laplacian(&self, dims: usize) -> Poly {
        let mut out = Poly::default();
        for axis in 0..dims {
            out = out.add(&self.derivative(axis).derivative(axis));
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (&e, &c) in &self.terms {
            let mut t = c;
            for (axis, &p) in e.iter().enumerate() {
                if p > 0 {
                    let v = x.get(axis).copied().unwrap_or(0.0);
                    t *= v.powi(p as i32);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&p| p as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut acc = 1.0;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Coefficients of the Legendre polynomial P_k: index p holds the
/// coefficient of c^p.
fn legendre_coeffs(k: usize) -> Vec<f64> {
    let mut coeffs = vec![0.0; k + 1];
    let scale = (2.0f64).powi(-(k as i32));
    for i in 0..=(k / 2) {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[k - 2 * i] = scale * sign * binomial(k, i) * binomial(2 * k - 2 * i, k);
    }
    coeffs
}

/// Re and Im of (x + iy)^m as polynomials.
fn complex_power(m: usize) -> (Poly, Poly) {
    let mut re = Poly::default();
    let mut im = Poly::default();
    for j in 0..=m {
        let c = binomial(m, j);
        let exps = [(m - j) as u8, j as u8, 0];
        match j % 4 {
            0 => re.add_term(exps, c),
            1 => im.add_term(exps, c),
            2 => re.add_term(exps, -c),
            _ => im.add_term(exps, -c),
        }
    }
    (re, im)
}

/// r^{d} g(z/r) as a polynomial in (x, y, z), for g a polynomial whose
/// exponents all share the parity of d (so the radial powers are even).
fn radialized(g_coeffs: &[f64], d: usize) -> Poly {
    let r2 = {
        let mut p = Poly::default();
        p.add_term([2, 0, 0], 1.0);
        p.add_term([0, 2, 0], 1.0);
        p.add_term([0, 0, 2], 1.0);
        p
    };
    let mut out = Poly::default();
    for (p, &c) in g_coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        debug_assert!((d - p) % 2 == 0);
        let i = (d - p) / 2;
        let zp = Poly::monomial([0, 0, p as u8], c);
        out = out.add(&zp.mul(&r2.pow(i)));
    }
    out
}

/// Dimension of the space of spherical harmonics of degree k on S^{n-1}.
pub fn harmonic_dim(n: usize, k: usize) -> usize {
    match (n, k) {
        (2, 0) => 1,
        (2, _) => 2,
        (3, _) => 2 * k + 1,
        _ => 0,
    }
}

/// Solid harmonic r^k Y_j^{(k)} as an exact homogeneous polynomial, with
/// Y_j^{(k)} orthonormal in L^2 of the unnormalized surface measure.
///
/// Index convention for n = 3: j = 1 is the zonal (m = 0) harmonic;
/// j = 2m and j = 2m + 1 are the cos(m phi) and sin(m phi) harmonics.
/// For n = 2: j = 1 is cos(k theta), j = 2 is sin(k theta) (k >= 1).
pub fn solid_harmonic_poly(n: usize, k: usize, j: usize) -> Result<Poly> {
    if k > MAX_POLY_DEGREE {
        return Err(Error::Unsupported(format!(
            "polynomial representation capped at degree {MAX_POLY_DEGREE}, requested {k}"
        )));
    }
    let d = harmonic_dim(n, k);
    if j == 0 || j > d {
        return Err(Error::Parameter(format!(
            "index {j} outside 1..={d} for degree {k}, n = {n}"
        )));
    }
    match n {
        2 => {
            if k == 0 {
                return Ok(Poly::constant(1.0 / (2.0 * PI).sqrt()));
            }
            let (re, im) = complex_power(k);
            let norm = 1.0 / PI.sqrt();
            Ok(if j == 1 { re.scale(norm) } else { im.scale(norm) })
        }
        3 => {
            let coeffs = legendre_coeffs(k);
            if j == 1 {
                let norm = ((2.0 * k as f64 + 1.0) / (4.0 * PI)).sqrt();
                return Ok(radialized(&coeffs, k).scale(norm));
            }
            let m = j / 2;
            // m-th derivative of P_k
            let mut g = vec![0.0; k - m + 1];
            for p in m..=k {
                let mut fall = 1.0;
                for q in 0..m {
                    fall *= (p - q) as f64;
                }
                g[p - m] = coeffs[p] * fall;
            }
            let mut fact_ratio = 1.0; // (k-m)! / (k+m)!
            for i in (k - m + 1)..=(k + m) {
                fact_ratio /= i as f64;
            }
            let norm = (2.0 * ((2.0 * k as f64 + 1.0) / (4.0 * PI)) * fact_ratio).sqrt();
            let radial = radialized(&g, k - m);
            let (re, im) = complex_power(m);
            let angular = if j % 2 == 0 { re } else { im };
            Ok(angular.mul(&radial).scale(norm))
        }
        _ => Err(Error::Domain(format!("dimension {n} not supported"))),
    }
}

/// Hand-picked harmonic polynomials on the ball, addressed by
/// (degree, index). These are unnormalized, exactly harmonic, and give
/// the norm and reproducing tests inputs that are not basis elements.
pub fn harmonic_polynomial(n: usize, degree: usize, index: usize) -> Result<Poly> {
    let make = |terms: &[([u8; 3], f64)]| {
        let mut p = Poly::default();
        for &(e, c) in terms {
            p.add_term(e, c);
        }
        p
    };
    let p = match (degree, index) {
        (0, 1) => Poly::constant(1.0),
        (1, 1) => make(&[([1, 0, 0], 1.0)]),
        (1, 2) => make(&[([0, 1, 0], 1.0)]),
        (1, 3) if n == 3 => make(&[([0, 0, 1], 1.0)]),
        (2, 1) => make(&[([2, 0, 0], 1.0), ([0, 2, 0], -1.0)]),
        (2, 2) => make(&[([1, 1, 0], 1.0)]),
        (2, 3) if n == 3 => make(&[([0, 0, 2], 2.0), ([2, 0, 0], -1.0), ([0, 2, 0], -1.0)]),
        (3, 1) => make(&[([3, 0, 0], 1.0), ([1, 2, 0], -3.0)]),
        (3, 2) => make(&[([0, 3, 0], 1.0), ([2, 1, 0], -3.0)]),
        (3, 3) if n == 3 => make(&[([2, 0, 1], 1.0), ([0, 2, 1], -1.0)]),
        (3, 4) if n == 3 => {
            make(&[([0, 0, 3], 2.0), ([2, 0, 1], -3.0), ([0, 2, 1], -3.0)])
        }
        (4, 1) => make(&[([4, 0, 0], 1.0), ([2, 2, 0], -6.0), ([0, 4, 0], 1.0)]),
        _ => {
            return Err(Error::Parameter(format!(
                "no harmonic polynomial registered for degree {degree}, index {index}, n = {n}"
            )))
        }
    };
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_arithmetic_and_derivatives() {
        // (x + y^2)' along y = 2y
        let mut p = Poly::default();
        p.add_term([1, 0, 0], 1.0);
        p.add_term([0, 2, 0], 1.0);
        let dy = p.derivative(1);
        assert_eq!(dy.eval(&[0.0, 3.0, 0.0]), 6.0);
        assert_eq!(p.eval(&[2.0, 3.0, 0.0]), 11.0);
    }

    #[test]
    fn solid_harmonics_are_harmonic() {
        for k in 0..=6 {
            for j in 1..=harmonic_dim(3, k) {
                let p = solid_harmonic_poly(3, k, j).unwrap();
                let lap = p.laplacian(3);
                assert!(
                    lap.max_abs_coeff() < 1e-9 * p.max_abs_coeff().max(1.0),
                    "degree {k} index {j} laplacian {lap:?}"
                );
            }
        }
        for k in 0..=8 {
            for j in 1..=harmonic_dim(2, k) {
                let p = solid_harmonic_poly(2, k, j).unwrap();
                assert!(p.laplacian(2).max_abs_coeff() < 1e-10);
            }
        }
    }

    #[test]
    fn solid_harmonic_degree_one_matches_standard_table() {
        // Y_{1,0} = sqrt(3/4pi) z
        let p = solid_harmonic_poly(3, 1, 1).unwrap();
        let c = (3.0 / (4.0 * PI)).sqrt();
        assert!((p.eval(&[0.0, 0.0, 1.0]) - c).abs() < 1e-14);
        // cos branch: sqrt(3/4pi) x
        let p = solid_harmonic_poly(3, 1, 2).unwrap();
        assert!((p.eval(&[1.0, 0.0, 0.0]) - c).abs() < 1e-14);
        // sin branch: sqrt(3/4pi) y
        let p = solid_harmonic_poly(3, 1, 3).unwrap();
        assert!((p.eval(&[0.0, 1.0, 0.0]) - c).abs() < 1e-14);
    }

    #[test]
    fn harmonic_catalog_is_harmonic() {
        for (deg, idx) in [(0, 1), (1, 1), (2, 1), (2, 3), (3, 1), (3, 4), (4, 1)] {
            let p = harmonic_polynomial(3, deg, idx).unwrap();
            assert!(p.laplacian(3).is_zero(), "degree {deg} index {idx}");
        }
    }

    #[test]
    fn degree_cap_enforced() {
        assert!(solid_harmonic_poly(3, MAX_POLY_DEGREE + 1, 1).is_err());
    }
}
