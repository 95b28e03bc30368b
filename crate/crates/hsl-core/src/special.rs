//! Scalar special functions: Gamma via the Lanczos approximation,
//! log-Gamma, Beta, Legendre polynomials.

use std::f64::consts::PI;

// Lanczos g=7, n=9 coefficients (GSL / numerical recipes lineage).
const LANCZOS_G: f64 = 7.0;
const LANCZOS_P: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real arguments (poles at non-positive integers return NaN).
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection formula
        let s = (PI * x).sin();
        if s == 0.0 {
            return f64::NAN;
        }
        PI / (s * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS_P[0];
        for (i, p) in LANCZOS_P.iter().enumerate().skip(1) {
            acc += p / (x + i as f64);
        }
        let w = x + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * w.powf(x + 0.5) * (-w).exp() * acc
    }
}

/// Natural log of |Gamma(x)| for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).abs().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_P[0];
    for (i, p) in LANCZOS_P.iter().enumerate().skip(1) {
        acc += p / (x + i as f64);
    }
    let w = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * w.ln() - w + acc.ln()
}

/// Gamma(a)/Gamma(b) computed through log-Gamma so large arguments do not overflow.
pub fn gamma_ratio(a: f64, b: f64) -> f64 {
    (ln_gamma(a) - ln_gamma(b)).exp()
}

/// Beta(a, b) for a, b > 0.
pub fn beta(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

/// Legendre polynomial P_k(x) by the three-term recurrence.
pub fn legendre_p(k: usize, x: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut pm1, mut p) = (1.0, x);
            for j in 1..k {
                let next = (((2 * j + 1) as f64) * x * p - (j as f64) * pm1) / (j as f64 + 1.0);
                pm1 = p;
                p = next;
            }
            p
        }
    }
}

/// Chebyshev polynomial T_k(x) (cos(k theta) for x = cos theta).
pub fn chebyshev_t(k: usize, x: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut tm1, mut t) = (1.0, x);
            for _ in 1..k {
                let next = 2.0 * x * t - tm1;
                tm1 = t;
                t = next;
            }
            t
        }
    }
}

/// Surface area of the unit sphere S^{n-1} in R^n.
pub fn sphere_area(n: usize) -> f64 {
    // n * omega_n = 2 pi^{n/2} / Gamma(n/2)
    2.0 * PI.powf(n as f64 / 2.0) / gamma(n as f64 / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_integers_and_halves() {
        assert!((gamma(1.0) - 1.0).abs() < 1e-14);
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-14);
        // recurrence Gamma(x+1) = x Gamma(x) at a few points
        for &x in &[0.3, 1.7, 4.2, 11.5] {
            let rel = (gamma(x + 1.0) - x * gamma(x)).abs() / gamma(x + 1.0);
            assert!(rel < 1e-13, "x={x} rel={rel}");
        }
    }

    #[test]
    fn gamma_ratio_large_args() {
        // Gamma(45.5)/Gamma(43.5) = 44.5 * 43.5
        let r = gamma_ratio(45.5, 43.5);
        assert!((r - 44.5 * 43.5).abs() / r < 1e-12);
    }

    #[test]
    fn legendre_values() {
        assert!((legendre_p(2, 0.5) - (3.0 * 0.25 - 1.0) / 2.0).abs() < 1e-15);
        // P_k(1) = 1
        for k in 0..20 {
            assert!((legendre_p(k, 1.0) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-12);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-12);
    }
}
