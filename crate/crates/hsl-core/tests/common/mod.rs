//! Shared oracles for the integration suites: Richardson-extrapolated
//! finite differences, a 1-d radial quadrature, and seeded sampling.
//! Everything here is independent of the library's evaluation paths it is
//! used to check.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn central_difference<F: Fn(f64) -> f64>(f: &F, x0: f64, order: usize, h: f64) -> f64 {
    // nodes x0 + (order/2 - i) h, binomial weights, O(h^2)
    let mut acc = 0.0;
    let mut coeff = 1.0;
    for i in 0..=order {
        let offset = order as f64 / 2.0 - i as f64;
        acc += coeff * f(x0 + offset * h);
        coeff *= -((order - i) as f64) / (i as f64 + 1.0);
    }
    acc / h.powi(order as i32)
}

/// Richardson-extrapolated central finite difference of the given order.
pub fn fd_derivative_richardson<F: Fn(f64) -> f64>(
    f: F,
    x0: f64,
    order: usize,
    h0: f64,
    levels: usize,
) -> f64 {
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(levels);
    for j in 0..levels {
        let h = h0 / (2.0f64).powi(j as i32);
        let mut row = vec![central_difference(&f, x0, order, h)];
        for k in 1..=j {
            let factor = (4.0f64).powi(k as i32);
            let prev = table[j - 1][k - 1];
            let cur = row[k - 1];
            row.push((factor * cur - prev) / (factor - 1.0));
        }
        table.push(row);
    }
    *table.last().unwrap().last().unwrap()
}

/// Integral of g over [0, infinity) by dyadically widening Gauss panels;
/// suitable for integrands decaying at least like r^{-2}.
pub fn integrate_halfline<G: Fn(f64) -> f64>(g: G, order: usize, top_exponent: i32) -> f64 {
    let rule = hsl_core::quad::rules::gauss_legendre(order);
    let mut edges = vec![0.0f64, 1.0];
    let mut e = 1.0f64;
    while e < (2.0f64).powi(top_exponent) {
        e *= 2.0;
        edges.push(e);
    }
    let mut acc = 0.0;
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = (a + b) / 2.0;
        let half = (b - a) / 2.0;
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            acc += wt * half * g(mid + half * x);
        }
    }
    acc
}

/// Log-log slope of (x_i, y_i) by least squares.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}

/// Random half-space point with log-uniform height.
pub fn random_hpoint(rng: &mut ChaCha8Rng, n: usize, x_range: f64, t_exp_range: f64) -> hsl_core::HPoint {
    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-x_range..x_range)).collect();
    let e: f64 = rng.gen_range(-t_exp_range..t_exp_range);
    hsl_core::HPoint::new(&x, (2.0f64).powf(e)).unwrap()
}

#[test]
fn oracle_self_checks() {
    // derivative oracle against exp (all derivatives are exp)
    for order in 1..=4usize {
        let d = fd_derivative_richardson(|x: f64| x.exp(), 0.3, order, 0.4, 4);
        let exact = (0.3f64).exp();
        assert!(
            (d - exact).abs() < 1e-8 * exact,
            "order {order}: {d} vs {exact}"
        );
    }
    // half-line oracle against int_0^inf dr/(1+r^2) = pi/2
    let v = integrate_halfline(|r| 1.0 / (1.0 + r * r), 16, 22);
    assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
    // slope oracle on an exact power law
    let xs = [0.5, 1.0, 2.0, 4.0];
    let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-1.7)).collect();
    assert!((loglog_slope(&xs, &ys) + 1.7).abs() < 1e-12);
}
