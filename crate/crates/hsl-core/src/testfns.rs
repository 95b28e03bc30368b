//! Symbolic families of harmonic functions on the half-space, its
//! products, and the ball, with exact pointwise evaluation and exact or
//! finite-difference gradients. These are the inputs to every inequality
//! check in the suite.

use crate::error::{Error, Result};
use crate::halfspace::HPoint;
use crate::kernels::{poisson_normalization, DtSeries};
use crate::poly::{harmonic_dim, harmonic_polynomial, solid_harmonic_poly, Poly};

/// Where a test function lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Halfspace { n: usize },
    HalfspaceProduct { n: usize, m: usize },
    Ball { n: usize },
}

/// A family member with its parameters.
#[derive(Debug, Clone)]
pub enum TestFunction {
    /// P(x, t + s0): the Poisson kernel pushed up by s0 > 0.
    PoissonShift { n: usize, s0: f64 },
    /// d^l/dt^l |z - conj(theta)|^{-(n-1)}, harmonic on H for n = 2, 3.
    DerivativeKernel { theta: HPoint, l: u32 },
    /// Hand-picked harmonic polynomial on the ball.
    HarmonicPolynomialBall { n: usize, degree: usize, index: usize },
    /// Solid harmonic r^k Y_j^{(k)}.
    SolidHarmonic { n: usize, k: usize, j: usize },
    /// Product f(z_1,...,z_m) = prod f_j(z_j) of half-space members.
    ProductOnHm { factors: Vec<TestFunction> },
}

/// Gradient order and differentiation mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GradMode {
    Exact,
    FiniteDifference { step: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientRequest {
    pub order: usize,
    pub mode: GradMode,
}

/// Shared closed-form engine for the half-space families: value and first
/// derivatives of  scale * S(|x - cx|^2, t + shift)  where S is a
/// `DtSeries`.
struct SeriesFn {
    series: DtSeries,
    scale: f64,
    center: Vec<f64>,
    height_shift: f64,
}

impl SeriesFn {
    fn geometry(&self, z: &HPoint) -> (f64, f64, Vec<f64>) {
        let diffs: Vec<f64> = z
            .x()
            .iter()
            .zip(&self.center)
            .map(|(a, b)| a - b)
            .collect();
        let d2 = diffs.iter().map(|d| d * d).sum();
        (d2, z.t() + self.height_shift, diffs)
    }

    fn value(&self, z: &HPoint) -> f64 {
        let (d2, u, _) = self.geometry(z);
        self.scale * self.series.eval(d2, u)
    }

    fn grad_norm(&self, z: &HPoint) -> f64 {
        let (d2, u, diffs) = self.geometry(z);
        let du = self.series.differentiate().eval(d2, u);
        let dd2 = self.series.differentiate_d2().eval(d2, u);
        let horiz: f64 = diffs.iter().map(|d| (2.0 * d * dd2).powi(2)).sum();
        self.scale.abs() * (du * du + horiz).sqrt()
    }
}

impl TestFunction {
    pub fn domain(&self) -> Domain {
        match self {
            TestFunction::PoissonShift { n, .. } => Domain::Halfspace { n: *n },
            TestFunction::DerivativeKernel { theta, .. } => {
                Domain::Halfspace { n: theta.dim() }
            }
            TestFunction::HarmonicPolynomialBall { n, .. }
            | TestFunction::SolidHarmonic { n, .. } => Domain::Ball { n: *n },
            TestFunction::ProductOnHm { factors } => {
                let n = match factors.first().map(|f| f.domain()) {
                    Some(Domain::Halfspace { n }) => n,
                    _ => 0,
                };
                Domain::HalfspaceProduct { n, m: factors.len() }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TestFunction::PoissonShift { n, s0 } => {
                if *n == 0 || *n > 3 {
                    return Err(Error::Domain(format!("dimension {n} not supported")));
                }
                if !(*s0 > 0.0) {
                    return Err(Error::Parameter(format!("shift must be positive, got {s0}")));
                }
            }
            TestFunction::DerivativeKernel { theta, .. } => {
                if theta.dim() < 2 {
                    return Err(Error::Domain(
                        "derivative kernels need n >= 2 (the power n-1 vanishes at n = 1)".into(),
                    ));
                }
            }
            TestFunction::HarmonicPolynomialBall { n, degree, index } => {
                harmonic_polynomial(*n, *degree, *index)?;
            }
            TestFunction::SolidHarmonic { n, k, j } => {
                if *j == 0 || *j > harmonic_dim(*n, *k) {
                    return Err(Error::Parameter(format!(
                        "index {j} invalid for degree {k}, n = {n}"
                    )));
                }
                solid_harmonic_poly(*n, *k, *j)?;
            }
            TestFunction::ProductOnHm { factors } => {
                if factors.is_empty() || factors.len() > 3 {
                    return Err(Error::Capacity(
                        "products support 1..=3 factors".into(),
                    ));
                }
                for f in factors {
                    f.validate()?;
                    if !matches!(f.domain(), Domain::Halfspace { .. }) {
                        return Err(Error::Domain(
                            "product factors must live on the half-space".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn series_fn(&self) -> Option<SeriesFn> {
        match self {
            TestFunction::PoissonShift { n, s0 } => Some(SeriesFn {
                series: DtSeries::new((*n as f64 + 1.0) / 2.0, 1),
                scale: poisson_normalization(*n),
                center: vec![0.0; *n],
                height_shift: *s0,
            }),
            TestFunction::DerivativeKernel { theta, l } => Some(SeriesFn {
                series: DtSeries::new((theta.dim() as f64 - 1.0) / 2.0, 0)
                    .differentiate_n(*l),
                scale: 1.0,
                center: theta.x().to_vec(),
                height_shift: theta.t(),
            }),
            _ => None,
        }
    }

    /// Exact polynomial form for the ball families.
    pub fn to_poly(&self) -> Result<Poly> {
        match self {
            TestFunction::HarmonicPolynomialBall { n, degree, index } => {
                harmonic_polynomial(*n, *degree, *index)
            }
            TestFunction::SolidHarmonic { n, k, j } => solid_harmonic_poly(*n, *k, *j),
            _ => Err(Error::Unsupported(
                "polynomial form exists only for ball families".into(),
            )),
        }
    }

    /// Evaluation on the half-space.
    pub fn eval_h(&self, z: &HPoint) -> Result<f64> {
        match self.domain() {
            Domain::Halfspace { n } if n == z.dim() => {}
            d => {
                return Err(Error::Domain(format!(
                    "function lives on {d:?}, evaluated at a half-space point of dimension {}",
                    z.dim()
                )))
            }
        }
        Ok(self.series_fn().expect("half-space family").value(z))
    }

    /// Evaluation on the product domain H^m.
    pub fn eval_hm(&self, zs: &[HPoint]) -> Result<f64> {
        match self {
            TestFunction::ProductOnHm { factors } => {
                if factors.len() != zs.len() {
                    return Err(Error::ShapeMismatch(format!(
                        "{} factors, {} points",
                        factors.len(),
                        zs.len()
                    )));
                }
                let mut acc = 1.0;
                for (f, z) in factors.iter().zip(zs) {
                    acc *= f.eval_h(z)?;
                }
                Ok(acc)
            }
            _ if zs.len() == 1 => self.eval_h(&zs[0]),
            _ => Err(Error::Domain("not a product-domain function".into())),
        }
    }

    /// Evaluation on the ball.
    pub fn eval_ball(&self, x: &[f64]) -> Result<f64> {
        let n = match self.domain() {
            Domain::Ball { n } => n,
            d => return Err(Error::Domain(format!("function lives on {d:?}, not the ball"))),
        };
        if x.len() != n {
            return Err(Error::Domain("point dimension mismatch".into()));
        }
        if x.iter().map(|v| v * v).sum::<f64>() >= 1.0 {
            return Err(Error::Domain("point outside the open ball".into()));
        }
        Ok(self.to_poly()?.eval(x))
    }

    /// Plain evaluation at full coordinates (half-space: x..., t; ball: x...).
    pub fn eval_coords(&self, coords: &[f64]) -> Result<f64> {
        match self.domain() {
            Domain::Halfspace { n } => {
                let z = HPoint::new(&coords[..n], coords[n])?;
                self.eval_h(&z)
            }
            Domain::Ball { .. } => self.eval_ball(coords),
            Domain::HalfspaceProduct { n, m } => {
                if coords.len() != m * (n + 1) {
                    return Err(Error::ShapeMismatch("coordinate count mismatch".into()));
                }
                let pts: Result<Vec<HPoint>> = coords
                    .chunks(n + 1)
                    .map(|c| HPoint::new(&c[..n], c[n]))
                    .collect();
                self.eval_hm(&pts?)
            }
        }
    }

    /// |grad^N f| = sqrt( sum_{|gamma|=N} |D^gamma f|^2 ) at full coordinates.
    pub fn grad_norm(&self, req: &GradientRequest, coords: &[f64]) -> Result<f64> {
        if req.order == 0 {
            return Ok(self.eval_coords(coords)?.abs());
        }
        let dims = match self.domain() {
            Domain::Halfspace { n } => n + 1,
            Domain::Ball { n } => n,
            Domain::HalfspaceProduct { .. } => {
                return Err(Error::Unsupported(
                    "gradients of product-domain functions are not provided".into(),
                ))
            }
        };
        match req.mode {
            GradMode::Exact => self.grad_norm_exact(req.order, dims, coords),
            GradMode::FiniteDifference { step } => {
                if !(step > 0.0) {
                    return Err(Error::Parameter("step must be positive".into()));
                }
                let mut acc = 0.0;
                for gamma in multi_indices(dims, req.order) {
                    let d = fd_derivative(&|c: &[f64]| self.eval_coords(c), coords, &gamma, step)?;
                    acc += d * d;
                }
                Ok(acc.sqrt())
            }
        }
    }

    fn grad_norm_exact(&self, order: usize, dims: usize, coords: &[f64]) -> Result<f64> {
        match self {
            TestFunction::HarmonicPolynomialBall { .. } | TestFunction::SolidHarmonic { .. } => {
                if order > 4 {
                    return Err(Error::Unsupported(
                        "exact gradients capped at order 4".into(),
                    ));
                }
                let p = self.to_poly()?;
                let mut acc = 0.0;
                for gamma in multi_indices(dims, order) {
                    let mut q = p.clone();
                    for (axis, &cnt) in gamma.iter().enumerate() {
                        for _ in 0..cnt {
                            q = q.derivative(axis);
                        }
                    }
                    let d = q.eval(coords);
                    acc += d * d;
                }
                Ok(acc.sqrt())
            }
            TestFunction::PoissonShift { n, .. } => {
                if order != 1 {
                    return Err(Error::Unsupported(
                        "exact gradients of kernel families only at order 1".into(),
                    ));
                }
                let z = HPoint::new(&coords[..*n], coords[*n])?;
                Ok(self.series_fn().unwrap().grad_norm(&z))
            }
            TestFunction::DerivativeKernel { theta, .. } => {
                if order != 1 {
                    return Err(Error::Unsupported(
                        "exact gradients of kernel families only at order 1".into(),
                    ));
                }
                let n = theta.dim();
                let z = HPoint::new(&coords[..n], coords[n])?;
                Ok(self.series_fn().unwrap().grad_norm(&z))
            }
            _ => Err(Error::Unsupported("exact gradient unavailable for family".into())),
        }
    }
}

/// All multi-indices gamma with |gamma| = order over `dims` axes.
pub fn multi_indices(dims: usize, order: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; dims];
    fn rec(dims: usize, rem: usize, axis: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if axis == dims - 1 {
            cur[axis] = rem;
            out.push(cur.clone());
            cur[axis] = 0;
            return;
        }
        for take in 0..=rem {
            cur[axis] = take;
            rec(dims, rem - take, axis + 1, cur, out);
            cur[axis] = 0;
        }
    }
    rec(dims, order, 0, &mut cur, &mut out);
    out
}

/// Iterated second-order central differences for D^gamma f.
pub fn fd_derivative<F: Fn(&[f64]) -> Result<f64>>(
    f: &F,
    coords: &[f64],
    gamma: &[usize],
    step: f64,
) -> Result<f64> {
    match gamma.iter().position(|&g| g > 0) {
        None => f(coords),
        Some(axis) => {
            let mut reduced = gamma.to_vec();
            reduced[axis] -= 1;
            let mut up = coords.to_vec();
            up[axis] += step;
            let mut dn = coords.to_vec();
            dn[axis] -= step;
            let a = fd_derivative(f, &up, &reduced, step)?;
            let b = fd_derivative(f, &dn, &reduced, step)?;
            Ok((a - b) / (2.0 * step))
        }
    }
}

/// Discrete Laplacian via second central differences, for harmonicity checks.
pub fn fd_laplacian<F: Fn(&[f64]) -> Result<f64>>(
    f: &F,
    coords: &[f64],
    dims: usize,
    step: f64,
) -> Result<f64> {
    let center = f(coords)?;
    let mut acc = 0.0;
    for axis in 0..dims {
        let mut up = coords.to_vec();
        up[axis] += step;
        let mut dn = coords.to_vec();
        dn[axis] -= step;
        acc += (f(&up)? - 2.0 * center + f(&dn)?) / (step * step);
    }
    Ok(acc)
}

/// Parses the CLI addressing syntax, e.g. `poisson_shift(1.0)`,
/// `poisson_shift(1.0, 2)`, `derivative_kernel(0, 0, 1, 2)` (theta
/// coordinates then the derivative order), `solid_harmonic(3, 2, 1)`,
/// `harmonic_poly(3, 2, 1)`, `product(poisson_shift(1), poisson_shift(2))`.
/// The colon short form `name:a,b,...` is accepted for non-nested families.
pub fn parse_testfn(input: &str) -> Result<TestFunction> {
    let s = input.trim();
    let (name, args) = if let Some(open) = s.find('(') {
        if !s.ends_with(')') {
            return Err(Error::Parameter(format!("unbalanced parentheses in {s:?}")));
        }
        (&s[..open], split_args(&s[open + 1..s.len() - 1]))
    } else if let Some(colon) = s.find(':') {
        (&s[..colon], split_args(&s[colon + 1..]))
    } else {
        (s, Vec::new())
    };
    let parse_num = |t: &str| -> Result<f64> {
        t.trim()
            .parse::<f64>()
            .map_err(|e| Error::Parameter(format!("bad number {t:?}: {e}")))
    };
    let tf = match name.trim() {
        "poisson_shift" => {
            if args.is_empty() || args.len() > 2 {
                return Err(Error::Parameter("poisson_shift takes (s0) or (s0, n)".into()));
            }
            let s0 = parse_num(&args[0])?;
            let n = if args.len() == 2 { parse_num(&args[1])? as usize } else { 1 };
            TestFunction::PoissonShift { n, s0 }
        }
        "derivative_kernel" => {
            if args.len() < 4 {
                return Err(Error::Parameter(
                    "derivative_kernel takes (x1..xn, t, l) with n >= 2".into(),
                ));
            }
            let nums: Result<Vec<f64>> = args.iter().map(|a| parse_num(a)).collect();
            let nums = nums?;
            let l = nums[nums.len() - 1] as u32;
            let t = nums[nums.len() - 2];
            let theta = HPoint::new(&nums[..nums.len() - 2], t)?;
            TestFunction::DerivativeKernel { theta, l }
        }
        "solid_harmonic" => {
            if args.len() != 3 {
                return Err(Error::Parameter("solid_harmonic takes (n, k, j)".into()));
            }
            TestFunction::SolidHarmonic {
                n: parse_num(&args[0])? as usize,
                k: parse_num(&args[1])? as usize,
                j: parse_num(&args[2])? as usize,
            }
        }
        "harmonic_poly" => {
            if args.len() != 3 {
                return Err(Error::Parameter("harmonic_poly takes (n, degree, index)".into()));
            }
            TestFunction::HarmonicPolynomialBall {
                n: parse_num(&args[0])? as usize,
                degree: parse_num(&args[1])? as usize,
                index: parse_num(&args[2])? as usize,
            }
        }
        "product" => {
            let factors: Result<Vec<TestFunction>> =
                args.iter().map(|a| parse_testfn(a)).collect();
            TestFunction::ProductOnHm { factors: factors? }
        }
        other => {
            return Err(Error::Parameter(format!("unknown test function family {other:?}")))
        }
    };
    tf.validate()?;
    Ok(tf)
}

/// Splits a comma-separated argument list at depth zero.
fn split_args(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                cur.push(ch);
            }
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}
