//! Spherical-harmonic bases on S^{n-1} (n = 2, 3), coefficient tables of
//! harmonic functions on the ball, convolution, the fractional derivative
//! Lambda_t, and the multiplier sup-functionals.
//!
//! The n = 3 basis is real and orthonormal for the unnormalized surface
//! measure, built from fully normalized associated Legendre functions
//! without the Condon-Shortley phase; n = 2 uses the trigonometric basis
//! { (2 pi)^{-1/2}, pi^{-1/2} cos k theta, pi^{-1/2} sin k theta }.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::poly::{harmonic_dim, solid_harmonic_poly, Poly, MAX_POLY_DEGREE};
use crate::quad::SphereQuadSpec;
use crate::special::{gamma, gamma_ratio};

/// Real orthonormal spherical-harmonic basis up to a degree cap.
///
/// Index convention (matching `solid_harmonic_poly`): for n = 3, j = 1 is
/// the zonal harmonic, j = 2m / 2m+1 the cos / sin harmonics of order m;
/// for n = 2, j = 1 / 2 are cos / sin.
#[derive(Debug, Clone)]
pub struct SphericalBasis {
    pub n: usize,
    pub max_degree: usize,
}

impl SphericalBasis {
    pub fn new(n: usize, max_degree: usize) -> Result<Self> {
        if n < 2 || n > 3 {
            return Err(Error::Domain(format!("sphere dimension {n} not supported")));
        }
        Ok(Self { n, max_degree })
    }

    pub fn dim(&self, k: usize) -> usize {
        harmonic_dim(self.n, k)
    }

    /// Evaluates every basis element at a point of the sphere; the result
    /// is ragged, indexed `[k][j-1]`.
    pub fn eval_all(&self, point: &[f64]) -> Vec<Vec<f64>> {
        match self.n {
            2 => {
                let theta = point[1].atan2(point[0]);
                let mut out = Vec::with_capacity(self.max_degree + 1);
                out.push(vec![1.0 / (2.0 * PI).sqrt()]);
                let norm = 1.0 / PI.sqrt();
                for k in 1..=self.max_degree {
                    let kt = k as f64 * theta;
                    out.push(vec![norm * kt.cos(), norm * kt.sin()]);
                }
                out
            }
            3 => {
                let ct = point[2].clamp(-1.0, 1.0);
                let st = (point[0] * point[0] + point[1] * point[1]).sqrt();
                let phi = point[1].atan2(point[0]);
                let legendre = normalized_assoc_legendre(self.max_degree, ct, st);
                let sqrt2 = (2.0f64).sqrt();
                let mut out = Vec::with_capacity(self.max_degree + 1);
                for (l, row) in legendre.iter().enumerate() {
                    let mut yrow = Vec::with_capacity(2 * l + 1);
                    yrow.push(row[0]);
                    for m in 1..=l {
                        let mp = m as f64 * phi;
                        yrow.push(sqrt2 * row[m] * mp.cos());
                        yrow.push(sqrt2 * row[m] * mp.sin());
                    }
                    out.push(yrow);
                }
                out
            }
            _ => unreachable!(),
        }
    }

    pub fn eval(&self, k: usize, j: usize, point: &[f64]) -> f64 {
        self.eval_all(point)[k][j - 1]
    }
}

/// Fully normalized associated Legendre values C_l^m (Condon-Shortley
/// free) for all l <= max_degree, m <= l, at cos(theta) = ct.
fn normalized_assoc_legendre(max_degree: usize, ct: f64, st: f64) -> Vec<Vec<f64>> {
    let mut c = vec![vec![0.0; max_degree + 1]; max_degree + 1];
    c[0][0] = 1.0 / (4.0 * PI).sqrt();
    for m in 1..=max_degree {
        c[m][m] = ((2.0 * m as f64 + 1.0) / (2.0 * m as f64)).sqrt() * st * c[m - 1][m - 1];
    }
    for m in 0..max_degree {
        c[m + 1][m] = (2.0 * m as f64 + 3.0).sqrt() * ct * c[m][m];
    }
    for m in 0..=max_degree {
        for l in (m + 2)..=max_degree {
            let lf = l as f64;
            let mf = m as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0))
                .sqrt();
            c[l][m] = a * (ct * c[l - 1][m] - b * c[l - 2][m]);
        }
    }
    c
}

/// Ragged array of spherical-harmonic coefficients b_k^j of a harmonic
/// function, 0 <= k <= K, 1 <= j <= d_k.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable {
    pub n: usize,
    data: Vec<Vec<f64>>,
}

/// Multiplier sequences share the ragged coefficient shape.
pub type MultiplierSeq = CoeffTable;

impl CoeffTable {
    pub fn zeros(n: usize, max_degree: usize) -> Result<Self> {
        if n < 2 || n > 3 {
            return Err(Error::Domain(format!("dimension {n} not supported")));
        }
        Ok(Self {
            n,
            data: (0..=max_degree)
                .map(|k| vec![0.0; harmonic_dim(n, k)])
                .collect(),
        })
    }

    pub fn ones(n: usize, max_degree: usize) -> Result<Self> {
        let mut t = Self::zeros(n, max_degree)?;
        for row in &mut t.data {
            for v in row {
                *v = 1.0;
            }
        }
        Ok(t)
    }

    pub fn delta(n: usize, k: usize, j: usize, max_degree: usize) -> Result<Self> {
        let mut t = Self::zeros(n, max_degree)?;
        t.set(k, j, 1.0)?;
        Ok(t)
    }

    pub fn max_degree(&self) -> usize {
        self.data.len() - 1
    }

    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.data[k][j - 1]
    }

    pub fn set(&mut self, k: usize, j: usize, value: f64) -> Result<()> {
        if k >= self.data.len() || j == 0 || j > self.data[k].len() {
            return Err(Error::ShapeMismatch(format!("no slot (k={k}, j={j})")));
        }
        self.data[k][j - 1] = value;
        Ok(())
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.data
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .map(|row| row.iter().map(|v| v * s).collect())
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n || self.data.len() != other.data.len() {
            return Err(Error::ShapeMismatch("table shapes differ".into()));
        }
        let mut out = self.clone();
        for (r, row) in out.data.iter_mut().enumerate() {
            for (i, v) in row.iter_mut().enumerate() {
                *v += other.data[r][i];
            }
        }
        Ok(out)
    }

    /// Serializes as `k j value` lines, one coefficient per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, row) in self.data.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                s.push_str(&format!("{} {} {:.17e}\n", k, i + 1, v));
            }
        }
        s
    }

    pub fn from_text(n: usize, text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        let mut max_k = 0usize;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected `k j value`, got {line:?}"),
                });
            }
            let k: usize = toks[0].parse().map_err(|e| Error::Parse {
                line: lineno + 1,
                message: format!("bad degree: {e}"),
            })?;
            let j: usize = toks[1].parse().map_err(|e| Error::Parse {
                line: lineno + 1,
                message: format!("bad index: {e}"),
            })?;
            let v: f64 = toks[2].parse().map_err(|e| Error::Parse {
                line: lineno + 1,
                message: format!("bad value: {e}"),
            })?;
            max_k = max_k.max(k);
            entries.push((lineno + 1, k, j, v));
        }
        let mut t = Self::zeros(n, max_k)?;
        for (lineno, k, j, v) in entries {
            t.set(k, j, v).map_err(|e| Error::Parse {
                line: lineno,
                message: e.to_string(),
            })?;
        }
        Ok(t)
    }

    /// Exact polynomial form of the synthesized function (degree-capped).
    pub fn to_poly(&self) -> Result<Poly> {
        if self.max_degree() > MAX_POLY_DEGREE {
            return Err(Error::Unsupported(format!(
                "polynomial synthesis capped at degree {MAX_POLY_DEGREE}"
            )));
        }
        let mut out = Poly::zero();
        for (k, row) in self.data.iter().enumerate() {
            for (i, &b) in row.iter().enumerate() {
                if b != 0.0 {
                    out = out.add(&solid_harmonic_poly(self.n, k, i + 1)?.scale(b));
                }
            }
        }
        Ok(out)
    }
}

/// Coefficient extraction b_k^j = r_probe^{-k} int_S f(r_probe x') Y_j^{(k)}(x') dx'.
pub fn expand<F: Fn(&[f64]) -> f64>(
    f: F,
    n: usize,
    max_degree: usize,
    r_probe: f64,
    sphere_spec: &SphereQuadSpec,
) -> Result<CoeffTable> {
    if !(r_probe > 0.0 && r_probe < 1.0) {
        return Err(Error::Parameter(format!("probe radius {r_probe} outside (0,1)")));
    }
    if r_probe.powi(max_degree as i32) < 1e-280 {
        return Err(Error::Parameter(format!(
            "r_probe^K underflows: {r_probe}^{max_degree}"
        )));
    }
    if sphere_spec.n != n {
        return Err(Error::ShapeMismatch("sphere rule dimension mismatch".into()));
    }
    let rule = sphere_spec.rule()?;
    let basis = SphericalBasis::new(n, max_degree)?;
    let mut table = CoeffTable::zeros(n, max_degree)?;
    for node in &rule.nodes {
        let x: Vec<f64> = node.point.iter().map(|c| c * r_probe).collect();
        let v = f(&x);
        if !v.is_finite() {
            return Err(Error::Evaluation { value: v, node: x });
        }
        let ys = basis.eval_all(&node.point);
        for (k, row) in ys.iter().enumerate() {
            for (i, y) in row.iter().enumerate() {
                table.data[k][i] += node.weight * v * y;
            }
        }
    }
    for (k, row) in table.data.iter_mut().enumerate() {
        let scale = r_probe.powi(-(k as i32));
        for v in row {
            *v *= scale;
        }
    }
    Ok(table)
}

/// Truncated series value sum_k r^k b_k . Y^k(x') at an interior point.
pub fn synth(table: &CoeffTable, x: &[f64]) -> Result<f64> {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    if r2 >= 1.0 {
        return Err(Error::Domain(format!("|x| = {} not inside the ball", r2.sqrt())));
    }
    let r = r2.sqrt();
    if r == 0.0 {
        // only the constant term survives
        return Ok(table.data[0][0] / crate::special::sphere_area(table.n).sqrt());
    }
    let xp: Vec<f64> = x.iter().map(|v| v / r).collect();
    let basis = SphericalBasis::new(table.n, table.max_degree())?;
    let ys = basis.eval_all(&xp);
    let mut acc = 0.0;
    let mut rk = 1.0;
    for (k, row) in table.data.iter().enumerate() {
        let mut block = 0.0;
        for (i, &b) in row.iter().enumerate() {
            block += b * ys[k][i];
        }
        acc += rk * block;
        rk *= r;
    }
    Ok(acc)
}

/// Entrywise product (c * f): the coefficient-multiplier action.
pub fn convolve(c: &MultiplierSeq, f: &CoeffTable) -> Result<CoeffTable> {
    if c.n != f.n || c.data.len() != f.data.len() {
        return Err(Error::ShapeMismatch(format!(
            "multiplier shape (n={}, K={}) does not match table (n={}, K={})",
            c.n,
            c.max_degree(),
            f.n,
            f.max_degree()
        )));
    }
    let mut out = f.clone();
    for (k, row) in out.data.iter_mut().enumerate() {
        for (i, v) in row.iter_mut().enumerate() {
            *v *= c.data[k][i];
        }
    }
    Ok(out)
}

/// Gamma-ratio factor of the fractional derivative Lambda_t at degree k.
pub fn lambda_factor(t: f64, k: usize, n: usize) -> f64 {
    let half_n = n as f64 / 2.0;
    gamma_ratio(k as f64 + half_n + t, k as f64 + half_n) / gamma(t)
}

/// Fractional derivative Lambda_t: degree-k block scaled by
/// Gamma(k + n/2 + t) / (Gamma(k + n/2) Gamma(t)).
pub fn lambda_t(t: f64, table: &CoeffTable) -> Result<CoeffTable> {
    if !(t > 0.0) {
        return Err(Error::Parameter(format!("order must be positive, got {t}")));
    }
    let mut out = table.clone();
    for (k, row) in out.data.iter_mut().enumerate() {
        let factor = lambda_factor(t, k, table.n);
        for v in row {
            *v *= factor;
        }
    }
    Ok(out)
}

/// The harmonic function g_c associated with a multiplier sequence: the
/// coefficient table is the sequence itself.
pub fn g_of_c(c: &MultiplierSeq) -> CoeffTable {
    c.clone()
}

/// Default radial grid on [0, 1), sine-spaced so points densify near 1.
pub fn default_rho_grid(len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| (PI * i as f64 / (2.0 * len as f64)).sin())
        .collect()
}

/// Location and value of a multiplier sup-functional.
#[derive(Debug, Clone)]
pub struct FunctionalResult {
    pub value: f64,
    pub rho: f64,
    pub y_node: Vec<f64>,
}

/// Unified multiplier functional
/// sup_{rho, y'} (1-rho)^e ( int_S |Lambda_{m+1}(g * P_{x'})(rho y')|^s dx' )^{1/s},
/// where (g * P_{x'}) has coefficients g_k^j Y_j^{(k)}(x'). The four
/// functionals of the multiplier theorems differ only in the exponent e.
pub fn multiplier_functional(
    g: &CoeffTable,
    s: f64,
    m: f64,
    exponent_shift: f64,
    rho_grid: &[f64],
    sphere_spec: &SphereQuadSpec,
) -> Result<FunctionalResult> {
    if rho_grid.is_empty() {
        return Err(Error::Parameter("empty rho grid".into()));
    }
    if !(s >= 1.0) {
        return Err(Error::Parameter(format!("need s >= 1, got {s}")));
    }
    if !(m > -1.0) {
        return Err(Error::Parameter(format!("need m > -1, got {m}")));
    }
    if sphere_spec.n != g.n {
        return Err(Error::ShapeMismatch("sphere rule dimension mismatch".into()));
    }
    let rule = sphere_spec.rule()?;
    let basis = SphericalBasis::new(g.n, g.max_degree())?;
    // flattened basis values and the nonzero coefficient slots
    let mut flat_idx = Vec::new();
    let mut flat_coef = Vec::new();
    let mut lambda_per_slot = Vec::new();
    let mut degree_per_slot = Vec::new();
    {
        let mut pos = 0usize;
        for (k, row) in g.data.iter().enumerate() {
            let lk = lambda_factor(m + 1.0, k, g.n);
            for &c in row.iter() {
                if c != 0.0 {
                    flat_idx.push(pos);
                    flat_coef.push(c);
                    lambda_per_slot.push(lk);
                    degree_per_slot.push(k);
                }
                pos += 1;
            }
        }
    }
    let nodes = &rule.nodes;
    let nn = nodes.len();
    let total_dim: usize = (0..=g.max_degree()).map(|k| harmonic_dim(g.n, k)).sum();
    let mut table = vec![0.0f64; nn * total_dim];
    for (a, node) in nodes.iter().enumerate() {
        let ys = basis.eval_all(&node.point);
        let mut pos = 0usize;
        for row in &ys {
            for &y in row {
                table[a * total_dim + pos] = y;
                pos += 1;
            }
        }
    }
    let nnz = flat_idx.len();
    let mut best = FunctionalResult { value: f64::NEG_INFINITY, rho: 0.0, y_node: vec![] };
    let mut scaled = vec![0.0f64; nnz];
    for &rho in rho_grid {
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::Parameter(format!("rho {rho} outside [0,1)")));
        }
        for t in 0..nnz {
            scaled[t] =
                flat_coef[t] * lambda_per_slot[t] * rho.powi(degree_per_slot[t] as i32);
        }
        let damp = (1.0 - rho).powf(exponent_shift);
        for (b, _) in nodes.iter().enumerate() {
            let row_b = &table[b * total_dim..(b + 1) * total_dim];
            let mut acc = 0.0;
            for (a, node_a) in nodes.iter().enumerate() {
                let row_a = &table[a * total_dim..(a + 1) * total_dim];
                let mut f = 0.0;
                for t in 0..nnz {
                    let d = flat_idx[t];
                    f += scaled[t] * row_a[d] * row_b[d];
                }
                acc += node_a.weight * f.abs().powf(s);
            }
            let norm = acc.powf(1.0 / s);
            let v = damp * norm;
            if v > best.value {
                best = FunctionalResult {
                    value: v,
                    rho,
                    y_node: nodes[b].point.clone(),
                };
            }
        }
    }
    Ok(best)
}

/// Sum over all multi-indices gamma with |gamma| = order of D^gamma p,
/// evaluated at a point. A fixed linear functional of the derivative
/// tensor, so both sides of the identity below stay additive in f.
fn derivative_component_sum(p: &Poly, dims: usize, order: usize, at: &[f64]) -> f64 {
    let mut combos = Vec::new();
    gen_multi_indices(dims, order, &mut vec![0usize; dims], 0, &mut combos);
    let mut acc = 0.0;
    for gamma in combos {
        let mut q = p.clone();
        for (axis, &cnt) in gamma.iter().enumerate() {
            for _ in 0..cnt {
                q = q.derivative(axis);
            }
        }
        acc += q.eval(at);
    }
    acc
}

fn gen_multi_indices(
    dims: usize,
    remaining: usize,
    cur: &mut Vec<usize>,
    axis: usize,
    out: &mut Vec<Vec<usize>>,
) {
    if axis == dims - 1 {
        cur[axis] = remaining;
        out.push(cur.clone());
        cur[axis] = 0;
        return;
    }
    for take in 0..=remaining {
        cur[axis] = take;
        gen_multi_indices(dims, remaining - take, cur, axis + 1, out);
        cur[axis] = 0;
    }
}

/// The per-degree scalar of a table at one degree: the common value of
/// its nonzero entries (0 for an all-zero block).
fn per_degree_scalar(g: &CoeffTable, k: usize) -> Result<f64> {
    let row = &g.data[k];
    let mut scalar = 0.0;
    for &v in row {
        if v != 0.0 {
            if scalar == 0.0 {
                scalar = v;
            } else if (v - scalar).abs() > 1e-14 * scalar.abs() {
                return Err(Error::Unsupported(format!(
                    "degree {k} block is not scalar; the derivative identity needs a \
                     per-degree-scalar multiplier"
                )));
            }
        }
    }
    Ok(scalar)
}

/// Two-route evaluation of the reproducing identity with a multiplier:
/// the derivative sum of h = g * f at r^2 x' against the quadrature of
/// 2 int_0^1 int_S Lambda_{m+1}(g_N * P_xi)(rR x') (sum_gamma D^gamma f)(rR xi)
/// (1-R^2)^m R^{n-1} dxi dR, where g_N shifts g down by `order` degrees
/// and spreads each block scalar across the block (g_0 = g). Returns
/// (direct, integral) for comparison at the caller's tolerance.
pub fn verify_convolution_identity(
    g: &CoeffTable,
    f: &CoeffTable,
    order: usize,
    m: f64,
    r: f64,
    x_prime: &[f64],
    sphere_spec: &SphereQuadSpec,
    radial_points: usize,
) -> Result<(f64, f64)> {
    if order > 2 {
        return Err(Error::Unsupported(format!(
            "derivative order {order} above 2 not supported"
        )));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Parameter(format!("radius {r} outside (0,1)")));
    }
    let n = g.n;
    if f.n != n || sphere_spec.n != n {
        return Err(Error::ShapeMismatch("dimension mismatch".into()));
    }
    let h = convolve(g, f)?;
    let h_poly = h.to_poly()?;
    let at: Vec<f64> = x_prime.iter().map(|v| v * r * r).collect();
    let lhs = derivative_component_sum(&h_poly, n, order, &at);

    // shifted multiplier table
    let kf = f.max_degree();
    let mut g_shift = CoeffTable::zeros(n, kf)?;
    for d in 0..=kf {
        let src = d + order;
        let scalar = if src <= g.max_degree() {
            per_degree_scalar(g, src)?
        } else {
            0.0
        };
        for i in 0..harmonic_dim(n, d) {
            g_shift.data[d][i] = scalar;
        }
    }
    let f_poly = f.to_poly()?;
    let rule = sphere_spec.rule()?;
    let basis = SphericalBasis::new(n, kf)?;
    let ys_x = basis.eval_all(x_prime);
    let radial = crate::quad::rules::gauss_jacobi_unit(radial_points, m)?;
    let mut rhs = 0.0;
    for (bigr, wr) in radial.nodes.iter().zip(&radial.weights) {
        // (1-R^2)^m = (1-R)^m (1+R)^m with the first factor in the rule
        let radial_part = wr * (1.0 + bigr).powf(m) * bigr.powi(n as i32 - 1);
        let rr = r * bigr;
        let mut sphere_acc = 0.0;
        for node in &rule.nodes {
            let ys_xi = basis.eval_all(&node.point);
            // Lambda_{m+1}(g_shift * P_xi)(rR x')
            let mut mult = 0.0;
            let mut rk = 1.0;
            for k in 0..=kf {
                let lk = lambda_factor(m + 1.0, k, n);
                let mut block = 0.0;
                for i in 0..harmonic_dim(n, k) {
                    block += g_shift.data[k][i] * ys_xi[k][i] * ys_x[k][i];
                }
                mult += lk * rk * block;
                rk *= rr;
            }
            let data_pt: Vec<f64> = node.point.iter().map(|v| v * rr).collect();
            let data = derivative_component_sum(&f_poly, n, order, &data_pt);
            sphere_acc += node.weight * mult * data;
        }
        rhs += radial_part * sphere_acc;
    }
    rhs *= 2.0;
    Ok((lhs, rhs))
}
