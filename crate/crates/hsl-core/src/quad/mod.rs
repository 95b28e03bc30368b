//! Weighted numerical integration over truncations of the half-space H
//! and its products, over spheres, and over the unit ball.
//!
//! Half-space integrals use panels aligned with the dyadic Whitney layers
//! in the height direction, so the t^lambda weight is resolved at every
//! scale down to the truncation floor. Horizontal panels tile [-R, R]^n at
//! a fixed per-level resolution (the panel cap per axis); the cap doubles
//! and the Gauss order grows with every refinement level, so refinement
//! never coarsens resolution. Accumulation order is fixed, making results
//! reproducible run to run.

pub mod rules;

use crate::error::{Error, Result};
use crate::halfspace::{HPoint, WeightSpec};
use rules::{gauss_jacobi_unit, gauss_legendre_on, Rule1d, SphereRule};

/// Value plus a Richardson-style error estimate (difference of the last
/// two refinement levels).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
}

/// Truncation and resolution parameters for half-space quadrature.
///
/// Refinement level i (0-based) halves `t_floor`, doubles `x_radius`,
/// `t_ceiling` and the panel cap, and increments the per-axis
/// Gauss-Legendre order.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfspaceQuadSpec {
    pub x_radius: f64,
    pub t_floor: f64,
    pub t_ceiling: f64,
    pub points_per_cell_axis: usize,
    pub refinement_levels: usize,
    /// Per-axis horizontal panel cap at the first level; `None` picks a
    /// dimension-dependent default (64 / 16 / 8 for n = 1 / 2 / 3).
    pub x_panel_cap: Option<usize>,
}

impl Default for HalfspaceQuadSpec {
    fn default() -> Self {
        Self {
            x_radius: 32.0,
            t_floor: (2.0f64).powi(-8),
            t_ceiling: (2.0f64).powi(8),
            points_per_cell_axis: 4,
            refinement_levels: 3,
            x_panel_cap: None,
        }
    }
}

impl HalfspaceQuadSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.x_radius > 0.0) {
            return Err(Error::Parameter("x_radius must be positive".into()));
        }
        if !(self.t_floor > 0.0) || !(self.t_ceiling > self.t_floor) {
            return Err(Error::Parameter(
                "need 0 < t_floor < t_ceiling".into(),
            ));
        }
        if self.points_per_cell_axis < 2 {
            return Err(Error::Parameter("need at least 2 points per cell axis".into()));
        }
        if self.refinement_levels < 1 {
            return Err(Error::Parameter("need at least 1 refinement level".into()));
        }
        Ok(())
    }

    /// A cheap spec for smoke tests and expensive multi-factor integrals.
    pub fn coarse() -> Self {
        Self {
            x_radius: 8.0,
            t_floor: (2.0f64).powi(-5),
            t_ceiling: (2.0f64).powi(5),
            points_per_cell_axis: 3,
            refinement_levels: 2,
            x_panel_cap: Some(16),
        }
    }

    fn cap_for(&self, n: usize) -> usize {
        self.x_panel_cap.unwrap_or(match n {
            1 => 64,
            2 => 16,
            _ => 8,
        })
    }

    fn at_level(&self, n: usize, level: usize) -> LevelSpec {
        let f = (2.0f64).powi(level as i32);
        LevelSpec {
            x_radius: self.x_radius * f,
            t_floor: self.t_floor / f,
            t_ceiling: self.t_ceiling * f,
            order: self.points_per_cell_axis + level,
            cap: self.cap_for(n) << level,
        }
    }
}

struct LevelSpec {
    x_radius: f64,
    t_floor: f64,
    t_ceiling: f64,
    order: usize,
    cap: usize,
}

const MAX_NODES_PER_LEVEL: usize = 40_000_000;

/// Generates the weighted node list for one truncated half-space rule.
/// Node weights already include the measure weight t^lambda.
fn halfspace_nodes(n: usize, lambda: f64, level: &LevelSpec) -> Result<Vec<(HPoint, f64)>> {
    if n == 0 || n > 3 {
        return Err(Error::Domain(format!("dimension {n} not supported")));
    }
    let k_min = -(level.t_ceiling.log2().floor() as i32) - 1;
    let k_max = -(level.t_floor.log2().floor() as i32) + 1;
    let t_rule_cache = gauss_legendre_on(level.order, 0.0, 1.0); // reference, rescaled per layer
    let mut nodes = Vec::new();
    for k in k_min..=k_max {
        let side = (2.0f64).powi(-k);
        let t_lo = side.max(level.t_floor);
        let t_hi = (2.0 * side).min(level.t_ceiling);
        if t_lo >= t_hi {
            continue;
        }
        // t nodes on the clipped layer
        let t_nodes: Vec<(f64, f64)> = t_rule_cache
            .nodes
            .iter()
            .zip(&t_rule_cache.weights)
            .map(|(x, w)| (t_lo + (t_hi - t_lo) * x, w * (t_hi - t_lo)))
            .collect();
        // horizontal panels: fixed per-level resolution 2R/cap; fine
        // Whitney cells aggregate into panels once their side drops
        // below the panel width, coarse cells are subdivided
        let panels = level.cap.max(1);
        let panel_w = 2.0 * level.x_radius / panels as f64;
        if panels.pow(n as u32) * level.order.pow(n as u32 + 1) > MAX_NODES_PER_LEVEL {
            return Err(Error::Capacity(format!(
                "quadrature request too large at layer {k}: {panels} panels per axis"
            )));
        }
        let x_rules: Vec<Rule1d> = (0..panels)
            .map(|p| {
                let a = -level.x_radius + p as f64 * panel_w;
                gauss_legendre_on(level.order, a, a + panel_w)
            })
            .collect();
        // tensor over n horizontal axes and the t axis, fixed order
        let mut panel_idx = vec![0usize; n];
        loop {
            let mut axis_nodes: Vec<&Rule1d> = Vec::with_capacity(n);
            for &pi in panel_idx.iter() {
                axis_nodes.push(&x_rules[pi]);
            }
            let mut node_idx = vec![0usize; n];
            loop {
                let mut x = [0.0f64; 3];
                let mut wx = 1.0;
                for a in 0..n {
                    x[a] = axis_nodes[a].nodes[node_idx[a]];
                    wx *= axis_nodes[a].weights[node_idx[a]];
                }
                for (t, wt) in &t_nodes {
                    let p = HPoint::new(&x[..n], *t).expect("node inside half-space");
                    nodes.push((p, wx * wt * t.powf(lambda)));
                }
                // increment node_idx
                let mut a = n;
                let mut done = true;
                while a > 0 {
                    a -= 1;
                    node_idx[a] += 1;
                    if node_idx[a] < axis_nodes[a].nodes.len() {
                        done = false;
                        break;
                    }
                    node_idx[a] = 0;
                }
                if done {
                    break;
                }
            }
            // increment panel_idx
            let mut a = n;
            let mut done = true;
            while a > 0 {
                a -= 1;
                panel_idx[a] += 1;
                if panel_idx[a] < panels {
                    done = false;
                    break;
                }
                panel_idx[a] = 0;
            }
            if done {
                break;
            }
        }
    }
    Ok(nodes)
}

fn eval_at_nodes<F: Fn(&HPoint) -> f64>(f: &F, nodes: &[(HPoint, f64)]) -> Result<f64> {
    let mut acc = 0.0;
    for (p, w) in nodes {
        let v = f(p);
        if !v.is_finite() {
            let mut coords = p.x().to_vec();
            coords.push(p.t());
            return Err(Error::Evaluation { value: v, node: coords });
        }
        acc += w * v;
    }
    Ok(acc)
}

fn divergence_check(values: &[f64]) -> Result<()> {
    if values.len() >= 2 {
        let grows = values
            .windows(2)
            .all(|w| w[1].abs() > 2.0 * w[0].abs() && w[1].abs() > 1e-8);
        if grows {
            return Err(Error::Divergence { values: values.to_vec() });
        }
    }
    Ok(())
}

/// Integral of f against dm_lambda over the truncated half-space, with a
/// refinement-difference error estimate. Unbounded growth across levels
/// (factor above 2 at every step) is reported as divergence, never as a
/// plain number.
pub fn integrate_halfspace<F: Fn(&HPoint) -> f64>(
    f: F,
    n: usize,
    w: &WeightSpec,
    spec: &HalfspaceQuadSpec,
) -> Result<QuadResult> {
    spec.validate()?;
    let mut values = Vec::with_capacity(spec.refinement_levels);
    for level in 0..spec.refinement_levels {
        let nodes = halfspace_nodes(n, w.lambda, &spec.at_level(n, level))?;
        values.push(eval_at_nodes(&f, &nodes)?);
    }
    divergence_check(&values)?;
    let value = *values.last().unwrap();
    let error_estimate = if values.len() >= 2 {
        (values[values.len() - 1] - values[values.len() - 2]).abs()
    } else {
        0.0
    };
    Ok(QuadResult { value, error_estimate })
}

const MAX_PRODUCT_EVALS: usize = 400_000_000;

/// Iterated integral over H^m against the product measure
/// dm_{alpha_1} x ... x dm_{alpha_m}. All factors share the truncation
/// spec; refinement applies to every factor jointly and the error
/// estimate is the difference of the last two joint levels.
pub fn integrate_product_halfspace<F: Fn(&[HPoint]) -> f64>(
    f: F,
    n: usize,
    weights: &[WeightSpec],
    spec: &HalfspaceQuadSpec,
) -> Result<QuadResult> {
    spec.validate()?;
    let m = weights.len();
    if m == 0 || m > 3 {
        return Err(Error::Capacity(format!(
            "product integrals support 1..=3 factors, got {m}"
        )));
    }
    let mut values = Vec::with_capacity(spec.refinement_levels);
    for level in 0..spec.refinement_levels {
        let lv = spec.at_level(n, level);
        let factor_nodes: Vec<Vec<(HPoint, f64)>> = weights
            .iter()
            .map(|w| {
                halfspace_nodes(
                    n,
                    w.lambda,
                    &LevelSpec {
                        x_radius: lv.x_radius,
                        t_floor: lv.t_floor,
                        t_ceiling: lv.t_ceiling,
                        order: lv.order,
                        cap: lv.cap,
                    },
                )
            })
            .collect::<Result<_>>()?;
        let total: usize = factor_nodes.iter().map(|v| v.len()).product();
        if total > MAX_PRODUCT_EVALS {
            return Err(Error::Capacity(format!(
                "product quadrature would need {total} evaluations; coarsen the spec"
            )));
        }
        let mut acc = 0.0;
        let mut pts = vec![factor_nodes[0][0].0; m];
        let mut idx = vec![0usize; m];
        'sum: loop {
            let mut w = 1.0;
            for j in 0..m {
                let (p, wj) = factor_nodes[j][idx[j]];
                pts[j] = p;
                w *= wj;
            }
            let v = f(&pts);
            if !v.is_finite() {
                let mut coords = Vec::new();
                for p in &pts {
                    coords.extend_from_slice(p.x());
                    coords.push(p.t());
                }
                return Err(Error::Evaluation { value: v, node: coords });
            }
            acc += w * v;
            let mut j = m;
            loop {
                if j == 0 {
                    break 'sum;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < factor_nodes[j].len() {
                    break;
                }
                idx[j] = 0;
            }
        }
        values.push(acc);
    }
    divergence_check(&values)?;
    let value = *values.last().unwrap();
    let error_estimate = if values.len() >= 2 {
        (values[values.len() - 1] - values[values.len() - 2]).abs()
    } else {
        0.0
    };
    Ok(QuadResult { value, error_estimate })
}

/// Sphere rule parameters; `polar` is ignored for n = 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SphereQuadSpec {
    pub n: usize,
    pub azimuthal: usize,
    pub polar: usize,
}

impl SphereQuadSpec {
    pub fn new(n: usize, azimuthal: usize, polar: usize) -> Self {
        Self { n, azimuthal, polar }
    }

    pub fn rule(&self) -> Result<SphereRule> {
        SphereRule::new(self.n, self.azimuthal, self.polar)
    }
}

impl Default for SphereQuadSpec {
    fn default() -> Self {
        Self { n: 3, azimuthal: 24, polar: 12 }
    }
}

/// Surface integral over S^{n-1} against the unnormalized measure.
pub fn integrate_sphere<G: Fn(&[f64]) -> f64>(g: G, spec: &SphereQuadSpec) -> Result<f64> {
    let rule = spec.rule()?;
    let mut acc = 0.0;
    for node in &rule.nodes {
        let v = g(&node.point);
        if !v.is_finite() {
            return Err(Error::Evaluation { value: v, node: node.point.clone() });
        }
        acc += node.weight * v;
    }
    Ok(acc)
}

/// Integral over the unit ball of g(x) (1-r)^gamma r^{n-1} dr dx' with
/// Gauss-Jacobi radial nodes absorbing the (1-r)^gamma endpoint weight.
pub fn integrate_ball<G: Fn(&[f64]) -> f64>(
    g: G,
    radial_points: usize,
    sphere_spec: &SphereQuadSpec,
    radial_weight_exponent: f64,
) -> Result<f64> {
    if !(radial_weight_exponent > -1.0) {
        return Err(Error::Divergence {
            values: vec![radial_weight_exponent],
        });
    }
    let n = sphere_spec.n;
    let radial = gauss_jacobi_unit(radial_points, radial_weight_exponent)?;
    let rule = sphere_spec.rule()?;
    let mut acc = 0.0;
    for (r, wr) in radial.nodes.iter().zip(&radial.weights) {
        let shell = wr * r.powi(n as i32 - 1);
        for node in &rule.nodes {
            let x: Vec<f64> = node.point.iter().map(|c| c * r).collect();
            let v = g(&x);
            if !v.is_finite() {
                return Err(Error::Evaluation { value: v, node: x });
            }
            acc += shell * node.weight * v;
        }
    }
    Ok(acc)
}
