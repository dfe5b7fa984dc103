//! Gauss–Legendre rules: node generation, adaptive bisection and fixed
//! composite rules used for L² inner products.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Relative tolerance of [`integrate_adaptive`] when called through curve integration.
pub const DEFAULT_REL_TOL: f64 = 1e-12;
/// Maximum bisection depth of the adaptive rule.
pub const DEFAULT_MAX_DEPTH: u32 = 40;

const ADAPTIVE_ORDER: usize = 15;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1].
///
/// Roots of P_n are found by Newton iteration from the Chebyshev-like initial
/// guess; weights follow from P_n'.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn adaptive_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(ADAPTIVE_ORDER))
}

fn apply_rule<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (nodes, weights) = adaptive_rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for (t, w) in nodes.iter().zip(weights) {
        let v = f(mid + half * t)?;
        sum += w * v;
        abs_sum += w * v.abs();
    }
    Ok((sum * half, abs_sum * half.abs()))
}

/// Adaptive Gauss–Legendre quadrature of `f` over [a, b].
///
/// Each panel is accepted when the single-panel estimate and the sum over its
/// two halves agree to `rel_tol`, measured against the larger of the panel
/// value and the panel's share of the global ∫|f|.
pub fn integrate_adaptive<F>(mut f: F, a: f64, b: f64, rel_tol: f64, max_depth: u32) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let (whole, abs_whole) = apply_rule(&mut f, a, b)?;
    let scale = abs_whole.max(f64::MIN_POSITIVE);
    let total = b - a;
    let mut worst = 0.0_f64;
    let mut ok = true;
    let value = refine(
        &mut f,
        a,
        b,
        whole,
        0,
        &Ctx {
            rel_tol,
            max_depth,
            scale,
            total,
        },
        &mut ok,
        &mut worst,
    )?;
    if ok {
        Ok(value)
    } else {
        Err(Error::Quadrature {
            a,
            b,
            estimate: value,
            error: worst,
        })
    }
}

struct Ctx {
    rel_tol: f64,
    max_depth: u32,
    scale: f64,
    total: f64,
}

#[allow(clippy::too_many_arguments)]
fn refine<F>(
    f: &mut F,
    a: f64,
    b: f64,
    whole: f64,
    depth: u32,
    ctx: &Ctx,
    ok: &mut bool,
    worst: &mut f64,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mid = 0.5 * (a + b);
    let (left, _) = apply_rule(f, a, mid)?;
    let (right, _) = apply_rule(f, mid, b)?;
    let split = left + right;
    let err = (split - whole).abs();
    let share = ctx.scale * ((b - a) / ctx.total).abs();
    let tol = ctx.rel_tol * split.abs().max(share);
    if err <= tol || err <= f64::EPSILON * ctx.scale {
        return Ok(split);
    }
    if depth >= ctx.max_depth || mid == a || mid == b {
        *ok = false;
        *worst = worst.max(err);
        return Ok(split);
    }
    let l = refine(f, a, mid, left, depth + 1, ctx, ok, worst)?;
    let r = refine(f, mid, b, right, depth + 1, ctx, ok, worst)?;
    Ok(l + r)
}

/// Fixed composite Gauss–Legendre rule on [a, b]: `panels` equal panels with
/// `order` nodes each.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let (t, w) = gauss_legendre(order);
        let width = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let lo = a + width * p as f64;
            let mid = lo + 0.5 * width;
            for (ti, wi) in t.iter().zip(&w) {
                nodes.push(mid + 0.5 * width * ti);
                weights.push(0.5 * width * wi);
            }
        }
        CompositeRule { nodes, weights }
    }

    /// The 256-node rule (32 panels of 8 nodes) used for Gram matrices.
    pub fn gram(a: f64, b: f64) -> Self {
        Self::new(a, b, 32, 8)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Σ wᵢ vᵢ for values sampled at the rule's nodes.
    pub fn apply(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}
