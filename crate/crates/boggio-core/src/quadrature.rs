//! Deterministic adaptive quadrature.
//!
//! 1-D integration uses a nested Gauss–Kronrod 7/15 pair with bisection of the
//! worst interval; a known power-law endpoint singularity (t-a)^β is removed
//! exactly by the substitution t = a + w^{1/(β+1)}, which turns (t-a)^β dt
//! into dw/(β+1). Ball integration decomposes into spherical directions times
//! adaptive radial lines, with the polar weight absorbing a movable point
//! singularity.

use crate::error::{Error, Result};
use crate::exec;
use std::collections::BinaryHeap;

/// Tolerances, budgets and singularity-handling parameters.
#[derive(Debug, Clone)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Power β of a (t-a)^β endpoint singularity at the lower limit, β > -1.
    pub singularity_exponent: Option<f64>,
    /// Radius of the symmetrized inner ball for principal-value integrals.
    pub pv_inner_radius: Option<f64>,
}

impl QuadratureSpec {
    pub fn with_tols(rel_tol: f64, abs_tol: f64) -> Self {
        QuadratureSpec {
            rel_tol,
            abs_tol,
            max_subdivisions: 400,
            singularity_exponent: None,
            pv_inner_radius: None,
        }
    }

    pub fn singular(mut self, beta: f64) -> Self {
        self.singularity_exponent = Some(beta);
        self
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec::with_tols(1e-11, 1e-13)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions_used: usize,
    pub converged: bool,
}

impl IntegralResult {
    pub fn into_result(self) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::NonConvergence {
                value: self.value,
                error_estimate: self.error_estimate,
            })
        }
    }
}

// Gauss-Kronrod 7/15 nodes and weights (QUADPACK values).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_3,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_69,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// One Gauss-Kronrod evaluation on [a, b]: (kronrod, error_estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut fv = [0.0f64; 15];
    for (i, &x) in XGK.iter().enumerate().take(7) {
        fv[i] = f(c - h * x);
        fv[14 - i] = f(c + h * x);
    }
    fv[7] = f(c);

    let mut kronrod = WGK[7] * fv[7];
    let mut gauss = WG[3] * fv[7];
    let mut res_abs = WGK[7] * fv[7].abs();
    for i in 0..7 {
        let pair = fv[i] + fv[14 - i];
        kronrod += WGK[i] * pair;
        res_abs += WGK[i] * (fv[i].abs() + fv[14 - i].abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    let mean = kronrod * 0.5;
    let mut res_asc = WGK[7] * (fv[7] - mean).abs();
    for i in 0..7 {
        res_asc += WGK[i] * ((fv[i] - mean).abs() + (fv[14 - i] - mean).abs());
    }
    res_asc *= h.abs();
    res_abs *= h.abs();

    let raw = ((kronrod - gauss) * h).abs();
    let mut err = raw;
    if res_asc != 0.0 && raw != 0.0 {
        let scale = (200.0 * raw / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    if floor > err {
        err = floor;
    }
    (kronrod * h, err)
}

#[derive(PartialEq)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl Eq for Segment {}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(std::cmp::Ordering::Equal)
    }
}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> IntegralResult {
    let (v, e) = gk15(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v, err: e });
    let mut subdivisions = 0usize;
    let mut total_v = v;
    let mut total_e = e;
    while total_e > spec.abs_tol.max(spec.rel_tol * total_v.abs())
        && subdivisions < spec.max_subdivisions
    {
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at floating-point resolution; put it back and stop.
            heap.push(worst);
            break;
        }
        let (vl, el) = gk15(f, worst.a, mid);
        let (vr, er) = gk15(f, mid, worst.b);
        heap.push(Segment { a: worst.a, b: mid, value: vl, err: el });
        heap.push(Segment { a: mid, b: worst.b, value: vr, err: er });
        subdivisions += 1;
        // Recompute the totals in interval order: deterministic and avoids
        // drift from incremental updates.
        let mut segs: Vec<&Segment> = heap.iter().collect();
        segs.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap());
        total_v = segs.iter().map(|s| s.value).sum();
        total_e = segs.iter().map(|s| s.err).sum();
    }
    IntegralResult {
        value: total_v,
        error_estimate: total_e,
        subdivisions_used: subdivisions,
        converged: total_e <= spec.abs_tol.max(spec.rel_tol * total_v.abs()),
    }
}

/// Adaptive integral of `f` over (a, b).
///
/// When `spec.singularity_exponent` is β, `f(t)·(t-a)^{-β}` must extend
/// continuously to `a`; the power is then removed by exact substitution.
pub fn integrate_1d<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> IntegralResult {
    assert!(a < b, "integrate_1d requires a < b");
    match spec.singularity_exponent {
        Some(beta) if beta != 0.0 => {
            assert!(beta > -1.0, "singularity exponent must be > -1");
            let p = 1.0 / (beta + 1.0);
            let w_end = (b - a).powf(beta + 1.0);
            let g = |w: f64| {
                if w <= 0.0 {
                    return 0.0;
                }
                let t = a + w.powf(p);
                f(t) * p * w.powf(p - 1.0)
            };
            adaptive(&g, 0.0, w_end, spec)
        }
        _ => adaptive(&f, a, b, spec),
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Quadrature rule on the unit sphere S^{n-1}: points with weights summing to
/// the sphere area n·e_n.
///
/// n = 1 is the two-point set {±1}; n = 2 a trapezoidal rule in angle
/// (spectrally accurate for smooth integrands); n ≥ 3 a Gauss-Legendre rule
/// in the polar angle times a recursive rule on S^{n-2}. With resolution L
/// the polar factor is exact for polynomial integrands of degree ≲ 2L-2.
pub fn sphere_rule(n: u32, resolution: usize) -> Vec<(Vec<f64>, f64)> {
    match n {
        0 => panic!("dimension must be >= 1"),
        1 => vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)],
        2 => {
            let m = 4 * resolution.max(1);
            let w = 2.0 * std::f64::consts::PI / m as f64;
            (0..m)
                .map(|i| {
                    let th = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / m as f64;
                    (vec![th.cos(), th.sin()], w)
                })
                .collect()
        }
        _ => {
            let l = (2 * resolution).max(4);
            let (xs, ws) = gauss_legendre(l);
            let sub = sphere_rule(n - 1, resolution);
            let half_pi = std::f64::consts::PI / 2.0;
            let mut pts = Vec::with_capacity(l * sub.len());
            for (x, w) in xs.iter().zip(ws.iter()) {
                // θ ∈ [0, π], weight sin^{n-2}θ dθ.
                let theta = half_pi * (x + 1.0);
                let wt = w * half_pi * theta.sin().powi(n as i32 - 2);
                for (omega, ws2) in &sub {
                    let mut p = Vec::with_capacity(n as usize);
                    p.push(theta.cos());
                    p.extend(omega.iter().map(|c| theta.sin() * c));
                    pts.push((p, wt * ws2));
                }
            }
            pts
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Integral of `g` over the unit ball of ℝⁿ.
///
/// With `singular_at = Some(x)`, spherical shells are centered at x and the
/// |y-x|^α behavior declared by `singular_order` is absorbed into the radial
/// weight. The angular resolution is doubled until two successive estimates
/// agree within tolerance.
pub fn integrate_ball<G>(
    g: G,
    n: u32,
    spec: &QuadratureSpec,
    singular_at: Option<&[f64]>,
    singular_order: Option<f64>,
) -> IntegralResult
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    let center: Vec<f64> = singular_at
        .map(|c| c.to_vec())
        .unwrap_or_else(|| vec![0.0; n as usize]);
    let c_norm2 = dot(&center, &center);
    assert!(c_norm2 < 1.0, "singular point must lie inside the ball");
    let alpha = singular_order.unwrap_or(0.0);
    assert!(alpha > -(n as f64), "singular order must exceed -n");
    let beta = alpha + n as f64 - 1.0;
    let mut radial_spec = spec.clone();
    // Only a genuinely non-smooth radial weight needs the substitution.
    radial_spec.singularity_exponent = if beta < 0.0 || beta.fract() != 0.0 {
        Some(beta)
    } else {
        None
    };

    let base_res = match n {
        1 => 1,
        2 => 4,
        3 => 4,
        _ => 3,
    };

    let eval = |res: usize| -> (f64, f64, usize) {
        let rule = sphere_rule(n, res);
        // Per-direction budget: the weighted radial errors add up across the
        // whole rule, so each direction gets its share of the absolute target.
        let mut dir_spec = radial_spec.clone();
        dir_spec.abs_tol = radial_spec.abs_tol / rule.len() as f64;
        let radial_spec = dir_spec;
        let parts = exec::map_indexed(rule.len(), |i| {
            let (omega, w) = &rule[i];
            let b_dot = dot(&center, omega);
            let rho_max = -b_dot + (b_dot * b_dot + 1.0 - c_norm2).sqrt();
            let radial = |rho: f64| {
                let y: Vec<f64> = center
                    .iter()
                    .zip(omega.iter())
                    .map(|(c, o)| c + rho * o)
                    .collect();
                rho.powi(n as i32 - 1) * g(&y)
            };
            let r = integrate_1d(radial, 0.0, rho_max, &radial_spec);
            (w * r.value, w.abs() * r.error_estimate, r.subdivisions_used)
        });
        let value = parts.iter().map(|p| p.0).sum();
        let err = parts.iter().map(|p| p.1).sum();
        let sub = parts.iter().map(|p| p.2).sum();
        (value, err, sub)
    };

    let (mut prev, mut radial_err, mut subs) = eval(base_res);
    let mut res = base_res;
    for _ in 0..5 {
        res *= 2;
        let (cur, rerr, sub) = eval(res);
        let ang_err = (cur - prev).abs();
        let tol = spec.abs_tol.max(spec.rel_tol * cur.abs());
        subs += sub;
        if ang_err + rerr <= tol || n == 1 {
            return IntegralResult {
                value: cur,
                error_estimate: ang_err + rerr,
                subdivisions_used: subs,
                converged: ang_err + rerr <= tol,
            };
        }
        prev = cur;
        radial_err = rerr;
    }
    let tol = spec.abs_tol.max(spec.rel_tol * prev.abs());
    IntegralResult {
        value: prev,
        error_estimate: radial_err,
        subdivisions_used: subs,
        converged: radial_err <= tol,
    }
}
