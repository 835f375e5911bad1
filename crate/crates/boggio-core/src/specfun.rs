//! Real-argument special functions and normalization constants.
//!
//! Everything downstream (kernel, fractional Laplacian, solver) consumes the
//! gamma function, Pochhammer symbols and the two ₂F₁ regimes implemented here:
//! terminating series and the Gauss summation at z = 1, plus plain |z| < 1
//! summation for cross-checks.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Largest argument for which Γ(x) fits in an f64.
const GAMMA_OVERFLOW: f64 = 171.61;

/// Gamma value with an optional log-scale escape hatch for magnitudes that
/// overflow a plain f64.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaValue {
    pub value: f64,
    /// `Some(ln |Γ(x)|)` when `value` overflowed to infinity.
    pub log_scale: Option<f64>,
}

/// Fractional order s > 0 with its decomposition s = m + σ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder {
    pub s: f64,
    pub m: u32,
    pub sigma: f64,
    pub integer_flag: bool,
}

impl FracOrder {
    pub fn new(s: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::Domain(format!("order s must be positive, got {s}")));
        }
        let m = s.floor();
        let sigma = s - m;
        Ok(FracOrder {
            s,
            m: m as u32,
            sigma,
            integer_flag: sigma == 0.0,
        })
    }
}

// Lanczos coefficients, g = 7, 9 terms (GSL set).
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

fn lanczos_sum(x: f64) -> f64 {
    // x is the shifted argument (original minus one).
    let mut t = LANCZOS_P[0];
    for (i, p) in LANCZOS_P.iter().enumerate().skip(1) {
        t += p / (x + i as f64);
    }
    t
}

/// ln |Γ(x)| together with the sign of Γ(x), for any non-pole real x.
pub fn ln_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if x <= 0.0 && x == x.floor() {
        return Err(Error::Pole(x));
    }
    if x < 0.5 {
        // Reflection: Γ(x) Γ(1-x) = π / sin(πx).
        let (lg, sign) = ln_gamma_signed(1.0 - x)?;
        let s = (PI * x).sin();
        // sin(πx) carries the sign pattern of Γ on the negative axis.
        return Ok(((PI / s.abs()).ln() - lg, sign * s.signum()));
    }
    let z = x - 1.0;
    let w = z + LANCZOS_G + 0.5;
    let lg = 0.5 * (2.0 * PI).ln() + (z + 0.5) * w.ln() - w + lanczos_sum(z).ln();
    Ok((lg, 1.0))
}

/// Γ(x) for real x away from non-positive integers.
pub fn gamma(x: f64) -> Result<GammaValue> {
    let (lg, sign) = ln_gamma_signed(x)?;
    if x > GAMMA_OVERFLOW {
        return Ok(GammaValue {
            value: f64::INFINITY,
            log_scale: Some(lg),
        });
    }
    Ok(GammaValue {
        value: sign * lg.exp(),
        log_scale: None,
    })
}

/// Plain Γ(x) as f64; panics on poles. Internal convenience for arguments
/// known positive.
pub(crate) fn gamma_pos(x: f64) -> f64 {
    gamma(x).expect("gamma pole").value
}

/// Pochhammer symbol (a)_k by forward recurrence.
pub fn pochhammer(a: f64, k: u32) -> f64 {
    let mut p = 1.0;
    for j in 0..k {
        p *= a + j as f64;
    }
    p
}

/// ln |(a)_k| with sign, for products too long for f64.
pub fn ln_pochhammer_signed(a: f64, k: u32) -> (f64, f64) {
    let mut lg = 0.0;
    let mut sign = 1.0;
    for j in 0..k {
        let f = a + j as f64;
        if f == 0.0 {
            return (f64::NEG_INFINITY, 0.0);
        }
        lg += f.abs().ln();
        sign *= f.signum();
    }
    (lg, sign)
}

/// Euler Beta function B(p,q) = Γ(p)Γ(q)/Γ(p+q), computed in log space.
pub fn beta(p: f64, q: f64) -> Result<f64> {
    let (lp, sp) = ln_gamma_signed(p)?;
    let (lq, sq) = ln_gamma_signed(q)?;
    let (lpq, spq) = ln_gamma_signed(p + q)?;
    Ok(sp * sq * spq * (lp + lq - lpq).exp())
}

/// Terminating ₂F₁(a, -N; c; z): the exact finite sum of N+1 terms.
pub fn hyp2f1_terminating(a: f64, neg_b: u32, c: f64, z: f64) -> Result<f64> {
    let n = neg_b;
    let mut sum = 1.0;
    let mut term = 1.0;
    for j in 0..n {
        let cj = c + j as f64;
        if cj == 0.0 {
            return Err(Error::Domain(format!(
                "2F1 parameter c = {c} hits a pole at term {j} before the series terminates"
            )));
        }
        let b = -(n as f64);
        term *= (a + j as f64) * (b + j as f64) / (cj * (j as f64 + 1.0)) * z;
        sum += term;
    }
    Ok(sum)
}

/// ₂F₁(a, b; c; z) for |z| < 1 by direct summation.
pub fn hyp2f1_series(a: f64, b: f64, c: f64, z: f64, tol: f64) -> Result<f64> {
    if z.abs() >= 1.0 {
        return Err(Error::Domain(format!("|z| = {} not inside (0,1)", z.abs())));
    }
    let mut sum = 1.0;
    let mut term = 1.0;
    let max_terms = 100_000usize;
    for j in 0..max_terms {
        let jf = j as f64;
        let cj = c + jf;
        if cj == 0.0 {
            return Err(Error::Domain(format!("2F1 parameter c = {c} is a non-positive integer")));
        }
        term *= (a + jf) * (b + jf) / (cj * (jf + 1.0)) * z;
        sum += term;
        if term.abs() <= tol * sum.abs().max(1.0) && j > 2 {
            return Ok(sum);
        }
    }
    Err(Error::SlowConvergence {
        tail_bound: term.abs(),
        tol,
        terms: max_terms,
    })
}

/// ₂F₁(a, b; c; 1) by Gauss's summation theorem, valid for c - a - b > 0.
pub fn hyp2f1_at_one(a: f64, b: f64, c: f64) -> Result<f64> {
    let d = c - a - b;
    if d <= 0.0 {
        return Err(Error::Divergence(d));
    }
    let (lc, sc) = ln_gamma_signed(c)?;
    let (ld, sd) = ln_gamma_signed(d)?;
    let (lca, sca) = ln_gamma_signed(c - a)?;
    let (lcb, scb) = ln_gamma_signed(c - b)?;
    Ok(sc * sd * sca * scb * (lc + ld - lca - lcb).exp())
}

/// Volume e_n of the n-dimensional unit ball.
pub fn ball_volume_constant(n: u32) -> f64 {
    PI.powf(n as f64 / 2.0) / gamma_pos(1.0 + n as f64 / 2.0)
}

/// Surface area n·e_n of the unit sphere S^{n-1}.
pub fn sphere_area_constant(n: u32) -> f64 {
    n as f64 * ball_volume_constant(n)
}

/// Boggio normalization k_{s,n} = 1/(n e_n 4^{s-1} Γ(s)²), in log space.
pub fn boggio_constant(order: FracOrder, n: u32) -> f64 {
    let s = order.s;
    let (lg, _) = ln_gamma_signed(s).expect("s > 0");
    let ln_k = -(sphere_area_constant(n).ln() + (s - 1.0) * 4f64.ln() + 2.0 * lg);
    ln_k.exp()
}

/// Fractional Laplacian normalization C(n,σ) = 4^σ Γ(n/2+σ) / (-Γ(-σ) π^{n/2}).
pub fn fraclap_constant(n: u32, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::Domain(format!("sigma = {sigma} outside (0,1)")));
    }
    let nh = n as f64 / 2.0;
    let (lg_top, _) = ln_gamma_signed(nh + sigma)?;
    let (lg_neg, sg_neg) = ln_gamma_signed(-sigma)?;
    debug_assert!(sg_neg < 0.0); // Γ(-σ) < 0 on σ ∈ (0,1)
    let ln_c = sigma * 4f64.ln() + lg_top - lg_neg - nh * PI.ln();
    Ok(ln_c.exp())
}
