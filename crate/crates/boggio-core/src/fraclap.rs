//! Fractional and integer Laplacians of radial profiles.
//!
//! Three routes are implemented and cross-validated:
//! closed-form fractional derivatives of (1-r²)^{σ+K}_+ powers (a degree-K
//! polynomial in r², read termwise from the series expansion of the Green
//! profile), the auxiliary series G♯_s with its decomposition into a low
//! order polynomial plus a multiple of the integer-order profile, and the
//! pointwise principal-value evaluator of (-Δ)^σ.

use crate::error::{Error, Result};
use crate::exec;
use crate::kernel::green_tilde;
use crate::quadrature::{integrate_1d, sphere_rule, QuadratureSpec};
use crate::specfun::{
    fraclap_constant, hyp2f1_terminating, ln_gamma_signed, sphere_area_constant, FracOrder,
};

/// Even radial polynomial Σ_j c_j r^{2j} living in dimension n.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPolynomial {
    pub n: u32,
    /// Coefficient of r^{2j} at index j.
    pub coeffs: Vec<f64>,
}

impl RadialPolynomial {
    pub fn new(n: u32, coeffs: Vec<f64>) -> Self {
        RadialPolynomial { n, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    pub fn eval(&self, r: f64) -> f64 {
        let r2 = r * r;
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * r2 + c)
    }

    /// One application of -Δ using Δ r^{2j} = 2j(2j+n-2) r^{2j-2}.
    pub fn neg_laplacian(&self) -> RadialPolynomial {
        let nf = self.n as f64;
        let mut out = vec![0.0; self.coeffs.len().saturating_sub(1).max(1)];
        for (j, &c) in self.coeffs.iter().enumerate().skip(1) {
            let jf = j as f64;
            out[j - 1] -= c * 2.0 * jf * (2.0 * jf + nf - 2.0);
        }
        RadialPolynomial { n: self.n, coeffs: out }
    }
}

/// (-Δ)^m p, exactly.
pub fn radial_poly_laplacian(p: &RadialPolynomial, m: u32) -> RadialPolynomial {
    let mut q = p.clone();
    for _ in 0..m {
        q = q.neg_laplacian();
    }
    q
}

fn ln_gamma(x: f64) -> f64 {
    ln_gamma_signed(x).expect("positive argument").0
}

/// Closed form (-Δ)^σ (1-|·|²)^{σ+K}_+ inside the ball, as the polynomial
/// 4^σ Γ(n/2+σ) Γ(K+σ+1) / (Γ(n/2) K!) · ₂F₁(n/2+σ, -K; n/2; r²).
pub fn dyda_power_fraclap(k_power: u32, sigma: f64, n: u32, r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!(
            "dyda formula is interior-only, r = {r}"
        )));
    }
    Ok(dyda_power_poly(k_power, sigma, n)?.eval(r))
}

/// Same closed form with the polynomial coefficients made explicit.
pub fn dyda_power_poly(k_power: u32, sigma: f64, n: u32) -> Result<RadialPolynomial> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::Domain(format!("sigma = {sigma} outside (0,1)")));
    }
    let nh = n as f64 / 2.0;
    let kf = k_power as f64;
    let pref = (sigma * 4f64.ln() + ln_gamma(nh + sigma) + ln_gamma(kf + sigma + 1.0)
        - ln_gamma(nh)
        - ln_gamma(kf + 1.0))
    .exp();
    let a = nh + sigma;
    let mut coeffs = Vec::with_capacity(k_power as usize + 1);
    let mut t = pref;
    for j in 0..=k_power {
        coeffs.push(t);
        let jf = j as f64;
        t *= (a + jf) * (-(kf) + jf) / ((nh + jf) * (jf + 1.0));
    }
    Ok(RadialPolynomial { n, coeffs })
}

/// (-Δ)^s (1-|·|²)^{s+K}_+ restricted to the ball: an even polynomial of
/// degree K in r². Integer s goes through the classical pointwise Laplacian
/// of the binomially expanded power; fractional s through the closed-form
/// (-Δ)^σ factor followed by (-Δ)^m.
pub fn fraclap_s_on_power(k_power: u32, order: FracOrder, n: u32) -> Result<RadialPolynomial> {
    if order.integer_flag {
        let p_total = order.m + k_power;
        let mut coeffs = vec![0.0; p_total as usize + 1];
        let mut binom = 1.0;
        for j in 0..=p_total {
            coeffs[j as usize] = binom * if j % 2 == 0 { 1.0 } else { -1.0 };
            binom *= (p_total - j) as f64 / (j as f64 + 1.0);
        }
        Ok(radial_poly_laplacian(
            &RadialPolynomial { n, coeffs },
            order.m,
        ))
    } else {
        let frac = dyda_power_poly(k_power + order.m, order.sigma, n)?;
        Ok(radial_poly_laplacian(&frac, order.m))
    }
}

/// Euler-Maclaurin estimate of Σ_{k>K} k^{-p}.
fn em_tail(k: f64, p: f64) -> f64 {
    k.powf(1.0 - p) / (p - 1.0) - 0.5 * k.powf(-p) + p * k.powf(-p - 1.0) / 12.0
    // next correction is O(K^{-p-3})
}

/// Term k of the G♯ series: (n/2)_k/(m+1)_k · ₂F₁(n/2+σ, -k-m; n/2; r²).
///
/// For large polynomial degree K = k+m the terminating series in r² loses
/// all significance to cancellation, so the Pfaff-transformed expansion in
/// (1-r²) is used instead; there all summands are positive.
struct GSharpTerms {
    nh: f64,
    sigma: f64,
    m: u32,
    r2: f64,
    weight: f64,      // (n/2)_k / (m+1)_k
    front: f64,       // (-σ)_{k+m} / (n/2)_{k+m}
    k: u32,
}

impl GSharpTerms {
    fn new(n: u32, order: FracOrder, r: f64) -> Self {
        let nh = n as f64 / 2.0;
        let mut front = 1.0;
        for j in 0..order.m {
            front *= (-order.sigma + j as f64) / (nh + j as f64);
        }
        GSharpTerms {
            nh,
            sigma: order.sigma,
            m: order.m,
            r2: r * r,
            weight: 1.0,
            front,
            k: 0,
        }
    }
}

impl Iterator for GSharpTerms {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let kk = self.k + self.m; // polynomial degree of this term
        let f21 = if (kk as f64) * self.r2 < 16.0 {
            hyp2f1_terminating(self.nh + self.sigma, kk, self.nh, self.r2).ok()?
        } else {
            // front · Σ_ℓ (n/2+σ)_ℓ (-K)_ℓ / (ℓ! (σ+1-K)_ℓ) (1-r²)^ℓ
            let kf = kk as f64;
            let x = 1.0 - self.r2;
            let mut u = 1.0;
            let mut sum = 1.0;
            for l in 0..kk {
                let lf = l as f64;
                u *= (self.nh + self.sigma + lf) * (-kf + lf)
                    / ((lf + 1.0) * (self.sigma + 1.0 - kf + lf))
                    * x;
                sum += u;
                if u.abs() <= 1e-18 * sum.abs() && lf > self.nh + self.sigma {
                    break;
                }
            }
            self.front * sum
        };
        let term = self.weight * f21;
        let kf = self.k as f64;
        self.weight *= (self.nh + kf) / (self.m as f64 + 1.0 + kf);
        let degf = kk as f64;
        self.front *= (-self.sigma + degf) / (self.nh + degf);
        self.k += 1;
        Some(term)
    }
}

/// G♯_s(r) = Σ_k (n/2)_k/(m+1)_k · ₂F₁(n/2+σ, -k-m; n/2; r²).
///
/// The terms decay only like k^{-s-1}; the sum is truncated once the
/// asymptotic regime k ≫ 1/r² is reached and the remainder is added from a
/// two-parameter fit t_k ≈ A k^{-s-1}(1 + c/k) with Euler-Maclaurin tails.
pub fn gsharp(r: f64, n: u32, order: FracOrder, k_trunc: usize) -> Result<f64> {
    if order.m < 1 || order.integer_flag {
        return Err(Error::Domain(
            "G-sharp requires a fractional order with m >= 1".into(),
        ));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("radius {r} outside (0,1)")));
    }
    let s = order.s;
    // Enough terms that the tail model is trustworthy: past the saturation
    // range of the inner (1-r²)-series.
    let k_needed = ((80.0 / (r * r)) as usize).clamp(4000, 60_000);
    let k_max = k_needed.min(k_trunc.max(64));
    let q = k_max / 16;
    let mut terms = GSharpTerms::new(n, order, r);
    let mut sum = 0.0;
    let mut kept = [0.0f64; 3]; // t_{K-2q}, t_{K-q}, t_K
    for k in 0..=k_max {
        let t = terms.next().expect("iterator is infinite");
        sum += t;
        if k == k_max - 2 * q {
            kept[0] = t;
        } else if k == k_max - q {
            kept[1] = t;
        } else if k == k_max {
            kept[2] = t;
        }
    }
    // Fit t_k · k^{s+1} = A + b/k + c/k² through the three samples, then
    // integrate the model over the tail with Euler-Maclaurin sums.
    let p = s + 1.0;
    let ks = [
        (k_max - 2 * q) as f64,
        (k_max - q) as f64,
        k_max as f64,
    ];
    let samples: Vec<f64> = ks.iter().zip(kept).map(|(&k, t)| t * k.powf(p)).collect();
    let mat: Vec<Vec<f64>> = ks
        .iter()
        .map(|&k| vec![1.0, 1.0 / k, 1.0 / (k * k)])
        .collect();
    let coef = solve_dense(mat, samples)?;
    let kf = k_max as f64;
    let tail = coef[0] * em_tail(kf, p)
        + coef[1] * em_tail(kf, p + 1.0)
        + coef[2] * em_tail(kf, p + 2.0);
    let tail_err = (coef[2] * em_tail(kf, p + 2.0)).abs() * 0.5 + coef[0].abs() * kf.powf(-p - 2.0);
    if k_max < k_needed && tail_err > 1e-9 * sum.abs().max(1.0) {
        return Err(Error::SlowConvergence {
            tail_bound: tail_err,
            tol: 1e-9,
            terms: k_max,
        });
    }
    Ok(sum + tail)
}

/// Prefactor of Lemma-type identity: (-Δ)^σ G̃_s = prefactor · G♯_s with
/// prefactor = 4^{σ-1/2} Γ(n/2+σ) Γ(s) / (Γ(n/2) m!).
pub fn gsharp_prefactor(n: u32, order: FracOrder) -> f64 {
    let nh = n as f64 / 2.0;
    ((order.sigma - 0.5) * 4f64.ln() + ln_gamma(nh + order.sigma) + ln_gamma(order.s)
        - ln_gamma(nh)
        - ln_gamma(order.m as f64 + 1.0))
    .exp()
}

/// (-Δ)^σ G̃_s at radius r, through the G♯ series.
pub fn fraclap_sigma_of_green(r: f64, n: u32, order: FracOrder, k_trunc: usize) -> Result<f64> {
    Ok(gsharp_prefactor(n, order) * gsharp(r, n, order, k_trunc)?)
}

/// The decomposition G♯_s = Σ_k a_k (1-r²)^k + multiplier · G̃_m.
#[derive(Debug, Clone)]
pub struct GSharpDecomposition {
    pub a: Vec<f64>,
    pub multiplier: f64,
    pub m: u32,
    pub sigma: f64,
    pub n: u32,
}

impl GSharpDecomposition {
    pub fn reconstruct(&self, r: f64, spec: &QuadratureSpec) -> Result<f64> {
        let u = 1.0 - r * r;
        let poly: f64 = self
            .a
            .iter()
            .enumerate()
            .map(|(k, &a)| a * u.powi(k as i32))
            .sum();
        let m_order = FracOrder::new(self.m as f64)?;
        Ok(poly + self.multiplier * green_tilde(r, self.n, m_order, spec)?)
    }
}

/// Closed-form multiplier 2m Γ(m+σ) Γ(n/2) / (Γ(n/2+σ) Γ(m)).
pub fn gsharp_multiplier(n: u32, order: FracOrder) -> f64 {
    let nh = n as f64 / 2.0;
    let mf = order.m as f64;
    2.0 * mf
        * (ln_gamma(mf + order.sigma) + ln_gamma(nh) - ln_gamma(nh + order.sigma) - ln_gamma(mf))
            .exp()
}

/// Fit the a_k at m Chebyshev radii and verify on a disjoint grid.
pub fn gsharp_decompose(n: u32, order: FracOrder, spec: &QuadratureSpec) -> Result<GSharpDecomposition> {
    let m = order.m as usize;
    if m < 1 || order.integer_flag {
        return Err(Error::Domain(
            "decomposition requires a fractional order with m >= 1".into(),
        ));
    }
    let multiplier = gsharp_multiplier(n, order);
    let m_order = FracOrder::new(order.m as f64)?;
    let defect = |r: f64| -> Result<f64> {
        Ok(gsharp(r, n, order, usize::MAX)? - multiplier * green_tilde(r, n, m_order, spec)?)
    };
    // Chebyshev radii on [0.3, 0.8]: away from both the slow-convergence
    // region near 0 and the boundary.
    let (lo, hi) = (0.3, 0.8);
    let nodes: Vec<f64> = (0..m)
        .map(|i| {
            let t = ((2 * i + 1) as f64 / (2 * m) as f64 * std::f64::consts::PI / 2.0).cos();
            lo + (hi - lo) * 0.5 * (1.0 + t)
        })
        .collect();
    let mut mat = vec![vec![0.0; m]; m];
    let mut rhs = vec![0.0; m];
    for (i, &r) in nodes.iter().enumerate() {
        let u = 1.0 - r * r;
        for (j, entry) in mat[i].iter_mut().enumerate() {
            *entry = u.powi(j as i32);
        }
        rhs[i] = defect(r)?;
    }
    let a = solve_dense(mat, rhs)?;
    let decomp = GSharpDecomposition {
        a,
        multiplier,
        m: order.m,
        sigma: order.sigma,
        n,
    };
    // Verification on a disjoint grid.
    let mut worst = 0.0f64;
    for i in 0..7 {
        let r = 0.25 + 0.5 * i as f64 / 6.0 + 0.013;
        let resid = (gsharp(r, n, order, usize::MAX)? - decomp.reconstruct(r, spec)?).abs();
        worst = worst.max(resid);
    }
    if worst > 1e-7 {
        return Err(Error::FitFailure {
            residual: worst,
            tol: 1e-7,
        });
    }
    Ok(decomp)
}

fn solve_dense(mut mat: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Result<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| mat[i][col].abs().partial_cmp(&mat[j][col].abs()).unwrap())
            .unwrap();
        if mat[piv][col].abs() < 1e-300 {
            return Err(Error::FitFailure {
                residual: f64::INFINITY,
                tol: 0.0,
            });
        }
        mat.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..n {
            let f = mat[row][col] / mat[col][col];
            for k in col..n {
                mat[row][k] -= f * mat[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in row + 1..n {
            acc -= mat[row][k] * x[k];
        }
        x[row] = acc / mat[row][row];
    }
    Ok(x)
}

/// Far-field handling for the pointwise evaluator.
#[derive(Debug, Clone, Copy)]
pub enum FarField {
    /// u vanishes outside the ball of this radius about the origin; the tail
    /// u(x)·n e_n R^{-2σ}/(2σ) is added analytically.
    CompactSupport { radius: f64 },
    /// Plain truncation at this distance from x (caller accepts the error).
    Truncate { radius: f64 },
}

/// Pointwise (-Δ)^σ u(x) = C(n,σ) PV ∫ (u(x)-u(y)) / |x-y|^{n+2σ} dy.
///
/// The inner ball uses the symmetric second difference
/// u(x) - (u(x+z)+u(x-z))/2, which cancels the gradient term and leaves an
/// O(|z|²) numerator; the leftover |z|^{1-2σ} radial power is removed by the
/// endpoint substitution.
pub fn fraclap_pointwise<U>(
    u: U,
    x: &[f64],
    sigma: f64,
    n: u32,
    spec: &QuadratureSpec,
    far: FarField,
) -> Result<f64>
where
    U: Fn(&[f64]) -> f64 + Sync,
{
    let c = fraclap_constant(n, sigma)?;
    let x_norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let (r_outer, tail) = match far {
        FarField::CompactSupport { radius } => {
            let r = x_norm + radius;
            (r, u(x) * sphere_area_constant(n) * r.powf(-2.0 * sigma) / (2.0 * sigma))
        }
        FarField::Truncate { radius } => (radius, 0.0),
    };
    let rho = spec.pv_inner_radius.unwrap_or(0.2).min(0.5 * r_outer);
    // Below h_cut the second difference is round-off noise amplified by
    // t^{-1-2σ}; there the integrand is replaced by its fitted even Taylor
    // model a t² + b t⁴, integrated in closed form.
    let h_cut = rho / 16.0;
    let ux = u(x);

    let annulus_spec = {
        let mut s = spec.clone();
        s.singularity_exponent = None;
        s
    };

    let eval = |res: usize| -> (f64, f64) {
        let rule = sphere_rule(n, res);
        let parts = exec::map_indexed(rule.len(), |i| {
            let (omega, w) = &rule[i];
            let shift = |t: f64, sign: f64| -> f64 {
                let y: Vec<f64> = x
                    .iter()
                    .zip(omega.iter())
                    .map(|(xi, oi)| xi + sign * t * oi)
                    .collect();
                u(&y)
            };
            let second_diff = |t: f64| ux - 0.5 * (shift(t, 1.0) + shift(t, -1.0));
            let d_h = second_diff(h_cut);
            let d_half = second_diff(0.5 * h_cut);
            let h2 = h_cut * h_cut;
            let a = (16.0 * d_half - d_h) / (3.0 * h2);
            let b = (d_h - a * h2) / (h2 * h2);
            let head = a * h_cut.powf(2.0 - 2.0 * sigma) / (2.0 - 2.0 * sigma)
                + b * h_cut.powf(4.0 - 2.0 * sigma) / (4.0 - 2.0 * sigma);
            let inner = integrate_1d(
                |t| t.powf(-1.0 - 2.0 * sigma) * second_diff(t),
                h_cut,
                rho,
                &annulus_spec,
            );
            let annulus = integrate_1d(
                |t| t.powf(-1.0 - 2.0 * sigma) * (ux - shift(t, 1.0)),
                rho,
                r_outer,
                &annulus_spec,
            );
            (
                w * (head + inner.value + annulus.value),
                w.abs() * (inner.error_estimate + annulus.error_estimate),
            )
        });
        (
            parts.iter().map(|p| p.0).sum(),
            parts.iter().map(|p| p.1).sum(),
        )
    };

    let base = match n {
        1 => 1,
        2 => 8,
        _ => 6,
    };
    let (mut prev, _) = eval(base);
    if n == 1 {
        return Ok(c * (prev + tail));
    }
    let mut res = base;
    for _ in 0..4 {
        res *= 2;
        let (cur, rerr) = eval(res);
        let ang_err = (cur - prev).abs();
        if ang_err + rerr <= spec.abs_tol.max(spec.rel_tol * cur.abs()) {
            return Ok(c * (cur + tail));
        }
        prev = cur;
    }
    Ok(c * (prev + tail))
}
