//! Boggio's Green function on the unit ball and its radial profile.
//!
//! The radial profile G̃_s is evaluated through two independent
//! representations: the defining integral r^{2s-n} ∫_1^{1/r} (v²-1)^{s-1}
//! v^{1-n} dv and the series Σ_k (n/2)_k / (2(s)_{k+1}) (1-r²)^{k+s}. The
//! hybrid dispatcher uses the series away from the origin (where it converges
//! geometrically) and the integral below the switch radius.
//!
//! The full kernel reduces to the profile through
//! G_s(x,y) = k_{s,n} A^{(2s-n)/2} G̃_s(|x-y|/√A) with
//! A = |x|²|y|² - 2x·y + 1 = | |x|y - x/|x| |², a form free of the removable
//! x = 0 singularity.

use crate::error::{Error, Result};
use crate::quadrature::{integrate_1d, QuadratureSpec};
use crate::specfun::{boggio_constant, FracOrder};

/// Default switch radius between the series and integral representations.
pub const DEFAULT_SWITCH_RADIUS: f64 = 0.5;

/// A point of ℝⁿ with cached Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint {
    coords: Vec<f64>,
    norm: f64,
}

impl BallPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        BallPoint { coords, norm }
    }

    pub fn origin(n: u32) -> Self {
        BallPoint::new(vec![0.0; n as usize])
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn dim(&self) -> u32 {
        self.coords.len() as u32
    }

    pub fn in_closed_ball(&self) -> bool {
        self.norm <= 1.0 + 1e-12
    }

    pub fn dist(&self, other: &BallPoint) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn dot(&self, other: &BallPoint) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum()
    }
}

/// Radial Green profile as a truncated series with its convergence metadata.
#[derive(Debug, Clone)]
pub struct RadialGreenProfile {
    pub n: u32,
    pub order: FracOrder,
    /// c_k = (n/2)_k / (2 (s)_{k+1}).
    pub coeffs: Vec<f64>,
    pub truncation: usize,
    /// Bound on the discarded remainder for r >= r_min.
    pub tail_bound: f64,
    pub r_min: f64,
}

impl RadialGreenProfile {
    /// Build the profile with enough terms that the tail stays below `tol`
    /// for all r >= r_min. Fails with SlowConvergence when the geometric
    /// ratio never drops below 1 there.
    pub fn build(n: u32, order: FracOrder, r_min: f64, tol: f64) -> Result<Self> {
        assert!(r_min > 0.0 && r_min < 1.0);
        let s = order.s;
        let nh = n as f64 / 2.0;
        let u = 1.0 - r_min * r_min;
        let max_terms = 20_000usize;
        let mut coeffs = Vec::with_capacity(64);
        let mut c = 1.0 / (2.0 * s); // c_0
        let mut term = c * u.powf(s); // bound terms at r = r_min
        for k in 0..max_terms {
            coeffs.push(c);
            let kf = k as f64;
            let ratio = (nh + kf) / (s + kf + 1.0);
            let next_term = term * ratio * u;
            // Geometric tail bound with the sup of future coefficient ratios.
            let q = u * ratio.max(1.0);
            if q < 1.0 {
                let tail = next_term.abs() / (1.0 - q);
                if tail <= tol {
                    return Ok(RadialGreenProfile {
                        n,
                        order,
                        coeffs,
                        truncation: k,
                        tail_bound: tail,
                        r_min,
                    });
                }
            }
            c *= ratio;
            term = next_term;
        }
        Err(Error::SlowConvergence {
            tail_bound: term.abs(),
            tol,
            terms: max_terms,
        })
    }

    /// Evaluate the truncated series at radius r ∈ [r_min, 1].
    pub fn eval(&self, r: f64) -> Result<f64> {
        if r < self.r_min {
            return Err(Error::SlowConvergence {
                tail_bound: self.tail_bound,
                tol: 0.0,
                terms: self.coeffs.len(),
            });
        }
        let u = 1.0 - r * r;
        if u <= 0.0 {
            return Ok(0.0);
        }
        let s = self.order.s;
        let mut pow = u.powf(s);
        let mut sum = 0.0;
        for &c in &self.coeffs {
            sum += c * pow;
            pow *= u;
        }
        Ok(sum)
    }

    /// Termwise derivative of the series at r.
    pub fn eval_derivative(&self, r: f64) -> Result<f64> {
        if r < self.r_min {
            return Err(Error::SlowConvergence {
                tail_bound: self.tail_bound,
                tol: 0.0,
                terms: self.coeffs.len(),
            });
        }
        let u = 1.0 - r * r;
        if u <= 0.0 {
            return Ok(0.0);
        }
        let s = self.order.s;
        let mut pow = u.powf(s - 1.0);
        let mut sum = 0.0;
        for (k, &c) in self.coeffs.iter().enumerate() {
            sum += c * (k as f64 + s) * pow;
            pow *= u;
        }
        Ok(-2.0 * r * sum)
    }
}

/// G̃_s(r) by the defining integral representation.
pub fn green_tilde_integral(r: f64, n: u32, order: FracOrder, spec: &QuadratureSpec) -> Result<f64> {
    assert!(r > 0.0 && r <= 1.0, "radius must lie in (0, 1]");
    if r == 1.0 {
        return Ok(0.0);
    }
    let s = order.s;
    let mut vspec = spec.clone();
    // Shift to u = v - 1: the endpoint factor u^{s-1} is then computed
    // directly instead of through the cancellation-prone v² - 1.
    vspec.singularity_exponent = if s < 1.0 { Some(s - 1.0) } else { None };
    let nf = n as f64;
    let integral = integrate_1d(
        |u| u.powf(s - 1.0) * (u + 2.0).powf(s - 1.0) * (1.0 + u).powf(1.0 - nf),
        0.0,
        1.0 / r - 1.0,
        &vspec,
    )
    .into_result()?;
    Ok(r.powf(2.0 * s - nf) * integral)
}

/// G̃_s(r) by the series representation (profile built on demand).
pub fn green_tilde_series(r: f64, n: u32, order: FracOrder, tol: f64) -> Result<f64> {
    let r_min = r.min(0.99);
    // Scale the truncation target by the leading term so `tol` acts
    // relatively even when the profile itself is tiny near the boundary.
    let scale = (1.0 - r_min * r_min).powf(order.s) / (2.0 * order.s);
    let profile = RadialGreenProfile::build(n, order, r_min, tol * scale.min(1.0))?;
    profile.eval(r)
}

/// Hybrid G̃_s: series for r >= switch radius, integral below.
pub fn green_tilde(r: f64, n: u32, order: FracOrder, spec: &QuadratureSpec) -> Result<f64> {
    if r >= DEFAULT_SWITCH_RADIUS {
        green_tilde_series(r, n, order, spec.abs_tol.min(1e-12))
    } else {
        green_tilde_integral(r, n, order, spec)
    }
}

/// The Boggio argument g(x,y) = √(1 + (1-|x|²)(1-|y|²)/|x-y|²), through the
/// symmetric form A = |x|²|y|² - 2x·y + 1 = g²|x-y|².
pub fn boggio_argument(x: &BallPoint, y: &BallPoint) -> Result<f64> {
    let d2 = {
        let d = x.dist(y);
        d * d
    };
    if d2 == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    let a = symmetric_form(x, y);
    Ok((a / d2).sqrt().max(1.0))
}

/// A(x,y) = |x|²|y|² - 2 x·y + 1 = | |x|y - x/|x| |².
pub fn symmetric_form(x: &BallPoint, y: &BallPoint) -> f64 {
    x.norm() * x.norm() * y.norm() * y.norm() - 2.0 * x.dot(y) + 1.0
}

/// Reusable kernel evaluator for fixed (n, s): the Boggio constant and the
/// series profile are built once and shared.
#[derive(Debug, Clone)]
pub struct GreenKernel {
    pub n: u32,
    pub order: FracOrder,
    pub constant: f64,
    profile: RadialGreenProfile,
    spec: QuadratureSpec,
    switch_radius: f64,
}

impl GreenKernel {
    pub fn new(n: u32, order: FracOrder, spec: &QuadratureSpec) -> Result<Self> {
        let profile = RadialGreenProfile::build(n, order, DEFAULT_SWITCH_RADIUS, 1e-13)?;
        Ok(GreenKernel {
            n,
            order,
            constant: boggio_constant(order, n),
            profile,
            spec: spec.clone(),
            switch_radius: DEFAULT_SWITCH_RADIUS,
        })
    }

    /// Radial profile G̃_s(r) via the hybrid dispatcher.
    pub fn profile(&self, r: f64) -> Result<f64> {
        if r >= self.switch_radius {
            self.profile.eval(r)
        } else {
            green_tilde_integral(r, self.n, self.order, &self.spec)
        }
    }

    /// G_s(x, y). Zero on the boundary, error at coincident points.
    pub fn eval(&self, x: &BallPoint, y: &BallPoint) -> Result<f64> {
        let d = x.dist(y);
        if d == 0.0 {
            return Err(Error::CoincidentPoints);
        }
        // A = |x-y|² + (1-|x|²)(1-|y|²); assembling it from the product keeps
        // the boundary zero exact (the product is 0 whenever |y| = 1, while
        // A - |x-y|² loses it to cancellation) and the profile argument
        // d/√A accurate all the way to 1.
        let p = (1.0 - x.norm() * x.norm()) * (1.0 - y.norm() * y.norm());
        if p <= 0.0 {
            return Ok(0.0);
        }
        let a = d * d + p;
        let two_s_minus_n = 2.0 * self.order.s - self.n as f64;
        let arg = (d * d / a).sqrt().min(1.0);
        Ok(self.constant * a.powf(two_s_minus_n / 2.0) * self.profile(arg)?)
    }

    /// G_s(x, y) straight from the defining formula, as an independent route
    /// for cross-validation: k_{s,n} |x-y|^{2s-n} ∫_1^{g} (v²-1)^{s-1} v^{1-n} dv.
    pub fn eval_direct(&self, x: &BallPoint, y: &BallPoint) -> Result<f64> {
        let d = x.dist(y);
        if d == 0.0 {
            return Err(Error::CoincidentPoints);
        }
        let g = boggio_argument(x, y)?;
        if g <= 1.0 {
            return Ok(0.0);
        }
        let s = self.order.s;
        let nf = self.n as f64;
        let mut vspec = self.spec.clone();
        vspec.singularity_exponent = if s < 1.0 { Some(s - 1.0) } else { None };
        let integral = integrate_1d(
            |v| (v * v - 1.0).powf(s - 1.0) * v.powf(1.0 - nf),
            1.0,
            g,
            &vspec,
        )
        .into_result()?;
        Ok(self.constant * d.powf(2.0 * s - nf) * integral)
    }
}

/// h(t) = ∫_0^t (v²-1)^{s-1}_+ v^{1-n} dv together with its factorization
/// h(t) = (t²-1)^s_+ · h̃(t), where h̃ comes from the τ-integral
/// (1/2)∫_0^1 τ^{s-1} (1 + (t²-1)τ)^{-n/2} dτ.
pub struct HProfile {
    pub h: f64,
    pub boundary_factor: f64,
    pub h_tilde: f64,
}

pub fn h_profile(t: f64, n: u32, order: FracOrder, spec: &QuadratureSpec) -> Result<HProfile> {
    assert!(t >= 0.0);
    if t <= 1.0 {
        return Ok(HProfile {
            h: 0.0,
            boundary_factor: 0.0,
            h_tilde: h_tilde(t, n, order, spec)?,
        });
    }
    let s = order.s;
    let nf = n as f64;
    let mut vspec = spec.clone();
    vspec.singularity_exponent = if s < 1.0 { Some(s - 1.0) } else { None };
    let h = integrate_1d(
        |v| (v * v - 1.0).powf(s - 1.0) * v.powf(1.0 - nf),
        1.0,
        t,
        &vspec,
    )
    .into_result()?;
    let factor = (t * t - 1.0).powf(s);
    Ok(HProfile {
        h,
        boundary_factor: factor,
        h_tilde: h_tilde(t, n, order, spec)?,
    })
}

fn h_tilde(t: f64, n: u32, order: FracOrder, spec: &QuadratureSpec) -> Result<f64> {
    let s = order.s;
    let nf = n as f64;
    let z = t * t - 1.0;
    let mut tspec = spec.clone();
    tspec.singularity_exponent = if s != 1.0 && s.fract() != 0.0 {
        Some(s - 1.0)
    } else if s < 1.0 {
        Some(s - 1.0)
    } else {
        None
    };
    let val = integrate_1d(
        |tau| tau.powf(s - 1.0) * (1.0 + z * tau).powf(-nf / 2.0),
        0.0,
        1.0,
        &tspec,
    )
    .into_result()?;
    Ok(0.5 * val)
}

/// Residual of the initial-value problem
/// G̃'(r) - (2s-n)/r G̃(r) = -(1/r)(1-r²)^{s-1}.
pub fn ivp_residual(r: f64, n: u32, order: FracOrder, spec: &QuadratureSpec) -> Result<f64> {
    assert!(r > 0.0 && r < 1.0);
    let s = order.s;
    let nf = n as f64;
    let rhs = -(1.0 / r) * (1.0 - r * r).powf(s - 1.0);
    let (val, deriv) = if r >= DEFAULT_SWITCH_RADIUS {
        let profile = RadialGreenProfile::build(n, order, DEFAULT_SWITCH_RADIUS, 1e-13)?;
        (profile.eval(r)?, profile.eval_derivative(r)?)
    } else {
        let h = 1e-5 * r.min(1.0 - r);
        let vp = green_tilde_integral(r + h, n, order, spec)?;
        let vm = green_tilde_integral(r - h, n, order, spec)?;
        let v0 = green_tilde_integral(r, n, order, spec)?;
        (v0, (vp - vm) / (2.0 * h))
    };
    Ok((deriv - (2.0 * s - nf) / r * val - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::FracOrder;
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn profile_closed_forms() {
        let s1 = FracOrder::new(1.0).unwrap();
        // n = 3, s = 1: G̃ = (1-r)/r.
        for &r in &[0.1, 0.25, 0.5, 0.9] {
            let v = green_tilde(r, 3, s1, &spec()).unwrap();
            assert!((v - (1.0 - r) / r).abs() < 1e-11, "r = {r}: {v}");
        }
        // n = 1, s = 1: G̃ = 1 - r.
        let v = green_tilde(0.25, 1, s1, &spec()).unwrap();
        assert!((v - 0.75).abs() < 1e-11);
        // General n >= 3, s = 1: (r^{2-n} - 1)/(n - 2).
        for n in [3u32, 4, 5] {
            for &r in &[0.3, 0.6, 0.85] {
                let v = green_tilde(r, n, s1, &spec()).unwrap();
                let exact = (r.powi(2 - n as i32) - 1.0) / (n as f64 - 2.0);
                assert!((v - exact).abs() < 1e-11 * exact.max(1.0), "n={n} r={r}");
            }
        }
    }

    #[test]
    fn profile_boundary_and_first_coefficient() {
        let o = FracOrder::new(1.5).unwrap();
        assert_eq!(green_tilde_integral(1.0, 2, o, &spec()).unwrap(), 0.0);
        let p = RadialGreenProfile::build(2, o, 0.5, 1e-13).unwrap();
        assert!((p.coeffs[0] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(p.eval(1.0).unwrap(), 0.0);
        // Coefficient recurrence c_{k+1}(s+k+1) = c_k(n/2+k), exactly as built.
        for k in 0..p.coeffs.len() - 1 {
            let kf = k as f64;
            let lhs = p.coeffs[k + 1] * (o.s + kf + 1.0);
            let rhs = p.coeffs[k] * (1.0 + kf);
            assert!((lhs - rhs).abs() <= 1e-14 * rhs.abs());
            assert!(p.coeffs[k] > 0.0);
        }
    }

    #[test]
    fn dual_representation_band() {
        for &(n, s) in &[(2u32, 0.5f64), (1, 0.4), (3, 2.3), (5, 3.7)] {
            let o = FracOrder::new(s).unwrap();
            for &r in &[0.5, 0.7, 0.9, 0.99] {
                let a = green_tilde_series(r, n, o, 1e-13).unwrap();
                let b = green_tilde_integral(r, n, o, &spec()).unwrap();
                assert!(
                    (a - b).abs() <= 1e-9 * b.abs().max(1e-30),
                    "n={n} s={s} r={r}: series {a} vs integral {b}"
                );
            }
        }
    }

    #[test]
    fn profile_divergence_small_radius() {
        // n = 3, s = 1: closed form (1-r)/r blows up like 1/r.
        let s1 = FracOrder::new(1.0).unwrap();
        let v = green_tilde(1e-3, 3, s1, &spec()).unwrap();
        let exact = (1.0 - 1e-3) / 1e-3;
        assert!((v - exact).abs() < 1e-6 * exact);
    }

    #[test]
    fn boggio_argument_examples() {
        let x0 = BallPoint::origin(2);
        let y = BallPoint::new(vec![0.5, 0.0]);
        assert!((boggio_argument(&x0, &y).unwrap() - 2.0).abs() < 1e-14);

        let yb = BallPoint::new(vec![0.0, 1.0]);
        let x = BallPoint::new(vec![0.3, 0.2]);
        assert!((boggio_argument(&x, &yb).unwrap() - 1.0).abs() < 1e-12);

        let x = BallPoint::new(vec![0.5, 0.0]);
        let y = BallPoint::new(vec![0.0, 0.5]);
        let expect = (1.0f64 + 0.5625 / 0.5).sqrt();
        assert!((boggio_argument(&x, &y).unwrap() - expect).abs() < 1e-12);

        assert!(matches!(boggio_argument(&x, &x), Err(Error::CoincidentPoints)));
    }

    #[test]
    fn newtonian_kernel_match() {
        // n = 3, s = 1: G = (1/4π)(|x-y|^{-1} - A^{-1/2}).
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let s1 = FracOrder::new(1.0).unwrap();
        let kernel = GreenKernel::new(3, s1, &spec()).unwrap();
        for _ in 0..100 {
            let mut p = || {
                loop {
                    let v: Vec<f64> = (0..3).map(|_| rng_sample(&mut rng)).collect();
                    let n2: f64 = v.iter().map(|c| c * c).sum();
                    if n2 < 0.96 {
                        return BallPoint::new(v);
                    }
                }
            };
            let x = p();
            let y = loop {
                let y = p();
                if x.dist(&y) > 1e-3 {
                    break y;
                }
            };
            let a = symmetric_form(&x, &y);
            let exact = (1.0 / x.dist(&y) - 1.0 / a.sqrt()) / (4.0 * PI);
            let got = kernel.eval(&x, &y).unwrap();
            assert!(
                (got - exact).abs() <= 1e-10 * exact.abs().max(1e-12),
                "{got} vs {exact}"
            );
        }

        fn rng_sample(rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
            rng.gen_range(-1.0..1.0)
        }
    }

    #[test]
    fn kernel_symmetry_and_positivity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for &(n, s) in &[(2u32, 0.7f64), (3, 1.9), (1, 2.5)] {
            let o = FracOrder::new(s).unwrap();
            let kernel = GreenKernel::new(n, o, &spec()).unwrap();
            for _ in 0..40 {
                let sample = |rng: &mut rand_chacha::ChaCha8Rng| loop {
                    let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    if v.iter().map(|c| c * c).sum::<f64>() < 0.94 {
                        return BallPoint::new(v);
                    }
                };
                let x = sample(&mut rng);
                let y = sample(&mut rng);
                if x.dist(&y) < 1e-6 {
                    continue;
                }
                let gxy = kernel.eval(&x, &y).unwrap();
                let gyx = kernel.eval(&y, &x).unwrap();
                assert!(gxy > 0.0);
                assert!((gxy - gyx).abs() <= 1e-12 * gxy.abs());
            }
        }
    }

    #[test]
    fn direct_and_profile_routes_agree() {
        let o = FracOrder::new(2.3).unwrap();
        let kernel = GreenKernel::new(2, o, &spec()).unwrap();
        let x = BallPoint::new(vec![0.4, -0.1]);
        let y = BallPoint::new(vec![-0.2, 0.55]);
        let a = kernel.eval(&x, &y).unwrap();
        let b = kernel.eval_direct(&x, &y).unwrap();
        assert!((a - b).abs() <= 1e-9 * b.abs());
    }

    #[test]
    fn profile_strictly_decreasing() {
        let o = FracOrder::new(1.7).unwrap();
        let mut prev = f64::INFINITY;
        for i in 1..=200 {
            let r = i as f64 / 201.0;
            let v = green_tilde(r, 2, o, &spec()).unwrap();
            assert!(v < prev + 1e-12, "not decreasing at r = {r}");
            prev = v;
        }
    }

    #[test]
    fn h_profile_examples() {
        let s1 = FracOrder::new(1.0).unwrap();
        let h = h_profile(1.0, 3, s1, &spec()).unwrap();
        assert_eq!(h.h, 0.0);
        let h = h_profile(0.5, 3, s1, &spec()).unwrap();
        assert_eq!(h.h, 0.0);
        assert_eq!(h.boundary_factor, 0.0);
        let h = h_profile(2.0, 3, s1, &spec()).unwrap();
        assert!((h.h - 0.5).abs() < 1e-12);
        // Factorization h = (t²-1)^s · h̃.
        let o = FracOrder::new(1.5).unwrap();
        for &t in &[1.2, 2.0, 3.5] {
            let hp = h_profile(t, 2, o, &spec()).unwrap();
            assert!(
                (hp.h - hp.boundary_factor * hp.h_tilde).abs() <= 1e-10 * hp.h.abs(),
                "t = {t}"
            );
        }
    }

    #[test]
    fn ivp_examples() {
        let s1 = FracOrder::new(1.0).unwrap();
        assert!(ivp_residual(0.5, 3, s1, &spec()).unwrap() < 1e-10);
        let o = FracOrder::new(1.7).unwrap();
        assert!(ivp_residual(0.8, 2, o, &spec()).unwrap() < 1e-8);
        let o = FracOrder::new(0.5).unwrap();
        assert!(ivp_residual(0.6, 1, o, &spec()).unwrap() < 1e-8);
        // Below the switch radius the finite-difference path applies.
        assert!(ivp_residual(0.3, 3, s1, &spec()).unwrap() < 1e-5);
    }
}
