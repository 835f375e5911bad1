//! Möbius geometry of the unit ball: inversion, the automorphism φ_x
//! exchanging x with the origin, its Jacobian, and the s-Kelvin transform.
//!
//! These carry the conformal-covariance structure of the fractional
//! Laplacian; the kernel-transfer identity checked in the tests is the
//! geometric heart of the solution formula on the ball.

use crate::error::{Error, Result};
use crate::fraclap::{fraclap_pointwise, FarField};
use crate::kernel::{symmetric_form, BallPoint};
use crate::quadrature::QuadratureSpec;
use crate::specfun::FracOrder;

/// j(x) = x / |x|².
pub fn inversion(x: &[f64]) -> Result<Vec<f64>> {
    let n2: f64 = x.iter().map(|c| c * c).sum();
    if n2 == 0.0 {
        return Err(Error::Origin);
    }
    Ok(x.iter().map(|c| c / n2).collect())
}

/// The ball automorphism φ_x with φ_x(0) = x and φ_x(x) = 0:
///
///   φ_x(y) = (1/|x|²) (x + (1-|x|²)(y - x/|x|²)/|y - x/|x|²|²).
///
/// The inversion center x/|x|² lies outside the closed ball, so φ_x is
/// smooth on all of B̄.
#[derive(Debug, Clone)]
pub struct BallAutomorphism {
    x: BallPoint,
    one_minus_x2: f64,
    center: Vec<f64>,
}

impl BallAutomorphism {
    pub fn new(x: BallPoint) -> Result<Self> {
        if x.norm() == 0.0 {
            return Err(Error::Origin);
        }
        if x.norm() >= 1.0 {
            return Err(Error::Domain(format!(
                "base point norm {} not inside the open ball",
                x.norm()
            )));
        }
        let center = inversion(x.coords())?;
        Ok(BallAutomorphism {
            one_minus_x2: 1.0 - x.norm() * x.norm(),
            x,
            center,
        })
    }

    pub fn base(&self) -> &BallPoint {
        &self.x
    }

    pub fn phi(&self, y: &BallPoint) -> BallPoint {
        let x2 = self.x.norm() * self.x.norm();
        let diff: Vec<f64> = y
            .coords()
            .iter()
            .zip(&self.center)
            .map(|(yi, ci)| yi - ci)
            .collect();
        let d2: f64 = diff.iter().map(|c| c * c).sum();
        let coords: Vec<f64> = self
            .x
            .coords()
            .iter()
            .zip(&diff)
            .map(|(xi, di)| (xi + self.one_minus_x2 * di / d2) / x2)
            .collect();
        BallPoint::new(coords)
    }

    /// |φ_x(y)| by the cancellation-free closed form |x-y| / √A(x,y).
    pub fn phi_norm(&self, y: &BallPoint) -> f64 {
        let d = self.x.dist(y);
        d / symmetric_form(&self.x, y).sqrt()
    }

    /// J_{φ_x}(y) = (1-|x|²)^n A(x,y)^{-n} with A = |x|²|y|² - 2x·y + 1.
    pub fn jacobian(&self, y: &BallPoint) -> f64 {
        let n = self.x.dim() as i32;
        (self.one_minus_x2 / symmetric_form(&self.x, y)).powi(n)
    }
}

/// Kelvin transform at the given point: |x|^{2s-n} u(x/|x|²).
pub fn kelvin_at<U>(u: U, x: &[f64], order: FracOrder, n: u32) -> Result<f64>
where
    U: Fn(&[f64]) -> f64,
{
    let star = inversion(x)?;
    let norm: f64 = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    Ok(norm.powf(2.0 * order.s - n as f64) * u(&star))
}

/// Kelvin transform as a function. Evaluation exactly at the origin yields
/// 0 (for quadrature use; the transform is undefined there, and the
/// pointwise accessor `kelvin_at` reports the error instead).
pub fn kelvin<U>(u: U, order: FracOrder, n: u32) -> impl Fn(&[f64]) -> f64 + Sync
where
    U: Fn(&[f64]) -> f64 + Sync,
{
    move |x: &[f64]| kelvin_at(&u, x, order, n).unwrap_or(0.0)
}

/// Covariance defect |(-Δ)^σ[u*](x) - |x|^{-n-2σ} (-Δ)^σ u(x/|x|²)|, both
/// sides by PV quadrature. `support` is the annulus (r_lo, r_hi) around the
/// origin containing supp u, with r_lo > 0 so that supp u* stays bounded.
pub fn covariance_residual<U>(
    u: U,
    support: (f64, f64),
    x: &[f64],
    sigma: f64,
    n: u32,
    spec: &QuadratureSpec,
) -> Result<f64>
where
    U: Fn(&[f64]) -> f64 + Sync,
{
    let (r_lo, r_hi) = support;
    if !(r_lo > 0.0 && r_hi > r_lo) {
        return Err(Error::Domain(format!(
            "support annulus ({r_lo}, {r_hi}) must satisfy 0 < r_lo < r_hi"
        )));
    }
    let order = FracOrder::new(sigma)?;
    let star = inversion(x)?;
    let u_star = kelvin(&u, order, n);
    let lhs = fraclap_pointwise(
        &u_star,
        x,
        sigma,
        n,
        spec,
        FarField::CompactSupport { radius: 1.0 / r_lo },
    )?;
    let rhs = fraclap_pointwise(
        &u,
        &star,
        sigma,
        n,
        spec,
        FarField::CompactSupport { radius: r_hi },
    )?;
    let norm: f64 = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    Ok((lhs - norm.powf(-(n as f64) - 2.0 * sigma) * rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::GreenKernel;
    use rand::{Rng, SeedableRng};

    fn random_interior(rng: &mut rand_chacha::ChaCha8Rng, n: u32, max_norm: f64) -> BallPoint {
        loop {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm2: f64 = v.iter().map(|c| c * c).sum();
            if norm2 < max_norm * max_norm && norm2 > 1e-4 {
                return BallPoint::new(v);
            }
        }
    }

    #[test]
    fn inversion_examples() {
        let j = inversion(&[0.5, 0.0, 0.0]).unwrap();
        assert_eq!(j, vec![2.0, 0.0, 0.0]);
        let x = [0.3, -0.4];
        let jj = inversion(&inversion(&x).unwrap()).unwrap();
        for (a, b) in x.iter().zip(&jj) {
            assert!((a - b).abs() < 1e-15);
        }
        let norm: f64 = inversion(&x).unwrap().iter().map(|c| c * c).sum::<f64>().sqrt();
        assert!((norm - 2.0).abs() < 1e-14); // |x| = 0.5
        assert!(matches!(inversion(&[0.0, 0.0]), Err(Error::Origin)));
    }

    #[test]
    fn phi_fixed_points_and_involution() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for n in 1..=3u32 {
            for _ in 0..500 {
                let x = random_interior(&mut rng, n, 0.95);
                let map = BallAutomorphism::new(x.clone()).unwrap();
                // φ_x(0) = x, φ_x(x) = 0.
                let at0 = map.phi(&BallPoint::origin(n));
                assert!(at0.dist(&x) < 1e-13);
                assert!(map.phi(&x).norm() < 1e-13);
                // Involution.
                let y = random_interior(&mut rng, n, 0.999);
                let yy = map.phi(&map.phi(&y));
                assert!(yy.dist(&y) < 1e-12, "n={n}: moved by {}", yy.dist(&y));
                // Coordinate norm agrees with the closed form.
                let img = map.phi(&y);
                assert!((img.norm() - map.phi_norm(&y)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn phi_preserves_sphere() {
        let map = BallAutomorphism::new(BallPoint::new(vec![0.4, 0.3])).unwrap();
        for i in 0..32 {
            let th = i as f64 * std::f64::consts::TAU / 32.0;
            let y = BallPoint::new(vec![th.cos(), th.sin()]);
            assert!((map.phi(&y).norm() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn jacobian_examples_and_reciprocity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(22);
        for n in 1..=3u32 {
            for _ in 0..200 {
                let x = random_interior(&mut rng, n, 0.9);
                let map = BallAutomorphism::new(x.clone()).unwrap();
                let omx2 = 1.0 - x.norm() * x.norm();
                // y = 0.
                let j0 = map.jacobian(&BallPoint::origin(n));
                assert!((j0 - omx2.powi(n as i32)).abs() <= 1e-13 * j0);
                // Reciprocity J(φ_x(y)) J(y) = 1.
                let y = random_interior(&mut rng, n, 0.99);
                let prod = map.jacobian(&map.phi(&y)) * map.jacobian(&y);
                assert!((prod - 1.0).abs() < 1e-11, "n={n}: {prod}");
            }
        }
        // Boundary: J = (1-|x|²)^n / |x-y|^{2n}.
        let x = BallPoint::new(vec![0.5, 0.0]);
        let y = BallPoint::new(vec![0.0, 1.0]);
        let map = BallAutomorphism::new(x.clone()).unwrap();
        let expect = 0.75f64.powi(2) / x.dist(&y).powi(4);
        assert!((map.jacobian(&y) - expect).abs() < 1e-13 * expect);
    }

    #[test]
    fn kelvin_examples() {
        let o = FracOrder::new(1.5).unwrap();
        let u = |y: &[f64]| y[0] + 2.0 * y[1];
        // Sphere points are fixed.
        let on_sphere = [0.6, 0.8];
        let v = kelvin_at(u, &on_sphere, o, 2).unwrap();
        assert!((v - u(&on_sphere)).abs() < 1e-14);
        // Involution.
        let x = [0.3, -0.2];
        let once = kelvin(u, o, 2);
        let twice = kelvin(&once, o, 2);
        assert!((twice(&x) - u(&x)).abs() < 1e-13);
        // (1-|·|²)^s_+ dies under the transform away from 0; at |x| = 2 the
        // inverted point has |y| = 1/2 and the value is 2^{2s-n}(3/4)^s.
        let s = 1.5;
        let power = move |y: &[f64]| {
            let r2: f64 = y.iter().map(|c| c * c).sum();
            if r2 < 1.0 { (1.0 - r2).powf(s) } else { 0.0 }
        };
        let v = kelvin_at(power, &[2.0, 0.0], o, 2).unwrap();
        let expect = 2.0f64.powf(2.0 * s - 2.0) * 0.75f64.powf(s);
        assert!((v - expect).abs() < 1e-14);
        // Inside the ball the transform of that power vanishes identically.
        let v = kelvin_at(power, &[0.4, 0.1], o, 2).unwrap();
        assert_eq!(v, 0.0);
        assert!(matches!(
            kelvin_at(power, &[0.0, 0.0], o, 2),
            Err(Error::Origin)
        ));
    }

    #[test]
    fn kernel_transfer_identity() {
        // √A^{2s-n} G_s(0, φ_x(y)) = G_s(x, y): pure geometry + kernel,
        // valid at every order.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let spec = QuadratureSpec::default();
        for &(n, s) in &[(1u32, 0.5f64), (2, 1.5), (3, 2.3), (2, 3.7)] {
            let o = FracOrder::new(s).unwrap();
            let kernel = GreenKernel::new(n, o, &spec).unwrap();
            let origin = BallPoint::origin(n);
            for _ in 0..100 {
                let x = random_interior(&mut rng, n, 0.9);
                let y = loop {
                    let y = random_interior(&mut rng, n, 0.9);
                    if y.dist(&x) > 1e-2 {
                        break y;
                    }
                };
                let map = BallAutomorphism::new(x.clone()).unwrap();
                let a = symmetric_form(&x, &y);
                let lhs = a.powf((2.0 * s - n as f64) / 2.0)
                    * kernel.eval(&origin, &map.phi(&y)).unwrap();
                let rhs = kernel.eval(&x, &y).unwrap();
                assert!(
                    (lhs - rhs).abs() <= 1e-9 * rhs.abs(),
                    "n={n} s={s}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn covariance_radial_bump() {
        // Radial bump supported in 0.3 < |y| < 0.9, n = 1, σ = 1/2, x = 0.5.
        let bump = |y: &[f64]| {
            let r: f64 = y.iter().map(|c| c * c).sum::<f64>().sqrt();
            let t = (r - 0.6) / 0.3;
            if t.abs() < 1.0 { (-1.0 / (1.0 - t * t)).exp() } else { 0.0 }
        };
        let spec = QuadratureSpec::with_tols(1e-8, 1e-10);
        let res = covariance_residual(bump, (0.3, 0.9), &[0.5], 0.5, 1, &spec).unwrap();
        assert!(res < 1e-3, "residual {res}");
    }
}
