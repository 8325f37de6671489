//! Double-exponential quadrature rules.
//!
//! `tanh_sinh` hands the integrand the distances to both endpoints so that
//! endpoint-singular factors like `x^{-0.9}` or `cos θ` near `π/2` can be formed
//! without cancellation. `fourier_cos`/`fourier_sin` are the Ooura–Mori rules for
//! `∫_0^∞ f(x) cos(ωx) dx` and `∫_0^∞ f(x) sin(ωx) dx`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

/// Value with an error estimate taken from two successive refinements.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Approx {
    pub re: f64,
    pub im: f64,
    pub error: f64,
}

impl Approx {
    pub fn new(value: Complex64, error: f64) -> Self {
        Approx {
            re: value.re,
            im: value.im,
            error,
        }
    }

    pub fn from_pair(coarse: Complex64, fine: Complex64) -> Self {
        Approx::new(fine, (fine - coarse).norm())
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn relative_error(&self) -> f64 {
        self.error / self.value().norm().max(f64::MIN_POSITIVE)
    }
}

/// Fixed-order pairwise sum.
pub fn pairwise_sum(xs: &[Complex64]) -> Complex64 {
    match xs.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

/// One tanh-sinh node on `[-1, 1]`: abscissa distance to each end and weight.
#[derive(Clone, Copy, Debug)]
pub struct TsNode {
    pub left: f64,
    pub right: f64,
    pub weight: f64,
}

/// Nodes with step `2^{-level}`; distances are measured on `[0, 1]` scale.
pub fn tanh_sinh_nodes(level: u32) -> Vec<TsNode> {
    let h = 0.5f64.powi(level as i32);
    let mut out = Vec::new();
    let mut k: i64 = 0;
    loop {
        let t = k as f64 * h;
        let u = 0.5 * PI * t.sinh();
        // 1 − tanh(u) = 2/(1 + e^{2u})
        let comp = 1.0 / (1.0 + (2.0 * u).exp());
        let w = 0.5 * h * 0.5 * PI * t.cosh() / u.cosh().powi(2);
        if comp < 1e-300 || w < 1e-300 {
            break;
        }
        let near = comp;
        let far = 1.0 - comp;
        if k == 0 {
            out.push(TsNode {
                left: 0.5,
                right: 0.5,
                weight: w,
            });
        } else {
            out.push(TsNode {
                left: far,
                right: near,
                weight: w,
            });
            out.push(TsNode {
                left: near,
                right: far,
                weight: w,
            });
        }
        k += 1;
    }
    out
}

/// `∫_a^b f`, `f(x, x − a, b − x)`.
pub fn tanh_sinh<F>(a: f64, b: f64, level: u32, mut f: F) -> Complex64
where
    F: FnMut(f64, f64, f64) -> Complex64,
{
    let len = b - a;
    let terms: Vec<Complex64> = tanh_sinh_nodes(level)
        .iter()
        .map(|n| {
            let (dl, dr) = (n.left * len, n.right * len);
            let x = if dl < dr { a + dl } else { b - dr };
            f(x, dl, dr) * (n.weight * len)
        })
        .collect();
    pairwise_sum(&terms)
}

struct OouraMori {
    m: f64,
    alpha: f64,
    beta: f64,
}

impl OouraMori {
    fn new(m: f64) -> Self {
        let beta = 0.25;
        let alpha = beta / (1.0 + m * (1.0 + m).ln() / (4.0 * PI)).sqrt();
        OouraMori { m, alpha, beta }
    }

    fn exponent(&self, t: f64) -> (f64, f64) {
        let u = 2.0 * t + self.alpha * (1.0 - (-t).exp()) + self.beta * (t.exp() - 1.0);
        let du = 2.0 + self.alpha * (-t).exp() + self.beta * t.exp();
        (u, du)
    }

    /// φ(t), φ'(t)
    fn phi(&self, t: f64) -> (f64, f64) {
        if t == 0.0 {
            let a = 2.0 + self.alpha + self.beta;
            let b = 0.5 * (self.beta - self.alpha);
            return (1.0 / a, (0.5 * a * a - b) / (a * a));
        }
        let (u, du) = self.exponent(t);
        if u < -700.0 {
            return (0.0, 0.0);
        }
        let e = (-u).exp();
        let d = -(-u).exp_m1();
        (t / d, 1.0 / d - t * e * du / (d * d))
    }

    /// Sum over nodes `t = (k + shift)·h`; `trig` is sin or cos.
    fn sum<F>(&self, omega: f64, shift: f64, trig: fn(f64) -> f64, mut f: F) -> Complex64
    where
        F: FnMut(f64) -> Complex64,
    {
        let h = PI / self.m;
        let scale = self.m / omega;
        let mut node = |t: f64| -> Option<Complex64> {
            let (p, dp) = self.phi(t);
            (dp > 1e-200 && p > 0.0).then(|| f(scale * p) * (trig(self.m * p) * dp))
        };
        // first index with t ≥ 0
        let k0 = (-shift).ceil() as i64;
        let mut terms = Vec::new();
        // negative side: φ' decays double-exponentially
        let mut k = k0 - 1;
        while let Some(v) = node((k as f64 + shift) * h) {
            terms.push(v);
            k -= 1;
        }
        terms.reverse();
        // positive side: trig(Mφ) → 0 double-exponentially
        let mut k = k0;
        loop {
            let t = (k as f64 + shift) * h;
            let (u, _) = self.exponent(t);
            if t > 1.0 && t * (-u).exp() * self.m < 1e-17 {
                break;
            }
            terms.extend(node(t));
            k += 1;
        }
        pairwise_sum(&terms) * (scale * h)
    }
}

/// `∫_0^∞ f(x) cos(ωx) dx` with `M = m`.
pub fn fourier_cos<F>(omega: f64, m: f64, f: F) -> Complex64
where
    F: FnMut(f64) -> Complex64,
{
    OouraMori::new(m).sum(omega, -0.5, f64::cos, f)
}

/// `∫_0^∞ f(x) sin(ωx) dx` with `M = m`.
pub fn fourier_sin<F>(omega: f64, m: f64, f: F) -> Complex64
where
    F: FnMut(f64) -> Complex64,
{
    OouraMori::new(m).sum(omega, 0.0, f64::sin, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn tanh_sinh_endpoint_singular() {
        // ∫_0^1 x^{-0.9} dx = 10
        let v = tanh_sinh(0.0, 1.0, 6, |_, dl, _| c(dl.powf(-0.9)));
        assert!((v.re - 10.0).abs() < 1e-9, "{v}");
        // ∫_0^1 ln x dx = −1
        let v = tanh_sinh(0.0, 1.0, 5, |_, dl, _| c(dl.ln()));
        assert!((v.re + 1.0).abs() < 1e-13);
        // ∫_0^{π/2} cos θ^{-0.5} dθ uses the right distance
        let v = tanh_sinh(0.0, PI / 2.0, 6, |_, _, dr| c(dr.sin().powf(-0.5)));
        // = √π Γ(1/4)/(2Γ(3/4))
        let exact = 2.622_057_554_292_119_8;
        assert!((v.re - exact).abs() < 1e-10, "{v}");
    }

    #[test]
    fn ooura_mori_classics() {
        // ∫_0^∞ cos x/(1+x²) = π/(2e)
        let v = fourier_cos(1.0, 64.0, |x| c(1.0 / (1.0 + x * x)));
        assert!((v.re - PI / (2.0 * 1f64.exp())).abs() < 1e-11, "{v}");
        // ∫_0^∞ sin x / x = π/2
        let v = fourier_sin(1.0, 64.0, |x| c(1.0 / x));
        assert!((v.re - PI / 2.0).abs() < 1e-11, "{v}");
        // ∫_0^∞ x^{-1/2} cos(2πx) = 1/2
        let v = fourier_cos(2.0 * PI, 64.0, |x| c(x.powf(-0.5)));
        assert!((v.re - 0.5).abs() < 1e-9, "{v}");
    }
}
