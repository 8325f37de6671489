//! Complex Gamma and the modified Bessel function `K_ν(x)` for real `x > 0`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

// Lanczos g = 7, n = 9
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // reflection; branch of log is irrelevant once exponentiated
        let pi = Complex64::new(PI, 0.0);
        return pi.ln() - (pi * z).sin().ln() - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

pub fn gamma(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Err(Error::Pole {
            location: format!("{}", z.re),
            order: 1,
        });
    }
    Ok(ln_gamma(z).exp())
}

pub fn recip_gamma(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    (-ln_gamma(z)).exp()
}

/// `K_ν(x) = ∫_0^∞ e^{−x cosh t} cosh(νt) dt`, trapezoid in `t`.
///
/// The integrand is entire and double-exponentially decaying, so a fixed step is
/// enough; the cutoff is where `x cosh t` passes 745 + |Re ν|·t.
pub fn bessel_k(nu: Complex64, x: f64) -> Result<Complex64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("K_ν needs x > 0, got {x}")));
    }
    // trapezoid error ~ exp(−π²/h), and the peak at t = 0 has width x^{-1/2}
    let h = (0.75 / x.sqrt()).min(0.25);
    let a = nu.re.abs();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut k = 0usize;
    loop {
        let t = k as f64 * h;
        let e = -x * t.cosh();
        // log of the magnitude of the term
        if e + a * t < -745.0 + a.max(1.0).ln() && k > 0 {
            break;
        }
        let term = (Complex64::new(e, 0.0) + nu * t).exp() + (Complex64::new(e, 0.0) - nu * t).exp();
        let w = if k == 0 { 0.25 } else { 0.5 };
        sum += term * w;
        k += 1;
        if k > 200_000 {
            return Err(Error::Domain("K_ν cutoff not reached".into()));
        }
    }
    Ok(sum * h)
}

/// `∫_R e^{2πiλz} (z² + c²)^{−μ} dz = 2 π^μ |λ|^{μ−½} c^{½−μ} K_{μ−½}(2π|λ|c) / Γ(μ)`.
pub fn fourier_power(lambda: f64, c: f64, mu: Complex64) -> Result<Complex64> {
    if !(c > 0.0) {
        return Err(Error::Domain("fourier_power needs c > 0".into()));
    }
    let l = lambda.abs();
    if l == 0.0 {
        if mu.re <= 0.5 {
            return Err(Error::Divergent("zero-frequency integral with Re μ ≤ 1/2".into()));
        }
        // ∫ (z²+c²)^{−μ} = √π c^{1−2μ} Γ(μ−½)/Γ(μ)
        let g = (ln_gamma(mu - 0.5) - ln_gamma(mu)).exp();
        return Ok(PI.sqrt() * (Complex64::new(c.ln(), 0.0) * (1.0 - 2.0 * mu)).exp() * g);
    }
    let nu = mu - 0.5;
    let k = bessel_k(nu, 2.0 * PI * l * c)?;
    let log_pref = mu * PI.ln() + nu * (l.ln() - c.ln());
    Ok(2.0 * log_pref.exp() * k * recip_gamma(mu))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn gamma_values() {
        assert!((gamma(c(5.0)).unwrap().re - 24.0).abs() < 1e-12);
        assert!((gamma(c(0.5)).unwrap().re - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(c(-0.5)).unwrap().re + 2.0 * PI.sqrt()).abs() < 1e-13);
        assert!(gamma(c(-2.0)).is_err());
        // Γ(1+i)Γ(1−i) = π/sinh π
        let i = Complex64::new(1.0, 1.0);
        let p = gamma(i).unwrap() * gamma(i.conj()).unwrap();
        assert!((p.re - PI / PI.sinh()).abs() < 1e-14 && p.im.abs() < 1e-14);
    }

    #[test]
    fn bessel_values() {
        // K_{1/2}(x) = sqrt(π/2x) e^{−x}
        for x in [0.01, 0.3, 1.0, 7.5, 40.0] {
            let exact = (PI / (2.0 * x)).sqrt() * (-x).exp();
            let k = bessel_k(c(0.5), x).unwrap();
            assert!((k.re / exact - 1.0).abs() < 1e-13, "x={x}");
        }
        assert!((bessel_k(c(0.0), 1.0).unwrap().re - 0.421_024_438_240_708_3).abs() < 1e-15);
        assert!((bessel_k(c(1.0), 2.0).unwrap().re - 0.139_865_881_816_522_4).abs() < 1e-15);
        // K_{3/2}(x) = K_{1/2}(x)(1 + 1/x)
        let x = 0.8;
        let k32 = bessel_k(c(1.5), x).unwrap().re;
        assert!((k32 / ((PI / (2.0 * x)).sqrt() * (-x).exp() * (1.0 + 1.0 / x)) - 1.0).abs() < 1e-13);
        assert!(bessel_k(c(1.0), 0.0).is_err());
    }

    #[test]
    fn bessel_complex_order_is_even() {
        let nu = Complex64::new(0.3, 1.2);
        let a = bessel_k(nu, 0.9).unwrap();
        let b = bessel_k(-nu, 0.9).unwrap();
        assert!((a - b).norm() < 1e-15);
    }
}
