//! Archimedean side: spherical Whittaker functions of GL3(R) by the Jacquet
//! integral, the kernel `F(r, s)`, and the local integral at large `Re s`.
//!
//! In the Jacquet integral the `x` coordinate is done in closed form: along `x`
//! the section is a power of a quadratic, so `∫ e^{-2πix}(αx²+2βx+γ)^{-μ} dx`
//! is a K-Bessel value (see `special::fourier_power`). The remaining `(y, z)`
//! integral is Ooura–Mori in `y` and, in `z`, either Ooura–Mori (when the
//! induced phase oscillates) or a sinh-mapped trapezoid.

use std::collections::HashMap;
use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::iwasawa::sl3_iwasawa;
use crate::linalg::Mat3;
use crate::par;
use crate::quad::{fourier_cos, fourier_sin, pairwise_sum, Approx};
use crate::special::fourier_power;

type C = Complex64;

fn cr(x: f64) -> C {
    C::new(x, 0.0)
}

/// `x^w` for real `x > 0`.
fn rpow(x: f64, w: C) -> C {
    (w * x.ln()).exp()
}

const RHO: [f64; 3] = [1.0, 0.0, -1.0];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PrincipalSeriesParams {
    pub u: [C; 3],
}

impl PrincipalSeriesParams {
    pub fn new(u: [C; 3]) -> Result<Self> {
        if (u[0] + u[1] + u[2]).norm() > 1e-12 {
            return Err(Error::Config("u must sum to zero".into()));
        }
        Ok(PrincipalSeriesParams { u })
    }

    pub fn real(u1: f64, u2: f64, u3: f64) -> Result<Self> {
        Self::new([cr(u1), cr(u2), cr(u3)])
    }

    pub fn is_dominant(&self) -> bool {
        self.u[0].re > self.u[1].re && self.u[1].re > self.u[2].re
    }

    fn check(&self, spec: &QuadratureSpec) -> Result<()> {
        if self.is_dominant() || spec.allow_nondominant {
            Ok(())
        } else {
            Err(Error::NotDominant(format!("Re u = {:?}", self.u.map(|x| x.re))))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub level: u32,
    /// Ooura–Mori `M` for the outer `y` integral
    pub fourier_m: f64,
    /// Ooura–Mori `M` for the inner `z` integral
    pub inner_m: f64,
    /// trapezoid step in the sinh variable when the inner phase is slow
    pub inner_step: f64,
    /// torus lattice step in `ln t1` and `ln c2`
    pub lattice_step: f64,
    /// `[ln t1 range, ln c2 range]`, `c2 = t1·t2³`
    pub window: [[f64; 2]; 2],
    pub tolerance: f64,
    pub allow_nondominant: bool,
}

impl QuadratureSpec {
    pub fn level(n: u32) -> Self {
        let k = n as f64;
        QuadratureSpec {
            level: n,
            fourier_m: 12.0 * (1.0 + k),
            inner_m: 16.0 * (1.0 + k),
            inner_step: 0.25 / (1.0 + k),
            lattice_step: LN_2 / f64::from(1u32 << n),
            window: [[-7.5, 1.5], [-8.0, 1.5]],
            tolerance: 1e-3,
            allow_nondominant: false,
        }
    }

    pub fn refined(&self) -> Self {
        QuadratureSpec {
            window: self.window,
            tolerance: self.tolerance,
            allow_nondominant: self.allow_nondominant,
            ..Self::level(self.level + 1)
        }
    }

    /// Window radii doubled about the window centre.
    pub fn widened(&self) -> Self {
        let w = self.window.map(|[lo, hi]| {
            let (c, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            [c - 2.0 * r, c + 2.0 * r]
        });
        QuadratureSpec { window: w, ..*self }
    }

    fn lattice_range(&self, axis: usize) -> std::ops::RangeInclusive<i64> {
        let [lo, hi] = self.window[axis];
        let h = self.lattice_step;
        ((lo / h).ceil() as i64)..=((hi / h).floor() as i64)
    }

    pub fn lattice_counts(&self) -> [usize; 2] {
        [0, 1].map(|a| self.lattice_range(a).count())
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::level(0)
    }
}

pub fn long_weyl() -> Mat3 {
    Mat3::from_rows(vec![
        vec![0.0, 0.0, 1.0],
        vec![0.0, -1.0, 0.0],
        vec![1.0, 0.0, 0.0],
    ])
}

/// `f_u(g) = Π a_i^{u_i + ρ_i}` with `g = n·a·k`.
pub fn jacquet_section(g: &Mat3, u: &PrincipalSeriesParams) -> Result<C> {
    let a = sl3_iwasawa(g)?.a;
    Ok((0..3).map(|i| rpow(a[i], u.u[i] + RHO[i])).product())
}

fn unipotent(x: f64, y: f64, z: f64) -> Mat3 {
    Mat3::from_rows(vec![vec![1.0, x, z], vec![0.0, 1.0, y], vec![0.0, 0.0, 1.0]])
}

/// Everything about `diag(a)` and `u` that the inner integrals need.
struct Jacquet {
    a: [f64; 3],
    u: [C; 3],
    mu: C,
    det_pow: C,
    spec: QuadratureSpec,
}

impl Jacquet {
    fn new(a: [f64; 3], u: &PrincipalSeriesParams, spec: &QuadratureSpec) -> Self {
        let u = u.u;
        Jacquet {
            a,
            u,
            mu: (1.0 + u[1] - u[2]) * 0.5,
            det_pow: rpow(a[0] * a[1] * a[2], u[0] + 1.0),
            spec: *spec,
        }
    }

    /// Even part `Φ(z')` of the `x`-integrated section at fixed `y`.
    fn phi(&self, y: f64, zp: f64) -> Result<C> {
        let [a1, a2, a3] = self.a;
        let alpha = a2 * a2 + a3 * a3 * y * y;
        let d2 = (a1 * a1 * a2 * a2 + a1 * a1 * a3 * a3 * y * y + a2 * a2 * a3 * a3 * zp * zp).sqrt();
        let fp = fourier_power(1.0, d2 / alpha, self.mu)?;
        Ok(self.det_pow * rpow(d2, self.u[1] - self.u[0] - 1.0) * rpow(alpha, -self.mu) * fp)
    }

    /// `H(y) = ∫ e^{iκz'} Φ(z') dz'`.
    fn h(&self, y: f64) -> Result<C> {
        let [a1, a2, a3] = self.a;
        let alpha = a2 * a2 + a3 * a3 * y * y;
        let kappa = 2.0 * PI * a3 * a3 * y.abs() / alpha;
        // decay rate of Φ in z' and branch-point distance
        let rate = 2.0 * PI * a2 * a3 / alpha;
        let d = a1 * (a2 * a2 + a3 * a3 * y * y).sqrt() / (a2 * a3);
        let oscillations = kappa * 40.0 / rate / (2.0 * PI);
        if oscillations > 2.0 {
            let mut err = None;
            let v = fourier_cos(kappa, self.spec.inner_m, |z| {
                self.phi(y, z).unwrap_or_else(|e| {
                    err = Some(e);
                    cr(0.0)
                })
            });
            return match err {
                Some(e) => Err(e),
                None => Ok(2.0 * v),
            };
        }
        // z' = d sinh t, even integrand
        let h = self.spec.inner_step;
        let mut terms = Vec::new();
        let mut peak = 0.0f64;
        for k in 0.. {
            let t = k as f64 * h;
            let z = d * t.sinh();
            let v = self.phi(y, z)? * (kappa * z).cos() * (d * t.cosh());
            let w = if k == 0 { 1.0 } else { 2.0 };
            peak = peak.max(v.norm());
            terms.push(v * w);
            if k > 4 && v.norm() < 1e-18 * peak {
                break;
            }
            if k > 20_000 {
                return Err(Error::Unconverged {
                    coarse: "inner cutoff".into(),
                    fine: format!("y = {y}"),
                });
            }
        }
        Ok(pairwise_sum(&terms) * h)
    }

    /// `∫ e^{-2πiy} H(y + r) dy`.
    fn outer(&self, r: f64) -> Result<C> {
        let m = self.spec.fourier_m;
        let mut err = None;
        let mut h = |y: f64| {
            self.h(y).unwrap_or_else(|e| {
                err = Some(e);
                cr(0.0)
            })
        };
        let c = fourier_cos(2.0 * PI, m, |y| h(r + y) + h(r - y));
        let s = fourier_sin(2.0 * PI, m, |y| h(r + y) - h(r - y));
        if let Some(e) = err {
            return Err(e);
        }
        Ok(c - C::new(0.0, 1.0) * s)
    }
}

fn whittaker_raw(a: [f64; 3], u: &PrincipalSeriesParams, n0: [f64; 3], spec: &QuadratureSpec) -> Result<C> {
    if a.iter().any(|x| !(*x > 0.0)) {
        return Err(Error::Domain("torus entries must be positive".into()));
    }
    // W decays like exp(−2π(c1 + c2)); past this it is below 1e-130 and the
    // inner integrals would only overflow
    if a[0] / a[1] > 48.0 || a[1] / a[2] > 48.0 {
        return Ok(cr(0.0));
    }
    let [p, _q, r] = n0;
    let j = Jacquet::new(a, u, spec);
    // x and z shifts are exact relabelings of the closed-form x and full-line z'
    Ok(C::new(0.0, 2.0 * PI * p).exp() * j.outer(r)?)
}

/// `W_u(n0·diag(a))` with `n0 = (1,p,q; 0,1,r; 0,0,1)`; error from one refinement.
pub fn jacquet_whittaker_at(a: [f64; 3], n0: [f64; 3], u: &PrincipalSeriesParams, spec: &QuadratureSpec) -> Result<Approx> {
    u.check(spec)?;
    let coarse = whittaker_raw(a, u, n0, spec)?;
    let fine = whittaker_raw(a, u, n0, &spec.refined())?;
    Ok(Approx::from_pair(coarse, fine))
}

pub fn jacquet_whittaker(a: [f64; 3], u: &PrincipalSeriesParams, spec: &QuadratureSpec) -> Result<Approx> {
    jacquet_whittaker_at(a, [0.0; 3], u, spec)
}

/// `W_u(diag(c1·c2, c2, 1))` at a single quadrature level.
pub fn whittaker_torus(c1: f64, c2: f64, u: &PrincipalSeriesParams, spec: &QuadratureSpec) -> Result<C> {
    u.check(spec)?;
    whittaker_raw([c1 * c2, c2, 1.0], u, [0.0; 3], spec)
}

/// `∫ e^{-2πix} f_u(w0·n(x, y, xy + z')·a) dx` by quadrature through the Iwasawa
/// decomposition; cross-checks the closed form used inside the Whittaker integral.
pub fn x_integral_by_quadrature(a: [f64; 3], y: f64, zp: f64, u: &PrincipalSeriesParams, m: f64) -> Result<C> {
    let w0 = long_weyl();
    let da = Mat3::diagonal(&a);
    let mut err = None;
    let mut f = |x: f64| {
        let g = &(&w0 * &unipotent(x, y, x * y + zp)) * &da;
        jacquet_section(&g, u).unwrap_or_else(|e| {
            err = Some(e);
            cr(0.0)
        })
    };
    let c = fourier_cos(2.0 * PI, m, |x| f(x) + f(-x));
    let s = fourier_sin(2.0 * PI, m, |x| f(x) - f(-x));
    if let Some(e) = err {
        return Err(e);
    }
    Ok(c - C::new(0.0, 1.0) * s)
}

/// Closed form of the same `x` integral.
pub fn x_integral_closed(a: [f64; 3], y: f64, zp: f64, u: &PrincipalSeriesParams) -> Result<C> {
    let j = Jacquet::new(a, u, &QuadratureSpec::default());
    let kappa = 2.0 * PI * a[2] * a[2] * y / (a[1] * a[1] + a[2] * a[2] * y * y);
    Ok(j.phi(y, zp)? * C::new(0.0, kappa * zp).exp())
}

/// GL2 spherical Whittaker function `W(diag(y, 1))` by the one-dimensional
/// Jacquet integral; the section is the GL3 one restricted to `diag(g, 1)`.
pub fn gl2_whittaker(y: f64, u1: C, u2: C, m: f64) -> Result<C> {
    if !(y > 0.0) {
        return Err(Error::Domain("y must be positive".into()));
    }
    if u1.re <= u2.re {
        return Err(Error::NotDominant(format!("Re u1 = {} ≤ Re u2 = {}", u1.re, u2.re)));
    }
    let u = PrincipalSeriesParams::new([u1, u2, -u1 - u2])?;
    let w = Mat3::from_rows(vec![vec![0.0, 1.0, 0.0], vec![-1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]);
    // x = y·w keeps the rule's scale independent of y
    let mut err = None;
    let mut f = |t: f64| {
        let x = y * t;
        let g = Mat3::from_rows(vec![vec![y, x, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
        let v = jacquet_section(&(&w * &g), &u).unwrap_or_else(|e| {
            err = Some(e);
            cr(0.0)
        });
        // ρ_GL2 = (½, −½) differs from ρ_GL3 on diag(g, 1) by det^{-1/2}
        v * y.powf(-0.5)
    };
    let omega = 2.0 * PI * y;
    let c = fourier_cos(omega, m, |t| f(t) + f(-t));
    let s = fourier_sin(omega, m, |t| f(t) - f(-t));
    if let Some(e) = err {
        return Err(e);
    }
    Ok((c - C::new(0.0, 1.0) * s) * y)
}

/// `y^{u1+½−ν}·2π^{ν+½}/Γ(ν+½)·K_ν(2πy)`, `ν = (u1−u2)/2`.
pub fn gl2_whittaker_bessel(y: f64, u1: C, u2: C) -> Result<C> {
    let mu = (u1 - u2) * 0.5 + 0.5;
    Ok(rpow(y, u1 + 0.5 - (mu - 0.5)) * rpow(y, mu - 0.5) * fourier_power(1.0, y, mu)?)
}

/// Relative gap between the GL2 Jacquet quadrature (`M = 4·fourier_m`) and the Bessel
/// closed form at each `y`.
pub fn gl2_oracle_check(u1: C, u2: C, ys: &[f64], spec: &QuadratureSpec) -> Result<Vec<(f64, f64)>> {
    ys.iter()
        .map(|&y| {
            let q = gl2_whittaker(y, u1, u2, 4.0 * spec.fourier_m)?;
            let b = gl2_whittaker_bessel(y, u1, u2)?;
            Ok((y, (q - b).norm() / b.norm()))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FValue {
    pub r: f64,
    pub theta: f64,
    pub s: C,
    pub value: Approx,
    pub quadrature: Approx,
    pub relative_gap: f64,
}

/// `F(r, s) = 3 r^{9s/2} ∫ e^{2πiz}(z² + r⁶)^{-3s/2} dz` in closed form.
pub fn f_kernel_closed(r: f64, s: C) -> Result<C> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("r must be positive, got {r}")));
    }
    Ok(3.0 * rpow(r, s * 4.5) * fourier_power(1.0, r.powi(3), s * 1.5)?)
}

/// Same integral by Ooura–Mori; needs `Re s > 1/3`.
pub fn f_kernel_quadrature(r: f64, s: C, m: f64) -> Result<C> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("r must be positive, got {r}")));
    }
    if s.re <= 1.0 / 3.0 {
        return Err(Error::Divergent("direct F quadrature needs Re s > 1/3".into()));
    }
    let c2 = r.powi(6);
    let e = -1.5 * s;
    let v = fourier_cos(2.0 * PI, m, |z| rpow(z * z + c2, e));
    Ok(6.0 * rpow(r, s * 4.5) * v)
}

/// `θ` only labels the point: for the spherical section the kernel does not see it.
pub fn f_kernel(r: f64, theta: f64, s: C, spec: &QuadratureSpec) -> Result<FValue> {
    let closed = f_kernel_closed(r, s)?;
    let q1 = f_kernel_quadrature(r, s, 2.0 * spec.fourier_m)?;
    let q2 = f_kernel_quadrature(r, s, 3.0 * spec.fourier_m)?;
    let quadrature = Approx::from_pair(q1, q2);
    let gap = (closed - q2).norm();
    Ok(FValue {
        r,
        theta,
        s,
        value: Approx::new(closed, gap.max(quadrature.error)),
        quadrature,
        relative_gap: gap / closed.norm(),
    })
}

/// Ratio quadrature/closed at `(r, s) = (1, 2)`; the closed-form constant is
/// analytic, this is logged as its calibration.
pub fn f_kernel_calibration(spec: &QuadratureSpec) -> Result<f64> {
    let s = cr(2.0);
    Ok((f_kernel_quadrature(1.0, s, 3.0 * spec.fourier_m)? / f_kernel_closed(1.0, s)?).re)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    /// worst relative error estimate of the fitted values
    pub value_error: f64,
    pub conclusive: bool,
}

fn fit_line(points: &[(f64, f64)], residual_tol: f64, value_error: f64) -> SlopeFit {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).abs())
        .fold(0.0, f64::max);
    SlopeFit {
        slope,
        intercept,
        max_residual,
        value_error,
        conclusive: max_residual < residual_tol && value_error < 1e-3,
    }
}

/// log–log slope of `|F(r, s)|` on `r ∈ [r_lo, r_hi]`.
pub fn f_kernel_small_r_slope(s: C, r_lo: f64, r_hi: f64) -> Result<SlopeFit> {
    let pts = (0..9)
        .map(|i| {
            let r = r_lo * (r_hi / r_lo).powf(i as f64 / 8.0);
            Ok((r.ln(), f_kernel_closed(r, s)?.norm().ln()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(fit_line(&pts, 0.05, 0.0))
}

pub fn predicted_small_r_slope(s: C) -> f64 {
    (4.5 * s.re).min(3.0 - 4.5 * s.re)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FitTarget {
    /// `c1 → 0` with `c2 = 1`
    Gl3First,
    /// `c2 → 0` with `c1 = 1`
    Gl3Second,
    /// GL2 `y → 0`
    Gl2,
}

/// Regression of `ln|W|` against the torus coordinate `e^{-x}`, `x ∈ [x0, x0 + 4]`.
pub fn leading_exponent_fit(u: &PrincipalSeriesParams, target: FitTarget, x0: f64, spec: &QuadratureSpec) -> Result<SlopeFit> {
    u.check(spec)?;
    let xs: Vec<f64> = (0..7).map(|i| x0 + 4.0 * i as f64 / 6.0).collect();
    let vals = par::map(&xs, |&x| -> Result<(f64, Approx)> {
        let c = (-x).exp();
        let w = match target {
            FitTarget::Gl3First => jacquet_whittaker([c, 1.0, 1.0], u, spec)?,
            FitTarget::Gl3Second => jacquet_whittaker([c, c, 1.0], u, spec)?,
            FitTarget::Gl2 => {
                let m = 4.0 * spec.fourier_m;
                Approx::from_pair(gl2_whittaker(c, u.u[0], u.u[1], m)?, gl2_whittaker(c, u.u[0], u.u[1], 2.0 * m)?)
            }
        };
        Ok((c.ln(), w))
    });
    let vals = vals.into_iter().collect::<Result<Vec<_>>>()?;
    let value_error = vals.iter().map(|(_, w)| w.relative_error()).fold(0.0, f64::max);
    let pts: Vec<(f64, f64)> = vals.iter().map(|(x, w)| (*x, w.value().norm().ln())).collect();
    Ok(fit_line(&pts, 0.1, value_error))
}

#[derive(Clone, Debug, Serialize)]
pub struct ZReport {
    pub s: C,
    pub psi_scale: f64,
    pub value: Approx,
    pub coarse: C,
    pub fine: C,
    pub widened: C,
    pub refinement_gap: f64,
    pub truncation_change: f64,
    pub lattice_points: usize,
}

/// Torus weight and `z`-integral at `(ln t1, ln c2)`; everything but `W`.
fn z_weight(x1: f64, y2: f64, s: C, psi_scale: f64) -> Result<C> {
    let t1 = x1.exp();
    let t2 = ((y2 - x1) / 3.0).exp();
    let q = 1.0 + t2 * t2;
    let lambda = psi_scale * t1 * q.powf(1.5);
    let inner = fourier_power(lambda, 1.0, s * 1.5)?;
    // z rescaled by t1·q^{3/2}; ψ(c·) only enters through λ
    Ok(rpow(t1, s * 3.0 - 3.0) * rpow(t2, s * 9.0 - 6.0) * rpow(q, 1.5 - 4.5 * s) * inner)
}

fn lattice_sum<W>(whittaker: &W, s: C, psi_scale: f64, spec: &QuadratureSpec, cache: &mut HashMap<(i64, i64), C>) -> Result<C>
where
    W: Fn(f64, f64) -> Result<C> + Sync,
{
    let h = spec.lattice_step;
    let pts: Vec<(i64, i64)> = spec
        .lattice_range(0)
        .flat_map(|i| spec.lattice_range(1).map(move |j| (i, j)))
        .collect();
    let todo: Vec<(i64, i64)> = pts.iter().copied().filter(|p| !cache.contains_key(p)).collect();
    let vals = par::map(&todo, |&(i, j)| -> Result<C> {
        let (x1, y2) = (i as f64 * h, j as f64 * h);
        let w = whittaker(psi_scale * x1.exp(), psi_scale * y2.exp())?;
        Ok(w * z_weight(x1, y2, s, psi_scale)?)
    });
    for (p, v) in todo.into_iter().zip(vals) {
        cache.insert(p, v?);
    }
    let terms: Vec<C> = pts.iter().map(|p| cache[p]).collect();
    // d×t1 d×t2 = d×t1 d×c2 / 3
    Ok(pairwise_sum(&terms) * (h * h / 3.0))
}

/// `Z = ∫∫ W(diag(c1c2, c2, 1))|_{c1 = t1, c2 = t1t2³} t1^{3s−3} t2^{9s−6} (1+t2²)^{3/2−9s/2} I(t1(1+t2²)^{3/2}) d×t1 d×t2`
/// with `I(λ) = ∫ e^{2πiλz}(z²+1)^{-3s/2} dz`, for an arbitrary Whittaker datum
/// `(c1, c2) ↦ W`. The lattice lives in `(ln t1, ln c2)`, where the slow ridge
/// `c2 ≈ 1, t1 → 0` is axis-aligned.
pub fn z_value_with<W, V>(whittaker: W, refined: V, s: C, psi_scale: f64, spec: &QuadratureSpec) -> Result<ZReport>
where
    W: Fn(f64, f64) -> Result<C> + Sync,
    V: Fn(f64, f64) -> Result<C> + Sync,
{
    let mut cache = HashMap::new();
    let coarse = lattice_sum(&whittaker, s, psi_scale, spec, &mut cache)?;
    let widened = lattice_sum(&whittaker, s, psi_scale, &spec.widened(), &mut cache)?;
    let fine_spec = spec.refined();
    let mut fine_cache = HashMap::new();
    let fine = lattice_sum(&refined, s, psi_scale, &fine_spec, &mut fine_cache)?;
    let gap = (fine - coarse).norm() / fine.norm();
    let report = ZReport {
        s,
        psi_scale,
        value: Approx::new(fine, (fine - coarse).norm()),
        coarse,
        fine,
        widened,
        refinement_gap: gap,
        truncation_change: (widened - coarse).norm() / coarse.norm(),
        lattice_points: cache.len() + fine_cache.len(),
    };
    if gap > spec.tolerance {
        return Err(Error::Unconverged {
            coarse: format!("{coarse}"),
            fine: format!("{fine}"),
        });
    }
    Ok(report)
}

pub fn z_value(u: &PrincipalSeriesParams, s: C, spec: &QuadratureSpec) -> Result<ZReport> {
    z_value_psi(u, s, 1.0, spec)
}

/// `ψ` replaced by `ψ(c·)` both in the Whittaker model and in the section integral.
pub fn z_value_psi(u: &PrincipalSeriesParams, s: C, psi_scale: f64, spec: &QuadratureSpec) -> Result<ZReport> {
    u.check(spec)?;
    let fine = spec.refined();
    z_value_with(
        |c1, c2| whittaker_torus(c1, c2, u, spec),
        |c1, c2| whittaker_torus(c1, c2, u, &fine),
        s,
        psi_scale,
        spec,
    )
}
