//! Quasi-beta integrals
//!
//! ```text
//! ∬ r^{s+a1} (ln r)^{a2} · cos^{s+b1}θ (ln cos θ)^{b2} · sin^{s+c1}θ (ln sin θ)^{c2} dr dθ
//! ```
//!
//! over the unit square, in polar coordinates. The square is the quarter disk plus two
//! wedges (`r ∈ [1, 1/cos θ]` for θ ≤ π/4, `r ∈ [1, 1/sin θ]` above). Radial parts are
//! done in closed form; θ-integrals are pushed into their convergence region by
//! integration by parts, which raises a cos or sin exponent by 2 or drops a log.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::quad::{pairwise_sum, tanh_sinh, Approx};

type C = Complex64;

fn cx(re: f64) -> C {
    C::new(re, 0.0)
}

/// `k·s + c + n`. The integer part is kept apart so shifted copies of one exponent
/// compare equal bit for bit (the pole bookkeeping relies on it).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Affine {
    pub s: i64,
    pub c: C,
    pub n: i64,
}

impl Affine {
    pub fn new(s: i64, c: C) -> Self {
        Affine { s, c, n: 0 }
    }

    pub fn at(&self, s: C) -> C {
        s * self.s as f64 + self.c + self.n as f64
    }

    pub fn plus(self, n: i64) -> Self {
        Affine { n: self.n + n, ..self }
    }

    fn add(self, o: Affine) -> Self {
        Affine {
            s: self.s + o.s,
            c: self.c + o.c,
            n: self.n + o.n,
        }
    }

    fn sub(self, o: Affine) -> Self {
        Affine {
            s: self.s - o.s,
            c: self.c - o.c,
            n: self.n - o.n,
        }
    }

    fn constant(&self) -> C {
        self.c + self.n as f64
    }

    /// Zero of the factor, if it depends on s.
    pub fn root(&self) -> Option<C> {
        (self.s != 0).then(|| -self.constant() / self.s as f64)
    }
}

/// Rational function of s: a numerator polynomial over a product of linear factors.
/// Denominators stay factored so pole locations and orders are read off exactly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Coefficient {
    /// ascending powers of `s − center`
    pub numerator: Vec<C>,
    pub denominator: Vec<Affine>,
    /// Expansion point of the numerator. Near a spurious pole the monomial basis at 0
    /// loses most digits to cancellation, so the rewrite centres at the evaluation point.
    pub center: C,
}

fn poly_mul_linear(p: &[C], f: Affine, center: C) -> Vec<C> {
    let (c0, c1) = (f.at(center), cx(f.s as f64));
    let mut out = vec![C::new(0.0, 0.0); p.len() + 1];
    for (i, &a) in p.iter().enumerate() {
        out[i] += a * c0;
        out[i + 1] += a * c1;
    }
    while out.len() > 1 && out.last() == Some(&C::new(0.0, 0.0)) {
        out.pop();
    }
    out
}

fn multiplicities(fs: &[Affine]) -> Vec<(Affine, usize)> {
    let mut out: Vec<(Affine, usize)> = Vec::new();
    for f in fs {
        match out.iter_mut().find(|(g, _)| g == f) {
            Some((_, m)) => *m += 1,
            None => out.push((*f, 1)),
        }
    }
    out
}

impl Coefficient {
    pub fn constant(x: C) -> Self {
        Coefficient {
            numerator: vec![x],
            denominator: Vec::new(),
            center: C::new(0.0, 0.0),
        }
    }

    /// Same function, numerator re-expanded around `c` (Taylor shift).
    pub fn centered(mut self, c: C) -> Self {
        let d = c - self.center;
        let n = self.numerator.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let hi = self.numerator[j + 1];
                self.numerator[j] += d * hi;
            }
        }
        self.center = c;
        self
    }

    pub fn one() -> Self {
        Coefficient::constant(cx(1.0))
    }

    pub fn scale(mut self, x: C) -> Self {
        self.numerator.iter_mut().for_each(|a| *a *= x);
        self
    }

    pub fn times(mut self, f: Affine) -> Self {
        self.numerator = poly_mul_linear(&self.numerator, f, self.center);
        self
    }

    pub fn over(mut self, f: Affine) -> Result<Self> {
        if f.s == 0 {
            let v = f.constant();
            if v == C::new(0.0, 0.0) {
                return Err(Error::Degenerate(format!(
                    "coefficient denominator {} vanishes identically",
                    v
                )));
            }
            return Ok(self.scale(1.0 / v));
        }
        self.denominator.push(f);
        Ok(self)
    }

    /// Sum over the least common denominator.
    pub fn add(&self, other: &Coefficient) -> Coefficient {
        let shifted;
        let other = if other.center == self.center {
            other
        } else {
            shifted = other.clone().centered(self.center);
            &shifted
        };
        let center = self.center;
        let (ma, mb) = (multiplicities(&self.denominator), multiplicities(&other.denominator));
        let mut lcm = ma.clone();
        for (f, m) in &mb {
            match lcm.iter_mut().find(|(g, _)| g == f) {
                Some((_, k)) => *k = (*k).max(*m),
                None => lcm.push((*f, *m)),
            }
        }
        let lift = |num: &[C], mine: &[(Affine, usize)]| {
            let mut p = num.to_vec();
            for (f, m) in &lcm {
                let have = mine.iter().find(|(g, _)| g == f).map_or(0, |x| x.1);
                for _ in have..*m {
                    p = poly_mul_linear(&p, *f, center);
                }
            }
            p
        };
        let (pa, pb) = (lift(&self.numerator, &ma), lift(&other.numerator, &mb));
        let mut numerator = vec![C::new(0.0, 0.0); pa.len().max(pb.len())];
        for (i, a) in pa.iter().enumerate() {
            numerator[i] += a;
        }
        for (i, b) in pb.iter().enumerate() {
            numerator[i] += b;
        }
        let denominator = lcm
            .into_iter()
            .flat_map(|(f, m)| std::iter::repeat_n(f, m))
            .collect();
        Coefficient {
            numerator,
            denominator,
            center,
        }
    }

    pub fn at(&self, s: C) -> Result<C> {
        let x = s - self.center;
        let num = self.numerator.iter().rev().fold(C::new(0.0, 0.0), |acc, &a| acc * x + a);
        let mut den = cx(1.0);
        for f in &self.denominator {
            let v = f.at(s);
            if v == C::new(0.0, 0.0) {
                return Err(Error::Pole {
                    location: format!("{}", s),
                    order: self.order_of(f) as u32,
                });
            }
            den *= v;
        }
        Ok(num / den)
    }

    fn order_of(&self, f: &Affine) -> usize {
        self.denominator.iter().filter(|g| *g == f).count()
    }
}

/// Integration domain of a term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Arc {
    /// [0, π/2]
    Full,
    /// [0, π/4]
    Left,
    /// [π/4, π/2]
    Right,
}

impl Arc {
    pub fn bounds(self) -> (f64, f64) {
        match self {
            Arc::Full => (0.0, FRAC_PI_2),
            Arc::Left => (0.0, FRAC_PI_4),
            Arc::Right => (FRAC_PI_4, FRAC_PI_2),
        }
    }

    /// Which of (cos, sin) can blow up on the arc.
    fn singular(self) -> (bool, bool) {
        match self {
            Arc::Full => (true, true),
            Arc::Left => (false, true),
            Arc::Right => (true, false),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Region {
    /// quarter disk, θ ∈ [0, π/2], r ∈ [0, 1]
    Disk,
    /// θ ∈ [0, π/4], r ∈ [1, 1/cos θ]
    LeftWedge,
    /// θ ∈ [π/4, π/2], r ∈ [1, 1/sin θ]
    RightWedge,
    /// θ-integral alone; the radial factor is ignored
    Theta(Arc),
    /// θ-integrand evaluated at π/4, no integral
    Boundary,
}

/// `x^{exp} (ln x)^{log}`
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Power {
    pub exp: Affine,
    pub log: u32,
}

impl Power {
    fn eval(&self, s: C, ln_x: f64) -> C {
        let v = (self.exp.at(s) * ln_x).exp();
        if self.log == 0 {
            v
        } else {
            v * ln_x.powi(self.log as i32)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QBParams {
    pub a1: C,
    pub a2: u32,
    pub b1: C,
    pub b2: u32,
    pub c1: C,
    pub c2: u32,
}

impl QBParams {
    /// Exponent shifts affine in one auxiliary parameter: `a1 = a[0] + a[1]·u`, etc.
    pub fn affine_in_u(a: [C; 2], b: [C; 2], c: [C; 2], logs: [u32; 3], u: C) -> Self {
        QBParams {
            a1: a[0] + a[1] * u,
            a2: logs[0],
            b1: b[0] + b[1] * u,
            b2: logs[1],
            c1: c[0] + c[1] * u,
            c2: logs[2],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QBTerm {
    pub region: Region,
    pub radial: Power,
    pub cos: Power,
    pub sin: Power,
    pub coeff: Coefficient,
}

impl QBTerm {
    pub fn new(region: Region, p: &QBParams) -> Self {
        let pw = |c: C, log: u32| Power {
            exp: Affine::new(1, c),
            log,
        };
        QBTerm {
            region,
            radial: pw(p.a1, p.a2),
            cos: pw(p.b1, p.b2),
            sin: pw(p.c1, p.c2),
            coeff: Coefficient::one(),
        }
    }

    /// Multiply the θ-integrand by `cos^k θ sin^m θ`.
    pub fn with_f(mut self, k: i64, m: i64) -> Self {
        self.cos.exp = self.cos.exp.plus(k);
        self.sin.exp = self.sin.exp.plus(m);
        self
    }

    fn arc(&self) -> Option<Arc> {
        match self.region {
            Region::Disk => Some(Arc::Full),
            Region::LeftWedge => Some(Arc::Left),
            Region::RightWedge => Some(Arc::Right),
            Region::Theta(a) => Some(a),
            Region::Boundary => None,
        }
    }

    fn log_total(&self) -> u32 {
        self.cos.log + self.sin.log
    }

    /// (log power, −(Re cos exp + Re sin exp)); every rewrite strictly lowers it.
    pub fn measure(&self, s: C) -> (u32, f64) {
        (self.log_total(), -(self.cos.exp.at(s).re + self.sin.exp.at(s).re))
    }

    fn angular(&self, s: C, t: &Trig) -> C {
        self.cos.eval(s, t.ln_cos) * self.sin.eval(s, t.ln_sin)
    }
}

/// Formal sum of terms.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct QBExpression {
    pub terms: Vec<QBTerm>,
}

impl QBExpression {
    /// The whole unit square: disk plus both wedges.
    pub fn square(p: &QBParams) -> Self {
        QBExpression {
            terms: [Region::Disk, Region::LeftWedge, Region::RightWedge]
                .into_iter()
                .map(|r| QBTerm::new(r, p))
                .collect(),
        }
    }

    pub fn single(t: QBTerm) -> Self {
        QBExpression { terms: vec![t] }
    }
}

/// `∫_0^1 r^{s+a1} (ln r)^{a2} dr = (−1)^{a2} a2! / (s+a1+1)^{a2+1}`.
pub fn radial_closed(a1: C, a2: u32, s: C) -> Result<C> {
    let d = s + a1 + 1.0;
    if d == C::new(0.0, 0.0) {
        return Err(Error::Pole {
            location: format!("{}", -a1 - 1.0),
            order: a2 + 1,
        });
    }
    Ok(cx(sign(a2) * factorial(a2)) / d.powu(a2 + 1))
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn sign(k: u32) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

struct Trig {
    ln_cos: f64,
    ln_sin: f64,
}

/// Logs of cos θ and sin θ from `d0 = θ` and `d1 = π/2 − θ`, each taken from whichever
/// distance keeps it accurate.
fn trig(d0: f64, d1: f64) -> Trig {
    let half = |d: f64| -2.0 * (0.5 * d).sin().powi(2);
    Trig {
        ln_cos: if d1 < d0 { d1.sin().ln() } else { half(d0).ln_1p() },
        ln_sin: if d0 < d1 { d0.sin().ln() } else { half(d1).ln_1p() },
    }
}

fn theta_integral<F>(arc: Arc, level: u32, mut f: F) -> C
where
    F: FnMut(f64, &Trig) -> C,
{
    let (lo, hi) = arc.bounds();
    tanh_sinh(lo, hi, level, |x, dl, dr| {
        let d0 = if lo == 0.0 { dl } else { x };
        let d1 = if hi == FRAC_PI_2 { dr } else { FRAC_PI_2 - x };
        f(x, &trig(d0, d1))
    })
}

fn boundary_value(t: &QBTerm, s: C) -> C {
    // cos π/4 = sin π/4 = 2^{−1/2}
    let l = -0.5 * LN_2;
    t.cos.eval(s, l) * t.sin.eval(s, l)
}

fn check_convergent(t: &QBTerm, s: C) -> Result<()> {
    let bad = |p: &Power, what: &str| -> Result<()> {
        let e = p.exp.at(s);
        if e.re <= -1.0 {
            Err(Error::Divergent(format!("{what} exponent {e} has real part ≤ −1")))
        } else {
            Ok(())
        }
    };
    if t.region == Region::Disk {
        bad(&t.radial, "radial")?;
    }
    if let Some(arc) = t.arc() {
        let (c, sn) = arc.singular();
        if c {
            bad(&t.cos, "cos")?;
        }
        if sn {
            bad(&t.sin, "sin")?;
        }
    }
    Ok(())
}

fn direct_raw(t: &QBTerm, s: C, level: u32) -> C {
    match t.region {
        Region::Boundary => boundary_value(t, s),
        Region::Theta(arc) => theta_integral(arc, level, |_, tr| t.angular(s, tr)),
        Region::Disk => theta_integral(Arc::Full, level, |_, tr| {
            let inner = tanh_sinh(0.0, 1.0, level, |_, dl, dr| {
                let ln_r = if dl < 0.5 { dl.ln() } else { (-dr).ln_1p() };
                t.radial.eval(s, ln_r)
            });
            inner * t.angular(s, tr)
        }),
        Region::LeftWedge | Region::RightWedge => {
            let arc = t.arc().unwrap();
            theta_integral(arc, level, |x, tr| {
                // 1/cos θ − 1 = 2 sin²(θ/2)/cos θ, and the mirror for sin
                let (d, ln_c) = if t.region == Region::LeftWedge {
                    (x, tr.ln_cos)
                } else {
                    (FRAC_PI_2 - x, tr.ln_sin)
                };
                let len = 2.0 * (0.5 * d).sin().powi(2) / ln_c.exp();
                if len == 0.0 {
                    return C::new(0.0, 0.0);
                }
                let inner = tanh_sinh(1.0, 1.0 + len, level, |_, dl, _| t.radial.eval(s, dl.ln_1p()));
                inner * t.angular(s, tr)
            })
        }
    }
}

/// Direct quadrature (nested tanh-sinh over the region); the error is the gap to the
/// next-coarser level.
pub fn qb_direct(t: &QBTerm, s: C, level: u32) -> Result<Approx> {
    check_convergent(t, s)?;
    let k = t.coeff.at(s)?;
    if t.region == Region::Boundary {
        return Ok(Approx::new(k * boundary_value(t, s), 0.0));
    }
    let level = level.max(2);
    let coarse = direct_raw(t, s, level - 1);
    let fine = direct_raw(t, s, level);
    Ok(Approx::from_pair(k * coarse, k * fine))
}

pub fn qb_direct_sum(e: &QBExpression, s: C, level: u32) -> Result<Approx> {
    let parts: Vec<Result<Approx>> = par::map(&e.terms, |t| qb_direct(t, s, level));
    sum_approx(parts)
}

fn sum_approx(parts: Vec<Result<Approx>>) -> Result<Approx> {
    let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
    let vals: Vec<C> = parts.iter().map(Approx::value).collect();
    Ok(Approx::new(pairwise_sum(&vals), parts.iter().map(|a| a.error).sum()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Axis {
    CosRaise,
    SinRaise,
}

/// One integration by parts in θ. The output sums to the input as meromorphic functions
/// of s. Disk terms keep their (separable) radial factor; wedge terms must have the
/// radial integral expanded first.
pub fn ibp_step(t: &QBTerm, axis: Axis) -> Result<QBExpression> {
    let arc = match t.region {
        Region::Disk => Arc::Full,
        Region::Theta(a) => a,
        _ => {
            return Err(Error::Unsupported(format!(
                "integration by parts on a {:?} term",
                t.region
            )))
        }
    };
    let (a, b) = (t.cos.exp, t.sin.exp);
    let (lb, lc) = (t.cos.log, t.sin.log);
    let ab2 = a.add(b).plus(2);
    let mut out = Vec::new();
    let mut push = |cos: (Affine, u32), sin: (Affine, u32), k: Coefficient| {
        out.push(QBTerm {
            region: t.region,
            radial: t.radial,
            cos: Power { exp: cos.0, log: cos.1 },
            sin: Power { exp: sin.0, log: sin.1 },
            coeff: k,
        })
    };
    // boundary term at π/4; both ends vanish on the full arc
    let edge = match (axis, arc) {
        (_, Arc::Full) => 0.0,
        (Axis::CosRaise, Arc::Left) | (Axis::SinRaise, Arc::Right) => -1.0,
        _ => 1.0,
    };
    let base = match axis {
        Axis::CosRaise => t.coeff.clone().over(a.plus(1))?,
        Axis::SinRaise => t.coeff.clone().over(b.plus(1))?,
    };
    let mul = |k: f64| base.clone().scale(cx(k));
    match axis {
        Axis::CosRaise => {
            push((a.plus(2), lb), (b, lc), base.clone().times(ab2));
            if lb > 0 {
                push((a, lb - 1), (b, lc), mul(-(lb as f64)));
                push((a.plus(2), lb - 1), (b, lc), mul(lb as f64));
            }
            if lc > 0 {
                push((a.plus(2), lb), (b, lc - 1), mul(lc as f64));
            }
        }
        Axis::SinRaise => {
            push((a, lb), (b.plus(2), lc), base.clone().times(ab2));
            if lb > 0 {
                push((a, lb - 1), (b.plus(2), lc), mul(lb as f64));
            }
            if lc > 0 {
                push((a, lb), (b, lc - 1), mul(-(lc as f64)));
                push((a, lb), (b.plus(2), lc - 1), mul(lc as f64));
            }
        }
    }
    if edge != 0.0 {
        out.push(QBTerm {
            region: Region::Boundary,
            radial: t.radial,
            cos: Power { exp: a.plus(1), log: lb },
            sin: Power { exp: b.plus(1), log: lc },
            coeff: mul(edge),
        });
    }
    Ok(QBExpression { terms: out })
}

fn theta_only(t: &QBTerm, arc: Arc, cos: Power, sin: Power, coeff: Coefficient) -> QBTerm {
    QBTerm {
        region: Region::Theta(arc),
        radial: t.radial,
        cos,
        sin,
        coeff,
    }
}

/// Radial integrals in closed form: the disk factor directly, the wedges through
/// `∫_1^R r^σ L^k = Σ_j (−1)^j k!/(k−j)! R^{σ+1} (ln R)^{k−j}/(σ+1)^{j+1} − (−1)^k k!/(σ+1)^{k+1}`
/// with `R = 1/cos θ` (or `1/sin θ`).
pub fn split_radial(t: &QBTerm) -> Result<Vec<QBTerm>> {
    let k = t.radial.log;
    let s1 = t.radial.exp.plus(1);
    let over_pow = |c: Coefficient, m: u32| -> Result<Coefficient> {
        (0..m).try_fold(c, |c, _| c.over(s1))
    };
    let kf = factorial(k);
    match t.region {
        Region::Disk => {
            let c = over_pow(t.coeff.clone().scale(cx(sign(k) * kf)), k + 1)?;
            Ok(vec![theta_only(t, Arc::Full, t.cos, t.sin, c)])
        }
        Region::LeftWedge | Region::RightWedge => {
            let left = t.region == Region::LeftWedge;
            let arc = if left { Arc::Left } else { Arc::Right };
            let mut out = Vec::new();
            for j in 0..=k {
                let c = over_pow(t.coeff.clone().scale(cx(sign(k) * kf / factorial(k - j))), j + 1)?;
                let (mut cos, mut sin) = (t.cos, t.sin);
                let p = if left { &mut cos } else { &mut sin };
                p.exp = p.exp.sub(s1);
                p.log += k - j;
                out.push(theta_only(t, arc, cos, sin, c));
            }
            let c = over_pow(t.coeff.clone().scale(cx(-sign(k) * kf)), k + 1)?;
            out.push(theta_only(t, arc, t.cos, t.sin, c));
            Ok(out)
        }
        _ => Ok(vec![t.clone()]),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RewriteOrder {
    CosFirst,
    SinFirst,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QbOptions {
    pub level: u32,
    /// terminal θ-integrands need exponent real parts above this
    pub strip: f64,
    pub order: RewriteOrder,
    pub budget: Option<usize>,
}

impl Default for QbOptions {
    fn default() -> Self {
        QbOptions {
            level: 6,
            strip: 0.0,
            order: RewriteOrder::CosFirst,
            budget: None,
        }
    }
}

fn needed_axis(t: &QBTerm, s: C, opts: &QbOptions) -> Option<Axis> {
    let arc = t.arc()?;
    let (cs, ss) = arc.singular();
    let cos = cs && t.cos.exp.at(s).re <= opts.strip;
    let sin = ss && t.sin.exp.at(s).re <= opts.strip;
    match (cos, sin, opts.order) {
        (true, true, RewriteOrder::CosFirst) | (true, false, _) => Some(Axis::CosRaise),
        (true, true, RewriteOrder::SinFirst) | (false, true, _) => Some(Axis::SinRaise),
        (false, false, _) => None,
    }
}

fn default_budget(e: &QBExpression, s: C, strip: f64) -> usize {
    let mut dist = 0.0f64;
    let mut logs = 0u32;
    for t in &e.terms {
        for p in [&t.cos, &t.sin] {
            dist = dist.max(strip - p.exp.at(s).re);
        }
        logs = logs.max(t.log_total() + t.radial.log);
    }
    let d = (dist.max(0.0) / 2.0).ceil() as usize + logs as usize + 1;
    1000 * d * d
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Key {
    log_desc: std::cmp::Reverse<u32>,
    shift: i64,
    family: usize,
    cos_n: i64,
    sin_n: i64,
    cos_log: u32,
    sin_log: u32,
}

/// Rewrite until every θ-integral converges comfortably at `s` (real part is all that
/// matters). Like terms are merged, and processed in an order where each one has received
/// all its contributions first.
pub fn expand(e: &QBExpression, s: C, opts: &QbOptions) -> Result<Vec<QBTerm>> {
    let budget = opts.budget.unwrap_or_else(|| default_budget(e, s, opts.strip));
    let mut families: Vec<(Region, i64, C, i64, C)> = Vec::new();
    let mut pending: BTreeMap<Key, QBTerm> = BTreeMap::new();
    let mut terminal = Vec::new();

    let mut insert = |t: QBTerm, pending: &mut BTreeMap<Key, QBTerm>| {
        let fam = (t.region, t.cos.exp.s, t.cos.exp.c, t.sin.exp.s, t.sin.exp.c);
        let family = match families.iter().position(|f| *f == fam) {
            Some(i) => i,
            None => {
                families.push(fam);
                families.len() - 1
            }
        };
        let key = Key {
            log_desc: std::cmp::Reverse(t.log_total()),
            shift: t.cos.exp.n + t.sin.exp.n,
            family,
            cos_n: t.cos.exp.n,
            sin_n: t.sin.exp.n,
            cos_log: t.cos.log,
            sin_log: t.sin.log,
        };
        match pending.get_mut(&key) {
            Some(old) => old.coeff = old.coeff.add(&t.coeff),
            None => {
                pending.insert(key, t);
            }
        }
    };

    for t in &e.terms {
        for mut u in split_radial(t)? {
            u.coeff = u.coeff.centered(s);
            match u.region {
                Region::Boundary => terminal.push(u),
                _ => insert(u, &mut pending),
            }
        }
    }
    let mut steps = 0usize;
    while let Some((_, t)) = pending.pop_first() {
        let Some(axis) = needed_axis(&t, s, opts) else {
            terminal.push(t);
            continue;
        };
        steps += 1;
        if steps > budget {
            return Err(Error::Budget(budget));
        }
        let m = t.measure(s);
        for u in ibp_step(&t, axis)?.terms {
            if u.region == Region::Boundary {
                terminal.push(u);
                continue;
            }
            let mu = u.measure(s);
            assert!(
                mu.0 < m.0 || (mu.0 == m.0 && mu.1 < m.1),
                "rewrite did not lower the termination measure"
            );
            insert(u, &mut pending);
        }
    }
    Ok(terminal)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PolePrediction {
    pub location: C,
    pub order: u32,
}

/// Rectangle in the s-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Window {
    pub re: [f64; 2],
    pub im: [f64; 2],
}

impl Window {
    pub fn contains(&self, z: C) -> bool {
        (self.re[0]..=self.re[1]).contains(&z.re) && (self.im[0]..=self.im[1]).contains(&z.im)
    }

    pub fn is_empty(&self) -> bool {
        self.re[0] > self.re[1] || self.im[0] > self.im[1]
    }
}

fn collect_poles(terms: &[QBTerm], keep: impl Fn(C) -> bool) -> Vec<PolePrediction> {
    let mut out: Vec<PolePrediction> = Vec::new();
    for t in terms {
        for (f, m) in multiplicities(&t.coeff.denominator) {
            let Some(z) = f.root() else { continue };
            if !keep(z) {
                continue;
            }
            match out.iter_mut().find(|p| (p.location - z).norm() < 1e-12) {
                Some(p) => p.order = p.order.max(m as u32),
                None => out.push(PolePrediction {
                    location: z,
                    order: m as u32,
                }),
            }
        }
    }
    out.sort_by(|a, b| a.location.re.total_cmp(&b.location.re).then(a.location.im.total_cmp(&b.location.im)));
    out
}

/// Candidate poles in the window with their largest possible order, read off the
/// denominators of the rewritten form (the rewrite is done for the window's left edge).
pub fn pole_predictions(e: &QBExpression, window: Window, opts: &QbOptions) -> Result<Vec<PolePrediction>> {
    if window.is_empty() {
        return Ok(Vec::new());
    }
    let terms = expand(e, cx(window.re[0]), opts)?;
    Ok(collect_poles(&terms, |z| window.contains(z)))
}

/// Meromorphic continuation: rewrite, then evaluate the terminal θ-integrals.
pub fn qb_continue(e: &QBExpression, s: C, opts: &QbOptions) -> Result<Approx> {
    let terms = expand(e, s, opts)?;
    if let Some(p) = collect_poles(&terms, |z| (z - s).norm() < 1e-6).first() {
        return Err(Error::Pole {
            location: format!("{}", p.location),
            order: p.order,
        });
    }
    let parts = par::map(&terms, |t| -> Result<Approx> {
        let k = t.coeff.at(s)?;
        match t.region {
            Region::Boundary => Ok(Approx::new(k * boundary_value(t, s), 0.0)),
            Region::Theta(arc) => {
                let level = opts.level.max(2);
                let f = |l| theta_integral(arc, l, |_, tr| t.angular(s, tr));
                Ok(Approx::from_pair(k * f(level - 1), k * f(level)))
            }
            _ => unreachable!("expand leaves only θ and boundary terms"),
        }
    });
    sum_approx(parts)
}

/// Pole check at `s = −a1 − 1`: `(s−s0)^{a2+1}·value` should stay flat as the circle
/// shrinks, while `(s−s0)^{a2}·value` should roughly double when the radius halves.
#[derive(Clone, Debug, Serialize)]
pub struct PoleCheck {
    pub location: C,
    pub order: u32,
    pub radius: f64,
    /// max |(s−s0)^{order}·V| on radius ρ over the same at ρ/2
    pub bounded_ratio: f64,
    /// same with order − 1, at ρ/2 over ρ
    pub growth_ratio: f64,
    pub pass: bool,
}

pub fn check_pole(e: &QBExpression, a1: C, a2: u32, radius: f64, opts: &QbOptions) -> Result<PoleCheck> {
    let s0 = -a1 - 1.0;
    let order = a2 + 1;
    let max_on = |rho: f64, k: u32| -> Result<f64> {
        let pts: Vec<C> = (0..12)
            .map(|i| s0 + C::from_polar(rho, (i as f64 + 0.5) * std::f64::consts::TAU / 12.0))
            .collect();
        let vals = pts
            .iter()
            .map(|&s| Ok(((s - s0).powu(k) * qb_continue(e, s, opts)?.value()).norm()))
            .collect::<Result<Vec<f64>>>()?;
        Ok(vals.into_iter().fold(0.0, f64::max))
    };
    let (big, small) = (max_on(radius, order)?, max_on(radius / 2.0, order)?);
    let (big1, small1) = (max_on(radius, order - 1)?, max_on(radius / 2.0, order - 1)?);
    let bounded_ratio = big / small;
    let growth_ratio = small1 / big1;
    Ok(PoleCheck {
        location: s0,
        order,
        radius,
        bounded_ratio,
        growth_ratio,
        pass: (0.8..1.25).contains(&bounded_ratio) && growth_ratio > 1.6,
    })
}
