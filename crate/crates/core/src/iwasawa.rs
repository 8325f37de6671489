//! SL3 Iwasawa factors, the highest-root character `|ϖ2(a(g))|` on G2, and
//! the conjugation identities behind the reduction of the local integral.

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::g2core::{
    embed_sl3, embed_sl3_with, gamma_element, gram, homomorphic_embedding_signs, in_parabolic_p,
    is_in_k, one_param, torus, weyl_rep, AdjointElement, EmbeddingSigns, ExactElement, RealElement,
    ALPHA_BETA, BETA,
};
use crate::linalg::{Mat3, Matrix, Scalar};
use crate::numkernel::{int, rat, rational_to_f64, val, Rational};

/// `g = n·a·k` with `n` upper unipotent, `a` positive diagonal, `k` orthogonal.
#[derive(Clone, Debug)]
pub struct IwasawaFactorsSL3 {
    pub n: Mat3,
    pub a: [f64; 3],
    pub k: Mat3,
}

impl IwasawaFactorsSL3 {
    pub fn reconstruct(&self) -> Mat3 {
        let a = Mat3::diagonal(&self.a);
        &(&self.n * &a) * &self.k
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gram–Schmidt on the rows, bottom row first, with reorthogonalization.
pub fn sl3_iwasawa(g: &Mat3) -> Result<IwasawaFactorsSL3> {
    if g.rows() != 3 || g.cols() != 3 {
        return Err(Error::Domain("expected a 3x3 matrix".into()));
    }
    let scale = g.max_abs();
    let mut k_rows: Vec<Vec<f64>> = vec![Vec::new(); 3];
    let mut r = Mat3::zeros(3, 3);
    for i in (0..3).rev() {
        let mut v = g.row(i).to_vec();
        // project twice; one pass loses orthogonality like cond(g)·ε
        for _ in 0..2 {
            for j in i + 1..3 {
                let c = dot(&v, &k_rows[j]);
                r[(i, j)] += c;
                for (x, q) in v.iter_mut().zip(&k_rows[j]) {
                    *x -= c * q;
                }
            }
        }
        let norm = dot(&v, &v).sqrt();
        if !(norm > 1e-300 && norm > 1e-14 * scale) {
            return Err(Error::Domain("singular matrix in Iwasawa decomposition".into()));
        }
        r[(i, i)] = norm;
        k_rows[i] = v.iter().map(|x| x / norm).collect();
    }
    let a = [r[(0, 0)], r[(1, 1)], r[(2, 2)]];
    let mut n = Mat3::identity(3);
    for i in 0..3 {
        for j in i + 1..3 {
            n[(i, j)] = r[(i, j)] / a[j];
        }
    }
    Ok(IwasawaFactorsSL3 {
        n,
        a,
        k: Mat3::from_rows(k_rows),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Place {
    Archimedean,
    PAdic(u64),
}

/// `|ϖ2(a(g))|` for `g = n·a·k`.
#[derive(Clone, Debug, PartialEq)]
pub enum SectionValue {
    Real { base: f64 },
    /// Exact archimedean value, stored as its square.
    ExactSquare { base_sq: Rational },
    /// `|ϖ2(a(g))| = p^{-valuation}`.
    PAdic { p: u64, valuation: i64 },
}

impl SectionValue {
    pub fn base(&self) -> f64 {
        match self {
            SectionValue::Real { base } => *base,
            SectionValue::ExactSquare { base_sq } => rational_to_f64(base_sq).sqrt(),
            SectionValue::PAdic { p, valuation } => (*p as f64).powi(-*valuation as i32),
        }
    }

    /// `f_s = |ϖ2(a(g))|^{3s}`.
    pub fn f_s(&self, s: Complex64) -> Complex64 {
        match self {
            SectionValue::PAdic { p, valuation } => {
                (-3.0 * s * (*valuation as f64) * (*p as f64).ln()).exp()
            }
            _ => (3.0 * s * self.base().ln()).exp(),
        }
    }
}

const LOWEST: usize = 6 + 5;

/// Lowest-root row `λ∘Ad(g)` read against the dual Gram norm or the p-adic max norm.
pub fn phi2_norm(g: &ExactElement, place: Place) -> Result<SectionValue> {
    let row = g.matrix().row(LOWEST);
    if row.iter().all(Zero::is_zero) {
        return Err(Error::Domain("element is not invertible".into()));
    }
    match place {
        Place::Archimedean => {
            let ginv = &gram().inverse;
            let r2 = ginv.vec_mul(row);
            let norm_sq: Rational = r2.iter().zip(row).map(|(a, b)| a * b).sum();
            let base_sq = &ginv[(LOWEST, LOWEST)] / norm_sq;
            Ok(SectionValue::ExactSquare { base_sq })
        }
        Place::PAdic(p) => {
            let min = row.iter().filter_map(|x| val(x, p)).min().unwrap();
            Ok(SectionValue::PAdic { p, valuation: -min })
        }
    }
}

pub fn phi2_norm_real(g: &RealElement) -> Result<SectionValue> {
    let row = g.matrix().row(LOWEST);
    let ginv = gram().inverse.map(f64::from_rational);
    let norm_sq = dot(&ginv.vec_mul(row), row);
    if !(norm_sq > 0.0) {
        return Err(Error::Domain("element is not invertible".into()));
    }
    Ok(SectionValue::Real {
        base: (ginv[(LOWEST, LOWEST)] / norm_sq).sqrt(),
    })
}

/// `f_s(g) = |ϖ2(a(g))|^{3s}`; the exponent is applied through [`SectionValue::f_s`].
pub fn spherical_section(g: &ExactElement, place: Place) -> Result<SectionValue> {
    phi2_norm(g, place)
}

/// Embedded `diag(t1, t2, 1/(t1 t2))`.
fn torus3<T: Scalar>(d: [T; 3]) -> AdjointElement<T> {
    let [a, b, _] = d;
    torus(a, b)
}

fn upper_unipotent_z<T: Scalar>(signs: &EmbeddingSigns, z: T) -> AdjointElement<T> {
    crate::g2core::embed_elementary(signs, 0, 1, z)
}

fn simple_conjugation_sides(
    signs: &EmbeddingSigns,
    z: &Rational,
    t1: &Rational,
    t2: &Rational,
) -> (ExactElement, ExactElement) {
    let t3 = (t1 * t2 * t2).recip();
    let lhs = AdjointElement::product([
        &gamma_element(),
        &upper_unipotent_z(signs, z.clone()),
        &torus3([t1 * t2, t2.clone(), t3.clone()]),
    ]);
    let rhs = AdjointElement::product([
        &torus3([t2.clone(), t1 * t2, t3]),
        &one_param(-BETA, -(z / t1)),
        &one_param(-ALPHA_BETA, -t2.clone()),
        &weyl_rep(BETA).unwrap(),
    ]);
    (lhs, rhs)
}

/// `γ·u(z)·diag(t1t2, t2, ·) = diag(t2, t1t2, ·)·x_{−β}(−z/t1)·x_{−(α+β)}(−t2)·w_β`, exactly.
pub fn verify_simple_conjugation(z: &Rational, t1: &Rational, t2: &Rational) -> Result<bool> {
    check_nonzero(t1, t2)?;
    let (lhs, rhs) = simple_conjugation_sides(&crate::g2core::embedding_signs(), z, t1, t2);
    Ok(lhs == rhs)
}

/// Same identity with the last torus parameter perturbed; used as a negative control.
pub fn verify_simple_conjugation_perturbed(z: &Rational, t1: &Rational, t2: &Rational) -> Result<bool> {
    check_nonzero(t1, t2)?;
    let signs = crate::g2core::embedding_signs();
    let (lhs, _) = simple_conjugation_sides(&signs, z, t1, t2);
    let (_, rhs) = simple_conjugation_sides(&signs, z, t1, &(t2 * int(2)));
    Ok(lhs == rhs)
}

fn check_nonzero(t1: &Rational, t2: &Rational) -> Result<()> {
    if t1.is_zero() || t2.is_zero() {
        return Err(Error::Domain("torus parameters must be nonzero".into()));
    }
    Ok(())
}

/// Membership of `γ·h·γ⁻¹` in P for `h` the embedded `n2(x,z)·diag(a,1,1/a)`.
pub(crate) fn hgamma_member_with(signs: &EmbeddingSigns, x: &Rational, z: &Rational, a: &Rational) -> bool {
    let h = Matrix::from_rows(vec![
        vec![a.clone(), x.clone(), z / a],
        vec![int(0), int(1), -(x / a)],
        vec![int(0), int(0), a.recip()],
    ]);
    let emb = embed_sl3_with(signs, &h).expect("determinant one");
    let g: ExactElement = gamma_element();
    let conj = AdjointElement::product([&g, &emb, &g.inverse().unwrap()]);
    in_parabolic_p(&conj)
}

/// Picks the homomorphic sign choice under which both the simple conjugation
/// identity and the stabilizer description of `SL3 ∩ γ⁻¹Pγ` hold.
pub fn resolve_embedding_signs() -> Result<EmbeddingSigns> {
    let samples = [
        (rat(2, 3), rat(5, 7), rat(-3, 2)),
        (rat(-4, 1), rat(1, 3), rat(7, 5)),
    ];
    let candidates = homomorphic_embedding_signs();
    candidates
        .into_iter()
        .find(|signs| {
            samples.iter().all(|(z, t1, t2)| {
                let (lhs, rhs) = simple_conjugation_sides(signs, z, t1, t2);
                lhs == rhs && hgamma_member_with(signs, t1, z, t2)
            })
        })
        .ok_or_else(|| {
            Error::Construction("no embedding sign choice satisfies the conjugation identities".into())
        })
}

/// Outcome of the two compact-residual checks and the scalar identity.
#[derive(Clone, Debug, Serialize)]
pub struct CompactResidualReport {
    pub z: f64,
    pub t1: f64,
    pub t2: f64,
    pub s: f64,
    pub k_prime_residual: f64,
    pub k_prime_in_k: bool,
    pub k_double_prime_residual: f64,
    pub k_double_prime_in_k: bool,
    pub scalar_error_plus: f64,
    pub scalar_error_minus: f64,
    /// `+1` if `k''(+t1⁻¹z/(1+t2²)^{3/2})` makes the identity hold, `−1` for the other sign.
    pub sign_that_holds: i64,
    pub max_error: f64,
    pub pass: bool,
}

fn gram_residual(g: &RealElement) -> f64 {
    let gm = gram().g.map(f64::from_rational);
    let m = g.matrix();
    let lhs = &(&m.transpose() * &gm) * m;
    lhs.max_abs_diff(&gm) / gm.max_abs()
}

/// `k'(t) = [diag((1+t²)^{-1}, (1+t²)^{1/2}, (1+t²)^{1/2})·x_{α+β}(−t)]⁻¹·x_{−(α+β)}(−t)`.
pub fn k_prime(t: f64) -> Result<RealElement> {
    let c = 1.0 + t * t;
    let h = torus(1.0 / c, c.sqrt());
    let head = h.mul(&one_param(ALPHA_BETA, -t));
    Ok(head.inverse()?.mul(&one_param(-ALPHA_BETA, -t)))
}

/// `k''(z) = [diag((1+z²)^{-1/2}, (1+z²)^{1/2}, 1)·x_β(−z)]⁻¹·x_{−β}(−z)`.
pub fn k_double_prime(z: f64) -> Result<RealElement> {
    let c = (1.0 + z * z).sqrt();
    let head = torus(1.0 / c, c).mul(&one_param(BETA, -z));
    Ok(head.inverse()?.mul(&one_param(-BETA, -z)))
}

/// Residual compactness of `k'`, `k''` and the two-sided scalar identity at real `s`,
/// with `g` an arbitrary real group element on the right.
pub fn verify_compact_residuals(z: f64, t1: f64, t2: f64, s: f64, g: &RealElement, tol: f64) -> Result<CompactResidualReport> {
    if t1 == 0.0 || t2 == 0.0 {
        return Err(Error::Domain("torus parameters must be nonzero".into()));
    }
    let kp = k_prime(t2)?;
    let kpp = k_double_prime(z)?;
    let k_prime_residual = gram_residual(&kp);
    let k_double_prime_residual = gram_residual(&kpp);

    let signs = crate::g2core::embedding_signs();
    let t3 = 1.0 / (t1 * t2 * t2);
    let lhs_elem = AdjointElement::product([
        &gamma_element::<f64>(),
        &upper_unipotent_z(&signs, z),
        &torus3([t1 * t2, t2, t3]),
        g,
    ]);
    let lhs = phi2_norm_real(&lhs_elem)?.base();
    let c = 1.0 + t2 * t2;
    let w = z / (t1 * c.powf(1.5));
    let prefactor = (t1 * t2.powi(3)).abs() * ((z / t1).powi(2) + c.powi(3)).powf(-0.5);
    let wb: RealElement = weyl_rep(BETA)?;
    let rhs_for = |sign: f64| -> Result<f64> {
        let elem = AdjointElement::product([&k_double_prime(sign * w)?, &kp, &wb, g]);
        Ok(prefactor * phi2_norm_real(&elem)?.base())
    };
    let rel = |rhs: f64| ((3.0 * s * (rhs / lhs).ln()).exp() - 1.0).abs();
    let scalar_error_plus = rel(rhs_for(1.0)?);
    let scalar_error_minus = rel(rhs_for(-1.0)?);
    let sign_that_holds = if scalar_error_plus <= scalar_error_minus { 1 } else { -1 };
    let best = scalar_error_plus.min(scalar_error_minus);
    let k_prime_in_k = k_prime_residual <= tol;
    let k_double_prime_in_k = k_double_prime_residual <= tol;
    let max_error = k_prime_residual.max(k_double_prime_residual).max(best);
    Ok(CompactResidualReport {
        z,
        t1,
        t2,
        s,
        k_prime_residual,
        k_prime_in_k,
        k_double_prime_residual,
        k_double_prime_in_k,
        scalar_error_plus,
        scalar_error_minus,
        sign_that_holds,
        max_error,
        pass: k_prime_in_k && k_double_prime_in_k && best <= tol,
    })
}

/// Embedded real SL3 element.
pub fn embed_real(g: &Mat3) -> Result<RealElement> {
    embed_sl3(g)
}

pub fn is_in_k_real(g: &RealElement, tol: f64) -> bool {
    is_in_k(g, tol)
}

pub fn identity_section() -> SectionValue {
    SectionValue::ExactSquare {
        base_sq: Rational::one(),
    }
}
