//! Exact scalars, p-adic valuations and truncated Laurent series in `Y = q^{-s}`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;
pub type ComplexApprox = num_complex::Complex64;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `a`, `-a`, or `a/b`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Config(format!("not a rational number: {text:?}"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

/// Integer power with negative exponents allowed.
pub fn rpow(base: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(base.clone(), e as usize)
    } else {
        num_traits::pow(base.recip(), e.unsigned_abs() as usize)
    }
}

/// `val_p` of a rational; `None` stands for `+∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PValuation {
    pub p: u64,
    pub value: Option<i64>,
}

impl PValuation {
    pub fn finite(p: u64, v: i64) -> Self {
        PValuation { p, value: Some(v) }
    }

    pub fn infinite(p: u64) -> Self {
        PValuation { p, value: None }
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_none()
    }

    pub fn sum(self, other: PValuation) -> PValuation {
        debug_assert_eq!(self.p, other.p);
        let value = match (self.value, other.value) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        PValuation { p: self.p, value }
    }
}

impl PartialOrd for PValuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PValuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.value, other.value) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Greater,
            (Some(_), None) => Ordering::Less,
            (Some(a), Some(b)) => a.cmp(&b),
        }
    }
}

impl fmt::Display for PValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "inf"),
        }
    }
}

fn int_valuation(n: &BigInt, p: &BigInt) -> i64 {
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

pub fn valuation(x: &Rational, p: u64) -> PValuation {
    if x.is_zero() {
        return PValuation::infinite(p);
    }
    let pb = BigInt::from(p);
    PValuation::finite(p, int_valuation(x.numer(), &pb) - int_valuation(x.denom(), &pb))
}

/// Finite valuation, or `None` for zero.
pub fn val(x: &Rational, p: u64) -> Option<i64> {
    valuation(x, p).value
}

/// Laurent series `Σ c_k Y^k` known exactly for `low ≤ k ≤ degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    prime: u64,
    low: i64,
    degree: i64,
    coeffs: Vec<Rational>,
}

impl LaurentSeries {
    /// Coefficients past `degree` are dropped and missing ones are zero.
    pub fn new(prime: u64, low: i64, mut coeffs: Vec<Rational>, degree: i64) -> Result<Self> {
        if degree < low {
            return Err(Error::Config(format!(
                "truncation degree {degree} below lowest exponent {low}"
            )));
        }
        coeffs.resize((degree - low + 1) as usize, Rational::zero());
        Ok(LaurentSeries {
            prime,
            low,
            degree,
            coeffs,
        })
    }

    pub fn zero(prime: u64, degree: i64) -> Self {
        LaurentSeries {
            prime,
            low: 0,
            degree,
            coeffs: vec![Rational::zero(); (degree + 1).max(1) as usize],
        }
    }

    pub fn one(prime: u64, degree: i64) -> Self {
        Self::monomial(prime, Rational::one(), 0, degree)
    }

    /// `c·Y^e`, represented on the window `[min(e,0), degree]`.
    pub fn monomial(prime: u64, c: Rational, e: i64, degree: i64) -> Self {
        let low = e.min(0);
        let mut s = LaurentSeries {
            prime,
            low,
            degree,
            coeffs: vec![Rational::zero(); (degree - low + 1).max(0) as usize],
        };
        if e <= degree {
            s.coeffs[(e - low) as usize] = c;
        }
        s
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn low(&self) -> i64 {
        self.low
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Zero below the window, `None` above the truncation degree.
    pub fn coeff(&self, k: i64) -> Option<Rational> {
        if k > self.degree {
            None
        } else if k < self.low {
            Some(Rational::zero())
        } else {
            Some(self.coeffs[(k - self.low) as usize].clone())
        }
    }

    pub fn lowest_nonzero(&self) -> Option<(i64, Rational)> {
        self.coeffs
            .iter()
            .enumerate()
            .find(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.low + i as i64, c.clone()))
    }

    fn check_prime(&self, other: &Self) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::Config(format!(
                "series over different primes: {} and {}",
                self.prime, other.prime
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        let low = self.low.min(other.low);
        let degree = self.degree.min(other.degree);
        let coeffs = (low..=degree)
            .map(|k| self.coeff(k).unwrap() + other.coeff(k).unwrap())
            .collect();
        LaurentSeries::new(self.prime, low, coeffs, degree)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        LaurentSeries {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            ..self.clone()
        }
    }

    /// Multiplication by `Y^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentSeries {
            low: self.low + k,
            degree: self.degree + k,
            ..self.clone()
        }
    }

    pub fn truncate(&self, degree: i64) -> Self {
        let degree = degree.min(self.degree);
        let coeffs = (self.low..=degree.max(self.low))
            .map(|k| self.coeff(k).unwrap())
            .collect();
        LaurentSeries::new(self.prime, self.low, coeffs, degree.max(self.low)).unwrap()
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        let low = self.low + other.low;
        let degree = (self.degree + other.low).min(other.degree + self.low);
        let n = (degree - low + 1) as usize;
        let mut coeffs = vec![Rational::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n - i) {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        LaurentSeries::new(self.prime, low, coeffs, degree)
    }

    /// Two-sided inverse; the leading stored coefficient must be nonzero.
    pub fn invert(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::SingularSeries);
        }
        let n = self.coeffs.len();
        let inv0 = c0.recip();
        let mut out: Vec<Rational> = Vec::with_capacity(n);
        out.push(inv0.clone());
        for k in 1..n {
            let mut acc = Rational::zero();
            for j in 1..=k {
                let a = &self.coeffs[j];
                if !a.is_zero() {
                    acc += a * &out[k - j];
                }
            }
            out.push(-acc * &inv0);
        }
        LaurentSeries::new(self.prime, -self.low, out, self.degree - 2 * self.low)
    }

    /// Exponents `k ≤ through` where the two series disagree.
    pub fn mismatches(&self, other: &Self, through: i64) -> Vec<i64> {
        let low = self.low.min(other.low);
        (low..=through)
            .filter(|&k| match (self.coeff(k), other.coeff(k)) {
                (Some(a), Some(b)) => a != b,
                _ => true,
            })
            .collect()
    }

    pub fn agrees_through(&self, other: &Self, through: i64) -> bool {
        self.mismatches(other, through).is_empty()
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = self.low + i as i64;
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})Y")?,
                _ => write!(f, "({c})Y^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(Y^{})", self.degree + 1)
    }
}

/// `(1 − c·Y^e)^{-1}` through `Y^degree`.
pub fn euler_factor(prime: u64, c: &Rational, e: i64, degree: i64) -> Result<LaurentSeries> {
    if e <= 0 {
        return Err(Error::Domain(format!("Euler factor exponent must be positive, got {e}")));
    }
    let mut coeffs = vec![Rational::zero(); (degree + 1).max(1) as usize];
    let mut power = Rational::one();
    let mut k = 0;
    while k <= degree {
        coeffs[k as usize] = power.clone();
        power *= c;
        k += e;
    }
    LaurentSeries::new(prime, 0, coeffs, degree.max(0))
}

/// The polynomial `1 − c·Y^e` as a series.
pub fn linear_factor(prime: u64, c: &Rational, e: i64, degree: i64) -> LaurentSeries {
    let mut s = LaurentSeries::one(prime, degree);
    if e <= degree {
        s.coeffs[e as usize] -= c;
    }
    s
}
