//! Orbit data for `P\G2/SL3` and the stabilizer `H_γ = SL3 ∩ γ⁻¹Pγ`.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::g2core::{embed_sl3, gamma_element, in_parabolic_p, AdjointElement, ExactElement};
use crate::linalg::Matrix;
use crate::numkernel::{int, Rational};

pub type Mat3Q = Matrix<Rational>;

fn m3(rows: [[i64; 3]; 3]) -> Mat3Q {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
}

#[derive(Clone, Debug)]
pub struct OrbitDatum {
    pub label: String,
    pub matrix: Mat3Q,
}

/// The six signed permutation matrices `w_1..w_6`.
pub fn weyl_elements() -> Vec<OrbitDatum> {
    let ws = [
        [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        [[1, 0, 0], [0, 0, 1], [0, -1, 0]],
        [[0, 1, 0], [-1, 0, 0], [0, 0, 1]],
        [[0, 1, 0], [0, 0, 1], [1, 0, 0]],
        [[0, 0, 1], [1, 0, 0], [0, 1, 0]],
        [[0, 0, 1], [0, 1, 0], [-1, 0, 0]],
    ];
    ws.iter()
        .enumerate()
        .map(|(i, w)| OrbitDatum {
            label: format!("w_{}", i + 1),
            matrix: m3(*w),
        })
        .collect()
}

fn upper_shift() -> Mat3Q {
    m3([[1, 1, 0], [0, 1, 0], [0, 0, 1]])
}

/// `y_j = w_j·(I + E12)`.
pub fn y_representatives() -> Vec<OrbitDatum> {
    weyl_elements()
        .into_iter()
        .enumerate()
        .map(|(i, w)| OrbitDatum {
            label: format!("y_{}", i + 1),
            matrix: &w.matrix * &upper_shift(),
        })
        .collect()
}

fn conj_by_gamma(g: &ExactElement) -> ExactElement {
    let gamma = gamma_element::<Rational>();
    let inv = gamma.inverse().expect("γ is invertible");
    AdjointElement::product([&gamma, g, &inv])
}

pub fn verify_gamma_not_in_p() -> bool {
    !in_parabolic_p(&gamma_element())
}

/// `γ·g·γ⁻¹ ∈ P` for `g ∈ SL3`.
pub fn in_hgamma(g: &Mat3Q) -> Result<bool> {
    Ok(in_parabolic_p(&conj_by_gamma(&embed_sl3(g)?)))
}

/// Shape test `(1,−x,z; 0,1,x; 0,0,1)·diag(a,1,1/a)`, independent of G2.
pub fn hgamma_shape(g: &Mat3Q) -> bool {
    let lower_zero = g[(1, 0)].is_zero() && g[(2, 0)].is_zero() && g[(2, 1)].is_zero();
    lower_zero
        && g[(1, 1)].is_one()
        && !g[(0, 0)].is_zero()
        && (&g[(0, 0)] * &g[(2, 2)]).is_one()
        && (&g[(0, 1)] + &g[(0, 0)] * &g[(1, 2)]).is_zero()
}

pub fn hgamma_element(x: &Rational, z: &Rational, a: &Rational) -> Result<Mat3Q> {
    if a.is_zero() {
        return Err(Error::Domain("a must be nonzero".into()));
    }
    let n = Matrix::from_rows(vec![
        vec![int(1), -x.clone(), z.clone()],
        vec![int(0), int(1), x.clone()],
        vec![int(0), int(0), int(1)],
    ]);
    let d = Matrix::diagonal(&[a.clone(), int(1), a.recip()]);
    Ok(&n * &d)
}

pub fn verify_hgamma(x: &Rational, z: &Rational, a: &Rational) -> Result<bool> {
    in_hgamma(&hgamma_element(x, z, a)?)
}

/// How the `A(1)`, `A(2)` generators are read: with the `y_j`-conjugation as printed, or without.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AjForm {
    Printed,
    Unconjugated,
}

/// Which side the representative acts on: `y·b·y⁻¹ ∈ H_γ` or `y⁻¹·b·y ∈ H_γ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    Inner,
    Outer,
}

/// A fixed interpretation of the `A(j)` display: form, direction, and the torus sign
/// `d` in the representative `d·y_j` (same double coset as `y_j`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AjReading {
    pub form: AjForm,
    pub direction: Direction,
    pub sign: [i64; 3],
}

impl AjReading {
    pub const LITERAL: AjReading = AjReading {
        form: AjForm::Printed,
        direction: Direction::Inner,
        sign: [1, 1, 1],
    };
}

fn y(j: usize) -> Mat3Q {
    y_representatives()[j - 1].matrix.clone()
}

/// Element of `A(j)` at parameter `param` (`a` for j ≠ 3, `z` for j = 3).
pub fn aj_element(j: usize, param: &Rational, form: AjForm) -> Result<Mat3Q> {
    if j != 3 && param.is_zero() {
        return Err(Error::Domain(format!("A({j}) needs a nonzero parameter")));
    }
    let one = int(1);
    let zero = int(0);
    let conj = |m: Mat3Q| -> Mat3Q {
        let yj = y(j);
        &(&yj.inverse().unwrap() * &m) * &yj
    };
    let a = param;
    match j {
        1 | 2 => {
            let m = Matrix::from_rows(vec![
                vec![a.clone(), a - &one, zero.clone()],
                vec![zero.clone(), one.clone(), zero.clone()],
                vec![zero.clone(), zero.clone(), a.recip()],
            ]);
            Ok(match form {
                AjForm::Printed => conj(m),
                AjForm::Unconjugated => m,
            })
        }
        3 => {
            let m = Matrix::from_rows(vec![
                vec![one.clone(), zero.clone(), param.clone()],
                vec![zero.clone(), one.clone(), zero.clone()],
                vec![zero.clone(), zero.clone(), one.clone()],
            ]);
            Ok(conj(m))
        }
        4 => Ok(Matrix::from_rows(vec![
            vec![one.clone(), (a - &one) / a, zero.clone()],
            vec![zero.clone(), a.recip(), zero.clone()],
            vec![zero.clone(), zero.clone(), a.clone()],
        ])),
        5 => Ok(Matrix::from_rows(vec![
            vec![a.recip(), zero.clone(), zero.clone()],
            vec![zero.clone(), a.clone(), &one - a],
            vec![zero.clone(), zero.clone(), one.clone()],
        ])),
        _ => Err(Error::Domain(format!("A({j}) is defined for j = 1..5"))),
    }
}

fn is_upper_triangular(m: &Mat3Q) -> bool {
    (0..3).all(|i| (0..i).all(|j| m[(i, j)].is_zero()))
}

#[derive(Clone, Debug, Serialize)]
pub struct AjCheck {
    pub j: usize,
    pub param: String,
    pub reading: AjReading,
    pub upper_triangular: bool,
    pub conjugate_in_hgamma: bool,
    pub pass: bool,
}

pub fn check_aj(j: usize, param: &Rational, reading: AjReading) -> Result<AjCheck> {
    let b = aj_element(j, param, reading.form)?;
    let d = Matrix::diagonal(&reading.sign.map(int));
    let rep = &d * &y(j);
    let rep_inv = rep.inverse()?;
    let conj = match reading.direction {
        Direction::Inner => &(&rep * &b) * &rep_inv,
        Direction::Outer => &(&rep_inv * &b) * &rep,
    };
    let upper_triangular = is_upper_triangular(&b);
    let conjugate_in_hgamma = in_hgamma(&conj)?;
    Ok(AjCheck {
        j,
        param: param.to_string(),
        reading,
        upper_triangular,
        conjugate_in_hgamma,
        pass: upper_triangular && conjugate_in_hgamma,
    })
}

/// All readings tried, literal first.
pub fn candidate_readings(j: usize) -> Vec<AjReading> {
    let forms: &[AjForm] = if j <= 2 {
        &[AjForm::Printed, AjForm::Unconjugated]
    } else {
        &[AjForm::Printed]
    };
    let signs = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]];
    let mut out = Vec::new();
    for &direction in &[Direction::Inner, Direction::Outer] {
        for &form in forms {
            for sign in signs {
                out.push(AjReading { form, direction, sign });
            }
        }
    }
    out
}

/// First reading under which the inclusion holds at a generic probe parameter.
pub fn resolve_aj_reading(j: usize) -> Result<AjReading> {
    let probe = Rational::new(7.into(), 3.into());
    for reading in candidate_readings(j) {
        if check_aj(j, &probe, reading)?.pass {
            return Ok(reading);
        }
    }
    Err(Error::Construction(format!("no reading of A({j}) lands in H_γ")))
}

pub fn verify_aj(j: usize, param: &Rational) -> Result<bool> {
    Ok(check_aj(j, param, resolve_aj_reading(j)?)?.pass)
}

/// `w·diag·w⁻¹` stays diagonal for every listed Weyl element.
pub fn normalizes_torus(w: &Mat3Q) -> bool {
    let d = Matrix::diagonal(&[int(2), int(3), Rational::new(1.into(), 6.into())]);
    let c = &(w * &d) * &w.inverse().unwrap();
    (0..3).all(|i| (0..3).all(|j| i == j || c[(i, j)].is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::g2core::{one_param, ALPHA, BETA};
    use crate::numkernel::rat;

    #[test]
    fn gamma_orbit() {
        assert!(verify_gamma_not_in_p());
        assert!(in_parabolic_p(&ExactElement::identity()));
        let p: ExactElement = one_param(BETA, int(2)).mul(&one_param(-ALPHA, rat(1, 3)));
        assert!(!in_parabolic_p(&gamma_element::<Rational>().mul(&p)));
    }

    #[test]
    fn hgamma_examples() {
        assert!(verify_hgamma(&int(0), &int(0), &int(1)).unwrap());
        assert!(verify_hgamma(&int(1), &int(2), &int(3)).unwrap());
        let lower = m3([[1, 0, 0], [1, 1, 0], [0, 0, 1]]);
        assert!(!in_hgamma(&lower).unwrap());
        assert!(verify_hgamma(&int(1), &int(0), &int(0)).is_err());
    }

    #[test]
    fn aj_examples() {
        assert!(verify_aj(4, &int(1)).unwrap());
        let a4 = aj_element(4, &int(2), AjForm::Printed).unwrap();
        assert!(!check_aj(4, &int(2), AjReading::LITERAL).unwrap().pass);
        assert_eq!(a4[(0, 1)], rat(1, 2));
        assert_eq!(a4[(1, 1)], rat(1, 2));
        assert!(verify_aj(4, &int(2)).unwrap());
        assert!(verify_aj(3, &int(5)).unwrap());
        assert!(aj_element(4, &int(0), AjForm::Printed).is_err());
    }

    #[test]
    fn weyl_list() {
        for w in weyl_elements() {
            assert_eq!(w.matrix.determinant(), int(1));
            assert!(normalizes_torus(&w.matrix));
        }
    }
}
