//! The verification batteries, one function per check id. The acceptance test and
//! the command-line tool both run these, so they report the same numbers.

use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::archzeta::{self, PrincipalSeriesParams, QuadratureSpec};
use crate::error::{Error, Result};
use crate::g2core::{self, Root, LISTED_PAIRS, POSITIVE};
use crate::iwasawa;
use crate::linalg::{Mat3, Matrix};
use crate::numkernel::{int, rat, Rational};
use crate::orbits;
use crate::quasibeta::{self, QBExpression, QBParams, QbOptions, RewriteOrder};
use crate::unramzeta::{self, Bounds, SatakeTriple};

type C = Complex64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckConfig {
    pub seed: u64,
    /// truncation degree in Y for the unramified series
    pub degree: i64,
    pub primes: Vec<u64>,
    pub satake: Vec<[String; 3]>,
    pub u: [f64; 3],
    pub s: C,
    pub quad_level: u32,
    pub bounds: Bounds,
    /// per-check overrides, keyed `check.field`
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            seed: 20240611,
            degree: 12,
            primes: vec![2, 3],
            satake: vec![
                ["1".into(), "1".into(), "1".into()],
                ["2".into(), "3".into(), "1/6".into()],
                ["-1".into(), "2".into(), "-1/2".into()],
            ],
            u: [0.4, 0.0, -0.4],
            s: C::new(2.0, 0.0),
            quad_level: 0,
            bounds: Bounds::default(),
            tolerances: BTreeMap::new(),
        }
    }
}

impl CheckConfig {
    pub fn tol(&self, key: &str, default: f64) -> f64 {
        self.tolerances.get(key).copied().unwrap_or(default)
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    pub fn satake_triples(&self) -> Result<Vec<SatakeTriple>> {
        self.satake
            .iter()
            .map(|t| {
                let v = t
                    .iter()
                    .map(|x| crate::numkernel::parse_rational(x))
                    .collect::<Result<Vec<_>>>()?;
                SatakeTriple::new(v[0].clone(), v[1].clone(), v[2].clone())
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub anchor: String,
    pub pass: bool,
    pub witness: Value,
    pub seconds: f64,
    pub budget_seconds: f64,
}

/// Check ids in run order, with the statement each one witnesses and a runtime budget.
pub const CHECKS: [(&str, &str, f64); 10] = [
    ("commutators", "commutator relations among positive root groups", 10.0),
    ("adjoint_action", "Weyl adjoint action on root vectors, signs resolved", 5.0),
    ("algebra", "Jacobi identity, positive Gram form, Weyl invariance", 10.0),
    ("iwasawa", "simple conjugation, compact residuals, two-sided scalar identity", 30.0),
    ("unramified", "unramified local integral equals the normalized adjoint L-factor", 1800.0),
    ("psi_scaling", "additive character scaling of the unramified integral", 300.0),
    ("quasibeta", "quasi-beta continuation, rewrite order, radial pole", 120.0),
    ("f_kernel", "F kernel closed form and small-r exponent", 60.0),
    ("arch_convergence", "archimedean integral self-consistency and GL2 Bessel case", 300.0),
    ("orbits", "open orbit representative, stabilizer, A(j) inclusions", 30.0),
];

/// Every key `CheckConfig::tol` is asked for.
pub const TOLERANCE_KEYS: [&str; 7] = [
    "iwasawa.tolerance",
    "quasibeta.tolerance",
    "f_kernel.tolerance",
    "f_kernel.slope",
    "arch_convergence.refinement",
    "arch_convergence.truncation",
    "arch_convergence.gl2",
];

/// Check ids behind each command-line battery.
pub fn battery(name: &str) -> Option<Vec<&'static str>> {
    let ids: Vec<&'static str> = match name {
        "structure" => vec!["commutators", "adjoint_action", "algebra"],
        "iwasawa" => vec!["iwasawa"],
        "unramified" => vec!["unramified", "psi_scaling"],
        "arch" => vec!["f_kernel", "arch_convergence"],
        "quasibeta" => vec!["quasibeta"],
        "orbits" => vec!["orbits"],
        "all" => CHECKS.iter().map(|c| c.0).collect(),
        _ => return None,
    };
    Some(ids)
}

pub fn run_check(id: &str, cfg: &CheckConfig) -> Result<CheckResult> {
    let &(id, anchor, budget) = CHECKS
        .iter()
        .find(|c| c.0 == id)
        .ok_or_else(|| Error::Config(format!("unknown check {id}")))?;
    let start = Instant::now();
    let (pass, witness) = match id {
        "commutators" => commutators(cfg),
        "adjoint_action" => adjoint_action(),
        "algebra" => algebra(),
        "iwasawa" => iwasawa_check(cfg),
        "unramified" => unramified(cfg),
        "psi_scaling" => psi_scaling(cfg),
        "quasibeta" => quasibeta_check(cfg),
        "f_kernel" => f_kernel(cfg),
        "arch_convergence" => arch_convergence(cfg),
        "orbits" => orbits_check(cfg),
        _ => unreachable!(),
    }
    .unwrap_or_else(|e| (false, json!({ "error": e.to_string() })));
    Ok(CheckResult {
        id: id.into(),
        anchor: anchor.into(),
        pass,
        witness,
        seconds: start.elapsed().as_secs_f64(),
        budget_seconds: budget,
    })
}

fn rand_rat(rng: &mut ChaCha8Rng, nonzero: bool) -> Rational {
    loop {
        let n: i64 = rng.gen_range(-20..=20);
        let d: i64 = rng.gen_range(1..=12);
        if !nonzero || n != 0 {
            return rat(n, d);
        }
    }
}

fn commutators(cfg: &CheckConfig) -> Result<(bool, Value)> {
    let mut rng = cfg.rng(1);
    let mut rows = Vec::new();
    let mut pass = true;
    let listed = |a: Root, b: Root| LISTED_PAIRS.contains(&(a, b));
    for (i, &g) in POSITIVE.iter().enumerate() {
        for &d in &POSITIVE[i + 1..] {
            let (a, b) = if listed(d, g) { (d, g) } else { (g, d) };
            let trials = if listed(a, b) { 25 } else { 5 };
            let mut ok = 0;
            for _ in 0..trials {
                let (s, t) = (rand_rat(&mut rng, false), rand_rat(&mut rng, false));
                if g2core::commutator_residual(a, b, &s, &t)?.is_identity() {
                    ok += 1;
                }
            }
            pass &= ok == trials;
            rows.push(json!({
                "pair": format!("({a}, {b})"),
                "listed": listed(a, b),
                "trials": trials,
                "exact": ok,
            }));
        }
    }
    Ok((pass, json!({ "pairs": rows })))
}

fn adjoint_action() -> Result<(bool, Value)> {
    let ids = g2core::adjoint_action_identities();
    let rows: Vec<Value> = ids
        .iter()
        .map(|id| {
            json!({
                "weyl": id.weyl,
                "from": id.from.to_string(),
                "to": id.to.to_string(),
                "sign": id.sign,
                "holds": g2core::weyl_identity_holds(id),
            })
        })
        .collect();
    let pass = ids.iter().all(g2core::weyl_identity_holds);
    let table = g2core::basis().sign_table();
    Ok((
        pass,
        json!({ "identities": rows, "sign_table": serde_json::to_value(table).unwrap() }),
    ))
}

fn algebra() -> Result<(bool, Value)> {
    let violations = g2core::basis().jacobi_violations();
    let gram = g2core::gram();
    let pd = gram.is_positive_definite();
    let wa: g2core::ExactElement = g2core::weyl_rep(g2core::ALPHA)?;
    let wb: g2core::ExactElement = g2core::weyl_rep(g2core::BETA)?;
    let (ka, kb) = (g2core::is_in_k(&wa, 0.0), g2core::is_in_k(&wb, 0.0));
    Ok((
        violations.is_empty() && pd && ka && kb,
        json!({
            "jacobi_triples": g2core::DIM.pow(3),
            "jacobi_violations": violations.len(),
            "gram_positive_definite": pd,
            "gram_minors": gram.leading_minors().iter().map(|m| m.to_string()).collect::<Vec<_>>(),
            "w_alpha_preserves_gram": ka,
            "w_beta_preserves_gram": kb,
        }),
    ))
}

/// Random real SL3 element: upper unipotent times lower triangular with unit determinant.
fn random_sl3(rng: &mut ChaCha8Rng) -> Mat3 {
    let mut u = Mat3::identity(3);
    let mut l = Mat3::identity(3);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        u[(i, j)] = rng.gen_range(-1.5..1.5);
        l[(j, i)] = rng.gen_range(-1.5..1.5);
    }
    let (d0, d1) = (rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0));
    l[(0, 0)] = d0;
    l[(1, 1)] = d1;
    l[(2, 2)] = 1.0 / (d0 * d1);
    &u * &l
}

fn iwasawa_check(cfg: &CheckConfig) -> Result<(bool, Value)> {
    let mut rng = cfg.rng(4);
    let mut exact = 0;
    for _ in 0..10 {
        let z = rand_rat(&mut rng, false);
        let (t1, t2) = (rand_rat(&mut rng, true), rand_rat(&mut rng, true));
        exact += iwasawa::verify_simple_conjugation(&z, &t1, &t2)? as usize;
    }
    let control = iwasawa::verify_simple_conjugation_perturbed(&int(1), &int(2), &int(3))?;
    let tol = cfg.tol("iwasawa.tolerance", 1e-10);
    let mut samples = Vec::new();
    for _ in 0..5 {
        let z = rng.gen_range(-2.0..2.0);
        let t1 = rng.gen_range(0.3..3.0);
        let t2 = rng.gen_range(0.3..3.0);
        let s = rng.gen_range(0.5..3.0);
        let g = iwasawa::embed_real(&random_sl3(&mut rng))?;
        samples.push(iwasawa::verify_compact_residuals(z, t1, t2, s, &g, tol)?);
    }
    let pass = exact == 10 && !control && samples.iter().all(|r| r.pass);
    Ok((
        pass,
        json!({
            "simple_conjugation_exact": exact,
            "simple_conjugation_trials": 10,
            "perturbed_control_rejected": !control,
            "tolerance": tol,
            "samples": serde_json::to_value(&samples).unwrap(),
        }),
    ))
}

fn unramified(cfg: &CheckConfig) -> Result<(bool, Value)> {
    let triples = cfg.satake_triples()?;
    let jobs: Vec<(u64, SatakeTriple)> = cfg
        .primes
        .iter()
        .flat_map(|&p| triples.iter().map(move |t| (p, t.clone())))
        .collect();
    let reports = crate::par::map(&jobs, |(p, t)| unramzeta::zeta_series(t, *p, cfg.degree, cfg.bounds));
    let reports = reports.into_iter().collect::<Result<Vec<_>>>()?;
    let pass = reports.iter().all(|r| r.pass);
    let rows: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "p": r.p,
                "satake": r.satake,
                "degree": r.degree,
                "normalization": r.fitted,
                "mismatched_degrees": r.hypotheses[0].mismatched_degrees,
                "cells": r.cell_count,
                "pass": r.pass,
            })
        })
        .collect();
    Ok((pass, json!({ "runs": rows })))
}

fn psi_scaling(cfg: &CheckConfig) -> Result<(bool, Value)> {
    let one = SatakeTriple::new(int(1), int(1), int(1))?;
    let reports = crate::par::map(&[1i64, 2], |&c| unramzeta::psi_scaling_check(c, &one, 2, cfg.degree));
    let reports = reports.into_iter().collect::<Result<Vec<_>>>()?;
    Ok((
        reports.iter().all(|r| r.pass),
        json!({ "p": 2, "satake": ["1", "1", "1"], "runs": serde_json::to_value(&reports).unwrap() }),
    ))
}

fn rand_c(rng: &mut ChaCha8Rng, re: f64, im: f64) -> C {
    C::new(rng.gen_range(-re..re), rng.gen_range(-im..im))
}

pub fn random_qb_params(rng: &mut ChaCha8Rng) -> QBParams {
    QBParams {
        a1: rand_c(rng, 0.8, 0.5),
        a2: rng.gen_range(0..=2),
        b1: rand_c(rng, 0.8, 0.5),
        b2: rng.gen_range(0..=2),
        c1: rand_c(rng, 0.8, 0.5),
        c2: rng.gen_range(0..=2),
    }
}

/// Left edge of the direct convergence region of the square integral.
pub fn qb_abscissa(p: &QBParams) -> f64 {
    [p.a1, p.b1, p.c1].iter().map(|z| -1.0 - z.re).fold(f64::MIN, f64::max)
}

/// Five points just inside the overlap, where the rewrite still has work to do.
pub fn qb_overlap_points(p: &QBParams) -> Vec<C> {
    let s0 = qb_abscissa(p);
    (0..5)
        .map(|k| C::new(s0 + 0.2 + 0.3 * k as f64, 0.25 * k as f64 - 0.5))
        .collect()
}

fn quasibeta_check(cfg: &CheckConfig) -> Result<(bool, Value)> {
    let mut rng = cfg.rng(7);
    let tol = cfg.tol("quasibeta.tolerance", 1e-8);
    let opts = QbOptions::default();
    let draws: Vec<QBParams> = (0..20).map(|_| random_qb_params(&mut rng)).collect();
    // overlap agreement
    let jobs: Vec<(usize, C)> = draws
        .iter()
        .enumerate()
        .flat_map(|(i, p)| qb_overlap_points(p).into_iter().map(move |s| (i, s)))
        .collect();
    let gaps = crate::par::map(&jobs, |&(i, s)| -> Result<f64> {
        let e = QBExpression::square(&draws[i]);
        let d = quasibeta::qb_direct_sum(&e, s, opts.level)?;
        let c = quasibeta::qb_continue(&e, s, &opts)?;
        Ok((d.value() - c.value()).norm() / d.value().norm())
    });
    let gaps = gaps.into_iter().collect::<Result<Vec<_>>>()?;
    let worst_overlap = gaps.iter().copied().fold(0.0, f64::max);
    // two rewrite orders, deep in the continued region
    let order_gaps = draws
        .iter()
        .map(|p| -> Result<f64> {
            let e = QBExpression::square(p);
            let s = C::new(qb_abscissa(p) - 1.7, 0.2);
            let a = quasibeta::qb_continue(&e, s, &opts)?;
            let b = quasibeta::qb_continue(&e, s, &QbOptions { order: RewriteOrder::SinFirst, ..opts })?;
            Ok((a.value() - b.value()).norm() / a.value().norm())
        })
        .collect::<Result<Vec<_>>>()?;
    let worst_order = order_gaps.iter().copied().fold(0.0, f64::max);
    // radial pole, on draws whose other predicted poles stay clear of the circle
    let mut poles = Vec::new();
    for p in &draws {
        if poles.len() == 5 {
            break;
        }
        let e = QBExpression::square(p);
        let s0 = -p.a1 - 1.0;
        let window = quasibeta::Window {
            re: [s0.re - 0.1, s0.re + 0.1],
            im: [s0.im - 0.1, s0.im + 0.1],
        };
        let others = quasibeta::pole_predictions(&e, window, &opts)?;
        if others.iter().any(|q| (q.location - s0).norm() > 1e-12) {
            continue;
        }
        poles.push(quasibeta::check_pole(&e, p.a1, p.a2, 1e-2, &opts)?);
    }
    let pass = worst_overlap <= tol && worst_order <= tol && poles.len() == 5 && poles.iter().all(|p| p.pass);
    Ok((
        pass,
        json!({
            "draws": draws.len(),
            "overlap_points": gaps.len(),
            "worst_overlap_relative_gap": worst_overlap,
            "worst_order_relative_gap": worst_order,
            "tolerance": tol,
            "pole_checks": serde_json::to_value(&poles).unwrap(),
        }),
    ))
}

/// r-grid for the closed-form check; beyond r ≈ 1 the quadrature side is limited by
/// cancellation in the oscillatory tail, not by the closed form.
pub const F_GRID_R: [f64; 3] = [0.5, 0.8, 1.1];

pub fn f_grid_s() -> [C; 3] {
    [C::new(0.6, 0.0), C::new(1.0, 0.5), C::new(2.0, 0.0)]
}

fn f_kernel(cfg: &CheckConfig) -> Result<(bool, Value)> {
    let spec = QuadratureSpec::level(cfg.quad_level);
    let tol = cfg.tol("f_kernel.tolerance", 1e-8);
    let slope_tol = cfg.tol("f_kernel.slope", 0.02);
    let mut grid = Vec::new();
    for r in F_GRID_R {
        for s in f_grid_s() {
            grid.push(archzeta::f_kernel(r, 0.0, s, &spec)?);
        }
    }
    let worst = grid.iter().map(|v| v.relative_gap).fold(0.0, f64::max);
    let mut slopes = Vec::new();
    let mut slopes_ok = true;
    for re in [0.5, 1.0, 2.0] {
        let s = C::new(re, 0.0);
        let fit = archzeta::f_kernel_small_r_slope(s, 1e-4, 1e-2)?;
        let want = archzeta::predicted_small_r_slope(s);
        let rel = (fit.slope - want).abs() / want.abs();
        slopes_ok &= rel <= slope_tol && fit.conclusive;
        slopes.push(json!({ "s": re, "slope": fit.slope, "predicted": want, "relative_error": rel }));
    }
    Ok((
        worst <= tol && slopes_ok,
        json!({
            "grid": serde_json::to_value(&grid).unwrap(),
            "worst_relative_gap": worst,
            "tolerance": tol,
            "slopes": slopes,
            "slope_tolerance": slope_tol,
        }),
    ))
}

fn arch_convergence(cfg: &CheckConfig) -> Result<(bool, Value)> {
    let spec = QuadratureSpec::level(cfg.quad_level);
    let spec = QuadratureSpec {
        tolerance: cfg.tol("arch_convergence.refinement", spec.tolerance),
        ..spec
    };
    let trunc_tol = cfg.tol("arch_convergence.truncation", 1e-4);
    let gl2_tol = cfg.tol("arch_convergence.gl2", 1e-6);
    let u = PrincipalSeriesParams::real(cfg.u[0], cfg.u[1], cfg.u[2])?;
    let z = archzeta::z_value(&u, cfg.s, &spec);
    let (z_ok, z_json) = match &z {
        Ok(r) => (
            r.refinement_gap <= spec.tolerance && r.truncation_change <= trunc_tol,
            serde_json::to_value(r).unwrap(),
        ),
        Err(e) => (false, json!({ "error": e.to_string() })),
    };
    let gl2 = archzeta::gl2_oracle_check(u.u[0], u.u[1], &[0.1, 0.5, 1.0, 2.0, 3.0], &spec)?;
    let worst_gl2 = gl2.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok((
        z_ok && worst_gl2 <= gl2_tol,
        json!({
            "u": cfg.u,
            "s": cfg.s,
            "z": z_json,
            "refinement_tolerance": spec.tolerance,
            "truncation_tolerance": trunc_tol,
            "gl2": gl2.iter().map(|(y, e)| json!({ "y": y, "relative_error": e })).collect::<Vec<_>>(),
            "gl2_tolerance": gl2_tol,
        }),
    ))
}

/// Random det-1 rational matrix `L·U`; rarely upper triangular.
fn random_sl3_rational(rng: &mut ChaCha8Rng) -> Matrix<Rational> {
    let mut l = Matrix::<Rational>::identity(3);
    let mut u = Matrix::<Rational>::identity(3);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        l[(j, i)] = rand_rat(rng, false);
        u[(i, j)] = rand_rat(rng, false);
    }
    let a = rand_rat(rng, true);
    u[(0, 0)] = a.clone();
    u[(2, 2)] = a.recip();
    &l * &u
}

fn orbits_check(cfg: &CheckConfig) -> Result<(bool, Value)> {
    let mut rng = cfg.rng(10);
    let gamma_ok = orbits::verify_gamma_not_in_p();
    let mut hg = 0;
    for _ in 0..20 {
        let (x, z, a) = (rand_rat(&mut rng, false), rand_rat(&mut rng, false), rand_rat(&mut rng, true));
        hg += orbits::verify_hgamma(&x, &z, &a)? as usize;
    }
    let mut aj_rows = Vec::new();
    let mut aj_ok = true;
    for j in 1..=5 {
        let reading = orbits::resolve_aj_reading(j)?;
        let literal = orbits::check_aj(j, &rat(7, 3), orbits::AjReading::LITERAL)?.pass;
        let mut ok = 0;
        for _ in 0..20 {
            let p = rand_rat(&mut rng, j != 3);
            ok += orbits::check_aj(j, &p, reading)?.pass as usize;
        }
        aj_ok &= ok == 20;
        aj_rows.push(json!({
            "j": j,
            "reading": serde_json::to_value(reading).unwrap(),
            "literal_reading_passes": literal,
            "passed": ok,
            "trials": 20,
        }));
    }
    let mut rejected = 0;
    let mut non_members = 0;
    while non_members < 100 {
        let g = random_sl3_rational(&mut rng);
        if orbits::hgamma_shape(&g) {
            continue;
        }
        non_members += 1;
        rejected += !orbits::in_hgamma(&g)? as usize;
    }
    let pass = gamma_ok && hg == 20 && aj_ok && rejected == 100;
    Ok((
        pass,
        json!({
            "gamma_not_in_p": gamma_ok,
            "hgamma_members": hg,
            "aj": aj_rows,
            "non_members_rejected": rejected,
            "non_members": non_members,
        }),
    ))
}
