//! Run configuration: defaults, then a flat `key = value` file, then flags.

use std::fmt;
use std::path::{Path, PathBuf};

use adjzeta::checks::{CheckConfig, TOLERANCE_KEYS};
use adjzeta::numkernel::parse_rational;
use adjzeta::unramzeta::SatakeTriple;
use num_complex::Complex64;

/// Bad flag or config value; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub type Usage<T> = Result<T, UsageError>;

fn usage<T>(msg: impl Into<String>) -> Usage<T> {
    Err(UsageError(msg.into()))
}

pub fn parse_f64(key: &str, v: &str) -> Usage<f64> {
    v.trim()
        .parse()
        .map_err(|_| UsageError(format!("{key}: not a number: {v:?}")))
}

fn parse_int<T: std::str::FromStr>(key: &str, v: &str) -> Usage<T> {
    v.trim()
        .parse()
        .map_err(|_| UsageError(format!("{key}: not an integer: {v:?}")))
}

fn list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|x| !x.is_empty())
}

/// `re` or `re,im`
pub fn parse_complex(key: &str, v: &str) -> Usage<Complex64> {
    let parts: Vec<&str> = v.split(',').collect();
    match parts.as_slice() {
        [re] => Ok(Complex64::new(parse_f64(key, re)?, 0.0)),
        [re, im] => Ok(Complex64::new(parse_f64(key, re)?, parse_f64(key, im)?)),
        _ => usage(format!("{key}: expected re or re,im, got {v:?}")),
    }
}

pub fn parse_u(v: &str) -> Usage<[f64; 3]> {
    let xs = list(v).map(|x| parse_f64("u", x)).collect::<Usage<Vec<_>>>()?;
    xs.try_into()
        .map_err(|_| UsageError(format!("u: expected three comma-separated reals, got {v:?}")))
}

/// Validated against the Satake invariants before anything runs.
pub fn parse_satake(v: &str) -> Usage<[String; 3]> {
    let xs: Vec<String> = list(v).map(String::from).collect();
    let Ok(t) = <[String; 3]>::try_from(xs) else {
        return usage(format!("satake: expected three comma-separated rationals, got {v:?}"));
    };
    let r = t
        .iter()
        .map(|x| parse_rational(x))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| UsageError(format!("satake: {e}")))?;
    SatakeTriple::new(r[0].clone(), r[1].clone(), r[2].clone())
        .map_err(|e| UsageError(format!("satake {v}: {e}")))?;
    Ok(t)
}

pub fn parse_prime(v: &str) -> Usage<u64> {
    let p = parse_int::<u64>("p", v)?;
    if p < 2 || (2..p).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
        return usage(format!("p: {p} is not prime"));
    }
    Ok(p)
}

pub fn parse_primes(v: &str) -> Usage<Vec<u64>> {
    let ps = list(v).map(parse_prime).collect::<Usage<Vec<_>>>()?;
    if ps.is_empty() {
        return usage("p: empty list");
    }
    Ok(ps)
}

/// `torus_slack,max_depth`
pub fn parse_bounds(v: &str) -> Usage<(i64, i64)> {
    let xs = list(v).map(|x| parse_int::<i64>("bounds", x)).collect::<Usage<Vec<_>>>()?;
    match xs.as_slice() {
        &[slack, depth] if slack >= 0 && depth > 0 => Ok((slack, depth)),
        _ => usage(format!("bounds: expected torus_slack ≥ 0, max_depth > 0, got {v:?}")),
    }
}

/// `CHECK=VALUE`; a bare check name means `CHECK.tolerance`.
pub fn parse_tolerance(v: &str) -> Usage<(String, f64)> {
    let Some((k, x)) = v.split_once('=') else {
        return usage(format!("tolerance: expected CHECK=VALUE, got {v:?}"));
    };
    let k = k.trim();
    let key = if k.contains('.') { k.to_string() } else { format!("{k}.tolerance") };
    if !TOLERANCE_KEYS.contains(&key.as_str()) {
        return usage(format!("tolerance: unknown key {k:?} (known: {})", TOLERANCE_KEYS.join(", ")));
    }
    let x = parse_f64(&key, x)?;
    if !(x >= 0.0) {
        return usage(format!("tolerance {key}: must be ≥ 0"));
    }
    Ok((key, x))
}

/// Settings that may come from the file; flags fill the same slots afterwards.
#[derive(Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub degree: Option<i64>,
    pub primes: Option<Vec<u64>>,
    pub satake: Option<Vec<[String; 3]>>,
    pub u: Option<[f64; 3]>,
    pub s: Option<Complex64>,
    pub quad_level: Option<u32>,
    pub bounds: Option<(i64, i64)>,
    pub report: Option<PathBuf>,
    pub tolerances: Vec<(String, f64)>,
}

impl Overrides {
    pub fn from_file(path: &Path) -> Usage<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("config {}: {e}", path.display())))?;
        Overrides::from_text(&text)
    }

    pub fn from_text(text: &str) -> Usage<Self> {
        let mut o = Overrides::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return usage(format!("config line {}: expected key = value", n + 1));
            };
            let (k, v) = (k.trim(), v.trim());
            match k {
                "seed" => o.seed = Some(parse_int(k, v)?),
                "degree" => o.degree = Some(parse_int(k, v)?),
                "p" => o.primes = Some(parse_primes(v)?),
                // triples separated by ';'
                "satake" => o.satake = Some(v.split(';').map(parse_satake).collect::<Usage<_>>()?),
                "u" => o.u = Some(parse_u(v)?),
                "s" => o.s = Some(parse_complex(k, v)?),
                "quad_level" | "quad-level" => o.quad_level = Some(parse_int(k, v)?),
                "bounds" => o.bounds = Some(parse_bounds(v)?),
                "report" => o.report = Some(PathBuf::from(v)),
                _ => match k.strip_prefix("tolerance.") {
                    Some(t) => o.tolerances.push(parse_tolerance(&format!("{t}={v}"))?),
                    None => return usage(format!("config line {}: unknown key {k:?}", n + 1)),
                },
            }
        }
        Ok(o)
    }

    /// Later wins.
    pub fn merge(mut self, later: Overrides) -> Overrides {
        macro_rules! take {
            ($($f:ident),*) => { $( if later.$f.is_some() { self.$f = later.$f; } )* };
        }
        take!(seed, degree, primes, satake, u, s, quad_level, bounds, report);
        self.tolerances.extend(later.tolerances);
        self
    }

    pub fn apply(&self, cfg: &mut CheckConfig) -> Usage<()> {
        if let Some(x) = self.seed {
            cfg.seed = x;
        }
        if let Some(d) = self.degree {
            if d < 0 {
                return usage("degree must be ≥ 0");
            }
            cfg.degree = d;
        }
        if let Some(p) = &self.primes {
            cfg.primes = p.clone();
        }
        if let Some(t) = &self.satake {
            cfg.satake = t.clone();
        }
        if let Some(u) = self.u {
            cfg.u = u;
        }
        if let Some(s) = self.s {
            cfg.s = s;
        }
        if let Some(l) = self.quad_level {
            cfg.quad_level = l;
        }
        if let Some((slack, depth)) = self.bounds {
            cfg.bounds.torus_slack = slack;
            cfg.bounds.max_depth = depth;
        }
        for (k, v) in &self.tolerances {
            cfg.tolerances.insert(k.clone(), *v);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let file = Overrides::from_text("seed = 7\n# comment\ndegree=6\nsatake = 1,1,1; 2,3,1/6\ntolerance.iwasawa = 1e-9\n").unwrap();
        let flags = Overrides { seed: Some(9), ..Overrides::default() };
        let mut cfg = CheckConfig::default();
        file.merge(flags).apply(&mut cfg).unwrap();
        assert_eq!((cfg.seed, cfg.degree, cfg.satake.len()), (9, 6, 2));
        assert_eq!(cfg.tolerances["iwasawa.tolerance"], 1e-9);
    }

    #[test]
    fn rejects() {
        assert!(parse_satake("2,3,1/4").unwrap_err().0.contains("multiply to 1"));
        assert!(parse_satake("1,1").is_err());
        assert!(parse_primes("2,4").is_err());
        assert!(parse_tolerance("nope=1").is_err());
        assert!(parse_tolerance("quasibeta").is_err());
        assert!(parse_complex("s", "1,2,3").is_err());
        assert!(Overrides::from_text("colour = red").is_err());
        assert_eq!(parse_complex("s", "1.5,-2").unwrap(), Complex64::new(1.5, -2.0));
    }
}
