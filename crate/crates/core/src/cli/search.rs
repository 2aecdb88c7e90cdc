//! Random reductions of the shapes `w f1 = z f2` over GF(3) and
//! `w f1 = g1 g2` over GF(2), filtered to Picard bound 2 and glued by CRT.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::certify::{analyze_traces, count, known_classes, prepare, StageError};
use super::config::{Config, ConfigError, KnownCurve, PrimeConfig};
use crate::counter::traces_from_counts;
use crate::quartic::{monomials, QuarticForm, SparsePoly};

/// A reduction whose bound is 2, with the known curve that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub index: usize,
    pub form: QuarticForm,
    pub text: String,
    pub prime: PrimeConfig,
    pub bound: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub index: usize,
    pub text: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeSearch {
    pub p: u64,
    pub hits: Vec<Candidate>,
    pub rejected: Vec<Rejection>,
}

/// Integer form reducing to both hits; adding `p1 p2 h` keeps that true.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchPair {
    pub form: QuarticForm,
    pub text: String,
    pub config: Config,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub seed: u64,
    pub budget: usize,
    pub searches: Vec<PrimeSearch>,
    pub pairs: Vec<SearchPair>,
}

fn random_form(rng: &mut ChaCha8Rng, p: u64, degree: u32) -> SparsePoly {
    let mut f = SparsePoly::zero();
    for m in monomials(4, degree) {
        let c = rng.gen_range(0..p);
        if c != 0 {
            f.add_term([m[0], m[1], m[2], m[3]], BigInt::from(c));
        }
    }
    f
}

fn var(i: usize) -> SparsePoly {
    SparsePoly::var(i)
}

/// `g(x, y, z, 0)` is a smooth conic: the half-discriminant
/// `4abc + fgh - af^2 - bg^2 - ch^2` is a unit mod `p`, in any characteristic.
fn smooth_conic(g: &SparsePoly, p: u64) -> bool {
    let c = |e: [u32; 4]| g.coeff(e);
    let (a, b, cc) = (c([2, 0, 0, 0]), c([0, 2, 0, 0]), c([0, 0, 2, 0]));
    let (f, gg, h) = (c([0, 1, 1, 0]), c([1, 0, 1, 0]), c([1, 1, 0, 0]));
    let d = BigInt::from(4) * &a * &b * &cc + &f * &gg * &h - &a * &f * &f - &b * &gg * &gg - &cc * &h * &h;
    d % BigInt::from(p) != BigInt::from(0)
}

/// Samples `budget` reductions at `p` (2 or 3), each with its known curve.
pub fn sample(p: u64, seed: u64, budget: usize) -> Vec<(QuarticForm, PrimeConfig)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut out = vec![];
    while out.len() < budget {
        let f1 = random_form(&mut rng, p, 3);
        let (poly, curve) = if p == 3 {
            let f2 = random_form(&mut rng, p, 3);
            let f = var(3).mul(&f1).sub(&var(2).mul(&f2));
            let line = KnownCurve {
                label: "L".into(),
                equations: vec!["w".into(), "z".into()],
                degree: 1,
                genus: 0,
                orbit: 1,
                sign: 1,
            };
            (f, line)
        } else {
            let g1 = random_form(&mut rng, p, 2);
            let g2 = random_form(&mut rng, p, 2);
            if !smooth_conic(&g2, p) {
                continue;
            }
            let f = var(3).mul(&f1).sub(&g1.mul(&g2));
            let conic = KnownCurve {
                label: "C".into(),
                equations: vec!["w".into(), g2.to_string()],
                degree: 2,
                genus: 0,
                orbit: 1,
                sign: 1,
            };
            (f, conic)
        };
        let Ok(form) = QuarticForm::from_poly(&poly) else {
            continue;
        };
        let form = QuarticForm::from_coeffs(form.coeffs_mod(p).into_iter().map(BigInt::from).collect())
            .expect("35 coefficients");
        if form.is_zero() {
            continue;
        }
        out.push((
            form,
            PrimeConfig {
                p,
                max_n: 0,
                known: vec![curve],
                hyperplane: true,
                pairings: vec![],
            },
        ));
    }
    out
}

fn run_one(index: usize, form: QuarticForm, pc: &PrimeConfig, cfg: &Config) -> Result<Candidate, Rejection> {
    let text = form.to_string();
    let reject = |e: StageError| Rejection {
        index,
        text: text.clone(),
        reason: e.to_string(),
    };
    let prep = prepare(&form, pc, cfg).map_err(reject)?;
    let counts = count(&prep, pc, cfg).map_err(reject)?;
    let traces = traces_from_counts(&counts).map_err(|e| Rejection {
        index,
        text: text.clone(),
        reason: e.to_string(),
    })?;
    let a = analyze_traces(&traces, &known_classes(pc)).map_err(reject)?;
    if a.bound != 2 {
        return Err(Rejection {
            index,
            text,
            reason: format!("bound {}", a.bound),
        });
    }
    Ok(Candidate {
        index,
        text,
        form,
        prime: pc.clone(),
        bound: a.bound,
    })
}

/// Runs the pipeline on `budget` samples at `p`, counting up to the
/// `max_n` configured for `p` (default: the middle of the quotient).
pub fn search_prime(p: u64, seed: u64, budget: usize, cfg: &Config) -> PrimeSearch {
    let max_n = cfg.prime(p).map(|c| c.max_n).unwrap_or(10);
    let samples = sample(p, seed, budget);
    let results: Vec<Result<Candidate, Rejection>> = samples
        .into_par_iter()
        .enumerate()
        .map(|(i, (form, mut pc))| {
            pc.max_n = max_n;
            run_one(i, form, &pc, cfg)
        })
        .collect();
    let (mut hits, mut rejected) = (vec![], vec![]);
    for r in results {
        match r {
            Ok(c) => hits.push(c),
            Err(r) => rejected.push(r),
        }
    }
    PrimeSearch { p, hits, rejected }
}

/// Coefficientwise CRT into the symmetric range around 0.
pub fn crt_form(a: &QuarticForm, p1: u64, b: &QuarticForm, p2: u64) -> QuarticForm {
    let m = (p1 * p2) as i64;
    let (ra, rb) = (a.coeffs_mod(p1), b.coeffs_mod(p2));
    let coeffs = ra
        .iter()
        .zip(&rb)
        .map(|(&x, &y)| {
            let c = (0..m).find(|c| c.rem_euclid(p1 as i64) == x as i64 && c.rem_euclid(p2 as i64) == y as i64);
            let c = c.expect("coprime moduli");
            BigInt::from(if 2 * c > m { c - m } else { c })
        })
        .collect();
    QuarticForm::from_coeffs(coeffs).expect("35 coefficients")
}

pub fn search(p1: u64, p2: u64, seed: u64, budget: usize, cfg: &Config) -> Result<SearchReport, ConfigError> {
    if p1 == p2 {
        return Err(ConfigError::Invalid(format!(
            "both reductions are taken at p = {p1}; distinct primes are required"
        )));
    }
    for p in [p1, p2] {
        if p != 2 && p != 3 {
            return Err(ConfigError::Invalid(format!("no sampling shape for p = {p}")));
        }
    }
    let searches = if budget == 0 {
        vec![]
    } else {
        vec![search_prime(p1, seed, budget, cfg), search_prime(p2, seed, budget, cfg)]
    };
    let mut pairs = vec![];
    if let [a, b] = &searches[..] {
        for x in &a.hits {
            for y in &b.hits {
                let form = crt_form(&x.form, p1, &y.form, p2);
                let config = Config {
                    primes: vec![x.prime.clone(), y.prime.clone()],
                    seed,
                    ..cfg.clone()
                };
                pairs.push(SearchPair {
                    text: form.to_string(),
                    form,
                    config,
                });
            }
        }
    }
    Ok(SearchReport {
        seed,
        budget,
        searches,
        pairs,
    })
}
