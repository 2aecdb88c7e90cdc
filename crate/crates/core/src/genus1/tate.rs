//! Conductor of an elliptic curve over Q by Tate's algorithm.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::curve::WeierstrassCurve;
use crate::arith::factor_bigint;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConductorError {
    #[error("curve is singular")]
    Singular,
    #[error("could not factor the discriminant {0}")]
    Factorization(BigInt),
    #[error("Tate's algorithm reached an impossible state at p = {0}")]
    Internal(BigInt),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalData {
    #[serde(with = "crate::json::bigint")]
    pub p: BigInt,
    pub kodaira: String,
    /// Exponent of `p` in the conductor.
    pub f: u32,
}

type Coeffs = [BigInt; 5];

struct Inv {
    b2: BigInt,
    b6: BigInt,
    b8: BigInt,
    c4: BigInt,
    disc: BigInt,
}

fn invariants(a: &Coeffs) -> Inv {
    let [a1, a2, a3, a4, a6] = a;
    let b2 = a1 * a1 + 4 * a2;
    let b4 = 2 * a4 + a1 * a3;
    let b6 = a3 * a3 + 4 * a6;
    let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    let c4 = &b2 * &b2 - 24 * &b4;
    let b2b2b8: BigInt = &b2 * &b2 * &b8;
    let disc = -b2b2b8 - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6;
    Inv { b2, b6, b8, c4, disc }
}

/// Coordinates `x = x' + r`, `y = y' + s x' + t`.
fn rst(a: &Coeffs, r: &BigInt, s: &BigInt, t: &BigInt) -> Coeffs {
    let [a1, a2, a3, a4, a6] = a;
    [
        a1 + 2 * s,
        a2 - s * a1 + 3 * r - s * s,
        a3 + r * a1 + 2 * t,
        a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
        a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1,
    ]
}

fn val(n: &BigInt, p: &BigInt) -> u32 {
    assert!(!n.is_zero());
    let mut n = n.clone();
    let mut v = 0;
    while (&n % p).is_zero() {
        n /= p;
        v += 1;
    }
    v
}

fn divides(d: &BigInt, n: &BigInt) -> bool {
    (n % d).is_zero()
}

fn md(n: &BigInt, m: &BigInt) -> BigInt {
    n.mod_floor(m)
}

fn inv_mod(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    assert!(e.gcd.is_one(), "not invertible");
    e.x.mod_floor(m)
}

/// Roots mod a small prime of a polynomial (lowest degree first).
fn roots_mod(f: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    let pp = p.to_u64().expect("small prime");
    (0..pp)
        .map(BigInt::from)
        .filter(|x| {
            let v = f.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c);
            divides(p, &v)
        })
        .collect()
}

/// Double (or triple) root mod p of `T^3 + b T^2 + c T + d`.
fn multiple_root(b: &BigInt, c: &BigInt, d: &BigInt, p: &BigInt) -> Option<BigInt> {
    let f = [d.clone(), c.clone(), b.clone(), BigInt::one()];
    let df = [c.clone(), 2 * b, BigInt::from(3)];
    roots_mod(&f, p)
        .into_iter()
        .find(|x| divides(p, &df.iter().rev().fold(BigInt::zero(), |acc, k| acc * x + k)))
}

fn local_data(a0: &Coeffs, p: &BigInt) -> Result<LocalData, ConductorError> {
    let two = BigInt::from(2);
    let three = BigInt::from(3);
    let small = *p <= three;
    let internal = || ConductorError::Internal(p.clone());
    let done = |kodaira: &str, f: u32| {
        Ok(LocalData {
            p: p.clone(),
            kodaira: kodaira.to_string(),
            f,
        })
    };
    let p2 = p * p;
    let p3 = &p2 * p;
    let p4 = &p3 * p;
    let p6 = &p3 * &p3;
    let mut a = a0.clone();
    loop {
        let inv = invariants(&a);
        if inv.disc.is_zero() {
            return Err(ConductorError::Singular);
        }
        let n = val(&inv.disc, p);
        if n == 0 {
            return done("I0", 0);
        }
        if !divides(p, &inv.c4) {
            return done(&format!("I{n}"), 1);
        }
        // move the singular point of the reduction to (0, 0)
        let (r, t) = if small {
            let pp = p.to_u64().expect("small");
            let mut found = None;
            'search: for x in 0..pp {
                for y in 0..pp {
                    let (x, y) = (BigInt::from(x), BigInt::from(y));
                    let [a1, a2, a3, a4, a6] = &a;
                    let f = &y * &y + a1 * &x * &y + a3 * &y - (&x * &x * &x + a2 * &x * &x + a4 * &x + a6);
                    let fx = a1 * &y - 3 * &x * &x - 2 * a2 * &x - a4;
                    let fy = 2 * &y + a1 * &x + a3;
                    if divides(p, &f) && divides(p, &fx) && divides(p, &fy) {
                        found = Some((x, y));
                        break 'search;
                    }
                }
            }
            found.ok_or_else(internal)?
        } else {
            let r = md(&(-&inv.b2 * inv_mod(&BigInt::from(12), p)), p);
            let t = md(&(-(&a[0] * &r + &a[2]) * inv_mod(&two, p)), p);
            (r, t)
        };
        a = rst(&a, &r, &BigInt::zero(), &t);
        if !(divides(p, &a[2]) && divides(p, &a[3]) && divides(p, &a[4])) {
            return Err(internal());
        }
        let inv = invariants(&a);
        if !divides(&p2, &a[4]) {
            return done("II", n);
        }
        if !divides(&p3, &inv.b8) {
            return done("III", n - 1);
        }
        if !divides(&p3, &inv.b6) {
            return done("IV", n - 2);
        }
        let (s, t) = if *p == two {
            (md(&a[1], p), p * md(&(&a[4] / &p2), p))
        } else {
            let h = inv_mod(&two, &p2);
            (md(&(-&a[0] * &h), p), md(&(-&a[2] * &h), &p2))
        };
        a = rst(&a, &BigInt::zero(), &s, &t);
        if !(divides(p, &a[0])
            && divides(p, &a[1])
            && divides(&p2, &a[2])
            && divides(&p2, &a[3])
            && divides(&p3, &a[4]))
        {
            return Err(internal());
        }
        let b = &a[1] / p;
        let c = &a[3] / &p2;
        let d = &a[4] / &p3;
        let w = 27 * &d * &d - &b * &b * &c * &c + 4 * &b * &b * &b * &d - 18 * &b * &c * &d + 4 * &c * &c * &c;
        let x = 3 * &c - &b * &b;
        if !divides(p, &w) {
            return done("I0*", n - 4);
        }
        if !divides(p, &x) {
            // double root of T^3 + b T^2 + c T + d to 0
            let root = if small {
                multiple_root(&b, &c, &d, p).ok_or_else(internal)?
            } else {
                md(&((&b * &c - 9 * &d) * inv_mod(&(2 * &x), p)), p)
            };
            a = rst(&a, &(p * root), &BigInt::zero(), &BigInt::zero());
            let (mut ix, mut iy) = (3u32, 3u32);
            let (mut mx, mut my) = (p2.clone(), p2.clone());
            loop {
                let a3t = &a[2] / &my;
                let a6t = &a[4] / (&mx * &my);
                if !divides(p, &(&a3t * &a3t + 4 * &a6t)) {
                    break;
                }
                let t = if *p == two {
                    &my * md(&a6t, p)
                } else {
                    &my * md(&(-&a3t * inv_mod(&two, p)), p)
                };
                a = rst(&a, &BigInt::zero(), &BigInt::zero(), &t);
                my *= p;
                iy += 1;
                let a2t = &a[1] / p;
                let a4t = &a[3] / (p * &mx);
                let a6t = &a[4] / (&mx * &my);
                if !divides(p, &(&a4t * &a4t - 4 * &a2t * &a6t)) {
                    break;
                }
                let r = if *p == two {
                    &mx * md(&(&a6t * &a2t), p)
                } else {
                    &mx * md(&(-&a4t * inv_mod(&(2 * &a2t), p)), p)
                };
                a = rst(&a, &r, &BigInt::zero(), &BigInt::zero());
                mx *= p;
                ix += 1;
            }
            let m = ix + iy - 5;
            return done(&format!("I{m}*"), n - ix - iy + 1);
        }
        // triple root to 0
        let root = if small {
            multiple_root(&b, &c, &d, p).ok_or_else(internal)?
        } else {
            md(&(-&b * inv_mod(&three, p)), p)
        };
        a = rst(&a, &(p * root), &BigInt::zero(), &BigInt::zero());
        let a3t = &a[2] / &p2;
        let a6t = &a[4] / &p4;
        if !divides(p, &(&a3t * &a3t + 4 * &a6t)) {
            return done("IV*", n - 6);
        }
        let t = if *p == two {
            &p2 * md(&a6t, p)
        } else {
            &p2 * md(&(-&a3t * inv_mod(&two, p)), p)
        };
        a = rst(&a, &BigInt::zero(), &BigInt::zero(), &t);
        if !divides(&p4, &a[3]) {
            return done("III*", n - 7);
        }
        if !divides(&p6, &a[4]) {
            return done("II*", n - 8);
        }
        // not minimal at p
        a = [&a[0] / p, &a[1] / &p2, &a[2] / &p3, &a[3] / &p4, &a[4] / &p6];
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConductorReport {
    #[serde(with = "crate::json::bigint")]
    pub conductor: BigInt,
    pub local: Vec<LocalData>,
}

/// Conductor, with local data at every prime dividing the discriminant of
/// the integral model.
pub fn conductor(e: &WeierstrassCurve) -> Result<ConductorReport, ConductorError> {
    let (m, _) = e.integral_model();
    let a = m.integer_coeffs().expect("integral");
    let disc = invariants(&a).disc;
    if disc.is_zero() {
        return Err(ConductorError::Singular);
    }
    let factors = factor_bigint(&disc.abs(), 1 << 20).ok_or_else(|| ConductorError::Factorization(disc.clone()))?;
    let mut n = BigInt::one();
    let mut local = Vec::new();
    for (p, _) in factors {
        let ld = local_data(&a, &p)?;
        n *= p.pow(ld.f);
        local.push(ld);
    }
    Ok(ConductorReport { conductor: n, local })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cond(a: [i64; 5]) -> BigInt {
        conductor(&WeierstrassCurve::from_ints(a)).unwrap().conductor
    }

    #[test]
    fn small_conductors() {
        // curves whose conductors are standard table entries
        let cases: [([i64; 5], i64); 17] = [
            ([0, 0, 0, 0, 1], 36),
            ([0, -1, 1, 0, 0], 11),
            ([0, -1, 1, -10, -20], 11),
            ([1, 0, 1, 4, -6], 14),
            ([1, 1, 1, -10, -10], 15),
            ([1, -1, 1, -1, -14], 17),
            ([0, 1, 1, -9, -15], 19),
            ([0, 1, 0, 4, 4], 20),
            ([0, -1, 0, -4, 4], 24),
            ([0, 0, 1, 0, -7], 27),
            ([0, 0, 0, 4, 0], 32),
            ([0, 0, 0, -1, 0], 32),
            ([0, 0, 1, -1, 0], 37),
            ([0, 1, 1, 0, 0], 43),
            ([1, -1, 0, -2, -1], 49),
            ([0, 0, 0, -4, 0], 64),
            ([0, 1, 1, -2, 0], 389),
        ];
        for (a, n) in cases {
            assert_eq!(cond(a), BigInt::from(n), "{a:?}");
        }
    }

    #[test]
    fn non_minimal_models_give_the_same_conductor() {
        // y^2 = x^3 + 1 scaled by u = 2 and u = 3
        assert_eq!(cond([0, 0, 0, 0, 64]), BigInt::from(36));
        assert_eq!(cond([0, 0, 0, 0, 729]), BigInt::from(36));
        // 11a3 scaled by u = 5: (a1..a6) * (5, 25, 125, 625, 15625)
        assert_eq!(cond([0, -25, 125, 0, 0]), BigInt::from(11));
    }

    #[test]
    fn additive_primes_above_three_have_exponent_two() {
        // y^2 = x^3 + 5^k * (x + 1) style twists: conductor exponent at 5
        let ld = conductor(&WeierstrassCurve::from_ints([0, 0, 0, 0, 25])).unwrap();
        let at5 = ld.local.iter().find(|l| l.p == BigInt::from(5)).unwrap();
        assert_eq!(at5.f, 2);
    }
}
