//! Characteristic polynomial of Frobenius on middle cohomology, rebuilt from
//! traces of its powers.
//!
//! A polynomial of degree `d` is stored as `x^d + c_1 x^{d-1} + ... + c_d`
//! through the coefficients `c_0 = 1, c_1, ..., c_m`; it is partial when
//! `m < d`. The twist `k` records that the roots have absolute value `p^k`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::big_pow;
use crate::counter::TraceSeries;
use crate::poly::{self, IntPoly, RatPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZetaError {
    #[error("middle coefficient is zero: the sign of the functional equation is undetermined")]
    AmbiguousSign,
    #[error("functional-equation completion needs even degree, got {0}")]
    OddDegree(usize),
    #[error("need coefficients through c_{need}, have through c_{have}")]
    TooFewCoefficients { need: usize, have: usize },
    #[error("coefficient c_{0} is not an integer")]
    NotIntegral(usize),
    #[error("polynomial is partial")]
    Incomplete,
    #[error("known classes span {known} dimensions, more than {available}")]
    TooManyKnownClasses { known: u32, available: u32 },
    #[error("known class {0:?}: orbit must be positive and sign must be 1 or -1")]
    BadKnownClass(String),
    #[error("primes differ: {0} vs {1}")]
    PrimeMismatch(u64, u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharPolynomial {
    pub p: u64,
    pub degree: usize,
    pub twist: i32,
    /// Sign of the functional equation, once determined.
    pub sign: Option<i8>,
    #[serde(with = "crate::json::rational_vec")]
    pub coeffs: Vec<BigRational>,
}

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `p^e` as a rational, for any integer `e`.
fn p_pow(p: u64, e: i64) -> BigRational {
    let m = rat(big_pow(p, e.unsigned_abs() as u32));
    if e >= 0 {
        m
    } else {
        m.recip()
    }
}

impl CharPolynomial {
    pub fn is_complete(&self) -> bool {
        self.coeffs.len() == self.degree + 1
    }

    /// Index of the last known coefficient.
    pub fn known_through(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> Option<&BigRational> {
        self.coeffs.get(i)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Integer coefficients, or the index of the first non-integer.
    pub fn integer_coeffs(&self) -> Result<Vec<BigInt>, ZetaError> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if c.is_integer() {
                    Ok(c.to_integer())
                } else {
                    Err(ZetaError::NotIntegral(i))
                }
            })
            .collect()
    }

    /// Dense form, lowest degree first.
    pub fn to_poly(&self) -> Result<RatPoly, ZetaError> {
        if !self.is_complete() {
            return Err(ZetaError::Incomplete);
        }
        Ok(self.coeffs.iter().rev().cloned().collect())
    }

    /// From a monic dense polynomial, lowest degree first.
    pub fn from_poly(p: u64, twist: i32, f: &[BigRational]) -> CharPolynomial {
        let f = poly::trim(f.to_vec());
        let d = f.len() - 1;
        assert!(f[d].is_one(), "characteristic polynomials are monic");
        CharPolynomial {
            p,
            degree: d,
            twist,
            sign: None,
            coeffs: f.into_iter().rev().collect(),
        }
    }

    /// Checks `c_{d-i} = sign * p^{k(d-2i)} c_i` for every `i`, which is the
    /// coefficientwise form of `p^{kd} f(x) = sign * x^d f(p^{2k}/x)`.
    pub fn satisfies_functional_equation(&self, sign: i8) -> bool {
        if !self.is_complete() {
            return false;
        }
        let d = self.degree as i64;
        let k = self.twist as i64;
        (0..=self.degree).all(|i| {
            let rhs = &self.coeffs[i] * p_pow(self.p, k * (d - 2 * i as i64)) * rat(sign);
            self.coeffs[self.degree - i] == rhs
        })
    }
}

/// Newton's identities: `-k c_k = t_k + sum_{i=1}^{k-1} c_i t_{k-i}`.
/// Uses the first `min(traces.len(), d)` traces; the result has twist 1.
pub fn newton_charpoly(p: u64, traces: &[BigInt], d: usize) -> CharPolynomial {
    let m = traces.len().min(d);
    let t: Vec<BigRational> = traces[..m].iter().map(|x| rat(x.clone())).collect();
    let mut c = vec![BigRational::one()];
    for k in 1..=m {
        let mut s = t[k - 1].clone();
        for i in 1..k {
            s += &c[i] * &t[k - i - 1];
        }
        c.push(-s / rat(k as u64));
    }
    CharPolynomial {
        p,
        degree: d,
        twist: 1,
        sign: None,
        coeffs: c,
    }
}

/// A class (or Frobenius orbit of classes) already known to lie in NS of
/// the reduction. An orbit of `orbit` classes permuted cyclically, with
/// Frobenius^orbit acting by `sign`, contributes the eigenvalues `p*zeta`
/// for the roots `zeta` of `x^orbit = sign`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownClass {
    pub label: String,
    #[serde(default = "one_u32")]
    pub orbit: u32,
    #[serde(default = "one_i8")]
    pub sign: i8,
}

fn one_u32() -> u32 {
    1
}

fn one_i8() -> i8 {
    1
}

impl KnownClass {
    pub fn fixed(label: &str) -> KnownClass {
        KnownClass {
            label: label.to_string(),
            orbit: 1,
            sign: 1,
        }
    }

    fn validate(&self) -> Result<(), ZetaError> {
        if self.orbit == 0 || (self.sign != 1 && self.sign != -1) {
            return Err(ZetaError::BadKnownClass(self.label.clone()));
        }
        Ok(())
    }

    /// `sum zeta^n` over the orbit's eigenvalues divided by `p`.
    fn unit_power_sum(&self, n: u32) -> i64 {
        if n % self.orbit != 0 {
            return 0;
        }
        let e = n / self.orbit;
        let s = if self.sign == -1 && e % 2 == 1 { -1 } else { 1 };
        self.orbit as i64 * s
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct KnownClasses {
    pub classes: Vec<KnownClass>,
}

impl KnownClasses {
    pub fn new(classes: Vec<KnownClass>) -> KnownClasses {
        KnownClasses { classes }
    }

    pub fn dimension(&self) -> u32 {
        self.classes.iter().map(|c| c.orbit).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn validate(&self) -> Result<(), ZetaError> {
        self.classes.iter().try_for_each(KnownClass::validate)
    }

    /// Trace of Frobenius^n on the span of the classes.
    pub fn trace(&self, p: u64, n: u32) -> BigInt {
        let s: i64 = self.classes.iter().map(|c| c.unit_power_sum(n)).sum();
        BigInt::from(s) * big_pow(p, n)
    }

    /// Characteristic polynomial on the span, `prod (x^m - sign p^m)`, as a
    /// dense integer polynomial.
    pub fn eigen_poly(&self, p: u64) -> IntPoly {
        self.classes.iter().fold(poly::ints(&[1]), |acc, c| {
            let m = c.orbit as usize;
            let mut f = vec![BigInt::zero(); m + 1];
            f[0] = -BigInt::from(c.sign) * big_pow(p, c.orbit);
            f[m] = BigInt::one();
            poly::mul(&acc, &f)
        })
    }
}

/// Traces on the quotient of cohomology by the span of the known classes.
pub fn quotient_traces(t: &TraceSeries, w: &KnownClasses) -> Result<TraceSeries, ZetaError> {
    w.validate()?;
    let known = w.dimension();
    if known >= t.dimension {
        return Err(ZetaError::TooManyKnownClasses {
            known,
            available: t.dimension,
        });
    }
    let traces = t
        .traces
        .iter()
        .enumerate()
        .map(|(i, tn)| tn - w.trace(t.p, i as u32 + 1))
        .collect();
    Ok(TraceSeries {
        p: t.p,
        traces,
        dimension: t.dimension - known,
        betti: t.betti,
    })
}

/// Fills in `c_{d/2+1}, ..., c_d` from `c_{d-i} = sign * p^{k(d-2i)} c_i`.
/// The middle relation reads `c_{d/2} = sign * c_{d/2}`, so a nonzero middle
/// coefficient forces `sign = +1`; a zero one leaves it undetermined.
pub fn complete_by_functional_equation(f: &CharPolynomial) -> Result<CharPolynomial, ZetaError> {
    let d = f.degree;
    if d % 2 == 1 {
        return Err(ZetaError::OddDegree(d));
    }
    let half = d / 2;
    if f.known_through() < half {
        return Err(ZetaError::TooFewCoefficients {
            need: half,
            have: f.known_through(),
        });
    }
    if f.coeffs[half].is_zero() {
        return Err(ZetaError::AmbiguousSign);
    }
    let k = f.twist as i64;
    let mut coeffs = f.coeffs[..=half].to_vec();
    for j in (half + 1)..=d {
        let i = d - j;
        coeffs.push(&coeffs[i] * p_pow(f.p, k * (d as i64 - 2 * i as i64)));
    }
    let out = CharPolynomial {
        coeffs,
        sign: Some(1),
        ..f.clone()
    };
    // supplied coefficients beyond the middle must agree with the prediction
    for (j, c) in f.coeffs.iter().enumerate().skip(half + 1) {
        if *c != out.coeffs[j] {
            return Err(ZetaError::TooFewCoefficients { need: j, have: half });
        }
    }
    Ok(out)
}

/// Multiplies the polynomial on the quotient by the characteristic
/// polynomial of the known classes, giving the polynomial on the whole space.
pub fn multiply_known(f: &CharPolynomial, w: &KnownClasses) -> Result<CharPolynomial, ZetaError> {
    let g = poly::to_rational(&w.eigen_poly(f.p));
    let h = poly::mul(&f.to_poly()?, &g);
    let mut out = CharPolynomial::from_poly(f.p, f.twist, &h);
    // x^m - s p^m satisfies the relation with sign -s
    let flip: i8 = w.classes.iter().map(|c| -c.sign).product();
    out.sign = f.sign.map(|s| s * flip);
    Ok(out)
}

/// Rescales the roots from absolute value `p^{twist}` to `p^{to}`:
/// `c_i -> c_i / p^{i (twist - to)}`.
pub fn twist_scale(f: &CharPolynomial, to: i32) -> CharPolynomial {
    let delta = (f.twist - to) as i64;
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c * p_pow(f.p, -(i as i64) * delta))
        .collect();
    CharPolynomial {
        twist: to,
        coeffs,
        ..f.clone()
    }
}
