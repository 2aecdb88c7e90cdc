//! Dense univariate polynomials with exact coefficients, lowest degree first.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type IntPoly = Vec<BigInt>;
pub type RatPoly = Vec<BigRational>;

pub fn trim<T: Zero>(mut f: Vec<T>) -> Vec<T> {
    while f.last().is_some_and(|c| c.is_zero()) {
        f.pop();
    }
    f
}

pub fn degree<T: Zero>(f: &[T]) -> Option<usize> {
    f.iter().rposition(|c| !c.is_zero())
}

pub fn mul<T>(a: &[T], b: &[T]) -> Vec<T>
where
    T: Zero + Clone + std::ops::Mul<Output = T>,
{
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    trim(out)
}

/// Quotient and remainder of `f` by a monic integer polynomial.
pub fn divrem_monic(f: &[BigInt], g: &[BigInt]) -> (IntPoly, IntPoly) {
    let dg = degree(g).expect("nonzero divisor");
    assert!(g[dg].is_one(), "divisor must be monic");
    let mut r: IntPoly = trim(f.to_vec());
    if r.len() <= dg {
        return (Vec::new(), r);
    }
    let mut q = vec![BigInt::zero(); r.len() - dg];
    while let Some(dr) = degree(&r) {
        if dr < dg {
            break;
        }
        let c = r[dr].clone();
        for (i, gi) in g.iter().enumerate().take(dg + 1) {
            r[dr - dg + i] -= &c * gi;
        }
        q[dr - dg] = c;
        r = trim(r);
    }
    (trim(q), r)
}

/// The n-th cyclotomic polynomial, `prod_{d | n} (x^d - 1)^{mu(n/d)}`.
pub fn cyclotomic(n: u64) -> IntPoly {
    assert!(n >= 1);
    let binom = |d: u64| {
        let mut f: IntPoly = vec![BigInt::zero(); d as usize + 1];
        f[0] = -BigInt::one();
        f[d as usize] = BigInt::one();
        f
    };
    let mut num = ints(&[1]);
    let mut den = ints(&[1]);
    for d in crate::arith::divisors(n) {
        match crate::arith::mobius(n / d) {
            1 => num = mul(&num, &binom(d)),
            -1 => den = mul(&den, &binom(d)),
            _ => {}
        }
    }
    let (q, r) = divrem_monic(&num, &den);
    debug_assert!(r.is_empty());
    q
}

/// gcd of the coefficients, nonnegative.
pub fn content(f: &[BigInt]) -> BigInt {
    f.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// Smallest positive multiple with integer coefficients (content 1).
pub fn integerize(f: &[BigRational]) -> IntPoly {
    let f = trim(f.to_vec());
    if f.is_empty() {
        return Vec::new();
    }
    let den = f.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let mut out: IntPoly = f.iter().map(|c| (c * &den).to_integer()).collect();
    let g = content(&out);
    for c in &mut out {
        *c = &*c / &g;
    }
    out
}

pub fn to_rational(f: &[BigInt]) -> RatPoly {
    f.iter().map(|c| BigRational::from_integer(c.clone())).collect()
}

pub fn eval<T>(f: &[T], x: &T) -> T
where
    T: Zero + Clone + std::ops::Mul<Output = T>,
{
    f.iter().rev().fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
}

/// Parse small integer vectors, lowest degree first.
pub fn ints(v: &[i64]) -> IntPoly {
    trim(v.iter().map(|&c| BigInt::from(c)).collect())
}
