//! Small integer helpers: primality, factorization, squarefree parts.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % small == 0 {
            return n == small;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization of a 64-bit integer as (prime, exponent) pairs, ascending.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut primes = Vec::new();
    let mut stack = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13] {
        while n % p == 0 {
            primes.push(p);
            n /= p;
        }
    }
    if n > 1 {
        stack.push(n);
    }
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            primes.push(m);
        } else {
            let d = pollard_rho(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Factorization of a nonzero big integer (sign dropped). Fails only when a
/// cofactor beyond 64 bits survives trial division up to `trial_bound`.
pub fn factor_bigint(n: &BigInt, trial_bound: u64) -> Option<Vec<(BigInt, u32)>> {
    let mut m = n.abs();
    if m.is_zero() {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 2u64;
    while d <= trial_bound {
        if let Some(small) = m.to_u64() {
            for (p, e) in factor_u64(small) {
                out.push((BigInt::from(p), e));
            }
            out.sort();
            return Some(merge(out));
        }
        let bd = BigInt::from(d);
        let mut e = 0;
        while (&m % &bd).is_zero() {
            m /= &bd;
            e += 1;
        }
        if e > 0 {
            out.push((bd, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m.is_one() {
        return Some(merge(out));
    }
    let small = m.to_u64()?;
    for (p, e) in factor_u64(small) {
        out.push((BigInt::from(p), e));
    }
    out.sort();
    Some(merge(out))
}

fn merge(v: Vec<(BigInt, u32)>) -> Vec<(BigInt, u32)> {
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    for (p, e) in v {
        match out.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => out.push((p, e)),
        }
    }
    out
}

/// Signed squarefree part: `n = s * m^2` with `s` squarefree, sign kept.
pub fn squarefree_part(n: i64) -> i64 {
    assert!(n != 0, "squarefree part of zero");
    let sign = n.signum();
    let mut m = n.unsigned_abs();
    let mut out = 1u64;
    let mut d = 2u64;
    while d * d <= m {
        let mut e = 0;
        while m % d == 0 {
            m /= d;
            e += 1;
        }
        if e % 2 == 1 {
            out *= d;
        }
        d += 1;
    }
    out *= m;
    sign * out as i64
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    factor_u64(n)
        .into_iter()
        .fold(1, |acc, (p, e)| acc * (p - 1) * p.pow(e - 1))
}

/// Möbius function.
pub fn mobius(n: u64) -> i8 {
    let f = factor_u64(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

pub fn lcm_range(ms: &[u64]) -> u64 {
    ms.iter().fold(1, |acc, &m| acc.lcm(&m))
}

/// Exact integer power of a machine integer as a big integer.
pub fn big_pow(base: u64, exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(base), exp as usize)
}

/// `true` when `n` is a perfect square (n >= 0).
pub fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &(&r * &r) == n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_factors() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(5197));
        assert!(!is_prime_u64(686004));
        assert!(is_prime_u64(18446744073709551557));
        assert_eq!(factor_u64(686004), vec![(2, 2), (3, 1), (11, 1), (5197, 1)]);
        assert_eq!(factor_u64(59048), vec![(2, 3), (11, 2), (61, 1)]);
    }

    #[test]
    fn bigint_factorization() {
        let d: BigInt = "-33718468608".parse().unwrap();
        let f = factor_bigint(&d, 1000).unwrap();
        let expected: Vec<(BigInt, u32)> = vec![(2.into(), 16), (3.into(), 2), (11.into(), 1), (5197.into(), 1)];
        assert_eq!(f, expected);
    }

    #[test]
    fn squarefree_parts() {
        assert_eq!(squarefree_part(-12), -3);
        assert_eq!(squarefree_part(-9), -1);
        assert_eq!(squarefree_part(4), 1);
        assert_eq!(squarefree_part(50), 2);
    }

    #[test]
    fn totients() {
        assert_eq!(totient(1), 1);
        assert_eq!(totient(12), 4);
        assert_eq!(totient(66), 20);
        assert_eq!(lcm_range(&[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12]), 2520);
    }
}
