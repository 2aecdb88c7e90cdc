//! Dense polynomials over the prime field GF(p), low degree first.
//!
//! Only used for modulus selection and the polynomial-basis element
//! arithmetic; the counting kernel never touches these.

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

pub(crate) fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        (a as u128 + p as u128 - b as u128) as u64
    }
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

pub(crate) fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub(crate) fn degree(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = add_mod(out[i + j], mul_mod(x, y, p), p);
        }
    }
    trim(&mut out);
    out
}

/// Remainder of `a` modulo the nonzero polynomial `m`.
pub(crate) fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = degree(m).expect("division by zero polynomial");
    let lead_inv = inv_mod(m[dm], p);
    while let Some(dr) = degree(&r) {
        if dr < dm {
            break;
        }
        let factor = mul_mod(r[dr], lead_inv, p);
        let shift = dr - dm;
        for (i, &c) in m.iter().enumerate().take(dm + 1) {
            r[shift + i] = sub_mod(r[shift + i], mul_mod(factor, c, p), p);
        }
        trim(&mut r);
    }
    r
}

pub(crate) fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let len = a.len().max(b.len());
    let mut out: Vec<u64> = (0..len)
        .map(|i| sub_mod(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0), p))
        .collect();
    trim(&mut out);
    out
}

pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// `base^exp mod m` by square and multiply.
pub(crate) fn pow_mod_poly(base: &[u64], mut exp: u128, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = rem(base, m, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = rem(&mul(&acc, &b, p), m, p);
        }
        exp >>= 1;
        if exp > 0 {
            b = rem(&mul(&b, &b, p), m, p);
        }
    }
    acc
}

/// Rabin-style irreducibility test: `x^{p^n} = x mod m` and
/// `gcd(x^{p^k} - x, m) = 1` for every proper divisor `k` of `n`.
pub(crate) fn is_irreducible(m: &[u64], p: u64) -> bool {
    let n = match degree(m) {
        Some(d) if d >= 1 => d,
        _ => return false,
    };
    if n == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    // x^{p^k} mod m for k = 1..n by repeated p-th powers
    let mut frob = Vec::with_capacity(n);
    let mut cur = x.clone();
    for _ in 0..n {
        cur = pow_mod_poly(&cur, p as u128, m, p);
        frob.push(cur.clone());
    }
    if sub(&frob[n - 1], &x, p) != Vec::<u64>::new() {
        return false;
    }
    for k in 1..n {
        if n % k != 0 {
            continue;
        }
        let g = gcd(m, &sub(&frob[k - 1], &x, p), p);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irreducibility_small_cases() {
        // x^2 + x + 1 over GF(2)
        assert!(is_irreducible(&[1, 1, 1], 2));
        // x^2 + 1 = (x+1)^2 over GF(2)
        assert!(!is_irreducible(&[1, 0, 1], 2));
        // x^2 + 1 over GF(3)
        assert!(is_irreducible(&[1, 0, 1], 3));
        // x^4 + x^2 + 1 = (x^2+x+1)^2 over GF(2)
        assert!(!is_irreducible(&[1, 0, 1, 0, 1], 2));
    }

    #[test]
    fn gcd_and_rem() {
        let a = mul(&[1, 1], &[2, 1], 3);
        let b = mul(&[1, 1], &[0, 1], 3);
        assert_eq!(degree(&gcd(&a, &b, 3)), Some(1));
        assert!(rem(&a, &[1, 1], 3).is_empty());
    }
}
