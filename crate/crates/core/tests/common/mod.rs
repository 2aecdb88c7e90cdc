//! Slow, independent oracles for the acceptance suite. Nothing here uses the
//! library's field arithmetic or counting code.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// GF(p^n) for n <= 3, elements as base-p digit vectors packed in a u64.
pub struct SmallField {
    pub p: u64,
    pub n: u32,
    /// Monic modulus, lowest coefficient first, without the leading 1.
    modulus: Vec<u64>,
}

impl SmallField {
    pub fn new(p: u64, n: u32) -> SmallField {
        assert!((1..=3).contains(&n));
        let mut f = SmallField {
            p,
            n,
            modulus: vec![0; n as usize],
        };
        if n == 1 {
            return f;
        }
        // degree 2 and 3: irreducible iff no root in GF(p)
        for code in 0..p.pow(n) {
            let m = f.digits(code);
            let no_root = (0..p).all(|x| {
                let mut acc = 0u64;
                let mut pw = 1u64;
                for c in &m {
                    acc = (acc + c * pw) % p;
                    pw = pw * x % p;
                }
                (acc + pw) % p != 0
            });
            if no_root {
                f.modulus = m;
                return f;
            }
        }
        unreachable!("irreducible polynomials exist")
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.n)
    }

    fn digits(&self, mut a: u64) -> Vec<u64> {
        (0..self.n)
            .map(|_| {
                let d = a % self.p;
                a /= self.p;
                d
            })
            .collect()
    }

    fn pack(&self, d: &[u64]) -> u64 {
        d.iter().rev().fold(0, |acc, &x| acc * self.p + x)
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (x, y) = (self.digits(a), self.digits(b));
        let s: Vec<u64> = x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect();
        self.pack(&s)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let (x, y) = (self.digits(a), self.digits(b));
        let n = self.n as usize;
        let mut prod = vec![0u64; 2 * n];
        for i in 0..n {
            for j in 0..n {
                prod[i + j] = (prod[i + j] + x[i] * y[j]) % self.p;
            }
        }
        // reduce x^k for k >= n using x^n = -modulus
        for k in (n..2 * n).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (i, m) in self.modulus.iter().enumerate() {
                prod[k - n + i] = (prod[k - n + i] + (self.p - m % self.p) * c) % self.p;
            }
        }
        self.pack(&prod[..n])
    }

    pub fn from_int(&self, c: u64) -> u64 {
        c % self.p
    }

    pub fn pow(&self, a: u64, e: u32) -> u64 {
        (0..e).fold(1, |acc, _| self.mul(acc, a))
    }
}

/// Points of `P^3(GF(q))` on `sum c_i m_i = 0`, by enumerating every point.
pub fn brute_count(field: &SmallField, terms: &[([u32; 4], u64)]) -> u64 {
    let q = field.q();
    let mut n = 0;
    for lead in 0..4usize {
        let free = 3 - lead as u32;
        for mut code in 0..q.pow(free) {
            let mut pt = [0u64; 4];
            pt[lead] = 1;
            for slot in pt.iter_mut().skip(lead + 1) {
                *slot = code % q;
                code /= q;
            }
            let mut acc = 0;
            for (e, c) in terms {
                let mut t = field.from_int(*c);
                for i in 0..4 {
                    t = field.mul(t, field.pow(pt[i], e[i]));
                }
                acc = field.add(acc, t);
            }
            if acc == 0 {
                n += 1;
            }
        }
    }
    n
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

fn det(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut d = BigRational::one();
    for c in 0..n {
        let Some(r) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return BigRational::zero();
        };
        if r != c {
            m.swap(r, c);
            d = -d;
        }
        d *= &m[c][c];
        for r in c + 1..n {
            let f = &m[r][c] / &m[c][c];
            for k in c..n {
                let v = &f * &m[c][k];
                m[r][k] -= v;
            }
        }
    }
    d
}

/// `det(x I - A)` by evaluation at `0..=d` and Lagrange interpolation,
/// lowest degree first.
pub fn charpoly_by_determinant(a: &[Vec<i64>]) -> Vec<BigRational> {
    let d = a.len();
    let xs: Vec<i64> = (0..=d as i64).collect();
    let ys: Vec<BigRational> = xs
        .iter()
        .map(|&x| {
            let m = (0..d)
                .map(|i| (0..d).map(|j| rat(if i == j { x } else { 0 } - a[i][j])).collect())
                .collect();
            det(m)
        })
        .collect();
    let mut out = vec![BigRational::zero(); d + 1];
    for (i, &xi) in xs.iter().enumerate() {
        let mut basis = vec![BigRational::one()];
        let mut den = BigRational::one();
        for &xj in &xs {
            if xj == xi {
                continue;
            }
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (k, b) in basis.iter().enumerate() {
                next[k + 1] += b;
                next[k] -= b * rat(xj);
            }
            basis = next;
            den *= rat(xi - xj);
        }
        for (k, b) in basis.iter().enumerate() {
            out[k] += b * &ys[i] / &den;
        }
    }
    out
}

/// `tr(A^k)` for `k = 1..=n`.
pub fn power_traces(a: &[Vec<i64>], n: usize) -> Vec<BigInt> {
    let d = a.len();
    let a: Vec<Vec<BigInt>> = a.iter().map(|r| r.iter().map(|&x| x.into()).collect()).collect();
    let mut pw = a.clone();
    let mut out = vec![];
    for _ in 0..n {
        out.push((0..d).map(|i| pw[i][i].clone()).sum());
        pw = (0..d)
            .map(|i| (0..d).map(|j| (0..d).map(|k| &pw[i][k] * &a[k][j]).sum()).collect())
            .collect();
    }
    out
}

fn pmul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Product of small integer polynomials, lowest degree first.
pub fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `F(x(t), y(t), z(t), w(t))` for an integer quartic given by its terms.
pub fn substitute(terms: &[([u32; 4], BigInt)], coords: &[Vec<i64>; 4]) -> Vec<BigInt> {
    let c: Vec<Vec<BigInt>> = coords.iter().map(|v| v.iter().map(|&x| x.into()).collect()).collect();
    let mut acc = vec![BigInt::zero()];
    for (e, k) in terms {
        let mut t = vec![k.clone()];
        for i in 0..4 {
            for _ in 0..e[i] {
                t = pmul(&t, &c[i]);
            }
        }
        if acc.len() < t.len() {
            acc.resize(t.len(), BigInt::zero());
        }
        for (i, v) in t.into_iter().enumerate() {
            acc[i] += v;
        }
    }
    acc
}

/// `scale * prod f_i^{e_i}` with factors given highest degree first, as a
/// dense polynomial lowest degree first.
pub fn expand_product(scale: BigRational, factors: &[(&[i64], u32)]) -> Vec<BigRational> {
    let mut acc = vec![BigInt::one()];
    for (f, e) in factors {
        let low: Vec<BigInt> = f.iter().rev().map(|&x| x.into()).collect();
        for _ in 0..*e {
            acc = pmul(&acc, &low);
        }
    }
    acc.into_iter().map(|c| BigRational::from_integer(c) * &scale).collect()
}
