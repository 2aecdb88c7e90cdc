//! Arithmetic in GF(p^n).
//!
//! Elements of [`FieldCtx`] are stored as their coefficient vector in the
//! modulus basis, packed into a single integer `sum c_i p^i`. That encoding
//! is canonical: zero is `0` and one is `1`. When `q = p^n` fits the table
//! budget the context also carries discrete log/antilog tables, which
//! accelerate multiplication and feed the [`ZechField`] used by the point
//! counter.

mod fp_poly;
mod zech;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{factor_u64, is_prime_u64};

pub use zech::{ZechField, ZERO_LOG};

/// Default bound on `q` for building log tables.
pub const DEFAULT_TABLE_BUDGET: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not prime")]
    CompositeCharacteristic(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field size {p}^{n} overflows 64 bits")]
    Overflow { p: u64, n: usize },
    #[error("no irreducible polynomial of degree {n} over GF({p}) for seed {seed}")]
    IrreducibleSearchExhausted { p: u64, n: usize, seed: u64 },
    #[error("element index {0} out of range for the field")]
    OutOfRange(u64),
    #[error("zero has no inverse")]
    DivisionByZero,
}

/// An element of GF(p^n) in packed polynomial-basis form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FieldElement(u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);

    /// Packed index `sum c_i p^i`.
    pub fn index(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

#[derive(Debug, Clone)]
struct LogTables {
    /// `exp[k] = g^k` (packed index), `k < q - 1`
    exp: Vec<u32>,
    /// `log[a]` for nonzero packed `a`
    log: Vec<u32>,
    generator: u64,
}

/// A finite field GF(p^n) together with its defining modulus.
#[derive(Debug, Clone)]
pub struct FieldCtx {
    p: u64,
    n: usize,
    q: u64,
    seed: u64,
    /// monic, low degree first, length n + 1
    modulus: Vec<u64>,
    tables: Option<LogTables>,
}

/// Build GF(p^n) with the `seed`-th monic irreducible modulus in
/// lexicographic order (seed 0 is the smallest), using log tables when
/// `q <= 2^20`.
pub fn make_field(p: u64, n: usize, seed: u64) -> Result<FieldCtx, GfError> {
    FieldCtx::with_table_budget(p, n, seed, DEFAULT_TABLE_BUDGET)
}

impl FieldCtx {
    pub fn with_table_budget(p: u64, n: usize, seed: u64, table_budget: u64) -> Result<FieldCtx, GfError> {
        if !is_prime_u64(p) {
            return Err(GfError::CompositeCharacteristic(p));
        }
        if n == 0 {
            return Err(GfError::ZeroDegree);
        }
        let q = checked_pow(p, n).ok_or(GfError::Overflow { p, n })?;
        let modulus = find_modulus(p, n, seed)?;
        let mut ctx = FieldCtx {
            p,
            n,
            q,
            seed,
            modulus,
            tables: None,
        };
        if q <= table_budget && q <= u32::MAX as u64 {
            ctx.tables = Some(ctx.build_tables());
        }
        Ok(ctx)
    }

    /// Same field, same modulus, without log tables.
    pub fn without_tables(&self) -> FieldCtx {
        FieldCtx {
            tables: None,
            ..self.clone()
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Monic modulus, constant term first.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    /// Primitive element used for the log tables.
    pub fn generator(&self) -> Option<FieldElement> {
        self.tables.as_ref().map(|t| FieldElement(t.generator))
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    pub fn element(&self, index: u64) -> Result<FieldElement, GfError> {
        if index < self.q {
            Ok(FieldElement(index))
        } else {
            Err(GfError::OutOfRange(index))
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, v: i64) -> FieldElement {
        FieldElement((v as i128).rem_euclid(self.p as i128) as u64)
    }

    /// The class of `x` in the modulus basis (for n = 1 this is the root of
    /// the modulus, i.e. `-c_0`).
    pub fn primitive_root_of_modulus(&self) -> FieldElement {
        if self.n == 1 {
            FieldElement(fp_poly::sub_mod(0, self.modulus[0], self.p))
        } else {
            FieldElement(self.p)
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    pub fn coeffs(&self, a: FieldElement) -> Vec<u64> {
        let mut v = a.0;
        (0..self.n)
            .map(|_| {
                let c = v % self.p;
                v /= self.p;
                c
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> FieldElement {
        debug_assert!(coeffs.len() <= self.n);
        let mut idx = 0u64;
        for &c in coeffs.iter().rev() {
            idx = idx * self.p + c % self.p;
        }
        FieldElement(idx)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u64;
        let mut place = 1u64;
        for i in 0..self.n {
            let c = fp_poly::add_mod(x % self.p, y % self.p, self.p);
            out += c * place;
            x /= self.p;
            y /= self.p;
            if i + 1 < self.n {
                place *= self.p;
            }
        }
        FieldElement(out)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.p == 2 {
            return a;
        }
        let c: Vec<u64> = self
            .coeffs(a)
            .into_iter()
            .map(|c| fp_poly::sub_mod(0, c, self.p))
            .collect();
        self.from_coeffs(&c)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    /// Product via the log tables when present, else in the polynomial basis.
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        match &self.tables {
            Some(t) => {
                if a.0 == 0 || b.0 == 0 {
                    return FieldElement(0);
                }
                let qm1 = (self.q - 1) as u32;
                let mut s = t.log[a.0 as usize] + t.log[b.0 as usize];
                if s >= qm1 {
                    s -= qm1;
                }
                FieldElement(t.exp[s as usize] as u64)
            }
            None => self.mul_poly_basis(a, b),
        }
    }

    /// Schoolbook product reduced by the modulus.
    pub fn mul_poly_basis(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.n == 1 {
            return FieldElement(fp_poly::mul_mod(a.0, b.0, self.p));
        }
        let prod = fp_poly::mul(&self.coeffs(a), &self.coeffs(b), self.p);
        let r = fp_poly::rem(&prod, &self.modulus, self.p);
        self.from_coeffs(&r)
    }

    pub fn pow(&self, a: FieldElement, mut e: u128) -> FieldElement {
        let mut acc = self.one();
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(b, b);
            }
        }
        acc
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, GfError> {
        if a.is_zero() {
            return Err(GfError::DivisionByZero);
        }
        if let Some(t) = &self.tables {
            let qm1 = (self.q - 1) as u32;
            let l = t.log[a.0 as usize];
            let inv = if l == 0 { 0 } else { qm1 - l };
            return Ok(FieldElement(t.exp[inv as usize] as u64));
        }
        Ok(self.pow(a, self.q as u128 - 2))
    }

    /// The absolute Frobenius `a -> a^p`.
    pub fn frobenius(&self, a: FieldElement) -> FieldElement {
        self.pow(a, self.p as u128)
    }

    /// Discrete log to the table generator.
    pub fn log(&self, a: FieldElement) -> Option<u32> {
        let t = self.tables.as_ref()?;
        if a.is_zero() {
            None
        } else {
            Some(t.log[a.0 as usize])
        }
    }

    pub fn exp(&self, k: u32) -> Option<FieldElement> {
        let t = self.tables.as_ref()?;
        Some(FieldElement(t.exp[(k as u64 % (self.q - 1)) as usize] as u64))
    }

    fn build_tables(&self) -> LogTables {
        let q = self.q;
        let order = q - 1;
        let prime_factors: Vec<u64> = factor_u64(order).into_iter().map(|(r, _)| r).collect();
        let generator = (1..q)
            .find(|&g| {
                let g = FieldElement(g);
                prime_factors
                    .iter()
                    .all(|r| self.pow_poly(g, (order / r) as u128) != self.one())
            })
            .expect("multiplicative group is cyclic");
        let g = FieldElement(generator);
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![0u32; q as usize];
        let mut cur = self.one();
        for k in 0..order {
            exp.push(cur.0 as u32);
            log[cur.0 as usize] = k as u32;
            cur = self.mul_poly_basis(cur, g);
        }
        debug_assert_eq!(cur, self.one());
        LogTables { exp, log, generator }
    }

    fn pow_poly(&self, a: FieldElement, mut e: u128) -> FieldElement {
        let mut acc = self.one();
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_poly_basis(acc, b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul_poly_basis(b, b);
            }
        }
        acc
    }

    /// Log-domain view of this field for the counting kernel.
    pub fn zech(&self) -> Option<ZechField> {
        self.tables.as_ref().map(|t| ZechField::new(self, &t.exp, &t.log))
    }
}

fn checked_pow(p: u64, n: usize) -> Option<u64> {
    let mut q = 1u64;
    for _ in 0..n {
        q = q.checked_mul(p)?;
    }
    Some(q)
}

fn find_modulus(p: u64, n: usize, seed: u64) -> Result<Vec<u64>, GfError> {
    let exhausted = GfError::IrreducibleSearchExhausted { p, n, seed };
    if n == 1 {
        // every monic linear polynomial is irreducible; seed picks x + seed
        if seed >= p {
            return Err(exhausted);
        }
        return Ok(vec![seed, 1]);
    }
    let count = checked_pow(p, n).ok_or(GfError::Overflow { p, n })?;
    let mut found = 0u64;
    for idx in 0..count {
        let mut m = Vec::with_capacity(n + 1);
        let mut v = idx;
        for _ in 0..n {
            m.push(v % p);
            v /= p;
        }
        m.push(1);
        if m[0] == 0 {
            continue;
        }
        if fp_poly::is_irreducible(&m, p) {
            if found == seed {
                return Ok(m);
            }
            found += 1;
        }
    }
    Err(exhausted)
}

/// Number of distinct roots of a polynomial of degree at most 4 over a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootCount {
    /// `k` distinct roots in the field.
    Finite(u32),
    /// The polynomial is identically zero: every field element is a root.
    AllElements,
}

impl RootCount {
    /// Number of roots given the field size.
    pub fn value(self, q: u64) -> u64 {
        match self {
            RootCount::Finite(k) => k as u64,
            RootCount::AllElements => q,
        }
    }
}

/// Distinct roots of `c[4] w^4 + ... + c[0]` in the field, as
/// `deg gcd(f, w^q - w)` with `w^q mod f` by square and multiply.
///
/// Multiplicity is ignored: the caller counts distinct points.
pub fn count_quartic_roots(c: &[FieldElement; 5], ctx: &FieldCtx) -> RootCount {
    let d = match c.iter().rposition(|a| !a.is_zero()) {
        None => return RootCount::AllElements,
        Some(d) => d,
    };
    if d == 0 {
        return RootCount::Finite(0);
    }
    if d == 1 {
        return RootCount::Finite(1);
    }
    // univariate polynomials over GF(q), coefficients as FieldElement
    let lead_inv = ctx.inv(c[d]).expect("nonzero leading coefficient");
    let f: Vec<FieldElement> = c[..=d].iter().map(|&a| ctx.mul(a, lead_inv)).collect();
    let rem = |a: &[FieldElement]| -> Vec<FieldElement> { ext_rem(a, &f, ctx) };
    let mul = |a: &[FieldElement], b: &[FieldElement]| -> Vec<FieldElement> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![ctx.zero(); a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = ctx.add(out[i + j], ctx.mul(x, y));
            }
        }
        out
    };
    let w = vec![ctx.zero(), ctx.one()];
    let mut acc = vec![ctx.one()];
    let mut base = rem(&w);
    let mut e = ctx.q() as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = rem(&mul(&acc, &base));
        }
        e >>= 1;
        if e > 0 {
            base = rem(&mul(&base, &base));
        }
    }
    // acc - w
    acc.resize(acc.len().max(2), ctx.zero());
    acc[1] = ctx.sub(acc[1], ctx.one());
    let g = ext_gcd(&f, &acc, ctx);
    RootCount::Finite((g.len() - 1) as u32)
}

fn ext_trim(a: &mut Vec<FieldElement>) {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
}

fn ext_rem(a: &[FieldElement], m: &[FieldElement], ctx: &FieldCtx) -> Vec<FieldElement> {
    let mut r = a.to_vec();
    ext_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = ctx.inv(m[dm]).expect("monic modulus");
    while r.len() > dm {
        let dr = r.len() - 1;
        let factor = ctx.mul(r[dr], lead_inv);
        for i in 0..=dm {
            let k = dr - dm + i;
            r[k] = ctx.sub(r[k], ctx.mul(factor, m[i]));
        }
        ext_trim(&mut r);
    }
    r
}

fn ext_gcd(a: &[FieldElement], b: &[FieldElement], ctx: &FieldCtx) -> Vec<FieldElement> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    ext_trim(&mut x);
    ext_trim(&mut y);
    while !y.is_empty() {
        let r = ext_rem(&x, &y, ctx);
        x = y;
        y = r;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_roots(c: &[FieldElement; 5], ctx: &FieldCtx) -> RootCount {
        if c.iter().all(|a| a.is_zero()) {
            return RootCount::AllElements;
        }
        let k = ctx
            .elements()
            .filter(|&w| {
                let mut acc = ctx.zero();
                for &coef in c.iter().rev() {
                    acc = ctx.add(ctx.mul(acc, w), coef);
                }
                acc.is_zero()
            })
            .count();
        RootCount::Finite(k as u32)
    }

    #[test]
    fn prime_field_gf2() {
        let f = make_field(2, 1, 0).unwrap();
        assert_eq!(f.q(), 2);
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.mul(f.one(), f.one()), f.one());
        assert_eq!(f.add(f.one(), f.one()), f.zero());
    }

    #[test]
    fn gf4_generators_cube_to_one() {
        let f = make_field(2, 2, 0).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        for a in f.elements().skip(1) {
            assert_eq!(f.pow(a, 3), f.one());
        }
        let g = f.generator().unwrap();
        assert_ne!(f.frobenius(g), g);
    }

    #[test]
    fn gf3_10_modulus_verified() {
        let f = make_field(3, 10, 0).unwrap();
        assert_eq!(f.q(), 59049);
        let x = f.primitive_root_of_modulus();
        assert_eq!(f.pow(x, 59049), x);
        assert_eq!(f.without_tables().pow(x, 59049), x);
    }

    #[test]
    fn composite_and_overflow_rejected() {
        assert_eq!(make_field(4, 1, 0).unwrap_err(), GfError::CompositeCharacteristic(4));
        assert!(matches!(make_field(3, 50, 0), Err(GfError::Overflow { .. })));
        assert_eq!(make_field(3, 0, 0).unwrap_err(), GfError::ZeroDegree);
    }

    #[test]
    fn large_prime_field_without_tables() {
        let p = 18446744073709551557u64;
        let f = make_field(p, 1, 0).unwrap();
        assert!(!f.has_tables());
        let a = f.from_int(-1);
        assert_eq!(f.mul(a, a), f.one());
        assert_eq!(f.mul(f.inv(a).unwrap(), a), f.one());
    }

    #[test]
    fn frobenius_fixes_prime_subfield() {
        let f = make_field(2, 11, 0).unwrap();
        assert_eq!(f.frobenius(f.one()), f.one());
        assert_eq!(f.frobenius(f.zero()), f.zero());
    }

    #[test]
    fn frobenius_order_divides_degree() {
        let f = make_field(3, 5, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let a = f.element(rng.gen_range(0..f.q())).unwrap();
            let mut b = a;
            for _ in 0..5 {
                b = f.frobenius(b);
            }
            assert_eq!(a, b);
        }
    }

    #[test]
    fn fermat_little_in_extension() {
        let f = make_field(3, 6, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let a = f.element(rng.gen_range(1..f.q())).unwrap();
            assert_eq!(f.pow(a, f.q() as u128 - 1), f.one());
        }
    }

    #[test]
    fn seeds_give_distinct_moduli() {
        let a = make_field(2, 4, 0).unwrap();
        let b = make_field(2, 4, 1).unwrap();
        assert_eq!(a.modulus(), &[1, 1, 0, 0, 1]);
        assert_ne!(a.modulus(), b.modulus());
        assert!(make_field(2, 2, 5).is_err());
    }

    #[test]
    fn root_count_edge_cases() {
        for (p, n) in [(2, 3), (3, 2), (5, 1)] {
            let f = make_field(p, n, 0).unwrap();
            let z = f.zero();
            let one = f.one();
            assert_eq!(count_quartic_roots(&[z, z, z, z, one], &f), RootCount::Finite(1));
            assert_eq!(count_quartic_roots(&[one, z, z, z, z], &f), RootCount::Finite(0));
            assert_eq!(count_quartic_roots(&[z; 5], &f), RootCount::AllElements);
        }
    }

    #[test]
    fn root_count_exhaustive_small_fields() {
        // every polynomial of degree <= 4 over GF(2), GF(3), GF(4)
        for (p, n) in [(2u64, 1usize), (3, 1), (2, 2)] {
            let f = make_field(p, n, 0).unwrap();
            let q = f.q();
            for code in 0..q.pow(5) {
                let mut v = code;
                let c: [FieldElement; 5] = std::array::from_fn(|_| {
                    let e = FieldElement(v % q);
                    v /= q;
                    e
                });
                assert_eq!(count_quartic_roots(&c, &f), brute_roots(&c, &f));
            }
        }
    }

    #[test]
    fn root_count_random_gf81() {
        let f = make_field(3, 4, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let c: [FieldElement; 5] = std::array::from_fn(|_| FieldElement(rng.gen_range(0..f.q())));
            assert_eq!(count_quartic_roots(&c, &f), brute_roots(&c, &f));
        }
    }

    #[test]
    fn tables_agree_with_polynomial_basis() {
        for (p, n) in [(2u64, 8usize), (3, 5), (5, 3), (7, 2)] {
            let f = make_field(p, n, 0).unwrap();
            assert!(f.has_tables());
            let g = f.without_tables();
            for a in f.elements().step_by(7) {
                for b in f.elements().step_by(13) {
                    assert_eq!(f.mul(a, b), g.mul(a, b));
                }
                if !a.is_zero() {
                    assert_eq!(f.inv(a).unwrap(), g.inv(a).unwrap());
                }
            }
        }
    }

    proptest! {
        #[test]
        fn field_axioms_gf3_7(a in 0u64..2187, b in 0u64..2187, c in 0u64..2187) {
            let f = make_field(3, 7, 0).unwrap();
            let (a, b, c) = (FieldElement(a), FieldElement(b), FieldElement(c));
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.add(a, f.neg(a)), f.zero());
            if !a.is_zero() {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
            }
        }

        #[test]
        fn field_axioms_gf2_12(a in 0u64..4096, b in 0u64..4096, c in 0u64..4096) {
            let f = make_field(2, 12, 0).unwrap();
            let (a, b, c) = (FieldElement(a), FieldElement(b), FieldElement(c));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.mul(a, b), f.mul_poly_basis(a, b));
        }
    }
}
