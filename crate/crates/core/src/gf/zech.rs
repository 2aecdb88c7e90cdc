//! Log-domain arithmetic for the point-counting hot loop.
//!
//! A nonzero element is its discrete log `k` (so `g^k`), zero is
//! [`ZERO_LOG`]. Multiplication adds logs; addition goes through the Zech
//! table `zech[k] = log(1 + g^k)`.

use super::{FieldCtx, FieldElement, RootCount};

/// Encoding of the zero element.
pub const ZERO_LOG: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct ZechField {
    p: u32,
    n: u32,
    q: u32,
    qm1: u32,
    neg_one: u32,
    zech: Vec<u32>,
    frob: Vec<u32>,
    log: Vec<u32>,
    exp: Vec<u32>,
}

impl ZechField {
    pub(super) fn new(ctx: &FieldCtx, exp: &[u32], log: &[u32]) -> ZechField {
        let p = ctx.p() as u32;
        let q = ctx.q() as u32;
        let qm1 = q - 1;
        let zech = exp
            .iter()
            .map(|&e| {
                // packed index of 1 + e: bump the constant digit
                let d0 = e % p;
                let one_plus = e - d0 + (d0 + 1) % p;
                if one_plus == 0 {
                    ZERO_LOG
                } else {
                    log[one_plus as usize]
                }
            })
            .collect();
        let frob = (0..qm1).map(|k| ((k as u64 * p as u64) % qm1 as u64) as u32).collect();
        let neg_one = if p == 2 { 0 } else { qm1 / 2 };
        ZechField {
            p,
            n: ctx.degree() as u32,
            q,
            qm1,
            neg_one,
            zech,
            frob,
            log: log.to_vec(),
            exp: exp.to_vec(),
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Order of the multiplicative group.
    pub fn group_order(&self) -> u32 {
        self.qm1
    }

    pub fn one(&self) -> u32 {
        0
    }

    pub fn to_log(&self, a: FieldElement) -> u32 {
        if a.is_zero() {
            ZERO_LOG
        } else {
            self.log[a.index() as usize]
        }
    }

    pub fn to_element(&self, l: u32) -> FieldElement {
        if l == ZERO_LOG {
            FieldElement::ZERO
        } else {
            FieldElement(self.exp[l as usize] as u64)
        }
    }

    /// Log of an integer reduced into the prime field.
    pub fn from_int(&self, v: i64) -> u32 {
        let r = v.rem_euclid(self.p as i64) as u32;
        if r == 0 {
            ZERO_LOG
        } else {
            self.log[r as usize]
        }
    }

    #[inline(always)]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == ZERO_LOG || b == ZERO_LOG {
            return ZERO_LOG;
        }
        let s = a + b;
        if s >= self.qm1 {
            s - self.qm1
        } else {
            s
        }
    }

    #[inline(always)]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if a == ZERO_LOG {
            return b;
        }
        if b == ZERO_LOG {
            return a;
        }
        let d = if b >= a { b - a } else { b + self.qm1 - a };
        // SAFETY-free: d < qm1 and the table has qm1 entries
        let z = self.zech[d as usize];
        if z == ZERO_LOG {
            return ZERO_LOG;
        }
        let s = a + z;
        if s >= self.qm1 {
            s - self.qm1
        } else {
            s
        }
    }

    #[inline(always)]
    pub fn neg(&self, a: u32) -> u32 {
        if a == ZERO_LOG {
            return ZERO_LOG;
        }
        let s = a + self.neg_one;
        if s >= self.qm1 {
            s - self.qm1
        } else {
            s
        }
    }

    #[inline(always)]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline(always)]
    pub fn inv(&self, a: u32) -> u32 {
        debug_assert!(a != ZERO_LOG);
        if a == 0 {
            0
        } else {
            self.qm1 - a
        }
    }

    #[inline(always)]
    pub fn frobenius(&self, a: u32) -> u32 {
        if a == ZERO_LOG {
            ZERO_LOG
        } else {
            self.frob[a as usize]
        }
    }

    /// `a^e` for `e >= 0` in log form.
    #[inline(always)]
    pub fn pow(&self, a: u32, e: u32) -> u32 {
        if a == ZERO_LOG {
            return if e == 0 { 0 } else { ZERO_LOG };
        }
        ((a as u64 * e as u64) % self.qm1 as u64) as u32
    }

    /// Distinct roots of `c[4] w^4 + ... + c[0]` (logs) in the field.
    ///
    /// Computes `w^q mod f` by `n` applications of the semilinear Frobenius
    /// `r(w) -> r(w)^p`, using `w^{jp} mod f` for `j < deg f`, then takes
    /// `deg gcd(f, w^q - w)`.
    pub fn count_roots(&self, c: &[u32; 5]) -> RootCount {
        let d = match c.iter().rposition(|&a| a != ZERO_LOG) {
            None => return RootCount::AllElements,
            Some(d) => d,
        };
        match d {
            0 => return RootCount::Finite(0),
            1 => return RootCount::Finite(1),
            _ => {}
        }
        // monic f = w^d + f[d-1] w^{d-1} + ... + f[0]
        let lead_inv = self.inv(c[d]);
        let mut f = [ZERO_LOG; 4];
        for i in 0..d {
            f[i] = self.mul(c[i], lead_inv);
        }
        if d == 2 && self.p != 2 {
            // quadratic in odd characteristic: discriminant square class
            let disc = self.sub(self.mul(f[1], f[1]), self.mul(self.from_int(4), f[0]));
            return RootCount::Finite(if disc == ZERO_LOG {
                1
            } else if disc % 2 == 0 {
                2
            } else {
                0
            });
        }
        let p = self.p as usize;
        // powers w^0 .. w^{(d-1)p} reduced mod f
        let top = (d - 1) * p;
        let mut powers = [[ZERO_LOG; 4]; 4];
        let mut cur = [ZERO_LOG; 4];
        cur[0] = 0;
        let mut row = 0;
        for k in 0..=top {
            if k % p == 0 {
                powers[row] = cur;
                row += 1;
            }
            if k == top {
                break;
            }
            // cur <- w * cur mod f
            let spill = cur[d - 1];
            let mut next = [ZERO_LOG; 4];
            for i in (1..d).rev() {
                next[i] = cur[i - 1];
            }
            next[0] = ZERO_LOG;
            if spill != ZERO_LOG {
                for i in 0..d {
                    next[i] = self.sub(next[i], self.mul(spill, f[i]));
                }
            }
            cur = next;
        }
        // r = w, then r <- Frob(r) n times
        let mut r = [ZERO_LOG; 4];
        r[1] = 0;
        for _ in 0..self.n {
            let mut next = [ZERO_LOG; 4];
            next[0] = self.frobenius(r[0]);
            for j in 1..d {
                let fj = self.frobenius(r[j]);
                if fj == ZERO_LOG {
                    continue;
                }
                let mj = &powers[j];
                for i in 0..d {
                    next[i] = self.add(next[i], self.mul(fj, mj[i]));
                }
            }
            r = next;
        }
        // g = r - w
        r[1] = self.sub(r[1], 0);
        let mut a = [ZERO_LOG; 5];
        a[..d].copy_from_slice(&f[..d]);
        a[d] = 0;
        let mut b = [ZERO_LOG; 5];
        b[..d].copy_from_slice(&r[..d]);
        let g = self.gcd_degree(a, d, b);
        RootCount::Finite(g as u32)
    }

    /// Degree of gcd(a, b) where `a` has exact degree `da` and `deg b < da`.
    fn gcd_degree(&self, mut a: [u32; 5], mut da: usize, mut b: [u32; 5]) -> usize {
        loop {
            let db = match b[..da].iter().rposition(|&x| x != ZERO_LOG) {
                None => return da,
                Some(db) => db,
            };
            if db == 0 {
                return 0;
            }
            // a <- a mod b
            let inv = self.inv(b[db]);
            let mut k = da;
            loop {
                if a[k] != ZERO_LOG {
                    let factor = self.mul(a[k], inv);
                    let shift = k - db;
                    for i in 0..=db {
                        a[shift + i] = self.sub(a[shift + i], self.mul(factor, b[i]));
                    }
                }
                if k == db {
                    break;
                }
                k -= 1;
            }
            let mut next_a = b;
            for x in next_a.iter_mut().skip(db + 1) {
                *x = ZERO_LOG;
            }
            let mut next_b = [ZERO_LOG; 5];
            next_b[..db].copy_from_slice(&a[..db]);
            a = next_a;
            da = db;
            b = next_b;
        }
    }
}
