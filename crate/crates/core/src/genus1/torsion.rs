//! Deciding whether a rational point has infinite order.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::curve::{Point, WeierstrassCurve, Q};
use super::Genus1Error;
use crate::arith::{divisors, is_prime_u64};

/// Possible orders of a rational torsion point.
pub const MAZUR_SET: [u32; 11] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12];

/// lcm of the Mazur set.
pub const MAZUR_LCM: u64 = 2520;

/// Good primes used by the reduction test unless told otherwise.
pub const DEFAULT_REDUCTION_PRIMES: usize = 2;

fn reduce(n: &BigInt, p: u64) -> u64 {
    n.mod_floor(&BigInt::from(p)).to_u64().expect("reduced")
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * b as u128 % p as u128) as u64;
        }
        b = (b as u128 * b as u128 % p as u128) as u64;
        e >>= 1;
    }
    acc
}

/// An integral Weierstrass model reduced mod a prime of good reduction.
#[derive(Debug, Clone)]
pub struct ReducedCurve {
    p: u64,
    a: [u64; 5],
}

/// `None` is the point at infinity.
pub type FpPoint = Option<(u64, u64)>;

impl ReducedCurve {
    /// `None` when `p` divides the discriminant.
    pub fn new(e: &WeierstrassCurve, p: u64) -> Option<ReducedCurve> {
        let a = e.integer_coeffs().expect("integral model");
        let disc = e.discriminant().to_integer();
        if reduce(&disc, p) == 0 {
            return None;
        }
        Some(ReducedCurve {
            p,
            a: std::array::from_fn(|i| reduce(&a[i], p)),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    fn m(&self, x: u64, y: u64) -> u64 {
        (x as u128 * y as u128 % self.p as u128) as u64
    }

    fn s(&self, x: u64, y: u64) -> u64 {
        (x + self.p - y) % self.p
    }

    fn ad(&self, x: u64, y: u64) -> u64 {
        (x + y) % self.p
    }

    fn inv(&self, x: u64) -> u64 {
        pow_mod(x, self.p - 2, self.p)
    }

    /// `y^2 + a1 x y + a3 y - (x^3 + a2 x^2 + a4 x + a6)`.
    fn residual(&self, x: u64, y: u64) -> u64 {
        let [a1, a2, a3, a4, a6] = self.a;
        let lhs = self.ad(self.m(y, y), self.m(y, self.ad(self.m(a1, x), a3)));
        let x2 = self.m(x, x);
        let rhs = self.ad(self.ad(self.m(x2, x), self.m(a2, x2)), self.ad(self.m(a4, x), a6));
        self.s(lhs, rhs)
    }

    pub fn contains(&self, pt: &FpPoint) -> bool {
        pt.map_or(true, |(x, y)| self.residual(x, y) == 0)
    }

    /// `#E(F_p)` by enumeration.
    pub fn order(&self) -> u64 {
        let mut n = 1;
        for x in 0..self.p {
            for y in 0..self.p {
                if self.residual(x, y) == 0 {
                    n += 1;
                }
            }
        }
        n
    }

    pub fn neg(&self, pt: &FpPoint) -> FpPoint {
        let [a1, _, a3, _, _] = self.a;
        pt.map(|(x, y)| (x, self.s(self.s(0, y), self.ad(self.m(a1, x), a3))))
    }

    pub fn add(&self, p1: &FpPoint, p2: &FpPoint) -> FpPoint {
        let (Some((x1, y1)), Some((x2, y2))) = (p1, p2) else {
            return p1.or(*p2);
        };
        let [a1, a2, a3, a4, _] = self.a;
        let (x1, y1, x2, y2) = (*x1, *y1, *x2, *y2);
        let lambda = if x1 != x2 {
            self.m(self.s(y2, y1), self.inv(self.s(x2, x1)))
        } else {
            let den = self.ad(self.ad(self.m(2, y1), self.m(a1, x1)), a3);
            if y1 != y2 || den == 0 {
                return None;
            }
            let num = self.s(
                self.ad(self.ad(self.m(3, self.m(x1, x1)), self.m(2, self.m(a2, x1))), a4),
                self.m(a1, y1),
            );
            self.m(num, self.inv(den))
        };
        let nu = self.s(y1, self.m(lambda, x1));
        let x3 = self.s(
            self.s(self.s(self.ad(self.m(lambda, lambda), self.m(a1, lambda)), a2), x1),
            x2,
        );
        let y3 = self.s(self.s(0, self.m(self.ad(lambda, a1), x3)), self.ad(nu, a3));
        Some((x3, y3))
    }

    pub fn mul(&self, m: u64, pt: &FpPoint) -> FpPoint {
        let (mut acc, mut base, mut k) = (None, *pt, m);
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// Reduction of a rational point of the integral model; points with `p`
    /// in the denominator reduce to `O`.
    pub fn reduce_point(&self, pt: &Point) -> FpPoint {
        let (x, y) = pt.0.as_ref()?;
        let r = |c: &Q| -> Option<u64> {
            let d = reduce(c.denom(), self.p);
            (d != 0).then(|| self.m(reduce(c.numer(), self.p), self.inv(d)))
        };
        Some((r(x)?, r(y)?))
    }

    /// Order of a point, found among the divisors of `#E(F_p)`.
    pub fn point_order(&self, pt: &FpPoint) -> u64 {
        let n = self.order();
        divisors(n)
            .into_iter()
            .find(|&d| self.mul(d, pt).is_none())
            .expect("Lagrange")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionEvidence {
    /// `(p, #E(F_p))` at good primes `p >= 3` of the integral model.
    pub primes: Vec<(u64, u64)>,
    pub gcd: u64,
    /// Every `m` dividing `gcd` has `m T != O`.
    pub divisors_checked: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum OrderVerdict {
    /// `m T != O` for every `m` in the Mazur set, and independently for
    /// every divisor of the gcd of the reduced group orders.
    InfiniteOrder {
        mazur_checked: Vec<u32>,
        reduction: ReductionEvidence,
    },
    FiniteOrder {
        order: u32,
    },
}

impl OrderVerdict {
    pub fn is_infinite(&self) -> bool {
        matches!(self, OrderVerdict::InfiniteOrder { .. })
    }
}

/// Torsion of `E(Q)` injects into `E(F_p)` for good `p >= 3`, so the order
/// of a torsion point divides the gcd of the group orders.
pub fn reduction_test(e: &WeierstrassCurve, t: &Point, primes: usize) -> ReductionEvidence {
    let (model, u) = e.integral_model();
    let t = WeierstrassCurve::scale_point(t, &u);
    let mut found = Vec::new();
    let mut p = 3u64;
    while found.len() < primes.max(2) {
        if is_prime_u64(p) {
            if let Some(r) = ReducedCurve::new(&model, p) {
                found.push((p, r.order()));
            }
        }
        p += 2;
    }
    let g = found.iter().fold(0u64, |g, &(_, n)| g.gcd(&n));
    let bad: Vec<u64> = divisors(g)
        .into_iter()
        .filter(|&m| model.scalar_mul(m as i64, &t).is_infinity())
        .collect();
    ReductionEvidence {
        primes: found,
        gcd: g,
        divisors_checked: if bad.is_empty() { divisors(g) } else { vec![] },
    }
}

/// Runs the Mazur-set test and the reduction test; they must agree.
pub fn infinite_order_certificate(e: &WeierstrassCurve, t: &Point, primes: usize) -> Result<OrderVerdict, Genus1Error> {
    if !e.contains(t) {
        return Err(Genus1Error::NotOnCurve);
    }
    let reduction = reduction_test(e, t, primes);
    let first = (1..=12).find(|&m| e.scalar_mul(m as i64, t).is_infinity());
    match first {
        Some(order) => {
            // the order divides every reduced group order
            if reduction.gcd % order as u64 != 0 {
                return Err(Genus1Error::MapCheck(format!(
                    "order {order} does not divide {}",
                    reduction.gcd
                )));
            }
            Ok(OrderVerdict::FiniteOrder { order })
        }
        None => {
            if reduction.divisors_checked.is_empty() && !reduction.gcd.is_zero() {
                return Err(Genus1Error::MapCheck("Mazur test and reduction test disagree".into()));
            }
            Ok(OrderVerdict::InfiniteOrder {
                mazur_checked: MAZUR_SET.to_vec(),
                reduction,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::lcm_range;
    use crate::genus1::curve::q;

    #[test]
    fn mazur_lcm() {
        let ms: Vec<u64> = MAZUR_SET.iter().map(|&m| m as u64).collect();
        assert_eq!(lcm_range(&ms), MAZUR_LCM);
    }

    #[test]
    fn order_six_point() {
        let e = WeierstrassCurve::from_ints([0, 0, 0, 0, 1]);
        let t = Point::affine(q(2), q(3));
        assert_eq!(
            infinite_order_certificate(&e, &t, 2).unwrap(),
            OrderVerdict::FiniteOrder { order: 6 }
        );
        let t = Point::affine(q(0), q(1));
        assert_eq!(
            infinite_order_certificate(&e, &t, 2).unwrap(),
            OrderVerdict::FiniteOrder { order: 3 }
        );
        assert!(e.scalar_mul(MAZUR_LCM as i64, &t).is_infinity());
    }

    #[test]
    fn torsion_orders_by_enumeration() {
        // points of orders 4, 5, 7, 8, 9, 10, 12 on classical curves
        let cases: [([i64; 5], (i64, i64), u32); 7] = [
            ([1, 1, 1, -10, -10], (-2, 3), 4),
            ([0, -1, 1, 0, 0], (0, 0), 5),
            ([1, -1, 1, -3, 3], (1, 0), 7),
            ([1, 1, 1, 35, -28], (2, 6), 8),
            ([1, -1, 1, -14, 29], (3, 1), 9),
            ([1, 0, 0, -45, 81], (0, 9), 10),
            ([1, -1, 1, -122, 1721], (-9, 49), 12),
        ];
        for (a, (x, y), n) in cases {
            let e = WeierstrassCurve::from_ints(a);
            let t = Point::affine(q(x), q(y));
            assert!(e.contains(&t), "{a:?}");
            let brute = (1..=12).find(|&m| e.scalar_mul(m, &t).is_infinity()).unwrap();
            assert_eq!(brute as u32, n);
            assert_eq!(
                infinite_order_certificate(&e, &t, 2).unwrap(),
                OrderVerdict::FiniteOrder { order: n }
            );
        }
    }

    #[test]
    fn generator_of_37a_has_infinite_order() {
        let e = WeierstrassCurve::from_ints([0, 0, 1, -1, 0]);
        let v = infinite_order_certificate(&e, &Point::affine(q(0), q(0)), 2).unwrap();
        let OrderVerdict::InfiniteOrder { reduction, .. } = v else {
            panic!("finite")
        };
        // 37a has trivial torsion; #E(F_3) = 7 and #E(F_5) = 8
        assert_eq!(reduction.primes, vec![(3, 7), (5, 8)]);
        assert_eq!(reduction.gcd, 1);
    }

    #[test]
    fn reduced_orders_match_trace_oracle() {
        // #E(F_p) = p + 1 - a_p with a_p = -sum of Legendre symbols for
        // y^2 = x^3 + a x + b
        let e = WeierstrassCurve::from_ints([0, 0, 0, -1, 1]);
        for p in [5u64, 7, 11, 13, 17, 19] {
            let r = ReducedCurve::new(&e, p).unwrap();
            let mut n = 1;
            for x in 0..p {
                let rhs = (x * x * x + p - x + 1) % p;
                n += if rhs == 0 {
                    1
                } else if pow_mod(rhs, (p - 1) / 2, p) == 1 {
                    2
                } else {
                    0
                };
            }
            assert_eq!(r.order(), n);
        }
    }

    #[test]
    fn reduced_point_orders_divide_group_orders() {
        let e = WeierstrassCurve::from_ints([0, 0, 1, -1, 0]);
        let g = Point::affine(q(0), q(0));
        for k in 1..6 {
            let pt = e.scalar_mul(k, &g);
            for p in [3u64, 5, 7, 11, 13] {
                let r = ReducedCurve::new(&e, p).unwrap();
                let red = r.reduce_point(&pt);
                assert!(r.contains(&red));
                assert_eq!(r.order() % r.point_order(&red), 0);
                // reduction is a homomorphism
                assert_eq!(r.reduce_point(&e.scalar_mul(2, &pt)), r.mul(2, &red));
                assert_eq!(r.add(&red, &r.neg(&red)), None);
            }
        }
    }
}
