//! Elliptic curves over Q in long Weierstrass form and their group law.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeierstrassCurve {
    #[serde(with = "crate::json::rational_vec")]
    pub a: Vec<Q>,
}

/// A rational point; `None` is the point at infinity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point(#[serde(with = "opt_pair")] pub Option<(Q, Q)>);

mod opt_pair {
    use super::Q;
    use crate::json::{rational_to_value, value_to_rational};
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use serde_json::Value;

    pub fn serialize<S: Serializer>(v: &Option<(Q, Q)>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            None => Value::String("O".into()).serialize(s),
            Some((x, y)) => Value::Array(vec![rational_to_value(x), rational_to_value(y)]).serialize(s),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<(Q, Q)>, D::Error> {
        match Value::deserialize(d)? {
            Value::String(s) if s == "O" => Ok(None),
            Value::Array(v) if v.len() == 2 => {
                let x = value_to_rational(&v[0]).ok_or_else(|| D::Error::custom("bad x"))?;
                let y = value_to_rational(&v[1]).ok_or_else(|| D::Error::custom("bad y"))?;
                Ok(Some((x, y)))
            }
            _ => Err(D::Error::custom("expected \"O\" or [x, y]")),
        }
    }
}

impl Point {
    pub const INFINITY: Point = Point(None);

    pub fn affine(x: Q, y: Q) -> Point {
        Point(Some((x, y)))
    }

    pub fn is_infinity(&self) -> bool {
        self.0.is_none()
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.0 {
            None => write!(f, "O"),
            Some((x, y)) => write!(f, "({x}, {y})"),
        }
    }
}

impl WeierstrassCurve {
    pub fn new(a1: Q, a2: Q, a3: Q, a4: Q, a6: Q) -> WeierstrassCurve {
        WeierstrassCurve {
            a: vec![a1, a2, a3, a4, a6],
        }
    }

    pub fn from_ints(a: [i64; 5]) -> WeierstrassCurve {
        let [a1, a2, a3, a4, a6] = a.map(q);
        WeierstrassCurve::new(a1, a2, a3, a4, a6)
    }

    pub fn a1(&self) -> &Q {
        &self.a[0]
    }
    pub fn a2(&self) -> &Q {
        &self.a[1]
    }
    pub fn a3(&self) -> &Q {
        &self.a[2]
    }
    pub fn a4(&self) -> &Q {
        &self.a[3]
    }
    pub fn a6(&self) -> &Q {
        &self.a[4]
    }

    pub fn b2(&self) -> Q {
        self.a1() * self.a1() + q(4) * self.a2()
    }
    pub fn b4(&self) -> Q {
        q(2) * self.a4() + self.a1() * self.a3()
    }
    pub fn b6(&self) -> Q {
        self.a3() * self.a3() + q(4) * self.a6()
    }
    pub fn b8(&self) -> Q {
        let [a1, a2, a3, a4, a6] = [self.a1(), self.a2(), self.a3(), self.a4(), self.a6()];
        a1 * a1 * a6 + q(4) * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    }
    pub fn c4(&self) -> Q {
        let b2 = self.b2();
        &b2 * &b2 - q(24) * self.b4()
    }
    pub fn c6(&self) -> Q {
        let b2 = self.b2();
        -(&b2 * &b2 * &b2) + q(36) * &b2 * self.b4() - q(216) * self.b6()
    }
    pub fn discriminant(&self) -> Q {
        let (b2, b4, b6, b8) = (self.b2(), self.b4(), self.b6(), self.b8());
        -(&b2 * &b2 * &b8) - q(8) * &b4 * &b4 * &b4 - q(27) * &b6 * &b6 + q(9) * &b2 * &b4 * &b6
    }
    pub fn j_invariant(&self) -> Q {
        let c4 = self.c4();
        &c4 * &c4 * &c4 / self.discriminant()
    }

    pub fn is_singular(&self) -> bool {
        self.discriminant().is_zero()
    }

    /// `y^2 + a1 x y + a3 y - (x^3 + a2 x^2 + a4 x + a6)` at `(x, y)`.
    pub fn residual(&self, x: &Q, y: &Q) -> Q {
        y * y + self.a1() * x * y + self.a3() * y - (x * x * x + self.a2() * x * x + self.a4() * x + self.a6())
    }

    pub fn contains(&self, p: &Point) -> bool {
        match &p.0 {
            None => true,
            Some((x, y)) => self.residual(x, y).is_zero(),
        }
    }

    pub fn neg(&self, p: &Point) -> Point {
        match &p.0 {
            None => Point::INFINITY,
            Some((x, y)) => Point::affine(x.clone(), -y - self.a1() * x - self.a3()),
        }
    }

    pub fn add(&self, p1: &Point, p2: &Point) -> Point {
        let (Some((x1, y1)), Some((x2, y2))) = (&p1.0, &p2.0) else {
            return if p1.is_infinity() { p2.clone() } else { p1.clone() };
        };
        let lambda;
        let nu;
        if x1 == x2 {
            if (y1 + y2 + self.a1() * x2 + self.a3()).is_zero() {
                return Point::INFINITY;
            }
            let num = q(3) * x1 * x1 + q(2) * self.a2() * x1 + self.a4() - self.a1() * y1;
            let den = q(2) * y1 + self.a1() * x1 + self.a3();
            lambda = &num / &den;
            let num2 = -(x1 * x1 * x1) + self.a4() * x1 + q(2) * self.a6() - self.a3() * y1;
            nu = num2 / den;
        } else {
            lambda = (y2 - y1) / (x2 - x1);
            nu = (y1 * x2 - y2 * x1) / (x2 - x1);
        }
        let x3 = &lambda * &lambda + self.a1() * &lambda - self.a2() - x1 - x2;
        let y3 = -(&lambda + self.a1()) * &x3 - &nu - self.a3();
        Point::affine(x3, y3)
    }

    pub fn sub(&self, p1: &Point, p2: &Point) -> Point {
        self.add(p1, &self.neg(p2))
    }

    pub fn scalar_mul(&self, m: i64, p: &Point) -> Point {
        let mut base = if m < 0 { self.neg(p) } else { p.clone() };
        let mut k = m.unsigned_abs();
        let mut acc = Point::INFINITY;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// Model with the `a_i` scaled by `u^i`, `u` the lcm of the
    /// denominators: `(x, y) -> (u^2 x, u^3 y)`. Not necessarily minimal.
    pub fn integral_model(&self) -> (WeierstrassCurve, BigInt) {
        let u = self.a.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let ur = Q::from_integer(u.clone());
        let scaled = [1usize, 2, 3, 4, 6]
            .iter()
            .zip(&self.a)
            .map(|(&w, a)| a * num_traits::pow(ur.clone(), w))
            .collect();
        (WeierstrassCurve { a: scaled }, u)
    }

    pub fn is_integral(&self) -> bool {
        self.a.iter().all(|c| c.is_integer())
    }

    /// Point transported by `(x, y) -> (u^2 x, u^3 y)`.
    pub fn scale_point(p: &Point, u: &BigInt) -> Point {
        match &p.0 {
            None => Point::INFINITY,
            Some((x, y)) => {
                let u = Q::from_integer(u.clone());
                Point::affine(x * &u * &u, y * &u * &u * &u)
            }
        }
    }

    pub fn integer_coeffs(&self) -> Option<[BigInt; 5]> {
        if !self.is_integral() {
            return None;
        }
        Some(std::array::from_fn(|i| self.a[i].to_integer()))
    }
}

impl std::fmt::Display for WeierstrassCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "y^2")?;
        for (c, m) in [(self.a1(), " x y"), (self.a3(), " y")] {
            write_term(f, c, m)?;
        }
        write!(f, " = x^3")?;
        for (c, m) in [(self.a2(), " x^2"), (self.a4(), " x"), (self.a6(), "")] {
            write_term(f, c, m)?;
        }
        Ok(())
    }
}

fn write_term(f: &mut std::fmt::Formatter<'_>, c: &Q, m: &str) -> std::fmt::Result {
    if c.is_zero() {
        return Ok(());
    }
    let sign = if c.is_negative() { "-" } else { "+" };
    let a = c.abs();
    if a.is_one() && !m.is_empty() {
        write!(f, " {sign}{m}")
    } else {
        write!(f, " {sign} {a}{m}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(x: i64, y: i64) -> Point {
        Point::affine(q(x), q(y))
    }

    #[test]
    fn identity_and_inverse() {
        let e = WeierstrassCurve::from_ints([0, 0, 0, 0, 1]);
        let p = pt(2, 3);
        assert!(e.contains(&p));
        assert_eq!(e.add(&p, &Point::INFINITY), p);
        assert_eq!(e.add(&p, &e.neg(&p)), Point::INFINITY);
    }

    #[test]
    fn order_six_point() {
        let e = WeierstrassCurve::from_ints([0, 0, 0, 0, 1]);
        let p = pt(2, 3);
        assert_eq!(e.scalar_mul(2, &p), pt(0, 1));
        // brute force: first m with m P = O
        let order = (1..=20).find(|&m| e.scalar_mul(m, &p).is_infinity());
        assert_eq!(order, Some(6));
        assert_eq!(e.scalar_mul(3, &p), pt(-1, 0));
    }

    #[test]
    fn invariants_of_small_curves() {
        let e = WeierstrassCurve::from_ints([0, 0, 0, 0, 1]);
        assert_eq!(e.discriminant(), q(-432));
        assert_eq!(e.j_invariant(), q(0));
        let e = WeierstrassCurve::from_ints([0, -1, 1, -10, -20]);
        assert_eq!(e.discriminant(), q(-161051));
        let e = WeierstrassCurve::from_ints([0, 0, 0, -1, 0]);
        assert_eq!(e.j_invariant(), q(1728));
    }

    #[test]
    fn integral_model_scales() {
        let e = WeierstrassCurve::new(q(0), qf(1, 2), q(0), q(0), qf(1, 4));
        let p = Point::affine(q(0), qf(1, 2));
        assert!(e.contains(&p));
        let (m, u) = e.integral_model();
        assert!(m.is_integral());
        assert_eq!(u, BigInt::from(4));
        assert!(m.contains(&WeierstrassCurve::scale_point(&p, &u)));
        assert_eq!(m.j_invariant(), e.j_invariant());
    }

    #[test]
    fn display() {
        let e = WeierstrassCurve::from_ints([1, 0, 1, 4, -6]);
        assert_eq!(e.to_string(), "y^2 + x y + y = x^3 + 4 x - 6");
    }

    fn points_of(e: &WeierstrassCurve, bound: i64) -> Vec<Point> {
        // integral points with |x| <= bound
        let mut out = Vec::new();
        for x in -bound..=bound {
            for y in -200..=200 {
                let p = pt(x, y);
                if e.contains(&p) {
                    out.push(p);
                }
            }
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn associativity_and_linearity(i in 0usize..100, j in 0usize..100, k in 0usize..100, m in -6i64..6, n in -6i64..6) {
            // 37a: rank one, plenty of small points
            let e = WeierstrassCurve::from_ints([0, 0, 1, -1, 0]);
            let pts = points_of(&e, 6);
            let (a, b, c) = (&pts[i % pts.len()], &pts[j % pts.len()], &pts[k % pts.len()]);
            let lhs = e.add(&e.add(a, b), c);
            let rhs = e.add(a, &e.add(b, c));
            prop_assert_eq!(&lhs, &rhs);
            prop_assert!(e.contains(&lhs));
            prop_assert_eq!(
                e.scalar_mul(m + n, a),
                e.add(&e.scalar_mul(m, a), &e.scalar_mul(n, a))
            );
        }
    }
}
