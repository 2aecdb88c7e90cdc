//! Double covers `y^2 = q(t)` with `deg q` in {3, 4} and their Weierstrass
//! models.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::curve::{q, Point, WeierstrassCurve, Q};
use super::Genus1Error;

/// Square root in Q, if there is one.
pub fn rational_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let (n, d) = (x.numer(), x.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| Q::new(rn, rd))
}

pub fn eval(f: &[Q], t: &Q) -> Q {
    f.iter().rev().fold(Q::zero(), |acc, c| acc * t + c)
}

/// `f(t0 + u)` as a polynomial in `u`.
fn shift(f: &[Q], t0: &Q) -> Vec<Q> {
    let mut out = vec![Q::zero(); f.len()];
    for c in f.iter().rev() {
        // out = out * (u + t0) + c
        let mut next = vec![Q::zero(); f.len()];
        for (i, o) in out.iter().enumerate() {
            if i + 1 < next.len() {
                next[i + 1] += o;
            }
            next[i] += o * t0;
        }
        next[0] += c;
        out = next;
    }
    out
}

/// Coefficients padded to length 5, lowest first.
fn pad5(f: &[Q]) -> Vec<Q> {
    let mut v = f.to_vec();
    v.resize(5, Q::zero());
    v
}

/// The invariants `I, J` of `a t^4 + b t^3 + c t^2 + d t + e`.
pub fn quartic_invariants(f: &[Q]) -> (Q, Q) {
    let f = pad5(f);
    let (e, d, c, b, a) = (&f[0], &f[1], &f[2], &f[3], &f[4]);
    let i = q(12) * a * e - q(3) * b * d + c * c;
    let j = q(72) * a * c * e + q(9) * b * c * d - q(27) * a * d * d - q(27) * e * b * b - q(2) * c * c * c;
    (i, j)
}

/// `y^2 = q(t)` for a squarefree `q` of degree 3 or 4: a smooth genus one
/// curve with one (degree 3) or two (degree 4) points at infinity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleCover {
    #[serde(with = "crate::json::rational_vec")]
    pub q: Vec<Q>,
}

/// A point of a double cover. At infinity, `s` is the limit of `y / t^2`
/// (always 0 in degree 3).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "at", rename_all = "snake_case")]
pub enum CoverPoint {
    Affine {
        #[serde(with = "crate::json::rational")]
        t: Q,
        #[serde(with = "crate::json::rational")]
        y: Q,
    },
    Infinity {
        #[serde(with = "crate::json::rational")]
        s: Q,
    },
}

impl DoubleCover {
    pub fn new(mut f: Vec<Q>) -> Result<DoubleCover, Genus1Error> {
        while f.last().is_some_and(|c| c.is_zero()) {
            f.pop();
        }
        let bad = || Genus1Error::NotGenusOne(super::show_poly(&f));
        if !(4..=5).contains(&f.len()) {
            return Err(bad());
        }
        // binary quartic discriminant, up to a constant; a vanishing leading
        // coefficient only contributes a simple root at infinity
        let (i, j) = quartic_invariants(&f);
        if (q(4) * &i * &i * &i - &j * &j).is_zero() {
            return Err(bad());
        }
        Ok(DoubleCover { q: f })
    }

    pub fn degree(&self) -> usize {
        self.q.len() - 1
    }

    pub fn eval(&self, t: &Q) -> Q {
        eval(&self.q, t)
    }

    pub fn contains(&self, p: &CoverPoint) -> bool {
        match p {
            CoverPoint::Affine { t, y } => y * y == self.eval(t),
            CoverPoint::Infinity { s } => {
                if self.degree() == 3 {
                    s.is_zero()
                } else {
                    s * s == self.q[4]
                }
            }
        }
    }

    pub fn rational_points_at_infinity(&self) -> Vec<CoverPoint> {
        if self.degree() == 3 {
            return vec![CoverPoint::Infinity { s: Q::zero() }];
        }
        match rational_sqrt(&self.q[4]) {
            Some(s) => vec![CoverPoint::Infinity { s: s.clone() }, CoverPoint::Infinity { s: -s }],
            None => vec![],
        }
    }

    /// Rational points with `t = a/b`, `|a|, b <= height`, then those at
    /// infinity.
    pub fn search_points(&self, height: i64) -> Vec<CoverPoint> {
        let mut out = Vec::new();
        for b in 1..=height {
            for a in -height..=height {
                if a.gcd(&b) != 1 {
                    continue;
                }
                let t = Q::new(BigInt::from(a), BigInt::from(b));
                if let Some(y) = rational_sqrt(&self.eval(&t)) {
                    if !y.is_zero() {
                        out.push(CoverPoint::Affine {
                            t: t.clone(),
                            y: -y.clone(),
                        });
                    }
                    out.push(CoverPoint::Affine { t, y });
                }
            }
        }
        out.extend(self.rational_points_at_infinity());
        out
    }
}

/// Coordinates `(u, v)` on the chart model `v^2 = local(u)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Chart {
    /// `u = t`, `v = y`; the base point is the point at infinity of a cubic.
    Identity,
    /// `u = t - t0`, `v = y`; the base point is `(t0, y0)` with `y0 != 0`.
    Shift {
        #[serde(with = "crate::json::rational")]
        t0: Q,
    },
    /// `u = 1/t`, `v = y/t^2`; the base point is at infinity of a quartic.
    Invert,
    /// `u = 1/(t - t0)`, `v = y u^2`; the base point is the branch point
    /// `(t0, 0)`.
    Branch {
        #[serde(with = "crate::json::rational")]
        t0: Q,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Local {
    Finite(Q, Q),
    /// The point with `u` infinite and `v / u^2 -> s`.
    Far(Q),
}

/// A Weierstrass model of a double cover, with the base point sent to `O`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeierstrassModel {
    pub cover: DoubleCover,
    pub base: CoverPoint,
    pub chart: Chart,
    /// `v^2 = local(u)`, lowest degree first, length 5.
    #[serde(with = "crate::json::rational_vec")]
    pub local: Vec<Q>,
    pub curve: WeierstrassCurve,
}

impl WeierstrassModel {
    /// Cubic charts use `x = k u`, `y = k v`; quartic charts use the
    /// classical transformation of `v^2 = a u^4 + b u^3 + c u^2 + d u + r^2`
    /// with `(0, r)` going to `O`.
    fn is_cubic(&self) -> bool {
        matches!(self.chart, Chart::Identity | Chart::Branch { .. })
    }

    fn r(&self) -> Q {
        match (&self.chart, &self.base) {
            (Chart::Shift { .. }, CoverPoint::Affine { y, .. }) => y.clone(),
            (Chart::Invert, CoverPoint::Infinity { s }) => s.clone(),
            _ => unreachable!("quartic chart"),
        }
    }

    fn to_local(&self, p: &CoverPoint) -> Local {
        match (&self.chart, p) {
            (Chart::Identity, CoverPoint::Affine { t, y }) => Local::Finite(t.clone(), y.clone()),
            (Chart::Identity, CoverPoint::Infinity { s }) => Local::Far(s.clone()),
            (Chart::Shift { t0 }, CoverPoint::Affine { t, y }) => Local::Finite(t - t0, y.clone()),
            (Chart::Shift { .. }, CoverPoint::Infinity { s }) => Local::Far(s.clone()),
            (Chart::Invert, CoverPoint::Affine { t, y }) => {
                if t.is_zero() {
                    Local::Far(y.clone())
                } else {
                    Local::Finite(t.recip(), y / (t * t))
                }
            }
            (Chart::Branch { t0 }, CoverPoint::Affine { t, y }) => {
                if t == t0 {
                    Local::Far(Q::zero())
                } else {
                    let u = (t - t0).recip();
                    Local::Finite(u.clone(), y * &u * &u)
                }
            }
            (Chart::Invert | Chart::Branch { .. }, CoverPoint::Infinity { s }) => Local::Finite(Q::zero(), s.clone()),
        }
    }

    fn from_local(&self, p: &Local) -> CoverPoint {
        match (&self.chart, p) {
            (Chart::Identity, Local::Finite(u, v)) => CoverPoint::Affine {
                t: u.clone(),
                y: v.clone(),
            },
            (Chart::Shift { t0 }, Local::Finite(u, v)) => CoverPoint::Affine {
                t: u + t0,
                y: v.clone(),
            },
            (Chart::Identity | Chart::Shift { .. }, Local::Far(s)) => CoverPoint::Infinity { s: s.clone() },
            (Chart::Invert | Chart::Branch { .. }, Local::Finite(u, v)) if u.is_zero() => {
                CoverPoint::Infinity { s: v.clone() }
            }
            (Chart::Invert, Local::Finite(u, v)) => CoverPoint::Affine {
                t: u.recip(),
                y: v / (u * u),
            },
            (Chart::Branch { t0 }, Local::Finite(u, v)) => CoverPoint::Affine {
                t: t0 + u.recip(),
                y: v / (u * u),
            },
            (Chart::Invert, Local::Far(s)) => CoverPoint::Affine {
                t: Q::zero(),
                y: s.clone(),
            },
            (Chart::Branch { t0 }, Local::Far(_)) => CoverPoint::Affine {
                t: t0.clone(),
                y: Q::zero(),
            },
        }
    }

    fn local_forward(&self, p: &Local) -> Point {
        let e = &self.curve;
        if self.is_cubic() {
            let k = &self.local[3];
            return match p {
                Local::Finite(u, v) => Point::affine(k * u, k * v),
                Local::Far(_) => Point::INFINITY,
            };
        }
        let r = self.r();
        let (c, d) = (&self.local[2], &self.local[1]);
        match p {
            Local::Far(s) => Point::affine(q(2) * &r * s, Q::zero()),
            Local::Finite(u, v) if u.is_zero() => {
                if *v == r {
                    Point::INFINITY
                } else {
                    let a2 = e.a2();
                    Point::affine(-a2, e.a1() * a2 - e.a3())
                }
            }
            Local::Finite(u, v) => {
                let u2 = u * u;
                let x = (q(2) * &r * (v + &r) + d * u) / &u2;
                let y =
                    (q(4) * &r * &r * (v + &r) + q(2) * &r * (d * u + c * &u2) - d * d * &u2 / (q(2) * &r)) / (&u2 * u);
                Point::affine(x, y)
            }
        }
    }

    /// Chart points that can map to `(x, y)`: the inversion formula when it
    /// applies, else the roots of the quadratic in `u` obtained by
    /// eliminating `v`, and the special points.
    fn local_candidates(&self, x: &Q, y: &Q) -> Vec<Local> {
        let r = self.r();
        let l = &self.local;
        let (a, b, c, d) = (&l[4], &l[3], &l[2], &l[1]);
        let two_r = q(2) * &r;
        let v_of = |u: &Q| (x * u * u - d * u) / &two_r - &r;
        let mut out = Vec::new();
        if !y.is_zero() {
            let u = (&two_r * (x + c) - d * d / &two_r) / y;
            if !u.is_zero() {
                out.push(Local::Finite(u.clone(), v_of(&u)));
            }
        }
        let k2 = x * x / (&two_r * &two_r) - a;
        let k1 = -(q(2) * x * d / (&two_r * &two_r) + b);
        let k0 = d * d / (&two_r * &two_r) - x - c;
        if k2.is_zero() {
            if !k1.is_zero() {
                let u = -k0 / k1;
                out.push(Local::Finite(u.clone(), v_of(&u)));
            }
        } else if let Some(sq) = rational_sqrt(&(&k1 * &k1 - q(4) * &k2 * &k0)) {
            for sign in [1, -1] {
                let u = (-&k1 + q(sign) * &sq) / (q(2) * &k2);
                out.push(Local::Finite(u.clone(), v_of(&u)));
            }
        }
        out.push(Local::Finite(Q::zero(), -r.clone()));
        if let Some(s) = rational_sqrt(a) {
            out.push(Local::Far(s.clone()));
            out.push(Local::Far(-s));
        }
        out
    }

    /// Cover to curve.
    pub fn forward(&self, p: &CoverPoint) -> Result<Point, Genus1Error> {
        if !self.cover.contains(p) {
            return Err(Genus1Error::NotOnCover);
        }
        Ok(self.local_forward(&self.to_local(p)))
    }

    /// Curve to cover.
    pub fn backward(&self, p: &Point) -> Result<CoverPoint, Genus1Error> {
        if !self.curve.contains(p) {
            return Err(Genus1Error::NotOnCurve);
        }
        let Some((x, y)) = &p.0 else {
            return Ok(self.base.clone());
        };
        if self.is_cubic() {
            let k = &self.local[3];
            return Ok(self.from_local(&Local::Finite(x / k, y / k)));
        }
        self.local_candidates(x, y)
            .into_iter()
            .find(|l| self.local_ok(l) && self.local_forward(l) == *p)
            .map(|l| self.from_local(&l))
            .ok_or_else(|| Genus1Error::MapCheck(format!("no preimage of {p}")))
    }

    fn local_ok(&self, p: &Local) -> bool {
        match p {
            Local::Finite(u, v) => v * v == eval(&self.local, u),
            Local::Far(s) => s * s == self.local[4],
        }
    }

    /// Checks `backward(forward(P)) = P` on cover points and
    /// `forward(backward(R)) = R` on curve points.
    pub fn check_maps(&self, cover_points: &[CoverPoint], curve_points: &[Point]) -> Result<(), Genus1Error> {
        for p in cover_points {
            let r = self.forward(p)?;
            if !self.curve.contains(&r) {
                return Err(Genus1Error::MapCheck(format!("image of {p:?} is off the curve")));
            }
            if self.backward(&r)? != *p {
                return Err(Genus1Error::MapCheck(format!("{p:?} does not round-trip")));
            }
        }
        for r in curve_points {
            let p = self.backward(r)?;
            if self.forward(&p)? != *r {
                return Err(Genus1Error::MapCheck(format!("{r} does not round-trip")));
            }
        }
        Ok(())
    }

    /// Round trip on up to `count` points of each side: small-height points
    /// of the cover, and a seeded sample of small combinations of their
    /// images.
    pub fn verify(&self, count: usize) -> Result<usize, Genus1Error> {
        let mut cover: Vec<CoverPoint> = self.cover.search_points(12);
        cover.push(self.base.clone());
        cover.dedup();
        cover.truncate(count);
        let images: Vec<Point> = cover.iter().map(|p| self.forward(p)).collect::<Result<_, _>>()?;
        let gens: Vec<&Point> = images.iter().filter(|p| !p.is_infinity()).take(3).collect();
        let mut pool = vec![Point::INFINITY];
        for (i, g) in gens.iter().enumerate() {
            for h in gens.iter().skip(i) {
                for m in 1..=3 {
                    for n in -2..=2 {
                        let r = self
                            .curve
                            .add(&self.curve.scalar_mul(m, g), &self.curve.scalar_mul(n, h));
                        if !pool.contains(&r) {
                            pool.push(r);
                        }
                    }
                }
            }
        }
        pool.shuffle(&mut ChaCha8Rng::seed_from_u64(0));
        pool.truncate(count);
        self.check_maps(&cover, &pool)?;
        Ok(cover.len() + pool.len())
    }
}

/// Weierstrass model of `y^2 = q(t)` with `base` sent to `O`, checked by
/// round trips on up to 20 points each way.
pub fn double_cover_to_weierstrass(cover: &DoubleCover, base: &CoverPoint) -> Result<WeierstrassModel, Genus1Error> {
    if !cover.contains(base) {
        return Err(Genus1Error::NotOnCover);
    }
    let f = pad5(&cover.q);
    let (chart, local) = match base {
        CoverPoint::Infinity { .. } if cover.degree() == 3 => (Chart::Identity, f),
        CoverPoint::Infinity { .. } => (Chart::Invert, f.iter().rev().cloned().collect()),
        CoverPoint::Affine { t, y } if !y.is_zero() => (Chart::Shift { t0: t.clone() }, shift(&f, t)),
        CoverPoint::Affine { t, .. } => {
            let g = shift(&f, t);
            (Chart::Branch { t0: t.clone() }, g.iter().rev().cloned().collect())
        }
    };
    let curve = match chart {
        Chart::Identity | Chart::Branch { .. } => {
            let k = &local[3];
            WeierstrassCurve::new(Q::zero(), local[2].clone(), Q::zero(), k * &local[1], k * k * &local[0])
        }
        Chart::Shift { .. } | Chart::Invert => {
            let r = match base {
                CoverPoint::Affine { y, .. } => y.clone(),
                CoverPoint::Infinity { s } => s.clone(),
            };
            let (a, b, c, d) = (&local[4], &local[3], &local[2], &local[1]);
            let a1 = d / &r;
            let a2 = c - d * d / (q(4) * &r * &r);
            let a3 = q(2) * &r * b;
            let a4 = -q(4) * &r * &r * a;
            let a6 = &a2 * &a4;
            WeierstrassCurve::new(a1, a2, a3, a4, a6)
        }
    };
    if curve.is_singular() {
        return Err(Genus1Error::SingularModel);
    }
    let model = WeierstrassModel {
        cover: cover.clone(),
        base: base.clone(),
        chart,
        local,
        curve,
    };
    model.verify(20)?;
    Ok(model)
}

/// `y^2 = x^3 - 27 I x - 27 J`, a model of the Jacobian built from the
/// invariants alone.
pub fn invariant_model(cover: &DoubleCover) -> WeierstrassCurve {
    let (i, j) = quartic_invariants(&cover.q);
    WeierstrassCurve::new(Q::zero(), Q::zero(), Q::zero(), -q(27) * i, -q(27) * j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genus1::curve::qf;
    use proptest::prelude::*;

    fn cover(c: &[i64]) -> DoubleCover {
        DoubleCover::new(c.iter().map(|&k| q(k)).collect()).unwrap()
    }

    fn affine(t: Q, y: Q) -> CoverPoint {
        CoverPoint::Affine { t, y }
    }

    #[test]
    fn quartic_with_affine_base_has_j_1728() {
        // y^2 = t^4 + 1
        let c = cover(&[1, 0, 0, 0, 1]);
        let m = double_cover_to_weierstrass(&c, &affine(q(0), q(1))).unwrap();
        assert_eq!(m.curve.j_invariant(), q(1728));
        assert_eq!(invariant_model(&c).j_invariant(), q(1728));
    }

    #[test]
    fn cubic_at_infinity_is_already_weierstrass() {
        let c = cover(&[1, 0, 0, 1]);
        let m = double_cover_to_weierstrass(&c, &CoverPoint::Infinity { s: q(0) }).unwrap();
        assert_eq!(m.curve, WeierstrassCurve::from_ints([0, 0, 0, 0, 1]));
        assert_eq!(m.forward(&affine(q(2), q(3))).unwrap(), Point::affine(q(2), q(3)));
    }

    #[test]
    fn degenerate_quartics_rejected() {
        for f in [
            vec![1, 2, 1],
            vec![0, 0, 1, 0, 1],
            vec![1, -2, 1, 0, 0],
            vec![4, 0, -4, 0, 1],
            vec![0, 1, -2, 1],
        ] {
            let f: Vec<Q> = f.into_iter().map(q).collect();
            assert!(DoubleCover::new(f).is_err());
        }
    }

    #[test]
    fn every_chart_matches_the_invariants() {
        // several base points on each cover
        let quartics: [&[i64]; 4] = [
            &[1, 3, 0, -2, 1],
            &[4, -3, 1, 0, 1],
            &[9, 1, -5, 2, 1],
            &[0, 2, -3, 1, 1],
        ];
        for f in quartics {
            let c = cover(f);
            let j = invariant_model(&c).j_invariant();
            let mut bases = c.search_points(4);
            bases.truncate(6);
            assert!(!bases.is_empty());
            for b in bases {
                let m = double_cover_to_weierstrass(&c, &b).unwrap();
                assert_eq!(m.curve.j_invariant(), j, "{f:?} {b:?}");
                assert_eq!(m.forward(&b).unwrap(), Point::INFINITY);
            }
        }
    }

    #[test]
    fn branch_point_base() {
        // y^2 = t (t - 1)(t + 2)(t - 3)
        let f = [q(0), q(6), q(-5), q(-2), q(1)];
        let c = DoubleCover::new(f.to_vec()).unwrap();
        let j = invariant_model(&c).j_invariant();
        for t0 in [0, 1, -2, 3] {
            let m = double_cover_to_weierstrass(&c, &affine(q(t0), q(0))).unwrap();
            assert_eq!(m.curve.j_invariant(), j);
            // branch points go to 2-torsion
            for t1 in [0, 1, -2, 3] {
                let r = m.forward(&affine(q(t1), q(0))).unwrap();
                assert!(m.curve.scalar_mul(2, &r).is_infinity());
            }
        }
    }

    #[test]
    fn quartic_at_infinity_sends_both_points_correctly() {
        // y^2 = t^4 + t^3 + 2t + 4: points at infinity s = +-1, (0, +-2)
        let c = cover(&[4, 2, 0, 1, 1]);
        let m = double_cover_to_weierstrass(&c, &CoverPoint::Infinity { s: q(1) }).unwrap();
        assert!(m.forward(&CoverPoint::Infinity { s: q(-1) }).unwrap().0.is_some());
        for y in [2, -2] {
            let p = affine(q(0), q(y));
            let r = m.forward(&p).unwrap();
            assert_eq!(r.0.as_ref().unwrap().1, q(0));
            assert_eq!(m.backward(&r).unwrap(), p);
        }
    }

    #[test]
    fn rational_sqrt_cases() {
        assert_eq!(rational_sqrt(&qf(9, 4)), Some(qf(3, 2)));
        assert_eq!(rational_sqrt(&qf(2, 1)), None);
        assert_eq!(rational_sqrt(&qf(-1, 1)), None);
        assert_eq!(rational_sqrt(&q(0)), Some(q(0)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn random_quartics_with_a_point(c in proptest::collection::vec(-6i64..=6, 4), r in 1i64..=4, t0 in -3i64..=3) {
            // q(t) = (t - t0) * (...) + r^2 has the point (t0, r)
            let mut f = vec![q(r * r)];
            f.extend(c.iter().map(|&k| q(k)));
            let f = shift(&f, &q(-t0));
            prop_assume!(f[4] != q(0) || f[3] != q(0));
            let Ok(cov) = DoubleCover::new(f) else { return Ok(()) };
            let base = affine(q(t0), q(r));
            let m = double_cover_to_weierstrass(&cov, &base).unwrap();
            prop_assert_eq!(m.curve.j_invariant(), invariant_model(&cov).j_invariant());
        }
    }
}
