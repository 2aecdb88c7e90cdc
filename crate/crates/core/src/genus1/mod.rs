//! Rational points: the plane section `w = 0` of a surface in M' has double
//! points at P = [1:0:0] and Q = [0:1:0]; its normalization is a genus one
//! curve, made into an elliptic curve with origin above P.

pub mod curve;
pub mod model;
pub mod tate;
pub mod torsion;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::Axiom;
use crate::poly::{self, IntPoly};
use crate::quartic::{
    curve_section, in_m_prime, smoothness_probe, PlaneQuartic, QuarticError, QuarticForm, SmoothnessVerdict,
};
pub use curve::{Point, WeierstrassCurve, Q};
pub use model::{double_cover_to_weierstrass, CoverPoint, DoubleCover, WeierstrassModel};
pub use tate::{conductor, ConductorError, ConductorReport};
pub use torsion::{infinite_order_certificate, OrderVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Center {
    P,
    Q,
}

impl std::fmt::Display for Center {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Center::P => write!(f, "P = [1:0:0]"),
            Center::Q => write!(f, "Q = [0:1:0]"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Genus1Error {
    #[error("{0} is not on the curve")]
    NotOnSection(Center),
    #[error("{0} is a smooth point of the curve")]
    Nonsingular(Center),
    #[error("{0} is worse than a double point")]
    WorseSingularity(Center),
    #[error("the double point {0} has conjugate tangents")]
    ConjugateTangents(Center),
    #[error("the line z = 0 through P and Q is a component")]
    ContainsLinePQ,
    #[error("geometric genus is not one: branch polynomial {0} is degenerate")]
    NotGenusOne(String),
    #[error("point is not on the double cover")]
    NotOnCover,
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("Weierstrass model is singular")]
    SingularModel,
    #[error("map check failed: {0}")]
    MapCheck(String),
    #[error(transparent)]
    Quartic(#[from] QuarticError),
}

pub(crate) fn show_poly(f: &[Q]) -> String {
    let terms: Vec<String> = f
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| match i {
            0 => format!("({c})"),
            1 => format!("({c}) t"),
            _ => format!("({c}) t^{i}"),
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DoublePoint {
    /// Two rational branches.
    Node,
    Cusp,
}

/// Plane quartic with double points at P and Q, both with rational branches,
/// and geometric genus one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodalQuartic {
    pub curve: PlaneQuartic,
    pub p_kind: DoublePoint,
    pub q_kind: DoublePoint,
    /// Tangent slopes `y/z` at P, the designated one first.
    pub p_slopes: Vec<Q>,
    /// Tangent slopes `x/z` at Q, increasing.
    pub q_slopes: Vec<Q>,
}

fn c(curve: &PlaneQuartic, e: [u32; 3]) -> Q {
    Q::from_integer(curve.coeff(e).clone())
}

/// Rational roots of `a s^2 + b s + c` (`a != 0`) and the double point type.
fn tangents(a: &Q, b: &Q, c: &Q, at: Center) -> Result<(DoublePoint, Vec<Q>), Genus1Error> {
    let disc = b * b - Q::from_integer(4.into()) * a * c;
    let two_a = Q::from_integer(2.into()) * a;
    if disc.is_zero() {
        return Ok((DoublePoint::Cusp, vec![-b / two_a]));
    }
    let r = model::rational_sqrt(&disc).ok_or(Genus1Error::ConjugateTangents(at))?;
    let mut roots = vec![(-b - &r) / &two_a, (-b + &r) / &two_a];
    roots.sort();
    Ok((DoublePoint::Node, roots))
}

/// Checks the double points and the genus. Tangent directions come from the
/// 2-jets `c220 y^2 + c211 y z + c202 z^2` at P and `c220 x^2 + c121 x z +
/// c022 z^2` at Q. Extra singularities are excluded exactly: they would
/// force a repeated root in the branch polynomial of the projection.
pub fn classify_section(curve: &PlaneQuartic) -> Result<NodalQuartic, Genus1Error> {
    let k = |e| c(curve, e);
    if !k([4, 0, 0]).is_zero() {
        return Err(Genus1Error::NotOnSection(Center::P));
    }
    if !k([0, 4, 0]).is_zero() {
        return Err(Genus1Error::NotOnSection(Center::Q));
    }
    if !(k([3, 1, 0]).is_zero() && k([3, 0, 1]).is_zero()) {
        return Err(Genus1Error::Nonsingular(Center::P));
    }
    if !(k([1, 3, 0]).is_zero() && k([0, 3, 1]).is_zero()) {
        return Err(Genus1Error::Nonsingular(Center::Q));
    }
    let c220 = k([2, 2, 0]);
    let jet_p = [c220.clone(), k([2, 1, 1]), k([2, 0, 2])];
    let jet_q = [c220.clone(), k([1, 2, 1]), k([0, 2, 2])];
    if jet_p.iter().all(|x| x.is_zero()) {
        return Err(Genus1Error::WorseSingularity(Center::P));
    }
    if jet_q.iter().all(|x| x.is_zero()) {
        return Err(Genus1Error::WorseSingularity(Center::Q));
    }
    if c220.is_zero() {
        return Err(Genus1Error::ContainsLinePQ);
    }
    let (p_kind, mut p_slopes) = tangents(&jet_p[0], &jet_p[1], &jet_p[2], Center::P)?;
    let (q_kind, q_slopes) = tangents(&jet_q[0], &jet_q[1], &jet_q[2], Center::Q)?;
    // on M' the line y = 0 is one of the tangents at P
    if let Some(i) = p_slopes.iter().position(|s| s.is_zero()) {
        p_slopes.swap(0, i);
    }
    let nq = NodalQuartic {
        curve: curve.clone(),
        p_kind,
        q_kind,
        p_slopes,
        q_slopes,
    };
    branch_polynomials(&nq).cover()?;
    Ok(nq)
}

/// `F(t, y, 1) = A(t) y^2 + B(t) y + C(t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Branches {
    a: Vec<Q>,
    b: Vec<Q>,
    c: Vec<Q>,
}

impl Branches {
    fn discriminant(&self) -> Vec<Q> {
        let mut out = vec![Q::zero(); 5];
        for (i, x) in self.b.iter().enumerate() {
            for (j, y) in self.b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        for (i, x) in self.a.iter().enumerate() {
            for (j, y) in self.c.iter().enumerate() {
                out[i + j] -= Q::from_integer(4.into()) * x * y;
            }
        }
        out
    }

    fn cover(&self) -> Result<DoubleCover, Genus1Error> {
        DoubleCover::new(self.discriminant())
    }
}

fn branch_polynomials(n: &NodalQuartic) -> Branches {
    let k = |e| c(&n.curve, e);
    Branches {
        a: vec![k([0, 2, 2]), k([1, 2, 1]), k([2, 2, 0])],
        b: vec![k([0, 1, 3]), k([1, 1, 2]), k([2, 1, 1])],
        c: vec![k([0, 0, 4]), k([1, 0, 3]), k([2, 0, 2])],
    }
}

/// The normalization as `Y^2 = q(t)`, from projecting away from Q: `t = x/z`
/// and `Y = 2 A(t) y + B(t)` in the chart `z = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Projection {
    pub cover: DoubleCover,
    /// Points above P (at infinity), the designated `P'` first.
    pub above_p: Vec<CoverPoint>,
    /// Points above Q (roots of `A`), by increasing `t`.
    pub above_q: Vec<CoverPoint>,
    #[serde(with = "crate::json::rational_vec")]
    pub a: Vec<Q>,
    #[serde(with = "crate::json::rational_vec")]
    pub b: Vec<Q>,
}

impl Projection {
    /// Image of a point of the curve other than P and Q.
    pub fn lift(&self, pt: &[BigInt; 3]) -> Option<CoverPoint> {
        if pt[2].is_zero() {
            return None;
        }
        let z = Q::from_integer(pt[2].clone());
        let t = Q::from_integer(pt[0].clone()) / &z;
        let y = Q::from_integer(pt[1].clone()) / &z;
        let yy = Q::from_integer(2.into()) * model::eval(&self.a, &t) * y + model::eval(&self.b, &t);
        let p = CoverPoint::Affine { t, y: yy };
        self.cover.contains(&p).then_some(p)
    }
}

pub fn project_to_double_cover(n: &NodalQuartic) -> Result<Projection, Genus1Error> {
    let br = branch_polynomials(n);
    let cover = br.cover()?;
    let c220 = c(&n.curve, [2, 2, 0]);
    let c211 = c(&n.curve, [2, 1, 1]);
    let two = Q::from_integer(2.into());
    // along the branch at P with slope y/z -> s, Y/t^2 -> 2 c220 s + c211
    let above_p = n
        .p_slopes
        .iter()
        .map(|s| CoverPoint::Infinity {
            s: &two * &c220 * s + &c211,
        })
        .collect();
    // along the branch at Q the fibre coordinate y is unbounded, so
    // Y -> -B(t0)
    let above_q = n
        .q_slopes
        .iter()
        .map(|t| CoverPoint::Affine {
            t: t.clone(),
            y: -model::eval(&br.b, t),
        })
        .collect();
    let pr = Projection {
        cover,
        above_p,
        above_q,
        a: br.a,
        b: br.b,
    };
    for p in pr.above_p.iter().chain(&pr.above_q) {
        if !pr.cover.contains(p) {
            return Err(Genus1Error::MapCheck(format!("{p:?} is not on the cover")));
        }
    }
    Ok(pr)
}

/// The elliptic curve of a section, with origin `P'`, and the points coming
/// from the double points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionCurve {
    pub p_kind: DoublePoint,
    pub q_kind: DoublePoint,
    pub projection: Projection,
    pub model: WeierstrassModel,
    /// `T` with `T - O ~ P' - Q1`, i.e. `T = -Q1`.
    pub t: Point,
    /// `T` for the full pullback of `P - Q`, each branch point of a node
    /// counted once and the point of a cusp twice.
    pub t_pullback: Point,
    /// Images of the points above P and Q.
    pub p_images: Vec<Point>,
    pub q_images: Vec<Point>,
}

pub fn section_curve(section: &PlaneQuartic) -> Result<SectionCurve, Genus1Error> {
    let n = classify_section(section)?;
    let projection = project_to_double_cover(&n)?;
    let model = double_cover_to_weierstrass(&projection.cover, &projection.above_p[0])?;
    let e = &model.curve;
    let image = |v: &[CoverPoint]| v.iter().map(|p| model.forward(p)).collect::<Result<Vec<_>, _>>();
    let p_images = image(&projection.above_p)?;
    let q_images = image(&projection.above_q)?;
    let sum = |pts: &[Point], kind: DoublePoint| {
        let s = pts.iter().fold(Point::INFINITY, |acc, p| e.add(&acc, p));
        match kind {
            DoublePoint::Node => s,
            DoublePoint::Cusp => e.scalar_mul(2, &s),
        }
    };
    let t = e.neg(&q_images[0]);
    let t_pullback = e.sub(&sum(&p_images, n.p_kind), &sum(&q_images, n.q_kind));
    Ok(SectionCurve {
        p_kind: n.p_kind,
        q_kind: n.q_kind,
        t,
        t_pullback,
        p_images,
        q_images,
        projection,
        model,
    })
}

/// Smallest primes tried by the smoothness probe, with the search depth.
pub const SMOOTHNESS_PRIMES: [(u64, u32); 4] = [(2, 4), (3, 4), (5, 3), (7, 2)];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum MembershipFailure {
    NotInMPrime,
    /// Every probed reduction showed a singular point.
    NoSmoothReduction,
    Section {
        reason: String,
    },
    Torsion {
        order: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipEvidence {
    pub member: bool,
    pub failure: Option<MembershipFailure>,
    pub smoothness: Vec<(u64, SmoothnessVerdict)>,
    pub curve: Option<SectionCurve>,
    pub order: Option<OrderVerdict>,
    pub order_pullback: Option<OrderVerdict>,
    pub axioms: Vec<Axiom>,
}

fn reject(failure: MembershipFailure, ev: MembershipEvidence) -> MembershipEvidence {
    MembershipEvidence {
        member: false,
        failure: Some(failure),
        ..ev
    }
}

/// Smooth (by a probe of a reduction), section with two double points and
/// genus one, and `T` of infinite order.
pub fn membership_in_u(f: &QuarticForm) -> Result<MembershipEvidence, Genus1Error> {
    let mut ev = MembershipEvidence {
        member: false,
        failure: None,
        smoothness: vec![],
        curve: None,
        order: None,
        order_pullback: None,
        axioms: vec![],
    };
    if !in_m_prime(f) {
        return Ok(reject(MembershipFailure::NotInMPrime, ev));
    }
    for (p, depth) in SMOOTHNESS_PRIMES {
        let verdict = smoothness_probe(&f.reduce(p)?, depth, crate::quartic::DEFAULT_PROBE_BUDGET)?;
        let clean = verdict.is_clean();
        ev.smoothness.push((p, verdict));
        if clean {
            ev.axioms.push(Axiom::Smoothness { p, depth });
            break;
        }
    }
    if ev.axioms.is_empty() {
        return Ok(reject(MembershipFailure::NoSmoothReduction, ev));
    }
    let section = curve_section(f)?;
    let sc = match section_curve(&section) {
        Ok(sc) => sc,
        Err(e @ Genus1Error::Quartic(_)) => return Err(e),
        Err(e) => return Ok(reject(MembershipFailure::Section { reason: e.to_string() }, ev)),
    };
    let e = &sc.model.curve;
    let order = infinite_order_certificate(e, &sc.t, torsion::DEFAULT_REDUCTION_PRIMES)?;
    ev.order_pullback = Some(infinite_order_certificate(
        e,
        &sc.t_pullback,
        torsion::DEFAULT_REDUCTION_PRIMES,
    )?);
    ev.curve = Some(sc);
    ev.order = Some(order.clone());
    ev.axioms.push(Axiom::Mazur);
    ev.axioms.push(Axiom::TorsionInjects);
    if let OrderVerdict::FiniteOrder { order } = order {
        return Ok(reject(MembershipFailure::Torsion { order }, ev));
    }
    ev.member = true;
    Ok(ev)
}

/// `f(coords(t))` for a quartic form and polynomial coordinates.
pub fn pull_back(f: &QuarticForm, coords: &[IntPoly; 4]) -> IntPoly {
    let mut out: IntPoly = vec![];
    for (e, c) in f.to_poly().terms() {
        let term = (0..4).fold(vec![c.clone()], |acc, i| {
            (0..e[i]).fold(acc, |a, _| poly::mul(&a, &coords[i]))
        });
        out = add(&out, &term);
    }
    poly::trim(out)
}

fn add(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let mut out = vec![BigInt::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    poly::trim(out)
}

/// Sign-normalized section: positive `x^2 y^2` coefficient.
pub fn normalized_section(f: &QuarticForm) -> Result<PlaneQuartic, QuarticError> {
    let s = curve_section(f)?;
    Ok(if s.coeff([2, 2, 0]).is_negative() { s.neg() } else { s })
}
