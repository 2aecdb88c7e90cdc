//! Integral quartic forms in four variables, the family `X_h`, reduction
//! modulo p and the coefficient conditions cutting out `M'`.
//!
//! Coefficients are indexed by the 35 degree-4 monomials in graded
//! lexicographic order with `x > y > z > w`, so index 0 is `x^4` and index
//! 34 is `w^4`. That order is also the JSON serialization order.

pub mod expr;
mod smooth;

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::gf::{make_field, FieldCtx, GfError};
pub use expr::{parse, parse_with, ParseError, SparsePoly};
pub use smooth::{smoothness_probe, SmoothnessVerdict, DEFAULT_PROBE_BUDGET};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuarticError {
    #[error("polynomial is not homogeneous of degree 4")]
    NotQuartic,
    #[error("form vanishes identically modulo {0}")]
    ZeroModP(u64),
    #[error("the plane w = 0 is contained in the surface")]
    PlaneContained,
    #[error("expected 35 coefficients, got {0}")]
    WrongLength(usize),
    #[error("probe search space {0} exceeds budget {1}")]
    ProbeBudgetExceeded(u128, u128),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Field(#[from] GfError),
}

/// Exponent vectors of the degree-`d` monomials in `k` variables,
/// lexicographically descending.
pub fn monomials(vars: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(vars: usize, degree: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if vars == 1 {
            prefix.push(degree);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=degree).rev() {
            prefix.push(e);
            rec(vars - 1, degree - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(vars, degree, &mut Vec::new(), &mut out);
    out
}

/// The 35 quartic monomials in `x, y, z, w`, in coefficient order.
pub fn quartic_monomials() -> Vec<[u32; 4]> {
    monomials(4, 4).into_iter().map(|e| [e[0], e[1], e[2], e[3]]).collect()
}

pub fn monomial_index(e: [u32; 4]) -> Option<usize> {
    quartic_monomials().iter().position(|m| *m == e)
}

/// A homogeneous quartic in `x, y, z, w` with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuarticForm {
    coeffs: Vec<BigInt>,
}

impl QuarticForm {
    pub fn zero() -> QuarticForm {
        QuarticForm {
            coeffs: vec![BigInt::zero(); 35],
        }
    }

    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Result<QuarticForm, QuarticError> {
        if coeffs.len() != 35 {
            return Err(QuarticError::WrongLength(coeffs.len()));
        }
        Ok(QuarticForm { coeffs })
    }

    pub fn from_poly(p: &SparsePoly) -> Result<QuarticForm, QuarticError> {
        if p.is_zero() {
            return Ok(QuarticForm::zero());
        }
        if p.homogeneous_degree() != Some(4) {
            return Err(QuarticError::NotQuartic);
        }
        let mut out = QuarticForm::zero();
        for (e, c) in p.terms() {
            let i = monomial_index(*e).expect("degree checked");
            out.coeffs[i] = c.clone();
        }
        Ok(out)
    }

    pub fn parse(src: &str) -> Result<QuarticForm, QuarticError> {
        QuarticForm::from_poly(&parse_with(src, &family_bindings())?)
    }

    pub fn to_poly(&self) -> SparsePoly {
        let mut p = SparsePoly::zero();
        for (e, c) in quartic_monomials().into_iter().zip(&self.coeffs) {
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, e: [u32; 4]) -> &BigInt {
        &self.coeffs[monomial_index(e).expect("quartic monomial")]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &QuarticForm) -> QuarticForm {
        QuarticForm {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &QuarticForm) -> QuarticForm {
        QuarticForm {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> QuarticForm {
        QuarticForm {
            coeffs: self.coeffs.iter().map(|a| a * k).collect(),
        }
    }

    pub fn eval(&self, point: &[BigInt; 4]) -> BigInt {
        self.to_poly().eval(point)
    }

    /// Coefficients reduced into `[0, p)`.
    pub fn coeffs_mod(&self, p: u64) -> Vec<u64> {
        let m = BigInt::from(p);
        self.coeffs
            .iter()
            .map(|c| c.mod_floor(&m).to_u64().expect("reduced"))
            .collect()
    }

    pub fn reduce(&self, p: u64) -> Result<ReducedSurface, QuarticError> {
        ReducedSurface::new(p, self.coeffs_mod(p))
    }
}

impl fmt::Display for QuarticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_poly().fmt(f)
    }
}

impl Serialize for QuarticForm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        crate::json::bigint_vec::serialize(&self.coeffs, s)
    }
}

impl<'de> Deserialize<'de> for QuarticForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<QuarticForm, D::Error> {
        let coeffs = crate::json::bigint_vec::deserialize(d)?;
        QuarticForm::from_coeffs(coeffs).map_err(serde::de::Error::custom)
    }
}

const F1: &str = "x^3 - x^2*y - x^2*z + x^2*w - x*y^2 - x*y*z + 2*x*y*w + x*z^2 + 2*x*z*w + y^3 \
                  + y^2*z - y^2*w + y*z^2 + y*z*w - y*w^2 + z^2*w + z*w^2 + 2*w^3";
const F2: &str = "x*y^2 + x*y*z - x*z^2 - y*z^2 + z^3";
const G1: &str = "z^2 + x*y + y*z";
const G2: &str = "z^2 + x*y";

/// The fixed cubics `f1, f2` and quadrics `g1, g2` of the family.
pub fn family_parts() -> [(&'static str, SparsePoly); 4] {
    [
        ("f1", parse(F1).expect("f1")),
        ("f2", parse(F2).expect("f2")),
        ("g1", parse(G1).expect("g1")),
        ("g2", parse(G2).expect("g2")),
    ]
}

/// Names available inside quartic expressions: `f1, f2, g1, g2`.
pub fn family_bindings() -> HashMap<String, SparsePoly> {
    family_parts().into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// `w f1 + 2 z f2 - 3 g1 g2 - 6 h`.
pub fn build_family_member(h: &QuarticForm) -> QuarticForm {
    let [(_, f1), (_, f2), (_, g1), (_, g2)] = family_parts();
    let fixed = SparsePoly::var(3)
        .mul(&f1)
        .add(&SparsePoly::constant(2).mul(&SparsePoly::var(2)).mul(&f2))
        .sub(&SparsePoly::constant(3).mul(&g1).mul(&g2));
    let fixed = QuarticForm::from_poly(&fixed).expect("family is quartic");
    fixed.sub(&h.scale(&BigInt::from(6)))
}

/// Parse `h` and build the family member; `h` must be homogeneous quartic
/// (or zero).
pub fn build_family_member_from_poly(h: &SparsePoly) -> Result<QuarticForm, QuarticError> {
    Ok(build_family_member(&QuarticForm::from_poly(h)?))
}

/// Monomials whose coefficients vanish on `M'`: x^4, x^3y, x^3z, y^4, xy^3,
/// y^3z, x^2z^2. The first six make `w = 0` tangent at [1:0:0:0] and
/// [0:1:0:0]; the last makes `y = w = 0` a limit tangent at [1:0:0:0].
pub const M_PRIME_MONOMIALS: [[u32; 4]; 7] = [
    [4, 0, 0, 0],
    [3, 1, 0, 0],
    [3, 0, 1, 0],
    [0, 4, 0, 0],
    [1, 3, 0, 0],
    [0, 3, 1, 0],
    [2, 0, 2, 0],
];

pub fn in_m_prime(f: &QuarticForm) -> bool {
    M_PRIME_MONOMIALS.iter().all(|&e| f.coeff(e).is_zero())
}

/// A ternary quartic in `x, y, z` (15 coefficients, lex order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneQuartic {
    coeffs: Vec<BigInt>,
}

impl PlaneQuartic {
    pub fn monomials() -> Vec<[u32; 3]> {
        monomials(3, 4).into_iter().map(|e| [e[0], e[1], e[2]]).collect()
    }

    pub fn from_poly(p: &SparsePoly) -> Result<PlaneQuartic, QuarticError> {
        if p.homogeneous_degree() != Some(4) || p.terms().any(|(e, _)| e[3] != 0) {
            return Err(QuarticError::NotQuartic);
        }
        let mons = PlaneQuartic::monomials();
        let mut coeffs = vec![BigInt::zero(); 15];
        for (e, c) in p.terms() {
            let i = mons.iter().position(|m| m[..] == e[..3]).expect("degree checked");
            coeffs[i] = c.clone();
        }
        Ok(PlaneQuartic { coeffs })
    }

    pub fn parse(src: &str) -> Result<PlaneQuartic, QuarticError> {
        PlaneQuartic::from_poly(&parse(src)?)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, e: [u32; 3]) -> &BigInt {
        let i = PlaneQuartic::monomials()
            .iter()
            .position(|m| *m == e)
            .expect("ternary quartic monomial");
        &self.coeffs[i]
    }

    pub fn to_poly(&self) -> SparsePoly {
        let mut p = SparsePoly::zero();
        for (e, c) in PlaneQuartic::monomials().into_iter().zip(&self.coeffs) {
            p.add_term([e[0], e[1], e[2], 0], c.clone());
        }
        p
    }

    pub fn eval(&self, point: &[BigInt; 3]) -> BigInt {
        self.to_poly()
            .eval(&[point[0].clone(), point[1].clone(), point[2].clone(), BigInt::zero()])
    }

    pub fn neg(&self) -> PlaneQuartic {
        PlaneQuartic {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for PlaneQuartic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_poly().fmt(f)
    }
}

/// Intersection with the plane `w = 0`.
pub fn curve_section(f: &QuarticForm) -> Result<PlaneQuartic, QuarticError> {
    let mut p = SparsePoly::zero();
    for (e, c) in f.to_poly().terms() {
        if e[3] == 0 {
            p.add_term(*e, c.clone());
        }
    }
    if p.is_zero() {
        return Err(QuarticError::PlaneContained);
    }
    PlaneQuartic::from_poly(&p)
}

/// A quartic surface over GF(p): coefficients reduced into `[0, p)`.
#[derive(Debug, Clone)]
pub struct ReducedSurface {
    p: u64,
    coeffs: Vec<u64>,
    ctx: FieldCtx,
}

impl ReducedSurface {
    pub fn new(p: u64, coeffs: Vec<u64>) -> Result<ReducedSurface, QuarticError> {
        if coeffs.len() != 35 {
            return Err(QuarticError::WrongLength(coeffs.len()));
        }
        let ctx = make_field(p, 1, 0)?;
        let coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % p).collect();
        if coeffs.iter().all(|&c| c == 0) {
            return Err(QuarticError::ZeroModP(p));
        }
        Ok(ReducedSurface { p, coeffs, ctx })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn prime_field(&self) -> &FieldCtx {
        &self.ctx
    }

    /// Lift back to integers in `[0, p)`.
    pub fn lift(&self) -> QuarticForm {
        QuarticForm {
            coeffs: self.coeffs.iter().map(|&c| BigInt::from(c)).collect(),
        }
    }

    /// Value at a point of `GF(p)^4` given as integers.
    pub fn eval_mod_p(&self, point: &[u64; 4]) -> u64 {
        let p = self.p as u128;
        let mut acc = 0u128;
        for (e, &c) in quartic_monomials().iter().zip(&self.coeffs) {
            if c == 0 {
                continue;
            }
            let mut t = c as u128;
            for (v, &k) in point.iter().zip(e.iter()) {
                for _ in 0..k {
                    t = t * (*v as u128 % p) % p;
                }
            }
            acc = (acc + t) % p;
        }
        acc as u64
    }
}
