//! Exhaustive search for singular points of a reduced surface over small
//! extensions. A clean result is evidence, not a proof, of smoothness over
//! the algebraic closure; certificates record the depth searched.

use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{QuarticError, ReducedSurface, SparsePoly};
use crate::gf::{make_field, ZechField, ZERO_LOG};

/// Default cap on `p^{3k}` for the deepest extension searched.
pub const DEFAULT_PROBE_BUDGET: u128 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SmoothnessVerdict {
    /// No common zero of the form and its partials over GF(p^k), k <= depth.
    NoSingularPointFound { depth: u32 },
    /// First singular point in enumeration order; coordinates are packed
    /// elements of GF(p^degree) built with the recorded modulus.
    SingularPoint {
        degree: u32,
        modulus: Vec<u64>,
        coords: [u64; 4],
    },
}

impl SmoothnessVerdict {
    pub fn is_clean(&self) -> bool {
        matches!(self, SmoothnessVerdict::NoSingularPointFound { .. })
    }
}

struct ModForm {
    terms: Vec<([u32; 4], u32)>,
}

impl ModForm {
    fn from_poly(f: &SparsePoly, field: &ZechField) -> ModForm {
        let p = num_bigint::BigInt::from(field.p());
        let terms = f
            .terms()
            .filter_map(|(e, c)| {
                let r = c.mod_floor(&p).to_i64().expect("reduced");
                (r != 0).then(|| (*e, field.from_int(r)))
            })
            .collect();
        ModForm { terms }
    }

    fn eval(&self, field: &ZechField, powers: &[[u32; 5]; 4]) -> u32 {
        let mut acc = ZERO_LOG;
        for (e, c) in &self.terms {
            let mut t = *c;
            for v in 0..4 {
                t = field.mul(t, powers[v][e[v] as usize]);
            }
            acc = field.add(acc, t);
        }
        acc
    }
}

/// Normalized point of P^3 number `i` in lexicographic order (first nonzero
/// coordinate 1).
fn point_of_index(mut i: u64, q: u64) -> [u64; 4] {
    if i == 0 {
        return [0, 0, 0, 1];
    }
    i -= 1;
    if i < q {
        return [0, 0, 1, i];
    }
    i -= q;
    if i < q * q {
        return [0, 1, i / q, i % q];
    }
    i -= q * q;
    [1, i / (q * q), (i / q) % q, i % q]
}

pub fn smoothness_probe(s: &ReducedSurface, max_degree: u32, budget: u128) -> Result<SmoothnessVerdict, QuarticError> {
    let p = s.p() as u128;
    let cost = p.checked_pow(3 * max_degree).unwrap_or(u128::MAX);
    if cost > budget {
        return Err(QuarticError::ProbeBudgetExceeded(cost, budget));
    }
    let f = s.lift().to_poly();
    let partials: Vec<SparsePoly> = (0..4).map(|i| f.derivative(i)).collect();
    for k in 1..=max_degree {
        let ctx = make_field(s.p(), k as usize, 0)?;
        let field = ctx.zech().expect("probe fields fit the table budget");
        let forms: Vec<ModForm> = std::iter::once(&f)
            .chain(partials.iter())
            .map(|g| ModForm::from_poly(g, &field))
            .collect();
        let q = ctx.q();
        let total = q * q * q + q * q + q + 1;
        let hit = (0..total).into_par_iter().find_first(|&i| {
            let pt = point_of_index(i, q);
            let powers: [[u32; 5]; 4] = std::array::from_fn(|v| {
                let l = field.to_log(ctx.element(pt[v]).expect("in range"));
                std::array::from_fn(|e| field.pow(l, e as u32))
            });
            forms.iter().all(|g| g.eval(&field, &powers) == ZERO_LOG)
        });
        if let Some(i) = hit {
            return Ok(SmoothnessVerdict::SingularPoint {
                degree: k,
                modulus: ctx.modulus().to_vec(),
                coords: point_of_index(i, q),
            });
        }
    }
    Ok(SmoothnessVerdict::NoSingularPointFound { depth: max_degree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quartic::{build_family_member, QuarticForm};

    #[test]
    fn enumeration_covers_projective_space() {
        let q = 3;
        let pts: Vec<_> = (0..40).map(|i| point_of_index(i, q)).collect();
        assert_eq!(pts[0], [0, 0, 0, 1]);
        assert_eq!(pts[39], [1, 2, 2, 2]);
        let mut sorted = pts.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 40);
    }

    #[test]
    fn x0_reductions_have_no_singular_points() {
        let x0 = build_family_member(&QuarticForm::zero());
        for p in [2, 3] {
            let v = smoothness_probe(&x0.reduce(p).unwrap(), 4, DEFAULT_PROBE_BUDGET).unwrap();
            assert_eq!(v, SmoothnessVerdict::NoSingularPointFound { depth: 4 });
        }
    }

    #[test]
    fn fourth_power_of_linear_form_is_singular() {
        for src in ["(x + y + z + w)^4", "x^4 + y^4 + z^4 + w^4"] {
            let f = QuarticForm::parse(src).unwrap().reduce(2).unwrap();
            let v = smoothness_probe(&f, 4, DEFAULT_PROBE_BUDGET).unwrap();
            match v {
                SmoothnessVerdict::SingularPoint { degree, coords, .. } => {
                    assert_eq!(degree, 1);
                    // first point of the plane x + y + z + w = 0 in lex order
                    assert_eq!(coords, [0, 0, 1, 1]);
                }
                other => panic!("expected a singular point, got {other:?}"),
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let f = QuarticForm::parse("x^4 + y^4 + z^4 + w^4").unwrap().reduce(5).unwrap();
        assert!(matches!(
            smoothness_probe(&f, 8, DEFAULT_PROBE_BUDGET),
            Err(QuarticError::ProbeBudgetExceeded(..))
        ));
    }
}
