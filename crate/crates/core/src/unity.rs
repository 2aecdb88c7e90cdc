//! Eigenvalues `lambda` of Frobenius with `lambda / p` a root of unity. Their
//! number, with multiplicity, bounds the geometric Picard number.

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{big_pow, totient};
use crate::counter::TraceSeries;
use crate::poly::{self, IntPoly};
use crate::zeta::{twist_scale, CharPolynomial, KnownClasses, ZetaError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UnityError {
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("expected twist {expected}, got {got}")]
    WrongTwist { expected: i32, got: i32 },
    #[error("bound {bound} does not have the parity of the degree {degree}")]
    Parity { bound: u32, degree: usize },
    #[error(transparent)]
    Zeta(#[from] ZetaError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclotomicReport {
    #[serde(with = "crate::json::bigint_vec")]
    pub input: IntPoly,
    /// `(n, multiplicity of Phi_n)`, increasing in `n`.
    pub factors: Vec<(u64, u32)>,
    /// `sum phi(n) * multiplicity`.
    pub total: u32,
    #[serde(with = "crate::json::bigint_vec")]
    pub residual: IntPoly,
}

impl CyclotomicReport {
    /// Multiplies the factors back together.
    pub fn reassemble(&self) -> IntPoly {
        self.factors.iter().fold(self.residual.clone(), |acc, &(n, m)| {
            (0..m).fold(acc, |a, _| poly::mul(&a, &poly::cyclotomic(n)))
        })
    }
}

/// Integer polynomial with the same roots as a twist-0 characteristic
/// polynomial (lowest degree first, content 1).
pub fn integerize(f: &CharPolynomial) -> Result<IntPoly, UnityError> {
    if f.twist != 0 {
        return Err(UnityError::WrongTwist {
            expected: 0,
            got: f.twist,
        });
    }
    Ok(poly::integerize(&f.to_poly()?))
}

/// Divides out every cyclotomic factor. Candidates are the `n` with
/// `phi(n) <= deg f`; since `phi(n) >= sqrt(n/2)`, all of them satisfy
/// `n <= 2 deg^2`.
pub fn count_unity_roots(f: &[BigInt]) -> Result<CyclotomicReport, UnityError> {
    let input = poly::trim(f.to_vec());
    let Some(deg) = poly::degree(&input) else {
        return Err(UnityError::ZeroPolynomial);
    };
    let mut residual = input.clone();
    let mut factors = Vec::new();
    let mut total = 0u32;
    let limit = (2 * deg * deg).max(2) as u64;
    for n in 1..=limit {
        let phi = totient(n) as usize;
        if phi > poly::degree(&residual).unwrap_or(0) {
            continue;
        }
        let cyc = poly::cyclotomic(n);
        let mut mult = 0u32;
        loop {
            let (q, r) = poly::divrem_monic(&residual, &cyc);
            if !r.is_empty() {
                break;
            }
            residual = q;
            mult += 1;
        }
        if mult > 0 {
            factors.push((n, mult));
            total += mult * phi as u32;
        }
    }
    Ok(CyclotomicReport {
        input,
        factors,
        total,
        residual,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PicardBound {
    /// Roots of unity among the roots of the scaled polynomial.
    pub report: CyclotomicReport,
    /// Dimension of known classes added back when working on a quotient.
    pub known: u32,
    pub bound: u32,
}

/// Upper bound for the geometric Picard number from a complete twist-1
/// polynomial. When `f` lives on the quotient by known classes, their
/// dimension is added.
pub fn picard_upper_bound(f: &CharPolynomial, known: &KnownClasses) -> Result<PicardBound, UnityError> {
    if f.twist != 1 {
        return Err(UnityError::WrongTwist {
            expected: 1,
            got: f.twist,
        });
    }
    let g = integerize(&twist_scale(f, 0))?;
    let report = count_unity_roots(&g)?;
    // non-real roots pair up and real ones of modulus 1 are +-1
    if report.total as usize % 2 != f.degree % 2 {
        return Err(UnityError::Parity {
            bound: report.total,
            degree: f.degree,
        });
    }
    let known = known.dimension();
    Ok(PicardBound {
        bound: report.total + known,
        report,
        known,
    })
}

/// If `|t_n| = dim * p^n` for some `n`, every eigenvalue has `lambda^n`
/// equal to `t_n / dim` (equality in the triangle inequality), so every
/// `lambda / p` is a root of unity and the bound is the full dimension.
/// Returns the first such `n`.
pub fn weil_saturation(t: &TraceSeries) -> Option<u32> {
    t.traces.iter().enumerate().find_map(|(i, tn)| {
        let n = i as u32 + 1;
        let edge = BigInt::from(t.dimension) * big_pow(t.p, n);
        (tn.abs() == edge).then_some(n)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ints;
    use num_rational::BigRational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn difference_of_squares() {
        let r = count_unity_roots(&ints(&[-1, 0, 1])).unwrap();
        assert_eq!(r.factors, vec![(1, 1), (2, 1)]);
        assert_eq!(r.total, 2);
        assert_eq!(r.residual, ints(&[1]));
    }

    #[test]
    fn one_cyclotomic_one_other() {
        let f = poly::mul(&ints(&[1, 1, 1]), &ints(&[-2, 1]));
        let r = count_unity_roots(&f).unwrap();
        assert_eq!(r.factors, vec![(3, 1)]);
        assert_eq!(r.total, 2);
        assert_eq!(r.residual, ints(&[-2, 1]));
        assert_eq!(r.reassemble(), f);
    }

    #[test]
    fn non_monic_residual() {
        // 2x^2 + x + 2 has roots of modulus 1 that are not roots of unity
        let f = poly::mul(&ints(&[2, 1, 2]), &ints(&[1, 0, 1]));
        let r = count_unity_roots(&f).unwrap();
        assert_eq!(r.factors, vec![(4, 1)]);
        assert_eq!(r.residual, ints(&[2, 1, 2]));
    }

    #[test]
    fn all_eigenvalues_p() {
        // (x - 5)^22 at twist 1
        let f = (0..22).fold(ints(&[1]), |a, _| poly::mul(&a, &ints(&[-5, 1])));
        let cp = CharPolynomial::from_poly(5, 1, &poly::to_rational(&f));
        let b = picard_upper_bound(&cp, &KnownClasses::default()).unwrap();
        assert_eq!(b.bound, 22);
        assert_eq!(b.report.factors, vec![(1, 22)]);
    }

    #[test]
    fn integerize_requires_twist_zero() {
        let cp = CharPolynomial::from_poly(2, 1, &poly::to_rational(&ints(&[-4, 0, 1])));
        assert!(matches!(integerize(&cp), Err(UnityError::WrongTwist { .. })));
        let half = CharPolynomial::from_poly(
            2,
            0,
            &[
                BigRational::new((-1).into(), 2.into()),
                BigRational::from_integer(0.into()),
                BigRational::from_integer(1.into()),
            ],
        );
        assert_eq!(integerize(&half).unwrap(), ints(&[-1, 0, 2]));
    }

    #[test]
    fn recovers_random_constructions() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        // orders with phi(n) <= 8
        let orders: Vec<u64> = (1..=30).filter(|&n| totient(n) <= 8).collect();
        // irreducible, not cyclotomic: roots of modulus != 1 or not units
        let others = [ints(&[-2, 1]), ints(&[2, 1, 2]), ints(&[3, 0, 0, 1]), ints(&[1, -3, 1])];
        for _ in 0..200 {
            let mut f = ints(&[1]);
            let mut expect = std::collections::BTreeMap::new();
            let mut deg = 0;
            while deg < 8 {
                if rng.gen_bool(0.6) {
                    let n = orders[rng.gen_range(0..orders.len())];
                    let phi = totient(n) as usize;
                    if deg + phi > 8 {
                        break;
                    }
                    f = poly::mul(&f, &poly::cyclotomic(n));
                    *expect.entry(n).or_insert(0u32) += 1;
                    deg += phi;
                } else {
                    let g = &others[rng.gen_range(0..others.len())];
                    f = poly::mul(&f, g);
                    deg += g.len() - 1;
                }
            }
            let r = count_unity_roots(&f).unwrap();
            let got: std::collections::BTreeMap<u64, u32> = r.factors.iter().copied().collect();
            assert_eq!(got, expect);
            assert_eq!(r.reassemble(), f);
        }
    }

    #[test]
    fn saturation() {
        let t = TraceSeries::new(3, vec![BigInt::from(0), BigInt::from(198)], 22);
        assert_eq!(weil_saturation(&t), Some(2));
        let t = TraceSeries::new(3, vec![BigInt::from(5), BigInt::from(29)], 22);
        assert_eq!(weil_saturation(&t), None);
    }
}
