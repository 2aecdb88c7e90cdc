//! Néron–Severi bookkeeping: Gram matrices, discriminants up to squares,
//! and the argument that turns two rank-2 upper bounds into rank one.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::squarefree_part;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("Gram matrix must be square and nonempty")]
    NotSquare,
    #[error("Gram matrix is not symmetric")]
    NotSymmetric,
    #[error("Gram matrix is degenerate")]
    Degenerate,
    #[error("{0} labels for a rank {1} lattice")]
    LabelCount(usize, usize),
    #[error("adjunction with nontrivial canonical class is not supported")]
    NontrivialCanonical,
    #[error("negative genus")]
    NegativeGenus,
    #[error("zero has no square class")]
    ZeroClass,
    #[error("discriminant does not fit in 64 bits")]
    Overflow,
}

/// External or unchecked facts a certificate relies on.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "axiom")]
pub enum Axiom {
    /// NS of the geometric generic fiber injects into NS of the geometric
    /// special fiber at a prime of good reduction, preserving the pairing.
    #[serde(rename = "NERON_SPECIALIZATION")]
    NeronSpecialization,
    /// The intersection pairing on NS of a K3 surface is even and NS is
    /// torsion free.
    #[serde(rename = "NS_EVEN")]
    NsEven,
    /// Van Geemen 5.4: the unimodular alternative for the mod-3 lattice
    /// cannot occur.
    #[serde(rename = "VAN_GEEMEN_5_4")]
    VanGeemen54,
    /// Torsion of an elliptic curve over Q has order in {1..10, 12}.
    #[serde(rename = "MAZUR")]
    Mazur,
    /// Torsion injects into E(F_p) at good primes p above 2.
    #[serde(rename = "TORSION_INJECTS")]
    TorsionInjects,
    /// The reduction at `p` is smooth; exhaustively probed over GF(p^k),
    /// k <= depth, and otherwise assumed.
    #[serde(rename = "SMOOTHNESS")]
    Smoothness { p: u64, depth: u32 },
}

impl Axiom {
    pub fn name(&self) -> String {
        match self {
            Axiom::NeronSpecialization => "NERON_SPECIALIZATION".into(),
            Axiom::NsEven => "NS_EVEN".into(),
            Axiom::VanGeemen54 => "VAN_GEEMEN_5_4".into(),
            Axiom::Mazur => "MAZUR".into(),
            Axiom::TorsionInjects => "TORSION_INJECTS".into(),
            Axiom::Smoothness { p, depth } => format!("SMOOTHNESS({p}, {depth})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramLattice {
    pub labels: Vec<String>,
    pub gram: Vec<Vec<i64>>,
    pub even: bool,
}

impl GramLattice {
    pub fn new(labels: &[&str], gram: Vec<Vec<i64>>) -> Result<GramLattice, LatticeError> {
        let n = gram.len();
        if n == 0 || gram.iter().any(|r| r.len() != n) {
            return Err(LatticeError::NotSquare);
        }
        if labels.len() != n {
            return Err(LatticeError::LabelCount(labels.len(), n));
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(LatticeError::NotSymmetric);
                }
            }
        }
        let even = (0..n).all(|i| gram[i][i] % 2 == 0);
        let g = GramLattice {
            labels: labels.iter().map(|s| s.to_string()).collect(),
            gram,
            even,
        };
        if determinant(&g.gram).is_zero() {
            return Err(LatticeError::Degenerate);
        }
        Ok(g)
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }
}

/// Fraction-free elimination.
fn determinant(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

pub fn discriminant(g: &GramLattice) -> BigInt {
    determinant(&g.gram)
}

/// Element of Q*/Q*^2, as a signed squarefree integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SquareClass(i64);

impl SquareClass {
    pub fn value(self) -> i64 {
        self.0
    }
}

impl std::fmt::Display for SquareClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn square_class(d: &BigInt) -> Result<SquareClass, LatticeError> {
    if d.is_zero() {
        return Err(LatticeError::ZeroClass);
    }
    let d = d.to_i64().ok_or(LatticeError::Overflow)?;
    Ok(SquareClass(squarefree_part(d)))
}

/// `2g - 2 = C.(C + K)` with `K = 0`.
pub fn self_intersection_by_adjunction(genus: i64, k_trivial: bool) -> Result<i64, LatticeError> {
    if !k_trivial {
        return Err(LatticeError::NontrivialCanonical);
    }
    if genus < 0 {
        return Err(LatticeError::NegativeGenus);
    }
    Ok(2 * genus - 2)
}

/// All `(m, d)` with `disc = m^2 d` and `m` in the range: the possible
/// indices of a sublattice of discriminant `disc` in an overlattice, with
/// the overlattice's discriminant.
pub fn index_square_filter(disc: i64, indices: std::ops::RangeInclusive<u64>) -> Vec<(u64, i64)> {
    assert_ne!(disc, 0);
    indices
        .filter(|&m| m > 0)
        .filter_map(|m| {
            let sq = (m as i128) * (m as i128);
            (disc as i128 % sq == 0).then(|| (m, (disc as i128 / sq) as i64))
        })
        .collect()
}

/// Natural index range for [`index_square_filter`].
pub fn index_range(disc: i64) -> std::ops::RangeInclusive<u64> {
    let a = disc.unsigned_abs();
    1..=((a as f64).sqrt() as u64 + 1)
}

/// An even lattice of rank 2 with Gram `[[2a, b], [b, 2c]]` has
/// discriminant `4ac - b^2`, which is 0 or -1 mod 4.
pub fn even_rank2_mod4_filter(candidates: &[i64]) -> Vec<i64> {
    candidates
        .iter()
        .copied()
        .filter(|d| d.rem_euclid(4) == 0 || d.rem_euclid(4) == 3)
        .collect()
}

/// Rules out the unimodular even indefinite rank-2 case (the hyperbolic
/// plane, discriminant -1). This step is assumed, not derived, and is
/// returned as an axiom.
pub fn exclude_hyperbolic_plane(candidates: &[i64]) -> (Vec<i64>, Option<Axiom>) {
    if candidates.contains(&-1) {
        let kept = candidates.iter().copied().filter(|&d| d != -1).collect();
        (kept, Some(Axiom::VanGeemen54))
    } else {
        (candidates.to_vec(), None)
    }
}

/// Rank upper bound and NS discriminant class of one reduction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeBound {
    pub p: u64,
    pub bound: u32,
    pub square_class: SquareClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RankConclusion {
    /// Geometric Picard number 1. `generated_by_h` is set when the index of
    /// `<H>` is forced to be 1.
    RankOne {
        index_candidates: Vec<(u64, i64)>,
        even_survivors: Vec<(u64, i64)>,
        generated_by_h: bool,
    },
    /// Both bounds are 2 but the discriminant classes agree.
    Inconclusive { bound: u32 },
    /// No discriminant argument applies; the smaller bound stands.
    UpperBound { bound: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeCertificate {
    pub primes: [PrimeBound; 2],
    pub h_square: i64,
    pub conclusion: RankConclusion,
    pub axioms: Vec<Axiom>,
}

impl LatticeCertificate {
    pub fn is_rank_one(&self) -> bool {
        matches!(self.conclusion, RankConclusion::RankOne { .. })
    }
}

/// If both reductions have rank at most 2 and their NS discriminants lie in
/// different square classes, the two injections of NS of the generic fiber
/// cannot both be isometries onto rank-2 spaces, so the rank is at most 1;
/// `H^2 != 0` makes it exactly 1. The index of `<H>` then satisfies
/// `H^2 = m^2 disc`, with `disc` even because NS is even.
pub fn rank_one_certificate(a: &PrimeBound, b: &PrimeBound, h_square: i64) -> LatticeCertificate {
    let mut axioms = vec![Axiom::NeronSpecialization];
    let conclusion = if a.bound != 2 || b.bound != 2 {
        RankConclusion::UpperBound {
            bound: a.bound.min(b.bound),
        }
    } else if a.square_class == b.square_class || h_square == 0 {
        RankConclusion::Inconclusive { bound: 2 }
    } else {
        axioms.push(Axiom::NsEven);
        let index_candidates = index_square_filter(h_square, index_range(h_square));
        let even_survivors: Vec<(u64, i64)> = index_candidates.iter().copied().filter(|&(_, d)| d % 2 == 0).collect();
        let generated_by_h = even_survivors == [(1, h_square)];
        RankConclusion::RankOne {
            index_candidates,
            even_survivors,
            generated_by_h,
        }
    };
    LatticeCertificate {
        primes: [a.clone(), b.clone()],
        h_square,
        conclusion,
        axioms,
    }
}

/// Re-derives the conclusion from the inputs alone.
pub fn check_lattice_certificate(c: &LatticeCertificate) -> bool {
    rank_one_certificate(&c.primes[0], &c.primes[1], c.h_square) == *c
}

/// Square class of the discriminant of a Gram matrix.
pub fn gram_class(g: &GramLattice) -> Result<SquareClass, LatticeError> {
    square_class(&discriminant(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn class(d: i64) -> SquareClass {
        square_class(&BigInt::from(d)).unwrap()
    }

    #[test]
    fn gram_anchors() {
        let a2 = GramLattice::new(&["H", "C"], vec![vec![4, 2], vec![2, -2]]).unwrap();
        assert_eq!(discriminant(&a2), BigInt::from(-12));
        assert_eq!(gram_class(&a2).unwrap(), class(-3));
        assert!(a2.even);
        let a3 = GramLattice::new(&["H", "L"], vec![vec![4, 1], vec![1, -2]]).unwrap();
        assert_eq!(discriminant(&a3), BigInt::from(-9));
        assert_eq!(gram_class(&a3).unwrap().value(), -1);
        let id = GramLattice::new(&["a", "b"], vec![vec![2, 0], vec![0, 2]]).unwrap();
        assert_eq!(discriminant(&id), BigInt::from(4));
        assert_eq!(gram_class(&id).unwrap().value(), 1);
    }

    #[test]
    fn gram_rejections() {
        assert_eq!(
            GramLattice::new(&["a", "b"], vec![vec![1, 2], vec![2, 4]]),
            Err(LatticeError::Degenerate)
        );
        assert_eq!(
            GramLattice::new(&["a", "b"], vec![vec![1, 2], vec![3, 4]]),
            Err(LatticeError::NotSymmetric)
        );
        assert_eq!(GramLattice::new(&[], vec![]), Err(LatticeError::NotSquare));
        assert_eq!(
            GramLattice::new(&["a"], vec![vec![1, 0], vec![0, 1]]),
            Err(LatticeError::LabelCount(1, 2))
        );
    }

    #[test]
    fn adjunction() {
        assert_eq!(self_intersection_by_adjunction(0, true), Ok(-2));
        assert_eq!(self_intersection_by_adjunction(1, true), Ok(0));
        // hyperplane section: plane quartic of arithmetic genus (4-1)(4-2)/2
        assert_eq!(self_intersection_by_adjunction((4 - 1) * (4 - 2) / 2, true), Ok(4));
        assert!(self_intersection_by_adjunction(0, false).is_err());
    }

    #[test]
    fn index_filters() {
        assert_eq!(index_square_filter(-12, index_range(-12)), vec![(1, -12), (2, -3)]);
        assert_eq!(index_square_filter(-9, index_range(-9)), vec![(1, -9), (3, -1)]);
        assert_eq!(index_square_filter(4, index_range(4)), vec![(1, 4), (2, 1)]);
        assert_eq!(even_rank2_mod4_filter(&[-12, -3]), vec![-12]);
        assert_eq!(even_rank2_mod4_filter(&[-9, -1]), vec![-9, -1]);
        assert_eq!(even_rank2_mod4_filter(&[0, 4, -4]), vec![0, 4, -4]);
        let (kept, ax) = exclude_hyperbolic_plane(&[-9, -1]);
        assert_eq!(kept, vec![-9]);
        assert_eq!(ax, Some(Axiom::VanGeemen54));
    }

    #[test]
    fn rank_one_examples() {
        let pb = |p, bound, c| PrimeBound {
            p,
            bound,
            square_class: class(c),
        };
        let c = rank_one_certificate(&pb(2, 2, -3), &pb(3, 2, -1), 4);
        match &c.conclusion {
            RankConclusion::RankOne {
                index_candidates,
                even_survivors,
                generated_by_h,
            } => {
                assert_eq!(index_candidates, &vec![(1, 4), (2, 1)]);
                assert_eq!(even_survivors, &vec![(1, 4)]);
                assert!(generated_by_h);
            }
            other => panic!("{other:?}"),
        }
        assert!(c.axioms.contains(&Axiom::NeronSpecialization));
        assert!(check_lattice_certificate(&c));
        assert_eq!(
            rank_one_certificate(&pb(2, 2, -3), &pb(3, 2, -3), 4).conclusion,
            RankConclusion::Inconclusive { bound: 2 }
        );
        assert_eq!(
            rank_one_certificate(&pb(2, 4, -3), &pb(3, 2, -1), 4).conclusion,
            RankConclusion::UpperBound { bound: 2 }
        );
        let mut forged = c.clone();
        forged.h_square = 2;
        assert!(!check_lattice_certificate(&forged));
    }

    #[test]
    fn axiom_json() {
        let a = serde_json::to_value(Axiom::Smoothness { p: 3, depth: 4 }).unwrap();
        assert_eq!(a, serde_json::json!({"axiom": "SMOOTHNESS", "p": 3, "depth": 4}));
        assert_eq!(Axiom::VanGeemen54.name(), "VAN_GEEMEN_5_4");
    }

    proptest! {
        #[test]
        fn det_invariant_under_unimodular_change(
            a in -20i64..20, b in -20i64..20, c in -20i64..20,
            u in -5i64..5, k in -5i64..5,
        ) {
            let g = vec![vec![a, b], vec![b, c]];
            prop_assume!(a * c - b * b != 0);
            // U = [[1, k], [0, 1]] [[1, 0], [u, 1]] has determinant 1
            let m = [[1 + k * u, k], [u, 1]];
            let mut h = vec![vec![0i64; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    for r in 0..2 {
                        for s in 0..2 {
                            h[i][j] += m[r][i] * g[r][s] * m[s][j];
                        }
                    }
                }
            }
            prop_assert_eq!(determinant(&g), determinant(&h));
        }

        #[test]
        fn square_class_ignores_squares(m in 1i64..200, d in -500i64..500) {
            prop_assume!(d != 0);
            prop_assert_eq!(class(m * m * d), class(d));
        }
    }
}
