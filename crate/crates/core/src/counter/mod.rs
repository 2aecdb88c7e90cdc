//! Point counts `|X(GF(p^n))|` of reduced quartic surfaces and their
//! conversion into Frobenius traces on middle cohomology.

mod cache;
mod kernel;

use num_bigint::BigInt;
use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::arith::big_pow;
use crate::gf::{make_field, GfError, DEFAULT_TABLE_BUDGET};
use crate::quartic::ReducedSurface;

pub use cache::CountCache;

/// Default cap on `p^{2n}`, roughly the number of fibers visited.
pub const DEFAULT_COUNT_BUDGET: u128 = 1 << 35;

/// Second Betti number of a K3 surface.
pub const B2: u32 = 22;

#[derive(Debug, Error)]
pub enum CountError {
    #[error("n must be at least 1")]
    ZeroDegree,
    #[error("p^(2n) = {cost} exceeds the counting budget {budget}")]
    BudgetExceeded { cost: u128, budget: u128 },
    #[error("GF({p}^{n}) is too large for the log-table kernel")]
    FieldTooLarge { p: u64, n: u32 },
    #[error("trace {trace} at n = {n} violates the Weil bound {bound}")]
    WeilBoundViolation { n: u32, trace: BigInt, bound: BigInt },
    #[error("counts must be given for n = 1..N without gaps")]
    MissingCounts,
    #[error("cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Field(#[from] GfError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone)]
pub struct CountOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    /// Cap on `p^{2n}`.
    pub budget: u128,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            threads: None,
            budget: DEFAULT_COUNT_BUDGET,
        }
    }
}

/// Exact `|X(GF(p^n))|` for the surface.
pub fn count_points(s: &ReducedSurface, n: u32, opts: &CountOptions) -> Result<u64, CountError> {
    if n == 0 {
        return Err(CountError::ZeroDegree);
    }
    let p = s.p();
    let cost = (p as u128).checked_pow(2 * n).unwrap_or(u128::MAX);
    if cost > opts.budget {
        return Err(CountError::BudgetExceeded {
            cost,
            budget: opts.budget,
        });
    }
    if (p as u128)
        .checked_pow(n)
        .is_none_or(|q| q > DEFAULT_TABLE_BUDGET as u128)
    {
        return Err(CountError::FieldTooLarge { p, n });
    }
    let ctx = make_field(p, n as usize, 0)?;
    let field = ctx.zech().expect("field within table budget");
    let table = kernel::CoeffTable::new(s.coeffs(), &field);
    let run = || -> u64 {
        let ys = kernel::canonical_ys(&field);
        let chart: u64 = ys
            .par_iter()
            .with_min_len(16)
            .map(|&(y, dy)| kernel::count_line(&table, &field, y, dy))
            .sum();
        chart + kernel::count_at_infinity(&table, &field)
    };
    match opts.threads {
        None => Ok(run()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| CountError::ThreadPool(e.to_string()))?;
            Ok(pool.install(run))
        }
    }
}

/// Stable identifier of a reduced surface and the field-modulus policy.
pub fn fingerprint(s: &ReducedSurface) -> String {
    let mut h = Sha256::new();
    h.update(format!("p={};modulus=lex-seed-0;coeffs=", s.p()));
    for c in s.coeffs() {
        h.update(format!("{c},"));
    }
    hex::encode(&h.finalize()[..16])
}

/// `|X(GF(p^n))|` for `n = 1..N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountSeries {
    pub p: u64,
    pub counts: Vec<u64>,
    pub fingerprint: String,
}

impl CountSeries {
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Count for `n = 1..=max_n`, reusing and filling the cache when given.
pub fn count_series(
    s: &ReducedSurface,
    max_n: u32,
    opts: &CountOptions,
    cache: Option<&CountCache>,
) -> Result<CountSeries, CountError> {
    let fp = fingerprint(s);
    let mut counts = Vec::with_capacity(max_n as usize);
    for n in 1..=max_n {
        let cached = match cache {
            Some(c) => c.get(&fp, n)?,
            None => None,
        };
        let c = match cached {
            Some(c) => c,
            None => {
                let c = count_points(s, n, opts)?;
                if let Some(cache) = cache {
                    cache.put(&fp, s.p(), n, c)?;
                }
                c
            }
        };
        counts.push(c);
    }
    Ok(CountSeries {
        p: s.p(),
        counts,
        fingerprint: fp,
    })
}

/// Traces of powers of Frobenius on the middle cohomology.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceSeries {
    pub p: u64,
    #[serde(with = "crate::json::bigint_vec")]
    pub traces: Vec<BigInt>,
    /// Dimension of the space the traces live on (22, or less after
    /// quotienting by known classes).
    pub dimension: u32,
    pub betti: [u32; 5],
}

impl TraceSeries {
    pub fn new(p: u64, traces: Vec<BigInt>, dimension: u32) -> TraceSeries {
        TraceSeries {
            p,
            traces,
            dimension,
            betti: [1, 0, B2, 0, 1],
        }
    }

    /// `|t_n| <= dim * p^n` for every stored trace.
    pub fn check_weil_bound(&self) -> Result<(), CountError> {
        for (i, t) in self.traces.iter().enumerate() {
            let n = i as u32 + 1;
            let bound = BigInt::from(self.dimension) * big_pow(self.p, n);
            if t.abs() > bound {
                return Err(CountError::WeilBoundViolation {
                    n,
                    trace: t.clone(),
                    bound,
                });
            }
        }
        Ok(())
    }
}

/// Lefschetz with Betti numbers (1, 0, 22, 0, 1):
/// `t_n = |X(GF(p^n))| - p^{2n} - 1`.
pub fn traces_from_counts(c: &CountSeries) -> Result<TraceSeries, CountError> {
    if c.counts.is_empty() {
        return Err(CountError::MissingCounts);
    }
    let traces = c
        .counts
        .iter()
        .enumerate()
        .map(|(i, &count)| {
            let n = i as u32 + 1;
            BigInt::from(count) - big_pow(c.p, 2 * n) - 1
        })
        .collect();
    let t = TraceSeries::new(c.p, traces, B2);
    t.check_weil_bound()?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldElement;
    use crate::quartic::{build_family_member, QuarticForm};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Oracle: evaluate at every point of P^3(GF(q)).
    fn brute_count(s: &ReducedSurface, n: u32) -> u64 {
        let ctx = make_field(s.p(), n as usize, 0).unwrap();
        let q = ctx.q();
        let mons = crate::quartic::quartic_monomials();
        let coeffs: Vec<FieldElement> = s.coeffs().iter().map(|&c| ctx.from_int(c as i64)).collect();
        let eval = |pt: [FieldElement; 4]| {
            let mut acc = ctx.zero();
            for (e, &c) in mons.iter().zip(&coeffs) {
                let mut t = c;
                for v in 0..4 {
                    t = ctx.mul(t, ctx.pow(pt[v], e[v] as u128));
                }
                acc = ctx.add(acc, t);
            }
            acc.is_zero()
        };
        let mut total = 0;
        for a in 0..q {
            for b in 0..q {
                for c in 0..q {
                    for d in 0..q {
                        let v = [a, b, c, d];
                        let lead = v.iter().position(|&x| x != 0);
                        // normalized representatives only
                        if lead.is_none_or(|i| v[i] != 1) {
                            continue;
                        }
                        if eval(v.map(|x| ctx.element(x).unwrap())) {
                            total += 1;
                        }
                    }
                }
            }
        }
        total
    }

    fn x0() -> QuarticForm {
        build_family_member(&QuarticForm::zero())
    }

    #[test]
    fn plane_fourth_power_over_f2() {
        let f = QuarticForm::parse("(x + y + z + w)^4").unwrap().reduce(2).unwrap();
        assert_eq!(count_points(&f, 1, &CountOptions::default()).unwrap(), 7);
        assert_eq!(brute_count(&f, 1), 7);
    }

    #[test]
    fn x0_small_counts() {
        let opts = CountOptions::default();
        let s2 = x0().reduce(2).unwrap();
        let s3 = x0().reduce(3).unwrap();
        assert_eq!(count_points(&s2, 1, &opts).unwrap(), 8);
        assert_eq!(count_points(&s3, 1, &opts).unwrap(), 15);
        assert_eq!(brute_count(&s2, 1), 8);
        assert_eq!(brute_count(&s3, 1), 15);
        for n in 2..=3 {
            assert_eq!(count_points(&s2, n, &opts).unwrap(), brute_count(&s2, n));
        }
        assert_eq!(count_points(&s3, 2, &opts).unwrap(), brute_count(&s3, 2));
    }

    #[test]
    fn random_surfaces_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for (p, n) in [(2u64, 2u32), (3, 1), (5, 1), (7, 1), (3, 2)] {
            for _ in 0..6 {
                let coeffs: Vec<u64> = (0..35).map(|_| rng.gen_range(0..p)).collect();
                let Ok(s) = ReducedSurface::new(p, coeffs) else {
                    continue;
                };
                assert_eq!(
                    count_points(&s, n, &CountOptions::default()).unwrap(),
                    brute_count(&s, n),
                    "p={p} n={n}"
                );
            }
        }
    }

    #[test]
    fn thread_count_does_not_matter() {
        let s = x0().reduce(3).unwrap();
        let one = CountOptions {
            threads: Some(1),
            ..Default::default()
        };
        let three = CountOptions {
            threads: Some(3),
            ..Default::default()
        };
        assert_eq!(count_points(&s, 4, &one).unwrap(), count_points(&s, 4, &three).unwrap());
    }

    #[test]
    fn counts_independent_of_h() {
        let h = QuarticForm::parse("x^2*y^2 - 3*z*w^3 + y*z*w*x").unwrap();
        let member = build_family_member(&h);
        let opts = CountOptions::default();
        for p in [2u64, 3] {
            for n in 1..=3 {
                assert_eq!(
                    count_points(&member.reduce(p).unwrap(), n, &opts).unwrap(),
                    count_points(&x0().reduce(p).unwrap(), n, &opts).unwrap()
                );
            }
        }
    }

    #[test]
    fn budget_and_degree_errors() {
        let s = x0().reduce(3).unwrap();
        let tight = CountOptions {
            budget: 1000,
            ..Default::default()
        };
        assert!(matches!(
            count_points(&s, 4, &tight),
            Err(CountError::BudgetExceeded { .. })
        ));
        assert!(matches!(
            count_points(&s, 0, &CountOptions::default()),
            Err(CountError::ZeroDegree)
        ));
    }

    #[test]
    fn traces_from_small_counts() {
        let c2 = CountSeries {
            p: 2,
            counts: vec![8],
            fingerprint: String::new(),
        };
        assert_eq!(traces_from_counts(&c2).unwrap().traces, vec![BigInt::from(3)]);
        let c3 = CountSeries {
            p: 3,
            counts: vec![15],
            fingerprint: String::new(),
        };
        assert_eq!(traces_from_counts(&c3).unwrap().traces, vec![BigInt::from(5)]);
        // all of P^3(F_2): 15 - 4 - 1 = 10 <= 44
        let all = CountSeries {
            p: 2,
            counts: vec![15],
            fingerprint: String::new(),
        };
        assert_eq!(traces_from_counts(&all).unwrap().traces, vec![BigInt::from(10)]);
        // all of P^3(F_{2^4}) is far outside the bound
        let bad = CountSeries {
            p: 2,
            counts: vec![8, 20, 72, 16 * 16 * 16 + 16 * 16 + 16 + 1],
            fingerprint: String::new(),
        };
        assert!(matches!(
            traces_from_counts(&bad),
            Err(CountError::WeilBoundViolation { n: 4, .. })
        ));
    }
}
