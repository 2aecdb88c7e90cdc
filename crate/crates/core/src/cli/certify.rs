//! The end-to-end pipeline: per-prime bounds, the lattice argument, and the
//! rational-points test, recorded in a certificate that can be re-derived
//! from the surface, the configuration and the raw counts.

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::{Config, PrimeConfig};
use crate::counter::{count_series, traces_from_counts, CountCache, CountOptions, CountSeries, TraceSeries};
use crate::genus1::{membership_in_u, MembershipEvidence};
use crate::gf::{make_field, FieldCtx, FieldElement};
use crate::lattice::{
    discriminant, even_rank2_mod4_filter, exclude_hyperbolic_plane, gram_class, index_range, index_square_filter,
    rank_one_certificate, self_intersection_by_adjunction, Axiom, GramLattice, LatticeCertificate, PrimeBound,
    SquareClass,
};
use crate::quartic::{
    family_bindings, parse_with, smoothness_probe, QuarticForm, ReducedSurface, SmoothnessVerdict, SparsePoly,
};
use crate::unity::{picard_upper_bound, weil_saturation, PicardBound};
use crate::zeta::{
    complete_by_functional_equation, multiply_known, newton_charpoly, quotient_traces, CharPolynomial, KnownClass,
    KnownClasses, ZetaError,
};

/// Degree of the surface, i.e. `H^2`.
pub const H_SQUARE: i64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Reduce,
    Smoothness,
    KnownCurves,
    Count,
    Zeta,
    Bound,
    Lattice,
    Points,
    Verify,
}

#[derive(Debug, Clone, Error, Serialize, Deserialize)]
#[error("{stage:?} stage{}: {message}", p.map(|p| format!(" at p = {p}")).unwrap_or_default())]
pub struct StageError {
    pub stage: Stage,
    pub p: Option<u64>,
    pub message: String,
    /// The computation ran but cannot decide (for instance an undetermined
    /// sign of the functional equation).
    pub inconclusive: bool,
}

fn fail(stage: Stage, p: Option<u64>, e: impl ToString) -> StageError {
    StageError {
        stage,
        p,
        message: e.to_string(),
        inconclusive: false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveCheck {
    pub label: String,
    pub equations: Vec<String>,
    /// Points of the curve over `GF(p^k)`, all on the surface; more than
    /// `4 * degree` of them forces containment by Bezout.
    pub points: u64,
    pub k: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeRecord {
    pub p: u64,
    pub fingerprint: String,
    pub smoothness: SmoothnessVerdict,
    pub curves: Vec<CurveCheck>,
    pub known: KnownClasses,
    pub counts: Vec<u64>,
    pub traces: TraceSeries,
    pub quotient: TraceSeries,
    /// First `n` with `|t_n| = 22 p^n`, if any.
    pub saturation: Option<u32>,
    /// Characteristic polynomial of Frobenius on `H^2`, roots of size `p`.
    pub charpoly: Option<CharPolynomial>,
    pub unity: Option<PicardBound>,
    pub bound: u32,
    pub gram: Option<GramLattice>,
    pub discriminant: Option<i64>,
    /// Set when the known classes span a space of dimension `bound`.
    pub square_class: Option<SquareClass>,
    /// Discriminants of NS of the reduction compatible with the Gram
    /// matrix having finite index (rank 2 only).
    pub ns_discriminants: Vec<i64>,
    pub axioms: Vec<Axiom>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateBody {
    pub surface: QuarticForm,
    pub surface_text: String,
    pub config: Config,
    pub primes: Vec<PrimeRecord>,
    pub lattice: Option<LatticeCertificate>,
    pub rank_bound: u32,
    pub rank_one: bool,
    pub generated_by_h: bool,
    pub points: MembershipEvidence,
    pub infinitely_many_points: bool,
    pub axioms: Vec<Axiom>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub version: String,
    /// Wall-clock seconds per stage.
    pub wall_seconds: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankCertificate {
    pub body: CertificateBody,
    pub meta: Meta,
}

impl RankCertificate {
    /// 0 when rank one and infinitely many points are both certified.
    pub fn exit_code(&self) -> i32 {
        if self.body.rank_one && self.body.infinitely_many_points {
            0
        } else {
            2
        }
    }
}

pub fn stage_exit_code(e: &StageError) -> i32 {
    if e.inconclusive {
        2
    } else {
        3
    }
}

fn eval_over(ctx: &FieldCtx, f: &SparsePoly, pt: &[FieldElement; 4]) -> FieldElement {
    let p = ctx.p() as i64;
    let mut acc = ctx.zero();
    for (e, c) in f.terms() {
        let c = (c % p).to_i64().expect("reduced");
        let mut t = ctx.from_int(c);
        for i in 0..4 {
            if e[i] > 0 {
                t = ctx.mul(t, ctx.pow(pt[i], e[i] as u128));
            }
        }
        acc = ctx.add(acc, t);
    }
    acc
}

fn projective_points(ctx: &FieldCtx) -> impl Iterator<Item = [FieldElement; 4]> + '_ {
    let q = ctx.q();
    (0..4usize).flat_map(move |lead| {
        let free = 3 - lead as u32;
        (0..q.pow(free)).map(move |mut i| {
            let mut pt = [ctx.zero(); 4];
            pt[lead] = ctx.one();
            for slot in pt.iter_mut().skip(lead + 1) {
                *slot = ctx.element(i % q).expect("index below q");
                i /= q;
            }
            pt
        })
    })
}

/// Confirms that the curve cut out by `equations` lies on the reduction.
pub fn check_curve(
    s: &ReducedSurface,
    label: &str,
    equations: &[String],
    degree: i64,
    probe_budget: u64,
) -> Result<CurveCheck, String> {
    let eqs: Vec<SparsePoly> = equations
        .iter()
        .map(|e| parse_with(e, &family_bindings()).map_err(|err| format!("{label}: {err}")))
        .collect::<Result<_, _>>()?;
    let f = s.lift().to_poly();
    let p = s.p();
    for k in 1u32.. {
        let cost = (p as u128).checked_pow(3 * k).unwrap_or(u128::MAX);
        if cost > probe_budget as u128 {
            break;
        }
        let ctx = make_field(p, k as usize, 0).map_err(|e| e.to_string())?;
        let mut n = 0u64;
        for pt in projective_points(&ctx) {
            if eqs.iter().all(|g| eval_over(&ctx, g, &pt).is_zero()) {
                if !eval_over(&ctx, &f, &pt).is_zero() {
                    return Err(format!("{label} is not contained in the reduction mod {p}"));
                }
                n += 1;
            }
        }
        if n > 4 * degree.max(1) as u64 {
            return Ok(CurveCheck {
                label: label.to_string(),
                equations: equations.to_vec(),
                points: n,
                k,
            });
        }
    }
    Err(format!(
        "could not confirm {label} on the reduction mod {p} within the probe budget"
    ))
}

fn gram_for(pc: &PrimeConfig) -> Result<Option<GramLattice>, String> {
    if pc.known.iter().any(|c| c.orbit != 1) {
        return Ok(None);
    }
    let mut labels: Vec<&str> = vec![];
    let mut degree_row = vec![];
    if pc.hyperplane {
        labels.push("H");
    }
    for c in &pc.known {
        labels.push(&c.label);
        degree_row.push(c.degree);
    }
    let n = labels.len();
    if n == 0 {
        return Ok(None);
    }
    let off = pc.hyperplane as usize;
    let mut g = vec![vec![0i64; n]; n];
    if pc.hyperplane {
        g[0][0] = H_SQUARE;
        for (i, d) in degree_row.iter().enumerate() {
            g[0][i + 1] = *d;
            g[i + 1][0] = *d;
        }
    }
    for (i, c) in pc.known.iter().enumerate() {
        g[i + off][i + off] = self_intersection_by_adjunction(c.genus, true).map_err(|e| e.to_string())?;
        for (j, d) in pc.known.iter().enumerate().skip(i + 1) {
            let v = pc
                .pairings
                .iter()
                .find(|(a, b, _)| (a == &c.label && b == &d.label) || (a == &d.label && b == &c.label))
                .map(|t| t.2)
                .ok_or_else(|| format!("no intersection number given for {} and {}", c.label, d.label))?;
            g[i + off][j + off] = v;
            g[j + off][i + off] = v;
        }
    }
    Ok(GramLattice::new(&labels, g).ok())
}

pub fn known_classes(pc: &PrimeConfig) -> KnownClasses {
    let mut v = vec![];
    if pc.hyperplane {
        v.push(KnownClass::fixed("H"));
    }
    for c in &pc.known {
        v.push(KnownClass {
            label: c.label.clone(),
            orbit: c.orbit,
            sign: c.sign,
        });
    }
    KnownClasses::new(v)
}

/// Checks done before counting: reduction, smoothness probe, known curves.
pub struct Prepared {
    pub surface: ReducedSurface,
    pub smoothness: SmoothnessVerdict,
    pub curves: Vec<CurveCheck>,
    pub depth: u32,
}

/// Deepest probe within budget, at most `cfg.probe_depth`.
fn probe_depth(p: u64, cfg: &Config) -> u32 {
    (1..=cfg.probe_depth)
        .take_while(|&k| {
            (p as u128)
                .checked_pow(3 * k)
                .is_some_and(|c| c <= cfg.probe_budget as u128)
        })
        .last()
        .unwrap_or(0)
}

pub fn prepare(f: &QuarticForm, pc: &PrimeConfig, cfg: &Config) -> Result<Prepared, StageError> {
    let p = Some(pc.p);
    let surface = f.reduce(pc.p).map_err(|e| fail(Stage::Reduce, p, e))?;
    let depth = probe_depth(pc.p, cfg);
    if depth == 0 {
        return Err(fail(Stage::Smoothness, p, "probe budget too small for GF(p)"));
    }
    let smoothness =
        smoothness_probe(&surface, depth, cfg.probe_budget as u128).map_err(|e| fail(Stage::Smoothness, p, e))?;
    if !smoothness.is_clean() {
        return Err(fail(
            Stage::Smoothness,
            p,
            format!("reduction is singular: {smoothness:?}"),
        ));
    }
    let curves = pc
        .known
        .iter()
        .map(|c| check_curve(&surface, &c.label, &c.equations, c.degree, cfg.probe_budget))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| fail(Stage::KnownCurves, p, e))?;
    Ok(Prepared {
        surface,
        smoothness,
        curves,
        depth,
    })
}

pub fn count(prep: &Prepared, pc: &PrimeConfig, cfg: &Config) -> Result<CountSeries, StageError> {
    let opts = CountOptions {
        threads: cfg.threads,
        budget: cfg.count_budget as u128,
    };
    let cache = match &cfg.cache_dir {
        Some(d) => Some(CountCache::new(d).map_err(|e| fail(Stage::Count, Some(pc.p), e))?),
        None => None,
    };
    count_series(&prep.surface, pc.max_n, &opts, cache.as_ref()).map_err(|e| fail(Stage::Count, Some(pc.p), e))
}

/// Everything after the counts.
pub fn finish(prep: Prepared, pc: &PrimeConfig, counts: &CountSeries) -> Result<PrimeRecord, StageError> {
    let p = Some(pc.p);
    if counts.counts.len() != pc.max_n as usize || counts.p != pc.p {
        return Err(fail(Stage::Count, p, "counts do not match the configuration"));
    }
    let fingerprint = crate::counter::fingerprint(&prep.surface);
    if counts.fingerprint != fingerprint {
        return Err(fail(Stage::Count, p, "counts belong to a different surface"));
    }
    let traces = traces_from_counts(counts).map_err(|e| fail(Stage::Zeta, p, e))?;
    let known = known_classes(pc);
    let a = analyze_traces(&traces, &known)?;
    let bound = a.bound;
    let gram = gram_for(pc).map_err(|e| fail(Stage::Lattice, p, e))?;
    let mut axioms = vec![Axiom::Smoothness {
        p: pc.p,
        depth: prep.depth,
    }];
    let (disc, square_class, ns_discriminants) = match &gram {
        Some(g) if g.rank() as u32 == bound => {
            let d = discriminant(g).to_i64();
            let class = gram_class(g).ok();
            let mut cands = vec![];
            if let (Some(d), 2) = (d, bound) {
                let all: Vec<i64> = index_square_filter(d, index_range(d))
                    .into_iter()
                    .map(|t| t.1)
                    .collect();
                let (kept, ax) = exclude_hyperbolic_plane(&even_rank2_mod4_filter(&all));
                axioms.extend(ax);
                cands = kept;
            }
            (d, class, cands)
        }
        Some(g) => (discriminant(g).to_i64(), None, vec![]),
        None => (None, None, vec![]),
    };
    Ok(PrimeRecord {
        p: pc.p,
        fingerprint,
        smoothness: prep.smoothness,
        curves: prep.curves,
        known,
        counts: counts.counts.clone(),
        traces,
        quotient: a.quotient,
        saturation: a.saturation,
        charpoly: a.full,
        unity: a.unity,
        bound,
        gram,
        discriminant: disc,
        square_class,
        ns_discriminants,
        axioms,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceAnalysis {
    pub quotient: TraceSeries,
    pub saturation: Option<u32>,
    /// Polynomial on the quotient by the known classes, as far as the
    /// traces and the functional equation determine it.
    pub partial: Option<CharPolynomial>,
    pub full: Option<CharPolynomial>,
    pub unity: Option<PicardBound>,
    pub bound: u32,
}

/// Traces to Picard bound: saturation shortcut, else quotient trick,
/// Newton, functional equation and the unity-root count.
pub fn analyze_traces(traces: &TraceSeries, known: &KnownClasses) -> Result<TraceAnalysis, StageError> {
    let p = Some(traces.p);
    let quotient = quotient_traces(traces, known).map_err(|e| fail(Stage::Zeta, p, e))?;
    if let Some(n) = weil_saturation(traces) {
        return Ok(TraceAnalysis {
            quotient,
            saturation: Some(n),
            partial: None,
            full: None,
            unity: None,
            bound: traces.dimension,
        });
    }
    let partial = newton_charpoly(traces.p, &quotient.traces, quotient.dimension as usize);
    let complete = match complete_by_functional_equation(&partial) {
        Ok(c) => c,
        Err(e) => {
            return Err(StageError {
                inconclusive: e == ZetaError::AmbiguousSign,
                ..fail(Stage::Zeta, p, e)
            })
        }
    };
    let full = multiply_known(&complete, known).map_err(|e| fail(Stage::Zeta, p, e))?;
    if !full.is_integral() {
        return Err(fail(Stage::Zeta, p, "characteristic polynomial is not integral"));
    }
    let unity = picard_upper_bound(&full, &KnownClasses::default()).map_err(|e| fail(Stage::Bound, p, e))?;
    Ok(TraceAnalysis {
        quotient,
        saturation: None,
        partial: Some(complete),
        bound: unity.bound,
        full: Some(full),
        unity: Some(unity),
    })
}

fn assemble(f: &QuarticForm, cfg: &Config, primes: Vec<PrimeRecord>) -> Result<CertificateBody, StageError> {
    let lattice = match (&primes[0].square_class, &primes[1].square_class) {
        (Some(a), Some(b)) => Some(rank_one_certificate(
            &PrimeBound {
                p: primes[0].p,
                bound: primes[0].bound,
                square_class: *a,
            },
            &PrimeBound {
                p: primes[1].p,
                bound: primes[1].bound,
                square_class: *b,
            },
            H_SQUARE,
        )),
        _ => None,
    };
    let rank_one = lattice.as_ref().is_some_and(|l| l.is_rank_one());
    let generated_by_h = matches!(
        lattice.as_ref().map(|l| &l.conclusion),
        Some(crate::lattice::RankConclusion::RankOne {
            generated_by_h: true,
            ..
        })
    );
    let rank_bound = if rank_one {
        1
    } else {
        primes.iter().map(|r| r.bound).min().unwrap_or(22)
    };
    let points = membership_in_u(f).map_err(|e| fail(Stage::Points, None, e))?;
    let mut axioms: Vec<Axiom> = primes.iter().flat_map(|r| r.axioms.clone()).collect();
    if let Some(l) = &lattice {
        axioms.extend(l.axioms.clone());
    }
    axioms.extend(points.axioms.clone());
    axioms.sort();
    axioms.dedup();
    Ok(CertificateBody {
        surface: f.clone(),
        surface_text: f.to_string(),
        config: cfg.clone(),
        rank_bound,
        rank_one,
        generated_by_h,
        infinitely_many_points: points.member,
        points,
        lattice,
        primes,
        axioms,
    })
}

pub fn certify(f: &QuarticForm, cfg: &Config) -> Result<RankCertificate, StageError> {
    cfg.validate().map_err(|e| fail(Stage::Reduce, None, e))?;
    let mut wall = BTreeMap::new();
    let mut records = vec![];
    for pc in &cfg.primes {
        let t0 = Instant::now();
        let prep = prepare(f, pc, cfg)?;
        let t1 = Instant::now();
        let counts = count(&prep, pc, cfg)?;
        let t2 = Instant::now();
        records.push(finish(prep, pc, &counts)?);
        wall.insert(format!("prepare_p{}", pc.p), (t1 - t0).as_secs_f64());
        wall.insert(format!("count_p{}", pc.p), (t2 - t1).as_secs_f64());
        wall.insert(format!("zeta_p{}", pc.p), t2.elapsed().as_secs_f64());
    }
    let t = Instant::now();
    let body = assemble(f, cfg, records)?;
    wall.insert("lattice_and_points".into(), t.elapsed().as_secs_f64());
    Ok(RankCertificate {
        body,
        meta: Meta {
            version: env!("CARGO_PKG_VERSION").into(),
            wall_seconds: wall,
        },
    })
}

/// Re-derives the certificate body from its surface, configuration and
/// stored counts, recounting `n <= spot_check_n`; any difference rejects.
pub fn verify(cert: &RankCertificate) -> Result<(), StageError> {
    let body = &cert.body;
    let cfg = &body.config;
    cfg.validate().map_err(|e| fail(Stage::Verify, None, e))?;
    if body.primes.len() != cfg.primes.len() {
        return Err(fail(
            Stage::Verify,
            None,
            "prime records do not match the configuration",
        ));
    }
    let opts = CountOptions {
        threads: cfg.threads,
        budget: cfg.count_budget as u128,
    };
    let mut records = vec![];
    for (pc, rec) in cfg.primes.iter().zip(&body.primes) {
        let prep = prepare(&body.surface, pc, cfg)?;
        for n in 1..=cfg.spot_check_n.min(pc.max_n) {
            let c =
                crate::counter::count_points(&prep.surface, n, &opts).map_err(|e| fail(Stage::Count, Some(pc.p), e))?;
            if rec.counts.get(n as usize - 1) != Some(&c) {
                return Err(fail(Stage::Verify, Some(pc.p), format!("count at n = {n} is wrong")));
            }
        }
        let counts = CountSeries {
            p: pc.p,
            counts: rec.counts.clone(),
            fingerprint: crate::counter::fingerprint(&prep.surface),
        };
        records.push(finish(prep, pc, &counts)?);
    }
    let again = assemble(&body.surface, cfg, records)?;
    if again != *body {
        let a = serde_json::to_value(&again).expect("serializable");
        let b = serde_json::to_value(body).expect("serializable");
        let field = a
            .as_object()
            .and_then(|a| {
                a.iter()
                    .find(|(k, v)| b.get(k.as_str()) != Some(v))
                    .map(|(k, _)| k.clone())
            })
            .unwrap_or_default();
        return Err(fail(Stage::Verify, None, format!("derivation mismatch in `{field}`")));
    }
    Ok(())
}
