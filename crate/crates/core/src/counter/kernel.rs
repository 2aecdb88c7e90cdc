//! Fiber-by-fiber count of `|X(GF(q))|`.
//!
//! Every point of the surface other than `[0:0:0:1]` lies over a unique
//! point `[x:y:z]` of P^2, and the fiber over it is the set of roots of the
//! quartic in `w` obtained by specializing `x, y, z`. Points `[1:y:z]` are
//! visited once per Frobenius orbit: conjugate points have conjugate
//! fibers, hence equal root counts, so the orbit representative (the
//! smallest conjugate under a fixed order) is weighted by the orbit size.

use crate::gf::{RootCount, ZechField, ZERO_LOG};

/// Coefficients of the surface, as logs, indexed `[w-degree][z-degree][y-degree]`
/// (the x-degree is whatever remains to make 4).
pub(crate) struct CoeffTable {
    c: [[[u32; 5]; 5]; 5],
}

impl CoeffTable {
    pub(crate) fn new(coeffs_mod_p: &[u64], field: &ZechField) -> CoeffTable {
        let mut c = [[[ZERO_LOG; 5]; 5]; 5];
        for (e, &v) in crate::quartic::quartic_monomials().iter().zip(coeffs_mod_p) {
            let [_, ey, ez, ew] = *e;
            c[ew as usize][ez as usize][ey as usize] = field.from_int(v as i64);
        }
        CoeffTable { c }
    }
}

/// Sort key: zero first, then logs ascending.
#[inline(always)]
fn key(l: u32) -> u32 {
    l.wrapping_add(1)
}

/// `B[k][j] = sum_b c[k][j][b] y^b` for the chart `x = 1`.
#[inline]
fn fold_y(table: &CoeffTable, field: &ZechField, y: u32) -> [[u32; 5]; 5] {
    let ypow: [u32; 5] = std::array::from_fn(|b| field.pow(y, b as u32));
    let mut out = [[ZERO_LOG; 5]; 5];
    for k in 0..5 {
        for j in 0..(5 - k) {
            let mut acc = ZERO_LOG;
            for b in 0..(5 - k - j) {
                acc = field.add(acc, field.mul(table.c[k][j][b], ypow[b]));
            }
            out[k][j] = acc;
        }
    }
    out
}

#[inline(always)]
fn fiber(field: &ZechField, b: &[[u32; 5]; 5], z: u32) -> RootCount {
    let zpow: [u32; 5] = std::array::from_fn(|j| field.pow(z, j as u32));
    let mut a = [ZERO_LOG; 5];
    for k in 0..5 {
        let mut acc = ZERO_LOG;
        for j in 0..(5 - k) {
            acc = field.add(acc, field.mul(b[k][j], zpow[j]));
        }
        a[k] = acc;
    }
    field.count_roots(&a)
}

/// Frobenius orbit of `y`: returns `None` when some conjugate sorts below
/// `y`, else the orbit length.
fn canonical_orbit(field: &ZechField, y: u32) -> Option<u32> {
    let mut cur = y;
    for k in 1..=field.degree() {
        cur = field.frobenius(cur);
        if cur == y {
            return Some(k);
        }
        if key(cur) < key(y) {
            return None;
        }
    }
    unreachable!("Frobenius has order dividing the degree")
}

/// Contribution of the chart `x = 1` for a fixed canonical `y` with
/// Frobenius orbit length `dy`.
pub(crate) fn count_line(table: &CoeffTable, field: &ZechField, y: u32, dy: u32) -> u64 {
    let q = field.q() as u64;
    let n = field.degree();
    let b = fold_y(table, field, y);
    let steps = n / dy;
    // Frobenius^dy on logs: multiplication by p^dy modulo q - 1
    let qm1 = field.group_order() as u64;
    let mut mult = 1u64;
    for _ in 0..dy {
        mult = mult * field.p() as u64 % qm1;
    }
    let mut total = 0u64;
    let zs = std::iter::once(ZERO_LOG).chain(0..field.group_order());
    for z in zs {
        let weight = if steps == 1 {
            dy
        } else {
            // z must be minimal among its Frobenius^dy conjugates
            let mut cur = z;
            let mut m = 0;
            let mut ok = true;
            for s in 1..=steps {
                cur = if cur == ZERO_LOG {
                    ZERO_LOG
                } else {
                    (cur as u64 * mult % qm1) as u32
                };
                if cur == z {
                    m = s;
                    break;
                }
                if key(cur) < key(z) {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            dy * m
        };
        total += weight as u64 * fiber(field, &b, z).value(q);
    }
    total
}

/// Canonical `y` values of the chart `x = 1` with their orbit lengths.
pub(crate) fn canonical_ys(field: &ZechField) -> Vec<(u32, u32)> {
    std::iter::once(ZERO_LOG)
        .chain(0..field.group_order())
        .filter_map(|y| canonical_orbit(field, y).map(|d| (y, d)))
        .collect()
}

/// Everything outside the chart `x = 1`: the line `x = 0` and `[0:0:0:1]`.
pub(crate) fn count_at_infinity(table: &CoeffTable, field: &ZechField) -> u64 {
    let q = field.q() as u64;
    let mut total = 0u64;
    // [0:1:z]: only monomials with x-degree 0, i.e. y-degree 4 - k - j
    let mut b = [[ZERO_LOG; 5]; 5];
    for k in 0..5 {
        for j in 0..(5 - k) {
            b[k][j] = table.c[k][j][4 - k - j];
        }
    }
    for z in std::iter::once(ZERO_LOG).chain(0..field.group_order()) {
        total += fiber(field, &b, z).value(q);
    }
    // [0:0:1]: x = y = 0, z = 1
    let a: [u32; 5] = std::array::from_fn(|k| table.c[k][4 - k][0]);
    total += field.count_roots(&a).value(q);
    // [0:0:0:1]
    if table.c[4][0][0] == ZERO_LOG {
        total += 1;
    }
    total
}
