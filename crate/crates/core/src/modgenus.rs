//! Genera of `X0(N)`, of `X0(N)/w_d` and of `X0(N)/<w_d, w_d'>`.
//!
//! The genus of `X0(N)` comes from the usual elliptic point and cusp counts.
//! Quotient genera come from Riemann-Hurwitz, which needs the number of fixed
//! points of each involution `w_Q`.
//!
//! A non-cuspidal fixed point of `w_Q` is a pair `(E, C)` where `E` admits an
//! endomorphism `phi` with cyclic kernel `C_Q`, `phi^2 = -Q` (up to a unit when
//! `Q <= 3`) and `phi(C_M) = C_M` for the `M = N/Q` part of the level
//! structure. Since `phi` is primitive in `End(E)`, the endomorphism ring is
//! one of `Z[sqrt(-Q)]` or, for `Q = 3 mod 4`, `Z[(1 + sqrt(-Q))/2]`; for
//! `Q = 2` the ring `Z[i]` also occurs (with `phi = 1 + i`). The count is then
//! `sum h(O) * prod_{p | M} c_p(O)` where `c_p` counts `phi`-stable cyclic
//! subgroups of order `p^r` in `O / p^r O`. Orders with extra units (`Z[i]`,
//! `Z[zeta_3]`) are handled by counting unit orbits on `P^1(Z/M)` directly.
//! Cusps can only be fixed when `w_Q` has a parabolic representative, which
//! happens for `Q = 4`; they are counted by acting on cusp representatives.

use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

use serde::Serialize;

use crate::arith::{euler_phi, ext_gcd, gcd, gcd_i, kronecker_symbol, Level};
use crate::classnum::class_number_of;
use crate::error::{Error, Result};
use crate::p1::ProjectiveLine;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CurveKind {
    Full,
    Single(u64),
    /// Two smallest nontrivial indices of the Klein four-group.
    Pair(u64, u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CurveRef {
    level: Level,
    kind: CurveKind,
}

impl CurveRef {
    pub fn full(level: Level) -> Self {
        CurveRef {
            level,
            kind: CurveKind::Full,
        }
    }

    pub fn single(level: Level, d: u64) -> Result<Self> {
        if d == 1 {
            return Err(Error::TrivialInvolution(d));
        }
        level.hall_divisor(d)?;
        Ok(CurveRef {
            level,
            kind: CurveKind::Single(d),
        })
    }

    /// The quotient by `{1, w_d, w_d2, w_{d d2 / gcd^2}}`, stored canonically.
    pub fn pair(level: Level, d: u64, d2: u64) -> Result<Self> {
        if d == 1 || d2 == 1 || d == d2 {
            return Err(Error::DegeneratePair(d, d2));
        }
        level.hall_divisor(d)?;
        level.hall_divisor(d2)?;
        let mut idx = [d, d2, third_index(d, d2)];
        idx.sort_unstable();
        Ok(CurveRef {
            level,
            kind: CurveKind::Pair(idx[0], idx[1]),
        })
    }

    pub fn level(&self) -> &Level {
        &self.level
    }

    pub fn n(&self) -> u64 {
        self.level.n()
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    /// Nontrivial involutions in the quotienting group.
    pub fn involutions(&self) -> Vec<u64> {
        match self.kind {
            CurveKind::Full => vec![],
            CurveKind::Single(d) => vec![d],
            CurveKind::Pair(a, b) => {
                let mut v = vec![a, b, third_index(a, b)];
                v.sort_unstable();
                v
            }
        }
    }

    /// Label used by the fact file: `X0(N)`, `X0(N)/<d>`, `X0(N)/<d,d'>`.
    pub fn label(&self) -> String {
        self.to_string()
    }

    /// Parse a curve label. The brackets around a single index are optional.
    pub fn parse(s: &str) -> Result<Self> {
        let (n, ds) = parse_label_numbers(s)?;
        let level = Level::new(n)?;
        match ds.as_slice() {
            [] => Ok(CurveRef::full(level)),
            [d] => CurveRef::single(level, *d),
            [d, d2] => CurveRef::pair(level, *d, *d2),
            _ => Err(Error::Parse(format!("malformed curve label '{s}'"))),
        }
    }
}

/// Level and indices of a curve label, without checking that the indices are
/// Hall divisors.
pub fn parse_label_numbers(s: &str) -> Result<(u64, Vec<u64>)> {
    let bad = || Error::Parse(format!("malformed curve label '{s}'"));
    let num = |t: &str| -> Result<u64> {
        if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        t.parse().map_err(|_| bad())
    };
    let rest = s.strip_prefix("X0(").ok_or_else(bad)?;
    let (n, rest) = rest.split_once(')').ok_or_else(bad)?;
    let n = num(n)?;
    if rest.is_empty() {
        return Ok((n, vec![]));
    }
    let rest = rest.strip_prefix('/').ok_or_else(bad)?;
    let inner = match rest.strip_prefix('<') {
        Some(r) => r.strip_suffix('>').ok_or_else(bad)?,
        None => rest,
    };
    let ds = inner.split(',').map(num).collect::<Result<Vec<_>>>()?;
    if ds.len() > 2 || (ds.len() == 2 && !rest.starts_with('<')) {
        return Err(bad());
    }
    Ok((n, ds))
}

impl fmt::Display for CurveRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            CurveKind::Full => write!(f, "X0({})", self.n()),
            CurveKind::Single(d) => write!(f, "X0({})/<{}>", self.n(), d),
            CurveKind::Pair(a, b) => write!(f, "X0({})/<{},{}>", self.n(), a, b),
        }
    }
}

/// `w_d w_d' = w_{d d' / gcd(d, d')^2}`.
pub fn third_index(d: u64, d2: u64) -> u64 {
    let g = gcd(d, d2);
    (d / g) * (d2 / g)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenusData {
    pub curve: CurveRef,
    pub genus: u64,
    /// Elliptic point and cusp counts, present only for `X0(N)` itself.
    pub nu2: Option<u64>,
    pub nu3: Option<u64>,
    pub cusp_count: Option<u64>,
}

pub fn nu2(level: &Level) -> u64 {
    if level.n().is_multiple_of(4) {
        return 0;
    }
    level.primes().map(|p| (1 + kronecker_symbol(-4, p)) as u64).product()
}

pub fn nu3(level: &Level) -> u64 {
    if level.n().is_multiple_of(9) {
        return 0;
    }
    level.primes().map(|p| (1 + kronecker_symbol(-3, p)) as u64).product()
}

pub fn cusp_count(level: &Level) -> u64 {
    let n = level.n();
    level.divisors().into_iter().map(|d| euler_phi(gcd(d, n / d))).sum()
}

pub fn genus_x0(level: &Level) -> GenusData {
    let (e2, e3, c) = (nu2(level), nu3(level), cusp_count(level));
    // 12 (g - 1) = psi - 3 nu2 - 4 nu3 - 6 c
    let twelve_g = 12 + level.psi() as i64 - 3 * e2 as i64 - 4 * e3 as i64 - 6 * c as i64;
    debug_assert!(twelve_g >= 0 && twelve_g % 12 == 0);
    GenusData {
        curve: CurveRef::full(level.clone()),
        genus: (twelve_g / 12) as u64,
        nu2: Some(e2),
        nu3: Some(e3),
        cusp_count: Some(c),
    }
}

fn fixed_cache() -> &'static RwLock<HashMap<(u64, u64), u64>> {
    static CACHE: OnceLock<RwLock<HashMap<(u64, u64), u64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Number of fixed points of `w_q` on `X0(N)`.
pub fn al_fixed_points(level: &Level, q: u64) -> Result<u64> {
    if q == 1 {
        return Err(Error::TrivialInvolution(q));
    }
    level.hall_divisor(q)?;
    let key = (level.n(), q);
    if let Some(&v) = fixed_cache().read().unwrap().get(&key) {
        return Ok(v);
    }
    let v = elliptic_fixed_points(level, q)? + fixed_cusps(level, q);
    fixed_cache().write().unwrap().insert(key, v);
    Ok(v)
}

/// A quadratic order containing a primitive `phi` with `phi^2 = -q`,
/// described by the matrix of `phi` on a Z-basis of the order.
struct CmOrder {
    disc: i64,
    phi: [[i64; 2]; 2],
    /// Automorphisms beyond +-1, as matrices on the same basis.
    units: Vec<[[i64; 2]; 2]>,
}

fn cm_orders(q: u64) -> Vec<CmOrder> {
    let qi = q as i64;
    let mut out = Vec::new();
    match q {
        2 => {
            out.push(CmOrder {
                disc: -8,
                phi: [[0, -2], [1, 0]],
                units: vec![],
            });
            // Z[i] with phi = 1 + i
            out.push(CmOrder {
                disc: -4,
                phi: [[1, -1], [1, 1]],
                units: vec![[[0, -1], [1, 0]]],
            });
        }
        _ => {
            out.push(CmOrder {
                disc: -4 * qi,
                phi: [[0, -qi], [1, 0]],
                units: vec![],
            });
            if q % 4 == 3 {
                // basis {1, w} with w = (1 + sqrt(-q))/2, phi = 2w - 1
                let k = (1 + qi) / 2;
                let units = if q == 3 { vec![[[0, -1], [1, 1]]] } else { vec![] };
                out.push(CmOrder {
                    disc: -qi,
                    phi: [[-1, -k], [2, 1]],
                    units,
                });
            }
        }
    }
    out
}

fn elliptic_fixed_points(level: &Level, q: u64) -> Result<u64> {
    let m = level.n() / q;
    let mut total = 0u64;
    for order in cm_orders(q) {
        let h = class_number_of(order.disc)?;
        let local = if order.units.is_empty() {
            stable_subgroups(q, order.disc, m)
        } else {
            unit_orbits_of_stable_subgroups(&order, m)
        };
        total += h * local;
    }
    Ok(total)
}

/// `prod_{p^r || m} c_p`: cyclic subgroups of order `m` stable under `phi`,
/// for orders whose unit group is `{+-1}`.
fn stable_subgroups(q: u64, disc: i64, m: u64) -> u64 {
    crate::arith::factorize(m)
        .into_iter()
        .map(|(p, r)| local_stable_count(q, disc, p, r))
        .product()
}

/// Number of `phi`-stable cyclic subgroups of order `p^r`, `p` not dividing `q`.
pub(crate) fn local_stable_count(q: u64, disc: i64, p: u64, r: u32) -> u64 {
    if p != 2 {
        return (1 + kronecker_symbol(-(q as i64), p)) as u64;
    }
    // q is odd here
    let seven_mod_8 = q % 8 == 7;
    if disc == -4 * q as i64 {
        match r {
            1 => 1,
            2 if q % 4 == 3 => 2,
            2 => 0,
            _ if seven_mod_8 => 4,
            _ => 0,
        }
    } else {
        // maximal at 2: phi = 2w - 1 is the identity mod 2
        match r {
            1 => 3,
            _ if seven_mod_8 => 4,
            _ => 0,
        }
    }
}

/// For `Z[i]` and `Z[zeta_3]`: subgroups stable under some unit multiple of
/// `phi`, counted up to the action of the units.
fn unit_orbits_of_stable_subgroups(order: &CmOrder, m: u64) -> u64 {
    if m == 1 {
        return 1;
    }
    let line = ProjectiveLine::new(m);
    let mut group = vec![[[1, 0], [0, 1]]];
    for u in &order.units {
        let mut g = *u;
        while g != [[1, 0], [0, 1]] && g != [[-1, 0], [0, -1]] {
            group.push(g);
            g = mat_mul(g, *u);
        }
    }
    let perms: Vec<Vec<usize>> = group.iter().map(|&g| line.permutation(g)).collect();
    let phi_perms: Vec<Vec<usize>> = group.iter().map(|&g| line.permutation(mat_mul(g, order.phi))).collect();
    let stable: Vec<bool> = (0..line.len())
        .map(|i| phi_perms.iter().any(|perm| perm[i] == i))
        .collect();
    let mut seen = vec![false; line.len()];
    let mut orbits = 0;
    for i in 0..line.len() {
        if !stable[i] || seen[i] {
            continue;
        }
        orbits += 1;
        for perm in &perms {
            seen[perm[i]] = true;
        }
    }
    orbits
}

fn mat_mul(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// Cusp representatives `a/c` of `Gamma_0(N)`, with `c | N`.
pub fn cusp_representatives(n: u64) -> Vec<(i64, i64)> {
    let ni = n as i64;
    let mut reps: Vec<(i64, i64)> = Vec::new();
    for c in crate::arith::divisors(n) {
        let c = c as i64;
        for a in 1..=ni {
            if gcd_i(a, c) != 1 {
                continue;
            }
            if !reps.iter().any(|&(a2, c2)| cusps_equivalent(a, c, a2, c2, ni)) {
                reps.push((a, c));
            }
        }
    }
    reps
}

/// Cusps `a1/c1 ~ a2/c2` (coprime numerators and denominators) under
/// `Gamma_0(N)` iff `s1 c2 = s2 c1 mod gcd(c1 c2, N)` where `a_i s_i = 1 mod c_i`.
pub fn cusps_equivalent(a1: i64, c1: i64, a2: i64, c2: i64, n: i64) -> bool {
    let s = |a: i64, c: i64| -> i64 {
        if c == 0 {
            a
        } else {
            let (_, x, _) = ext_gcd(a, c);
            x
        }
    };
    let modulus = gcd_i(c1 * c2, n);
    let (s1, s2) = (s(a1, c1), s(a2, c2));
    (s1 * c2 - s2 * c1).rem_euclid(modulus.max(1)) == 0
}

fn fixed_cusps(level: &Level, q: u64) -> u64 {
    let n = level.n() as i64;
    let qi = q as i64;
    let m = n / qi;
    // W = [[q, y], [N, q w]] with q w - m y = 1
    let (_, w, y_neg) = ext_gcd(qi, m);
    let y = -y_neg;
    debug_assert_eq!(qi * qi * w - n * y, qi);
    let reps = cusp_representatives(level.n());
    reps.iter()
        .filter(|&&(a, c)| {
            let (mut a2, mut c2) = (qi * a + y * c, n * a + qi * w * c);
            let g = gcd_i(a2, c2);
            a2 /= g;
            c2 /= g;
            if c2 < 0 || (c2 == 0 && a2 < 0) {
                a2 = -a2;
                c2 = -c2;
            }
            cusps_equivalent(a, c, a2, c2, n)
        })
        .count() as u64
}

pub fn genus_single_quotient(level: &Level, d: u64) -> Result<GenusData> {
    let curve = CurveRef::single(level.clone(), d)?;
    let g = genus_x0(level).genus;
    let nu = al_fixed_points(level, d)?;
    let num = 2 * g as i64 + 2 - nu as i64;
    if num < 0 || num % 4 != 0 {
        return Err(Error::Inconsistent(format!(
            "Riemann-Hurwitz fails for {curve}: 2g + 2 - nu = {num}"
        )));
    }
    Ok(GenusData {
        curve,
        genus: (num / 4) as u64,
        nu2: None,
        nu3: None,
        cusp_count: None,
    })
}

pub fn genus_pair_quotient(level: &Level, d: u64, d2: u64) -> Result<GenusData> {
    let curve = CurveRef::pair(level.clone(), d, d2)?;
    let g = genus_x0(level).genus as i64;
    let mut num = 2 * g + 6;
    for q in curve.involutions() {
        num -= al_fixed_points(level, q)? as i64;
    }
    if num < 0 || num % 8 != 0 {
        return Err(Error::Inconsistent(format!(
            "Riemann-Hurwitz fails for {curve}: 2g + 6 - sum nu = {num}"
        )));
    }
    Ok(GenusData {
        curve,
        genus: (num / 8) as u64,
        nu2: None,
        nu3: None,
        cusp_count: None,
    })
}

/// Genus of any curve reference.
pub fn genus(curve: &CurveRef) -> Result<u64> {
    let level = curve.level();
    Ok(match curve.kind() {
        CurveKind::Full => genus_x0(level).genus,
        CurveKind::Single(d) => genus_single_quotient(level, d)?.genus,
        CurveKind::Pair(a, b) => genus_pair_quotient(level, a, b)?.genus,
    })
}
