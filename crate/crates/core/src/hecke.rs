//! Traces of Hecke operators on weight-2 cusp forms for `Gamma_0(N)` and the
//! point counts of `X0(N)` over `F_p` and `F_{p^2}` that follow from them.
//!
//! The trace is the Eichler-Selberg formula for trivial character and
//! `gcd(m, N) = 1`, written as `A1 + A2 + A3 + A4`:
//!
//! * `A1 = psi(N) / 12` when `m` is a square,
//! * `A2 = -1/2 * sum_{t^2 < 4m} sum_f h_w((t^2 - 4m) / f^2) * mu(t, f)`,
//! * `A3 = -1/2 * sum_{d | m} min(d, m/d) * #{cusp classes compatible with m/d - d}`,
//! * `A4 = sigma_1(m)`.
//!
//! Here `h_w` is the class number weighted by `2 / #units` and
//! `mu(t, f) = psi(N) / psi(N / N_f) * #{x mod N N_f : x^2 - t x + m = 0} / N_f`
//! with `N_f = gcd(N, f)`. The normalisation is pinned by `Tr T_1 = g`.

use num_rational::Ratio;

use crate::arith::{divisors, euler_phi, gcd, is_prime, is_square, isqrt, sigma1, Level};
use crate::classnum::weighted_class_number;
use crate::error::{Error, Result};
use crate::modgenus::genus_x0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceValue {
    pub n: u64,
    pub m: u64,
    pub value: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointCount {
    pub n: u64,
    /// size of the finite field
    pub q: u64,
    pub count: u64,
}

impl PointCount {
    /// `|count - (q + 1)| <= 2 g sqrt(q)`, compared after squaring.
    pub fn satisfies_weil(&self, genus: u64) -> bool {
        let dev = (self.count as i128 - (self.q as i128 + 1)).abs();
        let bound = 2 * genus as i128;
        dev * dev <= bound * bound * self.q as i128
    }
}

/// `psi` of an arbitrary positive integer.
fn psi_of(n: u64) -> u64 {
    crate::arith::factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p + 1))
}

/// Solutions of `x^2 - t x + m = 0` modulo `modulus`.
fn quadratic_roots_mod(t: i64, m: u64, modulus: u64) -> u64 {
    crate::arith::factorize(modulus)
        .into_iter()
        .map(|(p, e)| {
            let pe = p.pow(e) as i128;
            let (t, m) = (t as i128, m as i128);
            (0..pe).filter(|&x| (x * x - t * x + m).rem_euclid(pe) == 0).count() as u64
        })
        .product()
}

pub fn trace_tm(level: &Level, m: u64) -> Result<TraceValue> {
    let n = level.n();
    if m == 0 {
        return Err(Error::Parse("Hecke index must be positive".into()));
    }
    if gcd(m, n) != 1 {
        return Err(Error::NotCoprime { m, n });
    }
    let psi = level.psi() as i64;
    let mut total = Ratio::from_integer(0i64);

    if is_square(m) {
        total += Ratio::new(psi, 12);
    }

    let mi = m as i64;
    let mut a2 = Ratio::from_integer(0i64);
    let tmax = isqrt(4 * m) as i64;
    for t in -tmax..=tmax {
        let delta = t * t - 4 * mi;
        if delta >= 0 {
            continue;
        }
        let mut f = 1i64;
        while f * f <= -delta {
            if delta % (f * f) == 0 && matches!((delta / (f * f)).rem_euclid(4), 0 | 1) {
                let nf = gcd(n, f as u64);
                let roots = quadratic_roots_mod(t, m, n * nf);
                debug_assert_eq!(roots % nf, 0);
                let mu = (psi_of(n) / psi_of(n / nf) * roots / nf) as i64;
                if mu != 0 {
                    a2 += weighted_class_number(delta / (f * f)) * mu;
                }
            }
            f += 1;
        }
    }
    total -= a2 / 2;

    let mut a3 = 0i64;
    for d in divisors(m) {
        let e = m / d;
        let diff = e.abs_diff(d);
        let cusps: u64 = level
            .divisors()
            .into_iter()
            .map(|tau| gcd(tau, n / tau))
            .filter(|&g| diff % g == 0)
            .map(euler_phi)
            .sum();
        a3 += (d.min(e) * cusps) as i64;
    }
    total -= Ratio::new(a3, 2);

    total += sigma1(m) as i64;

    if !total.is_integer() {
        return Err(Error::Inconsistent(format!(
            "non-integral trace of T_{m} at level {n}: {total}"
        )));
    }
    Ok(TraceValue {
        n,
        m,
        value: total.to_integer(),
    })
}

/// `#X0(N)(F_{p^e})` for `e` in {1, 2} and `p` not dividing `N`.
pub fn count_points(level: &Level, p: u64, e: u32) -> Result<PointCount> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if level.divides(p) {
        return Err(Error::PrimeDividesLevel { p, n: level.n() });
    }
    let (q, count) = match e {
        1 => (p, p as i64 + 1 - trace_tm(level, p)?.value),
        2 => {
            let g = genus_x0(level).genus as i64;
            let p = p as i64;
            (
                p as u64 * p as u64,
                p * p + 1 + p * g - trace_tm(level, (p * p) as u64)?.value,
            )
        }
        _ => return Err(Error::Parse(format!("field degree must be 1 or 2 (got {e})"))),
    };
    if count < 0 {
        return Err(Error::Inconsistent(format!(
            "negative point count at level {}",
            level.n()
        )));
    }
    let pc = PointCount {
        n: level.n(),
        q,
        count: count as u64,
    };
    if !pc.satisfies_weil(genus_x0(level).genus) {
        return Err(Error::Inconsistent(format!(
            "point count {} over F_{q} at level {} violates the Weil bound",
            pc.count,
            level.n()
        )));
    }
    Ok(pc)
}
