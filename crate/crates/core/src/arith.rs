//! Integer arithmetic shared by every other module: factorization by trial
//! division, the index function psi, Hall divisors and the Kronecker symbol.

use std::fmt;

use crate::error::{Error, Result};

/// A level `N` together with its factorization and the multiplicative data
/// the rest of the crate keeps asking for.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Level {
    n: u64,
    factors: Vec<(u64, u32)>,
    psi: u64,
    omega: u32,
}

impl Level {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidLevel(n));
        }
        let factors = factorize(n);
        let psi = factors.iter().fold(n, |acc, &(p, _)| acc / p * (p + 1));
        let omega = factors.len() as u32;
        Ok(Level { n, factors, psi, omega })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Prime factorization as `(prime, exponent)` pairs, primes ascending.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Index of Gamma_0(N) in SL_2(Z), i.e. `N * prod_{p | N} (1 + 1/p)`.
    pub fn psi(&self) -> u64 {
        self.psi
    }

    /// Number of distinct prime divisors.
    pub fn omega(&self) -> u32 {
        self.omega
    }

    pub fn divides(&self, m: u64) -> bool {
        m != 0 && self.n.is_multiple_of(m)
    }

    pub fn is_prime_power(&self) -> bool {
        self.factors.len() == 1
    }

    pub fn is_hall_divisor(&self, d: u64) -> bool {
        self.divides(d) && gcd(d, self.n / d) == 1
    }

    /// All `d | N` with `gcd(d, N/d) = 1`, ascending.
    pub fn hall_divisors(&self) -> Vec<u64> {
        let mut out = vec![1u64];
        for &(p, e) in &self.factors {
            let pe = p.pow(e);
            let more: Vec<u64> = out.iter().map(|d| d * pe).collect();
            out.extend(more);
        }
        out.sort_unstable();
        out
    }

    pub fn hall_divisor(&self, d: u64) -> Result<HallDivisor> {
        if self.is_hall_divisor(d) {
            Ok(HallDivisor { d })
        } else {
            Err(Error::NotHallDivisor { n: self.n, d })
        }
    }

    pub fn divisors(&self) -> Vec<u64> {
        divisors_from(&self.factors)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.n)
    }
}

/// A Hall divisor `d || N`; only constructible through [`Level::hall_divisor`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HallDivisor {
    d: u64,
}

impl HallDivisor {
    pub fn get(self) -> u64 {
        self.d
    }
}

pub fn make_level(n: u64) -> Result<Level> {
    Level::new(n)
}

pub fn hall_divisors(level: &Level) -> Vec<HallDivisor> {
    level.hall_divisors().into_iter().map(|d| HallDivisor { d }).collect()
}

/// `true` iff `n = p^k` with `k >= 1`. One is not a prime power.
pub fn is_prime_power(n: u64) -> bool {
    n > 1 && factorize(n).len() == 1
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return false;
        }
        p += 1;
    }
    true
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn divisors(n: u64) -> Vec<u64> {
    divisors_from(&factorize(n))
}

fn divisors_from(factors: &[(u64, u32)]) -> Vec<u64> {
    let mut out = vec![1u64];
    for &(p, e) in factors {
        let base = out.clone();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            out.extend(base.iter().map(|d| d * pk));
        }
    }
    out.sort_unstable();
    out
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_i(a: i64, b: i64) -> i64 {
    gcd(a.unsigned_abs(), b.unsigned_abs()) as i64
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn sigma1(n: u64) -> u64 {
    divisors(n).iter().sum()
}

/// Extended Euclid: returns `(g, x, y)` with `a*x + b*y = g`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

pub fn is_square(n: u64) -> bool {
    let r = isqrt(n);
    r * r == n
}

/// Kronecker symbol `(d | n)` for `n >= 1`.
pub fn kronecker_symbol(d: i64, n: u64) -> i32 {
    assert!(n >= 1, "kronecker_symbol: n must be positive");
    let mut result = 1i32;
    let mut n = n;
    // factor out 2s: (d|2) = 0 if d even, +1 if d = +-1 mod 8, -1 if d = +-3 mod 8
    while n.is_multiple_of(2) {
        n /= 2;
        match d.rem_euclid(8) {
            0 | 2 | 4 | 6 => return 0,
            1 | 7 => {}
            _ => result = -result,
        }
    }
    result * jacobi(d, n)
}

/// Jacobi symbol `(a | n)` for odd positive `n`.
fn jacobi(a: i64, n: u64) -> i32 {
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut result = 1;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Primes up to and including `limit`.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    (2..=limit).filter(|&p| is_prime(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Points of P^1(Z/N) counted by brute force: pairs (a, b) with
    /// gcd(a, b, N) = 1, divided by the number of units.
    fn p1_count(n: u64) -> u64 {
        if n == 1 {
            return 1;
        }
        let mut pairs = 0u64;
        for a in 0..n {
            for b in 0..n {
                if gcd(gcd(a, b), n) == 1 {
                    pairs += 1;
                }
            }
        }
        let units = (1..n).filter(|&u| gcd(u, n) == 1).count() as u64;
        pairs / units
    }

    #[test]
    fn level_examples() {
        let one = make_level(1).unwrap();
        assert_eq!((one.psi(), one.omega()), (1, 0));
        let l70 = make_level(70).unwrap();
        assert_eq!((l70.psi(), l70.omega()), (144, 3));
        assert_eq!(p1_count(70), 144);
        let l420 = make_level(420).unwrap();
        assert_eq!((l420.psi(), l420.omega()), (1152, 4));
        assert_eq!(p1_count(420), 1152);
        assert!(matches!(make_level(0), Err(Error::InvalidLevel(0))));
    }

    #[test]
    fn hall_divisor_examples() {
        let hd = |n| make_level(n).unwrap().hall_divisors();
        assert_eq!(hd(70), vec![1, 2, 5, 7, 10, 14, 35, 70]);
        assert_eq!(hd(108), vec![1, 4, 27, 108]);
        assert_eq!(hd(121), vec![1, 121]);
        let l = make_level(108).unwrap();
        assert!(l.hall_divisor(2).is_err());
        assert_eq!(l.hall_divisor(27).unwrap().get(), 27);
    }

    #[test]
    fn prime_power_examples() {
        assert!(is_prime_power(128));
        assert!(!is_prime_power(420));
        assert!(!is_prime_power(1));
        assert!(is_prime_power(7));
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker_symbol(-4, 5), 1);
        assert_eq!(kronecker_symbol(-4, 7), -1);
        assert_eq!(kronecker_symbol(-140, 2), 0);
        assert_eq!(kronecker_symbol(-7, 2), 1);
        assert_eq!(kronecker_symbol(-3, 2), -1);
        assert_eq!(kronecker_symbol(5, 1), 1);
    }

    #[test]
    fn kronecker_matches_euler_criterion_for_odd_primes() {
        for p in primes_up_to(60).into_iter().filter(|&p| p > 2) {
            for d in -50i64..=50 {
                let a = d.rem_euclid(p as i64) as u64;
                let expected = if a == 0 {
                    0
                } else if (1..p).any(|x| x * x % p == a) {
                    1
                } else {
                    -1
                };
                assert_eq!(kronecker_symbol(d, p), expected, "({d}|{p})");
            }
        }
    }

    #[test]
    fn psi_equals_projective_line_size() {
        for n in 1..=1000u64 {
            if n > 200 && n % 7 != 0 {
                // the quadratic enumeration is slow; sample the upper range
                continue;
            }
            assert_eq!(make_level(n).unwrap().psi(), p1_count(n), "N = {n}");
        }
    }

    #[test]
    fn hall_divisor_count_is_two_to_omega() {
        for n in 1..=1000 {
            let l = make_level(n).unwrap();
            let hd = l.hall_divisors();
            assert_eq!(hd.len(), 1 << l.omega());
            assert_eq!(hd.first(), Some(&1));
            assert_eq!(hd.last(), Some(&n));
            for &d in &hd {
                assert!(hd.contains(&(n / d)));
            }
        }
    }

    proptest! {
        #[test]
        fn psi_is_multiplicative(m in 1u64..=1000, n in 1u64..=1000) {
            prop_assume!(gcd(m, n) == 1);
            let psi = |k| make_level(k).unwrap().psi();
            prop_assert_eq!(psi(m * n), psi(m) * psi(n));
        }

        #[test]
        fn kronecker_is_multiplicative(d in -50i64..=50, m in 1u64..=50, n in 1u64..=50) {
            prop_assert_eq!(
                kronecker_symbol(d, m * n),
                kronecker_symbol(d, m) * kronecker_symbol(d, n)
            );
        }
    }
}
