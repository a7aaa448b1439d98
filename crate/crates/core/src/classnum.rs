//! Class numbers of imaginary quadratic orders and Hurwitz class numbers.
//!
//! `class_number(D)` counts primitive reduced positive definite forms
//! `ax^2 + bxy + cy^2` of discriminant `D`, so non-fundamental discriminants
//! give the class number of the order of that discriminant.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_rational::Ratio;

use crate::arith::gcd;
use crate::error::{Error, Result};

/// A negative discriminant `D = 0, 1 (mod 4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Discriminant(i64);

impl Discriminant {
    pub fn new(d: i64) -> Result<Self> {
        if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
            return Err(Error::InvalidDiscriminant(d));
        }
        Ok(Discriminant(d))
    }

    pub fn get(self) -> i64 {
        self.0
    }
}

/// `H(n)` as an exact rational; `12 * H(n)` is always integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HurwitzValue {
    pub n: u64,
    pub value: Ratio<i64>,
}

fn cache() -> &'static RwLock<HashMap<i64, u64>> {
    static CACHE: OnceLock<RwLock<HashMap<i64, u64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

pub fn class_number(d: Discriminant) -> u64 {
    let key = d.get();
    if let Some(&h) = cache().read().unwrap().get(&key) {
        return h;
    }
    let h = count_reduced_forms(key);
    cache().write().unwrap().insert(key, h);
    h
}

/// Class number for a raw integer, rejecting non-discriminants.
pub fn class_number_of(d: i64) -> Result<u64> {
    Discriminant::new(d).map(class_number)
}

fn count_reduced_forms(d: i64) -> u64 {
    let abs = d.unsigned_abs();
    let mut count = 0u64;
    // reduced forms satisfy 3a^2 <= |D|
    let mut a = 1u64;
    while 3 * a * a <= abs {
        // b has the parity of D, |b| <= a
        let start = if abs.is_multiple_of(2) { 0 } else { 1 };
        let mut b = start;
        while b <= a {
            let num = b * b + abs;
            if num.is_multiple_of(4 * a) {
                let c = num / (4 * a);
                if c >= a && gcd(gcd(a, b), c) == 1 {
                    count += 1;
                    // (a, -b, c) is a distinct reduced form unless b = 0, b = a or a = c
                    if b != 0 && b != a && a != c {
                        count += 1;
                    }
                }
            }
            b += 2;
        }
        a += 1;
    }
    count
}

/// Class number weighted by `2 / #O^*`: `h/3` at `-3`, `h/2` at `-4`.
pub fn weighted_class_number(d: i64) -> Ratio<i64> {
    let h = class_number(Discriminant(d)) as i64;
    match d {
        -3 => Ratio::new(h, 3),
        -4 => Ratio::new(h, 2),
        _ => Ratio::from_integer(h),
    }
}

pub fn hurwitz_class_number(n: i64) -> Result<HurwitzValue> {
    if n < 0 {
        return Err(Error::NegativeHurwitz(n));
    }
    let value = if n == 0 {
        Ratio::new(-1, 12)
    } else if matches!(n % 4, 1 | 2) {
        Ratio::from_integer(0)
    } else {
        let mut total = Ratio::from_integer(0);
        let mut f = 1i64;
        while f * f <= n {
            if n % (f * f) == 0 {
                let disc = -(n / (f * f));
                if matches!(disc.rem_euclid(4), 0 | 1) {
                    total += weighted_class_number(disc);
                }
            }
            f += 1;
        }
        total
    };
    Ok(HurwitzValue { n: n as u64, value })
}
