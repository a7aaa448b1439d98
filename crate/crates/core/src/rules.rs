//! Individual gonality bounds as pure functions. Each returns enough evidence
//! for the engine to record a replayable certificate step.

use std::fmt;

use num_rational::Ratio;
use serde::Serialize;

use crate::arith::{is_prime, primes_up_to, Level};
use crate::error::{Error, Result};
use crate::modgenus::CurveRef;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Field {
    Q,
    C,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Q => "Q",
            Field::C => "C",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BoundKind {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RuleId {
    OggLp,
    CountLb,
    Eq1,
    #[serde(rename = "POONEN_2G2")]
    Poonen2g2,
    PoonenG,
    PoonenC,
    PoonenQuotUp,
    PoonenQuotDown,
    CsFactor,
    KimSarnak,
    Tower,
    Betti,
    GenusSmall,
    FieldDescent,
    Fact,
}

impl RuleId {
    pub fn name(self) -> &'static str {
        match self {
            RuleId::OggLp => "OGG_LP",
            RuleId::CountLb => "COUNT_LB",
            RuleId::Eq1 => "EQ1",
            RuleId::Poonen2g2 => "POONEN_2G2",
            RuleId::PoonenG => "POONEN_G",
            RuleId::PoonenC => "POONEN_C",
            RuleId::PoonenQuotUp => "POONEN_QUOT_UP",
            RuleId::PoonenQuotDown => "POONEN_QUOT_DOWN",
            RuleId::CsFactor => "CS_FACTOR",
            RuleId::KimSarnak => "KIM_SARNAK",
            RuleId::Tower => "TOWER",
            RuleId::Betti => "BETTI",
            RuleId::GenusSmall => "GENUS_SMALL",
            RuleId::FieldDescent => "FIELD_DESCENT",
            RuleId::Fact => "FACT",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A one-sided bound on `gon_k` of a curve together with the values it was
/// derived from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundAssertion {
    pub curve: CurveRef,
    pub field: Field,
    pub kind: BoundKind,
    pub value: u32,
    pub rule: RuleId,
    pub inputs: Vec<(String, String)>,
}

impl fmt::Display for BoundAssertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.kind {
            BoundKind::Lower => ">=",
            BoundKind::Upper => "<=",
        };
        write!(
            f,
            "gon_{}({}) {} {} by {}",
            self.field, self.curve, op, self.value, self.rule
        )?;
        if !self.inputs.is_empty() {
            let parts: Vec<String> = self.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, " [{}]", parts.join(", "))?;
        }
        Ok(())
    }
}

/// Ogg's lower bound `L_p(N) = (p - 1) psi(N) / 12 + 2^omega(N)` for
/// `#X0(N)(F_{p^2})`.
pub fn ogg_lp(level: &Level, p: u64) -> Result<Ratio<u64>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if level.divides(p) {
        return Err(Error::PrimeDividesLevel { p, n: level.n() });
    }
    Ok(Ratio::new((p - 1) * level.psi(), 12) + Ratio::from_integer(1u64 << level.omega()))
}

/// `1 + max{d : count > d (q + 1)}`: a curve with `count` points over `F_q`
/// has no map of degree `d` to `P^1` while `count > d (q + 1)`.
pub fn gonality_lb_from_count(count: u64, q: u64) -> u32 {
    if count == 0 {
        return 1;
    }
    (1 + (count - 1) / (q + 1)) as u32
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Eq1Witness {
    pub p: u64,
    pub lp: Ratio<u64>,
}

/// Least prime `p` not dividing `N` with `L_p(N) > 8 (p^2 + 1)`.
///
/// The scan stops at `p <= psi/96 + 2`: beyond that
/// `8 p^2 >= p psi / 12 + 16 p`, which exceeds `(p - 1) psi / 12 + 2^omega`
/// since `16 p + psi / 12 >= 2^omega` for every `N`.
pub fn eq1_eliminates(level: &Level) -> Option<Eq1Witness> {
    let limit = level.psi() / 96 + 2;
    primes_up_to(limit)
        .into_iter()
        .filter(|&p| !level.divides(p))
        .find_map(|p| {
            let lp = ogg_lp(level, p).ok()?;
            (lp > Ratio::from_integer(8 * (p * p + 1))).then_some(Eq1Witness { p, lp })
        })
}

/// Upper bounds on `gon_Q` and `gon_C` from the genus alone.
pub fn poonen_bounds(g: u64, has_rational_point: bool) -> Vec<(Field, u32, RuleId)> {
    let g32 = g as u32;
    let mut out = Vec::new();
    if g >= 2 {
        out.push((Field::Q, 2 * g32 - 2, RuleId::Poonen2g2));
        if has_rational_point {
            out.push((Field::Q, g32, RuleId::PoonenG));
        }
    } else if has_rational_point {
        out.push((Field::Q, g32 + 1, RuleId::GenusSmall));
    }
    out.push((Field::C, (g32 + 3) / 2, RuleId::PoonenC));
    out
}

/// Lower bound on `gon_C` (equal over `Q` given a rational point) from the
/// genus: only genus-zero curves admit a degree-one map.
pub fn genus_lower_bound(g: u64) -> u32 {
    if g == 0 {
        1
    } else {
        2
    }
}

/// Right-hand side of the Castelnuovo-Severi inequality for maps of degrees
/// `m` and `n` to curves of genus `gy` and `gz`.
pub fn cs_bound(m: u64, gy: u64, n: u64, gz: u64) -> u64 {
    m * gy + n * gz + (m - 1) * (n - 1)
}

/// `X` has an involution with quotient `Y` of genus `gy`. A map `X -> P^1` of
/// degree at most 4 either factors through `Y` (impossible when
/// `gon_C(Y) >= 3`) or violates Castelnuovo-Severi when `gx > 2 gy + 3`.
/// Degrees 2 and 3 are excluded by the weaker inequalities `gx > 2 gy + 1`,
/// `gx > 2 gy + 2`, so the conclusion is `gon_C(X) >= 5`.
pub fn cs_factoring_rule(gx: u64, gy: u64, quotient_gonality_lb: u32) -> Option<u32> {
    (gx > cs_bound(2, gy, 4, 0) && quotient_gonality_lb >= 3).then_some(5)
}

/// Degree-3 maps cannot factor through a double cover, so
/// `gx > 2 gy + 2` rules them out; degree-2 maps factor only when `Y` is
/// rational. Together: `gon_C(X) >= 4` when `gy >= 1`.
pub fn cs_low_degree_rule(gx: u64, gy: u64) -> Option<u32> {
    (gy >= 1 && gx > cs_bound(2, gy, 3, 0)).then_some(4)
}

/// A `d`-gonal curve `X_Gamma` has index at most `12000 d / 119`. A
/// tetragonal quotient would make `X0(N)` octagonal, so `119 psi > 96000`
/// rules it out.
pub fn kim_sarnak_rule(level: &Level) -> Option<u32> {
    (119 * level.psi() > 96000).then_some(5)
}

/// For genus at least 10, a degree-4 map over `C` descends to `Q`.
pub fn tower_rule(g: u64, gon_q_lower: u32) -> Option<u32> {
    (g >= 10 && gon_q_lower >= 5).then_some(5)
}

/// Green-Lazarsfeld: `beta_{2,2} = 0` rules out a `g^1_4` when `g >= 5`.
pub fn betti_rule(g: u64, betti22_zero: bool) -> Option<u32> {
    (g >= 5 && betti22_zero).then_some(5)
}
