//! Gonality intervals for `X0(N)/w_d` over `Q` and `C`, derived by running
//! the bound rules and the fact store to a fixed point.
//!
//! Every tightening is recorded as a certificate step holding the evidence it
//! used. Replaying a certificate recomputes the computed evidence (genera,
//! point counts, inequality witnesses) from scratch and re-derives each step
//! from the replayed state, so a certificate can be checked without the fact
//! store or the level cache that produced it.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::arith::{is_prime, make_level, Level};
use crate::error::{Error, Result};
use crate::facts::{Fact, FactKind, FactStore, KindHead};
use crate::hecke::count_points;
use crate::modgenus::{genus, genus_pair_quotient, genus_single_quotient, CurveKind, CurveRef};
use crate::rules::{
    betti_rule, cs_factoring_rule, cs_low_degree_rule, eq1_eliminates, genus_lower_bound, gonality_lb_from_count,
    kim_sarnak_rule, ogg_lp, poonen_bounds, tower_rule, BoundAssertion, BoundKind, Field, RuleId,
};

/// Primes used for point-count bounds on `X0(N)`.
const COUNT_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

/// Fixed-point iteration cap; the rule dependency graph is shallow.
const MAX_PASSES: usize = 8;

/// Upper bound placeholder before any rule has fired.
pub const UNBOUNDED: u32 = u32::MAX;

/// What a certificate step was derived from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evidence {
    /// The genus of the curve itself.
    Genus { g: u64 },
    /// `X -> Y` of degree 2 onto a pair quotient; `fact` is the fact about
    /// `Y` used, if any.
    PairQuotient {
        pair: CurveRef,
        gy: u64,
        fact: Option<Fact>,
    },
    /// A fact about the curve, or about a pair quotient it covers.
    Fact(Fact),
    /// `#X0(N)(F_{p^e}) = count`.
    Count { p: u64, e: u32, count: u64 },
    /// Ogg's lower bound `#X0(N)(F_{p^2}) >= L_p(N)` with `ceil(L_p) = lp_ceil`.
    Ogg { p: u64, lp_ceil: u64 },
    /// `L_p(N) > 8 (p^2 + 1)`.
    Eq1 { p: u64 },
    /// `psi(N)` for the Kim-Sarnak bound.
    Psi { psi: u64 },
    /// Bounds of the curve at the time the step fired.
    State,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub assertion: BoundAssertion,
    pub evidence: Evidence,
    /// The mathematical result the step rests on.
    pub anchor: String,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.assertion, self.anchor)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Certificate {
    pub steps: Vec<Step>,
}

impl Certificate {
    /// Rule names with their anchors, one entry per distinct pair, in first-use order.
    pub fn summary(&self) -> String {
        let mut seen: Vec<String> = Vec::new();
        for s in &self.steps {
            let item = format!("{}[{}]", s.assertion.rule, s.anchor);
            if !seen.contains(&item) {
                seen.push(item);
            }
        }
        seen.join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GonalityState {
    pub curve: CurveRef,
    pub genus: u64,
    pub lower_q: u32,
    pub upper_q: u32,
    pub lower_c: u32,
    pub upper_c: u32,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Decided,
    Undecided,
}

impl GonalityState {
    fn initial(curve: CurveRef, genus: u64) -> Self {
        GonalityState {
            curve,
            genus,
            lower_q: 1,
            upper_q: UNBOUNDED,
            lower_c: 1,
            upper_c: UNBOUNDED,
            certificate: Certificate::default(),
        }
    }

    pub fn interval(&self, field: Field) -> (u32, u32) {
        match field {
            Field::Q => (self.lower_q, self.upper_q),
            Field::C => (self.lower_c, self.upper_c),
        }
    }

    /// The exact gonality over `field`, if the interval is a single value.
    pub fn exact(&self, field: Field) -> Option<u32> {
        let (lo, hi) = self.interval(field);
        (lo == hi).then_some(lo)
    }

    pub fn status(&self) -> Status {
        if self.exact(Field::Q).is_some() && self.exact(Field::C).is_some() {
            Status::Decided
        } else {
            Status::Undecided
        }
    }

    fn bound_mut(&mut self, field: Field, kind: BoundKind) -> &mut u32 {
        match (field, kind) {
            (Field::Q, BoundKind::Lower) => &mut self.lower_q,
            (Field::Q, BoundKind::Upper) => &mut self.upper_q,
            (Field::C, BoundKind::Lower) => &mut self.lower_c,
            (Field::C, BoundKind::Upper) => &mut self.upper_c,
        }
    }

    fn tightens(&self, a: &BoundAssertion) -> bool {
        let (lo, hi) = self.interval(a.field);
        match a.kind {
            BoundKind::Lower => a.value > lo,
            BoundKind::Upper => a.value < hi,
        }
    }

    /// Index of the step that set the current bound of this kind.
    fn last_step(&self, field: Field, kind: BoundKind) -> Option<usize> {
        self.certificate
            .steps
            .iter()
            .rposition(|s| s.assertion.field == field && s.assertion.kind == kind)
    }

    /// Record `step` if it tightens the state; fail if it crosses the
    /// opposite bound.
    fn apply(&mut self, step: Step) -> Result<bool> {
        if !self.tightens(&step.assertion) {
            return Ok(false);
        }
        let (field, kind, value) = (step.assertion.field, step.assertion.kind, step.assertion.value);
        *self.bound_mut(field, kind) = value;
        self.certificate.steps.push(step);
        let (lo, hi) = self.interval(field);
        if lo > hi {
            let other = match kind {
                BoundKind::Lower => BoundKind::Upper,
                BoundKind::Upper => BoundKind::Lower,
            };
            let i = self.certificate.steps.len() - 1;
            let j = self.last_step(field, other);
            let describe = |k: Option<usize>| match k {
                Some(k) => format!("step {} ({})", k + 1, self.certificate.steps[k]),
                None => "no step".to_string(),
            };
            return Err(Error::Contradiction {
                curve: self.curve.to_string(),
                detail: format!(
                    "gon_{field} in [{lo}, {hi}]: {} conflicts with {}",
                    describe(Some(i)),
                    describe(j)
                ),
            });
        }
        Ok(true)
    }
}

/// Data shared by every quotient at one level.
#[derive(Debug, Clone)]
pub struct LevelContext {
    pub level: Level,
    pub genus_x0: u64,
    /// Genus of `X0(N)/w_d` for every nontrivial Hall divisor `d`.
    pub single_genus: BTreeMap<u64, u64>,
    /// Genus of each pair quotient, keyed by its canonical curve.
    pub pair_genus: BTreeMap<(u64, u64), u64>,
    /// `(p, e, #X0(N)(F_{p^e}))` for small primes not dividing `N`.
    pub counts: Vec<(u64, u32, u64)>,
    pub eq1: Option<u64>,
}

impl LevelContext {
    pub fn new(level: &Level) -> Result<Self> {
        let hall: Vec<u64> = level.hall_divisors().into_iter().filter(|&d| d > 1).collect();
        let mut single_genus = BTreeMap::new();
        for &d in &hall {
            single_genus.insert(d, genus_single_quotient(level, d)?.genus);
        }
        let mut pair_genus = BTreeMap::new();
        for (i, &a) in hall.iter().enumerate() {
            for &b in &hall[i + 1..] {
                let pair = CurveRef::pair(level.clone(), a, b)?;
                if let CurveKind::Pair(x, y) = pair.kind() {
                    if let std::collections::btree_map::Entry::Vacant(e) = pair_genus.entry((x, y)) {
                        e.insert(genus_pair_quotient(level, x, y)?.genus);
                    }
                }
            }
        }
        let mut counts = Vec::new();
        for p in COUNT_PRIMES.into_iter().filter(|&p| !level.divides(p)) {
            for e in [1, 2] {
                counts.push((p, e, count_points(level, p, e)?.count));
            }
        }
        Ok(LevelContext {
            level: level.clone(),
            genus_x0: crate::modgenus::genus_x0(level).genus,
            single_genus,
            pair_genus,
            counts,
            eq1: eq1_eliminates(level).map(|w| w.p),
        })
    }

    /// Pair quotients `X0(N)/<w_d, w_d'>` covered by `X0(N)/w_d`, with genera.
    fn pairs_containing(&self, d: u64) -> Vec<(CurveRef, u64)> {
        self.pair_genus
            .iter()
            .filter_map(|(&(a, b), &g)| {
                let pair = CurveRef::pair(self.level.clone(), a, b).ok()?;
                pair.involutions().contains(&d).then_some((pair, g))
            })
            .collect()
    }
}

fn assertion(
    curve: &CurveRef,
    field: Field,
    kind: BoundKind,
    value: u32,
    rule: RuleId,
    inputs: Vec<(String, String)>,
) -> BoundAssertion {
    BoundAssertion {
        curve: curve.clone(),
        field,
        kind,
        value,
        rule,
        inputs,
    }
}

fn kv(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

fn anchor_for(rule: RuleId, evidence: &Evidence) -> String {
    match (rule, evidence) {
        (_, Evidence::Fact(f)) => f.source.clone(),
        (_, Evidence::PairQuotient { fact: Some(f), .. }) if rule == RuleId::PoonenQuotUp => {
            format!("Poonen: gon(X) <= deg * gon(Y); {}", f.source)
        }
        (RuleId::GenusSmall, _) => "genus".into(),
        (RuleId::Poonen2g2, _) => "Poonen: gon <= 2g - 2".into(),
        (RuleId::PoonenG, _) => "Poonen: gon <= g with a rational cusp".into(),
        (RuleId::PoonenC, _) => "Poonen: gon_C <= (g + 3)/2".into(),
        (RuleId::PoonenQuotUp, _) => "Poonen: gon(X) <= deg * gon(Y)".into(),
        (RuleId::PoonenQuotDown, _) => "Poonen: gon(X) >= gon(Y)".into(),
        (RuleId::CsFactor, _) => "Castelnuovo-Severi".into(),
        (RuleId::CountLb, _) => "F_q point count of X0(N)".into(),
        (RuleId::OggLp, _) => "Ogg: #X0(N)(F_p^2) >= L_p(N)".into(),
        (RuleId::Eq1, _) => "Ogg: L_p(N) > 8(p^2 + 1)".into(),
        (RuleId::KimSarnak, _) => "Kim-Sarnak index bound".into(),
        (RuleId::Tower, _) => "Tower theorem".into(),
        (RuleId::Betti, _) => "Green-Lazarsfeld".into(),
        (RuleId::FieldDescent, _) => "gon_C <= gon_Q".into(),
        (RuleId::Fact, _) => "fact".into(),
    }
}

/// Upper bound on `gon_k(Y)` from its genus (a rational cusp is always
/// present) and optionally one fact about `Y`.
fn quotient_upper(field: Field, gy: u64, fact: Option<&Fact>) -> u32 {
    let from_genus = poonen_bounds(gy, true)
        .into_iter()
        .filter(|b| b.0 == field || (field == Field::C && b.0 == Field::Q))
        .map(|b| b.1)
        .min()
        .unwrap_or(UNBOUNDED);
    let from_fact = match fact.map(|f| f.kind) {
        Some(FactKind::Hyperelliptic(true)) if gy >= 2 => 2,
        Some(FactKind::MapP1 { degree, field: f }) if f == field || f == Field::Q => degree,
        Some(FactKind::GonKnown { field: f, value }) if f == field || f == Field::Q => value,
        Some(FactKind::TrigonalQ(true)) => 3,
        Some(FactKind::TrigonalC(true)) if field == Field::C => 3,
        _ => UNBOUNDED,
    };
    from_genus.min(from_fact)
}

/// Lower bound on `gon_C(Y)` from its genus and the facts about `Y`.
fn quotient_lower_c(gy: u64, facts: &[&Fact]) -> u32 {
    let mut lb = genus_lower_bound(gy);
    let has = |k: FactKind| facts.iter().any(|f| f.kind == k);
    if gy >= 2 && has(FactKind::Hyperelliptic(false)) {
        lb = 3;
        if has(FactKind::TrigonalC(false)) {
            lb = 4;
        }
    }
    for f in facts {
        if let FactKind::GonKnown { field: Field::C, value } = f.kind {
            lb = lb.max(value);
        }
    }
    lb
}

/// The facts about `Y` that `quotient_lower_c` looks at.
fn lower_c_facts<'a>(store: &'a FactStore, pair: &CurveRef) -> Vec<&'a Fact> {
    [KindHead::Hyperelliptic, KindHead::TrigonalC, KindHead::GonKnown]
        .into_iter()
        .flat_map(|h| store.all(pair, h))
        .collect()
}

/// Derive the assertions a piece of evidence supports on `state.curve`,
/// given the state reached so far. This is the single place where rules are
/// turned into bounds; classification and replay both go through it.
fn derive(evidence: &Evidence, state: &GonalityState) -> Vec<BoundAssertion> {
    let curve = &state.curve;
    let g = state.genus;
    let mut out = Vec::new();
    let mut push = |field, kind, value, rule, inputs| out.push(assertion(curve, field, kind, value, rule, inputs));
    match evidence {
        Evidence::Genus { g } => {
            let lb = genus_lower_bound(*g);
            push(Field::Q, BoundKind::Lower, lb, RuleId::GenusSmall, vec![kv("g", g)]);
            push(Field::C, BoundKind::Lower, lb, RuleId::GenusSmall, vec![kv("g", g)]);
            for (field, value, rule) in poonen_bounds(*g, true) {
                push(
                    field,
                    BoundKind::Upper,
                    value,
                    rule,
                    vec![kv("g", g), kv("rational_point", "yes")],
                );
            }
        }
        Evidence::PairQuotient { pair, gy, fact } => {
            for field in [Field::Q, Field::C] {
                let up = quotient_upper(field, *gy, fact.as_ref());
                if up < UNBOUNDED {
                    let mut inputs = vec![kv("quotient", pair), kv("g_quotient", gy), kv("gon_quotient_upper", up)];
                    if let Some(f) = fact {
                        inputs.push(kv("fact", f.to_line()));
                    }
                    push(field, BoundKind::Upper, 2 * up, RuleId::PoonenQuotUp, inputs);
                }
            }
            let facts: Vec<&Fact> = fact.iter().collect();
            let y_lb = quotient_lower_c(*gy, &facts);
            let inputs = vec![
                kv("g", g),
                kv("quotient", pair),
                kv("g_quotient", gy),
                kv("gon_C_quotient_lower", y_lb),
            ];
            if let Some(v) = cs_factoring_rule(g, *gy, y_lb) {
                push(Field::C, BoundKind::Lower, v, RuleId::CsFactor, inputs.clone());
            }
            if let Some(v) = cs_low_degree_rule(g, *gy) {
                push(Field::C, BoundKind::Lower, v, RuleId::CsFactor, inputs);
            }
        }
        Evidence::Fact(f) => {
            let on_self = &f.curve == curve;
            let inputs = vec![kv("fact", f.to_line())];
            match f.kind {
                FactKind::FpGonLb { lb, .. } => {
                    let rule = if on_self { RuleId::Fact } else { RuleId::PoonenQuotDown };
                    push(Field::Q, BoundKind::Lower, lb, rule, inputs);
                }
                FactKind::GonKnown { field, value } if on_self => {
                    push(field, BoundKind::Lower, value, RuleId::Fact, inputs.clone());
                    push(field, BoundKind::Upper, value, RuleId::Fact, inputs);
                }
                FactKind::GonKnown { field, value } => {
                    push(field, BoundKind::Lower, value, RuleId::PoonenQuotDown, inputs);
                }
                _ if !on_self => {}
                FactKind::Hyperelliptic(true) if g >= 2 => {
                    push(Field::Q, BoundKind::Upper, 2, RuleId::Fact, inputs.clone());
                    push(Field::C, BoundKind::Upper, 2, RuleId::Fact, inputs);
                }
                FactKind::Hyperelliptic(false) if g >= 2 => {
                    push(Field::C, BoundKind::Lower, 3, RuleId::Fact, inputs);
                }
                FactKind::TrigonalC(true) => push(Field::C, BoundKind::Upper, 3, RuleId::Fact, inputs),
                FactKind::TrigonalC(false) if state.lower_c >= 3 => {
                    push(Field::C, BoundKind::Lower, 4, RuleId::Fact, inputs)
                }
                FactKind::TrigonalQ(true) => push(Field::Q, BoundKind::Upper, 3, RuleId::Fact, inputs),
                FactKind::TrigonalQ(false) if state.lower_q >= 3 => {
                    push(Field::Q, BoundKind::Lower, 4, RuleId::Fact, inputs)
                }
                FactKind::MapP1 { degree, field } => {
                    push(field, BoundKind::Upper, degree, RuleId::Fact, inputs.clone());
                    if field == Field::Q {
                        push(Field::C, BoundKind::Upper, degree, RuleId::Fact, inputs);
                    }
                }
                FactKind::Betti22 { zero } => {
                    if let Some(v) = betti_rule(g, zero) {
                        push(
                            Field::C,
                            BoundKind::Lower,
                            v,
                            RuleId::Betti,
                            vec![kv("g", g), kv("fact", f.to_line())],
                        );
                    }
                }
                _ => {}
            }
        }
        Evidence::Count { p, e, count } => {
            let q = p.pow(*e);
            let lb = gonality_lb_from_count(*count, q);
            let inputs = vec![kv("p", p), kv("q", q), kv("count", count), kv("gon_Q_X0_lower", lb)];
            push(Field::Q, BoundKind::Lower, lb.div_ceil(2), RuleId::CountLb, inputs);
        }
        Evidence::Ogg { p, lp_ceil } => {
            let lb = gonality_lb_from_count(*lp_ceil, p * p);
            let inputs = vec![kv("p", p), kv("L_p_ceil", lp_ceil), kv("gon_Q_X0_lower", lb)];
            push(Field::Q, BoundKind::Lower, lb.div_ceil(2), RuleId::OggLp, inputs);
        }
        Evidence::Eq1 { p } => {
            push(Field::Q, BoundKind::Lower, 5, RuleId::Eq1, vec![kv("p", p)]);
        }
        Evidence::Psi { psi } => {
            if let Some(v) = kim_sarnak_rule(curve.level()).filter(|_| *psi == curve.level().psi()) {
                push(Field::C, BoundKind::Lower, v, RuleId::KimSarnak, vec![kv("psi", psi)]);
            }
        }
        Evidence::State => {
            let inputs = vec![
                kv("lower_Q", state.lower_q),
                kv("upper_Q", state.upper_q),
                kv("lower_C", state.lower_c),
                kv("upper_C", state.upper_c),
            ];
            if let Some(v) = tower_rule(g, state.lower_q) {
                push(
                    Field::C,
                    BoundKind::Lower,
                    v,
                    RuleId::Tower,
                    vec![kv("g", g), kv("lower_Q", state.lower_q)],
                );
            }
            push(
                Field::Q,
                BoundKind::Lower,
                state.lower_c,
                RuleId::FieldDescent,
                inputs.clone(),
            );
            if state.upper_q < UNBOUNDED {
                push(
                    Field::C,
                    BoundKind::Upper,
                    state.upper_q,
                    RuleId::FieldDescent,
                    inputs.clone(),
                );
            }
            // hyperelliptic over C with a rational point means hyperelliptic over Q
            if g >= 2 && state.lower_q >= 3 {
                push(Field::C, BoundKind::Lower, 3, RuleId::FieldDescent, inputs);
            }
        }
    }
    out
}

/// All evidence relevant to `curve`, in rule order.
fn gather(curve: &CurveRef, g: u64, ctx: &LevelContext, store: &FactStore) -> Vec<Evidence> {
    let mut ev = vec![Evidence::Genus { g }];
    let d = match curve.kind() {
        CurveKind::Single(d) => d,
        _ => unreachable!("only single quotients are classified"),
    };
    let fricke = d == curve.n();
    let own_facts = || KindHead::ALL.into_iter().flat_map(|h| store.all(curve, h)).cloned();
    if fricke {
        // Fricke quotients are settled only by known gonality values
        ev.extend(
            own_facts()
                .filter(|f| f.kind.head() == KindHead::GonKnown)
                .map(Evidence::Fact),
        );
        ev.push(Evidence::State);
        return ev;
    }
    let pairs = ctx.pairs_containing(d);
    for (pair, gy) in &pairs {
        ev.push(Evidence::PairQuotient {
            pair: pair.clone(),
            gy: *gy,
            fact: None,
        });
        for head in [KindHead::Hyperelliptic, KindHead::MapP1, KindHead::GonKnown] {
            if let Some(f) = store.query(pair, head) {
                ev.push(Evidence::PairQuotient {
                    pair: pair.clone(),
                    gy: *gy,
                    fact: Some(f.clone()),
                });
            }
        }
    }
    ev.extend(own_facts().map(Evidence::Fact));
    for (pair, _) in &pairs {
        for head in [KindHead::FpGonLb, KindHead::GonKnown] {
            ev.extend(store.all(pair, head).cloned().map(Evidence::Fact));
        }
    }
    for &(p, e, count) in &ctx.counts {
        ev.push(Evidence::Count { p, e, count });
        if e == 2 {
            let lp = ogg_lp(&ctx.level, p).expect("count primes do not divide N");
            ev.push(Evidence::Ogg {
                p,
                lp_ceil: lp.ceil().to_integer(),
            });
        }
    }
    if let Some(p) = ctx.eq1 {
        ev.push(Evidence::Eq1 { p });
    }
    ev.push(Evidence::Psi { psi: ctx.level.psi() });
    // combine the facts about each pair for the Castelnuovo-Severi bound
    for (pair, gy) in &pairs {
        let facts = lower_c_facts(store, pair);
        if quotient_lower_c(*gy, &facts) > quotient_lower_c(*gy, &[]) {
            ev.push(Evidence::PairQuotient {
                pair: pair.clone(),
                gy: *gy,
                fact: facts
                    .into_iter()
                    .find(|f| f.kind == FactKind::Hyperelliptic(false))
                    .cloned(),
            });
        }
    }
    ev.push(Evidence::State);
    ev
}

fn check_level(curve: &CurveRef) -> Result<u64> {
    let d = match curve.kind() {
        CurveKind::Single(d) => d,
        _ => {
            return Err(Error::Parse(format!(
                "{curve}: only single quotients X0(N)/<d> are classified"
            )))
        }
    };
    if curve.level().is_prime_power() || curve.n() == 1 {
        return Err(Error::PrimePowerLevel(curve.n()));
    }
    Ok(d)
}

/// Run every rule on `curve` until nothing tightens.
pub fn classify_with(curve: &CurveRef, ctx: &LevelContext, store: &FactStore) -> Result<GonalityState> {
    let d = check_level(curve)?;
    let g = *ctx
        .single_genus
        .get(&d)
        .ok_or_else(|| Error::Inconsistent(format!("no genus cached for {curve}")))?;
    let mut state = GonalityState::initial(curve.clone(), g);
    let evidence = gather(curve, g, ctx, store);
    for pass in 0.. {
        if pass == MAX_PASSES {
            return Err(Error::Inconsistent(format!(
                "{curve}: no fixed point after {MAX_PASSES} passes"
            )));
        }
        let mut changed = false;
        for ev in &evidence {
            for a in derive(ev, &state) {
                let anchor = anchor_for(a.rule, ev);
                changed |= state.apply(Step {
                    assertion: a,
                    evidence: ev.clone(),
                    anchor,
                })?;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(state)
}

/// Classify a single quotient `X0(N)/w_d` (including `d = N`).
pub fn classify(curve: &CurveRef, store: &FactStore) -> Result<GonalityState> {
    check_level(curve)?;
    let ctx = LevelContext::new(curve.level())?;
    classify_with(curve, &ctx, store)
}

/// Result of classifying one curve in a survey. A contradiction is kept as
/// data so the rest of the survey still reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Classified(GonalityState),
    Contradiction {
        curve: CurveRef,
        genus: u64,
        detail: String,
    },
}

impl Outcome {
    pub fn curve(&self) -> &CurveRef {
        match self {
            Outcome::Classified(s) => &s.curve,
            Outcome::Contradiction { curve, .. } => curve,
        }
    }

    pub fn genus(&self) -> u64 {
        match self {
            Outcome::Classified(s) => s.genus,
            Outcome::Contradiction { genus, .. } => *genus,
        }
    }

    pub fn state(&self) -> Option<&GonalityState> {
        match self {
            Outcome::Classified(s) => Some(s),
            Outcome::Contradiction { .. } => None,
        }
    }

    /// `(N, d)` of the classified quotient.
    pub fn key(&self) -> (u64, u64) {
        match self.curve().kind() {
            CurveKind::Single(d) => (self.curve().n(), d),
            _ => unreachable!("surveys only contain single quotients"),
        }
    }
}

/// Every admissible quotient `X0(N)/w_d` with `N <= nmax`, ordered by `(N, d)`.
pub fn survey(nmax: u64, store: &FactStore, include_fricke: bool) -> Result<Vec<Outcome>> {
    let levels: Vec<u64> = (2..=nmax).filter(|&n| !crate::arith::is_prime_power(n)).collect();
    let per_level: Vec<Result<Vec<Outcome>>> = levels
        .par_iter()
        .map(|&n| {
            let level = make_level(n)?;
            let ctx = LevelContext::new(&level)?;
            let mut out = Vec::new();
            for (&d, &g) in &ctx.single_genus {
                if d == n && !include_fricke {
                    continue;
                }
                let curve = CurveRef::single(level.clone(), d)?;
                out.push(match classify_with(&curve, &ctx, store) {
                    Ok(state) => Outcome::Classified(state),
                    Err(Error::Contradiction { detail, .. }) => Outcome::Contradiction {
                        curve,
                        genus: g,
                        detail,
                    },
                    Err(e) => return Err(e),
                });
            }
            Ok(out)
        })
        .collect();
    let mut all = Vec::new();
    for r in per_level {
        all.extend(r?);
    }
    Ok(all)
}

/// One expected classification: `N;d;gonQ=<int>[;gonC=<int>]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpectedRow {
    pub n: u64,
    pub d: u64,
    pub gon_q: u32,
    pub gon_c: Option<u32>,
    pub line: usize,
}

/// `#! exhaustive: gonQ=<v> [genus=<g>] nmax=<K>` claims the table lists
/// every quotient with `N <= K` (and genus `g`) whose `Q`-gonality is `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exhaustive {
    pub gon_q: u32,
    pub genus: Option<u64>,
    pub nmax: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExpectedTable {
    pub rows: Vec<ExpectedRow>,
    pub exhaustive: Vec<Exhaustive>,
    pub notes: Vec<String>,
}

impl ExpectedTable {
    /// Largest level the table needs surveyed.
    pub fn nmax(&self) -> u64 {
        let rows = self.rows.iter().map(|r| r.n);
        let claims = self.exhaustive.iter().map(|e| e.nmax);
        rows.chain(claims).max().unwrap_or(0)
    }

    pub fn has_fricke(&self) -> bool {
        self.rows.iter().any(|r| r.n == r.d)
    }
}

fn parse_int<T: std::str::FromStr>(key: &str, v: &str) -> std::result::Result<T, String> {
    v.parse()
        .map_err(|_| format!("{key} must be a positive integer (got '{v}')"))
}

fn parse_expected_row(line: &str, lineno: usize) -> std::result::Result<ExpectedRow, String> {
    let f: Vec<&str> = line.split(';').map(str::trim).collect();
    if !(3..=4).contains(&f.len()) {
        return Err("expected N;d;gonQ=<int>[;gonC=<int>]".into());
    }
    let n: u64 = parse_int("N", f[0])?;
    let d: u64 = parse_int("d", f[1])?;
    let level = make_level(n).map_err(|e| e.to_string())?;
    if level.is_prime_power() || n == 1 {
        return Err(format!("level {n} is a prime power"));
    }
    if d <= 1 || !level.is_hall_divisor(d) {
        return Err(format!("{d} is not a nontrivial Hall divisor of {n}"));
    }
    let mut gon_q = None;
    let mut gon_c = None;
    for kvp in &f[2..] {
        match kvp.split_once('=') {
            Some(("gonQ", v)) if gon_q.is_none() => gon_q = Some(parse_int("gonQ", v)?),
            Some(("gonC", v)) if gon_c.is_none() => gon_c = Some(parse_int("gonC", v)?),
            _ => return Err(format!("unexpected field '{kvp}'")),
        }
    }
    Ok(ExpectedRow {
        n,
        d,
        gon_q: gon_q.ok_or("missing gonQ")?,
        gon_c,
        line: lineno,
    })
}

fn parse_exhaustive(text: &str) -> std::result::Result<Exhaustive, String> {
    let mut gon_q = None;
    let mut genus = None;
    let mut nmax = None;
    for kvp in text.split_whitespace() {
        match kvp.split_once('=') {
            Some(("gonQ", v)) => gon_q = Some(parse_int("gonQ", v)?),
            Some(("genus", v)) => genus = Some(parse_int("genus", v)?),
            Some(("nmax", v)) => nmax = Some(parse_int("nmax", v)?),
            _ => return Err(format!("unexpected field '{kvp}' in exhaustive directive")),
        }
    }
    Ok(Exhaustive {
        gon_q: gon_q.ok_or("exhaustive directive needs gonQ")?,
        genus,
        nmax: nmax.ok_or("exhaustive directive needs nmax")?,
    })
}

/// Parse an expected table, collecting every malformed line.
pub fn parse_expected(text: &str) -> Result<ExpectedTable> {
    let mut table = ExpectedTable::default();
    let mut errors = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if let Some(directive) = line.strip_prefix("#!") {
            let directive = directive.trim();
            let res = if let Some(note) = directive.strip_prefix("note:") {
                table.notes.push(note.trim().to_string());
                Ok(())
            } else if let Some(rest) = directive.strip_prefix("exhaustive:") {
                parse_exhaustive(rest).map(|e| table.exhaustive.push(e))
            } else {
                Err(format!("unknown directive '{directive}'"))
            };
            if let Err(e) = res {
                errors.push(format!("line {lineno}: {e}"));
            }
            continue;
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_expected_row(line, lineno) {
            Ok(row) if table.rows.iter().any(|r| (r.n, r.d) == (row.n, row.d)) => {
                errors.push(format!("line {lineno}: duplicate row for ({}, {})", row.n, row.d))
            }
            Ok(row) => table.rows.push(row),
            Err(e) => errors.push(format!("line {lineno}: {e}")),
        }
    }
    if errors.is_empty() {
        Ok(table)
    } else {
        Err(Error::Parse(errors.join("\n")))
    }
}

/// How an expected row compares with the engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyEntry {
    pub n: u64,
    pub d: u64,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub matches: Vec<VerifyEntry>,
    pub mismatches: Vec<VerifyEntry>,
    pub undecided: Vec<VerifyEntry>,
    pub notes: Vec<String>,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Match,
    Mismatch,
    Undecided,
}

fn judge(state: &GonalityState, field: Field, expected: u32) -> Verdict {
    let (lo, hi) = state.interval(field);
    if expected < lo || expected > hi {
        Verdict::Mismatch
    } else if lo == hi {
        Verdict::Match
    } else {
        Verdict::Undecided
    }
}

/// Compare survey outcomes with an expected table. A row is a mismatch when
/// a proven interval excludes the expected value, a match when every listed
/// gonality is decided and equal, and undecided otherwise.
pub fn verify(outcomes: &[Outcome], expected: &ExpectedTable, store: &FactStore) -> VerifyReport {
    let by_key: BTreeMap<(u64, u64), &Outcome> = outcomes.iter().map(|o| (o.key(), o)).collect();
    let mut report = VerifyReport {
        notes: store.notes().iter().chain(&expected.notes).cloned().collect(),
        ..Default::default()
    };
    for s in store.suspects() {
        let problem = s.problem.as_deref().unwrap_or("marked suspect");
        report
            .notes
            .push(format!("suspect fact on line {} ({problem}): {}", s.line, s.text));
    }
    for row in &expected.rows {
        let entry = |detail: String| VerifyEntry {
            n: row.n,
            d: row.d,
            detail,
        };
        let state = match by_key.get(&(row.n, row.d)) {
            None => {
                report.undecided.push(entry("not surveyed".into()));
                continue;
            }
            Some(Outcome::Contradiction { detail, .. }) => {
                report.mismatches.push(entry(format!("contradiction: {detail}")));
                continue;
            }
            Some(Outcome::Classified(s)) => s,
        };
        let mut checks = vec![(Field::Q, row.gon_q)];
        checks.extend(row.gon_c.map(|v| (Field::C, v)));
        let verdicts: Vec<Verdict> = checks.iter().map(|&(f, v)| judge(state, f, v)).collect();
        let describe = checks
            .iter()
            .map(|&(f, v)| {
                let (lo, hi) = state.interval(f);
                let hi = if hi == UNBOUNDED {
                    "inf".to_string()
                } else {
                    hi.to_string()
                };
                format!("gon{f}: expected {v}, engine [{lo}, {hi}]")
            })
            .collect::<Vec<_>>()
            .join("; ");
        if verdicts.contains(&Verdict::Mismatch) {
            report.mismatches.push(entry(describe));
        } else if verdicts.iter().all(|&v| v == Verdict::Match) {
            report.matches.push(entry(describe));
        } else {
            report.undecided.push(entry(describe));
        }
    }
    for claim in &expected.exhaustive {
        for o in outcomes {
            let Some(state) = o.state() else { continue };
            let (n, d) = o.key();
            let in_scope = n <= claim.nmax && claim.genus.is_none_or(|g| g == state.genus);
            let listed = expected.rows.iter().any(|r| (r.n, r.d) == (n, d));
            if in_scope && !listed && state.exact(Field::Q) == Some(claim.gon_q) {
                report.mismatches.push(VerifyEntry {
                    n,
                    d,
                    detail: format!("engine decides gonQ = {} but the table omits it", claim.gon_q),
                });
            }
        }
    }
    report
}

/// Survey everything an expected table mentions and compare.
pub fn verify_table(store: &FactStore, expected: &ExpectedTable) -> Result<VerifyReport> {
    let outcomes = survey(expected.nmax(), store, expected.has_fricke())?;
    Ok(verify(&outcomes, expected, store))
}

/// Recheck the computed evidence of one step independently of the engine.
fn recheck_evidence(curve: &CurveRef, ev: &Evidence) -> Result<()> {
    let fail = |what: String| Err(Error::Inconsistent(format!("replay of {curve}: {what}")));
    match ev {
        Evidence::Genus { g } => {
            let actual = genus(curve)?;
            if actual != *g {
                return fail(format!("genus is {actual}, certificate says {g}"));
            }
        }
        Evidence::PairQuotient { pair, gy, fact } => {
            let actual = genus(pair)?;
            if actual != *gy || pair.level() != curve.level() {
                return fail(format!("{pair} has genus {actual}, certificate says {gy}"));
            }
            let covers = match curve.kind() {
                CurveKind::Single(d) => pair.involutions().contains(&d),
                _ => false,
            };
            if !covers {
                return fail(format!("{pair} is not a quotient of {curve}"));
            }
            if let Some(f) = fact {
                if &f.curve != pair {
                    return fail(format!("fact {} is not about {pair}", f.to_line()));
                }
            }
        }
        Evidence::Fact(f) => {
            let about_quotient = match (curve.kind(), f.curve.kind()) {
                (CurveKind::Single(d), CurveKind::Pair(..)) => {
                    f.curve.level() == curve.level() && f.curve.involutions().contains(&d)
                }
                _ => false,
            };
            if &f.curve != curve && !about_quotient {
                return fail(format!("fact {} does not concern this curve", f.to_line()));
            }
        }
        Evidence::Count { p, e, count } => {
            let actual = count_points(curve.level(), *p, *e)?.count;
            if actual != *count {
                return fail(format!("#X0(N)(F_{p}^{e}) = {actual}, certificate says {count}"));
            }
        }
        Evidence::Ogg { p, lp_ceil } => {
            let actual = ogg_lp(curve.level(), *p)?.ceil().to_integer();
            if actual != *lp_ceil {
                return fail(format!("ceil(L_{p}) = {actual}, certificate says {lp_ceil}"));
            }
        }
        Evidence::Eq1 { p } => {
            let lp = ogg_lp(curve.level(), *p)?;
            if !is_prime(*p) || lp <= num_rational::Ratio::from_integer(8 * (p * p + 1)) {
                return fail(format!("p = {p} does not witness L_p(N) > 8(p^2 + 1)"));
            }
        }
        Evidence::Psi { psi } => {
            if *psi != curve.level().psi() {
                return fail(format!("psi(N) = {}, certificate says {psi}", curve.level().psi()));
            }
        }
        Evidence::State => {}
    }
    Ok(())
}

/// Re-execute a certificate from scratch. Returns the final state, which
/// must equal the state the certificate came from.
pub fn replay(curve: &CurveRef, certificate: &Certificate) -> Result<GonalityState> {
    check_level(curve)?;
    let g = genus(curve)?;
    let mut state = GonalityState::initial(curve.clone(), g);
    for (i, step) in certificate.steps.iter().enumerate() {
        recheck_evidence(curve, &step.evidence)?;
        let derived = derive(&step.evidence, &state);
        if !derived.contains(&step.assertion) {
            return Err(Error::Inconsistent(format!(
                "replay of {curve}: step {} ({}) does not follow from its evidence",
                i + 1,
                step.assertion
            )));
        }
        if !state.apply(step.clone())? {
            return Err(Error::Inconsistent(format!(
                "replay of {curve}: step {} ({}) does not tighten the state",
                i + 1,
                step.assertion
            )));
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::facts::parse_facts;

    fn single(n: u64, d: u64) -> CurveRef {
        CurveRef::single(make_level(n).unwrap(), d).unwrap()
    }

    #[test]
    fn genus_four_with_fp_fact_is_tetragonal() {
        let store = parse_facts(
            "FP_GON_LB;curve=X0(70)/<5>;p=17;lb=4;src=fp\nHYPERELLIPTIC;curve=X0(70)/<5>;value=no;src=fh\n",
        )
        .unwrap();
        let s = classify(&single(70, 5), &store).unwrap();
        assert_eq!((s.genus, s.lower_q, s.upper_q), (4, 4, 4));
        assert_eq!((s.lower_c, s.upper_c), (3, 3));
        assert_eq!(s.status(), Status::Decided);
    }

    #[test]
    fn elliptic_pair_quotient_gives_upper_four() {
        let store = parse_facts(
            "HYPERELLIPTIC;curve=X0(70)/<2>;value=no;src=fh\nTRIGONAL_C;curve=X0(70)/<2>;value=no;src=hs\n",
        )
        .unwrap();
        let s = classify(&single(70, 2), &store).unwrap();
        assert_eq!((s.exact(Field::Q), s.exact(Field::C)), (Some(4), Some(4)));
        assert!(s
            .certificate
            .steps
            .iter()
            .any(|st| st.assertion.rule == RuleId::PoonenQuotUp && st.assertion.value == 4));
    }

    #[test]
    fn castelnuovo_severi_example() {
        let store = parse_facts("HYPERELLIPTIC;curve=X0(132)/<3,44>;value=no;src=fh\n").unwrap();
        let s = classify(&single(132, 3), &store).unwrap();
        assert!(s.lower_c >= 5);
        let step = s
            .certificate
            .steps
            .iter()
            .find(|st| st.assertion.rule == RuleId::CsFactor && st.assertion.value == 5);
        let step = step.expect("CS step");
        assert!(step.assertion.inputs.contains(&kv("quotient", "X0(132)/<3,44>")));
        assert!(step.assertion.inputs.contains(&kv("g_quotient", 3)));
    }

    #[test]
    fn point_count_eliminates_420() {
        let s = classify(&single(420, 5), &FactStore::empty()).unwrap();
        assert!(s.lower_q >= 5);
        assert!(s.certificate.steps.iter().any(|st| st.evidence
            == Evidence::Count {
                p: 11,
                e: 2,
                count: 1128
            }));
    }

    #[test]
    fn contradiction_is_reported() {
        let store = parse_facts("GON_KNOWN;curve=X0(70)/<5>;field=Q;value=7;src=bogus\n").unwrap();
        let err = classify(&single(70, 5), &store).unwrap_err();
        match err {
            Error::Contradiction { curve, detail } => {
                assert_eq!(curve, "X0(70)/<5>");
                assert!(detail.contains("step"), "{detail}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_inadmissible_curves() {
        assert!(matches!(
            classify(&single(64, 64), &FactStore::empty()),
            Err(Error::PrimePowerLevel(64))
        ));
        let pair = CurveRef::pair(make_level(70).unwrap(), 2, 5).unwrap();
        assert!(classify(&pair, &FactStore::empty()).is_err());
    }

    #[test]
    fn fricke_uses_known_values_only() {
        let s = classify(&single(70, 70), &FactStore::empty()).unwrap();
        assert_eq!(s.lower_q, 2);
        let store = parse_facts("GON_KNOWN;curve=X0(70)/<70>;field=Q;value=3;src=prior\n").unwrap();
        let s = classify(&single(70, 70), &store).unwrap();
        assert_eq!(s.exact(Field::Q), Some(3));
    }

    #[test]
    fn replay_reproduces_state() {
        let store = parse_facts("HYPERELLIPTIC;curve=X0(132)/<3,44>;value=no;src=fh\n").unwrap();
        for (n, d) in [(132, 3), (420, 5), (70, 2), (60, 3)] {
            let s = classify(&single(n, d), &store).unwrap();
            assert_eq!(replay(&s.curve, &s.certificate).unwrap(), s);
        }
    }

    #[test]
    fn replay_rejects_tampering() {
        let s = classify(&single(420, 5), &FactStore::empty()).unwrap();
        let mut cert = s.certificate.clone();
        for step in &mut cert.steps {
            if let Evidence::Count { count, .. } = &mut step.evidence {
                *count += 1;
            }
        }
        assert!(replay(&s.curve, &cert).is_err());
        let mut cert = s.certificate.clone();
        cert.steps[0].assertion.value += 1;
        assert!(replay(&s.curve, &cert).is_err());
    }

    #[test]
    fn survey_order_and_count() {
        let states = survey(70, &FactStore::empty(), false).unwrap();
        let keys: Vec<(u64, u64)> = states.iter().map(Outcome::key).collect();
        let mut sorted = keys.clone();
        sorted.sort_unstable();
        assert_eq!(keys, sorted);
        for k in [(60, 3), (60, 5), (66, 2), (66, 3), (66, 22), (66, 33), (70, 2)] {
            assert!(keys.contains(&k));
        }
        assert!(!keys.iter().any(|&(n, d)| n == d));
        let at_210 = survey(210, &FactStore::empty(), false).unwrap();
        assert_eq!(at_210.iter().filter(|s| s.curve().n() == 210).count(), 14);
        let six = survey(6, &FactStore::empty(), false).unwrap();
        assert_eq!(six.len(), 2);
        assert!(six.iter().all(|s| s.state().unwrap().upper_q <= 1));
    }

    #[test]
    fn survey_keeps_contradictions() {
        let store = parse_facts("GON_KNOWN;curve=X0(70)/<5>;field=Q;value=7;src=bogus\n").unwrap();
        let states = survey(70, &store, false).unwrap();
        let bad: Vec<_> = states.iter().filter(|o| o.state().is_none()).collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].key(), (70, 5));
    }

    #[test]
    fn expected_table_parsing() {
        let t = parse_expected("# c\n#! note: gap\n#! exhaustive: gonQ=4 nmax=100\n70;5;gonQ=4\n70;2;gonQ=4;gonC=4\n")
            .unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[1].gon_c, Some(4));
        assert_eq!(t.notes, ["gap"]);
        assert_eq!(t.nmax(), 100);
        let err = parse_expected("64;64;gonQ=4\n70;4;gonQ=4\n70;5;gonC=4\n#! bogus\n")
            .unwrap_err()
            .to_string();
        for needle in ["line 1", "prime power", "line 2", "line 3", "line 4"] {
            assert!(err.contains(needle), "{err}");
        }
    }

    #[test]
    fn verify_sorts_rows() {
        let store = parse_facts(
            "FP_GON_LB;curve=X0(70)/<5>;p=17;lb=4;src=fp\nHYPERELLIPTIC;curve=X0(70)/<2>;value=no;src=fh\nTRIGONAL_C;curve=X0(70)/<2>;value=no;src=hs\n",
        )
        .unwrap();
        let t = parse_expected("70;5;gonQ=4\n70;2;gonQ=4;gonC=4\n70;7;gonQ=4\n66;2;gonQ=3\n").unwrap();
        let outcomes = survey(70, &store, false).unwrap();
        let r = verify(&outcomes, &t, &store);
        let keys = |v: &[VerifyEntry]| v.iter().map(|e| (e.n, e.d)).collect::<Vec<_>>();
        assert_eq!(keys(&r.matches), [(70, 5), (70, 2), (70, 7)]);
        assert_eq!(keys(&r.undecided), [(66, 2)]);
        assert!(r.mismatches.is_empty());
        let t = parse_expected("70;5;gonQ=5\n#! exhaustive: gonQ=4 nmax=70\n").unwrap();
        let r = verify(&outcomes, &t, &store);
        assert_eq!(keys(&r.mismatches), [(70, 5), (66, 3), (66, 22), (70, 2), (70, 7)]);
    }
}
