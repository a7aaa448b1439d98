//! Externally computed facts about specific curves: finite-field gonality
//! bounds, hyperelliptic and trigonal flags, Betti numbers, explicit maps to
//! `P^1` and known gonalities.
//!
//! One record per line, `KIND;curve=<label>;key=value;...;src=<string>`.
//! `#` starts a comment; `#! note: <text>` is kept and surfaced in reports.
//! A record with `suspect=yes` is kept aside for reporting and never used
//! for inference, even if it is otherwise valid.

use std::collections::HashMap;
use std::fmt;

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::modgenus::{parse_label_numbers, CurveRef};
use crate::rules::Field;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KindHead {
    FpGonLb,
    Hyperelliptic,
    TrigonalC,
    TrigonalQ,
    Betti22,
    MapP1,
    GonKnown,
}

impl KindHead {
    pub const ALL: [KindHead; 7] = [
        KindHead::FpGonLb,
        KindHead::Hyperelliptic,
        KindHead::TrigonalC,
        KindHead::TrigonalQ,
        KindHead::Betti22,
        KindHead::MapP1,
        KindHead::GonKnown,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KindHead::FpGonLb => "FP_GON_LB",
            KindHead::Hyperelliptic => "HYPERELLIPTIC",
            KindHead::TrigonalC => "TRIGONAL_C",
            KindHead::TrigonalQ => "TRIGONAL_Q",
            KindHead::Betti22 => "BETTI22",
            KindHead::MapP1 => "MAP_P1",
            KindHead::GonKnown => "GON_KNOWN",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        KindHead::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Payload keys, in serialization order.
    fn keys(self) -> &'static [&'static str] {
        match self {
            KindHead::FpGonLb => &["p", "lb"],
            KindHead::Hyperelliptic | KindHead::TrigonalC | KindHead::TrigonalQ => &["value"],
            KindHead::Betti22 => &["zero"],
            KindHead::MapP1 => &["degree", "field"],
            KindHead::GonKnown => &["field", "value"],
        }
    }
}

impl fmt::Display for KindHead {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FactKind {
    /// `gon_{F_p} >= lb`, hence `gon_Q >= lb`.
    FpGonLb {
        p: u64,
        lb: u32,
    },
    Hyperelliptic(bool),
    TrigonalC(bool),
    TrigonalQ(bool),
    /// Whether the graded Betti number `beta_{2,2}` vanishes.
    Betti22 {
        zero: bool,
    },
    MapP1 {
        degree: u32,
        field: Field,
    },
    GonKnown {
        field: Field,
        value: u32,
    },
}

impl FactKind {
    pub fn head(&self) -> KindHead {
        match self {
            FactKind::FpGonLb { .. } => KindHead::FpGonLb,
            FactKind::Hyperelliptic(_) => KindHead::Hyperelliptic,
            FactKind::TrigonalC(_) => KindHead::TrigonalC,
            FactKind::TrigonalQ(_) => KindHead::TrigonalQ,
            FactKind::Betti22 { .. } => KindHead::Betti22,
            FactKind::MapP1 { .. } => KindHead::MapP1,
            FactKind::GonKnown { .. } => KindHead::GonKnown,
        }
    }

    fn payload(&self) -> Vec<(&'static str, String)> {
        let flag = |b: bool| if b { "yes" } else { "no" }.to_string();
        match *self {
            FactKind::FpGonLb { p, lb } => vec![("p", p.to_string()), ("lb", lb.to_string())],
            FactKind::Hyperelliptic(v) | FactKind::TrigonalC(v) | FactKind::TrigonalQ(v) => {
                vec![("value", flag(v))]
            }
            FactKind::Betti22 { zero } => vec![("zero", flag(zero))],
            FactKind::MapP1 { degree, field } => {
                vec![("degree", degree.to_string()), ("field", field.to_string())]
            }
            FactKind::GonKnown { field, value } => {
                vec![("field", field.to_string()), ("value", value.to_string())]
            }
        }
    }

    /// Two facts about the same curve that cannot both hold.
    fn contradicts(&self, other: &FactKind) -> bool {
        use FactKind::*;
        match (*self, *other) {
            (FpGonLb { p, lb }, FpGonLb { p: p2, lb: lb2 }) => p == p2 && lb != lb2,
            (Hyperelliptic(a), Hyperelliptic(b))
            | (TrigonalC(a), TrigonalC(b))
            | (TrigonalQ(a), TrigonalQ(b))
            | (Betti22 { zero: a }, Betti22 { zero: b }) => a != b,
            (GonKnown { field, value }, GonKnown { field: f2, value: v2 }) => field == f2 && value != v2,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fact {
    pub curve: CurveRef,
    pub kind: FactKind,
    pub source: String,
    /// 1-based line in the file it was read from (0 if constructed).
    pub line: usize,
}

impl Fact {
    pub fn to_line(&self) -> String {
        record_line(
            self.kind.head(),
            &self.curve.label(),
            &self.kind.payload(),
            &self.source,
            false,
        )
    }
}

fn record_line(head: KindHead, curve: &str, payload: &[(&str, String)], source: &str, suspect: bool) -> String {
    let mut out = format!("{head};curve={curve}");
    for (k, v) in payload {
        out.push_str(&format!(";{k}={v}"));
    }
    if suspect {
        out.push_str(";suspect=yes");
    }
    out.push_str(&format!(";src={source}"));
    out
}

/// A record marked `suspect=yes`, kept verbatim with the reason it would be
/// rejected (if any).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuspectRecord {
    pub line: usize,
    pub text: String,
    pub problem: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for LineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Every problem found in a fact file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactErrors(pub Vec<LineError>);

impl fmt::Display for FactErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for FactErrors {}

impl From<FactErrors> for Error {
    fn from(e: FactErrors) -> Self {
        Error::Parse(e.to_string())
    }
}

#[derive(Debug, Clone, Default)]
pub struct FactStore {
    facts: Vec<Fact>,
    by_curve: HashMap<CurveRef, Vec<usize>>,
    suspects: Vec<SuspectRecord>,
    notes: Vec<String>,
}

impl FactStore {
    pub fn empty() -> Self {
        FactStore::default()
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn suspects(&self) -> &[SuspectRecord] {
        &self.suspects
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    /// All facts of one kind about a curve, in file order.
    pub fn all<'a>(&'a self, curve: &CurveRef, head: KindHead) -> impl Iterator<Item = &'a Fact> + 'a {
        self.by_curve
            .get(curve)
            .map(|v| v.as_slice())
            .unwrap_or(&[])
            .iter()
            .map(move |&i| &self.facts[i])
            .filter(move |f| f.kind.head() == head)
    }

    /// The most informative fact of one kind about a curve, or `None` when
    /// nothing is known. Ties go to the earliest line.
    pub fn query(&self, curve: &CurveRef, head: KindHead) -> Option<&Fact> {
        let strength = |f: &Fact| -> i64 {
            match f.kind {
                FactKind::FpGonLb { lb, .. } => lb as i64,
                FactKind::MapP1 { degree, field } => {
                    // a map over Q is worth more than one over C of the same degree
                    -(2 * degree as i64) + i64::from(field == Field::Q)
                }
                _ => 0,
            }
        };
        let mut best: Option<&Fact> = None;
        for f in self.all(curve, head) {
            if best.is_none_or(|b| strength(f) > strength(b)) {
                best = Some(f);
            }
        }
        best
    }

    fn insert(&mut self, fact: Fact) {
        self.by_curve
            .entry(fact.curve.clone())
            .or_default()
            .push(self.facts.len());
        self.facts.push(fact);
    }

    /// Canonical text: notes, facts, then suspect records as they were read.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for n in &self.notes {
            out.push_str(&format!("#! note: {n}\n"));
        }
        for f in &self.facts {
            out.push_str(&f.to_line());
            out.push('\n');
        }
        for s in &self.suspects {
            out.push_str(&s.text);
            out.push('\n');
        }
        out
    }
}

struct Record<'a> {
    head: KindHead,
    curve_text: &'a str,
    fields: HashMap<&'a str, &'a str>,
    source: &'a str,
    suspect: bool,
}

fn split_record(line: &str) -> std::result::Result<Record<'_>, String> {
    let mut parts = line.split(';');
    let head_text = parts.next().unwrap_or("");
    let head = KindHead::from_name(head_text).ok_or_else(|| format!("unknown fact kind '{head_text}'"))?;
    let mut fields = HashMap::new();
    for part in parts {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| format!("malformed field '{part}' (expected key=value)"))?;
        if fields.insert(k, v).is_some() {
            return Err(format!("duplicate key '{k}'"));
        }
    }
    let allowed = |k: &str| ["curve", "src", "suspect"].contains(&k) || head.keys().contains(&k);
    let mut unknown: Vec<&str> = fields.keys().copied().filter(|k| !allowed(k)).collect();
    unknown.sort_unstable();
    if let Some(k) = unknown.first() {
        return Err(format!("unknown key '{k}' for {head}"));
    }
    let curve_text = fields.remove("curve").ok_or("missing key 'curve'")?;
    let source = fields.remove("src").ok_or("missing key 'src'")?;
    if source.trim().is_empty() {
        return Err("empty src".into());
    }
    let suspect = match fields.remove("suspect") {
        None | Some("no") => false,
        Some("yes") => true,
        Some(v) => return Err(format!("suspect must be yes or no (got '{v}')")),
    };
    for k in head.keys() {
        if !fields.contains_key(k) {
            return Err(format!("missing key '{k}' for {head}"));
        }
    }
    Ok(Record {
        head,
        curve_text,
        fields,
        source,
        suspect,
    })
}

fn parse_flag(key: &str, v: &str) -> std::result::Result<bool, String> {
    match v {
        "yes" => Ok(true),
        "no" => Ok(false),
        _ => Err(format!("{key} must be yes or no (got '{v}')")),
    }
}

fn parse_u32(key: &str, v: &str) -> std::result::Result<u32, String> {
    if v.is_empty() || !v.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("{key} must be a nonnegative integer (got '{v}')"));
    }
    v.parse().map_err(|_| format!("{key} out of range: {v}"))
}

fn parse_field(v: &str) -> std::result::Result<Field, String> {
    match v {
        "Q" => Ok(Field::Q),
        "C" => Ok(Field::C),
        _ => Err(format!("field must be Q or C (got '{v}')")),
    }
}

fn build_fact(rec: &Record<'_>, line: usize) -> std::result::Result<Fact, String> {
    let curve = CurveRef::parse(rec.curve_text).map_err(|e| {
        // name the offending index when the label itself is well formed
        match parse_label_numbers(rec.curve_text) {
            Ok(_) => format!("curve {}: {e}", rec.curve_text),
            Err(_) => e.to_string(),
        }
    })?;
    let f = &rec.fields;
    let kind = match rec.head {
        KindHead::FpGonLb => {
            let p = parse_u32("p", f["p"])? as u64;
            let lb = parse_u32("lb", f["lb"])?;
            if !is_prime(p) {
                return Err(format!("FP_GON_LB: p={p} is not prime"));
            }
            if curve.level().divides(p) {
                return Err(format!("FP_GON_LB: p={p} divides N={}", curve.n()));
            }
            if lb < 2 {
                return Err(format!("FP_GON_LB: lb={lb} carries no information (need lb >= 2)"));
            }
            FactKind::FpGonLb { p, lb }
        }
        KindHead::Hyperelliptic => FactKind::Hyperelliptic(parse_flag("value", f["value"])?),
        KindHead::TrigonalC => FactKind::TrigonalC(parse_flag("value", f["value"])?),
        KindHead::TrigonalQ => FactKind::TrigonalQ(parse_flag("value", f["value"])?),
        KindHead::Betti22 => FactKind::Betti22 {
            zero: parse_flag("zero", f["zero"])?,
        },
        KindHead::MapP1 => {
            let degree = parse_u32("degree", f["degree"])?;
            if degree == 0 {
                return Err("MAP_P1: degree must be at least 1".into());
            }
            FactKind::MapP1 {
                degree,
                field: parse_field(f["field"])?,
            }
        }
        KindHead::GonKnown => {
            let value = parse_u32("value", f["value"])?;
            if value == 0 {
                return Err("GON_KNOWN: value must be at least 1".into());
            }
            FactKind::GonKnown {
                field: parse_field(f["field"])?,
                value,
            }
        }
    };
    Ok(Fact {
        curve,
        kind,
        source: rec.source.to_string(),
        line,
    })
}

/// Parse a fact file, collecting every error with its line number.
pub fn parse_facts(text: &str) -> std::result::Result<FactStore, FactErrors> {
    let mut store = FactStore::default();
    let mut errors = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if let Some(directive) = line.strip_prefix("#!") {
            match directive.trim_start().strip_prefix("note:") {
                Some(note) => store.notes.push(note.trim().to_string()),
                None => errors.push(LineError {
                    line: line_no,
                    message: format!("unknown directive '{line}'"),
                }),
            }
            continue;
        }
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let rec = match split_record(line) {
            Ok(r) => r,
            Err(message) => {
                errors.push(LineError { line: line_no, message });
                continue;
            }
        };
        let built = build_fact(&rec, line_no);
        if rec.suspect {
            store.suspects.push(SuspectRecord {
                line: line_no,
                text: line.to_string(),
                problem: built.err(),
            });
            continue;
        }
        match built {
            Ok(fact) => {
                let clash = store
                    .all(&fact.curve, fact.kind.head())
                    .find(|g| g.kind.contradicts(&fact.kind))
                    .map(|g| g.line);
                match clash {
                    Some(other) => errors.push(LineError {
                        line: line_no,
                        message: format!(
                            "{} on {} contradicts the fact on line {other}",
                            fact.kind.head(),
                            fact.curve
                        ),
                    }),
                    None => store.insert(fact),
                }
            }
            Err(message) => errors.push(LineError { line: line_no, message }),
        }
    }
    if errors.is_empty() {
        Ok(store)
    } else {
        Err(FactErrors(errors))
    }
}

/// Read and parse a fact file from disk.
pub fn load_facts(path: &std::path::Path) -> Result<FactStore> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_facts(&text)?)
}
