//! Command-line interface: argument parsing, report rows and exit codes.
//!
//! Results go to standard output as tab-separated rows (or one JSON object
//! per row with `--format json`); diagnostics go to standard error. Output is
//! assembled in full before it is written.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::arith::make_level;
use crate::classnum::class_number_of;
use crate::engine::{self, GonalityState, Outcome, Status, VerifyEntry, UNBOUNDED};
use crate::error::Error;
use crate::facts::{load_facts, FactStore, KindHead};
use crate::hecke::{count_points, trace_tm};
use crate::modgenus::{genus_pair_quotient, genus_single_quotient, genus_x0, CurveKind, CurveRef};
use crate::rules::Field;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "gonality", about = "Gonality of Atkin-Lehner quotients of X0(N)")]
pub struct Cli {
    /// Output rendering.
    #[arg(long, value_enum, default_value = "tsv", global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// psi, number of prime factors, genus, cusps and Hall divisors of N.
    Invariants { n: u64 },
    /// Genus of X0(N)/w_d or X0(N)/<w_d, w_d'>.
    Genus { n: u64, d: u64, d2: Option<u64> },
    /// Number of points of X0(N) over F_{p^deg}.
    Count {
        n: u64,
        p: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=2))]
        deg: u32,
    },
    /// Trace of the Hecke operator T_m on S_2(Gamma_0(N)).
    Trace { n: u64, m: u64 },
    /// Class number of a negative discriminant.
    Classnum {
        #[arg(allow_negative_numbers = true)]
        disc: i64,
    },
    /// Gonality interval of X0(N)/w_d.
    Classify {
        n: u64,
        d: u64,
        /// Fact file; the shipped facts are used when omitted.
        #[arg(long)]
        facts: Option<PathBuf>,
        /// Also print every certificate step.
        #[arg(long)]
        certificate: bool,
    },
    /// Classify every quotient X0(N)/w_d with N <= nmax.
    Survey {
        #[arg(long)]
        nmax: u64,
        #[arg(long)]
        facts: Option<PathBuf>,
        #[arg(long)]
        include_fricke: bool,
    },
    /// Compare the engine with an expected table.
    Verify {
        #[arg(long)]
        facts: Option<PathBuf>,
        #[arg(long)]
        expected: PathBuf,
    },
    /// Fact file utilities.
    Facts {
        #[command(subcommand)]
        action: FactsAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum FactsAction {
    /// Parse a fact file and report every problem.
    Validate { file: PathBuf },
}

/// One classified curve as printed by `classify` and `survey`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    #[serde(rename = "N")]
    pub n: u64,
    pub d: String,
    pub genus: u64,
    #[serde(rename = "lowerQ")]
    pub lower_q: Option<u32>,
    #[serde(rename = "upperQ")]
    pub upper_q: Option<u32>,
    #[serde(rename = "lowerC")]
    pub lower_c: Option<u32>,
    #[serde(rename = "upperC")]
    pub upper_c: Option<u32>,
    pub status: &'static str,
    pub certificate: String,
}

fn curve_indices(curve: &CurveRef) -> String {
    match curve.kind() {
        CurveKind::Full => String::new(),
        CurveKind::Single(d) => d.to_string(),
        CurveKind::Pair(a, b) => format!("({a},{b})"),
    }
}

fn finite(v: u32) -> Option<u32> {
    (v != UNBOUNDED).then_some(v)
}

impl ReportRow {
    pub fn from_state(s: &GonalityState) -> Self {
        ReportRow {
            n: s.curve.n(),
            d: curve_indices(&s.curve),
            genus: s.genus,
            lower_q: Some(s.lower_q),
            upper_q: finite(s.upper_q),
            lower_c: Some(s.lower_c),
            upper_c: finite(s.upper_c),
            status: match s.status() {
                Status::Decided => "decided",
                Status::Undecided => "undecided",
            },
            certificate: s.certificate.summary(),
        }
    }

    pub fn from_outcome(o: &Outcome) -> Self {
        match o {
            Outcome::Classified(s) => Self::from_state(s),
            Outcome::Contradiction { curve, genus, detail } => ReportRow {
                n: curve.n(),
                d: curve_indices(curve),
                genus: *genus,
                lower_q: None,
                upper_q: None,
                lower_c: None,
                upper_c: None,
                status: "contradiction",
                certificate: detail.clone(),
            },
        }
    }

    pub fn to_tsv(&self) -> String {
        let opt = |v: Option<u32>| v.map_or("-".to_string(), |v| v.to_string());
        let upper = |v: Option<u32>| v.map_or("inf".to_string(), |v| v.to_string());
        let contradiction = self.status == "contradiction";
        let (uq, uc) = if contradiction {
            (opt(self.upper_q), opt(self.upper_c))
        } else {
            (upper(self.upper_q), upper(self.upper_c))
        };
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.n,
            self.d,
            self.genus,
            opt(self.lower_q),
            uq,
            opt(self.lower_c),
            uc,
            self.status,
            self.certificate
        )
    }
}

/// Error paired with the exit code it maps to.
struct Failure {
    code: i32,
    error: Error,
}

/// Errors in command-line values are usage errors; everything else is a
/// data error.
fn usage(error: Error) -> Failure {
    let code = match error {
        Error::Contradiction { .. } | Error::Inconsistent(_) | Error::Parse(_) => EXIT_DATA,
        _ => EXIT_USAGE,
    };
    Failure { code, error }
}

fn data(error: Error) -> Failure {
    Failure { code: EXIT_DATA, error }
}

fn store_from(path: Option<&PathBuf>) -> std::result::Result<FactStore, Failure> {
    match path {
        Some(p) => load_facts(p).map_err(data),
        None => crate::data::shipped_facts().map_err(data),
    }
}

/// Collected standard output, standard error and exit code of one command.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

struct Writer {
    format: Format,
    out: Output,
}

impl Writer {
    /// Emit one row: tab-joined values, or a JSON object with these keys.
    fn row(&mut self, fields: &[(&str, serde_json::Value)]) {
        let line = match self.format {
            Format::Tsv => fields
                .iter()
                .map(|(_, v)| match v {
                    serde_json::Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect::<Vec<_>>()
                .join("\t"),
            Format::Json => {
                let map: serde_json::Map<String, serde_json::Value> =
                    fields.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
                serde_json::Value::Object(map).to_string()
            }
        };
        self.out.stdout.push_str(&line);
        self.out.stdout.push('\n');
    }

    fn report(&mut self, row: &ReportRow) {
        let line = match self.format {
            Format::Tsv => row.to_tsv(),
            Format::Json => serde_json::to_string(row).expect("report rows serialize"),
        };
        self.out.stdout.push_str(&line);
        self.out.stdout.push('\n');
    }

    fn diag(&mut self, msg: impl AsRef<str>) {
        self.out.stderr.push_str(msg.as_ref());
        self.out.stderr.push('\n');
    }
}

fn json<T: Serialize>(v: T) -> serde_json::Value {
    serde_json::to_value(v).expect("plain values serialize")
}

fn execute(cmd: &Command, w: &mut Writer) -> std::result::Result<i32, Failure> {
    match cmd {
        Command::Invariants { n } => {
            let level = make_level(*n).map_err(usage)?;
            let g = genus_x0(&level);
            let hall: Vec<String> = level.hall_divisors().iter().map(u64::to_string).collect();
            w.row(&[
                ("N", json(n)),
                ("psi", json(level.psi())),
                ("omega", json(level.omega())),
                ("genus", json(g.genus)),
                ("cusps", json(g.cusp_count)),
                ("hall_divisors", json(hall.join(","))),
            ]);
        }
        Command::Genus { n, d, d2 } => {
            let level = make_level(*n).map_err(usage)?;
            let (label, g) = match d2 {
                None => (d.to_string(), genus_single_quotient(&level, *d).map_err(usage)?.genus),
                Some(d2) => (
                    format!("({d},{d2})"),
                    genus_pair_quotient(&level, *d, *d2).map_err(usage)?.genus,
                ),
            };
            w.row(&[("N", json(n)), ("d", json(label)), ("genus", json(g))]);
        }
        Command::Count { n, p, deg } => {
            let level = make_level(*n).map_err(usage)?;
            let pc = count_points(&level, *p, *deg).map_err(usage)?;
            w.row(&[("N", json(n)), ("q", json(pc.q)), ("count", json(pc.count))]);
        }
        Command::Trace { n, m } => {
            let level = make_level(*n).map_err(usage)?;
            let t = trace_tm(&level, *m).map_err(usage)?;
            w.row(&[("N", json(n)), ("m", json(m)), ("trace", json(t.value))]);
        }
        Command::Classnum { disc } => {
            let h = class_number_of(*disc).map_err(usage)?;
            w.row(&[("D", json(disc)), ("h", json(h))]);
        }
        Command::Classify {
            n,
            d,
            facts,
            certificate,
        } => {
            let level = make_level(*n).map_err(usage)?;
            let curve = CurveRef::single(level, *d).map_err(usage)?;
            let store = store_from(facts.as_ref())?;
            let state = engine::classify(&curve, &store).map_err(usage)?;
            w.report(&ReportRow::from_state(&state));
            if *certificate {
                for (i, step) in state.certificate.steps.iter().enumerate() {
                    w.row(&[
                        ("step", json(i + 1)),
                        ("assertion", json(step.assertion.to_string())),
                        ("anchor", json(&step.anchor)),
                    ]);
                }
            }
        }
        Command::Survey {
            nmax,
            facts,
            include_fricke,
        } => {
            let store = store_from(facts.as_ref())?;
            let outcomes = engine::survey(*nmax, &store, *include_fricke).map_err(data)?;
            let mut contradictions = 0;
            for o in &outcomes {
                contradictions += usize::from(o.state().is_none());
                w.report(&ReportRow::from_outcome(o));
            }
            let decided = outcomes
                .iter()
                .filter(|o| o.state().is_some_and(|s| s.status() == Status::Decided))
                .count();
            w.diag(format!(
                "{} curves, {decided} decided, {contradictions} contradictions",
                outcomes.len()
            ));
            if contradictions > 0 {
                return Ok(EXIT_DATA);
            }
        }
        Command::Verify { facts, expected } => {
            let store = store_from(facts.as_ref())?;
            let text = std::fs::read_to_string(expected)
                .map_err(|e| data(Error::Parse(format!("{}: {e}", expected.display()))))?;
            let table = engine::parse_expected(&text).map_err(data)?;
            let report = engine::verify_table(&store, &table).map_err(data)?;
            let mut emit = |kind: &str, entries: &[VerifyEntry]| {
                for e in entries {
                    w.row(&[
                        ("kind", json(kind)),
                        ("N", json(e.n)),
                        ("d", json(e.d)),
                        ("detail", json(&e.detail)),
                    ]);
                }
            };
            emit("match", &report.matches);
            emit("mismatch", &report.mismatches);
            emit("undecided", &report.undecided);
            for note in &report.notes {
                w.row(&[
                    ("kind", json("note")),
                    ("N", json("")),
                    ("d", json("")),
                    ("detail", json(note)),
                ]);
            }
            w.diag(format!(
                "{} matches, {} mismatches, {} undecided",
                report.matches.len(),
                report.mismatches.len(),
                report.undecided.len()
            ));
            if !report.is_clean() {
                return Ok(EXIT_MISMATCH);
            }
        }
        Command::Facts {
            action: FactsAction::Validate { file },
        } => {
            let text =
                std::fs::read_to_string(file).map_err(|e| data(Error::Parse(format!("{}: {e}", file.display()))))?;
            let store = crate::facts::parse_facts(&text).map_err(|e| data(e.into()))?;
            for head in KindHead::ALL {
                let n = store.facts().iter().filter(|f| f.kind.head() == head).count();
                w.row(&[("kind", json(head.name())), ("count", json(n))]);
            }
            for s in store.suspects() {
                let problem = s.problem.as_deref().unwrap_or("marked suspect");
                w.diag(format!("line {}: suspect record ({problem}): {}", s.line, s.text));
            }
            for note in store.notes() {
                w.diag(format!("note: {note}"));
            }
        }
    }
    Ok(EXIT_OK)
}

/// Run the CLI on `argv` (including the program name).
pub fn run<I, T>(argv: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Output {
                    stdout: text,
                    stderr: String::new(),
                    code,
                }
            } else {
                Output {
                    stdout: String::new(),
                    stderr: text,
                    code,
                }
            };
        }
    };
    let mut w = Writer {
        format: cli.format,
        out: Output::default(),
    };
    match execute(&cli.command, &mut w) {
        Ok(code) => w.out.code = code,
        Err(f) => {
            w.diag(format!("error: {}", f.error));
            w.out.code = f.code;
        }
    }
    w.out
}

/// Exact gonality over `field` as text, or the interval.
pub fn render_interval(state: &GonalityState, field: Field) -> String {
    let (lo, hi) = state.interval(field);
    match (lo == hi, hi == UNBOUNDED) {
        (true, _) => lo.to_string(),
        (false, true) => format!("[{lo}, inf)"),
        (false, false) => format!("[{lo}, {hi}]"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Output {
        run(std::iter::once("gonality").chain(args.iter().copied()))
    }

    #[test]
    fn count_and_genus_rows() {
        let out = run_args(&["count", "420", "11", "--deg", "2"]);
        assert_eq!((out.stdout.as_str(), out.code), ("420\t121\t1128\n", 0));
        let out = run_args(&["genus", "70", "2", "35"]);
        assert_eq!(out.stdout, "70\t(2,35)\t1\n");
        let out = run_args(&["genus", "70", "5"]);
        assert_eq!(out.stdout, "70\t5\t4\n");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["classify", "1", "2"]).code, EXIT_USAGE);
        assert_eq!(run_args(&["frobnicate"]).code, EXIT_USAGE);
        assert_eq!(run_args(&["count", "10", "5"]).code, EXIT_USAGE);
        assert_eq!(run_args(&["count", "10", "3", "--deg", "3"]).code, EXIT_USAGE);
        let out = run_args(&["classify", "70", "5", "--facts", "/nonexistent/facts.txt"]);
        assert_eq!(out.code, EXIT_DATA);
        assert!(out.stderr.starts_with("error:"));
    }

    #[test]
    fn json_rows() {
        let out = run_args(&["--format", "json", "trace", "37", "1"]);
        assert_eq!(out.stdout, "{\"N\":37,\"m\":1,\"trace\":2}\n");
        let out = run_args(&["classnum", "-23", "--format", "json"]);
        assert_eq!(out.stdout, "{\"D\":-23,\"h\":3}\n");
        let out = run_args(&["--format", "json", "classify", "70", "5"]);
        let v: serde_json::Value = serde_json::from_str(out.stdout.trim()).unwrap();
        for key in [
            "N",
            "d",
            "genus",
            "lowerQ",
            "upperQ",
            "lowerC",
            "upperC",
            "status",
            "certificate",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn invariants_row() {
        let out = run_args(&["invariants", "70"]);
        assert_eq!(out.stdout, "70\t144\t3\t9\t8\t1,2,5,7,10,14,35,70\n");
    }

    #[test]
    fn report_row_rendering() {
        let state = engine::classify(
            &CurveRef::single(make_level(70).unwrap(), 70).unwrap(),
            &FactStore::empty(),
        )
        .unwrap();
        let row = ReportRow::from_state(&state);
        assert_eq!(row.status, "undecided");
        assert!(row.to_tsv().starts_with("70\t70\t4\t2\t4\t2\t3\tundecided\t"));
        assert_eq!(render_interval(&state, Field::Q), "[2, 4]");
    }
}
