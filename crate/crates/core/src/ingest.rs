//! The `.idn` text format and the CSV emitters.
//!
//! An instance file declares entities, then relations:
//!
//! ```text
//! # idn-format 1
//! A: a1 a2 a3
//! B: b1 b2 b3 b4
//! a1 <- b2 + b4
//! a2 <- b1 b3
//! ```
//!
//! `#` starts a comment. A relation line reads `target <- minterm + minterm
//! ...`; whitespace-separated names inside a minterm are a conjunction.
//! Names are letters, digits and underscores. When the same name is declared
//! on both sides, references must qualify it as `A.name` or `B.name`; the
//! serializer does so automatically, keeping parse/serialize a round trip
//! for every valid instance.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::cascade::CascadeTrace;
use crate::model::{EntityId, Idn, Idr, Minterm, Side};

/// Parsed instance plus non-fatal observations (e.g. collapsed duplicate
/// members inside a minterm).
#[derive(Debug, Clone)]
pub struct ParseOutcome {
    pub idn: Idn,
    pub notes: Vec<ParseNote>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseNote {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseNote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    DuplicateDeclaration { side: Side, name: String },
    DeclarationAfterRelations,
    DuplicateTarget(String),
    UndeclaredEntity(String),
    AmbiguousEntity(String),
    SelfDependency(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(msg) => write!(f, "{msg}"),
            ParseErrorKind::DuplicateDeclaration { side, name } => {
                write!(f, "entity {name} already declared on side {side}")
            }
            ParseErrorKind::DeclarationAfterRelations => {
                write!(f, "declarations must precede relations")
            }
            ParseErrorKind::DuplicateTarget(name) => {
                write!(f, "a relation for {name} was already given")
            }
            ParseErrorKind::UndeclaredEntity(name) => write!(f, "unknown entity {name}"),
            ParseErrorKind::AmbiguousEntity(name) => write!(
                f,
                "{name} is declared on both sides; qualify it as A.{name} or B.{name}"
            ),
            ParseErrorKind::SelfDependency(name) => write!(f, "self-dependency at {name}"),
        }
    }
}

struct Tok<'a> {
    text: &'a str,
    col: usize,
}

fn tokenize(line: &str) -> Vec<Tok<'_>> {
    let mut toks = Vec::new();
    let mut col = 0usize;
    let mut start: Option<(usize, usize)> = None; // (byte, col)
    for (byte, ch) in line.char_indices() {
        col += 1;
        if ch.is_whitespace() {
            if let Some((b, c)) = start.take() {
                toks.push(Tok { text: &line[b..byte], col: c });
            }
        } else if start.is_none() {
            start = Some((byte, col));
        }
    }
    if let Some((b, c)) = start {
        toks.push(Tok { text: &line[b..], col: c });
    }
    toks
}

fn is_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn syntax(line: usize, column: usize, msg: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        kind: ParseErrorKind::Syntax(msg.into()),
    }
}

/// Parses the text format into an instance.
///
/// Structural problems a single line cannot reveal (duplicate minterms
/// within a relation, for instance) are left to `Idn::validate`.
pub fn parse_idn(text: &str) -> Result<ParseOutcome, ParseError> {
    let mut declared_a: BTreeSet<String> = BTreeSet::new();
    let mut declared_b: BTreeSet<String> = BTreeSet::new();
    let mut order_a: Vec<EntityId> = Vec::new();
    let mut order_b: Vec<EntityId> = Vec::new();
    let mut idrs: Vec<Idr> = Vec::new();
    let mut targets: BTreeSet<EntityId> = BTreeSet::new();
    let mut notes: Vec<ParseNote> = Vec::new();

    let resolve = |tok: &Tok<'_>,
                   lineno: usize,
                   declared_a: &BTreeSet<String>,
                   declared_b: &BTreeSet<String>|
     -> Result<EntityId, ParseError> {
        let (side, name) = match tok.text.split_once('.') {
            Some(("A", rest)) => (Some(Side::A), rest),
            Some(("B", rest)) => (Some(Side::B), rest),
            Some(_) => {
                return Err(syntax(
                    lineno,
                    tok.col,
                    format!("bad qualifier in {:?} (use A.name or B.name)", tok.text),
                ))
            }
            None => (None, tok.text),
        };
        if !is_name(name) {
            return Err(syntax(
                lineno,
                tok.col,
                format!("invalid entity name {name:?}"),
            ));
        }
        let err = |kind| ParseError { line: lineno, column: tok.col, kind };
        match side {
            Some(Side::A) => declared_a
                .contains(name)
                .then(|| EntityId::a(name))
                .ok_or_else(|| err(ParseErrorKind::UndeclaredEntity(tok.text.to_string()))),
            Some(Side::B) => declared_b
                .contains(name)
                .then(|| EntityId::b(name))
                .ok_or_else(|| err(ParseErrorKind::UndeclaredEntity(tok.text.to_string()))),
            None => match (declared_a.contains(name), declared_b.contains(name)) {
                (true, false) => Ok(EntityId::a(name)),
                (false, true) => Ok(EntityId::b(name)),
                (true, true) => Err(err(ParseErrorKind::AmbiguousEntity(name.to_string()))),
                (false, false) => Err(err(ParseErrorKind::UndeclaredEntity(name.to_string()))),
            },
        }
    };

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let toks = tokenize(line);
        if toks.is_empty() {
            continue;
        }

        // Declaration line?
        if toks[0].text == "A:" || toks[0].text == "B:" {
            if !idrs.is_empty() {
                return Err(ParseError {
                    line: lineno,
                    column: toks[0].col,
                    kind: ParseErrorKind::DeclarationAfterRelations,
                });
            }
            let side = if toks[0].text == "A:" { Side::A } else { Side::B };
            let (declared, order) = match side {
                Side::A => (&mut declared_a, &mut order_a),
                Side::B => (&mut declared_b, &mut order_b),
            };
            for t in &toks[1..] {
                if !is_name(t.text) {
                    return Err(syntax(
                        lineno,
                        t.col,
                        format!("invalid entity name {:?}", t.text),
                    ));
                }
                if !declared.insert(t.text.to_string()) {
                    return Err(ParseError {
                        line: lineno,
                        column: t.col,
                        kind: ParseErrorKind::DuplicateDeclaration {
                            side,
                            name: t.text.to_string(),
                        },
                    });
                }
                order.push(EntityId::new(side, t.text));
            }
            continue;
        }
        if toks[0].text.ends_with(':') {
            return Err(syntax(
                lineno,
                toks[0].col,
                format!("unknown declaration {:?} (expected A: or B:)", toks[0].text),
            ));
        }

        // Relation line: target <- minterm { + minterm }
        let target = resolve(&toks[0], lineno, &declared_a, &declared_b)?;
        let arrow_col = toks.get(1).map_or(toks[0].col, |t| t.col);
        if toks.len() < 2 || toks[1].text != "<-" {
            return Err(syntax(lineno, arrow_col, "expected '<-' after the target"));
        }
        if !targets.insert(target.clone()) {
            return Err(ParseError {
                line: lineno,
                column: toks[0].col,
                kind: ParseErrorKind::DuplicateTarget(toks[0].text.to_string()),
            });
        }

        let mut minterms: Vec<Minterm> = Vec::new();
        let mut members: Vec<EntityId> = Vec::new();
        let mut group_col = toks.get(2).map_or(arrow_col, |t| t.col);
        let mut flush = |members: &mut Vec<EntityId>, col: usize| -> Result<Minterm, ParseError> {
            if members.is_empty() {
                return Err(syntax(lineno, col, "empty minterm"));
            }
            let mut seen = BTreeSet::new();
            let mut uniq = Vec::new();
            for m in members.drain(..) {
                if seen.insert(m.clone()) {
                    uniq.push(m);
                } else {
                    notes.push(ParseNote {
                        line: lineno,
                        message: format!(
                            "duplicate member {m} within a minterm of {target} (collapsed)"
                        ),
                    });
                }
            }
            Ok(Minterm::new(uniq))
        };
        for t in &toks[2..] {
            if t.text == "+" {
                minterms.push(flush(&mut members, t.col)?);
                group_col = t.col;
            } else {
                let member = resolve(t, lineno, &declared_a, &declared_b)?;
                if member == target {
                    return Err(ParseError {
                        line: lineno,
                        column: t.col,
                        kind: ParseErrorKind::SelfDependency(target.name.clone()),
                    });
                }
                members.push(member);
            }
        }
        if members.is_empty() && minterms.is_empty() {
            return Err(syntax(lineno, arrow_col, "expected at least one minterm"));
        }
        minterms.push(flush(&mut members, group_col)?);
        idrs.push(Idr::new(target, minterms));
    }

    Ok(ParseOutcome {
        idn: Idn::new(order_a, order_b, idrs),
        notes,
    })
}

fn render(e: &EntityId, dup_names: &BTreeSet<&str>) -> String {
    if dup_names.contains(e.name.as_str()) {
        e.qualified()
    } else {
        e.name.clone()
    }
}

fn dup_names(idn: &Idn) -> BTreeSet<&str> {
    let a: BTreeSet<&str> = idn.entities_a().iter().map(|e| e.name.as_str()).collect();
    idn.entities_b()
        .iter()
        .map(|e| e.name.as_str())
        .filter(|n| a.contains(n))
        .collect()
}

/// Canonical text form: sorted declarations, relations sorted by target,
/// minterms in stored order. Parsing the output reproduces the instance.
pub fn serialize_idn(idn: &Idn) -> String {
    let dups = dup_names(idn);
    let mut out = String::from("# idn-format 1\n");

    for (side, entities) in [("A:", idn.entities_a()), ("B:", idn.entities_b())] {
        out.push_str(side);
        let mut names: Vec<&str> = entities.iter().map(|e| e.name.as_str()).collect();
        names.sort_unstable();
        for n in names {
            out.push(' ');
            out.push_str(n);
        }
        out.push('\n');
    }

    let relations: BTreeMap<&EntityId, &Idr> =
        idn.idrs().iter().map(|idr| (&idr.target, idr)).collect();
    for (&target, idr) in &relations {
        out.push_str(&render(target, &dups));
        out.push_str(" <-");
        for (i, mt) in idr.minterms.iter().enumerate() {
            if i > 0 {
                out.push_str(" +");
            }
            for m in mt.members() {
                out.push(' ');
                out.push_str(&render(m, &dups));
            }
        }
        out.push('\n');
    }
    out
}

/// Entity-by-time 0/1 matrix of a trace, one row per entity in declaration
/// order, one column per step through the steady state.
pub fn export_trace_csv(trace: &CascadeTrace) -> String {
    let a: BTreeSet<&str> = trace
        .entities()
        .iter()
        .filter(|e| e.side == Side::A)
        .map(|e| e.name.as_str())
        .collect();
    let dups: BTreeSet<&str> = trace
        .entities()
        .iter()
        .filter(|e| e.side == Side::B && a.contains(e.name.as_str()))
        .map(|e| e.name.as_str())
        .collect();

    let last = trace.steady_step();
    let mut out = String::from("entity");
    for t in 0..=last {
        out.push_str(&format!(",t{t}"));
    }
    out.push('\n');
    for e in trace.entities() {
        out.push_str(&render(e, &dups));
        let failed_at = trace.failure_time[e].time();
        for t in 0..=last {
            out.push(',');
            out.push(if failed_at.is_some_and(|ft| ft <= t) { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}

/// `rho,k` rows of a sweep, rho with two decimals.
pub fn export_sweep_csv(points: &[(f64, usize)]) -> String {
    let mut out = String::from("rho,k\n");
    for (rho, k) in points {
        out.push_str(&format!("{rho:.2},{k}\n"));
    }
    out
}
