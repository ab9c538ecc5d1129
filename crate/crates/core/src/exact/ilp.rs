//! Time-expanded binary program for the robustness problem.
//!
//! One binary variable per entity per time step (`x_*` for side A, `y_*` for
//! side B), 1 meaning failed. Minterms of size two or more inside
//! multi-minterm relations get auxiliary `c_*` variables standing for "this
//! minterm is hit". The objective minimizes the failures at step 0 subject
//! to: failures persist; an entity may be failed at step `d` only if it was
//! failed at `d - 1` or every minterm of its relation was hit at `d - 1`;
//! entities without a relation may fail only at step 0; and at the final
//! step `t_f` at least `threshold` entities are failed.
//!
//! Auxiliary variables are bounded by their members at the *same* step
//! (`c_d <= sum of members at d`), so a minterm counts as hit in the very
//! step its first member fails. Lagging these bounds by one step would make
//! an entity whose latest-hit minterm is wide fail one step later than the
//! cascade does, and assignments read off real cascades would be rejected.
//!
//! No solver is embedded; [`export_lp`] writes the standard LP file format
//! for external optimizers, and [`check_assignment`] verifies assignments
//! against the model directly.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::cascade::CascadeTrace;
use crate::model::{EntityId, Idn, InvalidInstance, Side};
use crate::solvers::{threshold, SolveError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub time_index: usize,
}

/// `coef * variables[var]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Term {
    pub coef: i64,
    pub var: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sense::Le => write!(f, "<="),
            Sense::Ge => write!(f, ">="),
            Sense::Eq => write!(f, "="),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<Term>,
    pub sense: Sense,
    pub rhs: i64,
}

/// The complete binary program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpModel {
    pub variables: Vec<Variable>,
    /// Step-0 failure count, to be minimized. All coefficients are 1.
    pub objective: Vec<Term>,
    pub constraints: Vec<Constraint>,
    pub t_f: usize,
    pub threshold: usize,
}

impl IlpModel {
    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }
}

/// A total 0/1 valuation of the model's variables, keyed by name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment(pub BTreeMap<String, bool>);

impl Assignment {
    pub fn get(&self, name: &str) -> Option<bool> {
        self.0.get(name).copied()
    }

    /// CSV form: header `variable,value`, one row per variable, values 0/1.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("variable,value\n");
        for (name, value) in &self.0 {
            out.push_str(name);
            out.push(',');
            out.push(if *value { '1' } else { '0' });
            out.push('\n');
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Assignment, AssignmentParseError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim() == "variable,value" => {}
            _ => {
                return Err(AssignmentParseError {
                    line: 1,
                    message: "expected header \"variable,value\"".into(),
                })
            }
        }
        let mut map = BTreeMap::new();
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (name, value) = line.split_once(',').ok_or_else(|| AssignmentParseError {
                line: i + 1,
                message: "expected \"<variable>,<0|1>\"".into(),
            })?;
            let value = match value.trim() {
                "0" => false,
                "1" => true,
                other => {
                    return Err(AssignmentParseError {
                        line: i + 1,
                        message: format!("value must be 0 or 1, got {other:?}"),
                    })
                }
            };
            map.insert(name.trim().to_string(), value);
        }
        Ok(Assignment(map))
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct AssignmentParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum IlpError {
    #[error("t_f must be at least 1, got {0}")]
    TfTooSmall(usize),
    #[error("t_f {t_f} is below the trace steady-state step {steady}")]
    TfBelowSteadyState { t_f: usize, steady: usize },
    #[error(transparent)]
    InvalidInstance(#[from] InvalidInstance),
    #[error("rho must be in (0, 1], got {0}")]
    RhoOutOfRange(f64),
    #[error("assignment is missing variable {0}")]
    MissingVariable(String),
    #[error("trace does not cover entity {0}")]
    TraceMismatch(EntityId),
}

// ---------------------------------------------------------------------------
// Shared variable layout
// ---------------------------------------------------------------------------

struct Aux {
    owner: usize,
    minterm: usize,
    members: Vec<usize>,
    base: String,
}

struct Layout {
    entities: Vec<EntityId>,
    /// Per entity: `x_<name>` or `y_<name>`.
    base: Vec<String>,
    has_idr: Vec<bool>,
    auxes: Vec<Aux>,
}

impl Layout {
    fn new(idn: &Idn) -> Layout {
        let entities: Vec<EntityId> = idn.entities().cloned().collect();
        let pos: BTreeMap<&EntityId, usize> =
            entities.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let base: Vec<String> = entities
            .iter()
            .map(|e| match e.side {
                Side::A => format!("x_{}", e.name),
                Side::B => format!("y_{}", e.name),
            })
            .collect();

        // c-variable names carry the owner's bare name unless the instance
        // declares the same name on both sides, in which case every aux name
        // gets the side letter to stay unique.
        let a_names: BTreeSet<&str> = idn.entities_a().iter().map(|e| e.name.as_str()).collect();
        let qualify = idn
            .entities_b()
            .iter()
            .any(|e| a_names.contains(e.name.as_str()));

        let mut has_idr = vec![false; entities.len()];
        let mut auxes = Vec::new();
        for idr in idn.idrs() {
            let owner = pos[&idr.target];
            has_idr[owner] = true;
            if idr.minterms.len() < 2 {
                continue;
            }
            for (minterm, mt) in idr.minterms.iter().enumerate() {
                if mt.len() < 2 {
                    continue;
                }
                let base = if qualify {
                    let side = match idr.target.side {
                        Side::A => 'a',
                        Side::B => 'b',
                    };
                    format!("c_{side}_{}_{minterm}", idr.target.name)
                } else {
                    format!("c_{}_{minterm}", idr.target.name)
                };
                auxes.push(Aux {
                    owner,
                    minterm,
                    members: mt.members().iter().map(|m| pos[m]).collect(),
                    base,
                });
            }
        }

        Layout {
            entities,
            base,
            has_idr,
            auxes,
        }
    }
}

// ---------------------------------------------------------------------------
// Model construction
// ---------------------------------------------------------------------------

/// Builds the time-expanded program for horizon `t_f`.
///
/// A horizon of `|A| + |B|` is always safe: cascades converge within that
/// many steps.
pub fn build_ilp(idn: &Idn, rho: f64, t_f: usize) -> Result<IlpModel, IlpError> {
    if t_f < 1 {
        return Err(IlpError::TfTooSmall(t_f));
    }
    let report = idn.validate();
    if !report.is_clean() {
        return Err(IlpError::InvalidInstance(InvalidInstance(report)));
    }
    let threshold = match threshold(rho, idn.len()) {
        Ok(t) => t,
        Err(SolveError::RhoOutOfRange(r)) => return Err(IlpError::RhoOutOfRange(r)),
        Err(_) => unreachable!("threshold only fails on rho range"),
    };

    let layout = Layout::new(idn);
    let n = layout.entities.len();
    let steps = t_f + 1;

    let mut variables = Vec::with_capacity((n + layout.auxes.len()) * steps);
    for base in &layout.base {
        for d in 0..steps {
            variables.push(Variable {
                name: format!("{base}_{d}"),
                kind: VarKind::Binary,
                time_index: d,
            });
        }
    }
    for aux in &layout.auxes {
        for d in 0..steps {
            variables.push(Variable {
                name: format!("{}_{d}", aux.base),
                kind: VarKind::Binary,
                time_index: d,
            });
        }
    }
    let evar = |i: usize, d: usize| i * steps + d;
    let cvar = |k: usize, d: usize| (n + k) * steps + d;
    let aux_of: HashMap<(usize, usize), usize> = layout
        .auxes
        .iter()
        .enumerate()
        .map(|(k, a)| ((a.owner, a.minterm), k))
        .collect();
    let pos: BTreeMap<&EntityId, usize> = layout
        .entities
        .iter()
        .enumerate()
        .map(|(i, e)| (e, i))
        .collect();

    let objective: Vec<Term> = (0..n).map(|i| Term { coef: 1, var: evar(i, 0) }).collect();

    let mut constraints = Vec::new();

    // Constraint set 1: a failed entity stays failed.
    for i in 0..n {
        for d in 1..steps {
            constraints.push(Constraint {
                name: format!("mono_{}_{d}", layout.base[i]),
                terms: vec![
                    Term { coef: 1, var: evar(i, d) },
                    Term { coef: -1, var: evar(i, d - 1) },
                ],
                sense: Sense::Ge,
                rhs: 0,
            });
        }
    }

    // Entities without a relation can only fail initially; without this they
    // would be free to fail at any step and fake the final count.
    for i in 0..n {
        if layout.has_idr[i] {
            continue;
        }
        for d in 1..steps {
            constraints.push(Constraint {
                name: format!("freeze_{}_{d}", layout.base[i]),
                terms: vec![
                    Term { coef: 1, var: evar(i, d) },
                    Term { coef: -1, var: evar(i, 0) },
                ],
                sense: Sense::Le,
                rhs: 0,
            });
        }
    }

    // Constraint set 2, single-minterm relations: the owner may be failed
    // at d only if it was already failed at d - 1 (it was attacked earlier)
    // or some member was failed at d - 1. Without the persistence term an
    // attacked entity whose own dependencies outlive it would be infeasible
    // under monotonicity.
    for idr in idn.idrs() {
        if idr.minterms.len() != 1 {
            continue;
        }
        let owner = pos[&idr.target];
        for d in 1..steps {
            let mut terms = vec![
                Term { coef: 1, var: evar(owner, d) },
                Term { coef: -1, var: evar(owner, d - 1) },
            ];
            for m in idr.minterms[0].members() {
                terms.push(Term { coef: -1, var: evar(pos[m], d - 1) });
            }
            constraints.push(Constraint {
                name: format!("step2_{}_{d}", layout.base[owner]),
                terms,
                sense: Sense::Le,
                rhs: 0,
            });
        }
    }

    // Constraint set 2, auxiliary variables: a minterm is hit at d only if
    // some member is failed at d (same step; see module docs).
    for (k, aux) in layout.auxes.iter().enumerate() {
        for d in 0..steps {
            let mut terms = vec![Term { coef: 1, var: cvar(k, d) }];
            for &m in &aux.members {
                terms.push(Term { coef: -1, var: evar(m, d) });
            }
            constraints.push(Constraint {
                name: format!("step2_{}_{d}", aux.base),
                terms,
                sense: Sense::Le,
                rhs: 0,
            });
        }
    }

    // Constraint set 2/3, multi-minterm relations: with N minterms, the
    // owner may fail at d only if all N representatives were 1 at d - 1.
    for idr in idn.idrs() {
        let count = idr.minterms.len();
        if count < 2 {
            continue;
        }
        let owner = pos[&idr.target];
        for d in 1..steps {
            let mut terms = vec![
                Term { coef: count as i64, var: evar(owner, d) },
                Term { coef: -(count as i64), var: evar(owner, d - 1) },
            ];
            for (mi, mt) in idr.minterms.iter().enumerate() {
                let rep = if mt.len() == 1 {
                    let member = mt.members().iter().next().expect("non-empty minterm");
                    evar(pos[member], d - 1)
                } else {
                    cvar(aux_of[&(owner, mi)], d - 1)
                };
                terms.push(Term { coef: -1, var: rep });
            }
            constraints.push(Constraint {
                name: format!("step3_{}_{d}", layout.base[owner]),
                terms,
                sense: Sense::Le,
                rhs: 0,
            });
        }
    }

    // Constraint set 3: enough entities failed at the horizon.
    constraints.push(Constraint {
        name: "threshold".to_string(),
        terms: (0..n).map(|i| Term { coef: 1, var: evar(i, t_f) }).collect(),
        sense: Sense::Ge,
        rhs: threshold as i64,
    });

    Ok(IlpModel {
        variables,
        objective,
        constraints,
        t_f,
        threshold,
    })
}

// ---------------------------------------------------------------------------
// Trace bridge and checking
// ---------------------------------------------------------------------------

/// Reads a cascade trace off as a variable assignment for the model built
/// from the same instance and horizon.
///
/// Entity variables are 1 from their failure time onward; an auxiliary
/// variable is 1 from the step its earliest-failing member fails.
pub fn trace_to_assignment(
    idn: &Idn,
    trace: &CascadeTrace,
    t_f: usize,
) -> Result<Assignment, IlpError> {
    if t_f < 1 {
        return Err(IlpError::TfTooSmall(t_f));
    }
    let steady = trace.steady_step();
    if t_f < steady {
        return Err(IlpError::TfBelowSteadyState { t_f, steady });
    }

    let layout = Layout::new(idn);
    let mut failure: Vec<Option<usize>> = Vec::with_capacity(layout.entities.len());
    for e in &layout.entities {
        let ft = trace
            .failure_time
            .get(e)
            .ok_or_else(|| IlpError::TraceMismatch(e.clone()))?;
        failure.push(ft.time());
    }

    let mut map = BTreeMap::new();
    for (i, base) in layout.base.iter().enumerate() {
        for d in 0..=t_f {
            let value = failure[i].is_some_and(|t| t <= d);
            map.insert(format!("{base}_{d}"), value);
        }
    }
    for aux in &layout.auxes {
        let hit = aux.members.iter().filter_map(|&m| failure[m]).min();
        for d in 0..=t_f {
            let value = hit.is_some_and(|t| t <= d);
            map.insert(format!("{}_{d}", aux.base), value);
        }
    }
    Ok(Assignment(map))
}

/// One failed constraint, with the left-hand side that was observed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintViolation {
    pub name: String,
    pub lhs: i64,
    pub sense: Sense,
    pub rhs: i64,
}

impl fmt::Display for ConstraintViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "constraint {}: {} {} {} violated",
            self.name, self.lhs, self.sense, self.rhs
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub feasible: bool,
    /// Objective value of the assignment (failures at step 0).
    pub objective: i64,
    pub violations: Vec<ConstraintViolation>,
}

/// Evaluates every constraint of the model under the assignment.
pub fn check_assignment(model: &IlpModel, asg: &Assignment) -> Result<CheckReport, IlpError> {
    let mut values = Vec::with_capacity(model.variables.len());
    for v in &model.variables {
        let val = asg
            .get(&v.name)
            .ok_or_else(|| IlpError::MissingVariable(v.name.clone()))?;
        values.push(i64::from(val));
    }

    let eval = |terms: &[Term]| -> i64 { terms.iter().map(|t| t.coef * values[t.var]).sum() };

    let objective = eval(&model.objective);
    let mut violations = Vec::new();
    for c in &model.constraints {
        let lhs = eval(&c.terms);
        let ok = match c.sense {
            Sense::Le => lhs <= c.rhs,
            Sense::Ge => lhs >= c.rhs,
            Sense::Eq => lhs == c.rhs,
        };
        if !ok {
            violations.push(ConstraintViolation {
                name: c.name.clone(),
                lhs,
                sense: c.sense,
                rhs: c.rhs,
            });
        }
    }

    Ok(CheckReport {
        feasible: violations.is_empty(),
        objective,
        violations,
    })
}

// ---------------------------------------------------------------------------
// LP file format
// ---------------------------------------------------------------------------

const WRAP_WIDTH: usize = 72;

fn expr_tokens(model: &IlpModel, terms: &[Term]) -> Vec<String> {
    let mut toks = Vec::new();
    for (i, t) in terms.iter().enumerate() {
        if t.coef < 0 {
            toks.push("-".to_string());
        } else if i > 0 {
            toks.push("+".to_string());
        }
        let mag = t.coef.abs();
        if mag != 1 {
            toks.push(mag.to_string());
        }
        toks.push(model.variables[t.var].name.clone());
    }
    toks
}

fn push_wrapped(out: &mut String, head: &str, tokens: &[String]) {
    let mut width = head.len();
    out.push_str(head);
    for (i, tok) in tokens.iter().enumerate() {
        if i > 0 && width + 1 + tok.len() > WRAP_WIDTH {
            out.push_str("\n   ");
            width = 3;
        } else if i > 0 {
            out.push(' ');
            width += 1;
        }
        out.push_str(tok);
        width += tok.len();
    }
    out.push('\n');
}

/// Writes the model in the standard LP file format. Output is deterministic
/// and byte-identical for equal models.
pub fn export_lp(model: &IlpModel) -> String {
    let mut out = String::new();
    out.push_str("Minimize\n");
    push_wrapped(&mut out, " obj: ", &expr_tokens(model, &model.objective));
    out.push_str("Subject To\n");
    for c in &model.constraints {
        let mut toks = expr_tokens(model, &c.terms);
        toks.push(c.sense.to_string());
        toks.push(c.rhs.to_string());
        push_wrapped(&mut out, &format!(" {}: ", c.name), &toks);
    }
    out.push_str("Binary\n");
    for v in &model.variables {
        out.push(' ');
        out.push_str(&v.name);
        out.push('\n');
    }
    out.push_str("End\n");
    out
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct LpParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> LpParseError {
    LpParseError {
        line,
        message: message.into(),
    }
}

/// Parses LP files produced by [`export_lp`] back into a model.
///
/// Supports the Minimize / Subject To / Binary / End sections with integer
/// coefficients, which is exactly what the exporter emits.
pub fn parse_lp(text: &str) -> Result<IlpModel, LpParseError> {
    #[derive(PartialEq)]
    enum Sec {
        Preamble,
        Objective,
        Constraints,
        Binary,
        Done,
    }

    struct Row {
        label: String,
        tokens: Vec<String>,
        line: usize,
    }

    let mut sec = Sec::Preamble;
    let mut objective_rows: Vec<Row> = Vec::new();
    let mut constraint_rows: Vec<Row> = Vec::new();
    let mut binary_names: Vec<(String, usize)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('\\') {
            continue;
        }
        let lowered = line.to_ascii_lowercase();
        let keyword = match lowered.as_str() {
            "minimize" | "min" => Some(Sec::Objective),
            "subject to" | "st" | "s.t." | "such that" => Some(Sec::Constraints),
            "binary" | "binaries" | "bin" => Some(Sec::Binary),
            "end" => Some(Sec::Done),
            "maximize" | "max" => {
                return Err(err(lineno, "only minimization models are supported"))
            }
            "bounds" | "general" | "generals" => {
                return Err(err(lineno, format!("unsupported section {line:?}")))
            }
            _ => None,
        };
        if let Some(next) = keyword {
            sec = next;
            continue;
        }
        match sec {
            Sec::Preamble => return Err(err(lineno, "expected a section keyword")),
            Sec::Done => return Err(err(lineno, "content after End")),
            Sec::Binary => {
                for tok in line.split_whitespace() {
                    binary_names.push((tok.to_string(), lineno));
                }
            }
            Sec::Objective | Sec::Constraints => {
                let rows = if sec == Sec::Objective {
                    &mut objective_rows
                } else {
                    &mut constraint_rows
                };
                let mut tokens = line.split_whitespace().peekable();
                let starts_row = tokens.peek().is_some_and(|t| t.ends_with(':'));
                if starts_row {
                    let label = tokens.next().expect("peeked").trim_end_matches(':').to_string();
                    rows.push(Row {
                        label,
                        tokens: tokens.map(str::to_string).collect(),
                        line: lineno,
                    });
                } else if let Some(row) = rows.last_mut() {
                    row.tokens.extend(tokens.map(str::to_string));
                } else {
                    return Err(err(lineno, "expression before any row label"));
                }
            }
        }
    }

    let mut variables = Vec::with_capacity(binary_names.len());
    let mut index: HashMap<String, usize> = HashMap::with_capacity(binary_names.len());
    for (name, lineno) in binary_names {
        let time_index: usize = name
            .rsplit('_')
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                err(lineno, format!("variable {name:?} lacks a _<step> suffix"))
            })?;
        if index.insert(name.clone(), variables.len()).is_some() {
            return Err(err(lineno, format!("duplicate variable {name:?}")));
        }
        variables.push(Variable {
            name,
            kind: VarKind::Binary,
            time_index,
        });
    }

    type ExprTail = Option<(Sense, i64)>;
    let parse_expr = |tokens: &[String],
                      lineno: usize,
                      with_sense: bool|
     -> Result<(Vec<Term>, ExprTail), LpParseError> {
        let mut terms = Vec::new();
        let mut sign = 1i64;
        let mut pending: Option<i64> = None;
        let mut tail: Option<(Sense, i64)> = None;
        let mut it = tokens.iter().peekable();
        while let Some(tok) = it.next() {
            match tok.as_str() {
                "+" => sign = 1,
                "-" => sign = -1,
                "<=" | "=<" => {
                    let rhs = it
                        .next()
                        .ok_or_else(|| err(lineno, "missing right-hand side"))?;
                    tail = Some((
                        Sense::Le,
                        rhs.parse().map_err(|_| err(lineno, "bad right-hand side"))?,
                    ));
                    break;
                }
                ">=" | "=>" => {
                    let rhs = it
                        .next()
                        .ok_or_else(|| err(lineno, "missing right-hand side"))?;
                    tail = Some((
                        Sense::Ge,
                        rhs.parse().map_err(|_| err(lineno, "bad right-hand side"))?,
                    ));
                    break;
                }
                "=" => {
                    let rhs = it
                        .next()
                        .ok_or_else(|| err(lineno, "missing right-hand side"))?;
                    tail = Some((
                        Sense::Eq,
                        rhs.parse().map_err(|_| err(lineno, "bad right-hand side"))?,
                    ));
                    break;
                }
                t => {
                    if let Ok(mag) = t.parse::<i64>() {
                        if pending.is_some() {
                            return Err(err(lineno, "two numbers in a row"));
                        }
                        pending = Some(mag);
                    } else {
                        let var = *index
                            .get(t)
                            .ok_or_else(|| err(lineno, format!("unknown variable {t:?}")))?;
                        let coef = sign * pending.take().unwrap_or(1);
                        terms.push(Term { coef, var });
                        sign = 1;
                    }
                }
            }
        }
        if it.next().is_some() {
            return Err(err(lineno, "trailing tokens after right-hand side"));
        }
        if pending.is_some() {
            return Err(err(lineno, "dangling coefficient"));
        }
        if with_sense && tail.is_none() {
            return Err(err(lineno, "constraint lacks a comparison"));
        }
        Ok((terms, tail))
    };

    if objective_rows.len() != 1 {
        return Err(err(1, "expected exactly one objective row"));
    }
    let (objective, _) = parse_expr(&objective_rows[0].tokens, objective_rows[0].line, false)?;

    let mut constraints = Vec::with_capacity(constraint_rows.len());
    let mut threshold = 0usize;
    for row in &constraint_rows {
        let (terms, tail) = parse_expr(&row.tokens, row.line, true)?;
        let (sense, rhs) = tail.expect("checked by parse_expr");
        if row.label == "threshold" && rhs >= 0 {
            threshold = rhs as usize;
        }
        constraints.push(Constraint {
            name: row.label.clone(),
            terms,
            sense,
            rhs,
        });
    }

    let t_f = variables.iter().map(|v| v.time_index).max().unwrap_or(0);
    Ok(IlpModel {
        variables,
        objective,
        constraints,
        t_f,
        threshold,
    })
}
