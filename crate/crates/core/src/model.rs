//! Domain types for interdependent-network instances.
//!
//! An instance couples two entity sets, side `A` (power) and side `B`
//! (communication), with at most one dependency relation per entity. A
//! relation ([`Idr`]) lists one or more [`Minterm`]s; the target stays
//! operational as long as at least one minterm has all members operational.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Which network an entity belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    /// Power network.
    A,
    /// Communication network.
    B,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::A => write!(f, "A"),
            Side::B => write!(f, "B"),
        }
    }
}

/// A named entity on one side of the instance.
///
/// Ordering is `(side, name)` with side `A` before `B`; this is the ordering
/// used everywhere a deterministic tie-break is needed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId {
    pub side: Side,
    pub name: String,
}

impl EntityId {
    pub fn new(side: Side, name: impl Into<String>) -> Self {
        EntityId {
            side,
            name: name.into(),
        }
    }

    pub fn a(name: impl Into<String>) -> Self {
        EntityId::new(Side::A, name)
    }

    pub fn b(name: impl Into<String>) -> Self {
        EntityId::new(Side::B, name)
    }

    /// Side-qualified form, e.g. `A.x`. Used where a bare name would be
    /// ambiguous because both sides declare it.
    pub fn qualified(&self) -> String {
        format!("{}.{}", self.side, self.name)
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// A conjunction of entities inside an [`Idr`]: the minterm is live iff all
/// members are operational, and hit once any member has failed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Minterm {
    members: BTreeSet<EntityId>,
}

impl Minterm {
    /// Builds a minterm from members; duplicates collapse (set semantics).
    pub fn new(members: impl IntoIterator<Item = EntityId>) -> Self {
        Minterm {
            members: members.into_iter().collect(),
        }
    }

    pub fn members(&self) -> &BTreeSet<EntityId> {
        &self.members
    }

    pub fn contains(&self, e: &EntityId) -> bool {
        self.members.contains(e)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

impl fmt::Display for Minterm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for m in &self.members {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{m}")?;
            first = false;
        }
        Ok(())
    }
}

/// One dependency relation: `target <- minterm_0 + minterm_1 + ...`.
///
/// The target is operational iff some minterm is live; equivalently it fails
/// once every minterm contains a failed member. Minterm order is preserved
/// because minterms are referred to by position (see `cascade::MintermRef`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Idr {
    pub target: EntityId,
    pub minterms: Vec<Minterm>,
}

impl Idr {
    pub fn new(target: EntityId, minterms: Vec<Minterm>) -> Self {
        Idr { target, minterms }
    }
}

impl fmt::Display for Idr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <-", self.target)?;
        for (i, mt) in self.minterms.iter().enumerate() {
            if i > 0 {
                write!(f, " +")?;
            }
            write!(f, " {mt}")?;
        }
        Ok(())
    }
}

/// A full interdependent-network instance.
///
/// Entities keep their declaration order (trace exports list rows in that
/// order); equality is structural and ignores declaration order. Entities
/// without a relation are legal: they never fail by induced failure.
#[derive(Debug, Clone)]
pub struct Idn {
    entities_a: Vec<EntityId>,
    entities_b: Vec<EntityId>,
    idrs: Vec<Idr>,
}

impl Idn {
    pub fn new(entities_a: Vec<EntityId>, entities_b: Vec<EntityId>, idrs: Vec<Idr>) -> Self {
        Idn {
            entities_a,
            entities_b,
            idrs,
        }
    }

    pub fn entities_a(&self) -> &[EntityId] {
        &self.entities_a
    }

    pub fn entities_b(&self) -> &[EntityId] {
        &self.entities_b
    }

    /// All entities in declaration order, side A first.
    pub fn entities(&self) -> impl Iterator<Item = &EntityId> {
        self.entities_a.iter().chain(self.entities_b.iter())
    }

    /// Total entity count `|A| + |B|`.
    pub fn len(&self) -> usize {
        self.entities_a.len() + self.entities_b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, e: &EntityId) -> bool {
        match e.side {
            Side::A => self.entities_a.contains(e),
            Side::B => self.entities_b.contains(e),
        }
    }

    pub fn idrs(&self) -> &[Idr] {
        &self.idrs
    }

    pub fn idr_of(&self, e: &EntityId) -> Option<&Idr> {
        self.idrs.iter().find(|idr| idr.target == *e)
    }

    /// Structural validation; an empty report means every invariant holds.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();

        let mut seen: BTreeSet<&EntityId> = BTreeSet::new();
        for e in self.entities() {
            if !valid_name(&e.name) {
                report.violations.push(Violation::BadName {
                    entity: e.clone(),
                });
            }
            if !seen.insert(e) {
                report.violations.push(Violation::DuplicateEntity {
                    entity: e.clone(),
                });
            }
        }

        let mut targets: BTreeSet<&EntityId> = BTreeSet::new();
        for idr in &self.idrs {
            let t = &idr.target;
            if !self.contains(t) {
                report.violations.push(Violation::UnknownEntity {
                    entity: t.clone(),
                    context: format!("relation target {t}"),
                });
            }
            if !targets.insert(t) {
                report.violations.push(Violation::DuplicateTarget {
                    entity: t.clone(),
                });
            }
            if idr.minterms.is_empty() {
                report.violations.push(Violation::EmptyRelation {
                    entity: t.clone(),
                });
            }
            let mut minterm_seen: BTreeSet<&Minterm> = BTreeSet::new();
            for (idx, mt) in idr.minterms.iter().enumerate() {
                if mt.is_empty() {
                    report.violations.push(Violation::EmptyMinterm {
                        entity: t.clone(),
                        index: idx,
                    });
                }
                if !minterm_seen.insert(mt) {
                    report.violations.push(Violation::DuplicateMinterm {
                        entity: t.clone(),
                        minterm: mt.clone(),
                    });
                }
                for member in mt.members() {
                    if member == t {
                        report.violations.push(Violation::SelfDependency {
                            entity: t.clone(),
                        });
                    }
                    if !self.contains(member) {
                        report.violations.push(Violation::UnknownEntity {
                            entity: member.clone(),
                            context: format!("minterm {idx} of {t}"),
                        });
                    } else if member.side == t.side && member != t {
                        report.notes.push(ValidationNote::SameSideReference {
                            target: t.clone(),
                            member: member.clone(),
                        });
                    }
                }
            }
        }

        report
    }

    /// Classifies the relations into the four dependency shapes.
    ///
    /// The most specific class wins: a single size-one minterm everywhere is
    /// `CaseI` even though the `CaseII` and `CaseIII` conditions also hold.
    /// Entities without a relation do not affect the outcome.
    pub fn classify(&self) -> Result<CaseClass, InvalidInstance> {
        let report = self.validate();
        if !report.is_clean() {
            return Err(InvalidInstance(report));
        }
        let single_minterm = self.idrs.iter().all(|idr| idr.minterms.len() == 1);
        let size_one = self
            .idrs
            .iter()
            .all(|idr| idr.minterms.iter().all(|mt| mt.len() == 1));
        Ok(match (single_minterm, size_one) {
            (true, true) => CaseClass::CaseI,
            (true, false) => CaseClass::CaseII,
            (false, true) => CaseClass::CaseIII,
            (false, false) => CaseClass::CaseIV,
        })
    }

    /// Relation map keyed by target; callers needing repeated lookups should
    /// build this once instead of calling [`Idn::idr_of`] in a loop.
    pub fn idr_map(&self) -> BTreeMap<&EntityId, &Idr> {
        self.idrs.iter().map(|idr| (&idr.target, idr)).collect()
    }
}

/// Structural equality: entity sets and the target -> minterm-list map.
/// Declaration order is presentation, not structure, so canonical
/// serialization round-trips compare equal.
impl PartialEq for Idn {
    fn eq(&self, other: &Self) -> bool {
        let set = |v: &[EntityId]| v.iter().cloned().collect::<BTreeSet<_>>();
        set(&self.entities_a) == set(&other.entities_a)
            && set(&self.entities_b) == set(&other.entities_b)
            && self.idr_map_owned() == other.idr_map_owned()
    }
}

impl Eq for Idn {}

impl Idn {
    fn idr_map_owned(&self) -> BTreeMap<EntityId, Vec<Minterm>> {
        self.idrs
            .iter()
            .map(|idr| (idr.target.clone(), idr.minterms.clone()))
            .collect()
    }
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// The four relation shapes in increasing generality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CaseClass {
    /// Every relation is a single minterm of size one.
    CaseI,
    /// Every relation is a single minterm of arbitrary size.
    CaseII,
    /// Minterms all have size one, any number per relation.
    CaseIII,
    /// Arbitrary minterms of arbitrary size.
    CaseIV,
}

impl fmt::Display for CaseClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseClass::CaseI => write!(f, "CaseI"),
            CaseClass::CaseII => write!(f, "CaseII"),
            CaseClass::CaseIII => write!(f, "CaseIII"),
            CaseClass::CaseIV => write!(f, "CaseIV"),
        }
    }
}

/// A single invariant violation found by [`Idn::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    BadName { entity: EntityId },
    DuplicateEntity { entity: EntityId },
    DuplicateTarget { entity: EntityId },
    UnknownEntity { entity: EntityId, context: String },
    SelfDependency { entity: EntityId },
    EmptyRelation { entity: EntityId },
    EmptyMinterm { entity: EntityId, index: usize },
    DuplicateMinterm { entity: EntityId, minterm: Minterm },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BadName { entity } => write!(
                f,
                "invalid entity name {:?} on side {} (letters, digits, underscore only)",
                entity.name, entity.side
            ),
            Violation::DuplicateEntity { entity } => {
                write!(f, "entity {} declared twice on side {}", entity, entity.side)
            }
            Violation::DuplicateTarget { entity } => {
                write!(f, "more than one relation for {entity}")
            }
            Violation::UnknownEntity { entity, context } => {
                write!(f, "unknown entity {entity} in {context}")
            }
            Violation::SelfDependency { entity } => {
                write!(f, "self-dependency at {entity}")
            }
            Violation::EmptyRelation { entity } => {
                write!(f, "relation for {entity} has no minterms")
            }
            Violation::EmptyMinterm { entity, index } => {
                write!(f, "minterm {index} of {entity} is empty")
            }
            Violation::DuplicateMinterm { entity, minterm } => {
                write!(f, "duplicate minterm \"{minterm}\" in relation for {entity}")
            }
        }
    }
}

/// Informational observation that does not invalidate the instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationNote {
    /// A relation references an entity on its own side. Legal, but the usual
    /// instances are strictly cross-network.
    SameSideReference { target: EntityId, member: EntityId },
}

impl fmt::Display for ValidationNote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationNote::SameSideReference { target, member } => write!(
                f,
                "relation for {target} references same-side entity {member}"
            ),
        }
    }
}

/// Everything [`Idn::validate`] found: hard violations plus notes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub notes: Vec<ValidationNote>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "violation: {v}")?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

/// Error carrying the validation report of a rejected instance.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("invalid instance:\n{0}")]
pub struct InvalidInstance(pub ValidationReport);
