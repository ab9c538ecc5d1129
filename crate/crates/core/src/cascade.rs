//! Synchronous cascade simulation and the quantities derived from it.
//!
//! Failure spreads in unit time steps: an entity with a relation fails at
//! step `t + 1` once every minterm of its relation contains some entity
//! already failed at step `t`. Failed entities stay failed, so the process
//! reaches a fixpoint within `|A| + |B|` steps.
//!
//! Two routes are provided on purpose: [`step`] evaluates the rule directly
//! from the definition, while [`cascade`] runs an event-driven engine over an
//! indexed form of the instance. The test suite cross-checks them.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::model::{EntityId, Idn};

/// When an entity first failed, if ever.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureTime {
    At(usize),
    Never,
}

impl FailureTime {
    pub fn is_failed(&self) -> bool {
        matches!(self, FailureTime::At(_))
    }

    pub fn time(&self) -> Option<usize> {
        match self {
            FailureTime::At(t) => Some(*t),
            FailureTime::Never => None,
        }
    }
}

impl fmt::Display for FailureTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureTime::At(t) => write!(f, "{t}"),
            FailureTime::Never => write!(f, "never"),
        }
    }
}

/// Full record of one cascade run.
///
/// `steps[t]` is the failed set after step `t`; the list always ends with
/// two equal sets, the second confirming that the fixpoint was reached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CascadeTrace {
    entities: Vec<EntityId>,
    pub initial: BTreeSet<EntityId>,
    pub failure_time: BTreeMap<EntityId, FailureTime>,
    pub steps: Vec<BTreeSet<EntityId>>,
}

impl CascadeTrace {
    /// All entities of the instance in declaration order (the row order used
    /// by the CSV export).
    pub fn entities(&self) -> &[EntityId] {
        &self.entities
    }

    /// First step at which the failed set stopped growing.
    pub fn steady_step(&self) -> usize {
        self.steps.len() - 2
    }

    pub fn final_failed(&self) -> &BTreeSet<EntityId> {
        self.steps.last().expect("trace has at least two steps")
    }
}

/// Identifies one minterm by its owner and position in the owner's relation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MintermRef {
    pub owner: EntityId,
    pub index: usize,
}

impl fmt::Display for MintermRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "minterm {} of {}", self.index, self.owner)
    }
}

/// An entity referenced by the caller is not declared in the instance.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("unknown entity {0}")]
pub struct UnknownEntity(pub EntityId);

/// One synchronous step: everything already failed, plus every entity whose
/// relation has all minterms hit by the current failed set.
///
/// Entities without a relation are carried through unchanged.
pub fn step(idn: &Idn, failed: &BTreeSet<EntityId>) -> Result<BTreeSet<EntityId>, UnknownEntity> {
    for e in failed {
        if !idn.contains(e) {
            return Err(UnknownEntity(e.clone()));
        }
    }
    let mut next = failed.clone();
    for idr in idn.idrs() {
        if failed.contains(&idr.target) || idr.minterms.is_empty() {
            continue;
        }
        let all_hit = idr
            .minterms
            .iter()
            .all(|mt| mt.members().iter().any(|m| failed.contains(m)));
        if all_hit {
            next.insert(idr.target.clone());
        }
    }
    Ok(next)
}

/// Runs the cascade from `initial` to its fixpoint and records the full
/// step-by-step trace and per-entity failure times.
pub fn cascade(idn: &Idn, initial: &BTreeSet<EntityId>) -> Result<CascadeTrace, UnknownEntity> {
    let ix = IdnIndex::new(idn);
    let seeds = ix.resolve_set(initial)?;
    let closure = ix.closure(&seeds);

    let mut failure_time = BTreeMap::new();
    for (i, id) in ix.ids.iter().enumerate() {
        let ft = match closure.times[i] {
            Some(t) => FailureTime::At(t as usize),
            None => FailureTime::Never,
        };
        failure_time.insert(id.clone(), ft);
    }

    let max_t = closure.max_time as usize;
    let mut steps: Vec<BTreeSet<EntityId>> = vec![BTreeSet::new(); max_t + 1];
    for (i, id) in ix.ids.iter().enumerate() {
        if let Some(t) = closure.times[i] {
            for s in steps.iter_mut().skip(t as usize) {
                s.insert(id.clone());
            }
        }
    }
    // Confirming step: the fixpoint repeated once.
    steps.push(steps.last().cloned().unwrap_or_default());

    Ok(CascadeTrace {
        entities: ix.ids.clone(),
        initial: initial.clone(),
        failure_time,
        steps,
    })
}

/// The entities failed when `e` alone fails initially. Always contains `e`.
pub fn kill_set(idn: &Idn, e: &EntityId) -> Result<BTreeSet<EntityId>, UnknownEntity> {
    let ix = IdnIndex::new(idn);
    let seed = ix.resolve(e)?;
    Ok(ix.to_id_set(ix.closure(&[seed]).failed_indices()))
}

/// Kill set of every entity.
pub fn kill_sets_all(idn: &Idn) -> BTreeMap<EntityId, BTreeSet<EntityId>> {
    let ix = IdnIndex::new(idn);
    let mut out = BTreeMap::new();
    for i in 0..ix.len() {
        let members = ix.to_id_set(ix.closure(&[i as u32]).failed_indices());
        out.insert(ix.ids[i].clone(), members);
    }
    out
}

/// Minterm hit set: every minterm of the instance containing `e`.
pub fn mhs(idn: &Idn, e: &EntityId) -> Result<BTreeSet<MintermRef>, UnknownEntity> {
    if !idn.contains(e) {
        return Err(UnknownEntity(e.clone()));
    }
    let mut out = BTreeSet::new();
    for idr in idn.idrs() {
        for (index, mt) in idr.minterms.iter().enumerate() {
            if mt.contains(e) {
                out.insert(MintermRef {
                    owner: idr.target.clone(),
                    index,
                });
            }
        }
    }
    Ok(out)
}

/// Total minterm hit set: every minterm containing some member of the kill
/// set of `e`.
pub fn tmhs(idn: &Idn, e: &EntityId) -> Result<BTreeSet<MintermRef>, UnknownEntity> {
    let killed = kill_set(idn, e)?;
    let mut out = BTreeSet::new();
    for idr in idn.idrs() {
        for (index, mt) in idr.minterms.iter().enumerate() {
            if mt.members().iter().any(|m| killed.contains(m)) {
                out.insert(MintermRef {
                    owner: idr.target.clone(),
                    index,
                });
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Indexed instance and the event-driven engine
// ---------------------------------------------------------------------------

/// Index-based view of an instance used by the cascade engine and solvers.
///
/// Entities are numbered in declaration order (side A first). Undeclared
/// minterm members are dropped while indexing: an undeclared entity can never
/// be part of a failed set, so it can never hit a minterm.
pub(crate) struct IdnIndex {
    pub ids: Vec<EntityId>,
    lookup: HashMap<EntityId, u32>,
    /// Entity indices sorted by `(side, name)`; position = lexicographic rank.
    pub lex_order: Vec<u32>,
    /// Per entity: minterms of its relation as member-index lists. Empty when
    /// the entity has no relation.
    pub minterms: Vec<Vec<Vec<u32>>>,
    /// member index -> (owner index, minterm position)
    occurrences: Vec<Vec<(u32, u32)>>,
    /// Flat slot offset of each entity's minterm flags.
    slot_offset: Vec<u32>,
    total_slots: usize,
}

pub(crate) struct Closure {
    /// Per entity: failure time, `None` if operational at the fixpoint.
    pub times: Vec<Option<u32>>,
    pub count: usize,
    pub max_time: u32,
}

impl Closure {
    pub fn failed(&self, i: u32) -> bool {
        self.times[i as usize].is_some()
    }

    pub fn failed_indices(&self) -> impl Iterator<Item = u32> + '_ {
        self.times
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.map(|_| i as u32))
    }
}

impl IdnIndex {
    pub fn new(idn: &Idn) -> Self {
        let ids: Vec<EntityId> = idn.entities().cloned().collect();
        let mut lookup = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            // First declaration wins on (invalid) duplicate declarations.
            lookup.entry(id.clone()).or_insert(i as u32);
        }

        let mut lex_order: Vec<u32> = (0..ids.len() as u32).collect();
        lex_order.sort_by(|&x, &y| ids[x as usize].cmp(&ids[y as usize]));

        let mut minterms: Vec<Vec<Vec<u32>>> = vec![Vec::new(); ids.len()];
        for idr in idn.idrs() {
            let Some(&owner) = lookup.get(&idr.target) else {
                continue;
            };
            if !minterms[owner as usize].is_empty() {
                continue; // at most one relation per entity; first wins
            }
            minterms[owner as usize] = idr
                .minterms
                .iter()
                .map(|mt| {
                    mt.members()
                        .iter()
                        .filter_map(|m| lookup.get(m).copied())
                        .collect()
                })
                .collect();
        }

        let mut occurrences: Vec<Vec<(u32, u32)>> = vec![Vec::new(); ids.len()];
        let mut slot_offset = vec![0u32; ids.len()];
        let mut total_slots = 0usize;
        for (owner, mts) in minterms.iter().enumerate() {
            slot_offset[owner] = total_slots as u32;
            for (pos, members) in mts.iter().enumerate() {
                for &m in members {
                    occurrences[m as usize].push((owner as u32, pos as u32));
                }
            }
            total_slots += mts.len();
        }

        IdnIndex {
            ids,
            lookup,
            lex_order,
            minterms,
            occurrences,
            slot_offset,
            total_slots,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn resolve(&self, e: &EntityId) -> Result<u32, UnknownEntity> {
        self.lookup
            .get(e)
            .copied()
            .ok_or_else(|| UnknownEntity(e.clone()))
    }

    pub fn resolve_set(&self, set: &BTreeSet<EntityId>) -> Result<Vec<u32>, UnknownEntity> {
        set.iter().map(|e| self.resolve(e)).collect()
    }

    pub fn to_id_set(&self, indices: impl IntoIterator<Item = u32>) -> BTreeSet<EntityId> {
        indices
            .into_iter()
            .map(|i| self.ids[i as usize].clone())
            .collect()
    }

    /// Event-driven fixpoint with synchronous timing.
    ///
    /// An entity's failure time is one past the step at which its last
    /// unhit minterm became hit; seeds fail at step 0. Cost is linear in the
    /// instance size per call.
    pub fn closure(&self, seeds: &[u32]) -> Closure {
        let n = self.len();
        let mut times: Vec<Option<u32>> = vec![None; n];
        let mut hit = vec![false; self.total_slots];
        let mut unhit: Vec<u32> = self.minterms.iter().map(|m| m.len() as u32).collect();

        let mut frontier: Vec<u32> = Vec::with_capacity(seeds.len());
        for &s in seeds {
            if times[s as usize].is_none() {
                times[s as usize] = Some(0);
                frontier.push(s);
            }
        }

        let mut count = frontier.len();
        let mut max_time = 0u32;
        let mut t = 0u32;
        let mut next: Vec<u32> = Vec::new();
        while !frontier.is_empty() {
            next.clear();
            for &e in &frontier {
                for &(owner, pos) in &self.occurrences[e as usize] {
                    let slot = (self.slot_offset[owner as usize] + pos) as usize;
                    if hit[slot] {
                        continue;
                    }
                    hit[slot] = true;
                    unhit[owner as usize] -= 1;
                    if unhit[owner as usize] == 0
                        && !self.minterms[owner as usize].is_empty()
                        && times[owner as usize].is_none()
                    {
                        times[owner as usize] = Some(t + 1);
                        next.push(owner);
                    }
                }
            }
            if !next.is_empty() {
                max_time = t + 1;
                count += next.len();
            }
            std::mem::swap(&mut frontier, &mut next);
            t += 1;
        }

        Closure {
            times,
            count,
            max_time,
        }
    }

    /// Closure reached from `base` plus one extra seed; used for residual
    /// kill sets where `base` is the already-failed set.
    pub fn closure_with(&self, base: &[u32], extra: u32) -> Closure {
        let mut seeds = Vec::with_capacity(base.len() + 1);
        seeds.extend_from_slice(base);
        seeds.push(extra);
        self.closure(&seeds)
    }
}
