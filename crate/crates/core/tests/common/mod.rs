//! Shared fixtures and independent oracles for the integration tests.
//!
//! The oracles deliberately avoid the library's indexed cascade engine and
//! pruned search: closures are computed by iterating the definitional
//! `step`, and the exact oracle enumerates every subset.

#![allow(dead_code)]

use std::collections::BTreeSet;

use ridn::cascade::step;
use ridn::ingest::parse_idn;
use ridn::model::{EntityId, Idn};
use ridn::solvers::threshold;

pub const SAMPLE7_TEXT: &str = "\
# idn-format 1
A: a1 a2 a3
B: b1 b2 b3 b4
a1 <- b2 + b4
a2 <- b1 b3
a3 <- b3 + b1 b4
b1 <- a1 + a2
b2 <- a1 a2 a3
b3 <- a1 + a2 a3
b4 <- a2
";

pub fn sample7() -> Idn {
    parse_idn(SAMPLE7_TEXT).expect("fixture parses").idn
}

pub fn a(name: &str) -> EntityId {
    EntityId::a(name)
}

pub fn b(name: &str) -> EntityId {
    EntityId::b(name)
}

/// Fixpoint of the definitional step rule.
pub fn naive_final(idn: &Idn, initial: &BTreeSet<EntityId>) -> BTreeSet<EntityId> {
    let mut cur = initial.clone();
    loop {
        let next = step(idn, &cur).expect("known entities");
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

/// Visits every size-`s` subset of `items` until `f` returns true; returns
/// the first hit.
fn any_combination<T: Clone>(
    items: &[T],
    s: usize,
    f: &mut impl FnMut(&[T]) -> bool,
) -> Option<Vec<T>> {
    fn rec<T: Clone>(
        items: &[T],
        start: usize,
        chosen: &mut Vec<T>,
        s: usize,
        f: &mut impl FnMut(&[T]) -> bool,
    ) -> bool {
        if chosen.len() == s {
            return f(chosen);
        }
        let need = s - chosen.len();
        for i in start..=items.len().saturating_sub(need) {
            chosen.push(items[i].clone());
            if rec(items, i + 1, chosen, s, f) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let mut chosen = Vec::with_capacity(s);
    rec(items, 0, &mut chosen, s, f).then_some(chosen)
}

/// Unpruned exact robustness parameter: smallest witness size minus one, by
/// exhaustive enumeration over the definitional cascade. Exponential; keep
/// instances near a dozen entities.
pub fn oracle_exact_k(idn: &Idn, rho: f64) -> usize {
    let thr = threshold(rho, idn.len()).expect("valid rho");
    let entities: Vec<EntityId> = idn.entities().cloned().collect();
    for s in 1..=thr {
        let hit = any_combination(&entities, s, &mut |chosen: &[EntityId]| {
            let initial: BTreeSet<EntityId> = chosen.iter().cloned().collect();
            naive_final(idn, &initial).len() >= thr
        });
        if hit.is_some() {
            return s - 1;
        }
    }
    unreachable!("failing `threshold` entities directly always suffices");
}

/// Laminarity check: every pair of kill sets is disjoint or nested.
pub fn kill_sets_laminar(idn: &Idn) -> bool {
    let sets: Vec<BTreeSet<EntityId>> = ridn::cascade::kill_sets_all(idn).into_values().collect();
    for (i, x) in sets.iter().enumerate() {
        for y in &sets[i + 1..] {
            let inter = x.intersection(y).count();
            if inter != 0 && inter != x.len() && inter != y.len() {
                return false;
            }
        }
    }
    true
}
