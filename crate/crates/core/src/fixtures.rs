//! Shared instances for unit tests.

use crate::model::{EntityId, Idn, Idr, Minterm};

pub(crate) fn a(name: &str) -> EntityId {
    EntityId::a(name)
}

pub(crate) fn b(name: &str) -> EntityId {
    EntityId::b(name)
}

pub(crate) fn mt(members: &[EntityId]) -> Minterm {
    Minterm::new(members.iter().cloned())
}

/// The seven-entity sample instance used throughout the tests:
/// a1 <- b2 + b4; a2 <- b1 b3; a3 <- b3 + b1 b4;
/// b1 <- a1 + a2; b2 <- a1 a2 a3; b3 <- a1 + a2 a3; b4 <- a2.
pub(crate) fn sample7() -> Idn {
    let ea: Vec<_> = ["a1", "a2", "a3"].iter().map(|n| a(n)).collect();
    let eb: Vec<_> = ["b1", "b2", "b3", "b4"].iter().map(|n| b(n)).collect();
    let idrs = vec![
        Idr::new(a("a1"), vec![mt(&[b("b2")]), mt(&[b("b4")])]),
        Idr::new(a("a2"), vec![mt(&[b("b1"), b("b3")])]),
        Idr::new(a("a3"), vec![mt(&[b("b3")]), mt(&[b("b1"), b("b4")])]),
        Idr::new(b("b1"), vec![mt(&[a("a1")]), mt(&[a("a2")])]),
        Idr::new(b("b2"), vec![mt(&[a("a1"), a("a2"), a("a3")])]),
        Idr::new(b("b3"), vec![mt(&[a("a1")]), mt(&[a("a2"), a("a3")])]),
        Idr::new(b("b4"), vec![mt(&[a("a2")])]),
    ];
    Idn::new(ea, eb, idrs)
}

/// Two-link chain a1 <- b1 <- a2 with an isolated b2.
pub(crate) fn chain() -> Idn {
    Idn::new(
        vec![a("a1"), a("a2")],
        vec![b("b1"), b("b2")],
        vec![
            Idr::new(a("a1"), vec![mt(&[b("b1")])]),
            Idr::new(b("b1"), vec![mt(&[a("a2")])]),
        ],
    )
}

/// `n_a` + `n_b` entities with no relations at all.
pub(crate) fn no_deps(n_a: usize, n_b: usize) -> Idn {
    let ea = (1..=n_a).map(|i| a(&format!("a{i}"))).collect();
    let eb = (1..=n_b).map(|i| b(&format!("b{i}"))).collect();
    Idn::new(ea, eb, vec![])
}
