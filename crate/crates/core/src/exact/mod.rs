//! Exact robustness at desk scale, plus the time-expanded integer program.
//!
//! The decision problem is NP-complete beyond Case I, so the exact solver is
//! an iterative-deepening subset search under explicit resource limits: it
//! proves every witness size below the answer impossible, then reports the
//! lexicographically smallest witness of the minimum size. Hitting a limit
//! yields [`ExactOutcome::Exhausted`] with the best bounds instead of an
//! answer.
//!
//! The [`ilp`] submodule builds the equivalent binary program for external
//! optimizers and checks assignments against it.

pub mod ilp;

use std::fmt;
use std::time::{Duration, Instant};

use crate::cascade::IdnIndex;
use crate::model::Idn;
use crate::solvers::{build_result, threshold, validated, RobustnessResult, SolveError};

pub use ilp::{
    build_ilp, check_assignment, export_lp, parse_lp, trace_to_assignment, Assignment,
    CheckReport, Constraint, IlpError, IlpModel, LpParseError, Sense, Term, VarKind, Variable,
};

/// Resource limits for the exact search.
///
/// `max_nodes` counts cascade evaluations (leaf tests and bound checks
/// alike), the unit of work that actually dominates the search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactLimits {
    pub max_witness_size: usize,
    pub max_nodes: u64,
    pub time_budget: Duration,
}

impl Default for ExactLimits {
    fn default() -> Self {
        ExactLimits {
            max_witness_size: 6,
            max_nodes: 5_000_000,
            time_budget: Duration::from_secs(60),
        }
    }
}

/// Either an answer or the best bounds the limits allowed.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactOutcome {
    Solved(RobustnessResult),
    Exhausted(ExhaustedReport),
}

impl ExactOutcome {
    pub fn solved(self) -> Option<RobustnessResult> {
        match self {
            ExactOutcome::Solved(r) => Some(r),
            ExactOutcome::Exhausted(_) => None,
        }
    }
}

/// What the search had established when a limit cut it off.
#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustedReport {
    pub rho: f64,
    pub threshold: usize,
    /// Every witness size `<= k_lower` is proved insufficient.
    pub k_lower: usize,
    /// Failing any `threshold` entities directly always suffices.
    pub k_upper: usize,
    pub nodes_used: u64,
    pub elapsed: Duration,
}

impl fmt::Display for ExhaustedReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "search exhausted after {} nodes ({:.1?}): {} <= K <= {}",
            self.nodes_used, self.elapsed, self.k_lower, self.k_upper
        )
    }
}

/// Minimum-size initial failure set reaching the rho threshold, by
/// iterative deepening over the witness size.
pub fn solve_exact(
    idn: &Idn,
    rho: f64,
    limits: &ExactLimits,
) -> Result<ExactOutcome, SolveError> {
    solve_exact_from(idn, rho, limits, 1)
}

/// Search entry with a proven lower bound on the witness size, used by
/// sweeps: the minimum witness size is non-decreasing in the threshold, so a
/// point may start where the previous (smaller-rho) point ended.
pub(crate) fn solve_exact_from(
    idn: &Idn,
    rho: f64,
    limits: &ExactLimits,
    size_floor: usize,
) -> Result<ExactOutcome, SolveError> {
    validated(idn)?;
    let n = idn.len();
    let thr = threshold(rho, n)?;
    let ix = IdnIndex::new(idn);

    let mut lex_rank = vec![0usize; n];
    for (rank, &i) in ix.lex_order.iter().enumerate() {
        lex_rank[i as usize] = rank;
    }
    let sizes: Vec<usize> = (0..n).map(|i| ix.closure(&[i as u32]).count).collect();

    // Existence search visits promising candidates first: descending
    // singleton kill-set size, lexicographic among equals.
    let mut cand: Vec<u32> = (0..n as u32).collect();
    cand.sort_by(|&x, &y| {
        sizes[y as usize]
            .cmp(&sizes[x as usize])
            .then(lex_rank[x as usize].cmp(&lex_rank[y as usize]))
    });
    let lex_cand = ix.lex_order.clone();

    let mut sizes_desc = sizes;
    sizes_desc.sort_unstable_by(|a, b| b.cmp(a));
    // Without multi-minterm relations a closure is the union of its seeds'
    // kill sets, so kill-set sizes bound it additively. With them, joint
    // failures can exceed the sum (a <- b + c falls only to b and c
    // together), so the additive bound must not be applied.
    let additive_ok = ix.minterms.iter().all(|m| m.len() <= 1);

    let started = Instant::now();
    let mut search = Search {
        ix: &ix,
        thr,
        nodes: 0,
        max_nodes: limits.max_nodes,
        deadline: started + limits.time_budget,
        scratch: Vec::with_capacity(n),
    };

    let cap = thr.min(limits.max_witness_size);
    let mut s = size_floor.max(1);
    while s <= cap {
        if additive_ok && sizes_desc.iter().take(s).sum::<usize>() < thr {
            s += 1;
            continue;
        }
        let mut chosen = Vec::with_capacity(s);
        match search.dfs(&cand, &mut chosen, 0, s) {
            Dfs::Found => {
                // Canonical witness: lexicographically first sufficient set
                // of the minimum size. If the budget dies during this pass,
                // the witness already in hand is still minimum-size.
                let mut lex_chosen = Vec::with_capacity(s);
                let mut witness = match search.dfs(&lex_cand, &mut lex_chosen, 0, s) {
                    Dfs::Found => lex_chosen,
                    Dfs::NotFound | Dfs::Budget => chosen,
                };
                witness.sort_by_key(|&i| lex_rank[i as usize]);
                return Ok(ExactOutcome::Solved(build_result(&ix, rho, thr, &witness)));
            }
            Dfs::Budget => {
                return Ok(ExactOutcome::Exhausted(ExhaustedReport {
                    rho,
                    threshold: thr,
                    k_lower: s - 1,
                    k_upper: thr - 1,
                    nodes_used: search.nodes,
                    elapsed: started.elapsed(),
                }));
            }
            Dfs::NotFound => s += 1,
        }
    }

    // Only reachable when max_witness_size < threshold: level `threshold`
    // always succeeds (any threshold-many entities are their own closure).
    Ok(ExactOutcome::Exhausted(ExhaustedReport {
        rho,
        threshold: thr,
        k_lower: cap,
        k_upper: thr - 1,
        nodes_used: search.nodes,
        elapsed: started.elapsed(),
    }))
}

enum Dfs {
    Found,
    NotFound,
    Budget,
}

struct Search<'a> {
    ix: &'a IdnIndex,
    thr: usize,
    nodes: u64,
    max_nodes: u64,
    deadline: Instant,
    scratch: Vec<u32>,
}

impl Search<'_> {
    /// One budgeted cascade; `None` means a limit was hit.
    fn closure_count(&mut self, seeds: &[u32]) -> Option<usize> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return None;
        }
        if self.nodes.is_multiple_of(1024) && Instant::now() >= self.deadline {
            return None;
        }
        Some(self.ix.closure(seeds).count)
    }

    /// Depth-first size-`s` subset search over `cand[start..]`. On `Found`,
    /// `chosen` holds the witness.
    fn dfs(&mut self, cand: &[u32], chosen: &mut Vec<u32>, start: usize, s: usize) -> Dfs {
        if chosen.len() == s {
            return match self.closure_count(chosen) {
                None => Dfs::Budget,
                Some(c) if c >= self.thr => Dfs::Found,
                Some(_) => Dfs::NotFound,
            };
        }
        let need = s - chosen.len();
        if cand.len() - start < need {
            return Dfs::NotFound;
        }
        // Sound subtree bound: even failing the whole remaining pool on top
        // of the current choice cannot reach the threshold.
        let mut pool = std::mem::take(&mut self.scratch);
        pool.clear();
        pool.extend_from_slice(chosen);
        pool.extend_from_slice(&cand[start..]);
        let bound = self.closure_count(&pool);
        self.scratch = pool;
        match bound {
            None => return Dfs::Budget,
            Some(c) if c < self.thr => return Dfs::NotFound,
            Some(_) => {}
        }
        for i in start..=(cand.len() - need) {
            chosen.push(cand[i]);
            match self.dfs(cand, chosen, i + 1, s) {
                Dfs::Found => return Dfs::Found,
                Dfs::Budget => return Dfs::Budget,
                Dfs::NotFound => {
                    chosen.pop();
                }
            }
        }
        Dfs::NotFound
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{a, b, no_deps, sample7};
    use crate::solvers::solve_case1;
    use std::collections::BTreeSet;

    fn solved(idn: &Idn, rho: f64) -> RobustnessResult {
        solve_exact(idn, rho, &ExactLimits::default())
            .unwrap()
            .solved()
            .expect("within limits")
    }

    #[test]
    fn sample7_full_failure_single_witness() {
        let r = solved(&sample7(), 1.0);
        assert_eq!(r.k, 0);
        assert_eq!(r.witness, BTreeSet::from([a("a2")]));
        assert_eq!(r.final_failed.len(), 7);
    }

    #[test]
    fn sample7_small_threshold_picks_lex_first_sufficient() {
        // threshold 2: a1's closure {a1, b2} reaches it, and a1 is the
        // lexicographically first entity that does.
        let r = solved(&sample7(), 0.15);
        assert_eq!(r.threshold, 2);
        assert_eq!(r.k, 0);
        assert_eq!(r.witness, BTreeSet::from([a("a1")]));
    }

    #[test]
    fn isolated_entities_need_threshold_many() {
        let r = solved(&no_deps(2, 2), 1.0);
        assert_eq!(r.k, 3);
        assert_eq!(r.witness.len(), 4);
    }

    #[test]
    fn agrees_with_case1_greedy_on_a_case1_instance() {
        let idn = crate::fixtures::chain();
        for rho in [0.25, 0.5, 0.75, 1.0] {
            let exact = solved(&idn, rho);
            let greedy = solve_case1(&idn, rho).unwrap();
            assert_eq!(exact.k, greedy.k, "rho {rho}");
        }
    }

    #[test]
    fn node_budget_yields_bounds() {
        let limits = ExactLimits {
            max_witness_size: 6,
            max_nodes: 1,
            time_budget: Duration::from_secs(60),
        };
        match solve_exact(&no_deps(3, 3), 1.0, &limits).unwrap() {
            ExactOutcome::Exhausted(rep) => {
                assert!(rep.k_lower <= rep.k_upper);
                assert_eq!(rep.k_upper, 5);
            }
            ExactOutcome::Solved(_) => panic!("budget of one node cannot solve this"),
        }
    }

    #[test]
    fn witness_cap_yields_bounds() {
        let limits = ExactLimits {
            max_witness_size: 2,
            ..ExactLimits::default()
        };
        match solve_exact(&no_deps(3, 3), 1.0, &limits).unwrap() {
            ExactOutcome::Exhausted(rep) => {
                assert_eq!(rep.k_lower, 2);
                assert_eq!(rep.k_upper, 5);
            }
            ExactOutcome::Solved(_) => panic!("needs witness size 6"),
        }
    }

    #[test]
    fn synergy_is_not_pruned_away() {
        // a1 falls only to b1 and b2 jointly; kill sets are all singletons,
        // so an additive bound would wrongly rule out witness size 2.
        let idn = crate::model::Idn::new(
            vec![a("a1")],
            vec![b("b1"), b("b2")],
            vec![crate::model::Idr::new(
                a("a1"),
                vec![
                    crate::model::Minterm::new([b("b1")]),
                    crate::model::Minterm::new([b("b2")]),
                ],
            )],
        );
        let r = solved(&idn, 1.0);
        assert_eq!(r.k, 1);
        assert_eq!(r.witness, BTreeSet::from([b("b1"), b("b2")]));
    }
}
