//! Robustness solvers: the Case I optimal greedy, the general heuristic,
//! and rho-sweeps over a grid.
//!
//! All solvers answer the same question for a target fraction `rho`: how
//! many initial failures does it take to push the final failed count to at
//! least `ceil(rho * (|A| + |B|))`? The reported robustness parameter `K`
//! is that minimum witness size minus one.
//!
//! Ties are always broken lexicographically on `(side, name)` so identical
//! inputs produce identical results, including the witness.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::cascade::IdnIndex;
use crate::exact::{solve_exact_from, ExactLimits, ExactOutcome};
use crate::model::{CaseClass, EntityId, Idn, InvalidInstance, ValidationReport};

/// Robustness answer for one target fraction.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessResult {
    pub rho: f64,
    /// `ceil(rho * (|A| + |B|))`, the failed-count target.
    pub threshold: usize,
    /// Robustness parameter: minimum (or heuristic) witness size minus one.
    pub k: usize,
    /// Initial-failure set of size `k + 1` whose cascade reaches the target.
    pub witness: BTreeSet<EntityId>,
    /// Witness in the order the solver committed to it; for the greedy
    /// solvers this is the pick order, for the exact solver lexicographic.
    pub selection: Vec<EntityId>,
    /// Fixpoint of the cascade from the witness.
    pub final_failed: BTreeSet<EntityId>,
}

/// Solver selection for [`sweep`].
#[derive(Debug, Clone)]
pub enum SweepMethod {
    Case1,
    Heuristic,
    Exact(ExactLimits),
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    InvalidInstance(#[from] InvalidInstance),
    #[error("rho must be in (0, 1], got {0}")]
    RhoOutOfRange(f64),
    #[error("instance is not Case I (classified {0})")]
    NotCaseI(CaseClass),
    #[error("instance has no entities")]
    EmptyInstance,
    #[error(
        "exact search exhausted its limits at rho {rho}: {lower_bound} <= K <= {upper_bound}"
    )]
    Exhausted {
        rho: f64,
        lower_bound: usize,
        upper_bound: usize,
    },
}

/// Failed-count target for a fraction: `ceil(rho * n)`, "at least" rounding
/// fractional targets up. A small guard absorbs binary-float noise in grid
/// values such as 0.42 * 50.
pub fn threshold(rho: f64, n: usize) -> Result<usize, SolveError> {
    const EPS: f64 = 1e-9;
    if !rho.is_finite() || rho <= 0.0 || rho > 1.0 + EPS {
        return Err(SolveError::RhoOutOfRange(rho));
    }
    if n == 0 {
        return Ok(0);
    }
    // any positive rho demands at least one failure, even when the guard
    // pushes a tiny product below zero
    let t = (rho.min(1.0) * n as f64 - EPS).ceil().max(1.0);
    Ok(t as usize)
}

/// The 50-point default grid: 0.02, 0.04, ..., 1.00.
pub fn default_grid() -> Vec<f64> {
    (1..=50).map(|i| i as f64 / 50.0).collect()
}

pub(crate) fn validated(idn: &Idn) -> Result<ValidationReport, SolveError> {
    let report = idn.validate();
    if !report.is_clean() {
        return Err(SolveError::InvalidInstance(InvalidInstance(report)));
    }
    if idn.is_empty() {
        return Err(SolveError::EmptyInstance);
    }
    Ok(report)
}

pub(crate) fn build_result(
    ix: &IdnIndex,
    rho: f64,
    thr: usize,
    picks: &[u32],
) -> RobustnessResult {
    let closure = ix.closure(picks);
    let final_failed = ix.to_id_set(closure.failed_indices());
    debug_assert!(final_failed.len() >= thr);
    let selection: Vec<EntityId> = picks.iter().map(|&i| ix.ids[i as usize].clone()).collect();
    RobustnessResult {
        rho,
        threshold: thr,
        k: picks.len() - 1,
        witness: selection.iter().cloned().collect(),
        selection,
        final_failed,
    }
}

/// Optimal greedy for Case I instances.
///
/// Kill sets of a Case I instance are laminar: two kill sets are disjoint or
/// one contains the other. Repeatedly taking the largest remaining kill set
/// and subtracting it from the rest is therefore optimal, in `O(n^3)`.
pub fn solve_case1(idn: &Idn, rho: f64) -> Result<RobustnessResult, SolveError> {
    validated(idn)?;
    let class = idn.classify().map_err(SolveError::from)?;
    if class != CaseClass::CaseI {
        return Err(SolveError::NotCaseI(class));
    }
    let n = idn.len();
    let thr = threshold(rho, n)?;
    let ix = IdnIndex::new(idn);

    // lex_rank[i] = rank of entity i in (side, name) order, for tie-breaks.
    let mut lex_rank = vec![0usize; n];
    for (rank, &i) in ix.lex_order.iter().enumerate() {
        lex_rank[i as usize] = rank;
    }

    let mut kill: Vec<Vec<bool>> = Vec::with_capacity(n);
    let mut sizes: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        let cl = ix.closure(&[i as u32]);
        let mut mask = vec![false; n];
        for j in cl.failed_indices() {
            mask[j as usize] = true;
        }
        sizes.push(cl.count);
        kill.push(mask);
    }

    let mut covered = vec![false; n];
    let mut covered_count = 0usize;
    let mut picks: Vec<u32> = Vec::new();
    while covered_count < thr {
        let chosen = (0..n)
            .filter(|&i| sizes[i] > 0)
            .min_by(|&x, &y| sizes[y].cmp(&sizes[x]).then(lex_rank[x].cmp(&lex_rank[y])))
            .expect("some kill set is non-empty while the target is unmet");
        picks.push(chosen as u32);

        let members: Vec<usize> = (0..n).filter(|&j| kill[chosen][j]).collect();
        for &j in &members {
            if !covered[j] {
                covered[j] = true;
                covered_count += 1;
            }
        }
        for i in 0..n {
            if sizes[i] == 0 {
                continue;
            }
            for &j in &members {
                if kill[i][j] {
                    kill[i][j] = false;
                    sizes[i] -= 1;
                }
            }
        }
    }

    Ok(build_result(&ix, rho, thr, &picks))
}

/// General greedy heuristic.
///
/// Each round recomputes every surviving entity's residual kill set (its
/// cascade on top of everything already failed) and takes the largest; ties
/// fall back to the larger residual total-minterm-hit-set, then to the
/// lexicographic order. The returned `K` is an upper bound on the true
/// robustness parameter.
pub fn solve_heuristic(idn: &Idn, rho: f64) -> Result<RobustnessResult, SolveError> {
    validated(idn)?;
    let n = idn.len();
    let thr = threshold(rho, n)?;
    let ix = IdnIndex::new(idn);

    let mut lex_rank = vec![0usize; n];
    for (rank, &i) in ix.lex_order.iter().enumerate() {
        lex_rank[i as usize] = rank;
    }

    let mut failed_mask = vec![false; n];
    let mut failed_list: Vec<u32> = Vec::new();
    let mut picks: Vec<u32> = Vec::new();

    while failed_list.len() < thr {
        // Pass 1: residual kill-set sizes of all survivors.
        let mut best_size = 0usize;
        let mut tied: Vec<u32> = Vec::new();
        for x in 0..n as u32 {
            if failed_mask[x as usize] {
                continue;
            }
            let cl = ix.closure_with(&failed_list, x);
            let rc_size = cl.count - failed_list.len();
            if rc_size > best_size {
                best_size = rc_size;
                tied.clear();
                tied.push(x);
            } else if rc_size == best_size {
                tied.push(x);
            }
        }
        debug_assert!(best_size >= 1, "a survivor always kills itself");

        // Pass 2: break ties on the residual total-minterm-hit-set, i.e.
        // the number of still-live minterms of still-operational owners that
        // the candidate's residual kill set would hit.
        let chosen = if tied.len() == 1 {
            tied[0]
        } else {
            let mut best: Option<(usize, u32)> = None;
            for &x in &tied {
                let cl = ix.closure_with(&failed_list, x);
                let mut hits = 0usize;
                for (owner, minterms) in ix.minterms.iter().enumerate() {
                    if failed_mask[owner] {
                        continue;
                    }
                    for members in minterms {
                        let live = members.iter().all(|&m| !failed_mask[m as usize]);
                        if live
                            && members
                                .iter()
                                .any(|&m| cl.failed(m) && !failed_mask[m as usize])
                        {
                            hits += 1;
                        }
                    }
                }
                let better = match best {
                    None => true,
                    Some((h, b)) => {
                        hits > h || (hits == h && lex_rank[x as usize] < lex_rank[b as usize])
                    }
                };
                if better {
                    best = Some((hits, x));
                }
            }
            best.expect("tie list is non-empty").1
        };

        let cl = ix.closure_with(&failed_list, chosen);
        for j in cl.failed_indices() {
            if !failed_mask[j as usize] {
                failed_mask[j as usize] = true;
                failed_list.push(j);
            }
        }
        picks.push(chosen);
    }

    Ok(build_result(&ix, rho, thr, &picks))
}

/// Runs the selected solver on every grid point; output ordered by rho.
///
/// Case I and heuristic points are independent and evaluated in parallel;
/// the exact method runs sequentially in ascending rho so each point can
/// start its size search where the previous one ended (the minimum witness
/// size is non-decreasing in the threshold, so results are identical to
/// solving each point cold).
pub fn sweep(
    idn: &Idn,
    rho_grid: &[f64],
    method: &SweepMethod,
) -> Result<Vec<(f64, usize)>, SolveError> {
    let mut grid = rho_grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).expect("grid values are comparable"));
    for &rho in &grid {
        threshold(rho, idn.len().max(1))?;
    }
    match method {
        SweepMethod::Case1 => grid
            .par_iter()
            .map(|&rho| solve_case1(idn, rho).map(|r| (rho, r.k)))
            .collect(),
        SweepMethod::Heuristic => grid
            .par_iter()
            .map(|&rho| solve_heuristic(idn, rho).map(|r| (rho, r.k)))
            .collect(),
        SweepMethod::Exact(limits) => {
            let mut out = Vec::with_capacity(grid.len());
            let mut size_floor = 1usize;
            for &rho in &grid {
                match solve_exact_from(idn, rho, limits, size_floor)? {
                    ExactOutcome::Solved(r) => {
                        size_floor = r.k + 1;
                        out.push((rho, r.k));
                    }
                    ExactOutcome::Exhausted(rep) => {
                        return Err(SolveError::Exhausted {
                            rho,
                            lower_bound: rep.k_lower,
                            upper_bound: rep.k_upper,
                        });
                    }
                }
            }
            Ok(out)
        }
    }
}

impl fmt::Display for RobustnessResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "K={} (witness size {}), threshold {}, final failed {}",
            self.k,
            self.k + 1,
            self.threshold,
            self.final_failed.len()
        )
    }
}
