//! Robustness analysis for interdependent power/communication networks.
//!
//! An instance ([`model::Idn`]) couples two entity sets with Boolean
//! dependency relations: an entity stays operational while at least one
//! minterm of its relation has all members operational. Failing a set of
//! entities triggers a synchronous cascade ([`cascade`]); the `(K, rho)`
//! robustness of an instance is the least number of initial failures, minus
//! one, that brings the final failed count to at least `rho * (|A| + |B|)`.
//!
//! The crate provides:
//!
//! - [`model`]: domain types, validation, and the Case I-IV classification;
//! - [`cascade`]: step/trace simulation, kill sets, minterm hit sets;
//! - [`solvers`]: the Case I optimal greedy, the general heuristic, and
//!   rho-sweeps;
//! - [`exact`]: exhaustive search at desk scale plus the time-expanded ILP
//!   (build, LP-file export, assignment checking);
//! - [`ingest`]: the `.idn` text format and CSV emitters;
//! - [`generator`]: seeded random instances per case class.
//!
//! ```
//! use ridn::ingest::parse_idn;
//! use ridn::solvers::solve_heuristic;
//!
//! let doc = "A: a1 a2\nB: b1 b2\na1 <- b1\nb1 <- a2\n";
//! let idn = parse_idn(doc).unwrap().idn;
//! let r = solve_heuristic(&idn, 0.75).unwrap();
//! assert_eq!(r.k, 0); // failing a2 alone takes down a2, b1, a1
//! ```

#![forbid(unsafe_code)]

pub mod cascade;
pub mod exact;
pub mod generator;
pub mod ingest;
pub mod model;
pub mod solvers;

#[cfg(test)]
pub(crate) mod fixtures;
