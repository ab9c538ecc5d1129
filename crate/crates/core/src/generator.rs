//! Seeded random instance generation per case class.
//!
//! Entities are named `a1..aN` and `b1..bM`. Each entity draws whether it
//! gets a relation, then how many minterms and of what size, with members
//! sampled without replacement from the allowed pool. The case class caps
//! the draws: Case I forces one minterm of size one, Case II one minterm,
//! Case III size-one minterms.
//!
//! Randomness comes from a SplitMix64 stream embedded here rather than an
//! external RNG, so a `(spec, seed)` pair keeps producing the same instance
//! across releases. Sizes are drawn uniformly via modulo, which at these
//! desk-scale ranges is as good as uniform.

use thiserror::Error;

use crate::model::{CaseClass, EntityId, Idn, Idr, Minterm, Side};

/// What to generate.
#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub case: CaseClass,
    pub size_a: usize,
    pub size_b: usize,
    /// Chance an entity receives a relation.
    pub idr_probability: f64,
    pub max_minterms: usize,
    pub max_minterm_size: usize,
    /// Restrict relation members to the opposite side.
    pub cross_only: bool,
    pub seed: u64,
}

impl GenSpec {
    /// Spec with the default shape parameters: relation probability 0.8, up
    /// to 3 minterms of size up to 3, cross-network members only.
    pub fn new(case: CaseClass, size_a: usize, size_b: usize, seed: u64) -> Self {
        GenSpec {
            case,
            size_a,
            size_b,
            idr_probability: 0.8,
            max_minterms: 3,
            max_minterm_size: 3,
            cross_only: true,
            seed,
        }
    }

    /// Shape caps after applying the case class.
    fn caps(&self) -> (usize, usize) {
        match self.case {
            CaseClass::CaseI => (1, 1),
            CaseClass::CaseII => (1, self.max_minterm_size),
            CaseClass::CaseIII => (self.max_minterms, 1),
            CaseClass::CaseIV => (self.max_minterms, self.max_minterm_size),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("infeasible generator spec: {0}")]
    InfeasibleSpec(String),
}

/// Deterministic instance for the spec; equal specs give equal instances.
pub fn generate(spec: &GenSpec) -> Result<Idn, GenError> {
    if !(0.0..=1.0).contains(&spec.idr_probability) {
        return Err(GenError::InvalidSpec(format!(
            "idr_probability must be in [0, 1], got {}",
            spec.idr_probability
        )));
    }
    if spec.max_minterms < 1 || spec.max_minterm_size < 1 {
        return Err(GenError::InvalidSpec(
            "max_minterms and max_minterm_size must be at least 1".into(),
        ));
    }
    if spec.cross_only
        && spec.idr_probability > 0.0
        && ((spec.size_a > 0 && spec.size_b == 0) || (spec.size_b > 0 && spec.size_a == 0))
    {
        return Err(GenError::InfeasibleSpec(
            "cross-only relations need a non-empty opposite side".into(),
        ));
    }

    let entities_a: Vec<EntityId> = (1..=spec.size_a).map(|i| EntityId::a(format!("a{i}"))).collect();
    let entities_b: Vec<EntityId> = (1..=spec.size_b).map(|i| EntityId::b(format!("b{i}"))).collect();
    let all: Vec<EntityId> = entities_a.iter().chain(entities_b.iter()).cloned().collect();

    let (max_minterms, max_size) = spec.caps();
    let mut rng = SplitMix64::new(spec.seed);
    let mut idrs = Vec::new();

    for target in &all {
        if rng.next_f64() >= spec.idr_probability {
            continue;
        }
        let pool: Vec<&EntityId> = if spec.cross_only {
            match target.side {
                Side::A => entities_b.iter().collect(),
                Side::B => entities_a.iter().collect(),
            }
        } else {
            all.iter().filter(|e| *e != target).collect()
        };
        if pool.is_empty() {
            continue; // a lone entity has nothing to depend on
        }

        let wanted = 1 + rng.below(max_minterms as u64) as usize;
        let mut minterms: Vec<Minterm> = Vec::with_capacity(wanted);
        let mut scratch: Vec<&EntityId> = Vec::new();
        for _ in 0..wanted {
            let size = 1 + rng.below(max_size.min(pool.len()) as u64) as usize;
            scratch.clear();
            scratch.extend_from_slice(&pool);
            // partial Fisher-Yates: the first `size` slots are the sample
            for k in 0..size {
                let j = k + rng.below((scratch.len() - k) as u64) as usize;
                scratch.swap(k, j);
            }
            let mt = Minterm::new(scratch[..size].iter().map(|e| (*e).clone()));
            if !minterms.contains(&mt) {
                minterms.push(mt);
            }
        }
        idrs.push(Idr::new(target.clone(), minterms));
    }

    Ok(Idn::new(entities_a, entities_b, idrs))
}

/// SplitMix64 (Steele, Lea, Flood 2014); the output sequence for a given
/// seed is part of this module's stability contract.
struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [0, n); n must be positive.
    fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }
}
