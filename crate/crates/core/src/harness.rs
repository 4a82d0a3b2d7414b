//! Systematic validation of the closed-form criteria against the
//! brute-force oracle: exhaustive enumeration of bounded coefficient
//! families, seeded random sampling, and a suite of structural identities.
//!
//! Everything here is deterministic for a fixed spec and seed, including
//! under parallel execution: work is sharded over the coefficient space
//! and merged in index order.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{normalize, poly_derivative, ArithError, IntPoly, Level, Prime, ReducedPoly};
use crate::criteria::{
    chain_rule_product, check_minimal_with, derived_terms_p5, A0Interpretation, CheckMode,
    CriteriaError, Verdict,
};
use crate::dynamics::{full_cycle_check, lift_check, oracle_minimal, DynamicsError, LevelPolicy};

/// Default bound on the number of family members an exhaustive or sampled
/// run may evaluate.
pub const DEFAULT_FAMILY_CAP: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HarnessError {
    #[error("run would evaluate {size} members, exceeding the cap of {cap}")]
    FamilyTooLarge { size: u128, cap: u64 },
    #[error("max_degree must be at least 1")]
    DegenerateFamily,
    #[error("coeff_modulus must be at least 1")]
    EmptyCoefficientRange,
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// How a family is traversed: every member, or a seeded random sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyMode {
    Exhaustive,
    Sample { count: u64, seed: u64 },
}

/// A bounded family of polynomials `c + a_1 x + ... + a_d x^d` with each
/// `a_i` ranging over `[0, coeff_modulus)` and a fixed constant term
/// (1 by default).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySpec {
    pub p: Prime,
    pub max_degree: u32,
    pub coeff_modulus: u64,
    pub constant_term: BigInt,
    pub mode: FamilyMode,
}

impl FamilySpec {
    pub fn exhaustive(p: Prime, max_degree: u32, coeff_modulus: u64) -> Self {
        FamilySpec {
            p,
            max_degree,
            coeff_modulus,
            constant_term: BigInt::one(),
            mode: FamilyMode::Exhaustive,
        }
    }

    pub fn sample(p: Prime, max_degree: u32, coeff_modulus: u64, count: u64, seed: u64) -> Self {
        FamilySpec {
            p,
            max_degree,
            coeff_modulus,
            constant_term: BigInt::one(),
            mode: FamilyMode::Sample { count, seed },
        }
    }

    /// Number of members of the exhaustive family.
    pub fn family_size(&self) -> u128 {
        (self.coeff_modulus as u128).pow(self.max_degree)
    }

    /// Decodes the member at `index`: base-m digits of the index become
    /// the coefficients, `a_1` varying fastest, so the enumeration is in
    /// lexicographic coefficient order and shards by leading coefficient.
    pub fn member(&self, index: u64) -> IntPoly {
        let m = self.coeff_modulus;
        let mut coeffs = Vec::with_capacity(self.max_degree as usize + 1);
        coeffs.push(self.constant_term.clone());
        let mut rest = index;
        for _ in 0..self.max_degree {
            coeffs.push(BigInt::from(rest % m));
            rest /= m;
        }
        IntPoly::new(coeffs)
    }

    /// Validates the spec and returns the number of members a run will
    /// actually evaluate.
    fn checked_total(&self, cap: u64) -> Result<u64, HarnessError> {
        if self.max_degree == 0 {
            return Err(HarnessError::DegenerateFamily);
        }
        if self.coeff_modulus == 0 {
            return Err(HarnessError::EmptyCoefficientRange);
        }
        let total = match self.mode {
            FamilyMode::Exhaustive => self.family_size(),
            FamilyMode::Sample { count, .. } => count as u128,
        };
        if total > cap as u128 {
            return Err(HarnessError::FamilyTooLarge { size: total, cap });
        }
        Ok(total as u64)
    }

    /// The polynomials a run evaluates, in evaluation order.
    fn members(&self, total: u64) -> Vec<IntPoly> {
        match self.mode {
            FamilyMode::Exhaustive => (0..total).map(|k| self.member(k)).collect(),
            FamilyMode::Sample { count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let size = self.family_size();
                (0..count)
                    .map(|_| {
                        let idx = if size <= u64::MAX as u128 {
                            rng.gen_range(0..size as u64)
                        } else {
                            rng.gen::<u64>()
                        };
                        self.member(idx)
                    })
                    .collect()
            }
        }
    }
}

/// One disagreement between the closed-form criterion and the oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub poly: IntPoly,
    pub closed_form: Verdict,
    pub oracle: Verdict,
}

/// Mismatch counts of the two candidate readings of the p = 3 table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InterpretationScores {
    pub even_sum_mismatches: u64,
    pub mult6_sum_mismatches: u64,
}

/// Outcome of a cross-validation run over one family.
#[derive(Debug, Clone)]
pub struct CrossValReport {
    pub family: FamilySpec,
    pub total: u64,
    /// Number of members the oracle declares minimal.
    pub minimal_count: u64,
    /// Disagreements under the reported reading (for p = 3, the better of
    /// the two readings; ties favor the even-index reading).
    pub mismatches: Vec<Mismatch>,
    pub p3_interpretation_scores: Option<InterpretationScores>,
    /// The reading the mismatch list refers to; set only for p = 3.
    pub chosen_reading: Option<A0Interpretation>,
    pub runtime_seconds: f64,
}

impl CrossValReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }
}

struct MemberOutcome {
    oracle: bool,
    closed_even: bool,
    closed_mult6: bool,
}

fn closed_form_verdict(
    f: &IntPoly,
    p: Prime,
    reading: A0Interpretation,
) -> Result<bool, CriteriaError> {
    Ok(check_minimal_with(f, p, CheckMode::ClosedForm, reading)?.is_minimal())
}

/// Runs every family member through the closed-form criterion and the
/// brute-force oracle, recording all disagreements. For p = 3 both
/// readings of the criterion table are scored.
pub fn cross_validate(spec: &FamilySpec) -> Result<CrossValReport, HarnessError> {
    cross_validate_with_cap(spec, DEFAULT_FAMILY_CAP)
}

pub fn cross_validate_with_cap(
    spec: &FamilySpec,
    cap: u64,
) -> Result<CrossValReport, HarnessError> {
    let start = Instant::now();
    let pv = spec.p.value();
    if !matches!(pv, 2 | 3 | 5) {
        return Err(HarnessError::Criteria(CriteriaError::UnsupportedPrime(pv)));
    }
    let total = spec.checked_total(cap)?;
    let members = spec.members(total);

    let outcomes: Vec<MemberOutcome> = members
        .par_iter()
        .map(|f| -> Result<MemberOutcome, HarnessError> {
            let oracle = oracle_minimal(f, spec.p)?;
            let closed_even = closed_form_verdict(f, spec.p, A0Interpretation::AsEvenSum)?;
            let closed_mult6 = if pv == 3 {
                closed_form_verdict(f, spec.p, A0Interpretation::AsMult6Sum)?
            } else {
                closed_even
            };
            Ok(MemberOutcome {
                oracle,
                closed_even,
                closed_mult6,
            })
        })
        .collect::<Result<_, _>>()?;

    let minimal_count = outcomes.iter().filter(|o| o.oracle).count() as u64;
    let even_mismatches: Vec<usize> = outcomes
        .iter()
        .enumerate()
        .filter(|(_, o)| o.closed_even != o.oracle)
        .map(|(k, _)| k)
        .collect();
    let mult6_mismatches: Vec<usize> = outcomes
        .iter()
        .enumerate()
        .filter(|(_, o)| o.closed_mult6 != o.oracle)
        .map(|(k, _)| k)
        .collect();

    let (scores, chosen_reading, chosen_indices) = if pv == 3 {
        let scores = InterpretationScores {
            even_sum_mismatches: even_mismatches.len() as u64,
            mult6_sum_mismatches: mult6_mismatches.len() as u64,
        };
        if even_mismatches.len() <= mult6_mismatches.len() {
            (
                Some(scores),
                Some(A0Interpretation::AsEvenSum),
                even_mismatches,
            )
        } else {
            (
                Some(scores),
                Some(A0Interpretation::AsMult6Sum),
                mult6_mismatches,
            )
        }
    } else {
        (None, None, even_mismatches)
    };

    let mismatches = chosen_indices
        .into_iter()
        .map(|k| {
            let o = &outcomes[k];
            let closed = match chosen_reading {
                Some(A0Interpretation::AsMult6Sum) => o.closed_mult6,
                _ => o.closed_even,
            };
            Mismatch {
                poly: members[k].clone(),
                closed_form: if closed {
                    Verdict::Minimal
                } else {
                    Verdict::NotMinimal
                },
                oracle: if o.oracle {
                    Verdict::Minimal
                } else {
                    Verdict::NotMinimal
                },
            }
        })
        .collect();

    Ok(CrossValReport {
        family: spec.clone(),
        total,
        minimal_count,
        mismatches,
        p3_interpretation_scores: scores,
        chosen_reading,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

/// First `limit` family members the oracle declares minimal, in
/// enumeration order.
pub fn find_minimal(spec: &FamilySpec, limit: usize) -> Result<Vec<IntPoly>, HarnessError> {
    find_minimal_with_cap(spec, limit, DEFAULT_FAMILY_CAP)
}

pub fn find_minimal_with_cap(
    spec: &FamilySpec,
    limit: usize,
    cap: u64,
) -> Result<Vec<IntPoly>, HarnessError> {
    let total = spec.checked_total(cap)?;
    let members = spec.members(total);
    let mut found = Vec::with_capacity(limit);
    for chunk in members.chunks(8192) {
        let hits: Vec<IntPoly> = chunk
            .par_iter()
            .map(|f| Ok::<_, HarnessError>(oracle_minimal(f, spec.p)?.then(|| f.clone())))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .flatten()
            .collect();
        found.extend(hits);
        if found.len() >= limit {
            break;
        }
    }
    found.truncate(limit);
    Ok(found)
}

/// Violation counts from the structural identity suite; all zero on a
/// correct implementation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentitySuiteReport {
    pub p: u64,
    pub samples: u64,
    pub seed: u64,
    /// Violations of the derivative-product identities (p = 5 only):
    /// the term product must equal the residue-wise product of f' for
    /// every sample, and the chain-rule product over the orbit whenever
    /// the level-1 map is a full cycle.
    pub chain_rule_violations: Option<u64>,
    /// Samples where the chain-rule comparison actually fired, i.e. the
    /// level-1 map was a full cycle.
    pub chain_rule_conditioned: Option<u64>,
    /// Conjugating the constant term to 1 must not change the oracle
    /// verdict.
    pub conjugacy_violations: u64,
    /// A full cycle at level n must project to a full cycle at n - 1.
    pub projection_violations: u64,
    /// Given a full cycle at level n (n = 1, 2), the lift test must agree
    /// with the full-cycle check at level n + 1.
    pub lift_violations: u64,
}

impl IdentitySuiteReport {
    pub fn all_zero(&self) -> bool {
        self.chain_rule_violations.unwrap_or(0) == 0
            && self.conjugacy_violations == 0
            && self.projection_violations == 0
            && self.lift_violations == 0
    }
}

fn random_unit_poly(rng: &mut ChaCha8Rng, p: Prime) -> IntPoly {
    let degree = rng.gen_range(1..=8usize);
    let mut coeffs = Vec::with_capacity(degree + 1);
    let a0 = loop {
        let c = rng.gen_range(-100i64..=100);
        if c.unsigned_abs() % p.value() != 0 {
            break c;
        }
    };
    coeffs.push(a0);
    for _ in 1..degree {
        coeffs.push(rng.gen_range(-100i64..=100));
    }
    let leading = loop {
        let c = rng.gen_range(-100i64..=100);
        if c != 0 {
            break c;
        }
    };
    coeffs.push(leading);
    IntPoly::from_i64(&coeffs)
}

struct SampleOutcome {
    chain_rule_violation: bool,
    chain_rule_fired: bool,
    conjugacy_violation: bool,
    projection_violations: u64,
    lift_violations: u64,
}

fn check_sample(f: &IntPoly, p: Prime) -> Result<SampleOutcome, HarnessError> {
    let pv = p.value();
    let g = normalize(f, p)?;
    let one = Level::new(1).expect("positive");

    // Derivative-product identities at p = 5, evaluated on the
    // constant-term-1 conjugate.
    let mut chain_rule_violation = false;
    let mut chain_rule_fired = false;
    if pv == 5 {
        let t = derived_terms_p5(&g)?;
        let term_product =
            crate::arith::big_mod_u64(&t.a1, 5) * t.deriv_residues[0] % 5 * t.deriv_residues[2] % 5
                * t.deriv_residues[3]
                % 5
                * t.deriv_residues[1]
                % 5;
        // Route two: evaluate the derivative polynomial at every residue.
        let d_red = ReducedPoly::new(&poly_derivative(&g), p, one)?;
        let residue_product = (0..5).fold(1u64, |acc, x| acc * d_red.eval(x) % 5);
        if term_product != residue_product {
            chain_rule_violation = true;
        }
        // The chain-rule product over the orbit of 0 equals the term
        // product exactly when the level-1 map is a full cycle; otherwise
        // the orbit revisits points and the products differ in general.
        if full_cycle_check(&g, p, one)? {
            chain_rule_fired = true;
            if chain_rule_product(&g, p)?.value() != term_product {
                chain_rule_violation = true;
            }
        }
    }

    let conjugacy_violation = oracle_minimal(f, p)? != oracle_minimal(&g, p)?;

    let delta = LevelPolicy::for_prime(p).delta();
    let mut full_cycle_at = Vec::with_capacity(delta as usize + 1);
    for n in 1..=delta + 1 {
        full_cycle_at.push(full_cycle_check(f, p, Level::new(n).expect("positive"))?);
    }
    let mut projection_violations = 0;
    for n in 1..full_cycle_at.len() {
        if full_cycle_at[n] && !full_cycle_at[n - 1] {
            projection_violations += 1;
        }
    }

    let mut lift_violations = 0;
    for n in 1..=2u32 {
        if full_cycle_at[n as usize - 1] {
            let lifted = lift_check(f, p, Level::new(n).expect("positive"))?;
            if lifted != full_cycle_at[n as usize] {
                lift_violations += 1;
            }
        }
    }

    Ok(SampleOutcome {
        chain_rule_violation,
        chain_rule_fired,
        conjugacy_violation,
        projection_violations,
        lift_violations,
    })
}

/// Draws seeded random polynomials (degree 1..=8, coefficients in
/// [-100, 100], unit constant term) and counts violations of the
/// structural identities. Everything should come back zero.
pub fn identity_suite(
    p: Prime,
    samples: u64,
    seed: u64,
) -> Result<IdentitySuiteReport, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let polys: Vec<IntPoly> = (0..samples)
        .map(|_| random_unit_poly(&mut rng, p))
        .collect();

    let outcomes: Vec<SampleOutcome> = polys
        .par_iter()
        .map(|f| check_sample(f, p))
        .collect::<Result<_, _>>()?;

    let pv = p.value();
    Ok(IdentitySuiteReport {
        p: pv,
        samples,
        seed,
        chain_rule_violations: (pv == 5)
            .then(|| outcomes.iter().filter(|o| o.chain_rule_violation).count() as u64),
        chain_rule_conditioned: (pv == 5)
            .then(|| outcomes.iter().filter(|o| o.chain_rule_fired).count() as u64),
        conjugacy_violations: outcomes.iter().filter(|o| o.conjugacy_violation).count() as u64,
        projection_violations: outcomes.iter().map(|o| o.projection_violations).sum(),
        lift_violations: outcomes.iter().map(|o| o.lift_violations).sum(),
    })
}
