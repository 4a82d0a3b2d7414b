//! Minimality of polynomial dynamical systems on the p-adic integers.
//!
//! A polynomial map on `Z_p` is minimal when every orbit is dense, which
//! happens exactly when the induced map on a small finite quotient
//! `Z/p^deltaZ` is one full cycle (delta = 3 for p = 2, 3 and 2 for
//! p >= 5). This crate provides:
//!
//! - [`arith`]: exact integer polynomials and modular primitives;
//! - [`dynamics`]: finite-level orbits, full-cycle detection, functional
//!   graph decomposition, and the brute-force minimality oracle;
//! - [`criteria`]: closed-form coefficient criteria for p = 2, 3, 5 that
//!   decide minimality without iterating the map;
//! - [`harness`]: exhaustive and sampled cross-validation of the criteria
//!   against the oracle, plus a structural identity suite.

pub mod arith;
pub mod criteria;
pub mod dynamics;
pub mod harness;

pub use arith::{
    mod_inverse, modulus, normalize, padic_valuation, poly_compose_mod, poly_derivative,
    poly_eval_mod, ArithError, IntPoly, Level, Prime, ReducedPoly, Residue, Valuation,
};
pub use criteria::{
    chain_rule_product, check_minimal, check_minimal_with, check_p2, check_p3, check_p5,
    derived_terms, A0Interpretation, CaseP3, CaseP5, CheckMode, ConditionCheck, CriteriaError,
    DerivedTerms, DerivedTermsP2, DerivedTermsP3, DerivedTermsP5, MinimalityReport, Verdict,
};
pub use dynamics::{
    full_cycle_check, lift_check, minimal_decomposition, oracle_minimal, orbit, Component,
    CycleDecomposition, DynamicsError, LevelPolicy, OrbitTrace,
};
pub use harness::{
    cross_validate, cross_validate_with_cap, find_minimal, find_minimal_with_cap, identity_suite,
    CrossValReport, FamilyMode, FamilySpec, HarnessError, IdentitySuiteReport,
    InterpretationScores, Mismatch, DEFAULT_FAMILY_CAP,
};
