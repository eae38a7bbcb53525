//! Exact construction and verification of the two-slope facets `ψ_i` of
//! the infinite group problem and of their non-piecewise-linear limit `ψ`.
//!
//! All arithmetic is over [`Rational`]; no floating point enters a verdict.
//!
//! ```
//! use gjfacets::{build, check_two_slope_facet, EpsilonSchedule, Rational};
//!
//! let schedule = EpsilonSchedule::standard();
//! let psi2 = build(&schedule, 2).unwrap();
//! let report = check_two_slope_facet(&psi2, &Rational::new(1, 2)).unwrap();
//! assert!(report.holds);
//! ```

#![allow(clippy::result_large_err)]

pub mod construct;
pub mod error;
pub mod exec;
pub mod limit;
pub mod pwl;
pub mod rational;
pub mod verify;

pub use construct::{
    build, gamma_i, gmi, lambda_mu, reduced_parameters, step, structure_report,
    verify_recursive_decomposition, EpsilonSchedule, Ladder, ScheduleKind,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use limit::{
    convergence_constant, density_gap, eval_limit, facet_evidence, gamma_limit, locate,
    negative_segments, non_pwl_evidence, LimitEvaluation, LimitMode, LimitParams,
    NegativeSegment, SegmentLocation,
};
pub use pwl::{sup_diff_at_breakpoints, PwlFunction, SegmentTag, SlopeSign};
pub use rational::Rational;
pub use verify::{
    check_minimal, check_subadditive, check_symmetric, check_two_slope_facet, check_valid,
    CheckOptions, Property, VerificationReport, Witness, WitnessKind,
};
