//! Exact counting for growth problems over finite fields: sumsets and
//! energies, products of `SL_2(F_p)` matrix sets, Heisenberg group cubes,
//! point-plane incidences, and a seeded experiment harness.

pub mod budget;
pub mod error;
pub mod field;
pub mod harness;
pub mod heis;
pub mod incidence;
mod keys;
pub mod matgrp;
pub mod setalg;

pub use budget::Budgets;
pub use error::{Error, Result};
pub use field::{
    check_subfield_condition, generated_subfield, list_subfields, make_field, Field, FieldElement,
    SubfieldConditionReport, SubfieldDescriptor,
};
pub use harness::{ExperimentConfig, RunOutput, VerifySummary};
pub use heis::{heis_mul, CollisionReport, HeisCube, HeisElem};
pub use incidence::{count_incidences, LineSet, PlaneSet, PointSet};
pub use matgrp::{build_r, MatSL2, MatSet};
pub use setalg::{EnergyMethod, FSet, RepFunction};
