//! Finite structures, Tarski evaluation, homomorphism search and canonical
//! queries.

mod enumerate;
mod eval;
mod homs;
mod query;
mod structure;

pub use enumerate::{default_carriers, for_each_structure, interpretation_count};
pub use eval::{
    check_theory, definable, eval, satisfies_sequent, AxiomFailure, Compiled, CompiledSequent,
    CompiledTheory, TheoryCheck,
};
pub use homs::{
    check_iso, check_partial_iso, compose, enumerate_homs, enumerate_isos, extend_partial_iso,
    hom_leq, invert, search_homs, search_isos,
};
pub use query::canonical_query;
pub use structure::{DefinableSet, ElemMap, Point, RelationTable, Structure, TupleIter};
