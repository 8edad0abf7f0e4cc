//! s-t tgds, their textual form, and the chase.

mod chase;
mod expand;
mod parse;
mod tgd;

pub use chase::{
    body_matches, chase, chase_with, matched_tuple_ids, ChaseOptions, ChaseOutput,
    FunctionPolicy, Match,
};
pub use expand::expand_duplicates;
pub(crate) use expand::single_witness;
pub use parse::parse_conditions;
pub use tgd::{Atom, CompareOp, Condition, SchemaMapping, StTgd, Term};
