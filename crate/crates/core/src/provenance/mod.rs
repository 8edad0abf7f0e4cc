//! Annotations over tuple ids: where-, why- and how-provenance, and side tables.

mod polynomial;
mod side_table;
mod store;

pub use polynomial::{Monomial, Polynomial, WitnessBasis};
pub use side_table::{
    build_side_table, side_tables_from_json, side_tables_to_json, SideRow, SideTable,
    SideTableKind, SideTableSpec,
};
pub use store::{AnnotatedFact, Annotation, ProvenanceMode, ProvenanceStore};
