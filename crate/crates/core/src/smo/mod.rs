//! The schema modification operators and their compilation to s-t tgds.

mod catalog;
mod compile;
mod functions;
mod predict;
mod spec;

pub use catalog::{catalog, sample_schema, sample_spec, CatalogEntry};
pub use compile::{compile_forward, compile_inverse, compile_inverse_of, prov_column, InversePlan, PostStep, Resources};
pub use functions::{inverse_name, FunctionRegistry, SEPARATOR};
pub use predict::{predicted_inverse_type, InstanceFeatures};
pub use spec::{Script, SmoClass, SmoKind, SmoSpec};
