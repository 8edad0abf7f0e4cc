//! Values, tuple identity, instances and their canonical form.

mod instance;
pub mod json;
mod value;

pub use instance::{
    instances_equal, normalize, Fact, IdAllocator, Instance, RelationSchema, RunState, Schema,
    TupleId,
};
pub(crate) use instance::check_same_schema;
pub use value::{ConstKind, Constant, Decimal, NullAllocator, NullLabel, Value};
