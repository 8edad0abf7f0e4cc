//! The instance document format.
//!
//! ```json
//! {"relations": [{"name": "R", "attributes": ["id", "name"],
//!   "tuples": [{"id": "r1", "values": [{"const": "1"}, {"null": 3}]}]}]}
//! ```
//!
//! Constant kinds are not spelled out; they are inferred from the lexical form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::instance::{Instance, RelationSchema, Schema};
use super::value::{Constant, Value};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueDoc {
    Const(String),
    Null(u64),
}

impl From<&Value> for ValueDoc {
    fn from(v: &Value) -> Self {
        match v {
            Value::Const(c) => ValueDoc::Const(c.lexical().to_string()),
            Value::Null(l) => ValueDoc::Null(*l),
        }
    }
}

impl ValueDoc {
    pub fn to_value(&self) -> Result<Value> {
        match self {
            ValueDoc::Const(s) => Ok(Value::Const(Constant::parse(s))),
            ValueDoc::Null(0) => Err(Error::Schema("null labels must be positive".into())),
            ValueDoc::Null(l) => Ok(Value::Null(*l)),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleDoc {
    pub id: String,
    pub values: Vec<ValueDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationDoc {
    pub name: String,
    pub attributes: Vec<String>,
    #[serde(default)]
    pub tuples: Vec<TupleDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub relations: Vec<RelationDoc>,
}

/// Schema-only relation entry, used by mapping documents.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationSchemaDoc {
    pub name: String,
    pub attributes: Vec<String>,
}

impl From<&Instance> for InstanceDoc {
    fn from(instance: &Instance) -> Self {
        InstanceDoc {
            relations: instance
                .schema()
                .relations()
                .map(|rs| RelationDoc {
                    name: rs.name.clone(),
                    attributes: rs.attributes.clone(),
                    tuples: instance
                        .relation(&rs.name)
                        .iter()
                        .map(|f| TupleDoc {
                            id: f.id.to_string(),
                            values: f.values.iter().map(ValueDoc::from).collect(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<&InstanceDoc> for Instance {
    type Error = Error;

    fn try_from(doc: &InstanceDoc) -> Result<Self> {
        let schema = Schema::from_relations(doc.relations.iter().map(|r| RelationSchema {
            name: r.name.clone(),
            attributes: r.attributes.clone(),
        }))?;
        let mut instance = Instance::empty(schema);
        for r in &doc.relations {
            for t in &r.tuples {
                let values = t
                    .values
                    .iter()
                    .map(ValueDoc::to_value)
                    .collect::<Result<Vec<_>>>()?;
                instance.insert(&r.name, t.id.parse()?, values)?;
            }
        }
        Ok(instance)
    }
}

pub fn schema_to_docs(schema: &Schema) -> Vec<RelationSchemaDoc> {
    schema
        .relations()
        .map(|r| RelationSchemaDoc {
            name: r.name.clone(),
            attributes: r.attributes.clone(),
        })
        .collect()
}

pub fn schema_from_docs(docs: &[RelationSchemaDoc]) -> Result<Schema> {
    Schema::from_relations(docs.iter().map(|r| RelationSchema {
        name: r.name.clone(),
        attributes: r.attributes.clone(),
    }))
}

pub fn instance_from_json(text: &str) -> Result<Instance> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    Instance::try_from(&doc)
}

/// Pretty-printed document; relations in name order, tuples in stored order.
pub fn instance_to_json(instance: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceDoc::from(instance)).expect("instance serializes")
}
