use serde::{Deserialize, Serialize};

use crate::dependency::{matched_tuple_ids, SchemaMapping};
use crate::error::{Error, Result};
use crate::relational::json::ValueDoc;
use crate::relational::{Constant, Instance, RelationSchema, TupleId, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideTableKind {
    /// Whole source tuples that match no trigger of the forward mapping.
    Dangling,
    /// Selected attributes of every source tuple.
    Projection,
    /// Only the ids of the source tuples: enough to restore cardinality.
    Count,
}

/// What a side table keeps about one source relation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SideTableSpec {
    pub relation: String,
    pub kind: SideTableKind,
    pub attributes: Vec<String>,
}

impl SideTableSpec {
    pub fn dangling(relation: &RelationSchema) -> Self {
        SideTableSpec {
            relation: relation.name.clone(),
            kind: SideTableKind::Dangling,
            attributes: relation.attributes.clone(),
        }
    }

    pub fn projection(relation: &str, attributes: &[&str]) -> Self {
        SideTableSpec {
            relation: relation.to_string(),
            kind: SideTableKind::Projection,
            attributes: attributes.iter().map(|a| a.to_string()).collect(),
        }
    }

    /// Projection onto every attribute.
    pub fn full(relation: &RelationSchema) -> Self {
        SideTableSpec {
            relation: relation.name.clone(),
            kind: SideTableKind::Projection,
            attributes: relation.attributes.clone(),
        }
    }

    pub fn count(relation: &str) -> Self {
        SideTableSpec {
            relation: relation.to_string(),
            kind: SideTableKind::Count,
            attributes: Vec::new(),
        }
    }

    pub fn name(&self) -> String {
        let prefix = match self.kind {
            SideTableKind::Dangling => "dangling",
            SideTableKind::Projection => "side",
            SideTableKind::Count => "count",
        };
        format!("{prefix}_{}", self.relation)
    }

    /// Name of the reference column when the table is read as a relation.
    pub fn ref_column(&self) -> String {
        let mut col = "ref".to_string();
        while self.attributes.contains(&col) {
            col.push('_');
        }
        col
    }

    /// The table as a relation: the reference column followed by the kept attributes.
    pub fn relation_schema(&self) -> RelationSchema {
        let mut attributes = vec![self.ref_column()];
        attributes.extend(self.attributes.iter().cloned());
        RelationSchema {
            name: self.name(),
            attributes,
        }
    }

    /// Keeps every attribute of the relation.
    pub fn is_complete_for(&self, relation: &RelationSchema) -> bool {
        self.kind != SideTableKind::Count && self.attributes == relation.attributes
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideRow {
    pub reference: TupleId,
    pub values: Vec<Value>,
}

/// Attribute values persisted outside the target, keyed by the source tuple they came from.
/// References are provenance, not keys: distinct rows may carry equal values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideTable {
    pub spec: SideTableSpec,
    pub rows: Vec<SideRow>,
}

impl SideTable {
    pub fn name(&self) -> String {
        self.spec.name()
    }

    /// Rows as relation tuples: the reference rendered as a text constant, then the values.
    pub fn tuples(&self) -> impl Iterator<Item = Vec<Value>> + '_ {
        self.rows.iter().map(|r| {
            let mut t = vec![Value::Const(Constant::text(r.reference.to_string()))];
            t.extend(r.values.iter().cloned());
            t
        })
    }
}

/// Builds a side table from the source instance. `mapping` decides which tuples dangle.
pub fn build_side_table(
    source: &Instance,
    spec: &SideTableSpec,
    mapping: &SchemaMapping,
) -> Result<SideTable> {
    let rs = source.schema().require(&spec.relation)?;
    let positions = spec
        .attributes
        .iter()
        .map(|a| {
            rs.position(a).ok_or_else(|| {
                Error::Schema(format!("relation {} has no attribute {a}", rs.name))
            })
        })
        .collect::<Result<Vec<usize>>>()?;
    let keep: Box<dyn Fn(&TupleId) -> bool> = match spec.kind {
        SideTableKind::Dangling => {
            let used = matched_tuple_ids(source, mapping)?;
            Box::new(move |id| !used.contains(id))
        }
        SideTableKind::Projection | SideTableKind::Count => Box::new(|_| true),
    };
    let mut rows: Vec<SideRow> = source
        .relation(&spec.relation)
        .iter()
        .filter(|f| keep(&f.id))
        .map(|f| SideRow {
            reference: f.id.clone(),
            values: positions.iter().map(|&p| f.values[p].clone()).collect(),
        })
        .collect();
    rows.sort_by(|a, b| a.reference.cmp(&b.reference));
    Ok(SideTable {
        spec: spec.clone(),
        rows,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RowDoc {
    #[serde(rename = "ref")]
    reference: String,
    values: Vec<ValueDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableDoc {
    name: String,
    source: String,
    kind: SideTableKind,
    attributes: Vec<String>,
    tuples: Vec<RowDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TablesDoc {
    relations: Vec<TableDoc>,
}

/// `{"relations": [{"name", "source", "kind", "attributes", "tuples": [{"ref", "values"}]}]}`
pub fn side_tables_to_json(tables: &[SideTable]) -> String {
    let doc = TablesDoc {
        relations: tables
            .iter()
            .map(|t| TableDoc {
                name: t.name(),
                source: t.spec.relation.clone(),
                kind: t.spec.kind,
                attributes: t.spec.attributes.clone(),
                tuples: t
                    .rows
                    .iter()
                    .map(|r| RowDoc {
                        reference: r.reference.to_string(),
                        values: r.values.iter().map(ValueDoc::from).collect(),
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("side tables serialize")
}

pub fn side_tables_from_json(text: &str) -> Result<Vec<SideTable>> {
    let doc: TablesDoc = serde_json::from_str(text)?;
    doc.relations
        .into_iter()
        .map(|t| {
            let spec = SideTableSpec {
                relation: t.source,
                kind: t.kind,
                attributes: t.attributes,
            };
            if spec.name() != t.name {
                return Err(Error::Json(format!(
                    "side table {} should be named {}",
                    t.name,
                    spec.name()
                )));
            }
            let rows = t
                .tuples
                .into_iter()
                .map(|r| {
                    let values = r
                        .values
                        .iter()
                        .map(ValueDoc::to_value)
                        .collect::<Result<Vec<_>>>()?;
                    if values.len() != spec.attributes.len() {
                        return Err(Error::Json(format!(
                            "row {} of {} has {} values for {} attributes",
                            r.reference,
                            t.name,
                            values.len(),
                            spec.attributes.len()
                        )));
                    }
                    Ok(SideRow {
                        reference: r.reference.parse()?,
                        values,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SideTable { spec, rows })
        })
        .collect()
}
