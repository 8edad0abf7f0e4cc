use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relational::json::ValueDoc;
use crate::relational::{TupleId, Value};

use super::polynomial::{Polynomial, WitnessBasis};

/// How much provenance the chase keeps, ordered from weakest to strongest.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProvenanceMode {
    #[default]
    None,
    Where,
    Why,
    How,
}

impl ProvenanceMode {
    pub const ALL: [ProvenanceMode; 4] = [
        ProvenanceMode::None,
        ProvenanceMode::Where,
        ProvenanceMode::Why,
        ProvenanceMode::How,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProvenanceMode::None => "none",
            ProvenanceMode::Where => "where",
            ProvenanceMode::Why => "why",
            ProvenanceMode::How => "how",
        }
    }

    /// why and how both identify the contributing tuples.
    pub fn identifies_tuples(self) -> bool {
        self >= ProvenanceMode::Why
    }
}

impl fmt::Display for ProvenanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProvenanceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProvenanceMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Schema(format!("unknown provenance mode {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Annotation {
    Where(BTreeSet<String>),
    Why(WitnessBasis),
    How(Polynomial),
}

impl Annotation {
    pub fn witnesses(&self) -> Option<WitnessBasis> {
        match self {
            Annotation::Where(_) => None,
            Annotation::Why(w) => Some(w.clone()),
            Annotation::How(p) => Some(p.witness_basis()),
        }
    }
}

impl fmt::Display for Annotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Annotation::Where(rels) => {
                let names: Vec<&str> = rels.iter().map(String::as_str).collect();
                write!(f, "{{{}}}", names.join(","))
            }
            Annotation::Why(w) => w.fmt(f),
            Annotation::How(p) => p.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedFact {
    pub relation: String,
    pub values: Vec<Value>,
    pub annotation: Annotation,
}

/// Annotations of one chase's output facts, keyed by output tuple id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProvenanceStore {
    mode: ProvenanceMode,
    entries: BTreeMap<TupleId, AnnotatedFact>,
    /// Relation of every source tuple id the annotations can mention.
    origins: BTreeMap<TupleId, String>,
}

impl ProvenanceStore {
    pub fn new(mode: ProvenanceMode) -> Self {
        ProvenanceStore {
            mode,
            ..Default::default()
        }
    }

    pub fn mode(&self) -> ProvenanceMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn set_origin(&mut self, id: TupleId, relation: &str) {
        if self.mode != ProvenanceMode::None {
            self.origins.insert(id, relation.to_string());
        }
    }

    pub fn origin(&self, id: &TupleId) -> Option<&str> {
        self.origins.get(id).map(String::as_str)
    }

    pub fn origins(&self) -> impl Iterator<Item = (&TupleId, &str)> {
        self.origins.iter().map(|(k, v)| (k, v.as_str()))
    }

    /// Records `how` projected to this store's mode. No-op in mode none.
    pub fn record(&mut self, id: TupleId, relation: &str, values: Vec<Value>, how: &Polynomial) {
        let annotation = match self.mode {
            ProvenanceMode::None => return,
            ProvenanceMode::Where => Annotation::Where(
                how.support()
                    .iter()
                    .filter_map(|i| self.origins.get(i).cloned())
                    .collect(),
            ),
            ProvenanceMode::Why => Annotation::Why(how.witness_basis()),
            ProvenanceMode::How => Annotation::How(how.clone()),
        };
        self.insert(
            id,
            AnnotatedFact {
                relation: relation.to_string(),
                values,
                annotation,
            },
        );
    }

    pub fn insert(&mut self, id: TupleId, fact: AnnotatedFact) {
        self.entries.insert(id, fact);
    }

    pub fn get(&self, id: &TupleId) -> Option<&AnnotatedFact> {
        self.entries.get(id)
    }

    pub fn annotation(&self, id: &TupleId) -> Option<&Annotation> {
        self.entries.get(id).map(|e| &e.annotation)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&TupleId, &AnnotatedFact)> {
        self.entries.iter()
    }

    /// Annotation of the stored fact with these values. Used when the fact at hand is a
    /// reconstruction whose id differs from the annotated one.
    pub fn lookup(&self, relation: &str, values: &[Value]) -> Option<&Annotation> {
        self.entries
            .values()
            .find(|e| e.relation == relation && e.values == values)
            .map(|e| &e.annotation)
    }

    /// Annotation by id, falling back to a lookup by value.
    pub fn resolve(&self, id: &TupleId, relation: &str, values: &[Value]) -> Option<&Annotation> {
        match self.entries.get(id) {
            Some(e) if e.relation == relation && e.values == values => Some(&e.annotation),
            _ => self.lookup(relation, values),
        }
    }

    /// Source relations an annotation points back to.
    pub fn origin_relations(&self, annotation: &Annotation) -> BTreeSet<String> {
        match annotation {
            Annotation::Where(rels) => rels.clone(),
            other => other
                .witnesses()
                .into_iter()
                .flat_map(|w| w.0.into_iter().flatten())
                .filter_map(|id| self.origins.get(&id).cloned())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OriginDoc {
    id: String,
    relation: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnnotationDoc {
    id: String,
    relation: String,
    values: Vec<ValueDoc>,
    #[serde(rename = "where", default, skip_serializing_if = "Option::is_none")]
    where_: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    why: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    how: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StoreDoc {
    mode: ProvenanceMode,
    #[serde(default)]
    origins: Vec<OriginDoc>,
    #[serde(default)]
    annotations: Vec<AnnotationDoc>,
}

impl ProvenanceStore {
    /// `{"mode": "how", "origins": [{"id","relation"}], "annotations": [{"id","relation","values","how": "r1*s1"}]}`;
    /// where- and why-stores use `"where": [relation]` and `"why": [[id]]` instead of `"how"`.
    pub fn to_json(&self) -> String {
        let doc = StoreDoc {
            mode: self.mode,
            origins: self
                .origins
                .iter()
                .map(|(id, rel)| OriginDoc {
                    id: id.to_string(),
                    relation: rel.clone(),
                })
                .collect(),
            annotations: self
                .entries
                .iter()
                .map(|(id, e)| {
                    let mut d = AnnotationDoc {
                        id: id.to_string(),
                        relation: e.relation.clone(),
                        values: e.values.iter().map(ValueDoc::from).collect(),
                        where_: None,
                        why: None,
                        how: None,
                    };
                    match &e.annotation {
                        Annotation::Where(r) => d.where_ = Some(r.iter().cloned().collect()),
                        Annotation::Why(w) => {
                            d.why = Some(
                                w.witnesses()
                                    .map(|s| s.iter().map(ToString::to_string).collect())
                                    .collect(),
                            )
                        }
                        Annotation::How(p) => d.how = Some(p.to_string()),
                    }
                    d
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("store serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: StoreDoc = serde_json::from_str(text)?;
        let mut store = ProvenanceStore::new(doc.mode);
        for o in doc.origins {
            store.origins.insert(o.id.parse()?, o.relation);
        }
        for a in doc.annotations {
            let annotation = match (doc.mode, a.where_, a.why, a.how) {
                (ProvenanceMode::Where, Some(r), None, None) => {
                    Annotation::Where(r.into_iter().collect())
                }
                (ProvenanceMode::Why, None, Some(w), None) => {
                    let mut basis = BTreeSet::new();
                    for witness in w {
                        basis.insert(
                            witness
                                .iter()
                                .map(|s| s.parse())
                                .collect::<Result<BTreeSet<TupleId>>>()?,
                        );
                    }
                    Annotation::Why(WitnessBasis(basis))
                }
                (ProvenanceMode::How, None, None, Some(p)) => Annotation::How(p.parse()?),
                _ => {
                    return Err(Error::Json(format!(
                        "annotation of {} does not match store mode {}",
                        a.id, doc.mode
                    )))
                }
            };
            let values = a
                .values
                .iter()
                .map(ValueDoc::to_value)
                .collect::<Result<Vec<_>>>()?;
            store.insert(
                a.id.parse()?,
                AnnotatedFact {
                    relation: a.relation,
                    values,
                    annotation,
                },
            );
        }
        Ok(store)
    }
}
