use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::value::{NullAllocator, NullLabel, Value};

/// Identifier of a stored tuple, rendered `r1`, `s2`, ...
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TupleId {
    tag: String,
    ordinal: u64,
}

impl TupleId {
    pub fn new(tag: impl Into<String>, ordinal: u64) -> Self {
        TupleId {
            tag: tag.into(),
            ordinal,
        }
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn ordinal(&self) -> u64 {
        self.ordinal
    }
}

impl fmt::Display for TupleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.tag, self.ordinal)
    }
}

impl FromStr for TupleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let split = s
            .find(|c: char| c.is_ascii_digit())
            .ok_or_else(|| Error::MalformedTupleId(s.to_string()))?;
        let (tag, digits) = s.split_at(split);
        if tag.is_empty() || !tag.chars().all(|c| c.is_alphabetic() || c == '_') {
            return Err(Error::MalformedTupleId(s.to_string()));
        }
        let ordinal: u64 = digits
            .parse()
            .map_err(|_| Error::MalformedTupleId(s.to_string()))?;
        if ordinal == 0 {
            return Err(Error::MalformedTupleId(s.to_string()));
        }
        Ok(TupleId::new(tag, ordinal))
    }
}

/// Hands out tuple ids that are unique per tag for the lifetime of one run.
#[derive(Debug, Clone, Default)]
pub struct IdAllocator {
    last: BTreeMap<String, u64>,
}

impl IdAllocator {
    pub fn observe(&mut self, id: &TupleId) {
        let slot = self.last.entry(id.tag.clone()).or_insert(0);
        *slot = (*slot).max(id.ordinal);
    }

    pub fn fresh(&mut self, tag: &str) -> TupleId {
        let slot = self.last.entry(tag.to_string()).or_insert(0);
        *slot += 1;
        TupleId::new(tag, *slot)
    }

    /// Fresh id tagged after the relation name (`T` -> `t1`, `R'` -> `r3`).
    pub fn fresh_for(&mut self, relation: &str) -> TupleId {
        let tag = relation
            .chars()
            .find(|c| c.is_alphabetic())
            .map(|c| c.to_lowercase().collect::<String>())
            .unwrap_or_else(|| "t".to_string());
        self.fresh(&tag)
    }
}

/// Mutable single-owner state of one pipeline run: fresh nulls and fresh tuple ids.
#[derive(Debug, Clone, Default)]
pub struct RunState {
    pub nulls: NullAllocator,
    pub ids: IdAllocator,
}

impl RunState {
    pub fn new() -> Self {
        Self::default()
    }

    /// State guaranteed not to collide with anything already present in `instances`.
    pub fn seeded_from<'a>(instances: impl IntoIterator<Item = &'a Instance>) -> Self {
        let mut state = RunState::new();
        for instance in instances {
            state.observe(instance);
        }
        state
    }

    pub fn observe(&mut self, instance: &Instance) {
        for fact in instance.facts() {
            self.ids.observe(&fact.id);
            for v in &fact.values {
                if let Value::Null(l) = v {
                    self.nulls.observe(*l);
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationSchema {
    pub name: String,
    pub attributes: Vec<String>,
}

impl RelationSchema {
    pub fn new(name: impl Into<String>, attributes: &[&str]) -> Self {
        RelationSchema {
            name: name.into(),
            attributes: attributes.iter().map(|a| a.to_string()).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.attributes.len()
    }

    pub fn position(&self, attribute: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a == attribute)
    }

    fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for a in &self.attributes {
            if !seen.insert(a) {
                return Err(Error::Schema(format!(
                    "attribute {a} appears twice in relation {}",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

/// A set of relation schemas keyed by name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Schema {
    relations: BTreeMap<String, RelationSchema>,
}

impl Schema {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_relations(relations: impl IntoIterator<Item = RelationSchema>) -> Result<Self> {
        let mut schema = Schema::new();
        for r in relations {
            schema.add(r)?;
        }
        Ok(schema)
    }

    pub fn add(&mut self, relation: RelationSchema) -> Result<()> {
        relation.validate()?;
        if self.relations.contains_key(&relation.name) {
            return Err(Error::Schema(format!(
                "relation {} declared twice",
                relation.name
            )));
        }
        self.relations.insert(relation.name.clone(), relation);
        Ok(())
    }

    pub fn remove(&mut self, name: &str) -> Option<RelationSchema> {
        self.relations.remove(name)
    }

    pub fn get(&self, name: &str) -> Option<&RelationSchema> {
        self.relations.get(name)
    }

    pub fn require(&self, name: &str) -> Result<&RelationSchema> {
        self.get(name)
            .ok_or_else(|| Error::Schema(format!("unknown relation {name}")))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.relations.contains_key(name)
    }

    pub fn relations(&self) -> impl Iterator<Item = &RelationSchema> {
        self.relations.values()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.relations.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .relations()
            .map(|r| format!("{}({})", r.name, r.attributes.join(",")))
            .collect();
        f.write_str(&parts.join(", "))
    }
}

/// One stored tuple of a relation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fact {
    pub relation: String,
    pub id: TupleId,
    pub values: Vec<Value>,
}

impl Fact {
    pub fn is_ground(&self) -> bool {
        self.values.iter().all(|v| !v.is_null())
    }
}

/// A database instance: relations holding identified tuples of constants and nulls.
///
/// Two tuples of one relation may carry the same values; they remain distinct through
/// their ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    schema: Schema,
    relations: BTreeMap<String, Vec<Fact>>,
}

impl Instance {
    pub fn empty(schema: Schema) -> Self {
        let relations = schema
            .names()
            .map(|n| (n.to_string(), Vec::new()))
            .collect();
        Instance { schema, relations }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn insert(&mut self, relation: &str, id: TupleId, values: Vec<Value>) -> Result<()> {
        let rs = self.schema.require(relation)?;
        if rs.arity() != values.len() {
            return Err(Error::Schema(format!(
                "relation {relation} has arity {}, tuple {id} has {} values",
                rs.arity(),
                values.len()
            )));
        }
        let facts = self.relations.entry(relation.to_string()).or_default();
        if facts.iter().any(|f| f.id == id) {
            return Err(Error::DuplicateTupleId(id, relation.to_string()));
        }
        facts.push(Fact {
            relation: relation.to_string(),
            id,
            values,
        });
        Ok(())
    }

    /// Convenience constructor used by fixtures and tests: `("R", "r1", &["1", "Alice"])`.
    pub fn with_facts(schema: Schema, facts: &[(&str, &str, &[&str])]) -> Result<Self> {
        let mut instance = Instance::empty(schema);
        for (rel, id, values) in facts {
            instance.insert(
                rel,
                id.parse()?,
                values.iter().map(|v| Value::constant(v)).collect(),
            )?;
        }
        Ok(instance)
    }

    pub fn relation(&self, name: &str) -> &[Fact] {
        self.relations.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn facts(&self) -> impl Iterator<Item = &Fact> {
        self.relations.values().flatten()
    }

    pub fn fact(&self, id: &TupleId) -> Option<&Fact> {
        self.facts().find(|f| &f.id == id)
    }

    /// Total fact count |I| across relations, duplicates included.
    pub fn len(&self) -> usize {
        self.relations.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_ground(&self) -> bool {
        self.facts().all(Fact::is_ground)
    }

    pub fn nulls(&self) -> BTreeSet<NullLabel> {
        self.facts()
            .flat_map(|f| f.values.iter().filter_map(Value::null_label))
            .collect()
    }

    /// Keeps only the facts accepted by `keep`.
    pub fn retain(&mut self, mut keep: impl FnMut(&Fact) -> bool) {
        for facts in self.relations.values_mut() {
            facts.retain(|f| keep(f));
        }
    }

    /// Facts of one relation in normalized order: by values, then by id.
    pub fn sorted_relation(&self, name: &str) -> Vec<&Fact> {
        let mut facts: Vec<&Fact> = self.relation(name).iter().collect();
        facts.sort_by(|a, b| a.values.cmp(&b.values).then_with(|| a.id.cmp(&b.id)));
        facts
    }
}

/// Sort key that ignores null labels: constants keep their value, every null is the same.
fn shape(values: &[Value]) -> Vec<Option<&super::value::Constant>> {
    values.iter().map(Value::as_constant).collect()
}

/// Canonical form: facts sorted by values then id, nulls renumbered 1..k.
///
/// Labels are assigned in first-occurrence order over a label-independent ordering
/// (value shape, then id), so the result does not depend on the incoming labels and
/// `normalize` is idempotent.
pub fn normalize(instance: &Instance) -> Instance {
    canonicalize(instance, true)
}

fn canonicalize(instance: &Instance, tie_break_by_id: bool) -> Instance {
    let mut order: Vec<(&String, Vec<&Fact>)> = instance
        .relations
        .iter()
        .map(|(name, facts)| {
            let mut facts: Vec<&Fact> = facts.iter().collect();
            facts.sort_by(|a, b| {
                let by_shape = shape(&a.values).cmp(&shape(&b.values));
                let tie = if tie_break_by_id {
                    a.id.cmp(&b.id).then_with(|| a.values.cmp(&b.values))
                } else {
                    a.values.cmp(&b.values).then_with(|| a.id.cmp(&b.id))
                };
                by_shape.then(tie)
            });
            (name, facts)
        })
        .collect();
    order.sort_by(|a, b| a.0.cmp(b.0));

    let mut relabel: HashMap<NullLabel, NullLabel> = HashMap::new();
    let mut relations = BTreeMap::new();
    for (name, facts) in order {
        let mut out: Vec<Fact> = facts
            .into_iter()
            .map(|f| Fact {
                relation: f.relation.clone(),
                id: f.id.clone(),
                values: f
                    .values
                    .iter()
                    .map(|v| match v {
                        Value::Null(l) => {
                            let next = relabel.len() as NullLabel + 1;
                            Value::Null(*relabel.entry(*l).or_insert(next))
                        }
                        c => c.clone(),
                    })
                    .collect(),
            })
            .collect();
        out.sort_by(|a, b| a.values.cmp(&b.values).then_with(|| a.id.cmp(&b.id)));
        relations.insert(name.clone(), out);
    }
    Instance {
        schema: instance.schema.clone(),
        relations,
    }
}

/// Per-relation value-vector multisets of the id-independent canonical form.
fn canonical_values(instance: &Instance) -> BTreeMap<String, Vec<Vec<Value>>> {
    canonicalize(instance, false)
        .relations
        .into_iter()
        .map(|(name, facts)| (name, facts.into_iter().map(|f| f.values).collect()))
        .collect()
}

pub(crate) fn check_same_schema(a: &Instance, b: &Instance) -> Result<()> {
    if a.schema != b.schema {
        return Err(Error::Incomparable(format!(
            "schemas differ: [{}] vs [{}]",
            a.schema, b.schema
        )));
    }
    Ok(())
}

/// Exactness test: equal value multisets per relation after canonical null relabeling.
/// Tuple ids are ignored.
pub fn instances_equal(a: &Instance, b: &Instance) -> Result<bool> {
    check_same_schema(a, b)?;
    Ok(canonical_values(a) == canonical_values(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn join_schema() -> Schema {
        Schema::from_relations([
            RelationSchema::new("R", &["id", "name"]),
            RelationSchema::new("V", &["name", "subject"]),
        ])
        .unwrap()
    }

    fn join_source() -> Instance {
        Instance::with_facts(
            join_schema(),
            &[
                ("R", "r1", &["1", "Alice"]),
                ("R", "r2", &["2", "Bob"]),
                ("V", "s1", &["Alice", "Math"]),
                ("V", "s2", &["Alice", "IT"]),
            ],
        )
        .unwrap()
    }

    fn unary(values: &[Value]) -> Instance {
        let schema = Schema::from_relations([RelationSchema::new("R", &["a", "b"])]).unwrap();
        let mut i = Instance::empty(schema);
        for (n, v) in values.chunks(2).enumerate() {
            i.insert("R", TupleId::new("r", n as u64 + 1), v.to_vec())
                .unwrap();
        }
        i
    }

    #[test]
    fn tuple_ids_render_and_parse() {
        let id: TupleId = "s12".parse().unwrap();
        assert_eq!(id, TupleId::new("s", 12));
        assert_eq!(id.to_string(), "s12");
        assert!("12".parse::<TupleId>().is_err());
        assert!("r0".parse::<TupleId>().is_err());
        assert!("r".parse::<TupleId>().is_err());
    }

    #[test]
    fn allocator_never_reuses_observed_ids() {
        let mut ids = IdAllocator::default();
        ids.observe(&TupleId::new("r", 3));
        assert_eq!(ids.fresh_for("R'"), TupleId::new("r", 4));
        assert_eq!(ids.fresh_for("T"), TupleId::new("t", 1));
    }

    #[test]
    fn arity_and_id_uniqueness_enforced() {
        let mut i = Instance::empty(join_schema());
        assert!(i
            .insert("R", TupleId::new("r", 1), vec![Value::constant("1")])
            .is_err());
        i.insert(
            "R",
            TupleId::new("r", 1),
            vec![Value::constant("1"), Value::constant("A")],
        )
        .unwrap();
        let dup = i.insert(
            "R",
            TupleId::new("r", 1),
            vec![Value::constant("2"), Value::constant("B")],
        );
        assert!(matches!(dup, Err(Error::DuplicateTupleId(_, _))));
        assert!(i.insert("X", TupleId::new("x", 1), vec![]).is_err());
    }

    #[test]
    fn value_duplicates_with_distinct_ids_allowed() {
        let schema = Schema::from_relations([RelationSchema::new("T", &["name", "sum"])]).unwrap();
        let i = Instance::with_facts(
            schema,
            &[("T", "r1", &["Alice", "5.0"]), ("T", "r3", &["Alice", "5.0"])],
        )
        .unwrap();
        assert_eq!(i.len(), 2);
    }

    #[test]
    fn normalize_is_identity_on_canonical_input() {
        let n = normalize(&join_source());
        assert_eq!(normalize(&n), n);
    }

    #[test]
    fn normalize_renumbers_nulls_by_first_occurrence() {
        let i = unary(&[
            Value::constant("a"),
            Value::Null(7),
            Value::constant("b"),
            Value::Null(3),
        ]);
        let n = normalize(&i);
        let labels: Vec<_> = n.relation("R").iter().map(|f| f.values[1].clone()).collect();
        assert_eq!(labels, vec![Value::Null(1), Value::Null(2)]);
    }

    #[test]
    fn normalize_merge_column_reconstruction_keeps_shape() {
        let schema =
            Schema::from_relations([RelationSchema::new("R", &["name", "mod1", "mod2"])]).unwrap();
        let mut i = Instance::empty(schema);
        i.insert(
            "R",
            TupleId::new("r", 4),
            vec![Value::constant("Bob"), Value::Null(13), Value::Null(14)],
        )
        .unwrap();
        i.insert(
            "R",
            TupleId::new("r", 5),
            vec![Value::constant("Alice"), Value::Null(11), Value::Null(12)],
        )
        .unwrap();
        let n = normalize(&i);
        let rows: Vec<Vec<String>> = n
            .relation("R")
            .iter()
            .map(|f| f.values.iter().map(|v| v.to_string()).collect())
            .collect();
        assert_eq!(
            rows,
            vec![vec!["Alice", "η1", "η2"], vec!["Bob", "η3", "η4"]]
        );
    }

    #[test]
    fn equality_is_reflexive_and_detects_missing_tuples() {
        let i = join_source();
        assert!(instances_equal(&i, &i).unwrap());
        let mut partial = i.clone();
        partial.retain(|f| f.id != TupleId::new("r", 2));
        assert!(!instances_equal(&i, &partial).unwrap());
    }

    #[test]
    fn equality_ignores_null_labels_and_ids() {
        let a = unary(&[Value::constant("1"), Value::Null(1)]);
        let b = unary(&[Value::constant("1"), Value::Null(9)]);
        assert!(instances_equal(&a, &b).unwrap());
    }

    #[test]
    fn equality_rejects_schema_mismatch() {
        let a = join_source();
        let b = unary(&[]);
        assert!(matches!(instances_equal(&a, &b), Err(Error::Incomparable(_))));
    }
}
