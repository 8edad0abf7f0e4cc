use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::provenance::{Monomial, Polynomial, ProvenanceMode, ProvenanceStore};
use crate::relational::{Constant, Fact, Instance, NullLabel, RunState, TupleId, Value};
use crate::smo::FunctionRegistry;

use super::tgd::{Condition, SchemaMapping, StTgd, Term};

/// What to do when a function term receives a labeled null.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum FunctionPolicy {
    /// Fail with [`Error::NonGroundFunctionInput`].
    #[default]
    Strict,
    /// Substitute a null, memoized per function and argument vector, so equal unknown
    /// inputs give the same unknown output. Used when chasing reconstructions.
    Skolem,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChaseOptions {
    pub mode: ProvenanceMode,
    pub functions: FunctionPolicy,
}

#[derive(Debug, Clone)]
pub struct ChaseOutput {
    pub instance: Instance,
    pub store: ProvenanceStore,
    /// How-polynomial of every output fact, whatever the store keeps.
    pub how: BTreeMap<TupleId, Polynomial>,
    /// Nulls introduced by [`FunctionPolicy::Skolem`] in place of function results.
    pub unknowns: BTreeSet<NullLabel>,
    pub triggers: usize,
}

/// One homomorphic assignment of a tgd body into an instance.
#[derive(Debug, Clone)]
pub struct Match<'a> {
    pub bindings: HashMap<&'a str, Value>,
    pub facts: Vec<&'a Fact>,
}

/// All body matches of `tgd` that satisfy its conditions, atoms matched left to right over
/// facts in value order.
pub fn body_matches<'a>(instance: &'a Instance, tgd: &'a StTgd) -> Result<Vec<Match<'a>>> {
    let mut relations = Vec::with_capacity(tgd.body().len());
    for atom in tgd.body() {
        let rs = instance.schema().require(&atom.relation)?;
        if rs.arity() != atom.terms.len() {
            return Err(Error::Schema(format!(
                "body atom {atom} does not fit {}({})",
                rs.name,
                rs.attributes.join(",")
            )));
        }
        relations.push(instance.sorted_relation(&atom.relation));
    }
    let mut out = Vec::new();
    let mut current = Match {
        bindings: HashMap::new(),
        facts: Vec::new(),
    };
    extend(tgd, &relations, 0, &mut current, &mut out);
    Ok(out)
}

fn extend<'a>(
    tgd: &'a StTgd,
    relations: &[Vec<&'a Fact>],
    depth: usize,
    current: &mut Match<'a>,
    out: &mut Vec<Match<'a>>,
) {
    if depth == relations.len() {
        if tgd.conditions().iter().all(|c| condition_holds(c, &current.bindings)) {
            out.push(current.clone());
        }
        return;
    }
    let atom = &tgd.body()[depth];
    for fact in &relations[depth] {
        let mut bound = Vec::new();
        let ok = atom.terms.iter().zip(&fact.values).all(|(t, v)| match t {
            Term::Var(name) => match current.bindings.get(name.as_str()) {
                Some(existing) => existing == v,
                None => {
                    current.bindings.insert(name, v.clone());
                    bound.push(name.as_str());
                    true
                }
            },
            Term::Const(c) => v.as_constant() == Some(c),
            Term::Func { .. } => false,
        });
        if ok {
            current.facts.push(fact);
            extend(tgd, relations, depth + 1, current, out);
            current.facts.pop();
        }
        for name in bound {
            current.bindings.remove(name);
        }
    }
}

fn condition_value<'b>(t: &'b Term, bindings: &'b HashMap<&str, Value>) -> Option<&'b Constant> {
    match t {
        Term::Var(v) => bindings.get(v.as_str()).and_then(Value::as_constant),
        Term::Const(c) => Some(c),
        Term::Func { .. } => None,
    }
}

/// Comparisons touching a null are false.
fn condition_holds(c: &Condition, bindings: &HashMap<&str, Value>) -> bool {
    match (condition_value(&c.left, bindings), condition_value(&c.right, bindings)) {
        (Some(l), Some(r)) => c.op.holds(l.compare(r)),
        _ => false,
    }
}

/// Ids of every tuple used by at least one trigger of `mapping`.
pub fn matched_tuple_ids(instance: &Instance, mapping: &SchemaMapping) -> Result<BTreeSet<TupleId>> {
    let mut ids = BTreeSet::new();
    for tgd in &mapping.sigma {
        for m in body_matches(instance, tgd)? {
            ids.extend(m.facts.iter().map(|f| f.id.clone()));
        }
    }
    Ok(ids)
}

struct Evaluator<'r> {
    registry: &'r FunctionRegistry,
    policy: FunctionPolicy,
    skolem: HashMap<(String, Vec<Value>), Value>,
    unknowns: BTreeSet<NullLabel>,
}

impl Evaluator<'_> {
    fn eval(
        &mut self,
        t: &Term,
        bindings: &HashMap<&str, Value>,
        fresh: &HashMap<&str, Value>,
        state: &mut RunState,
    ) -> Result<Value> {
        match t {
            Term::Var(v) => bindings
                .get(v.as_str())
                .or_else(|| fresh.get(v.as_str()))
                .cloned()
                .ok_or_else(|| Error::InvalidDependency(format!("unbound variable {v}"))),
            Term::Const(c) => Ok(Value::Const(c.clone())),
            Term::Func { name, args } => {
                let vals = args
                    .iter()
                    .map(|a| self.eval(a, bindings, fresh, state))
                    .collect::<Result<Vec<_>>>()?;
                if !self.registry.contains(name) {
                    return Err(Error::UnregisteredFunction(name.clone()));
                }
                if vals.iter().any(Value::is_null) {
                    return match self.policy {
                        FunctionPolicy::Strict => Err(Error::NonGroundFunctionInput(format!(
                            "{t} with arguments ({})",
                            vals.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
                        ))),
                        FunctionPolicy::Skolem => {
                            let key = (name.clone(), vals);
                            if let Some(v) = self.skolem.get(&key) {
                                return Ok(v.clone());
                            }
                            let v = state.nulls.fresh();
                            self.unknowns.insert(v.null_label().expect("fresh null"));
                            self.skolem.insert(key, v.clone());
                            Ok(v)
                        }
                    };
                }
                let consts: Vec<Constant> = vals
                    .into_iter()
                    .map(|v| v.as_constant().cloned().expect("checked ground"))
                    .collect();
                self.registry.apply(name, &consts).map(Value::Const)
            }
        }
    }
}

/// Chases `instance` with the s-t tgds of `mapping` under the strict function policy.
pub fn chase(
    instance: &Instance,
    mapping: &SchemaMapping,
    mode: ProvenanceMode,
    registry: &FunctionRegistry,
    state: &mut RunState,
) -> Result<(Instance, ProvenanceStore)> {
    let out = chase_with(
        instance,
        mapping,
        ChaseOptions {
            mode,
            functions: FunctionPolicy::Strict,
        },
        registry,
        state,
    )?;
    Ok((out.instance, out.store))
}

pub fn chase_with(
    instance: &Instance,
    mapping: &SchemaMapping,
    options: ChaseOptions,
    registry: &FunctionRegistry,
    state: &mut RunState,
) -> Result<ChaseOutput> {
    state.observe(instance);
    let mut evaluator = Evaluator {
        registry,
        policy: options.functions,
        skolem: HashMap::new(),
        unknowns: BTreeSet::new(),
    };
    // Output facts in creation order, merged by (relation, values).
    let mut order: Vec<(String, Vec<Value>)> = Vec::new();
    let mut merged: HashMap<(String, Vec<Value>), Polynomial> = HashMap::new();
    let mut triggers = 0;

    for tgd in &mapping.sigma {
        for m in body_matches(instance, tgd)? {
            triggers += 1;
            let fresh: HashMap<&str, Value> = tgd
                .existentials()
                .iter()
                .map(|v| (v.as_str(), state.nulls.fresh()))
                .collect();
            let monomial = Polynomial::from_monomial(
                Monomial::of(m.facts.iter().map(|f| f.id.clone())),
                1,
            );
            let mut produced: BTreeSet<(String, Vec<Value>)> = BTreeSet::new();
            for atom in tgd.head() {
                let values = atom
                    .terms
                    .iter()
                    .map(|t| evaluator.eval(t, &m.bindings, &fresh, state))
                    .collect::<Result<Vec<_>>>()?;
                produced.insert((atom.relation.clone(), values));
            }
            for key in produced {
                match merged.get_mut(&key) {
                    Some(p) => *p = p.add(&monomial),
                    None => {
                        merged.insert(key.clone(), monomial.clone());
                        order.push(key);
                    }
                }
            }
        }
    }

    let mut target = Instance::empty(mapping.target.clone());
    let mut store = ProvenanceStore::new(options.mode);
    for fact in instance.facts() {
        store.set_origin(fact.id.clone(), &fact.relation);
    }
    let mut how = BTreeMap::new();
    for (relation, values) in order {
        let poly = merged
            .remove(&(relation.clone(), values.clone()))
            .expect("every ordered key is merged");
        let id = state.ids.fresh_for(&relation);
        store.record(id.clone(), &relation, values.clone(), &poly);
        target.insert(&relation, id.clone(), values)?;
        how.insert(id, poly);
    }
    Ok(ChaseOutput {
        instance: target,
        store,
        how,
        unknowns: evaluator.unknowns,
        triggers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relational::{instances_equal, RelationSchema, Schema};

    fn schema(rels: &[(&str, &[&str])]) -> Schema {
        Schema::from_relations(rels.iter().map(|(n, a)| RelationSchema::new(*n, a))).unwrap()
    }

    fn join_example() -> (Instance, SchemaMapping) {
        let s = schema(&[("R", &["id", "name"]), ("V", &["name", "subject"])]);
        let t = schema(&[("T", &["id", "name", "subject"])]);
        let i = Instance::with_facts(
            s.clone(),
            &[
                ("R", "r1", &["1", "Alice"]),
                ("R", "r2", &["2", "Bob"]),
                ("V", "s1", &["Alice", "Math"]),
                ("V", "s2", &["Alice", "IT"]),
            ],
        )
        .unwrap();
        let m = SchemaMapping::parse(s, t, &["R(a,b) AND V(b,c) -> T(a,b,c)"]).unwrap();
        (i, m)
    }

    fn rendered(out: &ChaseOutput) -> Vec<String> {
        out.instance
            .facts()
            .map(|f| {
                let vals: Vec<String> = f.values.iter().map(ToString::to_string).collect();
                format!("{}({})@{}", f.relation, vals.join(","), out.how[&f.id])
            })
            .collect()
    }

    #[test]
    fn join_annotations_are_products() {
        let (i, m) = join_example();
        let opts = ChaseOptions {
            mode: ProvenanceMode::How,
            ..Default::default()
        };
        let out = chase_with(&i, &m, opts, &FunctionRegistry::builtin(), &mut RunState::new())
            .unwrap();
        let mut got = rendered(&out);
        got.sort();
        assert_eq!(got, vec!["T(1,Alice,IT)@r1*s2", "T(1,Alice,Math)@r1*s1"]);
        assert_eq!(out.triggers, 2);
    }

    #[test]
    fn equality_spelling_of_the_join_agrees() {
        let (i, m) = join_example();
        let explicit = SchemaMapping::parse(
            m.source.clone(),
            m.target.clone(),
            &["R(a,b) AND V(c,d) AND b = c -> T(a,b,d)"],
        )
        .unwrap();
        let reg = FunctionRegistry::builtin();
        let (a, _) = chase(&i, &m, ProvenanceMode::None, &reg, &mut RunState::new()).unwrap();
        let (b, _) = chase(&i, &explicit, ProvenanceMode::None, &reg, &mut RunState::new()).unwrap();
        assert!(instances_equal(&a, &b).unwrap());
    }

    #[test]
    fn merged_duplicates_sum_their_monomials() {
        let s = schema(&[("R", &["name", "mod1", "mod2"])]);
        let t = schema(&[("T", &["name", "sum"])]);
        let i = Instance::with_facts(
            s.clone(),
            &[
                ("R", "r1", &["Alice", "1.7", "3.3"]),
                ("R", "r2", &["Bob", "2.0", "2.7"]),
                ("R", "r3", &["Alice", "3.0", "2.0"]),
            ],
        )
        .unwrap();
        let m = SchemaMapping::parse(s, t, &["R(a,b,c) -> T(a,dec_add(b,c))"]).unwrap();
        let opts = ChaseOptions {
            mode: ProvenanceMode::How,
            ..Default::default()
        };
        let out = chase_with(&i, &m, opts, &FunctionRegistry::builtin(), &mut RunState::new())
            .unwrap();
        let mut got = rendered(&out);
        got.sort();
        assert_eq!(got, vec!["T(Alice,5.0)@r1 + r3", "T(Bob,4.7)@r2"]);
    }

    #[test]
    fn existentials_get_one_null_per_trigger() {
        let s = schema(&[("T", &["a", "g"])]);
        let t = schema(&[("R", &["a", "b", "c"])]);
        let i = Instance::with_facts(s.clone(), &[("T", "t1", &["x", "1"]), ("T", "t2", &["y", "1"])])
            .unwrap();
        let m = SchemaMapping::parse(s, t, &["T(a,g) -> EXISTS D,E: R(a,D,E)"]).unwrap();
        let (j, _) = chase(&i, &m, ProvenanceMode::None, &FunctionRegistry::builtin(), &mut RunState::new())
            .unwrap();
        assert_eq!(j.nulls().len(), 4);
        assert!(j.facts().all(|f| f.values[1] != f.values[2]));
    }

    #[test]
    fn function_over_null_is_an_error_unless_skolemized() {
        let s = schema(&[("R", &["a", "b", "c"])]);
        let t = schema(&[("T", &["a", "g"])]);
        let mut i = Instance::empty(s.clone());
        i.insert("R", "r1".parse().unwrap(), vec![Value::constant("x"), Value::Null(1), Value::constant("2")])
            .unwrap();
        i.insert("R", "r2".parse().unwrap(), vec![Value::constant("y"), Value::Null(1), Value::constant("2")])
            .unwrap();
        let m = SchemaMapping::parse(s, t, &["R(a,b,c) -> T(a,dec_add(b,c))"]).unwrap();
        let reg = FunctionRegistry::builtin();
        let strict = chase(&i, &m, ProvenanceMode::None, &reg, &mut RunState::new());
        assert!(matches!(strict, Err(Error::NonGroundFunctionInput(_))));
        let opts = ChaseOptions {
            functions: FunctionPolicy::Skolem,
            ..Default::default()
        };
        let out = chase_with(&i, &m, opts, &reg, &mut RunState::new()).unwrap();
        assert_eq!(out.unknowns.len(), 1);
        let sums: BTreeSet<&Value> = out.instance.facts().map(|f| &f.values[1]).collect();
        assert_eq!(sums.len(), 1);
    }

    #[test]
    fn unregistered_function_fails() {
        let s = schema(&[("R", &["a"])]);
        let t = schema(&[("T", &["a"])]);
        let i = Instance::with_facts(s.clone(), &[("R", "r1", &["1"])]).unwrap();
        let m = SchemaMapping::parse(s, t, &["R(a) -> T(mystery(a))"]).unwrap();
        let e = chase(&i, &m, ProvenanceMode::None, &FunctionRegistry::builtin(), &mut RunState::new());
        assert!(matches!(e, Err(Error::UnregisteredFunction(_))));
    }

    #[test]
    fn conditions_over_nulls_are_false() {
        let s = schema(&[("R", &["a", "c"])]);
        let t = schema(&[("T", &["a", "c"])]);
        let mut i = Instance::with_facts(s.clone(), &[("R", "r1", &["1", "Math"])]).unwrap();
        i.insert("R", "r2".parse().unwrap(), vec![Value::constant("2"), Value::Null(5)])
            .unwrap();
        let eq = SchemaMapping::parse(s.clone(), t.clone(), &["R(a,c) AND c = 'Math' -> T(a,c)"])
            .unwrap();
        let ne = SchemaMapping::parse(
            s,
            t,
            &["R(a,c) AND c < 'Math' -> T(a,c)", "R(a,c) AND c > 'Math' -> T(a,c)"],
        )
        .unwrap();
        let reg = FunctionRegistry::builtin();
        assert_eq!(chase(&i, &eq, ProvenanceMode::None, &reg, &mut RunState::new()).unwrap().0.len(), 1);
        assert_eq!(chase(&i, &ne, ProvenanceMode::None, &reg, &mut RunState::new()).unwrap().0.len(), 0);
    }

    #[test]
    fn missing_body_relation_fails() {
        let (i, _) = join_example();
        let m = SchemaMapping::parse(
            schema(&[("X", &["a"])]),
            schema(&[("T", &["a"])]),
            &["X(a) -> T(a)"],
        )
        .unwrap();
        assert!(chase(&i, &m, ProvenanceMode::None, &FunctionRegistry::builtin(), &mut RunState::new()).is_err());
    }

    #[test]
    fn dangling_ids() {
        let (i, m) = join_example();
        let used = matched_tuple_ids(&i, &m).unwrap();
        let names: Vec<String> = used.iter().map(ToString::to_string).collect();
        assert_eq!(names, vec!["r1", "s1", "s2"]);
    }
}
