use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::error::Result;
use crate::relational::{check_same_schema, Fact, Instance, NullLabel, Value};

/// Images of the domain's nulls; constants map to themselves.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Homomorphism {
    pub nulls: BTreeMap<NullLabel, Value>,
}

impl Homomorphism {
    pub fn apply(&self, v: &Value) -> Value {
        match v {
            Value::Null(l) => self.nulls.get(l).cloned().unwrap_or_else(|| v.clone()),
            c => c.clone(),
        }
    }

    /// Every fact of `from`, mapped, is a fact of `to` (by relation and values).
    pub fn maps_into(&self, from: &Instance, to: &Instance) -> bool {
        let present: HashSet<(&str, &[Value])> = to
            .facts()
            .map(|f| (f.relation.as_str(), f.values.as_slice()))
            .collect();
        from.facts().all(|f| {
            let image: Vec<Value> = f.values.iter().map(|v| self.apply(v)).collect();
            present.contains(&(f.relation.as_str(), image.as_slice()))
        })
    }
}

/// Search variants beyond a plain homomorphism.
#[derive(Debug, Clone, Default)]
pub struct SearchOptions {
    /// Codomain nulls standing for an unknown function result: each may absorb one
    /// value of the domain, consistently across facts.
    pub wildcards: BTreeSet<NullLabel>,
    /// Bijective on facts, nulls renamed injectively to nulls.
    pub isomorphism: bool,
}

pub fn find_homomorphism(from: &Instance, to: &Instance) -> Result<Option<Homomorphism>> {
    find_homomorphism_with(from, to, &SearchOptions::default())
}

/// Equal up to a renaming of nulls.
pub fn is_isomorphic(a: &Instance, b: &Instance) -> Result<bool> {
    let options = SearchOptions {
        isomorphism: true,
        ..SearchOptions::default()
    };
    Ok(find_homomorphism_with(a, b, &options)?.is_some())
}

struct Search<'a> {
    options: &'a SearchOptions,
    /// Remaining domain facts with their candidate images, fewest candidates first.
    goals: Vec<(&'a Fact, Vec<&'a Fact>)>,
    binding: HashMap<NullLabel, Value>,
    wild: HashMap<NullLabel, Value>,
    images: HashSet<NullLabel>,
    used: HashSet<*const Fact>,
}

enum Undo {
    Binding(NullLabel),
    Wild(NullLabel),
    Image(NullLabel),
}

impl<'a> Search<'a> {
    fn is_wild(&self, v: &Value) -> Option<NullLabel> {
        match v {
            Value::Null(l) if self.options.wildcards.contains(l) => Some(*l),
            _ => None,
        }
    }

    /// Position-wise compatibility before any binding.
    fn compatible(&self, d: &Fact, c: &Fact) -> bool {
        d.values.iter().zip(&c.values).all(|(dv, cv)| match dv {
            Value::Const(_) => dv == cv || self.is_wild(cv).is_some(),
            Value::Null(_) => !self.options.isomorphism || cv.is_null(),
        })
    }

    fn unify(&mut self, d: &Fact, c: &Fact, trail: &mut Vec<Undo>) -> bool {
        for (dv, cv) in d.values.iter().zip(&c.values) {
            match dv {
                Value::Const(_) => {
                    if dv == cv {
                        continue;
                    }
                    let Some(w) = self.is_wild(cv) else { return false };
                    match self.wild.get(&w) {
                        Some(bound) if bound == dv => {}
                        Some(_) => return false,
                        None => {
                            self.wild.insert(w, dv.clone());
                            trail.push(Undo::Wild(w));
                        }
                    }
                }
                Value::Null(l) => match self.binding.get(l) {
                    Some(bound) if bound == cv => {}
                    Some(_) => return false,
                    None => {
                        if self.options.isomorphism {
                            let Value::Null(target) = cv else { return false };
                            if !self.images.insert(*target) {
                                return false;
                            }
                            trail.push(Undo::Image(*target));
                        }
                        self.binding.insert(*l, cv.clone());
                        trail.push(Undo::Binding(*l));
                    }
                },
            }
        }
        true
    }

    fn undo(&mut self, trail: Vec<Undo>) {
        for u in trail.into_iter().rev() {
            match u {
                Undo::Binding(l) => {
                    self.binding.remove(&l);
                }
                Undo::Wild(l) => {
                    self.wild.remove(&l);
                }
                Undo::Image(l) => {
                    self.images.remove(&l);
                }
            }
        }
    }

    fn solve(&mut self, i: usize) -> bool {
        if i == self.goals.len() {
            return true;
        }
        let (d, candidates) = (self.goals[i].0, self.goals[i].1.clone());
        for c in candidates {
            let key = c as *const Fact;
            if self.options.isomorphism && self.used.contains(&key) {
                continue;
            }
            let mut trail = Vec::new();
            if self.unify(d, c, &mut trail) {
                if self.options.isomorphism {
                    self.used.insert(key);
                }
                if self.solve(i + 1) {
                    return true;
                }
                self.used.remove(&key);
            }
            self.undo(trail);
        }
        false
    }
}

/// Backtracking search over fact assignments. Domain facts are tried most-constrained
/// first; ground facts present verbatim in the codomain need no search.
pub fn find_homomorphism_with(
    from: &Instance,
    to: &Instance,
    options: &SearchOptions,
) -> Result<Option<Homomorphism>> {
    check_same_schema(from, to)?;
    if options.isomorphism {
        let nulls_match = from.nulls().len() == to.nulls().len();
        let sizes_match = from
            .schema()
            .names()
            .all(|r| from.relation(r).len() == to.relation(r).len());
        if !nulls_match || !sizes_match {
            return Ok(None);
        }
    }
    let present: HashSet<(&str, &[Value])> = to
        .facts()
        .map(|f| (f.relation.as_str(), f.values.as_slice()))
        .collect();
    let mut search = Search {
        options,
        goals: Vec::new(),
        binding: HashMap::new(),
        wild: HashMap::new(),
        images: HashSet::new(),
        used: HashSet::new(),
    };
    let mut seen: HashSet<(&str, &[Value])> = HashSet::new();
    let mut goals = Vec::new();
    for name in from.schema().names() {
        for d in from.sorted_relation(name) {
            let key = (d.relation.as_str(), d.values.as_slice());
            if !options.isomorphism {
                if !seen.insert(key) {
                    continue;
                }
                if d.is_ground() && present.contains(&key) {
                    continue;
                }
            }
            let candidates: Vec<&Fact> = to
                .sorted_relation(name)
                .into_iter()
                .filter(|c| search.compatible(d, c))
                .collect();
            if candidates.is_empty() {
                return Ok(None);
            }
            goals.push((d, candidates));
        }
    }
    goals.sort_by_key(|(d, cs)| (cs.len(), d.values.iter().filter(|v| v.is_null()).count()));
    search.goals = goals;
    if !search.solve(0) {
        return Ok(None);
    }
    let nulls = search.binding.into_iter().collect();
    Ok(Some(Homomorphism { nulls }))
}
