use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::provenance::{AnnotatedFact, Annotation, Monomial, Polynomial, ProvenanceStore, WitnessBasis};
use crate::relational::{Instance, RunState};

/// Splits every merged fact back into one fact per derivation.
///
/// A fact annotated with n monomials (how) or n witnesses (why) becomes n facts with the
/// same values and fresh ids, each annotated with its single monomial or witness.
/// Coefficients do not multiply facts: `2*r1` is one source tuple used twice.
/// Facts without an annotation, or with a single derivation, pass through unchanged.
pub fn expand_duplicates(
    target: &Instance,
    store: &ProvenanceStore,
    state: &mut RunState,
) -> Result<(Instance, ProvenanceStore)> {
    if !store.mode().identifies_tuples() {
        return Err(Error::InsufficientProvenance(format!(
            "duplicate expansion needs why- or how-provenance, the store has {}",
            store.mode()
        )));
    }
    state.observe(target);
    let mut out = Instance::empty(target.schema().clone());
    let mut out_store = ProvenanceStore::new(store.mode());
    for (id, rel) in store.origins() {
        out_store.set_origin(id.clone(), rel);
    }
    for fact in target.facts() {
        let annotation = store.resolve(&fact.id, &fact.relation, &fact.values);
        let parts: Vec<Annotation> = match annotation {
            Some(Annotation::How(p)) if p.monomial_count() > 1 => p
                .terms()
                .map(|(m, _)| Annotation::How(Polynomial::from_monomial(m.clone(), 1)))
                .collect(),
            Some(Annotation::Why(w)) if w.len() > 1 => w
                .witnesses()
                .map(|w| Annotation::Why(WitnessBasis(BTreeSet::from([w.clone()]))))
                .collect(),
            _ => {
                out.insert(&fact.relation, fact.id.clone(), fact.values.clone())?;
                if let Some(a) = annotation {
                    out_store.insert(fact.id.clone(), annotated(fact.relation.clone(), &fact.values, a.clone()));
                }
                continue;
            }
        };
        for part in parts {
            let id = state.ids.fresh_for(&fact.relation);
            out.insert(&fact.relation, id.clone(), fact.values.clone())?;
            out_store.insert(id, annotated(fact.relation.clone(), &fact.values, part));
        }
    }
    Ok((out, out_store))
}

fn annotated(relation: String, values: &[crate::relational::Value], annotation: Annotation) -> AnnotatedFact {
    AnnotatedFact {
        relation,
        values: values.to_vec(),
        annotation,
    }
}

/// The single witness of an expanded fact, as its monomial.
pub(crate) fn single_witness(a: &Annotation) -> Option<Monomial> {
    let w = a.witnesses()?;
    if w.len() != 1 {
        return None;
    }
    let ids = w.0.into_iter().next()?;
    Some(Monomial::of(ids))
}
