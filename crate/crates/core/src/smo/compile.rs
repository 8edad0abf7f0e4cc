//! Operators compiled to s-t tgds, forward and inverse.
//!
//! Variables are named after attribute positions (`a`, `b`, ...), existentials after the
//! position they fill (`B`, `C`, ...). Relations an operator does not touch are carried by
//! identity tgds in both directions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dependency::{parse_conditions, Atom, Condition, SchemaMapping, StTgd, Term};
use crate::error::Result;
use crate::provenance::{ProvenanceMode, SideTableSpec};
use crate::relational::{Constant, RelationSchema, Schema};

use super::functions::inverse_name;
use super::spec::{SmoKind, SmoSpec};

/// What the inverse may rely on besides the target instance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resources {
    pub provenance: ProvenanceMode,
    pub side_tables: bool,
    pub inverse_functions: bool,
}

impl Resources {
    pub fn new(provenance: ProvenanceMode) -> Self {
        Resources {
            provenance,
            ..Resources::default()
        }
    }

    pub fn with_side_tables(mut self) -> Self {
        self.side_tables = true;
        self
    }

    pub fn with_inverse_functions(mut self) -> Self {
        self.inverse_functions = true;
        self
    }

    /// Side tables are keyed by tuple ids, so they need why- or how-provenance.
    pub fn side_tables_usable(&self) -> bool {
        self.side_tables && self.provenance.identifies_tuples()
    }
}

impl fmt::Display for Resources {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.provenance)?;
        if self.side_tables {
            f.write_str(" + side tables")?;
        }
        if self.inverse_functions {
            f.write_str(" + inverse functions")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum PostStep {
    /// Split merged target facts per derivation; runs before the inverse chase.
    ExpandDuplicates,
    /// Insert the rows of a complete side table into the relation it was taken from.
    AppendSideTableRows { table: String },
    /// Keep a reconstructed fact of one of `relations` only if its provenance points back
    /// to that relation.
    RestrictByOrigin { relations: Vec<String> },
}

impl fmt::Display for PostStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PostStep::ExpandDuplicates => f.write_str("expand_duplicates"),
            PostStep::AppendSideTableRows { table } => write!(f, "append_side_table_rows({table})"),
            PostStep::RestrictByOrigin { relations } => {
                write!(f, "restrict_by_origin({})", relations.join(","))
            }
        }
    }
}

/// How to rebuild a step's source from its target.
///
/// The mapping reads the target where every relation in `keyed` carries one extra last
/// column holding the single witness of each fact (rendered as a monomial, `r1` or `r1*s2`),
/// plus the side tables its tgds join with.
#[derive(Debug, Clone)]
pub struct InversePlan {
    pub mapping: SchemaMapping,
    pub required_provenance: ProvenanceMode,
    pub required_side_tables: Vec<SideTableSpec>,
    pub required_inverse_function: bool,
    pub post_steps: Vec<PostStep>,
    pub keyed: Vec<String>,
    /// No resource given makes this step reliably invertible.
    pub non_invertible: bool,
}

impl InversePlan {
    pub fn inverse_sigma(&self) -> &[StTgd] {
        &self.mapping.sigma
    }

    pub fn expands(&self) -> bool {
        self.post_steps.contains(&PostStep::ExpandDuplicates)
    }
}

impl fmt::Display for InversePlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.mapping)?;
        for s in &self.post_steps {
            write!(f, "\n+ {s}")?;
        }
        if self.non_invertible {
            f.write_str("\n(potentially non-invertible)")?;
        }
        Ok(())
    }
}

/// Name of the witness column added to keyed relations.
pub fn prov_column(relation: &RelationSchema) -> String {
    let mut col = "prov".to_string();
    while relation.attributes.contains(&col) {
        col.push('_');
    }
    col
}

const PROV_VAR: &str = "_p";

fn var(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("v{i}")
    }
}

fn existential(v: &str) -> String {
    v.to_uppercase()
}

fn vars(n: usize, from: usize) -> Vec<String> {
    (from..from + n).map(var).collect()
}

fn terms(vs: &[String]) -> Vec<Term> {
    vs.iter().map(|v| Term::Var(v.clone())).collect()
}

fn atom(relation: &str, vs: &[String]) -> Atom {
    Atom::new(relation, terms(vs))
}

fn tgd(body: Vec<Atom>, conditions: Vec<Condition>, head: Vec<Atom>) -> Result<StTgd> {
    StTgd::inferred(body, conditions, head)
}

fn copy(tgd_from: &str, to: &str, arity: usize) -> Result<StTgd> {
    let v = vars(arity, 0);
    tgd(vec![atom(tgd_from, &v)], vec![], vec![atom(to, &v)])
}

/// Positions of `columns` in `rs`, failing on unknown or repeated names.
fn positions(spec: &SmoSpec, rs: &RelationSchema, columns: &[String]) -> Result<Vec<usize>> {
    let mut seen = BTreeSet::new();
    columns
        .iter()
        .map(|c| {
            let p = rs
                .position(c)
                .ok_or_else(|| spec.error(format!("{} has no attribute {c}", rs.name)))?;
            if !seen.insert(p) {
                return Err(spec.error(format!("attribute {c} listed twice")));
            }
            Ok(p)
        })
        .collect()
}

fn fresh_attribute(spec: &SmoSpec, attrs: &[String], name: &str) -> Result<()> {
    if attrs.iter().any(|a| a == name) {
        return Err(spec.error(format!("attribute {name} already exists")));
    }
    Ok(())
}

/// Resolves the identifiers of a condition to variables. `scopes` lists (relation, schema
/// attribute variables); `R.x` picks a scope, a bare `x` must be unambiguous.
fn resolve_conditions(
    spec: &SmoSpec,
    text: &str,
    scopes: &[(&RelationSchema, &[String])],
) -> Result<Vec<Condition>> {
    let resolve = |t: Term| -> Result<Term> {
        let name = match &t {
            Term::Var(n) => n.clone(),
            _ => return Ok(t),
        };
        let (rel, attr) = match name.split_once('.') {
            Some((r, a)) => (Some(r), a),
            None => (None, name.as_str()),
        };
        let hits: Vec<&String> = scopes
            .iter()
            .filter(|(rs, _)| rel.is_none_or(|r| r == rs.name))
            .filter_map(|(rs, vs)| rs.position(attr).map(|p| &vs[p]))
            .collect();
        match hits.as_slice() {
            [v] => Ok(Term::Var((*v).clone())),
            [] => Err(spec.error(format!("condition names unknown attribute {name}"))),
            _ => Err(spec.error(format!("condition attribute {name} is ambiguous"))),
        }
    };
    parse_conditions(text)?
        .into_iter()
        .map(|c| {
            Ok(Condition {
                left: resolve(c.left)?,
                op: c.op,
                right: resolve(c.right)?,
            })
        })
        .collect()
}

/// Disjoint cover of the complement of a conjunction: for conditions c1..cn, the sets
/// ¬c1, c1∧¬c2, ..., c1∧..∧c(n-1)∧¬cn, each negated comparison split into strict ones.
fn complement(conds: &[Condition]) -> Vec<Vec<Condition>> {
    let mut out = Vec::new();
    for (i, c) in conds.iter().enumerate() {
        for op in c.op.negation() {
            let mut set = conds[..i].to_vec();
            set.push(Condition {
                left: c.left.clone(),
                op,
                right: c.right.clone(),
            });
            out.push(set);
        }
    }
    out
}

struct Forward<'s> {
    spec: &'s SmoSpec,
    source: &'s Schema,
    target: Schema,
    sigma: Vec<StTgd>,
    touched: BTreeSet<String>,
}

impl<'s> Forward<'s> {
    fn new(spec: &'s SmoSpec, source: &'s Schema) -> Self {
        Forward {
            spec,
            source,
            target: Schema::new(),
            sigma: Vec::new(),
            touched: BTreeSet::new(),
        }
    }

    fn take(&mut self, relation: &str) -> Result<&'s RelationSchema> {
        let rs = self.source.require(relation)?;
        if !self.touched.insert(relation.to_string()) {
            return Err(self.spec.error(format!("relation {relation} used twice")));
        }
        Ok(rs)
    }

    fn emit(&mut self, name: &str, attributes: Vec<String>) -> Result<()> {
        if attributes.is_empty() {
            return Err(self.spec.error(format!("relation {name} would have no attributes")));
        }
        self.target.add(RelationSchema {
            name: name.to_string(),
            attributes,
        })
    }

    fn finish(mut self) -> Result<SchemaMapping> {
        for rs in self.source.relations() {
            if self.touched.contains(&rs.name) {
                continue;
            }
            self.target.add(rs.clone())?;
            self.sigma.push(copy(&rs.name, &rs.name, rs.arity())?);
        }
        SchemaMapping::new(self.source.clone(), self.target, self.sigma)
    }
}

/// The forward mapping of one operator over `source`.
pub fn compile_forward(spec: &SmoSpec, source: &Schema) -> Result<SchemaMapping> {
    spec.validate_shape()?;
    let mut fw = Forward::new(spec, source);
    let v2 = spec.variant == 2;
    match spec.kind {
        SmoKind::CopyTable => {
            let rs = fw.take(spec.relation_param()?)?;
            let [first, second] = spec.pair(&spec.targets, "targets")?;
            fw.emit(first, rs.attributes.clone())?;
            fw.emit(second, rs.attributes.clone())?;
            let v = vars(rs.arity(), 0);
            let body = vec![atom(&rs.name, &v)];
            if v2 {
                fw.sigma.push(tgd(body.clone(), vec![], vec![atom(first, &v)])?);
                fw.sigma.push(tgd(body, vec![], vec![atom(second, &v)])?);
            } else {
                fw.sigma.push(tgd(body, vec![], vec![atom(first, &v), atom(second, &v)])?);
            }
        }
        SmoKind::CreateTable => {
            let t = spec.target_param()?;
            if source.contains(t) {
                return Err(spec.error(format!("relation {t} already exists")));
            }
            let attrs = spec.attributes.clone();
            let unique: BTreeSet<&String> = attrs.iter().collect();
            if unique.len() != attrs.len() {
                return Err(spec.error("attribute names repeat"));
            }
            fw.emit(t, attrs)?;
        }
        SmoKind::DecomposeTable => {
            let rs = fw.take(spec.relation_param()?)?;
            let [t1, t2] = spec.pair(&spec.targets, "targets")?;
            let groups = decompose_groups(spec, rs)?;
            let v = vars(rs.arity(), 0);
            let body = vec![atom(&rs.name, &v)];
            let mut heads = Vec::new();
            for (t, g) in [t1, t2].into_iter().zip(&groups) {
                fw.emit(t, g.iter().map(|&p| rs.attributes[p].clone()).collect())?;
                let gv: Vec<String> = g.iter().map(|&p| v[p].clone()).collect();
                heads.push(atom(t, &gv));
            }
            if v2 {
                fw.sigma.push(tgd(body, vec![], heads)?);
            } else {
                for h in heads {
                    fw.sigma.push(tgd(body.clone(), vec![], vec![h])?);
                }
            }
        }
        SmoKind::DropTable => {
            fw.take(spec.relation_param()?)?;
        }
        SmoKind::JoinTable => {
            let [r, s] = spec.pair(&spec.relations, "relations")?;
            let (rs, vs) = (fw.take(r)?, fw.take(s)?);
            let j = join_layout(rs, vs);
            fw.emit(spec.target_param()?, j.attributes)?;
            fw.sigma.push(tgd(
                vec![atom(r, &j.left), atom(s, &j.right)],
                vec![],
                vec![atom(spec.target_param()?, &j.out)],
            )?);
        }
        SmoKind::MergeTable => {
            let [r, s] = spec.pair(&spec.relations, "relations")?;
            let (rs, vs) = (fw.take(r)?, fw.take(s)?);
            if rs.arity() != vs.arity() {
                return Err(spec.error(format!("{r} and {s} differ in arity")));
            }
            let t = spec.target_param()?;
            fw.emit(t, rs.attributes.clone())?;
            fw.sigma.push(copy(r, t, rs.arity())?);
            fw.sigma.push(copy(s, t, vs.arity())?);
        }
        SmoKind::PartitionTable => {
            let rs = fw.take(spec.relation_param()?)?;
            let [t1, t2] = spec.pair(&spec.targets, "targets")?;
            let v = vars(rs.arity(), 0);
            let conds = resolve_conditions(spec, spec.condition_param()?, &[(rs, &v)])?;
            fw.emit(t1, rs.attributes.clone())?;
            fw.emit(t2, rs.attributes.clone())?;
            let body = vec![atom(&rs.name, &v)];
            fw.sigma.push(tgd(body.clone(), conds.clone(), vec![atom(t1, &v)])?);
            for set in complement(&conds) {
                fw.sigma.push(tgd(body.clone(), set, vec![atom(t2, &v)])?);
            }
        }
        SmoKind::RenameTable => {
            let rs = fw.take(spec.relation_param()?)?;
            let t = spec.target_param()?;
            fw.emit(t, rs.attributes.clone())?;
            fw.sigma.push(copy(&rs.name, t, rs.arity())?);
        }
        SmoKind::AddColumn => {
            let rs = fw.take(spec.relation_param()?)?;
            let out = spec.target.as_deref().unwrap_or(&rs.name);
            let col = spec.target_column_param()?;
            fresh_attribute(spec, &rs.attributes, col)?;
            let v = vars(rs.arity(), 0);
            let added = if v2 {
                Term::Var(existential(&var(rs.arity())))
            } else {
                match (&spec.value, &spec.function) {
                    (Some(value), None) => Term::Const(Constant::parse(value)),
                    (None, Some(f)) => {
                        let ps = positions(spec, rs, &spec.columns)?;
                        Term::func(f, ps.iter().map(|&p| Term::Var(v[p].clone())).collect())
                    }
                    _ => return Err(spec.error("needs exactly one of \"value\" and \"function\"")),
                }
            };
            let mut attrs = rs.attributes.clone();
            attrs.push(col.to_string());
            fw.emit(out, attrs)?;
            let mut head = terms(&v);
            head.push(added);
            fw.sigma.push(tgd(vec![atom(&rs.name, &v)], vec![], vec![Atom::new(out, head)])?);
        }
        SmoKind::CopyColumn | SmoKind::MoveColumn => {
            let l = column_transfer(spec, source)?;
            let moving = spec.kind == SmoKind::MoveColumn;
            fw.take(&l.ts.name)?;
            if moving {
                fw.take(&l.rs.name)?;
                let kept: Vec<String> = l.rs_kept().map(|p| l.rs.attributes[p].clone()).collect();
                fw.emit(&l.rs.name, kept)?;
                let kv: Vec<String> = l.rs_kept().map(|p| l.rv[p].clone()).collect();
                fw.sigma.push(tgd(vec![atom(&l.rs.name, &l.rv)], vec![], vec![atom(&l.rs.name, &kv)])?);
            }
            let mut attrs = l.ts.attributes.clone();
            attrs.push(l.new_column.clone());
            fw.emit(&l.ts.name, attrs)?;
            let (tv, rv, conds) = if v2 && !moving { l.unified() } else { l.explicit() };
            let mut head = tv.clone();
            head.push(rv[l.column].clone());
            fw.sigma.push(tgd(
                vec![atom(&l.ts.name, &tv), atom(&l.rs.name, &rv)],
                conds,
                vec![atom(&l.ts.name, &head)],
            )?);
            if !moving {
                let mut kept = l.tv.clone();
                kept.push(existential(&var(l.rv.len() + l.tv.len())));
                fw.sigma.push(tgd(vec![atom(&l.ts.name, &l.tv)], vec![], vec![atom(&l.ts.name, &kept)])?);
            }
        }
        SmoKind::DropColumn => {
            let rs = fw.take(spec.relation_param()?)?;
            let out = spec.target.as_deref().unwrap_or(&rs.name);
            let dropped = drop_positions(spec, rs)?;
            let v = vars(rs.arity(), 0);
            let kept: Vec<usize> = (0..rs.arity()).filter(|p| !dropped.contains(p)).collect();
            fw.emit(out, kept.iter().map(|&p| rs.attributes[p].clone()).collect())?;
            let kv: Vec<String> = kept.iter().map(|&p| v[p].clone()).collect();
            fw.sigma.push(tgd(vec![atom(&rs.name, &v)], vec![], vec![atom(out, &kv)])?);
        }
        SmoKind::MergeColumn => {
            let rs = fw.take(spec.relation_param()?)?;
            let out = spec.target.as_deref().unwrap_or(&rs.name);
            let m = merge_layout(spec, rs)?;
            fw.emit(out, m.attributes.clone())?;
            let v = vars(rs.arity(), 0);
            let head: Vec<Term> = (0..rs.arity())
                .filter(|&p| p != m.second)
                .map(|p| {
                    if p == m.first {
                        Term::func(
                            spec.function_param().expect("checked by merge_layout"),
                            vec![Term::Var(v[m.first].clone()), Term::Var(v[m.second].clone())],
                        )
                    } else {
                        Term::Var(v[p].clone())
                    }
                })
                .collect();
            fw.sigma.push(tgd(vec![atom(&rs.name, &v)], vec![], vec![Atom::new(out, head)])?);
        }
        SmoKind::RenameColumn => {
            let rs = fw.take(spec.relation_param()?)?;
            let out = spec.target.as_deref().unwrap_or(&rs.name);
            let col = spec.single(&spec.columns, "columns")?;
            let p = positions(spec, rs, &spec.columns)?[0];
            let new = spec.target_column_param()?;
            if new != col {
                fresh_attribute(spec, &rs.attributes, new)?;
            }
            let mut attrs = rs.attributes.clone();
            attrs[p] = new.to_string();
            fw.emit(out, attrs)?;
            fw.sigma.push(copy(&rs.name, out, rs.arity())?);
        }
        SmoKind::SplitColumn => {
            let rs = fw.take(spec.relation_param()?)?;
            let out = spec.target.as_deref().unwrap_or(&rs.name);
            let s = split_layout(spec, rs)?;
            fw.emit(out, s.attributes.clone())?;
            let v = vars(rs.arity(), 0);
            let f = spec.function_param()?;
            let g = Term::Var(v[s.column].clone());
            let mut head = Vec::new();
            for (p, x) in v.iter().enumerate() {
                if p == s.column {
                    head.push(Term::func(&format!("{f}.left"), vec![g.clone()]));
                    head.push(Term::func(&format!("{f}.right"), vec![g.clone()]));
                } else {
                    head.push(Term::Var(x.clone()));
                }
            }
            fw.sigma.push(tgd(vec![atom(&rs.name, &v)], vec![], vec![Atom::new(out, head)])?);
        }
        SmoKind::Nop => {}
    }
    fw.finish()
}

fn decompose_groups(spec: &SmoSpec, rs: &RelationSchema) -> Result<Vec<Vec<usize>>> {
    let [g1, g2] = match spec.column_groups.as_slice() {
        [a, b] => [a, b],
        _ => return Err(spec.error("\"column_groups\" needs exactly two entries")),
    };
    let groups = vec![positions(spec, rs, g1)?, positions(spec, rs, g2)?];
    if groups.iter().any(Vec::is_empty) {
        return Err(spec.error("column groups must not be empty"));
    }
    let covered: BTreeSet<usize> = groups.iter().flatten().copied().collect();
    if covered.len() != rs.arity() {
        return Err(spec.error(format!("column groups must cover every attribute of {}", rs.name)));
    }
    Ok(groups)
}

fn drop_positions(spec: &SmoSpec, rs: &RelationSchema) -> Result<BTreeSet<usize>> {
    let ps = positions(spec, rs, &spec.columns)?;
    if ps.is_empty() || ps.len() >= rs.arity() {
        return Err(spec.error("must drop at least one and not every attribute"));
    }
    Ok(ps.into_iter().collect())
}

struct JoinLayout {
    attributes: Vec<String>,
    left: Vec<String>,
    right: Vec<String>,
    out: Vec<String>,
}

/// Natural join: shared attribute names share a variable; the result lists the left
/// attributes, then the right ones the left lacks.
fn join_layout(rs: &RelationSchema, vs: &RelationSchema) -> JoinLayout {
    let left = vars(rs.arity(), 0);
    let mut attributes = rs.attributes.clone();
    let mut out = left.clone();
    let mut next = rs.arity();
    let right = vs
        .attributes
        .iter()
        .map(|a| match rs.position(a) {
            Some(p) => left[p].clone(),
            None => {
                let v = var(next);
                next += 1;
                attributes.push(a.clone());
                out.push(v.clone());
                v
            }
        })
        .collect();
    JoinLayout {
        attributes,
        left,
        right,
        out,
    }
}

struct MergeLayout {
    first: usize,
    second: usize,
    attributes: Vec<String>,
}

fn merge_layout(spec: &SmoSpec, rs: &RelationSchema) -> Result<MergeLayout> {
    spec.pair(&spec.columns, "columns")?;
    let ps = positions(spec, rs, &spec.columns)?;
    spec.function_param()?;
    let new = spec.target_column_param()?;
    let (first, second) = (ps[0], ps[1]);
    let mut attributes = Vec::new();
    for (p, a) in rs.attributes.iter().enumerate() {
        if p == first {
            attributes.push(new.to_string());
        } else if p != second {
            if a == new {
                return Err(spec.error(format!("attribute {new} already exists")));
            }
            attributes.push(a.clone());
        }
    }
    Ok(MergeLayout {
        first,
        second,
        attributes,
    })
}

struct SplitLayout {
    column: usize,
    attributes: Vec<String>,
}

fn split_layout(spec: &SmoSpec, rs: &RelationSchema) -> Result<SplitLayout> {
    spec.single(&spec.columns, "columns")?;
    let column = positions(spec, rs, &spec.columns)?[0];
    let [x, y] = spec.pair(&spec.target_columns, "target_columns")?;
    spec.function_param()?;
    if x == y {
        return Err(spec.error("split columns need distinct names"));
    }
    let mut attributes = Vec::new();
    for (p, a) in rs.attributes.iter().enumerate() {
        if p == column {
            attributes.push(x.to_string());
            attributes.push(y.to_string());
        } else {
            if a == x || a == y {
                return Err(spec.error(format!("attribute {a} already exists")));
            }
            attributes.push(a.clone());
        }
    }
    Ok(SplitLayout { column, attributes })
}

/// COPY_COLUMN / MOVE_COLUMN: column `column` of `rs` goes to `ts` as `new_column`.
struct Transfer<'s> {
    rs: &'s RelationSchema,
    ts: &'s RelationSchema,
    column: usize,
    new_column: String,
    rv: Vec<String>,
    tv: Vec<String>,
    conditions: Vec<Condition>,
}

impl Transfer<'_> {
    fn rs_kept(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.rs.arity()).filter(|&p| p != self.column)
    }

    fn explicit(&self) -> (Vec<String>, Vec<String>, Vec<Condition>) {
        (self.tv.clone(), self.rv.clone(), self.conditions.clone())
    }

    /// Equalities between two attributes become a shared variable.
    fn unified(&self) -> (Vec<String>, Vec<String>, Vec<Condition>) {
        let mut subst: BTreeMap<String, String> = BTreeMap::new();
        let mut rest = Vec::new();
        for c in &self.conditions {
            match (&c.left, c.op, &c.right) {
                (Term::Var(x), crate::dependency::CompareOp::Eq, Term::Var(y)) => {
                    let (x, y) = (find(&subst, x), find(&subst, y));
                    if x != y {
                        let (keep, drop) = if x < y { (x, y) } else { (y, x) };
                        subst.insert(drop, keep);
                    }
                }
                _ => rest.push(c.clone()),
            }
        }
        let apply = |v: &String| find(&subst, v);
        let rest = rest
            .into_iter()
            .map(|c| Condition {
                left: rename(&c.left, &apply),
                op: c.op,
                right: rename(&c.right, &apply),
            })
            .collect();
        (
            self.tv.iter().map(apply).collect(),
            self.rv.iter().map(apply).collect(),
            rest,
        )
    }
}

fn find(subst: &BTreeMap<String, String>, v: &str) -> String {
    let mut v = v.to_string();
    while let Some(next) = subst.get(&v) {
        v = next.clone();
    }
    v
}

fn rename(t: &Term, f: &impl Fn(&String) -> String) -> Term {
    match t {
        Term::Var(v) => Term::Var(f(v)),
        other => other.clone(),
    }
}

fn column_transfer<'s>(spec: &SmoSpec, source: &'s Schema) -> Result<Transfer<'s>> {
    let rs = source.require(spec.relation_param()?)?;
    let ts = source.require(spec.target_param()?)?;
    if rs.name == ts.name {
        return Err(spec.error("source and target relation must differ"));
    }
    spec.single(&spec.columns, "columns")?;
    let column = positions(spec, rs, &spec.columns)?[0];
    let new_column = spec.target_column_param()?.to_string();
    fresh_attribute(spec, &ts.attributes, &new_column)?;
    let rv = vars(rs.arity(), 0);
    let tv = vars(ts.arity(), rs.arity());
    let conditions = resolve_conditions(spec, spec.condition_param()?, &[(rs, &rv), (ts, &tv)])?;
    Ok(Transfer {
        rs,
        ts,
        column,
        new_column,
        rv,
        tv,
        conditions,
    })
}

struct Inverse<'s> {
    source: &'s Schema,
    forward: &'s SchemaMapping,
    sigma: Vec<StTgd>,
    untouched: BTreeSet<String>,
    keyed: Vec<String>,
    joined_side: Vec<SideTableSpec>,
    appended_side: Vec<SideTableSpec>,
    post: Vec<PostStep>,
    required: ProvenanceMode,
    inverse_function: bool,
    non_invertible: bool,
}

impl<'s> Inverse<'s> {
    fn source_rel(&self, name: &str) -> Result<&'s RelationSchema> {
        self.source.require(name)
    }

    fn target_rel(&self, name: &str) -> Result<&'s RelationSchema> {
        self.forward.target.require(name)
    }

    fn touch(&mut self, name: &str) {
        self.untouched.remove(name);
    }

    fn need(&mut self, mode: ProvenanceMode) {
        self.required = self.required.max(mode);
    }

    fn expand(&mut self) {
        self.need(ProvenanceMode::Why);
        if !self.post.contains(&PostStep::ExpandDuplicates) {
            self.post.insert(0, PostStep::ExpandDuplicates);
        }
    }

    fn key(&mut self, relation: &str) {
        if !self.keyed.iter().any(|k| k == relation) {
            self.keyed.push(relation.to_string());
        }
    }

    /// Atom over a keyed relation: its variables plus the witness variable.
    fn keyed_atom(&self, relation: &str, vs: &[String]) -> Atom {
        let mut t = terms(vs);
        t.push(Term::var(PROV_VAR));
        Atom::new(relation, t)
    }

    fn side_atom(&self, side: &SideTableSpec, vs: &[String]) -> Atom {
        let mut t = vec![Term::var(PROV_VAR)];
        t.extend(terms(vs));
        Atom::new(&side.name(), t)
    }

    fn append(&mut self, side: SideTableSpec) {
        self.need(ProvenanceMode::Why);
        self.post.push(PostStep::AppendSideTableRows { table: side.name() });
        self.appended_side.push(side);
    }

    /// `from(vars) -> EXISTS ..: to(..)` where `placed[p]` says which source position of
    /// `to` the p-th attribute of `from` fills; the other positions become existentials.
    fn existential_fill(&mut self, from: &str, to: &RelationSchema, placed: &[usize]) -> Result<()> {
        let v = vars(to.arity(), 0);
        let body_vars: Vec<String> = placed.iter().map(|&p| v[p].clone()).collect();
        let head: Vec<String> = (0..to.arity())
            .map(|p| {
                if placed.contains(&p) {
                    v[p].clone()
                } else {
                    existential(&v[p])
                }
            })
            .collect();
        self.sigma.push(tgd(vec![atom(from, &body_vars)], vec![], vec![atom(&to.name, &head)])?);
        Ok(())
    }

    fn finish(mut self) -> Result<InversePlan> {
        for name in self.untouched.clone() {
            let rs = self.source_rel(&name)?;
            self.sigma.push(copy(&name, &name, rs.arity())?);
        }
        let mut schema = Schema::new();
        for rs in self.forward.target.relations() {
            let mut rs = rs.clone();
            if self.keyed.contains(&rs.name) {
                let col = prov_column(&rs);
                rs.attributes.push(col);
            }
            schema.add(rs)?;
        }
        for side in &self.joined_side {
            schema.add(side.relation_schema())?;
        }
        let mut required_side_tables = self.joined_side.clone();
        required_side_tables.extend(self.appended_side);
        Ok(InversePlan {
            mapping: SchemaMapping::new(schema, self.source.clone(), self.sigma)?,
            required_provenance: self.required,
            required_side_tables,
            required_inverse_function: self.inverse_function,
            post_steps: self.post,
            keyed: self.keyed,
            non_invertible: self.non_invertible,
        })
    }
}

/// The strongest inverse the resources permit. `forward` must be
/// `compile_forward(spec, source)`.
pub fn compile_inverse(spec: &SmoSpec, source: &Schema, resources: Resources) -> Result<InversePlan> {
    let forward = compile_forward(spec, source)?;
    compile_inverse_of(spec, source, &forward, resources)
}

pub fn compile_inverse_of(
    spec: &SmoSpec,
    source: &Schema,
    forward: &SchemaMapping,
    resources: Resources,
) -> Result<InversePlan> {
    let mut inv = Inverse {
        source,
        forward,
        sigma: Vec::new(),
        untouched: source.names().map(str::to_string).collect(),
        keyed: Vec::new(),
        joined_side: Vec::new(),
        appended_side: Vec::new(),
        post: Vec::new(),
        required: ProvenanceMode::None,
        inverse_function: false,
        non_invertible: false,
    };
    let tuple_level = resources.provenance.identifies_tuples();
    let side = resources.side_tables_usable();
    match spec.kind {
        SmoKind::CopyTable => {
            let rs = inv.source_rel(spec.relation_param()?)?;
            inv.touch(&rs.name);
            let [first, second] = spec.pair(&spec.targets, "targets")?;
            let v = vars(rs.arity(), 0);
            let body = if spec.variant == 2 {
                vec![atom(first, &v)]
            } else {
                vec![atom(first, &v), atom(second, &v)]
            };
            inv.sigma.push(tgd(body, vec![], vec![atom(&rs.name, &v)])?);
        }
        SmoKind::CreateTable | SmoKind::Nop => {}
        SmoKind::DecomposeTable => {
            let rs = inv.source_rel(spec.relation_param()?)?;
            inv.touch(&rs.name);
            let [t1, t2] = spec.pair(&spec.targets, "targets")?;
            let groups = decompose_groups(spec, rs)?;
            if tuple_level {
                // JOIN Table on the witness column.
                inv.expand();
                let v = vars(rs.arity(), 0);
                let mut body = Vec::new();
                for (t, g) in [t1, t2].into_iter().zip(&groups) {
                    inv.key(t);
                    let gv: Vec<String> = g.iter().map(|&p| v[p].clone()).collect();
                    body.push(inv.keyed_atom(t, &gv));
                }
                inv.sigma.push(tgd(body, vec![], vec![atom(&rs.name, &v)])?);
            } else {
                // ADD Column: the missing attributes become nulls.
                for (t, g) in [t1, t2].into_iter().zip(&groups) {
                    inv.existential_fill(t, rs, g)?;
                }
            }
        }
        SmoKind::DropTable => {
            let rs = inv.source_rel(spec.relation_param()?)?;
            inv.touch(&rs.name);
            if side {
                inv.append(SideTableSpec::full(rs));
            } else if resources.provenance > ProvenanceMode::None {
                let count = SideTableSpec::count(&rs.name);
                inv.need(ProvenanceMode::Where);
                let head: Vec<String> = vars(rs.arity(), 0).iter().map(|v| existential(v)).collect();
                let body = inv.side_atom(&count, &[]);
                inv.sigma.push(tgd(vec![body], vec![], vec![atom(&rs.name, &head)])?);
                inv.joined_side.push(count);
            }
        }
        SmoKind::JoinTable => {
            let [r, s] = spec.pair(&spec.relations, "relations")?;
            let (rs, vs) = (inv.source_rel(r)?, inv.source_rel(s)?);
            inv.touch(r);
            inv.touch(s);
            let j = join_layout(rs, vs);
            inv.sigma.push(tgd(
                vec![atom(spec.target_param()?, &j.out)],
                vec![],
                vec![atom(r, &j.left), atom(s, &j.right)],
            )?);
            if side {
                inv.append(SideTableSpec::dangling(rs));
                inv.append(SideTableSpec::dangling(vs));
            }
        }
        SmoKind::MergeTable => {
            let [r, s] = spec.pair(&spec.relations, "relations")?;
            let t = spec.target_param()?;
            for name in [r, s] {
                let rs = inv.source_rel(name)?;
                inv.touch(name);
                inv.sigma.push(copy(t, name, rs.arity())?);
            }
            if resources.provenance > ProvenanceMode::None {
                inv.need(ProvenanceMode::Where);
                inv.post.push(PostStep::RestrictByOrigin {
                    relations: vec![r.to_string(), s.to_string()],
                });
            }
        }
        SmoKind::PartitionTable => {
            let rs = inv.source_rel(spec.relation_param()?)?;
            inv.touch(&rs.name);
            for t in spec.pair(&spec.targets, "targets")? {
                inv.sigma.push(copy(t, &rs.name, rs.arity())?);
            }
        }
        SmoKind::RenameTable => {
            let rs = inv.source_rel(spec.relation_param()?)?;
            inv.touch(&rs.name);
            inv.sigma.push(copy(spec.target_param()?, &rs.name, rs.arity())?);
        }
        SmoKind::AddColumn | SmoKind::RenameColumn => {
            let rs = inv.source_rel(spec.relation_param()?)?;
            inv.touch(&rs.name);
            let out = spec.target.as_deref().unwrap_or(&rs.name);
            let width = inv.target_rel(out)?.arity();
            let body = vars(width, 0);
            inv.sigma.push(tgd(vec![atom(out, &body)], vec![], vec![atom(&rs.name, &body[..rs.arity()])])?);
        }
        SmoKind::CopyColumn | SmoKind::MoveColumn => {
            let l = column_transfer(spec, source)?;
            inv.touch(&l.ts.name);
            // T(y, c) -> T(y)
            let mut tv = vars(l.ts.arity() + 1, 0);
            let c = tv.pop().expect("one extra variable");
            let mut body = tv.clone();
            body.push(c);
            inv.sigma.push(tgd(vec![atom(&l.ts.name, &body)], vec![], vec![atom(&l.ts.name, &tv)])?);
            if spec.kind == SmoKind::MoveColumn {
                inv.touch(&l.rs.name);
                let kept: Vec<usize> = l.rs_kept().collect();
                if side {
                    inv.expand();
                    inv.key(&l.rs.name);
                    let v = vars(l.rs.arity(), 0);
                    let kv: Vec<String> = kept.iter().map(|&p| v[p].clone()).collect();
                    let side_r = SideTableSpec {
                        relation: l.rs.name.clone(),
                        kind: crate::provenance::SideTableKind::Projection,
                        attributes: vec![l.rs.attributes[l.column].clone()],
                    };
                    let body = vec![
                        inv.keyed_atom(&l.rs.name, &kv),
                        inv.side_atom(&side_r, &[v[l.column].clone()]),
                    ];
                    inv.sigma.push(tgd(body, vec![], vec![atom(&l.rs.name, &v)])?);
                    inv.joined_side.push(side_r);
                    inv.append(SideTableSpec::dangling(l.ts));
                } else {
                    if tuple_level {
                        inv.expand();
                    }
                    inv.existential_fill(&l.rs.name, l.rs, &kept)?;
                    inv.non_invertible =
                        resources.provenance == ProvenanceMode::None && !resources.side_tables;
                }
            }
        }
        SmoKind::DropColumn => {
            let rs = inv.source_rel(spec.relation_param()?)?;
            inv.touch(&rs.name);
            let out = spec.target.as_deref().unwrap_or(&rs.name);
            let dropped = drop_positions(spec, rs)?;
            let kept: Vec<usize> = (0..rs.arity()).filter(|p| !dropped.contains(p)).collect();
            if side {
                inv.expand();
                inv.key(out);
                let v = vars(rs.arity(), 0);
                let kv: Vec<String> = kept.iter().map(|&p| v[p].clone()).collect();
                let dv: Vec<String> = dropped.iter().map(|&p| v[p].clone()).collect();
                let side_r = SideTableSpec::projection(
                    &rs.name,
                    &dropped.iter().map(|&p| rs.attributes[p].as_str()).collect::<Vec<_>>(),
                );
                let body = vec![inv.keyed_atom(out, &kv), inv.side_atom(&side_r, &dv)];
                inv.sigma.push(tgd(body, vec![], vec![atom(&rs.name, &v)])?);
                inv.joined_side.push(side_r);
            } else {
                if tuple_level {
                    inv.expand();
                }
                inv.existential_fill(out, rs, &kept)?;
            }
        }
        SmoKind::MergeColumn => {
            let rs = inv.source_rel(spec.relation_param()?)?;
            inv.touch(&rs.name);
            let out = spec.target.as_deref().unwrap_or(&rs.name);
            let m = merge_layout(spec, rs)?;
            let kept: Vec<usize> = (0..rs.arity()).filter(|&p| p != m.second).collect();
            if side && resources.inverse_functions {
                // T(a,g) + side(c) -> R(a, f.inv(g,c), c)
                inv.expand();
                inv.key(out);
                inv.inverse_function = true;
                let v = vars(rs.arity(), 0);
                let kv: Vec<String> = kept.iter().map(|&p| v[p].clone()).collect();
                let side_r = SideTableSpec::projection(&rs.name, &[rs.attributes[m.second].as_str()]);
                let body = vec![inv.keyed_atom(out, &kv), inv.side_atom(&side_r, &[v[m.second].clone()])];
                let head: Vec<Term> = (0..rs.arity())
                    .map(|p| {
                        if p == m.first {
                            Term::func(
                                &inverse_name(spec.function_param().expect("checked by merge_layout")),
                                vec![Term::Var(v[m.first].clone()), Term::Var(v[m.second].clone())],
                            )
                        } else {
                            Term::Var(v[p].clone())
                        }
                    })
                    .collect();
                inv.sigma.push(tgd(body, vec![], vec![Atom::new(&rs.name, head)])?);
                inv.joined_side.push(side_r);
            } else {
                if tuple_level {
                    inv.expand();
                }
                let placed: Vec<usize> = kept.iter().copied().filter(|&p| p != m.first).collect();
                // The merged column fills nothing: both of its inputs become nulls.
                let width = inv.target_rel(out)?.arity();
                let v = vars(rs.arity(), 0);
                let body_vars: Vec<String> = kept.iter().map(|&p| v[p].clone()).collect();
                debug_assert_eq!(body_vars.len(), width);
                let head: Vec<String> = (0..rs.arity())
                    .map(|p| {
                        if placed.contains(&p) {
                            v[p].clone()
                        } else {
                            existential(&v[p])
                        }
                    })
                    .collect();
                inv.sigma.push(tgd(vec![atom(out, &body_vars)], vec![], vec![atom(&rs.name, &head)])?);
            }
        }
        SmoKind::SplitColumn => {
            let rs = inv.source_rel(spec.relation_param()?)?;
            inv.touch(&rs.name);
            let out = spec.target.as_deref().unwrap_or(&rs.name);
            let s = split_layout(spec, rs)?;
            let v = vars(rs.arity() + 1, 0);
            let f = spec.function_param()?;
            // Target variables: source positions before the column keep theirs, the two
            // halves take v[column] and the spare last variable.
            let spare = v[rs.arity()].clone();
            let mut body = Vec::new();
            for (p, x) in v[..rs.arity()].iter().enumerate() {
                body.push(x.clone());
                if p == s.column {
                    body.push(spare.clone());
                }
            }
            let head: Vec<Term> = if resources.inverse_functions {
                inv.inverse_function = true;
                (0..rs.arity())
                    .map(|p| {
                        if p == s.column {
                            Term::func(f, vec![Term::Var(v[p].clone()), Term::Var(spare.clone())])
                        } else {
                            Term::Var(v[p].clone())
                        }
                    })
                    .collect()
            } else {
                if tuple_level {
                    inv.expand();
                }
                (0..rs.arity())
                    .map(|p| {
                        if p == s.column {
                            Term::Var(existential(&v[p]))
                        } else {
                            Term::Var(v[p].clone())
                        }
                    })
                    .collect()
            };
            inv.sigma.push(tgd(vec![atom(out, &body)], vec![], vec![Atom::new(&rs.name, head)])?);
        }
    }
    inv.finish()
}
