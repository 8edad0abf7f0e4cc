use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relational::json::{schema_from_docs, schema_to_docs, RelationSchemaDoc};
use crate::relational::{ConstKind, Constant, Schema};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(Constant),
    /// Application of a registered function, e.g. `dec_add(b,c)` or `dec_add.inv(g,c)`.
    Func { name: String, args: Vec<Term> },
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(name.to_string())
    }

    pub fn constant(raw: &str) -> Self {
        Term::Const(Constant::parse(raw))
    }

    pub fn func(name: &str, args: Vec<Term>) -> Self {
        Term::Func {
            name: name.to_string(),
            args,
        }
    }

    pub fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Term::Var(v) => {
                out.insert(v);
            }
            Term::Const(_) => {}
            Term::Func { args, .. } => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn has_function(&self) -> bool {
        matches!(self, Term::Func { .. })
    }
}

fn quote(text: &str) -> String {
    format!("'{}'", text.replace('\'', "''"))
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) if c.kind() == ConstKind::Text => f.write_str(&quote(c.lexical())),
            Term::Const(c) => f.write_str(c.lexical()),
            Term::Func { name, args } => write!(f, "{name}({})", join(args, ",")),
        }
    }
}

fn join<T: fmt::Display>(items: &[T], sep: &str) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(sep)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub relation: String,
    pub terms: Vec<Term>,
}

impl Atom {
    pub fn new(relation: &str, terms: Vec<Term>) -> Self {
        Atom {
            relation: relation.to_string(),
            terms,
        }
    }

    /// Atom whose terms are all variables.
    pub fn vars(relation: &str, vars: &[&str]) -> Self {
        Atom::new(relation, vars.iter().map(|v| Term::var(v)).collect())
    }

    pub fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        self.terms.iter().for_each(|t| t.collect_vars(out));
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.relation, join(&self.terms, ","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CompareOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Eq => "=",
            CompareOp::Ge => ">=",
            CompareOp::Gt => ">",
        }
    }

    pub fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            CompareOp::Lt => ord == Less,
            CompareOp::Le => ord != Greater,
            CompareOp::Eq => ord == Equal,
            CompareOp::Ge => ord != Less,
            CompareOp::Gt => ord == Greater,
        }
    }

    /// The complement as a disjunction of comparisons; `=` has no single complement.
    pub fn negation(self) -> Vec<CompareOp> {
        match self {
            CompareOp::Lt => vec![CompareOp::Ge],
            CompareOp::Le => vec![CompareOp::Gt],
            CompareOp::Eq => vec![CompareOp::Lt, CompareOp::Gt],
            CompareOp::Ge => vec![CompareOp::Lt],
            CompareOp::Gt => vec![CompareOp::Le],
        }
    }
}

impl FromStr for CompareOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "<" => CompareOp::Lt,
            "<=" => CompareOp::Le,
            "=" => CompareOp::Eq,
            ">=" => CompareOp::Ge,
            ">" => CompareOp::Gt,
            _ => {
                return Err(Error::Parse {
                    offset: 0,
                    message: format!("unknown comparison {s:?}"),
                })
            }
        })
    }
}

/// `left θ right` over body variables and constants.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Condition {
    pub left: Term,
    pub op: CompareOp,
    pub right: Term,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.left, self.op.symbol(), self.right)
    }
}

/// A source-to-target tuple-generating dependency `∀x (φ(x) ∧ conds → ∃y ψ(x,y))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StTgd {
    body: Vec<Atom>,
    conditions: Vec<Condition>,
    head: Vec<Atom>,
    existentials: BTreeSet<String>,
}

impl StTgd {
    pub fn new(
        body: Vec<Atom>,
        conditions: Vec<Condition>,
        head: Vec<Atom>,
        existentials: impl IntoIterator<Item = String>,
    ) -> Result<Self> {
        let tgd = StTgd {
            body,
            conditions,
            head,
            existentials: existentials.into_iter().collect(),
        };
        tgd.validate()?;
        Ok(tgd)
    }

    /// Existential variables are inferred: every head variable absent from the body.
    pub fn inferred(body: Vec<Atom>, conditions: Vec<Condition>, head: Vec<Atom>) -> Result<Self> {
        let body_vars: BTreeSet<String> = vars_of(&body).into_iter().map(String::from).collect();
        let ex: Vec<String> = vars_of(&head)
            .into_iter()
            .filter(|v| !body_vars.contains(*v))
            .map(String::from)
            .collect();
        StTgd::new(body, conditions, head, ex)
    }

    pub fn body(&self) -> &[Atom] {
        &self.body
    }

    pub fn conditions(&self) -> &[Condition] {
        &self.conditions
    }

    pub fn head(&self) -> &[Atom] {
        &self.head
    }

    pub fn existentials(&self) -> &BTreeSet<String> {
        &self.existentials
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidDependency(format!("{m} in {self}")));
        if self.body.is_empty() {
            return bad("empty body".into());
        }
        if self.head.is_empty() {
            return bad("empty head".into());
        }
        if self
            .body
            .iter()
            .flat_map(|a| &a.terms)
            .chain(self.conditions.iter().flat_map(|c| [&c.left, &c.right]))
            .any(Term::has_function)
        {
            return bad("function term outside the head".into());
        }
        let body_vars = vars_of(&self.body);
        let head_vars = vars_of(&self.head);
        for c in &self.conditions {
            let mut cv = BTreeSet::new();
            c.left.collect_vars(&mut cv);
            c.right.collect_vars(&mut cv);
            if let Some(v) = cv.iter().find(|v| !body_vars.contains(*v)) {
                return bad(format!("condition variable {v} not bound by the body"));
            }
        }
        for v in &self.existentials {
            if body_vars.contains(v.as_str()) {
                return bad(format!("existential {v} also occurs in the body"));
            }
            if !head_vars.contains(v.as_str()) {
                return bad(format!("existential {v} does not occur in the head"));
            }
        }
        if let Some(v) = head_vars
            .iter()
            .find(|v| !body_vars.contains(*v) && !self.existentials.contains(**v))
        {
            return bad(format!("head variable {v} is neither bound nor existential"));
        }
        Ok(())
    }
}

fn vars_of(atoms: &[Atom]) -> BTreeSet<&str> {
    let mut out = BTreeSet::new();
    atoms.iter().for_each(|a| a.collect_vars(&mut out));
    out
}

impl fmt::Display for StTgd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut lhs: Vec<String> = self.body.iter().map(ToString::to_string).collect();
        lhs.extend(self.conditions.iter().map(ToString::to_string));
        write!(f, "{} -> ", lhs.join(" AND "))?;
        if !self.existentials.is_empty() {
            let ex: Vec<&str> = self.existentials.iter().map(String::as_str).collect();
            write!(f, "EXISTS {}: ", ex.join(","))?;
        }
        f.write_str(&join(&self.head, " AND "))
    }
}

impl FromStr for StTgd {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        super::parse::parse_tgd(s)
    }
}

/// The triple (source schema, target schema, Σ).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaMapping {
    pub source: Schema,
    pub target: Schema,
    pub sigma: Vec<StTgd>,
}

impl SchemaMapping {
    pub fn new(source: Schema, target: Schema, sigma: Vec<StTgd>) -> Result<Self> {
        let m = SchemaMapping {
            source,
            target,
            sigma,
        };
        m.validate()?;
        Ok(m)
    }

    /// Parses each line of `tgds` as one dependency.
    pub fn parse(source: Schema, target: Schema, tgds: &[&str]) -> Result<Self> {
        let sigma = tgds
            .iter()
            .map(|t| t.parse())
            .collect::<Result<Vec<StTgd>>>()?;
        SchemaMapping::new(source, target, sigma)
    }

    fn validate(&self) -> Result<()> {
        for tgd in &self.sigma {
            for (atoms, schema, side) in [
                (tgd.body(), &self.source, "source"),
                (tgd.head(), &self.target, "target"),
            ] {
                for atom in atoms {
                    let rs = schema.get(&atom.relation).ok_or_else(|| {
                        Error::InvalidDependency(format!(
                            "{} is not a {side} relation in {tgd}",
                            atom.relation
                        ))
                    })?;
                    if rs.arity() != atom.terms.len() {
                        return Err(Error::InvalidDependency(format!(
                            "{} has arity {}, atom {atom} has {}",
                            rs.name,
                            rs.arity(),
                            atom.terms.len()
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for SchemaMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, tgd) in self.sigma.iter().enumerate() {
            if n > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{tgd}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MappingDoc {
    source: Vec<RelationSchemaDoc>,
    target: Vec<RelationSchemaDoc>,
    tgds: Vec<String>,
}

impl SchemaMapping {
    /// `{"source": [{"name", "attributes"}], "target": [...], "tgds": ["R(a,b) -> T(a,b)"]}`
    pub fn to_json(&self) -> String {
        let doc = MappingDoc {
            source: schema_to_docs(&self.source),
            target: schema_to_docs(&self.target),
            tgds: self.sigma.iter().map(ToString::to_string).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("mapping serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MappingDoc = serde_json::from_str(text)?;
        let tgds: Vec<&str> = doc.tgds.iter().map(String::as_str).collect();
        SchemaMapping::parse(schema_from_docs(&doc.source)?, schema_from_docs(&doc.target)?, &tgds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relational::RelationSchema;

    #[test]
    fn mapping_json_round_trip() {
        let s = Schema::from_relations([RelationSchema::new("R", &["a", "b"])]).unwrap();
        let t = Schema::from_relations([RelationSchema::new("T", &["a"])]).unwrap();
        let m = SchemaMapping::parse(s, t, &["R(a,b) AND b > 2 -> T(a)"]).unwrap();
        assert_eq!(SchemaMapping::from_json(&m.to_json()).unwrap(), m);
        assert!(SchemaMapping::from_json(r#"{"source": [], "target": [], "tgds": ["R(a) -> T(a)"]}"#).is_err());
    }

    #[test]
    fn builds_and_prints_join() {
        let tgd = StTgd::inferred(
            vec![Atom::vars("R", &["a", "b"]), Atom::vars("V", &["b", "c"])],
            vec![],
            vec![Atom::vars("T", &["a", "b", "c"])],
        )
        .unwrap();
        assert_eq!(tgd.to_string(), "R(a,b) AND V(b,c) -> T(a,b,c)");
    }

    #[test]
    fn prints_existentials_and_conditions() {
        let tgd = StTgd::inferred(
            vec![Atom::vars("T", &["a", "g"])],
            vec![Condition {
                left: Term::var("a"),
                op: CompareOp::Eq,
                right: Term::constant("O'Neil"),
            }],
            vec![Atom::vars("R", &["a", "E", "D"])],
        )
        .unwrap();
        assert_eq!(
            tgd.to_string(),
            "T(a,g) AND a = 'O''Neil' -> EXISTS D,E: R(a,E,D)"
        );
    }

    #[test]
    fn rejects_unsafe_dependencies() {
        let unbound = StTgd::new(
            vec![Atom::vars("R", &["a"])],
            vec![],
            vec![Atom::vars("T", &["a", "b"])],
            vec![],
        );
        assert!(unbound.is_err());
        let func_in_body = StTgd::inferred(
            vec![Atom::new("R", vec![Term::func("f", vec![Term::var("a")])])],
            vec![],
            vec![Atom::vars("T", &["a"])],
        );
        assert!(func_in_body.is_err());
        let cond_unbound = StTgd::inferred(
            vec![Atom::vars("R", &["a"])],
            vec![Condition {
                left: Term::var("z"),
                op: CompareOp::Lt,
                right: Term::constant("3"),
            }],
            vec![Atom::vars("T", &["a"])],
        );
        assert!(cond_unbound.is_err());
    }

    #[test]
    fn mapping_checks_schemas() {
        let s = Schema::from_relations([RelationSchema::new("R", &["a", "b"])]).unwrap();
        let t = Schema::from_relations([RelationSchema::new("T", &["a"])]).unwrap();
        assert!(SchemaMapping::parse(s.clone(), t.clone(), &["R(a,b) -> T(a)"]).is_ok());
        assert!(SchemaMapping::parse(s.clone(), t.clone(), &["R(a) -> T(a)"]).is_err());
        assert!(SchemaMapping::parse(s, t, &["R(a,b) -> V(a)"]).is_err());
    }

    #[test]
    fn negations_partition_the_order() {
        use std::cmp::Ordering::*;
        for op in [CompareOp::Lt, CompareOp::Le, CompareOp::Eq, CompareOp::Ge, CompareOp::Gt] {
            for ord in [Less, Equal, Greater] {
                let neg = op.negation().iter().filter(|n| n.holds(ord)).count();
                assert_eq!(op.holds(ord) as usize + neg, 1);
            }
        }
    }
}
