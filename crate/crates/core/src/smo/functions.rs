use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::relational::{ConstKind, Constant, Decimal};

type Evaluator = Arc<dyn Fn(&[Constant]) -> std::result::Result<Constant, String> + Send + Sync>;

#[derive(Clone)]
pub struct Function {
    arity: usize,
    eval: Evaluator,
}

impl fmt::Debug for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Function").field("arity", &self.arity).finish()
    }
}

/// Named functions usable in tgd heads.
///
/// A partial inverse of `f` is registered under `f.inv`: it takes the output of `f` followed
/// by all inputs but the first and returns the first input.
#[derive(Debug, Clone, Default)]
pub struct FunctionRegistry {
    functions: BTreeMap<String, Function>,
}

pub fn inverse_name(function: &str) -> String {
    format!("{function}.inv")
}

pub const SEPARATOR: &str = " ";

impl FunctionRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// `dec_add` (exact numeric addition) and `concat` (join with a space), with inverses,
    /// plus `concat.left` / `concat.right` which split at the first space.
    pub fn builtin() -> Self {
        let mut r = FunctionRegistry::empty();
        r.register("dec_add", 2, |a| numeric("dec_add", &a[0], &a[1], Decimal::checked_add));
        r.register("dec_add.inv", 2, |a| numeric("dec_add.inv", &a[0], &a[1], Decimal::checked_sub));
        r.register("concat", 2, |a| {
            Ok(Constant::parse(&format!("{}{SEPARATOR}{}", a[0], a[1])))
        });
        r.register("concat.inv", 2, |a| {
            let suffix = format!("{SEPARATOR}{}", a[1]);
            a[0].lexical()
                .strip_suffix(&suffix)
                .map(Constant::parse)
                .ok_or_else(|| format!("{:?} does not end in {suffix:?}", a[0].lexical()))
        });
        r.register("concat.left", 1, |a| split(&a[0]).map(|(l, _)| l));
        r.register("concat.right", 1, |a| split(&a[0]).map(|(_, r)| r));
        r
    }

    pub fn register(
        &mut self,
        name: &str,
        arity: usize,
        eval: impl Fn(&[Constant]) -> std::result::Result<Constant, String> + Send + Sync + 'static,
    ) {
        self.functions.insert(
            name.to_string(),
            Function {
                arity,
                eval: Arc::new(eval),
            },
        );
    }

    pub fn contains(&self, name: &str) -> bool {
        self.functions.contains_key(name)
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.functions.get(name).map(|f| f.arity)
    }

    pub fn has_inverse(&self, name: &str) -> bool {
        self.contains(&inverse_name(name))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.functions.keys().map(String::as_str)
    }

    pub fn apply(&self, name: &str, args: &[Constant]) -> Result<Constant> {
        let f = self
            .functions
            .get(name)
            .ok_or_else(|| Error::UnregisteredFunction(name.to_string()))?;
        if f.arity != args.len() {
            return Err(Error::FunctionArity {
                name: name.to_string(),
                expected: f.arity,
                got: args.len(),
            });
        }
        (f.eval)(args).map_err(|reason| Error::FunctionDomain {
            name: name.to_string(),
            reason,
        })
    }
}

fn numeric(
    name: &str,
    a: &Constant,
    b: &Constant,
    op: fn(Decimal, Decimal) -> Option<Decimal>,
) -> std::result::Result<Constant, String> {
    let (da, db) = match (a.as_decimal(), b.as_decimal()) {
        (Some(x), Some(y)) => (x, y),
        _ => return Err(format!("{name} needs numeric inputs, got {a} and {b}")),
    };
    if a.kind() != b.kind() {
        return Err(format!("{name} mixes an integer and a decimal ({a}, {b})"));
    }
    let out = op(da, db).ok_or_else(|| format!("{name} overflows"))?;
    Ok(match a.kind() {
        ConstKind::Integer => {
            let s = out.to_string();
            Constant::parse(s.strip_suffix(".0").expect("integer inputs give an integral result"))
        }
        _ => Constant::decimal(out),
    })
}

fn split(g: &Constant) -> std::result::Result<(Constant, Constant), String> {
    g.lexical()
        .split_once(SEPARATOR)
        .map(|(l, r)| (Constant::parse(l), Constant::parse(r)))
        .ok_or_else(|| format!("{:?} contains no separator", g.lexical()))
}
