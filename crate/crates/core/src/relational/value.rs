use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Lexical category of a constant, inferred from its spelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstKind {
    Integer,
    Decimal,
    Text,
}

/// Exact fixed-point decimal: `mantissa * 10^-scale`.
///
/// Canonical values keep at least one fractional digit and no other trailing zeros,
/// so `5.00` and `5.0` are the same decimal and print as `5.0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Decimal {
    mantissa: i128,
    scale: u32,
}

impl Decimal {
    pub fn new(mantissa: i128, scale: u32) -> Self {
        let mut d = Decimal { mantissa, scale };
        if d.scale == 0 {
            d.mantissa *= 10;
            d.scale = 1;
        }
        while d.scale > 1 && d.mantissa % 10 == 0 {
            d.mantissa /= 10;
            d.scale -= 1;
        }
        d
    }

    pub fn from_integer(v: i128) -> Self {
        Decimal::new(v, 0)
    }

    pub fn parse(s: &str) -> Option<Self> {
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty() || !int.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        if !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{int}{frac}");
        let mut mantissa: i128 = digits.parse().ok()?;
        if neg {
            mantissa = -mantissa;
        }
        Some(Decimal::new(mantissa, frac.len() as u32))
    }

    fn aligned(self, other: Decimal) -> (i128, i128, u32) {
        let scale = self.scale.max(other.scale);
        let a = self.mantissa * 10i128.pow(scale - self.scale);
        let b = other.mantissa * 10i128.pow(scale - other.scale);
        (a, b, scale)
    }

    pub fn checked_add(self, other: Decimal) -> Option<Decimal> {
        let (a, b, scale) = self.aligned(other);
        Some(Decimal::new(a.checked_add(b)?, scale))
    }

    pub fn checked_sub(self, other: Decimal) -> Option<Decimal> {
        let (a, b, scale) = self.aligned(other);
        Some(Decimal::new(a.checked_sub(b)?, scale))
    }
}

impl PartialOrd for Decimal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Decimal {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(*other);
        a.cmp(&b)
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.mantissa < 0 { "-" } else { "" };
        let abs = self.mantissa.unsigned_abs();
        let pow = 10u128.pow(self.scale);
        write!(
            f,
            "{sign}{}.{:0width$}",
            abs / pow,
            abs % pow,
            width = self.scale as usize
        )
    }
}

/// A constant in canonical lexical form.
///
/// Field order matters: the derived ordering compares the lexical form first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constant {
    lexical: String,
    kind: ConstKind,
}

fn is_integer_lexeme(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    !body.is_empty() && body.bytes().all(|b| b.is_ascii_digit())
}

fn is_decimal_lexeme(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    match body.split_once('.') {
        Some((i, f)) => {
            !i.is_empty()
                && !f.is_empty()
                && i.bytes().all(|b| b.is_ascii_digit())
                && f.bytes().all(|b| b.is_ascii_digit())
        }
        None => false,
    }
}

impl Constant {
    /// Classifies `raw` by its spelling and stores it canonically.
    pub fn parse(raw: &str) -> Self {
        if is_integer_lexeme(raw) {
            if let Ok(v) = raw.parse::<i128>() {
                return Constant::integer(v);
            }
        }
        if is_decimal_lexeme(raw) {
            if let Some(d) = Decimal::parse(raw) {
                return Constant::decimal(d);
            }
        }
        Constant::text(raw)
    }

    pub fn text(s: impl Into<String>) -> Self {
        Constant {
            lexical: s.into(),
            kind: ConstKind::Text,
        }
    }

    pub fn integer(v: i128) -> Self {
        Constant {
            lexical: v.to_string(),
            kind: ConstKind::Integer,
        }
    }

    pub fn decimal(d: Decimal) -> Self {
        Constant {
            lexical: d.to_string(),
            kind: ConstKind::Decimal,
        }
    }

    pub fn kind(&self) -> ConstKind {
        self.kind
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn as_integer(&self) -> Option<i128> {
        match self.kind {
            ConstKind::Integer => self.lexical.parse().ok(),
            _ => None,
        }
    }

    /// Numeric view of integers and decimals.
    pub fn as_decimal(&self) -> Option<Decimal> {
        match self.kind {
            ConstKind::Integer => self.as_integer().map(Decimal::from_integer),
            ConstKind::Decimal => Decimal::parse(&self.lexical),
            ConstKind::Text => None,
        }
    }

    /// Total order used by comparison conditions: numbers compare numerically and sort
    /// before text, text compares lexically.
    pub fn compare(&self, other: &Constant) -> Ordering {
        match (self.as_decimal(), other.as_decimal()) {
            (Some(a), Some(b)) => a.cmp(&b),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => self.lexical.cmp(&other.lexical),
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.lexical)
    }
}

/// Label of a labeled null (η₁, η₂, ...). Labels are scoped to one pipeline run.
pub type NullLabel = u64;

/// A cell value: a constant or a labeled null. Constants sort before nulls.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Const(Constant),
    Null(NullLabel),
}

impl Value {
    pub fn constant(raw: &str) -> Self {
        Value::Const(Constant::parse(raw))
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null(_))
    }

    pub fn as_constant(&self) -> Option<&Constant> {
        match self {
            Value::Const(c) => Some(c),
            Value::Null(_) => None,
        }
    }

    pub fn null_label(&self) -> Option<NullLabel> {
        match self {
            Value::Null(l) => Some(*l),
            Value::Const(_) => None,
        }
    }
}

impl From<Constant> for Value {
    fn from(c: Constant) -> Self {
        Value::Const(c)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Const(c) => c.fmt(f),
            Value::Null(l) => write!(f, "η{l}"),
        }
    }
}

/// Monotone source of fresh labeled nulls.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NullAllocator {
    last: NullLabel,
}

impl NullAllocator {
    pub fn new() -> Self {
        Self::default()
    }

    /// An allocator whose next null is `last + 1`.
    pub fn starting_after(last: NullLabel) -> Self {
        NullAllocator { last }
    }

    pub fn last_issued(&self) -> NullLabel {
        self.last
    }

    pub fn fresh(&mut self) -> Value {
        self.last += 1;
        Value::Null(self.last)
    }

    /// Ensures future labels are strictly greater than `label`.
    pub fn observe(&mut self, label: NullLabel) {
        self.last = self.last.max(label);
    }
}
