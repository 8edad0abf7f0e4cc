use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::relational::TupleId;

/// A product of tuple ids, kept as a sorted multiset.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<TupleId>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn of(ids: impl IntoIterator<Item = TupleId>) -> Self {
        let mut v: Vec<TupleId> = ids.into_iter().collect();
        v.sort();
        Monomial(v)
    }

    pub fn ids(&self) -> &[TupleId] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial::of(self.0.iter().chain(other.0.iter()).cloned())
    }

    /// The witness this monomial stands for: its ids without multiplicity.
    pub fn witness(&self) -> BTreeSet<TupleId> {
        self.0.iter().cloned().collect()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("*"))
    }
}

/// Element of the provenance semiring ℕ[X] over tuple ids.
///
/// Always canonical: like monomials merged, no zero coefficients. The empty polynomial is
/// 0 and the polynomial holding only the empty monomial is 1.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, u64>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Polynomial::from_monomial(Monomial::one(), 1)
    }

    pub fn var(id: TupleId) -> Self {
        Polynomial::from_monomial(Monomial::of([id]), 1)
    }

    pub fn from_monomial(m: Monomial, coefficient: u64) -> Self {
        let mut terms = BTreeMap::new();
        if coefficient > 0 {
            terms.insert(m, coefficient);
        }
        Polynomial { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u64)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn monomial_count(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            *terms.entry(m.clone()).or_insert(0) += c;
        }
        Polynomial { terms }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut terms: BTreeMap<Monomial, u64> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                *terms.entry(a.mul(b)).or_insert(0) += ca * cb;
            }
        }
        Polynomial { terms }
    }

    /// Evaluates over ℕ with every id mapped to 1: the number of derivations.
    pub fn count_derivations(&self) -> u64 {
        self.terms.values().sum()
    }

    /// Why-provenance: one witness per monomial, coefficients and exponents dropped.
    pub fn witness_basis(&self) -> WitnessBasis {
        WitnessBasis(self.terms.keys().map(Monomial::witness).collect())
    }

    /// Every tuple id occurring anywhere in the polynomial.
    pub fn support(&self) -> BTreeSet<TupleId> {
        self.terms
            .keys()
            .flat_map(|m| m.ids().iter().cloned())
            .collect()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| match (*c, m.ids().is_empty()) {
                (1, _) => m.to_string(),
                (c, true) => c.to_string(),
                (c, false) => format!("{c}*{m}"),
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl FromStr for Polynomial {
    type Err = Error;

    /// Parses `r1*s1 + 2*r3`; `0` and `1` are the semiring identities.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse {
            offset: 0,
            message: format!("polynomial {s:?}: {msg}"),
        };
        let s = s.trim();
        if s == "0" {
            return Ok(Polynomial::zero());
        }
        let mut poly = Polynomial::zero();
        for term in s.split('+') {
            let mut coefficient = 1u64;
            let mut ids = Vec::new();
            for factor in term.split('*') {
                let factor = factor.trim();
                if factor.is_empty() {
                    return Err(bad("empty factor"));
                }
                if factor.bytes().all(|b| b.is_ascii_digit()) {
                    coefficient *= factor.parse::<u64>().map_err(|_| bad("coefficient"))?;
                } else {
                    ids.push(factor.parse::<TupleId>()?);
                }
            }
            poly = poly.add(&Polynomial::from_monomial(Monomial::of(ids), coefficient));
        }
        Ok(poly)
    }
}

/// Why-provenance of one fact: a set of witnesses, each a set of tuple ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WitnessBasis(pub BTreeSet<BTreeSet<TupleId>>);

impl WitnessBasis {
    pub fn witnesses(&self) -> impl Iterator<Item = &BTreeSet<TupleId>> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn union(&self, other: &WitnessBasis) -> WitnessBasis {
        WitnessBasis(self.0.union(&other.0).cloned().collect())
    }

    pub fn from_witnesses(ws: impl IntoIterator<Item = BTreeSet<TupleId>>) -> Self {
        WitnessBasis(ws.into_iter().collect())
    }
}

impl fmt::Display for WitnessBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|w| {
                let ids: Vec<String> = w.iter().map(ToString::to_string).collect();
                format!("{{{}}}", ids.join(","))
            })
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}
