//! Turning composite words into coordinates in a sphere group.
//!
//! Resolution tries, in order: a zero target group, a generator name, a fact for the
//! whole word, a factor known to vanish, and finally rewriting a sub-word by a fact and
//! resolving the pieces. Composition is treated as bilinear; facts are only recorded
//! where the factors involved make that legitimate (suspension classes on the right).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};

use super::word::{instantiate, match_template, Expr, Word};
use super::{hypothesis_ok, CompositionFact, FactDb, FactError, GroupEntry};
use crate::local_algebra::{pow_p, residue, scale_vector, unit_vector, zero_vector, Order, Vector};

const MAX_DEPTH: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Resolution {
    /// Coordinates in the target group's generators.
    Value(Vector),
    /// Known to vanish, although the ambient group is not in the database.
    Zero,
    /// No fact determines the value; the expression is carried symbolically.
    Symbolic(String),
}

impl Resolution {
    pub fn value(&self) -> Option<&Vector> {
        match self {
            Resolution::Value(v) => Some(v),
            Resolution::Zero | Resolution::Symbolic(_) => None,
        }
    }
}

/// Resolves words against a database at one prime, tracking which facts with
/// several possible values were consulted and which alternative was used.
pub struct Resolver<'a> {
    db: &'a FactDb,
    prime: u64,
    hypothesis: Option<String>,
    choices: BTreeMap<String, usize>,
    consulted: RefCell<BTreeMap<String, usize>>,
    cited: RefCell<BTreeSet<String>>,
}

impl<'a> Resolver<'a> {
    pub fn new(db: &'a FactDb, prime: u64) -> Self {
        Resolver {
            db,
            prime,
            hypothesis: None,
            choices: BTreeMap::new(),
            consulted: RefCell::new(BTreeMap::new()),
            cited: RefCell::new(BTreeSet::new()),
        }
    }

    pub fn with_hypothesis(mut self, h: Option<&str>) -> Self {
        self.hypothesis = h.map(str::to_string);
        self
    }

    pub fn with_choices(mut self, choices: BTreeMap<String, usize>) -> Self {
        self.choices = choices;
        self
    }

    pub fn db(&self) -> &FactDb {
        self.db
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn hypothesis(&self) -> Option<&str> {
        self.hypothesis.as_deref()
    }

    /// Facts with alternatives that were consulted, with their number of alternatives.
    pub fn consulted(&self) -> BTreeMap<String, usize> {
        self.consulted.borrow().clone()
    }

    /// Every fact id used so far.
    pub fn cited(&self) -> Vec<String> {
        self.cited.borrow().iter().cloned().collect()
    }

    pub fn cite(&self, id: &str) {
        self.cited.borrow_mut().insert(id.to_string());
    }

    pub fn lookup(&self, n: i64, m: i64) -> Result<GroupEntry, FactError> {
        self.db.lookup_group(self.prime, n, m)
    }

    /// Resolve an expression whose terms all live in π_m(Sⁿ).
    pub fn resolve(&self, expr: &Expr, n: i64, m: i64) -> Result<Resolution, FactError> {
        match self.lookup(n, m) {
            Ok(_) => match self.resolve_expr(expr, n, m, 0)? {
                Some(v) => Ok(Resolution::Value(v)),
                None => Ok(Resolution::Symbolic(expr.render())),
            },
            Err(e @ FactError::Missing { .. }) => {
                if expr.0.iter().all(|(c, w)| self.term_vanishes(c, w)) {
                    Ok(Resolution::Zero)
                } else {
                    Err(e)
                }
            }
            Err(e) => Err(e),
        }
    }

    /// Whether a term is zero without knowing its ambient group: some factor vanishes,
    /// or the coefficient kills a right-hand factor.
    pub fn term_vanishes(&self, c: &BigInt, w: &Word) -> bool {
        if c.is_zero() {
            return true;
        }
        let w = w.normalized();
        for len in (1..=w.len()).rev() {
            for start in 0..=w.len() - len {
                if self.vanishes(&w.sub(start, start + len)) {
                    return true;
                }
            }
        }
        self.coefficient_kills(c, &w)
    }

    /// c·(x∘y) = x∘(c·y) when y is a suspension; zero once c is a multiple of the
    /// exponent of the group holding y. Right-hand factors of the shipped words are
    /// always suspensions, which is what makes this legitimate.
    fn coefficient_kills(&self, c: &BigInt, w: &Word) -> bool {
        for split in 1..w.len() {
            let tail = w.sub(split, w.len());
            let Ok((n, m)) = Self::word_target(&tail) else { continue };
            let Ok(entry) = self.lookup(n, m) else { continue };
            let mut exponent = 0;
            let mut bounded = true;
            for (_, o) in &entry.generators {
                match o {
                    Order::Finite(e) => exponent = exponent.max(*e),
                    Order::Infinite => bounded = false,
                }
            }
            if bounded && (c % pow_p(self.prime, exponent)).is_zero() {
                return true;
            }
        }
        false
    }

    /// Rewrite by facts without locating the result in a group, for display of
    /// classes whose ambient group is outside the database.
    pub fn rewrite(&self, expr: &Expr) -> Expr {
        let mut out = Vec::new();
        for (c, w) in &expr.0 {
            if self.term_vanishes(c, w) {
                continue;
            }
            match self.rewrite_word(&w.normalized(), 0) {
                Some(e) => out.extend(e.scaled(c).0),
                None => out.push((c.clone(), w.normalized())),
            }
        }
        Expr(out)
    }

    fn rewrite_word(&self, w: &Word, depth: usize) -> Option<Expr> {
        if depth >= MAX_DEPTH {
            return None;
        }
        for len in (1..=w.len()).rev() {
            for start in 0..=w.len() - len {
                let sub = w.sub(start, start + len);
                if let Some((fact, param)) = self.matching(&sub).into_iter().next() {
                    let value = Expr::parse(&instantiate(self.pick(fact), param)).ok()?;
                    let prefix = w.sub(0, start);
                    let suffix = w.sub(start + len, w.len());
                    let mut out = Vec::new();
                    for (c, x) in &value.0 {
                        let whole = prefix.concat(x).concat(&suffix);
                        match self.rewrite_word(&whole, depth + 1) {
                            Some(e) => out.extend(e.scaled(c).0),
                            None => out.push((c.clone(), whole)),
                        }
                    }
                    return Some(self.rewrite(&Expr(out)));
                }
            }
        }
        None
    }

    /// The target (sphere, degree) of a word built from standard generators.
    pub fn word_target(w: &Word) -> Result<(i64, i64), FactError> {
        match (w.sphere(), w.degree()) {
            (Some(n), Some(m)) => Ok((n, m)),
            _ => Err(FactError::Untyped(w.render())),
        }
    }

    /// a∘b, expanded bilinearly and brought to normal form when the facts allow.
    pub fn compose(&self, a: &Expr, b: &Expr) -> Result<(Expr, bool), FactError> {
        let mut product = Expr::zero();
        for (ca, wa) in &a.0 {
            for (cb, wb) in &b.0 {
                product.0.push((ca * cb, wa.concat(wb)));
            }
        }
        if product.is_zero() {
            return Ok((product, false));
        }
        let (n, m) = Self::word_target(&product.0[0].1.normalized())?;
        match self.resolve(&product, n, m)? {
            Resolution::Value(v) => Ok((self.to_expr(&self.lookup(n, m)?, &v), false)),
            Resolution::Zero => Ok((Expr::zero(), false)),
            Resolution::Symbolic(_) => Ok((product, true)),
        }
    }

    /// Render coordinates as a combination of generator names.
    pub fn to_expr(&self, entry: &GroupEntry, v: &[BigRational]) -> Expr {
        let mut terms = Vec::new();
        for ((name, order), c) in entry.generators.iter().zip(v) {
            let c = match order {
                Order::Finite(e) => {
                    // Symmetric representative, so -x prints as -x rather than (p^e - 1)x.
                    let m = pow_p(self.prime, *e);
                    let r = residue(c, self.prime, *e);
                    if BigInt::from(2) * &r > m { r - m } else { r }
                }
                Order::Infinite => c.to_integer(),
            };
            if !c.is_zero() {
                terms.push((c, Word::parse(name).expect("generator names parse")));
            }
        }
        Expr(terms)
    }

    fn resolve_expr(&self, expr: &Expr, n: i64, m: i64, depth: usize) -> Result<Option<Vector>, FactError> {
        let entry = self.lookup(n, m)?;
        let mut acc = zero_vector(entry.generators.len());
        for (c, w) in &expr.0 {
            if self.coefficient_kills(c, &w.normalized()) {
                continue;
            }
            let Some(v) = self.resolve_word(w, n, m, depth)? else { return Ok(None) };
            let c = BigRational::from_integer(c.clone());
            for (a, b) in acc.iter_mut().zip(scale_vector(&v, &c)) {
                *a += b;
            }
        }
        Ok(Some(acc))
    }

    fn resolve_word(&self, word: &Word, n: i64, m: i64, depth: usize) -> Result<Option<Vector>, FactError> {
        let w = word.normalized();
        let entry = self.lookup(n, m)?;
        let size = entry.generators.len();
        if entry.is_zero() {
            return Ok(Some(zero_vector(size)));
        }
        if let Some(i) = entry.index_of(&w.render()) {
            return Ok(Some(unit_vector(size, i)));
        }
        if depth >= MAX_DEPTH {
            return Ok(None);
        }
        for (fact, param) in self.matching(&w) {
            let value = Expr::parse(&instantiate(self.pick(fact), param))?;
            if let Some(v) = self.resolve_expr(&value, n, m, depth + 1)? {
                return Ok(Some(v));
            }
        }
        for len in (1..w.len()).rev() {
            for start in 0..=w.len() - len {
                if self.vanishes(&w.sub(start, start + len)) {
                    return Ok(Some(zero_vector(size)));
                }
            }
        }
        for len in (1..w.len()).rev() {
            for start in 0..=w.len() - len {
                let sub = w.sub(start, start + len);
                for (fact, param) in self.matching(&sub) {
                    let value = Expr::parse(&instantiate(self.pick(fact), param))?;
                    let prefix = w.sub(0, start);
                    let suffix = w.sub(start + len, w.len());
                    let rewritten = Expr(
                        value
                            .0
                            .iter()
                            .map(|(c, x)| (c.clone(), prefix.concat(x).concat(&suffix)))
                            .collect(),
                    );
                    if let Some(v) = self.resolve_expr(&rewritten, n, m, depth + 1)? {
                        return Ok(Some(v));
                    }
                }
            }
        }
        Ok(None)
    }

    /// Whether a factor is known to be null: a fact says so, or its group is zero.
    fn vanishes(&self, sub: &Word) -> bool {
        for (fact, _) in self.matching(sub) {
            if fact.values.iter().all(|v| v.trim() == "0") {
                self.cite(&fact.id);
                return true;
            }
        }
        if let Ok((n, m)) = Self::word_target(sub) {
            if let Ok(e) = self.lookup(n, m) {
                return e.is_zero();
            }
        }
        false
    }

    fn matching(&self, w: &Word) -> Vec<(&'a CompositionFact, i64)> {
        let mut out = Vec::new();
        for fact in self.db.compositions(self.prime) {
            if !hypothesis_ok(fact.hypothesis.as_deref(), self.hypothesis.as_deref()) {
                continue;
            }
            if let Some(param) = match_template(&fact.word, w) {
                let (lo, hi) = fact.spheres;
                let templated = super::word::is_template(&fact.word);
                if !templated || (param >= lo as i64 && hi.is_none_or(|h| param <= h as i64)) {
                    out.push((fact, param));
                }
            }
        }
        out
    }

    fn pick(&self, fact: &CompositionFact) -> &'a str {
        let fact: &'a CompositionFact = self
            .db
            .compositions(self.prime)
            .find(|f| f.id == fact.id)
            .expect("fact comes from this database");
        self.cite(&fact.id);
        if fact.values.len() > 1 {
            self.consulted.borrow_mut().insert(fact.id.clone(), fact.values.len());
        }
        let idx = self.choices.get(&fact.id).copied().unwrap_or(0);
        &fact.values[idx.min(fact.values.len() - 1)]
    }
}
