//! Composition words such as `nu_5 sigma_8`, their templates (`nu_{n} sigma_{n+3}`)
//! and integer linear combinations of words.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;

use super::FactError;

/// One factor of a composite: a named class on the sphere given by `index`.
/// Names that do not follow the `base_index` pattern are kept opaque.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub base: String,
    pub index: Option<i64>,
}

impl Atom {
    pub fn parse(s: &str) -> Atom {
        if let Some((base, idx)) = s.rsplit_once('_') {
            if let Ok(i) = idx.parse::<i64>() {
                if !base.is_empty() {
                    return Atom { base: base.to_string(), index: Some(i) };
                }
            }
        }
        Atom { base: s.to_string(), index: None }
    }

    pub fn render(&self) -> String {
        match self.index {
            Some(i) => format!("{}_{}", self.base, i),
            None => self.base.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.base == "iota" && self.index.is_some()
    }

    /// Stem of the class, when the base name is one of the standard generators.
    pub fn stem(&self) -> Option<i64> {
        let i = self.index?;
        if self.base == "w" {
            return Some(i - 1);
        }
        atom_stem(&self.base)
    }

    pub fn shifted(&self, by: i64) -> Atom {
        Atom { base: self.base.clone(), index: self.index.map(|i| i + by) }
    }
}

/// Stems of the named sphere classes.
pub fn atom_stem(base: &str) -> Option<i64> {
    Some(match base {
        "iota" => 0,
        "eta" => 1,
        "nu" | "nu'" | "alpha1" => 3,
        "sigma" | "sigma'" | "sigma''" | "sigma'''" | "alpha2" => 7,
        "eps" | "nubar" => 8,
        "mu" => 9,
        "eps'" | "beta1" => 10,
        "zeta" | "mu'" | "alpha3'" => 11,
        "kappa" => 14,
        "rho" => 15,
        _ => return None,
    })
}

/// A composite α₁∘α₂∘…, leftmost factor first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Atom>);

impl Word {
    pub fn parse(s: &str) -> Result<Word, FactError> {
        let atoms: Vec<Atom> = s.split_whitespace().map(Atom::parse).collect();
        if atoms.is_empty() {
            return Err(FactError::Syntax(format!("empty word `{s}`")));
        }
        Ok(Word(atoms))
    }

    pub fn render(&self) -> String {
        self.0.iter().map(Atom::render).collect::<Vec<_>>().join(" ")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Drop identity factors unless the word is a bare identity.
    pub fn normalized(&self) -> Word {
        let kept: Vec<Atom> = self.0.iter().filter(|a| !a.is_identity()).cloned().collect();
        if kept.is_empty() {
            Word(vec![self.0[0].clone()])
        } else {
            Word(kept)
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Word(v)
    }

    pub fn shifted(&self, by: i64) -> Word {
        Word(self.0.iter().map(|a| a.shifted(by)).collect())
    }

    /// Sphere the composite maps into.
    pub fn sphere(&self) -> Option<i64> {
        self.0.first()?.index
    }

    /// Dimension of the source sphere, if every factor has a known stem.
    pub fn degree(&self) -> Option<i64> {
        let last = self.0.last()?;
        Some(last.index? + last.stem()?)
    }

    /// Whether consecutive factors have matching spheres, where that can be checked.
    pub fn is_composable(&self) -> bool {
        self.0.windows(2).all(|w| match (w[0].index, w[0].stem(), w[1].index) {
            (Some(i), Some(s), Some(j)) => i + s == j,
            _ => true,
        })
    }

    pub fn sub(&self, from: usize, to: usize) -> Word {
        Word(self.0[from..to].to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Integer linear combination of words. Empty means zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Expr(pub Vec<(BigInt, Word)>);

impl Expr {
    pub fn zero() -> Expr {
        Expr(vec![])
    }

    pub fn word(w: Word) -> Expr {
        Expr(vec![(BigInt::one(), w)])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Parse `2 sigma_9 nu_16 - eta_9 mu_10`, `-nu_8 sigma_11`, or `0`.
    pub fn parse(s: &str) -> Result<Expr, FactError> {
        let s = s.trim();
        if s == "0" || s.is_empty() {
            return Ok(Expr::zero());
        }
        let mut terms = Vec::new();
        let mut sign = BigInt::one();
        let mut current: Vec<&str> = Vec::new();
        let flush = |current: &mut Vec<&str>, sign: &BigInt, terms: &mut Vec<(BigInt, Word)>| -> Result<(), FactError> {
            if current.is_empty() {
                return Err(FactError::Syntax(format!("dangling operator in `{s}`")));
            }
            let (coef, rest) = match current[0].parse::<BigInt>() {
                Ok(c) => (c, &current[1..]),
                Err(_) => (BigInt::one(), &current[..]),
            };
            if rest.is_empty() {
                return Err(FactError::Syntax(format!("coefficient without word in `{s}`")));
            }
            let w = Word::parse(&rest.join(" "))?;
            terms.push((coef * sign, w));
            current.clear();
            Ok(())
        };
        for tok in s.split_whitespace() {
            match tok {
                "+" => {
                    flush(&mut current, &sign, &mut terms)?;
                    sign = BigInt::one();
                }
                "-" => {
                    flush(&mut current, &sign, &mut terms)?;
                    sign = -BigInt::one();
                }
                t if current.is_empty() && t.starts_with('-') && t.len() > 1 => {
                    sign = -sign;
                    current.push(&t[1..]);
                }
                t => current.push(t),
            }
        }
        flush(&mut current, &sign, &mut terms)?;
        Ok(Expr(terms.into_iter().filter(|(c, _)| !c.is_zero()).collect()))
    }

    pub fn render(&self) -> String {
        if self.0.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (c, w)) in self.0.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if !a.is_one() {
                out.push_str(&a.to_string());
                out.push(' ');
            }
            out.push_str(&w.render());
        }
        out
    }

    pub fn scaled(&self, k: &BigInt) -> Expr {
        Expr(self.0.iter().map(|(c, w)| (c * k, w.clone())).filter(|(c, _)| !c.is_zero()).collect())
    }

    /// Right composition with a word, term by term.
    pub fn then(&self, w: &Word) -> Expr {
        Expr(self.0.iter().map(|(c, x)| (c.clone(), x.concat(w))).collect())
    }

    /// Left composition with a word, term by term.
    pub fn after(&self, w: &Word) -> Expr {
        Expr(self.0.iter().map(|(c, x)| (c.clone(), w.concat(x))).collect())
    }

    pub fn shifted(&self, by: i64) -> Expr {
        Expr(self.0.iter().map(|(c, w)| (c.clone(), w.shifted(by))).collect())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Substitute the sphere parameter in a template such as `nu_{n} sigma_{n+3}`.
pub fn instantiate(template: &str, n: i64) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(start) = rest.find('{') {
        out.push_str(&rest[..start]);
        let Some(end) = rest[start..].find('}') else {
            out.push_str(&rest[start..]);
            return out;
        };
        let inner = &rest[start + 1..start + end];
        out.push_str(&eval_offset(inner, n).map(|v| v.to_string()).unwrap_or_else(|| format!("{{{inner}}}")));
        rest = &rest[start + end + 1..];
    }
    out.push_str(rest);
    out
}

fn eval_offset(inner: &str, n: i64) -> Option<i64> {
    let inner = inner.replace(' ', "");
    let tail = inner.strip_prefix('n')?;
    if tail.is_empty() {
        return Some(n);
    }
    if let Some(d) = tail.strip_prefix('+') {
        return Some(n + d.parse::<i64>().ok()?);
    }
    if let Some(d) = tail.strip_prefix('-') {
        return Some(n - d.parse::<i64>().ok()?);
    }
    None
}

pub fn is_template(s: &str) -> bool {
    s.contains("{n")
}

/// Value of n for which `template` instantiates to `word`, if any.
pub fn match_template(template: &str, word: &Word) -> Option<i64> {
    if !is_template(template) {
        return (Word::parse(template).ok()?.normalized() == *word).then_some(0);
    }
    // The first placeholder pins n down; confirm by instantiating.
    let atoms: Vec<&str> = template.split_whitespace().collect();
    if atoms.len() != word.len() {
        return None;
    }
    for (t, a) in atoms.iter().zip(&word.0) {
        if let (Some(open), Some(idx)) = (t.find("_{"), a.index) {
            let inner = t[open + 2..].trim_end_matches('}');
            let offset = eval_offset(inner, 0)?;
            let n = idx - offset;
            let inst = Word::parse(&instantiate(template, n)).ok()?;
            return (inst == *word).then_some(n);
        }
    }
    None
}
