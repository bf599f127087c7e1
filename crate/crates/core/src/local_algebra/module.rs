use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

use super::scalar::{int_valuation, pow_p};
use super::AlgebraError;

/// Order of an element in a p-local module. Finite orders are always powers of p,
/// so only the exponent is kept.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Order {
    Finite(u32),
    Infinite,
}

impl Order {
    pub fn value(&self, p: u64) -> Option<BigInt> {
        match self {
            Order::Finite(e) => Some(pow_p(p, *e)),
            Order::Infinite => None,
        }
    }

    pub fn render(&self, p: u64) -> String {
        match self {
            Order::Finite(e) => pow_p(p, *e).to_string(),
            Order::Infinite => "inf".to_string(),
        }
    }
}

impl PartialOrd for Order {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Order {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Order::Finite(a), Order::Finite(b)) => a.cmp(b),
            (Order::Finite(_), Order::Infinite) => Ordering::Less,
            (Order::Infinite, Order::Finite(_)) => Ordering::Greater,
            (Order::Infinite, Order::Infinite) => Ordering::Equal,
        }
    }
}

/// Canonical form of a finitely generated module over the p-local integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FgModule {
    prime: u64,
    free_rank: usize,
    torsion: Vec<u32>,
}

impl FgModule {
    pub fn new(prime: u64, free_rank: usize, mut torsion: Vec<u32>) -> Self {
        torsion.retain(|&e| e > 0);
        torsion.sort_unstable_by(|a, b| b.cmp(a));
        FgModule { prime, free_rank, torsion }
    }

    pub fn zero(prime: u64) -> Self {
        Self::new(prime, 0, vec![])
    }

    pub fn free(prime: u64, rank: usize) -> Self {
        Self::new(prime, rank, vec![])
    }

    pub fn cyclic(prime: u64, exponent: u32) -> Self {
        Self::new(prime, 0, vec![exponent])
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    /// Torsion exponents, largest first.
    pub fn torsion_exponents(&self) -> &[u32] {
        &self.torsion
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_torsion(&self) -> bool {
        self.free_rank == 0
    }

    /// Number of cyclic summands (torsion first, then free).
    pub fn num_generators(&self) -> usize {
        self.torsion.len() + self.free_rank
    }

    pub fn torsion_part(&self) -> FgModule {
        Self::new(self.prime, 0, self.torsion.clone())
    }

    /// log_p of the torsion subgroup's order.
    pub fn torsion_log_order(&self) -> u32 {
        self.torsion.iter().sum()
    }

    /// Largest order of a torsion element, as a p-exponent.
    pub fn exponent(&self) -> u32 {
        self.torsion.first().copied().unwrap_or(0)
    }

    /// Largest element order overall.
    pub fn max_order(&self) -> Order {
        if self.free_rank > 0 {
            Order::Infinite
        } else {
            Order::Finite(self.exponent())
        }
    }

    pub fn direct_sum(&self, other: &FgModule) -> FgModule {
        assert_eq!(self.prime, other.prime, "direct sum across primes");
        let mut t = self.torsion.clone();
        t.extend_from_slice(&other.torsion);
        Self::new(self.prime, self.free_rank + other.free_rank, t)
    }

    /// Whether this module contains a submodule isomorphic to `sub`.
    pub fn contains_copy_of(&self, sub: &FgModule) -> bool {
        if sub.free_rank > self.free_rank || sub.torsion.len() > self.torsion.len() {
            return false;
        }
        sub.torsion.iter().zip(&self.torsion).all(|(s, m)| s <= m)
    }

    /// Canonical text, e.g. `Z/128+Z(2)` or `Z/8+Z/2+Z(3)^2`, `0` for the zero module.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts: Vec<String> = self
            .torsion
            .iter()
            .map(|&e| format!("Z/{}", pow_p(self.prime, e)))
            .collect();
        match self.free_rank {
            0 => {}
            1 => parts.push(format!("Z({})", self.prime)),
            r => parts.push(format!("Z({})^{}", self.prime, r)),
        }
        parts.join("+")
    }

    /// Parse the text form. Accepts `Z/8`, `Z/2^3`, `(Z/2)^3`, `Z(2)`, `Z(2)^2`, `Z`, `0`,
    /// summed with `+` or `⊕`. Cyclic orders that are not powers of `prime` are rejected.
    pub fn parse(text: &str, prime: u64) -> Result<FgModule, AlgebraError> {
        let normalized = text
            .replace('⊕', "+")
            .replace('ℤ', "Z")
            .replace('₍', "(")
            .replace('₎', ")")
            .replace(char::is_whitespace, "");
        let mut free = 0usize;
        let mut torsion = Vec::new();
        for raw in normalized.split('+') {
            if raw.is_empty() {
                return Err(AlgebraError::Parse(text.to_string()));
            }
            let (body, mult) = split_multiplicity(raw).ok_or_else(|| AlgebraError::Parse(text.to_string()))?;
            if body == "0" {
                continue;
            }
            if body == "Z" {
                free += mult;
                continue;
            }
            if let Some(inner) = body.strip_prefix("Z(").and_then(|b| b.strip_suffix(')')) {
                let q: u64 = inner.parse().map_err(|_| AlgebraError::Parse(text.to_string()))?;
                if q != prime {
                    return Err(AlgebraError::PrimeMismatch { expected: prime, found: q });
                }
                free += mult;
                continue;
            }
            if let Some(order) = body.strip_prefix("Z/") {
                let e = parse_p_power(order, prime).ok_or_else(|| AlgebraError::NotPrimePower {
                    value: order.to_string(),
                    prime,
                })?;
                for _ in 0..mult {
                    torsion.push(e);
                }
                continue;
            }
            return Err(AlgebraError::Parse(text.to_string()));
        }
        Ok(FgModule::new(prime, free, torsion))
    }
}

impl fmt::Display for FgModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// `(X)^m` or `Z(2)^m` → (X, m). A bare `Z/2^3` is an order, not a multiplicity.
fn split_multiplicity(term: &str) -> Option<(String, usize)> {
    if let Some(rest) = term.strip_prefix('(') {
        let close = rest.rfind(')')?;
        let inner = &rest[..close];
        let tail = &rest[close + 1..];
        let mult = match tail.strip_prefix('^') {
            Some(m) => m.parse().ok()?,
            None if tail.is_empty() => 1,
            None => return None,
        };
        return Some((inner.to_string(), mult));
    }
    if term.starts_with("Z(") || term == "Z" || term.starts_with("Z^") {
        if let Some((base, m)) = term.rsplit_once(")^") {
            return Some((format!("{base})"), m.parse().ok()?));
        }
        if let Some(m) = term.strip_prefix("Z^") {
            return Some(("Z".to_string(), m.parse().ok()?));
        }
    }
    Some((term.to_string(), 1))
}

/// `8` or `2^3` as a p-exponent.
fn parse_p_power(s: &str, p: u64) -> Option<u32> {
    let n: BigInt = match s.split_once('^') {
        Some((b, e)) => {
            let b: BigInt = b.parse().ok()?;
            let e: u32 = e.parse().ok()?;
            b.pow(e)
        }
        None => s.parse().ok()?,
    };
    if n <= BigInt::zero() {
        return None;
    }
    if n.is_one() {
        return Some(0);
    }
    let v = int_valuation(&n, p);
    if pow_p(p, v) == n {
        Some(v)
    } else {
        None
    }
}

/// A finitely generated abelian group given by free rank and integer torsion orders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroup {
    pub free_rank: usize,
    pub torsion_orders: Vec<u64>,
}

/// Isolate the p-power part of each cyclic factor.
pub fn p_component(g: &AbelianGroup, p: u64) -> FgModule {
    let torsion = g
        .torsion_orders
        .iter()
        .filter(|&&n| n > 1)
        .map(|&n| int_valuation(&BigInt::from(n), p))
        .collect();
    FgModule::new(p, g.free_rank, torsion)
}

/// A cell of the main table: the 2- and 3-components side by side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableCell {
    pub two: FgModule,
    pub three: FgModule,
}

impl TableCell {
    pub fn new(two: FgModule, three: FgModule) -> Self {
        assert_eq!(two.prime(), 2);
        assert_eq!(three.prime(), 3);
        assert_eq!(two.free_rank(), three.free_rank(), "free rank must agree across primes");
        TableCell { two, three }
    }

    /// Parse the table notation: `n` for Z/n, `n^m` for (Z/n)^m, `∞` for Z, joined by `+`.
    pub fn parse(text: &str) -> Result<TableCell, AlgebraError> {
        let mut free = 0usize;
        let mut orders = Vec::new();
        for raw in text.replace(char::is_whitespace, "").split('+') {
            if raw.is_empty() {
                return Err(AlgebraError::Parse(text.to_string()));
            }
            if raw == "∞" || raw == "inf" || raw == "Z" {
                free += 1;
                continue;
            }
            let (base, mult) = match raw.split_once('^') {
                Some((b, m)) => (b, m.parse::<usize>().map_err(|_| AlgebraError::Parse(text.to_string()))?),
                None => (raw, 1),
            };
            let n: u64 = base.parse().map_err(|_| AlgebraError::Parse(text.to_string()))?;
            if n == 0 {
                if mult != 1 {
                    return Err(AlgebraError::Parse(text.to_string()));
                }
                continue;
            }
            let mut rest = n;
            while rest.is_multiple_of(2) {
                rest /= 2;
            }
            while rest.is_multiple_of(3) {
                rest /= 3;
            }
            if rest != 1 {
                return Err(AlgebraError::NotPrimePower { value: n.to_string(), prime: 6 });
            }
            orders.extend(std::iter::repeat_n(n, mult));
        }
        let g = AbelianGroup { free_rank: free, torsion_orders: orders };
        Ok(TableCell { two: p_component(&g, 2), three: p_component(&g, 3) })
    }

    /// Render as 2-torsion descending, then one `∞` per free summand, then 3-torsion.
    pub fn render(&self) -> String {
        let mut parts = grouped(&self.two);
        parts.extend(std::iter::repeat_n("∞".to_string(), self.two.free_rank()));
        parts.extend(grouped(&self.three));
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join("+")
        }
    }
}

impl fmt::Display for TableCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn grouped(m: &FgModule) -> Vec<String> {
    let mut out = Vec::new();
    let t = m.torsion_exponents();
    let mut i = 0;
    while i < t.len() {
        let mut j = i;
        while j < t.len() && t[j] == t[i] {
            j += 1;
        }
        let n = pow_p(m.prime(), t[i]);
        if j - i == 1 {
            out.push(n.to_string());
        } else {
            out.push(format!("{}^{}", n, j - i));
        }
        i = j;
    }
    out
}

/// Greatest common divisor helper for integer orders, used by group bookkeeping.
pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_round_trip() {
        for s in ["0", "Z/128+Z(2)", "Z/8+Z/4+Z/2", "Z(3)^2", "Z/27+Z/3+Z(3)"] {
            let p = if s.contains('3') { 3 } else { 2 };
            let m = FgModule::parse(s, p).unwrap();
            assert_eq!(m.render(), s);
        }
    }

    #[test]
    fn parse_variants() {
        let a = FgModule::parse("(Z/2)^3 + Z/2^3 ⊕ Z", 2).unwrap();
        assert_eq!(a, FgModule::new(2, 1, vec![1, 1, 1, 3]));
        assert!(FgModule::parse("Z/6", 2).is_err());
        assert!(FgModule::parse("Z(3)", 2).is_err());
    }

    #[test]
    fn p_component_of_twelve() {
        let g = AbelianGroup { free_rank: 0, torsion_orders: vec![12] };
        assert_eq!(p_component(&g, 2), FgModule::cyclic(2, 2));
        assert_eq!(p_component(&g, 3), FgModule::cyclic(3, 1));
        let z = AbelianGroup { free_rank: 1, torsion_orders: vec![] };
        assert_eq!(p_component(&z, 5), FgModule::free(5, 1));
    }

    #[test]
    fn table_cells() {
        let c = TableCell::parse("8+4+∞+9").unwrap();
        assert_eq!(c.two, FgModule::new(2, 1, vec![3, 2]));
        assert_eq!(c.three, FgModule::new(3, 1, vec![2]));
        assert_eq!(c.render(), "8+4+∞+9");
        assert_eq!(TableCell::parse("8+4+2+3^2").unwrap().render(), "8+4+2+3^2");
        assert_eq!(TableCell::parse("4+3").unwrap().two, FgModule::cyclic(2, 2));
        assert_eq!(TableCell::parse("0").unwrap().render(), "0");
    }

    #[test]
    fn containment() {
        let big = FgModule::new(2, 1, vec![3, 2]);
        assert!(big.contains_copy_of(&FgModule::new(2, 0, vec![3])));
        assert!(!big.contains_copy_of(&FgModule::new(2, 0, vec![3, 2, 1])));
        assert!(big.contains_copy_of(&FgModule::new(2, 1, vec![2, 1])));
        assert!(!big.contains_copy_of(&FgModule::new(2, 0, vec![4, 4])));
        assert!(!big.contains_copy_of(&FgModule::new(2, 2, vec![])));
    }
}
