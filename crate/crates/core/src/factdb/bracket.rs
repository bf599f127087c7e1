//! Indeterminacy of a Toda bracket ⟨α, β, γ⟩ for maps between spheres.
//!
//! With γ: S^c' → S^c, β: S^c → S^b and α: S^b → S^a, the n-th suspension bracket lives in
//! π_{c'+n+1}(S^a) and is a coset of
//!   π_{c+n+1}(S^a)∘E^{n+1}γ  +  α∘E^n π_{c'+1}(S^{b-n}).
//! Both pieces are computed generator by generator through the resolver.

use num_bigint::BigInt;

use super::resolve::{Resolution, Resolver};
use super::word::{Expr, Word};
use super::{FactError, GroupEntry};
use crate::local_algebra::{FgModule, Presentation, Vector};

#[derive(Clone, Debug)]
pub struct BracketIndeterminacy {
    pub target: GroupEntry,
    /// Generators of the indeterminacy in target coordinates.
    pub generators: Vec<Vector>,
    pub subgroup: FgModule,
    /// Set when some product could not be resolved or a group is missing; the
    /// subgroup is then only a lower bound.
    pub partial: bool,
    pub notes: Vec<String>,
}

impl BracketIndeterminacy {
    pub fn render(&self, resolver: &Resolver) -> String {
        let gens: Vec<String> = self
            .generators
            .iter()
            .map(|v| resolver.to_expr(&self.target, v).render())
            .filter(|s| s != "0")
            .collect();
        let mut s = self.subgroup.render();
        if !gens.is_empty() {
            s.push_str(&format!("<{}>", gens.join(", ")));
        }
        if self.partial {
            s.push_str(" (partial)");
        }
        s
    }
}

/// If `e` is k·ι, the integer k.
fn identity_multiple(e: &Expr) -> Option<BigInt> {
    match e.0.as_slice() {
        [(k, w)] if w.len() == 1 && w.0[0].is_identity() => Some(k.clone()),
        [] => Some(BigInt::from(0)),
        _ => None,
    }
}

fn typed(e: &Expr) -> Result<(i64, i64), FactError> {
    let (_, w) = e.0.first().ok_or_else(|| FactError::Syntax("zero map has no type; give k iota_n".into()))?;
    Resolver::word_target(&w.normalized()).or_else(|_| Resolver::word_target(w))
}

pub fn bracket_indeterminacy(
    resolver: &Resolver,
    alpha: &str,
    beta: &str,
    gamma: &str,
    n: u32,
) -> Result<BracketIndeterminacy, FactError> {
    let (alpha, beta, gamma) = (Expr::parse(alpha)?, Expr::parse(beta)?, Expr::parse(gamma)?);
    let (a, b) = typed(&alpha)?;
    let (b2, c) = typed(&beta)?;
    let (c2, c_src) = typed(&gamma)?;
    if b != b2 + n as i64 || c != c2 {
        return Err(FactError::Syntax(format!(
            "bracket factors do not compose: {} / {} / {}",
            alpha.render(),
            beta.render(),
            gamma.render()
        )));
    }
    let n = n as i64;
    let (b, c) = (b2, c);
    let target_deg = c_src + n + 1;
    let target = resolver.lookup(a, target_deg)?;
    let mut generators = Vec::new();
    let mut notes = Vec::new();
    let mut partial = false;

    // π_{c+n+1}(S^a) ∘ E^{n+1} γ
    match resolver.lookup(a, c + n + 1) {
        Ok(left) => {
            let k = identity_multiple(&gamma);
            let suspended_gamma = gamma.shifted(n + 1);
            for (name, _) in &left.generators {
                let x = Word::parse(name)?;
                match &k {
                    Some(k) => {
                        // Right composition with k·ι on a suspension is multiplication by k.
                        let product = Expr::word(x).scaled(k);
                        push_value(resolver, &product, a, target_deg, &mut generators, &mut partial, &mut notes)?;
                    }
                    None => {
                        let product = Expr::word(x).then_expr(&suspended_gamma);
                        push_value(resolver, &product, a, target_deg, &mut generators, &mut partial, &mut notes)?;
                    }
                }
            }
        }
        Err(FactError::Missing { .. }) => {
            partial = true;
            notes.push(format!("π_{}(S^{}) not in the database", c + n + 1, a));
        }
        Err(e) => return Err(e),
    }

    // α ∘ E^n π_{c'+1}(S^{b-n})
    match resolver.lookup(b, c_src + 1) {
        Ok(right) => {
            for (name, _) in &right.generators {
                let y = Word::parse(name)?.shifted(n);
                let product = alpha.then(&y);
                push_value(resolver, &product, a, target_deg, &mut generators, &mut partial, &mut notes)?;
            }
        }
        Err(FactError::Missing { .. }) => {
            partial = true;
            notes.push(format!("π_{}(S^{}) not in the database", c_src + 1, b));
        }
        Err(e) => return Err(e),
    }

    let subgroup = subgroup_generated(&target, &generators);
    Ok(BracketIndeterminacy { target, generators, subgroup, partial, notes })
}

fn push_value(
    resolver: &Resolver,
    product: &Expr,
    n: i64,
    m: i64,
    out: &mut Vec<Vector>,
    partial: &mut bool,
    notes: &mut Vec<String>,
) -> Result<(), FactError> {
    match resolver.resolve(product, n, m)? {
        Resolution::Value(v) => out.push(v),
        Resolution::Zero => {}
        Resolution::Symbolic(s) => {
            *partial = true;
            notes.push(format!("unresolved product {s}"));
        }
    }
    Ok(())
}

/// The subgroup of an entry generated by some elements, as an abstract module.
pub fn subgroup_generated(entry: &GroupEntry, gens: &[Vector]) -> FgModule {
    let target = entry.presentation();
    let names: Vec<String> = (0..gens.len()).map(|i| format!("g{i}")).collect();
    let free = Presentation::new(entry.prime, names.clone(), vec![]).expect("free presentation");
    let (_, embedding) = free.kernel(gens, &target).expect("map between presentations");
    Presentation::new(entry.prime, names, embedding).expect("integral kernel").module()
}

impl Expr {
    /// Right composition with a combination, expanded term by term.
    pub fn then_expr(&self, other: &Expr) -> Expr {
        let mut out = Vec::new();
        for (c, w) in &self.0 {
            for (d, x) in &other.0 {
                out.push((c * d, w.concat(x)));
            }
        }
        Expr(out)
    }
}
