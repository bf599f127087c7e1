//! Extensions 0 → A → B → C → 0 of p-local modules: Ext groups, the full list of
//! middle terms, and pruning by element-order and divisibility constraints.

mod constraint;

pub use constraint::Constraint;

use num_rational::BigRational;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

use crate::local_algebra::{
    pow_p, zero_vector, AlgebraError, FgModule, Presentation, QuotientModule, Vector,
};

/// Realizations beyond this count are refused rather than enumerated.
pub const REALIZATION_LIMIT: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtensionError {
    #[error("right-hand module {0} has a free part")]
    FreeQuotient(String),
    #[error("modules localized at different primes ({0} and {1})")]
    PrimeMismatch(u64, u64),
    #[error("enumeration needs {needed} realizations, limit is {limit}")]
    TooLarge { needed: usize, limit: usize },
    #[error("no extension of {right} by {left} satisfies the constraints")]
    Inconsistent { left: String, right: String },
    #[error("constraint refers to {found} coordinates, expected {expected}")]
    ConstraintShape { expected: usize, found: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Ext¹(C, A) for torsion C, factor by factor.
pub fn ext_group(c: &FgModule, a: &FgModule) -> Result<FgModule, ExtensionError> {
    if c.prime() != a.prime() {
        return Err(ExtensionError::PrimeMismatch(c.prime(), a.prime()));
    }
    if !c.is_torsion() {
        return Err(ExtensionError::FreeQuotient(c.render()));
    }
    let mut exps = Vec::new();
    for &n in c.torsion_exponents() {
        for &m in a.torsion_exponents() {
            exps.push(n.min(m));
        }
        for _ in 0..a.free_rank() {
            exps.push(n);
        }
    }
    Ok(FgModule::new(a.prime(), 0, exps))
}

/// Middle-term problem for 0 → left → B → right → 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionProblem {
    pub left: FgModule,
    pub right: FgModule,
}

impl ExtensionProblem {
    pub fn new(left: FgModule, right: FgModule) -> Result<Self, ExtensionError> {
        if left.prime() != right.prime() {
            return Err(ExtensionError::PrimeMismatch(left.prime(), right.prime()));
        }
        if !right.is_torsion() {
            return Err(ExtensionError::FreeQuotient(right.render()));
        }
        Ok(ExtensionProblem { left, right })
    }

    pub fn prime(&self) -> u64 {
        self.left.prime()
    }

    /// Build B for the given extension data: one vector ζ_l in A (canonical coordinates)
    /// per cyclic factor of C. B is generated by A's generators and c_l with p^{n_l}·c_l = ζ_l.
    pub fn realize(&self, zetas: &[Vector]) -> Result<Realization, ExtensionError> {
        let p = self.prime();
        let a = Presentation::of_module(&self.left);
        let na = a.rank();
        let ns = self.right.torsion_exponents();
        if zetas.len() != ns.len() {
            return Err(ExtensionError::ConstraintShape { expected: ns.len(), found: zetas.len() });
        }
        let total = na + ns.len();
        let mut gens: Vec<String> = a.generators().to_vec();
        gens.extend((0..ns.len()).map(|l| format!("c{l}")));
        let mut rels = Vec::new();
        for r in a.relations() {
            let mut row = r.clone();
            row.resize(total, BigRational::from_integer(0.into()));
            rels.push(row);
        }
        for (l, (&n, zeta)) in ns.iter().zip(zetas).enumerate() {
            if zeta.len() != na {
                return Err(ExtensionError::ConstraintShape { expected: na, found: zeta.len() });
            }
            let mut row = zero_vector(total);
            for (i, z) in zeta.iter().enumerate() {
                row[i] = -z.clone();
            }
            row[na + l] = BigRational::from_integer(pow_p(p, n));
            rels.push(row);
        }
        let presentation = Presentation::new(p, gens, rels)?;
        let quotient = presentation.quotient();
        Ok(Realization {
            zetas: zetas.to_vec(),
            left_rank: na,
            right_exponents: ns.to_vec(),
            module: quotient.module().clone(),
            quotient,
            presentation,
        })
    }

    /// Reduced list of ζ representatives for a cyclic C: each coordinate is p^s times a
    /// basis vector (or zero). Unit rescaling of single coordinates and of C reaches every
    /// class from one of these.
    fn reduced_zetas(&self) -> Vec<Vec<Vector>> {
        let n = self.right.torsion_exponents()[0];
        let na = self.left.num_generators();
        let ranges: Vec<u32> = self
            .left
            .torsion_exponents()
            .iter()
            .map(|&a| a.min(n))
            .chain(std::iter::repeat_n(n, self.left.free_rank()))
            .collect();
        let mut out = Vec::new();
        let mut s = vec![0u32; na];
        loop {
            let zeta: Vector = s
                .iter()
                .zip(&ranges)
                .map(|(&si, &top)| {
                    if si >= top {
                        BigRational::from_integer(0.into())
                    } else {
                        BigRational::from_integer(pow_p(self.prime(), si))
                    }
                })
                .collect();
            out.push(vec![zeta]);
            let mut i = 0;
            loop {
                if i == na {
                    return out;
                }
                s[i] += 1;
                if s[i] <= ranges[i] {
                    break;
                }
                s[i] = 0;
                i += 1;
            }
        }
    }

    /// Every ζ_l in A/p^{n_l}A for every factor l.
    fn all_zetas(&self) -> Result<Vec<Vec<Vector>>, ExtensionError> {
        let p = self.prime();
        let na = self.left.num_generators();
        let mut per_factor: Vec<Vec<Vector>> = Vec::new();
        let mut total: usize = 1;
        for &n in self.right.torsion_exponents() {
            let ranges: Vec<u64> = self
                .left
                .torsion_exponents()
                .iter()
                .map(|&a| a.min(n))
                .chain(std::iter::repeat_n(n, self.left.free_rank()))
                .map(|e| u64::try_from(pow_p(p, e)).unwrap_or(u64::MAX))
                .collect();
            let count = ranges.iter().fold(1usize, |acc, &r| acc.saturating_mul(r as usize));
            total = total.saturating_mul(count);
            if total > REALIZATION_LIMIT {
                return Err(ExtensionError::TooLarge { needed: total, limit: REALIZATION_LIMIT });
            }
            let mut vs = Vec::with_capacity(count);
            let mut digits = vec![0u64; na];
            loop {
                vs.push(digits.iter().map(|&d| BigRational::from_integer(d.into())).collect());
                let mut i = 0;
                loop {
                    if i == na {
                        break;
                    }
                    digits[i] += 1;
                    if digits[i] < ranges[i] {
                        break;
                    }
                    digits[i] = 0;
                    i += 1;
                }
                if i == na {
                    break;
                }
            }
            per_factor.push(vs);
        }
        let mut combos: Vec<Vec<Vector>> = vec![vec![]];
        for vs in per_factor {
            let mut next = Vec::with_capacity(combos.len() * vs.len());
            for c in &combos {
                for v in &vs {
                    let mut c2 = c.clone();
                    c2.push(v.clone());
                    next.push(c2);
                }
            }
            combos = next;
        }
        Ok(combos)
    }

    /// Candidate data for ζ used by classification: reduced for cyclic C, exhaustive otherwise.
    pub fn representative_zetas(&self) -> Result<Vec<Vec<Vector>>, ExtensionError> {
        match self.right.torsion_exponents().len() {
            0 => Ok(vec![vec![]]),
            1 => Ok(self.reduced_zetas()),
            _ => self.all_zetas(),
        }
    }

    pub fn realizations(&self) -> Result<Vec<Realization>, ExtensionError> {
        self.representative_zetas()?.iter().map(|z| self.realize(z)).collect()
    }
}

/// One explicit middle term with its defining extension data.
#[derive(Clone, Debug)]
pub struct Realization {
    pub zetas: Vec<Vector>,
    pub left_rank: usize,
    pub right_exponents: Vec<u32>,
    pub module: FgModule,
    pub presentation: Presentation,
    pub quotient: QuotientModule,
}

impl Realization {
    /// Image of an element of A (canonical coordinates) in B.
    pub fn include(&self, a: &[BigRational]) -> Vector {
        let mut v = a.to_vec();
        v.resize(self.presentation.rank(), BigRational::from_integer(0.into()));
        v
    }

    /// The standard lift of an element of C (coordinates per cyclic factor).
    pub fn lift(&self, c: &[BigRational]) -> Vector {
        let mut v = zero_vector(self.left_rank);
        v.extend(c.iter().cloned());
        v
    }

    pub fn describe(&self) -> String {
        let parts: Vec<String> = self
            .zetas
            .iter()
            .map(|z| {
                let cs: Vec<String> = z.iter().map(|x| x.to_string()).collect();
                format!("({})", cs.join(","))
            })
            .collect();
        format!("zeta={}", parts.join(";"))
    }
}

/// All middle terms, each with the extension data that realizes it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolutionSet {
    pub candidates: BTreeMap<FgModule, Vec<String>>,
}

impl SolutionSet {
    pub fn modules(&self) -> Vec<FgModule> {
        self.candidates.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn unique(&self) -> Option<&FgModule> {
        if self.candidates.len() == 1 {
            self.candidates.keys().next()
        } else {
            None
        }
    }

    fn insert(&mut self, m: FgModule, note: String) {
        self.candidates.entry(m).or_default().push(note);
    }
}

impl fmt::Display for SolutionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.candidates.keys().map(|m| m.render()).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

/// Every isomorphism class of B fitting 0 → A → B → C → 0.
pub fn classify_extensions(p: &ExtensionProblem) -> Result<SolutionSet, ExtensionError> {
    let mut out = SolutionSet::default();
    let beyond = p.right.torsion_exponents().len() > 1;
    for r in p.realizations()? {
        let mut note = r.describe();
        if beyond {
            note.push_str(" [exhaustive: several cyclic factors]");
        }
        out.insert(r.module.clone(), note);
    }
    Ok(out)
}

/// Classes surviving the constraints: a candidate is kept when at least one of its
/// realizations satisfies every constraint.
///
/// Constraints naming particular elements are not invariant under the automorphisms
/// used to reduce the ζ list, so with any of those present every ζ is tried.
pub fn solve_with_constraints(p: &ExtensionProblem, constraints: &[Constraint]) -> Result<SolutionSet, ExtensionError> {
    let mut out = SolutionSet::default();
    for r in satisfying_realizations(p, constraints)? {
        out.insert(r.module.clone(), r.describe());
    }
    if out.is_empty() {
        return Err(ExtensionError::Inconsistent { left: p.left.render(), right: p.right.render() });
    }
    Ok(out)
}

/// Every realization meeting all constraints, possibly several per isomorphism class.
pub fn satisfying_realizations(p: &ExtensionProblem, constraints: &[Constraint]) -> Result<Vec<Realization>, ExtensionError> {
    let realizations = if constraints.iter().all(Constraint::is_structural) {
        p.realizations()?
    } else {
        p.all_zetas()?.iter().map(|z| p.realize(z)).collect::<Result<Vec<_>, _>>()?
    };
    let mut out = Vec::new();
    for r in realizations {
        let mut ok = true;
        for c in constraints {
            if !c.holds(&r)? {
                ok = false;
                break;
            }
        }
        if ok {
            out.push(r);
        }
    }
    Ok(out)
}

/// Independent check: enumerate every ζ in A/p^nA without any reduction.
pub fn brute_force_oracle(p: &ExtensionProblem) -> Result<SolutionSet, ExtensionError> {
    let mut out = SolutionSet::default();
    for z in p.all_zetas()? {
        let r = p.realize(&z)?;
        out.insert(r.module.clone(), r.describe());
    }
    Ok(out)
}

/// The case split for A = Z/p^m ⊕ Z(p), C = Z/p^n, written out directly.
pub fn closed_form_free_plus_cyclic(prime: u64, m: u32, n: u32) -> Vec<FgModule> {
    let t = m.min(n);
    let mut out = Vec::new();
    for i in 0..t {
        out.push(FgModule::new(prime, 1, vec![m, i]));
    }
    for i in 0..=n {
        for j in 0..=i.min(t) {
            out.push(FgModule::new(prime, 1, vec![m + i - j, j]));
        }
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str, p: u64) -> FgModule {
        FgModule::parse(s, p).unwrap()
    }

    #[test]
    fn ext_examples() {
        assert_eq!(ext_group(&m("Z/4", 2), &m("Z/2", 2)).unwrap(), m("Z/2", 2));
        assert_eq!(ext_group(&m("Z/3", 3), &m("0", 3)).unwrap(), m("0", 3));
        assert_eq!(ext_group(&m("Z/8", 2), &m("Z(2)+Z/4", 2)).unwrap(), m("Z/8+Z/4", 2));
        assert!(ext_group(&m("Z", 2), &m("Z/2", 2)).is_err());
    }

    #[test]
    fn z2_by_z2() {
        let p = ExtensionProblem::new(m("Z/2", 2), m("Z/2", 2)).unwrap();
        let s = classify_extensions(&p).unwrap();
        assert_eq!(s.modules(), vec![m("Z/2+Z/2", 2), m("Z/4", 2)]);
    }

    #[test]
    fn free_by_z3_includes_free() {
        let p = ExtensionProblem::new(m("Z(3)", 3), m("Z/3", 3)).unwrap();
        let s = brute_force_oracle(&p).unwrap();
        assert!(s.candidates.contains_key(&m("Z(3)", 3)));
        assert!(s.candidates.contains_key(&m("Z(3)+Z/3", 3)));
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn order_constraint_selects_z128() {
        let p = ExtensionProblem::new(m("Z/8+Z(2)", 2), m("Z/16", 2)).unwrap();
        let s = solve_with_constraints(&p, &[Constraint::OrderAtLeast(7)]).unwrap();
        assert_eq!(s.unique(), Some(&m("Z/128+Z(2)", 2)));
    }

    #[test]
    fn empty_result_is_error() {
        let p = ExtensionProblem::new(m("Z/2", 2), m("Z/2", 2)).unwrap();
        assert!(solve_with_constraints(&p, &[Constraint::OrderAtLeast(3)]).is_err());
    }

    #[test]
    fn two_factor_quotient() {
        let p = ExtensionProblem::new(m("Z/2", 2), m("Z/2+Z/2", 2)).unwrap();
        let s = classify_extensions(&p).unwrap();
        assert_eq!(s.modules(), brute_force_oracle(&p).unwrap().modules());
        assert_eq!(s.modules(), vec![m("(Z/2)^3", 2), m("Z/4+Z/2", 2)]);
    }
}
