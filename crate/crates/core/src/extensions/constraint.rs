use num_rational::BigRational;
use std::fmt;

use super::{ExtensionError, Realization, REALIZATION_LIMIT};
use crate::local_algebra::{residue, FgModule, Order, Vector};

/// A condition on a realized extension. Orders are stored as p-exponents.
///
/// Elements of A are given in the canonical coordinates of the left module,
/// elements of C as one coordinate per cyclic factor of the right module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    /// B has a torsion element of order at least p^N.
    OrderAtLeast(u32),
    /// B has an element of order exactly p^N.
    OrderExactly(u32),
    /// B has no element of order p^N (so every torsion order is below p^N).
    NoElementOfOrder(u32),
    /// The standard lift of this element of C is not divisible by p in B.
    NotDivisibleByP(Vector),
    /// Some lift of this element of C has order exactly p^N.
    LiftWithOrder { element: Vector, order: u32 },
    /// This element of A becomes divisible by p in B.
    AElementDivisibleByP(Vector),
    /// This element of A stays indivisible by p in B.
    AElementNotDivisibleByP(Vector),
    /// B contains a copy of the given module.
    ContainsSubgroup(FgModule),
}

impl Constraint {
    pub fn holds(&self, r: &Realization) -> Result<bool, ExtensionError> {
        let b = &r.module;
        Ok(match self {
            Constraint::OrderAtLeast(n) => b.exponent() >= *n,
            Constraint::OrderExactly(n) => *n == 0 || b.exponent() >= *n,
            Constraint::NoElementOfOrder(n) => b.exponent() < *n,
            Constraint::NotDivisibleByP(x) => {
                check_len(x, r.right_exponents.len())?;
                !r.quotient.is_divisible_by_p(&r.lift(x))
            }
            Constraint::AElementDivisibleByP(a) => {
                check_len(a, r.left_rank)?;
                r.quotient.is_divisible_by_p(&r.include(a))
            }
            Constraint::AElementNotDivisibleByP(a) => {
                check_len(a, r.left_rank)?;
                !r.quotient.is_divisible_by_p(&r.include(a))
            }
            Constraint::LiftWithOrder { element, order } => {
                check_len(element, r.right_exponents.len())?;
                lift_with_order(r, element, *order)?
            }
            Constraint::ContainsSubgroup(m) => b.contains_copy_of(m),
        })
    }

    /// Constraints that look only at the isomorphism class of B.
    pub fn is_structural(&self) -> bool {
        matches!(
            self,
            Constraint::OrderAtLeast(_)
                | Constraint::OrderExactly(_)
                | Constraint::NoElementOfOrder(_)
                | Constraint::ContainsSubgroup(_)
        )
    }
}

fn check_len(v: &[BigRational], expected: usize) -> Result<(), ExtensionError> {
    if v.len() != expected {
        return Err(ExtensionError::ConstraintShape { expected, found: v.len() });
    }
    Ok(())
}

fn lift_with_order(r: &Realization, x: &[BigRational], order: u32) -> Result<bool, ExtensionError> {
    let p = r.quotient.prime();
    let targets: Vec<_> = x
        .iter()
        .zip(&r.right_exponents)
        .map(|(xi, &n)| residue(xi, p, n))
        .collect();
    for t in r.quotient.torsion_elements(REALIZATION_LIMIT)? {
        let matches = t[r.left_rank..]
            .iter()
            .zip(&r.right_exponents)
            .zip(&targets)
            .all(|((ti, &n), target)| residue(ti, p, n) == *target);
        if matches && r.quotient.element_order(&t) == Order::Finite(order) {
            return Ok(true);
        }
    }
    Ok(false)
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vec = |v: &Vector| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self {
            Constraint::OrderAtLeast(n) => write!(f, "order>=p^{n}"),
            Constraint::OrderExactly(n) => write!(f, "order=p^{n}"),
            Constraint::NoElementOfOrder(n) => write!(f, "no-order p^{n}"),
            Constraint::NotDivisibleByP(x) => write!(f, "lift({}) not divisible", vec(x)),
            Constraint::LiftWithOrder { element, order } => write!(f, "lift({}) of order p^{order}", vec(element)),
            Constraint::AElementDivisibleByP(a) => write!(f, "a({}) divisible", vec(a)),
            Constraint::AElementNotDivisibleByP(a) => write!(f, "a({}) not divisible", vec(a)),
            Constraint::ContainsSubgroup(m) => write!(f, "contains {m}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extensions::{solve_with_constraints, ExtensionProblem};
    use crate::local_algebra::int_vector;

    fn m(s: &str, p: u64) -> FgModule {
        FgModule::parse(s, p).unwrap()
    }

    #[test]
    fn lift_of_order_nine() {
        let p = ExtensionProblem::new(m("Z/3", 3), m("Z/3", 3)).unwrap();
        let c = Constraint::LiftWithOrder { element: int_vector(&[1]), order: 2 };
        let s = solve_with_constraints(&p, &[c]).unwrap();
        assert_eq!(s.unique(), Some(&m("Z/9", 3)));
    }

    #[test]
    fn a_generator_divisible() {
        let p = ExtensionProblem::new(m("Z/3", 3), m("Z/3", 3)).unwrap();
        let s = solve_with_constraints(&p, &[Constraint::AElementDivisibleByP(int_vector(&[1]))]).unwrap();
        assert_eq!(s.unique(), Some(&m("Z/9", 3)));
    }

    #[test]
    fn lift_with_small_order_forces_split() {
        let p = ExtensionProblem::new(m("Z/8", 2), m("Z/4", 2)).unwrap();
        let c = Constraint::LiftWithOrder { element: int_vector(&[1]), order: 2 };
        let s = solve_with_constraints(&p, &[c]).unwrap();
        assert_eq!(s.unique(), Some(&m("Z/8+Z/4", 2)));
    }

    #[test]
    fn upper_bound_on_orders() {
        let p = ExtensionProblem::new(m("Z(2)+Z/8+Z/2", 2), m("Z/4", 2)).unwrap();
        let cs = [Constraint::OrderAtLeast(4), Constraint::NoElementOfOrder(5)];
        let s = solve_with_constraints(&p, &cs).unwrap();
        assert!(s.candidates.contains_key(&m("Z(2)+Z/16+Z/2", 2)));
        assert!(s.modules().iter().all(|b| b.exponent() == 4));
    }
}
