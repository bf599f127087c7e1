//! Exact arithmetic over the p-local integers: scalars, Smith normal form,
//! canonical module forms, presented quotients and kernels.

mod matrix;
mod module;
mod presentation;
mod scalar;

pub use matrix::{int, p_power, snf, LocalMatrix, Snf};
pub use module::{gcd_u64, p_component, AbelianGroup, FgModule, Order, TableCell};
pub use presentation::{
    add_vectors, int_vector, quotient_presentation, scale_vector, solve_in_span, unit_vector, zero_vector, Presentation,
    QuotientModule, Vector,
};
pub use scalar::{int_valuation, is_p_integral, mod_inverse, pow_p, residue, valuation, LocalScalar};

use num_rational::BigRational;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("{value} is not p-local at p={prime}")]
    NotLocal { value: String, prime: u64 },
    #[error("row has {found} entries, expected {expected}")]
    Shape { expected: usize, found: usize },
    #[error("cannot parse module expression `{0}`")]
    Parse(String),
    #[error("{value} is not a power of {prime}")]
    NotPrimePower { value: String, prime: u64 },
    #[error("module localized at {found}, expected {expected}")]
    PrimeMismatch { expected: u64, found: u64 },
    #[error("map does not respect the source relations")]
    NotWellDefined,
    #[error("enumeration of {size} elements exceeds limit {limit}")]
    TooLarge { size: usize, limit: usize },
}

/// The space whose stable range is queried.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StableSpace {
    /// The n-sphere.
    Sphere(u32),
    /// A suspension of quaternionic projective m-space.
    QuaternionicProjective(u32),
}

/// Least k such that π_{d+k} of the k-fold suspension lies in the stable range.
pub fn stable_range_bound(d: u32, space: StableSpace) -> u32 {
    match space {
        StableSpace::QuaternionicProjective(_) => d.saturating_sub(6),
        StableSpace::Sphere(n) => (d + 2).saturating_sub(2 * n),
    }
}

/// An element of a canonical module, coordinates ordered as the module's summands
/// (torsion factors largest first, then free).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    ambient: FgModule,
    coords: Vec<BigRational>,
}

impl Element {
    pub fn new(ambient: FgModule, coords: Vec<BigRational>) -> Result<Self, AlgebraError> {
        let p = ambient.prime();
        if coords.len() != ambient.num_generators() {
            return Err(AlgebraError::Shape { expected: ambient.num_generators(), found: coords.len() });
        }
        let mut reduced = coords;
        for (i, &e) in ambient.torsion_exponents().iter().enumerate() {
            if !is_p_integral(&reduced[i], p) {
                return Err(AlgebraError::NotLocal { value: reduced[i].to_string(), prime: p });
            }
            reduced[i] = BigRational::from_integer(residue(&reduced[i], p, e));
        }
        Ok(Element { ambient, coords: reduced })
    }

    pub fn generator(ambient: &FgModule, i: usize) -> Self {
        Element::new(ambient.clone(), unit_vector(ambient.num_generators(), i)).expect("index in range")
    }

    pub fn ambient(&self) -> &FgModule {
        &self.ambient
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn scale(&self, s: i64) -> Self {
        let s = BigRational::from_integer(s.into());
        Element::new(self.ambient.clone(), scale_vector(&self.coords, &s)).expect("same ambient")
    }

    pub fn add(&self, other: &Element) -> Self {
        assert_eq!(self.ambient, other.ambient);
        Element::new(self.ambient.clone(), add_vectors(&self.coords, &other.coords)).expect("same ambient")
    }

    pub fn order(&self) -> Order {
        element_order(self)
    }
}

/// Least N with N·x = 0, as a p-exponent, or infinite if a free coordinate is nonzero.
pub fn element_order(x: &Element) -> Order {
    let p = x.ambient.prime();
    let t = x.ambient.torsion_exponents();
    let mut best = 0;
    for (i, c) in x.coords.iter().enumerate() {
        let Some(v) = valuation(c, p) else { continue };
        if i >= t.len() {
            return Order::Infinite;
        }
        if v < t[i] {
            best = best.max(t[i] - v);
        }
    }
    Order::Finite(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_bounds() {
        assert_eq!(stable_range_bound(15, StableSpace::QuaternionicProjective(2)), 9);
        assert_eq!(stable_range_bound(11, StableSpace::QuaternionicProjective(2)), 5);
        assert_eq!(stable_range_bound(0, StableSpace::Sphere(0)), 2);
        assert_eq!(stable_range_bound(3, StableSpace::QuaternionicProjective(2)), 0);
    }

    #[test]
    fn orders_in_z9() {
        let m = FgModule::cyclic(3, 2);
        let g = Element::generator(&m, 0);
        assert_eq!(g.scale(0).order(), Order::Finite(0));
        assert_eq!(g.order(), Order::Finite(2));
        assert_eq!(g.scale(3).order(), Order::Finite(1));
        assert_eq!(g.scale(9).order(), Order::Finite(0));
    }

    #[test]
    fn free_coordinate_has_infinite_order() {
        let m = FgModule::new(2, 1, vec![1]);
        assert_eq!(Element::generator(&m, 1).order(), Order::Infinite);
    }
}
