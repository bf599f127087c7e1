//! Cell structures: the James-type fibre of the pinch map, two-cell skeleta and their
//! attaching classes, and Whitehead-product rewriting.

use std::fmt;

use super::CwError;
use crate::factdb::{Expr, FactError, Resolution, Resolver, Word};

/// Cell dimensions n, n+m, n+2m, … of the fibre of Σ-pinch type complexes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArithmeticCells {
    pub start: u32,
    pub step: u32,
}

impl ArithmeticCells {
    /// Dimensions not exceeding `cutoff`.
    pub fn up_to(&self, cutoff: u32) -> Vec<u32> {
        (0..).map(|i| self.start + i * self.step).take_while(|&d| d <= cutoff).collect()
    }

    /// The r-skeleton is the t-th James filtration with r = m(t−1)+n; returns t for the
    /// largest such filtration inside the r-skeleton.
    pub fn filtration_for_skeleton(&self, r: u32) -> u32 {
        if r < self.start {
            0
        } else {
            (r - self.start) / self.step + 1
        }
    }
}

pub fn fibre_cell_dims(n: u32, m: u32) -> Result<ArithmeticCells, CwError> {
    if n < 2 || n > m {
        return Err(CwError::BadDimensions { n, m });
    }
    Ok(ArithmeticCells { start: n, step: m })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Attaching {
    /// The bottom cell, or a cell attached trivially (a wedge summand).
    Trivial,
    /// A resolved class, as a combination of named generators.
    Class(String),
    /// A class the database cannot place in a group; treated as possibly nonzero.
    Symbolic(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub dim: u32,
    pub attaching: Attaching,
}

/// A CW complex listed cell by cell, with an optional period for infinite complexes
/// whose cells continue in arithmetic progression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellComplex {
    pub cells: Vec<Cell>,
    pub period: Option<u32>,
}

impl CellComplex {
    pub fn sphere(n: u32) -> Self {
        CellComplex { cells: vec![Cell { dim: n, attaching: Attaching::Trivial }], period: None }
    }

    pub fn attach(mut self, dim: u32, attaching: Attaching) -> Result<Self, CwError> {
        if let Some(last) = self.cells.last() {
            if dim < last.dim {
                return Err(CwError::CellOrder { previous: last.dim, next: dim });
            }
        }
        self.cells.push(Cell { dim, attaching });
        Ok(self)
    }

    pub fn dims(&self) -> Vec<u32> {
        self.cells.iter().map(|c| c.dim).collect()
    }

    pub fn is_wedge_of_spheres(&self) -> bool {
        self.cells.iter().all(|c| c.attaching == Attaching::Trivial)
    }

    /// Parse the rendered form, e.g. `S^6 ∪_{2 nubar_6} e^15` or `S^5 ∨ S^13`.
    pub fn parse(text: &str) -> Result<Self, CwError> {
        let bad = || CwError::Parse(text.to_string());
        let mut cells = Vec::new();
        let mut rest = text.trim();
        let first = rest.strip_prefix("S^").ok_or_else(bad)?;
        let end = first.find(|c: char| !c.is_ascii_digit()).unwrap_or(first.len());
        cells.push(Cell { dim: first[..end].parse().map_err(|_| bad())?, attaching: Attaching::Trivial });
        rest = first[end..].trim_start();
        while !rest.is_empty() {
            if let Some(r) = rest.strip_prefix("∨ S^") {
                let end = r.find(|c: char| !c.is_ascii_digit()).unwrap_or(r.len());
                cells.push(Cell { dim: r[..end].parse().map_err(|_| bad())?, attaching: Attaching::Trivial });
                rest = r[end..].trim_start();
            } else if let Some(r) = rest.strip_prefix("∪_{") {
                let close = r.find("} e^").ok_or_else(bad)?;
                let class = r[..close].to_string();
                let r = &r[close + 4..];
                let end = r.find(|c: char| !c.is_ascii_digit()).unwrap_or(r.len());
                let attaching = match class.strip_prefix('?') {
                    Some(s) => Attaching::Symbolic(s.to_string()),
                    None => Attaching::Class(class),
                };
                cells.push(Cell { dim: r[..end].parse().map_err(|_| bad())?, attaching });
                rest = r[end..].trim_start();
            } else {
                return Err(bad());
            }
        }
        Ok(CellComplex { cells, period: None })
    }
}

impl fmt::Display for CellComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.cells.iter().enumerate() {
            match (&c.attaching, i) {
                (_, 0) => write!(f, "S^{}", c.dim)?,
                (Attaching::Trivial, _) => write!(f, " ∨ S^{}", c.dim)?,
                (Attaching::Class(s), _) => write!(f, " ∪_{{{s}}} e^{}", c.dim)?,
                (Attaching::Symbolic(s), _) => write!(f, " ∪_{{?{s}}} e^{}", c.dim)?,
            }
        }
        if let Some(p) = self.period {
            write!(f, " ∪ … (period {p})")?;
        }
        Ok(())
    }
}

/// Rewrite a Whitehead product [a, b] of classes on the same sphere Sⁿ.
///
/// Each factor is read as ι∘Σγ with γ the desuspension of the word; the product becomes
/// w_n∘Σ(γ∧δ). When one of γ, δ is an identity the smash is a suspension of the other,
/// which is the only case rewritten completely. The returned flag marks a symbolic result.
pub fn whitehead_reduce(a: &str, b: &str) -> Result<(Expr, bool), CwError> {
    let wa = Word::parse(a)?.normalized();
    let wb = Word::parse(b)?.normalized();
    let n = match (wa.sphere(), wb.sphere()) {
        (Some(x), Some(y)) if x == y => x,
        (None, _) | (_, None) => return Err(CwError::Untyped(format!("[{a}, {b}]"))),
        _ => return Err(CwError::NotOnSameSphere(a.to_string(), b.to_string())),
    };
    let identity = |w: &Word| w.len() == 1 && w.0[0].is_identity();
    let square = Word::parse(&format!("w_{n}"))?;
    // The smash γ∧δ, suspended once, lands on S^{2n−1}; with γ = ι_{n−1} it is Σⁿδ.
    let reduced = match (identity(&wa), identity(&wb)) {
        (true, true) => (square, false),
        (true, false) => (square.concat(&wb.shifted(n - 1)), false),
        (false, true) => (square.concat(&wa.shifted(n - 1)), false),
        (false, false) => {
            let smash = Word::parse(&format!("({}^{})_{}", wa.render().replace(' ', "."), wb.render().replace(' ', "."), 2 * n - 1))?;
            (square.concat(&smash), true)
        }
    };
    Ok((Expr::word(reduced.0), reduced.1))
}

/// Status of an attaching class after resolution against the database.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassStatus {
    Zero,
    Resolved(Expr),
    Symbolic(Expr),
}

/// The two-cell model S^{4+k} ∪ e^{11+2k} of the pinch-map fibre, valid through
/// dimension 3k+17.
#[derive(Clone, Debug)]
pub struct PinchSkeleton {
    pub k: u32,
    pub prime: u64,
    pub bottom: u32,
    pub top: u32,
    pub through_dim: u32,
    pub reduced: Expr,
    pub class: ClassStatus,
    pub complex: CellComplex,
}

impl PinchSkeleton {
    pub fn is_wedge(&self) -> bool {
        self.class == ClassStatus::Zero
    }
}

/// The attaching class of the top cell: [ι_s, 𝕪_s] with 𝕪 = ν at 2 and α₁ at 3.
pub fn skeleton_of_pinch_fibre(resolver: &Resolver, k: u32) -> Result<PinchSkeleton, CwError> {
    if k < 1 {
        return Err(CwError::BadSuspension(k));
    }
    let p = resolver.prime();
    let s = 4 + k as i64;
    let y = match p {
        2 => format!("nu_{s}"),
        3 => format!("alpha1_{s}"),
        _ => return Err(CwError::UnsupportedPrime(p)),
    };
    let (reduced, symbolic) = whitehead_reduce(&format!("iota_{s}"), &y)?;
    // w_s ∈ π_{2s−1}(S^s) composed with a 3-stem class.
    let degree = 2 * s + 2;
    let class = if symbolic {
        ClassStatus::Symbolic(reduced.clone())
    } else {
        match resolver.resolve(&reduced, s, degree) {
            Ok(Resolution::Zero) => ClassStatus::Zero,
            Ok(Resolution::Value(v)) => {
                let e = resolver.to_expr(&resolver.lookup(s, degree)?, &v);
                if e.is_zero() {
                    ClassStatus::Zero
                } else {
                    ClassStatus::Resolved(e)
                }
            }
            Ok(Resolution::Symbolic(_)) | Err(FactError::Missing { .. }) => {
                let e = resolver.rewrite(&reduced);
                if e.is_zero() {
                    ClassStatus::Zero
                } else {
                    ClassStatus::Symbolic(e)
                }
            }
            Err(e) => return Err(e.into()),
        }
    };
    let top = 11 + 2 * k;
    let attaching = match &class {
        ClassStatus::Zero => Attaching::Trivial,
        ClassStatus::Resolved(e) => Attaching::Class(e.render()),
        ClassStatus::Symbolic(e) => Attaching::Symbolic(e.render()),
    };
    let complex = CellComplex::sphere(s as u32).attach(top, attaching)?;
    Ok(PinchSkeleton { k, prime: p, bottom: s as u32, top, through_dim: 3 * k + 17, reduced, class, complex })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factdb::FactDb;

    #[test]
    fn fibre_dims() {
        let c = fibre_cell_dims(5, 8).unwrap();
        assert_eq!(c.up_to(21), vec![5, 13, 21]);
        assert_eq!(c.up_to(20), vec![5, 13]);
        assert_eq!(fibre_cell_dims(2, 2).unwrap().up_to(6), vec![2, 4, 6]);
        assert!(fibre_cell_dims(1, 4).is_err());
        assert!(fibre_cell_dims(6, 5).is_err());
        assert_eq!(c.filtration_for_skeleton(13), 2);
        assert_eq!(c.filtration_for_skeleton(20), 2);
        assert_eq!(c.filtration_for_skeleton(21), 3);
    }

    #[test]
    fn whitehead_rewrites() {
        for k in 1..6 {
            let s = 4 + k;
            let (e, sym) = whitehead_reduce(&format!("iota_{s}"), &format!("nu_{s}")).unwrap();
            assert!(!sym);
            assert_eq!(e.render(), format!("w_{s} nu_{}", 2 * k + 7));
            let (e, _) = whitehead_reduce(&format!("iota_{s}"), &format!("alpha1_{s}")).unwrap();
            assert_eq!(e.render(), format!("w_{s} alpha1_{}", 2 * k + 7));
        }
    }

    #[test]
    fn w7_nu13_vanishes() {
        let db = FactDb::builtin();
        let r = Resolver::new(&db, 2);
        let sk = skeleton_of_pinch_fibre(&r, 3).unwrap();
        assert!(sk.is_wedge());
        assert_eq!(sk.complex.to_string(), "S^7 ∨ S^17");
    }

    #[test]
    fn render_parse_round_trip() {
        for s in ["S^6 ∪_{2 nubar_6} e^15", "S^5 ∨ S^13", "S^10 ∪_{?P(nu_21)} e^23"] {
            assert_eq!(CellComplex::parse(s).unwrap().to_string(), s);
        }
    }
}
