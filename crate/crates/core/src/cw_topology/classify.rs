//! 3-local homotopy types of three-cell complexes S^{4+k} ∪ e^{8+k} ∪ e^{12+k}.
//!
//! Such a complex is the cofibre of a map S^{11+k} → Y where Y is one of the two
//! possible (8+k)-skeleta: ΣᵏℍP² or S^{4+k} ∨ S^{8+k}. Attaching classes are taken up
//! to independent unit rescaling of each cyclic coordinate.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::CwError;
use crate::factdb::{FactDb, Resolver};
use crate::local_algebra::{int_valuation, pow_p, residue, FgModule, Presentation, Vector};
use crate::sequence_engine::{boundary_cok_ker, derive_pi};

/// Rescale by one unit so the result is the smallest representative of its orbit.
///
/// `coords` follow the summands of `module`: torsion factors largest first, then free.
/// With a free part the first nonzero free coordinate becomes a power of p; otherwise
/// the lexicographically least multiple by a unit is returned.
pub fn normalize_attaching(module: &FgModule, coords: &[BigRational]) -> Vector {
    let p = module.prime();
    let tors = module.torsion_exponents();
    let reduce = |v: &[BigRational]| -> Vector {
        v.iter()
            .enumerate()
            .map(|(i, x)| match tors.get(i) {
                Some(&e) => BigRational::from_integer(residue(x, p, e)),
                None => x.clone(),
            })
            .collect()
    };
    if let Some(j) = (tors.len()..coords.len()).find(|&j| !coords[j].is_zero()) {
        let x = &coords[j];
        let v = int_valuation(&x.numer().abs(), p) as i64 - int_valuation(x.denom(), p) as i64;
        let target = if v >= 0 {
            BigRational::from_integer(pow_p(p, v as u32))
        } else {
            BigRational::new(BigInt::one(), pow_p(p, (-v) as u32))
        };
        let unit = &target / x;
        return reduce(&coords.iter().map(|c| c * &unit).collect::<Vec<_>>());
    }
    let top = tors.iter().copied().max().unwrap_or(0);
    let modulus = pow_p(p, top);
    let mut best = reduce(coords);
    let mut u = BigInt::from(2);
    while u < modulus {
        if !u.is_multiple_of(&BigInt::from(p)) {
            let scaled: Vec<BigRational> = coords.iter().map(|c| c * BigRational::from_integer(u.clone())).collect();
            let cand = reduce(&scaled);
            if cand < best {
                best = cand;
            }
        }
        u += 1;
    }
    best
}

/// Each coordinate becomes p^v or 0, rescaling the coordinates independently.
pub fn normalize_componentwise(module: &FgModule, coords: &[BigRational]) -> Vector {
    let p = module.prime();
    let tors = module.torsion_exponents();
    coords
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let zero = match tors.get(i) {
                Some(&e) => residue(x, p, e).is_zero(),
                None => x.is_zero(),
            };
            if zero {
                return BigRational::zero();
            }
            let v = int_valuation(&x.numer().abs(), p);
            BigRational::from_integer(pow_p(p, v))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariants {
    /// P¹ nonzero from H^{4+k} to H^{8+k}.
    pub p1_low: bool,
    /// P¹ nonzero from H^{8+k} to H^{12+k}.
    pub p1_high: bool,
    /// π_{11+k} of the complex.
    pub pi: FgModule,
    /// π_{11+k} of the quotient by the sphere that is not attached to the top cell by
    /// a suspension of α₁.
    pub quotient_pi: FgModule,
}

impl fmt::Display for Invariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "P1 low={} high={}, pi={}, quotient pi={}",
            self.p1_low as u8,
            self.p1_high as u8,
            self.pi.render(),
            self.quotient_pi.render()
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CofibreType {
    pub skeleton: String,
    pub attaching: String,
    pub invariants: Invariants,
}

/// One infinite family indexed by t ≥ 0, with π_{11+k} for the first few members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CofibreFamily {
    pub skeleton: String,
    pub attaching: String,
    pub samples: Vec<(u32, FgModule)>,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub k: u32,
    pub prime: u64,
    pub types: Vec<CofibreType>,
    pub families: Vec<CofibreFamily>,
    pub notes: Vec<String>,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "k={} p={}: {} sporadic types, {} families",
            self.k,
            self.prime,
            self.types.len(),
            self.families.len()
        )?;
        for t in &self.types {
            writeln!(f, "  {} ∪_{{{}}} e^{} | {}", t.skeleton, t.attaching, 12 + self.k, t.invariants)?;
        }
        for fam in &self.families {
            let samples: Vec<String> = fam.samples.iter().map(|(t, m)| format!("t={t}: {}", m.render())).collect();
            writeln!(f, "  {} ∪_{{{}}} e^{} (t >= 0) | pi: {}", fam.skeleton, fam.attaching, 12 + self.k, samples.join(", "))?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Multiples p^v of a generator of Z/p^e, with 0 first.
fn cyclic_orbits(p: u64, e: u32) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero()];
    out.extend((0..e).rev().map(|v| BigRational::from_integer(pow_p(p, v))));
    out
}

fn term(c: &BigRational, name: &str) -> Option<String> {
    if c.is_zero() {
        None
    } else if c.is_one() {
        Some(name.to_string())
    } else {
        Some(format!("{c}{name}"))
    }
}

fn render_class(parts: &[(BigRational, &str)]) -> String {
    let terms: Vec<String> = parts.iter().filter_map(|(c, n)| term(c, n)).collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// Quotient of a module by one element given in its summand coordinates.
fn quotient_by(m: &FgModule, x: &[BigRational]) -> Result<FgModule, CwError> {
    let pres = Presentation::of_module(m);
    let x: Vec<BigRational> = x.to_vec();
    pres.cokernel(&[x]).map(|c| c.module()).map_err(|e| CwError::Unsupported(e.to_string()))
}

fn is_unit_coord(x: &BigRational, p: u64) -> bool {
    !x.is_zero() && int_valuation(x.numer(), p) == 0
}

pub fn classify(db: &FactDb, k: u32, prime: u64) -> Result<Classification, CwError> {
    if prime != 3 {
        return Err(CwError::UnsupportedPrime(prime));
    }
    if k < 1 {
        return Err(CwError::BadSuspension(k));
    }
    let s = 4 + k as i64;
    let m = 11 + k as i64;
    let resolver = Resolver::new(db, prime);
    let mut notes = Vec::new();

    // Skeleta: the orbits of π_{7+k}(S^{4+k}) = Z/3 are 0 and α₁.
    let low = resolver.lookup(s, s + 3)?.module();
    if low != FgModule::cyclic(prime, 1) {
        return Err(CwError::Unsupported(format!("π_{}(S^{s}) = {}, expected Z/3", s + 3, low.render())));
    }
    let hp2 = super::suspended("HP^2", k as i32);
    let wedge = format!("S^{} ∨ S^{}", s, s + 4);

    let derived = derive_pi(db, prime, 11, k).map_err(|e| CwError::Undetermined(e.to_string()))?;
    let g = derived
        .unique()
        .cloned()
        .ok_or_else(|| CwError::Undetermined(format!("π_{m}({hp2}) has several candidates")))?;
    let tors = g.torsion_exponents().to_vec();
    if tors.len() != 1 || g.free_rank() > 1 {
        return Err(CwError::Unsupported(format!("π_{m}({hp2}) = {} is not Z/p^e or Z ⊕ Z/p^e", g.render())));
    }
    let h_exp = tors[0];
    if g.free_rank() == 1 {
        let (cok, _, _) = boundary_cok_ker(db, prime, m + 1, k).map_err(|e| CwError::Undetermined(e.to_string()))?;
        if cok.free_rank() != 1 {
            return Err(CwError::Unsupported("free class of the skeleton does not come from the bottom cell".into()));
        }
        notes.push(format!("h generates the torsion of π_{m}({hp2}), u its free part (from the bottom cell)"));
    } else {
        notes.push(format!("h generates π_{m}({hp2}) = {}", g.render()));
    }

    let mut types = Vec::new();
    let mut families = Vec::new();
    // ΣᵏℍP² skeleton. The pinch to S^{8+k} sends h to α₁ and kills 3h and u.
    for c in cyclic_orbits(prime, h_exp) {
        let mut x = vec![c.clone()];
        if g.free_rank() == 1 {
            x.push(BigRational::zero());
        }
        let quotient_pi = if is_unit_coord(&c, prime) { FgModule::zero(prime) } else { FgModule::cyclic(prime, 1) };
        types.push(CofibreType {
            skeleton: hp2.clone(),
            attaching: render_class(&[(c.clone(), "h")]),
            invariants: Invariants {
                p1_low: true,
                p1_high: is_unit_coord(&c, prime),
                pi: quotient_by(&g, &x)?,
                quotient_pi,
            },
        });
        if g.free_rank() == 1 {
            let mut samples = Vec::new();
            for t in 0..4u32 {
                let x = vec![c.clone(), BigRational::from_integer(pow_p(prime, t))];
                samples.push((t, quotient_by(&g, &x)?));
            }
            families.push(CofibreFamily {
                skeleton: hp2.clone(),
                attaching: render_class(&[(q(1), "3^t u"), (c, "h")]),
                samples,
            });
        }
    }

    // Wedge skeleton: x·α₂ on the bottom sphere plus y·α₁ on the middle one.
    let bottom = resolver.lookup(s, m)?.module();
    let middle = resolver.lookup(s + 4, m)?.module();
    if bottom.torsion_exponents() != [1] || middle.torsion_exponents() != [1] || middle.free_rank() != 0 {
        return Err(CwError::Unsupported(format!(
            "π_{m}(S^{s}) = {}, π_{m}(S^{}) = {}; expected Z/3 torsion in each",
            bottom.render(),
            s + 4,
            middle.render()
        )));
    }
    if bottom.free_rank() > 0 {
        notes.push(format!(
            "attaching maps restricted to suspension classes; the free Whitehead class of π_{m}(S^{s}) would add further families"
        ));
    }
    let full = bottom.direct_sum(&middle);
    for a in cyclic_orbits(prime, 1) {
        for b in cyclic_orbits(prime, 1) {
            // Summand order of `full`: the two Z/3 factors (bottom first), then free.
            let mut x = vec![a.clone(), b.clone()];
            x.resize(full.num_generators(), BigRational::zero());
            let mut xb = vec![a.clone()];
            xb.resize(bottom.num_generators(), BigRational::zero());
            types.push(CofibreType {
                skeleton: wedge.clone(),
                attaching: render_class(&[(a.clone(), &format!("α2_{s}")), (b.clone(), &format!("α1_{}", s + 4))]),
                invariants: Invariants {
                    p1_low: false,
                    p1_high: is_unit_coord(&b, prime),
                    pi: quotient_by(&full, &x)?,
                    quotient_pi: quotient_by(&bottom, &xb)?,
                },
            });
        }
    }

    for (i, a) in types.iter().enumerate() {
        for b in &types[i + 1..] {
            if a.invariants == b.invariants {
                return Err(CwError::Unsupported(format!(
                    "types {} and {} share all invariants",
                    a.attaching, b.attaching
                )));
            }
        }
    }
    Ok(Classification { k, prime, types, families, notes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vector {
        xs.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn single_unit_normal_form() {
        let m = FgModule::new(3, 0, vec![2, 1]);
        assert_eq!(normalize_attaching(&m, &v(&[2, 1])), normalize_attaching(&m, &v(&[1, 2])));
        assert_eq!(normalize_attaching(&m, &v(&[6, 0])), v(&[3, 0]));
        let mf = FgModule::new(3, 1, vec![2]);
        assert_eq!(normalize_attaching(&mf, &v(&[1, -6])), v(&[4, 3]));
    }

    #[test]
    fn componentwise_normal_form() {
        let m = FgModule::new(3, 1, vec![2]);
        assert_eq!(normalize_componentwise(&m, &v(&[6, 18])), v(&[3, 9]));
        assert_eq!(normalize_componentwise(&m, &v(&[9, 0])), v(&[0, 0]));
    }

    #[test]
    fn counts() {
        let db = FactDb::builtin();
        let c1 = classify(&db, 1, 3).unwrap();
        assert_eq!((c1.types.len(), c1.families.len()), (7, 0));
        let c4 = classify(&db, 4, 3).unwrap();
        assert_eq!((c4.types.len(), c4.families.len()), (7, 3));
        let fam = |name: &str| c4.families.iter().find(|f| f.attaching == name).unwrap().samples.clone();
        assert_eq!(fam("3^t u + h")[1].1, FgModule::cyclic(3, 3));
        assert_eq!(fam("3^t u")[2].1, FgModule::new(3, 0, vec![2, 2]));
        assert_eq!(fam("3^t u + 3h")[0].1, FgModule::cyclic(3, 2));
        assert_eq!(fam("3^t u + 3h")[1].1, FgModule::new(3, 0, vec![2, 1]));
    }

    #[test]
    fn even_prime_rejected() {
        assert!(matches!(classify(&FactDb::builtin(), 1, 2), Err(CwError::UnsupportedPrime(2))));
    }
}
