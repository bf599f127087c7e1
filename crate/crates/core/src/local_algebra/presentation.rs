use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::matrix::{snf, LocalMatrix};
use super::module::{FgModule, Order};
use super::scalar::{is_p_integral, pow_p, residue, valuation};
use super::AlgebraError;

pub type Vector = Vec<BigRational>;

pub fn zero_vector(n: usize) -> Vector {
    vec![BigRational::zero(); n]
}

pub fn unit_vector(n: usize, i: usize) -> Vector {
    let mut v = zero_vector(n);
    v[i] = BigRational::from_integer(1.into());
    v
}

pub fn int_vector(xs: &[i64]) -> Vector {
    xs.iter().map(|&x| BigRational::from_integer(x.into())).collect()
}

pub fn add_vectors(a: &[BigRational], b: &[BigRational]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale_vector(a: &[BigRational], s: &BigRational) -> Vector {
    a.iter().map(|x| x * s).collect()
}

/// Generators and relations for a module over the p-local integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    prime: u64,
    generators: Vec<String>,
    relations: Vec<Vector>,
}

impl Presentation {
    pub fn new(prime: u64, generators: Vec<String>, relations: Vec<Vector>) -> Result<Self, AlgebraError> {
        for r in &relations {
            if r.len() != generators.len() {
                return Err(AlgebraError::Shape { expected: generators.len(), found: r.len() });
            }
            if let Some(bad) = r.iter().find(|x| !is_p_integral(x, prime)) {
                return Err(AlgebraError::NotLocal { value: bad.to_string(), prime });
            }
        }
        Ok(Presentation { prime, generators, relations })
    }

    /// Standard presentation of a canonical module: torsion generators `t0, t1, …` then free `f0, …`.
    pub fn of_module(m: &FgModule) -> Self {
        let p = m.prime();
        let n = m.num_generators();
        let mut gens = Vec::with_capacity(n);
        let mut rels = Vec::new();
        for (i, &e) in m.torsion_exponents().iter().enumerate() {
            gens.push(format!("t{i}"));
            let mut r = zero_vector(n);
            r[i] = BigRational::from_integer(pow_p(p, e));
            rels.push(r);
        }
        for i in 0..m.free_rank() {
            gens.push(format!("f{i}"));
        }
        Presentation { prime: p, generators: gens, relations: rels }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relations(&self) -> &[Vector] {
        &self.relations
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }

    fn relation_matrix(&self) -> LocalMatrix {
        LocalMatrix::from_rows(self.prime, self.rank(), self.relations.clone())
            .expect("relations validated on construction")
    }

    pub fn quotient(&self) -> QuotientModule {
        QuotientModule::from_relations(self.prime, self.rank(), &self.relation_matrix())
    }

    pub fn module(&self) -> FgModule {
        self.quotient().module().clone()
    }

    /// Same generators with extra relations imposed.
    pub fn with_relations(&self, extra: &[Vector]) -> Result<Presentation, AlgebraError> {
        let mut rels = self.relations.clone();
        rels.extend(extra.iter().cloned());
        Presentation::new(self.prime, self.generators.clone(), rels)
    }

    /// Cokernel of the map from a free module whose basis goes to `images` in `self`.
    pub fn cokernel(&self, images: &[Vector]) -> Result<Presentation, AlgebraError> {
        self.with_relations(images)
    }

    /// Kernel of the homomorphism `self → target` sending generator i to `images[i]`.
    ///
    /// Returns the kernel as a presentation together with the embedding, expressed as
    /// one vector in `self`'s generator coordinates per kernel generator.
    pub fn kernel(&self, images: &[Vector], target: &Presentation) -> Result<(Presentation, Vec<Vector>), AlgebraError> {
        let p = self.prime;
        let n = self.rank();
        let h = target.rank();
        if images.len() != n {
            return Err(AlgebraError::Shape { expected: n, found: images.len() });
        }
        let mut stacked: Vec<Vector> = images.to_vec();
        stacked.extend(target.relations.iter().cloned());
        let m = LocalMatrix::from_rows(p, h, stacked)?;
        let s = snf(&m);

        // Rows of U past the rank span the left nullspace; their first n entries span
        // the preimage of the target relations.
        let preimage: Vec<Vector> = (s.rank()..m.rows()).map(|i| s.u.row(i)[..n].to_vec()).collect();
        let x = LocalMatrix::from_rows(p, n, preimage)?;
        let sx = snf(&x);
        let basis: Vec<Vector> = (0..sx.rank())
            .map(|i| {
                let d = BigRational::from_integer(pow_p(p, sx.exponents[i]));
                scale_vector(&sx.v_inv.row(i), &d)
            })
            .collect();

        let mut rels = Vec::with_capacity(self.relations.len());
        for g in &self.relations {
            let y = sx.v.apply_row(g);
            let mut c = zero_vector(basis.len());
            for (i, ci) in c.iter_mut().enumerate() {
                let d = BigRational::from_integer(pow_p(p, sx.exponents[i]));
                *ci = &y[i] / d;
            }
            if y[basis.len()..].iter().any(|t| !t.is_zero()) {
                return Err(AlgebraError::NotWellDefined);
            }
            rels.push(c);
        }
        let names = (0..basis.len()).map(|i| format!("k{i}")).collect();
        Ok((Presentation::new(p, names, rels)?, basis))
    }
}

/// The quotient of a free module by a relation row span, with explicit change of basis
/// to canonical cyclic coordinates.
#[derive(Clone, Debug)]
pub struct QuotientModule {
    prime: u64,
    module: FgModule,
    to_canon: LocalMatrix,
    from_canon: LocalMatrix,
    /// Per canonical coordinate: `Some(e)` for a cyclic factor of order p^e (e may be 0),
    /// `None` for a free factor.
    orders: Vec<Option<u32>>,
}

impl QuotientModule {
    pub fn from_relations(prime: u64, n: usize, relations: &LocalMatrix) -> Self {
        let s = snf(relations);
        let mut orders: Vec<Option<u32>> = s.exponents.iter().map(|&e| Some(e)).collect();
        orders.resize(n, None);
        let free = orders.iter().filter(|o| o.is_none()).count();
        let torsion = orders.iter().filter_map(|o| *o).collect();
        QuotientModule {
            prime,
            module: FgModule::new(prime, free, torsion),
            to_canon: s.v,
            from_canon: s.v_inv,
            orders,
        }
    }

    pub fn module(&self) -> &FgModule {
        &self.module
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn canonical_orders(&self) -> &[Option<u32>] {
        &self.orders
    }

    /// Coordinates in the canonical cyclic basis.
    pub fn canonical(&self, x: &[BigRational]) -> Vector {
        self.to_canon.apply_row(x)
    }

    /// Back from canonical coordinates to the original generators.
    pub fn from_canonical(&self, y: &[BigRational]) -> Vector {
        self.from_canon.apply_row(y)
    }

    pub fn is_zero(&self, x: &[BigRational]) -> bool {
        self.element_order(x) == Order::Finite(0)
    }

    pub fn element_order(&self, x: &[BigRational]) -> Order {
        let y = self.canonical(x);
        let mut best = 0;
        for (yj, o) in y.iter().zip(&self.orders) {
            let Some(v) = valuation(yj, self.prime) else { continue };
            match o {
                None => return Order::Infinite,
                Some(e) if v < *e => best = best.max(e - v),
                Some(_) => {}
            }
        }
        Order::Finite(best)
    }

    /// Whether x lies in p times the module.
    pub fn is_divisible_by_p(&self, x: &[BigRational]) -> bool {
        let y = self.canonical(x);
        y.iter().zip(&self.orders).all(|(yj, o)| match (valuation(yj, self.prime), o) {
            (None, _) => true,
            (Some(_), Some(0)) => true,
            (Some(v), _) => v >= 1,
        })
    }

    /// Equality in the quotient.
    pub fn equal(&self, a: &[BigRational], b: &[BigRational]) -> bool {
        let d: Vector = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.is_zero(&d)
    }

    /// Coordinates ordered like the summands of [`module`](Self::module): nontrivial
    /// torsion factors largest first, then free factors.
    pub fn module_coords(&self, x: &[BigRational]) -> Vector {
        let y = self.canonical(x);
        let mut out = Vec::with_capacity(self.module.num_generators());
        for j in (0..self.orders.len()).rev() {
            if let Some(e) = self.orders[j] {
                if e > 0 {
                    out.push(y[j].clone());
                }
            }
        }
        for j in 0..self.orders.len() {
            if self.orders[j].is_none() {
                out.push(y[j].clone());
            }
        }
        out
    }

    /// Reduced canonical residues: torsion coordinates mod p^e as integers,
    /// free coordinates untouched. Two elements are equal iff these agree.
    pub fn normal_form(&self, x: &[BigRational]) -> Vec<BigRational> {
        let y = self.canonical(x);
        y.iter()
            .zip(&self.orders)
            .map(|(yj, o)| match o {
                Some(e) => BigRational::from_integer(residue(yj, self.prime, *e)),
                None => yj.clone(),
            })
            .collect()
    }

    /// Every torsion element, as original-coordinate vectors. Guarded by `limit`.
    pub fn torsion_elements(&self, limit: usize) -> Result<Vec<Vector>, AlgebraError> {
        let slots: Vec<(usize, u32)> = self
            .orders
            .iter()
            .enumerate()
            .filter_map(|(j, o)| o.filter(|&e| e > 0).map(|e| (j, e)))
            .collect();
        let mut total: usize = 1;
        for &(_, e) in &slots {
            let size = usize::try_from(pow_p(self.prime, e)).unwrap_or(usize::MAX);
            total = total.saturating_mul(size);
        }
        if total > limit {
            return Err(AlgebraError::TooLarge { size: total, limit });
        }
        let n = self.orders.len();
        let mut out = Vec::with_capacity(total);
        let mut counter = vec![0u64; slots.len()];
        loop {
            let mut y = zero_vector(n);
            for (c, &(j, _)) in counter.iter().zip(&slots) {
                y[j] = BigRational::from_integer(BigInt::from(*c));
            }
            out.push(self.from_canonical(&y));
            let mut i = 0;
            loop {
                if i == slots.len() {
                    return Ok(out);
                }
                counter[i] += 1;
                if BigInt::from(counter[i]) < pow_p(self.prime, slots[i].1) {
                    break;
                }
                counter[i] = 0;
                i += 1;
            }
        }
    }
}

/// Solve x = Σ cᵢ·spanᵢ over Z(p). Returns the coefficients, or `None` when x is not in
/// the p-local span of the rows.
pub fn solve_in_span(prime: u64, x: &[BigRational], span: &[Vector]) -> Result<Option<Vector>, AlgebraError> {
    let n = x.len();
    if span.is_empty() {
        return Ok(x.iter().all(|t| t.is_zero()).then(Vec::new));
    }
    let m = LocalMatrix::from_rows(prime, n, span.to_vec())?;
    let s = snf(&m);
    // c·M = x with U·M·V = D becomes (c·U⁻¹)·D = x·V.
    let y = s.v.apply_row(x);
    let mut z = zero_vector(span.len());
    for (i, yi) in y.iter().enumerate() {
        if i < s.rank() {
            let q = yi / BigRational::from_integer(pow_p(prime, s.exponents[i]));
            if !is_p_integral(&q, prime) {
                return Ok(None);
            }
            z[i] = q;
        } else if !yi.is_zero() {
            return Ok(None);
        }
    }
    Ok(Some(s.u.apply_row(&z)))
}

/// Convenience: the canonical module of Z^n modulo the given integer relation rows.
pub fn quotient_presentation(prime: u64, n_generators: usize, relations: &LocalMatrix) -> FgModule {
    assert_eq!(relations.cols(), n_generators, "relations need one column per generator");
    QuotientModule::from_relations(prime, n_generators, relations).module().clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pres(p: u64, n: usize, rels: &[&[i64]]) -> Presentation {
        let names = (0..n).map(|i| format!("g{i}")).collect();
        Presentation::new(p, names, rels.iter().map(|r| int_vector(r)).collect()).unwrap()
    }

    #[test]
    fn free_quotient() {
        assert_eq!(pres(2, 2, &[]).module(), FgModule::free(2, 2));
    }

    #[test]
    fn cyclic_orders() {
        let q = pres(3, 1, &[&[9]]).quotient();
        assert_eq!(q.element_order(&int_vector(&[0])), Order::Finite(0));
        assert_eq!(q.element_order(&int_vector(&[1])), Order::Finite(2));
        assert_eq!(q.element_order(&int_vector(&[3])), Order::Finite(1));
        assert_eq!(q.element_order(&int_vector(&[2])), Order::Finite(2));
        assert!(q.is_divisible_by_p(&int_vector(&[3])));
        assert!(!q.is_divisible_by_p(&int_vector(&[2])));
    }

    #[test]
    fn kernel_of_doubling_on_z8() {
        // Z/8 --x2--> Z/8: kernel is Z/2 generated by 4.
        let g = pres(2, 1, &[&[8]]);
        let (k, emb) = g.kernel(&[int_vector(&[2])], &g).unwrap();
        assert_eq!(k.module(), FgModule::cyclic(2, 1));
        assert_eq!(g.quotient().element_order(&emb[0]), Order::Finite(1));
    }

    #[test]
    fn kernel_of_reduction_z_to_z4() {
        let z = pres(2, 1, &[]);
        let z4 = pres(2, 1, &[&[4]]);
        let (k, emb) = z.kernel(&[int_vector(&[1])], &z4).unwrap();
        assert_eq!(k.module(), FgModule::free(2, 1));
        assert_eq!(valuation(&emb[0][0], 2), Some(2));
    }

    #[test]
    fn torsion_enumeration_size() {
        let q = pres(2, 3, &[&[4, 0, 0], &[0, 2, 0]]).quotient();
        assert_eq!(q.torsion_elements(100).unwrap().len(), 8);
        assert!(q.torsion_elements(4).is_err());
    }

    #[test]
    fn span_membership() {
        let span = vec![int_vector(&[2, 0]), int_vector(&[0, 3])];
        // 3 is a unit at 2, so (0, 1) is reachable; (1, 0) is not.
        let c = solve_in_span(2, &int_vector(&[4, 1]), &span).unwrap().unwrap();
        assert_eq!(add_vectors(&scale_vector(&span[0], &c[0]), &scale_vector(&span[1], &c[1])), int_vector(&[4, 1]));
        assert!(solve_in_span(2, &int_vector(&[1, 0]), &span).unwrap().is_none());
        assert!(solve_in_span(2, &int_vector(&[0, 0]), &[]).unwrap().is_some());
        assert!(solve_in_span(2, &int_vector(&[1]), &[]).unwrap().is_none());
    }
}
