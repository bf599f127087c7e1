//! Homotopy of the pinch-map fibre F_k through its two-cell skeleton, and the
//! connecting map into it.

use std::cell::OnceCell;

use num_rational::BigRational;
use num_traits::Zero;

use super::trace::Trace;
use super::EngineError;
use crate::cw_topology::{skeleton_of_pinch_fibre, ClassStatus, PinchSkeleton};
use crate::factdb::{Expr, FactError, GroupEntry, Resolution, Resolver, Word};
use crate::local_algebra::{zero_vector, FgModule, Order, Presentation, Vector};

/// The fibre F_k ≃ S^s ∪_f e^t with s = 4+k, t = 11+2k, through dimension 3k+13.
pub struct FibreModel<'r, 'db> {
    pub resolver: &'r Resolver<'db>,
    pub k: u32,
    pub s: i64,
    pub t: i64,
    skeleton: OnceCell<Result<PinchSkeleton, String>>,
}

/// π_m(S^s) modulo the image of f∘: the part of π_m(F_k) coming from the bottom cell.
#[derive(Clone, Debug)]
pub struct BottomPart {
    pub entry: GroupEntry,
    pub presentation: Presentation,
}

/// π_m(F_k) with generators j(x) for the bottom sphere, then lifts of top-cell classes,
/// then (for a wedge) Whitehead-product classes.
#[derive(Clone, Debug)]
pub struct FibreGroup {
    pub m: i64,
    pub presentation: Presentation,
    /// Number of bottom-sphere generators, which come first.
    pub bottom_len: usize,
    pub bottom: GroupEntry,
}

impl FibreGroup {
    pub fn module(&self) -> FgModule {
        self.presentation.module()
    }

    /// A class of π_m(S^s), in fibre coordinates.
    pub fn embed_bottom(&self, v: &[BigRational]) -> Vector {
        let mut out = v.to_vec();
        out.resize(self.presentation.rank(), BigRational::zero());
        out
    }
}

/// Value of the connecting map on one generator, in π_{m'−1}(S^s) coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Image {
    Zero,
    Value(Vector),
}

#[derive(Clone, Debug)]
pub struct BoundaryMap {
    pub domain: GroupEntry,
    pub images: Vec<Image>,
}

impl BoundaryMap {
    pub fn all_zero(&self) -> bool {
        self.images.iter().all(|i| *i == Image::Zero)
    }
}

impl<'r, 'db> FibreModel<'r, 'db> {
    pub fn new(resolver: &'r Resolver<'db>, k: u32) -> Self {
        FibreModel { resolver, k, s: 4 + k as i64, t: 11 + 2 * k as i64, skeleton: OnceCell::new() }
    }

    pub fn prime(&self) -> u64 {
        self.resolver.prime()
    }

    /// Highest m for which π_m(F_k) is computed from the two-cell skeleton.
    pub fn top_dimension(&self) -> i64 {
        3 * self.k as i64 + 13
    }

    pub fn skeleton(&self) -> Result<&PinchSkeleton, EngineError> {
        self.skeleton
            .get_or_init(|| skeleton_of_pinch_fibre(self.resolver, self.k).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| EngineError::Skeleton(e.clone()))
    }

    /// The 3-stem class 𝕪 on S^s whose composites model the connecting map.
    pub fn y_class(&self) -> String {
        match self.prime() {
            2 => format!("nu_{}", self.s),
            _ => format!("alpha1_{}", self.s),
        }
    }

    /// f∘x for a class x of π_j(S^{t−1}), in π_j(S^s) coordinates.
    fn compose_attaching(&self, name: &str, j: i64) -> Result<Option<Vector>, EngineError> {
        let sk = self.skeleton()?;
        let f = match &sk.class {
            ClassStatus::Zero => return Ok(None),
            ClassStatus::Resolved(e) => e.clone(),
            ClassStatus::Symbolic(e) => {
                return Err(EngineError::Underdetermined(format!(
                    "attaching class {} of F_{} is unresolved and meets π_{j}(S^{})",
                    e.render(),
                    self.k,
                    self.t - 1
                )))
            }
        };
        let product = f.then_expr(&Expr::word(Word::parse(name)?));
        match self.resolver.resolve(&product, self.s, j)? {
            Resolution::Value(v) => Ok(Some(v)),
            Resolution::Zero => Ok(None),
            Resolution::Symbolic(s) => Err(EngineError::Underdetermined(format!("no fact determines {s}"))),
        }
    }

    pub fn bottom_part(&self, m: i64, trace: &mut Trace) -> Result<BottomPart, EngineError> {
        self.check_range(m)?;
        let entry = self.resolver.lookup(self.s, m)?;
        let mut presentation = entry.presentation();
        let names: Vec<String> = entry.names().iter().map(|n| format!("j({n})")).collect();
        presentation = Presentation::new(self.prime(), names, presentation.relations().to_vec())?;
        // Over a wedge f∘ vanishes, so π_m(S^{t−1}) is never needed.
        let top = match self.resolver.lookup(self.t - 1, m) {
            Err(FactError::Missing { .. }) if self.skeleton()?.is_wedge() => None,
            other => Some(other?),
        };
        if let Some(top) = top.filter(|t| !t.is_zero()) {
            let mut rels = Vec::new();
            let mut shown = Vec::new();
            for (name, _) in &top.generators {
                if let Some(v) = self.compose_attaching(name, m)? {
                    shown.push(format!("f∘{name} = {}", self.resolver.to_expr(&entry, &v).render()));
                    rels.push(v);
                } else {
                    shown.push(format!("f∘{name} = 0"));
                }
            }
            trace.step("attaching-image", &[format!("π_{m}(S^{})", self.t - 1)], &shown.join("; "), self.resolver);
            presentation = presentation.with_relations(&rels)?;
        }
        Ok(BottomPart { entry, presentation })
    }

    /// The two-cell model computes π_m(F_k) for m ≤ 3k+13; when the attaching class
    /// vanishes the Hilton decomposition reaches up to the next cell and the next
    /// Whitehead product.
    fn check_range(&self, m: i64) -> Result<(), EngineError> {
        if m <= self.top_dimension() {
            return Ok(());
        }
        let wedge_top = (3 * self.k as i64 + 16).min(2 * self.s + self.t - 3);
        if m <= wedge_top && self.skeleton()?.is_wedge() {
            return Ok(());
        }
        Err(EngineError::OutOfRange(format!(
            "π_{m}(F_{}) lies above the two-cell range (m ≤ {})",
            self.k,
            self.top_dimension()
        )))
    }

    /// π_m(F_k): 0 → π_m(S^s)/f∘π_m(S^{t−1}) → π_m(F_k) → ker(f∘ on π_{m−1}(S^{t−1})) → 0.
    pub fn fibre_pi(&self, m: i64, trace: &mut Trace) -> Result<FibreGroup, EngineError> {
        let bottom = self.bottom_part(m, trace)?;
        if bottom.entry.partial {
            return Err(EngineError::Partial(format!("π_{m}(S^{}) is only partly known", self.s)));
        }
        let p = self.prime();
        let upper = match self.resolver.lookup(self.t - 1, m - 1) {
            Err(FactError::Missing { .. }) if self.skeleton()?.is_wedge() => None,
            other => Some(other?),
        };
        let mut names: Vec<String> = bottom.presentation.generators().to_vec();
        let bottom_len = names.len();
        let mut rels: Vec<Vector> = bottom.presentation.relations().to_vec();
        let mut blocks: Vec<(Vec<String>, Vec<Vector>)> = Vec::new();

        let no_top = upper.as_ref().is_some_and(|u| u.is_zero()) && m < self.s + self.t - 1;
        if !no_top && self.skeleton()?.is_wedge() {
            // Hilton: π_m(S^s ∨ S^t) = π_m(S^s) ⊕ π_m(S^t) ⊕ π_m(S^{s+t−1}) in this range.
            for (n, label) in [(self.t, "i"), (self.s + self.t - 1, "w")] {
                let e = self.resolver.lookup(n, m)?;
                if e.partial {
                    return Err(EngineError::Partial(format!("π_{m}(S^{n}) is only partly known")));
                }
                if e.is_zero() {
                    continue;
                }
                let gens = e.names().iter().map(|x| format!("{label}({x})")).collect();
                blocks.push((gens, e.presentation().relations().to_vec()));
            }
            trace.step(
                "fibre-wedge",
                &[format!("π_{m}(S^{})", self.t), format!("π_{m}(S^{})", self.s + self.t - 1)],
                "attaching class is zero; Hilton summands added",
                self.resolver,
            );
        } else if let Some(upper) = upper.filter(|u| !u.is_zero()) {
            let target = self.resolver.lookup(self.s, m - 1)?;
            let mut images = Vec::new();
            for (name, _) in &upper.generators {
                images.push(self.compose_attaching(name, m - 1)?.unwrap_or_else(|| zero_vector(target.generators.len())));
            }
            let (kp, basis) = upper.presentation().kernel(&images, &target.presentation())?;
            let kq = kp.quotient();
            let kmod = kq.module().clone();
            let labels: Vec<String> =
                basis.iter().map(|b| format!("lift({})", self.resolver.to_expr(&upper, b).render())).collect();
            if !kmod.torsion_exponents().is_empty() {
                self.check_lifts_split(m, &upper, &kp, &basis, trace)?;
            }
            trace.step(
                "fibre-top-kernel",
                &[format!("π_{}(S^{})", m - 1, self.t - 1)],
                &format!("ker f∘ = {}", kmod.render()),
                self.resolver,
            );
            blocks.push((labels, kp.relations().to_vec()));
        }
        for (gens, block_rels) in blocks {
            let offset = names.len();
            names.extend(gens);
            for r in block_rels {
                let mut row = zero_vector(offset);
                row.extend(r);
                rels.push(row);
            }
        }
        let total = names.len();
        for r in rels.iter_mut() {
            r.resize(total, BigRational::zero());
        }
        let presentation = Presentation::new(p, names, rels)?;
        trace.step(
            "fibre",
            &[format!("π_{m}(S^{})", self.s), format!("π_{}(S^{})", m - 1, self.t - 1)],
            &format!("π_{m}(F_{}) = {}", self.k, presentation.module().render()),
            self.resolver,
        );
        Ok(FibreGroup { m, presentation, bottom_len, bottom: bottom.entry })
    }

    /// A torsion class of the top-cell kernel lifts to π_m(F_k) with the same order
    /// only when a recorded fact says so.
    fn check_lifts_split(
        &self,
        m: i64,
        upper: &GroupEntry,
        kp: &Presentation,
        basis: &[Vector],
        trace: &mut Trace,
    ) -> Result<(), EngineError> {
        let p = self.prime();
        let r = (m - self.k as i64) as u32;
        let facts = self.resolver.db().goal_facts(p, r, self.k, "fibre_lift_order", self.resolver.hypothesis());
        let kq = kp.quotient();
        let uq = upper.presentation().quotient();
        for (j, o) in kq.canonical_orders().iter().enumerate() {
            let Some(e) = *o else { continue };
            if e == 0 {
                continue;
            }
            let mut unit = zero_vector(kq.canonical_orders().len());
            unit[j] = BigRational::from_integer(1.into());
            let coeffs = kq.from_canonical(&unit);
            let mut x = zero_vector(upper.generators.len());
            for (c, b) in coeffs.iter().zip(basis) {
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi += c * bi;
                }
            }
            let mut found = None;
            for fact in &facts {
                let Some(el) = &fact.element else { continue };
                let y = match self.resolver.resolve(&Expr::parse(el)?, self.t - 1, m - 1)? {
                    Resolution::Value(v) => v,
                    _ => continue,
                };
                if same_cyclic_subgroup(&uq, &x, &y, p) {
                    found = Some(*fact);
                    break;
                }
            }
            let shown = self.resolver.to_expr(upper, &x).render();
            let Some(fact) = found else {
                return Err(EngineError::MissingFact(format!(
                    "order of the lift of {shown} to π_{m}(F_{}) (fibre_lift_order, r={r}, k={})",
                    self.k, self.k
                )));
            };
            self.resolver.cite(&fact.id);
            let order = crate::local_algebra::pow_p(p, e);
            if fact.value.trim() != order.to_string() {
                return Err(EngineError::Unsupported(format!(
                    "lift of {shown} has order {} but the class has order {order}; non-split fibre extensions are not modeled",
                    fact.value
                )));
            }
            trace.step("fibre-lift", &[shown], &format!("lift has order {order}, so the extension splits"), self.resolver);
        }
        Ok(())
    }

    /// ∂: π_{m'}(S^{8+k}) → π_{m'−1}(F_k), generator by generator: a recorded boundary
    /// fact if there is one, otherwise j∘𝕪∘(desuspension).
    pub fn boundary(&self, m_prime: i64, trace: &mut Trace) -> Result<BoundaryMap, EngineError> {
        let p = self.prime();
        let n = 8 + self.k as i64;
        let domain = self.resolver.lookup(n, m_prime)?;
        if domain.partial {
            return Err(EngineError::Partial(format!("π_{m_prime}(S^{n}) is only partly known")));
        }
        let r = (m_prime - 1 - self.k as i64) as u32;
        let facts = self.resolver.db().goal_facts(p, r, self.k, "boundary", self.resolver.hypothesis());
        let mut images = Vec::new();
        for (name, _) in &domain.generators {
            let word = Word::parse(name)?.normalized();
            let fact = facts
                .iter()
                .find(|f| f.element.as_deref().and_then(|e| Word::parse(e).ok()).map(|w| w.normalized()) == Some(word.clone()));
            let (expr, how) = match fact {
                Some(f) => {
                    self.resolver.cite(&f.id);
                    (Expr::parse(&f.value)?, format!("fact {}", f.id))
                }
                None => {
                    let lower = desuspend(&word).ok_or_else(|| {
                        EngineError::MissingFact(format!("boundary of {name} (not a suspension; boundary, r={r}, k={})", self.k))
                    })?;
                    let y = Word::parse(&self.y_class())?;
                    (Expr::word(y.concat(&lower)), "composite".to_string())
                }
            };
            let image = if expr.is_zero() {
                Image::Zero
            } else {
                match self.resolver.resolve(&expr, self.s, m_prime - 1) {
                    Ok(Resolution::Value(v)) => {
                        if v.iter().all(|x| x.is_zero()) {
                            Image::Zero
                        } else {
                            Image::Value(v)
                        }
                    }
                    Ok(Resolution::Zero) => Image::Zero,
                    Ok(Resolution::Symbolic(s)) => {
                        return Err(EngineError::Underdetermined(format!("no fact determines {s}")));
                    }
                    Err(e @ FactError::Missing { .. }) => return Err(e.into()),
                    Err(e) => return Err(e.into()),
                }
            };
            let shown = match &image {
                Image::Zero => "0".to_string(),
                Image::Value(v) => {
                    let target = self.resolver.lookup(self.s, m_prime - 1)?;
                    format!("j({})", self.resolver.to_expr(&target, v).render())
                }
            };
            trace.step("boundary-image", &[format!("{name} ({how})")], &format!("∂({name}) = {shown}"), self.resolver);
            images.push(image);
        }
        Ok(BoundaryMap { domain, images })
    }
}

/// The desuspension of a word of suspended classes: every index drops by one.
fn desuspend(w: &Word) -> Option<Word> {
    if w.0.iter().any(|a| a.index.is_none() || a.base == "w" || a.index == Some(1)) {
        return None;
    }
    Some(w.shifted(-1))
}

fn same_cyclic_subgroup(q: &crate::local_algebra::QuotientModule, x: &[BigRational], y: &[BigRational], p: u64) -> bool {
    let (ox, oy) = (q.element_order(x), q.element_order(y));
    if ox != oy {
        return false;
    }
    let Order::Finite(e) = ox else { return false };
    let bound = crate::local_algebra::pow_p(p, e);
    let mut c = num_bigint::BigInt::from(1);
    while c < bound {
        let cx: Vec<BigRational> = x.iter().map(|t| t * BigRational::from_integer(c.clone())).collect();
        if q.equal(&cx, y) {
            return true;
        }
        c += 1;
    }
    false
}
