//! π_{r+k}(ΣᵏℍP²) as the middle of 0 → cok ∂ → π → ker ∂ → 0.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;

use super::fibre::{BoundaryMap, FibreModel, Image};
use super::trace::Trace;
use super::EngineError;
use crate::cw_topology::suspended;
use crate::extensions::{satisfying_realizations, Constraint, ExtensionError, ExtensionProblem};
use crate::factdb::word::instantiate;
use crate::factdb::{Expr, FactDb, OrderFact, Resolution, Resolver};
use crate::local_algebra::{
    int_valuation, solve_in_span, unit_vector, zero_vector, FgModule, Presentation, QuotientModule, Vector,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BranchResult {
    Determined(FgModule),
    /// Several middle terms of 0 → sub → ? → quotient → 0 survive every constraint.
    Candidates { sub: FgModule, quotient: FgModule, modules: Vec<FgModule> },
    /// The extension was too large to enumerate; only the two ends are known.
    Unresolved { sub: FgModule, quotient: FgModule },
}

impl fmt::Display for BranchResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchResult::Determined(m) => write!(f, "{}", m.render()),
            BranchResult::Candidates { sub, quotient, modules } => {
                let names: Vec<String> = modules.iter().map(|m| m.render()).collect();
                write!(f, "extension 0 -> {} -> ? -> {} -> 0, one of {{{}}}", sub.render(), quotient.render(), names.join(", "))
            }
            BranchResult::Unresolved { sub, quotient } => {
                write!(f, "extension 0 -> {} -> ? -> {} -> 0", sub.render(), quotient.render())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub label: String,
    pub result: BranchResult,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Unique(FgModule),
    Ambiguous(Vec<Branch>),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Unique(m) => write!(f, "{}", m.render()),
            Outcome::Ambiguous(bs) => {
                let parts: Vec<String> = bs.iter().map(|b| format!("[{}] {}", b.label, b.result)).collect();
                write!(f, "ambiguous: {}", parts.join("; "))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Derivation {
    pub prime: u64,
    pub r: u32,
    pub k: u32,
    pub outcome: Outcome,
    pub trace: Trace,
    pub db_version: String,
}

impl Derivation {
    pub fn unique(&self) -> Option<&FgModule> {
        match &self.outcome {
            Outcome::Unique(m) => Some(m),
            Outcome::Ambiguous(_) => None,
        }
    }

    pub fn render_trace(&self) -> String {
        format!(
            "goal | p={} r={} k={} | π_{}({}) | db {} | -\n{}",
            self.prime,
            self.r,
            self.k,
            self.r + self.k,
            suspended("HP^2", self.k as i32),
            self.db_version,
            self.trace.render()
        )
    }
}

/// A kernel with its embedding and a map from the ambient group to its module coordinates.
#[derive(Clone, Debug)]
pub struct KernelData {
    pub presentation: Presentation,
    /// Kernel generators in ambient coordinates.
    pub basis: Vec<Vector>,
    ambient_relations: Vec<Vector>,
    quotient: QuotientModule,
    /// Canonical indices in the order used by `module_coords`.
    order: Vec<usize>,
}

impl KernelData {
    pub fn new(presentation: Presentation, basis: Vec<Vector>, ambient: &Presentation) -> Self {
        let quotient = presentation.quotient();
        let orders = quotient.canonical_orders();
        let mut order: Vec<usize> = (0..orders.len()).rev().filter(|&j| matches!(orders[j], Some(e) if e > 0)).collect();
        order.extend((0..orders.len()).filter(|&j| orders[j].is_none()));
        KernelData { presentation, basis, ambient_relations: ambient.relations().to_vec(), quotient, order }
    }

    pub fn module(&self) -> FgModule {
        self.quotient.module().clone()
    }

    /// The l-th module generator, in ambient coordinates.
    pub fn module_element(&self, l: usize) -> Vector {
        let coeffs = self.quotient.from_canonical(&unit_vector(self.quotient.canonical_orders().len(), self.order[l]));
        let width = self.ambient_relations.first().map(|r| r.len()).or_else(|| self.basis.first().map(|b| b.len())).unwrap_or(0);
        let mut x = zero_vector(width);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += c * bi;
            }
        }
        x
    }

    /// Module coordinates of an ambient element, if it lies in the kernel.
    pub fn to_module(&self, x: &[BigRational]) -> Result<Option<Vector>, EngineError> {
        let mut span = self.basis.clone();
        span.extend(self.ambient_relations.iter().cloned());
        let Some(c) = solve_in_span(self.quotient.prime(), x, &span)? else { return Ok(None) };
        Ok(Some(self.quotient.module_coords(&c[..self.basis.len()])))
    }
}

pub(crate) fn kernel_of_boundary(
    model: &FibreModel,
    map: &BoundaryMap,
    m: i64,
    trace: &mut Trace,
) -> Result<KernelData, EngineError> {
    let domain = map.domain.presentation();
    let n = map.domain.generators.len();
    if map.all_zero() {
        let basis = (0..n).map(|i| unit_vector(n, i)).collect();
        let kp = Presentation::new(domain.prime(), domain.generators().to_vec(), domain.relations().to_vec())?;
        return Ok(KernelData::new(kp, basis, &domain));
    }
    let target = model.bottom_part(m - 1, trace)?;
    let width = target.presentation.rank();
    let images: Vec<Vector> = map
        .images
        .iter()
        .map(|i| match i {
            Image::Zero => zero_vector(width),
            Image::Value(v) => v.clone(),
        })
        .collect();
    let (kp, basis) = domain.kernel(&images, &target.presentation)?;
    Ok(KernelData::new(kp, basis, &domain))
}

/// Cokernel and kernel of ∂: π_m(S^{8+k}) → π_{m−1}(F_k).
pub fn boundary_cok_ker(db: &FactDb, prime: u64, m: i64, k: u32) -> Result<(FgModule, FgModule, Trace), EngineError> {
    let resolver = Resolver::new(db, prime);
    let model = FibreModel::new(&resolver, k);
    let mut trace = Trace::new("s");
    let map = model.boundary(m, &mut trace)?;
    let fibre = model.fibre_pi(m - 1, &mut trace)?;
    let images: Vec<Vector> = map
        .images
        .iter()
        .map(|i| match i {
            Image::Zero => zero_vector(fibre.presentation.rank()),
            Image::Value(v) => fibre.embed_bottom(v),
        })
        .collect();
    let cok = fibre.presentation.cokernel(&images)?.module();
    let ker = kernel_of_boundary(&model, &map, m, &mut trace)?;
    let kernel_gens: Vec<String> = (0..ker.module().num_generators())
        .map(|l| resolver.to_expr(&map.domain, &ker.module_element(l)).render())
        .collect();
    trace.step("cokernel", &[format!("∂ on π_{m}(S^{})", 8 + k)], &cok.render(), &resolver);
    trace.step("kernel", &[format!("∂ on π_{m}(S^{})", 8 + k)], &format!("{} <{}>", ker.module().render(), kernel_gens.join(", ")), &resolver);
    Ok((cok, ker.module(), trace))
}

/// π_m(F_k) with the trace of its computation.
pub fn fibre_pi(db: &FactDb, prime: u64, m: i64, k: u32) -> Result<(Presentation, Trace), EngineError> {
    let resolver = Resolver::new(db, prime);
    let model = FibreModel::new(&resolver, k);
    let mut trace = Trace::new("s");
    let f = model.fibre_pi(m, &mut trace)?;
    Ok((f.presentation, trace))
}

/// Everything one run produces, kept for the consistency audit.
pub(crate) struct RunData {
    pub result: BranchResult,
    pub trace: Trace,
    pub consulted: BTreeMap<String, usize>,
    pub instance: Option<super::check::SequenceInstance>,
}

fn log_p(value: u64, p: u64) -> Result<u32, EngineError> {
    let e = int_valuation(&value.into(), p);
    if p.pow(e) != value {
        return Err(EngineError::Unsupported(format!("order {value} is not a power of {p}")));
    }
    Ok(e)
}

pub(crate) fn run_once(
    db: &FactDb,
    prime: u64,
    r: u32,
    k: u32,
    hypothesis: Option<&str>,
    choices: BTreeMap<String, usize>,
    prefix: &str,
) -> Result<RunData, EngineError> {
    let resolver = Resolver::new(db, prime).with_hypothesis(hypothesis).with_choices(choices);
    let model = FibreModel::new(&resolver, k);
    let m = (r + k) as i64;
    let n8 = 8 + k as i64;
    let mut trace = Trace::new(prefix);

    let fibre = model.fibre_pi(m, &mut trace)?;
    let upper = model.boundary(m + 1, &mut trace)?;
    let images: Vec<Vector> = upper
        .images
        .iter()
        .map(|i| match i {
            Image::Zero => zero_vector(fibre.presentation.rank()),
            Image::Value(v) => fibre.embed_bottom(v),
        })
        .collect();
    let cok = fibre.presentation.cokernel(&images)?;
    let cok_q = cok.quotient();
    let a_mod = cok_q.module().clone();
    trace.step("cokernel", &[format!("∂ on π_{}(S^{n8})", m + 1)], &format!("cok ∂ = {}", a_mod.render()), &resolver);

    let lower = model.boundary(m, &mut trace)?;
    let ker = kernel_of_boundary(&model, &lower, m, &mut trace)?;
    let c_mod = ker.module();
    let kernel_gens: Vec<String> =
        (0..c_mod.num_generators()).map(|l| resolver.to_expr(&lower.domain, &ker.module_element(l)).render()).collect();
    trace.step(
        "kernel",
        &[format!("∂ on π_{m}(S^{n8})")],
        &format!("ker ∂ = {} <{}>", c_mod.render(), kernel_gens.join(", ")),
        &resolver,
    );
    let free = c_mod.free_rank();
    let c_tors = c_mod.torsion_part();
    if free > 0 {
        trace.step("split-free", &[c_mod.render()], &format!("free summand of rank {free} lifts"), &resolver);
    }

    let mut constraints = Vec::new();
    for fact in db.order_facts(prime, r, k, hypothesis) {
        resolver.cite(&fact.id);
        let c = constraint_for(fact, &resolver, &model, &fibre, &cok_q, &ker, m)?;
        trace.step("constraint", std::slice::from_ref(&fact.element), &format!("{c}"), &resolver);
        constraints.push(c);
    }

    let problem = ExtensionProblem::new(a_mod.clone(), c_tors.clone())?;
    let free_part = FgModule::free(prime, free);
    let (result, chosen) = match satisfying_realizations(&problem, &constraints) {
        Ok(reals) if reals.is_empty() => {
            return Err(EngineError::Inconsistent(format!(
                "no extension of {} by {} meets the recorded constraints",
                c_tors.render(),
                a_mod.render()
            )))
        }
        Ok(reals) => {
            let mut mods: Vec<FgModule> = reals.iter().map(|r| r.module.clone()).collect();
            mods.sort();
            mods.dedup();
            if mods.len() == 1 {
                (BranchResult::Determined(mods[0].direct_sum(&free_part)), reals.into_iter().next())
            } else {
                (
                    BranchResult::Candidates {
                        sub: a_mod.clone(),
                        quotient: c_mod.clone(),
                        modules: mods.iter().map(|m| m.direct_sum(&free_part)).collect(),
                    },
                    None,
                )
            }
        }
        Err(ExtensionError::TooLarge { needed, .. }) => {
            trace.step("extension", &[a_mod.render(), c_tors.render()], &format!("{needed} extension classes to test; left open"), &resolver);
            (BranchResult::Unresolved { sub: a_mod.clone(), quotient: c_mod.clone() }, None)
        }
        Err(e) => return Err(e.into()),
    };
    if !matches!(result, BranchResult::Unresolved { .. }) {
        trace.step("extension", &[a_mod.render(), c_mod.render()], &result.to_string(), &resolver);
    }
    let instance = chosen.map(|real| {
        super::check::derived_instance(&upper, &fibre, &cok, &cok_q, &ker, &lower, &real, free, &model, m)
    });
    let instance = match instance {
        Some(Ok(i)) => Some(i),
        Some(Err(e)) => return Err(e),
        None => None,
    };
    Ok(RunData { result, trace, consulted: resolver.consulted(), instance })
}

fn constraint_for(
    fact: &OrderFact,
    resolver: &Resolver,
    model: &FibreModel,
    fibre: &super::fibre::FibreGroup,
    cok_q: &QuotientModule,
    ker: &KernelData,
    m: i64,
) -> Result<Constraint, EngineError> {
    let p = resolver.prime();
    let e = log_p(fact.value, p)?;
    let n8 = 8 + model.k as i64;
    let kernel_element = |el: &str| -> Result<Vector, EngineError> {
        let expr = Expr::parse(&instantiate(el, n8))?;
        let x = match resolver.resolve(&expr, n8, m)? {
            Resolution::Value(v) => v,
            _ => return Err(EngineError::Underdetermined(format!("cannot place {} in π_{m}(S^{n8})", expr.render()))),
        };
        let coords = ker
            .to_module(&x)?
            .ok_or_else(|| EngineError::Inconsistent(format!("{} is not in the kernel of ∂ ({})", expr.render(), fact.id)))?;
        Ok(coords[..ker.module().torsion_exponents().len()].to_vec())
    };
    Ok(match fact.kind.as_str() {
        "at_least" => Constraint::OrderAtLeast(e),
        "exactly" => Constraint::OrderExactly(e),
        "no_element_of_order" => Constraint::NoElementOfOrder(e),
        "lift_order" => Constraint::LiftWithOrder { element: kernel_element(&fact.element)?, order: e },
        "not_divisible" => Constraint::NotDivisibleByP(kernel_element(&fact.element)?),
        "divisible" => {
            let expr = Expr::parse(&instantiate(&fact.element, model.s))?;
            let x = match resolver.resolve(&expr, model.s, m)? {
                Resolution::Value(v) => v,
                _ => return Err(EngineError::Underdetermined(format!("cannot place {} in π_{m}(S^{})", expr.render(), model.s))),
            };
            Constraint::AElementDivisibleByP(cok_q.module_coords(&fibre.embed_bottom(&x)))
        }
        other => return Err(EngineError::Unsupported(format!("order fact kind `{other}` ({})", fact.id))),
    })
}

/// Hypothesis labels on facts the goal (r, k) can consult.
fn hypotheses_for(db: &FactDb, prime: u64, r: u32, k: u32) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for rr in [r, r.saturating_sub(1)] {
        out.extend(
            db.all_order_facts(prime)
                .filter(|o| o.scope.as_ref().is_some_and(|s| s.covers(rr, k)))
                .filter_map(|o| o.hypothesis.clone()),
        );
        out.extend(db.all_goal_facts(prime).filter(|g| g.scope.covers(rr, k)).filter_map(|g| g.hypothesis.clone()));
    }
    out.sort();
    out.dedup();
    out
}

fn k_zero(db: &FactDb, prime: u64, r: u32) -> Result<Derivation, EngineError> {
    let resolver = Resolver::new(db, prime);
    let mut trace = Trace::new("s");
    let a = resolver.lookup(11, r as i64)?;
    let b = resolver.lookup(3, r as i64 - 1)?;
    let m = a.module().direct_sum(&b.module());
    trace.push(
        "k0-splitting",
        &[format!("π_{r}(S^11) = {}", a.module().render()), format!("π_{}(S^3) = {}", r - 1, b.module().render())],
        &m.render(),
        "π_n(HP^2) ≅ π_n(S^11) ⊕ π_{n-1}(S^3)",
    );
    Ok(Derivation { prime, r, k: 0, outcome: Outcome::Unique(m), trace, db_version: db.version().to_string() })
}

/// Determine π_{r+k}(ΣᵏℍP²) at `prime`. For k > r−6 the group is the stable one and
/// is read off at k = r−6.
pub fn derive_pi(db: &FactDb, prime: u64, r: u32, k: u32) -> Result<Derivation, EngineError> {
    if k > 0 && r >= 7 && k > r - 6 {
        let mut d = derive_direct(db, prime, r, r - 6)?;
        let mut trace = Trace::new("s");
        trace.push("stable-range", &[format!("k={k} > r-6")], &format!("same as k={}", r - 6), "Freudenthal suspension");
        trace.extend(d.trace);
        d.trace = trace;
        d.k = k;
        return Ok(d);
    }
    derive_direct(db, prime, r, k)
}

/// As [`derive_pi`] without the stable-range shortcut.
pub fn derive_direct(db: &FactDb, prime: u64, r: u32, k: u32) -> Result<Derivation, EngineError> {
    Ok(derive_with_audit(db, prime, r, k)?.0)
}

/// The derivation together with the exact-sequence instances of every determined run.
pub fn derive_with_audit(
    db: &FactDb,
    prime: u64,
    r: u32,
    k: u32,
) -> Result<(Derivation, Vec<super::check::SequenceInstance>), EngineError> {
    if k == 0 {
        return Ok((k_zero(db, prime, r)?, vec![]));
    }
    let version = db.version().to_string();
    let mut instances = Vec::new();
    let hyps = hypotheses_for(db, prime, r, k);
    let mut trace = Trace::new("s");
    let mut branches = Vec::new();
    if hyps.is_empty() {
        let base = run_once(db, prime, r, k, None, BTreeMap::new(), "s")?;
        let consulted = base.consulted.clone();
        trace.extend(base.trace);
        instances.extend(base.instance);
        branches.push(Branch { label: "default".into(), result: base.result });
        for (i, combo) in choice_combinations(&consulted).into_iter().enumerate() {
            let label = combo.iter().map(|(f, c)| format!("{f}={c}")).collect::<Vec<_>>().join(",");
            let run = run_once(db, prime, r, k, None, combo, &format!("c{}.", i + 1))?;
            trace.push("alternative", std::slice::from_ref(&label), &run.result.to_string(), "-");
            instances.extend(run.instance);
            branches.push(Branch { label, result: run.result });
        }
    } else {
        for (i, h) in hyps.iter().enumerate() {
            let run = run_once(db, prime, r, k, Some(h), BTreeMap::new(), &format!("h{}.", i + 1))?;
            trace.push("hypothesis", std::slice::from_ref(h), &run.result.to_string(), "-");
            trace.extend(run.trace);
            instances.extend(run.instance);
            branches.push(Branch { label: format!("hypothesis {h}"), result: run.result });
        }
    }
    let first = branches[0].result.clone();
    let outcome = match first {
        BranchResult::Determined(m) if branches.iter().all(|b| b.result == BranchResult::Determined(m.clone())) => {
            if branches.len() > 1 {
                trace.push("branches-agree", &[format!("{} runs", branches.len())], &m.render(), "-");
            }
            Outcome::Unique(m)
        }
        _ if branches.len() == 1 => {
            let mut b = branches;
            b[0].label = "extension".into();
            Outcome::Ambiguous(b)
        }
        _ => Outcome::Ambiguous(branches),
    };
    Ok((Derivation { prime, r, k, outcome, trace, db_version: version }, instances))
}

/// Every assignment of alternatives to the consulted facts other than all-defaults.
fn choice_combinations(consulted: &BTreeMap<String, usize>) -> Vec<BTreeMap<String, usize>> {
    let mut combos: Vec<BTreeMap<String, usize>> = vec![BTreeMap::new()];
    for (fact, &n) in consulted {
        let mut next = Vec::new();
        for c in &combos {
            for i in 0..n {
                let mut c2 = c.clone();
                c2.insert(fact.clone(), i);
                next.push(c2);
            }
        }
        combos = next;
    }
    combos.into_iter().filter(|c| c.values().any(|&i| i != 0)).collect()
}
