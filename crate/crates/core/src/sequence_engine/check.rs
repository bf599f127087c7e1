//! Exactness audits for the sequences the engine builds, and the snake-lemma bound on
//! a map of short exact sequences.

use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use super::derive::KernelData;
use super::fibre::{BoundaryMap, FibreGroup, FibreModel, Image};
use super::trace::Trace;
use super::EngineError;
use crate::extensions::Realization;
use crate::local_algebra::{solve_in_span, unit_vector, zero_vector, FgModule, Order, Presentation, QuotientModule, Vector};

/// A chain of presented modules with maps between neighbours. `arrows[i]` sends each
/// generator of `nodes[i]` to a vector in the coordinates of `nodes[i + 1]`.
#[derive(Clone, Debug)]
pub struct SequenceInstance {
    pub template: String,
    pub nodes: Vec<Presentation>,
    pub arrows: Vec<Vec<Vector>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    Shape,
    NotWellDefined,
    CompositeNonzero,
    NotExact,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub template: String,
    pub position: usize,
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at node {}: {:?}: {}", self.template, self.position, self.kind, self.detail)
    }
}

/// x · arrow, where x is in the source generator coordinates.
pub fn apply_map(arrow: &[Vector], x: &[BigRational], width: usize) -> Vector {
    let mut out = zero_vector(width);
    for (xi, row) in x.iter().zip(arrow) {
        if xi.is_zero() {
            continue;
        }
        for (o, r) in out.iter_mut().zip(row) {
            *o += xi * r;
        }
    }
    out
}

/// Every composite of neighbouring maps vanishes and the sequence is exact at each
/// interior node.
pub fn consistency_checks(inst: &SequenceInstance) -> Result<Vec<Violation>, EngineError> {
    let mut out = Vec::new();
    let v = |position: usize, kind: ViolationKind, detail: String| Violation {
        template: inst.template.clone(),
        position,
        kind,
        detail,
    };
    if inst.arrows.len() + 1 != inst.nodes.len() {
        out.push(v(0, ViolationKind::Shape, format!("{} nodes but {} maps", inst.nodes.len(), inst.arrows.len())));
        return Ok(out);
    }
    let mut ill_defined = vec![false; inst.arrows.len()];
    for (i, arrow) in inst.arrows.iter().enumerate() {
        let (src, dst) = (&inst.nodes[i], &inst.nodes[i + 1]);
        if arrow.len() != src.rank() || arrow.iter().any(|row| row.len() != dst.rank()) {
            out.push(v(i, ViolationKind::Shape, "map does not match the node ranks".into()));
            return Ok(out);
        }
        let q = dst.quotient();
        for rel in src.relations() {
            if !q.is_zero(&apply_map(arrow, rel, dst.rank())) {
                out.push(v(i, ViolationKind::NotWellDefined, "a relation maps to a nonzero class".into()));
                ill_defined[i] = true;
            }
        }
    }
    for i in 0..inst.arrows.len().saturating_sub(1) {
        let (a, b) = (&inst.arrows[i], &inst.arrows[i + 1]);
        let (mid, end) = (&inst.nodes[i + 1], &inst.nodes[i + 2]);
        let q = end.quotient();
        for (g, row) in a.iter().enumerate() {
            if !q.is_zero(&apply_map(b, row, end.rank())) {
                out.push(v(
                    i + 1,
                    ViolationKind::CompositeNonzero,
                    format!("generator {} of node {i} survives two maps", inst.nodes[i].generators()[g]),
                ));
            }
        }
        // Kernels of maps that are not well defined mean nothing.
        if ill_defined[i + 1] {
            continue;
        }
        let (_, kernel) = mid.kernel(b, end)?;
        let mut span: Vec<Vector> = a.clone();
        span.extend(mid.relations().iter().cloned());
        for x in kernel {
            if solve_in_span(mid.prime(), &x, &span)?.is_none() {
                out.push(v(i + 1, ViolationKind::NotExact, "kernel is larger than the image".into()));
            }
        }
    }
    Ok(out)
}

fn pad(v: &[BigRational], width: usize) -> Vector {
    let mut out = v.to_vec();
    out.resize(width, BigRational::zero());
    out
}

/// π_{m+1}(S^{8+k}) → π_m(F_k) → B → π_m(S^{8+k}) → π_{m−1}(F_k) for one determined run,
/// with B the chosen realization plus the free part of the kernel.
#[allow(clippy::too_many_arguments)]
pub(crate) fn derived_instance(
    upper: &BoundaryMap,
    fibre: &FibreGroup,
    cok: &Presentation,
    cok_q: &QuotientModule,
    ker: &KernelData,
    lower: &BoundaryMap,
    real: &Realization,
    free: usize,
    model: &FibreModel,
    m: i64,
) -> Result<SequenceInstance, EngineError> {
    let p = model.prime();
    let n0 = upper.domain.presentation();
    let n1 = fibre.presentation.clone();
    let n3 = lower.domain.presentation();
    let (n4, lower_width) = if lower.all_zero() {
        (Presentation::new(p, vec![], vec![])?, 0)
    } else {
        let bottom = model.bottom_part(m - 1, &mut Trace::new("x"))?;
        let w = bottom.presentation.rank();
        (bottom.presentation, w)
    };

    let b_rank = real.presentation.rank() + free;
    let mut b_names: Vec<String> = real.presentation.generators().to_vec();
    b_names.extend((0..free).map(|i| format!("z{i}")));
    let b_rels: Vec<Vector> = real.presentation.relations().iter().map(|r| pad(r, b_rank)).collect();
    let n2 = Presentation::new(p, b_names, b_rels)?;

    let a0: Vec<Vector> = upper
        .images
        .iter()
        .map(|i| match i {
            Image::Zero => zero_vector(n1.rank()),
            Image::Value(v) => fibre.embed_bottom(v),
        })
        .collect();
    debug_assert_eq!(cok.rank(), n1.rank());
    let a1: Vec<Vector> =
        (0..n1.rank()).map(|i| pad(&real.include(&cok_q.module_coords(&unit_vector(n1.rank(), i))), b_rank)).collect();
    let tors = real.right_exponents.len();
    let mut a2: Vec<Vector> = vec![zero_vector(n3.rank()); real.left_rank];
    for l in 0..tors + free {
        a2.push(pad(&ker.module_element(l), n3.rank()));
    }
    let a3: Vec<Vector> = lower
        .images
        .iter()
        .map(|i| match i {
            Image::Zero => zero_vector(lower_width),
            Image::Value(v) => pad(v, lower_width),
        })
        .collect();
    Ok(SequenceInstance {
        template: format!("pinch-fibre sequence at m={m}, k={}", model.k),
        nodes: vec![n0, n1, n2, n3, n4],
        arrows: vec![a0, a1, a2, a3],
    })
}

/// One row 0 → A → B → C → 0 with its two maps.
#[derive(Clone, Debug)]
pub struct ShortExactRow {
    pub a: Presentation,
    pub b: Presentation,
    pub c: Presentation,
    pub inc: Vec<Vector>,
    pub proj: Vec<Vector>,
}

impl ShortExactRow {
    fn as_instance(&self, name: &str) -> SequenceInstance {
        let zero = Presentation::new(self.a.prime(), vec![], vec![]).expect("empty presentation");
        SequenceInstance {
            template: name.to_string(),
            nodes: vec![zero.clone(), self.a.clone(), self.b.clone(), self.c.clone(), zero],
            arrows: vec![vec![], self.inc.clone(), self.proj.clone(), vec![vec![]; self.c.rank()]],
        }
    }
}

/// log_p of a finite kernel, or `None` for an infinite one.
fn kernel_log_order(src: &Presentation, map: &[Vector], dst: &Presentation) -> Result<Option<u32>, EngineError> {
    let (k, _) = src.kernel(map, dst)?;
    let km = k.module();
    Ok(match km.max_order() {
        Order::Infinite => None,
        Order::Finite(_) => Some(km.torsion_log_order()),
    })
}

fn check_square(
    first: &[Vector],
    second: &[Vector],
    other_first: &[Vector],
    other_second: &[Vector],
    target: &Presentation,
) -> bool {
    let q = target.quotient();
    let w = target.rank();
    (0..first.len()).all(|g| {
        let via_top = apply_map(second, &first[g], w);
        let via_bottom = apply_map(other_second, &other_first[g], w);
        let d: Vector = via_top.iter().zip(&via_bottom).map(|(x, y)| x - y).collect();
        q.is_zero(&d)
    })
}

/// Checks a commuting ladder of short exact rows: the rows are exact, the squares commute,
/// |ker β| ≤ |ker α|·|ker γ|, and β is injective whenever α and γ are.
pub fn snake_ladder_check(
    top: &ShortExactRow,
    bottom: &ShortExactRow,
    alpha: &[Vector],
    beta: &[Vector],
    gamma: &[Vector],
) -> Result<Vec<Violation>, EngineError> {
    let mut out = consistency_checks(&top.as_instance("top row"))?;
    out.extend(consistency_checks(&bottom.as_instance("bottom row"))?);
    let v = |position, kind, detail: &str| Violation { template: "ladder".into(), position, kind, detail: detail.into() };
    if !check_square(&top.inc, beta, alpha, &bottom.inc, &bottom.b) {
        out.push(v(0, ViolationKind::CompositeNonzero, "left square does not commute"));
    }
    if !check_square(&top.proj, gamma, beta, &bottom.proj, &bottom.c) {
        out.push(v(1, ViolationKind::CompositeNonzero, "right square does not commute"));
    }
    let ka = kernel_log_order(&top.a, alpha, &bottom.a)?;
    let kb = kernel_log_order(&top.b, beta, &bottom.b)?;
    let kc = kernel_log_order(&top.c, gamma, &bottom.c)?;
    if let (Some(a), Some(b), Some(c)) = (ka, kb, kc) {
        if b > a + c {
            out.push(v(1, ViolationKind::NotExact, "ker β is larger than ker α · ker γ allows"));
        }
        if a == 0 && c == 0 && b != 0 {
            out.push(v(1, ViolationKind::NotExact, "α and γ are injective but β is not"));
        }
    }
    Ok(out)
}

/// Module presentation helper for tests and the CLI.
pub fn presentation_of(m: &FgModule) -> Presentation {
    Presentation::of_module(m)
}
