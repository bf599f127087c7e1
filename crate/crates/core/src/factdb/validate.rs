use std::collections::BTreeSet;
use std::fmt;

use super::word::{instantiate, is_template, Expr};
use super::{FactDb, Resolver};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ViolationKind {
    BadOrder,
    DuplicateName,
    DegreeMismatch,
    ResultOutsideGroup,
    SuspensionShape,
    SuspensionOrder,
    MissingDependency,
    BadExpression,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::BadOrder => "bad order",
            ViolationKind::DuplicateName => "duplicate name",
            ViolationKind::DegreeMismatch => "degree mismatch",
            ViolationKind::ResultOutsideGroup => "result outside group",
            ViolationKind::SuspensionShape => "suspension shape",
            ViolationKind::SuspensionOrder => "suspension order",
            ViolationKind::MissingDependency => "missing dependency",
            ViolationKind::BadExpression => "bad expression",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub kind: ViolationKind,
    pub location: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} ({})", self.location, self.kind, self.message)
    }
}

fn violation(kind: ViolationKind, location: impl Into<String>, message: impl Into<String>) -> Violation {
    Violation { kind, location: location.into(), message: message.into() }
}

/// Structural checks over the whole database. An empty list means the database is sound.
pub fn validate_db(db: &FactDb) -> Vec<Violation> {
    validate_with_dependencies(db, &[])
}

/// As [`validate_db`], additionally reporting every required group the database lacks.
pub fn validate_with_dependencies(db: &FactDb, required: &[(u64, i64, i64)]) -> Vec<Violation> {
    let mut out = Vec::new();
    for doc in db.explicit_entries().chain(db.stable_entries()) {
        let loc = format!("p={} pi_{}(S^{})", doc.prime, doc.degree.unwrap_or(0), doc.sphere.unwrap_or(0));
        let mut seen = BTreeSet::new();
        for g in &doc.generators {
            if g.order.to_order(doc.prime).is_none() {
                out.push(violation(ViolationKind::BadOrder, &loc, format!("{} has order {:?}", g.name, g.order)));
            }
            if !seen.insert(g.name.clone()) {
                out.push(violation(ViolationKind::DuplicateName, &loc, g.name.clone()));
            }
        }
    }
    for p in [2u64, 3] {
        check_compositions(db, p, &mut out);
        check_suspensions(db, p, &mut out);
    }
    for (p, n, m) in db.missing(required) {
        out.push(violation(
            ViolationKind::MissingDependency,
            format!("p={p} pi_{m}(S^{n})"),
            "required by an enabled derivation",
        ));
    }
    out.sort();
    out
}

fn check_compositions(db: &FactDb, p: u64, out: &mut Vec<Violation>) {
    for fact in db.compositions(p) {
        let samples: Vec<i64> = if is_template(&fact.word) {
            let lo = fact.spheres.0 as i64;
            vec![lo, lo + 1]
        } else {
            vec![0]
        };
        for n in samples {
            let word = instantiate(&fact.word, n);
            let lhs = match Expr::parse(&word) {
                Ok(e) if e.0.len() == 1 => e.0[0].1.clone(),
                _ => {
                    out.push(violation(ViolationKind::BadExpression, &fact.id, word.clone()));
                    continue;
                }
            };
            let Ok((sn, sm)) = Resolver::word_target(&lhs.normalized()) else { continue };
            if !lhs.is_composable() {
                out.push(violation(ViolationKind::DegreeMismatch, &fact.id, word.clone()));
            }
            for value in &fact.values {
                let Ok(rhs) = Expr::parse(&instantiate(value, n)) else {
                    out.push(violation(ViolationKind::BadExpression, &fact.id, value.clone()));
                    continue;
                };
                for (_, w) in &rhs.0 {
                    if let Ok(t) = Resolver::word_target(&w.normalized()) {
                        if t != (sn, sm) {
                            out.push(violation(
                                ViolationKind::DegreeMismatch,
                                &fact.id,
                                format!("{} lands in pi_{}(S^{}), expected pi_{sm}(S^{sn})", w, t.1, t.0),
                            ));
                        }
                    }
                }
                if let Ok(entry) = db.lookup_group(p, sn, sm) {
                    if entry.is_zero() && !rhs.is_zero() {
                        out.push(violation(
                            ViolationKind::ResultOutsideGroup,
                            &fact.id,
                            format!("{word} = {value} but pi_{sm}(S^{sn}) = 0"),
                        ));
                    }
                }
            }
        }
    }
}

fn check_suspensions(db: &FactDb, p: u64, out: &mut Vec<Violation>) {
    for s in db.suspensions(p) {
        let (n, m) = (s.source.0 as i64, s.source.1 as i64);
        let (Ok(src), Ok(tgt)) = (db.lookup_group(p, n, m), db.lookup_group(p, n + 1, m + 1)) else {
            out.push(violation(ViolationKind::MissingDependency, &s.id, "source or target group missing"));
            continue;
        };
        if s.matrix.len() != src.generators.len() || s.matrix.iter().any(|r| r.len() != tgt.generators.len()) {
            out.push(violation(
                ViolationKind::SuspensionShape,
                &s.id,
                format!("expected {}x{}", src.generators.len(), tgt.generators.len()),
            ));
            continue;
        }
        let mono = s.flags.iter().any(|f| f == "mono" || f == "iso");
        if !mono {
            continue;
        }
        let q = tgt.presentation().quotient();
        for (row, (name, order)) in s.matrix.iter().zip(&src.generators) {
            let image: Vec<_> = row.iter().map(|&x| num_rational::BigRational::from_integer(x.into())).collect();
            let got = q.element_order(&image);
            if got != *order {
                out.push(violation(
                    ViolationKind::SuspensionOrder,
                    &s.id,
                    format!("{name} has order {} but its image has order {}", order.render(p), got.render(p)),
                ));
            }
        }
    }
}
