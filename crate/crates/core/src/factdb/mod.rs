//! Versioned database of p-local homotopy groups of spheres and the composition,
//! Whitehead, bracket and order facts the derivations consume.

mod bracket;
mod resolve;
pub mod schema;
mod validate;
pub mod word;

pub use bracket::{bracket_indeterminacy, BracketIndeterminacy};
pub use resolve::{Resolution, Resolver};
pub use schema::{
    BracketFact, CompositionFact, Document, GeneratorSpec, GoalFact, GoalScope, OrderFact, OrderSpec,
    SuspensionFact,
};
pub use validate::{validate_db, validate_with_dependencies, Violation, ViolationKind};
pub use word::{Atom, Expr, Word};

use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use thiserror::Error;

use crate::local_algebra::{pow_p, FgModule, Order, Presentation, Vector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FactError {
    #[error("no entry for π_{degree}(S^{sphere}) at p={prime}")]
    Missing { prime: u64, sphere: i64, degree: i64 },
    #[error("syntax: {0}")]
    Syntax(String),
    #[error("{file}:{line}: {message}")]
    Parse { file: String, line: usize, message: String },
    #[error("duplicate entry for π_{degree}(S^{sphere}) at p={prime}")]
    Duplicate { prime: u64, sphere: u32, degree: u32 },
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
    #[error("generator `{name}` not found in π_{degree}(S^{sphere})")]
    UnknownGenerator { name: String, sphere: i64, degree: i64 },
    #[error("cannot determine the sphere and degree of `{0}`")]
    Untyped(String),
}

/// One sphere homotopy group with named cyclic generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupEntry {
    pub prime: u64,
    pub sphere: i64,
    pub degree: i64,
    pub generators: Vec<(String, Order)>,
    /// Where the entry came from: a stable document, an explicit one, or connectivity.
    pub source: String,
    /// Only a subgroup is recorded; see [`Document::partial`].
    pub partial: bool,
}

impl GroupEntry {
    pub fn module(&self) -> FgModule {
        let free = self.generators.iter().filter(|(_, o)| *o == Order::Infinite).count();
        let torsion = self
            .generators
            .iter()
            .filter_map(|(_, o)| match o {
                Order::Finite(e) => Some(*e),
                Order::Infinite => None,
            })
            .collect();
        FgModule::new(self.prime, free, torsion)
    }

    pub fn is_zero(&self) -> bool {
        self.module().is_zero()
    }

    pub fn names(&self) -> Vec<String> {
        self.generators.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        let target = Word::parse(name).ok()?.normalized();
        self.generators
            .iter()
            .position(|(n, _)| Word::parse(n).map(|w| w.normalized() == target).unwrap_or(false))
    }

    /// Generators with their cyclic relations.
    pub fn presentation(&self) -> Presentation {
        let n = self.generators.len();
        let mut rels = Vec::new();
        for (i, (_, o)) in self.generators.iter().enumerate() {
            if let Order::Finite(e) = o {
                let mut r = crate::local_algebra::zero_vector(n);
                r[i] = num_rational::BigRational::from_integer(pow_p(self.prime, *e));
                rels.push(r);
            }
        }
        Presentation::new(self.prime, self.names(), rels).expect("integral relations")
    }

    pub fn render(&self) -> String {
        if self.generators.is_empty() {
            return "0".to_string();
        }
        self.generators
            .iter()
            .map(|(n, o)| match o {
                Order::Infinite => format!("Z({})<{}>", self.prime, n),
                Order::Finite(e) => format!("Z/{}<{}>", pow_p(self.prime, *e), n),
            })
            .collect::<Vec<_>>()
            .join("+")
    }
}

/// A loaded fact database: documents grouped by kind, plus the version hash of the sources.
#[derive(Clone, Debug, Default)]
pub struct FactDb {
    entries: BTreeMap<(u64, u32, u32), Document>,
    stable: Vec<Document>,
    compositions: Vec<CompositionFact>,
    suspensions: Vec<(u64, SuspensionFact)>,
    brackets: Vec<(u64, BracketFact)>,
    orders: Vec<(u64, OrderFact)>,
    goals: Vec<(u64, GoalFact)>,
    composition_primes: Vec<u64>,
    version: String,
    files: Vec<String>,
}

const BUILTIN: &[(&str, &str)] = &[
    ("spheres-2.jsonl", include_str!("../../data/spheres-2.jsonl")),
    ("spheres-3.jsonl", include_str!("../../data/spheres-3.jsonl")),
    ("compositions-2.jsonl", include_str!("../../data/compositions-2.jsonl")),
    ("compositions-3.jsonl", include_str!("../../data/compositions-3.jsonl")),
    ("goals-2.jsonl", include_str!("../../data/goals-2.jsonl")),
    ("goals-3.jsonl", include_str!("../../data/goals-3.jsonl")),
];

const BUILTIN_EXTENDED: &[(&str, &str)] = &[("extended-2.jsonl", include_str!("../../data/extended/extended-2.jsonl"))];

impl FactDb {
    /// The database shipped with the crate.
    pub fn builtin() -> FactDb {
        Self::from_sources(BUILTIN.iter().map(|(n, s)| (n.to_string(), s.to_string())).collect())
            .expect("shipped database parses")
    }

    /// The shipped database together with the optional extended file.
    pub fn builtin_extended() -> FactDb {
        Self::from_sources(
            BUILTIN
                .iter()
                .chain(BUILTIN_EXTENDED)
                .map(|(n, s)| (n.to_string(), s.to_string()))
                .collect(),
        )
        .expect("shipped database parses")
    }

    /// Load every `*.jsonl` file in a directory; `extended/` is read only on request.
    pub fn load_dir(dir: &Path, include_extended: bool) -> Result<FactDb, FactError> {
        let mut sources = read_jsonl_files(dir)?;
        if include_extended {
            let ext = dir.join("extended");
            if ext.is_dir() {
                sources.extend(read_jsonl_files(&ext)?);
            }
        }
        Self::from_sources(sources)
    }

    pub fn from_sources(mut sources: Vec<(String, String)>) -> Result<FactDb, FactError> {
        sources.sort();
        let mut db = FactDb::default();
        let mut hasher = Sha256::new();
        for (name, text) in &sources {
            hasher.update(name.as_bytes());
            hasher.update([0u8]);
            for (i, line) in text.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let doc = schema::parse_line(line).map_err(|e| FactError::Parse {
                    file: name.clone(),
                    line: i + 1,
                    message: e.to_string(),
                })?;
                hasher.update(schema::to_line(&doc).as_bytes());
                hasher.update(*b"\n");
                db.add(doc)?;
            }
            db.files.push(name.clone());
        }
        db.version = hex_prefix(&hasher.finalize());
        Ok(db)
    }

    fn add(&mut self, doc: Document) -> Result<(), FactError> {
        let p = doc.prime;
        for c in &doc.compositions {
            self.compositions.push(c.clone());
            self.composition_primes.push(p);
        }
        self.suspensions.extend(doc.suspensions.iter().map(|s| (p, s.clone())));
        self.brackets.extend(doc.brackets.iter().map(|b| (p, b.clone())));
        self.orders.extend(doc.orders.iter().map(|o| (p, o.clone())));
        self.goals.extend(doc.goals.iter().map(|g| (p, g.clone())));
        if let (Some(n), Some(m)) = (doc.sphere, doc.degree) {
            if doc.stable {
                self.stable.push(doc);
            } else if self.entries.insert((p, n, m), doc).is_some() {
                return Err(FactError::Duplicate { prime: p, sphere: n, degree: m });
            }
        }
        Ok(())
    }

    /// Short content hash identifying this database version.
    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    /// π_m(Sⁿ) at p. Stable documents cover every sphere above their starting one;
    /// below the bottom cell the group is zero. Anything else must be present.
    pub fn lookup_group(&self, prime: u64, n: i64, m: i64) -> Result<GroupEntry, FactError> {
        let missing = FactError::Missing { prime, sphere: n, degree: m };
        if n < 1 {
            return Err(missing);
        }
        if m < n {
            return Ok(GroupEntry { prime, sphere: n, degree: m, generators: vec![], source: "connectivity".into(), partial: false });
        }
        if let (Ok(nu), Ok(mu)) = (u32::try_from(n), u32::try_from(m)) {
            if let Some(doc) = self.entries.get(&(prime, nu, mu)) {
                return entry_from_doc(doc, n, m, false);
            }
        }
        let stem = m - n;
        for doc in &self.stable {
            let (s, d) = (doc.sphere.unwrap_or(0) as i64, doc.degree.unwrap_or(0) as i64);
            if doc.prime == prime && d - s == stem && n >= s {
                return entry_from_doc(doc, n, m, true);
            }
        }
        Err(missing)
    }

    /// Composition facts at this prime, in file order.
    pub fn compositions(&self, prime: u64) -> impl Iterator<Item = &CompositionFact> {
        self.compositions
            .iter()
            .zip(&self.composition_primes)
            .filter(move |(_, &p)| p == prime)
            .map(|(c, _)| c)
    }

    pub fn suspensions(&self, prime: u64) -> impl Iterator<Item = &SuspensionFact> {
        self.suspensions.iter().filter(move |(p, _)| *p == prime).map(|(_, s)| s)
    }

    pub fn brackets(&self, prime: u64) -> impl Iterator<Item = &BracketFact> {
        self.brackets.iter().filter(move |(p, _)| *p == prime).map(|(_, b)| b)
    }

    /// Order facts scoped to the goal (r, k), honoring the active hypothesis.
    pub fn order_facts(&self, prime: u64, r: u32, k: u32, hypothesis: Option<&str>) -> Vec<&OrderFact> {
        self.orders
            .iter()
            .filter(|(p, o)| {
                *p == prime
                    && o.scope.as_ref().is_some_and(|s| s.covers(r, k))
                    && hypothesis_ok(o.hypothesis.as_deref(), hypothesis)
            })
            .map(|(_, o)| o)
            .collect()
    }

    pub fn all_order_facts(&self, prime: u64) -> impl Iterator<Item = &OrderFact> {
        self.orders.iter().filter(move |(p, _)| *p == prime).map(|(_, o)| o)
    }

    /// Goal facts of one kind scoped to (r, k), honoring the active hypothesis.
    pub fn goal_facts(&self, prime: u64, r: u32, k: u32, kind: &str, hypothesis: Option<&str>) -> Vec<&GoalFact> {
        self.goals
            .iter()
            .filter(|(p, g)| {
                *p == prime && g.kind == kind && g.scope.covers(r, k) && hypothesis_ok(g.hypothesis.as_deref(), hypothesis)
            })
            .map(|(_, g)| g)
            .collect()
    }

    pub fn all_goal_facts(&self, prime: u64) -> impl Iterator<Item = &GoalFact> {
        self.goals.iter().filter(move |(p, _)| *p == prime).map(|(_, g)| g)
    }

    /// Every hypothesis label mentioned anywhere, sorted.
    pub fn hypotheses(&self) -> Vec<String> {
        let mut hs: Vec<String> = self
            .compositions
            .iter()
            .filter_map(|c| c.hypothesis.clone())
            .chain(self.orders.iter().filter_map(|(_, o)| o.hypothesis.clone()))
            .chain(self.goals.iter().filter_map(|(_, g)| g.hypothesis.clone()))
            .collect();
        hs.sort();
        hs.dedup();
        hs
    }

    /// Explicit (non-stable) entries, for validation and listing.
    pub fn explicit_entries(&self) -> impl Iterator<Item = &Document> {
        self.entries.values()
    }

    pub fn stable_entries(&self) -> &[Document] {
        &self.stable
    }

    /// The subset of the requested groups that the database cannot supply.
    pub fn missing(&self, wanted: &[(u64, i64, i64)]) -> Vec<(u64, i64, i64)> {
        wanted.iter().copied().filter(|&(p, n, m)| self.lookup_group(p, n, m).is_err()).collect()
    }
}

pub(crate) fn hypothesis_ok(fact: Option<&str>, active: Option<&str>) -> bool {
    match fact {
        None => true,
        Some(h) => active == Some(h),
    }
}

fn entry_from_doc(doc: &Document, n: i64, m: i64, stable: bool) -> Result<GroupEntry, FactError> {
    let mut generators = Vec::with_capacity(doc.generators.len());
    for g in &doc.generators {
        let order = g.order.to_order(doc.prime).ok_or_else(|| FactError::Syntax(format!("bad order for {}", g.name)))?;
        let name = if stable { word::instantiate(&g.name, n) } else { g.name.clone() };
        generators.push((name, order));
    }
    let source = if stable {
        format!("stable from S^{}", doc.sphere.unwrap_or(0))
    } else {
        "explicit".to_string()
    };
    Ok(GroupEntry { prime: doc.prime, sphere: n, degree: m, generators, source, partial: doc.partial })
}

fn read_jsonl_files(dir: &Path) -> Result<Vec<(String, String)>, FactError> {
    let io = |e: std::io::Error| FactError::Io { path: dir.display().to_string(), message: e.to_string() };
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.extension().and_then(|e| e.to_str()) == Some("jsonl") {
            let text = fs::read_to_string(&path).map_err(io)?;
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_string();
            out.push((name, text));
        }
    }
    Ok(out)
}

fn hex_prefix(bytes: &[u8]) -> String {
    bytes.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Coordinates of a resolved value, or the zero vector for an empty group.
pub type Coordinates = Vector;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_loads() {
        let db = FactDb::builtin();
        assert_eq!(db.version().len(), 16);
        let e = db.lookup_group(3, 5, 8).unwrap();
        assert_eq!(e.module(), FgModule::cyclic(3, 1));
        assert_eq!(e.names(), vec!["alpha1_5".to_string()]);
    }

    #[test]
    fn identity_groups() {
        let db = FactDb::builtin();
        for n in 2..20 {
            assert_eq!(db.lookup_group(2, n, n).unwrap().module(), FgModule::free(2, 1));
        }
    }

    #[test]
    fn missing_is_reported_not_zero() {
        let db = FactDb::builtin();
        assert!(matches!(db.lookup_group(2, 4, 40), Err(FactError::Missing { .. })));
    }

    #[test]
    fn below_connectivity_is_zero() {
        let db = FactDb::builtin();
        assert!(db.lookup_group(2, 9, 5).unwrap().is_zero());
    }

    #[test]
    fn shipped_database_validates() {
        for db in [FactDb::builtin(), FactDb::builtin_extended()] {
            let v = validate_db(&db);
            assert!(v.is_empty(), "{v:#?}");
        }
    }

    #[test]
    fn shipped_lines_are_normalized() {
        for (name, text) in BUILTIN.iter().chain(BUILTIN_EXTENDED) {
            for line in text.lines() {
                let doc = schema::parse_line(line).unwrap();
                assert_eq!(schema::to_line(&doc), line, "{name}");
            }
        }
    }

    #[test]
    fn nu6_eta9_vanishes() {
        let db = FactDb::builtin();
        let r = Resolver::new(&db, 2);
        let (e, symbolic) = r.compose(&Expr::parse("nu_6").unwrap(), &Expr::parse("eta_9").unwrap()).unwrap();
        assert!(!symbolic);
        assert!(e.is_zero());
    }

    #[test]
    fn attaching_map_for_k4() {
        let db = FactDb::builtin();
        let r = Resolver::new(&db, 2);
        let (e, _) = r.compose(&Expr::parse("w_8").unwrap(), &Expr::parse("nu_15").unwrap()).unwrap();
        assert_eq!(e.render(), "2 sigma_8 nu_15 - nu_8 sigma_11");
    }

    #[test]
    fn coefficient_killed_by_suspension_factor() {
        let db = FactDb::builtin();
        let r = Resolver::new(&db, 2);
        let e = Expr::parse("2 nubar_6 eta_14 eta_15").unwrap();
        assert_eq!(r.resolve(&e, 6, 16).unwrap(), Resolution::Value(crate::local_algebra::zero_vector(2)));
    }

    #[test]
    fn missing_group_but_known_zero() {
        let db = FactDb::builtin();
        let r = Resolver::new(&db, 2);
        assert_eq!(r.resolve(&Expr::parse("w_7 nu_13 sigma_16").unwrap(), 7, 23).unwrap(), Resolution::Zero);
        assert!(r.resolve(&Expr::parse("w_10 nu_19").unwrap(), 10, 22).is_err());
        assert_eq!(r.rewrite(&Expr::parse("w_10 nu_19").unwrap()).render(), "P(nu_21)");
    }

    #[test]
    fn bracket_indeterminacy_on_s7() {
        let db = FactDb::builtin();
        let r = Resolver::new(&db, 2);
        let ind = bracket_indeterminacy(&r, "nu_7", "2 nu_10", "4 iota_13", 0).unwrap();
        assert_eq!(ind.subgroup, FgModule::cyclic(2, 1));
        assert_eq!(ind.render(&r), "Z/2<4 sigma'_7>");
    }

    #[test]
    fn bracket_on_s5_is_spanned_by_twice_sigma_triple_prime() {
        let db = FactDb::builtin();
        let r = Resolver::new(&db, 2);
        let ind = bracket_indeterminacy(&r, "nu_5", "2 nu_8", "4 iota_11", 0).unwrap();
        assert!(ind.subgroup.is_zero(), "{}", ind.render(&r));
    }

    #[test]
    fn composition_outside_zero_group_is_flagged() {
        let bad = r#"{"prime":2,"sphere":null,"degree":null,"generators":[],"compositions":[{"id":"bad","word":"nu_6 eta_9","spheres":[0,null],"values":["eps_6"],"qualifier":"exact","citation":"test"}],"suspensions":[],"brackets":[],"orders":[]}"#;
        let mut sources: Vec<(String, String)> = BUILTIN.iter().map(|(n, s)| (n.to_string(), s.to_string())).collect();
        sources.push(("bad.jsonl".into(), bad.into()));
        let db = FactDb::from_sources(sources).unwrap();
        let v = validate_db(&db);
        assert!(v.iter().any(|x| x.kind == ViolationKind::ResultOutsideGroup && x.location == "bad"), "{v:?}");
    }

    #[test]
    fn missing_dependency_is_named() {
        let db = FactDb::builtin();
        let v = validate_with_dependencies(&db, &[(2, 4, 40)]);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::MissingDependency);
        assert_eq!(v[0].location, "p=2 pi_40(S^4)");
    }
}
