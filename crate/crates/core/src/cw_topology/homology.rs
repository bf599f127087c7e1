//! Mod-p homology with the dual Steenrod operation P¹, the homology of relative James
//! constructions, and the idempotent splitting of ΣX∧X at odd primes.

use std::collections::BTreeMap;
use std::fmt;

use super::CwError;

/// A graded F_p vector space with a basis and the dual operation P¹ (lowering degree
/// by 2(p−1)), stored as a sparse matrix on basis indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedModP {
    pub prime: u64,
    pub basis: Vec<(String, i32)>,
    pub p1: BTreeMap<usize, Vec<(usize, i64)>>,
}

impl GradedModP {
    pub fn new(prime: u64, basis: Vec<(String, i32)>) -> Self {
        GradedModP { prime, basis, p1: BTreeMap::new() }
    }

    /// Set P¹(from) = Σ c·to. Degrees must differ by 2(p−1).
    pub fn with_p1(mut self, from: &str, image: &[(&str, i64)]) -> Result<Self, CwError> {
        let i = self.index(from)?;
        let mut terms = Vec::new();
        for (name, c) in image {
            let j = self.index(name)?;
            if self.basis[i].1 - self.basis[j].1 != self.p1_shift() {
                return Err(CwError::Degree(format!("P1 {from} -> {name}")));
            }
            terms.push((j, *c));
        }
        self.p1.insert(i, self.reduce(terms));
        Ok(self)
    }

    /// H̃(ℍPⁿ; F_p) with classes in degrees 4, 8, …, 4n and P¹ dual to P¹(u^j) = j·u^{j+1}.
    /// Only meaningful at p = 3, where P¹ moves four degrees.
    pub fn quaternionic(n: usize, prime: u64) -> Result<Self, CwError> {
        const NAMES: [&str; 3] = ["x", "y", "z"];
        if n == 0 || n > NAMES.len() {
            return Err(CwError::Unsupported(format!("HP^{n}")));
        }
        let basis = (0..n).map(|i| (NAMES[i].to_string(), 4 * (i as i32 + 1))).collect();
        let mut g = GradedModP::new(prime, basis);
        if prime == 3 {
            for j in 1..n {
                g = g.with_p1(NAMES[j], &[(NAMES[j - 1], j as i64)])?;
            }
        }
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn degrees(&self) -> Vec<i32> {
        let mut d: Vec<i32> = self.basis.iter().map(|b| b.1).collect();
        d.sort();
        d
    }

    pub fn p1_shift(&self) -> i32 {
        2 * (self.prime as i32 - 1)
    }

    pub fn index(&self, name: &str) -> Result<usize, CwError> {
        self.basis.iter().position(|(n, _)| n == name).ok_or_else(|| CwError::UnknownClass(name.to_string()))
    }

    fn modp(&self, c: i64) -> i64 {
        c.rem_euclid(self.prime as i64)
    }

    /// Symmetric residue, so that −1 prints as −1 rather than p−1.
    fn signed(&self, c: i64) -> i64 {
        let c = self.modp(c);
        if 2 * c > self.prime as i64 {
            c - self.prime as i64
        } else {
            c
        }
    }

    fn reduce(&self, terms: Vec<(usize, i64)>) -> Vec<(usize, i64)> {
        let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
        for (j, c) in terms {
            *acc.entry(j).or_default() += c;
        }
        acc.into_iter().map(|(j, c)| (j, self.signed(c))).filter(|&(_, c)| c != 0).collect()
    }

    pub fn p1_of(&self, i: usize) -> &[(usize, i64)] {
        self.p1.get(&i).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Whether some class in degree `d` has nonzero P¹.
    pub fn p1_nonzero_from(&self, d: i32) -> bool {
        self.basis.iter().enumerate().any(|(i, b)| b.1 == d && !self.p1_of(i).is_empty())
    }

    /// The sub-object spanned by classes of degree at most `d`; closed under P¹.
    pub fn truncated(&self, d: i32) -> GradedModP {
        let keep: Vec<usize> = (0..self.dim()).filter(|&i| self.basis[i].1 <= d).collect();
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(a, &b)| (b, a)).collect();
        let basis = keep.iter().map(|&i| self.basis[i].clone()).collect();
        let p1 = keep
            .iter()
            .filter_map(|&i| {
                let t: Vec<_> = self.p1_of(i).iter().filter_map(|&(j, c)| pos.get(&j).map(|&j| (j, c))).collect();
                (!t.is_empty()).then(|| (pos[&i], t))
            })
            .collect();
        GradedModP { prime: self.prime, basis, p1 }
    }

    pub fn render_p1(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, (name, _)) in self.basis.iter().enumerate() {
            let img = self.p1_of(i);
            if img.is_empty() {
                continue;
            }
            let terms: Vec<String> = img
                .iter()
                .enumerate()
                .map(|(n, &(j, c))| {
                    let nm = &self.basis[j].0;
                    match (c, n) {
                        (1, 0) => nm.clone(),
                        (1, _) => format!("+ {nm}"),
                        (-1, 0) => format!("-{nm}"),
                        (-1, _) => format!("- {nm}"),
                        (c, 0) => format!("{c}{nm}"),
                        (c, _) if c < 0 => format!("- {}{nm}", -c),
                        (c, _) => format!("+ {c}{nm}"),
                    }
                })
                .collect();
            out.push(format!("P1 {name} = {}", terms.join(" ")));
        }
        out
    }
}

impl fmt::Display for GradedModP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cls: Vec<String> = self.basis.iter().map(|(n, d)| format!("{n}[{d}]")).collect();
        write!(f, "{{{}}}", cls.join(", "))?;
        for line in self.render_p1() {
            write!(f, "; {line}")?;
        }
        Ok(())
    }
}

/// H̃(J(X, A)) ≅ H̃(X) ⊗ T(H̃(A)) through `max_degree`. P¹ is not propagated.
pub fn james_homology(hx: &GradedModP, ha: &GradedModP, max_degree: i32) -> Result<GradedModP, CwError> {
    if hx.prime != ha.prime {
        return Err(CwError::Unsupported("mixed primes".into()));
    }
    if ha.basis.iter().any(|b| b.1 <= 0) {
        return Err(CwError::Degree("A must be connected".into()));
    }
    // Words in H̃(A), grown one letter at a time until they pass the cutoff.
    let mut words: Vec<(String, i32)> = vec![(String::new(), 0)];
    let mut frontier = words.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (w, d) in &frontier {
            for (a, da) in &ha.basis {
                if d + da <= max_degree {
                    next.push((format!("{w}{a}"), d + da));
                }
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    let mut basis = Vec::new();
    for (x, dx) in &hx.basis {
        for (w, dw) in &words {
            if dx + dw <= max_degree {
                let name = if w.is_empty() { x.clone() } else { format!("{x}|{w}") };
                basis.push((name, dx + dw));
            }
        }
    }
    basis.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    Ok(GradedModP::new(hx.prime, basis))
}

/// H̃(ΣX∧X) with the transposition, and its two idempotent summands.
#[derive(Clone, Debug)]
pub struct SymmetricSquare {
    pub underlying: GradedModP,
    /// Basis σ(a⊗b), ordered by (a, b).
    pub smash: GradedModP,
    pub plus: GradedModP,
    pub minus: GradedModP,
}

impl SymmetricSquare {
    /// The group-ring element (12) on σ(a⊗b). It is the graded swap with sign
    /// (−1)^{|a||b|} composed with −1 from the suspension coordinate; under this
    /// convention the quaternionic cases split with σ(xx) in the minus summand.
    pub fn transposition(&self, i: usize, j: usize) -> (usize, usize, i64) {
        let (da, db) = (self.underlying.basis[i].1, self.underlying.basis[j].1);
        let koszul = if (da * db) % 2 == 0 { 1 } else { -1 };
        (j, i, -koszul)
    }
}

/// Split H̃(ΣX∧X) by the idempotents (1 ± (12))/2. Requires an odd prime.
pub fn smash_square_split(hx: &GradedModP) -> Result<SymmetricSquare, CwError> {
    let p = hx.prime;
    if p == 2 {
        return Err(CwError::EvenPrime);
    }
    let n = hx.dim();
    let idx = |i: usize, j: usize| i * n + j;
    let mut smash_basis = Vec::with_capacity(n * n);
    for (a, da) in &hx.basis {
        for (b, db) in &hx.basis {
            smash_basis.push((format!("σ({a}{b})"), da + db + 1));
        }
    }
    let mut smash = GradedModP::new(p, smash_basis);
    // Cartan formula; σ commutes with P¹.
    for i in 0..n {
        for j in 0..n {
            let mut terms = Vec::new();
            for &(a2, c) in hx.p1_of(i) {
                terms.push((idx(a2, j), c));
            }
            for &(b2, c) in hx.p1_of(j) {
                terms.push((idx(i, b2), c));
            }
            let t = smash.reduce(terms);
            if !t.is_empty() {
                smash.p1.insert(idx(i, j), t);
            }
        }
    }
    let mut square = SymmetricSquare { underlying: hx.clone(), smash, plus: GradedModP::new(p, vec![]), minus: GradedModP::new(p, vec![]) };
    square.plus = idempotent_image(&square, 1)?;
    square.minus = idempotent_image(&square, -1)?;
    Ok(square)
}

fn idempotent_image(sq: &SymmetricSquare, eps: i64) -> Result<GradedModP, CwError> {
    let hx = &sq.underlying;
    let n = hx.dim();
    let p = hx.prime;
    let idx = |i: usize, j: usize| i * n + j;
    // Image vectors of e_{ij} ± (12)e_{ij} for i ≤ j; their supports are disjoint, so the
    // nonzero ones form a basis whose leading coordinate is e_{ij}.
    let mut leads = Vec::new();
    let mut basis = Vec::new();
    for i in 0..n {
        for j in i..n {
            let (_, _, c) = sq.transposition(i, j);
            let sign = eps * c;
            let (a, b) = (&hx.basis[i].0, &hx.basis[j].0);
            let d = hx.basis[i].1 + hx.basis[j].1 + 1;
            if i == j {
                if sign == 1 {
                    leads.push((idx(i, i), None));
                    basis.push((format!("σ({a}{a})"), d));
                }
            } else {
                leads.push((idx(i, j), Some((idx(j, i), sign))));
                let op = if sign == 1 { '+' } else { '−' };
                basis.push((format!("σ({a}{b}{op}{b}{a})"), d));
            }
        }
    }
    let mut part = GradedModP::new(p, basis);
    let position: BTreeMap<usize, usize> = leads.iter().enumerate().map(|(k, (l, _))| (*l, k)).collect();
    for (k, (lead, partner)) in leads.iter().enumerate() {
        let mut v: BTreeMap<usize, i64> = BTreeMap::new();
        for &(t, c) in sq.smash.p1_of(*lead) {
            *v.entry(t).or_default() += c;
        }
        if let Some((other, s)) = partner {
            for &(t, c) in sq.smash.p1_of(*other) {
                *v.entry(t).or_default() += s * c;
            }
        }
        v.retain(|_, c| c.rem_euclid(p as i64) != 0);
        let mut terms = Vec::new();
        for (&t, &c) in &v {
            if let Some(&pos) = position.get(&t) {
                terms.push((pos, c));
            }
        }
        // Check the image really lies in the summand by re-expanding.
        let mut back: BTreeMap<usize, i64> = BTreeMap::new();
        for &(pos, c) in &terms {
            let (l, partner) = leads[pos];
            match partner {
                None => *back.entry(l).or_default() += c,
                Some((o, s)) => {
                    *back.entry(l).or_default() += c;
                    *back.entry(o).or_default() += s * c;
                }
            }
        }
        back.retain(|_, c| c.rem_euclid(p as i64) != 0);
        let same = back.len() == v.len() && back.iter().all(|(t, c)| v.get(t).is_some_and(|d| (c - d).rem_euclid(p as i64) == 0));
        if !same {
            return Err(CwError::NotInvariant(part.basis[k].0.clone()));
        }
        let t = part.reduce(terms);
        if !t.is_empty() {
            part.p1.insert(k, t);
        }
    }
    Ok(part)
}

/// Homotopy type read off from homology and P¹, for complexes with cells four apart at
/// p = 3: S^d, Σ^{d−4}ℍP² (P¹ nonzero), Σ^{d−4}ℍP³ (P¹ nonzero twice; requires
/// d−4 ≠ 4, where a free class in π_15 of Σ⁴ℍP² gives other complexes with the same
/// cohomology). Wedges of spheres and pieces are not attempted.
pub fn recognize(part: &GradedModP) -> Option<String> {
    let degs = part.degrees();
    if degs.is_empty() {
        return Some("*".into());
    }
    let shift = part.p1_shift();
    let chain = degs.windows(2).all(|w| w[1] - w[0] == shift);
    if !chain {
        return None;
    }
    let d = degs[0];
    let linked = degs[1..].iter().all(|&e| part.p1_nonzero_from(e));
    match (degs.len(), linked) {
        (1, _) => Some(format!("S^{d}")),
        (2, true) => Some(suspended("HP^2", d - 4)),
        (2, false) => Some(format!("S^{d} ∨ S^{}", d + shift)),
        (3, true) if d - 4 != 4 && part.prime == 3 => Some(suspended("HP^3", d - 4)),
        _ => None,
    }
}

/// `Σ^k X` with the exponent dropped for k = 1 and the Σ dropped for k = 0.
pub fn suspended(space: &str, k: i32) -> String {
    match k {
        0 => space.to_string(),
        1 => format!("Σ{space}"),
        _ => format!("Σ^{k}{space}"),
    }
}

/// A description of one summand: its recognized type, or the cell dimensions plus the
/// largest skeleton that is recognized.
pub fn describe_summand(part: &GradedModP) -> String {
    if let Some(t) = recognize(part) {
        return t;
    }
    let degs = part.degrees();
    let dims: Vec<String> = degs.iter().map(|d| d.to_string()).collect();
    let mut best = None;
    let mut distinct = degs.clone();
    distinct.dedup();
    for d in distinct {
        match recognize(&part.truncated(d)) {
            Some(t) if part.truncated(d).dim() > 1 => best = Some((d, t)),
            Some(_) => {}
            None => break,
        }
    }
    match best {
        Some((d, t)) => format!("{}-cell complex (cells {}) with sk_{d} = {t}", degs.len(), dims.join(", ")),
        None => format!("{}-cell complex (cells {})", degs.len(), dims.join(", ")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(g: &GradedModP) -> Vec<(String, i32)> {
        g.basis.clone()
    }

    #[test]
    fn hp2_splitting() {
        let hp2 = GradedModP::quaternionic(2, 3).unwrap();
        let sq = smash_square_split(&hp2).unwrap();
        assert_eq!(names(&sq.plus), vec![("σ(xy−yx)".to_string(), 13)]);
        assert_eq!(sq.minus.degrees(), vec![9, 13, 17]);
        let m = &sq.minus;
        let yy = m.index("σ(yy)").unwrap();
        let sym = m.index("σ(xy+yx)").unwrap();
        let xx = m.index("σ(xx)").unwrap();
        assert_eq!(m.p1_of(yy), &[(sym, 1)]);
        // 2σ(xx) = −σ(xx) mod 3
        assert_eq!(m.p1_of(sym), &[(xx, -1)]);
        assert_eq!(recognize(&sq.plus).unwrap(), "S^13");
        assert_eq!(recognize(&sq.minus).unwrap(), "Σ^5HP^3");
    }

    #[test]
    fn hp3_splitting() {
        let hp3 = GradedModP::quaternionic(3, 3).unwrap();
        let sq = smash_square_split(&hp3).unwrap();
        assert_eq!(sq.plus.degrees(), vec![13, 17, 21]);
        let p = &sq.plus;
        let yz = p.index("σ(yz−zy)").unwrap();
        let xz = p.index("σ(xz−zx)").unwrap();
        // σ(zy−yz) = −σ(yz−zy), and its P¹ is −σ(xz−zx).
        assert_eq!(p.p1_of(yz), &[(xz, 1)]);
        assert_eq!(recognize(p).unwrap(), "Σ^9HP^3");
        assert_eq!(sq.minus.degrees(), vec![9, 13, 17, 17, 21, 25]);
        assert!(recognize(&sq.minus).is_none());
        assert_eq!(recognize(&sq.minus.truncated(13)).unwrap(), "Σ^5HP^2");
        assert!(describe_summand(&sq.minus).ends_with("sk_13 = Σ^5HP^2"));
    }

    #[test]
    fn parts_add_up() {
        for n in 1..=3 {
            let h = GradedModP::quaternionic(n, 3).unwrap();
            let sq = smash_square_split(&h).unwrap();
            let mut all = sq.plus.degrees();
            all.extend(sq.minus.degrees());
            all.sort();
            assert_eq!(all, sq.smash.degrees());
        }
    }

    #[test]
    fn transposition_is_involution() {
        let h = GradedModP::new(5, vec![("a".into(), 3), ("b".into(), 4), ("c".into(), 7)]);
        let sq = smash_square_split(&h).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let (a, b, s) = sq.transposition(i, j);
                let (c, d, t) = sq.transposition(a, b);
                assert_eq!((c, d, s * t), (i, j, 1));
            }
        }
    }

    #[test]
    fn single_odd_class() {
        let h = GradedModP::new(3, vec![("u".into(), 5)]);
        let sq = smash_square_split(&h).unwrap();
        // Under the quaternionic convention for (12) the odd square is fixed.
        assert_eq!(sq.plus.degrees(), vec![11]);
        assert!(sq.minus.basis.is_empty());
    }

    #[test]
    fn even_prime_rejected() {
        let h = GradedModP::quaternionic(2, 2).unwrap();
        assert!(matches!(smash_square_split(&h), Err(CwError::EvenPrime)));
    }

    #[test]
    fn james_degrees_match_cells() {
        for n in 2..=12 {
            for m in n..=12 {
                let hx = GradedModP::new(3, vec![("y".into(), n)]);
                let ha = GradedModP::new(3, vec![("a".into(), m)]);
                let j = james_homology(&hx, &ha, 60).unwrap();
                let cells = super::super::fibre_cell_dims(n as u32, m as u32).unwrap().up_to(60);
                assert_eq!(j.degrees(), cells.iter().map(|&d| d as i32).collect::<Vec<_>>());
            }
        }
        let hx = GradedModP::quaternionic(2, 3).unwrap();
        let point = GradedModP::new(3, vec![]);
        assert_eq!(james_homology(&hx, &point, 40).unwrap().degrees(), vec![4, 8]);
    }
}
