//! Acceptance harness: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_RED` are reported as FAIL but do not fail the run; the
//! README explains each one. Any other FAIL, or a known-red criterion that starts
//! passing, makes the process exit nonzero.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hp2_core::cli::ExpectedTable;
use hp2_core::cw_topology::{classify, describe_summand, recognize, skeleton_of_pinch_fibre, smash_square_split, GradedModP};
use hp2_core::extensions::{brute_force_oracle, classify_extensions, closed_form_free_plus_cyclic, ExtensionProblem};
use hp2_core::factdb::{FactDb, Resolver};
use hp2_core::local_algebra::{p_power, snf, valuation, FgModule, LocalMatrix};
use num_rational::BigRational;
use num_traits::Zero;
use hp2_core::sequence_engine::{derive_pi, BranchResult, Outcome};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Wall-clock limits. Debug builds are slower than the targets assume, so these are
/// generous multiples of them.
const TABLE_LIMIT: Duration = Duration::from_secs(60);
const ORACLE_LIMIT: Duration = Duration::from_secs(30);
const SNF_SAMPLES: usize = 1000;
const SNF_MAX_DIM: usize = 6;
const SNF_MAX_ENTRY: i64 = 10_000;
const SNF_SEED: u64 = 0x5eed_0004;

/// (criterion, reason) for criteria that cannot go green with a truthful database.
const KNOWN_RED: &[(u32, &str)] = &[(
    1,
    "p=3 r=14 k=1: printed cell has Z/9, the encoded facts give cok ∂ = Z/3 and ker ∂ = 0",
)];

type Check = Result<String, String>;

fn m(s: &str, p: u64) -> FgModule {
    FgModule::parse(s, p).unwrap()
}

fn unique(db: &FactDb, p: u64, r: u32, k: u32) -> Result<FgModule, String> {
    let d = derive_pi(db, p, r, k).map_err(|e| format!("p={p} r={r} k={k}: {e}"))?;
    d.unique().cloned().ok_or_else(|| format!("p={p} r={r} k={k}: not unique"))
}

fn criterion_1() -> Check {
    let db = FactDb::builtin();
    let table = ExpectedTable::builtin();
    let start = Instant::now();
    let (mut cells, mut diffs) = (0, Vec::new());
    for r in table.rows() {
        for k in table.columns(r) {
            for p in [2, 3] {
                cells += 1;
                let want = table.component(p, r, k).unwrap();
                match unique(&db, p, r, k) {
                    Ok(got) if got == want => {}
                    Ok(got) => diffs.push(format!("p={p} r={r} k={k}: {} vs {}", got.render(), want.render())),
                    Err(e) => diffs.push(e),
                }
            }
        }
    }
    let t = start.elapsed();
    if t > TABLE_LIMIT {
        diffs.push(format!("took {t:?}"));
    }
    let summary = format!("{cells} components in {t:.2?}");
    if diffs.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}, {} differ: {}", diffs.len(), diffs.join("; ")))
    }
}

fn left_grid(p: u64) -> Vec<FgModule> {
    let mut out = vec![FgModule::zero(p)];
    for a in 1..=3 {
        out.push(FgModule::cyclic(p, a));
        out.push(FgModule::new(p, 1, vec![a]));
    }
    out
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let mut n = 0;
    for p in [2u64, 3] {
        for a in left_grid(p) {
            for c in 1..=3 {
                let prob = ExtensionProblem::new(a.clone(), FgModule::cyclic(p, c)).map_err(|e| e.to_string())?;
                let fast = classify_extensions(&prob).map_err(|e| e.to_string())?.modules();
                let slow = brute_force_oracle(&prob).map_err(|e| e.to_string())?.modules();
                if fast != slow {
                    return Err(format!("p={p} A={a} C=Z/{p}^{c}: {fast:?} vs {slow:?}"));
                }
                n += 1;
            }
        }
    }
    let t = start.elapsed();
    if t > ORACLE_LIMIT {
        return Err(format!("took {t:?}"));
    }
    Ok(format!("{n} problems agree in {t:.2?}"))
}

fn criterion_3() -> Check {
    for p in [2u64, 3] {
        for mm in 1..=3 {
            for n in 1..=3 {
                let prob = ExtensionProblem::new(FgModule::new(p, 1, vec![mm]), FgModule::cyclic(p, n)).map_err(|e| e.to_string())?;
                let slow = brute_force_oracle(&prob).map_err(|e| e.to_string())?.modules();
                let closed = closed_form_free_plus_cyclic(p, mm, n);
                if closed != slow {
                    return Err(format!("p={p} m={mm} n={n}"));
                }
            }
        }
    }
    Ok("18 cases agree".into())
}

fn int_det(a: &[Vec<i128>]) -> i128 {
    if a.is_empty() {
        return 1;
    }
    (0..a.len())
        .map(|j| {
            let minor: Vec<Vec<i128>> =
                a[1..].iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * a[0][j] * int_det(&minor)
        })
        .sum()
}

fn criterion_4() -> Check {
    let mut rng = StdRng::seed_from_u64(SNF_SEED);
    let mut square_checked = 0;
    for sample in 0..SNF_SAMPLES {
        let p = if rng.gen_bool(0.5) { 2 } else { 3 };
        let (rows, cols) = (rng.gen_range(1..=SNF_MAX_DIM), rng.gen_range(1..=SNF_MAX_DIM));
        let data: Vec<Vec<i64>> = (0..rows)
            .map(|_| {
                (0..cols)
                    .map(|_| match rng.gen_range(0..4) {
                        0 => 0,
                        1 => rng.gen_range(-20..=20) * (p as i64).pow(rng.gen_range(0..6)),
                        _ => rng.gen_range(-SNF_MAX_ENTRY..=SNF_MAX_ENTRY),
                    })
                    .map(|x: i64| x.clamp(-SNF_MAX_ENTRY, SNF_MAX_ENTRY))
                    .collect()
            })
            .collect();
        let mat = LocalMatrix::from_int_rows(p, cols, &data).map_err(|e| e.to_string())?;
        let s = snf(&mat);
        let fail = |what: &str| Err(format!("sample {sample} (p={p}, {rows}x{cols}): {what}"));
        if s.u.mul(&mat).mul(&s.v) != s.d {
            return fail("U·M·V != D");
        }
        if valuation(&s.u.determinant(), p) != Some(0) || valuation(&s.v.determinant(), p) != Some(0) {
            return fail("U or V is not invertible over Z(p)");
        }
        for i in 0..rows {
            for j in 0..cols {
                let want = match (i == j).then(|| s.exponents.get(i)).flatten() {
                    Some(&e) => p_power(p, e),
                    None => BigRational::zero(),
                };
                if *s.d.get(i, j) != want {
                    return fail("D is not diag(p^e) padded with zeros");
                }
            }
        }
        if s.exponents.windows(2).any(|w| w[0] > w[1]) {
            return fail("divisibility chain broken");
        }
        // Independent check on square matrices: total exponent is v_p(det M).
        if rows == cols {
            let wide: Vec<Vec<i128>> = data.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
            let det = int_det(&wide);
            let full = s.rank() == rows;
            if (det != 0) != full {
                return fail("rank disagrees with the integer determinant");
            }
            if det != 0 {
                let mut v = 0;
                let mut d = det;
                while d % p as i128 == 0 {
                    d /= p as i128;
                    v += 1;
                }
                if s.exponents.iter().sum::<u32>() != v {
                    return fail("exponent sum differs from v_p(det)");
                }
            }
            square_checked += 1;
        }
    }
    Ok(format!("{SNF_SAMPLES} matrices, {square_checked} square ones checked against v_p(det), seed {SNF_SEED:#x}"))
}

const SKELETA: &[(u64, u32, &str, bool)] = &[
    (2, 1, "sk_20(F_1) = S^5 ∨ S^13", true),
    (2, 2, "sk_23(F_2) = S^6 ∪_{2 nubar_6} e^15", false),
    (2, 3, "sk_26(F_3) = S^7 ∨ S^17", true),
    (2, 4, "sk_29(F_4) = S^8 ∪_{2 sigma_8 nu_15 - nu_8 sigma_11} e^19", false),
    (2, 5, "sk_32(F_5) = S^9 ∪_{nubar_9 nu_17} e^21", false),
    (2, 6, "sk_35(F_6) = S^10 ∪_{?P(nu_21)} e^23", false),
    (2, 7, "sk_38(F_7) = S^11 ∪_{?sigma_11 nu_18 nu_21} e^25", false),
    (2, 8, "sk_41(F_8) = S^12 ∪_{?P(nu_25)} e^27", false),
    (3, 1, "sk_20(F_1) = S^5 ∨ S^13", true),
    (3, 2, "sk_23(F_2) = S^6 ∪_{w_6 alpha1_11} e^15", false),
    (3, 3, "sk_26(F_3) = S^7 ∨ S^17", true),
    (3, 4, "sk_29(F_4) = S^8 ∪_{w_8 alpha1_15} e^19", false),
    (3, 5, "sk_32(F_5) = S^9 ∨ S^21", true),
    (3, 6, "sk_35(F_6) = S^10 ∪_{w_10 alpha1_19} e^23", false),
];

fn criterion_5() -> Check {
    let db = FactDb::builtin();
    for &(p, k, want, wedge) in SKELETA {
        let sk = skeleton_of_pinch_fibre(&Resolver::new(&db, p), k).map_err(|e| format!("p={p} k={k}: {e}"))?;
        let got = format!("sk_{}(F_{k}) = {}", sk.through_dim, sk.complex);
        if got != want || sk.is_wedge() != wedge {
            return Err(format!("p={p} k={k}: got `{got}` (wedge {})", sk.is_wedge()));
        }
    }
    Ok(format!("{} skeleta", SKELETA.len()))
}

fn criterion_6() -> Check {
    let db = FactDb::builtin();
    let mut checks = vec![(2, 11, 1, "Z/8"), (2, 15, 8, "Z/128+Z(2)"), (2, 15, 4, "Z(2)+Z/16+Z/2")];
    for k in [3, 5, 6, 7] {
        checks.push((3, 15, k, "Z/27"));
    }
    for &(p, r, k, want) in &checks {
        let got = unique(&db, p, r, k)?;
        if got != m(want, p) {
            return Err(format!("π_{}(Σ^{k}HP^2) at p={p}: {}", r + k, got.render()));
        }
    }
    Ok(format!("{} groups", checks.len()))
}

fn criterion_7() -> Check {
    let degrees = |g: &GradedModP| g.degrees();
    let h2 = smash_square_split(&GradedModP::quaternionic(2, 3).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    if degrees(&h2.plus) != [13] || degrees(&h2.minus) != [9, 13, 17] {
        return Err(format!("HP2 degrees {:?} / {:?}", degrees(&h2.plus), degrees(&h2.minus)));
    }
    if !(h2.minus.p1_nonzero_from(13) && h2.minus.p1_nonzero_from(17)) {
        return Err("HP2 minus part: P1 pattern".into());
    }
    if recognize(&h2.plus).as_deref() != Some("S^13") || recognize(&h2.minus).as_deref() != Some("Σ^5HP^3") {
        return Err("HP2 summands not recognized".into());
    }
    let h3 = smash_square_split(&GradedModP::quaternionic(3, 3).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    if recognize(&h3.plus).as_deref() != Some("Σ^9HP^3") {
        return Err(format!("HP3 plus part: {}", describe_summand(&h3.plus)));
    }
    if recognize(&h3.minus.truncated(13)).as_deref() != Some("Σ^5HP^2") {
        return Err(format!("HP3 minus part: {}", describe_summand(&h3.minus)));
    }
    Ok("HP2 = S^13 ∨ Σ^5HP^3, HP3 = Σ^9HP^3 ∨ Y with sk_13 Y = Σ^5HP^2".into())
}

fn criterion_8() -> Check {
    let db = FactDb::builtin();
    let c1 = classify(&db, 1, 3).map_err(|e| e.to_string())?;
    let c4 = classify(&db, 4, 3).map_err(|e| e.to_string())?;
    let counts = (c1.types.len(), c1.families.len(), c4.types.len(), c4.families.len());
    if counts != (7, 0, 7, 3) {
        return Err(format!("counts {counts:?}"));
    }
    Ok("k=1: 7 types; k=4: 7 sporadic + 3 families".into())
}

fn criterion_9() -> Check {
    let db = FactDb::builtin();
    let table = ExpectedTable::builtin();
    for p in [2, 3] {
        for r in 7..=15u32 {
            let bar = table.component(p, r, r - 5).unwrap();
            for k in r - 6..=r + 6 {
                let got = unique(&db, p, r, k)?;
                if got != bar {
                    return Err(format!("p={p} r={r} k={k}: {} vs stable {}", got.render(), bar.render()));
                }
            }
        }
    }
    Ok("r=7..15, k=r-6..r+6 constant and equal to the stable column".into())
}

fn criterion_10() -> Check {
    let db = FactDb::builtin_extended();
    for (k, want) in [(27, "(Z/2)^6"), (28, "(Z/2)^7"), (29, "(Z/2)^6")] {
        let got = unique(&db, 2, 36, k)?;
        if got != m(want, 2) {
            return Err(format!("π_{}(Σ^{k}HP^2): {}", 36 + k, got.render()));
        }
    }
    let d = derive_pi(&db, 2, 36, 11).map_err(|e| e.to_string())?;
    let Outcome::Ambiguous(branches) = &d.outcome else {
        return Err("π_47(Σ^11HP^2) was not ambiguous".into());
    };
    let mut labels: Vec<&str> = branches.iter().map(|b| b.label.as_str()).collect();
    labels.sort();
    let determined = branches.iter().any(|b| matches!(b.result, BranchResult::Determined(_)));
    if labels != ["hypothesis nuC2-Peps", "hypothesis nuC2-zero"] || determined {
        return Err(format!("branches {labels:?}"));
    }
    Ok("k=27,28,29 match; π_47(Σ^11HP^2) ambiguous with branches nuC2-Peps, nuC2-zero".into())
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Check); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut unexpected = 0;
    for (n, f) in criteria {
        let known = KNOWN_RED.iter().find(|(c, _)| *c == n);
        match (f(), known) {
            (Ok(msg), None) => println!("criterion {n:>2}: PASS  {msg}"),
            (Ok(msg), Some(_)) => {
                println!("criterion {n:>2}: PASS  {msg} (listed as known red; update KNOWN_RED)");
                unexpected += 1;
            }
            (Err(msg), Some((_, why))) => println!("criterion {n:>2}: FAIL  {msg} [known: {why}]"),
            (Err(msg), None) => {
                println!("criterion {n:>2}: FAIL  {msg}");
                unexpected += 1;
            }
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
