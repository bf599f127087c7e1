use hp2_core::factdb::FactDb;
use hp2_core::local_algebra::{int_vector, FgModule, Presentation};
use hp2_core::sequence_engine::{
    boundary_cok_ker, consistency_checks, derive_direct, derive_pi, derive_with_audit, fibre_pi, snake_ladder_check,
    SequenceInstance, ShortExactRow, ViolationKind,
};

fn m(s: &str, p: u64) -> FgModule {
    FgModule::parse(s, p).unwrap()
}

#[test]
fn fibre_groups() {
    let db = FactDb::builtin();
    let (f, _) = fibre_pi(&db, 3, 17, 2).unwrap();
    assert_eq!(f.module(), m("Z/9", 3));
    let (f, _) = fibre_pi(&db, 2, 14, 2).unwrap();
    assert_eq!(f.module(), m("(Z/2)^2", 2));
    let (f, _) = fibre_pi(&db, 2, 15, 2).unwrap();
    assert_eq!(f.module(), m("(Z/2)^3+Z(2)", 2));
}

#[test]
fn boundary_examples() {
    let db = FactDb::builtin();
    let (cok, ker, _) = boundary_cok_ker(&db, 3, 16, 1).unwrap();
    assert_eq!((cok, ker), (m("Z/3", 3), m("0", 3)));
    let (_, ker, trace) = boundary_cok_ker(&db, 2, 9, 1).unwrap();
    assert_eq!(ker, m("Z(2)", 2));
    assert!(trace.render().contains("<8 iota_9>"), "{}", trace.render());
}

#[test]
fn derive_examples() {
    let db = FactDb::builtin();
    let cases = [
        (3, 11, 1, "Z/9"),
        (3, 11, 4, "Z/9+Z(3)"),
        (2, 11, 1, "Z/8"),
        (2, 15, 4, "Z(2)+Z/16+Z/2"),
        (3, 15, 8, "Z/27+Z(3)"),
        (3, 7, 1, "0"),
        (2, 8, 0, "Z/2"),
    ];
    for (p, r, k, want) in cases {
        let d = derive_pi(&db, p, r, k).unwrap();
        assert_eq!(d.unique(), Some(&m(want, p)), "p={p} r={r} k={k}\n{}", d.render_trace());
    }
}

#[test]
fn derive_row_eleven() {
    let db = FactDb::builtin();
    let row: Vec<String> = (1..=5).map(|k| derive_pi(&db, 2, 11, k).unwrap().unique().unwrap().render()).collect();
    assert_eq!(row, ["Z/8", "Z/8+Z/2", "Z/8+Z/4", "Z/8+Z/4+Z(2)", "Z/16+Z/4"]);
}

#[test]
fn every_table_derivation_is_exact() {
    let db = FactDb::builtin();
    let mut audited = 0;
    for p in [2, 3] {
        for r in 7..=15u32 {
            for k in 1..=r - 6 {
                let (_, instances) = derive_with_audit(&db, p, r, k).unwrap();
                for inst in &instances {
                    let v = consistency_checks(inst).unwrap();
                    assert!(v.is_empty(), "p={p} r={r} k={k}: {v:?}");
                    audited += 1;
                }
            }
        }
    }
    assert!(audited > 80, "only {audited} instances audited");
}

#[test]
fn corrupted_instance_is_caught() {
    let db = FactDb::builtin();
    let (_, instances) = derive_with_audit(&db, 2, 11, 3).unwrap();
    let mut inst = instances[0].clone();
    assert!(consistency_checks(&inst).unwrap().is_empty());
    // Send the lift of the kernel class somewhere outside the kernel.
    let last = inst.arrows[2].len() - 1;
    for x in inst.arrows[2][last].iter_mut() {
        *x = num_rational::BigRational::from_integer(1.into());
    }
    let v = consistency_checks(&inst).unwrap();
    assert!(!v.is_empty());
}

#[test]
fn zero_node_forces_injectivity() {
    let z4 = Presentation::of_module(&m("Z/4", 2));
    let zero = Presentation::new(2, vec![], vec![]).unwrap();
    let inst = SequenceInstance {
        template: "0 -> Z/4 -> Z/4 -> 0".into(),
        nodes: vec![zero.clone(), z4.clone(), z4, zero],
        arrows: vec![vec![], vec![int_vector(&[2])], vec![vec![]]],
    };
    let v = consistency_checks(&inst).unwrap();
    assert!(v.iter().any(|x| x.kind == ViolationKind::NotExact && x.position == 1), "{v:?}");
    assert!(v.iter().any(|x| x.kind == ViolationKind::NotExact && x.position == 2), "{v:?}");
}

fn ladder() -> (ShortExactRow, ShortExactRow) {
    let top = ShortExactRow {
        a: Presentation::of_module(&m("Z/8", 2)),
        b: Presentation::of_module(&m("Z/8+Z/4", 2)),
        c: Presentation::of_module(&m("Z/4", 2)),
        inc: vec![int_vector(&[1, 0])],
        proj: vec![int_vector(&[0]), int_vector(&[1])],
    };
    let bottom = ShortExactRow {
        a: Presentation::of_module(&m("Z/8+Z(2)", 2)),
        b: Presentation::of_module(&m("Z/8+Z/4+Z(2)", 2)),
        c: Presentation::of_module(&m("Z/4", 2)),
        inc: vec![int_vector(&[1, 0, 0]), int_vector(&[0, 0, 1])],
        proj: vec![int_vector(&[0]), int_vector(&[1]), int_vector(&[0])],
    };
    (top, bottom)
}

#[test]
fn snake_ladder_monomorphism() {
    let (top, bottom) = ladder();
    let alpha = vec![int_vector(&[1, 0])];
    let beta = vec![int_vector(&[1, 0, 0]), int_vector(&[0, 1, 0])];
    let gamma = vec![int_vector(&[1])];
    assert!(snake_ladder_check(&top, &bottom, &alpha, &beta, &gamma).unwrap().is_empty());
}

#[test]
fn snake_ladder_rejects_noncommuting_square() {
    let (top, bottom) = ladder();
    let alpha = vec![int_vector(&[1, 0])];
    let beta = vec![int_vector(&[1, 0, 0]), int_vector(&[0, 0, 0])];
    let gamma = vec![int_vector(&[1])];
    let v = snake_ladder_check(&top, &bottom, &alpha, &beta, &gamma).unwrap();
    assert!(!v.is_empty());
}

#[test]
fn stability_in_k() {
    let db = FactDb::builtin();
    for p in [2, 3] {
        for r in 7..=15u32 {
            let stable = derive_direct(&db, p, r, r - 6).unwrap().unique().cloned().unwrap();
            for k in r - 6..=r + 2 {
                let d = derive_direct(&db, p, r, k).unwrap();
                assert_eq!(d.unique(), Some(&stable), "p={p} r={r} k={k}");
            }
            assert_eq!(derive_pi(&db, p, r, r + 5).unwrap().unique(), Some(&stable));
        }
    }
}

#[test]
fn traces_are_deterministic() {
    let db = FactDb::builtin();
    for (p, r, k) in [(2, 15, 4), (3, 15, 4), (2, 13, 6)] {
        let a = derive_pi(&db, p, r, k).unwrap().render_trace();
        let b = derive_pi(&db, p, r, k).unwrap().render_trace();
        assert_eq!(a, b);
        for line in a.lines() {
            assert_eq!(line.split(" | ").count(), 5, "{line}");
        }
    }
}

#[test]
fn missing_group_is_named() {
    let db = FactDb::builtin();
    let err = derive_pi(&db, 2, 17, 2).unwrap_err();
    assert!(err.is_missing(), "{err}");
    assert!(err.to_string().contains("π_19(S^6)"), "{err}");
}
