use cochain_core::catalog::sweep;
use cochain_core::field::Field;
use cochain_core::regularity::{inequality_sweep, Verdict};
use cochain_core::resolution::{DEFAULT_STAGES, DEFAULT_WINDOW};
use cochain_core::torsion::{detect_regime, double_duality_check, gamma, local_duality_check, Regime};

#[test]
fn inequalities_have_no_certified_violation() {
    for field in [Field::Rationals, Field::prime(7).unwrap()] {
        let reports = inequality_sweep(field, DEFAULT_STAGES, DEFAULT_WINDOW).unwrap();
        assert!(reports.len() >= 12);
        for r in &reports {
            let verdicts: Vec<Verdict> = r.checks.iter().map(|c| c.verdict).collect();
            println!("{} / {}: {:?} {}", r.algebra, r.module, verdicts, r.note);
            assert_eq!(r.violations(), 0, "{r:#?}");
        }
        let holds = reports.iter().flat_map(|r| &r.checks).filter(|c| c.verdict == Verdict::Holds).count();
        assert!(holds >= 24, "only {holds} checks certified");
    }
}

#[test]
fn duality_over_catalog() {
    for inst in sweep(Field::Rationals).unwrap() {
        let regime = detect_regime(&inst.algebra);
        for m in &inst.modules {
            let ld = local_duality_check(m, &regime, DEFAULT_STAGES, DEFAULT_WINDOW).unwrap();
            println!("local {} / {}: {:?}", inst.algebra.name(), m.name(), ld.agree);
            assert_ne!(ld.agree, Some(false), "{ld:?}");
            if matches!(regime, Regime::FiniteDimensional { .. }) {
                let g = gamma(m, &regime, DEFAULT_STAGES, DEFAULT_WINDOW).unwrap();
                assert_eq!(g.module.cohomology().dims, m.cohomology().dims);
                let dd = double_duality_check(m, &regime, DEFAULT_STAGES, DEFAULT_WINDOW).unwrap();
                assert_eq!(dd.agree, Some(true), "{} {}: {dd:?}", inst.algebra.name(), m.name());
            }
        }
    }
}

#[test]
fn gamma_is_idempotent_on_cohomology() {
    use cochain_core::catalog::{algebra, build_module, Family, ModuleSpec, SideSpec};
    for d in 1..=3 {
        let a = algebra(Family::Polynomial { d }, Field::Rationals).unwrap();
        let regime = detect_regime(&a);
        for spec in [ModuleSpec::CanonicalK { side: SideSpec::Left }, ModuleSpec::ConeOf { element: "t".into() }] {
            let m = build_module(&a, &spec).unwrap();
            let g = gamma(&m, &regime, DEFAULT_STAGES, DEFAULT_WINDOW).unwrap().module;
            let gg = gamma(&g, &regime, DEFAULT_STAGES, DEFAULT_WINDOW).unwrap().module;
            let w = g.certified().intersect(&gg.certified());
            println!("d={d} {}: {w} {:?} vs {:?}", m.name(), g.cohomology().dims_in(&w), gg.cohomology().dims_in(&w));
            assert!(w.degrees().count() >= 4, "window {w}");
            assert_eq!(g.cohomology().dims_in(&w), gg.cohomology().dims_in(&w));
        }
    }
}

#[test]
fn hom_from_free_recovers_bounded_modules() {
    use cochain_core::module::{DgModule, Side};
    use cochain_core::tensor_hom::brute_hom;
    for inst in sweep(Field::Rationals).unwrap() {
        if !matches!(detect_regime(&inst.algebra), Regime::FiniteDimensional { .. }) {
            continue;
        }
        let free = DgModule::free(inst.algebra.clone(), Side::Left);
        for m in &inst.modules {
            let h = brute_hom(&free, m).unwrap().module;
            let w = h.certified().intersect(&m.certified());
            assert_eq!(h.cohomology().dims_in(&w), m.cohomology().dims_in(&w), "{}", m.name());
        }
    }
}
