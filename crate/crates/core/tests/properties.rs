use std::collections::BTreeMap;

use cochain_core::catalog::{algebra, build_module, Family, FiniteTable, ModuleSpec, SideSpec};
use cochain_core::field::{Field, Scalar};
use cochain_core::linalg::{Matrix, Quotient};
use cochain_core::resolution::{resolve, DEFAULT_WINDOW};
use cochain_core::window::Window;
use proptest::prelude::*;

fn field_strategy() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::Rationals), Just(Field::prime(2).unwrap()), Just(Field::prime(7).unwrap())]
}

fn matrix_strategy() -> impl Strategy<Value = (Field, Vec<Vec<i64>>)> {
    (field_strategy(), 1usize..6, 1usize..6).prop_flat_map(|(f, r, c)| {
        (Just(f), prop::collection::vec(prop::collection::vec(-3i64..4, c), r))
    })
}

fn to_matrix(f: Field, rows: &[Vec<i64>]) -> Matrix {
    let rows: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|&x| f.from_i64(x)).collect()).collect();
    Matrix::from_rows(f, rows).unwrap()
}

fn family_strategy() -> impl Strategy<Value = Family> {
    prop_oneof![
        Just(Family::SquareZero),
        Just(Family::ExteriorOnOne { d: 3 }),
        Just(Family::FiniteDimTable(FiniteTable::Acyclic)),
        Just(Family::FiniteDimTable(FiniteTable::TruncatedPolynomial { degree: 2, height: 3 })),
        (1i32..4).prop_map(|d| Family::Polynomial { d }),
    ]
}

fn spec_strategy() -> impl Strategy<Value = ModuleSpec> {
    prop_oneof![
        Just(ModuleSpec::CanonicalK { side: SideSpec::Left }),
        Just(ModuleSpec::Free { side: SideSpec::Left }),
        (-2i32..3).prop_map(|n| ModuleSpec::Suspended { n }),
        (1i32..3).prop_map(|l| ModuleSpec::Truncated { l }),
    ]
}

fn shift(dims: &BTreeMap<i32, usize>, by: i32) -> BTreeMap<i32, usize> {
    dims.iter().map(|(&j, &n)| (j - by, n)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_plus_nullity((f, rows) in matrix_strategy()) {
        let m = to_matrix(f, &rows);
        prop_assert_eq!(m.rank() + m.kernel().len(), m.cols());
        for v in m.kernel() {
            prop_assert!(m.apply(&v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn rref_is_idempotent((f, rows) in matrix_strategy()) {
        let r = to_matrix(f, &rows).row_reduce();
        let again = r.rref.row_reduce();
        prop_assert_eq!(&again.rref, &r.rref);
        prop_assert_eq!(again.rank, r.rank);
        prop_assert_eq!(r.rref.rank(), r.rank);
    }

    #[test]
    fn quotient_dimension((f, rows) in matrix_strategy()) {
        let m = to_matrix(f, &rows);
        let n = m.cols();
        let span: Vec<Vec<Scalar>> = (0..n).map(|i| f.unit_vector(n, i)).collect();
        let kernel = m.kernel();
        let q = Quotient::new(f, n, &span, &kernel).unwrap();
        prop_assert_eq!(q.dim(), m.rank());
        for v in kernel {
            prop_assert!(q.project(&v).unwrap().iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn suspension_and_dual_shift_dimensions(fam in family_strategy(), spec in spec_strategy(), n in -3i32..4) {
        let a = algebra(fam, Field::Rationals).unwrap();
        let m = build_module(&a, &spec).unwrap();
        let h = m.cohomology();
        let s = m.suspend(n);
        prop_assert_eq!(s.cohomology().dims, shift(&h.dims, n));
        prop_assert_eq!(s.certified(), Window::new(m.certified().lo - n, m.certified().hi - n));
        let d = m.linear_dual();
        let expected: BTreeMap<i32, usize> = h.dims.iter().map(|(&j, &k)| (-j, k)).collect();
        prop_assert_eq!(d.cohomology().dims, expected);
        prop_assert!(s.validate().is_valid());
        prop_assert!(d.validate().is_valid());
    }

    #[test]
    fn truncation_is_exact(fam in family_strategy(), spec in spec_strategy(), l in -1i32..4) {
        let a = algebra(fam, Field::Rationals).unwrap();
        let m = build_module(&a, &spec).unwrap();
        let t = m.hard_truncate(l);
        prop_assert!(t.sub.validate().is_valid());
        prop_assert!(t.quot.validate().is_valid());
        prop_assert!(t.inclusion.validate().is_ok());
        prop_assert!(t.projection.validate().is_ok());
        for j in m.window().degrees() {
            prop_assert_eq!(t.sub.dim(j) + t.quot.dim(j), m.dim(j));
        }
    }

    #[test]
    fn resolving_a_resolution_is_idempotent(fam in family_strategy(), spec in spec_strategy()) {
        let a = algebra(fam, Field::Rationals).unwrap();
        let m = build_module(&a, &spec).unwrap();
        let res = resolve(&m, 6, DEFAULT_WINDOW).unwrap();
        prop_assume!(res.complete() && !res.ledger.is_empty());
        prop_assert!(res.augmentation_is_chain_map().unwrap());
        prop_assert!(res.is_minimal().0);
        let lo = res.ledger.min_degree().unwrap();
        let p = res.materialize(Window::new(lo, a.hi() + lo)).unwrap();
        let again = resolve(&p, 6, DEFAULT_WINDOW).unwrap();
        prop_assert_eq!(again.ledger.counts(), res.ledger.counts());
    }
}
