//! Derived torsion, CM regularity, dualizing modules and the duality checks,
//! in the two regimes where they are explicit: `H(A)` finite-dimensional,
//! and `A = k[T]` with `∂ = 0`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{AlgebraAutomorphism, DgAlgebra};
use crate::basis::BasisRef;
use crate::catalog::{algebra, Family};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::module::{DgModule, Side};
use crate::resolution::{resolve, RegularityKind, RegularityValue};
use crate::tensor_hom::{brute_hom, hom_ledger, tensor, Derived};
use crate::window::{Window, UNBOUNDED};

/// Lowest degree of the Čech carrier presentation.
pub const CARRIER_LO: i32 = -16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Regime {
    /// `A` is exhausted in its window; `H(A)` lives in `0..=top`.
    FiniteDimensional { top: i32, window: Window },
    /// `A ≅ k[T]`, `|T| = d`, `∂ = 0`.
    PolynomialFamily { d: i32 },
    Unsupported { reason: String },
}

impl Regime {
    pub fn is_supported(&self) -> bool {
        !matches!(self, Regime::Unsupported { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Regime::FiniteDimensional { .. } => "finite",
            Regime::PolynomialFamily { .. } => "poly",
            Regime::Unsupported { .. } => "unsupported",
        }
    }

    fn require(&self) -> Result<()> {
        match self {
            Regime::Unsupported { reason } => Err(Error::UnsupportedRegime(reason.clone())),
            _ => Ok(()),
        }
    }
}

/// Identification of `A` with `k[T]`: `T^j = scale[j]·b_j` for the basis
/// element `b_j` of degree `jd`.
#[derive(Clone, Debug)]
pub struct PolynomialData {
    pub d: i32,
    pub t: BasisRef,
    pub scale: Vec<Scalar>,
}

pub fn polynomial_data(a: &DgAlgebra) -> Option<PolynomialData> {
    if a.diff_entries().next().is_some() {
        return None;
    }
    let d = (1..=a.hi()).find(|&j| a.dim(j) > 0)?;
    if a.hi() < 2 * d {
        return None;
    }
    for j in 0..=a.hi() {
        let expected = usize::from(j % d == 0);
        if a.dim(j) != expected {
            return None;
        }
    }
    let t = BasisRef::new(d, 0);
    let f = a.field();
    let mut scale = vec![f.one(), f.one()];
    let mut power = a.basis_vector(t);
    for j in 2..=a.hi() / d {
        power = a.mul((j - 1) * d, &power, d, &a.basis_vector(t))?;
        if power[0].is_zero() {
            return None;
        }
        scale.push(power[0].clone());
    }
    Some(PolynomialData { d, t, scale })
}

pub fn detect_regime(a: &DgAlgebra) -> Regime {
    if a.is_exhausted() {
        return Regime::FiniteDimensional { top: a.top_degree(), window: a.window() };
    }
    if let Some(p) = polynomial_data(a) {
        return Regime::PolynomialFamily { d: p.d };
    }
    Regime::Unsupported {
        reason: format!("`{}` is neither exhausted in its window nor a polynomial algebra on one generator", a.name()),
    }
}

/// `Σ^{-1}C` with `C = k[T, T^{-1}]/k[T]`: basis `c_j` (`j ≥ 1`) in degree
/// `-dj + 1`, `T^i c_j = c_{j-i}` and `c_j T^i = (-1)^{di} c_{j-i}`.
pub fn cech_carrier(a: &Arc<DgAlgebra>, lo: i32) -> Result<DgModule> {
    let p = polynomial_data(a).ok_or_else(|| Error::UnsupportedRegime("not a polynomial algebra".into()))?;
    let f = a.field();
    let d = p.d;
    let mut m = DgModule::new("S^-1C", a.clone(), Side::Bi, Window::new(lo, 1));
    let mut js = Vec::new();
    let mut j = 1;
    while -d * j + 1 >= lo {
        m.add_basis(-d * j + 1, format!("c{j}"))?;
        js.push(j);
        j += 1;
    }
    for &j in &js {
        let c = BasisRef::new(-d * j + 1, 0);
        for (i, s) in p.scale.iter().enumerate() {
            let i = i as i32;
            if j - i < 1 {
                break;
            }
            let b = BasisRef::new(i * d, 0);
            let inv = s.inverse().expect("powers of T are nonzero");
            m.set_left(b, c, vec![inv.clone()])?;
            m.set_right(c, b, vec![&f.sign((d * i) as i64) * &inv])?;
        }
    }
    m.set_certified(Window::new(lo + 1, 1));
    Ok(m)
}

#[derive(Clone, Debug)]
pub struct Torsion {
    pub module: DgModule,
    pub complete: bool,
    pub note: String,
}

/// `Γ M`: `M` itself when `H(A)` is finite, `Σ^{-1}C ⊗_A P(M)` for `k[T]`.
pub fn gamma(m: &DgModule, regime: &Regime, stages: usize, w: Window) -> Result<Torsion> {
    regime.require()?;
    match regime {
        Regime::FiniteDimensional { .. } => Ok(Torsion {
            module: m.clone(),
            complete: true,
            note: "H(A) finite: A lies in the localizing subcategory of k, so the counit is an isomorphism".into(),
        }),
        _ => {
            let res = resolve(m, stages, w)?;
            let carrier = cech_carrier(m.algebra(), CARRIER_LO)?;
            let t = tensor(&carrier, &res.ledger)?;
            let complete = res.complete();
            let mut module = t.module;
            module.set_name(format!("G({})", m.name()));
            Ok(Torsion {
                module,
                complete,
                note: if complete {
                    "Cech carrier tensored with a complete resolution".into()
                } else {
                    "resolution incomplete: certified window shrunk".into()
                },
            })
        }
    }
}

fn support_trusted(m: &DgModule) -> bool {
    let t = m.trust();
    m.basis().support().is_none_or(|(lo, hi)| t.contains(lo) && t.contains(hi))
}

/// `CMreg M = sup Γ M`.
pub fn cm_reg(m: &DgModule, regime: &Regime, stages: usize, w: Window) -> Result<RegularityValue> {
    let g = gamma(m, regime, stages, w)?;
    let gm = &g.module;
    let h = gm.cohomology();
    let cert = gm.certified();
    let covers_top = gm.trust().hi == UNBOUNDED;
    let whole = match regime {
        Regime::FiniteDimensional { .. } => support_trusted(gm),
        _ => covers_top && gm.trust().lo == -UNBOUNDED,
    };
    let top_ok = match regime {
        Regime::FiniteDimensional { .. } => whole,
        _ => covers_top,
    };
    Ok(match h.sup() {
        Some(s) if top_ok => RegularityValue::new(RegularityKind::Exact { value: s }, cert, g.note),
        Some(s) => RegularityValue::new(RegularityKind::AtLeast { value: s }, cert, g.note),
        None if whole || (g.complete && m.cohomology().dims.is_empty() && support_trusted(m)) => {
            RegularityValue::new(RegularityKind::NegInfinity, cert, "H(G M) = 0")
        }
        None => RegularityValue::new(RegularityKind::Undetermined, cert, "no cohomology in the certified window"),
    })
}

/// `D = A^∨` for finite `H(A)`; `D = (Σ^{-(d-1)}A)^α` with
/// `α(T^j) = (-1)^{jd} T^j` for `k[T]`, basis `e_ℓ` in degree `dℓ + d - 1`.
pub fn dualizing_module(a: &Arc<DgAlgebra>, regime: &Regime) -> Result<DgModule> {
    regime.require()?;
    match regime {
        Regime::FiniteDimensional { .. } => {
            let mut d = DgModule::free(a.clone(), Side::Bi).linear_dual();
            d.set_name("D=A^v");
            Ok(d)
        }
        Regime::PolynomialFamily { d } => {
            let d = *d;
            let f = a.field();
            let alpha = AlgebraAutomorphism::diagonal(a, |deg| f.sign(deg as i64));
            let m = DgModule::free(a.clone(), Side::Bi).suspend(-(d - 1)).twist(&alpha)?;
            let mut m = m.relabeled(|r, _| format!("e{}", (r.degree - (d - 1)) / d))?;
            m.set_name("D");
            Ok(m)
        }
        Regime::Unsupported { .. } => unreachable!(),
    }
}

/// Whether `H(D)` over `k[T]_d` has different left and right actions,
/// compared on `T·e_0` and `e_0·T`.
pub fn twist_nontriviality(d: i32, field: Field) -> Result<bool> {
    let a = algebra(Family::Polynomial { d }, field)?;
    let regime = detect_regime(&a);
    let dm = dualizing_module(&a, &regime)?;
    let t = a.basis().get("t")?;
    let e0 = dm.basis().get("e0")?;
    Ok(dm.left_basis(t, e0) != dm.right_basis(e0, t))
}

/// `RHom_A(M, D)` as a right module: brute-force Hom into the injective
/// `A^∨` for finite `H(A)`, Hom out of the resolution for `k[T]`.
pub fn apply_duality(m: &DgModule, regime: &Regime, d: &DgModule, stages: usize, w: Window) -> Result<(Derived, bool)> {
    regime.require()?;
    match regime {
        Regime::FiniteDimensional { .. } => Ok((brute_hom(m, d)?, true)),
        _ => {
            let res = resolve(m, stages, w)?;
            let complete = res.complete();
            Ok((hom_ledger(&res.ledger, d)?, complete))
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionComparison {
    /// `None` when some intermediate step is uncertified.
    pub agree: Option<bool>,
    pub window: Window,
    pub left: BTreeMap<i32, usize>,
    pub right: BTreeMap<i32, usize>,
    pub note: String,
}

fn compare(x: &DgModule, y: &DgModule, certified: bool, note: String) -> DimensionComparison {
    let window = x.certified().intersect(&y.certified());
    let left = x.cohomology().dims_in(&window);
    let right = y.cohomology().dims_in(&window);
    let vanishes = |m: &DgModule| m.trust() == Window::new(-UNBOUNDED, UNBOUNDED) && m.cohomology().dims.is_empty();
    let agree = if certified && vanishes(x) && vanishes(y) {
        Some(true)
    } else {
        (certified && !window.is_empty()).then_some(left == right)
    };
    DimensionComparison { agree, window, left, right, note }
}

/// `RHom_{A^op}(RHom_A(M, D), D)` against `M`.
pub fn double_duality_check(m: &DgModule, regime: &Regime, stages: usize, w: Window) -> Result<DimensionComparison> {
    let a = m.algebra().clone();
    let op = Arc::new(a.opposite());
    let d = dualizing_module(&a, regime)?;
    let (n, c1) = apply_duality(m, regime, &d, stages, w)?;
    let n_op = n.module.opposite_view(op.clone());
    let d_op = d.opposite_view(op.clone());
    let (back, c2) = match regime {
        Regime::FiniteDimensional { .. } => (brute_hom(&n_op, &d_op)?, true),
        _ => {
            let res = resolve(&n_op, stages, w)?;
            let c = res.complete();
            (hom_ledger(&res.ledger, &d_op)?, c)
        }
    };
    let note = format!("first dual certified on {}, bidual on {}", n.module.certified(), back.module.certified());
    Ok(compare(m, &back.module, c1 && c2, note))
}

/// `(Γ M)^∨` against `RHom_A(M, D)`.
pub fn local_duality_check(m: &DgModule, regime: &Regime, stages: usize, w: Window) -> Result<DimensionComparison> {
    let g = gamma(m, regime, stages, w)?;
    let lhs = g.module.linear_dual();
    let d = dualizing_module(m.algebra(), regime)?;
    let (rhs, c) = apply_duality(m, regime, &d, stages, w)?;
    Ok(compare(&lhs, &rhs.module, g.complete && c, g.note))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_module, FiniteTable, ModuleSpec, SideSpec, MODULE_WINDOW};
    use crate::resolution::{DEFAULT_STAGES, DEFAULT_WINDOW};

    fn q() -> Field {
        Field::Rationals
    }

    #[test]
    fn regimes() {
        assert!(matches!(detect_regime(&algebra(Family::SquareZero, q()).unwrap()), Regime::FiniteDimensional { .. }));
        assert_eq!(detect_regime(&algebra(Family::Polynomial { d: 3 }, q()).unwrap()), Regime::PolynomialFamily { d: 3 });
        assert!(!detect_regime(&algebra(Family::Hybrid, q()).unwrap()).is_supported());
    }

    #[test]
    fn carrier_is_a_bimodule() {
        for d in 1..=3 {
            let a = algebra(Family::Polynomial { d }, q()).unwrap();
            let c = cech_carrier(&a, CARRIER_LO).unwrap();
            assert!(c.validate().is_valid(), "{:?}", c.validate().violations);
            assert_eq!(c.basis().support().unwrap().1, 1 - d);
        }
    }

    #[test]
    fn gamma_of_a_and_k_over_polynomial() {
        for d in 1..=3 {
            let a = algebra(Family::Polynomial { d }, q()).unwrap();
            let r = detect_regime(&a);
            let free = build_module(&a, &ModuleSpec::Free { side: SideSpec::Left }).unwrap();
            let k = build_module(&a, &ModuleSpec::CanonicalK { side: SideSpec::Left }).unwrap();
            let g = gamma(&free, &r, DEFAULT_STAGES, DEFAULT_WINDOW).unwrap().module;
            let h = g.cohomology();
            assert_eq!(h.sup(), Some(1 - d));
            assert!(h.dims_in(&g.certified()).keys().all(|j| (1 - d - j) % d == 0));
            assert_eq!(cm_reg(&free, &r, 8, DEFAULT_WINDOW).unwrap().kind, RegularityKind::Exact { value: 1 - d });
            let gk = gamma(&k, &r, DEFAULT_STAGES, DEFAULT_WINDOW).unwrap().module;
            assert_eq!(gk.cohomology().dims_in(&gk.certified()), BTreeMap::from([(0, 1)]));
            assert_eq!(cm_reg(&k, &r, 8, DEFAULT_WINDOW).unwrap().kind, RegularityKind::Exact { value: 0 });
        }
    }

    #[test]
    fn dualizing_tables() {
        let a = algebra(Family::Polynomial { d: 1 }, q()).unwrap();
        let dm = dualizing_module(&a, &detect_regime(&a)).unwrap();
        assert!(dm.validate().is_valid());
        let t = a.basis().get("t").unwrap();
        let (e0, e1) = (dm.basis().get("e0").unwrap(), dm.basis().get("e1").unwrap());
        assert_eq!(e0.degree, 0);
        let one = q().one();
        assert_eq!(dm.left_basis(t, e0).unwrap()[e1.index], one);
        assert_eq!(dm.right_basis(e0, t).unwrap()[e1.index], -&one);
        assert!(twist_nontriviality(1, q()).unwrap());
        assert!(!twist_nontriviality(2, q()).unwrap());
        assert!(!twist_nontriviality(1, Field::prime(2).unwrap()).unwrap());
    }

    #[test]
    fn finite_regime_duality() {
        let a = algebra(Family::SquareZero, q()).unwrap();
        let r = detect_regime(&a);
        let k = build_module(&a, &ModuleSpec::CanonicalK { side: SideSpec::Left }).unwrap();
        let d = dualizing_module(&a, &r).unwrap();
        assert_eq!((d.dim(-1), d.dim(0)), (1, 1));
        let (h, _) = apply_duality(&k, &r, &d, 8, DEFAULT_WINDOW).unwrap();
        assert_eq!(h.complex().cohomology().dims, BTreeMap::from([(0, 1)]));
        let dd = double_duality_check(&k, &r, 8, DEFAULT_WINDOW).unwrap();
        assert_eq!(dd.agree, Some(true), "{dd:?}");
        let ld = local_duality_check(&k, &r, 8, DEFAULT_WINDOW).unwrap();
        assert_eq!(ld.agree, Some(true), "{ld:?}");
        let k0 = algebra(Family::FiniteDimTable(FiniteTable::GroundField), q()).unwrap();
        let d0 = dualizing_module(&k0, &detect_regime(&k0)).unwrap();
        assert_eq!(d0.basis().total_dim(), 1);
        let _ = MODULE_WINDOW;
    }

    #[test]
    fn polynomial_duality() {
        let a = algebra(Family::Polynomial { d: 2 }, q()).unwrap();
        let r = detect_regime(&a);
        let k = build_module(&a, &ModuleSpec::CanonicalK { side: SideSpec::Left }).unwrap();
        let d = dualizing_module(&a, &r).unwrap();
        let (h, complete) = apply_duality(&k, &r, &d, 8, DEFAULT_WINDOW).unwrap();
        assert!(complete);
        let hm = h.module.cohomology();
        assert_eq!(hm.dims_in(&h.module.certified()), BTreeMap::from([(0, 1)]));
        let dd = double_duality_check(&k, &r, 8, DEFAULT_WINDOW).unwrap();
        assert_eq!(dd.agree, Some(true), "{dd:?}");
        for m in [k, build_module(&a, &ModuleSpec::Free { side: SideSpec::Left }).unwrap()] {
            let ld = local_duality_check(&m, &r, 8, DEFAULT_WINDOW).unwrap();
            assert_eq!(ld.agree, Some(true), "{ld:?}");
        }
    }
}
