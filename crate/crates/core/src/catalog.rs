//! Builders for the standard example algebras and modules.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::DgAlgebra;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::module::{DgModule, ModuleMap, Side};
use crate::window::Window;

pub const ALGEBRA_TOP: i32 = 16;
pub const MODULE_WINDOW: Window = Window::new(-16, 16);

/// Small finite-dimensional tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "table", rename_all = "kebab-case")]
pub enum FiniteTable {
    /// `A = k`.
    GroundField,
    /// `{1, x, y}`, `|x| = 1`, `∂x = y`, all positive products zero.
    Acyclic,
    /// `k[x]/(x^height)` with `|x| = degree` even.
    TruncatedPolynomial { degree: i32, height: i32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    /// `k[T]/(T²)`, `|T| = 1`, `∂ = 0`.
    SquareZero,
    /// `k[T]`, `|T| = d`, `∂ = 0`.
    Polynomial { d: i32 },
    /// `k[T]/(T²)`, `|T| = d` odd, `∂ = 0`.
    ExteriorOnOne { d: i32 },
    FiniteDimTable(FiniteTable),
    /// `Λ(x) ⊗ k[y]`, `|x| = 1`, `|y| = 2`, `∂ = 0`.
    Hybrid,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogSpec {
    #[serde(flatten)]
    pub family: Family,
    pub field: Field,
    pub top: i32,
}

impl CatalogSpec {
    pub fn new(family: Family, field: Field) -> CatalogSpec {
        CatalogSpec { family, field, top: ALGEBRA_TOP }
    }
}

fn power_label(base: &str, j: i32) -> String {
    match j {
        0 => "1".to_string(),
        1 => base.to_string(),
        _ => format!("{base}{j}"),
    }
}

/// Monomial algebra on one generator: basis `x^j` for `j < height` (or up to
/// the window when `height` is `None`), `x^i x^j = x^{i+j}`.
fn monomial(name: String, field: Field, top: i32, base: &str, d: i32, height: Option<i32>) -> Result<DgAlgebra> {
    let mut a = DgAlgebra::new(name, field, top);
    let n = height.unwrap_or(i32::MAX).min(top / d + 1);
    for j in 0..n {
        a.add_basis(j * d, power_label(base, j))?;
    }
    a.set_unit("1")?;
    for i in 0..n {
        for j in 0..n {
            if (i + j) * d > top {
                continue;
            }
            if i + j < n {
                a.set_mul_labels(&power_label(base, i), &power_label(base, j), &[(field.one(), power_label(base, i + j))])?;
            }
        }
    }
    Ok(a)
}

pub fn build_algebra(spec: &CatalogSpec) -> Result<DgAlgebra> {
    let f = spec.field;
    let top = spec.top;
    let a = match &spec.family {
        Family::SquareZero => monomial(format!("Lambda/{f}"), f, top, "t", 1, Some(2))?,
        Family::Polynomial { d } => {
            if *d < 1 {
                return Err(Error::Validation("polynomial generator needs positive degree".into()));
            }
            monomial(format!("k[T]_{d}/{f}"), f, top, "t", *d, None)?
        }
        Family::ExteriorOnOne { d } => {
            if *d < 1 || d % 2 == 0 {
                return Err(Error::Validation("exterior generator needs odd positive degree".into()));
            }
            monomial(format!("Lambda_{d}/{f}"), f, top, "t", *d, Some(2))?
        }
        Family::FiniteDimTable(t) => match t {
            FiniteTable::GroundField => monomial(format!("k/{f}"), f, top, "t", 1, Some(1))?,
            FiniteTable::Acyclic => {
                let mut a = DgAlgebra::new(format!("acyclic/{f}"), f, top);
                a.add_basis(0, "1")?;
                a.add_basis(1, "x")?;
                a.add_basis(2, "y")?;
                a.set_unit("1")?;
                for l in ["1", "x", "y"] {
                    a.set_mul_labels("1", l, &[(f.one(), l.into())])?;
                    a.set_mul_labels(l, "1", &[(f.one(), l.into())])?;
                }
                a.set_diff_labels("x", &[(f.one(), "y".into())])?;
                a
            }
            FiniteTable::TruncatedPolynomial { degree, height } => {
                if *degree < 1 || degree % 2 != 0 || *height < 1 {
                    return Err(Error::Validation("truncated polynomial needs an even generator".into()));
                }
                monomial(format!("k[x]_{degree}/(x^{height})/{f}"), f, top, "x", *degree, Some(*height))?
            }
        },
        Family::Hybrid => {
            let mut a = DgAlgebra::new(format!("Lambda(x)k[y]/{f}"), f, top);
            let label = |e: i32, j: i32| match (e, j) {
                (0, 0) => "1".to_string(),
                (0, _) => power_label("y", j),
                (1, 0) => "x".to_string(),
                _ => format!("x{}", power_label("y", j)),
            };
            let mut elems = Vec::new();
            for j in 0..=top / 2 {
                for e in 0..=1 {
                    if 2 * j + e <= top {
                        a.add_basis(2 * j + e, label(e, j))?;
                        elems.push((e, j));
                    }
                }
            }
            a.set_unit("1")?;
            for &(e1, j1) in &elems {
                for &(e2, j2) in &elems {
                    let deg = 2 * (j1 + j2) + e1 + e2;
                    if e1 + e2 > 1 || deg > top {
                        continue;
                    }
                    a.set_mul_labels(&label(e1, j1), &label(e2, j2), &[(f.one(), label(e1 + e2, j1 + j2))])?;
                }
            }
            a
        }
    };
    let report = a.validate();
    if let Some(v) = report.violations.first() {
        return Err(Error::Validation(format!("{:?} at ({})", v.axiom, v.witness.join(", "))));
    }
    Ok(a)
}

pub fn algebra(family: Family, field: Field) -> Result<Arc<DgAlgebra>> {
    Ok(Arc::new(build_algebra(&CatalogSpec::new(family, field))?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "module", rename_all = "kebab-case")]
pub enum ModuleSpec {
    CanonicalK { side: SideSpec },
    Free { side: SideSpec },
    /// `Σⁿ A`.
    Suspended { n: i32 },
    /// `A^{≥ℓ}`.
    Truncated { l: i32 },
    /// Cone of `Σ^{-|a|}A → A`, `x ↦ x·a`.
    ConeOf { element: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideSpec {
    Left,
    Right,
    Bi,
}

impl From<SideSpec> for Side {
    fn from(s: SideSpec) -> Side {
        match s {
            SideSpec::Left => Side::Left,
            SideSpec::Right => Side::Right,
            SideSpec::Bi => Side::Bi,
        }
    }
}

pub fn build_module(a: &Arc<DgAlgebra>, spec: &ModuleSpec) -> Result<DgModule> {
    let m = match spec {
        ModuleSpec::CanonicalK { side } => DgModule::canonical_k(a.clone(), (*side).into(), MODULE_WINDOW),
        ModuleSpec::Free { side } => {
            let mut m = DgModule::free(a.clone(), (*side).into());
            m.set_name("A");
            m
        }
        ModuleSpec::Suspended { n } => {
            let mut m = DgModule::free(a.clone(), Side::Left).suspend(*n);
            m.set_name(format!("S^{n}A"));
            m
        }
        ModuleSpec::Truncated { l } => {
            let mut m = DgModule::free(a.clone(), Side::Left).hard_truncate(*l).sub;
            m.set_name(format!("A^>={l}"));
            m
        }
        ModuleSpec::ConeOf { element } => {
            let r = a.basis().get(element)?;
            if a.diff_basis(r).is_some_and(|v| v.iter().any(|c| !c.is_zero())) {
                return Err(Error::Validation(format!("`{element}` is not a cocycle")));
            }
            let map = ModuleMap::right_multiplication(a.clone(), r)?;
            map.validate()?;
            let mut m = map.cone()?;
            m.set_name(format!("cone(.{element})"));
            m
        }
    };
    m.ensure_valid()?;
    Ok(m)
}

/// One algebra of the sweep with its test modules.
pub struct CatalogInstance {
    pub algebra: Arc<DgAlgebra>,
    pub modules: Vec<DgModule>,
}

/// The algebras whose torsion regime is supported, over `field`.
pub fn supported_families() -> Vec<Family> {
    vec![
        Family::SquareZero,
        Family::ExteriorOnOne { d: 3 },
        Family::FiniteDimTable(FiniteTable::GroundField),
        Family::FiniteDimTable(FiniteTable::Acyclic),
        Family::FiniteDimTable(FiniteTable::TruncatedPolynomial { degree: 2, height: 3 }),
        Family::Polynomial { d: 1 },
        Family::Polynomial { d: 2 },
        Family::Polynomial { d: 3 },
    ]
}

/// Standard test modules over `a`: `k`, `A`, `ΣA`, `A^{≥1}`, and the cone
/// of right multiplication by the lowest positive-degree cocycle.
pub fn standard_modules(a: &Arc<DgAlgebra>) -> Result<Vec<DgModule>> {
    let mut specs = vec![
        ModuleSpec::CanonicalK { side: SideSpec::Left },
        ModuleSpec::Free { side: SideSpec::Left },
        ModuleSpec::Suspended { n: 1 },
        ModuleSpec::Truncated { l: 1 },
    ];
    let cocycle = a.basis().refs().into_iter().find(|r| {
        r.degree > 0 && a.diff_basis(*r).is_some_and(|v| v.iter().all(|c| c.is_zero()))
    });
    if let Some(r) = cocycle {
        specs.push(ModuleSpec::ConeOf { element: a.basis().label(r).to_string() });
    }
    specs.iter().map(|s| build_module(a, s)).collect()
}

pub fn sweep(field: Field) -> Result<Vec<CatalogInstance>> {
    supported_families()
        .into_iter()
        .map(|fam| {
            let algebra = algebra(fam, field)?;
            let modules = standard_modules(&algebra)?;
            Ok(CatalogInstance { algebra, modules })
        })
        .collect()
}
