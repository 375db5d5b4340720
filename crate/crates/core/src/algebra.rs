//! Connected cochain DG algebras presented on a finite degree window.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::basis::{BasisRef, GradedBasis};
use crate::complex::{CohomologyReport, Complex};
use crate::error::{Error, Result};
use crate::field::{axpy, is_zero_vec, Field, Scalar};
use crate::linalg::Matrix;
use crate::window::Window;

/// Axiom checked by presentation validation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    Connected,
    UnitLaw,
    DifferentialSquare,
    Leibniz,
    Associativity,
    LeftUnit,
    RightUnit,
    LeftLeibniz,
    RightLeibniz,
    LeftAssociativity,
    RightAssociativity,
    Commutation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Number of axiom instances skipped because they need unrecorded
    /// products above the window.
    pub unrecorded: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn push(&mut self, axiom: Axiom, witness: Vec<String>) {
        self.violations.push(Violation { axiom, witness });
    }
}

/// Builds a coefficient vector of degree `degree` from `(coefficient, label)` terms.
pub(crate) fn combination(
    basis: &GradedBasis,
    field: Field,
    degree: i32,
    terms: &[(Scalar, String)],
) -> Result<Vec<Scalar>> {
    let mut v = field.zeros(basis.dim(degree));
    for (c, label) in terms {
        let r = basis.get(label)?;
        if r.degree != degree {
            return Err(Error::Validation(format!(
                "degree mismatch: `{label}` has degree {} but degree {degree} is required",
                r.degree
            )));
        }
        if !field.contains(c) {
            return Err(Error::FieldMismatch { expected: field.to_string(), found: c.field().to_string() });
        }
        v[r.index] = &v[r.index] + c;
    }
    Ok(v)
}

/// A connected cochain DG algebra on the window `0..=hi`. Products whose
/// degree exceeds `hi` are unrecorded; unlisted in-window entries are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgAlgebra {
    name: String,
    field: Field,
    basis: GradedBasis,
    unit: Option<BasisRef>,
    mul: BTreeMap<(BasisRef, BasisRef), Vec<Scalar>>,
    diff: BTreeMap<BasisRef, Vec<Scalar>>,
}

impl DgAlgebra {
    pub fn new(name: impl Into<String>, field: Field, hi: i32) -> DgAlgebra {
        DgAlgebra {
            name: name.into(),
            field,
            basis: GradedBasis::new(Window::new(0, hi)),
            unit: None,
            mul: BTreeMap::new(),
            diff: BTreeMap::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }
    pub fn field(&self) -> Field {
        self.field
    }
    pub fn window(&self) -> Window {
        self.basis.window()
    }
    pub fn hi(&self) -> i32 {
        self.window().hi
    }
    pub fn basis(&self) -> &GradedBasis {
        &self.basis
    }
    pub fn dim(&self, d: i32) -> usize {
        self.basis.dim(d)
    }
    pub fn unit(&self) -> Option<BasisRef> {
        self.unit
    }

    pub fn add_basis(&mut self, degree: i32, label: impl Into<String>) -> Result<BasisRef> {
        if !self.mul.is_empty() || !self.diff.is_empty() {
            return Err(Error::Validation("basis must be declared before tables".into()));
        }
        self.basis.push(degree, label)
    }

    pub fn set_unit(&mut self, label: &str) -> Result<()> {
        self.unit = Some(self.basis.get(label)?);
        Ok(())
    }

    pub fn set_mul(&mut self, x: BasisRef, y: BasisRef, value: Vec<Scalar>) -> Result<()> {
        let t = x.degree + y.degree;
        if t > self.hi() {
            return Err(Error::Window(format!("product degree {t} exceeds window top {}", self.hi())));
        }
        if value.len() != self.dim(t) {
            return Err(Error::Dimension(format!("product in degree {t} needs {} coefficients", self.dim(t))));
        }
        if is_zero_vec(&value) {
            self.mul.remove(&(x, y));
        } else {
            self.mul.insert((x, y), value);
        }
        Ok(())
    }

    pub fn set_diff(&mut self, x: BasisRef, value: Vec<Scalar>) -> Result<()> {
        let t = x.degree + 1;
        if t > self.hi() {
            return Err(Error::Window(format!("differential degree {t} exceeds window top {}", self.hi())));
        }
        if value.len() != self.dim(t) {
            return Err(Error::Dimension(format!("differential in degree {t} needs {} coefficients", self.dim(t))));
        }
        if is_zero_vec(&value) {
            self.diff.remove(&x);
        } else {
            self.diff.insert(x, value);
        }
        Ok(())
    }

    pub fn set_mul_labels(&mut self, x: &str, y: &str, terms: &[(Scalar, String)]) -> Result<()> {
        let (rx, ry) = (self.basis.get(x)?, self.basis.get(y)?);
        let t = rx.degree + ry.degree;
        if t > self.hi() {
            return Err(Error::Window(format!("product `{x} {y}` lands in degree {t}, above the window")));
        }
        let v = combination(&self.basis, self.field, t, terms)?;
        self.set_mul(rx, ry, v)
    }

    pub fn set_diff_labels(&mut self, x: &str, terms: &[(Scalar, String)]) -> Result<()> {
        let rx = self.basis.get(x)?;
        let t = rx.degree + 1;
        if t > self.hi() {
            return Err(Error::Window(format!("differential of `{x}` lands in degree {t}, above the window")));
        }
        let v = combination(&self.basis, self.field, t, terms)?;
        self.set_diff(rx, v)
    }

    /// Recorded (nonzero) product entries.
    pub fn mul_entries(&self) -> impl Iterator<Item = (&(BasisRef, BasisRef), &Vec<Scalar>)> {
        self.mul.iter()
    }

    pub fn diff_entries(&self) -> impl Iterator<Item = (&BasisRef, &Vec<Scalar>)> {
        self.diff.iter()
    }

    /// Product of two basis elements; `None` when the product lies above the window.
    pub fn mul_basis(&self, x: BasisRef, y: BasisRef) -> Option<Vec<Scalar>> {
        let t = x.degree + y.degree;
        if t > self.hi() {
            return None;
        }
        Some(self.mul.get(&(x, y)).cloned().unwrap_or_else(|| self.field.zeros(self.dim(t))))
    }

    /// Product of homogeneous elements given by coordinates.
    pub fn mul(&self, dx: i32, x: &[Scalar], dy: i32, y: &[Scalar]) -> Option<Vec<Scalar>> {
        let t = dx + dy;
        if t > self.hi() || dx < 0 || dy < 0 {
            return None;
        }
        let mut out = self.field.zeros(self.dim(t));
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                if let Some(v) = self.mul.get(&(BasisRef::new(dx, i), BasisRef::new(dy, j))) {
                    axpy(&mut out, &(a * b), v);
                }
            }
        }
        Some(out)
    }

    pub fn diff_basis(&self, x: BasisRef) -> Option<Vec<Scalar>> {
        let t = x.degree + 1;
        if t > self.hi() {
            return None;
        }
        Some(self.diff.get(&x).cloned().unwrap_or_else(|| self.field.zeros(self.dim(t))))
    }

    pub fn diff_vec(&self, d: i32, x: &[Scalar]) -> Option<Vec<Scalar>> {
        if d + 1 > self.hi() {
            return None;
        }
        let mut out = self.field.zeros(self.dim(d + 1));
        for (i, a) in x.iter().enumerate() {
            if let Some(v) = self.diff.get(&BasisRef::new(d, i)) {
                axpy(&mut out, a, v);
            }
        }
        Some(out)
    }

    pub fn basis_vector(&self, r: BasisRef) -> Vec<Scalar> {
        self.field.unit_vector(self.dim(r.degree), r.index)
    }

    pub fn unit_vector(&self) -> Vec<Scalar> {
        self.field.unit_vector(self.dim(0).max(1), self.unit.map_or(0, |u| u.index))
    }

    /// Highest degree carrying basis elements.
    pub fn top_degree(&self) -> i32 {
        self.basis.support().map_or(0, |(_, t)| t)
    }

    /// True when the presentation is the entire algebra: every product and
    /// differential of basis elements is recorded in-window.
    pub fn is_exhausted(&self) -> bool {
        let t = self.top_degree();
        self.hi() >= 2 * t && self.hi() > t
    }

    /// Whether every product of two positive-degree elements vanishes.
    pub fn positive_square_zero(&self) -> bool {
        self.is_exhausted()
            && self.mul.keys().all(|(x, y)| x.degree == 0 || y.degree == 0)
    }

    /// The opposite algebra, `x ∗ y = (-1)^{|x||y|} y x`.
    pub fn opposite(&self) -> DgAlgebra {
        let mut out = self.clone();
        out.name = match self.name.strip_suffix("^op") {
            Some(base) => base.to_string(),
            None => format!("{}^op", self.name),
        };
        out.mul = self
            .mul
            .iter()
            .map(|(&(x, y), v)| {
                let s = self.field.sign((x.degree * y.degree) as i64);
                ((y, x), v.iter().map(|c| &s * c).collect())
            })
            .collect();
        out
    }

    /// Left multiplication by the basis element `a`, from degree `d` to `d + |a|`.
    pub fn left_mult_matrix(&self, a: BasisRef, d: i32) -> Option<Matrix> {
        let t = d + a.degree;
        if t > self.hi() {
            return None;
        }
        let cols: Vec<Vec<Scalar>> =
            (0..self.dim(d)).map(|j| self.mul_basis(a, BasisRef::new(d, j)).unwrap()).collect();
        Some(Matrix::from_columns(self.field, self.dim(t), &cols))
    }

    pub fn as_complex(&self) -> Complex {
        let w = self.window();
        let mut c = Complex::new(self.field, w.shrink_top(1));
        for d in w.degrees() {
            c.dims.insert(d, self.dim(d));
            if d < w.hi {
                let cols: Vec<Vec<Scalar>> =
                    (0..self.dim(d)).map(|i| self.diff_basis(BasisRef::new(d, i)).unwrap()).collect();
                c.diffs.insert(d, Matrix::from_columns(self.field, self.dim(d + 1), &cols));
            }
        }
        c
    }

    pub fn cohomology(&self) -> CohomologyReport {
        self.as_complex().cohomology()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();
        let lbl = |r: BasisRef| self.basis.label(r).to_string();
        let hi = self.hi();
        if self.dim(0) != 1 || self.unit.map(|u| u.degree) != Some(0) {
            let w = self.basis.labels(0).to_vec();
            rep.push(Axiom::Connected, w);
        }
        let refs = self.basis.refs();
        if let Some(u) = self.unit.filter(|u| u.degree == 0) {
            for &x in &refs {
                let e = self.basis_vector(x);
                if self.mul_basis(u, x).as_ref() != Some(&e) || self.mul_basis(x, u).as_ref() != Some(&e) {
                    rep.push(Axiom::UnitLaw, vec![lbl(x)]);
                }
            }
        }
        for &x in &refs {
            if x.degree + 2 > hi {
                rep.unrecorded += 1;
                continue;
            }
            let dx = self.diff_basis(x).unwrap();
            if !is_zero_vec(&self.diff_vec(x.degree + 1, &dx).unwrap()) {
                rep.push(Axiom::DifferentialSquare, vec![lbl(x)]);
            }
        }
        for &x in &refs {
            for &y in &refs {
                if x.degree + y.degree + 1 > hi {
                    rep.unrecorded += 1;
                    continue;
                }
                if !self.leibniz_holds(x, y) {
                    rep.push(Axiom::Leibniz, vec![lbl(x), lbl(y)]);
                }
            }
        }
        for &x in &refs {
            for &y in &refs {
                for &z in &refs {
                    if x.degree + y.degree + z.degree > hi {
                        rep.unrecorded += 1;
                        continue;
                    }
                    let xy = self.mul_basis(x, y).unwrap();
                    let yz = self.mul_basis(y, z).unwrap();
                    let lhs = self.mul(x.degree + y.degree, &xy, z.degree, &self.basis_vector(z)).unwrap();
                    let rhs = self.mul(x.degree, &self.basis_vector(x), y.degree + z.degree, &yz).unwrap();
                    if lhs != rhs {
                        rep.push(Axiom::Associativity, vec![lbl(x), lbl(y), lbl(z)]);
                    }
                }
            }
        }
        rep
    }

    /// `∂(xy) = ∂x·y + (-1)^{|x|} x·∂y`, assuming all terms are in-window.
    fn leibniz_holds(&self, x: BasisRef, y: BasisRef) -> bool {
        let (ex, ey) = (self.basis_vector(x), self.basis_vector(y));
        let xy = self.mul_basis(x, y).unwrap();
        let lhs = self.diff_vec(x.degree + y.degree, &xy).unwrap();
        let mut rhs = self.mul(x.degree + 1, &self.diff_basis(x).unwrap(), y.degree, &ey).unwrap();
        let t2 = self.mul(x.degree, &ex, y.degree + 1, &self.diff_basis(y).unwrap()).unwrap();
        axpy(&mut rhs, &self.field.sign(x.degree as i64), &t2);
        lhs == rhs
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let rep = self.validate();
        match rep.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::Validation(format!(
                "algebra `{}` violates {:?} at ({})",
                self.name,
                v.axiom,
                v.witness.join(", ")
            ))),
        }
    }
}

/// Degree-preserving algebra map given on basis elements.
#[derive(Clone, Debug)]
pub struct AlgebraAutomorphism {
    /// Per degree, a square matrix whose column `i` is the image of basis element `i`.
    pub matrices: BTreeMap<i32, Matrix>,
}

impl AlgebraAutomorphism {
    pub fn identity(a: &DgAlgebra) -> AlgebraAutomorphism {
        let matrices = a.window().degrees().map(|d| (d, Matrix::identity(a.field(), a.dim(d)))).collect();
        AlgebraAutomorphism { matrices }
    }

    /// The diagonal automorphism scaling each basis element of degree `d` by `scalar(d)`.
    pub fn diagonal(a: &DgAlgebra, scalar: impl Fn(i32) -> Scalar) -> AlgebraAutomorphism {
        let matrices = a
            .window()
            .degrees()
            .map(|d| {
                let mut m = Matrix::zero(a.field(), a.dim(d), a.dim(d));
                for i in 0..a.dim(d) {
                    m.set(i, i, scalar(d));
                }
                (d, m)
            })
            .collect();
        AlgebraAutomorphism { matrices }
    }

    pub fn apply(&self, d: i32, x: &[Scalar]) -> Vec<Scalar> {
        match self.matrices.get(&d) {
            Some(m) => m.apply(x),
            None => x.to_vec(),
        }
    }

    /// Checks unitality, multiplicativity, compatibility with `∂` and invertibility in-window.
    pub fn validate(&self, a: &DgAlgebra) -> Result<()> {
        for d in a.window().degrees() {
            let m = self.matrices.get(&d).ok_or_else(|| Error::Automorphism(format!("no map in degree {d}")))?;
            if m.rows() != a.dim(d) || m.cols() != a.dim(d) {
                return Err(Error::Automorphism(format!("wrong shape in degree {d}")));
            }
            if m.rank() != a.dim(d) {
                return Err(Error::Automorphism(format!("not invertible in degree {d}")));
            }
        }
        if self.apply(0, &a.unit_vector()) != a.unit_vector() {
            return Err(Error::Automorphism("does not fix the unit".into()));
        }
        let refs = a.basis().refs();
        for &x in &refs {
            let ax = self.apply(x.degree, &a.basis_vector(x));
            if let Some(dx) = a.diff_basis(x) {
                if self.apply(x.degree + 1, &dx) != a.diff_vec(x.degree, &ax).unwrap() {
                    return Err(Error::Automorphism(format!("does not commute with ∂ at `{}`", a.basis().label(x))));
                }
            }
            for &y in &refs {
                let Some(xy) = a.mul_basis(x, y) else { continue };
                let ay = self.apply(y.degree, &a.basis_vector(y));
                let lhs = self.apply(x.degree + y.degree, &xy);
                let rhs = a.mul(x.degree, &ax, y.degree, &ay).unwrap();
                if lhs != rhs {
                    return Err(Error::Automorphism(format!(
                        "not multiplicative at ({}, {})",
                        a.basis().label(x),
                        a.basis().label(y)
                    )));
                }
            }
        }
        Ok(())
    }
}

pub type SharedAlgebra = Arc<DgAlgebra>;
