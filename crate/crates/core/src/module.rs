//! DG modules (left, right, bi) over a windowed DG algebra, and the
//! chain-level constructions on them: truncation, suspension, duals,
//! twists, sums, maps and cones.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{combination, AlgebraAutomorphism, Axiom, DgAlgebra, ValidationReport};
use crate::basis::{BasisRef, GradedBasis};
use crate::complex::{CohomologyReport, Complex};
use crate::error::{Error, Result};
use crate::field::{axpy, is_zero_vec, Field, Scalar};
use crate::linalg::Matrix;
use crate::window::{Window, UNBOUNDED};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Bi,
}

impl Side {
    pub fn has_left(self) -> bool {
        matches!(self, Side::Left | Side::Bi)
    }
    pub fn has_right(self) -> bool {
        matches!(self, Side::Right | Side::Bi)
    }
    pub fn swapped(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
            Side::Bi => Side::Bi,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Bi => "bi",
        };
        f.write_str(s)
    }
}

type Table = BTreeMap<(BasisRef, BasisRef), Vec<Scalar>>;

/// A DG module presented on a degree window. Left actions are keyed by
/// `(algebra element, module element)`, right actions by
/// `(module element, algebra element)`. Entries landing above the window
/// are unrecorded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgModule {
    name: String,
    algebra: Arc<DgAlgebra>,
    side: Side,
    basis: GradedBasis,
    left: Table,
    right: Table,
    diff: BTreeMap<BasisRef, Vec<Scalar>>,
    certified: Window,
}

impl DgModule {
    pub fn new(name: impl Into<String>, algebra: Arc<DgAlgebra>, side: Side, window: Window) -> DgModule {
        DgModule {
            name: name.into(),
            algebra,
            side,
            basis: GradedBasis::new(window),
            left: Table::new(),
            right: Table::new(),
            diff: BTreeMap::new(),
            certified: window.shrink_top(1),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }
    pub fn algebra(&self) -> &Arc<DgAlgebra> {
        &self.algebra
    }
    pub fn field(&self) -> Field {
        self.algebra.field()
    }
    pub fn side(&self) -> Side {
        self.side
    }
    pub fn window(&self) -> Window {
        self.basis.window()
    }
    pub fn basis(&self) -> &GradedBasis {
        &self.basis
    }
    pub fn dim(&self, d: i32) -> usize {
        self.basis.dim(d)
    }
    /// Degrees on which the cohomology of this presentation is trusted.
    pub fn certified(&self) -> Window {
        self.certified
    }
    pub fn set_certified(&mut self, w: Window) {
        self.certified = w;
    }

    /// The certified window, extended past any window edge it reaches: a
    /// presentation certified up to its window edge is zero beyond it.
    pub fn trust(&self) -> Window {
        let (c, w) = (self.certified, self.window());
        Window::new(if c.lo <= w.lo { -UNBOUNDED } else { c.lo }, if c.hi >= w.hi { UNBOUNDED } else { c.hi })
    }

    /// Sets the certified window from a trust window.
    pub fn set_trust(&mut self, t: Window) {
        self.certified = t.intersect(&self.window());
    }
    pub fn is_zero(&self) -> bool {
        self.basis.total_dim() == 0
    }

    /// Same module with new basis labels.
    pub fn relabeled(&self, label: impl Fn(BasisRef, &str) -> String) -> Result<DgModule> {
        let mut out = self.clone();
        out.basis = GradedBasis::new(self.window());
        for r in self.basis.refs() {
            out.basis.push(r.degree, label(r, self.basis.label(r)))?;
        }
        Ok(out)
    }

    pub fn add_basis(&mut self, degree: i32, label: impl Into<String>) -> Result<BasisRef> {
        self.basis.push(degree, label)
    }

    fn check_target(&self, t: i32, len: usize) -> Result<()> {
        if t > self.window().hi {
            return Err(Error::Window(format!("entry lands in degree {t}, above the window")));
        }
        if len != self.dim(t) {
            return Err(Error::Dimension(format!("degree {t} needs {} coefficients", self.dim(t))));
        }
        Ok(())
    }

    pub fn set_left(&mut self, a: BasisRef, m: BasisRef, value: Vec<Scalar>) -> Result<()> {
        if !self.side.has_left() {
            return Err(Error::Validation(format!("module `{}` has no left action", self.name)));
        }
        self.check_target(a.degree + m.degree, value.len())?;
        if is_zero_vec(&value) {
            self.left.remove(&(a, m));
        } else {
            self.left.insert((a, m), value);
        }
        Ok(())
    }

    pub fn set_right(&mut self, m: BasisRef, a: BasisRef, value: Vec<Scalar>) -> Result<()> {
        if !self.side.has_right() {
            return Err(Error::Validation(format!("module `{}` has no right action", self.name)));
        }
        self.check_target(a.degree + m.degree, value.len())?;
        if is_zero_vec(&value) {
            self.right.remove(&(m, a));
        } else {
            self.right.insert((m, a), value);
        }
        Ok(())
    }

    pub fn set_diff(&mut self, m: BasisRef, value: Vec<Scalar>) -> Result<()> {
        self.check_target(m.degree + 1, value.len())?;
        if is_zero_vec(&value) {
            self.diff.remove(&m);
        } else {
            self.diff.insert(m, value);
        }
        Ok(())
    }

    pub fn set_left_labels(&mut self, a: &str, m: &str, terms: &[(Scalar, String)]) -> Result<()> {
        let ra = self.algebra.basis().get(a)?;
        let rm = self.basis.get(m)?;
        let t = ra.degree + rm.degree;
        if t > self.window().hi {
            return Err(Error::Window(format!("action `{a} {m}` lands in degree {t}, above the window")));
        }
        let v = combination(&self.basis, self.field(), t, terms)?;
        self.set_left(ra, rm, v)
    }

    pub fn set_right_labels(&mut self, m: &str, a: &str, terms: &[(Scalar, String)]) -> Result<()> {
        let ra = self.algebra.basis().get(a)?;
        let rm = self.basis.get(m)?;
        let t = ra.degree + rm.degree;
        if t > self.window().hi {
            return Err(Error::Window(format!("action `{m} {a}` lands in degree {t}, above the window")));
        }
        let v = combination(&self.basis, self.field(), t, terms)?;
        self.set_right(rm, ra, v)
    }

    pub fn set_diff_labels(&mut self, m: &str, terms: &[(Scalar, String)]) -> Result<()> {
        let rm = self.basis.get(m)?;
        let t = rm.degree + 1;
        if t > self.window().hi {
            return Err(Error::Window(format!("differential of `{m}` lands in degree {t}, above the window")));
        }
        let v = combination(&self.basis, self.field(), t, terms)?;
        self.set_diff(rm, v)
    }

    pub fn left_entries(&self) -> impl Iterator<Item = (&(BasisRef, BasisRef), &Vec<Scalar>)> {
        self.left.iter()
    }
    pub fn right_entries(&self) -> impl Iterator<Item = (&(BasisRef, BasisRef), &Vec<Scalar>)> {
        self.right.iter()
    }
    pub fn diff_entries(&self) -> impl Iterator<Item = (&BasisRef, &Vec<Scalar>)> {
        self.diff.iter()
    }

    fn recorded(&self, alg_degree: i32, target: i32) -> bool {
        alg_degree <= self.algebra.hi() && (target <= self.window().hi || self.trust().hi == UNBOUNDED)
    }

    pub fn left_basis(&self, a: BasisRef, m: BasisRef) -> Option<Vec<Scalar>> {
        let t = a.degree + m.degree;
        if !self.recorded(a.degree, t) {
            return None;
        }
        Some(self.left.get(&(a, m)).cloned().unwrap_or_else(|| self.field().zeros(self.dim(t))))
    }

    pub fn right_basis(&self, m: BasisRef, a: BasisRef) -> Option<Vec<Scalar>> {
        let t = a.degree + m.degree;
        if !self.recorded(a.degree, t) {
            return None;
        }
        Some(self.right.get(&(m, a)).cloned().unwrap_or_else(|| self.field().zeros(self.dim(t))))
    }

    /// `a·m` for homogeneous coordinate vectors.
    pub fn left_vec(&self, da: i32, a: &[Scalar], dm: i32, m: &[Scalar]) -> Option<Vec<Scalar>> {
        let t = da + dm;
        if !self.recorded(da, t) || da < 0 {
            return None;
        }
        let mut out = self.field().zeros(self.dim(t));
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in m.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                if let Some(v) = self.left.get(&(BasisRef::new(da, i), BasisRef::new(dm, j))) {
                    axpy(&mut out, &(x * y), v);
                }
            }
        }
        Some(out)
    }

    /// `m·a` for homogeneous coordinate vectors.
    pub fn right_vec(&self, dm: i32, m: &[Scalar], da: i32, a: &[Scalar]) -> Option<Vec<Scalar>> {
        let t = da + dm;
        if !self.recorded(da, t) || da < 0 {
            return None;
        }
        let mut out = self.field().zeros(self.dim(t));
        for (j, y) in m.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            for (i, x) in a.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                if let Some(v) = self.right.get(&(BasisRef::new(dm, j), BasisRef::new(da, i))) {
                    axpy(&mut out, &(x * y), v);
                }
            }
        }
        Some(out)
    }

    pub fn diff_basis(&self, m: BasisRef) -> Option<Vec<Scalar>> {
        let t = m.degree + 1;
        if t > self.window().hi {
            return None;
        }
        Some(self.diff.get(&m).cloned().unwrap_or_else(|| self.field().zeros(self.dim(t))))
    }

    pub fn diff_vec(&self, d: i32, v: &[Scalar]) -> Option<Vec<Scalar>> {
        if d + 1 > self.window().hi {
            return None;
        }
        let mut out = self.field().zeros(self.dim(d + 1));
        for (i, x) in v.iter().enumerate() {
            if let Some(w) = self.diff.get(&BasisRef::new(d, i)) {
                axpy(&mut out, x, w);
            }
        }
        Some(out)
    }

    pub fn basis_vector(&self, r: BasisRef) -> Vec<Scalar> {
        self.field().unit_vector(self.dim(r.degree), r.index)
    }

    pub fn diff_matrix(&self, d: i32) -> Matrix {
        let cols: Vec<Vec<Scalar>> = (0..self.dim(d))
            .map(|i| self.diff_basis(BasisRef::new(d, i)).unwrap_or_default())
            .collect();
        if d + 1 > self.window().hi {
            return Matrix::zero(self.field(), 0, self.dim(d));
        }
        Matrix::from_columns(self.field(), self.dim(d + 1), &cols)
    }

    pub fn as_complex(&self) -> Complex {
        let w = self.window();
        let mut c = Complex::new(self.field(), self.certified);
        for d in w.degrees() {
            c.dims.insert(d, self.dim(d));
            if d < w.hi {
                c.diffs.insert(d, self.diff_matrix(d));
            }
        }
        c
    }

    pub fn cohomology(&self) -> CohomologyReport {
        self.as_complex().cohomology()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();
        let a = &*self.algebra;
        let f = self.field();
        let al = |r: BasisRef| a.basis().label(r).to_string();
        let ml = |r: BasisRef| self.basis.label(r).to_string();
        let mrefs = self.basis.refs();
        let arefs = a.basis().refs();
        for &m in &mrefs {
            match self.diff_basis(m).and_then(|dm| self.diff_vec(m.degree + 1, &dm)) {
                Some(v) if !is_zero_vec(&v) => rep.push(Axiom::DifferentialSquare, vec![ml(m)]),
                Some(_) => {}
                None => rep.unrecorded += 1,
            }
        }
        if let Some(u) = a.unit() {
            for &m in &mrefs {
                let e = self.basis_vector(m);
                if self.side.has_left() && self.left_basis(u, m).as_ref() != Some(&e) {
                    rep.push(Axiom::LeftUnit, vec![ml(m)]);
                }
                if self.side.has_right() && self.right_basis(m, u).as_ref() != Some(&e) {
                    rep.push(Axiom::RightUnit, vec![ml(m)]);
                }
            }
        }
        for &x in &arefs {
            let ex = a.basis_vector(x);
            for &m in &mrefs {
                let em = self.basis_vector(m);
                let (dx, dm) = (x.degree, m.degree);
                let reach = dx + dm + 1;
                if self.side.has_left() {
                    let lhs = self.left_basis(x, m).and_then(|v| self.diff_vec(dx + dm, &v));
                    let t1 = a.diff_basis(x).and_then(|d| self.left_vec(dx + 1, &d, dm, &em));
                    let t2 = self.diff_basis(m).and_then(|d| self.left_vec(dx, &ex, dm + 1, &d));
                    match (lhs, t1, t2) {
                        (Some(l), Some(mut r), Some(r2)) if reach <= self.window().hi => {
                            axpy(&mut r, &f.sign(dx as i64), &r2);
                            if l != r {
                                rep.push(Axiom::LeftLeibniz, vec![al(x), ml(m)]);
                            }
                        }
                        _ => rep.unrecorded += 1,
                    }
                }
                if self.side.has_right() {
                    let lhs = self.right_basis(m, x).and_then(|v| self.diff_vec(dx + dm, &v));
                    let t1 = self.diff_basis(m).and_then(|d| self.right_vec(dm + 1, &d, dx, &ex));
                    let t2 = a.diff_basis(x).and_then(|d| self.right_vec(dm, &em, dx + 1, &d));
                    match (lhs, t1, t2) {
                        (Some(l), Some(mut r), Some(r2)) if reach <= self.window().hi => {
                            axpy(&mut r, &f.sign(dm as i64), &r2);
                            if l != r {
                                rep.push(Axiom::RightLeibniz, vec![ml(m), al(x)]);
                            }
                        }
                        _ => rep.unrecorded += 1,
                    }
                }
            }
        }
        for &x in &arefs {
            for &y in &arefs {
                let Some(xy) = a.mul_basis(x, y) else {
                    rep.unrecorded += 1;
                    continue;
                };
                let dxy = x.degree + y.degree;
                for &m in &mrefs {
                    let em = self.basis_vector(m);
                    if self.side.has_left() {
                        let lhs = self.left_vec(dxy, &xy, m.degree, &em);
                        let rhs = self
                            .left_basis(y, m)
                            .and_then(|ym| self.left_vec(x.degree, &a.basis_vector(x), y.degree + m.degree, &ym));
                        match (lhs, rhs) {
                            (Some(l), Some(r)) => {
                                if l != r {
                                    rep.push(Axiom::LeftAssociativity, vec![al(x), al(y), ml(m)]);
                                }
                            }
                            _ => rep.unrecorded += 1,
                        }
                    }
                    if self.side.has_right() {
                        let lhs = self.right_vec(m.degree, &em, dxy, &xy);
                        let rhs = self
                            .right_basis(m, x)
                            .and_then(|mx| self.right_vec(m.degree + x.degree, &mx, y.degree, &a.basis_vector(y)));
                        match (lhs, rhs) {
                            (Some(l), Some(r)) => {
                                if l != r {
                                    rep.push(Axiom::RightAssociativity, vec![ml(m), al(x), al(y)]);
                                }
                            }
                            _ => rep.unrecorded += 1,
                        }
                    }
                }
            }
        }
        if self.side == Side::Bi {
            for &x in &arefs {
                for &m in &mrefs {
                    for &y in &arefs {
                        let lhs = self
                            .left_basis(x, m)
                            .and_then(|xm| self.right_vec(x.degree + m.degree, &xm, y.degree, &a.basis_vector(y)));
                        let rhs = self
                            .right_basis(m, y)
                            .and_then(|my| self.left_vec(x.degree, &a.basis_vector(x), m.degree + y.degree, &my));
                        match (lhs, rhs) {
                            (Some(l), Some(r)) => {
                                if l != r {
                                    rep.push(Axiom::Commutation, vec![al(x), ml(m), al(y)]);
                                }
                            }
                            _ => rep.unrecorded += 1,
                        }
                    }
                }
            }
        }
        rep
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let rep = self.validate();
        match rep.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::Validation(format!(
                "module `{}` violates {:?} at ({})",
                self.name,
                v.axiom,
                v.witness.join(", ")
            ))),
        }
    }

    // ----- constructions -------------------------------------------------

    /// The algebra as a module over itself.
    pub fn free(algebra: Arc<DgAlgebra>, side: Side) -> DgModule {
        let a = algebra.clone();
        let mut m = DgModule::new(format!("{}-free", a.name()), algebra, side, a.window());
        for r in a.basis().refs() {
            m.add_basis(r.degree, a.basis().label(r)).unwrap();
        }
        for r in a.basis().refs() {
            if let Some(d) = a.diff_basis(r) {
                m.set_diff(r, d).unwrap();
            }
        }
        for (&(x, y), v) in a.mul_entries() {
            if side.has_left() {
                m.set_left(x, y, v.clone()).unwrap();
            }
            if side.has_right() {
                m.set_right(x, y, v.clone()).unwrap();
            }
        }
        if a.is_exhausted() {
            m.certified = a.window();
        }
        m
    }

    /// The canonical module `A / A^{≥1}`, one-dimensional in degree 0.
    pub fn canonical_k(algebra: Arc<DgAlgebra>, side: Side, window: Window) -> DgModule {
        let mut m = DgModule::new("k", algebra.clone(), side, window);
        let e = m.add_basis(0, "k").expect("window contains degree 0");
        if let Some(u) = algebra.unit() {
            let one = vec![algebra.field().one()];
            if side.has_left() {
                m.set_left(u, e, one.clone()).unwrap();
            }
            if side.has_right() {
                m.set_right(e, u, one).unwrap();
            }
        }
        m.certified = window;
        m
    }

    pub fn zero(algebra: Arc<DgAlgebra>, side: Side, window: Window) -> DgModule {
        let mut m = DgModule::new("0", algebra, side, window);
        m.certified = window;
        m
    }

    /// Copy with one action forgotten.
    pub fn restrict(&self, side: Side) -> Result<DgModule> {
        if (side.has_left() && !self.side.has_left()) || (side.has_right() && !self.side.has_right()) {
            return Err(Error::Unsupported(format!("cannot view a {} module as {side}", self.side)));
        }
        let mut out = self.clone();
        out.side = side;
        if !side.has_left() {
            out.left.clear();
        }
        if !side.has_right() {
            out.right.clear();
        }
        Ok(out)
    }

    /// Same data over the opposite algebra: a right `A`-module becomes a left
    /// `A^op`-module via `a ∗ m = (-1)^{|a||m|} m·a`, and vice versa.
    pub fn opposite_view(&self, opposite: Arc<DgAlgebra>) -> DgModule {
        let f = self.field();
        let sign = |a: BasisRef, m: BasisRef| f.sign((a.degree * m.degree) as i64);
        let mut out = self.clone();
        out.algebra = opposite;
        out.side = self.side.swapped();
        out.left = self.right.iter().map(|(&(m, a), v)| ((a, m), v.iter().map(|c| &sign(a, m) * c).collect())).collect();
        out.right = self.left.iter().map(|(&(a, m), v)| ((m, a), v.iter().map(|c| &sign(a, m) * c).collect())).collect();
        out
    }

    /// Hard truncation: the submodule `M^{≥ℓ}` and the quotient `M / M^{≥ℓ}`,
    /// with the inclusion and projection.
    pub fn hard_truncate(&self, l: i32) -> Truncation {
        let w = self.window();
        let sub_w = Window::new(w.lo.max(l), w.hi);
        let quot_w = Window::new(w.lo, w.hi.min(l - 1));
        let sub = self.restrict_to(sub_w, format!("{}^>={l}", self.name));
        let quot = self.restrict_to(quot_w, format!("{}/{}^>={l}", self.name, self.name));
        let mut sub = sub;
        sub.certified = Window::new(self.certified.lo.max(l).max(sub_w.lo), self.certified.hi);
        let mut quot = quot;
        quot.certified = Window::new(self.certified.lo, if l - 1 < w.hi { l - 1 } else { self.certified.hi });
        let inclusion = ModuleMap::identity_on_degrees(&sub, self);
        let projection = ModuleMap::identity_on_degrees(self, &quot);
        Truncation { sub, quot, inclusion, projection }
    }

    /// Restriction of all tables to the degrees in `w`. Entries leaving `w`
    /// are dropped; this is a submodule for `w = [ℓ, hi]` and a quotient for
    /// `w = [lo, ℓ-1]`.
    fn restrict_to(&self, w: Window, name: String) -> DgModule {
        let mut out = DgModule::new(name, self.algebra.clone(), self.side, w);
        let mut map = BTreeMap::new();
        for r in self.basis.refs() {
            if w.contains(r.degree) {
                let nr = out.add_basis(r.degree, self.basis.label(r)).unwrap();
                map.insert(r, nr);
            }
        }
        let keep = |d: i32| w.contains(d);
        for (&m, v) in &self.diff {
            if keep(m.degree) && keep(m.degree + 1) {
                out.diff.insert(map[&m], v.clone());
            }
        }
        for (&(a, m), v) in &self.left {
            if keep(m.degree) && keep(a.degree + m.degree) {
                out.left.insert((a, map[&m]), v.clone());
            }
        }
        for (&(m, a), v) in &self.right {
            if keep(m.degree) && keep(a.degree + m.degree) {
                out.right.insert((map[&m], a), v.clone());
            }
        }
        out.certified = self.certified.intersect(&w);
        out
    }

    /// `Σⁿ M`, with `(Σⁿ M)^j = M^{j+n}`, `∂(σm) = (-1)ⁿ σ∂m`,
    /// `a·σm = (-1)^{n|a|} σ(am)` and `σm·a = σ(ma)`.
    pub fn suspend(&self, n: i32) -> DgModule {
        let f = self.field();
        let mut out = DgModule::new(
            if n == 0 { self.name.clone() } else { format!("S^{n}({})", self.name) },
            self.algebra.clone(),
            self.side,
            self.window().shift(-n),
        );
        out.basis = self.basis.shifted(-n);
        let sh = |r: BasisRef| BasisRef::new(r.degree - n, r.index);
        let sd = f.sign(n as i64);
        out.diff = self.diff.iter().map(|(&m, v)| (sh(m), v.iter().map(|c| &sd * c).collect())).collect();
        out.left = self
            .left
            .iter()
            .map(|(&(a, m), v)| {
                let s = f.sign((n * a.degree) as i64);
                ((a, sh(m)), v.iter().map(|c| &s * c).collect())
            })
            .collect();
        out.right = self.right.iter().map(|(&(m, a), v)| ((sh(m), a), v.clone())).collect();
        out.certified = self.certified.shift(-n);
        out
    }

    /// `M^∨ = Hom_k(M, k)`. Sides swap; for `φ` dual to `M^{-j}`:
    /// `(∂φ)(m) = -(-1)^{|φ|} φ(∂m)`, `(φ·a)(m) = φ(a·m)`,
    /// `(a·φ)(m) = (-1)^{|a|} φ(m·a)`.
    pub fn linear_dual(&self) -> DgModule {
        let f = self.field();
        let mut out =
            DgModule::new(format!("{}^v", self.name), self.algebra.clone(), self.side.swapped(), self.window().negate());
        for r in self.basis.refs().into_iter().rev() {
            let _ = r;
        }
        for d in self.window().negate().degrees() {
            for l in self.basis.labels(-d) {
                out.add_basis(d, format!("{l}*")).unwrap();
            }
        }
        // Dual basis φ_i of degree -d pairs with basis element i of degree d.
        let dual = |r: BasisRef| BasisRef::new(-r.degree, r.index);
        for d in self.window().degrees() {
            // ∂: M^{d} -> M^{d+1} gives ∂φ for φ in degree -(d+1).
            if d + 1 > self.window().hi {
                continue;
            }
            let phi_deg = -(d + 1);
            let s = -&f.sign(phi_deg as i64);
            for i in 0..self.dim(d + 1) {
                let mut v = f.zeros(self.dim(d));
                for j in 0..self.dim(d) {
                    if let Some(col) = self.diff.get(&BasisRef::new(d, j)) {
                        v[j] = &s * &col[i];
                    }
                }
                if !is_zero_vec(&v) {
                    out.diff.insert(BasisRef::new(phi_deg, i), v);
                }
            }
        }
        // (φ·a)(m) = φ(a·m): coefficient of φ_m' in φ·a is φ(a·m').
        for (&(a, m), v) in &self.left {
            for (i, c) in v.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let phi = BasisRef::new(-(a.degree + m.degree), i);
                let target = dual(m);
                let entry = out.right.entry((phi, a)).or_insert_with(|| f.zeros(self.dim(m.degree)));
                entry[target.index] = &entry[target.index] + c;
            }
        }
        for (&(m, a), v) in &self.right {
            let s = f.sign(a.degree as i64);
            for (i, c) in v.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let phi = BasisRef::new(-(a.degree + m.degree), i);
                let target = dual(m);
                let entry = out.left.entry((a, phi)).or_insert_with(|| f.zeros(self.dim(m.degree)));
                entry[target.index] = &entry[target.index] + &(&s * c);
            }
        }
        out.left.retain(|_, v| !is_zero_vec(v));
        out.right.retain(|_, v| !is_zero_vec(v));
        // Cohomology of the dual at j is dual to H^{-j}(M): trusted where the
        // original was.
        out.certified = self.certified.negate();
        out
    }

    /// Twist of the right action: `m ⋆ a = m·α(a)`.
    pub fn twist(&self, alpha: &AlgebraAutomorphism) -> Result<DgModule> {
        if !self.side.has_right() {
            return Err(Error::Unsupported("twisting needs a right action".into()));
        }
        alpha.validate(&self.algebra)?;
        let a = &self.algebra;
        let mut out = self.clone();
        out.name = format!("{}^alpha", self.name);
        out.right.clear();
        for m in self.basis.refs() {
            for x in a.basis().refs() {
                let ax = alpha.apply(x.degree, &a.basis_vector(x));
                if let Some(v) = self.right_vec(m.degree, &self.basis_vector(m), x.degree, &ax) {
                    if !is_zero_vec(&v) {
                        out.right.insert((m, x), v);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Direct sum; clashing labels of the second summand get a `'` suffix.
    pub fn direct_sum(&self, other: &DgModule) -> Result<DgModule> {
        if self.side != other.side || self.algebra != other.algebra {
            return Err(Error::Unsupported("direct sum needs modules of the same kind".into()));
        }
        let w = Window::new(self.window().lo.min(other.window().lo), self.window().hi.min(other.window().hi));
        let mut out = DgModule::new(format!("{}+{}", self.name, other.name), self.algebra.clone(), self.side, w);
        let mut maps: [BTreeMap<BasisRef, BasisRef>; 2] = [BTreeMap::new(), BTreeMap::new()];
        for d in w.degrees() {
            for (k, src) in [self, other].into_iter().enumerate() {
                for (i, l) in src.basis.labels(d).iter().enumerate() {
                    let mut label = l.clone();
                    while out.basis.find(&label).is_some() {
                        label.push('\'');
                    }
                    let r = out.add_basis(d, label)?;
                    maps[k].insert(BasisRef::new(d, i), r);
                }
            }
        }
        for (k, src) in [self, other].into_iter().enumerate() {
            let embed = |deg: i32, v: &[Scalar], out: &DgModule| -> Vec<Scalar> {
                let mut e = out.field().zeros(out.dim(deg));
                for (i, c) in v.iter().enumerate() {
                    if let Some(r) = maps[k].get(&BasisRef::new(deg, i)) {
                        e[r.index] = c.clone();
                    }
                }
                e
            };
            for (&m, v) in &src.diff {
                if let Some(&nm) = maps[k].get(&m) {
                    if w.contains(m.degree + 1) {
                        let e = embed(m.degree + 1, v, &out);
                        out.diff.insert(nm, e);
                    }
                }
            }
            for (&(a, m), v) in &src.left {
                if let Some(&nm) = maps[k].get(&m) {
                    if w.contains(a.degree + m.degree) {
                        let e = embed(a.degree + m.degree, v, &out);
                        out.left.insert((a, nm), e);
                    }
                }
            }
            for (&(m, a), v) in &src.right {
                if let Some(&nm) = maps[k].get(&m) {
                    if w.contains(a.degree + m.degree) {
                        let e = embed(a.degree + m.degree, v, &out);
                        out.right.insert((nm, a), e);
                    }
                }
            }
        }
        out.set_trust(self.trust().intersect(&other.trust()));
        Ok(out)
    }

    /// Left multiplication by basis element `a` as a matrix `M^d -> M^{d+|a|}`.
    pub fn left_matrix(&self, a: BasisRef, d: i32) -> Option<Matrix> {
        let t = a.degree + d;
        if !self.recorded(a.degree, t) {
            return None;
        }
        let cols: Vec<Vec<Scalar>> = (0..self.dim(d)).map(|j| self.left_basis(a, BasisRef::new(d, j)).unwrap()).collect();
        Some(Matrix::from_columns(self.field(), self.dim(t), &cols))
    }
}

/// Output of [`DgModule::hard_truncate`].
#[derive(Clone, Debug)]
pub struct Truncation {
    pub sub: DgModule,
    pub quot: DgModule,
    pub inclusion: ModuleMap,
    pub projection: ModuleMap,
}

/// Degree-zero morphism of DG modules, given degreewise.
#[derive(Clone, Debug)]
pub struct ModuleMap {
    pub source: DgModule,
    pub target: DgModule,
    pub matrices: BTreeMap<i32, Matrix>,
}

impl ModuleMap {
    pub fn matrix(&self, d: i32) -> Matrix {
        self.matrices.get(&d).cloned().unwrap_or_else(|| {
            Matrix::zero(self.source.field(), self.target.dim(d), self.source.dim(d))
        })
    }

    pub fn apply(&self, d: i32, v: &[Scalar]) -> Vec<Scalar> {
        self.matrix(d).apply(v)
    }

    /// Map sending each basis label of `source` to the same label of
    /// `target` when present (inclusions and projections of truncations).
    pub fn identity_on_degrees(source: &DgModule, target: &DgModule) -> ModuleMap {
        let mut matrices = BTreeMap::new();
        for d in source.window().degrees() {
            let mut m = Matrix::zero(source.field(), target.dim(d), source.dim(d));
            for (i, l) in source.basis().labels(d).iter().enumerate() {
                if let Some(r) = target.basis().find(l) {
                    if r.degree == d {
                        m.set(r.index, i, source.field().one());
                    }
                }
            }
            matrices.insert(d, m);
        }
        ModuleMap { source: source.clone(), target: target.clone(), matrices }
    }

    pub fn identity(m: &DgModule) -> ModuleMap {
        ModuleMap::identity_on_degrees(m, m)
    }

    /// Right multiplication `Σ^{-|a|}A -> A`, `σx ↦ (-1)^{|x||a|} x·a`, a
    /// left-linear chain map when `a` is a cocycle.
    pub fn right_multiplication(algebra: Arc<DgAlgebra>, a: BasisRef) -> Result<ModuleMap> {
        let free = DgModule::free(algebra.clone(), Side::Left);
        let source = free.suspend(-a.degree);
        let mut matrices = BTreeMap::new();
        for d in source.window().degrees() {
            let sd = d - a.degree;
            let mut m = Matrix::zero(algebra.field(), free.dim(d), source.dim(d));
            if d <= algebra.hi() {
                for i in 0..source.dim(d) {
                    let x = BasisRef::new(sd, i);
                    if let Some(v) = algebra.mul_basis(x, a) {
                        let s = algebra.field().sign((sd * a.degree) as i64);
                        for (r, c) in v.into_iter().enumerate() {
                            m.set(r, i, &s * &c);
                        }
                    }
                }
            }
            matrices.insert(d, m);
        }
        let map = ModuleMap { source, target: free, matrices };
        Ok(map)
    }

    /// Checks the chain-map and linearity conditions in-window; returns the
    /// first failing degree or basis pair.
    pub fn validate(&self) -> Result<()> {
        let (s, t) = (&self.source, &self.target);
        for d in s.window().degrees() {
            if d + 1 > s.window().hi || d + 1 > t.window().hi {
                continue;
            }
            let lhs = self.matrix(d + 1).mul(&s.diff_matrix(d));
            let rhs = t.diff_matrix(d).mul(&self.matrix(d));
            if lhs != rhs {
                return Err(Error::Validation(format!("not a chain map in degree {d}")));
            }
        }
        let a = s.algebra();
        for x in a.basis().refs() {
            for m in s.basis().refs() {
                let em = s.basis_vector(m);
                if s.side().has_left() && t.side().has_left() {
                    if let (Some(am), Some(fm)) = (s.left_basis(x, m), Some(self.apply(m.degree, &em))) {
                        if let Some(afm) = t.left_vec(x.degree, &a.basis_vector(x), m.degree, &fm) {
                            if self.apply(x.degree + m.degree, &am) != afm {
                                return Err(Error::Validation(format!(
                                    "not left-linear at ({}, {})",
                                    a.basis().label(x),
                                    s.basis().label(m)
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Mapping cone: `C^n = S^{n+1} ⊕ T^n`, `d(s, t) = (-∂s, f(s) + ∂t)`,
    /// `a·(s, t) = ((-1)^{|a|} a·s, a·t)`, `(s, t)·b = (s·b, t·b)`.
    pub fn cone(&self) -> Result<DgModule> {
        let (s, t) = (&self.source, &self.target);
        if s.side() != t.side() {
            return Err(Error::Unsupported("cone of modules with different sides".into()));
        }
        let f = s.field();
        let w = Window::new((s.window().lo - 1).min(t.window().lo), (s.window().hi - 1).min(t.window().hi));
        let mut out = DgModule::new(format!("cone({}->{})", s.name(), t.name()), s.algebra().clone(), s.side(), w);
        // index layout per degree n: first S^{n+1}, then T^n.
        for n in w.degrees() {
            for l in s.basis().labels(n + 1) {
                out.add_basis(n, format!("s{l}"))?;
            }
            for l in t.basis().labels(n) {
                let mut label = l.clone();
                while out.basis().find(&label).is_some() {
                    label.push('\'');
                }
                out.add_basis(n, label)?;
            }
        }
        let pack = |n: i32, sv: &[Scalar], tv: &[Scalar]| -> Vec<Scalar> {
            let mut v = sv.to_vec();
            v.extend_from_slice(tv);
            debug_assert_eq!(v.len(), s.dim(n + 1) + t.dim(n));
            v
        };
        for n in w.degrees() {
            if n + 1 > w.hi {
                continue;
            }
            for i in 0..s.dim(n + 1) {
                let e = s.basis_vector(BasisRef::new(n + 1, i));
                let ds = s.diff_vec(n + 1, &e).unwrap_or_else(|| f.zeros(s.dim(n + 2)));
                let neg: Vec<Scalar> = ds.iter().map(|c| -c).collect();
                let fs = self.apply(n + 1, &e);
                let v = pack(n + 1, &neg, &fs);
                out.set_diff(BasisRef::new(n, i), v)?;
            }
            for j in 0..t.dim(n) {
                let e = t.basis_vector(BasisRef::new(n, j));
                let dt = t.diff_vec(n, &e).unwrap_or_else(|| f.zeros(t.dim(n + 1)));
                let v = pack(n + 1, &f.zeros(s.dim(n + 2)), &dt);
                out.set_diff(BasisRef::new(n, s.dim(n + 1) + j), v)?;
            }
        }
        let a = s.algebra().clone();
        for x in a.basis().refs() {
            let ex = a.basis_vector(x);
            for n in w.degrees() {
                let tgt = n + x.degree;
                if tgt > w.hi {
                    continue;
                }
                let sign = f.sign(x.degree as i64);
                for i in 0..s.dim(n + 1) {
                    let e = s.basis_vector(BasisRef::new(n + 1, i));
                    let r = BasisRef::new(n, i);
                    if s.side().has_left() {
                        if let Some(v) = s.left_vec(x.degree, &ex, n + 1, &e) {
                            let v: Vec<Scalar> = v.iter().map(|c| &sign * c).collect();
                            out.set_left(x, r, pack(tgt, &v, &f.zeros(t.dim(tgt))))?;
                        }
                    }
                    if s.side().has_right() {
                        if let Some(v) = s.right_vec(n + 1, &e, x.degree, &ex) {
                            out.set_right(r, x, pack(tgt, &v, &f.zeros(t.dim(tgt))))?;
                        }
                    }
                }
                for j in 0..t.dim(n) {
                    let e = t.basis_vector(BasisRef::new(n, j));
                    let r = BasisRef::new(n, s.dim(n + 1) + j);
                    if t.side().has_left() {
                        if let Some(v) = t.left_vec(x.degree, &ex, n, &e) {
                            out.set_left(x, r, pack(tgt, &f.zeros(s.dim(tgt + 1)), &v))?;
                        }
                    }
                    if t.side().has_right() {
                        if let Some(v) = t.right_vec(n, &e, x.degree, &ex) {
                            out.set_right(r, x, pack(tgt, &f.zeros(s.dim(tgt + 1)), &v))?;
                        }
                    }
                }
            }
        }
        let (st, tt) = (s.trust(), t.trust());
        out.set_trust(Window::new((st.lo - 1).max(tt.lo), (st.hi - 1).min(tt.hi)));
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::DgAlgebra;

    fn lambda() -> Arc<DgAlgebra> {
        let f = Field::Rationals;
        let mut a = DgAlgebra::new("L", f, 4);
        a.add_basis(0, "1").unwrap();
        a.add_basis(1, "t").unwrap();
        a.set_unit("1").unwrap();
        for l in ["1", "t"] {
            a.set_mul_labels("1", l, &[(f.one(), l.into())]).unwrap();
            a.set_mul_labels(l, "1", &[(f.one(), l.into())]).unwrap();
        }
        Arc::new(a)
    }

    #[test]
    fn free_and_k_are_valid() {
        let a = lambda();
        for side in [Side::Left, Side::Right, Side::Bi] {
            assert!(DgModule::free(a.clone(), side).validate().is_valid());
            assert!(DgModule::canonical_k(a.clone(), side, Window::new(-4, 4)).validate().is_valid());
        }
    }

    #[test]
    fn truncation_of_lambda() {
        let m = DgModule::free(lambda(), Side::Left);
        let t = m.hard_truncate(1);
        assert_eq!(t.sub.basis().total_dim(), 1);
        assert_eq!(t.sub.dim(1), 1);
        assert!(t.sub.validate().is_valid());
        assert!(t.quot.validate().is_valid());
        assert!(t.inclusion.validate().is_ok());
        assert!(t.projection.validate().is_ok());
        let vac = m.hard_truncate(-3);
        assert_eq!(vac.sub.basis().total_dim(), 2);
        assert_eq!(vac.quot.basis().total_dim(), 0);
    }

    #[test]
    fn suspension_shifts_cohomology() {
        let m = DgModule::free(lambda(), Side::Bi);
        let s = m.suspend(1);
        assert!(s.validate().is_valid());
        let h = s.cohomology();
        assert_eq!((h.dim(-1), h.dim(0)), (1, 1));
        assert_eq!(m.suspend(0), m);
    }

    #[test]
    fn dual_flips_degrees_and_sides() {
        let m = DgModule::free(lambda(), Side::Bi);
        let d = m.linear_dual();
        assert!(d.validate().is_valid(), "{:?}", d.validate().violations);
        assert_eq!((d.dim(-1), d.dim(0)), (1, 1));
        let k = DgModule::canonical_k(lambda(), Side::Left, Window::new(-2, 2)).linear_dual();
        assert_eq!(k.side(), Side::Right);
        assert_eq!(k.dim(0), 1);
    }

    #[test]
    fn dual_of_suspension_is_desuspended_dual() {
        let m = DgModule::free(lambda(), Side::Left);
        let lhs = m.suspend(2).linear_dual();
        let rhs = m.linear_dual().suspend(-2);
        for d in -6..6 {
            assert_eq!(lhs.dim(d), rhs.dim(d));
        }
        assert_eq!(lhs.cohomology().dims, rhs.cohomology().dims);
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let m = DgModule::free(lambda(), Side::Left);
        let c = ModuleMap::identity(&m).cone().unwrap();
        assert!(c.validate().is_valid(), "{:?}", c.validate().violations);
        assert!(c.cohomology().dims.is_empty());
    }
}
