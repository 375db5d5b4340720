//! Chain-level tensor products and Hom complexes.
//!
//! Semi-free modules are handled through a generator [`Ledger`]: the module
//! `⊕_g A·g` with `∂g = Σ_h a_{gh} h`. Tensoring a right module with a ledger
//! and taking Hom out of a ledger are then degreewise finite. Hom between two
//! finite presentations is also available by brute force.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::DgAlgebra;
use crate::basis::BasisRef;
use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::field::{axpy, is_zero_vec, Scalar};
use crate::linalg::{Matrix, Subspace};
use crate::module::{DgModule, Side};
use crate::window::{Window, UNBOUNDED};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LedgerGenerator {
    pub label: String,
    pub degree: i32,
    pub stage: usize,
}

/// Generators of a semi-free left module and their differentials.
#[derive(Clone, Debug)]
pub struct Ledger {
    pub algebra: Arc<DgAlgebra>,
    pub generators: Vec<LedgerGenerator>,
    /// `differential[g][h]` is the coefficient `a_{gh} ∈ A^{|g|+1-|h|}`.
    pub differential: Vec<BTreeMap<usize, Vec<Scalar>>>,
    /// No generators are missing.
    pub complete: bool,
    /// Lower bound on the degree of any missing generator.
    pub next_degree: Option<i32>,
}

impl Ledger {
    pub fn new(algebra: Arc<DgAlgebra>) -> Ledger {
        Ledger { algebra, generators: Vec::new(), differential: Vec::new(), complete: true, next_degree: None }
    }

    /// The algebra itself: one generator in degree 0.
    pub fn free(algebra: Arc<DgAlgebra>) -> Ledger {
        let mut l = Ledger::new(algebra);
        l.push("e0", 0, 0, BTreeMap::new());
        l
    }

    pub fn push(&mut self, label: impl Into<String>, degree: i32, stage: usize, diff: BTreeMap<usize, Vec<Scalar>>) -> usize {
        self.generators.push(LedgerGenerator { label: label.into(), degree, stage });
        self.differential.push(diff);
        self.generators.len() - 1
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }
    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
    pub fn min_degree(&self) -> Option<i32> {
        self.generators.iter().map(|g| g.degree).min()
    }
    pub fn max_degree(&self) -> Option<i32> {
        self.generators.iter().map(|g| g.degree).max()
    }

    /// Per-degree generator counts.
    pub fn counts(&self) -> BTreeMap<i32, usize> {
        let mut out = BTreeMap::new();
        for g in &self.generators {
            *out.entry(g.degree).or_insert(0) += 1;
        }
        out
    }

    /// First coefficient with a nonzero unit component, as (source, target).
    pub fn unit_coefficient(&self) -> Option<(usize, usize)> {
        for (g, row) in self.differential.iter().enumerate() {
            for (&h, a) in row {
                if self.generators[g].degree + 1 == self.generators[h].degree && !is_zero_vec(a) {
                    return Some((g, h));
                }
            }
        }
        None
    }

    /// The semi-free module `⊕_g A·g` on `window`, basis `a.g`.
    pub fn materialize(&self, window: Window) -> Result<DgModule> {
        Ok(self.materialize_indexed(window)?.0)
    }

    /// As [`Ledger::materialize`], also returning the position of each
    /// `(generator, algebra basis element)` pair.
    pub fn materialize_indexed(&self, window: Window) -> Result<(DgModule, BTreeMap<(usize, BasisRef), BasisRef>)> {
        let a = &self.algebra;
        let f = a.field();
        let mut m = DgModule::new("P", a.clone(), Side::Left, window);
        let mut index: BTreeMap<(usize, BasisRef), BasisRef> = BTreeMap::new();
        for d in window.degrees() {
            for (gi, g) in self.generators.iter().enumerate() {
                for i in 0..a.dim(d - g.degree) {
                    let ar = BasisRef::new(d - g.degree, i);
                    let r = m.add_basis(d, format!("{}.{}", a.basis().label(ar), g.label))?;
                    index.insert((gi, ar), r);
                }
            }
        }
        // Expresses Σ (coefficient, generator) as a vector in degree `t`.
        let place = |t: i32, parts: &[(usize, Vec<Scalar>)]| -> Vec<Scalar> {
            let mut v = f.zeros(m.dim(t));
            for (h, coeff) in parts {
                let dg = t - self.generators[*h].degree;
                for (i, c) in coeff.iter().enumerate() {
                    if !c.is_zero() {
                        let r = index[&(*h, BasisRef::new(dg, i))];
                        v[r.index] = &v[r.index] + c;
                    }
                }
            }
            v
        };
        let mut diffs = Vec::new();
        let mut lefts = Vec::new();
        for (&(gi, ar), &r) in &index {
            let t = r.degree + 1;
            if window.contains(t) {
                let ea = a.basis_vector(ar);
                let mut parts = Vec::new();
                if let Some(da) = a.diff_basis(ar) {
                    parts.push((gi, da));
                }
                let s = f.sign(ar.degree as i64);
                for (&h, coeff) in &self.differential[gi] {
                    let dc = self.generators[gi].degree + 1 - self.generators[h].degree;
                    if let Some(p) = a.mul(ar.degree, &ea, dc, coeff) {
                        parts.push((h, p.iter().map(|c| &s * c).collect()));
                    }
                }
                diffs.push((r, place(t, &parts)));
            }
            for b in a.basis().refs() {
                let t = r.degree + b.degree;
                if !window.contains(t) {
                    continue;
                }
                if let Some(p) = a.mul_basis(b, ar) {
                    lefts.push((b, r, place(t, &[(gi, p)])));
                }
            }
        }
        for (r, v) in diffs {
            m.set_diff(r, v)?;
        }
        for (b, r, v) in lefts {
            m.set_left(b, r, v)?;
        }
        let mut hi = window.hi - 1;
        if let Some(mu) = self.min_degree() {
            hi = hi.min(a.hi() + mu - 1);
        }
        if let Some(nu) = self.next_degree {
            hi = hi.min(nu - 2);
        }
        m.set_certified(Window::new(window.lo, hi));
        Ok((m, index))
    }
}

/// A derived complex, with its module structure when one is induced.
#[derive(Clone, Debug)]
pub struct Derived {
    pub module: DgModule,
    /// Whether `module` carries an action (otherwise only its differential
    /// and certified window are meaningful).
    pub has_action: bool,
}

impl Derived {
    pub fn complex(&self) -> Complex {
        self.module.as_complex()
    }
}

/// `X ⊗_A P` for a right (or bi) module `X` and a ledger `P` over the same
/// algebra. Degree `n` is `⊕_g X^{n-|g|} ⊗ g` with
/// `∂(x ⊗ g) = ∂x ⊗ g + (-1)^{|x|} Σ_h x·a_{gh} ⊗ h`.
/// If `X` is a bimodule the result is a left module via `a(x ⊗ g) = ax ⊗ g`.
pub fn tensor(x: &DgModule, p: &Ledger) -> Result<Derived> {
    if !x.side().has_right() {
        return Err(Error::Unsupported("tensor needs a right module on the left".into()));
    }
    if **x.algebra() != *p.algebra {
        return Err(Error::Unsupported("tensor factors live over different algebras".into()));
    }
    let f = x.field();
    let xw = x.window();
    let (mu, top) = match (p.min_degree(), p.max_degree()) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            let mut z = DgModule::zero(x.algebra().clone(), Side::Left, Window::new(0, 0));
            z.set_certified(z.window());
            return Ok(Derived { module: z, has_action: x.side() == Side::Bi });
        }
    };
    let w = Window::new(xw.lo + mu, xw.hi + top);
    let has_action = x.side() == Side::Bi;
    let side = Side::Left;
    let mut out = DgModule::new(format!("{}(x)P", x.name()), x.algebra().clone(), side, w);
    let mut index: BTreeMap<(usize, BasisRef), BasisRef> = BTreeMap::new();
    for n in w.degrees() {
        for (gi, g) in p.generators.iter().enumerate() {
            for (i, l) in x.basis().labels(n - g.degree).iter().enumerate() {
                let r = out.add_basis(n, format!("{l}(x){}", g.label))?;
                index.insert((gi, BasisRef::new(n - g.degree, i)), r);
            }
        }
    }
    let place = |t: i32, gi: usize, xv: &[Scalar], v: &mut Vec<Scalar>| {
        let dx = t - p.generators[gi].degree;
        for (i, c) in xv.iter().enumerate() {
            if !c.is_zero() {
                let r = index[&(gi, BasisRef::new(dx, i))];
                v[r.index] = &v[r.index] + c;
            }
        }
    };
    let mut diffs = Vec::new();
    let mut lefts = Vec::new();
    for (&(gi, xr), &r) in &index {
        let t = r.degree + 1;
        let ex = x.basis_vector(xr);
        if w.contains(t) {
            let mut v = f.zeros(out.dim(t));
            if let Some(dx) = x.diff_basis(xr) {
                place(t, gi, &dx, &mut v);
            }
            let s = f.sign(xr.degree as i64);
            for (&h, coeff) in &p.differential[gi] {
                let dc = p.generators[gi].degree + 1 - p.generators[h].degree;
                if let Some(xa) = x.right_vec(xr.degree, &ex, dc, coeff) {
                    let xa: Vec<Scalar> = xa.iter().map(|c| &s * c).collect();
                    place(t, h, &xa, &mut v);
                }
            }
            diffs.push((r, v));
        }
        if has_action {
            for b in x.algebra().basis().refs() {
                let t = r.degree + b.degree;
                if !w.contains(t) {
                    continue;
                }
                if let Some(bx) = x.left_basis(b, xr) {
                    let mut v = f.zeros(out.dim(t));
                    place(t, gi, &bx, &mut v);
                    lefts.push((b, r, v));
                }
            }
        }
    }
    for (r, v) in diffs {
        out.set_diff(r, v)?;
    }
    for (b, r, v) in lefts {
        out.set_left(b, r, v)?;
    }
    let trust = x.trust();
    let mut cert = Window::new(
        if trust.lo == -UNBOUNDED { -UNBOUNDED } else { xw.lo.max(trust.lo) + top + 1 },
        if trust.hi == UNBOUNDED { UNBOUNDED } else { xw.hi.min(trust.hi) + mu - 1 },
    );
    if let Some(nu) = p.next_degree {
        match x.basis().support() {
            Some((b, _)) if trust.lo == -UNBOUNDED => cert.hi = cert.hi.min(b + nu - 2),
            Some(_) => cert = Window::empty(),
            None => {}
        }
    }
    out.set_trust(cert);
    Ok(Derived { module: out, has_action })
}

/// `Hom_A(P, N)` for a ledger `P` and a left (or bi) module `N`.
/// Degree `j` is `Π_g N^{j+|g|}`, with
/// `d(f)(g) = ∂f(g) - (-1)^j Σ_h (-1)^{j|a_{gh}|} a_{gh}·f(h)`.
/// If `N` is a bimodule the result is a right module via
/// `(f·b)(g) = (-1)^{|b||g|} f(g)·b`.
pub fn hom_ledger(p: &Ledger, n: &DgModule) -> Result<Derived> {
    if !n.side().has_left() {
        return Err(Error::Unsupported("Hom target must be a left module".into()));
    }
    if **n.algebra() != *p.algebra {
        return Err(Error::Unsupported("Hom arguments live over different algebras".into()));
    }
    let f = n.field();
    let nw = n.window();
    let has_action = n.side() == Side::Bi;
    let (mu, top) = match (p.min_degree(), p.max_degree()) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            let mut z = DgModule::zero(n.algebra().clone(), Side::Right, Window::new(0, 0));
            z.set_certified(z.window());
            return Ok(Derived { module: z, has_action });
        }
    };
    let w = Window::new(nw.lo - top, nw.hi - mu);
    let mut out = DgModule::new(format!("Hom(P,{})", n.name()), n.algebra().clone(), Side::Right, w);
    let mut index: BTreeMap<(usize, BasisRef), BasisRef> = BTreeMap::new();
    for j in w.degrees() {
        for (gi, g) in p.generators.iter().enumerate() {
            for (i, l) in n.basis().labels(j + g.degree).iter().enumerate() {
                let r = out.add_basis(j, format!("[{}:{l}]", g.label))?;
                index.insert((gi, BasisRef::new(j + g.degree, i)), r);
            }
        }
    }
    let place = |j: i32, gi: usize, nv: &[Scalar], v: &mut Vec<Scalar>| {
        let dn = j + p.generators[gi].degree;
        for (i, c) in nv.iter().enumerate() {
            if !c.is_zero() {
                let r = index[&(gi, BasisRef::new(dn, i))];
                v[r.index] = &v[r.index] + c;
            }
        }
    };
    // Reverse lookup of the differential: for each h, the g with a_{gh} ≠ 0.
    let mut incoming: BTreeMap<usize, Vec<(usize, &Vec<Scalar>)>> = BTreeMap::new();
    for (g, row) in p.differential.iter().enumerate() {
        for (&h, a) in row {
            incoming.entry(h).or_default().push((g, a));
        }
    }
    let mut diffs = Vec::new();
    let mut rights = Vec::new();
    for (&(hi, yr), &r) in &index {
        let j = r.degree;
        let ey = n.basis_vector(yr);
        if w.contains(j + 1) {
            let mut v = f.zeros(out.dim(j + 1));
            if let Some(dy) = n.diff_basis(yr) {
                place(j + 1, hi, &dy, &mut v);
            }
            for &(g, a) in incoming.get(&hi).map(|x| x.as_slice()).unwrap_or(&[]) {
                let da = p.generators[g].degree + 1 - p.generators[hi].degree;
                if let Some(ay) = n.left_vec(da, a, yr.degree, &ey) {
                    let s = -&f.sign((j + j * da) as i64);
                    let ay: Vec<Scalar> = ay.iter().map(|c| &s * c).collect();
                    place(j + 1, g, &ay, &mut v);
                }
            }
            diffs.push((r, v));
        }
        if has_action {
            let gdeg = p.generators[hi].degree;
            for b in n.algebra().basis().refs() {
                let t = j + b.degree;
                if !w.contains(t) {
                    continue;
                }
                if let Some(yb) = n.right_basis(yr, b) {
                    let s = f.sign((b.degree * gdeg) as i64);
                    let yb: Vec<Scalar> = yb.iter().map(|c| &s * c).collect();
                    let mut v = f.zeros(out.dim(t));
                    place(t, hi, &yb, &mut v);
                    rights.push((r, b, v));
                }
            }
        }
    }
    for (r, v) in diffs {
        out.set_diff(r, v)?;
    }
    for (r, b, v) in rights {
        out.set_right(r, b, v)?;
    }
    let trust = n.trust();
    let mut cert = Window::new(
        if trust.lo == -UNBOUNDED { -UNBOUNDED } else { nw.lo.max(trust.lo) - mu + 1 },
        if trust.hi == UNBOUNDED { UNBOUNDED } else { nw.hi.min(trust.hi) - top - 1 },
    );
    if let Some(nu) = p.next_degree {
        match n.basis().support() {
            Some((_, t)) if trust.hi == UNBOUNDED => cert.lo = cert.lo.max(t - nu + 2),
            Some(_) => cert = Window::empty(),
            None => {}
        }
    }
    out.set_trust(cert);
    Ok(Derived { module: out, has_action })
}

/// Support of a module, required to lie in its certified window so that
/// the presentation is the whole module.
fn finite_support(m: &DgModule) -> Result<Option<(i32, i32)>> {
    match m.basis().support() {
        None => Ok(None),
        Some((lo, hi)) => {
            let c = m.certified();
            if !(c.contains(lo) && c.contains(hi)) {
                Err(Error::Window(format!("module `{}` is not certified on its support", m.name())))
            } else {
                Ok(Some((lo, hi)))
            }
        }
    }
}

/// `Hom_A(M, N)` of all `A`-linear maps between two finite presentations,
/// `f(am) = (-1)^{|f||a|} a f(m)`, `d(f) = ∂f - (-1)^{|f|} f∂`. A right action
/// `(f·b)(m) = (-1)^{|b||m|} f(m)·b` is induced when `N` is a bimodule.
pub fn brute_hom(m: &DgModule, n: &DgModule) -> Result<Derived> {
    if !m.side().has_left() || !n.side().has_left() {
        return Err(Error::Unsupported("brute-force Hom needs left modules".into()));
    }
    if m.algebra() != n.algebra() && **m.algebra() != **n.algebra() {
        return Err(Error::Unsupported("Hom arguments live over different algebras".into()));
    }
    let a = m.algebra().clone();
    let f = a.field();
    let has_action = n.side() == Side::Bi;
    let (ms, ns) = match (finite_support(m)?, finite_support(n)?) {
        (Some(x), Some(y)) => (x, y),
        _ => {
            let mut z = DgModule::zero(a, Side::Right, Window::new(0, 0));
            z.set_certified(z.window());
            return Ok(Derived { module: z, has_action });
        }
    };
    let w = Window::new(ns.0 - ms.1, ns.1 - ms.0);
    // Ambient coordinates of degree j: blocks (i, row r of N^{i+j}, col c of M^i).
    let offsets = |j: i32| -> (BTreeMap<i32, usize>, usize) {
        let mut off = BTreeMap::new();
        let mut total = 0;
        for i in ms.0..=ms.1 {
            off.insert(i, total);
            total += m.dim(i) * n.dim(i + j);
        }
        (off, total)
    };
    let value = |j: i32, off: &BTreeMap<i32, usize>, v: &[Scalar], mi: BasisRef| -> Vec<Scalar> {
        let rows = n.dim(mi.degree + j);
        let cols = m.dim(mi.degree);
        let base = off[&mi.degree];
        (0..rows).map(|r| v[base + r * cols + mi.index].clone()).collect()
    };
    let mut spaces: BTreeMap<i32, Subspace> = BTreeMap::new();
    for j in w.degrees() {
        let (off, total) = offsets(j);
        let mut rows: Vec<Vec<Scalar>> = Vec::new();
        if total > 0 {
            for x in a.basis().refs() {
                if x.degree == 0 {
                    continue;
                }
                let sign = f.sign((j * x.degree) as i64);
                for mr in m.basis().refs() {
                    let t = mr.degree + x.degree;
                    if t > ms.1 && n.dim(t + j) == 0 {
                        continue;
                    }
                    let Some(am) = m.left_basis(x, mr) else { continue };
                    // f(x m) - sign x f(m), one equation per coordinate of N^{t+j}.
                    let tr = n.dim(t + j);
                    for r in 0..tr {
                        let mut eq = f.zeros(total);
                        if ms.0 <= t && t <= ms.1 {
                            let cols = m.dim(t);
                            for (c, coef) in am.iter().enumerate() {
                                if !coef.is_zero() {
                                    let k = off[&t] + r * cols + c;
                                    eq[k] = &eq[k] + coef;
                                }
                            }
                        }
                        let src = mr.degree + j;
                        let cols = m.dim(mr.degree);
                        for s in 0..n.dim(src) {
                            let Some(xs) = n.left_basis(x, BasisRef::new(src, s)) else { continue };
                            let coef = &xs[r];
                            if !coef.is_zero() {
                                let k = off[&mr.degree] + s * cols + mr.index;
                                eq[k] = &eq[k] - &(&sign * coef);
                            }
                        }
                        if !is_zero_vec(&eq) {
                            rows.push(eq);
                        }
                    }
                }
            }
        }
        let kernel = if rows.is_empty() {
            (0..total).map(|i| f.unit_vector(total, i)).collect()
        } else {
            Matrix::from_rows(f, rows)?.kernel()
        };
        spaces.insert(j, Subspace::spanned_by(f, total, &kernel));
    }
    let mut out = DgModule::new(format!("Hom({},{})", m.name(), n.name()), a.clone(), Side::Right, w);
    let mut bases: BTreeMap<i32, Vec<Vec<Scalar>>> = BTreeMap::new();
    for j in w.degrees() {
        let b: Vec<Vec<Scalar>> = spaces[&j].basis().cloned().collect();
        for i in 0..b.len() {
            out.add_basis(j, format!("f{j}_{i}"))?;
        }
        bases.insert(j, b);
    }
    // Applies an ambient degree-j map to a basis element of M.
    let assemble = |j: i32, per_m: &dyn Fn(BasisRef) -> Vec<Scalar>| -> Vec<Scalar> {
        let (off, total) = offsets(j);
        let mut v = f.zeros(total);
        for mr in m.basis().refs() {
            let col = per_m(mr);
            let cols = m.dim(mr.degree);
            for (r, c) in col.into_iter().enumerate() {
                v[off[&mr.degree] + r * cols + mr.index] = c;
            }
        }
        v
    };
    for j in w.degrees() {
        if !w.contains(j + 1) {
            continue;
        }
        let (off, _) = offsets(j);
        let sign = f.sign(j as i64);
        for (i, fv) in bases[&j].iter().enumerate() {
            let df = assemble(j + 1, &|mr: BasisRef| {
                let fm = value(j, &off, fv, mr);
                let mut out = n.diff_vec(mr.degree + j, &fm).unwrap_or_else(|| f.zeros(n.dim(mr.degree + j + 1)));
                if let Some(dm) = m.diff_basis(mr) {
                    if mr.degree < ms.1 {
                        let fdm = value_of_vec(j, &off, fv, mr.degree + 1, &dm, m, n);
                        axpy(&mut out, &-&sign, &fdm);
                    }
                }
                out
            });
            let coords = spaces[&(j + 1)]
                .coordinates(&df)
                .ok_or_else(|| Error::Validation("differential leaves the Hom complex".into()))?;
            out.set_diff(BasisRef::new(j, i), coords)?;
        }
    }
    if has_action {
        for j in w.degrees() {
            let (off, _) = offsets(j);
            for (i, fv) in bases[&j].iter().enumerate() {
                for b in a.basis().refs() {
                    let t = j + b.degree;
                    if !w.contains(t) {
                        continue;
                    }
                    let fb = assemble(t, &|mr: BasisRef| {
                        let fm = value(j, &off, fv, mr);
                        let s = f.sign((b.degree * mr.degree) as i64);
                        let eb = a.basis_vector(b);
                        match n.right_vec(mr.degree + j, &fm, b.degree, &eb) {
                            Some(v) => v.iter().map(|c| &s * c).collect(),
                            None => f.zeros(n.dim(mr.degree + t)),
                        }
                    });
                    let coords = spaces[&t]
                        .coordinates(&fb)
                        .ok_or_else(|| Error::Validation("right action leaves the Hom complex".into()))?;
                    out.set_right(BasisRef::new(j, i), b, coords)?;
                }
            }
        }
    }
    out.set_certified(Window::new(w.lo - 1, w.hi + 1));
    Ok(Derived { module: out, has_action })
}

/// `f(v)` for `v ∈ M^d` with `f` of degree `j` given by ambient coordinates.
fn value_of_vec(
    j: i32,
    off: &BTreeMap<i32, usize>,
    fv: &[Scalar],
    d: i32,
    v: &[Scalar],
    m: &DgModule,
    n: &DgModule,
) -> Vec<Scalar> {
    let f = m.field();
    let rows = n.dim(d + j);
    let cols = m.dim(d);
    let mut out = f.zeros(rows);
    let Some(&base) = off.get(&d) else { return out };
    for (c, x) in v.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (r, o) in out.iter_mut().enumerate() {
            let e = &fv[base + r * cols + c];
            if !e.is_zero() {
                *o = &*o + &(x * e);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn lambda() -> Arc<DgAlgebra> {
        let f = Field::Rationals;
        let mut a = DgAlgebra::new("L", f, 6);
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
    fn free_ledger_materializes_to_the_algebra() {
        let a = lambda();
        let p = Ledger::free(a.clone()).materialize(Window::new(-2, 6)).unwrap();
        assert!(p.validate().is_valid());
        assert_eq!((p.dim(0), p.dim(1), p.dim(2)), (1, 1, 0));
    }

    #[test]
    fn tensor_with_free_is_identity() {
        let a = lambda();
        let k = DgModule::canonical_k(a.clone(), Side::Bi, Window::new(-4, 4));
        let t = tensor(&k, &Ledger::free(a.clone())).unwrap();
        assert!(t.module.validate().is_valid());
        assert_eq!(t.complex().cohomology().dims, k.cohomology().dims);
    }

    #[test]
    fn hom_from_free_is_identity() {
        let a = lambda();
        let n = DgModule::free(a.clone(), Side::Bi);
        let h = hom_ledger(&Ledger::free(a.clone()), &n).unwrap();
        assert!(h.module.validate().is_valid(), "{:?}", h.module.validate().violations);
        assert_eq!((h.module.dim(0), h.module.dim(1)), (1, 1));
    }

    #[test]
    fn brute_hom_into_dual_is_dual() {
        let a = lambda();
        let d = DgModule::free(a.clone(), Side::Bi).linear_dual();
        let k = DgModule::canonical_k(a.clone(), Side::Left, Window::new(-3, 3));
        let h = brute_hom(&k, &d).unwrap();
        assert!(h.module.validate().is_valid(), "{:?}", h.module.validate().violations);
        let dims = h.complex().cohomology().dims;
        assert_eq!(dims, BTreeMap::from([(0, 1)]));
        let h2 = brute_hom(&DgModule::free(a.clone(), Side::Left), &d).unwrap();
        assert_eq!(h2.complex().cohomology().dims, BTreeMap::from([(-1, 1), (0, 1)]));
    }
}
