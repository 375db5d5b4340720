//! Local cohomology of `H(M)` over a graded-commutative `H(A)`, by stable
//! Koszul complexes on a user-chosen system of parameters, laid out as the
//! `(ℓ, s)` page feeding `H(Γ M)`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::DgAlgebra;
use crate::basis::BasisRef;
use crate::error::{Error, Result};
use crate::field::{is_zero_vec, Field, Scalar};
use crate::linalg::{Matrix, Quotient};
use crate::module::{DgModule, Side};
use crate::resolution::{RegularityKind, RegularityValue};
use crate::window::{Window, UNBOUNDED};

/// How far below the module's lowest known degree the page is computed.
pub const PAGE_DEPTH: i32 = 16;

/// `H(M)` with chosen representatives, as a graded module over the classes
/// of cocycles of `A`.
#[derive(Clone, Debug)]
pub struct CohomologyModule {
    field: Field,
    module: DgModule,
    quotients: BTreeMap<i32, Quotient>,
    reps: BTreeMap<i32, Vec<Vec<Scalar>>>,
    known: Window,
}

impl CohomologyModule {
    pub fn new(m: &DgModule) -> Result<CohomologyModule> {
        if !m.side().has_left() {
            return Err(Error::Unsupported("local cohomology needs a left module".into()));
        }
        let c = m.as_complex();
        let mut quotients = BTreeMap::new();
        let mut reps = BTreeMap::new();
        for j in m.certified().degrees() {
            let q = c.cohomology_at(j);
            reps.insert(j, q.representatives());
            quotients.insert(j, q);
        }
        Ok(CohomologyModule { field: m.field(), module: m.clone(), quotients, reps, known: m.trust() })
    }

    pub fn known(&self) -> Window {
        self.known
    }

    pub fn dim(&self, j: i32) -> Option<usize> {
        if !self.known.contains(j) {
            return None;
        }
        Some(self.reps.get(&j).map_or(0, Vec::len))
    }

    /// Matrix of `[x]·−: H^j → H^{j+|x|}`, checked to be independent of
    /// representatives.
    pub fn action(&self, x: BasisRef, j: i32) -> Result<Option<Matrix>> {
        let t = j + x.degree;
        let (Some(rows), Some(cols)) = (self.dim(t), self.dim(j)) else { return Ok(None) };
        if rows == 0 || cols == 0 {
            return Ok(Some(Matrix::zero(self.field, rows, cols)));
        }
        let xv = self.module.algebra().basis_vector(x);
        let q = &self.quotients[&t];
        let image = |v: &[Scalar]| -> Result<Vec<Scalar>> {
            let w = self
                .module
                .left_vec(x.degree, &xv, j, v)
                .ok_or_else(|| Error::Window(format!("action into degree {t} is unrecorded")))?;
            q.project(&w).ok_or_else(|| Error::Validation(format!("`{}` times a cocycle is not a cocycle", self.module.algebra().basis().label(x))))
        };
        let boundaries = self.module.as_complex().differential(j - 1).image();
        for b in boundaries.basis() {
            if !is_zero_vec(&image(b)?) {
                return Err(Error::Validation(format!("action of `{}` on H^{j} depends on the representative", self.module.algebra().basis().label(x))));
            }
        }
        let columns = self.reps[&j].iter().map(|r| image(r)).collect::<Result<Vec<_>>>()?;
        Ok(Some(Matrix::from_columns(self.field, rows, &columns)))
    }

    /// `[x]^n` from `H^j`.
    pub fn power_action(&self, x: BasisRef, n: i32, j: i32) -> Result<Option<Matrix>> {
        let Some(mut acc) = self.dim(j).map(|d| Matrix::identity(self.field, d)) else { return Ok(None) };
        for k in 0..n {
            match self.action(x, j + k * x.degree)? {
                Some(m) => acc = m.mul(&acc),
                None => return Ok(None),
            }
        }
        Ok(Some(acc))
    }
}

/// Checks `xy = (-1)^{|x||y|} yx` on representatives of `H(A)`.
pub fn check_graded_commutative(a: &DgAlgebra) -> Result<()> {
    let c = a.as_complex();
    let f = a.field();
    let h: BTreeMap<i32, Quotient> = a.window().degrees().map(|j| (j, c.cohomology_at(j))).collect();
    for (&i, qi) in &h {
        for (&j, qj) in &h {
            if i > j || i + j > a.hi() {
                continue;
            }
            for x in qi.representatives() {
                for y in qj.representatives() {
                    let (Some(xy), Some(yx)) = (a.mul(i, &x, j, &y), a.mul(j, &y, i, &x)) else { continue };
                    let sign = f.sign((i * j) as i64);
                    let diff: Vec<Scalar> = xy.iter().zip(&yx).map(|(p, q)| p - &(&sign * q)).collect();
                    let class = h[&(i + j)].project(&diff).expect("products of cocycles are cocycles");
                    if !is_zero_vec(&class) {
                        return Err(Error::UnsupportedRegime(format!(
                            "H(A) is not graded-commutative in degrees ({i}, {j})"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct E2Entry {
    pub l: usize,
    pub s: i32,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct E2Page {
    pub parameters: Vec<String>,
    pub entries: Vec<E2Entry>,
    /// Internal degrees `s` for which every `ℓ` column was computed.
    pub range: Window,
    /// `(ℓ, s)` positions where the Koszul levels had not stabilized.
    pub unstable: Vec<(usize, i32)>,
    pub warnings: Vec<String>,
}

impl E2Page {
    pub fn get(&self, l: usize, s: i32) -> usize {
        self.entries.iter().find(|e| e.l == l && e.s == s).map_or(0, |e| e.dim)
    }
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn subsets(r: usize, l: usize) -> Vec<Vec<usize>> {
    (0u32..1 << r)
        .filter(|m| m.count_ones() as usize == l)
        .map(|m| (0..r).filter(|i| m & (1 << i) != 0).collect())
        .collect()
}

struct KoszulLevel {
    /// `(I, offset)` per `ℓ`, with the total dimension.
    layout: Vec<(Vec<(Vec<usize>, usize)>, usize)>,
    diffs: Vec<Matrix>,
}

/// Koszul complex `K(x^n; H(M))` in internal degree `s`: the summand for `I`
/// is `H^{s + n|x_I|}(M)`, standing for fractions `m / x_I^n`.
fn koszul_level(h: &CohomologyModule, params: &[BasisRef], n: i32, s: i32) -> Result<Option<KoszulLevel>> {
    let r = params.len();
    let deg = |set: &[usize]| -> i32 { set.iter().map(|&i| params[i].degree).sum() };
    let mut layout = Vec::new();
    for l in 0..=r {
        let mut parts = Vec::new();
        let mut total = 0;
        for set in subsets(r, l) {
            let Some(d) = h.dim(s + n * deg(&set)) else { return Ok(None) };
            parts.push((set, total));
            total += d;
        }
        layout.push((parts, total));
    }
    let mut diffs = Vec::new();
    for l in 0..r {
        let (src, cols) = &layout[l];
        let (dst, rows) = &layout[l + 1];
        let mut m = Matrix::zero(h.field, *rows, *cols);
        for (set, off) in src {
            let j = s + n * deg(set);
            for i in (0..r).filter(|i| !set.contains(i)) {
                let mut bigger = set.clone();
                bigger.push(i);
                bigger.sort_unstable();
                let (_, boff) = dst.iter().find(|(t, _)| *t == bigger).expect("subset present");
                let Some(block) = h.power_action(params[i], n, j)? else { return Ok(None) };
                let sign = h.field.sign(set.iter().filter(|&&k| k < i).count() as i64);
                for a in 0..block.rows() {
                    for b in 0..block.cols() {
                        let v = &sign * block.get(a, b);
                        if !v.is_zero() {
                            m.set(boff + a, off + b, v);
                        }
                    }
                }
            }
        }
        diffs.push(m);
    }
    Ok(Some(KoszulLevel { layout, diffs }))
}

fn koszul_cohomology(k: &KoszulLevel, l: usize, field: Field) -> Quotient {
    let n = k.layout[l].1;
    let cycles = if l < k.diffs.len() { k.diffs[l].kernel() } else { (0..n).map(|i| field.unit_vector(n, i)).collect() };
    let boundaries: Vec<Vec<Scalar>> =
        if l == 0 { Vec::new() } else { k.diffs[l - 1].image().basis().cloned().collect() };
    Quotient::new(field, n, &cycles, &boundaries).expect("Koszul differentials compose to zero")
}

/// Transition `K(x^n) → K(x^{n+1})`: multiplication by `x_I` on the summand `I`.
fn transition(h: &CohomologyModule, params: &[BasisRef], n: i32, s: i32, l: usize, from: &KoszulLevel, to: &KoszulLevel) -> Result<Option<Matrix>> {
    let deg = |set: &[usize]| -> i32 { set.iter().map(|&i| params[i].degree).sum() };
    let mut m = Matrix::zero(h.field, to.layout[l].1, from.layout[l].1);
    for ((set, off), (_, toff)) in from.layout[l].0.iter().zip(&to.layout[l].0) {
        let mut j = s + n * deg(set);
        let mut block = Matrix::identity(h.field, h.dim(j).unwrap_or(0));
        for &i in set {
            let Some(step) = h.action(params[i], j)? else { return Ok(None) };
            block = step.mul(&block);
            j += params[i].degree;
        }
        for a in 0..block.rows() {
            for b in 0..block.cols() {
                m.set(toff + a, off + b, block.get(a, b).clone());
            }
        }
    }
    Ok(Some(m))
}

/// Whether the transition induces an isomorphism on `H^ℓ`.
fn stable(q_from: &Quotient, q_to: &Quotient, t: &Matrix) -> bool {
    if q_from.dim() != q_to.dim() {
        return false;
    }
    let images: Vec<Vec<Scalar>> = q_from
        .representatives()
        .iter()
        .map(|r| q_to.project(&t.apply(r)).expect("chain maps send cycles to cycles"))
        .collect();
    Matrix::from_columns(t.field(), q_to.dim(), &images).rank() == q_to.dim()
}

fn resolve_parameters(a: &DgAlgebra, labels: &[String]) -> Result<Vec<BasisRef>> {
    let h = a.cohomology();
    labels
        .iter()
        .map(|l| {
            let x = a.basis().get(l)?;
            if x.degree <= 0 {
                return Err(Error::Validation(format!("parameter `{l}` must have positive degree")));
            }
            if a.diff_basis(x).is_some_and(|d| !is_zero_vec(&d)) {
                return Err(Error::Validation(format!("parameter `{l}` is not a cocycle")));
            }
            if h.dim(x.degree) == 0 {
                return Err(Error::Validation(format!("parameter `{l}` is a coboundary")));
            }
            if x.degree % 2 != 0 && a.field().characteristic() != 2 {
                return Err(Error::UnsupportedRegime(format!("parameter `{l}` has odd degree and squares to zero")));
            }
            Ok(x)
        })
        .collect()
}

/// Heuristic: `H(A)/(params)` should vanish in the upper half of the window.
fn sop_warning(a: &DgAlgebra, params: &[BasisRef]) -> Result<Option<String>> {
    let free = DgModule::free(std::sync::Arc::new(a.clone()), Side::Left);
    let h = CohomologyModule::new(&free)?;
    let hi = free.certified().hi;
    for t in (hi / 2).max(1)..=hi {
        let Some(total) = h.dim(t) else { continue };
        let mut ideal: Vec<Vec<Scalar>> = Vec::new();
        for &x in params {
            if let Some(m) = h.action(x, t - x.degree)? {
                ideal.extend(m.image().basis().cloned());
            }
        }
        let rank = Matrix::from_columns(a.field(), total, &ideal).rank();
        if rank < total {
            return Ok(Some(format!(
                "H(A)/(parameters) is nonzero in degree {t}: the parameters may not form a system of parameters"
            )));
        }
    }
    Ok(None)
}

/// The page `(ℓ, s) ↦ dim H^ℓ_m(H M)_s`.
pub fn cech_e2(m: &DgModule, parameters: &[String]) -> Result<E2Page> {
    let a = m.algebra();
    check_graded_commutative(a)?;
    let params = resolve_parameters(a, parameters)?;
    let h = CohomologyModule::new(m)?;
    let mut warnings: Vec<String> = sop_warning(a, &params)?.into_iter().collect();
    let known = h.known();
    let w = m.window();
    let step: i32 = params.iter().map(|x| x.degree).sum();
    let cap = if known.hi == UNBOUNDED { w.hi + step } else { known.hi };
    let floor = if known.lo == -UNBOUNDED { w.lo - PAGE_DEPTH } else { known.lo };
    let r = params.len();
    let mut entries = Vec::new();
    let mut unstable = Vec::new();
    let mut range: Option<(i32, i32)> = None;
    for s in floor..=cap {
        let level = if r == 0 { Some(1) } else { ((cap - s) / step >= 2).then_some((cap - s) / step) };
        let Some(n) = level else { continue };
        let Some(top) = koszul_level(&h, &params, n, s)? else { continue };
        let below = if r == 0 { None } else { koszul_level(&h, &params, n - 1, s)? };
        range = Some(range.map_or((s, s), |(lo, _)| (lo, s)));
        for l in 0..=r {
            let q = koszul_cohomology(&top, l, h.field);
            if let Some(prev) = &below {
                let qp = koszul_cohomology(prev, l, h.field);
                let ok = match transition(&h, &params, n - 1, s, l, prev, &top)? {
                    Some(t) => stable(&qp, &q, &t),
                    None => false,
                };
                if !ok {
                    unstable.push((l, s));
                }
            }
            if q.dim() > 0 {
                entries.push(E2Entry { l, s, dim: q.dim() });
            }
        }
    }
    let range = range.map_or(Window::new(0, -1), |(lo, hi)| Window::new(lo, hi));
    if !unstable.is_empty() {
        warnings.push(format!("{} positions did not stabilize", unstable.len()));
    }
    Ok(E2Page { parameters: parameters.to_vec(), entries, range, unstable, warnings })
}

/// `max{ℓ + s}` over the page, `-∞` when empty.
pub fn cmreg_bound_from_e2(page: &E2Page) -> RegularityValue {
    let note = "upper bound for CMreg; attained when the spectral sequence degenerates";
    match page.entries.iter().map(|e| e.l as i32 + e.s).max() {
        None => RegularityValue::new(RegularityKind::NegInfinity, page.range, note),
        Some(v) => RegularityValue::new(RegularityKind::Exact { value: v }, page.range, note),
    }
}
