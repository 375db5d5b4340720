//! Minimal semi-free resolutions by cycle killing, Ext regularity, the
//! Koszul test and truncation from above.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::DgAlgebra;
use crate::basis::BasisRef;
use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::field::{is_zero_vec, Scalar};
use crate::linalg::Matrix;
use crate::module::{DgModule, Side};
use crate::tensor_hom::{tensor, Ledger};
use crate::window::{Window, UNBOUNDED};

pub const DEFAULT_STAGES: usize = 8;
pub const DEFAULT_WINDOW: Window = Window::new(-16, 16);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RegularityKind {
    NegInfinity,
    Exact { value: i32 },
    AtLeast { value: i32 },
    PosInfinityClaimed { at_least: i32 },
    /// Nothing could be certified (e.g. no cohomology visible in a window
    /// that does not cover the whole object).
    Undetermined,
}

/// An extended integer with the evidence behind it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularityValue {
    #[serde(flatten)]
    pub kind: RegularityKind,
    pub certified: Window,
    pub note: String,
}

impl RegularityValue {
    pub fn new(kind: RegularityKind, certified: Window, note: impl Into<String>) -> RegularityValue {
        RegularityValue { kind, certified, note: note.into() }
    }

    pub fn exact(&self) -> Option<i32> {
        match self.kind {
            RegularityKind::Exact { value } => Some(value),
            _ => None,
        }
    }

    pub fn is_neg_infinity(&self) -> bool {
        self.kind == RegularityKind::NegInfinity
    }

    /// Interval of values compatible with the evidence.
    pub fn interval(&self) -> (Ext, Ext) {
        match self.kind {
            RegularityKind::NegInfinity => (Ext::NegInf, Ext::NegInf),
            RegularityKind::Exact { value } => (Ext::Fin(value as i64), Ext::Fin(value as i64)),
            RegularityKind::AtLeast { value } | RegularityKind::PosInfinityClaimed { at_least: value } => {
                (Ext::Fin(value as i64), Ext::PosInf)
            }
            RegularityKind::Undetermined => (Ext::NegInf, Ext::PosInf),
        }
    }
}

impl fmt::Display for RegularityValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            RegularityKind::NegInfinity => write!(f, "-inf"),
            RegularityKind::Exact { value } => write!(f, "{value}"),
            RegularityKind::AtLeast { value } => write!(f, ">= {value}"),
            RegularityKind::PosInfinityClaimed { at_least } => write!(f, "+inf (claimed, >= {at_least})"),
            RegularityKind::Undetermined => write!(f, "undetermined"),
        }
    }
}

/// Extended integers for interval comparisons.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Ext {
    NegInf,
    Fin(i64),
    PosInf,
}

impl Ext {
    /// Sum, with `-∞ + +∞` resolved towards `toward`.
    pub fn add(self, other: Ext, toward: Ext) -> Ext {
        match (self, other) {
            (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a + b),
            (Ext::NegInf, Ext::PosInf) | (Ext::PosInf, Ext::NegInf) => toward,
            (Ext::NegInf, _) | (_, Ext::NegInf) => Ext::NegInf,
            _ => Ext::PosInf,
        }
    }
}

impl Serialize for Ext {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Ext::Fin(n) => s.serialize_i64(*n),
            other => s.collect_str(other),
        }
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::NegInf => write!(f, "-inf"),
            Ext::Fin(n) => write!(f, "{n}"),
            Ext::PosInf => write!(f, "+inf"),
        }
    }
}

/// A (possibly truncated) minimal semi-free resolution `P → M`.
#[derive(Clone, Debug)]
pub struct SemifreeResolution {
    pub ledger: Ledger,
    /// `augmentation[g] ∈ M^{|g|}`.
    pub augmentation: Vec<Vec<Scalar>>,
    pub target: DgModule,
    pub stages: usize,
    /// Degrees in which the cone of the augmentation was inspected.
    pub checked: Window,
    /// Cohomology of the cone left in `checked` after the last stage.
    pub pending: BTreeMap<i32, usize>,
}

struct Cone {
    complex: Complex,
    /// For each cone degree c: dim P^{c+1}.
    p_dims: BTreeMap<i32, usize>,
    index: BTreeMap<(usize, BasisRef), BasisRef>,
}

impl SemifreeResolution {
    pub fn algebra(&self) -> &Arc<DgAlgebra> {
        &self.ledger.algebra
    }

    pub fn complete(&self) -> bool {
        self.ledger.complete
    }

    /// Minimal when no coefficient has a unit component.
    pub fn is_minimal(&self) -> (bool, Option<(String, String)>) {
        match self.ledger.unit_coefficient() {
            None => (true, None),
            Some((g, h)) => {
                (false, Some((self.ledger.generators[g].label.clone(), self.ledger.generators[h].label.clone())))
            }
        }
    }

    /// The resolution as a left module on `window`.
    pub fn materialize(&self, window: Window) -> Result<DgModule> {
        self.ledger.materialize(window)
    }

    /// Checks that the augmentation is a chain map on the checked window.
    pub fn augmentation_is_chain_map(&self) -> Result<bool> {
        let Some(mu) = self.ledger.min_degree() else { return Ok(true) };
        let w = Window::new(mu, self.checked.hi + 1);
        let (p, index) = self.ledger.materialize_indexed(w)?;
        let eps = augmentation_matrices(&self.ledger, &self.augmentation, &self.target, &p, &index, w);
        for d in w.degrees() {
            if d + 1 > w.hi {
                continue;
            }
            let lhs = eps[&(d + 1)].mul(&p.diff_matrix(d));
            let rhs = self.target.diff_matrix(d).mul(&eps[&d]);
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn augmentation_matrices(
    ledger: &Ledger,
    aug: &[Vec<Scalar>],
    m: &DgModule,
    p: &DgModule,
    index: &BTreeMap<(usize, BasisRef), BasisRef>,
    w: Window,
) -> BTreeMap<i32, Matrix> {
    let f = m.field();
    let a = &ledger.algebra;
    let mut out: BTreeMap<i32, Matrix> = w.degrees().map(|d| (d, Matrix::zero(f, m.dim(d), p.dim(d)))).collect();
    for (&(gi, ar), &r) in index {
        let g = &ledger.generators[gi];
        let v = m
            .left_vec(ar.degree, &a.basis_vector(ar), g.degree, &aug[gi])
            .unwrap_or_else(|| f.zeros(m.dim(r.degree)));
        let mat = out.get_mut(&r.degree).unwrap();
        for (i, c) in v.into_iter().enumerate() {
            mat.set(i, r.index, c);
        }
    }
    out
}

/// `cone^c = P^{c+1} ⊕ M^c`, `d(p, m) = (∂p, ε(p) - ∂m)`, on degrees `cw`.
fn cone(ledger: &Ledger, aug: &[Vec<Scalar>], m: &DgModule, cw: Window) -> Result<Cone> {
    let f = m.field();
    let pw = Window::new(cw.lo, cw.hi + 2);
    let (p, index) = ledger.materialize_indexed(pw)?;
    let eps = augmentation_matrices(ledger, aug, m, &p, &index, pw);
    let mut complex = Complex::new(f, cw);
    let mut p_dims = BTreeMap::new();
    for c in cw.lo - 1..=cw.hi + 1 {
        complex.dims.insert(c, p.dim(c + 1) + m.dim(c));
        p_dims.insert(c, p.dim(c + 1));
    }
    for c in cw.lo - 1..=cw.hi {
        let (pa, ma) = (p.dim(c + 1), m.dim(c));
        let (pb, mb) = (p.dim(c + 2), m.dim(c + 1));
        let mut d = Matrix::zero(f, pb + mb, pa + ma);
        let dp = p.diff_matrix(c + 1);
        let dm = m.diff_matrix(c);
        let e = eps.get(&(c + 1));
        for i in 0..pa {
            for r in 0..pb {
                if dp.rows() > r {
                    d.set(r, i, dp.get(r, i).clone());
                }
            }
            if let Some(e) = e {
                for r in 0..mb {
                    d.set(pb + r, i, e.get(r, i).clone());
                }
            }
        }
        for j in 0..ma {
            for r in 0..mb {
                if dm.rows() > r {
                    d.set(pb + r, pa + j, -dm.get(r, j));
                }
            }
        }
        complex.diffs.insert(c, d);
    }
    Ok(Cone { complex, p_dims, index })
}

/// Highest cone degree whose cohomology the current ledger can see.
fn cone_top(ledger: &Ledger, m: &DgModule, w: Window) -> i32 {
    let mut top = if m.trust().hi == UNBOUNDED { w.hi } else { w.hi.min(m.certified().hi).min(m.window().hi - 1) };
    if let Some(mu) = ledger.min_degree() {
        top = top.min(ledger.algebra.hi() + mu - 2);
    }
    top
}

/// Minimal semi-free resolution of a left module by cycle killing. Each
/// stage kills a basis of the lowest nonzero cohomology of the cone of the
/// augmentation; new generators get the degree of the class they kill.
pub fn resolve(m: &DgModule, max_stages: usize, w: Window) -> Result<SemifreeResolution> {
    if !m.side().has_left() {
        return Err(Error::Unsupported("resolve a right module over the opposite algebra".into()));
    }
    let a = m.algebra().clone();
    let f = a.field();
    let lo = w.lo.max(m.certified().lo).max(m.window().lo);
    let mut ledger = Ledger::new(a.clone());
    ledger.complete = false;
    let mut aug: Vec<Vec<Scalar>> = Vec::new();
    if lo > cone_top(&ledger, m, w) {
        return Err(Error::DegenerateWindow(format!(
            "no degree of window {w} is certified for `{}` (certified {})",
            m.name(),
            m.certified()
        )));
    }
    let mut stages = 0;
    loop {
        let top = cone_top(&ledger, m, w);
        if lo > top {
            return Err(Error::DegenerateWindow(format!("window {w} too small for the algebra window")));
        }
        let cw = Window::new(lo, top);
        let cn = cone(&ledger, &aug, m, cw)?;
        let mut pending = BTreeMap::new();
        let mut first: Option<(i32, Vec<Vec<Scalar>>)> = None;
        for c in cw.degrees() {
            let q = cn.complex.cohomology_at(c);
            if q.dim() > 0 {
                pending.insert(c, q.dim());
                if first.is_none() {
                    first = Some((c, q.representatives()));
                }
            }
        }
        let Some((c, reps)) = first.filter(|_| stages < max_stages) else {
            let maxgen = ledger.max_degree();
            let acyclic = pending.is_empty();
            ledger.complete = acyclic && maxgen.is_none_or(|g| top >= g + 2);
            ledger.next_degree = if ledger.complete {
                None
            } else {
                Some(pending.keys().next().copied().unwrap_or(top + 1))
            };
            return Ok(SemifreeResolution { ledger, augmentation: aug, target: m.clone(), stages, checked: cw, pending });
        };
        let pd = cn.p_dims[&c];
        let mut by_position: BTreeMap<BasisRef, (usize, BasisRef)> = BTreeMap::new();
        for (&k, &r) in &cn.index {
            by_position.insert(r, k);
        }
        let base = ledger.len();
        for (i, v) in reps.into_iter().enumerate() {
            let mut diff: BTreeMap<usize, Vec<Scalar>> = BTreeMap::new();
            for (pi, coef) in v[..pd].iter().enumerate() {
                if coef.is_zero() {
                    continue;
                }
                let (h, ar) = by_position[&BasisRef::new(c + 1, pi)];
                let entry = diff.entry(h).or_insert_with(|| f.zeros(a.dim(ar.degree)));
                entry[ar.index] = &entry[ar.index] + coef;
            }
            diff.retain(|_, v| !is_zero_vec(v));
            ledger.push(format!("e{}", base + i), c, stages, diff);
            aug.push(v[pd..].to_vec());
        }
        stages += 1;
    }
}

/// Resolution of any module: right modules are resolved over the opposite
/// algebra, whose `Arc` is supplied.
pub fn resolve_any(m: &DgModule, opposite: &Arc<DgAlgebra>, max_stages: usize, w: Window) -> Result<SemifreeResolution> {
    if m.side().has_left() {
        resolve(m, max_stages, w)
    } else {
        resolve(&m.opposite_view(opposite.clone()), max_stages, w)
    }
}

/// Ext regularity read off a resolution.
pub fn ext_reg_of(res: &SemifreeResolution) -> RegularityValue {
    let cw = res.checked;
    let a = res.algebra();
    let maxgen = res.ledger.max_degree();
    let lowest_pending = res.pending.keys().next().copied();
    match (maxgen, lowest_pending) {
        (None, None) => {
            return RegularityValue::new(RegularityKind::NegInfinity, cw, "cone of the zero map is acyclic: H(M) = 0");
        }
        (Some(g), None) if cw.hi >= g + 2 => {
            return RegularityValue::new(
                RegularityKind::Exact { value: g },
                cw,
                format!("cone acyclic on {cw}, which reaches two degrees above the last generator"),
            );
        }
        _ => {}
    }
    let bound = maxgen.into_iter().chain(lowest_pending).max().unwrap();
    if let Some(n) = lowest_pending {
        if res.pending.len() == 1 && cw.hi >= n + 2 && square_zero_with_short_cohomology(a) {
            return RegularityValue::new(
                RegularityKind::Exact { value: n },
                cw,
                format!(
                    "classes left only in degree {n}; A^{{>=1}}A^{{>=1}} = 0 and H(A) vanishes above 1, so later generators stay in degree {n}"
                ),
            );
        }
    }
    if let Some((drift, at_least)) = periodic_tail(&res.ledger) {
        return RegularityValue::new(
            RegularityKind::PosInfinityClaimed { at_least: at_least.max(bound) },
            cw,
            format!("the last stages each add one generator with the same coefficient, {drift} degrees higher"),
        );
    }
    RegularityValue::new(RegularityKind::AtLeast { value: bound }, cw, "stage budget or window exhausted")
}

fn square_zero_with_short_cohomology(a: &DgAlgebra) -> bool {
    if !a.positive_square_zero() {
        return false;
    }
    let h = a.cohomology();
    h.dims.keys().all(|&d| d <= 1)
}

/// Detects a tail of three stages, each one generator whose differential is
/// the same coefficient times the previous stage's generator, with a
/// constant positive degree increase.
fn periodic_tail(ledger: &Ledger) -> Option<(i32, i32)> {
    let mut per_stage: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, g) in ledger.generators.iter().enumerate() {
        per_stage.entry(g.stage).or_default().push(i);
    }
    let stages: Vec<&Vec<usize>> = per_stage.values().collect();
    if stages.len() < 4 {
        return None;
    }
    let tail: Vec<usize> = stages[stages.len() - 4..]
        .iter()
        .map(|v| (v.len() == 1).then(|| v[0]))
        .collect::<Option<_>>()?;
    let mut coeff: Option<&Vec<Scalar>> = None;
    let mut drift = None;
    for w in tail.windows(2) {
        let (prev, g) = (w[0], w[1]);
        let row = &ledger.differential[g];
        let c = row.get(&prev).filter(|_| row.len() == 1)?;
        if coeff.is_some_and(|k| k != c) {
            return None;
        }
        coeff = Some(c);
        let dd = ledger.generators[g].degree - ledger.generators[prev].degree;
        if dd <= 0 || drift.is_some_and(|x| x != dd) {
            return None;
        }
        drift = Some(dd);
    }
    drift.map(|d| (d, ledger.generators[tail[3]].degree))
}

/// `Extreg M = -inf RHom_A(M, k)`, read off the minimal resolution.
pub fn ext_reg(m: &DgModule, max_stages: usize, w: Window) -> Result<(RegularityValue, SemifreeResolution)> {
    let res = resolve(m, max_stages, w)?;
    Ok((ext_reg_of(&res), res))
}

#[derive(Clone, Debug, Serialize)]
pub struct KoszulReport {
    /// `None` when the evidence is inconclusive.
    pub koszul: Option<bool>,
    pub inf: Option<i32>,
    pub extreg: RegularityValue,
    pub note: String,
}

/// Koszul test: `H(M) = 0`, or `inf M = Extreg M = 0`.
pub fn koszul_test(m: &DgModule, max_stages: usize, w: Window) -> Result<KoszulReport> {
    let h = m.cohomology();
    let (extreg, _) = ext_reg(m, max_stages, w)?;
    let inf = h.inf();
    if extreg.is_neg_infinity() {
        return Ok(KoszulReport { koszul: Some(true), inf, extreg, note: "H(M) = 0".into() });
    }
    let (koszul, note) = match (inf, extreg.kind) {
        (Some(i), _) if i != 0 => (Some(false), format!("inf M = {i}")),
        (_, RegularityKind::Exact { value: 0 }) => (Some(true), "inf M = Extreg M = 0".into()),
        (_, RegularityKind::Exact { value }) => (Some(false), format!("Extreg M = {value}")),
        (_, RegularityKind::AtLeast { value }) if value > 0 => (Some(false), format!("Extreg M >= {value}")),
        (_, RegularityKind::PosInfinityClaimed { .. }) => (Some(false), "Extreg M claimed infinite".into()),
        _ => (None, "Extreg M not certified".into()),
    };
    Ok(KoszulReport { koszul, inf, extreg, note })
}

/// Koszul test of an algebra: its canonical module.
pub fn koszul_test_algebra(a: &Arc<DgAlgebra>, max_stages: usize, w: Window) -> Result<KoszulReport> {
    let k = DgModule::canonical_k(a.clone(), Side::Left, w);
    koszul_test(&k, max_stages, w)
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    pub left: RegularityValue,
    pub right: RegularityValue,
    /// `None` when either side is uncertified.
    pub equal: Option<bool>,
    pub left_tor_dims: BTreeMap<i32, usize>,
    pub right_tor_dims: BTreeMap<i32, usize>,
    pub tor_dims_agree: bool,
}

/// Extreg of `k` as a left and as a right module, and the Tor comparison
/// `k ⊗_A P(_A k)` against `k ⊗_{A^op} P(k_A)`.
pub fn extreg_symmetry(a: &Arc<DgAlgebra>, max_stages: usize, w: Window) -> Result<SymmetryReport> {
    let op = Arc::new(a.opposite());
    let kl = DgModule::canonical_k(a.clone(), Side::Left, w);
    let kr = DgModule::canonical_k(op.clone(), Side::Left, w);
    let (left, pl) = ext_reg(&kl, max_stages, w)?;
    let (right, pr) = ext_reg(&kr, max_stages, w)?;
    let equal = match (left.kind, right.kind) {
        (RegularityKind::Exact { value: x }, RegularityKind::Exact { value: y }) => Some(x == y),
        (RegularityKind::NegInfinity, RegularityKind::NegInfinity) => Some(true),
        _ => None,
    };
    let tl = tensor(&DgModule::canonical_k(a.clone(), Side::Bi, w), &pl.ledger)?;
    let tr = tensor(&DgModule::canonical_k(op.clone(), Side::Bi, w), &pr.ledger)?;
    let dims = |c: &Complex| c.dims.iter().filter(|(_, n)| **n > 0).map(|(d, n)| (*d, *n)).collect::<BTreeMap<_, _>>();
    let (cl, cr) = (tl.complex(), tr.complex());
    let left_tor_dims = dims(&cl);
    let right_tor_dims = dims(&cr);
    let tor_dims_agree = left_tor_dims == right_tor_dims && cl.cohomology().dims == cr.cohomology().dims;
    Ok(SymmetryReport { left, right, equal, left_tor_dims, right_tor_dims, tor_dims_agree })
}

#[derive(Clone, Debug, Serialize)]
pub struct QuasiIsoCertificate {
    pub window: Window,
    pub source_dims: BTreeMap<i32, usize>,
    pub target_dims: BTreeMap<i32, usize>,
    pub agree: bool,
}

pub fn compare_cohomology(x: &DgModule, y: &DgModule) -> QuasiIsoCertificate {
    let window = x.certified().intersect(&y.certified());
    let source_dims = x.cohomology().dims_in(&window);
    let target_dims = y.cohomology().dims_in(&window);
    let agree = source_dims == target_dims;
    QuasiIsoCertificate { window, source_dims, target_dims, agree }
}

/// A module quasi-isomorphic to `M` and zero above `s`: resolve `M^∨` over
/// `A^op` (generators in degrees `>= -s`) and dualize back.
pub fn truncate_above(m: &DgModule, s: i32, max_stages: usize) -> Result<(DgModule, QuasiIsoCertificate)> {
    if !m.side().has_left() || m.side() == Side::Bi {
        return Err(Error::Unsupported("truncation from above takes a left module".into()));
    }
    let h = m.cohomology();
    if let Some((&j, _)) = h.dims.iter().find(|(j, _)| **j > s && h.certified.contains(**j)) {
        return Err(Error::TruncationImpossible(format!("H^{j} of `{}` is nonzero and {j} > {s}", m.name())));
    }
    if m.basis().support().is_none_or(|(_, hi)| hi <= s) {
        let cert = compare_cohomology(m, m);
        return Ok((m.clone(), cert));
    }
    let a = m.algebra().clone();
    let op = Arc::new(a.opposite());
    let n = m.linear_dual().opposite_view(op);
    let w = n.window();
    let res = resolve(&n, max_stages, w)?;
    let top = res.checked.hi + 1;
    let lo = res.ledger.min_degree().unwrap_or(-s);
    let p = res.materialize(Window::new(lo.min(top), top))?;
    let mut out = p.linear_dual().opposite_view(a);
    out.set_name(format!("{}<={s}", m.name()));
    let cert = compare_cohomology(m, &out);
    Ok((out, cert))
}
