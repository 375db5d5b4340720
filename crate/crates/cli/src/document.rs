//! The line-oriented presentation format.
//!
//! ```text
//! algebra L over Q window 0..16
//! basis 0: 1
//! basis 1: t
//! unit 1
//! mul 1 t = t
//! module k over L side left window -16..16
//! basis 0: k
//! act 1 k = k
//! ```
//!
//! Combinations are `c1*lbl1 + c2*lbl2` with spaces around the binary signs;
//! a bare `0` is the zero combination. Entries that are not listed are zero,
//! except products and actions with the unit, which default to the identity.
//! Beyond the documented statements, modules accept `certified LO..HI` and
//! automorphisms are written `automorphism NAME of ALG` followed by
//! `map lbl = …` lines (unlisted basis elements are fixed).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use cochain_core::algebra::{AlgebraAutomorphism, DgAlgebra};
use cochain_core::basis::{BasisRef, GradedBasis};
use cochain_core::field::{Field, Scalar};
use cochain_core::linalg::Matrix;
use cochain_core::module::{DgModule, Side};
use cochain_core::window::Window;
use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

type Parsed<T> = std::result::Result<T, ParseError>;

#[derive(Clone, Debug, Default)]
pub struct Document {
    pub algebras: BTreeMap<String, Arc<DgAlgebra>>,
    pub modules: BTreeMap<String, DgModule>,
    pub automorphisms: BTreeMap<String, (String, AlgebraAutomorphism)>,
    /// Object names in source order.
    pub order: Vec<String>,
}

impl Document {
    pub fn algebra(&self, name: Option<&str>) -> Option<&Arc<DgAlgebra>> {
        match name {
            Some(n) => self.algebras.get(n),
            None => self.order.iter().find_map(|n| self.algebras.get(n)),
        }
    }
}

/// A statement with its source position.
#[derive(Clone, Debug)]
struct Stmt {
    line: usize,
    text: String,
}

impl Stmt {
    fn err(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column, message: message.into() }
    }

    /// Column (1-based) of `needle` in the statement, or 1.
    fn col(&self, needle: &str) -> usize {
        self.text.find(needle).map_or(1, |i| i + 1)
    }
}

enum Header {
    Algebra { name: String, field: Field, window: Window },
    Module { name: String, algebra: String, side: Side, window: Window },
    Automorphism { name: String, algebra: String },
}

fn parse_window(s: &Stmt, tok: &str) -> Parsed<Window> {
    let (lo, hi) = tok.split_once("..").ok_or_else(|| s.err(s.col(tok), format!("expected LO..HI, found `{tok}`")))?;
    let lo: i32 = lo.parse().map_err(|_| s.err(s.col(tok), format!("bad window bound `{lo}`")))?;
    let hi: i32 = hi.parse().map_err(|_| s.err(s.col(tok), format!("bad window bound `{hi}`")))?;
    Ok(Window::new(lo, hi))
}

pub fn parse_field(tok: &str) -> Option<Field> {
    if tok == "Q" {
        return Some(Field::Rationals);
    }
    let p: u32 = tok.strip_prefix('F')?.parse().ok()?;
    Field::prime(p).ok()
}

fn parse_side(tok: &str) -> Option<Side> {
    match tok {
        "left" => Some(Side::Left),
        "right" => Some(Side::Right),
        "bi" => Some(Side::Bi),
        _ => None,
    }
}

fn parse_header(s: &Stmt) -> Parsed<Option<Header>> {
    let toks: Vec<&str> = s.text.split_whitespace().collect();
    let expect = |i: usize, word: &str| -> Parsed<()> {
        match toks.get(i) {
            Some(t) if *t == word => Ok(()),
            Some(t) => Err(s.err(s.col(t), format!("expected `{word}`, found `{t}`"))),
            None => Err(s.err(s.text.len() + 1, format!("expected `{word}`"))),
        }
    };
    let arg = |i: usize, what: &str| -> Parsed<&str> {
        toks.get(i).copied().ok_or_else(|| s.err(s.text.len() + 1, format!("missing {what}")))
    };
    match toks[0] {
        "algebra" => {
            let name = arg(1, "algebra name")?;
            expect(2, "over")?;
            let ftok = arg(3, "field")?;
            let field = parse_field(ftok).ok_or_else(|| s.err(s.col(ftok), format!("unknown field `{ftok}` (use Q or Fp)")))?;
            expect(4, "window")?;
            let window = parse_window(s, arg(5, "window")?)?;
            if window.lo != 0 || window.hi < 0 {
                return Err(s.err(s.col(arg(5, "window")?), "algebra windows have the form 0..HI"));
            }
            if toks.len() > 6 {
                return Err(s.err(s.col(toks[6]), "trailing input"));
            }
            Ok(Some(Header::Algebra { name: name.into(), field, window }))
        }
        "module" => {
            let name = arg(1, "module name")?;
            expect(2, "over")?;
            let algebra = arg(3, "algebra name")?;
            expect(4, "side")?;
            let stok = arg(5, "side")?;
            let side = parse_side(stok).ok_or_else(|| s.err(s.col(stok), format!("side must be left, right or bi, found `{stok}`")))?;
            expect(6, "window")?;
            let window = parse_window(s, arg(7, "window")?)?;
            if toks.len() > 8 {
                return Err(s.err(s.col(toks[8]), "trailing input"));
            }
            Ok(Some(Header::Module { name: name.into(), algebra: algebra.into(), side, window }))
        }
        "automorphism" => {
            let name = arg(1, "automorphism name")?;
            expect(2, "of")?;
            let algebra = arg(3, "algebra name")?;
            if toks.len() > 4 {
                return Err(s.err(s.col(toks[4]), "trailing input"));
            }
            Ok(Some(Header::Automorphism { name: name.into(), algebra: algebra.into() }))
        }
        _ => Ok(None),
    }
}

fn parse_coefficient(field: Field, tok: &str) -> Option<Scalar> {
    let q = match tok.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.parse().ok()?;
            if d == BigInt::from(0) {
                return None;
            }
            BigRational::new(n.parse().ok()?, d)
        }
        None => BigRational::from_integer(tok.parse().ok()?),
    };
    field.from_rational(&q).ok()
}

/// Parses `c1*l1 + c2*l2 - l3` in the given degree of `basis`.
fn parse_combination(s: &Stmt, rhs: &str, basis: &GradedBasis, field: Field, degree: i32) -> Parsed<Vec<Scalar>> {
    let mut v = field.zeros(basis.dim(degree));
    let rhs = rhs.trim();
    if rhs == "0" {
        return Ok(v);
    }
    let toks: Vec<&str> = rhs.split_whitespace().collect();
    let mut i = 0;
    let mut sign = field.one();
    while i < toks.len() {
        let mut term = toks[i];
        if i > 0 {
            sign = match term {
                "+" => field.one(),
                "-" => -&field.one(),
                _ => return Err(s.err(s.col(term), format!("expected `+` or `-`, found `{term}`"))),
            };
            i += 1;
            term = toks.get(i).copied().ok_or_else(|| s.err(s.text.len() + 1, "dangling sign"))?;
        }
        let mut coeff = sign.clone();
        let mut body = term;
        if let Some(rest) = body.strip_prefix('-') {
            if !rest.is_empty() {
                coeff = -&coeff;
                body = rest;
            }
        }
        let label = match body.split_once('*') {
            Some((c, l)) if !l.is_empty() && parse_coefficient(field, c).is_some() => {
                coeff = &coeff * &parse_coefficient(field, c).unwrap();
                l
            }
            Some((c, l)) if !l.is_empty() && c.chars().all(|ch| ch.is_ascii_digit() || ch == '/' || ch == '-') => {
                return Err(s.err(s.col(term), format!("coefficient `{c}` is not defined over {field}")));
            }
            _ => body,
        };
        let r = basis.find(label).ok_or_else(|| s.err(s.col(term), format!("unknown label `{label}`")))?;
        if r.degree != degree {
            return Err(s.err(
                s.col(term),
                format!("degree mismatch: `{label}` has degree {}, expected {degree}", r.degree),
            ));
        }
        v[r.index] = &v[r.index] + &coeff;
        i += 1;
    }
    Ok(v)
}

/// Splits `KEY args = rhs`.
fn split_eq(s: &Stmt) -> Parsed<(Vec<&str>, &str)> {
    let (lhs, rhs) = s.text.split_once('=').ok_or_else(|| s.err(s.text.len() + 1, "expected `=`"))?;
    Ok((lhs.split_whitespace().collect(), rhs))
}

fn lookup(s: &Stmt, basis: &GradedBasis, label: &str, what: &str) -> Parsed<BasisRef> {
    basis.find(label).ok_or_else(|| s.err(s.col(label), format!("unknown {what} label `{label}`")))
}

fn arity(s: &Stmt, lhs: &[&str], n: usize) -> Parsed<()> {
    if lhs.len() != n + 1 {
        return Err(s.err(1, format!("`{}` takes {n} label(s) before `=`", lhs[0])));
    }
    Ok(())
}

fn add_basis_line(s: &Stmt, basis: &mut GradedBasis) -> Parsed<()> {
    let rest = s.text["basis".len()..].trim();
    let (deg, labels) = rest.split_once(':').ok_or_else(|| s.err(s.text.len() + 1, "expected `basis DEG: labels`"))?;
    let deg: i32 = deg.trim().parse().map_err(|_| s.err(s.col(deg.trim()), format!("bad degree `{}`", deg.trim())))?;
    let mut offset = s.text.len() - labels.len();
    for piece in labels.split(',') {
        let l = piece.trim();
        let column = offset + piece.len() - piece.trim_start().len() + 1;
        offset += piece.len() + 1;
        if l.is_empty() {
            continue;
        }
        if basis.find(l).is_some() {
            return Err(s.err(column, format!("duplicate label `{l}`")));
        }
        if l.contains(char::is_whitespace) || l == "0" || l.contains('=') {
            return Err(s.err(column, format!("invalid label `{l}`")));
        }
        basis.push(deg, l).map_err(|e| s.err(column, e.to_string()))?;
    }
    Ok(())
}

fn build_algebra(name: &str, field: Field, window: Window, body: &[Stmt]) -> Parsed<DgAlgebra> {
    let mut a = DgAlgebra::new(name, field, window.hi);
    let mut listed = BTreeSet::new();
    let mut basis = GradedBasis::new(window);
    for s in body.iter().filter(|s| s.text.starts_with("basis")) {
        add_basis_line(s, &mut basis)?;
    }
    for r in basis.refs() {
        a.add_basis(r.degree, basis.label(r)).map_err(|e| body[0].err(1, e.to_string()))?;
    }
    for s in body {
        let key = s.text.split_whitespace().next().unwrap_or("");
        match key {
            "basis" => {}
            "unit" => {
                let l = s.text["unit".len()..].trim();
                lookup(s, a.basis(), l, "algebra")?;
                a.set_unit(l).map_err(|e| s.err(s.col(l), e.to_string()))?;
            }
            "mul" => {
                let (lhs, rhs) = split_eq(s)?;
                arity(s, &lhs, 2)?;
                let x = lookup(s, a.basis(), lhs[1], "algebra")?;
                let y = lookup(s, a.basis(), lhs[2], "algebra")?;
                let t = x.degree + y.degree;
                if t > window.hi {
                    return Err(s.err(s.col(lhs[1]), format!("product lands in degree {t}, above the window")));
                }
                let v = parse_combination(s, rhs, a.basis(), field, t)?;
                a.set_mul(x, y, v).map_err(|e| s.err(1, e.to_string()))?;
                listed.insert((x, y));
            }
            "diff" => {
                let (lhs, rhs) = split_eq(s)?;
                arity(s, &lhs, 1)?;
                let x = lookup(s, a.basis(), lhs[1], "algebra")?;
                if x.degree + 1 > window.hi {
                    return Err(s.err(s.col(lhs[1]), "differential lands above the window"));
                }
                let v = parse_combination(s, rhs, a.basis(), field, x.degree + 1)?;
                a.set_diff(x, v).map_err(|e| s.err(1, e.to_string()))?;
            }
            other => return Err(s.err(1, format!("unexpected `{other}` in an algebra block"))),
        }
    }
    if let Some(u) = a.unit() {
        for r in a.basis().refs() {
            for pair in [(u, r), (r, u)] {
                if !listed.contains(&pair) {
                    a.set_mul(pair.0, pair.1, a.basis_vector(r)).map_err(|e| body[0].err(1, e.to_string()))?;
                }
            }
        }
    }
    Ok(a)
}

fn build_module(name: &str, a: &Arc<DgAlgebra>, side: Side, window: Window, body: &[Stmt]) -> Parsed<DgModule> {
    let field = a.field();
    let mut basis = GradedBasis::new(window);
    for s in body.iter().filter(|s| s.text.starts_with("basis")) {
        add_basis_line(s, &mut basis)?;
    }
    let mut m = DgModule::new(name, a.clone(), side, window);
    let mut listed = BTreeSet::new();
    for r in basis.refs() {
        m.add_basis(r.degree, basis.label(r)).map_err(|e| body[0].err(1, e.to_string()))?;
    }
    for s in body {
        let key = s.text.split_whitespace().next().unwrap_or("");
        match key {
            "basis" => {}
            "certified" => {
                let tok = s.text["certified".len()..].trim();
                let w = parse_window(s, tok)?;
                m.set_certified(w);
            }
            "act" | "actr" => {
                let (lhs, rhs) = split_eq(s)?;
                arity(s, &lhs, 2)?;
                let (al, ml) = if key == "act" { (lhs[1], lhs[2]) } else { (lhs[2], lhs[1]) };
                let x = lookup(s, a.basis(), al, "algebra")?;
                let r = lookup(s, m.basis(), ml, "module")?;
                let t = x.degree + r.degree;
                if t > window.hi {
                    return Err(s.err(s.col(lhs[1]), format!("action lands in degree {t}, above the window")));
                }
                let v = parse_combination(s, rhs, m.basis(), field, t)?;
                let res = if key == "act" { m.set_left(x, r, v) } else { m.set_right(r, x, v) };
                res.map_err(|e| s.err(1, e.to_string()))?;
                listed.insert((key == "act", x, r));
            }
            "diff" => {
                let (lhs, rhs) = split_eq(s)?;
                arity(s, &lhs, 1)?;
                let r = lookup(s, m.basis(), lhs[1], "module")?;
                if r.degree + 1 > window.hi {
                    return Err(s.err(s.col(lhs[1]), "differential lands above the window"));
                }
                let v = parse_combination(s, rhs, m.basis(), field, r.degree + 1)?;
                m.set_diff(r, v).map_err(|e| s.err(1, e.to_string()))?;
            }
            other => return Err(s.err(1, format!("unexpected `{other}` in a module block"))),
        }
    }
    if let Some(u) = a.unit() {
        for r in m.basis().refs() {
            let e = m.basis_vector(r);
            if side.has_left() && !listed.contains(&(true, u, r)) {
                m.set_left(u, r, e.clone()).map_err(|err| body[0].err(1, err.to_string()))?;
            }
            if side.has_right() && !listed.contains(&(false, u, r)) {
                m.set_right(r, u, e).map_err(|err| body[0].err(1, err.to_string()))?;
            }
        }
    }
    Ok(m)
}

fn build_automorphism(a: &DgAlgebra, body: &[Stmt]) -> Parsed<AlgebraAutomorphism> {
    let mut alpha = AlgebraAutomorphism::identity(a);
    for s in body {
        let key = s.text.split_whitespace().next().unwrap_or("");
        if key != "map" {
            return Err(s.err(1, format!("unexpected `{key}` in an automorphism block")));
        }
        let (lhs, rhs) = split_eq(s)?;
        arity(s, &lhs, 1)?;
        let x = lookup(s, a.basis(), lhs[1], "algebra")?;
        let v = parse_combination(s, rhs, a.basis(), a.field(), x.degree)?;
        let m: &mut Matrix = alpha.matrices.get_mut(&x.degree).expect("degree in window");
        for (i, c) in v.into_iter().enumerate() {
            m.set(i, x.index, c);
        }
    }
    Ok(alpha)
}

pub fn parse(text: &str) -> Parsed<Document> {
    let mut doc = Document::default();
    let mut blocks: Vec<(Stmt, Header, Vec<Stmt>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let stmt = Stmt { line: i + 1, text: content.trim().to_string() };
        match parse_header(&stmt)? {
            Some(h) => blocks.push((stmt, h, Vec::new())),
            None => match blocks.last_mut() {
                Some((_, _, body)) => body.push(stmt),
                None => return Err(stmt.err(1, "statement outside an algebra, module or automorphism block")),
            },
        }
    }
    for (head, header, body) in blocks {
        let name = match &header {
            Header::Algebra { name, .. } | Header::Module { name, .. } | Header::Automorphism { name, .. } => name.clone(),
        };
        if doc.order.contains(&name) {
            return Err(head.err(head.col(&name), format!("duplicate object name `{name}`")));
        }
        match header {
            Header::Algebra { name, field, window } => {
                let a = build_algebra(&name, field, window, &body)?;
                doc.algebras.insert(name.clone(), Arc::new(a));
            }
            Header::Module { name, algebra, side, window } => {
                let a = doc
                    .algebras
                    .get(&algebra)
                    .cloned()
                    .ok_or_else(|| head.err(head.col(&algebra), format!("unknown algebra `{algebra}`")))?;
                let m = build_module(&name, &a, side, window, &body)?;
                doc.modules.insert(name.clone(), m);
            }
            Header::Automorphism { name, algebra } => {
                let a = doc
                    .algebras
                    .get(&algebra)
                    .cloned()
                    .ok_or_else(|| head.err(head.col(&algebra), format!("unknown algebra `{algebra}`")))?;
                let alpha = build_automorphism(&a, &body)?;
                doc.automorphisms.insert(name.clone(), (algebra, alpha));
            }
        }
        doc.order.push(name);
    }
    Ok(doc)
}

pub fn combination(basis: &GradedBasis, degree: i32, v: &[Scalar]) -> String {
    let mut out = String::new();
    for (i, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let label = &basis.labels(degree)[i];
        let negative = c.is_negative();
        let mag = if negative { -c } else { c.clone() };
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        if mag.is_one() {
            out.push_str(label);
        } else {
            let _ = write!(out, "{mag}*{label}");
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn basis_lines(out: &mut String, basis: &GradedBasis) {
    for d in basis.window().degrees() {
        if basis.dim(d) > 0 {
            let _ = writeln!(out, "basis {d}: {}", basis.labels(d).join(", "));
        }
    }
}

pub fn emit_algebra(a: &DgAlgebra) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "algebra {} over {} window 0..{}", a.name(), a.field(), a.hi());
    basis_lines(&mut out, a.basis());
    if let Some(u) = a.unit() {
        let _ = writeln!(out, "unit {}", a.basis().label(u));
    }
    let b = a.basis();
    for ((x, y), v) in a.mul_entries() {
        let _ = writeln!(out, "mul {} {} = {}", b.label(*x), b.label(*y), combination(b, x.degree + y.degree, v));
    }
    for (x, v) in a.diff_entries() {
        let _ = writeln!(out, "diff {} = {}", b.label(*x), combination(b, x.degree + 1, v));
    }
    out
}

pub fn emit_module(m: &DgModule, algebra_name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "module {} over {algebra_name} side {} window {}..{}", m.name(), m.side(), m.window().lo, m.window().hi);
    if m.certified() != m.window().shrink_top(1) {
        let c = m.certified();
        let _ = writeln!(out, "certified {}..{}", c.lo, c.hi);
    }
    basis_lines(&mut out, m.basis());
    let (ab, mb) = (m.algebra().basis(), m.basis());
    for ((x, r), v) in m.left_entries() {
        let _ = writeln!(out, "act {} {} = {}", ab.label(*x), mb.label(*r), combination(mb, x.degree + r.degree, v));
    }
    for ((r, x), v) in m.right_entries() {
        let _ = writeln!(out, "actr {} {} = {}", mb.label(*r), ab.label(*x), combination(mb, x.degree + r.degree, v));
    }
    for (r, v) in m.diff_entries() {
        let _ = writeln!(out, "diff {} = {}", mb.label(*r), combination(mb, r.degree + 1, v));
    }
    out
}

pub fn emit_automorphism(name: &str, a: &DgAlgebra, alpha: &AlgebraAutomorphism) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "automorphism {name} of {}", a.name());
    for r in a.basis().refs() {
        let image = alpha.apply(r.degree, &a.basis_vector(r));
        if image != a.basis_vector(r) {
            let _ = writeln!(out, "map {} = {}", a.basis().label(r), combination(a.basis(), r.degree, &image));
        }
    }
    out
}

pub fn emit(doc: &Document) -> String {
    let mut parts = Vec::new();
    for name in &doc.order {
        if let Some(a) = doc.algebras.get(name) {
            parts.push(emit_algebra(a));
        } else if let Some(m) = doc.modules.get(name) {
            let alg = doc
                .algebras
                .iter()
                .find(|(_, a)| ***a == **m.algebra())
                .map(|(n, _)| n.clone())
                .unwrap_or_else(|| m.algebra().name().to_string());
            parts.push(emit_module(m, &alg));
        } else if let Some((alg, alpha)) = doc.automorphisms.get(name) {
            parts.push(emit_automorphism(name, &doc.algebras[alg], alpha));
        }
    }
    parts.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    const LAMBDA: &str = "\
algebra L over Q window 0..4
basis 0: 1
basis 1: t
unit 1
";

    #[test]
    fn lambda_document() {
        let doc = parse(LAMBDA).unwrap();
        let a = doc.algebra(None).unwrap();
        assert_eq!(a.dim(1), 1);
        assert!(a.mul_basis(a.basis().get("t").unwrap(), a.basis().get("t").unwrap()).unwrap().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn degree_mismatch() {
        let text = "algebra A over Q window 0..4\nbasis 0: 1\nbasis 1: x\nbasis 3: y\nunit 1\ndiff x = y\n";
        let e = parse(text).unwrap_err();
        assert_eq!(e.line, 6);
        assert!(e.message.contains("degree mismatch"), "{e}");
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("algebra A over Q window 0..4\nbasis 0: 1, 1\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 13));
        assert!(parse("mul a b = 0").unwrap_err().message.contains("outside"));
        assert!(parse("algebra A over F4 window 0..2").unwrap_err().message.contains("unknown field"));
        let e = parse("algebra A over Q window 0..2\nbasis 0: 1\nunit 1\nmul 1 1 = 2*q\n").unwrap_err();
        assert!(e.message.contains("unknown label `q`"), "{e}");
    }

    #[test]
    fn combinations() {
        let text = "algebra A over F7 window 0..2\nbasis 0: 1\nbasis 1: x, y\nunit 1\nmul 1 x = 3/2*x - y + y\n";
        let doc = parse(text).unwrap();
        let a = doc.algebra(None).unwrap();
        let v = a.mul_basis(a.basis().get("1").unwrap(), a.basis().get("x").unwrap()).unwrap();
        assert_eq!(v[0], Field::Prime(7).from_i64(5));
        assert!(v[1].is_zero());
        assert_eq!(combination(a.basis(), 1, &[Field::Prime(7).from_i64(6), Field::Prime(7).one()]), "6*x + y");
        let q = Field::Rationals;
        let b = parse("algebra B over Q window 0..1\nbasis 0: 1\nbasis 1: x, y\nunit 1\n").unwrap();
        let b = b.algebra(None).unwrap();
        assert_eq!(combination(b.basis(), 1, &[-&q.one(), q.from_i64(-2)]), "-x - 2*y");
    }
}
