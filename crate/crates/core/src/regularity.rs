//! The regularity inequalities between Extreg and CMreg, and the Koszul
//! property of suspended truncations above the CM regularity.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::DgAlgebra;
use crate::catalog::sweep;
use crate::error::Result;
use crate::field::Field;
use crate::module::{DgModule, Side};
use crate::resolution::{ext_reg, koszul_test, koszul_test_algebra, Ext, RegularityKind, RegularityValue};
use crate::torsion::{cm_reg, detect_regime, Regime};
use crate::window::Window;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Violated,
    Indeterminate,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityCheck {
    pub name: String,
    pub statement: String,
    pub lhs: (Ext, Ext),
    pub rhs: (Ext, Ext),
    pub verdict: Verdict,
}

fn interval_sum(x: (Ext, Ext), y: (Ext, Ext)) -> (Ext, Ext) {
    (x.0.add(y.0, Ext::NegInf), x.1.add(y.1, Ext::PosInf))
}

/// `lhs ≤ rhs` on intervals of possible values.
fn compare_le(name: &str, statement: &str, lhs: (Ext, Ext), rhs: (Ext, Ext)) -> InequalityCheck {
    let verdict = if lhs.1 <= rhs.0 {
        Verdict::Holds
    } else if lhs.0 > rhs.1 {
        Verdict::Violated
    } else {
        Verdict::Indeterminate
    };
    InequalityCheck { name: name.into(), statement: statement.into(), lhs, rhs, verdict }
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityReport {
    pub algebra: String,
    pub module: String,
    pub regime: String,
    pub extreg_m: RegularityValue,
    pub extreg_k: RegularityValue,
    pub cmreg_m: RegularityValue,
    pub cmreg_a: RegularityValue,
    pub checks: Vec<InequalityCheck>,
    pub note: String,
}

impl RegularityReport {
    pub fn violations(&self) -> usize {
        self.checks.iter().filter(|c| c.verdict == Verdict::Violated).count()
    }
}

/// Checks the module hypotheses: `H(M) ≠ 0` and bounded below in-window.
fn precondition(m: &DgModule) -> std::result::Result<(), String> {
    let cert = m.certified();
    let h = m.cohomology();
    let dims = h.dims_in(&cert);
    let Some((&lo, _)) = dims.iter().next() else { return Err("H(M) = 0 in the certified window".into()) };
    if m.trust().lo > -crate::window::UNBOUNDED && lo <= cert.lo {
        return Err("H(M) reaches the bottom of the certified window".into());
    }
    Ok(())
}

pub fn regularity_inequalities(m: &DgModule, regime: &Regime, stages: usize, w: Window) -> Result<RegularityReport> {
    let a = m.algebra().clone();
    let k = DgModule::canonical_k(a.clone(), Side::Left, w);
    let free = DgModule::free(a.clone(), Side::Left);
    let (extreg_m, _) = ext_reg(m, stages, w)?;
    let (extreg_k, _) = ext_reg(&k, stages, w)?;
    let cmreg_m = cm_reg(m, regime, stages, w)?;
    let cmreg_a = cm_reg(&free, regime, stages, w)?;
    let mut report = RegularityReport {
        algebra: a.name().to_string(),
        module: m.name().to_string(),
        regime: regime.name().to_string(),
        extreg_m,
        extreg_k,
        cmreg_m,
        cmreg_a,
        checks: Vec::new(),
        note: String::new(),
    };
    let skipped = precondition(m).err();
    let (em, ek, cm, ca) = (
        report.extreg_m.interval(),
        report.extreg_k.interval(),
        report.cmreg_m.interval(),
        report.cmreg_a.interval(),
    );
    let finite = match report.cmreg_m.kind {
        RegularityKind::NegInfinity => Verdict::Violated,
        RegularityKind::Undetermined => Verdict::Indeterminate,
        _ => Verdict::Holds,
    };
    let mut checks = vec![
        InequalityCheck {
            name: "cmreg-finite".into(),
            statement: "CMreg M != -inf".into(),
            lhs: cm,
            rhs: (Ext::NegInf, Ext::NegInf),
            verdict: finite,
        },
        compare_le("extreg-bound", "Extreg M <= CMreg M + Extreg k", em, interval_sum(cm, ek)),
        compare_le("cmreg-bound", "CMreg M <= Extreg M + CMreg A", cm, interval_sum(em, ca)),
    ];
    let finiteness = if !matches!(report.extreg_k.kind, RegularityKind::Exact { .. } | RegularityKind::NegInfinity) {
        Verdict::Skipped
    } else if em.1 < Ext::PosInf {
        Verdict::Holds
    } else {
        Verdict::Indeterminate
    };
    checks.push(InequalityCheck {
        name: "extreg-finiteness".into(),
        statement: "Extreg k < +inf implies Extreg M < +inf".into(),
        lhs: ek,
        rhs: em,
        verdict: finiteness,
    });
    if let Some(reason) = skipped {
        for c in &mut checks {
            c.verdict = Verdict::Skipped;
        }
        report.note = reason;
    }
    report.checks = checks;
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct TruncationReport {
    pub t: i32,
    pub algebra_koszul: Option<bool>,
    pub cmreg: RegularityValue,
    pub koszul: Option<bool>,
    pub verdict: Verdict,
    pub note: String,
}

/// Koszul test of `Σ^t(M^{≥t})` for `A` Koszul and `CMreg M ≤ t`.
pub fn koszul_truncation_check(m: &DgModule, t: i32, regime: &Regime, stages: usize, w: Window) -> Result<TruncationReport> {
    let algebra_koszul = koszul_test_algebra(m.algebra(), stages, w)?.koszul;
    let cmreg = cm_reg(m, regime, stages, w)?;
    let n = m.hard_truncate(t).sub.suspend(t);
    let report = koszul_test(&n, stages, w)?;
    let premise = algebra_koszul == Some(true) && cmreg.interval().1 <= Ext::Fin(t as i64);
    let verdict = match (premise, report.koszul) {
        (false, _) | (true, None) => Verdict::Indeterminate,
        (true, Some(true)) => Verdict::Holds,
        (true, Some(false)) => Verdict::Violated,
    };
    let note = if premise { report.note.clone() } else { "premises not certified".into() };
    Ok(TruncationReport { t, algebra_koszul, cmreg, koszul: report.koszul, verdict, note })
}

/// Inequality reports over every supported catalog pair.
pub fn inequality_sweep(field: Field, stages: usize, w: Window) -> Result<Vec<RegularityReport>> {
    let pairs: Vec<(Arc<DgAlgebra>, DgModule)> = sweep(field)?
        .into_iter()
        .flat_map(|inst| {
            let a = inst.algebra;
            inst.modules.into_iter().map(move |m| (a.clone(), m))
        })
        .collect();
    pairs
        .par_iter()
        .map(|(a, m)| regularity_inequalities(m, &detect_regime(a), stages, w))
        .collect()
}
