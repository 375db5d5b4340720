use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::window::Window;

/// Position of a basis element: its degree and index within that degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BasisRef {
    pub degree: i32,
    pub index: usize,
}

impl BasisRef {
    pub fn new(degree: i32, index: usize) -> BasisRef {
        BasisRef { degree, index }
    }
}

/// Labelled basis of a graded vector space on a degree window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedBasis {
    window: Window,
    labels: Vec<Vec<String>>,
    lookup: HashMap<String, BasisRef>,
}

impl GradedBasis {
    pub fn new(window: Window) -> GradedBasis {
        let n = if window.is_empty() { 0 } else { (window.hi - window.lo + 1) as usize };
        GradedBasis { window, labels: vec![Vec::new(); n], lookup: HashMap::new() }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn push(&mut self, degree: i32, label: impl Into<String>) -> Result<BasisRef> {
        let label = label.into();
        if !self.window.contains(degree) {
            return Err(Error::Window(format!(
                "basis element `{label}` in degree {degree} lies outside window {}",
                self.window
            )));
        }
        if self.lookup.contains_key(&label) {
            return Err(Error::Validation(format!("duplicate label `{label}`")));
        }
        let slot = &mut self.labels[(degree - self.window.lo) as usize];
        let r = BasisRef::new(degree, slot.len());
        slot.push(label.clone());
        self.lookup.insert(label, r);
        Ok(r)
    }

    pub fn dim(&self, degree: i32) -> usize {
        if self.window.contains(degree) {
            self.labels[(degree - self.window.lo) as usize].len()
        } else {
            0
        }
    }

    pub fn labels(&self, degree: i32) -> &[String] {
        if self.window.contains(degree) {
            &self.labels[(degree - self.window.lo) as usize]
        } else {
            &[]
        }
    }

    pub fn label(&self, r: BasisRef) -> &str {
        &self.labels(r.degree)[r.index]
    }

    pub fn find(&self, label: &str) -> Option<BasisRef> {
        self.lookup.get(label).copied()
    }

    pub fn get(&self, label: &str) -> Result<BasisRef> {
        self.find(label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// All basis elements in increasing degree.
    pub fn refs(&self) -> Vec<BasisRef> {
        self.window
            .degrees()
            .flat_map(|d| (0..self.dim(d)).map(move |i| BasisRef::new(d, i)))
            .collect()
    }

    pub fn total_dim(&self) -> usize {
        self.labels.iter().map(Vec::len).sum()
    }

    /// Lowest and highest degrees carrying basis elements.
    pub fn support(&self) -> Option<(i32, i32)> {
        let degs: Vec<i32> = self.window.degrees().filter(|&d| self.dim(d) > 0).collect();
        Some((*degs.first()?, *degs.last()?))
    }

    /// Same labels with every degree shifted by `n`.
    pub fn shifted(&self, n: i32) -> GradedBasis {
        let mut out = GradedBasis::new(self.window.shift(n));
        for r in self.refs() {
            out.push(r.degree + n, self.label(r)).expect("shift preserves window membership");
        }
        out
    }
}
