//! Cochain complexes of finite-dimensional vector spaces and their cohomology.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::field::{Field, Scalar};
use crate::linalg::{Matrix, Quotient};
use crate::window::Window;

/// A bounded cochain complex given degreewise. `diffs[j]` maps degree `j`
/// to degree `j + 1`; absent entries are zero maps.
#[derive(Clone, Debug)]
pub struct Complex {
    pub field: Field,
    pub dims: BTreeMap<i32, usize>,
    pub diffs: BTreeMap<i32, Matrix>,
    /// Degrees whose cohomology agrees with the object being modelled.
    pub certified: Window,
}

#[derive(Clone, Debug, Serialize)]
pub struct CohomologyReport {
    pub dims: BTreeMap<i32, usize>,
    #[serde(skip)]
    pub representatives: BTreeMap<i32, Vec<Vec<Scalar>>>,
    pub certified: Window,
}

impl Complex {
    pub fn new(field: Field, certified: Window) -> Complex {
        Complex { field, dims: BTreeMap::new(), diffs: BTreeMap::new(), certified }
    }

    pub fn dim(&self, j: i32) -> usize {
        self.dims.get(&j).copied().unwrap_or(0)
    }

    pub fn differential(&self, j: i32) -> Matrix {
        self.diffs
            .get(&j)
            .cloned()
            .unwrap_or_else(|| Matrix::zero(self.field, self.dim(j + 1), self.dim(j)))
    }

    /// Checks `d∘d = 0` wherever both maps are present.
    pub fn is_complex(&self) -> bool {
        self.dims.keys().all(|&j| self.differential(j + 1).mul(&self.differential(j)).is_zero())
    }

    /// Cohomology at degree `j` as a quotient of cocycles by coboundaries.
    pub fn cohomology_at(&self, j: i32) -> Quotient {
        let n = self.dim(j);
        let cycles = self.differential(j).kernel();
        let incoming = self.differential(j - 1);
        let boundaries: Vec<Vec<Scalar>> = incoming.image().basis().cloned().collect();
        Quotient::new(self.field, n, &cycles, &boundaries)
            .expect("boundaries are cycles in a complex")
    }

    /// Cohomology on every degree where the complex is nonzero or certified.
    pub fn cohomology(&self) -> CohomologyReport {
        let mut dims = BTreeMap::new();
        let mut reps = BTreeMap::new();
        for (&j, &n) in &self.dims {
            if n == 0 {
                continue;
            }
            let h = self.cohomology_at(j);
            if h.dim() > 0 {
                dims.insert(j, h.dim());
                reps.insert(j, h.representatives());
            }
        }
        CohomologyReport { dims, representatives: reps, certified: self.certified }
    }

    /// Dual complex `(C^∨)^j = (C^{-j})^*`; on `φ` of degree `-j-1` the
    /// differential is `-(-1)^{-j-1} φ∘d`.
    pub fn dual(&self) -> Complex {
        let mut out = Complex::new(self.field, self.certified.negate());
        for (&j, &n) in &self.dims {
            out.dims.insert(-j, n);
        }
        for (&j, m) in &self.diffs {
            // d: C^j -> C^{j+1} dualizes to (C^∨)^{-j-1} -> (C^∨)^{-j}.
            let sign = self.field.sign(j as i64 + 1);
            let mut t = m.transpose();
            for r in 0..t.rows() {
                for c in 0..t.cols() {
                    let v = -&(&sign * t.get(r, c));
                    t.set(r, c, v);
                }
            }
            out.diffs.insert(-j - 1, t);
        }
        out
    }
}

impl CohomologyReport {
    pub fn dim(&self, j: i32) -> usize {
        self.dims.get(&j).copied().unwrap_or(0)
    }

    /// Dimensions restricted to a window.
    pub fn dims_in(&self, w: &Window) -> BTreeMap<i32, usize> {
        self.dims.iter().filter(|(j, _)| w.contains(**j)).map(|(j, n)| (*j, *n)).collect()
    }

    /// Lowest degree with nonzero cohomology inside the certified window.
    pub fn inf(&self) -> Option<i32> {
        self.dims.keys().copied().find(|j| self.certified.contains(*j))
    }

    pub fn sup(&self) -> Option<i32> {
        self.dims.keys().rev().copied().find(|j| self.certified.contains(*j))
    }

    pub fn is_zero_in_window(&self) -> bool {
        self.inf().is_none()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_term_complex() {
        let f = Field::Rationals;
        let mut c = Complex::new(f, Window::new(0, 1));
        c.dims.insert(0, 2);
        c.dims.insert(1, 1);
        c.diffs.insert(0, Matrix::from_i64_rows(f, &[&[1, 1]]));
        assert!(c.is_complex());
        let h = c.cohomology();
        assert_eq!(h.dim(0), 1);
        assert_eq!(h.dim(1), 0);
        let hd = c.dual().cohomology();
        assert_eq!(hd.dim(0), 1);
        assert_eq!(hd.dim(-1), 0);
    }
}
