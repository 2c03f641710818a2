//! Linear forms over the free unknowns.
//!
//! Every field is affine in its parameters, so a point evaluation is a sparse
//! row plus a constant. [`Form`] carries all mixed derivatives up to order two at
//! once; [`AffineFunctional`] is a single scalar component of it.

use crate::error::{Error, Result};
use crate::layout::Slot;

/// Number of derivative components in a [`Form`]: `(kx, ky)` with `kx, ky ∈ 0..3`.
pub const NDERIV: usize = 9;

/// Flat index of the derivative `∂x^kx ∂y^ky`.
pub const fn deriv_index(kx: usize, ky: usize) -> usize {
    kx * 3 + ky
}

/// `row · Θ + offset`, with a sparse row over the free unknowns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AffineFunctional {
    pub terms: Vec<(usize, f64)>,
    pub offset: f64,
}

impl AffineFunctional {
    pub fn constant(offset: f64) -> Self {
        Self { terms: Vec::new(), offset }
    }

    pub fn eval(&self, theta: &[f64]) -> f64 {
        self.terms.iter().map(|&(i, c)| c * theta[i]).sum::<f64>() + self.offset
    }

    /// Checked evaluation; `n` is the expected length of Θ.
    pub fn try_eval(&self, theta: &[f64], n: usize) -> Result<f64> {
        if theta.len() != n {
            return Err(Error::Shape { expected: n, got: theta.len() });
        }
        Ok(self.eval(theta))
    }

    /// Adds `s · other`.
    pub fn add_scaled(&mut self, other: &AffineFunctional, s: f64) {
        self.terms.extend(other.terms.iter().map(|&(i, c)| (i, s * c)));
        self.offset += s * other.offset;
    }

    pub fn scale(&mut self, s: f64) {
        for t in &mut self.terms {
            t.1 *= s;
        }
        self.offset *= s;
    }

    /// Sorts by index and merges duplicates; exact zeros are dropped.
    pub fn compact(&mut self) {
        compact_terms(&mut self.terms);
    }

    /// Coefficient of unknown `i` (after merging duplicates).
    pub fn coefficient(&self, i: usize) -> f64 {
        self.terms.iter().filter(|t| t.0 == i).map(|t| t.1).sum()
    }
}

pub(crate) fn compact_terms(terms: &mut Vec<(usize, f64)>) {
    if terms.is_empty() {
        return;
    }
    terms.sort_unstable_by_key(|t| t.0);
    let mut w = 0;
    for r in 1..terms.len() {
        if terms[r].0 == terms[w].0 {
            terms[w].1 += terms[r].1;
        } else {
            w += 1;
            terms[w] = terms[r];
        }
    }
    terms.truncate(w + 1);
    terms.retain(|t| t.1 != 0.0);
}

/// All derivative components of a field at one point as linear forms.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Form {
    pub terms: Vec<(usize, [f64; NDERIV])>,
    pub offset: [f64; NDERIV],
}

impl Form {
    /// Adds `slot · coef`: a free slot contributes a term, a fixed one the offset.
    pub(crate) fn push_slot(&mut self, slot: Slot, coef: [f64; NDERIV]) {
        match slot {
            Slot::Free(i) => self.terms.push((i, coef)),
            Slot::Fixed(v) => {
                if v != 0.0 {
                    for (o, c) in self.offset.iter_mut().zip(coef) {
                        *o += v * c;
                    }
                }
            }
        }
    }

    pub(crate) fn add_offset(&mut self, coef: [f64; NDERIV]) {
        for (o, c) in self.offset.iter_mut().zip(coef) {
            *o += c;
        }
    }

    /// The component `∂x^kx ∂y^ky`.
    pub fn component(&self, kx: usize, ky: usize) -> AffineFunctional {
        self.combine(&[(deriv_index(kx, ky), 1.0)])
    }

    /// `Σ c_k · component_k` for `(flat derivative index, coefficient)` pairs.
    pub fn combine(&self, coefs: &[(usize, f64)]) -> AffineFunctional {
        let mut terms: Vec<(usize, f64)> = self
            .terms
            .iter()
            .map(|(i, jet)| (*i, coefs.iter().map(|&(k, c)| c * jet[k]).sum()))
            .collect();
        compact_terms(&mut terms);
        let offset = coefs.iter().map(|&(k, c)| c * self.offset[k]).sum();
        AffineFunctional { terms, offset }
    }

    /// All components evaluated at Θ.
    pub fn eval(&self, theta: &[f64]) -> [f64; NDERIV] {
        let mut out = self.offset;
        for (i, jet) in &self.terms {
            for (o, c) in out.iter_mut().zip(jet) {
                *o += c * theta[*i];
            }
        }
        out
    }
}

/// Outer product of an x-jet and a y-jet as a flat derivative array.
pub(crate) fn outer(a: &[f64; 3], b: &[f64; 3]) -> [f64; NDERIV] {
    let mut out = [0.0; NDERIV];
    for kx in 0..3 {
        for ky in 0..3 {
            out[deriv_index(kx, ky)] = a[kx] * b[ky];
        }
    }
    out
}

/// An x-only jet (1D fields) embedded in the flat layout.
pub(crate) fn along_x(a: &[f64; 3]) -> [f64; NDERIV] {
    outer(a, &[1.0, 0.0, 0.0])
}
