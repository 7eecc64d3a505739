//! Symbolic polynomials in creation and annihilation operators.
//!
//! A polynomial is stored as a list of monomials, each an ordered product of
//! ladder operators with a complex coefficient. The same polynomial can be
//! realized on the `L`-mode Fock space or through any family of matrices that
//! represents the CAR algebra, such as the physical modes of the doubled
//! system.

use std::collections::BTreeSet;
use std::fmt;

use crate::car::{is_zero, FockOperator, LatticeSpec, Parity};
use crate::error::{Error, Result};
use crate::scalar::{cr, CMatrix, Real, C};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ladder {
    pub site: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn annihilate(site: usize) -> Self {
        Self { site, dagger: false }
    }

    pub fn create(site: usize) -> Self {
        Self { site, dagger: true }
    }

    pub fn adjoint(self) -> Self {
        Self { site: self.site, dagger: !self.dagger }
    }
}

impl fmt::Display for Ladder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dagger {
            write!(f, "a*_{}", self.site)
        } else {
            write!(f, "a_{}", self.site)
        }
    }
}

/// `coefficient · ops[0] ops[1] ⋯`
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial<T: Real> {
    pub coefficient: C<T>,
    pub ops: Vec<Ladder>,
}

impl<T: Real> Monomial<T> {
    pub fn new(coefficient: C<T>, ops: Vec<Ladder>) -> Self {
        Self { coefficient, ops }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            coefficient: self.coefficient.conj(),
            ops: self.ops.iter().rev().map(|l| l.adjoint()).collect(),
        }
    }

    pub fn parity(&self) -> Parity {
        if self.ops.len() % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FermionPolynomial<T: Real> {
    terms: Vec<Monomial<T>>,
}

impl<T: Real> FermionPolynomial<T> {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn constant(z: C<T>) -> Self {
        Self { terms: vec![Monomial::new(z, Vec::new())] }
    }

    pub fn one() -> Self {
        Self::constant(cr(T::one()))
    }

    pub fn ladder(l: Ladder) -> Self {
        Self { terms: vec![Monomial::new(cr(T::one()), vec![l])] }
    }

    pub fn annihilator(site: usize) -> Self {
        Self::ladder(Ladder::annihilate(site))
    }

    pub fn creator(site: usize) -> Self {
        Self::ladder(Ladder::create(site))
    }

    /// `n_x`
    pub fn number(site: usize) -> Self {
        Self::monomial(cr(T::one()), vec![Ladder::create(site), Ladder::annihilate(site)])
    }

    pub fn monomial(coefficient: C<T>, ops: Vec<Ladder>) -> Self {
        Self { terms: vec![Monomial::new(coefficient, ops)] }
    }

    pub fn from_terms(terms: Vec<Monomial<T>>) -> Self {
        Self { terms }
    }

    pub fn terms(&self) -> &[Monomial<T>] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|m| is_zero(&m.coefficient))
    }

    pub fn push(&mut self, m: Monomial<T>) {
        self.terms.push(m);
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self { terms }
    }

    pub fn scaled(&self, z: C<T>) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|m| Monomial::new(m.coefficient * z, m.ops.clone()))
                .collect(),
        }
    }

    pub fn times(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut ops = a.ops.clone();
                ops.extend(b.ops.iter().copied());
                terms.push(Monomial::new(a.coefficient * b.coefficient, ops));
            }
        }
        Self { terms }
    }

    pub fn adjoint(&self) -> Self {
        Self { terms: self.terms.iter().map(Monomial::adjoint).collect() }
    }

    /// Highest site index referenced plus one.
    pub fn min_sites(&self) -> usize {
        self.terms
            .iter()
            .flat_map(|m| m.ops.iter().map(|l| l.site + 1))
            .max()
            .unwrap_or(0)
    }

    pub fn parity(&self) -> Parity {
        let mut grades = self.terms.iter().filter(|m| !is_zero(&m.coefficient)).map(Monomial::parity);
        match grades.next() {
            None => Parity::Even,
            Some(first) => grades.fold(first, Parity::plus),
        }
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.terms
            .iter()
            .filter(|m| !is_zero(&m.coefficient))
            .flat_map(|m| m.ops.iter().map(|l| l.site))
            .collect()
    }

    /// Matrix on the Fock space of `lattice`, built by acting on basis states.
    pub fn realize(&self, lattice: &LatticeSpec) -> Result<FockOperator<T>> {
        let l = lattice.sites();
        if self.min_sites() > l {
            return Err(Error::IndexOutOfRange { index: self.min_sites() - 1, sites: l });
        }
        let d = lattice.dim();
        let mut m = CMatrix::zeros(d, d);
        for term in &self.terms {
            if is_zero(&term.coefficient) {
                continue;
            }
            'states: for s in 0..d {
                let mut state = s;
                let mut negative = false;
                for op in term.ops.iter().rev() {
                    match lattice.apply_ladder(state, op.site, op.dagger) {
                        Some((next, flip)) => {
                            state = next;
                            negative ^= flip;
                        }
                        None => continue 'states,
                    }
                }
                m[(state, s)] += if negative { -term.coefficient } else { term.coefficient };
            }
        }
        FockOperator::from_parts(m, *lattice, self.parity(), self.support())
    }

    /// Realization through explicit annihilator matrices `modes[x]`.
    ///
    /// The result lives on the space of the supplied operators; its support
    /// metadata is the union of the supports of the modes used.
    pub fn realize_with(&self, modes: &[FockOperator<T>]) -> Result<FockOperator<T>> {
        let first = modes
            .first()
            .ok_or_else(|| Error::Shape("no mode operators supplied".into()))?;
        if self.min_sites() > modes.len() {
            return Err(Error::IndexOutOfRange { index: self.min_sites() - 1, sites: modes.len() });
        }
        let lattice = *first.lattice();
        let creators: Vec<FockOperator<T>> = modes.iter().map(FockOperator::adjoint).collect();
        let d = first.dim();
        let mut total = CMatrix::zeros(d, d);
        let mut support = BTreeSet::new();
        for term in &self.terms {
            if is_zero(&term.coefficient) {
                continue;
            }
            let mut product: Option<CMatrix<T>> = None;
            for op in &term.ops {
                let factor = if op.dagger { &creators[op.site] } else { &modes[op.site] };
                support.extend(factor.support().iter().copied());
                product = Some(match product {
                    None => factor.matrix().clone(),
                    Some(p) => p * factor.matrix(),
                });
            }
            match product {
                None => {
                    for i in 0..d {
                        total[(i, i)] += term.coefficient;
                    }
                }
                Some(p) => total += p * term.coefficient,
            }
        }
        FockOperator::from_parts(total, lattice, self.parity(), support)
    }
}

impl<T: Real> fmt::Display for FermionPolynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, m) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({}{:+}i)", m.coefficient.re, m.coefficient.im)?;
            for op in &m.ops {
                write!(f, " {op}")?;
            }
        }
        Ok(())
    }
}

/// Orthogonal operator basis built from products of the single-site
/// elements `1, a_x, a*_x, 2n_x - 1` (in site order).
///
/// The elements are mutually orthogonal in the trace inner product; each
/// label is a vector of per-site codes 0..4.
pub fn product_basis<T: Real>(sites: &[usize]) -> Vec<(Vec<u8>, FermionPolynomial<T>)> {
    let mut out = Vec::with_capacity(1 << (2 * sites.len()));
    let total = 1usize << (2 * sites.len());
    for code in 0..total {
        let digits: Vec<u8> = (0..sites.len()).map(|k| ((code >> (2 * k)) & 3) as u8).collect();
        let mut poly = FermionPolynomial::one();
        for (&site, &digit) in sites.iter().zip(&digits) {
            let factor = match digit {
                0 => continue,
                1 => FermionPolynomial::annihilator(site),
                2 => FermionPolynomial::creator(site),
                _ => FermionPolynomial::number(site)
                    .scaled(cr(T::lit(2.0)))
                    .plus(&FermionPolynomial::constant(cr(-T::one()))),
            };
            poly = poly.times(&factor);
        }
        out.push((digits, poly));
    }
    out
}

/// Human-readable label of a product-basis element.
pub fn basis_label(sites: &[usize], digits: &[u8]) -> String {
    let parts: Vec<String> = sites
        .iter()
        .zip(digits)
        .filter(|(_, &d)| d != 0)
        .map(|(s, &d)| match d {
            1 => format!("a_{s}"),
            2 => format!("a*_{s}"),
            _ => format!("(2n_{s}-1)"),
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" ")
    }
}
