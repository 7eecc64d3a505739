//! Lattice Hamiltonians: quasifree hopping, position-sum-conserving
//! interactions and the diagonal σ_z-string ("GGE") model.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::car::{FockOperator, LatticeSpec, Parity};
use crate::error::{Error, Result};
use crate::poly::{FermionPolynomial, Ladder, Monomial};
use crate::scalar::{cr, max_abs, modulus, CMatrix, Real, C};

/// Hopping amplitudes `f(d)` keyed by displacement `d = x - y`.
#[derive(Debug, Clone, PartialEq)]
pub struct HoppingKernel<T: Real> {
    entries: BTreeMap<i64, C<T>>,
}

impl<T: Real> HoppingKernel<T> {
    /// Validates `f(-d) = conj(f(d))`; a missing partner counts as zero.
    pub fn new(entries: BTreeMap<i64, C<T>>) -> Result<Self> {
        let tol = T::lit(1e-12);
        for (&d, &v) in &entries {
            let partner = entries.get(&-d).copied().unwrap_or_else(|| cr(T::zero()));
            let scale = T::one().max(modulus(&v));
            if modulus(&(partner - v.conj())) > tol * scale {
                return Err(Error::Validation(format!(
                    "hopping kernel is not self-adjoint: f({d}) = {v}, f({}) = {partner}",
                    -d
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn empty() -> Self {
        Self { entries: BTreeMap::new() }
    }

    /// `f(0) = mu`
    pub fn onsite(mu: T) -> Self {
        Self { entries: BTreeMap::from([(0, cr(mu))]) }
    }

    /// `f(±1) = t`
    pub fn nearest_neighbor(t: T) -> Self {
        Self { entries: BTreeMap::from([(-1, cr(t)), (1, cr(t))]) }
    }

    pub fn entries(&self) -> &BTreeMap<i64, C<T>> {
        &self.entries
    }

    pub fn get(&self, d: i64) -> C<T> {
        self.entries.get(&d).copied().unwrap_or_else(|| cr(T::zero()))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.values().all(|v| modulus(v) == T::zero())
    }
}

/// `coefficient · a*_{x₁}⋯a*_{x_k} a_{y₁}⋯a_{y_k}`, added together with its
/// adjoint.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionTerm<T: Real> {
    pub creators: Vec<i64>,
    pub annihilators: Vec<i64>,
    pub coefficient: C<T>,
}

impl<T: Real> InteractionTerm<T> {
    pub fn new(creators: Vec<i64>, annihilators: Vec<i64>, coefficient: C<T>) -> Self {
        Self { creators, annihilators, coefficient }
    }

    /// `coefficient · n_x n_y`
    pub fn density_density(x: i64, y: i64, coefficient: T) -> Self {
        Self::new(vec![x, y], vec![y, x], cr(coefficient))
    }

    /// `coefficient · n_x`
    pub fn onsite(x: i64, coefficient: T) -> Self {
        Self::new(vec![x], vec![x], cr(coefficient))
    }

    /// Checks equal creator/annihilator counts and `Σx ≡ Σy` (mod `L` on
    /// rings).
    pub fn validate(&self, lattice: &LatticeSpec) -> Result<()> {
        if self.creators.len() != self.annihilators.len() {
            return Err(Error::Validation(format!(
                "term {self} has {} creators and {} annihilators",
                self.creators.len(),
                self.annihilators.len()
            )));
        }
        if self.creators.is_empty() {
            return Err(Error::Validation(format!("term {self} has no operators")));
        }
        let created: Vec<usize> = self.creators.iter().map(|&x| lattice.wrap(x)).collect::<Result<_>>()?;
        let annihilated: Vec<usize> =
            self.annihilators.iter().map(|&y| lattice.wrap(y)).collect::<Result<_>>()?;
        let sx: i64 = created.iter().map(|&x| x as i64).sum();
        let sy: i64 = annihilated.iter().map(|&y| y as i64).sum();
        let conserved = if lattice.is_periodic() {
            (sx - sy).rem_euclid(lattice.sites() as i64) == 0
        } else {
            sx == sy
        };
        if !conserved {
            let l = lattice.sites();
            return Err(Error::Validation(if lattice.is_periodic() {
                format!("term {self} violates position-sum conservation: {sx} ≢ {sy} (mod {l})")
            } else {
                format!("term {self} violates position-sum conservation: {sx} ≠ {sy}")
            }));
        }
        Ok(())
    }

    fn ladders(&self, lattice: &LatticeSpec) -> Result<Vec<Ladder>> {
        let mut ops = Vec::with_capacity(self.creators.len() + self.annihilators.len());
        for &x in &self.creators {
            ops.push(Ladder::create(lattice.wrap(x)?));
        }
        for &y in &self.annihilators {
            ops.push(Ladder::annihilate(lattice.wrap(y)?));
        }
        Ok(ops)
    }

    /// The term translated by `shift` sites.
    pub fn translated(&self, shift: i64) -> Self {
        Self {
            creators: self.creators.iter().map(|x| x + shift).collect(),
            annihilators: self.annihilators.iter().map(|y| y + shift).collect(),
            coefficient: self.coefficient,
        }
    }

    /// All `L` translates of the term on a ring (or every translate that fits
    /// inside an open chain).
    pub fn translation_orbit(&self, lattice: &LatticeSpec) -> Vec<Self> {
        let l = lattice.sites() as i64;
        (0..l)
            .map(|s| self.translated(s))
            .filter(|t| t.ladders(lattice).is_ok())
            .collect()
    }
}

impl<T: Real> fmt::Display for InteractionTerm<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[i64]| v.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
        write!(
            f,
            "[creators ({}) annihilators ({}) coefficient {}{:+}i]",
            join(&self.creators),
            join(&self.annihilators),
            self.coefficient.re,
            self.coefficient.im
        )
    }
}

/// `coefficient · Σ_x Π_{j∈offsets} (1 - 2 n_{j+x})`
#[derive(Debug, Clone, PartialEq)]
pub struct GgeTerm<T: Real> {
    pub offsets: BTreeSet<usize>,
    pub coefficient: T,
}

impl<T: Real> GgeTerm<T> {
    pub fn new(offsets: impl IntoIterator<Item = usize>, coefficient: T) -> Self {
        Self { offsets: offsets.into_iter().collect(), coefficient }
    }
}

/// Declarative description of a lattice Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec<T: Real> {
    pub kernel: HoppingKernel<T>,
    pub interactions: Vec<InteractionTerm<T>>,
    pub gge_terms: Vec<GgeTerm<T>>,
    pub lattice: LatticeSpec,
}

impl<T: Real> HamiltonianSpec<T> {
    pub fn new(lattice: LatticeSpec) -> Self {
        Self { kernel: HoppingKernel::empty(), interactions: Vec::new(), gge_terms: Vec::new(), lattice }
    }

    pub fn with_kernel(mut self, kernel: HoppingKernel<T>) -> Self {
        self.kernel = kernel;
        self
    }

    pub fn with_interaction(mut self, term: InteractionTerm<T>) -> Self {
        self.interactions.push(term);
        self
    }

    /// Adds every translate of `term`.
    pub fn with_interaction_orbit(mut self, term: InteractionTerm<T>) -> Self {
        let orbit = term.translation_orbit(&self.lattice);
        self.interactions.extend(orbit);
        self
    }

    pub fn with_gge(mut self, term: GgeTerm<T>) -> Self {
        self.gge_terms.push(term);
        self
    }

    /// Nearest-neighbour hopping `f(±1) = 1`.
    pub fn hopping_benchmark(lattice: LatticeSpec) -> Self {
        Self::new(lattice).with_kernel(HoppingKernel::nearest_neighbor(T::one()))
    }

    /// Nearest-neighbour hopping plus `Σ_x n_x n_{x+1}`.
    pub fn interacting_benchmark(lattice: LatticeSpec) -> Self {
        Self::hopping_benchmark(lattice).with_interaction_orbit(InteractionTerm::density_density(0, 1, T::one()))
    }

    /// `Σ_x σ_z^x σ_z^{x+1}` with `σ_z = 1 - 2n`.
    pub fn gge_benchmark(lattice: LatticeSpec) -> Self {
        Self::new(lattice).with_gge(GgeTerm::new([0, 1], T::one()))
    }

    /// `mu · N`
    pub fn number_operator(lattice: LatticeSpec, mu: T) -> Self {
        Self::new(lattice).with_kernel(HoppingKernel::onsite(mu))
    }

    pub fn is_quadratic(&self) -> bool {
        self.gge_terms.is_empty() && self.interactions.iter().all(|t| t.creators.len() == 1)
    }

    pub fn validate(&self) -> Result<()> {
        for t in &self.interactions {
            t.validate(&self.lattice)?;
        }
        for g in &self.gge_terms {
            if g.offsets.is_empty() {
                return Err(Error::Validation("gge term with empty site subset".into()));
            }
        }
        Ok(())
    }

    /// Symbolic form of the full Hamiltonian.
    pub fn polynomial(&self) -> Result<FermionPolynomial<T>> {
        self.validate()?;
        let h = single_particle_matrix(&self.kernel, &self.lattice)?;
        let mut poly = quadratic_polynomial(&h);
        poly = poly.plus(&interaction_polynomial(&self.interactions, &self.lattice, true)?);
        poly = poly.plus(&gge_polynomial(&self.gge_terms, &self.lattice)?);
        Ok(poly)
    }

    pub fn build(&self) -> Result<FockOperator<T>> {
        let op = self.polynomial()?.realize(&self.lattice)?;
        Ok(op.with_parity(Parity::Even).with_support(self.lattice.all_sites()))
    }

    /// Short stable description used in run metadata.
    pub fn digest(&self) -> String {
        let mut parts = vec![format!("L={} {}", self.lattice.sites(), self.lattice.boundary())];
        for (d, v) in self.kernel.entries() {
            parts.push(format!("f({d})={}{:+}i", v.re, v.im));
        }
        for t in &self.interactions {
            parts.push(t.to_string());
        }
        for g in &self.gge_terms {
            let offs: Vec<String> = g.offsets.iter().map(usize::to_string).collect();
            parts.push(format!("gge{{{}}}={}", offs.join(","), g.coefficient));
        }
        parts.join("; ")
    }
}

/// `L×L` single-particle matrix `h[x][y] = f(x - y)`; on rings the
/// displacement is taken modulo `L`.
pub fn single_particle_matrix<T: Real>(kernel: &HoppingKernel<T>, lattice: &LatticeSpec) -> Result<CMatrix<T>> {
    HoppingKernel::new(kernel.entries.clone())?;
    let l = lattice.sites();
    let mut h = CMatrix::zeros(l, l);
    for x in 0..l {
        for y in 0..l {
            let diff = x as i64 - y as i64;
            let mut value = cr(T::zero());
            for (&d, &v) in kernel.entries() {
                let hit = if lattice.is_periodic() {
                    (diff - d).rem_euclid(l as i64) == 0
                } else {
                    diff == d
                };
                if hit {
                    value += v;
                }
            }
            h[(x, y)] = value;
        }
    }
    Ok(h)
}

/// `Σ_{x,y} h[x][y] a*_x a_y`
pub fn quadratic_polynomial<T: Real>(h: &CMatrix<T>) -> FermionPolynomial<T> {
    let mut poly = FermionPolynomial::zero();
    for x in 0..h.nrows() {
        for y in 0..h.ncols() {
            let v = h[(x, y)];
            if modulus(&v) != T::zero() {
                poly.push(Monomial::new(v, vec![Ladder::create(x), Ladder::annihilate(y)]));
            }
        }
    }
    poly
}

/// A quasifree Hamiltonian together with its single-particle matrix.
#[derive(Debug, Clone)]
pub struct QuasifreeHamiltonian<T: Real> {
    pub operator: FockOperator<T>,
    pub single_particle: CMatrix<T>,
}

pub fn build_quasifree<T: Real>(kernel: &HoppingKernel<T>, lattice: &LatticeSpec) -> Result<QuasifreeHamiltonian<T>> {
    let h = single_particle_matrix(kernel, lattice)?;
    let operator = quadratic_polynomial(&h)
        .realize(lattice)?
        .with_parity(Parity::Even)
        .with_support(lattice.all_sites());
    Ok(QuasifreeHamiltonian { operator, single_particle: h })
}

/// Symbolic `Σ (term + term†)`. Monomials that are already self-adjoint
/// enter once and must carry a real coefficient.
pub fn interaction_polynomial<T: Real>(
    terms: &[InteractionTerm<T>],
    lattice: &LatticeSpec,
    check_position_sum: bool,
) -> Result<FermionPolynomial<T>> {
    let mut poly = FermionPolynomial::zero();
    for term in terms {
        if check_position_sum {
            term.validate(lattice)?;
        } else if term.creators.len() != term.annihilators.len() {
            return Err(Error::Validation(format!("term {term} is not gauge invariant")));
        }
        let ops = term.ladders(lattice)?;
        let bare = FermionPolynomial::<T>::monomial(cr(T::one()), ops.clone()).realize(lattice)?;
        if max_abs(bare.matrix()) == T::zero() {
            continue;
        }
        let monomial = Monomial::new(term.coefficient, ops);
        if bare.hermiticity_residual() == T::zero() {
            if term.coefficient.im != T::zero() {
                return Err(Error::Validation(format!(
                    "term {term} is self-adjoint and needs a real coefficient"
                )));
            }
            poly.push(monomial);
        } else {
            let adjoint = monomial.adjoint();
            poly.push(monomial);
            poly.push(adjoint);
        }
    }
    Ok(poly)
}

pub fn build_interaction<T: Real>(terms: &[InteractionTerm<T>], lattice: &LatticeSpec) -> Result<FockOperator<T>> {
    Ok(interaction_polynomial(terms, lattice, true)?.realize(lattice)?.with_parity(Parity::Even))
}

/// Builds the interaction without the position-sum check (gauge invariance
/// is still required). Used for negative controls.
pub fn build_interaction_unchecked<T: Real>(
    terms: &[InteractionTerm<T>],
    lattice: &LatticeSpec,
) -> Result<FockOperator<T>> {
    Ok(interaction_polynomial(terms, lattice, false)?.realize(lattice)?.with_parity(Parity::Even))
}

pub fn gge_polynomial<T: Real>(terms: &[GgeTerm<T>], lattice: &LatticeSpec) -> Result<FermionPolynomial<T>> {
    let l = lattice.sites() as i64;
    let mut poly = FermionPolynomial::zero();
    for term in terms {
        if term.offsets.is_empty() {
            return Err(Error::Validation("gge term with empty site subset".into()));
        }
        for x in 0..l {
            let sites: Option<Vec<usize>> = term.offsets.iter().map(|&j| lattice.wrap(j as i64 + x).ok()).collect();
            // translates that leave an open chain are dropped
            let Some(sites) = sites else { continue };
            let mut product = FermionPolynomial::constant(cr(term.coefficient));
            for j in sites {
                let z = FermionPolynomial::one().plus(&FermionPolynomial::number(j).scaled(cr(T::lit(-2.0))));
                product = product.times(&z);
            }
            poly = poly.plus(&product);
        }
    }
    Ok(poly)
}

pub fn build_gge<T: Real>(terms: &[GgeTerm<T>], lattice: &LatticeSpec) -> Result<FockOperator<T>> {
    Ok(gge_polynomial(terms, lattice)?.realize(lattice)?.with_parity(Parity::Even))
}
