//! Seeded random operators and smearing vectors for tests and the check
//! suite. Every generator takes an explicit seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::car::{FockOperator, LatticeSpec, SmearingVector};
use crate::error::Result;
use crate::poly::{FermionPolynomial, Ladder, Monomial};
use crate::scalar::{CMatrix, Real, C};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_ish<T: Real>(r: &mut ChaCha8Rng) -> C<T> {
    C::new(T::lit(r.gen_range(-1.0..1.0)), T::lit(r.gen_range(-1.0..1.0)))
}

pub fn random_matrix<T: Real>(dim: usize, r: &mut ChaCha8Rng) -> CMatrix<T> {
    CMatrix::from_fn(dim, dim, |_, _| gaussian_ish(r))
}

pub fn random_hermitian<T: Real>(dim: usize, r: &mut ChaCha8Rng) -> CMatrix<T> {
    let m = random_matrix::<T>(dim, r);
    (&m + m.adjoint()) * C::new(T::lit(0.5), T::zero())
}

/// Random operator on the full Fock space (mixed parity, full support).
pub fn random_operator<T: Real>(lattice: &LatticeSpec, r: &mut ChaCha8Rng) -> Result<FockOperator<T>> {
    FockOperator::from_matrix(random_matrix(lattice.dim(), r), *lattice)
}

pub fn random_smearing<T: Real>(len: usize, r: &mut ChaCha8Rng) -> SmearingVector<T> {
    SmearingVector::new((0..len).map(|_| gaussian_ish(r)).collect()).expect("finite entries")
}

pub fn random_unit_smearing<T: Real>(len: usize, r: &mut ChaCha8Rng) -> SmearingVector<T> {
    random_smearing(len, r).normalized().expect("nonzero random vector")
}

/// Random polynomial with `terms` monomials of degree ≤ `max_degree` in the
/// modes `0..sites`.
pub fn random_polynomial<T: Real>(
    sites: usize,
    terms: usize,
    max_degree: usize,
    r: &mut ChaCha8Rng,
) -> FermionPolynomial<T> {
    let mut poly = FermionPolynomial::zero();
    for _ in 0..terms {
        let degree = r.gen_range(0..=max_degree);
        let ops = (0..degree)
            .map(|_| Ladder { site: r.gen_range(0..sites), dagger: r.gen_bool(0.5) })
            .collect();
        poly.push(Monomial::new(gaussian_ish(r), ops));
    }
    poly
}
