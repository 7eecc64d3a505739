//! Matrix representation of the CAR algebra on `L` lattice modes.
//!
//! Basis states of the `2^L`-dimensional Fock space are labelled by an
//! integer `s`; site `x` is occupied when bit `L-1-x` of `s` is set, so site 0
//! is the leftmost tensor factor. The Jordan–Wigner string of `a_x` acts on
//! sites strictly left of `x`:
//!
//! ```text
//! a_x = Z ⊗ … ⊗ Z ⊗ σ⁻ ⊗ 1 ⊗ … ⊗ 1,   Z = 1 - 2n,   σ⁻ = [[0,1],[0,0]]
//! ```
//!
//! With this ordering the occupation state with sites `x₁ < … < x_k` filled
//! equals `a*_{x₁} ⋯ a*_{x_k} |0⟩` with no extra sign.
//!
//! Smearing is linear: `a(f) = Σ_x f(x) a_x`, hence `a*(g) = Σ_x ḡ(x) a*_x`
//! and `{a(f), a*(g)} = ⟨g|f⟩ 1` where `⟨g|f⟩ = Σ_x ḡ(x) f(x)` is
//! conjugate-linear in its first slot.

use std::collections::BTreeSet;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::{cr, frobenius, hermitian_eigenvalues, matmul, max_abs, modulus, norm_sqr, CMatrix, Real, C};

/// Largest Fock-space dimension built densely unless a caller raises it.
pub const DEFAULT_MAX_DIM: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Open,
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Boundary::Periodic => f.write_str("periodic"),
            Boundary::Open => f.write_str("open"),
        }
    }
}

/// A finite chain of `sites` fermionic modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct LatticeSpec {
    sites: usize,
    boundary: Boundary,
}

impl LatticeSpec {
    pub fn new(sites: usize, boundary: Boundary) -> Result<Self> {
        if sites == 0 {
            return Err(Error::Validation("L must be ≥ 1".into()));
        }
        if sites > 24 {
            return Err(Error::Resource(format!("L = {sites} exceeds the dense representation limit")));
        }
        Ok(Self { sites, boundary })
    }

    pub fn periodic(sites: usize) -> Result<Self> {
        Self::new(sites, Boundary::Periodic)
    }

    pub fn open(sites: usize) -> Result<Self> {
        Self::new(sites, Boundary::Open)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    /// Fock-space dimension `2^L`.
    pub fn dim(&self) -> usize {
        1usize << self.sites
    }

    pub fn check_site(&self, x: usize) -> Result<()> {
        if x >= self.sites {
            Err(Error::IndexOutOfRange { index: x, sites: self.sites })
        } else {
            Ok(())
        }
    }

    /// Maps a signed site label onto `0..L`: reduced modulo `L` on rings,
    /// rejected when outside the chain for open boundaries.
    pub fn wrap(&self, x: i64) -> Result<usize> {
        let l = self.sites as i64;
        match self.boundary {
            Boundary::Periodic => Ok(x.rem_euclid(l) as usize),
            Boundary::Open if (0..l).contains(&x) => Ok(x as usize),
            Boundary::Open => Err(Error::Validation(format!(
                "site {x} outside open chain of {l} sites"
            ))),
        }
    }

    pub fn all_sites(&self) -> BTreeSet<usize> {
        (0..self.sites).collect()
    }

    #[inline]
    pub(crate) fn mask(&self, x: usize) -> usize {
        1usize << (self.sites - 1 - x)
    }

    #[inline]
    pub fn is_occupied(&self, state: usize, x: usize) -> bool {
        state & self.mask(x) != 0
    }

    /// Occupation pattern of a basis state, site 0 first.
    pub fn occupations(&self, state: usize) -> Vec<bool> {
        (0..self.sites).map(|x| self.is_occupied(state, x)).collect()
    }

    /// Number of occupied sites strictly left of `x`.
    #[inline]
    pub(crate) fn occupied_left_of(&self, state: usize, x: usize) -> u32 {
        (state >> (self.sites - x)).count_ones()
    }

    /// Action of `a_x` (or `a*_x` when `dagger`) on a basis state.
    #[inline]
    pub fn apply_ladder(&self, state: usize, x: usize, dagger: bool) -> Option<(usize, bool)> {
        let m = self.mask(x);
        let occupied = state & m != 0;
        if occupied == dagger {
            return None;
        }
        let negative = self.occupied_left_of(state, x) % 2 == 1;
        Some((state ^ m, negative))
    }
}

/// Grade with respect to the global parity `Π_x (1 - 2 n_x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    /// Grade of a product.
    pub fn times(self, other: Parity) -> Parity {
        match (self, other) {
            (Parity::Mixed, _) | (_, Parity::Mixed) => Parity::Mixed,
            (a, b) if a == b => Parity::Even,
            _ => Parity::Odd,
        }
    }

    /// Grade of a sum.
    pub fn plus(self, other: Parity) -> Parity {
        if self == other {
            self
        } else {
            Parity::Mixed
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Parity::Even => f.write_str("even"),
            Parity::Odd => f.write_str("odd"),
            Parity::Mixed => f.write_str("mixed"),
        }
    }
}

/// Relative tolerance for algebraic identity checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<T> {
    pub relative: T,
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        Self { relative: T::lit(1e-10) }
    }
}

impl<T: Real> Tolerance<T> {
    pub fn new(relative: T) -> Self {
        Self { relative }
    }
}

/// A linear operator on the Fock space of a lattice, with grade and support
/// metadata.
///
/// `support` is the smallest window known to contain the operator; it is
/// always sound but may be larger than necessary after arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator<T: Real> {
    matrix: CMatrix<T>,
    lattice: LatticeSpec,
    parity: Parity,
    support: BTreeSet<usize>,
}

impl<T: Real> FockOperator<T> {
    /// Wraps a raw matrix with caller-supplied metadata.
    pub fn from_parts(
        matrix: CMatrix<T>,
        lattice: LatticeSpec,
        parity: Parity,
        support: BTreeSet<usize>,
    ) -> Result<Self> {
        let d = lattice.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Shape(format!(
                "matrix is {}x{}, lattice of {} sites needs {d}x{d}",
                matrix.nrows(),
                matrix.ncols(),
                lattice.sites()
            )));
        }
        if let Some(&x) = support.iter().find(|&&x| x >= lattice.sites()) {
            return Err(Error::IndexOutOfRange { index: x, sites: lattice.sites() });
        }
        Ok(Self { matrix, lattice, parity, support })
    }

    /// Wraps a raw matrix and certifies its grade and support by commutation
    /// tests.
    pub fn from_matrix(matrix: CMatrix<T>, lattice: LatticeSpec) -> Result<Self> {
        let op = Self::from_parts(matrix, lattice, Parity::Mixed, lattice.all_sites())?;
        let (parity, support) = parity_and_support_of(&op, Tolerance::default());
        Ok(Self { parity, support, ..op })
    }

    pub fn identity(lattice: LatticeSpec) -> Self {
        let d = lattice.dim();
        Self {
            matrix: CMatrix::identity(d, d),
            lattice,
            parity: Parity::Even,
            support: BTreeSet::new(),
        }
    }

    pub fn zero(lattice: LatticeSpec) -> Self {
        let d = lattice.dim();
        Self {
            matrix: CMatrix::zeros(d, d),
            lattice,
            parity: Parity::Even,
            support: BTreeSet::new(),
        }
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn support(&self) -> &BTreeSet<usize> {
        &self.support
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Replaces the matrix, keeping the metadata. Callers guarantee the new
    /// matrix has the same grade and lies in the same window.
    pub(crate) fn with_matrix(&self, matrix: CMatrix<T>) -> Self {
        Self { matrix, lattice: self.lattice, parity: self.parity, support: self.support.clone() }
    }

    pub(crate) fn with_support(mut self, support: BTreeSet<usize>) -> Self {
        self.support = support;
        self
    }

    pub(crate) fn with_parity(mut self, parity: Parity) -> Self {
        self.parity = parity;
        self
    }

    pub fn adjoint(&self) -> Self {
        self.with_matrix(self.matrix.adjoint())
    }

    pub fn scale(&self, z: C<T>) -> Self {
        self.with_matrix(&self.matrix * z)
    }

    pub fn scale_real(&self, x: T) -> Self {
        self.scale(cr(x))
    }

    fn check_same_space(&self, other: &Self) {
        assert_eq!(
            self.matrix.shape(),
            other.matrix.shape(),
            "operators live on different Fock spaces"
        );
    }

    /// `[self, other]`
    pub fn commutator(&self, other: &Self) -> Self {
        let ab = self * other;
        let ba = other * self;
        &ab - &ba
    }

    /// `{self, other}`
    pub fn anticommutator(&self, other: &Self) -> Self {
        let ab = self * other;
        let ba = other * self;
        &ab + &ba
    }

    pub fn norm(&self, kind: NormKind) -> Result<T> {
        operator_norm(self, kind)
    }

    /// Max entry modulus of `self - self†`.
    pub fn hermiticity_residual(&self) -> T {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    /// Entrywise max deviation from another operator.
    pub fn max_deviation(&self, other: &Self) -> T {
        self.check_same_space(other);
        max_abs(&(&self.matrix - &other.matrix))
    }

    /// Normalized Frobenius distance `‖A - B‖_F / √dim`.
    pub fn frobenius_distance(&self, other: &Self) -> T {
        self.check_same_space(other);
        normalized_frobenius(&(&self.matrix - &other.matrix))
    }

    /// Normalized trace `tr(A) / dim`.
    pub fn normalized_trace(&self) -> C<T> {
        crate::scalar::trace(&self.matrix) / cr(T::from_usize(self.dim()).unwrap())
    }
}

impl<'a, T: Real> Add for &'a FockOperator<T> {
    type Output = FockOperator<T>;
    fn add(self, rhs: Self) -> FockOperator<T> {
        self.check_same_space(rhs);
        FockOperator {
            matrix: &self.matrix + &rhs.matrix,
            lattice: self.lattice,
            parity: self.parity.plus(rhs.parity),
            support: self.support.union(&rhs.support).copied().collect(),
        }
    }
}

impl<'a, T: Real> Sub for &'a FockOperator<T> {
    type Output = FockOperator<T>;
    fn sub(self, rhs: Self) -> FockOperator<T> {
        self.check_same_space(rhs);
        FockOperator {
            matrix: &self.matrix - &rhs.matrix,
            lattice: self.lattice,
            parity: self.parity.plus(rhs.parity),
            support: self.support.union(&rhs.support).copied().collect(),
        }
    }
}

impl<'a, T: Real> Mul for &'a FockOperator<T> {
    type Output = FockOperator<T>;
    fn mul(self, rhs: Self) -> FockOperator<T> {
        self.check_same_space(rhs);
        FockOperator {
            matrix: matmul(&self.matrix, &rhs.matrix),
            lattice: self.lattice,
            parity: self.parity.times(rhs.parity),
            support: self.support.union(&rhs.support).copied().collect(),
        }
    }
}

impl<'a, T: Real> Neg for &'a FockOperator<T> {
    type Output = FockOperator<T>;
    fn neg(self) -> FockOperator<T> {
        self.with_matrix(-&self.matrix)
    }
}

/// Complex coefficient vector `f` indexing lattice sites.
#[derive(Debug, Clone, PartialEq)]
pub struct SmearingVector<T: Real> {
    coefficients: Vec<C<T>>,
}

impl<T: Real> SmearingVector<T> {
    pub fn new(coefficients: Vec<C<T>>) -> Result<Self> {
        if coefficients.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Validation("smearing vector has non-finite entries".into()));
        }
        Ok(Self { coefficients })
    }

    pub fn from_real(coefficients: &[f64]) -> Result<Self> {
        Self::new(coefficients.iter().map(|&x| cr(T::lit(x))).collect())
    }

    /// Unit vector at site `x`.
    pub fn delta(x: usize, len: usize) -> Self {
        let mut coefficients = vec![C::new(T::zero(), T::zero()); len];
        coefficients[x] = cr(T::one());
        Self { coefficients }
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn coefficients(&self) -> &[C<T>] {
        &self.coefficients
    }

    pub fn norm(&self) -> T {
        self.coefficients.iter().fold(T::zero(), |acc, z| acc + norm_sqr(z)).sqrt()
    }

    /// `⟨self|other⟩ = Σ conj(self_x) other_x`.
    pub fn inner(&self, other: &Self) -> C<T> {
        self.coefficients
            .iter()
            .zip(&other.coefficients)
            .fold(C::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn conj(&self) -> Self {
        Self { coefficients: self.coefficients.iter().map(|z| z.conj()).collect() }
    }

    pub fn scaled(&self, z: C<T>) -> Self {
        Self { coefficients: self.coefficients.iter().map(|w| w * z).collect() }
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self {
            coefficients: self.coefficients.iter().zip(&other.coefficients).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == T::zero() {
            return Err(Error::Precondition("cannot normalize the zero vector".into()));
        }
        Ok(self.scaled(cr(T::one() / n)))
    }

    /// Sites with nonzero coefficient.
    pub fn support(&self) -> BTreeSet<usize> {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, z)| **z != C::new(T::zero(), T::zero()))
            .map(|(x, _)| x)
            .collect()
    }
}

fn ladder_matrix<T: Real>(x: usize, dagger: bool, lattice: &LatticeSpec) -> CMatrix<T> {
    let d = lattice.dim();
    let mut m = CMatrix::zeros(d, d);
    for s in 0..d {
        if let Some((t, negative)) = lattice.apply_ladder(s, x, dagger) {
            m[(t, s)] = cr(if negative { -T::one() } else { T::one() });
        }
    }
    m
}

/// Jordan–Wigner annihilator `a_x`.
pub fn jw_annihilator<T: Real>(x: usize, lattice: &LatticeSpec) -> Result<FockOperator<T>> {
    lattice.check_site(x)?;
    Ok(FockOperator {
        matrix: ladder_matrix(x, false, lattice),
        lattice: *lattice,
        parity: Parity::Odd,
        support: BTreeSet::from([x]),
    })
}

/// Jordan–Wigner creator `a*_x`.
pub fn jw_creator<T: Real>(x: usize, lattice: &LatticeSpec) -> Result<FockOperator<T>> {
    lattice.check_site(x)?;
    Ok(FockOperator {
        matrix: ladder_matrix(x, true, lattice),
        lattice: *lattice,
        parity: Parity::Odd,
        support: BTreeSet::from([x]),
    })
}

/// Occupation number `n_x = a*_x a_x`.
pub fn number_at<T: Real>(x: usize, lattice: &LatticeSpec) -> Result<FockOperator<T>> {
    lattice.check_site(x)?;
    let d = lattice.dim();
    let diag = (0..d).map(|s| if lattice.is_occupied(s, x) { cr(T::one()) } else { cr(T::zero()) });
    Ok(FockOperator {
        matrix: CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(d, diag)),
        lattice: *lattice,
        parity: Parity::Even,
        support: BTreeSet::from([x]),
    })
}

/// Total particle number `N = Σ_x n_x`.
pub fn total_number<T: Real>(lattice: &LatticeSpec) -> FockOperator<T> {
    let d = lattice.dim();
    let diag = (0..d).map(|s| cr(T::from_u32(s.count_ones()).unwrap()));
    FockOperator {
        matrix: CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(d, diag)),
        lattice: *lattice,
        parity: Parity::Even,
        support: lattice.all_sites(),
    }
}

/// Global parity `Π_x (1 - 2 n_x)`.
pub fn global_parity<T: Real>(lattice: &LatticeSpec) -> FockOperator<T> {
    let d = lattice.dim();
    let diag = (0..d).map(|s| cr(parity_sign::<T>(s)));
    FockOperator {
        matrix: CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(d, diag)),
        lattice: *lattice,
        parity: Parity::Even,
        support: lattice.all_sites(),
    }
}

#[inline]
pub(crate) fn parity_sign<T: Real>(state: usize) -> T {
    if state.count_ones() % 2 == 0 {
        T::one()
    } else {
        -T::one()
    }
}

/// Smeared annihilator `a(f) = Σ_x f(x) a_x`.
pub fn smeared_annihilator<T: Real>(f: &SmearingVector<T>, lattice: &LatticeSpec) -> Result<FockOperator<T>> {
    if f.len() != lattice.sites() {
        return Err(Error::Shape(format!(
            "smearing vector has length {}, lattice has {} sites",
            f.len(),
            lattice.sites()
        )));
    }
    let d = lattice.dim();
    let mut m = CMatrix::zeros(d, d);
    for (x, &fx) in f.coefficients().iter().enumerate() {
        if fx == C::new(T::zero(), T::zero()) {
            continue;
        }
        for s in 0..d {
            if let Some((t, negative)) = lattice.apply_ladder(s, x, false) {
                m[(t, s)] += if negative { -fx } else { fx };
            }
        }
    }
    Ok(FockOperator { matrix: m, lattice: *lattice, parity: Parity::Odd, support: f.support() })
}

/// Smeared creator `a*(g) = a(g)†`.
pub fn smeared_creator<T: Real>(g: &SmearingVector<T>, lattice: &LatticeSpec) -> Result<FockOperator<T>> {
    Ok(smeared_annihilator(g, lattice)?.adjoint())
}

/// `U₀ = a(f₀) + a*(f₀)`, a self-adjoint unitary for normalized `f₀`.
pub fn local_unitary_u0<T: Real>(f0: &SmearingVector<T>, lattice: &LatticeSpec) -> Result<FockOperator<T>> {
    let n = f0.norm();
    if (n - T::one()).abs() > T::lit(1e-10).max(T::eps() * T::lit(16.0)) {
        return Err(Error::Precondition(format!("U₀ needs ‖f₀‖ = 1, got {n}")));
    }
    let a = smeared_annihilator(f0, lattice)?;
    Ok(&a + &a.adjoint())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    /// Largest singular value.
    Spectral,
    /// Root-sum-square of entries divided by `√dim`, so `‖1‖ = 1`.
    Frobenius,
}

impl std::fmt::Display for NormKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NormKind::Spectral => f.write_str("spectral"),
            NormKind::Frobenius => f.write_str("frobenius"),
        }
    }
}

pub fn operator_norm<T: Real>(a: &FockOperator<T>, kind: NormKind) -> Result<T> {
    matrix_norm(a.matrix(), kind)
}

pub fn normalized_frobenius<T: Real>(m: &CMatrix<T>) -> T {
    frobenius(m) / T::from_usize(m.nrows()).unwrap().sqrt()
}

/// Operator norm of a raw matrix.
pub fn matrix_norm<T: Real>(m: &CMatrix<T>, kind: NormKind) -> Result<T> {
    if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Validation("operator has non-finite entries".into()));
    }
    Ok(match kind {
        NormKind::Frobenius => normalized_frobenius(m),
        NormKind::Spectral => spectral_norm(m),
    })
}

fn spectral_norm<T: Real>(m: &CMatrix<T>) -> T {
    let scale = max_abs(m);
    if scale == T::zero() {
        return T::zero();
    }
    let herm = max_abs(&(m - m.adjoint()));
    let anti = max_abs(&(m + m.adjoint()));
    let tiny = scale * T::lit(64.0) * T::eps();
    let eigenvalues = if herm <= tiny {
        hermitian_eigenvalues(m)
    } else if anti <= tiny {
        hermitian_eigenvalues(&(m * C::new(T::zero(), T::one())))
    } else {
        // largest eigenvalue of m†m, sqrt taken below
        let gram = matmul(&m.adjoint(), m);
        let ev = hermitian_eigenvalues(&gram);
        let top = ev.iter().fold(T::zero(), |acc, &e| acc.max(e));
        return top.max(T::zero()).sqrt();
    };
    eigenvalues.iter().fold(T::zero(), |acc, &e| acc.max(e.abs()))
}

/// Recomputes the grade and minimal support of an operator.
///
/// The grade comes from (anti)commutation with the global parity. The
/// support is the set of sites `y` for which the graded commutator of either
/// homogeneous part with `a_y` or `a*_y` is nonzero; a site outside the
/// support of a homogeneous operator graded-commutes with both.
pub fn parity_and_support_of<T: Real>(a: &FockOperator<T>, tol: Tolerance<T>) -> (Parity, BTreeSet<usize>) {
    let lattice = *a.lattice();
    let d = lattice.dim();
    let m = a.matrix();
    let scale = frobenius(m);
    if scale == T::zero() {
        return (Parity::Even, BTreeSet::new());
    }
    let threshold = tol.relative * scale;
    let two = T::lit(2.0);
    let conjugated = DMatrix::from_fn(d, d, |i, j| m[(i, j)] * cr(parity_sign::<T>(i) * parity_sign::<T>(j)));
    let even = (m + &conjugated).map(|z| z / cr(two));
    let odd = (m - &conjugated).map(|z| z / cr(two));
    let even_size = frobenius(&even);
    let odd_size = frobenius(&odd);
    let parity = match (even_size > threshold, odd_size > threshold) {
        (true, true) => Parity::Mixed,
        (false, true) => Parity::Odd,
        _ => Parity::Even,
    };

    let mut support = BTreeSet::new();
    for y in 0..lattice.sites() {
        let mut touches = false;
        for (part, size, graded_sign) in [(&even, even_size, -T::one()), (&odd, odd_size, T::one())] {
            if size <= threshold {
                continue;
            }
            for dagger in [false, true] {
                let r = graded_commutator_with_ladder(part, y, dagger, graded_sign, &lattice);
                if r > threshold {
                    touches = true;
                }
            }
        }
        if touches {
            support.insert(y);
        }
    }
    (parity, support)
}

/// Frobenius norm of `X c + sign · c X` for the ladder operator `c`.
fn graded_commutator_with_ladder<T: Real>(
    x: &CMatrix<T>,
    site: usize,
    dagger: bool,
    sign: T,
    lattice: &LatticeSpec,
) -> T {
    let d = lattice.dim();
    let mut out = CMatrix::zeros(d, d);
    for s in 0..d {
        if let Some((t, negative)) = lattice.apply_ladder(s, site, dagger) {
            let c = if negative { -T::one() } else { T::one() };
            // X c: column s receives c · X[:, t]
            for i in 0..d {
                out[(i, s)] += x[(i, t)] * cr(c);
            }
            // sign · c X: row t receives sign · c · X[s, :]
            for j in 0..d {
                out[(t, j)] += x[(s, j)] * cr(sign * c);
            }
        }
    }
    frobenius(&out)
}

/// Basis action of the mode permutation `a_x ↦ a_{perm[x]}`: state `s` is
/// sent to `result[s].0` with a sign flip when `result[s].1` is set.
pub fn permutation_action(perm: &[usize], lattice: &LatticeSpec) -> Result<Vec<(usize, bool)>> {
    let l = lattice.sites();
    if perm.len() != l {
        return Err(Error::Shape(format!("permutation of length {} on {l} sites", perm.len())));
    }
    let mut seen = vec![false; l];
    for &p in perm {
        if p >= l || seen[p] {
            return Err(Error::Validation(format!("{perm:?} is not a permutation of 0..{l}")));
        }
        seen[p] = true;
    }
    Ok((0..lattice.dim())
        .map(|s| {
            let images: Vec<usize> = (0..l).filter(|&x| lattice.is_occupied(s, x)).map(|x| perm[x]).collect();
            let mut inversions = 0usize;
            for i in 0..images.len() {
                for j in i + 1..images.len() {
                    if images[i] > images[j] {
                        inversions += 1;
                    }
                }
            }
            let t = images.iter().fold(0usize, |acc, &y| acc | lattice.mask(y));
            (t, inversions % 2 == 1)
        })
        .collect())
}

/// Unitary implementing the mode permutation `a_x ↦ a_{perm[x]}`.
pub fn mode_permutation<T: Real>(perm: &[usize], lattice: &LatticeSpec) -> Result<FockOperator<T>> {
    let action = permutation_action(perm, lattice)?;
    let d = lattice.dim();
    let mut m = CMatrix::zeros(d, d);
    for (s, &(t, negative)) in action.iter().enumerate() {
        m[(t, s)] = cr(if negative { -T::one() } else { T::one() });
    }
    Ok(FockOperator { matrix: m, lattice: *lattice, parity: Parity::Even, support: lattice.all_sites() })
}

/// One-site translation `σ₁`: `σ₁ a_x σ₁† = a_{x+1 mod L}`.
pub fn shift_unitary<T: Real>(lattice: &LatticeSpec) -> Result<FockOperator<T>> {
    let l = lattice.sites();
    let perm: Vec<usize> = (0..l).map(|x| (x + 1) % l).collect();
    mode_permutation(&perm, lattice)
}

/// Max residual of the CAR relations over all mode pairs, as built by
/// `annihilator`.
pub fn car_residual<T: Real, F>(lattice: &LatticeSpec, annihilator: F) -> Result<T>
where
    F: Fn(usize, &LatticeSpec) -> Result<FockOperator<T>>,
{
    let l = lattice.sites();
    let ops: Vec<FockOperator<T>> = (0..l).map(|x| annihilator(x, lattice)).collect::<Result<_>>()?;
    let daggers: Vec<FockOperator<T>> = ops.iter().map(|a| a.adjoint()).collect();
    let id = FockOperator::<T>::identity(*lattice);
    let mut worst = T::zero();
    for x in 0..l {
        for y in 0..l {
            let aa = ops[x].anticommutator(&ops[y]);
            worst = worst.max(max_abs(aa.matrix()));
            let ad = ops[x].anticommutator(&daggers[y]);
            let expected = if x == y { id.clone() } else { FockOperator::zero(*lattice) };
            worst = worst.max(ad.max_deviation(&expected));
        }
    }
    Ok(worst)
}

pub(crate) fn is_zero<T: Real>(z: &C<T>) -> bool {
    modulus(z) == T::zero()
}
