//! Gauge twists `a_x ↦ e^{igx} a_x`, twisted evolutions, translation
//! covariance and local eigenoperator residuals.

use std::f64::consts::PI;

use crate::car::{shift_unitary, FockOperator, LatticeSpec, Parity};
use crate::dynamics::EigenSystem;
use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianSpec;
use crate::poly::{basis_label, product_basis};
use crate::scalar::{cis, cr, hs_inner, modulus, CMatrix, CVector, Real, C};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwistAngle<T: Real> {
    pub g: T,
    pub quantized: bool,
}

impl<T: Real> TwistAngle<T> {
    /// `g = 2πk/L`
    pub fn quantized(k: i64, sites: usize) -> Self {
        let g = T::lit(2.0 * PI * k as f64 / sites as f64);
        Self { g, quantized: true }
    }

    pub fn free(g: T) -> Self {
        Self { g, quantized: false }
    }

    /// On rings `g` must be a multiple of `2π/L`.
    pub fn validate(&self, lattice: &LatticeSpec) -> Result<()> {
        if !lattice.is_periodic() {
            return Ok(());
        }
        let k = self.g.as_f64() * lattice.sites() as f64 / (2.0 * PI);
        if (k - k.round()).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "twist g = {} is not a multiple of 2π/{} on a ring",
                self.g,
                lattice.sites()
            )));
        }
        Ok(())
    }
}

/// Unitary `Γ(g) = exp(-ig Σ_x x n_x)`, diagonal in the occupation basis,
/// with `Γ(g) a_x Γ(g)† = e^{igx} a_x`.
pub fn gauge_twist<T: Real>(g: TwistAngle<T>, lattice: &LatticeSpec) -> Result<FockOperator<T>> {
    g.validate(lattice)?;
    let d = lattice.dim();
    let diag = (0..d).map(|s| {
        let moment: usize = (0..lattice.sites()).filter(|&x| lattice.is_occupied(s, x)).sum();
        cis(-g.g * T::from_usize(moment).unwrap())
    });
    FockOperator::from_parts(
        CMatrix::from_diagonal(&CVector::from_iterator(d, diag)),
        *lattice,
        Parity::Even,
        lattice.all_sites(),
    )
}

/// Linear map on operators. Only unitary conjugations `A ↦ U A U†` are
/// needed here, so that is the stored form; the dense matrix on the
/// matrix-unit basis is available for small spaces.
#[derive(Debug, Clone)]
pub struct SuperOperator<T: Real> {
    unitary: CMatrix<T>,
}

impl<T: Real> SuperOperator<T> {
    pub fn conjugation(unitary: CMatrix<T>) -> Self {
        Self { unitary }
    }

    pub fn identity(dim: usize) -> Self {
        Self { unitary: CMatrix::identity(dim, dim) }
    }

    pub fn unitary(&self) -> &CMatrix<T> {
        &self.unitary
    }

    pub fn apply_matrix(&self, a: &CMatrix<T>) -> CMatrix<T> {
        &self.unitary * a * self.unitary.adjoint()
    }

    pub fn apply(&self, a: &FockOperator<T>) -> FockOperator<T> {
        FockOperator::from_parts(self.apply_matrix(a.matrix()), *a.lattice(), a.parity(), a.lattice().all_sites())
            .expect("shape preserved")
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Self) -> Self {
        Self { unitary: &self.unitary * &other.unitary }
    }

    pub fn inverse(&self) -> Self {
        Self { unitary: self.unitary.adjoint() }
    }

    /// Matrix acting on column-major `vec(A)`: `conj(U) ⊗ U`.
    pub fn to_matrix(&self) -> CMatrix<T> {
        self.unitary.map(|z| z.conj()).kronecker(&self.unitary)
    }

    /// `max_{i,j} ‖Ad_U(E_ij) - Ad_V(E_ij)‖_F` over matrix units.
    ///
    /// With `x_i`, `y_i` the columns of `U` and `V` (the latter rotated by a
    /// global phase, which `Ad` ignores), `Ad_U(E_ij) = x_i x_j†`. Writing
    /// `x_i = y_i + d_i` the difference is `d_i y_j† + y_i d_j† + d_i d_j†`,
    /// whose norm follows from inner products of `d` and `y` alone. This keeps
    /// full relative accuracy for nearly equal maps, where the naive
    /// `2 - 2 Re(...)` form loses half the digits.
    pub fn distance(&self, other: &Self) -> T {
        let n = self.unitary.ncols();
        let overlaps: Vec<C<T>> =
            (0..n).map(|i| other.unitary.column(i).dotc(&self.unitary.column(i))).collect();
        let anchor = overlaps
            .iter()
            .copied()
            .max_by(|a, b| modulus(a).partial_cmp(&modulus(b)).expect("finite"))
            .unwrap_or_else(|| cr(T::one()));
        let phase = if modulus(&anchor) > T::zero() { anchor / cr(modulus(&anchor)) } else { cr(T::one()) };
        // per column: Gram matrix of (d_i, y_i)
        let grams: Vec<[[C<T>; 2]; 2]> = (0..n)
            .map(|i| {
                let y = other.unitary.column(i) * phase;
                let d = self.unitary.column(i) - &y;
                [[d.dotc(&d), d.dotc(&y)], [y.dotc(&d), y.dotc(&y)]]
            })
            .collect();
        // a = (d_i, y_i, d_i), b = (y_j, d_j, d_j); ‖Σ a_k b_k†‖² = Σ ⟨a_k,a_l⟩⟨b_l,b_k⟩
        let a_idx = [0usize, 1, 0];
        let b_idx = [1usize, 0, 0];
        let mut worst = T::zero();
        for gi in &grams {
            for gj in &grams {
                let mut total = cr(T::zero());
                for k in 0..3 {
                    for l in 0..3 {
                        total += gi[a_idx[k]][a_idx[l]] * gj[b_idx[l]][b_idx[k]];
                    }
                }
                worst = worst.max(total.re.max(T::zero()).sqrt());
            }
        }
        worst
    }
}

/// `e^{iHt}` from an eigensystem.
pub fn propagator<T: Real>(eig: &EigenSystem<T>, t: T) -> CMatrix<T> {
    let v = eig.eigenvectors();
    let phases = CVector::from_iterator(eig.dim(), eig.eigenvalues().iter().map(|&e| cis(e * t)));
    v * CMatrix::from_diagonal(&phases) * v.adjoint()
}

/// `τ_g(t) = AdΓ(g) ∘ τ_t ∘ AdΓ(-g)`
pub fn twisted_evolution<T: Real>(
    g: TwistAngle<T>,
    eig: &EigenSystem<T>,
    t: T,
    lattice: &LatticeSpec,
) -> Result<SuperOperator<T>> {
    let gamma = gauge_twist(g, lattice)?;
    if gamma.dim() != eig.dim() {
        return Err(Error::Shape(format!("twist of dimension {} against {}", gamma.dim(), eig.dim())));
    }
    let u = gamma.matrix() * propagator(eig, t) * gamma.matrix().adjoint();
    Ok(SuperOperator::conjugation(u))
}

/// `max_t ‖σ₁ ∘ τ_g(t) ∘ σ₁⁻¹ - τ_g(t)‖` over the matrix-unit basis.
pub fn covariance_violation<T: Real>(
    g: TwistAngle<T>,
    eig: &EigenSystem<T>,
    lattice: &LatticeSpec,
    times: &[T],
) -> Result<T> {
    if !lattice.is_periodic() {
        return Err(Error::Unsupported("covariance check needs a periodic lattice".into()));
    }
    let sigma = SuperOperator::conjugation(shift_unitary::<T>(lattice)?.into_matrix());
    let mut worst = T::zero();
    for &t in times {
        let tg = twisted_evolution(g, eig, t, lattice)?;
        let shifted = sigma.compose(&tg).compose(&sigma.inverse());
        worst = worst.max(shifted.distance(&tg));
    }
    Ok(worst)
}

/// Covariance check for a declared Hamiltonian.
pub fn covariance_check<T: Real>(g: TwistAngle<T>, spec: &HamiltonianSpec<T>, times: &[T]) -> Result<T> {
    if !spec.lattice.is_periodic() {
        return Err(Error::Unsupported("covariance check needs a periodic lattice".into()));
    }
    let h = spec.build()?;
    let eig = crate::dynamics::eigendecompose(&h, T::lit(crate::dynamics::DEFAULT_GAP_TOLERANCE))?;
    covariance_violation(g, &eig, &spec.lattice, times)
}

/// `‖Γ(g) V Γ(g)† - V‖` (normalized Frobenius): zero exactly when every
/// term of `V` conserves the position sum (mod `L` for `g = 2π/L`).
pub fn twist_residual<T: Real>(v: &FockOperator<T>, g: TwistAngle<T>) -> Result<T> {
    twist_locality_distance(v, g)
}

/// Tracial 2-norm distance `‖γ(g)A - A‖`.
pub fn twist_locality_distance<T: Real>(a: &FockOperator<T>, g: TwistAngle<T>) -> Result<T> {
    let gamma = gauge_twist(g, a.lattice())?;
    let twisted = &(&gamma * a) * &gamma.adjoint();
    Ok(twisted.frobenius_distance(a))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenoperatorResidual<T: Real> {
    pub window: Vec<usize>,
    /// `min ‖[H, A] - E A‖ / ‖A‖` in the normalized Frobenius norm.
    pub residual: T,
    pub energy: T,
    /// Dominant product-basis components of the minimizer.
    pub minimizer: String,
    /// Set when the window covers the whole lattice; the residual is then
    /// trivially zero and not computed.
    pub whole_lattice: bool,
}

/// Smallest eigenvalue and eigenvector of a Hermitian matrix.
fn lowest_mode<T: Real>(m: &CMatrix<T>) -> (T, CVector<T>) {
    let herm = (m + m.adjoint()) * cr(T::lit(0.5));
    let eig = herm.symmetric_eigen();
    let mut best = 0;
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] < eig.eigenvalues[best] {
            best = i;
        }
    }
    (eig.eigenvalues[best], eig.eigenvectors.column(best).into_owned())
}

/// How well can a traceless operator supported in `window` be an
/// eigenoperator of `ad_H`?
///
/// Minimizes `‖[H, A] - E A‖` over normalized `A` in the traceless local
/// algebra and real `E`, with the commutator taken in the full algebra. In
/// terms of an orthonormal basis `X_k` and `Y_k = [H, X_k]` the squared
/// residual at fixed `E` is the lowest eigenvalue of
/// `⟨Y,Y⟩ - 2E ⟨X,Y⟩ + E²`. Ties within `1e-10` go to the smallest `E`.
pub fn local_eigenoperator_residual<T: Real>(
    window: &[usize],
    h: &FockOperator<T>,
) -> Result<EigenoperatorResidual<T>> {
    let lattice = *h.lattice();
    let mut sites: Vec<usize> = window.to_vec();
    sites.sort_unstable();
    sites.dedup();
    for &x in &sites {
        lattice.check_site(x)?;
    }
    if sites.is_empty() {
        return Err(Error::Precondition("empty window".into()));
    }
    if sites.len() == lattice.sites() {
        return Ok(EigenoperatorResidual {
            window: sites,
            residual: T::zero(),
            energy: T::zero(),
            minimizer: "energy eigenprojection".into(),
            whole_lattice: true,
        });
    }
    let dim = T::from_usize(lattice.dim()).unwrap();
    let mut labels = Vec::new();
    let mut xs = Vec::new();
    for (digits, poly) in product_basis::<T>(&sites) {
        if digits.iter().all(|&d| d == 0) {
            continue;
        }
        let m = poly.realize(&lattice)?.into_matrix();
        let norm = (hs_inner(&m, &m).re / dim).sqrt();
        labels.push(basis_label(&sites, &digits));
        xs.push(m * cr(T::one() / norm));
    }
    let ys: Vec<CMatrix<T>> = xs.iter().map(|x| h.matrix() * x - x * h.matrix()).collect();
    let n = xs.len();
    let g1 = CMatrix::from_fn(n, n, |k, l| hs_inner(&xs[k], &ys[l]) / cr(dim));
    let g2 = CMatrix::from_fn(n, n, |k, l| hs_inner(&ys[k], &ys[l]) / cr(dim));
    let g1h = (&g1 + g1.adjoint()) * cr(T::lit(0.5));

    let objective = |e: T| -> T {
        let m = &g2 - &g1h * cr(T::lit(2.0) * e) + CMatrix::identity(n, n) * cr(e * e);
        lowest_mode(&m).0.max(T::zero())
    };
    let spectrum = g1h.symmetric_eigenvalues();
    let lo = spectrum.iter().copied().fold(T::max_value().unwrap(), |a, b| a.min(b));
    let hi = spectrum.iter().copied().fold(T::min_value().unwrap(), |a, b| a.max(b));
    let steps = 240;
    let span = (hi - lo).max(T::lit(1e-12));
    let grid: Vec<T> = (0..=steps)
        .map(|i| lo + span * T::from_usize(i).unwrap() / T::from_usize(steps).unwrap())
        .collect();
    let values: Vec<T> = grid.iter().map(|&e| objective(e)).collect();

    // refine every grid-local minimum by golden section
    let phi = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let mut candidates: Vec<T> = Vec::new();
    for i in 0..=steps {
        let left = if i == 0 { T::max_value().unwrap() } else { values[i - 1] };
        let right = if i == steps { T::max_value().unwrap() } else { values[i + 1] };
        if values[i] <= left && values[i] <= right {
            let mut a = if i == 0 { grid[0] } else { grid[i - 1] };
            let mut b = if i == steps { grid[steps] } else { grid[i + 1] };
            let mut c = b - (b - a) * phi;
            let mut d = a + (b - a) * phi;
            let (mut fc, mut fd) = (objective(c), objective(d));
            for _ in 0..80 {
                if fc <= fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - (b - a) * phi;
                    fc = objective(c);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + (b - a) * phi;
                    fd = objective(d);
                }
            }
            candidates.push((a + b) * T::lit(0.5));
        }
    }

    // evaluate candidates directly: eigenvector, Rayleigh energy, residual
    let mut results: Vec<(T, T, CVector<T>)> = candidates
        .into_iter()
        .map(|e| {
            let m = &g2 - &g1h * cr(T::lit(2.0) * e) + CMatrix::identity(n, n) * cr(e * e);
            let (_, c) = lowest_mode(&m);
            let energy = c.dotc(&(&g1h * &c)).re;
            let mut r = CMatrix::zeros(lattice.dim(), lattice.dim());
            for k in 0..n {
                r += (&ys[k] - &xs[k] * cr(energy)) * c[k];
            }
            let residual = (hs_inner(&r, &r).re / dim).sqrt();
            (residual, energy, c)
        })
        .collect();
    let best = results.iter().map(|r| r.0).fold(T::max_value().unwrap(), |a, b| a.min(b));
    let tie = T::lit(1e-10).max(best * T::lit(1e-9));
    results.retain(|r| r.0 <= best + tie);
    results.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite"));
    let (residual, energy, c) = results.swap_remove(0);
    Ok(EigenoperatorResidual { window: sites, residual, energy, minimizer: describe(&c, &labels), whole_lattice: false })
}

fn describe<T: Real>(c: &CVector<T>, labels: &[String]) -> String {
    let cmax = *c
        .iter()
        .max_by(|a, b| modulus(*a).partial_cmp(&modulus(*b)).expect("finite"))
        .expect("nonempty basis");
    let phase = cmax.conj() / cr(modulus(&cmax));
    let mut parts = Vec::new();
    for (k, z) in c.iter().enumerate() {
        let z = *z * phase;
        if modulus(&z) >= T::lit(0.1) * modulus(&cmax) {
            let re = z.re.as_f64();
            let im = z.im.as_f64();
            let coeff = if im.abs() < 1e-9 { format!("{re:.6}") } else { format!("({re:.6}{im:+.6}i)") };
            parts.push(format!("{coeff}·{}", labels[k]));
        }
    }
    parts.join(" + ")
}
