//! Exact Heisenberg-picture evolution `τ_t A = e^{iHt} A e^{-iHt}` by full
//! diagonalization, the quasifree shortcut, invariant means and Bohr
//! decompositions of correlation functions.

use rayon::prelude::*;

use crate::car::{FockOperator, LatticeSpec, SmearingVector};
use crate::error::{Error, Result};
use crate::scalar::{cis, cr, hermitian_eigen, matmul, max_abs, modulus, CMatrix, CVector, Real, C};

pub const DEFAULT_GAP_TOLERANCE: f64 = 1e-9;

/// Ascending spectrum, unitary eigenvectors (as columns) and degeneracy
/// groups of a self-adjoint matrix.
#[derive(Debug, Clone)]
pub struct EigenSystem<T: Real> {
    eigenvalues: Vec<T>,
    eigenvectors: CMatrix<T>,
    groups: Vec<std::ops::Range<usize>>,
    group_of: Vec<usize>,
    gap_tolerance: T,
}

impl<T: Real> EigenSystem<T> {
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix<T> {
        &self.eigenvectors
    }

    /// Index ranges of eigenvalues chained within the gap tolerance.
    pub fn groups(&self) -> &[std::ops::Range<usize>] {
        &self.groups
    }

    pub fn group_of(&self, i: usize) -> usize {
        self.group_of[i]
    }

    pub fn gap_tolerance(&self) -> T {
        self.gap_tolerance
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Group representatives, one value per distinct level.
    pub fn distinct_levels(&self) -> Vec<T> {
        self.groups.iter().map(|g| self.eigenvalues[g.start]).collect()
    }

    /// `max |H - V diag(E) V†|`
    pub fn reconstruction_residual(&self, h: &CMatrix<T>) -> T {
        let v = &self.eigenvectors;
        let d = CMatrix::from_diagonal(&CVector::from_iterator(self.dim(), self.eigenvalues.iter().map(|&e| cr(e))));
        max_abs(&(h - v * d * v.adjoint()))
    }

    /// `max |V†V - 1|`
    pub fn unitarity_residual(&self) -> T {
        let n = self.dim();
        max_abs(&(self.eigenvectors.adjoint() * &self.eigenvectors - CMatrix::identity(n, n)))
    }

    fn to_eigenbasis(&self, a: &CMatrix<T>) -> CMatrix<T> {
        matmul(&matmul(&self.eigenvectors.adjoint(), a), &self.eigenvectors)
    }

    fn from_eigenbasis(&self, a: &CMatrix<T>) -> CMatrix<T> {
        matmul(&matmul(&self.eigenvectors, a), &self.eigenvectors.adjoint())
    }

    fn check_dim(&self, a: &FockOperator<T>) -> Result<()> {
        if a.dim() != self.dim() {
            return Err(Error::Shape(format!(
                "operator of dimension {} against Hamiltonian of dimension {}",
                a.dim(),
                self.dim()
            )));
        }
        Ok(())
    }
}

/// Diagonalizes a self-adjoint matrix.
pub fn eigendecompose_matrix<T: Real>(h: &CMatrix<T>, gap_tolerance: T) -> Result<EigenSystem<T>> {
    if h.nrows() != h.ncols() {
        return Err(Error::Shape(format!("{}×{} matrix is not square", h.nrows(), h.ncols())));
    }
    let scale = T::one().max(max_abs(h));
    let residual = max_abs(&(h - h.adjoint()));
    if residual > T::lit(1e-10) * scale {
        return Err(Error::NotSelfAdjoint { residual: residual.as_f64() });
    }
    let sym = (h + h.adjoint()) * cr(T::lit(0.5));
    let (values, vectors) = hermitian_eigen(&sym);
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).expect("finite eigenvalues"));
    let eigenvalues: Vec<T> = order.iter().map(|&i| values[i]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        eigenvectors.set_column(k, &vectors.column(i));
    }
    let mut groups = Vec::new();
    let mut group_of = vec![0; n];
    let mut start = 0;
    for i in 1..=n {
        if i == n || eigenvalues[i] - eigenvalues[i - 1] > gap_tolerance {
            for g in group_of.iter_mut().take(i).skip(start) {
                *g = groups.len();
            }
            groups.push(start..i);
            start = i;
        }
    }
    Ok(EigenSystem { eigenvalues, eigenvectors, groups, group_of, gap_tolerance })
}

pub fn eigendecompose<T: Real>(h: &FockOperator<T>, gap_tolerance: T) -> Result<EigenSystem<T>> {
    eigendecompose_matrix(h.matrix(), gap_tolerance)
}

/// `A` expressed in the eigenbasis, ready for repeated evolution.
#[derive(Debug, Clone)]
pub struct Evolver<'a, T: Real> {
    eig: &'a EigenSystem<T>,
    rotated: CMatrix<T>,
    template: FockOperator<T>,
}

impl<'a, T: Real> Evolver<'a, T> {
    pub fn new(a: &FockOperator<T>, eig: &'a EigenSystem<T>) -> Result<Self> {
        eig.check_dim(a)?;
        Ok(Self { eig, rotated: eig.to_eigenbasis(a.matrix()), template: a.clone() })
    }

    /// Matrix of `τ_t A` in the eigenbasis.
    pub fn eigenbasis_at(&self, t: T) -> CMatrix<T> {
        let e = &self.eig.eigenvalues;
        let phases: Vec<C<T>> = e.iter().map(|&x| cis(x * t)).collect();
        let mut m = self.rotated.clone();
        for j in 0..m.ncols() {
            let right = phases[j].conj();
            for i in 0..m.nrows() {
                m[(i, j)] *= phases[i] * right;
            }
        }
        m
    }

    pub fn at(&self, t: T) -> FockOperator<T> {
        let m = self.eig.from_eigenbasis(&self.eigenbasis_at(t));
        // support metadata is not preserved by interacting evolution
        FockOperator::from_parts(m, *self.template.lattice(), self.template.parity(), self.template.lattice().all_sites())
            .expect("shape preserved")
    }

    /// Evaluates `τ_t A` on a grid, in parallel; output order follows `times`.
    pub fn on_grid(&self, times: &[T]) -> Vec<FockOperator<T>> {
        times.par_iter().map(|&t| self.at(t)).collect()
    }
}

/// `τ_t A = e^{iHt} A e^{-iHt}`
pub fn heisenberg<T: Real>(a: &FockOperator<T>, eig: &EigenSystem<T>, t: T) -> Result<FockOperator<T>> {
    if t == T::zero() {
        eig.check_dim(a)?;
        return Ok(a.clone());
    }
    Ok(Evolver::new(a, eig)?.at(t))
}

/// `e^{iht}` for a Hermitian single-particle matrix.
pub fn single_particle_propagator<T: Real>(h: &CMatrix<T>, t: T) -> Result<CMatrix<T>> {
    let eig = eigendecompose_matrix(h, T::lit(DEFAULT_GAP_TOLERANCE))?;
    let phases = CVector::from_iterator(eig.dim(), eig.eigenvalues.iter().map(|&e| cis(e * t)));
    Ok(&eig.eigenvectors * CMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint())
}

/// Smearing vector `g` with `τ_t a(f) = a(g)` for `H = Σ h_{xy} a*_x a_y`.
///
/// With `a(f) = Σ f(x) a_x` one has `τ_t a_x = Σ_y (e^{-iht})_{xy} a_y`, so
/// `g = conj(e^{iht}) f`. For real symmetric hopping this is `e^{-iht} f`.
pub fn quasifree_smearing<T: Real>(f: &SmearingVector<T>, h: &CMatrix<T>, t: T) -> Result<SmearingVector<T>> {
    if f.len() != h.nrows() {
        return Err(Error::Shape(format!("smearing of length {} against {}×{} hopping", f.len(), h.nrows(), h.ncols())));
    }
    let u = single_particle_propagator(h, t)?;
    let fv = CVector::from_column_slice(f.coefficients());
    let g = u.map(|z| z.conj()) * fv;
    SmearingVector::new(g.iter().copied().collect())
}

/// `τ_t a(f)` for quasifree dynamics.
pub fn quasifree_heisenberg<T: Real>(
    f: &SmearingVector<T>,
    h: &CMatrix<T>,
    t: T,
    lattice: &LatticeSpec,
) -> Result<FockOperator<T>> {
    crate::car::smeared_annihilator(&quasifree_smearing(f, h, t)?, lattice)
}

/// Spectral pinching `Σ_E P_E A P_E` over degeneracy groups.
pub fn eta_mean<T: Real>(a: &FockOperator<T>, eig: &EigenSystem<T>) -> Result<FockOperator<T>> {
    eig.check_dim(a)?;
    let mut m = eig.to_eigenbasis(a.matrix());
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if eig.group_of[i] != eig.group_of[j] {
                m[(i, j)] = cr(T::zero());
            }
        }
    }
    Ok(a.with_matrix(eig.from_eigenbasis(&m)).with_support(a.lattice().all_sites()))
}

/// `(1/T) ∫₀ᵀ τ_t A dt`, evaluated in closed form.
pub fn cesaro_average<T: Real>(a: &FockOperator<T>, eig: &EigenSystem<T>, horizon: T) -> Result<FockOperator<T>> {
    eig.check_dim(a)?;
    if horizon <= T::zero() {
        return Err(Error::Precondition("averaging horizon must be positive".into()));
    }
    let mut m = eig.to_eigenbasis(a.matrix());
    let e = &eig.eigenvalues;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let x = (e[i] - e[j]) * horizon;
            if x.abs() > T::lit(1e-12) {
                // (e^{ix} - 1) / (ix)
                let factor = (cis(x) - cr(T::one())) / C::new(T::zero(), x);
                m[(i, j)] *= factor;
            }
        }
    }
    Ok(a.with_matrix(eig.from_eigenbasis(&m)).with_support(a.lattice().all_sites()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom<T: Real> {
    pub frequency: T,
    /// Complex amplitude; real and nonnegative when `A = B` and the state is
    /// stationary.
    pub amplitude: C<T>,
}

impl<T: Real> Atom<T> {
    pub fn weight(&self) -> T {
        self.amplitude.re
    }
}

/// Bohr decomposition `F(t) = Σ amplitude · e^{i frequency t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure<T: Real> {
    pub atoms: Vec<Atom<T>>,
}

impl<T: Real> SpectralMeasure<T> {
    pub fn evaluate(&self, t: T) -> C<T> {
        self.atoms.iter().fold(cr(T::zero()), |acc, a| acc + a.amplitude * cis(a.frequency * t))
    }

    pub fn total(&self) -> C<T> {
        self.evaluate(T::zero())
    }

    /// Atom with the largest amplitude modulus.
    pub fn dominant(&self) -> Option<&Atom<T>> {
        self.atoms
            .iter()
            .max_by(|a, b| modulus(&a.amplitude).partial_cmp(&modulus(&b.amplitude)).expect("finite"))
    }
}

/// Decomposes `t ↦ ⟨ψ| A† τ_t B |ψ⟩` into atoms at Bohr frequencies.
/// Atoms closer than the degeneracy tolerance are merged; atoms with
/// amplitude below `1e-14` are dropped.
pub fn correlation_spectrum<T: Real>(
    a: &FockOperator<T>,
    b: &FockOperator<T>,
    eig: &EigenSystem<T>,
    state: &CVector<T>,
) -> Result<SpectralMeasure<T>> {
    eig.check_dim(a)?;
    eig.check_dim(b)?;
    if state.len() != eig.dim() {
        return Err(Error::Shape(format!("state of length {} against dimension {}", state.len(), eig.dim())));
    }
    let norm = state.norm();
    if (norm - T::one()).abs() > T::lit(1e-10) {
        return Err(Error::Precondition(format!("state is not normalized (norm {norm})")));
    }
    let v = &eig.eigenvectors;
    let alpha = v.adjoint() * (a.matrix() * state);
    let c = v.adjoint() * state;
    let bp = eig.to_eigenbasis(b.matrix());
    let e = &eig.eigenvalues;
    let n = eig.dim();
    let mut raw: Vec<(T, C<T>)> = Vec::new();
    for j in 0..n {
        if modulus(&alpha[j]) == T::zero() {
            continue;
        }
        for k in 0..n {
            let amp = alpha[j].conj() * bp[(j, k)] * c[k];
            if modulus(&amp) != T::zero() {
                raw.push((e[j] - e[k], amp));
            }
        }
    }
    Ok(merge_atoms(raw, eig.gap_tolerance))
}

/// Decomposes `t ↦ 2^{-L} tr(A† τ_t B)` into atoms at Bohr frequencies.
pub fn tracial_correlation_spectrum<T: Real>(
    a: &FockOperator<T>,
    b: &FockOperator<T>,
    eig: &EigenSystem<T>,
) -> Result<SpectralMeasure<T>> {
    eig.check_dim(a)?;
    eig.check_dim(b)?;
    let ap = eig.to_eigenbasis(a.matrix());
    let bp = eig.to_eigenbasis(b.matrix());
    let e = &eig.eigenvalues;
    let n = eig.dim();
    let weight = cr(T::one() / T::from_usize(n).unwrap());
    let mut raw: Vec<(T, C<T>)> = Vec::new();
    // (A† D B D†)_{jj} = Σ_k conj(A_{kj}) e^{iE_k t} B_{kj} e^{-iE_j t}
    for j in 0..n {
        for k in 0..n {
            let amp = ap[(k, j)].conj() * bp[(k, j)] * weight;
            if modulus(&amp) != T::zero() {
                raw.push((e[k] - e[j], amp));
            }
        }
    }
    Ok(merge_atoms(raw, eig.gap_tolerance))
}

/// Sorts raw `(frequency, amplitude)` pairs and chain-merges frequencies that
/// agree within the tolerance; each atom keeps the first frequency of its
/// cluster. Atoms with amplitude below `1e-14` are dropped.
fn merge_atoms<T: Real>(mut raw: Vec<(T, C<T>)>, gap_tolerance: T) -> SpectralMeasure<T> {
    raw.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite"));
    let tol = gap_tolerance.max(T::lit(1e-12));
    let mut atoms: Vec<Atom<T>> = Vec::new();
    let mut previous = T::zero();
    for (w, amp) in raw {
        match atoms.last_mut() {
            Some(last) if w - previous <= tol => last.amplitude += amp,
            _ => atoms.push(Atom { frequency: w, amplitude: amp }),
        }
        previous = w;
    }
    atoms.retain(|a| modulus(&a.amplitude) > T::lit(1e-14));
    SpectralMeasure { atoms }
}

/// Direct evaluation of `⟨ψ| A† τ_t B |ψ⟩`.
pub fn correlation<T: Real>(
    a: &FockOperator<T>,
    b: &FockOperator<T>,
    eig: &EigenSystem<T>,
    state: &CVector<T>,
    t: T,
) -> Result<C<T>> {
    let bt = heisenberg(b, eig, t)?;
    let left = a.matrix() * state;
    Ok(left.dotc(&(bt.matrix() * state)))
}

/// Ballistic pre-recurrence estimate `L / (2 v)`; with the hopping-1 light
/// cone speed `v = 2` this is `L/4`.
pub fn ballistic_window<T: Real>(lattice: &LatticeSpec, velocity: T) -> T {
    T::from_usize(lattice.sites()).unwrap() / (T::lit(2.0) * velocity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::car::{jw_annihilator, jw_creator, smeared_annihilator, total_number, NormKind};
    use crate::hamiltonian::{build_quasifree, HamiltonianSpec, HoppingKernel};
    use crate::random::{random_hermitian, random_operator, random_smearing, rng};

    fn diag(v: &[f64]) -> CMatrix<f64> {
        CMatrix::from_diagonal(&CVector::from_iterator(v.len(), v.iter().map(|&x| cr(x))))
    }

    #[test]
    fn degeneracy_groups() {
        let eig = eigendecompose_matrix(&diag(&[0.0, 1.0, 1.0, 2.0]), 1e-9).unwrap();
        assert_eq!(eig.groups(), &[0..1, 1..3, 3..4]);
    }

    #[test]
    fn number_operator_spectrum() {
        let l = LatticeSpec::open(2).unwrap();
        let eig = eigendecompose(&total_number::<f64>(&l), 1e-9).unwrap();
        let ev: Vec<f64> = eig.eigenvalues().iter().map(|x| x.round()).collect();
        assert_eq!(ev, vec![0.0, 1.0, 1.0, 2.0]);
    }

    #[test]
    fn random_reconstruction() {
        let mut r = rng(11);
        let h = random_hermitian::<f64>(64, &mut r);
        let eig = eigendecompose_matrix(&h, 1e-9).unwrap();
        assert!(eig.reconstruction_residual(&h) < 1e-10);
        assert!(eig.unitarity_residual() < 1e-10);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = diag(&[0.0, 1.0]);
        m[(0, 1)] = cr(1.0);
        assert!(matches!(eigendecompose_matrix(&m, 1e-9), Err(Error::NotSelfAdjoint { .. })));
    }

    #[test]
    fn gauge_rotation() {
        let l = LatticeSpec::periodic(3).unwrap();
        let mu = 0.8;
        let eig = eigendecompose(&total_number::<f64>(&l).scale_real(mu), 1e-9).unwrap();
        let a0 = jw_annihilator::<f64>(0, &l).unwrap();
        let t = 1.3;
        let evolved = heisenberg(&a0, &eig, t).unwrap();
        assert!(evolved.max_deviation(&a0.scale(cis(-mu * t))) < 1e-12);
        assert_eq!(heisenberg(&a0, &eig, 0.0).unwrap().matrix(), a0.matrix());
    }

    #[test]
    fn norm_group_law_and_automorphism() {
        let l = LatticeSpec::periodic(3).unwrap();
        let h = HamiltonianSpec::<f64>::interacting_benchmark(l).build().unwrap();
        let eig = eigendecompose(&h, 1e-9).unwrap();
        let mut r = rng(3);
        let a = random_operator::<f64>(&l, &mut r).unwrap();
        let b = random_operator::<f64>(&l, &mut r).unwrap();
        let at = heisenberg(&a, &eig, 1.7).unwrap();
        let n0 = a.norm(NormKind::Spectral).unwrap();
        assert!((at.norm(NormKind::Spectral).unwrap() - n0).abs() < 1e-10 * n0.max(1.0));
        let ts = heisenberg(&heisenberg(&a, &eig, -2.1).unwrap(), &eig, 3.4).unwrap();
        assert!(ts.max_deviation(&heisenberg(&a, &eig, 1.3).unwrap()) < 1e-9);
        let ab = heisenberg(&(&a * &b), &eig, 0.7).unwrap();
        let prod = &heisenberg(&a, &eig, 0.7).unwrap() * &heisenberg(&b, &eig, 0.7).unwrap();
        assert!(ab.max_deviation(&prod) < 1e-9);
    }

    #[test]
    fn quasifree_matches_full_evolution() {
        let l = LatticeSpec::periodic(6).unwrap();
        let q = build_quasifree(&HoppingKernel::nearest_neighbor(1.0), &l).unwrap();
        let eig = eigendecompose(&q.operator, 1e-9).unwrap();
        let f = SmearingVector::delta(0, 6);
        let full = heisenberg(&smeared_annihilator(&f, &l).unwrap(), &eig, 0.9).unwrap();
        let fast = quasifree_heisenberg(&f, &q.single_particle, 0.9, &l).unwrap();
        assert!(full.frobenius_distance(&fast) < 1e-10);
        let mut r = rng(5);
        let g = random_smearing::<f64>(6, &mut r);
        let fast0 = quasifree_heisenberg(&g, &q.single_particle, 0.0, &l).unwrap();
        assert!(fast0.max_deviation(&smeared_annihilator(&g, &l).unwrap()) < 1e-12);
    }

    #[test]
    fn complex_hopping_convention() {
        let l = LatticeSpec::open(3).unwrap();
        let kernel = HoppingKernel::new(
            [(1, C::new(0.3, 0.7)), (-1, C::new(0.3, -0.7)), (0, cr(0.2))].into_iter().collect(),
        )
        .unwrap();
        let q = build_quasifree(&kernel, &l).unwrap();
        let eig = eigendecompose(&q.operator, 1e-9).unwrap();
        let mut r = rng(8);
        let f = random_smearing::<f64>(3, &mut r);
        let full = heisenberg(&smeared_annihilator(&f, &l).unwrap(), &eig, 1.1).unwrap();
        let fast = quasifree_heisenberg(&f, &q.single_particle, 1.1, &l).unwrap();
        assert!(full.frobenius_distance(&fast) < 1e-10);
    }

    #[test]
    fn eta_mean_properties() {
        let l = LatticeSpec::periodic(3).unwrap();
        let h = HamiltonianSpec::<f64>::interacting_benchmark(l).build().unwrap();
        let eig = eigendecompose(&h, 1e-9).unwrap();
        let mut r = rng(9);
        let a = random_operator::<f64>(&l, &mut r).unwrap();
        let m = eta_mean(&a, &eig).unwrap();
        assert!(max_abs(m.commutator(&h).matrix()) < 1e-10);
        assert!(eta_mean(&m, &eig).unwrap().max_deviation(&m) < 1e-12);
        assert!(modulus(&(m.normalized_trace() - a.normalized_trace())) < 1e-10);
    }

    #[test]
    fn correlation_atoms_reproduce_function() {
        let l = LatticeSpec::periodic(3).unwrap();
        let h = HamiltonianSpec::<f64>::interacting_benchmark(l).build().unwrap();
        let eig = eigendecompose(&h, 1e-9).unwrap();
        let mut r = rng(4);
        let a = random_operator::<f64>(&l, &mut r).unwrap();
        let b = random_operator::<f64>(&l, &mut r).unwrap();
        let mut psi = crate::random::random_matrix::<f64>(8, &mut r).column(0).into_owned();
        psi /= cr(psi.norm());
        let spec = correlation_spectrum(&a, &b, &eig, &psi).unwrap();
        for &t in &[0.0, 0.37, 2.5, -4.0] {
            let direct = correlation(&a, &b, &eig, &psi, t).unwrap();
            assert!(modulus(&(direct - spec.evaluate(t))) < 1e-8);
        }
        let unnormalized = &psi * cr(2.0);
        assert!(correlation_spectrum(&a, &b, &eig, &unnormalized).is_err());
    }

    #[test]
    fn gauge_oscillation_atom() {
        let l = LatticeSpec::periodic(2).unwrap();
        let mu = 0.6;
        let eig = eigendecompose(&total_number::<f64>(&l).scale_real(mu), 1e-9).unwrap();
        let ad = jw_creator::<f64>(0, &l).unwrap();
        let mut vac = CVector::zeros(4);
        vac[0] = cr(1.0);
        let spec = correlation_spectrum(&ad, &ad, &eig, &vac).unwrap();
        assert_eq!(spec.atoms.len(), 1);
        assert!((spec.atoms[0].frequency - mu).abs() < 1e-12);
        assert!((spec.atoms[0].weight() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ballistic_quarter() {
        assert_eq!(ballistic_window(&LatticeSpec::periodic(8).unwrap(), 2.0), 2.0);
    }

    #[test]
    fn tracial_spectrum_reproduces_direct_trace() {
        let l = LatticeSpec::periodic(4).unwrap();
        let h = HamiltonianSpec::<f64>::interacting_benchmark(l).build().unwrap();
        let eig = eigendecompose(&h, 1e-9).unwrap();
        let mut r = rng(11);
        let a = random_operator::<f64>(&l, &mut r).unwrap();
        let b = random_operator::<f64>(&l, &mut r).unwrap();
        let measure = tracial_correlation_spectrum(&a, &b, &eig).unwrap();
        for t in [0.0, 0.9, 2.5] {
            let direct = (&a.adjoint() * &heisenberg(&b, &eig, t).unwrap()).normalized_trace();
            assert!(modulus(&(measure.evaluate(t) - direct)) < 1e-12);
        }
    }
}
