//! The tracial state realized as the vacuum of a doubled Fermi system.
//!
//! The doubled Fock space carries `2L` modes: `A_x` at index `x` and `B_x` at
//! index `L + x`, sharing one Jordan–Wigner string. The physical modes are
//! `a_x = (A_x + B*_x)/√2`; their commutant partners are
//! `b_x = (B_x - A*_x)/√2`, fixed by `b(f) = W J a(f̄) J` with `J` the
//! modular conjugation of the vacuum `Ω`.

use std::collections::BTreeSet;

use crate::car::{global_parity, jw_annihilator, normalized_frobenius, FockOperator, LatticeSpec, Parity, SmearingVector};
use crate::dynamics::{heisenberg, EigenSystem};
use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianSpec;
use crate::poly::{product_basis, FermionPolynomial, Ladder};
use crate::scalar::{conj_matrix, cr, max_abs, CMatrix, CVector, Real, C};

/// Default memory budget for the dense operators of a doubled system.
pub const DEFAULT_DOUBLED_BUDGET_BYTES: usize = 1 << 30;

/// Antilinear map `ψ ↦ U conj(ψ)`.
#[derive(Debug, Clone)]
pub struct Conjugation<T: Real> {
    unitary: CMatrix<T>,
}

impl<T: Real> Conjugation<T> {
    pub fn unitary(&self) -> &CMatrix<T> {
        &self.unitary
    }

    pub fn apply(&self, psi: &CVector<T>) -> CVector<T> {
        &self.unitary * psi.map(|z| z.conj())
    }

    /// `J X J = U conj(X) conj(U)`
    pub fn conjugate_matrix(&self, x: &CMatrix<T>) -> CMatrix<T> {
        &self.unitary * conj_matrix(x) * conj_matrix(&self.unitary)
    }

    pub fn conjugate(&self, x: &FockOperator<T>) -> FockOperator<T> {
        FockOperator::from_parts(self.conjugate_matrix(x.matrix()), *x.lattice(), x.parity(), x.lattice().all_sites())
            .expect("shape preserved")
    }

    /// `max |J² - 1|`, i.e. `U conj(U) - 1`.
    pub fn involution_residual(&self) -> T {
        let n = self.unitary.nrows();
        max_abs(&(&self.unitary * conj_matrix(&self.unitary) - CMatrix::identity(n, n)))
    }

    /// `max |U†U - 1|`
    pub fn unitarity_residual(&self) -> T {
        let n = self.unitary.nrows();
        max_abs(&(self.unitary.adjoint() * &self.unitary - CMatrix::identity(n, n)))
    }
}

#[derive(Debug, Clone)]
pub struct DoubledSystem<T: Real> {
    physical: LatticeSpec,
    fock: LatticeSpec,
    big_a: Vec<FockOperator<T>>,
    big_b: Vec<FockOperator<T>>,
    a_ops: Vec<FockOperator<T>>,
    b_ops: Vec<FockOperator<T>>,
    omega: CVector<T>,
    w: FockOperator<T>,
    j: Conjugation<T>,
    /// Unitary `vec(X) ↦ 2^{L/2} π(X)Ω` from physical operators (column-major
    /// vectorization) to the doubled space.
    embedding: CMatrix<T>,
}

/// Action of a physical ladder on a doubled-space vector.
fn apply_physical_ladder<T: Real>(fock: &LatticeSpec, l: usize, op: Ladder, psi: &CVector<T>) -> CVector<T> {
    // a_x = (A_x + B*_x)/√2, a*_x = (A*_x + B_x)/√2
    let s = cr(T::one() / T::lit(2.0).sqrt());
    let mut out = CVector::zeros(psi.len());
    for (site, dagger) in [(op.site, op.dagger), (l + op.site, !op.dagger)] {
        for (i, &z) in psi.iter().enumerate() {
            if z == cr(T::zero()) {
                continue;
            }
            if let Some((t, negative)) = fock.apply_ladder(i, site, dagger) {
                out[t] += if negative { -z * s } else { z * s };
            }
        }
    }
    out
}

fn apply_physical_polynomial<T: Real>(
    fock: &LatticeSpec,
    l: usize,
    poly: &FermionPolynomial<T>,
    psi: &CVector<T>,
) -> CVector<T> {
    let mut total = CVector::zeros(psi.len());
    for m in poly.terms() {
        let mut v = psi.clone();
        for &op in m.ops.iter().rev() {
            v = apply_physical_ladder(fock, l, op, &v);
        }
        total += v * m.coefficient;
    }
    total
}

impl<T: Real> DoubledSystem<T> {
    pub fn new(sites: usize) -> Result<Self> {
        Self::with_budget(sites, DEFAULT_DOUBLED_BUDGET_BYTES)
    }

    pub fn with_budget(sites: usize, budget_bytes: usize) -> Result<Self> {
        let physical = LatticeSpec::open(sites)?;
        if 2 * sites > 12 {
            return Err(Error::Resource(format!("doubled system of {} modes is beyond dense reach", 2 * sites)));
        }
        let dim = 1usize << (2 * sites);
        let estimate = (4 * sites + 6) * dim * dim * std::mem::size_of::<C<T>>();
        if estimate > budget_bytes {
            return Err(Error::Resource(format!(
                "doubled system at L = {sites} needs about {estimate} bytes, budget is {budget_bytes}"
            )));
        }
        let fock = LatticeSpec::open(2 * sites)?;
        let big_a: Vec<FockOperator<T>> = (0..sites).map(|x| jw_annihilator(x, &fock)).collect::<Result<_>>()?;
        let big_b: Vec<FockOperator<T>> =
            (0..sites).map(|x| jw_annihilator(sites + x, &fock)).collect::<Result<_>>()?;
        let s = T::one() / T::lit(2.0).sqrt();
        let mut a_ops = Vec::with_capacity(sites);
        let mut b_ops = Vec::with_capacity(sites);
        for x in 0..sites {
            let support = BTreeSet::from([x, sites + x]);
            let a = (&big_a[x] + &big_b[x].adjoint()).scale_real(s);
            let b = (&big_b[x] - &big_a[x].adjoint()).scale_real(s);
            a_ops.push(FockOperator::from_parts(a.into_matrix(), fock, Parity::Odd, support.clone())?);
            b_ops.push(FockOperator::from_parts(b.into_matrix(), fock, Parity::Odd, support)?);
        }
        let mut omega = CVector::zeros(dim);
        omega[0] = cr(T::one());
        let w = global_parity(&fock);

        // cyclic images of the orthogonal product basis and of its adjoints
        let all: Vec<usize> = (0..sites).collect();
        let basis = product_basis::<T>(&all);
        let mut cyc = CMatrix::zeros(dim, dim);
        let mut cyc_adj = CMatrix::zeros(dim, dim);
        let mut vecs = CMatrix::zeros(dim, dim);
        for (k, (_, poly)) in basis.iter().enumerate() {
            cyc.set_column(k, &apply_physical_polynomial(&fock, sites, poly, &omega));
            cyc_adj.set_column(k, &apply_physical_polynomial(&fock, sites, &poly.adjoint(), &omega));
            let phys = poly.realize(&physical)?;
            vecs.set_column(k, &CVector::from_column_slice(phys.matrix().as_slice()));
        }
        let gram: Vec<T> = (0..dim).map(|k| cyc.column(k).norm_squared()).collect();
        let smallest = gram.iter().copied().fold(T::max_value().unwrap(), |a, b| a.min(b));
        let off_diagonal = {
            let mut g = cyc.adjoint() * &cyc;
            for k in 0..dim {
                g[(k, k)] = cr(T::zero());
            }
            max_abs(&g)
        };
        if smallest < T::lit(1e-8) || off_diagonal > T::lit(1e-8) {
            return Err(Error::Degenerate(format!(
                "cyclic basis is not orthogonal (smallest norm² {smallest}, overlap {off_diagonal})"
            )));
        }
        // J(X_k Ω) = X_k* Ω  ⇒  U conj(M) = N  ⇒  U = N diag(1/m) Mᵀ
        let inv = CMatrix::from_diagonal(&CVector::from_iterator(dim, gram.iter().map(|&m| cr(T::one() / m))));
        let unitary = &cyc_adj * &inv * cyc.transpose();
        let j = Conjugation { unitary };

        // embedding: vec(X_k) ↦ 2^{L/2} X_k Ω, with ‖vec X_k‖² = 2^L m_k
        let scale = T::from_usize(1 << sites).unwrap();
        let weights =
            CMatrix::from_diagonal(&CVector::from_iterator(dim, gram.iter().map(|&m| cr(T::one() / (scale.sqrt() * m)))));
        let embedding = &cyc * weights * vecs.adjoint();

        Ok(Self { physical, fock, big_a, big_b, a_ops, b_ops, omega, w, j, embedding })
    }

    pub fn sites(&self) -> usize {
        self.physical.sites()
    }

    /// Physical lattice (open chain of `L` sites).
    pub fn physical_lattice(&self) -> &LatticeSpec {
        &self.physical
    }

    /// `2L`-mode lattice of the doubled Fock space.
    pub fn fock_lattice(&self) -> &LatticeSpec {
        &self.fock
    }

    pub fn dim(&self) -> usize {
        self.fock.dim()
    }

    pub fn big_a(&self, x: usize) -> &FockOperator<T> {
        &self.big_a[x]
    }

    pub fn big_b(&self, x: usize) -> &FockOperator<T> {
        &self.big_b[x]
    }

    pub fn a_ops(&self) -> &[FockOperator<T>] {
        &self.a_ops
    }

    pub fn b_ops(&self) -> &[FockOperator<T>] {
        &self.b_ops
    }

    pub fn omega(&self) -> &CVector<T> {
        &self.omega
    }

    pub fn parity(&self) -> &FockOperator<T> {
        &self.w
    }

    pub fn modular_conjugation(&self) -> &Conjugation<T> {
        &self.j
    }

    pub fn embedding(&self) -> &CMatrix<T> {
        &self.embedding
    }

    fn smeared(&self, ops: &[FockOperator<T>], f: &SmearingVector<T>) -> Result<FockOperator<T>> {
        if f.len() != self.sites() {
            return Err(Error::Shape(format!("smearing of length {} on {} sites", f.len(), self.sites())));
        }
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        let mut support = BTreeSet::new();
        for (x, &fx) in f.coefficients().iter().enumerate() {
            if fx != cr(T::zero()) {
                m += ops[x].matrix() * fx;
                support.extend(ops[x].support().iter().copied());
            }
        }
        FockOperator::from_parts(m, self.fock, Parity::Odd, support)
    }

    /// `a(f) = Σ f(x) a_x`
    pub fn a(&self, f: &SmearingVector<T>) -> Result<FockOperator<T>> {
        self.smeared(&self.a_ops, f)
    }

    pub fn b(&self, f: &SmearingVector<T>) -> Result<FockOperator<T>> {
        self.smeared(&self.b_ops, f)
    }

    pub fn big_a_smeared(&self, f: &SmearingVector<T>) -> Result<FockOperator<T>> {
        self.smeared(&self.big_a, f)
    }

    pub fn big_b_smeared(&self, f: &SmearingVector<T>) -> Result<FockOperator<T>> {
        self.smeared(&self.big_b, f)
    }

    /// Physical polynomial realized through the `a` modes.
    pub fn represent_polynomial(&self, p: &FermionPolynomial<T>) -> Result<FockOperator<T>> {
        p.realize_with(&self.a_ops)
    }

    /// Polynomial realized through the `b` modes.
    pub fn represent_in_b(&self, p: &FermionPolynomial<T>) -> Result<FockOperator<T>> {
        p.realize_with(&self.b_ops)
    }

    /// GNS image `π(X)` of an operator on the physical `L`-mode space.
    pub fn represent(&self, x: &FockOperator<T>) -> Result<FockOperator<T>> {
        if x.dim() != self.physical.dim() {
            return Err(Error::Shape(format!(
                "physical operator of dimension {} against {}",
                x.dim(),
                self.physical.dim()
            )));
        }
        let n = x.dim();
        // vec(X Y) = (1 ⊗ X) vec(Y)
        let mut left = CMatrix::zeros(n * n, n * n);
        for blk in 0..n {
            left.view_mut((blk * n, blk * n), (n, n)).copy_from(x.matrix());
        }
        let m = &self.embedding * left * self.embedding.adjoint();
        let support: BTreeSet<usize> =
            x.support().iter().flat_map(|&s| [s, s + self.sites()]).collect();
        FockOperator::from_parts(m, self.fock, x.parity(), support)
    }

    /// `⟨Ω|P|Ω⟩`
    pub fn tracial_expectation(&self, p: &FockOperator<T>) -> Result<C<T>> {
        if p.dim() != self.dim() {
            return Err(Error::Shape(format!("operator of dimension {} against {}", p.dim(), self.dim())));
        }
        Ok(p.matrix()[(0, 0)])
    }

    /// `V′ = J V J`
    pub fn commutant_of(&self, v: &FockOperator<T>) -> FockOperator<T> {
        self.j.conjugate(v)
    }

    /// `max |J a(f̄) J - W b(f)|`
    pub fn conjugation_relation_residual(&self, f: &SmearingVector<T>) -> Result<T> {
        let lhs = self.j.conjugate(&self.a(&f.conj())?);
        let rhs = &self.w * &self.b(f)?;
        Ok(lhs.max_deviation(&rhs))
    }

    /// Max residual of the mixed anticommutators between the `a` and `b`
    /// modes and of the CAR among the `b` modes.
    pub fn cross_relation_residual(&self) -> T {
        let id = FockOperator::identity(self.fock);
        let zero = FockOperator::zero(self.fock);
        let mut worst = T::zero();
        for x in 0..self.sites() {
            for y in 0..self.sites() {
                let (a, b) = (&self.a_ops[x], &self.b_ops[y]);
                worst = worst.max(a.anticommutator(b).max_deviation(&zero));
                worst = worst.max(a.anticommutator(&b.adjoint()).max_deviation(&zero));
                worst = worst.max(self.b_ops[x].anticommutator(b).max_deviation(&zero));
                let expected = if x == y { &id } else { &zero };
                worst = worst.max(self.b_ops[x].anticommutator(&b.adjoint()).max_deviation(expected));
                worst = worst.max(self.a_ops[x].anticommutator(&self.a_ops[y].adjoint()).max_deviation(expected));
            }
        }
        worst
    }

    /// Residual of `A_x = (a_x - b*_x)/√2` and `B*_x = (a_x + b*_x)/√2`.
    pub fn inversion_residual(&self) -> T {
        let s = T::one() / T::lit(2.0).sqrt();
        let mut worst = T::zero();
        for x in 0..self.sites() {
            let a = &self.a_ops[x];
            let bd = self.b_ops[x].adjoint();
            worst = worst.max((a - &bd).scale_real(s).max_deviation(&self.big_a[x]));
            worst = worst.max((a + &bd).scale_real(s).max_deviation(&self.big_b[x].adjoint()));
        }
        worst
    }

    /// Largest `‖X Ω‖` over the ladder operators `A_x`, `B_x`.
    pub fn vacuum_residual(&self) -> T {
        self.big_a
            .iter()
            .chain(&self.big_b)
            .map(|op| (op.matrix() * &self.omega).norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// `N_A = Σ A*_x A_x`
    pub fn number_a(&self) -> FockOperator<T> {
        self.number_of(&self.big_a)
    }

    /// `N_B = Σ B*_x B_x`
    pub fn number_b(&self) -> FockOperator<T> {
        self.number_of(&self.big_b)
    }

    fn number_of(&self, ops: &[FockOperator<T>]) -> FockOperator<T> {
        ops.iter()
            .fold(FockOperator::zero(self.fock), |acc, op| &acc + &(&op.adjoint() * op))
    }

    /// `H_d = H_a - J H_a J` for a physical Hamiltonian.
    pub fn doubled_hamiltonian(&self, spec: &HamiltonianSpec<T>) -> Result<FockOperator<T>> {
        if spec.lattice.sites() != self.sites() {
            return Err(Error::Shape(format!(
                "Hamiltonian on {} sites against doubled system of {}",
                spec.lattice.sites(),
                self.sites()
            )));
        }
        let h_phys = spec.build()?;
        self.doubled_hamiltonian_from_operator(&h_phys)
    }

    /// `H_d = π(H) - J π(H) J` for a gauge-invariant physical operator.
    pub fn doubled_hamiltonian_from_operator(&self, h_phys: &FockOperator<T>) -> Result<FockOperator<T>> {
        let n = crate::car::total_number::<T>(h_phys.lattice());
        let gauge = max_abs(h_phys.commutator(&n).matrix());
        if gauge > T::lit(1e-10) * T::one().max(max_abs(h_phys.matrix())) {
            return Err(Error::Validation(format!("Hamiltonian is not gauge invariant ([H, N] residual {gauge})")));
        }
        let residual = h_phys.hermiticity_residual();
        if residual > T::lit(1e-10) {
            return Err(Error::NotSelfAdjoint { residual: residual.as_f64() });
        }
        let ha = self.represent(h_phys)?;
        let hd = &ha - &self.j.conjugate(&ha);
        Ok(hd.with_parity(Parity::Even).with_support(self.fock.all_sites()))
    }

    /// `Σ h_{xy} A*_x A_y - Σ conj(h_{xy}) B*_x B_y`, the decoupled form of the
    /// doubled Hamiltonian for quadratic `H = Σ h_{xy} a*_x a_y`.
    pub fn decoupled_quadratic(&self, h: &CMatrix<T>) -> Result<FockOperator<T>> {
        if h.nrows() != self.sites() || h.ncols() != self.sites() {
            return Err(Error::Shape(format!("{}×{} hopping on {} sites", h.nrows(), h.ncols(), self.sites())));
        }
        let mut m = CMatrix::zeros(self.dim(), self.dim());
        for x in 0..self.sites() {
            for y in 0..self.sites() {
                let v = h[(x, y)];
                if v == cr(T::zero()) {
                    continue;
                }
                m += (self.big_a[x].adjoint().matrix() * self.big_a[y].matrix()) * v;
                m -= (self.big_b[x].adjoint().matrix() * self.big_b[y].matrix()) * v.conj();
            }
        }
        FockOperator::from_parts(m, self.fock, Parity::Even, self.fock.all_sites())
    }

    /// Builds `U = V V′ W` and `P = (1 + U)/2` for `V = a(f₀) + a*(f₀)`.
    pub fn build_u_and_p(&self, f0: &SmearingVector<T>) -> Result<UnitaryProjector<T>> {
        let norm = f0.norm();
        if (norm - T::one()).abs() > T::lit(1e-10) {
            return Err(Error::Precondition(format!("U needs ‖f₀‖ = 1, got {norm}")));
        }
        let a = self.a(f0)?;
        let v = &a + &a.adjoint();
        let vp = self.commutant_of(&v);
        let u = &(&v * &vp) * &self.w;
        let id = FockOperator::identity(self.fock);
        let p = (&id + &u).scale_real(T::lit(0.5));
        let big_a = self.big_a_smeared(f0)?;
        let big_b = self.big_b_smeared(&f0.conj())?;
        let closed = &(&big_a * &big_a.adjoint()) + &(&big_b * &big_b.adjoint());
        Ok(UnitaryProjector {
            unitarity: max_abs(&(u.matrix() * u.matrix().adjoint() - id.matrix())),
            self_adjointness: u.hermiticity_residual(),
            involution: max_abs(&(u.matrix() * u.matrix() - id.matrix())),
            idempotence: p.max_deviation(&(&p * &p)),
            closed_form_deviation: normalized_frobenius(&(p.matrix() - closed.matrix())),
            u,
            p,
        })
    }

    /// `i[H_d, P]` with a central-difference cross-check and its spectrum.
    pub fn p_time_derivative(
        &self,
        p: &FockOperator<T>,
        hd: &FockOperator<T>,
        eig: &EigenSystem<T>,
    ) -> Result<PDerivative<T>> {
        let commutator = hd.commutator(p).scale(C::new(T::zero(), T::one()));
        let h = T::lit(1e-5);
        let forward = heisenberg(p, eig, h)?;
        let backward = heisenberg(p, eig, -h)?;
        let difference = (&forward - &backward).scale_real(T::one() / (T::lit(2.0) * h));
        let finite_difference_distance = commutator.frobenius_distance(&difference);
        let herm = (commutator.matrix() + commutator.matrix().adjoint()) * cr(T::lit(0.5));
        let mut eigenvalues: Vec<T> = herm.symmetric_eigenvalues().iter().copied().collect();
        eigenvalues.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
        let min_nonzero = eigenvalues
            .iter()
            .map(|x| x.abs())
            .filter(|&x| x > T::lit(1e-9))
            .fold(None, |acc: Option<T>, x| Some(acc.map_or(x, |a| a.min(x))));
        Ok(PDerivative { commutator, finite_difference_distance, eigenvalues, min_nonzero })
    }

    /// Residual of the trace property `|ω(XY) - ω(YX)|`.
    pub fn trace_property_residual(&self, x: &FockOperator<T>, y: &FockOperator<T>) -> Result<T> {
        let xy = self.tracial_expectation(&(x * y))?;
        let yx = self.tracial_expectation(&(y * x))?;
        Ok(crate::scalar::modulus(&(xy - yx)))
    }
}

/// Output of [`DoubledSystem::build_u_and_p`].
#[derive(Debug, Clone)]
pub struct UnitaryProjector<T: Real> {
    pub u: FockOperator<T>,
    pub p: FockOperator<T>,
    pub unitarity: T,
    pub self_adjointness: T,
    pub involution: T,
    pub idempotence: T,
    /// Normalized Frobenius distance between `P` and `A₀A₀* + B₀B₀*`;
    /// reported only, since the latter has eigenvalue 2.
    pub closed_form_deviation: T,
}

#[derive(Debug, Clone)]
pub struct PDerivative<T: Real> {
    pub commutator: FockOperator<T>,
    pub finite_difference_distance: T,
    pub eigenvalues: Vec<T>,
    pub min_nonzero: Option<T>,
}
