//! Built-in invariant suite behind `check fast|full`.

use std::collections::BTreeSet;
use std::fmt;

use crate::car::{car_residual, jw_annihilator, local_unitary_u0, total_number, FockOperator, LatticeSpec, NormKind};
use crate::diagnostics::conditional_expectation;
use crate::doubled::DoubledSystem;
use crate::dynamics::{eigendecompose, eta_mean, heisenberg, quasifree_heisenberg, DEFAULT_GAP_TOLERANCE};
use crate::error::Result;
use crate::hamiltonian::{build_quasifree, HamiltonianSpec, InteractionTerm};
use crate::random::{random_operator, random_polynomial, random_unit_smearing, rng};
use crate::scalar::{cis, max_abs, modulus};
use crate::twist::{covariance_violation, gauge_twist, local_eigenoperator_residual, TwistAngle};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckLevel {
    /// Lattices up to three sites, doubled systems up to two.
    Fast,
    /// Lattices up to six sites, doubled systems up to three.
    Full,
}

impl CheckLevel {
    fn max_sites(self) -> usize {
        match self {
            CheckLevel::Fast => 3,
            CheckLevel::Full => 6,
        }
    }

    fn max_doubled(self) -> usize {
        match self {
            CheckLevel::Fast => 2,
            CheckLevel::Full => 3,
        }
    }
}

pub type AnnihilatorHook = fn(usize, &LatticeSpec) -> Result<FockOperator<f64>>;

/// Mutation hooks; the default uses the production Jordan–Wigner operators.
#[derive(Clone, Copy)]
pub struct CheckOptions {
    pub annihilator: AnnihilatorHook,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { annihilator: jw_annihilator::<f64> }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckEntry {
    pub suite: &'static str,
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub error: Option<String>,
}

impl CheckEntry {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.residual.is_finite() && self.residual < self.tolerance
    }
}

impl fmt::Display for CheckEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} {}/{} residual={:.3e} tol={:.0e}", self.suite, self.name, self.residual, self.tolerance)?;
        if let Some(e) = &self.error {
            write!(f, " error: {e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct CheckReport {
    pub entries: Vec<CheckEntry>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(CheckEntry::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| !e.passed())
    }

    pub fn suite_passed(&self, suite: &str) -> bool {
        self.entries.iter().filter(|e| e.suite == suite).all(CheckEntry::passed)
    }

    fn record(&mut self, suite: &'static str, name: impl Into<String>, tolerance: f64, value: Result<f64>) {
        let (residual, error) = match value {
            Ok(v) => (v, None),
            Err(e) => (f64::NAN, Some(e.to_string())),
        };
        self.entries.push(CheckEntry { suite, name: name.into(), residual, tolerance, error });
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(f, "{e}")?;
        }
        let failed = self.failures().count();
        write!(f, "{} checks, {} failed", self.entries.len(), failed)
    }
}

pub fn run_checks(level: CheckLevel, options: CheckOptions) -> CheckReport {
    let mut report = CheckReport::default();
    let lmax = level.max_sites();
    car_suite(&mut report, lmax, options);
    hamiltonian_suite(&mut report, lmax);
    dynamics_suite(&mut report, lmax);
    doubled_suite(&mut report, level.max_doubled());
    diagnostics_suite(&mut report, lmax);
    twist_suite(&mut report, lmax);
    report
}

fn car_suite(report: &mut CheckReport, lmax: usize, options: CheckOptions) {
    for l in 1..=lmax {
        let value = LatticeSpec::open(l).and_then(|lat| car_residual(&lat, options.annihilator));
        report.record("car", format!("anticommutation_L{l}"), 1e-12, value);
    }
    let value = (|| {
        let lat = LatticeSpec::open(lmax)?;
        let mut r = rng(1);
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let u = local_unitary_u0(&random_unit_smearing(lmax, &mut r), &lat)?;
            worst = worst.max(max_abs(&(u.matrix() * u.matrix() - FockOperator::<f64>::identity(lat).into_matrix())));
        }
        Ok(worst)
    })();
    report.record("car", "u0_squares_to_one", 1e-12, value);
}

fn hamiltonian_suite(report: &mut CheckReport, lmax: usize) {
    let lat = LatticeSpec::periodic(lmax).expect("size within limits");
    let h = HamiltonianSpec::<f64>::interacting_benchmark(lat).build();
    report.record("hamiltonian", "self_adjoint", 1e-12, h.as_ref().map(|h| h.hermiticity_residual()).map_err(clone_err));
    report.record(
        "hamiltonian",
        "number_conserving",
        1e-12,
        h.as_ref().map(|h| max_abs(h.commutator(&total_number(&lat)).matrix())).map_err(clone_err),
    );
    let bad = InteractionTerm::<f64>::new(vec![0, 1], vec![0, lmax as i64 - 1], crate::scalar::c(1.0, 0.0));
    let rejected = if lmax > 2 && bad.validate(&lat).is_ok() { 1.0 } else { 0.0 };
    report.record("hamiltonian", "position_sum_rule_enforced", 0.5, Ok(rejected));
}

fn clone_err(e: &crate::error::Error) -> crate::error::Error {
    crate::error::Error::Validation(e.to_string())
}

fn dynamics_suite(report: &mut CheckReport, lmax: usize) {
    let lat = LatticeSpec::periodic(lmax).expect("size within limits");
    let spec = HamiltonianSpec::<f64>::interacting_benchmark(lat);
    let value = (|| {
        let h = spec.build()?;
        let eig = eigendecompose(&h, DEFAULT_GAP_TOLERANCE)?;
        Ok(eig.reconstruction_residual(h.matrix()).max(eig.unitarity_residual()))
    })();
    report.record("dynamics", "eigensystem", 1e-10, value);
    let value = (|| {
        let q = build_quasifree(&HamiltonianSpec::<f64>::hopping_benchmark(lat).kernel, &lat)?;
        let eig = eigendecompose(&q.operator, DEFAULT_GAP_TOLERANCE)?;
        let mut r = rng(2);
        let mut worst = 0.0f64;
        for k in 0..5 {
            let f = random_unit_smearing(lmax, &mut r);
            let t = 0.37 * (k + 1) as f64;
            let fast = quasifree_heisenberg(&f, &q.single_particle, t, &lat)?;
            let full = heisenberg(&crate::car::smeared_annihilator(&f, &lat)?, &eig, t)?;
            worst = worst.max(fast.frobenius_distance(&full));
        }
        Ok(worst)
    })();
    report.record("dynamics", "quasifree_matches_exact", 1e-10, value);
    let value = (|| {
        let h = spec.build()?;
        let eig = eigendecompose(&h, DEFAULT_GAP_TOLERANCE)?;
        let a = random_operator::<f64>(&lat, &mut rng(3))?;
        let m = eta_mean(&a, &eig)?;
        let commutes = max_abs(m.commutator(&h).matrix());
        let idempotent = eta_mean(&m, &eig)?.max_deviation(&m);
        let trace = modulus(&(m.normalized_trace() - a.normalized_trace()));
        Ok(commutes.max(idempotent).max(trace))
    })();
    report.record("dynamics", "eta_mean_projection", 1e-10, value);
}

fn doubled_suite(report: &mut CheckReport, lmax: usize) {
    for l in 1..=lmax {
        let ds = match DoubledSystem::<f64>::new(l) {
            Ok(ds) => ds,
            Err(e) => {
                report.record("doubled", format!("construction_L{l}"), 1e-9, Err(e));
                continue;
            }
        };
        report.record("doubled", format!("vacuum_L{l}"), 1e-12, Ok(ds.vacuum_residual()));
        report.record("doubled", format!("cross_relations_L{l}"), 1e-12, Ok(ds.cross_relation_residual()));
        report.record("doubled", format!("inversion_L{l}"), 1e-12, Ok(ds.inversion_residual()));
        let mut r = rng(4);
        let value = (0..3).try_fold(0.0f64, |w, _| Ok(w.max(ds.conjugation_relation_residual(&random_unit_smearing(l, &mut r))?)));
        report.record("doubled", format!("conjugation_relation_L{l}"), 1e-9, value);
        let value = (|| {
            let phys = LatticeSpec::open(l)?;
            let mut worst = 0.0f64;
            for _ in 0..10 {
                let p = random_polynomial::<f64>(l, 3, 3, &mut r);
                let q = random_polynomial::<f64>(l, 3, 3, &mut r);
                let (pd, qd) = (ds.represent_polynomial(&p)?, ds.represent_polynomial(&q)?);
                let direct = p.realize(&phys)?.normalized_trace();
                worst = worst.max(modulus(&(ds.tracial_expectation(&pd)? - direct)));
                worst = worst.max(ds.trace_property_residual(&pd, &qd)?);
            }
            Ok(worst)
        })();
        report.record("doubled", format!("tracial_state_L{l}"), 1e-10, value);
        let value = (|| {
            let spec = HamiltonianSpec::<f64>::interacting_benchmark(LatticeSpec::open(l)?);
            let hd = ds.doubled_hamiltonian(&spec)?;
            let kills = (hd.matrix() * ds.omega()).norm();
            let odd = max_abs(&(ds.modular_conjugation().conjugate(&hd).matrix() + hd.matrix()));
            let up = ds.build_u_and_p(&crate::car::SmearingVector::delta(0, l))?;
            Ok(kills.max(odd).max(up.idempotence).max(up.unitarity))
        })();
        report.record("doubled", format!("doubled_hamiltonian_and_projector_L{l}"), 1e-10, value);
    }
}

fn diagnostics_suite(report: &mut CheckReport, lmax: usize) {
    let lat = LatticeSpec::periodic(lmax).expect("size within limits");
    let value = (|| {
        let x = random_operator::<f64>(&lat, &mut rng(5))?;
        let window = BTreeSet::from([0]);
        let e = conditional_expectation(&x, &window)?;
        let projection = conditional_expectation(&e, &window)?.max_deviation(&e);
        let id = FockOperator::identity(lat);
        let unital = conditional_expectation(&id, &window)?.max_deviation(&id);
        let trace = modulus(&(e.normalized_trace() - x.normalized_trace()));
        Ok(projection.max(unital).max(trace))
    })();
    report.record("diagnostics", "conditional_expectation", 1e-12, value);
    let value = (|| {
        let eig = eigendecompose(&HamiltonianSpec::<f64>::interacting_benchmark(lat).build()?, DEFAULT_GAP_TOLERANCE)?;
        let mut r = rng(6);
        let a = random_operator::<f64>(&lat, &mut r)?;
        let b = random_operator::<f64>(&lat, &mut r)?;
        let lhs = heisenberg(&a, &eig, 0.8)?.commutator(&b).norm(NormKind::Spectral)?;
        let rhs = a.commutator(&heisenberg(&b, &eig, -0.8)?).norm(NormKind::Spectral)?;
        Ok((lhs - rhs).abs())
    })();
    report.record("diagnostics", "commutator_time_reversal_symmetry", 1e-10, value);
}

fn twist_suite(report: &mut CheckReport, lmax: usize) {
    let lat = LatticeSpec::periodic(lmax).expect("size within limits");
    let g = TwistAngle::<f64>::quantized(1, lmax);
    let value = (|| {
        let gamma = gauge_twist(g, &lat)?;
        let mut worst = 0.0f64;
        for x in 0..lmax {
            let a = jw_annihilator::<f64>(x, &lat)?;
            let lhs = &(&gamma * &a) * &gamma.adjoint();
            worst = worst.max(lhs.max_deviation(&a.scale(cis(g.g * x as f64))));
        }
        Ok(worst)
    })();
    report.record("twist", "gauge_twist_relation", 1e-12, value);
    if lmax >= 3 {
        let value = (|| {
            let eig = eigendecompose(&HamiltonianSpec::<f64>::interacting_benchmark(lat).build()?, DEFAULT_GAP_TOLERANCE)?;
            covariance_violation(g, &eig, &lat, &[0.5, 1.0, 2.0])
        })();
        report.record("twist", "covariance", 1e-9, value);
    }
    let value = (|| {
        let h = HamiltonianSpec::<f64>::number_operator(lat, 0.7).build()?;
        Ok(local_eigenoperator_residual(&[0], &h)?.residual)
    })();
    report.record("twist", "number_operator_eigenoperator", 1e-10, value);
}
