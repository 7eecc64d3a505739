//! Sampled localization and abelianess diagnostics: commutator and
//! anticommutator curves, localization radii, multi-time clustering and a
//! finite-size recurrence guard.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::car::{matrix_norm, normalized_frobenius, permutation_action, FockOperator, LatticeSpec, NormKind, Parity};
use crate::dynamics::{EigenSystem, Evolver};
use crate::error::{Error, Result};
use crate::scalar::{cr, modulus, CMatrix, CVector, Real, C};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    CommutatorNorm,
    AnticommutatorNorm,
    LocalizationRadius,
    ClusteringDefect,
}

impl std::fmt::Display for Quantity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Quantity::CommutatorNorm => "commutator_norm",
            Quantity::AnticommutatorNorm => "anticommutator_norm",
            Quantity::LocalizationRadius => "localization_radius",
            Quantity::ClusteringDefect => "clustering_defect",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct CurveMetadata {
    pub hamiltonian: String,
    pub operators: Vec<String>,
    pub norm: Option<NormKind>,
    pub lattice: String,
    pub t_max: Option<f64>,
    pub window_exceeded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayCurve {
    pub quantity: Quantity,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Per-point saturation flags (localization radius only).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub saturated: Vec<bool>,
    pub metadata: CurveMetadata,
}

impl DecayCurve {
    /// Records the pre-recurrence window and flags the curve when any sample
    /// lies beyond it. Samples are never dropped.
    pub fn with_window(mut self, t_max: f64) -> Self {
        self.metadata.t_max = Some(t_max);
        self.metadata.window_exceeded = self.times.iter().any(|t| t.abs() > t_max);
        self
    }

    pub fn with_metadata(mut self, hamiltonian: &str, operators: &[&str], lattice: &LatticeSpec) -> Self {
        self.metadata.hamiltonian = hamiltonian.to_string();
        self.metadata.operators = operators.iter().map(|s| s.to_string()).collect();
        self.metadata.lattice = format!("L={} {}", lattice.sites(), lattice.boundary());
        self
    }

    /// Minimum over samples with `t_lo ≤ t ≤ t_hi`.
    pub fn min_over(&self, t_lo: f64, t_hi: f64) -> Option<f64> {
        self.times
            .iter()
            .zip(&self.values)
            .filter(|(t, _)| **t >= t_lo && **t <= t_hi)
            .map(|(_, v)| *v)
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.min(v))))
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// CSV with header `t,value` (plus `saturated` for radius curves).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if self.saturated.is_empty() {
            out.push_str("t,value\n");
            for (t, v) in self.times.iter().zip(&self.values) {
                let _ = writeln!(out, "{t:?},{v:?}");
            }
        } else {
            out.push_str("t,value,saturated\n");
            for ((t, v), s) in self.times.iter().zip(&self.values).zip(&self.saturated) {
                let _ = writeln!(out, "{t:?},{v:?},{}", u8::from(*s));
            }
        }
        out
    }

    pub fn sidecar_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Sidecar<'a> {
            quantity: Quantity,
            samples: usize,
            metadata: &'a CurveMetadata,
        }
        Ok(serde_json::to_string_pretty(&Sidecar {
            quantity: self.quantity,
            samples: self.times.len(),
            metadata: &self.metadata,
        })?)
    }
}

fn check_grid<T: Real>(times: &[T]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::Validation("time grid has non-finite entries".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Validation("time grid must be strictly ascending".into()));
    }
    Ok(())
}

fn curve<T: Real>(quantity: Quantity, times: &[T], values: Vec<T>, norm: Option<NormKind>) -> DecayCurve {
    DecayCurve {
        quantity,
        times: times.iter().map(|t| t.as_f64()).collect(),
        values: values.into_iter().map(|v| v.as_f64()).collect(),
        saturated: Vec::new(),
        metadata: CurveMetadata { norm, ..CurveMetadata::default() },
    }
}

/// `t ↦ ‖[τ_t A, B]‖`
pub fn commutator_decay<T: Real>(
    a: &FockOperator<T>,
    b: &FockOperator<T>,
    eig: &EigenSystem<T>,
    times: &[T],
    norm: NormKind,
) -> Result<DecayCurve> {
    check_grid(times)?;
    if a.parity() == Parity::Odd && b.parity() == Parity::Odd {
        return Err(Error::Precondition(
            "commutator curves need an even operator; use the anticommutator for odd pairs".into(),
        ));
    }
    let evolver = Evolver::new(a, eig)?;
    let values: Vec<T> = times
        .par_iter()
        .map(|&t| {
            let at = evolver.at(t);
            matrix_norm(at.commutator(b).matrix(), norm)
        })
        .collect::<Result<_>>()?;
    Ok(curve(Quantity::CommutatorNorm, times, values, Some(norm)))
}

/// `t ↦ ‖{τ_t A, B}‖` for odd `A`, `B`.
pub fn anticommutator_decay<T: Real>(
    a: &FockOperator<T>,
    b: &FockOperator<T>,
    eig: &EigenSystem<T>,
    times: &[T],
    norm: NormKind,
) -> Result<DecayCurve> {
    check_grid(times)?;
    if a.parity() != Parity::Odd || b.parity() != Parity::Odd {
        return Err(Error::Validation(format!(
            "anticommutator curves need odd operators, got {} and {}",
            a.parity(),
            b.parity()
        )));
    }
    let evolver = Evolver::new(a, eig)?;
    let values: Vec<T> = times
        .par_iter()
        .map(|&t| matrix_norm(evolver.at(t).anticommutator(b).matrix(), norm))
        .collect::<Result<_>>()?;
    Ok(curve(Quantity::AnticommutatorNorm, times, values, Some(norm)))
}

/// Trace-conditional expectation onto the operators supported in `window`.
///
/// The window modes are moved to the front of the Jordan–Wigner order, the
/// remaining modes are traced out and replaced by the normalized identity,
/// and the modes are moved back.
pub fn conditional_expectation<T: Real>(x: &FockOperator<T>, window: &BTreeSet<usize>) -> Result<FockOperator<T>> {
    let lattice = *x.lattice();
    let l = lattice.sites();
    for &s in window {
        lattice.check_site(s)?;
    }
    let k = window.len();
    if k == l {
        return Ok(x.clone());
    }
    let mut perm = vec![0; l];
    for (i, &s) in window.iter().enumerate() {
        perm[s] = i;
    }
    for (i, s) in (0..l).filter(|s| !window.contains(s)).enumerate() {
        perm[s] = k + i;
    }
    let action = permutation_action(&perm, &lattice)?;
    let d = lattice.dim();
    let rest = 1usize << (l - k);
    let front = 1usize << k;
    let m = x.matrix();
    // P M P† in the permuted ordering
    let mut permuted = CMatrix::zeros(d, d);
    for s in 0..d {
        let (ps, ns) = action[s];
        for t in 0..d {
            let (pt, nt) = action[t];
            let v = m[(s, t)];
            permuted[(ps, pt)] = if ns ^ nt { -v } else { v };
        }
    }
    let norm = cr(T::one() / T::from_usize(rest).unwrap());
    let mut reduced = CMatrix::zeros(front, front);
    for f in 0..front {
        for g in 0..front {
            let mut acc = cr(T::zero());
            for r in 0..rest {
                acc += permuted[(f * rest + r, g * rest + r)];
            }
            reduced[(f, g)] = acc * norm;
        }
    }
    let mut out = CMatrix::zeros(d, d);
    for s in 0..d {
        let (ps, ns) = action[s];
        for t in 0..d {
            let (pt, nt) = action[t];
            if ps % rest != pt % rest {
                continue;
            }
            let v = reduced[(ps / rest, pt / rest)];
            out[(s, t)] = if ns ^ nt { -v } else { v };
        }
    }
    FockOperator::from_parts(out, lattice, x.parity(), window.clone())
}

/// Sites of the window of half-width `r` around `center`; `None` once the
/// window covers the whole lattice.
pub fn centered_window(lattice: &LatticeSpec, center: usize, r: usize) -> (BTreeSet<usize>, bool) {
    let l = lattice.sites() as i64;
    let c = center as i64;
    let r = r as i64;
    let sites: BTreeSet<usize> = if lattice.is_periodic() {
        (c - r..=c + r).map(|x| x.rem_euclid(l) as usize).collect()
    } else {
        ((c - r).max(0)..=(c + r).min(l - 1)).map(|x| x as usize).collect()
    };
    let full = sites.len() == lattice.sites();
    (sites, full)
}

/// Center and half-width of the smallest window containing `support`: the
/// shortest covering arc on rings, the hull on open chains.
pub fn support_center(lattice: &LatticeSpec, support: &BTreeSet<usize>) -> (usize, usize) {
    let l = lattice.sites();
    if support.is_empty() {
        return (0, 0);
    }
    let (start, len) = if lattice.is_periodic() {
        // remove the largest gap between consecutive occupied sites
        let s: Vec<usize> = support.iter().copied().collect();
        let mut best = (s[0], l);
        for i in 0..s.len() {
            let from = s[(i + 1) % s.len()];
            let to = s[i];
            let span = (to + l - from) % l + 1;
            if span < best.1 || (span == best.1 && from < best.0) {
                best = (from, span);
            }
        }
        best
    } else {
        let lo = *support.iter().next().unwrap();
        let hi = *support.iter().next_back().unwrap();
        (lo, hi - lo + 1)
    };
    let center = (start + (len - 1) / 2) % l;
    (center, len / 2)
}

/// `t ↦` smallest half-width `r` with
/// `‖τ_t A - E_{Λ_r}(τ_t A)‖_F ≤ ε ‖A‖_F`, windows centered on the initial
/// support of `A`. When only the whole lattice works the value is `L` and
/// the point is flagged saturated.
pub fn localization_radius<T: Real>(
    a: &FockOperator<T>,
    eig: &EigenSystem<T>,
    times: &[T],
    epsilon: T,
) -> Result<DecayCurve> {
    check_grid(times)?;
    if !(epsilon > T::zero() && epsilon < T::one()) {
        return Err(Error::Precondition(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let lattice = *a.lattice();
    let (center, _) = support_center(&lattice, a.support());
    let scale = normalized_frobenius(a.matrix());
    let evolver = Evolver::new(a, eig)?;
    let points: Vec<(T, bool)> = times
        .par_iter()
        .map(|&t| {
            let at = evolver.at(t);
            let mut r = 0;
            loop {
                let (window, full) = centered_window(&lattice, center, r);
                if full {
                    return Ok((T::from_usize(lattice.sites()).unwrap(), true));
                }
                let projected = conditional_expectation(&at, &window)?;
                if at.frobenius_distance(&projected) <= epsilon * scale {
                    return Ok((T::from_usize(r).unwrap(), false));
                }
                r += 1;
            }
        })
        .collect::<Result<_>>()?;
    let mut c = curve(Quantity::LocalizationRadius, times, points.iter().map(|p| p.0).collect(), Some(NormKind::Frobenius));
    c.saturated = points.iter().map(|p| p.1).collect();
    Ok(c)
}

/// Expectation functional for clustering diagnostics.
#[derive(Debug, Clone)]
pub enum State<T: Real> {
    /// Normalized trace `2^{-L} tr`.
    Tracial,
    Vector(CVector<T>),
}

impl<T: Real> State<T> {
    pub fn expect(&self, x: &CMatrix<T>) -> C<T> {
        match self {
            State::Tracial => crate::scalar::trace(x) / cr(T::from_usize(x.nrows()).unwrap()),
            State::Vector(v) => v.dotc(&(x * v)),
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if let State::Vector(v) = self {
            if v.len() != dim {
                return Err(Error::Shape(format!("state of length {} against dimension {dim}", v.len())));
            }
            if (v.norm() - T::one()).abs() > T::lit(1e-10) {
                return Err(Error::Precondition("state vector is not normalized".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterReport {
    pub times: Vec<f64>,
    /// `|ω(A B_t C D_t) - ω(AC) ω(BD)|`
    pub defect: Vec<f64>,
    /// `|ω(A B_t A* B_t*)|`
    pub quantity: Vec<f64>,
    /// `ω(AA*) ω(BB*)`
    pub bound: f64,
    pub metadata: CurveMetadata,
}

impl ClusterReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,defect,quantity,bound\n");
        for ((t, d), q) in self.times.iter().zip(&self.defect).zip(&self.quantity) {
            let _ = writeln!(out, "{t:?},{d:?},{q:?},{:?}", self.bound);
        }
        out
    }
}

/// Multi-time clustering quantities along `times`.
#[allow(clippy::too_many_arguments)]
pub fn multitime_cluster<T: Real>(
    a: &FockOperator<T>,
    b: &FockOperator<T>,
    c: &FockOperator<T>,
    d: &FockOperator<T>,
    eig: &EigenSystem<T>,
    state: &State<T>,
    times: &[T],
) -> Result<ClusterReport> {
    check_grid(times)?;
    let dim = eig.dim();
    for op in [a, b, c, d] {
        if op.dim() != dim {
            return Err(Error::Shape(format!("operator of dimension {} against {dim}", op.dim())));
        }
    }
    state.validate(dim)?;
    let (am, cm) = (a.matrix(), c.matrix());
    let w_ac = state.expect(&(am * cm));
    let w_bd = state.expect(&(b.matrix() * d.matrix()));
    let a_adj = am.adjoint();
    let w_aa = state.expect(&(am * &a_adj)).re;
    let w_bb = state.expect(&(b.matrix() * b.matrix().adjoint())).re;
    let eb = Evolver::new(b, eig)?;
    let ed = Evolver::new(d, eig)?;
    let rows: Vec<(T, T)> = times
        .par_iter()
        .map(|&t| {
            let bt = eb.at(t).into_matrix();
            let dt = ed.at(t).into_matrix();
            let four = state.expect(&(am * &bt * cm * &dt));
            let defect = modulus(&(four - w_ac * w_bd));
            let q = modulus(&state.expect(&(am * &bt * &a_adj * bt.adjoint())));
            (defect, q)
        })
        .collect();
    Ok(ClusterReport {
        times: times.iter().map(|t| t.as_f64()).collect(),
        defect: rows.iter().map(|r| r.0.as_f64()).collect(),
        quantity: rows.iter().map(|r| r.1.as_f64()).collect(),
        bound: (w_aa * w_bb).as_f64(),
        metadata: CurveMetadata::default(),
    })
}

/// `t ↦ ‖(τ_t P - 1) ψ‖`, a vector-wise convergence probe.
pub fn vector_convergence<T: Real>(
    p: &FockOperator<T>,
    eig: &EigenSystem<T>,
    psi: &CVector<T>,
    times: &[T],
) -> Result<DecayCurve> {
    check_grid(times)?;
    let ev = Evolver::new(p, eig)?;
    let values: Vec<T> = times.par_iter().map(|&t| (ev.at(t).matrix() * psi - psi).norm()).collect();
    Ok(curve(Quantity::ClusteringDefect, times, values, None))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecurrenceWindow {
    pub t_max: f64,
    /// Exact recurrence time when the spectrum is commensurate.
    pub exact_period: Option<f64>,
    pub method: String,
}

/// Finite-size recurrence guard.
///
/// Commensurate spectra (all level differences integer multiples of a
/// common `ω₀ = gap/k`, `k ≤ 12`) recur exactly after `2π/ω₀`. Otherwise the
/// estimate is the Heisenberg time `2π / mean level spacing`.
pub fn recurrence_window<T: Real>(eig: &EigenSystem<T>) -> RecurrenceWindow {
    let levels: Vec<f64> = eig.distinct_levels().iter().map(|e| e.as_f64()).collect();
    if levels.len() < 2 {
        return RecurrenceWindow { t_max: f64::INFINITY, exact_period: None, method: "static".into() };
    }
    let min_gap = levels.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let offsets: Vec<f64> = levels.iter().map(|e| e - levels[0]).collect();
    for k in 1..=12 {
        let omega = min_gap / k as f64;
        let commensurate = offsets.iter().all(|d| {
            let q = d / omega;
            (q - q.round()).abs() < 1e-8 * q.abs().max(1.0)
        });
        if commensurate {
            let period = 2.0 * std::f64::consts::PI / omega;
            return RecurrenceWindow { t_max: period, exact_period: Some(period), method: format!("commensurate, ω₀ = gap/{k}") };
        }
    }
    let bandwidth = levels[levels.len() - 1] - levels[0];
    let spacing = bandwidth / (levels.len() - 1) as f64;
    RecurrenceWindow {
        t_max: 2.0 * std::f64::consts::PI / spacing,
        exact_period: None,
        method: "mean level spacing".into(),
    }
}
