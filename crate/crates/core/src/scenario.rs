//! Scenario execution and artifact persistence.
//!
//! A run computes every artifact in memory, then writes `curve_*.csv` /
//! `table_*.csv` files with JSON sidecars and a `manifest.json` holding the
//! canonical config echo and SHA-256 checksums. A failed write removes the
//! files written so far.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::car::{matrix_norm, FockOperator, LatticeSpec, Parity, SmearingVector};
use crate::config::{parse_config, OperatorKind, OperatorSelector, Scenario, ScenarioConfig, StateKind};
use crate::diagnostics::{
    anticommutator_decay, commutator_decay, localization_radius, multitime_cluster, recurrence_window,
    vector_convergence, CurveMetadata, DecayCurve, Quantity, RecurrenceWindow, State,
};
use crate::doubled::DoubledSystem;
use crate::dynamics::{
    correlation_spectrum, eigendecompose, eigendecompose_matrix, heisenberg, quasifree_heisenberg,
    tracial_correlation_spectrum, EigenSystem, SpectralMeasure, DEFAULT_GAP_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::hamiltonian::single_particle_matrix;
use crate::random::{random_polynomial, random_unit_smearing, rng};
use crate::scalar::{modulus, CMatrix};
use crate::twist::{covariance_violation, local_eigenoperator_residual, twist_locality_distance, twist_residual, TwistAngle};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Dense matrices held at once by an exact-diagonalization scenario.
const ED_MATRICES: usize = 12;

/// One output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileChecksum {
    pub name: String,
    pub sha256: String,
}

/// Serialized with a fixed key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact_version: String,
    pub scenario: String,
    /// Canonical config text; parsing and running it reproduces `files`.
    pub config: String,
    pub wall_time_seconds: f64,
    pub t_max: Option<f64>,
    pub recurrence_method: Option<String>,
    pub window_exceeded: bool,
    pub summary: BTreeMap<String, f64>,
    pub files: Vec<FileChecksum>,
}

/// In-memory result of a scenario, before anything touches the disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutput {
    pub artifacts: Vec<Artifact>,
    pub summary: BTreeMap<String, f64>,
    pub window: Option<RecurrenceWindow>,
}

impl ScenarioOutput {
    fn new(window: Option<RecurrenceWindow>) -> Self {
        Self { artifacts: Vec::new(), summary: BTreeMap::new(), window }
    }

    fn curve(&mut self, stem: &str, curve: &DecayCurve) -> Result<()> {
        self.artifacts.push(Artifact { name: format!("curve_{stem}.csv"), contents: curve.to_csv() });
        self.artifacts.push(Artifact { name: format!("curve_{stem}.json"), contents: curve.sidecar_json()? + "\n" });
        Ok(())
    }

    fn table(&mut self, stem: &str, header: &str, rows: &[Vec<String>]) {
        let mut s = String::from(header);
        s.push('\n');
        for row in rows {
            let cells: Vec<String> = row.iter().map(|c| csv_field(c)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        self.artifacts.push(Artifact { name: format!("table_{stem}.csv"), contents: s });
    }

    fn put(&mut self, key: &str, value: f64) {
        self.summary.insert(key.to_string(), value);
    }

    pub fn window_exceeded(&self, times: &[f64]) -> bool {
        self.window.as_ref().is_some_and(|w| times.iter().any(|t| t.abs() > w.t_max))
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn check_budget(config: &ScenarioConfig, matrices: usize) -> Result<()> {
    let dim = config.lattice.dim();
    let estimate = matrices.saturating_mul(dim).saturating_mul(dim).saturating_mul(16);
    if estimate > config.memory_budget_bytes() {
        return Err(Error::Resource(format!(
            "{} at L = {} needs about {estimate} bytes, budget is {} bytes",
            config.scenario.name(),
            config.lattice.sites(),
            config.memory_budget_bytes()
        )));
    }
    Ok(())
}

fn eigensystem(config: &ScenarioConfig) -> Result<EigenSystem<f64>> {
    check_budget(config, ED_MATRICES)?;
    eigendecompose(&config.hamiltonian.build()?, DEFAULT_GAP_TOLERANCE)
}

fn tag(curve: DecayCurve, config: &ScenarioConfig, ops: &[&OperatorSelector], window: &RecurrenceWindow) -> DecayCurve {
    let names: Vec<String> = ops.iter().map(|s| s.to_string()).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    curve.with_metadata(&config.hamiltonian.digest(), &refs, &config.lattice).with_window(window.t_max)
}

/// Computes a scenario without writing anything.
pub fn execute(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    match config.scenario {
        Scenario::QuasifreeDecay => quasifree_decay(config),
        Scenario::InteractingDecay => interacting_decay(config),
        Scenario::Localization => localization(config),
        Scenario::DoubledChecks => doubled_checks(config),
        Scenario::TwistCovariance => twist_covariance(config),
        Scenario::EigenoperatorScan => eigenoperator_scan(config),
        Scenario::Multitime => multitime(config),
        Scenario::Spectrum => spectrum(config),
    }
}

/// `τ_t` of a selector under quadratic dynamics, assembled from evolved
/// ladder operators.
pub fn evolve_quasifree(sel: &OperatorSelector, h1: &CMatrix<f64>, t: f64, lattice: &LatticeSpec) -> Result<FockOperator<f64>> {
    let ladder = |x: usize| quasifree_heisenberg(&SmearingVector::delta(x, lattice.sites()), h1, t, lattice);
    match sel.kind {
        OperatorKind::U0 => {
            let mut f = vec![0.0; lattice.sites()];
            for &s in &sel.sites {
                f[s] = 1.0;
            }
            let a = quasifree_heisenberg(&SmearingVector::from_real(&f)?.normalized()?, h1, t, lattice)?;
            Ok(&a + &a.adjoint())
        }
        OperatorKind::Bilinear => {
            let hop = &ladder(sel.sites[0])?.adjoint() * &ladder(sel.sites[1])?;
            Ok(&hop + &hop.adjoint())
        }
        OperatorKind::Density => {
            let mut op = FockOperator::identity(*lattice);
            for &s in &sel.sites {
                let a = ladder(s)?;
                op = &op * &(&a.adjoint() * &a);
            }
            Ok(op)
        }
    }
}

fn both_odd(a: &FockOperator<f64>, b: &FockOperator<f64>) -> bool {
    a.parity() == Parity::Odd && b.parity() == Parity::Odd
}

fn curve_summary(out: &mut ScenarioOutput, curve: &DecayCurve) {
    out.put("max_value", curve.max_value());
    out.put("final_value", curve.values.last().copied().unwrap_or(0.0));
}

fn quasifree_decay(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    let spec = &config.hamiltonian;
    if !spec.is_quadratic() {
        return Err(Error::Validation("quasifree_decay needs a Hamiltonian without interaction or gge terms".into()));
    }
    check_budget(config, 4)?;
    let lattice = config.lattice;
    let h1 = single_particle_matrix(&spec.kernel, &lattice)?;
    // single-particle levels set the recurrences of every quasifree correlation
    let window = recurrence_window(&eigendecompose_matrix(&h1, DEFAULT_GAP_TOLERANCE)?);
    let a = config.a.build(&lattice)?;
    let b = config.b.build(&lattice)?;
    let anti = both_odd(&a, &b);
    let times = config.times();
    let values: Vec<f64> = times
        .par_iter()
        .map(|&t| {
            let at = evolve_quasifree(&config.a, &h1, t, &lattice)?;
            let m = if anti { at.anticommutator(&b) } else { at.commutator(&b) };
            matrix_norm(m.matrix(), config.norm)
        })
        .collect::<Result<_>>()?;
    let quantity = if anti { Quantity::AnticommutatorNorm } else { Quantity::CommutatorNorm };
    let curve = DecayCurve {
        quantity,
        times: times.clone(),
        values,
        saturated: Vec::new(),
        metadata: CurveMetadata { norm: Some(config.norm), ..CurveMetadata::default() },
    };
    let curve = tag(curve, config, &[&config.a, &config.b], &window);
    let mut out = ScenarioOutput::new(Some(window));
    curve_summary(&mut out, &curve);
    out.curve(if anti { "anticommutator" } else { "commutator" }, &curve)?;
    Ok(out)
}

fn interacting_decay(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    let eig = eigensystem(config)?;
    let window = recurrence_window(&eig);
    let a = config.a.build(&config.lattice)?;
    let b = config.b.build(&config.lattice)?;
    let times = config.times();
    let (stem, curve) = if both_odd(&a, &b) {
        ("anticommutator", anticommutator_decay(&a, &b, &eig, &times, config.norm)?)
    } else {
        ("commutator", commutator_decay(&a, &b, &eig, &times, config.norm)?)
    };
    let curve = tag(curve, config, &[&config.a, &config.b], &window);
    let mut out = ScenarioOutput::new(Some(window));
    curve_summary(&mut out, &curve);
    out.curve(stem, &curve)?;
    Ok(out)
}

fn localization(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    let eig = eigensystem(config)?;
    let window = recurrence_window(&eig);
    let a = config.a.build(&config.lattice)?;
    let curve = localization_radius(&a, &eig, &config.times(), config.epsilon)?;
    let curve = tag(curve, config, &[&config.a], &window);
    let mut out = ScenarioOutput::new(Some(window));
    curve_summary(&mut out, &curve);
    out.put("saturated_points", curve.saturated.iter().filter(|s| **s).count() as f64);
    out.curve("radius", &curve)?;
    Ok(out)
}

fn doubled_checks(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    let l = config.lattice.sites();
    let ds = DoubledSystem::<f64>::with_budget(l, config.memory_budget_bytes())?;
    let mut rows: Vec<(String, f64)> = Vec::new();
    let mut r = rng(0);

    rows.push(("vacuum".into(), ds.vacuum_residual()));
    rows.push(("cross_relations".into(), ds.cross_relation_residual()));
    rows.push(("inversion".into(), ds.inversion_residual()));
    rows.push(("j_involution".into(), ds.modular_conjugation().involution_residual()));
    rows.push(("j_unitarity".into(), ds.modular_conjugation().unitarity_residual()));
    let mut conj = 0.0f64;
    for _ in 0..5 {
        conj = conj.max(ds.conjugation_relation_residual(&random_unit_smearing(l, &mut r))?);
    }
    rows.push(("conjugation_relation".into(), conj));

    let physical = LatticeSpec::open(l)?;
    let (mut tracial, mut cyclic) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let p = random_polynomial::<f64>(l, 4, 3, &mut r);
        let q = random_polynomial::<f64>(l, 4, 3, &mut r);
        let pd = ds.represent_polynomial(&p)?;
        let qd = ds.represent_polynomial(&q)?;
        let expected = p.realize(&physical)?.normalized_trace();
        tracial = tracial.max(modulus(&(ds.tracial_expectation(&pd)? - expected)));
        cyclic = cyclic.max(ds.trace_property_residual(&pd, &qd)?);
    }
    rows.push(("tracial_state".into(), tracial));
    rows.push(("trace_property".into(), cyclic));

    let hd = ds.doubled_hamiltonian(&config.hamiltonian)?;
    rows.push(("hd_annihilates_omega".into(), (hd.matrix() * ds.omega()).norm()));
    let jhj = ds.modular_conjugation().conjugate(&hd);
    rows.push(("j_hd_j_plus_hd".into(), crate::scalar::max_abs(&(jhj.matrix() + hd.matrix()))));

    let eig_d = eigendecompose(&hd, DEFAULT_GAP_TOLERANCE)?;
    let eig_p = eigendecompose(&config.hamiltonian.build()?, DEFAULT_GAP_TOLERANCE)?;
    let a_phys = config.a.build(&config.lattice)?;
    let a_rep = ds.represent(&a_phys)?;
    let times = config.times();
    let mut dynamics = 0.0f64;
    for &t in &times {
        let lhs = heisenberg(&a_rep, &eig_d, t)?;
        let rhs = ds.represent(&heisenberg(&a_phys, &eig_p, t)?)?;
        dynamics = dynamics.max(lhs.max_deviation(&rhs));
    }
    rows.push(("dynamics_through_doubling".into(), dynamics));

    let f0 = SmearingVector::delta(0, l);
    let up = ds.build_u_and_p(&f0)?;
    rows.push(("u_unitarity".into(), up.unitarity));
    rows.push(("u_self_adjointness".into(), up.self_adjointness));
    rows.push(("u_involution".into(), up.involution));
    rows.push(("p_idempotence".into(), up.idempotence));
    let deriv = ds.p_time_derivative(&up.p, &hd, &eig_d)?;

    let mut out = ScenarioOutput::new(None);
    let max_identity = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    out.put("max_identity_residual", max_identity);
    out.put("p_derivative_finite_difference", deriv.finite_difference_distance);
    // reference value only: A₀A₀* + B₀B₀* is not a projection
    out.put("p_closed_form_deviation", up.closed_form_deviation);
    for (name, v) in &rows {
        out.put(name, *v);
    }
    let mut table: Vec<Vec<String>> = rows.iter().map(|(n, v)| vec![n.clone(), format!("{v:?}")]).collect();
    table.push(vec!["p_derivative_finite_difference".into(), format!("{:?}", deriv.finite_difference_distance)]);
    out.table("doubled", "check,residual", &table);

    let pv = vector_convergence(&up.p, &eig_d, ds.omega(), &times)?;
    out.curve("p_vector", &pv)?;
    Ok(out)
}

fn twist_covariance(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    let lattice = config.lattice;
    if !lattice.is_periodic() {
        return Err(Error::Unsupported("twist_covariance needs a periodic lattice".into()));
    }
    let eig = eigensystem(config)?;
    let window = recurrence_window(&eig);
    let g = TwistAngle::quantized(config.twist_k, lattice.sites());
    let times = config.times();
    let values: Vec<f64> = times
        .par_iter()
        .map(|&t| covariance_violation(g, &eig, &lattice, &[t]))
        .collect::<Result<_>>()?;
    let curve = DecayCurve {
        quantity: Quantity::CommutatorNorm,
        times: times.clone(),
        values,
        saturated: Vec::new(),
        metadata: CurveMetadata::default(),
    };
    let curve = tag(curve, config, &[], &window);
    let mut out = ScenarioOutput::new(Some(window));
    out.put("max_violation", curve.max_value());
    out.put("g", g.g);
    out.put("hamiltonian_twist_residual", twist_residual(&config.hamiltonian.build()?, g)?);
    out.put("a_twist_distance", twist_locality_distance(&config.a.build(&lattice)?, g)?);
    out.curve("covariance", &curve)?;
    Ok(out)
}

fn eigenoperator_scan(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    check_budget(config, ED_MATRICES)?;
    let lattice = config.lattice;
    let l = lattice.sites();
    let h = config.hamiltonian.build()?;
    let mut windows: Vec<Vec<usize>> = Vec::new();
    for width in 1..=config.max_width.min(l) {
        let starts = if lattice.is_periodic() && width < l { l } else { l - width + 1 };
        for s in 0..starts {
            windows.push((0..width).map(|k| (s + k) % l).collect());
        }
    }
    let results = windows
        .par_iter()
        .map(|w| local_eigenoperator_residual(w, &h))
        .collect::<Result<Vec<_>>>()?;
    let mut out = ScenarioOutput::new(None);
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            let w: Vec<String> = r.window.iter().map(usize::to_string).collect();
            vec![
                w.join(" "),
                format!("{:?}", r.residual),
                format!("{:?}", r.energy),
                r.minimizer.clone(),
                u8::from(r.whole_lattice).to_string(),
            ]
        })
        .collect();
    out.table("eigenoperator", "window,residual,energy,minimizer,whole_lattice", &rows);
    out.put("min_residual", results.iter().map(|r| r.residual).fold(f64::INFINITY, f64::min));
    out.put("windows", results.len() as f64);
    Ok(out)
}

fn state_for(config: &ScenarioConfig, eig: &EigenSystem<f64>) -> State<f64> {
    match config.state {
        StateKind::Tracial => State::Tracial,
        StateKind::Ground => State::Vector(eig.eigenvectors().column(0).into_owned()),
    }
}

fn multitime(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    let eig = eigensystem(config)?;
    let window = recurrence_window(&eig);
    let lattice = config.lattice;
    let [a, b, c, d] = [&config.a, &config.b, &config.c, &config.d].map(|s| s.build(&lattice));
    let times = config.times();
    let mut report = multitime_cluster(&a?, &b?, &c?, &d?, &eig, &state_for(config, &eig), &times)?;
    report.metadata = CurveMetadata {
        hamiltonian: config.hamiltonian.digest(),
        operators: [&config.a, &config.b, &config.c, &config.d].iter().map(|s| s.to_string()).collect(),
        norm: None,
        lattice: format!("L={} {}", lattice.sites(), lattice.boundary()),
        t_max: Some(window.t_max),
        window_exceeded: times.iter().any(|t| t.abs() > window.t_max),
    };
    let mut out = ScenarioOutput::new(Some(window));
    out.put("bound", report.bound);
    out.put("max_defect", report.defect.iter().copied().fold(0.0, f64::max));
    out.put("max_quantity", report.quantity.iter().copied().fold(0.0, f64::max));
    out.artifacts.push(Artifact { name: "curve_cluster.csv".into(), contents: report.to_csv() });
    out.artifacts.push(Artifact {
        name: "curve_cluster.json".into(),
        contents: serde_json::to_string_pretty(&report.metadata)? + "\n",
    });
    Ok(out)
}

fn spectrum(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    let eig = eigensystem(config)?;
    let window = recurrence_window(&eig);
    let lattice = config.lattice;
    let a = config.a.build(&lattice)?;
    let b = config.b.build(&lattice)?;
    let state = state_for(config, &eig);
    let measure: SpectralMeasure<f64> = match &state {
        State::Tracial => tracial_correlation_spectrum(&a, &b, &eig)?,
        State::Vector(v) => correlation_spectrum(&a, &b, &eig, v)?,
    };
    let times = config.times();
    let mut worst = 0.0f64;
    let mut csv = String::from("t,re,im\n");
    for &t in &times {
        let z = measure.evaluate(t);
        let bt = heisenberg(&b, &eig, t)?;
        let direct = state.expect(&(a.adjoint().matrix() * bt.matrix()));
        worst = worst.max(modulus(&(z - direct)));
        csv.push_str(&format!("{t:?},{:?},{:?}\n", z.re, z.im));
    }
    let rows: Vec<Vec<String>> = measure
        .atoms
        .iter()
        .map(|at| vec![format!("{:?}", at.frequency), format!("{:?}", at.amplitude.re), format!("{:?}", at.amplitude.im)])
        .collect();
    let mut out = ScenarioOutput::new(Some(window));
    out.put("atoms", measure.atoms.len() as f64);
    out.put("reconstruction_residual", worst);
    out.put("total_re", measure.total().re);
    out.put("total_im", measure.total().im);
    out.artifacts.push(Artifact { name: "curve_correlation.csv".into(), contents: csv });
    out.table("spectrum", "frequency,amplitude_re,amplitude_im", &rows);
    Ok(out)
}

/// Writes artifacts into `dir`; on failure every file written by this call
/// is removed, together with `dir` when this call created it.
pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<FileChecksum>> {
    let created = !dir.exists();
    let mut written: Vec<PathBuf> = Vec::new();
    let result = (|| -> Result<Vec<FileChecksum>> {
        fs::create_dir_all(dir)?;
        let mut sums = Vec::new();
        for art in artifacts {
            let path = dir.join(&art.name);
            fs::write(&path, &art.contents)?;
            written.push(path);
            sums.push(FileChecksum { name: art.name.clone(), sha256: sha256_hex(art.contents.as_bytes()) });
        }
        Ok(sums)
    })();
    if result.is_err() {
        for path in &written {
            let _ = fs::remove_file(path);
        }
        if created {
            let _ = fs::remove_dir_all(dir);
        }
    }
    result
}

/// Runs a scenario and writes its artifacts and manifest to `config.out`.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunManifest> {
    let start = Instant::now();
    let output = execute(config)?;
    let times = config.times();
    let mut manifest = RunManifest {
        artifact_version: ARTIFACT_VERSION.to_string(),
        scenario: config.scenario.name().to_string(),
        config: config.to_text(),
        wall_time_seconds: 0.0,
        t_max: output.window.as_ref().map(|w| w.t_max).filter(|t| t.is_finite()),
        recurrence_method: output.window.as_ref().map(|w| w.method.clone()),
        window_exceeded: output.window_exceeded(&times),
        summary: output.summary.clone(),
        files: Vec::new(),
    };
    let mut artifacts = output.artifacts;
    // placeholder keeps the manifest inside the cleanup scope
    artifacts.push(Artifact { name: "manifest.json".into(), contents: String::new() });
    let n = artifacts.len();
    let files = write_artifacts(&config.out, &artifacts[..n - 1])?;
    manifest.files = files;
    manifest.wall_time_seconds = start.elapsed().as_secs_f64();
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    if let Err(e) = fs::write(config.out.join("manifest.json"), text) {
        for f in &manifest.files {
            let _ = fs::remove_file(config.out.join(&f.name));
        }
        return Err(e.into());
    }
    Ok(manifest)
}

/// Re-hashes the files listed in a manifest.
pub fn verify_manifest(dir: &Path) -> Result<RunManifest> {
    let manifest: RunManifest = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
    for f in &manifest.files {
        let bytes = fs::read(dir.join(&f.name))?;
        if sha256_hex(&bytes) != f.sha256 {
            return Err(Error::Validation(format!("checksum mismatch for {}", f.name)));
        }
    }
    Ok(manifest)
}

/// Parses the echoed config of a manifest, redirecting output to `out`.
pub fn config_from_manifest(manifest: &RunManifest, out: &Path) -> Result<ScenarioConfig> {
    let mut config = parse_config(&manifest.config)?;
    config.out = out.to_path_buf();
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str, out: &Path) -> ScenarioConfig {
        let mut c = parse_config(text).unwrap();
        c.out = out.to_path_buf();
        c
    }

    const HOPPING8: &str = "[run]\nscenario = quasifree_decay\n[lattice]\nL = 8\n[hamiltonian]\nhopping = -1:1, 1:1\n";

    #[test]
    fn quasifree_fast_path_agrees_with_exact_evolution() {
        let dir = tempfile::tempdir().unwrap();
        for ops in ["a = bilinear 0 1\nb = bilinear 5 6", "a = u0 0 1\nb = u0 4", "a = density 2\nb = bilinear 3 4"] {
            let text = format!("{HOPPING8}[operators]\n{ops}\n[time]\nsteps = 5\n");
            let fast = execute(&config(&text, dir.path())).unwrap();
            let exact = execute(&config(&text.replace("quasifree_decay", "interacting_decay"), dir.path())).unwrap();
            let parse = |o: &ScenarioOutput| -> Vec<f64> {
                o.artifacts[0].contents.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect()
            };
            let (x, y) = (parse(&fast), parse(&exact));
            assert!(x.iter().zip(&y).all(|(p, q)| (p - q).abs() < 1e-10), "{ops}: {x:?} vs {y:?}");
        }
    }

    #[test]
    fn quasifree_rejects_interactions() {
        let text = format!("{HOPPING8}interaction = 0 1 ; 1 0 ; 1.0\n");
        assert!(matches!(execute(&parse_config(&text).unwrap()), Err(Error::Validation(_))));
    }

    #[test]
    fn run_writes_verifiable_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run");
        let m = run_scenario(&config(HOPPING8, &out)).unwrap();
        assert_eq!(m.files.len(), 2);
        let csv = fs::read_to_string(out.join("curve_commutator.csv")).unwrap();
        let t: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
        assert!(t.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(verify_manifest(&out).unwrap(), m);
        let again = dir.path().join("again");
        let m2 = run_scenario(&config_from_manifest(&m, &again).unwrap()).unwrap();
        assert_eq!(m.files, m2.files);
    }

    #[test]
    fn budget_overrun_leaves_nothing_behind() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run");
        let mut c = config(&HOPPING8.replace("quasifree_decay", "localization"), &out);
        c.memory_budget_mb = 1;
        let err = run_scenario(&c).unwrap_err();
        assert!(matches!(err, Error::Resource(_)), "{err}");
        assert!(!out.exists());
    }

    #[test]
    fn failed_write_removes_partial_files() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run");
        fs::create_dir_all(out.join("blocked.csv")).unwrap();
        let arts = vec![
            Artifact { name: "first.csv".into(), contents: "t\n".into() },
            Artifact { name: "blocked.csv".into(), contents: "t\n".into() },
        ];
        assert!(write_artifacts(&out, &arts).is_err());
        assert!(!out.join("first.csv").exists());
        let fresh = dir.path().join("fresh");
        let arts = vec![Artifact { name: "a.csv".into(), contents: "t\n".into() }, Artifact { name: "".into(), contents: "".into() }];
        assert!(write_artifacts(&fresh, &arts).is_err());
        assert!(!fresh.exists());
    }

    #[test]
    fn doubled_checks_at_two_sites() {
        let dir = tempfile::tempdir().unwrap();
        let text = "[run]\nscenario = doubled_checks\n[lattice]\nL = 2\nboundary = open\n[hamiltonian]\nhopping = -1:1, 1:1\ninteraction = 0 1 ; 1 0 ; 0.7\n[time]\nt_end = 1\nsteps = 3\n";
        let out = execute(&config(text, dir.path())).unwrap();
        let worst = out.summary["max_identity_residual"];
        assert!(worst < 1e-9, "{:?}", out.summary);
        assert!(out.summary["p_derivative_finite_difference"] < 1e-7);
    }

    #[test]
    fn every_scenario_runs_on_a_small_ring() {
        let dir = tempfile::tempdir().unwrap();
        for s in Scenario::ALL {
            let text = format!(
                "[run]\nscenario = {}\n[lattice]\nL = 4\n[hamiltonian]\nhopping = -1:1, 1:1\n{}[time]\nsteps = 3\n",
                s.name(),
                if s == Scenario::QuasifreeDecay { "" } else { "interaction = 0 1 ; 1 0 ; 1.0\n" }
            );
            let text = if s == Scenario::DoubledChecks { text.replace("L = 4", "L = 2") } else { text };
            let out = execute(&config(&text, dir.path())).unwrap_or_else(|e| panic!("{}: {e}", s.name()));
            assert!(!out.artifacts.is_empty());
            for art in &out.artifacts {
                if art.name.starts_with("curve_") && art.name.ends_with(".csv") {
                    assert!(art.contents.starts_with("t,"), "{}", art.name);
                }
            }
        }
    }
}
