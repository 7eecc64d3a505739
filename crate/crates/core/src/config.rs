//! Scenario configuration: a sectioned `key = value` text format, with JSON
//! accepted as an alternative encoding of the same sections and keys.
//!
//! ```text
//! [run]
//! scenario = quasifree_decay
//! [lattice]
//! L = 8
//! [hamiltonian]
//! hopping = -1:1, 1:1
//! ```
//!
//! Defaults: `boundary = periodic`, `norm = spectral`, `out = out`,
//! `memory_budget_mb = 1024`, operators `a = bilinear 0 1` and
//! `b = bilinear L-2 L-1`, `c = a`, `d = b`, time grid `0 .. L/4` in 21
//! steps, `epsilon = 0.01`, `twist_k = 1`, `max_width = 2`,
//! `state = tracial`, `orbit = true`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::car::{jw_annihilator, jw_creator, number_at, smeared_annihilator, Boundary, FockOperator, LatticeSpec, NormKind, SmearingVector};
use crate::error::{Error, Result};
use crate::hamiltonian::{GgeTerm, HamiltonianSpec, HoppingKernel, InteractionTerm};
use crate::scalar::C;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    QuasifreeDecay,
    InteractingDecay,
    Localization,
    DoubledChecks,
    TwistCovariance,
    EigenoperatorScan,
    Multitime,
    Spectrum,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::QuasifreeDecay,
        Scenario::InteractingDecay,
        Scenario::Localization,
        Scenario::DoubledChecks,
        Scenario::TwistCovariance,
        Scenario::EigenoperatorScan,
        Scenario::Multitime,
        Scenario::Spectrum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::QuasifreeDecay => "quasifree_decay",
            Scenario::InteractingDecay => "interacting_decay",
            Scenario::Localization => "localization",
            Scenario::DoubledChecks => "doubled_checks",
            Scenario::TwistCovariance => "twist_covariance",
            Scenario::EigenoperatorScan => "eigenoperator_scan",
            Scenario::Multitime => "multitime",
            Scenario::Spectrum => "spectrum",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Scenario::QuasifreeDecay => "commutator curve under a quadratic Hamiltonian",
            Scenario::InteractingDecay => "commutator curve by exact diagonalization",
            Scenario::Localization => "localization radius of A over time",
            Scenario::DoubledChecks => "identity residuals of the doubled tracial construction",
            Scenario::TwistCovariance => "translation covariance of the twisted evolution",
            Scenario::EigenoperatorScan => "local eigenoperator residuals over windows",
            Scenario::Multitime => "multi-time clustering defect and bound",
            Scenario::Spectrum => "Bohr-frequency decomposition of a correlation",
        }
    }
}

impl FromStr for Scenario {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Scenario::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown scenario '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    /// `a(f) + a(f)*` with `f` uniform on the sites, normalized.
    U0,
    /// `a_x* a_y + a_y* a_x` for sites `x y`.
    Bilinear,
    /// Product of `n_x` over the sites.
    Density,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OperatorSelector {
    pub kind: OperatorKind,
    pub sites: Vec<usize>,
}

impl OperatorSelector {
    pub fn new(kind: OperatorKind, sites: Vec<usize>) -> Self {
        Self { kind, sites }
    }

    fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut words = text.split_whitespace();
        let kind = match words.next() {
            Some("u0") => OperatorKind::U0,
            Some("bilinear") => OperatorKind::Bilinear,
            Some("density") => OperatorKind::Density,
            Some(other) => return Err(format!("unknown operator kind '{other}' (expected u0, bilinear or density)")),
            None => return Err("empty operator selector".into()),
        };
        let sites = words
            .map(|w| w.parse::<usize>().map_err(|_| format!("site '{w}' is not a nonnegative integer")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if sites.is_empty() {
            return Err("operator selector needs at least one site".into());
        }
        if kind == OperatorKind::Bilinear && sites.len() != 2 {
            return Err("bilinear selector takes exactly two sites".into());
        }
        Ok(Self { kind, sites })
    }

    pub fn build(&self, lattice: &LatticeSpec) -> Result<FockOperator<f64>> {
        for &s in &self.sites {
            lattice.check_site(s)?;
        }
        match self.kind {
            OperatorKind::U0 => {
                let mut f = vec![0.0; lattice.sites()];
                for &s in &self.sites {
                    f[s] = 1.0;
                }
                let f = SmearingVector::from_real(&f)?.normalized()?;
                let a = smeared_annihilator(&f, lattice)?;
                Ok(&a + &a.adjoint())
            }
            OperatorKind::Bilinear => {
                let hop = &jw_creator::<f64>(self.sites[0], lattice)? * &jw_annihilator(self.sites[1], lattice)?;
                Ok(&hop + &hop.adjoint())
            }
            OperatorKind::Density => {
                let mut op = FockOperator::identity(*lattice);
                for &s in &self.sites {
                    op = &op * &number_at(s, lattice)?;
                }
                Ok(op)
            }
        }
    }
}

impl std::fmt::Display for OperatorSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self.kind {
            OperatorKind::U0 => "u0",
            OperatorKind::Bilinear => "bilinear",
            OperatorKind::Density => "density",
        };
        f.write_str(kind)?;
        for s in &self.sites {
            write!(f, " {s}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Tracial,
    /// Lowest eigenvector of the Hamiltonian.
    Ground,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.t_start];
        }
        let dt = (self.t_end - self.t_start) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.t_start + i as f64 * dt).collect()
    }
}

/// Declarative Hamiltonian as written in the config.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianConfig {
    pub hopping: BTreeMap<i64, C<f64>>,
    pub interactions: Vec<InteractionTerm<f64>>,
    /// Whether each interaction term is expanded into its translation orbit.
    pub orbit: bool,
    pub gge: Vec<GgeTerm<f64>>,
}

impl HamiltonianConfig {
    pub fn to_spec(&self, lattice: LatticeSpec) -> Result<HamiltonianSpec<f64>> {
        let mut spec = HamiltonianSpec::new(lattice).with_kernel(HoppingKernel::new(self.hopping.clone())?);
        for term in &self.interactions {
            spec = if self.orbit { spec.with_interaction_orbit(term.clone()) } else { spec.with_interaction(term.clone()) };
        }
        for g in &self.gge {
            spec = spec.with_gge(g.clone());
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub lattice: LatticeSpec,
    pub hamiltonian_config: HamiltonianConfig,
    pub hamiltonian: HamiltonianSpec<f64>,
    pub a: OperatorSelector,
    pub b: OperatorSelector,
    pub c: OperatorSelector,
    pub d: OperatorSelector,
    pub time: TimeGrid,
    pub norm: NormKind,
    pub out: PathBuf,
    pub memory_budget_mb: usize,
    pub epsilon: f64,
    pub twist_k: i64,
    pub max_width: usize,
    pub state: StateKind,
}

/// One `key = value` occurrence with its source line (0 for JSON input).
#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    value: String,
}

type Sections = BTreeMap<String, BTreeMap<String, Vec<Entry>>>;

const KEYS: &[(&str, &[&str])] = &[
    ("run", &["scenario", "norm", "out", "memory_budget_mb"]),
    ("lattice", &["L", "boundary"]),
    ("hamiltonian", &["hopping", "interaction", "orbit", "gge"]),
    ("operators", &["a", "b", "c", "d"]),
    ("time", &["t_start", "t_end", "steps"]),
    ("diagnostic", &["epsilon", "twist_k", "max_width", "state"]),
];

const REPEATABLE: &[(&str, &str)] = &[("hamiltonian", "interaction"), ("hamiltonian", "gge")];

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn insert(sections: &mut Sections, section: &str, key: &str, entry: Entry) -> Result<()> {
    let line = entry.line;
    let allowed = KEYS
        .iter()
        .find(|(s, _)| *s == section)
        .ok_or_else(|| perr(line, format!("unknown section [{section}]")))?
        .1;
    if !allowed.contains(&key) {
        return Err(perr(line, format!("unknown key '{key}' in [{section}]")));
    }
    let slot = sections.entry(section.to_string()).or_default().entry(key.to_string()).or_default();
    if !slot.is_empty() && !REPEATABLE.contains(&(section, key)) {
        return Err(perr(line, format!("duplicate key '{key}' in [{section}]")));
    }
    slot.push(entry);
    Ok(())
}

fn lex_text(text: &str) -> Result<Sections> {
    let mut sections = Sections::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| perr(line, "malformed section header"))?
                .trim();
            if !KEYS.iter().any(|(s, _)| *s == name) {
                return Err(perr(line, format!("unknown section [{name}]")));
            }
            current = Some(name.to_string());
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| perr(line, format!("expected 'key = value', got '{content}'")))?;
        let section = current.as_deref().ok_or_else(|| perr(line, "key outside of any [section]"))?;
        insert(&mut sections, section, key.trim(), Entry { line, value: value.trim().to_string() })?;
    }
    Ok(sections)
}

fn lex_json(text: &str) -> Result<Sections> {
    let root: serde_json::Value = serde_json::from_str(text).map_err(|e| perr(e.line(), e.to_string()))?;
    let obj = root.as_object().ok_or_else(|| perr(0, "JSON config must be an object of sections"))?;
    let mut sections = Sections::new();
    for (section, body) in obj {
        let body = body.as_object().ok_or_else(|| perr(0, format!("section '{section}' must be an object")))?;
        for (key, value) in body {
            let values: Vec<&serde_json::Value> = match value {
                serde_json::Value::Array(items) if REPEATABLE.contains(&(section.as_str(), key.as_str())) => items.iter().collect(),
                other => vec![other],
            };
            for v in values {
                let value = match v {
                    serde_json::Value::String(s) => s.clone(),
                    serde_json::Value::Number(n) => n.to_string(),
                    serde_json::Value::Bool(b) => b.to_string(),
                    _ => return Err(perr(0, format!("{section}.{key}: expected a string, number or boolean"))),
                };
                insert(&mut sections, section, key, Entry { line: 0, value })?;
            }
        }
    }
    Ok(sections)
}

/// Parses a complex literal: `1.5`, `-2i`, `0.5+0.25i`, `1e-3-2e-2i`.
pub fn parse_complex(s: &str) -> std::result::Result<C<f64>, String> {
    let s = s.trim();
    let bad = || format!("'{s}' is not a number");
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| C::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.trim_start_matches('+').parse().map_err(|_| bad())?;
    Ok(C::new(re, im))
}

fn fmt_complex(z: C<f64>) -> String {
    if z.im == 0.0 {
        format!("{:?}", z.re)
    } else if z.im < 0.0 {
        format!("{:?}{:?}i", z.re, z.im)
    } else {
        format!("{:?}+{:?}i", z.re, z.im)
    }
}

fn parse_sites(text: &str) -> std::result::Result<Vec<i64>, String> {
    text.split_whitespace()
        .map(|w| w.parse::<i64>().map_err(|_| format!("'{w}' is not an integer site")))
        .collect()
}

struct Reader {
    sections: Sections,
}

impl Reader {
    fn entries(&self, section: &str, key: &str) -> &[Entry] {
        self.sections.get(section).and_then(|s| s.get(key)).map_or(&[], |v| v.as_slice())
    }

    fn one(&self, section: &str, key: &str) -> Option<&Entry> {
        self.entries(section, key).first()
    }

    fn get<V>(&self, section: &str, key: &str, parse: impl Fn(&str) -> std::result::Result<V, String>) -> Result<Option<V>> {
        match self.one(section, key) {
            None => Ok(None),
            Some(e) => parse(&e.value).map(Some).map_err(|m| perr(e.line, format!("{key}: {m}"))),
        }
    }

    fn line(&self, section: &str, key: &str) -> usize {
        self.one(section, key).map_or(0, |e| e.line)
    }
}

fn number<V: FromStr>(what: &'static str) -> impl Fn(&str) -> std::result::Result<V, String> {
    move |s| s.parse::<V>().map_err(|_| format!("'{s}' is not {what}"))
}

fn boolean(s: &str) -> std::result::Result<bool, String> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("'{s}' is not true or false")),
    }
}

/// Parses either encoding; input starting with `{` is read as JSON.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let sections = if text.trim_start().starts_with('{') { lex_json(text)? } else { lex_text(text)? };
    let r = Reader { sections };

    let scenario = r
        .get("run", "scenario", |s| s.parse::<Scenario>())?
        .ok_or_else(|| perr(0, "missing required key 'scenario' in [run]"))?;
    let norm = r
        .get("run", "norm", |s| match s {
            "spectral" => Ok(NormKind::Spectral),
            "frobenius" => Ok(NormKind::Frobenius),
            _ => Err(format!("'{s}' is not spectral or frobenius")),
        })?
        .unwrap_or(NormKind::Spectral);
    let out = r.get("run", "out", |s| Ok(PathBuf::from(s)))?.unwrap_or_else(|| PathBuf::from("out"));
    let memory_budget_mb = r.get("run", "memory_budget_mb", number::<usize>("a nonnegative integer"))?.unwrap_or(1024);

    let l = r
        .get("lattice", "L", |s| match s.parse::<i64>() {
            Ok(v) if v >= 1 => Ok(v as usize),
            Ok(_) => Err("L must be ≥ 1".to_string()),
            Err(_) => Err(format!("'{s}' is not an integer")),
        })?
        .ok_or_else(|| perr(0, "missing required key 'L' in [lattice]"))?;
    let boundary = r
        .get("lattice", "boundary", |s| match s {
            "periodic" => Ok(Boundary::Periodic),
            "open" => Ok(Boundary::Open),
            _ => Err(format!("'{s}' is not periodic or open")),
        })?
        .unwrap_or(Boundary::Periodic);
    let lattice = LatticeSpec::new(l, boundary).map_err(|e| perr(r.line("lattice", "L"), e.to_string()))?;

    let hopping = r
        .get("hamiltonian", "hopping", |s| {
            let mut entries = BTreeMap::new();
            for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
                let (d, v) = item.split_once(':').ok_or_else(|| format!("hopping entry '{item}' is not offset:value"))?;
                let d: i64 = d.trim().parse().map_err(|_| format!("offset '{}' is not an integer", d.trim()))?;
                if entries.insert(d, parse_complex(v)?).is_some() {
                    return Err(format!("offset {d} given twice"));
                }
            }
            Ok(entries)
        })?
        .unwrap_or_default();
    let mut interactions = Vec::new();
    for e in r.entries("hamiltonian", "interaction") {
        let parts: Vec<&str> = e.value.split(';').collect();
        let [cre, ann, coef] = parts.as_slice() else {
            return Err(perr(e.line, "interaction: expected 'creators ; annihilators ; coefficient'"));
        };
        let term = InteractionTerm::new(
            parse_sites(cre).map_err(|m| perr(e.line, format!("interaction: {m}")))?,
            parse_sites(ann).map_err(|m| perr(e.line, format!("interaction: {m}")))?,
            parse_complex(coef).map_err(|m| perr(e.line, format!("interaction: {m}")))?,
        );
        term.validate(&lattice).map_err(|err| perr(e.line, err.to_string()))?;
        interactions.push(term);
    }
    let mut gge = Vec::new();
    for e in r.entries("hamiltonian", "gge") {
        let (offs, coef) = e
            .value
            .split_once(';')
            .ok_or_else(|| perr(e.line, "gge: expected 'offsets ; coefficient'"))?;
        let offsets = parse_sites(offs).map_err(|m| perr(e.line, format!("gge: {m}")))?;
        if offsets.iter().any(|&o| o < 0) {
            return Err(perr(e.line, "gge: offsets must be nonnegative"));
        }
        let coefficient: f64 = coef.trim().parse().map_err(|_| perr(e.line, format!("gge: '{}' is not a real number", coef.trim())))?;
        gge.push(GgeTerm::new(offsets.into_iter().map(|o| o as usize), coefficient));
    }
    let orbit = r.get("hamiltonian", "orbit", boolean)?.unwrap_or(true);
    let hamiltonian_config = HamiltonianConfig { hopping, interactions, orbit, gge };
    let hamiltonian = hamiltonian_config
        .to_spec(lattice)
        .map_err(|e| perr(r.line("hamiltonian", "hopping"), e.to_string()))?;
    hamiltonian.validate().map_err(|e| perr(0, e.to_string()))?;

    let selector = |key: &str, default: OperatorSelector| -> Result<OperatorSelector> {
        let sel = r.get("operators", key, OperatorSelector::parse)?.unwrap_or(default);
        for &s in &sel.sites {
            if s >= l {
                return Err(perr(r.line("operators", key), format!("{key}: site {s} out of range for L = {l}")));
            }
        }
        Ok(sel)
    };
    let default_a = OperatorSelector::new(OperatorKind::Bilinear, vec![0, 1 % l]);
    let default_b = OperatorSelector::new(OperatorKind::Bilinear, vec![l.saturating_sub(2), l - 1]);
    let a = selector("a", default_a)?;
    let b = selector("b", default_b)?;
    let c = selector("c", a.clone())?;
    let d = selector("d", b.clone())?;

    let t_start = r.get("time", "t_start", number::<f64>("a number"))?.unwrap_or(0.0);
    let t_end = r.get("time", "t_end", number::<f64>("a number"))?.unwrap_or(t_start + l as f64 / 4.0);
    let steps = r.get("time", "steps", number::<usize>("a positive integer"))?.unwrap_or(21);
    if steps == 0 {
        return Err(perr(r.line("time", "steps"), "steps must be ≥ 1"));
    }
    if !(t_start.is_finite() && t_end.is_finite()) || (steps > 1 && t_end <= t_start) {
        return Err(perr(r.line("time", "t_end"), "t_end must exceed t_start"));
    }

    let epsilon = r.get("diagnostic", "epsilon", number::<f64>("a number"))?.unwrap_or(0.01);
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(perr(r.line("diagnostic", "epsilon"), "epsilon must lie in (0, 1)"));
    }
    let twist_k = r.get("diagnostic", "twist_k", number::<i64>("an integer"))?.unwrap_or(1);
    let max_width = r.get("diagnostic", "max_width", number::<usize>("a positive integer"))?.unwrap_or(2);
    let state = r
        .get("diagnostic", "state", |s| match s {
            "tracial" => Ok(StateKind::Tracial),
            "ground" => Ok(StateKind::Ground),
            _ => Err(format!("'{s}' is not tracial or ground")),
        })?
        .unwrap_or(StateKind::Tracial);

    Ok(ScenarioConfig {
        scenario,
        lattice,
        hamiltonian_config,
        hamiltonian,
        a,
        b,
        c,
        d,
        time: TimeGrid { t_start, t_end, steps },
        norm,
        out,
        memory_budget_mb,
        epsilon,
        twist_k,
        max_width,
        state,
    })
}

impl ScenarioConfig {
    /// Canonical text form; parsing it yields an equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[run]\nscenario = {}\nnorm = {}", self.scenario.name(), self.norm);
        let _ = writeln!(s, "out = {}\nmemory_budget_mb = {}", self.out.display(), self.memory_budget_mb);
        let _ = writeln!(s, "[lattice]\nL = {}\nboundary = {}", self.lattice.sites(), self.lattice.boundary());
        let h = &self.hamiltonian_config;
        let hop: Vec<String> = h.hopping.iter().map(|(d, v)| format!("{d}:{}", fmt_complex(*v))).collect();
        let _ = writeln!(s, "[hamiltonian]\nhopping = {}\norbit = {}", hop.join(", "), h.orbit);
        let join = |v: &[i64]| v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
        for t in &h.interactions {
            let _ = writeln!(s, "interaction = {} ; {} ; {}", join(&t.creators), join(&t.annihilators), fmt_complex(t.coefficient));
        }
        for g in &h.gge {
            let offs: Vec<String> = g.offsets.iter().map(usize::to_string).collect();
            let _ = writeln!(s, "gge = {} ; {:?}", offs.join(" "), g.coefficient);
        }
        let _ = writeln!(s, "[operators]\na = {}\nb = {}\nc = {}\nd = {}", self.a, self.b, self.c, self.d);
        let _ = writeln!(
            s,
            "[time]\nt_start = {:?}\nt_end = {:?}\nsteps = {}",
            self.time.t_start, self.time.t_end, self.time.steps
        );
        let state = match self.state {
            StateKind::Tracial => "tracial",
            StateKind::Ground => "ground",
        };
        let _ = writeln!(
            s,
            "[diagnostic]\nepsilon = {:?}\ntwist_k = {}\nmax_width = {}\nstate = {state}",
            self.epsilon, self.twist_k, self.max_width
        );
        s
    }

    pub fn times(&self) -> Vec<f64> {
        self.time.points()
    }

    pub fn memory_budget_bytes(&self) -> usize {
        self.memory_budget_mb.saturating_mul(1 << 20)
    }

    /// Sites touched by any selector.
    pub fn operator_sites(&self) -> BTreeSet<usize> {
        [&self.a, &self.b, &self.c, &self.d].iter().flat_map(|s| s.sites.iter().copied()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[run]\nscenario = quasifree_decay\n[lattice]\nL = 8\n[hamiltonian]\nhopping = -1:1, 1:1\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.scenario, Scenario::QuasifreeDecay);
        assert_eq!(c.lattice, LatticeSpec::periodic(8).unwrap());
        assert_eq!(c.norm, NormKind::Spectral);
        assert_eq!(c.b, OperatorSelector::new(OperatorKind::Bilinear, vec![6, 7]));
        assert_eq!(c.time, TimeGrid { t_start: 0.0, t_end: 2.0, steps: 21 });
        assert_eq!(c.hamiltonian, HamiltonianSpec::hopping_benchmark(c.lattice));
        assert_eq!(c.times().len(), 21);
    }

    #[test]
    fn negative_size_is_rejected_with_line() {
        let text = "[run]\nscenario = localization\n[lattice]\nL = -3\n";
        match parse_config(text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 4);
                assert!(message.contains("L must be ≥ 1"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_and_duplicate_keys() {
        let err = parse_config(&format!("{MINIMAL}[time]\nsteps = 3\nstep = 4\n")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 9, .. }), "{err}");
        assert!(err.to_string().contains("unknown key 'step'"));
        let err = parse_config(&format!("{MINIMAL}[lattice]\nL = 4\n")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 8, .. }), "{err}");
        let err = parse_config("[nope]\n").unwrap_err();
        assert_eq!(err.to_string(), "line 1: unknown section [nope]");
        assert!(parse_config("[lattice]\nL = 4\n").unwrap_err().to_string().contains("scenario"));
        assert!(parse_config("L = 4\n").is_err());
    }

    #[test]
    fn position_sum_violation_names_the_term() {
        let text = format!("{MINIMAL}interaction = 0 1 ; 0 3 ; 1.0\n");
        let err = parse_config(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.starts_with("line 7:"), "{msg}");
        assert!(msg.contains("creators (0,1) annihilators (0,3)"), "{msg}");
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1.5").unwrap(), C::new(1.5, 0.0));
        assert_eq!(parse_complex("-2i").unwrap(), C::new(0.0, -2.0));
        assert_eq!(parse_complex("0.5+0.25i").unwrap(), C::new(0.5, 0.25));
        assert_eq!(parse_complex("1e-3-2e-2i").unwrap(), C::new(1e-3, -2e-2));
        assert_eq!(parse_complex("-i").unwrap(), C::new(0.0, -1.0));
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn canonical_text_round_trips() {
        let text = format!(
            "{MINIMAL}interaction = 0 1 ; 1 0 ; 0.5\ngge = 0 1 ; -0.25\norbit = true\n[operators]\na = u0 0 3\nd = density 2\n[time]\nt_end = 1.5\nsteps = 4\n[diagnostic]\nstate = ground\n"
        );
        let c = parse_config(&text).unwrap();
        assert_eq!(parse_config(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn json_matches_text() {
        let json = r#"{"run": {"scenario": "quasifree_decay"}, "lattice": {"L": 8},
            "hamiltonian": {"hopping": "-1:1, 1:1", "interaction": ["0 1 ; 1 0 ; 0.5"]}}"#;
        let text = format!("{MINIMAL}interaction = 0 1 ; 1 0 ; 0.5\n");
        assert_eq!(parse_config(json).unwrap(), parse_config(&text).unwrap());
        assert!(parse_config(r#"{"run": {"scenario": "spectrum", "colour": 1}}"#).is_err());
    }

    #[test]
    fn hopping_must_be_self_adjoint() {
        let text = "[run]\nscenario = spectrum\n[lattice]\nL = 4\n[hamiltonian]\nhopping = 1:1\n";
        assert!(matches!(parse_config(text), Err(Error::Parse { line: 6, .. })));
    }
}
