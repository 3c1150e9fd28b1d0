//! Factorization conditions for the LBC evolution and the route cross-check harness.
//!
//! When every derived diagonal pair of the evolved state has a vanishing product
//! (first kind), the LBC is the initial LBC times the coherence factor `|D(t)|`.
//! When the pair products instead factor as `|alpha beta| F(t)` with `F` independent
//! of the amplitudes (second kind), the LBC is the initial LBC times the RMS of
//! `max{0, |D(t)| - F(t)}` over bipartitions.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::channels::{evolve, ChannelKind, EvolveParams, NoiseConfig};
use crate::error::{Error, Result};
use crate::lbc::{bipartitions, lbc_closed_form, lbc_spectral_with_cap, total_from_bipartitions, Bipartition};
use crate::state::{ghz_density, xstate_view, GhzSpec, XStateView};

/// `sqrt(a_m' b_m')` above this value violates the first-kind condition.
pub const FIRST_KIND_TOL: f64 = 1e-12;
/// Largest residual accepted for the second-kind decomposition.
pub const SECOND_KIND_TOL: f64 = 1e-10;
/// Below this `|alpha beta|` the decomposition test is undefined.
pub const DEGENERATE_TOL: f64 = 1e-14;
/// `|alpha'|^2` of the probe state used to test amplitude independence.
pub const PROBE_ALPHA_SQ: f64 = 0.3;

/// Structural classification of a (state, noise) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Scenario {
    /// Amplitude damping on a symmetric GHZ state, fewer channels than qubits.
    #[serde(rename = "AD_symmetric_MltN")]
    AdSymmetricPartial,
    /// Amplitude damping on a GHZ state whose pattern mixes both bit values.
    #[serde(rename = "AD_asymmetric")]
    AdAsymmetric,
    /// Depolarizing channels on fewer qubits than the register.
    #[serde(rename = "D_MltN")]
    DepolarizingPartial,
    /// Dephasing channels, any number.
    #[serde(rename = "PD_any")]
    Dephasing,
    #[serde(rename = "none")]
    None,
}

impl Scenario {
    pub fn tag(self) -> &'static str {
        match self {
            Scenario::AdSymmetricPartial => "AD_symmetric_MltN",
            Scenario::AdAsymmetric => "AD_asymmetric",
            Scenario::DepolarizingPartial => "D_MltN",
            Scenario::Dephasing => "PD_any",
            Scenario::None => "none",
        }
    }

    pub fn classify(spec: &GhzSpec, config: &NoiseConfig) -> Scenario {
        let partial = config.channel_count() < config.n_qubits();
        match config.homogeneous_kind() {
            Some(ChannelKind::AmplitudeDamping) if !spec.is_symmetric() => Scenario::AdAsymmetric,
            Some(ChannelKind::AmplitudeDamping) if partial => Scenario::AdSymmetricPartial,
            Some(ChannelKind::Depolarizing) if partial => Scenario::DepolarizingPartial,
            Some(ChannelKind::Dephasing) => Scenario::Dephasing,
            _ => Scenario::None,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// `Q^P = max{0, |D| - F}` for one bipartition, with `F` the flip-set product.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QTerm {
    pub bipartition: Bipartition,
    pub f: f64,
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationPrediction {
    pub scenario: Scenario,
    pub initial_lbc: f64,
    pub coherence_factor: f64,
    /// Second-kind scenarios only.
    pub q_products: Vec<QTerm>,
    pub predicted_lbc: f64,
}

/// Product of the per-channel coherence factors `D(t)`.
pub fn coherence_factor(config: &NoiseConfig, params: &EvolveParams) -> Result<f64> {
    let probs = config.resolve(params)?;
    Ok(config.assignments().iter().zip(&probs).map(|((_, spec), &p)| spec.kind.coherence_factor(p)).product())
}

/// Factorized LBC for the supported scenarios.
pub fn predict_lbc(spec: &GhzSpec, config: &NoiseConfig, params: &EvolveParams) -> Result<FactorizationPrediction> {
    if spec.n_qubits() != config.n_qubits() {
        return Err(Error::ConfigMismatch("GHZ spec and noise config disagree on qubit count".into()));
    }
    let probs = config.resolve(params)?;
    let d = coherence_factor(config, params)?;
    let initial_lbc = spec.initial_lbc();
    let scenario = Scenario::classify(spec, config);
    let first_kind = |scenario| FactorizationPrediction {
        scenario,
        initial_lbc,
        coherence_factor: d,
        q_products: Vec::new(),
        predicted_lbc: initial_lbc * d.abs(),
    };
    match scenario {
        Scenario::AdSymmetricPartial | Scenario::AdAsymmetric | Scenario::Dephasing => Ok(first_kind(scenario)),
        Scenario::DepolarizingPartial => {
            let q_products = depolarizing_q_terms(config, &probs, d)?;
            let rms = total_from_bipartitions(q_products.iter().map(|t| t.q));
            Ok(FactorizationPrediction {
                scenario,
                initial_lbc,
                coherence_factor: d,
                q_products,
                predicted_lbc: initial_lbc * rms,
            })
        }
        Scenario::None => Err(Error::UnsupportedScenario(describe_unsupported(spec, config))),
    }
}

fn describe_unsupported(spec: &GhzSpec, config: &NoiseConfig) -> String {
    let (m, n) = (config.channel_count(), config.n_qubits());
    match config.homogeneous_kind() {
        Some(ChannelKind::AmplitudeDamping) if spec.is_symmetric() => {
            format!("amplitude damping on every qubit of a symmetric GHZ state (M = N = {n})")
        }
        Some(ChannelKind::Depolarizing) => format!("depolarizing channels on every qubit (M = N = {n})"),
        _ => format!("mixed channel kinds on {m} of {n} qubits"),
    }
}

/// Flip-set products for depolarizing noise on a strict subset of qubits.
///
/// For each bipartition, the block free of noiseless qubits is the flip set `T` and
/// `F = prod_{j in T} p_j/2 * prod_{j not in T} (1 - p_j/2)`. A bipartition that
/// splits the noiseless qubits has no diagonal weight on its derived pair, so `F = 0`.
fn depolarizing_q_terms(config: &NoiseConfig, probs: &[f64], d: f64) -> Result<Vec<QTerm>> {
    let n = config.n_qubits();
    let noisy: BTreeMap<usize, f64> = config.channel_qubits().into_iter().zip(probs.iter().copied()).collect();
    let quiet: Vec<usize> = (1..=n).filter(|q| !noisy.contains_key(q)).collect();
    bipartitions(n)?
        .into_iter()
        .map(|bipartition| {
            let block = bipartition.block().to_vec();
            let complement = bipartition.complement();
            let free_of_quiet = |qs: &[usize]| quiet.iter().all(|q| !qs.contains(q));
            let flip_set = if free_of_quiet(&block) {
                Some(block)
            } else if free_of_quiet(&complement) {
                Some(complement)
            } else {
                None
            };
            let f = match flip_set {
                Some(t) => noisy.iter().map(|(q, &p)| if t.contains(q) { p / 2.0 } else { 1.0 - p / 2.0 }).product(),
                None => 0.0,
            };
            let q = (d.abs() - f.abs()).max(0.0);
            Ok(QTerm { bipartition, f, q })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditionKind {
    First,
    Second,
    None,
}

impl ConditionKind {
    pub fn tag(self) -> &'static str {
        match self {
            ConditionKind::First => "first",
            ConditionKind::Second => "second",
            ConditionKind::None => "none",
        }
    }
}

impl fmt::Display for ConditionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolatingPair {
    pub m_prime: usize,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionWitness {
    pub kind: ConditionKind,
    pub violating_pairs: Vec<ViolatingPair>,
    /// Largest `|sqrt(a_m' b_m') - |d_m(0)| F_m'|`, present when the second kind was tested.
    pub decomposition_residual: Option<f64>,
}

fn derived_pairs(view: &XStateView) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
    (1..=view.a.len()).filter(move |&k| k != view.m).map(move |k| {
        let (a, b) = view.pair(k);
        (k, a, b)
    })
}

fn pair_root(a: f64, b: f64) -> f64 {
    (a.max(0.0) * b.max(0.0)).sqrt()
}

/// Tests the two factorization conditions on an evolved state.
///
/// The second kind is checked by re-evolving a probe GHZ state with different
/// amplitudes under the same channels and comparing the normalized pair products.
pub fn classify_conditions(
    rho_evolved: &crate::state::DensityMatrix,
    spec: &GhzSpec,
    config: &NoiseConfig,
    params: &EvolveParams,
) -> Result<ConditionWitness> {
    let view = xstate_view(rho_evolved, spec)?;
    let violating_pairs: Vec<ViolatingPair> = derived_pairs(&view)
        .filter(|&(_, a, b)| pair_root(a, b) > FIRST_KIND_TOL)
        .map(|(m_prime, a, b)| ViolatingPair { m_prime, a, b })
        .collect();
    if violating_pairs.is_empty() {
        return Ok(ConditionWitness { kind: ConditionKind::First, violating_pairs, decomposition_residual: None });
    }

    let coherence = spec.coherence_magnitude();
    if coherence < DEGENERATE_TOL {
        return Err(Error::DegenerateState(coherence));
    }
    let probe_alpha_sq =
        if (spec.alpha().norm_sqr() - PROBE_ALPHA_SQ).abs() < 1e-3 { 1.0 - PROBE_ALPHA_SQ } else { PROBE_ALPHA_SQ };
    let probe = spec.with_amplitudes(
        Complex64::new(probe_alpha_sq.sqrt(), 0.0),
        Complex64::new((1.0 - probe_alpha_sq).sqrt(), 0.0),
    )?;
    let probe_view = xstate_view(&evolve(&ghz_density(&probe), config, params)?, &probe)?;
    let probe_coherence = probe.coherence_magnitude();
    let residual = derived_pairs(&view)
        .zip(derived_pairs(&probe_view))
        .map(|((_, a, b), (_, pa, pb))| {
            let f = pair_root(pa, pb) / probe_coherence;
            (pair_root(a, b) - coherence * f).abs()
        })
        .fold(0.0, f64::max);
    let kind = if residual < SECOND_KIND_TOL { ConditionKind::Second } else { ConditionKind::None };
    Ok(ConditionWitness { kind, violating_pairs, decomposition_residual: Some(residual) })
}

/// LBC predicted by the factorized law from the witness and the evolved state.
///
/// First kind: `2|d(0)| |D|`. Second kind: `2|d(0)| RMS_P max{0, |D| - F_m'}` with
/// `F_m' = sqrt(a_m' b_m') / |d(0)|`. Returns `None` for `ConditionKind::None`.
pub fn factorized_from_witness(view: &XStateView, spec: &GhzSpec, witness: &ConditionWitness) -> Result<Option<f64>> {
    let d0 = spec.coherence_magnitude();
    if d0 < DEGENERATE_TOL {
        return Ok(Some(0.0));
    }
    let d = view.d.norm() / d0;
    match witness.kind {
        ConditionKind::First => Ok(Some(2.0 * d0 * d)),
        ConditionKind::Second => {
            let x = view.m - 1;
            let qs = bipartitions(view.n_qubits)?.into_iter().map(|part| {
                let (a, b) = view.pair(crate::lbc::xstate_pair_index(&part, x));
                (d - pair_root(a, b) / d0).max(0.0)
            });
            Ok(Some(2.0 * d0 * total_from_bipartitions(qs)))
        }
        ConditionKind::None => Ok(None),
    }
}

/// Agreement thresholds between routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Closed form (or factorized) against the spectral route.
    pub spectral: f64,
    /// Closed form against the factorized prediction.
    pub factorized: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { spectral: 1e-8, factorized: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub spectral: bool,
    pub factorized: bool,
    pub spectral_cap: usize,
    pub tolerances: Tolerances,
    /// Keep per-bipartition closed-form values in each point.
    pub per_bipartition: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            spectral: true,
            factorized: true,
            spectral_cap: crate::lbc::DEFAULT_QUBIT_CAP,
            tolerances: Tolerances::default(),
            per_bipartition: false,
        }
    }
}

/// All routes evaluated at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointReport {
    pub grid_value: f64,
    pub lbc_direct: Option<f64>,
    pub lbc_spectral: Option<f64>,
    pub lbc_factorized: Option<f64>,
    pub condition: Option<ConditionKind>,
    pub max_deviation: f64,
    pub within_tolerance: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_bipartition: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
    /// Nonzero spectral generator terms, kept only when the spectral route exceeds the closed form.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator_breakdown: Option<Vec<crate::lbc::GeneratorTerm>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationSummary {
    pub points: usize,
    pub max_deviation: f64,
    pub tolerance_violations: usize,
    pub error_points: usize,
    pub condition_histogram: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub scenario: Scenario,
    pub points: Vec<PointReport>,
    pub summary: VerificationSummary,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.summary.tolerance_violations == 0 && self.summary.error_points == 0
    }
}

/// Evaluates every requested route at one grid point. Errors are recorded, not raised.
pub fn evaluate_point(
    spec: &GhzSpec,
    config: &NoiseConfig,
    grid_value: f64,
    params: &EvolveParams,
    opts: &VerifyOptions,
) -> PointReport {
    let mut point = PointReport {
        grid_value,
        lbc_direct: None,
        lbc_spectral: None,
        lbc_factorized: None,
        condition: None,
        max_deviation: 0.0,
        within_tolerance: true,
        per_bipartition: None,
        errors: Vec::new(),
        generator_breakdown: None,
    };
    let rho = match evolve(&ghz_density(spec), config, params) {
        Ok(rho) => rho,
        Err(e) => {
            point.errors.push(e.to_string());
            point.within_tolerance = false;
            return point;
        }
    };

    match xstate_view(&rho, spec).and_then(|view| lbc_closed_form(&view)) {
        Ok(report) => {
            point.lbc_direct = Some(report.total);
            if opts.per_bipartition {
                point.per_bipartition = Some(report.concurrences());
            }
        }
        Err(e) => point.errors.push(e.to_string()),
    }

    let mut spectral_terms = None;
    if opts.spectral && spec.n_qubits() <= opts.spectral_cap {
        match lbc_spectral_with_cap(&rho, opts.spectral_cap) {
            Ok(report) => {
                point.lbc_spectral = Some(report.total);
                spectral_terms = report.per_generator_terms;
            }
            Err(e) => point.errors.push(e.to_string()),
        }
    }

    match classify_conditions(&rho, spec, config, params) {
        Ok(w) => point.condition = Some(w.kind),
        Err(Error::DegenerateState(_)) => {}
        Err(e) => point.errors.push(e.to_string()),
    }

    if opts.factorized {
        match predict_lbc(spec, config, params) {
            Ok(pred) => point.lbc_factorized = Some(pred.predicted_lbc),
            Err(Error::UnsupportedScenario(_)) => {}
            Err(e) => point.errors.push(e.to_string()),
        }
    }

    let tol = opts.tolerances;
    let pairs = [
        (point.lbc_direct, point.lbc_spectral, tol.spectral),
        (point.lbc_direct, point.lbc_factorized, tol.factorized),
        (point.lbc_spectral, point.lbc_factorized, tol.spectral),
    ];
    for (x, y, limit) in pairs {
        if let (Some(x), Some(y)) = (x, y) {
            let dev = (x - y).abs();
            point.max_deviation = point.max_deviation.max(dev);
            if !(dev <= limit) {
                point.within_tolerance = false;
            }
        }
    }
    if let (Some(direct), Some(spectral)) = (point.lbc_direct, point.lbc_spectral) {
        if spectral - direct > tol.spectral {
            point.generator_breakdown = spectral_terms;
        }
    }
    if !point.errors.is_empty() {
        point.within_tolerance = false;
    }
    point
}

/// Cross-checks every route over `points`, each a grid value with its evolution parameters.
pub fn verify_points(
    spec: &GhzSpec,
    config: &NoiseConfig,
    points: &[(f64, EvolveParams)],
    opts: &VerifyOptions,
) -> VerificationReport {
    let points: Vec<PointReport> =
        points.iter().map(|(value, params)| evaluate_point(spec, config, *value, params, opts)).collect();
    let mut condition_histogram = BTreeMap::new();
    for p in &points {
        let tag = p.condition.map_or("unknown", ConditionKind::tag);
        *condition_histogram.entry(tag.to_string()).or_insert(0) += 1;
    }
    let summary = VerificationSummary {
        points: points.len(),
        max_deviation: points.iter().map(|p| p.max_deviation).fold(0.0, f64::max),
        tolerance_violations: points.iter().filter(|p| !p.within_tolerance && p.errors.is_empty()).count(),
        error_points: points.iter().filter(|p| !p.errors.is_empty()).count(),
        condition_histogram,
    };
    VerificationReport { scenario: Scenario::classify(spec, config), points, summary }
}

/// Cross-checks every route with the same probability on every channel at each grid value.
pub fn verify(spec: &GhzSpec, config: &NoiseConfig, grid: &[f64], opts: &VerifyOptions) -> VerificationReport {
    let points: Vec<_> = grid.iter().map(|&p| (p, EvolveParams::Shared(p))).collect();
    verify_points(spec, config, &points, opts)
}
