//! Single-qubit noise channels in Kraus form and their local action on N-qubit states.

use std::fmt;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{qubit_shift, DensityMatrix};

/// Completeness tolerance for constructed Kraus sets.
pub const COMPLETENESS_TOL: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChannelKind {
    /// Zero-temperature amplitude damping.
    #[serde(rename = "AD")]
    AmplitudeDamping,
    /// Depolarizing (white noise).
    #[serde(rename = "D")]
    Depolarizing,
    /// Pure dephasing.
    #[serde(rename = "PD")]
    Dephasing,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 3] =
        [ChannelKind::AmplitudeDamping, ChannelKind::Depolarizing, ChannelKind::Dephasing];

    pub fn tag(self) -> &'static str {
        match self {
            ChannelKind::AmplitudeDamping => "AD",
            ChannelKind::Depolarizing => "D",
            ChannelKind::Dephasing => "PD",
        }
    }

    /// Factor multiplying an off-diagonal `|0><1|` element at probability `p`.
    pub fn coherence_factor(self, p: f64) -> f64 {
        match self {
            ChannelKind::AmplitudeDamping => (1.0 - p).sqrt(),
            ChannelKind::Depolarizing | ChannelKind::Dephasing => 1.0 - p,
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// How a channel's probability is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelParam {
    /// Fixed probability `p`.
    Probability(f64),
    /// Decay rate `gamma`; `p(t) = 1 - exp(-gamma t)`.
    DecayRate(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub param: ChannelParam,
}

impl ChannelSpec {
    pub fn with_probability(kind: ChannelKind, p: f64) -> Result<Self> {
        check_probability(p)?;
        Ok(Self { kind, param: ChannelParam::Probability(p) })
    }

    pub fn with_rate(kind: ChannelKind, gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0) {
            return Err(Error::NegativeInput { name: "gamma", value: gamma });
        }
        Ok(Self { kind, param: ChannelParam::DecayRate(gamma) })
    }

    /// Probability at time `t`. A fixed-probability channel ignores `t`.
    pub fn probability_at(&self, t: f64) -> Result<f64> {
        match self.param {
            ChannelParam::Probability(p) => Ok(p),
            ChannelParam::DecayRate(gamma) => p_of_t(gamma, t),
        }
    }
}

/// Local channel assignments on an N-qubit register, at most one per qubit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseConfig {
    n_qubits: usize,
    assignments: Vec<(usize, ChannelSpec)>,
}

impl NoiseConfig {
    pub fn new(n_qubits: usize, assignments: Vec<(usize, ChannelSpec)>) -> Result<Self> {
        if assignments.is_empty() {
            return Err(Error::ConfigMismatch("at least one channel assignment is required".into()));
        }
        if assignments.len() > n_qubits {
            return Err(Error::ConfigMismatch(format!("{} channels on {} qubits", assignments.len(), n_qubits)));
        }
        let mut seen = vec![false; n_qubits + 1];
        for &(qubit, _) in &assignments {
            if qubit == 0 || qubit > n_qubits {
                return Err(Error::IndexOutOfRange { index: qubit, n_qubits });
            }
            if std::mem::replace(&mut seen[qubit], true) {
                return Err(Error::ConfigMismatch(format!("qubit {qubit} assigned more than one channel")));
            }
        }
        Ok(Self { n_qubits, assignments })
    }

    /// Identical channels of `kind` on each of `qubits`, probabilities supplied at evolution time.
    pub fn uniform(n_qubits: usize, kind: ChannelKind, qubits: impl IntoIterator<Item = usize>) -> Result<Self> {
        let assignments =
            qubits.into_iter().map(|q| (q, ChannelSpec { kind, param: ChannelParam::Probability(0.0) })).collect();
        Self::new(n_qubits, assignments)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn assignments(&self) -> &[(usize, ChannelSpec)] {
        &self.assignments
    }

    /// Number of noisy channels `M`.
    pub fn channel_count(&self) -> usize {
        self.assignments.len()
    }

    /// The common kind when every channel is of the same kind.
    pub fn homogeneous_kind(&self) -> Option<ChannelKind> {
        let first = self.assignments[0].1.kind;
        self.assignments.iter().all(|(_, s)| s.kind == first).then_some(first)
    }

    /// Qubits carrying a channel, in assignment order.
    pub fn channel_qubits(&self) -> Vec<usize> {
        self.assignments.iter().map(|&(q, _)| q).collect()
    }

    /// One probability per assignment, in assignment order.
    pub fn resolve(&self, params: &EvolveParams) -> Result<Vec<f64>> {
        let probs = match params {
            EvolveParams::Probabilities(ps) => {
                if ps.len() != self.assignments.len() {
                    return Err(Error::ConfigMismatch(format!(
                        "{} probabilities for {} channels",
                        ps.len(),
                        self.assignments.len()
                    )));
                }
                ps.clone()
            }
            EvolveParams::Shared(p) => vec![*p; self.assignments.len()],
            EvolveParams::Time(t) => {
                self.assignments.iter().map(|(_, s)| s.probability_at(*t)).collect::<Result<_>>()?
            }
        };
        for &p in &probs {
            check_probability(p)?;
        }
        Ok(probs)
    }
}

/// Where the per-channel probabilities come from.
#[derive(Debug, Clone, PartialEq)]
pub enum EvolveParams {
    /// One probability per assignment.
    Probabilities(Vec<f64>),
    /// The same probability for every channel.
    Shared(f64),
    /// Shared time `t`; each channel converts via its decay rate.
    Time(f64),
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::ProbabilityOutOfRange(p))
    }
}

/// `1 - exp(-gamma t)`.
pub fn p_of_t(gamma: f64, t: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(Error::NegativeInput { name: "gamma", value: gamma });
    }
    if !(t >= 0.0) {
        return Err(Error::NegativeInput { name: "t", value: t });
    }
    Ok(-(-gamma * t).exp_m1())
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    pub operators: Vec<Matrix2<Complex64>>,
}

impl KrausSet {
    /// `sum_k K_k^dag K_k`.
    pub fn completeness(&self) -> Matrix2<Complex64> {
        self.operators.iter().map(|k| k.adjoint() * k).sum()
    }

    pub fn completeness_deviation(&self) -> f64 {
        (self.completeness() - Matrix2::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Applies the channel to a single-qubit density matrix.
    pub fn apply(&self, rho: &Matrix2<Complex64>) -> Matrix2<Complex64> {
        self.operators.iter().map(|k| k * rho * k.adjoint()).sum()
    }
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Kraus operators of `kind` at probability `p`.
pub fn kraus_ops(kind: ChannelKind, p: f64) -> Result<KrausSet> {
    check_probability(p)?;
    let operators = match kind {
        ChannelKind::AmplitudeDamping => {
            vec![Matrix2::new(re(1.0), ZERO, ZERO, re((1.0 - p).sqrt())), Matrix2::new(ZERO, re(p.sqrt()), ZERO, ZERO)]
        }
        ChannelKind::Depolarizing => {
            let s = (p / 4.0).sqrt();
            let i = Complex64::new(0.0, s);
            vec![
                Matrix2::identity() * re((1.0 - 0.75 * p).sqrt()),
                Matrix2::new(ZERO, re(s), re(s), ZERO),
                Matrix2::new(ZERO, -i, i, ZERO),
                Matrix2::new(re(s), ZERO, ZERO, re(-s)),
            ]
        }
        ChannelKind::Dephasing => {
            let s = (p / 2.0).sqrt();
            vec![Matrix2::identity() * re((1.0 - p / 2.0).sqrt()), Matrix2::new(re(s), ZERO, ZERO, re(-s))]
        }
    };
    Ok(KrausSet { operators })
}

/// Applies a channel to the 1-based `qubit` of `rho` by bit arithmetic on the basis index.
pub fn apply_local(rho: &DensityMatrix, qubit: usize, kind: ChannelKind, p: f64) -> Result<DensityMatrix> {
    let n = rho.n_qubits();
    if qubit == 0 || qubit > n {
        return Err(Error::IndexOutOfRange { index: qubit, n_qubits: n });
    }
    let kraus = kraus_ops(kind, p)?;
    let shift = qubit_shift(n, qubit);
    let mask = 1usize << shift;
    let dim = rho.dim();
    let src = rho.entries();
    let mut out = DMatrix::from_element(dim, dim, ZERO);

    for c in 0..dim {
        let bc = (c >> shift) & 1;
        let cols = [c & !mask, c | mask];
        for r in 0..dim {
            let br = (r >> shift) & 1;
            let rows = [r & !mask, r | mask];
            let mut acc = ZERO;
            for k in &kraus.operators {
                for (a, &ra) in rows.iter().enumerate() {
                    let ka = k[(br, a)];
                    if ka == ZERO {
                        continue;
                    }
                    for (b, &cb) in cols.iter().enumerate() {
                        let kb = k[(bc, b)];
                        if kb == ZERO {
                            continue;
                        }
                        acc += ka * src[(ra, cb)] * kb.conj();
                    }
                }
            }
            out[(r, c)] = acc;
        }
    }
    DensityMatrix::new(n, out)
}

/// Applies every assigned channel in turn.
pub fn evolve(rho0: &DensityMatrix, config: &NoiseConfig, params: &EvolveParams) -> Result<DensityMatrix> {
    if rho0.n_qubits() != config.n_qubits() {
        return Err(Error::ConfigMismatch(format!(
            "state has {} qubits, noise config has {}",
            rho0.n_qubits(),
            config.n_qubits()
        )));
    }
    let probs = config.resolve(params)?;
    let mut rho = rho0.clone();
    for (&(qubit, spec), p) in config.assignments().iter().zip(probs) {
        rho = apply_local(&rho, qubit, spec.kind, p)?;
    }
    Ok(rho)
}
