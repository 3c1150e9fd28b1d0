//! Lower bound of concurrence (LBC) for N-qubit states.
//!
//! Two independent routes are provided: [`lbc_spectral`] evaluates the definition
//! over every bipartition and pair of SO generators, and [`lbc_closed_form`] uses the
//! coherence/diagonal-pair formula valid for X-structured GHZ evolutions.

mod bipartition;
mod generators;
mod spectral;

use serde::Serialize;

pub use bipartition::{bipartitions, Bipartition};
pub use generators::{so_generators, SoGenerator, SoGeneratorSet};
pub use spectral::{
    generator_pair_concurrence, hermitian_sqrt, lbc_spectral, lbc_spectral_with_cap, DEFAULT_QUBIT_CAP,
};

use crate::error::Result;
use crate::state::XStateView;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LbcMethod {
    Spectral,
    ClosedForm,
    Factorized,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BipartitionConcurrence {
    pub bipartition: Bipartition,
    pub concurrence: f64,
}

/// A nonzero single generator-pair term of the spectral route.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorTerm {
    pub bipartition: Bipartition,
    pub l1: SoGenerator,
    pub l2: SoGenerator,
    pub value: f64,
}

impl Serialize for SoGenerator {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq([self.i, self.j])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LbcReport {
    pub total: f64,
    pub per_bipartition: Vec<BipartitionConcurrence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_generator_terms: Option<Vec<GeneratorTerm>>,
    pub method: LbcMethod,
}

impl LbcReport {
    pub fn from_bipartitions(
        per_bipartition: Vec<BipartitionConcurrence>,
        per_generator_terms: Option<Vec<GeneratorTerm>>,
        method: LbcMethod,
    ) -> Self {
        let total = total_from_bipartitions(per_bipartition.iter().map(|b| b.concurrence));
        Self { total, per_bipartition, per_generator_terms, method }
    }

    pub fn concurrences(&self) -> Vec<f64> {
        self.per_bipartition.iter().map(|b| b.concurrence).collect()
    }
}

/// Root mean square over bipartitions: `sqrt(sum_P C_P^2 / count)`.
pub fn total_from_bipartitions(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, count) = values.into_iter().fold((0.0, 0usize), |(s, n), c| (s + c * c, n + 1));
    if count == 0 {
        return 0.0;
    }
    (sum / count as f64).sqrt()
}

/// 1-based pair index of `{y, ~y}` where `y` flips the bits of `part`'s block in `x`.
pub fn xstate_pair_index(part: &Bipartition, x: usize) -> usize {
    let full = (1usize << part.n_qubits()) - 1;
    let y = x ^ part.mask();
    y.min(y ^ full) + 1
}

/// Bipartite concurrence `2 max(0, |d| - sqrt(a_m' b_m'))` per bipartition, then the RMS total.
pub fn lbc_closed_form(view: &XStateView) -> Result<LbcReport> {
    let x = view.m - 1;
    let coherence = view.d.norm();
    let per_bipartition = bipartitions(view.n_qubits)?
        .into_iter()
        .map(|bipartition| {
            let (a, b) = view.pair(xstate_pair_index(&bipartition, x));
            let concurrence = 2.0 * (coherence - (a.max(0.0) * b.max(0.0)).sqrt()).max(0.0);
            BipartitionConcurrence { bipartition, concurrence }
        })
        .collect();
    Ok(LbcReport::from_bipartitions(per_bipartition, None, LbcMethod::ClosedForm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{evolve, ChannelKind, EvolveParams, NoiseConfig};
    use crate::state::{ghz_density, xstate_view, GhzSpec};

    #[test]
    fn pair_index_examples() {
        let p1 = Bipartition::new(3, [1]).unwrap();
        assert_eq!(xstate_pair_index(&p1, 0), 4);
        let p3 = Bipartition::new(3, [3]).unwrap();
        assert_eq!(xstate_pair_index(&p3, 0), 2);
        // Flipping either block gives the same pair.
        let p12 = Bipartition::new(3, [1, 2]).unwrap();
        assert_eq!(xstate_pair_index(&p12, 0), xstate_pair_index(&p3, 0));
    }

    #[test]
    fn derived_pair_never_equals_initial_pair() {
        for n in 2..=6 {
            for x in 0..(1usize << n) {
                let full = (1usize << n) - 1;
                let m = x.min(x ^ full) + 1;
                for part in bipartitions(n).unwrap() {
                    assert_ne!(xstate_pair_index(&part, x), m);
                }
            }
        }
    }

    fn closed_form(spec: &GhzSpec, cfg: &NoiseConfig, p: f64) -> LbcReport {
        let rho = evolve(&ghz_density(spec), cfg, &EvolveParams::Shared(p)).unwrap();
        lbc_closed_form(&xstate_view(&rho, spec).unwrap()).unwrap()
    }

    #[test]
    fn initial_ghz_has_unit_lbc() {
        let spec = GhzSpec::maximally_entangled(3, "000").unwrap();
        let report = lbc_closed_form(&xstate_view(&ghz_density(&spec), &spec).unwrap()).unwrap();
        assert!(report.concurrences().iter().all(|&c| (c - 1.0).abs() < 1e-15));
        assert!((report.total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn partial_amplitude_damping() {
        let spec = GhzSpec::maximally_entangled(3, "000").unwrap();
        let cfg = NoiseConfig::uniform(3, ChannelKind::AmplitudeDamping, [1, 2]).unwrap();
        let report = closed_form(&spec, &cfg, 0.5);
        assert!(report.concurrences().iter().all(|&c| (c - 0.5).abs() < 1e-15));
        assert!((report.total - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sudden_death_region() {
        let spec = GhzSpec::real(3, 0.2f64.sqrt(), 0.8f64.sqrt(), "000").unwrap();
        let cfg = NoiseConfig::uniform(3, ChannelKind::AmplitudeDamping, 1..=3).unwrap();
        let rho = evolve(&ghz_density(&spec), &cfg, &EvolveParams::Shared(0.7)).unwrap();
        let view = xstate_view(&rho, &spec).unwrap();
        assert!((view.d.norm() - 0.4 * 0.3f64.powf(1.5)).abs() < 1e-15);
        let report = lbc_closed_form(&view).unwrap();
        assert_eq!(report.total, 0.0);
    }

    #[test]
    fn depolarizing_partial_values() {
        let spec = GhzSpec::maximally_entangled(3, "000").unwrap();
        let cfg = NoiseConfig::uniform(3, ChannelKind::Depolarizing, [1, 2]).unwrap();
        let report = closed_form(&spec, &cfg, 0.5);
        let c = report.concurrences();
        // Blocks {1}, {1,2}, {1,3}.
        for (got, want) in c.iter().zip([0.0625, 0.1875, 0.0625]) {
            assert!((got - want).abs() < 1e-15, "{got} vs {want}");
        }
        let want = ((2.0 * 0.0625f64.powi(2) + 0.1875f64.powi(2)) / 3.0).sqrt();
        assert!((report.total - want).abs() < 1e-15);
    }

    #[test]
    fn total_matches_stored_bipartition_values() {
        let spec = GhzSpec::real(4, 0.6, 0.8, "0110").unwrap();
        let cfg = NoiseConfig::uniform(4, ChannelKind::Depolarizing, [2, 4]).unwrap();
        let report = closed_form(&spec, &cfg, 0.35);
        let again = total_from_bipartitions(report.concurrences());
        assert!((again - report.total).abs() < 1e-12);
    }
}
