//! Brute-force LBC: every bipartition, every pair of SO generators.
//!
//! For `M = L1 (x) L2` (real symmetric, since both factors are antisymmetric) the
//! eigenvalues `lambda_i` of `rho M rho* M` satisfy `sqrt(lambda_i) = sigma_i(A)` with
//! `A = sqrt(rho) M sqrt(rho)*`. `M` has four nonzero entries, so `A = X S Y` with
//! `X` (d x 4) the selected columns of `sqrt(rho)` and `Y` (4 x d) the selected rows of
//! its conjugate. Thin QR factorizations `X = Qx Rx`, `Y^dag = Qy Ry` reduce the SVD
//! of `A` to that of the 4 x 4 core `Rx S Ry^dag`.

use nalgebra::{DMatrix, Matrix4, SymmetricEigen};
use num_complex::Complex64;

use super::{
    bipartitions, so_generators, Bipartition, BipartitionConcurrence, GeneratorTerm, LbcMethod, LbcReport, SoGenerator,
};
use crate::error::{Error, Result};
use crate::state::DensityMatrix;

/// Default qubit cap for the spectral route.
pub const DEFAULT_QUBIT_CAP: usize = 6;
/// Eigenvalues of `rho` in `[-NEGATIVE_CLAMP, 0)` are treated as zero.
const NEGATIVE_CLAMP: f64 = 1e-12;
/// Eigenvalues of `rho` at or below this level are roundoff in the null space.
const EIGEN_FLOOR: f64 = 1e-14;
/// Generator terms above this value are kept in the breakdown.
const TERM_REPORT_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Principal square root of a Hermitian positive semidefinite matrix.
pub fn hermitian_sqrt(rho: &DensityMatrix) -> Result<DMatrix<Complex64>> {
    let herm = (rho.entries() + rho.entries().adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let dim = rho.dim();
    let mut roots = Vec::with_capacity(dim);
    for &mu in eig.eigenvalues.iter() {
        if mu < -NEGATIVE_CLAMP {
            return Err(Error::NumericalFailure(format!("density matrix eigenvalue {mu:e} is negative")));
        }
        roots.push(if mu <= EIGEN_FLOOR { 0.0 } else { mu.sqrt() });
    }
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (mut col, &s) in scaled.column_iter_mut().zip(&roots) {
        col *= Complex64::new(s, 0.0);
    }
    Ok(scaled * v.adjoint())
}

/// Relabels basis indices so qubits appear in `order` (first entry most significant).
fn permutation(n_qubits: usize, order: &[usize]) -> Vec<usize> {
    (0..1usize << n_qubits)
        .map(|old| order.iter().fold(0usize, |acc, &q| (acc << 1) | ((old >> (n_qubits - q)) & 1)))
        .collect()
}

fn permute(m: &DMatrix<Complex64>, perm: &[usize]) -> DMatrix<Complex64> {
    let dim = m.nrows();
    let mut out = DMatrix::from_element(dim, dim, ZERO);
    for c in 0..dim {
        for r in 0..dim {
            out[(perm[r], perm[c])] = m[(r, c)];
        }
    }
    out
}

/// Nonzero entries `(row, col, sign)` of `L1 (x) L2`, with `L2` acting on a `d2`-dimensional factor.
fn tensor_entries(l1: SoGenerator, l2: SoGenerator, d2: usize) -> [(usize, usize, f64); 4] {
    let idx = |a: usize, b: usize| a * d2 + b;
    [
        (idx(l1.i, l2.i), idx(l1.j, l2.j), 1.0),
        (idx(l1.i, l2.j), idx(l1.j, l2.i), -1.0),
        (idx(l1.j, l2.i), idx(l1.i, l2.j), -1.0),
        (idx(l1.j, l2.j), idx(l1.i, l2.i), 1.0),
    ]
}

/// Decreasingly sorted `sqrt(lambda_i)` for `M` given by its nonzero entries.
fn sqrt_lambdas(sqrt_rho: &DMatrix<Complex64>, entries: &[(usize, usize, f64); 4]) -> Vec<f64> {
    let dim = sqrt_rho.nrows();
    let mut x = DMatrix::from_element(dim, 4, ZERO);
    let mut y_adj = DMatrix::from_element(dim, 4, ZERO);
    for (e, &(r, c, _)) in entries.iter().enumerate() {
        x.set_column(e, &sqrt_rho.column(r));
        // Y row e = conj(sqrt_rho row c); its adjoint column is the transpose of that row.
        for k in 0..dim {
            y_adj[(k, e)] = sqrt_rho[(c, k)];
        }
    }
    let rx = x.qr().r();
    let ry = y_adj.qr().r();
    let signs = Matrix4::from_diagonal(&nalgebra::Vector4::from_iterator(
        entries.iter().map(|&(_, _, s)| Complex64::new(s, 0.0)),
    ));
    let rx4 = Matrix4::from_iterator(rx.iter().copied());
    let ry4 = Matrix4::from_iterator(ry.iter().copied());
    let core = rx4 * signs * ry4.adjoint();
    let mut sv: Vec<f64> = core.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

fn concurrence_from_entries(sqrt_rho: &DMatrix<Complex64>, entries: &[(usize, usize, f64); 4]) -> f64 {
    let sv = sqrt_lambdas(sqrt_rho, entries);
    (sv[0] - sv[1..].iter().sum::<f64>()).max(0.0)
}

/// `max{0, sqrt(l_1) - sum_{i>1} sqrt(l_i)}` for one generator pair.
///
/// `sqrt_rho` must already be ordered so the first block's qubits are most significant;
/// `d2` is the dimension of the second block.
pub fn generator_pair_concurrence(sqrt_rho: &DMatrix<Complex64>, l1: SoGenerator, l2: SoGenerator, d2: usize) -> f64 {
    concurrence_from_entries(sqrt_rho, &tensor_entries(l1, l2, d2))
}

/// Spectral LBC with the default qubit cap.
pub fn lbc_spectral(rho: &DensityMatrix) -> Result<LbcReport> {
    lbc_spectral_with_cap(rho, DEFAULT_QUBIT_CAP)
}

pub fn lbc_spectral_with_cap(rho: &DensityMatrix, cap: usize) -> Result<LbcReport> {
    let n = rho.n_qubits();
    if n > cap {
        return Err(Error::QubitCapExceeded { n_qubits: n, cap });
    }
    let sqrt_rho = hermitian_sqrt(rho)?;
    let mut per_bipartition = Vec::new();
    let mut terms = Vec::new();
    for part in bipartitions(n)? {
        let (part_sum, part_terms) = bipartition_terms(&sqrt_rho, &part)?;
        per_bipartition.push(BipartitionConcurrence { bipartition: part, concurrence: part_sum.sqrt() });
        terms.extend(part_terms);
    }
    Ok(LbcReport::from_bipartitions(per_bipartition, Some(terms), LbcMethod::Spectral))
}

/// Sum of squared generator-pair terms for one bipartition, plus the nonzero terms.
fn bipartition_terms(sqrt_rho: &DMatrix<Complex64>, part: &Bipartition) -> Result<(f64, Vec<GeneratorTerm>)> {
    let n = part.n_qubits();
    let k = part.size();
    let d1 = 1usize << k;
    let d2 = 1usize << (n - k);
    let ordered = permute(sqrt_rho, &permutation(n, &part.ordering()));
    let gens1 = so_generators(d1)?;
    let gens2 = so_generators(d2)?;
    let mut sum = 0.0;
    let mut terms = Vec::new();
    for &l1 in &gens1.generators {
        for &l2 in &gens2.generators {
            let value = generator_pair_concurrence(&ordered, l1, l2, d2);
            sum += value * value;
            if value > TERM_REPORT_TOL {
                terms.push(GeneratorTerm { bipartition: part.clone(), l1, l2, value });
            }
        }
    }
    Ok((sum, terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{evolve, ChannelKind, EvolveParams, NoiseConfig};
    use crate::lbc::lbc_closed_form;
    use crate::state::{ghz_density, xstate_view, GhzSpec};

    fn dense_tensor(l1: SoGenerator, l2: SoGenerator, d1: usize, d2: usize) -> DMatrix<Complex64> {
        l1.to_matrix(d1).kronecker(&l2.to_matrix(d2)).map(|v| Complex64::new(v, 0.0))
    }

    #[test]
    fn tensor_entries_match_kronecker() {
        let (d1, d2) = (4, 2);
        for &l1 in &so_generators(d1).unwrap().generators {
            for &l2 in &so_generators(d2).unwrap().generators {
                let dense = dense_tensor(l1, l2, d1, d2);
                let mut sparse = DMatrix::from_element(d1 * d2, d1 * d2, ZERO);
                for (r, c, s) in tensor_entries(l1, l2, d2) {
                    sparse[(r, c)] += Complex64::new(s, 0.0);
                }
                assert_eq!(dense, sparse);
                assert_eq!(dense.transpose(), dense);
            }
        }
    }

    #[test]
    fn core_svd_matches_dense_svd() {
        let spec = GhzSpec::new(3, Complex64::from_polar(0.6, 0.4), Complex64::new(0.8, 0.0), "010").unwrap();
        let cfg = NoiseConfig::uniform(3, ChannelKind::AmplitudeDamping, 1..=3).unwrap();
        let rho = evolve(&ghz_density(&spec), &cfg, &EvolveParams::Shared(0.35)).unwrap();
        let s = hermitian_sqrt(&rho).unwrap();
        for &l1 in &so_generators(2).unwrap().generators {
            for &l2 in &so_generators(4).unwrap().generators {
                let m = dense_tensor(l1, l2, 2, 4);
                let a = &s * &m * s.map(|z| z.conj());
                let mut dense: Vec<f64> = a.singular_values().iter().copied().collect();
                dense.sort_by(|x, y| y.total_cmp(x));
                let core = sqrt_lambdas(&s, &tensor_entries(l1, l2, 4));
                for (i, &v) in dense.iter().enumerate() {
                    let c = core.get(i).copied().unwrap_or(0.0);
                    assert!((v - c).abs() < 1e-12, "sv {i}: dense {v} core {c}");
                }
            }
        }
    }

    #[test]
    fn square_root_squares_back() {
        let spec = GhzSpec::new(3, Complex64::from_polar(0.6, 0.4), Complex64::new(0.8, 0.0), "001").unwrap();
        let cfg = NoiseConfig::uniform(3, ChannelKind::Depolarizing, [1, 3]).unwrap();
        let rho = evolve(&ghz_density(&spec), &cfg, &EvolveParams::Shared(0.4)).unwrap();
        let s = hermitian_sqrt(&rho).unwrap();
        assert!((&s * &s - rho.entries()).norm() < 1e-12);
    }

    #[test]
    fn negative_spectrum_is_a_failure() {
        let mut m = DMatrix::from_element(4, 4, ZERO);
        m[(0, 0)] = Complex64::new(1.1, 0.0);
        m[(1, 1)] = Complex64::new(-0.1, 0.0);
        let rho = DensityMatrix::new(2, m).unwrap();
        assert!(matches!(lbc_spectral(&rho), Err(Error::NumericalFailure(_))));
    }

    #[test]
    fn cap_is_enforced() {
        let rho = DensityMatrix::basis_projector(&[false; 5]);
        assert!(matches!(lbc_spectral_with_cap(&rho, 4), Err(Error::QubitCapExceeded { n_qubits: 5, cap: 4 })));
    }

    #[test]
    fn product_states_vanish() {
        for bits in [[false, false, false], [true, false, true], [true, true, true]] {
            let report = lbc_spectral(&DensityMatrix::basis_projector(&bits)).unwrap();
            assert_eq!(report.total, 0.0);
        }
    }

    #[test]
    fn initial_ghz_each_bipartition_is_one() {
        let spec = GhzSpec::maximally_entangled(3, "000").unwrap();
        let report = lbc_spectral(&ghz_density(&spec)).unwrap();
        for c in report.concurrences() {
            assert!((c - 1.0).abs() < 1e-12, "{c}");
        }
        assert!((report.total - 1.0).abs() < 1e-12);
        // Exactly one generator pair contributes per bipartition.
        assert_eq!(report.per_generator_terms.as_ref().unwrap().len(), 3);
    }

    #[test]
    fn generator_sign_flip_is_invisible() {
        let spec = GhzSpec::new(3, Complex64::from_polar(0.6, 1.3), Complex64::new(0.8, 0.0), "000").unwrap();
        let cfg = NoiseConfig::uniform(3, ChannelKind::AmplitudeDamping, 1..=3).unwrap();
        let rho = evolve(&ghz_density(&spec), &cfg, &EvolveParams::Shared(0.2)).unwrap();
        let s = hermitian_sqrt(&rho).unwrap();
        for &l1 in &so_generators(2).unwrap().generators {
            for &l2 in &so_generators(4).unwrap().generators {
                let entries = tensor_entries(l1, l2, 4);
                let flipped = entries.map(|(r, c, sign)| (r, c, -sign));
                assert_eq!(concurrence_from_entries(&s, &entries), concurrence_from_entries(&s, &flipped));
            }
        }
    }

    #[test]
    fn depolarizing_two_of_three_agrees_with_closed_form() {
        let spec = GhzSpec::maximally_entangled(3, "000").unwrap();
        let cfg = NoiseConfig::uniform(3, ChannelKind::Depolarizing, [1, 2]).unwrap();
        let rho = evolve(&ghz_density(&spec), &cfg, &EvolveParams::Shared(0.5)).unwrap();
        let spectral = lbc_spectral(&rho).unwrap();
        for (got, want) in spectral.concurrences().iter().zip([0.0625, 0.1875, 0.0625]) {
            assert!((got - want).abs() < 1e-8, "{got} vs {want}");
        }
        let closed = lbc_closed_form(&xstate_view(&rho, &spec).unwrap()).unwrap();
        assert!((spectral.total - closed.total).abs() < 1e-8);
        assert!((spectral.total - 0.11967).abs() < 1e-5);
    }
}
