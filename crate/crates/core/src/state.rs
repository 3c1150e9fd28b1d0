//! N-qubit density operators, GHZ initial states and the X-state element view.
//!
//! Basis convention: qubit 1 is the most significant bit, so the bit string
//! `b_1 b_2 ... b_N` maps to the row/column index `sum_j b_j 2^(N-j)`.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Normalization tolerance for GHZ amplitudes.
pub const NORM_TOL: f64 = 1e-12;
/// Largest off-diagonal magnitude tolerated outside the GHZ coherence pair.
pub const STRUCTURE_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Bit position (shift from the least significant end) of 1-based qubit `qubit`.
#[inline]
pub(crate) fn qubit_shift(n_qubits: usize, qubit: usize) -> usize {
    n_qubits - qubit
}

/// Parameters of `alpha |i_1..i_N> + beta |~i_1..~i_N>`.
#[derive(Debug, Clone, PartialEq)]
pub struct GhzSpec {
    n_qubits: usize,
    alpha: Complex64,
    beta: Complex64,
    pattern: Vec<bool>,
}

impl GhzSpec {
    pub fn new(n_qubits: usize, alpha: Complex64, beta: Complex64, pattern: &str) -> Result<Self> {
        if n_qubits < 2 {
            return Err(Error::TooFewQubits { min: 2, found: n_qubits });
        }
        let bits = pattern
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidPatternSymbol(other)),
            })
            .collect::<Result<Vec<_>>>()?;
        if bits.len() != n_qubits {
            return Err(Error::PatternLengthMismatch { expected: n_qubits, found: bits.len() });
        }
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NormViolation(norm));
        }
        Ok(Self { n_qubits, alpha, beta, pattern: bits })
    }

    /// Real, nonnegative amplitudes `alpha = cos(theta)`, `beta = sin(theta)` style helper.
    pub fn real(n_qubits: usize, alpha: f64, beta: f64, pattern: &str) -> Result<Self> {
        Self::new(n_qubits, Complex64::new(alpha, 0.0), Complex64::new(beta, 0.0), pattern)
    }

    /// Equal-weight GHZ state `(|i> + |~i>)/sqrt(2)`.
    pub fn maximally_entangled(n_qubits: usize, pattern: &str) -> Result<Self> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::real(n_qubits, h, h, pattern)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// The pattern as a `0`/`1` string, qubit 1 first.
    pub fn pattern(&self) -> String {
        self.pattern.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn pattern_bits(&self) -> &[bool] {
        &self.pattern
    }

    /// True when every qubit carries the same bit (`00..0` or `11..1`).
    pub fn is_symmetric(&self) -> bool {
        self.pattern.iter().all(|&b| b == self.pattern[0])
    }

    /// Basis index `x` of `|i_1 .. i_N>`.
    pub fn index(&self) -> usize {
        self.pattern.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b))
    }

    /// Basis index of the complementary string.
    pub fn complement_index(&self) -> usize {
        self.index() ^ ((1usize << self.n_qubits) - 1)
    }

    /// Initial coherence magnitude `|alpha beta|`.
    pub fn coherence_magnitude(&self) -> f64 {
        (self.alpha * self.beta).norm()
    }

    /// Initial LBC `2 |alpha beta|`.
    pub fn initial_lbc(&self) -> f64 {
        2.0 * self.coherence_magnitude()
    }

    /// Same pattern and qubit count with different amplitudes.
    pub fn with_amplitudes(&self, alpha: Complex64, beta: Complex64) -> Result<Self> {
        Self::new(self.n_qubits, alpha, beta, &self.pattern())
    }
}

/// Dense `2^N x 2^N` complex density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Wraps a matrix, checking only that its shape is `2^N x 2^N`.
    pub fn new(n_qubits: usize, entries: DMatrix<Complex64>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::DimensionMismatch { n_qubits, found: entries.nrows().max(entries.ncols()) });
        }
        Ok(Self { n_qubits, entries })
    }

    pub fn zeros(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self { n_qubits, entries: DMatrix::from_element(dim, dim, ZERO) }
    }

    /// Projector onto the computational basis state `bits` (qubit 1 first).
    pub fn basis_projector(bits: &[bool]) -> Self {
        let n = bits.len();
        let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b));
        let mut rho = Self::zeros(n);
        rho.entries[(idx, idx)] = Complex64::new(1.0, 0.0);
        rho
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// Largest `|rho[r][c] - conj(rho[c][r])|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in r..dim {
                let dev = (self.entries[(r, c)] - self.entries[(c, r)].conj()).norm();
                worst = worst.max(dev);
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.entries.iter().zip(other.entries.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            self.entries.row_iter().map(|row| row.iter().map(f).collect()).collect()
        };
        let mut s = serializer.serialize_struct("DensityMatrix", 3)?;
        s.serialize_field("n_qubits", &self.n_qubits)?;
        s.serialize_field("re", &rows(|z| z.re))?;
        s.serialize_field("im", &rows(|z| z.im))?;
        s.end()
    }
}

/// `|Psi0><Psi0|` for the given GHZ amplitudes and pattern.
pub fn ghz_density(spec: &GhzSpec) -> DensityMatrix {
    let x = spec.index();
    let xc = spec.complement_index();
    let (alpha, beta) = (spec.alpha, spec.beta);
    let mut rho = DensityMatrix::zeros(spec.n_qubits);
    rho.entries[(x, x)] = Complex64::new(alpha.norm_sqr(), 0.0);
    rho.entries[(xc, xc)] = Complex64::new(beta.norm_sqr(), 0.0);
    rho.entries[(x, xc)] = alpha * beta.conj();
    rho.entries[(xc, x)] = alpha.conj() * beta;
    rho
}

/// Diagonal pairs and surviving coherence of an X-structured GHZ evolution.
///
/// `a[k-1]` sits at index `k-1` and `b[k-1]` at its bit complement `2^N - k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XStateView {
    pub n_qubits: usize,
    /// 1-based pair index of the initial GHZ pair, always addressing the a-side.
    pub m: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub d: Complex64,
}

impl XStateView {
    /// Diagonal entry at basis `index`.
    pub fn diagonal(&self, index: usize) -> f64 {
        let half = 1usize << (self.n_qubits - 1);
        if index < half {
            self.a[index]
        } else {
            self.b[(1usize << self.n_qubits) - 1 - index]
        }
    }

    /// `(a_k, b_k)` for 1-based pair index `k`.
    pub fn pair(&self, k: usize) -> (f64, f64) {
        (self.a[k - 1], self.b[k - 1])
    }

    /// Rebuilds the dense matrix described by this view.
    pub fn to_density(&self) -> DensityMatrix {
        let dim = 1usize << self.n_qubits;
        let mut rho = DensityMatrix::zeros(self.n_qubits);
        for (k, (&a, &b)) in self.a.iter().zip(&self.b).enumerate() {
            rho.entries[(k, k)] = Complex64::new(a, 0.0);
            rho.entries[(dim - 1 - k, dim - 1 - k)] = Complex64::new(b, 0.0);
        }
        let lo = self.m - 1;
        let hi = dim - self.m;
        rho.entries[(lo, hi)] = self.d;
        rho.entries[(hi, lo)] = self.d.conj();
        rho
    }
}

/// Reads the a/b/d labeling off an evolved GHZ density matrix.
pub fn xstate_view(rho: &DensityMatrix, spec: &GhzSpec) -> Result<XStateView> {
    if rho.n_qubits != spec.n_qubits {
        return Err(Error::ConfigMismatch(format!(
            "state has {} qubits, GHZ spec has {}",
            rho.n_qubits, spec.n_qubits
        )));
    }
    let dim = rho.dim();
    let x = spec.index();
    let xc = spec.complement_index();
    let (lo, hi) = (x.min(xc), x.max(xc));
    for r in 0..dim {
        for c in 0..dim {
            if r == c || (r == lo && c == hi) || (r == hi && c == lo) {
                continue;
            }
            let magnitude = rho.entries[(r, c)].norm();
            if magnitude > STRUCTURE_TOL {
                return Err(Error::NotXStructured { row: r, col: c, magnitude });
            }
        }
    }
    let half = dim / 2;
    let a = (0..half).map(|k| rho.entries[(k, k)].re).collect();
    let b = (0..half).map(|k| rho.entries[(dim - 1 - k, dim - 1 - k)].re).collect();
    Ok(XStateView { n_qubits: rho.n_qubits, m: lo + 1, a, b, d: rho.entries[(lo, hi)] })
}

/// Partial trace onto the single 1-based qubit `qubit`.
pub fn reduced_state(rho: &DensityMatrix, qubit: usize) -> Result<Matrix2<Complex64>> {
    let n = rho.n_qubits;
    if qubit == 0 || qubit > n {
        return Err(Error::IndexOutOfRange { index: qubit, n_qubits: n });
    }
    let shift = qubit_shift(n, qubit);
    let mut out = Matrix2::from_element(ZERO);
    for r in 0..rho.dim() {
        let br = (r >> shift) & 1;
        // Only environment-diagonal entries survive the trace.
        for bc in 0..2 {
            let c = (r & !(1 << shift)) | (bc << shift);
            out[(br, bc)] += rho.entries[(r, c)];
        }
    }
    Ok(out)
}

/// Outcome of the Hermitian / unit-trace / PSD checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub hermiticity_deviation: f64,
    pub trace_deviation: f64,
    pub min_eigenvalue: f64,
    pub tol: f64,
    pub passed: bool,
}

impl ValidationReport {
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.hermiticity_deviation > self.tol {
            out.push("hermiticity");
        }
        if self.trace_deviation > self.tol {
            out.push("trace");
        }
        if self.min_eigenvalue < -self.tol {
            out.push("positivity");
        }
        out
    }
}

pub fn validate_density(rho: &DensityMatrix, tol: f64) -> ValidationReport {
    let hermiticity_deviation = rho.hermiticity_deviation();
    let trace_deviation = (rho.trace() - Complex64::new(1.0, 0.0)).norm();
    let min_eigenvalue = rho.min_eigenvalue();
    let passed = hermiticity_deviation <= tol && trace_deviation <= tol && min_eigenvalue >= -tol;
    ValidationReport { hermiticity_deviation, trace_deviation, min_eigenvalue, tol, passed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2 as H;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn product_state_from_trivial_ghz() {
        let spec = GhzSpec::real(2, 1.0, 0.0, "00").unwrap();
        let rho = ghz_density(&spec);
        for r in 0..4 {
            for col in 0..4 {
                let want = if r == 0 && col == 0 { 1.0 } else { 0.0 };
                assert_eq!(rho.get(r, col), c(want));
            }
        }
    }

    #[test]
    fn three_qubit_ghz_entries() {
        for (pattern, x, xc) in [("000", 0, 7), ("001", 1, 6)] {
            let rho = ghz_density(&GhzSpec::real(3, H, H, pattern).unwrap());
            for r in 0..8 {
                for col in 0..8 {
                    let on = [(x, x), (xc, xc), (x, xc), (xc, x)].contains(&(r, col));
                    let want = if on { 0.5 } else { 0.0 };
                    assert!((rho.get(r, col) - c(want)).norm() < 1e-15, "{pattern} ({r},{col})");
                }
            }
        }
    }

    #[test]
    fn complex_amplitudes_place_conjugates() {
        let alpha = Complex64::from_polar(0.6, 0.3);
        let beta = Complex64::from_polar(0.8, -1.1);
        let spec = GhzSpec::new(3, alpha, beta, "010").unwrap();
        let rho = ghz_density(&spec);
        assert_eq!(rho.get(2, 5), alpha * beta.conj());
        assert_eq!(rho.get(5, 2), alpha.conj() * beta);
    }

    #[test]
    fn spec_rejects_bad_input() {
        assert!(matches!(GhzSpec::real(3, 0.5, 0.5, "000"), Err(Error::NormViolation(_))));
        assert!(matches!(GhzSpec::real(3, H, H, "00"), Err(Error::PatternLengthMismatch { expected: 3, found: 2 })));
        assert!(matches!(GhzSpec::real(2, H, H, "0a"), Err(Error::InvalidPatternSymbol('a'))));
        assert!(matches!(GhzSpec::real(1, H, H, "0"), Err(Error::TooFewQubits { .. })));
    }

    #[test]
    fn view_of_initial_state() {
        let spec = GhzSpec::maximally_entangled(3, "000").unwrap();
        let view = xstate_view(&ghz_density(&spec), &spec).unwrap();
        assert_eq!(view.m, 1);
        assert!((view.a[0] - 0.5).abs() < 1e-15 && (view.b[0] - 0.5).abs() < 1e-15);
        assert!(view.a[1..].iter().chain(&view.b[1..]).all(|&v| v == 0.0));
        assert!((view.d - c(0.5)).norm() < 1e-15);
    }

    #[test]
    fn view_round_trips_ghz() {
        for pattern in ["000", "001", "110", "0101"] {
            let n = pattern.len();
            let spec = GhzSpec::new(n, Complex64::from_polar(0.6, 1.0), Complex64::new(0.8, 0.0), pattern).unwrap();
            let rho = ghz_density(&spec);
            let view = xstate_view(&rho, &spec).unwrap();
            assert_eq!(view.to_density(), rho);
        }
    }

    #[test]
    fn pair_positions_are_complements() {
        let view = xstate_view(
            &ghz_density(&GhzSpec::maximally_entangled(4, "0000").unwrap()),
            &GhzSpec::maximally_entangled(4, "0000").unwrap(),
        )
        .unwrap();
        for k in 1..=view.a.len() {
            let a_pos = k - 1;
            let b_pos = (1usize << 4) - k;
            assert_eq!(a_pos + b_pos, 15);
            assert_eq!(a_pos ^ b_pos, 15);
        }
    }

    #[test]
    fn stray_coherence_is_rejected() {
        let spec = GhzSpec::maximally_entangled(3, "000").unwrap();
        let mut entries = ghz_density(&spec).into_entries();
        entries[(1, 2)] = c(1e-3);
        entries[(2, 1)] = c(1e-3);
        let rho = DensityMatrix::new(3, entries).unwrap();
        assert!(matches!(xstate_view(&rho, &spec), Err(Error::NotXStructured { row: 1, col: 2, .. })));
    }

    #[test]
    fn marginals() {
        let rho = ghz_density(&GhzSpec::maximally_entangled(2, "00").unwrap());
        let r1 = reduced_state(&rho, 1).unwrap();
        assert!((r1 - Matrix2::new(c(0.5), c(0.0), c(0.0), c(0.5))).norm() < 1e-15);

        let prod = DensityMatrix::basis_projector(&[false, false]);
        let r2 = reduced_state(&prod, 2).unwrap();
        assert_eq!(r2, Matrix2::new(c(1.0), c(0.0), c(0.0), c(0.0)));

        assert!(matches!(reduced_state(&prod, 0), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(reduced_state(&prod, 3), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn marginal_keeps_coherence_of_product_superposition() {
        // |+>|0>: qubit 1 marginal is |+><+|.
        let mut entries = DMatrix::from_element(4, 4, ZERO);
        for r in [0usize, 2] {
            for col in [0usize, 2] {
                entries[(r, col)] = c(0.5);
            }
        }
        let rho = DensityMatrix::new(2, entries).unwrap();
        let r1 = reduced_state(&rho, 1).unwrap();
        assert!((r1 - Matrix2::from_element(c(0.5))).norm() < 1e-15);
    }

    #[test]
    fn validation_catches_failures() {
        let spec = GhzSpec::new(3, Complex64::from_polar(0.6, 0.4), Complex64::new(0.8, 0.0), "011").unwrap();
        assert!(validate_density(&ghz_density(&spec), 1e-12).passed);

        let mut entries = DMatrix::from_element(2, 2, ZERO);
        entries[(0, 0)] = c(0.9);
        let report = validate_density(&DensityMatrix::new(1, entries).unwrap(), 1e-12);
        assert!(!report.passed);
        assert!((report.trace_deviation - 0.1).abs() < 1e-15);
        assert_eq!(report.failures(), vec!["trace"]);

        let mut entries = DMatrix::from_element(2, 2, ZERO);
        entries[(0, 0)] = c(0.5);
        entries[(1, 1)] = c(0.5);
        entries[(0, 1)] = c(1.0);
        let report = validate_density(&DensityMatrix::new(1, entries).unwrap(), 1e-12);
        assert!(!report.passed);
        assert!(report.failures().contains(&"hermiticity"));
    }

    #[test]
    fn shape_is_checked() {
        let m = DMatrix::from_element(3, 3, ZERO);
        assert!(matches!(DensityMatrix::new(2, m), Err(Error::DimensionMismatch { .. })));
    }
}
