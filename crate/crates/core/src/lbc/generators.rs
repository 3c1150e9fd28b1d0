use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Generator of SO(d) for the index pair `i < j`: `+1` at `(i, j)`, `-1` at `(j, i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SoGenerator {
    pub i: usize,
    pub j: usize,
}

impl SoGenerator {
    pub fn to_matrix(self, dim: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(dim, dim);
        m[(self.i, self.j)] = 1.0;
        m[(self.j, self.i)] = -1.0;
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SoGeneratorSet {
    pub dim: usize,
    pub generators: Vec<SoGenerator>,
}

impl SoGeneratorSet {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn matrices(&self) -> Vec<DMatrix<f64>> {
        self.generators.iter().map(|g| g.to_matrix(self.dim)).collect()
    }
}

/// The `d(d-1)/2` generators of SO(d), ordered lexicographically by `(i, j)`.
pub fn so_generators(d: usize) -> Result<SoGeneratorSet> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    let generators = (0..d).flat_map(|i| (i + 1..d).map(move |j| SoGenerator { i, j })).collect();
    Ok(SoGeneratorSet { dim: d, generators })
}
