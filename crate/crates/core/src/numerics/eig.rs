use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricSpectrum {
    /// Non-decreasing.
    pub eigenvalues: Vec<f64>,
}

impl SymmetricSpectrum {
    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }
}

pub fn sym_eigvals(m: &DMatrix<f64>) -> Result<SymmetricSpectrum> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(invalid("matrix is not square"));
    }
    for j in 0..n {
        for i in 0..j {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-10 {
                return Err(invalid(format!("matrix not symmetric at ({i},{j})")));
            }
        }
    }
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    Ok(SymmetricSpectrum { eigenvalues: ev })
}
