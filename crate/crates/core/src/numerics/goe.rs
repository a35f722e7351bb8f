use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::RngStream;
use crate::error::{invalid, Result};

/// GOE(n): off-diagonal N(0, 1/n), diagonal N(0, 2/n).
///
/// Column j below the diagonal is drawn from substream j, so the result is
/// independent of the thread count.
pub fn goe_sample(n: usize, rng: &RngStream) -> Result<DMatrix<f64>> {
    if n == 0 {
        return Err(invalid("GOE dimension must be >= 1"));
    }
    let off = (1.0 / n as f64).sqrt();
    let diag = (2.0 / n as f64).sqrt();
    let mut data = vec![0.0f64; n * n];
    let fill = |j: usize, col: &mut [f64]| {
        let mut r = rng.substream(j as u64).rng();
        col[j] = diag * r.sample::<f64, _>(StandardNormal);
        for v in col.iter_mut().skip(j + 1) {
            *v = off * r.sample::<f64, _>(StandardNormal);
        }
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        data.par_chunks_mut(n).enumerate().for_each(|(j, c)| fill(j, c));
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.chunks_mut(n).enumerate().for_each(|(j, c)| fill(j, c));
    }
    for j in 0..n {
        for i in 0..j {
            data[j * n + i] = data[i * n + j];
        }
    }
    Ok(DMatrix::from_vec(n, n, data))
}
