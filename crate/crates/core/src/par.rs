//! Data-parallel helpers. With the `parallel` feature these dispatch to
//! rayon; without it they run sequentially with identical results.

/// Evaluate `f(i)` for `i in 0..n`, preserving order.
pub fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Map over a slice, preserving order.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// `out[j] = <col_j, x>` for a column-major square matrix stored in `data`.
/// For symmetric matrices this is the ordinary product.
pub fn sym_matvec(data: &[f64], n: usize, x: &[f64], out: &mut [f64]) {
    assert_eq!(data.len(), n * n);
    assert_eq!(x.len(), n);
    assert_eq!(out.len(), n);
    let dot = |j: usize| -> f64 {
        let col = &data[j * n..(j + 1) * n];
        col.iter().zip(x).map(|(a, b)| a * b).sum()
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        out.par_iter_mut().enumerate().for_each(|(j, o)| *o = dot(j));
    }
    #[cfg(not(feature = "parallel"))]
    {
        for (j, o) in out.iter_mut().enumerate() {
            *o = dot(j);
        }
    }
}

/// Whether this build runs the data-parallel paths.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
