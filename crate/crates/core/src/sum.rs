//! Reductions whose result does not depend on the number of worker threads.

use num_complex::Complex64;
use rayon::prelude::*;

const CHUNK: usize = 512;

/// `Σ_{i<n} f(i)`: fixed-size chunks summed in parallel, chunk totals combined
/// pairwise in index order.
pub(crate) fn par_sum<F>(n: usize, f: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let partial: Vec<Complex64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n);
            (lo..hi).map(&f).sum()
        })
        .collect();
    pairwise(&partial)
}

/// As [`par_sum`] for a fallible summand; the first error in index order wins.
pub(crate) fn try_par_sum<F, E>(n: usize, f: F) -> Result<Complex64, E>
where
    F: Fn(usize) -> Result<Complex64, E> + Sync,
    E: Send,
{
    let chunks = n.div_ceil(CHUNK);
    let partial: Vec<Result<Complex64, E>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n);
            let mut acc = Complex64::new(0.0, 0.0);
            for i in lo..hi {
                acc += f(i)?;
            }
            Ok(acc)
        })
        .collect();
    let partial: Vec<Complex64> = partial.into_iter().collect::<Result<_, _>>()?;
    Ok(pairwise(&partial))
}

pub(crate) fn pairwise(xs: &[Complex64]) -> Complex64 {
    match xs.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => xs[0],
        n => pairwise(&xs[..n / 2]) + pairwise(&xs[n / 2..]),
    }
}
