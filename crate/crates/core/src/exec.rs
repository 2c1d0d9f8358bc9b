//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) the indexed maps fan out on the
//! current rayon pool; without it they are plain iterator loops. Both
//! paths produce identical output: results are collected in index order
//! and no reduction over floats depends on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..n`, collecting results in index order.
pub fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sequential twin of [`map_indexed`], kept available for benchmarks.
pub fn map_indexed_seq<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

/// Fill `out` chunk by chunk; `f` receives the start offset of each chunk.
pub fn fill_chunks<T, F>(out: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    {
        out.par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(ci, slice)| f(ci * chunk, slice));
    }
    #[cfg(not(feature = "parallel"))]
    {
        for (ci, slice) in out.chunks_mut(chunk).enumerate() {
            f(ci * chunk, slice);
        }
    }
}

/// Sequential twin of [`fill_chunks`].
pub fn fill_chunks_seq<T, F>(out: &mut [T], chunk: usize, f: F)
where
    F: Fn(usize, &mut [T]),
{
    let chunk = chunk.max(1);
    for (ci, slice) in out.chunks_mut(chunk).enumerate() {
        f(ci * chunk, slice);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let squares = map_indexed(100, |i| i * i);
        assert_eq!(squares, map_indexed_seq(100, |i| i * i));
    }

    #[test]
    fn chunk_fill_matches_direct() {
        let mut a = vec![0usize; 37];
        let mut b = vec![0usize; 37];
        fill_chunks(&mut a, 8, |off, s| {
            for (k, v) in s.iter_mut().enumerate() {
                *v = (off + k) * 3;
            }
        });
        fill_chunks_seq(&mut b, 8, |off, s| {
            for (k, v) in s.iter_mut().enumerate() {
                *v = (off + k) * 3;
            }
        });
        assert_eq!(a, b);
    }
}
