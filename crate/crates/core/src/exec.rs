//! Execution strategy for the batch and product loops.
//!
//! With the `parallel` feature the [`Strategy::Parallel`] variant fans work out
//! over rayon's global pool. Without it, `Parallel` silently runs sequentially so
//! callers never need their own `cfg` switches.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    Sequential,
    #[default]
    Parallel,
}

impl Strategy {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Strategy::Parallel
    }
}

/// Order-preserving map over a slice.
pub fn map<T, U, F>(items: &[T], strategy: Strategy, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = strategy;
    items.iter().map(f).collect()
}

/// Order-preserving map over an index range.
pub fn map_range<U, F>(n: usize, strategy: Strategy, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if strategy.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = strategy;
    (0..n).map(f).collect()
}

/// Factors per chunk of [`ordered_product`].
pub const PRODUCT_CHUNK: usize = 256;

/// Ordered product `f(n-1) * ... * f(1) * f(0)`: later indices multiply on the
/// left. Both strategies group the factors into the same fixed chunks, so the
/// result is bit-identical whichever one runs.
pub fn ordered_product<M, F>(n: usize, identity: M, strategy: Strategy, f: F) -> M
where
    M: Send + Sync + Clone,
    for<'a> &'a M: std::ops::Mul<&'a M, Output = M>,
    F: Fn(usize) -> M + Sync + Send,
{
    let chunk = |c: usize| {
        let end = ((c + 1) * PRODUCT_CHUNK).min(n);
        (c * PRODUCT_CHUNK..end)
            .map(&f)
            .fold(identity.clone(), |acc, next| &next * &acc)
    };
    let chunks = map_range(n.div_ceil(PRODUCT_CHUNK), strategy, chunk);
    chunks
        .iter()
        .fold(identity.clone(), |acc, next| next * &acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix2;

    #[test]
    fn product_is_left_ordered_in_both_strategies() {
        let m = |k: usize| Matrix2::new(1.0, (k % 7) as f64, 0.0, 1.0 + 1e-3 * (k % 5) as f64);
        for n in [37, 1000] {
            let expected = (0..n).fold(Matrix2::identity(), |acc, k| m(k) * acc);
            let seq = ordered_product(n, Matrix2::identity(), Strategy::Sequential, m);
            let par = ordered_product(n, Matrix2::identity(), Strategy::Parallel, m);
            assert_eq!(seq, par);
            assert!((seq - expected).norm() <= 1e-9 * expected.norm());
        }
    }

    #[test]
    fn map_preserves_order() {
        let xs: Vec<usize> = (0..100).collect();
        assert_eq!(
            map(&xs, Strategy::Parallel, |x| x * 2),
            map(&xs, Strategy::Sequential, |x| x * 2)
        );
    }
}
