//! Data-parallel helpers for grid scans and randomized campaigns.
//!
//! With the `parallel` feature (default) work is spread over the rayon pool;
//! without it everything runs on the calling thread. Each instance draws from
//! its own ChaCha stream keyed by `(seed, index)`, so results do not depend on
//! scheduling or on the feature.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn instance_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

/// Sizes the global pool. Only the first call has an effect.
pub fn configure_threads(n: usize) -> Result<(), String> {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
        Ok(())
    }
}

pub fn map_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_parallel<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

/// Order-preserving map, parallel when the feature is enabled.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_parallel(items, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_sequential(items, f)
    }
}

pub fn run_sequential<R, F>(seed: u64, count: usize, f: F) -> Vec<R>
where
    F: Fn(usize, &mut ChaCha8Rng) -> R,
{
    (0..count)
        .map(|i| f(i, &mut instance_rng(seed, i)))
        .collect()
}

#[cfg(feature = "parallel")]
pub fn run_parallel<R, F>(seed: u64, count: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> R + Sync + Send,
{
    use rayon::prelude::*;
    (0..count)
        .into_par_iter()
        .map(|i| f(i, &mut instance_rng(seed, i)))
        .collect()
}

/// Runs `count` seeded instances, results in index order.
pub fn run<R, F>(seed: u64, count: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        run_parallel(seed, count, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_sequential(seed, count, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_independent_of_execution_order() {
        let a = run_sequential(9, 50, |_, rng| rng.random::<u64>());
        let b = run(9, 50, |_, rng| rng.random::<u64>());
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn map_preserves_order() {
        let xs: Vec<usize> = (0..100).collect();
        assert_eq!(map(&xs, |x| x * 2), map_sequential(&xs, |x| x * 2));
    }
}
