//! Order-preserving parallel map over trial indices.

/// Evaluate `f(0..count)` on `workers` threads, returning results in index
/// order. Output never depends on the worker count.
#[cfg(feature = "parallel")]
pub fn par_map<T, F>(workers: usize, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if workers <= 1 || count <= 1 {
        return (0..count).map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| (0..count).into_par_iter().map(&f).collect()),
        Err(_) => (0..count).map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<T, F>(_workers: usize, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..count).map(f).collect()
}

/// Worker count from `PLURIZERO_WORKERS`, defaulting to 1.
pub fn default_workers() -> usize {
    std::env::var("PLURIZERO_WORKERS").ok().and_then(|s| s.trim().parse().ok()).filter(|&w: &usize| w > 0).unwrap_or(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_preserved() {
        let a = par_map(1, 100, |i| i * i);
        let b = par_map(7, 100, |i| i * i);
        assert_eq!(a, b);
    }
}
