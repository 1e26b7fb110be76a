//! Ordered map over independent work items.
//!
//! With the `parallel` feature the map runs on a rayon pool of the requested
//! width; without it (or with `jobs == 1`) it runs sequentially. Output order
//! always matches input order.

pub fn map_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_parallel<T, R, F>(items: &[T], jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    let run = || items.par_iter().map(&f).collect();
    if jobs == 0 {
        return run();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(run),
        Err(err) => {
            log::warn!("falling back to the global rayon pool: {err}");
            run()
        }
    }
}

/// Maps `f` over `items` with at most `jobs` workers (`0` = all cores).
pub fn map_ordered<T, R, F>(items: &[T], jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if jobs != 1 {
            return map_parallel(items, jobs, f);
        }
    }
    let _ = jobs;
    map_sequential(items, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = map_ordered(&items, 1, |x| x * x);
        let par = map_ordered(&items, 4, |x| x * x);
        assert_eq!(seq, par);
        assert_eq!(par[999], 999 * 999);
    }
}
