//! Execution-mode plumbing for data-parallel loops.
//!
//! Homology computations split into independent internal degrees, and the
//! acceptance-style parameter sweeps split into independent cells, so the
//! hot loops are expressed through [`map_indexed`]. With the `parallel`
//! feature (on by default) `ExecMode::Parallel` routes them through rayon;
//! without it every mode degrades to the sequential path, so downstream
//! code never has to care which configuration it was built in.

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExecMode {
    /// Plain in-order iteration.
    Sequential,
    /// rayon work-stealing iteration when the `parallel` feature is enabled;
    /// otherwise identical to `Sequential`.
    #[default]
    Parallel,
}

/// Maps `f` over `0..n`, in parallel when `mode` and the build allow it.
///
/// Results are returned in index order regardless of mode, so callers see
/// identical output either way.
pub fn map_indexed<T, F>(mode: ExecMode, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if mode == ExecMode::Parallel {
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    let _ = mode;
    (0..n).map(f).collect()
}

/// Fallible variant of [`map_indexed`]; the first error wins.
pub fn try_map_indexed<T, E, F>(mode: ExecMode, n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if mode == ExecMode::Parallel {
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    let _ = mode;
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let seq = map_indexed(ExecMode::Sequential, 100, |i| i * i);
        let par = map_indexed(ExecMode::Parallel, 100, |i| i * i);
        assert_eq!(seq, par);
    }

    #[test]
    fn try_map_propagates_errors() {
        let r: Result<Vec<usize>, String> =
            try_map_indexed(ExecMode::Sequential, 10, |i| {
                if i == 7 {
                    Err("seven".to_string())
                } else {
                    Ok(i)
                }
            });
        assert!(r.is_err());
    }
}
