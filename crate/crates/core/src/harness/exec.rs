//! Trial execution. Trials are independent, so they can be mapped in
//! parallel; results always come back in trial order, which keeps every
//! aggregate independent of scheduling.

/// How trials are dispatched.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    /// Rayon work-stealing pool when the `parallel` feature is enabled,
    /// otherwise the same as `Sequential`.
    #[default]
    Parallel,
    Sequential,
}

/// `f(0), …, f(n − 1)` in order.
pub fn map_trials<T, F>(n: usize, mode: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        Execution::Parallel => par_map(n, f),
        Execution::Sequential => (0..n).map(f).collect(),
    }
}

#[cfg(feature = "parallel")]
fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Index and value of the smallest entry; ties go to the lowest index.
/// NaN entries are ignored unless every entry is NaN.
pub fn argmin(values: &[f64]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            None => best = Some((i, v)),
            Some((_, b)) if v < b || (b.is_nan() && !v.is_nan()) => best = Some((i, v)),
            _ => {}
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let f = |i: usize| (i as f64).sin();
        assert_eq!(map_trials(257, Execution::Parallel, f), map_trials(257, Execution::Sequential, f));
    }

    #[test]
    fn argmin_ties_to_lowest_index() {
        assert_eq!(argmin(&[3.0, -1.0, 2.0, -1.0]), Some((1, -1.0)));
        assert_eq!(argmin(&[]), None);
        assert_eq!(argmin(&[f64::NAN, 2.0]), Some((1, 2.0)));
    }
}
