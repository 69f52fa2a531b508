//! Execution policy for data-parallel loops.
//!
//! With the `parallel` feature (default) [`Exec::Parallel`] fans work out on
//! the rayon pool; without it every policy runs sequentially. Results are
//! always collected in input order so reductions stay deterministic.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Maps `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => items.par_iter().map(f).collect(),
            _ => items.iter().map(f).collect(),
        }
    }

    /// Maps `f` over `0..n`, preserving order.
    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }

    /// Fallible map; returns the first error in input order.
    pub fn try_map<T, R, E, F>(self, items: &[T], f: F) -> Result<Vec<R>, E>
    where
        T: Sync,
        R: Send,
        E: Send,
        F: Fn(&T) -> Result<R, E> + Sync + Send,
    {
        self.map(items, f).into_iter().collect()
    }

    /// Applies `f` to each element of `out` together with its index.
    pub fn for_each_indexed<T, F>(self, out: &mut [T], f: F)
    where
        T: Send,
        F: Fn(usize, &mut T) + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => out.par_iter_mut().enumerate().for_each(|(i, x)| f(i, x)),
            _ => out.iter_mut().enumerate().for_each(|(i, x)| f(i, x)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_policies_agree() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64 * 0.1).collect();
        let a = Exec::Sequential.map(&xs, |x| x.sin());
        let b = Exec::Parallel.map(&xs, |x| x.sin());
        assert_eq!(a, b);
        let r: Result<Vec<f64>, usize> =
            Exec::Parallel.try_map(&xs, |&x| if x > 50.0 { Err(x as usize) } else { Ok(x) });
        assert_eq!(r, Err(50));
        let mut buf = vec![0usize; 64];
        Exec::Parallel.for_each_indexed(&mut buf, |i, x| *x = i * i);
        assert_eq!(buf[7], 49);
    }
}
