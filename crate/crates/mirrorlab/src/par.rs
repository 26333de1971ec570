//! Data-parallel helpers. With the `parallel` feature off everything runs sequentially.

use rug::Complex;

/// How independent work items (quadrature nodes, residue terms, per-degree coefficients) are run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecPolicy {
    Sequential,
    /// Uses rayon when compiled with the `parallel` feature, otherwise the same as `Sequential`.
    Parallel,
}

impl Default for ExecPolicy {
    fn default() -> Self {
        ExecPolicy::Parallel
    }
}

impl ExecPolicy {
    /// Order-preserving map.
    pub fn map<I, T, F>(self, items: Vec<I>, f: F) -> Vec<T>
    where
        I: Send,
        T: Send,
        F: Fn(I) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            ExecPolicy::Parallel => {
                use rayon::prelude::*;
                items.into_par_iter().map(f).collect()
            }
            _ => items.into_iter().map(f).collect(),
        }
    }
}

/// Pairwise (tree-ordered) sum; the result does not depend on how the terms were produced.
pub fn tree_sum(mut terms: Vec<Complex>, prec: u32) -> Complex {
    if terms.is_empty() {
        return Complex::new(prec);
    }
    while terms.len() > 1 {
        let mut next = Vec::with_capacity(terms.len().div_ceil(2));
        let mut it = terms.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a + b),
                None => next.push(a),
            }
        }
        terms = next;
    }
    terms.pop().unwrap()
}
