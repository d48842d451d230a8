//! Index-parallel maps. The core crate only ships the sequential executor;
//! the companion crate provides a thread-pool one with identical output.

use alloc::vec::Vec;

pub trait Executor: Sync {
    /// `[f(0), f(1), …, f(n − 1)]`, in index order.
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}
