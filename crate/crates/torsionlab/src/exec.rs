//! Thread-pool executor. Results come back in index order, so every report
//! is identical to the sequential one whatever the worker count.

use rayon::prelude::*;
use torsionlab_core::exec::Executor;

pub const WORKERS_ENV: &str = "TORSIONLAB_WORKERS";

pub struct Pool {
    pool: rayon::ThreadPool,
}

impl Pool {
    pub fn new(workers: usize) -> anyhow::Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
        Ok(Pool { pool })
    }

    /// Worker count from `TORSIONLAB_WORKERS`, else the number of CPUs.
    pub fn from_env() -> anyhow::Result<Self> {
        let default = std::thread::available_parallelism().map_or(1, |n| n.get());
        let workers = match std::env::var(WORKERS_ENV) {
            Ok(v) => v.trim().parse::<usize>().map_err(|_| anyhow::anyhow!("{WORKERS_ENV} must be a positive integer, got {v:?}"))?,
            Err(_) => default,
        };
        Self::new(workers.min(default.max(1)).max(1))
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for Pool {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..n).into_par_iter().map(f).collect())
    }
}
