use coot_core::restart::{RestartRunner, Sequential};
use rayon::prelude::*;
use rayon::ThreadPool;

/// Runs restarts on a fixed-size thread pool. Results come back in restart order,
/// so selection does not depend on the number of threads.
pub struct RayonRunner {
    pool: ThreadPool,
}

impl RayonRunner {
    pub fn new(jobs: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        Ok(Self {
            pool: rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?,
        })
    }
}

impl RestartRunner for RayonRunner {
    fn run<T, F>(&self, count: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..count).into_par_iter().map(job).collect())
    }
}

pub enum Runner {
    Sequential(Sequential),
    Parallel(RayonRunner),
}

impl Runner {
    pub fn with_jobs(jobs: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        if jobs <= 1 {
            Ok(Self::Sequential(Sequential))
        } else {
            RayonRunner::new(jobs).map(Self::Parallel)
        }
    }
}

impl RestartRunner for Runner {
    fn run<T, F>(&self, count: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Self::Sequential(r) => r.run(count, job),
            Self::Parallel(r) => r.run(count, job),
        }
    }
}
