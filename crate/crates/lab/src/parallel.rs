//! Rayon-backed [`Executor`].

use poiseuille_core::Executor;
use rayon::prelude::*;

use crate::error::LabError;

pub struct RayonExecutor {
    pool: rayon::ThreadPool,
}

impl RayonExecutor {
    /// `None` uses one thread per logical core.
    pub fn new(jobs: Option<usize>) -> Result<Self, LabError> {
        if jobs == Some(0) {
            return Err(LabError::Invalid(vec!["jobs: must be at least 1".into()]));
        }
        let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.unwrap_or(0)).build()?;
        Ok(Self { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for RayonExecutor {
    fn map<T: Send>(&self, count: usize, job: &(dyn Fn(usize) -> T + Sync)) -> Vec<T> {
        self.pool.install(|| (0..count).into_par_iter().map(job).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use poiseuille_core::Sequential;

    #[test]
    fn order_matches_sequential() {
        let pool = RayonExecutor::new(Some(4)).unwrap();
        let job = |k: usize| (k * k) as u64 % 17;
        assert_eq!(pool.map(1000, &job), Sequential.map(1000, &job));
    }
}
