//! Independent job execution, sequential here and pluggable by callers.

use alloc::vec::Vec;

/// Runs independent jobs indexed `0..count`. Implementations may run them concurrently
/// but must return results in index order.
pub trait Executor: Sync {
    fn map<T: Send>(&self, count: usize, job: &(dyn Fn(usize) -> T + Sync)) -> Vec<T>;
}

/// Runs jobs in index order on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T: Send>(&self, count: usize, job: &(dyn Fn(usize) -> T + Sync)) -> Vec<T> {
        (0..count).map(job).collect()
    }
}
