use std::sync::atomic::{AtomicUsize, Ordering};

use serde::Serialize;

/// Tallies of prepared-state evaluations. One expectation = one Hermitian
/// operator on one prepared (possibly shifted) state; one RDM = a full set
/// of 1- and 2-RDMs measured on one prepared state.
#[derive(Debug, Default)]
pub struct EvalCounter {
    expectations: AtomicUsize,
    rdms: AtomicUsize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EvalCounts {
    pub expectations: usize,
    pub rdms: usize,
}

impl EvalCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_expectations(&self, n: usize) {
        self.expectations.fetch_add(n, Ordering::Relaxed);
    }

    pub fn add_rdms(&self, n: usize) {
        self.rdms.fetch_add(n, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> EvalCounts {
        EvalCounts { expectations: self.expectations.load(Ordering::Relaxed), rdms: self.rdms.load(Ordering::Relaxed) }
    }

    pub fn reset(&self) {
        self.expectations.store(0, Ordering::Relaxed);
        self.rdms.store(0, Ordering::Relaxed);
    }
}

impl std::ops::Sub for EvalCounts {
    type Output = EvalCounts;
    fn sub(self, o: EvalCounts) -> EvalCounts {
        EvalCounts { expectations: self.expectations - o.expectations, rdms: self.rdms - o.rdms }
    }
}
