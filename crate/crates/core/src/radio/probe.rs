//! Point-wise connectivity measurements, the only environment access the
//! model-free learners get.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;

/// Measures (or simulates) connectivity at a horizontal UAV position.
pub trait CoverageProbe {
    /// `true` when the UAV is disconnected at `xy`.
    fn is_disconnected(&self, xy: [f64; 2]) -> bool;
}

impl<P: CoverageProbe + ?Sized> CoverageProbe for &P {
    fn is_disconnected(&self, xy: [f64; 2]) -> bool {
        (**self).is_disconnected(xy)
    }
}

/// Counts queries forwarded to the wrapped probe.
#[derive(Debug)]
pub struct CountingProbe<P> {
    inner: P,
    queries: Cell<usize>,
}

impl<P> CountingProbe<P> {
    pub fn new(inner: P) -> Self {
        Self {
            inner,
            queries: Cell::new(0),
        }
    }

    pub fn queries(&self) -> usize {
        self.queries.get()
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }
}

impl<P: CoverageProbe> CoverageProbe for CountingProbe<P> {
    fn is_disconnected(&self, xy: [f64; 2]) -> bool {
        self.queries.set(self.queries.get() + 1);
        self.inner.is_disconnected(xy)
    }
}

/// Remembers each measurement so a revisited position is not re-simulated.
#[derive(Debug)]
pub struct CachedProbe<P> {
    inner: P,
    seen: RefCell<HashMap<(u64, u64), bool>>,
}

impl<P> CachedProbe<P> {
    pub fn new(inner: P) -> Self {
        Self {
            inner,
            seen: RefCell::new(HashMap::new()),
        }
    }

    /// Number of distinct positions measured so far.
    pub fn distinct(&self) -> usize {
        self.seen.borrow().len()
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }
}

impl<P: CoverageProbe> CoverageProbe for CachedProbe<P> {
    fn is_disconnected(&self, xy: [f64; 2]) -> bool {
        let key = (xy[0].to_bits(), xy[1].to_bits());
        if let Some(&hit) = self.seen.borrow().get(&key) {
            return hit;
        }
        let value = self.inner.is_disconnected(xy);
        self.seen.borrow_mut().insert(key, value);
        value
    }
}
